//! AWGN slot channel and Monte-Carlo BER/SER estimation.
//!
//! Noise is calibrated so that simulation and the union bounds share one SNR
//! axis: with unit pulse amplitude the per-slot noise variance is
//! `σ² = 1 / (4γη)`. Two codewords at Hamming distance `d` are then confused
//! with probability `½ erfc(√(dγη/2))`, exactly the pairwise term of the
//! union bound.
//!
//! Trials are grouped into fixed blocks of [`BLOCK_TRIALS`]. Each block draws
//! from its own ChaCha8 stream keyed by `(seed, point)` with stream id equal
//! to the block index, so results do not depend on how blocks are scheduled
//! across threads. Stopping is decided by folding block results in index
//! order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::transceiver::{demodulate, SlotFrame};

/// Trials per RNG stream.
pub const BLOCK_TRIALS: u64 = 4096;
/// Blocks evaluated per parallel wave (independent of the worker count).
const WAVE_BLOCKS: u64 = 64;
/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonPositive { name, value })
    }
}

/// Average SNR of an optical link: `ρ² P0² / (N0 R_b)`.
pub fn gamma_fso(rho: f64, p0: f64, n0: f64, rb: f64) -> Result<f64> {
    let (rho, p0, n0, rb) = (positive("rho", rho)?, positive("p0", p0)?, positive("n0", n0)?, positive("rb", rb)?);
    Ok(rho * rho * p0 * p0 / (n0 * rb))
}

/// Average SNR of an impulse-radio link: `E_T R_b / (2 Δf N0)`.
pub fn gamma_uwb(e_t: f64, rb: f64, delta_f: f64, n0: f64) -> Result<f64> {
    let (e_t, rb, delta_f, n0) =
        (positive("e_t", e_t)?, positive("rb", rb)?, positive("delta_f", delta_f)?, positive("n0", n0)?);
    Ok(e_t * rb / (2.0 * delta_f * n0))
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// SNR `γ`, efficiency `η`, and the per-slot noise variance they imply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub gamma: f64,
    pub eta: f64,
    pub sigma2: f64,
}

impl ChannelParams {
    pub fn new(gamma: f64, eta: f64) -> Result<Self> {
        let gamma = positive("gamma", gamma)?;
        let eta = positive("eta", eta)?;
        Ok(Self { gamma, eta, sigma2: 1.0 / (4.0 * gamma * eta) })
    }

    pub fn for_constellation(c: &Constellation, gamma: f64) -> Result<Self> {
        Self::new(gamma, c.eta())
    }
}

/// Deterministic noise stream for block `block` of sweep point `point`.
pub fn noise_stream(seed: u64, point: u64, block: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&point.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(block);
    rng
}

/// Adds independent `N(0, σ²)` noise to every slot.
pub fn add_awgn<R: Rng + ?Sized>(x: &SlotFrame, sigma2: f64, rng: &mut R) -> SlotFrame {
    let mut out = x.clone();
    add_awgn_in_place(&mut out, sigma2, rng);
    out
}

pub fn add_awgn_in_place<R: Rng + ?Sized>(x: &mut SlotFrame, sigma2: f64, rng: &mut R) {
    assert!(sigma2 >= 0.0 && sigma2.is_finite(), "noise variance must be finite and non-negative");
    let sigma = sigma2.sqrt();
    for a in &mut x.amplitudes {
        let n: f64 = rng.sample(StandardNormal);
        *a += sigma * n;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloConfig {
    pub seed: u64,
    pub min_trials: u64,
    pub max_trials: u64,
    /// Stop once this many bit errors have been observed (after `min_trials`).
    pub target_errors: u64,
    /// When set, at least `10 / target_ber` trials are run.
    pub target_ber: Option<f64>,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            min_trials: 0,
            max_trials: 10_000_000,
            target_errors: 100,
            target_ber: None,
        }
    }
}

impl MonteCarloConfig {
    /// `min_trials`, raised to `⌈10 / target_ber⌉` when a target is given.
    pub fn effective_min_trials(&self) -> u64 {
        match self.target_ber {
            Some(b) => self.min_trials.max((10.0 / b).ceil() as u64),
            None => self.min_trials,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.target_errors == 0 {
            return Err(Error::InvalidArgument("target_errors must be at least 1".into()));
        }
        if self.max_trials == 0 {
            return Err(Error::InvalidArgument("max_trials must be positive".into()));
        }
        if let Some(b) = self.target_ber {
            if !(b > 0.0 && b < 1.0) {
                return Err(Error::InvalidArgument(format!("target_ber must be in (0, 1), got {b}")));
            }
        }
        if self.effective_min_trials() > self.max_trials {
            return Err(Error::InvalidArgument(format!(
                "minimum of {} trials exceeds max_trials {}",
                self.effective_min_trials(),
                self.max_trials
            )));
        }
        Ok(())
    }
}

/// Counts and rates for one `(constellation, γ)` cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerEstimate {
    pub trials: u64,
    pub bit_errors: u64,
    pub symbol_errors: u64,
    pub bits_per_symbol: usize,
    /// Σ (bit errors in trial)², for the per-trial variance.
    pub bit_error_sq_sum: u64,
    pub ber: f64,
    pub ser: f64,
    /// 95% normal-approximation half-width on `ber`.
    pub ci95_halfwidth: f64,
}

impl BerEstimate {
    fn from_counts(counts: BlockCounts, bits_per_symbol: usize) -> Self {
        let n = counts.trials as f64;
        let b = bits_per_symbol as f64;
        let ber = counts.bit_errors as f64 / (n * b);
        let ser = counts.symbol_errors as f64 / n;
        let mean = counts.bit_errors as f64 / n;
        let var = (counts.bit_error_sq_sum as f64 / n - mean * mean).max(0.0);
        Self {
            trials: counts.trials,
            bit_errors: counts.bit_errors,
            symbol_errors: counts.symbol_errors,
            bits_per_symbol,
            bit_error_sq_sum: counts.bit_error_sq_sum,
            ber,
            ser,
            ci95_halfwidth: Z95 * (var / n).sqrt() / b,
        }
    }

    /// Standard error of `ber`, from the per-trial bit-error variance.
    pub fn ber_std_err(&self) -> f64 {
        self.ci95_halfwidth / Z95
    }

    /// Binomial standard error of `ser`.
    pub fn ser_std_err(&self) -> f64 {
        (self.ser * (1.0 - self.ser) / self.trials as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct BlockCounts {
    trials: u64,
    bit_errors: u64,
    symbol_errors: u64,
    bit_error_sq_sum: u64,
}

impl BlockCounts {
    fn add(&mut self, other: &BlockCounts) {
        self.trials += other.trials;
        self.bit_errors += other.bit_errors;
        self.symbol_errors += other.symbol_errors;
        self.bit_error_sq_sum += other.bit_error_sq_sum;
    }
}

fn run_block(c: &Constellation, sigma2: f64, seed: u64, point: u64, block: u64, trials: u64) -> BlockCounts {
    let mut rng = noise_stream(seed, point, block);
    let mapped = c.mapped_indices();
    let mut frame = SlotFrame::new(vec![0.0; c.q()]);
    let mut counts = BlockCounts { trials, ..Default::default() };
    for _ in 0..trials {
        let label = rng.random_range(0..mapped.len());
        let sent = mapped[label];
        for (a, &b) in frame.amplitudes.iter_mut().zip(c.codeword(sent)) {
            *a = b as f64;
        }
        add_awgn_in_place(&mut frame, sigma2, &mut rng);
        let decided = demodulate(&frame, c);
        if decided != sent {
            let got = c.label_of(decided).expect("demodulator returns mapped symbols");
            let errs = (label ^ got).count_ones() as u64;
            counts.symbol_errors += 1;
            counts.bit_errors += errs;
            counts.bit_error_sq_sum += errs * errs;
        }
    }
    counts
}

fn run_point_indexed(c: &Constellation, gamma: f64, cfg: &MonteCarloConfig, point: u64) -> Result<BerEstimate> {
    cfg.validate()?;
    let params = ChannelParams::for_constellation(c, gamma)?;
    let min_trials = cfg.effective_min_trials();
    let n_blocks = cfg.max_trials.div_ceil(BLOCK_TRIALS);
    let block_len = |b: u64| BLOCK_TRIALS.min(cfg.max_trials - b * BLOCK_TRIALS);

    let mut total = BlockCounts::default();
    let mut next = 0u64;
    'waves: while next < n_blocks {
        let end = (next + WAVE_BLOCKS).min(n_blocks);
        let wave: Vec<BlockCounts> = (next..end)
            .into_par_iter()
            .map(|b| run_block(c, params.sigma2, cfg.seed, point, b, block_len(b)))
            .collect();
        for counts in &wave {
            total.add(counts);
            if total.trials >= min_trials && total.bit_errors >= cfg.target_errors {
                break 'waves;
            }
        }
        next = end;
    }
    Ok(BerEstimate::from_counts(total, c.bits_per_symbol()))
}

/// Estimates BER and SER at one SNR (linear `γ`).
pub fn run_ber_point(c: &Constellation, gamma: f64, cfg: &MonteCarloConfig) -> Result<BerEstimate> {
    run_point_indexed(c, gamma, cfg, 0)
}

/// Estimates BER and SER along a list of SNRs given in dB.
///
/// Point `i` uses RNG streams keyed by `(seed, i)`.
pub fn run_ber_sweep(c: &Constellation, gamma_list_db: &[f64], cfg: &MonteCarloConfig) -> Result<Vec<BerEstimate>> {
    if gamma_list_db.is_empty() {
        return Err(Error::InvalidArgument("empty gamma list".into()));
    }
    gamma_list_db
        .iter()
        .enumerate()
        .map(|(i, &db)| run_point_indexed(c, db_to_linear(db), cfg, i as u64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{build_eppm, build_ppm};
    use crate::design::qr_difference_set;
    use crate::transceiver::modulate;

    #[test]
    fn snr_recipes() {
        assert_eq!(gamma_fso(1.0, 1.0, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(gamma_fso(2.0, 3.0, 1.0, 1.0).unwrap(), 36.0);
        let g = gamma_fso(0.7, 1e-3, 1e-12, 1e6).unwrap();
        assert!((gamma_fso(0.7, 2e-3, 1e-12, 1e6).unwrap() / g - 4.0).abs() < 1e-12);
        assert!(matches!(gamma_fso(0.0, 1.0, 1.0, 1.0), Err(Error::NonPositive { name: "rho", .. })));

        assert_eq!(gamma_uwb(2.0, 1.0, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(gamma_uwb(4.0, 2.0, 1.0, 1.0).unwrap(), 4.0);
        let g = gamma_uwb(1e-9, 1e6, 5e8, 1e-18).unwrap();
        assert!((gamma_uwb(1e-9, 3e6, 5e8, 1e-18).unwrap() / g - 3.0).abs() < 1e-12);
        assert!(gamma_uwb(1.0, 1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn channel_params() {
        let p = ChannelParams::new(2.0, 0.25).unwrap();
        assert_eq!(p.sigma2, 0.5);
        assert!(ChannelParams::new(0.0, 1.0).is_err());
        assert!(ChannelParams::new(1.0, f64::NAN).is_err());
    }

    #[test]
    fn tiny_noise_is_transparent() {
        let c = build_eppm(&qr_difference_set(11).unwrap().expand());
        let mut rng = noise_stream(1, 0, 0);
        for &i in c.mapped_indices() {
            let x = modulate(i, &c).unwrap();
            let y = add_awgn(&x, 1e-30, &mut rng);
            assert!(x.amplitudes.iter().zip(&y.amplitudes).all(|(a, b)| (a - b).abs() < 1e-12));
            assert_eq!(demodulate(&y, &c), i);
        }
    }

    #[test]
    fn noise_moments() {
        let sigma2 = 0.3;
        let n = 1_000_000usize;
        let x = SlotFrame::new(vec![0.0; n]);
        let y = add_awgn(&x, sigma2, &mut noise_stream(42, 7, 3));
        let mean = y.amplitudes.iter().sum::<f64>() / n as f64;
        let var = y.amplitudes.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        // sd(mean) = sqrt(σ²/n); sd(var) ≈ σ² sqrt(2/(n-1))
        assert!(mean.abs() < 5.0 * (sigma2 / n as f64).sqrt(), "mean {mean}");
        assert!((var - sigma2).abs() < 5.0 * sigma2 * (2.0 / (n - 1) as f64).sqrt(), "var {var}");
    }

    #[test]
    fn streams_are_reproducible() {
        let x = SlotFrame::new(vec![0.0; 32]);
        let a = add_awgn(&x, 1.0, &mut noise_stream(9, 2, 5));
        let b = add_awgn(&x, 1.0, &mut noise_stream(9, 2, 5));
        let c = add_awgn(&x, 1.0, &mut noise_stream(9, 2, 6));
        let d = add_awgn(&x, 1.0, &mut noise_stream(9, 3, 5));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn config_validation() {
        let cfg = MonteCarloConfig { target_ber: Some(1e-3), ..Default::default() };
        assert_eq!(cfg.effective_min_trials(), 10_000);
        assert!(cfg.validate().is_ok());
        let cfg = MonteCarloConfig { target_ber: Some(1e-9), max_trials: 1000, ..Default::default() };
        assert!(cfg.validate().is_err());
        assert!(MonteCarloConfig { target_errors: 0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn stops_at_target_errors_on_block_boundary() {
        let c = build_ppm(4).unwrap();
        let cfg = MonteCarloConfig { seed: 3, target_errors: 50, max_trials: 1_000_000, ..Default::default() };
        let est = run_ber_point(&c, 1.0, &cfg).unwrap();
        assert!(est.bit_errors >= 50);
        assert_eq!(est.trials, BLOCK_TRIALS);
        assert_eq!(est.ber, est.bit_errors as f64 / (est.trials as f64 * 2.0));
        assert!(est.ber <= est.ser);
    }

    #[test]
    fn max_trials_truncates_last_block() {
        let c = build_ppm(4).unwrap();
        let cfg = MonteCarloConfig { seed: 3, target_errors: u64::MAX, max_trials: 5000, ..Default::default() };
        assert_eq!(run_ber_point(&c, 1.0, &cfg).unwrap().trials, 5000);
    }

    #[test]
    fn huge_snr_is_error_free() {
        let c = build_eppm(&qr_difference_set(7).unwrap().expand());
        let cfg = MonteCarloConfig { max_trials: 20_000, ..Default::default() };
        let est = run_ber_point(&c, 1e6, &cfg).unwrap();
        assert_eq!((est.trials, est.symbol_errors, est.bit_errors), (20_000, 0, 0));
    }
}
