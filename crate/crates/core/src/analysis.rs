//! Union bounds on symbol and bit error probability.
//!
//! All bounds share one kernel, the pairwise error probability between two
//! codewords at Hamming distance `d`:
//!
//! ```text
//! P(d) = ½ erfc(√(d γ η / 2)),    η = log2(M_mapped) / q
//! ```
//!
//! The generic bound averages `P(d_ij)` over every ordered codeword pair. The
//! closed forms for PPM, MPPM, EPPM and AEPPM are the same sum grouped by
//! distance. Bit error bounds use `M/(2(M−1))·P_s` for equidistant schemes
//! (and for AEPPM as a worst case) and the best-case `P_s / log2 M` for MPPM.

use std::fmt;

use crate::channel::{db_to_linear, linear_to_db};
use crate::constellation::{
    binomial, build_aeppm, build_eppm, build_mppm, build_ook, build_ppm, distance_profile, label_bits, Constellation,
    Scheme,
};
use crate::design::{cyclic_design_for_length, BibdParams, DifferenceSet};
use crate::error::{Error, Result};

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// `½ erfc(√(half_distance · γη))`: the error probability between two
/// codewords at Hamming distance `2·half_distance`.
#[inline]
fn pairwise(half_distance: f64, gamma_eta: f64) -> f64 {
    0.5 * erfc((half_distance * gamma_eta).sqrt())
}

fn floor_log2(n: usize) -> usize {
    (usize::BITS - 1 - n.leading_zeros()) as usize
}

fn eta_of(m_mapped: usize, q: usize) -> f64 {
    floor_log2(m_mapped) as f64 / q as f64
}

/// Distance spectrum of a codebook, kept for repeated bound evaluation.
#[derive(Debug, Clone)]
pub struct SpectrumBound {
    m: usize,
    eta: f64,
    /// `(distance, ordered pair count)`.
    spectrum: Vec<(usize, u64)>,
}

impl SpectrumBound {
    pub fn new(c: &Constellation) -> Self {
        let profile = distance_profile(c);
        Self {
            m: c.m(),
            eta: c.eta(),
            spectrum: profile.spectrum.into_iter().collect(),
        }
    }

    /// SER union bound at linear SNR `gamma`.
    pub fn ser(&self, gamma: f64) -> f64 {
        let ge = gamma * self.eta;
        self.spectrum
            .iter()
            .map(|&(d, count)| (count as f64 / self.m as f64) * pairwise(d as f64 / 2.0, ge))
            .sum()
    }
}

/// SER union bound over every ordered codeword pair of `c`.
pub fn union_bound_generic(c: &Constellation, gamma: f64) -> f64 {
    SpectrumBound::new(c).ser(gamma)
}

/// SER union bound over the mapped codewords only.
pub fn union_bound_mapped(c: &Constellation, gamma: f64) -> f64 {
    let ge = gamma * c.eta();
    let idx = c.mapped_indices();
    let m = idx.len() as f64;
    let mut total = 0.0;
    for &i in idx {
        for &j in idx.iter().filter(|&&j| j != i) {
            total += pairwise(c.hamming(i, j) as f64 / 2.0, ge);
        }
    }
    total / m
}

/// `(q−1)/2 · erfc(√(γη))` with `η = ⌊log2 q⌋ / q`.
pub fn union_bound_ppm(q: usize, gamma: f64) -> f64 {
    (q - 1) as f64 * pairwise(1.0, gamma * eta_of(q, q))
}

/// Spectrum-weighted sum over half-distances `1..=min(k, q−k)`.
pub fn union_bound_mppm(q: usize, k: usize, m_mapped: usize, gamma: f64) -> f64 {
    let ge = gamma * eta_of(m_mapped, q);
    (1..=k.min(q - k))
        .map(|kp| (binomial(k, kp) * binomial(q - k, kp)) as f64 * pairwise(kp as f64, ge))
        .sum()
}

/// High-SNR approximation keeping only the nearest neighbours, `K(Q−K)/2 · erfc(√(γη))`.
pub fn union_bound_mppm_nearest(q: usize, k: usize, m_mapped: usize, gamma: f64) -> f64 {
    (k * (q - k)) as f64 * pairwise(1.0, gamma * eta_of(m_mapped, q))
}

/// `(q−1)/2 · erfc(√((k−λ)γη))`.
pub fn union_bound_eppm(q: usize, k: usize, lambda: usize, m_mapped: usize, gamma: f64) -> Result<f64> {
    BibdParams::new(q, k, lambda)?;
    Ok((q - 1) as f64 * pairwise((k - lambda) as f64, gamma * eta_of(m_mapped, q)))
}

/// Closed form for rows plus complements.
///
/// Each codeword has `q−1` neighbours at `2(k−λ)`, one at `q` (its own
/// complement) and `q−1` at `q − 2(k−λ)`.
pub fn union_bound_aeppm(q: usize, k: usize, lambda: usize, m_mapped: usize, gamma: f64) -> Result<f64> {
    BibdParams::new(q, k, lambda)?;
    let ge = gamma * eta_of(m_mapped, q);
    let d_rows = 2 * (k - lambda);
    let d_cross = q - d_rows;
    Ok((q - 1) as f64 * pairwise(d_rows as f64 / 2.0, ge)
        + pairwise(q as f64 / 2.0, ge)
        + (q - 1) as f64 * pairwise(d_cross as f64 / 2.0, ge))
}

/// `P_b = M / (2(M−1)) · P_s`.
pub fn ber_from_ser_equidistant(ser: f64, m: usize) -> f64 {
    assert!(m >= 2, "need at least two symbols");
    ser * m as f64 / (2.0 * (m - 1) as f64)
}

/// Bit error bounds for a labelled codebook.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappedBerBound {
    /// Pairwise terms weighted by the label Hamming distance, over mapped symbols.
    pub weighted: f64,
    /// `P_s / log2 M` with `P_s` the full-codebook union bound.
    pub best_case: f64,
}

pub fn ber_bound_mapped(c: &Constellation, gamma: f64) -> MappedBerBound {
    let ge = gamma * c.eta();
    let idx = c.mapped_indices();
    let bits = c.bits_per_symbol();
    let m = idx.len() as f64;
    let mut weighted = 0.0;
    for (li, &i) in idx.iter().enumerate() {
        for (lj, &j) in idx.iter().enumerate().filter(|&(lj, _)| lj != li) {
            let label_distance = (li ^ lj).count_ones() as f64;
            weighted += pairwise(c.hamming(i, j) as f64 / 2.0, ge) * label_distance;
        }
    }
    MappedBerBound {
        weighted: weighted / (m * bits as f64),
        best_case: union_bound_generic(c, gamma) / bits as f64,
    }
}

/// An analytic scheme description; `m` is the mapped symbol count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeSpec {
    Ppm { q: usize },
    Mppm { q: usize, k: usize, m: usize },
    Eppm { q: usize, k: usize, lambda: usize, m: usize },
    Aeppm { q: usize, k: usize, lambda: usize, m: usize },
    Ook,
}

impl SchemeSpec {
    pub fn ppm(q: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidArgument(format!("PPM needs q >= 2, got {q}")));
        }
        Ok(Self::Ppm { q })
    }

    /// MPPM mapping `2^⌊log2 C(q,k)⌋` symbols unless `m` is given.
    pub fn mppm(q: usize, k: usize, m: Option<usize>) -> Result<Self> {
        if k == 0 || k >= q {
            return Err(Error::InvalidArgument(format!("MPPM needs 1 <= k < q, got q={q} k={k}")));
        }
        let size = binomial(q, k);
        let max_bits = 127 - size.leading_zeros() as usize;
        let m = match m {
            Some(m) => m,
            None if max_bits < usize::BITS as usize => 1usize << max_bits,
            None => return Err(Error::InvalidArgument("MPPM codebook too large to map".into())),
        };
        check_mapped(m, size)?;
        Ok(Self::Mppm { q, k, m })
    }

    pub fn eppm(params: BibdParams, m: Option<usize>) -> Result<Self> {
        let m = m.unwrap_or(1 << floor_log2(params.q()));
        check_mapped(m, params.q() as u128)?;
        Ok(Self::Eppm { q: params.q(), k: params.k(), lambda: params.lambda(), m })
    }

    pub fn aeppm(params: BibdParams, m: Option<usize>) -> Result<Self> {
        let m = m.unwrap_or(1 << floor_log2(2 * params.q()));
        check_mapped(m, 2 * params.q() as u128)?;
        Ok(Self::Aeppm { q: params.q(), k: params.k(), lambda: params.lambda(), m })
    }

    /// Describes a built constellation; custom codebooks have no closed form.
    pub fn from_constellation(c: &Constellation) -> Result<Self> {
        let m = c.mapped_size();
        Ok(match c.scheme() {
            Scheme::Ppm => Self::Ppm { q: c.q() },
            Scheme::Mppm => Self::Mppm { q: c.q(), k: c.k(), m },
            Scheme::Eppm => Self::Eppm { q: c.q(), k: c.k(), lambda: c.lambda().unwrap_or(0), m },
            Scheme::Aeppm => Self::Aeppm { q: c.q(), k: c.k(), lambda: c.lambda().unwrap_or(0), m },
            Scheme::Ook => Self::Ook,
            s @ Scheme::Custom => return Err(Error::SchemeMismatch(s)),
        })
    }

    pub fn scheme(&self) -> Scheme {
        match self {
            Self::Ppm { .. } => Scheme::Ppm,
            Self::Mppm { .. } => Scheme::Mppm,
            Self::Eppm { .. } => Scheme::Eppm,
            Self::Aeppm { .. } => Scheme::Aeppm,
            Self::Ook => Scheme::Ook,
        }
    }

    pub fn q(&self) -> usize {
        match *self {
            Self::Ppm { q } | Self::Mppm { q, .. } | Self::Eppm { q, .. } | Self::Aeppm { q, .. } => q,
            Self::Ook => 1,
        }
    }

    pub fn k(&self) -> usize {
        match *self {
            Self::Ppm { .. } | Self::Ook => 1,
            Self::Mppm { k, .. } | Self::Eppm { k, .. } | Self::Aeppm { k, .. } => k,
        }
    }

    pub fn lambda(&self) -> Option<usize> {
        match *self {
            Self::Ppm { .. } => Some(0),
            Self::Eppm { lambda, .. } | Self::Aeppm { lambda, .. } => Some(lambda),
            Self::Mppm { .. } | Self::Ook => None,
        }
    }

    /// Mapped symbol count.
    pub fn m(&self) -> usize {
        match *self {
            Self::Ppm { q } => 1 << floor_log2(q),
            Self::Mppm { m, .. } | Self::Eppm { m, .. } | Self::Aeppm { m, .. } => m,
            Self::Ook => 2,
        }
    }

    /// Bits per slot, `log2(m) / q`.
    pub fn eta(&self) -> f64 {
        eta_of(self.m(), self.q())
    }

    pub fn ser_bound(&self, gamma: f64) -> f64 {
        match *self {
            Self::Ppm { q } => union_bound_ppm(q, gamma),
            Self::Mppm { q, k, m } => union_bound_mppm(q, k, m, gamma),
            Self::Eppm { q, k, lambda, m } => {
                (q - 1) as f64 * pairwise((k - lambda) as f64, gamma * eta_of(m, q))
            }
            Self::Aeppm { q, k, lambda, m } => {
                union_bound_aeppm(q, k, lambda, m, gamma).expect("validated at construction")
            }
            Self::Ook => pairwise(0.5, gamma),
        }
    }

    pub fn ber_bound(&self, gamma: f64) -> f64 {
        let ser = self.ser_bound(gamma);
        match self {
            Self::Mppm { .. } => ser / floor_log2(self.m()) as f64,
            _ => ber_from_ser_equidistant(ser, self.m()),
        }
    }

    /// Builds the codebook. EPPM/AEPPM use `design` when given, otherwise
    /// a built-in construction for the length.
    pub fn build(&self, design: Option<&DifferenceSet>) -> Result<Constellation> {
        let from_design = |q: usize, k: usize, lambda: usize| -> Result<_> {
            let ds = match design {
                Some(ds) => ds.clone(),
                None => cyclic_design_for_length(q)?,
            };
            let p = ds.params();
            if (p.q(), p.k(), p.lambda()) != (q, k, lambda) {
                return Err(Error::InvalidArgument(format!("design {p} does not match ({q}, {k}, {lambda})")));
            }
            Ok(ds.expand())
        };
        match *self {
            Self::Ppm { q } => build_ppm(q),
            Self::Mppm { q, k, m } => build_mppm(q, k)?.with_mapped_size(m),
            Self::Eppm { q, k, lambda, m } => build_eppm(&from_design(q, k, lambda)?).with_mapped_size(m),
            Self::Aeppm { q, k, lambda, m } => build_aeppm(&from_design(q, k, lambda)?).with_mapped_size(m),
            Self::Ook => Ok(build_ook()),
        }
    }
}

fn check_mapped(m: usize, size: u128) -> Result<()> {
    if m < 2 || !m.is_power_of_two() || m as u128 > size {
        return Err(Error::InvalidArgument(format!(
            "mapped size {m} must be a power of two in [2, {size}]"
        )));
    }
    Ok(())
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Ppm { q } => write!(f, "{}-ary PPM (Q={q})", self.m()),
            Self::Mppm { q, k, m } => write!(f, "{m}-ary MPPM (Q={q}, K={k})"),
            Self::Eppm { q, k, lambda, m } => write!(f, "{m}-ary EPPM (Q={q}, K={k}, λ={lambda})"),
            Self::Aeppm { q, k, lambda, m } => write!(f, "{m}-ary AEPPM (Q={q}, K={k}, λ={lambda})"),
            Self::Ook => write!(f, "OOK"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPoint {
    pub gamma_db: f64,
    pub ser_bound: f64,
    pub ber_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub spec: SchemeSpec,
    pub points: Vec<BoundPoint>,
}

pub fn bound_curve(spec: SchemeSpec, gamma_db: &[f64]) -> BoundCurve {
    let points = gamma_db
        .iter()
        .map(|&db| {
            let g = db_to_linear(db);
            BoundPoint { gamma_db: db, ser_bound: spec.ser_bound(g), ber_bound: spec.ber_bound(g) }
        })
        .collect();
    BoundCurve { spec, points }
}

const GAMMA_LO: f64 = 1e-6;
const GAMMA_HI: f64 = 1e12;

/// Smallest `γ` (in dB) at which a decreasing BER curve reaches `target`.
///
/// Geometric bisection to a relative tolerance of 1e-6 in `γ`.
pub fn solve_required_gamma<F: Fn(f64) -> f64>(ber: F, target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 0.5) {
        return Err(Error::InvalidArgument(format!("target BER must be in (0, 0.5), got {target}")));
    }
    let (mut lo, mut hi) = (GAMMA_LO, GAMMA_HI);
    if ber(lo) < target || ber(hi) > target {
        return Err(Error::NotBracketed { target });
    }
    while hi / lo - 1.0 > 1e-6 {
        let mid = (lo * hi).sqrt();
        if ber(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(linear_to_db((lo * hi).sqrt()))
}

pub fn required_gamma(spec: &SchemeSpec, target_ber: f64) -> Result<f64> {
    solve_required_gamma(|g| spec.ber_bound(g), target_ber)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierPoint {
    pub spec: SchemeSpec,
    pub eta: f64,
    pub required_gamma_db: f64,
}

/// Efficiency and required SNR for each scheme at a target BER.
pub fn spectral_efficiency_frontier(specs: &[SchemeSpec], target_ber: f64) -> Result<Vec<FrontierPoint>> {
    specs
        .iter()
        .map(|spec| {
            Ok(FrontierPoint { spec: *spec, eta: spec.eta(), required_gamma_db: required_gamma(spec, target_ber)? })
        })
        .collect()
}

/// PPM lengths of the frontier: `2^2 ..= 2^8`.
pub const FRONTIER_PPM_Q: [usize; 7] = [4, 8, 16, 32, 64, 128, 256];
/// EPPM/AEPPM lengths of the frontier.
pub const FRONTIER_EPPM_Q: [usize; 7] = [7, 11, 19, 35, 67, 131, 263];
/// MPPM lengths of the frontier, each with `K = Q/2`.
pub const FRONTIER_MPPM_Q: [usize; 6] = [4, 8, 12, 16, 24, 32];

/// The default frontier families: OOK, PPM, EPPM, AEPPM, and MPPM.
pub fn frontier_schemes() -> Result<Vec<SchemeSpec>> {
    let mut out = vec![SchemeSpec::Ook];
    for q in FRONTIER_PPM_Q {
        out.push(SchemeSpec::ppm(q)?);
    }
    let designs: Vec<BibdParams> =
        FRONTIER_EPPM_Q.iter().map(|&q| cyclic_design_for_length(q).map(|d| d.params())).collect::<Result<_>>()?;
    for &p in &designs {
        out.push(SchemeSpec::eppm(p, None)?);
    }
    for &p in &designs {
        out.push(SchemeSpec::aeppm(p, None)?);
    }
    for q in FRONTIER_MPPM_Q {
        out.push(SchemeSpec::mppm(q, q / 2, None)?);
    }
    Ok(out)
}

/// Natural-binary label distance table, handy for mapping diagnostics.
pub fn label_distance(a: usize, b: usize, bits: usize) -> usize {
    label_bits(a, bits).iter().zip(label_bits(b, bits)).filter(|(x, y)| *x != y).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::qr_difference_set;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn params(q: usize) -> BibdParams {
        cyclic_design_for_length(q).unwrap().params()
    }

    /// erfc at dyadic arguments, 50-digit reference values.
    // 50-digit reference values, truncated by the compiler
    #[allow(clippy::excessive_precision)]
    const ERFC_REF: [(f64, f64); 20] = [
        (0.0, 1.0),
        (0.421875, 0.550_760_215_925_305_738_04),
        (0.84375, 0.232_774_338_767_658_366_54),
        (1.265625, 0.073_475_771_036_047_581_341),
        (1.6875, 0.017_010_283_398_021_970_241),
        (2.109375, 0.002_853_384_695_444_563_552_2),
        (2.53125, 0.000_343_951_930_687_268_997_54),
        (2.953125, 0.000_029_622_466_912_605_149_899),
        (3.375, 1.815_281_427_440_355_761_8e-6),
        (3.796875, 7.891_491_912_784_375_741_8e-8),
        (4.21875, 2.428_225_683_029_710_983_7e-9),
        (4.640625, 5.279_432_327_026_194_850_4e-11),
        (5.0625, 8.099_774_240_291_918_242_6e-13),
        (5.484375, 8.759_650_166_846_329_069_4e-15),
        (5.90625, 6.672_060_598_116_238_727_9e-17),
        (6.328125, 3.576_782_264_408_412_143_1e-19),
        (6.75, 1.348_767_889_361_130_051_2e-21),
        (7.171875, 3.575_925_134_947_014_829_9e-24),
        (7.59375, 6.663_051_599_405_265_867_8e-27),
        (8.0, 1.122_429_717_298_292_708e-29),
    ];

    #[test]
    fn erfc_accuracy() {
        for (x, want) in ERFC_REF {
            assert!(rel(erfc(x), want) < 1e-14, "erfc({x}) = {} want {want}", erfc(x));
        }
    }

    #[test]
    fn ppm_bound_values() {
        // q=8: η = 3/8, so γη = 4 at γ = 32/3.
        let g = 32.0 / 3.0;
        assert!(rel(union_bound_ppm(8, g), 0.016_372_072_433_665_430_433) < 1e-13);
        assert!(rel(union_bound_generic(&build_ppm(8).unwrap(), g), union_bound_ppm(8, g)) < 1e-12);
        assert!((union_bound_ppm(2, 1e-300) - 0.5).abs() < 1e-15);
        // Larger Q needs more SNR.
        let req: Vec<f64> = [4, 8, 16, 32].iter().map(|&q| required_gamma(&SchemeSpec::Ppm { q }, 1e-5).unwrap()).collect();
        assert!(req.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn mppm_bound_terms() {
        let g: f64 = 7.3;
        let ge = g * 0.5;
        let want = 20.0 * 0.5 * erfc(ge.sqrt()) + 45.0 * 0.5 * erfc((2.0 * ge).sqrt());
        assert!(rel(union_bound_mppm(12, 2, 64, g), want) < 1e-14);
        let c = build_mppm(12, 2).unwrap();
        assert!(rel(union_bound_generic(&c, g), union_bound_mppm(12, 2, 64, g)) < 1e-12);
        for q in [3, 5, 8] {
            let gq = 2.5;
            assert!(rel(union_bound_mppm(q, 1, 1 << floor_log2(q), gq), union_bound_ppm(q, gq)) < 1e-14);
        }
    }

    #[test]
    fn mppm_nearest_neighbour_limit() {
        // Find γ where the leading term is 1e-8, then compare.
        let g = 10f64.powf(solve_required_gamma(|g| union_bound_mppm_nearest(12, 2, 64, g), 1e-8).unwrap() / 10.0);
        let ratio = union_bound_mppm_nearest(12, 2, 64, g) / union_bound_mppm(12, 2, 64, g);
        assert!((ratio - 1.0).abs() < 1e-3, "ratio {ratio}");
        let g6 = 10f64.powf(solve_required_gamma(|g| union_bound_mppm_nearest(12, 2, 64, g), 1e-6).unwrap() / 10.0);
        assert!(rel(union_bound_mppm_nearest(12, 2, 64, g6), union_bound_mppm(12, 2, 64, g6)) < 0.01);
    }

    #[test]
    fn eppm_bound_values() {
        let g: f64 = 4.2;
        let want = 5.0 * erfc((3.0 * g * 3.0 / 11.0).sqrt());
        assert!(rel(union_bound_eppm(11, 5, 2, 8, g).unwrap(), want) < 1e-14);
        assert!(union_bound_eppm(8, 3, 1, 8, g).is_err());
        let c = build_eppm(&qr_difference_set(7).unwrap().expand());
        assert!(rel(union_bound_generic(&c, g), union_bound_eppm(7, 3, 1, 4, g).unwrap()) < 1e-12);
        // Degenerate design is PPM.
        assert_eq!(union_bound_eppm(8 - 1, 1, 0, 4, g).unwrap(), union_bound_ppm(7, g));
    }

    #[test]
    fn aeppm_closed_form_matches_generic() {
        for q in [7, 11, 19] {
            let d = qr_difference_set(q).unwrap();
            let c = build_aeppm(&d.expand());
            let p = d.params();
            for g in [0.5, 3.0, 20.0] {
                let closed = union_bound_aeppm(q, p.k(), p.lambda(), c.mapped_size(), g).unwrap();
                assert!(rel(union_bound_generic(&c, g), closed) < 1e-12);
            }
        }
    }

    #[test]
    fn ber_relations() {
        assert_eq!(ber_from_ser_equidistant(0.3, 2), 0.3);
        assert!(rel(ber_from_ser_equidistant(0.7, 8), 0.4) < 1e-15);
        assert!((ber_from_ser_equidistant(1.0, 1 << 30) - 0.5).abs() < 1e-9);

        let c = build_eppm(&qr_difference_set(7).unwrap().expand());
        for g in [1.0, 5.0, 25.0] {
            let b = ber_bound_mapped(&c, g);
            let want = ber_from_ser_equidistant(union_bound_mapped(&c, g), c.mapped_size());
            assert!(rel(b.weighted, want) < 1e-12);
        }

        let c = build_ook();
        let g = 3.0;
        assert!(rel(ber_bound_mapped(&c, g).weighted, 0.5 * erfc((g / 2.0).sqrt())) < 1e-15);

        let c = build_mppm(12, 2).unwrap();
        let b = ber_bound_mapped(&c, 9.0);
        assert!(rel(b.best_case, union_bound_mppm(12, 2, 64, 9.0) / 6.0) < 1e-12);
    }

    #[test]
    fn bounds_decrease_and_ber_below_ser() {
        let specs = [
            SchemeSpec::Ppm { q: 8 },
            SchemeSpec::mppm(12, 2, Some(64)).unwrap(),
            SchemeSpec::eppm(params(11), None).unwrap(),
            SchemeSpec::aeppm(params(11), None).unwrap(),
            SchemeSpec::Ook,
        ];
        let grid: Vec<f64> = (0..40).map(|i| i as f64 * 0.5).collect();
        for spec in specs {
            let curve = bound_curve(spec, &grid);
            for w in curve.points.windows(2) {
                assert!(w[1].ser_bound < w[0].ser_bound, "{spec}");
                assert!(w[1].ber_bound < w[0].ber_bound, "{spec}");
            }
            assert!(curve.points.iter().all(|p| p.ber_bound <= p.ser_bound));
        }
    }

    #[test]
    fn aeppm_trades_distance_for_rate() {
        for q in [7, 11, 19, 35] {
            let p = params(q);
            let e = SchemeSpec::eppm(p, None).unwrap();
            let a = SchemeSpec::aeppm(p, None).unwrap();
            assert!(a.eta() > e.eta());
            // at equal η the augmented codebook has the worse SER bound
            let ea = SchemeSpec::Eppm { q, k: p.k(), lambda: p.lambda(), m: a.m() / 2 };
            for g in [1.0, 10.0, 50.0] {
                let aeq = union_bound_aeppm(q, p.k(), p.lambda(), ea.m(), g).unwrap();
                assert!(aeq > ea.ser_bound(g));
            }
        }
    }

    #[test]
    fn solver() {
        let spec = SchemeSpec::Ook;
        let db = required_gamma(&spec, 1e-5).unwrap();
        let g = db_to_linear(db);
        assert!(rel(spec.ber_bound(g), 1e-5) < 1e-5);
        assert!(matches!(required_gamma(&spec, 0.7), Err(Error::InvalidArgument(_))));
        assert!(matches!(solve_required_gamma(|_| 0.1, 1e-3), Err(Error::NotBracketed { .. })));
    }

    #[test]
    fn frontier_families() {
        let specs = frontier_schemes().unwrap();
        let pts = spectral_efficiency_frontier(&specs, 1e-5).unwrap();
        let family = |s: Scheme| -> Vec<FrontierPoint> { pts.iter().copied().filter(|p| p.spec.scheme() == s).collect() };
        let ppm = family(Scheme::Ppm);
        let eppm = family(Scheme::Eppm);
        assert_eq!(ppm.iter().map(|p| p.spec.q()).collect::<Vec<_>>(), FRONTIER_PPM_Q);
        assert_eq!(eppm.iter().map(|p| p.spec.q()).collect::<Vec<_>>(), FRONTIER_EPPM_Q);
        assert!(ppm.windows(2).all(|w| w[1].required_gamma_db > w[0].required_gamma_db));
        assert!(eppm.windows(2).all(|w| w[1].required_gamma_db < w[0].required_gamma_db));
        assert!(eppm.windows(2).all(|w| w[1].eta < w[0].eta));
        assert_eq!(family(Scheme::Ook).len(), 1);
        assert_eq!(family(Scheme::Ook)[0].eta, 1.0);
    }

    #[test]
    fn spec_build_round_trip() {
        let spec = SchemeSpec::eppm(params(67), Some(64)).unwrap();
        let c = spec.build(None).unwrap();
        assert_eq!((c.q(), c.mapped_size()), (67, 64));
        assert_eq!(SchemeSpec::from_constellation(&c).unwrap(), spec);
        assert!(SchemeSpec::eppm(params(7), Some(8)).is_err());
        assert_eq!(SchemeSpec::mppm(12, 2, None).unwrap().m(), 64);
        let wrong = qr_difference_set(7).unwrap();
        assert!(SchemeSpec::eppm(params(11), None).unwrap().build(Some(&wrong)).is_err());
    }

    #[test]
    fn equidistant_codebooks_beat_random_ones() {
        // Random weight-k codebooks never beat the design's bound at equal (q, A, γ).
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for q in [7usize, 11, 15] {
            let ds = cyclic_design_for_length(q).unwrap();
            let eppm = build_eppm(&ds.expand());
            let k = ds.params().k();
            for trial in 0..334 {
                let codewords: Vec<Vec<u8>> = (0..q)
                    .map(|_| {
                        let mut cw = vec![0u8; q];
                        let mut placed = 0;
                        while placed < k {
                            let s = rng.random_range(0..q);
                            if cw[s] == 0 {
                                cw[s] = 1;
                                placed += 1;
                            }
                        }
                        cw
                    })
                    .collect();
                let c = Constellation::from_codewords(codewords).unwrap();
                assert_eq!(c.eta(), eppm.eta());
                for g in [0.5, 4.0, 30.0] {
                    assert!(
                        union_bound_generic(&c, g) >= union_bound_generic(&eppm, g) * (1.0 - 1e-12),
                        "q={q} trial={trial} g={g}"
                    );
                }
            }
        }
    }

    #[test]
    fn label_distances() {
        assert_eq!(label_distance(0b101, 0b010, 3), 3);
        assert_eq!(label_distance(5, 5, 3), 0);
    }
}
