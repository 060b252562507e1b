//! Slot-level modulation and the cyclic differential correlation receiver.
//!
//! For cyclic codebooks (PPM, EPPM, AEPPM) the receiver holds one frame and
//! correlates it against every cyclic shift of the generating block:
//!
//! ```text
//! Z_j = <x, c_j> − Γ <x, c̄_j>,   Γ = λ / (k − λ)
//! ```
//!
//! With a noiseless frame equal to codeword `l` this gives `Z_l = k` and
//! `Z_j = 0` elsewhere. AEPPM extends the decision set with `−Z_j`, where a
//! winning `−Z_j` selects the complement of row `j`.
//!
//! Non-cyclic codebooks are decoded by minimum Euclidean distance, which for
//! equal-weight codebooks such as MPPM is plain maximum correlation.

use crate::constellation::{Constellation, Scheme};
use crate::error::{Error, Result};

/// Received (or transmitted) amplitudes for the `q` slots of one symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotFrame {
    pub amplitudes: Vec<f64>,
    pub a_pulse: f64,
}

impl SlotFrame {
    pub fn new(amplitudes: Vec<f64>) -> Self {
        Self { amplitudes, a_pulse: 1.0 }
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }
}

/// Receiver outputs `Z_1..Z_q` for a cyclic codebook.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionStatistics {
    pub z: Vec<f64>,
    /// Γ, the weight applied to the complement correlation.
    pub gamma_weight: f64,
    /// Whether the decision set includes `−Z_j` (AEPPM).
    pub extended: bool,
}

impl DecisionStatistics {
    /// Decision value for a codeword index: `Z_j` for rows, `−Z_j` for
    /// complement `q + j` of an extended set.
    pub fn value(&self, index: usize) -> f64 {
        let q = self.z.len();
        if index < q {
            self.z[index]
        } else {
            -self.z[index - q]
        }
    }

    /// The full decision set in codeword-index order.
    pub fn decision_set(&self) -> Vec<f64> {
        let mut out = self.z.clone();
        if self.extended {
            out.extend(self.z.iter().map(|z| -z));
        }
        out
    }
}

/// Pulse amplitude 1 where the codeword has a one.
pub fn modulate(symbol_index: usize, c: &Constellation) -> Result<SlotFrame> {
    if symbol_index >= c.m() {
        return Err(Error::IndexOutOfRange { index: symbol_index, m: c.m() });
    }
    let amplitudes = c.codeword(symbol_index).iter().map(|&b| b as f64).collect();
    Ok(SlotFrame::new(amplitudes))
}

/// `λ / (k − λ)` for cyclic schemes.
pub fn differential_weight(c: &Constellation) -> Result<f64> {
    match (c.scheme(), c.lambda()) {
        (Scheme::Ppm | Scheme::Eppm | Scheme::Aeppm, Some(lambda)) => {
            Ok(lambda as f64 / (c.k() - lambda) as f64)
        }
        (s, _) => Err(Error::SchemeMismatch(s)),
    }
}

/// `<x, c_j>` for `j = 0..q`, read off the stored frame by cyclic shifts of
/// the generating block.
pub fn cyclic_correlations(x: &SlotFrame, c: &Constellation) -> Result<Vec<f64>> {
    let generator = c.generator().ok_or(Error::SchemeMismatch(c.scheme()))?;
    let q = c.q();
    if x.len() != q {
        return Err(Error::InvalidArgument(format!("frame has {} slots, expected {q}", x.len())));
    }
    Ok((0..q)
        .map(|shift| generator.iter().map(|&r| x.amplitudes[(r + shift) % q]).sum())
        .collect())
}

/// Cyclic correlation of the stored frame followed by the Γ-differential.
pub fn decision_statistics(x: &SlotFrame, c: &Constellation) -> Result<DecisionStatistics> {
    let gamma_weight = differential_weight(c)?;
    let total: f64 = x.amplitudes.iter().sum();
    let z = cyclic_correlations(x, c)?
        .into_iter()
        .map(|corr| corr - gamma_weight * (total - corr))
        .collect();
    Ok(DecisionStatistics {
        z,
        gamma_weight,
        extended: c.scheme() == Scheme::Aeppm,
    })
}

fn argmax_over<F: Fn(usize) -> f64>(candidates: &[usize], score: F) -> usize {
    let mut best = candidates[0];
    let mut best_score = score(best);
    for &idx in &candidates[1..] {
        let s = score(idx);
        if s > best_score {
            best = idx;
            best_score = s;
        }
    }
    best
}

/// Decides among the mapped codewords; ties go to the lowest index.
///
/// Returns a codeword index.
pub fn demodulate(x: &SlotFrame, c: &Constellation) -> usize {
    let candidates = c.mapped_indices();
    match c.scheme() {
        Scheme::Ppm | Scheme::Eppm | Scheme::Aeppm if x.len() == c.q() => {
            let stats = decision_statistics(x, c).expect("cyclic scheme");
            argmax_over(candidates, |idx| stats.value(idx))
        }
        _ => {
            let half = 0.5 * x.a_pulse;
            argmax_over(candidates, |idx| {
                let corr: f64 = c
                    .codeword(idx)
                    .iter()
                    .zip(&x.amplitudes)
                    .filter(|(&b, _)| b == 1)
                    .map(|(_, &a)| a)
                    .sum();
                corr - half * c.weight(idx) as f64
            })
        }
    }
}
