//! Binary slot constellations and their distance structure.
//!
//! Every scheme is a list of length-`q` binary codewords plus a bit mapping.
//! Only the first `2^b` labels are used for transmission (`b` bits per
//! symbol); for AEPPM the mapped set is the first `m/2` design rows followed
//! by the complements of those same rows, which keeps the `±Z` receiver
//! symmetric.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;

use crate::design::IncidenceMatrix;
use crate::error::{Error, Result};

/// Upper limit on the number of MPPM codewords enumerated.
pub const MPPM_SIZE_CAP: u128 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Ppm,
    Mppm,
    Eppm,
    Aeppm,
    Ook,
    /// Arbitrary user-supplied codebook, decoded by minimum distance.
    Custom,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Ppm => "PPM",
            Scheme::Mppm => "MPPM",
            Scheme::Eppm => "EPPM",
            Scheme::Aeppm => "AEPPM",
            Scheme::Ook => "OOK",
            Scheme::Custom => "CUSTOM",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A codebook with its bit mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    scheme: Scheme,
    q: usize,
    k: usize,
    lambda: Option<usize>,
    codewords: Vec<Vec<u8>>,
    weights: Vec<usize>,
    /// `mapped[label]` is the codeword index carrying that bit label.
    mapped: Vec<usize>,
    label_of: Vec<Option<usize>>,
    bits_per_symbol: usize,
    /// Support of codeword 0 when codewords `0..q` are its cyclic shifts.
    generator: Option<Vec<usize>>,
}

fn floor_log2(n: usize) -> usize {
    (usize::BITS - 1 - n.leading_zeros()) as usize
}

impl Constellation {
    fn assemble(
        scheme: Scheme,
        q: usize,
        k: usize,
        lambda: Option<usize>,
        codewords: Vec<Vec<u8>>,
        generator: Option<Vec<usize>>,
    ) -> Self {
        let weights = codewords.iter().map(|c| c.iter().map(|&b| b as usize).sum()).collect();
        let mut c = Self {
            scheme,
            q,
            k,
            lambda,
            codewords,
            weights,
            mapped: Vec::new(),
            label_of: Vec::new(),
            bits_per_symbol: 0,
            generator,
        };
        let m = 1usize << floor_log2(c.codewords.len());
        c.set_mapping(m);
        c
    }

    fn set_mapping(&mut self, mapped_size: usize) {
        self.mapped = match self.scheme {
            Scheme::Aeppm => {
                let half = mapped_size / 2;
                (0..half).chain(self.q..self.q + half).collect()
            }
            _ => (0..mapped_size).collect(),
        };
        self.label_of = vec![None; self.codewords.len()];
        for (label, &idx) in self.mapped.iter().enumerate() {
            self.label_of[idx] = Some(label);
        }
        self.bits_per_symbol = floor_log2(mapped_size);
    }

    /// Restricts the mapping to `m` symbols (a power of two, `2 ≤ m ≤ M`).
    pub fn with_mapped_size(mut self, m: usize) -> Result<Self> {
        let bad = |why: &str| Error::InvalidArgument(format!("mapped size {m}: {why}"));
        if m < 2 || !m.is_power_of_two() {
            return Err(bad("must be a power of two >= 2"));
        }
        if m > self.codewords.len() {
            return Err(bad("exceeds the codebook size"));
        }
        self.set_mapping(m);
        Ok(self)
    }

    /// A codebook of equal-length binary words (entries must be 0 or 1).
    pub fn from_codewords(codewords: Vec<Vec<u8>>) -> Result<Self> {
        if codewords.len() < 2 {
            return Err(Error::InvalidArgument("need at least two codewords".into()));
        }
        let q = codewords[0].len();
        if q == 0 || codewords.iter().any(|c| c.len() != q || c.iter().any(|&b| b > 1)) {
            return Err(Error::InvalidArgument("codewords must be nonempty equal-length 0/1 vectors".into()));
        }
        let k = codewords[0].iter().map(|&b| b as usize).sum();
        Ok(Self::assemble(Scheme::Custom, q, k, None, codewords, None))
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn lambda(&self) -> Option<usize> {
        self.lambda
    }

    /// Total number of codewords `M`.
    pub fn m(&self) -> usize {
        self.codewords.len()
    }

    /// Number of codewords that carry a bit label, `2^bits_per_symbol`.
    pub fn mapped_size(&self) -> usize {
        self.mapped.len()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn codewords(&self) -> &[Vec<u8>] {
        &self.codewords
    }

    pub fn codeword(&self, index: usize) -> &[u8] {
        &self.codewords[index]
    }

    pub fn weight(&self, index: usize) -> usize {
        self.weights[index]
    }

    /// Codeword indices in label order.
    pub fn mapped_indices(&self) -> &[usize] {
        &self.mapped
    }

    pub fn label_of(&self, index: usize) -> Option<usize> {
        self.label_of.get(index).copied().flatten()
    }

    pub fn generator(&self) -> Option<&[usize]> {
        self.generator.as_deref()
    }

    /// Modulation efficiency `log2(mapped M) / q` in bits per slot.
    pub fn eta(&self) -> f64 {
        self.bits_per_symbol as f64 / self.q as f64
    }

    pub fn hamming(&self, i: usize, j: usize) -> usize {
        self.codewords[i]
            .iter()
            .zip(&self.codewords[j])
            .filter(|(a, b)| a != b)
            .count()
    }

    pub fn min_distance(&self) -> usize {
        let m = self.m();
        (0..m)
            .flat_map(|i| ((i + 1)..m).map(move |j| (i, j)))
            .map(|(i, j)| self.hamming(i, j))
            .min()
            .unwrap_or(0)
    }

    /// Codeword index for a bit string (MSB first, entries 0 or 1).
    pub fn map_bits(&self, bits: &[u8]) -> Result<usize> {
        if bits.len() != self.bits_per_symbol {
            return Err(Error::BadLength { expected: self.bits_per_symbol, actual: bits.len() });
        }
        let label = bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
        Ok(self.mapped[label])
    }

    /// Bit string carried by a codeword index.
    pub fn unmap_symbol(&self, index: usize) -> Result<Vec<u8>> {
        let label = self
            .label_of(index)
            .ok_or(Error::IndexOutOfRange { index, m: self.m() })?;
        Ok(label_bits(label, self.bits_per_symbol))
    }

    /// Matrix export: `SCHEME Q K LAMBDA M` followed by `M` rows of 0/1 characters.
    pub fn to_matrix_text(&self) -> String {
        let lambda = self.lambda.map_or_else(|| "-".to_string(), |l| l.to_string());
        let mut out = format!("{} {} {} {} {}\n", self.scheme, self.q, self.k, lambda, self.m());
        for cw in &self.codewords {
            out.extend(cw.iter().map(|&b| if b == 1 { '1' } else { '0' }));
            out.push('\n');
        }
        out
    }
}

/// `bits`-wide big-endian binary expansion of `label`.
pub fn label_bits(label: usize, bits: usize) -> Vec<u8> {
    (0..bits).rev().map(|s| ((label >> s) & 1) as u8).collect()
}

fn unit_vectors(q: usize) -> Vec<Vec<u8>> {
    (0..q)
        .map(|j| {
            let mut v = vec![0u8; q];
            v[j] = 1;
            v
        })
        .collect()
}

/// `q`-ary PPM: one pulse in one of `q` slots.
pub fn build_ppm(q: usize) -> Result<Constellation> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("PPM needs q >= 2, got {q}")));
    }
    Ok(Constellation::assemble(Scheme::Ppm, q, 1, Some(0), unit_vectors(q), Some(vec![0])))
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// All weight-`k` words of length `q`, ordered lexicographically by pulse positions.
pub fn build_mppm(q: usize, k: usize) -> Result<Constellation> {
    if k == 0 || k >= q {
        return Err(Error::InvalidArgument(format!("MPPM needs 1 <= k < q, got q={q} k={k}")));
    }
    let size = binomial(q, k);
    if size > MPPM_SIZE_CAP {
        return Err(Error::TooLarge { size, cap: MPPM_SIZE_CAP });
    }
    let mut codewords = Vec::with_capacity(size as usize);
    let mut pos: Vec<usize> = (0..k).collect();
    loop {
        let mut cw = vec![0u8; q];
        for &p in &pos {
            cw[p] = 1;
        }
        codewords.push(cw);
        // advance to the next k-combination
        let Some(i) = (0..k).rev().find(|&i| pos[i] < q - k + i) else {
            break;
        };
        pos[i] += 1;
        for j in (i + 1)..k {
            pos[j] = pos[j - 1] + 1;
        }
    }
    Ok(Constellation::assemble(Scheme::Mppm, q, k, None, codewords, None))
}

/// EPPM: the rows of a cyclic symmetric design's incidence matrix.
pub fn build_eppm(matrix: &IncidenceMatrix) -> Constellation {
    let p = matrix.params();
    Constellation::assemble(
        Scheme::Eppm,
        p.q(),
        p.k(),
        Some(p.lambda()),
        matrix.rows().to_vec(),
        Some(matrix.generator().to_vec()),
    )
}

/// AEPPM: the design rows followed by their complements.
pub fn build_aeppm(matrix: &IncidenceMatrix) -> Constellation {
    let p = matrix.params();
    let mut codewords = matrix.rows().to_vec();
    codewords.extend(matrix.rows().iter().map(|r| r.iter().map(|&b| 1 - b).collect::<Vec<u8>>()));
    Constellation::assemble(
        Scheme::Aeppm,
        p.q(),
        p.k(),
        Some(p.lambda()),
        codewords,
        Some(matrix.generator().to_vec()),
    )
}

/// On-off keying: a single slot, pulse or no pulse.
pub fn build_ook() -> Constellation {
    Constellation::assemble(Scheme::Ook, 1, 1, None, vec![vec![0], vec![1]], None)
}

/// Pairwise distance structure of a codebook.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceProfile {
    /// Number of codewords `M`.
    pub m: usize,
    pub q: usize,
    /// Sum of all ordered pairwise Hamming distances.
    pub pair_sum: u64,
    /// Ordered-pair count per distance (distance 0 only for repeated codewords).
    pub spectrum: BTreeMap<usize, u64>,
    /// Sum of codeword weights.
    pub a_total: u64,
    pub column_weights: Vec<u64>,
}

impl DistanceProfile {
    /// `D / (M(M−1))`.
    pub fn mean_distance(&self) -> Ratio<u64> {
        let m = self.m as u64;
        Ratio::new(self.pair_sum, m * (m - 1))
    }

    /// Right-hand side of the column-weight identity, `2(M·A − Σ W_l²)`.
    pub fn column_identity(&self) -> i128 {
        let sq: i128 = self.column_weights.iter().map(|&w| (w as i128) * (w as i128)).sum();
        2 * (self.m as i128 * self.a_total as i128 - sq)
    }

    /// Checks `D ≤ 2A(M − A/q)` exactly, by clearing the denominator `q`.
    pub fn cauchy_bound_holds(&self) -> bool {
        let (d, a, m, q) = (self.pair_sum as i128, self.a_total as i128, self.m as i128, self.q as i128);
        q * d <= 2 * a * (m * q - a)
    }

    /// The bound `2A(M − A/q)` as an exact rational.
    pub fn cauchy_bound(&self) -> Ratio<i128> {
        let (a, m, q) = (self.a_total as i128, self.m as i128, self.q as i128);
        Ratio::new(2 * a * (m * q - a), q)
    }
}

/// Exact distance spectrum and weight totals.
///
/// Panics if the column-weight identity for `D` fails, which would mean a
/// corrupted codebook.
pub fn distance_profile(c: &Constellation) -> DistanceProfile {
    let m = c.m();
    let mut spectrum = BTreeMap::new();
    let mut pair_sum = 0u64;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                let d = c.hamming(i, j);
                *spectrum.entry(d).or_insert(0) += 1;
                pair_sum += d as u64;
            }
        }
    }
    let mut column_weights = vec![0u64; c.q()];
    for cw in c.codewords() {
        for (w, &b) in column_weights.iter_mut().zip(cw) {
            *w += b as u64;
        }
    }
    let profile = DistanceProfile {
        m,
        q: c.q(),
        pair_sum,
        spectrum,
        a_total: c.weights.iter().map(|&w| w as u64).sum(),
        column_weights,
    };
    assert_eq!(profile.pair_sum as i128, profile.column_identity(), "distance-sum identity violated");
    profile
}

/// Distances from one codeword to every other, as a count per distance.
pub fn neighbor_spectrum(c: &Constellation, index: usize) -> BTreeMap<usize, u64> {
    let mut out = BTreeMap::new();
    for j in (0..c.m()).filter(|&j| j != index) {
        *out.entry(c.hamming(index, j)).or_insert(0) += 1;
    }
    out
}

/// How far the best equidistant code falls short of the mean-distance optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquidistanceGap {
    /// `q² / (2(q − 1))`, the largest achievable mean distance.
    pub d_max: Ratio<u64>,
    /// `(q + 1) / 2`, the largest integer common distance.
    pub d_integer_max: u64,
}

impl EquidistanceGap {
    /// `d_max − (q+1)/2`, which simplifies to `1 / (2(q − 1))`.
    pub fn gap(&self) -> Ratio<u64> {
        self.d_max - Ratio::from_integer(self.d_integer_max)
    }
}

pub fn equidistance_gap(q: usize) -> Result<EquidistanceGap> {
    if q < 3 || q.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("q must be odd and >= 3, got {q}")));
    }
    let q = q as u64;
    Ok(EquidistanceGap {
        d_max: Ratio::new(q * q, 2 * (q - 1)),
        d_integer_max: q.div_ceil(2),
    })
}
