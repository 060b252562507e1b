//! Cyclic symmetric block designs.
//!
//! A `(q, k, λ)` cyclic difference set is a `k`-subset of `Z_q` in which every
//! nonzero residue occurs exactly `λ` times as a difference of two distinct
//! elements. Its `q` translates are the blocks of a symmetric BIBD, and the
//! block indicators form a cyclic incidence matrix whose rows are pairwise
//! equidistant at Hamming distance `2(k − λ)`.
//!
//! Three sources are supported:
//!
//! * quadratic residues modulo a prime `q ≡ 3 (mod 4)`, giving `(q, (q−1)/2, (q−3)/4)`;
//! * the twin-prime construction over `Z_{p(p+2)}`;
//! * a bounded backtracking search for small parameters.
//!
//! Designs from anywhere else can be read from the line-oriented text format
//! `Q K LAMBDA : r1 r2 ... rK`.

use std::fmt;
use std::io::BufRead;

use crate::error::{Error, Result};

/// Default candidate budget for [`brute_force_search`].
pub const DEFAULT_SEARCH_BUDGET: u64 = 100_000_000;

/// Parameters `(q, k, λ)` of a symmetric design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BibdParams {
    q: usize,
    k: usize,
    lambda: usize,
}

impl BibdParams {
    pub fn new(q: usize, k: usize, lambda: usize) -> Result<Self> {
        let invalid = |reason| Error::InvalidParams { q, k, lambda, reason };
        if q < 3 {
            return Err(invalid("q must be at least 3"));
        }
        if k == 0 || k >= q {
            return Err(invalid("k must satisfy 1 <= k < q"));
        }
        if lambda >= k {
            return Err(invalid("lambda must be smaller than k"));
        }
        if lambda * (q - 1) != k * (k - 1) {
            return Err(invalid("lambda(q-1) != k(k-1)"));
        }
        Ok(Self { q, k, lambda })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    /// Hamming distance between any two distinct blocks, `2(k − λ)`.
    pub fn block_distance(&self) -> usize {
        2 * (self.k - self.lambda)
    }
}

impl fmt::Display for BibdParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.q, self.k, self.lambda)
    }
}

/// Outcome of checking a candidate difference set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub q: usize,
    pub k: usize,
    pub lambda: usize,
    /// `difference_counts[d - 1]` is the number of ordered pairs `(a, b)`
    /// with `a − b ≡ d (mod q)`.
    pub difference_counts: Vec<usize>,
    pub counting_identity_holds: bool,
    /// Structural problems (wrong size, duplicates, out-of-range residues).
    pub problems: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.counting_identity_holds
            && self.problems.is_empty()
            && self.difference_counts.iter().all(|&c| c == self.lambda)
    }

    /// Residues whose difference count differs from λ, with their counts.
    pub fn failures(&self) -> Vec<(usize, usize)> {
        self.difference_counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != self.lambda)
            .map(|(i, &c)| (i + 1, c))
            .collect()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} ({}, {}, {})", self.q, self.k, self.lambda)?;
        if !self.counting_identity_holds {
            write!(f, "; lambda(q-1) != k(k-1)")?;
        }
        for p in &self.problems {
            write!(f, "; {p}")?;
        }
        for (d, c) in self.failures() {
            write!(f, "; difference {d} occurs {c} times")?;
        }
        Ok(())
    }
}

/// Counts ordered differences and checks every structural condition.
///
/// Works on raw parts so that invalid candidates can be diagnosed.
pub fn verify_difference_set(q: usize, k: usize, lambda: usize, residues: &[usize]) -> VerificationReport {
    let mut problems = Vec::new();
    if residues.len() != k {
        problems.push(format!("expected {k} residues, got {}", residues.len()));
    }
    let mut seen = vec![false; q];
    for &r in residues {
        if r >= q {
            problems.push(format!("residue {r} not in [0, {q})"));
        } else if std::mem::replace(&mut seen[r], true) {
            problems.push(format!("residue {r} repeated"));
        }
    }
    let mut counts = vec![0usize; q.saturating_sub(1)];
    for &a in residues.iter().filter(|&&r| r < q) {
        for &b in residues.iter().filter(|&&r| r < q) {
            let d = (a + q - b) % q;
            if d != 0 {
                counts[d - 1] += 1;
            }
        }
    }
    VerificationReport {
        q,
        k,
        lambda,
        difference_counts: counts,
        counting_identity_holds: q >= 1 && lambda * (q.saturating_sub(1)) == k * k.saturating_sub(1),
        problems,
    }
}

/// A verified cyclic `(q, k, λ)` difference set, stored sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DifferenceSet {
    params: BibdParams,
    residues: Vec<usize>,
}

impl DifferenceSet {
    /// Sorts the residues and verifies the difference property.
    pub fn new(params: BibdParams, mut residues: Vec<usize>) -> Result<Self> {
        residues.sort_unstable();
        let report = verify_difference_set(params.q, params.k, params.lambda, &residues);
        if !report.passed() {
            return Err(Error::VerificationFailed(report));
        }
        Ok(Self { params, residues })
    }

    pub fn params(&self) -> BibdParams {
        self.params
    }

    pub fn residues(&self) -> &[usize] {
        &self.residues
    }

    pub fn verify(&self) -> VerificationReport {
        let p = self.params;
        verify_difference_set(p.q, p.k, p.lambda, &self.residues)
    }

    /// Expands the set into its cyclic incidence matrix.
    pub fn expand(&self) -> IncidenceMatrix {
        expand_incidence(self)
    }
}

/// Writes the `Q K LAMBDA : r1 ... rK` line (no trailing newline).
impl fmt::Display for DifferenceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} :", self.params.q, self.params.k, self.params.lambda)?;
        for r in &self.residues {
            write!(f, " {r}")?;
        }
        Ok(())
    }
}

/// Binary `q × q` incidence matrix of a cyclic symmetric design.
///
/// Row `j` is the indicator of `{r + j mod q}` over the generating residues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    params: BibdParams,
    generator: Vec<usize>,
    rows: Vec<Vec<u8>>,
}

impl IncidenceMatrix {
    pub fn params(&self) -> BibdParams {
        self.params
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn row(&self, j: usize) -> &[u8] {
        &self.rows[j]
    }

    /// Support of row 0; row `j` is this set shifted by `j`.
    pub fn generator(&self) -> &[usize] {
        &self.generator
    }

    pub fn column_weights(&self) -> Vec<usize> {
        let q = self.params.q;
        (0..q)
            .map(|l| self.rows.iter().map(|r| r[l] as usize).sum())
            .collect()
    }
}

pub fn expand_incidence(ds: &DifferenceSet) -> IncidenceMatrix {
    let q = ds.params.q;
    let rows = (0..q)
        .map(|j| {
            let mut row = vec![0u8; q];
            for &r in &ds.residues {
                row[(r + j) % q] = 1;
            }
            row
        })
        .collect();
    IncidenceMatrix {
        params: ds.params,
        generator: ds.residues.clone(),
        rows,
    }
}

/// Deterministic trial division.
pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Legendre symbol of `a` modulo an odd prime `p` via Euler's criterion.
fn legendre(a: usize, p: usize) -> i8 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod(a as u64, ((p - 1) / 2) as u64, p as u64) == 1 {
        1
    } else {
        -1
    }
}

/// Nonzero quadratic residues modulo a prime `q ≡ 3 (mod 4)`.
pub fn qr_difference_set(q: usize) -> Result<DifferenceSet> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if q % 4 != 3 {
        return Err(Error::WrongResidueClass(q));
    }
    let mut residues: Vec<usize> = (1..q).map(|x| x * x % q).collect();
    residues.sort_unstable();
    residues.dedup();
    let params = BibdParams::new(q, (q - 1) / 2, (q - 3) / 4)?;
    DifferenceSet::new(params, residues)
}

/// Twin-prime difference set over `Z_{p(p+2)}`.
///
/// `z` is included when, with `x = z mod p` and `y = z mod (p+2)`, either
/// `y = 0` or `x` and `y` are both residues or both non-residues.
pub fn twin_prime_difference_set(p: usize) -> Result<DifferenceSet> {
    if !is_prime(p) || !is_prime(p + 2) || p < 3 {
        return Err(Error::NotTwinPrimes(p));
    }
    let s = p + 2;
    let n = p * s;
    let residues: Vec<usize> = (0..n)
        .filter(|&z| {
            let (x, y) = (z % p, z % s);
            y == 0 || (x != 0 && legendre(x, p) * legendre(y, s) == 1)
        })
        .collect();
    let params = BibdParams::new(n, (n - 1) / 2, (n - 3) / 4)?;
    DifferenceSet::new(params, residues)
}

/// Backtracking search over `k`-subsets of `Z_q` that contain 0.
///
/// Elements are chosen in increasing order, so the first hit is the
/// lexicographically smallest set containing 0. `budget` caps the number of
/// candidate extensions tried.
pub fn brute_force_search(params: BibdParams, budget: u64) -> Result<DifferenceSet> {
    let (q, k, lambda) = (params.q, params.k, params.lambda);
    let not_found = Error::NotFound { q, k, lambda };
    let mut counts = vec![0usize; q];
    let mut chosen = vec![0usize];
    let mut spent = 0u64;
    if search(q, k, lambda, &mut chosen, &mut counts, &mut spent, budget) {
        DifferenceSet::new(params, chosen)
    } else {
        Err(not_found)
    }
}

fn search(
    q: usize,
    k: usize,
    lambda: usize,
    chosen: &mut Vec<usize>,
    counts: &mut [usize],
    spent: &mut u64,
    budget: u64,
) -> bool {
    if chosen.len() == k {
        return counts[1..].iter().all(|&c| c == lambda);
    }
    let start = chosen.last().map_or(0, |&l| l + 1);
    let remaining = k - chosen.len();
    for cand in start..=(q - remaining) {
        if *spent >= budget {
            return false;
        }
        *spent += 1;
        let mut ok = true;
        let mut touched = 0;
        for &e in chosen.iter() {
            let d1 = (cand + q - e) % q;
            let d2 = q - d1;
            counts[d1] += 1;
            counts[d2] += 1;
            touched += 1;
            if counts[d1] > lambda || counts[d2] > lambda {
                ok = false;
                break;
            }
        }
        if ok {
            chosen.push(cand);
            if search(q, k, lambda, chosen, counts, spent, budget) {
                return true;
            }
            chosen.pop();
        }
        for &e in chosen.iter().take(touched) {
            let d1 = (cand + q - e) % q;
            counts[d1] -= 1;
            counts[q - d1] -= 1;
        }
    }
    false
}

/// Picks a built-in construction for a code length `q`.
///
/// Quadratic residues for primes `q ≡ 3 (mod 4)`, the twin-prime set when
/// `q = p(p+2)`. Other lengths are rejected with `InvalidParams`.
pub fn cyclic_design_for_length(q: usize) -> Result<DifferenceSet> {
    if is_prime(q) && q % 4 == 3 {
        return qr_difference_set(q);
    }
    if let Some(p) = twin_prime_factor(q) {
        return twin_prime_difference_set(p);
    }
    Err(Error::InvalidParams {
        q,
        k: q.saturating_sub(1) / 2,
        lambda: q.saturating_sub(3) / 4,
        reason: "no built-in construction for this length",
    })
}

fn twin_prime_factor(n: usize) -> Option<usize> {
    // p(p+2) = n  =>  p = sqrt(n+1) - 1
    let root = (((n + 1) as f64).sqrt().round()) as usize;
    if root * root != n + 1 || root < 4 {
        return None;
    }
    let p = root - 1;
    (is_prime(p) && is_prime(p + 2)).then_some(p)
}

fn parse_line(line: &str, lineno: usize) -> Result<DifferenceSet> {
    let perr = |message: String| Error::Parse { line: lineno, message };
    let (head, tail) = line
        .split_once(':')
        .ok_or_else(|| perr("missing ':' separator".into()))?;
    let nums = |s: &str| -> Result<Vec<usize>> {
        s.split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| perr(format!("bad integer {t:?}: {e}"))))
            .collect()
    };
    let header = nums(head)?;
    let [q, k, lambda] = header[..] else {
        return Err(perr(format!("expected 'Q K LAMBDA', got {} fields", header.len())));
    };
    let residues = nums(tail)?;
    if residues.len() != k {
        return Err(perr(format!("expected {k} residues, got {}", residues.len())));
    }
    let report = verify_difference_set(q, k, lambda, &residues);
    if !report.passed() {
        return Err(Error::VerificationFailed(report));
    }
    let params = BibdParams::new(q, k, lambda)?;
    DifferenceSet::new(params, residues)
}

/// Reads every design in a stream. Blank lines and `#` comments are skipped.
pub fn load_difference_sets<R: BufRead>(reader: R) -> Result<Vec<DifferenceSet>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        out.push(parse_line(trimmed, i + 1)?);
    }
    Ok(out)
}

/// Reads the first design in a stream; an empty stream is a parse error.
pub fn load_difference_set<R: BufRead>(reader: R) -> Result<DifferenceSet> {
    load_difference_sets(reader)?
        .into_iter()
        .next()
        .ok_or(Error::Parse { line: 0, message: "no design found".into() })
}
