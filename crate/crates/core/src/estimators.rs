//! Entropy estimators and distances between empirical processes.
//!
//! Includes the Brin–Katok cylinder estimator, the first-return estimator, the
//! Hamming upper bound for d-bar with its entropy continuity bound, and a
//! weighted total-variation surrogate for the weak* distance on k-block
//! statistics.

use crate::measures::{log_cylinder_probability, MarkovMeasure};
use crate::shiftspace::{ShiftError, Word};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// Default cap on the first-return search.
pub const DEFAULT_RETURN_CAP: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatorError {
    #[error("{name} = {value} is outside its allowed range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("words have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("window length must be positive")]
    EmptyWindow,
    #[error("no return within search bound {bound}")]
    NoReturn { bound: usize },
    #[error("block distribution list covers k = {found:?}, expected 1..={kmax}")]
    BlockRange { found: Vec<usize>, kmax: usize },
    #[error(transparent)]
    Coverage(#[from] ShiftError),
}

/// `H(η) = −η ln η − (1−η) ln(1−η)` with `H(0) = H(1) = 0`.
pub fn binary_entropy(eta: f64) -> Result<f64, EstimatorError> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(EstimatorError::OutOfRange {
            name: "eta",
            value: eta,
        });
    }
    let term = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    Ok(term(eta) + term(1.0 - eta))
}

/// Entropy-difference bound `H(η) + η ln(size)` for processes within d-bar η.
pub fn dbar_entropy_bound(eta: f64, alphabet_size: usize) -> Result<f64, EstimatorError> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(EstimatorError::OutOfRange {
            name: "eta",
            value: eta,
        });
    }
    if alphabet_size < 2 {
        return Err(EstimatorError::OutOfRange {
            name: "alphabet_size",
            value: alphabet_size as f64,
        });
    }
    Ok(binary_entropy(eta)? + eta * (alphabet_size as f64).ln())
}

/// Normalized Hamming distance: the identity-coupling upper bound on d-bar.
pub fn dbar_sample_upper(u: &Word, v: &Word) -> Result<f64, EstimatorError> {
    if u.len() != v.len() {
        return Err(EstimatorError::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    if u.is_empty() {
        return Err(EstimatorError::EmptyWindow);
    }
    let diff = u
        .symbols
        .iter()
        .zip(&v.symbols)
        .filter(|(a, b)| a != b)
        .count();
    Ok(diff as f64 / u.len() as f64)
}

/// Brin–Katok estimate `−(1/n) ln μ([x on [−t, n+t)])`.
pub fn bk_estimate(
    measure: &MarkovMeasure,
    x: &Word,
    n: usize,
    radius: u32,
) -> Result<f64, EstimatorError> {
    if n == 0 {
        return Err(EstimatorError::EmptyWindow);
    }
    let t = radius as i64;
    let window = x.window(-t, n as i64 + t)?;
    Ok(-log_cylinder_probability(measure, window) / n as f64)
}

/// First-return estimate `(1/n) ln R`, where `R` is the first `i > 0` at which
/// the window `[−t, n+t)` of `z` recurs.
pub fn dw_estimate(
    z: &Word,
    n: usize,
    radius: u32,
    search_bound: Option<usize>,
) -> Result<f64, EstimatorError> {
    if n == 0 {
        return Err(EstimatorError::EmptyWindow);
    }
    let t = radius as i64;
    let width = n + 2 * radius as usize;
    let window = z.window(-t, n as i64 + t)?;
    let start = (-t - z.base) as usize;
    let tail = &z.symbols[start..];
    let available = tail.len().saturating_sub(width);
    let bound = search_bound.unwrap_or_else(|| z.len().saturating_sub(n).min(DEFAULT_RETURN_CAP));
    let limit = bound.min(available);
    for i in 1..=limit {
        if &tail[i..i + width] == window {
            return Ok((i as f64).ln() / n as f64);
        }
    }
    Err(EstimatorError::NoReturn { bound })
}

/// Empirical (or exact) frequencies of length-k blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockDistribution {
    pub k: usize,
    pub freqs: BTreeMap<Vec<u8>, f64>,
}

impl BlockDistribution {
    /// Overlapping k-block frequencies of a symbol sequence.
    pub fn from_symbols(symbols: &[u8], k: usize) -> Self {
        let mut counts: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
        let windows = symbols.len().saturating_sub(k.saturating_sub(1));
        if k == 0 || windows == 0 {
            return BlockDistribution { k, freqs: counts };
        }
        for w in symbols.windows(k) {
            *counts.entry(w.to_vec()).or_default() += 1.0;
        }
        let total = windows as f64;
        counts.values_mut().for_each(|c| *c /= total);
        BlockDistribution { k, freqs: counts }
    }

    /// Joint k-block frequencies of two aligned sequences, encoding the pair
    /// `(a, b)` as the single symbol `a * stride + b`.
    pub fn from_pairs(x: &[u8], y: &[u8], stride: u8, k: usize) -> Self {
        let joint: Vec<u8> = x.iter().zip(y).map(|(&a, &b)| a * stride + b).collect();
        Self::from_symbols(&joint, k)
    }

    /// The list for `k = 1..=kmax`.
    pub fn ladder(symbols: &[u8], kmax: usize) -> Vec<Self> {
        (1..=kmax).map(|k| Self::from_symbols(symbols, k)).collect()
    }

    pub fn total_variation(&self, other: &Self) -> f64 {
        let keys: BTreeSet<&Vec<u8>> = self.freqs.keys().chain(other.freqs.keys()).collect();
        0.5 * keys
            .into_iter()
            .map(|k| {
                (self.freqs.get(k).copied().unwrap_or(0.0) - other.freqs.get(k).copied().unwrap_or(0.0))
                    .abs()
            })
            .sum::<f64>()
    }
}

/// `Σ_{k=1}^{kmax} 2^{−k} TV(a_k, b_k)`.
pub fn weakstar_surrogate(
    a: &[BlockDistribution],
    b: &[BlockDistribution],
    kmax: usize,
) -> Result<f64, EstimatorError> {
    for list in [a, b] {
        let ks: Vec<usize> = list.iter().map(|d| d.k).collect();
        if ks.len() < kmax || ks.iter().take(kmax).enumerate().any(|(i, &k)| k != i + 1) {
            return Err(EstimatorError::BlockRange { found: ks, kmax });
        }
    }
    Ok((0..kmax)
        .map(|i| a[i].total_variation(&b[i]) / f64::powi(2.0, i as i32 + 1))
        .sum())
}

/// A one-line estimator report.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorReport {
    pub estimator: &'static str,
    pub n: usize,
    pub value: f64,
    pub seed: u64,
}

impl fmt::Display for EstimatorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "estimator={} n={} value={:.10} seed={}",
            self.estimator, self.n, self.value, self.seed
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{measure_entropy, sample_path};
    use proptest::prelude::*;

    #[test]
    fn binary_entropy_examples() {
        assert!((binary_entropy(0.5).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.1).unwrap() - 0.3251).abs() < 1e-4);
        assert!(binary_entropy(1.5).is_err());
    }

    #[test]
    fn dbar_bound_examples() {
        assert!((dbar_entropy_bound(0.1, 2).unwrap() - 0.3944).abs() < 1e-4);
        assert!((dbar_entropy_bound(0.5, 2).unwrap() - 1.5 * 2f64.ln()).abs() < 1e-12);
        assert!(dbar_entropy_bound(1e-9, 2).unwrap() < 1e-7);
        assert!(dbar_entropy_bound(0.0, 2).is_err());
    }

    #[test]
    fn dbar_bound_is_monotone() {
        for size in 2..6usize {
            let top = 1.0 - 1.0 / size as f64;
            let mut prev = 0.0;
            for i in 1..=200 {
                let eta = top * i as f64 / 200.0;
                let v = dbar_entropy_bound(eta, size).unwrap();
                assert!(v > prev);
                assert!(dbar_entropy_bound(eta, size + 1).unwrap() > v);
                prev = v;
            }
        }
    }

    #[test]
    fn hamming_examples() {
        let u = Word::from_digits("0110").unwrap();
        assert_eq!(dbar_sample_upper(&u, &u).unwrap(), 0.0);
        let c = Word::from_digits("1001").unwrap();
        assert_eq!(dbar_sample_upper(&u, &c).unwrap(), 1.0);
        let one = Word::from_digits("0111").unwrap();
        assert_eq!(dbar_sample_upper(&u, &one).unwrap(), 0.25);
        assert!(dbar_sample_upper(&u, &Word::from_digits("0").unwrap()).is_err());
    }

    #[test]
    fn bk_examples() {
        let fair = MarkovMeasure::bernoulli_binary(0.5).unwrap();
        let x = sample_path(&fair, 500, 3);
        assert!((bk_estimate(&fair, &x, 500, 0).unwrap() - 2f64.ln()).abs() < 1e-12);
        let cycle = MarkovMeasure::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let z = sample_path(&cycle, 64, 1);
        // the stationary weight 1/2 of the first symbol vanishes as n grows
        assert!((bk_estimate(&cycle, &z, 64, 0).unwrap() - 2f64.ln() / 64.0).abs() < 1e-12);
        let m = MarkovMeasure::new(vec![vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap();
        let x = sample_path(&m, 10_000, 5);
        assert!((bk_estimate(&m, &x, 10_000, 0).unwrap() - measure_entropy(&m)).abs() < 0.02);
        let shifted = Word::with_base(vec![0; 10], 0);
        assert!(bk_estimate(&fair, &shifted, 10, 1).is_err());
    }

    #[test]
    fn bk_converges_for_bernoulli_sources() {
        for p in [0.1, 0.3, 0.5] {
            let m = MarkovMeasure::bernoulli_binary(p).unwrap();
            let mean = (0..20)
                .map(|seed| bk_estimate(&m, &sample_path(&m, 10_000, seed), 10_000, 0).unwrap())
                .sum::<f64>()
                / 20.0;
            assert!((mean - binary_entropy(p).unwrap()).abs() < 0.03);
        }
    }

    #[test]
    fn dw_examples() {
        let periodic = Word::new((0..200).map(|i| (i % 5 == 0) as u8).collect());
        let v = dw_estimate(&periodic, 7, 0, None).unwrap();
        assert!((v - 5f64.ln() / 7.0).abs() < 1e-12);
        let constant = Word::new(vec![1; 50]);
        assert_eq!(dw_estimate(&constant, 4, 0, None).unwrap(), 0.0);
        let distinct = Word::from_digits("0123456789").unwrap();
        assert_eq!(
            dw_estimate(&distinct, 3, 0, Some(4)),
            Err(EstimatorError::NoReturn { bound: 4 })
        );
    }

    #[test]
    fn surrogate_examples() {
        let x = [0u8, 1, 1, 0, 1, 0, 0, 1];
        let a = BlockDistribution::ladder(&x, 3);
        assert_eq!(weakstar_surrogate(&a, &a, 3).unwrap(), 0.0);
        let mut d1 = BlockDistribution { k: 1, freqs: BTreeMap::new() };
        d1.freqs.insert(vec![0], 0.5);
        d1.freqs.insert(vec![1], 0.5);
        let mut d2 = d1.clone();
        d2.freqs.insert(vec![0], 0.8);
        d2.freqs.insert(vec![1], 0.2);
        assert!((weakstar_surrogate(&[d1], &[d2], 1).unwrap() - 0.15).abs() < 1e-12);
        let zeros = BlockDistribution::ladder(&[0; 10], 3);
        let ones = BlockDistribution::ladder(&[1; 10], 3);
        assert!((weakstar_surrogate(&zeros, &ones, 3).unwrap() - 0.875).abs() < 1e-12);
        assert!(weakstar_surrogate(&zeros[..2], &ones, 3).is_err());
    }

    fn distribution() -> impl Strategy<Value = Vec<BlockDistribution>> {
        prop::collection::vec(0u8..3, 4..40).prop_map(|w| BlockDistribution::ladder(&w, 3))
    }

    proptest! {
        #[test]
        fn hamming_is_a_metric(u in prop::collection::vec(0u8..2, 1..30), seed in 0u64..1000) {
            let n = u.len();
            let v: Vec<u8> = (0..n).map(|i| ((seed >> (i % 10)) & 1) as u8).collect();
            let w: Vec<u8> = (0..n).map(|i| ((seed.wrapping_mul(31) >> (i % 9)) & 1) as u8).collect();
            let (u, v, w) = (Word::new(u), Word::new(v), Word::new(w));
            let uv = dbar_sample_upper(&u, &v).unwrap();
            prop_assert_eq!(uv, dbar_sample_upper(&v, &u).unwrap());
            let uw = dbar_sample_upper(&u, &w).unwrap();
            let wv = dbar_sample_upper(&w, &v).unwrap();
            prop_assert!(uv <= uw + wv + 1e-12);
        }

        #[test]
        fn surrogate_metric_axioms(a in distribution(), b in distribution(), c in distribution()) {
            let ab = weakstar_surrogate(&a, &b, 3).unwrap();
            prop_assert!(weakstar_surrogate(&a, &a, 3).unwrap().abs() < 1e-12);
            prop_assert!((ab - weakstar_surrogate(&b, &a, 3).unwrap()).abs() < 1e-12);
            let ac = weakstar_surrogate(&a, &c, 3).unwrap();
            let cb = weakstar_surrogate(&c, &b, 3).unwrap();
            prop_assert!(ab <= ac + cb + 1e-12);
            prop_assert!(ab >= 0.0);
        }
    }
}
