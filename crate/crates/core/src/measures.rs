//! Stationary Markov and Bernoulli measures on symbol sequences.
//!
//! States of a [`MarkovMeasure`] are alphabet symbols, so a measure lives on
//! the memory-1 vertex shift its positive transitions generate. Cylinder
//! weights are exact products; thresholds should use the log-space variants.

use crate::shiftspace::{build_sft, Sft, ShiftError, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use thiserror::Error;

const ROW_TOL: f64 = 1e-12;
const PARSE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("transition matrix must be square and non-empty (got {rows} rows, row {bad} has {len} entries)")]
    Shape { rows: usize, bad: usize, len: usize },
    #[error("row {row} has a negative or non-finite entry")]
    BadEntry { row: usize },
    #[error("row {row} sums to {sum}, not 1")]
    NotStochastic { row: usize, sum: f64 },
    #[error("transition matrix is reducible: state {from} cannot reach state {to}")]
    Reducible { from: usize, to: usize },
    #[error("maximal-entropy measures need an SFT of memory at most 1 (got memory {0})")]
    Memory(usize),
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Shift(#[from] ShiftError),
}

/// A stationary Markov chain on alphabet symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovMeasure {
    transition: Vec<Vec<f64>>,
    stationary: Vec<f64>,
    cumulative: Vec<Vec<f64>>,
}

impl MarkovMeasure {
    /// Validates a row-stochastic matrix and computes its stationary vector.
    pub fn new(transition: Vec<Vec<f64>>) -> Result<Self, MeasureError> {
        validate_rows(&transition, ROW_TOL)?;
        let stationary = stationary_vector(&transition)?;
        Ok(Self::assemble(transition, stationary))
    }

    fn assemble(transition: Vec<Vec<f64>>, stationary: Vec<f64>) -> Self {
        let cumulative = transition
            .iter()
            .map(|row| {
                row.iter()
                    .scan(0.0, |acc, &p| {
                        *acc += p;
                        Some(*acc)
                    })
                    .collect()
            })
            .collect();
        MarkovMeasure {
            transition,
            stationary,
            cumulative,
        }
    }

    /// I.i.d. symbols with the given marginal.
    pub fn bernoulli(probs: &[f64]) -> Result<Self, MeasureError> {
        let rows = vec![probs.to_vec(); probs.len()];
        validate_rows(&rows, ROW_TOL)?;
        // the marginal is stationary even when some symbols have mass zero
        Ok(Self::assemble(rows, probs.to_vec()))
    }

    /// Binary i.i.d. measure with `P(1) = p`.
    pub fn bernoulli_binary(p: f64) -> Result<Self, MeasureError> {
        Self::bernoulli(&[1.0 - p, p])
    }

    /// Uniform i.i.d. measure on `alphabet` symbols.
    pub fn uniform(alphabet: usize) -> Self {
        Self::bernoulli(&vec![1.0 / alphabet as f64; alphabet]).expect("uniform rows are stochastic")
    }

    /// Parry measure: the measure of maximal entropy of a memory-≤1 SFT.
    pub fn max_entropy(sft: &Sft) -> Result<Self, MeasureError> {
        if sft.memory() > 1 {
            return Err(MeasureError::Memory(sft.memory()));
        }
        let adj = sft.adjacency();
        let n = adj.len();
        let lambda = crate::shiftspace::perron_root(&adj);
        let mut v = vec![1.0f64; n];
        for _ in 0..10_000 {
            let w: Vec<f64> = (0..n)
                .map(|i| v[i] + (0..n).map(|j| adj[i][j] as f64 * v[j]).sum::<f64>())
                .collect();
            let norm = w.iter().cloned().fold(0.0, f64::max);
            let w: Vec<f64> = w.into_iter().map(|x| x / norm).collect();
            let delta = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            v = w;
            if delta < 1e-15 {
                break;
            }
        }
        let a = sft.alphabet_size();
        let mut rows = vec![vec![0.0; a]; a];
        for (i, state) in sft.states().iter().enumerate() {
            let si = state[0] as usize;
            let total: f64 = (0..n).map(|j| adj[i][j] as f64 * v[j]).sum();
            for j in 0..n {
                if adj[i][j] == 1 {
                    rows[si][sft.states()[j][0] as usize] = v[j] / total;
                }
            }
            debug_assert!((total / (lambda * v[i]) - 1.0).abs() < 1e-6);
        }
        for (s, row) in rows.iter_mut().enumerate() {
            if row.iter().all(|&p| p == 0.0) {
                row[s] = 1.0;
            }
        }
        let stationary = stationary_on_support(&rows, sft);
        Ok(Self::assemble(rows, stationary))
    }

    pub fn alphabet_size(&self) -> usize {
        self.transition.len()
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    /// The vertex SFT generated by positive transitions of recurrent symbols.
    pub fn support_sft(&self) -> Result<Sft, MeasureError> {
        let a = self.alphabet_size();
        let mut forbidden = Vec::new();
        for i in 0..a {
            if self.stationary[i] == 0.0 {
                forbidden.push(Word::new(vec![i as u8]));
                continue;
            }
            for j in 0..a {
                if self.transition[i][j] == 0.0 {
                    forbidden.push(Word::new(vec![i as u8, j as u8]));
                }
            }
        }
        Ok(build_sft(a, &forbidden)?)
    }

    /// True when every positive-probability 2-block is admissible in `sft`.
    pub fn supported_on(&self, sft: &Sft) -> bool {
        let a = self.alphabet_size();
        if a != sft.alphabet_size() {
            return false;
        }
        (0..a).all(|i| {
            self.stationary[i] == 0.0
                || (sft.is_admissible(&[i as u8])
                    && (0..a).all(|j| {
                        self.transition[i][j] == 0.0 || sft.is_admissible(&[i as u8, j as u8])
                    }))
        })
    }

    /// Parses `states <n>` followed by `row p1 p2 ...` lines.
    pub fn from_text(text: &str) -> Result<Self, MeasureError> {
        let mut size: Option<usize> = None;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            let column = line.len() - line.trim_start().len() + 1;
            let err = |message: String| MeasureError::Parse {
                line: ln + 1,
                column,
                message,
            };
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("states") if size.is_none() => {
                    let v = parts.next().ok_or_else(|| err("`states` needs a count".into()))?;
                    let n = v
                        .parse::<usize>()
                        .ok()
                        .filter(|&n| n > 0)
                        .ok_or_else(|| err(format!("bad state count `{v}`")))?;
                    size = Some(n);
                }
                Some("states") => return Err(err("duplicate `states` line".into())),
                Some("row") => {
                    let n = size.ok_or_else(|| err("`row` before `states`".into()))?;
                    let row = parts
                        .map(|t| t.parse::<f64>().map_err(|_| err(format!("bad probability `{t}`"))))
                        .collect::<Result<Vec<_>, _>>()?;
                    if row.len() != n {
                        return Err(err(format!("expected {n} entries, got {}", row.len())));
                    }
                    rows.push(row);
                }
                Some(other) => return Err(err(format!("unknown directive `{other}`"))),
                None => {}
            }
        }
        let n = size.ok_or(MeasureError::Parse {
            line: 1,
            column: 1,
            message: "missing `states` line".into(),
        })?;
        if rows.len() != n {
            return Err(MeasureError::Parse {
                line: text.lines().count().max(1),
                column: 1,
                message: format!("expected {n} rows, got {}", rows.len()),
            });
        }
        validate_rows(&rows, PARSE_TOL)?;
        let rows = rows
            .into_iter()
            .map(|r| {
                let s: f64 = r.iter().sum();
                r.into_iter().map(|p| p / s).collect()
            })
            .collect::<Vec<Vec<f64>>>();
        if rows.windows(2).all(|w| w[0] == w[1]) {
            let marginal = rows[0].clone();
            return Ok(Self::assemble(rows, marginal));
        }
        Self::new(rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("states {}\n", self.alphabet_size());
        for row in &self.transition {
            out.push_str("row");
            for p in row {
                out.push_str(&format!(" {p}"));
            }
            out.push('\n');
        }
        out
    }

    /// Exact k-block probabilities (positive ones only), keyed by block.
    pub fn block_probabilities(&self, k: usize) -> BTreeMap<Vec<u8>, f64> {
        let mut out = BTreeMap::new();
        if k == 0 {
            out.insert(Vec::new(), 1.0);
            return out;
        }
        let mut frontier: Vec<(Vec<u8>, f64)> = (0..self.alphabet_size())
            .filter(|&i| self.stationary[i] > 0.0)
            .map(|i| (vec![i as u8], self.stationary[i]))
            .collect();
        for _ in 1..k {
            frontier = frontier
                .into_iter()
                .flat_map(|(w, p)| {
                    let last = *w.last().unwrap() as usize;
                    self.transition[last]
                        .iter()
                        .enumerate()
                        .filter(|(_, &q)| q > 0.0)
                        .map(move |(j, &q)| {
                            let mut v = w.clone();
                            v.push(j as u8);
                            (v, p * q)
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        out.extend(frontier);
        out
    }
}

fn validate_rows(rows: &[Vec<f64>], tol: f64) -> Result<(), MeasureError> {
    let n = rows.len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n || n == 0 {
            return Err(MeasureError::Shape {
                rows: n,
                bad: i,
                len: row.len(),
            });
        }
        if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(MeasureError::BadEntry { row: i });
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(MeasureError::NotStochastic { row: i, sum });
        }
    }
    if n == 0 {
        return Err(MeasureError::Shape {
            rows: 0,
            bad: 0,
            len: 0,
        });
    }
    Ok(())
}

/// The unique stationary vector of an irreducible stochastic matrix.
pub fn stationary_vector(transition: &[Vec<f64>]) -> Result<Vec<f64>, MeasureError> {
    validate_rows(transition, PARSE_TOL)?;
    let n = transition.len();
    let reach = reachability(transition);
    for i in 0..n {
        for j in 0..n {
            if !reach[i][j] {
                return Err(MeasureError::Reducible { from: i, to: j });
            }
        }
    }
    // (Pᵀ − I) π = 0 with the last equation replaced by Σπ = 1
    let mut m = vec![vec![0.0f64; n + 1]; n];
    for (r, row) in m.iter_mut().enumerate().take(n - 1) {
        for c in 0..n {
            row[c] = transition[c][r] - if r == c { 1.0 } else { 0.0 };
        }
    }
    for c in 0..=n {
        m[n - 1][c] = 1.0;
    }
    let pi = solve_dense(m);
    Ok(pi.into_iter().map(|p| p.max(0.0)).collect())
}

/// Gaussian elimination with partial pivoting on an augmented `n × (n+1)` system.
fn solve_dense(mut m: Vec<Vec<f64>>) -> Vec<f64> {
    let n = m.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        let p = m[col][col];
        for row in col + 1..n {
            let f = m[row][col] / p;
            if f != 0.0 {
                for k in col..=n {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| m[row][k] * x[k]).sum();
        x[row] = (m[row][n] - s) / m[row][row];
    }
    x
}

fn reachability(transition: &[Vec<f64>]) -> Vec<Vec<bool>> {
    let n = transition.len();
    (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for (v, &p) in transition[u].iter().enumerate() {
                    if p > 0.0 && !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            seen
        })
        .collect()
}

fn stationary_on_support(rows: &[Vec<f64>], sft: &Sft) -> Vec<f64> {
    let a = rows.len();
    let alive: Vec<usize> = sft.states().iter().map(|s| s[0] as usize).collect();
    let sub: Vec<Vec<f64>> = alive
        .iter()
        .map(|&i| alive.iter().map(|&j| rows[i][j]).collect())
        .collect();
    let pi = stationary_vector(&sub).unwrap_or_else(|_| vec![1.0 / alive.len() as f64; alive.len()]);
    let mut out = vec![0.0; a];
    for (k, &i) in alive.iter().enumerate() {
        out[i] = pi[k];
    }
    out
}

/// `π_{w0} ∏ P_{w_i w_{i+1}}`; zero for inadmissible words, one for the empty word.
pub fn cylinder_probability(measure: &MarkovMeasure, word: &Word) -> f64 {
    cylinder_of(measure, &word.symbols)
}

pub(crate) fn cylinder_of(measure: &MarkovMeasure, symbols: &[u8]) -> f64 {
    let a = measure.alphabet_size();
    let Some((&first, rest)) = symbols.split_first() else {
        return 1.0;
    };
    if first as usize >= a {
        return 0.0;
    }
    let mut p = measure.stationary[first as usize];
    let mut prev = first as usize;
    for &c in rest {
        if c as usize >= a {
            return 0.0;
        }
        p *= measure.transition[prev][c as usize];
        prev = c as usize;
    }
    p
}

/// Natural log of the cylinder probability (`-inf` when it is zero).
pub fn log_cylinder_probability(measure: &MarkovMeasure, symbols: &[u8]) -> f64 {
    let a = measure.alphabet_size();
    let Some((&first, rest)) = symbols.split_first() else {
        return 0.0;
    };
    if first as usize >= a {
        return f64::NEG_INFINITY;
    }
    let mut lp = measure.stationary[first as usize].ln();
    let mut prev = first as usize;
    for &c in rest {
        if c as usize >= a {
            return f64::NEG_INFINITY;
        }
        lp += measure.transition[prev][c as usize].ln();
        prev = c as usize;
    }
    lp
}

/// Entropy rate `−Σ π_i Σ_j P_ij ln P_ij` in nats.
pub fn measure_entropy(measure: &MarkovMeasure) -> f64 {
    measure
        .stationary
        .iter()
        .zip(&measure.transition)
        .map(|(pi, row)| {
            pi * row
                .iter()
                .filter(|&&p| p > 0.0)
                .map(|p| -p * p.ln())
                .sum::<f64>()
        })
        .sum()
}

/// A stationary sample path of length `n`, deterministic in `seed`.
pub fn sample_path(measure: &MarkovMeasure, n: usize, seed: u64) -> Word {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(measure, n, &mut rng)
}

pub(crate) fn sample_with(measure: &MarkovMeasure, n: usize, rng: &mut impl Rng) -> Word {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return Word::new(out);
    }
    let pick = |cum: &[f64], u: f64| -> u8 {
        let k = cum.partition_point(|&c| c <= u);
        k.min(cum.len() - 1) as u8
    };
    let start_cum: Vec<f64> = measure
        .stationary
        .iter()
        .scan(0.0, |acc, &p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let mut cur = pick(&start_cum, rng.random::<f64>() * start_cum[start_cum.len() - 1]);
    out.push(cur);
    for _ in 1..n {
        let cum = &measure.cumulative[cur as usize];
        cur = pick(cum, rng.random::<f64>() * cum[cum.len() - 1]);
        out.push(cur);
    }
    Word::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shiftspace::enumerate_words;

    fn markov() -> MarkovMeasure {
        MarkovMeasure::new(vec![vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap()
    }

    fn cycle() -> MarkovMeasure {
        MarkovMeasure::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn stationary_examples() {
        let pi = stationary_vector(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert!((pi[0] - 0.5).abs() < 1e-12 && (pi[1] - 0.5).abs() < 1e-12);
        let pi = markov().stationary().to_vec();
        assert!((pi[0] - 5.0 / 6.0).abs() < 1e-12 && (pi[1] - 1.0 / 6.0).abs() < 1e-12);
        let err = stationary_vector(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap_err();
        assert!(matches!(err, MeasureError::Reducible { from: 0, to: 1 }));
    }

    #[test]
    fn stationarity_residual() {
        let m = MarkovMeasure::new(vec![
            vec![0.2, 0.3, 0.5],
            vec![0.6, 0.0, 0.4],
            vec![0.1, 0.8, 0.1],
        ])
        .unwrap();
        let pi = m.stationary();
        for j in 0..3 {
            let v: f64 = (0..3).map(|i| pi[i] * m.transition()[i][j]).sum();
            assert!((v - pi[j]).abs() < 1e-12);
        }
        assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cylinder_examples() {
        let b = MarkovMeasure::bernoulli_binary(0.5).unwrap();
        assert!((cylinder_probability(&b, &Word::from_digits("01").unwrap()) - 0.25).abs() < 1e-15);
        assert_eq!(cylinder_probability(&b, &Word::new(vec![])), 1.0);
        let p = cylinder_probability(&markov(), &Word::from_digits("01").unwrap());
        assert!((p - 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(cylinder_probability(&cycle(), &Word::from_digits("00").unwrap()), 0.0);
        let lp = log_cylinder_probability(&markov(), &[0, 1, 1, 0]);
        let p = cylinder_probability(&markov(), &Word::new(vec![0, 1, 1, 0]));
        assert!((lp - p.ln()).abs() < 1e-12);
    }

    #[test]
    fn entropy_examples() {
        let b = MarkovMeasure::bernoulli_binary(0.5).unwrap();
        assert!((measure_entropy(&b) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(measure_entropy(&cycle()), 0.0);
        let b = MarkovMeasure::bernoulli_binary(0.1).unwrap();
        let h = -(0.1f64 * 0.1f64.ln() + 0.9 * 0.9f64.ln());
        assert!((measure_entropy(&b) - h).abs() < 1e-12);
        assert!((measure_entropy(&b) - 0.3251).abs() < 1e-4);
        assert!((measure_entropy(&b) - crate::estimators::binary_entropy(0.1).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn sampling_examples() {
        let b = MarkovMeasure::bernoulli_binary(0.5).unwrap();
        assert!(sample_path(&b, 0, 1).is_empty());
        let x = sample_path(&b, 100_000, 7);
        let ones = x.symbols.iter().filter(|&&c| c == 1).count() as f64 / 1e5;
        assert!((ones - 0.5).abs() < 0.01);
        assert_eq!(x, sample_path(&b, 100_000, 7));
        let c = sample_path(&cycle(), 9, 3);
        assert!(c.symbols.windows(2).all(|w| w[0] != w[1]));
    }

    #[test]
    fn cylinders_sum_to_one() {
        let measures = [
            markov(),
            MarkovMeasure::new(vec![
                vec![0.2, 0.3, 0.5],
                vec![0.6, 0.0, 0.4],
                vec![0.1, 0.8, 0.1],
            ])
            .unwrap(),
            MarkovMeasure::bernoulli(&[0.2, 0.5, 0.3]).unwrap(),
        ];
        for m in &measures {
            let sft = m.support_sft().unwrap();
            for n in 0..=12 {
                if m.alphabet_size() == 3 && n > 9 {
                    break;
                }
                let total: f64 = enumerate_words(&sft, n, None)
                    .iter()
                    .map(|w| cylinder_probability(m, w))
                    .sum();
                assert!((total - 1.0).abs() < 1e-9, "n={n} total={total}");
            }
        }
    }

    #[test]
    fn block_frequencies_converge() {
        let m = markov();
        let x = sample_path(&m, 1_000_000, 11);
        let exact = m.block_probabilities(3);
        let mut counts: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
        for w in x.symbols.windows(3) {
            *counts.entry(w.to_vec()).or_default() += 1.0;
        }
        let total = (x.len() - 2) as f64;
        let keys: std::collections::BTreeSet<_> = exact.keys().chain(counts.keys()).collect();
        let tv: f64 = keys
            .into_iter()
            .map(|k| {
                (exact.get(k).copied().unwrap_or(0.0) - counts.get(k).copied().unwrap_or(0.0) / total).abs()
            })
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.02, "tv = {tv}");
    }

    #[test]
    fn text_format_round_trip() {
        let m = MarkovMeasure::from_text("states 2\nrow 0.9 0.1\nrow 0.5 0.5\n").unwrap();
        assert_eq!(m, markov());
        assert_eq!(MarkovMeasure::from_text(&m.to_text()).unwrap(), m);
        let err = MarkovMeasure::from_text("states 2\nrow 0.9 0.2\nrow 0.5 0.5\n").unwrap_err();
        assert!(matches!(err, MeasureError::NotStochastic { row: 0, .. }));
    }

    #[test]
    fn parry_measure_has_topological_entropy() {
        let golden = build_sft(2, &[Word::from_digits("11").unwrap()]).unwrap();
        let m = MarkovMeasure::max_entropy(&golden).unwrap();
        let h = crate::shiftspace::topological_entropy(&golden);
        assert!((measure_entropy(&m) - h).abs() < 1e-10);
        assert!(m.supported_on(&golden));
    }
}
