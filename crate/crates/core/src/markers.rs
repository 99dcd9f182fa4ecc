//! Marker words for block synchronization.
//!
//! A marker of length `8M` is self-distinguishing when its tail window
//! `[6M, 8M)` differs from every window `[i, i + 2M)` with `i < 6M`. Its head
//! and tail windows must also be rare under the target measure.

use crate::automaton::Dfa;
use crate::measures::{cylinder_of, MarkovMeasure};
use crate::shiftspace::{digits_to_symbols, specification_gap, symbols_to_digits, ShiftError, Sft, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use thiserror::Error;

/// Exhaustive search is used up to this many candidate bits.
pub const EXHAUSTIVE_BITS: f64 = 24.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarkerError {
    #[error("invalid marker parameter: {0}")]
    Param(String),
    #[error("no marker exists: every candidate repeats its tail window")]
    NoMarker,
    #[error("search budget exhausted; best candidate {best} fails: {failing}")]
    Budget { best: String, failing: String },
    #[error("window length {length} must exceed 18M = {bound}")]
    WindowTooShort { length: usize, bound: usize },
    #[error("marker not found in window")]
    NotFound,
    #[error("marker scheme text: {0}")]
    Parse(String),
    #[error(transparent)]
    Shift(#[from] ShiftError),
}

/// A marker word together with its rare head and tail windows.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkerScheme {
    pub word: Vec<u8>,
    pub m: usize,
    pub alpha: f64,
    /// Target-measure mass of the head and tail window cylinders, when known.
    pub head_mass: Option<f64>,
    pub tail_mass: Option<f64>,
}

impl MarkerScheme {
    pub fn new(word: Vec<u8>, m: usize, alpha: f64) -> Result<Self, MarkerError> {
        if m == 0 || word.len() != 8 * m {
            return Err(MarkerError::Param(format!(
                "marker length {} must equal 8M with M >= 1",
                word.len()
            )));
        }
        Ok(MarkerScheme {
            word,
            m,
            alpha,
            head_mass: None,
            tail_mass: None,
        })
    }

    /// The first `2M` symbols.
    pub fn head(&self) -> &[u8] {
        &self.word[..2 * self.m]
    }

    /// The window `[6M, 8M)`.
    pub fn tail(&self) -> &[u8] {
        &self.word[6 * self.m..]
    }

    pub fn is_self_distinguishing(&self) -> bool {
        self_distinguishing(&self.word, self.m)
    }

    /// Records the head and tail masses under `nu`.
    pub fn with_masses(mut self, nu: &MarkovMeasure) -> Self {
        self.head_mass = Some(cylinder_of(nu, self.head()));
        self.tail_mass = Some(cylinder_of(nu, self.tail()));
        self
    }

    /// Whether both recorded masses are below `alpha / M`.
    pub fn masses_ok(&self) -> bool {
        let cap = self.alpha / self.m as f64;
        matches!((self.head_mass, self.tail_mass), (Some(h), Some(t)) if h < cap && t < cap)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn from_text(text: &str) -> Result<Self, MarkerError> {
        let mut m = None;
        let mut alpha = None;
        let mut word = None;
        for field in text.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| MarkerError::Parse(format!("expected key=value, got {field}")))?;
            let bad = |_| MarkerError::Parse(format!("bad value for {key}: {value}"));
            match key {
                "M" => m = Some(value.parse::<usize>().map_err(|e| bad(e.to_string()))?),
                "alpha" => alpha = Some(value.parse::<f64>().map_err(|e| bad(e.to_string()))?),
                "word" => word = Some(digits_to_symbols(value)?),
                _ => return Err(MarkerError::Parse(format!("unknown key {key}"))),
            }
        }
        let missing = |k: &str| MarkerError::Parse(format!("missing {k}"));
        Self::new(
            word.ok_or_else(|| missing("word"))?,
            m.ok_or_else(|| missing("M"))?,
            alpha.ok_or_else(|| missing("alpha"))?,
        )
    }
}

impl fmt::Display for MarkerScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "M={} alpha={} word={}",
            self.m,
            self.alpha,
            symbols_to_digits(&self.word)
        )
    }
}

fn self_distinguishing(word: &[u8], m: usize) -> bool {
    let tail = &word[6 * m..8 * m];
    (0..6 * m).all(|i| &word[i..i + 2 * m] != tail)
}

fn violated_offsets(word: &[u8], m: usize) -> usize {
    let tail = &word[6 * m..8 * m];
    (0..6 * m).filter(|&i| &word[i..i + 2 * m] == tail).count()
}

/// No proper prefix equals a suffix, so two occurrences never overlap.
pub fn is_unbordered(word: &[u8]) -> bool {
    (1..word.len()).all(|k| word[..k] != word[word.len() - k..])
}

fn mass_excess(word: &[u8], m: usize, nu: &MarkovMeasure, cap: f64) -> (f64, f64, usize) {
    let head = cylinder_of(nu, &word[..2 * m]);
    let tail = cylinder_of(nu, &word[6 * m..]);
    (head, tail, (head >= cap) as usize + (tail >= cap) as usize)
}

fn check_inputs(sft: &Sft, nu: &MarkovMeasure, m: usize, alpha: f64) -> Result<(), MarkerError> {
    if m == 0 {
        return Err(MarkerError::Param("M must be at least 1".into()));
    }
    if !(alpha > 0.0) {
        return Err(MarkerError::Param(format!("alpha must be positive, got {alpha}")));
    }
    if nu.alphabet_size() != sft.alphabet_size() {
        return Err(MarkerError::Param(format!(
            "measure alphabet {} differs from shift alphabet {}",
            nu.alphabet_size(),
            sft.alphabet_size()
        )));
    }
    Ok(())
}

fn for_each_word(dfa: &Dfa, n: usize, visit: &mut dyn FnMut(&[u8])) {
    fn walk(dfa: &Dfa, q: u32, n: usize, stack: &mut Vec<u8>, visit: &mut dyn FnMut(&[u8])) {
        if stack.len() == n {
            visit(stack);
            return;
        }
        for c in 0..dfa.alphabet() as u8 {
            if let Some(t) = dfa.step(q, c) {
                stack.push(c);
                walk(dfa, t, n, stack, visit);
                stack.pop();
            }
        }
    }
    walk(dfa, dfa.start(), n, &mut Vec::with_capacity(n), visit);
}

/// Every admissible word of length `8M` meeting the self-distinguishing and
/// mass conditions, in lexicographic order.
pub fn feasible_markers(
    sft: &Sft,
    nu: &MarkovMeasure,
    m: usize,
    alpha: f64,
) -> Result<Vec<Word>, MarkerError> {
    check_inputs(sft, nu, m, alpha)?;
    let cap = alpha / m as f64;
    let mut out = Vec::new();
    for_each_word(sft.dfa(), 8 * m, &mut |w| {
        if self_distinguishing(w, m) && mass_excess(w, m, nu, cap).2 == 0 {
            out.push(Word::new(w.to_vec()));
        }
    });
    Ok(out)
}

/// Finds a marker scheme, exhaustively when `8M·log2(alphabet) ≤ 24`, else by
/// seeded random restarts with single-symbol hill climbing.
///
/// Exhaustive search returns the unbordered candidate of least combined
/// head and tail mass (lexicographically first on ties), falling back to
/// bordered candidates.
pub fn find_marker(
    sft: &Sft,
    nu: &MarkovMeasure,
    m: usize,
    alpha: f64,
    budget: usize,
    seed: u64,
) -> Result<MarkerScheme, MarkerError> {
    check_inputs(sft, nu, m, alpha)?;
    let bits = 8.0 * m as f64 * (sft.alphabet_size() as f64).log2();
    let found = if bits <= EXHAUSTIVE_BITS {
        exhaustive(sft, nu, m, alpha)?
    } else {
        specification_gap(sft)?;
        random_search(sft, nu, m, alpha, budget, seed)?
    };
    Ok(MarkerScheme::new(found, m, alpha)?.with_masses(nu))
}

fn exhaustive(sft: &Sft, nu: &MarkovMeasure, m: usize, alpha: f64) -> Result<Vec<u8>, MarkerError> {
    let cap = alpha / m as f64;
    let mut any_distinguishing = false;
    // (bordered, mass, word); tuple order picks the preferred candidate
    let mut best: Option<(bool, f64, Vec<u8>)> = None;
    let mut best_failing: Option<(usize, Vec<u8>, f64, f64)> = None;
    for_each_word(sft.dfa(), 8 * m, &mut |w| {
        if !self_distinguishing(w, m) {
            return;
        }
        any_distinguishing = true;
        let (head, tail, excess) = mass_excess(w, m, nu, cap);
        if excess > 0 {
            if best_failing.as_ref().is_none_or(|b| excess < b.0) {
                best_failing = Some((excess, w.to_vec(), head, tail));
            }
            return;
        }
        let key = (!is_unbordered(w), head + tail);
        let better = match &best {
            None => true,
            Some((b, mass, _)) => key < (*b, *mass),
        };
        if better {
            best = Some((key.0, key.1, w.to_vec()));
        }
    });
    if !any_distinguishing {
        return Err(MarkerError::NoMarker);
    }
    match best {
        Some((_, _, w)) => Ok(w),
        None => {
            let (_, w, head, tail) = best_failing.expect("a distinguishing candidate was seen");
            Err(MarkerError::Budget {
                best: symbols_to_digits(&w),
                failing: format!("head mass {head} and tail mass {tail} must be < alpha/M = {cap}"),
            })
        }
    }
}

fn random_walk(dfa: &Dfa, n: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let mut q = dfa.start();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let options: Vec<(u8, u32)> = (0..dfa.alphabet() as u8)
            .filter_map(|c| dfa.step(q, c).map(|t| (c, t)))
            .collect();
        let (c, t) = options[rng.random_range(0..options.len())];
        out.push(c);
        q = t;
    }
    out
}

fn random_search(
    sft: &Sft,
    nu: &MarkovMeasure,
    m: usize,
    alpha: f64,
    budget: usize,
    seed: u64,
) -> Result<Vec<u8>, MarkerError> {
    let cap = alpha / m as f64;
    let n = 8 * m;
    let score = |w: &[u8]| violated_offsets(w, m) + mass_excess(w, m, nu, cap).2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fallback: Option<Vec<u8>> = None;
    let mut best: Option<(usize, Vec<u8>)> = None;
    let mut spent = 0;
    while spent < budget {
        let mut w = random_walk(sft.dfa(), n, &mut rng);
        let mut s = score(&w);
        spent += 1;
        for _ in 0..4 * n {
            if s == 0 || spent >= budget {
                break;
            }
            let pos = rng.random_range(0..n);
            let old = w[pos];
            w[pos] = rng.random_range(0..sft.alphabet_size() as u8);
            spent += 1;
            let t = if sft.is_admissible(&w) { score(&w) } else { usize::MAX };
            if t <= s {
                s = t;
            } else {
                w[pos] = old;
            }
        }
        if s == 0 {
            if is_unbordered(&w) {
                return Ok(w);
            }
            fallback.get_or_insert(w);
        } else if best.as_ref().is_none_or(|b| s < b.0) {
            best = Some((s, w));
        }
    }
    if let Some(w) = fallback {
        return Ok(w);
    }
    let (_, w) = best.unwrap_or((0, vec![]));
    let failing = if w.is_empty() {
        "no candidate evaluated".to_string()
    } else if !self_distinguishing(&w, m) {
        format!("{} offsets repeat the tail window", violated_offsets(&w, m))
    } else {
        format!("head or tail mass is not below alpha/M = {cap}")
    };
    Err(MarkerError::Budget {
        best: symbols_to_digits(&w),
        failing,
    })
}

/// Offset `j` of the window start inside its block: `(L − 9M) − i` for the
/// least `i ∈ [0, L − 9M]` at which the marker occurs in `w`.
pub fn locate_offset(w: &Word, scheme: &MarkerScheme, length: usize) -> Result<usize, MarkerError> {
    let m = scheme.m;
    if length <= 18 * m {
        return Err(MarkerError::WindowTooShort {
            length,
            bound: 18 * m,
        });
    }
    let span = w.window(0, length as i64)?;
    let last = length - 9 * m;
    (0..=last)
        .find(|&i| span[i..i + 8 * m] == scheme.word[..])
        .map(|i| last - i)
        .ok_or(MarkerError::NotFound)
}

/// Whether no length-`2M` window of `word` starting in `[0, n)` equals the
/// head or tail window.
pub fn avoids_windows(word: &[u8], scheme: &MarkerScheme, n: usize) -> bool {
    let width = 2 * scheme.m;
    let (head, tail) = (scheme.head(), scheme.tail());
    (0..n.min((word.len() + 1).saturating_sub(width)))
        .map(|i| &word[i..i + width])
        .all(|x| x != head && x != tail)
}

/// Passes the words whose windows at offsets `[0, n)` avoid the head and
/// tail windows. Words shorter than `n + 2M` are dropped.
pub fn avoidance_filter<'a, I>(
    words: I,
    scheme: &'a MarkerScheme,
    n: usize,
) -> impl Iterator<Item = Word> + 'a
where
    I: IntoIterator<Item = Word>,
    I::IntoIter: 'a,
{
    words
        .into_iter()
        .filter(move |w| w.len() >= n + 2 * scheme.m && avoids_windows(&w.symbols, scheme, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shiftspace::{build_sft, full_shift};

    fn fair() -> MarkovMeasure {
        MarkovMeasure::bernoulli_binary(0.5).unwrap()
    }

    #[test]
    fn finds_a_marker_on_the_full_shift() {
        let nu = MarkovMeasure::bernoulli_binary(0.1).unwrap();
        let sft = full_shift(2);
        let scheme = find_marker(&sft, &nu, 1, 0.5, 1000, 0).unwrap();
        assert_eq!(scheme.word.len(), 8);
        assert!(scheme.is_self_distinguishing());
        assert!(scheme.masses_ok());
        assert!(is_unbordered(&scheme.word));
        let oracle = feasible_markers(&sft, &nu, 1, 0.5).unwrap();
        assert!(oracle.iter().any(|w| w.symbols == scheme.word));
        let with_11 = oracle.iter().find(|w| w.symbols[..2] == [1, 1]).unwrap();
        assert!(cylinder_of(&nu, &with_11.symbols[..2]) < 0.011);
    }

    #[test]
    fn single_cycle_has_no_marker() {
        let cycle = build_sft(2, &[Word::from_digits("00").unwrap(), Word::from_digits("11").unwrap()])
            .unwrap();
        assert_eq!(find_marker(&cycle, &fair(), 1, 0.5, 100, 0), Err(MarkerError::NoMarker));
        let one = full_shift(1);
        let nu = MarkovMeasure::uniform(1);
        assert_eq!(find_marker(&one, &nu, 1, 0.5, 100, 0), Err(MarkerError::NoMarker));
    }

    #[test]
    fn rejects_bad_parameters() {
        let sft = full_shift(2);
        assert!(matches!(find_marker(&sft, &fair(), 1, 0.0, 10, 0), Err(MarkerError::Param(_))));
        assert!(matches!(find_marker(&sft, &fair(), 0, 0.5, 10, 0), Err(MarkerError::Param(_))));
    }

    #[test]
    fn tiny_alpha_exhausts_with_a_diagnostic() {
        let err = find_marker(&full_shift(2), &fair(), 1, 0.1, 10, 0).unwrap_err();
        assert!(matches!(err, MarkerError::Budget { .. }));
    }

    #[test]
    fn random_search_on_larger_markers() {
        let sft = full_shift(3);
        let nu = MarkovMeasure::uniform(3);
        let scheme = find_marker(&sft, &nu, 2, 0.5, 100_000, 9).unwrap();
        assert_eq!(scheme.word.len(), 16);
        assert!(scheme.is_self_distinguishing() && scheme.masses_ok());
        assert_eq!(find_marker(&sft, &nu, 2, 0.5, 100_000, 9).unwrap(), scheme);
    }

    #[test]
    fn feasible_set_grows_with_alpha() {
        let sft = full_shift(2);
        let nu = MarkovMeasure::bernoulli_binary(0.3).unwrap();
        let set = |a: f64| feasible_markers(&sft, &nu, 1, a).unwrap();
        let grid: Vec<Vec<Word>> = (1..=20).map(|i| set(i as f64 * 0.05)).collect();
        for pair in grid.windows(2) {
            assert!(pair[0].iter().all(|w| pair[1].contains(w)));
        }
        // window masses are 0.09, 0.21 and 0.49; head = tail = "11" repeats the
        // tail window, so markers first appear once 0.21 is crossed
        assert!(set(0.1).is_empty());
        let crossing: Vec<usize> = [0.05, 0.3, 0.5].iter().map(|&a| set(a).len()).collect();
        assert_eq!(crossing[0], 0);
        assert!(crossing.windows(2).all(|p| p[1] > p[0]));
    }

    #[test]
    fn offsets_are_recovered() {
        let scheme = MarkerScheme::new(vec![1, 1, 1, 0, 1, 0, 0, 0], 1, 0.5).unwrap();
        let length = 20;
        let place = |at: usize| {
            let mut w = vec![0u8; length];
            w[at..at + 8].copy_from_slice(&scheme.word);
            Word::new(w)
        };
        assert_eq!(locate_offset(&place(length - 9), &scheme, length), Ok(0));
        assert_eq!(locate_offset(&place(length - 14), &scheme, length), Ok(5));
        assert_eq!(
            locate_offset(&Word::new(vec![0; length]), &scheme, length),
            Err(MarkerError::NotFound)
        );
        assert!(matches!(
            locate_offset(&place(0), &scheme, 18),
            Err(MarkerError::WindowTooShort { .. })
        ));
    }

    #[test]
    fn filter_semantics() {
        let scheme = MarkerScheme::new(vec![1, 1, 0, 0, 0, 1, 0, 1], 1, 0.5).unwrap();
        assert_eq!(scheme.head(), &[1, 1]);
        let n = 6;
        let clean = Word::new(vec![0; n + 2]);
        let hit = Word::new(vec![0, 0, 0, 1, 1, 0, 0, 0]);
        let late = Word::new(vec![0, 0, 0, 0, 0, 0, 0, 1, 1]);
        let passed: Vec<Word> =
            avoidance_filter(vec![clean.clone(), hit, late.clone()], &scheme, n).collect();
        assert_eq!(passed, vec![clean, late]);
    }

    #[test]
    fn scheme_text_round_trip() {
        let scheme = MarkerScheme::new(vec![1, 1, 1, 0, 1, 0, 0, 0], 1, 0.25).unwrap();
        let text = scheme.to_text();
        assert_eq!(text, "M=1 alpha=0.25 word=11101000");
        assert_eq!(MarkerScheme::from_text(&text).unwrap(), scheme);
        assert!(MarkerScheme::from_text("M=2 alpha=0.25 word=11101000").is_err());
        assert!(MarkerScheme::from_text("M=1 word=11101000").is_err());
    }
}
