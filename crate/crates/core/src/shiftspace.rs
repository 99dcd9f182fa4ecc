//! Words, subshifts of finite type, entropy and the specification gap.
//!
//! An [`Sft`] is stored in recoded form: a vertex shift on its admissible
//! `s`-words, `s = max(memory, 1)`, pruned to the essential part so that every
//! state has a predecessor and a successor. Finite words are read by a
//! companion DFA whose first states track short prefixes.

use crate::automaton::{Dfa, DEAD};
use num_bigint::BigUint;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

/// Largest number of candidate `(s+1)`-words examined while recoding.
const MAX_RECODE_WORDS: u128 = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShiftError {
    #[error("alphabet size must be between 1 and 255")]
    BadAlphabet,
    #[error("forbidden word {word:?} is empty or leaves the alphabet of size {alphabet}")]
    BadForbidden { word: String, alphabet: usize },
    #[error("empty SFT: no admissible word survives pruning")]
    EmptySft,
    #[error("SFT is not mixing: no power of the adjacency matrix is positive")]
    NotMixing,
    #[error("recoded state space too large ({0} candidate words)")]
    TooLarge(u128),
    #[error("word covers [{have_lo}, {have_hi}) but [{need_lo}, {need_hi}) is required")]
    Coverage {
        have_lo: i64,
        have_hi: i64,
        need_lo: i64,
        need_hi: i64,
    },
    #[error("window [{lo}, {hi}) is empty")]
    EmptyWindow { lo: i64, hi: i64 },
    #[error("invalid symbol character {0:?}")]
    BadDigit(char),
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

/// A finite block of symbols anchored at coordinate `base`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub symbols: Vec<u8>,
    pub base: i64,
}

impl Word {
    pub fn new(symbols: Vec<u8>) -> Self {
        Word { symbols, base: 0 }
    }

    pub fn with_base(symbols: Vec<u8>, base: i64) -> Self {
        Word { symbols, base }
    }

    /// Parses a digit string (`"0110"`) anchored at 0.
    pub fn from_digits(text: &str) -> Result<Self, ShiftError> {
        digits_to_symbols(text).map(Word::new)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// One past the last covered coordinate.
    pub fn end(&self) -> i64 {
        self.base + self.symbols.len() as i64
    }

    pub fn at(&self, coord: i64) -> Option<u8> {
        let i = coord.checked_sub(self.base)?;
        usize::try_from(i).ok().and_then(|i| self.symbols.get(i).copied())
    }

    pub fn covers(&self, lo: i64, hi: i64) -> bool {
        lo >= self.base && hi <= self.end()
    }

    /// Symbols on coordinates `[lo, hi)`, or a coverage error.
    pub fn window(&self, lo: i64, hi: i64) -> Result<&[u8], ShiftError> {
        if !self.covers(lo, hi) || hi < lo {
            return Err(ShiftError::Coverage {
                have_lo: self.base,
                have_hi: self.end(),
                need_lo: lo,
                need_hi: hi,
            });
        }
        let a = (lo - self.base) as usize;
        let b = (hi - self.base) as usize;
        Ok(&self.symbols[a..b])
    }

    pub fn to_digits(&self) -> String {
        symbols_to_digits(&self.symbols)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_digits())
    }
}

pub(crate) fn digits_to_symbols(text: &str) -> Result<Vec<u8>, ShiftError> {
    text.chars()
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as u8)
                .ok_or(ShiftError::BadDigit(c))
        })
        .collect()
}

pub(crate) fn symbols_to_digits(symbols: &[u8]) -> String {
    symbols
        .iter()
        .map(|&s| char::from_digit(s as u32, 36).unwrap_or('?'))
        .collect()
}

/// Half-open coordinate window `[lo, hi)` widened by `radius` on both sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowMetricParams {
    pub lo: i64,
    pub hi: i64,
    pub radius: u32,
}

impl WindowMetricParams {
    pub fn new(lo: i64, hi: i64, radius: u32) -> Self {
        WindowMetricParams { lo, hi, radius }
    }

    /// Coordinates that must agree: `[lo − radius, hi + radius)`.
    pub fn span(&self) -> (i64, i64) {
        (self.lo - self.radius as i64, self.hi + self.radius as i64)
    }
}

/// A subshift of finite type recoded as a pruned vertex shift.
#[derive(Clone, Debug)]
pub struct Sft {
    alphabet_size: usize,
    memory: usize,
    forbidden: Vec<Vec<u8>>,
    states: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    succ: Vec<Vec<(u8, usize)>>,
    dfa: Dfa,
}

impl PartialEq for Sft {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet_size == other.alphabet_size
            && self.states == other.states
            && self.succ == other.succ
    }
}

/// Builds the SFT avoiding `forbidden`, pruned to its essential part.
pub fn build_sft(alphabet_size: usize, forbidden: &[Word]) -> Result<Sft, ShiftError> {
    if alphabet_size == 0 || alphabet_size > 255 {
        return Err(ShiftError::BadAlphabet);
    }
    let mut words: BTreeSet<Vec<u8>> = BTreeSet::new();
    for w in forbidden {
        if w.is_empty() || w.symbols.iter().any(|&c| c as usize >= alphabet_size) {
            return Err(ShiftError::BadForbidden {
                word: w.to_digits(),
                alphabet: alphabet_size,
            });
        }
        words.insert(w.symbols.clone());
    }
    let forbidden: Vec<Vec<u8>> = words.into_iter().collect();
    let memory = forbidden.iter().map(|w| w.len()).max().unwrap_or(1) - 1;
    let s = memory.max(1);
    let candidates = (alphabet_size as u128).saturating_pow(s as u32 + 1);
    if candidates > MAX_RECODE_WORDS {
        return Err(ShiftError::TooLarge(candidates));
    }

    let has_forbidden = |w: &[u8]| {
        forbidden
            .iter()
            .any(|f| f.len() <= w.len() && w.windows(f.len()).any(|x| x == &f[..]))
    };

    let mut states: Vec<Vec<u8>> = all_words(alphabet_size, s)
        .into_iter()
        .filter(|w| !has_forbidden(w))
        .collect();
    let mut alive = vec![true; states.len()];
    let lookup: HashMap<Vec<u8>, usize> = states
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i))
        .collect();
    let mut edges: Vec<Vec<(u8, usize)>> = states
        .iter()
        .map(|u| {
            (0..alphabet_size as u8)
                .filter_map(|c| {
                    let mut ext = u.clone();
                    ext.push(c);
                    if has_forbidden(&ext) {
                        return None;
                    }
                    lookup.get(&ext[1..]).map(|&v| (c, v))
                })
                .collect()
        })
        .collect();

    loop {
        let mut indeg = vec![0usize; states.len()];
        for (u, out) in edges.iter().enumerate() {
            if alive[u] {
                for &(_, v) in out {
                    if alive[v] {
                        indeg[v] += 1;
                    }
                }
            }
        }
        let mut changed = false;
        for u in 0..states.len() {
            if !alive[u] {
                continue;
            }
            let outdeg = edges[u].iter().filter(|&&(_, v)| alive[v]).count();
            if outdeg == 0 || indeg[u] == 0 {
                alive[u] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut renumber = vec![usize::MAX; states.len()];
    let mut kept = Vec::new();
    for (i, w) in states.iter().enumerate() {
        if alive[i] {
            renumber[i] = kept.len();
            kept.push(w.clone());
        }
    }
    if kept.is_empty() {
        return Err(ShiftError::EmptySft);
    }
    let succ: Vec<Vec<(u8, usize)>> = (0..states.len())
        .filter(|&i| alive[i])
        .map(|i| {
            std::mem::take(&mut edges[i])
                .into_iter()
                .filter(|&(_, v)| alive[v])
                .map(|(c, v)| (c, renumber[v]))
                .collect()
        })
        .collect();
    states = kept;
    let index = states
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i))
        .collect();
    let dfa = language_dfa(alphabet_size, s, &states, &succ);
    Ok(Sft {
        alphabet_size,
        memory,
        forbidden,
        states,
        index,
        succ,
        dfa,
    })
}

/// The full shift on `alphabet_size` symbols.
pub fn full_shift(alphabet_size: usize) -> Sft {
    build_sft(alphabet_size, &[]).expect("full shift is never empty")
}

fn all_words(alphabet: usize, len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..alphabet as u8).map(move |c| {
                    let mut v = w.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out
}

/// DFA reading finite admissible words: states are the proper prefixes of
/// recoded states (lengths `0..s`) followed by the recoded states themselves.
fn language_dfa(
    alphabet: usize,
    s: usize,
    states: &[Vec<u8>],
    succ: &[Vec<(u8, usize)>],
) -> Dfa {
    let mut prefixes: BTreeSet<Vec<u8>> = BTreeSet::new();
    for w in states {
        for l in 0..s {
            prefixes.insert(w[..l].to_vec());
        }
    }
    let prefixes: Vec<Vec<u8>> = prefixes.into_iter().collect();
    let pidx: HashMap<&[u8], u32> = prefixes
        .iter()
        .enumerate()
        .map(|(i, p)| (p.as_slice(), i as u32))
        .collect();
    let offset = prefixes.len() as u32;
    let sidx: HashMap<&[u8], u32> = states
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_slice(), offset + i as u32))
        .collect();
    let total = prefixes.len() + states.len();
    let mut trans = vec![DEAD; total * alphabet];
    for (i, p) in prefixes.iter().enumerate() {
        for c in 0..alphabet as u8 {
            let mut ext = p.clone();
            ext.push(c);
            let target = if ext.len() < s {
                pidx.get(ext.as_slice()).copied()
            } else {
                sidx.get(ext.as_slice()).copied()
            };
            if let Some(t) = target {
                trans[i * alphabet + c as usize] = t;
            }
        }
    }
    for (u, out) in succ.iter().enumerate() {
        for &(c, v) in out {
            trans[(offset as usize + u) * alphabet + c as usize] = offset + v as u32;
        }
    }
    let start = pidx[&[][..]];
    Dfa::from_table(alphabet, start, trans)
}

impl Sft {
    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// Longest forbidden word length minus one (0 for the full shift).
    pub fn memory(&self) -> usize {
        self.memory
    }

    /// Canonical (sorted, deduplicated) forbidden list.
    pub fn forbidden(&self) -> &[Vec<u8>] {
        &self.forbidden
    }

    /// Length of the recoded states, `max(memory, 1)`.
    pub fn state_len(&self) -> usize {
        self.memory.max(1)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Vec<u8>] {
        &self.states
    }

    pub fn state_index(&self, word: &[u8]) -> Option<usize> {
        self.index.get(word).copied()
    }

    /// Outgoing transitions `(appended symbol, next state)` of a recoded state.
    pub fn successors(&self, state: usize) -> &[(u8, usize)] {
        &self.succ[state]
    }

    /// 0/1 adjacency matrix of the recoded vertex shift.
    pub fn adjacency(&self) -> Vec<Vec<u8>> {
        let n = self.states.len();
        let mut a = vec![vec![0u8; n]; n];
        for (u, out) in self.succ.iter().enumerate() {
            for &(_, v) in out {
                a[u][v] = 1;
            }
        }
        a
    }

    pub(crate) fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    /// Whether the symbols occur in some point of the subshift.
    pub fn is_admissible(&self, symbols: &[u8]) -> bool {
        self.dfa.accepts(symbols)
    }

    /// Serializes to the `alphabet` / `forbid` text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("alphabet {}\n", self.alphabet_size);
        for w in &self.forbidden {
            out.push_str("forbid ");
            out.push_str(&symbols_to_digits(w));
            out.push('\n');
        }
        out
    }

    /// Parses the `alphabet` / `forbid` text format (`#` starts a comment).
    pub fn from_text(text: &str) -> Result<Sft, ShiftError> {
        let mut alphabet = None;
        let mut forbidden = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let column = line.len() - line.trim_start().len() + 1;
            let err = |message: String| ShiftError::Parse {
                line: ln + 1,
                column,
                message,
            };
            let mut parts = trimmed.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let value = parts.next().ok_or_else(|| err(format!("`{key}` needs a value")))?;
            if parts.next().is_some() {
                return Err(err("trailing tokens".into()));
            }
            match key {
                "alphabet" if alphabet.is_none() => {
                    let size = value
                        .parse::<usize>()
                        .map_err(|_| err(format!("bad alphabet size `{value}`")))?;
                    alphabet = Some(size);
                }
                "alphabet" => return Err(err("duplicate alphabet line".into())),
                "forbid" if alphabet.is_some() => {
                    let w = Word::from_digits(value).map_err(|e| err(e.to_string()))?;
                    forbidden.push(w);
                }
                "forbid" => return Err(err("`forbid` before `alphabet`".into())),
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
        }
        let alphabet = alphabet.ok_or(ShiftError::Parse {
            line: 1,
            column: 1,
            message: "missing `alphabet` line".into(),
        })?;
        build_sft(alphabet, &forbidden)
    }
}

/// Natural-log entropy from the Perron root of the recoded adjacency matrix.
///
/// Takes the largest Perron root over the strongly connected components of the
/// recoded graph.
pub fn topological_entropy(sft: &Sft) -> f64 {
    perron_root(&sft.adjacency()).ln()
}

pub(crate) fn perron_root(adj: &[Vec<u8>]) -> f64 {
    strong_components(adj)
        .iter()
        .map(|comp| component_root(adj, comp))
        .fold(0.0, f64::max)
}

/// Strongly connected components via boolean transitive closure.
fn strong_components(adj: &[Vec<u8>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut reach: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| i == j || adj[i][j] == 1).collect())
        .collect();
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let comp: Vec<usize> = (i..n).filter(|&j| reach[i][j] && reach[j][i]).collect();
        comp.iter().for_each(|&j| seen[j] = true);
        comps.push(comp);
    }
    comps
}

/// Perron root of an irreducible block; Collatz–Wielandt bounds on `A + I`
/// squeeze the root since `A + I` is primitive.
fn component_root(adj: &[Vec<u8>], comp: &[usize]) -> f64 {
    if comp.len() == 1 {
        return adj[comp[0]][comp[0]] as f64;
    }
    let m = comp.len();
    let mut x = vec![1.0f64; m];
    let mut estimate = 1.0;
    for _ in 0..100_000 {
        let y: Vec<f64> = (0..m)
            .map(|i| {
                x[i] + (0..m)
                    .filter(|&j| adj[comp[i]][comp[j]] == 1)
                    .map(|j| x[j])
                    .sum::<f64>()
            })
            .collect();
        let (lo, hi) = y
            .iter()
            .zip(&x)
            .map(|(a, b)| a / b)
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
        estimate = 0.5 * (lo + hi);
        let norm = y.iter().cloned().fold(0.0, f64::max);
        x = y.into_iter().map(|v| v / norm).collect();
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    estimate - 1.0
}

/// Primitivity index of the recoded adjacency matrix.
pub fn specification_gap(sft: &Sft) -> Result<usize, ShiftError> {
    let a = sft.adjacency();
    let n = a.len();
    let bound = (n - 1) * (n - 1) + 1;
    let mut power = a.clone();
    for p in 1..=bound {
        if power.iter().all(|row| row.iter().all(|&v| v == 1)) {
            return Ok(p);
        }
        power = bool_product(&power, &a);
    }
    Err(ShiftError::NotMixing)
}

fn bool_product(x: &[Vec<u8>], y: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let n = x.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).any(|k| x[i][k] == 1 && y[k][j] == 1) as u8)
                .collect()
        })
        .collect()
}

/// Whether `u` and `v` agree on `[lo − radius, hi + radius)`, the symbolic
/// form of the Bowen distance `d_lo^hi(u, v) < 2^{-radius}`.
pub fn window_distance_below(
    u: &Word,
    v: &Word,
    params: WindowMetricParams,
) -> Result<bool, ShiftError> {
    if params.hi <= params.lo {
        return Err(ShiftError::EmptyWindow {
            lo: params.lo,
            hi: params.hi,
        });
    }
    let (a, b) = params.span();
    Ok(u.window(a, b)? == v.window(a, b)?)
}

/// Predicate on candidate words.
pub type WordFilter<'a> = &'a dyn Fn(&[u8]) -> bool;

/// Admissible words of length `n` in lexicographic order, optionally filtered.
pub fn enumerate_words(
    sft: &Sft,
    n: usize,
    constraint: Option<WordFilter<'_>>,
) -> Vec<Word> {
    let dfa = sft.dfa();
    let mut out = Vec::new();
    let mut stack: Vec<u8> = Vec::with_capacity(n);
    fn walk(
        dfa: &Dfa,
        q: u32,
        n: usize,
        stack: &mut Vec<u8>,
        out: &mut Vec<Word>,
        constraint: Option<WordFilter<'_>>,
    ) {
        if stack.len() == n {
            if constraint.is_none_or(|f| f(stack)) {
                out.push(Word::new(stack.clone()));
            }
            return;
        }
        for c in 0..dfa.alphabet() as u8 {
            if let Some(t) = dfa.step(q, c) {
                stack.push(c);
                walk(dfa, t, n, stack, out, constraint);
                stack.pop();
            }
        }
    }
    walk(dfa, dfa.start(), n, &mut stack, &mut out, constraint);
    out
}

/// Exact number of admissible words of length `n` (transfer-matrix count).
pub fn count_words(sft: &Sft, n: usize) -> BigUint {
    sft.dfa().count(n)
}
