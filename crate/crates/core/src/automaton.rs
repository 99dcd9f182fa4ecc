//! Deterministic automata over small alphabets.
//!
//! Every language handled here is factor-closed or built from one by
//! intersecting with pattern-avoidance constraints, so all states accept and a
//! missing transition means rejection. The automata drive exact counting,
//! lexicographic rank/unrank and least-completion searches.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::collections::{HashMap, VecDeque};

/// Marker for an undefined transition.
pub const DEAD: u32 = u32::MAX;

/// A complete-table DFA in which every live state accepts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    alphabet: usize,
    start: u32,
    trans: Vec<u32>,
}

impl Dfa {
    /// Builds a DFA from a row-major transition table (`DEAD` for rejection).
    pub fn from_table(alphabet: usize, start: u32, trans: Vec<u32>) -> Self {
        debug_assert_eq!(trans.len() % alphabet.max(1), 0);
        Dfa {
            alphabet,
            start,
            trans,
        }
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    pub fn num_states(&self) -> usize {
        self.trans.len() / self.alphabet.max(1)
    }

    #[inline]
    pub fn step(&self, state: u32, symbol: u8) -> Option<u32> {
        if symbol as usize >= self.alphabet {
            return None;
        }
        let next = self.trans[state as usize * self.alphabet + symbol as usize];
        (next != DEAD).then_some(next)
    }

    /// Runs the automaton from the start state; `None` if the word is rejected.
    pub fn run(&self, word: &[u8]) -> Option<u32> {
        word.iter().try_fold(self.start, |q, &c| self.step(q, c))
    }

    pub fn accepts(&self, word: &[u8]) -> bool {
        self.run(word).is_some()
    }

    /// Product with an Aho–Corasick matcher that rejects as soon as any of
    /// `patterns` is completed. Only states reachable from the start survive.
    pub fn avoiding(&self, patterns: &[Vec<u8>]) -> Dfa {
        let ac = AhoCorasick::new(self.alphabet, patterns);
        let (dfa, _) = self.product(&ac.trans, &ac.terminal, |terminal| !terminal);
        dfa
    }

    /// Product with a single-pattern tracker. Completing the pattern is kept as
    /// a live state; the returned flags mark those match states so callers can
    /// allow or forbid occurrences position by position.
    pub fn tracking(&self, pattern: &[u8]) -> (Dfa, Vec<bool>) {
        let ac = AhoCorasick::new(self.alphabet, &[pattern.to_vec()]);
        self.product(&ac.trans, &ac.terminal, |_| true)
    }

    fn product(
        &self,
        other: &[u32],
        terminal: &[bool],
        keep: impl Fn(bool) -> bool,
    ) -> (Dfa, Vec<bool>) {
        let a = self.alphabet;
        let mut index: HashMap<(u32, u32), u32> = HashMap::new();
        let mut pairs = vec![(self.start, 0u32)];
        index.insert((self.start, 0), 0);
        let mut queue = VecDeque::from([0u32]);
        let mut trans: Vec<u32> = Vec::new();
        while let Some(id) = queue.pop_front() {
            let (p, q) = pairs[id as usize];
            let row_start = id as usize * a;
            if trans.len() < row_start + a {
                trans.resize(row_start + a, DEAD);
            }
            for c in 0..a {
                let Some(p2) = self.step(p, c as u8) else {
                    continue;
                };
                let q2 = other[q as usize * a + c];
                if !keep(terminal[q2 as usize]) {
                    continue;
                }
                let next = *index.entry((p2, q2)).or_insert_with(|| {
                    pairs.push((p2, q2));
                    queue.push_back(pairs.len() as u32 - 1);
                    pairs.len() as u32 - 1
                });
                trans[row_start + c] = next;
            }
        }
        trans.resize(pairs.len() * a, DEAD);
        let flags = pairs.iter().map(|&(_, q)| terminal[q as usize]).collect();
        (Dfa::from_table(a, 0, trans), flags)
    }

    /// Number of accepted words of length `n`, computed with a rolling vector.
    pub fn count(&self, n: usize) -> BigUint {
        let states = self.num_states();
        let mut cur = vec![BigUint::one(); states];
        let mut next = vec![BigUint::zero(); states];
        for _ in 0..n {
            for (q, slot) in next.iter_mut().enumerate() {
                slot.set_zero();
                for c in 0..self.alphabet {
                    let t = self.trans[q * self.alphabet + c];
                    if t != DEAD {
                        *slot += &cur[t as usize];
                    }
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        cur.swap_remove(self.start as usize)
    }

    /// Full table of completion counts for words of length `n`.
    pub fn count_table(&self, n: usize) -> CountTable {
        let states = self.num_states();
        let mut rows = Vec::with_capacity(n + 1);
        rows.push(vec![BigUint::one(); states]);
        for l in 1..=n {
            let prev: &Vec<BigUint> = &rows[l - 1];
            let row = (0..states)
                .map(|q| {
                    let mut acc = BigUint::zero();
                    for c in 0..self.alphabet {
                        let t = self.trans[q * self.alphabet + c];
                        if t != DEAD {
                            acc += &prev[t as usize];
                        }
                    }
                    acc
                })
                .collect();
            rows.push(row);
        }
        CountTable {
            dfa: self.clone(),
            len: n,
            rows,
        }
    }

    /// Lexicographically least word matching `pattern` (fixed symbols where
    /// `Some`) that the automaton accepts. `blocked(pos, state)` may veto
    /// entering `state` right after reading position `pos`.
    pub fn least_completion(
        &self,
        pattern: &[Option<u8>],
        blocked: &dyn Fn(usize, u32) -> bool,
    ) -> Option<Vec<u8>> {
        let n = pattern.len();
        let states = self.num_states();
        let words = states.div_ceil(64);
        let mut ok = vec![0u64; (n + 1) * words];
        for q in 0..states {
            ok[n * words + q / 64] |= 1 << (q % 64);
        }
        let test = |ok: &[u64], i: usize, q: u32| -> bool {
            ok[i * words + q as usize / 64] >> (q % 64) & 1 == 1
        };
        for i in (0..n).rev() {
            for q in 0..states {
                let live = self.symbols_at(pattern[i]).any(|c| {
                    let t = self.trans[q * self.alphabet + c as usize];
                    t != DEAD && !blocked(i, t) && test(&ok, i + 1, t)
                });
                if live {
                    ok[i * words + q / 64] |= 1 << (q % 64);
                }
            }
        }
        if !test(&ok, 0, self.start) {
            return None;
        }
        let mut out = Vec::with_capacity(n);
        let mut q = self.start;
        for (i, slot) in pattern.iter().enumerate() {
            let (c, t) = self
                .symbols_at(*slot)
                .find_map(|c| {
                    let t = self.trans[q as usize * self.alphabet + c as usize];
                    (t != DEAD && !blocked(i, t) && test(&ok, i + 1, t)).then_some((c, t))
                })
                .expect("backward reachability guarantees a live successor");
            out.push(c);
            q = t;
        }
        Some(out)
    }

    fn symbols_at(&self, slot: Option<u8>) -> impl Iterator<Item = u8> {
        let (lo, hi) = match slot {
            Some(c) if (c as usize) < self.alphabet => (c, c + 1),
            Some(_) => (0, 0),
            None => (0, self.alphabet as u8),
        };
        lo..hi
    }
}

/// Completion counts `rows[l][q]` = number of accepted words of length `l`
/// readable from state `q`, supporting lexicographic rank and unrank.
#[derive(Clone, Debug)]
pub struct CountTable {
    dfa: Dfa,
    len: usize,
    rows: Vec<Vec<BigUint>>,
}

impl CountTable {
    pub fn total(&self) -> &BigUint {
        &self.rows[self.len][self.dfa.start as usize]
    }

    /// Lexicographic rank of `word` among accepted words of the table length.
    pub fn rank(&self, word: &[u8]) -> Option<BigUint> {
        if word.len() != self.len {
            return None;
        }
        let a = self.dfa.alphabet;
        let mut rank = BigUint::zero();
        let mut q = self.dfa.start;
        for (i, &w) in word.iter().enumerate() {
            let rest = self.len - i - 1;
            for c in 0..w {
                let t = self.dfa.trans[q as usize * a + c as usize];
                if t != DEAD {
                    rank += &self.rows[rest][t as usize];
                }
            }
            q = self.dfa.step(q, w)?;
        }
        Some(rank)
    }

    /// Inverse of [`CountTable::rank`].
    pub fn unrank(&self, rank: &BigUint) -> Option<Vec<u8>> {
        if rank >= self.total() {
            return None;
        }
        let a = self.dfa.alphabet;
        let mut rem = rank.clone();
        let mut q = self.dfa.start;
        let mut out = Vec::with_capacity(self.len);
        for i in 0..self.len {
            let rest = self.len - i - 1;
            let mut chosen = None;
            for c in 0..a {
                let t = self.dfa.trans[q as usize * a + c];
                if t == DEAD {
                    continue;
                }
                let block = &self.rows[rest][t as usize];
                if rem < *block {
                    chosen = Some((c as u8, t));
                    break;
                }
                rem -= block;
            }
            let (c, t) = chosen?;
            out.push(c);
            q = t;
        }
        Some(out)
    }
}

/// Multi-pattern matcher with a complete goto function.
struct AhoCorasick {
    trans: Vec<u32>,
    terminal: Vec<bool>,
}

impl AhoCorasick {
    fn new(alphabet: usize, patterns: &[Vec<u8>]) -> Self {
        let a = alphabet;
        let mut goto: Vec<u32> = vec![DEAD; a];
        let mut terminal = vec![false];
        for p in patterns {
            let mut node = 0usize;
            for &c in p {
                let slot = node * a + c as usize;
                if goto[slot] == DEAD {
                    goto[slot] = terminal.len() as u32;
                    terminal.push(false);
                    goto.extend(std::iter::repeat_n(DEAD, a));
                }
                node = goto[slot] as usize;
            }
            terminal[node] = true;
        }
        let nodes = terminal.len();
        let mut fail = vec![0u32; nodes];
        let mut queue = VecDeque::new();
        for c in 0..a {
            match goto[c] {
                DEAD => goto[c] = 0,
                child => {
                    fail[child as usize] = 0;
                    queue.push_back(child);
                }
            }
        }
        while let Some(u) = queue.pop_front() {
            let u = u as usize;
            terminal[u] |= terminal[fail[u] as usize];
            for c in 0..a {
                let slot = u * a + c;
                let via_fail = goto[fail[u] as usize * a + c];
                match goto[slot] {
                    DEAD => goto[slot] = via_fail,
                    child => {
                        fail[child as usize] = via_fail;
                        queue.push_back(child);
                    }
                }
            }
        }
        AhoCorasick {
            trans: goto,
            terminal,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(alphabet: usize) -> Dfa {
        Dfa::from_table(alphabet, 0, vec![0; alphabet])
    }

    fn brute(alphabet: usize, n: usize, ok: impl Fn(&[u8]) -> bool) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        let total = alphabet.pow(n as u32);
        for mut k in 0..total {
            let mut w = vec![0u8; n];
            for i in (0..n).rev() {
                w[i] = (k % alphabet) as u8;
                k /= alphabet;
            }
            if ok(&w) {
                out.push(w);
            }
        }
        out
    }

    fn contains(w: &[u8], p: &[u8]) -> bool {
        w.windows(p.len()).any(|x| x == p)
    }

    #[test]
    fn avoidance_counts_match_brute_force() {
        let pats = vec![vec![1, 1], vec![0, 1, 0]];
        let dfa = full(2).avoiding(&pats);
        for n in 0..12 {
            let expect = brute(2, n, |w| pats.iter().all(|p| !contains(w, p)));
            assert_eq!(dfa.count(n), BigUint::from(expect.len()));
        }
    }

    #[test]
    fn rank_unrank_follow_lex_order() {
        let pats = vec![vec![2, 2], vec![0, 1]];
        let dfa = full(3).avoiding(&pats);
        let words = brute(3, 6, |w| pats.iter().all(|p| !contains(w, p)));
        let table = dfa.count_table(6);
        assert_eq!(*table.total(), BigUint::from(words.len()));
        for (i, w) in words.iter().enumerate() {
            assert_eq!(table.rank(w), Some(BigUint::from(i)));
            assert_eq!(table.unrank(&BigUint::from(i)).as_deref(), Some(&w[..]));
        }
        assert_eq!(table.unrank(&BigUint::from(words.len())), None);
    }

    #[test]
    fn least_completion_respects_pattern_and_blocks() {
        let dfa = full(2).avoiding(&[vec![1, 1]]);
        let pat = [Some(1), None, None, Some(1)];
        assert_eq!(dfa.least_completion(&pat, &|_, _| false), Some(vec![1, 0, 0, 1]));
        let pat = [Some(1), Some(1)];
        assert_eq!(dfa.least_completion(&pat, &|_, _| false), None);
    }

    #[test]
    fn tracking_flags_only_pattern_completions() {
        let (dfa, flags) = full(2).tracking(&[1, 0, 1]);
        let q = dfa.run(&[0, 1, 0, 1]).unwrap();
        assert!(flags[q as usize]);
        let q = dfa.run(&[1, 0, 0]).unwrap();
        assert!(!flags[q as usize]);
        // forbid every occurrence: least completion of free slots avoids 101
        let pat = [Some(1), None, Some(1), None, None];
        let w = dfa
            .least_completion(&pat, &|_, q| flags[q as usize])
            .unwrap();
        assert!(!contains(&w, &[1, 0, 1]));
        assert_eq!(w, vec![1, 1, 1, 0, 0]);
    }
}
