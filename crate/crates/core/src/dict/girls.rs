//! Target words that can carry a code block.
//!
//! Girls are the admissible words of length `N − 11M` containing neither the
//! marker head window nor its tail window. In the exact-shadow regime distinct
//! words are separated, so the set of all such words is the maximal choice.

use super::DictError;
use crate::automaton::{CountTable, Dfa};
use crate::markers::MarkerScheme;
use crate::shiftspace::Sft;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use std::sync::OnceLock;

/// Rank tables are built only up to this word length.
pub const MAX_TABLE_LEN: usize = 8192;

#[derive(Clone, Debug)]
pub struct GirlSet {
    len: usize,
    avoided: Vec<Vec<u8>>,
    dfa: Dfa,
    count: BigUint,
    table: OnceLock<CountTable>,
}

impl GirlSet {
    /// Admissible words of length `len` avoiding the marker's head and tail
    /// windows (no avoidance when `scheme` is `None`).
    pub fn new(sft: &Sft, len: usize, scheme: Option<&MarkerScheme>) -> Result<Self, DictError> {
        if len == 0 {
            return Err(DictError::Precondition("girl length must be at least 1".into()));
        }
        let avoided: Vec<Vec<u8>> = scheme
            .map(|s| vec![s.head().to_vec(), s.tail().to_vec()])
            .unwrap_or_default();
        let dfa = if avoided.is_empty() {
            sft.dfa().clone()
        } else {
            sft.dfa().avoiding(&avoided)
        };
        let count = dfa.count(len);
        if count == BigUint::ZERO {
            return Err(DictError::NoGirls { len });
        }
        Ok(GirlSet {
            len,
            avoided,
            dfa,
            count,
            table: OnceLock::new(),
        })
    }

    /// Girls for block length `n` and marker size `m`: length `n − 11m`.
    pub fn for_blocks(sft: &Sft, n: usize, scheme: &MarkerScheme) -> Result<Self, DictError> {
        let m = scheme.m;
        if n <= 11 * m {
            return Err(DictError::Precondition(format!("need N - 11M >= 1 (N={n}, M={m})")));
        }
        Self::new(sft, n - 11 * m, Some(scheme))
    }

    pub fn word_len(&self) -> usize {
        self.len
    }

    pub fn count(&self) -> &BigUint {
        &self.count
    }

    /// Windows no girl may contain.
    pub fn avoided(&self) -> &[Vec<u8>] {
        &self.avoided
    }

    pub fn contains(&self, word: &[u8]) -> bool {
        word.len() == self.len && self.dfa.accepts(word)
    }

    fn table(&self) -> Result<&CountTable, DictError> {
        if self.len > MAX_TABLE_LEN {
            return Err(DictError::TooLarge(format!(
                "girl rank tables stop at length {MAX_TABLE_LEN}, got {}",
                self.len
            )));
        }
        Ok(self.table.get_or_init(|| self.dfa.count_table(self.len)))
    }

    /// Lexicographic rank among girls.
    pub fn rank(&self, word: &[u8]) -> Result<Option<BigUint>, DictError> {
        if word.len() != self.len {
            return Ok(None);
        }
        Ok(self.table()?.rank(word))
    }

    pub fn unrank(&self, rank: &BigUint) -> Result<Option<Vec<u8>>, DictError> {
        Ok(self.table()?.unrank(rank))
    }

    /// All girls in lex order, when there are at most `limit`.
    pub fn members(&self, limit: usize) -> Result<Option<Vec<Vec<u8>>>, DictError> {
        let Some(count) = self.count.to_usize().filter(|&c| c <= limit) else {
            return Ok(None);
        };
        let table = self.table()?;
        Ok((0..count).map(|i| table.unrank(&BigUint::from(i))).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shiftspace::{build_sft, full_shift, Word};

    fn brute(a: u8, n: usize, keep: impl Fn(&[u8]) -> bool) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        let total = (a as usize).pow(n as u32);
        for code in 0..total {
            let mut w = vec![0u8; n];
            let mut c = code;
            for slot in w.iter_mut().rev() {
                *slot = (c % a as usize) as u8;
                c /= a as usize;
            }
            if keep(&w) {
                out.push(w);
            }
        }
        out
    }

    fn contains(w: &[u8], p: &[u8]) -> bool {
        w.windows(p.len()).any(|x| x == p)
    }

    #[test]
    fn full_shift_without_markers() {
        let g = GirlSet::new(&full_shift(2), 5, None).unwrap();
        assert_eq!(*g.count(), BigUint::from(32u32));
    }

    #[test]
    fn avoidance_count_matches_brute_force() {
        let scheme = MarkerScheme::new(vec![1, 1, 1, 0, 1, 0, 0, 0], 1, 0.5).unwrap();
        for len in [1usize, 5, 12, 20] {
            let g = GirlSet::new(&full_shift(2), len, Some(&scheme)).unwrap();
            let oracle = brute(2, len, |w| !contains(w, &[1, 1]) && !contains(w, &[0, 0]));
            assert_eq!(*g.count(), BigUint::from(oracle.len()), "len {len}");
        }
        let head_only = MarkerScheme::new(vec![1, 1, 0, 1, 0, 0, 1, 1], 1, 0.5).unwrap();
        let g = GirlSet::new(&full_shift(2), 14, Some(&head_only)).unwrap();
        let fib = brute(2, 14, |w| !contains(w, &[1, 1]));
        assert_eq!(*g.count(), BigUint::from(fib.len()));
        assert_eq!(fib.len(), 987);
    }

    #[test]
    fn golden_mean_length_three() {
        let golden = build_sft(2, &[Word::from_digits("11").unwrap()]).unwrap();
        assert_eq!(*GirlSet::new(&golden, 3, None).unwrap().count(), BigUint::from(5u32));
        let scheme = MarkerScheme::new(vec![0, 1, 0, 0, 1, 0, 1, 0], 1, 0.5).unwrap();
        let g = GirlSet::new(&golden, 3, Some(&scheme)).unwrap();
        let oracle = brute(2, 3, |w| {
            !contains(w, &[1, 1]) && !contains(w, &[0, 1]) && !contains(w, &[1, 0])
        });
        assert_eq!(g.members(100).unwrap().unwrap(), oracle);
    }

    #[test]
    fn ranks_follow_lex_order_on_three_symbols() {
        let sft = build_sft(3, &[Word::from_digits("20").unwrap()]).unwrap();
        let scheme = MarkerScheme::new(vec![0, 1, 2, 2, 1, 1, 2, 1], 1, 0.5).unwrap();
        let g = GirlSet::new(&sft, 8, Some(&scheme)).unwrap();
        let oracle = brute(3, 8, |w| {
            !contains(w, &[2, 0]) && !contains(w, &[0, 1]) && !contains(w, &[2, 1])
        });
        assert_eq!(*g.count(), BigUint::from(oracle.len()));
        for (i, w) in oracle.iter().enumerate() {
            assert_eq!(g.rank(w).unwrap(), Some(BigUint::from(i)));
            assert_eq!(g.unrank(&BigUint::from(i)).unwrap().as_ref(), Some(w));
        }
    }

    #[test]
    fn empty_girl_set_is_an_error() {
        let one = full_shift(1);
        let s = MarkerScheme::new(vec![0; 8], 1, 0.5).unwrap();
        assert_eq!(GirlSet::new(&one, 3, Some(&s)).unwrap_err(), DictError::NoGirls { len: 3 });
    }
}
