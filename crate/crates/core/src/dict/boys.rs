//! Source blocks of large measure.
//!
//! A length-`N` block is a boy when its cylinder has log-mass at least the
//! threshold `−N(h + Δ)`. For i.i.d. sources membership depends only on the
//! symbol counts, so boys are ranked by (composition class, lex order within
//! the class) without materializing the set. Markov sources are enumerated.

use super::DictError;
use crate::bigmath::log_add;
use crate::measures::{log_cylinder_probability, MarkovMeasure};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Markov sources are enumerated up to this block length.
pub const MAX_LISTED_LEN: usize = 24;
/// Upper limit on the number of composition classes.
pub const MAX_CLASSES: usize = 5_000_000;

#[derive(Clone, Debug, PartialEq)]
enum Backing {
    /// Member composition classes in lex order of their count vectors.
    Iid {
        neg_logs: Vec<f64>,
        classes: Vec<Vec<usize>>,
    },
    /// Sorted member list.
    Listed { members: Vec<Vec<u8>> },
    /// Every word is a boy (uniform source); ranks are base-`a` numerals.
    Full { neg_logs: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoySet {
    n: usize,
    alphabet: usize,
    log_threshold: f64,
    count: BigUint,
    /// `ln μ(∪ boys)`.
    log_mass: f64,
    backing: Backing,
}

fn iid_marginal(mu: &MarkovMeasure) -> Option<Vec<f64>> {
    let pi = mu.stationary();
    mu.transition()
        .iter()
        .enumerate()
        .all(|(c, row)| pi[c] == 0.0 || row.iter().zip(pi).all(|(a, b)| (a - b).abs() < 1e-12))
        .then(|| pi.to_vec())
}

fn compositions(n: usize, parts: usize, visit: &mut dyn FnMut(&[usize])) {
    fn rec(left: usize, parts: usize, acc: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if acc.len() + 1 == parts {
            acc.push(left);
            visit(acc);
            acc.pop();
            return;
        }
        for k in 0..=left {
            acc.push(k);
            rec(left - k, parts, acc, visit);
            acc.pop();
        }
    }
    rec(n, parts, &mut Vec::with_capacity(parts), visit);
}

fn multinomial(counts: &[usize]) -> BigUint {
    let mut total = 0usize;
    let mut out = BigUint::one();
    for &k in counts {
        for i in 1..=k {
            total += 1;
            out *= total;
            out /= i;
        }
    }
    out
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    for i in 1..=n {
        t[i] = t[i - 1] + (i as f64).ln();
    }
    t
}

impl BoySet {
    /// Boys of length `n` for `mu` at log threshold `log_threshold`.
    pub fn new(mu: &MarkovMeasure, n: usize, log_threshold: f64) -> Result<Self, DictError> {
        let alphabet = mu.alphabet_size();
        match iid_marginal(mu) {
            Some(p) => Self::iid(&p, n, log_threshold),
            None if n <= MAX_LISTED_LEN => Ok(Self::listed(mu, n, log_threshold)),
            None => Err(DictError::TooLarge(format!(
                "Markov boys are enumerated only up to N = {MAX_LISTED_LEN}, got {n} over {alphabet} symbols"
            ))),
        }
    }

    fn iid(p: &[f64], n: usize, log_threshold: f64) -> Result<Self, DictError> {
        let a = p.len();
        if p.iter().all(|&q| q == p[0]) && (n as f64) * p[0].ln() >= log_threshold {
            return Ok(BoySet {
                n,
                alphabet: a,
                log_threshold,
                count: BigUint::from(a).pow(n as u32),
                log_mass: 0.0,
                backing: Backing::Full { neg_logs: vec![-p[0].ln(); a] },
            });
        }
        let classes_total = crate::bigmath::ln_binomial((n + a - 1) as u64, (a - 1) as u64);
        if classes_total > (MAX_CLASSES as f64).ln() {
            return Err(DictError::TooLarge(format!(
                "{a}-symbol compositions of {n} exceed {MAX_CLASSES} classes"
            )));
        }
        let neg_logs: Vec<f64> = p
            .iter()
            .map(|&q| if q > 0.0 { -q.ln() } else { f64::INFINITY })
            .collect();
        let lnf = ln_factorials(n);
        let mut classes = Vec::new();
        let mut count = BigUint::zero();
        let mut log_mass = f64::NEG_INFINITY;
        // running class size, kept incrementally for two symbols
        let mut binary_size = BigUint::one();
        compositions(n, a, &mut |k| {
            let size_here = (a == 2).then(|| binary_size.clone());
            if a == 2 && k[0] < n {
                binary_size = &binary_size * (n - k[0]) / (k[0] + 1);
            }
            let cost: f64 = k
                .iter()
                .zip(&neg_logs)
                .map(|(&c, &w)| if c == 0 { 0.0 } else { c as f64 * w })
                .sum();
            if -cost < log_threshold {
                return;
            }
            classes.push(k.to_vec());
            let ln_size = lnf[n] - k.iter().map(|&c| lnf[c]).sum::<f64>();
            log_mass = log_add(log_mass, ln_size - cost);
            count += size_here.unwrap_or_else(|| multinomial(k));
        });
        Ok(BoySet {
            n,
            alphabet: a,
            log_threshold,
            count,
            log_mass,
            backing: Backing::Iid { neg_logs, classes },
        })
    }

    fn listed(mu: &MarkovMeasure, n: usize, log_threshold: f64) -> Self {
        let a = mu.alphabet_size();
        let mut members = Vec::new();
        let mut log_mass = f64::NEG_INFINITY;
        let mut word = vec![0u8; n];
        fn walk(
            mu: &MarkovMeasure,
            word: &mut Vec<u8>,
            pos: usize,
            log_threshold: f64,
            out: &mut Vec<Vec<u8>>,
            log_mass: &mut f64,
        ) {
            if pos == word.len() {
                let l = log_cylinder_probability(mu, word);
                if l >= log_threshold {
                    out.push(word.clone());
                    *log_mass = log_add(*log_mass, l);
                }
                return;
            }
            for c in 0..mu.alphabet_size() as u8 {
                let ok = if pos == 0 {
                    mu.stationary()[c as usize] > 0.0
                } else {
                    mu.transition()[word[pos - 1] as usize][c as usize] > 0.0
                };
                if ok {
                    word[pos] = c;
                    walk(mu, word, pos + 1, log_threshold, out, log_mass);
                }
            }
        }
        walk(mu, &mut word, 0, log_threshold, &mut members, &mut log_mass);
        BoySet {
            n,
            alphabet: a,
            log_threshold,
            count: BigUint::from(members.len()),
            log_mass,
            backing: Backing::Listed { members },
        }
    }

    pub fn block_len(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn log_threshold(&self) -> f64 {
        self.log_threshold
    }

    pub fn count(&self) -> &BigUint {
        &self.count
    }

    /// `μ(∪ boys)`.
    pub fn mass(&self) -> f64 {
        self.log_mass.exp()
    }

    pub fn log_mass(&self) -> f64 {
        self.log_mass
    }

    fn class_of(&self, word: &[u8]) -> Option<Vec<usize>> {
        if word.len() != self.n || word.iter().any(|&c| c as usize >= self.alphabet) {
            return None;
        }
        let mut k = vec![0usize; self.alphabet];
        word.iter().for_each(|&c| k[c as usize] += 1);
        Some(k)
    }

    pub fn contains(&self, word: &[u8]) -> bool {
        match &self.backing {
            Backing::Iid { classes, .. } => self
                .class_of(word)
                .is_some_and(|k| classes.binary_search(&k).is_ok()),
            Backing::Listed { members } => members.binary_search_by(|m| m[..].cmp(word)).is_ok(),
            Backing::Full { .. } => self.class_of(word).is_some(),
        }
    }

    /// Position of `word` in (class, lex) order, or `None` for non-members.
    /// When every word is a boy this is plain lex order.
    pub fn rank(&self, word: &[u8]) -> Option<BigUint> {
        match &self.backing {
            Backing::Full { .. } => {
                self.class_of(word)?;
                if self.alphabet == 1 {
                    return Some(BigUint::zero());
                }
                BigUint::from_radix_be(word, self.alphabet as u32)
            }
            Backing::Listed { members } => members
                .binary_search_by(|m| m[..].cmp(word))
                .ok()
                .map(BigUint::from),
            Backing::Iid { classes, .. } => {
                let k = self.class_of(word)?;
                let idx = classes.binary_search(&k).ok()?;
                let offset: BigUint = classes[..idx].iter().map(|c| multinomial(c)).sum();
                Some(offset + rank_in_class(word, &k))
            }
        }
    }

    pub fn unrank(&self, rank: &BigUint) -> Option<Vec<u8>> {
        match &self.backing {
            Backing::Full { .. } => {
                if rank >= &self.count {
                    return None;
                }
                let digits = if rank.is_zero() {
                    Vec::new()
                } else {
                    rank.to_radix_be(self.alphabet as u32)
                };
                let mut word = vec![0u8; self.n - digits.len()];
                word.extend(digits);
                Some(word)
            }
            Backing::Listed { members } => members.get(rank.to_usize()?).cloned(),
            Backing::Iid { classes, .. } => {
                let mut left = rank.clone();
                for k in classes {
                    let size = multinomial(k);
                    if left < size {
                        return Some(unrank_in_class(&left, k, self.n));
                    }
                    left -= size;
                }
                None
            }
        }
    }

    /// All members in rank order, when there are at most `limit`.
    pub fn members(&self, limit: usize) -> Option<Vec<Vec<u8>>> {
        let count = self.count.to_usize().filter(|&c| c <= limit)?;
        match &self.backing {
            Backing::Listed { members } => Some(members.clone()),
            _ => (0..count).map(|i| self.unrank(&BigUint::from(i))).collect(),
        }
    }

    /// Per-symbol costs `−ln p` of an i.i.d. source.
    pub fn neg_logs(&self) -> Option<&[f64]> {
        match &self.backing {
            Backing::Iid { neg_logs, .. } | Backing::Full { neg_logs } => Some(neg_logs),
            Backing::Listed { .. } => None,
        }
    }
}

/// Lex rank among words with symbol counts `k`.
fn rank_in_class(word: &[u8], k: &[usize]) -> BigUint {
    let mut left = k.to_vec();
    let mut remaining = word.len();
    let mut ways = multinomial(k);
    let mut rank = BigUint::zero();
    for &c in word {
        for smaller in 0..c as usize {
            if left[smaller] > 0 {
                rank += &ways * left[smaller] / remaining;
            }
        }
        ways = ways * left[c as usize] / remaining;
        left[c as usize] -= 1;
        remaining -= 1;
    }
    rank
}

fn unrank_in_class(rank: &BigUint, k: &[usize], n: usize) -> Vec<u8> {
    let mut left = k.to_vec();
    let mut remaining = n;
    let mut ways = multinomial(k);
    let mut r = rank.clone();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        for c in 0..left.len() {
            if left[c] == 0 {
                continue;
            }
            let block = &ways * left[c] / remaining;
            if r < block {
                out.push(c as u8);
                ways = block;
                left[c] -= 1;
                break;
            }
            r -= block;
        }
        remaining -= 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigmath::ln_binomial;
    use crate::estimators::binary_entropy;
    use crate::measures::cylinder_of;

    fn binom(n: usize, k: usize) -> BigUint {
        multinomial(&[k, n - k])
    }

    #[test]
    fn fair_coin_makes_everything_a_boy() {
        let mu = MarkovMeasure::bernoulli_binary(0.5).unwrap();
        let n = 10;
        let boys = BoySet::new(&mu, n, -(n as f64) * (2f64.ln() + 0.01)).unwrap();
        assert_eq!(*boys.count(), BigUint::from(1024u32));
        assert!((boys.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn biased_coin_threshold_matches_binomial_oracle() {
        let p = 0.1;
        let mu = MarkovMeasure::bernoulli_binary(p).unwrap();
        let h = binary_entropy(p).unwrap();
        let margin = (2f64.ln() - h) / 10.0;
        let n = 64;
        let boys = BoySet::new(&mu, n, -(n as f64) * (h + margin)).unwrap();
        let kstar = (0..=n)
            .filter(|&k| k as f64 * (1.0 / p).ln() + (n - k) as f64 * (1.0 / (1.0 - p)).ln() <= n as f64 * (h + margin))
            .max()
            .unwrap();
        assert_eq!(kstar, 7);
        let expected: BigUint = (0..=kstar).map(|k| binom(n, k)).sum();
        assert_eq!(*boys.count(), expected);
        let mass: f64 = (0..=kstar)
            .map(|k| (ln_binomial(n as u64, k as u64) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp())
            .sum();
        assert!((boys.mass() - mass).abs() < 1e-9);
    }

    #[test]
    fn point_mass_has_one_boy() {
        let mu = MarkovMeasure::bernoulli(&[1.0, 0.0]).unwrap();
        let boys = BoySet::new(&mu, 12, -1.0).unwrap();
        assert_eq!(*boys.count(), BigUint::one());
        assert_eq!(boys.unrank(&BigUint::zero()), Some(vec![0; 12]));
    }

    #[test]
    fn rank_unrank_are_inverse_and_class_ordered() {
        let mu = MarkovMeasure::bernoulli(&[0.5, 0.3, 0.2]).unwrap();
        let n = 7;
        let boys = BoySet::new(&mu, n, -(n as f64) * 1.1).unwrap();
        let all = boys.members(100_000).unwrap();
        assert_eq!(BigUint::from(all.len()), *boys.count());
        for (i, w) in all.iter().enumerate() {
            assert_eq!(boys.rank(w), Some(BigUint::from(i)));
            assert!(boys.contains(w));
        }
        let mut brute = 0usize;
        let mut mass = 0.0;
        for code in 0..3usize.pow(n as u32) {
            let w: Vec<u8> = (0..n).map(|i| (code / 3usize.pow(i as u32) % 3) as u8).collect();
            let l = log_cylinder_probability(&mu, &w);
            if l >= boys.log_threshold() {
                brute += 1;
                mass += cylinder_of(&mu, &w);
                assert!(boys.contains(&w));
            } else {
                assert!(!boys.contains(&w) && boys.rank(&w).is_none());
            }
        }
        assert_eq!(BigUint::from(brute), *boys.count());
        assert!((boys.mass() - mass).abs() < 1e-9);
    }

    #[test]
    fn markov_boys_are_listed() {
        let mu = MarkovMeasure::new(vec![vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap();
        let n = 12;
        let boys = BoySet::new(&mu, n, -(n as f64) * 0.6).unwrap();
        let all = boys.members(10_000).unwrap();
        assert!(all.windows(2).all(|p| p[0] < p[1]));
        let mass: f64 = all.iter().map(|w| cylinder_of(&mu, w)).sum();
        assert!((boys.mass() - mass).abs() < 1e-9);
        for (i, w) in all.iter().enumerate() {
            assert_eq!(boys.unrank(&BigUint::from(i)).as_ref(), Some(w));
        }
        assert!(BoySet::new(&mu, 100, -1.0).is_err());
    }
}
