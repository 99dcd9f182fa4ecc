//! Measure perturbations realized on samples.
//!
//! A skeleton is a random concatenation of two legal blocks over `{0, 1, 2}`.
//! Splicing copies the first source where the skeleton reads 1, the second
//! source (or a target cylinder) where it reads 2, and fills the 0-runs by
//! interpolation.

use crate::interp::{interpolate, InterpError, SegmentPlan};
use crate::shiftspace::{specification_gap, ShiftError, Sft, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use thiserror::Error;

const FLOOR_GUARD: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SplicerError {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("time-ratio inequality fails: {0}")]
    Inequality(String),
    #[error("filler run {have} is shorter than the specification gap {need}")]
    Gap { have: usize, need: usize },
    #[error("{what} is not admissible")]
    Inadmissible { what: &'static str },
    #[error("{what} has length {have}, need at least {need}")]
    TooShort {
        what: &'static str,
        have: usize,
        need: usize,
    },
    #[error("skeleton does not parse at position {0}")]
    BadSkeleton(usize),
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error(transparent)]
    Shift(#[from] ShiftError),
}

/// Block shapes of the two skeleton families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SkeletonKind {
    /// Blocks `1^{k1} 0^{k0} 2^{k2} 0^{k0}` and `1^{k1+1} 0^{k0} 2^{k2} 0^{k0}`.
    EntropyBoost { k0: usize, k1: usize, k2: usize },
    /// Blocks `1^{N-2M} 0^M 2 0^M` and `1^{N+1-2M} 0^M 2 0^M`.
    FullSupport { n: usize, m: usize },
}

impl SkeletonKind {
    /// Run lengths `(ones, zeros, twos)` of the short block.
    fn runs(self) -> (usize, usize, usize) {
        match self {
            SkeletonKind::EntropyBoost { k0, k1, k2 } => (k1, k0, k2),
            SkeletonKind::FullSupport { n, m } => (n - 2 * m, m, 1),
        }
    }

    fn block(self, long: bool) -> Vec<u8> {
        let (ones, zeros, twos) = self.runs();
        let mut b = vec![1u8; ones + long as usize];
        b.extend(std::iter::repeat_n(0, zeros));
        b.extend(std::iter::repeat_n(2, twos));
        b.extend(std::iter::repeat_n(0, zeros));
        b
    }

    fn validate(self) -> Result<(), SplicerError> {
        match self {
            SkeletonKind::EntropyBoost { k0, k2, .. } if k0 == 0 || k2 == 0 => Err(
                SplicerError::Params("entropy-boost blocks need k0 >= 1 and k2 >= 1".into()),
            ),
            SkeletonKind::FullSupport { n, m } if m == 0 || 2 * m > n => Err(
                SplicerError::Params(format!("full-support blocks need 1 <= M and 2M <= N (N={n}, M={m})")),
            ),
            _ => Ok(()),
        }
    }
}

/// A sampled skeleton: whole blocks, each long or short by a fair coin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    pub kind: SkeletonKind,
    pub seed: u64,
    pub long_blocks: Vec<bool>,
    pub symbols: Vec<u8>,
}

impl Skeleton {
    /// Samples blocks until the sequence has at least `min_len` symbols.
    pub fn sample(kind: SkeletonKind, min_len: usize, seed: u64) -> Result<Self, SplicerError> {
        kind.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut long_blocks = Vec::new();
        let mut symbols = Vec::with_capacity(min_len + 2 * kind.block(true).len());
        while symbols.len() < min_len {
            let long = rng.random_bool(0.5);
            long_blocks.push(long);
            symbols.extend(kind.block(long));
        }
        Ok(Skeleton {
            kind,
            seed,
            long_blocks,
            symbols,
        })
    }

    /// Greedy parse into long/short flags; fails at the first illegal position.
    pub fn parse(kind: SkeletonKind, symbols: &[u8]) -> Result<Vec<bool>, SplicerError> {
        kind.validate()?;
        let (ones, _, _) = kind.runs();
        let mut flags = Vec::new();
        let mut pos = 0;
        while pos < symbols.len() {
            let run = symbols[pos..].iter().take_while(|&&c| c == 1).count();
            let long = match run {
                r if r == ones => false,
                r if r == ones + 1 => true,
                _ => return Err(SplicerError::BadSkeleton(pos)),
            };
            let block = kind.block(long);
            let end = pos + block.len();
            if end > symbols.len() || symbols[pos..end] != block[..] {
                let mismatch = (pos..end.min(symbols.len()))
                    .find(|&i| symbols[i] != block[i - pos])
                    .unwrap_or(symbols.len());
                return Err(SplicerError::BadSkeleton(mismatch));
            }
            flags.push(long);
            pos = end;
        }
        Ok(flags)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Maximal runs `(symbol, start, end)` within the first `limit` symbols.
    fn runs(&self, limit: usize) -> Vec<(u8, usize, usize)> {
        let s = &self.symbols[..limit.min(self.symbols.len())];
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=s.len() {
            if i == s.len() || s[i] != s[start] {
                out.push((s[start], start, i));
                start = i;
            }
        }
        out
    }
}

/// Block lengths and the two time-ratio checks for the entropy-boost skeleton.
#[derive(Clone, Debug, PartialEq)]
pub struct SkeletonParams {
    pub k0: usize,
    pub k1: usize,
    pub k2: usize,
    /// `k1 / (2k0 + k1 + k2)`, required `> 1 − ε − γ`.
    pub copy_ratio: f64,
    /// `k2 / (2k0 + k1 + k2)`, required `> ε − γ`.
    pub boost_ratio: f64,
}

impl SkeletonParams {
    pub fn kind(&self) -> SkeletonKind {
        SkeletonKind::EntropyBoost {
            k0: self.k0,
            k1: self.k1,
            k2: self.k2,
        }
    }
}

impl fmt::Display for SkeletonParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k0={} k1={} k2={} copy_ratio={:.6} boost_ratio={:.6}",
            self.k0, self.k1, self.k2, self.copy_ratio, self.boost_ratio
        )
    }
}

fn floor_guarded(x: f64) -> usize {
    (x + FLOOR_GUARD).floor().max(0.0) as usize
}

/// `k0 = ⌊γN/2⌋`, `k1 = ⌊(1−ε−γ/2)N⌋`, `k2 = ⌊(ε−γ/2)N⌋` with both ratio
/// inequalities verified.
pub fn skeleton_params(eps: f64, gamma: f64, n: usize) -> Result<SkeletonParams, SplicerError> {
    if !(gamma > 0.0 && gamma < eps && eps < 1.0) {
        return Err(SplicerError::Params(format!(
            "need 0 < gamma < eps < 1 (eps={eps}, gamma={gamma})"
        )));
    }
    let nf = n as f64;
    let k0 = floor_guarded(gamma / 2.0 * nf);
    let k1 = floor_guarded((1.0 - eps - gamma / 2.0) * nf);
    let k2 = floor_guarded((eps - gamma / 2.0) * nf);
    if k0 == 0 {
        return Err(SplicerError::Params(format!("k0 = 0 at N = {n}")));
    }
    let total = (2 * k0 + k1 + k2) as f64;
    let copy_ratio = k1 as f64 / total;
    let boost_ratio = k2 as f64 / total;
    if copy_ratio <= 1.0 - eps - gamma {
        return Err(SplicerError::Inequality(format!(
            "k1/(2k0+k1+k2) = {copy_ratio} <= 1 - eps - gamma = {}",
            1.0 - eps - gamma
        )));
    }
    if boost_ratio <= eps - gamma {
        return Err(SplicerError::Inequality(format!(
            "k2/(2k0+k1+k2) = {boost_ratio} <= eps - gamma = {}",
            eps - gamma
        )));
    }
    Ok(SkeletonParams {
        k0,
        k1,
        k2,
        copy_ratio,
        boost_ratio,
    })
}

fn require_admissible(sft: &Sft, w: &Word, what: &'static str) -> Result<(), SplicerError> {
    if sft.is_admissible(&w.symbols) {
        Ok(())
    } else {
        Err(SplicerError::Inadmissible { what })
    }
}

/// Copies `y1` on the skeleton's 1-runs and `y2` on its 2-runs, then fills.
pub fn splice_entropy_boost(
    sft: &Sft,
    y1: &Word,
    y2: &Word,
    skeleton: &Skeleton,
) -> Result<Word, SplicerError> {
    let SkeletonKind::EntropyBoost { k0, .. } = skeleton.kind else {
        return Err(SplicerError::Params("entropy-boost splice needs an entropy-boost skeleton".into()));
    };
    skeleton.kind.validate()?;
    let gap = specification_gap(sft)?;
    if k0 < gap {
        return Err(SplicerError::Gap { have: k0, need: gap });
    }
    let len = skeleton.len();
    for (w, what) in [(y1, "y1"), (y2, "y2")] {
        require_admissible(sft, w, what)?;
        if !w.covers(0, len as i64) {
            return Err(SplicerError::TooShort {
                what,
                have: w.len(),
                need: len,
            });
        }
    }
    let mut plan = SegmentPlan::new(0, len as i64, gap);
    for (symbol, a, b) in skeleton.runs(len) {
        let source = match symbol {
            1 => y1,
            2 => y2,
            _ => continue,
        };
        plan.push(a as i64, source.window(a as i64, b as i64)?.to_vec());
    }
    Ok(interpolate(sft, &plan)?)
}

/// Copies `y1` on the 1-runs of a full-support skeleton and plants `target`
/// centred on every 2. The output has the length of `y1`.
pub fn splice_full_support(
    sft: &Sft,
    y1: &Word,
    target: &Word,
    n: usize,
    m: usize,
    seed: u64,
) -> Result<Word, SplicerError> {
    let kind = SkeletonKind::FullSupport { n, m };
    kind.validate()?;
    require_admissible(sft, y1, "y1")?;
    require_admissible(sft, target, "target")?;
    if target.len().is_multiple_of(2) {
        return Err(SplicerError::Params("target must have odd length 1 + 2t".into()));
    }
    let half = target.len() / 2;
    let gap = specification_gap(sft)?;
    if m < gap + half {
        return Err(SplicerError::Gap {
            have: m.saturating_sub(half),
            need: gap,
        });
    }
    let len = y1.len();
    if len < n + 2 || !y1.covers(0, len as i64) {
        return Err(SplicerError::TooShort {
            what: "y1",
            have: len,
            need: n + 2,
        });
    }
    let skeleton = Skeleton::sample(kind, len, seed)?;
    let mut plan = SegmentPlan::new(0, len as i64, gap);
    for (symbol, a, b) in skeleton.runs(len) {
        match symbol {
            1 => plan.push(a as i64, y1.window(a as i64, b as i64)?.to_vec()),
            2 if a >= half && a + half < len => {
                plan.push((a - half) as i64, target.symbols.clone());
            }
            _ => {}
        }
    }
    Ok(interpolate(sft, &plan)?)
}
