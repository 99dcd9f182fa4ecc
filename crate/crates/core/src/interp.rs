//! Splicing planned segments into one admissible word.
//!
//! Segments are pinned at their coordinates and the free positions are filled
//! with the lexicographically least completion accepted by the language
//! automaton of the shift, so the result agrees exactly with every segment.

use crate::shiftspace::{
    digits_to_symbols, specification_gap, symbols_to_digits, ShiftError, Sft, Word,
};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InterpError {
    #[error("no connecting word of length {gap}")]
    NoConnector { gap: usize },
    #[error("word at {start} is not admissible")]
    Inadmissible { start: i64 },
    #[error("segments at {first} and {second} overlap")]
    Overlap { first: i64, second: i64 },
    #[error("gap of {gap} before coordinate {at} is below the minimum {min_gap}")]
    GapTooSmall { at: i64, gap: usize, min_gap: usize },
    #[error("segment at {start} has length {len} > {max}")]
    SegmentTooLong { start: i64, len: usize, max: usize },
    #[error("segment at {start} leaves the range [{lo}, {hi})")]
    OutOfRange { start: i64, lo: i64, hi: i64 },
    #[error("plan line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Shift(#[from] ShiftError),
}

/// Planned segments on a range `[lo, hi)` with gap and length limits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentPlan {
    pub lo: i64,
    pub hi: i64,
    pub segments: Vec<(i64, Vec<u8>)>,
    pub min_gap: usize,
    pub max_segment: Option<usize>,
    /// Whether the stretches before the first and after the last segment must
    /// also respect `min_gap`.
    pub constrained_ends: bool,
}

impl SegmentPlan {
    pub fn new(lo: i64, hi: i64, min_gap: usize) -> Self {
        SegmentPlan {
            lo,
            hi,
            segments: Vec::new(),
            min_gap,
            max_segment: None,
            constrained_ends: false,
        }
    }

    /// Adds a segment, keeping the list sorted by start.
    pub fn push(&mut self, start: i64, symbols: Vec<u8>) {
        let at = self.segments.partition_point(|(s, _)| *s < start);
        self.segments.insert(at, (start, symbols));
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo).max(0) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    /// Checks ordering, disjointness, gaps, lengths and range containment.
    pub fn validate(&self) -> Result<(), InterpError> {
        let mut cursor = self.lo;
        let mut prev: Option<i64> = None;
        for (start, symbols) in &self.segments {
            let end = start + symbols.len() as i64;
            if *start < self.lo || end > self.hi {
                return Err(InterpError::OutOfRange {
                    start: *start,
                    lo: self.lo,
                    hi: self.hi,
                });
            }
            if let Some(max) = self.max_segment {
                if symbols.len() > max {
                    return Err(InterpError::SegmentTooLong {
                        start: *start,
                        len: symbols.len(),
                        max,
                    });
                }
            }
            if let Some(p) = prev {
                if *start < cursor {
                    return Err(InterpError::Overlap {
                        first: p,
                        second: *start,
                    });
                }
            }
            let gap = (start - cursor) as usize;
            if (prev.is_some() || self.constrained_ends) && gap < self.min_gap {
                return Err(InterpError::GapTooSmall {
                    at: *start,
                    gap,
                    min_gap: self.min_gap,
                });
            }
            prev = Some(*start);
            cursor = end;
        }
        let tail = (self.hi - cursor) as usize;
        if self.constrained_ends && prev.is_some() && tail < self.min_gap {
            return Err(InterpError::GapTooSmall {
                at: self.hi,
                gap: tail,
                min_gap: self.min_gap,
            });
        }
        Ok(())
    }

    /// Pattern over the range: `Some` at planned coordinates.
    fn pattern(&self) -> Vec<Option<u8>> {
        let mut pat = vec![None; self.len()];
        for (start, symbols) in &self.segments {
            let off = (start - self.lo) as usize;
            for (i, &c) in symbols.iter().enumerate() {
                pat[off + i] = Some(c);
            }
        }
        pat
    }

    /// `range`, `min_gap`, optional `max_segment`, `ends`, then `seg` lines.
    pub fn to_text(&self) -> String {
        let mut out = format!("range {} {}\nmin_gap {}\n", self.lo, self.hi, self.min_gap);
        if let Some(max) = self.max_segment {
            let _ = writeln!(out, "max_segment {max}");
        }
        if self.constrained_ends {
            out.push_str("ends constrained\n");
        }
        for (start, symbols) in &self.segments {
            let _ = writeln!(out, "seg {start} {}", symbols_to_digits(symbols));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, InterpError> {
        let mut plan = SegmentPlan::new(0, 0, 0);
        let mut has_range = false;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let bad = |message: &str| InterpError::Parse {
                line,
                message: message.to_string(),
            };
            let fields: Vec<&str> = raw.split_whitespace().collect();
            let int = |s: &str| s.parse::<i64>().map_err(|_| bad("expected an integer"));
            match fields.as_slice() {
                [] => {}
                [c, ..] if c.starts_with('#') => {}
                ["range", lo, hi] => {
                    plan.lo = int(lo)?;
                    plan.hi = int(hi)?;
                    has_range = true;
                }
                ["min_gap", g] => plan.min_gap = int(g)?.try_into().map_err(|_| bad("negative gap"))?,
                ["max_segment", n] => {
                    plan.max_segment = Some(int(n)?.try_into().map_err(|_| bad("negative length"))?)
                }
                ["ends", "constrained"] => plan.constrained_ends = true,
                ["seg", start, word] => {
                    let symbols = digits_to_symbols(word).map_err(|e| bad(&e.to_string()))?;
                    plan.push(int(start)?, symbols);
                }
                _ => return Err(bad("unrecognized line")),
            }
        }
        if !has_range {
            return Err(InterpError::Parse {
                line: 0,
                message: "missing range line".into(),
            });
        }
        Ok(plan)
    }
}

/// Lexicographically least `w` of length `gap` with `left·w·right` admissible.
pub fn connect_words(sft: &Sft, left: &Word, right: &Word, gap: usize) -> Result<Word, InterpError> {
    for w in [left, right] {
        if !sft.is_admissible(&w.symbols) {
            return Err(InterpError::Inadmissible { start: w.base });
        }
    }
    let mut pat: Vec<Option<u8>> = left.symbols.iter().map(|&c| Some(c)).collect();
    pat.extend(std::iter::repeat_n(None, gap));
    pat.extend(right.symbols.iter().map(|&c| Some(c)));
    let full = sft
        .dfa()
        .least_completion(&pat, &|_, _| false)
        .ok_or(InterpError::NoConnector { gap })?;
    let from = left.len();
    Ok(Word::new(full[from..from + gap].to_vec()))
}

/// Admissible word over the plan's range agreeing with every segment.
pub fn interpolate(sft: &Sft, plan: &SegmentPlan) -> Result<Word, InterpError> {
    check_plan(sft, plan)?;
    let filled = sft
        .dfa()
        .least_completion(&plan.pattern(), &|_, _| false)
        .ok_or(InterpError::NoConnector { gap: plan.min_gap })?;
    Ok(Word::with_base(filled, plan.lo))
}

/// As [`interpolate`], and additionally no occurrence of `pattern` may end at
/// a coordinate `e` (exclusive end) unless `allowed_end(e)` holds.
pub fn interpolate_avoiding(
    sft: &Sft,
    plan: &SegmentPlan,
    pattern: &[u8],
    allowed_end: &dyn Fn(i64) -> bool,
) -> Result<Word, InterpError> {
    check_plan(sft, plan)?;
    let (dfa, hits) = sft.dfa().tracking(pattern);
    let lo = plan.lo;
    let blocked = |pos: usize, q: u32| hits[q as usize] && !allowed_end(lo + pos as i64 + 1);
    let filled = dfa
        .least_completion(&plan.pattern(), &blocked)
        .ok_or(InterpError::NoConnector { gap: plan.min_gap })?;
    Ok(Word::with_base(filled, lo))
}

fn check_plan(sft: &Sft, plan: &SegmentPlan) -> Result<(), InterpError> {
    plan.validate()?;
    for (start, symbols) in &plan.segments {
        if !sft.is_admissible(symbols) {
            return Err(InterpError::Inadmissible { start: *start });
        }
    }
    Ok(())
}

/// One period `p` of a periodic point: `word` followed by its lexicographically
/// least connector back to itself, with gap equal to the specification gap.
pub fn periodic_extension(sft: &Sft, word: &Word) -> Result<Word, InterpError> {
    let gap = specification_gap(sft)?;
    let bridge = connect_words(sft, word, word, gap)?;
    let mut symbols = word.symbols.clone();
    symbols.extend(bridge.symbols);
    Ok(Word::with_base(symbols, word.base))
}
