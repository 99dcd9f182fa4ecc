//! End-to-end block coding: block parse, encoding by interpolation,
//! marker-synchronized decoding, and empirical audits.
//!
//! A source word is cut into length-`N` code blocks separated by occasional
//! length-1 error blocks. Each code block carries a flag: `D` with probability
//! `1 − ε/2`, otherwise a uniformly chosen girl. A `D`-flagged boy block plants
//! its girl on `[n + M, n + N − 10M)` and the marker on `[n + N − 9M, n + N − M)`;
//! a girl-flagged block plants only the girl. Everything else is filled by the
//! least admissible completion in which the marker ends only at planted spots.

use crate::dict::{CodeBook, DictError, ParameterPack};
use crate::estimators::{weakstar_surrogate, BlockDistribution, EstimatorError};
use crate::interp::{interpolate_avoiding, InterpError, SegmentPlan};
use crate::markers::MarkerScheme;
use crate::shiftspace::{digits_to_symbols, specification_gap, symbols_to_digits, ShiftError};
use num_bigint::BigUint;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use thiserror::Error;

/// Header line of a coded-stream file.
pub const CODED_HEADER: &str = "symdyn-coded v1";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodecError {
    #[error("parameters: {0}")]
    Params(String),
    #[error("coded file: {0}")]
    Parse(String),
    #[error("{what} hash mismatch: file has {found}, expected {expected}")]
    HashMismatch {
        what: &'static str,
        expected: String,
        found: String,
    },
    #[error(transparent)]
    Dict(#[from] DictError),
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Shift(#[from] ShiftError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    Code,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Flag {
    D,
    Girl(Vec<u8>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub start: usize,
    pub kind: BlockKind,
    /// Set on code blocks once flags are drawn.
    pub flag: Option<Flag>,
}

impl Block {
    pub fn len(&self, n: usize) -> usize {
        match self.kind {
            BlockKind::Code => n,
            BlockKind::Error => 1,
        }
    }
}

/// Renewal parse of `[0, len)` into code and error blocks. Coordinates after
/// the last block that fits form an uncovered tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockParse {
    pub n: usize,
    pub len: usize,
    pub blocks: Vec<Block>,
}

impl BlockParse {
    pub fn boundaries(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().map(|b| b.start)
    }

    /// First coordinate not covered by a block.
    pub fn tail_start(&self) -> usize {
        self.blocks.last().map_or(0, |b| b.start + b.len(self.n))
    }

    pub fn error_count(&self) -> usize {
        self.blocks.iter().filter(|b| b.kind == BlockKind::Error).count()
    }

    pub fn code_blocks(&self) -> impl Iterator<Item = &Block> {
        self.blocks.iter().filter(|b| b.kind == BlockKind::Code)
    }
}

/// Per-boundary error probability giving error-position density `delta`.
pub fn error_probability(n: usize, delta: f64) -> f64 {
    let nf = n as f64;
    delta * nf / (1.0 - delta + delta * nf)
}

/// Seeded renewal parse of a length-`len` word. The random stream never
/// depends on the word itself.
pub fn rokhlin_parse(len: usize, n: usize, delta: f64, seed: u64) -> Result<BlockParse, CodecError> {
    if !(0.0..1.0).contains(&delta) {
        return Err(CodecError::Params(format!("delta must lie in [0, 1), got {delta}")));
    }
    if n < 2 {
        return Err(CodecError::Params(format!("block length must be at least 2, got {n}")));
    }
    let q = error_probability(n, delta);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut blocks = Vec::new();
    let mut pos = 0;
    while pos < len {
        if q > 0.0 && rng.random::<f64>() < q {
            blocks.push(Block { start: pos, kind: BlockKind::Error, flag: None });
            pos += 1;
        } else if pos + n <= len {
            blocks.push(Block { start: pos, kind: BlockKind::Code, flag: None });
            pos += n;
        } else {
            break;
        }
    }
    Ok(BlockParse { n, len, blocks })
}

fn random_below(bound: &BigUint, rng: &mut impl RngCore) -> BigUint {
    let bits = bound.bits();
    let bytes = bits.div_ceil(8) as usize;
    let excess = (bytes as u64 * 8 - bits) as u32;
    let mut buf = vec![0u8; bytes];
    loop {
        rng.fill_bytes(&mut buf);
        if let Some(top) = buf.last_mut() {
            *top &= 0xffu8 >> excess;
        }
        let v = BigUint::from_bytes_le(&buf);
        if &v < bound {
            return v;
        }
    }
}

/// A source word, its code, and the bookkeeping needed by the audits.
#[derive(Clone, Debug, PartialEq)]
pub struct CodedPair {
    pub x: Vec<u8>,
    pub y: Vec<u8>,
    pub parse: BlockParse,
    /// Coordinates of `x` inside `D`-flagged boy blocks.
    pub coverage: Vec<bool>,
    pub target_alphabet: usize,
    pub seed: u64,
}

fn check_pack(book: &CodeBook, pack: &ParameterPack) -> Result<(), CodecError> {
    if pack.n != book.block_len() || pack.m != book.scheme.m {
        return Err(CodecError::Params(format!(
            "pack (N={}, M={}) disagrees with the dictionary (N={}, M={})",
            pack.n,
            pack.m,
            book.block_len(),
            book.scheme.m
        )));
    }
    Ok(())
}

/// Encodes `x` block by block and fills the gaps by interpolation.
pub fn encode(x: &[u8], book: &CodeBook, pack: &ParameterPack, seed: u64) -> Result<CodedPair, CodecError> {
    check_pack(book, pack)?;
    let (n, m) = (pack.n, pack.m);
    let gap = specification_gap(&book.target)?;
    if m < gap {
        return Err(CodecError::Params(format!(
            "M = {m} is below the specification gap {gap}"
        )));
    }
    let mut parse = rokhlin_parse(x.len(), n, pack.delta, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let girls = book.dict.girls();
    for block in parse.blocks.iter_mut().filter(|b| b.kind == BlockKind::Code) {
        block.flag = Some(if rng.random::<f64>() < pack.eps / 2.0 {
            let r = random_below(girls.count(), &mut rng);
            let g = girls.unrank(&r)?.ok_or_else(|| {
                DictError::Internal("girl unrank failed below the count".into())
            })?;
            Flag::Girl(g)
        } else {
            Flag::D
        });
    }
    let marker = &book.scheme.word;
    let mut plan = SegmentPlan::new(0, x.len() as i64, gap);
    let mut marker_end = vec![false; x.len() + 1];
    let mut coverage = vec![false; x.len()];
    for block in parse.code_blocks() {
        let s = block.start;
        match &block.flag {
            Some(Flag::D) => {
                if let Some(g) = book.dict.encode_block(&x[s..s + n])? {
                    plan.push((s + m) as i64, g);
                    plan.push((s + n - 9 * m) as i64, marker.clone());
                    marker_end[s + n - m] = true;
                    coverage[s..s + n].iter_mut().for_each(|c| *c = true);
                }
            }
            Some(Flag::Girl(g)) => plan.push((s + m) as i64, g.clone()),
            None => {}
        }
    }
    let allowed = |e: i64| usize::try_from(e).is_ok_and(|e| marker_end.get(e) == Some(&true));
    let y = interpolate_avoiding(&book.target, &plan, marker, &allowed)?;
    Ok(CodedPair {
        x: x.to_vec(),
        y: y.symbols,
        parse,
        coverage,
        target_alphabet: book.target.alphabet_size(),
        seed,
    })
}

/// Partial reconstruction of the source word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoded {
    /// Recovered symbols; meaningful only where `mask` is set.
    pub x_hat: Vec<u8>,
    pub mask: Vec<bool>,
    /// Block starts implied by marker occurrences, with whether the window decoded.
    pub blocks: Vec<(usize, bool)>,
}

impl Decoded {
    pub fn recovered(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }
}

/// Finds every marker occurrence, recovers the block start from it, and
/// inverts the dictionary on the information window.
pub fn decode(y: &[u8], book: &CodeBook, pack: &ParameterPack) -> Result<Decoded, CodecError> {
    check_pack(book, pack)?;
    let (n, m) = (pack.n, pack.m);
    let marker = &book.scheme.word;
    let lead = n - 9 * m;
    let mut x_hat = vec![0u8; y.len()];
    let mut mask = vec![false; y.len()];
    let mut blocks = Vec::new();
    if y.len() < marker.len() {
        return Ok(Decoded { x_hat, mask, blocks });
    }
    for p in 0..=y.len() - marker.len() {
        if &y[p..p + marker.len()] != marker.as_slice() || p < lead || p - lead + n > y.len() {
            continue;
        }
        let s = p - lead;
        let boy = book.dict.decode_window(&y[s + m..s + n - 10 * m])?;
        blocks.push((s, boy.is_some()));
        if let Some(b) = boy {
            x_hat[s..s + n].copy_from_slice(&b);
            mask[s..s + n].iter_mut().for_each(|c| *c = true);
        }
    }
    Ok(Decoded { x_hat, mask, blocks })
}

/// Frequencies of the four bad-set components.
#[derive(Clone, Debug, PartialEq)]
pub struct BadsetReport {
    /// Error blocks and the uncovered tail.
    pub error: f64,
    /// Code blocks whose source block is not a boy.
    pub non_boy: f64,
    /// Boy blocks with a girl flag.
    pub non_d: f64,
    /// `D`-flagged boy blocks, coordinates outside the information window.
    pub phase: f64,
    pub total: f64,
    /// `17δ + ε/2`.
    pub bound: f64,
    pub slack: f64,
    pub ok: bool,
}

impl fmt::Display for BadsetReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "badset.error={}", self.error)?;
        writeln!(f, "badset.non_boy={}", self.non_boy)?;
        writeln!(f, "badset.non_d={}", self.non_d)?;
        writeln!(f, "badset.phase={}", self.phase)?;
        writeln!(f, "badset.total={}", self.total)?;
        writeln!(f, "badset.bound={}", self.bound)?;
        writeln!(f, "badset.slack={}", self.slack)?;
        writeln!(f, "badset.ok={}", self.ok)
    }
}

/// Empirical bad-set frequencies of a coded pair against `17δ + ε/2 + slack`.
pub fn audit_badset(pair: &CodedPair, book: &CodeBook, pack: &ParameterPack, slack: f64) -> BadsetReport {
    let (n, m) = (pack.n, pack.m);
    let len = pair.x.len().max(1) as f64;
    let mut counts = [0usize; 4];
    counts[0] = pair.parse.error_count() + (pair.x.len() - pair.parse.tail_start());
    for block in pair.parse.code_blocks() {
        let s = block.start;
        if !book.dict.boys().contains(&pair.x[s..s + n]) {
            counts[1] += n;
        } else if matches!(block.flag, Some(Flag::Girl(_))) {
            counts[2] += n;
        } else {
            counts[3] += 11 * m;
        }
    }
    let [error, non_boy, non_d, phase] = counts.map(|c| c as f64 / len);
    let total = error + non_boy + non_d + phase;
    let bound = 17.0 * pack.delta + pack.eps / 2.0;
    BadsetReport {
        error,
        non_boy,
        non_d,
        phase,
        total,
        bound,
        slack,
        ok: total <= bound + slack,
    }
}

fn pooled_blocks(pairs: &[(&[u8], &[u8])], stride: u8, k: usize) -> BlockDistribution {
    let mut acc: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
    let mut total = 0.0;
    for (x, y) in pairs {
        let len = x.len().min(y.len());
        if len < k {
            continue;
        }
        let weight = (len - k + 1) as f64;
        let d = BlockDistribution::from_pairs(&x[..len], &y[..len], stride, k);
        for (w, p) in d.freqs {
            *acc.entry(w).or_default() += p * weight;
        }
        total += weight;
    }
    if total > 0.0 {
        acc.values_mut().for_each(|p| *p /= total);
    }
    BlockDistribution { k, freqs: acc }
}

/// Weak*-surrogate distance between the joint block statistics of the coded
/// pair and those of reference pairs.
pub fn audit_weakstar(
    pair: &CodedPair,
    references: &[(Vec<u8>, Vec<u8>)],
    kmax: usize,
) -> Result<f64, CodecError> {
    let stride = u8::try_from(pair.target_alphabet)
        .map_err(|_| CodecError::Params("target alphabet too large".into()))?;
    let coded = [(pair.x.as_slice(), pair.y.as_slice())];
    let refs: Vec<(&[u8], &[u8])> = references.iter().map(|(x, y)| (x.as_slice(), y.as_slice())).collect();
    let a: Vec<BlockDistribution> = (1..=kmax).map(|k| pooled_blocks(&coded, stride, k)).collect();
    let b: Vec<BlockDistribution> = (1..=kmax).map(|k| pooled_blocks(&refs, stride, k)).collect();
    Ok(weakstar_surrogate(&a, &b, kmax)?)
}

/// LZ78 entropy estimate in nats per symbol from the phrase count `c`.
///
/// The `m`-th phrase has length about `ln m / h`, so `n ≈ c(ln c − 1)/h` and
/// the estimate is `c(ln c − 1)/n`, which removes most of the upward bias of
/// the plain `c·ln c / n` at moderate `n`.
pub fn lz78_entropy(symbols: &[u8], alphabet: usize) -> f64 {
    if symbols.is_empty() {
        return 0.0;
    }
    const NONE: u32 = u32::MAX;
    let mut trie: Vec<u32> = vec![NONE; alphabet];
    let mut node = 0usize;
    let mut phrases = 0usize;
    for &c in symbols {
        let slot = node * alphabet + c as usize;
        if trie[slot] == NONE {
            let fresh = trie.len() / alphabet;
            trie[slot] = fresh as u32;
            trie.extend(std::iter::repeat_n(NONE, alphabet));
            phrases += 1;
            node = 0;
        } else {
            node = trie[slot] as usize;
        }
    }
    if node != 0 {
        phrases += 1;
    }
    let c = phrases as f64;
    (c * (c.ln() - 1.0) / symbols.len() as f64).max(0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyReport {
    pub lz_estimate: f64,
    pub h_source: f64,
    pub log_ratio: f64,
    pub ratio_floor: f64,
    pub ratio_ok: bool,
    /// Frequency of boy blocks carrying a girl flag, per coordinate.
    pub gain_frequency: f64,
    /// Its nominal value `(1/N)(1−δ)(1−15δ)(ε/2)`.
    pub gain_target: f64,
    pub gain_ok: bool,
}

impl fmt::Display for EntropyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "entropy.lz78={}", self.lz_estimate)?;
        writeln!(f, "entropy.h_source={}", self.h_source)?;
        writeln!(f, "entropy.log_ratio={}", self.log_ratio)?;
        writeln!(f, "entropy.ratio_floor={}", self.ratio_floor)?;
        writeln!(f, "entropy.ratio_ok={}", self.ratio_ok)?;
        writeln!(f, "entropy.gain_frequency={}", self.gain_frequency)?;
        writeln!(f, "entropy.gain_target={}", self.gain_target)?;
        writeln!(f, "entropy.gain_ok={}", self.gain_ok)
    }
}

/// LZ78 estimate of the coded output, the count-ratio predicate, and the
/// entropy-gain predicate `8NΔ·freq > 3εΔ`.
pub fn audit_entropy(
    pair: &CodedPair,
    book: &CodeBook,
    pack: &ParameterPack,
    h_source: f64,
    counts: (f64, f64),
) -> EntropyReport {
    let (log_boys, log_girls) = counts;
    let n = pack.n as f64;
    let margin = pack.entropy_margin;
    let ratio_floor = n * (pack.h_target - h_source - 2.0 * margin);
    let gains = pair
        .parse
        .code_blocks()
        .filter(|b| {
            matches!(b.flag, Some(Flag::Girl(_)))
                && book.dict.boys().contains(&pair.x[b.start..b.start + pack.n])
        })
        .count();
    let gain_frequency = gains as f64 / pair.x.len().max(1) as f64;
    let gain_target = (1.0 - pack.delta) * (1.0 - 15.0 * pack.delta) * pack.eps / (2.0 * n);
    EntropyReport {
        lz_estimate: lz78_entropy(&pair.y, pair.target_alphabet),
        h_source,
        log_ratio: log_girls - log_boys,
        ratio_floor,
        ratio_ok: log_girls - log_boys >= ratio_floor,
        gain_frequency,
        gain_target,
        gain_ok: margin > 0.0 && 8.0 * n * margin * gain_frequency > 3.0 * pack.eps * margin,
    }
}

/// One CSV row per block: start, kind, flag, boy membership, decoded.
pub fn block_csv(pair: &CodedPair, book: &CodeBook, decoded: Option<&Decoded>) -> String {
    let n = pair.parse.n;
    let recovered: HashMap<usize, bool> = decoded
        .map(|d| d.blocks.iter().copied().collect())
        .unwrap_or_default();
    let mut out = String::from("start,kind,flag,boy,decoded\n");
    for b in &pair.parse.blocks {
        let (kind, flag, boy) = match b.kind {
            BlockKind::Error => ("error", String::new(), String::new()),
            BlockKind::Code => (
                "code",
                match &b.flag {
                    Some(Flag::D) => "D".to_string(),
                    Some(Flag::Girl(g)) => symbols_to_digits(g),
                    None => String::new(),
                },
                book.dict.boys().contains(&pair.x[b.start..b.start + n]).to_string(),
            ),
        };
        let dec = recovered.get(&b.start).map_or(String::new(), bool::to_string);
        let _ = writeln!(out, "{},{kind},{flag},{boy},{dec}", b.start);
    }
    out
}

/// Lowercase hex SHA-256 of `text`.
pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// On-disk coded stream: provenance hashes, the marker, and `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct CodedFile {
    pub pack_hash: String,
    pub dictionary_hash: String,
    pub marker: MarkerScheme,
    pub seed: u64,
    pub y: Vec<u8>,
}

impl CodedFile {
    pub fn new(pair: &CodedPair, book: &CodeBook, pack: &ParameterPack) -> Self {
        CodedFile {
            pack_hash: sha256_hex(&pack.to_text()),
            dictionary_hash: sha256_hex(&book.to_text()),
            marker: book.scheme.clone(),
            seed: pair.seed,
            y: pair.y.clone(),
        }
    }

    pub fn to_text(&self) -> String {
        format!(
            "{CODED_HEADER}\npack_sha256={}\ndictionary_sha256={}\nmarker={}\nseed={}\nlength={}\ny={}\n",
            self.pack_hash,
            self.dictionary_hash,
            self.marker,
            self.seed,
            self.y.len(),
            symbols_to_digits(&self.y)
        )
    }

    pub fn from_text(text: &str) -> Result<Self, CodecError> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(CODED_HEADER) {
            return Err(CodecError::Parse(format!("missing `{CODED_HEADER}` header")));
        }
        let mut fields = HashMap::new();
        for line in lines.map(str::trim).filter(|l| !l.is_empty()) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CodecError::Parse(format!("expected key=value, got `{line}`")))?;
            fields.insert(k, v);
        }
        let field = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| CodecError::Parse(format!("missing field `{k}`")))
        };
        let marker = MarkerScheme::from_text(field("marker")?)
            .map_err(|e| CodecError::Parse(e.to_string()))?;
        let seed = field("seed")?
            .parse()
            .map_err(|e| CodecError::Parse(format!("seed: {e}")))?;
        let length: usize = field("length")?
            .parse()
            .map_err(|e| CodecError::Parse(format!("length: {e}")))?;
        let y = digits_to_symbols(field("y")?).map_err(|e| CodecError::Parse(e.to_string()))?;
        if y.len() != length {
            return Err(CodecError::Parse(format!(
                "length field says {length}, word has {}",
                y.len()
            )));
        }
        Ok(CodedFile {
            pack_hash: field("pack_sha256")?.to_string(),
            dictionary_hash: field("dictionary_sha256")?.to_string(),
            marker,
            seed,
            y,
        })
    }

    /// Checks that the file was produced with this pack and dictionary.
    pub fn check(&self, book: &CodeBook, pack: &ParameterPack) -> Result<(), CodecError> {
        for (what, found, expected) in [
            ("pack", &self.pack_hash, sha256_hex(&pack.to_text())),
            ("dictionary", &self.dictionary_hash, sha256_hex(&book.to_text())),
        ] {
            if *found != expected {
                return Err(CodecError::HashMismatch { what, expected, found: found.clone() });
            }
        }
        Ok(())
    }
}
