//! Injective boy-to-girl dictionaries and their on-disk form.

use super::hall::{hall_match, Relation};
use super::{BoySet, DictError, GirlSet, ParameterPack};
use crate::bigmath::ln_biguint;
use crate::markers::MarkerScheme;
use crate::measures::MarkovMeasure;
use crate::shiftspace::{digits_to_symbols, symbols_to_digits, Sft};
use std::collections::HashMap;
use std::fmt;

/// Header line of a dictionary file.
pub const DICTIONARY_HEADER: &str = "symdyn-dictionary v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DictMode {
    /// `girl_unrank ∘ boy_rank`.
    Enumerative,
    /// Matching inside an explicit relation.
    Hall,
}

impl DictMode {
    pub fn name(self) -> &'static str {
        match self {
            DictMode::Enumerative => "enumerative",
            DictMode::Hall => "hall",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "enumerative" => Some(DictMode::Enumerative),
            "hall" => Some(DictMode::Hall),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
struct HallTable {
    /// `(boy, girl)` sorted by boy.
    pairs: Vec<(Vec<u8>, Vec<u8>)>,
    forward: HashMap<Vec<u8>, usize>,
    backward: HashMap<Vec<u8>, usize>,
}

impl HallTable {
    fn new(mut pairs: Vec<(Vec<u8>, Vec<u8>)>) -> Self {
        pairs.sort();
        let forward = pairs.iter().enumerate().map(|(i, (b, _))| (b.clone(), i)).collect();
        let backward = pairs.iter().enumerate().map(|(i, (_, g))| (g.clone(), i)).collect();
        HallTable { pairs, forward, backward }
    }
}

/// Injection from boys into girls.
#[derive(Clone, Debug)]
pub struct Dictionary {
    mode: DictMode,
    boys: BoySet,
    girls: GirlSet,
    hall: Option<HallTable>,
}

/// Builds the dictionary. Hall mode needs a relation and the degree bound `K`.
pub fn dictionary(
    boys: BoySet,
    girls: GirlSet,
    mode: DictMode,
    relation: Option<(&Relation, usize)>,
) -> Result<Dictionary, DictError> {
    match mode {
        DictMode::Enumerative => {
            if boys.count() > girls.count() {
                return Err(DictError::Capacity {
                    boys: boys.count().clone(),
                    girls: girls.count().clone(),
                    log_ratio: ln_biguint(girls.count()) - ln_biguint(boys.count()),
                });
            }
            Ok(Dictionary { mode, boys, girls, hall: None })
        }
        DictMode::Hall => {
            let (rel, k) = relation.ok_or_else(|| {
                DictError::Precondition("hall mode needs a relation and K".into())
            })?;
            if *boys.count() != rel.boys.len().into() {
                return Err(DictError::Precondition(format!(
                    "relation lists {} boys, the boy set has {}",
                    rel.boys.len(),
                    boys.count()
                )));
            }
            if let Some(b) = rel.boys.iter().find(|b| !boys.contains(b)) {
                return Err(DictError::Precondition(format!(
                    "relation boy {} is not a boy",
                    symbols_to_digits(b)
                )));
            }
            if let Some(g) = rel.girls.iter().find(|g| !girls.contains(g)) {
                return Err(DictError::Precondition(format!(
                    "relation girl {} is not a girl",
                    symbols_to_digits(g)
                )));
            }
            let phi = hall_match(rel, k)?;
            let pairs = phi
                .iter()
                .enumerate()
                .map(|(b, &g)| (rel.boys[b].clone(), rel.girls[g].clone()))
                .collect();
            Ok(Dictionary { mode, boys, girls, hall: Some(HallTable::new(pairs)) })
        }
    }
}

impl Dictionary {
    pub fn mode(&self) -> DictMode {
        self.mode
    }

    pub fn boys(&self) -> &BoySet {
        &self.boys
    }

    pub fn girls(&self) -> &GirlSet {
        &self.girls
    }

    /// Explicit `(boy, girl)` pairs in hall mode.
    pub fn pairs(&self) -> Option<&[(Vec<u8>, Vec<u8>)]> {
        self.hall.as_ref().map(|t| t.pairs.as_slice())
    }

    /// The girl assigned to `block`, or `None` when `block` is not a boy.
    pub fn encode_block(&self, block: &[u8]) -> Result<Option<Vec<u8>>, DictError> {
        if let Some(table) = &self.hall {
            return Ok(table.forward.get(block).map(|&i| table.pairs[i].1.clone()));
        }
        match self.boys.rank(block) {
            Some(r) => self.girls.unrank(&r),
            None => Ok(None),
        }
    }

    /// The boy whose girl is `window`. `None` when `window` is not a girl or
    /// (enumerative mode) lies outside the image. Hall mode picks the nearest
    /// image in Hamming distance, ties going to the lexicographically least boy.
    pub fn decode_window(&self, window: &[u8]) -> Result<Option<Vec<u8>>, DictError> {
        if !self.girls.contains(window) {
            return Ok(None);
        }
        if let Some(table) = &self.hall {
            if let Some(&i) = table.backward.get(window) {
                return Ok(Some(table.pairs[i].0.clone()));
            }
            let hamming = |g: &[u8]| g.iter().zip(window).filter(|(a, b)| a != b).count();
            return Ok(table
                .pairs
                .iter()
                .min_by_key(|(_, g)| hamming(g))
                .map(|(b, _)| b.clone()));
        }
        let Some(r) = self.girls.rank(window)? else {
            return Ok(None);
        };
        if &r >= self.boys.count() {
            return Ok(None);
        }
        Ok(self.boys.unrank(&r))
    }
}

/// A dictionary together with everything needed to rebuild it.
#[derive(Clone, Debug)]
pub struct CodeBook {
    pub source: MarkovMeasure,
    pub target: Sft,
    pub scheme: MarkerScheme,
    pub dict: Dictionary,
}

impl CodeBook {
    /// Boys of `source` above `log_threshold` and girls of `target` for block
    /// length `n`, joined in the given mode.
    pub fn build(
        source: MarkovMeasure,
        target: Sft,
        scheme: MarkerScheme,
        n: usize,
        log_threshold: f64,
        mode: DictMode,
        relation: Option<(&Relation, usize)>,
    ) -> Result<Self, DictError> {
        let boys = BoySet::new(&source, n, log_threshold)?;
        let girls = GirlSet::for_blocks(&target, n, &scheme)?;
        let dict = dictionary(boys, girls, mode, relation)?;
        Ok(CodeBook { source, target, scheme, dict })
    }

    pub fn block_len(&self) -> usize {
        self.dict.boys.block_len()
    }

    pub fn to_text(&self) -> String {
        let d = &self.dict;
        let mut out = format!(
            "{DICTIONARY_HEADER}\nmode={}\nN={}\nM={}\nlog_threshold={}\nboys={}\ngirls={}\nmarker={}\n",
            d.mode.name(),
            d.boys.block_len(),
            self.scheme.m,
            d.boys.log_threshold(),
            d.boys.count(),
            d.girls.count(),
            self.scheme
        );
        out.push_str("[source]\n");
        out.push_str(&self.source.to_text());
        out.push_str("[target]\n");
        out.push_str(&self.target.to_text());
        if let Some(pairs) = self.dict.pairs() {
            out.push_str("[pairs]\n");
            for (b, g) in pairs {
                out.push_str(&format!("{} -> {}\n", symbols_to_digits(b), symbols_to_digits(g)));
            }
        }
        out
    }

    /// Rebuilds the dictionary and checks the recorded counts.
    pub fn from_text(text: &str) -> Result<Self, DictError> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(DICTIONARY_HEADER) {
            return Err(DictError::Parse(format!("missing `{DICTIONARY_HEADER}` header")));
        }
        let mut fields: HashMap<&str, &str> = HashMap::new();
        let mut sections: HashMap<&str, String> = HashMap::new();
        let mut current: Option<&str> = None;
        for line in lines {
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(name) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                current = Some(name);
                sections.entry(name).or_default();
                continue;
            }
            match current {
                Some(name) => {
                    let body = sections.get_mut(name).expect("section registered");
                    body.push_str(t);
                    body.push('\n');
                }
                None => {
                    let (k, v) = t
                        .split_once('=')
                        .ok_or_else(|| DictError::Parse(format!("expected key=value, got `{t}`")))?;
                    fields.insert(k, v);
                }
            }
        }
        let field = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| DictError::Parse(format!("missing field `{k}`")))
        };
        let number = |k: &str| {
            field(k)?
                .parse::<usize>()
                .map_err(|e| DictError::Parse(format!("field `{k}`: {e}")))
        };
        let mode = DictMode::parse(field("mode")?)
            .ok_or_else(|| DictError::Parse(format!("unknown mode `{}`", fields["mode"])))?;
        let n = number("N")?;
        let m = number("M")?;
        let log_threshold = field("log_threshold")?
            .parse::<f64>()
            .map_err(|e| DictError::Parse(format!("field `log_threshold`: {e}")))?;
        let scheme = MarkerScheme::from_text(field("marker")?)?;
        if scheme.m != m {
            return Err(DictError::Parse(format!("marker M={} disagrees with M={m}", scheme.m)));
        }
        let section = |name: &str| {
            sections
                .get(name)
                .ok_or_else(|| DictError::Parse(format!("missing [{name}] section")))
        };
        let source = MarkovMeasure::from_text(section("source")?)?;
        let target = Sft::from_text(section("target")?)?;
        let pairs = match mode {
            DictMode::Enumerative => None,
            DictMode::Hall => Some(parse_pairs(section("pairs")?)?),
        };
        let relation = pairs.map(|pairs| {
            let (boys, girls): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
            let diagonal: Vec<(usize, usize)> = (0..boys.len()).map(|i| (i, i)).collect();
            Relation::from_pairs(boys, girls, &diagonal)
        });
        let book = CodeBook::build(
            source,
            target,
            scheme,
            n,
            log_threshold,
            mode,
            relation.as_ref().map(|r| (r, 1)),
        )?;
        for (key, have) in [("boys", book.dict.boys.count()), ("girls", book.dict.girls.count())] {
            if field(key)? != have.to_string() {
                return Err(DictError::Parse(format!(
                    "recorded {key}={} but the rebuilt set has {have}",
                    field(key)?
                )));
            }
        }
        Ok(book)
    }
}

type WordPairs = Vec<(Vec<u8>, Vec<u8>)>;

fn parse_pairs(body: &str) -> Result<WordPairs, DictError> {
    body.lines()
        .map(|line| {
            let (b, g) = line
                .split_once("->")
                .ok_or_else(|| DictError::Parse(format!("expected `B -> G`, got `{line}`")))?;
            let word = |s: &str| {
                digits_to_symbols(s.trim()).map_err(|e| DictError::Parse(e.to_string()))
            };
            Ok((word(b)?, word(g)?))
        })
        .collect()
}

/// Exact truth values of the four counting bounds a dictionary must meet.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundsReport {
    pub log_girls: f64,
    pub log_boys: f64,
    pub boy_mass: f64,
    /// `ln(1/2) + N(h_target − Δ)`.
    pub girls_floor: f64,
    /// `N(h_source + Δ)`.
    pub boys_ceiling: f64,
    /// `1 − 15δ`.
    pub mass_floor: f64,
    /// `N(h_target − h_source − 2Δ)`.
    pub ratio_floor: f64,
    pub girls_ok: bool,
    pub boys_ok: bool,
    pub mass_ok: bool,
    pub ratio_ok: bool,
}

impl BoundsReport {
    pub fn all_ok(&self) -> bool {
        self.girls_ok && self.boys_ok && self.mass_ok && self.ratio_ok
    }
}

impl fmt::Display for BoundsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "log_girls={}", self.log_girls)?;
        writeln!(f, "log_boys={}", self.log_boys)?;
        writeln!(f, "boy_mass={}", self.boy_mass)?;
        writeln!(f, "girls_floor={}", self.girls_floor)?;
        writeln!(f, "boys_ceiling={}", self.boys_ceiling)?;
        writeln!(f, "mass_floor={}", self.mass_floor)?;
        writeln!(f, "ratio_floor={}", self.ratio_floor)?;
        writeln!(f, "girls_ok={}", self.girls_ok)?;
        writeln!(f, "boys_ok={}", self.boys_ok)?;
        writeln!(f, "mass_ok={}", self.mass_ok)?;
        writeln!(f, "ratio_ok={}", self.ratio_ok)
    }
}

/// Compares exact counts with the thresholds implied by the pack.
pub fn verify_dictionary_bounds(
    boys: &BoySet,
    girls: &GirlSet,
    pack: &ParameterPack,
    h_source: f64,
    h_target: f64,
) -> BoundsReport {
    let n = pack.n as f64;
    let margin = pack.entropy_margin;
    let log_girls = ln_biguint(girls.count());
    let log_boys = ln_biguint(boys.count());
    let boy_mass = boys.mass();
    let girls_floor = 0.5f64.ln() + n * (h_target - margin);
    let boys_ceiling = n * (h_source + margin);
    let mass_floor = 1.0 - 15.0 * pack.delta;
    let ratio_floor = n * (h_target - h_source - 2.0 * margin);
    BoundsReport {
        log_girls,
        log_boys,
        boy_mass,
        girls_floor,
        boys_ceiling,
        mass_floor,
        ratio_floor,
        girls_ok: log_girls > girls_floor,
        boys_ok: log_boys <= boys_ceiling,
        mass_ok: boy_mass > mass_floor,
        ratio_ok: log_girls - log_boys >= ratio_floor,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dict::{choose_parameters, Mode, Overrides, ParameterInputs};
    use crate::shiftspace::{build_sft, full_shift, Word};
    use num_bigint::BigUint;
    use std::collections::HashSet;

    fn all_boys(n: usize) -> BoySet {
        BoySet::new(&MarkovMeasure::uniform(2), n, -(n as f64) * 2f64.ln() - 1.0).unwrap()
    }

    #[test]
    fn lex_embedding_prefixes_zero() {
        let girls = GirlSet::new(&full_shift(2), 4, None).unwrap();
        let d = dictionary(all_boys(3), girls, DictMode::Enumerative, None).unwrap();
        for code in 0..8u8 {
            let b = vec![(code >> 2) & 1, (code >> 1) & 1, code & 1];
            let g = d.encode_block(&b).unwrap().unwrap();
            assert_eq!(g, [vec![0], b.clone()].concat());
            assert_eq!(d.decode_window(&g).unwrap(), Some(b));
        }
        assert_eq!(d.decode_window(&[1, 0, 0, 0]).unwrap(), None);
    }

    #[test]
    fn capacity_failure_reports_counts() {
        let girls = GirlSet::new(&full_shift(2), 3, None).unwrap();
        match dictionary(all_boys(4), girls, DictMode::Enumerative, None) {
            Err(DictError::Capacity { boys, girls, log_ratio }) => {
                assert_eq!(boys, BigUint::from(16u32));
                assert_eq!(girls, BigUint::from(8u32));
                assert!((log_ratio + 2f64.ln()).abs() < 1e-12);
            }
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn golden_mean_girls_hold_eight_boys() {
        let golden = build_sft(2, &[Word::from_digits("11").unwrap()]).unwrap();
        let girls = GirlSet::new(&golden, 5, None).unwrap();
        assert_eq!(*girls.count(), BigUint::from(13u32));
        let d = dictionary(all_boys(3), girls, DictMode::Enumerative, None).unwrap();
        let boys = d.boys().members(100).unwrap();
        let images: HashSet<Vec<u8>> =
            boys.iter().map(|b| d.encode_block(b).unwrap().unwrap()).collect();
        assert_eq!(images.len(), boys.len());
        for b in &boys {
            let g = d.encode_block(b).unwrap().unwrap();
            assert!(golden.is_admissible(&g));
            assert_eq!(d.decode_window(&g).unwrap().as_ref(), Some(b));
        }
    }

    fn complete_relation(boys: &BoySet, girls: &GirlSet) -> Relation {
        let b = boys.members(1000).unwrap();
        let g = girls.members(1000).unwrap().unwrap();
        let pairs: Vec<(usize, usize)> =
            (0..b.len()).flat_map(|i| (0..g.len()).map(move |j| (i, j))).collect();
        Relation::from_pairs(b, g, &pairs)
    }

    #[test]
    fn hall_dictionary_is_injective_inside_the_relation() {
        let boys = all_boys(2);
        let girls = GirlSet::new(&full_shift(2), 2, None).unwrap();
        let rel = complete_relation(&boys, &girls);
        let d = dictionary(boys, girls, DictMode::Hall, Some((&rel, 4))).unwrap();
        let pairs = d.pairs().unwrap();
        assert_eq!(pairs.len(), 4);
        let images: HashSet<&Vec<u8>> = pairs.iter().map(|(_, g)| g).collect();
        assert_eq!(images.len(), 4);
        for (b, g) in pairs {
            assert_eq!(d.encode_block(b).unwrap().as_ref(), Some(g));
            assert_eq!(d.decode_window(g).unwrap().as_ref(), Some(b));
        }
    }

    #[test]
    fn hall_decoding_falls_back_to_nearest_image() {
        let boys = all_boys(1);
        let girls = GirlSet::new(&full_shift(2), 3, None).unwrap();
        let rel = Relation::from_pairs(
            boys.members(10).unwrap(),
            girls.members(10).unwrap().unwrap(),
            &[(0, 0), (1, 7)],
        );
        let d = dictionary(boys, girls, DictMode::Hall, Some((&rel, 1))).unwrap();
        assert_eq!(d.decode_window(&[0, 0, 1]).unwrap(), Some(vec![0]));
        assert_eq!(d.decode_window(&[1, 1, 0]).unwrap(), Some(vec![1]));
        assert_eq!(d.decode_window(&[0, 1]).unwrap(), None);
    }

    fn scheme() -> MarkerScheme {
        MarkerScheme::new(vec![1, 1, 1, 0, 1, 0, 0, 0], 1, 0.5).unwrap()
    }

    #[test]
    fn codebook_text_roundtrip_enumerative() {
        let source = MarkovMeasure::bernoulli_binary(0.3).unwrap();
        let book = CodeBook::build(
            source,
            full_shift(3),
            scheme(),
            16,
            -7.0,
            DictMode::Enumerative,
            None,
        )
        .unwrap();
        let text = book.to_text();
        let back = CodeBook::from_text(&text).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(*back.dict.boys().count(), BigUint::from(17u32));
        assert_eq!(*back.dict.girls().count(), BigUint::from(99u32));
    }

    #[test]
    fn codebook_text_roundtrip_hall() {
        let source = MarkovMeasure::bernoulli_binary(0.1).unwrap();
        let boys = BoySet::new(&source, 14, -4.5).unwrap();
        let girls = GirlSet::for_blocks(&full_shift(3), 14, &scheme()).unwrap();
        assert_eq!(*boys.count(), BigUint::from(15u32));
        assert_eq!(*girls.count(), BigUint::from(17u32));
        let b = boys.members(100).unwrap();
        let g = girls.members(100).unwrap().unwrap();
        let diagonal: Vec<(usize, usize)> = (0..b.len()).map(|i| (i, i + 2)).collect();
        let rel = Relation::from_pairs(b, g, &diagonal);
        let book = CodeBook::build(
            source,
            full_shift(3),
            scheme(),
            14,
            -4.5,
            DictMode::Hall,
            Some((&rel, 1)),
        )
        .unwrap();
        let text = book.to_text();
        assert!(text.contains("[pairs]"));
        let back = CodeBook::from_text(&text).unwrap();
        assert_eq!(back.to_text(), text);
        assert!(CodeBook::from_text(&text.replace("boys=", "boys=1")).is_err());
        assert!(CodeBook::from_text("not a dictionary").is_err());
    }

    fn practical_pack(
        h_source: f64,
        h_target: f64,
        n: usize,
        m: usize,
        delta: Option<f64>,
    ) -> ParameterPack {
        let inputs = ParameterInputs {
            h_source,
            h_target,
            eps: 0.5,
            source_alphabet: 2,
            spec_gap: 0,
            target: None,
        };
        let ov = Overrides { n: Some(n), m: Some(m), delta, ..Overrides::default() };
        choose_parameters(&inputs, Mode::Practical, &ov).unwrap()
    }

    #[test]
    fn small_practical_pack_can_fail_the_mass_bound() {
        let hs = crate::estimators::binary_entropy(0.1).unwrap();
        let pack = practical_pack(hs, 2f64.ln(), 64, 2, Some(0.001));
        let mu = MarkovMeasure::bernoulli_binary(0.1).unwrap();
        let boys = BoySet::new(&mu, 64, pack.boy_log_threshold()).unwrap();
        let girls = GirlSet::new(&full_shift(2), pack.girl_len(), None).unwrap();
        let report = verify_dictionary_bounds(&boys, &girls, &pack, hs, 2f64.ln());
        assert!(!report.mass_ok, "mass {} vs floor {}", report.boy_mass, report.mass_floor);
        assert!(report.boys_ok);
        assert!(report.to_string().contains("mass_ok=false"));
    }

    #[test]
    fn ratio_floor_is_eight_margins_at_the_extreme() {
        let pack = practical_pack(0.2, 0.7, 64, 2, None);
        let boys = all_boys(64);
        let girls = GirlSet::new(&full_shift(2), pack.girl_len(), None).unwrap();
        let report = verify_dictionary_bounds(&boys, &girls, &pack, 0.2, 0.7);
        let expected = 8.0 * 64.0 * pack.entropy_margin;
        assert!((report.ratio_floor - expected).abs() < 1e-9);
    }
}
