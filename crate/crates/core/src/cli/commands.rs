use super::schema::report_schema_check;
use super::*;
use crate::bigmath::ln_biguint;
use crate::codec::{self, CodedFile};
use crate::dict::{
    build_relation, choose_parameters, estimate_conditions, verify_dictionary_bounds, window_radius,
    BoySet, CodeBook, DictMode, GirlSet, Mode, Overrides, ParameterInputs, ParameterPack,
};
use crate::markers::{find_marker, is_unbordered, MarkerScheme};
use crate::measures::{measure_entropy, sample_path, MarkovMeasure};
use crate::shiftspace::{specification_gap, topological_entropy, Sft, Word};
use crate::splicer::{skeleton_params, splice_entropy_boost, splice_full_support, Skeleton};
use crate::toral::{self, IntMatrix};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::{Display, Write as _};
use std::fs;

/// Accumulates `key=value` lines.
struct Report(String);

impl Report {
    fn new(command: &str) -> Self {
        let mut r = Report(String::new());
        r.kv("command", command);
        r
    }

    fn kv(&mut self, key: &str, value: impl Display) -> &mut Self {
        let _ = writeln!(self.0, "{key}={value}");
        self
    }

    /// Appends `key=value` lines from a module report, prefixing each key.
    fn lines(&mut self, prefix: &str, text: &str) -> &mut Self {
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let _ = writeln!(self.0, "{prefix}{line}");
        }
        self
    }

    fn finish(self) -> String {
        self.0
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    if !path.exists() {
        return Err(CliError::MissingFile { path: path.to_path_buf() });
    }
    fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), message: e.to_string() })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io { path: path.to_path_buf(), message: e.to_string() })
}

fn load_sft(path: &Path) -> Result<Sft, CliError> {
    Sft::from_text(&read(path)?).map_err(|e| CliError::parse(path, e))
}

fn load_measure(path: &Path) -> Result<MarkovMeasure, CliError> {
    MarkovMeasure::from_text(&read(path)?).map_err(|e| CliError::parse(path, e))
}

fn load_word(path: &Path) -> Result<Word, CliError> {
    let text = read(path)?;
    let digits: String = text
        .lines()
        .flat_map(|l| l.split('#').next().unwrap_or("").split_whitespace())
        .collect();
    Word::from_digits(&digits).map_err(|e| CliError::parse(path, e))
}

fn load_matrix(path: &Path) -> Result<IntMatrix, CliError> {
    IntMatrix::parse(&read(path)?).map_err(|e| CliError::parse(path, e))
}

fn target_measure(sft: &Sft, path: Option<&PathBuf>) -> Result<MarkovMeasure, CliError> {
    match path {
        Some(p) => load_measure(p),
        None => MarkovMeasure::max_entropy(sft).map_err(|e| CliError::domain("measures", e)),
    }
}

fn digits(symbols: &[u8]) -> String {
    Word::new(symbols.to_vec()).to_digits()
}

struct Instance {
    source: MarkovMeasure,
    sft: Sft,
    target: MarkovMeasure,
    h_source: f64,
    h_target: f64,
    pack: ParameterPack,
}

impl InstanceArgs {
    fn load(&self) -> Result<Instance, CliError> {
        let source = load_measure(&self.source)?;
        let sft = load_sft(&self.sft)?;
        let target = target_measure(&sft, self.target_measure.as_ref())?;
        if !target.supported_on(&sft) {
            return Err(CliError::domain("measures", "target measure charges words outside the target shift"));
        }
        let h_source = measure_entropy(&source);
        let h_target = measure_entropy(&target);
        let spec_gap = specification_gap(&sft).map_err(|e| CliError::domain("shiftspace", e))?;
        let inputs = ParameterInputs {
            h_source,
            h_target,
            eps: self.eps,
            source_alphabet: source.alphabet_size(),
            spec_gap,
            target: Some(target.clone()),
        };
        let mode = match self.mode {
            ModeArg::Strict => Mode::Strict,
            ModeArg::Practical => Mode::Practical,
        };
        let overrides = Overrides { n: self.n, m: self.m, delta: self.delta, alpha: self.alpha };
        let pack = choose_parameters(&inputs, mode, &overrides).map_err(|e| CliError::domain("dict", e))?;
        Ok(Instance { source, sft, target, h_source, h_target, pack })
    }
}

fn load_book(path: &Path, inst: &Instance) -> Result<CodeBook, CliError> {
    let book = CodeBook::from_text(&read(path)?).map_err(|e| CliError::parse(path, e))?;
    if book.target != inst.sft {
        return Err(CliError::domain("dict", "dictionary target shift differs from --sft"));
    }
    Ok(book)
}

pub(super) fn entropy(a: &EntropyArgs) -> Result<String, CliError> {
    let sft = load_sft(&a.sft)?;
    let mut r = Report::new("entropy");
    r.kv("alphabet", sft.alphabet_size())
        .kv("memory", sft.memory())
        .kv("states", sft.num_states())
        .kv("h_top", topological_entropy(&sft));
    if let Some(p) = &a.measure {
        let mu = load_measure(p)?;
        r.kv("h_measure", measure_entropy(&mu)).kv("measure_supported", mu.supported_on(&sft));
    }
    Ok(r.finish())
}

pub(super) fn gap(a: &GapArgs) -> Result<String, CliError> {
    let sft = load_sft(&a.sft)?;
    let gap = specification_gap(&sft).map_err(|e| CliError::domain("shiftspace", e))?;
    let mut r = Report::new("gap");
    r.kv("spec_gap", gap);
    if let Some(eps) = a.eps {
        if !(eps > 0.0) {
            return Err(CliError::Usage(format!("--eps must be positive, got {eps}")));
        }
        let t = window_radius(eps);
        r.kv("eps", eps).kv("window_radius", t).kv("shadow_gap", gap + 2 * t);
    }
    Ok(r.finish())
}

pub(super) fn marker(a: &MarkerArgs) -> Result<String, CliError> {
    let sft = load_sft(&a.sft)?;
    let nu = target_measure(&sft, a.measure.as_ref())?;
    let scheme = find_marker(&sft, &nu, a.m, a.alpha, a.budget, a.seed).map_err(|e| CliError::domain("markers", e))?;
    if let Some(out) = &a.out {
        write(out, &format!("{}\n", scheme.to_text()))?;
    }
    let mut r = Report::new("marker");
    r.kv("marker", digits(&scheme.word))
        .kv("M", scheme.m)
        .kv("alpha", scheme.alpha)
        .kv("head_mass", scheme.head_mass.unwrap_or(f64::NAN))
        .kv("tail_mass", scheme.tail_mass.unwrap_or(f64::NAN))
        .kv("masses_ok", scheme.masses_ok())
        .kv("self_distinguishing", scheme.is_self_distinguishing())
        .kv("unbordered", is_unbordered(&scheme.word))
        .kv("admissible", sft.is_admissible(&scheme.word));
    Ok(r.finish())
}

pub(super) fn params(a: &ParamsArgs) -> Result<String, CliError> {
    let inst = a.instance.load()?;
    let mut r = Report::new("params");
    r.lines("", &inst.pack.to_text());
    if a.samples > 0 {
        let seed = a.seed.ok_or_else(|| CliError::Usage("--samples needs --seed".into()))?;
        for item in estimate_conditions(&inst.pack, &inst.source, &inst.target, a.samples, seed) {
            r.kv(&format!("estimate.{}", item.key), format!("{} {}", item.verdict.name(), item.detail));
        }
    }
    Ok(r.finish())
}

/// Independent seeds for paired samples, drawn from one master seed.
fn derived_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random()).collect()
}

fn product_samples(source: &MarkovMeasure, target: &MarkovMeasure, len: usize, count: usize, seed: u64) -> Vec<(Vec<u8>, Vec<u8>)> {
    derived_seeds(seed, 2 * count)
        .chunks(2)
        .map(|s| (sample_path(source, len, s[0]).symbols, sample_path(target, len, s[1]).symbols))
        .collect()
}

pub(super) fn dict(a: &DictArgs) -> Result<String, CliError> {
    let inst = a.instance.load()?;
    let scheme = MarkerScheme::from_text(&read(&a.marker)?)
        .map_err(|e| CliError::parse(&a.marker, e))?
        .with_masses(&inst.target);
    let pack = &inst.pack;
    if scheme.m != pack.m {
        return Err(CliError::domain("dict", format!("marker has M={} but the pack has M={}", scheme.m, pack.m)));
    }
    let dict_err = |e| CliError::domain("dict", e);
    let mut r = Report::new("dict");
    let book = match a.dict_mode {
        DictModeArg::Enumerative => CodeBook::build(
            inst.source.clone(),
            inst.sft.clone(),
            scheme,
            pack.n,
            pack.boy_log_threshold(),
            DictMode::Enumerative,
            None,
        )
        .map_err(dict_err)?,
        DictModeArg::Hall => {
            let boys = BoySet::new(&inst.source, pack.n, pack.boy_log_threshold()).map_err(dict_err)?;
            let girls = GirlSet::for_blocks(&inst.sft, pack.n, &scheme).map_err(dict_err)?;
            let samples = product_samples(&inst.source, &inst.target, pack.n, a.samples, a.seed);
            let relation = build_relation(&boys, &girls, &samples, pack).map_err(dict_err)?;
            let k = a.k.unwrap_or_else(|| {
                let mut degree = std::collections::HashMap::new();
                for edges in &relation.edges {
                    for (g, _) in edges {
                        *degree.entry(g).or_insert(0usize) += 1;
                    }
                }
                degree.values().copied().max().unwrap_or(1)
            });
            r.kv("relation_edges", relation.edge_count()).kv("k", k);
            CodeBook::build(
                inst.source.clone(),
                inst.sft.clone(),
                scheme,
                pack.n,
                pack.boy_log_threshold(),
                DictMode::Hall,
                Some((&relation, k)),
            )
            .map_err(dict_err)?
        }
    };
    let text = book.to_text();
    write(&a.out, &text)?;
    let bounds = verify_dictionary_bounds(book.dict.boys(), book.dict.girls(), pack, inst.h_source, inst.h_target);
    r.kv("mode", book.dict.mode().name())
        .kv("N", pack.n)
        .kv("M", pack.m)
        .kv("boys", book.dict.boys().count())
        .kv("girls", book.dict.girls().count())
        .lines("bounds.", &bounds.to_string())
        .kv("dictionary_sha256", codec::sha256_hex(&text));
    Ok(r.finish())
}

fn source_word(a: &EncodeArgs, book: &CodeBook) -> Result<Vec<u8>, CliError> {
    match (&a.input, a.length) {
        (Some(p), _) => {
            let w = load_word(p)?;
            if let Some(&bad) = w.symbols.iter().find(|&&c| c as usize >= book.source.alphabet_size()) {
                return Err(CliError::parse(p, format!("symbol {bad} outside the source alphabet")));
            }
            Ok(w.symbols)
        }
        (None, Some(len)) => Ok(sample_path(&book.source, len, a.seed).symbols),
        (None, None) => Err(CliError::Usage("need --input or --length".into())),
    }
}

/// Seed for the block parse and flags; distinct from the sampling seed.
fn coding_seed(seed: u64) -> u64 {
    seed.wrapping_add(1)
}

pub(super) fn encode(a: &EncodeArgs) -> Result<String, CliError> {
    let inst = a.instance.load()?;
    let book = load_book(&a.dict, &inst)?;
    let x = source_word(a, &book)?;
    let pair = codec::encode(&x, &book, &inst.pack, coding_seed(a.seed)).map_err(|e| CliError::domain("codec", e))?;
    let file = CodedFile::new(&pair, &book, &inst.pack);
    write(&a.out, &file.to_text())?;
    if let Some(csv) = &a.csv {
        write(csv, &codec::block_csv(&pair, &book, None))?;
    }
    let covered = pair.coverage.iter().filter(|&&c| c).count();
    let mut r = Report::new("encode");
    r.kv("length", x.len())
        .kv("N", inst.pack.n)
        .kv("M", inst.pack.m)
        .kv("delta", inst.pack.delta)
        .kv("blocks", pair.parse.blocks.len())
        .kv("error_blocks", pair.parse.error_count())
        .kv("coverage", covered as f64 / x.len().max(1) as f64)
        .kv("admissible", book.target.is_admissible(&pair.y))
        .kv("y_sha256", codec::sha256_hex(&digits(&pair.y)));
    Ok(r.finish())
}

pub(super) fn decode(a: &DecodeArgs) -> Result<String, CliError> {
    let inst = a.instance.load()?;
    let book = load_book(&a.dict, &inst)?;
    let coded = CodedFile::from_text(&read(&a.coded)?).map_err(|e| CliError::parse(&a.coded, e))?;
    coded.check(&book, &inst.pack).map_err(|e| CliError::domain("codec", e))?;
    let dec = codec::decode(&coded.y, &book, &inst.pack).map_err(|e| CliError::domain("codec", e))?;
    if let Some(out) = &a.out {
        let text: String = dec
            .x_hat
            .iter()
            .zip(&dec.mask)
            .map(|(&c, &known)| if known { char::from_digit(u32::from(c), 36).unwrap_or('?') } else { '.' })
            .collect();
        write(out, &format!("{text}\n"))?;
    }
    if let Some(csv) = &a.csv {
        let mut text = String::from("start,decoded\n");
        for (s, ok) in &dec.blocks {
            let _ = writeln!(text, "{s},{ok}");
        }
        write(csv, &text)?;
    }
    let mut r = Report::new("decode");
    r.kv("length", coded.y.len())
        .kv("markers", dec.blocks.len())
        .kv("decoded_blocks", dec.blocks.iter().filter(|b| b.1).count())
        .kv("recovered", dec.recovered())
        .kv("recovered_fraction", dec.recovered() as f64 / coded.y.len().max(1) as f64);
    Ok(r.finish())
}

pub(super) fn verify(a: &VerifyArgs) -> Result<String, CliError> {
    let inst = a.instance.load()?;
    let book = load_book(&a.dict, &inst)?;
    let pack = &inst.pack;
    let codec_err = |e| CliError::domain("codec", e);
    let x = sample_path(&book.source, a.length, a.seed).symbols;
    let pair = codec::encode(&x, &book, pack, coding_seed(a.seed)).map_err(codec_err)?;
    let dec = codec::decode(&pair.y, &book, pack).map_err(codec_err)?;
    let roundtrip = dec.mask == pair.coverage
        && dec.mask.iter().enumerate().all(|(i, &k)| !k || dec.x_hat[i] == x[i]);
    let covered = pair.coverage.iter().filter(|&&c| c).count();
    let badset = codec::audit_badset(&pair, &book, pack, a.slack);
    let refs = product_samples(&inst.source, &inst.target, a.length, a.references, a.seed.wrapping_add(2));
    let weakstar = codec::audit_weakstar(&pair, &refs, a.kmax).map_err(codec_err)?;
    let bounds = verify_dictionary_bounds(book.dict.boys(), book.dict.girls(), pack, inst.h_source, inst.h_target);
    let counts = (ln_biguint(book.dict.boys().count()), ln_biguint(book.dict.girls().count()));
    let ent = codec::audit_entropy(&pair, &book, pack, inst.h_source, counts);
    if let Some(csv) = &a.csv {
        write(csv, &codec::block_csv(&pair, &book, Some(&dec)))?;
    }
    let mut r = Report::new("verify");
    r.kv("length", a.length)
        .kv("N", pack.n)
        .kv("M", pack.m)
        .kv("coverage", covered as f64 / a.length.max(1) as f64)
        .kv("recovered", dec.recovered())
        .kv("roundtrip", roundtrip)
        .kv("admissible", book.target.is_admissible(&pair.y))
        .kv("badset", badset.total)
        .lines("", &badset.to_string())
        .kv("weakstar", weakstar)
        .lines("", &ent.to_string())
        .lines("bounds.", &bounds.to_string())
        .kv("ratio_ok", bounds.ratio_ok);
    Ok(r.finish())
}

pub(super) fn splice(a: &SpliceArgs) -> Result<String, CliError> {
    let sft = load_sft(&a.sft)?;
    let y1 = load_word(&a.y1)?;
    let err = |e| CliError::domain("splicer", e);
    let mut r = Report::new("splice");
    let out = match a.kind {
        SpliceKindArg::Boost => {
            let y2_path = a.y2.as_ref().ok_or_else(|| CliError::Usage("boost splicing needs --y2".into()))?;
            let y2 = load_word(y2_path)?;
            let (eps, gamma) = match (a.eps, a.gamma) {
                (Some(e), Some(g)) => (e, g),
                _ => return Err(CliError::Usage("boost splicing needs --eps and --gamma".into())),
            };
            let params = skeleton_params(eps, gamma, a.n).map_err(err)?;
            let block = params.k1 + 1 + 2 * params.k0 + params.k2;
            let available = y1.len().min(y2.len());
            if available <= block {
                return Err(CliError::domain("splicer", format!("points of length {available} are shorter than one block ({block})")));
            }
            let skeleton = Skeleton::sample(params.kind(), available - block, a.seed).map_err(err)?;
            r.kv("kind", "boost")
                .kv("k0", params.k0)
                .kv("k1", params.k1)
                .kv("k2", params.k2)
                .kv("copy_ratio", params.copy_ratio)
                .kv("boost_ratio", params.boost_ratio)
                .kv("skeleton_blocks", skeleton.long_blocks.len());
            splice_entropy_boost(&sft, &y1, &y2, &skeleton).map_err(err)?
        }
        SpliceKindArg::FullSupport => {
            let t_path = a
                .target_word
                .as_ref()
                .ok_or_else(|| CliError::Usage("full-support splicing needs --target-word".into()))?;
            let target = load_word(t_path)?;
            let m = a.m.ok_or_else(|| CliError::Usage("full-support splicing needs --m".into()))?;
            r.kv("kind", "full-support").kv("M", m);
            splice_full_support(&sft, &y1, &target, a.n, m, a.seed).map_err(err)?
        }
    };
    let agree = out.symbols.iter().zip(&y1.symbols).filter(|(a, b)| a == b).count();
    r.kv("N", a.n)
        .kv("length", out.len())
        .kv("admissible", sft.is_admissible(&out.symbols))
        .kv("agreement_y1", agree as f64 / out.len().max(1) as f64)
        .kv("word_sha256", codec::sha256_hex(&out.to_digits()));
    if let Some(path) = &a.out {
        write(path, &format!("{}\n", out.to_digits()))?;
    }
    Ok(r.finish())
}

fn matrix_text(m: &IntMatrix) -> String {
    if m.dim() == 0 {
        return "empty".into();
    }
    m.rows()
        .iter()
        .map(|row| row.iter().map(BigInt::to_string).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join(";")
}

pub(super) fn toral(a: &ToralArgs) -> Result<String, CliError> {
    let err = |e| CliError::domain("toral", e);
    match &a.action {
        ToralAction::Classify { matrix } => {
            let m = load_matrix(matrix)?;
            let c = toral::classify(&m).map_err(err)?;
            let factors = if c.split.factors.is_empty() {
                "none".to_string()
            } else {
                c.split
                    .factors
                    .iter()
                    .map(|f| format!("{}^{}", f.order, f.multiplicity))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let mut r = Report::new("toral.classify");
            r.kv("dim", m.dim())
                .kv("det", m.det())
                .kv("charpoly", &c.charpoly)
                .kv("minpoly", &c.minpoly)
                .kv("cyclotomic_part", &c.split.g)
                .kv("cyclotomic_factors", factors)
                .kv("noncyclotomic_part", &c.split.h)
                .kv("unit_circle_roots", c.unit_circle_roots)
                .kv("quasi_hyperbolic", c.split.g.is_one())
                .kv("class", c.class);
            Ok(r.finish())
        }
        ToralAction::Entropy { matrix, tol } => {
            let m = load_matrix(matrix)?;
            let h = toral::toral_entropy(&m, *tol).map_err(err)?;
            let check = toral::eigen_entropy(&m);
            let allowed = toral::eigen_entropy_tolerance(&m).max(10.0 * tol.max(1e-9));
            let mut r = Report::new("toral.entropy");
            r.kv("dim", m.dim())
                .kv("charpoly", m.charpoly())
                .kv("tol", tol)
                .kv("entropy", h)
                .kv("eigen_entropy", check)
                .kv("cross_check_tol", allowed)
                .kv("cross_check_ok", (h - check).abs() <= allowed);
            Ok(r.finish())
        }
        ToralAction::Split { matrix } => {
            let m = load_matrix(matrix)?;
            let s = toral::split_action(&m).map_err(err)?;
            let basis = s
                .basis
                .iter()
                .map(|row| row.iter().map(BigInt::to_string).collect::<Vec<_>>().join(" "))
                .collect::<Vec<_>>()
                .join(";");
            let mut r = Report::new("toral.split");
            r.kv("dim", m.dim())
                .kv("quasi_hyperbolic_factor", &s.first_factor)
                .kv("cyclotomic_factor", &s.second_factor)
                .kv("quasi_hyperbolic_dim", s.first.dim())
                .kv("quasi_hyperbolic_matrix", matrix_text(&s.first))
                .kv("cyclotomic_dim", s.second.dim())
                .kv("cyclotomic_matrix", matrix_text(&s.second))
                .kv("basis", basis)
                .kv("index", &s.index);
            Ok(r.finish())
        }
    }
}

pub(super) fn halmos(a: &HalmosArgs) -> Result<String, CliError> {
    let g = toral::halmos_group(a.n, a.m).map_err(|e| CliError::domain("toral", e))?;
    let invariants = if g.invariants.is_empty() {
        "none".to_string()
    } else {
        g.invariants.iter().map(BigInt::to_string).collect::<Vec<_>>().join(" ")
    };
    let mut r = Report::new("halmos");
    r.kv("n", g.n)
        .kv("m", g.m)
        .kv("cyclotomic", toral::cyclotomic(g.n))
        .kv("torus_rank", g.torus_rank)
        .kv("invariants", invariants)
        .kv("constant_order", &g.constant_order)
        .kv("member", g.member);
    Ok(r.finish())
}

pub(super) fn check_report(a: &CheckReportArgs) -> Result<String, CliError> {
    let text = read(&a.file)?;
    let mut r = Report::new("check-report");
    match report_schema_check(&text) {
        Ok(()) => {
            r.kv("valid", true);
        }
        Err(v) => {
            r.kv("valid", false).kv("line", v.line).kv("reason", &v.reason);
        }
    }
    Ok(r.finish())
}
