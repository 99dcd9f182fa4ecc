//! Parameter selection for the block code and its inequality checklist.

use super::DictError;
use crate::estimators::{weakstar_surrogate, BlockDistribution};
use crate::measures::{log_cylinder_probability, sample_with, MarkovMeasure};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

/// Multiplier applied to strict upper bounds so chosen values satisfy them strictly.
pub const STRICT_SLACK: f64 = 0.999;
/// Largest block length the strict search will consider.
pub const MAX_BLOCK_LENGTH: usize = 1_000_000_000;
const FLOOR_GUARD: f64 = 1e-9;
/// Two-sided normal quantile for 0.99 confidence.
const WILSON_Z: f64 = 2.575_829_303_548_901;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Strict,
    Practical,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Strict => "strict",
            Mode::Practical => "practical",
        }
    }

    pub fn parse(text: &str) -> Option<Mode> {
        match text {
            "strict" => Some(Mode::Strict),
            "practical" => Some(Mode::Practical),
            _ => None,
        }
    }
}

/// Instance data the parameter choice depends on.
#[derive(Clone, Debug)]
pub struct ParameterInputs {
    pub h_source: f64,
    pub h_target: f64,
    pub eps: f64,
    /// Size of the source generating partition (its alphabet).
    pub source_alphabet: usize,
    /// Specification gap of the target shift.
    pub spec_gap: usize,
    /// Target measure, needed for the marker-mass condition.
    pub target: Option<MarkovMeasure>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub delta: Option<f64>,
    pub alpha: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    fn of(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// One inequality of the checklist with its verdict and the numbers behind it.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckItem {
    pub key: &'static str,
    pub statement: &'static str,
    pub verdict: Verdict,
    pub detail: String,
}

/// The chosen constants and the checklist they were evaluated against.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterPack {
    pub mode: Mode,
    pub h_source: f64,
    pub h_target: f64,
    /// Upper bound used for the joint entropy: `h_source + h_target`.
    pub h_joint_bound: f64,
    pub eps: f64,
    /// Entropy margin `(h_target − h_source) / 10`.
    pub entropy_margin: f64,
    /// Error-set density.
    pub delta: f64,
    /// Per-constraint upper bounds on `delta`, keyed by constraint name.
    pub delta_bounds: BTreeMap<&'static str, f64>,
    /// Name of the constraint that binds `delta` in strict mode.
    pub binding: &'static str,
    pub eta: f64,
    pub r_radius: f64,
    pub ell: usize,
    pub alpha: f64,
    pub m: usize,
    pub n: usize,
    pub spec_gap: usize,
    pub checklist: Vec<CheckItem>,
}

/// Symbol radius `t` such that closeness below `eps` means agreement on `[−t, t]`.
pub fn window_radius(eps: f64) -> usize {
    if eps >= 1.0 {
        0
    } else {
        (1.0 / eps).log2().floor() as usize
    }
}

/// Upper root of `60x² − 64x + 1`, the largest `x` with `4(1−x)(1−15x) ≥ 3`.
fn block_mass_bound() -> f64 {
    (64.0 - (64.0f64 * 64.0 - 240.0).sqrt()) / 120.0
}

impl ParameterPack {
    /// Gap needed between shadowed segments: `L + 2·t_r`.
    pub fn shadow_gap(&self) -> usize {
        self.spec_gap + 2 * window_radius(self.r_radius)
    }

    /// Girl word length `N − 11M`.
    pub fn girl_len(&self) -> usize {
        self.n.saturating_sub(11 * self.m)
    }

    /// Log threshold for boys: `−N(h_source + Δ)`.
    pub fn boy_log_threshold(&self) -> f64 {
        -(self.n as f64) * (self.h_source + self.entropy_margin)
    }

    pub fn item(&self, key: &str) -> Option<&CheckItem> {
        self.checklist.iter().find(|c| c.key == key)
    }

    /// Key=value report, one entry per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "mode={}", self.mode.name());
        let _ = writeln!(out, "h_source={:.10}", self.h_source);
        let _ = writeln!(out, "h_target={:.10}", self.h_target);
        let _ = writeln!(out, "h_joint_bound={:.10}", self.h_joint_bound);
        let _ = writeln!(out, "eps={}", self.eps);
        let _ = writeln!(out, "entropy_margin={:.10}", self.entropy_margin);
        for (k, v) in &self.delta_bounds {
            let _ = writeln!(out, "delta_bound.{k}={v:.10e}");
        }
        let _ = writeln!(out, "binding={}", self.binding);
        let _ = writeln!(out, "delta={:.10e}", self.delta);
        let _ = writeln!(out, "eta={:.10}", self.eta);
        let _ = writeln!(out, "r={:.10}", self.r_radius);
        let _ = writeln!(out, "ell={}", self.ell);
        let _ = writeln!(out, "alpha={:.10e}", self.alpha);
        let _ = writeln!(out, "spec_gap={}", self.spec_gap);
        let _ = writeln!(out, "shadow_gap={}", self.shadow_gap());
        let _ = writeln!(out, "M={}", self.m);
        let _ = writeln!(out, "N={}", self.n);
        for c in &self.checklist {
            let _ = writeln!(out, "check.{}={} {}", c.key, c.verdict.name(), c.detail);
        }
        out
    }
}

impl fmt::Display for ParameterPack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Least log-mass of a positive-mass word of each length `1..=len`.
fn min_log_masses(measure: &MarkovMeasure, len: usize) -> Vec<f64> {
    let a = measure.alphabet_size();
    let pi = measure.stationary();
    let p = measure.transition();
    let mut cur: Vec<f64> = (0..a)
        .map(|c| if pi[c] > 0.0 { pi[c].ln() } else { f64::INFINITY })
        .collect();
    let mut out = Vec::with_capacity(len);
    for step in 0..len {
        if step > 0 {
            cur = (0..a)
                .map(|d| {
                    (0..a)
                        .filter(|&c| p[c][d] > 0.0)
                        .map(|c| cur[c] + p[c][d].ln())
                        .fold(f64::INFINITY, f64::min)
                })
                .collect();
        }
        out.push(cur.iter().cloned().fold(f64::INFINITY, f64::min));
    }
    out
}

struct Constants {
    entropy_margin: f64,
    h_joint_bound: f64,
    bounds: BTreeMap<&'static str, f64>,
    binding: &'static str,
    eta: f64,
    r_radius: f64,
    ell: usize,
}

fn constants(inputs: &ParameterInputs) -> Result<Constants, DictError> {
    let ParameterInputs {
        h_source,
        h_target,
        eps,
        ..
    } = *inputs;
    if !(h_source > 0.0 && h_target > h_source) {
        return Err(DictError::Precondition(format!(
            "need h_target > h_source > 0 (h_source={h_source}, h_target={h_target})"
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(DictError::Precondition(format!("need 0 < eps < 1, got {eps}")));
    }
    if inputs.source_alphabet < 2 {
        return Err(DictError::Precondition("source alphabet must have at least 2 symbols".into()));
    }
    let entropy_margin = (h_target - h_source) / 10.0;
    let h_joint_bound = h_source + h_target;
    let mut bounds = BTreeMap::new();
    bounds.insert("entropy_cap", entropy_margin / (1.0 + h_joint_bound));
    bounds.insert(
        "partition_cap",
        eps * entropy_margin / (16.0 * (1.0 + (inputs.source_alphabet as f64).ln())),
    );
    bounds.insert("block_mass", block_mass_bound());
    bounds.insert("eps_cap", eps / 80.0);
    let binding = bounds
        .iter()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| *k)
        .expect("bounds are non-empty");
    let eta = STRICT_SLACK * eps / 12.0;
    let r_radius = STRICT_SLACK * eta / 10.0;
    let ell = (10.0 / eta).floor() as usize + 1;
    Ok(Constants {
        entropy_margin,
        h_joint_bound,
        bounds,
        binding,
        eta,
        r_radius,
        ell,
    })
}

fn m_from_n(delta: f64, n: usize) -> usize {
    (delta * n as f64 / 11.0 + FLOOR_GUARD).floor() as usize
}

/// Chooses the constants. Strict mode derives `δ` from its four caps and the
/// least block length meeting every decidable item; practical mode takes `N`
/// and `M` as given and only records the checklist.
pub fn choose_parameters(
    inputs: &ParameterInputs,
    mode: Mode,
    overrides: &Overrides,
) -> Result<ParameterPack, DictError> {
    let c = constants(inputs)?;
    let strict_delta = STRICT_SLACK * c.bounds[c.binding];
    let (delta, m, n, alpha) = match mode {
        Mode::Strict => {
            let delta = match overrides.delta {
                Some(d) if d > 0.0 && d < c.bounds[c.binding] => d,
                Some(d) => {
                    return Err(DictError::Infeasible {
                        binding: c.binding.to_string(),
                        detail: format!("delta override {d} violates {} < {}", c.binding, c.bounds[c.binding]),
                    })
                }
                None => strict_delta,
            };
            let (m, n) = strict_block_length(inputs, &c, delta, overrides.n)?;
            (delta, m, n, delta * delta / 22.0)
        }
        Mode::Practical => {
            let (Some(n), Some(m)) = (overrides.n, overrides.m) else {
                return Err(DictError::Precondition("practical mode needs N and M".into()));
            };
            if m == 0 || 11 * m >= n {
                return Err(DictError::Precondition(format!(
                    "need M >= 1 and N > 11M (N={n}, M={m})"
                )));
            }
            let delta = overrides.delta.unwrap_or(11.0 * m as f64 / n as f64);
            let alpha = overrides.alpha.unwrap_or(delta * delta / 22.0);
            (delta, m, n, alpha)
        }
    };
    let alpha = overrides.alpha.unwrap_or(alpha);
    let mut pack = ParameterPack {
        mode,
        h_source: inputs.h_source,
        h_target: inputs.h_target,
        h_joint_bound: c.h_joint_bound,
        eps: inputs.eps,
        entropy_margin: c.entropy_margin,
        delta,
        delta_bounds: c.bounds,
        binding: c.binding,
        eta: c.eta,
        r_radius: c.r_radius,
        ell: c.ell,
        alpha,
        m,
        n,
        spec_gap: inputs.spec_gap,
        checklist: Vec::new(),
    };
    pack.checklist = decidable_checklist(&pack, inputs.target.as_ref());
    Ok(pack)
}

/// Items on `M` alone: `2^{−M} < r`, `L_r < M` and the marker-mass condition.
fn m_items_hold(inputs: &ParameterInputs, c: &Constants, m: usize, alpha: f64, min_log: Option<f64>) -> [bool; 3] {
    let small = (m as f64) * -(2f64.ln()) < c.r_radius.ln();
    let gap = inputs.spec_gap + 2 * window_radius(c.r_radius) < m;
    let mark = min_log.is_none_or(|l| l < (alpha / m as f64).ln());
    [small, gap, mark]
}

fn strict_block_length(
    inputs: &ParameterInputs,
    c: &Constants,
    delta: f64,
    n_override: Option<usize>,
) -> Result<(usize, usize), DictError> {
    let alpha = delta * delta / 22.0;
    let m_cap = m_from_n(delta, MAX_BLOCK_LENGTH);
    let names = ["resolution", "gap_fits", "marker_mass"];
    let mut masses: Vec<f64> = Vec::new();
    let min_log = |m: usize, masses: &mut Vec<f64>| -> Option<f64> {
        let target = inputs.target.as_ref()?;
        if masses.len() < 2 * m {
            *masses = min_log_masses(target, (4 * m).max(64));
        }
        Some(masses[2 * m - 1])
    };
    let mut m = 1;
    let mut last_fail = "resolution";
    loop {
        if m > m_cap {
            return Err(DictError::Infeasible {
                binding: last_fail.to_string(),
                detail: format!("no N <= {MAX_BLOCK_LENGTH} satisfies {last_fail}"),
            });
        }
        let l = min_log(m, &mut masses);
        let ok = m_items_hold(inputs, c, m, alpha, l);
        match ok.iter().position(|&b| !b) {
            None => break,
            Some(i) => {
                last_fail = names[i];
                m += 1;
            }
        }
    }
    let from_m = ((11.0 * m as f64 / delta) - FLOOR_GUARD).ceil() as usize;
    let from_margin = (2f64.ln() / c.entropy_margin).floor() as usize + 1;
    let from_density = (1.0 / delta).floor() as usize + 1;
    let mut n = from_m.max(from_margin).max(from_density).max(n_override.unwrap_or(0));
    while m_from_n(delta, n) < m {
        n += 1;
    }
    loop {
        if n > MAX_BLOCK_LENGTH {
            return Err(DictError::Infeasible {
                binding: "marker_mass".into(),
                detail: format!("N exceeds {MAX_BLOCK_LENGTH}"),
            });
        }
        let m_n = m_from_n(delta, n);
        let l = min_log(m_n, &mut masses);
        if m_items_hold(inputs, c, m_n, alpha, l).iter().all(|&b| b) {
            return Ok((m_n, n));
        }
        n = (((11.0 * (m_n + 1) as f64) / delta) - FLOOR_GUARD).ceil() as usize;
    }
}

fn decidable_checklist(pack: &ParameterPack, target: Option<&MarkovMeasure>) -> Vec<CheckItem> {
    let n = pack.n as f64;
    let m = pack.m;
    let mut items = Vec::new();
    let mut push = |key, statement, verdict, detail: String| {
        items.push(CheckItem {
            key,
            statement,
            verdict,
            detail,
        })
    };
    for (key, statement) in [
        ("entropy_cap", "delta (1 + h_joint) < margin"),
        ("partition_cap", "16 delta (1 + ln|P|) < eps margin"),
        ("block_mass", "4 (1 - delta)(1 - 15 delta) >= 3"),
        ("eps_cap", "delta < eps / 80"),
    ] {
        let bound = pack.delta_bounds[key];
        let ok = if key == "block_mass" {
            4.0 * (1.0 - pack.delta) * (1.0 - 15.0 * pack.delta) >= 3.0
        } else {
            pack.delta < bound
        };
        push(key, statement, Verdict::of(ok), format!("delta={:.6e} bound={bound:.6e}", pack.delta));
    }
    let consts = 120.0 * pack.r_radius < pack.eps && 80.0 * pack.delta < pack.eps && 12.0 * pack.eta < pack.eps;
    push(
        "constants",
        "120 r, 80 delta, 12 eta < eps",
        Verdict::of(consts),
        format!(
            "120r={:.6} 80delta={:.6} 12eta={:.6}",
            120.0 * pack.r_radius,
            80.0 * pack.delta,
            12.0 * pack.eta
        ),
    );
    let theory_m = m_from_n(pack.delta, pack.n);
    push(
        "block_split",
        "M = floor(delta N / 11)",
        Verdict::of(theory_m == m),
        format!("floor(delta N/11)={theory_m} M={m}"),
    );
    push(
        "margin",
        "e^(N margin) > 2",
        Verdict::of(n * pack.entropy_margin > 2f64.ln()),
        format!("N*margin={:.6}", n * pack.entropy_margin),
    );
    push(
        "resolution",
        "2^-M < r",
        Verdict::of((m as f64) * -(2f64.ln()) < pack.r_radius.ln()),
        format!("2^-M={:.6e} r={:.6e}", 0.5f64.powi(m as i32), pack.r_radius),
    );
    push(
        "density",
        "1/N < delta",
        Verdict::of(1.0 / n < pack.delta),
        format!("1/N={:.6e}", 1.0 / n),
    );
    push(
        "gap_fits",
        "L_r(N) < M",
        Verdict::of(pack.shadow_gap() < m),
        format!("L_r={} M={m}", pack.shadow_gap()),
    );
    let (verdict, detail) = match target {
        Some(t) if m > 0 => {
            let l = min_log_masses(t, 2 * m)[2 * m - 1];
            let cap = (pack.alpha / m as f64).ln();
            (Verdict::of(l < cap), format!("min_ln_mass={l:.6} ln(alpha/M)={cap:.6}"))
        }
        _ => (Verdict::Inconclusive, "no target measure".into()),
    };
    push("marker_mass", "some 2M-window has mass < alpha/M", verdict, detail);
    push(
        "off_boundary",
        "boundary mass of the cylinder partition < delta",
        Verdict::Pass,
        "cylinder partitions are clopen in the exact-shadow regime".into(),
    );
    items
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

fn estimated(key: &'static str, statement: &'static str, hits: usize, trials: usize, need: f64) -> CheckItem {
    let (lo, hi) = wilson_interval(hits, trials, WILSON_Z);
    let verdict = if lo > need {
        Verdict::Pass
    } else if hi < need {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    CheckItem {
        key,
        statement,
        verdict,
        detail: format!(
            "estimate={:.6} wilson99=[{lo:.6},{hi:.6}] need>{need:.6} samples={trials}",
            hits as f64 / trials.max(1) as f64
        ),
    }
}

/// Monte-Carlo estimates of the almost-sure conditions under the product
/// joining of `source` and `target`, with 0.99 Wilson intervals.
pub fn estimate_conditions(
    pack: &ParameterPack,
    source: &MarkovMeasure,
    target: &MarkovMeasure,
    samples: usize,
    seed: u64,
) -> Vec<CheckItem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = pack.n;
    let m = pack.m;
    let t1 = window_radius(pack.eta);
    let t2 = window_radius(2.0 * pack.eta);
    let margin = pack.entropy_margin;
    let (hs, ht) = (pack.h_source, pack.h_target);
    let hj = hs + ht;
    let need = 1.0 - pack.delta;
    let pad = t1.max(t2);
    let len = n + 2 * pad;
    let inner = |lo: usize, hi: usize, t: usize| (pad + lo - t)..(pad + hi + t);
    let kmax = 3;
    let exact: Vec<BlockDistribution> = (1..=kmax).map(|k| product_blocks(source, target, k)).collect();
    let stride = target.alphabet_size() as u8;
    let mut hits = [0usize; 5];
    for _ in 0..samples {
        let x = sample_with(source, len, &mut rng).symbols;
        let y = sample_with(target, len, &mut rng).symbols;
        let lx_full = log_cylinder_probability(source, &x[inner(0, n, t1)]);
        let ly_full = log_cylinder_probability(target, &y[inner(0, n, t1)]);
        let info = inner(m, n - 10 * m, t2);
        let lx_info = log_cylinder_probability(source, &x[info.clone()]);
        let ly_info = log_cylinder_probability(target, &y[info]);
        let nf = n as f64;
        hits[0] += (lx_full > -(hs + margin) * nf) as usize;
        hits[1] += (ly_info < -(ht - margin) * nf) as usize;
        hits[2] += (lx_info + ly_info < -(hj - margin) * nf) as usize;
        hits[3] += (lx_full + ly_full > -(hj + margin) * nf) as usize;
        let span = (pad + m)..(pad + n - 10 * m);
        let joint: Vec<BlockDistribution> = (1..=kmax)
            .map(|k| BlockDistribution::from_pairs(&x[span.clone()], &y[span.clone()], stride, k))
            .collect();
        let d = weakstar_surrogate(&joint, &exact, kmax).unwrap_or(f64::INFINITY);
        hits[4] += (d < pack.eps / 12.0) as usize;
    }
    vec![
        estimated("big_boys", "mu(typical source blocks) > 1 - delta", hits[0], samples, need),
        estimated("small_girls", "nu(low-mass target windows) > 1 - delta", hits[1], samples, need),
        estimated("small_pairs", "xi(low-mass joint windows) > 1 - delta", hits[2], samples, need),
        estimated("big_pairs", "xi(high-mass joint blocks) > 1 - delta", hits[3], samples, need),
        estimated("weakstar", "xi(weak-star close pairs) > 1 - delta", hits[4], samples, need),
        CheckItem {
            key: "off_boundary_mass",
            statement: "nu(off partition boundaries) > 1 - delta",
            verdict: Verdict::Pass,
            detail: "exact: the boundary set is empty".into(),
        },
    ]
}

fn product_blocks(source: &MarkovMeasure, target: &MarkovMeasure, k: usize) -> BlockDistribution {
    let stride = target.alphabet_size() as u8;
    let xs = source.block_probabilities(k);
    let ys = target.block_probabilities(k);
    let mut freqs = BTreeMap::new();
    for (bx, px) in &xs {
        for (by, py) in &ys {
            let key: Vec<u8> = bx.iter().zip(by).map(|(&a, &b)| a * stride + b).collect();
            freqs.insert(key, px * py);
        }
    }
    BlockDistribution { k, freqs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::binary_entropy;

    fn inputs(eps: f64) -> ParameterInputs {
        ParameterInputs {
            h_source: binary_entropy(0.1).unwrap(),
            h_target: 2f64.ln(),
            eps,
            source_alphabet: 2,
            spec_gap: 1,
            target: Some(MarkovMeasure::uniform(2)),
        }
    }

    #[test]
    fn margin_and_binding_chain() {
        let pack = choose_parameters(&inputs(0.5), Mode::Strict, &Overrides::default()).unwrap();
        assert!((pack.entropy_margin - 0.0368).abs() < 1e-4);
        assert_eq!(
            pack.entropy_margin,
            (2f64.ln() - binary_entropy(0.1).unwrap()) / 10.0
        );
        assert_eq!(pack.binding, "partition_cap");
        let cap = pack.delta_bounds["partition_cap"];
        assert!((cap - 6.8e-4).abs() < 1e-5);
        assert!(pack.n as f64 >= 11.0 / cap);
        assert!(pack.m >= 1);
        assert_eq!(pack.m, (pack.delta * pack.n as f64 / 11.0 + 1e-9).floor() as usize);
        assert!(pack.checklist.iter().all(|c| c.verdict == Verdict::Pass), "{}", pack);
    }

    #[test]
    fn strict_n_is_least_passing() {
        let pack = choose_parameters(&inputs(0.5), Mode::Strict, &Overrides::default()).unwrap();
        // one symbol shorter drops M below the least feasible value
        let m_prev = ((pack.delta * (pack.n - 1) as f64) / 11.0 + 1e-9).floor() as usize;
        assert!(m_prev < pack.m);
    }

    #[test]
    fn equal_entropies_are_rejected() {
        let mut i = inputs(0.5);
        i.h_target = i.h_source;
        assert!(matches!(
            choose_parameters(&i, Mode::Strict, &Overrides::default()),
            Err(DictError::Precondition(_))
        ));
    }

    #[test]
    fn practical_mode_records_without_failing() {
        let o = Overrides {
            n: Some(64),
            m: Some(2),
            ..Default::default()
        };
        let pack = choose_parameters(&inputs(0.2), Mode::Practical, &o).unwrap();
        assert_eq!((pack.n, pack.m), (64, 2));
        assert!((pack.delta - 22.0 / 64.0).abs() < 1e-15);
        assert_eq!(pack.item("eps_cap").unwrap().verdict, Verdict::Fail);
        assert_eq!(pack.item("block_split").unwrap().verdict, Verdict::Pass);
        assert!(choose_parameters(&inputs(0.2), Mode::Practical, &Overrides::default()).is_err());
    }

    #[test]
    fn block_mass_root() {
        let x = block_mass_bound();
        assert!((4.0 * (1.0 - x) * (1.0 - 15.0 * x) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn radius_semantics() {
        assert_eq!(window_radius(1.0), 0);
        assert_eq!(window_radius(0.5), 1);
        assert_eq!(window_radius(0.3), 1);
        assert_eq!(window_radius(0.004), 7);
    }

    #[test]
    fn wilson_brackets_the_estimate() {
        let (lo, hi) = wilson_interval(90, 100, WILSON_Z);
        assert!(lo < 0.9 && 0.9 < hi);
        let (lo, hi) = wilson_interval(100, 100, WILSON_Z);
        assert!(lo > 0.9 && hi == 1.0);
    }

    #[test]
    fn monte_carlo_items_are_reported() {
        let o = Overrides {
            n: Some(400),
            m: Some(2),
            ..Default::default()
        };
        let pack = choose_parameters(&inputs(0.5), Mode::Practical, &o).unwrap();
        let src = MarkovMeasure::bernoulli_binary(0.1).unwrap();
        let items = estimate_conditions(&pack, &src, &MarkovMeasure::uniform(2), 50, 1);
        assert_eq!(items.len(), 6);
        assert!(items.iter().all(|c| c.detail.contains("samples=50") || c.key == "off_boundary_mass"));
        let again = estimate_conditions(&pack, &src, &MarkovMeasure::uniform(2), 50, 1);
        assert_eq!(items, again);
    }
}
