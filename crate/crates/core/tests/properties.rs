use num_bigint::BigUint;
use proptest::prelude::*;
use std::sync::OnceLock;
use symdyn::codec::{decode, encode};
use symdyn::dict::{choose_parameters, BoySet, CodeBook, DictMode, GirlSet, Mode, Overrides, ParameterInputs, ParameterPack};
use symdyn::estimators::{weakstar_surrogate, BlockDistribution};
use symdyn::interp::{connect_words, interpolate, SegmentPlan};
use symdyn::markers::find_marker;
use symdyn::measures::{measure_entropy, sample_path, MarkovMeasure};
use symdyn::shiftspace::enumerate_words;
use symdyn::toral::{eigen_entropy, eigen_entropy_tolerance, toral_entropy, IntMatrix};
use symdyn::{build_sft, full_shift, Sft, Word};

fn golden_mean() -> Sft {
    build_sft(2, &[Word::from_digits("11").unwrap()]).unwrap()
}

fn golden_word(len: usize, pick: usize) -> Vec<u8> {
    let words = enumerate_words(&golden_mean(), len, None);
    words[pick % words.len()].symbols.clone()
}

fn coding_fixture() -> &'static (CodeBook, ParameterPack) {
    static FIXTURE: OnceLock<(CodeBook, ParameterPack)> = OnceLock::new();
    FIXTURE.get_or_init(|| {
        let source = MarkovMeasure::bernoulli_binary(0.1).unwrap();
        let target = full_shift(2);
        let nu = MarkovMeasure::uniform(2);
        let inputs = ParameterInputs {
            h_source: measure_entropy(&source),
            h_target: std::f64::consts::LN_2,
            eps: 0.2,
            source_alphabet: 2,
            spec_gap: 1,
            target: Some(nu.clone()),
        };
        let overrides = Overrides { n: Some(64), m: Some(2), delta: None, alpha: Some(0.5) };
        let pack = choose_parameters(&inputs, Mode::Practical, &overrides).unwrap();
        let scheme = find_marker(&target, &nu, 2, 0.5, 10_000, 1).unwrap();
        let book =
            CodeBook::build(source, target, scheme, 64, pack.boy_log_threshold(), DictMode::Enumerative, None).unwrap();
        (book, pack)
    })
}

/// Product of elementary row operations, hence unimodular.
fn elementary_product(ops: &[(usize, usize, i64)], d: usize) -> IntMatrix {
    let mut a = IntMatrix::identity(d);
    for &(i, j, c) in ops {
        let (i, j) = (i % d, j % d);
        if i == j {
            continue;
        }
        let mut rows: Vec<Vec<i64>> = (0..d).map(|r| (0..d).map(|s| i64::from(r == s)).collect()).collect();
        rows[i][j] = c;
        let e = IntMatrix::from_i64(&rows.iter().map(Vec::as_slice).collect::<Vec<_>>()).unwrap();
        a = a.mul(&e);
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn interpolation_keeps_segments_and_admissibility(
        segs in prop::collection::vec((1usize..8, 0usize..1000, 0usize..4), 1..12)
    ) {
        let sft = golden_mean();
        let mut plan = SegmentPlan::new(0, 400, 2);
        let mut at = 0i64;
        let mut placed = Vec::new();
        for (len, pick, extra) in segs {
            let w = golden_word(len, pick);
            plan.push(at, w.clone());
            placed.push((at, w));
            at += (len + 2 + extra) as i64;
        }
        let out = interpolate(&sft, &plan).unwrap();
        prop_assert!(sft.is_admissible(&out.symbols));
        for (s, w) in placed {
            prop_assert_eq!(out.window(s, s + w.len() as i64).unwrap(), w.as_slice());
        }
    }

    #[test]
    fn connections_are_admissible(u in (1usize..10, 0usize..1000), v in (1usize..10, 0usize..1000), extra in 0usize..6) {
        let sft = golden_mean();
        let (u, v) = (Word::new(golden_word(u.0, u.1)), Word::new(golden_word(v.0, v.1)));
        let w = connect_words(&sft, &u, &v, 2 + extra).unwrap();
        let joined: Vec<u8> = u.symbols.iter().chain(&w.symbols).chain(&v.symbols).copied().collect();
        prop_assert_eq!(w.len(), 2 + extra);
        prop_assert!(sft.is_admissible(&joined));
    }

    #[test]
    fn boy_rank_roundtrip(p in 0.05f64..0.45, slack in 0.01f64..0.2, r in any::<u64>()) {
        let mu = MarkovMeasure::bernoulli_binary(p).unwrap();
        let n = 40;
        let boys = BoySet::new(&mu, n, -(n as f64) * (measure_entropy(&mu) + slack)).unwrap();
        prop_assume!(*boys.count() > BigUint::ZERO);
        let rank = BigUint::from(r) % boys.count();
        let w = boys.unrank(&rank).unwrap();
        prop_assert!(boys.contains(&w));
        prop_assert_eq!(boys.rank(&w), Some(rank));
    }

    #[test]
    fn girl_rank_roundtrip(len in 1usize..60, r in any::<u64>()) {
        let sft = golden_mean();
        let girls = GirlSet::new(&sft, len, None).unwrap();
        let rank = BigUint::from(r) % girls.count();
        let w = girls.unrank(&rank).unwrap().unwrap();
        prop_assert!(sft.is_admissible(&w));
        prop_assert_eq!(girls.rank(&w).unwrap(), Some(rank));
    }

    #[test]
    fn decoding_never_contradicts_the_source(seed in 0u64..10_000) {
        let (book, pack) = coding_fixture();
        let x = sample_path(&book.source, 3000, seed).symbols;
        let pair = encode(&x, book, pack, seed ^ 0x5eed).unwrap();
        prop_assert!(book.target.is_admissible(&pair.y));
        let dec = decode(&pair.y, book, pack).unwrap();
        for i in 0..x.len() {
            prop_assert!(!dec.mask[i] || dec.x_hat[i] == x[i]);
        }
    }

    #[test]
    fn weakstar_surrogate_is_a_pseudometric(
        a in prop::collection::vec(0u8..3, 4..50),
        b in prop::collection::vec(0u8..3, 4..50),
        c in prop::collection::vec(0u8..3, 4..50),
    ) {
        let [la, lb, lc] = [&a, &b, &c].map(|w| BlockDistribution::ladder(w, 3));
        let d = |x: &[BlockDistribution], y: &[BlockDistribution]| weakstar_surrogate(x, y, 3).unwrap();
        prop_assert!(d(&la, &la).abs() < 1e-15);
        prop_assert!((d(&la, &lb) - d(&lb, &la)).abs() < 1e-15);
        prop_assert!(d(&la, &lc) <= d(&la, &lb) + d(&lb, &lc) + 1e-12);
        prop_assert!(d(&la, &lb) <= 1.0 + 1e-12);
    }

    #[test]
    fn certified_entropy_matches_eigenvalues(ops in prop::collection::vec((0usize..3, 0usize..3, -2i64..=2), 1..8)) {
        let a = elementary_product(&ops, 3);
        let h = toral_entropy(&a, 1e-9).unwrap();
        let allowed = eigen_entropy_tolerance(&a).max(1e-6);
        prop_assert!((h - eigen_entropy(&a)).abs() <= allowed, "{} vs {}", h, eigen_entropy(&a));
    }
}
