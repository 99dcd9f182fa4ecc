//! Encode a Bernoulli source into the full 2-shift and decode it back.

use symdyn::codec::{audit_badset, decode, encode};
use symdyn::dict::{choose_parameters, CodeBook, DictMode, Mode, Overrides, ParameterInputs};
use symdyn::markers::find_marker;
use symdyn::measures::{measure_entropy, sample_path, MarkovMeasure};
use symdyn::shiftspace::full_shift;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let source = MarkovMeasure::bernoulli_binary(0.1)?;
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
    let pack = choose_parameters(&inputs, Mode::Practical, &overrides)?;
    let scheme = find_marker(&target, &nu, 2, 0.5, 10_000, 1)?;
    let book = CodeBook::build(source.clone(), target.clone(), scheme, 64, pack.boy_log_threshold(), DictMode::Enumerative, None)?;

    let x = sample_path(&source, 50_000, 7).symbols;
    let pair = encode(&x, &book, &pack, 8)?;
    let decoded = decode(&pair.y, &book, &pack)?;
    let wrong = (0..x.len()).filter(|&i| decoded.mask[i] && decoded.x_hat[i] != x[i]).count();
    println!("coded word admissible: {}", target.is_admissible(&pair.y));
    println!("recovered {} of {} symbols, {wrong} wrong", decoded.recovered(), x.len());
    let badset = audit_badset(&pair, &book, &pack, 0.02);
    println!("bad-set density {:.4} against bound {:.4}", badset.total, badset.bound);
    Ok(())
}
