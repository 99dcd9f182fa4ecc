//! Boys, girls and the counting bounds of a small dictionary.

use symdyn::dict::{choose_parameters, verify_dictionary_bounds, BoySet, GirlSet, Mode, Overrides, ParameterInputs};
use symdyn::markers::find_marker;
use symdyn::measures::{measure_entropy, MarkovMeasure};
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
    let scheme = find_marker(&target, &nu, pack.m, pack.alpha, 10_000, 1)?;
    let boys = BoySet::new(&source, pack.n, pack.boy_log_threshold())?;
    let girls = GirlSet::for_blocks(&target, pack.n, &scheme)?;
    println!("N = {}: {} boys carrying mass {:.4}, {} girls", pack.n, boys.count(), boys.mass(), girls.count());
    print!("{}", verify_dictionary_bounds(&boys, &girls, &pack, inputs.h_source, inputs.h_target));
    Ok(())
}
