//! Strict parameter choice with its checklist.

use symdyn::dict::{choose_parameters, Mode, Overrides, ParameterInputs};
use symdyn::measures::{measure_entropy, MarkovMeasure};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let source = MarkovMeasure::bernoulli_binary(0.1)?;
    let inputs = ParameterInputs {
        h_source: measure_entropy(&source),
        h_target: std::f64::consts::LN_2,
        eps: 0.2,
        source_alphabet: 2,
        spec_gap: 1,
        target: Some(MarkovMeasure::uniform(2)),
    };
    let pack = choose_parameters(&inputs, Mode::Strict, &Overrides::default())?;
    print!("{}", pack.to_text());
    Ok(())
}
