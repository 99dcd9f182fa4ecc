//! Topological and measure-theoretic entropy of small shifts.

use symdyn::measures::{measure_entropy, MarkovMeasure};
use symdyn::shiftspace::{count_words, topological_entropy};
use symdyn::{build_sft, full_shift, Word};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let golden = build_sft(2, &[Word::from_digits("11")?])?;
    for (name, sft) in [("full 2-shift", full_shift(2)), ("golden mean", golden)] {
        println!("{name}: h_top = {:.6}, words of length 20 = {}", topological_entropy(&sft), count_words(&sft, 20));
        let parry = MarkovMeasure::max_entropy(&sft)?;
        println!("  maximal-entropy measure has entropy {:.6}", measure_entropy(&parry));
    }
    let biased = MarkovMeasure::bernoulli_binary(0.1)?;
    println!("Bernoulli(0.9, 0.1): h = {:.6}", measure_entropy(&biased));
    Ok(())
}
