//! Searching for a self-distinguishing marker word.

use symdyn::markers::{find_marker, is_unbordered};
use symdyn::measures::MarkovMeasure;
use symdyn::shiftspace::full_shift;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sft = full_shift(2);
    let nu = MarkovMeasure::uniform(2);
    let scheme = find_marker(&sft, &nu, 2, 0.5, 10_000, 1)?;
    println!("marker {} (M = {})", symdyn::Word::new(scheme.word.clone()).to_digits(), scheme.m);
    println!("  self-distinguishing: {}", scheme.is_self_distinguishing());
    println!("  unbordered: {}", is_unbordered(&scheme.word));
    println!("  head/tail masses within alpha/M: {}", scheme.masses_ok());
    Ok(())
}
