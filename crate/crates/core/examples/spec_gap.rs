//! Specification gap and lexicographically least connecting words.

use symdyn::interp::connect_words;
use symdyn::shiftspace::specification_gap;
use symdyn::{build_sft, Word};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sft = build_sft(2, &[Word::from_digits("11")?, Word::from_digits("101")?])?;
    let gap = specification_gap(&sft)?;
    println!("forbidding 11 and 101 gives specification gap {gap}");
    let (left, right) = (Word::from_digits("1")?, Word::from_digits("1")?);
    for g in gap..gap + 3 {
        let filler = connect_words(&sft, &left, &right, g)?;
        println!("  1 [{}] 1 at gap {g}", filler.to_digits());
    }
    Ok(())
}
