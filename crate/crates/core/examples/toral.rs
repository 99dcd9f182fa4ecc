//! Classification, certified entropy and splitting of toral automorphisms.

use symdyn::toral::{classify, split_action, toral_entropy, IntMatrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cat = IntMatrix::from_i64(&[&[2, 1], &[1, 1]])?;
    let salem = IntMatrix::from_i64(&[&[0, 0, 0, -1], &[1, 0, 0, 1], &[0, 1, 0, 1], &[0, 0, 1, 1]])?;
    let rot3 = IntMatrix::from_i64(&[&[0, -1], &[1, -1]])?;
    for (name, a) in [("cat map", &cat), ("Salem companion", &salem)] {
        let c = classify(a)?;
        println!("{name}: {} with charpoly {}, entropy {:.12}", c.class, c.charpoly, toral_entropy(a, 1e-12)?);
    }
    let mixed = IntMatrix::block_diag(&rot3, &cat);
    let split = split_action(&mixed)?;
    println!(
        "mixed map: {}-dimensional part with charpoly {}, {}-dimensional part with charpoly {}, index {}",
        split.first.dim(),
        split.first.charpoly(),
        split.second.dim(),
        split.second.charpoly(),
        split.index
    );
    Ok(())
}
