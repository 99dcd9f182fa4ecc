//! Circle-valued solutions of a cyclotomic shift equation on Z/m.

use symdyn::toral::halmos_group;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (n, m) in [(6, 2), (1, 5), (4, 6), (3, 9), (5, 7)] {
        let g = halmos_group(n, m)?;
        println!(
            "n={n} m={m}: torus rank {}, finite part {:?}, constants of order {}, non-constant solutions: {}",
            g.torus_rank, g.invariants, g.constant_order, g.member
        );
    }
    Ok(())
}
