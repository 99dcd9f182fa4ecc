//! Entropy estimates from a single sample path.

use symdyn::codec::lz78_entropy;
use symdyn::estimators::{bk_estimate, dw_estimate};
use symdyn::measures::{measure_entropy, sample_path, MarkovMeasure};
use symdyn::Word;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mu = MarkovMeasure::new(vec![vec![0.9, 0.1], vec![0.5, 0.5]])?;
    let x = sample_path(&mu, 1 << 20, 1);
    println!("exact entropy      {:.4}", measure_entropy(&mu));
    println!("cylinder estimate  {:.4}", bk_estimate(&mu, &x, 10_000, 0)?);
    let starts = 200;
    let mut total = 0.0;
    for k in 0..starts {
        let z = Word::new(x.symbols[k * 4096..].to_vec());
        total += dw_estimate(&z, 12, 0, None)?;
    }
    println!("first return, n=12 {:.4} (mean of {starts} windows)", total / starts as f64);
    println!("LZ78               {:.4}", lz78_entropy(&x.symbols, 2));
    Ok(())
}
