//! Entropy-boost and full-support splicing on the golden mean shift.

use symdyn::measures::{sample_path, MarkovMeasure};
use symdyn::splicer::{skeleton_params, splice_entropy_boost, splice_full_support, Skeleton};
use symdyn::{build_sft, Word};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sft = build_sft(2, &[Word::from_digits("11")?])?;
    let nu = MarkovMeasure::max_entropy(&sft)?;
    let params = skeleton_params(0.3, 0.2, 40)?;
    println!("skeleton blocks: {params}");
    let skeleton = Skeleton::sample(params.kind(), 4000, 3)?;
    let y1 = Word::new(vec![0; skeleton.len()]);
    let y2 = sample_path(&nu, skeleton.len(), 4);
    let boosted = splice_entropy_boost(&sft, &y1, &y2, &skeleton)?;
    let ones = boosted.symbols.iter().filter(|&&s| s == 1).count();
    println!("boosted word: length {}, {ones} ones, admissible {}", boosted.len(), sft.is_admissible(&boosted.symbols));

    let target = Word::from_digits("101")?;
    let planted = splice_full_support(&sft, &Word::new(vec![0; 5000]), &target, 60, 3, 5)?;
    let hits = planted.symbols.windows(3).filter(|w| *w == [1, 0, 1]).count();
    println!("full-support word: {hits} copies of 101 in {} symbols", planted.len());
    Ok(())
}
