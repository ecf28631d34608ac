//! Biodiversity and taxonomic indices of one channel, plus Fisher's alpha
//! for a few (species, individuals) pairs.

use texpyr::bitdesc::{abundance, bit_block, fisher_alpha, BitFeatures};
use texpyr::imagecore::split_channels;
use texpyr::synth::{render, texture_classes};

fn main() -> texpyr::Result<()> {
    let img = render(&texture_classes()[0], 64, 9);
    let (r, _, _) = split_channels(&img)?;
    let a = abundance(&r)?;
    println!("species S = {}, individuals N = {}", a.richness(), a.total());
    let bit = bit_block(&r)?;
    for (n, v) in BitFeatures::NAMES.iter().zip(bit.to_array()) {
        println!("  {n:<24} {v:.6}");
    }
    for (s, n) in [(5, 100), (50, 4096), (200, 22500)] {
        println!("fisher_alpha(S={s}, N={n}) = {:.6}", fisher_alpha(s, n));
    }
    Ok(())
}
