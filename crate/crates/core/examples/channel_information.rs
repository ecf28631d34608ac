//! Channel entropies and pairwise mutual information for a colour texture
//! and for a gray one, where the channels are identical.

use texpyr::imagecore::{split_channels, RasterImage};
use texpyr::infotheory::{info_block, INFO_NAMES};
use texpyr::synth::{render, texture_classes};

fn show(label: &str, img: &RasterImage) -> texpyr::Result<()> {
    let (r, g, b) = split_channels(img)?;
    println!("{label}");
    for (n, v) in INFO_NAMES.iter().zip(info_block(&r, &g, &b)?) {
        println!("  {n:<6} {v:.4} bits");
    }
    Ok(())
}

fn main() -> texpyr::Result<()> {
    let colour = render(&texture_classes()[8], 64, 2);
    show("colour noise", &colour)?;
    let gray = RasterImage::from_fn_rgb(64, 64, |x, y| {
        let v = colour.pixel(x, y)[0];
        [v, v, v]
    })?;
    // identical channels: MI equals the channel entropy
    show("gray copy of R", &gray)?;
    Ok(())
}
