//! Gaussian and Laplacian pyramids of a generated texture: level sizes,
//! reconstruction error, and the levels written out as PNG.
//!
//! cargo run --example pyramid_levels -- [out_dir]

use std::path::PathBuf;

use texpyr::imagecore::split_channels;
use texpyr::pyramid::{build_gaussian_pyramid, build_laplacian_pyramid, Plane};
use texpyr::synth::{render, texture_classes};

fn main() -> texpyr::Result<()> {
    let img = render(&texture_classes()[4], 150, 11);
    let (r, _, _) = split_channels(&img)?;
    let base = Plane::from_gray(&r);

    let gauss = build_gaussian_pyramid(&base, 3)?;
    for (l, level) in gauss.levels().iter().enumerate() {
        println!("G{l}: {:?}", level.dims());
    }

    let lap = build_laplacian_pyramid(&gauss)?;
    let err = lap.reconstruct()?.max_abs_diff(&base);
    println!("Laplacian reconstruction max error: {err:.3e}");

    if let Some(dir) = std::env::args().nth(1).map(PathBuf::from) {
        std::fs::create_dir_all(&dir)?;
        for (l, g) in gauss.to_gray_levels().iter().enumerate() {
            std::fs::write(dir.join(format!("red_L{l}.png")), g.to_png()?)?;
        }
        println!("levels written to {}", dir.display());
    }
    Ok(())
}
