//! Decode an image, split it into R, G, B planes and report per-channel means.
//!
//! cargo run --example decode_channels -- [image.png]

use texpyr::imagecore::{decode_image, split_channels, to_grayscale, GrayImage};
use texpyr::synth::{render, texture_classes};

fn mean(g: &GrayImage) -> f64 {
    g.data().iter().map(|&v| f64::from(v)).sum::<f64>() / g.len() as f64
}

fn main() -> texpyr::Result<()> {
    let img = match std::env::args().nth(1) {
        Some(path) => decode_image(&std::fs::read(path)?)?,
        None => render(&texture_classes()[0], 96, 3),
    };
    println!("{}x{}, {} channel(s)", img.width(), img.height(), img.channels());
    let (r, g, b) = split_channels(&img)?;
    let luma = to_grayscale(&r, &g, &b)?;
    for (name, plane) in [("R", &r), ("G", &g), ("B", &b), ("Y", &luma)] {
        println!("{name}: mean {:.2}", mean(plane));
    }
    Ok(())
}
