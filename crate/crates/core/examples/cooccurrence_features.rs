//! GLCM and Haralick features of two gratings that differ only in period.

use texpyr::cooccur::{texture_features_gray, GlcmFeatures, HaralickFeatures};
use texpyr::imagecore::{split_channels, to_grayscale};
use texpyr::synth::{render, texture_classes};

fn main() -> texpyr::Result<()> {
    let classes = texture_classes();
    let by_name = |n: &str| classes.iter().find(|c| c.name == n).expect("known class");
    for name in ["grating_p04", "grating_p16"] {
        let img = render(by_name(name), 64, 5);
        let (r, g, b) = split_channels(&img)?;
        let gray = to_grayscale(&r, &g, &b)?;
        let (glcm, har) = texture_features_gray(&gray, 8, 1)?;
        println!("{name}");
        for (n, v) in GlcmFeatures::NAMES.iter().zip(glcm.to_array()) {
            println!("  {n:<16} {v:>10.4}");
        }
        for (n, v) in HaralickFeatures::NAMES.iter().zip(har.to_array()).take(4) {
            println!("  {n:<16} {v:>10.4}");
        }
    }
    Ok(())
}
