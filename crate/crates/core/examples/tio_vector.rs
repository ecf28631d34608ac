//! The full 315-value vector for one image and how it splits by family.

use texpyr::pipeline::{extract_tio, ExtractionConfig, Family};
use texpyr::synth::{render, texture_classes};

fn main() -> texpyr::Result<()> {
    let config = ExtractionConfig::default();
    let schema = config.schema();
    let img = render(&texture_classes()[2], 200, 4);
    let t = std::time::Instant::now();
    let v = extract_tio(&img, &config, "checker_4/demo")?;
    println!("{} values in {:.0} ms", v.len(), t.elapsed().as_secs_f64() * 1e3);
    for f in Family::ALL {
        let range = schema.family_range(f);
        println!("  {:<9} {:>3} dims, columns {:?}", f.as_str(), range.len(), range);
    }
    let names = schema.column_names();
    for i in [0, 125, 126, 243, 297, 314] {
        println!("  [{i:>3}] {:<36} {:.6}", names[i], v.values[i]);
    }
    Ok(())
}
