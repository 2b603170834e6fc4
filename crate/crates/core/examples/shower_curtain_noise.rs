//! Residual speckle from the scattering layer. Each exposure through a
//! static layer carries one speckle realization; a moving layer averages K
//! of them during the exposure, and the contrast falls like 1/sqrt(K).
//!
//!     cargo run --example shower_curtain_noise

use scatterptych::diffsim::{apply_shower_curtain, derive_seed, MediumModel};
use scatterptych::RealImage;

fn contrast(image: &RealImage) -> f64 {
    image.std() / image.mean()
}

fn main() -> scatterptych::Result<()> {
    let clean = RealImage::filled(256, 256, 1.0)?;
    let (c, grain) = (0.4, 2.0);

    let stat = MediumModel::static_medium(c, grain, 7)?;
    let frame = apply_shower_curtain(&clean, &stat, derive_seed(7, 0))?;
    let again = apply_shower_curtain(&clean, &stat, derive_seed(7, 0))?;
    println!(
        "static layer: contrast {:.3}, reproducible from its seed: {}",
        contrast(&frame),
        frame == again
    );

    println!("{:>4} {:>10} {:>12}", "K", "contrast", "c / sqrt(K)");
    for k in [1, 2, 4, 8, 16, 32] {
        let medium = MediumModel::dynamic(c, grain, k, 7)?;
        let frame = apply_shower_curtain(&clean, &medium, derive_seed(7, 0))?;
        println!(
            "{:>4} {:>10.4} {:>12.4}",
            k,
            contrast(&frame),
            c / (k as f64).sqrt()
        );
    }
    Ok(())
}
