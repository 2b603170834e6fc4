//! Free-space propagation of a Gaussian beam with the angular-spectrum
//! method: spreading with distance, energy conservation, exact round trip.
//!
//!     cargo run --example propagate_gaussian

use num_complex::Complex64;
use scatterptych::wavefield::{intensity, transfer_undersampled, AngularSpectrum};
use scatterptych::ComplexField;

fn rms_width(field: &ComplexField) -> f64 {
    let i = intensity(field);
    let (mut m2, mut total) = (0.0, 0.0);
    for iy in 0..field.height() {
        for ix in 0..field.width() {
            let (x, y) = field.coordinate(ix, iy);
            let w = i.get(ix, iy);
            m2 += w * (x * x + y * y);
            total += w;
        }
    }
    (m2 / total).sqrt()
}

fn main() -> scatterptych::Result<()> {
    let (n, pitch, wavelength) = (256, 2e-6, 532e-9);
    let waist = 10e-6;
    let beam = ComplexField::from_fn(n, n, pitch, wavelength, |ix, iy| {
        let x = (ix as f64 - (n / 2) as f64) * pitch;
        let y = (iy as f64 - (n / 2) as f64) * pitch;
        Complex64::new((-(x * x + y * y) / (waist * waist)).exp(), 0.0)
    })?;
    let rayleigh = std::f64::consts::PI * waist * waist / wavelength;

    println!(
        "waist {:.1} um, Rayleigh range {:.3} mm",
        waist * 1e6,
        rayleigh * 1e3
    );
    println!(
        "{:>10} {:>14} {:>14} {:>12}",
        "d (mm)", "rms width (um)", "Gaussian (um)", "energy err"
    );
    for d in [0.0, 0.25e-3, 0.5e-3, 1e-3, 2e-3] {
        let out = AngularSpectrum::for_field(&beam, d)?.forward(&beam)?;
        // rms radius of a Gaussian intensity is w(z) / sqrt(2)
        let expected = waist * (1.0 + (d / rayleigh).powi(2)).sqrt() / 2f64.sqrt();
        let energy_err = (out.energy() - beam.energy()).abs() / beam.energy();
        println!(
            "{:>10.2} {:>14.3} {:>14.3} {:>12.1e}",
            d * 1e3,
            rms_width(&out) * 1e6,
            expected * 1e6,
            energy_err
        );
    }

    let prop = AngularSpectrum::for_field(&beam, 1e-3)?;
    let back = prop.backward(&prop.forward(&beam)?)?;
    println!(
        "round trip at 1 mm: relative L2 error {:.1e}",
        back.relative_l2_error(&beam)
    );

    for d in [1e-3, 50e-3] {
        println!(
            "transfer function at {:>4.0} mm on this grid: {}",
            d * 1e3,
            if transfer_undersampled(n, n, pitch, wavelength, d) {
                "undersampled"
            } else {
                "adequately sampled"
            }
        );
    }
    Ok(())
}
