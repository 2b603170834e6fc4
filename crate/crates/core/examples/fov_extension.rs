//! Field of view of a scan versus a single pinhole position, both from the
//! geometry and from the support of a reconstructed probe.
//!
//!     cargo run --release --example fov_extension

use num_complex::Complex64;
use scatterptych::diffsim::{simulate_dataset, MediumModel};
use scatterptych::epie::{reconstruct, ProbeInit, ReconConfig};
use scatterptych::metrics::{illuminated_mask, mask_extent};
use scatterptych::scangeom::{fov_extent, ProbeSpec, ScanPlan};
use scatterptych::{phantom, ComplexField};

fn main() -> scatterptych::Result<()> {
    let spec = ProbeSpec::new(1e-3, 0.0)?;
    let grid = ScanPlan::centered(5, 5, 300e-6)?;
    let (w, _) = fov_extent(&grid, &spec);
    println!(
        "5x5 scan, r = 1 mm, s = 300 um: {:.2} mm vs {:.2} mm single, ratio {:.2}",
        w * 1e3,
        2.0 * spec.radius * 1e3,
        w / (2.0 * spec.radius)
    );

    let (n, pitch, wavelength, distance) = (256, 6.5e-6, 532e-9, 3.4e-3);
    let template = ComplexField::filled(n, n, pitch, wavelength, Complex64::new(0.0, 0.0))?;
    let object = phantom::natural_texture(&template, 7, 0.5)?;
    let spec = ProbeSpec::with_default_edge(40.0 * pitch, pitch)?;
    let plan = ScanPlan::centered(5, 5, 12.0 * pitch)?;
    let stack = simulate_dataset(&object, &plan, &spec, distance, &MediumModel::none())?;
    let config = ReconConfig {
        probe_init: ProbeInit::Aperture(spec),
        ..ReconConfig::default()
    };
    let result = reconstruct(&stack, &config)?;

    let all = mask_extent(
        &illuminated_mask(&result.probe, &stack.pixel_shifts(), 0.5),
        n,
    );
    let one = mask_extent(&illuminated_mask(&result.probe, &[(0, 0)], 0.5), n);
    if let (Some(all), Some(one)) = (all, one) {
        println!(
            "reconstructed probe support: scan {}x{} px, single {}x{} px, ratio {:.3}",
            all.0,
            all.1,
            one.0,
            one.1,
            all.0 as f64 / one.0 as f64
        );
    }
    Ok(())
}
