//! Reconstruct the same object behind a static and a moving scattering
//! layer, and compare the residual noise in a flat background patch.
//!
//!     cargo run --release --example dynamic_medium_averaging

use num_complex::Complex64;
use scatterptych::diffsim::{simulate_dataset, MediumModel};
use scatterptych::epie::{reconstruct, ProbeInit, ReconConfig};
use scatterptych::metrics::{amplitude_correlation, coverage_from_probe, fit_gain, region_stats};
use scatterptych::scangeom::{make_probe, ProbeSpec, ScanPlan};
use scatterptych::{phantom, ComplexField, RealImage, Rect};

fn main() -> scatterptych::Result<()> {
    let (n, pitch, wavelength, distance) = (256, 6.5e-6, 532e-9, 3.4e-3);
    let template = ComplexField::filled(n, n, pitch, wavelength, Complex64::new(0.0, 0.0))?;
    let truth = phantom::resolution_target(&template, 160)?;
    let spec = ProbeSpec::with_default_edge(40.0 * pitch, pitch)?;
    let plan = ScanPlan::centered(5, 5, 12.0 * pitch)?;
    let probe = make_probe(&spec, &template, (0.0, 0.0))?;
    let background = Rect::new(152, 118, 20, 20);
    let config = ReconConfig {
        probe_init: ProbeInit::Aperture(spec),
        ..ReconConfig::default()
    };

    let mut sigmas = Vec::new();
    for (label, medium) in [
        ("static", MediumModel::static_medium(0.2, 1.0, 1)?),
        ("moving, K = 4", MediumModel::dynamic(0.2, 1.0, 4, 1)?),
        ("moving, K = 16", MediumModel::dynamic(0.2, 1.0, 16, 1)?),
    ] {
        let stack = simulate_dataset(&truth, &plan, &spec, distance, &medium)?;
        let mask: Vec<bool> = coverage_from_probe(&probe, &stack.pixel_shifts(), 0.5)
            .into_iter()
            .map(|c| c >= 2)
            .collect();
        let result = reconstruct(&stack, &config)?;
        let amp = result.object.amplitude();
        // remove the global scale the reconstruction is free to pick
        let gain = fit_gain(amp.data(), truth.amplitude().data(), &mask)?;
        let scaled = RealImage::new(n, n, amp.data().iter().map(|v| v * gain).collect())?;
        let (_, sigma) = region_stats(&scaled, background)?;
        let corr = amplitude_correlation(&result.object, &truth, &mask)?;
        println!(
            "{label:<15} iterations {:>2}, background std {sigma:.4}, correlation {corr:.3}",
            result.iterations_run
        );
        sigmas.push(sigma);
    }
    println!("std ratio K=4 / static: {:.2}", sigmas[1] / sigmas[0]);
    Ok(())
}
