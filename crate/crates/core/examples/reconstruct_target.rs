//! Simulate noiseless data from a resolution target, reconstruct with
//! ePIE, and report how the estimate improves with each sweep.
//!
//!     cargo run --release --example reconstruct_target -- [out_dir]

use std::path::PathBuf;

use num_complex::Complex64;
use scatterptych::diffsim::{simulate_dataset, MediumModel};
use scatterptych::epie::{Engine, ProbeInit, ReconConfig};
use scatterptych::formats::{write_gray16_png, write_sse_csv};
use scatterptych::metrics::{amplitude_correlation, coverage_from_probe};
use scatterptych::scangeom::{make_probe, ProbeSpec, ScanPlan};
use scatterptych::{phantom, ComplexField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "target/example-target".into()),
    );
    let (n, pitch, wavelength, distance) = (256, 6.5e-6, 532e-9, 3.4e-3);
    let template = ComplexField::filled(n, n, pitch, wavelength, Complex64::new(0.0, 0.0))?;
    let truth = phantom::resolution_target(&template, 160)?;
    let spec = ProbeSpec::with_default_edge(40.0 * pitch, pitch)?;
    let plan = ScanPlan::centered(5, 5, 12.0 * pitch)?;
    let stack = simulate_dataset(&truth, &plan, &spec, distance, &MediumModel::none())?;

    // score only where at least two probe positions overlap
    let probe = make_probe(&spec, &template, (0.0, 0.0))?;
    let mask: Vec<bool> = coverage_from_probe(&probe, &stack.pixel_shifts(), 0.5)
        .into_iter()
        .map(|c| c >= 2)
        .collect();

    let config = ReconConfig {
        probe_init: ProbeInit::Aperture(spec),
        max_iterations: 30,
        epsilon: 1e-6,
        ..ReconConfig::default()
    };
    let mut engine = Engine::new(&stack, config)?;
    println!("{:>5} {:>10} {:>12}", "sweep", "SSE", "correlation");
    for sweep in 1..=30 {
        let sse = engine.sweep()?;
        if sweep <= 5 || sweep % 5 == 0 {
            let corr = amplitude_correlation(engine.object(), &truth, &mask)?;
            println!("{sweep:>5} {sse:>10.2e} {corr:>12.4}");
        }
    }
    let result = engine.finish();

    std::fs::create_dir_all(&out)?;
    let amp = result.object.amplitude();
    write_gray16_png(&out.join("object_amplitude.png"), &amp, 0.0, amp.max())?;
    write_gray16_png(
        &out.join("truth_amplitude.png"),
        &truth.amplitude(),
        0.0,
        1.0,
    )?;
    write_sse_csv(&out.join("sse.csv"), &result.sse_history)?;
    println!("images and SSE log written to {}", out.display());
    Ok(())
}
