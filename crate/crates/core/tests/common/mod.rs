#![allow(dead_code)]

use std::time::{Duration, Instant};

use num_complex::Complex64;
use scatterptych::diffsim::{simulate_dataset, MediumModel, PatternStack};
use scatterptych::epie::{reconstruct, ProbeInit, ReconConfig, ReconResult};
use scatterptych::metrics::{amplitude_correlation, coverage_from_probe};
use scatterptych::scangeom::{make_probe, ProbeSpec, ScanPlan};
use scatterptych::ComplexField;

/// Desk-scale version of the experiment: camera pitch and wavelength kept,
/// transverse lengths scaled by 0.26 and distance by 0.26^2 so the
/// Fresnel number r^2 / (lambda d) matches the 1 mm / 50 mm setup.
pub const N: usize = 256;
pub const PITCH: f64 = 6.5e-6;
pub const LAMBDA: f64 = 532e-9;
pub const RADIUS_PX: f64 = 40.0;
pub const STEP_PX: f64 = 12.0;
pub const SCALE: f64 = RADIUS_PX * PITCH / 1e-3;
pub const DISTANCE: f64 = 50e-3 * SCALE * SCALE;

pub fn template() -> ComplexField {
    ComplexField::filled(N, N, PITCH, LAMBDA, Complex64::new(0.0, 0.0)).unwrap()
}

pub fn probe_spec() -> ProbeSpec {
    ProbeSpec::with_default_edge(RADIUS_PX * PITCH, PITCH).unwrap()
}

pub fn plan() -> ScanPlan {
    ScanPlan::centered(5, 5, STEP_PX * PITCH).unwrap()
}

pub fn simulate(object: &ComplexField, medium: &MediumModel) -> PatternStack {
    simulate_dataset(object, &plan(), &probe_spec(), DISTANCE, medium).unwrap()
}

pub fn protocol_config() -> ReconConfig {
    ReconConfig {
        probe_init: ProbeInit::Aperture(probe_spec()),
        epsilon: 0.01,
        max_iterations: 50,
        ..ReconConfig::default()
    }
}

pub fn run(stack: &PatternStack, config: &ReconConfig) -> ReconResult {
    reconstruct(stack, config).unwrap()
}

/// Pixels seen by at least two probe positions (half-amplitude support).
pub fn scored_mask(stack: &PatternStack) -> Vec<bool> {
    let probe = make_probe(&probe_spec(), &template(), (0.0, 0.0)).unwrap();
    coverage_from_probe(&probe, &stack.pixel_shifts(), 0.5)
        .into_iter()
        .map(|c| c >= 2)
        .collect()
}

pub fn score(result: &ReconResult, truth: &ComplexField, mask: &[bool]) -> f64 {
    amplitude_correlation(&result.object, truth, mask).unwrap()
}

pub fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

/// Prints the one-line verdict and returns whether it passed.
pub fn report(id: u32, name: &str, pass: bool, detail: &str) -> bool {
    println!(
        "criterion {id} [{}] {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}
