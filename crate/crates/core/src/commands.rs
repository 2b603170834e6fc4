//! Implementations behind the `scatterptych` subcommands. Each returns a
//! summary value; the binary only parses flags and prints.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{ProbeInitChoice, ReconFileConfig, SimulateConfig};
use crate::diffsim::simulate_dataset_with_detector;
use crate::epie::reconstruct;
use crate::error::{Error, Result};
use crate::formats::{
    read_grayscale_png, read_stack, write_gray16_png, write_sse_csv, write_stack, StackFiles,
};
use crate::metrics::MetricsReport;
use crate::scangeom::{fov_extent, overlap_area, overlap_rate, RECOMMENDED_OVERLAP};
use crate::wavefield::{RealImage, Rect};

/// Process exit statuses.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const DATA: i32 = 2;
    pub const NOT_CONVERGED: i32 = 3;
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_usage() {
        exit::USAGE
    } else {
        exit::DATA
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateSummary {
    pub m: usize,
    pub overlap_rate: f64,
    pub fov_extent_m: (f64, f64),
    pub manifest: PathBuf,
    pub payload_sha256: String,
}

pub fn cmd_simulate(
    config_path: &Path,
    out_dir: &Path,
    seed: Option<u64>,
) -> Result<SimulateSummary> {
    let mut cfg = SimulateConfig::load(config_path)?;
    if let Some(seed) = seed {
        cfg.medium.seed = seed;
    }
    let base = config_path.parent().unwrap_or_else(|| Path::new("."));
    let object = cfg.build_object(base)?;
    let spec = cfg.probe_spec()?;
    let plan = cfg.scan_plan()?;
    let stack = simulate_dataset_with_detector(
        &object,
        &plan,
        &spec,
        cfg.distance_m,
        &cfg.medium,
        &cfg.detector,
    )?;
    let StackFiles {
        manifest, checksum, ..
    } = write_stack(&stack, out_dir, &cfg.output_name)?;
    Ok(SimulateSummary {
        m: stack.len(),
        overlap_rate: overlap_rate(spec.radius, plan.step),
        fov_extent_m: fov_extent(&plan, &spec),
        manifest,
        payload_sha256: checksum,
    })
}

/// Flag overrides for `reconstruct`; unset fields fall back to the JSON
/// config, then to defaults.
#[derive(Debug, Clone, Default)]
pub struct ReconOptions {
    pub config: Option<PathBuf>,
    pub max_iterations: Option<usize>,
    pub epsilon: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub probe_init: Option<ProbeInitChoice>,
    pub crop: Option<Rect>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconSummary {
    pub iterations_run: usize,
    pub converged: bool,
    pub final_sse: f64,
    pub sse_history: Vec<f64>,
    pub width: usize,
    pub height: usize,
    /// |O| value written as full white in the amplitude image.
    pub object_amplitude_scale: f64,
    pub probe_amplitude_scale: f64,
}

/// Value below which `fraction` of the samples fall.
fn quantile(values: &[f64], fraction: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let idx = ((sorted.len() - 1) as f64 * fraction).round() as usize;
    sorted[idx]
}

pub const OBJECT_AMPLITUDE_PNG: &str = "object_amplitude.png";
pub const OBJECT_PHASE_PNG: &str = "object_phase.png";
pub const PROBE_AMPLITUDE_PNG: &str = "probe_amplitude.png";
pub const SSE_CSV: &str = "sse.csv";
pub const SUMMARY_JSON: &str = "summary.json";

pub fn cmd_reconstruct(
    stack_path: &Path,
    opts: &ReconOptions,
    out_dir: &Path,
) -> Result<ReconSummary> {
    let mut stack = read_stack(stack_path)?;
    if let Some(rect) = opts.crop {
        stack = stack.crop(rect)?;
    }
    let mut file_cfg = match &opts.config {
        Some(p) => ReconFileConfig::load(p)?,
        None => ReconFileConfig::default(),
    };
    file_cfg.max_iterations = opts.max_iterations.or(file_cfg.max_iterations);
    file_cfg.epsilon = opts.epsilon.or(file_cfg.epsilon);
    file_cfg.alpha = opts.alpha.or(file_cfg.alpha);
    file_cfg.beta = opts.beta.or(file_cfg.beta);
    file_cfg.probe_init = opts.probe_init.or(file_cfg.probe_init);
    let config = file_cfg.resolve(stack.probe)?;

    let result = reconstruct(&stack, &config)?;

    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let amp = result.object.amplitude();
    // 99.9th percentile keeps isolated hot pixels from compressing the range
    let amp_scale = quantile(amp.data(), 0.999).max(f64::MIN_POSITIVE);
    write_gray16_png(&out_dir.join(OBJECT_AMPLITUDE_PNG), &amp, 0.0, amp_scale)?;
    write_gray16_png(
        &out_dir.join(OBJECT_PHASE_PNG),
        &result.object.phase(),
        -std::f64::consts::PI,
        std::f64::consts::PI,
    )?;
    let probe_amp = result.probe.amplitude();
    let probe_scale = probe_amp.max().max(f64::MIN_POSITIVE);
    write_gray16_png(
        &out_dir.join(PROBE_AMPLITUDE_PNG),
        &probe_amp,
        0.0,
        probe_scale,
    )?;
    write_sse_csv(&out_dir.join(SSE_CSV), &result.sse_history)?;

    let summary = ReconSummary {
        iterations_run: result.iterations_run,
        converged: result.converged,
        final_sse: result.final_sse(),
        sse_history: result.sse_history.clone(),
        width: stack.width(),
        height: stack.height(),
        object_amplitude_scale: amp_scale,
        probe_amplitude_scale: probe_scale,
    };
    let json = serde_json::to_string_pretty(&summary)?;
    let path = out_dir.join(SUMMARY_JSON);
    fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(summary)
}

/// Region statistics of a PNG (values on the `[0, 1]` scale). A simulate
/// config adds the scan's FOV extent and overlap rate to the report.
pub fn cmd_metrics(
    image_path: &Path,
    region: Rect,
    sim_config: Option<&Path>,
    sse_log: Option<&Path>,
) -> Result<MetricsReport> {
    let image: RealImage = read_grayscale_png(image_path)?;
    let mut report = MetricsReport::for_region(&image, region)?;
    if let Some(p) = sim_config {
        let cfg = SimulateConfig::load(p)?;
        let spec = cfg.probe_spec()?;
        let plan = cfg.scan_plan()?;
        report.fov_extent_m = Some(fov_extent(&plan, &spec));
        report.overlap_rate = Some(overlap_rate(spec.radius, plan.step));
    }
    report.sse_history = sse_log.map(|p| p.display().to_string());
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum OverlapVerdict {
    Pass,
    Warn,
}

impl std::fmt::Display for OverlapVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OverlapVerdict::Pass => "PASS",
            OverlapVerdict::Warn => "WARN",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapReport {
    pub radius_m: f64,
    pub step_m: f64,
    pub area_m2: f64,
    pub rate: f64,
    pub verdict: OverlapVerdict,
}

pub fn cmd_overlap(radius: f64, step: f64) -> Result<OverlapReport> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "radius must be positive, got {radius}"
        )));
    }
    if !(step.is_finite() && step >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step must be >= 0, got {step}"
        )));
    }
    let rate = overlap_rate(radius, step);
    let (lo, hi) = RECOMMENDED_OVERLAP;
    Ok(OverlapReport {
        radius_m: radius,
        step_m: step,
        area_m2: overlap_area(radius, step),
        rate,
        verdict: if (lo..=hi).contains(&rate) {
            OverlapVerdict::Pass
        } else {
            OverlapVerdict::Warn
        },
    })
}
