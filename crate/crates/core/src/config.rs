//! JSON run configurations. Every length carries an explicit `_m` (meters)
//! suffix; nothing is inferred.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diffsim::{DetectorModel, MediumModel};
use crate::epie::{ProbeInit, ReconConfig, Traversal};
use crate::error::{Error, Result};
use crate::formats::read_grayscale_png;
use crate::phantom;
use crate::scangeom::{ProbeSpec, ScanOrder, ScanPlan};
use crate::wavefield::ComplexField;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub width: usize,
    pub height: usize,
    pub pixel_pitch_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub radius_m: f64,
    /// Defaults to two pixels.
    #[serde(default)]
    pub edge_width_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub nx: usize,
    pub ny: usize,
    pub step_m: f64,
    /// First position relative to the grid center; centered grid if absent.
    #[serde(default)]
    pub origin_m: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhantomKind {
    ResolutionTarget,
    NaturalTexture,
    Flat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectConfig {
    /// Amplitude from a grayscale PNG (pixel value / full scale), optional
    /// phase PNG mapped linearly onto `[-pi, pi)`. Paths are relative to the
    /// config file.
    Png {
        amplitude: PathBuf,
        #[serde(default)]
        phase: Option<PathBuf>,
    },
    Phantom {
        kind: PhantomKind,
        #[serde(default)]
        seed: u64,
        /// Side of the target square in pixels (resolution target only).
        #[serde(default)]
        size_pixels: Option<usize>,
        /// Phase excursion in radians (natural texture only).
        #[serde(default)]
        max_phase_rad: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub grid: GridConfig,
    pub wavelength_m: f64,
    pub distance_m: f64,
    pub probe: ProbeConfig,
    pub scan: ScanConfig,
    pub object: ObjectConfig,
    #[serde(default)]
    pub medium: MediumModel,
    #[serde(default)]
    pub detector: DetectorModel,
    /// Base name for the stack files.
    #[serde(default = "default_stack_name")]
    pub output_name: String,
}

fn default_stack_name() -> String {
    "stack".to_string()
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

impl SimulateConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: SimulateConfig = read_json(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let wrap = |e: Error| Error::Config(e.to_string());
        self.probe_spec().map_err(wrap)?;
        self.scan_plan().map_err(wrap)?;
        self.medium.validate().map_err(wrap)?;
        self.detector.validate().map_err(wrap)?;
        if !(self.distance_m.is_finite() && self.distance_m > 0.0) {
            return Err(Error::Config(format!(
                "distance_m must be positive, got {}",
                self.distance_m
            )));
        }
        if self.output_name.is_empty() || self.output_name.contains(['/', '\\']) {
            return Err(Error::Config(format!(
                "bad output_name {:?}",
                self.output_name
            )));
        }
        self.template().map_err(wrap)?;
        Ok(())
    }

    pub fn probe_spec(&self) -> Result<ProbeSpec> {
        let edge = self
            .probe
            .edge_width_m
            .unwrap_or(2.0 * self.grid.pixel_pitch_m);
        ProbeSpec::new(self.probe.radius_m, edge)
    }

    pub fn scan_plan(&self) -> Result<ScanPlan> {
        let s = &self.scan;
        let mut plan = match s.origin_m {
            Some(origin) => ScanPlan::new(s.nx, s.ny, s.step_m, origin)?,
            None => ScanPlan::centered(s.nx, s.ny, s.step_m)?,
        };
        plan.order = ScanOrder::Raster;
        Ok(plan)
    }

    /// Empty field on the configured grid.
    pub fn template(&self) -> Result<ComplexField> {
        ComplexField::filled(
            self.grid.width,
            self.grid.height,
            self.grid.pixel_pitch_m,
            self.wavelength_m,
            Complex64::new(0.0, 0.0),
        )
    }

    /// Builds the object; relative PNG paths resolve against `base_dir`.
    pub fn build_object(&self, base_dir: &Path) -> Result<ComplexField> {
        let template = self.template()?;
        match &self.object {
            ObjectConfig::Phantom {
                kind,
                seed,
                size_pixels,
                max_phase_rad,
            } => match kind {
                PhantomKind::ResolutionTarget => phantom::resolution_target(
                    &template,
                    size_pixels.unwrap_or(template.width().min(template.height()) / 2),
                ),
                PhantomKind::NaturalTexture => {
                    phantom::natural_texture(&template, *seed, max_phase_rad.unwrap_or(0.0))
                }
                PhantomKind::Flat => {
                    template.with_data(vec![Complex64::new(1.0, 0.0); template.len()])
                }
            },
            ObjectConfig::Png { amplitude, phase } => {
                let amp = read_grayscale_png(&base_dir.join(amplitude))?;
                if amp.shape() != template.shape() {
                    return Err(Error::Config(format!(
                        "amplitude image is {}x{}, grid is {}x{}",
                        amp.width(),
                        amp.height(),
                        template.width(),
                        template.height()
                    )));
                }
                let phase = match phase {
                    Some(p) => {
                        let ph = read_grayscale_png(&base_dir.join(p))?;
                        if ph.shape() != amp.shape() {
                            return Err(Error::Config(
                                "phase image size differs from amplitude".into(),
                            ));
                        }
                        ph.data()
                            .iter()
                            .map(|v| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * v)
                            .collect()
                    }
                    None => vec![0.0; amp.data().len()],
                };
                let data = amp
                    .data()
                    .iter()
                    .zip(&phase)
                    .map(|(&a, &p)| Complex64::from_polar(a, p))
                    .collect();
                template.with_data(data)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ProbeInitChoice {
    #[default]
    Identity,
    Aperture,
}

/// Reconstruction settings as read from JSON; every field optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconFileConfig {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub epsilon: Option<f64>,
    pub max_iterations: Option<usize>,
    pub distance_m: Option<f64>,
    pub probe_init: Option<ProbeInitChoice>,
    pub update_probe: Option<bool>,
    pub probe_support_dilation_m: Option<f64>,
    /// Shuffle the pattern order each sweep with this seed.
    pub shuffle_seed: Option<u64>,
}

impl ReconFileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }

    /// Resolves into an engine config. `probe` supplies the aperture when
    /// `probe_init` is `aperture`.
    pub fn resolve(&self, probe: Option<ProbeSpec>) -> Result<ReconConfig> {
        let d = ReconConfig::default();
        let probe_init = match self.probe_init.unwrap_or_default() {
            ProbeInitChoice::Identity => ProbeInit::Identity,
            ProbeInitChoice::Aperture => ProbeInit::Aperture(probe.ok_or_else(|| {
                Error::Config("aperture probe init needs a probe spec in the stack manifest".into())
            })?),
        };
        let cfg = ReconConfig {
            alpha: self.alpha.unwrap_or(d.alpha),
            beta: self.beta.unwrap_or(d.beta),
            epsilon: self.epsilon.unwrap_or(d.epsilon),
            max_iterations: self.max_iterations.unwrap_or(d.max_iterations),
            distance: self.distance_m,
            probe_init,
            object_init: d.object_init,
            update_probe: self.update_probe.unwrap_or(d.update_probe),
            probe_support_dilation: self.probe_support_dilation_m,
            traversal: match self.shuffle_seed {
                Some(seed) => Traversal::Shuffled { seed },
                None => Traversal::Raster,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
