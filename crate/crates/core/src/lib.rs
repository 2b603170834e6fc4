//! Lensless imaging through a scattering layer by ptychography.
//!
//! A pinhole illuminates overlapping patches of a complex object. The exit
//! wave travels a distance `d` to a scattering layer whose front-surface
//! intensity is relayed onto a camera; the layer scrambles phase but leaves
//! the intensity intact up to a speckle texture. The crate simulates that
//! acquisition and recovers object and probe from the recorded patterns.
//!
//! - [`wavefield`]: complex fields and angular-spectrum propagation
//! - [`scangeom`]: pinhole probes, raster scans, overlap and field of view
//! - [`diffsim`]: pattern synthesis for static and moving media
//! - [`epie`]: the iterative reconstruction
//! - [`metrics`]: region statistics and reconstruction scores
//! - [`formats`], [`config`], [`commands`]: on-disk formats and the
//!   `scatterptych` command-line front end

pub mod commands;
pub mod config;
pub mod diffsim;
pub mod epie;
mod error;
pub mod formats;
pub mod metrics;
pub mod parallel;
pub mod phantom;
pub mod scangeom;
pub mod wavefield;

pub use error::{Error, Result};

pub use diffsim::{
    apply_shower_curtain, simulate_dataset, simulate_pattern, DetectorModel, MediumKind,
    MediumModel, PatternStack,
};
pub use epie::{reconstruct, ProbeInit, ReconConfig, ReconResult};
pub use scangeom::{
    fov_extent, make_probe, overlap_area, overlap_rate, scan_positions, ProbeSpec, ScanPlan,
};
pub use wavefield::{
    angular_spectrum_propagate, intensity, modulus_replace, ComplexField, RealImage, Rect,
};
