//! Pinhole probes, raster scan plans, and the overlap and field-of-view
//! geometry of a scan.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavefield::ComplexField;

/// Circular pinhole with an optional cosine-tapered rim.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpec {
    /// Radius in meters.
    pub radius: f64,
    /// Width of the cosine taper at the rim, meters. Zero is a hard edge.
    pub edge_width: f64,
}

impl ProbeSpec {
    pub fn new(radius: f64, edge_width: f64) -> Result<Self> {
        let spec = ProbeSpec { radius, edge_width };
        spec.validate()?;
        Ok(spec)
    }

    /// Pinhole with the default two-pixel rim taper.
    pub fn with_default_edge(radius: f64, pixel_pitch: f64) -> Result<Self> {
        Self::new(radius, 2.0 * pixel_pitch)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "probe radius must be positive, got {}",
                self.radius
            )));
        }
        if !(self.edge_width >= 0.0 && self.edge_width < self.radius) {
            return Err(Error::InvalidParameter(format!(
                "edge width {} must lie in [0, radius)",
                self.edge_width
            )));
        }
        Ok(())
    }

    /// Aperture transmission at distance `rho` from the center.
    pub fn transmission(&self, rho: f64) -> f64 {
        let inner = self.radius - self.edge_width;
        if rho <= inner {
            1.0
        } else if rho > self.radius {
            0.0
        } else {
            0.5 * (1.0 + (PI * (rho - inner) / self.edge_width).cos())
        }
    }
}

/// Scan traversal order. Only row-major raster is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanOrder {
    #[default]
    Raster,
}

impl std::fmt::Display for ScanOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScanOrder::Raster => f.write_str("raster"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPlan {
    pub nx: usize,
    pub ny: usize,
    /// Step between neighbouring positions, meters.
    pub step: f64,
    /// Position of the first scan point, meters from the grid center.
    pub origin: (f64, f64),
    #[serde(default)]
    pub order: ScanOrder,
}

impl ScanPlan {
    pub fn new(nx: usize, ny: usize, step: f64, origin: (f64, f64)) -> Result<Self> {
        let plan = ScanPlan {
            nx,
            ny,
            step,
            origin,
            order: ScanOrder::Raster,
        };
        plan.validate()?;
        Ok(plan)
    }

    /// Grid of positions centered on the origin.
    pub fn centered(nx: usize, ny: usize, step: f64) -> Result<Self> {
        let origin = (
            -((nx.max(1) - 1) as f64) * step / 2.0,
            -((ny.max(1) - 1) as f64) * step / 2.0,
        );
        Self::new(nx, ny, step, origin)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidParameter(format!(
                "scan grid must be at least 1x1, got {}x{}",
                self.nx, self.ny
            )));
        }
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scan step must be positive, got {}",
                self.step
            )));
        }
        if !(self.origin.0.is_finite() && self.origin.1.is_finite()) {
            return Err(Error::InvalidParameter("scan origin must be finite".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Probe positions in row-major raster order.
pub fn scan_positions(plan: &ScanPlan) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(plan.len());
    for iy in 0..plan.ny {
        for ix in 0..plan.nx {
            out.push((
                plan.origin.0 + ix as f64 * plan.step,
                plan.origin.1 + iy as f64 * plan.step,
            ));
        }
    }
    out
}

/// Nearest whole-pixel shift for a physical offset.
pub fn snap_to_pixels(position: (f64, f64), pixel_pitch: f64) -> (isize, isize) {
    (
        (position.0 / pixel_pitch).round() as isize,
        (position.1 / pixel_pitch).round() as isize,
    )
}

/// Checks that a disk of `spec.radius` centered at `center` lies inside the
/// grid of `template`.
pub fn check_probe_fits(
    spec: &ProbeSpec,
    template: &ComplexField,
    center: (f64, f64),
) -> Result<()> {
    let (w, h) = template.shape();
    let pitch = template.pixel_pitch();
    let (cx, cy) = template.center_index();
    let x_min = -(cx as f64) * pitch;
    let x_max = (w - 1 - cx) as f64 * pitch;
    let y_min = -(cy as f64) * pitch;
    let y_max = (h - 1 - cy) as f64 * pitch;
    // a rim sample at exactly r is already zero, so half a pixel of slack is fine
    let slack = 0.5 * pitch;
    if center.0 - spec.radius < x_min - slack
        || center.0 + spec.radius > x_max + slack
        || center.1 - spec.radius < y_min - slack
        || center.1 + spec.radius > y_max + slack
    {
        return Err(Error::OutOfBounds(format!(
            "probe of radius {} m at ({}, {}) m exceeds the {w}x{h} grid",
            spec.radius, center.0, center.1
        )));
    }
    Ok(())
}

/// Renders the pinhole centered at `center` (meters from the grid center)
/// on the grid of `template`.
pub fn make_probe(
    spec: &ProbeSpec,
    template: &ComplexField,
    center: (f64, f64),
) -> Result<ComplexField> {
    spec.validate()?;
    check_probe_fits(spec, template, center)?;
    let (w, h) = template.shape();
    let pitch = template.pixel_pitch();
    ComplexField::from_fn(w, h, pitch, template.wavelength(), |ix, iy| {
        let (x, y) = template.coordinate(ix, iy);
        let rho = (x - center.0).hypot(y - center.1);
        Complex64::new(spec.transmission(rho), 0.0)
    })
}

/// Intersection area of two disks of radius `r` whose centers are `s` apart.
pub fn overlap_area(r: f64, s: f64) -> f64 {
    if s >= 2.0 * r {
        return 0.0;
    }
    if s == 0.0 {
        return PI * r * r;
    }
    2.0 * r * r * (s / (2.0 * r)).acos() - 0.5 * s * (4.0 * r * r - s * s).sqrt()
}

/// Fraction of one illuminated disk shared with its neighbour.
pub fn overlap_rate(r: f64, s: f64) -> f64 {
    overlap_area(r, s) / (PI * r * r)
}

/// Accepted overlap band for reliable reconstruction.
pub const RECOMMENDED_OVERLAP: (f64, f64) = (0.75, 0.85);

/// Extent (x, y) in meters of the union of all probe disks.
pub fn fov_extent(plan: &ScanPlan, spec: &ProbeSpec) -> (f64, f64) {
    (
        (plan.nx - 1) as f64 * plan.step + 2.0 * spec.radius,
        (plan.ny - 1) as f64 * plan.step + 2.0 * spec.radius,
    )
}

/// Per-pixel count of probe disks (`transmission >= 0.5`) covering the
/// grid, for every scan position.
pub fn coverage_counts(
    plan: &ScanPlan,
    spec: &ProbeSpec,
    width: usize,
    height: usize,
    pixel_pitch: f64,
) -> Vec<u32> {
    let (cx, cy) = (width / 2, height / 2);
    let mut counts = vec![0u32; width * height];
    for (px, py) in scan_positions(plan) {
        for iy in 0..height {
            let y = (iy as f64 - cy as f64) * pixel_pitch - py;
            for ix in 0..width {
                let x = (ix as f64 - cx as f64) * pixel_pitch - px;
                if spec.transmission(x.hypot(y)) >= 0.5 {
                    counts[iy * width + ix] += 1;
                }
            }
        }
    }
    counts
}
