use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::parallel::with_thread_cap;
use crate::scangeom::{
    check_probe_fits, make_probe, scan_positions, snap_to_pixels, ProbeSpec, ScanPlan,
};
use crate::wavefield::{intensity, AngularSpectrum, ComplexField, RealImage};

use super::medium::{apply_shower_curtain, derive_seed, DetectorModel, MediumModel};
use super::stack::PatternStack;

/// Seed salt for the detector read-noise stream of a frame.
const READ_NOISE_STREAM: u64 = 0x5EAD;

/// Bounding box `(x0, y0, x1, y1)` of the non-zero samples, inclusive.
fn support_bbox(field: &ComplexField) -> Option<(usize, usize, usize, usize)> {
    let (w, _) = field.shape();
    let mut bbox: Option<(usize, usize, usize, usize)> = None;
    for (i, z) in field.data().iter().enumerate() {
        if z.re != 0.0 || z.im != 0.0 {
            let (x, y) = (i % w, i / w);
            bbox = Some(match bbox {
                None => (x, y, x, y),
                Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
            });
        }
    }
    bbox
}

fn check_shift_in_bounds(probe: &ComplexField, shift: (isize, isize)) -> Result<()> {
    let Some((x0, y0, x1, y1)) = support_bbox(probe) else {
        return Ok(());
    };
    let (w, h) = (probe.width() as isize, probe.height() as isize);
    let in_range =
        |lo: usize, hi: usize, s: isize, n: isize| lo as isize + s >= 0 && hi as isize + s < n;
    if in_range(x0, x1, shift.0, w) && in_range(y0, y1, shift.1, h) {
        Ok(())
    } else {
        Err(Error::OutOfBounds(format!(
            "probe support shifted by {shift:?} pixels leaves the {w}x{h} grid"
        )))
    }
}

fn clean_pattern(
    object: &ComplexField,
    probe: &ComplexField,
    shift: (isize, isize),
    propagator: &AngularSpectrum,
) -> Result<RealImage> {
    let shifted = probe.shifted(shift.0, shift.1);
    let exit: Vec<_> = object
        .data()
        .iter()
        .zip(shifted.data())
        .map(|(o, p)| o * p)
        .collect();
    let exit = object.with_data(exit)?;
    Ok(intensity(&propagator.forward(&exit)?))
}

/// Intensity at the detector for one probe position.
///
/// The probe is translated by whole pixels to `position` (meters from the
/// grid center), the exit wave is propagated over `distance`, and the
/// medium's speckle is imposed on the resulting intensity.
pub fn simulate_pattern(
    object: &ComplexField,
    probe: &ComplexField,
    position: (f64, f64),
    distance: f64,
    medium: &MediumModel,
    frame_seed: u64,
) -> Result<RealImage> {
    object.check_same_grid(probe)?;
    check_distance(distance)?;
    let shift = snap_to_pixels(position, object.pixel_pitch());
    check_shift_in_bounds(probe, shift)?;
    let propagator = AngularSpectrum::for_field(object, distance)?;
    let clean = clean_pattern(object, probe, shift, &propagator)?;
    apply_shower_curtain(&clean, medium, frame_seed)
}

fn check_distance(distance: f64) -> Result<()> {
    if !(distance.is_finite() && distance > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "object-to-medium distance must be positive, got {distance}"
        )));
    }
    Ok(())
}

/// Simulates a full raster scan with an ideal detector.
pub fn simulate_dataset(
    object: &ComplexField,
    plan: &ScanPlan,
    spec: &ProbeSpec,
    distance: f64,
    medium: &MediumModel,
) -> Result<PatternStack> {
    simulate_dataset_with_detector(
        object,
        plan,
        spec,
        distance,
        medium,
        &DetectorModel::default(),
    )
}

/// Simulates a full raster scan.
///
/// Every pattern draws its noise from a seed derived from `(medium.seed,
/// index)`, so patterns are computed in parallel with results identical to
/// a serial run. Intensities are rounded to `f32`, the precision of the
/// on-disk payload.
pub fn simulate_dataset_with_detector(
    object: &ComplexField,
    plan: &ScanPlan,
    spec: &ProbeSpec,
    distance: f64,
    medium: &MediumModel,
    detector: &DetectorModel,
) -> Result<PatternStack> {
    plan.validate()?;
    spec.validate()?;
    medium.validate()?;
    detector.validate()?;
    check_distance(distance)?;
    let pitch = object.pixel_pitch();
    let positions: Vec<(f64, f64)> = scan_positions(plan)
        .into_iter()
        .map(|p| {
            let (sx, sy) = snap_to_pixels(p, pitch);
            (sx as f64 * pitch, sy as f64 * pitch)
        })
        .collect();
    for &p in &positions {
        check_probe_fits(spec, object, p)?;
    }
    let probe = make_probe(spec, object, (0.0, 0.0))?;
    let propagator = AngularSpectrum::for_field(object, distance)?;

    let patterns = with_thread_cap(|| {
        positions
            .par_iter()
            .enumerate()
            .map(|(i, &p)| {
                let frame_seed = derive_seed(medium.seed, i as u64);
                let clean = clean_pattern(object, &probe, snap_to_pixels(p, pitch), &propagator)?;
                let noisy = apply_shower_curtain(&clean, medium, frame_seed)?;
                let recorded = detector.apply(noisy, derive_seed(frame_seed, READ_NOISE_STREAM))?;
                let (w, h) = recorded.shape();
                let quantized = recorded
                    .into_data()
                    .into_iter()
                    .map(|v| v as f32 as f64)
                    .collect();
                RealImage::new(w, h, quantized)
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut stack = PatternStack::new(patterns, positions, pitch, object.wavelength(), distance)?;
    stack.medium = *medium;
    stack.detector = *detector;
    stack.probe = Some(*spec);
    stack.plan = Some(*plan);
    stack.order = plan.order;
    Ok(stack)
}
