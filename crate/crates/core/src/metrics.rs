//! Region statistics and reconstruction scores.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavefield::{ComplexField, RealImage, Rect};

/// Mean and population standard deviation of `image` inside `region`.
pub fn region_stats(image: &RealImage, region: Rect) -> Result<(f64, f64)> {
    let patch = image.crop(region)?;
    Ok((patch.mean(), patch.std()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub region: Rect,
    pub mean: f64,
    pub std: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sse_history: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fov_extent_m: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlap_rate: Option<f64>,
}

impl MetricsReport {
    pub fn for_region(image: &RealImage, region: Rect) -> Result<Self> {
        let (mean, std) = region_stats(image, region)?;
        Ok(MetricsReport {
            region,
            mean,
            std,
            sse_history: None,
            fov_extent_m: None,
            overlap_rate: None,
        })
    }
}

fn masked<'a>(values: &'a [f64], mask: &'a [bool]) -> impl Iterator<Item = f64> + 'a {
    values.iter().zip(mask).filter(|(_, &m)| m).map(|(v, _)| *v)
}

fn check_lengths(a: usize, b: usize, mask: usize) -> Result<()> {
    if a != b || a != mask {
        return Err(Error::InvalidParameter(format!(
            "length mismatch: {a} vs {b} vs mask {mask}"
        )));
    }
    Ok(())
}

/// Pearson correlation of `a` and `b` over the masked pixels. Invariant to
/// a global gain and offset, which covers the object/probe scale ambiguity.
pub fn masked_correlation(a: &[f64], b: &[f64], mask: &[bool]) -> Result<f64> {
    check_lengths(a.len(), b.len(), mask.len())?;
    let n = mask.iter().filter(|&&m| m).count();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "mask selects fewer than two pixels".into(),
        ));
    }
    let ma = masked(a, mask).sum::<f64>() / n as f64;
    let mb = masked(b, mask).sum::<f64>() / n as f64;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in masked(a, mask).zip(masked(b, mask)) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    if saa == 0.0 || sbb == 0.0 {
        return Ok(0.0);
    }
    Ok(sab / (saa * sbb).sqrt())
}

/// Correlation of reconstructed and true amplitudes over `mask`.
pub fn amplitude_correlation(
    reconstructed: &ComplexField,
    truth: &ComplexField,
    mask: &[bool],
) -> Result<f64> {
    masked_correlation(
        reconstructed.amplitude().data(),
        truth.amplitude().data(),
        mask,
    )
}

/// Least-squares gain `g` minimizing `sum |g * a - b|^2` over the mask.
pub fn fit_gain(a: &[f64], b: &[f64], mask: &[bool]) -> Result<f64> {
    check_lengths(a.len(), b.len(), mask.len())?;
    let num: f64 = masked(a, mask)
        .zip(masked(b, mask))
        .map(|(x, y)| x * y)
        .sum();
    let den: f64 = masked(a, mask).map(|x| x * x).sum();
    if den == 0.0 {
        return Err(Error::ZeroNormalization("reconstruction"));
    }
    Ok(num / den)
}

/// Pixels where at least one translated copy of `probe` reaches
/// `threshold` times the probe's peak modulus.
pub fn illuminated_mask(
    probe: &ComplexField,
    shifts: &[(isize, isize)],
    threshold: f64,
) -> Vec<bool> {
    let peak = probe.max_norm_sqr().sqrt();
    let cut = threshold * peak;
    let mut mask = vec![false; probe.len()];
    for &(dx, dy) in shifts {
        let shifted = probe.shifted(dx, dy);
        for (m, z) in mask.iter_mut().zip(shifted.data()) {
            *m |= z.norm() >= cut;
        }
    }
    mask
}

/// Per-pixel number of translated probes reaching `threshold` of the peak.
pub fn coverage_from_probe(
    probe: &ComplexField,
    shifts: &[(isize, isize)],
    threshold: f64,
) -> Vec<u32> {
    let cut = threshold * probe.max_norm_sqr().sqrt();
    let mut counts = vec![0u32; probe.len()];
    for &(dx, dy) in shifts {
        let shifted = probe.shifted(dx, dy);
        for (c, z) in counts.iter_mut().zip(shifted.data()) {
            if z.norm() >= cut {
                *c += 1;
            }
        }
    }
    counts
}

/// Bounding-box extent `(columns, rows)` in pixels of the set pixels.
pub fn mask_extent(mask: &[bool], width: usize) -> Option<(usize, usize)> {
    let mut bbox: Option<(usize, usize, usize, usize)> = None;
    for (i, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
        let (x, y) = (i % width, i / width);
        bbox = Some(match bbox {
            None => (x, y, x, y),
            Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
        });
    }
    bbox.map(|(x0, y0, x1, y1)| (x1 - x0 + 1, y1 - y0 + 1))
}
