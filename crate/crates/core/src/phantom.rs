//! Synthetic test objects.

use num_complex::Complex64;

use crate::diffsim::correlated_gaussian_field;
use crate::error::Result;
use crate::wavefield::ComplexField;

/// Background transmission of [`resolution_target`].
pub const TARGET_BACKGROUND: f64 = 0.9;

fn empty_like(template: &ComplexField) -> Result<ComplexField> {
    ComplexField::filled(
        template.width(),
        template.height(),
        template.pixel_pitch(),
        template.wavelength(),
        Complex64::new(0.0, 0.0),
    )
}

/// Bar groups of three periods plus two gray patches on a flat background,
/// laid out inside a `size`-pixel square centered on the grid. The lower
/// right quadrant of that square is left flat.
pub fn resolution_target(template: &ComplexField, size: usize) -> Result<ComplexField> {
    let base = empty_like(template)?;
    let (cx, cy) = base.center_index();
    let half = size as isize / 2;
    let q = (size as isize / 8).max(1);
    ComplexField::from_fn(
        base.width(),
        base.height(),
        base.pixel_pitch(),
        base.wavelength(),
        |ix, iy| {
            let x = ix as isize - cx as isize;
            let y = iy as isize - cy as isize;
            let mut a = TARGET_BACKGROUND;
            if x.abs() <= half && y.abs() <= half {
                let (u, v) = (x + half, y + half);
                let cell = |lo: isize, hi: isize, w: isize| w >= lo * q && w < hi * q;
                // vertical bars, three periods
                for (k, period) in [(0isize, 2 * q / 3), (1, q / 2), (2, q / 3)] {
                    let period = period.max(2);
                    if cell(1, 3, v) && cell(1 + k, 2 + k, u) && (u / (period / 2).max(1)) % 2 == 0
                    {
                        a = 0.25;
                    }
                }
                // horizontal bars
                if cell(1, 3, u + 2 * q)
                    && cell(5, 7, v)
                    && u < 3 * q
                    && (v / (q / 3).max(1)) % 2 == 0
                {
                    a = 0.25;
                }
                if cell(3, 5, u) && cell(4, 6, v) {
                    a = 0.55;
                }
                if cell(1, 2, u) && cell(3, 4, v) {
                    a = 0.7;
                }
            }
            Complex64::new(a, 0.0)
        },
    )
}

/// Rescales `values` linearly onto `[lo, hi]`.
fn stretch(values: &mut [f64], lo: f64, hi: f64) {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = (max - min).max(f64::MIN_POSITIVE);
    values
        .iter_mut()
        .for_each(|v| *v = lo + (hi - lo) * (*v - min) / span);
}

/// Continuous-tone object with structure at several scales, standing in for
/// a natural photograph. Amplitude spans `[0.2, 1]`; phase is a smooth field
/// of up to `max_phase` radians.
pub fn natural_texture(template: &ComplexField, seed: u64, max_phase: f64) -> Result<ComplexField> {
    let (w, h) = template.shape();
    let mut amp = vec![0.0; w * h];
    for (i, (grain, weight)) in [(24.0, 1.0), (9.0, 0.6), (3.0, 0.3)]
        .into_iter()
        .enumerate()
    {
        let layer = correlated_gaussian_field(w, h, grain, seed.wrapping_add(i as u64));
        amp.iter_mut()
            .zip(&layer)
            .for_each(|(a, l)| *a += weight * l);
    }
    // soft gradient so the texture is not statistically stationary
    for (i, a) in amp.iter_mut().enumerate() {
        *a += 0.8 * ((i % w) as f64 / w as f64 - 0.5);
    }
    stretch(&mut amp, 0.2, 1.0);
    let mut phase = correlated_gaussian_field(w, h, 16.0, seed.wrapping_add(100));
    stretch(&mut phase, -max_phase, max_phase);
    let data = amp
        .iter()
        .zip(&phase)
        .map(|(&a, &p)| Complex64::from_polar(a, p))
        .collect();
    template.with_data(data)
}
