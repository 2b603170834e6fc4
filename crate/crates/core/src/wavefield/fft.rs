use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Planned 2-D FFT over a row-major `width x height` buffer.
///
/// Rows are transformed in place; columns go through a transpose so both
/// passes run over contiguous memory.
#[derive(Clone)]
pub struct Fft2 {
    width: usize,
    height: usize,
    row_forward: Arc<dyn Fft<f64>>,
    row_inverse: Arc<dyn Fft<f64>>,
    col_forward: Arc<dyn Fft<f64>>,
    col_inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish()
    }
}

impl Fft2 {
    pub fn new(width: usize, height: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            width,
            height,
            row_forward: planner.plan_fft_forward(width),
            row_inverse: planner.plan_fft_inverse(width),
            col_forward: planner.plan_fft_forward(height),
            col_inverse: planner.plan_fft_inverse(height),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Unnormalized forward transform, `exp(-i 2 pi k n / N)` kernel.
    pub fn forward_unscaled(&self, data: &mut [Complex64]) {
        self.run(data, &self.row_forward, &self.col_forward);
    }

    /// Unnormalized inverse transform, `exp(+i 2 pi k n / N)` kernel.
    pub fn inverse_unscaled(&self, data: &mut [Complex64]) {
        self.run(data, &self.row_inverse, &self.col_inverse);
    }

    /// Unitary forward transform (scaled by `1/sqrt(N)`).
    pub fn forward(&self, data: &mut [Complex64]) {
        self.forward_unscaled(data);
        self.scale(data);
    }

    /// Unitary inverse transform (scaled by `1/sqrt(N)`).
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inverse_unscaled(data);
        self.scale(data);
    }

    fn scale(&self, data: &mut [Complex64]) {
        let s = 1.0 / ((self.width * self.height) as f64).sqrt();
        data.iter_mut().for_each(|z| *z *= s);
    }

    fn run(&self, data: &mut [Complex64], rows: &Arc<dyn Fft<f64>>, cols: &Arc<dyn Fft<f64>>) {
        assert_eq!(
            data.len(),
            self.width * self.height,
            "buffer does not match plan"
        );
        let mut scratch = vec![
            Complex64::new(0.0, 0.0);
            rows.get_inplace_scratch_len()
                .max(cols.get_inplace_scratch_len())
        ];
        rows.process_with_scratch(data, &mut scratch);
        if self.height == 1 {
            return;
        }
        let mut transposed = vec![Complex64::new(0.0, 0.0); data.len()];
        transpose(data, &mut transposed, self.width, self.height);
        cols.process_with_scratch(&mut transposed, &mut scratch);
        transpose(&transposed, data, self.height, self.width);
    }
}

/// `src` is `rows x cols` row-major with `cols = width`; writes its transpose.
fn transpose(src: &[Complex64], dst: &mut [Complex64], width: usize, height: usize) {
    const BLOCK: usize = 16;
    for by in (0..height).step_by(BLOCK) {
        for bx in (0..width).step_by(BLOCK) {
            for y in by..(by + BLOCK).min(height) {
                for x in bx..(bx + BLOCK).min(width) {
                    dst[x * height + y] = src[y * width + x];
                }
            }
        }
    }
}
