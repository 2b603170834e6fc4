use num_complex::Complex64;

use crate::error::{Error, Result};

/// A sampled complex amplitude on a square-pixel grid.
///
/// Pixel `(ix, iy)` sits at physical coordinate
/// `((ix - width/2) * pitch, (iy - height/2) * pitch)`, so the grid center is
/// the origin for probe placement and scan offsets. Data is row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    width: usize,
    height: usize,
    pixel_pitch: f64,
    wavelength: f64,
    data: Vec<Complex64>,
}

fn check_grid(width: usize, height: usize, pixel_pitch: f64, wavelength: f64) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidField(format!(
            "grid must be at least 1x1, got {width}x{height}"
        )));
    }
    if !(pixel_pitch.is_finite() && pixel_pitch > 0.0) {
        return Err(Error::InvalidField(format!(
            "pixel pitch must be positive, got {pixel_pitch}"
        )));
    }
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(Error::InvalidField(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    Ok(())
}

impl ComplexField {
    pub fn new(
        width: usize,
        height: usize,
        pixel_pitch: f64,
        wavelength: f64,
        data: Vec<Complex64>,
    ) -> Result<Self> {
        check_grid(width, height, pixel_pitch, wavelength)?;
        if data.len() != width * height {
            return Err(Error::InvalidField(format!(
                "data length {} does not match {width}x{height}",
                data.len()
            )));
        }
        let field = ComplexField {
            width,
            height,
            pixel_pitch,
            wavelength,
            data,
        };
        field.validate()?;
        Ok(field)
    }

    pub fn filled(
        width: usize,
        height: usize,
        pixel_pitch: f64,
        wavelength: f64,
        value: Complex64,
    ) -> Result<Self> {
        Self::new(
            width,
            height,
            pixel_pitch,
            wavelength,
            vec![value; width * height],
        )
    }

    /// Builds a field by evaluating `f(ix, iy)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        pixel_pitch: f64,
        wavelength: f64,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for iy in 0..height {
            for ix in 0..width {
                data.push(f(ix, iy));
            }
        }
        Self::new(width, height, pixel_pitch, wavelength, data)
    }

    /// A field on the same grid as `self` with new samples.
    pub fn with_data(&self, data: Vec<Complex64>) -> Result<Self> {
        Self::new(
            self.width,
            self.height,
            self.pixel_pitch,
            self.wavelength,
            data,
        )
    }

    /// Same grid, unchecked samples. Callers guarantee finiteness.
    pub(crate) fn with_data_unchecked(&self, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), self.width * self.height);
        ComplexField {
            width: self.width,
            height: self.height,
            pixel_pitch: self.pixel_pitch,
            wavelength: self.wavelength,
            data,
        }
    }

    /// Checks that every sample is finite.
    pub fn validate(&self) -> Result<()> {
        if let Some(i) = self
            .data
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::InvalidField(format!(
                "non-finite sample {} at index {i}",
                self.data[i]
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn pixel_pitch(&self) -> f64 {
        self.pixel_pitch
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn get(&self, ix: usize, iy: usize) -> Complex64 {
        self.data[iy * self.width + ix]
    }

    /// Index of the pixel that sits at the physical origin.
    pub fn center_index(&self) -> (usize, usize) {
        (self.width / 2, self.height / 2)
    }

    /// Physical coordinate of pixel `(ix, iy)` in meters.
    pub fn coordinate(&self, ix: usize, iy: usize) -> (f64, f64) {
        let (cx, cy) = self.center_index();
        (
            (ix as f64 - cx as f64) * self.pixel_pitch,
            (iy as f64 - cy as f64) * self.pixel_pitch,
        )
    }

    pub fn same_grid(&self, other: &ComplexField) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.pixel_pitch == other.pixel_pitch
            && self.wavelength == other.wavelength
    }

    pub fn check_same_grid(&self, other: &ComplexField) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                actual: other.shape(),
            });
        }
        if !self.same_grid(other) {
            return Err(Error::InvalidField(format!(
                "grid mismatch: pitch {} vs {}, wavelength {} vs {}",
                self.pixel_pitch, other.pixel_pitch, self.wavelength, other.wavelength
            )));
        }
        Ok(())
    }

    /// Circularly translates the field by whole pixels. Positive `dx` moves
    /// content toward larger column indices.
    pub fn shifted(&self, dx: isize, dy: isize) -> ComplexField {
        let (w, h) = (self.width as isize, self.height as isize);
        let mut out = vec![Complex64::new(0.0, 0.0); self.data.len()];
        for iy in 0..h {
            let ty = (iy + dy).rem_euclid(h) as usize;
            let src_row = &self.data[(iy * w) as usize..((iy + 1) * w) as usize];
            let dst_row = &mut out[ty * self.width..(ty + 1) * self.width];
            for (ix, &v) in src_row.iter().enumerate() {
                let tx = (ix as isize + dx).rem_euclid(w) as usize;
                dst_row[tx] = v;
            }
        }
        self.with_data_unchecked(out)
    }

    /// Sum of squared moduli.
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max)
    }

    pub fn amplitude(&self) -> RealImage {
        RealImage::from_parts(
            self.width,
            self.height,
            self.data.iter().map(|z| z.norm()).collect(),
        )
    }

    /// Phase in `[-pi, pi]`.
    pub fn phase(&self) -> RealImage {
        RealImage::from_parts(
            self.width,
            self.height,
            self.data.iter().map(|z| z.arg()).collect(),
        )
    }

    /// Relative L2 distance `||self - other|| / ||other||`.
    pub fn relative_l2_error(&self, reference: &ComplexField) -> f64 {
        let num: f64 = self
            .data
            .iter()
            .zip(&reference.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let den = reference.energy();
        if den == 0.0 {
            num.sqrt()
        } else {
            (num / den).sqrt()
        }
    }
}

/// A real-valued image (intensities, amplitudes, phases), row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

/// Axis-aligned pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl Rect {
    pub fn new(x: usize, y: usize, width: usize, height: usize) -> Self {
        Rect {
            x,
            y,
            width,
            height,
        }
    }

    pub fn fits_in(&self, width: usize, height: usize) -> bool {
        self.width > 0
            && self.height > 0
            && self.x + self.width <= width
            && self.y + self.height <= height
    }
}

impl std::str::FromStr for Rect {
    type Err = Error;

    /// Parses `x,y,w,h`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidParameter(format!("bad rectangle {s:?}: {e}")))?;
        match parts[..] {
            [x, y, w, h] => Ok(Rect::new(x, y, w, h)),
            _ => Err(Error::InvalidParameter(format!(
                "rectangle {s:?} must be x,y,w,h"
            ))),
        }
    }
}

impl RealImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidField(format!(
                "image must be at least 1x1, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidField(format!(
                "data length {} does not match {width}x{height}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!(
                "non-finite pixel {} at index {i}",
                data[i]
            )));
        }
        Ok(RealImage {
            width,
            height,
            data,
        })
    }

    pub(crate) fn from_parts(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        RealImage {
            width,
            height,
            data,
        }
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for iy in 0..height {
            for ix in 0..width {
                data.push(f(ix, iy));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.data[iy * self.width + ix]
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.data.len() as f64
    }

    /// Population standard deviation.
    pub fn std(&self) -> f64 {
        population_std(&self.data)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn crop(&self, rect: Rect) -> Result<RealImage> {
        if !rect.fits_in(self.width, self.height) {
            return Err(Error::OutOfBounds(format!(
                "region {rect:?} exceeds {}x{} image",
                self.width, self.height
            )));
        }
        let mut data = Vec::with_capacity(rect.width * rect.height);
        for iy in rect.y..rect.y + rect.height {
            let row = iy * self.width;
            data.extend_from_slice(&self.data[row + rect.x..row + rect.x + rect.width]);
        }
        Ok(RealImage::from_parts(rect.width, rect.height, data))
    }
}

pub(crate) fn population_std(values: &[f64]) -> f64 {
    if values.is_empty() || values.iter().all(|&v| v == values[0]) {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    var.sqrt()
}
