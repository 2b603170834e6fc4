use std::f64::consts::PI;

use num_complex::Complex64;

use super::fft::Fft2;
use super::field::{ComplexField, RealImage};
use crate::error::{Error, Result};

/// Spatial frequencies of a grid in standard FFT order (DC at index 0,
/// negative frequencies in the upper half).
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialFrequencyGrid {
    pub fx: Vec<f64>,
    pub fy: Vec<f64>,
}

/// Signed FFT bin index for position `k` of an `n`-point transform.
pub fn fft_bin(k: usize, n: usize) -> isize {
    if k <= (n - 1) / 2 {
        k as isize
    } else {
        k as isize - n as isize
    }
}

impl SpatialFrequencyGrid {
    pub fn new(width: usize, height: usize, pixel_pitch: f64) -> Self {
        let axis = |n: usize| -> Vec<f64> {
            let step = 1.0 / (n as f64 * pixel_pitch);
            (0..n).map(|k| fft_bin(k, n) as f64 * step).collect()
        };
        SpatialFrequencyGrid {
            fx: axis(width),
            fy: axis(height),
        }
    }

    pub fn for_field(field: &ComplexField) -> Self {
        Self::new(field.width(), field.height(), field.pixel_pitch())
    }

    pub fn step_x(&self) -> f64 {
        if self.fx.len() > 1 {
            self.fx[1] - self.fx[0]
        } else {
            0.0
        }
    }

    pub fn step_y(&self) -> f64 {
        if self.fy.len() > 1 {
            self.fy[1] - self.fy[0]
        } else {
            0.0
        }
    }

    /// Whether `(fx, fy)` lies in the propagating band for `wavelength`.
    pub fn is_propagating(wavelength: f64, fx: f64, fy: f64) -> bool {
        1.0 - wavelength * wavelength * (fx * fx + fy * fy) >= 0.0
    }
}

/// Band-limited angular-spectrum transfer function
/// `exp(-i 2 pi d / lambda * sqrt(1 - lambda^2 (fx^2 + fy^2)))`,
/// zero in the evanescent band.
pub fn transfer_function(wavelength: f64, distance: f64, fx: f64, fy: f64) -> Complex64 {
    let radicand = 1.0 - wavelength * wavelength * (fx * fx + fy * fy);
    if radicand < 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(1.0, -2.0 * PI * distance / wavelength * radicand.sqrt())
}

/// True when the transfer-function phase changes by more than pi between
/// neighbouring frequency samples somewhere in the propagating band.
pub fn transfer_undersampled(
    width: usize,
    height: usize,
    pixel_pitch: f64,
    wavelength: f64,
    distance: f64,
) -> bool {
    let axis_undersampled = |n: usize| {
        if n < 2 {
            return false;
        }
        let df = 1.0 / (n as f64 * pixel_pitch);
        let f_nyquist = 0.5 / pixel_pitch;
        // highest sampled frequency still inside the propagating band
        let f_max = f_nyquist.min((1.0 / wavelength) * (1.0 - 1e-9));
        let cos_term = (1.0 - (wavelength * f_max).powi(2)).sqrt();
        let gradient = 2.0 * PI * distance.abs() * wavelength * f_max / cos_term;
        gradient * df > PI
    };
    axis_undersampled(width) || axis_undersampled(height)
}

/// Reusable propagator for one grid and distance.
///
/// Forward propagation applies the transfer function; [`backward`](Self::backward)
/// applies its conjugate, which equals propagation by `-d` on the
/// propagating band. Transforms are unitary so `d = 0` is the identity.
#[derive(Debug, Clone)]
pub struct AngularSpectrum {
    width: usize,
    height: usize,
    pixel_pitch: f64,
    wavelength: f64,
    distance: f64,
    fft: Fft2,
    /// transfer function with the 1/N of the unitary transform pair folded in
    kernel: Vec<Complex64>,
}

impl AngularSpectrum {
    pub fn new(
        width: usize,
        height: usize,
        pixel_pitch: f64,
        wavelength: f64,
        distance: f64,
    ) -> Result<Self> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "wavelength must be positive, got {wavelength}"
            )));
        }
        if !(pixel_pitch.is_finite() && pixel_pitch > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "pixel pitch must be positive, got {pixel_pitch}"
            )));
        }
        if !distance.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "distance must be finite, got {distance}"
            )));
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter("empty grid".into()));
        }
        if transfer_undersampled(width, height, pixel_pitch, wavelength, distance) {
            log::warn!(
                "transfer function phase undersampled: d = {distance} m, lambda = {wavelength} m, \
                 pitch = {pixel_pitch} m, grid {width}x{height}; results will alias"
            );
        }
        let freqs = SpatialFrequencyGrid::new(width, height, pixel_pitch);
        let norm = 1.0 / (width * height) as f64;
        let mut kernel = Vec::with_capacity(width * height);
        for &fy in &freqs.fy {
            for &fx in &freqs.fx {
                kernel.push(transfer_function(wavelength, distance, fx, fy) * norm);
            }
        }
        Ok(AngularSpectrum {
            width,
            height,
            pixel_pitch,
            wavelength,
            distance,
            fft: Fft2::new(width, height),
            kernel,
        })
    }

    pub fn for_field(field: &ComplexField, distance: f64) -> Result<Self> {
        Self::new(
            field.width(),
            field.height(),
            field.pixel_pitch(),
            field.wavelength(),
            distance,
        )
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    fn check(&self, field: &ComplexField) -> Result<()> {
        if field.shape() != (self.width, self.height) {
            return Err(Error::ShapeMismatch {
                expected: (self.width, self.height),
                actual: field.shape(),
            });
        }
        if field.pixel_pitch() != self.pixel_pitch || field.wavelength() != self.wavelength {
            return Err(Error::InvalidField(
                "field pitch or wavelength differs from propagator".into(),
            ));
        }
        field.validate()
    }

    /// Propagates by `+d`.
    pub fn forward(&self, field: &ComplexField) -> Result<ComplexField> {
        self.check(field)?;
        let mut out = field.clone();
        self.apply(out.data_mut(), false);
        Ok(out)
    }

    /// Propagates by `-d` (conjugate kernel).
    pub fn backward(&self, field: &ComplexField) -> Result<ComplexField> {
        self.check(field)?;
        let mut out = field.clone();
        self.apply(out.data_mut(), true);
        Ok(out)
    }

    /// In-place propagation of a raw buffer on this propagator's grid.
    pub(crate) fn apply(&self, data: &mut [Complex64], conjugate: bool) {
        if self.distance == 0.0 {
            return;
        }
        self.fft.forward_unscaled(data);
        if conjugate {
            data.iter_mut()
                .zip(&self.kernel)
                .for_each(|(z, h)| *z *= h.conj());
        } else {
            data.iter_mut().zip(&self.kernel).for_each(|(z, h)| *z *= h);
        }
        self.fft.inverse_unscaled(data);
    }
}

/// Propagates `field` over `distance` meters (negative for back-propagation).
pub fn angular_spectrum_propagate(field: &ComplexField, distance: f64) -> Result<ComplexField> {
    AngularSpectrum::for_field(field, distance)?.forward(field)
}

/// Elementwise squared modulus.
pub fn intensity(field: &ComplexField) -> RealImage {
    RealImage::from_parts(
        field.width(),
        field.height(),
        field.data().iter().map(|z| z.norm_sqr()).collect(),
    )
}

/// Replaces the modulus of `field` with `sqrt(measured)`, keeping the phase.
/// Zero-valued samples take phase 0.
pub fn modulus_replace(field: &ComplexField, measured: &RealImage) -> Result<ComplexField> {
    if field.shape() != measured.shape() {
        return Err(Error::ShapeMismatch {
            expected: field.shape(),
            actual: measured.shape(),
        });
    }
    let mut out = Vec::with_capacity(field.len());
    for (i, (z, &m)) in field.data().iter().zip(measured.data()).enumerate() {
        if m < 0.0 {
            return Err(Error::NegativeMeasurement { index: i, value: m });
        }
        out.push(replace_modulus(*z, m.sqrt()));
    }
    Ok(field.with_data_unchecked(out))
}

#[inline]
pub(crate) fn replace_modulus(z: Complex64, amplitude: f64) -> Complex64 {
    let norm = z.norm();
    if norm == 0.0 {
        Complex64::new(amplitude, 0.0)
    } else {
        z * (amplitude / norm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const LAMBDA: f64 = 532e-9;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_field(n: usize, pitch: f64, seed: u64) -> ComplexField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ComplexField::from_fn(n, n, pitch, LAMBDA, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
        .unwrap()
    }

    /// Random field whose spectrum is zero in the evanescent band.
    fn band_limited_field(n: usize, pitch: f64, seed: u64) -> ComplexField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let freqs = SpatialFrequencyGrid::new(n, n, pitch);
        let mut spectrum = Vec::with_capacity(n * n);
        for &fy in &freqs.fy {
            for &fx in &freqs.fx {
                if SpatialFrequencyGrid::is_propagating(LAMBDA, fx, fy) {
                    spectrum.push(c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
                } else {
                    spectrum.push(c(0.0, 0.0));
                }
            }
        }
        Fft2::new(n, n).inverse(&mut spectrum);
        ComplexField::new(n, n, pitch, LAMBDA, spectrum).unwrap()
    }

    #[test]
    fn frequency_grid_ordering() {
        let g = SpatialFrequencyGrid::new(4, 5, 0.5);
        assert_eq!(g.fx, vec![0.0, 0.5, -1.0, -0.5]);
        assert_eq!(g.fy, vec![0.0, 0.4, 0.8, -0.8, -0.4]);
        assert!((g.step_x() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_distance_is_identity() {
        let f = random_field(16, 6.5e-6, 1);
        assert_eq!(angular_spectrum_propagate(&f, 0.0).unwrap(), f);
    }

    #[test]
    fn plane_wave_picks_up_on_axis_phase() {
        let d = 50e-3;
        let f = ComplexField::filled(32, 32, 6.5e-6, LAMBDA, c(1.0, 0.0)).unwrap();
        let out = angular_spectrum_propagate(&f, d).unwrap();
        let expected = Complex64::from_polar(1.0, -2.0 * PI * d / LAMBDA);
        for z in out.data() {
            assert!((z - expected).norm() < 1e-9, "{z} vs {expected}");
        }
    }

    #[test]
    fn round_trip_with_evanescent_band_present() {
        // 200 nm pitch puts the grid corners beyond 1/lambda
        let pitch = 200e-9;
        let f = band_limited_field(32, pitch, 7);
        let freqs = SpatialFrequencyGrid::new(32, 32, pitch);
        assert!(!SpatialFrequencyGrid::is_propagating(
            LAMBDA,
            freqs.fx[16],
            freqs.fy[16]
        ));
        let prop = AngularSpectrum::for_field(&f, 3e-6).unwrap();
        let back = prop.backward(&prop.forward(&f).unwrap()).unwrap();
        assert!(back.relative_l2_error(&f) < 1e-10);
        let rel = (intensity(&prop.forward(&f).unwrap()).sum() - f.energy()).abs() / f.energy();
        assert!(rel < 1e-9);
    }

    #[test]
    fn evanescent_content_is_removed() {
        let pitch = 200e-9;
        let f = random_field(32, pitch, 3);
        let out = angular_spectrum_propagate(&f, 1e-6).unwrap();
        assert!(out.energy() < f.energy());
    }

    #[test]
    fn rejects_non_finite_field_data() {
        let f = ComplexField::filled(4, 4, 1e-6, LAMBDA, c(1.0, 0.0)).unwrap();
        let mut bad = f.clone();
        bad.data_mut()[3] = c(f64::INFINITY, 0.0);
        assert!(angular_spectrum_propagate(&bad, 1e-3).is_err());
    }

    #[test]
    fn undersampling_guard() {
        assert!(!transfer_undersampled(256, 256, 6.5e-6, LAMBDA, 5e-3));
        assert!(transfer_undersampled(256, 256, 6.5e-6, LAMBDA, 50e-3));
        assert!(transfer_undersampled(256, 256, 6.5e-6, LAMBDA, -50e-3));
    }

    #[test]
    fn intensity_examples() {
        let f = ComplexField::filled(3, 2, 1e-6, LAMBDA, c(1.0, 0.0)).unwrap();
        assert!(intensity(&f).data().iter().all(|&v| v == 1.0));
        let g = ComplexField::from_fn(2, 2, 1e-6, LAMBDA, |x, y| {
            if (x, y) == (1, 0) {
                c(3.0, 4.0)
            } else {
                c(0.0, 0.0)
            }
        })
        .unwrap();
        assert_eq!(intensity(&g).get(1, 0), 25.0);
    }

    #[test]
    fn modulus_replace_examples() {
        let z = Complex64::from_polar(2.0, PI / 3.0);
        let f = ComplexField::new(2, 1, 1e-6, LAMBDA, vec![z, c(0.0, 0.0)]).unwrap();
        let m = RealImage::new(2, 1, vec![9.0, 4.0]).unwrap();
        let out = modulus_replace(&f, &m).unwrap();
        let expected = Complex64::from_polar(3.0, PI / 3.0);
        assert!((out.data()[0] - expected).norm() < 1e-15);
        assert_eq!(out.data()[1], c(2.0, 0.0));

        let same = modulus_replace(&f, &intensity(&f)).unwrap();
        assert!(same.relative_l2_error(&f) < 1e-12);
    }

    #[test]
    fn modulus_replace_errors() {
        let f = ComplexField::filled(2, 2, 1e-6, LAMBDA, c(1.0, 0.0)).unwrap();
        let neg = RealImage::new(2, 2, vec![1.0, -0.5, 1.0, 1.0]).unwrap();
        assert!(matches!(
            modulus_replace(&f, &neg),
            Err(Error::NegativeMeasurement { index: 1, .. })
        ));
        let wrong = RealImage::filled(3, 2, 1.0).unwrap();
        assert!(matches!(
            modulus_replace(&f, &wrong),
            Err(Error::ShapeMismatch { .. })
        ));
    }
}
