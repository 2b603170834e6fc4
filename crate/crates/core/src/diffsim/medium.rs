use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavefield::RealImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MediumKind {
    /// Detector sees the front-surface intensity unperturbed.
    None,
    /// One speckle realization per exposure.
    Static,
    /// Medium moves during the exposure; `frames_averaged` realizations are averaged.
    Dynamic,
}

/// Residual speckle noise left by the scattering layer after relay to the
/// detector. The phase scrambling of the layer does not reach the detector;
/// only a unit-mean multiplicative intensity texture does.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "MediumRepr")]
pub struct MediumModel {
    pub kind: MediumKind,
    /// Correlation length of the speckle texture, pixels.
    pub grain_pixels: f64,
    /// Standard deviation of the multiplicative texture relative to its mean.
    pub contrast: f64,
    /// Realizations averaged per exposure (dynamic only).
    pub frames_averaged: usize,
    pub seed: u64,
}

pub const DEFAULT_DYNAMIC_FRAMES: usize = 16;

/// Serialized form with optional fields; a dynamic medium without an
/// explicit frame count averages [`DEFAULT_DYNAMIC_FRAMES`].
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MediumRepr {
    kind: MediumKind,
    #[serde(default)]
    grain_pixels: Option<f64>,
    #[serde(default)]
    contrast: Option<f64>,
    #[serde(default)]
    frames_averaged: Option<usize>,
    #[serde(default)]
    seed: u64,
}

impl From<MediumRepr> for MediumModel {
    fn from(r: MediumRepr) -> Self {
        let default_frames = match r.kind {
            MediumKind::Dynamic => DEFAULT_DYNAMIC_FRAMES,
            _ => 1,
        };
        MediumModel {
            kind: r.kind,
            grain_pixels: r.grain_pixels.unwrap_or(1.0),
            contrast: r.contrast.unwrap_or(0.0),
            frames_averaged: r.frames_averaged.unwrap_or(default_frames),
            seed: r.seed,
        }
    }
}

impl Default for MediumModel {
    fn default() -> Self {
        MediumModel::none()
    }
}

impl MediumModel {
    pub fn none() -> Self {
        MediumModel {
            kind: MediumKind::None,
            grain_pixels: 1.0,
            contrast: 0.0,
            frames_averaged: 1,
            seed: 0,
        }
    }

    pub fn static_medium(contrast: f64, grain_pixels: f64, seed: u64) -> Result<Self> {
        let m = MediumModel {
            kind: MediumKind::Static,
            grain_pixels,
            contrast,
            frames_averaged: 1,
            seed,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn dynamic(
        contrast: f64,
        grain_pixels: f64,
        frames_averaged: usize,
        seed: u64,
    ) -> Result<Self> {
        let m = MediumModel {
            kind: MediumKind::Dynamic,
            grain_pixels,
            contrast,
            frames_averaged,
            seed,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.contrast.is_finite() && self.contrast >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "medium contrast must be >= 0, got {}",
                self.contrast
            )));
        }
        if !(self.grain_pixels.is_finite() && self.grain_pixels >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "grain must be >= 1 pixel, got {}",
                self.grain_pixels
            )));
        }
        if self.frames_averaged == 0 {
            return Err(Error::InvalidParameter(
                "frames_averaged must be >= 1".into(),
            ));
        }
        if self.kind == MediumKind::Static && self.frames_averaged != 1 {
            return Err(Error::InvalidParameter(
                "a static medium records a single realization (frames_averaged = 1)".into(),
            ));
        }
        Ok(())
    }

    fn is_noiseless(&self) -> bool {
        self.kind == MediumKind::None || self.contrast == 0.0
    }
}

/// SplitMix64 finalizer; derives independent child seeds from a parent.
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    let mut z = parent.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Normalized 1-D Gaussian taps with `sum(k^2) = 1`, so filtering unit
/// white noise along both axes keeps unit variance.
fn gaussian_taps(sigma: f64) -> Vec<f64> {
    let half = (3.0 * sigma).ceil() as isize;
    let mut taps: Vec<f64> = (-half..=half)
        .map(|i| (-(i as f64).powi(2) / (2.0 * sigma * sigma)).exp())
        .collect();
    let norm = taps.iter().map(|t| t * t).sum::<f64>().sqrt();
    taps.iter_mut().for_each(|t| *t /= norm);
    taps
}

fn convolve_rows(data: &[f64], width: usize, height: usize, taps: &[f64]) -> Vec<f64> {
    let half = (taps.len() / 2) as isize;
    let mut out = vec![0.0; data.len()];
    for y in 0..height {
        let row = &data[y * width..(y + 1) * width];
        for x in 0..width {
            let mut acc = 0.0;
            for (k, t) in taps.iter().enumerate() {
                let sx = (x as isize + k as isize - half).rem_euclid(width as isize) as usize;
                acc += t * row[sx];
            }
            out[y * width + x] = acc;
        }
    }
    out
}

fn convolve_cols(data: &[f64], width: usize, height: usize, taps: &[f64]) -> Vec<f64> {
    let half = (taps.len() / 2) as isize;
    let mut out = vec![0.0; data.len()];
    for y in 0..height {
        for (k, t) in taps.iter().enumerate() {
            let sy = (y as isize + k as isize - half).rem_euclid(height as isize) as usize;
            let src = &data[sy * width..(sy + 1) * width];
            let dst = &mut out[y * width..(y + 1) * width];
            dst.iter_mut().zip(src).for_each(|(d, s)| *d += t * s);
        }
    }
    out
}

/// Unit-variance Gaussian random field with correlation length `grain`
/// pixels (periodic boundaries).
pub fn correlated_gaussian_field(width: usize, height: usize, grain: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let white: Vec<f64> = (0..width * height)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    // filtered-noise autocorrelation falls to 1/e at twice the kernel sigma
    let taps = gaussian_taps(grain / 2.0);
    let rows = convolve_rows(&white, width, height, &taps);
    convolve_cols(&rows, width, height, &taps)
}

/// Log-normal multiplicative texture with unit mean and standard deviation
/// `contrast`.
pub fn speckle_multiplier(
    width: usize,
    height: usize,
    contrast: f64,
    grain: f64,
    seed: u64,
) -> Vec<f64> {
    let sigma = (1.0 + contrast * contrast).ln().sqrt();
    correlated_gaussian_field(width, height, grain, seed)
        .into_iter()
        .map(|g| (sigma * g - 0.5 * sigma * sigma).exp())
        .collect()
}

/// Imposes the medium's residual speckle on a clean detector image.
pub fn apply_shower_curtain(
    clean: &RealImage,
    medium: &MediumModel,
    frame_seed: u64,
) -> Result<RealImage> {
    medium.validate()?;
    if let Some((i, &v)) = clean.data().iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::NegativeMeasurement { index: i, value: v });
    }
    if medium.is_noiseless() {
        return Ok(clean.clone());
    }
    let (w, h) = clean.shape();
    let frames = match medium.kind {
        MediumKind::Dynamic => medium.frames_averaged,
        _ => 1,
    };
    let mut mean_multiplier = vec![0.0; w * h];
    for k in 0..frames {
        let seed = if frames == 1 {
            frame_seed
        } else {
            derive_seed(frame_seed, k as u64)
        };
        let m = speckle_multiplier(w, h, medium.contrast, medium.grain_pixels, seed);
        mean_multiplier
            .iter_mut()
            .zip(&m)
            .for_each(|(a, b)| *a += b);
    }
    let inv = 1.0 / frames as f64;
    let data = clean
        .data()
        .iter()
        .zip(&mean_multiplier)
        .map(|(c, m)| c * m * inv)
        .collect();
    RealImage::new(w, h, data)
}

/// Camera model. The default is an ideal detector.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DetectorModel {
    /// Additive Gaussian read noise, intensity units. Results are clamped at zero.
    #[serde(default)]
    pub read_noise_std: f64,
}

impl DetectorModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.read_noise_std.is_finite() && self.read_noise_std >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "read noise must be >= 0, got {}",
                self.read_noise_std
            )));
        }
        Ok(())
    }

    pub fn apply(&self, image: RealImage, seed: u64) -> Result<RealImage> {
        self.validate()?;
        if self.read_noise_std == 0.0 {
            return Ok(image);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (w, h) = image.shape();
        let data = image
            .into_data()
            .into_iter()
            .map(|v| {
                let n: f64 = StandardNormal.sample(&mut rng);
                (v + self.read_noise_std * n).max(0.0)
            })
            .collect();
        RealImage::new(w, h, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(n: usize) -> RealImage {
        RealImage::filled(n, n, 1.0).unwrap()
    }

    fn noise_std(img: &RealImage, clean: f64) -> f64 {
        let n = img.data().len() as f64;
        (img.data().iter().map(|v| (v - clean).powi(2)).sum::<f64>() / n).sqrt()
    }

    #[test]
    fn zero_contrast_is_identity() {
        let clean = RealImage::from_fn(8, 8, |x, y| (x * y) as f64).unwrap();
        let m = MediumModel::static_medium(0.0, 2.0, 9).unwrap();
        assert_eq!(apply_shower_curtain(&clean, &m, 1).unwrap(), clean);
        assert_eq!(
            apply_shower_curtain(&clean, &MediumModel::none(), 1).unwrap(),
            clean
        );
    }

    #[test]
    fn static_contrast_matches_target() {
        let m = MediumModel::static_medium(0.4, 1.0, 3).unwrap();
        for seed in 0..4 {
            let out = apply_shower_curtain(&flat(256), &m, seed).unwrap();
            let ratio = out.std() / out.mean();
            assert!((ratio - 0.4).abs() < 0.04, "seed {seed}: {ratio}");
            assert!((out.mean() - 1.0).abs() < 0.02);
        }
    }

    #[test]
    fn correlated_field_has_unit_variance() {
        for grain in [1.0, 3.0, 6.0] {
            let g = correlated_gaussian_field(256, 256, grain, 17);
            let img = RealImage::new(256, 256, g).unwrap();
            assert!(
                (img.std() - 1.0).abs() < 0.1,
                "grain {grain}: {}",
                img.std()
            );
        }
    }

    #[test]
    fn mean_preserved_for_moderate_contrast() {
        let clean =
            RealImage::from_fn(128, 128, |x, _| 1.0 + (x as f64 / 20.0).sin().abs()).unwrap();
        for contrast in [0.1, 0.3, 0.5] {
            let m = MediumModel::static_medium(contrast, 2.0, 5).unwrap();
            let out = apply_shower_curtain(&clean, &m, 8).unwrap();
            assert!((out.mean() / clean.mean() - 1.0).abs() < 0.02);
        }
    }

    #[test]
    fn dynamic_averaging_halves_noise_at_four_frames() {
        let s = MediumModel::static_medium(0.4, 1.0, 1).unwrap();
        let d = MediumModel::dynamic(0.4, 1.0, 4, 1).unwrap();
        let a = noise_std(&apply_shower_curtain(&flat(256), &s, 10).unwrap(), 1.0);
        let b = noise_std(&apply_shower_curtain(&flat(256), &d, 10).unwrap(), 1.0);
        assert!((b / a - 0.5).abs() < 0.075, "{}", b / a);
    }

    #[test]
    fn averaging_law_slope() {
        let ks = [1usize, 4, 16, 64];
        let stds: Vec<f64> = ks
            .iter()
            .map(|&k| {
                let m = MediumModel::dynamic(0.3, 1.0, k, 2).unwrap();
                noise_std(&apply_shower_curtain(&flat(128), &m, 4).unwrap(), 1.0)
            })
            .collect();
        let n = ks.len() as f64;
        let xs: Vec<f64> = ks.iter().map(|&k| (k as f64).ln()).collect();
        let ys: Vec<f64> = stds.iter().map(|s| s.ln()).collect();
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let slope = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - mx) * (y - my))
            .sum::<f64>()
            / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        assert!((slope + 0.5).abs() < 0.05, "slope {slope}");
        for (s, &k) in stds.iter().zip(&ks) {
            let predicted = stds[0] / (k as f64).sqrt();
            assert!((s / predicted - 1.0).abs() < 0.15);
        }
    }

    #[test]
    fn output_is_nonnegative_and_deterministic() {
        let m = MediumModel::dynamic(0.8, 3.0, 3, 77).unwrap();
        let clean = RealImage::from_fn(32, 32, |x, y| ((x + y) % 5) as f64).unwrap();
        let a = apply_shower_curtain(&clean, &m, 12).unwrap();
        let b = apply_shower_curtain(&clean, &m, 12).unwrap();
        assert_eq!(a, b);
        assert!(a.data().iter().all(|&v| v >= 0.0));
        assert_ne!(a, apply_shower_curtain(&clean, &m, 13).unwrap());
    }

    #[test]
    fn invalid_models() {
        assert!(MediumModel::static_medium(-0.1, 1.0, 0).is_err());
        assert!(MediumModel::static_medium(0.1, 0.5, 0).is_err());
        assert!(MediumModel::dynamic(0.1, 1.0, 0, 0).is_err());
        let mut m = MediumModel::static_medium(0.1, 1.0, 0).unwrap();
        m.frames_averaged = 4;
        assert!(m.validate().is_err());
    }

    #[test]
    fn json_defaults() {
        let m: MediumModel =
            serde_json::from_str(r#"{"kind": "dynamic", "contrast": 0.3}"#).unwrap();
        assert_eq!(m.frames_averaged, DEFAULT_DYNAMIC_FRAMES);
        assert_eq!(m.grain_pixels, 1.0);
        let s: MediumModel = serde_json::from_str(r#"{"kind": "static"}"#).unwrap();
        assert_eq!(s.frames_averaged, 1);
        let back: MediumModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn read_noise_clamps_at_zero() {
        let det = DetectorModel {
            read_noise_std: 0.5,
        };
        let out = det
            .apply(RealImage::filled(32, 32, 0.0).unwrap(), 3)
            .unwrap();
        assert!(out.data().iter().all(|&v| v >= 0.0));
        assert!(out.max() > 0.0);
    }
}
