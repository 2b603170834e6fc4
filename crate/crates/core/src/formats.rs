//! On-disk formats: pattern stacks (JSON manifest + little-endian `f32`
//! payload), grayscale PNG images, and SSE logs.

use std::fs;
use std::path::{Path, PathBuf};

use image::{ImageBuffer, Luma};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diffsim::{derive_seed, DetectorModel, MediumModel, PatternStack};
use crate::error::{Error, Result};
use crate::scangeom::{ProbeSpec, ScanOrder, ScanPlan};
use crate::wavefield::RealImage;

pub const STACK_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackSeeds {
    pub medium: u64,
    /// Per-pattern noise seeds, in stack order.
    pub frames: Vec<u64>,
}

/// JSON sidecar describing a pattern payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackManifest {
    pub format_version: u32,
    pub m: usize,
    pub width: usize,
    pub height: usize,
    pub pixel_pitch_m: f64,
    pub wavelength_m: f64,
    pub distance_m: f64,
    pub scan_order: ScanOrder,
    /// Probe offsets from the grid center, meters, snapped to whole pixels.
    pub positions_m: Vec<(f64, f64)>,
    pub medium: MediumModel,
    #[serde(default)]
    pub detector: DetectorModel,
    #[serde(default)]
    pub probe: Option<ProbeSpec>,
    #[serde(default)]
    pub plan: Option<ScanPlan>,
    pub seeds: StackSeeds,
    /// Payload file name, relative to the manifest.
    pub payload: String,
    /// Lower-case hex SHA-256 of the payload bytes.
    pub payload_sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn encode_payload(stack: &PatternStack) -> Vec<u8> {
    let mut bytes = Vec::with_capacity(stack.len() * stack.width() * stack.height() * 4);
    for p in stack.patterns() {
        for &v in p.data() {
            bytes.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    bytes
}

/// Paths written by [`write_stack`].
#[derive(Debug, Clone, PartialEq)]
pub struct StackFiles {
    pub manifest: PathBuf,
    pub payload: PathBuf,
    pub checksum: String,
}

/// Writes `<dir>/<name>.json` and `<dir>/<name>.f32`.
pub fn write_stack(stack: &PatternStack, dir: &Path, name: &str) -> Result<StackFiles> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let payload_name = format!("{name}.f32");
    let payload_path = dir.join(&payload_name);
    let manifest_path = dir.join(format!("{name}.json"));
    let bytes = encode_payload(stack);
    let checksum = sha256_hex(&bytes);
    let manifest = StackManifest {
        format_version: STACK_FORMAT_VERSION,
        m: stack.len(),
        width: stack.width(),
        height: stack.height(),
        pixel_pitch_m: stack.pixel_pitch,
        wavelength_m: stack.wavelength,
        distance_m: stack.distance,
        scan_order: stack.order,
        positions_m: stack.positions().to_vec(),
        medium: stack.medium,
        detector: stack.detector,
        probe: stack.probe,
        plan: stack.plan,
        seeds: StackSeeds {
            medium: stack.medium.seed,
            frames: (0..stack.len() as u64)
                .map(|i| derive_seed(stack.medium.seed, i))
                .collect(),
        },
        payload: payload_name,
        payload_sha256: checksum.clone(),
    };
    fs::write(&payload_path, &bytes).map_err(|e| Error::io(&payload_path, e))?;
    let json = serde_json::to_string_pretty(&manifest)?;
    fs::write(&manifest_path, json + "\n").map_err(|e| Error::io(&manifest_path, e))?;
    Ok(StackFiles {
        manifest: manifest_path,
        payload: payload_path,
        checksum,
    })
}

pub fn read_manifest(path: &Path) -> Result<StackManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let manifest: StackManifest = serde_json::from_str(&text)?;
    if manifest.format_version != STACK_FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported format version {}",
            manifest.format_version
        )));
    }
    Ok(manifest)
}

/// Reads a stack from its manifest, verifying payload length and checksum.
pub fn read_stack(manifest_path: &Path) -> Result<PatternStack> {
    let manifest = read_manifest(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let payload_path = dir.join(&manifest.payload);
    let bytes = fs::read(&payload_path).map_err(|e| Error::io(&payload_path, e))?;
    let per_pattern = manifest.width * manifest.height;
    let expected_len = manifest.m * per_pattern * 4;
    if bytes.len() != expected_len {
        return Err(Error::Format(format!(
            "payload {} holds {} bytes, manifest implies {expected_len}",
            payload_path.display(),
            bytes.len()
        )));
    }
    let actual = sha256_hex(&bytes);
    if actual != manifest.payload_sha256 {
        return Err(Error::Checksum {
            path: payload_path,
            expected: manifest.payload_sha256,
            actual,
        });
    }
    if manifest.positions_m.len() != manifest.m {
        return Err(Error::Format(format!(
            "manifest lists {} positions for {} patterns",
            manifest.positions_m.len(),
            manifest.m
        )));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    let patterns = values
        .chunks_exact(per_pattern.max(1))
        .map(|chunk| RealImage::new(manifest.width, manifest.height, chunk.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let mut stack = PatternStack::new(
        patterns,
        manifest.positions_m,
        manifest.pixel_pitch_m,
        manifest.wavelength_m,
        manifest.distance_m,
    )?;
    stack.medium = manifest.medium;
    stack.detector = manifest.detector;
    stack.probe = manifest.probe;
    stack.plan = manifest.plan;
    stack.order = manifest.scan_order;
    Ok(stack)
}

/// Reads a PNG as grayscale with values scaled to `[0, 1]`.
pub fn read_grayscale_png(path: &Path) -> Result<RealImage> {
    let img = image::open(path).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })?;
    let gray = img.to_luma16();
    let (w, h) = gray.dimensions();
    let data = gray
        .into_raw()
        .into_iter()
        .map(|v| v as f64 / 65535.0)
        .collect();
    RealImage::new(w as usize, h as usize, data)
}

/// Writes `image` as a 16-bit grayscale PNG, mapping `[lo, hi]` linearly
/// onto the full range and clipping outside it.
pub fn write_gray16_png(path: &Path, image: &RealImage, lo: f64, hi: f64) -> Result<()> {
    let span = if hi > lo { hi - lo } else { 1.0 };
    let raw: Vec<u16> = image
        .data()
        .iter()
        .map(|v| (((v - lo) / span).clamp(0.0, 1.0) * 65535.0).round() as u16)
        .collect();
    let buf: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_raw(image.width() as u32, image.height() as u32, raw)
            .ok_or_else(|| Error::Format("image buffer size mismatch".into()))?;
    buf.save(path).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

/// `iteration,sse` lines with a header.
pub fn write_sse_csv(path: &Path, history: &[f64]) -> Result<()> {
    let mut text = String::from("iteration,sse\n");
    for (i, v) in history.iter().enumerate() {
        text.push_str(&format!("{},{:e}\n", i + 1, v));
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
