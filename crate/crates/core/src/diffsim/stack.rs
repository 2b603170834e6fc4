use crate::error::{Error, Result};
use crate::scangeom::{snap_to_pixels, ProbeSpec, ScanOrder, ScanPlan};
use crate::wavefield::{RealImage, Rect};

use super::medium::{DetectorModel, MediumModel};

/// Recorded intensity patterns, one per scan position, with the geometry
/// needed to reconstruct them.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternStack {
    patterns: Vec<RealImage>,
    /// Probe offsets from the grid center in meters, snapped to whole pixels.
    positions: Vec<(f64, f64)>,
    pub pixel_pitch: f64,
    pub wavelength: f64,
    /// Object-to-medium distance, meters.
    pub distance: f64,
    pub medium: MediumModel,
    pub detector: DetectorModel,
    pub probe: Option<ProbeSpec>,
    pub plan: Option<ScanPlan>,
    pub order: ScanOrder,
}

impl PatternStack {
    pub fn new(
        patterns: Vec<RealImage>,
        positions: Vec<(f64, f64)>,
        pixel_pitch: f64,
        wavelength: f64,
        distance: f64,
    ) -> Result<Self> {
        let stack = PatternStack {
            patterns,
            positions,
            pixel_pitch,
            wavelength,
            distance,
            medium: MediumModel::none(),
            detector: DetectorModel::default(),
            probe: None,
            plan: None,
            order: ScanOrder::Raster,
        };
        stack.validate()?;
        Ok(stack)
    }

    pub fn validate(&self) -> Result<()> {
        if self.patterns.is_empty() {
            return Err(Error::EmptyStack);
        }
        if self.patterns.len() != self.positions.len() {
            return Err(Error::InvalidParameter(format!(
                "{} patterns but {} positions",
                self.patterns.len(),
                self.positions.len()
            )));
        }
        let shape = self.patterns[0].shape();
        for (i, p) in self.patterns.iter().enumerate() {
            if p.shape() != shape {
                return Err(Error::ShapeMismatch {
                    expected: shape,
                    actual: p.shape(),
                });
            }
            if let Some((j, &v)) = p.data().iter().enumerate().find(|(_, v)| **v < 0.0) {
                return Err(Error::NegativeMeasurement {
                    index: i * p.data().len() + j,
                    value: v,
                });
            }
        }
        if !(self.pixel_pitch > 0.0 && self.wavelength > 0.0) {
            return Err(Error::InvalidParameter(
                "pixel pitch and wavelength must be positive".into(),
            ));
        }
        if !(self.distance.is_finite() && self.distance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "distance must be positive, got {}",
                self.distance
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn width(&self) -> usize {
        self.patterns[0].width()
    }

    pub fn height(&self) -> usize {
        self.patterns[0].height()
    }

    pub fn patterns(&self) -> &[RealImage] {
        &self.patterns
    }

    pub fn positions(&self) -> &[(f64, f64)] {
        &self.positions
    }

    /// Whole-pixel probe shifts for every pattern.
    pub fn pixel_shifts(&self) -> Vec<(isize, isize)> {
        self.positions
            .iter()
            .map(|&p| snap_to_pixels(p, self.pixel_pitch))
            .collect()
    }

    /// Crops every pattern to `rect` and re-expresses the positions relative
    /// to the center of the cropped window.
    pub fn crop(&self, rect: Rect) -> Result<PatternStack> {
        let patterns = self
            .patterns
            .iter()
            .map(|p| p.crop(rect))
            .collect::<Result<Vec<_>>>()?;
        let old_center = (self.width() / 2, self.height() / 2);
        let new_center = (rect.x + rect.width / 2, rect.y + rect.height / 2);
        let dx = (new_center.0 as f64 - old_center.0 as f64) * self.pixel_pitch;
        let dy = (new_center.1 as f64 - old_center.1 as f64) * self.pixel_pitch;
        let positions = self
            .positions
            .iter()
            .map(|&(x, y)| (x - dx, y - dy))
            .collect();
        let mut out = self.clone();
        out.patterns = patterns;
        out.positions = positions;
        out.plan = self.plan.map(|mut p| {
            p.origin = (p.origin.0 - dx, p.origin.1 - dy);
            p
        });
        out.validate()?;
        Ok(out)
    }

    /// Same geometry, patterns visited in `order` (indices into this stack).
    pub fn reordered(&self, order: &[usize]) -> Result<PatternStack> {
        let mut seen = vec![false; self.len()];
        for &i in order {
            if i >= self.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidParameter(format!(
                    "order is not a permutation of 0..{}",
                    self.len()
                )));
            }
        }
        if order.len() != self.len() {
            return Err(Error::InvalidParameter("order length mismatch".into()));
        }
        let mut out = self.clone();
        out.patterns = order.iter().map(|&i| self.patterns[i].clone()).collect();
        out.positions = order.iter().map(|&i| self.positions[i]).collect();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img(v: f64) -> RealImage {
        RealImage::filled(4, 4, v).unwrap()
    }

    #[test]
    fn invariants_enforced() {
        assert!(matches!(
            PatternStack::new(vec![], vec![], 1.0, 1.0, 1.0),
            Err(Error::EmptyStack)
        ));
        assert!(PatternStack::new(vec![img(1.0)], vec![], 1.0, 1.0, 1.0).is_err());
        assert!(PatternStack::new(vec![img(-1.0)], vec![(0.0, 0.0)], 1.0, 1.0, 1.0).is_err());
        let odd = RealImage::filled(3, 4, 1.0).unwrap();
        assert!(
            PatternStack::new(vec![img(1.0), odd], vec![(0.0, 0.0); 2], 1.0, 1.0, 1.0).is_err()
        );
        assert!(PatternStack::new(vec![img(1.0)], vec![(0.0, 0.0)], 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn crop_moves_positions_to_new_center() {
        let s = PatternStack::new(vec![img(1.0)], vec![(1.0, -2.0)], 0.5, 1.0, 1.0).unwrap();
        let c = s.crop(Rect::new(2, 0, 2, 2)).unwrap();
        assert_eq!(c.width(), 2);
        // new center pixel (3, 1) vs old (2, 2)
        assert_eq!(c.positions()[0], (0.5, -1.5));
    }

    #[test]
    fn reorder_requires_permutation() {
        let s = PatternStack::new(
            vec![img(1.0), img(2.0)],
            vec![(0.0, 0.0), (1.0, 0.0)],
            1.0,
            1.0,
            1.0,
        )
        .unwrap();
        let r = s.reordered(&[1, 0]).unwrap();
        assert_eq!(r.positions()[0], (1.0, 0.0));
        assert_eq!(r.patterns()[0], img(2.0));
        assert!(s.reordered(&[0, 0]).is_err());
        assert!(s.reordered(&[0]).is_err());
    }
}
