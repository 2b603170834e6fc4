//! Sequential ptychographic reconstruction: per-position exit wave,
//! angular-spectrum transport to the medium plane, modulus replacement,
//! back-propagation, and joint object/probe updates, with a sweep-level
//! sum-squared error as the stopping criterion.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diffsim::{derive_seed, PatternStack};
use crate::error::{Error, Result};
use crate::scangeom::{make_probe, snap_to_pixels, ProbeSpec};
use crate::wavefield::{replace_modulus, AngularSpectrum, ComplexField, RealImage};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ProbeInit {
    /// All-ones field over the whole grid.
    #[default]
    Identity,
    /// The pinhole disk, centered.
    Aperture(ProbeSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectInit {
    /// All-ones transmission.
    #[default]
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Traversal {
    /// Patterns in stack order every sweep.
    #[default]
    Raster,
    /// A fresh permutation per sweep, derived from `seed` and the sweep index.
    Shuffled { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReconConfig {
    /// Object step size.
    pub alpha: f64,
    /// Probe step size.
    pub beta: f64,
    /// Stop once the sweep SSE drops below this.
    pub epsilon: f64,
    pub max_iterations: usize,
    /// Propagation distance in meters; `None` uses the stack's.
    pub distance: Option<f64>,
    pub probe_init: ProbeInit,
    pub object_init: ObjectInit,
    pub update_probe: bool,
    /// When set, zero the probe outside its aperture dilated by this many
    /// meters after every probe update. Needs an aperture probe spec.
    pub probe_support_dilation: Option<f64>,
    pub traversal: Traversal,
}

impl Default for ReconConfig {
    fn default() -> Self {
        ReconConfig {
            alpha: 1.0,
            beta: 1.0,
            epsilon: 0.01,
            max_iterations: 50,
            distance: None,
            probe_init: ProbeInit::Identity,
            object_init: ObjectInit::Identity,
            update_probe: true,
            probe_support_dilation: None,
            traversal: Traversal::Raster,
        }
    }
}

impl ReconConfig {
    pub fn validate(&self) -> Result<()> {
        let step_ok = |v: f64| v > 0.0 && v <= 2.0;
        if !step_ok(self.alpha) {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 2], got {}",
                self.alpha
            )));
        }
        if !step_ok(self.beta) {
            return Err(Error::Config(format!(
                "beta must lie in (0, 2], got {}",
                self.beta
            )));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::Config(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if let Some(d) = self.distance {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::Config(format!("distance must be positive, got {d}")));
            }
        }
        if let Some(dil) = self.probe_support_dilation {
            if !(dil.is_finite() && dil >= 0.0) {
                return Err(Error::Config(format!(
                    "support dilation must be >= 0, got {dil}"
                )));
            }
        }
        if let ProbeInit::Aperture(spec) = self.probe_init {
            spec.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconResult {
    pub object: ComplexField,
    pub probe: ComplexField,
    /// One SSE value per completed sweep.
    pub sse_history: Vec<f64>,
    pub iterations_run: usize,
    pub converged: bool,
}

impl ReconResult {
    pub fn final_sse(&self) -> f64 {
        self.sse_history.last().copied().unwrap_or(f64::INFINITY)
    }
}

fn check_position(field: &ComplexField, shift: (isize, isize)) -> Result<()> {
    let (w, h) = (field.width() as isize, field.height() as isize);
    let (cx, cy) = (w / 2, h / 2);
    let (x, y) = (cx + shift.0, cy + shift.1);
    if x < 0 || x >= w || y < 0 || y >= h {
        return Err(Error::OutOfBounds(format!(
            "scan position shift {shift:?} pixels falls outside the {w}x{h} grid"
        )));
    }
    Ok(())
}

/// Exit wave: object times the probe translated to `position` (meters from
/// the grid center, snapped to whole pixels).
pub fn exit_wave(
    object: &ComplexField,
    probe: &ComplexField,
    position: (f64, f64),
) -> Result<ComplexField> {
    object.check_same_grid(probe)?;
    let shift = snap_to_pixels(position, object.pixel_pitch());
    check_position(object, shift)?;
    let shifted = probe.shifted(shift.0, shift.1);
    let data = object
        .data()
        .iter()
        .zip(shifted.data())
        .map(|(o, p)| o * p)
        .collect();
    object.with_data(data)
}

fn check_update_grids(fields: [&ComplexField; 4]) -> Result<()> {
    for f in &fields[1..] {
        fields[0].check_same_grid(f)?;
    }
    Ok(())
}

/// `target + step * conj(weight) / max|weight|^2 * (revised - current)`.
fn corrected(
    target: &ComplexField,
    weight: &ComplexField,
    current: &ComplexField,
    revised: &ComplexField,
    step: f64,
    what: &'static str,
) -> Result<ComplexField> {
    check_update_grids([target, weight, current, revised])?;
    if !step.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "step size must be finite, got {step}"
        )));
    }
    let max = weight.max_norm_sqr();
    if max == 0.0 {
        return Err(Error::ZeroNormalization(what));
    }
    let scale = step / max;
    let data = target
        .data()
        .iter()
        .zip(weight.data())
        .zip(current.data().iter().zip(revised.data()))
        .map(|((t, w), (e, e_new))| t + w.conj() * scale * (e_new - e))
        .collect();
    target.with_data(data)
}

/// Object update. `probe_shifted` is the probe at this scan position;
/// normalization is by the global maximum of its squared modulus.
pub fn update_object(
    object: &ComplexField,
    probe_shifted: &ComplexField,
    exit: &ComplexField,
    revised_exit: &ComplexField,
    alpha: f64,
) -> Result<ComplexField> {
    corrected(object, probe_shifted, exit, revised_exit, alpha, "probe")
}

/// Probe update, the mirror of [`update_object`]. `probe_shifted` and
/// `object` share the object-plane frame.
pub fn update_probe(
    probe_shifted: &ComplexField,
    object: &ComplexField,
    exit: &ComplexField,
    revised_exit: &ComplexField,
    beta: f64,
) -> Result<ComplexField> {
    corrected(probe_shifted, object, exit, revised_exit, beta, "object")
}

/// Running numerator and denominator of the normalized sum-squared error
/// between computed amplitudes and measured intensities.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SseAccumulator {
    numerator: f64,
    denominator: f64,
}

impl SseAccumulator {
    /// Adds one pattern given measured amplitudes `sqrt(I)`.
    pub fn add_amplitudes(
        &mut self,
        calculated: impl IntoIterator<Item = f64>,
        measured_amplitude: &[f64],
    ) {
        for (a, m) in calculated.into_iter().zip(measured_amplitude) {
            self.numerator += (a.abs() - m).powi(2);
            self.denominator += m * m;
        }
    }

    pub fn value(&self) -> Result<f64> {
        if self.denominator == 0.0 {
            return Err(Error::InvalidParameter(
                "measured intensity sums to zero; SSE undefined".into(),
            ));
        }
        Ok(self.numerator / self.denominator)
    }
}

/// `sum((|A| - sqrt(I))^2) / sum(I)` for one pattern.
pub fn sse(calculated_amplitude: &RealImage, measured_intensity: &RealImage) -> Result<f64> {
    if calculated_amplitude.shape() != measured_intensity.shape() {
        return Err(Error::ShapeMismatch {
            expected: measured_intensity.shape(),
            actual: calculated_amplitude.shape(),
        });
    }
    let mut measured = Vec::with_capacity(measured_intensity.data().len());
    for (i, &v) in measured_intensity.data().iter().enumerate() {
        if v < 0.0 {
            return Err(Error::NegativeMeasurement { index: i, value: v });
        }
        measured.push(v.sqrt());
    }
    let mut acc = SseAccumulator::default();
    acc.add_amplitudes(calculated_amplitude.data().iter().copied(), &measured);
    acc.value()
}

fn support_mask(spec: &ProbeSpec, template: &ComplexField, dilation: f64) -> Result<Vec<bool>> {
    let widened = ProbeSpec {
        radius: spec.radius + dilation,
        edge_width: 0.0,
    };
    Ok(make_probe(&widened, template, (0.0, 0.0))?
        .data()
        .iter()
        .map(|z| z.re > 0.0)
        .collect())
}

/// One reconstruction run. Holds the working object and probe and steps
/// through sweeps; [`reconstruct`] drives it to completion.
pub struct Engine<'a> {
    stack: &'a PatternStack,
    config: ReconConfig,
    propagator: AngularSpectrum,
    measured: Vec<Vec<f64>>,
    shifts: Vec<(isize, isize)>,
    object: ComplexField,
    probe: ComplexField,
    support: Option<Vec<bool>>,
    sse_history: Vec<f64>,
}

impl<'a> Engine<'a> {
    pub fn new(stack: &'a PatternStack, config: ReconConfig) -> Result<Self> {
        config.validate()?;
        stack.validate()?;
        let distance = match config.distance {
            Some(d) => {
                if (d - stack.distance).abs() > 1e-12 * stack.distance.abs().max(d.abs()) {
                    log::warn!(
                        "reconstruction distance {d} m differs from the stack's {} m; using {d} m",
                        stack.distance
                    );
                }
                d
            }
            None => stack.distance,
        };
        let (w, h) = (stack.width(), stack.height());
        let object = match config.object_init {
            ObjectInit::Identity => ComplexField::filled(
                w,
                h,
                stack.pixel_pitch,
                stack.wavelength,
                Complex64::new(1.0, 0.0),
            )?,
        };
        let probe = match config.probe_init {
            ProbeInit::Identity => object.clone(),
            ProbeInit::Aperture(spec) => make_probe(&spec, &object, (0.0, 0.0))?,
        };
        Self::with_initial(stack, config, distance, object, probe)
    }

    /// Starts from caller-supplied object and probe estimates.
    pub fn with_estimates(
        stack: &'a PatternStack,
        config: ReconConfig,
        object: ComplexField,
        probe: ComplexField,
    ) -> Result<Self> {
        config.validate()?;
        stack.validate()?;
        let distance = config.distance.unwrap_or(stack.distance);
        Self::with_initial(stack, config, distance, object, probe)
    }

    fn with_initial(
        stack: &'a PatternStack,
        config: ReconConfig,
        distance: f64,
        object: ComplexField,
        probe: ComplexField,
    ) -> Result<Self> {
        object.check_same_grid(&probe)?;
        if object.shape() != (stack.width(), stack.height()) {
            return Err(Error::ShapeMismatch {
                expected: (stack.width(), stack.height()),
                actual: object.shape(),
            });
        }
        let propagator = AngularSpectrum::for_field(&object, distance)?;
        let shifts = stack.pixel_shifts();
        for &s in &shifts {
            check_position(&object, s)?;
        }
        let measured = stack
            .patterns()
            .iter()
            .map(|p| p.data().iter().map(|v| v.sqrt()).collect())
            .collect();
        let support = match config.probe_support_dilation {
            None => None,
            Some(dilation) => {
                let spec = match config.probe_init {
                    ProbeInit::Aperture(spec) => spec,
                    ProbeInit::Identity => stack.probe.ok_or_else(|| {
                        Error::Config("probe support constraint needs an aperture spec".into())
                    })?,
                };
                Some(support_mask(&spec, &object, dilation)?)
            }
        };
        Ok(Engine {
            stack,
            config,
            propagator,
            measured,
            shifts,
            object,
            probe,
            support,
            sse_history: Vec::new(),
        })
    }

    pub fn object(&self) -> &ComplexField {
        &self.object
    }

    pub fn probe(&self) -> &ComplexField {
        &self.probe
    }

    pub fn sse_history(&self) -> &[f64] {
        &self.sse_history
    }

    fn sweep_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.stack.len()).collect();
        if let Traversal::Shuffled { seed } = self.config.traversal {
            let mut rng =
                ChaCha8Rng::seed_from_u64(derive_seed(seed, self.sse_history.len() as u64));
            order.shuffle(&mut rng);
        }
        order
    }

    /// Updates object and probe with one pattern; returns nothing but
    /// accumulates the pre-update misfit into `acc`.
    fn visit(&mut self, index: usize, acc: &mut SseAccumulator) -> Result<()> {
        let shift = self.shifts[index];
        let measured = &self.measured[index];
        let mut probe_shifted = self.probe.shifted(shift.0, shift.1);

        let exit: Vec<Complex64> = self
            .object
            .data()
            .iter()
            .zip(probe_shifted.data())
            .map(|(o, p)| o * p)
            .collect();

        let mut wave = exit.clone();
        self.propagator.apply(&mut wave, false);
        acc.add_amplitudes(wave.iter().map(|z| z.norm()), measured);
        wave.iter_mut()
            .zip(measured)
            .for_each(|(z, &a)| *z = replace_modulus(*z, a));
        self.propagator.apply(&mut wave, true);

        let max_probe = probe_shifted.max_norm_sqr();
        if max_probe == 0.0 {
            return Err(Error::ZeroNormalization("probe"));
        }
        let max_object = self.object.max_norm_sqr();
        if max_object == 0.0 {
            return Err(Error::ZeroNormalization("object"));
        }
        let object_step = self.config.alpha / max_probe;
        let probe_step = self.config.beta / max_object;
        let update_probe = self.config.update_probe;

        let object = self.object.data_mut();
        let probe = probe_shifted.data_mut();
        for i in 0..object.len() {
            let diff = wave[i] - exit[i];
            let o = object[i];
            let p = probe[i];
            object[i] = o + p.conj() * object_step * diff;
            if update_probe {
                probe[i] = p + o.conj() * probe_step * diff;
            }
        }
        if update_probe {
            let mut probe = probe_shifted.shifted(-shift.0, -shift.1);
            if let Some(mask) = &self.support {
                probe
                    .data_mut()
                    .iter_mut()
                    .zip(mask)
                    .filter(|(_, &inside)| !inside)
                    .for_each(|(z, _)| *z = Complex64::new(0.0, 0.0));
            }
            self.probe = probe;
        }
        Ok(())
    }

    /// Runs one sweep over all patterns and returns its SSE.
    pub fn sweep(&mut self) -> Result<f64> {
        let mut acc = SseAccumulator::default();
        for index in self.sweep_order() {
            self.visit(index, &mut acc)?;
        }
        self.object.validate()?;
        self.probe.validate()?;
        let value = acc.value()?;
        self.sse_history.push(value);
        Ok(value)
    }

    pub fn finish(self) -> ReconResult {
        let iterations_run = self.sse_history.len();
        let converged = self
            .sse_history
            .last()
            .is_some_and(|&s| s < self.config.epsilon);
        ReconResult {
            object: self.object,
            probe: self.probe,
            sse_history: self.sse_history,
            iterations_run,
            converged,
        }
    }

    /// Sweeps until the SSE falls below epsilon or the iteration cap is hit.
    pub fn run(mut self) -> Result<ReconResult> {
        for it in 0..self.config.max_iterations {
            let value = self.sweep()?;
            log::debug!("iteration {}: sse = {value:.6e}", it + 1);
            if value < self.config.epsilon {
                break;
            }
        }
        Ok(self.finish())
    }
}

/// Reconstructs object and probe from a pattern stack.
pub fn reconstruct(stack: &PatternStack, config: &ReconConfig) -> Result<ReconResult> {
    Engine::new(stack, *config)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffsim::{simulate_dataset, MediumModel};
    use crate::scangeom::ScanPlan;
    use crate::wavefield::{angular_spectrum_propagate, intensity};

    const PITCH: f64 = 6.5e-6;
    const LAMBDA: f64 = 532e-9;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn filled(n: usize, v: Complex64) -> ComplexField {
        ComplexField::filled(n, n, PITCH, LAMBDA, v).unwrap()
    }

    #[test]
    fn exit_wave_examples() {
        let probe =
            ComplexField::from_fn(8, 8, PITCH, LAMBDA, |x, y| c(x as f64, y as f64)).unwrap();
        let e = exit_wave(&filled(8, c(1.0, 0.0)), &probe, (PITCH, 0.0)).unwrap();
        assert_eq!(e, probe.shifted(1, 0));
        let obj =
            ComplexField::from_fn(8, 8, PITCH, LAMBDA, |x, y| c(y as f64, -(x as f64))).unwrap();
        assert_eq!(
            exit_wave(&obj, &filled(8, c(1.0, 0.0)), (0.0, 0.0)).unwrap(),
            obj
        );

        let spec = ProbeSpec::new(2.0 * PITCH, 0.0).unwrap();
        let disk = make_probe(&spec, &filled(8, c(0.0, 0.0)), (0.0, 0.0)).unwrap();
        let disk2 = disk
            .with_data(disk.data().iter().map(|z| z * 2.0).collect())
            .unwrap();
        let sq = exit_wave(&disk2, &disk2, (0.0, 0.0)).unwrap();
        for (z, d) in sq.data().iter().zip(disk.data()) {
            assert_eq!(*z, if d.re > 0.0 { c(4.0, 0.0) } else { c(0.0, 0.0) });
        }
        assert!(exit_wave(&obj, &probe, (9.0 * PITCH, 0.0)).is_err());
    }

    #[test]
    fn update_examples() {
        let zero = filled(4, c(0.0, 0.0));
        let one = filled(4, c(1.0, 0.0));
        let o =
            ComplexField::from_fn(4, 4, PITCH, LAMBDA, |x, y| c(x as f64, y as f64 + 1.0)).unwrap();
        let e = ComplexField::from_fn(4, 4, PITCH, LAMBDA, |x, _| c(0.5, x as f64)).unwrap();
        assert_eq!(update_object(&o, &one, &e, &e, 1.0).unwrap(), o);
        assert_eq!(update_object(&o, &one, &e, &zero, 0.0).unwrap(), o);
        assert_eq!(update_object(&zero, &one, &zero, &one, 1.0).unwrap(), one);
        assert_eq!(update_probe(&o, &one, &e, &e, 1.0).unwrap(), o);
        assert_eq!(update_probe(&o, &one, &e, &zero, 0.0).unwrap(), o);
        assert_eq!(update_probe(&zero, &one, &zero, &one, 1.0).unwrap(), one);
        assert!(matches!(
            update_object(&o, &zero, &e, &one, 1.0),
            Err(Error::ZeroNormalization("probe"))
        ));
        assert!(matches!(
            update_probe(&o, &zero, &e, &one, 1.0),
            Err(Error::ZeroNormalization("object"))
        ));
    }

    #[test]
    fn sse_examples() {
        let i = RealImage::from_fn(5, 5, |x, y| (x * y + 1) as f64).unwrap();
        let a = RealImage::from_fn(5, 5, |x, y| ((x * y + 1) as f64).sqrt()).unwrap();
        assert!(sse(&a, &i).unwrap() < 1e-30);
        let ones = RealImage::filled(5, 5, 1.0).unwrap();
        assert_eq!(
            sse(&RealImage::filled(5, 5, 0.0).unwrap(), &ones).unwrap(),
            1.0
        );
        let doubled = RealImage::new(5, 5, a.data().iter().map(|v| 2.0 * v).collect()).unwrap();
        assert!((sse(&doubled, &i).unwrap() - 1.0).abs() < 1e-12);
        assert!(sse(&ones, &RealImage::filled(5, 5, 0.0).unwrap()).is_err());
        assert!(sse(&ones, &RealImage::filled(4, 5, 1.0).unwrap()).is_err());
    }

    #[test]
    fn config_validation() {
        let ok = ReconConfig::default();
        assert!(ok.validate().is_ok());
        assert!(ReconConfig {
            max_iterations: 0,
            ..ok
        }
        .validate()
        .is_err());
        assert!(ReconConfig { alpha: 0.0, ..ok }.validate().is_err());
        assert!(ReconConfig { beta: 2.5, ..ok }.validate().is_err());
        assert!(ReconConfig { epsilon: 0.0, ..ok }.validate().is_err());
    }

    fn small_stack(probe_spec: &ProbeSpec) -> (ComplexField, PatternStack) {
        let n = 48;
        let object = ComplexField::from_fn(n, n, PITCH, LAMBDA, |x, y| {
            let a = if (x / 6 + y / 6) % 2 == 0 { 1.0 } else { 0.4 };
            Complex64::from_polar(a, 0.3 * ((x as f64) / 7.0).sin())
        })
        .unwrap();
        let plan = ScanPlan::centered(3, 3, 3.0 * PITCH).unwrap();
        let stack =
            simulate_dataset(&object, &plan, probe_spec, 2e-3, &MediumModel::none()).unwrap();
        (object, stack)
    }

    #[test]
    fn single_iteration_contract() {
        let spec = ProbeSpec::new(10.0 * PITCH, 2.0 * PITCH).unwrap();
        let (_, stack) = small_stack(&spec);
        let cfg = ReconConfig {
            max_iterations: 1,
            probe_init: ProbeInit::Aperture(spec),
            ..ReconConfig::default()
        };
        let r = reconstruct(&stack, &cfg).unwrap();
        assert_eq!(r.sse_history.len(), 1);
        assert_eq!(r.iterations_run, 1);
        assert_eq!(r.converged, r.sse_history[0] < cfg.epsilon);
    }

    #[test]
    fn known_probe_and_flat_object_is_a_fixed_point() {
        let spec = ProbeSpec::new(10.0 * PITCH, 2.0 * PITCH).unwrap();
        let ones = filled(48, c(1.0, 0.0));
        let plan = ScanPlan::centered(3, 3, 3.0 * PITCH).unwrap();
        let stack = simulate_dataset(&ones, &plan, &spec, 2e-3, &MediumModel::none()).unwrap();
        let cfg = ReconConfig {
            probe_init: ProbeInit::Aperture(spec),
            ..ReconConfig::default()
        };
        let r = reconstruct(&stack, &cfg).unwrap();
        assert_eq!(r.iterations_run, 1);
        assert!(r.converged);
        // f32 payload rounding is the only misfit
        assert!(r.sse_history[0] < 1e-12, "{}", r.sse_history[0]);
    }

    #[test]
    fn exact_measurements_leave_estimates_unchanged() {
        let n = 32;
        let spec = ProbeSpec::new(8.0 * PITCH, 2.0 * PITCH).unwrap();
        let object = ComplexField::from_fn(n, n, PITCH, LAMBDA, |x, y| {
            Complex64::from_polar(0.5 + 0.02 * x as f64, 0.01 * y as f64)
        })
        .unwrap();
        let probe = make_probe(&spec, &object, (0.0, 0.0)).unwrap();
        let positions = vec![(0.0, 0.0), (3.0 * PITCH, 0.0), (0.0, -2.0 * PITCH)];
        let patterns = positions
            .iter()
            .map(|&p| {
                intensity(
                    &angular_spectrum_propagate(&exit_wave(&object, &probe, p).unwrap(), 1e-3)
                        .unwrap(),
                )
            })
            .collect();
        let stack = PatternStack::new(patterns, positions, PITCH, LAMBDA, 1e-3).unwrap();
        let mut engine = Engine::with_estimates(
            &stack,
            ReconConfig::default(),
            object.clone(),
            probe.clone(),
        )
        .unwrap();
        let value = engine.sweep().unwrap();
        assert!(value < 1e-20, "{value}");
        assert!(engine.object().relative_l2_error(&object) < 1e-10);
        assert!(engine.probe().relative_l2_error(&probe) < 1e-10);
    }

    #[test]
    fn object_update_is_local_to_probe_support() {
        let spec = ProbeSpec::new(10.0 * PITCH, 2.0 * PITCH).unwrap();
        let (_, stack) = small_stack(&spec);
        let cfg = ReconConfig {
            probe_init: ProbeInit::Aperture(spec),
            update_probe: false,
            max_iterations: 3,
            ..ReconConfig::default()
        };
        let r = reconstruct(&stack, &cfg).unwrap();
        let reach = make_probe(
            &ProbeSpec::new(spec.radius + 5.0 * PITCH, 0.0).unwrap(),
            &r.object,
            (0.0, 0.0),
        )
        .unwrap();
        // anything further than radius + max shift from center is untouched
        for (z, m) in r.object.data().iter().zip(reach.data()) {
            if m.re == 0.0 {
                assert_eq!(*z, c(1.0, 0.0));
            }
        }
    }

    #[test]
    fn support_constraint_zeroes_outside_probe() {
        let spec = ProbeSpec::new(10.0 * PITCH, 2.0 * PITCH).unwrap();
        let (_, stack) = small_stack(&spec);
        let cfg = ReconConfig {
            probe_init: ProbeInit::Aperture(spec),
            probe_support_dilation: Some(2.0 * PITCH),
            max_iterations: 2,
            ..ReconConfig::default()
        };
        let r = reconstruct(&stack, &cfg).unwrap();
        let (cx, cy) = r.probe.center_index();
        assert_eq!(r.probe.get(cx + 14, cy), c(0.0, 0.0));
        assert_ne!(r.probe.get(cx, cy), c(0.0, 0.0));
    }

    #[test]
    fn sse_decreases_on_noiseless_data() {
        let spec = ProbeSpec::new(10.0 * PITCH, 2.0 * PITCH).unwrap();
        let (_, stack) = small_stack(&spec);
        let cfg = ReconConfig {
            probe_init: ProbeInit::Aperture(spec),
            epsilon: 1e-9,
            ..ReconConfig::default()
        };
        let r = reconstruct(&stack, &cfg).unwrap();
        assert_eq!(r.iterations_run, 50);
        assert!(
            r.sse_history[49] < 0.1 * r.sse_history[0],
            "{:?}",
            r.sse_history
        );
    }

    #[test]
    fn shuffled_traversal_reaches_similar_error() {
        let spec = ProbeSpec::new(10.0 * PITCH, 2.0 * PITCH).unwrap();
        let (_, stack) = small_stack(&spec);
        let base = ReconConfig {
            probe_init: ProbeInit::Aperture(spec),
            epsilon: 1e-9,
            max_iterations: 30,
            ..ReconConfig::default()
        };
        let raster = reconstruct(&stack, &base).unwrap().final_sse();
        let shuffled = reconstruct(
            &stack,
            &ReconConfig {
                traversal: Traversal::Shuffled { seed: 5 },
                ..base
            },
        )
        .unwrap()
        .final_sse();
        assert!(
            shuffled < 2.0 * raster && raster < 2.0 * shuffled,
            "{raster} vs {shuffled}"
        );
    }
}
