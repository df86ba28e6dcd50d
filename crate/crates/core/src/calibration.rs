//! Well depths from measured emission energies of uncoupled dots.
//!
//! Four depths are fixed by two lines only once the hole depths are tied to
//! the electron ones by a constant ratio. At a large barrier each line
//! depends on one dot, so each electron depth is first bracketed and
//! bisected against an isolated-dot model, then both are polished with a
//! diagonal Newton step on the full double-dot emission model.

use crate::error::{check_positive, Error, Result};
use crate::model::{DeviceSpec, Field, Species};
use crate::spectroscopy::ExcitonModel;
use crate::vertical::{build_potential, solve_vertical, DoubleWellSpec};

/// Residual accepted on each line, meV.
pub const LINE_TOLERANCE: f64 = 1e-4;

const MAX_NEWTON_STEPS: usize = 30;
const MAX_BISECTION_STEPS: usize = 200;
const MAX_DEPTH: f64 = 1e5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationTarget {
    /// Low-energy (deep dot) line, meV.
    pub emission_low: f64,
    /// High-energy (shallow dot) line, meV.
    pub emission_high: f64,
    /// Barrier at which the dots are treated as uncoupled, nm.
    pub barrier: f64,
    pub hole_to_electron_depth_ratio: f64,
}

impl CalibrationTarget {
    pub fn new(emission_low: f64, emission_high: f64) -> Self {
        CalibrationTarget {
            emission_low,
            emission_high,
            barrier: 50.0,
            hole_to_electron_depth_ratio: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("barrier", self.barrier)?;
        let r = self.hole_to_electron_depth_ratio;
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidParameter {
                name: "hole_to_electron_depth_ratio",
                value: r,
                reason: "must lie in (0, 1)",
            });
        }
        if !(self.emission_low.is_finite() && self.emission_high.is_finite()) || self.emission_high < self.emission_low
        {
            return Err(Error::InvalidParameter {
                name: "emission_high",
                value: self.emission_high,
                reason: "must be finite and not below emission_low",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub depth_e_dot1: f64,
    pub depth_e_dot2: f64,
    pub depth_h_dot1: f64,
    pub depth_h_dot2: f64,
    /// Model minus target for the (low, high) lines, meV.
    pub residuals: (f64, f64),
    pub newton_steps: usize,
}

impl Calibration {
    /// `template` with the calibrated depths filled in.
    pub fn apply(&self, template: &DeviceSpec) -> DeviceSpec {
        DeviceSpec {
            depth_e_dot1: self.depth_e_dot1,
            depth_e_dot2: self.depth_e_dot2,
            depth_h_dot1: self.depth_h_dot1,
            depth_h_dot2: self.depth_h_dot2,
            ..*template
        }
    }
}

/// Ground energy of one isolated well of the given depth, or `None` when it
/// has no bound state.
fn isolated_level(model: &ExcitonModel, species: &Species, depth: f64) -> Result<Option<f64>> {
    let well = DoubleWellSpec::new(model.device.well_width, model.device.barrier, depth, 0.0)?;
    let grid = well.default_grid(&model.settings)?;
    let potential = build_potential(&well, &grid)?;
    match solve_vertical(&potential, &grid, species, 1) {
        Ok(s) => Ok(Some(s.energies()[0])),
        Err(Error::NoBoundState { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Zero-field line of a single dot with electron depth `depth`.
fn isolated_line(model: &ExcitonModel, depth: f64, ratio: f64) -> Result<Option<f64>> {
    let e = isolated_level(model, &model.electron, depth)?;
    let h = isolated_level(model, &model.hole, ratio * depth)?;
    Ok(match (e, h) {
        (Some(e), Some(h)) => Some(
            model.device.reference_offset + e + h + model.electron.lateral_quantum() + model.hole.lateral_quantum()
                - model.device.binding_energy,
        ),
        _ => None,
    })
}

fn bisect_depth(model: &ExcitonModel, target: f64, ratio: f64, dot: usize) -> Result<f64> {
    // Line of an infinitely shallow dot: the continuum threshold.
    let threshold = model.device.reference_offset + model.electron.lateral_quantum() + model.hole.lateral_quantum()
        - model.device.binding_energy;
    if target >= threshold {
        return Err(Error::UnboundDot { dot, depth_mev: 0.0 });
    }
    // A depth counts as "too shallow" if its line is above the target or it
    // binds nothing.
    let too_shallow = |depth: f64| -> Result<bool> {
        Ok(match isolated_line(model, depth, ratio)? {
            Some(line) => line > target,
            None => true,
        })
    };
    let mut lo = 0.0;
    let mut hi = 100.0;
    while too_shallow(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > MAX_DEPTH {
            return Err(Error::NoConvergence {
                iterations: 0,
                residual: f64::INFINITY,
            });
        }
    }
    for _ in 0..MAX_BISECTION_STEPS {
        if hi - lo < 1e-9 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if too_shallow(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn slope(model: &ExcitonModel, depth: f64, ratio: f64, dot: usize) -> Result<f64> {
    let dv = 1e-3 * depth.max(1.0);
    let up = isolated_line(model, depth + dv, ratio)?;
    let down = isolated_line(model, (depth - dv).max(0.0), ratio)?;
    match (up, down) {
        (Some(a), Some(b)) => Ok((a - b) / (2.0 * dv)),
        _ => Err(Error::UnboundDot { dot, depth_mev: depth }),
    }
}

/// Electron depths (hole depths follow from the ratio) reproducing the two
/// target lines of `template` at the target barrier.
pub fn calibrate_depths(target: &CalibrationTarget, template: &ExcitonModel) -> Result<Calibration> {
    target.validate()?;
    let ratio = target.hole_to_electron_depth_ratio;
    let model = template.with_barrier(target.barrier);

    let mut v1 = bisect_depth(&model, target.emission_low, ratio, 1)?;
    let mut v2 = bisect_depth(&model, target.emission_high, ratio, 2)?;
    let s1 = slope(&model, v1, ratio, 1)?;
    let s2 = slope(&model, v2, ratio, 2)?;

    let device_for = |v1: f64, v2: f64| DeviceSpec {
        depth_e_dot1: v1,
        depth_e_dot2: v2,
        depth_h_dot1: ratio * v1,
        depth_h_dot2: ratio * v2,
        ..model.device
    };

    let mut residual = (f64::INFINITY, f64::INFINITY);
    for step in 0..=MAX_NEWTON_STEPS {
        let device = device_for(v1, v2);
        let lines = model.with_device(device).lines_at(Field::ZERO)?;
        residual = (
            lines.low.energy - target.emission_low,
            lines.high.energy - target.emission_high,
        );
        if residual.0.abs() < LINE_TOLERANCE && residual.1.abs() < LINE_TOLERANCE {
            return Ok(Calibration {
                depth_e_dot1: v1,
                depth_e_dot2: v2,
                depth_h_dot1: ratio * v1,
                depth_h_dot2: ratio * v2,
                residuals: residual,
                newton_steps: step,
            });
        }
        v1 -= residual.0 / s1;
        v2 -= residual.1 / s2;
        // Keep dot 1 the deeper one.
        if v2 > v1 {
            let mid = 0.5 * (v1 + v2);
            v1 = mid;
            v2 = mid;
        }
        if v1 <= 0.0 || v2 <= 0.0 {
            return Err(Error::UnboundDot {
                dot: if v1 <= 0.0 { 1 } else { 2 },
                depth_mev: v1.min(v2),
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_NEWTON_STEPS,
        residual: residual.0.abs().max(residual.1.abs()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn targets_from(device: DeviceSpec, barrier: f64) -> CalibrationTarget {
        let model = ExcitonModel::default().with_device(device.with_barrier(barrier));
        let lines = model.lines_at(Field::ZERO).unwrap();
        CalibrationTarget {
            barrier,
            ..CalibrationTarget::new(lines.low.energy, lines.high.energy)
        }
    }

    #[test]
    fn round_trip_recovers_published_depths() {
        let target = targets_from(DeviceSpec::default(), 50.0);
        let cal = calibrate_depths(&target, &ExcitonModel::default()).unwrap();
        assert!((cal.depth_e_dot1 - 239.0).abs() < 0.1);
        assert!((cal.depth_e_dot2 - 203.0).abs() < 0.1);
        assert_eq!(cal.depth_h_dot1, 0.5 * cal.depth_e_dot1);
        assert_eq!(cal.depth_h_dot2, 0.5 * cal.depth_e_dot2);
        assert!(cal.residuals.0.abs() < 0.01 && cal.residuals.1.abs() < 0.01);
    }

    #[test]
    fn round_trip_at_a_coupled_barrier() {
        let target = targets_from(DeviceSpec::default(), 9.5);
        let cal = calibrate_depths(&target, &ExcitonModel::default()).unwrap();
        assert!((cal.depth_e_dot1 - 239.0).abs() < 0.1);
        assert!((cal.depth_e_dot2 - 203.0).abs() < 0.1);
    }

    #[test]
    fn equal_targets_give_equal_depths() {
        let device = DeviceSpec {
            depth_e_dot2: 239.0,
            depth_h_dot2: 119.5,
            ..DeviceSpec::default()
        };
        let lines = ExcitonModel::default()
            .with_device(device.with_barrier(50.0))
            .lines_at(Field::ZERO)
            .unwrap();
        let mid = 0.5 * (lines.low.energy + lines.high.energy);
        let cal = calibrate_depths(&CalibrationTarget::new(mid, mid), &ExcitonModel::default()).unwrap();
        assert!((cal.depth_e_dot1 - cal.depth_e_dot2).abs() < 0.1);
        assert!((cal.depth_e_dot1 - 239.0).abs() < 0.1);
    }

    #[test]
    fn higher_target_means_shallower_dot() {
        let base = targets_from(DeviceSpec::default(), 50.0);
        let raised = CalibrationTarget {
            emission_high: base.emission_high + 1.0,
            ..base
        };
        let a = calibrate_depths(&base, &ExcitonModel::default()).unwrap();
        let b = calibrate_depths(&raised, &ExcitonModel::default()).unwrap();
        assert!(b.depth_e_dot2 < a.depth_e_dot2);
        assert!((b.depth_e_dot1 - a.depth_e_dot1).abs() < 1e-3);
    }

    #[test]
    fn target_above_the_continuum_is_unbound() {
        let model = ExcitonModel::default();
        let threshold = 30.0 + 15.0 - 25.0;
        let err = calibrate_depths(&CalibrationTarget::new(-100.0, threshold + 1.0), &model).unwrap_err();
        assert!(matches!(err, Error::UnboundDot { dot: 2, .. }));
        assert!(err.is_fit_failure());
    }

    #[test]
    fn invalid_targets_are_rejected() {
        let model = ExcitonModel::default();
        assert!(calibrate_depths(&CalibrationTarget::new(-50.0, -60.0), &model).is_err());
        let bad_ratio = CalibrationTarget {
            hole_to_electron_depth_ratio: 1.5,
            ..CalibrationTarget::new(-100.0, -60.0)
        };
        assert!(calibrate_depths(&bad_ratio, &model).is_err());
    }
}
