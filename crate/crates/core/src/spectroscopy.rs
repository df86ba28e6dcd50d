//! Excitonic emission lines built from the electron and hole spectra.
//!
//! An emission line pairs the electron and hole levels carrying the same
//! label: the bonding exciton uses both `B-s` levels and the antibonding
//! exciton both `A-s` levels. Its energy is
//! `reference_offset + ε_e + ε_h − binding_energy`, with ε counted from the
//! barrier band edge, so the offset and the binding energy drop out of
//! every gap.

use rayon::prelude::*;

use crate::error::{check_positive, Error, Result};
use crate::model::{Charge, DeviceSpec, Field, SolverSettings, Species};
use crate::molecule::{Label, MolecularSpectrum, MoleculeSolver};
use crate::vertical::DoubleWellSpec;

/// Which molecular exciton a line belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExcitonKind {
    /// Built on the bonding `s` levels; the low-energy (deep) dot line.
    Bonding,
    /// Built on the antibonding `s` levels; the high-energy dot line.
    Antibonding,
}

impl ExcitonKind {
    pub fn label(self) -> Label {
        match self {
            ExcitonKind::Bonding => Label::BONDING_S,
            ExcitonKind::Antibonding => Label::ANTIBONDING_S,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ExcitonKind::Bonding => "bonding_exciton",
            ExcitonKind::Antibonding => "antibonding_exciton",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionLine {
    pub kind: ExcitonKind,
    /// meV, including the device's reference offset.
    pub energy: f64,
    pub field: Field,
}

/// The two optically active lines at one field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionPair {
    pub low: EmissionLine,
    pub high: EmissionLine,
}

impl EmissionPair {
    pub fn field(&self) -> Field {
        self.low.field
    }

    /// ΔE_S: antibonding minus bonding line.
    pub fn gap(&self) -> f64 {
        self.high.energy - self.low.energy
    }
}

/// Pair the `B-s` and `A-s` levels of both carriers into emission lines.
pub fn emission_lines(
    electron: &MolecularSpectrum,
    hole: &MolecularSpectrum,
    device: &DeviceSpec,
) -> Result<EmissionPair> {
    if electron.field != hole.field {
        return Err(Error::InvalidParameter {
            name: "B",
            value: hole.field.tesla(),
            reason: "electron and hole spectra computed at different fields",
        });
    }
    let line = |kind: ExcitonKind| -> Result<EmissionLine> {
        let label = kind.label();
        let e = electron.energy_of(label)?;
        let h = hole.energy_of(label)?;
        Ok(EmissionLine {
            kind,
            energy: device.reference_offset + e + h - device.binding_energy,
            field: electron.field,
        })
    };
    Ok(EmissionPair {
        low: line(ExcitonKind::Bonding)?,
        high: line(ExcitonKind::Antibonding)?,
    })
}

/// Ordered (x, ΔE_S) samples, with x either L in nm or B in T.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GapCurve {
    pub points: Vec<(f64, f64)>,
}

impl GapCurve {
    pub fn is_strictly_decreasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].1 < w[0].1)
    }

    pub fn gaps(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }
}

/// One barrier thickness of an L sweep.
#[derive(Debug, Clone)]
pub struct LPoint {
    pub barrier: f64,
    pub lines: EmissionPair,
    /// Electron levels of the three lowest shells at B = 0, ascending.
    pub electron_levels: Vec<(Label, f64)>,
}

#[derive(Debug, Clone)]
pub struct LSweep {
    pub points: Vec<LPoint>,
}

impl LSweep {
    pub fn gap_curve(&self) -> GapCurve {
        GapCurve {
            points: self.points.iter().map(|p| (p.barrier, p.lines.gap())).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BSweep {
    pub lines: Vec<EmissionPair>,
    pub electron: Vec<MolecularSpectrum>,
    pub hole: Vec<MolecularSpectrum>,
}

impl BSweep {
    pub fn gap_curve(&self) -> GapCurve {
        GapCurve {
            points: self.lines.iter().map(|p| (p.field().tesla(), p.gap())).collect(),
        }
    }
}

/// Default L window for effective-distance inversion, nm.
pub const DEFAULT_INVERSION_RANGE: (f64, f64) = (1.0, 50.0);

/// Device plus carriers plus numerics: everything needed to compute
/// emission lines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitonModel {
    pub device: DeviceSpec,
    pub electron: Species,
    pub hole: Species,
    pub settings: SolverSettings,
}

impl Default for ExcitonModel {
    fn default() -> Self {
        ExcitonModel {
            device: DeviceSpec::default(),
            electron: Species::electron(),
            hole: Species::hole(),
            settings: SolverSettings::default(),
        }
    }
}

impl ExcitonModel {
    pub fn new(device: DeviceSpec, electron: Species, hole: Species, settings: SolverSettings) -> Result<Self> {
        let model = ExcitonModel {
            device,
            electron,
            hole,
            settings,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        self.device.validate()?;
        self.settings.validate()?;
        if self.electron.charge() != Charge::Electron || self.hole.charge() != Charge::Hole {
            return Err(Error::InvalidParameter {
                name: "charge",
                value: 0.0,
                reason: "expected an electron and a hole",
            });
        }
        Ok(())
    }

    pub fn with_barrier(&self, barrier: f64) -> Self {
        ExcitonModel {
            device: self.device.with_barrier(barrier),
            ..*self
        }
    }

    pub fn with_device(&self, device: DeviceSpec) -> Self {
        ExcitonModel { device, ..*self }
    }

    pub fn well(&self, charge: Charge) -> Result<DoubleWellSpec> {
        let (d1, d2) = self.device.depths(charge);
        DoubleWellSpec::new(self.device.well_width, self.device.barrier, d1, d2)
    }

    pub fn solver(&self, species: Species) -> Result<MoleculeSolver> {
        MoleculeSolver::new(species, &self.well(species.charge())?, &self.settings)
    }

    fn solvers(&self) -> Result<(MoleculeSolver, MoleculeSolver)> {
        let (e, h) = rayon::join(|| self.solver(self.electron), || self.solver(self.hole));
        Ok((e?, h?))
    }

    /// Emission lines at `field`, continuing labels from B = 0.
    pub fn lines_at(&self, field: Field) -> Result<EmissionPair> {
        let sweep = self.sweep_b(&[field])?;
        Ok(sweep.lines[0])
    }

    /// ΔE_S at B = 0.
    pub fn zero_field_gap(&self) -> Result<f64> {
        let (e, h) = self.solvers()?;
        let pair = emission_lines(&e.spectrum(Field::ZERO)?, &h.spectrum(Field::ZERO)?, &self.device)?;
        Ok(pair.gap())
    }

    fn l_point(&self, barrier: f64) -> Result<LPoint> {
        let model = self.with_barrier(barrier);
        model.device.validate()?;
        let (e, h) = model.solvers()?;
        let es = e.spectrum(Field::ZERO)?;
        let hs = h.spectrum(Field::ZERO)?;
        let lines = emission_lines(&es, &hs, &model.device)?;
        let electron_levels = es
            .labels
            .iter()
            .zip(&es.energies)
            .filter(|(l, _)| l.vertical < 2 && l.orbital.shell() <= 2)
            .map(|(&l, &e)| (l, e))
            .collect();
        Ok(LPoint {
            barrier,
            lines,
            electron_levels,
        })
    }

    /// Zero-field gaps and electron level diagrams for each barrier
    /// thickness. Points are computed in parallel; output order follows
    /// `barriers`.
    pub fn sweep_l(&self, barriers: &[f64]) -> Result<LSweep> {
        for (k, &l) in barriers.iter().enumerate() {
            check_positive("L", l)?;
            if k > 0 && l <= barriers[k - 1] {
                return Err(Error::InvalidParameter {
                    name: "L",
                    value: l,
                    reason: "barrier values must be strictly ascending",
                });
            }
        }
        let points = barriers
            .par_iter()
            .map(|&l| self.l_point(l).map_err(|e| e.at_barrier(l)))
            .collect::<Result<Vec<_>>>()?;
        Ok(LSweep { points })
    }

    /// Emission lines at ascending fields. Electron and hole labels are each
    /// continued adiabatically from B = 0.
    pub fn sweep_b(&self, fields: &[Field]) -> Result<BSweep> {
        let (e, h) = self.solvers()?;
        let (es, hs) = rayon::join(|| e.sweep(fields), || h.sweep(fields));
        let (electron, hole) = (es?, hs?);
        let lines = electron
            .iter()
            .zip(&hole)
            .map(|(a, b)| emission_lines(a, b, &self.device))
            .collect::<Result<Vec<_>>>()?;
        Ok(BSweep { lines, electron, hole })
    }

    /// Zero-field gap E(`a`) − E(`b`) of one carrier at barrier `barrier`.
    pub fn level_difference(&self, charge: Charge, a: Label, b: Label, barrier: f64) -> Result<f64> {
        let model = self.with_barrier(barrier);
        let species = match charge {
            Charge::Electron => model.electron,
            Charge::Hole => model.hole,
        };
        let s = model.solver(species)?.spectrum(Field::ZERO)?;
        Ok(s.energy_of(a)? - s.energy_of(b)?)
    }

    /// First barrier thickness in `range` where levels `a` and `b` of one
    /// carrier cross at B = 0, scanning in steps of `step` and refining by
    /// bisection. `None` if their order never changes.
    pub fn level_crossing(
        &self,
        charge: Charge,
        a: Label,
        b: Label,
        range: (f64, f64),
        step: f64,
    ) -> Result<Option<f64>> {
        check_positive("L", range.0)?;
        check_positive("step", step)?;
        let diff = |l: f64| self.level_difference(charge, a, b, l).map_err(|e| e.at_barrier(l));
        let mut lo = range.0;
        let mut d_lo = diff(lo)?;
        while lo < range.1 {
            let hi = (lo + step).min(range.1);
            let d_hi = diff(hi)?;
            if d_lo == 0.0 {
                return Ok(Some(lo));
            }
            if d_lo.signum() != d_hi.signum() {
                let (mut x0, mut x1) = (lo, hi);
                while x1 - x0 > 1e-4 {
                    let mid = 0.5 * (x0 + x1);
                    if diff(mid)?.signum() == d_lo.signum() {
                        x0 = mid;
                    } else {
                        x1 = mid;
                    }
                }
                return Ok(Some(0.5 * (x0 + x1)));
            }
            lo = hi;
            d_lo = d_hi;
        }
        Ok(None)
    }

    /// Barrier thickness at which the zero-field gap equals `gap`, by
    /// bisection on `range`.
    pub fn effective_interdot_distance(&self, gap: f64, range: (f64, f64)) -> Result<f64> {
        let (mut lo, mut hi) = range;
        check_positive("L", lo)?;
        if hi <= lo {
            return Err(Error::InvalidParameter {
                name: "L",
                value: hi,
                reason: "inversion range must be ascending",
            });
        }
        let at = |l: f64| self.with_barrier(l).zero_field_gap().map_err(|e| e.at_barrier(l));
        let (g_lo, g_hi) = (at(lo)?, at(hi)?);
        if !(gap <= g_lo && gap >= g_hi) {
            return Err(Error::OutOfRange {
                gap_mev: gap,
                min_mev: g_hi,
                max_mev: g_lo,
            });
        }
        while hi - lo > 1e-3 {
            let mid = 0.5 * (lo + hi);
            if at(mid)? > gap {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}
