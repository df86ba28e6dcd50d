//! Units, physical constants and the device description shared by every
//! solver.
//!
//! Everything is expressed in meV, nm and T. Constants are reduced from the
//! CODATA 2018 values of ℏ, m₀ and e.

use std::fmt;

use crate::error::{check_non_negative, check_positive, Error, Result};

const HBAR_J_S: f64 = 1.054_571_817e-34;
const ELECTRON_MASS_KG: f64 = 9.109_383_701_5e-31;
const ELEMENTARY_CHARGE_C: f64 = 1.602_176_634e-19;

/// Physical constants pre-reduced to meV / nm / T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysConstants {
    /// ℏ²/2m₀ in meV·nm².
    pub hbar2_over_2m0: f64,
    /// ℏe/m₀ in meV/T, so that ℏΩ_c = `cyclotron_coeff` · B / (m/m₀).
    pub cyclotron_coeff: f64,
}

impl PhysConstants {
    pub const fn codata() -> Self {
        // J·m² -> meV·nm²: divide by e (J -> eV), times 1e3 (meV) and 1e18 (nm²).
        let hbar2_over_2m0 = HBAR_J_S * HBAR_J_S / (2.0 * ELECTRON_MASS_KG) / ELEMENTARY_CHARGE_C * 1e21;
        // ℏe/m₀ in J/T -> meV/T: the charge cancels against the J -> eV step.
        let cyclotron_coeff = HBAR_J_S / ELECTRON_MASS_KG * 1e3;
        PhysConstants {
            hbar2_over_2m0,
            cyclotron_coeff,
        }
    }
}

pub const CONSTANTS: PhysConstants = PhysConstants::codata();

/// Sign of the charge entering the `∓ iℏΩ_c y ∂/∂z` coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Charge {
    /// Electron: coupling enters with a minus sign.
    Electron,
    /// Hole: coupling enters with a plus sign.
    Hole,
}

impl Charge {
    pub fn hyz_sign(self) -> f64 {
        match self {
            Charge::Electron => -1.0,
            Charge::Hole => 1.0,
        }
    }
}

impl fmt::Display for Charge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Charge::Electron => "electron",
            Charge::Hole => "hole",
        })
    }
}

/// A carrier type in the single-band effective-mass picture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Species {
    mass_ratio: f64,
    lateral_quantum: f64,
    charge: Charge,
}

impl Species {
    pub fn new(mass_ratio: f64, lateral_quantum: f64, charge: Charge) -> Result<Self> {
        check_positive("mass_ratio", mass_ratio)?;
        check_positive("lateral_quantum", lateral_quantum)?;
        Ok(Species {
            mass_ratio,
            lateral_quantum,
            charge,
        })
    }

    /// Electron with m = 0.03 m₀ and ℏΩ = 30 meV.
    pub fn electron() -> Self {
        Species {
            mass_ratio: 0.03,
            lateral_quantum: 30.0,
            charge: Charge::Electron,
        }
    }

    /// Hole with m = 0.06 m₀ and ℏΩ = 15 meV.
    pub fn hole() -> Self {
        Species {
            mass_ratio: 0.06,
            lateral_quantum: 15.0,
            charge: Charge::Hole,
        }
    }

    pub fn mass_ratio(&self) -> f64 {
        self.mass_ratio
    }

    /// ℏΩ of the isotropic lateral parabola, meV.
    pub fn lateral_quantum(&self) -> f64 {
        self.lateral_quantum
    }

    pub fn charge(&self) -> Charge {
        self.charge
    }

    pub fn hyz_sign(&self) -> f64 {
        self.charge.hyz_sign()
    }

    /// The same species with the opposite coupling sign.
    pub fn with_charge(self, charge: Charge) -> Self {
        Species { charge, ..self }
    }

    /// ℏ²/2m in meV·nm².
    pub fn kinetic_coefficient(&self) -> f64 {
        CONSTANTS.hbar2_over_2m0 / self.mass_ratio
    }

    /// ℏΩ_c = ℏeB/m in meV.
    pub fn cyclotron_energy(&self, field: Field) -> f64 {
        CONSTANTS.cyclotron_coeff * field.tesla() / self.mass_ratio
    }
}

/// Magnetic field magnitude along x (Voigt geometry), in tesla.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Field(f64);

impl Field {
    pub const ZERO: Field = Field(0.0);

    pub fn new(tesla: f64) -> Result<Self> {
        check_non_negative("B", tesla)?;
        Ok(Field(tesla))
    }

    pub fn tesla(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} T", self.0)
    }
}

/// Geometry and confinement depths of one double-dot molecule.
///
/// Dot 1 is the deeper, low-energy dot and sits at z ∈ [0, H]; dot 2 sits at
/// z ∈ [H + L, 2H + L]. Depths are counted down from the barrier band edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceSpec {
    pub well_width: f64,
    pub barrier: f64,
    pub depth_e_dot1: f64,
    pub depth_e_dot2: f64,
    pub depth_h_dot1: f64,
    pub depth_h_dot2: f64,
    pub binding_energy: f64,
    pub reference_offset: f64,
}

impl Default for DeviceSpec {
    fn default() -> Self {
        DeviceSpec {
            well_width: 4.5,
            barrier: 7.0,
            depth_e_dot1: 239.0,
            depth_e_dot2: 203.0,
            depth_h_dot1: 119.5,
            depth_h_dot2: 101.5,
            binding_energy: 25.0,
            reference_offset: 0.0,
        }
    }
}

impl DeviceSpec {
    pub fn validate(&self) -> Result<()> {
        check_positive("well_width", self.well_width)?;
        check_positive("barrier", self.barrier)?;
        check_non_negative("depth_e_dot1", self.depth_e_dot1)?;
        check_non_negative("depth_e_dot2", self.depth_e_dot2)?;
        check_non_negative("depth_h_dot1", self.depth_h_dot1)?;
        check_non_negative("depth_h_dot2", self.depth_h_dot2)?;
        if !self.binding_energy.is_finite() {
            return Err(Error::InvalidParameter {
                name: "binding_energy",
                value: self.binding_energy,
                reason: "must be finite",
            });
        }
        if !self.reference_offset.is_finite() {
            return Err(Error::InvalidParameter {
                name: "reference_offset",
                value: self.reference_offset,
                reason: "must be finite",
            });
        }
        if self.depth_e_dot1 < self.depth_e_dot2 {
            return Err(Error::InvalidParameter {
                name: "depth_e_dot1",
                value: self.depth_e_dot1,
                reason: "dot 1 must be at least as deep as dot 2",
            });
        }
        if self.depth_h_dot1 < self.depth_h_dot2 {
            return Err(Error::InvalidParameter {
                name: "depth_h_dot1",
                value: self.depth_h_dot1,
                reason: "dot 1 must be at least as deep as dot 2",
            });
        }
        Ok(())
    }

    pub fn with_barrier(self, barrier: f64) -> Self {
        DeviceSpec { barrier, ..self }
    }

    /// Depths (dot 1, dot 2) seen by a carrier of the given charge.
    pub fn depths(&self, charge: Charge) -> (f64, f64) {
        match charge {
            Charge::Electron => (self.depth_e_dot1, self.depth_e_dot2),
            Charge::Hole => (self.depth_h_dot1, self.depth_h_dot2),
        }
    }
}

/// Discretisation and truncation knobs shared by all solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Finite-difference step along z, nm.
    pub grid_step: f64,
    /// Barrier material kept on each side of the double well, nm.
    pub padding: f64,
    /// Maximum number of bound vertical states kept in the product basis.
    pub max_vertical_states: usize,
    /// Lateral states with n_x + n_y ≤ this value are kept.
    pub lateral_quanta: usize,
    /// Largest field increment used for adiabatic labelling, T.
    pub field_step: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            grid_step: 0.01,
            padding: 20.0,
            max_vertical_states: 4,
            lateral_quanta: 6,
            field_step: 0.1,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        check_positive("grid_step", self.grid_step)?;
        check_positive("padding", self.padding)?;
        check_positive("field_step", self.field_step)?;
        if self.max_vertical_states == 0 {
            return Err(Error::InvalidParameter {
                name: "max_vertical_states",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn constants_match_tabulated_values() {
        assert!(rel(CONSTANTS.hbar2_over_2m0, 38.0998) < 1e-4);
        assert!(rel(CONSTANTS.cyclotron_coeff, 0.115767) < 1e-4);
    }

    #[test]
    fn kinetic_coefficient_examples() {
        let free = Species::new(1.0, 1.0, Charge::Electron).unwrap();
        assert!(rel(free.kinetic_coefficient(), 38.0998) < 1e-4);
        assert!(rel(Species::electron().kinetic_coefficient(), 1269.99) < 1e-4);
        assert!(rel(Species::hole().kinetic_coefficient(), 634.997) < 1e-4);
    }

    #[test]
    fn cyclotron_energy_examples() {
        let b8 = Field::new(8.0).unwrap();
        assert_eq!(Species::electron().cyclotron_energy(Field::ZERO), 0.0);
        assert!((Species::electron().cyclotron_energy(b8) - 30.87).abs() < 0.005);
        assert!((Species::hole().cyclotron_energy(b8) - 15.44).abs() < 0.005);
    }

    #[test]
    fn cyclotron_energy_is_linear_and_inverse_in_mass() {
        let s = Species::electron();
        for b in [0.1, 0.7, 3.3, 8.0] {
            let one = s.cyclotron_energy(Field::new(b).unwrap());
            let two = s.cyclotron_energy(Field::new(2.0 * b).unwrap());
            assert_eq!(two, 2.0 * one);
            let heavy = Species::new(2.0 * s.mass_ratio(), 30.0, Charge::Electron).unwrap();
            assert_eq!(heavy.cyclotron_energy(Field::new(b).unwrap()), 0.5 * one);
        }
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert!(Field::new(-0.1).is_err());
        assert!(Species::new(0.0, 30.0, Charge::Electron).is_err());
        assert!(Species::new(0.03, -1.0, Charge::Hole).is_err());
        let swapped = DeviceSpec {
            depth_e_dot1: 200.0,
            ..DeviceSpec::default()
        };
        assert!(swapped.validate().is_err());
        assert!(DeviceSpec::default().validate().is_ok());
    }

    #[test]
    fn published_hole_depths_are_half_the_electron_depths() {
        let d = DeviceSpec::default();
        assert_eq!(d.depth_h_dot1, d.depth_e_dot1 / 2.0);
        assert_eq!(d.depth_h_dot2, d.depth_e_dot2 / 2.0);
    }
}
