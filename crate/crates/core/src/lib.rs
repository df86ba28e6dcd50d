//! Electron, hole and exciton states of two vertically stacked quantum dots
//! in a nanowire, with the magnetic field applied in the plane of the dots.
//!
//! Energies are in meV, lengths in nm and fields in T throughout.
//!
//! ```
//! use dqdot::{ExcitonModel, Field};
//!
//! let model = ExcitonModel::default().with_barrier(7.0);
//! let lines = model.lines_at(Field::ZERO).unwrap();
//! assert!(lines.gap() > 40.0 && lines.gap() < 55.0);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod error;
pub mod lateral;
pub mod model;
pub mod molecule;
pub mod powerlaw;
pub mod spectroscopy;
pub mod tridiag;
pub mod vertical;

pub use calibration::{calibrate_depths, Calibration, CalibrationTarget};
pub use error::{Error, Result};
pub use lateral::{build_basis, LateralBasis, Orbital};
pub use model::{Charge, DeviceSpec, Field, SolverSettings, Species, CONSTANTS};
pub use molecule::{Label, MolecularSpectrum, MoleculeSolver};
pub use powerlaw::{eval_powerlaw, fit_powerlaw, PowerLawFit, PowerLawParams};
pub use spectroscopy::{EmissionLine, EmissionPair, ExcitonKind, ExcitonModel, GapCurve};
pub use vertical::{
    build_potential, solve_double_well, solve_vertical, DoubleWellSpec, Grid1D, VerticalBasis, VerticalSpectrum,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/vertical.md")]
    mod vertical {}
    #[doc = include_str!("../../../book/src/lateral.md")]
    mod lateral {}
    #[doc = include_str!("../../../book/src/molecule.md")]
    mod molecule {}
    #[doc = include_str!("../../../book/src/spectroscopy.md")]
    mod spectroscopy {}
    #[doc = include_str!("../../../book/src/calibration.md")]
    mod calibration {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
