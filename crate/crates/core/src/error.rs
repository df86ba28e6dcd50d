use thiserror::Error;

/// Errors raised by the solvers and fitting routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error(
        "vertical domain too small: padding {padding_nm:.3} nm on the {side} side, need at least {required_nm} nm"
    )]
    DomainTooSmall {
        side: &'static str,
        padding_nm: f64,
        required_nm: f64,
    },

    #[error("no bound state: ground energy {energy_mev:.6} meV is not below the barrier edge")]
    NoBoundState { energy_mev: f64 },

    #[error("matrix is not Hermitian (max |H - H^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("lateral basis built at B = {basis_tesla} T but Hamiltonian requested at B = {field_tesla} T")]
    BasisMismatch { basis_tesla: f64, field_tesla: f64 },

    #[error("ambiguous adiabatic continuation at B = {field_tesla} T (best overlap {overlap:.3})")]
    AmbiguousContinuation { field_tesla: f64, overlap: f64 },

    #[error("spectrum has no level labelled {0}")]
    MissingLabel(String),

    #[error("gap {gap_mev:.6} meV outside the model range [{min_mev:.6}, {max_mev:.6}] meV")]
    OutOfRange { gap_mev: f64, min_mev: f64, max_mev: f64 },

    #[error("power law has a pole at L = {length_nm} nm (offset {offset_nm} nm)")]
    Pole { length_nm: f64, offset_nm: f64 },

    #[error("singular fit: {0}")]
    SingularFit(&'static str),

    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("dot {dot} is unbound for candidate depth {depth_mev:.3} meV")]
    UnboundDot { dot: usize, depth_mev: f64 },

    #[error("at L = {barrier_nm} nm: {source}")]
    AtBarrier {
        barrier_nm: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for failures of the fitting/calibration layer, as opposed to the
    /// underlying eigenvalue solvers.
    pub fn is_fit_failure(&self) -> bool {
        match self {
            Error::SingularFit(_) | Error::NoConvergence { .. } | Error::UnboundDot { .. } => true,
            Error::AtBarrier { source, .. } => source.is_fit_failure(),
            _ => false,
        }
    }

    /// Caused by bad input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::InvalidParameter { .. } | Error::DomainTooSmall { .. } => true,
            Error::AtBarrier { source, .. } => source.is_input_error(),
            _ => false,
        }
    }

    /// Short name of the stage that raised the error.
    pub fn module(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "model",
            Error::DomainTooSmall { .. } | Error::NoBoundState { .. } => "vertical",
            Error::NotHermitian { .. }
            | Error::BasisMismatch { .. }
            | Error::AmbiguousContinuation { .. }
            | Error::MissingLabel(_) => "molecule",
            Error::OutOfRange { .. } => "spectroscopy",
            Error::Pole { .. } | Error::SingularFit(_) => "powerlaw",
            Error::NoConvergence { .. } | Error::UnboundDot { .. } => "calibration",
            Error::AtBarrier { source, .. } => source.module(),
        }
    }

    pub(crate) fn at_barrier(self, barrier_nm: f64) -> Error {
        Error::AtBarrier {
            barrier_nm,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

pub(crate) fn check_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be non-negative and finite",
        })
    }
}
