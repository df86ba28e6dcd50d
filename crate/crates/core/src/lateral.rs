//! Cartesian 2D harmonic-oscillator basis for the in-plane motion.
//!
//! With A = B(0, 0, y) the field adds ½mΩ_c²y² to the lateral parabola. That
//! term is absorbed exactly into a stiffer y oscillator,
//! ℏΩ_y = √((ℏΩ)² + (ℏΩ_c)²), leaving only the bilinear y ∂/∂z coupling to be
//! treated in the product basis.

use std::fmt;

use nalgebra::DMatrix;

use crate::model::{Field, Species};

/// ℏΩ_y = √((ℏΩ)² + (ℏΩ_c)²).
pub fn renormalized_y_quantum(lateral_quantum: f64, cyclotron: f64) -> f64 {
    lateral_quantum.hypot(cyclotron)
}

/// Occupation numbers of one lateral oscillator state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Orbital {
    pub nx: usize,
    pub ny: usize,
}

impl Orbital {
    pub const S: Orbital = Orbital { nx: 0, ny: 0 };
    pub const PX: Orbital = Orbital { nx: 1, ny: 0 };
    pub const PY: Orbital = Orbital { nx: 0, ny: 1 };

    pub fn shell(&self) -> usize {
        self.nx + self.ny
    }
}

impl fmt::Display for Orbital {
    /// `s`, `px`, `py`, `dxx`, `dxy`, `dyy`, ...
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHELLS: &[u8] = b"spdfghik";
        let shell = self.shell();
        let letter = SHELLS.get(shell).map_or('n', |&c| c as char);
        write!(f, "{letter}")?;
        if shell > 0 {
            write!(f, "{}{}", "x".repeat(self.nx), "y".repeat(self.ny))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LateralState {
    pub orbital: Orbital,
    /// (n_x + ½)ℏΩ_x + (n_y + ½)ℏΩ_y, meV.
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LateralBasis {
    quantum_x: f64,
    quantum_y: f64,
    /// ℏ²/(2m ℏΩ_y), nm².
    y_length_sq: f64,
    max_total_quanta: usize,
    field: Field,
    states: Vec<LateralState>,
}

/// All states with n_x + n_y ≤ `max_total_quanta`, ordered by n_x then n_y.
pub fn build_basis(species: &Species, field: Field, max_total_quanta: usize) -> LateralBasis {
    let quantum_x = species.lateral_quantum();
    let quantum_y = renormalized_y_quantum(quantum_x, species.cyclotron_energy(field));
    let mut states = Vec::new();
    for nx in 0..=max_total_quanta {
        for ny in 0..=(max_total_quanta - nx) {
            states.push(LateralState {
                orbital: Orbital { nx, ny },
                energy: (nx as f64 + 0.5) * quantum_x + (ny as f64 + 0.5) * quantum_y,
            });
        }
    }
    LateralBasis {
        quantum_x,
        quantum_y,
        y_length_sq: species.kinetic_coefficient() / quantum_y,
        max_total_quanta,
        field,
        states,
    }
}

impl LateralBasis {
    pub fn quantum_x(&self) -> f64 {
        self.quantum_x
    }

    pub fn quantum_y(&self) -> f64 {
        self.quantum_y
    }

    pub fn max_total_quanta(&self) -> usize {
        self.max_total_quanta
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn states(&self) -> &[LateralState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, orbital: Orbital) -> Option<usize> {
        self.states.iter().position(|s| s.orbital == orbital)
    }

    /// Oscillator length squared ℏ/(mΩ_y) / 2, i.e. ⟨0|y²|0⟩, in nm².
    pub fn y_length_sq(&self) -> f64 {
        self.y_length_sq
    }

    /// ⟨n|y|n′⟩ for the y oscillator, in nm.
    pub fn y_element(&self, ny: usize, ny2: usize) -> f64 {
        let upper = ny.max(ny2);
        if ny.abs_diff(ny2) == 1 {
            (upper as f64 * self.y_length_sq).sqrt()
        } else {
            0.0
        }
    }

    /// ⟨a|y|b⟩ over the whole basis; diagonal in n_x.
    pub fn y_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| {
            let (a, b) = (self.states[i].orbital, self.states[j].orbital);
            if a.nx == b.nx {
                self.y_element(a.ny, b.ny)
            } else {
                0.0
            }
        })
    }
}
