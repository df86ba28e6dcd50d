//! One-dimensional double-well problem along the growth axis.
//!
//! The potential is discretised on a uniform grid with hard walls at both
//! ends and solved with the three-point Laplacian. The resulting real
//! eigenfunctions feed the ∂/∂z matrix used by the magnetic coupling.

use std::fmt;
use std::io::{self, Write};

use nalgebra::DMatrix;

use crate::error::{check_non_negative, check_positive, Error, Result};
use crate::model::{SolverSettings, Species};
use crate::tridiag::SymTridiagonal;

/// Minimum barrier material required on each side of the wells, nm.
pub const MIN_PADDING: f64 = 15.0;

/// Amplitudes below this fraction of the peak are ignored when counting
/// nodes.
const NODE_FLOOR: f64 = 1e-7;

/// Uniform grid including both Dirichlet end points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    z_min: f64,
    z_max: f64,
    n_points: usize,
}

impl Grid1D {
    pub fn new(z_min: f64, z_max: f64, n_points: usize) -> Result<Self> {
        if !(z_min.is_finite() && z_max.is_finite() && z_max > z_min) {
            return Err(Error::InvalidParameter {
                name: "z_max",
                value: z_max,
                reason: "must exceed z_min",
            });
        }
        if n_points < 3 {
            return Err(Error::InvalidParameter {
                name: "n_points",
                value: n_points as f64,
                reason: "need at least 3 grid points",
            });
        }
        Ok(Grid1D { z_min, z_max, n_points })
    }

    /// Grid whose step is as close as possible to `step` while hitting both
    /// end points exactly.
    pub fn with_step(z_min: f64, z_max: f64, step: f64) -> Result<Self> {
        check_positive("grid_step", step)?;
        let intervals = ((z_max - z_min) / step).round().max(2.0) as usize;
        Grid1D::new(z_min, z_max, intervals + 1)
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn step(&self) -> f64 {
        (self.z_max - self.z_min) / (self.n_points - 1) as f64
    }

    pub fn z(&self, i: usize) -> f64 {
        self.z_min + i as f64 * self.step()
    }

    /// Index of the node closest to `z`, clamped to the grid.
    pub fn nearest(&self, z: f64) -> usize {
        let i = ((z - self.z_min) / self.step()).round();
        i.clamp(0.0, (self.n_points - 1) as f64) as usize
    }
}

/// Two rectangular wells of equal width separated by a barrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleWellSpec {
    pub width: f64,
    pub barrier: f64,
    pub depth1: f64,
    pub depth2: f64,
}

impl DoubleWellSpec {
    pub fn new(width: f64, barrier: f64, depth1: f64, depth2: f64) -> Result<Self> {
        check_positive("well_width", width)?;
        check_positive("barrier", barrier)?;
        check_non_negative("depth1", depth1)?;
        check_non_negative("depth2", depth2)?;
        Ok(DoubleWellSpec {
            width,
            barrier,
            depth1,
            depth2,
        })
    }

    /// Extent of well 1, nm.
    pub fn well1(&self) -> (f64, f64) {
        (0.0, self.width)
    }

    /// Extent of well 2, nm.
    pub fn well2(&self) -> (f64, f64) {
        let start = self.width + self.barrier;
        (start, start + self.width)
    }

    /// Grid covering both wells plus `padding` on each side.
    pub fn grid(&self, step: f64, padding: f64) -> Result<Grid1D> {
        Grid1D::with_step(-padding, self.well2().1 + padding, step)
    }

    pub fn default_grid(&self, settings: &SolverSettings) -> Result<Grid1D> {
        self.grid(settings.grid_step, settings.padding)
    }

    /// The same geometry with the two depths exchanged about the barrier
    /// midpoint, used for symmetry checks.
    pub fn mirrored(&self) -> Self {
        DoubleWellSpec {
            depth1: self.depth2,
            depth2: self.depth1,
            ..*self
        }
    }
}

/// Sample the piecewise-constant double well on `grid`.
///
/// Well edges are snapped to the nearest node. Each node carries the cell
/// average of the potential over [z − h/2, z + h/2], so a node sitting on a
/// snapped edge gets half the depth.
pub fn build_potential(spec: &DoubleWellSpec, grid: &Grid1D) -> Result<Vec<f64>> {
    let (_, end) = spec.well2();
    let left_pad = 0.0 - grid.z_min();
    let right_pad = grid.z_max() - end;
    let slack = 1e-9;
    if left_pad < MIN_PADDING - slack {
        return Err(Error::DomainTooSmall {
            side: "left",
            padding_nm: left_pad,
            required_nm: MIN_PADDING,
        });
    }
    if right_pad < MIN_PADDING - slack {
        return Err(Error::DomainTooSmall {
            side: "right",
            padding_nm: right_pad,
            required_nm: MIN_PADDING,
        });
    }

    let mut potential = vec![0.0; grid.n_points()];
    for (range, depth) in [(spec.well1(), spec.depth1), (spec.well2(), spec.depth2)] {
        if depth == 0.0 {
            continue;
        }
        let a = grid.nearest(range.0);
        let b = grid.nearest(range.1);
        for (i, v) in potential.iter_mut().enumerate().take(b + 1).skip(a) {
            let weight = if (i == a || i == b) && a != b { 0.5 } else { 1.0 };
            *v -= weight * depth;
        }
    }
    Ok(potential)
}

/// Bonding/antibonding character of a vertical level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bonding {
    Bonding,
    Antibonding,
}

impl Bonding {
    /// Lower member of each consecutive pair is bonding.
    pub fn of_index(index: usize) -> Self {
        if index.is_multiple_of(2) {
            Bonding::Bonding
        } else {
            Bonding::Antibonding
        }
    }

    pub fn letter(self) -> char {
        match self {
            Bonding::Bonding => 'B',
            Bonding::Antibonding => 'A',
        }
    }
}

impl fmt::Display for Bonding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bonding::Bonding => "bonding",
            Bonding::Antibonding => "antibonding",
        })
    }
}

/// Lowest eigenpairs of the vertical problem.
#[derive(Debug, Clone)]
pub struct VerticalSpectrum {
    grid: Grid1D,
    energies: Vec<f64>,
    wavefunctions: Vec<Vec<f64>>,
    residuals: Vec<f64>,
    matrix_norm: f64,
}

impl VerticalSpectrum {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// Energies in meV relative to the barrier edge, ascending.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Wavefunction `i` on every grid node (zero at both walls), normalised
    /// so that Σ ψ² h = 1.
    pub fn wavefunction(&self, i: usize) -> &[f64] {
        &self.wavefunctions[i]
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Number of states with E < 0.
    pub fn bound_count(&self) -> usize {
        self.energies.iter().take_while(|&&e| e < 0.0).count()
    }

    /// ‖Hψ − Eψ‖ for each state, with ψ of unit Euclidean norm.
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    /// Infinity norm of the finite-difference Hamiltonian.
    pub fn matrix_norm(&self) -> f64 {
        self.matrix_norm
    }

    /// ∫ψ_i ψ_j dz on the grid.
    pub fn overlap(&self, i: usize, j: usize) -> f64 {
        let h = self.grid.step();
        self.wavefunctions[i]
            .iter()
            .zip(&self.wavefunctions[j])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * h
    }

    /// Number of sign changes of state `i`, ignoring the far tails.
    pub fn node_count(&self, i: usize) -> usize {
        let psi = &self.wavefunctions[i];
        let peak = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let floor = NODE_FLOOR * peak;
        let mut last = 0.0f64;
        let mut nodes = 0;
        for &v in psi {
            if v.abs() < floor {
                continue;
            }
            if last != 0.0 && v.signum() != last.signum() {
                nodes += 1;
            }
            last = v;
        }
        nodes
    }

    /// Largest wall-adjacent amplitude relative to the peak amplitude.
    pub fn boundary_ratio(&self, i: usize) -> f64 {
        let psi = &self.wavefunctions[i];
        let n = psi.len();
        let peak = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        psi[1].abs().max(psi[n - 2].abs()) / peak
    }

    /// Probability within the node range snapped to `[a, b]`, using the
    /// same half weights at the edges as the potential.
    pub fn weight_in(&self, i: usize, range: (f64, f64)) -> f64 {
        let a = self.grid.nearest(range.0);
        let b = self.grid.nearest(range.1);
        let psi = &self.wavefunctions[i];
        let h = self.grid.step();
        (a..=b)
            .map(|k| {
                let w = if (k == a || k == b) && a != b { 0.5 } else { 1.0 };
                w * psi[k] * psi[k]
            })
            .sum::<f64>()
            * h
    }

    /// Write `z_nm,V_meV,psi_0,psi_1,...` for debugging.
    pub fn write_csv<W: Write>(&self, potential: &[f64], mut out: W) -> io::Result<()> {
        write!(out, "z_nm,V_meV")?;
        for i in 0..self.len() {
            write!(out, ",psi_{i}")?;
        }
        writeln!(out)?;
        for (k, v) in potential.iter().enumerate() {
            write!(out, "{:.6},{:.6}", self.grid.z(k), v)?;
            for psi in &self.wavefunctions {
                write!(out, ",{:.6}", psi[k])?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Lowest `n_states` eigenpairs of `−(ℏ²/2m) d²/dz² + V(z)` with hard walls.
pub fn solve_vertical(
    potential: &[f64],
    grid: &Grid1D,
    species: &Species,
    n_states: usize,
) -> Result<VerticalSpectrum> {
    if n_states == 0 {
        return Err(Error::InvalidParameter {
            name: "n_states",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    let n = grid.n_points();
    assert_eq!(potential.len(), n, "potential does not match grid");

    let h = grid.step();
    let t = species.kinetic_coefficient() / (h * h);
    // Unknowns are the interior nodes; the walls are fixed at zero.
    let diag: Vec<f64> = potential[1..n - 1].iter().map(|v| 2.0 * t + v).collect();
    let off = vec![-t; n - 3];
    let matrix = SymTridiagonal::new(diag, off);
    let (energies, vectors) = matrix.lowest(n_states);

    if energies[0] >= 0.0 {
        return Err(Error::NoBoundState {
            energy_mev: energies[0],
        });
    }

    let residuals = vectors
        .iter()
        .zip(&energies)
        .map(|(v, &e)| {
            let hv = matrix.mul_vec(v);
            hv.iter().zip(v).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt()
        })
        .collect();

    let scale = 1.0 / h.sqrt();
    let wavefunctions = vectors
        .into_iter()
        .map(|v| {
            // Fix the sign so the largest lobe is positive.
            let peak = v.iter().fold(0.0f64, |m, &x| if x.abs() > m.abs() { x } else { m });
            let sign = if peak < 0.0 { -scale } else { scale };
            let mut psi = Vec::with_capacity(n);
            psi.push(0.0);
            psi.extend(v.iter().map(|x| sign * x));
            psi.push(0.0);
            psi
        })
        .collect();

    Ok(VerticalSpectrum {
        grid: *grid,
        energies,
        wavefunctions,
        residuals,
        matrix_norm: matrix.norm_inf(),
    })
}

/// Bonding labels and dot-resolved weights for each state of a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub labels: Vec<Bonding>,
    /// `(w₁, w₂)`: probability in well 1 and well 2.
    pub localization: Vec<(f64, f64)>,
    /// 1 or 2: the dot holding most of the probability.
    pub dominant_dot: Vec<u8>,
}

pub fn classify_states(spectrum: &VerticalSpectrum, spec: &DoubleWellSpec) -> Classification {
    let n = spectrum.len();
    let labels = (0..n).map(Bonding::of_index).collect();
    let localization: Vec<(f64, f64)> = (0..n)
        .map(|i| (spectrum.weight_in(i, spec.well1()), spectrum.weight_in(i, spec.well2())))
        .collect();
    let dominant_dot = localization
        .iter()
        .map(|&(w1, w2)| if w1 >= w2 { 1 } else { 2 })
        .collect();
    Classification {
        labels,
        localization,
        dominant_dot,
    }
}

/// ⟨ψ_i|∂/∂z|ψ_j⟩ in nm⁻¹ over the retained vertical states.
#[derive(Debug, Clone, PartialEq)]
pub struct DzMatrix(DMatrix<f64>);

impl DzMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// max |D + Dᵀ|.
    pub fn antisymmetry_defect(&self) -> f64 {
        let d = &self.0;
        (d + d.transpose()).amax()
    }
}

/// Central-difference derivative with trapezoid quadrature over the first
/// `count` states, antisymmetrised as (D − Dᵀ)/2.
pub fn dz_matrix(spectrum: &VerticalSpectrum, count: usize) -> DzMatrix {
    let count = count.min(spectrum.len());
    let grid = spectrum.grid();
    let h = grid.step();
    let n = grid.n_points();
    let derivatives: Vec<Vec<f64>> = (0..count)
        .map(|j| {
            let psi = spectrum.wavefunction(j);
            (0..n)
                .map(|k| {
                    if k == 0 {
                        (psi[1] - psi[0]) / h
                    } else if k == n - 1 {
                        (psi[n - 1] - psi[n - 2]) / h
                    } else {
                        (psi[k + 1] - psi[k - 1]) / (2.0 * h)
                    }
                })
                .collect()
        })
        .collect();
    let raw = DMatrix::from_fn(count, count, |i, j| {
        let psi = spectrum.wavefunction(i);
        let dpsi = &derivatives[j];
        let interior: f64 = (1..n - 1).map(|k| psi[k] * dpsi[k]).sum();
        let ends = 0.5 * (psi[0] * dpsi[0] + psi[n - 1] * dpsi[n - 1]);
        (interior + ends) * h
    });
    DzMatrix((&raw - raw.transpose()) * 0.5)
}

/// Vertical states retained for the product basis.
#[derive(Debug, Clone)]
pub struct VerticalBasis {
    pub energies: Vec<f64>,
    pub dz: DzMatrix,
}

impl VerticalBasis {
    /// Keep every bound state up to `cap`.
    pub fn from_spectrum(spectrum: &VerticalSpectrum, cap: usize) -> Self {
        let count = spectrum.bound_count().min(cap).max(1);
        VerticalBasis {
            energies: spectrum.energies()[..count].to_vec(),
            dz: dz_matrix(spectrum, count),
        }
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }
}

/// Solve the double well for one carrier with the given settings.
pub fn solve_double_well(
    spec: &DoubleWellSpec,
    species: &Species,
    settings: &SolverSettings,
) -> Result<VerticalSpectrum> {
    let grid = spec.default_grid(settings)?;
    let potential = build_potential(spec, &grid)?;
    solve_vertical(&potential, &grid, species, settings.max_vertical_states)
}
