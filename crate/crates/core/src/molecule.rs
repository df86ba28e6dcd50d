//! Full single-particle problem in the product basis
//! {vertical eigenstates} ⊗ {lateral oscillator states}.
//!
//! The field enters through the renormalised y oscillator (already in the
//! lateral basis) and through
//!
//! ```text
//! ⟨v, n_x, n_y| H_yz |v′, n_x′, n_y′⟩ = ∓ i ℏΩ_c ⟨n_y|y|n_y′⟩ ⟨v|∂_z|v′⟩ δ(n_x, n_x′)
//! ```
//!
//! which only connects states of opposite vertical parity and adjacent n_y.
//! Since n_x is conserved, each n_x block is diagonalised on its own.

use std::fmt;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::lateral::{build_basis, LateralBasis, Orbital};
use crate::model::{Field, SolverSettings, Species};
use crate::vertical::{solve_double_well, Bonding, DoubleWellSpec, VerticalBasis};

pub type Complex64 = Complex<f64>;

/// Minimum |⟨ψ(B)|ψ(B − ΔB)⟩| accepted when continuing a label.
pub const OVERLAP_THRESHOLD: f64 = 0.7;

/// Smallest field increment tried before giving up on a continuation.
const MIN_FIELD_STEP: f64 = 1e-4;

/// Identity of a product-basis state, also used as the adiabatic label of a
/// molecular level: `B-s`, `A-s`, `B-py`, `A2-px`, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    /// Index of the vertical state (0 = lowest bonding, 1 = lowest
    /// antibonding, ...).
    pub vertical: usize,
    pub orbital: Orbital,
}

impl Label {
    pub const BONDING_S: Label = Label {
        vertical: 0,
        orbital: Orbital::S,
    };
    pub const ANTIBONDING_S: Label = Label {
        vertical: 1,
        orbital: Orbital::S,
    };
    pub const BONDING_PY: Label = Label {
        vertical: 0,
        orbital: Orbital::PY,
    };
    pub const ANTIBONDING_PY: Label = Label {
        vertical: 1,
        orbital: Orbital::PY,
    };

    pub fn bonding(&self) -> Bonding {
        Bonding::of_index(self.vertical)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bonding().letter())?;
        let pair = self.vertical / 2;
        if pair > 0 {
            write!(f, "{}", pair + 1)?;
        }
        write!(f, "-{}", self.orbital)
    }
}

/// Product basis, ordered v-major, then n_x, then n_y.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductBasis {
    states: Vec<Label>,
    energies: Vec<f64>,
}

impl ProductBasis {
    pub fn new(vertical: &VerticalBasis, lateral: &LateralBasis) -> Self {
        let mut states = Vec::with_capacity(vertical.len() * lateral.len());
        let mut energies = Vec::with_capacity(states.capacity());
        for (v, &ev) in vertical.energies.iter().enumerate() {
            for l in lateral.states() {
                states.push(Label {
                    vertical: v,
                    orbital: l.orbital,
                });
                energies.push(ev + l.energy);
            }
        }
        ProductBasis { states, energies }
    }

    pub fn states(&self) -> &[Label] {
        &self.states
    }

    /// E_v + E_lateral at the field the lateral basis was built for.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, label: Label) -> Option<usize> {
        self.states.iter().position(|&s| s == label)
    }
}

/// Assembled single-particle Hamiltonian at one field value.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub basis: ProductBasis,
    pub matrix: DMatrix<Complex64>,
    pub field: Field,
}

/// diag(E₀) + H_yz in meV.
pub fn assemble(
    vertical: &VerticalBasis,
    lateral: &LateralBasis,
    species: &Species,
    field: Field,
) -> Result<Hamiltonian> {
    if lateral.field() != field {
        return Err(Error::BasisMismatch {
            basis_tesla: lateral.field().tesla(),
            field_tesla: field.tesla(),
        });
    }
    let basis = ProductBasis::new(vertical, lateral);
    let n = basis.len();
    let strength = species.hyz_sign() * species.cyclotron_energy(field);
    let states = basis.states();
    let matrix = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            return Complex64::new(basis.energies()[i], 0.0);
        }
        let (a, b) = (states[i], states[j]);
        if a.orbital.nx != b.orbital.nx {
            return Complex64::new(0.0, 0.0);
        }
        let y = lateral.y_element(a.orbital.ny, b.orbital.ny);
        let dz = vertical.dz.get(a.vertical, b.vertical);
        Complex64::new(0.0, strength * y * dz)
    });
    Ok(Hamiltonian { basis, matrix, field })
}

/// max |H − H†|.
pub fn hermiticity_defect(h: &DMatrix<Complex64>) -> f64 {
    let n = h.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

fn max_abs(h: &DMatrix<Complex64>) -> f64 {
    h.iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues ascending and
/// eigenvectors as the columns of the returned matrix.
pub fn diagonalize(h: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let scale = max_abs(h);
    let defect = hermiticity_defect(h);
    if defect > 1e-10 * scale {
        return Err(Error::NotHermitian { deviation: defect });
    }
    let n = h.nrows();
    if n == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, k| eig.eigenvectors[(i, order[k])]);
    Ok((values, vectors))
}

/// Eigenlevels of the full problem at one field, with labels.
#[derive(Debug, Clone)]
pub struct MolecularSpectrum {
    pub field: Field,
    pub basis: ProductBasis,
    pub energies: Vec<f64>,
    /// Column k is the eigenvector of `energies[k]` over `basis`.
    pub vectors: DMatrix<Complex64>,
    pub labels: Vec<Label>,
}

impl MolecularSpectrum {
    fn from_eigen(field: Field, basis: ProductBasis, energies: Vec<f64>, vectors: DMatrix<Complex64>) -> Self {
        let mut spectrum = MolecularSpectrum {
            field,
            basis,
            energies,
            vectors,
            labels: Vec::new(),
        };
        spectrum.labels = (0..spectrum.len()).map(|k| spectrum.dominant(k)).collect();
        spectrum
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Basis state with the largest weight in level `k`.
    pub fn dominant(&self, k: usize) -> Label {
        let col = self.vectors.column(k);
        let best = (0..col.len())
            .max_by(|&a, &b| col[a].norm_sqr().total_cmp(&col[b].norm_sqr()))
            .expect("empty eigenvector");
        self.basis.states()[best]
    }

    /// |⟨basis state|level k⟩|².
    pub fn weight(&self, k: usize, state: Label) -> f64 {
        self.basis
            .index_of(state)
            .map_or(0.0, |i| self.vectors[(i, k)].norm_sqr())
    }

    pub fn index_of(&self, label: Label) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// Energy of the level carrying `label`.
    pub fn energy_of(&self, label: Label) -> Result<f64> {
        self.index_of(label)
            .map(|k| self.energies[k])
            .ok_or_else(|| Error::MissingLabel(label.to_string()))
    }

    /// max |U†U − I|.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.len();
        let gram = self.vectors.adjoint() * &self.vectors;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// max_k ‖H x_k − λ_k x_k‖.
    pub fn residual(&self, h: &DMatrix<Complex64>) -> f64 {
        (0..self.len())
            .map(|k| {
                let x = self.vectors.column(k);
                let r = h * x - x * Complex64::new(self.energies[k], 0.0);
                r.norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Diagonalise a full Hamiltonian without using its block structure.
/// Labels are the dominant basis components.
pub fn diagonalize_full(h: &Hamiltonian) -> Result<MolecularSpectrum> {
    let (energies, vectors) = diagonalize(&h.matrix)?;
    Ok(MolecularSpectrum::from_eigen(
        h.field,
        h.basis.clone(),
        energies,
        vectors,
    ))
}

/// Re-label `current` by maximum overlap with `reference`, assigning pairs
/// one-to-one in order of decreasing overlap.
pub fn label_states(current: &MolecularSpectrum, reference: &MolecularSpectrum) -> Result<Vec<Label>> {
    assert_eq!(current.basis.states(), reference.basis.states(), "basis mismatch");
    let n = current.len();
    let overlaps = reference.vectors.adjoint() * &current.vectors;
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let o = overlaps[(j, i)].norm();
            if o > 1e-3 {
                pairs.push((o, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut labels: Vec<Option<Label>> = vec![None; n];
    let mut used = vec![false; n];
    let mut worst = f64::INFINITY;
    for (o, i, j) in pairs {
        if labels[i].is_none() && !used[j] {
            labels[i] = Some(reference.labels[j]);
            used[j] = true;
            worst = worst.min(o);
        }
    }
    if labels.iter().any(Option::is_none) {
        worst = 0.0;
    }
    if worst <= OVERLAP_THRESHOLD {
        return Err(Error::AmbiguousContinuation {
            field_tesla: current.field.tesla(),
            overlap: worst,
        });
    }
    Ok(labels.into_iter().map(|l| l.expect("assigned")).collect())
}

/// Single-carrier solver for a fixed geometry: the vertical problem is
/// solved once and reused at every field.
#[derive(Debug, Clone)]
pub struct MoleculeSolver {
    species: Species,
    vertical: VerticalBasis,
    lateral_quanta: usize,
    field_step: f64,
}

impl MoleculeSolver {
    pub fn new(species: Species, well: &DoubleWellSpec, settings: &SolverSettings) -> Result<Self> {
        settings.validate()?;
        let spectrum = solve_double_well(well, &species, settings)?;
        let vertical = VerticalBasis::from_spectrum(&spectrum, settings.max_vertical_states);
        Ok(Self::from_parts(species, vertical, settings))
    }

    pub fn from_parts(species: Species, vertical: VerticalBasis, settings: &SolverSettings) -> Self {
        MoleculeSolver {
            species,
            vertical,
            lateral_quanta: settings.lateral_quanta,
            field_step: settings.field_step,
        }
    }

    pub fn species(&self) -> &Species {
        &self.species
    }

    pub fn vertical(&self) -> &VerticalBasis {
        &self.vertical
    }

    pub fn lateral_basis(&self, field: Field) -> LateralBasis {
        build_basis(&self.species, field, self.lateral_quanta)
    }

    pub fn hamiltonian(&self, field: Field) -> Hamiltonian {
        let lateral = self.lateral_basis(field);
        assemble(&self.vertical, &lateral, &self.species, field).expect("basis built at the same field")
    }

    /// Spectrum at one field, solved block by block in n_x. Labels are the
    /// dominant basis components, exact at B = 0.
    pub fn spectrum(&self, field: Field) -> Result<MolecularSpectrum> {
        let h = self.hamiltonian(field);
        let n = h.basis.len();
        let mut levels: Vec<(f64, Vec<(usize, Complex64)>)> = Vec::with_capacity(n);
        for nx in 0..=self.lateral_quanta {
            let idx: Vec<usize> = (0..n).filter(|&i| h.basis.states()[i].orbital.nx == nx).collect();
            let block = DMatrix::from_fn(idx.len(), idx.len(), |a, b| h.matrix[(idx[a], idx[b])]);
            let (values, vectors) = diagonalize(&block)?;
            for (k, value) in values.into_iter().enumerate() {
                let column = idx.iter().enumerate().map(|(a, &i)| (i, vectors[(a, k)])).collect();
                levels.push((value, column));
            }
        }
        levels.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut vectors = DMatrix::zeros(n, n);
        for (k, (_, column)) in levels.iter().enumerate() {
            for &(i, c) in column {
                vectors[(i, k)] = c;
            }
        }
        let energies = levels.into_iter().map(|l| l.0).collect();
        Ok(MolecularSpectrum::from_eigen(field, h.basis, energies, vectors))
    }

    /// Spectra at ascending `fields`, labelled by adiabatic continuation
    /// from B = 0 in increments no larger than the configured field step.
    /// The increment is halved whenever a continuation is ambiguous.
    pub fn sweep(&self, fields: &[Field]) -> Result<Vec<MolecularSpectrum>> {
        for w in fields.windows(2) {
            if w[1] < w[0] {
                return Err(Error::InvalidParameter {
                    name: "B",
                    value: w[1].tesla(),
                    reason: "field values must be ascending",
                });
            }
        }
        let mut previous = self.spectrum(Field::ZERO)?;
        let mut at = 0.0f64;
        let mut out = Vec::with_capacity(fields.len());
        for &target in fields {
            let goal = target.tesla();
            while at < goal {
                let mut step = self.field_step.min(goal - at);
                loop {
                    let b = if at + step >= goal { goal } else { at + step };
                    let mut next = self.spectrum(Field::new(b)?)?;
                    match label_states(&next, &previous) {
                        Ok(labels) => {
                            next.labels = labels;
                            previous = next;
                            at = b;
                            break;
                        }
                        Err(Error::AmbiguousContinuation { .. }) if step > MIN_FIELD_STEP => {
                            step *= 0.5;
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
            out.push(previous.clone());
        }
        Ok(out)
    }

    /// Shift of the unperturbed level `label` between B = 0 and `field` to
    /// second order in H_yz: the exact diamagnetic change of the diagonal
    /// minus Σ_k |⟨label|H_yz|k⟩|² / (E_k − E_label).
    pub fn perturbative_shift(&self, label: Label, field: Field) -> Result<f64> {
        let h = self.hamiltonian(field);
        let h0 = self.hamiltonian(Field::ZERO);
        let i = h
            .basis
            .index_of(label)
            .ok_or_else(|| Error::MissingLabel(label.to_string()))?;
        let e = h.matrix[(i, i)].re;
        let mut shift = e - h0.matrix[(i, i)].re;
        for j in 0..h.basis.len() {
            let c = h.matrix[(i, j)].norm_sqr();
            if j != i && c > 0.0 {
                shift -= c / (h.matrix[(j, j)].re - e);
            }
        }
        Ok(shift)
    }

    /// Labelled spectrum at a single field, continued from B = 0.
    pub fn spectrum_continued(&self, field: Field) -> Result<MolecularSpectrum> {
        Ok(self.sweep(&[field])?.pop().expect("one field requested"))
    }
}
