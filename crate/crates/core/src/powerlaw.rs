//! Phenomenological detuning law ΔE_S(L) = A / (L + δ)³ + C.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 200;
const STEP_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawParams {
    /// A, meV·nm³.
    pub amplitude: f64,
    /// δ, nm.
    pub offset_length: f64,
    /// C, meV.
    pub offset_energy: f64,
}

impl PowerLawParams {
    /// A = 33.0×10³ meV·nm³, δ = 4.88 nm, C = 27.0 meV.
    pub const REFERENCE: PowerLawParams = PowerLawParams {
        amplitude: 33.0e3,
        offset_length: 4.88,
        offset_energy: 27.0,
    };

    fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.amplitude, self.offset_length, self.offset_energy)
    }

    fn from_vector(v: &Vector3<f64>) -> Self {
        PowerLawParams {
            amplitude: v[0],
            offset_length: v[1],
            offset_energy: v[2],
        }
    }

    pub fn eval(&self, length: f64) -> Result<f64> {
        let shifted = length + self.offset_length;
        if !(shifted > 0.0) {
            return Err(Error::Pole {
                length_nm: length,
                offset_nm: self.offset_length,
            });
        }
        Ok(self.amplitude / shifted.powi(3) + self.offset_energy)
    }
}

/// A / (L + δ)³ + C.
pub fn eval_powerlaw(params: &PowerLawParams, length: f64) -> Result<f64> {
    params.eval(length)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawFit {
    pub params: PowerLawParams,
    /// Model minus data at each input point, meV.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

impl PowerLawFit {
    pub fn rms(&self) -> f64 {
        let n = self.residuals.len() as f64;
        (self.residuals.iter().map(|r| r * r).sum::<f64>() / n).sqrt()
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

fn residuals(p: &Vector3<f64>, points: &[(f64, f64)]) -> Option<Vec<f64>> {
    points
        .iter()
        .map(|&(l, y)| {
            let s = l + p[1];
            (s > 0.0).then(|| p[0] / s.powi(3) + p[2] - y)
        })
        .collect()
}

fn cost(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

fn normal_equations(p: &Vector3<f64>, points: &[(f64, f64)], r: &[f64]) -> (Matrix3<f64>, Vector3<f64>) {
    let mut jtj = Matrix3::zeros();
    let mut jtr = Vector3::zeros();
    for (&(l, _), &ri) in points.iter().zip(r) {
        let s = l + p[1];
        let row = Vector3::new(1.0 / s.powi(3), -3.0 * p[0] / s.powi(4), 1.0);
        jtj += row * row.transpose();
        jtr += row * ri;
    }
    (jtj, jtr)
}

/// Smallest eigenvalue of the correlation form of JᵀJ; zero when the
/// columns are linearly dependent.
fn conditioning(jtj: &Matrix3<f64>) -> f64 {
    let d = Vector3::new(jtj[(0, 0)], jtj[(1, 1)], jtj[(2, 2)]);
    if d.iter().any(|&x| !(x > 0.0)) {
        return 0.0;
    }
    let scaled = Matrix3::from_fn(|i, j| jtj[(i, j)] / (d[i] * d[j]).sqrt());
    scaled.symmetric_eigenvalues().min()
}

/// Least-squares fit of (A, δ, C) by Levenberg–Marquardt.
///
/// Starts from δ₀ = `offset_guess`, C₀ = min ΔE_S and A₀ through the
/// smallest-L point. With exactly three points the fit is an exact solve.
pub fn fit_powerlaw(points: &[(f64, f64)], offset_guess: f64) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::SingularFit("need at least three points"));
    }
    if points.iter().any(|&(l, y)| !(l.is_finite() && y.is_finite())) {
        return Err(Error::SingularFit("non-finite input"));
    }
    let mut ls: Vec<f64> = points.iter().map(|p| p.0).collect();
    ls.sort_by(f64::total_cmp);
    ls.dedup();
    if ls.len() < 3 {
        return Err(Error::SingularFit("need at least three distinct L values"));
    }

    let nearest = points.iter().min_by(|a, b| a.0.total_cmp(&b.0)).expect("non-empty");
    let c0 = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let d0 = offset_guess.max(1e-3 - ls[0]);
    let a0 = (nearest.1 - c0) * (nearest.0 + d0).powi(3);
    let mut p = Vector3::new(a0, d0, c0);
    let mut r = residuals(&p, points).ok_or(Error::SingularFit("initial guess hits a pole"))?;
    let mut current = cost(&r);
    let scale = points.iter().map(|q| q.1 * q.1).sum::<f64>().max(f64::MIN_POSITIVE);
    let mut lambda = 1e-3;

    for iteration in 1..=MAX_ITERATIONS {
        let (jtj, jtr) = normal_equations(&p, points, &r);
        if conditioning(&jtj) < 1e-14 {
            return Err(Error::SingularFit("columns of the Jacobian are degenerate"));
        }
        let mut accepted = None;
        for _ in 0..60 {
            let mut damped = jtj;
            for k in 0..3 {
                damped[(k, k)] *= 1.0 + lambda;
            }
            let Some(step) = damped.cholesky().map(|c| c.solve(&(-jtr))) else {
                lambda *= 10.0;
                continue;
            };
            let trial = p + step;
            match residuals(&trial, points) {
                Some(rt) if cost(&rt) <= current => {
                    accepted = Some((trial, rt, step));
                    break;
                }
                _ => lambda *= 4.0,
            }
        }
        let Some((trial, rt, step)) = accepted else {
            // No downhill step left: converged as far as arithmetic allows.
            return finish(p, r, iteration, current, scale);
        };
        lambda = (lambda / 5.0).max(1e-15);
        p = trial;
        r = rt;
        current = cost(&r);
        let small_step = step
            .iter()
            .zip(p.iter())
            .all(|(s, v)| s.abs() <= STEP_TOLERANCE * (1.0 + v.abs()));
        if small_step || current <= 1e-30 * scale {
            return finish(p, r, iteration, current, scale);
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        residual: current.sqrt(),
    })
}

fn finish(p: Vector3<f64>, r: Vec<f64>, iterations: usize, current: f64, scale: f64) -> Result<PowerLawFit> {
    if !current.is_finite() || current > scale {
        return Err(Error::NoConvergence {
            iterations,
            residual: current.sqrt(),
        });
    }
    Ok(PowerLawFit {
        params: PowerLawParams::from_vector(&p),
        residuals: r,
        iterations,
    })
}

impl From<PowerLawParams> for Vector3<f64> {
    fn from(p: PowerLawParams) -> Self {
        p.to_vector()
    }
}
