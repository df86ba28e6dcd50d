//! Lowest eigenpairs of a real symmetric tridiagonal matrix.
//!
//! Eigenvalues are located by bisection on the Sturm sequence count, then
//! eigenvectors are recovered by inverse iteration with a partially pivoted
//! tridiagonal LU factorisation.

/// Symmetric tridiagonal matrix stored as its diagonal and first
/// off-diagonal.
#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    /// `off.len()` must be `diag.len() - 1`.
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty(), "empty tridiagonal matrix");
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal length mismatch");
        SymTridiagonal { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Max-row-sum norm.
    pub fn norm_inf(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Number of eigenvalues below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        // Zero pivots are nudged to -tiny, which counts an eigenvalue sitting
        // exactly at `x`; bisection does not care which side it lands on.
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.len() {
            let coupling = if i > 0 {
                self.off[i - 1] * self.off[i - 1] / q
            } else {
                0.0
            };
            q = self.diag[i] - x - coupling;
            if q.abs() < tiny {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based), by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.len());
        let (mut lo, mut hi) = self.gershgorin();
        let scale = self.norm_inf().max(f64::MIN_POSITIVE);
        let tol = 4.0 * f64::EPSILON * scale;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// The `count` lowest eigenpairs, ascending. Eigenvectors have unit
    /// Euclidean norm and are mutually orthogonal.
    pub fn lowest(&self, count: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        let count = count.min(self.len());
        let values: Vec<f64> = (0..count).map(|k| self.eigenvalue(k)).collect();
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(count);
        for &lambda in &values {
            let v = self.inverse_iteration(lambda, &vectors);
            vectors.push(v);
        }
        (values, vectors)
    }

    fn inverse_iteration(&self, lambda: f64, previous: &[Vec<f64>]) -> Vec<f64> {
        let n = self.len();
        let lu = ShiftedLu::factor(self, lambda);
        // Deterministic start vector with no special symmetry.
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_7).fract())
            .collect();
        normalize(&mut x);
        for _ in 0..4 {
            let mut y = lu.solve(&x);
            for p in previous {
                let d = dot(p, &y);
                y.iter_mut().zip(p).for_each(|(yi, pi)| *yi -= d * pi);
            }
            normalize(&mut y);
            x = y;
        }
        x
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) {
    let norm = dot(x, x).sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

/// LU factorisation of `T - λI` with partial pivoting (LAPACK `dgttrf`
/// layout: U has two super-diagonals after row swaps).
struct ShiftedLu {
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    dl: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(t: &SymTridiagonal, lambda: f64) -> Self {
        let n = t.len();
        let mut d: Vec<f64> = t.diag.iter().map(|v| v - lambda).collect();
        let mut du = t.off.clone();
        let mut dl = t.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let guard = f64::EPSILON * t.norm_inf().max(f64::MIN_POSITIVE);

        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i].abs() < guard {
                    d[i] = guard;
                }
                let factor = dl[i] / d[i];
                dl[i] = factor;
                d[i + 1] -= factor * du[i];
            } else {
                let factor = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = factor;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - factor * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -factor;
                }
                swapped[i] = true;
            }
        }
        if d[n - 1].abs() < guard {
            d[n - 1] = guard;
        }
        ShiftedLu {
            d,
            du,
            du2,
            dl,
            swapped,
        }
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut b = rhs.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.dl[i] * b[i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= self.du[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= self.du2[i] * x[i + 2];
            }
            x[i] = s / self.d[i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn dense(t: &SymTridiagonal) -> DMatrix<f64> {
        let n = t.len();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                t.diag[i]
            } else if i + 1 == j {
                t.off[i]
            } else if j + 1 == i {
                t.off[j]
            } else {
                0.0
            }
        })
    }

    #[test]
    fn matches_dense_solver_on_a_random_matrix() {
        let n = 40;
        let diag: Vec<f64> = (0..n).map(|i| ((i * 37 % 11) as f64) - 5.0).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| 0.3 + ((i * 13 % 7) as f64) * 0.2).collect();
        let t = SymTridiagonal::new(diag, off);
        let mut reference: Vec<f64> = dense(&t).symmetric_eigen().eigenvalues.iter().copied().collect();
        reference.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let (values, vectors) = t.lowest(6);
        for k in 0..6 {
            assert!((values[k] - reference[k]).abs() < 1e-10, "{k}");
            let hv = t.mul_vec(&vectors[k]);
            let resid: f64 = hv
                .iter()
                .zip(&vectors[k])
                .map(|(a, b)| (a - values[k] * b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(resid < 1e-10 * t.norm_inf());
            for j in 0..k {
                assert!(dot(&vectors[j], &vectors[k]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn near_degenerate_pair_stays_orthogonal() {
        // Two weakly coupled identical blocks.
        let mut diag = vec![2.0; 20];
        diag[10] = 2.0;
        let mut off = vec![-1.0; 19];
        off[9] = -1e-9;
        let t = SymTridiagonal::new(diag, off);
        let (values, vectors) = t.lowest(2);
        assert!(values[1] - values[0] < 1e-8);
        assert!(dot(&vectors[0], &vectors[1]).abs() < 1e-8);
    }

    #[test]
    fn sturm_count_brackets_eigenvalues() {
        let t = SymTridiagonal::new(vec![2.0; 5], vec![-1.0; 4]);
        // Eigenvalues 2 - 2cos(kπ/6).
        for k in 1..=5 {
            let exact = 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / 6.0).cos();
            assert_eq!(t.count_below(exact - 1e-9), k - 1);
            assert!(t.count_below(exact) >= k - 1 && t.count_below(exact) <= k);
            assert_eq!(t.count_below(exact + 1e-9), k);
            assert!((t.eigenvalue(k - 1) - exact).abs() < 1e-13);
        }
    }
}
