//! Dense complex linear algebra used by every other module: a validated
//! Hermitian matrix type, a cyclic Jacobi eigensolver, nullspace counting and
//! plane rotations.
//!
//! The eigensolver works on full complex Hermitian matrices. Each rotation
//! first removes the phase of the pivot entry and then applies a real Jacobi
//! rotation, so real symmetric input stays real throughout.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix.
pub type CMatrix = DMatrix<Complex64>;

/// Absolute tolerance for the Hermitian check on user-supplied matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Default relative tolerance for rank and nullspace decisions.
pub const RANK_TOL: f64 = 1e-8;

const MAX_SWEEPS: usize = 64;
const OFF_DIAGONAL_TOL: f64 = 1e-12;
/// Entries below this fraction of the per-entry share of the threshold are
/// not rotated away.
const SKIP_TOL: f64 = 0.1;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Accepts `m` if it is square and Hermitian within [`HERMITIAN_TOL`].
    /// The stored matrix is the exact Hermitian part of `m`.
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerance(m, HERMITIAN_TOL)
    }

    /// Accepts matrices produced by arithmetic, where rounding scales with the
    /// size of the entries.
    pub(crate) fn from_computed(m: CMatrix) -> Result<Self> {
        let scale = max_abs(&m).max(1.0);
        Self::with_tolerance(m, 1e-9 * scale)
    }

    fn with_tolerance(m: CMatrix, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Validation(format!(
                "matrix is {}x{}, not square",
                m.nrows(),
                m.ncols()
            )));
        }
        let dev = hermitian_defect(&m);
        if !(dev <= tol) {
            return Err(Error::Validation(format!(
                "matrix deviates from Hermitian by {dev:e}"
            )));
        }
        Ok(HermitianMatrix(hermitian_part(&m)))
    }

    pub fn from_real(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        Self::new(CMatrix::from_fn(n, n, |i, j| {
            Complex64::new(entries[i * n + j], 0.0)
        }))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        HermitianMatrix(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                ZERO
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// stored as columns.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenSystem {
    /// Largest eigenvalue modulus, i.e. the operator norm.
    pub fn norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `f(A) = V f(Λ) V*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.vectors.nrows();
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let fk = f(lambda);
            for i in 0..n {
                scaled[(i, k)] *= fk;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    /// Eigenvectors whose eigenvalue satisfies `keep`, as columns.
    pub fn vectors_where(&self, keep: impl Fn(f64) -> bool) -> CMatrix {
        let cols: Vec<usize> = (0..self.values.len())
            .filter(|&k| keep(self.values[k]))
            .collect();
        CMatrix::from_fn(self.vectors.nrows(), cols.len(), |i, j| {
            self.vectors[(i, cols[j])]
        })
    }

    pub fn count_where(&self, keep: impl Fn(f64) -> bool) -> usize {
        self.values.iter().filter(|&&v| keep(v)).count()
    }

    /// Default nullspace tolerance: [`RANK_TOL`] relative to `max(1, ‖A‖)`.
    pub fn rank_tol(&self) -> f64 {
        RANK_TOL * self.norm().max(1.0)
    }
}

/// Columns `p < q` of a column-major `n x n` buffer become
/// `(x c - y sa, x s + y sb)`.
#[allow(clippy::too_many_arguments)]
fn rotate_columns(
    buf: &mut [Complex64],
    n: usize,
    p: usize,
    q: usize,
    c: f64,
    s: f64,
    sa: Complex64,
    sb: Complex64,
) {
    let (left, right) = buf.split_at_mut(q * n);
    let xs = &mut left[p * n..(p + 1) * n];
    let ys = &mut right[..n];
    for (x, y) in xs.iter_mut().zip(ys.iter_mut()) {
        let (x0, y0) = (*x, *y);
        *x = x0 * c - y0 * sa;
        *y = x0 * s + y0 * sb;
    }
}

/// Full spectral decomposition by cyclic Jacobi rotations.
pub fn hermitian_eigen(a: &HermitianMatrix) -> EigenSystem {
    let n = a.dim();
    let mut m: Vec<Complex64> = a.matrix().as_slice().to_vec();
    let mut v: Vec<Complex64> = CMatrix::identity(n, n).as_slice().to_vec();
    // column-major: (i, j) -> i + j * n
    let idx = |i: usize, j: usize| i + j * n;

    let scale = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1.0);
    let threshold = OFF_DIAGONAL_TOL * scale;

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for j in 0..n {
            for i in 0..n {
                if i != j {
                    off += m[idx(i, j)].norm_sqr();
                }
            }
        }
        if off.sqrt() <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[idx(p, q)];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE || r <= SKIP_TOL * threshold / n as f64 {
                    continue;
                }
                let phase = apq / r;
                let app = m[idx(p, p)].re;
                let aqq = m[idx(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let cph = phase.conj();

                // A <- A G with G = diag(1, e^{-i phi}) R on the (p, q) plane
                let (sa, sb) = (cph * s, cph * c);
                rotate_columns(&mut m, n, p, q, c, s, sa, sb);
                // A <- G* A leaves rows other than p, q alone, so the new
                // rows p, q are the conjugates of the new columns.
                for k in 0..n {
                    if k != p && k != q {
                        m[idx(p, k)] = m[idx(k, p)].conj();
                        m[idx(q, k)] = m[idx(k, q)].conj();
                    }
                }
                rotate_columns(&mut v, n, p, q, c, s, sa, sb);
                m[idx(p, q)] = ZERO;
                m[idx(q, p)] = ZERO;
                m[idx(p, p)] = Complex64::new(app - t * r, 0.0);
                m[idx(q, q)] = Complex64::new(aqq + t * r, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[idx(x, x)].re.total_cmp(&m[idx(y, y)].re));
    let values = order.iter().map(|&k| m[idx(k, k)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[idx(i, order[j])]);
    EigenSystem { values, vectors }
}

/// Number of eigenvalues with `|λ| <= tol`.
pub fn nullspace_dim(a: &HermitianMatrix, tol: f64) -> Result<usize> {
    if !(tol >= 0.0) {
        return Err(Error::Validation(format!("tolerance {tol} is negative")));
    }
    Ok(hermitian_eigen(a).count_where(|v| v.abs() <= tol))
}

/// Plane rotation by `theta` in coordinates `(i, j)` of an `n`-dimensional
/// space: `G[i][i] = G[j][j] = cos θ`, `G[i][j] = sin θ`, `G[j][i] = -sin θ`.
pub fn givens_rotation(i: usize, j: usize, theta: f64, n: usize) -> Result<CMatrix> {
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, dim: n });
    }
    if i >= j {
        return Err(Error::Validation(format!(
            "rotation plane ({i}, {j}) needs i < j"
        )));
    }
    let (s, c) = theta.sin_cos();
    let mut g = CMatrix::identity(n, n);
    g[(i, i)] = Complex64::new(c, 0.0);
    g[(j, j)] = Complex64::new(c, 0.0);
    g[(i, j)] = Complex64::new(s, 0.0);
    g[(j, i)] = Complex64::new(-s, 0.0);
    Ok(g)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Operator norm via the largest eigenvalue of `m* m`.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let gram = if m.nrows() < m.ncols() {
        m * m.adjoint()
    } else {
        m.adjoint() * m
    };
    let h = HermitianMatrix(hermitian_part(&gram));
    hermitian_eigen(&h).norm().sqrt()
}

pub fn hermitian_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub(crate) fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Orthonormal basis (columns) of the range of an orthogonal projection.
pub fn projection_range(p: &CMatrix) -> Result<CMatrix> {
    let h = HermitianMatrix::from_computed(p.clone())?;
    Ok(hermitian_eigen(&h).vectors_where(|v| v > 0.5))
}

pub(crate) fn real_diag(m: &CMatrix) -> Vec<f64> {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)].re).collect()
}

pub(crate) fn trace(m: &CMatrix) -> Complex64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn reconstruction_error(a: &HermitianMatrix, es: &EigenSystem) -> f64 {
        frobenius(&(es.apply(|x| x) - a.matrix()))
    }

    #[test]
    fn identity_spectrum() {
        let es = hermitian_eigen(&HermitianMatrix::diagonal(&[1.0, 1.0, 1.0]));
        assert_eq!(es.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn swap_matrix_spectrum() {
        let a = HermitianMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let es = hermitian_eigen(&a);
        assert!((es.values[0] + 1.0).abs() < 1e-14);
        assert!((es.values[1] - 1.0).abs() < 1e-14);
        // eigenvector for -1 is (1, -1)/√2 up to phase
        let v = es.vectors.column(0);
        assert!((v[0].norm() - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((v[0] + v[1]).norm() < 1e-12);
        assert!(reconstruction_error(&a, &es) < 1e-12);
    }

    #[test]
    fn difference_of_rank_one_projections() {
        // p = [[1/2, 1/2], [1/2, 1/2]], q = diag(1, 0):
        // p - q = [[-1/2, 1/2], [1/2, 1/2]], characteristic polynomial λ² - 1/2.
        let a = HermitianMatrix::from_real(2, &[-0.5, 0.5, 0.5, 0.5]).unwrap();
        let es = hermitian_eigen(&a);
        assert!((es.values[0] + FRAC_1_SQRT_2).abs() < 1e-14);
        assert!((es.values[1] - FRAC_1_SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn complex_hermitian_reconstructs() {
        let mut m = CMatrix::zeros(3, 3);
        m[(0, 0)] = c(2.0);
        m[(1, 1)] = c(-1.0);
        m[(2, 2)] = c(0.5);
        m[(0, 1)] = Complex64::new(0.3, 0.7);
        m[(1, 0)] = Complex64::new(0.3, -0.7);
        m[(1, 2)] = Complex64::new(0.0, -1.2);
        m[(2, 1)] = Complex64::new(0.0, 1.2);
        let a = HermitianMatrix::new(m).unwrap();
        let es = hermitian_eigen(&a);
        assert!(reconstruction_error(&a, &es) < 1e-12);
        let gram = es.vectors.adjoint() * &es.vectors;
        assert!(frobenius(&(gram - CMatrix::identity(3, 3))) < 1e-12);
        assert!(es.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_fn(2, 2, |i, j| if i < j { c(1.0) } else { ZERO });
        assert!(matches!(HermitianMatrix::new(m), Err(Error::Validation(_))));
        assert!(HermitianMatrix::new(CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn nullspace_counts() {
        let zero = HermitianMatrix::diagonal(&[0.0; 4]);
        assert_eq!(nullspace_dim(&zero, 1e-8).unwrap(), 4);
        let id = HermitianMatrix::diagonal(&[1.0; 4]);
        assert_eq!(nullspace_dim(&id, 1e-8).unwrap(), 0);
        let tiny = HermitianMatrix::diagonal(&[1e-12, 1.0]);
        assert_eq!(nullspace_dim(&tiny, 1e-8).unwrap(), 1);
        assert!(nullspace_dim(&tiny, -1.0).is_err());
    }

    #[test]
    fn givens_cases() {
        assert_eq!(givens_rotation(0, 2, 0.0, 3).unwrap(), CMatrix::identity(3, 3));
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), ZERO]));

        let g = givens_rotation(0, 1, FRAC_PI_2, 2).unwrap();
        let swapped = &g * &d * g.adjoint();
        assert!((swapped[(0, 0)].re).abs() < 1e-15);
        assert!((swapped[(1, 1)].re - 1.0).abs() < 1e-15);

        let g = givens_rotation(0, 1, FRAC_PI_4, 2).unwrap();
        let half = &g * &d * g.adjoint();
        let expected = [[0.5, -0.5], [-0.5, 0.5]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((half[(i, j)] - c(expected[i][j])).norm() < 1e-15);
            }
        }

        assert!(matches!(
            givens_rotation(0, 3, 0.1, 3),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(givens_rotation(1, 1, 0.1, 3).is_err());
    }

    #[test]
    fn operator_norm_of_rectangular() {
        let m = CMatrix::from_fn(2, 3, |i, j| if i == 0 && j == 2 { c(3.0) } else { ZERO });
        assert!((operator_norm(&m) - 3.0).abs() < 1e-12);
    }
}
