//! Hermitian spectral decomposition by cyclic Jacobi rotations, and the
//! matrix functions built on it.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, ONE, ZERO};
use crate::error::{Error, Result};

/// Relative hermiticity tolerance accepted on input.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// A matrix validated to be hermitian (and symmetrized on construction).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl TryFrom<ComplexMatrix> for HermitianOperator {
    type Error = Error;
    fn try_from(m: ComplexMatrix) -> Result<Self> {
        Self::new(m)
    }
}

impl From<HermitianOperator> for ComplexMatrix {
    fn from(h: HermitianOperator) -> Self {
        h.matrix
    }
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::shape("square matrix", format!("{:?}", matrix.shape())));
        }
        let residual = matrix.hermitian_residual();
        if residual > HERMITIAN_TOL * matrix.max_abs().max(1.0) {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self { matrix: matrix.hermitian_part() })
    }

    /// Wraps the hermitian part of `m` without checking.
    pub fn from_hermitian_part(m: &ComplexMatrix) -> Self {
        Self { matrix: m.hermitian_part() }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eig(&self) -> Eigen {
        jacobi_eigen(&self.matrix)
    }
}

/// Eigen-decomposition `A = V diag(values) V^*`, values ascending.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns.
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `V f(Λ) V^*`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let mut scaled = self.vectors.clone();
        for i in 0..n {
            for j in 0..n {
                scaled[(i, j)] *= fv[j];
            }
        }
        scaled.mul_adjoint(&self.vectors)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }
}

/// Eigen-decomposition of a hermitian matrix; rejects non-hermitian input.
pub fn herm_eig(a: &ComplexMatrix) -> Result<Eigen> {
    Ok(HermitianOperator::new(a.clone())?.eig())
}

/// Cyclic Jacobi on the hermitian part of `a`.
pub fn jacobi_eigen(a: &ComplexMatrix) -> Eigen {
    let n = a.rows();
    assert!(a.is_square(), "jacobi_eigen: matrix not square");
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    if n == 0 {
        return Eigen { values: vec![], vectors: v };
    }
    let scale = m.fro_norm().max(f64::MIN_POSITIVE);
    const MAX_SWEEPS: usize = 100;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 || mag <= 1e-17 * scale {
                    m[(p, q)] = ZERO;
                    m[(q, p)] = ZERO;
                    continue;
                }
                let phase = apq / mag;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                // J restricted to (p, q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]].
                let jpp = C64::new(cs, 0.0);
                let jpq = C64::new(sn, 0.0);
                let jqp = -phase.conj() * sn;
                let jqq = phase.conj() * cs;
                // m <- m J (columns p, q)
                for i in 0..n {
                    let mip = m[(i, p)];
                    let miq = m[(i, q)];
                    m[(i, p)] = mip * jpp + miq * jqp;
                    m[(i, q)] = mip * jpq + miq * jqq;
                }
                // m <- J^* m (rows p, q)
                for j in 0..n {
                    let mpj = m[(p, j)];
                    let mqj = m[(q, j)];
                    m[(p, j)] = jpp.conj() * mpj + jqp.conj() * mqj;
                    m[(q, j)] = jpq.conj() * mpj + jqq.conj() * mqj;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * jpp + viq * jqp;
                    v[(i, q)] = vip * jpq + viq * jqq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Eigen { values, vectors }
}

pub fn lambda_min(a: &ComplexMatrix) -> f64 {
    jacobi_eigen(a).min()
}

pub fn lambda_max(a: &ComplexMatrix) -> f64 {
    jacobi_eigen(a).max()
}

/// Operator norm of an arbitrary matrix (largest singular value).
pub fn op_norm(a: &ComplexMatrix) -> f64 {
    if a.rows() <= a.cols() {
        jacobi_eigen(&a.mul_adjoint(a)).max().max(0.0).sqrt()
    } else {
        jacobi_eigen(&a.adjoint_mul(a)).max().max(0.0).sqrt()
    }
}

/// Square root of the positive part of a hermitian matrix.
pub fn psd_sqrt(a: &ComplexMatrix) -> ComplexMatrix {
    jacobi_eigen(a).map(|x| x.max(0.0).sqrt())
}

/// Inverse square root of a positive definite hermitian matrix.
pub fn inv_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = jacobi_eigen(a);
    if e.min() <= 0.0 {
        return Err(Error::Invalid(format!("inv_sqrt: matrix not positive definite (λ_min = {:.3e})", e.min())));
    }
    Ok(e.map(|x| 1.0 / x.sqrt()))
}

/// Polar factor: the nearest matrix with orthonormal columns (`rows >= cols`).
pub fn polar_isometry(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let g = a.adjoint_mul(a);
    Ok(a.matmul(&inv_sqrt(&g)?))
}

/// Cholesky factor `L` with `A = L L^*` of a hermitian positive definite matrix.
pub fn cholesky(a: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = a.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d.is_nan() || d <= 0.0 {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = C64::new(djj, 0.0);
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

/// Inverse of a lower-triangular matrix.
pub fn lower_inverse(l: &ComplexMatrix) -> ComplexMatrix {
    let n = l.rows();
    let mut inv = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = ONE / l[(j, j)];
        for i in (j + 1)..n {
            let mut s = ZERO;
            for k in j..i {
                s += l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / l[(i, i)];
        }
    }
    inv
}

/// Inverse of a hermitian positive definite matrix via Cholesky.
pub fn hpd_inverse(a: &ComplexMatrix) -> Option<ComplexMatrix> {
    let l = cholesky(a)?;
    let li = lower_inverse(&l);
    Some(li.adjoint_mul(&li))
}

/// Orthogonal projection onto the range of a PSD matrix (eigenvalues above `tol`).
pub fn range_projection(a: &ComplexMatrix, tol: f64) -> (ComplexMatrix, usize) {
    let e = jacobi_eigen(a);
    let cut = tol * e.max().abs().max(1e-300);
    let rank = e.values.iter().filter(|&&x| x > cut).count();
    (e.map(|x| if x > cut { 1.0 } else { 0.0 }), rank)
}

/// Solves the real symmetric positive definite system `M x = b` in place.
/// Returns false if `M` is not numerically positive definite.
pub fn spd_solve(m: &[f64], n: usize, b: &mut [f64]) -> bool {
    let mut l = m.to_vec();
    for j in 0..n {
        let mut d = l[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if d.is_nan() || d <= 0.0 {
            return false;
        }
        let djj = d.sqrt();
        l[j * n + j] = djj;
        for i in (j + 1)..n {
            let mut s = l[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / djj;
        }
    }
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    true
}

/// Dense least-squares / general solve by Gaussian elimination with partial pivoting.
pub fn real_solve(a: &[f64], n: usize, b: &mut [f64]) -> bool {
    let mut m = a.to_vec();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs())).unwrap();
        if m[piv * n + col].abs() < 1e-300 {
            return false;
        }
        if piv != col {
            for k in 0..n {
                m.swap(piv * n + k, col * n + k);
            }
            b.swap(piv, col);
        }
        let p = m[col * n + col];
        for i in (col + 1)..n {
            let f = m[i * n + col] / p;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                m[i * n + k] -= f * m[col * n + k];
            }
            b[i] -= f * b[col];
        }
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= m[i * n + k] * b[k];
        }
        b[i] = s / m[i * n + i];
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::random_hermitian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_eigenvalues_sorted() {
        let e = herm_eig(&ComplexMatrix::diag_real(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn pauli_x() {
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let e = herm_eig(&x).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 6, 17] {
            let a = random_hermitian(n, &mut rng);
            let e = herm_eig(&a).unwrap();
            let v = &e.vectors;
            let gram = v.adjoint_mul(v);
            assert!((&gram - &ComplexMatrix::identity(n)).max_abs() < 1e-12);
            let err = (&a - &e.reconstruct()).fro_norm();
            assert!(err <= 1e-9 * a.fro_norm().max(1.0), "n={n} err={err}");
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = ComplexMatrix::unit(2, 0, 1);
        assert!(matches!(herm_eig(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn cholesky_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = random_hermitian(5, &mut rng);
        let a = &b.matmul(&b) + &ComplexMatrix::identity(5);
        let inv = hpd_inverse(&a).unwrap();
        assert!((&a.matmul(&inv) - &ComplexMatrix::identity(5)).max_abs() < 1e-10);
        let isq = inv_sqrt(&a).unwrap();
        assert!((&isq.matmul(&a).matmul(&isq) - &ComplexMatrix::identity(5)).max_abs() < 1e-10);
    }

    #[test]
    fn spd_solve_small() {
        let m = [4.0, 1.0, 1.0, 3.0];
        let mut b = [1.0, 2.0];
        assert!(spd_solve(&m, 2, &mut b));
        assert!((4.0 * b[0] + b[1] - 1.0).abs() < 1e-14);
        assert!((b[0] + 3.0 * b[1] - 2.0).abs() < 1e-14);
    }
}
