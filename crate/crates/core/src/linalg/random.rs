//! Gaussian random matrices and vectors.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::eig::polar_isometry;
use super::matrix::{normalize, ComplexMatrix};

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    C64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    ginibre(n, n, rng).hermitian_part()
}

pub fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let mut v: Vec<C64> = (0..d).map(|_| gaussian(rng)).collect();
        if normalize(&mut v) > 1e-12 {
            return v;
        }
    }
}

/// Haar-like random `rows × cols` isometry (`rows >= cols`).
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(rows >= cols);
    loop {
        if let Ok(v) = polar_isometry(&ginibre(rows, cols, rng)) {
            return v;
        }
    }
}

pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    random_isometry(n, n, rng)
}

/// Random density matrix (trace one, full rank with probability one).
pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(n, n, rng);
    let rho = g.mul_adjoint(&g);
    let t = rho.trace().re;
    rho.scale_re(1.0 / t)
}

/// `exp(iεH)` for a random hermitian `H` with unit operator-norm scale.
pub fn near_identity_unitary<R: Rng + ?Sized>(n: usize, eps: f64, rng: &mut R) -> ComplexMatrix {
    let h = random_hermitian(n, rng);
    let e = super::eig::jacobi_eigen(&h);
    let s = e.values.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    let mut d = e.vectors.clone();
    for j in 0..n {
        let ph = C64::from_polar(1.0, eps * e.values[j] / s);
        for i in 0..n {
            d[(i, j)] *= ph;
        }
    }
    d.mul_adjoint(&e.vectors)
}
