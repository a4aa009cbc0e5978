//! Subspaces of M_d under the Hilbert–Schmidt inner product.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// Default relative rank cutoff for Gram–Schmidt.
pub const RANK_TOL: f64 = 1e-8;
/// Default relative membership tolerance.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

/// Subspace of `M_d` with an HS-orthonormal basis.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "SubspaceJson", into = "SubspaceJson")]
pub struct OperatorSubspace {
    ambient_dim: usize,
    basis: Vec<ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
struct SubspaceJson {
    ambient_dim: usize,
    basis: Vec<ComplexMatrix>,
}

impl From<OperatorSubspace> for SubspaceJson {
    fn from(s: OperatorSubspace) -> Self {
        SubspaceJson { ambient_dim: s.ambient_dim, basis: s.basis }
    }
}

impl TryFrom<SubspaceJson> for OperatorSubspace {
    type Error = Error;
    // Input bases need not be orthonormal; they are re-orthonormalized.
    fn try_from(j: SubspaceJson) -> Result<Self> {
        for b in &j.basis {
            if b.shape() != (j.ambient_dim, j.ambient_dim) {
                return Err(Error::shape(format!("{0}x{0}", j.ambient_dim), format!("{:?}", b.shape())));
            }
        }
        if j.basis.is_empty() {
            return Ok(OperatorSubspace::zero(j.ambient_dim));
        }
        subspace_from_spanning(&j.basis, RANK_TOL)
    }
}

impl OperatorSubspace {
    pub fn zero(d: usize) -> Self {
        Self { ambient_dim: d, basis: Vec::new() }
    }

    /// All of `M_d`, with the matrix-unit basis.
    pub fn full(d: usize) -> Self {
        let mut basis = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                basis.push(ComplexMatrix::unit(d, i, j));
            }
        }
        Self { ambient_dim: d, basis }
    }

    /// `ℂ I_d`.
    pub fn scalars(d: usize) -> Self {
        Self { ambient_dim: d, basis: vec![ComplexMatrix::identity(d).scale_re(1.0 / (d as f64).sqrt())] }
    }

    /// Wraps a basis that the caller guarantees is HS-orthonormal.
    pub(crate) fn from_orthonormal(ambient_dim: usize, basis: Vec<ComplexMatrix>) -> Self {
        debug_assert!(basis.iter().all(|b| b.shape() == (ambient_dim, ambient_dim)));
        Self { ambient_dim, basis }
    }

    /// Wraps a basis after checking orthonormality within `1e-10`.
    pub fn from_orthonormal_checked(ambient_dim: usize, basis: Vec<ComplexMatrix>) -> Result<Self> {
        for b in &basis {
            if b.shape() != (ambient_dim, ambient_dim) {
                return Err(Error::shape(format!("{0}x{0}", ambient_dim), format!("{:?}", b.shape())));
            }
        }
        for i in 0..basis.len() {
            for j in 0..=i {
                let g = basis[i].hs_inner_unchecked(&basis[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                if (g - C64::new(target, 0.0)).norm() > 1e-10 {
                    return Err(Error::Invalid(format!("basis not orthonormal at ({i}, {j})")));
                }
            }
        }
        Ok(Self { ambient_dim, basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    fn check_shape(&self, a: &ComplexMatrix) -> Result<()> {
        if a.shape() != (self.ambient_dim, self.ambient_dim) {
            return Err(Error::shape(format!("{0}x{0}", self.ambient_dim), format!("{:?}", a.shape())));
        }
        Ok(())
    }

    /// Coefficients `⟨A, B_i⟩` of `A` in the basis.
    pub fn coefficients(&self, a: &ComplexMatrix) -> Vec<C64> {
        self.basis.iter().map(|b| a.hs_inner_unchecked(b)).collect()
    }

    pub fn project(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_shape(a)?;
        Ok(self.project_unchecked(a))
    }

    pub(crate) fn project_unchecked(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.ambient_dim, self.ambient_dim);
        for b in &self.basis {
            let c = a.hs_inner_unchecked(b);
            out.axpy(c, b);
        }
        out
    }

    /// `‖A − proj(A)‖_HS`.
    pub fn distance(&self, a: &ComplexMatrix) -> Result<f64> {
        self.check_shape(a)?;
        Ok(self.distance_unchecked(a))
    }

    pub(crate) fn distance_unchecked(&self, a: &ComplexMatrix) -> f64 {
        let n2 = a.fro_norm().powi(2);
        let p2: f64 = self.basis.iter().map(|b| a.hs_inner_unchecked(b).norm_sqr()).sum();
        if p2 > 0.9 * n2 {
            // Cancellation-prone regime; compute the residual explicitly.
            (a - &self.project_unchecked(a)).fro_norm()
        } else {
            (n2 - p2).max(0.0).sqrt()
        }
    }

    /// Squared norm of the projection of `A` onto the subspace.
    pub(crate) fn projection_norm_sqr(&self, a: &ComplexMatrix) -> f64 {
        self.basis.iter().map(|b| a.hs_inner_unchecked(b).norm_sqr()).sum()
    }

    pub fn contains(&self, a: &ComplexMatrix, tol: f64) -> Result<bool> {
        self.check_shape(a)?;
        let n = a.fro_norm();
        if n == 0.0 {
            return Ok(true);
        }
        Ok(self.distance_unchecked(a) <= tol * n)
    }

    /// True if every basis element of `other` lies in `self`.
    pub fn contains_subspace(&self, other: &OperatorSubspace, tol: f64) -> Result<bool> {
        for b in &other.basis {
            if !self.contains(b, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Largest relative distance of a basis element of `other` from `self`.
    pub fn containment_residual(&self, other: &OperatorSubspace) -> f64 {
        other.basis.iter().map(|b| self.distance_unchecked(b) / b.fro_norm().max(1e-300)).fold(0.0, f64::max)
    }

    /// Equality by mutual membership of bases.
    pub fn same_as(&self, other: &OperatorSubspace, tol: f64) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.dim() == other.dim()
            && self.containment_residual(other) <= tol
            && other.containment_residual(self) <= tol
    }

    /// Sum of two subspaces.
    pub fn join(&self, other: &OperatorSubspace) -> Result<OperatorSubspace> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::shape(format!("ambient {}", self.ambient_dim), format!("ambient {}", other.ambient_dim)));
        }
        let mut basis = self.basis.clone();
        extend_orthonormal(&mut basis, other.basis.iter().cloned(), RANK_TOL);
        Ok(Self { ambient_dim: self.ambient_dim, basis })
    }

    /// True if `A ∈ V ⇒ A* ∈ V`, within `tol`.
    pub fn is_adjoint_closed(&self, tol: f64) -> bool {
        self.adjoint_residual() <= tol
    }

    pub fn adjoint_residual(&self) -> f64 {
        self.basis.iter().map(|b| self.distance_unchecked(&b.adjoint())).fold(0.0, f64::max)
    }

    /// Real basis of the hermitian elements of an adjoint-closed subspace,
    /// orthonormal for `⟨A, B⟩ = Tr(AB)`. Has `dim` elements.
    pub fn hermitian_basis(&self) -> Vec<ComplexMatrix> {
        let mut out: Vec<ComplexMatrix> = Vec::with_capacity(self.dim());
        let half = C64::new(0.5, 0.0);
        let mhalf_i = C64::new(0.0, -0.5);
        for b in &self.basis {
            let ad = b.adjoint();
            let h1 = (b + &ad).scale(half);
            let h2 = (b - &ad).scale(mhalf_i);
            for mut h in [h1, h2] {
                let n0 = h.fro_norm();
                if n0 < 1e-12 {
                    continue;
                }
                for _ in 0..2 {
                    for q in &out {
                        let c = h.real_pairing(q);
                        h.axpy(C64::new(-c, 0.0), q);
                    }
                }
                let n = h.fro_norm();
                if n > 1e-7 * n0.max(1.0) && n > 1e-9 {
                    out.push(h.scale_re(1.0 / n));
                }
                if out.len() == self.dim() {
                    return out;
                }
            }
        }
        out
    }
}

/// Gram–Schmidt (with one re-orthogonalization pass) appending the
/// independent directions of `mats` to the orthonormal list `basis`.
pub(crate) fn extend_orthonormal(
    basis: &mut Vec<ComplexMatrix>,
    mats: impl IntoIterator<Item = ComplexMatrix>,
    rank_tol: f64,
) {
    for m in mats {
        let n0 = m.fro_norm();
        if n0 == 0.0 {
            continue;
        }
        let mut v = m;
        for _ in 0..2 {
            for b in basis.iter() {
                let c = v.hs_inner_unchecked(b);
                if c != ZERO {
                    v.axpy(-c, b);
                }
            }
        }
        let n = v.fro_norm();
        if n > rank_tol * n0 {
            basis.push(v.scale_re(1.0 / n));
        }
    }
}

/// Orthonormal basis of the span of `mats`; dimension is the numerical rank at `rank_tol`.
pub fn subspace_from_spanning(mats: &[ComplexMatrix], rank_tol: f64) -> Result<OperatorSubspace> {
    let first = mats.first().ok_or(Error::EmptyInput("spanning set"))?;
    let (d, d2) = first.shape();
    if d != d2 {
        return Err(Error::shape("square matrices", format!("{:?}", first.shape())));
    }
    for m in mats {
        if m.shape() != (d, d) {
            return Err(Error::shape(format!("{d}x{d}"), format!("{:?}", m.shape())));
        }
    }
    // Order by decreasing norm so the rank cutoff is relative to the dominant elements.
    let scale = mats.iter().map(|m| m.fro_norm()).fold(0.0, f64::max);
    let mut basis = Vec::new();
    for m in mats {
        let n0 = m.fro_norm();
        if n0 <= rank_tol * scale {
            continue;
        }
        let mut v = m.clone();
        for _ in 0..2 {
            for b in basis.iter() {
                let c = v.hs_inner_unchecked(b);
                v.axpy(-c, b);
            }
        }
        let n = v.fro_norm();
        if n > rank_tol * n0.max(scale * 1e-3) {
            basis.push(v.scale_re(1.0 / n));
        }
    }
    Ok(OperatorSubspace { ambient_dim: d, basis })
}

/// Orthogonal complement in `M_d`.
pub fn orth_complement(v: &OperatorSubspace) -> OperatorSubspace {
    let d = v.ambient_dim;
    let target = d * d - v.dim();
    let mut all = v.basis.clone();
    let start = all.len();
    'outer: for i in 0..d {
        for j in 0..d {
            if all.len() - start == target {
                break 'outer;
            }
            extend_orthonormal(&mut all, std::iter::once(ComplexMatrix::unit(d, i, j)), 1e-6);
        }
    }
    OperatorSubspace { ambient_dim: d, basis: all.split_off(start) }
}

pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    a.hs_inner(b)
}

pub fn project_onto(v: &OperatorSubspace, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    v.project(a)
}

pub fn membership(v: &OperatorSubspace, a: &ComplexMatrix, tol: f64) -> Result<bool> {
    v.contains(a, tol)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// `V₁ ⊗ V₂`; products of orthonormal bases are orthonormal.
pub fn tensor_subspace(v1: &OperatorSubspace, v2: &OperatorSubspace) -> OperatorSubspace {
    let mut basis = Vec::with_capacity(v1.dim() * v2.dim());
    for a in &v1.basis {
        for b in &v2.basis {
            basis.push(a.kron(b));
        }
    }
    OperatorSubspace { ambient_dim: v1.ambient_dim * v2.ambient_dim, basis }
}
