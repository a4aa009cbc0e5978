//! Lovász θ(G) and orthogonal labellings.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::graph::Graph;
use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigen, vdot, vnorm, ComplexMatrix, HermitianOperator};
use crate::solvers::{solve_sdp, ConstraintSense, SemidefiniteProgram};

pub const THETA_LIMIT: usize = 30;

#[derive(Clone, Debug)]
pub struct LovaszTheta {
    pub value: f64,
    /// Optimal `B ⪰ 0`, `Tr B = 1`, `B_xy = 0` on edges.
    pub primal: HermitianOperator,
    /// `A` with `A_xy = 1` for `x = y` or `x ≁ y`, `λ_max(A) ≈ θ`.
    pub dual: ComplexMatrix,
    /// `λ_max` of the dual witness.
    pub dual_value: f64,
}

/// θ(G) via `max ⟨J, B⟩`, `Tr B = 1`, `B_xy = 0` for `x ∼ y`, `B ⪰ 0`.
pub fn lovasz_theta(g: &Graph) -> Result<LovaszTheta> {
    let n = g.n();
    if n > THETA_LIMIT {
        return Err(Error::TooLarge { what: "Lovász theta", n, limit: THETA_LIMIT });
    }
    if n == 0 {
        return Err(Error::EmptyInput("graph with no vertices"));
    }
    let j = HermitianOperator::new(ComplexMatrix::from_fn(n, n, |_, _| C64::new(1.0, 0.0)))?;
    let mut p = SemidefiniteProgram::new(j, true);
    p.add_constraint(HermitianOperator::new(ComplexMatrix::identity(n))?, ConstraintSense::Eq, 1.0);
    let edges = g.edges();
    for &(a, b) in &edges {
        let e = &ComplexMatrix::unit(n, a, b) + &ComplexMatrix::unit(n, b, a);
        p.add_constraint(HermitianOperator::new(e)?, ConstraintSense::Eq, 0.0);
    }
    let sol = solve_sdp(&p)?;
    if !sol.status.is_ok() {
        return Err(Error::Solver(format!("Lovász SDP ended with status {:?}", sol.status)));
    }
    // Dual: y_0 I + Σ y_e (E_ab + E_ba) ⪰ J, so A = J − Σ y_e (E_ab + E_ba).
    let mut dual = ComplexMatrix::from_fn(n, n, |_, _| C64::new(1.0, 0.0));
    for (k, &(a, b)) in edges.iter().enumerate() {
        let y = sol.y[k + 1];
        dual[(a, b)] -= y;
        dual[(b, a)] -= y;
    }
    let dual_value = jacobi_eigen(&dual).max();
    Ok(LovaszTheta { value: sol.value, primal: sol.x, dual, dual_value })
}

/// Unit vectors `a_x` with `x ≁ y ⇒ a_x ⊥ a_y`, and a handle `c` with `‖c‖ ≤ 1`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrthogonalLabelling {
    pub graph: Graph,
    pub vectors: Vec<Vec<C64>>,
    pub handle: Vec<C64>,
}

impl OrthogonalLabelling {
    pub fn dim(&self) -> usize {
        self.handle.len()
    }

    /// `max_x 1/|⟨a_x, c⟩|²`.
    pub fn value(&self) -> f64 {
        self.vectors.iter().map(|a| 1.0 / vdot(a, &self.handle).norm_sqr()).fold(0.0, f64::max)
    }

    /// Largest violation of the labelling conditions.
    pub fn residual(&self) -> f64 {
        let n = self.graph.n();
        let mut r = (vnorm(&self.handle) - 1.0).max(0.0);
        for x in 0..n {
            r = r.max((vnorm(&self.vectors[x]) - 1.0).abs());
            for y in (x + 1)..n {
                if !self.graph.adjacent(x, y) {
                    r = r.max(vdot(&self.vectors[x], &self.vectors[y]).norm());
                }
            }
        }
        r
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let k = self.dim();
        if self.vectors.len() != self.graph.n() || self.vectors.iter().any(|v| v.len() != k) {
            return Err(Error::shape(format!("{} vectors of length {k}", self.graph.n()), "labelling vectors"));
        }
        let r = self.residual();
        if r > tol {
            return Err(Error::Invalid(format!("not an orthogonal labelling (residual {r:.3e})")));
        }
        Ok(())
    }
}

/// Labelling from a partition of the vertices into cliques: `a_x = e_{part(x)}`.
pub fn labelling_from_clique_cover(g: &Graph, cover: &[Vec<usize>]) -> Result<OrthogonalLabelling> {
    let n = g.n();
    let k = cover.len();
    let mut part = vec![usize::MAX; n];
    for (i, c) in cover.iter().enumerate() {
        if c.is_empty() {
            return Err(Error::Invalid("empty part in clique cover".into()));
        }
        if !g.is_clique(c) {
            return Err(Error::Invalid(format!("part {i} of the cover is not a clique")));
        }
        for &x in c {
            if x >= n || part[x] != usize::MAX {
                return Err(Error::Invalid(format!("vertex {x} out of range or covered twice")));
            }
            part[x] = i;
        }
    }
    if part.contains(&usize::MAX) {
        return Err(Error::Invalid("cover does not contain every vertex".into()));
    }
    let vectors = part.iter().map(|&p| crate::linalg::basis_vector(k, p)).collect();
    let s = 1.0 / (k as f64).sqrt();
    let handle = vec![C64::new(s, 0.0); k];
    Ok(OrthogonalLabelling { graph: g.clone(), vectors, handle })
}

/// Labelling attaining θ(G), built from the dual witness `A`: with
/// `λ = λ_max(A)` and a Gram factorization `λI − A = UᵀU`, set
/// `a_x = (e_0 + u_x)/√λ` and `c = e_0`, so that `|⟨a_x, c⟩|² = 1/λ`.
pub fn optimal_labelling(g: &Graph) -> Result<OrthogonalLabelling> {
    let th = lovasz_theta(g)?;
    labelling_from_dual(g, &th.dual)
}

pub fn labelling_from_dual(g: &Graph, a: &ComplexMatrix) -> Result<OrthogonalLabelling> {
    let n = g.n();
    let lambda = jacobi_eigen(a).max();
    let z = &ComplexMatrix::identity(n).scale_re(lambda) - a;
    let e = jacobi_eigen(&z);
    // Column x of U = Λ^{1/2} V*.
    let mut vectors = Vec::with_capacity(n);
    for x in 0..n {
        let mut v = vec![C64::new(1.0, 0.0)];
        for k in 0..n {
            v.push(e.vectors[(x, k)].conj() * e.values[k].max(0.0).sqrt());
        }
        let nv = vnorm(&v);
        v.iter_mut().for_each(|c| *c /= nv);
        vectors.push(v);
    }
    let handle = crate::linalg::basis_vector(n + 1, 0);
    let lab = OrthogonalLabelling { graph: g.clone(), vectors, handle };
    lab.validate(1e-6)?;
    Ok(lab)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::exact::{fractional_clique_number, independence_number};
    use crate::graphs::graph::complement;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn theta_examples() {
        assert!((lovasz_theta(&Graph::complete(4)).unwrap().value - 1.0).abs() < 1e-6);
        let c5 = lovasz_theta(&Graph::cycle(5)).unwrap();
        assert!((c5.value - 5f64.sqrt()).abs() < 1e-6);
        assert!((c5.dual_value - 5f64.sqrt()).abs() < 1e-6);
        assert!((lovasz_theta(&Graph::empty(4)).unwrap().value - 4.0).abs() < 1e-6);
        let p = lovasz_theta(&Graph::petersen()).unwrap();
        assert!((p.value - 4.0).abs() < 1e-6);
        assert!((p.dual_value - 4.0).abs() < 1e-6);
    }

    #[test]
    fn cover_labellings() {
        let k = labelling_from_clique_cover(&Graph::complete(4), &[vec![0, 1, 2, 3]]).unwrap();
        k.validate(1e-12).unwrap();
        assert!((k.value() - 1.0).abs() < 1e-12);
        let singles: Vec<Vec<usize>> = (0..4).map(|i| vec![i]).collect();
        let e = labelling_from_clique_cover(&Graph::empty(4), &singles).unwrap();
        e.validate(1e-12).unwrap();
        assert!((e.value() - 4.0).abs() < 1e-12);
        assert!(labelling_from_clique_cover(&Graph::empty(2), &[vec![0, 1]]).is_err());
    }

    #[test]
    fn optimal_labelling_c5() {
        let g = Graph::cycle(5);
        let lab = optimal_labelling(&g).unwrap();
        lab.validate(1e-8).unwrap();
        assert!((lab.value() - 5f64.sqrt()).abs() < 1e-4);
    }

    #[test]
    fn sandwich_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..15 {
            let g = Graph::random(9, 0.5, &mut rng);
            let th = lovasz_theta(&g).unwrap().value;
            let a = independence_number(&g).unwrap() as f64;
            let chi_f = fractional_clique_number(&complement(&g)).unwrap();
            assert!(a <= th + 1e-6 && th <= chi_f + 1e-6, "{a} {th} {chi_f}");
            let lab = optimal_labelling(&g).unwrap();
            assert!(lab.residual() < 1e-8);
            assert!((lab.value() - th).abs() < 1e-4);
        }
    }

    #[test]
    fn theta_product_vertex_transitive() {
        let c5 = Graph::cycle(5);
        let t = lovasz_theta(&c5).unwrap().value * lovasz_theta(&complement(&c5)).unwrap().value;
        assert!(t >= 5.0 - 1e-6);
        let p = Graph::petersen();
        let t = lovasz_theta(&p).unwrap().value * lovasz_theta(&complement(&p)).unwrap().value;
        assert!(t >= 10.0 - 1e-6);
    }
}
