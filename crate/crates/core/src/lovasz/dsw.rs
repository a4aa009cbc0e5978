//! See-saw lower estimate of ϑ(S) = max{‖I + T‖ : T ∈ S⊥, I + T ⪰ 0}.

use serde::{Deserialize, Serialize};

use super::combine;
use crate::error::{Error, Result};
use crate::linalg::random::random_unit_vector;
use crate::linalg::{jacobi_eigen, ComplexMatrix};
use crate::opsys::OperatorSystem;
use crate::projections::search::restart_rng;
use crate::solvers::{self, BlockData, BlockKind, LmiProblem};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DswResult {
    /// Best `‖I + T‖` found: a lower estimate of ϑ(S).
    pub value: f64,
    pub witness: ComplexMatrix,
    /// Objective after each alternation of the best restart.
    pub history: Vec<f64>,
}

/// For fixed unit `ψ`: `max ψ*(I + T)ψ` over hermitian `T ∈ S⊥` with `I + T ⪰ 0`.
fn best_t_for(basis: &[ComplexMatrix], psi: &[num_complex::Complex64]) -> Result<ComplexMatrix> {
    let d = psi.len();
    let mut p = LmiProblem::new(vec![BlockKind::Psd(d)], basis.len());
    p.f0[0] = Some(BlockData::Dense(ComplexMatrix::identity(d)));
    for (v, b) in basis.iter().enumerate() {
        p.f[v] = vec![(0, solvers::dense_or_sparse(b))];
        p.objective[v] = b.quad_form(psi);
    }
    let sol = solvers::solve_lmi(&p)?;
    if !sol.status.is_ok() {
        return Err(Error::Solver(format!("DSW ψ-step SDP: {:?}", sol.status)));
    }
    Ok(combine(basis, &sol.y))
}

/// Alternates the ψ-step SDP with `ψ ←` top eigenvector of `I + T`.
pub fn dsw_theta_seesaw(s: &OperatorSystem, restarts: usize, seed: u64) -> Result<DswResult> {
    let d = s.dim_h();
    let basis = s.perp().hermitian_basis();
    let id = ComplexMatrix::identity(d);
    if basis.is_empty() {
        return Ok(DswResult { value: 1.0, witness: id, history: vec![1.0] });
    }
    let mut best: Option<DswResult> = None;
    for r in 0..restarts.max(1) {
        let mut rng = restart_rng(seed, r);
        let mut psi = random_unit_vector(d, &mut rng);
        let mut history = Vec::new();
        let mut witness = id.clone();
        let mut last = 1.0;
        for _ in 0..50 {
            let t = best_t_for(&basis, &psi)?;
            let m = &id + &t;
            let e = jacobi_eigen(&m);
            let top = e.max();
            psi = e.vector(d - 1);
            // ψ*(I+T)ψ ≤ λ_max(I+T) = next ψ-objective, so the sequence is nondecreasing.
            if top < last - 1e-7 {
                return Err(Error::Solver(format!("DSW see-saw decreased: {last} -> {top}")));
            }
            history.push(top);
            witness = m;
            if top - last < 1e-9 && history.len() > 1 {
                break;
            }
            last = top;
        }
        let value = *history.last().unwrap();
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(DswResult { value, witness, history });
        }
    }
    Ok(best.expect("at least one restart"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::Graph;
    use crate::opsys::{amplify, from_graph};

    #[test]
    fn special_values() {
        assert_eq!(dsw_theta_seesaw(&from_graph(&Graph::complete(3)), 2, 0).unwrap().value, 1.0);
        for d in 2..=3 {
            let v = dsw_theta_seesaw(&OperatorSystem::scalars(d), 4, 0).unwrap().value;
            assert!((v - d as f64).abs() < 1e-4, "{v}");
        }
        let m2 = amplify(&OperatorSystem::scalars(2), 2);
        let r = dsw_theta_seesaw(&m2, 8, 0).unwrap();
        assert!((r.value - 4.0).abs() < 1e-3, "{}", r.value);
        assert!(r.history.windows(2).all(|w| w[1] >= w[0] - 1e-7));
    }

    #[test]
    fn graph_system_matches_theta() {
        // ϑ(S_G) = θ(G) for graph systems.
        let v = dsw_theta_seesaw(&from_graph(&Graph::cycle(5)), 8, 1).unwrap().value;
        assert!(v <= 5f64.sqrt() + 1e-6);
        assert!(v >= 2.0 - 1e-6);
    }
}
