//! θ(S), θ̂(S), the DSW number ϑ(S) and the subcomplexity bound β(S).

pub mod dsw;
pub mod ensemble;
pub mod report;
pub mod seesaw;

use serde::{Deserialize, Serialize};

use crate::bounds::{BoundInterval, Certificate, Rigor};
use crate::channels::{project_into, ProjectOptions, QuantumChannel};
use crate::error::{Error, Result};
use crate::graphs::{self, lovasz_theta};
use crate::linalg::{lambda_max, ComplexMatrix, HermitianOperator, OperatorSubspace};
use crate::opsys::{OperatorSystem, Structure};
use crate::projections::{alpha_bounds, FindOptions};
use crate::solvers::{self, BlockData, BlockKind, LmiProblem};

pub use dsw::{dsw_theta_seesaw, DswResult};
pub use ensemble::{build_ensemble, ChannelEnsemble};
pub use report::{
    continuity_check, stability_check, theta_report, transfer_ensemble, verify_second_sandwich, ChainFlags, ContinuityReport, SandwichReport, StabilityReport,
    ThetaReport,
};
pub use seesaw::{theta_hat_for_channel, theta_hat_upper, ThetaHatCertificate};

#[derive(Clone, Copy, Debug)]
pub struct LovaszOptions {
    /// Random members of C(S) added to the ensemble.
    pub budget: usize,
    pub seesaw_rounds: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Output-dimension cap for ensemble channels; `None` means `d²`.
    pub max_output: Option<usize>,
}

impl Default for LovaszOptions {
    fn default() -> Self {
        Self { budget: 4, seesaw_rounds: 1, restarts: 8, seed: 0, max_output: None }
    }
}

impl LovaszOptions {
    pub fn find(&self) -> FindOptions {
        FindOptions::new(self.restarts, self.seed)
    }
}

/// Real basis of the hermitian matrices in `M_n`, orthonormal for `Tr(AB)`.
pub fn hermitian_matrix_basis(n: usize) -> Vec<ComplexMatrix> {
    OperatorSubspace::full(n).hermitian_basis()
}

fn combine(basis: &[ComplexMatrix], y: &[f64]) -> ComplexMatrix {
    let n = basis[0].rows();
    let mut t = ComplexMatrix::zeros(n, n);
    for (b, v) in basis.iter().zip(y) {
        t.axpy(num_complex::Complex64::new(*v, 0.0), b);
    }
    t
}

/// Rounds of adversarial cutting planes in [`theta_lower`].
const CUTTING_ROUNDS: usize = 4;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThetaUpper {
    /// Dual objective of the SDP: an upper bound on its optimum.
    pub value: f64,
    /// Primal objective attained by `t`.
    pub primal: f64,
    pub t: HermitianOperator,
}

/// `max Tr T` over `T ⪰ 0` with `Φ_j(T) ⪯ I` for every ensemble channel.
/// Since the ensemble lies in C(S), this bounds θ(S) from above.
pub fn theta_upper(ensemble: &ChannelEnsemble) -> Result<ThetaUpper> {
    theta_upper_over(ensemble.system.dim_h(), ensemble.channels.iter())
}

pub(crate) fn theta_upper_over<'a>(d: usize, channels: impl Iterator<Item = &'a QuantumChannel>) -> Result<ThetaUpper> {
    let basis = hermitian_matrix_basis(d);
    let channels: Vec<&QuantumChannel> = channels.collect();
    let mut blocks = vec![BlockKind::Psd(d)];
    blocks.extend(channels.iter().map(|c| BlockKind::Psd(c.k())));
    let mut p = LmiProblem::new(blocks, basis.len());
    for (j, c) in channels.iter().enumerate() {
        p.f0[j + 1] = Some(BlockData::Dense(ComplexMatrix::identity(c.k())));
    }
    for (v, b) in basis.iter().enumerate() {
        let mut f = vec![(0, solvers::dense_or_sparse(b))];
        for (j, c) in channels.iter().enumerate() {
            f.push((j + 1, solvers::dense_or_sparse(&c.apply(b)?.scale_re(-1.0))));
        }
        p.f[v] = f;
        p.objective[v] = b.trace().re;
    }
    let sol = solvers::solve_lmi(&p)?;
    if !sol.status.is_ok() {
        return Err(Error::Solver(format!("θ upper SDP: {:?}", sol.status)));
    }
    let t = HermitianOperator::from_hermitian_part(&combine(&basis, &sol.y));
    Ok(ThetaUpper { value: sol.dual_bound.max(sol.value), primal: sol.value, t })
}

/// Largest `‖Φ(T)‖` over the given channels.
pub fn max_channel_norm<'a>(t: &ComplexMatrix, channels: impl Iterator<Item = &'a QuantumChannel>) -> Result<f64> {
    let mut best: f64 = 0.0;
    for c in channels {
        best = best.max(lambda_max(&c.apply(t)?));
    }
    Ok(best)
}

/// Pushes a channel towards larger `λ_max(Φ(T))` and pulls it back into C(S).
fn adversarial_refine(s: &OperatorSystem, start: &QuantumChannel, t: &ComplexMatrix, rounds: usize) -> Option<QuantumChannel> {
    let mut best = start.clone();
    let mut best_val = lambda_max(&best.apply(t).ok()?);
    let mut step = 0.5;
    for _ in 0..rounds {
        let out = best.apply(t).ok()?;
        let e = crate::linalg::jacobi_eigen(&out);
        let v = e.vector(out.rows() - 1);
        let vv = ComplexMatrix::outer(&v, &v);
        // ∂(v* Φ(T) v)/∂Ā_p = v v* A_p T.
        let moved: Vec<ComplexMatrix> = best.kraus().iter().map(|a| a + &vv.matmul(a).matmul(t).scale_re(step)).collect();
        match project_into(s, &moved, &ProjectOptions::default()) {
            Some(c) => {
                let val = lambda_max(&c.apply(t).ok()?);
                if val > best_val {
                    best = c;
                    best_val = val;
                    step *= 1.5;
                } else {
                    step *= 0.5;
                }
            }
            None => step *= 0.5,
        }
    }
    Some(best)
}

/// Lower bound on θ(S). Family dispatch is exact; otherwise the rigorous floor
/// is the largest verified independent set, improved heuristically by the SDP
/// optimum of [`theta_upper`] scaled by the largest `‖Φ(T)‖` found adversarially.
pub fn theta_lower(s: &OperatorSystem, ensemble: &ChannelEnsemble, opts: &LovaszOptions) -> Result<BoundInterval> {
    let d = s.dim_h();
    match s.structure() {
        Structure::Graph(g) if g.n() <= graphs::theta::THETA_LIMIT => {
            let th = lovasz_theta(&g)?;
            return Ok(BoundInterval::exact(th.value, "graph system: θ(S_G) = θ(G)"));
        }
        Structure::Scalars => return Ok(BoundInterval::exact(d as f64, "ℂI_d: T = I satisfies ‖Φ(I)‖ ≤ 1 on C(ℂI_d)")),
        Structure::Full => return Ok(BoundInterval::exact(1.0, "M_d: θ(M_d) = 1")),
        _ => {}
    }
    let alpha = alpha_bounds(s, &opts.find());
    let floor = alpha.lower.max(1.0);
    let mut lower = floor;
    let mut rigor = Rigor::Rigorous;
    let mut cert = alpha.lower_certificate.clone();
    let mut pool: Vec<QuantumChannel> = ensemble.channels.iter().filter(|c| c.k() <= d).cloned().collect();
    for i in 0..opts.budget.max(1) {
        if let Some(c) = crate::channels::random_channel_in_c(s, d, 2, opts.seed.wrapping_add(1000 + i as u64), 4) {
            pool.push(c);
        }
    }
    // Cutting planes: the worst channel found against T joins the constraints.
    let mut constraints: Vec<QuantumChannel> = ensemble.channels.clone();
    let mut upper = theta_upper_over(d, constraints.iter())?;
    let mut upper_value = upper.value;
    for _ in 0..CUTTING_ROUNDS {
        if upper.primal <= lower + 1e-6 {
            break;
        }
        let t = upper.t.matrix().clone();
        let mut norm = max_channel_norm(&t, constraints.iter())?;
        let mut worst: Option<(f64, QuantumChannel)> = None;
        for c in &pool {
            if let Some(r) = adversarial_refine(s, c, &t, 6) {
                let v = lambda_max(&r.apply(&t)?);
                norm = norm.max(v);
                if worst.as_ref().is_none_or(|w| v > w.0) {
                    worst = Some((v, r));
                }
            }
        }
        let candidate = t.trace().re / norm.max(1e-12);
        if candidate > lower + 1e-9 {
            lower = candidate;
            rigor = Rigor::Heuristic;
            cert = Certificate::Matrix {
                description: format!("SDP optimum scaled by the largest ‖Φ(T)‖ found ({norm:.6}) over {} channels", pool.len() + constraints.len()),
                matrix: t.scale_re(1.0 / norm),
            };
        }
        match worst {
            Some((v, w)) if v > 1.0 + 1e-6 => {
                constraints.push(w.compress_output());
                upper = theta_upper_over(d, constraints.iter())?;
                upper_value = upper_value.min(upper.value);
            }
            _ => break,
        }
    }
    let upper_cert = Certificate::Relaxation { description: "max Tr T with Φ(T) ⪯ I over the ensemble and cutting planes".into(), constraints: constraints.len() };
    Ok(BoundInterval::new(lower.min(upper_value), rigor, cert, upper_value, Rigor::Rigorous, upper_cert))
}

/// Smallest output dimension in the ensemble after compressing Kraus ranges.
pub fn beta_upper(ensemble: &ChannelEnsemble) -> usize {
    ensemble.channels.iter().map(|c| c.compress_output().k()).min().unwrap_or(ensemble.system.dim_h()).min(ensemble.system.dim_h())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::Graph;
    use crate::opsys::{from_graph, s_family};

    #[test]
    fn identity_only_gives_d() {
        let s = OperatorSystem::scalars(3);
        let e = ChannelEnsemble::new(s, vec![(QuantumChannel::identity(3), "identity".into())]).unwrap();
        let u = theta_upper(&e).unwrap();
        assert!((u.value - 3.0).abs() < 1e-6, "{}", u.value);
    }

    #[test]
    fn complete_graph_constant_channel() {
        let s = from_graph(&Graph::complete(3));
        let e = build_ensemble(&s, &LovaszOptions { budget: 0, ..Default::default() }).unwrap();
        assert!((theta_upper(&e).unwrap().value - 1.0).abs() < 1e-6);
        assert_eq!(beta_upper(&e), 1);
    }

    #[test]
    fn c5_with_labelling() {
        let s = from_graph(&Graph::cycle(5));
        let e = build_ensemble(&s, &LovaszOptions { budget: 0, ..Default::default() }).unwrap();
        assert!(e.channels.len() >= 6);
        let u = theta_upper(&e).unwrap();
        assert!(u.value <= 5f64.sqrt() + 1e-3, "{}", u.value);
    }

    #[test]
    fn monotone_in_ensemble() {
        let s = s_family(&[2]).unwrap();
        let e = build_ensemble(&s, &LovaszOptions { budget: 2, ..Default::default() }).unwrap();
        let mut last = f64::INFINITY;
        for n in 1..=e.channels.len() {
            let v = theta_upper_over(2, e.channels[..n].iter()).unwrap().value;
            assert!(v <= last + 1e-6);
            last = v;
        }
    }

    #[test]
    fn theta_lower_dispatch_and_s2() {
        let opts = LovaszOptions::default();
        let s = from_graph(&Graph::cycle(5));
        let e = build_ensemble(&s, &opts).unwrap();
        assert!((theta_lower(&s, &e, &opts).unwrap().lower - 2.0).abs() < 1e-9 || (theta_lower(&s, &e, &opts).unwrap().lower - 5f64.sqrt()).abs() < 1e-6);
        let s2 = s_family(&[2]).unwrap();
        let e = build_ensemble(&s2, &opts).unwrap();
        let b = theta_lower(&s2, &e, &opts).unwrap();
        assert!(b.lower > 1.0 + 1e-3, "{b:?}");
        assert!(b.is_consistent());
        let full = OperatorSystem::full(2);
        let e = build_ensemble(&full, &opts).unwrap();
        assert_eq!(theta_lower(&full, &e, &opts).unwrap().lower, 1.0);
        assert_eq!(beta_upper(&e), 1);
    }
}
