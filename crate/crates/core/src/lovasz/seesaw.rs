//! θ̂(S) = inf ‖Φ*(σ)⁻¹‖ over Φ ∈ C(S) and states σ: a σ-SDP per channel and a
//! see-saw that alternates it with penalized Kraus updates.

use serde::{Deserialize, Serialize};

use super::{combine, hermitian_matrix_basis, ChannelEnsemble, LovaszOptions};
use crate::channels::project::{penalty, penalty_and_gradient};
use crate::channels::{project_into, stack, unstack, ProjectOptions, QuantumChannel};
use crate::error::{Error, Result};
use crate::linalg::eig::{jacobi_eigen, polar_isometry};
use crate::linalg::{lambda_min, ComplexMatrix};
use crate::opsys::OperatorSystem;
use crate::solvers::{self, BlockData, BlockKind, LmiProblem};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThetaHatCertificate {
    /// `1 / λ_min(Φ*(σ))`, evaluated directly from the stored pair.
    pub value: f64,
    pub channel: QuantumChannel,
    pub sigma: ComplexMatrix,
    pub provenance: String,
}

/// Output dimensions above this are evaluated only through carried-over states,
/// never through a fresh σ-SDP.
pub const SIGMA_SDP_LIMIT: usize = 16;

/// Clips `σ` to a PSD matrix of unit trace.
fn to_state(sigma: &ComplexMatrix) -> ComplexMatrix {
    let e = jacobi_eigen(&sigma.hermitian_part());
    let clipped = e.map(|v| v.max(0.0));
    let tr = clipped.trace().re;
    if tr <= 0.0 {
        let k = sigma.rows();
        return ComplexMatrix::identity(k).scale_re(1.0 / k as f64);
    }
    clipped.scale_re(1.0 / tr)
}

/// Certified `1/λ_min(Φ*(σ))`, or infinity when `Φ*(σ)` is singular.
pub fn evaluate_pair(phi: &QuantumChannel, sigma: &ComplexMatrix) -> Result<f64> {
    let m = lambda_min(&phi.adjoint_apply(sigma)?);
    Ok(if m > 1e-12 { 1.0 / m } else { f64::INFINITY })
}

/// `max t` s.t. `Φ*(σ) ⪰ tI`, `σ ⪰ 0`, `Tr σ ≤ 1`, returning the certified pair value.
pub fn theta_hat_for_channel(phi: &QuantumChannel) -> Result<(f64, ComplexMatrix)> {
    let (d, k) = (phi.d(), phi.k());
    let basis = hermitian_matrix_basis(k);
    let nv = basis.len() + 1;
    let mut p = LmiProblem::new(vec![BlockKind::Psd(k), BlockKind::Psd(d), BlockKind::Diag(1)], nv);
    p.f0[2] = Some(BlockData::Diag(vec![1.0]));
    for (v, b) in basis.iter().enumerate() {
        p.f[v] = vec![
            (0, solvers::dense_or_sparse(b)),
            (1, solvers::dense_or_sparse(&phi.adjoint_apply(b)?)),
            (2, BlockData::Diag(vec![-b.trace().re])),
        ];
    }
    p.f[nv - 1] = vec![(1, BlockData::Dense(ComplexMatrix::identity(d).scale_re(-1.0)))];
    p.objective[nv - 1] = 1.0;
    let sol = solvers::solve_lmi(&p)?;
    if !sol.status.is_ok() {
        return Err(Error::Solver(format!("θ̂ σ-SDP: {:?}", sol.status)));
    }
    let sigma = to_state(&combine(&basis, &sol.y[..nv - 1]));
    Ok((evaluate_pair(phi, &sigma)?, sigma))
}

/// Penalized ascent of `λ_min(Φ*(σ)) − 10·Σ‖proj_{S⊥}(A_p* A_q)‖²` over Kraus
/// isometries, then projection back into C(S).
fn kraus_round(s: &OperatorSystem, phi: &QuantumChannel, sigma: &ComplexMatrix, iterations: usize) -> Option<QuantumChannel> {
    let perp = s.perp();
    let k = phi.k();
    let weight = 10.0;
    let objective = |kraus: &[ComplexMatrix]| -> Option<f64> {
        let c = QuantumChannel::subchannel(kraus.to_vec()).ok()?;
        Some(lambda_min(&c.adjoint_apply(sigma).ok()?) - weight * penalty(perp, kraus))
    };
    let mut kraus = phi.kraus().to_vec();
    let mut val = objective(&kraus)?;
    let mut step = 0.1;
    for _ in 0..iterations {
        let c = QuantumChannel::subchannel(kraus.clone()).ok()?;
        let m = c.adjoint_apply(sigma).ok()?;
        let e = jacobi_eigen(&m);
        let u = e.vector(0);
        let uu = ComplexMatrix::outer(&u, &u);
        let (_, pg) = penalty_and_gradient(perp, &kraus);
        // Ascent direction: σ A_p uu* − weight · ∂pen/∂Ā_p.
        let dir: Vec<ComplexMatrix> = kraus.iter().zip(&pg).map(|(a, g)| &sigma.matmul(a).matmul(&uu) - &g.scale_re(weight)).collect();
        let trial = polar_isometry(&(&stack(&kraus) + &stack(&dir).scale_re(step))).ok()?;
        let tk = unstack(&trial, k);
        match objective(&tk) {
            Some(tv) if tv > val => {
                kraus = tk;
                val = tv;
                step *= 1.2;
            }
            _ => {
                step *= 0.5;
                if step < 1e-8 {
                    break;
                }
            }
        }
    }
    project_into(s, &kraus, &ProjectOptions::default())
}

/// Best certified `(Φ, σ)` over the ensemble, refined by see-saw rounds on the best channel.
pub fn theta_hat_upper(ensemble: &ChannelEnsemble, opts: &LovaszOptions) -> Result<ThetaHatCertificate> {
    let mut best: Option<ThetaHatCertificate> = None;
    for (c, prov) in ensemble.channels.iter().zip(&ensemble.provenance) {
        let c = c.compress_output();
        if c.k() > SIGMA_SDP_LIMIT {
            continue;
        }
        let (value, sigma) = theta_hat_for_channel(&c)?;
        if best.as_ref().is_none_or(|b| value < b.value) {
            best = Some(ThetaHatCertificate { value, channel: c, sigma, provenance: prov.clone() });
        }
    }
    let mut best = best.ok_or(Error::EmptyInput("channel ensemble"))?;
    for round in 0..opts.seesaw_rounds {
        let Some(next) = kraus_round(&ensemble.system, &best.channel, &best.sigma, 500) else { break };
        let next = next.compress_output();
        let (value, sigma) = theta_hat_for_channel(&next)?;
        if value < best.value - 1e-12 {
            best = ThetaHatCertificate { value, channel: next, sigma, provenance: format!("see-saw round {} from {}", round + 1, best.provenance) };
        } else {
            break;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{optimal_labelling, Graph};
    use crate::lovasz::build_ensemble;
    use crate::opsys::{from_graph, s_family};

    #[test]
    fn identity_channel_gives_d() {
        for d in 2..=4 {
            let (v, sigma) = theta_hat_for_channel(&QuantumChannel::identity(d)).unwrap();
            assert!((v - d as f64).abs() < 1e-6);
            assert!((&sigma - &ComplexMatrix::identity(d).scale_re(1.0 / d as f64)).max_abs() < 1e-5);
        }
    }

    #[test]
    fn labelling_channel_on_c5() {
        let g = Graph::cycle(5);
        let lab = optimal_labelling(&g).unwrap();
        let phi = crate::channels::channel_from_labelling(&lab).unwrap();
        let (v, _) = theta_hat_for_channel(&phi).unwrap();
        assert!((v - 5f64.sqrt()).abs() < 1e-3, "{v}");
        let hc = ComplexMatrix::outer(&lab.handle, &lab.handle);
        assert!((evaluate_pair(&phi, &hc).unwrap() - 5f64.sqrt()).abs() < 1e-3);
        let e = build_ensemble(&from_graph(&g), &LovaszOptions { budget: 0, ..Default::default() }).unwrap();
        let best = theta_hat_upper(&e, &LovaszOptions { budget: 0, ..Default::default() }).unwrap();
        assert!((best.value - 5f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn seesaw_never_worsens_and_stays_in_c() {
        let s = s_family(&[2]).unwrap();
        let opts = LovaszOptions { budget: 1, seesaw_rounds: 0, ..Default::default() };
        let e = build_ensemble(&s, &opts).unwrap();
        let before = theta_hat_upper(&e, &opts).unwrap();
        let after = theta_hat_upper(&e, &LovaszOptions { seesaw_rounds: 2, ..opts }).unwrap();
        assert!(after.value <= before.value + 1e-12);
        assert!(after.channel.is_member_of(&s).unwrap());
        assert!(after.value <= 2.0 + 1e-6);
    }
}
