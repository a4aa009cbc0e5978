//! Aggregated θ-type reports and the sandwich / stability harnesses.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{beta_upper, build_ensemble, dsw_theta_seesaw, max_channel_norm, theta_hat_upper, theta_lower, theta_upper, ChannelEnsemble, LovaszOptions};
use crate::bounds::{BoundInterval, Certificate, Rigor};
use crate::channels::{amplified_channel, compressed_channel, transfer_channel, TransferredChannel};
use crate::corners::{ap_corner, fp_corner, kappa_bounds, phi_bounds, CornerOptions};
use crate::error::Result;
use crate::linalg::random::{random_state, random_unit_vector};
use crate::linalg::ComplexMatrix;
use crate::opsys::{amplify, complement, perturb, OperatorSystem};
use crate::projections::search::restart_rng;
use crate::projections::{alpha_bounds, omega_bounds, sample_graph_abelian, search_independent_set};

use super::seesaw::{evaluate_pair, theta_hat_for_channel};

const CHAIN_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainFlags {
    pub alpha_le_theta: bool,
    pub theta_le_theta_hat: bool,
    pub theta_hat_le_beta: bool,
    pub beta_le_d: bool,
    pub theta_le_phi: bool,
    pub alpha_eq_omega_complement: bool,
    pub alpha_le_kappa: bool,
    pub kappa_le_phi: bool,
    pub all_at_least_one: bool,
}

impl ChainFlags {
    /// Names of the violated links.
    pub fn violations(&self) -> Vec<String> {
        match serde_json::to_value(self) {
            Ok(serde_json::Value::Object(m)) => m.into_iter().filter(|(_, v)| v == &serde_json::Value::Bool(false)).map(|(k, _)| k).collect(),
            _ => Vec::new(),
        }
    }

    pub fn all(&self) -> bool {
        self.alpha_le_theta
            && self.theta_le_theta_hat
            && self.theta_hat_le_beta
            && self.beta_le_d
            && self.theta_le_phi
            && self.alpha_eq_omega_complement
            && self.alpha_le_kappa
            && self.kappa_le_phi
            && self.all_at_least_one
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThetaReport {
    pub d: usize,
    pub alpha: BoundInterval,
    pub omega_complement: BoundInterval,
    pub kappa: BoundInterval,
    pub phi: BoundInterval,
    pub theta: BoundInterval,
    pub theta_hat: BoundInterval,
    /// ϑ(S): see-saw value below, `d` above (`I + T ⪰ 0` with `Tr(I + T) = d`).
    pub dsw: BoundInterval,
    /// β(S): smallest compressed output dimension in the ensemble above, θ below.
    pub beta: BoundInterval,
    pub ensemble_size: usize,
    pub chain: ChainFlags,
    /// Set when the θ̂ certificate undercuts the θ lower bound by more than 1e-4.
    pub falsification: bool,
}

fn le(a: f64, b: f64) -> bool {
    a <= b + CHAIN_TOL
}

pub fn theta_report(s: &OperatorSystem, opts: &LovaszOptions) -> Result<ThetaReport> {
    let d = s.dim_h();
    let find = opts.find();
    let copts = CornerOptions { samples: 8, find };
    let ensemble = build_ensemble(s, opts)?;
    let alpha = alpha_bounds(s, &find);
    let omega_complement = omega_bounds(&complement(s), &find);
    let kappa = kappa_bounds(s, &copts)?;
    let phi = phi_bounds(s, &copts)?;
    let theta = theta_lower(s, &ensemble, opts)?;
    let cert = theta_hat_upper(&ensemble, opts)?;
    let theta_hat = BoundInterval::new(
        theta.lower,
        theta.lower_rigor,
        Certificate::Note { text: "θ ≤ θ̂".into() },
        cert.value,
        Rigor::Rigorous,
        Certificate::ChannelState { kraus: cert.channel.kraus().to_vec(), sigma: cert.sigma.clone() },
    );
    let dsw_run = dsw_theta_seesaw(s, opts.restarts, opts.seed)?;
    let dsw_lower = dsw_run.value;
    let dsw = BoundInterval::new(
        dsw_lower,
        Rigor::Rigorous,
        Certificate::Matrix { description: "I + T with T ∈ S⊥ from the see-saw".into(), matrix: dsw_run.witness },
        d as f64,
        Rigor::Rigorous,
        Certificate::Trivial { reason: "‖I + T‖ ≤ Tr(I + T) = d".into() },
    );
    let beta_n = beta_upper(&ensemble);
    let beta = BoundInterval::new(
        theta.lower,
        theta.lower_rigor,
        Certificate::Note { text: "θ ≤ β".into() },
        beta_n as f64,
        Rigor::Rigorous,
        Certificate::Note { text: "output dimension of an ensemble channel".into() },
    );
    let chain = ChainFlags {
        alpha_le_theta: le(alpha.lower, theta.upper),
        theta_le_theta_hat: le(theta.lower, theta_hat.upper),
        theta_hat_le_beta: le(theta_hat.upper, beta.upper),
        beta_le_d: beta_n <= d,
        theta_le_phi: le(theta.lower, phi.upper),
        alpha_eq_omega_complement: le(alpha.lower, omega_complement.upper) && le(omega_complement.lower, alpha.upper),
        alpha_le_kappa: le(alpha.lower, kappa.upper),
        kappa_le_phi: le(kappa.lower, phi.upper),
        all_at_least_one: [alpha.lower, theta.lower, theta_hat.lower, kappa.lower, phi.lower, dsw_lower].iter().all(|&v| v >= 1.0 - CHAIN_TOL),
    };
    let falsification = theta_hat.upper < theta.lower - 1e-4;
    Ok(ThetaReport { d, alpha, omega_complement, kappa, phi, theta, theta_hat, dsw, beta, ensemble_size: ensemble.len(), chain, falsification })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SandwichReport {
    pub abelian_samples: usize,
    /// Largest `‖Φ(P)‖` over sampled abelian projections and ensemble channels.
    pub worst_abelian_norm: f64,
    pub theta_samples: usize,
    pub full_projections: usize,
    /// Largest `Tr(TQ)` over sampled Θ-feasible `T` and harvested full projections.
    pub worst_full_pairing: f64,
    /// Largest `⟨T, Φ*(σ)⟩` over the same `T`, ensemble channels and random states.
    pub worst_duality: f64,
    pub passed: bool,
}

/// Checks `ap(S) ⊆ Θ(S) ⊆ fp(S)♯` on samples.
pub fn verify_second_sandwich(s: &OperatorSystem, ensemble: &ChannelEnsemble, samples: usize, seed: u64) -> Result<SandwichReport> {
    let d = s.dim_h();
    let mut rng = restart_rng(seed, 0);
    let find = crate::projections::FindOptions::new(8, seed);
    let mut abelian: Vec<ComplexMatrix> = ap_corner(s, &CornerOptions { samples, find })?.matrices();
    if let Some(g) = s.graph() {
        for _ in 0..samples {
            let rank = rng.random_range(1..=d);
            if let Some(f) = sample_graph_abelian(&g, rank, &mut rng) {
                abelian.push(f.projection());
            }
        }
    } else {
        for k in 1..=d.min(3) {
            if let Some(f) = search_independent_set(s, k, &find) {
                abelian.push(f.projection());
            }
        }
    }
    let mut worst_abelian_norm: f64 = 0.0;
    for p in &abelian {
        worst_abelian_norm = worst_abelian_norm.max(max_channel_norm(p, ensemble.channels.iter())?);
    }

    let full = fp_corner(s, &CornerOptions { samples, find })?.matrices();
    let mut thetas = vec![theta_upper(ensemble)?.t.into_matrix()];
    for _ in 0..samples {
        let x = random_state(d, &mut rng).scale_re(d as f64);
        let n = max_channel_norm(&x, ensemble.channels.iter())?;
        thetas.push(x.scale_re(1.0 / n));
    }
    let mut worst_full_pairing: f64 = 0.0;
    let mut worst_duality: f64 = 0.0;
    for t in &thetas {
        // The SDP point is feasible up to solver residuals; rescale onto the constraint set.
        let t = t.scale_re(1.0 / max_channel_norm(t, ensemble.channels.iter())?.max(1.0));
        for q in &full {
            worst_full_pairing = worst_full_pairing.max(t.real_pairing(q));
        }
        for c in &ensemble.channels {
            for _ in 0..2 {
                let psi = random_unit_vector(c.k(), &mut rng);
                let sigma = ComplexMatrix::outer(&psi, &psi);
                worst_duality = worst_duality.max(t.real_pairing(&c.adjoint_apply(&sigma)?));
            }
        }
    }
    let passed = worst_abelian_norm <= 1.0 + 1e-7 && worst_full_pairing <= 1.0 + 1e-7 && worst_duality <= 1.0 + 1e-7;
    Ok(SandwichReport {
        abelian_samples: abelian.len(),
        worst_abelian_norm,
        theta_samples: thetas.len(),
        full_projections: full.len(),
        worst_full_pairing,
        worst_duality,
        passed,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilityReport {
    pub m: usize,
    /// θ̂ certificate for S from its own ensemble.
    pub base_upper: f64,
    /// The same certificate pushed to M_m(S) through Φ ∘ Γ.
    pub amplified_upper: f64,
    /// θ̂ certificate for M_m(S) from its own ensemble.
    pub own_amplified_upper: f64,
    /// That certificate pulled back to S through Ψ ∘ Λ.
    pub compressed_upper: f64,
    /// Best certified upper on each side.
    pub upper_s: f64,
    pub upper_amplified: f64,
    pub passed: bool,
}

/// Two-sided certificate transfer between S and M_m(S).
pub fn stability_check(s: &OperatorSystem, m: usize, opts: &LovaszOptions) -> Result<StabilityReport> {
    let base = theta_hat_upper(&build_ensemble(s, opts)?, opts)?;
    let amp = amplified_channel(&base.channel, m)?;
    let amplified_upper = evaluate_pair(&amp, &base.sigma)?;

    let sm = amplify(s, m);
    let own = theta_hat_upper(&build_ensemble(&sm, opts)?, opts)?;
    let back = compressed_channel(&own.channel, m)?.compress_output();
    let (compressed_upper, _) = theta_hat_for_channel(&back)?;

    let upper_s = base.value.min(compressed_upper);
    let upper_amplified = amplified_upper.min(own.value);
    let passed = upper_amplified <= upper_s + CHAIN_TOL && upper_s <= upper_amplified + CHAIN_TOL;
    Ok(StabilityReport { m, base_upper: base.value, amplified_upper, own_amplified_upper: own.value, compressed_upper, upper_s, upper_amplified, passed })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertifiedThetaBounds {
    pub theta_lower: f64,
    pub theta_upper: f64,
    pub theta_hat_upper: f64,
}

impl CertifiedThetaBounds {
    fn max_shift(&self, other: &Self) -> f64 {
        [
            (self.theta_lower - other.theta_lower).abs(),
            (self.theta_upper - other.theta_upper).abs(),
            (self.theta_hat_upper - other.theta_hat_upper).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub eps: f64,
    pub base: CertifiedThetaBounds,
    pub perturbed: CertifiedThetaBounds,
    /// Channels of the base ensemble that were projected into C(S').
    pub transferred: usize,
    pub max_shift: f64,
    pub passed: bool,
}

/// Moves every channel of `e` into C(s) with [`transfer_channel`]. Output caps
/// grow to `md + d`; channels that fail to transfer are skipped.
pub fn transfer_ensemble(e: &ChannelEnsemble, s: &OperatorSystem) -> Result<(ChannelEnsemble, Vec<Option<TransferredChannel>>)> {
    let d = s.dim_h();
    let cap = e.channels.iter().map(|c| c.kraus().len() * d + d).max().unwrap_or(d).max(d * d);
    let mut out = ChannelEnsemble::with_max_output(s.clone(), cap, Vec::new())?;
    let mut moved = Vec::with_capacity(e.len());
    for (c, p) in e.channels.iter().zip(&e.provenance) {
        let t = transfer_channel(c, s).ok().filter(|t| out.push(t.channel.clone(), format!("{p}, transferred")).is_ok());
        moved.push(t);
    }
    Ok((out, moved))
}

fn certified(s: &OperatorSystem, e: &ChannelEnsemble, theta_hat: f64, opts: &LovaszOptions) -> Result<CertifiedThetaBounds> {
    Ok(CertifiedThetaBounds { theta_lower: theta_lower(s, e, opts)?.lower, theta_upper: theta_upper(e)?.value, theta_hat_upper: theta_hat })
}

/// Perturbs `S` by `eps` and compares the θ-type certified bounds. Ensemble
/// channels are carried over with [`transfer_channel`] and the best θ̂
/// certificate keeps its state. The integer parameters are excluded: they jump
/// under generic perturbation.
pub fn continuity_check(s: &OperatorSystem, eps: f64, tol: f64, opts: &LovaszOptions) -> Result<ContinuityReport> {
    let sp = perturb(s, eps, opts.seed.wrapping_add(17))?;
    let e = build_ensemble(s, opts)?;
    let cert = theta_hat_upper(&e, opts)?;
    let base = certified(s, &e, cert.value, opts)?;

    let (ep, _) = transfer_ensemble(&e, &sp)?;
    let t = transfer_channel(&cert.channel, &sp)?;
    let sigma = t.output_map.adjoint_mul(&cert.sigma.matmul(&t.output_map));
    let carried = evaluate_pair(&t.channel, &sigma)?;
    let fresh = theta_hat_upper(&ep, opts).map(|c| c.value).unwrap_or(f64::INFINITY);
    let perturbed = certified(&sp, &ep, carried.min(fresh), opts)?;

    let max_shift = base.max_shift(&perturbed);
    Ok(ContinuityReport { eps, base, perturbed, transferred: ep.len(), max_shift, passed: max_shift <= tol })
}
