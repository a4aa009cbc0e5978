//! Zero-error capacity brackets from independent families of tensor powers and θ̂.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bounds::{Certificate, Rigor};
use crate::channels::tensor_channel;
use crate::error::{Error, Result};
use crate::graphs::{self, lovasz_theta, strong_power, Graph};
use crate::linalg::{basis_vector, ComplexMatrix};
use crate::lovasz::seesaw::{evaluate_pair, theta_hat_for_channel};
use crate::lovasz::{build_ensemble, theta_hat_upper, LovaszOptions};
use crate::opsys::{tensor, tensor_power, OperatorSystem, Structure};
use crate::projections::{alpha_bounds, is_independent_set, search_independent_set, FindOptions, VERIFY_TOL};
use num_complex::Complex64 as C64;

/// Largest tensor-power dimension handled at all.
pub const POWER_DIMENSION_LIMIT: usize = 4096;
/// Largest tensor-power dimension where a fresh frame search is attempted.
pub const FRESH_SEARCH_LIMIT: usize = 16;
/// Largest dimension where families are checked directly against `S^{⊗n}`.
const DIRECT_VERIFY_LIMIT: usize = 64;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PowerEvidence {
    pub n: usize,
    pub alpha: usize,
    /// Rigor of `alpha` as an exact value; as a lower bound it is always rigorous.
    pub rigor: Rigor,
    /// How the family was obtained.
    pub source: String,
    /// Checked directly against `S^{⊗n}`, or as a product of checked factors.
    pub verified: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubmultiplicativityAudit {
    pub factor_upper: f64,
    /// `1/λ_min` of `(Φ⊗Φ)*(σ⊗σ)` for the factor certificate `(Φ, σ)`.
    pub product_upper: f64,
    /// Re-optimized σ for `Φ⊗Φ`, when small enough.
    pub refined_upper: Option<f64>,
    pub membership_residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CapacityBracket {
    /// Power at which `lower` is attained.
    pub best_n: usize,
    pub powers: Vec<PowerEvidence>,
    pub lower: f64,
    pub upper: f64,
    pub upper_rigor: Rigor,
    pub upper_certificate: Certificate,
    pub audit: Option<SubmultiplicativityAudit>,
}

impl CapacityBracket {
    fn from_powers(powers: Vec<PowerEvidence>, upper: f64, upper_certificate: Certificate) -> Self {
        let (best_n, lower) = powers
            .iter()
            .map(|p| (p.n, (p.alpha as f64).powf(1.0 / p.n as f64)))
            .fold((1, 1.0), |acc, x| if x.1 > acc.1 + 1e-12 { x } else { acc });
        Self { best_n, powers, lower, upper, upper_rigor: Rigor::Rigorous, upper_certificate, audit: None }
    }

    pub fn is_consistent(&self) -> bool {
        self.lower <= self.upper + 1e-6
    }

    /// `α(n+m) ≥ α(n)α(m)` for every recorded pair and `α(n) ≤ lower^n`.
    pub fn sanity(&self) -> bool {
        let by_n: BTreeMap<usize, usize> = self.powers.iter().map(|p| (p.n, p.alpha)).collect();
        let supermult = by_n.iter().all(|(&a, &x)| by_n.iter().all(|(&b, &y)| by_n.get(&(a + b)).is_none_or(|&z| z >= x * y)));
        supermult && self.powers.iter().all(|p| p.alpha as f64 <= self.lower.powi(p.n as i32) * (1.0 + 1e-9))
    }
}

fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

fn product_family(a: &[Vec<C64>], b: &[Vec<C64>]) -> Vec<Vec<C64>> {
    a.iter().flat_map(|x| b.iter().map(move |y| kron_vec(x, y))).collect()
}

/// A verified S-independent family realising the lower end of [`alpha_bounds`].
fn base_family(s: &OperatorSystem, opts: &FindOptions) -> Result<Vec<Vec<C64>>> {
    let d = s.dim_h();
    let fam = match s.structure() {
        Structure::Graph(g) if g.n() <= graphs::exact::ALPHA_LIMIT => graphs::maximum_independent_set(&g)?.into_iter().map(|v| basis_vector(d, v)).collect(),
        Structure::Scalars => (0..d).map(|i| basis_vector(d, i)).collect(),
        Structure::Full | Structure::SFamily(_) => vec![basis_vector(d, 0)],
        Structure::Graph(_) | Structure::General => match alpha_bounds(s, opts).lower_certificate {
            Certificate::Vectors { vectors, .. } => vectors.columns(),
            _ => vec![basis_vector(d, 0)],
        },
    };
    Ok(fam)
}

struct PowerLadder {
    families: BTreeMap<usize, Vec<Vec<C64>>>,
    evidence: Vec<PowerEvidence>,
}

fn power_ladder(s: &OperatorSystem, max_power: usize, opts: &FindOptions) -> Result<PowerLadder> {
    let d = s.dim_h();
    let mut families: BTreeMap<usize, Vec<Vec<C64>>> = BTreeMap::new();
    let mut evidence = Vec::new();
    for n in 1..=max_power.max(1) {
        let dim = d.checked_pow(n as u32).filter(|&x| x <= POWER_DIMENSION_LIMIT);
        let Some(dim) = dim else { break };
        let sn = if dim <= DIRECT_VERIFY_LIMIT || n == 1 { Some(tensor_power(s, n)) } else { None };
        let (mut fam, mut source, mut rigor) = if n == 1 {
            let exact = !matches!(s.structure(), Structure::General | Structure::Graph(_)) || s.graph().is_some_and(|g| g.n() <= graphs::exact::ALPHA_LIMIT);
            (base_family(s, opts)?, "base family".to_string(), if exact { Rigor::Rigorous } else { Rigor::Heuristic })
        } else {
            // Product seeding over splits n = a + (n − a).
            let (a, b) = (1..n).map(|a| (a, n - a)).max_by_key(|(a, b)| families[a].len() * families[b].len()).expect("n ≥ 2");
            (product_family(&families[&a], &families[&b]), format!("product of powers {a} and {b}"), Rigor::Heuristic)
        };
        if n > 1 {
            if let Some(sn) = &sn {
                if let Structure::Graph(g) = sn.structure() {
                    if g.n() <= graphs::exact::ALPHA_LIMIT {
                        let set = graphs::maximum_independent_set(&g)?;
                        if set.len() >= fam.len() {
                            fam = set.into_iter().map(|v| basis_vector(dim, v)).collect();
                            source = "exact α of the strong power".into();
                            rigor = Rigor::Rigorous;
                        }
                    }
                } else if matches!(sn.structure(), Structure::Scalars | Structure::Full | Structure::SFamily(_)) {
                    rigor = Rigor::Rigorous;
                } else if dim <= FRESH_SEARCH_LIMIT {
                    for k in fam.len() + 1..=dim {
                        match search_independent_set(sn, k, opts) {
                            Some(f) => {
                                fam = f.vectors;
                                source = format!("frame search at size {k}");
                            }
                            None => break,
                        }
                    }
                }
            }
        }
        let verified = match &sn {
            Some(sn) => {
                if !is_independent_set(sn, &fam, VERIFY_TOL)? {
                    return Err(Error::Invalid(format!("family at power {n} failed verification")));
                }
                "direct".to_string()
            }
            None => "product of verified factors".to_string(),
        };
        evidence.push(PowerEvidence { n, alpha: fam.len(), rigor, source, verified });
        families.insert(n, fam);
    }
    Ok(PowerLadder { families, evidence })
}

/// Size of a verified independent family of `S^{⊗n}`, seeded by products of lower powers.
pub fn alpha_power_lower(s: &OperatorSystem, n: usize, seed: u64) -> Result<usize> {
    let ladder = power_ladder(s, n, &FindOptions::new(16, seed))?;
    ladder.families.get(&n).map(Vec::len).ok_or_else(|| Error::Invalid(format!("power {n} exceeds the dimension limit {POWER_DIMENSION_LIMIT}")))
}

/// Verified family behind [`alpha_power_lower`].
pub fn alpha_power_family(s: &OperatorSystem, n: usize, seed: u64) -> Result<Vec<Vec<C64>>> {
    let mut ladder = power_ladder(s, n, &FindOptions::new(16, seed))?;
    ladder.families.remove(&n).ok_or_else(|| Error::Invalid(format!("power {n} exceeds the dimension limit {POWER_DIMENSION_LIMIT}")))
}

/// `[max α(G^{⊠n})^{1/n}, θ(G)]`.
pub fn graph_capacity_bracket(g: &Graph, max_power: usize) -> Result<CapacityBracket> {
    let mut powers = Vec::new();
    let mut alphas: BTreeMap<usize, usize> = BTreeMap::new();
    for n in 1..=max_power.max(1) {
        let vertices = g.n().checked_pow(n as u32).filter(|&v| v <= POWER_DIMENSION_LIMIT);
        let Some(vertices) = vertices else { break };
        let seeded = (1..n).map(|a| alphas[&a] * alphas[&(n - a)]).max().unwrap_or(0);
        let (alpha, rigor, source) = if vertices <= graphs::exact::ALPHA_LIMIT {
            (graphs::independence_number(&strong_power(g, n))?, Rigor::Rigorous, "exact α of the strong power".to_string())
        } else {
            (seeded, Rigor::Heuristic, "product of lower powers".to_string())
        };
        alphas.insert(n, alpha.max(seeded));
        powers.push(PowerEvidence { n, alpha: alpha.max(seeded), rigor, source, verified: "vertex indicators".into() });
    }
    let th = lovasz_theta(g)?;
    Ok(CapacityBracket::from_powers(powers, th.dual_value.max(th.value), Certificate::Exact { reason: "θ(G) bounds the Shannon capacity".into() }))
}

/// `[max α(S^{⊗n})^{1/n}, θ̂(S)]` with a certificate-level audit of `θ̂(S⊗S) ≤ θ̂(S)²`.
pub fn system_capacity_bracket(s: &OperatorSystem, max_power: usize, opts: &LovaszOptions) -> Result<CapacityBracket> {
    let ladder = power_ladder(s, max_power, &opts.find())?;
    let ensemble = build_ensemble(s, opts)?;
    let cert = theta_hat_upper(&ensemble, opts)?;
    let mut b = CapacityBracket::from_powers(
        ladder.evidence,
        cert.value,
        Certificate::ChannelState { kraus: cert.channel.kraus().to_vec(), sigma: cert.sigma.clone() },
    );
    b.audit = Some(submultiplicativity_audit(s, s, &cert.channel, &cert.sigma, &cert.channel, &cert.sigma)?);
    Ok(b)
}

/// Evaluates `(Φ₁⊗Φ₂, σ₁⊗σ₂)` as a θ̂ certificate for `S₁⊗S₂`.
pub fn submultiplicativity_audit(
    s1: &OperatorSystem,
    s2: &OperatorSystem,
    phi1: &crate::channels::QuantumChannel,
    sigma1: &ComplexMatrix,
    phi2: &crate::channels::QuantumChannel,
    sigma2: &ComplexMatrix,
) -> Result<SubmultiplicativityAudit> {
    let a = evaluate_pair(phi1, sigma1)?;
    let b = evaluate_pair(phi2, sigma2)?;
    let product = tensor_channel(phi1, phi2);
    let st = tensor(s1, s2);
    let membership_residual = product.membership_residual(&st)?;
    let product_upper = evaluate_pair(&product, &sigma1.kron(sigma2))?;
    let refined_upper = if product.k() <= 9 { Some(theta_hat_for_channel(&product)?.0) } else { None };
    let passed = membership_residual <= crate::channels::CHANNEL_TOL
        && product_upper <= a * b * (1.0 + 1e-9) + 1e-6
        && refined_upper.is_none_or(|r| r <= product_upper + 1e-6);
    Ok(SubmultiplicativityAudit { factor_upper: a.max(b), product_upper, refined_upper, membership_residual, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opsys::{from_graph, s_family};

    #[test]
    fn pentagon_bracket_collapses() {
        let b = graph_capacity_bracket(&Graph::cycle(5), 2).unwrap();
        assert_eq!(b.powers[1].alpha, 5);
        assert!((b.lower - 5f64.sqrt()).abs() < 1e-12);
        assert!(b.upper >= b.lower - 1e-6 && b.upper <= 5f64.sqrt() + 1e-3);
        assert_eq!(b.best_n, 2);
        assert!(b.sanity());
    }

    #[test]
    fn trivial_graph_brackets() {
        let b = graph_capacity_bracket(&Graph::complete(4), 2).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-12 && (b.upper - 1.0).abs() < 1e-6);
        let b = graph_capacity_bracket(&Graph::empty(3), 2).unwrap();
        assert!((b.lower - 3.0).abs() < 1e-12 && (b.upper - 3.0).abs() < 1e-6);
    }

    #[test]
    fn power_families() {
        assert!(alpha_power_lower(&from_graph(&Graph::cycle(5)), 2, 0).unwrap() >= 5);
        assert_eq!(alpha_power_lower(&OperatorSystem::scalars(2), 2, 0).unwrap(), 4);
        assert_eq!(alpha_power_lower(&OperatorSystem::scalars(3), 2, 0).unwrap(), 9);
        assert!(alpha_power_lower(&OperatorSystem::scalars(2), 13, 0).is_err());
    }

    #[test]
    fn scalar_system_bracket() {
        let b = system_capacity_bracket(&OperatorSystem::scalars(2), 2, &LovaszOptions { budget: 0, ..Default::default() }).unwrap();
        assert!((b.lower - 2.0).abs() < 1e-9 && (b.upper - 2.0).abs() < 1e-6, "{b:?}");
        assert!(b.audit.unwrap().passed);
    }

    #[test]
    fn s_family_audit() {
        let s = s_family(&[2]).unwrap();
        let b = system_capacity_bracket(&s, 2, &LovaszOptions { budget: 1, ..Default::default() }).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-12);
        assert!(b.upper <= 2.0 + 1e-6);
        assert!(b.audit.as_ref().unwrap().passed, "{:?}", b.audit);
        assert!(b.is_consistent());
    }
}
