//! Finite families of validated members of C(S).

use serde::{Deserialize, Serialize};

use super::LovaszOptions;
use crate::channels::{channel_from_full_projection, channel_from_labelling, random_channel_in_c, QuantumChannel, CHANNEL_TOL};
use crate::corners::{fp_corner, CornerOptions};
use crate::error::{Error, Result};
use crate::graphs::{self, labelling_from_clique_cover, optimal_labelling};
use crate::opsys::OperatorSystem;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelEnsemble {
    pub system: OperatorSystem,
    pub channels: Vec<QuantumChannel>,
    pub provenance: Vec<String>,
    /// Largest accepted output dimension after compression (default `d²`).
    pub max_output: usize,
}

impl ChannelEnsemble {
    /// Validates `S_Φ ⊆ S` and the output cap `k ≤ d²` for every member.
    pub fn new(system: OperatorSystem, members: Vec<(QuantumChannel, String)>) -> Result<Self> {
        let d = system.dim_h();
        Self::with_max_output(system, d * d, members)
    }

    pub fn with_max_output(system: OperatorSystem, max_output: usize, members: Vec<(QuantumChannel, String)>) -> Result<Self> {
        let mut e = Self { system, channels: Vec::new(), provenance: Vec::new(), max_output };
        for (c, p) in members {
            e.push(c, p)?;
        }
        Ok(e)
    }

    pub fn push(&mut self, c: QuantumChannel, provenance: impl Into<String>) -> Result<()> {
        let d = self.system.dim_h();
        if c.d() != d {
            return Err(Error::shape(format!("channel on M_{d}"), format!("M_{}", c.d())));
        }
        let c = if c.k() > self.max_output { c.compress_output() } else { c };
        if c.k() > self.max_output {
            return Err(Error::Invalid(format!("output dimension {} exceeds the cap {}", c.k(), self.max_output)));
        }
        let r = c.membership_residual(&self.system)?;
        if r > CHANNEL_TOL {
            return Err(Error::Invalid(format!("channel is not in C(S): residual {r:.2e}")));
        }
        self.channels.push(c);
        self.provenance.push(provenance.into());
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }
}

/// Identity channel, full-projection channels for the generators of `fp(S)`,
/// labelling channels for graph systems, and `budget` random members.
pub fn build_ensemble(s: &OperatorSystem, opts: &LovaszOptions) -> Result<ChannelEnsemble> {
    let d = s.dim_h();
    let cap = opts.max_output.unwrap_or(d * d).max(1);
    let mut e = ChannelEnsemble::with_max_output(s.clone(), cap, Vec::new())?;
    if d <= cap {
        e.push(QuantumChannel::identity(d), "identity")?;
    }
    let corner = fp_corner(s, &CornerOptions { samples: 2, find: opts.find() })?;
    for (i, g) in corner.generators.iter().enumerate() {
        // Harvested generators are projections; skip anything that is not.
        if let Ok(c) = channel_from_full_projection(s, g.matrix(), None) {
            let _ = e.push(c.compress_output(), format!("full projection #{i} (rank {})", g.matrix().trace().re.round()));
        }
    }
    if let Some(g) = s.graph() {
        if g.n() <= graphs::theta::THETA_LIMIT {
            if let Ok(lab) = optimal_labelling(&g) {
                if let Ok(c) = channel_from_labelling(&lab) {
                    let _ = e.push(c, "optimal orthogonal labelling");
                }
            }
        }
        if g.n() <= graphs::exact::CHI_LIMIT {
            let cover = graphs::color_classes(&graphs::complement(&g))?;
            let lab = labelling_from_clique_cover(&g, &cover)?;
            let _ = e.push(channel_from_labelling(&lab)?, "minimum clique cover labelling");
        }
    }
    for i in 0..opts.budget {
        let m = 2 + i % 2;
        if let Some(c) = random_channel_in_c(s, d, m, opts.seed.wrapping_add(i as u64), 4) {
            let _ = e.push(c, format!("random member #{i} ({m} Kraus operators)"));
        }
    }
    // Narrow outputs (partial traces and the like) are rarely reached from width d.
    if s.graph().is_none() {
        for k in 2..d.min(8) {
            if let Some(c) = random_channel_in_c(s, k, d.div_ceil(k), opts.seed.wrapping_add(2000 + k as u64), 4) {
                let _ = e.push(c, format!("random member with output dimension {k}"));
            }
        }
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::Graph;
    use crate::opsys::from_graph;

    #[test]
    fn ensembles_of_special_systems() {
        let opts = LovaszOptions { budget: 2, ..Default::default() };
        let full = OperatorSystem::full(3);
        let e = build_ensemble(&full, &opts).unwrap();
        assert!(e.channels.iter().any(|c| c.compress_output().k() == 1));
        let c5 = build_ensemble(&from_graph(&Graph::cycle(5)), &opts).unwrap();
        assert!(c5.len() >= 6);
        let ci = OperatorSystem::scalars(3);
        let e = build_ensemble(&ci, &opts).unwrap();
        for c in &e.channels {
            for a in c.kraus() {
                for b in c.kraus() {
                    let m = a.adjoint_mul(b);
                    let tr = m.trace() / 3.0;
                    assert!((&m - &crate::linalg::ComplexMatrix::identity(3).scale(tr)).max_abs() < 1e-7);
                }
            }
        }
    }

    #[test]
    fn rejects_foreign_channels() {
        let s = OperatorSystem::scalars(2);
        let mut e = ChannelEnsemble::new(s, vec![]).unwrap();
        let p0 = crate::linalg::ComplexMatrix::unit(2, 0, 0);
        let p1 = crate::linalg::ComplexMatrix::unit(2, 1, 1);
        let pinch = QuantumChannel::new(vec![p0, p1]).unwrap();
        assert!(e.push(pinch, "pinching").is_err());
    }
}
