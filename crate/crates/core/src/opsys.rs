//! Operator systems `S ⊆ M_d`: construction, validation and structure detection.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{self, Graph};
use crate::linalg::{orth_complement, subspace_from_spanning, tensor_subspace, ComplexMatrix, OperatorSubspace, MEMBERSHIP_TOL, RANK_TOL};

/// How a system was built; used to dispatch exact algorithms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Graph { graph: Graph },
    SFamily { sizes: Vec<usize> },
    Channel,
    Tensor { factors: Vec<Provenance> },
    Amplified { m: usize, base: Box<Provenance> },
    Raw,
}

/// Structural class of a system, as used by exact dispatch.
#[derive(Clone, Debug, PartialEq)]
pub enum Structure {
    /// `S = S_G` in the standard basis.
    Graph(Graph),
    /// `S = S_{n₁} ⊗ ⋯ ⊗ S_{n_m}`.
    SFamily(Vec<usize>),
    /// `ℂ I_d`.
    Scalars,
    /// `M_d`.
    Full,
    General,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    /// Relative distance of `I` from the subspace.
    pub identity_residual: f64,
    /// Worst distance of `B*` from the subspace over basis elements `B`.
    pub adjoint_residual: f64,
}

/// An operator system: contains `I`, closed under adjoints.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "SystemJson", into = "SystemJson")]
pub struct OperatorSystem {
    subspace: OperatorSubspace,
    provenance: Provenance,
    perp: OnceLock<OperatorSubspace>,
    herm: OnceLock<Vec<ComplexMatrix>>,
}

#[derive(Serialize, Deserialize)]
struct SystemJson {
    #[serde(flatten)]
    subspace: OperatorSubspace,
    #[serde(default = "raw")]
    provenance: Provenance,
}

fn raw() -> Provenance {
    Provenance::Raw
}

impl From<OperatorSystem> for SystemJson {
    fn from(s: OperatorSystem) -> Self {
        SystemJson { subspace: s.subspace, provenance: s.provenance }
    }
}

impl TryFrom<SystemJson> for OperatorSystem {
    type Error = Error;
    // A claimed provenance is only kept if the subspace matches it.
    fn try_from(j: SystemJson) -> Result<Self> {
        let claimed = j.provenance;
        let s = OperatorSystem::new(j.subspace, Provenance::Raw)?;
        let rebuilt = match &claimed {
            Provenance::Graph { graph } if graph.n() == s.dim_h() => Some(from_graph(graph)),
            Provenance::SFamily { sizes } => s_family(sizes).ok(),
            _ => None,
        };
        let provenance = match rebuilt {
            Some(r) if r.same_as(&s) => claimed,
            Some(_) => Provenance::Raw,
            None => match claimed {
                Provenance::Graph { .. } | Provenance::SFamily { .. } => Provenance::Raw,
                other => other,
            },
        };
        Ok(s.with_provenance(provenance))
    }
}

/// Checks both defining conditions of an operator system.
pub fn validate(s: &OperatorSubspace) -> ValidationReport {
    let d = s.ambient_dim();
    let id = ComplexMatrix::identity(d);
    let identity_residual = if d == 0 { 0.0 } else { s.distance(&id).unwrap_or(f64::INFINITY) / (d as f64).sqrt() };
    let adjoint_residual = s.adjoint_residual();
    ValidationReport { ok: identity_residual <= MEMBERSHIP_TOL && adjoint_residual <= MEMBERSHIP_TOL, identity_residual, adjoint_residual }
}

impl OperatorSystem {
    pub fn new(subspace: OperatorSubspace, provenance: Provenance) -> Result<Self> {
        let r = validate(&subspace);
        if !r.ok {
            return Err(Error::NotOperatorSystem(format!(
                "identity residual {:.3e}, adjoint residual {:.3e}",
                r.identity_residual, r.adjoint_residual
            )));
        }
        Ok(Self::new_unchecked(subspace, provenance))
    }

    fn new_unchecked(subspace: OperatorSubspace, provenance: Provenance) -> Self {
        Self { subspace, provenance, perp: OnceLock::new(), herm: OnceLock::new() }
    }

    /// System spanned by the given matrices.
    pub fn from_spanning(mats: &[ComplexMatrix]) -> Result<Self> {
        Self::new(subspace_from_spanning(mats, RANK_TOL)?, Provenance::Raw)
    }

    pub fn scalars(d: usize) -> Self {
        Self::new_unchecked(OperatorSubspace::scalars(d), Provenance::Raw)
    }

    pub fn full(d: usize) -> Self {
        Self::new_unchecked(OperatorSubspace::full(d), Provenance::Raw)
    }

    fn with_provenance(mut self, p: Provenance) -> Self {
        self.provenance = p;
        self
    }

    /// Dimension `d` of the underlying Hilbert space.
    pub fn dim_h(&self) -> usize {
        self.subspace.ambient_dim()
    }

    /// Dimension of `S` as a vector space.
    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }

    pub fn subspace(&self) -> &OperatorSubspace {
        &self.subspace
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// `S⊥`, computed once.
    pub fn perp(&self) -> &OperatorSubspace {
        self.perp.get_or_init(|| orth_complement(&self.subspace))
    }

    /// Real basis of the hermitian part of `S`, orthonormal for `Tr(AB)`.
    pub fn hermitian_basis(&self) -> &[ComplexMatrix] {
        self.herm.get_or_init(|| self.subspace.hermitian_basis())
    }

    pub fn contains(&self, a: &ComplexMatrix, tol: f64) -> Result<bool> {
        self.subspace.contains(a, tol)
    }

    pub fn same_as(&self, other: &OperatorSystem) -> bool {
        self.subspace.same_as(&other.subspace, MEMBERSHIP_TOL)
    }

    pub fn structure(&self) -> Structure {
        let d = self.dim_h();
        match &self.provenance {
            Provenance::Graph { graph } => return Structure::Graph(graph.clone()),
            Provenance::SFamily { sizes } => return Structure::SFamily(sizes.clone()),
            _ => {}
        }
        if self.dim() == 1 {
            return Structure::Scalars;
        }
        if self.dim() == d * d {
            return Structure::Full;
        }
        if let Some(g) = detect_graph_structure(self) {
            return Structure::Graph(g);
        }
        Structure::General
    }

    pub fn graph(&self) -> Option<Graph> {
        match self.structure() {
            Structure::Graph(g) => Some(g),
            _ => None,
        }
    }
}

/// `S_G = span{e_x e_y* : x ≃ y}`.
pub fn from_graph(g: &Graph) -> OperatorSystem {
    let n = g.n();
    let mut basis = Vec::with_capacity(n + 2 * g.num_edges());
    for x in 0..n {
        for y in 0..n {
            if g.confusable(x, y) {
                basis.push(ComplexMatrix::unit(n, x, y));
            }
        }
    }
    OperatorSystem::new_unchecked(OperatorSubspace::from_orthonormal(n, basis), Provenance::Graph { graph: g.clone() })
}

/// `S^c = S⊥ + ℂI`.
pub fn complement(s: &OperatorSystem) -> OperatorSystem {
    let d = s.dim_h();
    let mut mats: Vec<ComplexMatrix> = vec![ComplexMatrix::identity(d)];
    mats.extend(s.perp().basis().iter().cloned());
    let sub = subspace_from_spanning(&mats, RANK_TOL).expect("nonempty spanning set");
    OperatorSystem::new_unchecked(sub, Provenance::Raw)
}

pub fn tensor(s1: &OperatorSystem, s2: &OperatorSystem) -> OperatorSystem {
    let sub = tensor_subspace(&s1.subspace, &s2.subspace);
    let provenance = match (&s1.provenance, &s2.provenance) {
        (Provenance::Graph { graph: g }, Provenance::Graph { graph: h }) => Provenance::Graph { graph: graphs::strong_product(g, h) },
        (Provenance::SFamily { sizes: a }, Provenance::SFamily { sizes: b }) => {
            Provenance::SFamily { sizes: a.iter().chain(b).copied().collect() }
        }
        (a, b) => Provenance::Tensor { factors: vec![a.clone(), b.clone()] },
    };
    OperatorSystem::new_unchecked(sub, provenance)
}

/// `S^{⊗n}`.
pub fn tensor_power(s: &OperatorSystem, n: usize) -> OperatorSystem {
    let mut p = s.clone();
    for _ in 1..n.max(1) {
        p = tensor(&p, s);
    }
    p
}

/// `M_m(S) = M_m ⊗ S` (block index is the first tensor factor).
pub fn amplify(s: &OperatorSystem, m: usize) -> OperatorSystem {
    let full = OperatorSubspace::full(m);
    let sub = tensor_subspace(&full, &s.subspace);
    OperatorSystem::new_unchecked(sub, Provenance::Amplified { m, base: Box::new(s.provenance.clone()) })
}

/// `S_n = span{e_i e_j* (i ≠ j), I}`.
pub fn s_n(n: usize) -> Result<OperatorSystem> {
    if n < 2 {
        return Err(Error::Invalid(format!("S_n requires n ≥ 2, got {n}")));
    }
    let mut basis = vec![ComplexMatrix::identity(n).scale_re(1.0 / (n as f64).sqrt())];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                basis.push(ComplexMatrix::unit(n, i, j));
            }
        }
    }
    Ok(OperatorSystem::new_unchecked(OperatorSubspace::from_orthonormal(n, basis), Provenance::SFamily { sizes: vec![n] }))
}

/// `S_{n₁} ⊗ ⋯ ⊗ S_{n_m}`.
pub fn s_family(sizes: &[usize]) -> Result<OperatorSystem> {
    let (first, rest) = sizes.split_first().ok_or(Error::EmptyInput("s_family sizes"))?;
    let mut s = s_n(*first)?;
    for &n in rest {
        s = tensor(&s, &s_n(n)?);
    }
    Ok(s)
}

/// `S_Φ = span{A_p* A_q}` for a Kraus family.
pub fn from_kraus(kraus: &[ComplexMatrix]) -> Result<OperatorSystem> {
    let first = kraus.first().ok_or(Error::EmptyInput("Kraus operators"))?;
    let d = first.cols();
    let mut mats = Vec::with_capacity(kraus.len() * kraus.len());
    for a in kraus {
        if a.cols() != d || a.rows() != first.rows() {
            return Err(Error::shape(format!("{}x{d} Kraus operator", first.rows()), format!("{:?}", a.shape())));
        }
    }
    for a in kraus {
        for b in kraus {
            mats.push(a.adjoint_mul(b));
        }
    }
    let sub = subspace_from_spanning(&mats, RANK_TOL)?;
    OperatorSystem::new(sub, Provenance::Channel)
}

/// Generic perturbation: every non-identity direction of the hermitian basis is
/// moved by `eps` times a random unit hermitian matrix. The result keeps `I`,
/// stays adjoint-closed and has the same dimension.
pub fn perturb(s: &OperatorSystem, eps: f64, seed: u64) -> Result<OperatorSystem> {
    use rand::SeedableRng;
    let d = s.dim_h();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let id = ComplexMatrix::identity(d);
    let id_n = id.scale_re(1.0 / (d as f64).sqrt());
    // Traceless part of S, re-orthonormalized so it has dimension dim(S) − 1.
    let traceless: Vec<ComplexMatrix> = s
        .hermitian_basis()
        .iter()
        .map(|h| {
            let mut h = h.clone();
            h.axpy(crate::linalg::matrix::re(-h.real_pairing(&id_n)), &id_n);
            h
        })
        .filter(|h| h.fro_norm() > RANK_TOL)
        .collect();
    if traceless.is_empty() {
        // ℂI_d has no traceless directions to move.
        return Ok(s.clone());
    }
    let traceless = subspace_from_spanning(&traceless, RANK_TOL)?.hermitian_basis();
    let mut mats = vec![id];
    for h in traceless {
        let r = crate::linalg::random::random_hermitian(d, &mut rng);
        let r = r.scale_re(1.0 / r.fro_norm());
        mats.push(&h + &r.scale_re(eps));
    }
    let out = OperatorSystem::from_spanning(&mats)?;
    if out.dim() != s.dim() {
        return Err(Error::Invalid(format!("perturbation changed the dimension: {} -> {}", s.dim(), out.dim())));
    }
    Ok(out)
}

/// Returns `G` if `S = S_G` in the standard basis.
pub fn detect_graph_structure(s: &OperatorSystem) -> Option<Graph> {
    let d = s.dim_h();
    let mut adj = vec![vec![false; d]; d];
    let mut count = 0;
    for x in 0..d {
        for y in 0..d {
            if s.subspace.distance_unchecked(&ComplexMatrix::unit(d, x, y)) <= MEMBERSHIP_TOL {
                if x == y {
                    count += 1;
                } else {
                    adj[x][y] = true;
                    count += 1;
                }
            } else if x == y {
                return None;
            }
        }
    }
    if count != s.dim() {
        return None;
    }
    Graph::from_adjacency(adj).ok()
}

/// `S = span{I} + span{E_ij : (i,j) ∈ units}` in the standard basis.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitPattern {
    pub units: Vec<(usize, usize)>,
}

pub fn detect_unit_pattern(s: &OperatorSystem) -> Option<UnitPattern> {
    let d = s.dim_h();
    let mut units = Vec::new();
    for x in 0..d {
        for y in 0..d {
            if s.subspace.distance_unchecked(&ComplexMatrix::unit(d, x, y)) <= MEMBERSHIP_TOL {
                units.push((x, y));
            }
        }
    }
    let diag = units.iter().filter(|(x, y)| x == y).count();
    let expected = units.len() + usize::from(diag < d);
    (expected == s.dim()).then_some(UnitPattern { units })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::random_unitary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(d: usize, i: usize, j: usize) -> ComplexMatrix {
        ComplexMatrix::unit(d, i, j)
    }

    #[test]
    fn perturbation_stays_close() {
        let s = from_graph(&Graph::cycle(5));
        let p = perturb(&s, 1e-3, 7).unwrap();
        assert_eq!(p.dim(), s.dim());
        assert!(p.structure() == Structure::General);
        assert!(s.subspace().containment_residual(p.subspace()) < 1e-2);
        assert!(p.contains(&ComplexMatrix::identity(5), 1e-9).unwrap());
    }

    #[test]
    fn validation_examples() {
        assert!(validate(&OperatorSubspace::scalars(3)).ok);
        let bad = subspace_from_spanning(&[e(2, 0, 1), ComplexMatrix::identity(2)], RANK_TOL).unwrap();
        let r = validate(&bad);
        assert!(!r.ok && r.adjoint_residual > 0.5 && r.identity_residual < 1e-12);
        assert!(validate(from_graph(&Graph::cycle(5)).subspace()).ok);
    }

    #[test]
    fn graph_system_dimensions() {
        assert_eq!(from_graph(&Graph::empty(4)).dim(), 4);
        assert!(from_graph(&Graph::complete(3)).subspace().same_as(&OperatorSubspace::full(3), 1e-12));
        assert_eq!(from_graph(&Graph::cycle(5)).dim(), 15);
        assert_eq!(from_graph(&Graph::cycle(5)).perp().dim(), 10);
    }

    #[test]
    fn complements() {
        assert!(complement(&OperatorSystem::full(3)).same_as(&OperatorSystem::scalars(3)));
        assert!(complement(&OperatorSystem::scalars(3)).same_as(&OperatorSystem::full(3)));
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..5 {
            let g = Graph::random(6, 0.5, &mut rng);
            let sg = from_graph(&g);
            let raw = OperatorSystem::new(sg.subspace().clone(), Provenance::Raw).unwrap();
            let c = complement(&raw);
            // S_G^c = span{e_x e_y* : x ≠ y, x ≁ y} + ℂI, which is smaller than S_{G^c}.
            let mut expected = vec![ComplexMatrix::identity(6)];
            for (x, y) in graphs::complement(&g).edges() {
                expected.push(e(6, x, y));
                expected.push(e(6, y, x));
            }
            assert!(c.same_as(&OperatorSystem::from_spanning(&expected).unwrap()));
            assert!(complement(&c).same_as(&sg));
            assert!(from_graph(&graphs::complement(&g)).contains(&c.subspace().basis()[0], 1e-10).unwrap());
        }
    }

    #[test]
    fn tensor_and_amplify() {
        let a = amplify(&OperatorSystem::scalars(3), 2);
        assert_eq!(a.dim(), 4);
        assert!(tensor(&OperatorSystem::scalars(2), &OperatorSystem::scalars(3)).same_as(&OperatorSystem::scalars(6)));
        let sg = from_graph(&Graph::cycle(5));
        assert!(tensor(&sg, &OperatorSystem::scalars(1)).same_as(&sg));
        assert!(validate(amplify(&sg, 2).subspace()).ok);
    }

    #[test]
    fn s_family_dimensions() {
        assert_eq!(s_family(&[2]).unwrap().dim(), 3);
        assert_eq!(s_family(&[3]).unwrap().dim(), 7);
        assert_eq!(s_family(&[2, 2]).unwrap().dim(), 9);
        for sizes in [vec![2, 3], vec![3, 3], vec![2, 2, 2], vec![2, 3, 2]] {
            let expected: usize = sizes.iter().map(|n| n * n - n + 1).product();
            let s = s_family(&sizes).unwrap();
            assert_eq!(s.dim(), expected);
            assert!(validate(s.subspace()).ok);
        }
        assert!(s_family(&[1]).is_err());
    }

    #[test]
    fn channel_graphs() {
        // Identity channel: S_Φ = ℂI.
        let s = from_kraus(&[ComplexMatrix::identity(3)]).unwrap();
        assert!(s.same_as(&OperatorSystem::scalars(3)));
        // Completely depolarizing channel: S_Φ = M_d.
        let d = 3;
        let kraus: Vec<_> = (0..d).flat_map(|i| (0..d).map(move |j| ComplexMatrix::unit(d, i, j).scale_re(1.0 / (d as f64).sqrt()))).collect();
        assert!(from_kraus(&kraus).unwrap().same_as(&OperatorSystem::full(d)));
    }

    #[test]
    fn graph_detection() {
        let g = Graph::cycle(5);
        let sg = from_graph(&g);
        let raw = OperatorSystem::new(sg.subspace().clone(), Provenance::Raw).unwrap();
        assert_eq!(detect_graph_structure(&raw), Some(g));
        assert_eq!(detect_graph_structure(&OperatorSystem::scalars(2)), None);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(5, &mut rng);
        let rotated: Vec<_> = sg.subspace().basis().iter().map(|b| u.matmul(b).mul_adjoint(&u)).collect();
        let rs = OperatorSystem::from_spanning(&rotated).unwrap();
        assert_eq!(detect_graph_structure(&rs), None);
    }

    #[test]
    fn unit_pattern() {
        let d = 3;
        let mats = vec![ComplexMatrix::identity(d), e(d, 0, 1), e(d, 0, 2), e(d, 1, 0), e(d, 2, 0)];
        let s = OperatorSystem::from_spanning(&mats).unwrap();
        let p = detect_unit_pattern(&s).unwrap();
        assert_eq!(p.units, vec![(0, 1), (0, 2), (1, 0), (2, 0)]);
        assert_eq!(s.structure(), Structure::General);
    }

    #[test]
    fn json_provenance_checked() {
        let sg = from_graph(&Graph::cycle(4));
        let js = serde_json::to_string(&sg).unwrap();
        let back: OperatorSystem = serde_json::from_str(&js).unwrap();
        assert_eq!(back.provenance(), sg.provenance());
        // A false provenance claim is dropped.
        let mut v: serde_json::Value = serde_json::from_str(&js).unwrap();
        v["provenance"] = serde_json::json!({"kind": "graph", "graph": {"n": 4, "edges": [[0, 1]]}});
        let back: OperatorSystem = serde_json::from_value(v).unwrap();
        assert_eq!(back.provenance(), &Provenance::Raw);
        // Still recognized structurally.
        assert_eq!(back.graph(), Some(Graph::cycle(4)));
    }
}
