//! Convex corners given by generators, anti-blockers, the θ functional, the
//! ap/cp/fp corners and the fractional parameters ω_f, κ and φ.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{BoundInterval, Certificate, Rigor};
use crate::error::{Error, Result};
use crate::graphs::{self, Graph};
use crate::linalg::random::random_unit_vector;
use crate::linalg::{lambda_max, lambda_min, vdot, ComplexMatrix, HermitianOperator};
use crate::opsys::{detect_unit_pattern, OperatorSystem, Structure};
use crate::projections::{
    self, adversarial_pairing, family_search, is_abelian_projection, is_independent_set, pattern_has_rank_one_full, FamilyKind,
    FindOptions, ProjectionKind,
};
use crate::solvers::{self, BlockData, BlockKind, ConstraintSense, LmiProblem, SemidefiniteProgram};

const PSD_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Semantics {
    /// `her(conv(generators))`.
    Hull,
    /// `{T ⪰ 0 : Tr(T G) ≤ 1 for every generator G}`.
    Antiblocker,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Completeness {
    /// The generators generate the intended corner.
    Exact,
    /// The generators are diagonal and give the intended corner's diagonal part;
    /// trace functionals of the corner and of its anti-blocker are exact.
    DiagonalExact,
    /// A sample of the intended generating set.
    Sampled,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvexCorner {
    pub d: usize,
    pub semantics: Semantics,
    /// True only for [`Completeness::Exact`].
    pub complete: bool,
    pub completeness: Completeness,
    pub generators: Vec<HermitianOperator>,
}

impl ConvexCorner {
    pub fn new(d: usize, semantics: Semantics, completeness: Completeness, generators: Vec<HermitianOperator>) -> Result<Self> {
        for g in &generators {
            if g.dim() != d {
                return Err(Error::shape(format!("{d}x{d} generator"), format!("{}", g.dim())));
            }
            if g.eig().min() < -PSD_TOL {
                return Err(Error::Invalid("corner generators must be positive semidefinite".into()));
            }
        }
        Ok(Self { d, semantics, complete: completeness == Completeness::Exact, completeness, generators })
    }

    pub fn hull(d: usize, completeness: Completeness, generators: Vec<HermitianOperator>) -> Result<Self> {
        Self::new(d, Semantics::Hull, completeness, generators)
    }

    /// The same generators read with the other semantics.
    pub fn antiblocker(&self) -> Self {
        let semantics = match self.semantics {
            Semantics::Hull => Semantics::Antiblocker,
            Semantics::Antiblocker => Semantics::Hull,
        };
        Self { semantics, ..self.clone() }
    }

    pub fn matrices(&self) -> Vec<ComplexMatrix> {
        self.generators.iter().map(|g| g.matrix().clone()).collect()
    }

    pub fn contains(&self, t: &ComplexMatrix, tol: f64) -> Result<bool> {
        match self.semantics {
            Semantics::Hull => hull_membership(self, t, tol),
            Semantics::Antiblocker => antiblocker_membership(&self.matrices(), t, tol),
        }
    }
}

fn check_square(d: usize, t: &ComplexMatrix) -> Result<()> {
    if t.shape() != (d, d) {
        return Err(Error::shape(format!("{d}x{d}"), format!("{:?}", t.shape())));
    }
    Ok(())
}

/// `T ∈ her(conv(G_i))`: feasibility of `λ ≥ 0, Σλ_i ≤ 1, 0 ⪯ T ⪯ Σλ_i G_i`.
pub fn hull_membership(corner: &ConvexCorner, t: &ComplexMatrix, tol: f64) -> Result<bool> {
    let d = corner.d;
    check_square(d, t)?;
    if t.hermitian_residual() > tol.max(1e-9) || lambda_min(&t.hermitian_part()) < -tol {
        return Ok(false);
    }
    let m = corner.generators.len();
    if m == 0 {
        return Ok(t.max_abs() <= tol);
    }
    // max s  s.t.  Σλ_i G_i − T − sI ⪰ 0,  λ ≥ 0,  1 − Σλ ≥ 0.
    let mut p = LmiProblem::new(vec![BlockKind::Psd(d), BlockKind::Diag(m + 1)], m + 1);
    let mut last = vec![0.0; m + 1];
    last[m] = 1.0;
    p.f0 = vec![Some(BlockData::Dense(t.hermitian_part().scale_re(-1.0))), Some(BlockData::Diag(last))];
    for (i, g) in corner.generators.iter().enumerate() {
        let mut e = vec![0.0; m + 1];
        e[i] = 1.0;
        e[m] = -1.0;
        p.f[i] = vec![(0, solvers::dense_or_sparse(g.matrix())), (1, BlockData::Diag(e))];
    }
    p.f[m] = vec![(0, BlockData::Dense(ComplexMatrix::identity(d).scale_re(-1.0)))];
    p.objective[m] = 1.0;
    let sol = solvers::solve_lmi(&p)?;
    if !sol.status.is_ok() {
        return Err(Error::Solver(format!("hull membership SDP: {:?}", sol.status)));
    }
    Ok(sol.value >= -tol)
}

/// `T ∈ {G_i}♯`: `T ⪰ −tol` and `Tr(T G_i) ≤ 1 + tol`.
pub fn antiblocker_membership(generators: &[ComplexMatrix], t: &ComplexMatrix, tol: f64) -> Result<bool> {
    let Some(first) = generators.first() else {
        return Ok(lambda_min(&t.hermitian_part()) >= -tol);
    };
    check_square(first.rows(), t)?;
    if t.hermitian_residual() > tol.max(1e-9) || lambda_min(&t.hermitian_part()) < -tol {
        return Ok(false);
    }
    for g in generators {
        if t.real_pairing(g) > 1.0 + tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `max Tr T` over the anti-blocker of the generators, with an optimal `T`.
/// The value is the dual objective, so it is a valid upper bound on the optimum.
/// Unbounded when the generators do not cover the space.
pub fn antiblocker_theta(d: usize, generators: &[ComplexMatrix]) -> Result<(f64, Option<HermitianOperator>)> {
    let mut sum = ComplexMatrix::zeros(d, d);
    for g in generators {
        sum = &sum + g;
    }
    if generators.is_empty() || lambda_min(&sum) <= 1e-9 {
        return Ok((f64::INFINITY, None));
    }
    let mut p = SemidefiniteProgram::new(HermitianOperator::from_hermitian_part(&ComplexMatrix::identity(d)), true);
    for g in generators {
        p.add_constraint(HermitianOperator::from_hermitian_part(g), ConstraintSense::Le, 1.0);
    }
    let sol = solvers::solve_sdp(&p)?;
    if !sol.status.is_ok() {
        return Err(Error::Solver(format!("anti-blocker SDP: {:?}", sol.status)));
    }
    Ok((sol.dual_value.max(sol.value), Some(sol.x)))
}

/// `θ(A) = sup{Tr A : A ∈ A}`.
pub fn theta_of(corner: &ConvexCorner) -> Result<f64> {
    match corner.semantics {
        Semantics::Hull => Ok(corner.generators.iter().map(|g| g.matrix().trace().re).fold(0.0, f64::max)),
        Semantics::Antiblocker => Ok(antiblocker_theta(corner.d, &corner.matrices())?.0),
    }
}

// ---------------------------------------------------------------------------
// ap / cp / fp corners.

#[derive(Clone, Copy, Debug)]
pub struct CornerOptions {
    /// Random generators added per rank for sampled corners.
    pub samples: usize,
    pub find: FindOptions,
}

impl Default for CornerOptions {
    fn default() -> Self {
        Self { samples: 8, find: FindOptions::default() }
    }
}

fn herm(m: ComplexMatrix) -> HermitianOperator {
    HermitianOperator::from_hermitian_part(&m)
}

fn diag_projection(d: usize, set: &[usize]) -> HermitianOperator {
    let mut w = vec![0.0; d];
    for &x in set {
        w[x] = 1.0;
    }
    herm(ComplexMatrix::diag_real(&w))
}

fn rank_one(u: &[C64]) -> HermitianOperator {
    herm(ComplexMatrix::outer(u, u))
}

/// Standard-basis rank-one projections plus `samples` random ones.
fn rank_one_generators(d: usize, samples: usize, seed: u64) -> Vec<HermitianOperator> {
    let mut out: Vec<HermitianOperator> = (0..d).map(|i| diag_projection(d, &[i])).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        out.push(rank_one(&random_unit_vector(d, &mut rng)));
    }
    out
}

/// Tensor products of discrete Fourier bases: an orthonormal basis of flat vectors.
pub fn fourier_flat_basis(sizes: &[usize]) -> Vec<Vec<C64>> {
    let mut basis = vec![vec![C64::new(1.0, 0.0)]];
    for &n in sizes {
        let norm = 1.0 / (n as f64).sqrt();
        let mut next = Vec::new();
        for v in &basis {
            for k in 0..n {
                let mut w = Vec::with_capacity(v.len() * n);
                for a in v {
                    for j in 0..n {
                        let phase = 2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64;
                        w.push(a * C64::from_polar(norm, phase));
                    }
                }
                next.push(w);
            }
        }
        basis = next;
    }
    basis
}

fn random_flat<R: rand::Rng>(d: usize, rng: &mut R) -> Vec<C64> {
    let a = 1.0 / (d as f64).sqrt();
    (0..d).map(|_| C64::from_polar(a, rng.random::<f64>() * std::f64::consts::TAU)).collect()
}

fn harvest(s: &OperatorSystem, kind: FamilyKind, ranks: std::ops::RangeInclusive<usize>, opts: &CornerOptions) -> Vec<HermitianOperator> {
    let mut out = Vec::new();
    for k in ranks {
        for t in 0..opts.samples.max(1) {
            let find = FindOptions { seed: opts.find.seed.wrapping_add(1 + t as u64 * 7919), ..opts.find };
            match family_search(s, k, kind, &find, None) {
                Some(f) => out.push(herm(f.projection())),
                None => break,
            }
        }
    }
    out
}

/// Generators of `ap(S)`, the corner generated by S-abelian projections.
pub fn ap_corner(s: &OperatorSystem, opts: &CornerOptions) -> Result<ConvexCorner> {
    let d = s.dim_h();
    match s.structure() {
        Structure::Graph(g) if g.n() <= graphs::exact::ENUMERATION_LIMIT => {
            let gens = graphs::maximal_independent_sets(&g)?.iter().map(|f| diag_projection(d, f)).collect();
            ConvexCorner::hull(d, Completeness::DiagonalExact, gens)
        }
        Structure::Scalars => ConvexCorner::hull(d, Completeness::Exact, vec![herm(ComplexMatrix::identity(d))]),
        Structure::Full | Structure::SFamily(_) => ConvexCorner::hull(d, Completeness::Sampled, rank_one_generators(d, opts.samples, opts.find.seed)),
        _ => {
            let alpha = projections::alpha_bounds(s, &opts.find).lower as usize;
            let mut gens = rank_one_generators(d, opts.samples, opts.find.seed);
            gens.extend(harvest(s, FamilyKind::Independent, 2..=alpha, opts));
            ConvexCorner::hull(d, Completeness::Sampled, gens)
        }
    }
}

/// Generators of `cp(S)`, the corner generated by S-clique projections.
pub fn cp_corner(s: &OperatorSystem, opts: &CornerOptions) -> Result<ConvexCorner> {
    let d = s.dim_h();
    match s.structure() {
        Structure::Graph(g) if g.n() <= graphs::exact::ENUMERATION_LIMIT => {
            let gens = graphs::maximal_cliques(&g)?.iter().map(|k| diag_projection(d, k)).collect();
            ConvexCorner::hull(d, Completeness::DiagonalExact, gens)
        }
        Structure::Full => ConvexCorner::hull(d, Completeness::Exact, vec![herm(ComplexMatrix::identity(d))]),
        Structure::SFamily(sizes) if sizes.len() == 1 => {
            // The standard basis is an S_n-clique, so I ∈ cp(S_n).
            ConvexCorner::hull(d, Completeness::Exact, vec![herm(ComplexMatrix::identity(d))])
        }
        Structure::Scalars => ConvexCorner::hull(d, Completeness::Sampled, rank_one_generators(d, opts.samples, opts.find.seed)),
        _ => {
            let omega = projections::omega_bounds(s, &opts.find).lower as usize;
            let mut gens = rank_one_generators(d, opts.samples, opts.find.seed);
            if let Some(f) = projections::find_clique_outcome(s, omega, &opts.find).family() {
                gens.push(herm(f.projection()));
            }
            gens.extend(harvest(s, FamilyKind::Clique, 2..=omega, opts));
            ConvexCorner::hull(d, Completeness::Sampled, gens)
        }
    }
}

/// Generators of `fp(S)`, the corner generated by S-full projections.
pub fn fp_corner(s: &OperatorSystem, opts: &CornerOptions) -> Result<ConvexCorner> {
    let d = s.dim_h();
    match s.structure() {
        Structure::Graph(g) if g.n() <= graphs::exact::ENUMERATION_LIMIT => {
            let gens = graphs::maximal_cliques(&g)?.iter().map(|k| diag_projection(d, k)).collect();
            ConvexCorner::hull(d, Completeness::Exact, gens)
        }
        Structure::Full => ConvexCorner::hull(d, Completeness::Exact, vec![herm(ComplexMatrix::identity(d))]),
        Structure::Scalars if d >= 2 => ConvexCorner::hull(d, Completeness::Exact, Vec::new()),
        Structure::SFamily(sizes) => {
            let mut gens: Vec<HermitianOperator> = fourier_flat_basis(&sizes).iter().map(|u| rank_one(u)).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(opts.find.seed);
            for _ in 0..opts.samples {
                gens.push(rank_one(&random_flat(d, &mut rng)));
            }
            ConvexCorner::hull(d, Completeness::Sampled, gens)
        }
        _ => {
            if let Some(p) = detect_unit_pattern(s) {
                if !pattern_has_rank_one_full(d, &p.units) {
                    return ConvexCorner::hull(d, Completeness::Exact, Vec::new());
                }
            }
            let top = projections::omega_tilde_bounds(s, &opts.find).lower as usize;
            let gens = harvest(s, FamilyKind::Full, 1..=top, opts);
            ConvexCorner::hull(d, Completeness::Sampled, gens)
        }
    }
}

// ---------------------------------------------------------------------------
// Fractional parameters.

fn corner_kind_bounds(
    s: &OperatorSystem,
    corner: &ConvexCorner,
    class: ProjectionKind,
    rank: &BoundInterval,
    opts: &CornerOptions,
    name: &str,
) -> Result<BoundInterval> {
    let d = s.dim_h();
    if corner.generators.is_empty() && corner.complete {
        let reason = format!("{name}: the projection class is {{0}}, so the anti-blocker is the whole cone");
        return Ok(BoundInterval::exact(f64::INFINITY, reason));
    }
    let (upper, t_opt) = antiblocker_theta(d, &corner.matrices())?;
    let upper_cert = Certificate::Relaxation {
        description: format!("{name}: max Tr T over the anti-blocker of {} generators", corner.generators.len()),
        constraints: corner.generators.len(),
    };
    if corner.completeness != Completeness::Sampled {
        let t = t_opt.map(|t| t.into_matrix()).unwrap_or_else(|| ComplexMatrix::zeros(d, d));
        let cert = Certificate::Matrix { description: format!("optimal T for {name} (generators exact for trace functionals)"), matrix: t };
        let lower = upper - 1e-7;
        return Ok(BoundInterval::new(lower.min(upper), Rigor::Rigorous, cert, upper, Rigor::Rigorous, upper_cert));
    }
    // Every class member P has Tr(ρP) ≤ 1 for a state ρ, and rank P ≤ r gives Tr(P I/r) ≤ 1.
    let mut lower = 1.0;
    let mut lower_cert = Certificate::Trivial { reason: "any state pairs to at most 1 with a projection".into() };
    let mut lower_rigor = Rigor::Rigorous;
    if rank.upper_rigor == Rigor::Rigorous && rank.upper >= 1.0 {
        let r = rank.upper;
        if d as f64 / r > lower {
            lower = d as f64 / r;
            lower_cert = Certificate::Matrix {
                description: format!("I/{r}: class projections have rank at most {r}"),
                matrix: ComplexMatrix::identity(d).scale_re(1.0 / r),
            };
        }
    }
    if let Some(t) = t_opt {
        if upper > lower + 1e-6 {
            let t = t.into_matrix();
            let max_rank = rank.upper.min(d as f64).max(1.0) as usize;
            let find = FindOptions { search: projections::search::SearchOptions { restarts: 64, ..opts.find.search }, ..opts.find };
            let m = adversarial_pairing(s, &t, class, max_rank, &find).max(lambda_max(&t).min(1.0));
            let candidate = t.trace().re / m.max(1.0);
            if candidate > lower + 1e-9 {
                lower = candidate;
                lower_rigor = Rigor::Heuristic;
                lower_cert = Certificate::Matrix {
                    description: format!("anti-blocker optimum scaled by the largest pairing found ({m:.6})"),
                    matrix: t.scale_re(1.0 / m.max(1.0)),
                };
            }
        }
    }
    Ok(BoundInterval::new(lower.min(upper), lower_rigor, lower_cert, upper, Rigor::Rigorous, upper_cert))
}

/// ω_f(S) = θ(ap(S)♯).
pub fn omega_f_bounds(s: &OperatorSystem, opts: &CornerOptions) -> Result<BoundInterval> {
    if let Structure::Graph(g) = s.structure() {
        if g.n() <= graphs::exact::ENUMERATION_LIMIT {
            return Ok(BoundInterval::exact(graphs::fractional_clique_number(&g)?, "graph system: ω_f(S_G) = ω_f(G) (LP)"));
        }
    }
    let corner = ap_corner(s, opts)?;
    let rank = projections::alpha_bounds(s, &opts.find);
    corner_kind_bounds(s, &corner, ProjectionKind::Abelian, &rank, opts, "ω_f")
}

/// κ(S) = θ(cp(S)♯).
pub fn kappa_bounds(s: &OperatorSystem, opts: &CornerOptions) -> Result<BoundInterval> {
    if let Structure::Graph(g) = s.structure() {
        if g.n() <= graphs::exact::ENUMERATION_LIMIT {
            let v = graphs::fractional_clique_number(&graphs::complement(&g))?;
            return Ok(BoundInterval::exact(v, "graph system: κ(S_G) = ω_f(G^c) (LP)"));
        }
    }
    let corner = cp_corner(s, opts)?;
    let rank = projections::omega_bounds(s, &opts.find);
    corner_kind_bounds(s, &corner, ProjectionKind::Clique, &rank, opts, "κ")
}

/// φ(S) = θ(fp(S)♯).
pub fn phi_bounds(s: &OperatorSystem, opts: &CornerOptions) -> Result<BoundInterval> {
    if let Structure::Graph(g) = s.structure() {
        if g.n() <= graphs::exact::ENUMERATION_LIMIT {
            let v = graphs::fractional_clique_number(&graphs::complement(&g))?;
            return Ok(BoundInterval::exact(v, "graph system: φ(S_G) = ω_f(G^c) (LP)"));
        }
    }
    let corner = fp_corner(s, opts)?;
    let rank = projections::omega_tilde_bounds(s, &opts.find);
    corner_kind_bounds(s, &corner, ProjectionKind::Full, &rank, opts, "φ")
}

// ---------------------------------------------------------------------------
// Diagonal compression of abelian projections of S_G.

/// Diagonal of a matrix in the standard basis.
pub fn delta(t: &ComplexMatrix) -> Vec<f64> {
    t.diagonal().iter().map(|v| v.re).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VpDecomposition {
    /// `(γ_k, S_k)` with `Σγ_k = 1` and each `S_k` independent in `G`.
    pub terms: Vec<(f64, Vec<usize>)>,
    /// `max_x |Δ(P)_x − Σ_k γ_k χ_{S_k}(x)|`.
    pub residual: f64,
}

/// Writes `Δ(P)` as a convex combination of independent-set indicators, from an
/// S_G-independent family spanning the range of `P`: pad the weights
/// `|⟨e_x, v_i⟩|²` to a doubly stochastic matrix, decompose it into permutations,
/// and read each permutation's support on the first `m` rows.
pub fn vp_decompose(g: &Graph, p: &ComplexMatrix, family: &[Vec<C64>]) -> Result<VpDecomposition> {
    let d = g.n();
    let s = crate::opsys::from_graph(g);
    if !is_abelian_projection(&s, p, 1e-8)? {
        return Err(Error::WrongProjectionClass("P is not S_G-abelian".into()));
    }
    if !is_independent_set(&s, family, 1e-8)? {
        return Err(Error::Invalid("spanning family is not S_G-independent".into()));
    }
    let span = ComplexMatrix::from_columns(family);
    if (&span.mul_adjoint(&span) - p).max_abs() > 1e-8 {
        return Err(Error::Invalid("family does not span the range of P".into()));
    }
    let m = family.len();
    let target = delta(p);
    if m == 0 {
        return Ok(VpDecomposition { terms: vec![(1.0, Vec::new())], residual: target.iter().fold(0.0, |a, v| a.max(v.abs())) });
    }
    if m == d {
        // Only the empty graph admits a full independent basis.
        return Ok(VpDecomposition { terms: vec![(1.0, (0..d).collect())], residual: target.iter().fold(0.0, |a, v| a.max((v - 1.0).abs())) });
    }
    let mut a: Vec<Vec<f64>> = family
        .iter()
        .map(|v| v.iter().map(|z| if z.norm_sqr() < 1e-14 { 0.0 } else { z.norm_sqr() }).collect())
        .collect();
    for row in &mut a {
        let total: f64 = row.iter().sum();
        row.iter_mut().for_each(|x| *x /= total);
    }
    let mut mat = a.clone();
    for _ in m..d {
        mat.push(
            (0..d)
                .map(|x| {
                    let used: f64 = a.iter().map(|r| r[x]).sum();
                    (1.0 - used).max(0.0) / (d - m) as f64
                })
                .collect(),
        );
    }
    let perms = solvers::birkhoff_decompose(&mat, 1e-9)?;
    let mut terms: Vec<(f64, Vec<usize>)> = Vec::new();
    for t in perms {
        // perm[i] = column x with p_{i,x} = 1.
        let mut set: Vec<usize> = t.perm[..m].to_vec();
        set.sort_unstable();
        if !g.is_independent(&set) {
            return Err(Error::Invalid(format!("decomposition produced a non-independent set {set:?}")));
        }
        match terms.iter_mut().find(|(_, s)| *s == set) {
            Some(entry) => entry.0 += t.weight,
            None => terms.push((t.weight, set)),
        }
    }
    let mut recon = vec![0.0; d];
    for (w, set) in &terms {
        for &x in set {
            recon[x] += w;
        }
    }
    let residual = target.iter().zip(&recon).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    Ok(VpDecomposition { terms, residual })
}

/// `max Tr(PQ)` over the given abelian projections `P` and clique projections `Q`.
pub fn check_first_sandwich(abelian: &[ComplexMatrix], clique: &[ComplexMatrix]) -> f64 {
    let mut best = 0.0f64;
    for p in abelian {
        for q in clique {
            best = best.max(p.real_pairing(q));
        }
    }
    best
}

/// Largest `|⟨u, v⟩|²`-style overlap, exposed for harness reporting.
pub fn max_overlap(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    let mut best = 0.0f64;
    for u in a {
        for v in b {
            best = best.max(vdot(u, v).norm_sqr());
        }
    }
    best
}
