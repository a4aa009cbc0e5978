//! Acceptance criteria 1–10. Runs without the libtest harness so that every
//! criterion prints one line; exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use ncgraph::capacity::{graph_capacity_bracket, submultiplicativity_audit, system_capacity_bracket};
use ncgraph::channels::QuantumChannel;
use ncgraph::cli::{default_corpus, read_input};
use ncgraph::corners::{
    antiblocker_theta, ap_corner, check_first_sandwich, cp_corner, fp_corner, kappa_bounds, omega_f_bounds, phi_bounds, vp_decompose, CornerOptions,
};
use ncgraph::graphs::{self, Graph};
use ncgraph::linalg::random::{random_isometry, random_unitary};
use ncgraph::linalg::ComplexMatrix;
use ncgraph::lovasz::{
    build_ensemble, continuity_check, dsw_theta_seesaw, stability_check, theta_hat_upper, theta_lower, theta_report, verify_second_sandwich, LovaszOptions,
};
use ncgraph::opsys::{self, OperatorSystem};
use ncgraph::projections::{
    alpha_bounds, chi_upper_witness, is_abelian_projection, is_clique_projection, is_clique_set, is_independent_set, omega_bounds, omega_tilde_bounds,
    sample_graph_abelian, search_clique_set, search_independent_set, FindOptions,
};
use ncgraph::solvers::birkhoff_decompose;
use ncgraph::Result;

type Outcome = Result<(bool, String)>;

fn opts() -> LovaszOptions {
    LovaszOptions::default()
}

fn corner_opts() -> CornerOptions {
    CornerOptions { samples: 8, find: FindOptions::new(8, 0) }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Random graphs on 3..=max_n vertices, none of them empty or complete.
fn random_graphs(count: usize, max_n: usize, seed: u64) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.random_range(3..=max_n);
        let g = Graph::random(n, 0.5, &mut rng);
        if g.num_edges() > 0 && g.num_edges() < n * (n - 1) / 2 {
            out.push(g);
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let c5 = Graph::cycle(5);
    let sqrt5 = 5f64.sqrt();
    let theta = graphs::lovasz_theta(&c5)?.value;
    let labelling = graphs::optimal_labelling(&c5)?.value();
    let s = opsys::from_graph(&c5);
    let hat = theta_hat_upper(&build_ensemble(&s, &opts())?, &opts())?.value;
    let ok = close(theta, sqrt5, 1e-4) && close(labelling, sqrt5, 1e-3) && close(hat, sqrt5, 1e-3);
    Ok((ok, format!("θ(C5) = {theta:.8}, labelling value = {labelling:.8}, θ̂(S_C5) ≤ {hat:.8}")))
}

fn criterion_2() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for d in 2..=4 {
        let s = OperatorSystem::scalars(d);
        let e = build_ensemble(&s, &opts())?;
        let lower = theta_lower(&s, &e, &opts())?;
        let hat = theta_hat_upper(&e, &opts())?;
        // The certificate must be the identity channel with σ = I/d.
        let id = QuantumChannel::identity(d);
        let direct = ncgraph::lovasz::seesaw::evaluate_pair(&id, &ComplexMatrix::identity(d).scale_re(1.0 / d as f64))?;
        ok &= close(lower.lower, d as f64, 1e-6) && close(hat.value, d as f64, 1e-6) && close(direct, d as f64, 1e-6);
        detail.push(format!("d={d}: θ ≥ {:.7}, θ̂ ≤ {:.7}", lower.lower, hat.value));
    }
    let m2 = opsys::amplify(&OperatorSystem::scalars(2), 2);
    let dsw = dsw_theta_seesaw(&m2, 8, 0)?;
    let hat2 = theta_hat_upper(&build_ensemble(&OperatorSystem::scalars(2), &opts())?, &opts())?.value;
    ok &= close(dsw.value, 4.0, 1e-3) && hat2 < dsw.value - 1.0;
    detail.push(format!("ϑ(M2(ℂI2)) ≥ {:.6} vs θ̂(ℂI2) = {hat2:.6}", dsw.value));
    Ok((ok, detail.join("; ")))
}

fn criterion_3() -> Outcome {
    let find = FindOptions::new(16, 0);
    let copts = corner_opts();
    let mut ok = true;
    let mut detail = Vec::new();
    for n in 2..=3 {
        let s = opsys::s_family(&[n])?;
        let omega = omega_bounds(&s, &find);
        let found = search_clique_set(&s, n, &find).map(|f| is_clique_set(&s, &f.vectors, 1e-7)).transpose()?.unwrap_or(false);
        let phi = phi_bounds(&s, &copts)?;
        let omega_f = omega_f_bounds(&s, &copts)?;
        let chi = chi_upper_witness(&s, &[], &find).len();
        let item = found
            && close(omega.lower, n as f64, 1e-9)
            && close(omega.upper, n as f64, 1e-9)
            && close(phi.lower, n as f64, 1e-6)
            && close(phi.upper, n as f64, 1e-6)
            && close(omega_f.lower, n as f64, 1e-6)
            && close(omega_f.upper, n as f64, 1e-6)
            && chi == n;
        ok &= item;
        detail.push(format!("S_{n}: ω = {}, φ ∈ [{:.7}, {:.7}], ω_f ∈ [{:.7}, {:.7}], χ ≤ {chi}", omega.lower, phi.lower, phi.upper, omega_f.lower, omega_f.upper));
    }
    for sizes in [vec![2], vec![3], vec![2, 2], vec![2, 3], vec![3, 3]] {
        let w = omega_tilde_bounds(&opsys::s_family(&sizes)?, &find);
        ok &= w.lower == 1.0 && w.upper == 1.0;
    }
    detail.push("ω̃ = 1 on all five families".into());
    Ok((ok, detail.join("; ")))
}

fn criterion_4() -> Outcome {
    let s = opsys::s_n(2)?;
    let kappa = kappa_bounds(&s, &corner_opts())?;
    let lower = theta_lower(&s, &build_ensemble(&s, &opts())?, &opts())?;
    let ok = close(kappa.lower, 1.0, 1e-6) && close(kappa.upper, 1.0, 1e-6) && lower.lower > 1.0 + 1e-3;
    Ok((ok, format!("κ(S2) ∈ [{:.8}, {:.8}], θ(S2) ≥ {:.6}", kappa.lower, kappa.upper, lower.lower)))
}

fn criterion_5() -> Outcome {
    let graphs_ = random_graphs(10, 7, 5);
    let copts = corner_opts();
    let find = FindOptions::new(32, 0);
    let results: Vec<Result<(bool, f64)>> = graphs_
        .par_iter()
        .map(|g| {
            let s = opsys::from_graph(g);
            let gc = graphs::complement(g);
            let alpha = graphs::independence_number(g)?;
            let clique = graphs::clique_number(g)? as f64;
            let wf = graphs::fractional_clique_number(g)?;
            let wfc = graphs::fractional_clique_number(&gc)?;
            // Continuous search, not the graph dispatch.
            let searched = search_independent_set(&s, alpha, &find).map(|f| is_independent_set(&s, &f.vectors, 1e-7)).transpose()?.unwrap_or(false);
            let omega = omega_bounds(&s, &find);
            let omega_t = omega_tilde_bounds(&s, &find);
            let ab = alpha_bounds(&s, &find);
            let pairs = [
                (omega_f_bounds(&s, &copts)?, wf),
                (kappa_bounds(&s, &copts)?, wfc),
                (phi_bounds(&s, &copts)?, wfc),
            ];
            // Same values through the anti-blocker SDP on the corner generators.
            let sdp = [
                (antiblocker_theta(g.n(), &ap_corner(&s, &copts)?.matrices())?.0, wf),
                (antiblocker_theta(g.n(), &cp_corner(&s, &copts)?.matrices())?.0, wfc),
                (antiblocker_theta(g.n(), &fp_corner(&s, &copts)?.matrices())?.0, wfc),
            ];
            let mut worst: f64 = 0.0;
            for (b, v) in &pairs {
                worst = worst.max((b.lower - v).abs()).max((b.upper - v).abs());
            }
            for (x, v) in &sdp {
                worst = worst.max((x - v).abs());
            }
            let ok = searched
                && ab.lower == alpha as f64
                && ab.upper == alpha as f64
                && omega.lower == clique
                && omega.upper == clique
                && omega_t.lower == clique
                && omega_t.upper == clique
                && worst <= 1e-6;
            Ok((ok, worst))
        })
        .collect();
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for r in results {
        let (o, w) = r?;
        ok &= o;
        worst = worst.max(w);
    }
    Ok((ok, format!("10 graphs; largest deviation of ω_f, κ, φ from the LP values: {worst:.2e}")))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_vp: f64 = 0.0;
    let mut ok = true;
    let mut samples = 0;
    while samples < 20 {
        let g = Graph::random(rng.random_range(3..=6), 0.4, &mut rng);
        let alpha = graphs::independence_number(&g)?;
        let rank = rng.random_range(1..=alpha);
        let Some(f) = sample_graph_abelian(&g, rank, &mut rng) else { continue };
        let s = opsys::from_graph(&g);
        let p = f.projection();
        ok &= is_abelian_projection(&s, &p, 1e-8)?;
        let vp = vp_decompose(&g, &p, &f.vectors)?;
        worst_vp = worst_vp.max(vp.residual);
        let weights: f64 = vp.terms.iter().map(|t| t.0).sum();
        ok &= close(weights, 1.0, 1e-9);
        for (_, set) in &vp.terms {
            ok &= set.iter().all(|&u| set.iter().all(|&v| u == v || !g.confusable(u, v)));
        }
        samples += 1;
    }
    ok &= worst_vp <= 1e-8;
    // Doubly stochastic inputs built from known permutations.
    let mut worst_bvn: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.random_range(2..=7);
        let mut m = vec![vec![0.0; n]; n];
        let parts = rng.random_range(1..=5);
        let mut w: Vec<f64> = (0..parts).map(|_| rng.random::<f64>() + 0.05).collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        for &weight in &w {
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            for (i, &j) in perm.iter().enumerate() {
                m[i][j] += weight;
            }
        }
        let terms = birkhoff_decompose(&m, 1e-12)?;
        let mut rec = vec![vec![0.0; n]; n];
        for t in &terms {
            for (i, &j) in t.perm.iter().enumerate() {
                rec[i][j] += t.weight;
            }
        }
        for i in 0..n {
            for j in 0..n {
                worst_bvn = worst_bvn.max((rec[i][j] - m[i][j]).abs());
            }
        }
    }
    ok &= worst_bvn <= 1e-9;
    Ok((ok, format!("20 abelian projections: VP residual ≤ {worst_vp:.2e}; Birkhoff reconstruction ≤ {worst_bvn:.2e}")))
}

/// Projection onto a random subspace of the span of a maximal clique.
fn random_clique_projection<R: Rng>(g: &Graph, rng: &mut R) -> Result<ComplexMatrix> {
    let cliques = graphs::maximal_cliques(g)?;
    let k = &cliques[rng.random_range(0..cliques.len())];
    let r = rng.random_range(1..=k.len());
    let v = random_isometry(k.len(), r, rng);
    let mut full = ComplexMatrix::zeros(g.n(), r);
    for (a, &x) in k.iter().enumerate() {
        for c in 0..r {
            full[(x, c)] = v[(a, c)];
        }
    }
    Ok(full.mul_adjoint(&full))
}

fn first_sandwich_probes() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    let mut ok = true;
    while pairs < 500 {
        let g = random_graphs(1, 7, rng.random())[0].clone();
        let s = opsys::from_graph(&g);
        let alpha = graphs::independence_number(&g)?;
        for _ in 0..20 {
            let Some(f) = sample_graph_abelian(&g, rng.random_range(1..=alpha), &mut rng) else { continue };
            let q = random_clique_projection(&g, &mut rng)?;
            ok &= is_clique_projection(&s, &q, 1e-8)?;
            worst = worst.max(check_first_sandwich(&[f.projection()], &[q]));
            pairs += 1;
        }
    }
    ok &= worst <= 1.0 + 1e-8;
    Ok((ok, format!("{pairs} abelian/clique pairings, max Tr(PQ) = {worst:.10}")))
}

fn corpus_suites() -> Result<(bool, String)> {
    let corpus = default_corpus();
    let results: Vec<Result<(String, bool, bool)>> = corpus
        .par_iter()
        .map(|entry| {
            let ncgraph::cli::CorpusSource::Spec(spec) = &entry.source else { unreachable!("default corpus is named") };
            let s = read_input(spec)?.system();
            let e = build_ensemble(&s, &opts())?;
            let sandwich = verify_second_sandwich(&s, &e, 4, 0)?.passed;
            let chain = theta_report(&s, &opts())?.chain.all();
            Ok((entry.name.clone(), sandwich, chain))
        })
        .collect();
    let mut failed = Vec::new();
    for r in results {
        let (name, sandwich, chain) = r?;
        if !sandwich {
            failed.push(format!("{name} (second sandwich)"));
        }
        if !chain {
            failed.push(format!("{name} (chains)"));
        }
    }
    let detail = if failed.is_empty() { format!("{} corpus items: both inclusions and all chains hold", corpus.len()) } else { format!("failed: {}", failed.join(", ")) };
    Ok((failed.is_empty(), detail))
}

/// Random operator system: `span{I, H_1, …, H_k}` for random hermitian `H_i`.
fn random_system<R: Rng>(d: usize, k: usize, rng: &mut R) -> Result<OperatorSystem> {
    let mut mats = vec![ComplexMatrix::identity(d)];
    for _ in 0..k {
        mats.push(ncgraph::linalg::random::random_hermitian(d, rng));
    }
    OperatorSystem::from_spanning(&mats)
}

fn duality_probes() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(72);
    let mut ok = true;
    let mut agreements = 0;
    let mut positives = 0;
    let find = FindOptions::new(16, 0);
    for i in 0..20 {
        let s = if i % 2 == 0 {
            opsys::from_graph(&random_graphs(1, 6, rng.random())[0])
        } else {
            let d = rng.random_range(3..=5);
            random_system(d, rng.random_range(1..=3), &mut rng)?
        };
        let c = opsys::complement(&s);
        ok &= opsys::complement(&c).same_as(&s);
        let d = s.dim_h();
        let mut families = vec![random_isometry(d, 2, &mut rng).columns()];
        if let Some(f) = search_independent_set(&s, 2, &find) {
            families.push(f.vectors);
        }
        for f in families {
            let a = is_independent_set(&s, &f, 1e-7)?;
            let b = is_clique_set(&c, &f, 1e-7)?;
            ok &= a == b;
            agreements += 1;
            positives += a as usize;
        }
    }
    Ok((ok, format!("20 systems: S^cc = S; {agreements} families agree ({positives} independent)")))
}

fn kraus_probes() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(73);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let d: usize = rng.random_range(2..=4);
        let k: usize = rng.random_range(1..=3);
        let m = rng.random_range(2..=3).max(d.div_ceil(k));
        let v = random_isometry(k * m, d, &mut rng);
        let kraus = ncgraph::channels::unstack(&v, k);
        let u = random_unitary(m, &mut rng);
        let mixed: Vec<ComplexMatrix> = (0..m)
            .map(|p| {
                let mut a = ComplexMatrix::zeros(k, d);
                for (q, b) in kraus.iter().enumerate() {
                    a.axpy(u[(p, q)], b);
                }
                a
            })
            .collect();
        let s1 = QuantumChannel::new(kraus)?.confusability()?;
        let s2 = QuantumChannel::new(mixed)?.confusability()?;
        worst = worst.max(s1.subspace().containment_residual(s2.subspace())).max(s2.subspace().containment_residual(s1.subspace()));
    }
    Ok((worst <= 1e-8, format!("20 channels: S_Φ mismatch ≤ {worst:.2e}")))
}

fn rank_one_probes() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(74);
    let mut least = f64::INFINITY;
    let families = [vec![2, 2], vec![2, 3], vec![3, 3]];
    for t in 0..200 {
        let s = opsys::s_family(&families[t % families.len()])?;
        let f = random_isometry(s.dim_h(), 2, &mut rng).columns();
        let uv = ComplexMatrix::outer(&f[0], &f[1]);
        // ‖uv* − P_{S⊥}(uv*)‖ is the distance from uv* to S⊥.
        least = least.min(s.perp().distance(&uv)?);
    }
    Ok((least > 1e-6, format!("200 rank-one probes, smallest distance to S⊥ = {least:.3e}")))
}

fn criterion_7() -> Outcome {
    let parts = [
        ("pairings", first_sandwich_probes()?),
        ("corpus", corpus_suites()?),
        ("duality", duality_probes()?),
        ("kraus", kraus_probes()?),
        ("rank-one", rank_one_probes()?),
    ];
    let ok = parts.iter().all(|(_, (p, _))| *p);
    let detail = parts.iter().map(|(n, (p, d))| format!("{n} {}: {d}", if *p { "ok" } else { "FAILED" })).collect::<Vec<_>>().join("; ");
    Ok((ok, detail))
}

fn criterion_8() -> Outcome {
    let sqrt5 = 5f64.sqrt();
    let c5 = graph_capacity_bracket(&Graph::cycle(5), 2)?;
    let alpha2 = c5.powers.iter().find(|p| p.n == 2).map(|p| p.alpha);
    let mut ok = close(c5.lower, sqrt5, 1e-12) && c5.upper >= sqrt5 - 1e-9 && c5.upper <= sqrt5 + 1e-3 && alpha2 == Some(5);
    let ci2 = system_capacity_bracket(&OperatorSystem::scalars(2), 2, &opts())?;
    ok &= close(ci2.lower, 2.0, 1e-9) && close(ci2.upper, 2.0, 1e-6);
    let s2 = opsys::s_family(&[2])?;
    let cert = theta_hat_upper(&build_ensemble(&s2, &opts())?, &opts())?;
    let audit = submultiplicativity_audit(&s2, &s2, &cert.channel, &cert.sigma, &cert.channel, &cert.sigma)?;
    ok &= audit.passed;
    Ok((
        ok,
        format!(
            "C5: [{:.7}, {:.7}] with α(C5⊠C5) = {:?}; ℂI2: [{:.7}, {:.7}]; S2⊗S2 audit {:.6} ≤ {:.6}²",
            c5.lower, c5.upper, alpha2, ci2.lower, ci2.upper, audit.product_upper, audit.factor_upper
        ),
    ))
}

fn criterion_9() -> Outcome {
    let s = opsys::from_graph(&Graph::cycle(5));
    let r = stability_check(&s, 2, &opts())?;
    let ok = r.passed && close(r.upper_s, r.upper_amplified, 1e-3);
    Ok((ok, format!("θ̂ upper: S_C5 {:.8}, M2(S_C5) {:.8}", r.upper_s, r.upper_amplified)))
}

fn criterion_10() -> Outcome {
    let s = opsys::from_graph(&Graph::cycle(5));
    let r = continuity_check(&s, 1e-3, 0.05, &opts())?;
    Ok((r.passed && r.max_shift <= 0.05, format!("ε = 1e-3, largest shift of a certified bound = {:.3e}", r.max_shift)))
}

fn main() -> ExitCode {
    type Criterion = (usize, &'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        (1, "pentagon theta", criterion_1),
        (2, "scalar systems and ϑ separation", criterion_2),
        (3, "S-family parameters", criterion_3),
        (4, "κ(S2) = 1 < θ(S2)", criterion_4),
        (5, "graph systems match graph parameters", criterion_5),
        (6, "vertex-packing decomposition", criterion_6),
        (7, "property suites", criterion_7),
        (8, "capacity brackets", criterion_8),
        (9, "stability under amplification", criterion_9),
        (10, "continuity smoke test", criterion_10),
    ];
    let mut all = true;
    for (n, name, f) in criteria {
        let start = Instant::now();
        let (passed, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        all &= passed;
        println!("criterion {n:>2} [{}] {name} ({:.1}s): {detail}", if passed { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
