//! Command implementations behind the `ncgraph` binary: input parsing, reports,
//! the verification ledger and text rendering.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{BoundInterval, Certificate, Rigor};
use crate::capacity::{graph_capacity_bracket, system_capacity_bracket, CapacityBracket};
use crate::channels::QuantumChannel;
use crate::corners::{ap_corner, check_first_sandwich, cp_corner, omega_f_bounds, CornerOptions};
use crate::error::{Error, Result};
use crate::graphs::{self, Graph};
use crate::linalg::random::random_unitary;
use crate::lovasz::{self, build_ensemble, continuity_check, stability_check, theta_report, verify_second_sandwich, ChainFlags, LovaszOptions, ThetaReport};
use crate::opsys::{self, OperatorSystem, Structure};
use crate::projections::search::restart_rng;
use crate::projections::{chi_upper_witness, is_clique_set, omega_bounds, omega_tilde_bounds, sample_graph_abelian, FindOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

/// Exit code for an error escaping a command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Solver(_) => EXIT_SOLVER,
        _ => EXIT_VALIDATION,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    /// Verification tolerance.
    pub tol: f64,
    pub restarts: usize,
    /// Random channels per ensemble.
    pub budget: usize,
    /// Ensemble output-dimension cap; `None` means `d²`.
    pub max_output: Option<usize>,
    pub max_power: usize,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { seed: 0, tol: 1e-7, restarts: 8, budget: 4, max_output: None, max_power: 2, format: Format::Json }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 || self.tol >= 1e-2 {
            return Err(Error::Invalid(format!("--tol must lie in (0, 1e-2), got {}", self.tol)));
        }
        for (name, v) in [("--restarts", self.restarts), ("--budget", self.budget), ("--max-power", self.max_power)] {
            if v == 0 {
                return Err(Error::Invalid(format!("{name} must be positive")));
            }
        }
        if self.max_output == Some(0) {
            return Err(Error::Invalid("--max-output-dim must be positive".into()));
        }
        Ok(())
    }

    pub fn lovasz(&self) -> LovaszOptions {
        LovaszOptions { budget: self.budget, seesaw_rounds: 1, restarts: self.restarts, seed: self.seed, max_output: self.max_output }
    }

    pub fn find(&self) -> FindOptions {
        FindOptions::new(self.restarts, self.seed)
    }
}

// ---------------------------------------------------------------------------
// Inputs.

#[derive(Clone, Debug)]
pub enum Input {
    Graph(Graph),
    System(OperatorSystem),
}

impl Input {
    pub fn system(&self) -> OperatorSystem {
        match self {
            Input::Graph(g) => opsys::from_graph(g),
            Input::System(s) => s.clone(),
        }
    }
}

fn parse_usize(s: &str, what: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Parse(format!("{what}: expected an integer, got '{s}'")))
}

/// Named graphs: `c5`, `k4`, `petersen`, `cycle:N`, `complete:N`, `empty:N`,
/// `path:N`, `random:N:P:SEED`.
pub fn parse_named_graph(spec: &str) -> Result<Option<Graph>> {
    let lower = spec.to_ascii_lowercase();
    let parts: Vec<&str> = lower.split(':').collect();
    let g = match parts.as_slice() {
        ["petersen"] => Graph::petersen(),
        ["cycle", n] => Graph::cycle(parse_usize(n, "cycle")?),
        ["complete", n] => Graph::complete(parse_usize(n, "complete")?),
        ["empty", n] => Graph::empty(parse_usize(n, "empty")?),
        ["path", n] => Graph::path(parse_usize(n, "path")?),
        ["random", n, p, seed] => {
            let p: f64 = p.parse().map_err(|_| Error::Parse(format!("random: bad edge probability '{p}'")))?;
            let mut rng = restart_rng(parse_usize(seed, "random seed")? as u64, 0);
            Graph::random(parse_usize(n, "random")?, p, &mut rng)
        }
        [s] if s.len() > 1 && (s.starts_with('c') || s.starts_with('k')) && s[1..].chars().all(|c| c.is_ascii_digit()) => {
            let n = parse_usize(&s[1..], "graph size")?;
            if s.starts_with('c') {
                Graph::cycle(n)
            } else {
                Graph::complete(n)
            }
        }
        _ => return Ok(None),
    };
    Ok(Some(g))
}

/// Named systems: `scalars:D`, `full:D`, `s:N1,N2,…`, `graph:<graph>`,
/// `complement:<system>`, `amplify:M:<system>`, `perturb:EPS:<system>`, or any
/// named graph.
pub fn parse_named(spec: &str) -> Result<Input> {
    if let Some(g) = parse_named_graph(spec)? {
        return Ok(Input::Graph(g));
    }
    let (head, rest) = spec.split_once(':').ok_or_else(|| Error::Parse(format!("unknown input '{spec}'")))?;
    let s = match head.to_ascii_lowercase().as_str() {
        "scalars" => OperatorSystem::scalars(parse_usize(rest, "scalars")?),
        "full" => OperatorSystem::full(parse_usize(rest, "full")?),
        "s" => {
            let sizes = rest.split(',').map(|x| parse_usize(x.trim(), "s")).collect::<Result<Vec<_>>>()?;
            opsys::s_family(&sizes)?
        }
        "graph" => return parse_named(rest).map(|i| Input::System(i.system())),
        "complement" => opsys::complement(&parse_named(rest)?.system()),
        "amplify" => {
            let (m, inner) = rest.split_once(':').ok_or_else(|| Error::Parse("amplify:M:<system>".into()))?;
            opsys::amplify(&parse_named(inner)?.system(), parse_usize(m, "amplify")?)
        }
        "perturb" => {
            let (eps, inner) = rest.split_once(':').ok_or_else(|| Error::Parse("perturb:EPS:<system>".into()))?;
            let eps: f64 = eps.parse().map_err(|_| Error::Parse(format!("perturb: bad epsilon '{eps}'")))?;
            opsys::perturb(&parse_named(inner)?.system(), eps, 0)?
        }
        _ => return Err(Error::Parse(format!("unknown input '{spec}'"))),
    };
    Ok(Input::System(s))
}

/// Parses a JSON value holding either a graph (`{"n", "edges"}`) or an operator system.
pub fn input_from_json(v: serde_json::Value) -> Result<Input> {
    if v.get("edges").is_some() {
        Ok(Input::Graph(serde_json::from_value(v)?))
    } else {
        // Validation failures surface as serde errors carrying the original message.
        serde_json::from_value::<OperatorSystem>(v).map(Input::System).map_err(|e| Error::NotOperatorSystem(e.to_string()))
    }
}

/// A file path (`.col` DIMACS or JSON) or a named input.
pub fn read_input(spec: &str) -> Result<Input> {
    let path = Path::new(spec);
    if path.is_file() {
        if path.extension().is_some_and(|e| e == "col") {
            return Ok(Input::Graph(graphs::io::read_graph(path)?));
        }
        let text = std::fs::read_to_string(path)?;
        return input_from_json(serde_json::from_str(&text)?);
    }
    parse_named(spec)
}

// ---------------------------------------------------------------------------
// Parameter reports.

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Row {
    pub parameter: String,
    /// Classical value for graph systems.
    pub classical: Option<BoundInterval>,
    pub system: BoundInterval,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemParams {
    pub d: usize,
    pub dim: usize,
    pub structure: String,
    pub rows: Vec<Row>,
    pub ensemble_size: usize,
    pub chain: ChainFlags,
    pub falsification: bool,
}

fn structure_name(s: &OperatorSystem) -> String {
    match s.structure() {
        Structure::Graph(g) => format!("graph system ({} vertices, {} edges)", g.n(), g.num_edges()),
        Structure::SFamily(sizes) => format!("S-family {sizes:?}"),
        Structure::Scalars => "scalars".into(),
        Structure::Full => "full matrix algebra".into(),
        Structure::General => "general".into(),
    }
}

/// χ(S) between `⌈d / α_upper⌉` and a verified basis partition.
pub fn chi_bounds(s: &OperatorSystem, alpha_upper: f64, find: &FindOptions) -> BoundInterval {
    let d = s.dim_h();
    let w = chi_upper_witness(s, &[], find);
    let lower = ((d as f64 / alpha_upper.max(1.0)) - 1e-9).ceil().max(1.0);
    BoundInterval::new(
        lower,
        Rigor::Rigorous,
        Certificate::Trivial { reason: "each part of a basis partition has at most α vectors".into() },
        w.len() as f64,
        Rigor::Rigorous,
        Certificate::Note { text: format!("basis partition into {} independent sets", w.len()) },
    )
}

fn rows_from_report(s: &OperatorSystem, r: &ThetaReport, cfg: &RunConfig) -> Result<Vec<Row>> {
    let find = cfg.find();
    let row = |p: &str, b: BoundInterval| Row { parameter: p.into(), classical: None, system: b };
    Ok(vec![
        row("alpha", r.alpha.clone()),
        row("omega", omega_bounds(s, &find)),
        row("omega_tilde", omega_tilde_bounds(s, &find)),
        row("chi", chi_bounds(s, r.alpha.upper, &find)),
        row("omega_f", omega_f_bounds(s, &CornerOptions { samples: 8, find })?),
        row("kappa", r.kappa.clone()),
        row("phi", r.phi.clone()),
        row("theta", r.theta.clone()),
        row("theta_hat", r.theta_hat.clone()),
        row("dsw_theta", r.dsw.clone()),
        row("beta", r.beta.clone()),
    ])
}

pub fn cmd_system_params(s: &OperatorSystem, cfg: &RunConfig) -> Result<SystemParams> {
    let r = theta_report(s, &cfg.lovasz())?;
    Ok(SystemParams {
        d: s.dim_h(),
        dim: s.dim(),
        structure: structure_name(s),
        rows: rows_from_report(s, &r, cfg)?,
        ensemble_size: r.ensemble_size,
        chain: r.chain,
        falsification: r.falsification,
    })
}

/// System parameters of `S_G` next to the classical graph parameters.
pub fn cmd_graph_params(g: &Graph, cfg: &RunConfig) -> Result<SystemParams> {
    let s = opsys::from_graph(g);
    let mut p = cmd_system_params(&s, cfg)?;
    let gc = graphs::complement(g);
    let exact = |v: f64, what: &str| Some(BoundInterval::exact(v, format!("{what} of the graph")));
    let theta = graphs::lovasz_theta(g)?;
    let theta_classical = BoundInterval::new(
        theta.value,
        Rigor::Rigorous,
        Certificate::Note { text: "primal SDP value".into() },
        theta.dual_value.max(theta.value),
        Rigor::Rigorous,
        Certificate::Note { text: "dual SDP value".into() },
    );
    for row in &mut p.rows {
        row.classical = match row.parameter.as_str() {
            "alpha" => exact(graphs::independence_number(g)? as f64, "independence number"),
            "omega" | "omega_tilde" => exact(graphs::clique_number(g)? as f64, "clique number"),
            "chi" => exact(graphs::chromatic_number(g)? as f64, "chromatic number"),
            "omega_f" => exact(graphs::fractional_clique_number(g)?, "fractional clique number"),
            "kappa" | "phi" => exact(graphs::fractional_clique_number(&gc)?, "fractional clique number of the complement"),
            "theta" | "theta_hat" => Some(theta_classical.clone()),
            _ => None,
        };
    }
    Ok(p)
}

// ---------------------------------------------------------------------------
// Verification ledger.

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    #[serde(flatten)]
    pub source: CorpusSource,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusSource {
    /// A named input or file path.
    Spec(String),
    /// Inline graph or system JSON.
    Inline(serde_json::Value),
}

impl CorpusEntry {
    pub fn named(name: &str, spec: &str) -> Self {
        Self { name: name.into(), source: CorpusSource::Spec(spec.into()) }
    }

    fn load(&self) -> Result<Input> {
        match &self.source {
            CorpusSource::Spec(s) => read_input(s),
            CorpusSource::Inline(v) => input_from_json(v.clone()),
        }
    }
}

/// Eight graphs and four non-graph systems.
pub fn default_corpus() -> Vec<CorpusEntry> {
    [
        ("C5", "c5"),
        ("C6", "cycle:6"),
        ("C7", "cycle:7"),
        ("K4", "k4"),
        ("empty3", "empty:3"),
        ("P4", "path:4"),
        ("petersen", "petersen"),
        ("random6", "random:6:0.5:3"),
        ("scalars3", "scalars:3"),
        ("S2", "s:2"),
        ("S3", "s:3"),
        ("S22", "s:2,2"),
    ]
    .into_iter()
    .map(|(n, s)| CorpusEntry::named(n, s))
    .collect()
}

pub fn read_corpus(path: &Path) -> Result<Vec<CorpusEntry>> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ItemLedger {
    pub name: String,
    /// Set when the input failed validation; suites are then skipped.
    pub validation_error: Option<String>,
    pub suites: Vec<SuiteResult>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyLedger {
    pub items: Vec<ItemLedger>,
    pub suites_passed: bool,
    pub validation_failures: usize,
}

impl VerifyLedger {
    pub fn exit_code(&self) -> i32 {
        if !self.suites_passed {
            EXIT_VERIFICATION
        } else if self.validation_failures > 0 {
            EXIT_VALIDATION
        } else {
            EXIT_OK
        }
    }
}

/// Dimension up to which the amplification and perturbation suites run.
const HEAVY_SUITE_LIMIT: usize = 5;

fn suite(name: &str, r: Result<(bool, String)>) -> SuiteResult {
    match r {
        Ok((passed, detail)) => SuiteResult { suite: name.into(), passed, detail },
        Err(e) => SuiteResult { suite: name.into(), passed: false, detail: format!("error: {e}") },
    }
}

fn first_sandwich(s: &OperatorSystem, cfg: &RunConfig) -> Result<(bool, String)> {
    let opts = CornerOptions { samples: 8, find: cfg.find() };
    let mut abelian = ap_corner(s, &opts)?.matrices();
    if let Some(g) = s.graph() {
        let mut rng = restart_rng(cfg.seed, 11);
        for rank in 1..=g.n().min(4) {
            if let Some(f) = sample_graph_abelian(&g, rank, &mut rng) {
                abelian.push(f.projection());
            }
        }
    }
    let clique = cp_corner(s, &opts)?.matrices();
    let worst = check_first_sandwich(&abelian, &clique);
    Ok((worst <= 1.0 + 1e-8, format!("max Tr(PQ) = {worst:.10} over {} × {} pairs", abelian.len(), clique.len())))
}

fn duality(s: &OperatorSystem, r: &ThetaReport, cfg: &RunConfig) -> Result<(bool, String)> {
    let c = opsys::complement(s);
    let involution = opsys::complement(&c).same_as(s);
    let family = match &r.alpha.lower_certificate {
        Certificate::Vectors { vectors, .. } => Some(vectors.columns()),
        _ => match s.graph() {
            Some(g) => Some(graphs::maximum_independent_set(&g)?.into_iter().map(|v| crate::linalg::basis_vector(s.dim_h(), v)).collect()),
            None => None,
        },
    };
    let swap = match &family {
        Some(f) if f.len() >= 2 => is_clique_set(&c, f, cfg.tol)?,
        _ => true,
    };
    Ok((involution && swap, format!("S^cc = S: {involution}; independent set is a clique of S^c: {swap}")))
}

fn kraus_independence(s: &OperatorSystem, cfg: &RunConfig) -> Result<(bool, String)> {
    let e = build_ensemble(s, &LovaszOptions { budget: 1, ..cfg.lovasz() })?;
    let mut rng = restart_rng(cfg.seed, 12);
    let mut worst: f64 = 0.0;
    for c in &e.channels {
        let m = c.kraus().len();
        let u = random_unitary(m, &mut rng);
        let mixed: Vec<_> = (0..m)
            .map(|p| {
                let mut a = crate::linalg::ComplexMatrix::zeros(c.k(), c.d());
                for (q, b) in c.kraus().iter().enumerate() {
                    a.axpy(u[(p, q)], b);
                }
                a
            })
            .collect();
        let other = QuantumChannel::new(mixed)?;
        let (s1, s2) = (c.confusability()?, other.confusability()?);
        worst = worst.max(s1.subspace().containment_residual(s2.subspace())).max(s2.subspace().containment_residual(s1.subspace()));
    }
    Ok((worst <= 1e-7, format!("largest S_Φ mismatch across Kraus representations: {worst:.2e}")))
}

fn verify_system(s: &OperatorSystem, cfg: &RunConfig) -> Vec<SuiteResult> {
    let opts = cfg.lovasz();
    let mut out = vec![suite("first sandwich", first_sandwich(s, cfg))];
    let ensemble = build_ensemble(s, &opts);
    out.push(suite(
        "second sandwich",
        ensemble.and_then(|e| verify_second_sandwich(s, &e, 4, cfg.seed)).map(|r| {
            (r.passed, format!("‖Φ(P)‖ ≤ {:.10}, Tr(TQ) ≤ {:.10}, ⟨T, Φ*(σ)⟩ ≤ {:.10}", r.worst_abelian_norm, r.worst_full_pairing, r.worst_duality))
        }),
    ));
    match theta_report(s, &opts) {
        Ok(r) => {
            let v = r.chain.violations();
            let detail = if v.is_empty() { "every link holds".to_string() } else { format!("violated: {}", v.join(", ")) };
            out.push(suite("chains", Ok((r.chain.all(), detail))));
            out.push(suite("duality", duality(s, &r, cfg)));
        }
        Err(e) => {
            out.push(suite("chains", Err(e.clone())));
            out.push(suite("duality", Err(e)));
        }
    }
    out.push(suite("kraus independence", kraus_independence(s, cfg)));
    if s.dim_h() <= HEAVY_SUITE_LIMIT {
        out.push(suite(
            "stability",
            stability_check(s, 2, &opts).map(|r| (r.passed, format!("θ̂ upper: S {:.8}, M_2(S) {:.8}", r.upper_s, r.upper_amplified))),
        ));
        out.push(suite(
            "continuity",
            continuity_check(s, 1e-3, 0.05, &opts).map(|r| (r.passed, format!("largest shift {:.2e} at ε = {}", r.max_shift, r.eps))),
        ));
    }
    out
}

pub fn cmd_verify(corpus: &[CorpusEntry], cfg: &RunConfig) -> VerifyLedger {
    let items: Vec<ItemLedger> = corpus
        .par_iter()
        .map(|entry| match entry.load() {
            Ok(input) => ItemLedger { name: entry.name.clone(), validation_error: None, suites: verify_system(&input.system(), cfg) },
            Err(e) => ItemLedger { name: entry.name.clone(), validation_error: Some(e.to_string()), suites: Vec::new() },
        })
        .collect();
    let suites_passed = items.iter().all(|i| i.suites.iter().all(|s| s.passed));
    let validation_failures = items.iter().filter(|i| i.validation_error.is_some()).count();
    VerifyLedger { items, suites_passed, validation_failures }
}

// ---------------------------------------------------------------------------
// Reference values.

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Lower,
    Upper,
    Both,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub claim: String,
    pub expected: f64,
    pub tol: f64,
    pub side: Side,
    pub computed: BoundInterval,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReferenceTable {
    pub rows: Vec<ReferenceRow>,
    pub passed: bool,
}

fn reference_row(claim: &str, expected: f64, tol: f64, side: Side, computed: BoundInterval) -> ReferenceRow {
    let ok = |v: f64| (v - expected).abs() <= tol;
    let passed = match side {
        Side::Lower => ok(computed.lower),
        Side::Upper => ok(computed.upper),
        Side::Both => ok(computed.lower) && ok(computed.upper),
    };
    ReferenceRow { claim: claim.into(), expected, tol, side, computed, passed }
}

fn point(v: f64, rigor: Rigor, what: &str) -> BoundInterval {
    let c = Certificate::Note { text: what.into() };
    BoundInterval::new(v, rigor, c.clone(), v, rigor, c)
}

/// Recomputes the reference values of the library against their closed forms.
pub fn cmd_reproduce(cfg: &RunConfig) -> Result<ReferenceTable> {
    let opts = cfg.lovasz();
    let find = cfg.find();
    let copts = CornerOptions { samples: 8, find };
    let sqrt5 = 5f64.sqrt();
    let c5 = Graph::cycle(5);
    let sc5 = opsys::from_graph(&c5);
    let mut rows = Vec::new();

    let th = graphs::lovasz_theta(&c5)?;
    rows.push(reference_row("theta(C5) = sqrt 5", sqrt5, 1e-4, Side::Both, point(th.value, Rigor::Rigorous, "graph SDP")));
    let lab = graphs::optimal_labelling(&c5)?;
    rows.push(reference_row("optimal labelling value of C5 = sqrt 5", sqrt5, 1e-3, Side::Both, point(lab.value(), Rigor::Rigorous, "labelling value")));
    let th_hat = lovasz::theta_hat_upper(&build_ensemble(&sc5, &opts)?, &opts)?;
    rows.push(reference_row("theta_hat(S_C5) = sqrt 5", sqrt5, 1e-3, Side::Upper, point(th_hat.value, Rigor::Rigorous, "channel-state certificate")));
    let pet = graphs::lovasz_theta(&Graph::petersen())?;
    rows.push(reference_row("theta(Petersen) = 4", 4.0, 1e-4, Side::Both, point(pet.value, Rigor::Rigorous, "graph SDP")));
    let gp = cmd_graph_params(&c5, cfg)?;
    for (param, expected) in [("alpha", 2.0), ("omega", 2.0), ("chi", 3.0), ("omega_f", 2.5)] {
        let row = gp.rows.iter().find(|r| r.parameter == param).expect("row present");
        rows.push(reference_row(&format!("{param}(S_C5) = {expected}"), expected, 1e-6, Side::Both, row.system.clone()));
    }

    for d in 2..=4 {
        let s = OperatorSystem::scalars(d);
        let e = build_ensemble(&s, &opts)?;
        rows.push(reference_row(&format!("theta(CI_{d}) = {d}"), d as f64, 1e-6, Side::Lower, lovasz::theta_lower(&s, &e, &opts)?));
        let c = lovasz::theta_hat_upper(&e, &opts)?;
        rows.push(reference_row(&format!("theta_hat(CI_{d}) = {d}"), d as f64, 1e-6, Side::Upper, point(c.value, Rigor::Rigorous, "channel-state certificate")));
    }
    let m2 = opsys::amplify(&OperatorSystem::scalars(2), 2);
    let dsw = lovasz::dsw_theta_seesaw(&m2, cfg.restarts.max(8), cfg.seed)?;
    rows.push(reference_row("dsw theta(M_2(CI_2)) = 4", 4.0, 1e-3, Side::Lower, point(dsw.value, Rigor::Rigorous, "see-saw value")));

    let s2 = opsys::s_n(2)?;
    rows.push(reference_row("kappa(S_2) = 1", 1.0, 1e-6, Side::Both, crate::corners::kappa_bounds(&s2, &copts)?));
    for n in 2..=3 {
        let s = opsys::s_family(&[n])?;
        rows.push(reference_row(&format!("omega(S_{n}) = {n}"), n as f64, 1e-9, Side::Both, omega_bounds(&s, &find)));
        rows.push(reference_row(&format!("omega_f(S_{n}) = {n}"), n as f64, 1e-6, Side::Both, omega_f_bounds(&s, &copts)?));
        rows.push(reference_row(&format!("phi(S_{n}) = {n}"), n as f64, 1e-6, Side::Both, crate::corners::phi_bounds(&s, &copts)?));
        rows.push(reference_row(&format!("chi(S_{n}) = {n}"), n as f64, 1e-9, Side::Upper, chi_bounds(&s, 1.0, &find)));
    }
    let s22 = opsys::s_family(&[2, 2])?;
    rows.push(reference_row("alpha(S_2,2) = 1", 1.0, 1e-9, Side::Both, crate::projections::alpha_bounds(&s22, &find)));
    rows.push(reference_row("omega_tilde(S_2,2) = 1", 1.0, 1e-9, Side::Both, omega_tilde_bounds(&s22, &find)));
    rows.push(reference_row("phi(S_2,2) = 4", 4.0, 1e-6, Side::Both, crate::corners::phi_bounds(&s22, &copts)?));
    let full = OperatorSystem::full(3);
    rows.push(reference_row("theta(M_3) = 1", 1.0, 1e-9, Side::Both, lovasz::theta_lower(&full, &build_ensemble(&full, &opts)?, &opts)?));

    let cap = graph_capacity_bracket(&c5, 2)?;
    rows.push(reference_row("alpha(C5 x C5) = 5", 5.0, 0.0, Side::Both, point(cap.powers[1].alpha as f64, cap.powers[1].rigor, "exact independence number")));
    let bracket = BoundInterval::new(cap.lower, Rigor::Rigorous, Certificate::None, cap.upper, cap.upper_rigor, Certificate::None);
    rows.push(reference_row("capacity bracket of C5 = [sqrt 5, sqrt 5]", sqrt5, 1e-3, Side::Both, bracket));
    let st = stability_check(&sc5, 2, &opts)?;
    rows.push(reference_row("theta_hat(M_2(S_C5)) = sqrt 5", sqrt5, 1e-3, Side::Upper, point(st.upper_amplified, Rigor::Rigorous, "amplified certificate")));

    let passed = rows.iter().all(|r| r.passed);
    Ok(ReferenceTable { rows, passed })
}

// ---------------------------------------------------------------------------
// Capacity.

pub fn cmd_capacity(input: &Input, cfg: &RunConfig) -> Result<CapacityBracket> {
    match input {
        Input::Graph(g) => graph_capacity_bracket(g, cfg.max_power),
        Input::System(s) => system_capacity_bracket(s, cfg.max_power, &cfg.lovasz()),
    }
}

// ---------------------------------------------------------------------------
// Text rendering.

fn rigor_tag(r: Rigor) -> &'static str {
    match r {
        Rigor::Rigorous => "rig",
        Rigor::Heuristic => "heur",
    }
}

fn fmt_num(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v:.6}")
    }
}

fn fmt_interval(b: &BoundInterval) -> String {
    if b.is_collapsed(1e-6) && b.lower_rigor == b.upper_rigor {
        format!("{} ({})", fmt_num(b.lower), rigor_tag(b.lower_rigor))
    } else {
        format!("[{} ({}), {} ({})]", fmt_num(b.lower), rigor_tag(b.lower_rigor), fmt_num(b.upper), rigor_tag(b.upper_rigor))
    }
}

/// Left-aligned columns separated by two spaces.
pub fn render_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(headers.to_vec(), &mut out);
    line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect(), &mut out);
    for r in rows {
        line(r.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

pub trait RenderText {
    fn render_text(&self) -> String;
}

impl RenderText for SystemParams {
    fn render_text(&self) -> String {
        let mut out = format!("d = {}, dim S = {}, {}\n\n", self.d, self.dim, self.structure);
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| vec![r.parameter.clone(), fmt_interval(&r.system), r.classical.as_ref().map(fmt_interval).unwrap_or_else(|| "-".into())])
            .collect();
        out.push_str(&render_table(&["parameter", "operator system", "graph"], &rows));
        let _ = writeln!(out, "\nchain consistency: {}", if self.chain.all() { "ok" } else { "VIOLATED" });
        if self.falsification {
            out.push_str("theta_hat certificate lies below the theta lower bound\n");
        }
        out
    }
}

impl RenderText for VerifyLedger {
    fn render_text(&self) -> String {
        let mut rows = Vec::new();
        for item in &self.items {
            if let Some(e) = &item.validation_error {
                rows.push(vec![item.name.clone(), "validation".into(), "FAIL".into(), e.clone()]);
            }
            for s in &item.suites {
                rows.push(vec![item.name.clone(), s.suite.clone(), if s.passed { "pass" } else { "FAIL" }.into(), s.detail.clone()]);
            }
        }
        let mut out = render_table(&["item", "suite", "result", "detail"], &rows);
        let _ = writeln!(out, "\n{} items, suites {}, {} validation failures", self.items.len(), if self.suites_passed { "passed" } else { "FAILED" }, self.validation_failures);
        out
    }
}

impl RenderText for ReferenceTable {
    fn render_text(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| vec![r.claim.clone(), fmt_interval(&r.computed), format!("{:e}", r.tol), if r.passed { "pass" } else { "FAIL" }.into()])
            .collect();
        render_table(&["claim", "computed", "tol", "result"], &rows)
    }
}

impl RenderText for CapacityBracket {
    fn render_text(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .powers
            .iter()
            .map(|p| vec![p.n.to_string(), format!("{} ({})", p.alpha, rigor_tag(p.rigor)), p.source.clone(), p.verified.clone()])
            .collect();
        let mut out = render_table(&["n", "alpha", "source", "verified"], &rows);
        let _ = writeln!(out, "\nc0 in [{} (rig, n = {}), {} ({})]", fmt_num(self.lower), self.best_n, fmt_num(self.upper), rigor_tag(self.upper_rigor));
        if let Some(a) = &self.audit {
            let _ = writeln!(out, "submultiplicativity audit: {} (product certificate {} vs factor {})", if a.passed { "pass" } else { "FAIL" }, fmt_num(a.product_upper), fmt_num(a.factor_upper));
        }
        out
    }
}

/// Serializes per the configured format.
pub fn render<T: Serialize + RenderText>(value: &T, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(value)? + "\n",
        Format::Text => value.render_text(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_inputs() {
        assert!(matches!(parse_named("c5").unwrap(), Input::Graph(g) if g == Graph::cycle(5)));
        assert!(matches!(parse_named("k4").unwrap(), Input::Graph(g) if g == Graph::complete(4)));
        assert!(matches!(parse_named("s:2,2").unwrap(), Input::System(s) if s.dim_h() == 4));
        assert!(matches!(parse_named("amplify:2:scalars:2").unwrap(), Input::System(s) if s.dim_h() == 4 && s.dim() == 4));
        assert!(matches!(parse_named("graph:c5").unwrap(), Input::System(s) if s.graph().is_some()));
        assert!(parse_named("nonsense").is_err());
        assert!(parse_named("cycle:x").is_err());
    }

    #[test]
    fn corrupted_system_is_a_validation_failure() {
        // span{I, E_01} is not closed under adjoints.
        let v = serde_json::json!({
            "ambient_dim": 2,
            "basis": [
                {"rows": 2, "cols": 2, "data": [[std::f64::consts::FRAC_1_SQRT_2, 0.0], [0.0, 0.0], [0.0, 0.0], [std::f64::consts::FRAC_1_SQRT_2, 0.0]]},
                {"rows": 2, "cols": 2, "data": [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]}
            ]
        });
        let corpus = vec![CorpusEntry { name: "bad".into(), source: CorpusSource::Inline(v) }];
        let ledger = cmd_verify(&corpus, &RunConfig::default());
        assert_eq!(ledger.validation_failures, 1);
        assert!(ledger.items[0].suites.is_empty());
        assert_eq!(ledger.exit_code(), EXIT_VALIDATION);
        assert_eq!(cmd_verify(&[], &RunConfig::default()).exit_code(), EXIT_OK);
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        assert!(RunConfig { tol: 0.5, ..Default::default() }.validate().is_err());
        assert!(RunConfig { restarts: 0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn graph_params_for_c5() {
        let p = cmd_graph_params(&Graph::cycle(5), &RunConfig::default()).unwrap();
        let get = |n: &str| p.rows.iter().find(|r| r.parameter == n).unwrap().clone();
        assert_eq!(get("alpha").system.lower, 2.0);
        assert_eq!(get("chi").system.upper, 3.0);
        assert_eq!(get("chi").classical.unwrap().lower, 3.0);
        assert!((get("omega_f").system.lower - 2.5).abs() < 1e-6);
        assert!((get("theta").system.lower - 5f64.sqrt()).abs() < 1e-6);
        assert!(p.chain.all());
        let text = p.render_text();
        assert!(text.contains("theta_hat"));
    }
}
