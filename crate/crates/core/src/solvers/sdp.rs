//! Primal–dual interior point method for block-diagonal complex SDPs.
//!
//! Standard form over `X = diag(X_1, …, X_B)` with hermitian PSD blocks and
//! nonnegative diagonal blocks:
//!
//! ```text
//! primal:  min ⟨C, X⟩   s.t. ⟨A_i, X⟩ = b_i,  X ⪰ 0
//! dual:    max bᵀy      s.t. Z = C − Σ y_i A_i ⪰ 0
//! ```
//!
//! with `⟨A, X⟩ = Re Tr(A X)`. Search direction is HKM with Mehrotra
//! predictor–corrector.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::eig::{cholesky, hpd_inverse, jacobi_eigen, lower_inverse, real_solve, spd_solve};
use crate::linalg::{ComplexMatrix, HermitianOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockKind {
    /// Hermitian PSD block of the given order.
    Psd(usize),
    /// Nonnegative vector of the given length.
    Diag(usize),
}

impl BlockKind {
    pub fn size(&self) -> usize {
        match *self {
            BlockKind::Psd(n) | BlockKind::Diag(n) => n,
        }
    }
}

/// Coefficient data for one block.
#[derive(Clone, Debug)]
pub enum BlockData {
    /// Hermitian dense matrix.
    Dense(ComplexMatrix),
    /// Hermitian matrix as a list of entries (both triangles present).
    Sparse(Vec<(usize, usize, C64)>),
    Diag(Vec<f64>),
}

impl BlockData {
    /// Symmetric entry pair `v E_ij + conj(v) E_ji` (or `v E_ii` for `i = j`, `v` real).
    pub fn sym_entry(i: usize, j: usize, v: C64) -> Self {
        if i == j {
            BlockData::Sparse(vec![(i, i, C64::new(v.re, 0.0))])
        } else {
            BlockData::Sparse(vec![(i, j, v), (j, i, v.conj())])
        }
    }

    fn scale(&mut self, s: f64) {
        match self {
            BlockData::Dense(m) => *m = m.scale_re(s),
            BlockData::Sparse(e) => e.iter_mut().for_each(|(_, _, v)| *v *= s),
            BlockData::Diag(d) => d.iter_mut().for_each(|v| *v *= s),
        }
    }

    fn norm_sqr(&self) -> f64 {
        match self {
            BlockData::Dense(m) => m.fro_norm().powi(2),
            BlockData::Sparse(e) => e.iter().map(|(_, _, v)| v.norm_sqr()).sum(),
            BlockData::Diag(d) => d.iter().map(|v| v * v).sum(),
        }
    }

    /// `Re Tr(self · V)`.
    fn pair(&self, v: &BlockValue) -> f64 {
        match (self, v) {
            (BlockData::Dense(a), BlockValue::Psd(x)) => a.real_pairing(x),
            (BlockData::Sparse(e), BlockValue::Psd(x)) => e.iter().map(|&(i, j, a)| (a * x[(j, i)]).re).sum(),
            (BlockData::Diag(a), BlockValue::Diag(x)) => a.iter().zip(x).map(|(a, x)| a * x).sum(),
            _ => panic!("block kind mismatch"),
        }
    }

    /// `target += s · self`.
    fn add_to(&self, target: &mut BlockValue, s: f64) {
        match (self, target) {
            (BlockData::Dense(a), BlockValue::Psd(x)) => x.axpy(C64::new(s, 0.0), a),
            (BlockData::Sparse(e), BlockValue::Psd(x)) => {
                for &(i, j, a) in e {
                    x[(i, j)] += a * s;
                }
            }
            (BlockData::Diag(a), BlockValue::Diag(x)) => x.iter_mut().zip(a).for_each(|(x, a)| *x += s * a),
            _ => panic!("block kind mismatch"),
        }
    }

    fn matches(&self, kind: BlockKind) -> bool {
        match (self, kind) {
            (BlockData::Dense(m), BlockKind::Psd(n)) => m.shape() == (n, n),
            (BlockData::Sparse(e), BlockKind::Psd(n)) => e.iter().all(|&(i, j, _)| i < n && j < n),
            (BlockData::Diag(d), BlockKind::Diag(n)) => d.len() == n,
            _ => false,
        }
    }
}

/// Value of one block of a primal or dual variable.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum BlockValue {
    Psd(ComplexMatrix),
    Diag(Vec<f64>),
}

impl BlockValue {
    fn zeros(kind: BlockKind) -> Self {
        match kind {
            BlockKind::Psd(n) => BlockValue::Psd(ComplexMatrix::zeros(n, n)),
            BlockKind::Diag(n) => BlockValue::Diag(vec![0.0; n]),
        }
    }

    fn identity(kind: BlockKind, s: f64) -> Self {
        match kind {
            BlockKind::Psd(n) => BlockValue::Psd(ComplexMatrix::identity(n).scale_re(s)),
            BlockKind::Diag(n) => BlockValue::Diag(vec![s; n]),
        }
    }

    fn axpy(&mut self, s: f64, other: &BlockValue) {
        match (self, other) {
            (BlockValue::Psd(a), BlockValue::Psd(b)) => a.axpy(C64::new(s, 0.0), b),
            (BlockValue::Diag(a), BlockValue::Diag(b)) => a.iter_mut().zip(b).for_each(|(a, b)| *a += s * b),
            _ => panic!("block kind mismatch"),
        }
    }

    fn dot(&self, other: &BlockValue) -> f64 {
        match (self, other) {
            (BlockValue::Psd(a), BlockValue::Psd(b)) => a.real_pairing(b),
            (BlockValue::Diag(a), BlockValue::Diag(b)) => a.iter().zip(b).map(|(a, b)| a * b).sum(),
            _ => panic!("block kind mismatch"),
        }
    }

    fn norm_sqr(&self) -> f64 {
        match self {
            BlockValue::Psd(a) => a.fro_norm().powi(2),
            BlockValue::Diag(a) => a.iter().map(|v| v * v).sum(),
        }
    }

    pub fn as_matrix(&self) -> ComplexMatrix {
        match self {
            BlockValue::Psd(a) => a.clone(),
            BlockValue::Diag(a) => ComplexMatrix::diag_real(a),
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        match self {
            BlockValue::Psd(a) => jacobi_eigen(a).min(),
            BlockValue::Diag(a) => a.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }
}

/// A block SDP in standard form.
#[derive(Clone, Debug)]
pub struct BlockSdp {
    pub blocks: Vec<BlockKind>,
    /// Objective per block (`None` = zero).
    pub c: Vec<Option<BlockData>>,
    /// Constraint `i` as a list of (block, data).
    pub a: Vec<Vec<(usize, BlockData)>>,
    pub b: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SdpStatus {
    Optimal,
    /// Stalled short of the target accuracy but within the relaxed one.
    NearOptimal,
    PrimalInfeasible,
    DualInfeasible,
    MaxIterations,
    NumericalFailure,
}

impl SdpStatus {
    pub fn is_ok(self) -> bool {
        matches!(self, SdpStatus::Optimal | SdpStatus::NearOptimal)
    }
}

#[derive(Clone, Debug)]
pub struct BlockSolution {
    pub status: SdpStatus,
    pub x: Vec<BlockValue>,
    pub y: Vec<f64>,
    pub z: Vec<BlockValue>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub iterations: usize,
}

impl BlockSolution {
    pub fn gap(&self) -> f64 {
        (self.primal_objective - self.dual_objective).abs()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SdpOptions {
    pub max_iterations: usize,
    /// Relative tolerance on infeasibilities and gap.
    pub tol: f64,
    /// Accepted accuracy when progress stalls.
    pub relaxed_tol: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { max_iterations: 120, tol: 1e-9, relaxed_tol: 1e-6 }
    }
}

impl BlockSdp {
    fn validate(&self) -> Result<()> {
        if self.c.len() != self.blocks.len() {
            return Err(Error::shape(format!("{} objective blocks", self.blocks.len()), format!("{}", self.c.len())));
        }
        if self.a.len() != self.b.len() {
            return Err(Error::shape(format!("{} rhs values", self.a.len()), format!("{}", self.b.len())));
        }
        for (k, c) in self.c.iter().enumerate() {
            if let Some(c) = c {
                if !c.matches(self.blocks[k]) {
                    return Err(Error::shape(format!("{:?}", self.blocks[k]), "objective block".to_string()));
                }
            }
        }
        for (i, row) in self.a.iter().enumerate() {
            for (k, d) in row {
                if *k >= self.blocks.len() || !d.matches(self.blocks[*k]) {
                    return Err(Error::shape("constraint block matching the block structure", format!("constraint {i}")));
                }
            }
        }
        Ok(())
    }

    fn apply_a(&self, x: &[BlockValue]) -> Vec<f64> {
        self.a.iter().map(|row| row.iter().map(|(k, d)| d.pair(&x[*k])).sum()).collect()
    }

    /// `C − Σ y_i A_i`.
    fn dual_slack(&self, y: &[f64]) -> Vec<BlockValue> {
        let mut z: Vec<BlockValue> = self.blocks.iter().map(|&k| BlockValue::zeros(k)).collect();
        for (k, c) in self.c.iter().enumerate() {
            if let Some(c) = c {
                c.add_to(&mut z[k], 1.0);
            }
        }
        for (row, yi) in self.a.iter().zip(y) {
            for (k, d) in row {
                d.add_to(&mut z[*k], -yi);
            }
        }
        for zb in z.iter_mut() {
            if let BlockValue::Psd(m) = zb {
                *m = m.hermitian_part();
            }
        }
        z
    }

    fn objective(&self, x: &[BlockValue]) -> f64 {
        self.c.iter().enumerate().map(|(k, c)| c.as_ref().map_or(0.0, |c| c.pair(&x[k]))).sum()
    }
}

fn herm(m: &ComplexMatrix) -> ComplexMatrix {
    m.hermitian_part()
}

/// Largest step `α ≤ 1/γ`-scaled such that `X + α ΔX` stays PSD.
fn max_step(x: &BlockValue, dx: &BlockValue) -> Option<f64> {
    match (x, dx) {
        (BlockValue::Psd(x), BlockValue::Psd(dx)) => {
            let l = cholesky(x)?;
            let li = lower_inverse(&l);
            let w = li.matmul(dx).mul_adjoint(&li);
            let lmin = jacobi_eigen(&w).min();
            Some(if lmin < 0.0 { -1.0 / lmin } else { f64::INFINITY })
        }
        (BlockValue::Diag(x), BlockValue::Diag(dx)) => {
            let mut a = f64::INFINITY;
            for (x, d) in x.iter().zip(dx) {
                if *d < 0.0 {
                    a = a.min(-x / d);
                }
            }
            Some(a)
        }
        _ => None,
    }
}

struct Workspace {
    zinv: Vec<BlockValue>,
}

/// Solves a block SDP.
pub fn solve_block_sdp(p: &BlockSdp, opts: &SdpOptions) -> Result<BlockSolution> {
    p.validate()?;
    let m = p.a.len();
    let nb = p.blocks.len();
    let total_n: usize = p.blocks.iter().map(|k| k.size()).sum();
    if total_n == 0 {
        return Err(Error::EmptyInput("SDP blocks"));
    }

    // Row scaling and objective / rhs normalization.
    let mut sp = p.clone();
    let mut row_scale = vec![1.0; m];
    for i in 0..m {
        let nrm: f64 = sp.a[i].iter().map(|(_, d)| d.norm_sqr()).sum::<f64>().sqrt();
        if nrm == 0.0 {
            if p.b[i].abs() > 1e-12 {
                return Ok(infeasible_solution(p, SdpStatus::PrimalInfeasible));
            }
            continue;
        }
        row_scale[i] = 1.0 / nrm;
        for (_, d) in sp.a[i].iter_mut() {
            d.scale(row_scale[i]);
        }
        sp.b[i] *= row_scale[i];
    }
    let c_norm: f64 = sp.c.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let b_norm: f64 = sp.b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let c_scale = 1.0 / c_norm.max(1.0);
    let b_scale = 1.0 / b_norm.max(1.0);
    for c in sp.c.iter_mut().flatten() {
        c.scale(c_scale);
    }
    sp.b.iter_mut().for_each(|v| *v *= b_scale);

    // Per-block index of constraints touching it.
    let mut touching: Vec<Vec<(usize, &BlockData)>> = vec![Vec::new(); nb];
    for (i, row) in sp.a.iter().enumerate() {
        for (k, d) in row {
            touching[*k].push((i, d));
        }
    }

    let nf = total_n as f64;
    let xi0 = (nf.sqrt()).max(10.0);
    let mut x: Vec<BlockValue> = sp.blocks.iter().map(|&k| BlockValue::identity(k, xi0)).collect();
    let mut z: Vec<BlockValue> = sp.blocks.iter().map(|&k| BlockValue::identity(k, xi0)).collect();
    let mut y = vec![0.0; m];

    let bnorm1 = 1.0 + sp.b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let cnorm1 = 1.0 + sp.c.iter().flatten().map(|c| c.norm_sqr().sqrt()).fold(0.0, f64::max);

    let mut status = SdpStatus::MaxIterations;
    let mut iterations = 0;
    let mut best_err = f64::INFINITY;
    let mut stall = 0;
    let mut best: Option<(Vec<BlockValue>, Vec<f64>, Vec<BlockValue>)> = None;

    for it in 0..opts.max_iterations {
        iterations = it + 1;
        let ax = sp.apply_a(&x);
        let rp: Vec<f64> = sp.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let zc = sp.dual_slack(&y);
        // R_d = C − A*y − Z
        let rd: Vec<BlockValue> = zc
            .iter()
            .zip(&z)
            .map(|(zc, z)| {
                let mut r = zc.clone();
                r.axpy(-1.0, z);
                r
            })
            .collect();
        let mu_num: f64 = x.iter().zip(&z).map(|(x, z)| x.dot(z)).sum();
        let mu = mu_num / nf;
        let pobj = sp.objective(&x);
        let dobj: f64 = sp.b.iter().zip(&y).map(|(b, y)| b * y).sum();
        let pinf = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / bnorm1;
        let dinf = rd.iter().map(|r| r.norm_sqr()).sum::<f64>().sqrt() / cnorm1;
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let err = pinf.max(dinf).max(gap);
        if err <= opts.tol {
            status = SdpStatus::Optimal;
            break;
        }
        if err < best_err * 0.9 {
            best_err = err;
            stall = 0;
            best = Some((x.clone(), y.clone(), z.clone()));
        } else {
            if err < best_err {
                best_err = err;
                best = Some((x.clone(), y.clone(), z.clone()));
            }
            stall += 1;
            if stall >= 8 {
                status = SdpStatus::MaxIterations;
                break;
            }
        }
        // Divergence checks (infeasibility certificates in the limit).
        let xnorm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if ynorm > 1e10 && dobj > 1e8 && pinf > 1e-6 {
            status = SdpStatus::PrimalInfeasible;
            break;
        }
        if xnorm > 1e10 && pobj < -1e8 && dinf > 1e-6 {
            status = SdpStatus::DualInfeasible;
            break;
        }

        // Z⁻¹ per block.
        let mut ws = Workspace { zinv: Vec::with_capacity(nb) };
        let mut failed = false;
        for zb in &z {
            match zb {
                BlockValue::Psd(zm) => match hpd_inverse(zm) {
                    Some(inv) => ws.zinv.push(BlockValue::Psd(herm(&inv))),
                    None => {
                        failed = true;
                        break;
                    }
                },
                BlockValue::Diag(d) => ws.zinv.push(BlockValue::Diag(d.iter().map(|v| 1.0 / v).collect())),
            }
        }
        if failed {
            status = SdpStatus::NumericalFailure;
            break;
        }

        // Schur complement M_ij = Re Tr(A_i X A_j Z⁻¹).
        let mut schur = vec![0.0; m * m];
        for k in 0..nb {
            let list = &touching[k];
            match (&x[k], &ws.zinv[k]) {
                (BlockValue::Psd(xm), BlockValue::Psd(zi)) => {
                    for (jj, &(j, dj)) in list.iter().enumerate() {
                        let pj = x_a_zinv(xm, dj, zi);
                        for &(i, di) in &list[..=jj] {
                            let v = di.pair(&BlockValue::Psd(pj.clone()));
                            schur[i * m + j] += v;
                            if i != j {
                                schur[j * m + i] += v;
                            }
                        }
                    }
                }
                (BlockValue::Diag(xd), BlockValue::Diag(zi)) => {
                    let w: Vec<f64> = xd.iter().zip(zi).map(|(a, b)| a * b).collect();
                    for (jj, &(j, dj)) in list.iter().enumerate() {
                        let BlockData::Diag(aj) = dj else { unreachable!() };
                        for &(i, di) in &list[..=jj] {
                            let BlockData::Diag(ai) = di else { unreachable!() };
                            let v: f64 = ai.iter().zip(aj).zip(&w).map(|((a, b), w)| a * b * w).sum();
                            schur[i * m + j] += v;
                            if i != j {
                                schur[j * m + i] += v;
                            }
                        }
                    }
                }
                _ => unreachable!(),
            }
        }
        // X R_d Z⁻¹ and Z⁻¹ terms shared by predictor and corrector.
        let x_rd_zinv: Vec<BlockValue> = (0..nb).map(|k| prod3(&x[k], &rd[k], &ws.zinv[k])).collect();
        let a_x_rd_zinv = sp.apply_a(&x_rd_zinv);
        let a_zinv = sp.apply_a(&ws.zinv);

        let solve_dir = |sigma_mu: f64, corr: Option<&[BlockValue]>| -> Option<(Vec<BlockValue>, Vec<f64>, Vec<BlockValue>)> {
            // G = ΔX_a ΔZ_a Z⁻¹ (corrector only).
            let a_g = corr.map(|g| sp.apply_a(g));
            let rhs: Vec<f64> = (0..m)
                .map(|i| sp.b[i] - sigma_mu * a_zinv[i] + a_x_rd_zinv[i] + a_g.as_ref().map_or(0.0, |v| v[i]))
                .collect();
            let dy = solve_schur(&schur, m, &rhs)?;
            // ΔZ = R_d − A*Δy
            let mut dz = rd.clone();
            for (row, dyi) in sp.a.iter().zip(&dy) {
                for (k, d) in row {
                    d.add_to(&mut dz[*k], -dyi);
                }
            }
            let mut dx = Vec::with_capacity(nb);
            for k in 0..nb {
                let t = prod3(&x[k], &dz[k], &ws.zinv[k]);
                let mut v = ws.zinv[k].clone();
                scale_value(&mut v, sigma_mu);
                v.axpy(-1.0, &x[k]);
                v.axpy(-1.0, &t);
                if let Some(g) = corr {
                    v.axpy(-1.0, &g[k]);
                }
                if let BlockValue::Psd(mm) = &mut v {
                    *mm = herm(mm);
                }
                if let BlockValue::Psd(mm) = &mut dz[k] {
                    *mm = herm(mm);
                }
                dx.push(v);
            }
            Some((dx, dy, dz))
        };

        let steps = |dx: &[BlockValue], dz: &[BlockValue]| -> Option<(f64, f64)> {
            let mut ap = f64::INFINITY;
            let mut ad = f64::INFINITY;
            for k in 0..nb {
                ap = ap.min(max_step(&x[k], &dx[k])?);
                ad = ad.min(max_step(&z[k], &dz[k])?);
            }
            Some((ap, ad))
        };

        // Predictor.
        let Some((dxa, _dya, dza)) = solve_dir(0.0, None) else {
            status = SdpStatus::NumericalFailure;
            break;
        };
        let Some((apa, ada)) = steps(&dxa, &dza) else {
            status = SdpStatus::NumericalFailure;
            break;
        };
        let apa = apa.min(1.0);
        let ada = ada.min(1.0);
        let mut mu_aff = 0.0;
        for k in 0..nb {
            let mut xa = x[k].clone();
            xa.axpy(apa, &dxa[k]);
            let mut za = z[k].clone();
            za.axpy(ada, &dza[k]);
            mu_aff += xa.dot(&za);
        }
        mu_aff /= nf;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3).max(if pinf.max(dinf) > 1e-3 { 0.1 } else { 0.0 });

        // Corrector.
        let g: Vec<BlockValue> = (0..nb).map(|k| prod3(&dxa[k], &dza[k], &ws.zinv[k])).collect();
        let Some((dx, dy, dz)) = solve_dir(sigma * mu, Some(&g)) else {
            status = SdpStatus::NumericalFailure;
            break;
        };
        let Some((ap, ad)) = steps(&dx, &dz) else {
            status = SdpStatus::NumericalFailure;
            break;
        };
        let gamma = if err < 1e-6 { 0.98 } else { 0.95 };
        let ap = (gamma * ap).min(1.0);
        let ad = (gamma * ad).min(1.0);
        for k in 0..nb {
            x[k].axpy(ap, &dx[k]);
            z[k].axpy(ad, &dz[k]);
            for v in [&mut x[k], &mut z[k]] {
                if let BlockValue::Psd(mm) = v {
                    *mm = herm(mm);
                }
            }
        }
        for (yi, d) in y.iter_mut().zip(&dy) {
            *yi += ad * d;
        }
    }

    if status != SdpStatus::Optimal {
        if let Some((bx, by, bz)) = best.take() {
            if matches!(status, SdpStatus::MaxIterations | SdpStatus::NumericalFailure) {
                x = bx;
                y = by;
                z = bz;
            }
        }
    }

    // Final residuals in scaled units.
    let ax = sp.apply_a(&x);
    let pinf = sp.b.iter().zip(&ax).map(|(b, a)| (b - a).powi(2)).sum::<f64>().sqrt() / bnorm1;
    let zc = sp.dual_slack(&y);
    let dinf = zc
        .iter()
        .zip(&z)
        .map(|(zc, z)| {
            let mut r = zc.clone();
            r.axpy(-1.0, z);
            r.norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
        / cnorm1;
    let pobj_s = sp.objective(&x);
    let dobj_s: f64 = sp.b.iter().zip(&y).map(|(b, y)| b * y).sum();
    let gap = (pobj_s - dobj_s).abs() / (1.0 + pobj_s.abs() + dobj_s.abs());
    if matches!(status, SdpStatus::MaxIterations | SdpStatus::NumericalFailure) && pinf.max(dinf).max(gap) <= opts.relaxed_tol {
        status = SdpStatus::NearOptimal;
    }

    // Undo scaling: X = X'/b_scale, y_i = y'_i row_scale_i / c_scale, Z = Z'/c_scale.
    let x_out: Vec<BlockValue> = x
        .into_iter()
        .map(|mut v| {
            scale_value(&mut v, 1.0 / b_scale);
            v
        })
        .collect();
    let z_out: Vec<BlockValue> = z
        .into_iter()
        .map(|mut v| {
            scale_value(&mut v, 1.0 / c_scale);
            v
        })
        .collect();
    let y_out: Vec<f64> = y.iter().zip(&row_scale).map(|(y, r)| y * r / c_scale).collect();
    let primal_objective = p.objective(&x_out);
    let dual_objective: f64 = p.b.iter().zip(&y_out).map(|(b, y)| b * y).sum();
    Ok(BlockSolution {
        status,
        x: x_out,
        y: y_out,
        z: z_out,
        primal_objective,
        dual_objective,
        primal_infeasibility: pinf,
        dual_infeasibility: dinf,
        iterations,
    })
}

fn infeasible_solution(p: &BlockSdp, status: SdpStatus) -> BlockSolution {
    BlockSolution {
        status,
        x: p.blocks.iter().map(|&k| BlockValue::zeros(k)).collect(),
        y: vec![0.0; p.a.len()],
        z: p.blocks.iter().map(|&k| BlockValue::zeros(k)).collect(),
        primal_objective: f64::NAN,
        dual_objective: f64::NAN,
        primal_infeasibility: f64::INFINITY,
        dual_infeasibility: f64::INFINITY,
        iterations: 0,
    }
}

fn scale_value(v: &mut BlockValue, s: f64) {
    match v {
        BlockValue::Psd(m) => *m = m.scale_re(s),
        BlockValue::Diag(d) => d.iter_mut().for_each(|x| *x *= s),
    }
}

/// `X A Z⁻¹` for a constraint block.
fn x_a_zinv(x: &ComplexMatrix, a: &BlockData, zinv: &ComplexMatrix) -> ComplexMatrix {
    let n = x.rows();
    match a {
        BlockData::Dense(am) => x.matmul(am).matmul(zinv),
        BlockData::Sparse(entries) => {
            let mut out = ComplexMatrix::zeros(n, n);
            for &(r, c, v) in entries {
                for i in 0..n {
                    let xv = x[(i, r)] * v;
                    if xv == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for j in 0..n {
                        out[(i, j)] += xv * zinv[(c, j)];
                    }
                }
            }
            out
        }
        BlockData::Diag(_) => panic!("diagonal data in a PSD block"),
    }
}

/// `A B C` for block values (non-hermitian result for PSD blocks).
fn prod3(a: &BlockValue, b: &BlockValue, c: &BlockValue) -> BlockValue {
    match (a, b, c) {
        (BlockValue::Psd(a), BlockValue::Psd(b), BlockValue::Psd(c)) => BlockValue::Psd(a.matmul(b).matmul(c)),
        (BlockValue::Diag(a), BlockValue::Diag(b), BlockValue::Diag(c)) => {
            BlockValue::Diag(a.iter().zip(b).zip(c).map(|((a, b), c)| a * b * c).collect())
        }
        _ => panic!("block kind mismatch"),
    }
}

fn solve_schur(schur: &[f64], m: usize, rhs: &[f64]) -> Option<Vec<f64>> {
    if m == 0 {
        return Some(vec![]);
    }
    let mut sol = rhs.to_vec();
    if spd_solve(schur, m, &mut sol) {
        return Some(sol);
    }
    let dmax = (0..m).map(|i| schur[i * m + i].abs()).fold(0.0, f64::max).max(1e-300);
    for reg in [1e-14, 1e-12, 1e-10] {
        let mut s = schur.to_vec();
        for i in 0..m {
            s[i * m + i] += reg * dmax;
        }
        let mut sol = rhs.to_vec();
        if spd_solve(&s, m, &mut sol) {
            return Some(sol);
        }
    }
    let mut sol = rhs.to_vec();
    if real_solve(schur, m, &mut sol) && sol.iter().all(|v| v.is_finite()) {
        return Some(sol);
    }
    None
}

// ---------------------------------------------------------------------------
// Single-block front end.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintSense {
    Le,
    Eq,
    Ge,
}

/// `max/min ⟨C, X⟩` over hermitian `X ⪰ 0` of order `n`, subject to
/// `⟨A_i, X⟩ (≤ | = | ≥) b_i`.
#[derive(Clone, Debug)]
pub struct SemidefiniteProgram {
    pub n: usize,
    pub objective: HermitianOperator,
    pub constraints: Vec<(HermitianOperator, ConstraintSense, f64)>,
    pub maximize: bool,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub x: HermitianOperator,
    /// Objective at `x`, in the problem's own sense.
    pub value: f64,
    /// Value of the dual certificate (an upper bound when maximizing, up to residuals).
    pub dual_value: f64,
    pub gap: f64,
    pub status: SdpStatus,
    /// Dual multipliers, one per constraint.
    pub y: Vec<f64>,
}

impl SemidefiniteProgram {
    pub fn new(objective: HermitianOperator, maximize: bool) -> Self {
        Self { n: objective.dim(), objective, constraints: Vec::new(), maximize }
    }

    pub fn add_constraint(&mut self, a: HermitianOperator, sense: ConstraintSense, b: f64) -> &mut Self {
        self.constraints.push((a, sense, b));
        self
    }

    fn to_block(&self) -> Result<BlockSdp> {
        let n = self.n;
        if self.objective.dim() != n {
            return Err(Error::shape(format!("{n}x{n} objective"), format!("{}", self.objective.dim())));
        }
        let n_ineq = self.constraints.iter().filter(|c| c.1 != ConstraintSense::Eq).count();
        let mut blocks = vec![BlockKind::Psd(n)];
        if n_ineq > 0 {
            blocks.push(BlockKind::Diag(n_ineq));
        }
        let sign = if self.maximize { -1.0 } else { 1.0 };
        let mut c = vec![Some(BlockData::Dense(self.objective.matrix().scale_re(sign)))];
        if n_ineq > 0 {
            c.push(None);
        }
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut slack = 0;
        for (ai, sense, bi) in &self.constraints {
            if ai.dim() != n {
                return Err(Error::shape(format!("{n}x{n} constraint"), format!("{}", ai.dim())));
            }
            let mut row = vec![(0, dense_or_sparse(ai.matrix()))];
            if *sense != ConstraintSense::Eq {
                let mut e = vec![0.0; n_ineq];
                e[slack] = if *sense == ConstraintSense::Le { 1.0 } else { -1.0 };
                row.push((1, BlockData::Diag(e)));
                slack += 1;
            }
            a.push(row);
            b.push(*bi);
        }
        Ok(BlockSdp { blocks, c, a, b })
    }
}

/// Uses sparse storage when at most a quarter of the entries are nonzero.
pub fn dense_or_sparse(m: &ComplexMatrix) -> BlockData {
    let nnz = m.data().iter().filter(|v| v.norm() > 0.0).count();
    if nnz * 4 <= m.data().len() {
        let n = m.rows();
        let mut e = Vec::with_capacity(nnz);
        for i in 0..n {
            for j in 0..n {
                if m[(i, j)].norm() > 0.0 {
                    e.push((i, j, m[(i, j)]));
                }
            }
        }
        BlockData::Sparse(e)
    } else {
        BlockData::Dense(m.clone())
    }
}

pub fn solve_sdp(p: &SemidefiniteProgram) -> Result<SdpSolution> {
    solve_sdp_with(p, &SdpOptions::default())
}

pub fn solve_sdp_with(p: &SemidefiniteProgram, opts: &SdpOptions) -> Result<SdpSolution> {
    let bp = p.to_block()?;
    let sol = solve_block_sdp(&bp, opts)?;
    let BlockValue::Psd(xm) = &sol.x[0] else { unreachable!() };
    let x = HermitianOperator::from_hermitian_part(xm);
    let sign = if p.maximize { -1.0 } else { 1.0 };
    let value = sign * sol.primal_objective;
    let dual_value = sign * sol.dual_objective;
    let y = sol.y.iter().map(|v| sign * v).collect();
    Ok(SdpSolution { x, value, dual_value, gap: sol.gap(), status: sol.status, y })
}

// ---------------------------------------------------------------------------
// Linear matrix inequality front end.

/// `max bᵀy` subject to `F_0^k + Σ_i y_i F_i^k ⪰ 0` in every block `k`.
#[derive(Clone, Debug)]
pub struct LmiProblem {
    pub blocks: Vec<BlockKind>,
    /// Constant term per block (`None` = zero).
    pub f0: Vec<Option<BlockData>>,
    /// `F_i` as a list of (block, data), one entry per variable.
    pub f: Vec<Vec<(usize, BlockData)>>,
    pub objective: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct LmiSolution {
    pub status: SdpStatus,
    pub y: Vec<f64>,
    pub value: f64,
    /// Value of the dual (standard-form primal) certificate, an upper bound on `value` up to residuals.
    pub dual_bound: f64,
    /// Slack blocks `F(y)`.
    pub slack: Vec<BlockValue>,
    /// Dual multipliers (standard-form primal `X`).
    pub multipliers: Vec<BlockValue>,
}

impl LmiProblem {
    pub fn new(blocks: Vec<BlockKind>, num_vars: usize) -> Self {
        Self { f0: vec![None; blocks.len()], blocks, f: vec![Vec::new(); num_vars], objective: vec![0.0; num_vars] }
    }

    pub fn num_vars(&self) -> usize {
        self.f.len()
    }

    /// Evaluates `F(y)` blockwise.
    pub fn evaluate(&self, y: &[f64]) -> Vec<BlockValue> {
        let mut out: Vec<BlockValue> = self.blocks.iter().map(|&k| BlockValue::zeros(k)).collect();
        for (k, f0) in self.f0.iter().enumerate() {
            if let Some(f0) = f0 {
                f0.add_to(&mut out[k], 1.0);
            }
        }
        for (fi, yi) in self.f.iter().zip(y) {
            for (k, d) in fi {
                d.add_to(&mut out[*k], *yi);
            }
        }
        out
    }

    /// Smallest eigenvalue of `F(y)` across blocks.
    pub fn min_eigenvalue(&self, y: &[f64]) -> f64 {
        self.evaluate(y).iter().map(|b| b.min_eigenvalue()).fold(f64::INFINITY, f64::min)
    }
}

pub fn solve_lmi(p: &LmiProblem) -> Result<LmiSolution> {
    solve_lmi_with(p, &SdpOptions::default())
}

pub fn solve_lmi_with(p: &LmiProblem, opts: &SdpOptions) -> Result<LmiSolution> {
    if p.objective.len() != p.f.len() {
        return Err(Error::shape(format!("{} objective coefficients", p.f.len()), format!("{}", p.objective.len())));
    }
    // Z = C − Σ y_i A_i with C = F_0, A_i = −F_i.
    let a: Vec<Vec<(usize, BlockData)>> = p
        .f
        .iter()
        .map(|fi| {
            fi.iter()
                .map(|(k, d)| {
                    let mut d = d.clone();
                    d.scale(-1.0);
                    (*k, d)
                })
                .collect()
        })
        .collect();
    let bp = BlockSdp { blocks: p.blocks.clone(), c: p.f0.clone(), a, b: p.objective.clone() };
    let sol = solve_block_sdp(&bp, opts)?;
    let value = p.objective.iter().zip(&sol.y).map(|(b, y)| b * y).sum();
    let slack = p.evaluate(&sol.y);
    Ok(LmiSolution { status: sol.status, y: sol.y, value, dual_bound: sol.primal_objective, slack, multipliers: sol.x })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(m: ComplexMatrix) -> HermitianOperator {
        HermitianOperator::new(m).unwrap()
    }

    #[test]
    fn trace_bounded_by_one() {
        let mut p = SemidefiniteProgram::new(h(ComplexMatrix::identity(3)), true);
        p.add_constraint(h(ComplexMatrix::identity(3)), ConstraintSense::Le, 1.0);
        let s = solve_sdp(&p).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.value - 1.0).abs() < 1e-7, "{}", s.value);
        assert!(s.x.eig().min() > -1e-7);
        assert!(s.value <= s.dual_value + 1e-6);
    }

    #[test]
    fn lambda_min_as_lmi() {
        // max t s.t. diag(1, 2) − t I ⪰ 0.
        let mut p = LmiProblem::new(vec![BlockKind::Psd(2)], 1);
        p.f0[0] = Some(BlockData::Dense(ComplexMatrix::diag_real(&[1.0, 2.0])));
        p.f[0] = vec![(0, BlockData::Dense(ComplexMatrix::identity(2).scale_re(-1.0)))];
        p.objective = vec![1.0];
        let s = solve_lmi(&p).unwrap();
        assert!(s.status.is_ok());
        assert!((s.value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn lovasz_c5() {
        let n = 5;
        let mut p = SemidefiniteProgram::new(h(ComplexMatrix::from_fn(n, n, |_, _| C64::new(1.0, 0.0))), true);
        p.add_constraint(h(ComplexMatrix::identity(n)), ConstraintSense::Eq, 1.0);
        for i in 0..n {
            let j = (i + 1) % n;
            let e = &ComplexMatrix::unit(n, i, j) + &ComplexMatrix::unit(n, j, i);
            p.add_constraint(h(e), ConstraintSense::Eq, 0.0);
        }
        let s = solve_sdp(&p).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.value - 5f64.sqrt()).abs() < 1e-7, "{}", s.value);
        assert!(s.value <= s.dual_value + 1e-6);
    }

    #[test]
    fn complex_data() {
        // max Re Tr(C X), Tr X = 1, with C hermitian having complex entries: value = λ_max(C).
        let c = ComplexMatrix::new(2, 2, vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(1.0, 0.0)]).unwrap();
        let mut p = SemidefiniteProgram::new(h(c), true);
        p.add_constraint(h(ComplexMatrix::identity(2)), ConstraintSense::Eq, 1.0);
        let s = solve_sdp(&p).unwrap();
        assert!((s.value - 2.0).abs() < 1e-7);
    }

    #[test]
    fn infeasible_detected() {
        // Tr X = -1 with X ⪰ 0.
        let mut p = SemidefiniteProgram::new(h(ComplexMatrix::identity(2)), true);
        p.add_constraint(h(ComplexMatrix::identity(2)), ConstraintSense::Eq, -1.0);
        let s = solve_sdp(&p).unwrap();
        assert!(!s.status.is_ok(), "{:?}", s.status);
    }

    #[test]
    fn ge_constraint() {
        // min Tr X s.t. X_00 ≥ 2 → 2.
        let mut p = SemidefiniteProgram::new(h(ComplexMatrix::identity(2)), false);
        p.add_constraint(h(ComplexMatrix::unit(2, 0, 0)), ConstraintSense::Ge, 2.0);
        let s = solve_sdp(&p).unwrap();
        assert!(s.status.is_ok());
        assert!((s.value - 2.0).abs() < 1e-7, "{}", s.value);
    }
}
