//! Pulling Kraus families into C(S): minimize `Σ_{p,q} ‖proj_{S⊥}(A_p* A_q)‖²`
//! over isometries `V = [A_1; …; A_m]`, first by gradient steps with polar
//! renormalization, then by a Levenberg–Marquardt polish to reach `1e-8`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::{stack, unstack, QuantumChannel, CHANNEL_TOL};
use crate::linalg::eig::{polar_isometry, spd_solve};
use crate::linalg::random::ginibre;
use crate::linalg::{ComplexMatrix, OperatorSubspace};
use crate::opsys::OperatorSystem;
use crate::projections::search::restart_rng;

#[derive(Clone, Copy, Debug)]
pub struct ProjectOptions {
    pub gradient_iterations: usize,
    pub lm_iterations: usize,
    pub tol: f64,
}

impl Default for ProjectOptions {
    fn default() -> Self {
        Self { gradient_iterations: 2000, lm_iterations: 80, tol: CHANNEL_TOL }
    }
}

fn perp_residual(perp: &OperatorSubspace, m: &ComplexMatrix) -> ComplexMatrix {
    let mut r = ComplexMatrix::zeros(m.rows(), m.cols());
    for b in perp.basis() {
        r.axpy(m.hs_inner_unchecked(b), b);
    }
    r
}

/// `Σ_{p,q} ‖proj_{S⊥}(A_p* A_q)‖²`.
pub fn penalty(perp: &OperatorSubspace, kraus: &[ComplexMatrix]) -> f64 {
    let mut f = 0.0;
    for a in kraus {
        for b in kraus {
            f += perp.projection_norm_sqr(&a.adjoint_mul(b));
        }
    }
    f
}

/// Penalty and its Wirtinger gradient `∂f/∂Ā_p = 2 Σ_q A_q R_pq*`.
pub fn penalty_and_gradient(perp: &OperatorSubspace, kraus: &[ComplexMatrix]) -> (f64, Vec<ComplexMatrix>) {
    let mut f = 0.0;
    let mut grads: Vec<ComplexMatrix> = kraus.iter().map(|a| ComplexMatrix::zeros(a.rows(), a.cols())).collect();
    for (p, a) in kraus.iter().enumerate() {
        for b in kraus {
            let r = perp_residual(perp, &a.adjoint_mul(b));
            f += r.fro_norm().powi(2);
            grads[p].axpy(C64::new(2.0, 0.0), &b.mul_adjoint(&r));
        }
    }
    (f, grads)
}

/// Gradient descent on the stacked isometry with polar retraction.
pub fn gradient_phase(perp: &OperatorSubspace, kraus: Vec<ComplexMatrix>, iterations: usize, target: f64) -> Vec<ComplexMatrix> {
    let k = kraus[0].rows();
    let mut v = stack(&kraus);
    let mut cur = unstack(&v, k);
    let (mut f, mut g) = penalty_and_gradient(perp, &cur);
    let mut step = 0.25;
    for _ in 0..iterations {
        if f <= target {
            break;
        }
        let gs = stack(&g);
        let mut accepted = false;
        for _ in 0..30 {
            let Ok(trial) = polar_isometry(&(&v - &gs.scale_re(step))) else {
                step *= 0.5;
                continue;
            };
            let tk = unstack(&trial, k);
            let ft = penalty(perp, &tk);
            if ft < f {
                v = trial;
                cur = tk;
                accepted = true;
                step *= 1.5;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        let (nf, ng) = penalty_and_gradient(perp, &cur);
        f = nf;
        g = ng;
    }
    cur
}

/// Real residual vector: S⊥ coordinates of `A_p* A_q` (p ≤ q) and the upper
/// triangle of `Σ A_p* A_p − I`.
fn residuals(perp: &OperatorSubspace, kraus: &[ComplexMatrix]) -> Vec<f64> {
    let d = kraus[0].cols();
    let mut r = Vec::new();
    for p in 0..kraus.len() {
        for q in p..kraus.len() {
            let m = kraus[p].adjoint_mul(&kraus[q]);
            for b in perp.basis() {
                let c = m.hs_inner_unchecked(b);
                r.push(c.re);
                r.push(c.im);
            }
        }
    }
    let mut sum = ComplexMatrix::zeros(d, d);
    for a in kraus {
        sum = &sum + &a.adjoint_mul(a);
    }
    for i in 0..d {
        for j in i..d {
            let target = if i == j { 1.0 } else { 0.0 };
            r.push(sum[(i, j)].re - target);
            if i != j {
                r.push(sum[(i, j)].im);
            }
        }
    }
    r
}

/// Jacobian of [`residuals`] with respect to (Re, Im) of every Kraus entry.
fn jacobian(perp: &OperatorSubspace, kraus: &[ComplexMatrix]) -> (usize, Vec<f64>) {
    let m = kraus.len();
    let (k, d) = kraus[0].shape();
    let n = 2 * m * k * d;
    let idx = |s: usize, i: usize, j: usize| 2 * ((s * k + i) * d + j);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    // For r = ⟨B, A_p* A_q⟩ and dA_s = c E_ij:
    //   dr = [s = p] conj(c) (A_q B*)_ij + [s = q] c conj((A_p B)_ij).
    let pair_rows = |p: usize, q: usize, b: &ComplexMatrix| {
        let x = kraus[q].mul_adjoint(b);
        let y = kraus[p].matmul(b);
        let mut re = vec![0.0; n];
        let mut im = vec![0.0; n];
        for i in 0..k {
            for j in 0..d {
                // c = 1 and c = i.
                let d1 = x[(i, j)];
                let di = x[(i, j)] * C64::new(0.0, -1.0);
                let e1 = y[(i, j)].conj();
                let ei = e1 * C64::new(0.0, 1.0);
                let ip = idx(p, i, j);
                let iq = idx(q, i, j);
                re[ip] += d1.re;
                im[ip] += d1.im;
                re[ip + 1] += di.re;
                im[ip + 1] += di.im;
                re[iq] += e1.re;
                im[iq] += e1.im;
                re[iq + 1] += ei.re;
                im[iq + 1] += ei.im;
            }
        }
        (re, im)
    };
    for p in 0..m {
        for q in p..m {
            for b in perp.basis() {
                let (re, im) = pair_rows(p, q, b);
                rows.push(re);
                rows.push(im);
            }
        }
    }
    for a in 0..d {
        for bb in a..d {
            let unit = ComplexMatrix::unit(d, a, bb);
            let mut re = vec![0.0; n];
            let mut im = vec![0.0; n];
            for s in 0..m {
                let (r1, i1) = pair_rows(s, s, &unit);
                for t in 0..n {
                    re[t] += r1[t];
                    im[t] += i1[t];
                }
            }
            rows.push(re);
            if a != bb {
                rows.push(im);
            }
        }
    }
    let nrows = rows.len();
    (nrows, rows.concat())
}

fn apply_step(kraus: &[ComplexMatrix], delta: &[f64]) -> Vec<ComplexMatrix> {
    let (k, d) = kraus[0].shape();
    kraus
        .iter()
        .enumerate()
        .map(|(s, a)| {
            let mut out = a.clone();
            for i in 0..k {
                for j in 0..d {
                    let t = 2 * ((s * k + i) * d + j);
                    out[(i, j)] += C64::new(delta[t], delta[t + 1]);
                }
            }
            out
        })
        .collect()
}

/// Levenberg–Marquardt on [`residuals`].
pub fn lm_polish(perp: &OperatorSubspace, mut kraus: Vec<ComplexMatrix>, iterations: usize) -> Vec<ComplexMatrix> {
    let norm2 = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();
    let mut r = residuals(perp, &kraus);
    let mut cost = norm2(&r);
    let mut lambda = 1e-3;
    for _ in 0..iterations {
        if cost < 1e-28 {
            break;
        }
        let (nr, j) = jacobian(perp, &kraus);
        let n = j.len() / nr;
        let mut jtj = vec![0.0; n * n];
        let mut jtr = vec![0.0; n];
        for row in 0..nr {
            let jr = &j[row * n..(row + 1) * n];
            let nz: Vec<usize> = (0..n).filter(|&c| jr[c] != 0.0).collect();
            for &a in &nz {
                jtr[a] += jr[a] * r[row];
                for &b in &nz {
                    jtj[a * n + b] += jr[a] * jr[b];
                }
            }
        }
        let mut improved = false;
        for _ in 0..12 {
            let mut m = jtj.clone();
            for a in 0..n {
                m[a * n + a] += lambda * (1.0 + jtj[a * n + a]);
            }
            let mut delta: Vec<f64> = jtr.iter().map(|v| -v).collect();
            if !spd_solve(&m, n, &mut delta) {
                lambda *= 10.0;
                continue;
            }
            let trial = apply_step(&kraus, &delta);
            let tr = residuals(perp, &trial);
            let tc = norm2(&tr);
            if tc < cost {
                kraus = trial;
                r = tr;
                cost = tc;
                lambda = (lambda / 3.0).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    kraus
}

/// Validated channel in C(S) near `start`, or `None` if the residual stays above tolerance.
pub fn project_into(s: &OperatorSystem, start: &[ComplexMatrix], opts: &ProjectOptions) -> Option<QuantumChannel> {
    if start.is_empty() {
        return None;
    }
    let perp = s.perp();
    let v = polar_isometry(&stack(start)).ok()?;
    let k = start[0].rows();
    let mut kraus = unstack(&v, k);
    if !perp.basis().is_empty() {
        kraus = gradient_phase(perp, kraus, opts.gradient_iterations, 1e-10);
        kraus = lm_polish(perp, kraus, opts.lm_iterations);
        kraus = unstack(&polar_isometry(&stack(&kraus)).ok()?, k);
    }
    let c = QuantumChannel::new(kraus).ok()?;
    (c.membership_residual(s).ok()? <= opts.tol).then_some(c)
}

/// Random member of C(S) with output dimension `k` and `m` Kraus operators.
/// Starts from a perturbed identity embedding (when `k ≥ d`) or a random
/// isometry, pulls it into C(S), and rejects attempts that do not converge.
pub fn random_channel_in_c(s: &OperatorSystem, k: usize, m: usize, seed: u64, attempts: usize) -> Option<QuantumChannel> {
    let d = s.dim_h();
    if k * m < d || k == 0 || m == 0 {
        return None;
    }
    let opts = ProjectOptions::default();
    (0..attempts.max(1)).into_par_iter().find_map_first(|a| {
        let mut rng = restart_rng(seed, a);
        let mut v = ginibre(k * m, d, &mut rng);
        if k >= d && a % 2 == 0 {
            let scale = 0.3;
            v = v.scale_re(scale);
            for i in 0..d {
                v[(i, i)] += C64::new(1.0, 0.0);
            }
        }
        let v = polar_isometry(&v).ok()?;
        project_into(s, &unstack(&v, k), &opts)
    })
}
