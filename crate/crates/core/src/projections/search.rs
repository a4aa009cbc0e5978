//! Orthonormal frame search: minimizes `Σ_{(i,j)} Σ_b |ξ_i* B_b ξ_j|²` over
//! `d × k` frames with orthonormal columns.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::linalg::eig::polar_isometry;
use crate::linalg::random::ginibre;
use crate::linalg::ComplexMatrix;
use num_complex::Complex64 as C64;

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Objective value declared a success.
    pub success: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { restarts: 32, max_iterations: 2000, success: 1e-14 }
    }
}

/// Which index pairs the penalty runs over.
#[derive(Clone, Debug)]
pub enum PairSet {
    /// `i ≠ j`.
    OffDiagonal,
    /// All `(i, j)` including `i = j`.
    All,
    /// `i ≠ j` within the same group (`group[i]` labels the column).
    WithinGroups(Vec<usize>),
}

impl PairSet {
    fn includes(&self, i: usize, j: usize) -> bool {
        match self {
            PairSet::OffDiagonal => i != j,
            PairSet::All => true,
            PairSet::WithinGroups(g) => i != j && g[i] == g[j],
        }
    }
}

/// Per-restart RNG stream, independent of scheduling.
pub fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64 + 1);
    rng
}

pub struct FrameProblem<'a> {
    pub d: usize,
    pub k: usize,
    pub ops: &'a [ComplexMatrix],
    pub pairs: PairSet,
    /// Optional reward `μ·Re Tr(V* T V)` subtracted from the penalty.
    pub reward: Option<(&'a ComplexMatrix, f64)>,
}

impl FrameProblem<'_> {
    /// Objective and Wirtinger gradient `∂f/∂ξ̄`.
    pub fn value_and_gradient(&self, frame: &ComplexMatrix) -> (f64, ComplexMatrix) {
        let (d, k) = (self.d, self.k);
        let mut f = 0.0;
        let mut grad = ComplexMatrix::zeros(d, k);
        for b in self.ops {
            let y = b.matmul(frame);
            let w = b.adjoint_mul(frame);
            let m = frame.adjoint_mul(&y);
            for i in 0..k {
                for j in 0..k {
                    if !self.pairs.includes(i, j) {
                        continue;
                    }
                    let mij = m[(i, j)];
                    f += mij.norm_sqr();
                    // ∂|ξ_i* B ξ_j|²/∂ξ̄_i = B ξ_j conj(m_ij); ∂/∂ξ̄_j = B* ξ_i m_ij.
                    let cij = mij.conj();
                    for r in 0..d {
                        grad[(r, i)] += y[(r, j)] * cij;
                        grad[(r, j)] += w[(r, i)] * mij;
                    }
                }
            }
        }
        if let Some((t, mu)) = self.reward {
            let tv = t.matmul(frame);
            f -= mu * frame.adjoint_mul(&tv).trace().re;
            grad.axpy(C64::new(-mu, 0.0), &tv);
        }
        (f, grad)
    }

    pub fn value(&self, frame: &ComplexMatrix) -> f64 {
        let mut f = 0.0;
        for b in self.ops {
            let m = frame.adjoint_mul(&b.matmul(frame));
            for i in 0..self.k {
                for j in 0..self.k {
                    if self.pairs.includes(i, j) {
                        f += m[(i, j)].norm_sqr();
                    }
                }
            }
        }
        if let Some((t, mu)) = self.reward {
            f -= mu * frame.adjoint_mul(&t.matmul(frame)).trace().re;
        }
        f
    }

    /// Projected gradient descent with polar retraction and backtracking.
    pub fn descend(&self, start: ComplexMatrix, opts: &SearchOptions) -> (ComplexMatrix, f64) {
        let mut x = polar_isometry(&start).unwrap_or(start);
        let (mut f, mut g) = self.value_and_gradient(&x);
        let mut step = 0.5;
        let mut last_check = f;
        for it in 0..opts.max_iterations {
            if self.reward.is_none() && f < opts.success {
                break;
            }
            let mut accepted = false;
            for _ in 0..40 {
                let trial = &x - &g.scale_re(step);
                let Ok(trial) = polar_isometry(&trial) else {
                    step *= 0.5;
                    continue;
                };
                let ft = self.value(&trial);
                if ft < f {
                    x = trial;
                    accepted = true;
                    step *= 2.0;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
            let (nf, ng) = self.value_and_gradient(&x);
            f = nf;
            g = ng;
            // Abandon restarts that have stalled far from zero.
            if it % 200 == 199 {
                if self.reward.is_none() && f > 1e-6 && f > 0.99 * last_check {
                    break;
                }
                last_check = f;
            }
        }
        (x, f)
    }
}

/// Runs restarts in parallel and returns the frame of the lowest-index
/// successful restart.
pub fn search_frames(problem: &FrameProblem, seed: u64, opts: &SearchOptions, warm: Option<&ComplexMatrix>) -> Option<ComplexMatrix> {
    (0..opts.restarts.max(1)).into_par_iter().find_map_first(|r| {
        let mut rng = restart_rng(seed, r);
        let mut start = ginibre(problem.d, problem.k, &mut rng);
        if let Some(w) = warm {
            // Keep the warm columns (lightly perturbed after the first restart).
            let eps = if r == 0 { 0.0 } else { 0.05 };
            for j in 0..w.cols().min(problem.k) {
                for i in 0..problem.d {
                    start[(i, j)] = w[(i, j)] + start[(i, j)] * eps;
                }
            }
        }
        let (x, f) = problem.descend(start, opts);
        (f < opts.success).then_some(x)
    })
}

/// Lowest objective over restarts; used with a reward term, where no restart "succeeds".
pub fn best_frame(problem: &FrameProblem, seed: u64, opts: &SearchOptions) -> (ComplexMatrix, f64) {
    (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = restart_rng(seed, r);
            let start = ginibre(problem.d, problem.k, &mut rng);
            problem.descend(start, opts)
        })
        .reduce_with(|a, b| if b.1 < a.1 { b } else { a })
        .expect("at least one restart")
}
