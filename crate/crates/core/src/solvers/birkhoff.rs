//! Birkhoff–von Neumann decomposition of doubly stochastic matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffTerm {
    pub weight: f64,
    /// `perm[i]` is the column matched to row `i`.
    pub perm: Vec<usize>,
}

/// Perfect matching on the bipartite support graph, by augmenting paths.
fn perfect_matching(m: &[Vec<f64>], thresh: f64) -> Option<Vec<usize>> {
    let n = m.len();
    let mut col_owner: Vec<Option<usize>> = vec![None; n];
    fn augment(r: usize, m: &[Vec<f64>], thresh: f64, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for c in 0..m.len() {
            if m[r][c] > thresh && !seen[c] {
                seen[c] = true;
                if owner[c].is_none() || augment(owner[c].unwrap(), m, thresh, seen, owner) {
                    owner[c] = Some(r);
                    return true;
                }
            }
        }
        false
    }
    for r in 0..n {
        let mut seen = vec![false; n];
        if !augment(r, m, thresh, &mut seen, &mut col_owner) {
            return None;
        }
    }
    let mut perm = vec![0; n];
    for (c, r) in col_owner.iter().enumerate() {
        perm[r.unwrap()] = c;
    }
    Some(perm)
}

/// Writes `M = Σ γ_k P^(k)` with `γ_k > 0`.
pub fn birkhoff_decompose(m: &[Vec<f64>], tol: f64) -> Result<Vec<BirkhoffTerm>> {
    let n = m.len();
    if n == 0 {
        return Err(Error::EmptyInput("doubly stochastic matrix"));
    }
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::shape(format!("{n}x{n}"), "ragged rows"));
    }
    let mut residual = 0.0f64;
    for i in 0..n {
        let rs: f64 = m[i].iter().sum();
        let cs: f64 = m.iter().map(|r| r[i]).sum();
        residual = residual.max((rs - 1.0).abs()).max((cs - 1.0).abs());
        for j in 0..n {
            if m[i][j] < -tol || !m[i][j].is_finite() {
                residual = residual.max(-m[i][j]).max(if m[i][j].is_finite() { 0.0 } else { f64::INFINITY });
            }
        }
    }
    if residual > tol {
        return Err(Error::NotDoublyStochastic { residual });
    }
    let mut r: Vec<Vec<f64>> = m.iter().map(|row| row.iter().map(|v| v.max(0.0)).collect()).collect();
    let mut terms = Vec::new();
    let thresh = 1e-15;
    let max_terms = (n - 1) * (n - 1) + 1;
    loop {
        let remaining: f64 = r.iter().map(|row| row.iter().sum::<f64>()).sum::<f64>() / n as f64;
        if remaining <= 1e-13 || terms.len() >= max_terms + n {
            break;
        }
        let Some(perm) = perfect_matching(&r, thresh) else { break };
        let w = (0..n).map(|i| r[i][perm[i]]).fold(f64::INFINITY, f64::min);
        for i in 0..n {
            r[i][perm[i]] -= w;
            if r[i][perm[i]] <= thresh {
                r[i][perm[i]] = 0.0;
            }
        }
        terms.push(BirkhoffTerm { weight: w, perm });
    }
    Ok(terms)
}

/// `Σ γ_k P^(k)` as a dense matrix.
pub fn recompose(n: usize, terms: &[BirkhoffTerm]) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; n]; n];
    for t in terms {
        for (i, &j) in t.perm.iter().enumerate() {
            out[i][j] += t.weight;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn max_err(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
        a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn identity_single_term() {
        let id: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let t = birkhoff_decompose(&id, 1e-9).unwrap();
        assert_eq!(t, vec![BirkhoffTerm { weight: 1.0, perm: vec![0, 1, 2, 3] }]);
    }

    #[test]
    fn half_ones() {
        let m = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        let t = birkhoff_decompose(&m, 1e-9).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t.iter().all(|t| (t.weight - 0.5).abs() < 1e-15));
    }

    #[test]
    fn known_convex_combination() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = 5;
            let mut m = vec![vec![0.0; n]; n];
            let mut ws: Vec<f64> = (0..3).map(|_| rng.random::<f64>() + 0.01).collect();
            let s: f64 = ws.iter().sum();
            ws.iter_mut().for_each(|w| *w /= s);
            for w in &ws {
                let mut p: Vec<usize> = (0..n).collect();
                p.shuffle(&mut rng);
                for i in 0..n {
                    m[i][p[i]] += w;
                }
            }
            let t = birkhoff_decompose(&m, 1e-9).unwrap();
            assert!(t.len() <= (n - 1) * (n - 1) + 1);
            assert!(t.iter().all(|t| t.weight > 0.0));
            assert!((t.iter().map(|t| t.weight).sum::<f64>() - 1.0).abs() < 1e-9);
            assert!(max_err(&recompose(n, &t), &m) <= 1e-9);
        }
    }

    #[test]
    fn rejects_non_stochastic() {
        let m = vec![vec![1.0, 0.5], vec![0.0, 0.5]];
        assert!(matches!(birkhoff_decompose(&m, 1e-9), Err(Error::NotDoublyStochastic { .. })));
    }
}
