//! Exact classical parameters: α, ω, χ, ω_f, set enumeration, VP / FVP.

use super::graph::{complement, Graph};
use crate::error::{Error, Result};
use crate::solvers::{solve_lp, LinearProgram, LpStatus, Sense};

pub const ALPHA_LIMIT: usize = 40;
pub const CHI_LIMIT: usize = 40;
pub const ENUMERATION_LIMIT: usize = 25;

fn guard(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::TooLarge { what, n, limit });
    }
    Ok(())
}

fn bits(set: u64) -> impl Iterator<Item = usize> {
    let mut s = set;
    std::iter::from_fn(move || {
        if s == 0 {
            None
        } else {
            let v = s.trailing_zeros() as usize;
            s &= s - 1;
            Some(v)
        }
    })
}

/// Maximum clique by branch and bound with a greedy-colouring bound.
fn max_clique_bits(adj: &[u64]) -> Vec<usize> {
    let n = adj.len();
    fn expand(r: &mut Vec<usize>, p: u64, adj: &[u64], best: &mut Vec<usize>) {
        // Greedy colouring of p: colour classes in order, bound = colour number.
        let mut order: Vec<(usize, usize)> = Vec::with_capacity(p.count_ones() as usize);
        let mut uncolored = p;
        let mut color = 0;
        while uncolored != 0 {
            color += 1;
            let mut q = uncolored;
            while q != 0 {
                let v = q.trailing_zeros() as usize;
                q &= !(1u64 << v) & !adj[v];
                uncolored &= !(1u64 << v);
                order.push((v, color));
            }
        }
        let mut p = p;
        for &(v, c) in order.iter().rev() {
            if r.len() + c <= best.len() {
                return;
            }
            r.push(v);
            let np = p & adj[v];
            if np == 0 {
                if r.len() > best.len() {
                    *best = r.clone();
                }
            } else {
                expand(r, np, adj, best);
            }
            r.pop();
            p &= !(1u64 << v);
        }
    }
    let mut best = Vec::new();
    if n == 0 {
        return best;
    }
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    expand(&mut Vec::new(), all, adj, &mut best);
    best.sort_unstable();
    best
}

/// A maximum independent set.
pub fn maximum_independent_set(g: &Graph) -> Result<Vec<usize>> {
    guard("independence number", g.n(), ALPHA_LIMIT)?;
    Ok(max_clique_bits(&complement(g).bitsets()))
}

pub fn maximum_clique(g: &Graph) -> Result<Vec<usize>> {
    guard("clique number", g.n(), ALPHA_LIMIT)?;
    Ok(max_clique_bits(&g.bitsets()))
}

pub fn independence_number(g: &Graph) -> Result<usize> {
    Ok(maximum_independent_set(g)?.len())
}

pub fn clique_number(g: &Graph) -> Result<usize> {
    independence_number(&complement(g))
}

/// Optimal proper colouring (colour index per vertex), by DSATUR branch and bound.
pub fn optimal_coloring(g: &Graph) -> Result<Vec<usize>> {
    let n = g.n();
    guard("chromatic number", n, CHI_LIMIT)?;
    if n == 0 {
        return Ok(vec![]);
    }
    let adj = g.bitsets();
    let lower = max_clique_bits(&adj).len();

    fn pick(colors: &[Option<usize>], sat: &[u64], adj: &[u64]) -> Option<usize> {
        let mut best: Option<(u32, u32, usize)> = None;
        for v in 0..colors.len() {
            if colors[v].is_none() {
                let key = (sat[v].count_ones(), adj[v].count_ones(), v);
                if best.is_none_or(|b| (key.0, key.1) > (b.0, b.1)) {
                    best = Some(key);
                }
            }
        }
        best.map(|b| b.2)
    }

    // Initial DSATUR greedy colouring.
    let mut colors = vec![None; n];
    let mut sat = vec![0u64; n];
    while let Some(v) = pick(&colors, &sat, &adj) {
        let c = (0..n).find(|c| sat[v] & (1u64 << c) == 0).unwrap();
        colors[v] = Some(c);
        for u in bits(adj[v]) {
            sat[u] |= 1u64 << c;
        }
    }
    let mut best: Vec<usize> = colors.iter().map(|c| c.unwrap()).collect();
    let mut best_k = best.iter().max().unwrap() + 1;
    if best_k == lower {
        return Ok(best);
    }

    struct State<'a> {
        adj: &'a [u64],
        colors: Vec<Option<usize>>,
        best: Vec<usize>,
        best_k: usize,
        lower: usize,
    }
    fn rec(st: &mut State, used: usize, colored: usize) {
        if st.best_k == st.lower {
            return;
        }
        let n = st.colors.len();
        if colored == n {
            if used < st.best_k {
                st.best_k = used;
                st.best = st.colors.iter().map(|c| c.unwrap()).collect();
            }
            return;
        }
        let sat: Vec<u64> = (0..n)
            .map(|v| bits(st.adj[v]).filter_map(|u| st.colors[u]).fold(0u64, |acc, c| acc | (1u64 << c)))
            .collect();
        let v = pick(&st.colors, &sat, st.adj).unwrap();
        for c in 0..=used {
            if c >= st.best_k - 1 && c == used {
                break;
            }
            if c < used && sat[v] & (1u64 << c) != 0 {
                continue;
            }
            st.colors[v] = Some(c);
            rec(st, used.max(c + 1), colored + 1);
            st.colors[v] = None;
            if st.best_k == st.lower {
                return;
            }
        }
    }
    let mut st = State { adj: &adj, colors: vec![None; n], best: best.clone(), best_k, lower };
    rec(&mut st, 0, 0);
    best = st.best;
    best_k = st.best_k;
    debug_assert_eq!(best.iter().max().map_or(0, |m| m + 1), best_k);
    Ok(best)
}

pub fn chromatic_number(g: &Graph) -> Result<usize> {
    Ok(optimal_coloring(g)?.iter().max().map_or(0, |m| m + 1))
}

/// Colour classes of an optimal colouring.
pub fn color_classes(g: &Graph) -> Result<Vec<Vec<usize>>> {
    let col = optimal_coloring(g)?;
    let k = col.iter().max().map_or(0, |m| m + 1);
    let mut classes = vec![Vec::new(); k];
    for (v, &c) in col.iter().enumerate() {
        classes[c].push(v);
    }
    Ok(classes)
}

/// Maximal cliques by Bron–Kerbosch with pivoting, sorted.
pub fn maximal_cliques(g: &Graph) -> Result<Vec<Vec<usize>>> {
    guard("maximal set enumeration", g.n(), 64)?;
    let adj = g.bitsets();
    let n = g.n();
    let mut out = Vec::new();
    fn bk(r: u64, p: u64, x: u64, adj: &[u64], out: &mut Vec<Vec<usize>>) {
        if p == 0 && x == 0 {
            out.push(bits(r).collect());
            return;
        }
        let pivot = bits(p | x).max_by_key(|&u| (p & adj[u]).count_ones()).unwrap();
        let mut p = p;
        let mut x = x;
        for v in bits(p & !adj[pivot]) {
            bk(r | (1u64 << v), p & adj[v], x & adj[v], adj, out);
            p &= !(1u64 << v);
            x |= 1u64 << v;
        }
    }
    if n > 0 {
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        bk(0, all, 0, &adj, &mut out);
    }
    out.sort();
    Ok(out)
}

pub fn maximal_independent_sets(g: &Graph) -> Result<Vec<Vec<usize>>> {
    maximal_cliques(&complement(g))
}

/// Fractional clique number with optimal weights: `max Σ w_x` s.t.
/// `Σ_{x∈S} w_x ≤ 1` for every independent set `S`.
pub fn fractional_clique_number_with_weights(g: &Graph) -> Result<(f64, Vec<f64>)> {
    let n = g.n();
    guard("fractional clique number", n, ENUMERATION_LIMIT)?;
    if n == 0 {
        return Ok((0.0, vec![]));
    }
    let mut lp = LinearProgram::new(vec![1.0; n], true);
    for s in maximal_independent_sets(g)? {
        let mut row = vec![0.0; n];
        for x in s {
            row[x] = 1.0;
        }
        lp.add_constraint(row, Sense::Le, 1.0);
    }
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Solver(format!("fractional clique LP: {:?}", sol.status)));
    }
    Ok((sol.value, sol.x))
}

pub fn fractional_clique_number(g: &Graph) -> Result<f64> {
    Ok(fractional_clique_number_with_weights(g)?.0)
}

/// Fractional chromatic number `χ_f(G)`, which equals `ω_f(G)` by LP duality.
pub fn fractional_chromatic_number(g: &Graph) -> Result<f64> {
    fractional_clique_number(g)
}

/// Weights `λ_S` over maximal independent sets with `Σλ ≤ 1`, `w ≤ Σ λ_S χ_S`,
/// if `w` lies in the vertex packing polytope (within `tol`).
pub fn vp_certificate(g: &Graph, w: &[f64], tol: f64) -> Result<Option<Vec<(f64, Vec<usize>)>>> {
    let n = g.n();
    if w.len() != n {
        return Err(Error::shape(format!("weight vector of length {n}"), format!("{}", w.len())));
    }
    if w.iter().any(|&v| v < -tol) {
        return Ok(None);
    }
    guard("vertex packing membership", n, ENUMERATION_LIMIT)?;
    let sets = maximal_independent_sets(g)?;
    let mut lp = LinearProgram::new(vec![1.0; sets.len()], false);
    lp.add_constraint(vec![1.0; sets.len()], Sense::Le, 1.0 + tol);
    for x in 0..n {
        let row: Vec<f64> = sets.iter().map(|s| if s.contains(&x) { 1.0 } else { 0.0 }).collect();
        lp.add_constraint(row, Sense::Ge, w[x] - tol);
    }
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Ok(None);
    }
    Ok(Some(sets.into_iter().zip(sol.x).filter(|(_, l)| *l > 0.0).map(|(s, l)| (l, s)).collect()))
}

pub fn vp_membership(g: &Graph, w: &[f64], tol: f64) -> Result<bool> {
    Ok(vp_certificate(g, w, tol)?.is_some())
}

/// `w ≥ 0` and `Σ_{x∈K} w_x ≤ 1` for every clique `K`.
pub fn fvp_membership(g: &Graph, w: &[f64], tol: f64) -> Result<bool> {
    let n = g.n();
    if w.len() != n {
        return Err(Error::shape(format!("weight vector of length {n}"), format!("{}", w.len())));
    }
    if w.iter().any(|&v| v < -tol) {
        return Ok(false);
    }
    Ok(maximal_cliques(g)?.iter().all(|k| k.iter().map(|&x| w[x]).sum::<f64>() <= 1.0 + tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::graph::strong_product;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn brute_alpha(g: &Graph) -> usize {
        let n = g.n();
        (0u32..(1 << n))
            .filter(|m| {
                let s: Vec<usize> = (0..n).filter(|&i| m & (1 << i) != 0).collect();
                g.is_independent(&s)
            })
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    fn brute_chi(g: &Graph) -> usize {
        let n = g.n();
        for k in 1..=n {
            let mut col = vec![0usize; n];
            loop {
                if g.edges().iter().all(|&(a, b)| col[a] != col[b]) {
                    return k;
                }
                let mut i = 0;
                while i < n {
                    col[i] += 1;
                    if col[i] < k {
                        break;
                    }
                    col[i] = 0;
                    i += 1;
                }
                if i == n {
                    break;
                }
            }
        }
        n
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(independence_number(&Graph::complete(6)).unwrap(), 1);
        assert_eq!(independence_number(&Graph::cycle(5)).unwrap(), 2);
        assert_eq!(independence_number(&Graph::petersen()).unwrap(), 4);
        let c5 = Graph::cycle(5);
        assert_eq!(independence_number(&strong_product(&c5, &c5)).unwrap(), 5);
        assert!(matches!(independence_number(&Graph::empty(41)), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn omega_chi_examples() {
        assert_eq!(clique_number(&Graph::complete(5)).unwrap(), 5);
        assert_eq!(clique_number(&Graph::cycle(5)).unwrap(), 2);
        assert_eq!(clique_number(&complement(&Graph::cycle(5))).unwrap(), 2);
        assert_eq!(chromatic_number(&Graph::complete(4)).unwrap(), 4);
        assert_eq!(chromatic_number(&Graph::cycle(5)).unwrap(), 3);
        assert_eq!(chromatic_number(&Graph::petersen()).unwrap(), 3);
    }

    #[test]
    fn random_graphs_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..40 {
            let g = Graph::random(8, 0.45, &mut rng);
            assert_eq!(independence_number(&g).unwrap(), brute_alpha(&g));
            assert_eq!(chromatic_number(&g).unwrap(), brute_chi(&g));
            let col = optimal_coloring(&g).unwrap();
            assert!(g.edges().iter().all(|&(a, b)| col[a] != col[b]));
        }
    }

    #[test]
    fn maximal_sets() {
        assert_eq!(maximal_independent_sets(&Graph::complete(3)).unwrap(), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(maximal_independent_sets(&Graph::empty(3)).unwrap(), vec![vec![0, 1, 2]]);
        let c5 = maximal_independent_sets(&Graph::cycle(5)).unwrap();
        assert_eq!(c5, vec![vec![0, 2], vec![0, 3], vec![1, 3], vec![1, 4], vec![2, 4]]);
    }

    #[test]
    fn fractional_values() {
        assert!((fractional_clique_number(&Graph::complete(4)).unwrap() - 4.0).abs() < 1e-12);
        assert!((fractional_clique_number(&Graph::cycle(5)).unwrap() - 2.5).abs() < 1e-12);
        assert!((fractional_clique_number(&Graph::empty(4)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn packing_polytopes() {
        let c5 = Graph::cycle(5);
        assert!(vp_membership(&c5, &[1.0, 0.0, 1.0, 0.0, 0.0], 1e-9).unwrap());
        assert!(!vp_membership(&c5, &[1.0, 1.0, 0.0, 0.0, 0.0], 1e-9).unwrap());
        assert!(fvp_membership(&c5, &[0.5; 5], 1e-9).unwrap());
        assert!(!vp_membership(&c5, &[0.5; 5], 1e-9).unwrap());
        assert!(!fvp_membership(&Graph::complete(2), &[1.0, 1.0], 1e-9).unwrap());
    }
}
