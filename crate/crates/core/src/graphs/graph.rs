//! Simple undirected graphs.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simple undirected loopless graph on vertices `0..n`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<bool>>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl From<Graph> for GraphJson {
    fn from(g: Graph) -> Self {
        GraphJson { n: g.n, edges: g.edges().into_iter().map(|(a, b)| [a, b]).collect() }
    }
}

impl TryFrom<GraphJson> for Graph {
    type Error = Error;
    fn try_from(j: GraphJson) -> Result<Self> {
        Graph::from_edges(j.n, j.edges.iter().map(|e| (e[0], e[1])))
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self { n, adj: vec![vec![false; n]; n] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in 0..n {
                g.adj[i][j] = i != j;
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::empty(n);
        if n >= 2 {
            for i in 0..n {
                g.set_edge(i, (i + 1) % n);
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 1..n {
            g.set_edge(i - 1, i);
        }
        g
    }

    pub fn petersen() -> Self {
        let mut g = Self::empty(10);
        for i in 0..5 {
            g.set_edge(i, (i + 1) % 5);
            g.set_edge(i, i + 5);
            g.set_edge(5 + i, 5 + (i + 2) % 5);
        }
        g
    }

    /// Erdős–Rényi graph with edge probability `p`.
    pub fn random<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < p {
                    g.set_edge(i, j);
                }
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(n);
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Invalid(format!("edge ({a}, {b}) out of range for n = {n}")));
            }
            if a == b {
                return Err(Error::Invalid(format!("loop at vertex {a}")));
            }
            g.set_edge(a, b);
        }
        Ok(g)
    }

    pub fn from_adjacency(adj: Vec<Vec<bool>>) -> Result<Self> {
        let n = adj.len();
        for i in 0..n {
            if adj[i].len() != n {
                return Err(Error::shape(format!("{n}x{n} adjacency"), format!("row {i} of length {}", adj[i].len())));
            }
            if adj[i][i] {
                return Err(Error::Invalid(format!("loop at vertex {i}")));
            }
            for j in 0..n {
                if adj[i][j] != adj[j][i] {
                    return Err(Error::Invalid(format!("adjacency not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { n, adj })
    }

    fn set_edge(&mut self, a: usize, b: usize) {
        self.adj[a][b] = true;
        self.adj[b][a] = true;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a][b]
    }

    /// `x ≃ y`: equal or adjacent.
    pub fn confusable(&self, a: usize, b: usize) -> bool {
        a == b || self.adj[a][b]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&b| b).count()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&u| self.adj[v][u])
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.adj[i][j] {
                    e.push((i, j));
                }
            }
        }
        e
    }

    pub fn num_edges(&self) -> usize {
        self.edges().len()
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter().enumerate().all(|(k, &a)| set[k + 1..].iter().all(|&b| a != b && !self.adj[a][b]))
    }

    pub fn is_clique(&self, set: &[usize]) -> bool {
        set.iter().enumerate().all(|(k, &a)| set[k + 1..].iter().all(|&b| a != b && self.adj[a][b]))
    }

    /// Adjacency rows as bitsets; requires `n ≤ 64`.
    pub(crate) fn bitsets(&self) -> Vec<u64> {
        assert!(self.n <= 64);
        self.adj.iter().map(|row| row.iter().enumerate().fold(0u64, |acc, (j, &b)| if b { acc | (1 << j) } else { acc })).collect()
    }
}

pub fn complement(g: &Graph) -> Graph {
    let n = g.n;
    let mut h = Graph::empty(n);
    for i in 0..n {
        for j in 0..n {
            h.adj[i][j] = i != j && !g.adj[i][j];
        }
    }
    h
}

/// `G ⊠ H`: `(x,u) ≃ (y,v)` iff `x ≃ y` and `u ≃ v`. Vertex `(x, u)` has index `x·n_H + u`.
pub fn strong_product(g: &Graph, h: &Graph) -> Graph {
    let (n, m) = (g.n, h.n);
    let mut p = Graph::empty(n * m);
    for x in 0..n {
        for u in 0..m {
            for y in 0..n {
                for v in 0..m {
                    let (a, b) = (x * m + u, y * m + v);
                    if a != b && g.confusable(x, y) && h.confusable(u, v) {
                        p.adj[a][b] = true;
                    }
                }
            }
        }
    }
    p
}

/// Strong power `G^{⊠k}` (`k ≥ 1`).
pub fn strong_power(g: &Graph, k: usize) -> Graph {
    let mut p = g.clone();
    for _ in 1..k.max(1) {
        p = strong_product(&p, g);
    }
    p
}

/// Vertex bijection `σ` with `x ∼ y ⇔ σ(x) ∼ σ(y)`, by backtracking.
pub fn find_isomorphism(g: &Graph, h: &Graph) -> Option<Vec<usize>> {
    if g.n != h.n || g.num_edges() != h.num_edges() {
        return None;
    }
    let mut dg: Vec<usize> = (0..g.n).map(|v| g.degree(v)).collect();
    let mut dh: Vec<usize> = (0..h.n).map(|v| h.degree(v)).collect();
    let (gd, hd) = (dg.clone(), dh.clone());
    dg.sort_unstable();
    dh.sort_unstable();
    if dg != dh {
        return None;
    }
    fn rec(k: usize, g: &Graph, h: &Graph, gd: &[usize], hd: &[usize], map: &mut Vec<usize>, used: &mut [bool]) -> bool {
        if k == g.n {
            return true;
        }
        for cand in 0..h.n {
            if used[cand] || gd[k] != hd[cand] {
                continue;
            }
            if (0..k).all(|j| g.adj[k][j] == h.adj[cand][map[j]]) {
                used[cand] = true;
                map.push(cand);
                if rec(k + 1, g, h, gd, hd, map, used) {
                    return true;
                }
                map.pop();
                used[cand] = false;
            }
        }
        false
    }
    let mut map = Vec::with_capacity(g.n);
    let mut used = vec![false; h.n];
    rec(0, g, h, &gd, &hd, &mut map, &mut used).then_some(map)
}

pub fn is_isomorphic(g: &Graph, h: &Graph) -> bool {
    find_isomorphism(g, h).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_examples() {
        assert_eq!(complement(&Graph::complete(3)), Graph::empty(3));
        assert_eq!(complement(&Graph::empty(5)), Graph::complete(5));
        assert!(is_isomorphic(&complement(&Graph::cycle(5)), &Graph::cycle(5)));
        let p = Graph::petersen();
        assert_eq!(complement(&complement(&p)), p);
    }

    #[test]
    fn strong_product_examples() {
        assert_eq!(strong_product(&Graph::complete(2), &Graph::complete(2)), Graph::complete(4));
        let c5 = Graph::cycle(5);
        assert_eq!(strong_product(&c5, &Graph::empty(1)), c5);
        assert_eq!(strong_product(&c5, &c5).n(), 25);
    }

    #[test]
    fn petersen_is_cubic() {
        let p = Graph::petersen();
        assert_eq!(p.num_edges(), 15);
        assert!((0..10).all(|v| p.degree(v) == 3));
        assert!(!is_isomorphic(&p, &complement(&p)));
    }

    #[test]
    fn json_round_trip() {
        let g = Graph::cycle(5);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"n":5,"edges":[[0,1],[0,4],[1,2],[2,3],[3,4]]}"#);
        let back: Graph = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<Graph>(r#"{"n":2,"edges":[[0,0]]}"#).is_err());
        assert!(serde_json::from_str::<Graph>(r#"{"n":2,"edges":[[0,2]]}"#).is_err());
    }
}
