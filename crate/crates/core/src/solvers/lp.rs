//! Dense two-phase simplex with Bland's rule. Variables are nonnegative.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// `max/min cᵀx` subject to row constraints, `0 ≤ x ≤ upper`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<f64>,
    /// Optional upper bounds per variable.
    pub upper: Vec<Option<f64>>,
    pub maximize: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub value: f64,
    pub x: Vec<f64>,
    /// Multipliers for the row constraints (then the upper bounds), with
    /// `value = Σ rhs_i y_i` at optimality.
    pub duals: Vec<f64>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>, maximize: bool) -> Self {
        let n = objective.len();
        Self { objective, rows: vec![], senses: vec![], rhs: vec![], upper: vec![None; n], maximize }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, row: Vec<f64>, sense: Sense, rhs: f64) -> &mut Self {
        self.rows.push(row);
        self.senses.push(sense);
        self.rhs.push(rhs);
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.senses.len() != self.rows.len() || self.rhs.len() != self.rows.len() {
            return Err(Error::shape(format!("{} senses and rhs", self.rows.len()), format!("{} / {}", self.senses.len(), self.rhs.len())));
        }
        if self.upper.len() != n {
            return Err(Error::shape(format!("{n} bounds"), format!("{}", self.upper.len())));
        }
        for r in &self.rows {
            if r.len() != n {
                return Err(Error::shape(format!("row of length {n}"), format!("{}", r.len())));
            }
        }
        let finite = self.objective.iter().chain(self.rhs.iter()).chain(self.rows.iter().flatten()).all(|v| v.is_finite());
        if !finite {
            return Err(Error::Invalid("non-finite LP data".into()));
        }
        Ok(())
    }
}

struct Tableau {
    m: usize,
    ncols: usize,
    // (m + 1) × (ncols + 1); last row is the objective (reduced costs), last column the rhs.
    t: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * (self.ncols + 1) + j]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.ncols + 1;
        let p = self.t[r * w + c];
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        for i in 0..=self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f != 0.0 {
                for j in 0..w {
                    self.t[i * w + j] -= f * self.t[r * w + j];
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes the objective row; `allowed[j]` marks columns that may enter.
    fn run(&mut self, allowed: &[bool]) -> bool {
        loop {
            let obj = self.m;
            let entering = (0..self.ncols).find(|&j| allowed[j] && self.at(obj, j) < -PIVOT_TOL);
            let Some(c) = entering else { return true };
            let mut best: Option<(f64, usize)> = None;
            for i in 0..self.m {
                let a = self.at(i, c);
                if a > PIVOT_TOL {
                    let ratio = self.at(i, self.ncols) / a;
                    best = match best {
                        None => Some((ratio, i)),
                        Some((br, bi)) => {
                            if ratio < br - 1e-12 || (ratio <= br + 1e-12 && self.basis[i] < self.basis[bi]) {
                                Some((ratio, i))
                            } else {
                                Some((br, bi))
                            }
                        }
                    };
                }
            }
            match best {
                None => return false,
                Some((_, r)) => self.pivot(r, c),
            }
        }
    }
}

/// Solves a linear program; variables are constrained to be nonnegative.
pub fn solve_lp(p: &LinearProgram) -> Result<LpSolution> {
    p.validate()?;
    let n = p.num_vars();
    // Gather rows including upper bounds.
    let mut rows: Vec<(Vec<f64>, Sense, f64)> = p.rows.iter().zip(&p.senses).zip(&p.rhs).map(|((r, s), b)| (r.clone(), *s, *b)).collect();
    for (j, u) in p.upper.iter().enumerate() {
        if let Some(u) = u {
            let mut r = vec![0.0; n];
            r[j] = 1.0;
            rows.push((r, Sense::Le, *u));
        }
    }
    let m = rows.len();
    // Flip rows to nonnegative rhs.
    let mut flip = vec![1.0; m];
    for (i, (r, s, b)) in rows.iter_mut().enumerate() {
        if *b < 0.0 {
            flip[i] = -1.0;
            r.iter_mut().for_each(|v| *v = -*v);
            *b = -*b;
            *s = match *s {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }
    // Column layout: x | slack/surplus per inequality row | artificial per Ge/Eq row.
    let mut slack_col = vec![None; m];
    let mut art_col = vec![None; m];
    let mut ncols = n;
    for (i, (_, s, _)) in rows.iter().enumerate() {
        if *s != Sense::Eq {
            slack_col[i] = Some(ncols);
            ncols += 1;
        }
    }
    for (i, (_, s, _)) in rows.iter().enumerate() {
        if *s != Sense::Le {
            art_col[i] = Some(ncols);
            ncols += 1;
        }
    }
    let w = ncols + 1;
    let mut t = vec![0.0; (m + 1) * w];
    let mut basis = vec![0; m];
    for (i, (r, s, b)) in rows.iter().enumerate() {
        t[i * w..i * w + n].copy_from_slice(r);
        if let Some(c) = slack_col[i] {
            t[i * w + c] = if *s == Sense::Le { 1.0 } else { -1.0 };
        }
        if let Some(c) = art_col[i] {
            t[i * w + c] = 1.0;
            basis[i] = c;
        } else {
            basis[i] = slack_col[i].unwrap();
        }
        t[i * w + ncols] = *b;
    }
    let mut tab = Tableau { m, ncols, t, basis };
    let is_art: Vec<bool> = (0..ncols).map(|j| art_col.contains(&Some(j))).collect();

    // Phase 1: minimize the sum of artificials.
    if art_col.iter().any(|c| c.is_some()) {
        for i in 0..m {
            if art_col[i].is_some() {
                for j in 0..w {
                    tab.t[m * w + j] -= tab.t[i * w + j];
                }
            }
        }
        for j in 0..ncols {
            if is_art[j] {
                tab.t[m * w + j] = 0.0;
            }
        }
        let allowed = vec![true; ncols];
        tab.run(&allowed);
        let infeas = -tab.at(m, ncols);
        let scale = 1.0 + rows.iter().map(|r| r.2.abs()).fold(0.0, f64::max);
        if infeas > FEAS_TOL * scale {
            return Ok(LpSolution { status: LpStatus::Infeasible, value: f64::NAN, x: vec![], duals: vec![] });
        }
        // Drive remaining artificials out of the basis where possible.
        for i in 0..m {
            if is_art[tab.basis[i]] {
                if let Some(c) = (0..ncols).find(|&j| !is_art[j] && tab.at(i, j).abs() > 1e-9) {
                    tab.pivot(i, c);
                }
            }
        }
    }

    // Phase 2.
    let sign = if p.maximize { -1.0 } else { 1.0 };
    let cost: Vec<f64> = (0..ncols).map(|j| if j < n { sign * p.objective[j] } else { 0.0 }).collect();
    for j in 0..w {
        tab.t[m * w + j] = if j < ncols { cost[j] } else { 0.0 };
    }
    for i in 0..m {
        let cb = cost[tab.basis[i]];
        if cb != 0.0 {
            for j in 0..w {
                tab.t[m * w + j] -= cb * tab.t[i * w + j];
            }
        }
    }
    let allowed: Vec<bool> = (0..ncols).map(|j| !is_art[j]).collect();
    if !tab.run(&allowed) {
        return Ok(LpSolution { status: LpStatus::Unbounded, value: if p.maximize { f64::INFINITY } else { f64::NEG_INFINITY }, x: vec![], duals: vec![] });
    }
    let mut x = vec![0.0; n];
    for i in 0..m {
        if tab.basis[i] < n {
            x[tab.basis[i]] = tab.at(i, ncols);
        }
    }
    let value: f64 = p.objective.iter().zip(&x).map(|(c, x)| c * x).sum();
    // Dual of the flipped row i is minus the reduced cost of its +1 marker column.
    let duals = (0..m)
        .map(|i| {
            let (marker, coef) = match (rows[i].1, slack_col[i], art_col[i]) {
                (Sense::Le, Some(c), _) => (c, 1.0),
                (_, _, Some(c)) => (c, 1.0),
                _ => unreachable!(),
            };
            let y_hat = -tab.at(m, marker) / coef;
            sign * flip[i] * y_hat
        })
        .collect();
    Ok(LpSolution { status: LpStatus::Optimal, value, x, duals })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_variable() {
        let mut lp = LinearProgram::new(vec![1.0], true);
        lp.add_constraint(vec![1.0], Sense::Le, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(vec![1.0], true);
        lp.add_constraint(vec![1.0], Sense::Ge, 2.0).add_constraint(vec![1.0], Sense::Le, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
        let mut lp = LinearProgram::new(vec![1.0, 1.0], true);
        lp.add_constraint(vec![1.0, -1.0], Sense::Le, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_and_negative_rhs() {
        // min x + 2y, x + y = 3, x - y >= -1  →  x = 3, y = 0? x - y ≥ -1 holds; value 3.
        let mut lp = LinearProgram::new(vec![1.0, 2.0], false);
        lp.add_constraint(vec![1.0, 1.0], Sense::Eq, 3.0).add_constraint(vec![1.0, -1.0], Sense::Ge, -1.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value - 3.0).abs() < 1e-12);
        let dual_value: f64 = s.duals.iter().zip(&lp.rhs).map(|(y, b)| y * b).sum();
        assert!((dual_value - s.value).abs() < 1e-9);
    }

    fn check_complementary_slackness(lp: &LinearProgram, s: &LpSolution) {
        for (i, row) in lp.rows.iter().enumerate() {
            let ax: f64 = row.iter().zip(&s.x).map(|(a, x)| a * x).sum();
            assert!(s.duals[i].abs() * (ax - lp.rhs[i]).abs() < 1e-8);
        }
        for j in 0..lp.num_vars() {
            let aty: f64 = lp.rows.iter().zip(&s.duals).map(|(r, y)| r[j] * y).sum();
            let reduced = lp.objective[j] - aty;
            assert!((reduced * s.x[j]).abs() < 1e-8);
        }
        let dual_value: f64 = s.duals.iter().zip(&lp.rhs).map(|(y, b)| y * b).sum();
        assert!((dual_value - s.value).abs() < 1e-8);
    }

    fn clique_lp(n: usize, sets: &[Vec<usize>]) -> LinearProgram {
        let mut lp = LinearProgram::new(vec![1.0; n], true);
        for s in sets {
            let mut r = vec![0.0; n];
            for &x in s {
                r[x] = 1.0;
            }
            lp.add_constraint(r, Sense::Le, 1.0);
        }
        lp
    }

    #[test]
    fn fractional_clique_k3() {
        let lp = clique_lp(3, &[vec![0], vec![1], vec![2]]);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value - 3.0).abs() < 1e-12);
        check_complementary_slackness(&lp, &s);
    }

    #[test]
    fn fractional_clique_c5() {
        // Maximal independent sets of C5 are the five pairs {i, i+2}.
        let sets: Vec<Vec<usize>> = (0..5).map(|i| vec![i, (i + 2) % 5]).collect();
        let lp = clique_lp(5, &sets);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value - 2.5).abs() < 1e-12);
        check_complementary_slackness(&lp, &s);
    }

    #[test]
    fn upper_bounds_respected() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0], true);
        lp.upper = vec![Some(0.5), Some(2.0)];
        lp.add_constraint(vec![1.0, 1.0], Sense::Le, 10.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value - 2.5).abs() < 1e-12);
    }
}
