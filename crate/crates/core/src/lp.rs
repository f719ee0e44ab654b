//! Dense two-phase simplex with Bland's rule, sized for small and medium
//! linear programs.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Self {
        Self { coeffs, relation, rhs }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    pub pivots: usize,
}

const EPS: f64 = 1e-11;

struct Tableau {
    rows: usize,
    cols: usize,
    // (rows + 1) × (cols + 1); last row is the objective, last column the rhs
    t: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * (self.cols + 1) + c]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let p = self.t[pr * w + pc];
        for c in 0..w {
            self.t[pr * w + c] /= p;
        }
        self.t[pr * w + pc] = 1.0;
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let f = self.t[r * w + pc];
            if f == 0.0 {
                continue;
            }
            for c in 0..w {
                self.t[r * w + c] -= f * self.t[pr * w + c];
            }
            self.t[r * w + pc] = 0.0;
        }
        self.basis[pr] = pc;
        self.pivots += 1;
    }

    /// Minimizes the objective row over columns `< allowed`.
    fn run(&mut self, allowed: usize) -> Result<()> {
        loop {
            // Bland: first improving column
            let entering = (0..allowed).find(|&c| self.at(self.rows, c) < -EPS);
            let Some(pc) = entering else { return Ok(()) };
            let mut best: Option<(f64, usize, usize)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > EPS {
                    let ratio = self.at(r, self.cols) / a;
                    let better = match best {
                        None => true,
                        Some((br, _, bv)) => ratio < br - EPS || (ratio <= br + EPS && self.basis[r] < bv),
                    };
                    if better {
                        best = Some((ratio, r, self.basis[r]));
                    }
                }
            }
            let Some((_, pr, _)) = best else { return Err(Error::Unbounded) };
            self.pivot(pr, pc);
        }
    }
}

/// Minimizes `objective · x` subject to `constraints` and `x ≥ 0`.
pub fn minimize(objective: &[f64], constraints: &[Constraint]) -> Result<LpSolution> {
    let n = objective.len();
    let m = constraints.len();
    for c in constraints {
        if c.coeffs.len() != n {
            return Err(Error::input("constraint width differs from objective"));
        }
    }
    // normalize to nonnegative right-hand sides
    let rows: Vec<(Vec<f64>, Relation, f64)> = constraints
        .iter()
        .map(|c| {
            if c.rhs < 0.0 {
                let rel = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (c.coeffs.iter().map(|v| -v).collect(), rel, -c.rhs)
            } else {
                (c.coeffs.clone(), c.relation, c.rhs)
            }
        })
        .collect();
    let slacks = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let artificials = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let cols = n + slacks + artificials;
    let w = cols + 1;
    let mut tab = Tableau {
        rows: m,
        cols,
        t: vec![0.0; (m + 1) * w],
        basis: vec![0; m],
        pivots: 0,
    };
    let mut s = n;
    let mut a = n + slacks;
    for (r, (coeffs, rel, rhs)) in rows.iter().enumerate() {
        tab.t[r * w..r * w + n].copy_from_slice(coeffs);
        tab.t[r * w + cols] = *rhs;
        match rel {
            Relation::Le => {
                tab.t[r * w + s] = 1.0;
                tab.basis[r] = s;
                s += 1;
            }
            Relation::Ge => {
                tab.t[r * w + s] = -1.0;
                s += 1;
                tab.t[r * w + a] = 1.0;
                tab.basis[r] = a;
                a += 1;
            }
            Relation::Eq => {
                tab.t[r * w + a] = 1.0;
                tab.basis[r] = a;
                a += 1;
            }
        }
    }

    if artificials > 0 {
        // phase 1: minimize the sum of artificials
        for r in 0..m {
            if tab.basis[r] >= n + slacks {
                for c in 0..w {
                    tab.t[m * w + c] -= tab.t[r * w + c];
                }
            }
        }
        for c in n + slacks..cols {
            tab.t[m * w + c] = 0.0;
        }
        tab.run(cols)?;
        let scale = rows.iter().map(|r| r.2).fold(1.0, f64::max);
        if -tab.at(m, cols) > 1e-9 * scale {
            return Err(Error::Infeasible);
        }
        // drive remaining artificials out of the basis
        for r in 0..m {
            if tab.basis[r] >= n + slacks {
                if let Some(c) = (0..n + slacks).find(|&c| tab.at(r, c).abs() > EPS) {
                    tab.pivot(r, c);
                }
            }
        }
    }

    // phase 2 objective in terms of the current basis
    for c in 0..w {
        tab.t[m * w + c] = 0.0;
    }
    tab.t[m * w..m * w + n].copy_from_slice(objective);
    for r in 0..m {
        let b = tab.basis[r];
        let f = tab.t[m * w + b];
        if f != 0.0 {
            for c in 0..w {
                tab.t[m * w + c] -= f * tab.t[r * w + c];
            }
        }
    }
    // artificial columns are barred from re-entering
    tab.run(n + slacks)?;

    let mut x = vec![0.0; n];
    for r in 0..m {
        if tab.basis[r] < n {
            x[tab.basis[r]] = tab.at(r, cols).max(0.0);
        }
    }
    let value = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution {
        x,
        value,
        pivots: tab.pivots,
    })
}

/// Maximizes `objective · x` subject to `constraints` and `x ≥ 0`.
pub fn maximize(objective: &[f64], constraints: &[Constraint]) -> Result<LpSolution> {
    let neg: Vec<f64> = objective.iter().map(|v| -v).collect();
    let mut sol = minimize(&neg, constraints)?;
    sol.value = -sol.value;
    Ok(sol)
}
