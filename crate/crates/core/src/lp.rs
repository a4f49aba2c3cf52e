//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Problems are in standard form: minimize `c.x` subject to `A x = b` and
//! `x >= lower` (default zero).

use crate::error::{Error, Result};

/// Largest primal residual `|Ax - b|` accepted for an optimal solution.
pub const FEASIBILITY_TOL: f64 = 1e-8;
/// Smallest magnitude accepted as a pivot element.
pub const PIVOT_TOL: f64 = 1e-11;
/// Default cap on the number of variables.
pub const DEFAULT_VAR_CAP: usize = 50_000;

const BOUND_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    cost: Vec<f64>,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    lower: Vec<f64>,
    var_cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal values; meaningful only when `status == Optimal`.
    pub x: Vec<f64>,
    pub objective: f64,
    /// Basic variable per retained constraint row.
    pub basis: Vec<usize>,
    pub pivots: usize,
    /// `max |Ax - b|` at the returned point.
    pub residual: f64,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

impl LinearProgram {
    pub fn new(cost: Vec<f64>) -> Self {
        let n = cost.len();
        Self {
            cost,
            rows: Vec::new(),
            rhs: Vec::new(),
            lower: vec![0.0; n],
            var_cap: DEFAULT_VAR_CAP,
        }
    }

    /// Appends the constraint `row . x = rhs`.
    pub fn add_equality(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.rows.push(row);
        self.rhs.push(rhs);
        self
    }

    pub fn with_equality(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.add_equality(row, rhs);
        self
    }

    pub fn with_lower_bounds(mut self, lower: Vec<f64>) -> Self {
        self.lower = lower;
        self
    }

    pub fn with_var_cap(mut self, cap: usize) -> Self {
        self.var_cap = cap;
        self
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.cost.len();
        if n > self.var_cap {
            return Err(Error::SizeCap {
                requested: n as u128,
                cap: self.var_cap as u128,
            });
        }
        if self.lower.len() != n {
            return Err(Error::Lp(format!("{} lower bounds for {n} variables", self.lower.len())));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Lp(format!("row {i} has {} entries, expected {n}", row.len())));
            }
        }
        let finite = self.cost.iter().all(|v| v.is_finite())
            && self.rhs.iter().all(|v| v.is_finite())
            && self.lower.iter().all(|v| v.is_finite())
            && self.rows.iter().flatten().all(|v| v.is_finite());
        if !finite {
            return Err(Error::Lp("non-finite input".into()));
        }
        Ok(())
    }

    pub fn solve(&self) -> Result<LpSolution> {
        lp_solve(self)
    }
}

/// Pivots between refactorizations of the tableau from the original data.
const REINVERT_EVERY: usize = 20;

struct Tableau {
    rows: usize,
    width: usize,
    data: Vec<f64>,
    /// reduced costs, with `-objective` in the last slot
    z: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
    /// the starting `[A | b]`, kept to rebuild `B^{-1} [A | b]` and drop accumulated error
    orig: Vec<f64>,
    /// costs of the columns of `orig`, zero in the last slot
    cost: Vec<f64>,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.data[i * self.width + self.width - 1]
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.data[r * w + c];
        for v in &mut self.data[r * w..(r + 1) * w] {
            *v /= p;
        }
        self.data[r * w + c] = 1.0;
        let (before, rest) = self.data.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        let f = self.z[c];
        if f != 0.0 {
            for (v, pv) in self.z.iter_mut().zip(prow.iter()) {
                *v -= f * pv;
            }
            self.z[c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    fn new(rows: usize, width: usize, orig: Vec<f64>, cost: Vec<f64>, basis: Vec<usize>, pivots: usize) -> Result<Self> {
        let mut t = Self {
            rows,
            width,
            data: orig.clone(),
            z: cost.clone(),
            basis,
            pivots,
            orig,
            cost,
        };
        if !t.reinvert() {
            return Err(Error::Lp("starting basis is singular".into()));
        }
        Ok(t)
    }

    fn price(&mut self) {
        self.z.copy_from_slice(&self.cost);
        for r in 0..self.rows {
            let cb = self.cost[self.basis[r]];
            if cb != 0.0 {
                for j in 0..self.width {
                    self.z[j] -= cb * self.data[r * self.width + j];
                }
            }
        }
    }

    /// Recomputes `B^{-1} [A | b]` and the reduced costs from `orig` by
    /// Gauss-Jordan elimination with partial pivoting. False if `B` is singular.
    fn reinvert(&mut self) -> bool {
        let (rows, w) = (self.rows, self.width);
        let bw = rows + w;
        let mut aug = vec![0.0; rows * bw];
        for i in 0..rows {
            for (k, &j) in self.basis.iter().enumerate() {
                aug[i * bw + k] = self.orig[i * w + j];
            }
            aug[i * bw + rows..(i + 1) * bw].copy_from_slice(&self.orig[i * w..(i + 1) * w]);
        }
        for col in 0..rows {
            let piv = (col..rows)
                .max_by(|&x, &y| aug[x * bw + col].abs().total_cmp(&aug[y * bw + col].abs()))
                .expect("nonempty");
            if aug[piv * bw + col].abs() < 1e-13 {
                return false;
            }
            if piv != col {
                for k in 0..bw {
                    aug.swap(piv * bw + k, col * bw + k);
                }
            }
            let p = aug[col * bw + col];
            for k in 0..bw {
                aug[col * bw + k] /= p;
            }
            for r in 0..rows {
                if r == col {
                    continue;
                }
                let f = aug[r * bw + col];
                if f != 0.0 {
                    for k in 0..bw {
                        aug[r * bw + k] -= f * aug[col * bw + k];
                    }
                }
            }
        }
        for i in 0..rows {
            self.data[i * w..(i + 1) * w].copy_from_slice(&aug[i * bw + rows..(i + 1) * bw]);
            for (k, &j) in self.basis.iter().enumerate() {
                self.data[i * w + j] = if k == i { 1.0 } else { 0.0 };
            }
        }
        self.price();
        for &j in &self.basis {
            self.z[j] = 0.0;
        }
        true
    }

    /// Bland's rule; `eligible` columns are `0..eligible`. Returns false if unbounded.
    fn run(&mut self, eligible: usize, opt_tol: f64) -> Result<bool> {
        let max_pivots = 200 * (self.rows + self.width) + 10_000;
        let mut fresh = false;
        let mut since = 0;
        loop {
            let Some(c) = (0..eligible).find(|&j| self.z[j] < -opt_tol) else {
                if !fresh && self.reinvert() {
                    fresh = true;
                    continue;
                }
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, c);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                        if (tie && self.basis[i] < self.basis[bi]) || (!tie && ratio < br) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                if !fresh && self.reinvert() {
                    fresh = true;
                    continue;
                }
                return Ok(false);
            };
            self.pivot(r, c);
            fresh = false;
            since += 1;
            if since >= REINVERT_EVERY {
                since = 0;
                fresh = self.reinvert();
            }
            if self.pivots > max_pivots {
                return Err(Error::Lp("pivot limit exceeded".into()));
            }
        }
    }
}

/// Solves `problem`; infeasible and unbounded programs are reported through the status.
pub fn lp_solve(problem: &LinearProgram) -> Result<LpSolution> {
    problem.validate()?;
    let n = problem.cost.len();
    let m = problem.rows.len();

    // shift to x' = x - lower >= 0 and make every right-hand side nonnegative
    let mut a: Vec<Vec<f64>> = problem.rows.clone();
    let mut b: Vec<f64> = problem
        .rows
        .iter()
        .zip(&problem.rhs)
        .map(|(row, &r)| r - row.iter().zip(&problem.lower).map(|(x, l)| x * l).sum::<f64>())
        .collect();
    for i in 0..m {
        if b[i] < 0.0 {
            b[i] = -b[i];
            for v in &mut a[i] {
                *v = -*v;
            }
        }
    }
    let b_scale = b.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));

    // phase 1 with one artificial per row
    let width = n + m + 1;
    let mut data = vec![0.0; m * width];
    for i in 0..m {
        data[i * width..i * width + n].copy_from_slice(&a[i]);
        data[i * width + n + i] = 1.0;
        data[i * width + width - 1] = b[i];
    }
    let mut cost1 = vec![0.0; width];
    for v in &mut cost1[n..n + m] {
        *v = 1.0;
    }
    let mut t = Tableau::new(m, width, data, cost1, (n..n + m).collect(), 0)?;
    t.run(n + m, 1e-11)?;
    let infeasibility = -t.z[width - 1];
    if infeasibility > FEASIBILITY_TOL * b_scale {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            x: Vec::new(),
            objective: f64::NAN,
            basis: Vec::new(),
            pivots: t.pivots,
            residual: infeasibility,
        });
    }

    // drive artificials out of the basis, dropping redundant rows
    let mut keep = vec![true; m];
    for i in 0..m {
        if t.basis[i] < n {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            let v = t.at(i, j).abs();
            if v > PIVOT_TOL && best.is_none_or(|(_, bv)| v > bv) {
                best = Some((j, v));
            }
        }
        match best {
            Some((j, _)) => t.pivot(i, j),
            None => keep[i] = false,
        }
    }
    let kept: Vec<usize> = (0..m).filter(|&i| keep[i]).collect();

    // phase 2 on the real columns only, refactored from the original rows
    let w2 = n + 1;
    let mut orig = Vec::with_capacity(kept.len() * w2);
    for &i in &kept {
        orig.extend_from_slice(&a[i]);
        orig.push(b[i]);
    }
    let basis: Vec<usize> = kept.iter().map(|&i| t.basis[i]).collect();
    let mut cost2 = problem.cost.clone();
    cost2.push(0.0);
    let mut t2 = Tableau::new(kept.len(), w2, orig, cost2, basis, t.pivots)?;
    let c_scale = problem.cost.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    if !t2.run(n, 1e-11 * c_scale)? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: Vec::new(),
            objective: f64::NEG_INFINITY,
            basis: t2.basis,
            pivots: t2.pivots,
            residual: f64::NAN,
        });
    }

    // recover the basic values directly from B x_B = b for accuracy
    let mut xs = vec![0.0; n];
    let tableau_values: Vec<f64> = (0..t2.rows).map(|r| t2.rhs(r)).collect();
    let refined = solve_dense(
        &kept
            .iter()
            .map(|&i| t2.basis.iter().map(|&j| a[i][j]).collect())
            .collect::<Vec<Vec<f64>>>(),
        &kept.iter().map(|&i| b[i]).collect::<Vec<f64>>(),
    );
    let values = refined.unwrap_or(tableau_values);
    for (r, &j) in t2.basis.iter().enumerate() {
        xs[j] = values[r];
    }
    for v in xs.iter_mut() {
        if *v < 0.0 {
            if *v < -BOUND_SNAP * b_scale {
                return Err(Error::Lp(format!("basic variable at {v:e} violates its bound")));
            }
            *v = 0.0;
        }
    }
    let x: Vec<f64> = xs.iter().zip(&problem.lower).map(|(v, l)| v + l).collect();
    let residual = problem
        .rows
        .iter()
        .zip(&problem.rhs)
        .map(|(row, r)| (row.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() - r).abs())
        .fold(0.0, f64::max);
    if residual > FEASIBILITY_TOL * b_scale {
        return Err(Error::Lp(format!("primal residual {residual:e} after solve")));
    }
    let objective = problem.cost.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective,
        basis: t2.basis,
        pivots: t2.pivots,
        residual,
    })
}

/// Gaussian elimination with partial pivoting; `None` if numerically singular.
pub(crate) fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let k = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &r)| {
            let mut v = row.clone();
            v.push(r);
            v
        })
        .collect();
    for col in 0..k {
        let p = (col..k).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[p][col].abs() < 1e-13 {
            return None;
        }
        m.swap(col, p);
        for r in col + 1..k {
            let f = m[r][col] / m[col][col];
            if f != 0.0 {
                for c in col..=k {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    let mut x = vec![0.0; k];
    for r in (0..k).rev() {
        let s: f64 = (r + 1..k).map(|c| m[r][c] * x[c]).sum();
        x[r] = (m[r][k] - s) / m[r][r];
    }
    Some(x)
}
