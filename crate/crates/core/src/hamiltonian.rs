//! Hamiltonian representations of jointly N-monotone fields.
//!
//! The pipeline is: cost `f` -> first-variable convexification `f~` ->
//! `psi = -f~` -> monotone fixed-point iteration of [`improve_step`] -> the
//! fixed point `H` -> [`antisymmetrize`] to an exactly N-antisymmetric `H-bar`.
//! Every property is certified by a full scan of the grid tensors.

use serde::Serialize;

use crate::domain::{DiscreteDomain, FieldTuple, TupleSpace, VectorField};
use crate::envelope::{convexify_block, Block, Sign};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpStatus};
use crate::monotonicity::{self, pair_cost, SearchMethod};
use crate::tensor::{GridHamiltonian, CLAIM_TOL};

/// Default sup-norm stopping tolerance of the fixed-point iteration.
pub const DEFAULT_FIXED_POINT_TOL: f64 = 1e-9;
/// Default iteration budget.
pub const DEFAULT_MAX_ITER: usize = 200;
/// Tolerance of every certified inequality in a [`RepresentationReport`].
pub const REPORT_TOL: f64 = 1e-8;

/// `f(t) = sum_l <u_l(x_{t_1}), x_{t_1} - x_{t_{l+1}}>`.
pub fn build_cost_f(fields: &FieldTuple) -> Result<GridHamiltonian> {
    let dom = fields.domain();
    let n = fields.order();
    let mut f = GridHamiltonian::from_fn(dom.len(), n, |t| {
        let a = t[0];
        (1..n)
            .map(|l| pair_cost(fields.u(l - 1, a), dom.point(a), dom.point(t[l])))
            .sum()
    })?;
    // affine in the tail
    f.flags_mut().convex_tail = true;
    f.claim_diagonal_zero()
}

/// `sum_{k=1}^{N-1} f(sigma^k t)`, the upper end of the representation sandwich.
fn upper_bound_tensor(f: &GridHamiltonian) -> Vec<f64> {
    let space = f.space();
    (0..space.len())
        .map(|idx| {
            let mut j = space.sigma(idx);
            let mut s = 0.0;
            for _ in 1..space.order() {
                s += f.at(j);
                j = space.sigma(j);
            }
            s
        })
        .collect()
}

/// Grid concavity in the first variable and grid convexity in the tail,
/// measured as sup-distance to the corresponding envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShapeCheck {
    pub concave_first_residual: f64,
    pub convex_tail_residual: f64,
}

impl ShapeCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.concave_first_residual <= tol && self.convex_tail_residual <= tol
    }
}

pub fn check_shape(h: &GridHamiltonian, domain: &DiscreteDomain) -> Result<ShapeCheck> {
    let cav = convexify_block(h, domain, Block::First, Sign::Concavify)?;
    let vex = convexify_block(h, domain, Block::Tail, Sign::Convexify)?;
    Ok(ShapeCheck {
        concave_first_residual: cav.max_abs_diff(h),
        convex_tail_residual: vex.max_abs_diff(h),
    })
}

/// Properties (i)-(iv) of `psi`, each as a boolean backed by a full scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiReport {
    pub concave_first: bool,
    pub convex_tail: bool,
    /// `psi >= -f` everywhere.
    pub dominates_minus_f: bool,
    pub sub_antisymmetric: bool,
    pub diagonal_zero: bool,
    pub max_rotation_sum: f64,
    pub jointly_monotone: bool,
}

impl PsiReport {
    pub fn all_hold(&self) -> bool {
        self.concave_first
            && self.convex_tail
            && self.dominates_minus_f
            && self.sub_antisymmetric
            && self.diagonal_zero
    }
}

/// `psi = -f~`, where `f~` convexifies the cost in its first variable.
///
/// Property failures are reported, except on jointly monotone input where they
/// can only come from a defect in this crate and are raised as internal errors.
pub fn build_psi(fields: &FieldTuple) -> Result<(GridHamiltonian, PsiReport)> {
    let dom = fields.domain();
    let f = build_cost_f(fields)?;
    let f_tilde = convexify_block(&f, dom, Block::First, Sign::Convexify)?;
    let mut psi = f_tilde.map(|v| -v)?;
    let jointly_monotone = monotonicity::check_joint(fields, monotonicity::DEFAULT_TOL)?.is_pass();

    let diagonal_zero = psi.max_abs_diagonal() <= CLAIM_TOL;
    if diagonal_zero {
        psi.snap_diagonal(CLAIM_TOL)?;
    }
    let shape = check_shape(&psi, dom)?;
    let dominates_minus_f = psi
        .values()
        .iter()
        .zip(f.values())
        .all(|(p, c)| p + c >= -CLAIM_TOL);
    psi.refresh_symmetry_flags();
    let flags = psi.flags_mut();
    flags.concave_first = shape.concave_first_residual <= CLAIM_TOL;
    flags.convex_tail = shape.convex_tail_residual <= CLAIM_TOL;
    let flags = psi.flags();
    let report = PsiReport {
        concave_first: flags.concave_first,
        convex_tail: flags.convex_tail,
        dominates_minus_f,
        sub_antisymmetric: flags.sub_antisymmetric,
        diagonal_zero: flags.diagonal_zero,
        max_rotation_sum: psi.max_rotation_sum(),
        jointly_monotone,
    };
    if jointly_monotone && !report.all_hold() {
        return Err(Error::Internal(format!(
            "psi of jointly monotone fields fails its properties: {report:?}"
        )));
    }
    Ok((psi, report))
}

/// `K(t) = -sum_{k=1}^{N-1} H(sigma^k t)`.
fn rotation_complement(h: &GridHamiltonian) -> Result<GridHamiltonian> {
    let space = *h.space();
    let values = (0..space.len())
        .map(|idx| {
            let mut j = space.sigma(idx);
            let mut s = 0.0;
            for _ in 1..space.order() {
                s += h.at(j);
                j = space.sigma(j);
            }
            -s
        })
        .collect();
    GridHamiltonian::from_space(space, values)
}

/// `H' = ((N-1) H + K^{2..N}) / N` where `K^{2..N}` is the tail-block
/// convexification of `K = -sum_{k>=1} H o sigma^k`.
pub fn improve_step(h: &GridHamiltonian, domain: &DiscreteDomain) -> Result<GridHamiltonian> {
    let flags = h.flags();
    if !(flags.concave_first && flags.convex_tail) {
        return Err(Error::InvalidArgument(
            "improve_step needs a Hamiltonian flagged concave-first and convex-tail".into(),
        ));
    }
    let n = h.order() as f64;
    let k = rotation_complement(h)?;
    let k_tail = convexify_block(&k, domain, Block::Tail, Sign::Convexify)?;
    let values = h
        .values()
        .iter()
        .zip(k_tail.values())
        .map(|(a, b)| ((n - 1.0) * a + b) / n)
        .collect();
    let mut next = GridHamiltonian::from_space(*h.space(), values)?;
    if next.max_abs_diagonal() <= CLAIM_TOL {
        next.snap_diagonal(CLAIM_TOL)?;
    }
    next.refresh_symmetry_flags();
    let f = next.flags_mut();
    f.concave_first = true;
    f.convex_tail = true;
    Ok(next)
}

/// `H-bar(t) = (1/N) sum_{k=1}^{N-1} (H(t) - H(sigma^k t))`; exactly N-antisymmetric.
pub fn antisymmetrize(h: &GridHamiltonian) -> Result<GridHamiltonian> {
    let space = *h.space();
    let n = space.order() as f64;
    let values = (0..space.len())
        .map(|idx| {
            let here = h.at(idx);
            let mut j = space.sigma(idx);
            let mut s = 0.0;
            for _ in 1..space.order() {
                s += here - h.at(j);
                j = space.sigma(j);
            }
            s / n
        })
        .collect();
    let mut bar = GridHamiltonian::from_space(space, values)?;
    bar.refresh_symmetry_flags();
    bar.claim_antisymmetric()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LegendreResult {
    pub value: f64,
    /// Tail `(y_1, ..., y_{N-1})` attaining the supremum.
    pub argmax: Vec<usize>,
}

/// `L_H(x, p) = max_y sum_l <p_l, y_l> - H(x, y)` over grid tails, ties to the
/// lexicographically smallest tail.
pub fn legendre_transform(
    h: &GridHamiltonian,
    domain: &DiscreteDomain,
    x_index: usize,
    p: &[Vec<f64>],
) -> Result<LegendreResult> {
    let n = h.order();
    let m = domain.len();
    if h.m() != m || x_index >= m {
        return Err(Error::InvalidArgument("index or domain mismatch".into()));
    }
    if p.len() != n - 1 || p.iter().any(|v| v.len() != domain.dimension()) {
        return Err(Error::InvalidArgument(format!(
            "need {} dual vectors of dimension {}",
            n - 1,
            domain.dimension()
        )));
    }
    // <p_l, y> for every l and grid point y
    let pairing: Vec<Vec<f64>> = p
        .iter()
        .map(|pl| domain.points().iter().map(|y| crate::domain::dot(pl, y)).collect())
        .collect();
    let space = h.space();
    let tail_space = TupleSpace::new(m, n - 1)?;
    let mut tail = vec![0; n - 1];
    let mut best = (f64::NEG_INFINITY, 0usize);
    for k in 0..space.tail_len() {
        tail_space.decode_into(k, &mut tail);
        let mut v = 0.0;
        for (l, &y) in tail.iter().enumerate() {
            v += pairing[l][y];
        }
        v -= h.at(space.join_first(x_index, k));
        if v > best.0 {
            best = (v, k);
        }
    }
    Ok(LegendreResult {
        value: best.0,
        argmax: tail_space.decode(best.1),
    })
}

/// Central finite differences of `H(x, ., ..., .)` at interior diagonal points of a regular 1-d grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteDifferenceCheck {
    pub spacing: f64,
    pub tolerance: f64,
    pub max_residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationSummary {
    pub iterations: usize,
    /// `max |H' - H|` at the last step.
    pub fixed_point_residual: f64,
    /// `max |H + H_{2..N}|`, i.e. `max |H - K^{2..N}|`.
    pub symmetry_residual: f64,
    /// Largest entrywise decrease seen between consecutive iterates.
    pub max_decrease: f64,
    /// Largest excess of any iterate over the sandwich upper bound.
    pub max_upper_excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AntisymmetrizedCheck {
    /// `max |sum_k H-bar(sigma^k t)|`.
    pub rotation_residual: f64,
    /// `max_i (L_{H-bar} - L_H)(x_i, u(x_i))`, nonpositive when `H-bar >= H`.
    pub legendre_excess: f64,
    /// `max_i |L_{H-bar}(x_i, u(x_i)) - sum_l <u_l(x_i), x_i>|`.
    pub dualrep_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepresentationReport {
    pub tolerance: f64,
    pub diagonal_values: Vec<f64>,
    /// Per point: worst violation of `H(i, y) - H(i, .., i) >= sum_l <u_l(x_i), y_l - x_i>`.
    pub subgradient_residuals: Vec<f64>,
    /// Per point: `|L_H(x_i, u(x_i)) - sum_l <u_l(x_i), x_i>|`.
    pub dualrep_residuals: Vec<f64>,
    pub max_rotation_sum: f64,
    pub lower_bound_violation: f64,
    pub upper_bound_violation: f64,
    pub antisymmetrized: AntisymmetrizedCheck,
    pub iteration: Option<IterationSummary>,
    /// Reported for regular 1-d grids only; not part of `passed`.
    pub finite_difference: Option<FiniteDifferenceCheck>,
    pub passed: bool,
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

impl RepresentationReport {
    fn evaluate(&mut self) {
        let t = self.tolerance;
        let mut ok = max_of(&self.diagonal_values.iter().map(|v| v.abs()).collect::<Vec<_>>()) <= t
            && max_of(&self.subgradient_residuals) <= t
            && max_of(&self.dualrep_residuals) <= t
            && self.max_rotation_sum <= t
            && self.lower_bound_violation <= t
            && self.upper_bound_violation <= t
            && self.antisymmetrized.rotation_residual <= 1e-12_f64.max(t * 1e-4)
            && self.antisymmetrized.legendre_excess <= t
            && self.antisymmetrized.dualrep_residual <= t;
        if let Some(it) = &self.iteration {
            ok &= it.max_decrease <= t && it.max_upper_excess <= t;
        }
        self.passed = ok;
    }

    pub fn max_dualrep_residual(&self) -> f64 {
        max_of(&self.dualrep_residuals)
    }

    pub fn max_subgradient_residual(&self) -> f64 {
        max_of(&self.subgradient_residuals)
    }
}

/// `sum_l <u_l(x_i), x_i>`.
fn diagonal_pairing(fields: &FieldTuple, i: usize) -> f64 {
    let x = fields.domain().point(i);
    (0..fields.order() - 1)
        .map(|l| crate::domain::dot(fields.u(l, i), x))
        .sum()
}

fn field_duals(fields: &FieldTuple, i: usize) -> Vec<Vec<f64>> {
    (0..fields.order() - 1).map(|l| fields.u(l, i).to_vec()).collect()
}

/// Checks the dual representation `L_H(x, u(x)) = sum_l <u_l(x), x>` at every
/// sample point, the sandwich bounds, the discrete subgradient inequality and
/// the `H-bar` chain `sum <u, x> <= L_{H-bar} <= L_H`.
pub fn verify_dualrep(h: &GridHamiltonian, fields: &FieldTuple) -> Result<RepresentationReport> {
    verify_dualrep_with_tol(h, fields, REPORT_TOL)
}

pub fn verify_dualrep_with_tol(
    h: &GridHamiltonian,
    fields: &FieldTuple,
    tolerance: f64,
) -> Result<RepresentationReport> {
    let dom = fields.domain();
    let m = dom.len();
    let n = fields.order();
    if h.m() != m || h.order() != n {
        return Err(Error::InvalidArgument(
            "Hamiltonian and fields have different shapes".into(),
        ));
    }
    let f = build_cost_f(fields)?;
    let upper = upper_bound_tensor(&f);
    let space = *h.space();
    let lower_bound_violation = (0..space.len())
        .map(|idx| -f.at(idx) - h.at(idx))
        .fold(0.0, f64::max);
    let upper_bound_violation = (0..space.len())
        .map(|idx| h.at(idx) - upper[idx])
        .fold(0.0, f64::max);
    let diagonal_values: Vec<f64> = (0..m).map(|i| h.diagonal(i)).collect();
    let subgradient_residuals = (0..m)
        .map(|i| {
            let diag = h.diagonal(i);
            (0..space.tail_len())
                .map(|k| {
                    let idx = space.join_first(i, k);
                    // -f(i, y) = sum_l <u_l(x_i), y_l - x_i>
                    -f.at(idx) - (h.at(idx) - diag)
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let bar = antisymmetrize(h)?;
    let mut dualrep_residuals = Vec::with_capacity(m);
    let mut legendre_excess = f64::NEG_INFINITY;
    let mut bar_residual: f64 = 0.0;
    for i in 0..m {
        let p = field_duals(fields, i);
        let target = diagonal_pairing(fields, i);
        let lh = legendre_transform(h, dom, i, &p)?.value;
        let lbar = legendre_transform(&bar, dom, i, &p)?.value;
        dualrep_residuals.push((lh - target).abs());
        legendre_excess = legendre_excess.max(lbar - lh);
        bar_residual = bar_residual.max((lbar - target).abs());
    }
    let mut report = RepresentationReport {
        tolerance,
        diagonal_values,
        subgradient_residuals,
        dualrep_residuals,
        max_rotation_sum: h.max_rotation_sum(),
        lower_bound_violation,
        upper_bound_violation,
        antisymmetrized: AntisymmetrizedCheck {
            rotation_residual: bar.max_abs_rotation_sum(),
            legendre_excess,
            dualrep_residual: bar_residual,
        },
        iteration: None,
        finite_difference: finite_difference_check(h, fields),
        passed: false,
    };
    report.evaluate();
    Ok(report)
}

fn finite_difference_check(h: &GridHamiltonian, fields: &FieldTuple) -> Option<FiniteDifferenceCheck> {
    let dom = fields.domain();
    let spacing = dom.regular_spacing()?;
    let n = fields.order();
    let m = dom.len();
    let find = |x: f64| {
        (0..m).find(|&j| (dom.point(j)[0] - x).abs() <= 1e-9 * spacing.abs().max(1.0))
    };
    let mut max_residual: f64 = 0.0;
    let mut any = false;
    for i in 0..m {
        let x = dom.point(i)[0];
        let (Some(lo), Some(hi)) = (find(x - spacing), find(x + spacing)) else {
            continue;
        };
        any = true;
        for l in 0..n - 1 {
            let mut up = vec![i; n];
            let mut down = vec![i; n];
            up[l + 1] = hi;
            down[l + 1] = lo;
            let fd = (h.get(&up) - h.get(&down)) / (2.0 * spacing);
            max_residual = max_residual.max((fd - fields.u(l, i)[0]).abs());
        }
    }
    if !any {
        return None;
    }
    let tolerance = 10.0 * spacing;
    Some(FiniteDifferenceCheck {
        spacing,
        tolerance,
        max_residual,
        passed: max_residual <= tolerance,
    })
}

/// Applies [`improve_step`] from `start` until the sup-norm change drops below
/// `tol` or `max_iter` steps are taken, tracking monotonicity of the iterates
/// and their excess over the sandwich upper bound of `fields`. No monotonicity
/// precondition; callers compare the residual with `tol` to detect convergence.
pub fn iterate_fixed_point(
    start: GridHamiltonian,
    fields: &FieldTuple,
    tol: f64,
    max_iter: usize,
) -> Result<(GridHamiltonian, IterationSummary)> {
    let dom = fields.domain();
    let upper = upper_bound_tensor(&build_cost_f(fields)?);
    let mut h = start;
    let mut max_decrease: f64 = 0.0;
    let mut max_upper_excess: f64 = 0.0;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter {
        let next = improve_step(&h, dom)?;
        iterations += 1;
        residual = 0.0;
        for (idx, (&a, &b)) in h.values().iter().zip(next.values()).enumerate() {
            residual = residual.max((b - a).abs());
            max_decrease = max_decrease.max(a - b);
            max_upper_excess = max_upper_excess.max(b - upper[idx]);
        }
        h = next;
        if residual < tol {
            break;
        }
    }
    let summary = IterationSummary {
        iterations,
        fixed_point_residual: residual,
        symmetry_residual: residual * fields.order() as f64,
        max_decrease,
        max_upper_excess,
    };
    Ok((h, summary))
}

/// Iterates [`improve_step`] from `psi` to a fixed point and certifies the
/// representation of `fields` by it.
pub fn build_maximal_h(
    fields: &FieldTuple,
    tol: f64,
    max_iter: usize,
) -> Result<(GridHamiltonian, RepresentationReport)> {
    if let Some(w) = monotonicity::check_joint(fields, monotonicity::DEFAULT_TOL)?.witness() {
        return Err(Error::NotMonotone {
            order: fields.order(),
            defect: w.defect,
        });
    }
    let (psi, _) = build_psi(fields)?;
    let (h, summary) = iterate_fixed_point(psi, fields, tol, max_iter)?;
    if summary.fixed_point_residual >= tol {
        return Err(Error::NoConvergence {
            iterations: summary.iterations,
            residual: summary.fixed_point_residual,
        });
    }
    let mut report = verify_dualrep(&h, fields)?;
    report.iteration = Some(summary);
    report.evaluate();
    Ok((h, report))
}

/// Reads a discrete subgradient of `y -> H(i, y)` at the diagonal tail for
/// every point `i`. `None` if some point admits no supporting affine minorant.
pub fn extract_subgradients(h: &GridHamiltonian, domain: &DiscreteDomain) -> Result<Option<FieldTuple>> {
    let n = h.order();
    let m = domain.len();
    let d = domain.dimension();
    if h.m() != m || n < 2 {
        return Err(Error::InvalidArgument("shape mismatch".into()));
    }
    let space = *h.space();
    let tail_space = TupleSpace::new(m, n - 1)?;
    let dim = (n - 1) * d;
    let tails = space.tail_len();
    let mut fields = vec![vec![vec![0.0; d]; m]; n - 1];
    for i in 0..m {
        let xi = domain.point(i);
        let diag = h.diagonal(i);
        // variables: p+ (dim), p- (dim), one slack per tail
        let nv = 2 * dim + tails;
        let mut cost = vec![1.0; 2 * dim];
        cost.extend(std::iter::repeat_n(0.0, tails));
        let mut lp = LinearProgram::new(cost);
        for k in 0..tails {
            let tail = tail_space.decode(k);
            let mut row = vec![0.0; nv];
            for (l, &y) in tail.iter().enumerate() {
                for c in 0..d {
                    let delta = domain.point(y)[c] - xi[c];
                    row[l * d + c] = delta;
                    row[dim + l * d + c] = -delta;
                }
            }
            row[2 * dim + k] = 1.0;
            lp.add_equality(row, h.at(space.join_first(i, k)) - diag);
        }
        let sol = lp.solve()?;
        if sol.status != LpStatus::Optimal {
            return Ok(None);
        }
        for l in 0..n - 1 {
            for c in 0..d {
                fields[l][i][c] = sol.x[l * d + c] - sol.x[dim + l * d + c];
            }
        }
    }
    FieldTuple::new(domain.clone(), fields).map(Some)
}

/// Certificates for the two-variable representation of a single field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoVarReport {
    pub order: usize,
    pub tolerance: f64,
    pub max_abs_diagonal: f64,
    /// Largest `sum_i F(x_i, x_{i+1})` over closed grid cycles of length `order`.
    pub max_cycle_sum: f64,
    /// Worst violation of `<u(x), y - x> <= F(x, y)`.
    pub lower_violation: f64,
    /// Worst violation of `F(x, y) <= <u(y), y - x>`.
    pub upper_violation: f64,
    pub passed: bool,
}

/// Largest cycle sum of an order-2 tensor over closed walks of length `<= len`.
pub fn max_cycle_sum(f: &GridHamiltonian, len: usize) -> f64 {
    let m = f.m();
    let neg: Vec<f64> = f.values().iter().map(|v| -v).collect();
    // constant cycles give 0 when the diagonal vanishes
    let diag = (0..m).map(|i| f.diagonal(i)).fold(f64::NEG_INFINITY, f64::max) * len as f64;
    match monotonicity::min_closed_walk(&neg, m, len) {
        Some(w) => (-w.cost).max(diag),
        None => diag.min(0.0),
    }
}

/// `F = -f^1` where `f^1` is the convexification in `x` of `f(x, y) = <u(x), x - y>`.
pub fn build_two_var_f(field: &VectorField, order: usize, tol: f64) -> Result<(GridHamiltonian, TwoVarReport)> {
    if let Some(w) = monotonicity::check_single(field, order, monotonicity::DEFAULT_TOL, SearchMethod::NegativeCycle)?
        .witness()
    {
        return Err(Error::NotMonotone {
            order,
            defect: w.defect,
        });
    }
    let dom = field.domain();
    let pair = FieldTuple::padded(field, 2)?;
    let f = build_cost_f(&pair)?;
    let f1 = convexify_block(&f, dom, Block::First, Sign::Convexify)?;
    let mut big_f = f1.map(|v| -v)?;
    let max_abs_diagonal = big_f.max_abs_diagonal();
    if max_abs_diagonal > tol {
        return Err(Error::Internal(format!(
            "F has diagonal entry {max_abs_diagonal:e} for a monotone field"
        )));
    }
    big_f.snap_diagonal(tol)?;
    let m = dom.len();
    let mut lower_violation: f64 = 0.0;
    let mut upper_violation: f64 = 0.0;
    for x in 0..m {
        for y in 0..m {
            let v = big_f.get(&[x, y]);
            let lo = pair_cost(field.at(x), dom.point(y), dom.point(x));
            let hi = pair_cost(field.at(y), dom.point(y), dom.point(x));
            lower_violation = lower_violation.max(lo - v);
            upper_violation = upper_violation.max(v - hi);
        }
    }
    let cycle = max_cycle_sum(&big_f, order);
    let report = TwoVarReport {
        order,
        tolerance: tol,
        max_abs_diagonal,
        max_cycle_sum: cycle,
        lower_violation,
        upper_violation,
        passed: cycle <= tol && lower_violation <= tol && upper_violation <= tol,
    };
    if !report.passed {
        return Err(Error::Internal(format!(
            "two-variable representation fails its certificates: {report:?}"
        )));
    }
    big_f.refresh_symmetry_flags();
    let flags = big_f.flags_mut();
    flags.concave_first = true;
    flags.convex_tail = true;
    Ok((big_f, report))
}

/// Index range of the subtracted chain in [`lift_f_to_h`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftVariant {
    /// Subtract `F(t_i, t_{i+1})` for `i = 2..N-1`.
    Printed,
    /// Subtract `F(t_i, t_{i+1})` for `i = 1..N-1`.
    Corrected,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftReport {
    pub variant: LiftVariant,
    pub order: usize,
    /// `max |sum_k H(sigma^k t)|`.
    pub max_abs_rotation_sum: f64,
    pub antisymmetric: bool,
    /// `max |sum_k H(sigma^k t) - (1/N) sum_cyclic F(t_i, t_{i+1})|`.
    pub cyclic_prediction_residual: f64,
    /// `min (H(t) - F(t_1, t_2))`.
    pub min_excess_over_f: f64,
    pub dominates_f: bool,
}

const LIFT_TOL: f64 = 1e-10;

/// Lifts a two-variable `F` to a function of `N` variables by subtracting a
/// chain of consecutive pairs; both index variants are available and reported.
pub fn lift_f_to_h(f: &GridHamiltonian, order: usize, variant: LiftVariant) -> Result<(GridHamiltonian, LiftReport)> {
    if f.order() != 2 {
        return Err(Error::InvalidArgument("F must be a function of two variables".into()));
    }
    if order < 2 {
        return Err(Error::InvalidArgument("order must be at least 2".into()));
    }
    if let Some(i) = (0..f.m()).find(|&i| f.diagonal(i) != 0.0) {
        return Err(Error::Invariant(format!(
            "F({i}, {i}) = {:e} is not zero",
            f.diagonal(i)
        )));
    }
    let m = f.m();
    let nf = order as f64;
    let first = match variant {
        LiftVariant::Printed => 2,
        LiftVariant::Corrected => 1,
    };
    let pair = |a: usize, b: usize| f.values()[a * m + b];
    let mut h = GridHamiltonian::from_fn(m, order, |t| {
        let chain: f64 = (first..order).map(|i| pair(t[i - 1], t[i])).sum();
        ((nf - 1.0) * pair(t[0], t[1]) - chain) / nf
    })?;
    let space = *h.space();
    let mut t = vec![0; order];
    let mut prediction: f64 = 0.0;
    let mut min_excess = f64::INFINITY;
    for idx in 0..space.len() {
        space.decode_into(idx, &mut t);
        let cyclic: f64 = (0..order).map(|i| pair(t[i], t[(i + 1) % order])).sum();
        prediction = prediction.max((h.rotation_sum(idx) - cyclic / nf).abs());
        min_excess = min_excess.min(h.at(idx) - pair(t[0], t[1]));
    }
    h.refresh_symmetry_flags();
    let max_abs_rotation_sum = h.max_abs_rotation_sum();
    let report = LiftReport {
        variant,
        order,
        max_abs_rotation_sum,
        antisymmetric: max_abs_rotation_sum <= LIFT_TOL,
        cyclic_prediction_residual: prediction,
        min_excess_over_f: min_excess,
        dominates_f: min_excess >= -LIFT_TOL,
    };
    Ok((h, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(dom: &DiscreteDomain) -> VectorField {
        VectorField::from_fn(dom.clone(), |x| x.to_vec()).unwrap()
    }

    #[test]
    fn cost_examples() {
        let dom = DiscreteDomain::line(&[0.0, 1.0]).unwrap();
        let f = build_cost_f(&FieldTuple::padded(&identity(&dom), 2).unwrap()).unwrap();
        assert_eq!(f.get(&[1, 0]), 1.0);
        assert_eq!(f.get(&[0, 1]), 0.0);
        assert_eq!(f.get(&[0, 0]), 0.0);
        assert!(f.flags().diagonal_zero);

        let z = build_cost_f(&FieldTuple::zero(dom, 3).unwrap()).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn psi_of_zero_fields() {
        let dom = DiscreteDomain::line(&[0.0, 1.0, 2.0]).unwrap();
        let (psi, report) = build_psi(&FieldTuple::zero(dom, 3).unwrap()).unwrap();
        assert!(psi.values().iter().all(|v| v.abs() < 1e-15));
        assert!(report.all_hold());
    }

    #[test]
    fn psi_of_identity_pair() {
        let dom = DiscreteDomain::line(&[-1.0, 0.0, 0.5, 2.0]).unwrap();
        let ft = FieldTuple::padded(&identity(&dom), 3).unwrap();
        let (psi, report) = build_psi(&ft).unwrap();
        assert!(report.all_hold(), "{report:?}");
        assert!(psi.max_rotation_sum() <= 1e-12);
    }

    #[test]
    fn psi_of_rotation_is_reported_not_raised() {
        let dom = DiscreteDomain::uniform(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let u = VectorField::from_fn(dom, |x| vec![-x[1], x[0]]).unwrap();
        let (_, report) = build_psi(&FieldTuple::padded(&u, 3).unwrap()).unwrap();
        assert!(!report.jointly_monotone);
        assert!(!report.sub_antisymmetric);
    }

    #[test]
    fn improve_step_fixed_points() {
        let dom = DiscreteDomain::line(&[0.0, 1.0, 3.0]).unwrap();
        let mut zero = GridHamiltonian::zeros(3, 2).unwrap();
        zero.flags_mut().concave_first = true;
        zero.flags_mut().convex_tail = true;
        let next = improve_step(&zero, &dom).unwrap();
        assert!(next.values().iter().all(|v| v.abs() < 1e-15));

        // antisymmetric concave-convex H(x, y) = g(y) - g(x), g convex: H = -K^{2..N}
        let g = |x: f64| x * x;
        let xs = [0.0, 1.0, 3.0];
        let mut h = GridHamiltonian::from_fn(3, 3, |t| g(xs[t[1]]) - g(xs[t[0]])).unwrap();
        h.flags_mut().concave_first = true;
        h.flags_mut().convex_tail = true;
        let next = improve_step(&h, &dom).unwrap();
        assert!(next.max_abs_diff(&h) < 1e-12);
    }

    #[test]
    fn improve_step_requires_shape_flags() {
        let dom = DiscreteDomain::line(&[0.0, 1.0]).unwrap();
        let h = GridHamiltonian::zeros(2, 2).unwrap();
        assert!(improve_step(&h, &dom).is_err());
    }

    #[test]
    fn antisymmetrize_examples() {
        let c = GridHamiltonian::from_fn(3, 3, |_| 2.5).unwrap();
        let bar = antisymmetrize(&c).unwrap();
        assert!(bar.values().iter().all(|&v| v == 0.0));

        let g = [0.1, -0.4, 1.3];
        let h = GridHamiltonian::from_fn(3, 3, |t| g[t[0]] - g[t[2]]).unwrap();
        let bar = antisymmetrize(&h).unwrap();
        assert!(bar.max_abs_diff(&h) < 1e-15);
        assert!(bar.flags().antisymmetric);
    }

    #[test]
    fn legendre_examples() {
        let dom = DiscreteDomain::line(&[0.0, 0.5, 1.0]).unwrap();
        let zero = GridHamiltonian::zeros(3, 2).unwrap();
        let r = legendre_transform(&zero, &dom, 0, &[vec![1.0]]).unwrap();
        assert_eq!((r.value, r.argmax.clone()), (1.0, vec![2]));
        let r = legendre_transform(&zero, &dom, 1, &[vec![-2.0]]).unwrap();
        assert_eq!((r.value, r.argmax.clone()), (0.0, vec![0]));

        let xs = [0.0, 1.0, 2.0];
        let dom = DiscreteDomain::line(&xs).unwrap();
        let h = GridHamiltonian::from_fn(3, 2, |t| xs[t[1]].powi(2) - xs[t[0]].powi(2)).unwrap();
        let r = legendre_transform(&h, &dom, 0, &[vec![2.0]]).unwrap();
        assert_eq!((r.value, r.argmax.clone()), (1.0, vec![1]));
        assert!(legendre_transform(&h, &dom, 0, &[vec![2.0], vec![1.0]]).is_err());
    }

    #[test]
    fn maximal_h_zero_fields() {
        let dom = DiscreteDomain::line(&[0.0, 1.0, 2.0]).unwrap();
        let (h, report) = build_maximal_h(&FieldTuple::zero(dom, 3).unwrap(), 1e-9, 200).unwrap();
        assert!(h.values().iter().all(|v| v.abs() < 1e-14));
        assert!(report.passed);
    }

    #[test]
    fn maximal_h_rejects_non_monotone() {
        let dom = DiscreteDomain::uniform(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let u = VectorField::from_fn(dom, |x| vec![-x[1], x[0]]).unwrap();
        let err = build_maximal_h(&FieldTuple::padded(&u, 3).unwrap(), 1e-9, 200).unwrap_err();
        assert!(matches!(err, Error::NotMonotone { .. }));
    }

    #[test]
    fn krauss_case_sandwich() {
        let xs = [-1.0, 0.0, 1.0];
        let dom = DiscreteDomain::line(&xs).unwrap();
        let ft = FieldTuple::padded(&identity(&dom), 2).unwrap();
        let (h, report) = build_maximal_h(&ft, 1e-9, 200).unwrap();
        assert!(report.passed, "{report:?}");
        for a in 0..3 {
            for b in 0..3 {
                let (x, y) = (xs[a], xs[b]);
                let v = h.get(&[a, b]);
                assert!(x * (y - x) <= v + 1e-9 && v <= y * (y - x) + 1e-9);
                // smooth candidate (y^2 - x^2)/2 lies in the same sandwich
                let s = (y * y - x * x) / 2.0;
                assert!(x * (y - x) <= s && s <= y * (y - x));
                assert!(h.get(&[a, b]) + h.get(&[b, a]) <= 1e-9);
            }
        }
    }

    #[test]
    fn two_var_examples() {
        let dom = DiscreteDomain::line(&[0.0, 1.0]).unwrap();
        let (f, report) = build_two_var_f(&VectorField::zero(dom.clone()), 3, 1e-8).unwrap();
        assert!(f.values().iter().all(|v| v.abs() < 1e-15));
        assert!(report.passed);

        let (f, _) = build_two_var_f(&identity(&dom), 2, 1e-8).unwrap();
        let (f01, f10) = (f.get(&[0, 1]), f.get(&[1, 0]));
        assert!((-1e-12..=1.0 + 1e-12).contains(&f01));
        assert!((-1.0 - 1e-12..=1e-12).contains(&f10));
        assert!(f01 + f10 <= 1e-12);
    }

    #[test]
    fn two_var_rejects_non_monotone() {
        let dom = DiscreteDomain::line(&[0.0, 1.0]).unwrap();
        let neg = VectorField::from_fn(dom, |x| vec![-x[0]]).unwrap();
        assert!(matches!(build_two_var_f(&neg, 2, 1e-8), Err(Error::NotMonotone { .. })));
    }

    #[test]
    fn lift_examples() {
        let zero = GridHamiltonian::zeros(3, 2).unwrap();
        for variant in [LiftVariant::Printed, LiftVariant::Corrected] {
            let (h, r) = lift_f_to_h(&zero, 4, variant).unwrap();
            assert!(h.values().iter().all(|&v| v == 0.0));
            assert!(r.antisymmetric && r.dominates_f);
        }
        let bad = GridHamiltonian::from_fn(2, 2, |_| 1.0).unwrap();
        assert!(lift_f_to_h(&bad, 3, LiftVariant::Printed).is_err());
    }
}
