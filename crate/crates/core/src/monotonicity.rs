//! Cycle defects and N-cyclic, step-l, joint and all-order monotonicity checks
//! with explicit violating-cycle certificates.

use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::domain::{FieldTuple, IndexCycle, TupleSpace, VectorField};
use crate::error::{Error, Result};

/// Absolute tolerance on cycle defects.
pub const DEFAULT_TOL: f64 = 1e-9;

/// `<u, x_i - x_j>`, the single building block of every cycle sum.
#[inline]
pub(crate) fn pair_cost(u: &[f64], xi: &[f64], xj: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..u.len() {
        s += u[k] * (xi[k] - xj[k]);
    }
    s
}

/// `table[i * m + j] = <u(x_i), x_i - x_j>`.
pub(crate) fn cost_table(field: &VectorField) -> Vec<f64> {
    let dom = field.domain();
    let m = dom.len();
    let mut table = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            table[i * m + j] = pair_cost(field.at(i), dom.point(i), dom.point(j));
        }
    }
    table
}

/// Which cycle condition a witness violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    Single,
    Joint,
    Step(usize),
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessKind::Single => f.write_str("single"),
            WitnessKind::Joint => f.write_str("joint"),
            WitnessKind::Step(l) => write!(f, "step-{l}"),
        }
    }
}

impl Serialize for WitnessKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A cycle whose defect is below `-tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleWitness {
    #[serde(serialize_with = "serialize_cycle")]
    pub cycle: IndexCycle,
    pub defect: f64,
    pub kind: WitnessKind,
}

fn serialize_cycle<S: Serializer>(c: &IndexCycle, s: S) -> std::result::Result<S::Ok, S::Error> {
    c.indices().serialize(s)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass,
    Witness(CycleWitness),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn witness(&self) -> Option<&CycleWitness> {
        match self {
            Verdict::Pass => None,
            Verdict::Witness(w) => Some(w),
        }
    }
}

/// How [`check_single`] searches for violating cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMethod {
    /// Scan all `m^N` index tuples.
    Enumerate,
    /// Depth-limited closed-walk dynamic program on the complete cost graph.
    NegativeCycle,
}

/// `sum_{i=1}^N sum_{l=1}^{N-1} <u_l(x_i), x_i - x_{i+l}>` with wraparound.
pub fn cycle_defect(fields: &FieldTuple, cycle: &IndexCycle) -> Result<f64> {
    let n = fields.order();
    if cycle.order() != n {
        return Err(Error::InvalidArgument(format!(
            "cycle of length {} for fields of order {n}",
            cycle.order()
        )));
    }
    let m = fields.domain().len();
    if cycle.indices().iter().any(|&i| i >= m) {
        return Err(Error::InvalidArgument("cycle index out of range".into()));
    }
    let dom = fields.domain();
    let mut sum = 0.0;
    for i in 0..n {
        let a = cycle.at(i);
        for l in 1..n {
            sum += pair_cost(fields.u(l - 1, a), dom.point(a), dom.point(cycle.at(i + l)));
        }
    }
    Ok(sum)
}

/// `sum_{i=1}^N <u(x_i), x_i - x_{i+step}>` with wraparound.
pub fn single_cycle_defect(field: &VectorField, cycle: &IndexCycle, step: usize) -> Result<f64> {
    let n = cycle.order();
    if step == 0 || step >= n.max(2) {
        return Err(Error::InvalidArgument(format!(
            "step {step} must lie in 1..={}",
            n.saturating_sub(1)
        )));
    }
    let dom = field.domain();
    if cycle.indices().iter().any(|&i| i >= dom.len()) {
        return Err(Error::InvalidArgument("cycle index out of range".into()));
    }
    let mut sum = 0.0;
    for i in 0..n {
        let a = cycle.at(i);
        sum += pair_cost(field.at(a), dom.point(a), dom.point(cycle.at(i + step)));
    }
    Ok(sum)
}

/// Lexicographically first tuple attaining the minimum of `defect`.
fn min_over_tuples(space: TupleSpace, defect: impl Fn(&[usize]) -> f64 + Sync) -> (f64, usize) {
    let n = space.order();
    (0..space.len())
        .into_par_iter()
        .map_init(
            || vec![0usize; n],
            |t, idx| {
                space.decode_into(idx, t);
                (defect(t), idx)
            },
        )
        .reduce(
            || (f64::INFINITY, usize::MAX),
            |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        )
}

fn witness_from_min(
    space: TupleSpace,
    best: (f64, usize),
    tolerance: f64,
    kind: WitnessKind,
) -> Result<Verdict> {
    if best.0 >= -tolerance {
        return Ok(Verdict::Pass);
    }
    let cycle = IndexCycle::new(space.decode(best.1), space.m())?;
    Ok(Verdict::Witness(CycleWitness {
        cycle,
        defect: best.0,
        kind,
    }))
}

/// Joint N-monotonicity over every index N-tuple (repetitions allowed).
pub fn check_joint(fields: &FieldTuple, tolerance: f64) -> Result<Verdict> {
    let n = fields.order();
    let m = fields.domain().len();
    let space = TupleSpace::new(m, n)?;
    let tables: Vec<Vec<f64>> = (0..n - 1).map(|l| cost_table(&fields.component(l))).collect();
    let best = min_over_tuples(space, |t| {
        let mut sum = 0.0;
        for i in 0..n {
            let a = t[i];
            for l in 1..n {
                sum += tables[l - 1][a * m + t[(i + l) % n]];
            }
        }
        sum
    });
    witness_from_min(space, best, tolerance, WitnessKind::Joint)
}

/// (N, step)-monotonicity by enumeration.
pub fn check_step(field: &VectorField, order: usize, step: usize, tolerance: f64) -> Result<Verdict> {
    if order < 2 || step == 0 || step >= order {
        return Err(Error::InvalidArgument(format!(
            "step {step} must lie in 1..={} for order {order}",
            order.saturating_sub(1)
        )));
    }
    let m = field.domain().len();
    let space = TupleSpace::new(m, order)?;
    let table = cost_table(field);
    let best = min_over_tuples(space, |t| {
        let mut sum = 0.0;
        for i in 0..order {
            sum += table[t[i] * m + t[(i + step) % order]];
        }
        sum
    });
    let kind = if step == 1 {
        WitnessKind::Single
    } else {
        WitnessKind::Step(step)
    };
    witness_from_min(space, best, tolerance, kind)
}

/// N-cyclic monotonicity of a single field.
pub fn check_single(
    field: &VectorField,
    order: usize,
    tolerance: f64,
    method: SearchMethod,
) -> Result<Verdict> {
    if order < 2 {
        return Err(Error::InvalidArgument("order must be at least 2".into()));
    }
    match method {
        SearchMethod::Enumerate => check_step(field, order, 1, tolerance),
        SearchMethod::NegativeCycle => {
            let table = cost_table(field);
            let m = field.domain().len();
            match min_closed_walk(&table, m, order) {
                Some(walk) => {
                    let mut indices = walk.nodes;
                    let start = indices[0];
                    indices.resize(order, start);
                    witness_from_cycle(field, indices, order, tolerance, WitnessKind::Single)
                }
                None => Ok(Verdict::Pass),
            }
        }
    }
}

/// N-cyclic monotonicity for every N at once: no closed walk of the cost graph
/// `c(i -> j) = <u(x_i), x_i - x_j>` of length at most `m` has cost below `-tolerance`.
pub fn check_all_orders(field: &VectorField, tolerance: f64) -> Result<Verdict> {
    let m = field.domain().len();
    if m < 2 {
        return Ok(Verdict::Pass);
    }
    let table = cost_table(field);
    match min_closed_walk(&table, m, m) {
        Some(walk) => {
            let len = walk.nodes.len();
            witness_from_cycle(field, walk.nodes, len, tolerance, WitnessKind::Single)
        }
        None => Ok(Verdict::Pass),
    }
}

fn witness_from_cycle(
    field: &VectorField,
    indices: Vec<usize>,
    order: usize,
    tolerance: f64,
    kind: WitnessKind,
) -> Result<Verdict> {
    debug_assert_eq!(indices.len(), order);
    let cycle = IndexCycle::new(indices, field.domain().len())?;
    let defect = single_cycle_defect(field, &cycle, 1)?;
    if defect < -tolerance {
        Ok(Verdict::Witness(CycleWitness {
            cycle,
            defect,
            kind,
        }))
    } else {
        Ok(Verdict::Pass)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ClosedWalk {
    pub cost: f64,
    /// `nodes[0]` is the start; the walk returns to it after the last node.
    pub nodes: Vec<usize>,
}

/// Cheapest closed walk of length `2..=max_len` in the complete digraph with
/// edge costs `table[i * m + j]`, or `None` if none is negative.
///
/// Ties go to the smallest start, then the shortest length.
pub(crate) fn min_closed_walk(table: &[f64], m: usize, max_len: usize) -> Option<ClosedWalk> {
    let mut best: Option<(f64, usize, usize)> = None;
    for s in 0..m {
        let (dist, _) = walk_tables(table, m, s, max_len);
        for (k, row) in dist.iter().enumerate().skip(2) {
            let c = row[s];
            if c < 0.0 && best.is_none_or(|(b, _, _)| c < b) {
                best = Some((c, s, k));
            }
        }
    }
    let (cost, s, k) = best?;
    let (_, pred) = walk_tables(table, m, s, k);
    let mut nodes = vec![s; k];
    let mut v = s;
    for step in (1..=k).rev() {
        let u = pred[step][v];
        nodes[step - 1] = u;
        v = u;
    }
    debug_assert_eq!(nodes[0], s);
    Some(ClosedWalk { cost, nodes })
}

/// `dist[k][v]`: cheapest walk of exactly `k` edges from `s` to `v`.
fn walk_tables(table: &[f64], m: usize, s: usize, max_len: usize) -> (Vec<Vec<f64>>, Vec<Vec<usize>>) {
    let mut dist = vec![vec![f64::INFINITY; m]; max_len + 1];
    let mut pred = vec![vec![usize::MAX; m]; max_len + 1];
    dist[0][s] = 0.0;
    for k in 1..=max_len {
        let (done, rest) = dist.split_at_mut(k);
        let prev = &done[k - 1];
        let cur = &mut rest[0];
        for u in 0..m {
            let du = prev[u];
            if du == f64::INFINITY {
                continue;
            }
            let row = &table[u * m..(u + 1) * m];
            for v in 0..m {
                let c = du + row[v];
                if c < cur[v] {
                    cur[v] = c;
                    pred[k][v] = u;
                }
            }
        }
    }
    (dist, pred)
}
