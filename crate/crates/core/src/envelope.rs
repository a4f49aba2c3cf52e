//! Lower convex envelopes of sampled functions, and partial convexification of
//! grid Hamiltonians with respect to the first variable or the last `N-1`.
//!
//! Envelopes only combine grid points: the value at `q` is the smallest
//! `sum_k lambda_k f(x_k)` over convex weights with `sum_k lambda_k x_k = q`,
//! obtained from one small linear program per query.

use rayon::prelude::*;

use crate::domain::DiscreteDomain;
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpStatus};
use crate::tensor::GridHamiltonian;

/// Which block of variables is convexified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    First,
    /// The last `N-1` variables, jointly, as a point of `R^{(N-1)d}`.
    Tail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Convexify,
    /// `-conv(-H)`
    Concavify,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeResult {
    pub value: f64,
    /// One barycentric weight per sample.
    pub coefficients: Vec<f64>,
    /// Samples with positive weight.
    pub support: Vec<usize>,
}

/// Lower convex envelope of `(samples[k], values[k])` at `query`.
pub fn lower_convex_envelope(
    samples: &[Vec<f64>],
    values: &[f64],
    query: &[f64],
) -> Result<EnvelopeResult> {
    if samples.len() != values.len() || samples.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "{} samples with {} values",
            samples.len(),
            values.len()
        )));
    }
    let dim = query.len();
    if samples.iter().any(|s| s.len() != dim) {
        return Err(Error::InvalidArgument("sample and query dimensions differ".into()));
    }
    envelope_lp(samples.len(), dim, |k, c| samples[k][c], values, query)
}

fn envelope_lp(
    n: usize,
    dim: usize,
    coord: impl Fn(usize, usize) -> f64,
    values: &[f64],
    query: &[f64],
) -> Result<EnvelopeResult> {
    let mut lp = LinearProgram::new(values.to_vec()).with_equality(vec![1.0; n], 1.0);
    for c in 0..dim {
        lp.add_equality((0..n).map(|k| coord(k, c)).collect(), query[c]);
    }
    let sol = lp.solve()?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(Error::OutsideHull),
        LpStatus::Unbounded => {
            return Err(Error::Internal("envelope program reported unbounded".into()))
        }
    }
    let mut lambda = sol.x;
    let total: f64 = lambda.iter().sum();
    for v in &mut lambda {
        *v /= total;
    }
    let value = lambda.iter().zip(values).map(|(l, f)| l * f).sum();
    let support = (0..n).filter(|&k| lambda[k] > 0.0).collect();
    Ok(EnvelopeResult {
        value,
        coefficients: lambda,
        support,
    })
}

/// Partial convexification (or concavification) of `h` on the grid of `domain`.
pub fn convexify_block(
    h: &GridHamiltonian,
    domain: &DiscreteDomain,
    block: Block,
    sign: Sign,
) -> Result<GridHamiltonian> {
    let space = *h.space();
    let m = domain.len();
    if space.m() != m {
        return Err(Error::InvalidArgument(format!(
            "tensor over {} points, domain has {m}",
            space.m()
        )));
    }
    let s = match sign {
        Sign::Convexify => 1.0,
        Sign::Concavify => -1.0,
    };
    let d = domain.dimension();
    let order = space.order();
    let tail_len = space.tail_len();
    let vals = h.values();
    let out: Result<Vec<f64>> = match block {
        Block::First => (0..space.len())
            .into_par_iter()
            .map(|idx| {
                let (q, tail) = space.split_first(idx);
                let column: Vec<f64> = (0..m).map(|k| s * vals[space.join_first(k, tail)]).collect();
                let env = envelope_lp(m, d, |k, c| domain.point(k)[c], &column, domain.point(q))?;
                Ok(s * env.value)
            })
            .collect(),
        Block::Tail => {
            if order < 2 {
                return Err(Error::InvalidArgument("tail block needs order >= 2".into()));
            }
            // tail k as a point of R^{(N-1)d}: coordinate c = point(digit c / d)[c % d]
            let tail_space = crate::domain::TupleSpace::new(m, order - 1)?;
            let tails: Vec<Vec<usize>> = (0..tail_len).map(|k| tail_space.decode(k)).collect();
            let dim = (order - 1) * d;
            (0..space.len())
                .into_par_iter()
                .map(|idx| {
                    let (first, q) = space.split_first(idx);
                    let row: Vec<f64> = vals[first * tail_len..(first + 1) * tail_len]
                        .iter()
                        .map(|v| s * v)
                        .collect();
                    let query: Vec<f64> = (0..dim).map(|c| domain.point(tails[q][c / d])[c % d]).collect();
                    let env = envelope_lp(
                        tail_len,
                        dim,
                        |k, c| domain.point(tails[k][c / d])[c % d],
                        &row,
                        &query,
                    )?;
                    Ok(s * env.value)
                })
                .collect()
        }
    };
    let mut result = GridHamiltonian::from_space(space, out?)?;
    match (block, sign) {
        (Block::First, Sign::Concavify) => result.flags_mut().concave_first = true,
        (Block::Tail, Sign::Convexify) => result.flags_mut().convex_tail = true,
        _ => {}
    }
    Ok(result)
}
