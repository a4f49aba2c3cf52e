//! Dense real functions on index N-tuples.

use serde::{Deserialize, Serialize};

use crate::domain::TupleSpace;
use crate::error::{Error, Result};

/// Tolerance used when a sub-antisymmetry or antisymmetry claim is checked.
pub const CLAIM_TOL: f64 = 1e-9;

/// Properties a [`GridHamiltonian`] has been verified to satisfy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HamiltonianFlags {
    /// `H(i, ..., i) = 0` exactly.
    pub diagonal_zero: bool,
    /// Rotation sums are `<= CLAIM_TOL` everywhere.
    pub sub_antisymmetric: bool,
    /// Rotation sums are within `CLAIM_TOL` of zero everywhere.
    pub antisymmetric: bool,
    /// Concave in the first index on the grid (its first-block concavification is itself).
    pub concave_first: bool,
    /// Convex in the last `N-1` indices on the grid.
    pub convex_tail: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridHamiltonian {
    space: TupleSpace,
    values: Vec<f64>,
    flags: HamiltonianFlags,
}

impl GridHamiltonian {
    pub fn new(m: usize, order: usize, values: Vec<f64>) -> Result<Self> {
        let space = TupleSpace::new(m, order)?;
        Self::from_space(space, values)
    }

    pub(crate) fn from_space(space: TupleSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for a tensor of {} entries",
                values.len(),
                space.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "entry {:?} is not finite",
                space.decode(i)
            )));
        }
        Ok(Self {
            space,
            values,
            flags: HamiltonianFlags::default(),
        })
    }

    pub fn zeros(m: usize, order: usize) -> Result<Self> {
        let space = TupleSpace::new(m, order)?;
        Self::from_space(space, vec![0.0; space.len()])
    }

    /// Tabulates `f` over every index tuple.
    pub fn from_fn(m: usize, order: usize, f: impl Fn(&[usize]) -> f64) -> Result<Self> {
        let space = TupleSpace::new(m, order)?;
        let mut t = vec![0; order];
        let values = (0..space.len())
            .map(|idx| {
                space.decode_into(idx, &mut t);
                f(&t)
            })
            .collect();
        Self::from_space(space, values)
    }

    pub fn space(&self) -> &TupleSpace {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.space.order()
    }

    pub fn m(&self) -> usize {
        self.space.m()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, t: &[usize]) -> f64 {
        self.values[self.space.encode(t)]
    }

    pub fn at(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn flags(&self) -> HamiltonianFlags {
        self.flags
    }

    pub(crate) fn flags_mut(&mut self) -> &mut HamiltonianFlags {
        &mut self.flags
    }

    /// `sum_{k=0}^{N-1} H(sigma^k t)` at flat index `idx`.
    pub fn rotation_sum(&self, idx: usize) -> f64 {
        let mut j = idx;
        let mut sum = 0.0;
        for _ in 0..self.order() {
            sum += self.values[j];
            j = self.space.sigma(j);
        }
        sum
    }

    /// Largest rotation sum over all tuples.
    pub fn max_rotation_sum(&self) -> f64 {
        (0..self.values.len())
            .map(|i| self.rotation_sum(i))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest `|rotation sum|` over all tuples.
    pub fn max_abs_rotation_sum(&self) -> f64 {
        (0..self.values.len())
            .map(|i| self.rotation_sum(i).abs())
            .fold(0.0, f64::max)
    }

    pub fn diagonal(&self, i: usize) -> f64 {
        self.values[self.space.diagonal(i)]
    }

    pub fn max_abs_diagonal(&self) -> f64 {
        (0..self.m()).map(|i| self.diagonal(i).abs()).fold(0.0, f64::max)
    }

    /// `max |self - other|` over all entries.
    pub fn max_abs_diff(&self, other: &GridHamiltonian) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Entrywise map; flags are dropped.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<GridHamiltonian> {
        Self::from_space(self.space, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Sets diagonal entries with `|H(i,..,i)| <= tol` to exactly zero.
    pub fn snap_diagonal(&mut self, tol: f64) -> Result<()> {
        for i in 0..self.m() {
            let idx = self.space.diagonal(i);
            let v = self.values[idx];
            if v.abs() > tol {
                return Err(Error::Invariant(format!(
                    "diagonal entry {i} is {v:e}, not zero"
                )));
            }
            self.values[idx] = 0.0;
        }
        self.flags.diagonal_zero = true;
        Ok(())
    }

    /// Re-derives the diagonal and (sub-)antisymmetry flags by full scans.
    pub fn refresh_symmetry_flags(&mut self) {
        self.flags.diagonal_zero = (0..self.m()).all(|i| self.diagonal(i) == 0.0);
        self.flags.sub_antisymmetric = self.max_rotation_sum() <= CLAIM_TOL;
        self.flags.antisymmetric = self.max_abs_rotation_sum() <= CLAIM_TOL;
    }

    pub fn claim_diagonal_zero(mut self) -> Result<Self> {
        if let Some(i) = (0..self.m()).find(|&i| self.diagonal(i) != 0.0) {
            return Err(Error::Invariant(format!(
                "diagonal entry {i} is {:e}",
                self.diagonal(i)
            )));
        }
        self.flags.diagonal_zero = true;
        Ok(self)
    }

    pub fn claim_sub_antisymmetric(mut self) -> Result<Self> {
        let worst = self.max_rotation_sum();
        if worst > CLAIM_TOL {
            return Err(Error::Invariant(format!(
                "rotation sum reaches {worst:e} > {CLAIM_TOL:e}"
            )));
        }
        self.flags.sub_antisymmetric = true;
        Ok(self)
    }

    pub fn claim_antisymmetric(mut self) -> Result<Self> {
        let worst = self.max_abs_rotation_sum();
        if worst > CLAIM_TOL {
            return Err(Error::Invariant(format!(
                "|rotation sum| reaches {worst:e} > {CLAIM_TOL:e}"
            )));
        }
        self.flags.antisymmetric = true;
        self.flags.sub_antisymmetric = true;
        Ok(self)
    }
}
