//! Sigma-invariant probability tensors with a prescribed first marginal.

use crate::domain::{DiscreteDomain, TupleSpace};
use crate::error::{Error, Result};

const MASS_TOL: f64 = 1e-10;
const SIGMA_TOL: f64 = 1e-12;

/// `max |pi(t) - pi(sigma t)|` over all tuples.
pub fn sigma_defect(space: &TupleSpace, mass: &[f64]) -> f64 {
    (0..space.len())
        .map(|idx| (mass[idx] - mass[space.sigma(idx)]).abs())
        .fold(0.0, f64::max)
}

/// Mass of `{t : t_1 = i}` for every `i`.
pub fn first_marginal(space: &TupleSpace, mass: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; space.m()];
    for (idx, &p) in mass.iter().enumerate() {
        out[space.split_first(idx).0] += p;
    }
    out
}

/// A probability `pi` on index N-tuples invariant under the cyclic shift and
/// whose first marginal equals the domain weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaCoupling {
    space: TupleSpace,
    mass: Vec<f64>,
}

impl SigmaCoupling {
    pub fn new(domain: &DiscreteDomain, order: usize, mass: Vec<f64>) -> Result<Self> {
        let space = TupleSpace::new(domain.len(), order)?;
        if mass.len() != space.len() {
            return Err(Error::InvalidArgument(format!(
                "{} masses for {} tuples",
                mass.len(),
                space.len()
            )));
        }
        if mass.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::Invariant("coupling masses must be finite and nonnegative".into()));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Invariant(format!("total mass {total} is not 1")));
        }
        let defect = sigma_defect(&space, &mass);
        if defect > SIGMA_TOL {
            return Err(Error::Invariant(format!(
                "coupling is not sigma-invariant (defect {defect:e})"
            )));
        }
        let marginal = first_marginal(&space, &mass);
        if let Some(i) = (0..domain.len()).find(|&i| (marginal[i] - domain.weight(i)).abs() > MASS_TOL) {
            return Err(Error::Invariant(format!(
                "first marginal at point {i} is {} instead of {}",
                marginal[i],
                domain.weight(i)
            )));
        }
        Ok(Self { space, mass })
    }

    pub fn order(&self) -> usize {
        self.space.order()
    }

    pub fn space(&self) -> &TupleSpace {
        &self.space
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn get(&self, t: &[usize]) -> f64 {
        self.mass[self.space.encode(t)]
    }

    /// `sum_t c(t) pi(t)`.
    pub fn integrate(&self, cost: &[f64]) -> f64 {
        self.mass.iter().zip(cost).map(|(p, c)| p * c).sum()
    }

    /// Nonzero entries as `(tuple, mass)` in index order.
    pub fn support(&self) -> Vec<(Vec<usize>, f64)> {
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(idx, &p)| (self.space.decode(idx), p))
            .collect()
    }

    pub fn first_marginal(&self) -> Vec<f64> {
        first_marginal(&self.space, &self.mass)
    }
}
