//! Finite weighted point clouds, sampled vector fields, index tuples and the
//! cyclic shift acting on them.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable overriding the dense tensor size cap.
pub const TENSOR_CAP_ENV: &str = "NCYCLIC_TENSOR_CAP";

/// Default cap on dense `m^N` tensors and on cycle enumerations.
pub const DEFAULT_TENSOR_CAP: u128 = 10_000_000;

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Active tensor size cap, read once from [`TENSOR_CAP_ENV`].
pub fn tensor_cap() -> u128 {
    static CAP: OnceLock<u128> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(TENSOR_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u128>().ok())
            .filter(|&v| v > 0)
            .unwrap_or(DEFAULT_TENSOR_CAP)
    })
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// A finite point cloud in `R^d` carrying a probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDomain {
    dimension: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl DiscreteDomain {
    /// Builds a domain; `weights = None` means uniform `1/m`.
    pub fn new(points: Vec<Vec<f64>>, weights: Option<Vec<f64>>) -> Result<Self> {
        let m = points.len();
        if m == 0 {
            return Err(Error::InvalidDomain("at least one point is required".into()));
        }
        let dimension = points[0].len();
        if dimension == 0 {
            return Err(Error::InvalidDomain("dimension must be at least 1".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dimension {
                return Err(Error::InvalidDomain(format!(
                    "point {i} has {} coordinates, expected {dimension}",
                    p.len()
                )));
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidDomain(format!("point {i} is not finite")));
            }
        }
        for i in 0..m {
            for j in 0..i {
                if points[i] == points[j] {
                    return Err(Error::InvalidDomain(format!(
                        "points {j} and {i} coincide"
                    )));
                }
            }
        }
        let weights = match weights {
            None => vec![1.0 / m as f64; m],
            Some(w) => {
                if w.len() != m {
                    return Err(Error::InvalidDomain(format!(
                        "{} weights for {m} points",
                        w.len()
                    )));
                }
                if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
                    return Err(Error::InvalidDomain(
                        "weights must be finite and nonnegative".into(),
                    ));
                }
                let total: f64 = w.iter().sum();
                if (total - 1.0).abs() > WEIGHT_SUM_TOL {
                    return Err(Error::InvalidDomain(format!(
                        "weights sum to {total}, expected 1"
                    )));
                }
                w
            }
        };
        Ok(Self {
            dimension,
            points,
            weights,
        })
    }

    pub fn uniform(points: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(points, None)
    }

    /// Points on the real line.
    pub fn line(xs: &[f64]) -> Result<Self> {
        Self::uniform(xs.iter().map(|&x| vec![x]).collect())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Number of points `m`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// True when every weight equals `1/m` exactly up to rounding.
    pub fn is_uniform(&self) -> bool {
        let w = 1.0 / self.len() as f64;
        self.weights.iter().all(|x| (x - w).abs() <= 1e-15)
    }

    /// Grid spacing when the domain is a regular 1-d grid (in any order).
    pub fn regular_spacing(&self) -> Option<f64> {
        if self.dimension != 1 || self.len() < 3 {
            return None;
        }
        let mut xs: Vec<f64> = self.points.iter().map(|p| p[0]).collect();
        xs.sort_by(f64::total_cmp);
        let h = xs[1] - xs[0];
        let regular = xs
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1.0));
        regular.then_some(h)
    }
}

/// One vector field sampled on a domain: `values[i] = u(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    domain: DiscreteDomain,
    values: Vec<f64>,
}

impl VectorField {
    pub fn new(domain: DiscreteDomain, values: Vec<Vec<f64>>) -> Result<Self> {
        let d = domain.dimension();
        if values.len() != domain.len() {
            return Err(Error::InvalidFields(format!(
                "{} samples for {} points",
                values.len(),
                domain.len()
            )));
        }
        let mut flat = Vec::with_capacity(domain.len() * d);
        for (i, v) in values.iter().enumerate() {
            if v.len() != d || v.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidFields(format!(
                    "sample {i} must be {d} finite reals"
                )));
            }
            flat.extend_from_slice(v);
        }
        Ok(Self {
            domain,
            values: flat,
        })
    }

    /// Samples `f` at every point of the domain.
    pub fn from_fn(domain: DiscreteDomain, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        let values = domain.points().iter().map(|p| f(p)).collect();
        Self::new(domain, values)
    }

    pub fn zero(domain: DiscreteDomain) -> Self {
        let values = vec![0.0; domain.len() * domain.dimension()];
        Self { domain, values }
    }

    pub fn domain(&self) -> &DiscreteDomain {
        &self.domain
    }

    pub fn at(&self, i: usize) -> &[f64] {
        let d = self.domain.dimension();
        &self.values[i * d..(i + 1) * d]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.domain.len()).map(|i| self.at(i).to_vec()).collect()
    }
}

/// The `(N-1)` fields `u_1, ..., u_{N-1}` sampled on a shared domain.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTuple {
    domain: DiscreteDomain,
    order: usize,
    /// Flat `(N-1) x m x d`, row-major.
    values: Vec<f64>,
}

impl FieldTuple {
    /// `fields[l][i] = u_{l+1}(x_i)`; the order is `fields.len() + 1`.
    pub fn new(domain: DiscreteDomain, fields: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::InvalidFields(
                "at least one field is required (order N >= 2)".into(),
            ));
        }
        let order = fields.len() + 1;
        let mut values = Vec::with_capacity(fields.len() * domain.len() * domain.dimension());
        for (l, field) in fields.into_iter().enumerate() {
            let f = VectorField::new(domain.clone(), field)
                .map_err(|e| Error::InvalidFields(format!("field {}: {e}", l + 1)))?;
            values.extend_from_slice(&f.values);
        }
        Ok(Self {
            domain,
            order,
            values,
        })
    }

    /// Stacks already-sampled fields.
    pub fn from_fields(fields: &[VectorField]) -> Result<Self> {
        let first = fields
            .first()
            .ok_or_else(|| Error::InvalidFields("no fields given".into()))?;
        if fields.iter().any(|f| f.domain != first.domain) {
            return Err(Error::InvalidFields("fields live on different domains".into()));
        }
        Ok(Self {
            domain: first.domain.clone(),
            order: fields.len() + 1,
            values: fields.iter().flat_map(|f| f.values.iter().copied()).collect(),
        })
    }

    /// The tuple `(u, 0, ..., 0)` of order `order`.
    pub fn padded(u: &VectorField, order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidArgument("order must be at least 2".into()));
        }
        let mut fields = vec![u.clone()];
        fields.extend((2..order).map(|_| VectorField::zero(u.domain.clone())));
        Self::from_fields(&fields)
    }

    /// The tuple `(u, u, ..., u)` of order `order`.
    pub fn repeated(u: &VectorField, order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidArgument("order must be at least 2".into()));
        }
        Self::from_fields(&vec![u.clone(); order - 1])
    }

    pub fn zero(domain: DiscreteDomain, order: usize) -> Result<Self> {
        Self::padded(&VectorField::zero(domain), order)
    }

    pub fn domain(&self) -> &DiscreteDomain {
        &self.domain
    }

    /// The order `N`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// `u_{l+1}(x_i)` for `l` in `0..N-1`.
    pub fn u(&self, l: usize, i: usize) -> &[f64] {
        let d = self.domain.dimension();
        let m = self.domain.len();
        let start = (l * m + i) * d;
        &self.values[start..start + d]
    }

    /// A copy of `u_{l+1}`.
    pub fn component(&self, l: usize) -> VectorField {
        let d = self.domain.dimension();
        let m = self.domain.len();
        VectorField {
            domain: self.domain.clone(),
            values: self.values[l * m * d..(l + 1) * m * d].to_vec(),
        }
    }

    /// `fields[l][i]` nested representation.
    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.order - 1)
            .map(|l| self.component(l).to_rows())
            .collect()
    }
}

/// A cycle `x_{t_1}, ..., x_{t_N}` with `t_{N+i} = t_i`; repetitions allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexCycle {
    indices: Vec<usize>,
}

impl IndexCycle {
    pub fn new(indices: Vec<usize>, m: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidArgument("empty cycle".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= m) {
            return Err(Error::InvalidArgument(format!(
                "index {bad} out of range for {m} points"
            )));
        }
        Ok(Self { indices })
    }

    pub fn order(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Index at position `k`, wrapping around.
    pub fn at(&self, k: usize) -> usize {
        self.indices[k % self.indices.len()]
    }
}

/// The cyclic shift `(t_1, ..., t_N) -> (t_2, ..., t_N, t_1)`.
pub fn apply_sigma<T: Clone>(t: &[T]) -> Vec<T> {
    let mut out = t.to_vec();
    if !out.is_empty() {
        out.rotate_left(1);
    }
    out
}

/// Row-major indexing of `m^N` index tuples; `t_1` is the most significant digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TupleSpace {
    m: usize,
    order: usize,
    len: usize,
    /// `m^(N-1)`
    tail_len: usize,
}

impl TupleSpace {
    /// Fails with [`Error::SizeCap`] when `m^N` exceeds [`tensor_cap`].
    pub fn new(m: usize, order: usize) -> Result<Self> {
        Self::with_cap(m, order, tensor_cap())
    }

    pub fn with_cap(m: usize, order: usize, cap: u128) -> Result<Self> {
        if m == 0 || order == 0 {
            return Err(Error::InvalidArgument("empty tuple space".into()));
        }
        let requested = (m as u128).checked_pow(order as u32).unwrap_or(u128::MAX);
        if requested > cap {
            return Err(Error::SizeCap { requested, cap });
        }
        let len = requested as usize;
        Ok(Self {
            m,
            order,
            len,
            tail_len: len / m,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `m^N`
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `m^(N-1)`, the number of tails.
    pub fn tail_len(&self) -> usize {
        self.tail_len
    }

    pub fn encode(&self, t: &[usize]) -> usize {
        debug_assert_eq!(t.len(), self.order);
        t.iter().fold(0, |acc, &i| acc * self.m + i)
    }

    pub fn decode(&self, mut idx: usize) -> Vec<usize> {
        let mut t = vec![0; self.order];
        for slot in t.iter_mut().rev() {
            *slot = idx % self.m;
            idx /= self.m;
        }
        t
    }

    /// Writes the digits of `idx` into `out` (length `N`).
    pub fn decode_into(&self, mut idx: usize, out: &mut [usize]) {
        for slot in out.iter_mut().rev() {
            *slot = idx % self.m;
            idx /= self.m;
        }
    }

    /// Flat index of `sigma(t)` given the flat index of `t`.
    pub fn sigma(&self, idx: usize) -> usize {
        let first = idx / self.tail_len;
        (idx % self.tail_len) * self.m + first
    }

    /// Flat index of `sigma^k(t)`.
    pub fn sigma_pow(&self, idx: usize, k: usize) -> usize {
        (0..k % self.order).fold(idx, |acc, _| self.sigma(acc))
    }

    /// Index of the diagonal tuple `(i, ..., i)`.
    pub fn diagonal(&self, i: usize) -> usize {
        (0..self.order).fold(0, |acc, _| acc * self.m + i)
    }

    /// Splits a flat index into `(first index, tail index)`.
    pub fn split_first(&self, idx: usize) -> (usize, usize) {
        (idx / self.tail_len, idx % self.tail_len)
    }

    pub fn join_first(&self, first: usize, tail: usize) -> usize {
        first * self.tail_len + tail
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_examples() {
        assert_eq!(apply_sigma(&[1, 2, 3]), vec![2, 3, 1]);
        assert_eq!(apply_sigma(&[5, 5, 5]), vec![5, 5, 5]);
        let t = vec![1, 2, 3];
        let back = (0..3).fold(t.clone(), |acc, _| apply_sigma(&acc));
        assert_eq!(back, t);
    }

    #[test]
    fn flat_sigma_matches_tuple_sigma_exhaustively() {
        for (m, n) in [(1, 3), (3, 2), (4, 3), (3, 5), (6, 4)] {
            let space = TupleSpace::new(m, n).unwrap();
            for idx in 0..space.len() {
                let t = space.decode(idx);
                assert_eq!(space.encode(&t), idx);
                assert_eq!(space.decode(space.sigma(idx)), apply_sigma(&t));
                assert_eq!(space.sigma_pow(idx, n), idx);
            }
        }
    }

    #[test]
    fn size_cap_is_enforced() {
        let err = TupleSpace::with_cap(10, 8, 10_000_000).unwrap_err();
        assert!(matches!(err, Error::SizeCap { .. }));
        assert!(TupleSpace::with_cap(10, 7, 10_000_000).is_ok());
    }

    #[test]
    fn domain_validation() {
        assert!(DiscreteDomain::uniform(vec![]).is_err());
        assert!(DiscreteDomain::uniform(vec![vec![0.0], vec![0.0]]).is_err());
        assert!(DiscreteDomain::uniform(vec![vec![0.0], vec![f64::NAN]]).is_err());
        assert!(DiscreteDomain::uniform(vec![vec![0.0], vec![1.0, 2.0]]).is_err());
        assert!(DiscreteDomain::new(vec![vec![0.0], vec![1.0]], Some(vec![0.5, 0.6])).is_err());
        assert!(DiscreteDomain::new(vec![vec![0.0], vec![1.0]], Some(vec![1.5, -0.5])).is_err());
        let d = DiscreteDomain::new(vec![vec![0.0], vec![1.0]], Some(vec![0.25, 0.75])).unwrap();
        assert!(!d.is_uniform());
        assert!(DiscreteDomain::line(&[0.0, 1.0, 2.0]).unwrap().is_uniform());
    }

    #[test]
    fn regular_spacing_detection() {
        let d = DiscreteDomain::line(&[1.0, -1.0, 0.0, 0.5, -0.5]).unwrap();
        assert_eq!(d.regular_spacing(), Some(0.5));
        let d = DiscreteDomain::line(&[0.0, 1.0, 3.0]).unwrap();
        assert_eq!(d.regular_spacing(), None);
    }

    #[test]
    fn field_tuple_layout() {
        let dom = DiscreteDomain::line(&[0.0, 1.0]).unwrap();
        let ft = FieldTuple::new(dom, vec![vec![vec![1.0], vec![2.0]], vec![vec![3.0], vec![4.0]]])
            .unwrap();
        assert_eq!(ft.order(), 3);
        assert_eq!(ft.u(0, 1), &[2.0]);
        assert_eq!(ft.u(1, 0), &[3.0]);
        assert_eq!(ft.to_nested()[1][1], vec![4.0]);
    }
}
