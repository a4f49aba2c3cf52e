//! Permutations of domain indices whose N-th power is the identity.

use crate::error::{Error, Result};

/// True when `map` is a bijection of `0..map.len()`.
pub fn is_permutation(map: &[usize]) -> bool {
    let mut seen = vec![false; map.len()];
    for &j in map {
        if j >= map.len() || seen[j] {
            return false;
        }
        seen[j] = true;
    }
    true
}

/// `map^k(i)`.
pub fn iterate(map: &[usize], i: usize, k: usize) -> usize {
    (0..k).fold(i, |j, _| map[j])
}

/// Cycles of a permutation, each starting at its smallest element, ordered by that element.
pub fn cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            cycle.push(j);
            j = perm[j];
        }
        out.push(cycle);
    }
    out
}

/// A permutation `S` of `{0, ..., m-1}` with `S^N = I`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NInvolution {
    order: usize,
    perm: Vec<usize>,
}

impl NInvolution {
    pub fn new(perm: Vec<usize>, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("order must be positive".into()));
        }
        if !is_permutation(&perm) {
            return Err(Error::InvalidArgument("map is not a permutation".into()));
        }
        if let Some(c) = cycles(&perm).into_iter().find(|c| order % c.len() != 0) {
            return Err(Error::InvalidArgument(format!(
                "cycle of length {} does not divide {order}",
                c.len()
            )));
        }
        Ok(Self { order, perm })
    }

    pub fn identity(m: usize, order: usize) -> Self {
        Self {
            order,
            perm: (0..m).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.perm[i]
    }

    /// `S^k(i)`.
    pub fn pow(&self, i: usize, k: usize) -> usize {
        iterate(&self.perm, i, k % self.order)
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        cycles(&self.perm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_order() {
        assert!(NInvolution::new(vec![1, 0, 2], 2).is_ok());
        assert!(NInvolution::new(vec![1, 2, 0], 2).is_err());
        assert!(NInvolution::new(vec![1, 2, 0], 3).is_ok());
        assert!(NInvolution::new(vec![1, 2, 0], 6).is_ok());
        assert!(NInvolution::new(vec![0, 0], 2).is_err());
    }

    #[test]
    fn powers_wrap() {
        let s = NInvolution::new(vec![1, 2, 0, 3], 3).unwrap();
        for i in 0..4 {
            assert_eq!(s.pow(i, 3), i);
        }
        assert_eq!(s.pow(0, 2), 2);
        assert_eq!(s.cycles(), vec![vec![0, 1, 2], vec![3]]);
    }
}
