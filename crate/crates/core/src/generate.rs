//! Seeded example generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{dot, DiscreteDomain, FieldTuple, VectorField};
use crate::error::{Error, Result};
use crate::monotonicity;

/// Stream numbers for [`child_seed`].
pub const STREAM_POINTS: u64 = 0;
pub const STREAM_FIELDS: u64 = 1;
pub const STREAM_SEARCH: u64 = 2;

/// `splitmix64(seed + (stream + 1) * 0x9E3779B97F4A7C15)`.
pub fn child_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add((stream + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleKind {
    /// Subgradient selection of a random convex piecewise-linear function.
    Gradient,
    /// `u(x) = (-x_2, x_1)` on lattice points of the plane.
    Rotation,
    /// `(u_1, u_2, u_1)` with `u_1` a shifted gradient and `u_2` a monotone affine map.
    Triplet4,
    /// Independent gradient fields, one per slot.
    RandomMonotone,
    /// Independent uniform entries.
    Random,
}

impl std::str::FromStr for ExampleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "gradient" => Self::Gradient,
            "rotation" => Self::Rotation,
            "triplet4" => Self::Triplet4,
            "random_monotone" | "random-monotone" => Self::RandomMonotone,
            "random" => Self::Random,
            other => return Err(Error::InvalidArgument(format!("unknown example kind {other}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExampleParams {
    pub kind: ExampleKind,
    pub m: usize,
    pub dimension: usize,
    pub order: usize,
    /// Regular grid on `[0, 1]` instead of random points (dimension 1 only).
    pub regular: bool,
    pub seed: u64,
}

impl ExampleParams {
    pub fn new(kind: ExampleKind, m: usize, dimension: usize, order: usize, seed: u64) -> Self {
        Self {
            kind,
            m,
            dimension,
            order,
            regular: false,
            seed,
        }
    }
}

fn random_points(m: usize, d: usize, rng: &mut ChaCha8Rng) -> Result<DiscreteDomain> {
    let points = (0..m)
        .map(|_| (0..d).map(|_| rng.random_range(0.0..1.0)).collect())
        .collect();
    DiscreteDomain::uniform(points)
}

fn layout(p: &ExampleParams, rng: &mut ChaCha8Rng) -> Result<DiscreteDomain> {
    if p.regular {
        if p.dimension != 1 || p.m < 2 {
            return Err(Error::InvalidArgument("regular layout needs dimension 1 and m >= 2".into()));
        }
        let xs: Vec<f64> = (0..p.m).map(|i| i as f64 / (p.m - 1) as f64).collect();
        return DiscreteDomain::line(&xs);
    }
    random_points(p.m, p.dimension, rng)
}

/// Lattice points `(i, j)` ordered by `i + j`, then by `j`: `(0,0), (1,0), (0,1), (2,0), ..`.
pub fn planar_lattice(m: usize) -> Result<DiscreteDomain> {
    let mut pts = Vec::with_capacity(m);
    let mut s = 0;
    while pts.len() < m {
        for j in 0..=s {
            if pts.len() < m {
                pts.push(vec![(s - j) as f64, j as f64]);
            }
        }
        s += 1;
    }
    DiscreteDomain::uniform(pts)
}

/// `u(x) = a_k` with `k` the first maximizer of `<a_k, x> + b_k`.
fn gradient_field(domain: &DiscreteDomain, pieces: usize, rng: &mut ChaCha8Rng) -> Result<VectorField> {
    let d = domain.dimension();
    let slopes: Vec<Vec<f64>> = (0..pieces)
        .map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect())
        .collect();
    let offsets: Vec<f64> = (0..pieces).map(|_| rng.random_range(-1.0..1.0)).collect();
    VectorField::from_fn(domain.clone(), |x| {
        let mut best = 0;
        let mut val = f64::NEG_INFINITY;
        for k in 0..pieces {
            let v = dot(&slopes[k], x) + offsets[k];
            if v > val {
                val = v;
                best = k;
            }
        }
        slopes[best].clone()
    })
}

/// `x -> (P + K) x + c` with `P` positive semidefinite and `K` skew.
fn monotone_affine(domain: &DiscreteDomain, rng: &mut ChaCha8Rng) -> Result<VectorField> {
    let d = domain.dimension();
    let b: Vec<Vec<f64>> = (0..d).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    // B^T B plus a skew part
    let mut a = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            a[i][j] = (0..d).map(|k| b[k][i] * b[k][j]).sum::<f64>();
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            let s = rng.random_range(-1.0..1.0);
            a[i][j] += s;
            a[j][i] -= s;
        }
    }
    let c: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
    VectorField::from_fn(domain.clone(), |x| (0..d).map(|i| dot(&a[i], x) + c[i]).collect())
}

/// Builds the example named by `params.kind`; deterministic in `params`.
pub fn generate_example(params: &ExampleParams) -> Result<FieldTuple> {
    let p = *params;
    if p.m == 0 || p.dimension == 0 || p.order < 2 {
        return Err(Error::InvalidArgument("need m >= 1, dimension >= 1, order >= 2".into()));
    }
    let mut point_rng = ChaCha8Rng::seed_from_u64(child_seed(p.seed, STREAM_POINTS));
    let mut rng = ChaCha8Rng::seed_from_u64(child_seed(p.seed, STREAM_FIELDS));
    let pieces = p.m + 2;
    match p.kind {
        ExampleKind::Gradient => {
            let dom = layout(&p, &mut point_rng)?;
            FieldTuple::padded(&gradient_field(&dom, pieces, &mut rng)?, p.order)
        }
        ExampleKind::Rotation => {
            if p.dimension != 2 {
                return Err(Error::InvalidArgument("rotation examples live in the plane".into()));
            }
            let dom = planar_lattice(p.m)?;
            let u = VectorField::from_fn(dom, |x| vec![-x[1], x[0]])?;
            FieldTuple::padded(&u, p.order)
        }
        ExampleKind::Triplet4 => {
            if p.order != 4 {
                return Err(Error::InvalidArgument("triplet4 examples have order 4".into()));
            }
            let dom = layout(&p, &mut point_rng)?;
            let g = gradient_field(&dom, pieces, &mut rng)?;
            let shift: Vec<f64> = (0..p.dimension).map(|_| rng.random_range(-1.0..1.0)).collect();
            let u1 = VectorField::new(
                dom.clone(),
                (0..dom.len())
                    .map(|i| g.at(i).iter().zip(&shift).map(|(a, b)| a + b).collect())
                    .collect(),
            )?;
            let u2 = monotone_affine(&dom, &mut rng)?;
            let ft = FieldTuple::from_fields(&[u1.clone(), u2, u1])?;
            if let Some(w) = monotonicity::check_joint(&ft, monotonicity::DEFAULT_TOL)?.witness() {
                return Err(Error::Internal(format!(
                    "generated triplet is not jointly 4-monotone (defect {:e})",
                    w.defect
                )));
            }
            Ok(ft)
        }
        ExampleKind::RandomMonotone => {
            let dom = layout(&p, &mut point_rng)?;
            let fs = (0..p.order - 1)
                .map(|_| gradient_field(&dom, pieces, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            FieldTuple::from_fields(&fs)
        }
        ExampleKind::Random => {
            let dom = layout(&p, &mut point_rng)?;
            let values = (0..p.order - 1)
                .map(|_| {
                    (0..p.m)
                        .map(|_| (0..p.dimension).map(|_| rng.random_range(-1.0..1.0)).collect())
                        .collect()
                })
                .collect();
            FieldTuple::new(dom, values)
        }
    }
}
