//! Variational side: the sigma-invariant transport program, the N-involution
//! polar problem, the projection problem, graph couplings and duality gaps.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coupling::{first_marginal, sigma_defect, SigmaCoupling};
use crate::domain::{dist, dot, DiscreteDomain, FieldTuple, IndexCycle, TupleSpace};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_cost_f, legendre_transform};
use crate::involution::{cycles, is_permutation, iterate, NInvolution};
use crate::lp::{LinearProgram, LpStatus, DEFAULT_VAR_CAP};
use crate::monotonicity::{cycle_defect, pair_cost, CycleWitness, WitnessKind};
use crate::tensor::GridHamiltonian;

/// Largest point count the exact involution enumeration accepts.
pub const EXACT_MAX_POINTS: usize = 8;
/// Values within this distance of the optimum count as ties.
pub const TIE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransportDiagnostics {
    pub orbits: usize,
    pub pivots: usize,
    pub lp_residual: f64,
    /// `sum_t c(t) pi(t)` recomputed on the reconstructed tensor.
    pub recomputed_value: f64,
    pub sigma_defect: f64,
    pub marginal_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportResult {
    pub value: f64,
    pub coupling: SigmaCoupling,
    pub diagnostics: TransportDiagnostics,
}

/// Orbit representatives (smallest flat index of each sigma-orbit) with their sizes.
pub fn sigma_orbits(space: &TupleSpace) -> Vec<(usize, usize)> {
    let n = space.order();
    let mut out = Vec::new();
    for idx in 0..space.len() {
        let mut j = space.sigma(idx);
        let mut size = 1;
        let mut is_min = true;
        while j != idx {
            if j < idx {
                is_min = false;
                break;
            }
            j = space.sigma(j);
            size += 1;
        }
        if is_min {
            debug_assert!(n % size == 0);
            out.push((idx, size));
        }
    }
    out
}

/// Minimizes `sum_t c(t) pi(t)` over sigma-invariant probabilities with first
/// marginal `mu`, `c` the cost of [`build_cost_f`], one LP variable per orbit.
pub fn solve_sigma_kantorovich(fields: &FieldTuple) -> Result<TransportResult> {
    let dom = fields.domain();
    let m = dom.len();
    let cost = build_cost_f(fields)?;
    let space = *cost.space();
    let n = space.order();
    let orbits = sigma_orbits(&space);
    if orbits.len() > DEFAULT_VAR_CAP {
        return Err(Error::SizeCap {
            requested: orbits.len() as u128,
            cap: DEFAULT_VAR_CAP as u128,
        });
    }
    let mut t = vec![0; n];
    let mut avg_cost = Vec::with_capacity(orbits.len());
    let mut rows = vec![vec![0.0; orbits.len()]; m];
    for (k, &(rep, _)) in orbits.iter().enumerate() {
        // the orbit average of c is the cycle defect over N
        let mut s = 0.0;
        let mut j = rep;
        for _ in 0..n {
            s += cost.at(j);
            j = space.sigma(j);
        }
        avg_cost.push(s / n as f64);
        space.decode_into(rep, &mut t);
        for &i in &t {
            rows[i][k] += 1.0 / n as f64;
        }
    }
    let mut lp = LinearProgram::new(avg_cost);
    for (i, row) in rows.into_iter().enumerate() {
        lp.add_equality(row, dom.weight(i));
    }
    let sol = lp.solve()?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(Error::Lp("transport program infeasible".into())),
        LpStatus::Unbounded => return Err(Error::Lp("transport program unbounded".into())),
    }
    let mut mass = vec![0.0; space.len()];
    for (k, &(rep, size)) in orbits.iter().enumerate() {
        let w = sol.x[k];
        if w <= 0.0 {
            continue;
        }
        let mut j = rep;
        for _ in 0..size {
            mass[j] = w / size as f64;
            j = space.sigma(j);
        }
    }
    let total: f64 = mass.iter().sum();
    for p in &mut mass {
        *p /= total;
    }
    let marginal = first_marginal(&space, &mass);
    let marginal_residual = (0..m)
        .map(|i| (marginal[i] - dom.weight(i)).abs())
        .fold(0.0, f64::max);
    let defect = sigma_defect(&space, &mass);
    let coupling = SigmaCoupling::new(dom, n, mass)?;
    let recomputed_value = coupling.integrate(cost.values());
    if (recomputed_value - sol.objective).abs() > 1e-9 {
        return Err(Error::Internal(format!(
            "coupling integrates to {recomputed_value}, program reported {}",
            sol.objective
        )));
    }
    Ok(TransportResult {
        value: sol.objective,
        coupling,
        diagnostics: TransportDiagnostics {
            orbits: orbits.len(),
            pivots: sol.pivots,
            lp_residual: sol.residual,
            recomputed_value,
            sigma_defect: defect,
            marginal_residual,
        },
    })
}

/// The most negative cycle defect among the orbits carrying mass, if below `-tolerance`.
pub fn violating_cycle(fields: &FieldTuple, coupling: &SigmaCoupling, tolerance: f64) -> Result<Option<CycleWitness>> {
    let m = fields.domain().len();
    let mut best: Option<CycleWitness> = None;
    for (t, _) in coupling.support() {
        let cycle = IndexCycle::new(t, m)?;
        let defect = cycle_defect(fields, &cycle)?;
        if defect < -tolerance && best.as_ref().is_none_or(|b| defect < b.defect) {
            best = Some(CycleWitness {
                cycle,
                defect,
                kind: WitnessKind::Joint,
            });
        }
    }
    Ok(best)
}

/// Push-forward of `mu` by `x -> (x, ..., x)`.
pub fn diagonal_coupling(domain: &DiscreteDomain, order: usize) -> Result<SigmaCoupling> {
    let space = TupleSpace::new(domain.len(), order)?;
    let mut mass = vec![0.0; space.len()];
    for i in 0..domain.len() {
        mass[space.diagonal(i)] = domain.weight(i);
    }
    SigmaCoupling::new(domain, order, mass)
}

/// Push-forward of `mu` by `x -> (x, Sx, ..., S^{N-1}x)` for any self-map of the indices.
pub fn pushforward_measure(map: &[usize], domain: &DiscreteDomain, order: usize) -> Result<Vec<f64>> {
    let m = domain.len();
    if map.len() != m || map.iter().any(|&j| j >= m) {
        return Err(Error::InvalidArgument("map must send each of the m points into the domain".into()));
    }
    let space = TupleSpace::new(m, order)?;
    let mut mass = vec![0.0; space.len()];
    let mut t = vec![0; order];
    for i in 0..m {
        for (k, slot) in t.iter_mut().enumerate() {
            *slot = iterate(map, i, k);
        }
        mass[space.encode(&t)] += domain.weight(i);
    }
    Ok(mass)
}

fn check_preserves_weights(s: &NInvolution, domain: &DiscreteDomain) -> Result<()> {
    if s.len() != domain.len() {
        return Err(Error::InvalidArgument(format!(
            "involution on {} points, domain has {}",
            s.len(),
            domain.len()
        )));
    }
    for c in s.cycles() {
        let w = domain.weight(c[0]);
        if c.iter().any(|&i| domain.weight(i) != w) {
            return Err(Error::NonUniformWeights(format!(
                "cycle {c:?} mixes unequal masses"
            )));
        }
    }
    Ok(())
}

/// Graph coupling of an N-involution; validated as a [`SigmaCoupling`].
pub fn pushforward_coupling(s: &NInvolution, domain: &DiscreteDomain) -> Result<SigmaCoupling> {
    check_preserves_weights(s, domain)?;
    let mass = pushforward_measure(s.perm(), domain, s.order())?;
    SigmaCoupling::new(domain, s.order(), mass)
}

/// `H(t) = g(t_1, t_2, t_N) - g(t_2, t_3, t_1)` with `g(a, b, c) = |a - Sc| - |Sa - b|`.
pub fn absolute_value_hamiltonian(map: &[usize], domain: &DiscreteDomain, order: usize) -> Result<GridHamiltonian> {
    if order < 2 {
        return Err(Error::InvalidArgument("order must be at least 2".into()));
    }
    let p = |i: usize| domain.point(i);
    let g = |a: usize, b: usize, c: usize| dist(p(a), p(map[c])) - dist(p(map[a]), p(b));
    GridHamiltonian::from_fn(domain.len(), order, |t| {
        g(t[0], t[1], t[order - 1]) - g(t[1], t[2 % order], t[0])
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphLemmaReport {
    pub order: usize,
    /// Graph coupling is sigma-invariant.
    pub sigma_invariant: bool,
    pub sigma_defect: f64,
    /// `S` preserves `mu`.
    pub measure_preserving: bool,
    /// `S^N = I` on the support of `mu`.
    pub order_divides: bool,
    /// Worst `|int f(x_1) - f(x_i) d pi|` over indicator functions `f` and `i >= 2`.
    pub indicator_residual: f64,
    /// `int H(x, Sx, ..., S^{N-1}x) d mu` for the absolute-value Hamiltonian.
    pub absolute_value_integral: f64,
    /// Rotation-sum residual of the absolute-value Hamiltonian on the grid.
    pub absolute_value_rotation_residual: f64,
    /// Condition 1: the graph coupling lies in the sigma-invariant class.
    pub condition_coupling: bool,
    /// Condition 2: `S` is measure preserving with `S^N = I`.
    pub condition_involution: bool,
    /// Condition 3: every antisymmetric test Hamiltonian integrates to zero.
    pub condition_antisymmetric: bool,
    pub conditions_agree: bool,
}

const LEMMA_TOL: f64 = 1e-12;

/// Evaluates the three equivalent conditions for a self-map of the points.
pub fn verify_graph_lemma(map: &[usize], domain: &DiscreteDomain, order: usize) -> Result<GraphLemmaReport> {
    let m = domain.len();
    let mass = pushforward_measure(map, domain, order)?;
    let space = TupleSpace::new(m, order)?;
    let defect = sigma_defect(&space, &mass);
    let sigma_invariant = defect <= LEMMA_TOL;

    let mut image = vec![0.0; m];
    for i in 0..m {
        image[map[i]] += domain.weight(i);
    }
    let measure_preserving = (0..m).all(|i| (image[i] - domain.weight(i)).abs() <= LEMMA_TOL);
    let order_divides = (0..m).all(|i| domain.weight(i) == 0.0 || iterate(map, i, order) == i);

    // int f(x_1) - f(x_i) d pi = mu_j - ((S^{i-1})_# mu)_j for f = 1_{x_j}
    let mut indicator_residual: f64 = 0.0;
    for k in 1..order {
        let mut pushed = vec![0.0; m];
        for i in 0..m {
            pushed[iterate(map, i, k)] += domain.weight(i);
        }
        for j in 0..m {
            indicator_residual = indicator_residual.max((domain.weight(j) - pushed[j]).abs());
        }
    }
    let h = absolute_value_hamiltonian(map, domain, order)?;
    let absolute_value_integral: f64 = h.values().iter().zip(&mass).map(|(a, b)| a * b).sum();
    let condition_antisymmetric =
        indicator_residual <= LEMMA_TOL && absolute_value_integral.abs() <= LEMMA_TOL;
    let condition_involution = measure_preserving && order_divides;
    Ok(GraphLemmaReport {
        order,
        sigma_invariant,
        sigma_defect: defect,
        measure_preserving,
        order_divides,
        indicator_residual,
        absolute_value_integral,
        absolute_value_rotation_residual: h.max_abs_rotation_sum(),
        condition_coupling: sigma_invariant,
        condition_involution,
        condition_antisymmetric,
        conditions_agree: sigma_invariant == condition_involution && condition_involution == condition_antisymmetric,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InvolutionMethod {
    Exact,
    Local { restarts: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvolutionResult {
    pub value: f64,
    #[serde(serialize_with = "serialize_perm")]
    pub involution: NInvolution,
    pub method: InvolutionMethod,
    /// Certified global optimum; only the exact method certifies.
    pub optimal: bool,
    pub evaluated: usize,
}

fn serialize_perm<S: serde::Serializer>(s: &NInvolution, ser: S) -> std::result::Result<S::Ok, S::Error> {
    s.perm().serialize(ser)
}

fn require_uniform(domain: &DiscreteDomain) -> Result<()> {
    if domain.is_uniform() {
        Ok(())
    } else {
        Err(Error::NonUniformWeights(
            "involution problems need uniform weights".into(),
        ))
    }
}

/// `table[l][i * m + j] = <u_{l+1}(x_i), x_i - x_j>`.
fn pairing_tables(fields: &FieldTuple) -> Vec<Vec<f64>> {
    let dom = fields.domain();
    let m = dom.len();
    (0..fields.order() - 1)
        .map(|l| {
            let mut t = vec![0.0; m * m];
            for i in 0..m {
                for j in 0..m {
                    t[i * m + j] = pair_cost(fields.u(l, i), dom.point(i), dom.point(j));
                }
            }
            t
        })
        .collect()
}

fn polar_value(tables: &[Vec<f64>], weights: &[f64], perm: &[usize]) -> f64 {
    let m = perm.len();
    let mut sum = 0.0;
    for i in 0..m {
        let mut j = i;
        let mut s = 0.0;
        for t in tables {
            j = perm[j];
            s += t[i * m + j];
        }
        sum += weights[i] * s;
    }
    sum
}

/// `sum_i mu_i sum_l <u_l(x_i), x_i - x_{S^l i}>`.
pub fn involution_objective(fields: &FieldTuple, s: &NInvolution) -> Result<f64> {
    check_preserves_weights(s, fields.domain())?;
    if s.order() != fields.order() {
        return Err(Error::InvalidArgument("involution order differs from field order".into()));
    }
    Ok(polar_value(&pairing_tables(fields), fields.domain().weights(), s.perm()))
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn cycle_type_divides(perm: &[usize], order: usize) -> bool {
    let m = perm.len();
    let mut seen = vec![false; m];
    for s in 0..m {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut j = s;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        if order % len != 0 {
            return false;
        }
    }
    true
}

/// Every permutation of `m` points with `S^N = I`, in lexicographic order.
pub fn all_involutions(m: usize, order: usize) -> Result<Vec<Vec<usize>>> {
    if m > EXACT_MAX_POINTS {
        return Err(Error::SizeCap {
            requested: m as u128,
            cap: EXACT_MAX_POINTS as u128,
        });
    }
    let mut p: Vec<usize> = (0..m).collect();
    let mut out = Vec::new();
    loop {
        if cycle_type_divides(&p, order) {
            out.push(p.clone());
        }
        if !next_permutation(&mut p) {
            break;
        }
    }
    Ok(out)
}

/// Lexicographically first candidate within [`TIE_SLACK`] of the minimum.
fn lex_first_min(candidates: &[(Vec<usize>, f64)]) -> (Vec<usize>, f64) {
    let min = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    candidates
        .iter()
        .filter(|c| c.1 <= min + TIE_SLACK)
        .min_by(|a, b| a.0.cmp(&b.0))
        .cloned()
        .expect("at least the identity is a candidate")
}

/// Exhaustive minimization of `objective` over N-involutions.
pub fn minimize_over_involutions(
    m: usize,
    order: usize,
    objective: impl Fn(&[usize]) -> f64 + Sync,
) -> Result<(Vec<usize>, f64, usize)> {
    let perms = all_involutions(m, order)?;
    let scored: Vec<(Vec<usize>, f64)> = perms
        .into_par_iter()
        .map(|p| {
            let v = objective(&p);
            (p, v)
        })
        .collect();
    let (p, v) = lex_first_min(&scored);
    Ok((p, v, scored.len()))
}

/// Minimizes [`involution_objective`] over permutations with `S^N = I`.
pub fn solve_involution_polar(fields: &FieldTuple, method: InvolutionMethod, seed: u64) -> Result<InvolutionResult> {
    let dom = fields.domain();
    require_uniform(dom)?;
    let m = dom.len();
    let n = fields.order();
    let tables = pairing_tables(fields);
    let weights = dom.weights();
    let objective = |p: &[usize]| polar_value(&tables, weights, p);
    let (perm, value, evaluated, optimal) = match method {
        InvolutionMethod::Exact => {
            let (p, v, e) = minimize_over_involutions(m, n, objective)?;
            (p, v, e, true)
        }
        InvolutionMethod::Local { restarts } => {
            let (p, v, e) = local_search(m, n, restarts.max(1), seed, &objective);
            (p, v, e, false)
        }
    };
    let involution = NInvolution::new(perm, n)?;
    Ok(InvolutionResult {
        value,
        involution,
        method,
        optimal,
        evaluated,
    })
}

fn divisors_above_one(n: usize) -> Vec<usize> {
    (2..=n).filter(|k| n % k == 0).collect()
}

fn random_involution(m: usize, order: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut pts: Vec<usize> = (0..m).collect();
    pts.shuffle(rng);
    let mut lens: Vec<usize> = (1..=order).filter(|k| order % k == 0).collect();
    let mut perm: Vec<usize> = (0..m).collect();
    let mut pos = 0;
    while pos < m {
        lens.retain(|&k| k <= m - pos);
        let k = lens[rng.random_range(0..lens.len())];
        for a in 0..k {
            perm[pts[pos + a]] = pts[pos + (a + 1) % k];
        }
        pos += k;
    }
    perm
}

/// All permutations reachable by one move: splice fixed points into a k-cycle
/// (k | N, which includes transpositions when N is even), dissolve a cycle, or
/// conjugate by a transposition.
fn neighbours(perm: &[usize], order: usize) -> Vec<Vec<usize>> {
    let m = perm.len();
    let mut out = Vec::new();
    let fixed: Vec<usize> = (0..m).filter(|&i| perm[i] == i).collect();
    for k in divisors_above_one(order) {
        if k > fixed.len() {
            continue;
        }
        // ordered k-tuples of fixed points led by their smallest element
        let mut chosen = Vec::with_capacity(k);
        splice(&fixed, k, &mut chosen, &mut |c: &[usize]| {
            let mut p = perm.to_vec();
            for a in 0..k {
                p[c[a]] = c[(a + 1) % k];
            }
            out.push(p);
        });
    }
    for c in cycles(perm) {
        if c.len() > 1 {
            let mut p = perm.to_vec();
            for &i in &c {
                p[i] = i;
            }
            out.push(p);
        }
    }
    for a in 0..m {
        for b in a + 1..m {
            let tau = |i: usize| {
                if i == a {
                    b
                } else if i == b {
                    a
                } else {
                    i
                }
            };
            let mut p = vec![0; m];
            for i in 0..m {
                p[tau(i)] = tau(perm[i]);
            }
            if p != perm {
                out.push(p);
            }
        }
    }
    out
}

fn splice(pool: &[usize], k: usize, chosen: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
    if chosen.len() == k {
        emit(chosen);
        return;
    }
    for &x in pool {
        if chosen.contains(&x) || chosen.first().is_some_and(|&f| x < f) {
            continue;
        }
        chosen.push(x);
        splice(pool, k, chosen, emit);
        chosen.pop();
    }
}

/// Steepest descent from the identity (restart 0) and from random involutions.
fn local_search(
    m: usize,
    order: usize,
    restarts: usize,
    seed: u64,
    objective: &(impl Fn(&[usize]) -> f64 + Sync),
) -> (Vec<usize>, f64, usize) {
    let runs: Vec<(Vec<usize>, f64, usize)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut p = if r == 0 {
                (0..m).collect()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(r as u64);
                random_involution(m, order, &mut rng)
            };
            let mut v = objective(&p);
            let mut evaluated = 1;
            loop {
                let mut best: Option<(Vec<usize>, f64)> = None;
                for q in neighbours(&p, order) {
                    let w = objective(&q);
                    evaluated += 1;
                    if w < v - 1e-12 && best.as_ref().is_none_or(|b| w < b.1 || (w == b.1 && q < b.0)) {
                        best = Some((q, w));
                    }
                }
                match best {
                    Some((q, w)) => {
                        p = q;
                        v = w;
                    }
                    None => break,
                }
            }
            (p, v, evaluated)
        })
        .collect();
    let evaluated = runs.iter().map(|r| r.2).sum();
    let scored: Vec<(Vec<usize>, f64)> = runs.into_iter().map(|r| (r.0, r.1)).collect();
    let (p, v) = lex_first_min(&scored);
    (p, v, evaluated)
}

/// `sum_l sum_i mu_i |u_l(x_i) - x_{S^l i}|^2`.
pub fn projection_objective(fields: &FieldTuple, s: &NInvolution) -> Result<f64> {
    let dom = fields.domain();
    require_uniform(dom)?;
    check_shape(fields, s)?;
    Ok(projection_value(fields, s.perm()))
}

fn check_shape(fields: &FieldTuple, s: &NInvolution) -> Result<()> {
    if s.len() != fields.domain().len() || s.order() != fields.order() {
        return Err(Error::InvalidArgument("involution and fields have different shapes".into()));
    }
    Ok(())
}

fn projection_value(fields: &FieldTuple, perm: &[usize]) -> f64 {
    let dom = fields.domain();
    let mut sum = 0.0;
    for i in 0..dom.len() {
        let mut j = i;
        for l in 0..fields.order() - 1 {
            j = perm[j];
            let d = dist(fields.u(l, i), dom.point(j));
            sum += dom.weight(i) * d * d;
        }
    }
    sum
}

/// `sum_l int |u_l|^2 - 2 sum_l int <u_l(x), S^l x> + (N-1) int |x|^2`.
pub fn projection_expansion(fields: &FieldTuple, s: &NInvolution) -> Result<f64> {
    let dom = fields.domain();
    require_uniform(dom)?;
    check_shape(fields, s)?;
    let n = fields.order();
    let mut norms = 0.0;
    let mut cross = 0.0;
    let mut second = 0.0;
    for i in 0..dom.len() {
        let w = dom.weight(i);
        second += w * dot(dom.point(i), dom.point(i));
        for l in 0..n - 1 {
            let u = fields.u(l, i);
            norms += w * dot(u, u);
            cross += w * dot(u, dom.point(s.pow(i, l + 1)));
        }
    }
    Ok(norms - 2.0 * cross + (n - 1) as f64 * second)
}

/// Exhaustive minimizer of [`projection_objective`].
pub fn solve_projection_exact(fields: &FieldTuple) -> Result<(NInvolution, f64)> {
    let dom = fields.domain();
    require_uniform(dom)?;
    let (p, v, _) = minimize_over_involutions(dom.len(), fields.order(), |p| projection_value(fields, p))?;
    Ok((NInvolution::new(p, fields.order())?, v))
}

/// `int L_H(x, u(x)) d mu - sum_l int <u_l(x), S^l x> d mu` for antisymmetric `H`.
pub fn duality_gap(fields: &FieldTuple, h: &GridHamiltonian, s: &NInvolution) -> Result<f64> {
    if !h.flags().antisymmetric {
        return Err(Error::InvalidArgument("duality gap needs an antisymmetric Hamiltonian".into()));
    }
    check_shape(fields, s)?;
    let dom = fields.domain();
    check_preserves_weights(s, dom)?;
    let n = fields.order();
    let mut gap = 0.0;
    for i in 0..dom.len() {
        let p: Vec<Vec<f64>> = (0..n - 1).map(|l| fields.u(l, i).to_vec()).collect();
        let l_h = legendre_transform(h, dom, i, &p)?.value;
        let pairing: f64 = (0..n - 1)
            .map(|l| dot(fields.u(l, i), dom.point(s.pow(i, l + 1))))
            .sum();
        gap += dom.weight(i) * (l_h - pairing);
    }
    Ok(gap)
}

/// True when `map` is a bijection of the points.
pub fn is_bijection(map: &[usize]) -> bool {
    is_permutation(map)
}
