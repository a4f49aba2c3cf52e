use ncyclic::envelope::{convexify_block, Block, Sign};
use ncyclic::generate::{generate_example, ExampleKind, ExampleParams};
use ncyclic::hamiltonian::{
    antisymmetrize, build_maximal_h, build_psi, check_shape, extract_subgradients, improve_step, lift_f_to_h,
    LiftVariant,
};
use ncyclic::lp::{LinearProgram, LpStatus};
use ncyclic::monotonicity::{check_joint, check_single, SearchMethod, DEFAULT_TOL};
use ncyclic::transport::{
    all_involutions, duality_gap, involution_objective, minimize_over_involutions, projection_expansion,
    projection_objective, pushforward_coupling, solve_involution_polar, solve_projection_exact,
    solve_sigma_kantorovich, InvolutionMethod,
};
use ncyclic::{apply_sigma, FieldTuple, GridHamiltonian, NInvolution, TupleSpace};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fields(kind: ExampleKind, m: usize, d: usize, n: usize, seed: u64) -> FieldTuple {
    generate_example(&ExampleParams::new(kind, m, d, n, seed)).unwrap()
}

fn random_tensor(m: usize, n: usize, seed: u64) -> GridHamiltonian {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = TupleSpace::new(m, n).unwrap();
    GridHamiltonian::new(m, n, (0..space.len()).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

fn random_involution(m: usize, n: usize, seed: u64) -> NInvolution {
    let all = all_involutions(m, n).unwrap();
    NInvolution::new(all[seed as usize % all.len()].clone(), n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sigma_has_order_n(t in proptest::collection::vec(0usize..5, 1..6)) {
        let mut s = t.clone();
        for _ in 0..t.len() {
            s = apply_sigma(&s);
        }
        prop_assert_eq!(s, t.clone());
        let space = TupleSpace::new(5, t.len()).unwrap();
        let idx = space.encode(&t);
        prop_assert_eq!(space.decode(space.sigma(idx)), apply_sigma(&t));
        prop_assert_eq!(space.sigma_pow(idx, t.len()), idx);
    }

    #[test]
    fn first_block_envelope_is_idempotent_and_below(m in 2usize..5, d in 1usize..3, n in 2usize..4, seed in any::<u64>()) {
        let ft = fields(ExampleKind::Random, m, d, n, seed);
        let h = random_tensor(m, n, seed ^ 1);
        let c = convexify_block(&h, ft.domain(), Block::First, Sign::Convexify).unwrap();
        let cc = convexify_block(&c, ft.domain(), Block::First, Sign::Convexify).unwrap();
        prop_assert!(cc.max_abs_diff(&c) <= 1e-9);
        for (a, b) in c.values().iter().zip(h.values()) {
            prop_assert!(*a <= b + 1e-12);
        }
        // monotone in the data
        let g = h.map(|v| v + 0.25).unwrap();
        let cg = convexify_block(&g, ft.domain(), Block::First, Sign::Convexify).unwrap();
        for (a, b) in c.values().iter().zip(cg.values()) {
            prop_assert!((b - a - 0.25).abs() <= 1e-9);
        }
        let cav = convexify_block(&h, ft.domain(), Block::First, Sign::Concavify).unwrap();
        for (a, b) in cav.values().iter().zip(h.values()) {
            prop_assert!(*a >= b - 1e-12);
        }
    }

    #[test]
    fn padded_joint_matches_single(m in 2usize..5, d in 1usize..3, n in 2usize..5, seed in any::<u64>()) {
        let u = fields(ExampleKind::Random, m, d, 2, seed).component(0);
        let joint = check_joint(&FieldTuple::padded(&u, n).unwrap(), DEFAULT_TOL).unwrap();
        let single = check_single(&u, n, DEFAULT_TOL, SearchMethod::NegativeCycle).unwrap();
        prop_assert_eq!(joint.is_pass(), single.is_pass());
    }

    #[test]
    fn repeated_joint_matches_two_monotone(m in 2usize..5, d in 1usize..3, n in 2usize..5, seed in any::<u64>()) {
        let u = fields(ExampleKind::Random, m, d, 2, seed).component(0);
        let joint = check_joint(&FieldTuple::repeated(&u, n).unwrap(), DEFAULT_TOL).unwrap();
        let two = check_single(&u, 2, DEFAULT_TOL, SearchMethod::Enumerate).unwrap();
        prop_assert_eq!(joint.is_pass(), two.is_pass());
    }

    #[test]
    fn closed_walks_match_enumeration(m in 2usize..6, d in 1usize..3, n in 2usize..5, seed in any::<u64>()) {
        let u = fields(ExampleKind::Random, m, d, 2, seed).component(0);
        let a = check_single(&u, n, DEFAULT_TOL, SearchMethod::Enumerate).unwrap();
        let b = check_single(&u, n, DEFAULT_TOL, SearchMethod::NegativeCycle).unwrap();
        prop_assert_eq!(a.is_pass(), b.is_pass());
        if let (Some(x), Some(y)) = (a.witness(), b.witness()) {
            prop_assert!((x.defect - y.defect).abs() <= 1e-9);
        }
    }

    #[test]
    fn antisymmetrize_projects(m in 2usize..4, n in 2usize..5, seed in any::<u64>()) {
        let h = random_tensor(m, n, seed);
        let bar = antisymmetrize(&h).unwrap();
        prop_assert!(bar.max_abs_rotation_sum() <= 1e-12);
        let again = antisymmetrize(&bar).unwrap();
        prop_assert!(again.max_abs_diff(&bar) <= 1e-12);
    }

    #[test]
    fn corrected_lift_is_antisymmetric(m in 2usize..5, n in 2usize..6, seed in any::<u64>()) {
        let r = random_tensor(m, 2, seed);
        let f = GridHamiltonian::from_fn(m, 2, |t| if t[0] == t[1] { 0.0 } else { r.get(t) }).unwrap();
        let (_, corrected) = lift_f_to_h(&f, n, LiftVariant::Corrected).unwrap();
        prop_assert!(corrected.max_abs_rotation_sum <= 1e-10);
        let (_, printed) = lift_f_to_h(&f, n, LiftVariant::Printed).unwrap();
        prop_assert!(printed.cyclic_prediction_residual <= 1e-10);
    }

    #[test]
    fn graph_couplings_annihilate_antisymmetric(m in 2usize..5, n in 2usize..5, seed in any::<u64>()) {
        let ft = fields(ExampleKind::Random, m, 1, n, seed);
        let s = random_involution(m, n, seed);
        let pi = pushforward_coupling(&s, ft.domain()).unwrap();
        let bar = antisymmetrize(&random_tensor(m, n, seed ^ 7)).unwrap();
        prop_assert!(pi.integrate(bar.values()).abs() <= 1e-12);
    }

    #[test]
    fn projection_expands(m in 2usize..5, d in 1usize..3, n in 2usize..5, seed in any::<u64>()) {
        let ft = fields(ExampleKind::Random, m, d, n, seed);
        let s = random_involution(m, n, seed);
        let a = projection_objective(&ft, &s).unwrap();
        let b = projection_expansion(&ft, &s).unwrap();
        prop_assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn projection_and_pairing_share_argmin(m in 2usize..6, d in 1usize..3, n in 2usize..4, seed in any::<u64>()) {
        let ft = fields(ExampleKind::Random, m, d, n, seed);
        let (proj, _) = solve_projection_exact(&ft).unwrap();
        let pairing = |p: &[usize]| {
            let s = NInvolution::new(p.to_vec(), n).unwrap();
            -(0..m).map(|i| (0..n - 1).map(|l| {
                let u = ft.u(l, i);
                let y = ft.domain().point(s.pow(i, l + 1));
                u.iter().zip(y).map(|(a, b)| a * b).sum::<f64>()
            }).sum::<f64>()).sum::<f64>()
        };
        let (best, _, _) = minimize_over_involutions(m, n, pairing).unwrap();
        prop_assert_eq!(proj.perm(), &best[..]);
    }

    #[test]
    fn transport_chain(m in 2usize..5, d in 1usize..3, n in 2usize..4, seed in any::<u64>(), monotone in any::<bool>()) {
        let kind = if monotone { ExampleKind::RandomMonotone } else { ExampleKind::Random };
        let ft = fields(kind, m, d, n, seed);
        let lp = solve_sigma_kantorovich(&ft).unwrap();
        let inv = solve_involution_polar(&ft, InvolutionMethod::Exact, 0).unwrap();
        prop_assert!((lp.diagnostics.recomputed_value - lp.value).abs() <= 1e-9);
        prop_assert!(lp.value <= inv.value + 1e-9);
        prop_assert!(inv.value <= 0.0);
        prop_assert!((involution_objective(&ft, &inv.involution).unwrap() - inv.value).abs() <= 1e-12);
        if monotone {
            prop_assert!(lp.value >= -1e-8 && lp.value <= 1e-12);
            prop_assert!(inv.value >= -1e-8);
        }
    }

    #[test]
    fn fields_json_round_trip_is_exact(m in 1usize..6, d in 1usize..4, n in 2usize..5, seed in any::<u64>()) {
        let ft = fields(ExampleKind::Random, m, d, n, seed);
        prop_assert_eq!(ncyclic::io::parse_fields_json(&ncyclic::io::fields_to_json(&ft)).unwrap(), ft);
    }

    #[test]
    fn lp_is_feasible_and_deterministic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (rows, cols) = (rng.random_range(1..4), rng.random_range(2..8));
        let x0: Vec<f64> = (0..cols).map(|_| rng.random_range(0.0..1.0)).collect();
        let mut lp = LinearProgram::new((0..cols).map(|_| rng.random_range(-1.0..1.0)).collect());
        lp.add_equality(vec![1.0; cols], x0.iter().sum());
        for _ in 0..rows {
            let row: Vec<f64> = (0..cols).map(|_| rng.random_range(-2.0..2.0)).collect();
            let rhs = row.iter().zip(&x0).map(|(a, b)| a * b).sum();
            lp.add_equality(row, rhs);
        }
        let a = lp.solve().unwrap();
        prop_assert_eq!(a.status, LpStatus::Optimal);
        prop_assert!(a.residual <= 1e-8);
        prop_assert!(a.x.iter().all(|&v| v >= -1e-10));
        let b = lp.solve().unwrap();
        prop_assert_eq!(a.x.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.x.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn weak_duality(m in 2usize..5, d in 1usize..3, n in 2usize..4, seed in any::<u64>()) {
        let ft = fields(ExampleKind::RandomMonotone, m, d, n, seed);
        let bar = antisymmetrize(&random_tensor(m, n, seed ^ 3)).unwrap();
        let s = random_involution(m, n, seed);
        prop_assert!(duality_gap(&ft, &bar, &s).unwrap() >= -1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn subgradients_of_maximal_h_are_jointly_monotone(m in 2usize..5, d in 1usize..3, n in 2usize..4, seed in any::<u64>()) {
        let ft = fields(ExampleKind::RandomMonotone, m, d, n, seed);
        let (h, report) = build_maximal_h(&ft, 1e-9, 200).unwrap();
        prop_assert!(report.passed);
        let v = extract_subgradients(&h, ft.domain()).unwrap().expect("supporting slopes exist");
        prop_assert!(check_joint(&v, 1e-8).unwrap().is_pass());
    }

    #[test]
    fn improve_step_keeps_shape_and_increases(m in 2usize..5, d in 1usize..3, n in 2usize..4, seed in any::<u64>()) {
        let ft = fields(ExampleKind::RandomMonotone, m, d, n, seed);
        let (mut h, _) = build_psi(&ft).unwrap();
        for _ in 0..4 {
            let next = improve_step(&h, ft.domain()).unwrap();
            prop_assert!(check_shape(&next, ft.domain()).unwrap().holds(1e-9));
            for (a, b) in h.values().iter().zip(next.values()) {
                prop_assert!(*b >= a - 1e-9);
            }
            h = next;
        }
    }

    #[test]
    fn polar_nesting(m in 2usize..6, d in 1usize..3, n in 2usize..4, seed in any::<u64>()) {
        let u = fields(ExampleKind::Random, m, d, 2, seed).component(0);
        if check_single(&u, n + 1, DEFAULT_TOL, SearchMethod::NegativeCycle).unwrap().is_pass() {
            let ft = FieldTuple::padded(&u, n).unwrap();
            let v = solve_involution_polar(&ft, InvolutionMethod::Exact, 0).unwrap().value;
            prop_assert!(v >= -1e-8);
        }
    }
}
