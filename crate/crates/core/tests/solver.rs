mod common;

use std::cmp::Ordering;

use common::{instance, max_dist, rng};
use contpay::graph::{consistent_edges, not_multi_arena, play, Edge, GameGraph, Owner, PositionalStrategy};
use contpay::instances::{random_map, GameShape};
use contpay::payoff::{fixtures, ContractingBase, PiecewiseLinearMap};
use contpay::solver::{
    bellman_residual, bellman_step, brute_force_solve, find_violating, improve, modified_cost, neighbor_compare,
    random_switch_solve, solve_value_iteration, strategy_improvement, strategy_value, switch, verify_equilibrium,
    SolverError, SwitchRule, Tolerances, ValueVector,
};
use contpay::words::{Alphabet, Letter};
use proptest::prelude::*;
use rand::Rng;

const TOL: Tolerances = Tolerances { eps: 1e-9, eps_cmp: 1e-7 };

fn small() -> GameShape {
    GameShape { max_nodes: 6, max_out_degree: 3, max_max_nodes: 6 }
}

#[test]
fn min_response_enumeration_matches_strategy_value() {
    for seed in 0..40 {
        let (g, base) = instance(seed, small());
        let sigma = PositionalStrategy::first_edges(&g, Owner::Max);
        let val = strategy_value(&g, &base, &sigma, TOL.eps).unwrap();
        let mut best = vec![f64::INFINITY; g.node_count()];
        for tau in PositionalStrategy::enumerate(&g, Owner::Min) {
            for (u, b) in best.iter_mut().enumerate() {
                *b = b.min(base.eval_raw(&play(&g, &sigma, &tau, u).label_word(&g)).unwrap());
            }
        }
        assert!(max_dist(&val.values, &best) <= 1e-8, "seed {seed}");
    }
}

#[test]
fn switch_rejects_opponent_edges() {
    let a = Alphabet::new(["a"]).unwrap();
    let e = |s, t| Edge { source: s, label: Letter(0), target: t };
    let g = GameGraph::new(a, vec![Owner::Max, Owner::Min], vec![e(0, 1), e(0, 0), e(1, 0)]).unwrap();
    let s = PositionalStrategy::first_edges(&g, Owner::Max);
    assert!(matches!(switch(&g, &s, 2), Err(SolverError::Graph(_)) | Err(SolverError::Argument(_))));
    assert_eq!(switch(&g, &s, 0).unwrap(), s);
    assert_eq!(switch(&g, &s, 1).unwrap().differing_nodes(&s), vec![0]);
}

#[test]
fn neighbor_compare_rejects_equal_strategies() {
    let fig = not_multi_arena();
    let base = fixtures::not_multi_base();
    let s = fig.go_left();
    assert!(neighbor_compare(&fig.graph, &base, &s, &s, TOL).is_err());
    assert!(neighbor_compare(&fig.graph, &base, &s, &fig.go_right(), TOL).is_err());
    let one = s.switch(&fig.graph, fig.right[0]).unwrap();
    assert_eq!(neighbor_compare(&fig.graph, &base, &one, &s, TOL).unwrap(), Ordering::Less);
}

#[test]
fn brute_force_refuses_huge_games() {
    let a = Alphabet::numbered(1);
    let n = 14;
    let edges = (0..n).flat_map(|u| (0..3).map(move |k| Edge { source: u, label: Letter(0), target: (u + k) % n })).collect();
    let g = GameGraph::new(a.clone(), vec![Owner::Max; n], edges).unwrap();
    let base = ContractingBase::new(a, vec![PiecewiseLinearMap::affine(0.0, 1.0, 0.5, 0.0).unwrap()], None).unwrap();
    assert!(matches!(brute_force_solve(&g, &base), Err(SolverError::TooLarge { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bellman_operator_is_monotone(seed: u64) {
        let (g, base) = instance(seed, small());
        let mut r = rng(seed ^ 7);
        let n = g.node_count();
        let x: Vec<f64> = (0..n).map(|_| r.gen_range(base.lo()..=base.hi())).collect();
        let y: Vec<f64> = x.iter().map(|&v| r.gen_range(v..=base.hi())).collect();
        let tx = bellman_step(&g, &base, &ValueVector::new(x, 0.0)).unwrap();
        let ty = bellman_step(&g, &base, &ValueVector::new(y, 0.0)).unwrap();
        prop_assert!(tx.values.iter().zip(&ty.values).all(|(a, b)| a <= b));
    }

    #[test]
    fn value_iteration_residual_and_certificate(seed: u64) {
        let (g, base) = instance(seed, small());
        let eq = solve_value_iteration(&g, &base, TOL).unwrap();
        prop_assert!(bellman_residual(&g, &base, &eq.values.values) <= 2.0 * TOL.eps);
        prop_assert!(verify_equilibrium(&g, &base, &eq.sigma, &eq.tau, 10.0 * TOL.eps).unwrap().pass);
    }

    #[test]
    fn methods_agree(seed: u64) {
        let (g, base) = instance(seed, small());
        let vi = solve_value_iteration(&g, &base, TOL).unwrap();
        let (brute, _) = brute_force_solve(&g, &base).unwrap();
        let si = strategy_improvement(&g, &base, SwitchRule::Greedy, TOL).unwrap();
        let all = strategy_improvement(&g, &base, SwitchRule::AllSingle, TOL).unwrap();
        let rand = random_switch_solve(&g, &base, seed, TOL).unwrap();
        for other in [&brute, &si, &all, &rand.equilibrium] {
            prop_assert!(max_dist(&vi.values.values, &other.values.values) <= 1e-6);
        }
    }

    #[test]
    fn min_dual_improvement_agrees(seed: u64) {
        let (g, base) = instance(seed, small());
        let vi = solve_value_iteration(&g, &base, TOL).unwrap();
        let start = PositionalStrategy::first_edges(&g, Owner::Min);
        let run = improve(&g, &base, start, SwitchRule::Greedy, TOL).unwrap();
        prop_assert!(max_dist(&vi.values.values, &run.equilibrium.values.values) <= 1e-6);
        prop_assert!(run.sums.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn switching_a_violating_edge_raises_the_total(seed: u64) {
        let (g, base) = instance(seed, small());
        let sigma = PositionalStrategy::first_edges(&g, Owner::Max);
        let val = strategy_value(&g, &base, &sigma, TOL.eps).unwrap();
        for e in consistent_edges(&g, &sigma) {
            prop_assert!(modified_cost(&g, &base, &val, e).unwrap() >= -TOL.eps_cmp);
        }
        let violating = find_violating(&g, &base, &sigma, &val, TOL.eps_cmp);
        prop_assert!(violating.windows(2).all(|w| w[0].1 >= w[1].1));
        for (e, _) in violating {
            let next = switch(&g, &sigma, e).unwrap();
            prop_assert_eq!(next.differing_nodes(&sigma).len(), 1);
            let after = strategy_value(&g, &base, &next, TOL.eps).unwrap();
            prop_assert!(after.sum() > val.sum() + TOL.eps);
            prop_assert_eq!(neighbor_compare(&g, &base, &next, &sigma, TOL).unwrap(), Ordering::Greater);
        }
    }

    #[test]
    fn potential_corollary(seed: u64) {
        // Plays consistent with sigma never fall below Val[sigma] by more
        // than |V| tolerances, whatever Min does.
        let (g, base) = instance(seed, small());
        let sigma = PositionalStrategy::first_edges(&g, Owner::Max);
        let val = strategy_value(&g, &base, &sigma, TOL.eps).unwrap();
        let slack = g.node_count() as f64 * TOL.eps_cmp;
        for tau in PositionalStrategy::enumerate(&g, Owner::Min) {
            for u in 0..g.node_count() {
                let lasso = play(&g, &sigma, &tau, u);
                prop_assert!(lasso.edges().all(|e| modified_cost(&g, &base, &val, e).unwrap() >= -TOL.eps_cmp));
                prop_assert!(base.eval_raw(&lasso.label_word(&g)).unwrap() >= val[u] - slack);
            }
        }
    }

    #[test]
    fn neighbor_compare_matches_full_sums(seed: u64) {
        let (g, base) = instance(seed, small());
        let s1 = PositionalStrategy::first_edges(&g, Owner::Max);
        let v1 = strategy_value(&g, &base, &s1, TOL.eps).unwrap().sum();
        for u in g.nodes_of(Owner::Max) {
            for &e in &g.out_edges(u)[1..] {
                let s2 = s1.switch(&g, e).unwrap();
                let v2 = strategy_value(&g, &base, &s2, TOL.eps).unwrap().sum();
                let got = neighbor_compare(&g, &base, &s1, &s2, TOL).unwrap();
                let gap = v1 - v2;
                if gap.abs() > g.node_count() as f64 * TOL.eps_cmp {
                    prop_assert_eq!(got, gap.total_cmp(&0.0));
                }
            }
        }
    }

    #[test]
    fn post_map_keeps_the_equilibrium(seed: u64) {
        let (g, base) = instance(seed, small());
        let eq = solve_value_iteration(&g, &base, TOL).unwrap();
        let mut r = rng(seed ^ 99);
        let raw = random_map(&mut r, 3, 1.0);
        // stretch the random map from [0, 1] onto the base's interval
        let (lo, hi) = (base.lo(), base.hi());
        let pts = raw.points().iter().map(|&(x, y)| (lo + x * (hi - lo), y)).collect();
        let post = PiecewiseLinearMap::new(pts).unwrap();
        let mapped = base.with_post_map(Some(post));
        prop_assert!(verify_equilibrium(&g, &mapped, &eq.sigma, &eq.tau, 10.0 * TOL.eps).unwrap().pass);
    }

    #[test]
    fn random_switching_is_seed_reproducible(seed: u64) {
        let (g, base) = instance(seed, small());
        let a = random_switch_solve(&g, &base, seed, TOL).unwrap();
        let b = random_switch_solve(&g, &base, seed, TOL).unwrap();
        prop_assert_eq!(a.switches, b.switches);
        prop_assert_eq!(a.equilibrium.sigma, b.equilibrium.sigma);
    }
}

#[test]
fn single_choice_node_switches_at_most_out_degree_times() {
    for seed in 0..50u64 {
        let mut r = rng(seed);
        let a = Alphabet::numbered(3);
        let base = contpay::instances::random_base(&mut r, &a, 2, 0.9);
        let e = |t, l| Edge { source: 0, label: Letter(l), target: t };
        let g = GameGraph::new(a, vec![Owner::Max, Owner::Min], vec![e(0, 0), e(0, 1), e(1, 2), e(1, 0), Edge { source: 1, label: Letter(0), target: 0 }]).unwrap();
        let run = random_switch_solve(&g, &base, seed, TOL).unwrap();
        assert!(run.switches.len() <= g.out_edges(0).len());
        let _ = improve(&g, &base, PositionalStrategy::first_edges(&g, Owner::Max), SwitchRule::Random(seed), TOL).unwrap();
    }
}
