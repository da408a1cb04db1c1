//! Worked examples for each public operation.

use std::cmp::Ordering;

use flowncg::analysis::{audit_ne, enumerate_profiles, find_cluster, ne_census, DEFAULT_PROFILE_BUDGET};
use flowncg::connectivity::{
    all_pairs_connectivity, cut_capacity, global_connectivity, local_connectivity, min_cut_partition,
};
use flowncg::constructions::{
    build_avg_game_circle_ne, build_avg_game_star_ne, build_directed_cycle, build_figure1, build_min_game_worst_ne,
    build_opt, CyclePolicy,
};
use flowncg::dynamics::{best_response, improving_best_response, is_nash, run_dynamics, DynamicsOutcome, Scheduler};
use flowncg::games::{agent_utility, compare, social_utility, UtilityValue};
use flowncg::space::enumerate_strategies;
use flowncg::{CapacityNetwork, Error, GameKind, Rational, Strategy};

fn avg(num: i64, den: i64) -> UtilityValue {
    UtilityValue::Avg(Rational::new(num, den))
}

fn min(connectivity: u64, well_connected: usize) -> UtilityValue {
    UtilityValue::Min {
        connectivity,
        well_connected,
    }
}

fn brute_force_global(net: &CapacityNetwork) -> u64 {
    let n = net.n();
    (1u32..(1 << (n - 1)))
        .map(|m| {
            let side: Vec<bool> = (0..n).map(|i| m >> i & 1 == 1).collect();
            cut_capacity(net, &side)
        })
        .min()
        .unwrap()
}

#[test]
fn figure1_network() {
    let net = build_figure1().unwrap();
    let [v, x, y, z] = ["v", "x", "y", "z"].map(|l| net.resolve_node(l).unwrap());
    assert_eq!(net.capacity(v, x), 2);
    assert_eq!(net.capacity(v, z), 1);
    assert_eq!(net.capacity(x, z), 1);
    assert_eq!(net.capacity(x, y), 1);
    assert_eq!(net.capacity(y, z), 3);
    assert_eq!(net.capacity(v, y), 0);
    assert_eq!(net.degree(z), 5);
    assert_eq!(net.total_capacity(), 8);
    assert_eq!(all_pairs_connectivity(&net).connectivity(z, y), 4);
    assert_eq!(agent_utility(&net, z, GameKind::AvgFlow).unwrap(), avg(10, 3));
}

#[test]
fn apply_strategy_examples() {
    let net = build_figure1().unwrap();
    let [v, y, z] = ["v", "y", "z"].map(|l| net.resolve_node(l).unwrap());
    let changed = net
        .apply_strategy(z, Strategy::new(z, [(y, 1), (v, 1)]).unwrap())
        .unwrap();
    assert_eq!(changed.capacity(y, z), 2);
    assert_eq!(changed.capacity(v, z), 2);
    assert_eq!(net.capacity(y, z), 3, "input is unchanged");
    let over = Strategy::new(z, [(y, 2), (v, 1)]).unwrap();
    assert!(matches!(
        net.apply_strategy(z, over),
        Err(Error::Infeasible { agent: 3, .. })
    ));
}

#[test]
fn empty_networks() {
    let net = CapacityNetwork::empty(3, 1).unwrap();
    assert_eq!(net.edges().count(), 0);
    assert_eq!(net.degree(0), 0);
    assert_eq!(local_connectivity(&net, 0, 1).unwrap(), 0);
    assert!(all_pairs_connectivity(&net).edges().all(|(_, _, c)| c == 0));
    assert_eq!(global_connectivity(&net), 0);
    assert_eq!(agent_utility(&net, 0, GameKind::MinFlow).unwrap(), min(0, 0));
    for kind in GameKind::ALL {
        assert_eq!(social_utility(&net, kind), Rational::from_integer(0));
        assert!(!is_nash(&net, kind).unwrap().is_equilibrium());
    }
    assert_eq!(find_cluster(&net, 1).unwrap(), None);
    assert!(matches!(local_connectivity(&net, 1, 1), Err(Error::Argument(_))));
}

#[test]
fn strategy_counts() {
    assert_eq!(enumerate_strategies(4, 1, 0).unwrap().count(), 4);
    assert_eq!(enumerate_strategies(4, 2, 0).unwrap().count(), 10);
    assert_eq!(enumerate_strategies(2, 1, 1).unwrap().count(), 2);
    assert_eq!(enumerate_profiles(4, 1, DEFAULT_PROFILE_BUDGET).unwrap().count(), 256);
}

#[test]
fn directed_cycle() {
    for (n, k) in [(3, 1), (5, 2), (6, 3)] {
        let net = build_directed_cycle(n, k).unwrap();
        let two_k = 2 * u64::from(k);
        assert!((0..n).all(|v| net.degree(v) == two_k));
        assert_eq!(global_connectivity(&net), two_k);
        let (left, _) = min_cut_partition(&net);
        let side: Vec<bool> = (0..n).map(|v| left.contains(&v)).collect();
        assert_eq!(cut_capacity(&net, &side), two_k);
        for kind in GameKind::ALL {
            assert_eq!(social_utility(&net, kind), Rational::from_integer(two_k as i64));
            assert!(is_nash(&net, kind).unwrap().is_equilibrium());
            for v in 0..n {
                let (s, _) = best_response(&net, v, kind).unwrap();
                assert_eq!(&s, net.strategy(v));
            }
            let out = run_dynamics(&net, kind, Scheduler::RoundRobin, 100, 0).unwrap();
            assert!(matches!(out, DynamicsOutcome::ReachedNe { ref trace, .. } if trace.is_empty()));
            let report = audit_ne(&net, kind).unwrap();
            assert_eq!(report.edge_connectivity, two_k);
        }
    }
}

#[test]
fn two_disjoint_triangles() {
    let net = CapacityNetwork::from_edges(
        6,
        1,
        &[(0, 1, 1), (1, 2, 1), (2, 0, 1), (3, 4, 1), (4, 5, 1), (5, 3, 1)],
    )
    .unwrap();
    let (mut left, mut right) = min_cut_partition(&net);
    left.sort_unstable();
    right.sort_unstable();
    let mut parts = [left, right];
    parts.sort();
    assert_eq!(parts, [vec![0, 1, 2], vec![3, 4, 5]]);
    assert_eq!(global_connectivity(&net), 0);
}

#[test]
fn optimum_examples() {
    let net = build_opt(4, 2, CyclePolicy::default()).unwrap();
    for a in 0..4 {
        for b in a + 1..4 {
            assert_eq!(local_connectivity(&net, a, b).unwrap(), 4);
        }
    }
    let triangle = build_opt(3, 1, CyclePolicy::default()).unwrap();
    assert_eq!(global_connectivity(&triangle), 2);
    assert_eq!(brute_force_global(&triangle), 2);
    for (n, k) in [(4, 3), (5, 2), (7, 4)] {
        let repeat = build_opt(n, k, CyclePolicy::RepeatCanonical).unwrap();
        assert_eq!(repeat.profile(), build_directed_cycle(n, k).unwrap().profile());
        let net = build_opt(n, k, CyclePolicy::RotationOffsets).unwrap();
        assert!((0..n).all(|v| net.degree(v) == 2 * u64::from(k)));
        assert_eq!(find_cluster(&net, 2 * u64::from(k)).unwrap(), Some((0..n).collect()));
    }
    assert!(matches!(
        build_opt(4, 4, CyclePolicy::default()),
        Err(Error::Parameter(_))
    ));
}

#[test]
fn min_game_worst_equilibrium() {
    for (n, k) in [(5, 2), (6, 2), (6, 3), (7, 3)] {
        let net = build_min_game_worst_ne(n, k).unwrap();
        let k1 = u64::from(k) + 1;
        assert_eq!(global_connectivity(&net), k1);
        assert_eq!(brute_force_global(&net), k1);
        for v in 0..n {
            let UtilityValue::Min { connectivity, .. } = agent_utility(&net, v, GameKind::MinFlow).unwrap() else {
                unreachable!()
            };
            assert_eq!(connectivity, k1);
        }
        let report = audit_ne(&net, GameKind::MinFlow).unwrap();
        assert_eq!(report.edge_connectivity, k1);
        let v2 = net.resolve_node("v2").unwrap();
        let m = improving_best_response(&net, v2, GameKind::AvgFlow)
            .unwrap()
            .expect("v2 can improve");
        assert!(m.is_improving());
    }
}

#[test]
fn avg_game_circle_equilibrium() {
    for (n, k) in [(5usize, 2u32), (6, 2), (6, 3)] {
        let net = build_avg_game_circle_ne(n, k).unwrap();
        let kk = i64::from(k);
        let expected = Rational::from_integer(kk) + Rational::new(kk * (kk - 1), n as i64 - 1);
        assert_eq!(social_utility(&net, GameKind::AvgFlow), expected);
        assert_eq!(global_connectivity(&net), u64::from(k));
        let (left, _) = min_cut_partition(&net);
        let side: Vec<bool> = (0..n).map(|v| left.contains(&v)).collect();
        assert_eq!(cut_capacity(&net, &side), brute_force_global(&net));
        assert!(!is_nash(&net, GameKind::MinFlow).unwrap().is_equilibrium());
    }
    let net = build_avg_game_circle_ne(6, 2).unwrap();
    assert_eq!(audit_ne(&net, GameKind::AvgFlow).unwrap().edge_connectivity, 2);
    assert!(matches!(build_avg_game_circle_ne(5, 1), Err(Error::Parameter(_))));
}

#[test]
fn avg_game_star_equilibrium() {
    for (n, k) in [(5usize, 2u32), (6, 3), (7, 2)] {
        let net = build_avg_game_star_ne(n, k).unwrap();
        assert!((0..n).all(|v| net.strategy(v).spent() == u64::from(k)));
        assert_eq!(
            social_utility(&net, GameKind::AvgFlow),
            Rational::from_integer(i64::from(k) + 1)
        );
        assert!(is_nash(&net, GameKind::AvgFlow).unwrap().is_equilibrium());
    }
}

#[test]
fn utility_comparisons() {
    assert_eq!(compare(&min(3, 0), &min(2, 7)).unwrap(), Ordering::Greater);
    assert_eq!(compare(&min(3, 2), &min(3, 5)).unwrap(), Ordering::Less);
    assert_eq!(compare(&avg(10, 3), &avg(7, 2)).unwrap(), Ordering::Less);
    assert!(matches!(compare(&avg(1, 1), &min(1, 0)), Err(Error::Argument(_))));
}

#[test]
fn two_agents_buy_the_missing_edge() {
    let net = CapacityNetwork::from_edges(2, 1, &[(0, 1, 1)]).unwrap();
    for kind in GameKind::ALL {
        let m = improving_best_response(&net, 1, kind)
            .unwrap()
            .expect("buying improves");
        assert_eq!(m.after.purchases(), &[(0, 1)]);
    }
}

#[test]
fn dynamics_from_the_empty_triangle() {
    let start = CapacityNetwork::empty(3, 1).unwrap();
    for kind in GameKind::ALL {
        let out = run_dynamics(&start, kind, Scheduler::RoundRobin, 1_000, 0).unwrap();
        let DynamicsOutcome::ReachedNe { network, trace } = out else {
            panic!("no equilibrium reached");
        };
        assert!(!trace.is_empty());
        assert!(network.is_connected());
        assert!(is_nash(&network, kind).unwrap().is_equilibrium());
    }
}

#[test]
fn step_limit_is_reported() {
    let start = CapacityNetwork::empty(4, 2).unwrap();
    let out = run_dynamics(&start, GameKind::AvgFlow, Scheduler::RoundRobin, 1, 0).unwrap();
    assert!(matches!(out, DynamicsOutcome::StepLimit { ref trace, .. } if trace.len() == 1));
}

#[test]
fn small_censuses() {
    for (n, k) in [(3usize, 1u32), (4, 1), (3, 2), (4, 2)] {
        let two_k = Rational::from_integer(2 * i64::from(k));
        for kind in GameKind::ALL {
            let c = ne_census(n, k, kind, DEFAULT_PROFILE_BUDGET).unwrap();
            assert_eq!(c.opt, two_k);
            assert_eq!(c.max_ne, Some(two_k), "the directed cycle is among the equilibria");
            assert_eq!(c.pos, Some(Rational::from_integer(1)));
            let cycle = build_directed_cycle(n, k).unwrap();
            assert!(c.equilibria.iter().any(|e| e.profile() == cycle.profile()));
            assert!(c.classes.len() <= c.equilibria.len());
            let min_ne = c.min_ne.unwrap();
            match kind {
                GameKind::MinFlow => {
                    assert!(min_ne >= Rational::from_integer(i64::from(k) + 1));
                    assert!(c.poa.unwrap() <= Rational::new(2 * i64::from(k), i64::from(k) + 1));
                }
                GameKind::AvgFlow => assert!(min_ne > Rational::from_integer(i64::from(k))),
            }
            for e in &c.equilibria {
                assert!(find_cluster(e, u64::from(k) + 1).unwrap().is_some());
            }
        }
    }
}
