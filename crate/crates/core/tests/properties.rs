use proptest::prelude::*;

use flowncg::analysis::find_cluster;
use flowncg::canon::{are_isomorphic, canonical_form};
use flowncg::connectivity::{
    all_pairs_connectivity, cut_capacity, global_connectivity, local_connectivity, min_cut_partition, naive_all_pairs,
};
use flowncg::dynamics::{best_response, is_nash, replay_trace, run_dynamics, DynamicsOutcome, Scheduler};
use flowncg::games::{agent_utility, all_utilities, compare, social_utility, UtilityValue};
use flowncg::io::{network_from_json, network_to_json, trace_from_json, trace_to_json};
use flowncg::space::{enumerate_strategies, strategy_count};
use flowncg::{CapacityNetwork, GameKind, Rational, Strategy as AgentStrategy, StrategyProfile};

/// Each agent buys up to `k` unit edges, given as offsets among the other
/// `n - 1` nodes; repeated offsets stack.
fn network(max_n: usize) -> impl Strategy<Value = CapacityNetwork> {
    (2..=max_n)
        .prop_flat_map(|n| (Just(n), 1..n as u32))
        .prop_flat_map(|(n, k)| {
            (
                Just(n),
                Just(k),
                proptest::collection::vec(proptest::collection::vec(0..n - 1, 0..=k as usize), n),
            )
        })
        .prop_map(|(n, k, buys)| {
            let mut edges = Vec::new();
            for (v, offsets) in buys.iter().enumerate() {
                let mut caps = vec![0u32; n];
                for &o in offsets {
                    caps[if o >= v { o + 1 } else { o }] += 1;
                }
                edges.extend(caps.iter().enumerate().filter(|(_, &c)| c > 0).map(|(t, &c)| (v, t, c)));
            }
            CapacityNetwork::from_edges(n, k, &edges).unwrap()
        })
}

fn brute_force_cut(net: &CapacityNetwork, u: usize, v: usize) -> u64 {
    let n = net.n();
    (0u32..1 << n)
        .filter(|m| m & (1 << u) != 0 && m & (1 << v) == 0)
        .map(|m| {
            let side: Vec<bool> = (0..n).map(|i| m >> i & 1 == 1).collect();
            cut_capacity(net, &side)
        })
        .min()
        .unwrap()
}

fn permuted(net: &CapacityNetwork, perm: &[usize]) -> CapacityNetwork {
    let edges: Vec<_> = net.edges().map(|(a, b, c)| (perm[a], perm[b], c)).collect();
    CapacityNetwork::from_edges(net.n(), net.k(), &edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn undirected_view_and_degrees(net in network(7)) {
        let n = net.n();
        let mut degree_sum = 0;
        for u in 0..n {
            let mut deg = 0;
            for v in 0..n {
                prop_assert_eq!(net.capacity(u, v), u64::from(net.directed_capacity(u, v)) + u64::from(net.directed_capacity(v, u)));
                deg += net.capacity(u, v);
            }
            prop_assert_eq!(net.degree(u), deg);
            degree_sum += deg;
        }
        prop_assert_eq!(degree_sum, 2 * net.total_capacity());
        prop_assert!(degree_sum <= 2 * n as u64 * u64::from(net.k()));
    }

    #[test]
    fn profile_round_trips(net in network(7)) {
        let rebuilt = CapacityNetwork::build(net.profile().clone()).unwrap();
        prop_assert_eq!(&rebuilt, &net);
        prop_assert_eq!(network_from_json(&network_to_json(&net)).unwrap(), net.clone());
        for v in 0..net.n() {
            prop_assert_eq!(net.apply_strategy(v, net.strategy(v).clone()).unwrap(), net.clone());
        }
    }

    #[test]
    fn max_flow_equals_min_cut(net in network(7)) {
        let tree = all_pairs_connectivity(&net);
        let naive = naive_all_pairs(&net);
        for u in 0..net.n() {
            for v in 0..net.n() {
                if u == v {
                    continue;
                }
                let l = local_connectivity(&net, u, v).unwrap();
                prop_assert_eq!(l, brute_force_cut(&net, u, v));
                prop_assert_eq!(l, local_connectivity(&net, v, u).unwrap());
                prop_assert_eq!(tree.connectivity(u, v), l);
                prop_assert_eq!(naive.get(u, v), l);
                prop_assert!(l <= net.degree(u).min(net.degree(v)));
            }
        }
    }

    #[test]
    fn gomory_hu_tree_is_spanning(net in network(7)) {
        let tree = all_pairs_connectivity(&net);
        let n = net.n();
        let edges: Vec<_> = tree.edges().collect();
        prop_assert_eq!(edges.len(), n - 1);
        // union-find over tree edges: n - 1 edges joining n nodes means a tree
        let mut root: Vec<usize> = (0..n).collect();
        fn find(root: &mut Vec<usize>, x: usize) -> usize {
            if root[x] != x {
                let r = find(root, root[x]);
                root[x] = r;
            }
            root[x]
        }
        for (a, b, _) in edges {
            let (ra, rb) = (find(&mut root, a), find(&mut root, b));
            prop_assert_ne!(ra, rb);
            root[ra] = rb;
        }
    }

    #[test]
    fn triangle_property(net in network(6)) {
        let m = all_pairs_connectivity(&net).matrix();
        let n = net.n();
        for u in 0..n {
            for v in 0..n {
                for w in 0..n {
                    if u != v && v != w && u != w {
                        prop_assert!(m.get(u, w) >= m.get(u, v).min(m.get(v, w)));
                    }
                }
            }
        }
    }

    #[test]
    fn global_cut_is_a_minimum(net in network(7)) {
        let g = global_connectivity(&net);
        let (left, right) = min_cut_partition(&net);
        prop_assert!(!left.is_empty() && !right.is_empty());
        prop_assert_eq!(left.len() + right.len(), net.n());
        let mut side = vec![false; net.n()];
        for &v in &left {
            side[v] = true;
        }
        prop_assert_eq!(cut_capacity(&net, &side), g);
        prop_assert_eq!(g == 0, !net.is_connected());
        let brute = (1..net.n()).map(|v| brute_force_cut(&net, 0, v)).min().unwrap();
        prop_assert_eq!(g, brute);
    }

    #[test]
    fn adding_capacity_never_hurts(net in network(6), pick in any::<prop::sample::Index>(), to in any::<prop::sample::Index>()) {
        let n = net.n();
        let spare: Vec<usize> = (0..n).filter(|&v| net.strategy(v).spent() < u64::from(net.k())).collect();
        prop_assume!(!spare.is_empty());
        let v = spare[pick.index(spare.len())];
        let mut t = to.index(n - 1);
        if t >= v {
            t += 1;
        }
        let richer = net.apply_strategy(v, net.strategy(v).adjusted(t, 1).unwrap()).unwrap();
        let (before, after) = (all_pairs_connectivity(&net).matrix(), all_pairs_connectivity(&richer).matrix());
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    prop_assert!(after.get(a, b) >= before.get(a, b));
                }
            }
        }
        let gain = compare(
            &agent_utility(&richer, v, GameKind::AvgFlow).unwrap(),
            &agent_utility(&net, v, GameKind::AvgFlow).unwrap(),
        ).unwrap();
        prop_assert!(gain.is_ge());
    }

    #[test]
    fn utility_bounds(net in network(7)) {
        let n = net.n();
        let two_k = Rational::from_integer(2 * i64::from(net.k()));
        let g = global_connectivity(&net);
        prop_assert!(social_utility(&net, GameKind::AvgFlow) <= two_k);
        let min_degree = (0..n).map(|v| net.degree(v)).min().unwrap();
        prop_assert!(social_utility(&net, GameKind::MinFlow) <= Rational::from_integer(min_degree as i64));
        prop_assert!(min_degree <= 2 * u64::from(net.k()));
        let m = all_pairs_connectivity(&net).matrix();
        for (v, u) in all_utilities(&net, GameKind::MinFlow).into_iter().enumerate() {
            let UtilityValue::Min { connectivity, well_connected } = u else {
                panic!("min game produced {u:?}");
            };
            prop_assert_eq!(connectivity, g);
            prop_assert!(well_connected < n);
            let expected = (0..n).filter(|&i| i != v && m.get(i, v) > g).count();
            prop_assert_eq!(well_connected, expected);
        }
        for (v, u) in all_utilities(&net, GameKind::AvgFlow).into_iter().enumerate() {
            let sum: u64 = (0..n).filter(|&i| i != v).map(|i| m.get(v, i)).sum();
            prop_assert_eq!(u, UtilityValue::Avg(Rational::new(sum as i64, n as i64 - 1)));
        }
    }

    #[test]
    fn best_response_beats_every_strategy(net in network(5), pick in any::<prop::sample::Index>(), min_game in any::<bool>()) {
        let kind = if min_game { GameKind::MinFlow } else { GameKind::AvgFlow };
        let v = pick.index(net.n());
        let current = agent_utility(&net, v, kind).unwrap();
        let (best, best_utility) = best_response(&net, v, kind).unwrap();
        prop_assert!(compare(&best_utility, &current).unwrap().is_ge());
        let mut count = 0u128;
        let mut smallest_optimal: Option<AgentStrategy> = None;
        for s in enumerate_strategies(net.n(), net.k(), v).unwrap() {
            count += 1;
            let u = agent_utility(&net.apply_strategy(v, s.clone()).unwrap(), v, kind).unwrap();
            let ord = compare(&u, &best_utility).unwrap();
            prop_assert!(ord.is_le(), "{:?} beats the best response", s);
            if ord.is_eq() && smallest_optimal.as_ref().is_none_or(|m| &s < m) {
                smallest_optimal = Some(s);
            }
        }
        prop_assert_eq!(count, strategy_count(net.n(), net.k()));
        if compare(&current, &best_utility).unwrap().is_eq() {
            prop_assert_eq!(&best, net.strategy(v));
        } else {
            prop_assert_eq!(Some(best), smallest_optimal);
        }
    }

    #[test]
    fn dynamics_outcomes_are_sound(net in network(5), seed in 0u64..1000, sched in 0usize..3, min_game in any::<bool>()) {
        let kind = if min_game { GameKind::MinFlow } else { GameKind::AvgFlow };
        let scheduler = Scheduler::ALL[sched];
        let out = run_dynamics(&net, kind, scheduler, 400, seed).unwrap();
        prop_assert_eq!(&run_dynamics(&net, kind, scheduler, 400, seed).unwrap(), &out);
        let end = replay_trace(&net, kind, out.trace()).unwrap();
        prop_assert_eq!(&end, out.network());
        let parsed = trace_from_json(&trace_to_json(out.trace())).unwrap();
        prop_assert_eq!(parsed.as_slice(), out.trace());
        match &out {
            DynamicsOutcome::ReachedNe { network, .. } => {
                prop_assert!(is_nash(network, kind).unwrap().is_equilibrium());
                let k = u64::from(network.k());
                prop_assert!((0..network.n()).all(|v| network.strategy(v).spent() == k));
                prop_assert!(network.is_connected());
                prop_assert!(find_cluster(network, k + 1).unwrap().is_some());
                match kind {
                    GameKind::MinFlow => prop_assert!(global_connectivity(network) > k),
                    GameKind::AvgFlow if k >= 2 => prop_assert!(global_connectivity(network) >= k),
                    GameKind::AvgFlow => {}
                }
            }
            DynamicsOutcome::RevisitedState { network, trace, first_occurrence } => {
                let mut state = net.clone();
                for m in &trace[..*first_occurrence] {
                    state = state.apply_strategy(m.agent, m.after.clone()).unwrap();
                }
                prop_assert_eq!(state.profile(), network.profile());
            }
            DynamicsOutcome::StepLimit { trace, .. } => prop_assert!(trace.len() <= 400),
        }
    }

    #[test]
    fn canonical_form_ignores_labels(net in network(6), perm_seed in any::<prop::sample::Index>()) {
        let n = net.n();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut r = perm_seed.index(usize::MAX);
        for i in (1..n).rev() {
            perm.swap(i, r % (i + 1));
            r /= i + 1;
        }
        let other = permuted(&net, &perm);
        prop_assert_eq!(canonical_form(&net).unwrap(), canonical_form(&other).unwrap());
        prop_assert!(are_isomorphic(&net, &other).unwrap());
        let back = canonical_form(&net).unwrap().to_network().unwrap();
        prop_assert!(are_isomorphic(&net, &back).unwrap());
        prop_assert_eq!(global_connectivity(&net), global_connectivity(&other));
    }

    #[test]
    fn profiles_reject_overspending(n in 2usize..7, extra in 1u32..3) {
        let k = (n as u32 - 1).max(1);
        let s = AgentStrategy::from_capacities(0, &{
            let mut caps = vec![0u32; n];
            caps[1] = k + extra;
            caps
        });
        let mut strategies: Vec<AgentStrategy> = (0..n).map(AgentStrategy::empty).collect();
        strategies[0] = s.unwrap();
        prop_assert!(StrategyProfile::new(n, k, strategies).is_err());
    }
}
