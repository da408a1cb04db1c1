//! Best responses, equilibrium checks and improving-response dynamics.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::canon::canonical_form;
use crate::error::{Error, Result};
use crate::games::{agent_utility, compare, GameKind, UtilityValue};
use crate::network::{CapacityNetwork, NodeId, Strategy, StrategyProfile};
use crate::space::enumerate_strategies;

/// One unilateral strategy change.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveRecord {
    pub agent: NodeId,
    pub before: Strategy,
    pub after: Strategy,
    pub utility_before: UtilityValue,
    pub utility_after: UtilityValue,
}

impl MoveRecord {
    pub fn is_improving(&self) -> bool {
        matches!(
            compare(&self.utility_after, &self.utility_before),
            Ok(std::cmp::Ordering::Greater)
        )
    }
}

/// A utility-maximizing strategy for `v` with everybody else fixed.
///
/// Ties keep the current strategy when it is optimal, so equilibria are fixed
/// points. Otherwise the optimum with the smallest `(target, capacity)`
/// encoding wins.
pub fn best_response(net: &CapacityNetwork, v: NodeId, kind: GameKind) -> Result<(Strategy, UtilityValue)> {
    let current = net.strategy(v).clone();
    let mut best_utility = agent_utility(net, v, kind)?;
    let mut best = current.clone();
    for candidate in enumerate_strategies(net.n(), net.k(), v)? {
        if candidate == current {
            continue;
        }
        let utility = agent_utility(&net.apply_strategy(v, candidate.clone())?, v, kind)?;
        match compare(&utility, &best_utility)? {
            std::cmp::Ordering::Greater => {
                best = candidate;
                best_utility = utility;
            }
            std::cmp::Ordering::Equal if best != current && candidate < best => best = candidate,
            _ => {}
        }
    }
    Ok((best, best_utility))
}

/// Every strictly improving strategy change available to `v`, in enumeration
/// order.
pub fn improving_moves(net: &CapacityNetwork, v: NodeId, kind: GameKind) -> Result<Vec<MoveRecord>> {
    let before = net.strategy(v).clone();
    let utility_before = agent_utility(net, v, kind)?;
    let mut out = Vec::new();
    for after in enumerate_strategies(net.n(), net.k(), v)? {
        let utility_after = agent_utility(&net.apply_strategy(v, after.clone())?, v, kind)?;
        if compare(&utility_after, &utility_before)?.is_gt() {
            out.push(MoveRecord {
                agent: v,
                before: before.clone(),
                after,
                utility_before: utility_before.clone(),
                utility_after,
            });
        }
    }
    Ok(out)
}

/// Evaluates a specific strategy change without requiring it to improve.
pub fn evaluate_move(net: &CapacityNetwork, after: Strategy, kind: GameKind) -> Result<MoveRecord> {
    let v = after.owner();
    let utility_before = agent_utility(net, v, kind)?;
    let utility_after = agent_utility(&net.apply_strategy(v, after.clone())?, v, kind)?;
    Ok(MoveRecord {
        agent: v,
        before: net.strategy(v).clone(),
        after,
        utility_before,
        utility_after,
    })
}

/// `v`'s best-response move, if it strictly improves.
pub fn improving_best_response(net: &CapacityNetwork, v: NodeId, kind: GameKind) -> Result<Option<MoveRecord>> {
    let utility_before = agent_utility(net, v, kind)?;
    let (after, utility_after) = best_response(net, v, kind)?;
    if compare(&utility_after, &utility_before)?.is_gt() {
        Ok(Some(MoveRecord {
            agent: v,
            before: net.strategy(v).clone(),
            after,
            utility_before,
            utility_after,
        }))
    } else {
        Ok(None)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NashVerdict {
    Equilibrium,
    /// The best-response move of the lowest-numbered agent that can improve.
    Improvable(MoveRecord),
}

impl NashVerdict {
    pub fn is_equilibrium(&self) -> bool {
        matches!(self, NashVerdict::Equilibrium)
    }

    pub fn witness(&self) -> Option<&MoveRecord> {
        match self {
            NashVerdict::Equilibrium => None,
            NashVerdict::Improvable(m) => Some(m),
        }
    }
}

/// Exhaustive check that no agent has an improving move.
pub fn is_nash(net: &CapacityNetwork, kind: GameKind) -> Result<NashVerdict> {
    for v in 0..net.n() {
        if let Some(m) = improving_best_response(net, v, kind)? {
            return Ok(NashVerdict::Improvable(m));
        }
    }
    Ok(NashVerdict::Equilibrium)
}

/// Which agent moves next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheduler {
    /// Agents `0, 1, ..., n-1, 0, ...`.
    RoundRobin,
    /// A fresh seeded shuffle of all agents every round.
    RandomPermutation,
    /// The lowest-numbered agent that has an improving move.
    FirstImproving,
}

impl Scheduler {
    pub const ALL: [Scheduler; 3] = [
        Scheduler::RoundRobin,
        Scheduler::RandomPermutation,
        Scheduler::FirstImproving,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheduler::RoundRobin => "round-robin",
            Scheduler::RandomPermutation => "random",
            Scheduler::FirstImproving => "first-improving",
        }
    }
}

impl fmt::Display for Scheduler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheduler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheduler::ALL.into_iter().find(|sch| sch.name() == s).ok_or_else(|| {
            Error::Argument(format!(
                "unknown scheduler '{s}', expected round-robin, random or first-improving"
            ))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DynamicsOutcome {
    ReachedNe {
        network: CapacityNetwork,
        trace: Vec<MoveRecord>,
    },
    /// The state after the last move equals the state after move
    /// `first_occurrence` (0 is the start), so `trace[first_occurrence..]` is
    /// an improving-response cycle.
    RevisitedState {
        network: CapacityNetwork,
        trace: Vec<MoveRecord>,
        first_occurrence: usize,
    },
    StepLimit {
        network: CapacityNetwork,
        trace: Vec<MoveRecord>,
    },
}

impl DynamicsOutcome {
    pub fn trace(&self) -> &[MoveRecord] {
        match self {
            DynamicsOutcome::ReachedNe { trace, .. }
            | DynamicsOutcome::RevisitedState { trace, .. }
            | DynamicsOutcome::StepLimit { trace, .. } => trace,
        }
    }

    pub fn network(&self) -> &CapacityNetwork {
        match self {
            DynamicsOutcome::ReachedNe { network, .. }
            | DynamicsOutcome::RevisitedState { network, .. }
            | DynamicsOutcome::StepLimit { network, .. } => network,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            DynamicsOutcome::ReachedNe { .. } => "reached-ne",
            DynamicsOutcome::RevisitedState { .. } => "revisited-state",
            DynamicsOutcome::StepLimit { .. } => "step-limit",
        }
    }
}

/// Best-response dynamics from `start`.
///
/// A step is one agent activation. The run stops when every agent has been
/// activated without moving since the last move (an equilibrium), when a move
/// produces a labeled state seen before, or after `step_limit` activations.
/// The result depends only on the arguments.
pub fn run_dynamics(
    start: &CapacityNetwork,
    kind: GameKind,
    scheduler: Scheduler,
    step_limit: usize,
    seed: u64,
) -> Result<DynamicsOutcome> {
    let n = start.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut round: Vec<NodeId> = Vec::new();
    let mut network = start.clone();
    let mut trace = Vec::new();
    let mut seen: HashMap<StrategyProfile, usize> = HashMap::from([(start.profile().clone(), 0)]);
    let mut idle = vec![false; n];
    let mut idle_count = 0;
    let mut rr_next = 0;

    for _ in 0..step_limit {
        let step_move = match scheduler {
            Scheduler::FirstImproving => {
                let mut found = None;
                for v in 0..n {
                    if let Some(m) = improving_best_response(&network, v, kind)? {
                        found = Some(m);
                        break;
                    }
                }
                match found {
                    Some(m) => m,
                    None => return Ok(DynamicsOutcome::ReachedNe { network, trace }),
                }
            }
            Scheduler::RoundRobin | Scheduler::RandomPermutation => {
                let v = if scheduler == Scheduler::RoundRobin {
                    let v = rr_next;
                    rr_next = (rr_next + 1) % n;
                    v
                } else {
                    if round.is_empty() {
                        round = (0..n).collect();
                        round.shuffle(&mut rng);
                        round.reverse();
                    }
                    round.pop().expect("round refilled")
                };
                match improving_best_response(&network, v, kind)? {
                    Some(m) => m,
                    None => {
                        if !idle[v] {
                            idle[v] = true;
                            idle_count += 1;
                        }
                        if idle_count == n {
                            return Ok(DynamicsOutcome::ReachedNe { network, trace });
                        }
                        continue;
                    }
                }
            }
        };
        network = network.apply_strategy(step_move.agent, step_move.after.clone())?;
        trace.push(step_move);
        idle.iter_mut().for_each(|x| *x = false);
        idle_count = 0;
        if let Some(&first) = seen.get(network.profile()) {
            return Ok(DynamicsOutcome::RevisitedState {
                network,
                trace,
                first_occurrence: first,
            });
        }
        seen.insert(network.profile().clone(), trace.len());
    }
    Ok(DynamicsOutcome::StepLimit { network, trace })
}

/// Replays `trace` from `start`, checking that every move starts from the
/// mover's current strategy, reports the utilities it actually produces, and
/// strictly improves. Returns the final network.
pub fn replay_trace(start: &CapacityNetwork, kind: GameKind, trace: &[MoveRecord]) -> Result<CapacityNetwork> {
    let mut network = start.clone();
    for (index, m) in trace.iter().enumerate() {
        let reject = |reason: String| Error::Trace { index, reason };
        if m.agent >= network.n() || m.before.owner() != m.agent || m.after.owner() != m.agent {
            return Err(reject("move is not owned by its agent".into()));
        }
        if network.strategy(m.agent) != &m.before {
            return Err(reject(format!(
                "agent {} does not currently play the recorded 'before' strategy",
                m.agent
            )));
        }
        let recorded = evaluate_move(&network, m.after.clone(), kind).map_err(|e| reject(e.to_string()))?;
        if recorded.utility_before != m.utility_before || recorded.utility_after != m.utility_after {
            return Err(reject(format!(
                "recorded utilities {} -> {} differ from recomputed {} -> {}",
                m.utility_before, m.utility_after, recorded.utility_before, recorded.utility_after
            )));
        }
        if !recorded.is_improving() {
            return Err(reject("move is not strictly improving".into()));
        }
        network = network.apply_strategy(m.agent, m.after.clone())?;
    }
    Ok(network)
}

/// Checks that `cycle` is a non-empty improving-response cycle that returns
/// to exactly the labeled state `start`.
pub fn verify_cycle(start: &CapacityNetwork, kind: GameKind, cycle: &[MoveRecord]) -> Result<()> {
    if cycle.is_empty() {
        return Err(Error::Argument(
            "an improving-response cycle needs at least one move".into(),
        ));
    }
    let end = replay_trace(start, kind, cycle)?;
    if end.profile() != start.profile() {
        return Err(Error::Trace {
            index: cycle.len() - 1,
            reason: "cycle does not return to its labeled start state".into(),
        });
    }
    Ok(())
}

/// Diagnostic: the first pair `(i, j)`, `i < j`, of states along the trace
/// (0 is `start`) that are isomorphic, ignoring labels.
pub fn first_isomorphic_repeat(start: &CapacityNetwork, trace: &[MoveRecord]) -> Result<Option<(usize, usize)>> {
    let mut forms = HashMap::new();
    let mut network = start.clone();
    forms.insert(canonical_form(&network)?, 0);
    for (i, m) in trace.iter().enumerate() {
        network = network.apply_strategy(m.agent, m.after.clone())?;
        let form = canonical_form(&network)?;
        if let Some(&first) = forms.get(&form) {
            return Ok(Some((first, i + 1)));
        }
        forms.insert(form, i + 1);
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::build_directed_cycle;

    #[test]
    fn two_nodes_buy_the_missing_edge() {
        let net = CapacityNetwork::from_edges(2, 1, &[(0, 1, 1)]).unwrap();
        let (s, u) = best_response(&net, 1, GameKind::MinFlow).unwrap();
        assert_eq!(s.purchases(), &[(0, 1)]);
        assert_eq!(
            u,
            UtilityValue::Min {
                connectivity: 2,
                well_connected: 0
            }
        );
    }

    #[test]
    fn cycle_is_a_fixed_point() {
        let net = build_directed_cycle(4, 2).unwrap();
        for kind in GameKind::ALL {
            let (s, _) = best_response(&net, 1, kind).unwrap();
            assert_eq!(&s, net.strategy(1));
            assert!(is_nash(&net, kind).unwrap().is_equilibrium());
        }
    }

    #[test]
    fn edgeless_network_is_not_an_equilibrium() {
        let net = CapacityNetwork::empty(3, 1).unwrap();
        for kind in GameKind::ALL {
            let verdict = is_nash(&net, kind).unwrap();
            let w = verdict.witness().expect("buying an edge improves");
            assert!(w.is_improving());
            assert_eq!(w.agent, 0);
        }
    }

    #[test]
    fn tie_break_prefers_smallest_encoding() {
        // In the empty 3-node avg game, buying (1,1) and (2,1) are equally good
        // for agent 0; the smaller encoding must win.
        let net = CapacityNetwork::empty(3, 1).unwrap();
        let (s, _) = best_response(&net, 0, GameKind::AvgFlow).unwrap();
        assert_eq!(s.purchases(), &[(1, 1)]);
    }

    #[test]
    fn dynamics_from_a_cycle_stops_immediately() {
        let net = build_directed_cycle(5, 2).unwrap();
        for scheduler in Scheduler::ALL {
            let out = run_dynamics(&net, GameKind::MinFlow, scheduler, 100, 0).unwrap();
            assert_eq!(out.label(), "reached-ne");
            assert!(out.trace().is_empty());
        }
    }

    #[test]
    fn replay_rejects_tampering() {
        let start = CapacityNetwork::empty(3, 1).unwrap();
        let out = run_dynamics(&start, GameKind::AvgFlow, Scheduler::RoundRobin, 50, 0).unwrap();
        assert!(!out.trace().is_empty());
        assert_eq!(
            &replay_trace(&start, GameKind::AvgFlow, out.trace()).unwrap(),
            out.network()
        );

        let mut bad = out.trace().to_vec();
        bad[0].utility_after = bad[0].utility_before.clone();
        assert!(matches!(
            replay_trace(&start, GameKind::AvgFlow, &bad),
            Err(Error::Trace { index: 0, .. })
        ));
    }

    #[test]
    fn scheduler_names() {
        for s in Scheduler::ALL {
            assert_eq!(s.name().parse::<Scheduler>().unwrap(), s);
        }
    }
}
