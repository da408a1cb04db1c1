//! Generators for the named network families.
//!
//! Node ids are dense. Each generator attaches labels that map ids back to
//! the names used in the construction (`v1..vn`, `a_i`, `b_i`, `c`, ...).

use std::fmt;
use std::str::FromStr;

use crate::dynamics::{evaluate_move, MoveRecord};
use crate::error::{Error, Result};
use crate::games::GameKind;
use crate::network::{check_parameters, Capacity, CapacityNetwork, NodeId};

/// How the social-optimum builder picks its `k` Hamiltonian cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CyclePolicy {
    /// Rotations `i -> i + d (mod n)` for the offsets `d` coprime to `n`,
    /// taken in increasing order and reused round-robin when `k` exceeds
    /// their number.
    #[default]
    RotationOffsets,
    /// The same cycle `i -> i + 1` added `k` times.
    RepeatCanonical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstructionId {
    Opt(CyclePolicy),
    DirectedCycle,
    MinGameWorstNe,
    AvgGameCircleNe,
    AvgGameStarNe,
    Figure1,
}

impl ConstructionId {
    pub const NAMES: [&'static str; 7] = [
        "opt",
        "opt-repeat",
        "directed-cycle",
        "min-worst-ne",
        "avg-circle-ne",
        "avg-star-ne",
        "figure1",
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConstructionId::Opt(CyclePolicy::RotationOffsets) => "opt",
            ConstructionId::Opt(CyclePolicy::RepeatCanonical) => "opt-repeat",
            ConstructionId::DirectedCycle => "directed-cycle",
            ConstructionId::MinGameWorstNe => "min-worst-ne",
            ConstructionId::AvgGameCircleNe => "avg-circle-ne",
            ConstructionId::AvgGameStarNe => "avg-star-ne",
            ConstructionId::Figure1 => "figure1",
        }
    }

    /// Builds the construction; `n` and `k` are ignored for `Figure1`.
    pub fn build(self, n: usize, k: u32) -> Result<CapacityNetwork> {
        match self {
            ConstructionId::Opt(policy) => build_opt(n, k, policy),
            ConstructionId::DirectedCycle => build_directed_cycle(n, k),
            ConstructionId::MinGameWorstNe => build_min_game_worst_ne(n, k),
            ConstructionId::AvgGameCircleNe => build_avg_game_circle_ne(n, k),
            ConstructionId::AvgGameStarNe => build_avg_game_star_ne(n, k),
            ConstructionId::Figure1 => build_figure1(),
        }
    }
}

impl fmt::Display for ConstructionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConstructionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "opt" => ConstructionId::Opt(CyclePolicy::RotationOffsets),
            "opt-repeat" => ConstructionId::Opt(CyclePolicy::RepeatCanonical),
            "directed-cycle" => ConstructionId::DirectedCycle,
            "min-worst-ne" => ConstructionId::MinGameWorstNe,
            "avg-circle-ne" => ConstructionId::AvgGameCircleNe,
            "avg-star-ne" => ConstructionId::AvgGameStarNe,
            "figure1" => ConstructionId::Figure1,
            other => {
                return Err(Error::Argument(format!(
                    "unknown construction '{other}', expected one of {}",
                    ConstructionId::NAMES.join(", ")
                )))
            }
        })
    }
}

fn cycle_parameters(n: usize, k: u32) -> Result<()> {
    check_parameters(n, k)?;
    if n < 3 {
        return Err(Error::Parameter(format!("need at least 3 nodes, got {n}")));
    }
    Ok(())
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Union of `k` directed Hamiltonian cycles, one capacity unit each.
pub fn build_opt(n: usize, k: u32, policy: CyclePolicy) -> Result<CapacityNetwork> {
    cycle_parameters(n, k)?;
    let offsets: Vec<usize> = match policy {
        CyclePolicy::RotationOffsets => (1..n).filter(|&d| gcd(d, n) == 1).collect(),
        CyclePolicy::RepeatCanonical => vec![1],
    };
    let mut capacity = vec![0 as Capacity; n * n];
    for round in 0..k as usize {
        let d = offsets[round % offsets.len()];
        for i in 0..n {
            capacity[i * n + (i + d) % n] += 1;
        }
    }
    let edges: Vec<(NodeId, NodeId, Capacity)> = (0..n * n)
        .filter(|&e| capacity[e] > 0)
        .map(|e| (e / n, e % n, capacity[e]))
        .collect();
    CapacityNetwork::from_edges(n, k, &edges)?.with_labels(numbered("v", n))
}

/// Node `i` owns the edge to `i + 1 (mod n)` with capacity `k`.
pub fn build_directed_cycle(n: usize, k: u32) -> Result<CapacityNetwork> {
    cycle_parameters(n, k)?;
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, k)).collect();
    CapacityNetwork::from_edges(n, k, &edges)?.with_labels(numbered("v", n))
}

/// The min-game equilibrium with edge connectivity exactly `k + 1`.
///
/// With `v_i` at id `i - 1`: for `1 <= i < k`, `(v_i, v_{i+1})` has capacity
/// `k - (i - 1)` and `(v_{i+1}, v_i)` capacity `i`; `(v_k, v_n)` has capacity 1;
/// for `k <= i <= n - 1`, `(v_{i+1}, v_i)` has capacity `k`.
pub fn build_min_game_worst_ne(n: usize, k: u32) -> Result<CapacityNetwork> {
    check_parameters(n, k)?;
    let kk = k as usize;
    let v = |i: usize| i - 1;
    let mut edges = Vec::new();
    for i in 1..kk {
        edges.push((v(i), v(i + 1), k - (i as u32 - 1)));
        edges.push((v(i + 1), v(i), i as u32));
    }
    edges.push((v(kk), v(n), 1));
    for i in kk..n {
        edges.push((v(i + 1), v(i), k));
    }
    CapacityNetwork::from_edges(n, k, &edges)?.with_labels(numbered("v", n))
}

/// The improving move for `v_2` in the average game on
/// [`build_min_game_worst_ne`]: one unit moves from `(v_2, v_1)` to
/// `(v_2, v_n)`. Needs `k >= 2` so that `v_2` owns `(v_2, v_1)`.
pub fn min_game_worst_ne_avg_witness(net: &CapacityNetwork) -> Result<MoveRecord> {
    let (n, k) = (net.n(), net.k());
    if k < 2 {
        return Err(Error::Parameter("the v2 witness needs k >= 2".into()));
    }
    let (v1, v2, vn) = (0, 1, n - 1);
    let after = net.strategy(v2).adjusted(v1, -1)?.adjusted(vn, 1)?;
    evaluate_move(net, after, GameKind::AvgFlow)
}

/// `k` circle nodes, each owning a capacity-`k` edge to its successor; every
/// other node owns a unit edge to each circle node.
pub fn build_avg_game_circle_ne(n: usize, k: u32) -> Result<CapacityNetwork> {
    check_parameters(n, k)?;
    if k < 2 {
        return Err(Error::Parameter(format!(
            "the circle construction needs k >= 2, got {k}"
        )));
    }
    let kk = k as usize;
    let mut edges = Vec::new();
    for i in 0..kk {
        edges.push((i, (i + 1) % kk, k));
    }
    for outer in kk..n {
        for c in 0..kk {
            edges.push((outer, c, 1));
        }
    }
    let mut labels = numbered("c", kk);
    labels.extend(numbered("u", n - kk));
    CapacityNetwork::from_edges(n, k, &edges)?.with_labels(labels)
}

/// The star-like average-game equilibrium with social utility `k + 1`.
///
/// Ids: `c` is 0, `a_1..a_{k-1}` are `1..k-1`, `b_1..b_{n-k}` are `k..n-1`.
pub fn build_avg_game_star_ne(n: usize, k: u32) -> Result<CapacityNetwork> {
    check_parameters(n, k)?;
    let kk = k as usize;
    if n < kk + 2 {
        return Err(Error::Parameter(format!(
            "the star construction needs n >= k + 2, got n = {n}, k = {k}"
        )));
    }
    let c = 0;
    let a = |i: usize| i;
    let b = |i: usize| kk - 1 + i;
    let m = n - kk;
    let mut edges = Vec::new();
    for i in 1..kk {
        edges.push((c, a(i), 1));
        edges.push((a(i), c, k));
    }
    edges.push((c, b(1), 1));
    for i in 1..m {
        edges.push((b(i), c, k - 1));
        edges.push((b(i), b(i + 1), 1));
    }
    edges.push((b(m), c, k));
    let mut labels = vec!["c".to_string()];
    labels.extend(numbered("a", kk - 1));
    labels.extend(numbered("b", m));
    CapacityNetwork::from_edges(n, k, &edges)?.with_labels(labels)
}

/// The four-agent, `k = 2` example with agents `v, x, y, z` at ids `0..4`.
pub fn build_figure1() -> Result<CapacityNetwork> {
    let (v, x, y, z) = (0, 1, 2, 3);
    CapacityNetwork::from_edges(
        4,
        2,
        &[
            (v, x, 1),
            (v, z, 1),
            (x, v, 1),
            (x, z, 1),
            (y, x, 1),
            (y, z, 1),
            (z, y, 2),
        ],
    )?
    .with_labels(["v", "x", "y", "z"].map(String::from).to_vec())
}
