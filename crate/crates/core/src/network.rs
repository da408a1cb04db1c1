//! Strategy profiles and the capacitated networks they induce.
//!
//! Every agent owns the directed edges it buys. Flows and cuts never look at
//! edge direction: they run on the undirected view, where the capacity of
//! `{u, v}` is `c(u, v) + c(v, u)`. A [`CapacityNetwork`] stores both, and is
//! in one-to-one correspondence with its [`StrategyProfile`].

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type Capacity = u32;

/// The edges one agent buys: a set of `(target, capacity)` pairs, kept sorted
/// by target, every capacity at least 1.
///
/// The derived ordering compares owners first and then the purchase lists
/// lexicographically, which is the tie-break order used by best responses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Strategy {
    owner: NodeId,
    purchases: Vec<(NodeId, Capacity)>,
}

impl Strategy {
    pub fn empty(owner: NodeId) -> Self {
        Strategy {
            owner,
            purchases: Vec::new(),
        }
    }

    /// Builds a strategy, rejecting self-loops, zero capacities and repeated
    /// targets. Range and budget checks need `n` and `k`; they happen when the
    /// strategy joins a [`StrategyProfile`].
    pub fn new(owner: NodeId, purchases: impl IntoIterator<Item = (NodeId, Capacity)>) -> Result<Self> {
        let mut purchases: Vec<(NodeId, Capacity)> = purchases.into_iter().collect();
        purchases.sort_unstable();
        for (i, &(target, capacity)) in purchases.iter().enumerate() {
            if target == owner {
                return Err(Error::infeasible(owner, "edge to itself"));
            }
            if capacity == 0 {
                return Err(Error::infeasible(owner, format!("zero capacity towards node {target}")));
            }
            if i > 0 && purchases[i - 1].0 == target {
                return Err(Error::infeasible(owner, format!("node {target} is targeted twice")));
            }
        }
        Ok(Strategy { owner, purchases })
    }

    /// Builds a strategy from a dense capacity vector indexed by target.
    /// Entries at the owner's own index must be zero.
    pub fn from_capacities(owner: NodeId, capacities: &[Capacity]) -> Result<Self> {
        Strategy::new(
            owner,
            capacities
                .iter()
                .enumerate()
                .filter(|&(_, &c)| c > 0)
                .map(|(t, &c)| (t, c)),
        )
    }

    pub fn owner(&self) -> NodeId {
        self.owner
    }

    pub fn purchases(&self) -> &[(NodeId, Capacity)] {
        &self.purchases
    }

    pub fn is_empty(&self) -> bool {
        self.purchases.is_empty()
    }

    pub fn capacity_to(&self, target: NodeId) -> Capacity {
        match self.purchases.binary_search_by_key(&target, |&(t, _)| t) {
            Ok(i) => self.purchases[i].1,
            Err(_) => 0,
        }
    }

    /// Total budget spent.
    pub fn spent(&self) -> u64 {
        self.purchases.iter().map(|&(_, c)| u64::from(c)).sum()
    }

    /// Returns the strategy with the capacity towards `target` changed by
    /// `delta`. Reducing to zero deletes the edge.
    pub fn adjusted(&self, target: NodeId, delta: i64) -> Result<Strategy> {
        let current = i64::from(self.capacity_to(target));
        let updated = current + delta;
        if updated < 0 {
            return Err(Error::infeasible(
                self.owner,
                format!("cannot reduce capacity towards node {target} below zero"),
            ));
        }
        let updated = Capacity::try_from(updated).map_err(|_| Error::Overflow)?;
        let rest = self.purchases.iter().copied().filter(|&(t, _)| t != target);
        if updated == 0 {
            Strategy::new(self.owner, rest)
        } else {
            Strategy::new(self.owner, rest.chain(std::iter::once((target, updated))))
        }
    }
}

/// One strategy per agent, together with the agent count `n` and the uniform
/// budget `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StrategyProfile {
    n: usize,
    k: u32,
    strategies: Vec<Strategy>,
}

pub(crate) fn check_parameters(n: usize, k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::Parameter("budget k must be at least 1".into()));
    }
    if k as usize >= n {
        return Err(Error::Parameter(format!(
            "budget k = {k} must be smaller than the agent count n = {n}"
        )));
    }
    Ok(())
}

impl StrategyProfile {
    pub fn new(n: usize, k: u32, strategies: Vec<Strategy>) -> Result<Self> {
        check_parameters(n, k)?;
        if strategies.len() != n {
            return Err(Error::Parameter(format!(
                "expected {n} strategies, got {}",
                strategies.len()
            )));
        }
        for (v, strategy) in strategies.iter().enumerate() {
            if strategy.owner != v {
                return Err(Error::infeasible(
                    v,
                    format!("strategy at position {v} is owned by {}", strategy.owner),
                ));
            }
            validate_strategy(n, k, strategy)?;
        }
        Ok(StrategyProfile { n, k, strategies })
    }

    /// The profile where nobody buys anything.
    pub fn empty(n: usize, k: u32) -> Result<Self> {
        StrategyProfile::new(n, k, (0..n).map(Strategy::empty).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn strategies(&self) -> &[Strategy] {
        &self.strategies
    }

    pub fn strategy(&self, v: NodeId) -> &Strategy {
        &self.strategies[v]
    }

    /// `(s'_v, s_{-v})`.
    pub fn with_strategy(&self, new: Strategy) -> Result<Self> {
        let v = new.owner;
        if v >= self.n {
            return Err(Error::infeasible(v, format!("agent out of range 0..{}", self.n)));
        }
        validate_strategy(self.n, self.k, &new)?;
        let mut strategies = self.strategies.clone();
        strategies[v] = new;
        Ok(StrategyProfile {
            n: self.n,
            k: self.k,
            strategies,
        })
    }
}

/// Range and budget checks for a strategy in an `(n, k)` game.
pub fn validate_strategy(n: usize, k: u32, strategy: &Strategy) -> Result<()> {
    let owner = strategy.owner;
    if owner >= n {
        return Err(Error::infeasible(owner, format!("agent out of range 0..{n}")));
    }
    let mut spent: u64 = 0;
    for &(target, capacity) in &strategy.purchases {
        if target >= n {
            return Err(Error::infeasible(owner, format!("target {target} out of range 0..{n}")));
        }
        spent = spent.checked_add(u64::from(capacity)).ok_or(Error::Overflow)?;
    }
    if spent > u64::from(k) {
        return Err(Error::infeasible(
            owner,
            format!("spends {spent} but the budget is {k}"),
        ));
    }
    Ok(())
}

/// The directed network `G(s)` of a profile plus its undirected flow view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityNetwork {
    profile: StrategyProfile,
    /// Symmetric `n * n` matrix of undirected capacities.
    undirected: Vec<u64>,
    labels: Option<Vec<String>>,
}

impl CapacityNetwork {
    pub fn build(profile: StrategyProfile) -> Result<Self> {
        let n = profile.n;
        let mut undirected = vec![0u64; n * n];
        for strategy in &profile.strategies {
            let v = strategy.owner;
            for &(x, c) in &strategy.purchases {
                let c = u64::from(c);
                let slot = &mut undirected[v * n + x];
                *slot = slot.checked_add(c).ok_or(Error::Overflow)?;
                undirected[x * n + v] = *slot;
            }
        }
        Ok(CapacityNetwork {
            profile,
            undirected,
            labels: None,
        })
    }

    /// Builds a network from `(owner, target, capacity)` triples. Triples for
    /// the same owner are merged into one strategy; a repeated `(owner,
    /// target)` pair is rejected.
    pub fn from_edges(n: usize, k: u32, edges: &[(NodeId, NodeId, Capacity)]) -> Result<Self> {
        check_parameters(n, k)?;
        let mut per_owner: Vec<Vec<(NodeId, Capacity)>> = vec![Vec::new(); n];
        for &(owner, target, capacity) in edges {
            if owner >= n {
                return Err(Error::infeasible(owner, format!("agent out of range 0..{n}")));
            }
            per_owner[owner].push((target, capacity));
        }
        let strategies = per_owner
            .into_iter()
            .enumerate()
            .map(|(v, p)| Strategy::new(v, p))
            .collect::<Result<Vec<_>>>()?;
        CapacityNetwork::build(StrategyProfile::new(n, k, strategies)?)
    }

    /// The profile with no edges at all.
    pub fn empty(n: usize, k: u32) -> Result<Self> {
        CapacityNetwork::build(StrategyProfile::empty(n, k)?)
    }

    /// Attaches display names to the node ids.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::Argument(format!(
                "{} labels given for {} nodes",
                labels.len(),
                self.n()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of `v`, or its id rendered as a string.
    pub fn label(&self, v: NodeId) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    /// Resolves a node given either by label or by numeric id.
    pub fn resolve_node(&self, name: &str) -> Result<NodeId> {
        if let Some(labels) = &self.labels {
            if let Some(v) = labels.iter().position(|l| l == name) {
                return Ok(v);
            }
        }
        match name.parse::<NodeId>() {
            Ok(v) if v < self.n() => Ok(v),
            _ => Err(Error::Argument(format!("unknown node '{name}'"))),
        }
    }

    pub fn n(&self) -> usize {
        self.profile.n
    }

    pub fn k(&self) -> u32 {
        self.profile.k
    }

    pub fn profile(&self) -> &StrategyProfile {
        &self.profile
    }

    pub fn into_profile(self) -> StrategyProfile {
        self.profile
    }

    pub fn strategy(&self, v: NodeId) -> &Strategy {
        &self.profile.strategies[v]
    }

    /// Directed edges `(owner, target, capacity)` ordered by owner, then target.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, Capacity)> + '_ {
        self.profile
            .strategies
            .iter()
            .flat_map(|s| s.purchases.iter().map(move |&(t, c)| (s.owner, t, c)))
    }

    /// Undirected edges `(u, v, c({u,v}))` with `u < v` and `c > 0`.
    pub fn undirected_edges(&self) -> Vec<(NodeId, NodeId, u64)> {
        let n = self.n();
        let mut out = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                let c = self.undirected[u * n + v];
                if c > 0 {
                    out.push((u, v, c));
                }
            }
        }
        out
    }

    /// Capacity of `{u, v}` in the undirected view.
    pub fn capacity(&self, u: NodeId, v: NodeId) -> u64 {
        self.undirected[u * self.n() + v]
    }

    pub fn directed_capacity(&self, owner: NodeId, target: NodeId) -> Capacity {
        self.profile.strategies[owner].capacity_to(target)
    }

    pub(crate) fn undirected_matrix(&self) -> &[u64] {
        &self.undirected
    }

    /// Sum of the capacities of all edges incident to `v`, in either direction.
    pub fn degree(&self, v: NodeId) -> u64 {
        let n = self.n();
        self.undirected[v * n..(v + 1) * n].iter().sum()
    }

    /// Sum of all directed capacities.
    pub fn total_capacity(&self) -> u64 {
        self.profile.strategies.iter().map(Strategy::spent).sum()
    }

    /// The network of `(new, s_{-v})`. `self` is left untouched.
    pub fn apply_strategy(&self, v: NodeId, new: Strategy) -> Result<Self> {
        if new.owner != v {
            return Err(Error::Argument(format!(
                "strategy owned by {} cannot replace the strategy of {v}",
                new.owner
            )));
        }
        let profile = self.profile.with_strategy(new)?;
        let mut next = CapacityNetwork::build(profile)?;
        next.labels = self.labels.clone();
        Ok(next)
    }

    /// Whether the undirected view is connected.
    pub fn is_connected(&self) -> bool {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for (v, &c) in self.undirected[u * n..(u + 1) * n].iter().enumerate() {
                if !seen[v] && c > 0 {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == n
    }
}
