//! Exhaustive small-instance experiments: equilibrium census, empirical price
//! of anarchy and stability, cluster detection and equilibrium audits.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::canon::{canonical_form, CanonicalForm};
use crate::connectivity::{global_connectivity, min_cut_of_matrix, GomoryHuTree};
use crate::dynamics::is_nash;
use crate::error::{Error, Result};
use crate::games::{social_denominator, social_numerator, utility_keys, GameKind, Rational};
use crate::network::{CapacityNetwork, NodeId, StrategyProfile};
use crate::space::ProfileSpace;

/// Default cap on the number of profiles a census may evaluate.
pub const DEFAULT_PROFILE_BUDGET: u128 = 100_000_000;

/// Every feasible profile of the `(n, k)` game, once each. Refuses with
/// [`Error::BudgetExceeded`] when there are more than `budget`.
pub fn enumerate_profiles(n: usize, k: u32, budget: u128) -> Result<impl Iterator<Item = StrategyProfile>> {
    let space = ProfileSpace::new(n, k, budget)?;
    Ok((0..space.size()).map(move |i| space.profile(i)))
}

/// Number of feasible profiles, `(strategy count)^n`.
pub fn profile_count(n: usize, k: u32) -> Result<u128> {
    crate::network::check_parameters(n, k)?;
    let per_agent = crate::space::strategy_count(n, k);
    (0..n)
        .try_fold(1u128, |acc, _| acc.checked_mul(per_agent))
        .ok_or(Error::Overflow)
}

/// All pure equilibria of one `(n, k, game)` instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeCensus {
    pub n: usize,
    pub k: u32,
    pub kind: GameKind,
    pub profiles: u64,
    /// Labeled equilibria in profile-index order.
    pub equilibria: Vec<CapacityNetwork>,
    /// Equilibria up to isomorphism, sorted.
    pub classes: Vec<CanonicalForm>,
    pub min_ne: Option<Rational>,
    pub max_ne: Option<Rational>,
    /// Best social utility over all profiles.
    pub opt: Rational,
    /// `opt / min_ne`.
    pub poa: Option<Rational>,
    /// `opt / max_ne`.
    pub pos: Option<Rational>,
}

/// Enumerates every profile, keeps those where no agent has an improving
/// move, and records extremal social utilities.
///
/// Each profile is evaluated once; a unilateral deviation is another profile
/// of the same enumeration, so the equilibrium test is a table lookup. The
/// result does not depend on the thread count.
pub fn ne_census(n: usize, k: u32, kind: GameKind, budget: u128) -> Result<NeCensus> {
    let space = ProfileSpace::new(n, k, budget)?;
    let size = space.size() as usize;
    let mut keys = vec![0u64; size * n];
    let mut social = vec![0u64; size];
    keys.par_chunks_mut(n)
        .zip(social.par_iter_mut())
        .enumerate()
        .for_each(|(index, (row, soc))| {
            let m = GomoryHuTree::from_matrix(n, &space.matrix(index as u64)).matrix();
            row.copy_from_slice(&utility_keys(&m, kind));
            *soc = social_numerator(&m, kind);
        });

    let radix = space.radix();
    let equilibrium_indices: Vec<u64> = (0..size as u64)
        .into_par_iter()
        .filter(|&index| {
            (0..n).all(|agent| {
                let own = keys[index as usize * n + agent];
                (0..radix).all(|d| {
                    let other = space.with_digit(index, agent, d) as usize;
                    keys[other * n + agent] <= own
                })
            })
        })
        .collect();

    let denominator = social_denominator(n, kind);
    let ratio = |num: u64| Rational::new(num as i64, denominator);
    let opt = ratio(social.iter().copied().max().unwrap_or(0));
    let ne_social = || equilibrium_indices.iter().map(|&i| social[i as usize]);
    let min_ne = ne_social().min().map(ratio);
    let max_ne = ne_social().max().map(ratio);
    let divide = |v: Option<Rational>| v.filter(|x| *x != Rational::from_integer(0)).map(|x| opt / x);

    let equilibria = equilibrium_indices
        .iter()
        .map(|&i| CapacityNetwork::build(space.profile(i)))
        .collect::<Result<Vec<_>>>()?;
    let classes: BTreeSet<CanonicalForm> = equilibria
        .par_iter()
        .map(canonical_form)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .collect();

    Ok(NeCensus {
        n,
        k,
        kind,
        profiles: space.size(),
        equilibria,
        classes: classes.into_iter().collect(),
        poa: divide(min_ne),
        pos: divide(max_ne),
        min_ne,
        max_ne,
        opt,
    })
}

/// Repeatedly splits along cuts of capacity below `j` and returns the first
/// surviving node set (at least two nodes) whose induced undirected subgraph
/// has edge connectivity at least `j`.
pub fn find_cluster(net: &CapacityNetwork, j: u64) -> Result<Option<Vec<NodeId>>> {
    if j == 0 {
        return Err(Error::Argument("cluster connectivity must be at least 1".into()));
    }
    let n = net.n();
    let mut pending: Vec<Vec<NodeId>> = vec![(0..n).collect()];
    while let Some(set) = pending.pop() {
        if set.len() < 2 {
            continue;
        }
        let m = set.len();
        let mut sub = vec![0u64; m * m];
        for (a, &u) in set.iter().enumerate() {
            for (b, &v) in set.iter().enumerate() {
                sub[a * m + b] = net.capacity(u, v);
            }
        }
        let ((left, right), value) = min_cut_of_matrix(m, &sub);
        if value >= j {
            return Ok(Some(set));
        }
        pending.push(right.into_iter().map(|i| set[i]).collect());
        pending.push(left.into_iter().map(|i| set[i]).collect());
    }
    Ok(None)
}

/// Structural checks that every equilibrium must pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub kind: GameKind,
    pub edge_connectivity: u64,
    /// Every agent spends exactly `k`.
    pub budgets_exhausted: bool,
    pub connected: bool,
    /// A `(k + 1)`-cluster, if one was found.
    pub cluster: Option<Vec<NodeId>>,
    /// Lower bound on the edge connectivity that applies to this game and
    /// budget: `k + 1` in the min game, `k` in the average game when `k >= 2`.
    pub connectivity_bound: Option<u64>,
}

impl AuditReport {
    fn violations(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if !self.budgets_exhausted {
            out.push(("budget", "some agent leaves budget unspent".to_string()));
        }
        if !self.connected {
            out.push(("connectivity", "the network is disconnected".to_string()));
        }
        if self.cluster.is_none() {
            out.push(("cluster", "no (k+1)-cluster exists".to_string()));
        }
        if let Some(bound) = self.connectivity_bound {
            if self.edge_connectivity < bound {
                out.push((
                    "edge-connectivity",
                    format!("λ(G) = {} is below {bound}", self.edge_connectivity),
                ));
            }
        }
        out
    }
}

/// Runs the structural checks without first confirming the equilibrium.
pub fn structural_checks(net: &CapacityNetwork, kind: GameKind) -> Result<AuditReport> {
    let k = net.k();
    let bound = match kind {
        GameKind::MinFlow => Some(u64::from(k) + 1),
        GameKind::AvgFlow if k >= 2 => Some(u64::from(k)),
        GameKind::AvgFlow => None,
    };
    Ok(AuditReport {
        kind,
        edge_connectivity: global_connectivity(net),
        budgets_exhausted: (0..net.n()).all(|v| net.strategy(v).spent() == u64::from(k)),
        connected: net.is_connected(),
        cluster: find_cluster(net, u64::from(k) + 1)?,
        connectivity_bound: bound,
    })
}

/// Audits an equilibrium. Calling it on a non-equilibrium is an argument
/// error; any failed check is an [`Error::AuditViolation`].
pub fn audit_ne(net: &CapacityNetwork, kind: GameKind) -> Result<AuditReport> {
    if let Some(w) = is_nash(net, kind)?.witness() {
        return Err(Error::Argument(format!(
            "not an equilibrium of the {kind} game: agent {} can improve from {} to {}",
            w.agent, w.utility_before, w.utility_after
        )));
    }
    let report = structural_checks(net, kind)?;
    if let Some((check, detail)) = report.violations().into_iter().next() {
        return Err(Error::AuditViolation {
            check: check.to_string(),
            detail,
        });
    }
    Ok(report)
}
