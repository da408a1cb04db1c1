//! Brute-force canonical forms for small directed capacity networks.
//!
//! The canonical form is the lexicographically smallest row-major directed
//! capacity matrix over all `n!` relabelings, so two networks are isomorphic
//! (as owned, directed, capacitated graphs) iff their forms are equal.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::network::{Capacity, CapacityNetwork};

/// Largest node count accepted by the permutation search.
pub const MAX_CANONICAL_NODES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    pub n: usize,
    pub k: u32,
    /// Row-major directed capacities after relabeling.
    pub matrix: Vec<Capacity>,
}

impl CanonicalForm {
    /// Directed edges `(owner, target, capacity)` of the canonical relabeling.
    pub fn edges(&self) -> Vec<(usize, usize, Capacity)> {
        let n = self.n;
        (0..n * n)
            .filter(|&i| self.matrix[i] > 0)
            .map(|i| (i / n, i % n, self.matrix[i]))
            .collect()
    }

    pub fn to_network(&self) -> Result<CapacityNetwork> {
        CapacityNetwork::from_edges(self.n, self.k, &self.edges())
    }
}

pub fn canonical_form(net: &CapacityNetwork) -> Result<CanonicalForm> {
    let n = net.n();
    if n > MAX_CANONICAL_NODES {
        return Err(Error::Argument(format!(
            "canonical forms are limited to {MAX_CANONICAL_NODES} nodes, got {n}"
        )));
    }
    let mut directed = vec![0; n * n];
    for (u, v, c) in net.edges() {
        directed[u * n + v] = c;
    }
    let mut best: Option<Vec<Capacity>> = None;
    let mut candidate = vec![0; n * n];
    for perm in (0..n).permutations(n) {
        // new label i is old node perm[i]
        for i in 0..n {
            for j in 0..n {
                candidate[i * n + j] = directed[perm[i] * n + perm[j]];
            }
        }
        if best.as_ref().is_none_or(|b| candidate < *b) {
            best = Some(candidate.clone());
        }
    }
    Ok(CanonicalForm {
        n,
        k: net.k(),
        matrix: best.unwrap_or_default(),
    })
}

pub fn are_isomorphic(a: &CapacityNetwork, b: &CapacityNetwork) -> Result<bool> {
    if a.n() != b.n() || a.k() != b.k() {
        return Ok(false);
    }
    Ok(canonical_form(a)? == canonical_form(b)?)
}
