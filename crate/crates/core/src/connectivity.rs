//! Local and global edge connectivity on the undirected view.
//!
//! Pairwise values come from exact integer max-flow. All-pairs queries go
//! through a flow-equivalent Gomory-Hu tree built with Gusfield's method
//! (`n - 1` max-flow runs, no contraction).

use crate::error::{Error, Result};
use crate::flow::FlowSolver;
use crate::network::{CapacityNetwork, NodeId};

/// Local edge connectivity `λ(u, v)`: the maximum `u`-`v` flow.
pub fn local_connectivity(net: &CapacityNetwork, u: NodeId, v: NodeId) -> Result<u64> {
    let n = net.n();
    if u >= n || v >= n {
        return Err(Error::Argument(format!("node out of range 0..{n}")));
    }
    if u == v {
        return Err(Error::Argument(format!(
            "local connectivity needs two distinct nodes, got {u} twice"
        )));
    }
    Ok(FlowSolver::new(n, net.undirected_matrix()).max_flow(u, v))
}

/// Tree on the node set whose path minima give every pairwise local
/// connectivity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GomoryHuTree {
    /// `parent[0]` is unused; node `s > 0` hangs below `parent[s]`.
    parent: Vec<NodeId>,
    /// `value[s]` is the cut value on the edge `{s, parent[s]}`.
    value: Vec<u64>,
}

impl GomoryHuTree {
    pub(crate) fn from_matrix(n: usize, matrix: &[u64]) -> Self {
        let mut solver = FlowSolver::new(n, matrix);
        let mut parent = vec![0; n];
        let mut value = vec![0; n];
        for s in 1..n {
            let t = parent[s];
            value[s] = solver.max_flow(s, t);
            let side = solver.source_side(s);
            for i in s + 1..n {
                if side[i] && parent[i] == t {
                    parent[i] = s;
                }
            }
        }
        GomoryHuTree { parent, value }
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    /// Tree edges `(child, parent, cut value)`, one for each node but 0.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, u64)> + '_ {
        (1..self.parent.len()).map(|s| (s, self.parent[s], self.value[s]))
    }

    /// Minimum edge value on the tree path between `u` and `v`.
    pub fn connectivity(&self, u: NodeId, v: NodeId) -> u64 {
        assert_ne!(u, v, "connectivity of a node with itself is undefined");
        self.row(u)[v]
    }

    /// Path minima from `u` to every node (`0` at `u` itself).
    fn row(&self, u: NodeId) -> Vec<u64> {
        let n = self.parent.len();
        let mut adjacency: Vec<Vec<(NodeId, u64)>> = vec![Vec::new(); n];
        for (s, p, c) in self.edges() {
            adjacency[s].push((p, c));
            adjacency[p].push((s, c));
        }
        let mut best = vec![u64::MAX; n];
        let mut seen = vec![false; n];
        let mut stack = vec![u];
        seen[u] = true;
        while let Some(x) = stack.pop() {
            for &(y, c) in &adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    best[y] = best[x].min(c);
                    stack.push(y);
                }
            }
        }
        best[u] = 0;
        best
    }

    /// Expands the tree into the full symmetric connectivity matrix.
    pub fn matrix(&self) -> ConnectivityMatrix {
        let n = self.parent.len();
        let mut values = Vec::with_capacity(n * n);
        for u in 0..n {
            values.extend(self.row(u));
        }
        ConnectivityMatrix { n, values }
    }

    /// The smallest tree edge value: the global edge connectivity.
    pub fn min_value(&self) -> u64 {
        self.value[1..].iter().copied().min().unwrap_or(0)
    }
}

/// All pairwise local connectivities. Diagonal entries are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityMatrix {
    n: usize,
    values: Vec<u64>,
}

impl ConnectivityMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: NodeId, v: NodeId) -> u64 {
        self.values[u * self.n + v]
    }

    /// `Σ_{i ≠ v} λ(v, i)`.
    pub fn row_sum(&self, v: NodeId) -> u64 {
        self.values[v * self.n..(v + 1) * self.n].iter().sum()
    }

    /// `min_{u ≠ v} λ(u, v)`.
    pub fn global(&self) -> u64 {
        let n = self.n;
        (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .map(|(u, v)| self.get(u, v))
            .min()
            .unwrap_or(0)
    }
}

pub fn all_pairs_connectivity(net: &CapacityNetwork) -> GomoryHuTree {
    GomoryHuTree::from_matrix(net.n(), net.undirected_matrix())
}

/// Reference all-pairs computation with one max-flow per pair.
pub fn naive_all_pairs(net: &CapacityNetwork) -> ConnectivityMatrix {
    let n = net.n();
    let mut solver = FlowSolver::new(n, net.undirected_matrix());
    let mut values = vec![0; n * n];
    for u in 0..n {
        for v in u + 1..n {
            let f = solver.max_flow(u, v);
            values[u * n + v] = f;
            values[v * n + u] = f;
        }
    }
    ConnectivityMatrix { n, values }
}

/// Edge connectivity `λ(G)`; zero iff the undirected view is disconnected.
pub fn global_connectivity(net: &CapacityNetwork) -> u64 {
    all_pairs_connectivity(net).min_value()
}

/// A minimum cut of the whole network, as `(side containing the source of
/// the cheapest tree edge, the rest)`; both sides sorted.
pub fn min_cut_partition(net: &CapacityNetwork) -> (Vec<NodeId>, Vec<NodeId>) {
    min_cut_of_matrix(net.n(), net.undirected_matrix()).0
}

pub(crate) fn min_cut_of_matrix(n: usize, matrix: &[u64]) -> ((Vec<NodeId>, Vec<NodeId>), u64) {
    let tree = GomoryHuTree::from_matrix(n, matrix);
    let (s, t, value) = tree
        .edges()
        .min_by_key(|&(s, _, c)| (c, s))
        .expect("at least two nodes");
    let mut solver = FlowSolver::new(n, matrix);
    let flow = solver.max_flow(s, t);
    debug_assert_eq!(flow, value);
    let side = solver.source_side(s);
    let (a, b): (Vec<NodeId>, Vec<NodeId>) = (0..n).partition(|&v| side[v]);
    ((a, b), value)
}

/// Total undirected capacity crossing the bipartition `side` / `!side`.
pub fn cut_capacity(net: &CapacityNetwork, side: &[bool]) -> u64 {
    net.undirected_edges()
        .into_iter()
        .filter(|&(u, v, _)| side[u] != side[v])
        .map(|(_, _, c)| c)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn figure1() -> CapacityNetwork {
        CapacityNetwork::from_edges(
            4,
            2,
            &[
                (0, 1, 1),
                (0, 3, 1),
                (1, 0, 1),
                (1, 3, 1),
                (2, 1, 1),
                (2, 3, 1),
                (3, 2, 2),
            ],
        )
        .unwrap()
    }

    #[test]
    fn figure1_flows_from_z() {
        let net = figure1();
        assert_eq!(local_connectivity(&net, 3, 0).unwrap(), 3);
        assert_eq!(local_connectivity(&net, 3, 1).unwrap(), 3);
        assert_eq!(local_connectivity(&net, 3, 2).unwrap(), 4);
        assert_eq!(all_pairs_connectivity(&net).connectivity(3, 2), 4);
    }

    #[test]
    fn same_node_is_an_error() {
        assert!(matches!(local_connectivity(&figure1(), 2, 2), Err(Error::Argument(_))));
    }

    #[test]
    fn isolated_nodes() {
        let net = CapacityNetwork::empty(3, 1).unwrap();
        assert_eq!(local_connectivity(&net, 0, 1).unwrap(), 0);
        assert!(all_pairs_connectivity(&net).edges().all(|(_, _, c)| c == 0));
        assert_eq!(global_connectivity(&net), 0);
    }

    #[test]
    fn two_triangles_split_at_components() {
        let net = CapacityNetwork::from_edges(
            6,
            1,
            &[(0, 1, 1), (1, 2, 1), (2, 0, 1), (3, 4, 1), (4, 5, 1), (5, 3, 1)],
        )
        .unwrap();
        let (a, b) = min_cut_partition(&net);
        let side: Vec<bool> = (0..6).map(|v| a.contains(&v)).collect();
        assert_eq!(cut_capacity(&net, &side), 0);
        assert_eq!(a.len() + b.len(), 6);
        assert!(a == vec![0, 1, 2] || a == vec![3, 4, 5]);
    }

    #[test]
    fn tree_matches_naive_on_figure1() {
        let net = figure1();
        assert_eq!(all_pairs_connectivity(&net).matrix(), naive_all_pairs(&net));
    }
}
