//! Dinic max-flow on an undirected capacity matrix.
//!
//! An undirected edge of capacity `c` becomes two opposed arcs of capacity
//! `c` that are each other's residual partner, so pushing one unit along
//! `u -> v` frees one unit on `v -> u`.

use std::collections::VecDeque;

pub(crate) struct FlowSolver {
    n: usize,
    adjacency: Vec<Vec<usize>>,
    to: Vec<usize>,
    residual: Vec<u64>,
    original: Vec<u64>,
    level: Vec<u32>,
    cursor: Vec<usize>,
}

const UNREACHED: u32 = u32::MAX;

impl FlowSolver {
    /// `matrix` is a symmetric row-major `n * n` capacity matrix.
    pub(crate) fn new(n: usize, matrix: &[u64]) -> Self {
        debug_assert_eq!(matrix.len(), n * n);
        let mut adjacency = vec![Vec::new(); n];
        let mut to = Vec::new();
        let mut original = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                let c = matrix[u * n + v];
                if c == 0 {
                    continue;
                }
                adjacency[u].push(to.len());
                to.push(v);
                original.push(c);
                adjacency[v].push(to.len());
                to.push(u);
                original.push(c);
            }
        }
        FlowSolver {
            n,
            adjacency,
            residual: original.clone(),
            to,
            original,
            level: vec![UNREACHED; n],
            cursor: vec![0; n],
        }
    }

    /// Exact maximum `s`-`t` flow value. Residual state is kept until the next
    /// call so that [`FlowSolver::source_side`] can read the minimum cut.
    pub(crate) fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        debug_assert_ne!(s, t);
        self.residual.copy_from_slice(&self.original);
        let mut total: u64 = 0;
        while self.build_levels(s, t) {
            self.cursor.iter_mut().for_each(|c| *c = 0);
            loop {
                let pushed = self.augment(s, t, u64::MAX);
                if pushed == 0 {
                    break;
                }
                total = total.checked_add(pushed).expect("flow value overflow");
            }
        }
        total
    }

    /// Nodes reachable from `s` in the residual graph of the last flow: the
    /// source side of a minimum cut.
    pub(crate) fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adjacency[u] {
                let v = self.to[a];
                if !seen[v] && self.residual[a] > 0 {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    fn build_levels(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = UNREACHED);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adjacency[u] {
                let v = self.to[a];
                if self.residual[a] > 0 && self.level[v] == UNREACHED {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        self.level[t] != UNREACHED
    }

    fn augment(&mut self, u: usize, t: usize, limit: u64) -> u64 {
        if u == t {
            return limit;
        }
        while self.cursor[u] < self.adjacency[u].len() {
            let a = self.adjacency[u][self.cursor[u]];
            let v = self.to[a];
            if self.residual[a] > 0 && self.level[v] == self.level[u] + 1 {
                let pushed = self.augment(v, t, limit.min(self.residual[a]));
                if pushed > 0 {
                    self.residual[a] -= pushed;
                    self.residual[a ^ 1] += pushed;
                    return pushed;
                }
            }
            self.cursor[u] += 1;
        }
        0
    }
}
