//! Search for improving-response cycles.
//!
//! States are labeled feasible networks of an `(n, k)` game; there is an edge
//! `s -> s'` whenever `s'` differs from `s` in one agent's strategy and that
//! agent strictly prefers `s'`. All improving moves count, not only best
//! responses. A cycle in this graph is a witness that the game lacks the
//! finite improvement property.
//!
//! When the whole state space fits in the budget, every state is evaluated
//! up front (in parallel) and a depth-first search settles the question
//! exactly. Otherwise states are evaluated lazily as the search reaches them,
//! and running out of budget is reported as inconclusive.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::connectivity::GomoryHuTree;
use crate::dynamics::{evaluate_move, verify_cycle, MoveRecord};
use crate::error::Result;
use crate::games::{utility_keys, GameKind};
use crate::network::CapacityNetwork;
use crate::space::ProfileSpace;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IrcSearch {
    /// A verified cycle: replaying `moves` from `start` returns to `start`.
    Cycle {
        start: CapacityNetwork,
        moves: Vec<MoveRecord>,
        explored: u64,
    },
    /// The whole state space was explored and is acyclic.
    NoCycle { explored: u64 },
    /// The state budget ran out before a cycle was found.
    Inconclusive { explored: u64 },
}

impl IrcSearch {
    pub fn explored(&self) -> u64 {
        match self {
            IrcSearch::Cycle { explored, .. }
            | IrcSearch::NoCycle { explored }
            | IrcSearch::Inconclusive { explored } => *explored,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            IrcSearch::Cycle { .. } => "cycle",
            IrcSearch::NoCycle { .. } => "no-cycle",
            IrcSearch::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// Which moves count as edges of the state graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MoveRule {
    /// Any strictly improving strategy change.
    #[default]
    Improving,
    /// Strictly improving changes to a utility-maximizing strategy.
    BestResponse,
}

const WHITE: u8 = 0;
const GRAY: u8 = 1;
const BLACK: u8 = 2;

fn keys_of(space: &ProfileSpace, index: u64, kind: GameKind) -> Vec<u64> {
    let n = space.n();
    let tree = GomoryHuTree::from_matrix(n, &space.matrix(index));
    utility_keys(&tree.matrix(), kind)
}

/// Evaluated states: per-agent utility keys and a DFS color per slot.
trait StateStore {
    /// Slot of `index`, evaluating it if needed; `None` once the budget is
    /// spent.
    fn slot(&mut self, index: u64) -> Option<usize>;
    fn key(&self, slot: usize, agent: usize) -> u64;
    fn color(&self, slot: usize) -> u8;
    fn set_color(&mut self, slot: usize, color: u8);
    fn explored(&self) -> u64;
}

struct DenseStore {
    n: usize,
    keys: Vec<u32>,
    colors: Vec<u8>,
}

impl DenseStore {
    fn new(space: &ProfileSpace, kind: GameKind) -> Self {
        let n = space.n();
        let size = space.size() as usize;
        let mut keys = vec![0u32; size * n];
        keys.par_chunks_mut(n).enumerate().for_each(|(index, row)| {
            for (slot, key) in row.iter_mut().zip(keys_of(space, index as u64, kind)) {
                *slot = u32::try_from(key).expect("utility key fits in u32");
            }
        });
        DenseStore {
            n,
            keys,
            colors: vec![WHITE; size],
        }
    }
}

impl StateStore for DenseStore {
    fn slot(&mut self, index: u64) -> Option<usize> {
        Some(index as usize)
    }
    fn key(&self, slot: usize, agent: usize) -> u64 {
        u64::from(self.keys[slot * self.n + agent])
    }
    fn color(&self, slot: usize) -> u8 {
        self.colors[slot]
    }
    fn set_color(&mut self, slot: usize, color: u8) {
        self.colors[slot] = color;
    }
    fn explored(&self) -> u64 {
        self.colors.len() as u64
    }
}

struct LazyStore<'a> {
    space: &'a ProfileSpace,
    kind: GameKind,
    budget: u64,
    slots: HashMap<u64, usize>,
    keys: Vec<u64>,
    colors: Vec<u8>,
}

impl StateStore for LazyStore<'_> {
    fn slot(&mut self, index: u64) -> Option<usize> {
        if let Some(&s) = self.slots.get(&index) {
            return Some(s);
        }
        if self.colors.len() as u64 >= self.budget {
            return None;
        }
        let s = self.colors.len();
        self.keys.extend(keys_of(self.space, index, self.kind));
        self.colors.push(WHITE);
        self.slots.insert(index, s);
        Some(s)
    }
    fn key(&self, slot: usize, agent: usize) -> u64 {
        self.keys[slot * self.space.n() + agent]
    }
    fn color(&self, slot: usize) -> u8 {
        self.colors[slot]
    }
    fn set_color(&mut self, slot: usize, color: u8) {
        self.colors[slot] = color;
    }
    fn explored(&self) -> u64 {
        self.colors.len() as u64
    }
}

struct Frame {
    index: u64,
    slot: usize,
    /// Next `(agent, digit)` successor to try.
    agent: usize,
    digit: usize,
    /// The move that led here from the frame below.
    via: (usize, usize),
    /// Best key reachable by `best_for.0`, under [`MoveRule::BestResponse`].
    best_for: Option<(usize, u64)>,
}

/// The cycle as `(state index, (agent, digit) leaving it)` pairs.
type RawCycle = Vec<(u64, (usize, usize))>;

enum Dfs {
    Cycle(RawCycle),
    Exhausted,
    OutOfBudget,
}

/// Best key `agent` can reach from `index` by changing only its own strategy.
fn best_key(space: &ProfileSpace, store: &mut impl StateStore, index: u64, agent: usize) -> Option<u64> {
    let mut best = 0;
    for d in 0..space.radix() {
        let slot = store.slot(space.with_digit(index, agent, d))?;
        best = best.max(store.key(slot, agent));
    }
    Some(best)
}

fn depth_first(space: &ProfileSpace, store: &mut impl StateStore, rule: MoveRule) -> Dfs {
    let n = space.n();
    let radix = space.radix();
    for root in 0..space.size() {
        let Some(root_slot) = store.slot(root) else {
            return Dfs::OutOfBudget;
        };
        if store.color(root_slot) != WHITE {
            continue;
        }
        store.set_color(root_slot, GRAY);
        let mut stack = vec![Frame {
            index: root,
            slot: root_slot,
            agent: 0,
            digit: 0,
            via: (0, 0),
            best_for: None,
        }];
        while let Some(top) = stack.last_mut() {
            let mut pushed = None;
            while top.agent < n {
                let (agent, digit) = (top.agent, top.digit);
                top.digit += 1;
                if top.digit == radix {
                    top.digit = 0;
                    top.agent += 1;
                }
                if digit == space.digit(top.index, agent) {
                    continue;
                }
                let next = space.with_digit(top.index, agent, digit);
                let Some(next_slot) = store.slot(next) else {
                    return Dfs::OutOfBudget;
                };
                let key = store.key(next_slot, agent);
                if key <= store.key(top.slot, agent) {
                    continue;
                }
                if rule == MoveRule::BestResponse {
                    let best = match top.best_for {
                        Some((a, b)) if a == agent => b,
                        _ => {
                            let Some(b) = best_key(space, store, top.index, agent) else {
                                return Dfs::OutOfBudget;
                            };
                            top.best_for = Some((agent, b));
                            b
                        }
                    };
                    if key < best {
                        continue;
                    }
                }
                match store.color(next_slot) {
                    WHITE => {
                        pushed = Some(Frame {
                            index: next,
                            slot: next_slot,
                            agent: 0,
                            digit: 0,
                            via: (agent, digit),
                            best_for: None,
                        });
                        break;
                    }
                    GRAY => {
                        let from = stack
                            .iter()
                            .position(|f| f.index == next)
                            .expect("gray state is on the stack");
                        let mut cycle: RawCycle = Vec::new();
                        for w in stack[from..].windows(2) {
                            cycle.push((w[0].index, w[1].via));
                        }
                        cycle.push((stack.last().expect("non-empty").index, (agent, digit)));
                        return Dfs::Cycle(cycle);
                    }
                    _ => {}
                }
            }
            match pushed {
                Some(frame) => {
                    store.set_color(frame.slot, GRAY);
                    stack.push(frame);
                }
                None => {
                    let done = stack.pop().expect("non-empty");
                    store.set_color(done.slot, BLACK);
                }
            }
        }
    }
    Dfs::Exhausted
}

/// Searches the improving-move graph of the `(n, k)` game for a cycle,
/// evaluating at most `state_budget` states.
pub fn search_irc(n: usize, k: u32, kind: GameKind, state_budget: u64) -> Result<IrcSearch> {
    search_cycle(n, k, kind, MoveRule::Improving, state_budget)
}

/// [`search_irc`] with a choice of admissible moves.
pub fn search_cycle(n: usize, k: u32, kind: GameKind, rule: MoveRule, state_budget: u64) -> Result<IrcSearch> {
    let space = ProfileSpace::new(n, k, u128::MAX)?;
    let (outcome, explored) = if space.size() <= state_budget {
        let mut store = DenseStore::new(&space, kind);
        let outcome = depth_first(&space, &mut store, rule);
        (outcome, store.explored())
    } else {
        let mut store = LazyStore {
            space: &space,
            kind,
            budget: state_budget,
            slots: HashMap::new(),
            keys: Vec::new(),
            colors: Vec::new(),
        };
        let outcome = depth_first(&space, &mut store, rule);
        (outcome, store.explored())
    };
    match outcome {
        Dfs::Exhausted => Ok(IrcSearch::NoCycle { explored }),
        Dfs::OutOfBudget => Ok(IrcSearch::Inconclusive { explored }),
        Dfs::Cycle(raw) => {
            let start = CapacityNetwork::build(space.profile(raw[0].0))?;
            let mut network = start.clone();
            let mut moves = Vec::with_capacity(raw.len());
            for &(_, (agent, digit)) in &raw {
                let m = evaluate_move(&network, space.strategy(agent, digit).clone(), kind)?;
                network = network.apply_strategy(agent, m.after.clone())?;
                moves.push(m);
            }
            verify_cycle(&start, kind, &moves)?;
            Ok(IrcSearch::Cycle { start, moves, explored })
        }
    }
}

/// Runs [`search_irc`] for `n = k + 1, k + 2, ..., max_n` and returns the
/// first `n` that yields a cycle, or the outcome at `max_n`.
pub fn search_smallest_irc(k: u32, kind: GameKind, max_n: usize, state_budget: u64) -> Result<(usize, IrcSearch)> {
    let mut last = None;
    for n in (k as usize + 1)..=max_n {
        let found = search_irc(n, k, kind, state_budget)?;
        if matches!(found, IrcSearch::Cycle { .. }) {
            return Ok((n, found));
        }
        last = Some((n, found));
    }
    last.ok_or_else(|| crate::error::Error::Parameter(format!("max_n = {max_n} leaves no n > k = {k}")))
}
