//! Agent and social utilities of both game variants.
//!
//! In the average-flow game an agent earns the mean of its local
//! connectivities to everybody else. In the min-flow game every agent earns
//! the edge connectivity of the whole network, with the number of nodes it is
//! strictly better connected to as a lexicographic tie-break. All values are
//! exact: rationals for averages, integer pairs for the min game.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::connectivity::{all_pairs_connectivity, ConnectivityMatrix};
use crate::error::{Error, Result};
use crate::network::{CapacityNetwork, NodeId};

pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GameKind {
    AvgFlow,
    MinFlow,
}

impl GameKind {
    pub const ALL: [GameKind; 2] = [GameKind::AvgFlow, GameKind::MinFlow];

    pub fn name(self) -> &'static str {
        match self {
            GameKind::AvgFlow => "avg",
            GameKind::MinFlow => "min",
        }
    }
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GameKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "avg" | "avg-flow" | "avgflow" => Ok(GameKind::AvgFlow),
            "min" | "min-flow" | "minflow" => Ok(GameKind::MinFlow),
            other => Err(Error::Argument(format!(
                "unknown game '{other}', expected 'avg' or 'min'"
            ))),
        }
    }
}

/// The utility of one agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum UtilityValue {
    /// `Σ_{i≠v} λ(v,i) / (n-1)`.
    Avg(Rational),
    /// `(λ(G), |{i ≠ v : λ(i,v) > λ(G)}|)`, compared lexicographically.
    Min { connectivity: u64, well_connected: usize },
}

impl UtilityValue {
    pub fn kind(&self) -> GameKind {
        match self {
            UtilityValue::Avg(_) => GameKind::AvgFlow,
            UtilityValue::Min { .. } => GameKind::MinFlow,
        }
    }
}

/// Total order within one game kind; mixing kinds is an argument error.
pub fn compare(a: &UtilityValue, b: &UtilityValue) -> Result<Ordering> {
    match (a, b) {
        (UtilityValue::Avg(x), UtilityValue::Avg(y)) => Ok(x.cmp(y)),
        (
            UtilityValue::Min {
                connectivity: c1,
                well_connected: w1,
            },
            UtilityValue::Min {
                connectivity: c2,
                well_connected: w2,
            },
        ) => Ok((c1, w1).cmp(&(c2, w2))),
        _ => Err(Error::Argument(format!(
            "cannot compare a {} utility with a {} utility",
            a.kind(),
            b.kind()
        ))),
    }
}

impl PartialOrd for UtilityValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        compare(self, other).ok()
    }
}

impl fmt::Display for UtilityValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UtilityValue::Avg(r) => write!(f, "{r}"),
            UtilityValue::Min {
                connectivity,
                well_connected,
            } => write!(f, "({connectivity}, {well_connected})"),
        }
    }
}

impl FromStr for UtilityValue {
    type Err = Error;

    /// Accepts `"10/3"`, `"2"` or `"(3, 2)"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let (c, w) = inner
                .split_once(',')
                .ok_or_else(|| Error::Format(format!("bad min-game utility '{s}'")))?;
            let connectivity = c
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("bad connectivity in '{s}'")))?;
            let well_connected = w
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("bad well-connected count in '{s}'")))?;
            return Ok(UtilityValue::Min {
                connectivity,
                well_connected,
            });
        }
        parse_fraction(s).map(UtilityValue::Avg)
    }
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_fraction(s: &str) -> Result<Rational> {
    let bad = || Error::Format(format!("bad fraction '{s}'"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

fn to_i64(x: u64) -> i64 {
    i64::try_from(x).expect("utility numerator exceeds i64")
}

pub(crate) fn utility_from_matrix(m: &ConnectivityMatrix, v: NodeId, kind: GameKind) -> UtilityValue {
    let n = m.n();
    match kind {
        GameKind::AvgFlow => UtilityValue::Avg(Rational::new(to_i64(m.row_sum(v)), to_i64(n as u64 - 1))),
        GameKind::MinFlow => {
            let global = m.global();
            UtilityValue::Min {
                connectivity: global,
                well_connected: (0..n).filter(|&i| i != v && m.get(i, v) > global).count(),
            }
        }
    }
}

/// Integer key whose order agrees with [`compare`] for every agent of one
/// `(n, kind)` game: the numerator for averages (the denominator is always
/// `n - 1`), and `λ(G) * n + well_connected` for the min game.
pub(crate) fn utility_keys(m: &ConnectivityMatrix, kind: GameKind) -> Vec<u64> {
    let n = m.n();
    match kind {
        GameKind::AvgFlow => (0..n).map(|v| m.row_sum(v)).collect(),
        GameKind::MinFlow => {
            let global = m.global();
            (0..n)
                .map(|v| {
                    let wc = (0..n).filter(|&i| i != v && m.get(i, v) > global).count();
                    global * n as u64 + wc as u64
                })
                .collect()
        }
    }
}

/// Numerator of the social utility over a fixed `n`-dependent denominator
/// (see [`social_denominator`]).
pub(crate) fn social_numerator(m: &ConnectivityMatrix, kind: GameKind) -> u64 {
    match kind {
        GameKind::AvgFlow => (0..m.n()).map(|v| m.row_sum(v)).sum(),
        GameKind::MinFlow => m.global(),
    }
}

pub(crate) fn social_denominator(n: usize, kind: GameKind) -> i64 {
    match kind {
        GameKind::AvgFlow => (n as i64) * (n as i64 - 1),
        GameKind::MinFlow => 1,
    }
}

pub fn agent_utility(net: &CapacityNetwork, v: NodeId, kind: GameKind) -> Result<UtilityValue> {
    if v >= net.n() {
        return Err(Error::Argument(format!("agent {v} out of range 0..{}", net.n())));
    }
    Ok(utility_from_matrix(&all_pairs_connectivity(net).matrix(), v, kind))
}

/// Utilities of every agent, from a single all-pairs computation.
pub fn all_utilities(net: &CapacityNetwork, kind: GameKind) -> Vec<UtilityValue> {
    let m = all_pairs_connectivity(net).matrix();
    (0..net.n()).map(|v| utility_from_matrix(&m, v, kind)).collect()
}

/// Mean agent utility for the average game; `λ(G)` for the min game.
pub fn social_utility(net: &CapacityNetwork, kind: GameKind) -> Rational {
    let m = all_pairs_connectivity(net).matrix();
    Rational::new(to_i64(social_numerator(&m, kind)), social_denominator(net.n(), kind))
}

/// Per-agent utilities and the social utility of one network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityReport {
    pub game: GameKind,
    pub agents: Vec<UtilityValue>,
    pub social: Rational,
}

pub fn utility_report(net: &CapacityNetwork, kind: GameKind) -> UtilityReport {
    UtilityReport {
        game: kind,
        agents: all_utilities(net, kind),
        social: social_utility(net, kind),
    }
}
