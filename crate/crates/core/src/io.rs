//! File formats: the JSON network schema, JSON traces, utility and census
//! reports, the census CSV table and DOT export.
//!
//! Rationals are written as fraction strings (`"10/3"`, `"2"`); min-game
//! utilities as `"(λ, count)"`.

use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::analysis::{AuditReport, NeCensus};
use crate::canon::CanonicalForm;
use crate::dynamics::{DynamicsOutcome, MoveRecord};
use crate::error::{Error, Result};
use crate::games::{GameKind, Rational, UtilityReport, UtilityValue};
use crate::irc::IrcSearch;
use crate::network::{Capacity, CapacityNetwork, NodeId, Strategy};

fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Format(format!("{path}: {}", e.inner()))
    })
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub owner: NodeId,
    pub target: NodeId,
    pub capacity: Capacity,
}

/// `{ "n", "k", "edges": [{owner, target, capacity}], "labels"? }`
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDoc {
    pub n: usize,
    pub k: u32,
    pub edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl From<&CapacityNetwork> for NetworkDoc {
    fn from(net: &CapacityNetwork) -> Self {
        NetworkDoc {
            n: net.n(),
            k: net.k(),
            edges: net
                .edges()
                .map(|(owner, target, capacity)| EdgeDoc {
                    owner,
                    target,
                    capacity,
                })
                .collect(),
            labels: net.labels().map(<[String]>::to_vec),
        }
    }
}

impl NetworkDoc {
    pub fn into_network(self) -> Result<CapacityNetwork> {
        let edges: Vec<_> = self.edges.iter().map(|e| (e.owner, e.target, e.capacity)).collect();
        let net = CapacityNetwork::from_edges(self.n, self.k, &edges)?;
        match self.labels {
            Some(labels) => net
                .with_labels(labels)
                .map_err(|e| Error::Format(format!("labels: {e}"))),
            None => Ok(net),
        }
    }
}

pub fn network_to_json(net: &CapacityNetwork) -> String {
    pretty(&NetworkDoc::from(net))
}

pub fn network_from_json(text: &str) -> Result<CapacityNetwork> {
    parse::<NetworkDoc>(text)?.into_network()
}

/// Directed edges labeled with their capacity; the tail is the owner.
pub fn network_to_dot(net: &CapacityNetwork) -> String {
    let mut out = String::from("digraph network {\n");
    for v in 0..net.n() {
        let _ = writeln!(out, "  {v} [label=\"{}\"];", net.label(v));
    }
    for (u, v, c) in net.edges() {
        let _ = writeln!(out, "  {u} -> {v} [label=\"{c}\"];");
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PurchaseDoc {
    pub target: NodeId,
    pub capacity: Capacity,
}

fn strategy_doc(s: &Strategy) -> Vec<PurchaseDoc> {
    s.purchases()
        .iter()
        .map(|&(target, capacity)| PurchaseDoc { target, capacity })
        .collect()
}

fn strategy_from_doc(owner: NodeId, doc: &[PurchaseDoc]) -> Result<Strategy> {
    Strategy::new(owner, doc.iter().map(|p| (p.target, p.capacity)))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveDoc {
    pub agent: NodeId,
    pub before: Vec<PurchaseDoc>,
    pub after: Vec<PurchaseDoc>,
    pub utility_before: String,
    pub utility_after: String,
}

impl From<&MoveRecord> for MoveDoc {
    fn from(m: &MoveRecord) -> Self {
        MoveDoc {
            agent: m.agent,
            before: strategy_doc(&m.before),
            after: strategy_doc(&m.after),
            utility_before: m.utility_before.to_string(),
            utility_after: m.utility_after.to_string(),
        }
    }
}

impl MoveDoc {
    pub fn into_record(self) -> Result<MoveRecord> {
        Ok(MoveRecord {
            agent: self.agent,
            before: strategy_from_doc(self.agent, &self.before)?,
            after: strategy_from_doc(self.agent, &self.after)?,
            utility_before: self.utility_before.parse::<UtilityValue>()?,
            utility_after: self.utility_after.parse::<UtilityValue>()?,
        })
    }
}

pub fn trace_docs(trace: &[MoveRecord]) -> Vec<MoveDoc> {
    trace.iter().map(MoveDoc::from).collect()
}

/// A JSON array of moves.
pub fn trace_to_json(trace: &[MoveRecord]) -> String {
    pretty(&trace_docs(trace))
}

pub fn trace_from_json(text: &str) -> Result<Vec<MoveRecord>> {
    parse::<Vec<MoveDoc>>(text)?
        .into_iter()
        .map(MoveDoc::into_record)
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AgentUtilityDoc {
    pub agent: NodeId,
    pub label: String,
    pub utility: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UtilityReportDoc {
    pub game: String,
    pub agents: Vec<AgentUtilityDoc>,
    pub social: String,
}

pub fn utility_report_to_json(net: &CapacityNetwork, report: &UtilityReport) -> String {
    pretty(&UtilityReportDoc {
        game: report.game.to_string(),
        agents: report
            .agents
            .iter()
            .enumerate()
            .map(|(v, u)| AgentUtilityDoc {
                agent: v,
                label: net.label(v),
                utility: u.to_string(),
            })
            .collect(),
        social: report.social.to_string(),
    })
}

fn fraction(r: &Option<Rational>) -> Option<String> {
    r.as_ref().map(ToString::to_string)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CensusDoc {
    pub n: usize,
    pub k: u32,
    pub game: String,
    pub profiles: u64,
    pub ne_labeled: usize,
    pub ne_isomorphism_classes: usize,
    pub min_ne_utility: Option<String>,
    pub max_ne_utility: Option<String>,
    pub opt: String,
    pub poa: Option<String>,
    pub pos: Option<String>,
    /// One network per isomorphism class, in canonical labeling.
    pub classes: Vec<NetworkDoc>,
}

fn class_doc(form: &CanonicalForm) -> NetworkDoc {
    NetworkDoc {
        n: form.n,
        k: form.k,
        edges: form
            .edges()
            .into_iter()
            .map(|(owner, target, capacity)| EdgeDoc {
                owner,
                target,
                capacity,
            })
            .collect(),
        labels: None,
    }
}

pub fn census_doc(c: &NeCensus) -> CensusDoc {
    CensusDoc {
        n: c.n,
        k: c.k,
        game: c.kind.to_string(),
        profiles: c.profiles,
        ne_labeled: c.equilibria.len(),
        ne_isomorphism_classes: c.classes.len(),
        min_ne_utility: fraction(&c.min_ne),
        max_ne_utility: fraction(&c.max_ne),
        opt: c.opt.to_string(),
        poa: fraction(&c.poa),
        pos: fraction(&c.pos),
        classes: c.classes.iter().map(class_doc).collect(),
    }
}

pub fn census_to_json(c: &NeCensus) -> String {
    pretty(&census_doc(c))
}

pub const CENSUS_CSV_HEADER: &str = "n,k,game,profiles,ne_labeled,ne_classes,min_ne_utility,max_ne_utility,opt,poa,pos";

/// One CSV row (no trailing newline) keyed by `(n, k, game)`.
pub fn census_csv_row(c: &NeCensus) -> String {
    let d = census_doc(c);
    let opt = |v: Option<String>| v.unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        d.n,
        d.k,
        d.game,
        d.profiles,
        d.ne_labeled,
        d.ne_isomorphism_classes,
        opt(d.min_ne_utility),
        opt(d.max_ne_utility),
        d.opt,
        opt(d.poa),
        opt(d.pos)
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DynamicsDoc {
    pub outcome: String,
    pub moves: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_occurrence: Option<usize>,
    pub network: NetworkDoc,
    pub trace: Vec<MoveDoc>,
}

pub fn dynamics_to_json(out: &DynamicsOutcome) -> String {
    let first_occurrence = match out {
        DynamicsOutcome::RevisitedState { first_occurrence, .. } => Some(*first_occurrence),
        _ => None,
    };
    pretty(&DynamicsDoc {
        outcome: out.label().to_string(),
        moves: out.trace().len(),
        first_occurrence,
        network: NetworkDoc::from(out.network()),
        trace: trace_docs(out.trace()),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IrcDoc {
    pub n: usize,
    pub k: u32,
    pub game: String,
    pub result: String,
    pub explored: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<NetworkDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle: Option<Vec<MoveDoc>>,
}

pub fn irc_to_json(n: usize, k: u32, kind: GameKind, search: &IrcSearch) -> String {
    let (start, cycle) = match search {
        IrcSearch::Cycle { start, moves, .. } => (Some(NetworkDoc::from(start)), Some(trace_docs(moves))),
        _ => (None, None),
    };
    pretty(&IrcDoc {
        n,
        k,
        game: kind.to_string(),
        result: search.label().to_string(),
        explored: search.explored(),
        start,
        cycle,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditDoc {
    pub game: String,
    pub edge_connectivity: u64,
    pub budgets_exhausted: bool,
    pub connected: bool,
    pub cluster: Option<Vec<NodeId>>,
    pub connectivity_bound: Option<u64>,
}

pub fn audit_to_json(report: &AuditReport) -> String {
    pretty(&AuditDoc {
        game: report.kind.to_string(),
        edge_connectivity: report.edge_connectivity,
        budgets_exhausted: report.budgets_exhausted,
        connected: report.connected,
        cluster: report.cluster.clone(),
        connectivity_bound: report.connectivity_bound,
    })
}
