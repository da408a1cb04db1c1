//! Flow-based network creation games.
//!
//! `n` agents each hold an integer budget `k` and buy capacitated directed
//! edges. Flow is sent over the undirected view of the resulting network, so
//! an agent cares about local edge connectivity: its average towards all other
//! agents in the average-flow game, or the network's edge connectivity (with a
//! lexicographic tie-break) in the min-flow game.
//!
//! The crate evaluates both games exactly, computes best responses, verifies
//! equilibria, runs improving-response dynamics, searches for improving
//! cycles, builds the known equilibrium and optimum families, and runs
//! exhaustive equilibrium censuses on small instances.
//!
//! ```
//! use flowncg::{constructions, games::{agent_utility, GameKind, Rational, UtilityValue}};
//!
//! let net = constructions::build_figure1()?;
//! let z = net.resolve_node("z")?;
//! assert_eq!(net.degree(z), 5);
//! assert_eq!(
//!     agent_utility(&net, z, GameKind::AvgFlow)?,
//!     UtilityValue::Avg(Rational::new(10, 3))
//! );
//! # Ok::<(), flowncg::Error>(())
//! ```

pub mod analysis;
pub mod canon;
pub mod connectivity;
pub mod constructions;
pub mod dynamics;
mod error;
mod flow;
pub mod games;
pub mod io;
pub mod irc;
pub mod network;
pub mod space;

pub use error::{Error, Result};
pub use games::{GameKind, Rational, UtilityValue};
pub use network::{Capacity, CapacityNetwork, NodeId, Strategy, StrategyProfile};

// The guide's code listings run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/connectivity.md")]
    mod connectivity {}
    #[doc = include_str!("../../../book/src/utilities.md")]
    mod utilities {}
    #[doc = include_str!("../../../book/src/equilibria.md")]
    mod equilibria {}
    #[doc = include_str!("../../../book/src/constructions.md")]
    mod constructions {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
