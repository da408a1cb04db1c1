use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde_json::json;

use flowncg::analysis::{audit_ne, ne_census, DEFAULT_PROFILE_BUDGET};
use flowncg::constructions::ConstructionId;
use flowncg::dynamics::{best_response, is_nash, replay_trace, run_dynamics, NashVerdict, Scheduler};
use flowncg::games::{agent_utility, utility_report};
use flowncg::io as fmt;
use flowncg::irc::{search_cycle, search_smallest_irc, IrcSearch, MoveRule};
use flowncg::{CapacityNetwork, Error, GameKind};

#[derive(Parser)]
#[command(name = "flowncg", version, about = "Flow-based network creation games")]
struct Cli {
    /// Worker threads (0 = one per core). Never changes the output.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a named network and print it as JSON.
    Construct {
        /// opt, opt-repeat, directed-cycle, min-worst-ne, avg-circle-ne, avg-star-ne or figure1
        id: ConstructionId,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<u32>,
    },
    /// Print the utility report, or one agent's utility.
    Evaluate {
        input: Option<PathBuf>,
        #[arg(long)]
        game: GameKind,
        /// Node label or id.
        #[arg(long)]
        agent: Option<String>,
    },
    /// Print an agent's tie-broken best response.
    BestResponse {
        input: Option<PathBuf>,
        #[arg(long)]
        game: GameKind,
        #[arg(long)]
        agent: String,
    },
    /// Exit 0 if the network is an equilibrium, 1 otherwise.
    VerifyNe {
        input: Option<PathBuf>,
        #[arg(long)]
        game: GameKind,
    },
    /// Run best-response dynamics.
    Dynamics {
        input: Option<PathBuf>,
        #[arg(long)]
        game: GameKind,
        #[arg(long, default_value = "round-robin")]
        scheduler: Scheduler,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
        /// Also write the trace on its own.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Search the state graph for an improving-response cycle.
    SearchIrc {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        game: GameKind,
        #[arg(long, default_value_t = 10_000_000)]
        max_states: u64,
        /// improving or best-response
        #[arg(long, default_value = "improving")]
        rule: RuleArg,
        /// Try n = k+1, ..., n and stop at the first cycle.
        #[arg(long)]
        smallest: bool,
    },
    /// Enumerate every profile and report the equilibria.
    Census {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        game: GameKind,
        #[arg(long, default_value_t = DEFAULT_PROFILE_BUDGET)]
        max_profiles: u128,
        /// Append a row to this CSV table, writing the header if it is new.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check the structural properties of an equilibrium.
    Audit {
        input: Option<PathBuf>,
        #[arg(long)]
        game: GameKind,
    },
    /// Print the network in DOT.
    ExportDot { input: Option<PathBuf> },
    /// Check that a trace is exactly what `dynamics` produces.
    VerifyTrace {
        #[arg(long)]
        start: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        game: GameKind,
        #[arg(long, default_value = "round-robin")]
        scheduler: Scheduler,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum RuleArg {
    Improving,
    BestResponse,
}

/// Outcome that is not an error but still exits 1.
struct DomainFailure;

fn read_input(path: Option<&Path>) -> anyhow::Result<String> {
    match path {
        Some(p) if p != Path::new("-") => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
        _ => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .context("reading standard input")?;
            Ok(s)
        }
    }
}

fn load(path: Option<&Path>) -> anyhow::Result<CapacityNetwork> {
    Ok(fmt::network_from_json(&read_input(path)?)?)
}

fn emit(text: &str) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
    s.push('\n');
    s
}

fn dimensions(id: ConstructionId, n: Option<usize>, k: Option<u32>) -> anyhow::Result<(usize, u32)> {
    if id == ConstructionId::Figure1 {
        return Ok((n.unwrap_or(4), k.unwrap_or(2)));
    }
    match (n, k) {
        (Some(n), Some(k)) => Ok((n, k)),
        _ => Err(Error::Argument(format!("construct {id} needs --n and --k")).into()),
    }
}

fn execute(cli: Cli) -> anyhow::Result<Result<(), DomainFailure>> {
    match cli.command {
        Command::Construct { id, n, k } => {
            let (n, k) = dimensions(id, n, k)?;
            emit(&fmt::network_to_json(&id.build(n, k)?))?;
        }
        Command::Evaluate { input, game, agent } => {
            let net = load(input.as_deref())?;
            match agent {
                Some(a) => {
                    let v = net.resolve_node(&a)?;
                    emit(&format!("{}\n", agent_utility(&net, v, game)?))?;
                }
                None => emit(&fmt::utility_report_to_json(&net, &utility_report(&net, game)))?,
            }
        }
        Command::BestResponse { input, game, agent } => {
            let net = load(input.as_deref())?;
            let v = net.resolve_node(&agent)?;
            let current = agent_utility(&net, v, game)?;
            let (strategy, utility) = best_response(&net, v, game)?;
            let improving = flowncg::games::compare(&utility, &current)?.is_gt();
            let purchases: Vec<_> = strategy
                .purchases()
                .iter()
                .map(|&(target, capacity)| json!({ "target": target, "capacity": capacity }))
                .collect();
            emit(&pretty(&json!({
                "agent": v,
                "label": net.label(v),
                "current_utility": current.to_string(),
                "best": purchases,
                "best_utility": utility.to_string(),
                "improving": improving,
            })))?;
        }
        Command::VerifyNe { input, game } => {
            let net = load(input.as_deref())?;
            let verdict = is_nash(&net, game)?;
            let witness = verdict.witness().map(fmt::MoveDoc::from);
            emit(&pretty(&json!({
                "game": game.to_string(),
                "equilibrium": verdict.is_equilibrium(),
                "witness": witness,
            })))?;
            if let NashVerdict::Improvable(_) = verdict {
                return Ok(Err(DomainFailure));
            }
        }
        Command::Dynamics {
            input,
            game,
            scheduler,
            max_steps,
            trace_out,
        } => {
            let net = load(input.as_deref())?;
            let outcome = run_dynamics(&net, game, scheduler, max_steps, cli.seed)?;
            if let Some(path) = trace_out {
                fs::write(&path, fmt::trace_to_json(outcome.trace()))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            emit(&fmt::dynamics_to_json(&outcome))?;
        }
        Command::SearchIrc {
            n,
            k,
            game,
            max_states,
            rule,
            smallest,
        } => {
            let rule = match rule {
                RuleArg::Improving => MoveRule::Improving,
                RuleArg::BestResponse => MoveRule::BestResponse,
            };
            let (n, found) = if smallest {
                if rule != MoveRule::Improving {
                    return Err(Error::Argument("--smallest searches improving moves only".into()).into());
                }
                search_smallest_irc(k, game, n, max_states)?
            } else {
                (n, search_cycle(n, k, game, rule, max_states)?)
            };
            emit(&fmt::irc_to_json(n, k, game, &found))?;
            if let IrcSearch::Inconclusive { .. } = found {
                return Ok(Err(DomainFailure));
            }
        }
        Command::Census {
            n,
            k,
            game,
            max_profiles,
            csv,
        } => {
            let census = ne_census(n, k, game, max_profiles)?;
            if let Some(path) = csv {
                let fresh = fs::metadata(&path).map(|m| m.len() == 0).unwrap_or(true);
                let mut file = fs::OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(&path)
                    .with_context(|| format!("opening {}", path.display()))?;
                if fresh {
                    writeln!(file, "{}", fmt::CENSUS_CSV_HEADER)?;
                }
                writeln!(file, "{}", fmt::census_csv_row(&census))?;
            }
            emit(&fmt::census_to_json(&census))?;
        }
        Command::Audit { input, game } => {
            let net = load(input.as_deref())?;
            emit(&fmt::audit_to_json(&audit_ne(&net, game)?))?;
        }
        Command::ExportDot { input } => {
            emit(&fmt::network_to_dot(&load(input.as_deref())?))?;
        }
        Command::VerifyTrace {
            start,
            trace,
            game,
            scheduler,
            max_steps,
        } => {
            let net = load(Some(&start))?;
            let moves = fmt::trace_from_json(&read_input(Some(&trace))?)?;
            let verdict = match replay_trace(&net, game, &moves) {
                Err(Error::Trace { index, reason }) => Err(format!("move {index}: {reason}")),
                Err(e) => return Err(e.into()),
                Ok(_) => {
                    let rerun = run_dynamics(&net, game, scheduler, max_steps, cli.seed)?;
                    if rerun.trace() == moves.as_slice() {
                        Ok(())
                    } else {
                        let at = rerun
                            .trace()
                            .iter()
                            .zip(&moves)
                            .position(|(a, b)| a != b)
                            .unwrap_or(rerun.trace().len().min(moves.len()));
                        Err(format!(
                            "trace differs from the {scheduler} run with seed {} at move {at}",
                            cli.seed
                        ))
                    }
                }
            };
            emit(&pretty(&json!({
                "accepted": verdict.is_ok(),
                "moves": moves.len(),
                "reason": verdict.as_ref().err(),
            })))?;
            if verdict.is_err() {
                return Ok(Err(DomainFailure));
            }
        }
    }
    Ok(Ok(()))
}

/// Malformed or infeasible input and bad arguments exit 2; refusals and
/// failed checks exit 1.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Parameter(_) | Error::Infeasible { .. } | Error::Argument(_) | Error::Format(_)) => 2,
        Some(_) => 1,
        None => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(cli) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(DomainFailure)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
