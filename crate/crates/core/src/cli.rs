//! Command-line front end.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::amalgam_embed::embed_graph_with;
use crate::blocktree::{decompose_3blocks, isomorphic_with_edge_ids, reconstruct};
use crate::enddecomp::{ComponentClass, DecomposeConfig, Decomposer};
use crate::error::{Error, Result};
use crate::multigraph::MultiGraph;
use crate::planar::{classify_obstruction, Chirality, ObstructionKind};
use crate::unimodular_stats::{
    exact_ball_distribution, mtp_check, mtp_check_exact, oracle_ball_distribution, sample_balls,
    spanning_tree_count, tv_distance_exact, wilson_ust, BallDistribution, Transport,
};

#[derive(Parser, Debug)]
#[command(name = "unimap", version, about = "Planar embeddings, 3-block trees and end decompositions")]
pub struct Cli {
    /// Root seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Random planar rotation system of a connected planar multigraph.
    Embed {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = ChiralityArg::Coin)]
        chirality: ChiralityArg,
    },
    /// Canonical 3-block tree of a 2-connected multigraph.
    Blocktree {
        graph: PathBuf,
        /// Rebuild the graph from the tree and compare.
        #[arg(long)]
        roundtrip: bool,
    },
    /// Staged end-cut removal on a named graph oracle.
    Decompose(DecomposeArgs),
    /// Unimodularity statistics.
    Stats {
        #[command(subcommand)]
        command: StatsCommand,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ChiralityArg {
    Fix,
    Coin,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    /// One of path, ladder, grid, tree3, tree-x-edge, freeprod-triangle,
    /// tri-halfplane, c3-x-path.
    pub oracle: String,
    #[arg(long, default_value_t = 3)]
    pub r_max: usize,
    #[arg(long, default_value_t = 6)]
    pub f_max: usize,
    /// Fixed escape radius; by default the largest radius whose ball fits
    /// the budget, capped at max(4R, 16).
    #[arg(long)]
    pub h_esc: Option<usize>,
    #[arg(long, default_value_t = 2000)]
    pub escape_budget: usize,
    /// Number of consecutive seeds to run, starting at --seed.
    #[arg(long, default_value_t = 1)]
    pub runs: u64,
}

#[derive(Subcommand, Debug)]
pub enum StatsCommand {
    /// Mass transport principle with a uniform root.
    Mtp {
        graph: PathBuf,
        /// adjacency, degree-weighted, ball-size or all.
        #[arg(long, default_value = "all")]
        transport: String,
        /// Floating-point mode instead of exact rationals.
        #[arg(long)]
        float: bool,
    },
    /// Distribution of rooted balls.
    Balls {
        /// Graph file; omit when --oracle is given.
        graph: Option<PathBuf>,
        #[arg(long)]
        oracle: Option<String>,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        /// Number of uniform roots; every vertex once when omitted.
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Total variation distance between two ball distribution files.
    Tv { first: PathBuf, second: PathBuf },
    /// Wilson sampler frequency table.
    Ust {
        graph: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
    },
}

/// Exit status for an error, as documented for the binary.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::UnknownOracle(_) | Error::RadiusMismatch(..) => 2,
        Error::NonPlanar(_) => 3,
        Error::NotKConnected(_) | Error::TooFewEdges(_) => 4,
        Error::HorizonExhausted(_) => 5,
        _ => 1,
    }
}

fn read_graph(path: &Path) -> Result<MultiGraph> {
    MultiGraph::parse(&fs::read_to_string(path)?)
}

/// Primary output and a one-line status, which goes to stdout after the
/// primary output is written to a file, or to stderr otherwise.
struct Output {
    primary: String,
    status: Option<String>,
}

fn execute(cli: &Cli) -> Result<Output> {
    let seed = cli.seed;
    match &cli.command {
        Command::Embed { graph, chirality } => {
            let g = read_graph(graph)?;
            let chirality = match chirality {
                ChiralityArg::Fix => Chirality::Fix,
                ChiralityArg::Coin => Chirality::Coin,
            };
            let rs = embed_graph_with(&g, seed, chirality)?;
            Ok(Output {
                primary: rs.to_text(),
                status: Some(format!("genus={} faces={}", rs.genus()?, rs.num_faces())),
            })
        }
        Command::Blocktree { graph, roundtrip } => {
            let g = read_graph(graph)?;
            let tree = decompose_3blocks(&g)?;
            let status = if *roundtrip {
                let ok = isomorphic_with_edge_ids(&reconstruct(&tree)?, &g);
                Some(if ok { "roundtrip OK".into() } else { "roundtrip FAIL".into() })
            } else {
                None
            };
            Ok(Output {
                primary: tree.to_text(),
                status,
            })
        }
        Command::Decompose(args) => decompose(args, seed),
        Command::Stats { command } => stats(command, seed),
    }
}

fn decompose(args: &DecomposeArgs, seed: u64) -> Result<Output> {
    let config = DecomposeConfig {
        r_max: args.r_max,
        f_max: args.f_max,
        escape_budget: args.escape_budget,
        h_esc: args.h_esc,
        ..DecomposeConfig::default()
    };
    let decomposer = Decomposer::new(&args.oracle, config)?;
    let mut text = String::new();
    let (mut clean, mut forests) = (0, 0);
    for s in seed..seed + args.runs.max(1) {
        let report = decomposer.run(s)?;
        clean += u64::from(report.count(ComponentClass::MultiEscape) == 0);
        forests += u64::from(report.forest);
        text.push_str(&report.to_text());
    }
    let runs = args.runs.max(1);
    let status = format!("runs={runs} without-multi-escape={clean} forest={forests}");
    if runs > 1 {
        writeln!(text, "batch {status}").unwrap();
    }
    Ok(Output {
        primary: text,
        status: Some(status),
    })
}

fn stats(command: &StatsCommand, seed: u64) -> Result<Output> {
    let primary = match command {
        StatsCommand::Mtp { graph, transport, float } => {
            let g = read_graph(graph)?;
            let selected: Vec<Transport> = if transport == "all" {
                Transport::ALL.to_vec()
            } else {
                vec![Transport::from_name(transport).ok_or_else(|| Error::Parse {
                    line: 0,
                    msg: format!("unknown transport `{transport}`"),
                })?]
            };
            let mut out = String::new();
            for t in selected {
                if *float {
                    let r = mtp_check(&g, |g, o, x| t.eval(g, o, x) as f64)?;
                    writeln!(out, "f={} lhs={} rhs={} equal={}", t.name(), r.lhs, r.rhs, yes(r.equal)).unwrap();
                } else {
                    let r = mtp_check_exact(&g, |g, o, x| t.eval(g, o, x))?;
                    writeln!(out, "f={} lhs={} rhs={} equal={}", t.name(), r.lhs, r.rhs, yes(r.equal)).unwrap();
                }
            }
            out
        }
        StatsCommand::Balls {
            graph,
            oracle,
            radius,
            samples,
        } => {
            let dist = match (graph, oracle) {
                (Some(path), None) => {
                    let g = read_graph(path)?;
                    match samples {
                        Some(n) => sample_balls(&g, *radius, *n, seed)?,
                        None => exact_ball_distribution(&g, *radius)?,
                    }
                }
                (None, Some(name)) => oracle_ball_distribution(name, *radius, samples.unwrap_or(1))?,
                _ => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: "give exactly one of a graph file or --oracle".into(),
                    })
                }
            };
            dist.to_text()
        }
        StatsCommand::Tv { first, second } => {
            let p = BallDistribution::parse(&fs::read_to_string(first)?)?;
            let q = BallDistribution::parse(&fs::read_to_string(second)?)?;
            let d = tv_distance_exact(&p, &q)?;
            format!("tv={} exact={}\n", *d.numer() as f64 / *d.denom() as f64, d)
        }
        StatsCommand::Ust { graph, samples } => {
            let g = read_graph(graph)?;
            let mut counts: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
            for i in 0..*samples {
                *counts.entry(wilson_ust(&g, crate::seed::derive_seed(seed, "ust", i))?).or_default() += 1;
            }
            let mut out = format!(
                "ust samples={} spanning_trees={} observed={}\n",
                samples,
                spanning_tree_count(&g),
                counts.len()
            );
            for (tree, count) in &counts {
                let ids: Vec<String> = tree.iter().map(|e| e.to_string()).collect();
                writeln!(out, "tree {} {} {:.4}", ids.join(","), count, *count as f64 / *samples as f64).unwrap();
            }
            out
        }
    };
    Ok(Output { primary, status: None })
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn describe(err: &Error, g: Option<&MultiGraph>) -> String {
    match (err, g) {
        (Error::NonPlanar(witness), Some(g)) => {
            let kind = match classify_obstruction(g, witness) {
                Some(ObstructionKind::K5) => "K5",
                Some(ObstructionKind::K33) => "K3,3",
                None => "unclassified",
            };
            let ids: Vec<String> = witness.iter().map(|e| e.to_string()).collect();
            format!("non-planar: {kind} subdivision on edges {}", ids.join(" "))
        }
        _ => format!("error: {err}"),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// status.
pub fn run<I, T>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(output) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &output.primary).map(|_| {
                    if let Some(s) = &output.status {
                        let _ = writeln!(stdout, "{s}");
                    }
                }),
                None => stdout.write_all(output.primary.as_bytes()).map(|_| {
                    if let Some(s) = &output.status {
                        let _ = writeln!(stderr, "{s}");
                    }
                }),
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    1
                }
            }
        }
        Err(err) => {
            let graph = match &cli.command {
                Command::Embed { graph, .. } => read_graph(graph).ok(),
                _ => None,
            };
            let _ = writeln!(stderr, "{}", describe(&err, graph.as_ref()));
            exit_code(&err)
        }
    }
}
