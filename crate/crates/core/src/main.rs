use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use steiner_bdd::frontier::{ConstructError, DEFAULT_NODE_CAP};
use steiner_bdd::oracle::brute_force_minimal_steiner;
use steiner_bdd::order::{EdgeOrder, StartRule};
use steiner_bdd::pipeline::{
    self, parse_theta, read_jsonl, write_jsonl, PipelineError, RunConfig, Theta,
};
use steiner_bdd::seed::{SeedConfig, SeedRoot};
use steiner_bdd::simplify::simplify;
use steiner_bdd::stp::{format_cost, parse_stp, write_stp};
use steiner_bdd::traverse::EnumerateError;
use steiner_bdd::Graph;

const EXIT_FAILURE: u8 = 1;
const EXIT_PARSE: u8 = 3;
const EXIT_INFEASIBLE: u8 = 4;
const EXIT_MEMORY_CAP: u8 = 5;
const EXIT_TRUNCATED: u8 = 6;

/// Enumerate minimal Steiner trees of bounded cost with a frontier-based BDD.
///
/// Exit codes: 0 success, 1 other failure, 2 usage error, 3 input parse
/// failure, 4 no tree within the cost bound, 5 node or entry cap reached,
/// 6 more trees reached the 1-sink than the sink cap kept (output written).
#[derive(Parser)]
#[command(name = "steiner-bdd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print graph statistics as JSON.
    Stats(InputArgs),
    /// Write the simplified graph in STP format.
    Simplify {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print the seed trees as JSONL.
    Seeds {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Construct and reduce the BDD and print its sizes.
    Build {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Write the reduced BDD in text form ("-" for stdout).
        #[arg(long)]
        dump_bdd: Option<PathBuf>,
    },
    /// Enumerate trees and write them as JSONL.
    Enumerate {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Write a JSON report of the run.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        dump_bdd: Option<PathBuf>,
    },
    /// Count all minimal Steiner trees of the graph.
    Count {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
        node_cap: usize,
    },
    /// Brute-force enumeration by subset sweep (small graphs only).
    Oracle {
        #[command(flatten)]
        input: InputArgs,
        /// Cost bound in input units; unbounded by default.
        #[arg(long)]
        theta: Option<String>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InputArgs {
    /// STP file, or "-" for stdin.
    #[arg(long, short)]
    input: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Cost bound in input units, or "inf".
    #[arg(long, conflicts_with = "theta_ratio")]
    theta: Option<String>,
    /// Cost bound as a multiple of the cheapest seed tree's cost (rounded
    /// down). The seed cost bounds the optimum from above, so this bound is
    /// at least as loose as the same multiple of the optimum.
    #[arg(long, default_value_t = 1.2)]
    theta_ratio: f64,
    /// Trees guaranteed in the output: the k cheapest within the bound.
    #[arg(long, default_value_t = 1000)]
    k: usize,
    #[arg(long, default_value_t = 3)]
    seeds: usize,
    /// Fraction of edges deleted for each perturbed seed.
    #[arg(long, default_value_t = 0.05)]
    perturb: f64,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    /// Terminal rooting the seed search and the edge order; defaults to a
    /// terminal of minimum degree.
    #[arg(long)]
    seed_root: Option<u32>,
    /// Build on the whole graph instead of the seed union.
    #[arg(long)]
    no_seeds: bool,
    #[arg(long)]
    no_simplify: bool,
    /// Same as --no-seeds --no-simplify.
    #[arg(long)]
    exact: bool,
    /// JSONL file of extra seed trees, in the output format.
    #[arg(long)]
    seeds_from: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
    node_cap: usize,
    /// Trees kept at the 1-sink; defaults to 10·k.
    #[arg(long)]
    sink_cap: Option<usize>,
    /// Largest number of live cost entries during traversal.
    #[arg(long)]
    entry_budget: Option<usize>,
}

enum Failure {
    Parse(String),
    Infeasible,
    MemoryCap(String),
    Other(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => EXIT_PARSE,
            Failure::Infeasible => EXIT_INFEASIBLE,
            Failure::MemoryCap(_) => EXIT_MEMORY_CAP,
            Failure::Other(_) => EXIT_FAILURE,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Construct(ConstructError::NodeCapExceeded { .. })
            | PipelineError::Enumerate(EnumerateError::EntryBudgetExceeded { .. }) => {
                Failure::MemoryCap(e.to_string())
            }
            PipelineError::BadTheta(_) => Failure::Parse(e.to_string()),
            other => Failure::Other(other.to_string()),
        }
    }
}

fn read_graph(input: &InputArgs) -> Result<Graph, Failure> {
    let text = if input.input.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(&input.input)
            .map_err(|e| Failure::Other(format!("{}: {e}", input.input.display())))?
    };
    parse_stp(&text).map_err(|e| Failure::Parse(format!("{}: {e}", input.input.display())))
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) if p.as_os_str() != "-" => Ok(Box::new(io::BufWriter::new(
            fs::File::create(p).map_err(|e| Failure::Other(format!("{}: {e}", p.display())))?,
        ))),
        _ => Ok(Box::new(io::BufWriter::new(io::stdout().lock()))),
    }
}

fn theta_arg(text: Option<&str>, g: &Graph) -> Result<Theta, Failure> {
    match text {
        Some(t) => Ok(parse_theta(t, g.weight_scale())?),
        None => Ok(Theta::Unbounded),
    }
}

fn run_config(args: &RunArgs, g: &Graph) -> Result<RunConfig, Failure> {
    let theta = match &args.theta {
        Some(t) => parse_theta(t, g.weight_scale())?,
        None => Theta::Ratio(args.theta_ratio),
    };
    let root = match args.seed_root {
        Some(v) => SeedRoot::Vertex(v),
        None => SeedRoot::MinDegree,
    };
    let seeds = (!args.no_seeds && !args.exact).then_some(SeedConfig {
        num_seeds: args.seeds,
        perturb_fraction: args.perturb,
        rng_seed: args.rng_seed,
        root,
    });
    let extra_seeds = match &args.seeds_from {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| Failure::Other(format!("{}: {e}", p.display())))?;
            read_jsonl(&text, g).map_err(|e| Failure::Parse(format!("{}: {e}", p.display())))?
        }
        None => Vec::new(),
    };
    if args.k == 0 {
        return Err(Failure::Other("--k must be at least 1".into()));
    }
    Ok(RunConfig {
        theta,
        k: args.k,
        seeds,
        extra_seeds,
        simplify: !args.no_simplify && !args.exact,
        order: match args.seed_root {
            Some(v) => StartRule::Vertex(v),
            None => StartRule::MinDegreeTerminal,
        },
        node_cap: args.node_cap,
        sink_cap: args.sink_cap,
        entry_budget: args.entry_budget,
    })
}

fn write_dump(path: &Path, dump: &str) -> Result<(), Failure> {
    let mut out = open_output(Some(path))?;
    out.write_all(dump.as_bytes())?;
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct GraphStats {
    vertices: usize,
    active_vertices: usize,
    edges: usize,
    terminals: usize,
    total_cost: String,
    frontier_width: usize,
    simplified_vertices: usize,
    simplified_edges: usize,
}

fn execute(cmd: Command) -> Result<u8, Failure> {
    match cmd {
        Command::Stats(input) => {
            let g = read_graph(&input)?;
            let (s, _) = simplify(&g);
            let all: Vec<usize> = (0..g.edge_count()).collect();
            let stats = GraphStats {
                vertices: g.vertex_count(),
                active_vertices: g.active_vertex_count(),
                edges: g.edge_count(),
                terminals: g.terminals().len(),
                total_cost: format_cost(g.total_cost(&all), g.weight_scale()),
                frontier_width: EdgeOrder::bfs(&g, StartRule::MinDegreeTerminal).frontier_width(),
                simplified_vertices: s.active_vertex_count(),
                simplified_edges: s.edge_count(),
            };
            let mut out = io::stdout().lock();
            serde_json::to_writer_pretty(&mut out, &stats).map_err(io::Error::from)?;
            writeln!(out)?;
        }
        Command::Simplify { input, output } => {
            let g = read_graph(&input)?;
            let (s, map) = simplify(&g);
            eprintln!(
                "simplified: {} -> {} edges, {} loops removed",
                g.edge_count(),
                s.edge_count(),
                map.removed_loops.len()
            );
            let mut out = open_output(output.as_deref())?;
            out.write_all(write_stp(&s).as_bytes())?;
            out.flush()?;
        }
        Command::Seeds { input, run, output } => {
            let g = read_graph(&input)?;
            let mut cfg = run_config(&run, &g)?;
            if cfg.seeds.is_none() {
                cfg.seeds = Some(SeedConfig::default());
            }
            let prepared = pipeline::prepare(&g, &cfg)?;
            let mut trees = prepared
                .seeds
                .iter()
                .map(|t| prepared.map.expand_tree(t))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::Other(e.to_string()))?;
            trees.sort();
            eprintln!(
                "seeds: {} trees, union has {} edges",
                trees.len(),
                prepared.working.graph.edge_count()
            );
            write_jsonl(open_output(output.as_deref())?, &g, &trees)?;
        }
        Command::Build {
            input,
            run,
            dump_bdd,
        } => {
            let g = read_graph(&input)?;
            let cfg = run_config(&run, &g)?;
            let built = pipeline::build(&g, &cfg)?;
            eprintln!(
                "bdd: {} nodes, {} after reduction, widest layer {}, {} paths",
                built.raw.len(),
                built.bdd.len(),
                built.construct_stats.max_layer(),
                built.bdd.count_paths()
            );
            if let Some(p) = dump_bdd {
                write_dump(&p, &built.bdd.dump())?;
            }
        }
        Command::Enumerate {
            input,
            run,
            output,
            report,
            dump_bdd,
        } => {
            let g = read_graph(&input)?;
            let cfg = run_config(&run, &g)?;
            let out = pipeline::run(&g, &cfg)?;
            let r = &out.report;
            eprintln!(
                "graph {}/{}/{} -> {}/{}; bdd {} -> {} nodes; {} trees, min cost {}, peak entries {}; \
                 construct {:.1} ms, reduce {:.1} ms, traverse {:.1} ms",
                r.graph.v,
                r.graph.e,
                r.graph.t,
                r.preprocessed.v,
                r.preprocessed.e,
                r.bdd.nodes,
                r.bdd.nodes_reduced,
                r.trees.count,
                r.trees
                    .min_cost
                    .map(|c| format_cost(c, g.weight_scale()))
                    .unwrap_or_else(|| "-".into()),
                r.peak_entries,
                r.timing_ms.construct,
                r.timing_ms.reduce,
                r.timing_ms.traverse,
            );
            write_jsonl(open_output(output.as_deref())?, &g, &out.trees)?;
            if let Some(p) = report {
                let text = serde_json::to_string_pretty(r).map_err(io::Error::from)?;
                write_dump(&p, &(text + "\n"))?;
            }
            if let Some(p) = dump_bdd {
                write_dump(&p, &out.bdd.dump())?;
            }
            if out.trees.is_empty() {
                return Err(Failure::Infeasible);
            }
            if r.truncated {
                eprintln!("warning: sink cap reached, some trees within the bound were dropped");
                return Ok(EXIT_TRUNCATED);
            }
        }
        Command::Count { input, node_cap } => {
            let g = read_graph(&input)?;
            let cfg = RunConfig {
                theta: Theta::Unbounded,
                seeds: None,
                node_cap,
                ..RunConfig::default()
            };
            let built = pipeline::build(&g, &cfg)?;
            println!("{}", built.bdd.count_paths());
        }
        Command::Oracle {
            input,
            theta,
            output,
        } => {
            let g = read_graph(&input)?;
            let theta = match theta_arg(theta.as_deref(), &g)? {
                Theta::Absolute(c) => c,
                _ => steiner_bdd::UNBOUNDED,
            };
            let res = brute_force_minimal_steiner(&g, theta)
                .map_err(|e| Failure::Other(e.to_string()))?;
            write_jsonl(open_output(output.as_deref())?, &g, &res.trees)?;
            if res.trees.is_empty() {
                return Err(Failure::Infeasible);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            match &f {
                Failure::Parse(m) | Failure::MemoryCap(m) | Failure::Other(m) => {
                    eprintln!("error: {m}")
                }
                Failure::Infeasible => eprintln!("error: no tree within the cost bound"),
            }
            ExitCode::from(f.code())
        }
    }
}
