use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::index::sample;

use contagionlab::analytics::{self, DegreeNormalization, SourceDegree};
use contagionlab::branching::{self, BranchingConfig};
use contagionlab::contagion::{self, ContagionConfig};
use contagionlab::experiments::{self, ExperimentConfig};
use contagionlab::graph::{self, GenConfig, Model, StagePartition};
use contagionlab::mcv::{self, Threshold};
use contagionlab::{rng, Execution};

/// Thread count for the parallel sweeps.
const THREADS_VAR: &str = "CONTAGIONLAB_THREADS";

#[derive(Parser, Debug)]
#[command(name = "contagionlab", version, about = "Complex contagions on evolving random graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Grow a graph and write it in the text graph format
    Generate(GenerateArgs),
    /// Run a k-complex contagion on a graph file
    Infect(InfectArgs),
    /// Simulate the labeled branching process
    Branch(BranchArgs),
    /// Analytic tables and graph statistics
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Monotone circuit reduction
    #[command(subcommand)]
    Mcv(McvCommand),
    /// Run an experiment described by a JSON config
    #[command(alias = "run")]
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_parser = parse_model)]
    model: Model,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InfectArgs {
    graph: PathBuf,
    #[arg(long)]
    k: usize,
    /// `oldest:<c>`, `list:<a,b,...>` or `random:<s>:<rng-seed>`
    #[arg(long, value_parser = SeedSpec::from_str)]
    seeds: SeedSpec,
    /// Count parallel edges as separate exposures
    #[arg(long)]
    multiplicity: bool,
    #[arg(long)]
    max_rounds: Option<usize>,
    /// Run the pruned directed process instead
    #[arg(long)]
    pruned: bool,
    /// node,round CSV; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary JSON; stderr when absent
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BranchArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    x: usize,
    #[arg(long)]
    depth: usize,
    #[arg(long, default_value_t = 1000)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum AnalyzeCommand {
    /// Stationary degree profile eta_x as `x,eta` CSV
    Eta {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1000)]
        x_max: usize,
        #[arg(long, value_enum, default_value_t = SourceArg::Born)]
        source: SourceArg,
    },
    /// Expected degree of node s as `t,expected_degree` CSV
    Degree {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = NormalizationArg::Asymptotic)]
        normalization: NormalizationArg,
        /// Print every `stride`-th time step (the last one always)
        #[arg(long, default_value_t = 1)]
        stride: usize,
    },
    /// Upper bound on expected round-1 infections from random seeds (JSON)
    BootstrapBound {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        n: usize,
    },
    /// Per-stage same-stage slot fractions of a graph file as CSV
    Staging { graph: PathBuf },
}

#[derive(Subcommand, Debug)]
enum McvCommand {
    /// Check circuit files; prints one JSON verdict per line
    Check {
        #[arg(required = true)]
        circuits: Vec<PathBuf>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Pad size: `min`, `gap` or a number
        #[arg(long, default_value = "min", value_parser = parse_threshold)]
        pad: Threshold,
    },
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; falls back to the config's `output`
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run replications in a plain loop
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SourceArg {
    Born,
    BornPlusOne,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NormalizationArg {
    Asymptotic,
    Clique,
}

#[derive(Clone, Debug, PartialEq)]
enum SeedSpec {
    Oldest(usize),
    List(Vec<usize>),
    Random { count: usize, seed: u64 },
}

impl FromStr for SeedSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bad = |e: std::num::ParseIntError| format!("{s:?}: {e}");
        match s.split(':').collect::<Vec<_>>().as_slice() {
            ["oldest", c] => Ok(SeedSpec::Oldest(c.parse().map_err(bad)?)),
            ["list", items] => items
                .split(',')
                .map(|t| t.trim().parse::<usize>().map_err(bad))
                .collect::<std::result::Result<_, _>>()
                .map(SeedSpec::List),
            ["random", count, seed] => {
                Ok(SeedSpec::Random { count: count.parse().map_err(bad)?, seed: seed.parse().map_err(bad)? })
            }
            _ => Err(format!("{s:?} is not oldest:<c>, list:<a,b,...> or random:<s>:<seed>")),
        }
    }
}

impl SeedSpec {
    fn resolve(&self, n: usize) -> Result<Vec<usize>> {
        Ok(match self {
            SeedSpec::Oldest(c) => (1..=(*c).min(n)).collect(),
            SeedSpec::List(v) => v.clone(),
            SeedSpec::Random { count, seed } => {
                if *count > n {
                    bail!("cannot draw {count} seeds from {n} nodes");
                }
                let mut r = rng::stream(*seed);
                let mut v: Vec<usize> = sample(&mut r, n, *count).into_iter().map(|i| i + 1).collect();
                v.sort_unstable();
                v
            }
        })
    }
}

fn parse_model(s: &str) -> std::result::Result<Model, String> {
    s.parse::<Model>().map_err(|e| e.to_string())
}

fn parse_threshold(s: &str) -> std::result::Result<Threshold, String> {
    match s {
        "min" => Ok(Threshold::MinimumFeasible),
        "gap" => Ok(Threshold::Gap),
        n => n.parse().map(Threshold::Explicit).map_err(|_| format!("bad pad size {n:?}")),
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v.parse().with_context(|| format!("{THREADS_VAR}={v:?} is not a number"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn generate(a: GenerateArgs) -> Result<()> {
    let g = graph::generate(&GenConfig::new(a.model, a.n, a.m, a.p, a.seed))?;
    let mut w = output(a.out.as_deref())?;
    graph::write_graph(&g, &mut w)?;
    w.flush()?;
    Ok(())
}

fn infect(a: InfectArgs) -> Result<()> {
    let g = graph::load_graph(&a.graph).with_context(|| format!("reading {}", a.graph.display()))?;
    let mut cfg = ContagionConfig::new(a.k, a.seeds.resolve(g.n())?).with_multiplicity(a.multiplicity);
    if let Some(r) = a.max_rounds {
        cfg = cfg.with_max_rounds(r);
    }
    let result = if a.pruned { contagion::run_directed_pruned(&g, &cfg)? } else { contagion::run_on_graph(&g, &cfg)? };
    let mut w = output(a.out.as_deref())?;
    writeln!(w, "node,round")?;
    for (node, round) in result.infection_rounds() {
        writeln!(w, "{node},{round}")?;
    }
    w.flush()?;
    let summary = serde_json::to_string(&result.summary())?;
    match a.summary {
        Some(p) => fs::write(p, summary + "\n")?,
        None => eprintln!("{summary}"),
    }
    Ok(())
}

fn branch(a: BranchArgs) -> Result<()> {
    let cfg = BranchingConfig { m: a.m, x: a.x, alpha: a.alpha, max_depth: a.depth, seed: a.seed };
    let runs = branching::simulate_many(&cfg, a.runs, Execution::Parallel)?;
    let mut w = output(None)?;
    writeln!(w, "depth,mean_phi,survivor_fraction")?;
    for row in branching::depth_profile(&runs, a.depth) {
        writeln!(w, "{},{},{}", row.depth, row.mean_phi, row.survivor_fraction)?;
    }
    w.flush()?;
    Ok(())
}

fn analyze(cmd: AnalyzeCommand) -> Result<()> {
    let mut w = output(None)?;
    match cmd {
        AnalyzeCommand::Eta { p, m, x_max, source } => {
            let source = match source {
                SourceArg::Born => SourceDegree::Born,
                SourceArg::BornPlusOne => SourceDegree::BornPlusOne,
            };
            let t = analytics::solve_eta_with_source(p, m, x_max, source)?;
            writeln!(w, "x,eta")?;
            for x in 1..=t.x_max() {
                writeln!(w, "{x},{:e}", t.eta(x))?;
            }
        }
        AnalyzeCommand::Degree { p, m, s, n, normalization, stride } => {
            let norm = match normalization {
                NormalizationArg::Asymptotic => DegreeNormalization::Asymptotic,
                NormalizationArg::Clique => DegreeNormalization::Clique,
            };
            let t = analytics::expected_degree_with(p, m, s, n, norm)?;
            writeln!(w, "t,expected_degree")?;
            let stride = stride.max(1);
            for (i, d) in t.values.iter().enumerate() {
                if i % stride == 0 || i + 1 == t.values.len() {
                    writeln!(w, "{},{d}", s + i)?;
                }
            }
        }
        AnalyzeCommand::BootstrapBound { p, m, k, s, n } => {
            let b = analytics::expected_round1_infections(p, m, k, s, n)?;
            writeln!(w, "{}", serde_json::to_string(&b)?)?;
        }
        AnalyzeCommand::Staging { graph } => {
            let g = graph::load_graph(&graph).with_context(|| format!("reading {}", graph.display()))?;
            let st = analytics::staging_escape_stats(&g, &StagePartition::new(g.n()));
            writeln!(w, "stage,same_stage,issued,fraction")?;
            for s in st.stages.iter().filter(|s| s.issued > 0) {
                writeln!(w, "{},{},{},{}", s.stage, s.same_stage, s.issued, s.fraction().unwrap_or(0.0))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn mcv_check(circuits: &[PathBuf], k: usize, epsilon: f64, pad: Threshold) -> Result<bool> {
    let mut w = output(None)?;
    let mut all = true;
    for path in circuits {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let line = match mcv::parse_circuit(&text).and_then(|c| mcv::check(&c, k, epsilon, pad)) {
            Ok(v) => {
                all &= v.pass;
                serde_json::json!({ "circuit": path, "verdict": if v.pass { "PASS" } else { "FAIL" }, "detail": v })
            }
            Err(e) => {
                all = false;
                serde_json::json!({ "circuit": path, "verdict": "ERROR", "error": e.to_string() })
            }
        };
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(all)
}

fn experiment(a: ExperimentArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::load(&a.config).with_context(|| format!("loading {}", a.config.display()))?;
    if a.sequential {
        cfg.execution = Execution::Sequential;
    }
    let Some(out) = a.out.or_else(|| cfg.output.clone()) else {
        bail!("no output directory: pass --out or set `output` in the config");
    };
    let start = std::time::Instant::now();
    let res = experiments::run_to_dir(&cfg, &out)?;
    eprintln!(
        "{}: {} records written to {} in {:.1}s",
        cfg.experiment.name(),
        res.records.len(),
        out.display(),
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    init_threads()?;
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Infect(a) => infect(a),
        Command::Branch(a) => branch(a),
        Command::Analyze(c) => analyze(c),
        Command::Mcv(McvCommand::Check { circuits, k, epsilon, pad }) => {
            if !mcv_check(&circuits, k, epsilon, pad)? {
                std::process::exit(1);
            }
            Ok(())
        }
        Command::Experiment(a) => experiment(a),
    }
}
