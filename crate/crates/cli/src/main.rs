use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use gcg::bench::{render_rows, run_bench, BenchConfig};
use gcg::exec::with_threads;
use gcg::ingest::{HubbleParams, ZConfDirection, DEFAULT_H0};
use gcg::io::read_cliques;
use gcg::pipeline::{self, PipelineConfig};
use gcg::synth::{generate_synthetic, ClusterSpec, SynthSpec};
use gcg::{Dataset, Dims, Execution, ObjectType, Thresholds};

#[derive(Parser)]
#[command(name = "gcg", version, about = "Grid-based maximal complete graph and complex relationship mining")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Filter, transform and categorize a galaxy catalog CSV into points.
    Ingest {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Generate a seeded synthetic points file.
    Synth {
        #[arg(short, long)]
        n: usize,
        /// Box side lengths in Mpc, comma-separated; a single value is used
        /// for every axis.
        #[arg(long, value_delimiter = ',', default_value = "100")]
        extent: Vec<f64>,
        /// Type weights as label:weight pairs.
        #[arg(long, value_delimiter = ',', default_value = "A:0.25,B:0.25,C:0.25,D:0.25")]
        types: Vec<String>,
        /// Number of Gaussian cluster centers (uniform placement when absent).
        #[arg(long)]
        clusters: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Mine maximal cliques of the tau-neighborhood graph.
    MineCliques {
        points: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Cardinality histogram CSV.
        #[arg(long)]
        histogram: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Turn cliques into complex relationship transactions.
    ExtractRelations {
        cliques: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Mine interesting itemsets from transactions.
    MinePatterns {
        transactions: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Type distribution of a points file, or type composition per clique
    /// cardinality of a cliques file.
    Stats {
        #[arg(long, conflicts_with = "cliques", required_unless_present = "cliques")]
        points: Option<PathBuf>,
        #[arg(long)]
        cliques: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Time clique mining on uniform synthetic data at fixed density.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "10000,20000,40000,80000")]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        taus: Vec<f64>,
        /// Points per Mpc^dims.
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        dims: usize,
        /// Run single-threaded code paths.
        #[arg(long)]
        sequential: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Neighborhood distance threshold and grid cell side, Mpc.
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// Expected point dimensionality (2 or 3).
    #[arg(long)]
    dims: Option<usize>,
    /// Hubble constant, km/s/Mpc.
    #[arg(long, default_value_t = DEFAULT_H0)]
    h0: f64,
    #[arg(long, default_value_t = 1)]
    min_support: usize,
    #[arg(long, default_value_t = 0.0)]
    min_minpi: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep only neighborhood lists that are cliques as a whole.
    #[arg(long)]
    faithful_prune: bool,
    /// Drop negative (absent-type) items.
    #[arg(long)]
    no_negatives: bool,
    /// Accepted side of the zConf 0.95 cut: lt or ge.
    #[arg(long, default_value = "lt")]
    zconf_direction: String,
    /// Fixed type universe, comma-separated.
    #[arg(long, value_delimiter = ',')]
    universe: Option<Vec<String>>,
}

impl Common {
    fn config(&self) -> gcg::Result<PipelineConfig> {
        let cfg = PipelineConfig {
            tau: self.tau,
            dims: self.dims.map(Dims::from_count).transpose()?,
            hubble: HubbleParams::with_h0(self.h0)?,
            thresholds: Thresholds::new(self.min_support, self.min_minpi)?,
            seed: self.seed,
            faithful_prune: self.faithful_prune,
            no_negatives: self.no_negatives,
            zconf_direction: self.zconf_direction.parse::<ZConfDirection>()?,
            universe: self
                .universe
                .as_ref()
                .map(|u| u.iter().map(|t| ObjectType::new(t.trim())).collect::<gcg::Result<Vec<_>>>())
                .transpose()?,
            exec: Execution::Parallel,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn parse_weights(pairs: &[String]) -> gcg::Result<Vec<(ObjectType, f64)>> {
    pairs
        .iter()
        .map(|p| {
            let (label, w) = p
                .split_once(':')
                .ok_or_else(|| gcg::Error::Input(format!("type weight {p:?} is not label:weight")))?;
            let w: f64 = w
                .trim()
                .parse()
                .map_err(|_| gcg::Error::Input(format!("bad weight in {p:?}")))?;
            Ok((ObjectType::new(label.trim())?, w))
        })
        .collect()
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Ingest { input, output, common } => {
            let cfg = common.config()?;
            let file = fs::File::open(&input).with_context(|| format!("opening {}", input.display()))?;
            let (text, report) = pipeline::ingest_stage(file, &input.display().to_string(), &cfg)?;
            emit(output.as_deref(), &text)?;
            eprintln!(
                "ingest: {} accepted, {} rejected ({} filtered, {} malformed)",
                report.accepted,
                report.rejected(),
                report.filtered,
                report.malformed
            );
        }
        Command::Synth {
            n,
            extent,
            types,
            clusters,
            sigma,
            output,
            common,
        } => {
            let cfg = common.config()?;
            let dims = cfg.dims.unwrap_or(Dims::Two);
            let extent = match extent.as_slice() {
                [side] => vec![*side; dims.count()],
                other => other.to_vec(),
            };
            if extent.len() != dims.count() {
                return Err(gcg::Error::Input(format!("--extent has {} values but --dims is {dims}", extent.len())).into());
            }
            let spec = SynthSpec {
                n,
                extent,
                type_weights: parse_weights(&types)?,
                seed: cfg.seed,
                clustering: clusters.map(|centers| ClusterSpec { centers, sigma }),
            };
            let ds = Dataset::new(dims, generate_synthetic(&spec)?)?;
            emit(output.as_deref(), &pipeline::points_text("synth", &cfg, &ds))?;
        }
        Command::MineCliques {
            points,
            output,
            histogram,
            common,
        } => {
            let cfg = common.config()?;
            let out = pipeline::mine_cliques_stage(&read(&points)?, &points.display().to_string(), &cfg)?;
            emit(output.as_deref(), &out.cliques)?;
            if let Some(h) = histogram {
                emit(Some(&h), &out.histogram)?;
            }
            log::info!("{} maximal cliques", out.records.len());
        }
        Command::ExtractRelations { cliques, output, common } => {
            let cfg = common.config()?;
            let text = pipeline::extract_relations_stage(&read(&cliques)?, &cliques.display().to_string(), &cfg)?;
            emit(output.as_deref(), &text)?;
        }
        Command::MinePatterns {
            transactions,
            output,
            common,
        } => {
            let cfg = common.config()?;
            let text = pipeline::mine_patterns_stage(&read(&transactions)?, &transactions.display().to_string(), &cfg)?;
            emit(output.as_deref(), &text)?;
        }
        Command::Stats {
            points,
            cliques,
            output,
            common,
        } => {
            let cfg = common.config()?;
            let text = match (points, cliques) {
                (Some(p), _) => {
                    let ds = pipeline::load_points(&read(&p)?, &p.display().to_string(), &cfg)?;
                    pipeline::type_distribution(&ds)
                }
                (None, Some(c)) => pipeline::clique_composition(&read_cliques(&read(&c)?, &c.display().to_string())?),
                (None, None) => unreachable!("clap requires one input"),
            };
            emit(output.as_deref(), &text)?;
        }
        Command::Bench {
            sizes,
            taus,
            density,
            repeats,
            seed,
            dims,
            sequential,
            output,
        } => {
            let cfg = BenchConfig {
                sizes,
                taus,
                seed,
                density,
                dims: Dims::from_count(dims)?,
                repeats,
            };
            let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
            emit(output.as_deref(), &render_rows(&run_bench(&cfg, exec)?))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match with_threads(cli.threads, || run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let invariant = err
                .downcast_ref::<gcg::Error>()
                .is_some_and(|e| !e.is_input_error());
            ExitCode::from(if invariant { 2 } else { 1 })
        }
    }
}
