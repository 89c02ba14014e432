use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use geocomm::graph::{sample_null, Graph};
use geocomm::{ModelParams, Sampler, Seed};
use geocomm_cli::config::{parse_count, ExperimentConfig, Overrides};
use geocomm_cli::report::{cycle_report, lowdeg_report, tau_report, wishart_report};
use geocomm_cli::{emit_json, CliError, RunOptions};

#[derive(Parser)]
#[command(name = "geocomm", version, about = "Planted geometric community experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long, value_parser = parse_count)]
    seed: Option<u64>,
    /// Worker threads; overrides the config.
    #[arg(long, value_parser = parse_count)]
    workers: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 3 when a series hits its order cap.
    #[arg(long)]
    strict: bool,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides { seed: self.seed, workers: self.workers.map(|w| w as usize), out: self.out.clone() }
    }

    fn load(&self) -> Result<ExperimentConfig, CliError> {
        let path = self.config.as_ref().ok_or_else(|| CliError::Config("--config is required".into()))?;
        let mut cfg = ExperimentConfig::load(path)?;
        cfg.apply(&self.overrides());
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    EdgeList,
    Binary,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Null,
    Geometric,
    Planted,
}

#[derive(Subcommand)]
enum Command {
    /// Threshold τ(p, d) with its residual and upper bound.
    Tau {
        #[arg(long)]
        p: f64,
        #[arg(long, value_parser = parse_count)]
        d: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Expected signed ℓ-cycle of the full geometric model.
    CycleExpectation {
        #[arg(long, value_parser = parse_count)]
        ell: u64,
        #[arg(long)]
        p: f64,
        #[arg(long, value_parser = parse_count)]
        d: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Error rates at the [model] point, as CSV.
    Test {
        #[command(flatten)]
        common: Common,
    },
    /// Error rates over the [sweep] grid, as CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Skip grid points already in the output file.
        #[arg(long)]
        resume: bool,
    },
    /// Truncated low-degree advantage and Fourier coefficients, as JSON.
    Lowdeg {
        #[command(flatten)]
        common: Common,
    },
    /// Matrix-route equivalence and spherical-Wishart spectrum, as JSON.
    Wishart {
        #[command(flatten)]
        common: Common,
    },
    /// Draws one graph and writes it as an edge list or binary bit field.
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_count)]
        n: Option<u64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, value_parser = parse_count)]
        d: Option<u64>,
        #[arg(long)]
        k: Option<f64>,
        #[arg(long, value_enum, default_value = "planted")]
        model: Model,
        #[arg(long, value_enum, default_value = "edge-list")]
        format: Format,
        /// Stream index of the draw.
        #[arg(long, default_value = "0", value_parser = parse_count)]
        index: u64,
    },
}

fn sample(
    common: &Common,
    n: Option<u64>,
    p: Option<f64>,
    d: Option<u64>,
    k: Option<f64>,
    model: Model,
    format: Format,
    index: u64,
) -> Result<(), CliError> {
    let base = match &common.config {
        Some(path) => Some(ExperimentConfig::load(path)?),
        None => None,
    };
    let missing = |what: &str| CliError::Config(format!("--{what} is required without a config"));
    let m = base.as_ref().map(|c| &c.model);
    let n = n.map(|x| x as usize).or(m.map(|m| m.n)).ok_or_else(|| missing("n"))?;
    let p = p.or(m.map(|m| m.p)).ok_or_else(|| missing("p"))?;
    let d = d.map(|x| x as usize).or(m.map(|m| m.d)).ok_or_else(|| missing("d"))?;
    let k = k.or(m.map(|m| m.k)).unwrap_or(n as f64);
    let seed = Seed(common.seed.or(base.as_ref().map(|c| c.seed)).unwrap_or(0));
    let params = ModelParams::new(n, p, d, k)?;
    let mut rng = seed.stream(index);
    let graph: Graph = match model {
        Model::Null => sample_null(n, p, &mut rng),
        Model::Geometric => Sampler::new(params)?.full_geometric(&mut rng).graph,
        Model::Planted => Sampler::new(params)?.planted(&mut rng).graph,
    };
    let bytes = match format {
        Format::EdgeList => graph.to_edge_list().into_bytes(),
        Format::Binary => graph.to_bytes(),
    };
    match &common.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::Write::write_all(&mut std::io::stdout(), &bytes)?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Tau { p, d, common } => emit_json(&tau_report(p, d as usize)?, common.out.as_deref()),
        Command::CycleExpectation { ell, p, d, common } => {
            emit_json(&cycle_report(ell as usize, p, d as usize, common.strict)?, common.out.as_deref())
        }
        Command::Test { common } => {
            let cfg = common.load()?;
            geocomm_cli::test(&cfg, &RunOptions { strict: common.strict, resume: false }).map(|_| ())
        }
        Command::Sweep { common, resume } => {
            let cfg = common.load()?;
            let summary = geocomm_cli::sweep(&cfg, &RunOptions { strict: common.strict, resume })?;
            if summary.skipped > 0 {
                eprintln!("resumed: skipped {} completed rows", summary.skipped);
            }
            Ok(())
        }
        Command::Lowdeg { common } => {
            let cfg = common.load()?;
            emit_json(&lowdeg_report(&cfg)?, cfg.out.as_deref())
        }
        Command::Wishart { common } => {
            let cfg = common.load()?;
            emit_json(&wishart_report(&cfg)?, cfg.out.as_deref())
        }
        Command::Sample { common, n, p, d, k, model, format, index } => {
            sample(&common, n, p, d, k, model, format, index)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("geocomm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
