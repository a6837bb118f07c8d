//! `ripwire <stage> --config FILE [--override key=value]...`
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 internal error.

use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use ripwire::eval::ExperimentGrid;
use ripwire::pipeline::{evaluate_store, write_results, Pipeline, Stage};
use ripwire::Error;

#[derive(Parser)]
#[command(name = "ripwire", version, about = "Early detection of death hoaxes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Pipeline configuration (TOML). Defaults apply when omitted.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Set a configuration value, e.g. `synth.reports=500`.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus, knowledge base and label file.
    Synth(Common),
    /// Keep tweets with an upper-case RIP.
    Ingest(Common),
    /// Match tweets to knowledge-base people.
    Link(Common),
    /// Aggregate matches into death reports.
    BuildReports(Common),
    /// Serve the annotation API over the report store.
    AnnotateServe {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        store: Option<PathBuf>,
        #[arg(long)]
        port: Option<u16>,
        #[arg(long, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
        host: IpAddr,
    },
    /// Record sidecar labels as annotations.
    AnnotateImport(Common),
    /// Train the single and per-class embedding models.
    TrainEmbeddings(Common),
    /// Write feature matrices for every grid cell.
    Featurize(Common),
    /// Fit one classifier per grid cell.
    Train(Common),
    /// Score the classifiers, or with --grid/--store/--models/--out run the
    /// whole grid in memory.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// Grid configuration (`key = value` lines).
        #[arg(long, requires_all = ["store", "models", "out"])]
        grid: Option<PathBuf>,
        #[arg(long)]
        store: Option<PathBuf>,
        #[arg(long)]
        models: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every batch stage in order.
    All(Common),
}

fn pipeline(common: &Common) -> ripwire::Result<Pipeline> {
    match &common.config {
        Some(path) => Pipeline::from_file(path, &common.overrides),
        None => {
            let config = ripwire::pipeline::PipelineConfig::from_toml("", &common.overrides)?;
            Ok(Pipeline::new(config, "."))
        }
    }
}

fn run_stage(common: &Common, stage: Stage) -> ripwire::Result<()> {
    let p = pipeline(common)?;
    let manifest = p.run(stage)?;
    for (k, v) in &manifest.stats {
        info!("{stage}: {k} = {v}");
    }
    Ok(())
}

fn run(cli: Cli) -> ripwire::Result<()> {
    match cli.command {
        Command::Synth(c) => run_stage(&c, Stage::Synth),
        Command::Ingest(c) => run_stage(&c, Stage::Ingest),
        Command::Link(c) => run_stage(&c, Stage::Link),
        Command::BuildReports(c) => run_stage(&c, Stage::BuildReports),
        Command::AnnotateImport(c) => run_stage(&c, Stage::AnnotateImport),
        Command::TrainEmbeddings(c) => run_stage(&c, Stage::TrainEmbeddings),
        Command::Featurize(c) => run_stage(&c, Stage::Featurize),
        Command::Train(c) => run_stage(&c, Stage::Train),
        Command::AnnotateServe {
            common,
            store,
            port,
            host,
        } => {
            let p = pipeline(&common)?;
            let store = store.unwrap_or(p.config.paths.store.clone());
            let port = port.unwrap_or(p.config.annotate.port);
            ripwire_annotate::serve_blocking(&store, SocketAddr::new(host, port))
        }
        Command::Evaluate {
            common,
            grid: Some(grid),
            store: Some(store),
            models: Some(models),
            out: Some(out),
        } => {
            let text = std::fs::read_to_string(&grid).map_err(|e| Error::Io {
                context: grid.display().to_string(),
                source: e,
            })?;
            let grid = ExperimentGrid::parse(&text)?;
            if !common.overrides.is_empty() || common.config.is_some() {
                log::warn!("--config and --override are ignored with --grid");
            }
            let table = evaluate_store(&grid, &store, &models)?;
            write_results(&out, &table)?;
            Ok(())
        }
        Command::Evaluate { common, .. } => run_stage(&common, Stage::Evaluate),
        Command::All(c) => {
            let p = pipeline(&c)?;
            for stage in Stage::BATCH {
                p.run(stage)?;
            }
            Ok(())
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 1,
        Error::Precondition(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => ExitCode::from(3),
    }
}
