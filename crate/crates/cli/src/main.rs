//! `symdis`: seeded experiments over the hypervector factor model.

mod commands;
mod config;
mod error;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use symdis_core::experiments::ObjectSet;
use symdis_core::{DifferenceMode, ProbePolicy, Reconstruction};

use crate::config::{ExperimentConfig, SchemaDefault, SchemaSpec};
use crate::error::{CliError, Status};

#[derive(Debug, Parser)]
#[command(name = "symdis", version, about = "Hypervector factor model experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// JSON config file, or any JSON/CSV/PGM output of this tool.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config's master_seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the config's dim.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Schema preset (dsprites, metric) or path to a JSON factor list.
    #[arg(long, global = true)]
    schema: Option<String>,
    /// Directory receiving every output file.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReconstructionArg {
    Faithful,
    Scrambled,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    All,
    SkipIdentical,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObjectSetArg {
    Random,
    SymmetrySafe,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a paired dataset (JSONL plus manifest).
    GenPairs {
        #[arg(long)]
        count: Option<usize>,
        /// Drop squares in the right half of the frame.
        #[arg(long)]
        exclusion: bool,
        /// Pairs differ in K factors instead of one.
        #[arg(long, value_name = "K")]
        multi: Option<usize>,
    },
    /// Encode and decode random objects; report per-factor accuracy.
    Roundtrip {
        #[arg(long)]
        trials: Option<usize>,
        /// Also write the item memory (memory.bin plus JSON sidecar).
        #[arg(long)]
        save_memory: bool,
    },
    /// Check latent exchanges against the symbolic swap on a dataset.
    Exchange {
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Modularity and compactness of the symbolic pipeline.
    Metrics {
        #[arg(long, value_enum)]
        reconstruction: Option<ReconstructionArg>,
        #[arg(long, value_enum)]
        policy: Option<PolicyArg>,
        #[arg(long, value_enum)]
        object_set: Option<ObjectSetArg>,
        #[arg(long)]
        objects: Option<usize>,
    },
    /// Decode accuracy per factor across noise levels.
    NoiseSweep {
        /// Absolute noise standard deviations.
        #[arg(long, value_delimiter = ',')]
        sigmas: Option<Vec<f64>>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Accuracy, DMM and DCM across dimensions.
    DimAblation {
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Render objects as PGM images.
    Render {
        /// Comma-separated value indices; repeat for a batch.
        #[arg(long = "object", value_name = "V0,V1,..")]
        objects: Vec<String>,
        /// JSON array of objects rendered into a directory with an index.
        #[arg(long)]
        batch: Option<PathBuf>,
    },
    /// Classify a PGM image against the renderer's templates.
    Classify {
        #[arg(long)]
        image: PathBuf,
    },
}

impl Command {
    fn schema_default(&self) -> SchemaDefault {
        match self {
            Self::Metrics { .. } | Self::Render { .. } | Self::Classify { .. } => SchemaDefault::Metric,
            _ => SchemaDefault::Dsprites,
        }
    }

    fn apply(&self, cfg: &mut ExperimentConfig) {
        match *self {
            Self::GenPairs { count, exclusion, multi } => {
                if let Some(c) = count {
                    cfg.count = c;
                }
                cfg.exclusion |= exclusion;
                if let Some(k) = multi {
                    cfg.difference = if k == 1 { DifferenceMode::Single } else { DifferenceMode::Multi { k } };
                }
            }
            Self::Roundtrip { trials, .. } => {
                if let Some(t) = trials {
                    cfg.trials = t;
                }
            }
            Self::Metrics { reconstruction, policy, object_set, objects } => {
                if let Some(r) = reconstruction {
                    cfg.reconstruction = match r {
                        ReconstructionArg::Faithful => Reconstruction::Faithful,
                        ReconstructionArg::Scrambled => Reconstruction::Scrambled,
                    };
                }
                if let Some(p) = policy {
                    cfg.policy = match p {
                        PolicyArg::All => ProbePolicy::All,
                        PolicyArg::SkipIdentical => ProbePolicy::SkipIdenticalReconstruction,
                    };
                }
                if let Some(s) = object_set {
                    cfg.object_set = match s {
                        ObjectSetArg::Random => ObjectSet::Random,
                        ObjectSetArg::SymmetrySafe => ObjectSet::SymmetrySafe,
                    };
                }
                if let Some(n) = objects {
                    cfg.metric_objects = n;
                }
            }
            Self::NoiseSweep { ref sigmas, trials } => {
                if let Some(s) = sigmas {
                    cfg.sigmas = Some(s.clone());
                }
                if let Some(t) = trials {
                    cfg.trials = t;
                }
            }
            Self::DimAblation { ref dims, trials } => {
                if let Some(d) = dims {
                    cfg.dims = d.clone();
                }
                if let Some(t) = trials {
                    cfg.ablation_trials = t;
                }
            }
            Self::Exchange { .. } | Self::Render { .. } | Self::Classify { .. } => {}
        }
    }
}

fn resolve(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &cli.global.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.global.seed {
        cfg.master_seed = seed;
    }
    if let Some(dim) = cli.global.dim {
        cfg.dim = dim;
    }
    if let Some(s) = &cli.global.schema {
        cfg.schema = Some(SchemaSpec::Named(s.clone()));
    }
    cli.command.apply(&mut cfg);
    cfg.resolve(cli.command.schema_default())
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let cfg = resolve(cli)?;
    let out: &Path = &cli.global.out_dir;
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    match &cli.command {
        Command::GenPairs { .. } => commands::gen_pairs(&cfg, out),
        Command::Roundtrip { save_memory, .. } => commands::roundtrip(&cfg, out, *save_memory),
        Command::Exchange { dataset } => commands::exchange(&cfg, out, dataset),
        Command::Metrics { .. } => commands::metrics(&cfg, out),
        Command::NoiseSweep { .. } => commands::noise(&cfg, out),
        Command::DimAblation { .. } => commands::ablation(&cfg, out),
        Command::Render { objects, batch } => {
            let mut list = objects
                .iter()
                .map(|s| commands::parse_object(s))
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(path) = batch {
                list.extend(commands::read_object_list(path)?);
            }
            let batched = batch.is_some() || list.len() > 1;
            commands::render_objects(&cfg, out, &list, batched)
        }
        Command::Classify { image } => commands::classify(&cfg, out, image),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            Status::Ok.into()
        }
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            e.status().into()
        }
    }
}
