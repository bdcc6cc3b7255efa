use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use xanfis::experiment::{self, CommandReport, ExperimentConfig, SweepSpec};
use xanfis::{MfKind, Mode};

#[derive(Parser)]
#[command(
    name = "xanfis",
    version,
    about = "Neuro-fuzzy regression with distinguishable partitions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one model per seed and report test metrics.
    Train(Common),
    /// Compare Gaussian and Cauchy ANFIS across initial scales.
    InitStudy {
        #[command(flatten)]
        common: Common,
        /// Comma-separated initial scales.
        #[arg(long, value_delimiter = ',', required = true)]
        scales: Vec<f64>,
    },
    /// Sweep the MO-ANFIS weight and extract the Pareto front.
    ParetoSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        weights_count: usize,
        /// Weight range as LO,HI.
        #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.01, 10.0])]
        weights_range: Vec<f64>,
    },
    /// Write centers and sampled membership curves of a saved model.
    ExportPartition {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 201)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dataset manifest (TOML).
    #[arg(long, conflicts_with = "synth")]
    manifest: Option<PathBuf>,
    /// Synthetic dataset: two_blob, sinc2d or friedman.
    #[arg(long)]
    synth: Option<String>,
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    rules: Option<usize>,
    /// Number of seeds (0..N) or a comma-separated list.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    mf: Option<MfKind>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Record per-epoch centers and scales.
    #[arg(long)]
    trajectory: bool,
}

impl Common {
    fn resolve(self) -> xanfis::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::read(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(m) = self.manifest {
            cfg.data.manifest = Some(m);
            cfg.data.synth = None;
        }
        if let Some(s) = self.synth {
            cfg.data.manifest = None;
            cfg.data.synth = Some(s);
        }
        if let Some(m) = self.mode {
            cfg.train.mode = m;
        }
        if let Some(r) = self.rules {
            cfg.rules = r;
        }
        if let Some(s) = self.seeds {
            cfg.seeds = match s.as_slice() {
                [n] => (0..*n).collect(),
                list => list.to_vec(),
            };
        }
        if let Some(m) = self.mf {
            cfg.mf_kind = m;
        }
        if let Some(o) = self.out {
            cfg.out = o;
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        cfg.trajectory |= self.trajectory;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> xanfis::Result<CommandReport> {
    match cli.command {
        Command::Train(common) => {
            let cfg = common.resolve()?;
            log::info!("{cfg}");
            experiment::cmd_train(&cfg)
        }
        Command::InitStudy { common, scales } => {
            let cfg = common.resolve()?;
            log::info!("{cfg}");
            experiment::cmd_init_study(&cfg, &scales)
        }
        Command::ParetoSweep {
            common,
            weights_count,
            weights_range,
        } => {
            let cfg = common.resolve()?;
            log::info!("{cfg}");
            let sweep = SweepSpec {
                count: weights_count,
                lo: weights_range[0],
                hi: weights_range[1],
                ..SweepSpec::default()
            };
            experiment::cmd_pareto_sweep(&cfg, &sweep)
        }
        Command::ExportPartition {
            model,
            samples,
            out,
        } => experiment::cmd_export_partition(&model, samples, &out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(report) => {
            for r in &report.runs {
                println!(
                    "{:<40} r2 {:>8.4}  mean_d {:.4}  best epoch {}",
                    r.spec.run_id, r.report.r2, r.report.mean_d, r.outcome.best_epoch
                );
            }
            for w in &report.warnings {
                println!("warning: {w}");
            }
            println!("wrote {} files", report.files.len());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
