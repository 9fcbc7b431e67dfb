use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use beatcov::io::{self, DatasetReport};
use beatcov::metrics::MetricSet;
use beatcov::{
    matching, synth, trackers, with_workers, ActivationFunction, BeatSequence, ToleranceParams,
};

#[derive(Parser, Debug)]
#[command(
    name = "beatcov",
    version,
    about = "Beat-tracking evaluation with annotation coverage analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct ToleranceArgs {
    /// Context length in beats.
    #[arg(long = "L", default_value_t = 2)]
    context_len: usize,
    /// Upper bound of the tolerance window, seconds.
    #[arg(long, default_value_t = 0.070)]
    cap: f64,
    /// Tolerance as a fraction of the local inter-beat interval.
    #[arg(long, default_value_t = 0.175)]
    gamma: f64,
}

impl ToleranceArgs {
    fn params(self) -> Result<ToleranceParams, CliError> {
        ToleranceParams::new(self.cap, self.gamma, self.context_len)
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate every reference/estimate pair in two directories.
    Eval {
        #[arg(long = "ref")]
        ref_dir: PathBuf,
        #[arg(long = "est")]
        est_dir: PathBuf,
        #[command(flatten)]
        tolerance: ToleranceArgs,
        /// Comma-separated metric families: f1, cmlt/amlt, lcorrect, acr/mlsr, or all.
        #[arg(long, default_value = "all")]
        metrics: String,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Turn an activation curve into beat times.
    Track {
        #[arg(long)]
        activation: PathBuf,
        #[arg(long, value_enum)]
        ppt: Ppt,
        /// Global tempo for the DP tracker, BPM.
        #[arg(long, conflicts_with = "ref_file")]
        tempo: Option<f64>,
        /// Reference beats to derive the DP tempo from.
        #[arg(long = "ref")]
        ref_file: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Peak threshold for SPPK.
        #[arg(long, default_value_t = trackers::DEFAULT_SPPK_THRESHOLD)]
        threshold: f64,
        /// Minimum distance between SPPK peaks, seconds.
        #[arg(long, default_value_t = trackers::DEFAULT_SPPK_MIN_GAP)]
        min_gap: f64,
        /// Transition penalty weight for the DP tracker.
        #[arg(long, default_value_t = trackers::DEFAULT_DP_LAMBDA)]
        lambda: f64,
    },
    /// Render a coverage chart for one track.
    Viz {
        #[arg(long = "ref")]
        ref_file: PathBuf,
        #[arg(long = "est")]
        est_file: PathBuf,
        #[arg(long)]
        activation: Option<PathBuf>,
        #[command(flatten)]
        tolerance: ToleranceArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic reference, estimate and activation from a scenario file.
    Synth {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_ref: PathBuf,
        #[arg(long)]
        out_est: PathBuf,
        #[arg(long)]
        out_act: Option<PathBuf>,
    },
    /// Dataset statistics for a directory of reference beat files.
    Stats {
        #[arg(long = "ref")]
        ref_dir: PathBuf,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Ppt {
    Dp,
    Sppk,
}

enum CliError {
    Usage(String),
    Data(anyhow::Error),
}

impl From<beatcov::Error> for CliError {
    fn from(e: beatcov::Error) -> Self {
        CliError::Data(e.into())
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Data(e)
    }
}

fn load_beats(path: &Path) -> anyhow::Result<BeatSequence> {
    io::parse_beats_file(path).with_context(|| format!("loading beats from {}", path.display()))
}

fn load_activation(path: &Path) -> anyhow::Result<ActivationFunction> {
    io::parse_activation_file(path)
        .with_context(|| format!("loading activation from {}", path.display()))
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Eval {
            ref_dir,
            est_dir,
            tolerance,
            metrics,
            out,
            jobs,
        } => {
            let params = tolerance.params()?;
            let metric_set: MetricSet = metrics
                .parse()
                .map_err(|e: beatcov::Error| CliError::Usage(e.to_string()))?;
            let report = with_workers(jobs, || {
                io::evaluate_dataset(&ref_dir, &est_dir, &params, metric_set)
            })?;
            report.write_json(&out)?;
            print_summary(&report);
        }
        Command::Track {
            activation,
            ppt,
            tempo,
            ref_file,
            out,
            threshold,
            min_gap,
            lambda,
        } => {
            let act = load_activation(&activation)?;
            let beats = match ppt {
                Ppt::Sppk => trackers::sppk(&act, threshold, min_gap),
                Ppt::Dp => {
                    let tempo = match (tempo, ref_file) {
                        (Some(t), _) => t,
                        (None, Some(path)) => {
                            let reference = load_beats(&path)?;
                            trackers::global_tempo_from_reference(&reference)
                                .with_context(|| format!("tempo from {}", path.display()))?
                        }
                        (None, None) => {
                            return Err(CliError::Usage(
                                "the dp tracker needs --tempo or --ref".into(),
                            ))
                        }
                    };
                    let config = trackers::DpConfig {
                        lambda,
                        ..Default::default()
                    };
                    trackers::dp_track_with(&act, tempo, &config)?
                }
            };
            io::write_beats_file(&out, &beats)?;
            eprintln!("{} beats written to {}", beats.len(), out.display());
        }
        Command::Viz {
            ref_file,
            est_file,
            activation,
            tolerance,
            out,
        } => {
            let params = tolerance.params()?;
            let reference = load_beats(&ref_file)?;
            let est = load_beats(&est_file)?;
            let act = activation.as_deref().map(load_activation).transpose()?;
            let cm = matching::coverage_matrix(&reference, &est, &params)?;
            io::write_coverage_svg(&out, &cm, &reference, act.as_ref(), Some(&est))?;
        }
        Command::Synth {
            scenario,
            seed,
            out_ref,
            out_est,
            out_act,
        } => {
            let scenario = synth::load_scenario(&scenario)?;
            let reference = scenario.reference()?;
            let est = synth::gen_estimate(&reference, &scenario, seed)?;
            io::write_beats_file(&out_ref, &reference)?;
            io::write_beats_file(&out_est, &est)?;
            if let Some(path) = out_act {
                let act = synth::gen_activation(
                    &reference,
                    &scenario.activation,
                    scenario.duration,
                    seed,
                )?;
                io::write_activation_file(&path, &act)?;
            }
        }
        Command::Stats { ref_dir, json } => {
            let files = io::files_by_stem(&ref_dir)?;
            let refs = files
                .values()
                .map(|p| load_beats(p))
                .collect::<anyhow::Result<Vec<_>>>()?;
            let stats = io::dataset_stats(&refs);
            if json {
                let text = serde_json::to_string_pretty(&stats).context("serializing stats")?;
                println!("{text}");
            } else {
                let total = stats.total_duration.round() as u64;
                println!("# tracks           {}", stats.n_tracks);
                println!(
                    "total duration     {}h {:02}m",
                    total / 3600,
                    (total % 3600) / 60
                );
                println!("% stable tempi     {:.1}%", stats.percent_stable_tempi);
                println!("mean track tempo   {:.2} BPM", stats.mean_track_tempo);
            }
        }
    }
    Ok(())
}

fn print_summary(report: &DatasetReport) {
    println!("{} tracks evaluated", report.tracks.len());
    for (name, value) in &report.means {
        println!("{name:<32} {value:.3}");
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
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
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
