//! `bmdm`: run single trials, sweep the experiment grid, write presets.

use std::path::PathBuf;
use std::process::ExitCode;

use bmdm::harness::{
    rmse, run_trial_with, sweep, worker_count, Axis, DynamicMode, PipelineOptions, StaticMethod,
};
use bmdm::scenario::{load_scenario, preset_condition, save_scenario, Condition, DEFAULT_SEED};
use bmdm::suppression::DynamicMethod;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Frames per trial for sweeps unless overridden.
const DESK_FRAMES: usize = 300;

#[derive(Parser)]
#[command(
    name = "bmdm",
    version,
    about = "Bridge micro-deformation monitoring simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one trial of a scenario file and report its RMSE.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Per-frame trace CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-frame suppression report CSV.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// RMSE of a reference condition along one parameter axis.
    Sweep {
        #[arg(long, value_parser = parse_condition)]
        condition: Condition,
        #[arg(long)]
        axis: Axis,
        /// Comma-separated axis values, e.g. `-20,-15,-10`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Vec<f64>,
        /// Trials per axis value.
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
        /// SNR for axes other than `snr` (dB).
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        snr: f64,
        #[arg(long, default_value_t = DESK_FRAMES)]
        frames: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Write a reference condition as a scenario file.
    Preset {
        #[arg(long, value_parser = parse_condition)]
        condition: Condition,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Args)]
struct PipelineArgs {
    /// Interferer suppression; defaults to the condition's reference method
    /// for sweeps and to the circularity test for single runs.
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Lowest radial speed the LCM-length mean must resolve (m/s).
    #[arg(long, default_value_t = 1.0)]
    ipm_min_velocity: f64,
    /// Skip static clutter removal.
    #[arg(long)]
    no_static: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Cpm,
    CfSdir,
    PmMdis,
    Ipm,
    None,
}

impl PipelineArgs {
    fn options(&self, default: DynamicMode) -> PipelineOptions {
        let dynamic = match self.method {
            None => default,
            Some(Method::Cpm) => DynamicMode::Cpm,
            Some(Method::CfSdir) => DynamicMode::CfSdir,
            Some(Method::PmMdis) => DynamicMode::PmMdis,
            Some(Method::Ipm) => DynamicMode::Ipm {
                min_velocity_mps: self.ipm_min_velocity,
            },
            Some(Method::None) => DynamicMode::Disabled,
        };
        PipelineOptions {
            dynamic,
            static_removal: !self.no_static,
        }
    }
}

fn parse_condition(s: &str) -> Result<Condition, String> {
    let id: u8 = s
        .parse()
        .map_err(|_| format!("`{s}` is not a condition number"))?;
    Condition::try_from(id).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> bmdm::Result<()> {
    match cli.command {
        Command::Run {
            scenario,
            seed,
            out,
            report,
            pipeline,
        } => {
            let cfg = load_scenario(&scenario)?;
            let opts = pipeline.options(DynamicMode::Cpm);
            let trial = run_trial_with(&cfg, seed, &opts)?;
            let s = &trial.suppression;
            println!("frames          {}", trial.trace.len());
            println!(
                "rmse_m          {:.6e}",
                rmse(std::slice::from_ref(&trial))?
            );
            println!("max_abs_err_m   {:.6e}", trial.trace.max_abs_error());
            println!("measured_snr_db {:.3}", trial.measured_snr_db);
            println!("wrap_corrections {}", trial.trace.total_wrap_corrections());
            println!(
                "dynamic         CF-SDIR {} / PM-MDIS {} / IPM {}",
                s.count(DynamicMethod::CfSdir),
                s.count(DynamicMethod::PmMdis),
                s.count(DynamicMethod::Ipm)
            );
            let static_label = match s.static_method {
                StaticMethod::CircleFit => "circle fit",
                StaticMethod::TemporalMean => "temporal mean (arc too short)",
                StaticMethod::Disabled => "disabled",
            };
            println!("static          {static_label}");
            if let Some(path) = out {
                trial.trace.export_csv(&path)?;
            }
            if let Some(path) = report {
                s.export_csv(&path)?;
            }
        }
        Command::Sweep {
            condition,
            axis,
            values,
            count,
            out,
            snr,
            frames,
            seed,
            pipeline,
        } => {
            let mut base = preset_condition(condition, seed);
            base.radio.frames = frames;
            base.snr_db = snr;
            let opts = pipeline.options(PipelineOptions::for_condition(condition).dynamic);
            let result = sweep(&base, axis, &values, count, &opts)?;
            result.export_csv(&out)?;
            eprintln!(
                "{} points x {} trials on {} workers in {:.1} s",
                result.points.len(),
                count,
                worker_count(),
                result.wall_time_s
            );
            for p in &result.points {
                println!(
                    "{} = {:>8}  rmse_m = {:.4e}",
                    axis.name(),
                    p.value,
                    p.rmse_m
                );
            }
        }
        Command::Preset {
            condition,
            out,
            seed,
        } => {
            save_scenario(&preset_condition(condition, seed), &out)?;
        }
    }
    Ok(())
}
