//! Monte Carlo trials, RMSE aggregation and parameter sweeps.
//!
//! A trial streams the echo frame by frame: each frame is synthesized once,
//! evaluated at the monitored range bin, and discarded, so memory stays at
//! one frame regardless of `P`. The noiseless echo and a unit-variance noise
//! realization are probed separately and combined once the mean signal power
//! (and hence the noise variance) is known; the range transform is linear,
//! so this equals probing the noisy echo.

use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bridge::{sample_deformation_truth, to_spherical, DeformationTruth};
use crate::echo::{add_frame_noise, EchoSynthesizer};
use crate::error::{Error, Result};
use crate::estimation::{estimate_trace, DeformationTrace};
use crate::range::{bin_resolution, micro_range_bin, BinProbe, FeatureMatrix};
use crate::scenario::{randomize_interferers, Condition, ScenarioConfig};
use crate::suppression::{
    cf_msir, cf_sdir, cpm, ipm_mean, ipm_plan, pm_mdis, subtract_temporal_mean, CpmConfig,
    DynamicMethod, IpmStatus, PhasorSeries,
};

/// Environment variable capping the number of worker threads.
pub const WORKERS_ENV: &str = "BMDM_WORKERS";

/// How each frame's symbol samples are reduced to one static phasor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DynamicMode {
    /// Circularity test picks the circle center or the mean.
    Cpm,
    /// Circle center; the mean when the fit is degenerate.
    CfSdir,
    PmMdis,
    /// Mean over the LCM of detected Doppler periods, using every captured
    /// symbol for detection.
    Ipm {
        min_velocity_mps: f64,
    },
    /// No interferer removal: the first symbol of each frame.
    Disabled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOptions {
    pub dynamic: DynamicMode,
    pub static_removal: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            dynamic: DynamicMode::Cpm,
            static_removal: true,
        }
    }
}

impl PipelineOptions {
    /// Full suppression as used for each reference condition: the
    /// circularity test without movers, the circle center for a single
    /// mover, the phasor mean for several.
    pub fn for_condition(condition: Condition) -> Self {
        let dynamic = match condition {
            Condition::I => DynamicMode::Cpm,
            Condition::II => DynamicMode::CfSdir,
            Condition::III => DynamicMode::PmMdis,
        };
        PipelineOptions {
            dynamic,
            static_removal: true,
        }
    }

    /// No dynamic or static removal.
    pub fn unsuppressed() -> Self {
        PipelineOptions {
            dynamic: DynamicMode::Disabled,
            static_removal: false,
        }
    }
}

/// Feature samples at the monitored bin plus the bookkeeping needed to
/// score them.
#[derive(Debug, Clone)]
pub struct SimulatedFeatures {
    pub features: FeatureMatrix,
    pub truth: DeformationTruth,
    /// Mean noiseless `|Y|^2` per resource element.
    pub signal_power: f64,
    pub noise_variance: f64,
    /// Realized `sum |n|^2` over the whole tensor.
    pub noise_energy: f64,
    /// Power ratio of the configured beam to a perfectly aligned one.
    pub alignment_loss: f64,
    pub elements: usize,
}

impl SimulatedFeatures {
    /// Measured SNR, referenced to the aligned-beam signal power like the
    /// requested SNR. `+inf` for noiseless runs.
    pub fn measured_snr_db(&self) -> f64 {
        if self.noise_energy == 0.0 {
            return f64::INFINITY;
        }
        let noise = self.noise_energy / self.elements as f64;
        10.0 * (self.signal_power / self.alignment_loss / noise).log10()
    }
}

/// Synthesizes the echo for `seed` and returns the samples at the monitored
/// range bin.
pub fn simulate_features(cfg: &ScenarioConfig, seed: u64) -> Result<SimulatedFeatures> {
    let mut cfg = cfg.clone();
    cfg.validate()?;
    let r = &cfg.radio;
    let r0 = to_spherical(&r.monitor_point, 0.0)?.range_m;
    let bin = micro_range_bin(r0, r.subcarriers, r.subcarrier_spacing_hz)?;
    let truth = sample_deformation_truth(&cfg);
    let synth = EchoSynthesizer::new(&cfg, &truth)?;
    let probe = BinProbe::new(r.subcarriers, bin);

    let frames = synth.frames();
    let symbols = synth.symbols();
    let mut buf = vec![Complex64::new(0.0, 0.0); synth.frame_len()];
    let mut clean = Vec::with_capacity(frames * symbols);
    let mut noise = Vec::with_capacity(frames * symbols);
    let mut power = 0.0;
    let mut unit_energy = 0.0;
    let noiseless = cfg.is_noiseless();
    for p in 0..frames {
        synth.noiseless_frame(p, &mut buf);
        power += buf.iter().map(|z| z.norm_sqr()).sum::<f64>();
        probe.eval_rows(&buf, &mut clean);
        if !noiseless {
            buf.fill(Complex64::new(0.0, 0.0));
            unit_energy += add_frame_noise(&mut buf, 1.0, seed, p);
            probe.eval_rows(&buf, &mut noise);
        }
    }
    let elements = frames * synth.frame_len();
    let signal_power = power / elements as f64;
    let noise_variance = synth.noise_variance(signal_power, cfg.snr_db)?;
    let sigma = noise_variance.sqrt();
    if !noiseless {
        for (c, n) in clean.iter_mut().zip(&noise) {
            *c += n * sigma;
        }
    }

    Ok(SimulatedFeatures {
        features: FeatureMatrix {
            frames,
            symbols,
            data: clean,
            bin,
            bin_resolution_m: bin_resolution(r.subcarriers, r.subcarrier_spacing_hz),
        },
        truth,
        signal_power,
        noise_variance,
        noise_energy: unit_energy * noise_variance,
        alignment_loss: synth.gains.alignment_loss(),
        elements,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StaticMethod {
    CircleFit,
    /// Arc too short for a fit; the temporal mean was subtracted.
    TemporalMean,
    Disabled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameReport {
    /// `None` when dynamic suppression is disabled.
    pub method: Option<DynamicMethod>,
    /// Circularity-test score; zero unless the circularity test ran and its
    /// fit was usable.
    pub qualified_fraction: f64,
    pub ipm_symbols: Option<usize>,
    pub ipm_status: Option<IpmStatus>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuppressionReport {
    pub frames: Vec<FrameReport>,
    pub static_method: StaticMethod,
    pub static_center: Option<Complex64>,
}

#[derive(Serialize)]
struct ReportRow<'a> {
    frame: usize,
    method: &'a str,
    qualified_fraction: f64,
    ipm_symbols: Option<usize>,
}

impl SuppressionReport {
    pub fn count(&self, method: DynamicMethod) -> usize {
        self.frames
            .iter()
            .filter(|f| f.method == Some(method))
            .count()
    }

    /// Columns: `frame, method, qualified_fraction, ipm_symbols`.
    pub fn export_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path.as_ref())?;
        for (p, f) in self.frames.iter().enumerate() {
            w.serialize(ReportRow {
                frame: p,
                method: f.method.map_or("none", DynamicMethod::label),
                qualified_fraction: f.qualified_fraction,
                ipm_symbols: f.ipm_symbols,
            })?;
        }
        w.flush().map_err(|e| Error::io(path.as_ref(), e))?;
        Ok(())
    }
}

fn frame_error(p: usize, source: Error) -> Error {
    Error::Frame {
        context: format!("frame {p}"),
        source: Box::new(source),
    }
}

/// Runs dynamic suppression, static removal and estimation on simulated
/// features.
pub fn estimate(
    sim: &SimulatedFeatures,
    cfg: &ScenarioConfig,
    opts: &PipelineOptions,
) -> Result<(DeformationTrace, SuppressionReport)> {
    let radio = &cfg.radio;
    let sensing = radio.symbols.min(sim.features.symbols);
    let cpm_cfg = CpmConfig {
        threshold_factor: cfg.cpm_threshold_factor,
        circular_proportion: cfg.cpm_circular_proportion,
        min_points: 3,
    };

    let mut values = Vec::with_capacity(sim.features.frames);
    let mut reports = Vec::with_capacity(sim.features.frames);
    for p in 0..sim.features.frames {
        let captured = sim.features.frame(p);
        let points = &captured[..sensing];
        let mut report = FrameReport {
            method: None,
            qualified_fraction: 0.0,
            ipm_symbols: None,
            ipm_status: None,
        };
        let value = match opts.dynamic {
            DynamicMode::Disabled => points[0],
            DynamicMode::PmMdis => {
                report.method = Some(DynamicMethod::PmMdis);
                pm_mdis(points).map_err(|e| frame_error(p, e))?
            }
            DynamicMode::CfSdir => match cf_sdir(points) {
                Ok(center) => {
                    report.method = Some(DynamicMethod::CfSdir);
                    center
                }
                Err(_) => {
                    report.method = Some(DynamicMethod::PmMdis);
                    pm_mdis(points).map_err(|e| frame_error(p, e))?
                }
            },
            DynamicMode::Cpm => {
                let out = cpm(points, &cpm_cfg).map_err(|e| frame_error(p, e))?;
                report.method = Some(out.method);
                report.qualified_fraction = out.qualified_fraction();
                out.value
            }
            DynamicMode::Ipm { min_velocity_mps } => {
                let plan =
                    ipm_plan(captured, radio, min_velocity_mps).map_err(|e| frame_error(p, e))?;
                report.method = Some(DynamicMethod::Ipm);
                report.ipm_symbols = Some(plan.symbols);
                report.ipm_status = Some(plan.status);
                ipm_mean(captured, &plan).map_err(|e| frame_error(p, e))?
            }
        };
        values.push(value);
        reports.push(report);
    }

    let series = PhasorSeries::post_dynamic(values);
    let (series, static_method) = if opts.static_removal {
        match cf_msir(&series) {
            Ok(s) => (s, StaticMethod::CircleFit),
            Err(Error::DegenerateFit(_)) => {
                (subtract_temporal_mean(&series)?, StaticMethod::TemporalMean)
            }
            Err(e) => return Err(e),
        }
    } else {
        (series, StaticMethod::Disabled)
    };
    let trace = estimate_trace(&series, radio)?.with_truth(sim.truth.relative())?;
    Ok((
        trace,
        SuppressionReport {
            frames: reports,
            static_method,
            static_center: series.static_center,
        },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trace: DeformationTrace,
    pub suppression: SuppressionReport,
    pub measured_snr_db: f64,
    pub seed: u64,
}

/// One Monte Carlo trial with the default pipeline.
pub fn run_trial(cfg: &ScenarioConfig, seed: u64) -> Result<TrialResult> {
    run_trial_with(cfg, seed, &PipelineOptions::default())
}

pub fn run_trial_with(
    cfg: &ScenarioConfig,
    seed: u64,
    opts: &PipelineOptions,
) -> Result<TrialResult> {
    let sim = simulate_features(cfg, seed)?;
    let (trace, suppression) = estimate(&sim, cfg, opts)?;
    Ok(TrialResult {
        trace,
        suppression,
        measured_snr_db: sim.measured_snr_db(),
        seed,
    })
}

/// Root mean square deformation error over every frame of every trial.
pub fn rmse(trials: &[TrialResult]) -> Result<f64> {
    rmse_of_traces(trials.iter().map(|t| &t.trace))
}

pub fn rmse_of_traces<'a>(traces: impl IntoIterator<Item = &'a DeformationTrace>) -> Result<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut frames: Option<usize> = None;
    for trace in traces {
        match frames {
            Some(f) if f != trace.len() => {
                return Err(Error::validation(
                    "frames_P",
                    "trials differ in frame count",
                ))
            }
            _ => frames = Some(trace.len()),
        }
        sum += trace.errors().map(|e| e * e).sum::<f64>();
        count += trace.len();
    }
    if count == 0 {
        return Err(Error::EmptyInput("trials"));
    }
    Ok((sum / count as f64).sqrt())
}

/// Seed of trial `index`: the scenario seed with the index folded in.
pub fn trial_seed(base: u64, index: usize) -> u64 {
    base ^ index as u64
}

/// Worker count from `BMDM_WORKERS`, else the available parallelism.
pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| Error::InvalidSweep(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "snr")]
    Snr,
    #[serde(rename = "M")]
    Subcarriers,
    #[serde(rename = "N")]
    Symbols,
    #[serde(rename = "K")]
    Interferers,
    #[serde(rename = "offset")]
    BeamOffset,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Snr => "snr",
            Axis::Subcarriers => "M",
            Axis::Symbols => "N",
            Axis::Interferers => "K",
            Axis::BeamOffset => "offset",
        }
    }

    fn check(self, value: f64) -> Result<()> {
        let bad = |why: &str| {
            Err(Error::InvalidSweep(format!(
                "{} = {value}: {why}",
                self.name()
            )))
        };
        if value.is_nan() {
            return bad("not a number");
        }
        match self {
            Axis::Snr => Ok(()),
            Axis::BeamOffset if value.is_finite() => Ok(()),
            Axis::BeamOffset => bad("offset must be finite"),
            Axis::Subcarriers | Axis::Symbols if value.fract() == 0.0 && value >= 1.0 => Ok(()),
            Axis::Subcarriers | Axis::Symbols => bad("expected a positive integer"),
            Axis::Interferers if value.fract() == 0.0 && (0.0..=1024.0).contains(&value) => Ok(()),
            Axis::Interferers => bad("expected a non-negative integer"),
        }
    }

    /// Scenario for trial `seed` at axis point `value`.
    pub fn apply(self, base: &ScenarioConfig, value: f64, seed: u64) -> ScenarioConfig {
        let mut cfg = base.clone();
        match self {
            Axis::Snr => cfg.snr_db = value,
            Axis::Subcarriers => cfg.radio.subcarriers = value as usize,
            Axis::Symbols => cfg.radio.symbols = value as usize,
            Axis::Interferers => randomize_interferers(&mut cfg, value as usize, seed),
            Axis::BeamOffset => {
                let d = cfg.bridge.direction;
                cfg.radio.beam_offset = [value * d[0], value * d[1], value * d[2]];
            }
        }
        cfg
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "snr" | "snr_db" => Ok(Axis::Snr),
            "M" => Ok(Axis::Subcarriers),
            "N" => Ok(Axis::Symbols),
            "K" => Ok(Axis::Interferers),
            "offset" | "beam_offset" => Ok(Axis::BeamOffset),
            other => Err(Error::InvalidSweep(format!(
                "unknown axis `{other}` (expected snr, M, N, K or offset)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub axis: Axis,
    pub value: f64,
    pub rmse_m: f64,
    pub trials: usize,
    /// Mean measured SNR over the trials (dB).
    pub measured_snr_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: Axis,
    pub points: Vec<SweepPoint>,
    pub count: usize,
    /// Not exported, so repeated sweeps produce identical files.
    pub wall_time_s: f64,
}

impl SweepResult {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn rmse(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.rmse_m).collect()
    }

    /// Columns: `axis, value, rmse_m, trials, measured_snr_db`.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for p in &self.points {
            w.serialize(p)?;
        }
        w.flush().map_err(|e| Error::io("<sweep>", e))?;
        Ok(())
    }

    pub fn export_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

pub fn read_sweep_csv(path: impl AsRef<Path>) -> Result<Vec<SweepPoint>> {
    let mut r = csv::Reader::from_path(path.as_ref())?;
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

/// Sweeps one axis with `count` trials per value.
pub fn sweep(
    base: &ScenarioConfig,
    axis: Axis,
    values: &[f64],
    count: usize,
    opts: &PipelineOptions,
) -> Result<SweepResult> {
    let mut out = sweep_pipelines(base, axis, values, count, std::slice::from_ref(opts))?;
    Ok(out.remove(0))
}

/// Sweeps one axis and scores every pipeline on the same simulated trials.
pub fn sweep_pipelines(
    base: &ScenarioConfig,
    axis: Axis,
    values: &[f64],
    count: usize,
    pipelines: &[PipelineOptions],
) -> Result<Vec<SweepResult>> {
    if values.is_empty() {
        return Err(Error::InvalidSweep("no axis values".into()));
    }
    if count == 0 {
        return Err(Error::InvalidSweep("count must be at least 1".into()));
    }
    if pipelines.is_empty() {
        return Err(Error::InvalidSweep("no pipelines".into()));
    }
    for &v in values {
        axis.check(v)?;
        let mut probe = axis.apply(base, v, trial_seed(base.rng_seed, 0));
        probe.validate()?;
    }

    let start = Instant::now();
    let jobs: Vec<(usize, usize)> = (0..values.len())
        .flat_map(|i| (0..count).map(move |t| (i, t)))
        .collect();
    // Per job: (trace per pipeline, measured SNR).
    let results: Vec<Result<(Vec<DeformationTrace>, f64)>> = with_pool(|| {
        jobs.par_iter()
            .map(|&(i, t)| {
                let seed = trial_seed(base.rng_seed, t);
                let cfg = axis.apply(base, values[i], seed);
                let sim = simulate_features(&cfg, seed)?;
                let traces = pipelines
                    .iter()
                    .map(|opts| estimate(&sim, &cfg, opts).map(|(trace, _)| trace))
                    .collect::<Result<Vec<_>>>()?;
                Ok((traces, sim.measured_snr_db()))
            })
            .collect()
    })?;
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    let wall_time_s = start.elapsed().as_secs_f64();

    (0..pipelines.len())
        .map(|k| {
            let points = values
                .iter()
                .enumerate()
                .map(|(i, &value)| {
                    let chunk = &results[i * count..(i + 1) * count];
                    let rmse_m = rmse_of_traces(chunk.iter().map(|(traces, _)| &traces[k]))?;
                    let measured_snr_db =
                        chunk.iter().map(|(_, snr)| snr).sum::<f64>() / count as f64;
                    Ok(SweepPoint {
                        axis,
                        value,
                        rmse_m,
                        trials: count,
                        measured_snr_db,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepResult {
                axis,
                points,
                count,
                wall_time_s,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::echo::synthesize_echo;
    use crate::range::{extract_feature, range_profile};
    use crate::scenario::preset_condition;

    fn small(condition: Condition) -> ScenarioConfig {
        let mut cfg = preset_condition(condition, 7);
        cfg.radio.frames = 40;
        cfg.radio.subcarriers = 256;
        cfg.radio.symbols = 14;
        cfg.snr_db = 10.0;
        cfg
    }

    #[test]
    fn streamed_features_match_full_tensor_path() {
        let cfg = small(Condition::II);
        let sim = simulate_features(&cfg, 3).unwrap();
        let truth = sample_deformation_truth(&cfg);
        let tensor = synthesize_echo(&cfg, &truth, 3).unwrap();
        let profile = range_profile(&tensor);
        let features = extract_feature(&profile, sim.features.bin, 480e3).unwrap();
        let scale = sim
            .features
            .data
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        for (a, b) in sim.features.data.iter().zip(&features.data) {
            assert!((a - b).norm() < 1e-5 * scale, "{a} vs {b}");
        }
        assert!((sim.noise_variance - tensor.noise_variance).abs() < 1e-9 * tensor.noise_variance);
    }

    #[test]
    fn measured_snr_tracks_request() {
        let cfg = small(Condition::III);
        let sim = simulate_features(&cfg, 1).unwrap();
        assert!((sim.measured_snr_db() - 10.0).abs() < 0.5);
    }

    #[test]
    fn trials_are_deterministic() {
        let cfg = small(Condition::III);
        let a = run_trial(&cfg, 9).unwrap();
        let b = run_trial(&cfg, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_amplitude_noiseless_scenario_estimates_zero() {
        let mut cfg = small(Condition::I);
        cfg.snr_db = f64::INFINITY;
        cfg.bridge.free_amplitude_m = 0.0;
        cfg.sources.iter_mut().for_each(|s| s.amplitude_m = 0.0);
        cfg.clutter.clear();
        let trial = run_trial_with(
            &cfg,
            0,
            &PipelineOptions {
                dynamic: DynamicMode::PmMdis,
                static_removal: false,
            },
        )
        .unwrap();
        assert!(trial.trace.estimate_m.iter().all(|&d| d == 0.0));
        assert_eq!(trial.measured_snr_db, f64::INFINITY);
    }

    #[test]
    fn rmse_examples() {
        let trace = |errors: &[f64]| DeformationTrace {
            frame_duration_s: 0.01,
            radial_m: vec![0.0; errors.len()],
            estimate_m: errors.to_vec(),
            truth_m: vec![0.0; errors.len()],
            wrapped_phase: vec![0.0; errors.len()],
            unwrapped_phase: vec![0.0; errors.len()],
            wrap_corrections: vec![0; errors.len()],
        };
        let a = trace(&[3e-3, 4e-3]);
        assert!((rmse_of_traces([&a]).unwrap() - 12.5e-6f64.sqrt()).abs() < 1e-15);
        let z = trace(&[0.0, 0.0]);
        assert_eq!(rmse_of_traces([&z, &z]).unwrap(), 0.0);
        assert!(matches!(rmse(&[]), Err(Error::EmptyInput(_))));
        let b = trace(&[1.0]);
        assert!(rmse_of_traces([&a, &b]).is_err());
        // Order independence.
        let c = trace(&[1e-3, -2e-3]);
        assert_eq!(
            rmse_of_traces([&a, &c]).unwrap(),
            rmse_of_traces([&c, &a]).unwrap()
        );
    }

    #[test]
    fn axis_parsing_and_validation() {
        assert_eq!("snr".parse::<Axis>().unwrap(), Axis::Snr);
        assert_eq!("M".parse::<Axis>().unwrap(), Axis::Subcarriers);
        assert_eq!("offset".parse::<Axis>().unwrap(), Axis::BeamOffset);
        assert!("Q".parse::<Axis>().is_err());
        let cfg = small(Condition::I);
        let opts = PipelineOptions::default();
        assert!(matches!(
            sweep(&cfg, Axis::Symbols, &[2.5], 1, &opts),
            Err(Error::InvalidSweep(_))
        ));
        assert!(sweep(&cfg, Axis::Interferers, &[-1.0], 1, &opts).is_err());
        assert!(sweep(&cfg, Axis::Snr, &[], 1, &opts).is_err());
        assert!(sweep(&cfg, Axis::Snr, &[0.0], 0, &opts).is_err());
    }

    #[test]
    fn beam_offset_follows_bridge_direction() {
        let cfg = small(Condition::I);
        let moved = Axis::BeamOffset.apply(&cfg, 4.0, 0);
        assert_eq!(moved.radio.beam_offset, [4.0, 0.0, 0.0]);
    }

    #[test]
    fn sweep_is_order_independent_and_reproducible() {
        let cfg = small(Condition::III);
        let opts = PipelineOptions::for_condition(Condition::III);
        let a = sweep(&cfg, Axis::Snr, &[0.0, 10.0], 3, &opts).unwrap();
        let b = sweep(&cfg, Axis::Snr, &[10.0, 0.0], 3, &opts).unwrap();
        assert_eq!(a.points[0].rmse_m, b.points[1].rmse_m);
        assert_eq!(a.points[1].rmse_m, b.points[0].rmse_m);
        let mut x = Vec::new();
        let mut y = Vec::new();
        a.write_csv(&mut x).unwrap();
        sweep(&cfg, Axis::Snr, &[0.0, 10.0], 3, &opts)
            .unwrap()
            .write_csv(&mut y)
            .unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn sweep_csv_round_trip() {
        let cfg = small(Condition::I);
        let res = sweep(
            &cfg,
            Axis::Snr,
            &[-5.0, 0.0, 5.0],
            1,
            &PipelineOptions::default(),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.csv");
        res.export_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("axis,value,rmse_m,trials,measured_snr_db"));
        assert_eq!(read_sweep_csv(&path).unwrap(), res.points);
    }
}
