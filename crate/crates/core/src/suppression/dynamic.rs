//! Per-frame suppression of moving interferers.
//!
//! Within one frame the monitored bin holds a constant static part plus one
//! rotating phasor per moving vehicle. The static part is recovered either as
//! the center of a circle fitted through the symbol samples, or as the sample
//! mean; the circularity test picks between the two.

use num_complex::Complex64;
use num_integer::Integer;
use rustfft::FftPlanner;
use serde::Serialize;

use super::circle::{fit_circle, CircleFit};
use crate::error::{Error, Result};
use crate::scenario::RadioParams;
use crate::SPEED_OF_LIGHT;

/// A Doppler line must exceed this multiple of the median spectral magnitude.
pub const DOPPLER_PEAK_FACTOR: f64 = 4.0;

/// A Doppler line must also reach this fraction of the strongest non-DC line,
/// so that spectral leakage skirts are not mistaken for extra vehicles.
pub const DOPPLER_RELATIVE_FLOOR: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DynamicMethod {
    /// Circle-fit center of the symbol samples.
    CfSdir,
    /// Mean of the symbol samples.
    PmMdis,
    /// Mean over the LCM of the detected Doppler periods.
    Ipm,
}

impl DynamicMethod {
    pub fn label(self) -> &'static str {
        match self {
            DynamicMethod::CfSdir => "CF-SDIR",
            DynamicMethod::PmMdis => "PM-MDIS",
            DynamicMethod::Ipm => "IPM",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpmConfig {
    /// Distance tolerance as a fraction of the fitted radius.
    pub threshold_factor: f64,
    /// Required share of qualified points to call a frame circular.
    pub circular_proportion: f64,
    pub min_points: usize,
}

impl Default for CpmConfig {
    fn default() -> Self {
        CpmConfig {
            threshold_factor: 0.2,
            circular_proportion: 0.9,
            min_points: 3,
        }
    }
}

/// Circle-fit static estimate: the center of the fitted circle.
pub fn cf_sdir(points: &[Complex64]) -> Result<Complex64> {
    fit_circle(points, 3, 0.2).map(|fit| fit.center)
}

/// Phasor-mean static estimate.
pub fn pm_mdis(points: &[Complex64]) -> Result<Complex64> {
    if points.is_empty() {
        return Err(Error::EmptyInput("symbol samples"));
    }
    Ok(points.iter().sum::<Complex64>() / points.len() as f64)
}

/// Outcome of the circularity-test dispatcher for one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpmOutcome {
    pub value: Complex64,
    pub method: DynamicMethod,
    /// `None` when the circle fit was degenerate.
    pub fit: Option<CircleFit>,
}

impl CpmOutcome {
    pub fn qualified_fraction(&self) -> f64 {
        self.fit.map_or(0.0, |f| f.qualified_fraction)
    }
}

/// Fits a circle, runs the circularity test, and returns the circle center
/// when the samples are circular or the sample mean otherwise. Degenerate
/// fits fall back to the mean.
pub fn cpm(points: &[Complex64], cfg: &CpmConfig) -> Result<CpmOutcome> {
    let mean = pm_mdis(points)?;
    let fit = fit_circle(points, cfg.min_points, cfg.threshold_factor).ok();
    let outcome = match fit {
        Some(f) if f.qualified_fraction >= cfg.circular_proportion => CpmOutcome {
            value: f.center,
            method: DynamicMethod::CfSdir,
            fit,
        },
        _ => CpmOutcome {
            value: mean,
            method: DynamicMethod::PmMdis,
            fit,
        },
    };
    Ok(outcome)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IpmStatus {
    /// The LCM of the detected periods fits in the captured symbols.
    Exact,
    /// The LCM exceeded the capture; all captured symbols were averaged.
    Capped,
    /// No Doppler line was found; all captured symbols were averaged.
    NoDopplerPeak,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IpmPlan {
    /// Number of leading symbols to average.
    pub symbols: usize,
    pub status: IpmStatus,
    /// Radial velocities of the detected Doppler lines (m/s).
    pub velocities_mps: Vec<f64>,
    /// Symbol period of each detected line.
    pub periods: Vec<usize>,
}

/// Symbols needed so that velocity `v_res` completes one phasor turn.
pub fn symbols_for_velocity(radio: &RadioParams, v_res_mps: f64) -> usize {
    (SPEED_OF_LIGHT / (2.0 * radio.carrier_hz * radio.symbol_duration_s * v_res_mps)).ceil()
        as usize
}

/// Symbol period of a phasor whose radial velocity is `v`.
pub fn doppler_period(radio: &RadioParams, v_mps: f64) -> usize {
    let p = SPEED_OF_LIGHT / (2.0 * radio.carrier_hz * v_mps.abs() * radio.symbol_duration_s);
    (p.round() as usize).max(1)
}

/// Detects Doppler lines in the symbol samples and chooses the averaging
/// length as the least common multiple of their periods.
///
/// The samples must span enough symbols to resolve `v_res_mps`.
pub fn ipm_plan(points: &[Complex64], radio: &RadioParams, v_res_mps: f64) -> Result<IpmPlan> {
    let len = points.len();
    let required = symbols_for_velocity(radio, v_res_mps);
    if len < required {
        return Err(Error::InsufficientSymbols {
            available: len,
            required,
        });
    }
    let mut spectrum = points.to_vec();
    FftPlanner::new()
        .plan_fft_forward(len)
        .process(&mut spectrum);
    let mag: Vec<f64> = spectrum.iter().map(|z| z.norm()).collect();

    let mut sorted = mag.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[len / 2];

    let candidates: Vec<usize> = (1..len)
        .filter(|&k| {
            let prev = mag[(k + len - 1) % len];
            let next = mag[(k + 1) % len];
            mag[k] > DOPPLER_PEAK_FACTOR * median && mag[k] >= prev && mag[k] >= next
        })
        .collect();
    let strongest = candidates.iter().map(|&k| mag[k]).fold(0.0, f64::max);

    let mut velocities = Vec::new();
    let mut periods = Vec::new();
    for k in candidates {
        if mag[k] < DOPPLER_RELATIVE_FLOOR * strongest {
            continue;
        }
        let cycles = if k > len / 2 {
            k as f64 - len as f64
        } else {
            k as f64
        };
        // Phasor advances by cycles/len turns per symbol.
        let v = cycles / len as f64 * SPEED_OF_LIGHT
            / (2.0 * radio.carrier_hz * radio.symbol_duration_s);
        velocities.push(v);
        periods.push(doppler_period(radio, v));
    }

    if periods.is_empty() {
        return Ok(IpmPlan {
            symbols: len,
            status: IpmStatus::NoDopplerPeak,
            velocities_mps: velocities,
            periods,
        });
    }
    let mut lcm = 1usize;
    let mut capped = false;
    for &p in &periods {
        lcm = lcm.lcm(&p);
        if lcm > len {
            capped = true;
            break;
        }
    }
    let (symbols, status) = if capped {
        (len, IpmStatus::Capped)
    } else {
        (lcm, IpmStatus::Exact)
    };
    Ok(IpmPlan {
        symbols,
        status,
        velocities_mps: velocities,
        periods,
    })
}

/// Mean over the planned number of leading symbols.
pub fn ipm_mean(points: &[Complex64], plan: &IpmPlan) -> Result<Complex64> {
    pm_mdis(&points[..plan.symbols.min(points.len())])
}
