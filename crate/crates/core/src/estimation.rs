//! Phase extraction, history-predicted unwrapping and radial-to-vertical
//! inversion.

use std::f64::consts::TAU;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::RadioParams;
use crate::suppression::PhasorSeries;
use crate::{norm3, Vec3, SPEED_OF_LIGHT};

/// Phase slope of the micro-deformation phasor with respect to radial range
/// (1/m). Negative: the phasor rotates clockwise as the range grows.
pub fn micro_phase_slope(radio: &RadioParams) -> f64 {
    -(2.0 * radio.carrier_hz + radio.subcarrier_spacing_hz * (radio.subcarriers as f64 - 1.0))
        / SPEED_OF_LIGHT
}

/// Wrapped phase of every frame, in `(-pi, pi]`.
pub fn phase_series(series: &PhasorSeries) -> Result<Vec<f64>> {
    series
        .values
        .iter()
        .enumerate()
        .map(|(p, z)| {
            if z.norm_sqr() > 0.0 && z.is_finite() {
                Ok(principal_arg(*z))
            } else {
                Err(Error::MissingFrame(p))
            }
        })
        .collect()
}

/// `arg` mapped onto `(-pi, pi]` (the standard `atan2` returns `-pi` for a
/// negative real with a negative-zero imaginary part).
fn principal_arg(z: Complex64) -> f64 {
    let a = z.arg();
    if a == -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        a
    }
}

/// Constant-acceleration extrapolation from the last three radial changes:
/// `3 r[p-1] - 3 r[p-2] + r[p-3]`.
pub fn predict_range(r3: f64, r2: f64, r1: f64) -> f64 {
    3.0 * r1 - 3.0 * r2 + r3
}

/// The `2 pi` shift of `phi` closest to `phi_hat`. Ties round half away
/// from zero.
pub fn unwrap_phase(phi: f64, phi_hat: f64) -> f64 {
    phi + TAU * wrap_count(phi, phi_hat) as f64
}

fn wrap_count(phi: f64, phi_hat: f64) -> i64 {
    ((phi_hat - phi) / TAU).round() as i64
}

/// Vertical deformation that changes the range to `monitor` by `delta_r`.
///
/// Solves `dD^2 + 2 z0 dD = 2 R0 dR + dR^2` for the root nearest zero, in a
/// form that avoids cancellation for small changes.
pub fn vertical_from_radial(monitor: &Vec3, delta_r: f64) -> f64 {
    let r0 = norm3(monitor);
    let z0 = monitor[2];
    let q = 2.0 * r0 * delta_r + delta_r * delta_r;
    let sign = if z0 < 0.0 { -1.0 } else { 1.0 };
    let root = (z0 * z0 + q).max(0.0).sqrt();
    let denom = z0 + sign * root;
    if denom == 0.0 {
        0.0
    } else {
        q / denom
    }
}

/// Range change produced by a vertical deformation `delta_d`.
pub fn radial_from_vertical(monitor: &Vec3, delta_d: f64) -> f64 {
    let moved = [monitor[0], monitor[1], monitor[2] + delta_d];
    norm3(&moved) - norm3(monitor)
}

/// Per-frame output of the estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationTrace {
    pub frame_duration_s: f64,
    pub radial_m: Vec<f64>,
    pub estimate_m: Vec<f64>,
    /// Truth relative to frame 0; zeros until [`DeformationTrace::with_truth`].
    pub truth_m: Vec<f64>,
    pub wrapped_phase: Vec<f64>,
    pub unwrapped_phase: Vec<f64>,
    /// Cumulative number of `2 pi` corrections up to each frame.
    pub wrap_corrections: Vec<u64>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct TraceRow {
    pub frame: usize,
    pub t_seconds: f64,
    pub truth_m: f64,
    pub estimate_m: f64,
    pub wrapped_phase: f64,
    pub unwrapped_phase: f64,
    pub wrap_corrections: u64,
}

impl DeformationTrace {
    pub fn len(&self) -> usize {
        self.estimate_m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.estimate_m.is_empty()
    }

    pub fn total_wrap_corrections(&self) -> u64 {
        self.wrap_corrections.last().copied().unwrap_or(0)
    }

    pub fn with_truth(mut self, truth_m: Vec<f64>) -> Result<Self> {
        if truth_m.len() != self.len() {
            return Err(Error::validation(
                "truth",
                format!("expected {} frames, got {}", self.len(), truth_m.len()),
            ));
        }
        self.truth_m = truth_m;
        Ok(self)
    }

    /// `estimate - truth` per frame.
    pub fn errors(&self) -> impl Iterator<Item = f64> + '_ {
        self.estimate_m
            .iter()
            .zip(&self.truth_m)
            .map(|(e, t)| e - t)
    }

    pub fn max_abs_error(&self) -> f64 {
        self.errors().map(f64::abs).fold(0.0, f64::max)
    }

    pub fn rows(&self) -> impl Iterator<Item = TraceRow> + '_ {
        (0..self.len()).map(|p| TraceRow {
            frame: p,
            t_seconds: p as f64 * self.frame_duration_s,
            truth_m: self.truth_m[p],
            estimate_m: self.estimate_m[p],
            wrapped_phase: self.wrapped_phase[p],
            unwrapped_phase: self.unwrapped_phase[p],
            wrap_corrections: self.wrap_corrections[p],
        })
    }

    /// Columns: `frame, t_seconds, truth_m, estimate_m, wrapped_phase,
    /// unwrapped_phase, wrap_corrections`.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for row in self.rows() {
            w.serialize(row)?;
        }
        w.flush().map_err(|e| Error::io("<trace>", e))?;
        Ok(())
    }

    pub fn export_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// Reads a trace CSV written by [`DeformationTrace::export_csv`].
pub fn read_trace_csv(path: impl AsRef<Path>) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_path(path.as_ref())?;
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

/// Turns the static-free phasor series into a deformation trace.
///
/// Frames 0–2 are unwrapped against their predecessor; from frame 3 on, the
/// unwrap target is the phase predicted from the last three radial changes.
/// The estimate is self-referenced to frame 0.
pub fn estimate_trace(series: &PhasorSeries, radio: &RadioParams) -> Result<DeformationTrace> {
    let frames = series.len();
    if frames < 4 {
        return Err(Error::validation(
            "frames_P",
            format!("need at least 4 frames to estimate, got {frames}"),
        ));
    }
    let f_micro = micro_phase_slope(radio);
    let wrapped = phase_series(series)?;
    let phi0 = wrapped[0];
    let to_range = |phi_bar: f64| (phi_bar - phi0) / (TAU * f_micro);

    let mut unwrapped = Vec::with_capacity(frames);
    let mut radial = Vec::with_capacity(frames);
    let mut corrections = Vec::with_capacity(frames);
    let mut total = 0u64;
    let mut prev_gamma = 0i64;
    for (p, &phi) in wrapped.iter().enumerate() {
        let target = match p {
            0 => phi,
            1 | 2 => unwrapped[p - 1],
            _ => phi0 + TAU * f_micro * predict_range(radial[p - 3], radial[p - 2], radial[p - 1]),
        };
        let gamma = wrap_count(phi, target);
        let phi_bar = phi + TAU * gamma as f64;
        total += (gamma - prev_gamma).unsigned_abs();
        prev_gamma = gamma;
        unwrapped.push(phi_bar);
        radial.push(to_range(phi_bar));
        corrections.push(total);
    }

    let monitor = radio.monitor_point;
    let estimate = radial
        .iter()
        .map(|&dr| vertical_from_radial(&monitor, dr))
        .collect();
    Ok(DeformationTrace {
        frame_duration_s: radio.frame_duration_s,
        radial_m: radial,
        estimate_m: estimate,
        truth_m: vec![0.0; frames],
        wrapped_phase: wrapped,
        unwrapped_phase: unwrapped,
        wrap_corrections: corrections,
    })
}
