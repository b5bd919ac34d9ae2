//! Cross-frame removal of the static clutter sum.
//!
//! After per-frame dynamic suppression, frame `p` holds `C + G e^{j phi_p}`:
//! the micro-deformation phasor rotates slowly around the fixed clutter sum
//! `C`. Fitting a circle across frames recovers `C` and leaves the rotating
//! phasor, whose phase carries the deformation.

use num_complex::Complex64;
use serde::Serialize;

use super::circle::fit_circle;
use crate::error::{Error, Result};

/// Arcs narrower than this (radians around the fitted center) are rejected:
/// a short arc pins the circle center only along its chord normal, so small
/// perturbations move the center by a large multiple of the arc radius.
pub const MIN_ARC_SPAN_RAD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SeriesStage {
    /// Dynamic interferers removed; static clutter still present.
    PostDynamic,
    /// Static clutter removed.
    PostStatic,
}

/// One complex value per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasorSeries {
    pub values: Vec<Complex64>,
    pub stage: SeriesStage,
    /// Clutter sum removed when `stage` is [`SeriesStage::PostStatic`].
    pub static_center: Option<Complex64>,
}

impl PhasorSeries {
    pub fn post_dynamic(values: Vec<Complex64>) -> Self {
        PhasorSeries {
            values,
            stage: SeriesStage::PostDynamic,
            static_center: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Angular span of the series as seen from `center`, after unwrapping
/// consecutive angle steps.
pub fn arc_span(values: &[Complex64], center: Complex64) -> f64 {
    let mut prev: Option<f64> = None;
    let mut acc = 0.0;
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for z in values {
        let a = (z - center).arg();
        if let Some(p) = prev {
            let mut d = a - p;
            d -= std::f64::consts::TAU * (d / std::f64::consts::TAU).round();
            acc += d;
            lo = lo.min(acc);
            hi = hi.max(acc);
        }
        prev = Some(a);
    }
    hi - lo
}

/// Fits a circle across frames and subtracts its center.
///
/// Fails with [`Error::DegenerateFit`] when the fit is degenerate or the arc
/// spans less than [`MIN_ARC_SPAN_RAD`].
pub fn cf_msir(series: &PhasorSeries) -> Result<PhasorSeries> {
    let fit = fit_circle(&series.values, 3, 0.2)?;
    if arc_span(&series.values, fit.center) < MIN_ARC_SPAN_RAD {
        return Err(Error::DegenerateFit("arc too short"));
    }
    Ok(subtract(series, fit.center))
}

/// Subtracts the temporal mean; used when the arc is too short to fit.
pub fn subtract_temporal_mean(series: &PhasorSeries) -> Result<PhasorSeries> {
    if series.is_empty() {
        return Err(Error::EmptyInput("phasor series"));
    }
    let mean = series.values.iter().sum::<Complex64>() / series.len() as f64;
    Ok(subtract(series, mean))
}

fn subtract(series: &PhasorSeries, center: Complex64) -> PhasorSeries {
    PhasorSeries {
        values: series.values.iter().map(|z| z - center).collect(),
        stage: SeriesStage::PostStatic,
        static_center: Some(center),
    }
}
