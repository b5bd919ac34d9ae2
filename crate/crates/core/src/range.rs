//! Range profiles from the subcarrier axis and monitored-bin extraction.
//!
//! The inverse transform is normalized by `1/M`:
//! `F[p, n, k] = (1/M) sum_m Y[p, n, m] exp(+j 2 pi m k / M)`, so a path at
//! range `R` lands in bin `round(2 M df R / c)`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::echo::EchoTensor;
use crate::error::{Error, Result};
use crate::SPEED_OF_LIGHT;

/// Reusable normalized inverse DFT over `M` subcarriers.
#[derive(Clone)]
pub struct RangeTransform {
    fft: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    len: usize,
}

impl std::fmt::Debug for RangeTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RangeTransform")
            .field("len", &self.len)
            .finish()
    }
}

impl RangeTransform {
    pub fn new(subcarriers: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_inverse(subcarriers);
        let scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        RangeTransform {
            fft,
            scratch,
            len: subcarriers,
        }
    }

    /// Transforms every `M`-long row of `rows` in place.
    pub fn process_rows(&mut self, rows: &mut [Complex64]) {
        assert_eq!(rows.len() % self.len, 0);
        self.fft.process_with_scratch(rows, &mut self.scratch);
        let scale = 1.0 / self.len as f64;
        rows.iter_mut().for_each(|z| *z *= scale);
    }
}

/// `F[p, n, k]` for every frame, symbol and bin.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeProfile {
    pub frames: usize,
    pub symbols: usize,
    pub bins: usize,
    pub data: Vec<Complex64>,
}

impl RangeProfile {
    pub fn get(&self, p: usize, n: usize, k: usize) -> Complex64 {
        self.data[(p * self.symbols + n) * self.bins + k]
    }

    pub fn row(&self, p: usize, n: usize) -> &[Complex64] {
        let start = (p * self.symbols + n) * self.bins;
        &self.data[start..start + self.bins]
    }
}

pub fn range_profile(y: &EchoTensor) -> RangeProfile {
    let mut data = y.data.clone();
    RangeTransform::new(y.subcarriers).process_rows(&mut data);
    RangeProfile {
        frames: y.frames,
        symbols: y.symbols,
        bins: y.subcarriers,
        data,
    }
}

/// Width of one range bin, `c / (2 M df)`.
pub fn bin_resolution(subcarriers: usize, spacing_hz: f64) -> f64 {
    SPEED_OF_LIGHT / (2.0 * subcarriers as f64 * spacing_hz)
}

/// Bin holding a reflector at range `r0`: `2 M df r0 / c` rounded to
/// nearest with ties to even, modulo `M`.
pub fn micro_range_bin(r0: f64, subcarriers: usize, spacing_hz: f64) -> Result<usize> {
    let max_m = SPEED_OF_LIGHT / (2.0 * spacing_hz);
    if !(r0 >= 0.0 && r0 < max_m) {
        return Err(Error::AmbiguousRange { range_m: r0, max_m });
    }
    let exact = subcarriers as f64 * spacing_hz * 2.0 * r0 / SPEED_OF_LIGHT;
    Ok(exact.round_ties_even() as usize % subcarriers)
}

/// Complex samples `F[p, n]` at the monitored bin.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub frames: usize,
    pub symbols: usize,
    /// Row-major `(p, n)`.
    pub data: Vec<Complex64>,
    pub bin: usize,
    pub bin_resolution_m: f64,
}

impl FeatureMatrix {
    pub fn frame(&self, p: usize) -> &[Complex64] {
        &self.data[p * self.symbols..(p + 1) * self.symbols]
    }

    pub fn get(&self, p: usize, n: usize) -> Complex64 {
        self.data[p * self.symbols + n]
    }
}

pub fn extract_feature(
    profile: &RangeProfile,
    bin: usize,
    spacing_hz: f64,
) -> Result<FeatureMatrix> {
    if bin >= profile.bins {
        return Err(Error::BinOutOfRange {
            bin,
            bins: profile.bins,
        });
    }
    let data = (0..profile.frames)
        .flat_map(|p| (0..profile.symbols).map(move |n| (p, n)))
        .map(|(p, n)| profile.get(p, n, bin))
        .collect();
    Ok(FeatureMatrix {
        frames: profile.frames,
        symbols: profile.symbols,
        data,
        bin,
        bin_resolution_m: bin_resolution(profile.bins, spacing_hz),
    })
}

/// Evaluates the normalized inverse DFT of `M`-long rows at a single bin.
///
/// Equal to the corresponding entry of [`RangeTransform::process_rows`],
/// at `O(M)` cost per row instead of a full transform.
#[derive(Debug, Clone)]
pub struct BinProbe {
    twiddles: Vec<Complex64>,
}

impl BinProbe {
    pub fn new(subcarriers: usize, bin: usize) -> Self {
        let scale = 1.0 / subcarriers as f64;
        let twiddles = (0..subcarriers)
            .map(|m| {
                // Reduce the index first so the angle stays small and exact.
                let turns = ((m * bin) % subcarriers) as f64 / subcarriers as f64;
                Complex64::from_polar(scale, std::f64::consts::TAU * turns)
            })
            .collect();
        BinProbe { twiddles }
    }

    pub fn eval(&self, row: &[Complex64]) -> Complex64 {
        row.iter().zip(&self.twiddles).map(|(y, w)| y * w).sum()
    }

    /// One value per `M`-long row.
    pub fn eval_rows(&self, rows: &[Complex64], out: &mut Vec<Complex64>) {
        out.extend(rows.chunks_exact(self.twiddles.len()).map(|r| self.eval(r)));
    }
}
