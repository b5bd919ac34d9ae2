//! Compensated frequency-domain echo synthesis.
//!
//! Every path (monitor point, moving interferers, static clutter) reaches
//! the arrays from the monitored direction, so each path gain is its echo
//! coefficient times one shared array factor
//! `w^H a_R a_H^T x*`, with `w` and `x` steered at
//! `monitor_point + beam_offset`.
//!
//! Noise is circular complex Gaussian, i.i.d. over `(p, n, m)`, and drawn
//! from a ChaCha stream keyed by `(seed, p)`. Any frame can therefore be
//! regenerated on its own, in any order, bit-for-bit.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bridge::{directions_toward, interferer_kinematics, to_spherical, DeformationTruth};
use crate::error::{Error, Result};
use crate::scenario::ScenarioConfig;
use crate::{norm3, SPEED_OF_LIGHT};

/// Uniform-planar-array steering vector `a^x(Psi) (x) a^z(Omega)` with
/// half-wavelength spacing; element `ix * nz + iz`.
pub fn steering_vector(psi: f64, omega: f64, nx: usize, nz: usize, fc: f64) -> Vec<Complex64> {
    let spacing = SPEED_OF_LIGHT / (2.0 * fc);
    let k = 2.0 * PI * fc * spacing / SPEED_OF_LIGHT;
    let mut out = Vec::with_capacity(nx * nz);
    for ix in 0..nx {
        for iz in 0..nz {
            let phase = k * (ix as f64 * psi + iz as f64 * omega);
            out.push(Complex64::from_polar(1.0, phase));
        }
    }
    out
}

/// `a^H b`.
fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Effective complex gains of every path after transmit and receive
/// beamforming.
#[derive(Debug, Clone, PartialEq)]
pub struct GainSet {
    pub micro: Complex64,
    /// One gain per interferer, constant over frames.
    pub interferers: Vec<Complex64>,
    pub clutter: Vec<Complex64>,
    /// Shared array factor for the configured aim.
    pub array_factor: Complex64,
    /// `|array factor|` with perfect alignment.
    pub aligned_array_factor: f64,
}

impl GainSet {
    pub fn interferer(&self, k: usize, _frame: usize) -> Complex64 {
        self.interferers[k]
    }

    /// Power ratio of the misaligned beam to the aligned one (<= 1).
    pub fn alignment_loss(&self) -> f64 {
        (self.array_factor.norm() / self.aligned_array_factor).powi(2)
    }
}

pub fn beamforming_gains(cfg: &ScenarioConfig) -> Result<GainSet> {
    let r = &cfg.radio;
    let m = r.monitor_point;
    let aim = [
        m[0] + r.beam_offset[0],
        m[1] + r.beam_offset[1],
        m[2] + r.beam_offset[2],
    ];
    let (psi, omega) = directions_toward(&m)?;
    let (aim_psi, aim_omega) = directions_toward(&aim)?;
    let n_rx = (r.rx_array_x * r.rx_array_z) as f64;
    let n_tx = (r.tx_array_x * r.tx_array_z) as f64;

    let rx_true = steering_vector(psi, omega, r.rx_array_x, r.rx_array_z, r.carrier_hz);
    let rx_aim = steering_vector(aim_psi, aim_omega, r.rx_array_x, r.rx_array_z, r.carrier_hz);
    let tx_true = steering_vector(psi, omega, r.tx_array_x, r.tx_array_z, r.carrier_hz);
    let tx_aim = steering_vector(aim_psi, aim_omega, r.tx_array_x, r.tx_array_z, r.carrier_hz);

    // w^H a_R = a_R(aim)^H a_R(true) / sqrt(N_R); a_H(true)^T x* = sqrt(rho P / N_H) a_H(aim)^H a_H(true)
    let rx = inner(&rx_aim, &rx_true) / n_rx.sqrt();
    let tx = inner(&tx_aim, &tx_true) * (r.tx_power / n_tx).sqrt();
    let array_factor = rx * tx;
    let aligned_array_factor = (n_rx * r.tx_power * n_tx).sqrt();

    Ok(GainSet {
        micro: r.micro_gain * array_factor,
        interferers: cfg
            .interferers
            .iter()
            .map(|i| i.gain * array_factor)
            .collect(),
        clutter: cfg.clutter.iter().map(|c| c.gain * array_factor).collect(),
        array_factor,
        aligned_array_factor,
    })
}

/// `sigma^2 = mean |Y|^2 / 10^(snr/10)`; zero when `snr_db` is `+inf`.
pub fn noise_variance_for_power(mean_power: f64, snr_db: f64) -> Result<f64> {
    if mean_power.is_nan() || mean_power <= 0.0 {
        return Err(Error::ZeroSignal);
    }
    if snr_db == f64::INFINITY {
        return Ok(0.0);
    }
    Ok(mean_power / 10f64.powf(snr_db / 10.0))
}

/// Noise variance for a noiseless tensor at the requested SNR.
pub fn calibrate_noise(noiseless: &[Complex64], snr_db: f64) -> Result<f64> {
    if noiseless.is_empty() {
        return Err(Error::EmptyInput("noiseless tensor"));
    }
    let power = noiseless.iter().map(|z| z.norm_sqr()).sum::<f64>() / noiseless.len() as f64;
    noise_variance_for_power(power, snr_db)
}

/// Per-scenario precomputation for synthesizing individual frames.
#[derive(Debug, Clone)]
pub struct EchoSynthesizer {
    pub gains: GainSet,
    subcarriers: usize,
    symbols: usize,
    /// `4 pi f_m / c`.
    wavenumbers: Vec<f64>,
    static_sum: Vec<Complex64>,
    micro_ranges: Vec<f64>,
    /// `[k][p]` -> (range, per-symbol Doppler rotation)
    movers: Vec<Vec<(f64, Complex64)>>,
}

impl EchoSynthesizer {
    pub fn new(cfg: &ScenarioConfig, truth: &DeformationTruth) -> Result<Self> {
        let r = &cfg.radio;
        assert_eq!(truth.len(), r.frames, "truth length must equal frames_P");
        let gains = beamforming_gains(cfg)?;
        let wavenumbers: Vec<f64> = (0..r.subcarriers)
            .map(|m| 4.0 * PI * r.subcarrier_frequency(m) / SPEED_OF_LIGHT)
            .collect();

        let mut static_sum = vec![Complex64::new(0.0, 0.0); r.subcarriers];
        for (clutter, gain) in cfg.clutter.iter().zip(&gains.clutter) {
            let range = norm3(&clutter.position);
            for (acc, k) in static_sum.iter_mut().zip(&wavenumbers) {
                *acc += gain * Complex64::from_polar(1.0, -k * range);
            }
        }

        let micro_ranges = truth
            .values_m
            .iter()
            .map(|&d| to_spherical(&r.monitor_point, d).map(|pose| pose.range_m))
            .collect::<Result<Vec<_>>>()?;

        let doppler_k = 4.0 * PI * r.carrier_hz * r.symbol_duration_s / SPEED_OF_LIGHT;
        let movers = (0..cfg.interferers.len())
            .map(|k| {
                (0..r.frames)
                    .map(|p| {
                        let s = interferer_kinematics(cfg, k, p)?;
                        Ok((
                            s.range_m,
                            Complex64::from_polar(1.0, doppler_k * s.radial_velocity_mps),
                        ))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(EchoSynthesizer {
            gains,
            subcarriers: r.subcarriers,
            symbols: r.captured_symbols(),
            wavenumbers,
            static_sum,
            micro_ranges,
            movers,
        })
    }

    pub fn frames(&self) -> usize {
        self.micro_ranges.len()
    }

    pub fn symbols(&self) -> usize {
        self.symbols
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    /// Entries per frame (`symbols * subcarriers`).
    pub fn frame_len(&self) -> usize {
        self.symbols * self.subcarriers
    }

    /// Writes the noiseless frame `p` into `out` (layout `n * M + m`).
    pub fn noiseless_frame(&self, p: usize, out: &mut [Complex64]) {
        let m_count = self.subcarriers;
        assert_eq!(out.len(), self.frame_len());
        let range = self.micro_ranges[p];
        let base: Vec<Complex64> = self
            .wavenumbers
            .iter()
            .zip(&self.static_sum)
            .map(|(k, s)| self.gains.micro * Complex64::from_polar(1.0, -k * range) + s)
            .collect();
        let paths: Vec<(Vec<Complex64>, Complex64)> = self
            .movers
            .iter()
            .enumerate()
            .map(|(k, states)| {
                let (range, rotation) = states[p];
                let gain = self.gains.interferer(k, p);
                let path = self
                    .wavenumbers
                    .iter()
                    .map(|w| gain * Complex64::from_polar(1.0, -w * range))
                    .collect();
                (path, rotation)
            })
            .collect();

        let mut rotations = vec![Complex64::new(1.0, 0.0); paths.len()];
        for (n, row) in out.chunks_exact_mut(m_count).enumerate() {
            row.copy_from_slice(&base);
            for ((path, step), rot) in paths.iter().zip(rotations.iter_mut()) {
                // rot = e^{j 4 pi fc v n Tsym / c}, computed directly to avoid drift
                *rot = step.powu(n as u32);
                for (y, h) in row.iter_mut().zip(path) {
                    *y += h * *rot;
                }
            }
        }
    }

    /// Mean `|Y|^2` of the noiseless tensor, accumulated frame by frame.
    pub fn mean_power(&self) -> f64 {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.frame_len()];
        let mut total = 0.0;
        for p in 0..self.frames() {
            self.noiseless_frame(p, &mut buf);
            total += buf.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        total / (self.frames() * self.frame_len()) as f64
    }

    /// Noise variance that realizes `snr_db` under perfect beam alignment.
    ///
    /// The noise floor is referenced to the aligned beam, so aiming errors
    /// lower the effective SNR by the array-factor loss.
    pub fn noise_variance(&self, mean_power: f64, snr_db: f64) -> Result<f64> {
        noise_variance_for_power(mean_power / self.gains.alignment_loss(), snr_db)
    }

    /// Writes frame `p` with noise of variance `sigma2` and returns the
    /// realized noise energy `sum |n|^2`.
    pub fn noisy_frame(&self, p: usize, sigma2: f64, seed: u64, out: &mut [Complex64]) -> f64 {
        self.noiseless_frame(p, out);
        if sigma2 == 0.0 {
            return 0.0;
        }
        add_frame_noise(out, sigma2, seed, p)
    }
}

/// Adds i.i.d. `CN(0, sigma2)` noise from the stream keyed by `(seed, frame)`.
pub fn add_frame_noise(out: &mut [Complex64], sigma2: f64, seed: u64, frame: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame as u64);
    let scale = (0.5 * sigma2).sqrt();
    let mut energy = 0.0;
    for y in out.iter_mut() {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        let n = Complex64::new(re * scale, im * scale);
        energy += n.norm_sqr();
        *y += n;
    }
    energy
}

/// Full echo tensor `Y[p, n, m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoTensor {
    pub frames: usize,
    pub symbols: usize,
    pub subcarriers: usize,
    /// Row-major `(p, n, m)`.
    pub data: Vec<Complex64>,
    /// Mean noiseless power.
    pub signal_power: f64,
    pub noise_variance: f64,
}

impl EchoTensor {
    pub fn get(&self, p: usize, n: usize, m: usize) -> Complex64 {
        self.data[(p * self.symbols + n) * self.subcarriers + m]
    }

    pub fn frame(&self, p: usize) -> &[Complex64] {
        let len = self.symbols * self.subcarriers;
        &self.data[p * len..(p + 1) * len]
    }

    /// Tensor dump: 32-byte header (`"BMDM"`, P, N, M as u32, noise
    /// variance and signal power as f64) then `(re, im)` f32 pairs in
    /// `(p, n, m)` order, all little-endian.
    pub fn write_dump(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        let mut header = Vec::with_capacity(32);
        header.extend_from_slice(b"BMDM");
        for dim in [self.frames, self.symbols, self.subcarriers] {
            header.extend_from_slice(&(dim as u32).to_le_bytes());
        }
        header.extend_from_slice(&self.noise_variance.to_le_bytes());
        header.extend_from_slice(&self.signal_power.to_le_bytes());
        w.write_all(&header).map_err(|e| Error::io(path, e))?;
        for z in &self.data {
            w.write_all(&(z.re as f32).to_le_bytes())
                .and_then(|_| w.write_all(&(z.im as f32).to_le_bytes()))
                .map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_dump(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut bytes = Vec::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| Error::io(path, e))?;
        if bytes.len() < 32 || &bytes[..4] != b"BMDM" {
            return Err(Error::MalformedDump("missing BMDM header"));
        }
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap()) as usize;
        let f64_at = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
        let (frames, symbols, subcarriers) = (u32_at(4), u32_at(8), u32_at(12));
        let count = frames * symbols * subcarriers;
        if bytes.len() != 32 + count * 8 {
            return Err(Error::MalformedDump(
                "payload length does not match dimensions",
            ));
        }
        let data = bytes[32..]
            .chunks_exact(8)
            .map(|c| {
                let re = f32::from_le_bytes(c[..4].try_into().unwrap());
                let im = f32::from_le_bytes(c[4..].try_into().unwrap());
                Complex64::new(re as f64, im as f64)
            })
            .collect();
        Ok(EchoTensor {
            frames,
            symbols,
            subcarriers,
            data,
            noise_variance: f64_at(16),
            signal_power: f64_at(24),
        })
    }
}

/// Synthesizes the whole tensor with noise calibrated to `cfg.snr_db`.
pub fn synthesize_echo(
    cfg: &ScenarioConfig,
    truth: &DeformationTruth,
    seed: u64,
) -> Result<EchoTensor> {
    let synth = EchoSynthesizer::new(cfg, truth)?;
    let len = synth.frame_len();
    let mut data = vec![Complex64::new(0.0, 0.0); synth.frames() * len];
    for (p, frame) in data.chunks_exact_mut(len).enumerate() {
        synth.noiseless_frame(p, frame);
    }
    let signal_power = data.iter().map(|z| z.norm_sqr()).sum::<f64>() / data.len() as f64;
    let noise_variance = synth.noise_variance(signal_power, cfg.snr_db)?;
    if noise_variance > 0.0 {
        for (p, frame) in data.chunks_exact_mut(len).enumerate() {
            add_frame_noise(frame, noise_variance, seed, p);
        }
    }
    Ok(EchoTensor {
        frames: synth.frames(),
        symbols: synth.symbols(),
        subcarriers: synth.subcarriers(),
        data,
        signal_power,
        noise_variance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::{sample_deformation_truth, spatial_directions};
    use crate::scenario::{preset_condition, Condition, Interferer};
    use proptest::prelude::*;

    fn small(cond: Condition) -> ScenarioConfig {
        let mut cfg = preset_condition(cond, 11);
        cfg.radio.frames = 6;
        cfg.radio.subcarriers = 64;
        cfg.radio.symbols = 8;
        cfg
    }

    fn bare() -> ScenarioConfig {
        let mut cfg = small(Condition::I);
        cfg.clutter.clear();
        cfg.sources.clear();
        cfg.bridge.free_amplitude_m = 0.0;
        cfg.snr_db = f64::INFINITY;
        cfg
    }

    #[test]
    fn steering_vector_cases() {
        let ones = steering_vector(0.0, 0.0, 4, 3, 26e9);
        assert!(ones.iter().all(|z| (*z - 1.0).norm() < 1e-15));
        let v = steering_vector(1.0, 0.0, 2, 1, 26e9);
        assert!((v[0] - 1.0).norm() < 1e-15);
        assert!((v[1] + 1.0).norm() < 1e-12);
    }

    #[test]
    fn steering_vector_matches_elementwise_formula() {
        let theta = 60f64.atan2(180.0);
        let r0 = (180.0f64.powi(2) + 3600.0 + 625.0).sqrt();
        let (psi, omega) = spatial_directions(theta, (-25.0 / r0).acos());
        let v = steering_vector(psi, omega, 8, 8, 26e9);
        let lambda = 3e8 / 26e9;
        let d = lambda / 2.0;
        for ix in 0..8 {
            for iz in 0..8 {
                let ph = 2.0 * PI * 26e9 * d * (ix as f64 * psi + iz as f64 * omega) / 3e8;
                let z = v[ix * 8 + iz];
                assert!((z - Complex64::new(ph.cos(), ph.sin())).norm() < 1e-12);
                assert!((z.norm() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn aligned_array_factor_is_maximal() {
        let cfg = small(Condition::II);
        let g = beamforming_gains(&cfg).unwrap();
        assert!((g.array_factor.norm() - 64.0).abs() < 1e-9);
        assert!((g.aligned_array_factor - 64.0).abs() < 1e-12);
        assert!((g.micro.norm() - 64.0).abs() < 1e-9);
        assert!((g.alignment_loss() - 1.0).abs() < 1e-12);
    }

    /// |sin(N pi D / 2) / (N sin(pi D / 2))| for a phase progression mismatch
    /// of pi * D per element.
    fn dirichlet(n: usize, delta: f64) -> f64 {
        let x = PI * delta / 2.0;
        if x.sin().abs() < 1e-15 {
            return 1.0;
        }
        ((n as f64 * x).sin() / (n as f64 * x.sin())).abs()
    }

    #[test]
    fn misaligned_gain_follows_dirichlet_kernel() {
        let mut cfg = small(Condition::I);
        cfg.radio.beam_offset = [8.0, -3.0, 2.0];
        let g = beamforming_gains(&cfg).unwrap();
        let (psi, omega) = directions_toward(&cfg.radio.monitor_point).unwrap();
        let aim = [188.0, 57.0, -23.0];
        let (apsi, aomega) = directions_toward(&aim).unwrap();
        // brute-force inner products of the two steering vectors
        let rx = inner(
            &steering_vector(apsi, aomega, 8, 8, 26e9),
            &steering_vector(psi, omega, 8, 8, 26e9),
        )
        .norm()
            / 64.0;
        let kernel = dirichlet(8, psi - apsi) * dirichlet(8, omega - aomega);
        assert!((rx - kernel).abs() < 1e-12);
        assert!((g.array_factor.norm() / 64.0 - kernel * kernel).abs() < 1e-12);
        assert!(g.alignment_loss() < 1.0);
    }

    #[test]
    fn zero_clutter_gain_gives_zero_path_gain() {
        let mut cfg = small(Condition::I);
        cfg.clutter[0].gain = Complex64::new(0.0, 0.0);
        assert_eq!(
            beamforming_gains(&cfg).unwrap().clutter[0],
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn calibrate_noise_cases() {
        let ones = vec![Complex64::new(1.0, 0.0); 16];
        assert!((calibrate_noise(&ones, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((calibrate_noise(&ones, 20.0).unwrap() - 0.01).abs() < 1e-15);
        let zeros = vec![Complex64::new(0.0, 0.0); 4];
        assert!(matches!(
            calibrate_noise(&zeros, 0.0),
            Err(Error::ZeroSignal)
        ));
    }

    #[test]
    fn condition_three_power_matches_streaming_oracle() {
        let mut cfg = small(Condition::III);
        cfg.snr_db = 10.0;
        let truth = sample_deformation_truth(&cfg);
        let synth = EchoSynthesizer::new(&cfg, &truth).unwrap();
        let streamed = synth.mean_power();
        // Welford running mean over the noiseless frames
        let mut buf = vec![Complex64::new(0.0, 0.0); synth.frame_len()];
        let (mut mean, mut count) = (0.0f64, 0usize);
        for p in 0..synth.frames() {
            synth.noiseless_frame(p, &mut buf);
            for z in &buf {
                count += 1;
                mean += (z.norm_sqr() - mean) / count as f64;
            }
        }
        assert!((streamed - mean).abs() < 1e-10 * mean);
        let tensor = synthesize_echo(&cfg, &truth, 3).unwrap();
        assert!((tensor.noise_variance - mean / 10.0).abs() < 1e-9 * mean);
    }

    #[test]
    fn single_static_path_is_constant_over_frames_and_symbols() {
        let cfg = bare();
        let truth = sample_deformation_truth(&cfg);
        let t = synthesize_echo(&cfg, &truth, 1).unwrap();
        let g = beamforming_gains(&cfg).unwrap().micro;
        let r0 = norm3(&cfg.radio.monitor_point);
        for p in 0..t.frames {
            for n in 0..t.symbols {
                for m in [0, 17, 63] {
                    let f = cfg.radio.subcarrier_frequency(m);
                    let expected = g * Complex64::from_polar(1.0, -4.0 * PI * f * r0 / 3e8);
                    assert!((t.get(p, n, m) - expected).norm() < 1e-9 * g.norm());
                }
            }
        }
    }

    #[test]
    fn doppler_rotation_isolated_by_symbol_ratio() {
        let mut cfg = bare();
        cfg.interferers.push(Interferer {
            initial_position: [175.0, 60.0, -25.0],
            speed_mps: 12.0,
            gain: Complex64::new(0.4, 0.2),
        });
        let truth = sample_deformation_truth(&cfg);
        let t = synthesize_echo(&cfg, &truth, 1).unwrap();
        let mut no_mover = cfg.clone();
        no_mover.interferers.clear();
        let s = synthesize_echo(&no_mover, &truth, 1).unwrap();
        let state = interferer_kinematics(&cfg, 0, 2).unwrap();
        let expected = Complex64::from_polar(
            1.0,
            4.0 * PI * 26e9 * state.radial_velocity_mps * 10e-6 / 3e8,
        );
        for m in [0, 5, 40] {
            let mover_n = t.get(2, 0, m) - s.get(2, 0, m);
            let mover_n1 = t.get(2, 1, m) - s.get(2, 1, m);
            assert!((mover_n1 / mover_n - expected).norm() < 1e-9);
        }
    }

    #[test]
    fn phase_tracks_deformation() {
        let mut cfg = bare();
        cfg.bridge.free_amplitude_m = 2e-3;
        cfg.radio.frames = 30;
        let truth = sample_deformation_truth(&cfg);
        let t = synthesize_echo(&cfg, &truth, 1).unwrap();
        let mp = cfg.radio.monitor_point;
        let r0 = to_spherical(&mp, truth.values_m[0]).unwrap().range_m;
        for p in 0..t.frames {
            let rp = to_spherical(&mp, truth.values_m[p]).unwrap().range_m;
            let measured = (t.get(p, 0, 0) * t.get(0, 0, 0).conj()).arg();
            let expected = Complex64::from_polar(1.0, -4.0 * PI * 26e9 * (rp - r0) / 3e8).arg();
            assert!((measured - expected).abs() < 1e-7, "frame {p}");
        }
    }

    #[test]
    fn subcarrier_phase_step_is_constant() {
        let cfg = bare();
        let truth = sample_deformation_truth(&cfg);
        let t = synthesize_echo(&cfg, &truth, 1).unwrap();
        let r0 = norm3(&cfg.radio.monitor_point);
        let expected = Complex64::from_polar(1.0, -4.0 * PI * 480e3 * r0 / 3e8).arg();
        for m in 0..63 {
            let step = (t.get(1, 2, m + 1) * t.get(1, 2, m).conj()).arg();
            assert!((step - expected).abs() < 1e-7);
        }
    }

    #[test]
    fn empirical_snr_at_zero_db() {
        let mut cfg = small(Condition::I);
        cfg.radio.frames = 20;
        cfg.radio.subcarriers = 256;
        cfg.snr_db = 0.0;
        let truth = sample_deformation_truth(&cfg);
        let noisy = synthesize_echo(&cfg, &truth, 5).unwrap();
        let mut clean_cfg = cfg.clone();
        clean_cfg.snr_db = f64::INFINITY;
        let clean = synthesize_echo(&clean_cfg, &truth, 5).unwrap();
        let signal = clean.data.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let noise = noisy
            .data
            .iter()
            .zip(&clean.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>();
        let snr = 10.0 * (signal / noise).log10();
        assert!(snr.abs() < 0.5, "{snr}");
    }

    #[test]
    fn same_seed_is_bit_identical_and_frames_are_independent() {
        let mut cfg = small(Condition::III);
        cfg.snr_db = -3.0;
        let truth = sample_deformation_truth(&cfg);
        let a = synthesize_echo(&cfg, &truth, 77).unwrap();
        let b = synthesize_echo(&cfg, &truth, 77).unwrap();
        assert_eq!(a, b);
        let c = synthesize_echo(&cfg, &truth, 78).unwrap();
        assert_ne!(a.data, c.data);

        // regenerate frame 4 alone
        let synth = EchoSynthesizer::new(&cfg, &truth).unwrap();
        let mut buf = vec![Complex64::new(0.0, 0.0); synth.frame_len()];
        synth.noisy_frame(4, a.noise_variance, 77, &mut buf);
        assert_eq!(buf.as_slice(), a.frame(4));
    }

    #[test]
    fn dump_round_trip() {
        let mut cfg = small(Condition::II);
        cfg.snr_db = 5.0;
        let truth = sample_deformation_truth(&cfg);
        let t = synthesize_echo(&cfg, &truth, 2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("y.bin");
        t.write_dump(&path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..4], b"BMDM");
        assert_eq!(bytes.len(), 32 + t.data.len() * 8);
        let back = EchoTensor::read_dump(&path).unwrap();
        assert_eq!((back.frames, back.symbols, back.subcarriers), (6, 8, 64));
        assert_eq!(back.noise_variance, t.noise_variance);
        for (a, b) in back.data.iter().zip(&t.data) {
            assert_eq!(a.re, b.re as f32 as f64);
            assert_eq!(a.im, b.im as f32 as f64);
        }
        std::fs::write(&path, b"XXXX").unwrap();
        assert!(EchoTensor::read_dump(&path).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn common_gain_rotation_rotates_every_entry(beta in -PI..PI) {
            let mut cfg = small(Condition::III);
            cfg.snr_db = f64::INFINITY;
            cfg.radio.frames = 4;
            let truth = sample_deformation_truth(&cfg);
            let a = synthesize_echo(&cfg, &truth, 1).unwrap();
            let rot = Complex64::from_polar(1.0, beta);
            cfg.radio.micro_gain *= rot;
            cfg.interferers.iter_mut().for_each(|i| i.gain *= rot);
            cfg.clutter.iter_mut().for_each(|c| c.gain *= rot);
            let b = synthesize_echo(&cfg, &truth, 1).unwrap();
            for (x, y) in a.data.iter().zip(&b.data) {
                prop_assert!((x * rot - y).norm() < 1e-9);
            }
        }
    }
}
