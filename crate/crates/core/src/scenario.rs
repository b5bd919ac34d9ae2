//! Scene description: bridge, excitation sources, interferers, static
//! clutter and the OFDM radio, plus the three reference presets.
//!
//! Scenarios are stored as TOML. Keys carry the symbol names of the signal
//! model, so each value maps directly to one model parameter:
//!
//! ```toml
//! snr_db = 0.0
//! rng_seed = 1
//!
//! [bridge]
//! span_W = 100.0
//! direction_l = [1.0, 0.0, 0.0]
//! # ...
//!
//! [radio]
//! carrier_fc = 26e9
//! micro_gain_Gdelta = [1.0, 0.0]   # complex gains are [re, im]
//! # ...
//!
//! [[source]]          # repeated; `position_Le` or `attached_interferer`
//! [[interferer]]      # repeated
//! [[clutter]]         # repeated
//! ```
//!
//! All values are SI. A scenario with `snr_db = inf` is synthesized without
//! noise.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bridge::to_spherical;
use crate::error::{Error, Result};
use crate::{norm3, sub3, Vec3, SPEED_OF_LIGHT};

/// Complex numbers are written as `[re, im]` pairs.
mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BridgeParams {
    #[serde(rename = "span_W")]
    pub span_m: f64,
    #[serde(rename = "youngs_modulus_xi")]
    pub youngs_modulus_pa: f64,
    #[serde(rename = "inertia_IB")]
    pub inertia_m4: f64,
    #[serde(rename = "mass_per_length_rhoB")]
    pub mass_per_length: f64,
    /// Attenuation magnitude per meter; decay is always `exp(-|zeta| dL)`.
    #[serde(rename = "damping_zeta")]
    pub damping_per_m: f64,
    #[serde(rename = "free_amp_A0")]
    pub free_amplitude_m: f64,
    #[serde(rename = "free_phase_phiB")]
    pub free_phase_rad: f64,
    /// Unit vector along the deck; normalized on load.
    #[serde(rename = "direction_l")]
    pub direction: Vec3,
}

/// Where an excitation source acts on the deck.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceAnchor {
    Fixed(Vec3),
    /// Rides along with the interferer of the given index.
    Interferer(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSource", into = "RawSource")]
pub struct ExcitationSource {
    pub amplitude_m: f64,
    pub frequency_hz: f64,
    pub phase_rad: f64,
    pub anchor: SourceAnchor,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSource {
    #[serde(rename = "amplitude_Ae")]
    amplitude: f64,
    #[serde(rename = "frequency_fe")]
    frequency: f64,
    #[serde(rename = "phase_phiBe", default)]
    phase: f64,
    #[serde(rename = "position_Le", skip_serializing_if = "Option::is_none")]
    position: Option<Vec3>,
    #[serde(skip_serializing_if = "Option::is_none")]
    attached_interferer: Option<usize>,
}

impl TryFrom<RawSource> for ExcitationSource {
    type Error = String;

    fn try_from(raw: RawSource) -> std::result::Result<Self, String> {
        let anchor = match (raw.position, raw.attached_interferer) {
            (Some(p), None) => SourceAnchor::Fixed(p),
            (None, Some(k)) => SourceAnchor::Interferer(k),
            _ => {
                return Err(
                    "source needs exactly one of `position_Le` or `attached_interferer`".into(),
                )
            }
        };
        Ok(ExcitationSource {
            amplitude_m: raw.amplitude,
            frequency_hz: raw.frequency,
            phase_rad: raw.phase,
            anchor,
        })
    }
}

impl From<ExcitationSource> for RawSource {
    fn from(s: ExcitationSource) -> Self {
        let (position, attached_interferer) = match s.anchor {
            SourceAnchor::Fixed(p) => (Some(p), None),
            SourceAnchor::Interferer(k) => (None, Some(k)),
        };
        RawSource {
            amplitude: s.amplitude_m,
            frequency: s.frequency_hz,
            phase: s.phase_rad,
            position,
            attached_interferer,
        }
    }
}

/// A vehicle or pedestrian moving along the deck.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interferer {
    #[serde(rename = "initial_position_L0k")]
    pub initial_position: Vec3,
    /// Signed speed along the bridge direction (m/s).
    #[serde(rename = "speed_along_bridge_vlk")]
    pub speed_mps: f64,
    /// Echo gain before beamforming; constant over frames.
    #[serde(rename = "gain_Gk", with = "complex_pair")]
    pub gain: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaticClutter {
    pub position: Vec3,
    #[serde(rename = "gain_Gs", with = "complex_pair")]
    pub gain: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioParams {
    #[serde(rename = "carrier_fc")]
    pub carrier_hz: f64,
    #[serde(rename = "subcarrier_spacing_df")]
    pub subcarrier_spacing_hz: f64,
    #[serde(rename = "num_subcarriers_M")]
    pub subcarriers: usize,
    #[serde(rename = "sensing_symbols_N")]
    pub symbols: usize,
    #[serde(rename = "frames_P")]
    pub frames: usize,
    #[serde(rename = "frame_duration_Tf")]
    pub frame_duration_s: f64,
    #[serde(rename = "symbol_duration_Tsym")]
    pub symbol_duration_s: f64,
    #[serde(rename = "array_Hx")]
    pub tx_array_x: usize,
    #[serde(rename = "array_Hz")]
    pub tx_array_z: usize,
    #[serde(rename = "array_Rx")]
    pub rx_array_x: usize,
    #[serde(rename = "array_Rz")]
    pub rx_array_z: usize,
    pub monitor_point: Vec3,
    /// Beam aiming error; the beams point at `monitor_point + beam_offset`.
    #[serde(default)]
    pub beam_offset: Vec3,
    #[serde(rename = "micro_gain_Gdelta", with = "complex_pair")]
    pub micro_gain: Complex64,
    /// Power allocation times transmit power.
    #[serde(rename = "tx_power_rhoPt", default = "one")]
    pub tx_power: f64,
    /// Total sensing symbols captured per frame for the LCM-length phasor
    /// mean; `0` disables the extended capture.
    #[serde(rename = "extended_symbols", default)]
    pub extended_symbols: usize,
}

fn one() -> f64 {
    1.0
}

fn default_threshold_factor() -> f64 {
    0.2
}

fn default_circular_proportion() -> f64 {
    0.9
}

impl RadioParams {
    /// Symbols synthesized per frame (sensing plus any extended capture).
    pub fn captured_symbols(&self) -> usize {
        self.symbols.max(self.extended_symbols)
    }

    pub fn subcarrier_frequency(&self, m: usize) -> f64 {
        self.carrier_hz + m as f64 * self.subcarrier_spacing_hz
    }

    /// `c / (2 df)`.
    pub fn unambiguous_range(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.subcarrier_spacing_hz)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// `inf` disables noise.
    pub snr_db: f64,
    pub rng_seed: u64,
    #[serde(default = "default_threshold_factor")]
    pub cpm_threshold_factor: f64,
    #[serde(default = "default_circular_proportion")]
    pub cpm_circular_proportion: f64,
    pub bridge: BridgeParams,
    pub radio: RadioParams,
    #[serde(rename = "source", default)]
    pub sources: Vec<ExcitationSource>,
    #[serde(rename = "interferer", default)]
    pub interferers: Vec<Interferer>,
    #[serde(rename = "clutter", default)]
    pub clutter: Vec<StaticClutter>,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let mut cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serializes to TOML")
    }

    pub fn is_noiseless(&self) -> bool {
        self.snr_db == f64::INFINITY
    }

    /// Checks every invariant and normalizes the bridge direction.
    pub fn validate(&mut self) -> Result<()> {
        let b = &mut self.bridge;
        positive("span_W", b.span_m)?;
        positive("youngs_modulus_xi", b.youngs_modulus_pa)?;
        positive("inertia_IB", b.inertia_m4)?;
        positive("mass_per_length_rhoB", b.mass_per_length)?;
        finite("damping_zeta", b.damping_per_m)?;
        b.damping_per_m = b.damping_per_m.abs();
        finite("free_amp_A0", b.free_amplitude_m)?;
        finite("free_phase_phiB", b.free_phase_rad)?;
        let len = norm3(&b.direction);
        if !(len.is_finite() && len > 0.0) {
            return Err(Error::validation("direction_l", "must be a nonzero vector"));
        }
        b.direction = b.direction.map(|c| c / len);

        let r = &self.radio;
        positive("carrier_fc", r.carrier_hz)?;
        positive("subcarrier_spacing_df", r.subcarrier_spacing_hz)?;
        if r.subcarriers < 2 || !r.subcarriers.is_power_of_two() {
            return Err(Error::validation(
                "num_subcarriers_M",
                format!("{} is not a power of two >= 2", r.subcarriers),
            ));
        }
        if r.symbols == 0 {
            return Err(Error::validation("sensing_symbols_N", "must be >= 1"));
        }
        if r.frames < 4 {
            return Err(Error::validation("frames_P", "must be >= 4"));
        }
        positive("frame_duration_Tf", r.frame_duration_s)?;
        positive("symbol_duration_Tsym", r.symbol_duration_s)?;
        for (field, n) in [
            ("array_Hx", r.tx_array_x),
            ("array_Hz", r.tx_array_z),
            ("array_Rx", r.rx_array_x),
            ("array_Rz", r.rx_array_z),
        ] {
            if n == 0 {
                return Err(Error::validation(field, "must be >= 1"));
            }
        }
        let range0 = norm3(&r.monitor_point);
        if !(range0.is_finite() && range0 > 0.0) {
            return Err(Error::validation(
                "monitor_point",
                "must be away from the origin",
            ));
        }
        if range0 >= r.unambiguous_range() {
            return Err(Error::validation(
                "monitor_point",
                "beyond the unambiguous range c/(2 df)",
            ));
        }
        if r.beam_offset.iter().any(|c| !c.is_finite())
            || norm3(&[
                r.monitor_point[0] + r.beam_offset[0],
                r.monitor_point[1] + r.beam_offset[1],
                r.monitor_point[2] + r.beam_offset[2],
            ]) == 0.0
        {
            return Err(Error::validation(
                "beam_offset",
                "beam must aim away from the origin",
            ));
        }
        if !(r.micro_gain.norm() > 0.0 && r.micro_gain.norm().is_finite()) {
            return Err(Error::validation("micro_gain_Gdelta", "must be nonzero"));
        }
        positive("tx_power_rhoPt", r.tx_power)?;

        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return Err(Error::validation("snr_db", "must be finite or +inf"));
        }
        if !(self.cpm_threshold_factor > 0.0 && self.cpm_threshold_factor < 1.0) {
            return Err(Error::validation(
                "cpm_threshold_factor",
                "must lie in (0, 1)",
            ));
        }
        if !(self.cpm_circular_proportion > 0.0 && self.cpm_circular_proportion <= 1.0) {
            return Err(Error::validation(
                "cpm_circular_proportion",
                "must lie in (0, 1]",
            ));
        }

        for s in &self.sources {
            if !(s.amplitude_m >= 0.0 && s.amplitude_m.is_finite()) {
                return Err(Error::validation("amplitude_Ae", "must be >= 0"));
            }
            positive("frequency_fe", s.frequency_hz)?;
            finite("phase_phiBe", s.phase_rad)?;
            match s.anchor {
                SourceAnchor::Fixed(p) if p.iter().any(|c| !c.is_finite()) => {
                    return Err(Error::validation("position_Le", "must be finite"))
                }
                SourceAnchor::Interferer(k) if k >= self.interferers.len() => {
                    return Err(Error::validation(
                        "attached_interferer",
                        format!("index {k} but only {} interferers", self.interferers.len()),
                    ))
                }
                _ => {}
            }
        }

        let half_span = 0.5 * self.bridge.span_m;
        for it in &self.interferers {
            finite("speed_along_bridge_vlk", it.speed_mps)?;
            let (along, off_line) = self.bridge_coordinates(&it.initial_position);
            if off_line > 1e-6 || along.abs() > half_span + 1e-9 {
                return Err(Error::validation(
                    "initial_position_L0k",
                    "must lie on the bridge line within the span",
                ));
            }
        }

        let max_range = self.radio.unambiguous_range();
        for c in &self.clutter {
            let d = norm3(&c.position);
            if !(d > 0.0 && d < max_range) {
                return Err(Error::validation(
                    "clutter.position",
                    "must lie inside the service area (0, c/(2 df))",
                ));
            }
        }
        Ok(())
    }

    /// Signed distance along the deck from the monitor point, and distance
    /// off the deck line.
    pub fn bridge_coordinates(&self, point: &Vec3) -> (f64, f64) {
        let rel = sub3(point, &self.radio.monitor_point);
        let l = &self.bridge.direction;
        let along = rel[0] * l[0] + rel[1] * l[1] + rel[2] * l[2];
        let perp = [
            rel[0] - along * l[0],
            rel[1] - along * l[1],
            rel[2] - along * l[2],
        ];
        (along, norm3(&perp))
    }

    /// Point on the deck `along` meters from the monitor point.
    pub fn deck_point(&self, along: f64) -> Vec3 {
        let m = &self.radio.monitor_point;
        let l = &self.bridge.direction;
        [
            m[0] + along * l[0],
            m[1] + along * l[1],
            m[2] + along * l[2],
        ]
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(field, format!("{v} must be positive")))
    }
}

fn finite(field: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(field, "must be finite"))
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ScenarioConfig::from_toml_str(&text)
}

pub fn save_scenario(cfg: &ScenarioConfig, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, cfg.to_toml_string()).map_err(|e| Error::io(path, e))
}

/// The three reference experimental conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// Static clutter only.
    I,
    /// One interferer at 12 m/s.
    II,
    /// Three interferers at 30, 15 and -12 m/s.
    III,
}

impl TryFrom<u8> for Condition {
    type Error = Error;

    fn try_from(id: u8) -> Result<Self> {
        match id {
            1 => Ok(Condition::I),
            2 => Ok(Condition::II),
            3 => Ok(Condition::III),
            other => Err(Error::UnknownCondition(other)),
        }
    }
}

pub const DEFAULT_SEED: u64 = 2024;

/// Monitor point at mid-span.
pub const MONITOR_POINT: Vec3 = [180.0, 60.0, -25.0];

/// Fixed excitation sources: (amplitude m, frequency Hz, position).
const FIXED_SOURCES: [(f64, f64, Vec3); 5] = [
    (5.15e-3, 0.8, [145.0, 60.0, -25.0]),
    (3.72e-3, 1.5, [165.0, 60.0, -25.0]),
    (4.59e-3, 0.6, [180.0, 60.0, -25.0]),
    (3.42e-3, 1.1, [195.0, 60.0, -25.0]),
    (4.68e-3, 1.3, [220.0, 60.0, -25.0]),
];

/// Interferer echo magnitude relative to the monitored point.
pub const INTERFERER_GAIN: f64 = 1.0;

const STATIC_CLUTTER_COUNT: usize = 8;

/// Clutter ranges are drawn within this distance of the monitor range.
pub const CLUTTER_RANGE_SPREAD_M: f64 = 6.0;

/// Builds a reference condition; seeded parts (clutter layout, moving
/// excitation amplitudes and frequencies, gain phases) come from `seed`.
pub fn preset_condition(condition: Condition, seed: u64) -> ScenarioConfig {
    let bridge = BridgeParams {
        span_m: 100.0,
        youngs_modulus_pa: 2.943e10,
        inertia_m4: 8.65,
        mass_per_length: 3.6e4,
        damping_per_m: 0.02,
        free_amplitude_m: 1.35e-3,
        free_phase_rad: 0.0,
        direction: [1.0, 0.0, 0.0],
    };
    let radio = RadioParams {
        carrier_hz: 26e9,
        subcarrier_spacing_hz: 480e3,
        subcarriers: 1024,
        symbols: 42,
        frames: 1500,
        frame_duration_s: 10e-3,
        symbol_duration_s: 10e-6,
        tx_array_x: 8,
        tx_array_z: 8,
        rx_array_x: 8,
        rx_array_z: 8,
        monitor_point: MONITOR_POINT,
        beam_offset: [0.0; 3],
        micro_gain: Complex64::new(1.0, 0.0),
        tx_power: 1.0,
        extended_symbols: 0,
    };
    let mut cfg = ScenarioConfig {
        snr_db: 0.0,
        rng_seed: seed,
        cpm_threshold_factor: default_threshold_factor(),
        cpm_circular_proportion: default_circular_proportion(),
        bridge,
        radio,
        sources: FIXED_SOURCES
            .iter()
            .map(|&(a, f, pos)| ExcitationSource {
                amplitude_m: a,
                frequency_hz: f,
                phase_rad: 0.0,
                anchor: SourceAnchor::Fixed(pos),
            })
            .collect(),
        interferers: Vec::new(),
        clutter: Vec::new(),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    cfg.clutter = random_clutter(&cfg, STATIC_CLUTTER_COUNT, &mut rng);

    // (start offset along the deck from the monitor point, speed)
    let movers: &[(f64, f64)] = match condition {
        Condition::I => &[],
        Condition::II => &[(-10.0, 12.0)],
        Condition::III => &[(-30.0, 30.0), (-15.0, 15.0), (20.0, -12.0)],
    };
    for &(start, speed) in movers {
        add_interferer(&mut cfg, start, speed, &mut rng);
    }
    cfg
}

/// Replaces all moving interferers (and the excitation sources riding them)
/// with `count` random movers: uniform start on the span, speed 0–50 m/s.
pub fn randomize_interferers(cfg: &mut ScenarioConfig, count: usize, seed: u64) {
    cfg.sources
        .retain(|s| matches!(s.anchor, SourceAnchor::Fixed(_)));
    cfg.interferers.clear();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = 0.5 * cfg.bridge.span_m;
    for _ in 0..count {
        let start = rng.random_range(-half..=half);
        let speed = rng.random_range(0.0..=50.0);
        add_interferer(cfg, start, speed, &mut rng);
    }
}

fn add_interferer(cfg: &mut ScenarioConfig, start: f64, speed: f64, rng: &mut ChaCha8Rng) {
    let phase = rng.random_range(0.0..2.0 * PI);
    cfg.interferers.push(Interferer {
        initial_position: cfg.deck_point(start),
        speed_mps: speed,
        gain: Complex64::from_polar(INTERFERER_GAIN, phase),
    });
    cfg.sources.push(ExcitationSource {
        amplitude_m: rng.random_range(10e-3..=50e-3),
        frequency_hz: rng.random_range(0.2..=5.0),
        phase_rad: 0.0,
        anchor: SourceAnchor::Interferer(cfg.interferers.len() - 1),
    });
}

fn random_clutter(cfg: &ScenarioConfig, count: usize, rng: &mut ChaCha8Rng) -> Vec<StaticClutter> {
    let pose = to_spherical(&cfg.radio.monitor_point, 0.0).expect("monitor point is valid");
    let spread = 5f64.to_radians();
    (0..count)
        .map(|_| {
            let range =
                pose.range_m + rng.random_range(-CLUTTER_RANGE_SPREAD_M..=CLUTTER_RANGE_SPREAD_M);
            let az = pose.azimuth_rad + rng.random_range(-spread..=spread);
            let el = pose.elevation_rad + rng.random_range(-spread..=spread);
            let position = [
                range * el.sin() * az.cos(),
                range * el.sin() * az.sin(),
                range * el.cos(),
            ];
            let gain =
                Complex64::from_polar(rng.random_range(0.3..=1.0), rng.random_range(0.0..2.0 * PI));
            StaticClutter { position, gain }
        })
        .collect()
}
