//! Deck vibration model, monitor-point geometry and interferer kinematics.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::scenario::{BridgeParams, ExcitationSource, ScenarioConfig, SourceAnchor};
use crate::{norm3, sub3, Vec3};

/// Fundamental bending frequency `pi / (2 W^2) * sqrt(xi I / rho)` in Hz.
pub fn fundamental_frequency(bridge: &BridgeParams) -> f64 {
    PI / (2.0 * bridge.span_m * bridge.span_m)
        * (bridge.youngs_modulus_pa * bridge.inertia_m4 / bridge.mass_per_length).sqrt()
}

/// Free ("breathing") deformation at time `t`.
pub fn free_deformation(t: f64, bridge: &BridgeParams) -> f64 {
    bridge.free_amplitude_m
        * (2.0 * PI * fundamental_frequency(bridge) * t + bridge.free_phase_rad).sin()
}

/// Forced deformation from all excitation sources at time `t`.
///
/// Each source is attenuated by `exp(-|zeta| dL)` where `dL` is its distance
/// to the monitor point; moving sources take their position from
/// `interferer_position(k, t)`.
pub fn forced_deformation<F>(
    t: f64,
    sources: &[ExcitationSource],
    damping_per_m: f64,
    monitor_point: &Vec3,
    interferer_position: F,
) -> f64
where
    F: Fn(usize, f64) -> Vec3,
{
    sources
        .iter()
        .map(|s| {
            let at = match s.anchor {
                SourceAnchor::Fixed(p) => p,
                SourceAnchor::Interferer(k) => interferer_position(k, t),
            };
            let distance = norm3(&sub3(&at, monitor_point));
            s.amplitude_m
                * (-damping_per_m.abs() * distance).exp()
                * (2.0 * PI * s.frequency_hz * t + s.phase_rad).sin()
        })
        .sum()
}

/// Per-frame vertical deformation of the monitor point, sampled at `p * Tf`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationTruth {
    pub values_m: Vec<f64>,
    pub frame_duration_s: f64,
}

impl DeformationTruth {
    pub fn len(&self) -> usize {
        self.values_m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values_m.is_empty()
    }

    /// Deformation relative to frame 0, the quantity the estimator recovers.
    pub fn relative(&self) -> Vec<f64> {
        let first = self.values_m.first().copied().unwrap_or(0.0);
        self.values_m.iter().map(|v| v - first).collect()
    }
}

pub fn sample_deformation_truth(cfg: &ScenarioConfig) -> DeformationTruth {
    let tf = cfg.radio.frame_duration_s;
    let values_m = (0..cfg.radio.frames)
        .map(|p| {
            let t = p as f64 * tf;
            free_deformation(t, &cfg.bridge)
                + forced_deformation(
                    t,
                    &cfg.sources,
                    cfg.bridge.damping_per_m,
                    &cfg.radio.monitor_point,
                    |k, t| interferer_position(cfg, k, t),
                )
        })
        .collect();
    DeformationTruth {
        values_m,
        frame_duration_s: tf,
    }
}

/// Monitor-point pose seen from the base station.
///
/// `elevation_rad` follows the `arccos(z / R)` convention, so it lies in
/// `[0, pi]` and is measured from the +z axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPose {
    pub azimuth_rad: f64,
    pub elevation_rad: f64,
    pub range_m: f64,
}

/// Angles from the undeformed point; range with the vertical deformation
/// applied.
pub fn to_spherical(monitor_point: &Vec3, deformation_m: f64) -> Result<SphericalPose> {
    let [x, y, z] = *monitor_point;
    let range0 = norm3(monitor_point);
    if range0 == 0.0 {
        return Err(Error::DegenerateGeometry(
            "monitor point at the base station",
        ));
    }
    let zd = z + deformation_m;
    Ok(SphericalPose {
        azimuth_rad: y.atan2(x),
        elevation_rad: (z / range0).clamp(-1.0, 1.0).acos(),
        range_m: (x * x + y * y + zd * zd).sqrt(),
    })
}

/// Horizontal and pitch spatial directions `(Psi, Omega)`.
pub fn spatial_directions(azimuth_rad: f64, elevation_rad: f64) -> (f64, f64) {
    (elevation_rad.cos() * azimuth_rad.cos(), elevation_rad.sin())
}

/// Spatial directions toward a Cartesian point.
pub fn directions_toward(point: &Vec3) -> Result<(f64, f64)> {
    let pose = to_spherical(point, 0.0)?;
    Ok(spatial_directions(pose.azimuth_rad, pose.elevation_rad))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfererState {
    pub position: Vec3,
    pub range_m: f64,
    /// Positive when receding from the base station.
    pub radial_velocity_mps: f64,
}

/// Velocity vector of interferer `k` along the deck.
fn interferer_velocity(cfg: &ScenarioConfig, k: usize) -> Vec3 {
    let l = &cfg.bridge.direction;
    let len = norm3(l);
    let v = cfg.interferers[k].speed_mps;
    [l[0] / len * v, l[1] / len * v, l[2] / len * v]
}

pub fn interferer_position(cfg: &ScenarioConfig, k: usize, t: f64) -> Vec3 {
    let v = interferer_velocity(cfg, k);
    let l0 = cfg.interferers[k].initial_position;
    [l0[0] + v[0] * t, l0[1] + v[1] * t, l0[2] + v[2] * t]
}

/// State of interferer `k` at frame `p`.
///
/// # Panics
/// If `k` is not a valid interferer index.
pub fn interferer_kinematics(cfg: &ScenarioConfig, k: usize, p: usize) -> Result<InterfererState> {
    let v = interferer_velocity(cfg, k);
    let position = interferer_position(cfg, k, p as f64 * cfg.radio.frame_duration_s);
    let range_m = norm3(&position);
    if range_m == 0.0 {
        return Err(Error::DegenerateGeometry("interferer at the base station"));
    }
    let radial_velocity_mps = v
        .iter()
        .zip(position.iter())
        .map(|(vi, li)| vi * li / range_m)
        .sum();
    Ok(InterfererState {
        position,
        range_m,
        radial_velocity_mps,
    })
}
