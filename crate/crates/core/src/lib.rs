//! Bridge micro-deformation monitoring with an OFDM sensing base station.
//!
//! The crate simulates a millimeter-wave base station that watches one point
//! of a bridge deck through OFDM echoes, then recovers the sub-millimeter
//! vertical deformation of that point in the presence of moving vehicles and
//! static scatterers. The processing chain is:
//!
//! 1. [`bridge`]: ground-truth deformation from the free/forced vibration
//!    model, plus the geometry and kinematics of every path.
//! 2. [`echo`]: compensated frequency-domain echo tensor `Y[p, n, m]`
//!    (frame, sensing symbol, subcarrier) with calibrated complex noise.
//! 3. [`range`]: per-symbol inverse DFT over subcarriers and extraction of the
//!    monitored range bin.
//! 4. [`suppression`]: per-frame removal of moving interferers (circle-fit
//!    center, phasor mean, or the LCM-length mean) and cross-frame removal
//!    of the static clutter sum.
//! 5. [`estimation`]: phase differencing, history-predicted unwrapping and
//!    radial-to-vertical inversion.
//! 6. [`harness`]: Monte Carlo trials, RMSE sweeps and CSV export.
//!
//! Scenarios are described by [`scenario::ScenarioConfig`] and can be loaded
//! from TOML files or built from the three reference presets.

pub mod bridge;
pub mod echo;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod range;
pub mod scenario;
pub mod suppression;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Propagation speed used throughout the simulator (m/s).
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// A point or direction in the base-station frame (meters).
pub type Vec3 = [f64; 3];

pub(crate) fn norm3(v: &Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub(crate) fn sub3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
