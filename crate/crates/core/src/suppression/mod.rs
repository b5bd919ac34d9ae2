//! Clutter suppression at the monitored range bin.

pub mod circle;
pub mod dynamic;
pub mod static_clutter;

pub use circle::{classify_circular, fit_circle, CircleFit};
pub use dynamic::{
    cf_sdir, cpm, doppler_period, ipm_mean, ipm_plan, pm_mdis, symbols_for_velocity, CpmConfig,
    CpmOutcome, DynamicMethod, IpmPlan, IpmStatus,
};
pub use static_clutter::{cf_msir, subtract_temporal_mean, PhasorSeries, SeriesStage};
