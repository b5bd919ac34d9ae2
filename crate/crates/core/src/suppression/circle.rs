//! Algebraic least-squares circle fitting in the complex plane.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Fits whose normal matrix is worse conditioned than this are rejected.
pub const MAX_CONDITION_NUMBER: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleFit {
    pub center: Complex64,
    pub radius: f64,
    /// RMS of `| |z - center| - radius |` over the fitted points.
    pub rms_residual: f64,
    /// Share of points within `threshold_factor * radius` of the circle.
    pub qualified_fraction: f64,
}

impl CircleFit {
    pub fn qualified_fraction_of(&self, points: &[Complex64], threshold_factor: f64) -> f64 {
        if points.is_empty() {
            return 0.0;
        }
        let threshold = threshold_factor * self.radius;
        let hits = points
            .iter()
            .filter(|z| ((**z - self.center).norm() - self.radius).abs() <= threshold)
            .count();
        hits as f64 / points.len() as f64
    }
}

/// Kåsa fit: minimizes `sum (|z - c|^2 - r^2)^2` through the linear system
/// in `(Re c, Im c, r^2 - |c|^2)`.
///
/// Points are centered and scaled to unit RMS spread before solving, so the
/// condition check reflects geometry rather than magnitude.
pub fn fit_circle(
    points: &[Complex64],
    min_points: usize,
    threshold_factor: f64,
) -> Result<CircleFit> {
    if points.len() < min_points.max(3) {
        return Err(Error::DegenerateFit("too few points"));
    }
    let n = points.len() as f64;
    let mean = points.iter().sum::<Complex64>() / n;
    let spread = (points.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / n).sqrt();
    if !(spread > 0.0 && spread.is_finite()) {
        return Err(Error::DegenerateFit("coincident points"));
    }

    let mut normal = Matrix3::<f64>::zeros();
    let mut rhs = Vector3::<f64>::zeros();
    for z in points {
        let u = (z - mean) / spread;
        let row = Vector3::new(u.re, u.im, 1.0);
        normal += row * row.transpose();
        rhs += row * -u.norm_sqr();
    }
    let eig = SymmetricEigen::new(normal).eigenvalues;
    let (lo, hi) = (eig.min(), eig.max());
    if lo.is_nan() || lo <= 0.0 || hi / lo > MAX_CONDITION_NUMBER {
        return Err(Error::DegenerateFit("collinear points"));
    }
    let sol = normal
        .cholesky()
        .ok_or(Error::DegenerateFit("singular normal matrix"))?
        .solve(&rhs);
    let (cx, cy) = (-0.5 * sol[0], -0.5 * sol[1]);
    let r2 = cx * cx + cy * cy - sol[2];
    if r2.is_nan() || r2 <= 0.0 {
        return Err(Error::DegenerateFit("negative squared radius"));
    }

    let center = mean + Complex64::new(cx, cy) * spread;
    let radius = r2.sqrt() * spread;
    let mut fit = CircleFit {
        center,
        radius,
        rms_residual: 0.0,
        qualified_fraction: 0.0,
    };
    fit.rms_residual = (points
        .iter()
        .map(|z| ((z - center).norm() - radius).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    fit.qualified_fraction = fit.qualified_fraction_of(points, threshold_factor);
    Ok(fit)
}

/// Circularity test: at least `proportion` of the points lie within
/// `threshold_factor * radius` of the fitted circle.
pub fn classify_circular(
    points: &[Complex64],
    fit: &CircleFit,
    threshold_factor: f64,
    proportion: f64,
) -> bool {
    fit.qualified_fraction_of(points, threshold_factor) >= proportion
}
