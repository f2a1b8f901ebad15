//! Ensemble statistics, exponent fitting, finite-size data collapse and
//! mutual-information post-processing.

mod collapse;
mod fit;
mod series;

pub use collapse::{collapse, collapse_objective, CollapseResult, ScalingForm};
pub use fit::{
    fit_exponential, fit_linear, fit_log_slope, fit_power_law, fit_power_law_bootstrap,
    fit_quadratic, FitResult, LinearFit,
};
pub use series::{Axis, Ensemble, Meta, Point, Series};

use crate::error::{Error, Result};

/// Chord coordinate L sin(pi L_A / L) / pi used for steady-state entropy fits
/// on the periodic chain.
pub fn chord(total: usize, la: usize) -> f64 {
    let l = total as f64;
    l * (std::f64::consts::PI * la as f64 / l).sin() / std::f64::consts::PI
}

/// Four-point cross ratio on the ring, built from chord distances.
pub fn cross_ratio(points: [f64; 4], total: f64) -> Result<f64> {
    let d = |i: usize, j: usize| {
        (std::f64::consts::PI * (points[i] - points[j]).abs() / total).sin().abs()
    };
    let (x12, x34, x13, x24) = (d(0, 1), d(2, 3), d(0, 2), d(1, 3));
    if x12 < 1e-12 || x34 < 1e-12 || x13 < 1e-12 || x24 < 1e-12 {
        return Err(Error::Fit("coincident points in cross ratio".into()));
    }
    Ok(x12 * x34 / (x13 * x24))
}

/// Sample-time grid: every step up to 100, then ~20 points per decade,
/// always ending at `t_max`.
pub fn sample_times(t_max: u32) -> Vec<u32> {
    let mut ts: Vec<u32> = (0..=t_max.min(100)).collect();
    if t_max > 100 {
        let mut t = 100.0f64;
        let ratio = 10f64.powf(1.0 / 20.0);
        while t < t_max as f64 {
            t *= ratio;
            ts.push((t.round() as u32).min(t_max));
        }
    }
    ts.dedup();
    ts
}

/// Log-spaced integer grid in `[lo, hi]` with roughly `per_decade` points per
/// decade, deduplicated.
pub fn log_times(lo: u32, hi: u32, per_decade: u32) -> Vec<u32> {
    assert!(lo >= 1 && hi >= lo);
    let mut ts = vec![lo];
    let ratio = 10f64.powf(1.0 / per_decade as f64);
    let mut t = lo as f64;
    while t < hi as f64 {
        t = (t * ratio).max(t + 1.0);
        ts.push((t.round() as u32).min(hi));
    }
    ts.dedup();
    ts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_ratio_symmetric_configuration() {
        // points at 0, L/4, L/2, 3L/4: all chords equal in pairs -> 1/2
        let eta = cross_ratio([0.0, 64.0, 128.0, 192.0], 256.0).unwrap();
        assert!((eta - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cross_ratio_small_interval_limit() {
        // adjacent tiny intervals far apart: eta -> 0
        let eta = cross_ratio([0.0, 1.0, 128.0, 129.0], 256.0).unwrap();
        assert!(eta < 1e-3);
        assert!(cross_ratio([0.0, 0.0, 10.0, 20.0], 256.0).is_err());
    }

    #[test]
    fn time_grids() {
        let ts = sample_times(10_000);
        assert_eq!(ts[0], 0);
        assert_eq!(*ts.last().unwrap(), 10_000);
        assert!(ts.windows(2).all(|w| w[0] < w[1]));
        assert!(ts.len() < 200);
        let lg = log_times(100, 1000, 20);
        assert_eq!(lg[0], 100);
        assert_eq!(*lg.last().unwrap(), 1000);
    }
}
