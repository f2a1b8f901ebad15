//! Least-squares fitters for power laws, logarithmic growth and decay rates.

use super::series::{Ensemble, Series};
use crate::error::{Error, Result};
use crate::rng::{seed_for, stream};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    /// Fitted exponent or slope.
    pub value: f64,
    pub stderr: f64,
    /// x window the fit used.
    pub window: (f64, f64),
    /// RMS residual in the fit's (possibly log) y coordinate.
    pub residual: f64,
    pub n_points: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r2: f64,
    pub rms_residual: f64,
}

/// Ordinary least squares y = a + b x.
pub fn fit_linear(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return Err(Error::Fit(format!("need >= 2 points, got {n}")));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("degenerate x values".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 =
        xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    let slope_stderr =
        if n > 2 { (ss_res / (nf - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(LinearFit { slope, intercept, slope_stderr, r2, rms_residual: (ss_res / nf).sqrt() })
}

/// Least-squares quadratic y = c0 + c1 x + c2 x^2; returns (c0, c1, c2).
pub fn fit_quadratic(xs: &[f64], ys: &[f64]) -> Result<[f64; 3]> {
    let n = xs.len();
    if n < 3 || n != ys.len() {
        return Err(Error::Fit(format!("need >= 3 points, got {n}")));
    }
    // normal equations for the 3x3 system
    let mut s = [0.0f64; 5];
    let mut t = [0.0f64; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let mut xp = 1.0;
        for k in 0..5 {
            s[k] += xp;
            if k < 3 {
                t[k] += y * xp;
            }
            xp *= x;
        }
    }
    let m = [[s[0], s[1], s[2]], [s[1], s[2], s[3]], [s[2], s[3], s[4]]];
    solve3(m, t).ok_or_else(|| Error::Fit("singular quadratic system".into()))
}

fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for row in 0..3 {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in col..3 {
                    m[row][k] -= f * m[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    Some([b[0] / m[0][0], b[1] / m[1][1], b[2] / m[2][2]])
}

fn window_points(s: &Series, window: (f64, f64)) -> Vec<(f64, f64)> {
    s.points
        .iter()
        .filter(|p| p.x >= window.0 && p.x <= window.1)
        .map(|p| (p.x, p.mean))
        .collect()
}

/// Slope of log(mean) vs log(x) inside `window`; all means there must be > 0.
pub fn fit_power_law(s: &Series, window: (f64, f64)) -> Result<FitResult> {
    let pts = window_points(s, window);
    if pts.len() < 5 {
        return Err(Error::Fit(format!("need >= 5 points in window, got {}", pts.len())));
    }
    if pts.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(Error::Fit("nonpositive values in power-law window".into()));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let lf = fit_linear(&xs, &ys)?;
    Ok(FitResult {
        value: lf.slope,
        stderr: lf.slope_stderr,
        window,
        residual: lf.rms_residual,
        n_points: pts.len(),
    })
}

/// Power-law exponent with the uncertainty taken from a bootstrap over
/// trajectories (resample rows, refit, report the spread).
pub fn fit_power_law_bootstrap(
    e: &Ensemble,
    window: (f64, f64),
    resamples: u32,
    seed: u64,
) -> Result<FitResult> {
    let base = fit_power_law(&e.to_series()?, window)?;
    let spread = bootstrap_spread(e, resamples, seed, |s| {
        fit_power_law(s, window).map(|f| f.value)
    })?;
    Ok(FitResult { stderr: spread, ..base })
}

/// Slope of mean vs ln(x) over the whole series.
pub fn fit_log_slope(s: &Series) -> Result<FitResult> {
    if s.points.len() < 3 {
        return Err(Error::Fit(format!("need >= 3 points, got {}", s.points.len())));
    }
    if s.points.iter().any(|p| p.x <= 0.0 || !p.mean.is_finite()) {
        return Err(Error::Fit("log slope needs positive x and finite means".into()));
    }
    let xs: Vec<f64> = s.points.iter().map(|p| p.x.ln()).collect();
    let lf = fit_linear(&xs, &s.means())?;
    Ok(FitResult {
        value: lf.slope,
        stderr: lf.slope_stderr,
        window: (s.points[0].x, s.points.last().unwrap().x),
        residual: lf.rms_residual,
        n_points: s.points.len(),
    })
}

/// Decay rate fit: slope of log(mean) vs x inside `window` (exponential
/// model); the residual is comparable with [`fit_power_law`]'s since both are
/// RMS in log y.
pub fn fit_exponential(s: &Series, window: (f64, f64)) -> Result<FitResult> {
    let pts = window_points(s, window);
    if pts.len() < 5 {
        return Err(Error::Fit(format!("need >= 5 points in window, got {}", pts.len())));
    }
    if pts.iter().any(|&(_, y)| y <= 0.0) {
        return Err(Error::Fit("nonpositive values in exponential window".into()));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let lf = fit_linear(&xs, &ys)?;
    Ok(FitResult {
        value: lf.slope,
        stderr: lf.slope_stderr,
        window,
        residual: lf.rms_residual,
        n_points: pts.len(),
    })
}

/// Standard deviation of `stat` over bootstrap resamples of the ensemble.
pub fn bootstrap_spread<F>(e: &Ensemble, resamples: u32, seed: u64, stat: F) -> Result<f64>
where
    F: Fn(&Series) -> Result<f64>,
{
    if e.trajectories() < 2 || resamples < 2 {
        return Ok(0.0);
    }
    let mut values = Vec::with_capacity(resamples as usize);
    for b in 0..resamples {
        let mut rng = seed_for(seed, b as u64, stream::BOOTSTRAP);
        let means = e.bootstrap_means(&mut rng);
        let s = Series::from_xy(e.axis, &e.xs, &means)?;
        if let Ok(v) = stat(&s) {
            values.push(v);
        }
    }
    if values.len() < 2 {
        return Ok(f64::NAN);
    }
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    Ok((values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{Axis, Meta};

    fn synth_series(f: impl Fn(f64) -> f64, xs: &[f64]) -> Series {
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        Series::from_xy(Axis::Time, xs, &ys).unwrap()
    }

    #[test]
    fn exact_power_law_recovered() {
        let xs: Vec<f64> = (1..200).map(|t| t as f64).collect();
        let s = synth_series(|t| t.powf(-0.1595), &xs);
        let f = fit_power_law(&s, (1.0, 200.0)).unwrap();
        assert!((f.value + 0.1595).abs() < 1e-3, "{}", f.value);
        assert!(f.residual < 1e-10);
    }

    #[test]
    fn exact_log_slope_recovered() {
        let xs: Vec<f64> = (2..100).map(|t| t as f64).collect();
        let s = synth_series(|x| 2.0 * x.ln(), &xs);
        let f = fit_log_slope(&s).unwrap();
        assert!((f.value - 2.0).abs() < 1e-6);
    }

    #[test]
    fn exponential_input_flagged_by_power_law_residual() {
        let xs: Vec<f64> = (1..200).map(|t| t as f64).collect();
        let s = synth_series(|t| (-t / 10.0).exp(), &xs);
        let pow = fit_power_law(&s, (1.0, 120.0)).unwrap();
        let exp = fit_exponential(&s, (1.0, 120.0)).unwrap();
        assert!(pow.residual > 10.0 * exp.residual, "pow {} exp {}", pow.residual, exp.residual);
        assert!(exp.residual < 1e-10);
        assert!((exp.value + 0.1).abs() < 1e-9);
    }

    #[test]
    fn power_law_rejects_nonpositive() {
        let s = Series::from_xy(Axis::Time, &[1.0, 2.0, 3.0, 4.0, 5.0], &[1.0, 0.5, 0.0, 0.2, 0.1])
            .unwrap();
        assert!(fit_power_law(&s, (1.0, 5.0)).is_err());
    }

    #[test]
    fn bootstrap_stderr_shrinks_with_ensemble_size() {
        // i.i.d. noisy power law rows; stderr should drop roughly as 1/sqrt(n)
        let xs: Vec<f64> = (1..60).map(|t| t as f64).collect();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let make = |n: usize, rng: &mut rand_chacha::ChaCha8Rng| {
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    xs.iter()
                        .map(|&t| t.powf(-0.3) * (1.0 + 0.2 * (rng.random::<f64>() - 0.5)))
                        .collect()
                })
                .collect();
            Ensemble::new(Axis::Time, xs.clone(), rows, Meta::default())
        };
        let e1 = make(64, &mut rng);
        let e4 = make(256, &mut rng);
        let e16 = make(1024, &mut rng);
        let s1 = fit_power_law_bootstrap(&e1, (1.0, 60.0), 60, 1).unwrap().stderr;
        let s4 = fit_power_law_bootstrap(&e4, (1.0, 60.0), 60, 1).unwrap().stderr;
        let s16 = fit_power_law_bootstrap(&e16, (1.0, 60.0), 60, 1).unwrap().stderr;
        assert!(s4 < s1 && s16 < s4, "{s1} {s4} {s16}");
        assert!(s4 / s1 < 0.8 && s16 / s4 < 0.8);
    }

    #[test]
    fn quadratic_fit_exact() {
        let xs: Vec<f64> = (0..20).map(|t| t as f64 / 3.0).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| 1.5 - 0.2 * x + 0.03 * x * x).collect();
        let c = fit_quadratic(&xs, &ys).unwrap();
        assert!((c[0] - 1.5).abs() < 1e-9 && (c[1] + 0.2).abs() < 1e-9 && (c[2] - 0.03).abs() < 1e-9);
    }
}
