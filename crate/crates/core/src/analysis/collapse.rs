//! Finite-size data collapse.
//!
//! Curves for several system sizes are rescaled by a trial exponent; the
//! objective is the mean squared deviation of the pooled rescaled points from
//! a common monotone fit (isotonic regression, direction chosen by data) over
//! the x range where every curve contributes. The best exponent minimizes the
//! objective over a search grid with a local parabolic refinement.

use super::series::Series;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScalingForm {
    /// x -> x / L^exponent (dynamic scaling t / L^z; y unchanged)
    DynamicExponent,
    /// x -> sign(x - pc) * L * |x - pc|^exponent (correlation-length scaling
    /// against the measurement rate; y unchanged)
    CorrelationLength { pc: f64 },
}

impl ScalingForm {
    fn rescale(&self, length: u32, x: f64, exponent: f64) -> f64 {
        match *self {
            ScalingForm::DynamicExponent => x / (length as f64).powf(exponent),
            ScalingForm::CorrelationLength { pc } => {
                (x - pc).signum() * length as f64 * (x - pc).abs().powf(exponent)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct CollapseResult {
    pub exponent: f64,
    pub objective: f64,
    /// Objectives at caller-supplied reference exponents, for comparison.
    pub reference: Vec<(f64, f64)>,
    /// Rescaled curves (length, points) at the best exponent.
    pub rescaled: Vec<(u32, Vec<(f64, f64)>)>,
}

fn rescaled_curves(
    series: &[(u32, Series)],
    form: &ScalingForm,
    exponent: f64,
) -> Vec<(u32, Vec<(f64, f64)>)> {
    series
        .iter()
        .map(|(l, s)| {
            let pts = s.points.iter().map(|p| (form.rescale(*l, p.x, exponent), p.mean)).collect();
            (*l, pts)
        })
        .collect()
}

/// Mean squared vertical spread of the rescaled curves over their common
/// support; errors when the supports do not overlap.
pub fn collapse_objective(
    series: &[(u32, Series)],
    form: &ScalingForm,
    exponent: f64,
) -> Result<f64> {
    if series.len() < 2 {
        return Err(Error::Fit("collapse needs >= 2 system sizes".into()));
    }
    let curves = rescaled_curves(series, form, exponent);
    let lo = curves
        .iter()
        .map(|(_, c)| c.iter().map(|p| p.0).fold(f64::INFINITY, f64::min))
        .fold(f64::NEG_INFINITY, f64::max);
    let hi = curves
        .iter()
        .map(|(_, c)| c.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max))
        .fold(f64::INFINITY, f64::min);
    if !(lo < hi) {
        return Err(Error::NoOverlap);
    }
    let mut pooled: Vec<(f64, f64)> = curves
        .iter()
        .flat_map(|(_, c)| c.iter().copied())
        .filter(|p| p.0 >= lo && p.0 <= hi && p.1.is_finite())
        .collect();
    if pooled.len() < 4 {
        return Err(Error::NoOverlap);
    }
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));
    let ys: Vec<f64> = pooled.iter().map(|p| p.1).collect();
    let inc = isotonic(&ys, true);
    let dec = isotonic(&ys, false);
    let mse = |fit: &[f64]| {
        fit.iter().zip(&ys).map(|(f, y)| (f - y) * (f - y)).sum::<f64>() / ys.len() as f64
    };
    Ok(mse(&inc).min(mse(&dec)))
}

/// Pool-adjacent-violators isotonic regression (unweighted).
fn isotonic(ys: &[f64], increasing: bool) -> Vec<f64> {
    // blocks of (sum, count), merged while out of order
    let mut sums: Vec<f64> = Vec::with_capacity(ys.len());
    let mut counts: Vec<usize> = Vec::with_capacity(ys.len());
    let sign = if increasing { 1.0 } else { -1.0 };
    for &y in ys {
        sums.push(sign * y);
        counts.push(1);
        while sums.len() > 1 {
            let k = sums.len();
            if sums[k - 2] / counts[k - 2] as f64 > sums[k - 1] / counts[k - 1] as f64 {
                let s = sums.pop().unwrap();
                let c = counts.pop().unwrap();
                sums[k - 2] += s;
                counts[k - 2] += c;
            } else {
                break;
            }
        }
    }
    let mut out = Vec::with_capacity(ys.len());
    for (s, c) in sums.iter().zip(&counts) {
        let v = sign * s / *c as f64;
        out.extend(std::iter::repeat_n(v, *c));
    }
    out
}

/// Search the exponent minimizing the collapse objective in `search`, and
/// report objectives at the `reference` exponents alongside.
pub fn collapse(
    series: &[(u32, Series)],
    form: &ScalingForm,
    search: (f64, f64),
    reference: &[f64],
) -> Result<CollapseResult> {
    const GRID: usize = 61;
    let mut best = (f64::NAN, f64::INFINITY);
    let step = (search.1 - search.0) / (GRID - 1) as f64;
    let mut evals: Vec<(f64, f64)> = Vec::with_capacity(GRID);
    for k in 0..GRID {
        let e = search.0 + step * k as f64;
        if let Ok(obj) = collapse_objective(series, form, e) {
            evals.push((e, obj));
            if obj < best.1 {
                best = (e, obj);
            }
        }
    }
    if best.0.is_nan() {
        return Err(Error::NoOverlap);
    }
    // parabolic refinement around the grid minimum when bracketed
    if let Some(i) = evals.iter().position(|&(e, _)| e == best.0) {
        if i > 0 && i + 1 < evals.len() {
            let (x0, y0) = evals[i - 1];
            let (x1, y1) = evals[i];
            let (x2, y2) = evals[i + 1];
            let denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
            if denom.abs() > 0.0 {
                let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
                let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
                if a > 0.0 {
                    let xv = -b / (2.0 * a);
                    if xv > x0 && xv < x2 {
                        if let Ok(obj) = collapse_objective(series, form, xv) {
                            if obj < best.1 {
                                best = (xv, obj);
                            }
                        }
                    }
                }
            }
        }
    }
    let reference = reference
        .iter()
        .map(|&e| (e, collapse_objective(series, form, e).unwrap_or(f64::INFINITY)))
        .collect();
    Ok(CollapseResult {
        exponent: best.0,
        objective: best.1,
        reference,
        rescaled: rescaled_curves(series, form, best.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{Axis, Series};

    fn synth_family(z: f64, ls: &[u32]) -> Vec<(u32, Series)> {
        // y = F(t / L^z) with F(u) = exp(-u) * (1 + u)
        ls.iter()
            .map(|&l| {
                let xs: Vec<f64> = (1..400).map(|t| t as f64).collect();
                let ys: Vec<f64> = xs
                    .iter()
                    .map(|&t| {
                        let u = t / (l as f64).powf(z);
                        (-u).exp() * (1.0 + u)
                    })
                    .collect();
                (l, Series::from_xy(Axis::Time, &xs, &ys).unwrap())
            })
            .collect()
    }

    #[test]
    fn recovers_synthetic_dynamic_exponent() {
        let fam = synth_family(1.581, &[16, 32, 64]);
        let res = collapse(&fam, &ScalingForm::DynamicExponent, (1.0, 2.2), &[1.581, 1.0]).unwrap();
        assert!((res.exponent - 1.581).abs() < 0.05, "got {}", res.exponent);
        let at_true = res.reference[0].1;
        let at_one = res.reference[1].1;
        assert!(at_true < at_one);
    }

    #[test]
    fn objective_prefers_true_exponent() {
        let fam = synth_family(1.0, &[16, 32, 64]);
        let o1 = collapse_objective(&fam, &ScalingForm::DynamicExponent, 1.0).unwrap();
        let oz = collapse_objective(&fam, &ScalingForm::DynamicExponent, 1.581).unwrap();
        assert!(o1 < oz);
    }

    #[test]
    fn disjoint_supports_error() {
        // t windows so far apart that rescaled supports cannot overlap
        let a = Series::from_xy(Axis::Time, &[1.0, 2.0, 3.0], &[1.0, 0.9, 0.8]).unwrap();
        let b = Series::from_xy(Axis::Time, &[1000.0, 2000.0], &[0.5, 0.4]).unwrap();
        let fam = vec![(4u32, a), (8u32, b)];
        assert!(matches!(
            collapse_objective(&fam, &ScalingForm::DynamicExponent, 1.0),
            Err(Error::NoOverlap)
        ));
    }

    #[test]
    fn isotonic_bitonic_penalized() {
        let inc = isotonic(&[1.0, 2.0, 1.5, 3.0], true);
        assert!(inc.windows(2).all(|w| w[0] <= w[1]));
        let exact = isotonic(&[1.0, 2.0, 3.0], true);
        assert_eq!(exact, vec![1.0, 2.0, 3.0]);
    }
}
