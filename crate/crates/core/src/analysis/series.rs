use crate::circuit::Model;
use crate::error::{Error, Result};
use rand::Rng;

/// What the x coordinate of a series means.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Time,
    SubsystemSize,
    MeasurementRate,
    Separation,
    CrossRatio,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::Time => "t",
            Axis::SubsystemSize => "L_A",
            Axis::MeasurementRate => "p",
            Axis::Separation => "r",
            Axis::CrossRatio => "eta",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Meta {
    pub model: Option<Model>,
    pub length: Option<u32>,
    pub rate: Option<f64>,
    pub seed: Option<u64>,
}

/// An ensemble-averaged observable against a strictly increasing axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub axis: Axis,
    pub points: Vec<Point>,
    pub meta: Meta,
}

impl Series {
    pub fn new(axis: Axis, points: Vec<Point>, meta: Meta) -> Result<Self> {
        if points.windows(2).any(|w| w[0].x >= w[1].x) {
            return Err(Error::Fit("series x values must be strictly increasing".into()));
        }
        if points.iter().any(|p| p.n < 1 || p.stderr < 0.0) {
            return Err(Error::Fit("series points need n >= 1 and stderr >= 0".into()));
        }
        Ok(Series { axis, points, meta })
    }

    pub fn from_xy(axis: Axis, xs: &[f64], ys: &[f64]) -> Result<Self> {
        let points =
            xs.iter().zip(ys).map(|(&x, &y)| Point { x, mean: y, stderr: 0.0, n: 1 }).collect();
        Series::new(axis, points, Meta::default())
    }

    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }

    pub fn means(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.mean).collect()
    }
}

/// Per-trajectory observable rows on a common axis; the raw input for
/// trajectory bootstraps.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub axis: Axis,
    pub xs: Vec<f64>,
    /// rows[trajectory][axis index]
    pub rows: Vec<Vec<f64>>,
    pub meta: Meta,
}

impl Ensemble {
    pub fn new(axis: Axis, xs: Vec<f64>, rows: Vec<Vec<f64>>, meta: Meta) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == xs.len()));
        Ensemble { axis, xs, rows, meta }
    }

    pub fn trajectories(&self) -> usize {
        self.rows.len()
    }

    pub fn mean_at(&self, i: usize) -> f64 {
        self.rows.iter().map(|r| r[i]).sum::<f64>() / self.rows.len() as f64
    }

    pub fn to_series(&self) -> Result<Series> {
        let n = self.rows.len() as u64;
        let points = self
            .xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let mean = self.mean_at(i);
                let var = if n > 1 {
                    self.rows.iter().map(|r| (r[i] - mean).powi(2)).sum::<f64>() / (n - 1) as f64
                } else {
                    0.0
                };
                Point { x, mean, stderr: (var / n as f64).sqrt(), n }
            })
            .collect();
        Series::new(self.axis, points, self.meta.clone())
    }

    /// Means of one bootstrap resample (trajectories drawn with replacement).
    pub fn bootstrap_means<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let n = self.rows.len();
        let mut acc = vec![0.0; self.xs.len()];
        for _ in 0..n {
            let row = &self.rows[rng.random_range(0..n)];
            for (a, v) in acc.iter_mut().zip(row) {
                *a += v;
            }
        }
        for a in &mut acc {
            *a /= n as f64;
        }
        acc
    }
}
