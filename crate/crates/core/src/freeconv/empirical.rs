use crate::error::{Error, Result};

/// Equal-weight point masses, kept sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    points: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn new(mut points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Config("empirical measure needs at least one point".into()));
        }
        if points.iter().any(|p| p.is_nan()) {
            return Err(Error::Domain("empirical measure got a NaN point".into()));
        }
        points.sort_by(f64::total_cmp);
        Ok(EmpiricalMeasure { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.points.partition_point(|&p| p <= x) as f64 / self.points.len() as f64
    }
}

/// Kolmogorov-Smirnov distance: sup |F_emp - F| over both sides of every jump.
pub fn ks_distance(emp: &EmpiricalMeasure, cdf: impl Fn(f64) -> f64) -> f64 {
    let n = emp.len() as f64;
    emp.points()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}
