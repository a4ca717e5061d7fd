use std::fmt::Write as _;
use std::ops::Range;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sample_spectrum, Ensemble, EnsembleSpec};
use crate::error::{Error, Result};
use crate::kernels::HardEdgeScaling;

/// Fixed-width histogram; points outside [lo, hi) go to the two overflow
/// counters. `total` counts accumulated draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
    pub total: u64,
}

impl Histogram {
    pub fn new(bins: usize, lo: f64, hi: f64) -> Result<Self> {
        if bins == 0 {
            return Err(Error::Config("need at least one bin".into()));
        }
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::Config(format!("histogram range [{lo}, {hi}] is not an interval")));
        }
        let bin_edges = (0..=bins).map(|i| lo + (hi - lo) * i as f64 / bins as f64).collect();
        Ok(Histogram { bin_edges, counts: vec![0; bins], underflow: 0, overflow: 0, total: 0 })
    }

    pub fn lo(&self) -> f64 {
        self.bin_edges[0]
    }

    pub fn hi(&self) -> f64 {
        *self.bin_edges.last().unwrap()
    }

    pub fn add(&mut self, x: f64) {
        let (lo, hi) = (self.lo(), self.hi());
        if !(x >= lo) {
            self.underflow += 1;
        } else if !(x < hi) {
            self.overflow += 1;
        } else {
            let b = self.counts.len();
            let i = (((x - lo) / (hi - lo)) * b as f64) as usize;
            self.counts[i.min(b - 1)] += 1;
        }
    }

    /// Adds one draw's eigenvalues.
    pub fn add_draw(&mut self, xs: &[f64]) {
        for &x in xs {
            self.add(x);
        }
        self.total += 1;
    }

    pub fn points(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.underflow + self.overflow
    }

    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if self.bin_edges != other.bin_edges {
            return Err(Error::Config("cannot merge histograms with different bin edges".into()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.underflow += other.underflow;
        self.overflow += other.overflow;
        self.total += other.total;
        Ok(())
    }

    /// Two-column `bin_left count` text with a closing row at the right edge.
    pub fn to_plot(&self) -> String {
        let mut out = String::new();
        for (x, c) in self.bin_edges.iter().zip(&self.counts) {
            let _ = writeln!(out, "{x} {c}");
        }
        let _ = writeln!(out, "{} {}", self.hi(), self.counts.last().unwrap());
        out
    }
}

/// Histogram of the draws in `draws` (indices into the spec's streams).
pub fn accumulate_histogram_shard(
    spec: &EnsembleSpec,
    draws: Range<u64>,
    bins: usize,
    range: (f64, f64),
) -> Result<Histogram> {
    let empty = Histogram::new(bins, range.0, range.1)?;
    spec.ensemble.validate()?;
    draws
        .into_par_iter()
        .map(|i| {
            let s = sample_spectrum(spec, i)?;
            let mut h = empty.clone();
            h.add_draw(&s.eigenvalues);
            Ok(h)
        })
        .try_reduce(
            || empty.clone(),
            |mut a, b| {
                a.merge(&b)?;
                Ok(a)
            },
        )
}

pub fn accumulate_histogram(spec: &EnsembleSpec, draws: u64, bins: usize, range: (f64, f64)) -> Result<Histogram> {
    if draws == 0 {
        return Err(Error::Config("need at least one draw".into()));
    }
    accumulate_histogram_shard(spec, 0..draws, bins, range)
}

/// The k smallest eigenvalues of every draw times the hard-edge factor
/// c n^gamma, pooled in draw order.
pub fn hard_edge_statistics(spec: &EnsembleSpec, draws: u64, scaling: &HardEdgeScaling, k: usize) -> Result<Vec<f64>> {
    let f = scaling.factor(spec.ensemble.n());
    let per_draw = (0..draws)
        .into_par_iter()
        .map(|i| {
            let s = sample_spectrum(spec, i)?;
            Ok(s.eigenvalues.iter().take(k).map(|v| v * f).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_draw.concat())
}

/// `<ensemble>_mat<n>_e<eps-tag>.plot`, with the decimal point of eps
/// written as `p`.
pub fn plot_file_name(ensemble: &Ensemble) -> String {
    let eps = format!("{}", ensemble.eps()).replace('.', "p").replace('-', "m");
    format!("{}_mat{}_e{}.plot", ensemble.tag(), ensemble.n(), eps)
}

pub fn write_plot(hist: &Histogram, path: &Path) -> Result<()> {
    std::fs::write(path, hist.to_plot()).map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}
