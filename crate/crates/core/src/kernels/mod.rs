//! Finite-n and limiting correlation kernels, and the Gaussian transform
//! mapping a hard-edge kernel to its perturbed version.

mod airy;
mod bessel;
mod lue;
mod mb;
mod meijer;
mod transform;

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use airy::{airy_kernel_cd, airy_kernel_contour, AiryKernel};
pub use bessel::BesselKernel;
pub use lue::LueKernel;
pub use mb::{MbContourKernel, MbSeriesKernel, WrightReading};
pub use meijer::{GinibreFiniteKernel, GinibreLimitKernel, TruncLimitKernel};
pub use transform::{
    perturb_finite_kernel, perturb_kernel, transform_quad, FiniteRegime, PerturbedKernelSpec, RescaledKernel,
};

use crate::error::{Error, Result};
use crate::quadrature::QuadratureSpec;

/// A correlation kernel K(x, y) with complex first argument and real second
/// argument.
pub trait Kernel: Send + Sync {
    fn name(&self) -> String;

    /// Exponent beta for which y^beta K(x, y) stays bounded as y -> 0.
    fn beta(&self) -> f64 {
        0.0
    }

    /// Whether the second argument lives on [0, inf) only.
    fn hard_edge(&self) -> bool {
        true
    }

    fn eval(&self, x: Complex64, y: f64) -> Result<Complex64>;

    /// y^beta K(x, y).
    fn eval_regularized(&self, x: Complex64, y: f64) -> Result<Complex64> {
        let b = self.beta();
        let v = self.eval(x, y)?;
        Ok(if b == 0.0 { v } else { v * y.powf(b) })
    }

    /// K on every pair of `xs` x `ys`, row-major in x.
    fn eval_block(&self, xs: &[Complex64], ys: &[f64]) -> Result<Vec<Complex64>> {
        let rows: Vec<Vec<Complex64>> =
            xs.par_iter().map(|&x| ys.iter().map(|&y| self.eval(x, y)).collect()).collect::<Result<_>>()?;
        Ok(rows.concat())
    }

    /// y^beta K on every pair of `xs` x `ys`, row-major in x.
    fn eval_block_regularized(&self, xs: &[Complex64], ys: &[f64]) -> Result<Vec<Complex64>> {
        let rows: Vec<Vec<Complex64>> =
            xs.par_iter().map(|&x| ys.iter().map(|&y| self.eval_regularized(x, y)).collect()).collect::<Result<_>>()?;
        Ok(rows.concat())
    }
}

/// Kernel value with the quadrature refinement error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: Complex64,
    pub err: f64,
}

impl KernelValue {
    pub(crate) fn checked(value: Complex64, err: f64, quad: &QuadratureSpec) -> Result<Self> {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::Evaluation { node: value });
        }
        if err > quad.abs_tol + quad.rel_tol * value.norm() {
            return Err(Error::Tolerance { value, err });
        }
        Ok(KernelValue { value, err })
    }
}

/// The always-zero kernel.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroKernel;

impl Kernel for ZeroKernel {
    fn name(&self) -> String {
        "zero".into()
    }

    fn eval(&self, _: Complex64, _: f64) -> Result<Complex64> {
        Ok(Complex64::new(0.0, 0.0))
    }
}

/// Hard-edge scaling u -> u / (c n^gamma).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardEdgeScaling {
    pub c: f64,
    pub gamma: f64,
}

impl HardEdgeScaling {
    pub fn factor(&self, n: usize) -> f64 {
        self.c * (n as f64).powf(self.gamma)
    }

    /// Noise level eps_n at which c eps_n n^{gamma - 1/2} = sigma.
    pub fn critical_eps(&self, n: usize, sigma: f64) -> f64 {
        sigma / (self.c * (n as f64).powf(self.gamma - 0.5))
    }
}

/// Truncated-unitary scaling constant c_n = n prod_{j not in J} (l_j - n).
pub fn trunc_scaling(n: usize, l_outside_j: &[f64]) -> f64 {
    l_outside_j.iter().fold(n as f64, |acc, &l| acc * (l - n as f64))
}

/// The limiting hard-edge kernels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LimitingKernel {
    Bessel { alpha: f64 },
    Airy,
    GinibreProduct { nu: Vec<u32> },
    TruncatedUnitary { nu: Vec<u32>, mu: Vec<f64> },
    MuttalibBorodin { alpha: f64, theta: f64 },
}

impl LimitingKernel {
    pub fn beta(&self) -> f64 {
        match self {
            LimitingKernel::Bessel { alpha } => (-alpha).max(0.0),
            LimitingKernel::Airy => 0.0,
            LimitingKernel::GinibreProduct { .. } | LimitingKernel::TruncatedUnitary { .. } => 0.5,
            LimitingKernel::MuttalibBorodin { alpha, .. } => (-alpha).max(0.0),
        }
    }

    /// (c, gamma) for the hard-edge scaling; `None` where the constant
    /// depends on further matrix sizes (truncated unitaries, see
    /// [`trunc_scaling`]) or there is no hard edge.
    pub fn scaling(&self) -> Option<HardEdgeScaling> {
        match self {
            LimitingKernel::Bessel { .. } => Some(HardEdgeScaling { c: 4.0, gamma: 2.0 }),
            LimitingKernel::GinibreProduct { nu } => Some(HardEdgeScaling { c: 1.0, gamma: nu.len() as f64 }),
            LimitingKernel::MuttalibBorodin { theta, .. } => Some(HardEdgeScaling { c: 1.0, gamma: 1.0 + 1.0 / theta }),
            LimitingKernel::Airy | LimitingKernel::TruncatedUnitary { .. } => None,
        }
    }

    /// Instantiate; the m = 1 Ginibre product is served by its Bessel reduction.
    pub fn build(&self, quad: Option<QuadratureSpec>) -> Result<Box<dyn Kernel>> {
        Ok(match self {
            LimitingKernel::Bessel { alpha } => Box::new(BesselKernel::new(*alpha)?),
            LimitingKernel::Airy => Box::new(AiryKernel),
            LimitingKernel::GinibreProduct { nu } if nu.len() == 2 => {
                Box::new(ScaledKernel { inner: BesselKernel::new(nu[1] as f64)?, scale: 4.0 })
            }
            LimitingKernel::GinibreProduct { nu } => Box::new(GinibreLimitKernel::new(nu, quad)?),
            LimitingKernel::TruncatedUnitary { nu, mu } => Box::new(TruncLimitKernel::new(nu, mu, quad)?),
            LimitingKernel::MuttalibBorodin { alpha, theta } => {
                Box::new(MbContourKernel::new(*alpha, *theta, 0.3, quad)?)
            }
        })
    }
}

/// s K(s x, s y).
#[derive(Debug, Clone)]
pub struct ScaledKernel<K> {
    pub inner: K,
    pub scale: f64,
}

impl<K: Kernel> Kernel for ScaledKernel<K> {
    fn name(&self) -> String {
        format!("{} scaled by {}", self.inner.name(), self.scale)
    }

    fn beta(&self) -> f64 {
        self.inner.beta()
    }

    fn hard_edge(&self) -> bool {
        self.inner.hard_edge()
    }

    fn eval(&self, x: Complex64, y: f64) -> Result<Complex64> {
        Ok(self.scale * self.inner.eval(self.scale * x, self.scale * y)?)
    }
}

/// Parameters accepted by [`registry`] entries.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub alpha: f64,
    pub theta: f64,
    pub nu: Vec<u32>,
    pub mu: Vec<f64>,
    pub delta: Option<f64>,
    pub n: Option<usize>,
}

type Builder = fn(&KernelParams) -> Result<Box<dyn Kernel>>;

/// Named kernel constructors.
pub fn registry() -> Vec<(&'static str, Builder)> {
    vec![
        ("bessel", |p| Ok(Box::new(BesselKernel::new(p.alpha)?))),
        ("airy", |_| Ok(Box::new(AiryKernel))),
        ("ginibre", |p| LimitingKernel::GinibreProduct { nu: p.nu.clone() }.build(None)),
        ("ginibre-finite", |p| {
            let n = p.n.ok_or_else(|| Error::Config("ginibre-finite needs n".into()))?;
            Ok(Box::new(GinibreFiniteKernel::new(n, &p.nu, None)?))
        }),
        ("trunc", |p| Ok(Box::new(TruncLimitKernel::new(&p.nu, &p.mu, None)?))),
        ("mb", |p| Ok(Box::new(MbContourKernel::new(p.alpha, p.theta, p.delta.unwrap_or(0.3), None)?))),
        ("mb-series", |p| Ok(Box::new(MbSeriesKernel::new(p.alpha, p.theta)?))),
        ("lue", |p| {
            let n = p.n.ok_or_else(|| Error::Config("lue needs n".into()))?;
            Ok(Box::new(LueKernel::new(n, 1, p.alpha)?))
        }),
    ]
}

pub fn build_kernel(name: &str, params: &KernelParams) -> Result<Box<dyn Kernel>> {
    registry()
        .into_iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Config(format!("unknown kernel '{name}'")))
        .and_then(|(_, b)| b(params))
}

/// One grid point of a kernel evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub x: f64,
    pub y: f64,
    pub value: Complex64,
    pub err: f64,
}

/// Evaluate `f` on all pairs of `xs` x `ys` in parallel; rows ordered by x then y.
pub fn eval_grid<F>(xs: &[f64], ys: &[f64], f: F) -> Result<Vec<GridPoint>>
where
    F: Fn(f64, f64) -> Result<(Complex64, f64)> + Sync,
{
    let pairs: Vec<(f64, f64)> = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect();
    pairs.par_iter().map(|&(x, y)| f(x, y).map(|(value, err)| GridPoint { x, y, value, err })).collect()
}

/// CSV with header `x,y,re,im,err`, shortest round-trip decimal formatting.
pub fn grid_to_csv(points: &[GridPoint]) -> String {
    let mut out = String::from("x,y,re,im,err\n");
    for p in points {
        let _ = writeln!(out, "{:?},{:?},{:?},{:?},{:?}", p.x, p.y, p.value.re, p.value.im, p.err);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_resolve() {
        let p = KernelParams { alpha: 1.0, theta: 2.0, nu: vec![0, 0, 0], n: Some(4), ..Default::default() };
        for (name, _) in registry() {
            let k = build_kernel(name, &p);
            assert!(k.is_ok(), "{name}: {:?}", k.err());
        }
        assert!(matches!(build_kernel("nope", &p), Err(Error::Config(_))));
    }

    #[test]
    fn csv_round_trips() {
        let pts = vec![GridPoint { x: 0.1, y: 1.0 / 3.0, value: Complex64::new(-2.5e-17, 1e300), err: 0.0 }];
        let csv = grid_to_csv(&pts);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x,y,re,im,err"));
        let vals: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(vals, vec![0.1, 1.0 / 3.0, -2.5e-17, 1e300, 0.0]);
    }

    #[test]
    fn grid_order_is_deterministic() {
        let g = eval_grid(&[1.0, 2.0], &[3.0, 4.0, 5.0], |x, y| Ok((Complex64::new(x * 10.0 + y, 0.0), 0.0))).unwrap();
        let v: Vec<f64> = g.iter().map(|p| p.value.re).collect();
        assert_eq!(v, vec![13.0, 14.0, 15.0, 23.0, 24.0, 25.0]);
    }

    #[test]
    fn regularized_views_have_finite_limits() {
        let kernels: Vec<Box<dyn Kernel>> = vec![
            Box::new(BesselKernel::new(-0.5).unwrap()),
            Box::new(BesselKernel::new(0.0).unwrap()),
            LimitingKernel::GinibreProduct { nu: vec![0, 0, 0] }.build(None).unwrap(),
        ];
        for k in &kernels {
            let v: Vec<Complex64> =
                [1e-2, 1e-3, 1e-4].iter().map(|&t| k.eval_regularized(Complex64::new(1.0, 0.0), t).unwrap()).collect();
            assert!((v[1] - v[2]).norm() < (v[0] - v[1]).norm() + 1e-12, "{}", k.name());
        }
    }

    #[test]
    fn ginibre_m1_delegates_to_scaled_bessel() {
        let k = LimitingKernel::GinibreProduct { nu: vec![0, 1] }.build(None).unwrap();
        let b = BesselKernel::new(1.0).unwrap();
        let v = k.eval(Complex64::new(1.0, 0.0), 2.0).unwrap();
        assert!((v - 4.0 * b.eval(Complex64::new(4.0, 0.0), 8.0).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn critical_eps_inverts_sigma() {
        let s = HardEdgeScaling { c: 4.0, gamma: 2.0 };
        let eps = s.critical_eps(100, 1.0);
        assert!((s.c * eps * 100f64.powf(1.5) - 1.0).abs() < 1e-14);
        assert_eq!(trunc_scaling(10, &[15.0, 20.0]), 10.0 * 5.0 * 10.0);
    }
}
