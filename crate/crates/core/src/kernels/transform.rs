//! Gaussian transform of a correlation kernel:
//!
//! K^S(x, y) = 1/(2 pi i sigma^2) int ds int dt K(s, t) exp(((x - s)^2 - (y - t)^2) / (2 sigma^2))
//!
//! with s on a vertical line and t real. The s-line is moved off the
//! imaginary axis (the integrand is entire in s), to Re s = Re x by default
//! so the s-Gaussian becomes a decaying real Gaussian.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::{Kernel, KernelValue};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, QuadratureSpec};

/// Window half-width in units of sigma where exp(-w^2/2) < 1e-18.
const GAUSS_WINDOW: f64 = 9.1;
/// Log-magnitude drop below the peak at which a window edge is accepted.
const WINDOW_DROP: f64 = 40.0;
/// Relative cancellation beyond which no digit of the result survives.
const MAX_CANCELLATION: f64 = 36.0;

#[derive(Clone)]
pub struct PerturbedKernelSpec {
    pub base: Arc<dyn Kernel>,
    pub sigma: f64,
    pub quad: QuadratureSpec,
}

impl std::fmt::Debug for PerturbedKernelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PerturbedKernelSpec")
            .field("base", &self.base.name())
            .field("sigma", &self.sigma)
            .field("quad", &self.quad)
            .finish()
    }
}

/// Default tolerances for the Gaussian transform integrals.
pub fn transform_quad() -> QuadratureSpec {
    QuadratureSpec { abs_tol: 1e-10, rel_tol: 1e-7, ..QuadratureSpec::default() }
}

impl PerturbedKernelSpec {
    pub fn new(base: Arc<dyn Kernel>, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Config(format!("sigma must be positive, got {sigma}")));
        }
        Ok(PerturbedKernelSpec { base, sigma, quad: transform_quad() })
    }
}

/// How the s-line is placed for the finite-n transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FiniteRegime {
    /// Re s = Re x.
    Direct,
    /// Re s at the given real saddle point.
    Saddle(f64),
}

/// (1/L) K(u / L, v / L): a finite-n kernel in hard-edge coordinates.
pub struct RescaledKernel<K> {
    pub inner: K,
    pub scale: f64,
}

impl<K: Kernel> Kernel for RescaledKernel<K> {
    fn name(&self) -> String {
        format!("{} at scale {}", self.inner.name(), self.scale)
    }

    fn beta(&self) -> f64 {
        self.inner.beta()
    }

    fn hard_edge(&self) -> bool {
        self.inner.hard_edge()
    }

    fn eval(&self, x: Complex64, y: f64) -> Result<Complex64> {
        Ok(self.inner.eval(x / self.scale, y / self.scale)? / self.scale)
    }
}

/// Transform of a limiting kernel with noise scale sigma.
pub fn perturb_kernel(spec: &PerturbedKernelSpec, x: Complex64, y: Complex64) -> Result<KernelValue> {
    gaussian_transform(spec.base.as_ref(), spec.sigma, x, y, x.re, &spec.quad)
}

/// Transform of a finite-n kernel for S = M + eps H, where the Gaussian
/// width is eps / sqrt(n).
pub fn perturb_finite_kernel(
    n: usize,
    base: &dyn Kernel,
    eps: f64,
    x: f64,
    y: f64,
    regime: FiniteRegime,
    quad: &QuadratureSpec,
) -> Result<KernelValue> {
    if !(eps > 0.0) || n == 0 {
        return Err(Error::Config(format!("need eps > 0 and n >= 1, got {eps}, {n}")));
    }
    let sigma = eps / (n as f64).sqrt();
    let line = match regime {
        FiniteRegime::Direct => x,
        FiniteRegime::Saddle(c) => c,
    };
    gaussian_transform(base, sigma, Complex64::new(x, 0.0), Complex64::new(y, 0.0), line, quad)
}

// log|K| plus the real part of the Gaussian exponent, -inf where K vanishes
fn log_profile(base: &dyn Kernel, s: Complex64, t: f64, expo: Complex64) -> f64 {
    match base.eval(s, t) {
        Ok(v) if v.norm() > 0.0 && v.norm().is_finite() => v.norm().ln() + expo.re,
        _ => f64::NEG_INFINITY,
    }
}

// Walk outwards from `center` in steps of `step` until the profile has been
// WINDOW_DROP below its running max twice in a row; returns the distance.
fn window_extent(profile: impl Fn(f64) -> f64, center: f64, step: f64, dir: f64, limit: f64) -> f64 {
    let mut best = profile(center);
    let mut quiet = 0;
    let mut k = 1.0;
    loop {
        let d = k * step;
        if d >= limit {
            return limit;
        }
        let v = profile(center + dir * d);
        best = best.max(v);
        if v == f64::NEG_INFINITY || v < best - WINDOW_DROP {
            quiet += 1;
            if quiet >= 2 && d >= GAUSS_WINDOW * step {
                return d;
            }
        } else {
            quiet = 0;
        }
        k += 1.0;
    }
}

struct Nodes {
    /// (abscissa, weight) pairs
    pts: Vec<(f64, f64)>,
}

fn gl_nodes(a: f64, b: f64, width: f64, order: usize, refined: bool) -> Nodes {
    let rule = gauss_legendre(order);
    let mut panels = (((b - a) / width).ceil() as usize).max(1);
    if refined {
        panels *= 2;
    }
    let h = (b - a) / panels as f64;
    let mut pts = Vec::with_capacity(panels * order);
    for p in 0..panels {
        for (z, w) in rule.nodes.iter().zip(&rule.weights) {
            pts.push((a + h * (p as f64 + 0.5 * (z + 1.0)), 0.5 * h * w));
        }
    }
    Nodes { pts }
}

fn gaussian_transform(
    base: &dyn Kernel,
    sigma: f64,
    x: Complex64,
    y: Complex64,
    line: f64,
    quad: &QuadratureSpec,
) -> Result<KernelValue> {
    let two_s2 = 2.0 * sigma * sigma;
    let s_expo = |tau: f64| {
        let s = Complex64::new(line, tau);
        (x - s) * (x - s) / two_s2
    };
    let t_expo = |t: f64| -(y - t) * (y - t) / two_s2;
    let lo_t = if base.hard_edge() { 0.0 } else { f64::NEG_INFINITY };
    let tc = y.re.max(lo_t);
    let s0 = Complex64::new(line, x.im);
    let limit = 400.0 * sigma;

    // a hard-edge kernel may be undefined at t = 0, so the s-profile is taken just inside
    let tp = tc.max(lo_t + 0.25 * sigma);
    let tau_profile = |tau: f64| log_profile(base, Complex64::new(line, tau), tp, s_expo(tau) + t_expo(tp));
    let tau_lo = x.im - window_extent(tau_profile, x.im, sigma, -1.0, limit);
    let tau_hi = x.im + window_extent(tau_profile, x.im, sigma, 1.0, limit);
    let t_profile = |t: f64| log_profile(base, s0, t, s_expo(x.im) + t_expo(t));
    let t_hi = tc + window_extent(t_profile, tc, sigma, 1.0, limit);
    let t_lo = if tc - lo_t < GAUSS_WINDOW * sigma {
        lo_t
    } else {
        (tc - window_extent(t_profile, tc, sigma, -1.0, limit)).max(lo_t)
    };

    let width = sigma.min(1.0) / quad.panels_per_unit as f64;
    let beta = base.beta();
    let graded = t_lo == 0.0 && beta > 0.0;

    let run = |refined: bool| -> Result<(Complex64, f64)> {
        let taus = gl_nodes(tau_lo, tau_hi, width, quad.rule_order, refined);
        // t nodes with the Jacobian and t^{-beta} folded in. Near 0 the kernel
        // can carry logarithms on top of t^{-beta}, so t = w^q with
        // q (1 - beta) = 2 leaves an integrand vanishing like w log^2 w.
        let ts: Vec<(f64, f64)> = if graded {
            let q = 2.0 / (1.0 - beta);
            let wmax = t_hi.powf(1.0 / q);
            let n_panels = ((t_hi - t_lo) / width).ceil().max(1.0);
            gl_nodes(0.0, wmax, wmax / n_panels, quad.rule_order, refined)
                .pts
                .into_iter()
                .map(|(w, wt)| (w.powf(q), wt * q * w))
                .collect()
        } else {
            gl_nodes(t_lo, t_hi, width, quad.rule_order, refined).pts
        };
        let t_weights: Vec<Complex64> = ts.iter().map(|&(t, wt)| wt * t_expo(t).exp()).collect();
        let ss: Vec<Complex64> = taus.pts.iter().map(|&(tau, _)| Complex64::new(line, tau)).collect();
        let tv: Vec<f64> = ts.iter().map(|&(t, _)| t).collect();
        let block = if graded { base.eval_block_regularized(&ss, &tv)? } else { base.eval_block(&ss, &tv)? };
        let mut total = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        for (row, &(tau, wtau)) in block.chunks(tv.len()).zip(&taus.pts) {
            let es = s_expo(tau).exp() * wtau;
            for (k, &tw) in row.iter().zip(&t_weights) {
                let v = k * tw * es;
                total += v;
                mag += v.norm();
            }
        }
        Ok((total / (PI * two_s2), mag / (PI * two_s2)))
    };
    let (coarse, _) = run(false)?;
    let (value, mag) = run(true)?;
    if !value.re.is_finite() || !value.im.is_finite() || !mag.is_finite() {
        return Err(Error::Conditioning { log_magnitude: mag.ln() });
    }
    if mag > 0.0 && mag.ln() - value.norm().ln() > MAX_CANCELLATION {
        return Err(Error::Conditioning { log_magnitude: mag.ln() - value.norm().ln() });
    }
    KernelValue::checked(value, (value - coarse).norm(), quad)
}
