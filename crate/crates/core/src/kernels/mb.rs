//! Muttalib-Borodin hard-edge kernel: contour-integral and Wright-series forms.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Kernel, KernelValue};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_jacobi, path_nodes, residue_series, ContourPath, QuadratureSpec, Rule};
use crate::specfun::{ln_gamma, ln_sin_pi, log_gamma, wright_bessel};

const LOG_OVERFLOW: f64 = 700.0;

#[derive(Debug, Clone)]
struct RayNodes {
    s: Vec<Complex64>,
    w: Vec<Complex64>,
    log_b: Vec<Complex64>,
}

/// Contour form: s on two rays from the apex tilted by `delta` off the
/// vertical, t resolved into residues at 0, 1, 2, ...
#[derive(Debug, Clone)]
pub struct MbContourKernel {
    pub alpha: f64,
    pub theta: f64,
    pub delta: f64,
    quad: QuadratureSpec,
    coarse: RayNodes,
    fine: RayNodes,
}

impl MbContourKernel {
    pub fn new(alpha: f64, theta: f64, delta: f64, quad: Option<QuadratureSpec>) -> Result<Self> {
        if !(alpha > -1.0) || !(theta > 0.0) {
            return Err(Error::Domain(format!("need alpha > -1 and theta > 0, got {alpha}, {theta}")));
        }
        if !(delta > 0.0 && delta < FRAC_PI_2) {
            return Err(Error::Unsupported(format!("ray angle delta = {delta} must lie in (0, pi/2)")));
        }
        let quad = quad.unwrap_or(
            QuadratureSpec { abs_tol: 1e-10, rel_tol: 1e-8, ..QuadratureSpec::default() }.with_truncation(30.0),
        );
        // keep every pole -(alpha + 1 + j)/theta to the left of the apex
        let apex = -0.5 + 0.5 * (1.0 - (alpha + 1.0) / theta).max(0.0);
        let path = ContourPath::tilted_rays(Complex64::new(apex, 0.0), delta);
        let build = |refined: bool| -> Result<RayNodes> {
            let nodes = path_nodes(&path, &quad, refined);
            let mut out = RayNodes { s: Vec::new(), w: Vec::new(), log_b: Vec::new() };
            for (s, w) in nodes {
                out.log_b.push(log_gamma(theta * s + alpha + 1.0)? + log_gamma(s + 1.0)? + ln_sin_pi(s));
                out.s.push(s);
                out.w.push(w);
            }
            Ok(out)
        };
        Ok(MbContourKernel { alpha, theta, delta, quad, coarse: build(false)?, fine: build(true)? })
    }

    pub fn eval_with_error(&self, x: Complex64, y: f64) -> Result<KernelValue> {
        if !(y > 0.0) || x.norm() == 0.0 {
            return Err(Error::Domain(format!("contour form needs x != 0 and y > 0, got ({x}, {y})")));
        }
        let (lx, ly) = (x.ln(), y.ln());
        let (a, th) = (self.alpha, self.theta);
        let run = |nodes: &RayNodes| -> Result<Complex64> {
            let b: Vec<Complex64> = nodes
                .s
                .iter()
                .zip(&nodes.log_b)
                .zip(&nodes.w)
                .map(|((&s, &lb), &w)| {
                    let l = lb - (th * s + 1.0) * lx + a * (ly - lx);
                    if l.re > LOG_OVERFLOW {
                        return Err(Error::Conditioning { log_magnitude: l.re });
                    }
                    Ok(w * l.exp())
                })
                .collect::<Result<_>>()?;
            let g = |k: usize| -> Result<Complex64> {
                let kf = k as f64;
                let lc = th * kf * ly - ln_gamma(th * kf + a + 1.0) - ln_gamma(kf + 1.0);
                let integral: Complex64 = nodes.s.iter().zip(&b).map(|(&s, &v)| v / (s - kf)).sum();
                Ok(lc.exp() * integral)
            };
            let r = residue_series(g, 1e-16, 400)?;
            Ok(th * r.value / Complex64::new(0.0, 2.0 * PI))
        };
        let coarse = run(&self.coarse)?;
        let value = run(&self.fine)?;
        KernelValue::checked(value, (value - coarse).norm(), &self.quad)
    }
}

impl Kernel for MbContourKernel {
    fn name(&self) -> String {
        format!("mb(alpha={}, theta={})", self.alpha, self.theta)
    }

    fn beta(&self) -> f64 {
        (-self.alpha).max(0.0)
    }

    fn eval(&self, x: Complex64, y: f64) -> Result<Complex64> {
        Ok(self.eval_with_error(x, y)?.value)
    }
}

/// Placement of the power theta in the second Wright factor of the series form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WrightReading {
    /// J_{alpha+1, theta}((y u)^theta)
    PowerOnArgument,
    /// J_{alpha+1, theta}(y u)^theta
    PowerOnValue,
}

/// Series form: theta y^alpha int_0^1 J_{(alpha+1)/theta, 1/theta}(x u) W(y u) u^alpha du,
/// with the reading of W fixed by calibration against the contour form.
#[derive(Debug, Clone)]
pub struct MbSeriesKernel {
    pub alpha: f64,
    pub theta: f64,
    pub reading: WrightReading,
    /// Max abs deviation from the contour form on the calibration grid, per reading.
    pub calibration: Vec<(WrightReading, f64)>,
    rule: Rule,
}

pub const CALIBRATION_GRID: [f64; 3] = [0.5, 1.0, 2.0];
const CALIBRATION_TOL: f64 = 1e-4;

impl MbSeriesKernel {
    pub fn new(alpha: f64, theta: f64) -> Result<Self> {
        let contour = MbContourKernel::new(alpha, theta, 0.3, None)?;
        let rule = gauss_jacobi(64, 0.0, alpha);
        let mut calibration = Vec::new();
        for reading in [WrightReading::PowerOnArgument, WrightReading::PowerOnValue] {
            let candidate = MbSeriesKernel { alpha, theta, reading, calibration: Vec::new(), rule: rule.clone() };
            let mut worst: f64 = 0.0;
            for &x in &CALIBRATION_GRID {
                for &y in &CALIBRATION_GRID {
                    let s = candidate.eval_real(x, y);
                    let c = contour.eval(Complex64::new(x, 0.0), y)?;
                    worst = worst.max(match s {
                        Ok(v) => (v - c.re).abs().max(c.im.abs()),
                        Err(_) => f64::INFINITY,
                    });
                }
            }
            calibration.push((reading, worst));
        }
        let best = calibration
            .iter()
            .copied()
            .filter(|&(_, d)| d < CALIBRATION_TOL)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or_else(|| {
                Error::RepresentationMismatch(format!(
                    "no Wright-series reading matches the contour form: {calibration:?}"
                ))
            })?;
        Ok(MbSeriesKernel { alpha, theta, reading: best.0, calibration, rule })
    }

    pub fn eval_real(&self, x: f64, y: f64) -> Result<f64> {
        if x < 0.0 || !(y > 0.0) {
            return Err(Error::Domain(format!("series form needs x >= 0, y > 0, got ({x}, {y})")));
        }
        let (a, th) = (self.alpha, self.theta);
        let mut acc = 0.0;
        for (z, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let u = 0.5 * (1.0 + z);
            let first = wright_bessel((a + 1.0) / th, 1.0 / th, x * u)?;
            let second = match self.reading {
                WrightReading::PowerOnArgument => wright_bessel(a + 1.0, th, (y * u).powf(th))?,
                WrightReading::PowerOnValue => wright_bessel(a + 1.0, th, y * u)?.powf(th),
            };
            acc += w * first * second;
        }
        let v = th * y.powf(a) * acc * 2f64.powf(-a - 1.0);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation { node: Complex64::new(x, 0.0) })
        }
    }
}

impl Kernel for MbSeriesKernel {
    fn name(&self) -> String {
        format!("mb-series(alpha={}, theta={})", self.alpha, self.theta)
    }

    fn beta(&self) -> f64 {
        (-self.alpha).max(0.0)
    }

    fn eval(&self, x: Complex64, y: f64) -> Result<Complex64> {
        if x.im != 0.0 {
            return Err(Error::Domain("series form takes real x".into()));
        }
        Ok(Complex64::new(self.eval_real(x.re, y)?, 0.0))
    }
}
