//! Kernels built from a Mellin-Barnes s-integral over -1/2 + iR and a
//! residue series in t: products of Ginibre matrices (limit and finite n)
//! and products of truncated unitary matrices.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{Kernel, KernelValue};
use crate::error::{Error, Result};
use crate::quadrature::{path_nodes, residue_series, ContourPath, QuadratureSpec};
use crate::specfun::{ln_gamma, ln_sin_pi, log_gamma};

const SERIES_TOL: f64 = 1e-16;
const MAX_TERMS: usize = 400;
const LOG_OVERFLOW: f64 = 700.0;

fn default_quad(truncation: f64) -> QuadratureSpec {
    QuadratureSpec { abs_tol: 1e-10, rel_tol: 1e-8, ..QuadratureSpec::default() }.with_truncation(truncation)
}

/// Precomputed s-nodes on -1/2 + iR with the y-independent log integrand.
#[derive(Debug, Clone)]
struct LineNodes {
    s: Vec<Complex64>,
    w: Vec<Complex64>,
    log_a: Vec<Complex64>,
}

impl LineNodes {
    fn build(quad: &QuadratureSpec, refined: bool, log_a: impl Fn(Complex64) -> Result<Complex64>) -> Result<Self> {
        let path = ContourPath::vertical_line(-0.5);
        let nodes = path_nodes(&path, quad, refined);
        let mut out = LineNodes { s: Vec::with_capacity(nodes.len()), w: Vec::new(), log_a: Vec::new() };
        for (s, w) in nodes {
            out.s.push(s);
            out.w.push(w);
            out.log_a.push(log_a(s)?);
        }
        Ok(out)
    }

    /// A(s) y^{-s-1} at every node.
    fn weighted(&self, y: f64) -> Result<Vec<Complex64>> {
        let ly = y.ln();
        self.s
            .iter()
            .zip(&self.log_a)
            .zip(&self.w)
            .map(|((&s, &la), &w)| {
                let l = la - (s + 1.0) * ly;
                if l.re > LOG_OVERFLOW {
                    return Err(Error::Conditioning { log_magnitude: l.re });
                }
                Ok(w * l.exp())
            })
            .collect()
    }
}

/// Shared engine: (1/2 pi i) sum_k (-1)^k/pi c_k(x) int A(s) y^{-s-1} / (s - k) ds.
#[derive(Debug, Clone)]
struct ResidueLineKernel {
    coarse: LineNodes,
    fine: LineNodes,
    quad: QuadratureSpec,
}

impl ResidueLineKernel {
    fn new(quad: QuadratureSpec, log_a: impl Fn(Complex64) -> Result<Complex64>) -> Result<Self> {
        Ok(ResidueLineKernel {
            coarse: LineNodes::build(&quad, false, &log_a)?,
            fine: LineNodes::build(&quad, true, &log_a)?,
            quad,
        })
    }

    fn eval(&self, x: Complex64, y: f64, log_coef: impl Fn(usize) -> Option<f64>) -> Result<KernelValue> {
        if !(y > 0.0) {
            return Err(Error::Domain(format!("kernel needs y > 0, got {y}")));
        }
        let lx = if x.norm() == 0.0 { None } else { Some(x.ln()) };
        let run = |nodes: &LineNodes| -> Result<Complex64> {
            let a = nodes.weighted(y)?;
            let g = |k: usize| -> Result<Complex64> {
                let Some(lc) = log_coef(k) else {
                    return Ok(Complex64::new(0.0, 0.0));
                };
                let lpow = match (k, lx) {
                    (0, _) => Complex64::new(0.0, 0.0),
                    (_, None) => return Ok(Complex64::new(0.0, 0.0)),
                    (_, Some(l)) => k as f64 * l,
                };
                let lt = lpow + lc;
                if lt.re > LOG_OVERFLOW {
                    return Err(Error::Conditioning { log_magnitude: lt.re });
                }
                let kf = k as f64;
                let integral: Complex64 = nodes.s.iter().zip(&a).map(|(&s, &v)| v / (s - kf)).sum();
                Ok(lt.exp() * integral)
            };
            let r = residue_series(g, SERIES_TOL, MAX_TERMS)?;
            Ok(r.value / Complex64::new(0.0, 2.0 * PI))
        };
        let coarse = run(&self.coarse)?;
        let value = run(&self.fine)?;
        KernelValue::checked(value, (value - coarse).norm(), &self.quad)
    }

    /// `eval` on a grid as the rank-r product sum_k g_k(x) H_k(y), with
    /// H_k(y) the s-integral at residue k on the fine nodes. The series is
    /// cut once every x has spent three orders below 1e-18 of its peak term;
    /// terms are unimodal in k, so the tail is monotone from there. No
    /// refinement error is computed.
    fn eval_block(
        &self,
        xs: &[Complex64],
        ys: &[f64],
        log_coef: impl Fn(usize) -> Option<f64>,
    ) -> Result<Vec<Complex64>> {
        if let Some(y) = ys.iter().find(|&&y| !(y > 0.0)) {
            return Err(Error::Domain(format!("kernel needs y > 0, got {y}")));
        }
        let lx: Vec<Option<Complex64>> = xs.iter().map(|x| (x.norm() > 0.0).then(|| x.ln())).collect();
        let mut peak = vec![f64::NEG_INFINITY; xs.len()];
        let mut lcs = Vec::new();
        let mut quiet = 0;
        while let Some(lc) = log_coef(lcs.len()) {
            let k = lcs.len();
            if k == MAX_TERMS {
                return Err(Error::Divergence { terms: MAX_TERMS });
            }
            let mut dead = true;
            for (l, p) in lx.iter().zip(peak.iter_mut()) {
                let lt = match (k, l) {
                    (0, _) => lc,
                    (_, None) => f64::NEG_INFINITY,
                    (_, Some(l)) => k as f64 * l.re + lc,
                };
                if lt > LOG_OVERFLOW {
                    return Err(Error::Conditioning { log_magnitude: lt });
                }
                *p = p.max(lt);
                dead &= lt < *p - 41.5;
            }
            lcs.push(lc);
            quiet = if dead { quiet + 1 } else { 0 };
            if quiet == 3 {
                break;
            }
        }
        let r = lcs.len();
        // (-1)^k / pi from the residues and 1 / (2 pi i) from the s-integral
        let g = DMatrix::from_fn(xs.len(), r, |i, k| {
            let lpow = match (k, lx[i]) {
                (0, _) => Complex64::new(0.0, 0.0),
                (_, None) => return Complex64::new(0.0, 0.0),
                (_, Some(l)) => k as f64 * l,
            };
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            (lpow + lcs[k]).exp() * sign / (PI * Complex64::new(0.0, 2.0 * PI))
        });
        let nodes = &self.fine;
        let inv = DMatrix::from_fn(r, nodes.s.len(), |k, j| 1.0 / (nodes.s[j] - k as f64));
        let mut out = vec![Complex64::new(0.0, 0.0); xs.len() * ys.len()];
        // chunks over y bound the node-by-y matrix
        for (c, chunk) in ys.chunks(64).enumerate() {
            let mut a = DMatrix::zeros(nodes.s.len(), chunk.len());
            for (j, &y) in chunk.iter().enumerate() {
                a.set_column(j, &DVector::from_vec(nodes.weighted(y)?));
            }
            let block = &g * (&inv * a);
            for i in 0..xs.len() {
                for j in 0..chunk.len() {
                    out[i * ys.len() + c * 64 + j] = block[(i, j)];
                }
            }
        }
        Ok(out)
    }
}

fn regularize(mut v: Vec<Complex64>, ys: &[f64]) -> Vec<Complex64> {
    let roots: Vec<f64> = ys.iter().map(|y| y.sqrt()).collect();
    for (i, z) in v.iter_mut().enumerate() {
        *z *= roots[i % ys.len()];
    }
    v
}

fn default_truncation(decay_gammas: usize) -> f64 {
    // the integrand decays like exp(-pi (d - 2) |Im s| / 2)
    90.0 / (PI * (decay_gammas as f64 - 2.0)) + 10.0
}

fn check_nu(nu: &[u32]) -> Result<()> {
    if nu.len() < 2 {
        return Err(Error::Config("nu must list nu_0 = 0 and at least one more index".into()));
    }
    if nu[0] != 0 {
        return Err(Error::Config("nu_0 must be 0".into()));
    }
    Ok(())
}

/// Limiting hard-edge kernel of products of Ginibre matrices, m = len(nu) - 1 >= 2.
#[derive(Debug, Clone)]
pub struct GinibreLimitKernel {
    pub nu: Vec<u32>,
    engine: ResidueLineKernel,
}

impl GinibreLimitKernel {
    pub fn new(nu: &[u32], quad: Option<QuadratureSpec>) -> Result<Self> {
        check_nu(nu)?;
        if nu.len() == 2 {
            return Err(Error::Unsupported(format!(
                "m = 1 Ginibre limit kernel is not integrated directly; it equals 4 K_bessel(alpha = {}) at (4x, 4y)",
                nu[1]
            )));
        }
        let quad = quad.unwrap_or_else(|| default_quad(default_truncation(nu.len())));
        let nuf: Vec<f64> = nu.iter().map(|&v| v as f64).collect();
        let engine = ResidueLineKernel::new(quad, |s| {
            let mut l = ln_sin_pi(s);
            for &v in &nuf {
                l += log_gamma(s + v + 1.0)?;
            }
            Ok(l)
        })?;
        Ok(GinibreLimitKernel { nu: nu.to_vec(), engine })
    }

    fn log_coef(&self, k: usize) -> Option<f64> {
        Some(-self.nu.iter().map(|&v| ln_gamma(k as f64 + v as f64 + 1.0)).sum::<f64>())
    }

    pub fn eval_with_error(&self, x: Complex64, y: f64) -> Result<KernelValue> {
        self.engine.eval(x, y, |k| self.log_coef(k))
    }
}

impl Kernel for GinibreLimitKernel {
    fn name(&self) -> String {
        format!("ginibre(nu={:?})", self.nu)
    }

    fn beta(&self) -> f64 {
        0.5
    }

    fn eval(&self, x: Complex64, y: f64) -> Result<Complex64> {
        Ok(self.eval_with_error(x, y)?.value)
    }

    fn eval_block(&self, xs: &[Complex64], ys: &[f64]) -> Result<Vec<Complex64>> {
        self.engine.eval_block(xs, ys, |k| self.log_coef(k))
    }

    fn eval_block_regularized(&self, xs: &[Complex64], ys: &[f64]) -> Result<Vec<Complex64>> {
        Ok(regularize(self.eval_block(xs, ys)?, ys))
    }
}

/// Limiting kernel for products of truncated unitary matrices; `mu` holds
/// the fixed offsets l_k - n for the indices k in J.
#[derive(Debug, Clone)]
pub struct TruncLimitKernel {
    pub nu: Vec<u32>,
    pub mu: Vec<f64>,
    engine: ResidueLineKernel,
}

impl TruncLimitKernel {
    pub fn new(nu: &[u32], mu: &[f64], quad: Option<QuadratureSpec>) -> Result<Self> {
        check_nu(nu)?;
        if mu.len() + 1 > nu.len() - 1 {
            return Err(Error::Config("J is a subset of {2, ..., m}".into()));
        }
        let decay = nu.len() - mu.len();
        if decay <= 2 {
            return Err(Error::Unsupported(format!(
                "{decay} net Gamma factors in s: the s-integral does not converge absolutely"
            )));
        }
        let quad = quad.unwrap_or_else(|| default_quad(default_truncation(decay)));
        let nuf: Vec<f64> = nu.iter().map(|&v| v as f64).collect();
        let muc = mu.to_vec();
        let engine = ResidueLineKernel::new(quad, |s| {
            let mut l = ln_sin_pi(s);
            for &v in &nuf {
                l += log_gamma(s + v + 1.0)?;
            }
            for &m in &muc {
                l -= log_gamma(s + m + 1.0)?;
            }
            Ok(l)
        })?;
        Ok(TruncLimitKernel { nu: nu.to_vec(), mu: mu.to_vec(), engine })
    }

    fn log_coef(&self, k: usize) -> Option<f64> {
        let kf = k as f64;
        let num: f64 = self.mu.iter().map(|&m| ln_gamma(kf + m + 1.0)).sum();
        let den: f64 = self.nu.iter().map(|&v| ln_gamma(kf + v as f64 + 1.0)).sum();
        Some(num - den)
    }

    pub fn eval_with_error(&self, x: Complex64, y: f64) -> Result<KernelValue> {
        self.engine.eval(x, y, |k| self.log_coef(k))
    }
}

impl Kernel for TruncLimitKernel {
    fn name(&self) -> String {
        format!("trunc(nu={:?}, mu={:?})", self.nu, self.mu)
    }

    fn beta(&self) -> f64 {
        0.5
    }

    fn eval(&self, x: Complex64, y: f64) -> Result<Complex64> {
        Ok(self.eval_with_error(x, y)?.value)
    }

    fn eval_block(&self, xs: &[Complex64], ys: &[f64]) -> Result<Vec<Complex64>> {
        self.engine.eval_block(xs, ys, |k| self.log_coef(k))
    }

    fn eval_block_regularized(&self, xs: &[Complex64], ys: &[f64]) -> Result<Vec<Complex64>> {
        Ok(regularize(self.eval_block(xs, ys)?, ys))
    }
}

/// Finite-n kernel of the squared singular values of a product of m Ginibre
/// matrices, in hard-edge coordinates: n^{-(m+1)} K(x / n^{m+1}, y / n^{m+1})
/// for the matrix n^{-m} Y^* Y.
#[derive(Debug, Clone)]
pub struct GinibreFiniteKernel {
    pub n: usize,
    pub nu: Vec<u32>,
    engine: ResidueLineKernel,
}

impl GinibreFiniteKernel {
    pub fn new(n: usize, nu: &[u32], quad: Option<QuadratureSpec>) -> Result<Self> {
        check_nu(nu)?;
        if n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        let quad = quad.unwrap_or_else(|| default_quad(default_truncation(nu.len() + 1)));
        let nuf: Vec<f64> = nu.iter().map(|&v| v as f64).collect();
        let nf = n as f64;
        let (lgn, ln_n) = (ln_gamma(nf), nf.ln());
        let engine = ResidueLineKernel::new(quad, |s| {
            let mut l = ln_sin_pi(s) + log_gamma(nf - s)? - lgn + s * ln_n;
            for &v in &nuf {
                l += log_gamma(s + v + 1.0)?;
            }
            Ok(l)
        })?;
        Ok(GinibreFiniteKernel { n, nu: nu.to_vec(), engine })
    }

    pub fn m(&self) -> usize {
        self.nu.len() - 1
    }

    fn log_coef(&self, k: usize) -> Option<f64> {
        if k >= self.n {
            return None;
        }
        let (nf, kf) = (self.n as f64, k as f64);
        let den: f64 = self.nu.iter().map(|&v| ln_gamma(kf + v as f64 + 1.0)).sum();
        Some(ln_gamma(nf) - ln_gamma(nf - kf) - kf * nf.ln() - den)
    }

    pub fn eval_with_error(&self, x: Complex64, y: f64) -> Result<KernelValue> {
        self.engine.eval(x, y, |k| self.log_coef(k))
    }

    /// Majorant c1 in |y^{1/2} K(x, y)| <= c1 e^{|x|}: the triangle
    /// inequality applied to every residue term, maximized over |x|.
    pub fn growth_constant(&self) -> f64 {
        let nf = self.n as f64;
        let nodes = &self.engine.fine;
        // |A(s) y^{-s-1}| = |A(s)| y^{-1/2} on the line
        let int_k: Vec<f64> = (0..self.n)
            .map(|k| {
                nodes
                    .s
                    .iter()
                    .zip(&nodes.log_a)
                    .zip(&nodes.w)
                    .map(|((&s, &la), &w)| la.re.exp() * w.norm() / (s - k as f64).norm())
                    .sum::<f64>()
            })
            .collect();
        let coef: Vec<f64> = (0..self.n)
            .map(|k| {
                let kf = k as f64;
                let den: f64 = self.nu.iter().map(|&v| ln_gamma(kf + v as f64 + 1.0)).sum();
                (ln_gamma(nf) - ln_gamma(nf - kf) - kf * nf.ln() - den).exp() * int_k[k] / (2.0 * PI * PI)
            })
            .collect();
        // sup_u e^{-u} sum_k coef_k u^k on a grid wide enough for the maximizer
        (0..=4000)
            .map(|i| {
                let u = i as f64 * 0.01;
                let mut acc = 0.0;
                let mut p = 1.0;
                for &cf in &coef {
                    acc += cf * p;
                    p *= u;
                }
                acc * (-u).exp()
            })
            .fold(0.0, f64::max)
    }
}

impl Kernel for GinibreFiniteKernel {
    fn name(&self) -> String {
        format!("ginibre-finite(n={}, nu={:?})", self.n, self.nu)
    }

    fn beta(&self) -> f64 {
        0.5
    }

    fn eval(&self, x: Complex64, y: f64) -> Result<Complex64> {
        Ok(self.eval_with_error(x, y)?.value)
    }

    fn eval_block(&self, xs: &[Complex64], ys: &[f64]) -> Result<Vec<Complex64>> {
        self.engine.eval_block(xs, ys, |k| self.log_coef(k))
    }

    fn eval_block_regularized(&self, xs: &[Complex64], ys: &[f64]) -> Result<Vec<Complex64>> {
        Ok(regularize(self.eval_block(xs, ys)?, ys))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    /// Both contours discretized by the trapezoid rule: s = -1/2 + i tau and
    /// t = -1/4 + u^2 - i u, which encloses 0, 1, 2, ... counter-clockwise.
    fn ginibre_double_trapezoid(nu: &[f64], x: f64, y: f64) -> Complex64 {
        let (ht, hu) = (0.04, 0.02);
        let ts: Vec<(Complex64, Complex64)> = (-400..=400)
            .map(|j| {
                let u = j as f64 * hu;
                let t = Complex64::new(-0.25 + u * u, -u);
                let mut l = t * x.ln() - ln_sin_pi(t);
                for &v in nu {
                    l -= log_gamma(t + v + 1.0).unwrap();
                }
                (t, l.exp() * Complex64::new(2.0 * u, -1.0) * hu)
            })
            .collect();
        let mut acc = c(0.0);
        for i in -1000..=1000 {
            let tau = i as f64 * ht;
            let s = Complex64::new(-0.5, tau);
            let mut l = ln_sin_pi(s) - (s + 1.0) * y.ln();
            for &v in nu {
                l += log_gamma(s + v + 1.0).unwrap();
            }
            let a = l.exp() * Complex64::new(0.0, ht);
            let inner: Complex64 = ts.iter().map(|&(t, wt)| wt / (s - t)).sum();
            acc += a * inner;
        }
        acc / (Complex64::new(0.0, 2.0 * PI) * Complex64::new(0.0, 2.0 * PI))
    }

    #[test]
    fn limit_kernel_matches_double_trapezoid() {
        let k = GinibreLimitKernel::new(&[0, 0, 0], None).unwrap();
        let v = k.eval_with_error(c(1.0), 1.0).unwrap();
        let oracle = ginibre_double_trapezoid(&[0.0, 0.0, 0.0], 1.0, 1.0);
        assert!((v.value - oracle).norm() < 1e-6, "{} vs {}", v.value, oracle);
        assert!(v.value.im.abs() < 1e-12);
    }

    #[test]
    fn limit_kernel_at_zero_keeps_only_first_term() {
        let k = GinibreLimitKernel::new(&[0, 1, 0], None).unwrap();
        let v = k.eval(c(0.0), 0.7).unwrap();
        // single s-integral divided by pi and Gamma(1) Gamma(2) Gamma(1)
        let q = QuadratureSpec::default().with_truncation(40.0);
        let line = crate::quadrature::integrate_path(
            |s| {
                let l = ln_sin_pi(s) + log_gamma(s + 1.0).unwrap() * 2.0 + log_gamma(s + 2.0).unwrap()
                    - (s + 1.0) * 0.7f64.ln();
                l.exp() / s
            },
            &ContourPath::vertical_line(-0.5),
            &q,
        )
        .unwrap();
        let expected = line.value / PI / Complex64::new(0.0, 2.0 * PI);
        assert!((v - expected).norm() < 1e-12);
    }

    #[test]
    fn block_evaluation_matches_pointwise() {
        let kernels: Vec<Box<dyn Kernel>> = vec![
            Box::new(GinibreLimitKernel::new(&[0, 0, 0], None).unwrap()),
            Box::new(GinibreLimitKernel::new(&[0, 1, 2, 0], None).unwrap()),
            Box::new(TruncLimitKernel::new(&[0, 0, 0, 0], &[1.5], None).unwrap()),
            Box::new(GinibreFiniteKernel::new(12, &[0, 0, 1], None).unwrap()),
        ];
        let xs = [c(0.0), c(1.0), Complex64::new(0.5, 3.0), Complex64::new(2.0, -7.5), c(9.0)];
        let ys = [0.01, 0.7, 3.0, 12.0];
        for k in &kernels {
            let block = k.eval_block(&xs, &ys).unwrap();
            let reg = k.eval_block_regularized(&xs, &ys).unwrap();
            for (i, &x) in xs.iter().enumerate() {
                for (j, &y) in ys.iter().enumerate() {
                    let v = k.eval(x, y).unwrap();
                    let b = block[i * ys.len() + j];
                    assert!((b - v).norm() < 1e-12 * (1.0 + v.norm()), "{}: ({x}, {y}) {b} vs {v}", k.name());
                    assert!((reg[i * ys.len() + j] - v * y.sqrt()).norm() < 1e-12 * (1.0 + v.norm()));
                }
            }
        }
        assert!(kernels[0].eval_block(&xs, &[0.0]).is_err());
    }

    #[test]
    fn m_equal_one_is_rejected_with_reduction_hint() {
        match GinibreLimitKernel::new(&[0, 2], None) {
            Err(Error::Unsupported(msg)) => assert!(msg.contains("bessel")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn finite_single_scalar_is_exponential() {
        let k = GinibreFiniteKernel::new(1, &[0, 0], None).unwrap();
        for &(x, y) in &[(0.5, 0.3), (2.0, 1.5), (1.0, 4.0)] {
            let v = k.eval(c(x), y).unwrap();
            assert!((v - c((-y as f64).exp())).norm() < 1e-8, "{x} {y}: {v}");
        }
    }

    #[test]
    fn finite_trace_is_n() {
        let k = GinibreFiniteKernel::new(5, &[0, 0, 0], None).unwrap();
        // x = w^2 absorbs the x^{-1/2} edge behaviour; the density is negligible past w = 45
        let rule = crate::quadrature::gauss_legendre(24);
        let (a, b, panels) = (0.0, 45.0, 30);
        let h = (b - a) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            for (z, w) in rule.nodes.iter().zip(&rule.weights) {
                let wv = a + h * (p as f64 + 0.5 * (z + 1.0));
                let x = wv * wv;
                total += 0.5 * h * w * 2.0 * wv * k.eval(c(x), x).unwrap().re;
            }
        }
        assert!((total - 5.0).abs() < 5e-3, "{total}");
    }

    #[test]
    fn finite_kernel_respects_growth_bound() {
        let k = GinibreFiniteKernel::new(10, &[0, 0, 0], None).unwrap();
        let c1 = k.growth_constant();
        assert!(c1.is_finite() && c1 > 0.0);
        for i in 0..=6 {
            let u = 0.5 * i as f64;
            for &y in &[0.01, 0.3, 1.0, 3.0] {
                let v = k.eval(Complex64::new(0.0, u), y).unwrap();
                assert!(y.sqrt() * v.norm() <= c1 * u.exp(), "{u} {y}");
            }
        }
    }

    #[test]
    fn trunc_without_j_is_ginibre() {
        let g = GinibreLimitKernel::new(&[0, 0, 0], None).unwrap();
        let t = TruncLimitKernel::new(&[0, 0, 0], &[], None).unwrap();
        let a = g.eval(c(1.0), 1.0).unwrap();
        let b = t.eval(c(1.0), 1.0).unwrap();
        assert!((a - b).norm() < 1e-9);
    }

    #[test]
    fn trunc_is_conjugation_symmetric() {
        let t = TruncLimitKernel::new(&[0, 0, 0, 0], &[3.0], None).unwrap();
        let z = Complex64::new(0.7, 0.9);
        let a = t.eval(z, 1.2).unwrap();
        let b = t.eval(z.conj(), 1.2).unwrap();
        assert!((a - b.conj()).norm() < 1e-12);
    }

    #[test]
    fn trunc_large_mu_rescales_to_ginibre() {
        // Gamma(t + 1 + mu) / Gamma(s + 1 + mu) ~ mu^{t - s}, so the ratio is
        // absorbed by the scaling (x, y) -> (x / mu, y / mu)
        let g = GinibreLimitKernel::new(&[0, 0, 0, 0], None).unwrap().eval(c(1.0), 1.0).unwrap().re;
        let mu = 50.0;
        let t = TruncLimitKernel::new(&[0, 0, 0, 0], &[mu], None).unwrap();
        let v = t.eval(c(1.0 / mu), 1.0 / mu).unwrap().re / mu;
        assert!(((v - g) / g).abs() < 0.02, "{v} {g}");
        let raw = t.eval(c(1.0), 1.0).unwrap().re;
        assert!(((raw - g) / g).abs() > 0.5);
    }

    #[test]
    fn trunc_rejects_borderline_decay() {
        assert!(matches!(TruncLimitKernel::new(&[0, 0, 0], &[2.0], None), Err(Error::Unsupported(_))));
    }
}
