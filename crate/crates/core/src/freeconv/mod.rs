//! Marchenko-Pastur type laws, their free convolution with a rescaled
//! semicircle, and the support edges of the result.

mod empirical;
mod poly;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_jacobi, gauss_legendre};

pub use empirical::{ks_distance, EmpiricalMeasure};
pub use poly::{
    acp_heat_flow, heat_flow_by_variance, laguerre_acp, real_roots, working_precision, Real, RealPolynomial,
};

const NORM_TOL: f64 = 1e-8;
const NORM_NODES: usize = 64;
/// Stieltjes inversion offsets, combined by Richardson extrapolation.
const DENSITY_OFFSETS: [f64; 2] = [1e-4, 1e-5];
const CONTINUATION_TOP: f64 = 1e4;
const CONTINUATION_STEPS: usize = 32;
const MAX_HALVINGS: usize = 12;
const NEWTON_STEPS: usize = 100;

/// Density (1/2 pi) sqrt((b - x)/x) h(x) on [0, b]; `h` holds ascending coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MPLaw {
    pub b: f64,
    pub h: Vec<f64>,
}

// coefficients of sqrt(1 - w) = sum_j c_j w^j
fn sqrt_series(count: usize) -> Vec<f64> {
    let mut c = vec![1.0];
    for j in 1..count {
        let prev = c[j - 1];
        c.push(prev * (j as f64 - 1.5) / j as f64);
    }
    c
}

fn horner3(coeffs: &[f64], z: Complex64) -> [Complex64; 3] {
    let zero = Complex64::new(0.0, 0.0);
    let (mut p, mut d1, mut d2) = (zero, zero, zero);
    for &c in coeffs.iter().rev() {
        d2 = d2 * z + 2.0 * d1;
        d1 = d1 * z + p;
        p = p * z + c;
    }
    [p, d1, d2]
}

impl MPLaw {
    pub fn new(b: f64, h: Vec<f64>) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::Config(format!("right endpoint must be positive, got {b}")));
        }
        if h.is_empty() || h.iter().any(|c| !c.is_finite()) {
            return Err(Error::Config("h needs finite coefficients".into()));
        }
        let law = MPLaw { b, h };
        for i in 0..=1000 {
            let x = b * i as f64 / 1000.0;
            if !(law.h_at(x) > 0.0) {
                return Err(Error::Config(format!("h must be positive on [0, b]; h({x}) = {}", law.h_at(x))));
            }
        }
        let mass = law.mass();
        if (mass - 1.0).abs() > NORM_TOL {
            return Err(Error::Config(format!("density has mass {mass}, not 1")));
        }
        Ok(law)
    }

    pub fn h_at(&self, x: f64) -> f64 {
        self.h.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// The law of s X for X with this law.
    pub fn scaled(&self, s: f64) -> MPLaw {
        let mut p = s;
        let h = self
            .h
            .iter()
            .map(|&c| {
                let v = c / p;
                p *= s;
                v
            })
            .collect();
        MPLaw { b: self.b * s, h }
    }

    pub fn density(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= self.b {
            return 0.0;
        }
        ((self.b - x) / x).sqrt() * self.h_at(x) / (2.0 * PI)
    }

    // x = b (1 + t)/2 turns the density into the Jacobi weight (1 - t)^{1/2} (1 + t)^{-1/2}
    fn jacobi_nodes(&self, order: usize) -> Vec<(f64, f64)> {
        let rule = gauss_jacobi(order, 0.5, -0.5);
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&t, &w)| {
                let x = 0.5 * self.b * (1.0 + t);
                (x, w * self.b / (4.0 * PI) * self.h_at(x))
            })
            .collect()
    }

    pub fn mass(&self) -> f64 {
        self.jacobi_nodes(NORM_NODES).iter().map(|&(_, w)| w).sum()
    }

    /// Distribution function, integrated in x = b (1 - cos th)/2 where the
    /// integrand (b / 2 pi) h(x) cos^2(th / 2) is smooth.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= self.b {
            return 1.0;
        }
        let th_end = (1.0 - 2.0 * x / self.b).acos();
        let rule = gauss_legendre(32);
        let half = 0.5 * th_end;
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&z, &w)| {
                let th = half * (1.0 + z);
                let xt = 0.5 * self.b * (1.0 - th.cos());
                w * half * self.b / (2.0 * PI) * self.h_at(xt) * (0.5 * th).cos().powi(2)
            })
            .sum()
    }

    /// Polynomial part of h(z) sqrt(1 - b/z); twice the polynomial part of G at infinity.
    fn polynomial_part(&self) -> Vec<f64> {
        let c = sqrt_series(self.h.len());
        (0..self.h.len())
            .map(|m| (m..self.h.len()).map(|i| self.h[i] * c[i - m] * self.b.powi((i - m) as i32)).sum())
            .collect()
    }

    /// G, G' and G'' in closed form:
    /// G(z) = (P(z) - h(z) sqrt(z - b)/sqrt(z)) / 2, with P the polynomial
    /// part of h(z) sqrt(1 - b/z). Far from the support the Laurent tail is
    /// summed instead to avoid the cancellation.
    pub fn stieltjes_derivs(&self, z: Complex64) -> Result<[Complex64; 3]> {
        if z.im == 0.0 && z.re >= 0.0 && z.re <= self.b {
            return Err(Error::Domain(format!("z = {z} lies on the support [0, {}]", self.b)));
        }
        if z.norm() > 4.0 * self.b {
            Ok(self.stieltjes_tail(z))
        } else {
            Ok(self.stieltjes_closed(z))
        }
    }

    fn stieltjes_closed(&self, z: Complex64) -> [Complex64; 3] {
        self.stieltjes_split(z, z - self.b)
    }

    // closed form with zmb = z - b supplied separately, so points within
    // rounding distance of the right endpoint keep their offset
    fn stieltjes_split(&self, z: Complex64, zmb: Complex64) -> [Complex64; 3] {
        let b = self.b;
        let r = zmb.sqrt() / z.sqrt();
        let q = b / (2.0 * z * zmb);
        let q1 = -b * (2.0 * z - b) / (2.0 * z * z * zmb * zmb);
        let (r1, r2) = (r * q, r * (q * q + q1));
        let [h, h1, h2] = horner3(&self.h, z);
        let [p, p1, p2] = horner3(&self.polynomial_part(), z);
        [0.5 * (p - h * r), 0.5 * (p1 - h1 * r - h * r1), 0.5 * (p2 - h2 * r - 2.0 * h1 * r1 - h * r2)]
    }

    fn stieltjes_tail(&self, z: Complex64) -> [Complex64; 3] {
        // G = -(1/2) sum_{j >= 1} T_j z^{-j}, T_j = sum_i h_i c_{i+j} b^{i+j}
        let deg = self.h.len();
        let c = sqrt_series(deg + 200);
        let zinv = 1.0 / z;
        let mut zp = zinv;
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for j in 1..200 {
            let t: f64 = (0..deg).map(|i| self.h[i] * c[i + j] * self.b.powi((i + j) as i32)).sum();
            let jf = j as f64;
            let term = t * zp;
            out[0] += term;
            out[1] += -jf * term * zinv;
            out[2] += jf * (jf + 1.0) * term * zinv * zinv;
            if term.norm() < 1e-18 * out[0].norm() {
                break;
            }
            zp *= zinv;
        }
        out.map(|v| -0.5 * v)
    }

    pub fn stieltjes(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.stieltjes_derivs(z)?[0])
    }

    /// G, G', G'' by Gauss-Jacobi quadrature of int dmu(x) / (z - x); an
    /// independent route to `stieltjes_derivs` away from the support.
    pub fn stieltjes_quadrature(&self, z: Complex64, order: usize) -> Result<[Complex64; 3]> {
        if z.im == 0.0 && z.re >= 0.0 && z.re <= self.b {
            return Err(Error::Domain(format!("z = {z} lies on the support [0, {}]", self.b)));
        }
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (x, w) in self.jacobi_nodes(order) {
            let d = 1.0 / (z - x);
            out[0] += w * d;
            out[1] -= w * d * d;
            out[2] += 2.0 * w * d * d * d;
        }
        Ok(out)
    }
}

/// Unit-interval law with h(x) = 2 sum_{j<k} (A_{k-1-j} / A_k) x^j,
/// A_k = prod_{j<=k} (2j - 1)/(2j), and the scale mapping it to the
/// equilibrium law of the weight e^{-n x^k}.
pub fn mp_from_k(k: u32) -> Result<(MPLaw, f64)> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    let a: Vec<f64> = (0..=k)
        .scan(1.0, |acc, j| {
            if j > 0 {
                *acc *= (2 * j - 1) as f64 / (2 * j) as f64;
            }
            Some(*acc)
        })
        .collect();
    let ak = a[k as usize];
    let h = (0..k as usize).map(|j| 2.0 * a[k as usize - 1 - j] / ak).collect();
    let scale = (2.0 / (k as f64 * ak)).powf(1.0 / k as f64);
    Ok((MPLaw::new(1.0, h)?, scale))
}

/// The k-law in the coordinates of the n-normalized ensemble.
pub fn mp_physical(k: u32) -> Result<MPLaw> {
    let (law, scale) = mp_from_k(k)?;
    MPLaw::new(scale, law.scaled(scale).h)
}

/// Semicircle law of radius 2 eps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemicircleLaw {
    pub epsilon: f64,
}

impl SemicircleLaw {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(SemicircleLaw { epsilon })
    }

    pub fn density(&self, x: f64) -> f64 {
        let e2 = self.epsilon * self.epsilon;
        let r2 = 4.0 * e2 - x * x;
        if r2 <= 0.0 {
            0.0
        } else {
            r2.sqrt() / (2.0 * PI * e2)
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let r = 2.0 * self.epsilon;
        if x <= -r {
            return 0.0;
        }
        if x >= r {
            return 1.0;
        }
        let e2 = self.epsilon * self.epsilon;
        0.5 + x * (r * r - x * x).sqrt() / (4.0 * PI * e2) + (x / r).asin() / PI
    }

    pub fn stieltjes(&self, z: Complex64) -> Complex64 {
        let r = 2.0 * self.epsilon;
        (z - (z - r).sqrt() * (z + r).sqrt()) / (2.0 * self.epsilon * self.epsilon)
    }
}

/// Support edges of mu boxplus lambda_eps and the left soft-edge constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeConvEdges {
    pub epsilon: f64,
    pub u_left: f64,
    pub a_left: f64,
    pub u_right: f64,
    /// u_right - b, kept separately since it can fall below the rounding of b.
    pub u_right_offset: f64,
    pub b_right: f64,
    /// eps^{-2} q^{-1/3} with q = |G''(u_left)| / 6.
    pub c_eps: f64,
}

impl FreeConvEdges {
    /// Scale c with n rho(a + xi) ~ c n^{2/3} sqrt(c n^{2/3} xi) / pi at the
    /// left edge, the constant that matches the Airy kernel diagonal.
    pub fn c_airy(&self) -> f64 {
        self.c_eps / 3f64.cbrt()
    }
}

/// Which end of [0, b] an edge point is measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

// G, G', G'' at u = -t (left) or u = b + t (right), t > 0
fn edge_derivs(law: &MPLaw, side: Side, t: f64) -> [f64; 3] {
    let (z, zmb) = match side {
        Side::Left => (-t, -t - law.b),
        Side::Right => (law.b + t, t),
    };
    let z = Complex64::new(z, 0.0);
    let v =
        if z.norm() > 4.0 * law.b { law.stieltjes_tail(z) } else { law.stieltjes_split(z, Complex64::new(zmb, 0.0)) };
    v.map(|c| c.re)
}

// Offset t > 0 of the root of eps^2 (-G'(u)) = 1; the left side of the
// equation decreases in t on both sides.
fn edge_root(law: &MPLaw, eps: f64, side: Side) -> Result<f64> {
    let e2 = eps * eps;
    let phi = |t: f64| -> Result<f64> { Ok(-e2 * edge_derivs(law, side, t)[1] - 1.0) };
    let (mut lo, mut hi) = (law.b, law.b);
    let mut guard = 0;
    while phi(lo)? <= 0.0 {
        lo *= 0.5;
        guard += 1;
        if guard > 1000 || lo == 0.0 {
            return Err(Error::Bracketing(format!("no sign change of the {side:?} edge equation near the support")));
        }
    }
    while phi(hi)? >= 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 1000 || !hi.is_finite() {
            return Err(Error::Bracketing(format!(
                "no sign change of the {side:?} edge equation away from the support"
            )));
        }
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-6 {
            break;
        }
    }
    // Newton polish in t; du/dt = -1 on the left, +1 on the right
    let dir = if side == Side::Left { -1.0 } else { 1.0 };
    let mut t = (lo * hi).sqrt();
    for _ in 0..50 {
        let [_, g1, g2] = edge_derivs(law, side, t);
        let step = (-e2 * g1 - 1.0) / (-e2 * g2 * dir);
        let next = t - step;
        if !(next > 0.0) {
            break;
        }
        t = next;
        if step.abs() <= 1e-15 * t {
            break;
        }
    }
    Ok(t)
}

/// Edges of the support [a_eps, b_eps] of mu boxplus lambda_eps.
pub fn solve_edges(law: &MPLaw, eps: f64) -> Result<FreeConvEdges> {
    if !(eps > 0.0) {
        return Err(Error::Config(format!("eps must be positive, got {eps}")));
    }
    let e2 = eps * eps;
    let tl = edge_root(law, eps, Side::Left)?;
    let tr = edge_root(law, eps, Side::Right)?;
    let [gl, _, gl2] = edge_derivs(law, Side::Left, tl);
    let [gr, _, _] = edge_derivs(law, Side::Right, tr);
    let q = (gl2 / 6.0).abs();
    Ok(FreeConvEdges {
        epsilon: eps,
        u_left: -tl,
        a_left: -tl + e2 * gl,
        u_right: law.b + tr,
        u_right_offset: tr,
        b_right: law.b + (tr + e2 * gr),
        c_eps: q.powf(-1.0 / 3.0) / e2,
    })
}

fn newton_subordination(law: &MPLaw, eps: f64, z: Complex64, mut s: Complex64) -> Result<Complex64> {
    let inv = 1.0 / (eps * eps);
    for _ in 0..NEWTON_STEPS {
        let [g, g1, _] = law.stieltjes_derivs(s)?;
        let step = (g + (s - z) * inv) / (g1 + inv);
        let next = s - step;
        // the solution has Im s > Im z
        if !(next.im > 0.0) || !next.re.is_finite() {
            return Err(Error::Continuation { z });
        }
        s = next;
        if step.norm() <= 1e-14 * (1.0 + s.norm()) {
            return Ok(s);
        }
    }
    Err(Error::Continuation { z })
}

fn track(law: &MPLaw, eps: f64, s: Complex64, za: Complex64, zb: Complex64, depth: usize) -> Result<Complex64> {
    match newton_subordination(law, eps, zb, s) {
        Ok(v) => Ok(v),
        Err(e) if depth >= MAX_HALVINGS => Err(e),
        Err(_) => {
            let mid = Complex64::new(0.5 * (za.re + zb.re), (za.im * zb.im).sqrt());
            let sm = track(law, eps, s, za, mid, depth + 1)?;
            track(law, eps, sm, mid, zb, depth + 1)
        }
    }
}

/// Subordination point s_c(z), solving G(s) + eps^{-2}(s - z) = 0, and
/// G_{mu boxplus lambda_eps}(z) = G(s_c). Continued down from Im z = 1e4.
pub fn subordinate(law: &MPLaw, eps: f64, z: Complex64) -> Result<(Complex64, Complex64)> {
    if !(eps > 0.0) {
        return Err(Error::Config(format!("eps must be positive, got {eps}")));
    }
    if z.im < 0.0 {
        let (s, g) = subordinate(law, eps, z.conj())?;
        return Ok((s.conj(), g.conj()));
    }
    if z.im == 0.0 {
        return Err(Error::Domain(format!("subordination needs Im z != 0, got {z}")));
    }
    let top = z.im.max(CONTINUATION_TOP);
    let start = Complex64::new(z.re, top);
    let mut s = start - eps * eps * law.stieltjes(start)?;
    let mut prev = start;
    for j in 1..=CONTINUATION_STEPS {
        let y = top * (z.im / top).powf(j as f64 / CONTINUATION_STEPS as f64);
        let zj = if j == CONTINUATION_STEPS { z } else { Complex64::new(z.re, y) };
        s = track(law, eps, s, prev, zj, 0)?;
        prev = zj;
    }
    Ok((s, law.stieltjes(s)?))
}

/// mu boxplus lambda_eps for an MP-type mu.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeConvolution {
    pub law: MPLaw,
    pub eps: f64,
    pub edges: FreeConvEdges,
}

/// Linear interpolation table of a distribution function.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfTable {
    pub xs: Vec<f64>,
    pub fs: Vec<f64>,
}

impl CdfTable {
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return 0.0;
        }
        if x >= self.xs[n - 1] {
            return self.fs[n - 1];
        }
        let i = self.xs.partition_point(|&v| v <= x);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let t = (x - x0) / (x1 - x0);
        self.fs[i - 1] + t * (self.fs[i] - self.fs[i - 1])
    }
}

impl FreeConvolution {
    pub fn new(law: MPLaw, eps: f64) -> Result<Self> {
        let edges = solve_edges(&law, eps)?;
        Ok(FreeConvolution { law, eps, edges })
    }

    pub fn stieltjes(&self, z: Complex64) -> Result<Complex64> {
        Ok(subordinate(&self.law, self.eps, z)?.1)
    }

    /// -(1/pi) Im G(x + i delta), extrapolated to delta = 0.
    pub fn density(&self, x: f64) -> Result<f64> {
        let [d1, d2] = DENSITY_OFFSETS;
        let r1 = -self.stieltjes(Complex64::new(x, d1))?.im / PI;
        let r2 = -self.stieltjes(Complex64::new(x, d2))?.im / PI;
        Ok(((d1 * r2 - d2 * r1) / (d1 - d2)).max(0.0))
    }

    /// `points` samples of the density on the support widened by 5% each side.
    pub fn density_curve(&self, points: usize) -> Result<Vec<(f64, f64)>> {
        let (a, b) = (self.edges.a_left, self.edges.b_right);
        let pad = 0.05 * (b - a);
        let step = (b - a + 2.0 * pad) / (points.max(2) - 1) as f64;
        (0..points.max(2))
            .into_par_iter()
            .map(|i| {
                let x = a - pad + step * i as f64;
                Ok((x, self.density(x)?))
            })
            .collect()
    }

    /// Distribution function on [a_eps, b_eps] from the density at
    /// Chebyshev-spaced points, integrated by the trapezoid rule in the angle.
    pub fn cdf_table(&self, intervals: usize) -> Result<CdfTable> {
        let (a, b) = (self.edges.a_left, self.edges.b_right);
        let n = intervals.max(8);
        let pts: Vec<(f64, f64)> = (0..=n)
            .into_par_iter()
            .map(|i| {
                let th = PI * i as f64 / n as f64;
                let x = a + 0.5 * (b - a) * (1.0 - th.cos());
                Ok((x, self.density(x)? * 0.5 * (b - a) * th.sin()))
            })
            .collect::<Result<_>>()?;
        let h = PI / n as f64;
        let mut fs = vec![0.0];
        for w in pts.windows(2) {
            let last = *fs.last().unwrap();
            fs.push(last + 0.5 * h * (w[0].1 + w[1].1));
        }
        Ok(CdfTable { xs: pts.iter().map(|p| p.0).collect(), fs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    fn wishart() -> MPLaw {
        mp_physical(1).unwrap()
    }

    #[test]
    fn k_one_law() {
        let (law, scale) = mp_from_k(1).unwrap();
        assert_eq!(law.h, vec![4.0]);
        assert_eq!(scale, 4.0);
        let p = wishart();
        assert_eq!(p.b, 4.0);
        assert!((p.h[0] - 1.0).abs() < 1e-15);
        assert!((p.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn k_two_coefficients() {
        let (law, scale) = mp_from_k(2).unwrap();
        assert!((law.h[0] - 8.0 / 3.0).abs() < 1e-14);
        assert!((law.h[1] - 16.0 / 3.0).abs() < 1e-14);
        assert!((scale - (8.0f64 / 3.0).sqrt()).abs() < 1e-14);
        assert!((mp_physical(2).unwrap().mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unnormalized_h_is_rejected() {
        assert!(MPLaw::new(4.0, vec![1.1]).is_err());
        assert!(MPLaw::new(4.0, vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn wishart_stieltjes_closed_form() {
        let law = wishart();
        let g = law.stieltjes(c(-1.0, 0.0)).unwrap();
        assert!((g.re - (1.0 - 5f64.sqrt()) / 2.0).abs() < 1e-14 && g.im == 0.0);
        let z = c(1e6, 0.0);
        assert!((z * law.stieltjes(z).unwrap() - 1.0).norm() < 1e-5);
        let z = c(0.0, 1e6);
        assert!((z * law.stieltjes(z).unwrap() - 1.0).norm() < 1e-5);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for law in [wishart(), mp_physical(2).unwrap(), mp_physical(3).unwrap()] {
            for z in [c(-1.0, 0.0), c(-0.3, 0.0), c(law.b + 0.7, 0.0), c(1.0, 0.6), c(2.0, -0.8), c(10.0, 3.0)] {
                let a = law.stieltjes_derivs(z).unwrap();
                let q = law.stieltjes_quadrature(z, 300).unwrap();
                for d in 0..3 {
                    assert!((a[d] - q[d]).norm() < 1e-9 * (1.0 + q[d].norm()), "{z} d={d}: {} {}", a[d], q[d]);
                }
            }
        }
    }

    #[test]
    fn tail_and_closed_form_agree_at_the_switch() {
        let law = mp_physical(2).unwrap();
        let r = 4.0 * law.b;
        for z in [c(r, 0.0), c(0.0, r), c(-r * 0.6, r * 0.8), c(3.0 * r, r)] {
            let closed = law.stieltjes_closed(z);
            let tail = law.stieltjes_tail(z);
            for d in 0..3 {
                assert!((closed[d] - tail[d]).norm() < 1e-12 * closed[d].norm(), "{z} {d}");
            }
        }
    }

    #[test]
    fn stieltjes_sign_on_support() {
        let law = wishart();
        for i in 1..40 {
            let x = 0.1 * i as f64;
            assert!(law.stieltjes(c(x, 1e-6)).unwrap().im < 0.0, "{x}");
        }
        assert!(law.stieltjes(c(2.0, 0.0)).is_err());
    }

    #[test]
    fn mp_cdf_matches_quadrature_of_density() {
        let law = mp_physical(2).unwrap();
        assert!((law.cdf(law.b) - 1.0).abs() < 1e-15);
        let x = 0.4 * law.b;
        // substitution x = w^2 on [0, 0.4 b]
        let rule = gauss_legendre(40);
        let wmax = x.sqrt();
        let v: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&z, &w)| {
                let s = 0.5 * wmax * (1.0 + z);
                0.5 * wmax * w * 2.0 * s * law.density(s * s)
            })
            .sum();
        assert!((law.cdf(x) - v).abs() < 1e-10, "{} {v}", law.cdf(x));
    }

    #[test]
    fn semicircle_normalization_and_cdf() {
        let s = SemicircleLaw::new(0.5).unwrap();
        let rule = gauss_legendre(64);
        let mass: f64 = rule.nodes.iter().zip(&rule.weights).map(|(&z, &w)| w * s.density(z)).sum();
        assert!((mass - 1.0).abs() < 1e-4);
        assert!((s.cdf(0.0) - 0.5).abs() < 1e-15);
        assert_eq!(s.cdf(1.0), 1.0);
        let z = c(0.3, 0.4);
        let g = s.stieltjes(z);
        // G satisfies eps^2 G^2 - z G + 1 = 0
        assert!((0.25 * g * g - z * g + 1.0).norm() < 1e-14);
        assert!(g.im < 0.0);
    }

    #[test]
    fn edge_equations_hold() {
        let law = wishart();
        for eps in [1e-3, 0.1, 0.5, 1.0, 2.0] {
            let e = solve_edges(&law, eps).unwrap();
            let [gl, gl1, _] = law.stieltjes_derivs(c(e.u_left, 0.0)).unwrap().map(|v| v.re);
            let [gr, gr1, _] = edge_derivs(&law, Side::Right, e.u_right_offset);
            assert!((eps * eps * -gl1 - 1.0).abs() < 1e-10, "{eps}");
            assert!((eps * eps * -gr1 - 1.0).abs() < 1e-10, "{eps}");
            assert!((e.a_left - (e.u_left + eps * eps * gl)).abs() < 1e-10);
            assert!((e.b_right - (e.u_right + eps * eps * gr)).abs() < 1e-10);
            assert_eq!(e.u_right, law.b + e.u_right_offset);
            assert!(e.u_left < 0.0 && e.a_left < e.u_left && e.u_right > law.b && e.b_right > e.u_right);
        }
    }

    #[test]
    fn small_eps_prefactors() {
        let eps: f64 = 1e-3;
        let e = solve_edges(&wishart(), eps).unwrap();
        let s = eps.powf(4.0 / 3.0);
        let two23 = 2f64.powf(-2.0 / 3.0);
        assert!((e.u_left / s + two23).abs() < 0.02 * two23, "{}", e.u_left / s);
        assert!((e.a_left / s + 3.0 * two23).abs() < 0.02 * 3.0 * two23, "{}", e.a_left / s);
    }

    #[test]
    fn edge_scaling_slopes() {
        let law = wishart();
        let (e1, e2) = (1e-3, 1e-1);
        let a = solve_edges(&law, e1).unwrap();
        let b = solve_edges(&law, e2).unwrap();
        let span = (e2 / e1).ln();
        let slope_a = (b.a_left.abs() / a.a_left.abs()).ln() / span;
        let slope_c = (b.c_eps / a.c_eps).ln() / span;
        assert!((slope_a - 4.0 / 3.0).abs() < 0.05, "{slope_a}");
        assert!((slope_c + 8.0 / 9.0).abs() < 0.05, "{slope_c}");
    }

    #[test]
    fn edges_move_outward_with_noise() {
        let law = wishart();
        let e: Vec<FreeConvEdges> = [0.1, 0.5, 1.0, 2.0].iter().map(|&v| solve_edges(&law, v).unwrap()).collect();
        for w in e.windows(2) {
            assert!(w[1].a_left < w[0].a_left && w[1].b_right > w[0].b_right);
        }
    }

    #[test]
    fn subordination_at_large_z() {
        let law = wishart();
        let eps = 0.5;
        let z = c(3.0, 1e5);
        let (s, g) = subordinate(&law, eps, z).unwrap();
        let approx = z - eps * eps * law.stieltjes(z).unwrap();
        assert!((s - approx).norm() < 1e-6 * z.norm());
        // mean 1 gives G = 1/z + 1/z^2 + O(z^-3)
        assert!((g * z - 1.0).norm() < 2e-5);
        assert!((g * z - 1.0 - 1.0 / z).norm() < 1e-6);
        // the defining equation and conjugation symmetry
        let z = c(1.0, 0.01);
        let (s, g) = subordinate(&law, eps, z).unwrap();
        assert!((g + (s - z) / (eps * eps)).norm() < 1e-12);
        let (sc, gc) = subordinate(&law, eps, z.conj()).unwrap();
        assert_eq!((sc, gc), (s.conj(), g.conj()));
    }

    #[test]
    fn convolved_density_normalization_and_edges() {
        let fc = FreeConvolution::new(wishart(), 0.5).unwrap();
        let t = fc.cdf_table(400).unwrap();
        assert!((t.fs.last().unwrap() - 1.0).abs() < 1e-3, "{}", t.fs.last().unwrap());
        let curve = fc.density_curve(400).unwrap();
        let max = curve.iter().map(|p| p.1).fold(0.0, f64::max);
        let (a, b) = (fc.edges.a_left, fc.edges.b_right);
        assert!(fc.density(a + 1e-4).unwrap() < 0.05 * max);
        assert!(fc.density(b - 1e-4).unwrap() < 0.05 * max);
        assert!(fc.density(a - 0.05).unwrap() < 1e-6 && fc.density(b + 0.05).unwrap() < 1e-6);
    }

    #[test]
    fn subordination_matches_inverted_density() {
        let fc = FreeConvolution::new(wishart(), 0.5).unwrap();
        let z = c(1.0, 1.0);
        let g = fc.stieltjes(z).unwrap();
        let (a, b) = (fc.edges.a_left, fc.edges.b_right);
        let n = 600;
        let mut q = Complex64::new(0.0, 0.0);
        for i in 0..n {
            // midpoint rule in the angle, density vanishes at both ends
            let th = PI * (i as f64 + 0.5) / n as f64;
            let x = a + 0.5 * (b - a) * (1.0 - th.cos());
            q += fc.density(x).unwrap() * 0.5 * (b - a) * th.sin() * (PI / n as f64) / (z - x);
        }
        assert!((g - q).norm() < 1e-4, "{g} {q}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn stieltjes_maps_upper_to_lower(x in -5.0f64..9.0, y in 1e-3f64..10.0, k in 1u32..4) {
            let law = mp_physical(k).unwrap();
            prop_assert!(law.stieltjes(c(x, y)).unwrap().im < 0.0);
        }

        #[test]
        fn edge_residuals_vanish(eps in 0.01f64..3.0, k in 1u32..4) {
            let law = mp_physical(k).unwrap();
            let e = solve_edges(&law, eps).unwrap();
            let g1 = law.stieltjes_derivs(c(e.u_left, 0.0)).unwrap()[1].re;
            prop_assert!((eps * eps * -g1 - 1.0).abs() < 1e-10);
            prop_assert!(e.c_eps > 0.0);
        }
    }
}
