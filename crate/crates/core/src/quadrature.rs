//! Contour paths in the complex plane, composite Gauss-Legendre quadrature
//! along them, and residue sums for integrands with 1/sin(pi t) poles.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegmentKind {
    VerticalLine,
    HorizontalLine,
    Ray,
    CircularArc,
}

/// One oriented piece of a contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    /// Finite straight piece from `start` along the unit vector `direction`.
    Line { kind: SegmentKind, start: Complex64, direction: Complex64, length: f64 },
    /// Unbounded piece arriving at `end` from infinity, travelling along `direction`.
    Incoming { kind: SegmentKind, end: Complex64, direction: Complex64 },
    /// Unbounded piece leaving `start` towards infinity along `direction`.
    Outgoing { kind: SegmentKind, start: Complex64, direction: Complex64 },
    /// Arc of the circle |z - center| = radius from angle `theta0` through `sweep` radians.
    Arc { center: Complex64, radius: f64, theta0: f64, sweep: f64 },
}

impl Segment {
    pub fn kind(&self) -> SegmentKind {
        match *self {
            Segment::Line { kind, .. } | Segment::Incoming { kind, .. } | Segment::Outgoing { kind, .. } => kind,
            Segment::Arc { .. } => SegmentKind::CircularArc,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, Segment::Incoming { .. } | Segment::Outgoing { .. })
    }

    fn kind_of(direction: Complex64) -> SegmentKind {
        if direction.re.abs() < 1e-15 {
            SegmentKind::VerticalLine
        } else if direction.im.abs() < 1e-15 {
            SegmentKind::HorizontalLine
        } else {
            SegmentKind::Ray
        }
    }

    /// Straight segment between two points.
    pub fn line(a: Complex64, b: Complex64) -> Segment {
        let d = b - a;
        let length = d.norm();
        let direction = d / length;
        Segment::Line { kind: Self::kind_of(direction), start: a, direction, length }
    }

    pub fn incoming(end: Complex64, direction: Complex64) -> Segment {
        let direction = direction / direction.norm();
        Segment::Incoming { kind: Self::kind_of(direction), end, direction }
    }

    pub fn outgoing(start: Complex64, direction: Complex64) -> Segment {
        let direction = direction / direction.norm();
        Segment::Outgoing { kind: Self::kind_of(direction), start, direction }
    }

    /// Start point, or `None` for an incoming unbounded segment.
    pub fn start(&self) -> Option<Complex64> {
        match *self {
            Segment::Line { start, .. } | Segment::Outgoing { start, .. } => Some(start),
            Segment::Incoming { .. } => None,
            Segment::Arc { center, radius, theta0, .. } => Some(center + radius * Complex64::cis(theta0)),
        }
    }

    /// End point, or `None` for an outgoing unbounded segment.
    pub fn end(&self) -> Option<Complex64> {
        match *self {
            Segment::Line { start, direction, length, .. } => Some(start + direction * length),
            Segment::Incoming { end, .. } => Some(end),
            Segment::Outgoing { .. } => None,
            Segment::Arc { center, radius, theta0, sweep } => Some(center + radius * Complex64::cis(theta0 + sweep)),
        }
    }

    fn reversed(&self) -> Segment {
        match *self {
            Segment::Line { kind, start, direction, length } => {
                Segment::Line { kind, start: start + direction * length, direction: -direction, length }
            }
            Segment::Incoming { kind, end, direction } => Segment::Outgoing { kind, start: end, direction: -direction },
            Segment::Outgoing { kind, start, direction } => {
                Segment::Incoming { kind, end: start, direction: -direction }
            }
            Segment::Arc { center, radius, theta0, sweep } => {
                Segment::Arc { center, radius, theta0: theta0 + sweep, sweep: -sweep }
            }
        }
    }

    /// Parameter length after truncation, and the map tau -> (z, dz/dtau).
    fn parametrize(&self, truncation: f64) -> (f64, impl Fn(f64) -> (Complex64, Complex64) + '_) {
        let len = match *self {
            Segment::Line { length, .. } => length,
            Segment::Incoming { .. } | Segment::Outgoing { .. } => truncation,
            Segment::Arc { radius, sweep, .. } => radius * sweep.abs(),
        };
        let map = move |tau: f64| -> (Complex64, Complex64) {
            match *self {
                Segment::Line { start, direction, .. } | Segment::Outgoing { start, direction, .. } => {
                    (start + direction * tau, direction)
                }
                Segment::Incoming { end, direction, .. } => (end - direction * (len - tau), direction),
                Segment::Arc { center, radius, theta0, sweep } => {
                    let rate = sweep / len;
                    let e = Complex64::cis(theta0 + rate * tau);
                    (center + radius * e, I * radius * rate * e)
                }
            }
        };
        (len, map)
    }
}

/// Oriented piecewise contour; unbounded pieces only at the ends.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourPath {
    pub segments: Vec<Segment>,
}

impl ContourPath {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let path = ContourPath { segments };
        path.validate()?;
        Ok(path)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.segments.len();
        if n == 0 {
            return Err(Error::Config("empty contour".into()));
        }
        for (i, s) in self.segments.iter().enumerate() {
            match s {
                Segment::Incoming { .. } if i != 0 => {
                    return Err(Error::Config(format!("unbounded incoming segment at position {i}")))
                }
                Segment::Outgoing { .. } if i != n - 1 => {
                    return Err(Error::Config(format!("unbounded outgoing segment at position {i}")))
                }
                _ => {}
            }
        }
        for w in self.segments.windows(2) {
            let (a, b) = (w[0].end().unwrap(), w[1].start().unwrap());
            if (a - b).norm() > 1e-12 * (1.0 + a.norm()) {
                return Err(Error::Config(format!("segments do not connect: {a} vs {b}")));
            }
        }
        Ok(())
    }

    /// The vertical line re + iR oriented upwards.
    pub fn vertical_line(re: f64) -> Self {
        let p = Complex64::new(re, 0.0);
        ContourPath { segments: vec![Segment::incoming(p, I), Segment::outgoing(p, I)] }
    }

    /// Counter-clockwise circle.
    pub fn circle(center: Complex64, radius: f64) -> Self {
        ContourPath { segments: vec![Segment::Arc { center, radius, theta0: 0.0, sweep: 2.0 * PI }] }
    }

    /// Two rays from `apex`, each at angle `delta` from the vertical, tilted
    /// to the left, oriented upwards.
    pub fn tilted_rays(apex: Complex64, delta: f64) -> Self {
        let up = Complex64::cis(PI / 2.0 + delta);
        let down = Complex64::cis(-PI / 2.0 - delta);
        ContourPath { segments: vec![Segment::incoming(apex, -down), Segment::outgoing(apex, up)] }
    }

    /// Airy-type contour: from infinity along arg = -pi/3, up a vertical
    /// segment through `re`, out to infinity along arg = pi/3.
    pub fn airy_right(re: f64) -> Self {
        let h = re * 3f64.sqrt();
        let lo = Complex64::new(re, -h);
        let hi = Complex64::new(re, h);
        ContourPath {
            segments: vec![
                Segment::incoming(lo, -Complex64::cis(-PI / 3.0)),
                Segment::line(lo, hi),
                Segment::outgoing(hi, Complex64::cis(PI / 3.0)),
            ],
        }
    }

    /// Mirror image through the imaginary axis, keeping upward orientation.
    pub fn reflect_vertical_axis(&self) -> Self {
        let refl = |z: Complex64| Complex64::new(-z.re, z.im);
        let segments = self
            .segments
            .iter()
            .map(|s| match *s {
                Segment::Line { kind, start, direction, length } => {
                    Segment::Line { kind, start: refl(start), direction: refl(direction), length }
                }
                Segment::Incoming { kind, end, direction } => {
                    Segment::Incoming { kind, end: refl(end), direction: refl(direction) }
                }
                Segment::Outgoing { kind, start, direction } => {
                    Segment::Outgoing { kind, start: refl(start), direction: refl(direction) }
                }
                Segment::Arc { center, radius, theta0, sweep } => {
                    Segment::Arc { center: refl(center), radius, theta0: PI - theta0, sweep: -sweep }
                }
            })
            .collect();
        ContourPath { segments }
    }

    pub fn reversed(&self) -> Self {
        ContourPath { segments: self.segments.iter().rev().map(Segment::reversed).collect() }
    }

    /// Split the finite segment `index` at fraction `frac` of its length.
    pub fn split(&self, index: usize, frac: f64) -> Result<Self> {
        let seg = self.segments[index];
        let (a, b) = match seg {
            Segment::Line { kind, start, direction, length } => (
                Segment::Line { kind, start, direction, length: length * frac },
                Segment::Line {
                    kind,
                    start: start + direction * length * frac,
                    direction,
                    length: length * (1.0 - frac),
                },
            ),
            Segment::Arc { center, radius, theta0, sweep } => (
                Segment::Arc { center, radius, theta0, sweep: sweep * frac },
                Segment::Arc { center, radius, theta0: theta0 + sweep * frac, sweep: sweep * (1.0 - frac) },
            ),
            _ => return Err(Error::Config("cannot split an unbounded segment".into())),
        };
        let mut segments = self.segments.clone();
        segments.splice(index..=index, [a, b]);
        ContourPath::new(segments)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub truncation_radius: f64,
    pub panels_per_unit: usize,
    pub rule_order: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { truncation_radius: 10.0, panels_per_unit: 2, rule_order: 16, abs_tol: 1e-12, rel_tol: 1e-10 }
    }
}

impl QuadratureSpec {
    pub fn with_truncation(mut self, r: f64) -> Self {
        self.truncation_radius = r;
        self
    }

    pub fn with_panels(mut self, p: usize) -> Self {
        self.panels_per_unit = p;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.truncation_radius > 0.0) || !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::Config("quadrature radius and tolerances must be positive".into()));
        }
        if self.panels_per_unit == 0 || self.rule_order == 0 {
            return Err(Error::Config("panels_per_unit and rule_order must be positive".into()));
        }
        Ok(())
    }
}

/// Value of a path integral with its refinement error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: Complex64,
    pub err_estimate: f64,
    pub converged: bool,
}

impl Quad {
    /// Turn a missed tolerance into an error.
    pub fn require(self) -> Result<Complex64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::Tolerance { value: self.value, err: self.err_estimate })
        }
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn rule_cache() -> &'static RwLock<HashMap<usize, Arc<Rule>>> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<Rule>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

pub fn gauss_legendre(order: usize) -> Arc<Rule> {
    if let Some(r) = rule_cache().read().unwrap().get(&order) {
        return r.clone();
    }
    let rule = Arc::new(compute_gauss_legendre(order));
    rule_cache().write().unwrap().insert(order, rule.clone());
    rule
}

fn compute_gauss_legendre(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Jacobi rule for weight (1-x)^a (1+x)^b on [-1, 1].
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Rule {
    use crate::specfun::ln_gamma;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let ab = a + b;
    let mut z = 0.0f64;
    for i in 0..n {
        // initial guesses after Numerical Recipes' gaujac
        if i == 0 {
            let an = a / n as f64;
            let bn = b / n as f64;
            let r1 = (1.0 + a) * (2.78 / (4.0 + (n * n) as f64) + 0.768 * an / n as f64);
            let r2 = 1.0 + 1.48 * an + 0.96 * bn + 0.452 * an * an + 0.83 * an * bn;
            z = 1.0 - r1 / r2;
        } else if i == 1 {
            let r1 = (4.1 + a) / ((1.0 + a) * (1.0 + 0.156 * a));
            let r2 = 1.0 + 0.06 * (n as f64 - 8.0) * (1.0 + 0.12 * a) / n as f64;
            let r3 = 1.0 + 0.012 * b * (1.0 + 0.25 * a.abs()) / n as f64;
            z -= (1.0 - z) * r1 * r2 * r3;
        } else if i == 2 {
            let r1 = (1.67 + 0.28 * a) / (1.0 + 0.37 * a);
            let r2 = 1.0 + 0.22 * (n as f64 - 8.0) / n as f64;
            let r3 = 1.0 + 8.0 * b / ((6.28 + b) * (n * n) as f64);
            z -= (nodes[0] - z) * r1 * r2 * r3;
        } else if i == n - 2 {
            let r1 = (1.0 + 0.235 * b) / (0.766 + 0.119 * b);
            let r2 = 1.0 / (1.0 + 0.639 * (n as f64 - 4.0) / (1.0 + 0.71 * (n as f64 - 4.0)));
            let r3 = 1.0 / (1.0 + 20.0 * a / ((7.5 + a) * (n * n) as f64));
            z += (z - nodes[n - 4]) * r1 * r2 * r3;
        } else if i == n - 1 {
            let r1 = (1.0 + 0.37 * b) / (1.67 + 0.28 * b);
            let r2 = 1.0 / (1.0 + 0.22 * (n as f64 - 8.0) / n as f64);
            let r3 = 1.0 / (1.0 + 8.0 * a / ((6.28 + a) * (n * n) as f64));
            z += (z - nodes[n - 3]) * r1 * r2 * r3;
        } else {
            z = 3.0 * nodes[i - 1] - 3.0 * nodes[i - 2] + nodes[i - 3];
        }
        let mut pp;
        let mut p2;
        for _ in 0..200 {
            let mut temp = 2.0 + ab;
            let mut p1 = (a - b + temp * z) / 2.0;
            p2 = 1.0;
            for j in 2..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                temp = 2.0 * jf + ab;
                let aa = 2.0 * jf * (jf + ab) * (temp - 2.0);
                let bb = (temp - 1.0) * (a * a - b * b + temp * (temp - 2.0) * z);
                let c = 2.0 * (jf - 1.0 + a) * (jf - 1.0 + b) * temp;
                p1 = (bb * p2 - c * p3) / aa;
            }
            let nf = n as f64;
            pp = (nf * (a - b - temp * z) * p1 + 2.0 * (nf + a) * (nf + b) * p2) / (temp * (1.0 - z * z));
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        // recompute p2 at the converged node
        let mut temp = 2.0 + ab;
        let mut p1 = (a - b + temp * z) / 2.0;
        p2 = 1.0;
        for j in 2..=n {
            let jf = j as f64;
            let p3 = p2;
            p2 = p1;
            temp = 2.0 * jf + ab;
            let aa = 2.0 * jf * (jf + ab) * (temp - 2.0);
            let bb = (temp - 1.0) * (a * a - b * b + temp * (temp - 2.0) * z);
            let c = 2.0 * (jf - 1.0 + a) * (jf - 1.0 + b) * temp;
            p1 = (bb * p2 - c * p3) / aa;
        }
        let nf = n as f64;
        pp = (nf * (a - b - temp * z) * p1 + 2.0 * (nf + a) * (nf + b) * p2) / (temp * (1.0 - z * z));
        nodes[i] = z;
        weights[i] = (ln_gamma(a + nf) + ln_gamma(b + nf) - ln_gamma(nf + 1.0) - ln_gamma(nf + ab + 1.0)).exp()
            * temp
            * 2f64.powf(ab)
            / (pp * p2);
    }
    nodes.reverse();
    weights.reverse();
    Rule { nodes, weights }
}

fn panel_sum<F>(
    f: &F,
    map: &dyn Fn(f64) -> (Complex64, Complex64),
    len: f64,
    panels: usize,
    rule: &Rule,
) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let h = len / panels as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let a = p as f64 * h;
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let tau = a + 0.5 * h * (x + 1.0);
            let (z, dz) = map(tau);
            let v = f(z);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::Evaluation { node: z });
            }
            acc += *w * v * dz;
        }
        total += 0.5 * h * acc;
    }
    Ok(total)
}

/// Composite Gauss-Legendre quadrature of `f` along `path`.
///
/// Each segment is covered by `ceil(length * panels_per_unit)` panels; the
/// returned value uses twice that many and `err_estimate` is the difference
/// between the two passes.
pub fn integrate_path<F>(f: F, path: &ContourPath, spec: &QuadratureSpec) -> Result<Quad>
where
    F: Fn(Complex64) -> Complex64,
{
    let rule = gauss_legendre(spec.rule_order);
    let mut coarse = Complex64::new(0.0, 0.0);
    let mut fine = Complex64::new(0.0, 0.0);
    for seg in &path.segments {
        let (len, map) = seg.parametrize(spec.truncation_radius);
        if len == 0.0 {
            continue;
        }
        let panels = ((len * spec.panels_per_unit as f64).ceil() as usize).max(1);
        coarse += panel_sum(&f, &map, len, panels, &rule)?;
        fine += panel_sum(&f, &map, len, 2 * panels, &rule)?;
    }
    let err = (fine - coarse).norm();
    Ok(Quad { value: fine, err_estimate: err, converged: err <= spec.abs_tol + spec.rel_tol * fine.norm() })
}

/// Nodes and weights (including dz/dtau) of the rule along `path`; `refined`
/// selects the doubled panel count used for the returned value of
/// [`integrate_path`].
///
/// Used when one integrand factor is shared by many integrals, e.g. a double
/// contour integral assembled from two node sets.
pub fn path_nodes(path: &ContourPath, spec: &QuadratureSpec, refined: bool) -> Vec<(Complex64, Complex64)> {
    let rule = gauss_legendre(spec.rule_order);
    let mut out = Vec::new();
    for seg in &path.segments {
        let (len, map) = seg.parametrize(spec.truncation_radius);
        if len == 0.0 {
            continue;
        }
        let base = ((len * spec.panels_per_unit as f64).ceil() as usize).max(1);
        let panels = if refined { 2 * base } else { base };
        let h = len / panels as f64;
        for p in 0..panels {
            let a = p as f64 * h;
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let (z, dz) = map(a + 0.5 * h * (x + 1.0));
                out.push((z, 0.5 * h * *w * dz));
            }
        }
    }
    out
}

/// Result of a residue summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueSum {
    pub value: Complex64,
    pub terms: usize,
}

/// Sum of residues of g(t)/sin(pi t) at t = 0, 1, 2, ...: sum_k (-1)^k g(k) / pi.
///
/// Stops once three consecutive terms fall below `tol` relative to the
/// partial sum.
pub fn residue_series<G>(mut g: G, tol: f64, max_terms: usize) -> Result<ResidueSum>
where
    G: FnMut(usize) -> Result<Complex64>,
{
    let mut sum = Complex64::new(0.0, 0.0);
    let mut quiet = 0;
    for k in 0..max_terms {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * g(k)? / PI;
        sum += term;
        if term.norm() <= tol * sum.norm() {
            quiet += 1;
            if quiet == 3 {
                return Ok(ResidueSum { value: sum, terms: k + 1 });
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Divergence { terms: max_terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{bessel_j, log_gamma};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let r = gauss_legendre(16);
        let s: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(30)).sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-14);
        let total: f64 = r.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_jacobi_moments() {
        // weight (1-x)^{1/2} (1+x)^{-1/2}: int = pi, int x = -pi/2
        let r = gauss_jacobi(20, 0.5, -0.5);
        let m0: f64 = r.weights.iter().sum();
        let m1: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x).sum();
        assert!((m0 - PI).abs() < 1e-12, "{m0}");
        assert!((m1 + PI / 2.0).abs() < 1e-12, "{m1}");
        let r = gauss_jacobi(12, 0.0, 1.0);
        // int_{-1}^1 (1+x) x^2 dx = 2/3
        let m2: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x * x).sum();
        assert!((m2 - 2.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn zero_integrand() {
        let q = integrate_path(|_| c(0.0, 0.0), &ContourPath::vertical_line(0.3), &QuadratureSpec::default()).unwrap();
        assert_eq!(q.value, c(0.0, 0.0));
        assert_eq!(q.err_estimate, 0.0);
    }

    #[test]
    fn unit_circle_residue() {
        let q =
            integrate_path(|z| z.inv(), &ContourPath::circle(c(0.0, 0.0), 1.0), &QuadratureSpec::default()).unwrap();
        assert!((q.value - c(0.0, 2.0 * PI)).norm() < 1e-10);
    }

    #[test]
    fn gaussian_on_shifted_line_matches_trapezoid_oracle() {
        let spec = QuadratureSpec::default().with_truncation(8.0);
        let q = integrate_path(|s| (s * s).exp(), &ContourPath::vertical_line(-0.5), &spec).unwrap();
        // dense trapezoid in tau, s = -1/2 + i tau, ds = i dtau
        let n = 160_000;
        let h = 16.0 / n as f64;
        let mut acc = c(0.0, 0.0);
        for k in 0..=n {
            let tau = -8.0 + k as f64 * h;
            let s = c(-0.5, tau);
            let w = if k == 0 || k == n { 0.5 } else { 1.0 };
            acc += w * (s * s).exp() * c(0.0, 1.0);
        }
        acc *= h;
        assert!((q.value - acc).norm() < 1e-8, "{} vs {}", q.value, acc);
        assert!((q.value - c(0.0, PI.sqrt())).norm() < 1e-8);
    }

    #[test]
    fn reversal_negates() {
        let path = ContourPath::airy_right(1.0);
        let spec = QuadratureSpec::default().with_truncation(6.0);
        let f = |t: Complex64| (t * t * t / 3.0 - 0.7 * t).exp();
        let a = integrate_path(f, &path, &spec).unwrap().value;
        let b = integrate_path(f, &path.reversed(), &spec).unwrap().value;
        assert!((a + b).norm() < 1e-12);
    }

    #[test]
    fn split_leaves_value_unchanged() {
        let path = ContourPath::airy_right(1.0);
        let spec = QuadratureSpec::default().with_truncation(6.0);
        let f = |t: Complex64| (t * t * t / 3.0 + 0.4 * t).exp();
        let a = integrate_path(f, &path, &spec).unwrap();
        let b = integrate_path(f, &path.split(1, 0.37).unwrap(), &spec).unwrap();
        assert!((a.value - b.value).norm() <= a.err_estimate + b.err_estimate + 1e-13);
    }

    #[test]
    fn validation_rejects_gaps_and_inner_unbounded() {
        let bad =
            ContourPath::new(vec![Segment::line(c(0.0, 0.0), c(1.0, 0.0)), Segment::line(c(2.0, 0.0), c(3.0, 0.0))]);
        assert!(bad.is_err());
        let bad = ContourPath::new(vec![
            Segment::outgoing(c(0.0, 0.0), c(1.0, 0.0)),
            Segment::line(c(0.0, 0.0), c(1.0, 0.0)),
        ]);
        assert!(bad.is_err());
        assert!(ContourPath::airy_right(1.0).validate().is_ok());
        assert!(ContourPath::airy_right(1.0).reflect_vertical_axis().validate().is_ok());
    }

    #[test]
    fn residue_series_at_zero_argument() {
        // g(t) = x^t / Gamma(t+1)^2 with x = 0: only k = 0 survives
        let r = residue_series(|k| Ok(if k == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) }), 1e-15, 100).unwrap();
        assert!((r.value - c(1.0 / PI, 0.0)).norm() < 1e-16);
        assert_eq!(r.terms, 4);
    }

    #[test]
    fn residue_series_reproduces_j0() {
        let g = |k: usize| -> Result<Complex64> {
            let kf = k as f64;
            Ok((kf * 4f64.ln() - 2.0 * log_gamma(c(kf + 1.0, 0.0))?).exp())
        };
        let r = residue_series(g, 1e-16, 200).unwrap();
        let (j0, _) = bessel_j(0.0, c(4.0, 0.0)).unwrap();
        assert!((r.value * PI - j0).norm() < 1e-10, "{} vs {}", r.value * PI, j0);
    }

    #[test]
    fn residue_series_reports_divergence() {
        assert!(matches!(residue_series(|_| Ok(c(1.0, 0.0)), 1e-12, 50), Err(Error::Divergence { terms: 50 })));
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let r = integrate_path(|z| z.inv(), &ContourPath::vertical_line(0.0), &QuadratureSpec::default());
        // the line through 0 with an even node count never hits 0 exactly; force it:
        let seg = ContourPath::new(vec![Segment::line(c(-1.0, 0.0), c(1.0, 0.0))]).unwrap();
        let r2 = integrate_path(
            |z| {
                if z.re.abs() < 0.1 {
                    c(f64::NAN, 0.0)
                } else {
                    z
                }
            },
            &seg,
            &QuadratureSpec::default(),
        );
        assert!(r.is_ok());
        assert!(matches!(r2, Err(Error::Evaluation { .. })));
    }
}
