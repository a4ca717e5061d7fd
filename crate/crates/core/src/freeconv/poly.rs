//! Dense real polynomials in multiprecision: the heat flow that turns an
//! average characteristic polynomial into that of M + eps H, and real root
//! extraction.
//!
//! Monomial coefficients of a degree-n ACP are badly conditioned (the
//! evaluation condition number near the soft edge grows like 10^{0.45 n}),
//! so coefficients and evaluations carry 64 + 4n bits.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub type Real = FBig<HalfEven, 2>;

/// Bits carried for a polynomial of the given degree.
pub fn working_precision(degree: usize) -> usize {
    64 + 4 * degree
}

fn mp(x: f64, prec: usize) -> Real {
    Real::try_from(x).expect("finite f64").with_precision(prec).value()
}

fn to_f64(x: &Real) -> f64 {
    x.to_f64().value()
}

fn sign(x: &Real) -> i8 {
    if *x > Real::ZERO {
        1
    } else if *x < Real::ZERO {
        -1
    } else {
        0
    }
}

/// Ascending coefficients, leading coefficient nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPolynomial {
    coeffs: Vec<Real>,
    prec: usize,
}

fn horner(c: &[Real], x: &Real) -> Real {
    c.iter().rev().fold(Real::ZERO, |acc, v| acc * x + v)
}

fn derivative_coeffs(c: &[Real], prec: usize) -> Vec<Real> {
    c.iter().enumerate().skip(1).map(|(i, v)| v * mp(i as f64, prec)).collect()
}

impl RealPolynomial {
    /// Trims trailing zeros and rounds every coefficient to `prec` bits.
    pub fn new(coeffs: Vec<Real>, prec: usize) -> Result<Self> {
        let mut coeffs: Vec<Real> = coeffs.into_iter().map(|c| c.with_precision(prec).value()).collect();
        while coeffs.last().map_or(false, |v| sign(v) == 0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::Config("the zero polynomial has no degree".into()));
        }
        Ok(RealPolynomial { coeffs, prec })
    }

    pub fn from_f64(coeffs: &[f64]) -> Result<Self> {
        if coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("polynomial coefficients must be finite".into()));
        }
        let prec = working_precision(coeffs.len());
        Self::new(coeffs.iter().map(|&v| mp(v, prec)).collect(), prec)
    }

    /// prod_j (x - r_j).
    pub fn from_roots(roots: &[f64]) -> Self {
        let prec = working_precision(roots.len());
        let mut c = vec![mp(1.0, prec)];
        for &r in roots {
            let r = mp(r, prec);
            let mut next = vec![mp(0.0, prec); c.len() + 1];
            for (i, v) in c.iter().enumerate() {
                next[i + 1] += v;
                next[i] -= v * &r;
            }
            c = next;
        }
        RealPolynomial { coeffs: c, prec }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn coeffs(&self) -> &[Real] {
        &self.coeffs
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(to_f64).collect()
    }

    pub fn leading(&self) -> &Real {
        self.coeffs.last().unwrap()
    }

    pub fn is_monic(&self) -> bool {
        *self.leading() == mp(1.0, self.prec)
    }

    pub fn eval(&self, x: f64) -> f64 {
        to_f64(&self.eval_mp(x))
    }

    pub fn eval_mp(&self, x: f64) -> Real {
        horner(&self.coeffs, &mp(x, self.prec))
    }
}

/// sum_m (-t/2)^m p^{(2m)} / m!, the exact Gaussian average
/// E p(x + sqrt(t) i Z) for standard normal Z.
pub fn heat_flow_by_variance(p: &RealPolynomial, t: &Real) -> RealPolynomial {
    if sign(t) == 0 {
        return p.clone();
    }
    let prec = p.prec;
    let c = p.coeffs();
    let half = -(t.clone().with_precision(prec).value()) / mp(2.0, prec);
    let coeffs = (0..c.len())
        .map(|j| {
            let mut acc = c[j].clone();
            let mut f = mp(1.0, prec);
            let mut m = 1;
            while j + 2 * m < c.len() {
                let top = (j + 2 * m) as f64;
                f = f * &half * mp(top * (top - 1.0), prec) / mp(m as f64, prec);
                acc += &c[j + 2 * m] * &f;
                m += 1;
            }
            acc
        })
        .collect();
    RealPolynomial::new(coeffs, prec).expect("leading coefficient is unchanged")
}

/// Average characteristic polynomial of M + eps H from that of M, with H
/// a GUE matrix of entry variance 1/n.
pub fn acp_heat_flow(p: &RealPolynomial, n: usize, eps: f64) -> Result<RealPolynomial> {
    if n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::Config(format!("eps must be nonnegative, got {eps}")));
    }
    let e = mp(eps, p.prec);
    let t = &e * &e / mp(n as f64, p.prec);
    Ok(heat_flow_by_variance(p, &t))
}

/// Monic orthogonal polynomial of degree n for the weight x^alpha e^{-n x}.
pub fn laguerre_acp(n: usize, alpha: f64) -> Result<RealPolynomial> {
    if !(alpha > -1.0) {
        return Err(Error::Domain(format!("alpha must exceed -1, got {alpha}")));
    }
    let prec = working_precision(n);
    let nf = mp(n.max(1) as f64, prec);
    let al = mp(alpha, prec);
    let mut prev: Vec<Real> = vec![];
    let mut cur = vec![mp(1.0, prec)];
    for j in 0..n {
        let jf = mp(j as f64, prec);
        let a = (mp(2.0 * j as f64 + 1.0, prec) + &al) / &nf;
        let b = &jf * (&jf + &al) / (&nf * &nf);
        let mut next = vec![mp(0.0, prec); cur.len() + 1];
        for (i, v) in cur.iter().enumerate() {
            next[i + 1] += v;
            next[i] -= &a * v;
        }
        for (i, v) in prev.iter().enumerate() {
            next[i] -= &b * v;
        }
        prev = cur;
        cur = next;
    }
    RealPolynomial::new(cur, prec)
}

// Illinois-modified regula falsi on a sign-changing bracket, iterating in
// f64 and deciding signs in full precision.
fn solve_bracket(c: &[Real], prec: usize, mut a: f64, mut b: f64) -> f64 {
    let f = |x: f64| horner(c, &mp(x, prec));
    let (mut fa, mut fb) = (f(a), f(b));
    let sa = sign(&fa);
    let (mut va, mut vb) = (to_f64(&fa), to_f64(&fb));
    let mut side = 0;
    for _ in 0..200 {
        let mut x = if va.is_finite() && vb.is_finite() && va != vb { (a * vb - b * va) / (vb - va) } else { f64::NAN };
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        if x <= a || x >= b {
            return x;
        }
        let fx = f(x);
        let sx = sign(&fx);
        if sx == 0 {
            return x;
        }
        if sx == sa {
            a = x;
            fa = fx;
            va = to_f64(&fa);
            if side == -1 {
                vb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            vb = to_f64(&fb);
            if side == 1 {
                va *= 0.5;
            }
            side = 1;
        }
        if b - a <= 4.0 * f64::EPSILON * (a.abs().max(b.abs())) {
            return 0.5 * (a + b);
        }
    }
    0.5 * (a + b)
}

fn cauchy_bound(c: &[Real]) -> f64 {
    let lead = to_f64(c.last().unwrap()).abs();
    1.0 + c[..c.len() - 1].iter().map(|v| to_f64(v).abs() / lead).fold(0.0, f64::max)
}

// Real simple roots through the derivative chain: the roots of p^{(k+1)}
// separate those of p^{(k)}, so each level is found between the roots of
// the next. None when some bracket has no sign change.
fn interlacing_roots(p: &RealPolynomial) -> Option<Vec<f64>> {
    let (n, prec) = (p.degree(), p.prec);
    let mut chain = vec![p.coeffs().to_vec()];
    for _ in 1..n {
        let d = derivative_coeffs(chain.last().unwrap(), prec);
        chain.push(d);
    }
    let lin = chain.last().unwrap();
    let mut roots = vec![to_f64(&(-lin[0].clone() / &lin[1]))];
    for level in chain.iter().rev().skip(1) {
        let bound = cauchy_bound(level);
        let mut edges = vec![-bound];
        edges.extend(roots.iter().copied());
        edges.push(bound);
        let mut next = Vec::with_capacity(edges.len() - 1);
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (sa, sb) = (sign(&horner(level, &mp(a, prec))), sign(&horner(level, &mp(b, prec))));
            if sa == 0 || sb == 0 || sa == sb {
                return None;
            }
            next.push(solve_bracket(level, prec, a, b));
        }
        roots = next;
    }
    Some(roots)
}

fn companion_eigenvalues(p: &RealPolynomial) -> Vec<(f64, f64)> {
    let n = p.degree();
    let c = p.coeffs_f64();
    let lead = c[n];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    m.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect()
}

fn newton_polish(p: &RealPolynomial, mut x: f64) -> f64 {
    let d = derivative_coeffs(p.coeffs(), p.prec);
    for _ in 0..30 {
        let xm = mp(x, p.prec);
        let df = horner(&d, &xm);
        if sign(&df) == 0 {
            break;
        }
        let step = to_f64(&(horner(p.coeffs(), &xm) / df));
        x -= step;
        if !(step.abs() > 1e-16 * (1.0 + x.abs())) {
            break;
        }
    }
    x
}

/// Sorted real roots. With `known_real` every root must be real and simple:
/// they are located along the derivative chain and a failure is reported
/// with the largest imaginary part among the companion-matrix eigenvalues.
/// Otherwise the companion eigenvalues with |Im| < 1e-8 (1 + |Re|) are
/// polished by Newton steps and returned.
pub fn real_roots(p: &RealPolynomial, known_real: bool) -> Result<Vec<f64>> {
    if p.degree() == 0 {
        return Ok(vec![]);
    }
    if known_real {
        if let Some(r) = interlacing_roots(p) {
            return Ok(r);
        }
        let max_imag = companion_eigenvalues(p).iter().map(|z| z.1.abs()).fold(0.0, f64::max);
        return Err(Error::RealRootsViolation { max_imag });
    }
    let mut roots: Vec<f64> = companion_eigenvalues(p)
        .into_iter()
        .filter(|&(re, im)| im.abs() < 1e-8 * (1.0 + re.abs()))
        .map(|(re, _)| newton_polish(p, re))
        .collect();
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}
