use num_complex::Complex64;

use super::Kernel;
use crate::error::{Error, Result};
use crate::specfun::ln_gamma;

/// Laguerre kernel for the weight x^alpha e^{-n x} on (0, inf):
/// K_n(x, y) = n^{alpha+1} sum_{j<n} l_j(nx) l_j(ny) y^alpha e^{-ny}, with l_j the
/// orthonormal Laguerre polynomials for t^alpha e^{-t}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LueKernel {
    pub n: usize,
    pub alpha: f64,
}

impl LueKernel {
    /// Only the classical weight (k = 1) has explicit recurrence coefficients.
    pub fn new(n: usize, k: u32, alpha: f64) -> Result<Self> {
        if k != 1 {
            return Err(Error::Unsupported(format!(
                "finite-n kernel for weight e^(-n x^{k}) needs non-classical polynomials"
            )));
        }
        if n == 0 || !(alpha > -1.0) {
            return Err(Error::Domain(format!("need n >= 1 and alpha > -1, got {n}, {alpha}")));
        }
        Ok(LueKernel { n, alpha })
    }

    /// sum_{j<n} l_j(a) l_j(b), without the weight.
    pub fn polynomial_sum(&self, a: Complex64, b: Complex64) -> Complex64 {
        let al = self.alpha;
        let l0 = (-0.5 * ln_gamma(al + 1.0)).exp();
        let (mut pa, mut pb) = (Complex64::new(l0, 0.0), Complex64::new(l0, 0.0));
        let (mut qa, mut qb) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let mut sum = pa * pb;
        let mut b_prev = 0.0;
        for j in 0..self.n.saturating_sub(1) {
            let jf = j as f64;
            let bj = ((jf + 1.0) * (jf + al + 1.0)).sqrt();
            let c = 2.0 * jf + al + 1.0;
            let na = ((a - c) * pa - b_prev * qa) / bj;
            let nb = ((b - c) * pb - b_prev * qb) / bj;
            qa = pa;
            qb = pb;
            pa = na;
            pb = nb;
            b_prev = bj;
            sum += pa * pb;
        }
        sum
    }

    /// Kernel with complex first argument; zero for y < 0.
    pub fn eval_complex(&self, x: Complex64, y: f64) -> Result<Complex64> {
        if y < 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let nf = self.n as f64;
        let s = self.polynomial_sum(x * nf, Complex64::new(nf * y, 0.0));
        let w = ((self.alpha + 1.0) * nf.ln() - nf * y).exp() * y.powf(self.alpha);
        let v = s * w;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Conditioning { log_magnitude: s.norm().ln() });
        }
        Ok(v)
    }
}

impl Kernel for LueKernel {
    fn name(&self) -> String {
        format!("lue(n={}, alpha={})", self.n, self.alpha)
    }

    fn beta(&self) -> f64 {
        (-self.alpha).max(0.0)
    }

    fn eval(&self, x: Complex64, y: f64) -> Result<Complex64> {
        self.eval_complex(x, y)
    }
}
