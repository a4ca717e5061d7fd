use num_complex::Complex64;

use super::Kernel;
use crate::error::{Error, Result};
use crate::specfun::bessel_j_reduced;

/// Hard-edge Bessel kernel of order alpha, written through
/// phi(x) = x^{-alpha/2} J_alpha(sqrt x), whose derivatives are
/// phi^{(k)} = (-1/2)^k phi_{alpha+k}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselKernel {
    pub alpha: f64,
}

const CONFLUENT_REL: f64 = 1e-4;

impl BesselKernel {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0) {
            return Err(Error::Domain(format!("Bessel kernel needs alpha > -1, got {alpha}")));
        }
        Ok(BesselKernel { alpha })
    }

    // phi and its first `count - 1` derivatives at x
    fn derivatives(&self, x: Complex64, count: usize) -> Vec<Complex64> {
        let mut scale = 1.0;
        (0..count)
            .map(|k| {
                let v = scale * bessel_j_reduced(self.alpha + k as f64, x);
                scale *= -0.5;
                v
            })
            .collect()
    }

    /// y^{-alpha} K(x, y), entire in both arguments.
    pub fn entire_part(&self, x: Complex64, y: Complex64) -> Complex64 {
        let h = x - y;
        if h.norm() < CONFLUENT_REL * (1.0 + x.norm()) {
            let d = self.derivatives(y, 5);
            // N(x, y) / h expanded in h = x - y through second order
            let mut acc = Complex64::new(0.0, 0.0);
            let mut hp = Complex64::new(1.0, 0.0);
            let mut fact = 1.0;
            for k in 1..=3 {
                fact *= k as f64;
                let c = y * (d[1] * d[k] - d[0] * d[k + 1]) / fact - d[0] * d[k] * k as f64 / fact;
                acc += c * hp;
                hp *= h;
            }
            acc
        } else {
            let fx = self.derivatives(x, 2);
            let fy = self.derivatives(y, 2);
            (y * fx[0] * fy[1] - x * fx[1] * fy[0]) / h
        }
    }
}

impl Kernel for BesselKernel {
    fn name(&self) -> String {
        format!("bessel(alpha={})", self.alpha)
    }

    fn beta(&self) -> f64 {
        (-self.alpha).max(0.0)
    }

    fn eval(&self, x: Complex64, y: f64) -> Result<Complex64> {
        if y < 0.0 {
            return Err(Error::Domain(format!("Bessel kernel needs y >= 0, got {y}")));
        }
        Ok(y.powf(self.alpha) * self.entire_part(x, Complex64::new(y, 0.0)))
    }

    fn eval_regularized(&self, x: Complex64, y: f64) -> Result<Complex64> {
        if y < 0.0 {
            return Err(Error::Domain(format!("Bessel kernel needs y >= 0, got {y}")));
        }
        Ok(y.powf(self.alpha.max(0.0)) * self.entire_part(x, Complex64::new(y, 0.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_j;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    // textbook form with Bessel functions of sqrt(x)
    fn textbook(alpha: f64, x: f64, y: f64) -> f64 {
        let (jx, djx) = bessel_j(alpha, c(x.sqrt())).unwrap();
        let (jy, djy) = bessel_j(alpha, c(y.sqrt())).unwrap();
        let num = jx.re * y.sqrt() * djy.re - jy.re * x.sqrt() * djx.re;
        x.powf(-alpha / 2.0) * y.powf(alpha / 2.0) * num / (2.0 * (x - y))
    }

    #[test]
    fn origin_value() {
        let k = BesselKernel::new(0.0).unwrap();
        assert!((k.eval(c(0.0), 0.0).unwrap() - c(0.25)).norm() < 1e-15);
    }

    #[test]
    fn matches_textbook_form() {
        for &alpha in &[0.0, 0.5, 1.0, 2.5, -0.5] {
            let k = BesselKernel::new(alpha).unwrap();
            for &(x, y) in &[(1.0, 2.0), (0.3, 7.0), (20.0, 3.0), (200.0, 180.0)] {
                let a = k.eval(c(x), y).unwrap();
                let b = textbook(alpha, x, y);
                assert!((a.re - b).abs() < 1e-11 * (1.0 + b.abs()) && a.im.abs() < 1e-15, "{alpha} {x} {y}: {a} {b}");
            }
        }
    }

    #[test]
    fn diagonal_identity_and_continuity() {
        let k = BesselKernel::new(0.0).unwrap();
        let (j0, _) = bessel_j(0.0, c(1.0)).unwrap();
        let (j1, _) = bessel_j(1.0, c(1.0)).unwrap();
        let expected = (j0.re * j0.re + j1.re * j1.re) / 4.0;
        let d = k.eval(c(1.0), 1.0).unwrap().re;
        assert!((d - expected).abs() < 1e-14);
        for &y in &[1.0 + 1e-6, 1.0 - 1e-6] {
            let v = k.eval(c(1.0), y).unwrap().re;
            assert!((v - expected).abs() < 1e-6, "{y}");
        }
        // both sides of the confluent switch agree with the direct quotient
        for &y in &[3.0 * (1.0 + 0.99e-4), 3.0 * (1.0 + 1.01e-4)] {
            let v = k.eval(c(3.0), y).unwrap().re;
            assert!((v - textbook(0.0, 3.0, y)).abs() < 1e-9, "{y}");
        }
    }

    #[test]
    fn gauge_leaves_determinant_unchanged() {
        let k = BesselKernel::new(0.5).unwrap();
        let pts = [1.0, 2.0];
        let m = |g: bool| {
            let mut a = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    let v = k.eval(c(pts[i]), pts[j]).unwrap().re;
                    a[i][j] = if g { v * (pts[i] / pts[j]).powf(0.25) } else { v };
                }
            }
            a[0][0] * a[1][1] - a[0][1] * a[1][0]
        };
        assert!((m(false) - m(true)).abs() < 1e-15);
        assert!(m(false) > 0.0);
    }

    #[test]
    fn regularized_limit_exists_for_negative_alpha() {
        let k = BesselKernel::new(-0.5).unwrap();
        let vals: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|&v| k.eval_regularized(c(1.0), v).unwrap().re).collect();
        assert!((vals[1] - vals[2]).abs() < (vals[0] - vals[1]).abs());
        assert!(k.eval(c(1.0), -1.0).is_err());
    }

    #[test]
    fn complex_first_argument_is_conjugation_symmetric() {
        let k = BesselKernel::new(1.0).unwrap();
        let z = Complex64::new(1.0, 3.0);
        let a = k.eval(z, 2.0).unwrap();
        let b = k.eval(z.conj(), 2.0).unwrap();
        assert!((a - b.conj()).norm() < 1e-14);
    }
}
