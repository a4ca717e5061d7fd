use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Kernel, KernelValue};
use crate::error::Result;
use crate::quadrature::{path_nodes, ContourPath, QuadratureSpec};
use crate::specfun::{airy, airy_complex};

const CONFLUENT: f64 = 1e-5;

/// Christoffel-Darboux form of the Airy kernel at real arguments.
pub fn airy_kernel_cd(x: f64, y: f64) -> f64 {
    let (ax, dax) = airy(x);
    if (x - y).abs() < CONFLUENT {
        let h = x - y;
        let (a, da) = airy(y);
        return da * da - y * a * a - h * a * a / 2.0 + h * h * (y * da * da - a * da - y * y * a * a) / 6.0;
    }
    let (ay, day) = airy(y);
    (ax * day - ay * dax) / (x - y)
}

fn cd_complex(x: Complex64, y: Complex64) -> Result<Complex64> {
    let (ax, dax) = airy_complex(x)?;
    let (a, da) = airy_complex(y)?;
    let h = x - y;
    if h.norm() < CONFLUENT {
        return Ok(da * da - y * a * a - h * a * a / 2.0 + h * h * (y * da * da - a * da - y * y * a * a) / 6.0);
    }
    Ok((ax * da - a * dax) / h)
}

/// Airy kernel as a double contour integral, t on a contour through Re t = 1
/// with ends along arg t = +-pi/3, s on its mirror image.
pub fn airy_kernel_contour(x: Complex64, y: Complex64, quad: &QuadratureSpec) -> Result<KernelValue> {
    let c1 = ContourPath::airy_right(1.0);
    let c2 = c1.reflect_vertical_axis();
    let run = |refined: bool| {
        let tn = path_nodes(&c1, quad, refined);
        let sn = path_nodes(&c2, quad, refined);
        let f: Vec<(Complex64, Complex64)> =
            tn.iter().map(|&(t, w)| (t, w * (t * t * t / 3.0 - y * t).exp())).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for &(s, ws) in &sn {
            let g = ws * (-s * s * s / 3.0 + x * s).exp();
            let mut inner = Complex64::new(0.0, 0.0);
            for &(t, ft) in &f {
                inner += ft / (s - t);
            }
            acc += g * inner;
        }
        acc / (4.0 * PI * PI)
    };
    let coarse = run(false);
    let value = run(true);
    KernelValue::checked(value, (value - coarse).norm(), quad)
}

/// The Airy kernel, evaluated in Christoffel-Darboux form.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AiryKernel;

impl Kernel for AiryKernel {
    fn name(&self) -> String {
        "airy".into()
    }

    fn hard_edge(&self) -> bool {
        false
    }

    fn eval(&self, x: Complex64, y: f64) -> Result<Complex64> {
        if x.im == 0.0 {
            Ok(Complex64::new(airy_kernel_cd(x.re, y), 0.0))
        } else {
            cd_complex(x, Complex64::new(y, 0.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::airy_series;

    #[test]
    fn origin_and_symmetry() {
        let (_, dai0) = airy_series(0.0);
        assert!((airy_kernel_cd(0.0, 0.0) - dai0 * dai0).abs() < 1e-15);
        // mpmath: airyai(0, 1)**2
        assert!((airy_kernel_cd(0.0, 0.0) - 0.066_987_483_779_663_97).abs() < 1e-15);
        assert_eq!(airy_kernel_cd(1.0, 2.0), airy_kernel_cd(2.0, 1.0));
        assert!(airy_kernel_cd(5.0, 5.0) < 1e-4);
    }

    #[test]
    fn confluent_switch_is_continuous() {
        // mpmath, 30 digits, generic quotient form
        let a = airy_kernel_cd(0.7, 0.7 + 0.99e-5);
        let b = airy_kernel_cd(0.7, 0.7 + 1.01e-5);
        assert!((a - 0.014_892_632_047_624_23).abs() < 1e-12, "{a}");
        assert!((b - 0.014_892_628_469_415_01).abs() < 1e-10, "{b}");
    }

    #[test]
    fn contour_matches_cd() {
        let q = QuadratureSpec::default();
        for &(x, y) in &[(0.0, 0.0), (-1.0, 1.0), (2.5, -3.0)] {
            let v = airy_kernel_contour(Complex64::new(x, 0.0), Complex64::new(y, 0.0), &q).unwrap();
            assert!((v.value.re - airy_kernel_cd(x, y)).abs() < 1e-8, "{x} {y}: {}", v.value);
            assert!(v.value.im.abs() < 1e-10);
        }
    }

    #[test]
    fn contour_is_schwarz_symmetric() {
        let q = QuadratureSpec::default();
        let x = Complex64::new(0.3, 0.5);
        let y = Complex64::new(-0.2, 0.5);
        let a = airy_kernel_contour(x, y, &q).unwrap().value;
        let b = airy_kernel_contour(x.conj(), y.conj(), &q).unwrap().value;
        assert!((a - b.conj()).norm() < 1e-10);
        let direct = cd_complex(x, y).unwrap();
        assert!((a - direct).norm() < 1e-8);
    }

    #[test]
    fn complex_cd_matches_real_cd() {
        let k = AiryKernel;
        let v = k.eval(Complex64::new(-0.4, 1e-300), 1.3).unwrap();
        assert!((v.re - airy_kernel_cd(-0.4, 1.3)).abs() < 1e-13);
    }
}
