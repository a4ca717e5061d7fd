//! Property checks across module boundaries, on random inputs.

use std::f64::consts::PI;

use hardedge::kernels::{airy_kernel_cd, BesselKernel, Kernel};
use hardedge::quadrature::{integrate_path, ContourPath, QuadratureSpec, Segment};
use hardedge::specfun::log_gamma;
use num_complex::Complex64;
use proptest::prelude::*;

fn away_from_poles(z: Complex64) -> bool {
    z.re > 0.5 || (z - z.re.round()).norm() > 0.05
}

fn strip() -> impl Strategy<Value = Complex64> {
    (-10.0f64..10.0, -40.0f64..40.0)
        .prop_map(|(a, b)| Complex64::new(a, b))
        .prop_filter("pole", |z| away_from_poles(*z))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn log_gamma_recurrence(z in strip()) {
        let ratio = (log_gamma(z + 1.0).unwrap() - log_gamma(z).unwrap()).exp();
        prop_assert!((ratio / z - 1.0).norm() < 1e-10, "{z}: {ratio}");
    }

    #[test]
    fn gamma_reflection(z in strip().prop_filter("pole of 1 - z", |z| away_from_poles(1.0 - z))) {
        let g = (log_gamma(z).unwrap() + log_gamma(1.0 - z).unwrap()).exp();
        let v = g * (PI * z).sin() / PI;
        prop_assert!((v - 1.0).norm() < 1e-9, "{z}: {v}");
    }

    #[test]
    fn bessel_correlation_determinants_are_nonnegative(x in 0.01f64..20.0, y in 0.01f64..20.0, alpha in 0.0f64..3.0) {
        let k = BesselKernel::new(alpha).unwrap();
        let e = |a: f64, b: f64| k.eval(Complex64::new(a, 0.0), b).unwrap().re;
        let det = e(x, x) * e(y, y) - e(x, y) * e(y, x);
        prop_assert!(det >= -1e-10, "{det}");
    }

    #[test]
    fn airy_correlation_determinants_are_nonnegative(x in -5.0f64..5.0, y in -5.0f64..5.0) {
        let det = airy_kernel_cd(x, x) * airy_kernel_cd(y, y) - airy_kernel_cd(x, y).powi(2);
        prop_assert!(det >= -1e-10, "{det}");
    }

    #[test]
    fn reversal_negates_line_integrals(a in (-3.0f64..3.0, -3.0f64..3.0), b in (-3.0f64..3.0, -3.0f64..3.0), k in 0.0f64..2.0) {
        let (a, b) = (Complex64::new(a.0, a.1), Complex64::new(b.0, b.1));
        let path = ContourPath::new(vec![Segment::line(a, b)]).unwrap();
        let f = |z: Complex64| (k * z).cos() * (-0.1 * z * z).exp();
        let spec = QuadratureSpec::default();
        let fwd = integrate_path(f, &path, &spec).unwrap().value;
        let back = integrate_path(f, &path.reversed(), &spec).unwrap().value;
        prop_assert!((fwd + back).norm() < 1e-12 * (1.0 + fwd.norm()));
    }

    #[test]
    fn doubling_panels_never_increases_the_error_estimate(k in 0.0f64..3.0, shift in -1.0f64..1.0, panels in 1usize..4) {
        // a low-order rule keeps the estimates above the rounding floor
        let path = ContourPath::vertical_line(shift);
        let f = |z: Complex64| (k * z).cosh() * (z * z).exp();
        let spec = QuadratureSpec { rule_order: 4, ..QuadratureSpec::default() }.with_truncation(6.0);
        let coarse = integrate_path(f, &path, &spec.with_panels(panels)).unwrap().err_estimate;
        let fine = integrate_path(f, &path, &spec.with_panels(2 * panels)).unwrap().err_estimate;
        prop_assert!(fine <= coarse + 1e-13, "{coarse} -> {fine}");
    }
}
