//! Values-only Hermitian eigensolver: Householder reduction to a real
//! symmetric tridiagonal matrix, then implicit-shift QL.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_QL_SWEEPS: usize = 60;

// Column-major split storage of the lower triangle.
struct Lower {
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

// Reflector I - tau v v^H together with the update vector w of the step
// B <- B - v w^H - w v^H.
struct Step {
    vr: Vec<f64>,
    vi: Vec<f64>,
    wr: Vec<f64>,
    wi: Vec<f64>,
}

/// Diagonal and (nonnegative) off-diagonal of a real symmetric tridiagonal
/// matrix unitarily similar to the Hermitian `m`. Only the lower triangle of
/// `m` is read.
pub fn tridiagonalize(m: &DMatrix<Complex64>) -> (Vec<f64>, Vec<f64>) {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "square matrix expected");
    if n == 0 {
        return (vec![], vec![]);
    }
    let mut a = Lower { n, re: vec![0.0; n * n], im: vec![0.0; n * n] };
    for j in 0..n {
        for i in j..n {
            let v = m[(i, j)];
            a.re[i + j * n] = v.re;
            a.im[i + j * n] = v.im;
        }
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n - 1];
    let mut pending: Option<Step> = None;
    let (mut pr, mut pi) = (vec![0.0; n], vec![0.0; n]);
    for c in 0..n {
        // finalize column c under the previous step
        if let Some(s) = &pending {
            update_column(&mut a, s, c);
        }
        d[c] = a.re[c + c * n];
        let next = if c + 2 <= n { reflector(&a, c, &mut e[c]) } else { None };
        // one sweep: apply the previous step to the trailing columns and
        // accumulate p = B v for the new reflector
        pr.fill(0.0);
        pi.fill(0.0);
        for j in c + 1..n {
            match (&pending, &next) {
                (Some(s), Some((v, _))) => fused_column(&mut a, s, v, j, &mut pr, &mut pi),
                (Some(s), None) => update_column(&mut a, s, j),
                (None, Some((v, _))) => accumulate(&a, v, j, &mut pr, &mut pi),
                (None, None) => {}
            }
        }
        pending = next.map(|(mut s, tau)| {
            // w = tau p - (tau^2 / 2)(v^H p) v, with v^H p real
            let mut vp = 0.0;
            for i in c + 1..n {
                vp += s.vr[i] * pr[i] + s.vi[i] * pi[i];
            }
            let k = 0.5 * tau * tau * vp;
            for i in c + 1..n {
                s.wr[i] = tau * pr[i] - k * s.vr[i];
                s.wi[i] = tau * pi[i] - k * s.vi[i];
            }
            s
        });
    }
    (d, e)
}

// Householder vector for rows c+1.. of column c; writes the resulting
// subdiagonal magnitude to `e`. None when the column is already reduced.
fn reflector(a: &Lower, c: usize, e: &mut f64) -> Option<(Step, f64)> {
    let n = a.n;
    let col = c * n;
    let (x0r, x0i) = (a.re[col + c + 1], a.im[col + c + 1]);
    let head = x0r.hypot(x0i);
    let tail: f64 = (c + 2..n).map(|i| a.re[col + i].powi(2) + a.im[col + i].powi(2)).sum();
    let norm = (head * head + tail).sqrt();
    *e = norm;
    if tail == 0.0 {
        return None;
    }
    let (phr, phi) = if head > 0.0 { (x0r / head, x0i / head) } else { (1.0, 0.0) };
    let mut s = Step { vr: vec![0.0; n], vi: vec![0.0; n], wr: vec![0.0; n], wi: vec![0.0; n] };
    s.vr[c + 1..].copy_from_slice(&a.re[col + c + 1..col + n]);
    s.vi[c + 1..].copy_from_slice(&a.im[col + c + 1..col + n]);
    s.vr[c + 1] += phr * norm;
    s.vi[c + 1] += phi * norm;
    let tau = 1.0 / (norm * (norm + head));
    Some((s, tau))
}

// A[j.., j] -= v w_j^* + w v_j^*, keeping the diagonal real.
fn update_column(a: &mut Lower, s: &Step, j: usize) {
    let n = a.n;
    let (wjr, wji, vjr, vji) = (s.wr[j], -s.wi[j], s.vr[j], -s.vi[j]);
    let col = j * n;
    let re = &mut a.re[col + j..col + n];
    let im = &mut a.im[col + j..col + n];
    let it =
        re.iter_mut().zip(im.iter_mut()).zip(s.vr[j..].iter().zip(&s.vi[j..])).zip(s.wr[j..].iter().zip(&s.wi[j..]));
    for (((ar, ai), (&vr, &vi)), (&wr, &wi)) in it {
        *ar -= vr * wjr - vi * wji + wr * vjr - wi * vji;
        *ai -= vr * wji + vi * wjr + wr * vji + wi * vjr;
    }
    a.im[col + j] = 0.0;
}

// p += B[:, j] v_j over the lower triangle, using Hermitian symmetry for the
// upper part.
fn accumulate(a: &Lower, s: &Step, j: usize, pr: &mut [f64], pi: &mut [f64]) {
    let n = a.n;
    let col = j * n;
    let (vjr, vji) = (s.vr[j], s.vi[j]);
    let mut acc = [0.0f64; 8];
    let re = &a.re[col + j + 1..col + n];
    let im = &a.im[col + j + 1..col + n];
    let vr = &s.vr[j + 1..];
    let vi = &s.vi[j + 1..];
    let (ppr, ppi) = (&mut pr[j + 1..], &mut pi[j + 1..]);
    // four independent partial sums for conj(a) . v
    let m = re.len();
    let chunks = m / 4 * 4;
    for t in (0..chunks).step_by(4) {
        for q in 0..4 {
            let (ar, ai) = (re[t + q], im[t + q]);
            ppr[t + q] += ar * vjr - ai * vji;
            ppi[t + q] += ar * vji + ai * vjr;
            acc[2 * q] += ar * vr[t + q] + ai * vi[t + q];
            acc[2 * q + 1] += ar * vi[t + q] - ai * vr[t + q];
        }
    }
    for t in chunks..m {
        let (ar, ai) = (re[t], im[t]);
        ppr[t] += ar * vjr - ai * vji;
        ppi[t] += ar * vji + ai * vjr;
        acc[0] += ar * vr[t] + ai * vi[t];
        acc[1] += ar * vi[t] - ai * vr[t];
    }
    let diag = a.re[col + j];
    pr[j] += diag * vjr + acc[0] + acc[2] + acc[4] + acc[6];
    pi[j] += diag * vji + acc[1] + acc[3] + acc[5] + acc[7];
}

// update_column followed by accumulate in a single pass over column j.
fn fused_column(a: &mut Lower, s: &Step, v: &Step, j: usize, pr: &mut [f64], pi: &mut [f64]) {
    #[cfg(target_arch = "x86_64")]
    {
        if std::is_x86_feature_detected!("avx2") {
            // SAFETY: the feature was detected at runtime
            unsafe { fused_column_avx2(a, s, v, j, pr, pi) };
            return;
        }
    }
    fused_column_generic(a, s, v, j, pr, pi);
}

// same operations in the same order as the generic path, wider registers
// only (no FMA contraction), so results are identical
#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn fused_column_avx2(a: &mut Lower, s: &Step, v: &Step, j: usize, pr: &mut [f64], pi: &mut [f64]) {
    fused_column_generic(a, s, v, j, pr, pi);
}

#[inline(always)]
fn fused_column_generic(a: &mut Lower, s: &Step, v: &Step, j: usize, pr: &mut [f64], pi: &mut [f64]) {
    let n = a.n;
    let col = j * n;
    let (wjr, wji, ujr, uji) = (s.wr[j], -s.wi[j], s.vr[j], -s.vi[j]);
    let (vjr, vji) = (v.vr[j], v.vi[j]);
    // diagonal entry stays real
    let djj = a.re[col + j] - 2.0 * (s.vr[j] * s.wr[j] + s.vi[j] * s.wi[j]);
    a.re[col + j] = djj;
    a.im[col + j] = 0.0;
    let m = n - j - 1;
    let re = &mut a.re[col + j + 1..col + n];
    let im = &mut a.im[col + j + 1..col + n];
    let (ur, ui, wr, wi) = (&s.vr[j + 1..], &s.vi[j + 1..], &s.wr[j + 1..], &s.wi[j + 1..]);
    let (vr, vi) = (&v.vr[j + 1..], &v.vi[j + 1..]);
    let (ppr, ppi) = (&mut pr[j + 1..], &mut pi[j + 1..]);
    let mut acc = [0.0f64; 8];
    let chunks = m / 4 * 4;
    for t in (0..chunks).step_by(4) {
        for q in 0..4 {
            let i = t + q;
            let ar = re[i] - (ur[i] * wjr - ui[i] * wji + wr[i] * ujr - wi[i] * uji);
            let ai = im[i] - (ur[i] * wji + ui[i] * wjr + wr[i] * uji + wi[i] * ujr);
            re[i] = ar;
            im[i] = ai;
            ppr[i] += ar * vjr - ai * vji;
            ppi[i] += ar * vji + ai * vjr;
            acc[2 * q] += ar * vr[i] + ai * vi[i];
            acc[2 * q + 1] += ar * vi[i] - ai * vr[i];
        }
    }
    for i in chunks..m {
        let ar = re[i] - (ur[i] * wjr - ui[i] * wji + wr[i] * ujr - wi[i] * uji);
        let ai = im[i] - (ur[i] * wji + ui[i] * wjr + wr[i] * uji + wi[i] * ujr);
        re[i] = ar;
        im[i] = ai;
        ppr[i] += ar * vjr - ai * vji;
        ppi[i] += ar * vji + ai * vjr;
        acc[0] += ar * vr[i] + ai * vi[i];
        acc[1] += ar * vi[i] - ai * vr[i];
    }
    pr[j] += djj * vjr + acc[0] + acc[2] + acc[4] + acc[6];
    pi[j] += djj * vji + acc[1] + acc[3] + acc[5] + acc[7];
}

/// Eigenvalues of the symmetric tridiagonal matrix (d, e), ascending.
pub fn tridiagonal_eigenvalues(mut d: Vec<f64>, off: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Ok(d);
    }
    assert_eq!(off.len() + 1, n, "off-diagonal length must be n - 1");
    let mut e = off.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n && e[m].abs() > f64::EPSILON * (d[m].abs() + d[m + 1].abs()) {
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::Divergence { terms: sweeps });
            }
            // Wilkinson-type shift from the leading 2x2 block
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut split = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    split = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if !split {
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Ascending eigenvalues of a Hermitian matrix given by its lower triangle.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let (d, e) = tridiagonalize(m);
    tridiagonal_eigenvalues(d, &e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn random_hermitian(n: usize, seed: u64) -> DMatrix<Complex64> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut g = |_: usize, _: usize| -> Complex64 {
            Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
        };
        let x = DMatrix::from_fn(n, n, &mut g);
        (&x + x.adjoint()) * Complex64::new(0.5, 0.0)
    }

    #[test]
    fn small_cases() {
        assert!(hermitian_eigenvalues(&DMatrix::<Complex64>::zeros(0, 0)).unwrap().is_empty());
        let one = DMatrix::from_element(1, 1, Complex64::new(-2.5, 0.0));
        assert_eq!(hermitian_eigenvalues(&one).unwrap(), vec![-2.5]);
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0), Complex64::new(2.0, 0.0)],
        );
        let ev = hermitian_eigenvalues(&m).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-15 && (ev[1] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn tridiagonal_second_difference() {
        // eigenvalues 2 - 2 cos(k pi / (n + 1))
        let n = 50;
        let ev = tridiagonal_eigenvalues(vec![2.0; n], &vec![-1.0; n - 1]).unwrap();
        for (k, v) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-13, "{k}: {v} {exact}");
        }
    }

    #[test]
    fn matches_nalgebra_symmetric_eigen() {
        for (n, seed) in [(3, 1), (17, 2), (64, 3)] {
            let m = random_hermitian(n, seed);
            let ours = hermitian_eigenvalues(&m).unwrap();
            let mut theirs: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
            theirs.sort_by(f64::total_cmp);
            let scale = theirs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            for (a, b) in ours.iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-12 * scale, "{n}: {a} {b}");
            }
        }
    }

    #[test]
    fn already_tridiagonal_and_diagonal_inputs() {
        let mut m = DMatrix::<Complex64>::zeros(4, 4);
        for i in 0..4 {
            m[(i, i)] = Complex64::new(i as f64, 0.0);
        }
        assert_eq!(hermitian_eigenvalues(&m).unwrap(), vec![0.0, 1.0, 2.0, 3.0]);
        m[(1, 0)] = Complex64::new(0.0, 1.0);
        m[(0, 1)] = Complex64::new(0.0, -1.0);
        let ev = hermitian_eigenvalues(&m).unwrap();
        let s5 = 5f64.sqrt();
        assert!((ev[0] - (1.0 - s5) / 2.0).abs() < 1e-14 && (ev[1] - (1.0 + s5) / 2.0).abs() < 1e-14);
        assert_eq!(&ev[2..], &[2.0, 3.0]);
    }

    #[test]
    fn backward_error_by_inverse_iteration() {
        let n = 40;
        let m = random_hermitian(n, 9);
        let ev = hermitian_eigenvalues(&m).unwrap();
        let norm = m.norm();
        for &lam in ev.iter().step_by(4) {
            // inverse iteration from a fixed start, shifted slightly off lambda
            let shifted = &m - DMatrix::<Complex64>::identity(n, n) * Complex64::new(lam + 1e-10 * norm, 0.0);
            let lu = shifted.lu();
            let mut v = nalgebra::DVector::from_element(n, Complex64::new(1.0, 0.5));
            for _ in 0..3 {
                v = lu.solve(&v).unwrap();
                v /= Complex64::new(v.norm(), 0.0);
            }
            let res = (&m * &v - &v * Complex64::new(lam, 0.0)).norm();
            assert!(res <= 1e-10 * norm, "{lam}: {res}");
        }
    }
}
