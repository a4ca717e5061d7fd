//! Matrix samplers for the hard-edge models and their GUE perturbations.
//!
//! Every draw owns a ChaCha20 stream keyed by (seed, draw_index), so draws
//! can be produced in any order or on any shard and still agree bit for bit.

mod eigen;
mod histogram;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

pub use eigen::{hermitian_eigenvalues, tridiagonal_eigenvalues, tridiagonalize};
pub use histogram::{
    accumulate_histogram, accumulate_histogram_shard, hard_edge_statistics, plot_file_name, write_plot, Histogram,
};

use crate::error::{Error, Result};

/// The generator for one draw.
pub fn draw_rng(seed: u64, draw_index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(draw_index);
    rng
}

fn normal(rng: &mut ChaCha20Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// GUE with diagonal variance 1/n and off-diagonal real and imaginary parts
/// of variance 1/(2n).
pub fn sample_gue(n: usize, rng: &mut ChaCha20Rng) -> DMatrix<Complex64> {
    let sd = (1.0 / n as f64).sqrt();
    let half = (0.5 / n as f64).sqrt();
    let mut h = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        h[(j, j)] = Complex64::new(sd * normal(rng), 0.0);
        for i in j + 1..n {
            let z = Complex64::new(half * normal(rng), half * normal(rng));
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

/// Entry variance convention for complex Ginibre matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceRule {
    /// E|g|^2 = 1.
    Standard,
    /// E|g|^2 = 1/n.
    Wishart { n: usize },
}

impl VarianceRule {
    pub fn entry_variance(&self) -> f64 {
        match *self {
            VarianceRule::Standard => 1.0,
            VarianceRule::Wishart { n } => 1.0 / n as f64,
        }
    }
}

pub fn sample_ginibre(rows: usize, cols: usize, rule: VarianceRule, rng: &mut ChaCha20Rng) -> DMatrix<Complex64> {
    let sd = (0.5 * rule.entry_variance()).sqrt();
    DMatrix::from_fn(rows, cols, |_, _| Complex64::new(sd * normal(rng), sd * normal(rng)))
}

/// Haar unitary: QR of a standard Ginibre matrix with the phases of diag(R)
/// moved into Q.
pub fn sample_haar_unitary(l: usize, rng: &mut ChaCha20Rng) -> DMatrix<Complex64> {
    let qr = sample_ginibre(l, l, VarianceRule::Standard, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..l {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..l {
            q[(i, j)] *= phase;
        }
    }
    q
}

fn split(a: &DMatrix<Complex64>) -> (DMatrix<f64>, DMatrix<f64>) {
    (a.map(|z| z.re), a.map(|z| z.im))
}

fn join(re: DMatrix<f64>, im: &DMatrix<f64>) -> DMatrix<Complex64> {
    re.zip_map(im, Complex64::new)
}

// Complex products as four real ones, which run on the blocked f64 kernel.
fn complex_mul(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let ((ar, ai), (br, bi)) = (split(a), split(b));
    join(&ar * &br - &ai * &bi, &(&ar * &bi + &ai * &br))
}

/// X^* X.
pub fn gram(x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (xr, xi) = split(x);
    let (tr, ti) = (xr.transpose(), xi.transpose());
    join(&tr * &xr + &ti * &xi, &(&tr * &xi - &ti * &xr))
}

/// Row count that the Muttalib-Borodin construction needs.
pub fn mb_min_rows(n: usize, theta: u32, alpha: u32) -> usize {
    n + (n - 1) * theta as usize + alpha as usize
}

/// The m x n standard Ginibre matrix with entry (j, k) (1-based) set to zero
/// whenever j - k > theta (k - 1) + alpha.
pub fn sample_mb_matrix(n: usize, theta: u32, alpha: u32, rows: usize, rng: &mut ChaCha20Rng) -> DMatrix<Complex64> {
    let sd = 0.5f64.sqrt();
    let mut x = DMatrix::<Complex64>::zeros(rows, n);
    for k in 0..n {
        let depth = k + theta as usize * k + alpha as usize;
        for j in 0..rows.min(depth + 1) {
            x[(j, k)] = Complex64::new(sd * normal(rng), sd * normal(rng));
        }
    }
    x
}

/// Which Gram-type matrix M a draw produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Ensemble {
    Gue {
        n: usize,
    },
    /// G^* G with G of shape (n + alpha) x n, entries of variance 1/n.
    Wishart {
        n: usize,
        alpha: u32,
    },
    /// n^{-m} Y^* Y for Y = X_m ... X_1, X_j of shape (n + nu_j) x (n + nu_{j-1}).
    /// `nu` includes nu_0 = 0.
    GinibreProduct {
        n: usize,
        nu: Vec<u32>,
        normalization: ProductNormalization,
    },
    /// Y^* Y for a product of upper-left truncations of Haar unitaries of sizes `ell`.
    TruncatedUnitaryProduct {
        n: usize,
        nu: Vec<u32>,
        ell: Vec<usize>,
    },
    /// (1/n) X^* X for the zero-patterned X of `sample_mb_matrix`.
    MuttalibBorodin {
        n: usize,
        theta: u32,
        alpha: u32,
        rows: usize,
    },
    /// M + eps H with H an independent GUE draw.
    PerturbedSum {
        base: Box<Ensemble>,
        eps: f64,
    },
}

/// How the Ginibre factors of a product are normalized; both give the same
/// law for M.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductNormalization {
    /// Standard factors, product rescaled by n^{-m}.
    Standard,
    /// Factors with entry variance 1/n, no rescaling.
    Wishart,
}

impl Ensemble {
    pub fn n(&self) -> usize {
        match self {
            Ensemble::Gue { n }
            | Ensemble::Wishart { n, .. }
            | Ensemble::GinibreProduct { n, .. }
            | Ensemble::TruncatedUnitaryProduct { n, .. }
            | Ensemble::MuttalibBorodin { n, .. } => *n,
            Ensemble::PerturbedSum { base, .. } => base.n(),
        }
    }

    /// Noise level of the outermost perturbation, 0 if none.
    pub fn eps(&self) -> f64 {
        match self {
            Ensemble::PerturbedSum { eps, .. } => *eps,
            _ => 0.0,
        }
    }

    /// Short name used in plot file names.
    pub fn tag(&self) -> &'static str {
        match self {
            Ensemble::Gue { .. } => "GUE",
            Ensemble::Wishart { .. } => "LUE",
            Ensemble::GinibreProduct { .. } => "Prod_Gin",
            Ensemble::TruncatedUnitaryProduct { .. } => "Prod_Trunc",
            Ensemble::MuttalibBorodin { .. } => "MuttaBorod",
            Ensemble::PerturbedSum { base, .. } => base.tag(),
        }
    }

    /// Whether M is positive semidefinite by construction.
    pub fn is_psd(&self) -> bool {
        !matches!(self, Ensemble::Gue { .. } | Ensemble::PerturbedSum { .. })
    }

    pub fn perturbed(self, eps: f64) -> Ensemble {
        Ensemble::PerturbedSum { base: Box::new(self), eps }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n() == 0 {
            return bad("n must be at least 1".into());
        }
        match self {
            Ensemble::Gue { .. } | Ensemble::Wishart { .. } => Ok(()),
            Ensemble::GinibreProduct { nu, .. } => {
                if nu.len() < 2 || nu[0] != 0 {
                    return bad(format!("nu must list nu_0 = 0 and at least one factor, got {nu:?}"));
                }
                Ok(())
            }
            Ensemble::TruncatedUnitaryProduct { n, nu, ell } => {
                if nu.len() < 2 || nu[0] != 0 {
                    return bad(format!("nu must list nu_0 = 0 and at least one factor, got {nu:?}"));
                }
                if ell.len() != nu.len() - 1 {
                    return bad(format!(
                        "need one unitary size per factor: {} factors, {} sizes",
                        nu.len() - 1,
                        ell.len()
                    ));
                }
                for (j, &l) in ell.iter().enumerate() {
                    if l < n + nu[j + 1] as usize + 1 {
                        return bad(format!(
                            "ell_{} = {l} violates ell_j >= n + nu_j + 1 = {}",
                            j + 1,
                            n + nu[j + 1] as usize + 1
                        ));
                    }
                    if l < n + nu[j] as usize {
                        return bad(format!(
                            "ell_{} = {l} is smaller than the truncation width n + nu_{} = {}",
                            j + 1,
                            j,
                            n + nu[j] as usize
                        ));
                    }
                }
                Ok(())
            }
            Ensemble::MuttalibBorodin { n, theta, alpha, rows } => {
                if *theta == 0 {
                    return bad("theta must be a positive integer".into());
                }
                let need = mb_min_rows(*n, *theta, *alpha);
                if *rows < need {
                    return bad(format!("rows = {rows} violates m >= n + (n - 1) theta + alpha = {need}"));
                }
                Ok(())
            }
            Ensemble::PerturbedSum { base, eps } => {
                if !(*eps >= 0.0 && eps.is_finite()) {
                    return bad(format!("eps must be finite and nonnegative, got {eps}"));
                }
                base.validate()
            }
        }
    }

    /// One draw of the Hermitian matrix M.
    pub fn sample_matrix(&self, rng: &mut ChaCha20Rng) -> DMatrix<Complex64> {
        match self {
            Ensemble::Gue { n } => sample_gue(*n, rng),
            Ensemble::Wishart { n, alpha } => {
                gram(&sample_ginibre(n + *alpha as usize, *n, VarianceRule::Wishart { n: *n }, rng))
            }
            Ensemble::GinibreProduct { n, nu, normalization } => {
                let rule = match normalization {
                    ProductNormalization::Standard => VarianceRule::Standard,
                    ProductNormalization::Wishart => VarianceRule::Wishart { n: *n },
                };
                let mut y = DMatrix::<Complex64>::identity(*n, *n);
                for w in nu.windows(2) {
                    let x = sample_ginibre(n + w[1] as usize, n + w[0] as usize, rule, rng);
                    y = complex_mul(&x, &y);
                }
                let mut m = gram(&y);
                if *normalization == ProductNormalization::Standard {
                    m *= Complex64::new((*n as f64).powi(-(nu.len() as i32 - 1)), 0.0);
                }
                m
            }
            Ensemble::TruncatedUnitaryProduct { n, nu, ell } => {
                let mut y = DMatrix::<Complex64>::identity(*n, *n);
                for (w, &l) in nu.windows(2).zip(ell) {
                    let u = sample_haar_unitary(l, rng);
                    let t = u.view((0, 0), (n + w[1] as usize, n + w[0] as usize)).into_owned();
                    y = complex_mul(&t, &y);
                }
                gram(&y)
            }
            Ensemble::MuttalibBorodin { n, theta, alpha, rows } => {
                let x = sample_mb_matrix(*n, *theta, *alpha, *rows, rng);
                gram(&x) / Complex64::new(*n as f64, 0.0)
            }
            Ensemble::PerturbedSum { base, eps } => {
                let m = base.sample_matrix(rng);
                let h = sample_gue(m.nrows(), rng);
                m + h * Complex64::new(*eps, 0.0)
            }
        }
    }
}

/// An ensemble together with the seed its draws derive from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub ensemble: Ensemble,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSample {
    pub eigenvalues: Vec<f64>,
    pub spec: EnsembleSpec,
    pub draw_index: u64,
}

pub fn sample_spectrum(spec: &EnsembleSpec, draw_index: u64) -> Result<SpectralSample> {
    spec.ensemble.validate()?;
    let mut rng = draw_rng(spec.seed, draw_index);
    let m = spec.ensemble.sample_matrix(&mut rng);
    let mut eigenvalues = hermitian_eigenvalues(&m)?;
    if spec.ensemble.is_psd() {
        // rounding can leave O(eps ||M||) negatives on a PSD matrix
        let tol = 1e-10 * eigenvalues.last().map_or(0.0, |v| v.abs());
        debug_assert!(eigenvalues.iter().all(|&v| v >= -tol), "PSD sample has a negative eigenvalue");
        for v in eigenvalues.iter_mut() {
            *v = v.max(0.0);
        }
    }
    Ok(SpectralSample { eigenvalues, spec: spec.clone(), draw_index })
}
