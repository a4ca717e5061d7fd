use std::sync::Arc;

use anyhow::Result;
use clap::Args;
use hardedge::kernels::{
    airy_kernel_cd, airy_kernel_contour, build_kernel, eval_grid, grid_to_csv, perturb_kernel, GridPoint, Kernel,
    KernelParams, PerturbedKernelSpec,
};
use hardedge::quadrature::QuadratureSpec;
use hardedge::Error;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::parse_grid;
use crate::manifest::Recorder;

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelArgs {
    /// bessel, airy, ginibre, ginibre-finite, trunc, mb, mb-series or lue
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub nu: Option<Vec<u32>>,
    /// Truncation offsets l_k - n for k in J
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub mu: Option<Vec<f64>>,
    /// MB contour ray angle
    #[arg(long)]
    pub delta: Option<f64>,
    /// Matrix size for the finite-n kernels
    #[arg(long)]
    pub n: Option<usize>,
    /// Gaussian deformation width; 0 evaluates the kernel itself
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Airy representation: cd, contour or both
    #[arg(long)]
    pub form: Option<String>,
    /// x values as lo:hi:count
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// y values as lo:hi:count (default: the x grid)
    #[arg(long, allow_hyphen_values = true)]
    pub ygrid: Option<String>,
    /// Only the pairs x = y of the grid
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub diagonal: Option<bool>,
}

impl KernelArgs {
    fn resolve(mut self) -> Result<Self> {
        let name = self.name.clone().ok_or_else(|| Error::Config("--name is required".into()))?;
        if self.grid.is_none() {
            return Err(Error::Config("--grid is required".into()).into());
        }
        self.alpha.get_or_insert(0.0);
        self.theta.get_or_insert(1.0);
        self.nu.get_or_insert_with(Vec::new);
        self.mu.get_or_insert_with(Vec::new);
        self.sigma.get_or_insert(0.0);
        self.diagonal.get_or_insert(false);
        let form = self.form.get_or_insert_with(|| "cd".into()).clone();
        if !["cd", "contour", "both"].contains(&form.as_str()) {
            return Err(Error::Config(format!("unknown form '{form}'")).into());
        }
        if form != "cd" && (name != "airy" || self.sigma != Some(0.0)) {
            return Err(Error::Config("--form applies to the unperturbed airy kernel only".into()).into());
        }
        if self.ygrid.is_none() {
            self.ygrid = self.grid.clone();
        }
        Ok(self)
    }
}

fn evaluate<F>(xs: &[f64], ys: &[f64], diagonal: bool, f: F) -> Result<Vec<GridPoint>>
where
    F: Fn(f64, f64) -> hardedge::Result<(Complex64, f64)> + Sync,
{
    if diagonal {
        Ok(eval_grid(xs, &[0.0], |x, _| f(x, x))?.into_iter().map(|p| GridPoint { y: p.x, ..p }).collect())
    } else {
        Ok(eval_grid(xs, ys, f)?)
    }
}

pub fn run(args: KernelArgs, rec: &mut Recorder) -> Result<KernelArgs> {
    let args = args.resolve()?;
    let name = args.name.clone().unwrap();
    let xs = parse_grid(args.grid.as_deref().unwrap())?;
    let ys = parse_grid(args.ygrid.as_deref().unwrap())?;
    let diagonal = args.diagonal.unwrap();
    if diagonal && xs != ys {
        return Err(Error::Config("--diagonal needs ygrid equal to grid".into()).into());
    }
    let sigma = args.sigma.unwrap();
    if !(sigma >= 0.0) {
        return Err(Error::Config(format!("sigma must be nonnegative, got {sigma}")).into());
    }
    let params = KernelParams {
        alpha: args.alpha.unwrap(),
        theta: args.theta.unwrap(),
        nu: args.nu.clone().unwrap(),
        mu: args.mu.clone().unwrap(),
        delta: args.delta,
        n: args.n,
    };
    let kernel: Arc<dyn Kernel> = Arc::from(build_kernel(&name, &params)?);
    let c = |v: f64| Complex64::new(v, 0.0);

    match args.form.as_deref().unwrap() {
        "cd" if sigma == 0.0 => {
            let pts = evaluate(&xs, &ys, diagonal, |x, y| Ok((kernel.eval(c(x), y)?, 0.0)))?;
            rec.write(&format!("kernel_{name}.csv"), &grid_to_csv(&pts))?;
            println!("kernel_{name}.csv: {} points", pts.len());
        }
        "cd" => {
            let spec = PerturbedKernelSpec::new(kernel.clone(), sigma)?;
            let pts = evaluate(&xs, &ys, diagonal, |x, y| {
                let v = perturb_kernel(&spec, c(x), c(y))?;
                Ok((v.value, v.err))
            })?;
            let file = format!("kernel_{name}_sigma{}.csv", sigma.to_string().replace('.', "p"));
            rec.write(&file, &grid_to_csv(&pts))?;
            println!("{file}: {} points", pts.len());
        }
        form => {
            let q = QuadratureSpec::default();
            let contour = |x: f64, y: f64| airy_kernel_contour(c(x), c(y), &q).map(|v| (v.value, v.err));
            let cd = |x: f64, y: f64| Ok((c(airy_kernel_cd(x, y)), 0.0));
            let a = evaluate(&xs, &ys, diagonal, cd)?;
            let b = evaluate(&xs, &ys, diagonal, contour)?;
            if form != "contour" {
                rec.write("kernel_airy_cd.csv", &grid_to_csv(&a))?;
            }
            rec.write("kernel_airy_contour.csv", &grid_to_csv(&b))?;
            let diff = a.iter().zip(&b).map(|(p, q)| (p.value - q.value).norm()).fold(0.0, f64::max);
            println!("airy kernel on {} points: max |cd - contour| = {diff:e}", a.len());
        }
    }
    Ok(args)
}
