use std::fmt::Write as _;
use std::sync::Arc;

use anyhow::Result;
use clap::Args;
use hardedge::kernels::{
    perturb_finite_kernel, perturb_kernel, transform_quad, BesselKernel, FiniteRegime, GinibreFiniteKernel,
    GinibreLimitKernel, HardEdgeScaling, Kernel, PerturbedKernelSpec,
};
use hardedge::verify::{perturbed_lue_hard_edge, supercritical_lue_diagonal};
use hardedge::Error;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::manifest::Recorder;

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransitionArgs {
    /// wishart (alpha = 0) or ginibre
    #[arg(long)]
    pub base: Option<String>,
    /// Product indices for the ginibre base, nu_0 = 0 first
    #[arg(long, value_delimiter = ',')]
    pub nu: Option<Vec<u32>>,
    /// Any of sub, critical, super
    #[arg(long, value_delimiter = ',')]
    pub regime: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    pub ns: Option<Vec<usize>>,
    /// Hard-edge probe points u:v for the sub and critical schedules
    #[arg(long, value_delimiter = ',')]
    pub probe: Option<Vec<String>>,
    /// Airy-scale offsets x for the super-critical schedule
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub airy_x: Option<Vec<f64>>,
}

impl TransitionArgs {
    fn resolve(mut self) -> Result<Self> {
        let base = self.base.get_or_insert_with(|| "wishart".into()).clone();
        match base.as_str() {
            "wishart" => {}
            "ginibre" => {
                self.nu.get_or_insert_with(|| vec![0, 0, 0]);
            }
            other => return Err(Error::Config(format!("unknown transition base '{other}'")).into()),
        }
        let regimes = self.regime.get_or_insert_with(|| vec!["sub".into(), "critical".into()]);
        if let Some(r) = regimes.iter().find(|r| !["sub", "critical", "super"].contains(&r.as_str())) {
            return Err(Error::Config(format!("unknown regime '{r}'")).into());
        }
        self.ns.get_or_insert_with(|| vec![50, 100, 200]);
        self.probe.get_or_insert_with(|| vec!["1:1".into(), "1:2".into()]);
        self.airy_x.get_or_insert_with(|| vec![0.5, 1.0]);
        Ok(self)
    }

    fn probes(&self) -> Result<Vec<(f64, f64)>> {
        self.probe
            .as_ref()
            .unwrap()
            .iter()
            .map(|p| {
                let bad = || Error::Config(format!("probe '{p}' is not u:v"));
                let (u, v) = p.split_once(':').ok_or_else(bad)?;
                Ok((u.parse().map_err(|_| bad())?, v.parse().map_err(|_| bad())?))
            })
            .collect()
    }
}

struct Row {
    regime: &'static str,
    n: usize,
    eps: f64,
    point: (f64, f64),
    outcome: std::result::Result<(f64, f64), Error>,
}

// Numerical failures stay in their cell; anything else aborts the run.
fn cell(r: hardedge::Result<(f64, f64)>) -> Result<std::result::Result<(f64, f64), Error>> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(e) if e.exit_code() == 3 => Ok(Err(e)),
        Err(e) => Err(e.into()),
    }
}

fn ginibre_rows(args: &TransitionArgs, probes: &[(f64, f64)]) -> Result<Vec<Row>> {
    let nu = args.nu.clone().unwrap();
    let limit: Arc<dyn Kernel> = Arc::new(GinibreLimitKernel::new(&nu, None)?);
    let gamma = nu.len() as f64;
    let scaling = HardEdgeScaling { c: 1.0, gamma };
    let deformed = PerturbedKernelSpec::new(limit.clone(), 1.0)?;
    let c = |v: f64| Complex64::new(v, 0.0);
    let mut rows = Vec::new();
    for regime in args.regime.as_ref().unwrap() {
        for &n in args.ns.as_ref().unwrap() {
            let finite = GinibreFiniteKernel::new(n, &nu, None)?;
            let l = (n as f64).powf(gamma);
            let (name, eps) = match regime.as_str() {
                "sub" => ("sub", 1.0 / l),
                "critical" => ("critical", scaling.critical_eps(n, 1.0)),
                _ => {
                    let e = Error::Unsupported("no soft-edge prediction for Ginibre products".into());
                    rows.push(Row {
                        regime: "super",
                        n,
                        eps: (n as f64).powf(-0.25),
                        point: (0.0, 0.0),
                        outcome: Err(e),
                    });
                    continue;
                }
            };
            for &(u, v) in probes {
                let value = perturb_finite_kernel(n, &finite, l * eps, u, v, FiniteRegime::Direct, &transform_quad())
                    .map(|k| k.value.re);
                let target = match name {
                    "sub" => limit.eval(c(u), v).map(|k| k.re),
                    _ => perturb_kernel(&deformed, c(u), c(v)).map(|k| k.value.re),
                };
                let outcome = cell(value.and_then(|a| target.map(|b| (a, b))))?;
                rows.push(Row { regime: name, n, eps, point: (u, v), outcome });
            }
        }
    }
    Ok(rows)
}

fn wishart_rows(args: &TransitionArgs, probes: &[(f64, f64)]) -> Result<Vec<Row>> {
    let bessel = BesselKernel::new(0.0)?;
    let scaling = HardEdgeScaling { c: 4.0, gamma: 2.0 };
    let deformed = PerturbedKernelSpec::new(Arc::new(bessel), 1.0)?;
    let c = |v: f64| Complex64::new(v, 0.0);
    let mut rows = Vec::new();
    for regime in args.regime.as_ref().unwrap() {
        for &n in args.ns.as_ref().unwrap() {
            let nf = n as f64;
            match regime.as_str() {
                "super" => {
                    let eps = nf.powf(-0.25);
                    for &x in args.airy_x.as_ref().unwrap() {
                        let outcome = cell(supercritical_lue_diagonal(n, eps, x))?;
                        rows.push(Row { regime: "super", n, eps, point: (x, x), outcome });
                    }
                }
                r => {
                    let (name, eps) =
                        if r == "sub" { ("sub", nf.powi(-2)) } else { ("critical", scaling.critical_eps(n, 1.0)) };
                    for &(u, v) in probes {
                        let target = if name == "sub" {
                            bessel.eval(c(u), v).map(|k| k.re)
                        } else {
                            perturb_kernel(&deformed, c(u), c(v)).map(|k| k.value.re)
                        };
                        let value = perturbed_lue_hard_edge(n, eps, u, v);
                        let outcome = cell(value.and_then(|a| target.map(|b| (a, b))))?;
                        rows.push(Row { regime: name, n, eps, point: (u, v), outcome });
                    }
                }
            }
        }
    }
    Ok(rows)
}

pub fn run(args: TransitionArgs, rec: &mut Recorder) -> Result<TransitionArgs> {
    let args = args.resolve()?;
    let probes = args.probes()?;
    let base = args.base.clone().unwrap();
    let rows = if base == "wishart" { wishart_rows(&args, &probes)? } else { ginibre_rows(&args, &probes)? };

    let mut csv = String::from("regime,n,eps,u,v,value,target,rel_err,status\n");
    println!(
        "{:<9} {:>5} {:>11} {:>12} {:>14} {:>14} {:>10}",
        "regime", "n", "eps", "point", "value", "target", "rel err"
    );
    for r in &rows {
        let (u, v) = r.point;
        match &r.outcome {
            Ok((a, b)) => {
                let e = ((a - b) / b).abs();
                let _ = writeln!(csv, "{},{},{:?},{u:?},{v:?},{a:?},{b:?},{e:?},ok", r.regime, r.n, r.eps);
                println!(
                    "{:<9} {:>5} {:>11.4e} {:>12} {a:>14.8} {b:>14.8} {e:>10.3e}",
                    r.regime,
                    r.n,
                    r.eps,
                    format!("({u}, {v})")
                );
            }
            Err(e) => {
                let msg = e.to_string().replace(',', ";");
                let _ = writeln!(csv, "{},{},{:?},{u:?},{v:?},,,,{msg}", r.regime, r.n, r.eps);
                println!("{:<9} {:>5} {:>11.4e} {:>12} {e}", r.regime, r.n, r.eps, format!("({u}, {v})"));
            }
        }
    }
    rec.write(&format!("transition_{base}.csv"), &csv)?;
    Ok(args)
}
