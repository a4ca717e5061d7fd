use std::fmt::Write as _;

use anyhow::Result;
use clap::Args;
use hardedge::freeconv::{
    acp_heat_flow, ks_distance, laguerre_acp, mp_physical, real_roots, EmpiricalMeasure, FreeConvolution,
};
use hardedge::Error;
use serde::{Deserialize, Serialize};

use crate::manifest::Recorder;

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FreeconvArgs {
    /// Exponent of the weight e^{-n x^k}
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Points on the density curve
    #[arg(long)]
    pub points: Option<usize>,
    /// Also compare the zeros of the heat-flowed degree-n Laguerre ACP (k = 1)
    #[arg(long)]
    pub acp: Option<usize>,
    /// CDF table resolution for the KS distance
    #[arg(long)]
    pub cdf_intervals: Option<usize>,
}

pub fn run(mut args: FreeconvArgs, rec: &mut Recorder) -> Result<FreeconvArgs> {
    let k = *args.k.get_or_insert(1);
    let eps = args.eps.ok_or_else(|| Error::Config("--eps is required".into()))?;
    let points = *args.points.get_or_insert(400);
    let intervals = *args.cdf_intervals.get_or_insert(2000);
    if !(eps > 0.0) {
        return Err(Error::Config(format!("eps must be positive, got {eps}")).into());
    }
    if args.acp.is_some() && k != 1 {
        return Err(Error::Unsupported("ACP zeros are available for k = 1 only".into()).into());
    }

    let conv = FreeConvolution::new(mp_physical(k)?, eps)?;
    let e = conv.edges;
    println!("u_left  = {:?}", e.u_left);
    println!("a_left  = {:?}", e.a_left);
    println!("u_right = {:?}", e.u_right);
    println!("b_right = {:?}", e.b_right);
    println!("c_eps   = {:?}", e.c_eps);
    println!("a_left / eps^(4/3) = {:?}", e.a_left / eps.powf(4.0 / 3.0));

    let tag = format!("freeconv_k{k}_e{}", eps.to_string().replace('.', "p").replace('-', "m"));
    let mut curve = String::new();
    for (x, d) in conv.density_curve(points)? {
        let _ = writeln!(curve, "{x:?} {d:?}");
    }
    rec.write(&format!("{tag}.dat"), &curve)?;
    rec.write(&format!("{tag}_edges.json"), &(serde_json::to_string_pretty(&e)? + "\n"))?;

    if let Some(n) = args.acp {
        let zeros = real_roots(&acp_heat_flow(&laguerre_acp(n, 0.0)?, n, eps)?, true)?;
        let table = conv.cdf_table(intervals)?;
        let d = ks_distance(&EmpiricalMeasure::new(zeros)?, |x| table.eval(x));
        println!("KS(ACP zeros, n = {n}) = {d:?}");
    }
    Ok(args)
}
