use anyhow::Result;
use clap::Args;
use hardedge::ensembles::{
    accumulate_histogram, mb_min_rows, plot_file_name, sample_spectrum, Ensemble, EnsembleSpec, ProductNormalization,
};
use hardedge::Error;
use serde::{Deserialize, Serialize};

use crate::config::parse_range;
use crate::manifest::Recorder;

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleArgs {
    /// gue, wishart, ginibre, trunc or mb
    #[arg(long)]
    pub ensemble: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Wishart rectangularity or MB alpha
    #[arg(long)]
    pub alpha: Option<u32>,
    /// Product indices nu_0, ..., nu_m (nu_0 = 0)
    #[arg(long, value_delimiter = ',')]
    pub nu: Option<Vec<u32>>,
    /// Truncated unitary sizes l_1, ..., l_m
    #[arg(long, value_delimiter = ',')]
    pub ell: Option<Vec<usize>>,
    /// Ginibre factor convention: standard or wishart
    #[arg(long)]
    pub normalization: Option<String>,
    #[arg(long)]
    pub theta: Option<u32>,
    /// MB row count (default: the minimum n + (n - 1) theta + alpha)
    #[arg(long)]
    pub rows: Option<usize>,
    /// Noise levels; one plot file per value
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub draws: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Histogram range lo:hi (default: the first draw's spectrum padded by 5%)
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
}

impl SampleArgs {
    /// Fills defaults so the manifest records every parameter.
    fn resolve(mut self) -> Result<Self> {
        let kind = self.ensemble.clone().ok_or_else(|| Error::Config("--ensemble is required".into()))?;
        let n = self.n.ok_or_else(|| Error::Config("--n is required".into()))?;
        match kind.as_str() {
            "gue" => {}
            "wishart" => {
                self.alpha.get_or_insert(0);
            }
            "ginibre" => {
                self.nu.get_or_insert_with(|| vec![0, 0]);
                self.normalization.get_or_insert_with(|| "standard".into());
            }
            "trunc" => {
                if self.nu.is_none() || self.ell.is_none() {
                    return Err(Error::Config("trunc needs --nu and --ell".into()).into());
                }
            }
            "mb" => {
                let theta = *self.theta.get_or_insert(1);
                let alpha = *self.alpha.get_or_insert(0);
                if n > 0 {
                    self.rows.get_or_insert(mb_min_rows(n, theta, alpha));
                }
            }
            other => return Err(Error::Config(format!("unknown ensemble '{other}'")).into()),
        }
        self.eps.get_or_insert_with(|| vec![0.0]);
        self.bins.get_or_insert(100);
        self.draws.get_or_insert(1);
        self.seed.get_or_insert(0);
        Ok(self)
    }

    fn base(&self) -> Result<Ensemble> {
        let n = self.n.unwrap_or(0);
        Ok(match self.ensemble.as_deref().unwrap_or_default() {
            "gue" => Ensemble::Gue { n },
            "wishart" => Ensemble::Wishart { n, alpha: self.alpha.unwrap_or(0) },
            "ginibre" => Ensemble::GinibreProduct {
                n,
                nu: self.nu.clone().unwrap_or_default(),
                normalization: match self.normalization.as_deref() {
                    Some("wishart") => ProductNormalization::Wishart,
                    Some("standard") | None => ProductNormalization::Standard,
                    Some(other) => return Err(Error::Config(format!("unknown normalization '{other}'")).into()),
                },
            },
            "trunc" => Ensemble::TruncatedUnitaryProduct {
                n,
                nu: self.nu.clone().unwrap_or_default(),
                ell: self.ell.clone().unwrap_or_default(),
            },
            _ => Ensemble::MuttalibBorodin {
                n,
                theta: self.theta.unwrap_or(1),
                alpha: self.alpha.unwrap_or(0),
                rows: self.rows.unwrap_or(0),
            },
        })
    }
}

pub fn run(args: SampleArgs, rec: &mut Recorder) -> Result<SampleArgs> {
    let args = args.resolve()?;
    let base = args.base()?;
    base.validate()?;
    let (bins, draws, seed) = (args.bins.unwrap(), args.draws.unwrap(), args.seed.unwrap());
    if draws == 0 {
        return Err(Error::Config("--draws must be at least 1".into()).into());
    }
    let fixed = args.range.as_deref().map(parse_range).transpose()?;
    for &eps in args.eps.as_ref().unwrap() {
        let spec = EnsembleSpec { ensemble: base.clone().perturbed(eps), seed };
        spec.ensemble.validate()?;
        let range = match fixed {
            Some(r) => r,
            None => {
                let s = sample_spectrum(&spec, 0)?;
                let (lo, hi) = (s.eigenvalues[0], *s.eigenvalues.last().unwrap());
                let pad = 0.05 * (hi - lo).max(1e-12);
                (lo - pad, hi + pad)
            }
        };
        let hist = accumulate_histogram(&spec, draws, bins, range)?;
        let name = plot_file_name(&spec.ensemble);
        rec.write(&name, &hist.to_plot())?;
        println!(
            "{name}: {} eigenvalues from {draws} draws on [{:?}, {:?}), {} outside",
            hist.points(),
            range.0,
            range.1,
            hist.underflow + hist.overflow
        );
    }
    Ok(args)
}
