use anyhow::Result;
use clap::Args;
use hardedge::verify::{select, CriterionReport, DEFAULT_SEED};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyArgs {
    /// Criterion names or numbers to run (default: all)
    #[arg(long, value_delimiter = ',')]
    pub only: Option<Vec<String>>,
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn run(mut args: VerifyArgs) -> Result<(VerifyArgs, Vec<CriterionReport>)> {
    let seed = *args.seed.get_or_insert(DEFAULT_SEED);
    let only = args.only.get_or_insert_with(Vec::new).clone();
    let mut reports = Vec::new();
    for c in select(&only)? {
        let r = c.run(seed);
        println!("{}", r.line());
        reports.push(r);
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("{} passed, {failed} failed", reports.len() - failed);
    Ok((args, reports))
}
