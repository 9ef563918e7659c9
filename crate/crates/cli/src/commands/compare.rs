use std::fs;
use std::path::PathBuf;

use anyhow::Context;
use artmetrics::hedonic::{compare_fit_add, compare_fit_drop, ComparisonReport, ModelSpec, Term};
use clap::Args;

use crate::pipeline;

#[derive(Args)]
pub struct CompareArgs {
    /// Auction records CSV.
    #[arg(long)]
    pub records: PathBuf,
    /// Image feature CSV from `extract`.
    #[arg(long)]
    pub features: PathBuf,
    /// Exchange-rate and CPI table CSV.
    #[arg(long)]
    pub rates: PathBuf,
    /// Comma-separated candidate terms to add to and drop from the
    /// benchmark model.
    #[arg(long, value_delimiter = ',', default_value = "e_g,signed,dated")]
    pub vars: Vec<String>,
    /// Optional JSON output path holding both panels.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Skip the top-artist and medium-exclusion sample filters.
    #[arg(long)]
    pub no_filter: bool,
    /// Highest tolerated number of records without feature rows.
    #[arg(long, default_value_t = 0)]
    pub max_unmatched: usize,
}

#[derive(serde::Serialize)]
struct BothPanels {
    add: ComparisonReport<f64>,
    drop: ComparisonReport<f64>,
}

pub fn run(args: CompareArgs) -> anyhow::Result<()> {
    let mut candidates = Vec::with_capacity(args.vars.len());
    for v in &args.vars {
        let term = Term::parse(v)
            .map_err(|e| crate::UsageError(format!("--vars entry {v:?}: {e}")))?;
        candidates.push(term);
    }
    let rows = pipeline::prepare_rows(
        &args.records,
        &args.features,
        &args.rates,
        args.no_filter,
        args.max_unmatched,
    )?;

    // The full model is the entropy benchmark extended with any candidate
    // it does not already carry; the base model is the full one without
    // the candidates.
    let mut full = ModelSpec::preset(2).expect("preset 2 exists");
    for cand in &candidates {
        if !full.terms.iter().any(|t| t.name == cand.name) {
            full.terms.push(cand.clone());
        }
    }
    let mut base = full.clone();
    base.terms.retain(|t| !candidates.iter().any(|c| c.name == t.name));

    let add = compare_fit_add(&rows, &base, &candidates)?;
    let drop = compare_fit_drop(&rows, &full, &candidates)?;

    if let Some(out) = &args.out {
        let json = serde_json::to_string_pretty(&BothPanels {
            add: add.clone(),
            drop: drop.clone(),
        })?;
        fs::write(out, json).with_context(|| format!("writing {}", out.display()))?;
    }

    print!("{}", add.to_text());
    println!();
    print!("{}", drop.to_text());
    Ok(())
}
