use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context};
use artmetrics::catalog::TopicLabel;
use artmetrics::hedonic::{fit_model, CategoricalField, DummyGroup, FeatureRow, ModelSpec, Term};
use clap::Args;

use crate::pipeline;

#[derive(Args)]
pub struct FitArgs {
    /// Auction records CSV.
    #[arg(long)]
    pub records: PathBuf,
    /// Image feature CSV from `extract`.
    #[arg(long)]
    pub features: PathBuf,
    /// Exchange-rate and CPI table CSV.
    #[arg(long)]
    pub rates: PathBuf,
    /// Preset 1-5 (parentheses allowed) or a JSON model file.
    #[arg(long)]
    pub spec: String,
    /// JSON output path; a text table lands next to it as .txt.
    #[arg(long)]
    pub out: PathBuf,
    /// Skip the top-artist and medium-exclusion sample filters.
    #[arg(long)]
    pub no_filter: bool,
    /// Highest tolerated number of records without feature rows.
    #[arg(long, default_value_t = 0)]
    pub max_unmatched: usize,
}

/// On-disk custom model description.
#[derive(serde::Deserialize)]
struct SpecFile {
    terms: Vec<String>,
    #[serde(default)]
    dummies: Vec<String>,
    #[serde(default)]
    include_topic: bool,
    #[serde(default)]
    include_style: bool,
    /// Optional reference level per dummy field.
    #[serde(default)]
    references: HashMap<String, String>,
}

/// Resolves `--spec`: a bare or parenthesized preset number, otherwise a
/// path to a [`SpecFile`].
pub fn parse_spec(s: &str) -> anyhow::Result<ModelSpec> {
    let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
    if let Ok(n) = trimmed.parse::<u8>() {
        return ModelSpec::preset(n).ok_or_else(|| {
            crate::UsageError(format!("no preset specification {n}; presets are 1-5")).into()
        });
    }
    let text = fs::read_to_string(s).with_context(|| format!("reading model spec file {s}"))?;
    let file: SpecFile =
        serde_json::from_str(&text).with_context(|| format!("parsing model spec file {s}"))?;
    if file.terms.is_empty() {
        bail!("model spec file {s} lists no terms");
    }
    let mut terms = Vec::with_capacity(file.terms.len());
    for t in &file.terms {
        terms.push(Term::parse(t)?);
    }
    let mut dummy_groups = Vec::with_capacity(file.dummies.len());
    for d in &file.dummies {
        let field: CategoricalField = d.parse().map_err(anyhow::Error::msg)?;
        dummy_groups.push(match file.references.get(d) {
            Some(level) => DummyGroup::with_reference(field, level.clone()),
            None => DummyGroup::new(field),
        });
    }
    Ok(ModelSpec {
        terms,
        dummy_groups,
        include_topic: file.include_topic,
        include_style: file.include_style,
    })
}

/// Drops rows a topic- or style-controlled design cannot use: untitled or
/// unclassifiable titles under topic dummies, style-less records under
/// style dummies.
pub fn restrict_rows(rows: Vec<FeatureRow<f64>>, spec: &ModelSpec) -> Vec<FeatureRow<f64>> {
    rows.into_iter()
        .filter(|r| {
            if spec.include_topic && matches!(r.topic, TopicLabel::Untitled | TopicLabel::Unknown)
            {
                return false;
            }
            !(spec.include_style && r.style.is_none())
        })
        .collect()
}

pub fn run(args: FitArgs) -> anyhow::Result<()> {
    let spec = parse_spec(&args.spec)?;
    let rows = pipeline::prepare_rows(
        &args.records,
        &args.features,
        &args.rates,
        args.no_filter,
        args.max_unmatched,
    )?;
    let rows = restrict_rows(rows, &spec);
    let summary = fit_model(&rows, &spec)?;

    let json = serde_json::to_string_pretty(&summary)?;
    fs::write(&args.out, json).with_context(|| format!("writing {}", args.out.display()))?;
    let table = summary.to_text_table();
    let txt_path = args.out.with_extension("txt");
    fs::write(&txt_path, &table).with_context(|| format!("writing {}", txt_path.display()))?;
    print!("{table}");
    Ok(())
}
