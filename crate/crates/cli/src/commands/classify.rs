use std::path::PathBuf;

use anyhow::Context;
use artmetrics::catalog::{classify_topic, load_records, TopicKeywords};
use clap::Args;

#[derive(Args)]
pub struct ClassifyArgs {
    /// Auction records CSV.
    #[arg(long)]
    pub records: PathBuf,
    /// Output CSV path (lot_id,topic).
    #[arg(long)]
    pub out: PathBuf,
    /// Keyword table override file (`Topic: kw1, kw2, ...` lines).
    #[arg(long)]
    pub keywords: Option<PathBuf>,
}

pub fn run(args: ClassifyArgs) -> anyhow::Result<()> {
    let records = load_records(&args.records)?;
    let table = match &args.keywords {
        Some(path) => TopicKeywords::from_path(path)?,
        None => TopicKeywords::default(),
    };
    let mut writer = csv::Writer::from_path(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    writer.write_record(["lot_id", "topic"])?;
    for rec in &records {
        let title = rec.title.as_deref().unwrap_or("");
        writer.write_record([rec.lot_id.as_str(), classify_topic(title, &table).name()])?;
    }
    writer.flush()?;
    Ok(())
}
