use std::collections::BTreeMap;
use std::path::PathBuf;

use artmetrics::catalog::{
    classify_topic, load_records, price_distribution, AuctionRecord, TopicKeywords, TopicLabel,
    DEFAULT_PRICE_EDGES,
};
use clap::Args;

use crate::pipeline::FeatureTable;
use crate::UsageError;

#[derive(Args)]
pub struct ReportArgs {
    /// Auction records CSV.
    #[arg(long)]
    pub records: PathBuf,
    /// Report to produce.
    #[arg(long, value_enum)]
    pub kind: ReportKind,
    /// Image feature CSV; required for topic-stats and style-stats.
    #[arg(long)]
    pub features: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
pub enum ReportKind {
    /// Price bucket counts and shares.
    PriceDist,
    /// Per-topic descriptive statistics of e_g.
    TopicStats,
    /// Top-10-style descriptive statistics of e_g.
    StyleStats,
}

pub fn run(args: ReportArgs) -> anyhow::Result<()> {
    let records = load_records(&args.records)?;
    match args.kind {
        ReportKind::PriceDist => price_dist(&records),
        ReportKind::TopicStats => topic_stats(&records, &require_features(&args)?),
        ReportKind::StyleStats => style_stats(&records, &require_features(&args)?),
    }
    Ok(())
}

fn require_features(args: &ReportArgs) -> anyhow::Result<FeatureTable> {
    let Some(path) = &args.features else {
        return Err(UsageError(format!(
            "--features is required for {} reports",
            match args.kind {
                ReportKind::TopicStats => "topic-stats",
                _ => "style-stats",
            }
        ))
        .into());
    };
    FeatureTable::load(path)
}

fn price_dist(records: &[AuctionRecord]) {
    let buckets = price_distribution(records, &DEFAULT_PRICE_EDGES);
    println!("{:<24} {:>10} {:>12}", "Price", "N", "Percentage");
    for b in &buckets {
        let range = match b.upper {
            Some(hi) => format!("[{}, {})", fmt_edge(b.lower), fmt_edge(hi)),
            None => format!("[{}, inf)", fmt_edge(b.lower)),
        };
        println!("{:<24} {:>10} {:>11.2}%", range, b.count, b.share_pct);
    }
    let total: usize = buckets.iter().map(|b| b.count).sum();
    let pct: f64 = buckets.iter().map(|b| b.share_pct).sum();
    println!("{:<24} {:>10} {:>11.2}%", "Total", total, pct);
}

fn fmt_edge(edge: f64) -> String {
    // The default edges are whole dollar amounts; print them plain.
    if edge.fract() == 0.0 && edge >= 0.0 && edge < 1e15 {
        format!("{}", edge as u64)
    } else {
        format!("{edge}")
    }
}

fn topic_stats(records: &[AuctionRecord], features: &FeatureTable) {
    let table = TopicKeywords::default();
    let mut groups: BTreeMap<TopicLabel, Vec<f64>> = BTreeMap::new();
    for rec in records {
        let Some((e_g, _, _)) = features.get(&rec.lot_id) else { continue };
        let topic = classify_topic(rec.title.as_deref().unwrap_or(""), &table);
        groups.entry(topic).or_default().push(e_g);
    }
    print_stats_header("Topic");
    let mut all = Vec::new();
    for topic in TopicLabel::CONTENT {
        let values = groups.get(&topic).map(Vec::as_slice).unwrap_or(&[]);
        print_stats_row(topic.name(), values);
        all.extend_from_slice(values);
    }
    print_stats_row("Total", &all);
}

fn style_stats(records: &[AuctionRecord], features: &FeatureTable) {
    let mut groups: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for rec in records {
        let Some((e_g, _, _)) = features.get(&rec.lot_id) else { continue };
        let Some(style) = rec.style.as_deref() else { continue };
        groups.entry(style).or_default().push(e_g);
    }
    let mut ranked: Vec<(&str, Vec<f64>)> = groups.into_iter().collect();
    ranked.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(b.0)));

    print_stats_header("Style");
    let all: Vec<f64> = ranked.iter().flat_map(|(_, v)| v.iter().copied()).collect();
    for (style, values) in ranked.iter().take(10) {
        print_stats_row(style, values);
    }
    print_stats_row("Total", &all);
}

fn print_stats_header(label: &str) {
    println!(
        "{:<16} {:>8} {:>9} {:>9} {:>9} {:>9}",
        label, "N", "Mean", "Sd", "Min", "Max"
    );
}

fn print_stats_row(label: &str, values: &[f64]) {
    let n = values.len();
    if n == 0 {
        println!("{:<16} {:>8} {:>9} {:>9} {:>9} {:>9}", label, 0, "NA", "NA", "NA", "NA");
        return;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let sd_text = if n < 2 {
        "NA".to_string()
    } else {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        format!("{:.3}", (ss / (n as f64 - 1.0)).sqrt())
    };
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    println!(
        "{label:<16} {n:>8} {mean:>9.3} {sd_text:>9} {min:>9.3} {max:>9.3}"
    );
}
