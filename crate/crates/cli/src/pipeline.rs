//! Shared ingestion: records, image features, and rates joined into
//! regression-ready rows.

use std::collections::HashMap;
use std::path::Path;

use anyhow::{bail, Context};
use artmetrics::catalog::{
    classify_topic, condense_categories, exclude_media, filter_top_artists, load_records,
    real_usd_price, AuctionRecord, CategoryField, RateTables, TopicKeywords,
    DEFAULT_MEDIUM_EXCLUSIONS,
};
use artmetrics::hedonic::FeatureRow;

/// Share of artists (by record count) retained by the default sample filter.
pub const TOP_ARTIST_FRACTION: f64 = 0.01;
/// Condensation cutoffs: levels past the top k collapse into "other".
pub const TOP_MEDIUMS: usize = 50;
pub const TOP_HOUSES: usize = 20;
pub const TOP_CITIES: usize = 20;

/// Per-lot image features keyed by lot_id: (e_g, redpct, bluepct).
pub struct FeatureTable {
    map: HashMap<String, (f64, f64, f64)>,
}

impl FeatureTable {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let mut reader = csv::Reader::from_path(path)
            .with_context(|| format!("reading feature table {}", path.display()))?;
        let headers = reader.headers()?.clone();
        let idx = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .with_context(|| format!("feature table {} lacks column {name}", path.display()))
        };
        let (lot_col, eg_col, red_col, blue_col) =
            (idx("lot_id")?, idx("e_g")?, idx("redpct")?, idx("bluepct")?);
        let mut map = HashMap::new();
        for record in reader.records() {
            let record = record?;
            let field = |col: usize| record.get(col).unwrap_or("");
            let num = |col: usize| {
                field(col)
                    .parse::<f64>()
                    .with_context(|| format!("bad number `{}` in {}", field(col), path.display()))
            };
            map.insert(field(lot_col).to_string(), (num(eg_col)?, num(red_col)?, num(blue_col)?));
        }
        Ok(FeatureTable { map })
    }

    pub fn get(&self, lot_id: &str) -> Option<(f64, f64, f64)> {
        self.map.get(lot_id).copied()
    }
}

/// Loads and joins the three inputs into [`FeatureRow`]s. Unless
/// `no_filter` is set, the top-artist and medium-exclusion filters run
/// first; medium, house, and city are always condensed. Records without a
/// feature row are tolerated up to `max_unmatched` and dropped.
pub fn prepare_rows(
    records_path: &Path,
    features_path: &Path,
    rates_path: &Path,
    no_filter: bool,
    max_unmatched: usize,
) -> anyhow::Result<Vec<FeatureRow<f64>>> {
    let mut records = load_records(records_path)?;
    if !no_filter {
        records = filter_top_artists(records, TOP_ARTIST_FRACTION);
        records = exclude_media(records, &DEFAULT_MEDIUM_EXCLUSIONS);
    }
    let rates = RateTables::from_csv_path(rates_path)?;
    let features = FeatureTable::load(features_path)?;

    let total = records.len();
    let (matched, unmatched): (Vec<AuctionRecord>, Vec<AuctionRecord>) =
        records.into_iter().partition(|r| features.get(&r.lot_id).is_some());
    if unmatched.len() > max_unmatched {
        bail!(
            "{} of {total} records have no feature row (first: {}); regenerate features or raise --max-unmatched",
            unmatched.len(),
            unmatched[0].lot_id
        );
    }
    if matched.is_empty() {
        bail!("no records matched the feature table");
    }

    let mediums = condense_categories(&matched, CategoryField::Medium, TOP_MEDIUMS);
    let houses = condense_categories(&matched, CategoryField::House, TOP_HOUSES);
    let cities = condense_categories(&matched, CategoryField::City, TOP_CITIES);
    let table = TopicKeywords::default();

    let mut rows = Vec::with_capacity(matched.len());
    for (i, rec) in matched.iter().enumerate() {
        let (e_g, redpct, bluepct) = features.get(&rec.lot_id).expect("matched above");
        let real = real_usd_price(rec, &rates)?;
        rows.push(FeatureRow {
            log_price: real.ln(),
            e_g,
            redpct,
            bluepct,
            height: rec.height_in,
            width: rec.width_in,
            signed: rec.signed,
            dated: rec.dated,
            artist: rec.artist.clone(),
            medium: mediums[i].clone(),
            house: houses[i].clone(),
            city: cities[i].clone(),
            year: rec.sale_year,
            month: rec.sale_month,
            topic: classify_topic(rec.title.as_deref().unwrap_or(""), &table),
            style: rec.style.clone(),
        });
    }
    Ok(rows)
}
