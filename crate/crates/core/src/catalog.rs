//! Auction catalog ingestion and sample preparation.
//!
//! Reads auction-record and rate CSVs, converts nominal prices to real USD,
//! applies the sample filters (top artists by record count, medium-keyword
//! exclusion), condenses sparse categorical levels into "other", classifies
//! titles into topics by keyword prefix, and tabulates price distributions.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

/// One auction lot as ingested from the records CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct AuctionRecord {
    pub lot_id: String,
    pub title: Option<String>,
    pub artist: String,
    pub medium: String,
    pub house: String,
    pub city: String,
    pub sale_year: i32,
    pub sale_month: u8,
    pub price: f64,
    pub currency: String,
    pub height_in: f64,
    pub width_in: f64,
    pub signed: bool,
    pub dated: bool,
    pub style: Option<String>,
    pub image_path: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("missing required column `{0}`")]
    MissingColumn(String),
    #[error("row {row}: {reason}")]
    MalformedRow { row: u64, reason: String },
    #[error("no exchange rate for currency `{currency}` in year {year}")]
    MissingFxRate { currency: String, year: i32 },
    #[error("no price index entry for year {year}")]
    MissingCpiRate { year: i32 },
    #[error("invalid rate table: {0}")]
    InvalidRates(String),
    #[error("invalid keyword table: {0}")]
    InvalidKeywords(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

const RECORD_COLUMNS: [&str; 16] = [
    "lot_id", "title", "artist", "medium", "house", "city", "sale_year", "sale_month",
    "price", "currency", "height_in", "width_in", "signed", "dated", "style", "image_path",
];

/// Parses the records CSV (see the column list in the crate README).
///
/// Optional text fields (title, style, image_path) read an empty string as
/// absent; booleans are 0/1. Rows that violate the record invariants are
/// rejected with their line number.
pub fn load_records(path: &Path) -> Result<Vec<AuctionRecord>, CatalogError> {
    parse_records(File::open(path)?)
}

/// Same as [`load_records`], from any reader.
pub fn parse_records(reader: impl Read) -> Result<Vec<AuctionRecord>, CatalogError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);

    let headers = rdr
        .headers()
        .map_err(|e| CatalogError::MalformedRow { row: 1, reason: e.to_string() })?
        .clone();
    let mut col = HashMap::new();
    for (i, name) in headers.iter().enumerate() {
        col.insert(name.trim().to_string(), i);
    }
    let mut idx = [0usize; 16];
    for (k, name) in RECORD_COLUMNS.iter().enumerate() {
        idx[k] = *col
            .get(*name)
            .ok_or_else(|| CatalogError::MissingColumn(name.to_string()))?;
    }

    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| CatalogError::MalformedRow {
            row: e.position().map(|p| p.line()).unwrap_or(0),
            reason: e.to_string(),
        })?;
        let row = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |k: usize| record.get(idx[k]).unwrap_or("").trim();
        let bad = |reason: String| CatalogError::MalformedRow { row, reason };

        let lot_id = field(0);
        if lot_id.is_empty() {
            return Err(bad("empty lot_id".into()));
        }
        let sale_year = parse_num::<i32>(field(6), "sale_year").map_err(&bad)?;
        let sale_month = parse_num::<u8>(field(7), "sale_month").map_err(&bad)?;
        if !(1..=12).contains(&sale_month) {
            return Err(bad(format!("sale_month {sale_month} outside 1..=12")));
        }
        let price = parse_num::<f64>(field(8), "price").map_err(&bad)?;
        if !(price > 0.0) || !price.is_finite() {
            return Err(bad(format!("price {price} must be positive")));
        }
        let currency = field(9);
        if currency.is_empty() {
            return Err(bad("empty currency".into()));
        }
        let height_in = parse_num::<f64>(field(10), "height_in").map_err(&bad)?;
        let width_in = parse_num::<f64>(field(11), "width_in").map_err(&bad)?;
        if !(height_in > 0.0 && height_in.is_finite()) {
            return Err(bad(format!("height_in {height_in} must be positive")));
        }
        if !(width_in > 0.0 && width_in.is_finite()) {
            return Err(bad(format!("width_in {width_in} must be positive")));
        }
        let signed = parse_bool01(field(12), "signed").map_err(&bad)?;
        let dated = parse_bool01(field(13), "dated").map_err(&bad)?;

        let optional = |s: &str| if s.is_empty() { None } else { Some(s.to_string()) };
        out.push(AuctionRecord {
            lot_id: lot_id.to_string(),
            title: optional(field(1)),
            artist: field(2).to_string(),
            medium: field(3).to_string(),
            house: field(4).to_string(),
            city: field(5).to_string(),
            sale_year,
            sale_month,
            price,
            currency: currency.to_string(),
            height_in,
            width_in,
            signed,
            dated,
            style: optional(field(14)),
            image_path: optional(field(15)),
        });
    }
    Ok(out)
}

fn parse_num<T: FromStr>(s: &str, name: &str) -> Result<T, String> {
    s.parse::<T>().map_err(|_| format!("cannot parse {name} from `{s}`"))
}

fn parse_bool01(s: &str, name: &str) -> Result<bool, String> {
    match s {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(format!("{name} must be 0 or 1, got `{s}`")),
    }
}

/// Exchange-rate and price-index tables.
///
/// `fx` maps (currency, year) to units per USD; `cpi` maps year to a price
/// index normalized so that the year-2000 entry is exactly 1.
#[derive(Clone, Debug, Default)]
pub struct RateTables {
    fx: HashMap<(String, i32), f64>,
    cpi: HashMap<i32, f64>,
}

impl RateTables {
    pub fn new(
        fx: HashMap<(String, i32), f64>,
        cpi: HashMap<i32, f64>,
    ) -> Result<Self, CatalogError> {
        if fx.values().chain(cpi.values()).any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(CatalogError::InvalidRates("all rates must be positive".into()));
        }
        match cpi.get(&2000) {
            Some(&v) if (v - 1.0).abs() <= 1e-12 => {}
            Some(&v) => {
                return Err(CatalogError::InvalidRates(format!(
                    "price index must be 1 in the base year 2000, got {v}"
                )))
            }
            None => {
                return Err(CatalogError::InvalidRates(
                    "price index must contain the base year 2000".into(),
                ))
            }
        }
        Ok(RateTables { fx, cpi })
    }

    /// Parses the rates CSV: `kind,currency,year,value` with kind `fx` or
    /// `cpi`; cpi rows leave the currency column empty.
    pub fn from_csv_path(path: &Path) -> Result<Self, CatalogError> {
        Self::parse(File::open(path)?)
    }

    pub fn parse(reader: impl Read) -> Result<Self, CatalogError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| CatalogError::InvalidRates(e.to_string()))?
            .clone();
        let pos = |name: &str| {
            headers
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| CatalogError::MissingColumn(name.to_string()))
        };
        let (ik, ic, iy, iv) = (pos("kind")?, pos("currency")?, pos("year")?, pos("value")?);

        let mut fx = HashMap::new();
        let mut cpi = HashMap::new();
        for record in rdr.records() {
            let record = record.map_err(|e| CatalogError::InvalidRates(e.to_string()))?;
            let row = record.position().map(|p| p.line()).unwrap_or(0);
            let get = |i: usize| record.get(i).unwrap_or("").trim();
            let year: i32 = parse_num(get(iy), "year")
                .map_err(|r| CatalogError::InvalidRates(format!("row {row}: {r}")))?;
            let value: f64 = parse_num(get(iv), "value")
                .map_err(|r| CatalogError::InvalidRates(format!("row {row}: {r}")))?;
            match get(ik) {
                "fx" => {
                    let currency = get(ic);
                    if currency.is_empty() {
                        return Err(CatalogError::InvalidRates(format!(
                            "row {row}: fx row needs a currency"
                        )));
                    }
                    fx.insert((currency.to_string(), year), value);
                }
                "cpi" => {
                    if !get(ic).is_empty() {
                        return Err(CatalogError::InvalidRates(format!(
                            "row {row}: cpi row must leave currency empty"
                        )));
                    }
                    cpi.insert(year, value);
                }
                other => {
                    return Err(CatalogError::InvalidRates(format!(
                        "row {row}: unknown kind `{other}`"
                    )))
                }
            }
        }
        RateTables::new(fx, cpi)
    }

    pub fn fx(&self, currency: &str, year: i32) -> Option<f64> {
        self.fx.get(&(currency.to_string(), year)).copied()
    }

    pub fn cpi(&self, year: i32) -> Option<f64> {
        self.cpi.get(&year).copied()
    }
}

/// Inflation-adjusted USD price: nominal / fx(currency, year) / cpi(year).
pub fn real_usd_price(rec: &AuctionRecord, rates: &RateTables) -> Result<f64, CatalogError> {
    let fx = rates.fx(&rec.currency, rec.sale_year).ok_or_else(|| {
        CatalogError::MissingFxRate { currency: rec.currency.clone(), year: rec.sale_year }
    })?;
    let cpi = rates
        .cpi(rec.sale_year)
        .ok_or(CatalogError::MissingCpiRate { year: rec.sale_year })?;
    Ok(rec.price / fx / cpi)
}

/// Keeps the records of the most-traded artists.
///
/// Artists are ranked by record count (descending); the top
/// ceil(fraction x number-of-artists) stay, and ties with the count at the
/// cutoff are all kept.
pub fn filter_top_artists(records: Vec<AuctionRecord>, fraction: f64) -> Vec<AuctionRecord> {
    assert!(fraction > 0.0 && fraction <= 1.0, "fraction must be in (0, 1]");
    if records.is_empty() {
        return records;
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for r in &records {
        *counts.entry(r.artist.as_str()).or_default() += 1;
    }
    let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));

    let keep_n = ((fraction * ranked.len() as f64).ceil() as usize).clamp(1, ranked.len());
    let cutoff = ranked[keep_n - 1].1;
    let kept: HashSet<&str> =
        ranked.iter().filter(|&&(_, c)| c >= cutoff).map(|&(a, _)| a).collect();
    let kept: HashSet<String> = kept.into_iter().map(str::to_string).collect();

    records.into_iter().filter(|r| kept.contains(&r.artist)).collect()
}

/// Medium keywords that mark non-painting artwork.
pub const DEFAULT_MEDIUM_EXCLUSIONS: [&str; 16] = [
    "bronze", "iron", "sculpture", "terracotta", "assemblage", "steel", "marble", "aluminum",
    "brass", "ceramic", "porcelain", "resin", "plaster", "metal", "plastic", "stone",
];

/// Drops records whose lowercased medium contains any keyword as a substring.
pub fn exclude_media<S: AsRef<str>>(
    records: Vec<AuctionRecord>,
    keywords: &[S],
) -> Vec<AuctionRecord> {
    assert!(!keywords.is_empty(), "keyword list must be nonempty");
    let keywords: Vec<String> =
        keywords.iter().map(|k| k.as_ref().to_lowercase()).collect();
    records
        .into_iter()
        .filter(|r| {
            let medium = r.medium.to_lowercase();
            !keywords.iter().any(|k| medium.contains(k))
        })
        .collect()
}

/// Which categorical column to condense.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CategoryField {
    Medium,
    House,
    City,
}

impl CategoryField {
    fn of<'a>(&self, r: &'a AuctionRecord) -> &'a str {
        match self {
            CategoryField::Medium => &r.medium,
            CategoryField::House => &r.house,
            CategoryField::City => &r.city,
        }
    }
}

/// Level reserved for values condensed away.
pub const OTHER_LEVEL: &str = "other";

/// Condensed level per record: the `top_k` most frequent values keep their
/// own level, everything else becomes [`OTHER_LEVEL`]. Frequency ties at the
/// cutoff rank are broken by lexicographic order of the value.
pub fn condense_categories(
    records: &[AuctionRecord],
    field: CategoryField,
    top_k: usize,
) -> Vec<String> {
    assert!(top_k >= 1, "top_k must be at least 1");
    let kept = top_values(records.iter().map(|r| field.of(r)), top_k);
    records
        .iter()
        .map(|r| {
            let v = field.of(r);
            if kept.contains(v) { v.to_string() } else { OTHER_LEVEL.to_string() }
        })
        .collect()
}

fn top_values<'a>(values: impl Iterator<Item = &'a str>, top_k: usize) -> HashSet<String> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for v in values {
        *counts.entry(v).or_default() += 1;
    }
    let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    ranked.into_iter().take(top_k).map(|(v, _)| v.to_string()).collect()
}

/// Subject-matter label assigned from the title.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
pub enum TopicLabel {
    Abstract,
    Animals,
    Landscape,
    Nude,
    People,
    Portrait,
    Religion,
    SelfPortrait,
    StillLife,
    Urban,
    Untitled,
    Unknown,
}

impl TopicLabel {
    pub const ALL: [TopicLabel; 12] = [
        TopicLabel::Abstract,
        TopicLabel::Animals,
        TopicLabel::Landscape,
        TopicLabel::Nude,
        TopicLabel::People,
        TopicLabel::Portrait,
        TopicLabel::Religion,
        TopicLabel::SelfPortrait,
        TopicLabel::StillLife,
        TopicLabel::Urban,
        TopicLabel::Untitled,
        TopicLabel::Unknown,
    ];

    /// The ten regular content topics, excluding Untitled and Unknown.
    pub const CONTENT: [TopicLabel; 10] = [
        TopicLabel::Abstract,
        TopicLabel::Animals,
        TopicLabel::Landscape,
        TopicLabel::Nude,
        TopicLabel::People,
        TopicLabel::Portrait,
        TopicLabel::Religion,
        TopicLabel::SelfPortrait,
        TopicLabel::StillLife,
        TopicLabel::Urban,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TopicLabel::Abstract => "Abstract",
            TopicLabel::Animals => "Animals",
            TopicLabel::Landscape => "Landscape",
            TopicLabel::Nude => "Nude",
            TopicLabel::People => "People",
            TopicLabel::Portrait => "Portrait",
            TopicLabel::Religion => "Religion",
            TopicLabel::SelfPortrait => "SelfPortrait",
            TopicLabel::StillLife => "StillLife",
            TopicLabel::Urban => "Urban",
            TopicLabel::Untitled => "Untitled",
            TopicLabel::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for TopicLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TopicLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let squashed: String =
            s.chars().filter(|c| c.is_alphanumeric()).collect::<String>().to_lowercase();
        TopicLabel::ALL
            .iter()
            .find(|t| t.name().to_lowercase() == squashed)
            .copied()
            .ok_or_else(|| format!("unknown topic label `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Keyword {
    body: String,
    /// A trailing `_` in the source marks a required word boundary: the
    /// title must not continue with a letter right after the match.
    boundary: bool,
}

impl Keyword {
    fn parse(token: &str) -> Option<Keyword> {
        let token = token.trim();
        let (raw, boundary) = if let Some(stripped) = token.strip_suffix("\\_") {
            (stripped, true)
        } else if let Some(stripped) = token.strip_suffix('_') {
            (stripped, true)
        } else {
            (token, false)
        };
        let body = normalize_title(raw);
        if body.is_empty() {
            None
        } else {
            Some(Keyword { body, boundary })
        }
    }
}

/// Ordered topic keyword table; the line order doubles as the tie-break
/// order for equal-length matches.
#[derive(Clone, Debug, PartialEq)]
pub struct TopicKeywords {
    entries: Vec<(TopicLabel, Vec<Keyword>)>,
}

/// Built-in keyword table, in the override-file format (one topic per line,
/// comma-separated keywords, trailing `_` for a word boundary).
const DEFAULT_KEYWORDS: &str = "\
Abstract: abstract, composition
Animals: horse, cheval, chevaux, cow_, cows, vache, cattle, cat_, cats, chat_, dog_, dogs, chien, sheep, mouton, bird, oiseau
Landscape: landscape, country landscape, coastal landscape, paysage, seascape, sea_, mer_, mountain, river, riviere, lake, lac_, valley, vallee
Nude: nude, nu_, nue_
People: people, personnage, family, famille, boy, garcon, girl, fille, man_, men_, homme, woman, women, femme, child, enfant, couple, mother, mere_, father, pere_, lady, dame
Portrait: portrait
Religion: jesus, christ_, apostle, ange_, angel, saint_, madonna, holy_, mary magdalene, annunciation, annonciation, adoration, adam and eve, adam et eve, crucifixion, last supper
SelfPortrait: self-portrait, self portrait, auto-portrait, autoportrait
StillLife: still life, nature morte, bouquet
Urban: city, ville, town, village, street, rue, market, marche, harbour, port_, paris, london, londres, new york, amsterdam, rome_, venice, venise
Untitled: untitled, sans titre
";

impl Default for TopicKeywords {
    fn default() -> Self {
        TopicKeywords::parse(DEFAULT_KEYWORDS).expect("built-in keyword table parses")
    }
}

impl TopicKeywords {
    /// Parses a keyword table: one `Topic: kw1, kw2, ...` line per topic,
    /// `#` comments and blank lines ignored. Unknown is implicit (the
    /// fallback label) and cannot carry keywords.
    pub fn parse(text: &str) -> Result<Self, CatalogError> {
        let mut entries: Vec<(TopicLabel, Vec<Keyword>)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, rest) = line.split_once(':').ok_or_else(|| {
                CatalogError::InvalidKeywords(format!(
                    "line {}: expected `Topic: kw1, kw2, ...`",
                    lineno + 1
                ))
            })?;
            let label = TopicLabel::from_str(name.trim()).map_err(|e| {
                CatalogError::InvalidKeywords(format!("line {}: {e}", lineno + 1))
            })?;
            if label == TopicLabel::Unknown {
                return Err(CatalogError::InvalidKeywords(format!(
                    "line {}: Unknown is the fallback label and cannot have keywords",
                    lineno + 1
                )));
            }
            if entries.iter().any(|(l, _)| *l == label) {
                return Err(CatalogError::InvalidKeywords(format!(
                    "line {}: duplicate topic `{label}`",
                    lineno + 1
                )));
            }
            let keywords: Vec<Keyword> = rest.split(',').filter_map(Keyword::parse).collect();
            if keywords.is_empty() {
                return Err(CatalogError::InvalidKeywords(format!(
                    "line {}: topic `{label}` has no keywords",
                    lineno + 1
                )));
            }
            entries.push((label, keywords));
        }
        if entries.is_empty() {
            return Err(CatalogError::InvalidKeywords("no topic lines found".into()));
        }
        Ok(TopicKeywords { entries })
    }

    pub fn from_path(path: &Path) -> Result<Self, CatalogError> {
        let mut text = String::new();
        File::open(path)?.read_to_string(&mut text)?;
        TopicKeywords::parse(&text)
    }
}

/// Lowercases, strips diacritics, and collapses whitespace runs.
pub fn normalize_title(title: &str) -> String {
    let mut folded = String::with_capacity(title.len());
    for c in title.to_lowercase().chars() {
        match c {
            'à' | 'á' | 'â' | 'ã' | 'ä' | 'å' => folded.push('a'),
            'ç' => folded.push('c'),
            'è' | 'é' | 'ê' | 'ë' => folded.push('e'),
            'ì' | 'í' | 'î' | 'ï' => folded.push('i'),
            'ñ' => folded.push('n'),
            'ò' | 'ó' | 'ô' | 'õ' | 'ö' | 'ø' => folded.push('o'),
            'ù' | 'ú' | 'û' | 'ü' => folded.push('u'),
            'ý' | 'ÿ' => folded.push('y'),
            'œ' => folded.push_str("oe"),
            'æ' => folded.push_str("ae"),
            _ => folded.push(c),
        }
    }
    folded.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Classifies a title by keyword prefix.
///
/// The normalized title must start with the keyword; boundary-marked
/// keywords additionally require that no letter follows the match. Among
/// all matching keywords the longest wins, with ties resolved by table
/// order. No match classifies as Unknown.
pub fn classify_topic(title: &str, table: &TopicKeywords) -> TopicLabel {
    let norm = normalize_title(title);
    let mut best: Option<(usize, TopicLabel)> = None;
    for (label, keywords) in &table.entries {
        for kw in keywords {
            if !norm.starts_with(&kw.body) {
                continue;
            }
            if kw.boundary {
                let next = norm[kw.body.len()..].chars().next();
                if next.is_some_and(char::is_alphabetic) {
                    continue;
                }
            }
            let len = kw.body.len();
            if best.map_or(true, |(blen, _)| len > blen) {
                best = Some((len, *label));
            }
        }
    }
    best.map_or(TopicLabel::Unknown, |(_, label)| label)
}

/// One row of the price-distribution table; `upper` is `None` for the open
/// top bucket. `share_pct` is in percent of all records (0 when empty).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PriceBucket {
    pub lower: f64,
    pub upper: Option<f64>,
    pub count: usize,
    pub share_pct: f64,
}

/// Bucket edges for the default seven half-open price ranges.
pub const DEFAULT_PRICE_EDGES: [f64; 6] = [100.0, 1e3, 1e4, 1e5, 1e6, 1e7];

/// Histogram of the record prices over half-open buckets
/// [0, e1), [e1, e2), ..., [e_last, infinity).
///
/// Prices are bucketed as recorded (in sale currency); convert upstream if a
/// single-currency table is wanted.
pub fn price_distribution(records: &[AuctionRecord], edges: &[f64]) -> Vec<PriceBucket> {
    assert!(!edges.is_empty(), "at least one bucket edge is required");
    assert!(
        edges.windows(2).all(|w| w[0] < w[1]) && edges[0] > 0.0 && edges.iter().all(|e| e.is_finite()),
        "edges must be ascending positive reals"
    );
    let mut counts = vec![0usize; edges.len() + 1];
    for r in records {
        let slot = edges.iter().position(|&e| r.price < e).unwrap_or(edges.len());
        counts[slot] += 1;
    }
    let total = records.len();
    counts
        .iter()
        .enumerate()
        .map(|(i, &count)| PriceBucket {
            lower: if i == 0 { 0.0 } else { edges[i - 1] },
            upper: edges.get(i).copied(),
            count,
            share_pct: if total == 0 { 0.0 } else { 100.0 * count as f64 / total as f64 },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "lot_id,title,artist,medium,house,city,sale_year,sale_month,price,currency,height_in,width_in,signed,dated,style,image_path";

    fn record(lot: &str, artist: &str, medium: &str) -> AuctionRecord {
        AuctionRecord {
            lot_id: lot.to_string(),
            title: None,
            artist: artist.to_string(),
            medium: medium.to_string(),
            house: "h".into(),
            city: "c".into(),
            sale_year: 2005,
            sale_month: 6,
            price: 100.0,
            currency: "USD".into(),
            height_in: 20.0,
            width_in: 16.0,
            signed: false,
            dated: false,
            style: None,
            image_path: None,
        }
    }

    #[test]
    fn parses_well_formed_rows() {
        let csv = format!(
            "{HEADER}\nL1,Sunset,Artist A,oil on canvas,House,Paris,2005,3,1200.5,EUR,24,18,1,0,,images/L1.png\nL2,,Artist B,gouache,House,London,2010,11,90,GBP,10,8,0,1,Cubism,\nL3,Still water,Artist A,oil,House,Paris,2001,1,55,USD,5,4,0,0,,\n"
        );
        let recs = parse_records(csv.as_bytes()).unwrap();
        assert_eq!(recs.len(), 3);
        assert_eq!(recs[0].lot_id, "L1");
        assert_eq!(recs[0].title.as_deref(), Some("Sunset"));
        assert!(recs[0].signed && !recs[0].dated);
        assert_eq!(recs[1].title, None);
        assert_eq!(recs[1].style.as_deref(), Some("Cubism"));
        assert_eq!(recs[2].image_path, None);
    }

    #[test]
    fn rejects_zero_price_with_row_number() {
        let csv = format!("{HEADER}\nL1,,A,oil,H,C,2005,3,0,USD,10,10,0,0,,\n");
        match parse_records(csv.as_bytes()) {
            Err(CatalogError::MalformedRow { row, reason }) => {
                assert_eq!(row, 2);
                assert!(reason.contains("price"), "{reason}");
            }
            other => panic!("expected MalformedRow, got {other:?}"),
        }
    }

    #[test]
    fn rejects_missing_column() {
        let csv = "lot_id,title,artist\nL1,,A\n";
        match parse_records(csv.as_bytes()) {
            Err(CatalogError::MissingColumn(c)) => assert_eq!(c, "medium"),
            other => panic!("expected MissingColumn, got {other:?}"),
        }
    }

    #[test]
    fn rejects_month_out_of_range_and_bad_booleans() {
        let csv = format!("{HEADER}\nL1,,A,oil,H,C,2005,13,10,USD,10,10,0,0,,\n");
        assert!(matches!(
            parse_records(csv.as_bytes()),
            Err(CatalogError::MalformedRow { .. })
        ));
        let csv = format!("{HEADER}\nL1,,A,oil,H,C,2005,3,10,USD,10,10,yes,0,,\n");
        assert!(matches!(
            parse_records(csv.as_bytes()),
            Err(CatalogError::MalformedRow { .. })
        ));
    }

    fn rates() -> RateTables {
        let mut fx = HashMap::new();
        fx.insert(("USD".to_string(), 2000), 1.0);
        fx.insert(("USD".to_string(), 2005), 1.0);
        fx.insert(("EUR".to_string(), 2005), 1.2);
        let mut cpi = HashMap::new();
        cpi.insert(2000, 1.0);
        cpi.insert(2005, 1.1);
        RateTables::new(fx, cpi).unwrap()
    }

    #[test]
    fn real_price_base_year_identity() {
        let mut rec = record("L1", "A", "oil");
        rec.sale_year = 2000;
        assert_eq!(real_usd_price(&rec, &rates()).unwrap(), 100.0);
    }

    #[test]
    fn real_price_divides_fx_then_cpi() {
        let mut rec = record("L1", "A", "oil");
        rec.price = 1000.0;
        rec.currency = "EUR".into();
        let got = real_usd_price(&rec, &rates()).unwrap();
        assert!((got - 757.5757575757575).abs() < 1e-12);
    }

    #[test]
    fn missing_rates_are_reported() {
        let mut rec = record("L1", "A", "oil");
        rec.currency = "JPY".into();
        assert!(matches!(
            real_usd_price(&rec, &rates()),
            Err(CatalogError::MissingFxRate { .. })
        ));
        let mut rec = record("L1", "A", "oil");
        rec.sale_year = 1999; // no fx for that year either, so add one
        let mut fx = HashMap::new();
        fx.insert(("USD".to_string(), 1999), 1.0);
        let mut cpi = HashMap::new();
        cpi.insert(2000, 1.0);
        let tables = RateTables::new(fx, cpi).unwrap();
        assert!(matches!(
            real_usd_price(&rec, &tables),
            Err(CatalogError::MissingCpiRate { year: 1999 })
        ));
    }

    #[test]
    fn rate_tables_enforce_base_year() {
        let mut cpi = HashMap::new();
        cpi.insert(2001, 1.02);
        assert!(matches!(
            RateTables::new(HashMap::new(), cpi),
            Err(CatalogError::InvalidRates(_))
        ));
        let mut cpi = HashMap::new();
        cpi.insert(2000, 1.5);
        assert!(matches!(
            RateTables::new(HashMap::new(), cpi),
            Err(CatalogError::InvalidRates(_))
        ));
    }

    #[test]
    fn rates_csv_round_trip() {
        let csv = "kind,currency,year,value\nfx,USD,2005,1\nfx,EUR,2005,1.2\ncpi,,2000,1\ncpi,,2005,1.1\n";
        let t = RateTables::parse(csv.as_bytes()).unwrap();
        assert_eq!(t.fx("EUR", 2005), Some(1.2));
        assert_eq!(t.cpi(2005), Some(1.1));
        // fx rows without currency and unknown kinds are rejected.
        assert!(RateTables::parse("kind,currency,year,value\nfx,,2005,1\ncpi,,2000,1\n".as_bytes()).is_err());
        assert!(RateTables::parse("kind,currency,year,value\nxyz,USD,2005,1\ncpi,,2000,1\n".as_bytes()).is_err());
    }

    #[test]
    fn top_artists_crafted_counts() {
        // A:5, B:3, C:1 with fraction 0.34 -> ceil(1.02) = 2 -> A and B.
        let mut recs = Vec::new();
        for i in 0..5 {
            recs.push(record(&format!("a{i}"), "A", "oil"));
        }
        for i in 0..3 {
            recs.push(record(&format!("b{i}"), "B", "oil"));
        }
        recs.push(record("c0", "C", "oil"));
        let kept = filter_top_artists(recs, 0.34);
        assert_eq!(kept.len(), 8);
        assert!(kept.iter().all(|r| r.artist != "C"));
    }

    #[test]
    fn top_artists_ties_at_cutoff_are_kept() {
        // A:2, B:2, C:1; fraction 0.34 -> keep 1 -> cutoff count 2 -> A and B.
        let recs = vec![
            record("1", "A", "oil"),
            record("2", "A", "oil"),
            record("3", "B", "oil"),
            record("4", "B", "oil"),
            record("5", "C", "oil"),
        ];
        let kept = filter_top_artists(recs, 0.34);
        assert_eq!(kept.len(), 4);
    }

    #[test]
    fn top_artists_fraction_one_keeps_everything() {
        let recs = vec![record("1", "A", "oil"), record("2", "B", "oil")];
        assert_eq!(filter_top_artists(recs, 1.0).len(), 2);
    }

    #[test]
    fn single_artist_survives_any_fraction() {
        let recs = vec![record("1", "A", "oil")];
        assert_eq!(filter_top_artists(recs, 0.01).len(), 1);
    }

    #[test]
    fn media_exclusion_is_case_insensitive_substring() {
        let recs = vec![
            record("1", "A", "bronze sculpture"),
            record("2", "A", "oil on canvas"),
            record("3", "A", "Cast Iron relief"),
            record("4", "A", "oil on bronze plate"),
        ];
        let kept = exclude_media(recs, &DEFAULT_MEDIUM_EXCLUSIONS);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].lot_id, "2");
    }

    #[test]
    fn condense_keeps_top_k_and_breaks_ties_lexicographically() {
        // counts: oil 3, gouache 2, acrylic 2, tempera 1; top_k = 2 keeps
        // oil plus the lexicographically smaller of the tied pair (acrylic).
        let recs = vec![
            record("1", "A", "oil"),
            record("2", "A", "oil"),
            record("3", "A", "oil"),
            record("4", "A", "gouache"),
            record("5", "A", "gouache"),
            record("6", "A", "acrylic"),
            record("7", "A", "acrylic"),
            record("8", "A", "tempera"),
        ];
        let levels = condense_categories(&recs, CategoryField::Medium, 2);
        assert_eq!(
            levels,
            vec!["oil", "oil", "oil", "other", "other", "acrylic", "acrylic", "other"]
        );
    }

    #[test]
    fn condense_with_generous_top_k_keeps_all_levels() {
        let recs =
            vec![record("1", "A", "oil"), record("2", "A", "gouache"), record("3", "A", "oil")];
        let levels = condense_categories(&recs, CategoryField::Medium, 5);
        assert!(!levels.contains(&OTHER_LEVEL.to_string()));
    }

    #[test]
    fn classify_examples() {
        let table = TopicKeywords::default();
        let check = |title: &str, want: TopicLabel| {
            assert_eq!(classify_topic(title, &table), want, "title: {title}");
        };
        check("Composition VII", TopicLabel::Abstract);
        check("Nature morte aux fleurs", TopicLabel::StillLife);
        check("Sans titre", TopicLabel::Untitled);
        check("Meditation at dawn", TopicLabel::Unknown);
        check("Cathedral at dusk", TopicLabel::Unknown); // cat_ boundary blocks "cathedral"
        check("Cats in the garden", TopicLabel::Animals);
        check("Cat", TopicLabel::Animals); // boundary at end of string
        check("Self portrait with hat", TopicLabel::SelfPortrait);
        check("Portrait of a lady", TopicLabel::Portrait);
        check("Nu assis", TopicLabel::Nude);
        check("Nuages au soleil", TopicLabel::Unknown); // nu_ boundary blocks "nuages"
        check("PAYSAGE  D'HIVER", TopicLabel::Landscape);
        check("Marché aux fleurs", TopicLabel::Urban); // diacritic folded
        check("", TopicLabel::Unknown);
    }

    #[test]
    fn classify_prefers_longer_match() {
        let table = TopicKeywords::default();
        // "country landscape ..." matches both "country landscape" (Landscape)
        // and nothing longer; plain "landscape" only matches at the start, so
        // this exercises the multi-word keyword.
        assert_eq!(
            classify_topic("Country landscape with figures", &table),
            TopicLabel::Landscape
        );
    }

    #[test]
    fn keyword_override_parsing() {
        let table = TopicKeywords::parse("Animals: llama\nUrban: metropolis\n").unwrap();
        assert_eq!(classify_topic("Llama in the Andes", &table), TopicLabel::Animals);
        assert_eq!(classify_topic("Composition VII", &table), TopicLabel::Unknown);

        // Escaped and plain boundary markers are equivalent.
        let a = TopicKeywords::parse("Animals: cat\\_\n").unwrap();
        let b = TopicKeywords::parse("Animals: cat_\n").unwrap();
        assert_eq!(a, b);

        assert!(TopicKeywords::parse("Unknown: something\n").is_err());
        assert!(TopicKeywords::parse("Nonsense: kw\n").is_err());
        assert!(TopicKeywords::parse("Animals\n").is_err());
        assert!(TopicKeywords::parse("").is_err());
        assert!(TopicKeywords::parse("Animals: ,\n").is_err());
        assert!(TopicKeywords::parse("Animals: cat_\nAnimals: dog_\n").is_err());
    }

    #[test]
    fn normalization_folds_case_diacritics_whitespace() {
        assert_eq!(normalize_title("  Marché\taux   Fleurs "), "marche aux fleurs");
        assert_eq!(normalize_title("ŒUVRE à l'huile"), "oeuvre a l'huile");
    }

    #[test]
    fn price_buckets_direct_membership() {
        let mut recs = Vec::new();
        for (i, p) in [(1, 50.0), (2, 500.0), (3, 5e6)] {
            let mut r = record(&i.to_string(), "A", "oil");
            r.price = p;
            recs.push(r);
        }
        let buckets = price_distribution(&recs, &DEFAULT_PRICE_EDGES);
        assert_eq!(buckets.len(), 7);
        let counts: Vec<usize> = buckets.iter().map(|b| b.count).collect();
        assert_eq!(counts, vec![1, 1, 0, 0, 0, 1, 0]);
        assert_eq!(buckets[0].lower, 0.0);
        assert_eq!(buckets[0].upper, Some(100.0));
        assert_eq!(buckets[6].upper, None);
    }

    #[test]
    fn price_buckets_empty_input() {
        let buckets = price_distribution(&[], &DEFAULT_PRICE_EDGES);
        assert!(buckets.iter().all(|b| b.count == 0 && b.share_pct == 0.0));
    }

    #[test]
    fn topic_label_round_trips_from_loose_names() {
        assert_eq!("self-portrait".parse::<TopicLabel>().unwrap(), TopicLabel::SelfPortrait);
        assert_eq!("Still life".parse::<TopicLabel>().unwrap(), TopicLabel::StillLife);
        assert_eq!("URBAN".parse::<TopicLabel>().unwrap(), TopicLabel::Urban);
        assert!("statue".parse::<TopicLabel>().is_err());
    }
}
