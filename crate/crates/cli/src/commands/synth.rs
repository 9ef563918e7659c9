use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use artmetrics::image_io::GrayMatrix;
use artmetrics::infoquant::svd_entropy;
use clap::Args;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Args)]
pub struct SynthArgs {
    /// JSON generator configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (created if absent).
    #[arg(long)]
    pub out: PathBuf,
}

/// Generator configuration. `dummy_effects` keys are either the flags
/// `signed`/`dated` (applied when the flag is 1) or `field=level` pairs
/// such as `city=city-b` (applied when the record carries that level).
#[derive(Debug, serde::Deserialize)]
pub struct SynthConfig {
    pub n_records: usize,
    pub true_alpha: f64,
    #[serde(default)]
    pub dummy_effects: BTreeMap<String, f64>,
    pub noise_sd: f64,
    pub seed: u64,
    #[serde(default = "default_image_side")]
    pub image_side: usize,
}

fn default_image_side() -> usize {
    400
}

const INTERCEPT: f64 = 5.0;
const ENTROPY_TOL_BITS: f64 = 0.05;
const MAX_BISECTIONS: usize = 24;

const ARTISTS: [&str; 6] =
    ["artist-01", "artist-02", "artist-03", "artist-04", "artist-05", "artist-06"];
const MEDIUMS: [&str; 5] = [
    "oil on canvas",
    "watercolour",
    "gouache on paper",
    "acrylic on canvas",
    "tempera on panel",
];
const HOUSES: [&str; 3] = ["house-north", "house-east", "house-west"];
const CITIES: [&str; 3] = ["city-a", "city-b", "city-c"];
const YEARS: std::ops::RangeInclusive<i32> = 2004..=2013;
const STYLES: [Option<&str>; 4] = [Some("style-red"), Some("style-blue"), Some("style-green"), None];
const CURRENCIES: [&str; 2] = ["USD", "EUR"];
// One title per topic plus an untitled and an unclassifiable one, so the
// classifier and the per-topic reports see every label.
const TITLES: [&str; 12] = [
    "Composition with squares",
    "Horse in a meadow",
    "Landscape with poplars",
    "Nude on a sofa",
    "Femme au jardin",
    "Portrait of a merchant",
    "Saint John in the desert",
    "Self-portrait with hat",
    "Nature morte aux pommes",
    "Venise, le Grand Canal",
    "Untitled",
    "Evening study",
];

pub fn run(args: SynthArgs) -> anyhow::Result<()> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))?;
    let config: SynthConfig = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", args.config.display()))?;
    generate(&config, &args.out)
}

pub fn generate(config: &SynthConfig, out: &Path) -> anyhow::Result<()> {
    if config.n_records == 0 {
        bail!("n_records must be at least 1");
    }
    if !(config.noise_sd > 0.0) {
        bail!("noise_sd must be positive");
    }
    if config.image_side < 2 {
        bail!("image_side must be at least 2");
    }

    let images_dir = out.join("images");
    fs::create_dir_all(&images_dir)
        .with_context(|| format!("creating {}", images_dir.display()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let side = config.image_side;
    let max_entropy = (side as f64).log2();

    let mut records = csv::Writer::from_path(out.join("records.csv"))?;
    records.write_record([
        "lot_id", "title", "artist", "medium", "house", "city", "sale_year", "sale_month",
        "price", "currency", "height_in", "width_in", "signed", "dated", "style", "image_path",
    ])?;

    let digits = config.n_records.to_string().len().max(4);
    for i in 0..config.n_records {
        let lot_id = format!("lot-{:0digits$}", i + 1);

        let target = rng.gen_range(0.15 * max_entropy..0.9 * max_entropy);
        let (bytes, e_g) = entropy_matched_image(side, target, &mut rng)?;
        let png_path = images_dir.join(format!("{lot_id}.png"));
        image::GrayImage::from_raw(side as u32, side as u32, bytes)
            .expect("buffer sized to side*side")
            .save(&png_path)
            .with_context(|| format!("writing {}", png_path.display()))?;

        let title = TITLES[rng.gen_range(0..TITLES.len())];
        let artist = ARTISTS[rng.gen_range(0..ARTISTS.len())];
        let medium = MEDIUMS[rng.gen_range(0..MEDIUMS.len())];
        let house = HOUSES[rng.gen_range(0..HOUSES.len())];
        let city = CITIES[rng.gen_range(0..CITIES.len())];
        let year = rng.gen_range(YEARS);
        let month: u8 = rng.gen_range(1..=12);
        let signed = rng.gen_bool(0.5);
        let dated = rng.gen_bool(0.5);
        let style = STYLES[rng.gen_range(0..STYLES.len())];
        let currency = CURRENCIES[rng.gen_range(0..CURRENCIES.len())];
        let height = round_tenth(rng.gen_range(8.0..80.0));
        let width = round_tenth(rng.gen_range(8.0..80.0));
        let z: f64 = rng.sample(StandardNormal);

        let mut log_real = INTERCEPT + config.true_alpha * e_g + config.noise_sd * z;
        for (key, effect) in &config.dummy_effects {
            if effect_applies(
                key, artist, medium, house, city, year, month, signed, dated, style,
            )? {
                log_real += effect;
            }
        }
        let nominal = log_real.exp() * fx_rate(currency, year) * cpi_rate(year);

        records.write_record([
            lot_id.as_str(),
            title,
            artist,
            medium,
            house,
            city,
            &year.to_string(),
            &month.to_string(),
            &nominal.to_string(),
            currency,
            &height.to_string(),
            &width.to_string(),
            if signed { "1" } else { "0" },
            if dated { "1" } else { "0" },
            style.unwrap_or(""),
            &format!("images/{lot_id}.png"),
        ])?;
    }
    records.flush()?;

    write_rates(out)?;
    Ok(())
}

/// Mixes a rank-1 base with uniform noise and bisects the mixing weight
/// until the 8-bit-quantized image's entropy is within tolerance of the
/// target (or the bracket is exhausted). Returns the quantized bytes and
/// their realized entropy; the realized value is what a later extraction
/// of the saved PNG reproduces, so prices built from it stay consistent
/// with the extraction pipeline.
fn entropy_matched_image(
    side: usize,
    target: f64,
    rng: &mut ChaCha8Rng,
) -> anyhow::Result<(Vec<u8>, f64)> {
    let u: Vec<f64> = (0..side).map(|_| rng.gen_range(0.1..0.9)).collect();
    let v: Vec<f64> = (0..side).map(|_| rng.gen_range(0.1..0.9)).collect();
    let noise: Vec<f64> = (0..side * side).map(|_| rng.gen()).collect();

    let render = |w: f64| -> Vec<u8> {
        let mut bytes = Vec::with_capacity(side * side);
        for r in 0..side {
            for c in 0..side {
                let value = (1.0 - w) * u[r] * v[c] + w * noise[r * side + c];
                bytes.push((value.clamp(0.0, 1.0) * 255.0).round() as u8);
            }
        }
        bytes
    };
    let measure = |bytes: &[u8]| -> anyhow::Result<f64> {
        let values: Vec<f64> = bytes.iter().map(|&b| b as f64 / 255.0).collect();
        let entropy = svd_entropy(&GrayMatrix::new(side, side, values))
            .context("synthetic image entropy")?;
        Ok(entropy.bits())
    };

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut w = 0.5;
    let mut bytes = render(w);
    let mut entropy = measure(&bytes)?;
    for _ in 0..MAX_BISECTIONS {
        if (entropy - target).abs() <= ENTROPY_TOL_BITS {
            break;
        }
        if entropy < target {
            lo = w;
        } else {
            hi = w;
        }
        w = 0.5 * (lo + hi);
        bytes = render(w);
        entropy = measure(&bytes)?;
    }
    Ok((bytes, entropy))
}

#[allow(clippy::too_many_arguments)]
fn effect_applies(
    key: &str,
    artist: &str,
    medium: &str,
    house: &str,
    city: &str,
    year: i32,
    month: u8,
    signed: bool,
    dated: bool,
    style: Option<&str>,
) -> anyhow::Result<bool> {
    Ok(match key {
        "signed" => signed,
        "dated" => dated,
        _ => {
            let Some((field, level)) = key.split_once('=') else {
                bail!("dummy effect key `{key}` is neither signed/dated nor field=level");
            };
            let value = match field {
                "artist" => artist.to_string(),
                "medium" => medium.to_string(),
                "house" => house.to_string(),
                "city" => city.to_string(),
                "year" => year.to_string(),
                "month" => format!("{month:02}"),
                "style" => style.unwrap_or("").to_string(),
                other => bail!("unknown dummy effect field `{other}`"),
            };
            value == level
        }
    })
}

fn round_tenth(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

fn fx_rate(currency: &str, year: i32) -> f64 {
    match currency {
        "USD" => 1.0,
        "EUR" => 0.8 + 0.005 * (year - 2004) as f64,
        other => unreachable!("currency {other} is never drawn"),
    }
}

fn cpi_rate(year: i32) -> f64 {
    1.0 + 0.02 * (year - 2000) as f64
}

fn write_rates(out: &Path) -> anyhow::Result<()> {
    let path = out.join("rates.csv");
    let mut writer = csv::Writer::from_path(&path)
        .with_context(|| format!("writing {}", path.display()))?;
    writer.write_record(["kind", "currency", "year", "value"])?;
    for year in YEARS {
        for currency in CURRENCIES {
            writer.write_record([
                "fx",
                currency,
                &year.to_string(),
                &fx_rate(currency, year).to_string(),
            ])?;
        }
    }
    writer.write_record(["cpi", "", "2000", "1"])?;
    for year in YEARS {
        writer.write_record(["cpi", "", &year.to_string(), &cpi_rate(year).to_string()])?;
    }
    writer.flush()?;
    Ok(())
}
