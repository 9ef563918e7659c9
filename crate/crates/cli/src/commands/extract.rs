use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context};
use artmetrics::color::red_blue_pct;
use artmetrics::image_io::{decode_image, resize_bicubic, to_gray};
use artmetrics::infoquant::svd_entropy;
use clap::Args;
use rayon::prelude::*;

#[derive(Args)]
pub struct ExtractArgs {
    /// Directory of images named `<lot_id>.<ext>`.
    #[arg(long)]
    pub images: PathBuf,
    /// Output CSV path (lot_id,e_g,redpct,bluepct).
    #[arg(long)]
    pub out: PathBuf,
    /// Square resize target in pixels.
    #[arg(long, default_value_t = 400)]
    pub size: usize,
    /// Worker threads for decoding and decomposition (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

pub fn run(args: ExtractArgs) -> anyhow::Result<()> {
    let mut files: Vec<(String, PathBuf)> = Vec::new();
    for entry in fs::read_dir(&args.images)
        .with_context(|| format!("reading image directory {}", args.images.display()))?
    {
        let entry = entry?;
        if !entry.file_type()?.is_file() {
            continue;
        }
        let path = entry.path();
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else { continue };
        files.push((stem.to_string(), path));
    }
    files.sort_by(|a, b| a.0.cmp(&b.0));

    let results = match args.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("building worker pool")?
            .install(|| process_all(&files, args.size)),
        None => process_all(&files, args.size),
    };

    let mut writer = csv::Writer::from_path(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    writer.write_record(["lot_id", "e_g", "redpct", "bluepct"])?;
    let mut skipped = 0usize;
    for ((lot_id, path), result) in files.iter().zip(&results) {
        match result {
            Ok((e_g, red, blue)) => {
                writer.write_record([
                    lot_id.as_str(),
                    &format!("{e_g:.6}"),
                    &format!("{red:.6}"),
                    &format!("{blue:.6}"),
                ])?;
            }
            Err(reason) => {
                skipped += 1;
                eprintln!("skipping {}: {reason}", path.display());
            }
        }
    }
    writer.flush()?;

    let total = files.len();
    if total == 0 {
        eprintln!("warning: no files in {}; wrote a header-only CSV", args.images.display());
        return Ok(());
    }
    eprintln!("extracted {} of {total} images ({skipped} skipped)", total - skipped);
    if skipped == total {
        bail!("all {total} images failed to decode");
    }
    Ok(())
}

/// Ordered results, one per input file; ordering makes the output
/// independent of worker scheduling.
fn process_all(files: &[(String, PathBuf)], size: usize) -> Vec<Result<(f64, f64, f64), String>> {
    files
        .par_iter()
        .map(|(_, path)| {
            let bytes = fs::read(path).map_err(|e| e.to_string())?;
            let img = decode_image::<f64>(&bytes).map_err(|e| e.to_string())?;
            let resized = resize_bicubic(&img, size, size);
            let shares = red_blue_pct(&resized);
            let entropy = svd_entropy(&to_gray(&resized)).map_err(|e| e.to_string())?;
            Ok((entropy.bits(), shares.redpct, shares.bluepct))
        })
        .collect()
}
