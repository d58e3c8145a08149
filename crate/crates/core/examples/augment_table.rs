//! Expand the bundled 31-row table to 1000 rows and compare column statistics.
//!
//! cargo run --example augment_table [-- out.csv]

use nsai::augment::{augment_tabular, AugmentConfig};
use nsai::data::{parse_dataset, Dataset, FEATURE_NAMES, TABLE1_CSV, TARGET_NAME};

fn column_stats(ds: &Dataset, c: usize) -> (f64, f64, f64, f64) {
    let v: Vec<f64> = ds.records().iter().map(|r| r.values()[c]).collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (mean, sd, lo, hi)
}

fn main() -> nsai::Result<()> {
    let source = parse_dataset(TABLE1_CSV)?;
    let augmented = augment_tabular(&source, &AugmentConfig::default())?;

    println!("{} -> {} rows", source.len(), augmented.len());
    println!("{:<24} {:>18} {:>18}", "column", "source mean±sd", "augmented mean±sd");
    let names = FEATURE_NAMES.iter().chain(std::iter::once(&TARGET_NAME));
    for (c, name) in names.enumerate() {
        let (m0, s0, _, _) = column_stats(&source, c);
        let (m1, s1, lo, hi) = column_stats(&augmented, c);
        println!("{name:<24} {m0:>10.3}±{s0:<7.3} {m1:>10.3}±{s1:<7.3} [{lo}, {hi}]");
    }

    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, augmented.to_csv()).map_err(|e| nsai::Error::io(&path, e))?;
        println!("wrote {path}");
    }
    Ok(())
}
