//! Process-parameter records: CSV ingestion, validation, z-scoring and splits.

use std::fmt::Write as _;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng;

/// Number of process-parameter inputs per record.
pub const N_FEATURES: usize = 4;

pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "infill_pct",
    "layer_height_mm",
    "print_speed_mm_s",
    "extrusion_temp_c",
];

pub const TARGET_NAME: &str = "impact_strength_kj_m2";

/// The 31-row experimental dataset shipped with the crate.
pub const TABLE1_CSV: &str = include_str!("../data/table1.csv");

/// Half-open / closed bounds per column, in CSV order.
struct Bounds {
    lo: f64,
    lo_inclusive: bool,
    hi: f64,
    hi_inclusive: bool,
}

impl Bounds {
    const fn new(lo: f64, lo_inclusive: bool, hi: f64, hi_inclusive: bool) -> Self {
        Bounds {
            lo,
            lo_inclusive,
            hi,
            hi_inclusive,
        }
    }

    fn contains(&self, v: f64) -> bool {
        let above = if self.lo_inclusive { v >= self.lo } else { v > self.lo };
        let below = if self.hi_inclusive { v <= self.hi } else { v < self.hi };
        v.is_finite() && above && below
    }

    fn describe(&self) -> String {
        format!(
            "{}{}, {}{}",
            if self.lo_inclusive { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_inclusive { ']' } else { ')' }
        )
    }
}

const COLUMN_BOUNDS: [Bounds; N_FEATURES + 1] = [
    Bounds::new(0.0, false, 100.0, true),
    Bounds::new(0.0, false, 0.5, true),
    Bounds::new(0.0, false, 120.0, true),
    Bounds::new(150.0, true, 260.0, true),
    Bounds::new(0.0, false, 20.0, false),
];

fn column_name(col: usize) -> &'static str {
    if col < N_FEATURES {
        FEATURE_NAMES[col]
    } else {
        TARGET_NAME
    }
}

/// One printed specimen: four process parameters and the measured impact strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentRecord {
    /// Infill percentage, (0, 100].
    pub infill_pct: f64,
    /// Layer height in mm, (0, 0.5].
    pub layer_height: f64,
    /// Print speed in mm/s, (0, 120].
    pub print_speed: f64,
    /// Extrusion temperature in °C, [150, 260].
    pub extrusion_temp: f64,
    /// Impact strength in kJ/m², (0, 20).
    pub impact_strength: f64,
}

impl ExperimentRecord {
    pub fn from_values(v: [f64; N_FEATURES + 1]) -> Self {
        ExperimentRecord {
            infill_pct: v[0],
            layer_height: v[1],
            print_speed: v[2],
            extrusion_temp: v[3],
            impact_strength: v[4],
        }
    }

    pub fn features(&self) -> [f64; N_FEATURES] {
        [
            self.infill_pct,
            self.layer_height,
            self.print_speed,
            self.extrusion_temp,
        ]
    }

    pub fn values(&self) -> [f64; N_FEATURES + 1] {
        let f = self.features();
        [f[0], f[1], f[2], f[3], self.impact_strength]
    }

    /// Index of the first column outside its physical range, if any.
    fn first_violation(&self) -> Option<usize> {
        self.values()
            .iter()
            .zip(COLUMN_BOUNDS.iter())
            .position(|(v, b)| !b.contains(*v))
    }
}

/// A validated, ordered collection of records.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<ExperimentRecord>,
}

impl Dataset {
    /// Validates every record; fails on an empty list or out-of-range values.
    pub fn new(records: Vec<ExperimentRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyBody);
        }
        for (i, r) in records.iter().enumerate() {
            if let Some(col) = r.first_violation() {
                return Err(Error::Parse {
                    row: i + 1,
                    column: column_name(col).to_string(),
                    message: format!(
                        "value {} outside {}",
                        r.values()[col],
                        COLUMN_BOUNDS[col].describe()
                    ),
                });
            }
        }
        Ok(Dataset { records })
    }

    pub fn records(&self) -> &[ExperimentRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn feature_names(&self) -> [&'static str; N_FEATURES] {
        FEATURE_NAMES
    }

    /// Rows picked by `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Dataset> {
        let records = indices
            .iter()
            .map(|&i| {
                self.records
                    .get(i)
                    .copied()
                    .ok_or_else(|| Error::invalid(format!("index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(records)
    }

    /// Matrix view: features and targets as parallel vectors.
    pub fn samples(&self) -> Samples {
        Samples {
            x: self.records.iter().map(ExperimentRecord::features).collect(),
            y: self.records.iter().map(|r| r.impact_strength).collect(),
        }
    }

    /// Serialize with the same header and column order `parse_dataset` expects.
    /// Values use the shortest representation that parses back exactly.
    pub fn to_csv(&self) -> String {
        let mut out = header_line();
        for r in &self.records {
            let v = r.values();
            let _ = writeln!(out, "{},{},{},{},{}", v[0], v[1], v[2], v[3], v[4]);
        }
        out
    }
}

fn header_line() -> String {
    let mut h = FEATURE_NAMES.join(",");
    h.push(',');
    h.push_str(TARGET_NAME);
    h.push('\n');
    h
}

/// Features and targets in matrix form. Unlike [`Dataset`], values are not
/// range-checked, so this also carries standardized data.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Samples {
    pub x: Vec<[f64; N_FEATURES]>,
    pub y: Vec<f64>,
}

impl Samples {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn select(&self, indices: &[usize]) -> Samples {
        Samples {
            x: indices.iter().map(|&i| self.x[i]).collect(),
            y: indices.iter().map(|&i| self.y[i]).collect(),
        }
    }
}

/// Splits non-empty lines; strips CR so LF and CRLF files parse alike.
fn lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .filter(|l| !l.trim().is_empty())
}

fn check_header(header: &str, expected: &[&str]) -> Result<()> {
    let header = header.strip_prefix('\u{feff}').unwrap_or(header);
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != expected {
        return Err(Error::Header(format!(
            "expected `{}`, found `{}`",
            expected.join(","),
            header
        )));
    }
    Ok(())
}

fn parse_row<const N: usize>(line: &str, row: usize) -> Result<[f64; N]> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != N {
        return Err(Error::Parse {
            row,
            column: "*".to_string(),
            message: format!("expected {N} columns, found {}", fields.len()),
        });
    }
    let mut out = [0.0; N];
    for (col, field) in fields.iter().enumerate() {
        let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
            row,
            column: column_name(col).to_string(),
            message: format!("malformed number `{}`", field.trim()),
        })?;
        if !COLUMN_BOUNDS[col].contains(v) {
            return Err(Error::Parse {
                row,
                column: column_name(col).to_string(),
                message: format!("value {v} outside {}", COLUMN_BOUNDS[col].describe()),
            });
        }
        out[col] = v;
    }
    Ok(out)
}

/// Parse a five-column dataset CSV. Errors name the 1-based body row and the column.
pub fn parse_dataset(csv_text: &str) -> Result<Dataset> {
    let mut it = lines(csv_text);
    let header = it.next().ok_or_else(|| Error::Header("missing header row".into()))?;
    let mut expected: Vec<&str> = FEATURE_NAMES.to_vec();
    expected.push(TARGET_NAME);
    check_header(header, &expected)?;

    let records = it
        .enumerate()
        .map(|(i, line)| parse_row::<{ N_FEATURES + 1 }>(line, i + 1).map(ExperimentRecord::from_values))
        .collect::<Result<Vec<_>>>()?;
    if records.is_empty() {
        return Err(Error::EmptyBody);
    }
    Ok(Dataset { records })
}

/// Feature rows plus targets when the file carried them.
pub type Inputs = (Vec<[f64; N_FEATURES]>, Option<Vec<f64>>);

/// Inputs for prediction: either the four feature columns alone or the full
/// five-column schema, in which case the targets are returned too.
pub fn parse_inputs(csv_text: &str) -> Result<Inputs> {
    let mut it = lines(csv_text);
    let header = it.next().ok_or_else(|| Error::Header("missing header row".into()))?;
    let width = header.split(',').count();
    if width == N_FEATURES + 1 {
        let ds = parse_dataset(csv_text)?;
        let s = ds.samples();
        return Ok((s.x, Some(s.y)));
    }
    check_header(header, &FEATURE_NAMES)?;
    let x = it
        .enumerate()
        .map(|(i, line)| parse_row::<N_FEATURES>(line, i + 1))
        .collect::<Result<Vec<_>>>()?;
    if x.is_empty() {
        return Err(Error::EmptyBody);
    }
    Ok((x, None))
}

/// Per-feature z-score statistics (sample standard deviation, n − 1).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ScalerStats {
    pub mean: [f64; N_FEATURES],
    pub std: [f64; N_FEATURES],
}

impl ScalerStats {
    pub fn fit(x: &[[f64; N_FEATURES]]) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::invalid(
                "standardization needs at least 2 rows for a sample std",
            ));
        }
        let n = x.len() as f64;
        let mut mean = [0.0; N_FEATURES];
        let mut std = [0.0; N_FEATURES];
        for j in 0..N_FEATURES {
            mean[j] = x.iter().map(|r| r[j]).sum::<f64>() / n;
            let ss: f64 = x.iter().map(|r| (r[j] - mean[j]).powi(2)).sum();
            std[j] = (ss / (n - 1.0)).sqrt();
            if !std[j].is_finite() || std[j] <= 0.0 {
                return Err(Error::ZeroVariance(FEATURE_NAMES[j].to_string()));
            }
        }
        Ok(ScalerStats { mean, std })
    }

    pub fn transform(&self, row: &[f64; N_FEATURES]) -> [f64; N_FEATURES] {
        std::array::from_fn(|j| (row[j] - self.mean[j]) / self.std[j])
    }

    pub fn inverse(&self, row: &[f64; N_FEATURES]) -> [f64; N_FEATURES] {
        std::array::from_fn(|j| row[j] * self.std[j] + self.mean[j])
    }

    pub fn transform_all(&self, x: &[[f64; N_FEATURES]]) -> Vec<[f64; N_FEATURES]> {
        x.iter().map(|r| self.transform(r)).collect()
    }

    /// Apply to features only; targets stay in physical units.
    pub fn transform_samples(&self, s: &Samples) -> Samples {
        Samples {
            x: self.transform_all(&s.x),
            y: s.y.clone(),
        }
    }
}

/// Z-score the features using statistics of `samples` itself.
pub fn standardize(samples: &Samples) -> Result<(Samples, ScalerStats)> {
    let stats = ScalerStats::fit(&samples.x)?;
    Ok((stats.transform_samples(samples), stats))
}

/// A disjoint partition of `0..n` into training and validation indices.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct TrainValSplit {
    pub train_indices: Vec<usize>,
    pub val_indices: Vec<usize>,
    pub seed: u64,
}

/// Seeded shuffle of `0..n`; the first `round(n * train_fraction)` go to
/// training. Both index lists are returned sorted.
pub fn split(n: usize, train_fraction: f64, seed: u64) -> Result<TrainValSplit> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "train fraction {train_fraction} not in (0, 1)"
        )));
    }
    let n_train = (n as f64 * train_fraction).round() as usize;
    if n_train < 2 || n_train >= n {
        return Err(Error::invalid(format!(
            "degenerate split of {n} rows: {n_train} train / {} val",
            n.saturating_sub(n_train)
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng::seeded(seed));
    let mut train_indices = perm[..n_train].to_vec();
    let mut val_indices = perm[n_train..].to_vec();
    train_indices.sort_unstable();
    val_indices.sort_unstable();
    Ok(TrainValSplit {
        train_indices,
        val_indices,
        seed,
    })
}
