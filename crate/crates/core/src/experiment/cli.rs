//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data, validation or I/O error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{error::ErrorKind, Args, Parser, Subcommand};

use super::artifacts::{ensure_dir, write_file};
use super::{
    compare, export_plot_data, resolve_output_dir, run_neurosymbolic, run_simple_ann,
    write_comparison, write_manifest, Algorithm, ExperimentConfig, Manifest, ModelKind,
    ModelRun, PreparedData,
};
use crate::augment::{sine_demo, xy_csv};
use crate::data::{parse_inputs, ScalerStats, FEATURE_NAMES, TARGET_NAME};
use crate::error::{Error, Result};
use crate::metrics::ModelReport;
use crate::mlp::{extract_features, load_model};
use crate::symtree::{export_rules, tree_from_text};

#[derive(Debug, Parser)]
#[command(name = "nsai", version, about = "Network features + regression tree on process-parameter data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON experiment config
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Dataset CSV (overrides the config)
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    /// Seed for augmentation, splitting and training
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Artifact directory (overrides NSAI_OUT_DIR and the config)
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Split the source rows before augmenting
    #[arg(long, global = true)]
    split_first: bool,
    #[arg(long, global = true, value_enum)]
    model: Option<ModelKind>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train and evaluate the model(s) selected by --model / the config
    Train,
    /// Train both models on one split and write comparison.csv
    Compare,
    /// Write the sine-curve augmentation demo as CSV
    SineDemo {
        #[arg(long, default_value_t = 50)]
        n_original: usize,
        #[arg(long, default_value_t = 500)]
        n_synthetic: usize,
        #[arg(long, default_value_t = 0.1)]
        noise_sd: f64,
    },
    /// Print the rules of a fitted tree
    ExportRules {
        /// Tree file (default: <out-dir>/tree.txt)
        #[arg(long)]
        tree: Option<PathBuf>,
    },
    /// Predict with the models saved in --out-dir for the rows of --data
    Predict,
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`cli_main`] with explicit output streams.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}\n\nRun `nsai --help` for usage.");
            1
        }
        Err(CliError::Failed(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

enum CliError {
    Usage(String),
    Failed(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Failed(e)
    }
}

fn build_config(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(data) = &common.data {
        cfg.data_path = Some(data.clone());
    }
    if let Some(seed) = common.seed {
        cfg = cfg.with_seed(seed);
    }
    if common.split_first {
        cfg.split.split_first = true;
    }
    if let Some(kind) = common.model {
        cfg.model_kind = kind;
    }
    cfg.check_paths()?;
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> std::result::Result<(), CliError> {
    let Cli { command, common } = cli;
    match command {
        Command::Train => {
            let cfg = build_config(&common)?;
            let dir = resolve_output_dir(common.out_dir.clone(), &cfg);
            match cfg.model_kind {
                ModelKind::Both => cmd_compare(&cfg, &dir, "train", out)?,
                ModelKind::SimpleAnn => cmd_single(&cfg, &dir, Algorithm::SimpleAnn, out)?,
                ModelKind::Neurosymbolic => cmd_single(&cfg, &dir, Algorithm::Neurosymbolic, out)?,
            }
        }
        Command::Compare => {
            if matches!(common.model, Some(k) if k != ModelKind::Both) {
                return Err(CliError::Usage("compare runs both models; drop --model or use --model both".into()));
            }
            let mut cfg = build_config(&common)?;
            cfg.model_kind = ModelKind::Both;
            let dir = resolve_output_dir(common.out_dir.clone(), &cfg);
            cmd_compare(&cfg, &dir, "compare", out)?;
        }
        Command::SineDemo {
            n_original,
            n_synthetic,
            noise_sd,
        } => {
            let cfg = build_config(&common)?;
            let dir = resolve_output_dir(common.out_dir.clone(), &cfg);
            cmd_sine(&dir, n_original, n_synthetic, noise_sd, common.seed.unwrap_or(0), out)?;
        }
        Command::ExportRules { tree } => {
            let path = match tree {
                Some(p) => p,
                None => {
                    let cfg = build_config(&common)?;
                    resolve_output_dir(common.out_dir.clone(), &cfg).join("tree.txt")
                }
            };
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let tree = tree_from_text(&text)?;
            let _ = write!(out, "{}", export_rules(&tree));
        }
        Command::Predict => {
            let data = common
                .data
                .clone()
                .ok_or_else(|| CliError::Usage("predict needs --data <csv>".into()))?;
            let cfg = build_config(&common)?;
            let dir = resolve_output_dir(common.out_dir.clone(), &cfg);
            cmd_predict(&dir, &data, common.model, out)?;
        }
    }
    Ok(())
}

fn print_table(out: &mut dyn Write, rows: &[(Algorithm, ModelReport)]) {
    let _ = writeln!(
        out,
        "{:<14} {:>12} {:>12} {:>10} {:>10}",
        "algorithm", "mse_train", "mse_val", "r2_train", "r2_val"
    );
    for (a, r) in rows {
        let _ = writeln!(
            out,
            "{:<14} {:>12.6} {:>12.6} {:>10.4} {:>10.4}",
            a.name(),
            r.mse_train,
            r.mse_val,
            r.r2_train,
            r.r2_val
        );
    }
}

fn cmd_single(cfg: &ExperimentConfig, dir: &Path, algo: Algorithm, out: &mut dyn Write) -> Result<()> {
    let (data, run): (PreparedData, ModelRun) = match algo {
        Algorithm::SimpleAnn => run_simple_ann(cfg)?,
        Algorithm::Neurosymbolic => run_neurosymbolic(cfg)?,
    };
    let mut files = export_plot_data(&run, &data, dir, None)?;
    let report_csv = format!("{}\n{}\n", ModelReport::CSV_HEADER, run.report.csv_row(algo.name()));
    files.push(write_file(dir, &format!("report_{}.csv", algo.name()), report_csv)?);
    let manifest = Manifest::new("train", cfg, &data, &files);
    write_manifest(&manifest, dir)?;
    print_table(out, &[(algo, run.report)]);
    if let Some(tree) = &run.tree {
        let _ = writeln!(out, "\ntree: depth {}, {} leaves", tree.depth(), tree.n_leaves());
    }
    let _ = writeln!(out, "artifacts in {}", dir.display());
    Ok(())
}

fn cmd_compare(cfg: &ExperimentConfig, dir: &Path, command: &str, out: &mut dyn Write) -> Result<()> {
    let cmp = compare(cfg)?;
    let mut files = Vec::new();
    for run in &cmp.runs {
        let suffix = (!cfg.shared_network).then(|| run.algorithm.name());
        files.extend(export_plot_data(run, &cmp.data, dir, suffix)?);
    }
    files.sort();
    files.dedup();
    files.push(write_comparison(&cmp.table, dir)?);
    write_manifest(&Manifest::new(command, cfg, &cmp.data, &files), dir)?;

    print_table(out, &cmp.table.rows);
    let _ = writeln!(out);
    for (metric, winner) in cmp.table.winners() {
        let _ = writeln!(out, "{metric:<10} better: {winner}");
    }
    let _ = writeln!(out, "artifacts in {}", dir.display());
    Ok(())
}

fn cmd_sine(dir: &Path, n_original: usize, n_synthetic: usize, noise_sd: f64, seed: u64, out: &mut dyn Write) -> Result<()> {
    let demo = sine_demo(n_original, n_synthetic, noise_sd, seed)?;
    ensure_dir(dir)?;
    write_file(dir, "sine_demo_original.csv", xy_csv(&demo.original))?;
    write_file(dir, "sine_demo_synthetic.csv", xy_csv(&demo.synthetic))?;
    let within = demo
        .synthetic
        .iter()
        .filter(|(x, y)| (y - x.sin()).abs() <= 4.0 * noise_sd)
        .count();
    let _ = writeln!(
        out,
        "{} original, {} synthetic points; {} synthetic within 4 sd of sin(x)\nartifacts in {}",
        demo.original.len(),
        demo.synthetic.len(),
        within,
        dir.display()
    );
    Ok(())
}

fn find_model(dir: &Path, algo: Algorithm) -> PathBuf {
    let specific = dir.join(format!("model_{}.bin", algo.name()));
    if specific.is_file() {
        specific
    } else {
        dir.join("model.bin")
    }
}

fn cmd_predict(dir: &Path, data: &Path, kind: Option<ModelKind>, out: &mut dyn Write) -> Result<()> {
    let text = std::fs::read_to_string(data).map_err(|e| Error::io(data, e))?;
    let (x, y) = parse_inputs(&text)?;
    let scaler_path = dir.join("scaler.json");
    let scaler: ScalerStats = serde_json::from_str(
        &std::fs::read_to_string(&scaler_path).map_err(|e| Error::io(&scaler_path, e))?,
    )?;
    let xs = scaler.transform_all(&x);

    let tree_path = dir.join("tree.txt");
    let algos: Vec<Algorithm> = match kind {
        Some(ModelKind::SimpleAnn) => vec![Algorithm::SimpleAnn],
        Some(ModelKind::Neurosymbolic) => vec![Algorithm::Neurosymbolic],
        Some(ModelKind::Both) => vec![Algorithm::SimpleAnn, Algorithm::Neurosymbolic],
        None if tree_path.is_file() => vec![Algorithm::SimpleAnn, Algorithm::Neurosymbolic],
        None => vec![Algorithm::SimpleAnn],
    };

    let mut columns = Vec::new();
    for algo in &algos {
        let path = find_model(dir, *algo);
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        let (params, _) = load_model(&bytes)?;
        let pred = match algo {
            Algorithm::SimpleAnn => params.predict_all(&xs),
            Algorithm::Neurosymbolic => {
                let tree_text = std::fs::read_to_string(&tree_path).map_err(|e| Error::io(&tree_path, e))?;
                let tree = tree_from_text(&tree_text)?;
                tree.predict_matrix(&extract_features(&params, &xs))
            }
        };
        columns.push(pred);
    }

    let mut csv = FEATURE_NAMES.join(",");
    if y.is_some() {
        csv.push(',');
        csv.push_str(TARGET_NAME);
    }
    for a in &algos {
        csv.push(',');
        csv.push_str(a.name());
    }
    csv.push('\n');
    for (i, row) in x.iter().enumerate() {
        let mut fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        if let Some(y) = &y {
            fields.push(y[i].to_string());
        }
        fields.extend(columns.iter().map(|c| c[i].to_string()));
        csv.push_str(&fields.join(","));
        csv.push('\n');
    }
    ensure_dir(dir)?;
    let path = write_file(dir, "predictions.csv", csv)?;

    let _ = writeln!(out, "{} rows predicted -> {}", x.len(), path.display());
    if let Some(y) = &y {
        for (a, pred) in algos.iter().zip(&columns) {
            let mse = crate::metrics::mse(y, pred)?;
            match crate::metrics::r2(y, pred) {
                Ok(r2) => {
                    let _ = writeln!(out, "{:<14} mse {mse:.6}  r2 {r2:.4}", a.name());
                }
                Err(_) => {
                    let _ = writeln!(out, "{:<14} mse {mse:.6}", a.name());
                }
            }
        }
    }
    Ok(())
}
