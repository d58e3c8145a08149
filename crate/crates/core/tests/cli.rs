use std::path::Path;
use std::process::{Command, Output};

fn nsai(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nsai"));
    cmd.args(args).env_remove("NSAI_OUT_DIR");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn small_config(dir: &Path, epochs: usize) -> String {
    let path = dir.join("small.json");
    let json = format!(
        r#"{{
  "augment": {{ "target_size": 80, "noise_scale": 0.05, "seed": 1 }},
  "split": {{ "train_fraction": 0.75, "seed": 1 }},
  "train": {{ "epochs": {epochs}, "batch_size": 16, "learning_rate": 0.01, "seed": 1 }},
  "output_dir": "unused"
}}"#
    );
    std::fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_owned()
}

fn lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()))
        .lines()
        .map(str::to_owned)
        .collect()
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(nsai(&["train", "--bogus"], &[]).status.code(), Some(1));
    assert_eq!(nsai(&[], &[]).status.code(), Some(1));
    assert_eq!(nsai(&["compare", "--model", "simple_ann"], &[]).status.code(), Some(1));
    assert_eq!(nsai(&["--help"], &[]).status.code(), Some(0));
}

#[test]
fn missing_data_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let o = nsai(&["train", "--data", "missing.csv", "--out-dir", out], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.csv"));
}

#[test]
fn malformed_data_exits_two_and_names_the_row() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.csv");
    std::fs::write(
        &bad,
        "infill_pct,layer_height_mm,print_speed_mm_s,extrusion_temp_c,impact_strength_kj_m2\n20,0.1,30,200,3.1\n20,abc,30,200,3.0\n",
    )
    .unwrap();
    let o = nsai(&["train", "--data", bad.to_str().unwrap(), "--out-dir", tmp.path().to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("row 2") || err.contains("row 3"), "{err}");
}

#[test]
fn compare_writes_table_and_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), 3);
    let out = tmp.path().join("run");
    let o = nsai(&["compare", "--config", &cfg, "--out-dir", out.to_str().unwrap()], &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let table = lines(&out.join("comparison.csv"));
    assert_eq!(table.len(), 3);
    assert!(table.iter().all(|l| l.split(',').count() == 5));
    assert_eq!(lines(&out.join("loss_history.csv")).len(), 1 + 3);

    // 80 rows, 75% train
    for algo in ["simple_ann", "neurosymbolic"] {
        assert_eq!(lines(&out.join(format!("pred_train_{algo}.csv"))).len(), 1 + 60);
        assert_eq!(lines(&out.join(format!("pred_val_{algo}.csv"))).len(), 1 + 20);
    }
    for f in ["model.bin", "scaler.json", "tree.txt", "rules.txt", "manifest.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }

    // export-rules reproduces rules.txt from the stored tree
    let rules = nsai(&["export-rules", "--out-dir", out.to_str().unwrap()], &[]);
    assert!(rules.status.success());
    assert_eq!(String::from_utf8(rules.stdout).unwrap(), std::fs::read_to_string(out.join("rules.txt")).unwrap());

    // predict on the bundled table
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/table1.csv");
    let p = nsai(&["predict", "--data", data.to_str().unwrap(), "--out-dir", out.to_str().unwrap()], &[]);
    assert!(p.status.success(), "{}", String::from_utf8_lossy(&p.stderr));
    assert_eq!(lines(&out.join("predictions.csv")).len(), 1 + 31);
}

#[test]
fn single_epoch_gives_one_loss_row() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), 1);
    let out = tmp.path().join("one");
    let o = nsai(&["train", "--model", "simple_ann", "--config", &cfg, "--out-dir", out.to_str().unwrap()], &[]);
    assert!(o.status.success());
    assert_eq!(lines(&out.join("loss_history.csv")).len(), 2);
    assert!(out.join("report_simple_ann.csv").is_file());
    assert!(!out.join("tree.txt").exists());
}

#[test]
fn out_dir_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let env_dir = tmp.path().join("from-env");
    let flag_dir = tmp.path().join("from-flag");
    let envs = [("NSAI_OUT_DIR", env_dir.as_path())];

    assert!(nsai(&["sine-demo", "--n-synthetic", "20"], &envs).status.success());
    assert!(env_dir.join("sine_demo_synthetic.csv").is_file());

    let flag = flag_dir.to_str().unwrap();
    assert!(nsai(&["sine-demo", "--out-dir", flag], &envs).status.success());
    assert_eq!(lines(&flag_dir.join("sine_demo_original.csv")).len(), 1 + 50);
    assert_eq!(lines(&flag_dir.join("sine_demo_synthetic.csv")).len(), 1 + 500);
}
