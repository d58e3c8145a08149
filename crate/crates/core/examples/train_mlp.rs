//! Train the 4-32-16-1 network on augmented data and save it.
//!
//! cargo run --release --example train_mlp [-- model.bin]

use nsai::augment::{augment_tabular, AugmentConfig};
use nsai::data::{parse_dataset, split, ScalerStats, TABLE1_CSV};
use nsai::metrics::{mse, r2};
use nsai::mlp::{load_model, save_model, train, TrainConfig};

fn main() -> nsai::Result<()> {
    let data = augment_tabular(&parse_dataset(TABLE1_CSV)?, &AugmentConfig::default())?;
    let s = split(data.len(), 0.8, 0)?;
    let all = data.samples();
    let (train_raw, val_raw) = (all.select(&s.train_indices), all.select(&s.val_indices));
    let scaler = ScalerStats::fit(&train_raw.x)?;
    let (tr, va) = (scaler.transform_samples(&train_raw), scaler.transform_samples(&val_raw));

    let cfg = TrainConfig { epochs: 500, ..Default::default() };
    let (params, history) = train(&tr, Some(&va), &cfg)?;

    let val = history.val.as_deref().unwrap_or_default();
    for e in [0, 9, 99, cfg.epochs - 1] {
        println!("epoch {:>4}: train {:.5}  val {:.5}", e + 1, history.train[e], val[e]);
    }
    let pred = params.predict_all(&va.x);
    println!("val MSE {:.5}, R² {:.4}", mse(&va.y, &pred)?, r2(&va.y, &pred)?);

    let bytes = save_model(&params, &cfg);
    let (restored, _) = load_model(&bytes)?;
    assert_eq!(restored, params);
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, &bytes).map_err(|e| nsai::Error::io(&path, e))?;
        println!("wrote {path} ({} bytes)", bytes.len());
    }
    Ok(())
}
