//! Compare backprop against central finite differences on a random batch.
//!
//! cargo run --example gradient_check

use nsai::mlp::{backward, MlpParams};

fn main() -> nsai::Result<()> {
    let params = MlpParams::init(3);
    let xs = [[0.3, -1.2, 0.8, 0.1], [-0.5, 0.4, 1.1, -0.9], [1.4, 0.2, -0.3, 0.6]];
    let ys = [0.5, -0.2, 1.0];
    let (grads, loss) = backward(&params, &xs, &ys)?;
    let mse = |p: &MlpParams| {
        xs.iter().zip(&ys).map(|(x, y)| (p.predict(x) - y).powi(2)).sum::<f64>() / xs.len() as f64
    };
    assert!((mse(&params) - loss).abs() < 1e-12);

    let h = 1e-6;
    let (mut worst_abs, mut worst_rel) = (0.0f64, 0.0f64);
    for (k, a) in grads.values().enumerate() {
        let nudge = |d: f64| {
            let mut p = params.clone();
            *p.values_mut().nth(k).unwrap() += d;
            mse(&p)
        };
        let numeric = (nudge(h) - nudge(-h)) / (2.0 * h);
        let diff = (a - numeric).abs();
        worst_abs = worst_abs.max(diff);
        if a.abs().max(numeric.abs()) > 1e-3 {
            worst_rel = worst_rel.max(diff / a.abs().max(numeric.abs()));
        }
    }
    println!("{} parameters, loss {loss:.6}", params.len());
    println!("worst absolute gap {worst_abs:.2e}; worst relative gap (|g| > 1e-3) {worst_rel:.2e}");
    Ok(())
}
