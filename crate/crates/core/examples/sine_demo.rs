//! Jittered resampling on a toy curve: how far do synthetic points stray from sin(x)?
//!
//! cargo run --example sine_demo

use nsai::augment::sine_demo;

fn main() -> nsai::Result<()> {
    let demo = sine_demo(50, 500, 0.1, 0)?;
    let dev: Vec<f64> = demo.synthetic.iter().map(|(x, y)| y - x.sin()).collect();
    let within = dev.iter().filter(|d| d.abs() <= 0.4).count();
    let rms = (dev.iter().map(|d| d * d).sum::<f64>() / dev.len() as f64).sqrt();

    println!("{} originals, {} synthetic", demo.original.len(), demo.synthetic.len());
    println!("rms deviation from sin(x): {rms:.4}");
    println!("within 0.4: {within}/{}", dev.len());

    // crude text plot of the first few synthetic points
    for (x, y) in demo.synthetic.iter().take(8) {
        let col = ((y + 1.5) * 20.0).round().clamp(0.0, 60.0) as usize;
        println!("{x:5.2} {}*", " ".repeat(col));
    }
    Ok(())
}
