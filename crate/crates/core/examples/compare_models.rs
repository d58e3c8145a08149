//! The full experiment: augment, split, train one network, fit a tree on its
//! learned features, and compare against the network's own head.
//!
//! cargo run --release --example compare_models [-- config.json]

use nsai::experiment::{compare, ExperimentConfig};

fn main() -> nsai::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => ExperimentConfig::load(path.as_ref())?,
        None => ExperimentConfig::default(),
    };
    let cmp = compare(&cfg)?;
    print!("{}", cmp.table.to_csv());
    for (metric, winner) in cmp.table.winners() {
        println!("{metric}: {winner}");
    }
    if let Some(tree) = cmp.runs.iter().find_map(|r| r.tree.as_ref()) {
        println!("\n{}", nsai::symtree::export_rules(tree));
    }
    Ok(())
}
