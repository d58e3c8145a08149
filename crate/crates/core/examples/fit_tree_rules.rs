//! Fit a regression tree directly on the standardized process parameters and
//! print it as if/else rules, then round-trip the rules through the parser.
//!
//! cargo run --example fit_tree_rules

use nsai::data::{parse_dataset, standardize, FEATURE_NAMES, TABLE1_CSV};
use nsai::metrics::r2;
use nsai::symtree::{export_rules, fit_tree, parse_rules, FeatureMatrix, Node, TreeConfig};

fn main() -> nsai::Result<()> {
    let (s, _) = standardize(&parse_dataset(TABLE1_CSV)?.samples())?;
    // the tree requires nonnegative features, as ReLU outputs are; shift z-scores
    let shifted: Vec<[f64; 4]> = s.x.iter().map(|r| r.map(|v| v + 3.0)).collect();
    let x = FeatureMatrix::from_rows(&shifted)?;

    let cfg = TreeConfig { max_depth: 3, ..Default::default() };
    let tree = fit_tree(&x, &s.y, &cfg)?;
    let rules = export_rules(&tree);
    println!("{rules}");

    for (f, name) in FEATURE_NAMES.iter().enumerate() {
        let used = tree.nodes().iter().filter(|n| matches!(n, Node::Split { feature, .. } if *feature == f)).count();
        println!("f[{f}] = {name}: {used} split(s)");
    }
    println!("depth {}, {} leaves, training R² {:.4}", tree.depth(), tree.n_leaves(), r2(&s.y, &tree.predict_matrix(&x))?);

    let reparsed = parse_rules(&rules, 4)?;
    assert_eq!(export_rules(&reparsed), rules);
    Ok(())
}
