use nsai::augment::{augment_tabular, sine_demo, AugmentConfig};
use nsai::data::{parse_dataset, Dataset, ExperimentRecord, TABLE1_CSV};
use proptest::prelude::*;

fn table() -> Dataset {
    parse_dataset(TABLE1_CSV).unwrap()
}

fn column(ds: &Dataset, c: usize) -> Vec<f64> {
    ds.records().iter().map(|r| r.values()[c]).collect()
}

/// Two-pass mean and sample std, kept separate from the library's code.
fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, var.sqrt())
}

#[test]
fn synthetic_means_within_three_standard_errors() {
    let src = table();
    let out = augment_tabular(&src, &AugmentConfig::default()).unwrap();
    assert_eq!(out.len(), 1000);
    let synthetic = Dataset::new(out.records()[31..].to_vec()).unwrap();
    for c in 0..5 {
        let (src_mean, src_std) = mean_std(&column(&src, c));
        let syn = column(&synthetic, c);
        let (syn_mean, _) = mean_std(&syn);
        // resampling + 5% noise: per-row std ~ sqrt(1 + 0.05²) · source std
        let se = src_std * (1.0f64 + 0.05 * 0.05).sqrt() / (syn.len() as f64).sqrt();
        assert!(
            (syn_mean - src_mean).abs() <= 3.0 * se,
            "column {c}: {syn_mean} vs {src_mean} (se {se})"
        );
    }
}

#[test]
fn zero_noise_preserves_distribution_support() {
    let src = table();
    let cfg = AugmentConfig {
        noise_scale: 0.0,
        target_size: 5000,
        ..Default::default()
    };
    let out = augment_tabular(&src, &cfg).unwrap();
    for c in 0..5 {
        let (m0, s0) = mean_std(&column(&src, c));
        let (m1, s1) = mean_std(&column(&out, c));
        assert!((m1 - m0).abs() < 0.05 * s0 + 1e-12, "column {c} mean");
        assert!((s1 - s0).abs() < 0.1 * s0 + 1e-12, "column {c} std");
    }
    assert!(out.records().iter().all(|r| src.records().contains(r)));
}

fn small_dataset() -> impl Strategy<Value = Dataset> {
    prop::collection::vec(
        (1.0f64..100.0, 0.05f64..0.5, 10.0f64..120.0, 150.0f64..260.0, 0.5f64..19.0),
        1..12,
    )
    .prop_map(|rows| {
        Dataset::new(
            rows.into_iter()
                .map(|(a, b, c, d, e)| ExperimentRecord::from_values([a, b, c, d, e]))
                .collect(),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prefix_clamp_and_determinism(
        ds in small_dataset(),
        extra in 0usize..200,
        noise in 0.0f64..2.0,
        seed in any::<u64>(),
    ) {
        let cfg = AugmentConfig { target_size: ds.len() + extra, noise_scale: noise, seed, clamp: true };
        let out = augment_tabular(&ds, &cfg).unwrap();
        prop_assert_eq!(out.len(), cfg.target_size);
        prop_assert_eq!(&out.records()[..ds.len()], ds.records());
        for c in 0..5 {
            let col = column(&ds, c);
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(out.records().iter().all(|r| (lo..=hi).contains(&r.values()[c])));
        }
        let again = augment_tabular(&ds, &cfg).unwrap();
        prop_assert_eq!(out.to_csv(), again.to_csv());
    }

    #[test]
    fn sine_demo_noiseless_on_curve(n in 1usize..40, m in 1usize..100, seed in any::<u64>()) {
        let demo = sine_demo(n, m, 0.0, seed).unwrap();
        prop_assert!(demo.original.iter().chain(&demo.synthetic).all(|(x, y)| *y == x.sin()));
        prop_assert!(demo.synthetic.iter().all(|p| demo.original.iter().any(|o| o.0 == p.0)));
    }
}

#[test]
fn sine_demo_gaussian_tail() {
    for seed in 0..5 {
        let demo = sine_demo(50, 500, 0.1, seed).unwrap();
        let within = demo
            .synthetic
            .iter()
            .filter(|(x, y)| (y - x.sin()).abs() <= 0.4)
            .count();
        assert!(within as f64 >= 0.99 * 500.0, "seed {seed}: {within}/500");
    }
}
