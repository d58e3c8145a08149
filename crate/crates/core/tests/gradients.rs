mod common;

use nsai::mlp::{backward, extract_features, AdamState, Architecture, Gradients, MlpParams};
use proptest::prelude::*;

#[test]
fn backward_matches_finite_differences() {
    let r = common::gradient_check(50, 0xfeed, 1e-6, 1e-4);
    assert!(r.checked > 1000);
    // Strict relative error can exceed 1e-6 only on tiny coordinates where the
    // difference quotient itself is dominated by rounding.
    assert_eq!(r.beyond_roundoff, 0, "worst relative error {}", r.worst_rel);
    assert!(r.worst_rel < 1e-4, "worst relative error {}", r.worst_rel);
}

fn input() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-50.0f64..50.0)
}

proptest! {
    #[test]
    fn activations_nonnegative(seed in any::<u64>(), x in input()) {
        let p = MlpParams::init(seed);
        let t = p.forward(&x);
        prop_assert!(t.a1.iter().chain(&t.a2).all(|v| *v >= 0.0));
        prop_assert!(t.y_hat.is_finite());
    }

    #[test]
    fn loss_nonnegative_and_zero_only_on_exact_fit(
        seed in any::<u64>(),
        xs in prop::collection::vec(input(), 1..6),
        shift in -1.0f64..1.0,
    ) {
        let p = MlpParams::init(seed);
        let exact: Vec<f64> = xs.iter().map(|x| p.predict(x)).collect();
        let (_, zero) = backward(&p, &xs, &exact).unwrap();
        prop_assert_eq!(zero, 0.0);
        let shifted: Vec<f64> = exact.iter().map(|y| y + shift).collect();
        let (_, loss) = backward(&p, &xs, &shifted).unwrap();
        prop_assert!(loss >= 0.0);
        if shift != 0.0 {
            prop_assert!(loss > 0.0);
        }
    }

    #[test]
    fn adam_preserves_shapes(seed in any::<u64>(), steps in 1usize..5) {
        let mut p = MlpParams::init(seed);
        let reference = p.clone();
        let mut s = AdamState::new(&p, 1e-2);
        let xs = [[0.5, -0.5, 1.0, 0.0], [1.0, 1.0, -1.0, 0.25]];
        for _ in 0..steps {
            let (g, _) = backward(&p, &xs, &[1.0, -1.0]).unwrap();
            s.step(&mut p, &g);
        }
        prop_assert!(p.same_shape(&reference));
        prop_assert_eq!(s.t, steps as u64);
        prop_assert!(s.v.values().all(|v| *v >= 0.0));
        p.validate().unwrap();
    }

    #[test]
    fn features_are_sixteen_wide_and_nonnegative(seed in any::<u64>(), xs in prop::collection::vec(input(), 1..20)) {
        let f = extract_features(&MlpParams::init(seed), &xs);
        prop_assert_eq!(f.cols(), 16);
        prop_assert_eq!(f.rows(), xs.len());
        prop_assert!(f.as_slice().iter().all(|v| *v >= 0.0));
    }
}

#[test]
fn gradients_shape_congruent() {
    let arch = Architecture { inputs: 4, hidden: [5, 3] };
    let p = MlpParams::init_with(arch, 1);
    let (g, _) = backward(&p, &[[1.0, 2.0, 3.0, 4.0]], &[0.0]).unwrap();
    assert!(g.params().same_shape(&p));
    assert!(Gradients::zeros_like(&p).params().same_shape(&p));
}
