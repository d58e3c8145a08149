#![allow(dead_code)]

use nsai::mlp::{Architecture, MlpParams};
use nsai::symtree::FeatureMatrix;
use rand::Rng;

/// Reference greedy CART written directly from the definition: every split is
/// scored by partitioning the samples and summing squared deviations from
/// each side's mean. No prefix sums, no sorting tricks.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleTree {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: Box<OracleTree>,
        right: Box<OracleTree>,
    },
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sse(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|y| (y - m) * (y - m)).sum()
}

pub fn oracle_fit(rows: &[Vec<f64>], y: &[f64], depth_left: usize) -> OracleTree {
    let all_same = y.iter().all(|t| *t == y[0]);
    if depth_left == 0 || y.len() < 2 || all_same {
        return OracleTree::Leaf(if all_same { y[0] } else { mean(y) });
    }
    let node_sse = sse(y);
    let tol = 1e-10 * (1.0 + node_sse);
    let d = rows[0].len();
    let mut best: Option<(usize, f64, f64)> = None;
    for f in 0..d {
        let mut values: Vec<f64> = rows.iter().map(|r| r[f]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let mut t = 0.5 * (w[0] + w[1]);
            if t >= w[1] {
                t = w[0];
            }
            let left: Vec<f64> = rows.iter().zip(y).filter(|(r, _)| r[f] <= t).map(|(_, y)| *y).collect();
            let right: Vec<f64> = rows.iter().zip(y).filter(|(r, _)| r[f] > t).map(|(_, y)| *y).collect();
            let score = sse(&left) + sse(&right);
            if best.is_none_or(|(_, _, b)| score < b - tol) {
                best = Some((f, t, score));
            }
        }
    }
    let Some((feature, threshold, _)) = best else {
        return OracleTree::Leaf(mean(y));
    };
    let (mut lr, mut ly, mut rr, mut ry) = (vec![], vec![], vec![], vec![]);
    for (r, t) in rows.iter().zip(y) {
        if r[feature] <= threshold {
            lr.push(r.clone());
            ly.push(*t);
        } else {
            rr.push(r.clone());
            ry.push(*t);
        }
    }
    OracleTree::Split {
        feature,
        threshold,
        left: Box::new(oracle_fit(&lr, &ly, depth_left - 1)),
        right: Box::new(oracle_fit(&rr, &ry, depth_left - 1)),
    }
}

pub fn oracle_predict(t: &OracleTree, row: &[f64]) -> f64 {
    match t {
        OracleTree::Leaf(v) => *v,
        OracleTree::Split {
            feature,
            threshold,
            left,
            right,
        } => {
            if row[*feature] <= *threshold {
                oracle_predict(left, row)
            } else {
                oracle_predict(right, row)
            }
        }
    }
}

pub fn training_sse(pred: &[f64], y: &[f64]) -> f64 {
    pred.iter().zip(y).map(|(p, t)| (p - t) * (p - t)).sum()
}

/// Small random dataset: `n` rows of `d` nonnegative features. Half the time
/// values come from a coarse grid so duplicate values and tied splits show up.
pub fn random_dataset(rng: &mut impl Rng, n: usize, d: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let coarse = rng.random_bool(0.5);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..d)
                .map(|_| {
                    if coarse {
                        f64::from(rng.random_range(0..4u8))
                    } else {
                        rng.random_range(0.0..10.0)
                    }
                })
                .collect()
        })
        .collect();
    let y = (0..n)
        .map(|_| {
            if coarse {
                f64::from(rng.random_range(0..5u8))
            } else {
                rng.random_range(-3.0..3.0)
            }
        })
        .collect();
    (rows, y)
}

pub fn matrix(rows: &[Vec<f64>]) -> FeatureMatrix {
    FeatureMatrix::from_rows(rows).unwrap()
}

/// Random params with random (not zero) biases.
pub fn random_params(rng: &mut impl Rng, arch: Architecture) -> MlpParams {
    let mut p = MlpParams::init_with(arch, rng.random());
    for l in &mut p.layers {
        for b in &mut l.bias {
            *b = rng.random_range(-0.5..0.5);
        }
    }
    p
}

pub struct GradCheck {
    pub checked: usize,
    pub skipped_instances: usize,
    pub worst_rel: f64,
    /// Coordinates above 1e-6 relative error whose absolute gap also exceeds
    /// the f64 roundoff floor of the difference quotient, ~eps·(L+1)/h.
    pub beyond_roundoff: usize,
}

/// Central finite differences on the batch MSE, compared to `backward`.
/// Instances where any ReLU pre-activation sits within `kink` of zero are
/// skipped, since the loss is not differentiable there.
pub fn gradient_check(instances: usize, seed: u64, h: f64, kink: f64) -> GradCheck {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = GradCheck {
        checked: 0,
        skipped_instances: 0,
        worst_rel: 0.0,
        beyond_roundoff: 0,
    };
    let mut done = 0;
    while done < instances {
        let arch = Architecture {
            inputs: 4,
            hidden: [rng.random_range(2..9), rng.random_range(2..7)],
        };
        let params = random_params(&mut rng, arch);
        let batch = rng.random_range(1..6);
        let xs: Vec<[f64; 4]> = (0..batch)
            .map(|_| std::array::from_fn(|_| rng.random_range(-2.0..2.0)))
            .collect();
        let ys: Vec<f64> = (0..batch).map(|_| rng.random_range(-2.0..2.0)).collect();

        if near_kink(&params, &xs, kink) {
            out.skipped_instances += 1;
            continue;
        }
        done += 1;

        let (grads, _) = nsai::mlp::backward(&params, &xs, &ys).unwrap();
        let analytic: Vec<f64> = grads.values().copied().collect();
        let loss = |p: &MlpParams| -> f64 {
            xs.iter()
                .zip(&ys)
                .map(|(x, y)| (p.predict(x) - y).powi(2))
                .sum::<f64>()
                / xs.len() as f64
        };
        let floor = 16.0 * f64::EPSILON * (loss(&params) + 1.0) / h;
        for (k, a) in analytic.iter().enumerate() {
            let mut plus = params.clone();
            *plus.values_mut().nth(k).unwrap() += h;
            let mut minus = params.clone();
            *minus.values_mut().nth(k).unwrap() -= h;
            let numeric = (loss(&plus) - loss(&minus)) / (2.0 * h);
            let scale = a.abs().max(numeric.abs());
            let rel = if scale == 0.0 { 0.0 } else { (a - numeric).abs() / scale };
            out.worst_rel = out.worst_rel.max(rel);
            if rel > 1e-6 && (a - numeric).abs() > floor {
                out.beyond_roundoff += 1;
            }
            out.checked += 1;
        }
    }
    out
}

fn near_kink(p: &MlpParams, xs: &[[f64; 4]], kink: f64) -> bool {
    let [l1, l2, _] = &p.layers;
    xs.iter().any(|x| {
        let z1: Vec<f64> = (0..l1.rows)
            .map(|i| l1.bias[i] + (0..l1.cols).map(|j| l1.weight(i, j) * x[j]).sum::<f64>())
            .collect();
        let a1: Vec<f64> = z1.iter().map(|z| z.max(0.0)).collect();
        let z2: Vec<f64> = (0..l2.rows)
            .map(|i| l2.bias[i] + (0..l2.cols).map(|j| l2.weight(i, j) * a1[j]).sum::<f64>())
            .collect();
        z1.iter().chain(&z2).any(|z| z.abs() < kink)
    })
}
