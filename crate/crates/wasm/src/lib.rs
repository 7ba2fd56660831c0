//! Browser demo bindings.
//!
//! Three interactive operations, each returning a JSON string the page
//! plots on canvases: thinning two samples (ECDF overlay before/after),
//! online sign balancing (prefix sup-norm trajectory vs. random signs),
//! and a discrepancy-vs-n sweep (thinned polylog growth against the
//! sqrt(n) baseline). All functions are pure and seeded, so the page is
//! fully reproducible; they also compile and run natively for testing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use thinning::balance::Balancer;
use thinning::cdf::CdfModel;
use thinning::oracle::two_sample_discrepancy;
use thinning::pipeline::{thin_two_samples, ThinningParams, ThinningReport};
use thinning::seed::derive;
use thinning::sparse::SparseVector;
use thinning::walk::Sign;
use thinning::Point;

const MAX_N: u32 = 8192;
const MAX_M: u32 = 200_000;

fn preset_models(dist: &str) -> Result<Vec<CdfModel>, String> {
    let model = match dist {
        "uniform" => CdfModel::uniform(0.0, 1.0),
        "gaussian" => CdfModel::gaussian(0.0, 1.0),
        "exponential" => CdfModel::exponential(1.0),
        "mixture" => CdfModel::mixture(vec![
            (
                0.5,
                CdfModel::gaussian(-2.0, 0.6).map_err(|e| e.to_string())?,
            ),
            (
                0.5,
                CdfModel::gaussian(1.5, 1.0).map_err(|e| e.to_string())?,
            ),
        ]),
        other => return Err(format!("unknown distribution preset {other:?}")),
    };
    Ok(vec![model.map_err(|e| e.to_string())?])
}

fn sample_column(model: &CdfModel, n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| vec![model.sample(&mut rng)]).collect()
}

fn sorted_column(points: &[Point]) -> Vec<f64> {
    let mut v: Vec<f64> = points.iter().map(|p| p[0]).collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

#[derive(Serialize)]
struct ThinDemo {
    report: ThinningReport,
    disc_before: f64,
    disc_after: f64,
    dyadic_budget: f64,
    /// Sorted columns for ECDF step plots.
    x_sorted: Vec<f64>,
    y_sorted: Vec<f64>,
    kept_x_sorted: Vec<f64>,
    kept_y_sorted: Vec<f64>,
}

fn err_json(message: &str) -> String {
    format!("{{\"error\":{}}}", serde_json::Value::from(message))
}

/// Thin two seeded i.i.d. samples of a preset distribution and report the
/// exact discrepancy before and after, plus ECDF columns for plotting.
#[wasm_bindgen]
pub fn demo_thin(n: u32, t: f64, seed: u32, dist: &str) -> String {
    let n = n.clamp(16, MAX_N) as usize;
    let models = match preset_models(dist) {
        Ok(m) => m,
        Err(e) => return err_json(&e),
    };
    let seed = u64::from(seed);
    let xs = sample_column(&models[0], n, derive(seed, 1));
    let ys = sample_column(&models[0], n, derive(seed, 2));

    let params = ThinningParams {
        t,
        levels: None,
        seed: derive(seed, 3),
        models: Some(models),
    };
    let out = match thin_two_samples(&xs, &ys, &params) {
        Ok(out) => out,
        Err(e) => return err_json(&e.to_string()),
    };
    let disc_before = match two_sample_discrepancy(&xs, &ys) {
        Ok(r) => r.value,
        Err(e) => return err_json(&e.to_string()),
    };
    let disc_after = match two_sample_discrepancy(&out.kept_x, &out.kept_y) {
        Ok(r) => r.value,
        Err(e) => return err_json(&e.to_string()),
    };
    let demo = ThinDemo {
        dyadic_budget: t * f64::from(out.report.levels),
        disc_before,
        disc_after,
        x_sorted: sorted_column(&xs),
        y_sorted: sorted_column(&ys),
        kept_x_sorted: sorted_column(&out.kept_x),
        kept_y_sorted: sorted_column(&out.kept_y),
        report: out.report,
    };
    serde_json::to_string(&demo).unwrap_or_else(|e| err_json(&e.to_string()))
}

#[derive(Serialize)]
struct BalanceDemo {
    m: usize,
    theta: f64,
    rounds_used: u32,
    s1: f64,
    expected_bound: f64,
    stride: usize,
    /// Running sup-norm of the balanced signed prefix sums.
    balanced: Vec<f64>,
    /// The same stream under i.i.d. random signs.
    random: Vec<f64>,
}

/// Balance a stream of m unit vectors (cycling over 16 coordinates) and
/// compare the prefix sup-norm trajectory against i.i.d. random signs.
#[wasm_bindgen]
pub fn demo_balance(m: u32, seed: u32) -> String {
    let m = m.clamp(16, MAX_M) as usize;
    let seed = u64::from(seed);
    let coords = 16u64;
    let vectors: Vec<SparseVector> = (0..m)
        .map(|i| SparseVector::basis(i as u64 % coords))
        .collect();

    let mut balancer = match Balancer::new(1.0, derive(seed, 1)) {
        Ok(b) => b,
        Err(e) => return err_json(&e.to_string()),
    };
    let mut coin_rng = ChaCha8Rng::seed_from_u64(derive(seed, 2));

    let stride = (m / 512).max(1);
    let mut balanced_sums = vec![0.0f64; coords as usize];
    let mut random_sums = vec![0.0f64; coords as usize];
    let (mut bal_max, mut rand_max) = (0.0f64, 0.0f64);
    let mut balanced = Vec::with_capacity(m / stride + 1);
    let mut random = Vec::with_capacity(m / stride + 1);
    for (i, v) in vectors.iter().enumerate() {
        let (sign, _) = match balancer.assign_sign(v) {
            Ok(s) => s,
            Err(e) => return err_json(&e.to_string()),
        };
        let c = (i as u64 % coords) as usize;
        balanced_sums[c] += sign.value();
        bal_max = bal_max.max(balanced_sums[c].abs());
        random_sums[c] += Sign::random(&mut coin_rng).value();
        rand_max = rand_max.max(random_sums[c].abs());
        if i % stride == 0 || i + 1 == m {
            balanced.push(bal_max);
            random.push(rand_max);
        }
    }
    let s1 = balancer.s1();
    let demo = BalanceDemo {
        m,
        theta: balancer.theta(),
        rounds_used: balancer.rounds_used(),
        s1,
        expected_bound: balancer.theta() * (3.0 + (1.0 + s1).log2()),
        stride,
        balanced,
        random,
    };
    serde_json::to_string(&demo).unwrap_or_else(|e| err_json(&e.to_string()))
}

#[derive(Serialize)]
struct SweepRow {
    n: usize,
    mean_before: f64,
    mean_after: f64,
    bound: f64,
    sqrt_n: f64,
}

/// Discrepancy scaling: mean two-sample discrepancy with and without
/// thinning for n = 2^7 .. 2^12 uniform points.
#[wasm_bindgen]
pub fn demo_sweep(t: f64, trials: u32, seed: u32) -> String {
    let trials = trials.clamp(1, 16) as u64;
    let seed = u64::from(seed);
    let mut rows = Vec::new();
    for p in 7..=12u32 {
        let n = 1usize << p;
        let (mut sum_before, mut sum_after) = (0.0, 0.0);
        for trial in 0..trials {
            let s = derive(seed, u64::from(p) * 1000 + trial);
            let gen = |tag: u64| -> Vec<Point> {
                let mut rng = ChaCha8Rng::seed_from_u64(derive(s, tag));
                (0..n).map(|_| vec![rng.random::<f64>()]).collect()
            };
            let (xs, ys) = (gen(1), gen(2));
            let before = match two_sample_discrepancy(&xs, &ys) {
                Ok(r) => r.value,
                Err(e) => return err_json(&e.to_string()),
            };
            let params = ThinningParams::new(t, derive(s, 3));
            let out = match thin_two_samples(&xs, &ys, &params) {
                Ok(o) => o,
                Err(e) => return err_json(&e.to_string()),
            };
            let after = match two_sample_discrepancy(&out.kept_x, &out.kept_y) {
                Ok(r) => r.value,
                Err(e) => return err_json(&e.to_string()),
            };
            sum_before += before;
            sum_after += after;
        }
        let log2n = (n as f64).log2();
        rows.push(SweepRow {
            n,
            mean_before: sum_before / trials as f64,
            mean_after: sum_after / trials as f64,
            bound: t * log2n * log2n,
            sqrt_n: (n as f64).sqrt(),
        });
    }
    serde_json::to_string(&rows).unwrap_or_else(|e| err_json(&e.to_string()))
}
