//! Acceptance criterion 10: the performance and memory envelope. Kept in
//! its own test target so the wall-clock budget is measured without
//! competing against the concurrent Monte Carlo criteria.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thinning::dyadic::Resolution;
use thinning::pipeline::{interleave, thin_signed_stream};
use thinning::seed::derive;
use thinning::Point;

fn uniform_points(n: usize, d: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..d).map(|_| rng.random::<f64>()).collect())
        .collect()
}

#[test]
fn criterion_10_performance_and_memory() {
    let n = 100_000usize;
    let d = 2usize;
    let start = std::time::Instant::now();

    let xs = uniform_points(n, d, derive(0xAC10, 1));
    let ys = uniform_points(n, d, derive(0xAC10, 2));
    let (stream, _unprocessed) = interleave(&xs, &ys, derive(0xAC10, 3));
    let levels = Resolution::default_levels(n);
    assert_eq!(levels, 17);
    let out = thin_signed_stream(&stream, 4.0, levels, derive(0xAC10, 4)).unwrap();

    let elapsed = start.elapsed();
    let per_point = (levels as usize).pow(d as u32);
    assert_eq!(
        out.report.support_min, per_point,
        "every item must touch exactly L^d coordinates"
    );
    assert_eq!(out.report.support_max, per_point);
    assert!(
        out.report.touched_coords <= out.report.processed * per_point,
        "memory exceeds processed * L^d"
    );
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "end-to-end thin took {:.1}s (budget 30s)",
        elapsed.as_secs_f64()
    );
    println!(
        "PASS criterion 10: n={n} d={d} L={levels} thinned in {:.2}s; per-item coords = L^d = {per_point}; touched {} <= {}",
        elapsed.as_secs_f64(),
        out.report.touched_coords,
        out.report.processed * per_point
    );
}
