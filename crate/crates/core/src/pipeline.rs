//! The end-to-end two-sample thinning pipeline: transform to uniform
//! marginals, interleave the samples in coin order, encode each point over
//! dyadic boxes, and let the cube walk decide what to keep.
//!
//! With resolution `L` and cube side `theta = T * L^d`, every kept prefix
//! has dyadic sign discrepancy at most `T * L^d` deterministically, and the
//! expected number of discarded points is at most `m/T` for `m` processed
//! items (each encoding has l1 mass exactly `L^d`).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cdf::{transform_stream, CdfModel};
use crate::dyadic::{encode_point, Resolution};
use crate::seed::derive_str;
use crate::walk::{CubeWalk, Decision, Sign, WalkInit};
use crate::{Error, Point, Result};

/// A point labeled with its sample of origin (+1 for X, -1 for Y), or more
/// generally with a Rademacher sign.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedItem {
    pub point: Point,
    pub sign: Sign,
}

/// Parameters of a two-sample thinning run.
#[derive(Debug, Clone)]
pub struct ThinningParams {
    /// Thinning aggressiveness `T`; larger discards fewer points but
    /// allows more discrepancy.
    pub t: f64,
    /// Dyadic resolution override; defaults to `ceil(log2 n)`.
    pub levels: Option<u32>,
    pub seed: u64,
    /// Per-axis marginal models. When present, inputs are passed through
    /// the randomized integral transform first; when absent, inputs must
    /// already lie in the unit cube.
    pub models: Option<Vec<CdfModel>>,
}

impl ThinningParams {
    pub fn new(t: f64, seed: u64) -> Self {
        ThinningParams {
            t,
            levels: None,
            seed,
            models: None,
        }
    }

    /// Out-of-range settings that void the guarantees but are still run.
    pub fn warnings(&self, n: usize) -> Vec<String> {
        let mut out = Vec::new();
        let sqrt_n = (n as f64).sqrt();
        if self.t < 1.0 || self.t > sqrt_n {
            out.push(format!(
                "T = {} outside [1, sqrt(n)] = [1, {:.1}]; the discard/discrepancy trade-off is unguaranteed",
                self.t, sqrt_n
            ));
        }
        out
    }
}

/// Summary of one thinning run, serializable as the report JSON.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ThinningReport {
    pub n: usize,
    pub d: usize,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "L")]
    pub levels: u32,
    pub seed: u64,
    pub kept_x: usize,
    pub kept_y: usize,
    pub discarded_x: usize,
    pub discarded_y: usize,
    pub unprocessed: usize,
    /// Max over prefixes and dyadic boxes of the kept sign discrepancy,
    /// observed by the walk itself.
    pub dyadic_max: u64,
    pub elapsed_ms: u64,
}

/// Interleaving of two samples by fair coins: +1 consumes the next `xs`
/// item, -1 the next `ys` item; stops when one side is exhausted (or coins
/// run out) and reports how many items of the other side were never
/// processed.
pub fn interleave_with_coins<T: Clone>(
    xs: &[T],
    ys: &[T],
    coins: impl IntoIterator<Item = Sign>,
) -> (Vec<(Sign, T)>, usize) {
    let mut stream = Vec::with_capacity(xs.len() + ys.len());
    let (mut ix, mut iy) = (0usize, 0usize);
    if !xs.is_empty() && !ys.is_empty() {
        for coin in coins {
            match coin {
                Sign::Plus => {
                    stream.push((Sign::Plus, xs[ix].clone()));
                    ix += 1;
                }
                Sign::Minus => {
                    stream.push((Sign::Minus, ys[iy].clone()));
                    iy += 1;
                }
            }
            if ix == xs.len() || iy == ys.len() {
                break;
            }
        }
    }
    (stream, (xs.len() - ix) + (ys.len() - iy))
}

/// Coin-order interleaving with seeded fair coins.
pub fn interleave(xs: &[Point], ys: &[Point], seed: u64) -> (Vec<SignedItem>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coins = std::iter::from_fn(move || Some(Sign::random(&mut rng)));
    let (stream, unprocessed) = interleave_with_coins(xs, ys, coins);
    (
        stream
            .into_iter()
            .map(|(sign, point)| SignedItem { point, sign })
            .collect(),
        unprocessed,
    )
}

/// Per-stream thinning counters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StreamReport {
    pub processed: usize,
    pub kept: usize,
    pub discarded: usize,
    /// Max over prefixes and dyadic boxes of |kept sign discrepancy|.
    pub dyadic_max: u64,
    pub theta: f64,
    pub levels: u32,
    pub dim: u32,
    /// Smallest and largest per-item support sizes seen (both equal `L^d`).
    pub support_min: usize,
    pub support_max: usize,
    /// Coordinates materialized by the walk.
    pub touched_coords: usize,
}

/// Result of thinning a signed stream.
#[derive(Debug, Clone)]
pub struct ThinnedStream {
    pub kept: Vec<SignedItem>,
    pub decisions: Vec<Decision>,
    pub report: StreamReport,
}

/// Thin a signed stream of points in `[0,1]^d` with cube side
/// `theta = t * levels^d`. Decisions are online and final.
pub fn thin_signed_stream(
    stream: &[SignedItem],
    t: f64,
    levels: u32,
    seed: u64,
) -> Result<ThinnedStream> {
    thin_signed_stream_with_init(stream, t, levels, WalkInit::Seeded(seed))
}

/// As [`thin_signed_stream`], with an explicit walk initialization
/// (the constant variant exists for deterministic tests).
pub fn thin_signed_stream_with_init(
    stream: &[SignedItem],
    t: f64,
    levels: u32,
    init: WalkInit,
) -> Result<ThinnedStream> {
    let dim = stream.first().map_or(1, |item| item.point.len() as u32);
    let res = Resolution::new(levels, dim)?;
    let theta = t * res.boxes_per_point() as f64;
    let mut walk = CubeWalk::with_init(theta, init)?;

    let mut kept = Vec::new();
    let mut decisions = Vec::with_capacity(stream.len());
    let (mut support_min, mut support_max) = (usize::MAX, 0usize);
    for item in stream {
        let v = encode_point(&item.point, &res)?;
        support_min = support_min.min(v.len());
        support_max = support_max.max(v.len());
        let decision = walk.step(item.sign, &v);
        if decision.kept() {
            kept.push(item.clone());
        }
        decisions.push(decision);
    }
    let stats = walk.stats();
    let report = StreamReport {
        processed: stream.len(),
        kept: kept.len(),
        discarded: stream.len() - kept.len(),
        dyadic_max: stats.max_acc_abs as u64,
        theta,
        levels,
        dim,
        support_min: if stream.is_empty() { 0 } else { support_min },
        support_max,
        touched_coords: stats.touched,
    };
    Ok(ThinnedStream {
        kept,
        decisions,
        report,
    })
}

/// Thinned sub-samples (in original coordinates) plus the run report.
#[derive(Debug, Clone)]
pub struct ThinOutcome {
    pub kept_x: Vec<Point>,
    pub kept_y: Vec<Point>,
    /// Kept items in stream order with unit-cube (post-transform)
    /// coordinates, as fed to the walk; this is what the dyadic and
    /// lattice oracles bound.
    pub kept_stream: Vec<SignedItem>,
    /// Keep/discard decision per processed stream item, in stream order.
    pub decisions: Vec<Decision>,
    pub report: ThinningReport,
}

#[cfg(not(target_arch = "wasm32"))]
fn wall_clock_ms(start: std::time::Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

/// Thin two equal-size samples. With marginal models, points are passed
/// through the randomized transform first (one independent `u` per point)
/// and the kept sets are reported in original coordinates; without models,
/// points must already lie in `[0,1]^d`.
pub fn thin_two_samples(
    xs: &[Point],
    ys: &[Point],
    params: &ThinningParams,
) -> Result<ThinOutcome> {
    #[cfg(not(target_arch = "wasm32"))]
    let start = std::time::Instant::now();
    if xs.len() != ys.len() {
        return Err(Error::SizeMismatch {
            x: xs.len(),
            y: ys.len(),
        });
    }
    let n = xs.len();
    let d = xs
        .first()
        .map_or_else(|| params.models.as_ref().map_or(0, Vec::len), Vec::len);
    let levels = params
        .levels
        .unwrap_or_else(|| Resolution::default_levels(n));

    let (uni_x, uni_y): (Vec<Point>, Vec<Point>) = match &params.models {
        Some(models) => {
            let tx = transform_stream(xs, models, derive_str(params.seed, "transform-x"))?;
            let ty = transform_stream(ys, models, derive_str(params.seed, "transform-y"))?;
            (
                tx.into_iter().map(|r| r.transformed).collect(),
                ty.into_iter().map(|r| r.transformed).collect(),
            )
        }
        None => (xs.to_vec(), ys.to_vec()),
    };

    // Interleave indices so kept decisions map back to original points.
    let idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_str(params.seed, "coins"));
    let coins = std::iter::from_fn(move || Some(Sign::random(&mut rng)));
    let (order, unprocessed) = interleave_with_coins(&idx, &idx, coins);

    let stream: Vec<SignedItem> = order
        .iter()
        .map(|&(sign, i)| SignedItem {
            point: match sign {
                Sign::Plus => uni_x[i].clone(),
                Sign::Minus => uni_y[i].clone(),
            },
            sign,
        })
        .collect();

    let thinned = thin_signed_stream(
        &stream,
        params.t,
        levels,
        derive_str(params.seed, "walk-init"),
    )?;

    let mut kept_x = Vec::new();
    let mut kept_y = Vec::new();
    let (mut discarded_x, mut discarded_y) = (0usize, 0usize);
    for (&(sign, i), decision) in order.iter().zip(&thinned.decisions) {
        match (sign, decision.kept()) {
            (Sign::Plus, true) => kept_x.push(xs[i].clone()),
            (Sign::Minus, true) => kept_y.push(ys[i].clone()),
            (Sign::Plus, false) => discarded_x += 1,
            (Sign::Minus, false) => discarded_y += 1,
        }
    }

    let report = ThinningReport {
        n,
        d,
        t: params.t,
        levels,
        seed: params.seed,
        kept_x: kept_x.len(),
        kept_y: kept_y.len(),
        discarded_x,
        discarded_y,
        unprocessed,
        dyadic_max: thinned.report.dyadic_max,
        #[cfg(not(target_arch = "wasm32"))]
        elapsed_ms: wall_clock_ms(start),
        #[cfg(target_arch = "wasm32")]
        elapsed_ms: 0,
    };
    Ok(ThinOutcome {
        kept_x,
        kept_y,
        kept_stream: thinned.kept,
        decisions: thinned.decisions,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interleave_hand_trace() {
        let xs = vec![vec![0.1], vec![0.2]];
        let ys = vec![vec![0.8], vec![0.9]];
        let coins = [Sign::Plus, Sign::Minus, Sign::Minus];
        let (stream, unprocessed) = interleave_with_coins(&xs, &ys, coins);
        let got: Vec<(f64, i8)> = stream.iter().map(|(s, p)| (p[0], s.as_i8())).collect();
        assert_eq!(got, vec![(0.1, 1), (0.8, -1), (0.9, -1)]);
        assert_eq!(unprocessed, 1);
    }

    #[test]
    fn interleave_empty_side() {
        let xs = vec![vec![0.1], vec![0.2]];
        let (stream, unprocessed) = interleave(&xs, &[], 7);
        assert!(stream.is_empty());
        assert_eq!(unprocessed, 2);
    }

    #[test]
    fn interleave_is_deterministic_and_stops_at_exhaustion() {
        let xs: Vec<Point> = (0..50).map(|i| vec![i as f64 / 50.0]).collect();
        let ys: Vec<Point> = (0..50).map(|i| vec![i as f64 / 50.0]).collect();
        let (a, ua) = interleave(&xs, &ys, 3);
        let (b, ub) = interleave(&xs, &ys, 3);
        assert_eq!(a, b);
        assert_eq!(ua, ub);
        assert_eq!(a.len() + ua, 100);
        let pluses = a.iter().filter(|i| i.sign == Sign::Plus).count();
        let minuses = a.len() - pluses;
        assert!(pluses == 50 || minuses == 50);
    }

    #[test]
    fn single_item_is_kept_with_zero_init() {
        let stream = vec![SignedItem {
            point: vec![0.37],
            sign: Sign::Plus,
        }];
        let out = thin_signed_stream_with_init(&stream, 2.0, 3, WalkInit::Constant(0.0)).unwrap();
        assert_eq!(out.kept.len(), 1);
        assert_eq!(out.report.dyadic_max, 1);
        assert_eq!(out.report.support_min, 3);
        assert_eq!(out.report.support_max, 3);
    }

    #[test]
    fn out_of_cube_point_is_an_error() {
        let stream = vec![SignedItem {
            point: vec![1.5],
            sign: Sign::Plus,
        }];
        assert!(matches!(
            thin_signed_stream(&stream, 2.0, 3, 1),
            Err(Error::CoordinateOutOfRange { .. })
        ));
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let params = ThinningParams::new(2.0, 1);
        assert!(matches!(
            thin_two_samples(&[vec![0.1]], &[], &params),
            Err(Error::SizeMismatch { x: 1, y: 0 })
        ));
    }

    #[test]
    fn identical_multisets_produce_well_formed_report() {
        let pts: Vec<Point> = (0..64).map(|i| vec![(i as f64 + 0.5) / 64.0]).collect();
        let params = ThinningParams::new(2.0, 11);
        let out = thin_two_samples(&pts, &pts, &params).unwrap();
        let r = &out.report;
        assert_eq!(r.n, 64);
        assert_eq!(r.levels, 6);
        assert!(r.kept_x <= 64 && r.kept_y <= 64);
        assert_eq!(
            r.kept_x + r.kept_y + r.discarded_x + r.discarded_y + r.unprocessed,
            128
        );
        assert_eq!(out.kept_x.len(), r.kept_x);
        assert_eq!(out.kept_y.len(), r.kept_y);
    }

    #[test]
    fn decisions_are_online_and_replayable() {
        let pts: Vec<SignedItem> = (0..200)
            .map(|i| SignedItem {
                point: vec![crate::seed::unit_f64(crate::seed::derive(5, i))],
                sign: if i % 3 == 0 { Sign::Plus } else { Sign::Minus },
            })
            .collect();
        let full = thin_signed_stream(&pts, 1.5, 4, 99).unwrap();
        let half = thin_signed_stream(&pts[..100], 1.5, 4, 99).unwrap();
        assert_eq!(&full.decisions[..100], &half.decisions[..]);
    }

    #[test]
    fn params_warn_outside_guaranteed_range() {
        let params = ThinningParams::new(100.0, 1);
        assert_eq!(params.warnings(64).len(), 1);
        let params = ThinningParams::new(0.5, 1);
        assert_eq!(params.warnings(64).len(), 1);
        let params = ThinningParams::new(4.0, 1);
        assert!(params.warnings(64).is_empty());
    }

    #[test]
    fn transform_models_return_original_coordinates() {
        let models = vec![CdfModel::gaussian(0.0, 1.0).unwrap()];
        let xs: Vec<Point> = (0..32).map(|i| vec![(i as f64 - 16.0) / 4.0]).collect();
        let ys: Vec<Point> = (0..32).map(|i| vec![(i as f64 - 15.5) / 4.0]).collect();
        let mut params = ThinningParams::new(1.0, 17);
        params.models = Some(models);
        let out = thin_two_samples(&xs, &ys, &params).unwrap();
        for p in out.kept_x.iter().chain(&out.kept_y) {
            // Original (untransformed) coordinates, not unit-cube ones.
            assert!(p[0].abs() <= 4.0);
            assert!(xs.contains(p) || ys.contains(p));
        }
    }
}
