//! Exact discrepancy oracles.
//!
//! Everything the pipeline promises is checked against these: the
//! two-sample discrepancy over anchored boxes, the prefix sign discrepancy,
//! dyadic and lattice prefix suprema, slice counts, and the star
//! discrepancy against the uniform measure. Counts change only at point
//! coordinates, so anchored-box suprema are attained at candidate corners
//! built from the observed coordinate values; boxes are closed at the
//! corner, `(-inf, b_1] x ... x (-inf, b_d]`.
//!
//! Exact modes carry explicit size guards and return errors rather than
//! silently approximating. Every result carries a witness that can be
//! replayed to reproduce the value.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dyadic::{encode_point, slice_index, Resolution};
use crate::pipeline::SignedItem;
use crate::{Error, Point, Result};

/// Where a supremum was attained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Anchored-box corner (for the finite-box probe: `[lo, hi]`).
    pub corner: Vec<f64>,
    /// 1-based prefix length attaining the value, for prefix oracles.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prefix_len: Option<usize>,
    /// Whether points equal to the corner count as inside. `false` marks a
    /// left-limit witness (star discrepancy only).
    pub inclusive: bool,
}

/// An exact supremum plus the box (and prefix) attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyResult {
    pub value: f64,
    pub witness: Witness,
}

fn point_dim(points: &[Point]) -> Option<usize> {
    points.first().map(Vec::len)
}

fn check_dims(points: &[Point], d: usize) -> Result<()> {
    for p in points {
        if p.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: p.len(),
            });
        }
    }
    Ok(())
}

/// Sorted unique values of one coordinate across all points.
fn axis_candidates<'a>(points: impl Iterator<Item = &'a Point>, axis: usize) -> Vec<f64> {
    let mut vals: Vec<f64> = points.map(|p| p[axis]).collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    vals.dedup();
    vals
}

fn inside_closed(p: &[f64], corner: &[f64]) -> bool {
    p.iter().zip(corner).all(|(&x, &b)| x <= b)
}

/// Count difference `|#X in B - #Y in B|` for the closed anchored box with
/// the given corner (witness replay for [`two_sample_discrepancy`]).
pub fn replay_two_sample(xs: &[Point], ys: &[Point], corner: &[f64]) -> f64 {
    let cx = xs.iter().filter(|p| inside_closed(p, corner)).count() as i64;
    let cy = ys.iter().filter(|p| inside_closed(p, corner)).count() as i64;
    (cx - cy).abs() as f64
}

/// Prefix sign discrepancy at the given corner after `k` items (witness
/// replay for [`prefix_sign_sup`]).
pub fn replay_prefix(stream: &[SignedItem], k: usize, corner: &[f64]) -> f64 {
    stream[..k]
        .iter()
        .filter(|item| inside_closed(&item.point, corner))
        .map(|item| i64::from(item.sign.as_i8()))
        .sum::<i64>()
        .abs() as f64
}

/// Exact two-sample discrepancy over anchored boxes, `sup_B |#X - #Y|`.
///
/// `d = 1` runs in `O(n log n)` by a sorted merge; `d = 2` enumerates the
/// candidate-corner grid with prefix sums; `d = 3` scans candidates
/// directly. Larger dimensions (or oversized grids) are errors pointing to
/// [`two_sample_discrepancy_sampled`].
pub fn two_sample_discrepancy(xs: &[Point], ys: &[Point]) -> Result<DiscrepancyResult> {
    let d = point_dim(xs).or(point_dim(ys)).unwrap_or(0);
    check_dims(xs, d)?;
    check_dims(ys, d)?;
    if d == 0 {
        return Ok(DiscrepancyResult {
            value: 0.0,
            witness: Witness {
                corner: vec![],
                prefix_len: None,
                inclusive: true,
            },
        });
    }
    match d {
        1 => Ok(two_sample_d1(xs, ys)),
        2 => two_sample_d2(xs, ys),
        3 => two_sample_d3(xs, ys),
        _ => Err(Error::SizeGuard {
            what: "two_sample_discrepancy exact mode (dimension)",
            limit: 3,
            requested: d as u64,
            hint: "use two_sample_discrepancy_sampled for a lower bound",
        }),
    }
}

fn two_sample_d1(xs: &[Point], ys: &[Point]) -> DiscrepancyResult {
    let mut vx: Vec<f64> = xs.iter().map(|p| p[0]).collect();
    let mut vy: Vec<f64> = ys.iter().map(|p| p[0]).collect();
    vx.sort_by(|a, b| a.total_cmp(b));
    vy.sort_by(|a, b| a.total_cmp(b));

    let (mut ix, mut iy) = (0usize, 0usize);
    let (mut best, mut best_corner) = (0i64, f64::NEG_INFINITY);
    while ix < vx.len() || iy < vy.len() {
        let next = match (vx.get(ix), vy.get(iy)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => break,
        };
        while ix < vx.len() && vx[ix] <= next {
            ix += 1;
        }
        while iy < vy.len() && vy[iy] <= next {
            iy += 1;
        }
        let diff = (ix as i64 - iy as i64).abs();
        if diff > best {
            best = diff;
            best_corner = next;
        }
    }
    DiscrepancyResult {
        value: best as f64,
        witness: Witness {
            corner: vec![best_corner],
            prefix_len: None,
            inclusive: true,
        },
    }
}

const GRID_CELL_GUARD: u64 = 1 << 24;
const BRUTE_WORK_GUARD: u64 = 1 << 28;

fn two_sample_d2(xs: &[Point], ys: &[Point]) -> Result<DiscrepancyResult> {
    let u0 = axis_candidates(xs.iter().chain(ys), 0);
    let u1 = axis_candidates(xs.iter().chain(ys), 1);
    let cells = (u0.len() as u64) * (u1.len() as u64);
    if cells > GRID_CELL_GUARD {
        return Err(Error::SizeGuard {
            what: "two_sample_discrepancy d=2 corner grid",
            limit: GRID_CELL_GUARD,
            requested: cells,
            hint: "use two_sample_discrepancy_sampled for a lower bound",
        });
    }
    let (w, h) = (u0.len(), u1.len());
    let mut grid = vec![0i64; w * h];
    let rank = |vals: &[f64], x: f64| vals.partition_point(|&v| v < x);
    for (pts, s) in [(xs, 1i64), (ys, -1i64)] {
        for p in pts {
            grid[rank(&u0, p[0]) * h + rank(&u1, p[1])] += s;
        }
    }
    // 2D prefix sums turn per-cell masses into anchored-box counts.
    let (mut best, mut at) = (-1i64, (0usize, 0usize));
    for i in 0..w {
        for j in 0..h {
            if i > 0 {
                grid[i * h + j] += grid[(i - 1) * h + j];
            }
        }
    }
    for i in 0..w {
        let mut row_acc = 0i64;
        for j in 0..h {
            row_acc += grid[i * h + j];
            if row_acc.abs() > best {
                best = row_acc.abs();
                at = (i, j);
            }
        }
    }
    Ok(DiscrepancyResult {
        value: best.max(0) as f64,
        witness: Witness {
            corner: vec![u0[at.0], u1[at.1]],
            prefix_len: None,
            inclusive: true,
        },
    })
}

fn two_sample_d3(xs: &[Point], ys: &[Point]) -> Result<DiscrepancyResult> {
    let axes: Vec<Vec<f64>> = (0..3)
        .map(|a| axis_candidates(xs.iter().chain(ys), a))
        .collect();
    let corners: u64 = axes.iter().map(|v| v.len() as u64).product();
    let work = corners.saturating_mul((xs.len() + ys.len()) as u64);
    if work > BRUTE_WORK_GUARD {
        return Err(Error::SizeGuard {
            what: "two_sample_discrepancy d=3 brute force",
            limit: BRUTE_WORK_GUARD,
            requested: work,
            hint: "use two_sample_discrepancy_sampled for a lower bound",
        });
    }
    let (mut best, mut at) = (-1.0f64, vec![0.0; 3]);
    for &b0 in &axes[0] {
        for &b1 in &axes[1] {
            for &b2 in &axes[2] {
                let corner = [b0, b1, b2];
                let v = replay_two_sample(xs, ys, &corner);
                if v > best {
                    best = v;
                    at = corner.to_vec();
                }
            }
        }
    }
    Ok(DiscrepancyResult {
        value: best.max(0.0),
        witness: Witness {
            corner: at,
            prefix_len: None,
            inclusive: true,
        },
    })
}

/// Lower bound on the two-sample discrepancy from corners at sampled data
/// coordinates, for dimensions beyond the exact oracle.
pub fn two_sample_discrepancy_sampled(
    xs: &[Point],
    ys: &[Point],
    corners: usize,
    seed: u64,
) -> DiscrepancyResult {
    let d = point_dim(xs).or(point_dim(ys)).unwrap_or(0);
    let all: Vec<&Point> = xs.iter().chain(ys).collect();
    let (mut best, mut at) = (0.0f64, vec![f64::NEG_INFINITY; d]);
    for i in 0..corners {
        if all.is_empty() {
            break;
        }
        let corner: Vec<f64> = (0..d)
            .map(|a| {
                let pick = crate::seed::derive(seed, (i * d + a) as u64) as usize % all.len();
                all[pick][a]
            })
            .collect();
        let v = replay_two_sample(xs, ys, &corner);
        if v > best {
            best = v;
            at = corner;
        }
    }
    DiscrepancyResult {
        value: best,
        witness: Witness {
            corner: at,
            prefix_len: None,
            inclusive: true,
        },
    }
}

/// Reference implementations that recompute suprema from scratch; the
/// optimized oracles are tested for exact agreement against these.
pub mod brute {
    use super::*;

    /// `O(n^2)` two-sample discrepancy in one dimension.
    pub fn two_sample_d1(xs: &[Point], ys: &[Point]) -> DiscrepancyResult {
        let candidates = axis_candidates(xs.iter().chain(ys), 0);
        let (mut best, mut at) = (0.0f64, f64::NEG_INFINITY);
        for &b in &candidates {
            let v = replay_two_sample(xs, ys, &[b]);
            if v > best {
                best = v;
                at = b;
            }
        }
        DiscrepancyResult {
            value: best,
            witness: Witness {
                corner: vec![at],
                prefix_len: None,
                inclusive: true,
            },
        }
    }

    /// Prefix sign supremum recomputed independently for every prefix and
    /// candidate corner.
    pub fn prefix_sign_sup(stream: &[SignedItem]) -> DiscrepancyResult {
        let d = stream.first().map_or(0, |i| i.point.len());
        let points: Vec<Point> = stream.iter().map(|i| i.point.clone()).collect();
        let axes: Vec<Vec<f64>> = (0..d).map(|a| axis_candidates(points.iter(), a)).collect();
        let mut best = DiscrepancyResult {
            value: 0.0,
            witness: Witness {
                corner: vec![f64::NEG_INFINITY; d],
                prefix_len: None,
                inclusive: true,
            },
        };
        let mut corner = vec![0.0f64; d];
        let mut pick = vec![0usize; d];
        if d == 0 {
            return best;
        }
        loop {
            for a in 0..d {
                corner[a] = axes[a][pick[a]];
            }
            for k in 1..=stream.len() {
                let v = replay_prefix(stream, k, &corner);
                if v > best.value {
                    best.value = v;
                    best.witness.corner = corner.clone();
                    best.witness.prefix_len = Some(k);
                }
            }
            let mut a = 0;
            loop {
                if a == d {
                    return best;
                }
                pick[a] += 1;
                if pick[a] < axes[a].len() {
                    break;
                }
                pick[a] = 0;
                a += 1;
            }
        }
    }
}

/// Segment tree over compressed coordinates maintaining the max and min
/// prefix sums of the leaf array under point updates.
struct PrefixTree {
    size: usize,
    sum: Vec<i64>,
    max_pref: Vec<i64>,
    min_pref: Vec<i64>,
}

impl PrefixTree {
    fn new(leaves: usize) -> Self {
        let size = leaves.next_power_of_two().max(1);
        PrefixTree {
            size,
            sum: vec![0; 2 * size],
            max_pref: vec![0; 2 * size],
            min_pref: vec![0; 2 * size],
        }
    }

    fn add(&mut self, leaf: usize, delta: i64) {
        let mut node = self.size + leaf;
        self.sum[node] += delta;
        self.max_pref[node] = self.sum[node].max(0);
        self.min_pref[node] = self.sum[node].min(0);
        node /= 2;
        while node >= 1 {
            let (l, r) = (2 * node, 2 * node + 1);
            self.sum[node] = self.sum[l] + self.sum[r];
            self.max_pref[node] = self.max_pref[l].max(self.sum[l] + self.max_pref[r]);
            self.min_pref[node] = self.min_pref[l].min(self.sum[l] + self.min_pref[r]);
            node /= 2;
        }
    }

    fn max_abs_prefix(&self) -> i64 {
        self.max_pref[1].max(-self.min_pref[1])
    }
}

/// Exact max over prefixes `k` and anchored boxes of the sign discrepancy
/// `|sum_{i<=k} sign_i 1{x_i in B}|`.
///
/// `d = 1` runs in `O(m log m)`; `d in {2, 3}` updates a candidate-corner
/// grid incrementally. Guarded by total work for larger instances.
pub fn prefix_sign_sup(stream: &[SignedItem]) -> Result<DiscrepancyResult> {
    let d = stream.first().map_or(0, |i| i.point.len());
    let points: Vec<Point> = stream.iter().map(|i| i.point.clone()).collect();
    check_dims(&points, d)?;
    if d == 0 {
        return Ok(DiscrepancyResult {
            value: 0.0,
            witness: Witness {
                corner: vec![],
                prefix_len: None,
                inclusive: true,
            },
        });
    }
    if d == 1 {
        return Ok(prefix_sign_sup_d1(stream));
    }
    if d > 3 {
        return Err(Error::SizeGuard {
            what: "prefix_sign_sup exact mode (dimension)",
            limit: 3,
            requested: d as u64,
            hint: "restrict to d <= 3 or verify via the dyadic bound",
        });
    }
    let axes: Vec<Vec<f64>> = (0..d).map(|a| axis_candidates(points.iter(), a)).collect();
    let cells: u64 = axes.iter().map(|v| v.len() as u64).product();
    let work = cells.saturating_mul(stream.len() as u64);
    if work > BRUTE_WORK_GUARD {
        return Err(Error::SizeGuard {
            what: "prefix_sign_sup corner grid",
            limit: BRUTE_WORK_GUARD,
            requested: work,
            hint: "reduce n, or verify via the dyadic bound",
        });
    }

    // Suffix-orthant updates: item at ranks r is inside exactly the boxes
    // with corner indices >= r on every axis. A box value changes only
    // when written, so the running max over writes is the global sup.
    let dims: Vec<usize> = axes.iter().map(Vec::len).collect();
    let mut grid = vec![0i64; cells as usize];
    let strides: Vec<usize> = {
        let mut s = vec![1usize; d];
        for a in (0..d.saturating_sub(1)).rev() {
            s[a] = s[a + 1] * dims[a + 1];
        }
        s
    };
    let mut best = DiscrepancyResult {
        value: 0.0,
        witness: Witness {
            corner: vec![f64::NEG_INFINITY; d],
            prefix_len: None,
            inclusive: true,
        },
    };
    for (k, item) in stream.iter().enumerate() {
        let s = i64::from(item.sign.as_i8());
        let ranks: Vec<usize> = (0..d)
            .map(|a| axes[a].partition_point(|&v| v < item.point[a]))
            .collect();
        let mut pick = ranks.clone();
        'orthant: loop {
            let ix: usize = (0..d).map(|a| pick[a] * strides[a]).sum();
            grid[ix] += s;
            if grid[ix].abs() as f64 > best.value {
                best.value = grid[ix].abs() as f64;
                best.witness.corner = (0..d).map(|a| axes[a][pick[a]]).collect();
                best.witness.prefix_len = Some(k + 1);
            }
            let mut a = 0;
            loop {
                if a == d {
                    break 'orthant;
                }
                pick[a] += 1;
                if pick[a] < dims[a] {
                    break;
                }
                pick[a] = ranks[a];
                a += 1;
            }
        }
    }
    Ok(best)
}

fn prefix_sign_sup_d1(stream: &[SignedItem]) -> DiscrepancyResult {
    let coords = axis_candidates(stream.iter().map(|i| &i.point), 0);
    let mut tree = PrefixTree::new(coords.len());
    let (mut best, mut best_k) = (0i64, 0usize);
    for (k, item) in stream.iter().enumerate() {
        let leaf = coords.partition_point(|&v| v < item.point[0]);
        tree.add(leaf, i64::from(item.sign.as_i8()));
        let cur = tree.max_abs_prefix();
        if cur > best {
            best = cur;
            best_k = k + 1;
        }
    }
    if best == 0 {
        return DiscrepancyResult {
            value: 0.0,
            witness: Witness {
                corner: vec![f64::NEG_INFINITY],
                prefix_len: None,
                inclusive: true,
            },
        };
    }
    // Recover the attaining corner by replaying the witness prefix.
    let mut acc = vec![0i64; coords.len()];
    for item in &stream[..best_k] {
        let leaf = coords.partition_point(|&v| v < item.point[0]);
        acc[leaf] += i64::from(item.sign.as_i8());
    }
    let mut run = 0i64;
    let mut corner = coords[0];
    for (i, &delta) in acc.iter().enumerate() {
        run += delta;
        if run.abs() == best {
            corner = coords[i];
            break;
        }
    }
    DiscrepancyResult {
        value: best as f64,
        witness: Witness {
            corner: vec![corner],
            prefix_len: Some(best_k),
            inclusive: true,
        },
    }
}

/// Exact max over all dyadic boxes and prefixes of the kept sign
/// discrepancy, by streaming sparse accumulation over box encodings.
pub fn dyadic_prefix_sup(stream: &[SignedItem], levels: u32) -> Result<u64> {
    let d = stream.first().map_or(1, |i| i.point.len());
    let res = Resolution::new(levels, d as u32)?;
    let mut acc: HashMap<u64, i64> = HashMap::new();
    let mut best = 0i64;
    for item in stream {
        let v = encode_point(&item.point, &res)?;
        let s = i64::from(item.sign.as_i8());
        for (id, _) in v.iter() {
            let slot = acc.entry(id).or_insert(0);
            *slot += s;
            best = best.max(slot.abs());
        }
    }
    Ok(best as u64)
}

/// Exact max over all lattice boxes (products of `[0, (j+1)/2^(L-1)]`) and
/// prefixes. Exact mode requires `(L-1) * d <= 22`.
pub fn lattice_prefix_sup(stream: &[SignedItem], levels: u32) -> Result<u64> {
    let d = stream.first().map_or(1, |i| i.point.len());
    let res = Resolution::new(levels, d as u32)?;
    let bits = u64::from(levels - 1) * d as u64;
    if bits > 22 {
        return Err(Error::SizeGuard {
            what: "lattice_prefix_sup exact mode ((L-1)*d)",
            limit: 22,
            requested: bits,
            hint: "use the dyadic bound times L^d instead",
        });
    }
    let cells = res.lattice_cells() as usize;
    let mut grid = vec![0i64; cells.pow(d as u32)];
    let strides: Vec<usize> = (0..d).map(|a| cells.pow(a as u32)).collect();
    let mut best = 0i64;
    for item in stream {
        let bins = slice_index(&item.point, &res)?;
        let s = i64::from(item.sign.as_i8());
        // The lattice boxes containing the point form the suffix orthant
        // j >= bin on every axis.
        let mut pick: Vec<usize> = bins.iter().map(|&b| b as usize).collect();
        'orthant: loop {
            let ix: usize = (0..d).map(|a| pick[a] * strides[a]).sum();
            grid[ix] += s;
            best = best.max(grid[ix].abs());
            let mut a = 0;
            loop {
                if a == d {
                    break 'orthant;
                }
                pick[a] += 1;
                if pick[a] < cells {
                    break;
                }
                pick[a] = bins[a] as usize;
                a += 1;
            }
        }
    }
    Ok(best as u64)
}

/// Max over all `d * 2^(L-1)` slices of the number of points falling in
/// the slice.
pub fn max_slice_count(points: &[Point], levels: u32) -> Result<u64> {
    let d = points.first().map_or(1, |p| p.len());
    let res = Resolution::new(levels, d as u32)?;
    let cells = res.lattice_cells() as usize;
    let mut hist = vec![0u64; d * cells];
    for p in points {
        for (a, bin) in slice_index(p, &res)?.into_iter().enumerate() {
            hist[a * cells + bin as usize] += 1;
        }
    }
    Ok(hist.into_iter().max().unwrap_or(0))
}

/// Signed star-discrepancy deviation at a corner: count minus `n * vol`,
/// with the count closed (`<=`) or open (`<`) per axis as recorded in the
/// witness (replay for [`star_discrepancy_uniform`]).
pub fn replay_star(points: &[Point], corner: &[f64], inclusive: bool) -> f64 {
    let vol: f64 = corner.iter().product();
    let count = points
        .iter()
        .filter(|p| {
            p.iter()
                .zip(corner)
                .all(|(&x, &b)| if inclusive { x <= b } else { x < b })
        })
        .count() as f64;
    if inclusive {
        count - points.len() as f64 * vol
    } else {
        points.len() as f64 * vol - count
    }
}

/// Exact star discrepancy against the uniform measure on the unit cube,
/// `sup_B |#B - n vol(B)|` over anchored boxes; exact for `d <= 2`.
pub fn star_discrepancy_uniform(points: &[Point]) -> Result<DiscrepancyResult> {
    let d = point_dim(points).unwrap_or(0);
    check_dims(points, d)?;
    for p in points {
        for (axis, &x) in p.iter().enumerate() {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::CoordinateOutOfRange { axis, value: x });
            }
        }
    }
    if d == 0 {
        return Ok(DiscrepancyResult {
            value: 0.0,
            witness: Witness {
                corner: vec![],
                prefix_len: None,
                inclusive: true,
            },
        });
    }
    if d > 2 {
        return Err(Error::SizeGuard {
            what: "star_discrepancy_uniform exact mode (dimension)",
            limit: 2,
            requested: d as u64,
            hint: "exact star discrepancy beyond d = 2 is out of scope",
        });
    }
    // The sup over each grid cell is attained in the limit at one of its
    // corners: closed count at the lower corner, open count at the upper.
    let axes: Vec<Vec<f64>> = (0..d)
        .map(|a| {
            let mut v = axis_candidates(points.iter(), a);
            if *v.last().unwrap_or(&0.0) < 1.0 {
                v.push(1.0);
            }
            v
        })
        .collect();
    let mut best = DiscrepancyResult {
        value: -1.0,
        witness: Witness {
            corner: vec![0.0; d],
            prefix_len: None,
            inclusive: true,
        },
    };
    let mut pick = vec![0usize; d];
    loop {
        let corner: Vec<f64> = (0..d).map(|a| axes[a][pick[a]]).collect();
        for inclusive in [true, false] {
            let v = replay_star(points, &corner, inclusive);
            if v > best.value {
                best.value = v;
                best.witness = Witness {
                    corner: corner.clone(),
                    prefix_len: None,
                    inclusive,
                };
            }
        }
        let mut a = 0;
        loop {
            if a == d {
                best.value = best.value.max(0.0);
                return Ok(best);
            }
            pick[a] += 1;
            if pick[a] < axes[a].len() {
                break;
            }
            pick[a] = 0;
            a += 1;
        }
    }
}

/// Empirical probe for boxes with both corners free, exact in one
/// dimension: `sup_{[a,b]} |#X in [a,b] - #Y in [a,b]|`. The witness
/// corner holds `[a, b]`.
pub fn finite_box_discrepancy_d1(xs: &[Point], ys: &[Point]) -> Result<DiscrepancyResult> {
    check_dims(xs, 1)?;
    check_dims(ys, 1)?;
    let coords = axis_candidates(xs.iter().chain(ys), 0);
    let mut weight = vec![0i64; coords.len()];
    for p in xs {
        weight[coords.partition_point(|&v| v < p[0])] += 1;
    }
    for p in ys {
        weight[coords.partition_point(|&v| v < p[0])] -= 1;
    }
    // Kadane over weights in both directions.
    let mut best = 0i64;
    let mut best_range = (0usize, 0usize);
    for flip in [1i64, -1] {
        let (mut run, mut start) = (0i64, 0usize);
        for (i, &w) in weight.iter().enumerate() {
            run += flip * w;
            if run < 0 {
                run = 0;
                start = i + 1;
            } else if run > best {
                best = run;
                best_range = (start, i);
            }
        }
    }
    let corner = if coords.is_empty() {
        vec![0.0, 0.0]
    } else {
        vec![
            coords[best_range.0.min(coords.len() - 1)],
            coords[best_range.1],
        ]
    };
    Ok(DiscrepancyResult {
        value: best as f64,
        witness: Witness {
            corner,
            prefix_len: None,
            inclusive: true,
        },
    })
}

/// Count of points inside the closed interval box (replay for
/// [`finite_box_discrepancy_d1`]).
pub fn replay_finite_box_d1(xs: &[Point], ys: &[Point], lo: f64, hi: f64) -> f64 {
    let cx = xs.iter().filter(|p| p[0] >= lo && p[0] <= hi).count() as i64;
    let cy = ys.iter().filter(|p| p[0] >= lo && p[0] <= hi).count() as i64;
    (cx - cy).abs() as f64
}
