//! Dyadic intervals, boxes, lattice decomposition, and slice geometry on
//! the unit cube.
//!
//! A dyadic interval at level `l < L` is `[j/2^l, (j+1)/2^l)`; a dyadic box
//! is a product of `d` such intervals. Intervals are half-open with `x = 1`
//! clamped to the rightmost interval, which makes point encoding a total
//! function (for continuous inputs no point lies on a boundary almost
//! surely, so the convention is only a tie-break).
//!
//! Index layout, fixed for serialized streams: an interval `(l, j)` has the
//! per-axis flat index `2^l - 1 + j` in `[0, 2^L - 2]`; a box's global flat
//! index combines per-axis flats in mixed radix `M = 2^L - 1` with axis 0
//! least significant, giving ids in `[0, M^d)`.

use std::fmt;

use crate::sparse::SparseVector;
use crate::{Error, Result};

/// Resolution parameter: `levels` dyadic levels per axis in dimension `dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolution {
    levels: u32,
    dim: u32,
    /// Per-axis radix `2^levels - 1`.
    radix: u64,
}

impl Resolution {
    pub fn new(levels: u32, dim: u32) -> Result<Self> {
        if levels < 1 || dim < 1 || levels > 62 {
            return Err(Error::ResolutionOverflow { l: levels, d: dim });
        }
        let radix = (1u64 << levels) - 1;
        // (2^L - 1)^d must fit the 64-bit id space.
        if radix.checked_pow(dim).is_none() {
            return Err(Error::ResolutionOverflow { l: levels, d: dim });
        }
        Ok(Resolution { levels, dim, radix })
    }

    /// Default resolution for a sample of size `n`: `ceil(log2 n)`, at least 1.
    pub fn default_levels(n: usize) -> u32 {
        (usize::BITS - n.max(2).saturating_sub(1).leading_zeros()).max(1)
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Number of dyadic intervals per axis, `2^L - 1`.
    pub fn intervals_per_axis(&self) -> u64 {
        self.radix
    }

    /// Total number of dyadic boxes, `(2^L - 1)^d`.
    pub fn num_boxes(&self) -> u64 {
        self.radix.pow(self.dim)
    }

    /// Boxes containing any one point: `L^d`.
    pub fn boxes_per_point(&self) -> u64 {
        (self.levels as u64).pow(self.dim)
    }

    /// Number of finest-level cells per axis, `2^(L-1)`.
    pub fn lattice_cells(&self) -> u64 {
        1u64 << (self.levels - 1)
    }
}

/// A dyadic interval `[offset/2^level, (offset+1)/2^level)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicIntervalId {
    pub level: u32,
    pub offset: u64,
}

impl DyadicIntervalId {
    /// Per-axis flat index `2^level - 1 + offset`.
    pub fn flat(&self) -> u64 {
        (1u64 << self.level) - 1 + self.offset
    }

    pub fn from_flat(flat: u64) -> Self {
        let level = u64::BITS - (flat + 1).leading_zeros() - 1;
        DyadicIntervalId {
            level,
            offset: flat + 1 - (1u64 << level),
        }
    }

    /// Endpoints `(offset/2^level, (offset+1)/2^level)`.
    pub fn extent(&self) -> (f64, f64) {
        let scale = (1u64 << self.level) as f64;
        (self.offset as f64 / scale, (self.offset + 1) as f64 / scale)
    }
}

/// A dyadic box: one dyadic interval per axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DyadicBoxId {
    pub parts: Vec<DyadicIntervalId>,
}

impl DyadicBoxId {
    /// Global flat index in mixed radix `2^L - 1`, axis 0 least significant.
    pub fn flat(&self, res: &Resolution) -> u64 {
        self.parts.iter().rev().fold(0u64, |acc, part| {
            acc * res.intervals_per_axis() + part.flat()
        })
    }

    pub fn from_flat(mut flat: u64, res: &Resolution) -> Self {
        let mut parts = Vec::with_capacity(res.dim() as usize);
        for _ in 0..res.dim() {
            parts.push(DyadicIntervalId::from_flat(flat % res.intervals_per_axis()));
            flat /= res.intervals_per_axis();
        }
        DyadicBoxId { parts }
    }

    /// Per-axis `(lo, hi)` endpoints.
    pub fn extent(&self) -> Vec<(f64, f64)> {
        self.parts.iter().map(DyadicIntervalId::extent).collect()
    }

    /// Half-open membership test, with the rightmost cells closed at 1.
    pub fn contains(&self, p: &[f64]) -> bool {
        self.parts.iter().zip(p).all(|(part, &x)| {
            let (lo, hi) = part.extent();
            x >= lo && (x < hi || (x == 1.0 && hi == 1.0))
        })
    }
}

impl fmt::Display for DyadicBoxId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, part) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            write!(f, "{}:{}", part.level, part.offset)?;
        }
        Ok(())
    }
}

fn check_unit_coordinate(x: f64, axis: usize) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::CoordinateOutOfRange { axis, value: x });
    }
    Ok(())
}

/// The `L` dyadic intervals containing `x`, one per level.
///
/// At level `l` the interval offset is `floor(x * 2^l)`, clamped so that
/// `x = 1` lands in the rightmost interval.
pub fn encode_coordinate(x: f64, levels: u32) -> Result<Vec<DyadicIntervalId>> {
    check_unit_coordinate(x, 0)?;
    Ok((0..levels)
        .map(|level| {
            let cells = 1u64 << level;
            let offset = ((x * cells as f64) as u64).min(cells - 1);
            DyadicIntervalId { level, offset }
        })
        .collect())
}

/// Per-axis flat indices of the intervals containing `x`, one per level.
fn coordinate_flats(x: f64, levels: u32) -> Vec<u64> {
    (0..levels)
        .map(|level| {
            let cells = 1u64 << level;
            let offset = ((x * cells as f64) as u64).min(cells - 1);
            cells - 1 + offset
        })
        .collect()
}

/// Indicator vector over dyadic boxes containing `p`: exactly `L^d` entries,
/// all equal to 1 (the product of the per-coordinate interval lists).
pub fn encode_point(p: &[f64], res: &Resolution) -> Result<SparseVector> {
    if p.len() != res.dim() as usize {
        return Err(Error::DimensionMismatch {
            expected: res.dim() as usize,
            got: p.len(),
        });
    }
    for (axis, &x) in p.iter().enumerate() {
        check_unit_coordinate(x, axis)?;
    }
    let d = p.len();
    let levels = res.levels() as usize;
    let per_axis: Vec<Vec<u64>> = p
        .iter()
        .map(|&x| coordinate_flats(x, res.levels()))
        .collect();

    // Odometer over the d per-axis level choices.
    let mut ids = Vec::with_capacity(levels.pow(d as u32));
    let mut pick = vec![0usize; d];
    loop {
        let mut id = 0u64;
        for axis in (0..d).rev() {
            id = id * res.intervals_per_axis() + per_axis[axis][pick[axis]];
        }
        ids.push(id);
        let mut axis = 0;
        loop {
            if axis == d {
                return Ok(SparseVector::indicator(ids));
            }
            pick[axis] += 1;
            if pick[axis] < levels {
                break;
            }
            pick[axis] = 0;
            axis += 1;
        }
    }
}

/// Endpoints of a dyadic box (free-function form of [`DyadicBoxId::extent`]).
pub fn box_extent(id: &DyadicBoxId) -> Vec<(f64, f64)> {
    id.extent()
}

/// Decompose `[0, upper/2^(L-1)]` into at most `L` disjoint dyadic
/// intervals, left to right (one per set bit of `upper`).
fn decompose_lattice_interval(upper: u64, res: &Resolution) -> Vec<DyadicIntervalId> {
    let finest = res.levels() - 1;
    let mut parts = Vec::new();
    let mut consumed = 0u64; // in finest-level cells
    for bit in (0..res.levels()).rev() {
        let len = 1u64 << bit; // cells
        if upper & len != 0 {
            parts.push(DyadicIntervalId {
                level: finest - bit,
                offset: consumed >> bit,
            });
            consumed += len;
        }
    }
    parts
}

/// Partition the lattice box with per-axis upper bounds `uppers[a]/2^(L-1)`
/// into at most `L^d` disjoint dyadic boxes.
///
/// `uppers[a]` is the upper endpoint counted in finest-level cells, i.e.
/// `j+1` for a lattice interval `[0, (j+1)/2^(L-1)]`; it must lie in
/// `[1, 2^(L-1)]`.
pub fn lattice_partition(uppers: &[u64], res: &Resolution) -> Result<Vec<DyadicBoxId>> {
    if uppers.len() != res.dim() as usize {
        return Err(Error::DimensionMismatch {
            expected: res.dim() as usize,
            got: uppers.len(),
        });
    }
    let max = res.lattice_cells();
    for (axis, &upper) in uppers.iter().enumerate() {
        if upper < 1 || upper > max {
            return Err(Error::NonLatticeBound { axis, upper, max });
        }
    }
    let per_axis: Vec<Vec<DyadicIntervalId>> = uppers
        .iter()
        .map(|&upper| decompose_lattice_interval(upper, res))
        .collect();

    let mut boxes = Vec::new();
    let d = uppers.len();
    let mut pick = vec![0usize; d];
    loop {
        boxes.push(DyadicBoxId {
            parts: (0..d).map(|a| per_axis[a][pick[a]]).collect(),
        });
        let mut axis = 0;
        loop {
            if axis == d {
                return Ok(boxes);
            }
            pick[axis] += 1;
            if pick[axis] < per_axis[axis].len() {
                break;
            }
            pick[axis] = 0;
            axis += 1;
        }
    }
}

/// Per-axis index of the width-`2^-(L-1)` slab containing `p`, clamped so
/// `x = 1` lands in the last slab. There are `d * 2^(L-1)` slices total.
pub fn slice_index(p: &[f64], res: &Resolution) -> Result<Vec<u64>> {
    if p.len() != res.dim() as usize {
        return Err(Error::DimensionMismatch {
            expected: res.dim() as usize,
            got: p.len(),
        });
    }
    let cells = res.lattice_cells();
    p.iter()
        .enumerate()
        .map(|(axis, &x)| {
            check_unit_coordinate(x, axis)?;
            Ok(((x * cells as f64) as u64).min(cells - 1))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn res(l: u32, d: u32) -> Resolution {
        Resolution::new(l, d).unwrap()
    }

    #[test]
    fn encode_coordinate_examples() {
        let ids = encode_coordinate(0.3, 3).unwrap();
        let got: Vec<(u32, u64)> = ids.iter().map(|i| (i.level, i.offset)).collect();
        assert_eq!(got, vec![(0, 0), (1, 0), (2, 1)]);

        let ids = encode_coordinate(0.0, 2).unwrap();
        let got: Vec<(u32, u64)> = ids.iter().map(|i| (i.level, i.offset)).collect();
        assert_eq!(got, vec![(0, 0), (1, 0)]);

        let ids = encode_coordinate(1.0, 2).unwrap();
        let got: Vec<(u32, u64)> = ids.iter().map(|i| (i.level, i.offset)).collect();
        assert_eq!(got, vec![(0, 0), (1, 1)]);

        assert!(encode_coordinate(-0.1, 2).is_err());
        assert!(encode_coordinate(1.1, 2).is_err());
    }

    #[test]
    fn encode_point_sparsity_is_levels_to_the_d() {
        let v = encode_point(&[0.3], &res(3, 1)).unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v.l1_norm(), 3.0);

        let v = encode_point(&[0.3, 0.8], &res(2, 2)).unwrap();
        assert_eq!(v.len(), 4);

        let v = encode_point(&[0.77], &res(1, 1)).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(
            v.get(
                DyadicIntervalId {
                    level: 0,
                    offset: 0
                }
                .flat()
            ),
            1.0
        );
    }

    #[test]
    fn encode_point_d2_is_product_of_axis_encodings() {
        let r = res(2, 2);
        let v = encode_point(&[0.3, 0.8], &r).unwrap();
        // axis 0: (0,0), (1,0); axis 1: (0,0), (1,1)
        for (i0, i1) in [
            ((0, 0), (0, 0)),
            ((1, 0), (0, 0)),
            ((0, 0), (1, 1)),
            ((1, 0), (1, 1)),
        ] {
            let b = DyadicBoxId {
                parts: vec![
                    DyadicIntervalId {
                        level: i0.0,
                        offset: i0.1,
                    },
                    DyadicIntervalId {
                        level: i1.0,
                        offset: i1.1,
                    },
                ],
            };
            assert_eq!(v.get(b.flat(&r)), 1.0, "missing box {b}");
        }
    }

    #[test]
    fn box_extent_examples() {
        let b = DyadicBoxId {
            parts: vec![DyadicIntervalId {
                level: 2,
                offset: 1,
            }],
        };
        assert_eq!(box_extent(&b), vec![(0.25, 0.5)]);

        let b = DyadicBoxId {
            parts: vec![DyadicIntervalId {
                level: 0,
                offset: 0,
            }],
        };
        assert_eq!(box_extent(&b), vec![(0.0, 1.0)]);

        let b = DyadicBoxId {
            parts: vec![
                DyadicIntervalId {
                    level: 1,
                    offset: 1,
                },
                DyadicIntervalId {
                    level: 2,
                    offset: 3,
                },
            ],
        };
        assert_eq!(box_extent(&b), vec![(0.5, 1.0), (0.75, 1.0)]);
    }

    #[test]
    fn flat_roundtrip() {
        let r = res(4, 2);
        for flat in 0..r.num_boxes() {
            let b = DyadicBoxId::from_flat(flat, &r);
            assert_eq!(b.flat(&r), flat);
            for part in &b.parts {
                assert!(part.level < r.levels());
                assert!(part.offset < (1 << part.level));
            }
        }
    }

    #[test]
    fn lattice_partition_examples() {
        let r = res(3, 1);
        // [0, 3/4] -> [0, 1/2] + [1/2, 3/4]
        let parts = lattice_partition(&[3], &r).unwrap();
        let extents: Vec<_> = parts.iter().map(|b| b.extent()[0]).collect();
        assert_eq!(extents, vec![(0.0, 0.5), (0.5, 0.75)]);
        assert!(parts.len() <= 3);

        // [0, 1] is the single level-0 interval.
        let parts = lattice_partition(&[4], &r).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].extent()[0], (0.0, 1.0));

        // d=2, L=2: [0, 1/2] x [0, 1] is one dyadic box.
        let r2 = res(2, 2);
        let parts = lattice_partition(&[1, 2], &r2).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].extent(), vec![(0.0, 0.5), (0.0, 1.0)]);

        assert!(lattice_partition(&[0], &r).is_err());
        assert!(lattice_partition(&[5], &r).is_err());
    }

    #[test]
    fn slice_index_examples() {
        assert_eq!(slice_index(&[0.6], &res(2, 1)).unwrap(), vec![1]);
        assert_eq!(slice_index(&[0.2, 0.9], &res(1, 2)).unwrap(), vec![0, 0]);
        assert_eq!(slice_index(&[1.0], &res(3, 1)).unwrap(), vec![3]);
    }

    #[test]
    fn default_levels_is_ceil_log2() {
        assert_eq!(Resolution::default_levels(2), 1);
        assert_eq!(Resolution::default_levels(3), 2);
        assert_eq!(Resolution::default_levels(4), 2);
        assert_eq!(Resolution::default_levels(5), 3);
        assert_eq!(Resolution::default_levels(1024), 10);
        assert_eq!(Resolution::default_levels(1025), 11);
        assert_eq!(Resolution::default_levels(1), 1);
    }

    #[test]
    fn resolution_guards_overflow() {
        assert!(Resolution::new(31, 2).is_ok());
        assert!(Resolution::new(33, 2).is_err());
        assert!(
            Resolution::new(22, 3).is_err_and(|e| matches!(e, Error::ResolutionOverflow { .. }))
        );
        assert!(Resolution::new(0, 1).is_err());
    }
}
