//! The cube-confined walk that makes online keep/discard decisions.
//!
//! The walk state `w` lives in `K = [-theta/2, theta/2]^N` and starts
//! uniform on `K`. A signed sparse vector is accepted iff adding it keeps
//! every coordinate of `w` inside `K`; on acceptance `w` moves, otherwise
//! it stays. With Rademacher signs independent of the vectors the chain is
//! symmetric, so `w` stays uniform on `K` and each term is discarded with
//! probability at most `l1(v)/theta`. Running sums of accepted terms are
//! bounded by `theta` in sup norm deterministically, since
//! `|sum| = |w_k - w_0| <= theta/2 + theta/2` coordinate-wise.
//!
//! `N` is astronomically large for dyadic encodings, so the initial state
//! is materialized lazily: coordinate `c`'s initial value is a keyed
//! pseudorandom function of `(seed, c)`, identical no matter when or in
//! what order coordinates are first touched.

use std::collections::HashMap;

use rand::Rng;

use crate::seed::{derive, unit_f64};
use crate::sparse::SparseVector;
use crate::{Error, Result};

/// A Rademacher sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i8(s: i8) -> Option<Sign> {
        match s {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    /// A fair coin.
    pub fn random(rng: &mut impl Rng) -> Sign {
        if rng.random::<bool>() {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Outcome of one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Accepted,
    CubeExit,
}

impl Decision {
    pub fn kept(self) -> bool {
        matches!(self, Decision::Accepted)
    }
}

/// How the initial state `w_0` is defined.
#[derive(Debug, Clone, Copy)]
pub enum WalkInit {
    /// Keyed pseudorandom initialization, uniform on the cube.
    Seeded(u64),
    /// Every coordinate starts at the given constant. Deterministic test
    /// hook; production paths construct only `Seeded`.
    Constant(f64),
}

/// Accepted/discarded counts and observed magnitudes.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize)]
pub struct WalkStats {
    pub accepted: u64,
    pub discarded: u64,
    /// Max over time and coordinates of |accumulated accepted sum|.
    pub max_acc_abs: f64,
    /// Max over time and coordinates of the touched state magnitude.
    pub max_value_abs: f64,
    pub touched: usize,
}

#[derive(Debug, Clone, Copy)]
struct Slot {
    init: f64,
    /// Accumulated sum of accepted signed values at this coordinate; the
    /// semantic state is `init + acc`.
    acc: f64,
}

/// Initial value of coordinate `c`, independent of touch order.
fn init_value(init: WalkInit, theta: f64, c: u64) -> f64 {
    match init {
        // u - 0.5 is exact and lies in [-1/2, 1/2), so the product cannot
        // round past theta/2.
        WalkInit::Seeded(key) => (unit_f64(derive(key, c)) - 0.5) * theta,
        WalkInit::Constant(v) => v,
    }
}

/// Lazily materialized walk state on `[-theta/2, theta/2]^N`.
#[derive(Debug, Clone)]
pub struct CubeWalk {
    theta: f64,
    half: f64,
    init: WalkInit,
    touched: HashMap<u64, Slot>,
    accepted: u64,
    discarded: u64,
    max_acc_abs: f64,
    max_value_abs: f64,
}

impl CubeWalk {
    pub fn new(theta: f64, seed: u64) -> Result<Self> {
        CubeWalk::with_init(theta, WalkInit::Seeded(seed))
    }

    pub fn with_init(theta: f64, init: WalkInit) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::NonPositiveTheta(theta));
        }
        if let WalkInit::Constant(c) = init {
            assert!(c.abs() <= theta / 2.0, "constant init {c} outside the cube");
        }
        Ok(CubeWalk {
            theta,
            half: theta / 2.0,
            init,
            touched: HashMap::new(),
            accepted: 0,
            discarded: 0,
            max_acc_abs: 0.0,
            max_value_abs: 0.0,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    #[inline]
    fn slot(&mut self, c: u64) -> &mut Slot {
        let (init, theta) = (self.init, self.theta);
        self.touched.entry(c).or_insert_with(|| Slot {
            init: init_value(init, theta, c),
            acc: 0.0,
        })
    }

    /// Current state of coordinate `c`, materializing it on first use.
    pub fn value_at(&mut self, c: u64) -> f64 {
        let slot = self.slot(c);
        slot.init + slot.acc
    }

    /// Accumulated accepted sum at coordinate `c` (state minus start).
    pub fn accumulated_at(&mut self, c: u64) -> f64 {
        self.slot(c).acc
    }

    /// Accept `sign * v` iff every support coordinate stays inside the
    /// cube; the update is all-or-nothing and only support coordinates are
    /// read or written.
    pub fn step(&mut self, sign: Sign, v: &SparseVector) -> Decision {
        let s = sign.value();
        for (c, val) in v.iter() {
            let slot = self.slot(c);
            let next = slot.acc + s * val;
            if (slot.init + next).abs() > self.half {
                self.discarded += 1;
                return Decision::CubeExit;
            }
        }
        for (c, val) in v.iter() {
            let slot = self
                .touched
                .get_mut(&c)
                .expect("materialized in check pass");
            slot.acc += s * val;
            let acc_abs = slot.acc.abs();
            if acc_abs > self.max_acc_abs {
                self.max_acc_abs = acc_abs;
            }
            let value_abs = (slot.init + slot.acc).abs();
            if value_abs > self.max_value_abs {
                self.max_value_abs = value_abs;
            }
        }
        self.accepted += 1;
        Decision::Accepted
    }

    /// Apply `step` to each item in order.
    pub fn run(
        &mut self,
        stream: impl IntoIterator<Item = (Sign, SparseVector)>,
    ) -> (Vec<Decision>, WalkStats) {
        let decisions = stream
            .into_iter()
            .map(|(sign, v)| self.step(sign, &v))
            .collect();
        (decisions, self.stats())
    }

    pub fn stats(&self) -> WalkStats {
        WalkStats {
            accepted: self.accepted,
            discarded: self.discarded,
            max_acc_abs: self.max_acc_abs,
            max_value_abs: self.max_value_abs,
            touched: self.touched.len(),
        }
    }

    pub fn touched_len(&self) -> usize {
        self.touched.len()
    }
}
