//! Online vector balancing by parallel rounds of cube walks.
//!
//! Signs are chosen for a stream of sparse vectors so that all prefix sums
//! stay small in sup norm. Each round is an independent cube walk with side
//! `theta = 2 * l1_bound`; a vector is offered to round 1 with a fresh
//! uniform sign, and on rejection moves to round 2 with another fresh sign,
//! and so on. Since each round discards with probability at most
//! `l1(v)/theta <= 1/2`, the number of rounds ever used, `tau`, satisfies
//! `E tau <= 3 + log2(1 + S1)` with `S1 = sum_i l1(v_i)/theta`, and every
//! prefix sum is bounded by `tau * theta` coordinate-wise.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::seed::{derive, derive_str};
use crate::sparse::SparseVector;
use crate::walk::{CubeWalk, Sign, WalkInit};
use crate::{Error, Result};

/// Default limit on rounds; reached only if the declared l1 bound is badly
/// violated (the per-round rejection chance is then no longer below 1/2).
pub const DEFAULT_ROUND_CAP: u32 = 64;

#[derive(Debug, Clone, Copy)]
enum RoundInit {
    Seeded,
    /// Deterministic test hook: every round's walk starts at this constant.
    Constant(f64),
}

struct Round {
    walk: CubeWalk,
    signs: ChaCha8Rng,
}

/// Online sign assigner.
pub struct Balancer {
    theta: f64,
    ell1_bound: f64,
    master_seed: u64,
    round_init: RoundInit,
    cap: u32,
    rounds: Vec<Round>,
    /// 1-based round at which each processed vector was accepted.
    accepted_round: Vec<u32>,
    s1: f64,
    bound_violations: u64,
}

/// Summary of a balancing run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalanceStats {
    /// Rounds ever used (tau).
    pub rounds_used: u32,
    /// Sum of l1 norms divided by theta.
    pub s1: f64,
    /// Exact max over prefixes and coordinates of |sum of signed vectors|,
    /// computed by an independent dense replay.
    pub prefix_linf_max: f64,
    /// Vectors whose l1 norm exceeded the declared bound.
    pub bound_violations: u64,
}

impl Balancer {
    pub fn new(ell1_bound: f64, seed: u64) -> Result<Self> {
        Balancer::build(ell1_bound, seed, RoundInit::Seeded, DEFAULT_ROUND_CAP)
    }

    pub fn with_round_cap(ell1_bound: f64, seed: u64, cap: u32) -> Result<Self> {
        Balancer::build(ell1_bound, seed, RoundInit::Seeded, cap)
    }

    /// Deterministic test hook: all rounds start at the constant `w0`.
    /// Production paths construct only the seeded variants.
    #[doc(hidden)]
    pub fn with_constant_init(ell1_bound: f64, seed: u64, w0: f64) -> Result<Self> {
        Balancer::build(ell1_bound, seed, RoundInit::Constant(w0), DEFAULT_ROUND_CAP)
    }

    fn build(ell1_bound: f64, seed: u64, round_init: RoundInit, cap: u32) -> Result<Self> {
        if !(ell1_bound > 0.0 && ell1_bound.is_finite()) {
            return Err(Error::NonPositiveTheta(ell1_bound));
        }
        Ok(Balancer {
            theta: 2.0 * ell1_bound,
            ell1_bound,
            master_seed: seed,
            round_init,
            cap,
            rounds: Vec::new(),
            accepted_round: Vec::new(),
            s1: 0.0,
            bound_violations: 0,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Rounds materialized so far (tau).
    pub fn rounds_used(&self) -> u32 {
        self.rounds.len() as u32
    }

    pub fn s1(&self) -> f64 {
        self.s1
    }

    pub fn bound_violations(&self) -> u64 {
        self.bound_violations
    }

    /// 1-based accepting round of each processed vector, in input order.
    pub fn accepted_rounds(&self) -> &[u32] {
        &self.accepted_round
    }

    fn ensure_round(&mut self, r: usize) -> Result<()> {
        while self.rounds.len() <= r {
            let index = self.rounds.len() as u64;
            let walk_seed = derive(derive_str(self.master_seed, "round-init"), index);
            let init = match self.round_init {
                RoundInit::Seeded => WalkInit::Seeded(walk_seed),
                RoundInit::Constant(w0) => WalkInit::Constant(w0),
            };
            self.rounds.push(Round {
                walk: CubeWalk::with_init(self.theta, init)?,
                signs: ChaCha8Rng::seed_from_u64(derive(
                    derive_str(self.master_seed, "round-signs"),
                    index,
                )),
            });
        }
        Ok(())
    }

    /// Choose a sign for `v`: offer it to rounds 1, 2, ... with a fresh
    /// uniform sign each, committing at the first round that accepts.
    /// Returns the sign and the 1-based accepting round.
    pub fn assign_sign(&mut self, v: &SparseVector) -> Result<(Sign, u32)> {
        if v.l1_norm() > self.ell1_bound {
            self.bound_violations += 1;
        }
        self.s1 += v.l1_norm() / self.theta;
        for r in 0..self.cap as usize {
            self.ensure_round(r)?;
            let round = &mut self.rounds[r];
            let sign = Sign::random(&mut round.signs);
            if round.walk.step(sign, v).kept() {
                let round_no = (r + 1) as u32;
                self.accepted_round.push(round_no);
                return Ok((sign, round_no));
            }
        }
        Err(Error::RoundCapExceeded { cap: self.cap })
    }
}

/// Assign signs to a whole stream and report stats, including the exact
/// prefix sup-norm of the signed sums from a dense replay.
pub fn balance_stream(
    vectors: &[SparseVector],
    ell1_bound: f64,
    seed: u64,
) -> Result<(Vec<Sign>, BalanceStats)> {
    let mut balancer = Balancer::new(ell1_bound, seed)?;
    let mut signs = Vec::with_capacity(vectors.len());
    let mut replay: HashMap<u64, f64> = HashMap::new();
    let mut prefix_linf_max = 0.0f64;
    for v in vectors {
        let (sign, _) = balancer.assign_sign(v)?;
        signs.push(sign);
        for (c, val) in v.iter() {
            let slot = replay.entry(c).or_insert(0.0);
            *slot += sign.value() * val;
            // A coordinate's value changes only when written, so the
            // running max over writes is the max over all prefixes.
            prefix_linf_max = prefix_linf_max.max(slot.abs());
        }
    }
    let stats = BalanceStats {
        rounds_used: balancer.rounds_used(),
        s1: balancer.s1(),
        prefix_linf_max,
        bound_violations: balancer.bound_violations(),
    };
    Ok((signs, stats))
}
