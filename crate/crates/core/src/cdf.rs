//! Marginal CDF models and the randomized integral transform.
//!
//! The transform maps a real random variable `X` with CDF `F` to
//! `U*F(X) + (1-U)*F(X^-)` with `U` uniform on `[0,1]`, which is uniform on
//! `[0,1]` regardless of atoms in `F`. Applied coordinate-wise with one `U`
//! per point it reduces any product of marginals to uniform marginals, and
//! it can only increase the sign discrepancy of a point multiset when the
//! marginals are strictly increasing, so a bound proved for uniform
//! marginals transfers back to the original points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::{Error, Point, Result};

/// A point mass of an atomic distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// One weighted component of a mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub model: CdfModel,
}

/// A one-dimensional cumulative distribution function model.
///
/// `evaluate` is nondecreasing with range in `[0,1]`; `left_limit(x)` is
/// `lim_{y -> x^-} evaluate(y)`, which differs from `evaluate(x)` exactly at
/// atoms. Continuous families return `evaluate(x)` for the left limit
/// directly rather than approximating it numerically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CdfModel {
    Uniform {
        a: f64,
        b: f64,
    },
    Gaussian {
        mean: f64,
        stddev: f64,
    },
    Exponential {
        rate: f64,
    },
    Atomic {
        atoms: Vec<Atom>,
    },
    Mixture {
        components: Vec<MixtureComponent>,
    },
    /// Step CDF of a data sample. A pragmatic extension: it has atoms at
    /// every sample value, so the strict-monotonicity hypotheses of the
    /// discrepancy-monotonicity guarantee do not apply to it.
    Empirical {
        sample: Vec<f64>,
    },
}

const MASS_TOL: f64 = 1e-9;

impl CdfModel {
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        CdfModel::Uniform { a, b }.validated()
    }

    pub fn gaussian(mean: f64, stddev: f64) -> Result<Self> {
        CdfModel::Gaussian { mean, stddev }.validated()
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        CdfModel::Exponential { rate }.validated()
    }

    pub fn atomic(atoms: Vec<(f64, f64)>) -> Result<Self> {
        CdfModel::Atomic {
            atoms: atoms
                .into_iter()
                .map(|(location, mass)| Atom { location, mass })
                .collect(),
        }
        .validated()
    }

    pub fn mixture(components: Vec<(f64, CdfModel)>) -> Result<Self> {
        CdfModel::Mixture {
            components: components
                .into_iter()
                .map(|(weight, model)| MixtureComponent { weight, model })
                .collect(),
        }
        .validated()
    }

    pub fn empirical(sample: Vec<f64>) -> Result<Self> {
        CdfModel::Empirical { sample }.validated()
    }

    /// Validate parameters, normalizing stored order where needed (atoms and
    /// empirical samples are kept sorted). Deserialized models must pass
    /// through this before use.
    pub fn validated(mut self) -> Result<Self> {
        match &mut self {
            CdfModel::Uniform { a, b } => {
                if !(a.is_finite() && b.is_finite() && *a < *b) {
                    return Err(Error::InvalidModel(format!(
                        "uniform requires finite a < b, got a={a}, b={b}"
                    )));
                }
            }
            CdfModel::Gaussian { mean, stddev } => {
                if !(mean.is_finite() && stddev.is_finite() && *stddev > 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "gaussian requires finite mean and stddev > 0, got mean={mean}, stddev={stddev}"
                    )));
                }
            }
            CdfModel::Exponential { rate } => {
                if !(rate.is_finite() && *rate > 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "exponential requires rate > 0, got {rate}"
                    )));
                }
            }
            CdfModel::Atomic { atoms } => {
                if atoms.is_empty() {
                    return Err(Error::InvalidModel(
                        "atomic requires at least one atom".into(),
                    ));
                }
                if atoms
                    .iter()
                    .any(|a| !a.location.is_finite() || a.mass.is_nan() || a.mass <= 0.0)
                {
                    return Err(Error::InvalidModel(
                        "atomic atoms require finite locations and positive masses".into(),
                    ));
                }
                atoms.sort_by(|p, q| p.location.total_cmp(&q.location));
                if atoms.windows(2).any(|w| w[0].location == w[1].location) {
                    return Err(Error::InvalidModel(
                        "atomic locations must be distinct".into(),
                    ));
                }
                let total: f64 = atoms.iter().map(|a| a.mass).sum();
                if (total - 1.0).abs() > MASS_TOL {
                    return Err(Error::InvalidModel(format!(
                        "atomic masses must sum to 1, got {total}"
                    )));
                }
            }
            CdfModel::Mixture { components } => {
                if components.is_empty() {
                    return Err(Error::InvalidModel(
                        "mixture requires at least one component".into(),
                    ));
                }
                let total: f64 = components.iter().map(|c| c.weight).sum();
                if components
                    .iter()
                    .any(|c| c.weight.is_nan() || c.weight <= 0.0)
                    || (total - 1.0).abs() > MASS_TOL
                {
                    return Err(Error::InvalidModel(format!(
                        "mixture weights must be positive and sum to 1, got total {total}"
                    )));
                }
                let comps = std::mem::take(components);
                *components = comps
                    .into_iter()
                    .map(|c| {
                        Ok(MixtureComponent {
                            weight: c.weight,
                            model: c.model.validated()?,
                        })
                    })
                    .collect::<Result<_>>()?;
            }
            CdfModel::Empirical { sample } => {
                if sample.is_empty() {
                    return Err(Error::InvalidModel(
                        "empirical requires a nonempty sample".into(),
                    ));
                }
                if sample.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidModel(
                        "empirical sample must be finite".into(),
                    ));
                }
                sample.sort_by(|p, q| p.total_cmp(q));
            }
        }
        Ok(self)
    }

    /// `F(x)`.
    pub fn evaluate(&self, x: f64) -> f64 {
        match self {
            CdfModel::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            CdfModel::Gaussian { mean, stddev } => {
                // Parameters were validated at construction.
                Normal::new(*mean, *stddev)
                    .expect("validated gaussian")
                    .cdf(x)
            }
            CdfModel::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            CdfModel::Atomic { atoms } => atoms
                .iter()
                .take_while(|a| a.location <= x)
                .map(|a| a.mass)
                .sum::<f64>()
                .min(1.0),
            CdfModel::Mixture { components } => components
                .iter()
                .map(|c| c.weight * c.model.evaluate(x))
                .sum::<f64>()
                .clamp(0.0, 1.0),
            CdfModel::Empirical { sample } => {
                let below_or_eq = sample.partition_point(|&s| s <= x);
                below_or_eq as f64 / sample.len() as f64
            }
        }
    }

    /// `F(x^-)`, the limit of `F` from the left.
    pub fn left_limit(&self, x: f64) -> f64 {
        match self {
            CdfModel::Uniform { .. } | CdfModel::Gaussian { .. } | CdfModel::Exponential { .. } => {
                self.evaluate(x)
            }
            CdfModel::Atomic { atoms } => atoms
                .iter()
                .take_while(|a| a.location < x)
                .map(|a| a.mass)
                .sum::<f64>()
                .min(1.0),
            CdfModel::Mixture { components } => components
                .iter()
                .map(|c| c.weight * c.model.left_limit(x))
                .sum::<f64>()
                .clamp(0.0, 1.0),
            CdfModel::Empirical { sample } => {
                let strictly_below = sample.partition_point(|&s| s < x);
                strictly_below as f64 / sample.len() as f64
            }
        }
    }

    /// Draw one value by inverse-transform sampling.
    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        match self {
            CdfModel::Uniform { a, b } => a + rng.random::<f64>() * (b - a),
            CdfModel::Gaussian { mean, stddev } => {
                let u: f64 = rng.random();
                // inverse_cdf(0) = -inf; the open interval avoids it.
                Normal::new(*mean, *stddev)
                    .expect("validated gaussian")
                    .inverse_cdf(u.max(f64::MIN_POSITIVE))
            }
            CdfModel::Exponential { rate } => {
                let u: f64 = rng.random();
                -(-u).ln_1p() / rate
            }
            CdfModel::Atomic { atoms } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for a in atoms {
                    acc += a.mass;
                    if u < acc {
                        return a.location;
                    }
                }
                atoms.last().expect("validated atomic").location
            }
            CdfModel::Mixture { components } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for c in components {
                    acc += c.weight;
                    if u < acc {
                        return c.model.sample(rng);
                    }
                }
                components
                    .last()
                    .expect("validated mixture")
                    .model
                    .sample(rng)
            }
            CdfModel::Empirical { sample } => {
                let ix = rng.random_range(0..sample.len());
                sample[ix]
            }
        }
    }
}

/// Evaluate `(F(x), F(x^-))`.
pub fn cdf_eval(model: &CdfModel, x: f64) -> (f64, f64) {
    (model.evaluate(x), model.left_limit(x))
}

/// One transformed point: the original, the shared `u`, and the image.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformRecord {
    pub original: Point,
    pub u: f64,
    pub transformed: Point,
}

/// Apply the randomized integral transform coordinate-wise with a single
/// `u` shared by all coordinates of the point.
pub fn transform_point(p: &[f64], models: &[CdfModel], u: f64) -> Result<Point> {
    if p.len() != models.len() {
        return Err(Error::DimensionMismatch {
            expected: models.len(),
            got: p.len(),
        });
    }
    Ok(p.iter()
        .zip(models)
        .map(|(&x, m)| {
            let (f, f_left) = cdf_eval(m, x);
            u * f + (1.0 - u) * f_left
        })
        .collect())
}

/// Transform a stream of points, drawing one independent `u` per point from
/// a generator seeded by `seed`. Output order equals input order.
pub fn transform_stream(
    points: &[Point],
    models: &[CdfModel],
    seed: u64,
) -> Result<Vec<TransformRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    points
        .iter()
        .map(|p| {
            let u: f64 = rng.random();
            Ok(TransformRecord {
                original: p.clone(),
                u,
                transformed: transform_point(p, models, u)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_cdf_is_identity_on_unit_interval() {
        let m = CdfModel::uniform(0.0, 1.0).unwrap();
        assert_eq!(cdf_eval(&m, 0.4), (0.4, 0.4));
        assert_eq!(cdf_eval(&m, -1.0), (0.0, 0.0));
        assert_eq!(cdf_eval(&m, 2.0), (1.0, 1.0));
    }

    #[test]
    fn atomic_full_jump_at_point_mass() {
        let m = CdfModel::atomic(vec![(0.0, 1.0)]).unwrap();
        assert_eq!(cdf_eval(&m, 0.0), (1.0, 0.0));
        assert_eq!(cdf_eval(&m, -0.5), (0.0, 0.0));
        assert_eq!(cdf_eval(&m, 0.5), (1.0, 1.0));
    }

    #[test]
    fn standard_normal_is_half_at_zero() {
        let m = CdfModel::gaussian(0.0, 1.0).unwrap();
        let (f, f_left) = cdf_eval(&m, 0.0);
        assert!((f - 0.5).abs() < 1e-12);
        assert_eq!(f, f_left);
    }

    #[test]
    fn invalid_parameters_are_construction_errors() {
        assert!(CdfModel::uniform(1.0, 1.0).is_err());
        assert!(CdfModel::gaussian(0.0, 0.0).is_err());
        assert!(CdfModel::exponential(-2.0).is_err());
        assert!(CdfModel::atomic(vec![(0.0, 0.4)]).is_err());
        assert!(CdfModel::mixture(vec![(0.5, CdfModel::uniform(0.0, 1.0).unwrap())]).is_err());
        assert!(CdfModel::empirical(vec![]).is_err());
    }

    #[test]
    fn transform_point_continuous_is_u_independent() {
        let models = vec![CdfModel::uniform(0.0, 1.0).unwrap()];
        let out = transform_point(&[0.7], &models, 0.2).unwrap();
        assert_eq!(out, vec![0.7]);
        let out = transform_point(&[0.7], &models, 0.9).unwrap();
        assert_eq!(out, vec![0.7]);
    }

    #[test]
    fn transform_point_atom_passes_u_through() {
        let models = vec![CdfModel::atomic(vec![(0.0, 1.0)]).unwrap()];
        let out = transform_point(&[0.0], &models, 0.37).unwrap();
        assert_eq!(out, vec![0.37]);
    }

    #[test]
    fn transform_point_coordinate_wise() {
        let models = vec![
            CdfModel::uniform(0.0, 1.0).unwrap(),
            CdfModel::uniform(0.0, 2.0).unwrap(),
        ];
        let out = transform_point(&[0.3, 0.8], &models, 0.5).unwrap();
        assert_eq!(out, vec![0.3, 0.4]);
    }

    #[test]
    fn transform_point_dimension_mismatch() {
        let models = vec![CdfModel::uniform(0.0, 1.0).unwrap()];
        assert!(matches!(
            transform_point(&[0.1, 0.2], &models, 0.5),
            Err(Error::DimensionMismatch {
                expected: 1,
                got: 2
            })
        ));
    }

    #[test]
    fn transform_stream_empty_and_deterministic() {
        let models = vec![CdfModel::gaussian(0.0, 1.0).unwrap()];
        assert!(transform_stream(&[], &models, 1).unwrap().is_empty());

        let pts: Vec<Point> = vec![vec![0.1], vec![-0.5], vec![2.0]];
        let a = transform_stream(&pts, &models, 42).unwrap();
        let b = transform_stream(&pts, &models, 42).unwrap();
        assert_eq!(a, b);
        let c = transform_stream(&pts, &models, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn mixture_cdf_is_weighted_sum() {
        let m = CdfModel::mixture(vec![
            (0.5, CdfModel::uniform(0.0, 1.0).unwrap()),
            (0.5, CdfModel::atomic(vec![(0.5, 1.0)]).unwrap()),
        ])
        .unwrap();
        assert!((m.evaluate(0.5) - (0.25 + 0.5)).abs() < 1e-12);
        assert!((m.left_limit(0.5) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn empirical_step_cdf() {
        let m = CdfModel::empirical(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(m.evaluate(0.0), 0.0);
        assert_eq!(m.evaluate(1.0), 1.0 / 3.0);
        assert_eq!(m.left_limit(1.0), 0.0);
        assert_eq!(m.evaluate(10.0), 1.0);
    }
}
