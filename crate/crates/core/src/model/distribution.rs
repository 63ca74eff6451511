use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QueryError, Result};

/// Tolerance on the total probability mass of a distribution.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-9;

/// A finitely supported law: strictly increasing values with positive masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct DiscreteDistribution {
    values: Vec<f64>,
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    /// Builds a distribution from `(value, probability)` pairs in any order.
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(QueryError::InvalidDistribution("empty support".into()));
        }
        for &(v, p) in &points {
            if !v.is_finite() {
                return Err(QueryError::InvalidDistribution(format!(
                    "support value {v} is not finite"
                )));
            }
            if !(p > 0.0 && p.is_finite()) {
                return Err(QueryError::InvalidDistribution(format!(
                    "probability {p} at value {v} is not strictly positive"
                )));
            }
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = points.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(QueryError::InvalidDistribution(format!(
                "duplicate support value {}",
                w[0].0
            )));
        }
        let total: f64 = points.iter().map(|p| p.1).sum();
        if (total - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(QueryError::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        let (values, probs) = points.into_iter().unzip();
        Ok(Self { values, probs })
    }

    /// A point mass.
    pub fn deterministic(value: f64) -> Result<Self> {
        Self::new(vec![(value, 1.0)])
    }

    /// Two-point law: `low` with probability `p_low`, `high` otherwise.
    pub fn two_point(low: f64, p_low: f64, high: f64) -> Result<Self> {
        if p_low >= 1.0 {
            return Self::deterministic(low);
        }
        Self::new(vec![(low, p_low), (high, 1.0 - p_low)])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.probs.iter().copied())
    }

    /// Smallest support value.
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    /// Largest support value.
    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// `Pr[X <= t]`.
    pub fn cdf(&self, t: f64) -> f64 {
        let k = self.values.partition_point(|&v| v <= t);
        self.probs[..k].iter().sum()
    }

    /// `Pr[X > t]`, summed directly over the upper tail.
    pub fn tail(&self, t: f64) -> f64 {
        let k = self.values.partition_point(|&v| v <= t);
        self.probs[k..].iter().sum()
    }

    /// Position of `value` in the support, if present (exact comparison).
    pub fn position(&self, value: f64) -> Option<usize> {
        self.values
            .binary_search_by(|v| v.total_cmp(&value))
            .ok()
    }

    /// Inverse-CDF draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (v, p) in self.points() {
            acc += p;
            if u < acc {
                return v;
            }
        }
        self.max()
    }

    /// Applies `f` to every support value. `f` must be strictly increasing.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.points().map(|(v, p)| (f(v), p)).collect())
    }
}

impl TryFrom<Vec<(f64, f64)>> for DiscreteDistribution {
    type Error = QueryError;

    fn try_from(points: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(points)
    }
}

impl From<DiscreteDistribution> for Vec<(f64, f64)> {
    fn from(d: DiscreteDistribution) -> Self {
        d.values.into_iter().zip(d.probs).collect()
    }
}
