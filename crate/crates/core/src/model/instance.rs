use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::distribution::DiscreteDistribution;
use crate::error::{QueryError, Result};

/// Finite stand-in for an unbounded realization.
pub const INFINITY_SENTINEL: f64 = 1e9;

/// Which question the policy must answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Report a value within `delta` of the minimum.
    Smq,
    /// Identify an index whose value is within `delta` of the minimum.
    Smqi,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Smq => f.write_str("smq"),
            Variant::Smqi => f.write_str("smqi"),
        }
    }
}

/// One random variable together with the price of observing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryVariable {
    pub label: String,
    pub cost: f64,
    pub support: DiscreteDistribution,
}

impl QueryVariable {
    pub fn new(label: impl Into<String>, cost: f64, support: DiscreteDistribution) -> Self {
        Self {
            label: label.into(),
            cost,
            support,
        }
    }

    /// Left endpoint of the variable's interval.
    pub fn left(&self) -> f64 {
        self.support.min()
    }

    /// Right endpoint of the variable's interval.
    pub fn right(&self) -> f64 {
        self.support.max()
    }
}

/// Stable permutation sorting `lefts` ascending; entry `k` is the input
/// position that lands at canonical index `k`.
pub fn canonical_order(lefts: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..lefts.len()).collect();
    order.sort_by(|&a, &b| lefts[a].total_cmp(&lefts[b]));
    order
}

/// A validated problem instance with variables in canonical order
/// (nondecreasing left endpoint, ties kept in input order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceFile", into = "InstanceFile")]
pub struct Instance {
    variables: Vec<QueryVariable>,
    delta: f64,
    variant: Variant,
    input_positions: Vec<usize>,
    virtual_value: f64,
    virtual_index: usize,
    /// For each `i`, the number of variables with `left < right_i - delta`;
    /// the almost-prefix set of `i` is that prefix with `i` removed.
    below_counts: Vec<usize>,
}

impl Instance {
    /// Validates and canonicalizes.
    pub fn new(variables: Vec<QueryVariable>, delta: f64, variant: Variant) -> Result<Self> {
        if variables.is_empty() {
            return Err(QueryError::InvalidInstance("no variables".into()));
        }
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(QueryError::InvalidInstance(format!(
                "delta must be finite and nonnegative, got {delta}"
            )));
        }
        for v in &variables {
            if !(v.cost >= 0.0 && v.cost.is_finite()) {
                return Err(QueryError::InvalidInstance(format!(
                    "variable {:?} has invalid cost {}",
                    v.label, v.cost
                )));
            }
        }
        let lefts: Vec<f64> = variables.iter().map(QueryVariable::left).collect();
        let order = canonical_order(&lefts);
        let mut slots: Vec<Option<QueryVariable>> = variables.into_iter().map(Some).collect();
        let variables: Vec<QueryVariable> = order
            .iter()
            .map(|&k| slots[k].take().expect("permutation"))
            .collect();

        let (virtual_index, virtual_value) = variables
            .iter()
            .map(QueryVariable::right)
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, r)| {
                if r < best.1 {
                    (i, r)
                } else {
                    best
                }
            });
        let lefts: Vec<f64> = variables.iter().map(QueryVariable::left).collect();
        let below_counts = variables
            .iter()
            .map(|v| {
                let cut = v.right() - delta;
                lefts.partition_point(|&l| l < cut)
            })
            .collect();

        Ok(Self {
            variables,
            delta,
            variant,
            input_positions: order,
            virtual_value,
            virtual_index,
            below_counts,
        })
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[QueryVariable] {
        &self.variables
    }

    pub fn variable(&self, i: usize) -> &QueryVariable {
        &self.variables[i]
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn left(&self, i: usize) -> f64 {
        self.variables[i].left()
    }

    pub fn right(&self, i: usize) -> f64 {
        self.variables[i].right()
    }

    pub fn cost(&self, i: usize) -> f64 {
        self.variables[i].cost
    }

    pub fn costs(&self) -> Vec<f64> {
        self.variables.iter().map(|v| v.cost).collect()
    }

    pub fn total_cost(&self) -> f64 {
        self.variables.iter().map(|v| v.cost).sum()
    }

    /// Input position of canonical index `i`.
    pub fn input_position(&self, i: usize) -> usize {
        self.input_positions[i]
    }

    /// Canonical index to input position map.
    pub fn input_positions(&self) -> &[usize] {
        &self.input_positions
    }

    /// The smallest right endpoint; the minimum never exceeds it.
    pub fn virtual_value(&self) -> f64 {
        self.virtual_value
    }

    /// Lowest index whose right endpoint equals [`Self::virtual_value`].
    pub fn virtual_index(&self) -> usize {
        self.virtual_index
    }

    /// Number of variables with left endpoint strictly below `right_i - delta`.
    pub fn below_count(&self, i: usize) -> usize {
        self.below_counts[i]
    }

    /// Product of support sizes (number of joint realizations).
    pub fn realization_count(&self) -> f64 {
        self.variables
            .iter()
            .map(|v| v.support.len() as f64)
            .product()
    }

    pub(crate) fn with_positions(mut self, positions: Vec<usize>) -> Self {
        debug_assert_eq!(positions.len(), self.len());
        self.input_positions = positions;
        self
    }

    pub fn with_variant(&self, variant: Variant) -> Self {
        let mut out = self.clone();
        out.variant = variant;
        out
    }

    /// Same instance with every cost replaced; ordering is unaffected.
    pub fn with_costs(&self, costs: &[f64]) -> Result<Self> {
        if costs.len() != self.len() {
            return Err(QueryError::InvalidArgument(format!(
                "expected {} costs, got {}",
                self.len(),
                costs.len()
            )));
        }
        if let Some(c) = costs.iter().find(|c| !(**c >= 0.0 && c.is_finite())) {
            return Err(QueryError::InvalidInstance(format!("invalid cost {c}")));
        }
        let mut out = self.clone();
        for (v, &c) in out.variables.iter_mut().zip(costs) {
            v.cost = c;
        }
        Ok(out)
    }

    /// Costs divided by the smallest cost, so the cheapest variable costs one.
    pub fn scaled_costs(&self) -> Result<Vec<f64>> {
        let min = self
            .variables
            .iter()
            .map(|v| v.cost)
            .fold(f64::INFINITY, f64::min);
        if min <= 0.0 {
            return Err(QueryError::InvalidArgument(
                "cost scaling needs strictly positive costs".into(),
            ));
        }
        Ok(self.variables.iter().map(|v| v.cost / min).collect())
    }

    pub fn has_uniform_costs(&self) -> bool {
        let c0 = self.variables[0].cost;
        self.variables.iter().all(|v| v.cost == c0)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}

/// On-disk instance layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub delta: f64,
    pub variant: Variant,
    pub variables: Vec<QueryVariable>,
}

impl TryFrom<InstanceFile> for Instance {
    type Error = QueryError;

    fn try_from(f: InstanceFile) -> Result<Self> {
        Instance::new(f.variables, f.delta, f.variant)
    }
}

impl From<Instance> for InstanceFile {
    fn from(i: Instance) -> Self {
        InstanceFile {
            delta: i.delta,
            variant: i.variant,
            variables: i.variables,
        }
    }
}
