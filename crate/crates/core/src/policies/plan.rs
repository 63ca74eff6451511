use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{QueryError, Result};
use crate::model::Instance;

/// Why an entry was placed in a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Next variable by left endpoint.
    LeftEndpointRule,
    /// Variable most likely to fall below the current threshold.
    StopProbRule,
    /// Member of the cost-bounded prefix.
    PrefixT,
    /// Member of the cost-bounded almost-prefix that skips big variables.
    AlmostPrefixS,
    /// Chosen by the knapsack step.
    KnapsackU,
    /// Supplied by the caller or an enumerator.
    Explicit,
}

/// A non-adaptive policy: a fixed order, executed until a stopping rule fires.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryPlan {
    pub order: Vec<usize>,
    pub annotations: Vec<Selection>,
    /// `iteration_boundaries[g]` is the plan length at the end of iteration `g`.
    pub iteration_boundaries: Vec<usize>,
}

impl QueryPlan {
    pub(crate) fn empty() -> Self {
        Self {
            order: Vec::new(),
            annotations: Vec::new(),
            iteration_boundaries: Vec::new(),
        }
    }

    /// A plan with every entry its own iteration.
    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let plan = Self {
            annotations: vec![Selection::Explicit; n],
            iteration_boundaries: (1..=n).collect(),
            order,
        };
        plan.check_shape()?;
        Ok(plan)
    }

    pub(crate) fn push(&mut self, index: usize, why: Selection) {
        debug_assert!(!self.order.contains(&index));
        self.order.push(index);
        self.annotations.push(why);
    }

    pub(crate) fn close_iteration(&mut self) {
        self.iteration_boundaries.push(self.order.len());
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn iterations(&self) -> usize {
        self.iteration_boundaries.len()
    }

    /// Number of plan entries through the end of iteration `g` (0-based);
    /// iterations past the last one cover the whole plan.
    pub fn prefix_through(&self, g: usize) -> usize {
        self.iteration_boundaries
            .get(g)
            .copied()
            .unwrap_or(self.order.len())
    }

    /// Whether the plan lists every index of an `n`-variable instance.
    pub fn covers(&self, n: usize) -> bool {
        self.order.len() == n
    }

    fn check_shape(&self) -> Result<()> {
        if self.annotations.len() != self.order.len() {
            return Err(QueryError::InvalidPlan(
                "annotations and order differ in length".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = self.order.iter().find(|&&i| !seen.insert(i)) {
            return Err(QueryError::InvalidPlan(format!("index {dup} repeated")));
        }
        if self.iteration_boundaries.windows(2).any(|w| w[0] > w[1])
            || self
                .iteration_boundaries
                .last()
                .is_some_and(|&b| b > self.order.len())
        {
            return Err(QueryError::InvalidPlan(
                "iteration boundaries must be nondecreasing and within the plan".into(),
            ));
        }
        Ok(())
    }

    /// Checks structural invariants and that every index exists in `instance`.
    pub fn validate(&self, instance: &Instance) -> Result<()> {
        self.check_shape()?;
        if let Some(&bad) = self.order.iter().find(|&&i| i >= instance.len()) {
            return Err(QueryError::InvalidPlan(format!(
                "index {bad} out of range for {} variables",
                instance.len()
            )));
        }
        Ok(())
    }

    /// Cumulative cost of the plan through each iteration boundary.
    pub fn iteration_costs(&self, costs: &[f64]) -> Vec<f64> {
        self.iteration_boundaries
            .iter()
            .map(|&b| self.order[..b].iter().map(|&i| costs[i]).sum())
            .collect()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let plan: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        plan.check_shape()?;
        Ok(plan)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_order_shape() {
        let p = QueryPlan::from_order(vec![2, 0, 1]).unwrap();
        assert_eq!(p.iteration_boundaries, vec![1, 2, 3]);
        assert_eq!(p.prefix_through(0), 1);
        assert_eq!(p.prefix_through(10), 3);
        assert!(QueryPlan::from_order(vec![1, 1]).is_err());
    }

    #[test]
    fn json_shape() {
        let p = QueryPlan::from_order(vec![0]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(
            s,
            r#"{"order":[0],"annotations":["explicit"],"iteration_boundaries":[1]}"#
        );
        let bad = r#"{"order":[0,1],"annotations":["explicit","explicit"],"iteration_boundaries":[2,1]}"#;
        let p: QueryPlan = serde_json::from_str(bad).unwrap();
        assert!(p.check_shape().is_err());
    }
}
