use serde::{Deserialize, Serialize};

use super::adaptive::PolicyTree;
use crate::model::Instance;

/// Costs within this relative distance are the same budget.
const COST_MERGE: f64 = 1e-9;

/// Cumulative probability of having stopped, by query count and by cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinishDistribution {
    /// `by_queries[k]` is the probability of stopping after at most `k` queries.
    pub by_queries: Vec<f64>,
    /// `(budget, probability of stopping within budget)` for each reachable
    /// cumulative cost, ascending.
    pub by_cost: Vec<(f64, f64)>,
}

impl FinishDistribution {
    /// Probability of stopping within `k` queries.
    pub fn within_queries(&self, k: usize) -> f64 {
        match self.by_queries.get(k) {
            Some(&p) => p,
            None => self.by_queries.last().copied().unwrap_or(0.0),
        }
    }

    /// Probability of stopping with cumulative cost at most `budget`.
    pub fn within_cost(&self, budget: f64) -> f64 {
        let tol = COST_MERGE * budget.abs().max(1.0);
        self.by_cost
            .iter()
            .take_while(|(c, _)| *c <= budget + tol)
            .last()
            .map_or(0.0, |&(_, p)| p)
    }

    /// Total stopping probability (one for complete policies).
    pub fn total(&self) -> f64 {
        self.by_queries.last().copied().unwrap_or(0.0)
    }

    pub fn queries_csv(&self) -> String {
        let mut out = String::from("k,probability\n");
        for (k, p) in self.by_queries.iter().enumerate() {
            out.push_str(&format!("{k},{p}\n"));
        }
        out
    }

    pub fn cost_csv(&self) -> String {
        let mut out = String::from("budget,probability\n");
        for (c, p) in &self.by_cost {
            out.push_str(&format!("{c},{p}\n"));
        }
        out
    }
}

/// Collects stopping events `(queries, cost, probability)`.
#[derive(Debug, Default, Clone)]
pub struct FinishAccumulator {
    by_queries: Vec<f64>,
    by_cost: Vec<(f64, f64)>,
}

impl FinishAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, queries: usize, cost: f64, probability: f64) {
        if self.by_queries.len() <= queries {
            self.by_queries.resize(queries + 1, 0.0);
        }
        self.by_queries[queries] += probability;
        self.by_cost.push((cost, probability));
    }

    /// Extends the query axis to `k` entries even if nothing stops there.
    pub fn reserve_queries(&mut self, k: usize) {
        if self.by_queries.len() <= k {
            self.by_queries.resize(k + 1, 0.0);
        }
    }

    pub fn finish(mut self) -> FinishDistribution {
        let mut acc = 0.0;
        for p in &mut self.by_queries {
            acc += *p;
            *p = acc;
        }
        self.by_cost.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        let mut acc = 0.0;
        for (c, p) in self.by_cost {
            acc += p;
            match merged.last_mut() {
                Some(last) if c - last.0 <= COST_MERGE * c.abs().max(1.0) => last.1 = acc,
                _ => merged.push((c, acc)),
            }
        }
        FinishDistribution {
            by_queries: self.by_queries,
            by_cost: merged,
        }
    }
}

/// Stopping-time distribution of an adaptive policy.
pub fn finish_distribution(tree: &PolicyTree, instance: &Instance) -> FinishDistribution {
    let mut acc = FinishAccumulator::new();
    tree.for_each_leaf(instance, |leaf| acc.add(leaf.path.len(), leaf.cost, leaf.probability));
    acc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::adaptivity_gap;
    use crate::model::{StopRule, Verdict};
    use crate::oracle::{optimal_adaptive, Branch};

    #[test]
    fn adaptivity_gap_tree() {
        let inst = adaptivity_gap(1.0 / 3.0).unwrap();
        let opt = optimal_adaptive(&inst).unwrap();
        let fd = finish_distribution(&opt.root, &inst);
        assert_eq!(fd.by_queries[0], 0.0);
        assert!((fd.by_queries[1] - 1.0 / 3.0).abs() < 1e-12);
        assert!((fd.total() - 1.0).abs() < 1e-12);
        assert!(fd.by_queries.windows(2).all(|w| w[0] <= w[1]));
        assert!(fd.by_cost.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1));
        assert!((fd.within_cost(1.0) - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(fd.within_cost(0.5), 0.0);
    }

    #[test]
    fn single_query_tree() {
        let inst = adaptivity_gap(1.0 / 3.0).unwrap();
        let stop = PolicyTree::Stop(Verdict {
            rule: StopRule::Old,
            minimizer: 0,
            value: Some(0.0),
        });
        let tree = PolicyTree::Query {
            variable: 1,
            children: vec![
                Branch { value: 1.0, probability: 0.5, subtree: stop.clone() },
                Branch { value: 1e9, probability: 0.5, subtree: stop },
            ],
        };
        let fd = finish_distribution(&tree, &inst);
        assert_eq!(fd.by_queries, vec![0.0, 1.0]);
        assert_eq!(fd.by_cost, vec![(1.0, 1.0)]);
        assert!(fd.queries_csv().starts_with("k,probability\n0,0\n1,1\n"));
    }
}
