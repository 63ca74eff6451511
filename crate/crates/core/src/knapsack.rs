//! `(1, 1+ε)` bicriteria solver for the probability-product knapsack.
//!
//! Minimizing `∏_{j∈T} q_j` subject to `c(T) <= d` is a 0/1 knapsack with
//! rewards `r_j = -ln q_j`. Items costing more than `εd` are "large": every
//! feasible subset of them (fewer than `1/ε` items) is enumerated, and each
//! is extended with small items in nonincreasing `r/c` order until the cost
//! first exceeds `d`. The best candidate reaches the budget-`d` optimum while
//! spending at most `d + εd`.

use serde::{Deserialize, Serialize};

use crate::error::{QueryError, Result};

/// Tail probabilities below this are treated as this value.
pub const TAIL_FLOOR: f64 = 1e-300;

/// Upper limit on large-item subsets the solver is willing to visit.
pub const MAX_CANDIDATES: f64 = 1e7;

pub const DEFAULT_EPSILON: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnapsackItem {
    pub index: usize,
    pub cost: f64,
    /// `Pr[X > theta]`.
    pub tail_prob: f64,
    /// `-ln max(tail_prob, TAIL_FLOOR)`.
    pub reward: f64,
}

impl KnapsackItem {
    pub fn new(index: usize, cost: f64, tail_prob: f64) -> Result<Self> {
        if !(cost > 0.0 && cost.is_finite()) {
            return Err(QueryError::InvalidArgument(format!(
                "knapsack item {index} needs a positive cost, got {cost}"
            )));
        }
        if !(0.0..=1.0 + 1e-12).contains(&tail_prob) {
            return Err(QueryError::InvalidArgument(format!(
                "knapsack item {index} has tail probability {tail_prob}"
            )));
        }
        let q = tail_prob.min(1.0);
        Ok(Self {
            index,
            cost,
            tail_prob: q,
            reward: -q.max(TAIL_FLOOR).ln(),
        })
    }
}

/// Chosen items (ascending `index`) with their totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnapsackSolution {
    pub chosen: Vec<usize>,
    pub cost: f64,
    pub reward: f64,
}

impl KnapsackSolution {
    fn empty() -> Self {
        Self {
            chosen: Vec::new(),
            cost: 0.0,
            reward: 0.0,
        }
    }

    /// `∏ q_j` over the chosen items.
    pub fn tail_product(&self, items: &[KnapsackItem]) -> f64 {
        items
            .iter()
            .filter(|it| self.chosen.contains(&it.index))
            .map(|it| it.tail_prob)
            .product()
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Sums in ascending index order so equal sets give bit-identical totals.
fn totals(items: &[KnapsackItem], picked: &[usize]) -> (Vec<usize>, f64, f64) {
    let mut ids: Vec<usize> = picked.to_vec();
    ids.sort_by_key(|&k| items[k].index);
    let cost = ids.iter().map(|&k| items[k].cost).sum();
    let reward = ids.iter().map(|&k| items[k].reward).sum();
    (ids.into_iter().map(|k| items[k].index).collect(), cost, reward)
}

fn better(a: &KnapsackSolution, b: &KnapsackSolution) -> bool {
    a.reward > b.reward || (a.reward == b.reward && a.chosen < b.chosen)
}

/// Bicriteria knapsack: `cost <= (1+ε)d` and reward at least the best
/// reward achievable within budget `d`.
pub fn bicriteria_knapsack(
    items: &[KnapsackItem],
    budget: f64,
    epsilon: f64,
) -> Result<KnapsackSolution> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(QueryError::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(QueryError::InvalidArgument(format!(
            "budget must be positive, got {budget}"
        )));
    }
    let usable: Vec<usize> = (0..items.len())
        .filter(|&k| items[k].cost <= (1.0 + epsilon) * budget)
        .collect();
    if usable.is_empty() {
        return Ok(KnapsackSolution::empty());
    }

    let large_cut = epsilon * budget;
    let large: Vec<usize> = usable
        .iter()
        .copied()
        .filter(|&k| items[k].cost > large_cut && items[k].cost <= budget)
        .collect();
    let mut small: Vec<usize> = usable
        .iter()
        .copied()
        .filter(|&k| items[k].cost <= large_cut && items[k].reward > 0.0)
        .collect();
    small.sort_by(|&a, &b| {
        let ra = items[a].reward / items[a].cost;
        let rb = items[b].reward / items[b].cost;
        rb.total_cmp(&ra).then(items[a].index.cmp(&items[b].index))
    });

    // Each large item costs more than εd, so a feasible subset has fewer than 1/ε of them.
    let max_large = ((1.0 / epsilon).ceil() as usize).saturating_sub(1).min(large.len());
    let bound: f64 = (0..=max_large).map(|k| binomial(large.len(), k)).sum();
    if bound > MAX_CANDIDATES {
        return Err(QueryError::BudgetTooFine { candidates: bound });
    }

    let mut best = KnapsackSolution::empty();
    let mut stack: Vec<usize> = Vec::new();
    enumerate(items, &large, 0, 0.0, budget, &mut stack, &mut |base, base_cost| {
        let mut picked = base.to_vec();
        let mut cost = base_cost;
        for &k in &small {
            if cost > budget {
                break;
            }
            picked.push(k);
            cost += items[k].cost;
        }
        let (chosen, cost, reward) = totals(items, &picked);
        let cand = KnapsackSolution { chosen, cost, reward };
        if better(&cand, &best) {
            best = cand;
        }
    });
    Ok(best)
}

fn enumerate(
    items: &[KnapsackItem],
    large: &[usize],
    from: usize,
    cost: f64,
    budget: f64,
    stack: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize], f64),
) {
    visit(stack, cost);
    for pos in from..large.len() {
        let k = large[pos];
        let next = cost + items[k].cost;
        if next <= budget {
            stack.push(k);
            enumerate(items, large, pos + 1, next, budget, stack, visit);
            stack.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    /// Exact optimum over all subsets within budget `d`.
    fn brute_force_knapsack(items: &[KnapsackItem], budget: f64) -> KnapsackSolution {
        assert!(items.len() <= 24, "brute force is limited to 24 items");
        let mut best = KnapsackSolution::empty();
        for mask in 0u32..(1u32 << items.len()) {
            let picked: Vec<usize> = (0..items.len()).filter(|&k| mask >> k & 1 == 1).collect();
            let (chosen, cost, reward) = totals(items, &picked);
            if cost > budget {
                continue;
            }
            let cand = KnapsackSolution { chosen, cost, reward };
            if better(&cand, &best) {
                best = cand;
            }
        }
        best
    }

    fn item(index: usize, cost: f64, q: f64) -> KnapsackItem {
        KnapsackItem::new(index, cost, q).unwrap()
    }

    #[test]
    fn single_affordable_item() {
        let items = [item(0, 1.0, 0.5)];
        let sol = bicriteria_knapsack(&items, 1.0, 0.5).unwrap();
        assert_eq!(sol.chosen, vec![0]);
        assert!((sol.reward - LN_2).abs() < 1e-15);
    }

    #[test]
    fn zero_rewards_choose_nothing() {
        let items: Vec<_> = (0..5).map(|k| item(k, 1.0 + k as f64, 1.0)).collect();
        let sol = bicriteria_knapsack(&items, 3.0, 0.25).unwrap();
        assert!(sol.chosen.is_empty());
        assert!(bicriteria_knapsack(&[], 3.0, 0.25).unwrap().chosen.is_empty());
    }

    #[test]
    fn certain_item_is_capped() {
        let it = item(3, 1.0, 0.0);
        assert!((it.reward - 690.7755278982137).abs() < 1e-9);
        assert!(it.reward.is_finite());
    }

    #[test]
    fn rejects_bad_parameters() {
        let items = [item(0, 1.0, 0.5)];
        assert!(bicriteria_knapsack(&items, 1.0, 0.0).is_err());
        assert!(bicriteria_knapsack(&items, 0.0, 0.5).is_err());
        assert!(KnapsackItem::new(0, 0.0, 0.5).is_err());
        assert!(KnapsackItem::new(0, 1.0, 1.5).is_err());
    }

    #[test]
    fn too_fine_budget_fails() {
        let items: Vec<_> = (0..200).map(|k| item(k, 1.0, 0.9)).collect();
        assert!(matches!(
            bicriteria_knapsack(&items, 100.0, 0.009),
            Err(QueryError::BudgetTooFine { .. })
        ));
    }

    #[test]
    fn small_items_overshoot_by_at_most_epsilon() {
        let items: Vec<_> = (0..10).map(|k| item(k, 0.3, 0.5)).collect();
        let sol = bicriteria_knapsack(&items, 1.0, 0.3).unwrap();
        // greedy adds until the cost first exceeds 1: four items, cost 1.2
        assert_eq!(sol.chosen.len(), 4);
        assert!(sol.cost <= 1.3 + 1e-12);
    }

    #[test]
    fn six_random_items_against_enumeration() {
        // Frozen instance; the brute-force optimum over all 64 subsets is {1, 2}
        // with reward -ln(0.15).
        let items = [
            item(0, 1.7, 0.8),
            item(1, 0.6, 0.5),
            item(2, 2.2, 0.3),
            item(3, 0.9, 0.6),
            item(4, 1.4, 0.7),
            item(5, 1.1, 0.55),
        ];
        let exact = brute_force_knapsack(&items, 3.0);
        assert_eq!(exact.chosen, vec![1, 2]);
        assert!((exact.reward - 1.8971199848858813).abs() < 1e-12);
        let sol = bicriteria_knapsack(&items, 3.0, 0.3).unwrap();
        assert!(sol.cost <= 3.9 + 1e-12);
        assert!(sol.reward >= exact.reward - 1e-12);
    }

    #[test]
    fn budget_increase_can_lower_reward() {
        // Raising d moves items 1 and 2 below the large-item cut, and the
        // greedy pass then prefers item 1 (r/c 0.7236) over item 2 (0.7233).
        let items = [
            item(0, 1.0479529920323134, 0.4212146312208691),
            item(1, 1.5113756131533533, 0.33506604508459925),
            item(2, 1.5568516225017388, 0.3243111162410402),
            item(3, 2.2294050448683818, 0.0),
            item(4, 1.6171397088584445, 0.0),
            item(5, 0.1, 0.0),
        ];
        let d = 5.790732921930086;
        let small = bicriteria_knapsack(&items, d, 0.25).unwrap();
        let large = bicriteria_knapsack(&items, d + 0.6710951250536218, 0.25).unwrap();
        assert_eq!(small.chosen, vec![0, 2, 3, 4, 5]);
        assert_eq!(large.chosen, vec![0, 1, 3, 4, 5]);
        assert!(large.reward < small.reward);
        assert!(large.reward >= brute_force_knapsack(&items, d).reward - 1e-9);
    }

    proptest! {
        #[test]
        fn bicriteria_guarantee(
            raw in prop::collection::vec((0.05f64..4.0, 0.0f64..=1.0), 0..10),
            budget in 0.5f64..6.0,
            eps in 0.15f64..1.0,
        ) {
            let items: Vec<_> = raw.iter().enumerate().map(|(k, &(c, q))| item(k, c, q)).collect();
            let sol = bicriteria_knapsack(&items, budget, eps).unwrap();
            let exact = brute_force_knapsack(&items, budget);
            prop_assert!(sol.cost <= (1.0 + eps) * budget + 1e-12);
            prop_assert!(sol.reward >= exact.reward - 1e-9);
            prop_assert!(sol.tail_product(&items) <= exact.tail_product(&items) * (1.0 + 1e-9) + 1e-300);
        }

        #[test]
        fn larger_budget_never_hurts(
            raw in prop::collection::vec((0.05f64..4.0, 0.0f64..=1.0), 1..9),
            budget in 0.5f64..5.0,
            extra in 0.0f64..3.0,
        ) {
            let items: Vec<_> = raw.iter().enumerate().map(|(k, &(c, q))| item(k, c, q)).collect();
            let eps = 0.25;
            let small = bicriteria_knapsack(&items, budget, eps).unwrap();
            let big = bicriteria_knapsack(&items, budget + extra, eps).unwrap();
            // both dominate their exact optimum, and the exact optimum is monotone
            let exact_small = brute_force_knapsack(&items, budget);
            prop_assert!(big.reward >= exact_small.reward - 1e-9);
            prop_assert!(small.reward >= exact_small.reward - 1e-9);
        }
    }
}
