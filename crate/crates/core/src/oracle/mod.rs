//! Exact solvers used as ground truth.

mod adaptive;
mod finish;
mod fixed_threshold;

use itertools::Itertools;
use rayon::prelude::*;

pub use adaptive::{
    optimal_adaptive, tree_shape_violations, tree_violations, AdaptivePolicy, Branch, LeafVisit,
    PolicyTree, MAX_STATES,
};
pub use finish::{finish_distribution, FinishAccumulator, FinishDistribution};
pub use fixed_threshold::{fixed_threshold_adaptive, fixed_threshold_nonadaptive, MAX_VARIABLES};

use crate::error::{QueryError, Result};
use crate::eval::expected_cost;
use crate::model::Instance;
use crate::policies::QueryPlan;

/// Largest instance [`optimal_nonadaptive`] enumerates.
pub const MAX_PERMUTATION_VARIABLES: usize = 8;

const TIE_TOLERANCE: f64 = 1e-12;

/// Cheapest fixed order, by exact evaluation of every permutation. Among
/// orders within `1e-12` of the optimum the lexicographically smallest wins.
pub fn optimal_nonadaptive(instance: &Instance) -> Result<(QueryPlan, f64)> {
    let n = instance.len();
    if n > MAX_PERMUTATION_VARIABLES {
        return Err(QueryError::SizeLimit {
            what: "permutation enumeration",
            size: n as f64,
            limit: MAX_PERMUTATION_VARIABLES as f64,
        });
    }
    let mut orders: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let costs = orders
        .par_iter()
        .map(|o| expected_cost(instance, &QueryPlan::from_order(o.clone())?))
        .collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for (k, &c) in costs.iter().enumerate() {
        if c < costs[best] - TIE_TOLERANCE {
            best = k;
        }
    }
    let cost = costs[best];
    Ok((QueryPlan::from_order(orders.swap_remove(best))?, cost))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{adaptivity_gap, from_supports};
    use crate::model::Variant;

    #[test]
    fn adaptivity_gap_orders() {
        let inst = adaptivity_gap(1.0 / 3.0).unwrap();
        let (plan, cost) = optimal_nonadaptive(&inst).unwrap();
        assert!((cost - 17.0 / 9.0).abs() < 1e-12);
        assert_eq!(plan.order, vec![0, 1, 2]);
        let alt = expected_cost(&inst, &QueryPlan::from_order(vec![0, 2, 1]).unwrap()).unwrap();
        assert!((alt - 17.0 / 9.0).abs() < 1e-12);
        for order in [vec![2, 0, 1], vec![2, 1, 0]] {
            let c = expected_cost(&inst, &QueryPlan::from_order(order).unwrap()).unwrap();
            assert!(c >= 2.0 - 1e-12);
        }
    }

    #[test]
    fn single_variable() {
        let inst = from_supports(&[&[(0.0, 0.5), (0.5, 0.5)]], &[2.0], 1.0, Variant::Smq).unwrap();
        let (plan, cost) = optimal_nonadaptive(&inst).unwrap();
        assert_eq!(plan.order, vec![0]);
        assert_eq!(cost, 0.0);
        let inst = from_supports(&[&[(0.0, 0.5), (5.0, 0.5)]], &[2.0], 1.0, Variant::Smq).unwrap();
        assert_eq!(optimal_nonadaptive(&inst).unwrap().1, 2.0);
    }

    #[test]
    fn too_many_variables() {
        let supports: Vec<&[(f64, f64)]> = (0..9).map(|_| &[(0.0, 0.5), (5.0, 0.5)][..]).collect();
        let inst = from_supports(&supports, &[1.0; 9], 0.5, Variant::Smq).unwrap();
        assert!(matches!(optimal_nonadaptive(&inst), Err(QueryError::SizeLimit { .. })));
    }
}
