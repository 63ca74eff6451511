//! Double greedy for general costs.
//!
//! Costs are divided by the smallest cost first, so the cheapest variable
//! costs one. Iteration `g` works with budget `y^g`: it appends a
//! cost-bounded prefix (or almost-prefix, for identification), sets the
//! threshold to the smallest unplanned left endpoint plus `delta`, and then
//! appends a bicriteria knapsack solution maximizing the chance that some
//! chosen variable lands at or below that threshold. The plan depends only on
//! which variables are planned, never on observations.

use std::f64::consts::SQRT_2;

use super::plan::{QueryPlan, Selection};
use crate::error::{QueryError, Result};
use crate::knapsack::{bicriteria_knapsack, KnapsackItem};
use crate::model::Instance;

/// Base minimizing `y (1 + y/(y-1))`; the minimum is `3 + 2√2`.
pub const DEFAULT_Y_SMQ: f64 = 1.0 + SQRT_2 / 2.0;

/// Base minimizing `y (2 + y/(y-1))`; the minimum is `4 + 2√3`.
pub const DEFAULT_Y_SMQI: f64 = 1.0 + 0.577_350_269_189_625_8;

/// Safety cap on iterations; `y^g` passes any finite total cost long before.
const MAX_ITERATIONS: usize = 100_000;

fn budget(y: f64, g: usize) -> f64 {
    y.powi(g as i32)
}

/// Longest prefix `{0..k}` with total cost at most `y^g`.
pub fn prefix_t(costs: &[f64], y: f64, g: usize) -> Vec<usize> {
    prefix_within(costs, 0..costs.len(), budget(y, g))
}

fn prefix_within(costs: &[f64], order: impl Iterator<Item = usize>, limit: f64) -> Vec<usize> {
    let mut total = 0.0;
    let mut out = Vec::new();
    for i in order {
        total += costs[i];
        if total > limit {
            break;
        }
        out.push(i);
    }
    out
}

/// Almost-prefix set that steps over the first variable costing more than `y^g`.
///
/// With `a` and `b` the first and second such variables (`n` when absent),
/// `A = {0..a}` and `B = {a+1..b}`: if `c(A) > y^g` return the maximal prefix
/// of `A` with cost at most `2 y^g`, else the maximal prefix of `A ∪ B` (in
/// index order, skipping `a`) with cost at most `y^g`.
pub fn almost_prefix_s(costs: &[f64], y: f64, g: usize) -> Vec<usize> {
    let n = costs.len();
    let limit = budget(y, g);
    let mut big = (0..n).filter(|&i| costs[i] > limit);
    let a = big.next().unwrap_or(n);
    let b = big.next().unwrap_or(n);
    let cost_a: f64 = costs[..a].iter().sum();
    if cost_a > limit {
        prefix_within(costs, 0..a, 2.0 * limit)
    } else {
        prefix_within(costs, (0..a).chain((a + 1).min(n)..b), limit)
    }
}

fn check_params(y: f64, epsilon: f64) -> Result<()> {
    if !(y > 1.0 && y.is_finite()) {
        return Err(QueryError::InvalidArgument(format!("y must exceed 1, got {y}")));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(QueryError::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    Ok(())
}

fn plan_general(
    instance: &Instance,
    y: f64,
    epsilon: f64,
    front: impl Fn(&[f64], f64, usize) -> Vec<usize>,
    front_tag: Selection,
) -> Result<QueryPlan> {
    check_params(y, epsilon)?;
    let costs = instance.scaled_costs()?;
    let n = instance.len();
    let mut planned = vec![false; n];
    let mut remaining = n;
    let mut plan = QueryPlan::empty();

    for g in 0..MAX_ITERATIONS {
        let limit = budget(y, g);
        for i in front(&costs, y, g) {
            if !planned[i] {
                planned[i] = true;
                remaining -= 1;
                plan.push(i, front_tag);
            }
        }
        if remaining > 0 {
            let first_open = (0..n).find(|&i| !planned[i]).expect("unplanned variable");
            let theta = instance.left(first_open) + instance.delta();
            let open: Vec<usize> = (0..n).filter(|&i| !planned[i]).collect();
            let items = open
                .iter()
                .map(|&i| KnapsackItem::new(i, costs[i], instance.variable(i).support.tail(theta)))
                .collect::<Result<Vec<_>>>()?;
            let open_cost: f64 = open.iter().map(|&i| costs[i]).sum();
            let mut batch: Vec<KnapsackItem> = if open_cost <= limit {
                items
            } else {
                let sol = bicriteria_knapsack(&items, limit, epsilon)?;
                items
                    .into_iter()
                    .filter(|it| sol.chosen.contains(&it.index))
                    .collect()
            };
            // within a batch, likeliest-to-stop per unit cost first
            batch.sort_by(|a, b| {
                (b.reward / b.cost)
                    .total_cmp(&(a.reward / a.cost))
                    .then(a.index.cmp(&b.index))
            });
            for it in batch {
                planned[it.index] = true;
                remaining -= 1;
                plan.push(it.index, Selection::KnapsackU);
            }
        }
        plan.close_iteration();
        if remaining == 0 {
            return Ok(plan);
        }
    }
    Err(QueryError::InvalidArgument(format!(
        "plan did not cover all variables within {MAX_ITERATIONS} iterations"
    )))
}

/// General-cost planner for the value problem.
pub fn double_greedy_general(instance: &Instance, y: f64, epsilon: f64) -> Result<QueryPlan> {
    plan_general(instance, y, epsilon, prefix_t, Selection::PrefixT)
}

/// General-cost planner for the identification problem: the prefix step
/// uses [`almost_prefix_s`] so one expensive variable cannot block the
/// cheap ones behind it.
pub fn double_greedy_smqi_general(instance: &Instance, y: f64, epsilon: f64) -> Result<QueryPlan> {
    plan_general(instance, y, epsilon, almost_prefix_s, Selection::AlmostPrefixS)
}

/// `(1+ε)(extra + y/(y-1)) y^g`: worst-case cost through iteration `g`, with
/// `extra = 1` for prefixes and `2` for almost-prefixes.
pub fn iteration_cost_bound(y: f64, epsilon: f64, extra: f64, g: usize) -> f64 {
    (1.0 + epsilon) * (extra + y / (y - 1.0)) * budget(y, g)
}
