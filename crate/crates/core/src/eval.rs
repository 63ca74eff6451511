//! Expected cost of fixed plans: closed form, exhaustive enumeration and
//! seeded Monte Carlo, plus the full-information benchmark.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QueryError, Result};
use crate::instances::competitive_ratio_low_prob;
use crate::model::{
    for_each_realization, stop_for, verdict_is_correct, Instance, QueryState, Variant,
};
use crate::oracle::{FinishAccumulator, FinishDistribution};
use crate::policies::{run_plan, QueryPlan};

/// Largest number of joint realizations the enumerators accept.
pub const MAX_REALIZATIONS: f64 = 1e7;

/// Largest `realizations × 2^n` the hindsight enumerator accepts.
pub const MAX_HINDSIGHT_WORK: f64 = 1e9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanEvaluation {
    pub expected_cost: f64,
    /// `by_queries[k]`: probability of having stopped after the first `k` plan entries.
    pub finish: FinishDistribution,
}

impl PlanEvaluation {
    /// Probability that the plan has not stopped by the end of iteration `g`.
    pub fn unfinished_after_iteration(&self, plan: &QueryPlan, g: usize) -> f64 {
        1.0 - self.finish.within_queries(plan.prefix_through(g))
    }
}

fn check_realizations(instance: &Instance) -> Result<()> {
    let count = instance.realization_count();
    if count > MAX_REALIZATIONS {
        return Err(QueryError::SizeLimit {
            what: "joint realizations",
            size: count,
            limit: MAX_REALIZATIONS,
        });
    }
    Ok(())
}

/// Closed-form evaluation under the value rule.
///
/// After the first `k` entries the smallest unqueried left endpoint `L_k`
/// is fixed, and the rule has not fired iff `R` and every queried value
/// exceed `L_k + delta`; by independence that probability is a product.
/// The rule is monotone along the plan, so not having stopped after `k`
/// entries implies not having stopped earlier.
pub fn exact_cost_smq(instance: &Instance, plan: &QueryPlan) -> Result<PlanEvaluation> {
    if instance.variant() != Variant::Smq {
        return Err(QueryError::VariantMismatch {
            expected: Variant::Smq,
            found: instance.variant(),
        });
    }
    plan.validate(instance)?;
    let n = instance.len();
    let mut queried = vec![false; n];
    let mut first_open = 0;
    let mut acc = FinishAccumulator::new();
    let mut expected = 0.0;
    let mut cost = 0.0;
    let mut prev_running = 1.0;
    for k in 0..=plan.len() {
        if k > 0 {
            let i = plan.order[k - 1];
            queried[i] = true;
            expected += instance.cost(i) * prev_running;
            cost += instance.cost(i);
            while first_open < n && queried[first_open] {
                first_open += 1;
            }
        }
        let running = if first_open == n {
            0.0
        } else {
            let threshold = instance.left(first_open) + instance.delta();
            if instance.virtual_value() <= threshold {
                0.0
            } else {
                plan.order[..k]
                    .iter()
                    .map(|&i| instance.variable(i).support.tail(threshold))
                    .product()
            }
        };
        acc.add(k, cost, (prev_running - running).max(0.0));
        prev_running = running;
    }
    Ok(PlanEvaluation {
        expected_cost: expected,
        finish: acc.finish(),
    })
}

/// Evaluation by walking every outcome of the plan's queries; valid for
/// both variants.
pub fn exact_cost_enumeration(instance: &Instance, plan: &QueryPlan) -> Result<PlanEvaluation> {
    plan.validate(instance)?;
    check_realizations(instance)?;
    let mut acc = FinishAccumulator::new();
    acc.reserve_queries(plan.len());
    let mut expected = 0.0;
    let mut state = QueryState::new(instance);
    walk_plan(instance, plan, 0, 1.0, 0.0, &mut state, &mut |k, cost, prob, stopped| {
        expected += prob * cost;
        if stopped {
            acc.add(k, cost, prob);
        }
    });
    Ok(PlanEvaluation {
        expected_cost: expected,
        finish: acc.finish(),
    })
}

fn walk_plan(
    instance: &Instance,
    plan: &QueryPlan,
    k: usize,
    prob: f64,
    cost: f64,
    state: &mut QueryState,
    leaf: &mut impl FnMut(usize, f64, f64, bool),
) {
    if stop_for(instance.variant(), state, instance).is_some() {
        leaf(k, cost, prob, true);
        return;
    }
    if k == plan.len() {
        leaf(k, cost, prob, false);
        return;
    }
    let i = plan.order[k];
    let c = cost + instance.cost(i);
    for (w, p) in instance.variable(i).support.points() {
        state.record(i, w);
        walk_plan(instance, plan, k + 1, prob * p, c, state, leaf);
        state.forget(instance, i);
    }
}

/// Exact evaluation: closed form for the value problem, enumeration otherwise.
pub fn exact_cost(instance: &Instance, plan: &QueryPlan) -> Result<PlanEvaluation> {
    match instance.variant() {
        Variant::Smq => exact_cost_smq(instance, plan),
        Variant::Smqi => exact_cost_enumeration(instance, plan),
    }
}

/// Expected cost only; see [`exact_cost`].
pub fn expected_cost(instance: &Instance, plan: &QueryPlan) -> Result<f64> {
    Ok(exact_cost(instance, plan)?.expected_cost)
}

/// Number of joint realizations on which running `plan` returns a wrong
/// answer or exhausts the plan without an answer.
pub fn plan_violations(instance: &Instance, plan: &QueryPlan) -> Result<usize> {
    plan.validate(instance)?;
    check_realizations(instance)?;
    let mut bad = 0;
    let mut failure = None;
    for_each_realization(instance, |values, _| {
        if failure.is_some() {
            return;
        }
        match run_plan(instance, plan, values) {
            Ok(trace) => match trace.verdict() {
                Some(v) if verdict_is_correct(instance, &v, values) => {}
                _ => bad += 1,
            },
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(bad),
    }
}

/// Monte Carlo estimate of a plan's expected cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Sample `s` draws from its own ChaCha stream `(seed, s)`, so results do
/// not depend on how samples are spread over threads.
pub fn monte_carlo_cost(instance: &Instance, plan: &QueryPlan, samples: usize, seed: u64) -> Result<McEstimate> {
    if samples == 0 {
        return Err(QueryError::InvalidArgument("samples must be at least 1".into()));
    }
    plan.validate(instance)?;
    let costs = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let values: Vec<f64> = instance
                .variables()
                .iter()
                .map(|v| v.support.sample(&mut rng))
                .collect();
            run_plan(instance, plan, &values).map(|t| t.total_cost)
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = samples as f64;
    let mean = costs.iter().sum::<f64>() / n;
    let stderr = if samples > 1 {
        let var = costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(McEstimate {
        mean,
        stderr,
        samples,
        seed,
    })
}

/// Expected cost of the cheapest certificate when every realization is
/// known in advance: for each joint realization, the cheapest set of
/// variables whose observation satisfies the variant's stop rule.
pub fn hindsight_cost(instance: &Instance) -> Result<f64> {
    check_realizations(instance)?;
    let n = instance.len();
    let work = instance.realization_count() * 2f64.powi(n as i32);
    if work > MAX_HINDSIGHT_WORK {
        return Err(QueryError::SizeLimit {
            what: "hindsight enumeration",
            size: work,
            limit: MAX_HINDSIGHT_WORK,
        });
    }
    let mut masks: Vec<(f64, usize)> = (0usize..1 << n)
        .map(|m| {
            let c = (0..n).filter(|&j| m >> j & 1 == 1).map(|j| instance.cost(j)).sum();
            (c, m)
        })
        .collect();
    masks.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut total = 0.0;
    for_each_realization(instance, |values, prob| {
        for &(c, m) in &masks {
            let mut state = QueryState::new(instance);
            for j in (0..n).filter(|&j| m >> j & 1 == 1) {
                state.record(j, values[j]);
            }
            if stop_for(instance.variant(), &state, instance).is_some() {
                total += prob * c;
                return;
            }
        }
        unreachable!("querying everything always stops");
    });
    Ok(total)
}

/// Hindsight optimum of the competitive-ratio family: one query when some
/// variable takes its low value, all `n` otherwise.
pub fn competitive_hindsight(n: usize) -> f64 {
    let p = competitive_ratio_low_prob(n);
    let miss = (1.0 - p).powi(n as i32);
    (1.0 - miss) + n as f64 * miss
}

/// Expected cost of any fixed order on the competitive-ratio family:
/// `Σ_{k<n} (1-p)^k`, since the first low value stops the search.
pub fn competitive_order_cost(n: usize) -> f64 {
    let p = competitive_ratio_low_prob(n);
    (0..n).map(|k| (1.0 - p).powi(k as i32)).sum()
}

/// `(1/p)(1 - e^{-pn})`, a lower bound on [`competitive_order_cost`].
pub fn competitive_lower_bound(n: usize) -> f64 {
    let p = competitive_ratio_low_prob(n);
    (1.0 - (-p * n as f64).exp()) / p
}
