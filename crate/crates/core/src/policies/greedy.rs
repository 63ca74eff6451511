use super::plan::{QueryPlan, Selection};
use crate::error::{QueryError, Result};
use crate::model::Instance;

/// Index maximizing `score` over `candidates`; the lowest index wins ties.
fn argmax_lowest(candidates: impl Iterator<Item = usize>, score: impl Fn(usize) -> f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for i in candidates {
        let s = score(i);
        match best {
            Some((_, b)) if s <= b => {}
            _ => best = Some((i, s)),
        }
    }
    best.map(|b| b.0)
}

/// Unit-cost double greedy.
///
/// Iteration `j` appends `j` (unless already planned), then the unplanned
/// variable most likely to be at most `theta_j = left_{j+1} + delta`, where
/// `left_n = +inf`. Each iteration closes a boundary, so the plan has exactly
/// `n` iterations of at most two entries each.
pub fn double_greedy_unit(instance: &Instance) -> Result<QueryPlan> {
    if !instance.has_uniform_costs() {
        return Err(QueryError::InvalidArgument(
            "unit-cost planner needs equal costs; use the general-cost planner".into(),
        ));
    }
    let n = instance.len();
    let mut planned = vec![false; n];
    let mut plan = QueryPlan::empty();
    for j in 0..n {
        if !planned[j] {
            planned[j] = true;
            plan.push(j, Selection::LeftEndpointRule);
        }
        let theta = if j + 1 < n {
            instance.left(j + 1) + instance.delta()
        } else {
            f64::INFINITY
        };
        let pick = argmax_lowest((0..n).filter(|&i| !planned[i]), |i| {
            instance.variable(i).support.cdf(theta)
        });
        if let Some(b) = pick {
            planned[b] = true;
            plan.push(b, Selection::StopProbRule);
        }
        plan.close_iteration();
    }
    Ok(plan)
}

/// Queries in canonical (left endpoint) order.
pub fn baseline_left_endpoint(instance: &Instance) -> QueryPlan {
    let mut plan = QueryPlan::empty();
    for i in 0..instance.len() {
        plan.push(i, Selection::LeftEndpointRule);
        plan.close_iteration();
    }
    plan
}

/// Repeatedly appends the variable whose own realization is most likely to
/// trigger the value rule, judged against the smallest left endpoint that
/// would remain unplanned after choosing it.
pub fn baseline_stop_prob(instance: &Instance) -> QueryPlan {
    let n = instance.len();
    let mut planned = vec![false; n];
    let mut plan = QueryPlan::empty();
    for _ in 0..n {
        let pick = argmax_lowest((0..n).filter(|&i| !planned[i]), |i| {
            let rest = (0..n)
                .find(|&j| j != i && !planned[j])
                .map_or(f64::INFINITY, |j| instance.left(j));
            instance.variable(i).support.cdf(rest + instance.delta())
        })
        .expect("an unplanned variable remains");
        planned[pick] = true;
        plan.push(pick, Selection::StopProbRule);
        plan.close_iteration();
    }
    plan
}
