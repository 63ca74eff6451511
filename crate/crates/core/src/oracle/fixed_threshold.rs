//! Fixed-threshold problem: with a query budget, maximize the probability of
//! seeing some value at most `theta`. The only useful information a query
//! returns is whether it succeeded, so an adaptive policy is a sequence that
//! is followed until the first success, and the adaptive and non-adaptive
//! optima coincide.

use crate::error::{QueryError, Result};
use crate::model::QueryVariable;

pub const MAX_VARIABLES: usize = 20;

fn check(variables: &[QueryVariable]) -> Result<()> {
    if variables.len() > MAX_VARIABLES {
        return Err(QueryError::SizeLimit {
            what: "fixed-threshold variables",
            size: variables.len() as f64,
            limit: MAX_VARIABLES as f64,
        });
    }
    Ok(())
}

/// `mask_costs[m]` sums the costs of `m`'s members in ascending index order,
/// so both solvers agree on feasibility bit for bit.
fn mask_costs(variables: &[QueryVariable]) -> Vec<f64> {
    let n = variables.len();
    let mut out = vec![0.0; 1 << n];
    for m in 1usize..(1 << n) {
        let high = usize::BITS as usize - 1 - m.leading_zeros() as usize;
        out[m] = out[m & !(1 << high)] + variables[high].cost;
    }
    out
}

/// Best adaptive success probability, by recursion over the set of variables
/// already queried (all of which failed).
pub fn fixed_threshold_adaptive(variables: &[QueryVariable], theta: f64, budget: f64) -> Result<f64> {
    check(variables)?;
    let n = variables.len();
    let p: Vec<f64> = variables.iter().map(|v| v.support.cdf(theta)).collect();
    let costs = mask_costs(variables);
    let mut memo = vec![f64::NAN; 1 << n];
    fn value(done: usize, p: &[f64], costs: &[f64], budget: f64, memo: &mut [f64]) -> f64 {
        if !memo[done].is_nan() {
            return memo[done];
        }
        let mut best = 0.0f64;
        for a in 0..p.len() {
            let next = done | (1 << a);
            if next == done || costs[next] > budget {
                continue;
            }
            let v = p[a] + (1.0 - p[a]) * value(next, p, costs, budget, memo);
            best = best.max(v);
        }
        memo[done] = best;
        best
    }
    Ok(value(0, &p, &costs, budget, &mut memo))
}

/// Best non-adaptive success probability `max 1 - ∏_{j∈T} Pr[X_j > theta]`
/// over sets `T` within budget.
pub fn fixed_threshold_nonadaptive(variables: &[QueryVariable], theta: f64, budget: f64) -> Result<f64> {
    check(variables)?;
    let n = variables.len();
    let q: Vec<f64> = variables.iter().map(|v| v.support.tail(theta)).collect();
    let costs = mask_costs(variables);
    let mut best = 0.0f64;
    for (m, &c) in costs.iter().enumerate() {
        if c > budget {
            continue;
        }
        let miss: f64 = (0..n).filter(|&j| m >> j & 1 == 1).map(|j| q[j]).product();
        best = best.max(1.0 - miss);
    }
    Ok(best)
}
