//! Reference implementations written straight from the definitions, sharing
//! nothing with the library beyond reading instance data.

#![allow(dead_code)]

use std::collections::HashMap;

use querylab::{Instance, Variant};

/// Joint realizations as `(values, probability)`.
pub fn realizations(inst: &Instance) -> Vec<(Vec<f64>, f64)> {
    let mut out = vec![(Vec::new(), 1.0)];
    for v in inst.variables() {
        let mut next = Vec::with_capacity(out.len() * v.support.len());
        for (vals, p) in &out {
            for (w, q) in v.support.points() {
                let mut vals = vals.clone();
                vals.push(w);
                next.push((vals, p * q));
            }
        }
        out = next;
    }
    out
}

/// Answer certified by the rules for a partial observation vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefAnswer {
    pub value: Option<f64>,
    pub minimizer: usize,
}

pub fn ref_stop(inst: &Instance, variant: Variant, obs: &[Option<f64>]) -> Option<RefAnswer> {
    let n = inst.len();
    let delta = inst.delta();
    let mut r_min = f64::INFINITY;
    let mut r_arg = 0;
    for i in 0..n {
        if inst.right(i) < r_min {
            r_min = inst.right(i);
            r_arg = i;
        }
    }
    let mut best = (r_min, r_arg);
    for (i, o) in obs.iter().enumerate() {
        if let Some(x) = *o {
            if x < best.0 || (x == best.0 && i < best.1) {
                best = (x, i);
            }
        }
    }
    let min_left = (0..n)
        .filter(|&j| obs[j].is_none())
        .map(|j| inst.left(j))
        .fold(f64::INFINITY, f64::min);
    if best.0 <= min_left + delta {
        return Some(RefAnswer {
            value: Some(best.0),
            minimizer: best.1,
        });
    }
    if variant == Variant::Smqi {
        for i in 0..n {
            let cut = inst.right(i) - delta;
            let ok = (0..n)
                .filter(|&j| j != i && inst.left(j) < cut)
                .all(|j| matches!(obs[j], Some(x) if x >= cut));
            if ok {
                return Some(RefAnswer {
                    value: None,
                    minimizer: i,
                });
            }
        }
    }
    None
}

/// Whether an answer is right for the full realization.
pub fn ref_correct(inst: &Instance, variant: Variant, ans: &RefAnswer, values: &[f64]) -> bool {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let d = inst.delta();
    let who = values[ans.minimizer] <= min + d;
    match variant {
        Variant::Smq => who && ans.value.is_some_and(|v| min <= v && v <= min + d),
        Variant::Smqi => who,
    }
}

/// Runs an order on one realization: `(cost, queries, answer)`.
pub fn ref_run(inst: &Instance, variant: Variant, order: &[usize], values: &[f64]) -> (f64, usize, Option<RefAnswer>) {
    let mut obs = vec![None; inst.len()];
    let mut cost = 0.0;
    let mut k = 0;
    loop {
        if let Some(a) = ref_stop(inst, variant, &obs) {
            return (cost, k, Some(a));
        }
        if k == order.len() {
            return (cost, k, None);
        }
        let i = order[k];
        obs[i] = Some(values[i]);
        cost += inst.cost(i);
        k += 1;
    }
}

/// Expected cost of an order by brute force over all realizations.
pub fn ref_plan_cost(inst: &Instance, variant: Variant, order: &[usize]) -> f64 {
    realizations(inst)
        .iter()
        .map(|(vals, p)| p * ref_run(inst, variant, order, vals).0)
        .sum()
}

/// Optimal adaptive expected cost by memoized recursion over observation
/// vectors (support positions).
pub fn ref_adaptive(inst: &Instance, variant: Variant) -> f64 {
    fn go(
        inst: &Instance,
        variant: Variant,
        state: &mut Vec<Option<usize>>,
        memo: &mut HashMap<Vec<Option<usize>>, f64>,
    ) -> f64 {
        if let Some(&v) = memo.get(state.as_slice()) {
            return v;
        }
        let obs: Vec<Option<f64>> = state
            .iter()
            .enumerate()
            .map(|(i, s)| s.map(|k| inst.variable(i).support.values()[k]))
            .collect();
        let value = if ref_stop(inst, variant, &obs).is_some() {
            0.0
        } else {
            let mut best = f64::INFINITY;
            for j in 0..inst.len() {
                if state[j].is_some() {
                    continue;
                }
                let mut c = inst.cost(j);
                for (k, p) in inst.variable(j).support.probs().iter().enumerate() {
                    state[j] = Some(k);
                    c += p * go(inst, variant, state, memo);
                    state[j] = None;
                }
                best = best.min(c);
            }
            best
        };
        memo.insert(state.clone(), value);
        value
    }
    go(inst, variant, &mut vec![None; inst.len()], &mut HashMap::new())
}

/// Exact optimum of `max Σ r_j` subject to `Σ c_j <= budget` over all subsets.
pub fn ref_knapsack(costs: &[f64], rewards: &[f64], budget: f64) -> f64 {
    let n = costs.len();
    let mut best = 0.0f64;
    for m in 0u32..(1 << n) {
        let (mut c, mut r) = (0.0, 0.0);
        for j in 0..n {
            if m >> j & 1 == 1 {
                c += costs[j];
                r += rewards[j];
            }
        }
        if c <= budget {
            best = best.max(r);
        }
    }
    best
}
