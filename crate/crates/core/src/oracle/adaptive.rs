use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{QueryError, Result};
use crate::model::{for_each_completion, stop_for, verdict_is_correct, Instance, QueryState, Verdict};

/// Largest number of states `∏ (s_j + 1)` the exact solver accepts.
pub const MAX_STATES: f64 = 1e7;

/// Costs closer than this are ties; the lower index wins.
const TIE_TOLERANCE: f64 = 1e-12;

/// An adaptive policy as a decision tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyTree {
    Stop(Verdict),
    Query { variable: usize, children: Vec<Branch> },
}

/// One outcome of a query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub value: f64,
    pub probability: f64,
    pub subtree: PolicyTree,
}

/// A leaf as seen from the root.
#[derive(Debug, Clone, Copy)]
pub struct LeafVisit<'a> {
    /// `(variable, value)` along the path, in query order.
    pub path: &'a [(usize, f64)],
    pub probability: f64,
    pub cost: f64,
    pub verdict: &'a Verdict,
}

impl PolicyTree {
    /// Visits every leaf with its path probability and cumulative cost.
    pub fn for_each_leaf(&self, instance: &Instance, mut f: impl FnMut(LeafVisit<'_>)) {
        let mut path = Vec::new();
        self.visit(instance, &mut path, 1.0, 0.0, &mut f);
    }

    fn visit(
        &self,
        instance: &Instance,
        path: &mut Vec<(usize, f64)>,
        prob: f64,
        cost: f64,
        f: &mut impl FnMut(LeafVisit<'_>),
    ) {
        match self {
            PolicyTree::Stop(verdict) => f(LeafVisit {
                path,
                probability: prob,
                cost,
                verdict,
            }),
            PolicyTree::Query { variable, children } => {
                for b in children {
                    path.push((*variable, b.value));
                    b.subtree.visit(
                        instance,
                        path,
                        prob * b.probability,
                        cost + instance.cost(*variable),
                        f,
                    );
                    path.pop();
                }
            }
        }
    }

    /// Expected cost recomputed from the leaves.
    pub fn expected_cost(&self, instance: &Instance) -> f64 {
        let mut total = 0.0;
        self.for_each_leaf(instance, |leaf| total += leaf.probability * leaf.cost);
        total
    }

    pub fn node_count(&self) -> usize {
        match self {
            PolicyTree::Stop(_) => 1,
            PolicyTree::Query { children, .. } => {
                1 + children.iter().map(|b| b.subtree.node_count()).sum::<usize>()
            }
        }
    }
}

/// An optimal adaptive policy and its expected cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptivePolicy {
    pub expected_cost: f64,
    pub root: PolicyTree,
}

fn state_count(instance: &Instance) -> f64 {
    instance
        .variables()
        .iter()
        .map(|v| v.support.len() as f64 + 1.0)
        .product()
}

struct Solver<'a> {
    instance: &'a Instance,
    radix: Vec<u64>,
    memo: HashMap<u64, (f64, Option<usize>)>,
}

impl Solver<'_> {
    fn solve(&mut self, state: &mut QueryState, code: u64) -> f64 {
        if let Some(&(v, _)) = self.memo.get(&code) {
            return v;
        }
        let inst = self.instance;
        if stop_for(inst.variant(), state, inst).is_some() {
            self.memo.insert(code, (0.0, None));
            return 0.0;
        }
        let mut best = (f64::INFINITY, None);
        for j in 0..inst.len() {
            if state.is_queried(j) {
                continue;
            }
            let mut cost = inst.cost(j);
            for (k, (w, p)) in inst.variable(j).support.points().enumerate() {
                state.record(j, w);
                cost += p * self.solve(state, code + (k as u64 + 1) * self.radix[j]);
                state.forget(inst, j);
            }
            if cost < best.0 - TIE_TOLERANCE {
                best = (cost, Some(j));
            }
        }
        self.memo.insert(code, best);
        best.0
    }

    fn build(&self, state: &mut QueryState, code: u64) -> PolicyTree {
        let inst = self.instance;
        match self.memo[&code].1 {
            None => PolicyTree::Stop(
                stop_for(inst.variant(), state, inst).expect("memoized leaf must stop"),
            ),
            Some(j) => {
                let children = inst
                    .variable(j)
                    .support
                    .points()
                    .enumerate()
                    .map(|(k, (w, p))| {
                        state.record(j, w);
                        let subtree = self.build(state, code + (k as u64 + 1) * self.radix[j]);
                        state.forget(inst, j);
                        Branch {
                            value: w,
                            probability: p,
                            subtree,
                        }
                    })
                    .collect();
                PolicyTree::Query {
                    variable: j,
                    children,
                }
            }
        }
    }
}

/// Exact optimal adaptive policy for the instance's variant, by memoized
/// recursion over full observation vectors.
pub fn optimal_adaptive(instance: &Instance) -> Result<AdaptivePolicy> {
    let states = state_count(instance);
    if states > MAX_STATES {
        return Err(QueryError::SizeLimit {
            what: "adaptive state space",
            size: states,
            limit: MAX_STATES,
        });
    }
    let mut radix = Vec::with_capacity(instance.len());
    let mut r = 1u64;
    for v in instance.variables() {
        radix.push(r);
        r *= v.support.len() as u64 + 1;
    }
    let mut solver = Solver {
        instance,
        radix,
        memo: HashMap::new(),
    };
    let mut state = QueryState::new(instance);
    let expected_cost = solver.solve(&mut state, 0);
    let root = solver.build(&mut state, 0);
    Ok(AdaptivePolicy { expected_cost, root })
}

/// Number of leaves whose verdict is wrong for some completion of the
/// variables left unqueried on that path.
pub fn tree_violations(instance: &Instance, tree: &PolicyTree) -> usize {
    let mut bad = 0;
    tree.for_each_leaf(instance, |leaf| {
        let mut fixed = vec![None; instance.len()];
        for &(i, v) in leaf.path {
            fixed[i] = Some(v);
        }
        let mut ok = true;
        for_each_completion(instance, &fixed, |values, _| {
            ok &= verdict_is_correct(instance, leaf.verdict, values);
        });
        if !ok {
            bad += 1;
        }
    });
    bad
}

/// Number of nodes whose stop status contradicts their kind: leaves must
/// satisfy the stop rule, internal nodes must not.
pub fn tree_shape_violations(instance: &Instance, tree: &PolicyTree) -> usize {
    fn go(instance: &Instance, tree: &PolicyTree, state: &mut QueryState) -> usize {
        let stops = stop_for(instance.variant(), state, instance).is_some();
        match tree {
            PolicyTree::Stop(_) => usize::from(!stops),
            PolicyTree::Query { variable, children } => {
                let mut bad = usize::from(stops || children.len() != instance.variable(*variable).support.len());
                for b in children {
                    state.record(*variable, b.value);
                    bad += go(instance, &b.subtree, state);
                    state.forget(instance, *variable);
                }
                bad
            }
        }
    }
    go(instance, tree, &mut QueryState::new(instance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{adaptivity_gap, from_supports, smqi_bad};
    use crate::model::{StopRule, Variant};

    #[test]
    fn adaptivity_gap_value() {
        let inst = adaptivity_gap(1.0 / 3.0).unwrap();
        let opt = optimal_adaptive(&inst).unwrap();
        assert!((opt.expected_cost - 16.0 / 9.0).abs() < 1e-12);
        assert!((opt.root.expected_cost(&inst) - opt.expected_cost).abs() < 1e-12);
        match &opt.root {
            PolicyTree::Query { variable, children } => {
                assert_eq!(*variable, 0);
                assert!(matches!(children[0].subtree, PolicyTree::Stop(v) if v.value == Some(0.0)));
            }
            PolicyTree::Stop(_) => panic!("root must query"),
        }
        assert_eq!(tree_violations(&inst, &opt.root), 0);
        assert_eq!(tree_shape_violations(&inst, &opt.root), 0);
    }

    #[test]
    fn immediate_stop_costs_nothing() {
        let inst = from_supports(&[&[(0.0, 0.5), (1.0, 0.5)]], &[1.0], 1.0, Variant::Smq).unwrap();
        let opt = optimal_adaptive(&inst).unwrap();
        assert_eq!(opt.expected_cost, 0.0);
        assert_eq!(opt.root.node_count(), 1);
    }

    #[test]
    fn smqi_bad_queries_second_variable_only() {
        let inst = smqi_bad(5, 1.0).unwrap();
        let opt = optimal_adaptive(&inst).unwrap();
        assert!((opt.expected_cost - 1.0).abs() < 1e-12);
        let PolicyTree::Query { variable, children } = &opt.root else {
            panic!("root must query");
        };
        assert_eq!(*variable, 1);
        let rules: Vec<StopRule> = children
            .iter()
            .map(|b| match &b.subtree {
                PolicyTree::Stop(v) => v.rule,
                PolicyTree::Query { .. } => panic!("one query suffices"),
            })
            .collect();
        assert_eq!(rules, vec![StopRule::Old, StopRule::New]);
        assert_eq!(tree_violations(&inst, &opt.root), 0);
    }

    #[test]
    fn identification_never_costs_more() {
        let inst = adaptivity_gap(0.4).unwrap();
        let smq = optimal_adaptive(&inst).unwrap().expected_cost;
        let smqi = optimal_adaptive(&inst.with_variant(Variant::Smqi)).unwrap().expected_cost;
        assert!(smqi <= smq + 1e-12);
    }

    #[test]
    fn size_limit() {
        let pts: Vec<(f64, f64)> = (0..9).map(|k| (k as f64, 1.0 / 9.0)).collect();
        let supports: Vec<&[(f64, f64)]> = (0..8).map(|_| pts.as_slice()).collect();
        let inst = from_supports(&supports, &[1.0; 8], 0.1, Variant::Smq).unwrap();
        assert!(matches!(optimal_adaptive(&inst), Err(QueryError::SizeLimit { .. })));
    }

    #[test]
    fn tree_round_trips_through_json() {
        let inst = adaptivity_gap(1.0 / 3.0).unwrap();
        let opt = optimal_adaptive(&inst).unwrap();
        let text = serde_json::to_string(&opt).unwrap();
        let back: AdaptivePolicy = serde_json::from_str(&text).unwrap();
        assert_eq!(back, opt);
    }
}
