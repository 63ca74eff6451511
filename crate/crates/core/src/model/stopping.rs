//! Stopping predicates.
//!
//! A state is the set of queried variables and their realizations. The
//! smallest right endpoint `R` acts as a free observation made before any
//! query, so `best_observed = min(R, observations)`.
//!
//! Old rule: `best_observed <= min_{j unqueried} left_j + delta`.
//! New rule (identification only): some `i` has its whole almost-prefix set
//! `P_i = { j != i : left_j < right_i - delta }` queried, and every value seen
//! there is `>= right_i - delta`. Then `i` itself is a valid answer, queried
//! or not.
//!
//! Both predicates are monotone along any query sequence: `best_observed`
//! only falls, the smallest unqueried left endpoint only rises, and the
//! containment `P_i ⊆ queried` is preserved.

use serde::{Deserialize, Serialize};

use super::instance::{Instance, Variant};
use crate::error::{QueryError, Result};

/// Which rule certified the answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StopRule {
    Old,
    New,
}

/// What a policy reports when it is allowed to stop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub rule: StopRule,
    /// Certified index; for the new rule it may be unqueried.
    pub minimizer: usize,
    /// Certified value; present only under the old rule.
    pub value: Option<f64>,
}

/// Observations gathered so far.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryState {
    observed: Vec<Option<f64>>,
    best_observed: f64,
    queried: usize,
}

impl QueryState {
    /// The empty state: nothing queried, only `R` known.
    pub fn new(instance: &Instance) -> Self {
        Self {
            observed: vec![None; instance.len()],
            best_observed: instance.virtual_value(),
            queried: 0,
        }
    }

    /// Records `X_i = value` after checking it is a support point.
    pub fn observe(&mut self, instance: &Instance, i: usize, value: f64) -> Result<()> {
        if i >= self.observed.len() {
            return Err(QueryError::InvalidArgument(format!("index {i} out of range")));
        }
        if self.observed[i].is_some() {
            return Err(QueryError::InvalidArgument(format!(
                "variable {i} queried twice"
            )));
        }
        if instance.variable(i).support.position(value).is_none() {
            return Err(QueryError::InvalidRealization { index: i, value });
        }
        self.record(i, value);
        Ok(())
    }

    /// Unchecked variant of [`Self::observe`] for hot loops over support points.
    pub(crate) fn record(&mut self, i: usize, value: f64) {
        debug_assert!(self.observed[i].is_none());
        self.observed[i] = Some(value);
        self.queried += 1;
        if value < self.best_observed {
            self.best_observed = value;
        }
    }

    /// Undoes the observation of `i`.
    pub(crate) fn forget(&mut self, instance: &Instance, i: usize) {
        debug_assert!(self.observed[i].is_some());
        self.observed[i] = None;
        self.queried -= 1;
        self.best_observed = self
            .observed
            .iter()
            .flatten()
            .fold(instance.virtual_value(), |a, &b| a.min(b));
    }

    pub fn observed(&self, i: usize) -> Option<f64> {
        self.observed[i]
    }

    pub fn is_queried(&self, i: usize) -> bool {
        self.observed[i].is_some()
    }

    pub fn queried_count(&self) -> usize {
        self.queried
    }

    /// Queried indices with their values, in index order.
    pub fn observations(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.observed
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i, v)))
    }

    /// `min(R, observations)`.
    pub fn best_observed(&self) -> f64 {
        self.best_observed
    }

    /// Smallest left endpoint among unqueried variables (`+inf` if none).
    pub fn min_unqueried_left(&self, instance: &Instance) -> f64 {
        // canonical order: the first unqueried index has the smallest left endpoint
        self.observed
            .iter()
            .position(Option::is_none)
            .map_or(f64::INFINITY, |i| instance.left(i))
    }
}

/// Old-rule test.
pub fn smq_stop(state: &QueryState, instance: &Instance) -> Option<Verdict> {
    let threshold = state.min_unqueried_left(instance) + instance.delta();
    if state.best_observed() > threshold {
        return None;
    }
    let mut best = (instance.virtual_value(), instance.virtual_index());
    for (i, x) in state.observations() {
        if x < best.0 || (x == best.0 && i < best.1) {
            best = (x, i);
        }
    }
    Some(Verdict {
        rule: StopRule::Old,
        minimizer: best.1,
        value: Some(best.0),
    })
}

/// New-rule test on its own: lowest `i` whose almost-prefix set certifies it.
pub fn new_rule_stop(state: &QueryState, instance: &Instance) -> Option<usize> {
    (0..instance.len()).find(|&i| {
        let cut = instance.right(i) - instance.delta();
        (0..instance.below_count(i))
            .filter(|&j| j != i)
            .all(|j| matches!(state.observed(j), Some(x) if x >= cut))
    })
}

/// Identification test: old rule first, then the new rule.
pub fn smqi_stop(state: &QueryState, instance: &Instance) -> Option<Verdict> {
    smq_stop(state, instance).or_else(|| {
        new_rule_stop(state, instance).map(|i| Verdict {
            rule: StopRule::New,
            minimizer: i,
            value: None,
        })
    })
}

/// Dispatches on the variant.
pub fn stop_for(variant: Variant, state: &QueryState, instance: &Instance) -> Option<Verdict> {
    match variant {
        Variant::Smq => smq_stop(state, instance),
        Variant::Smqi => smqi_stop(state, instance),
    }
}

/// `P_i = { j != i : left_j < right_i - delta }`, in index order.
pub fn almost_prefix(instance: &Instance, i: usize) -> Vec<usize> {
    (0..instance.below_count(i)).filter(|&j| j != i).collect()
}

/// Whether `verdict` is correct for the full realization `values`.
pub fn verdict_is_correct(instance: &Instance, verdict: &Verdict, values: &[f64]) -> bool {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let delta = instance.delta();
    let minimizer_ok = values[verdict.minimizer] <= min + delta;
    let value_ok = verdict
        .value
        .is_none_or(|v| min <= v && v <= min + delta);
    let value_required = instance.variant() == Variant::Smq;
    minimizer_ok && value_ok && (!value_required || verdict.value.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{adaptivity_gap, smqi_bad};

    #[test]
    fn gap_instance_stops_on_zero() {
        let inst = adaptivity_gap(1.0 / 3.0).unwrap();
        let mut s = QueryState::new(&inst);
        assert!(smq_stop(&s, &inst).is_none());
        s.observe(&inst, 0, 0.0).unwrap();
        let v = smq_stop(&s, &inst).unwrap();
        assert_eq!(v.value, Some(0.0));
        assert_eq!(v.minimizer, 0);
    }

    #[test]
    fn gap_instance_continues_on_three() {
        let inst = adaptivity_gap(1.0 / 3.0).unwrap();
        let mut s = QueryState::new(&inst);
        s.observe(&inst, 0, 3.0).unwrap();
        assert!(smq_stop(&s, &inst).is_none());
        assert!(smqi_stop(&s, &inst).is_none());
    }

    #[test]
    fn zero_query_stop_reports_virtual_index() {
        let inst = crate::instances::from_supports(
            &[&[(0.0, 0.5), (3.0, 0.5)], &[(1.0, 0.5), (2.0, 0.5)]],
            &[1.0, 1.0],
            1.0,
            Variant::Smq,
        )
        .unwrap();
        // R = 2 <= 0 + 1? no. With delta 2 it stops at once.
        assert!(smq_stop(&QueryState::new(&inst), &inst).is_none());
        let wide = crate::instances::from_supports(
            &[&[(0.0, 0.5), (3.0, 0.5)], &[(1.0, 0.5), (2.0, 0.5)]],
            &[1.0, 1.0],
            2.0,
            Variant::Smq,
        )
        .unwrap();
        let v = smq_stop(&QueryState::new(&wide), &wide).unwrap();
        assert_eq!(v.value, Some(2.0));
        assert_eq!(v.minimizer, 1);
    }

    #[test]
    fn almost_prefix_examples() {
        let single = crate::instances::from_supports(
            &[&[(0.0, 0.5), (5.0, 0.5)]],
            &[1.0],
            1.0,
            Variant::Smqi,
        )
        .unwrap();
        assert!(almost_prefix(&single, 0).is_empty());

        let bad = smqi_bad(4, 1.0).unwrap();
        // P_1 = {2}: left_2 = 0.3 < 0.5, left_3 = left_4 = 0.7 are not.
        assert_eq!(almost_prefix(&bad, 0), vec![1]);

        let tight = crate::instances::from_supports(
            &[&[(0.0, 0.5), (1.0, 0.5)], &[(0.5, 0.5), (1.0, 0.5)]],
            &[1.0, 1.0],
            1.0,
            Variant::Smqi,
        )
        .unwrap();
        for i in 0..tight.len() {
            assert!(almost_prefix(&tight, i).is_empty());
        }
    }

    #[test]
    fn smqi_bad_example_rules() {
        let inst = smqi_bad(4, 1.0).unwrap();
        let mut s = QueryState::new(&inst);
        assert!(smqi_stop(&s, &inst).is_none());
        s.observe(&inst, 1, 2.0).unwrap();
        let v = smqi_stop(&s, &inst).unwrap();
        assert_eq!(v.rule, StopRule::New);
        assert_eq!(v.minimizer, 0);
        assert_eq!(v.value, None);

        let mut s = QueryState::new(&inst);
        s.observe(&inst, 1, 0.3).unwrap();
        let v = smqi_stop(&s, &inst).unwrap();
        assert_eq!(v.rule, StopRule::Old);
        assert_eq!(v.minimizer, 1);
    }

    #[test]
    fn empty_prefix_fires_without_queries() {
        // right_0 - delta = 0.5 <= every other left endpoint
        let inst = crate::instances::from_supports(
            &[&[(0.0, 0.5), (1.5, 0.5)], &[(0.5, 0.5), (9.0, 0.5)]],
            &[1.0, 1.0],
            1.0,
            Variant::Smqi,
        )
        .unwrap();
        let s = QueryState::new(&inst);
        assert!(smq_stop(&s, &inst).is_none());
        let v = smqi_stop(&s, &inst).unwrap();
        assert_eq!(v.rule, StopRule::New);
        assert_eq!(v.minimizer, 0);
    }

    #[test]
    fn observe_rejects_off_support() {
        let inst = adaptivity_gap(0.5).unwrap();
        let mut s = QueryState::new(&inst);
        assert!(matches!(
            s.observe(&inst, 0, 1.0),
            Err(QueryError::InvalidRealization { index: 0, .. })
        ));
    }
}
