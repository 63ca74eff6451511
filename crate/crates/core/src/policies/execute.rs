use serde::{Deserialize, Serialize};

use super::plan::QueryPlan;
use crate::error::{QueryError, Result};
use crate::model::{stop_for, Instance, QueryState, StopRule, Verdict};

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceStop {
    Old,
    New,
    /// The plan ran out before any rule fired; only possible for plans that
    /// do not cover every variable.
    Exhausted,
}

impl From<StopRule> for TraceStop {
    fn from(r: StopRule) -> Self {
        match r {
            StopRule::Old => TraceStop::Old,
            StopRule::New => TraceStop::New,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceQuery {
    pub index: usize,
    pub value: f64,
    pub cumulative_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub queries: Vec<TraceQuery>,
    pub stop_rule: TraceStop,
    pub returned_value: Option<f64>,
    pub returned_minimizer: Option<usize>,
    pub total_cost: f64,
}

impl ExecutionTrace {
    pub fn verdict(&self) -> Option<Verdict> {
        let rule = match self.stop_rule {
            TraceStop::Old => StopRule::Old,
            TraceStop::New => StopRule::New,
            TraceStop::Exhausted => return None,
        };
        Some(Verdict {
            rule,
            minimizer: self.returned_minimizer?,
            value: self.returned_value,
        })
    }
}

/// Runs `plan` against a full realization (`realization[i]` is `X_i`),
/// testing the variant's stop rule before the first query and after each one.
pub fn run_plan(instance: &Instance, plan: &QueryPlan, realization: &[f64]) -> Result<ExecutionTrace> {
    plan.validate(instance)?;
    if realization.len() != instance.len() {
        return Err(QueryError::InvalidArgument(format!(
            "realization has {} values for {} variables",
            realization.len(),
            instance.len()
        )));
    }
    for (i, &x) in realization.iter().enumerate() {
        if instance.variable(i).support.position(x).is_none() {
            return Err(QueryError::InvalidRealization { index: i, value: x });
        }
    }

    let mut state = QueryState::new(instance);
    let mut queries = Vec::new();
    let mut total = 0.0;
    let mut verdict = stop_for(instance.variant(), &state, instance);
    for &i in &plan.order {
        if verdict.is_some() {
            break;
        }
        state.record(i, realization[i]);
        total += instance.cost(i);
        queries.push(TraceQuery {
            index: i,
            value: realization[i],
            cumulative_cost: total,
        });
        verdict = stop_for(instance.variant(), &state, instance);
    }
    Ok(match verdict {
        Some(v) => ExecutionTrace {
            queries,
            stop_rule: v.rule.into(),
            returned_value: v.value,
            returned_minimizer: Some(v.minimizer),
            total_cost: total,
        },
        None => ExecutionTrace {
            queries,
            stop_rule: TraceStop::Exhausted,
            returned_value: None,
            returned_minimizer: None,
            total_cost: total,
        },
    })
}
