//! Domain types: distributions, variables, instances, query states and the
//! stopping rules that decide when a policy may answer.

mod distribution;
mod instance;
mod realization;
mod stopping;
mod transform;

pub use distribution::{DiscreteDistribution, PROBABILITY_SUM_TOLERANCE};
pub use instance::{canonical_order, Instance, InstanceFile, QueryVariable, Variant, INFINITY_SENTINEL};
pub use realization::{for_each_completion, for_each_realization};
pub use stopping::{
    almost_prefix, new_rule_stop, smq_stop, smqi_stop, stop_for, verdict_is_correct, QueryState,
    StopRule, Verdict,
};
pub use transform::multiplicative_transform;
