//! Non-adaptive query plans and their execution.

mod execute;
mod general;
mod greedy;
mod plan;

pub use execute::{run_plan, ExecutionTrace, TraceQuery, TraceStop};
pub use general::{
    almost_prefix_s, double_greedy_general, double_greedy_smqi_general, iteration_cost_bound,
    prefix_t, DEFAULT_Y_SMQ, DEFAULT_Y_SMQI,
};
pub use greedy::{baseline_left_endpoint, baseline_stop_prob, double_greedy_unit};
pub use plan::{QueryPlan, Selection};
