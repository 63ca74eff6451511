//! Query policies for finding (or identifying) an approximate minimum of
//! independent discrete random variables that must be paid for to observe.
//!
//! An [`Instance`] holds the variables, their query costs and the precision
//! `delta`. Policies in [`policies`] build fixed query orders; [`eval`]
//! prices them exactly or by sampling; [`oracle`] computes the optimal
//! adaptive and non-adaptive policies on small instances for comparison.

pub mod error;
pub mod eval;
pub mod instances;
pub mod knapsack;
pub mod model;
pub mod oracle;
pub mod policies;
pub mod reproduce;

pub use error::{QueryError, Result};
pub use model::{DiscreteDistribution, Instance, QueryState, QueryVariable, Variant};
pub use policies::{QueryPlan, Selection};
