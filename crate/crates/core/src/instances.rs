//! Instance families: the worked examples with known costs, and seeded
//! random instances for property checks.

use rand::distributions::Uniform;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QueryError, Result};
use crate::model::{
    smq_stop, stop_for, DiscreteDistribution, Instance, QueryState, QueryVariable, Variant,
    INFINITY_SENTINEL,
};
use crate::oracle;

/// Builds an instance from raw `(value, probability)` lists, labelling the
/// variables `X1, X2, ...` in input order.
pub fn from_supports(
    supports: &[&[(f64, f64)]],
    costs: &[f64],
    delta: f64,
    variant: Variant,
) -> Result<Instance> {
    if supports.len() != costs.len() {
        return Err(QueryError::InvalidArgument(
            "supports and costs differ in length".into(),
        ));
    }
    let variables = supports
        .iter()
        .zip(costs)
        .enumerate()
        .map(|(k, (pts, &c))| {
            Ok(QueryVariable::new(
                format!("X{}", k + 1),
                c,
                DiscreteDistribution::new(pts.to_vec())?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::new(variables, delta, variant)
}

fn labelled(k: usize, cost: f64, d: DiscreteDistribution) -> QueryVariable {
    QueryVariable::new(format!("X{k}"), cost, d)
}

/// Three-variable instance separating adaptive from non-adaptive policies:
/// `X1 ∈ {0, 3, ∞}` uniformly, `X2 = 1` w.p. `epsilon`, `X3 = 2` w.p.
/// `1 - epsilon`, otherwise `∞`; `delta = 1`, unit costs.
pub fn adaptivity_gap(epsilon: f64) -> Result<Instance> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(QueryError::InvalidArgument(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let third = 1.0 / 3.0;
    let vars = vec![
        labelled(
            1,
            1.0,
            DiscreteDistribution::new(vec![(0.0, third), (3.0, third), (INFINITY_SENTINEL, third)])?,
        ),
        labelled(2, 1.0, DiscreteDistribution::two_point(1.0, epsilon, INFINITY_SENTINEL)?),
        labelled(3, 1.0, DiscreteDistribution::two_point(2.0, 1.0 - epsilon, INFINITY_SENTINEL)?),
    ];
    Instance::new(vars, 1.0, Variant::Smq)
}

/// Bad case for ordering by left endpoint. The first `n/2` variables are
/// `0` w.p. `1/n` else `n`; the rest are `delta/2` w.p. `1/2` else `n`.
pub fn fig3(n: usize, delta: f64) -> Result<Instance> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(QueryError::InvalidArgument(format!(
            "n must be even and at least 4, got {n}"
        )));
    }
    if delta.is_nan() || delta <= 0.0 {
        return Err(QueryError::InvalidArgument("delta must be positive".into()));
    }
    let high = n as f64;
    let vars = (1..=n)
        .map(|k| {
            let d = if k <= n / 2 {
                DiscreteDistribution::two_point(0.0, 1.0 / high, high)
            } else {
                DiscreteDistribution::two_point(delta / 2.0, 0.5, high)
            }?;
            Ok(labelled(k, 1.0, d))
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::new(vars, delta, Variant::Smq)
}

/// Bad case for ordering by one-step stopping probability. `X1` is `0`
/// w.p. `1/(2n)` else `n`; `X2..X(n-1)` are `delta/2` w.p. `1/n` else `n`;
/// `Xn = 1.4 delta` surely.
pub fn fig4(n: usize, delta: f64) -> Result<Instance> {
    if n < 4 {
        return Err(QueryError::InvalidArgument(format!("n must be at least 4, got {n}")));
    }
    if delta.is_nan() || delta <= 0.0 {
        return Err(QueryError::InvalidArgument("delta must be positive".into()));
    }
    let high = n as f64;
    let mut vars = vec![labelled(
        1,
        1.0,
        DiscreteDistribution::two_point(0.0, 1.0 / (2.0 * high), high)?,
    )];
    for k in 2..n {
        vars.push(labelled(
            k,
            1.0,
            DiscreteDistribution::two_point(delta / 2.0, 1.0 / high, high)?,
        ));
    }
    vars.push(labelled(n, 1.0, DiscreteDistribution::deterministic(1.4 * delta)?));
    Instance::new(vars, delta, Variant::Smq)
}

/// Identification instance where the value-finding planner stalls.
/// `X1 ∈ {0, 1.5 delta}` evenly with cost `n`; `X2` is `0.3 delta` w.p.
/// `1/n²` else `2 delta`; `X3..Xn` are `0.7 delta` w.p. `1/n` else
/// `1.5 delta`; all other costs are one.
pub fn smqi_bad(n: usize, delta: f64) -> Result<Instance> {
    if n < 4 {
        return Err(QueryError::InvalidArgument(format!("n must be at least 4, got {n}")));
    }
    if delta.is_nan() || delta <= 0.0 {
        return Err(QueryError::InvalidArgument("delta must be positive".into()));
    }
    let nf = n as f64;
    let mut vars = vec![
        labelled(1, nf, DiscreteDistribution::two_point(0.0, 0.5, 1.5 * delta)?),
        labelled(
            2,
            1.0,
            DiscreteDistribution::two_point(0.3 * delta, 1.0 / (nf * nf), 2.0 * delta)?,
        ),
    ];
    for k in 3..=n {
        vars.push(labelled(
            k,
            1.0,
            DiscreteDistribution::two_point(0.7 * delta, 1.0 / nf, 1.5 * delta)?,
        ));
    }
    Instance::new(vars, delta, Variant::Smqi)
}

/// Instance defeating any competitive ratio: `X_i = i` w.p. `ln n / n`,
/// else `n²`; unit costs; `delta = n`.
pub fn competitive_ratio(n: usize) -> Result<Instance> {
    if n < 4 {
        return Err(QueryError::InvalidArgument(format!("n must be at least 4, got {n}")));
    }
    let nf = n as f64;
    let p = competitive_ratio_low_prob(n);
    let vars = (1..=n)
        .map(|k| {
            Ok(labelled(
                k,
                1.0,
                DiscreteDistribution::two_point(k as f64, p, nf * nf)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::new(vars, nf, Variant::Smq)
}

/// `ln n / n`, the low-value probability of [`competitive_ratio`].
pub fn competitive_ratio_low_prob(n: usize) -> f64 {
    let nf = n as f64;
    nf.ln() / nf
}

/// How random costs are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CostModel {
    Unit,
    UniformRange { low: f64, high: f64 },
    /// Pareto with the given shape, scale one, capped at `cap`.
    HeavyTailed { shape: f64, cap: f64 },
}

/// How the precision of a random instance is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DeltaMode {
    Fixed { delta: f64 },
    /// The given quantile of the per-variable spreads `right - left`.
    SpreadQuantile { quantile: f64 },
}

/// Parameters for [`random`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomConfig {
    pub n: usize,
    /// Maximum support size; each variable draws its size from `1..=support_size`.
    pub support_size: usize,
    pub cost_model: CostModel,
    pub delta_mode: DeltaMode,
    pub variant: Variant,
}

impl RandomConfig {
    pub fn unit(n: usize, support_size: usize, variant: Variant) -> Self {
        Self {
            n,
            support_size,
            cost_model: CostModel::Unit,
            delta_mode: DeltaMode::SpreadQuantile { quantile: 0.5 },
            variant,
        }
    }
}

const RANDOM_ATTEMPTS: usize = 1000;
const ORACLE_CHECK_STATES: f64 = 1e5;

/// Seeded random instance on a half-integer grid in `[0, 20]`.
///
/// Draws are rejected until the instance cannot stop before any query and,
/// when the state space is small enough to solve, until the optimal policy
/// does not always query everything.
pub fn random(seed: u64, config: &RandomConfig) -> Result<Instance> {
    if config.n == 0 || config.support_size == 0 {
        return Err(QueryError::InvalidArgument(
            "n and support_size must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_ATTEMPTS {
        let inst = draw(&mut rng, config)?;
        if stop_for(config.variant, &QueryState::new(&inst), &inst).is_some() {
            continue;
        }
        let states: f64 = inst
            .variables()
            .iter()
            .map(|v| v.support.len() as f64 + 1.0)
            .product();
        if states <= ORACLE_CHECK_STATES {
            let opt = oracle::optimal_adaptive(&inst)?;
            if opt.expected_cost >= inst.total_cost() - 1e-12 {
                continue;
            }
        }
        return Ok(inst);
    }
    Err(QueryError::InvalidArgument(format!(
        "no nontrivial instance found in {RANDOM_ATTEMPTS} draws for {config:?}"
    )))
}

fn draw(rng: &mut ChaCha8Rng, config: &RandomConfig) -> Result<Instance> {
    let grid = Uniform::new_inclusive(0u32, 40);
    let mut vars = Vec::with_capacity(config.n);
    for k in 1..=config.n {
        let size = rng.gen_range(1..=config.support_size);
        let mut values: Vec<u32> = Vec::with_capacity(size);
        while values.len() < size {
            let v = rng.sample(grid);
            if !values.contains(&v) {
                values.push(v);
            }
        }
        let weights: Vec<f64> = (0..size).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let pts = values
            .iter()
            .zip(&weights)
            .map(|(&v, &w)| (v as f64 / 2.0, w / total))
            .collect();
        let cost = match config.cost_model {
            CostModel::Unit => 1.0,
            CostModel::UniformRange { low, high } => rng.gen_range(low..=high),
            CostModel::HeavyTailed { shape, cap } => {
                let u: f64 = rng.gen_range(f64::EPSILON..1.0);
                u.powf(-1.0 / shape).min(cap)
            }
        };
        vars.push(labelled(k, cost, DiscreteDistribution::new(pts)?));
    }
    let delta = match config.delta_mode {
        DeltaMode::Fixed { delta } => delta,
        DeltaMode::SpreadQuantile { quantile } => {
            let mut spreads: Vec<f64> = vars.iter().map(|v| v.right() - v.left()).collect();
            spreads.sort_by(f64::total_cmp);
            let pos = (quantile.clamp(0.0, 1.0) * (spreads.len() - 1) as f64).floor() as usize;
            spreads[pos]
        }
    };
    Instance::new(vars, delta, config.variant)
}

/// Whether the instance stops before any query under the value rule.
pub fn stops_immediately(instance: &Instance) -> bool {
    smq_stop(&QueryState::new(instance), instance).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_supports() {
        let inst = adaptivity_gap(0.25).unwrap();
        assert_eq!(inst.len(), 3);
        assert_eq!(inst.variable(0).support.values(), &[0.0, 3.0, 1e9]);
        assert_eq!(inst.variable(1).support.probs(), &[0.25, 0.75]);
        assert_eq!(inst.variable(2).support.probs(), &[0.75, 0.25]);
        assert_eq!(inst.delta(), 1.0);
        assert!(adaptivity_gap(0.0).is_err());
    }

    #[test]
    fn fig3_echo() {
        let inst = fig3(4, 1.0).unwrap();
        for i in 0..2 {
            assert_eq!(inst.variable(i).support.values(), &[0.0, 4.0]);
            assert_eq!(inst.variable(i).support.probs(), &[0.25, 0.75]);
        }
        for i in 2..4 {
            assert_eq!(inst.variable(i).support.values(), &[0.5, 4.0]);
            assert_eq!(inst.variable(i).support.probs(), &[0.5, 0.5]);
        }
        assert!(fig3(5, 1.0).is_err());
    }

    #[test]
    fn fig4_echo() {
        let inst = fig4(5, 1.0).unwrap();
        assert_eq!(inst.variable(0).support.probs()[0], 0.1);
        assert_eq!(inst.variable(1).support.values(), &[0.5, 5.0]);
        assert_eq!(inst.variable(4).support.values(), &[1.4]);
        assert_eq!(inst.virtual_value(), 1.4);
    }

    #[test]
    fn smqi_bad_echo() {
        let inst = smqi_bad(5, 2.0).unwrap();
        assert_eq!(inst.variant(), Variant::Smqi);
        assert_eq!(inst.cost(0), 5.0);
        assert_eq!(inst.variable(0).support.values(), &[0.0, 3.0]);
        assert_eq!(inst.variable(1).support.values(), &[0.6, 4.0]);
        assert_eq!(inst.variable(1).support.probs()[0], 1.0 / 25.0);
        assert_eq!(inst.variable(2).support.values(), &[1.4, 3.0]);
        assert!((1..5).all(|i| inst.cost(i) == 1.0));
    }

    #[test]
    fn competitive_ratio_echo() {
        let inst = competitive_ratio(10).unwrap();
        assert_eq!(inst.delta(), 10.0);
        assert_eq!(inst.variable(6).support.values(), &[7.0, 100.0]);
        let p = 10f64.ln() / 10.0;
        assert_eq!(inst.variable(0).support.probs()[0], p);
    }

    #[test]
    fn random_is_reproducible_and_nontrivial() {
        let cfg = RandomConfig::unit(5, 3, Variant::Smq);
        let a = random(7, &cfg).unwrap();
        let b = random(7, &cfg).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random(8, &cfg).unwrap());
        for seed in 0..30 {
            let inst = random(seed, &cfg).unwrap();
            assert!(!stops_immediately(&inst));
            let opt = oracle::optimal_adaptive(&inst).unwrap();
            assert!(opt.expected_cost > 0.0 && opt.expected_cost < inst.total_cost());
        }
    }

    #[test]
    fn random_cost_models() {
        let mut cfg = RandomConfig::unit(4, 2, Variant::Smqi);
        cfg.cost_model = CostModel::UniformRange { low: 1.0, high: 8.0 };
        let inst = random(3, &cfg).unwrap();
        assert!(inst.costs().iter().all(|&c| (1.0..=8.0).contains(&c)));
        cfg.cost_model = CostModel::HeavyTailed { shape: 1.5, cap: 50.0 };
        let inst = random(3, &cfg).unwrap();
        assert!(inst.costs().iter().all(|&c| (1.0..=50.0).contains(&c)));
    }
}
