use super::distribution::DiscreteDistribution;
use super::instance::{Instance, QueryVariable};
use crate::error::{QueryError, Result};

/// Turns multiplicative precision `alpha` into additive precision.
///
/// Every support value `v` becomes `ln v` and `delta = ln alpha`. A value
/// `VAL` certified on the result maps back to `exp(VAL)`, which lies in
/// `[MIN, alpha * MIN]` on the original instance. Since `ln` is increasing,
/// canonical order and input positions carry over unchanged.
pub fn multiplicative_transform(instance: &Instance, alpha: f64) -> Result<Instance> {
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(QueryError::InvalidArgument(format!(
            "alpha must be a finite value >= 1, got {alpha}"
        )));
    }
    let mut variables = Vec::with_capacity(instance.len());
    for v in instance.variables() {
        if v.left() <= 0.0 {
            return Err(QueryError::DomainError(format!(
                "variable {:?} has nonpositive support value {}",
                v.label,
                v.left()
            )));
        }
        let support: DiscreteDistribution = v.support.map_values(f64::ln)?;
        variables.push(QueryVariable::new(v.label.clone(), v.cost, support));
    }
    let mut out = Instance::new(variables, alpha.ln(), instance.variant())?;
    debug_assert!(out
        .variables()
        .iter()
        .zip(instance.variables())
        .all(|(a, b)| a.label == b.label));
    out = out.with_positions(instance.input_positions().to_vec());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::from_supports;
    use crate::model::Variant;
    use std::f64::consts::E;

    #[test]
    fn log_of_e_powers() {
        let inst = from_supports(&[&[(1.0, 0.5), (E, 0.5)]], &[2.0], 0.0, Variant::Smq).unwrap();
        let t = multiplicative_transform(&inst, E).unwrap();
        assert_eq!(t.variable(0).support.values(), &[0.0, 1.0]);
        assert_eq!(t.delta(), 1.0);
        assert_eq!(t.cost(0), 2.0);
    }

    #[test]
    fn alpha_one_is_exact() {
        let inst = from_supports(&[&[(1.0, 0.5), (2.0, 0.5)]], &[1.0], 0.0, Variant::Smq).unwrap();
        assert_eq!(multiplicative_transform(&inst, 1.0).unwrap().delta(), 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let inst = from_supports(&[&[(0.0, 0.5), (2.0, 0.5)]], &[1.0], 0.0, Variant::Smq).unwrap();
        assert!(matches!(
            multiplicative_transform(&inst, 2.0),
            Err(QueryError::DomainError(_))
        ));
        let pos = from_supports(&[&[(1.0, 1.0)]], &[1.0], 0.0, Variant::Smq).unwrap();
        assert!(matches!(
            multiplicative_transform(&pos, 0.5),
            Err(QueryError::InvalidArgument(_))
        ));
    }
}
