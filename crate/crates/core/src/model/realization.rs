use super::instance::Instance;

/// Calls `f(values, probability)` for every joint realization that agrees
/// with `fixed` on its `Some` entries; free variables range over their
/// supports and contribute their probabilities.
pub fn for_each_completion(instance: &Instance, fixed: &[Option<f64>], mut f: impl FnMut(&[f64], f64)) {
    debug_assert_eq!(fixed.len(), instance.len());
    let mut values = vec![0.0; instance.len()];
    walk(instance, fixed, 0, 1.0, &mut values, &mut f);
}

/// Every joint realization with its probability.
pub fn for_each_realization(instance: &Instance, f: impl FnMut(&[f64], f64)) {
    for_each_completion(instance, &vec![None; instance.len()], f);
}

fn walk(
    instance: &Instance,
    fixed: &[Option<f64>],
    i: usize,
    prob: f64,
    values: &mut [f64],
    f: &mut impl FnMut(&[f64], f64),
) {
    if i == values.len() {
        f(values, prob);
        return;
    }
    if let Some(v) = fixed[i] {
        values[i] = v;
        walk(instance, fixed, i + 1, prob, values, f);
        return;
    }
    for (w, p) in instance.variable(i).support.points() {
        values[i] = w;
        walk(instance, fixed, i + 1, prob * p, values, f);
    }
}
