//! Leave-one-out products in linear time, division-free.

/// `out[i] = prod_{j != i} values[j]` via prefix/suffix products.
pub fn leave_one_out_products(values: &[f64]) -> Vec<f64> {
    let mut out = vec![1.0; values.len()];
    leave_one_out_into(values, &mut out);
    out
}

/// In-place variant for hot loops; `out.len()` must equal `values.len()`.
pub fn leave_one_out_into(values: &[f64], out: &mut [f64]) {
    debug_assert_eq!(values.len(), out.len());
    let mut prefix = 1.0;
    for (o, &v) in out.iter_mut().zip(values) {
        *o = prefix;
        prefix *= v;
    }
    let mut suffix = 1.0;
    for (o, &v) in out.iter_mut().zip(values).rev() {
        *o *= suffix;
        suffix *= v;
    }
}
