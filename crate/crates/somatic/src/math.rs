//! Small numeric helpers shared by the inference modules.

pub(crate) const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Log-density of a normal distribution with the given mean and *variance*.
pub(crate) fn normal_ln_pdf(x: f64, mean: f64, variance: f64) -> f64 {
    let d = x - mean;
    -0.5 * (LN_2PI + variance.ln()) - d * d / (2.0 * variance)
}

/// log(sum(exp(x))) with max-subtraction so small terms do not underflow.
pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
}

/// Turns log-weights into normalized probabilities. Returns `None` when the
/// total mass is zero (all inputs -inf).
pub(crate) fn normalize_log_weights(ln_w: &[f64]) -> Option<Vec<f64>> {
    let total = log_sum_exp(ln_w);
    if !total.is_finite() {
        return None;
    }
    Some(ln_w.iter().map(|&l| (l - total).exp()).collect())
}
