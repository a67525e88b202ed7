use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::design::{ModelSet, Parametrization};

/// `f = (‖X̃β̂ − μ‖²/d) / (‖y − X̃β̂‖²/(n−d))` for the least-squares fit on
/// `model`, with an intercept column in practical mode. `None` when the
/// model is empty or the statistic is undefined.
pub fn f_statistic(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    mu: &DVector<f64>,
    model: &ModelSet,
    mode: Parametrization,
) -> Option<f64> {
    if model.is_empty() {
        return None;
    }
    let n = x.nrows();
    let off = mode.offset();
    let d = model.len() + off;
    if d >= n {
        return None;
    }
    let mut m = DMatrix::from_element(n, d, 1.0);
    for (k, j) in model.iter().enumerate() {
        m.set_column(k + off, &x.column(j));
    }
    let coef = m.clone().svd(true, true).solve(y, 1e-12).ok()?;
    let fitted = m * coef;
    let num = (&fitted - mu).norm_squared() / d as f64;
    let rss = (y - &fitted).norm_squared();
    if rss <= 1e-20 * y.norm_squared().max(1.0) {
        return None;
    }
    Some(num / (rss / (n - d) as f64))
}

/// Numerator degrees of freedom for a true support of size `t`.
pub fn pivot_df(t: usize, mode: Parametrization) -> usize {
    t + mode.offset()
}

/// `sup_u |F̂(u) − F_{d1,d2}(u)|` for the empirical law of `samples`.
pub fn ks_distance_f(samples: &[f64], d1: usize, d2: usize) -> Option<f64> {
    if samples.is_empty() || d1 == 0 || d2 == 0 {
        return None;
    }
    let dist = FisherSnedecor::new(d1 as f64, d2 as f64).ok()?;
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() as f64;
    let mut d = 0.0f64;
    for (i, v) in s.iter().enumerate() {
        let f = dist.cdf(*v);
        d = d.max((i + 1) as f64 / m - f).max(f - i as f64 / m);
    }
    Some(d)
}

/// Dvoretzky–Kiefer–Wolfowitz band half-width `√(ln(2/α)/(2n))`.
pub fn dkw_epsilon(n: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PivotSummary {
    pub d1: usize,
    pub d2: usize,
    /// Replicates contributing `f̂`.
    pub used: usize,
    /// Replicates with `T̂ = ∅`, excluded.
    pub degenerate: usize,
    /// KS distance of `f̂` computed on `T̂`.
    pub ks_distance: Option<f64>,
    /// KS distance of `f` computed on the true support.
    pub ks_distance_oracle: Option<f64>,
    pub dkw_95: f64,
}
