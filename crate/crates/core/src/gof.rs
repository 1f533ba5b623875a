//! Kolmogorov-Smirnov goodness of fit for a fitted log-logistic model.

use serde::Serialize;

use crate::dist::{ll_cdf, LogLogisticParams};
use crate::error::{Error, Result};
use crate::estimation::{FitMethod, FitResult, Sample};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GofReport {
    pub statistic: f64,
    pub p_value: f64,
    pub fit_method: FitMethod,
    pub n: usize,
}

/// `D = sup |F_n(t) - F(t)|` over a complete sample.
pub fn ks_statistic(sample: &Sample, params: &LogLogisticParams) -> Result<f64> {
    if sample.is_censored() {
        return Err(Error::InvalidSample(
            "KS statistic is defined here for complete samples only".into(),
        ));
    }
    let mut t = sample.times().to_vec();
    t.sort_by(f64::total_cmp);
    let n = t.len() as f64;
    Ok(t.iter()
        .enumerate()
        .map(|(i, &ti)| {
            let f = ll_cdf(ti, params);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max))
}

/// Asymptotic Kolmogorov tail probability with the usual small-sample
/// correction, `Q((sqrt(n) + 0.12 + 0.11/sqrt(n)) d)` where
/// `Q(l) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 l^2)`.
///
/// For `l < 1.18` the alternating series converges slowly and cancels badly,
/// so the equivalent theta-function form
/// `1 - sqrt(2 pi)/l sum_{k>=1} exp(-(2k-1)^2 pi^2 / (8 l^2))` is used there.
/// Both series stop once terms drop below `1e-12`.
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    if d <= 0.0 {
        return 1.0;
    }
    let rn = (n as f64).sqrt();
    let lambda = (rn + 0.12 + 0.11 / rn) * d;
    let q = if lambda < 1.18 {
        let c = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut sum = 0.0;
        for k in 1..=100 {
            let odd = (2 * k - 1) as f64;
            let term = (c * odd * odd).exp();
            sum += term;
            if term < 1e-12 {
                break;
            }
        }
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * sum
    } else {
        let mut sum = 0.0;
        let mut sign = 1.0;
        for k in 1..=100 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * lambda * lambda).exp();
            sum += sign * term;
            if term < 1e-12 {
                break;
            }
            sign = -sign;
        }
        2.0 * sum
    };
    q.clamp(0.0, 1.0)
}

pub fn gof_test(sample: &Sample, fit: &FitResult) -> Result<GofReport> {
    let statistic = ks_statistic(sample, &fit.ll_params)?;
    Ok(GofReport {
        statistic,
        p_value: ks_pvalue(statistic, sample.len()),
        fit_method: fit.method,
        n: sample.len(),
    })
}
