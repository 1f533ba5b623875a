//! Point estimation for the log-logistic model.
//!
//! Two estimators are provided:
//!
//! * probability-plot least squares, regressing ordered log failure times on
//!   logit plotting positions (Benard positions for complete data, Kaplan-Meier
//!   midpoints under right censoring);
//! * maximum likelihood, with censored observations contributing `log R(t)`.
//!
//! The observed information (negative Hessian of the log-likelihood) backs
//! the Wald intervals in [`crate::classical`].

use serde::{Deserialize, Serialize};

use crate::dist::{
    ll_log_pdf, ll_log_reliability, logistic_cdf, logit, softplus, LocScaleParams,
    LogLogisticParams,
};
use crate::error::{Error, Result};

pub const MIN_LSE_FAILURES: usize = 3;
pub const MIN_MLE_FAILURES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Failure,
    Censored,
}

impl Status {
    pub fn is_failure(self) -> bool {
        self == Status::Failure
    }
}

/// Right-censored lifetime data.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    times: Vec<f64>,
    status: Vec<Status>,
    censor_time: Option<f64>,
}

impl Sample {
    pub fn new(times: Vec<f64>, status: Vec<Status>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidSample("sample is empty".into()));
        }
        if times.len() != status.len() {
            return Err(Error::InvalidSample(format!(
                "{} times but {} status indicators",
                times.len(),
                status.len()
            )));
        }
        if let Some((i, t)) = times
            .iter()
            .enumerate()
            .find(|(_, t)| !(t.is_finite() && **t > 0.0))
        {
            return Err(Error::InvalidSample(format!(
                "observation {} has non-positive time {t}",
                i + 1
            )));
        }
        Ok(Self {
            times,
            status,
            censor_time: None,
        })
    }

    pub fn complete(times: Vec<f64>) -> Result<Self> {
        let n = times.len();
        Self::new(times, vec![Status::Failure; n])
    }

    /// Type-I censoring of lifetimes at `threshold`: values above it are
    /// recorded as censored at the threshold.
    pub fn type1_censored(lifetimes: &[f64], threshold: f64) -> Result<Self> {
        if !(threshold.is_finite() && threshold > 0.0) {
            return Err(Error::InvalidSample(format!(
                "censoring threshold must be positive, got {threshold}"
            )));
        }
        let (times, status) = lifetimes
            .iter()
            .map(|&t| {
                if t > threshold {
                    (threshold, Status::Censored)
                } else {
                    (t, Status::Failure)
                }
            })
            .unzip();
        let mut s = Self::new(times, status)?;
        s.censor_time = Some(threshold);
        Ok(s)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn status(&self) -> &[Status] {
        &self.status
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn failures(&self) -> usize {
        self.status.iter().filter(|s| s.is_failure()).count()
    }

    pub fn is_censored(&self) -> bool {
        self.status.iter().any(|s| !s.is_failure())
    }

    /// The type-I censoring threshold: the recorded one if the sample was
    /// built by [`Sample::type1_censored`], otherwise inferred when every
    /// censored time sits at or above every failure time.
    pub fn censoring_threshold(&self) -> Option<f64> {
        if self.censor_time.is_some() {
            return self.censor_time;
        }
        let max_fail = self
            .iter()
            .filter(|(_, s)| s.is_failure())
            .map(|(t, _)| t)
            .fold(0.0, f64::max);
        let censored: Vec<f64> = self
            .iter()
            .filter(|(_, s)| !s.is_failure())
            .map(|(t, _)| t)
            .collect();
        let min_c = censored.iter().copied().fold(f64::INFINITY, f64::min);
        (!censored.is_empty() && min_c >= max_fail).then_some(min_c)
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Status)> + '_ {
        self.times.iter().copied().zip(self.status.iter().copied())
    }

    /// Copy with every time multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        let mut s = Self::new(self.times.iter().map(|t| t * k).collect(), self.status.clone())?;
        s.censor_time = self.censor_time.map(|c| c * k);
        Ok(s)
    }

    /// Indices sorted by time, failures ahead of censored observations at ties.
    fn order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| {
            self.times[a]
                .total_cmp(&self.times[b])
                .then_with(|| self.status[b].is_failure().cmp(&self.status[a].is_failure()))
        });
        idx
    }
}

/// One Kaplan-Meier step at a distinct failure time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmStep {
    pub time: f64,
    pub at_risk: usize,
    pub failures: usize,
    /// F-hat just before the step.
    pub cdf_before: f64,
    /// F-hat at the step.
    pub cdf: f64,
}

/// Kaplan-Meier CDF estimate evaluated at every distinct failure time.
///
/// Tied failures form one step with `d > 1`; censored observations tied with
/// a failure remain in that failure's risk set.
pub fn km_cdf_estimate(sample: &Sample) -> Result<Vec<KmStep>> {
    if sample.failures() == 0 {
        return Err(Error::InvalidSample(
            "Kaplan-Meier estimate needs at least one failure".into(),
        ));
    }
    let order = sample.order();
    let n = order.len();
    let mut steps = Vec::new();
    let mut surv = 1.0;
    let mut censored_seen = false;
    let mut i = 0;
    while i < n {
        let t = sample.times[order[i]];
        let at_risk = n - i;
        let mut j = i;
        let mut d = 0;
        while j < n && sample.times[order[j]] == t {
            if sample.status[order[j]].is_failure() {
                d += 1;
            }
            j += 1;
        }
        if d > 0 {
            let before = steps.last().map_or(0.0, |s: &KmStep| s.cdf);
            // before any censoring the product telescopes to the ECDF (i + d) / n
            let cdf = if censored_seen {
                surv *= 1.0 - d as f64 / at_risk as f64;
                1.0 - surv
            } else {
                surv = (at_risk - d) as f64 / n as f64;
                (i + d) as f64 / n as f64
            };
            steps.push(KmStep {
                time: t,
                at_risk,
                failures: d,
                cdf_before: before,
                cdf,
            });
        }
        censored_seen |= j - i > d;
        i = j;
    }
    Ok(steps)
}

/// Ordered failure log-times paired with fixed logit regressors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlottingDesign {
    y: Vec<f64>,
    x: Vec<f64>,
    positions: Vec<f64>,
    /// 0-based rank of each retained point among all `n_total` ordered observations.
    ranks: Vec<usize>,
    n_total: usize,
}

impl PlottingDesign {
    fn new(y: Vec<f64>, positions: Vec<f64>, ranks: Vec<usize>, n_total: usize) -> Result<Self> {
        if y.len() < MIN_LSE_FAILURES {
            return Err(Error::InvalidSample(format!(
                "least squares needs at least {MIN_LSE_FAILURES} failures, got {}",
                y.len()
            )));
        }
        let x = positions.iter().map(|&p| logit(p)).collect::<Result<Vec<_>>>()?;
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::DegenerateDesign);
        }
        Ok(Self {
            y,
            x,
            positions,
            ranks,
            n_total,
        })
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.y.len() == self.n_total
    }

    /// Same regressors, new responses. Used to evaluate the pivotal
    /// identities on simulated data.
    pub fn with_responses(&self, y: Vec<f64>) -> Result<Self> {
        if y.len() != self.x.len() {
            return Err(Error::InvalidSample("response length does not match design".into()));
        }
        Ok(Self { y, ..self.clone() })
    }
}

pub fn benard_positions(n: usize) -> Vec<f64> {
    let denom = n as f64 + 0.4;
    (1..=n).map(|i| (i as f64 - 0.3) / denom).collect()
}

pub fn plotting_design_complete(sample: &Sample) -> Result<PlottingDesign> {
    if sample.is_censored() {
        return Err(Error::InvalidSample(
            "complete-data design requires an uncensored sample".into(),
        ));
    }
    let n = sample.len();
    let mut y: Vec<f64> = sample.times.iter().map(|t| t.ln()).collect();
    y.sort_by(f64::total_cmp);
    PlottingDesign::new(y, benard_positions(n), (0..n).collect(), n)
}

/// Censored-data design from Kaplan-Meier midpoint positions. The `d` tied
/// failures in one KM step share its rise evenly, the k-th getting
/// `F(t-) + (k - 1/2)(F(t) - F(t-))/d`.
pub fn plotting_design_censored(sample: &Sample) -> Result<PlottingDesign> {
    let failures = sample.failures();
    if failures < MIN_LSE_FAILURES {
        return Err(Error::InvalidSample(format!(
            "least squares needs at least {MIN_LSE_FAILURES} failures, got {failures}"
        )));
    }
    let steps = km_cdf_estimate(sample)?;
    let order = sample.order();
    let mut y = Vec::with_capacity(failures);
    let mut positions = Vec::with_capacity(failures);
    let mut ranks = Vec::with_capacity(failures);
    let mut step_iter = steps.iter().peekable();
    let mut k_in_step = 0;
    for (rank, &idx) in order.iter().enumerate() {
        if !sample.status[idx].is_failure() {
            continue;
        }
        let t = sample.times[idx];
        let step = loop {
            let s = step_iter.peek().expect("failure without KM step");
            if s.time == t {
                break **s;
            }
            step_iter.next();
            k_in_step = 0;
        };
        k_in_step += 1;
        let p = step.cdf_before
            + (k_in_step as f64 - 0.5) * (step.cdf - step.cdf_before) / step.failures as f64;
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("plotting position {p} outside (0, 1)")));
        }
        y.push(t.ln());
        positions.push(p);
        ranks.push(rank);
    }
    PlottingDesign::new(y, positions, ranks, sample.len())
}

/// Benard design for complete samples, Kaplan-Meier midpoints otherwise.
pub fn plotting_design(sample: &Sample) -> Result<PlottingDesign> {
    if sample.is_censored() {
        plotting_design_censored(sample)
    } else {
        plotting_design_complete(sample)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FitMethod {
    Lse,
    Mle,
}

impl std::fmt::Display for FitMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FitMethod::Lse => "LSE",
            FitMethod::Mle => "MLE",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub loc_scale: LocScaleParams,
    pub ll_params: LogLogisticParams,
    pub method: FitMethod,
    pub design: Option<PlottingDesign>,
}

impl FitResult {
    fn from_loc_scale(loc_scale: LocScaleParams, method: FitMethod, design: Option<PlottingDesign>) -> Result<Self> {
        Ok(Self {
            ll_params: loc_scale.to_log_logistic()?,
            loc_scale,
            method,
            design,
        })
    }

    fn from_ll(ll_params: LogLogisticParams, method: FitMethod) -> Self {
        Self {
            loc_scale: ll_params.to_loc_scale(),
            ll_params,
            method,
            design: None,
        }
    }
}

/// Slope and intercept of the simple regression of `y` on `x`.
pub(crate) fn regress(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len() as f64;
    let xbar = x.iter().sum::<f64>() / n;
    let ybar = y.iter().sum::<f64>() / n;
    let (sxy, sxx) = x.iter().zip(y).fold((0.0, 0.0), |(sxy, sxx), (&xi, &yi)| {
        let dx = xi - xbar;
        (sxy + dx * (yi - ybar), sxx + dx * dx)
    });
    (sxx > 0.0).then(|| {
        let slope = sxy / sxx;
        (slope, ybar - slope * xbar)
    })
}

pub fn lse_fit(design: &PlottingDesign) -> Result<FitResult> {
    let (s, mu) = regress(&design.x, &design.y).ok_or(Error::DegenerateDesign)?;
    if !(s > 0.0) {
        return Err(Error::NonPositiveSlope(s));
    }
    FitResult::from_loc_scale(LocScaleParams::new(mu, s)?, FitMethod::Lse, Some(design.clone()))
}

/// Log-likelihood: `log f` per failure plus `log R` per censored observation.
pub fn loglik(params: &LogLogisticParams, sample: &Sample) -> f64 {
    sample
        .iter()
        .map(|(t, s)| match s {
            Status::Failure => ll_log_pdf(t, params),
            Status::Censored => ll_log_reliability(t, params),
        })
        .sum()
}

/// Log-likelihood with gradient and Hessian in `(log alpha, log beta)`.
fn loglik_derivs(log_t: &[f64], status: &[Status], theta: [f64; 2]) -> (f64, [f64; 2], [[f64; 2]; 2]) {
    let alpha = theta[0].exp();
    let lb = theta[1];
    let mut f = 0.0;
    let mut g = [0.0; 2];
    let mut h = [[0.0; 2]; 2];
    for (&lt, &st) in log_t.iter().zip(status) {
        let u = alpha * (lt - lb);
        let cdf = logistic_cdf(u);
        let dens = cdf * (1.0 - cdf);
        match st {
            Status::Failure => {
                f += theta[0] - lt + u - 2.0 * softplus(u);
                let one_m2f = 1.0 - 2.0 * cdf;
                g[0] += 1.0 + u * one_m2f;
                g[1] -= alpha * one_m2f;
                h[0][0] += u * one_m2f - 2.0 * u * u * dens;
                h[0][1] += -alpha * one_m2f + 2.0 * alpha * u * dens;
                h[1][1] -= 2.0 * alpha * alpha * dens;
            }
            Status::Censored => {
                f -= softplus(u);
                g[0] -= cdf * u;
                g[1] += alpha * cdf;
                h[0][0] -= cdf * u + dens * u * u;
                h[0][1] += alpha * cdf + alpha * dens * u;
                h[1][1] -= alpha * alpha * dens;
            }
        }
    }
    h[1][0] = h[0][1];
    (f, g, h)
}

const MLE_MAX_ITER: usize = 500;
const LOG_ALPHA_BOUND: f64 = 16.0;

fn median(xs: &[f64]) -> f64 {
    crate::quantile::quantile(xs, 0.5)
}

/// Maximum likelihood fit.
///
/// Damped Newton iterations on `(log alpha, log beta)` using the analytic
/// gradient and Hessian, falling back to steepest ascent wherever the Hessian
/// is not negative definite. Starts from the least-squares fit when one
/// exists, otherwise from `alpha = 1, beta = median(t)`.
pub fn mle_fit(sample: &Sample) -> Result<FitResult> {
    let failures = sample.failures();
    if failures < MIN_MLE_FAILURES {
        return Err(Error::InvalidSample(format!(
            "maximum likelihood needs at least {MIN_MLE_FAILURES} failures, got {failures}"
        )));
    }
    let start = plotting_design(sample)
        .and_then(|d| lse_fit(&d))
        .map(|f| f.ll_params)
        .unwrap_or_else(|_| {
            LogLogisticParams::new(1.0, median(sample.times())).expect("positive median")
        });
    mle_from(sample, start)
}

pub(crate) fn mle_from(sample: &Sample, start: LogLogisticParams) -> Result<FitResult> {
    let log_t: Vec<f64> = sample.times().iter().map(|t| t.ln()).collect();
    let status = sample.status();
    let n = sample.len() as f64;
    let mut theta = [start.alpha().ln(), start.beta().ln()];
    let (mut f, mut g, mut h) = loglik_derivs(&log_t, status, theta);

    let done = |theta: [f64; 2]| -> Result<FitResult> {
        Ok(FitResult::from_ll(
            LogLogisticParams::new(theta[0].exp(), theta[1].exp())?,
            FitMethod::Mle,
        ))
    };

    for _ in 0..MLE_MAX_ITER {
        if g[0].abs().max(g[1].abs()) < 1e-10 * n {
            return done(theta);
        }
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let newton = h[0][0] < 0.0 && det > 0.0;
        let mut dir = if newton {
            [
                -(h[1][1] * g[0] - h[0][1] * g[1]) / det,
                -(-h[1][0] * g[0] + h[0][0] * g[1]) / det,
            ]
        } else {
            let norm = (g[0] * g[0] + g[1] * g[1]).sqrt();
            [g[0] / norm, g[1] / norm]
        };
        let len = dir[0].abs().max(dir[1].abs());
        if len > 2.0 {
            dir = [2.0 * dir[0] / len, 2.0 * dir[1] / len];
        }

        let slope = g[0] * dir[0] + g[1] * dir[1];
        let mut step = 1.0;
        let mut accepted = None;
        while step > 1e-14 {
            let cand = [theta[0] + step * dir[0], theta[1] + step * dir[1]];
            let (fc, gc, hc) = loglik_derivs(&log_t, status, cand);
            if fc.is_finite() && fc >= f + 1e-4 * step * slope {
                accepted = Some((cand, fc, gc, hc));
                break;
            }
            step *= 0.5;
        }
        let Some((cand, fc, gc, hc)) = accepted else {
            // no ascent possible along the search direction
            if g[0].abs().max(g[1].abs()) < 1e-6 * n {
                return done(theta);
            }
            return Err(Error::NonConvergence {
                iterations: MLE_MAX_ITER,
                alpha: theta[0].exp(),
                beta: theta[1].exp(),
            });
        };

        let dtheta = (cand[0] - theta[0]).abs().max((cand[1] - theta[1]).abs());
        let df = (fc - f).abs();
        theta = cand;
        (f, g, h) = (fc, gc, hc);

        if theta[0].abs() > LOG_ALPHA_BOUND {
            return Err(Error::Boundary {
                alpha: theta[0].exp(),
                beta: theta[1].exp(),
            });
        }
        let scale = 1.0 + theta[0].abs().max(theta[1].abs());
        if dtheta < 1e-8 * scale && df < 1e-10 * (1.0 + f.abs()) && g[0].abs().max(g[1].abs()) < 1e-6 * n {
            return done(theta);
        }
    }
    Err(Error::NonConvergence {
        iterations: MLE_MAX_ITER,
        alpha: theta[0].exp(),
        beta: theta[1].exp(),
    })
}

/// Negative Hessian of the log-likelihood in `(alpha, beta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservedInformation {
    pub matrix: [[f64; 2]; 2],
}

pub const SINGULAR_CONDITION: f64 = 1e12;

impl ObservedInformation {
    pub fn eigenvalues(&self) -> (f64, f64) {
        let [[a, b], [_, d]] = self.matrix;
        let mean = 0.5 * (a + d);
        let disc = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        (mean - disc, mean + disc)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.eigenvalues().0 > 0.0
    }

    pub fn condition_number(&self) -> f64 {
        let (lo, hi) = self.eigenvalues();
        if lo <= 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    pub fn is_singular(&self) -> bool {
        !self.is_positive_definite() || self.condition_number() > SINGULAR_CONDITION
    }

    /// Asymptotic covariance `I^{-1}`.
    pub fn inverse(&self) -> Result<[[f64; 2]; 2]> {
        if self.is_singular() {
            return Err(Error::SingularInformation(self.condition_number()));
        }
        let [[a, b], [c, d]] = self.matrix;
        let det = a * d - b * c;
        Ok([[d / det, -b / det], [-c / det, a / det]])
    }

    pub fn scaled(&self, k: f64) -> Self {
        let m = self.matrix;
        Self {
            matrix: [[k * m[0][0], k * m[0][1]], [k * m[1][0], k * m[1][1]]],
        }
    }
}

const INFO_REL_STEP: f64 = 1e-5;

/// Observed information by central finite differences of the log-likelihood
/// with relative step `1e-5` per coordinate, symmetrized.
pub fn observed_information(params: &LogLogisticParams, sample: &Sample) -> Result<ObservedInformation> {
    let theta = [params.alpha(), params.beta()];
    let h = [INFO_REL_STEP * theta[0], INFO_REL_STEP * theta[1]];
    let eval = |da: f64, db: f64| -> Result<f64> {
        let p = LogLogisticParams::new(theta[0] + da, theta[1] + db)?;
        Ok(loglik(&p, sample))
    };
    let f0 = eval(0.0, 0.0)?;
    let d_aa = (eval(h[0], 0.0)? - 2.0 * f0 + eval(-h[0], 0.0)?) / (h[0] * h[0]);
    let d_bb = (eval(0.0, h[1])? - 2.0 * f0 + eval(0.0, -h[1])?) / (h[1] * h[1]);
    let d_ab = (eval(h[0], h[1])? - eval(h[0], -h[1])? - eval(-h[0], h[1])? + eval(-h[0], -h[1])?)
        / (4.0 * h[0] * h[1]);
    let off = -d_ab;
    Ok(ObservedInformation {
        matrix: [[-d_aa, off], [off, -d_bb]],
    })
}
