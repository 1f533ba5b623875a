//! Benchmark interval methods for `R(t)`: delta-method Wald intervals from
//! the observed information, and percentile parametric bootstrap.

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::dist::{ll_reliability, sample_loglogistic_with, LogLogisticParams, Seed};
use crate::error::{Error, Result};
use crate::estimation::{mle_fit, mle_from, FitMethod, FitResult, ObservedInformation, Sample};
use crate::interval::{equal_tailed, IntervalEstimate, IntervalMethod, Target};

pub const DEFAULT_BOOT_REPS: usize = 2000;
pub const MIN_BOOT_REPS: usize = 100;
/// Refit failures tolerated, as a fraction of the resample count.
pub const MAX_REFIT_FAILURE_RATE: f64 = 0.05;

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("level must lie in (0, 1), got {level}")))
    }
}

pub(crate) fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// `(dR/dalpha, dR/dbeta)` of `R(t) = 1 / (1 + (t/beta)^alpha)`.
pub fn reliability_gradient(t: f64, params: &LogLogisticParams) -> [f64; 2] {
    let (a, b) = (params.alpha(), params.beta());
    let log_ratio = (t / b).ln();
    // w / (1 + w)^2 = F (1 - F)
    let f = ll_reliability(t, params);
    let dens = f * (1.0 - f);
    [-dens * log_ratio, a * dens / b]
}

/// Wald interval `R_hat +/- z sqrt(grad' I^{-1} grad)`, clamped to [0, 1].
pub fn wald_interval_reliability(
    t: f64,
    mle: &FitResult,
    info: &ObservedInformation,
    level: f64,
) -> Result<IntervalEstimate> {
    check_level(level)?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("reliability time must be positive, got {t}")));
    }
    let cov = info.inverse()?;
    let g = reliability_gradient(t, &mle.ll_params);
    let var = g[0] * (cov[0][0] * g[0] + cov[0][1] * g[1]) + g[1] * (cov[1][0] * g[0] + cov[1][1] * g[1]);
    let half = normal_quantile(0.5 * (1.0 + level)) * var.max(0.0).sqrt();
    let r_hat = ll_reliability(t, &mle.ll_params);
    let (lo, hi) = (r_hat - half, r_hat + half);
    let clamped = lo < 0.0 || hi > 1.0;
    Ok(IntervalEstimate {
        lower: lo.max(0.0),
        upper: hi.min(1.0),
        level,
        method: IntervalMethod::Wald,
        target: Target::Reliability { t },
        clamped,
    })
}

/// MLE refits of parametric resamples.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapFits {
    pub params: Vec<LogLogisticParams>,
    /// Resamples whose refit failed and were redrawn.
    pub failures: usize,
}

impl BootstrapFits {
    pub fn reps(&self) -> usize {
        self.params.len()
    }

    pub fn is_flagged(&self) -> bool {
        self.failures as f64 > MAX_REFIT_FAILURE_RATE * self.reps() as f64
    }

    pub fn reliability(&self, t: f64) -> BootstrapRun {
        BootstrapRun {
            estimates: self.params.iter().map(|p| ll_reliability(t, p)).collect(),
            reps: self.reps(),
            failures: self.failures,
            t,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapRun {
    pub estimates: Vec<f64>,
    pub reps: usize,
    pub failures: usize,
    pub t: f64,
}

impl BootstrapRun {
    pub fn is_flagged(&self) -> bool {
        self.failures as f64 > MAX_REFIT_FAILURE_RATE * self.reps as f64
    }
}

/// Parametric bootstrap from an MLE fit.
///
/// Resample `k` draws from the stream `seed.derive(k)`, so a run with fewer
/// resamples is a prefix of a longer one. Under type-I censoring lifetimes
/// are regenerated and re-censored at the original threshold. A failed refit
/// is counted and the resample redrawn from the same stream.
pub fn bootstrap_fits(sample: &Sample, fit: &FitResult, reps: usize, seed: Seed) -> Result<BootstrapFits> {
    if reps < MIN_BOOT_REPS {
        return Err(Error::Domain(format!(
            "at least {MIN_BOOT_REPS} bootstrap resamples required, got {reps}"
        )));
    }
    if fit.method != FitMethod::Mle {
        return Err(Error::Domain("parametric bootstrap resamples from the MLE".into()));
    }
    let threshold = if sample.is_censored() {
        Some(sample.censoring_threshold().ok_or_else(|| {
            Error::InvalidSample("bootstrap of censored data needs a type-I censoring threshold".into())
        })?)
    } else {
        None
    };
    let theta = fit.ll_params;
    let n = sample.len();
    let max_attempts = (MAX_REFIT_FAILURE_RATE * reps as f64).floor() as usize + 1;

    let fits: Vec<(Option<LogLogisticParams>, usize)> = (0..reps)
        .into_par_iter()
        .map(|k| {
            let mut rng = seed.derive(k as u64).rng();
            let mut failed = 0;
            while failed <= max_attempts {
                let life = sample_loglogistic_with(&mut rng, n, &theta);
                let resample = match threshold {
                    Some(c) => Sample::type1_censored(&life, c),
                    None => Sample::complete(life),
                };
                match resample.and_then(|s| mle_from(&s, theta)) {
                    Ok(f) => return (Some(f.ll_params), failed),
                    Err(_) => failed += 1,
                }
            }
            (None, failed)
        })
        .collect();

    let failures = fits.iter().map(|(_, f)| f).sum();
    if fits.iter().any(|(p, _)| p.is_none()) {
        return Err(Error::FlaggedBootstrap { failures, reps });
    }
    Ok(BootstrapFits {
        params: fits.into_iter().filter_map(|(p, _)| p).collect(),
        failures,
    })
}

/// Bootstrap distribution of `R(t; theta*)` for the sample's MLE.
pub fn bootstrap_reliability(t: f64, sample: &Sample, reps: usize, seed: Seed) -> Result<BootstrapRun> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("reliability time must be positive, got {t}")));
    }
    let fit = mle_fit(sample)?;
    Ok(bootstrap_fits(sample, &fit, reps, seed)?.reliability(t))
}

/// Equal-tailed percentile interval of the bootstrap estimates.
pub fn percentile_interval(run: &BootstrapRun, level: f64) -> Result<IntervalEstimate> {
    check_level(level)?;
    if run.is_flagged() {
        return Err(Error::FlaggedBootstrap {
            failures: run.failures,
            reps: run.reps,
        });
    }
    if run.estimates.is_empty() {
        return Err(Error::Domain("no bootstrap estimates".into()));
    }
    Ok(equal_tailed(
        &run.estimates,
        level,
        IntervalMethod::Bootstrap,
        Target::Reliability { t: run.t },
    ))
}
