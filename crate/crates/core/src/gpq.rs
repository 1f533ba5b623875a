//! Generalized pivotal quantities built on the probability-plot LSE.
//!
//! For a design with fixed regressors `x` and a simulated standard logistic
//! sample `Z`, sorted and restricted to the design's ranks, let `s(Z)` be the
//! slope of `Z` regressed on `x` and `Zbar` the mean of the retained order
//! statistics. Then
//!
//! ```text
//! G_s  = s_hat / s(Z)
//! G_mu = mu_hat - G_s (Zbar - xbar s(Z))
//! G_alpha = 1 / G_s,  G_beta = exp(G_mu)
//! G_R(t) = 1 / (1 + (t / G_beta)^G_alpha)
//! ```
//!
//! Under censoring the simulated sample has the original size `n` and only
//! the order statistics at the observed failure ranks enter the regression.
//!
//! Draws are produced in fixed chunks of [`CHUNK`], chunk `c` using the
//! stream `seed.derive(c)`, so the output is independent of how chunks are
//! spread over threads.

use rayon::prelude::*;

use crate::dist::{draw_std_logistic, logistic_cdf, Seed};
use crate::error::{Error, Result};
use crate::estimation::{FitMethod, FitResult, PlottingDesign};
use crate::interval::{equal_tailed, IntervalEstimate, IntervalMethod, Target};

pub const DEFAULT_DRAWS: usize = 2000;
pub const MIN_DRAWS: usize = 100;
pub const CHUNK: usize = 250;

/// Parameter-free part of the pivots: one `(s(Z), Zbar)` pair per draw.
#[derive(Debug, Clone, PartialEq)]
pub struct PivotStream {
    pub slopes: Vec<f64>,
    pub means: Vec<f64>,
    pub rejected: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpqDraws {
    pub g_s: Vec<f64>,
    pub g_mu: Vec<f64>,
    pub rejected: usize,
    /// Regressors of the design the draws were built on.
    pub design_x: Vec<f64>,
}

impl GpqDraws {
    pub fn len(&self) -> usize {
        self.g_s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g_s.is_empty()
    }
}

struct DesignSummary<'a> {
    centered: Vec<f64>,
    sxx: f64,
    xbar: f64,
    ranks: &'a [usize],
    n_total: usize,
}

impl<'a> DesignSummary<'a> {
    fn new(design: &'a PlottingDesign) -> Self {
        let x = design.x();
        let xbar = x.iter().sum::<f64>() / x.len() as f64;
        let centered: Vec<f64> = x.iter().map(|v| v - xbar).collect();
        let sxx = centered.iter().map(|c| c * c).sum();
        Self {
            centered,
            sxx,
            xbar,
            ranks: design.ranks(),
            n_total: design.n_total(),
        }
    }

    /// Fills `out` with accepted `(slope, mean)` pairs; returns the rejection count.
    fn fill_chunk(&self, seed: Seed, out: &mut [(f64, f64)]) -> Result<usize> {
        let mut rng = seed.rng();
        let mut z = vec![0.0; self.n_total];
        let mut rejected = 0;
        let m = self.ranks.len() as f64;
        let cap = 4 * out.len();
        for slot in out.iter_mut() {
            loop {
                for v in z.iter_mut() {
                    *v = draw_std_logistic(&mut rng);
                }
                z.sort_unstable_by(f64::total_cmp);
                let (mut sxz, mut zsum) = (0.0, 0.0);
                for (&r, &c) in self.ranks.iter().zip(&self.centered) {
                    sxz += c * z[r];
                    zsum += z[r];
                }
                let slope = sxz / self.sxx;
                if slope > 0.0 {
                    *slot = (slope, zsum / m);
                    break;
                }
                rejected += 1;
                if rejected > cap {
                    return Err(Error::TooManyRejections {
                        rejected,
                        accepted: 0,
                    });
                }
            }
        }
        Ok(rejected)
    }
}

/// The pivotal `(s(Z), Zbar)` stream for a design. Depends only on the
/// design regressors and ranks, `draws` and `seed`.
pub fn pivot_stream(design: &PlottingDesign, draws: usize, seed: Seed) -> Result<PivotStream> {
    if draws < MIN_DRAWS {
        return Err(Error::Domain(format!(
            "at least {MIN_DRAWS} pivotal draws required, got {draws}"
        )));
    }
    let summary = DesignSummary::new(design);
    if !(summary.sxx > 0.0) {
        return Err(Error::DegenerateDesign);
    }
    let mut pairs = vec![(0.0, 0.0); draws];
    let rejected = pairs
        .par_chunks_mut(CHUNK)
        .enumerate()
        .map(|(c, chunk)| summary.fill_chunk(seed.derive(c as u64), chunk))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| match e {
            Error::TooManyRejections { rejected, .. } => Error::TooManyRejections {
                rejected,
                accepted: draws,
            },
            e => e,
        })?
        .into_iter()
        .sum::<usize>();
    if rejected > draws {
        return Err(Error::TooManyRejections {
            rejected,
            accepted: draws,
        });
    }
    let (slopes, means) = pairs.into_iter().unzip();
    Ok(PivotStream {
        slopes,
        means,
        rejected,
    })
}

/// Draws of `G_s` and `G_mu` for an LSE fit.
pub fn gpq_draws(fit: &FitResult, draws: usize, seed: Seed) -> Result<GpqDraws> {
    let design = match (&fit.method, &fit.design) {
        (FitMethod::Lse, Some(d)) => d,
        _ => {
            return Err(Error::Domain(
                "pivotal draws need a least-squares fit with its plotting design".into(),
            ))
        }
    };
    let stream = pivot_stream(design, draws, seed)?;
    let s_hat = fit.loc_scale.s();
    let mu_hat = fit.loc_scale.mu();
    let xbar = DesignSummary::new(design).xbar;
    let (g_s, g_mu) = stream
        .slopes
        .iter()
        .zip(&stream.means)
        .map(|(&sz, &zbar)| {
            let g_s = s_hat / sz;
            (g_s, mu_hat - g_s * (zbar - xbar * sz))
        })
        .unzip();
    Ok(GpqDraws {
        g_s,
        g_mu,
        rejected: stream.rejected,
        design_x: design.x().to_vec(),
    })
}

/// Maps draws to the pivotal quantity of `target`.
pub fn gpq_transform(draws: &GpqDraws, target: Target) -> Result<Vec<f64>> {
    Ok(match target {
        Target::Alpha => draws.g_s.iter().map(|s| 1.0 / s).collect(),
        Target::Beta => draws.g_mu.iter().map(|m| m.exp()).collect(),
        Target::Reliability { t } => {
            if !(t > 0.0) {
                return Err(Error::Domain(format!("reliability time must be positive, got {t}")));
            }
            let lt = t.ln();
            draws
                .g_s
                .iter()
                .zip(&draws.g_mu)
                .map(|(s, mu)| logistic_cdf(-(lt - mu) / s))
                .collect()
        }
    })
}

/// Equal-tailed generalized confidence interval from transformed draws.
pub fn gpq_interval(transformed: &[f64], level: f64, target: Target) -> Result<IntervalEstimate> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!("level must lie in (0, 1), got {level}")));
    }
    if transformed.is_empty() {
        return Err(Error::Domain("no draws to summarize".into()));
    }
    Ok(equal_tailed(transformed, level, IntervalMethod::LseGpq, target))
}
