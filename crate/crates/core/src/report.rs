//! Machine-readable reports and their aligned text renderings.

use std::fmt::Write as _;

use serde::Serialize;

use crate::classical::{bootstrap_fits, percentile_interval, wald_interval_reliability};
use crate::dist::{ll_reliability, LogLogisticParams, Seed};
use crate::error::{Error, Result};
use crate::estimation::{
    km_cdf_estimate, loglik, lse_fit, mle_fit, observed_information, plotting_design, FitMethod,
    FitResult, Sample,
};
use crate::gof::{gof_test, GofReport};
use crate::gpq::{gpq_draws, gpq_interval, gpq_transform};
use crate::harness::CoverageTable;
use crate::interval::{IntervalMethod, Target};
use crate::io::{summarize, Summary};

/// Everything needed to rerun a report exactly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: Option<u64>,
    pub gpq_draws: Option<usize>,
    pub bootstrap_reps: Option<usize>,
    pub replicates: Option<usize>,
    pub methods: Vec<String>,
}

impl Provenance {
    pub fn new(command: &str) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed: None,
            gpq_draws: None,
            bootstrap_reps: None,
            replicates: None,
            methods: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSummary {
    pub method: FitMethod,
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub s: f64,
    pub loglik: f64,
}

impl FitSummary {
    pub fn new(fit: &FitResult, sample: &Sample) -> Self {
        Self {
            method: fit.method,
            alpha: fit.ll_params.alpha(),
            beta: fit.ll_params.beta(),
            mu: fit.loc_scale.mu(),
            s: fit.loc_scale.s(),
            loglik: loglik(&fit.ll_params, sample),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalRow {
    pub t: f64,
    pub empirical_reliability: f64,
    pub method: IntervalMethod,
    pub level: f64,
    pub lower: f64,
    pub upper: f64,
    pub length: f64,
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetInfo {
    pub name: String,
    pub n: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub provenance: Provenance,
    pub dataset: DatasetInfo,
    pub summary: Summary,
    pub fits: Vec<FitSummary>,
    pub gof: Vec<GofReport>,
    pub intervals: Vec<IntervalRow>,
}

/// Kaplan-Meier reliability at `t` (the empirical survival fraction for
/// complete data).
pub fn empirical_reliability(sample: &Sample, t: f64) -> Result<f64> {
    let steps = km_cdf_estimate(sample)?;
    let cdf = steps
        .iter()
        .take_while(|s| s.time <= t)
        .last()
        .map_or(0.0, |s| s.cdf);
    Ok(1.0 - cdf)
}

#[derive(Debug, Clone)]
pub struct CiOptions {
    pub times: Vec<f64>,
    pub level: f64,
    pub methods: Vec<IntervalMethod>,
    pub gpq_draws: usize,
    pub bootstrap_reps: usize,
    pub seed: Seed,
}

/// Interval table for each requested `(t, method)`. The pivotal draws use
/// `seed.derive(1)` and the bootstrap `seed.derive(2)`, shared across all `t`.
pub fn reliability_intervals(sample: &Sample, opts: &CiOptions) -> Result<Vec<IntervalRow>> {
    let wants = |m| opts.methods.contains(&m);
    let gpq = if wants(IntervalMethod::LseGpq) {
        let fit = lse_fit(&plotting_design(sample)?)?;
        Some(gpq_draws(&fit, opts.gpq_draws, opts.seed.derive(1))?)
    } else {
        None
    };
    let mle = if wants(IntervalMethod::Bootstrap) || wants(IntervalMethod::Wald) {
        Some(mle_fit(sample)?)
    } else {
        None
    };
    let boot = match (&mle, wants(IntervalMethod::Bootstrap)) {
        (Some(f), true) => Some(bootstrap_fits(sample, f, opts.bootstrap_reps, opts.seed.derive(2))?),
        _ => None,
    };
    let info = match (&mle, wants(IntervalMethod::Wald)) {
        (Some(f), true) => Some(observed_information(&f.ll_params, sample)?),
        _ => None,
    };

    let mut rows = Vec::new();
    for &t in &opts.times {
        if !(t > 0.0) {
            return Err(Error::Config(format!("evaluation time must be positive, got {t}")));
        }
        let empirical = empirical_reliability(sample, t)?;
        let target = Target::Reliability { t };
        for &method in &IntervalMethod::ALL {
            let iv = match method {
                IntervalMethod::LseGpq => match &gpq {
                    Some(d) => gpq_interval(&gpq_transform(d, target)?, opts.level, target)?,
                    None => continue,
                },
                IntervalMethod::Bootstrap => match &boot {
                    Some(b) => percentile_interval(&b.reliability(t), opts.level)?,
                    None => continue,
                },
                IntervalMethod::Wald => match (&mle, &info) {
                    (Some(f), Some(i)) => wald_interval_reliability(t, f, i, opts.level)?,
                    _ => continue,
                },
            };
            rows.push(IntervalRow {
                t,
                empirical_reliability: empirical,
                method,
                level: iv.level,
                lower: iv.lower,
                upper: iv.upper,
                length: iv.length(),
                clamped: iv.clamped,
            });
        }
    }
    Ok(rows)
}

/// Full analysis: summary, both fits, KS tests (complete data only) and the
/// interval table.
pub fn analyze(name: &str, sample: &Sample, opts: &CiOptions) -> Result<AnalysisReport> {
    let lse = lse_fit(&plotting_design(sample)?)?;
    let mle = mle_fit(sample)?;
    let gof = if sample.is_censored() {
        Vec::new()
    } else {
        vec![gof_test(sample, &lse)?, gof_test(sample, &mle)?]
    };
    let mut provenance = Provenance::new("analyze");
    provenance.seed = Some(opts.seed.value());
    provenance.gpq_draws = Some(opts.gpq_draws);
    provenance.bootstrap_reps = Some(opts.bootstrap_reps);
    provenance.methods = opts.methods.iter().map(|m| m.label().to_string()).collect();
    Ok(AnalysisReport {
        provenance,
        dataset: DatasetInfo {
            name: name.to_string(),
            n: sample.len(),
            failures: sample.failures(),
        },
        summary: summarize(sample),
        fits: vec![FitSummary::new(&lse, sample), FitSummary::new(&mle, sample)],
        gof,
        intervals: reliability_intervals(sample, opts)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
    pub reliability: f64,
}

/// `R(t; alpha, beta)` on an evenly spaced `steps x steps` grid per `t`.
pub fn reliability_grid(
    times: &[f64],
    alpha_range: (f64, f64),
    beta_range: (f64, f64),
    steps: usize,
) -> Result<Vec<GridPoint>> {
    if steps < 2 {
        return Err(Error::Config("grid needs at least 2 steps per axis".into()));
    }
    let axis = |(lo, hi): (f64, f64)| -> Vec<f64> {
        (0..steps)
            .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
            .collect()
    };
    let (alphas, betas) = (axis(alpha_range), axis(beta_range));
    let mut out = Vec::with_capacity(times.len() * steps * steps);
    for &t in times {
        if !(t > 0.0) {
            return Err(Error::Config(format!("grid time must be positive, got {t}")));
        }
        for &alpha in &alphas {
            for &beta in &betas {
                let p = LogLogisticParams::new(alpha, beta)?;
                out.push(GridPoint {
                    t,
                    alpha,
                    beta,
                    reliability: ll_reliability(t, &p),
                });
            }
        }
    }
    Ok(out)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.3}"))
}

pub fn render_summary(s: &Summary) -> String {
    format!(
        "{:>10} {:>12} {:>10} {:>10} {:>12} {:>10}\n{:>10.4} {:>12.4} {:>10.4} {:>10.4} {:>12.4} {:>10.4}\n",
        "Min", "1st Qu.", "Median", "Mean", "3rd Qu.", "Max", s.min, s.q1, s.median, s.mean, s.q3, s.max
    )
}

pub fn render_fits(fits: &[FitSummary]) -> String {
    let mut out = format!("{:<6} {:>12} {:>12} {:>12} {:>12} {:>12}\n", "Method", "alpha", "beta", "mu", "s", "loglik");
    for f in fits {
        let _ = writeln!(
            out,
            "{:<6} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12.4}",
            f.method.to_string(),
            f.alpha,
            f.beta,
            f.mu,
            f.s,
            f.loglik
        );
    }
    out
}

pub fn render_gof(gof: &[GofReport]) -> String {
    let mut out = format!("{:<6} {:>4} {:>10} {:>10}\n", "Fit", "n", "KS D", "p-value");
    for g in gof {
        let _ = writeln!(out, "{:<6} {:>4} {:>10.4} {:>10.4}", g.fit_method.to_string(), g.n, g.statistic, g.p_value);
    }
    out
}

pub fn render_intervals(rows: &[IntervalRow]) -> String {
    let mut out = format!(
        "{:>10} {:>11} {:<8} {:>6} {:>18} {:>8}\n",
        "t", "Empirical R", "Method", "Level", "CI", "Length"
    );
    for r in rows {
        let ci = format!("({:.3}, {:.3})", r.lower, r.upper);
        let _ = writeln!(
            out,
            "{:>10} {:>11.3} {:<8} {:>6.2} {:>18} {:>8.3}{}",
            r.t,
            r.empirical_reliability,
            r.method.label(),
            r.level,
            ci,
            r.length,
            if r.clamped { " *clamped" } else { "" }
        );
    }
    out
}

pub fn render_analysis(report: &AnalysisReport) -> String {
    let mut out = String::new();
    let d = &report.dataset;
    let _ = writeln!(out, "dataset {} (n = {}, failures = {})\n", d.name, d.n, d.failures);
    out.push_str(&render_summary(&report.summary));
    out.push('\n');
    out.push_str(&render_fits(&report.fits));
    if !report.gof.is_empty() {
        out.push('\n');
        out.push_str(&render_gof(&report.gof));
    }
    if !report.intervals.is_empty() {
        out.push('\n');
        out.push_str(&render_intervals(&report.intervals));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub provenance: Provenance,
    pub table: CoverageTable,
}

pub fn render_coverage(table: &CoverageTable) -> String {
    let mut out = format!(
        "{:>4} {:>5} {:>6} {:>6} {:>10} {:>8} {:>8} {:>8} {:>6}\n",
        "n", "t", "Shape", "Scale", "Censoring", "LSE-GPQ", "PB", "AI", "Level"
    );
    for row in &table.rows {
        let c = &row.config;
        let _ = writeln!(
            out,
            "{:>4} {:>5} {:>6} {:>6} {:>9.0}% {:>8} {:>8} {:>8} {:>6.2}{}",
            c.n,
            c.t,
            c.alpha,
            c.beta,
            100.0 * c.censoring_prop,
            fmt_opt(row.coverage(IntervalMethod::LseGpq)),
            fmt_opt(row.coverage(IntervalMethod::Bootstrap)),
            fmt_opt(row.coverage(IntervalMethod::Wald)),
            c.level,
            if row.flagged { "  flagged" } else { "" }
        );
    }
    out
}
