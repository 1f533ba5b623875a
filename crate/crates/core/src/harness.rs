//! Monte Carlo coverage studies for interval estimates of `R(t)`.
//!
//! Replicate `i` of a scenario seeded with `s` uses `s.derive(i)`; inside a
//! replicate, tag 0 drives the lifetimes, tag 1 the pivotal draws and tag 2
//! the bootstrap. Replicates therefore do not depend on which worker runs
//! them, and aggregation walks the replicates in index order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{bootstrap_fits, percentile_interval, wald_interval_reliability};
use crate::dist::{ll_quantile, ll_reliability, sample_loglogistic, LogLogisticParams, Seed};
use crate::error::{Error, Result};
use crate::estimation::{lse_fit, mle_fit, observed_information, plotting_design, Sample};
use crate::gpq::{gpq_draws, gpq_interval, gpq_transform, MIN_DRAWS};
use crate::interval::{IntervalEstimate, IntervalMethod, Target};

/// Replicate failure share above which a scenario is flagged.
pub const MAX_FAILURE_SHARE: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n: usize,
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
    pub level: f64,
    #[serde(default)]
    pub censoring_prop: f64,
    pub replicates: usize,
    pub gpq_draws: usize,
    pub bootstrap_reps: usize,
    pub seed: Seed,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n < 3 {
            return bad(format!("sample size must be at least 3, got {}", self.n));
        }
        if !(self.t > 0.0) {
            return bad(format!("t must be positive, got {}", self.t));
        }
        LogLogisticParams::new(self.alpha, self.beta).map_err(|e| Error::Config(e.to_string()))?;
        if !(self.level > 0.0 && self.level < 1.0) {
            return bad(format!("level must lie in (0, 1), got {}", self.level));
        }
        if !(0.0..1.0).contains(&self.censoring_prop) {
            return bad(format!("censoring_prop must lie in [0, 1), got {}", self.censoring_prop));
        }
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        if self.gpq_draws < MIN_DRAWS {
            return bad(format!("gpq_draws must be at least {MIN_DRAWS}"));
        }
        if self.bootstrap_reps < crate::classical::MIN_BOOT_REPS {
            return bad(format!(
                "bootstrap_reps must be at least {}",
                crate::classical::MIN_BOOT_REPS
            ));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<LogLogisticParams> {
        LogLogisticParams::new(self.alpha, self.beta)
    }

    pub fn true_reliability(&self) -> Result<f64> {
        Ok(ll_reliability(self.t, &self.params()?))
    }
}

/// Type-I threshold whose expected censored share is `censoring_prop`.
pub fn censoring_threshold(config: &ScenarioConfig) -> Result<f64> {
    if !(config.censoring_prop > 0.0 && config.censoring_prop < 1.0) {
        return Err(Error::Config("censoring threshold needs 0 < censoring_prop < 1".into()));
    }
    ll_quantile(1.0 - config.censoring_prop, &config.params()?)
}

/// Outcome of one method on one replicate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum MethodOutcome {
    Interval { interval: IntervalEstimate, covered: bool },
    Failed { reason: String },
}

impl MethodOutcome {
    fn from_result(r: Result<IntervalEstimate>, truth: f64) -> Self {
        match r {
            Ok(interval) => MethodOutcome::Interval {
                covered: interval.contains(truth),
                interval,
            },
            Err(e) => MethodOutcome::Failed { reason: e.to_string() },
        }
    }

    pub fn covered(&self) -> Option<bool> {
        match self {
            MethodOutcome::Interval { covered, .. } => Some(*covered),
            MethodOutcome::Failed { .. } => None,
        }
    }

    pub fn interval(&self) -> Option<&IntervalEstimate> {
        match self {
            MethodOutcome::Interval { interval, .. } => Some(interval),
            MethodOutcome::Failed { .. } => None,
        }
    }
}

/// Outcomes in [`IntervalMethod::ALL`] order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateOutcome {
    pub index: usize,
    pub failures_observed: usize,
    pub outcomes: [MethodOutcome; 3],
}

pub fn simulate_sample(config: &ScenarioConfig, seed: Seed) -> Result<Sample> {
    let life = sample_loglogistic(config.n, &config.params()?, seed);
    if config.censoring_prop > 0.0 {
        Sample::type1_censored(&life, censoring_threshold(config)?)
    } else {
        Sample::complete(life)
    }
}

fn gpq_reliability(sample: &Sample, config: &ScenarioConfig, seed: Seed) -> Result<IntervalEstimate> {
    let target = Target::Reliability { t: config.t };
    let fit = lse_fit(&plotting_design(sample)?)?;
    let draws = gpq_draws(&fit, config.gpq_draws, seed)?;
    gpq_interval(&gpq_transform(&draws, target)?, config.level, target)
}

pub fn run_replicate(config: &ScenarioConfig, index: usize) -> Result<ReplicateOutcome> {
    config.validate()?;
    let truth = config.true_reliability()?;
    let seed = config.seed.derive(index as u64);
    let sample = simulate_sample(config, seed.derive(0))?;

    let gpq = gpq_reliability(&sample, config, seed.derive(1));
    let (boot, wald) = match mle_fit(&sample) {
        Ok(mle) => {
            let boot = bootstrap_fits(&sample, &mle, config.bootstrap_reps, seed.derive(2))
                .and_then(|fits| percentile_interval(&fits.reliability(config.t), config.level));
            let wald = observed_information(&mle.ll_params, &sample)
                .and_then(|info| wald_interval_reliability(config.t, &mle, &info, config.level));
            (boot, wald)
        }
        Err(e) => {
            let msg = e.to_string();
            (Err(Error::Domain(msg.clone())), Err(Error::Domain(msg)))
        }
    };
    Ok(ReplicateOutcome {
        index,
        failures_observed: sample.failures(),
        outcomes: [
            MethodOutcome::from_result(gpq, truth),
            MethodOutcome::from_result(boot, truth),
            MethodOutcome::from_result(wald, truth),
        ],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodCoverage {
    pub method: IntervalMethod,
    pub covered: usize,
    pub failures: usize,
    /// Replicates with an interval, `r - failures`.
    pub evaluated: usize,
    /// `covered / evaluated`; absent when every replicate failed.
    pub coverage: Option<f64>,
    pub mean_length: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageResult {
    pub config: ScenarioConfig,
    pub true_reliability: f64,
    pub censoring_threshold: Option<f64>,
    pub methods: [MethodCoverage; 3],
    /// Some method failed on more than 10% of replicates.
    pub flagged: bool,
}

impl CoverageResult {
    pub fn method(&self, m: IntervalMethod) -> &MethodCoverage {
        self.methods
            .iter()
            .find(|c| c.method == m)
            .expect("all methods present")
    }

    pub fn coverage(&self, m: IntervalMethod) -> Option<f64> {
        self.method(m).coverage
    }
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Aggregates replicate outcomes (in any order) into coverage tallies.
pub fn aggregate(config: &ScenarioConfig, replicates: &[ReplicateOutcome]) -> Result<CoverageResult> {
    let mut ordered: Vec<&ReplicateOutcome> = replicates.iter().collect();
    ordered.sort_by_key(|r| r.index);
    let methods = std::array::from_fn(|k| {
        let method = IntervalMethod::ALL[k];
        let outcomes = ordered.iter().map(|r| &r.outcomes[k]);
        let covered = outcomes.clone().filter(|o| o.covered() == Some(true)).count();
        let failures = outcomes.clone().filter(|o| o.covered().is_none()).count();
        let evaluated = ordered.len() - failures;
        let total_len = compensated_sum(outcomes.filter_map(|o| o.interval()).map(|i| i.length()));
        MethodCoverage {
            method,
            covered,
            failures,
            evaluated,
            coverage: (evaluated > 0).then(|| covered as f64 / evaluated as f64),
            mean_length: (evaluated > 0).then(|| total_len / evaluated as f64),
        }
    });
    let flagged = methods
        .iter()
        .any(|m: &MethodCoverage| m.failures as f64 > MAX_FAILURE_SHARE * ordered.len() as f64);
    Ok(CoverageResult {
        config: *config,
        true_reliability: config.true_reliability()?,
        censoring_threshold: (config.censoring_prop > 0.0)
            .then(|| censoring_threshold(config))
            .transpose()?,
        methods,
        flagged,
    })
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<CoverageResult> {
    config.validate()?;
    let reps = (0..config.replicates)
        .into_par_iter()
        .map(|i| run_replicate(config, i))
        .collect::<Result<Vec<_>>>()?;
    aggregate(config, &reps)
}

/// Runs the replicates split into `parts` contiguous blocks, one after the
/// other. Gives the same result as [`run_scenario`] for every `parts`.
pub fn run_scenario_partitioned(config: &ScenarioConfig, parts: usize) -> Result<CoverageResult> {
    config.validate()?;
    let parts = parts.max(1);
    let block = config.replicates.div_ceil(parts);
    let mut reps = Vec::with_capacity(config.replicates);
    for p in (0..parts).rev() {
        let lo = p * block;
        let hi = ((p + 1) * block).min(config.replicates);
        for i in lo..hi {
            reps.push(run_replicate(config, i)?);
        }
    }
    aggregate(config, &reps)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageTable {
    pub rows: Vec<CoverageResult>,
}

pub fn run_table(configs: &[ScenarioConfig]) -> Result<CoverageTable> {
    if configs.is_empty() {
        return Err(Error::Config("no scenarios to run".into()));
    }
    let rows = configs.iter().map(run_scenario).collect::<Result<Vec<_>>>()?;
    Ok(CoverageTable { rows })
}

/// Replicate and draw counts for a study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Workload {
    pub replicates: usize,
    pub gpq_draws: usize,
    pub bootstrap_reps: usize,
}

impl Workload {
    pub const FULL: Workload = Workload {
        replicates: 1000,
        gpq_draws: 2000,
        bootstrap_reps: 2000,
    };
    pub const DESK: Workload = Workload {
        replicates: 500,
        gpq_draws: 1000,
        bootstrap_reps: 500,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Complete data, nominal 0.90.
    Table1,
    /// Complete data, nominal 0.95.
    Table2,
    /// Type-I censored, n = 10, nominal 0.95.
    Table3,
}

impl Preset {
    /// Parses `table1`, `table2`, `table3`, optionally with a `-desk` suffix.
    pub fn parse(name: &str) -> Result<(Preset, Workload)> {
        let (base, workload) = match name.strip_suffix("-desk") {
            Some(b) => (b, Workload::DESK),
            None => (name, Workload::FULL),
        };
        let preset = match base {
            "table1" => Preset::Table1,
            "table2" => Preset::Table2,
            "table3" => Preset::Table3,
            _ => return Err(Error::Config(format!("unknown preset '{name}'"))),
        };
        Ok((preset, workload))
    }

    /// Scenario grid in table order; cell `i` is seeded with `seed.derive(i)`.
    pub fn scenarios(self, workload: Workload, seed: Seed) -> Vec<ScenarioConfig> {
        let mut cells = Vec::new();
        let mut push = |n: usize, t: f64, alpha: f64, beta: f64, level: f64, prop: f64| {
            let i = cells.len() as u64;
            cells.push(ScenarioConfig {
                n,
                t,
                alpha,
                beta,
                level,
                censoring_prop: prop,
                replicates: workload.replicates,
                gpq_draws: workload.gpq_draws,
                bootstrap_reps: workload.bootstrap_reps,
                seed: seed.derive(i),
            });
        };
        match self {
            Preset::Table1 | Preset::Table2 => {
                let level = if self == Preset::Table1 { 0.90 } else { 0.95 };
                for n in [10, 20] {
                    for t in [1.0, 2.0] {
                        for alpha in [2.0, 5.0] {
                            for beta in [1.0, 2.0] {
                                push(n, t, alpha, beta, level, 0.0);
                            }
                        }
                    }
                }
            }
            Preset::Table3 => {
                for t in [1.0, 2.0] {
                    for alpha in [2.0, 5.0] {
                        for beta in [1.0, 2.0] {
                            for prop in [0.2, 0.5] {
                                push(10, t, alpha, beta, 0.95, prop);
                            }
                        }
                    }
                }
            }
        }
        cells
    }
}
