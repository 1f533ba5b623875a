use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use llgpq::error::{Error, ErrorKind, Result};
use llgpq::estimation::{lse_fit, mle_fit, plotting_design, FitResult, Sample};
use llgpq::gof::gof_test;
use llgpq::harness::{run_table, Preset, ScenarioConfig};
use llgpq::io::{load_dataset, summarize};
use llgpq::report::{
    reliability_grid, reliability_intervals, render_coverage, render_fits, render_gof,
    render_intervals, render_summary, CiOptions, CoverageReport, FitSummary, Provenance,
};
use llgpq::{IntervalMethod, Seed};

#[derive(Parser)]
#[command(name = "llgpq", version, about = "Log-logistic reliability inference")]
struct Cli {
    /// Print the machine-readable JSON document instead of text tables.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FitChoice {
    Lse,
    Mle,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum GofFit {
    Lse,
    Mle,
}

#[derive(Clone, Copy, ValueEnum)]
enum CiMethod {
    Gpq,
    Boot,
    Wald,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Point estimates by least squares and/or maximum likelihood.
    Fit {
        /// Dataset file, or builtin:grinder / builtin:reactor.
        #[arg(long)]
        data: String,
        #[arg(long, value_enum, default_value = "all")]
        method: FitChoice,
    },
    /// Confidence intervals for the reliability R(t).
    Ci {
        #[arg(long)]
        data: String,
        /// Evaluation time; repeat for several.
        #[arg(long = "t", required = true)]
        times: Vec<f64>,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        #[arg(long, value_enum, default_value = "all")]
        method: CiMethod,
        #[arg(long, default_value_t = llgpq::gpq::DEFAULT_DRAWS)]
        gpq_draws: usize,
        #[arg(long, default_value_t = llgpq::classical::DEFAULT_BOOT_REPS)]
        boot_reps: usize,
        /// Random seed; generated and printed when omitted.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Kolmogorov-Smirnov goodness of fit.
    Gof {
        #[arg(long)]
        data: String,
        #[arg(long, value_enum, default_value = "mle")]
        fit: GofFit,
    },
    /// Coverage study from a scenario file or a preset.
    Simulate {
        /// TOML file with one [[scenario]] table per cell.
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        scenarios: Option<PathBuf>,
        /// table1, table2, table3, or the same with a -desk suffix.
        #[arg(long)]
        preset: Option<String>,
        /// Base seed for presets; generated and printed when omitted.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numeric grid of R(t; alpha, beta) for contour plots.
    Relgrid {
        #[arg(long = "t", required = true)]
        times: Vec<f64>,
        /// lo:hi
        #[arg(long, default_value = "0.5:10")]
        alpha_range: String,
        /// lo:hi
        #[arg(long, default_value = "0.5:10")]
        beta_range: String,
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    scenario: Vec<ScenarioConfig>,
}

#[derive(Serialize)]
struct Document<T: Serialize> {
    provenance: Provenance,
    #[serde(flatten)]
    body: T,
}

fn fresh_seed() -> u64 {
    use std::time::{SystemTime, UNIX_EPOCH};
    let nanos = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0);
    Seed(nanos).derive(std::process::id() as u64).value()
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = fresh_seed();
        eprintln!("seed: {s}");
        s
    })
}

fn parse_range(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::Config(format!("range '{s}' must look like lo:hi with 0 < lo < hi"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > 0.0 && hi > lo {
        Ok((lo, hi))
    } else {
        Err(bad())
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))
}

fn lse(sample: &Sample) -> Result<FitResult> {
    lse_fit(&plotting_design(sample)?)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit { data, method } => {
            let sample = load_dataset(&data)?;
            let mut fits = Vec::new();
            if matches!(method, FitChoice::Lse | FitChoice::All) {
                fits.push(FitSummary::new(&lse(&sample)?, &sample));
            }
            if matches!(method, FitChoice::Mle | FitChoice::All) {
                fits.push(FitSummary::new(&mle_fit(&sample)?, &sample));
            }
            let mut provenance = Provenance::new("fit");
            provenance.methods = fits.iter().map(|f| f.method.to_string()).collect();
            if cli.json {
                #[derive(Serialize)]
                struct Body {
                    summary: llgpq::io::Summary,
                    censored: bool,
                    fits: Vec<FitSummary>,
                }
                let body = Body {
                    summary: summarize(&sample),
                    censored: sample.is_censored(),
                    fits,
                };
                println!("{}", to_json(&Document { provenance, body })?);
            } else {
                print!("{}\n{}", render_summary(&summarize(&sample)), render_fits(&fits));
            }
        }
        Command::Ci {
            data,
            times,
            level,
            method,
            gpq_draws,
            boot_reps,
            seed,
        } => {
            let sample = load_dataset(&data)?;
            let methods = match method {
                CiMethod::Gpq => vec![IntervalMethod::LseGpq],
                CiMethod::Boot => vec![IntervalMethod::Bootstrap],
                CiMethod::Wald => vec![IntervalMethod::Wald],
                CiMethod::All => IntervalMethod::ALL.to_vec(),
            };
            let seed = resolve_seed(seed);
            let opts = CiOptions {
                times,
                level,
                methods,
                gpq_draws,
                bootstrap_reps: boot_reps,
                seed: Seed(seed),
            };
            let rows = reliability_intervals(&sample, &opts)?;
            let mut provenance = Provenance::new("ci");
            provenance.seed = Some(seed);
            provenance.gpq_draws = Some(gpq_draws);
            provenance.bootstrap_reps = Some(boot_reps);
            provenance.methods = opts.methods.iter().map(|m| m.label().to_string()).collect();
            if cli.json {
                #[derive(Serialize)]
                struct Body {
                    intervals: Vec<llgpq::report::IntervalRow>,
                }
                println!("{}", to_json(&Document { provenance, body: Body { intervals: rows } })?);
            } else {
                print!("{}", render_intervals(&rows));
            }
        }
        Command::Gof { data, fit } => {
            let sample = load_dataset(&data)?;
            let fitted = match fit {
                GofFit::Lse => lse(&sample)?,
                GofFit::Mle => mle_fit(&sample)?,
            };
            let report = gof_test(&sample, &fitted)?;
            let mut provenance = Provenance::new("gof");
            provenance.methods = vec![fitted.method.to_string()];
            if cli.json {
                #[derive(Serialize)]
                struct Body {
                    gof: llgpq::gof::GofReport,
                }
                println!("{}", to_json(&Document { provenance, body: Body { gof: report } })?);
            } else {
                print!("{}", render_gof(&[report]));
            }
        }
        Command::Simulate {
            scenarios,
            preset,
            seed,
            out,
        } => {
            let mut provenance = Provenance::new("simulate");
            let configs = match (scenarios, preset) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(&path)?;
                    let file: ScenarioFile =
                        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                    file.scenario
                }
                (None, Some(name)) => {
                    let (preset, workload) = Preset::parse(&name)?;
                    let seed = resolve_seed(seed);
                    provenance.seed = Some(seed);
                    provenance.replicates = Some(workload.replicates);
                    provenance.gpq_draws = Some(workload.gpq_draws);
                    provenance.bootstrap_reps = Some(workload.bootstrap_reps);
                    preset.scenarios(workload, Seed(seed))
                }
                (None, None) => return Err(Error::Config("need --scenarios or --preset".into())),
            };
            for c in &configs {
                c.validate()?;
            }
            provenance.methods = IntervalMethod::ALL.iter().map(|m| m.label().to_string()).collect();
            let table = run_table(&configs)?;
            let report = CoverageReport { provenance, table };
            let json = to_json(&report)?;
            if let Some(path) = out {
                std::fs::write(path, format!("{json}\n"))?;
            }
            if cli.json {
                println!("{json}");
            } else {
                print!("{}", render_coverage(&report.table));
            }
        }
        Command::Relgrid {
            times,
            alpha_range,
            beta_range,
            steps,
        } => {
            let grid = reliability_grid(&times, parse_range(&alpha_range)?, parse_range(&beta_range)?, steps)?;
            if cli.json {
                #[derive(Serialize)]
                struct Body {
                    grid: Vec<llgpq::report::GridPoint>,
                }
                println!("{}", to_json(&Document { provenance: Provenance::new("relgrid"), body: Body { grid } })?);
            } else {
                println!("t,alpha,beta,reliability");
                for p in grid {
                    println!("{},{},{},{}", p.t, p.alpha, p.beta, p.reliability);
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Usage => 2,
                ErrorKind::Data => 3,
                ErrorKind::Numerical => 4,
            })
        }
    }
}
