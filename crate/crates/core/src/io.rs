//! Dataset files and summary statistics.
//!
//! A dataset is delimiter-separated text (comma, semicolon, tab or blanks),
//! one observation per line as `time[,status]` with status `1` for a failure
//! and `0` for a censored time. A missing status means failure. The first
//! non-blank line may be a header.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::Serialize;

use crate::data;
use crate::error::{Error, Result};
use crate::estimation::{Sample, Status};
use crate::quantile::quantile_sorted;

fn fields(line: &str) -> Vec<&str> {
    line.split(|c: char| c == ',' || c == ';' || c.is_whitespace())
        .filter(|f| !f.is_empty())
        .collect()
}

pub fn parse_dataset<R: BufRead>(reader: R) -> Result<Sample> {
    let mut times = Vec::new();
    let mut status = Vec::new();
    let mut seen_content = false;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let cols = fields(line.trim_start_matches('\u{feff}'));
        if cols.is_empty() {
            continue;
        }
        let first_content = !seen_content;
        seen_content = true;
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let time: f64 = match cols[0].parse() {
            Ok(t) => t,
            Err(_) if first_content => continue,
            Err(_) => return Err(err(format!("cannot parse time '{}'", cols[0]))),
        };
        if !(time.is_finite() && time > 0.0) {
            return Err(err(format!("time must be positive, got {time}")));
        }
        let st = match cols.get(1) {
            None => Status::Failure,
            Some(&"1") => Status::Failure,
            Some(&"0") => Status::Censored,
            Some(other) => return Err(err(format!("unknown status '{other}', expected 0 or 1"))),
        };
        if cols.len() > 2 {
            return Err(err(format!("expected at most 2 columns, found {}", cols.len())));
        }
        times.push(time);
        status.push(st);
    }
    if times.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "no observations".into(),
        });
    }
    Sample::new(times, status)
}

pub fn parse_dataset_str(text: &str) -> Result<Sample> {
    parse_dataset(text.as_bytes())
}

/// Reads a dataset file, or a bundled one named `builtin:<name>`.
pub fn load_dataset(source: &str) -> Result<Sample> {
    if let Some(name) = source.strip_prefix("builtin:") {
        let times = data::builtin(name)
            .ok_or_else(|| Error::Config(format!("no bundled dataset named '{name}'")))?;
        return Sample::complete(times.to_vec());
    }
    let file = std::fs::File::open(Path::new(source))?;
    parse_dataset(std::io::BufReader::new(file))
}

/// Writes `time,status` with a header. Uses the shortest round-trip float
/// representation, so re-parsing yields identical values.
pub fn write_dataset<W: Write>(sample: &Sample, mut out: W) -> Result<()> {
    writeln!(out, "time,status")?;
    for (t, s) in sample.iter() {
        writeln!(out, "{t},{}", u8::from(s.is_failure()))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
}

/// Six-number summary of the observed times.
pub fn summarize(sample: &Sample) -> Summary {
    let mut t = sample.times().to_vec();
    t.sort_by(f64::total_cmp);
    Summary {
        min: t[0],
        q1: quantile_sorted(&t, 0.25),
        median: quantile_sorted(&t, 0.5),
        mean: t.iter().sum::<f64>() / t.len() as f64,
        q3: quantile_sorted(&t, 0.75),
        max: t[t.len() - 1],
    }
}
