//! CSV and JSON output of a run.
//!
//! CSV numbers are written with 9 significant digits in the shortest of
//! fixed or exponent notation (like C's `%.9g`), rows end in `\n`.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::scenario::{LogKind, RunResults};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub const TIMESERIES_CSV: &str = "timeseries.csv";
pub const LIFETIMES_CSV: &str = "lifetimes.csv";
pub const REGIME_CSV: &str = "regime.csv";
pub const EVENTS_CSV: &str = "events.csv";
pub const RESULTS_JSON: &str = "results.json";

/// Formats `x` with 9 significant digits.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..9).contains(&exp) {
        let fixed = format!("{:.*}", (8 - exp) as usize, x);
        trim_fraction(&fixed).into()
    } else {
        format!("{}e{}", trim_fraction(mantissa), exp)
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "inf".into(), sig9)
}

pub fn timeseries_csv(results: &RunResults) -> String {
    let mut out = String::from("t,code_id,status,entropy");
    for i in 1..=results.mode_count {
        write!(out, ",N_{i}").unwrap();
    }
    out.push('\n');
    for sample in &results.samples {
        for m in &sample.memories {
            write!(
                out,
                "{},{},{},{}",
                sig9(sample.t),
                m.code_id,
                m.status.as_str(),
                sig9(m.entropy)
            )
            .unwrap();
            for n in &m.occupations {
                write!(out, ",{}", sig9(*n)).unwrap();
            }
            out.push('\n');
        }
    }
    out
}

pub fn lifetimes_csv(results: &RunResults) -> String {
    let mut out = String::from("k,domain_size,tau\n");
    for row in &results.lifetimes {
        writeln!(out, "{},{},{}", sig9(row.k), sig9(row.domain_size), opt(row.tau)).unwrap();
    }
    out
}

pub fn regime_csv(results: &RunResults) -> String {
    let mut out = String::from("t,k,domain_size,omega,ratio,overdamped\n");
    let t = sig9(results.regime.t);
    for m in &results.regime.modes {
        writeln!(
            out,
            "{t},{},{},{},{},{}",
            sig9(m.k),
            sig9(m.domain_size),
            sig9(m.omega),
            opt(m.ratio),
            m.overdamped
        )
        .unwrap();
    }
    out
}

pub fn events_csv(results: &RunResults) -> String {
    let mut out = String::from("t,event_index,kind,code_ids,detail\n");
    for e in &results.events {
        let index = e.event_index.map(|i| i.to_string()).unwrap_or_default();
        let (ids, detail) = match &e.kind {
            LogKind::Recorded { code_id } | LogKind::Forgotten { code_id } | LogKind::Refreshed { code_id } => {
                (code_id.clone(), String::new())
            }
            LogKind::Overprint { destroyed, by } => (destroyed.clone(), format!("by={by}")),
            LogKind::Recall {
                outcome,
                code_ids,
                overlap,
            } => (
                code_ids.join(";"),
                match overlap {
                    Some(o) => format!("{outcome} overlap={}", sig9(*o)),
                    None => outcome.clone(),
                },
            ),
            LogKind::Perturbed {
                amplitude,
                seed,
                applied,
            } => (
                String::new(),
                format!("amplitude={} seed={seed} applied={applied}", sig9(*amplitude)),
            ),
            LogKind::Association { path } => (path.join(";"), String::new()),
            LogKind::ConfusionWarning { start } => (start.clone(), "association threshold is zero".into()),
        };
        writeln!(out, "{},{index},{},{ids},{detail}", sig9(e.t), e.kind.name()).unwrap();
    }
    out
}

pub fn results_json(results: &RunResults) -> String {
    let mut s = serde_json::to_string_pretty(results).expect("results serialize");
    s.push('\n');
    s
}

/// Writes the run into `out_dir` (created if missing) and returns the paths
/// written.
pub fn emit(results: &RunResults, format: Format, out_dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let files: Vec<(&str, String)> = match format {
        Format::Csv => vec![
            (TIMESERIES_CSV, timeseries_csv(results)),
            (LIFETIMES_CSV, lifetimes_csv(results)),
            (REGIME_CSV, regime_csv(results)),
            (EVENTS_CSV, events_csv(results)),
        ],
        Format::Json => vec![(RESULTS_JSON, results_json(results))],
    };
    files
        .into_iter()
        .map(|(name, body)| {
            let path = out_dir.join(name);
            fs::write(&path, body)?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(1.0), "1");
        assert_eq!(sig9(-2.5), "-2.5");
        assert_eq!(sig9(std::f64::consts::PI), "3.14159265");
        assert_eq!(sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(sig9(123456789.4), "123456789");
        assert_eq!(sig9(1234567890.0), "1.23456789e9");
        assert_eq!(sig9(1.5e-7), "1.5e-7");
        assert_eq!(sig9(0.0001), "0.0001");
        assert_eq!(sig9(9.9999999999), "10");
        assert_eq!(sig9(f64::INFINITY), "inf");
    }

    proptest! {
        #[test]
        fn sig9_round_trips(x in prop_oneof![-1e12f64..1e12, -1e-3f64..1e-3, 1e-300f64..1e-200]) {
            let back: f64 = sig9(x).parse().unwrap();
            prop_assert!((back - x).abs() <= 5e-9 * x.abs());
        }
    }
}
