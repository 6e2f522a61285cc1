//! Scenario configuration files.
//!
//! The format is line oriented. `#` starts a comment; blank lines are
//! ignored. Settings are `key = value` lines, events are lines starting with
//! the word `event`:
//!
//! ```text
//! grid.volume_L = 12.566370614359172
//! grid.mode_count_M = 3
//! damping = 2.0
//! schedule.kind = exp_decay
//! schedule.T = 1.0
//! horizon = 10
//!
//! event 0.0 record first 1.0,0.5,2.0
//! event 2.5 stimulus 1.0,0.5,2.0 0.5
//! event 3.0 perturb 0.05 7
//! event 4.0 refresh first
//! event 4.0 associate first 3
//! event 5.0 sample
//! ```
//!
//! See the README for the full list of keys and their defaults.

use std::fmt;
use std::path::Path;

use thiserror::Error;
use vacmem_core::{
    effective_mass, BankParams, Damping, FrequencySchedule, MemoryBank, ModeGrid, DEFAULT_ASSOC_THRESHOLD,
    DEFAULT_EPSILON_FORGET, DEFAULT_MATCH_THRESHOLD,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown key `{key}` at line {line}")]
    UnknownKey { line: usize, key: String },
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },
}

impl ConfigError {
    fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    Constant,
    ExpDecay,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub volume_l: f64,
    pub mode_count_m: usize,
    /// Explicit momenta replacing the `2πi/L` lattice.
    pub momenta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleConfig {
    pub kind: ScheduleKind,
    pub time_constant: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Thresholds {
    pub epsilon_forget: f64,
    pub match_threshold: f64,
    pub assoc_threshold: f64,
    pub perturb_threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    Record { code_id: String, code: Vec<f64> },
    Stimulus { address: Vec<f64>, energy: f64 },
    Perturb { amplitude: f64, seed: u64 },
    Refresh { code_id: String },
    Associate { code_id: String, max_hops: usize },
    Sample,
}

impl Event {
    pub fn kind(&self) -> &'static str {
        match self {
            Event::Record { .. } => "record",
            Event::Stimulus { .. } => "stimulus",
            Event::Perturb { .. } => "perturb",
            Event::Refresh { .. } => "refresh",
            Event::Associate { .. } => "associate",
            Event::Sample => "sample",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimedEvent {
    pub t: f64,
    /// Source line, 1-based.
    pub line: usize,
    pub event: Event,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub grid: GridConfig,
    pub damping: f64,
    pub schedule: ScheduleConfig,
    pub dissipative: bool,
    pub thresholds: Thresholds,
    /// Recall energy threshold; defaults to `π/L`.
    pub m_eff: f64,
    pub events: Vec<TimedEvent>,
    pub horizon: f64,
    pub sample_dt: f64,
}

const KEYS: &[&str] = &[
    "grid.volume_L",
    "grid.mode_count_M",
    "grid.momenta",
    "damping",
    "schedule.kind",
    "schedule.T",
    "dissipative",
    "thresholds.epsilon_forget",
    "thresholds.match_threshold",
    "thresholds.assoc_threshold",
    "thresholds.perturb_threshold",
    "m_eff",
    "horizon",
    "sample_dt",
];

pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario(&text)
}

struct Setting<'a> {
    line: usize,
    column: usize,
    value: &'a str,
}

/// Token of a line with its 1-based column.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut settings: Vec<(&str, Setting<'_>)> = Vec::new();
    let mut events = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let toks = tokens(line);
        if toks[0].1 == "event" {
            events.push(parse_event(line_no, &toks)?);
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(ConfigError::Parse {
                line: line_no,
                column: toks[0].0,
                message: "expected `key = value` or an `event` line".into(),
            });
        };
        let key = line[..eq].trim();
        let value = line[eq + 1..].trim();
        let key_column = line.find(key).unwrap_or(0) + 1;
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey {
                line: line_no,
                key: key.into(),
            });
        }
        if value.is_empty() {
            return Err(ConfigError::Parse {
                line: line_no,
                column: eq + 2,
                message: format!("missing value for `{key}`"),
            });
        }
        if settings.iter().any(|(k, _)| *k == key) {
            return Err(ConfigError::Parse {
                line: line_no,
                column: key_column,
                message: format!("duplicate key `{key}`"),
            });
        }
        let column = eq + 2 + (line[eq + 1..].len() - line[eq + 1..].trim_start().len());
        settings.push((
            key,
            Setting {
                line: line_no,
                column: column.max(1),
                value,
            },
        ));
    }

    let lookup = |key: &str| settings.iter().find(|(k, _)| *k == key).map(|(_, s)| s);
    let number = |key: &str| -> Result<Option<f64>, ConfigError> {
        lookup(key).map(|s| parse_f64(s.value, s.line, s.column)).transpose()
    };
    let required =
        |key: &str| -> Result<f64, ConfigError> { number(key)?.ok_or_else(|| ConfigError::validation(key, "missing")) };

    let volume_l = required("grid.volume_L")?;
    let mode_count_m = match lookup("grid.mode_count_M") {
        Some(s) => s.value.parse::<usize>().map_err(|_| ConfigError::Parse {
            line: s.line,
            column: s.column,
            message: format!("expected a nonnegative integer, found `{}`", s.value),
        })?,
        None => return Err(ConfigError::validation("grid.mode_count_M", "missing")),
    };
    let momenta = lookup("grid.momenta")
        .map(|s| parse_list(s.value, s.line, s.column))
        .transpose()?;
    let damping = required("damping")?;
    let kind = match lookup("schedule.kind") {
        None => ScheduleKind::ExpDecay,
        Some(s) => match s.value {
            "constant" => ScheduleKind::Constant,
            "exp_decay" => ScheduleKind::ExpDecay,
            other => {
                return Err(ConfigError::Parse {
                    line: s.line,
                    column: s.column,
                    message: format!("schedule.kind must be `constant` or `exp_decay`, found `{other}`"),
                })
            }
        },
    };
    let time_constant = number("schedule.T")?.unwrap_or(1.0);
    let dissipative = match lookup("dissipative") {
        None => true,
        Some(s) => match s.value {
            "true" => true,
            "false" => false,
            other => {
                return Err(ConfigError::Parse {
                    line: s.line,
                    column: s.column,
                    message: format!("expected `true` or `false`, found `{other}`"),
                })
            }
        },
    };
    let thresholds = Thresholds {
        epsilon_forget: number("thresholds.epsilon_forget")?.unwrap_or(DEFAULT_EPSILON_FORGET),
        match_threshold: number("thresholds.match_threshold")?.unwrap_or(DEFAULT_MATCH_THRESHOLD),
        assoc_threshold: number("thresholds.assoc_threshold")?.unwrap_or(DEFAULT_ASSOC_THRESHOLD),
        perturb_threshold: number("thresholds.perturb_threshold")?.unwrap_or(0.0),
    };
    let horizon = required("horizon")?;
    let sample_dt = number("sample_dt")?.unwrap_or(horizon / 200.0);
    let m_eff = match number("m_eff")? {
        Some(m) => m,
        None => effective_mass(volume_l).map_err(|_| ConfigError::validation("grid.volume_L", "must be positive"))?,
    };

    let config = ScenarioConfig {
        grid: GridConfig {
            volume_l,
            mode_count_m,
            momenta,
        },
        damping,
        schedule: ScheduleConfig { kind, time_constant },
        dissipative,
        thresholds,
        m_eff,
        events,
        horizon,
        sample_dt,
    };
    config.validate()?;
    Ok(config)
}

fn parse_f64(s: &str, line: usize, column: usize) -> Result<f64, ConfigError> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ConfigError::Parse {
            line,
            column,
            message: format!("expected a finite number, found `{s}`"),
        }),
    }
}

fn parse_list(s: &str, line: usize, column: usize) -> Result<Vec<f64>, ConfigError> {
    let mut offset = 0;
    let mut out = Vec::new();
    for part in s.split(',') {
        let lead = part.len() - part.trim_start().len();
        out.push(parse_f64(part.trim(), line, column + offset + lead)?);
        offset += part.len() + 1;
    }
    Ok(out)
}

fn parse_event(line: usize, toks: &[(usize, &str)]) -> Result<TimedEvent, ConfigError> {
    let err = |column: usize, message: String| ConfigError::Parse { line, column, message };
    let end_column = toks.last().map_or(1, |(c, s)| c + s.len());
    let Some(&(tc, t)) = toks.get(1) else {
        return Err(err(end_column, "event needs a time".into()));
    };
    let t = parse_f64(t, line, tc)?;
    let Some(&(kc, kind)) = toks.get(2) else {
        return Err(err(end_column, "event needs a kind".into()));
    };
    let args = &toks[3..];
    let expect = |n: usize, usage: &str| {
        if args.len() != n {
            Err(err(kc, format!("`{kind}` expects: event <t> {kind} {usage}")))
        } else {
            Ok(())
        }
    };
    let event = match kind {
        "record" => {
            expect(2, "<code_id> <N_1,...,N_M>")?;
            Event::Record {
                code_id: args[0].1.into(),
                code: parse_list(args[1].1, line, args[1].0)?,
            }
        }
        "stimulus" => {
            expect(2, "<N_1,...,N_M> <energy>")?;
            Event::Stimulus {
                address: parse_list(args[0].1, line, args[0].0)?,
                energy: parse_f64(args[1].1, line, args[1].0)?,
            }
        }
        "perturb" => {
            expect(2, "<amplitude> <seed>")?;
            Event::Perturb {
                amplitude: parse_f64(args[0].1, line, args[0].0)?,
                seed: args[1]
                    .1
                    .parse()
                    .map_err(|_| err(args[1].0, format!("expected a u64 seed, found `{}`", args[1].1)))?,
            }
        }
        "refresh" => {
            expect(1, "<code_id>")?;
            Event::Refresh {
                code_id: args[0].1.into(),
            }
        }
        "associate" => {
            expect(2, "<code_id> <max_hops>")?;
            Event::Associate {
                code_id: args[0].1.into(),
                max_hops: args[1]
                    .1
                    .parse()
                    .map_err(|_| err(args[1].0, format!("expected a hop count, found `{}`", args[1].1)))?,
            }
        }
        "sample" => {
            expect(0, "")?;
            Event::Sample
        }
        other => return Err(err(kc, format!("unknown event kind `{other}`"))),
    };
    Ok(TimedEvent { t, line, event })
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.grid.volume_l > 0.0) {
            return Err(ConfigError::validation("grid.volume_L", "must be positive"));
        }
        if self.grid.mode_count_m == 0 {
            return Err(ConfigError::validation("grid.mode_count_M", "must be at least 1"));
        }
        if let Some(k) = &self.grid.momenta {
            if k.len() != self.grid.mode_count_m {
                return Err(ConfigError::validation("grid.momenta", "length mismatch"));
            }
            if k.iter().any(|k| !(*k > 0.0)) || k.windows(2).any(|w| w[1] <= w[0]) {
                return Err(ConfigError::validation(
                    "grid.momenta",
                    "must be positive and strictly increasing",
                ));
            }
        }
        if !(self.damping >= 0.0) {
            return Err(ConfigError::validation("damping", "must be >= 0"));
        }
        if !(self.schedule.time_constant > 0.0) {
            return Err(ConfigError::validation("schedule.T", "must be positive"));
        }
        let th = &self.thresholds;
        if !(th.epsilon_forget > 0.0) {
            return Err(ConfigError::validation("thresholds.epsilon_forget", "must be positive"));
        }
        if !(th.match_threshold > 0.0 && th.match_threshold <= 1.0) {
            return Err(ConfigError::validation(
                "thresholds.match_threshold",
                "must lie in (0, 1]",
            ));
        }
        if !(th.assoc_threshold >= 0.0 && th.assoc_threshold < 1.0) {
            return Err(ConfigError::validation(
                "thresholds.assoc_threshold",
                "must lie in [0, 1)",
            ));
        }
        if th.match_threshold <= th.assoc_threshold {
            return Err(ConfigError::validation(
                "thresholds.match_threshold",
                "must exceed thresholds.assoc_threshold",
            ));
        }
        if !(th.perturb_threshold >= 0.0) {
            return Err(ConfigError::validation("thresholds.perturb_threshold", "must be >= 0"));
        }
        if !(self.m_eff >= 0.0) {
            return Err(ConfigError::validation("m_eff", "must be >= 0"));
        }
        if !(self.horizon > 0.0) {
            return Err(ConfigError::validation("horizon", "must be positive"));
        }
        if !(self.sample_dt > 0.0 && self.sample_dt <= self.horizon) {
            return Err(ConfigError::validation("sample_dt", "must lie in (0, horizon]"));
        }
        if self.events.windows(2).any(|w| w[1].t < w[0].t) {
            return Err(ConfigError::validation("events", "not sorted by time"));
        }
        let m = self.grid.mode_count_m;
        for (i, e) in self.events.iter().enumerate() {
            if !(e.t >= 0.0 && e.t <= self.horizon) {
                return Err(ConfigError::validation(
                    format!("events[{i}].t"),
                    "outside [0, horizon]",
                ));
            }
            match &e.event {
                Event::Record { code, .. } => check_code(i, "code", code, m)?,
                Event::Stimulus { address, energy } => {
                    check_code(i, "address", address, m)?;
                    if !(*energy >= 0.0) {
                        return Err(ConfigError::validation(format!("events[{i}].energy"), "must be >= 0"));
                    }
                }
                Event::Perturb { amplitude, .. } if !(*amplitude >= 0.0) => {
                    return Err(ConfigError::validation(
                        format!("events[{i}].amplitude"),
                        "must be >= 0",
                    ));
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn mode_grid(&self) -> Result<ModeGrid, vacmem_core::Error> {
        match &self.grid.momenta {
            Some(k) => ModeGrid::from_momenta(self.grid.volume_l, k.clone()),
            None => ModeGrid::new(self.grid.volume_l, self.grid.mode_count_m),
        }
    }

    pub fn damping(&self) -> Result<Damping, vacmem_core::Error> {
        Damping::new(self.damping)
    }

    pub fn frequency_schedule(&self) -> Result<FrequencySchedule, vacmem_core::Error> {
        match self.schedule.kind {
            ScheduleKind::Constant => Ok(FrequencySchedule::Constant),
            ScheduleKind::ExpDecay => FrequencySchedule::exp_decay(self.schedule.time_constant),
        }
    }

    pub fn bank_params(&self) -> BankParams {
        BankParams {
            dissipative: self.dissipative,
            m_eff: self.m_eff,
            match_threshold: self.thresholds.match_threshold,
            assoc_threshold: self.thresholds.assoc_threshold,
            epsilon_forget: self.thresholds.epsilon_forget,
        }
    }

    pub fn empty_bank(&self) -> Result<MemoryBank, vacmem_core::Error> {
        MemoryBank::new(
            self.mode_grid()?,
            self.damping()?,
            self.frequency_schedule()?,
            self.bank_params(),
        )
    }

    /// Replaces every perturbation seed with `seed + n`, `n` counting perturb
    /// events in file order.
    pub fn override_seeds(&mut self, seed: u64) {
        let perturbs = self.events.iter_mut().filter_map(|e| match &mut e.event {
            Event::Perturb { seed, .. } => Some(seed),
            _ => None,
        });
        for (n, s) in perturbs.enumerate() {
            *s = seed.wrapping_add(n as u64);
        }
    }
}

fn check_code(i: usize, what: &str, code: &[f64], m: usize) -> Result<(), ConfigError> {
    if code.len() != m {
        return Err(ConfigError::validation(
            format!("events[{i}].{what}"),
            "length mismatch",
        ));
    }
    if code.iter().any(|n| !(*n >= 0.0)) {
        return Err(ConfigError::validation(
            format!("events[{i}].{what}"),
            "occupations must be >= 0",
        ));
    }
    Ok(())
}

impl fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScheduleKind::Constant => "constant",
            ScheduleKind::ExpDecay => "exp_decay",
        })
    }
}
