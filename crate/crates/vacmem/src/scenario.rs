//! Deterministic execution of a scenario timeline.

use serde::Serialize;
use thiserror::Error;
use vacmem_core::{
    domain_size, entropy, lifetime_profile, regime_report, BankEvent, Damping, LifetimeBackend, MemoryBank, MemoryCode,
    MemoryStatus, RecallResult, RegimeReport, Stimulus,
};

use crate::config::{Event, ScenarioConfig};

#[derive(Debug, Error)]
#[error("{}: {source}", match .event_index { Some(i) => format!("event {i}"), None => "setup".to_string() })]
pub struct RunError {
    /// Index into the config's event list, `None` for errors before the first
    /// event.
    pub event_index: Option<usize>,
    #[source]
    pub source: vacmem_core::Error,
}

fn at(event_index: Option<usize>) -> impl Fn(vacmem_core::Error) -> RunError {
    move |source| RunError { event_index, source }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemoryRecord {
    pub code_id: String,
    pub occupations: Vec<f64>,
    pub entropy: f64,
    pub status: Status,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Alive,
    Forgotten,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Alive => "alive",
            Status::Forgotten => "forgotten",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeriesRecord {
    pub t: f64,
    pub memories: Vec<MemoryRecord>,
    pub alive_count: usize,
    pub overdamped_mode_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LifetimeRow {
    pub k: f64,
    pub domain_size: f64,
    /// `None` for modes that never decay.
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeRow {
    pub k: f64,
    pub domain_size: f64,
    pub omega: f64,
    pub ratio: Option<f64>,
    pub overdamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeSummary {
    pub t: f64,
    pub overdamped_count: usize,
    pub underdamped_count: usize,
    pub small_domain_survival: f64,
    pub large_domain_survival: f64,
    pub mean_surviving_domain_size: Option<f64>,
    pub mean_domain_size: f64,
    pub modes: Vec<RegimeRow>,
}

impl From<RegimeReport> for RegimeSummary {
    fn from(r: RegimeReport) -> Self {
        Self {
            t: r.t,
            overdamped_count: r.overdamped_count,
            underdamped_count: r.underdamped_count,
            small_domain_survival: r.small_domain_survival,
            large_domain_survival: r.large_domain_survival,
            mean_surviving_domain_size: r.mean_surviving_domain_size,
            mean_domain_size: r.mean_domain_size,
            modes: r
                .modes
                .into_iter()
                .map(|m| RegimeRow {
                    k: m.k,
                    domain_size: m.domain_size,
                    omega: m.omega,
                    ratio: m.ratio.is_finite().then_some(m.ratio),
                    overdamped: m.overdamped,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LogKind {
    Recorded {
        code_id: String,
    },
    Overprint {
        destroyed: String,
        by: String,
    },
    Forgotten {
        code_id: String,
    },
    Recall {
        outcome: String,
        code_ids: Vec<String>,
        overlap: Option<f64>,
    },
    Perturbed {
        amplitude: f64,
        seed: u64,
        applied: bool,
    },
    Refreshed {
        code_id: String,
    },
    Association {
        path: Vec<String>,
    },
    ConfusionWarning {
        start: String,
    },
}

impl LogKind {
    pub fn name(&self) -> &'static str {
        match self {
            LogKind::Recorded { .. } => "recorded",
            LogKind::Overprint { .. } => "overprint",
            LogKind::Forgotten { .. } => "forgotten",
            LogKind::Recall { .. } => "recall",
            LogKind::Perturbed { .. } => "perturbed",
            LogKind::Refreshed { .. } => "refreshed",
            LogKind::Association { .. } => "association",
            LogKind::ConfusionWarning { .. } => "confusion_warning",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogEntry {
    pub t: f64,
    /// Event that caused the entry; `None` for forgetting during free
    /// evolution.
    pub event_index: Option<usize>,
    #[serde(flatten)]
    pub kind: LogKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResults {
    pub mode_count: usize,
    pub samples: Vec<TimeSeriesRecord>,
    pub lifetimes: Vec<LifetimeRow>,
    pub regime: RegimeSummary,
    pub events: Vec<LogEntry>,
}

/// `(k, 1/k, τ_k)` for the scenario's grid, from the analytic lifetimes.
pub fn lifetime_table(config: &ScenarioConfig) -> Result<Vec<LifetimeRow>, RunError> {
    let setup = at(None);
    let grid = config.mode_grid().map_err(&setup)?;
    let damping = effective_damping(config).map_err(&setup)?;
    let schedule = config.frequency_schedule().map_err(&setup)?;
    let profile = lifetime_profile(&grid, damping, schedule, LifetimeBackend::Analytic).map_err(&setup)?;
    grid.momenta()
        .iter()
        .zip(profile.lifetimes())
        .map(|(&k, &tau)| {
            Ok(LifetimeRow {
                k,
                domain_size: domain_size(k).map_err(&setup)?,
                tau: tau.is_finite().then_some(tau),
            })
        })
        .collect()
}

// Without dissipation the damping term plays no part.
fn effective_damping(config: &ScenarioConfig) -> Result<Damping, vacmem_core::Error> {
    if config.dissipative {
        config.damping()
    } else {
        Ok(Damping::NONE)
    }
}

fn sample_times(config: &ScenarioConfig) -> Vec<f64> {
    let n = (config.horizon / config.sample_dt + 1e-9).floor() as usize;
    let mut times: Vec<f64> = (0..=n).map(|i| i as f64 * config.sample_dt).collect();
    let last = *times.last().unwrap();
    if config.horizon - last > 1e-9 * config.horizon.max(1.0) {
        times.push(config.horizon);
    } else {
        *times.last_mut().unwrap() = config.horizon;
    }
    times
}

fn same_time(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

struct Runner {
    bank: MemoryBank,
    damping: Damping,
    samples: Vec<TimeSeriesRecord>,
    log: Vec<LogEntry>,
    perturb_threshold: f64,
}

impl Runner {
    fn push_bank_events(&mut self, events: Vec<BankEvent>, event_index: Option<usize>) {
        for e in events {
            let (t, kind) = match e {
                BankEvent::Recorded { code_id, t } => (t, LogKind::Recorded { code_id }),
                BankEvent::Overprinted { destroyed, by, t } => (t, LogKind::Overprint { destroyed, by }),
                BankEvent::Forgotten { code_id, t } => (t, LogKind::Forgotten { code_id }),
            };
            self.log.push(LogEntry { t, event_index, kind });
        }
    }

    fn sample(&mut self, t: f64) -> Result<(), RunError> {
        if self.samples.last().is_some_and(|s| same_time(s.t, t)) {
            return Ok(());
        }
        let report = regime_report(self.bank.grid(), self.damping, self.bank.schedule(), t).map_err(at(None))?;
        let memories = self
            .bank
            .states()
            .iter()
            .map(|s| MemoryRecord {
                code_id: s.id().into(),
                occupations: s.current().occupations().to_vec(),
                entropy: entropy(s.current()),
                status: match s.status() {
                    MemoryStatus::Alive => Status::Alive,
                    MemoryStatus::Forgotten => Status::Forgotten,
                },
            })
            .collect();
        self.samples.push(TimeSeriesRecord {
            t,
            memories,
            alive_count: self.bank.alive_count(),
            overdamped_mode_count: report.overdamped_count,
        });
        Ok(())
    }

    fn apply(&mut self, index: usize, t: f64, event: &Event) -> Result<(), RunError> {
        let here = Some(index);
        let err = at(here);
        match event {
            Event::Record { code_id, code } => {
                let code = MemoryCode::new(code_id.as_str(), code.clone(), t).map_err(&err)?;
                let events = self.bank.record(code, t).map_err(&err)?;
                self.push_bank_events(events, here);
            }
            Event::Stimulus { address, energy } => {
                let address = MemoryCode::new("stimulus", address.clone(), t).map_err(&err)?;
                let stimulus = Stimulus::new(address, *energy).map_err(&err)?;
                let result = self.bank.recall(&stimulus, t).map_err(&err)?;
                let (outcome, code_ids, overlap) = match result {
                    RecallResult::Recalled { code_id, overlap } => ("recalled", vec![code_id], Some(overlap)),
                    RecallResult::BelowEnergyThreshold => ("below_energy_threshold", vec![], None),
                    RecallResult::NoMatch { best_overlap } => ("no_match", vec![], Some(best_overlap)),
                    RecallResult::TargetForgotten { code_id } => ("target_forgotten", vec![code_id], None),
                    RecallResult::ContinuousFlow { code_ids } => ("continuous_flow", code_ids, None),
                };
                self.log.push(LogEntry {
                    t,
                    event_index: here,
                    kind: LogKind::Recall {
                        outcome: outcome.into(),
                        code_ids,
                        overlap,
                    },
                });
            }
            Event::Perturb { amplitude, seed } => {
                let applied = *amplitude >= self.perturb_threshold && *amplitude > 0.0;
                let events = self.bank.perturb(*amplitude, self.perturb_threshold, *seed);
                self.log.push(LogEntry {
                    t,
                    event_index: here,
                    kind: LogKind::Perturbed {
                        amplitude: *amplitude,
                        seed: *seed,
                        applied,
                    },
                });
                self.push_bank_events(events, here);
            }
            Event::Refresh { code_id } => {
                self.bank.refresh(code_id).map_err(&err)?;
                self.log.push(LogEntry {
                    t,
                    event_index: here,
                    kind: LogKind::Refreshed {
                        code_id: code_id.clone(),
                    },
                });
            }
            Event::Associate { code_id, max_hops } => {
                let path = self.bank.associate(code_id, *max_hops).map_err(&err)?;
                if path.confusion_warning {
                    self.log.push(LogEntry {
                        t,
                        event_index: here,
                        kind: LogKind::ConfusionWarning { start: code_id.clone() },
                    });
                }
                self.log.push(LogEntry {
                    t,
                    event_index: here,
                    kind: LogKind::Association { path: path.path },
                });
            }
            Event::Sample => self.sample(t)?,
        }
        Ok(())
    }
}

/// Runs the timeline. At every stop the bank is first evolved to that time,
/// then the events stamped with it are applied in file order, then the
/// sample is taken.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunResults, RunError> {
    let setup = at(None);
    let bank = config.empty_bank().map_err(&setup)?;
    let damping = effective_damping(config).map_err(&setup)?;
    let mut runner = Runner {
        bank,
        damping,
        samples: Vec::new(),
        log: Vec::new(),
        perturb_threshold: config.thresholds.perturb_threshold,
    };

    let grid_times = sample_times(config);
    let events = &config.events;
    let (mut ei, mut si) = (0, 0);
    while ei < events.len() || si < grid_times.len() {
        let next_event = events.get(ei).map(|e| e.t);
        let next_sample = grid_times.get(si).copied();
        let t = match (next_event, next_sample) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => unreachable!(),
        };
        let freed = runner.bank.advance_to(t.max(runner.bank.clock())).map_err(&setup)?;
        runner.push_bank_events(freed, None);

        while let Some(e) = events.get(ei).filter(|e| same_time(e.t, t)) {
            runner.apply(ei, t, &e.event)?;
            ei += 1;
        }
        if next_sample.is_some_and(|s| same_time(s, t)) {
            runner.sample(t)?;
            si += 1;
        }
    }

    let regime = regime_report(runner.bank.grid(), damping, runner.bank.schedule(), config.horizon).map_err(&setup)?;

    Ok(RunResults {
        mode_count: runner.bank.grid().mode_count(),
        samples: runner.samples,
        lifetimes: lifetime_table(config)?,
        regime: regime.into(),
        events: runner.log,
    })
}
