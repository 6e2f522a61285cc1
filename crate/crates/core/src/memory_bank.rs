//! Registry of recorded memories.
//!
//! A dissipative bank lets any number of code vacua coexist. A
//! non-dissipative bank holds a single accessible vacuum, so every new
//! recording overprints the previous one. Recall is gated by the
//! finite-size effective mass and by how well the stimulus address overlaps
//! a stored condensate.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::condensate::{overlap, MemoryCode};
use crate::dynamics::{lifetime_profile, LifetimeBackend, LifetimeProfile, MemoryState};
use crate::error::{Error, Result};
use crate::spectrum::{Damping, FrequencySchedule, ModeGrid};
use crate::{DEFAULT_ASSOC_THRESHOLD, DEFAULT_EPSILON_FORGET, DEFAULT_MATCH_THRESHOLD};

/// Recall energy threshold induced by a box of size `volume`: `π/L`.
pub fn effective_mass(volume: f64) -> Result<f64> {
    if !(volume > 0.0) {
        return Err(Error::NonPositiveVolume(volume));
    }
    Ok(PI / volume)
}

/// Thresholds and regime switches of a bank.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BankParams {
    pub dissipative: bool,
    /// Minimum stimulus energy for recall. Zero puts the bank in the
    /// continuous-flow regime.
    pub m_eff: f64,
    pub match_threshold: f64,
    pub assoc_threshold: f64,
    pub epsilon_forget: f64,
}

impl BankParams {
    /// Default thresholds with `m_eff` from the grid volume.
    pub fn for_grid(grid: &ModeGrid, dissipative: bool) -> Self {
        Self {
            dissipative,
            m_eff: PI / grid.volume(),
            match_threshold: DEFAULT_MATCH_THRESHOLD,
            assoc_threshold: DEFAULT_ASSOC_THRESHOLD,
            epsilon_forget: DEFAULT_EPSILON_FORGET,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |name, reason| Err(Error::InvalidParameter { name, reason });
        if !(self.m_eff >= 0.0) || !self.m_eff.is_finite() {
            return bad("m_eff", "must be finite and >= 0");
        }
        if !(self.match_threshold > 0.0 && self.match_threshold <= 1.0) {
            return bad("match_threshold", "must lie in (0, 1]");
        }
        if !(self.assoc_threshold >= 0.0 && self.assoc_threshold < 1.0) {
            return bad("assoc_threshold", "must lie in [0, 1)");
        }
        if self.match_threshold <= self.assoc_threshold {
            return bad("match_threshold", "must exceed assoc_threshold");
        }
        if !(self.epsilon_forget > 0.0) {
            return bad("epsilon_forget", "must be positive");
        }
        Ok(())
    }

    pub fn continuous_flow(&self) -> bool {
        self.m_eff == 0.0
    }
}

/// Replication signal: a tilde-mode pattern addressing a stored code.
#[derive(Debug, Clone, PartialEq)]
pub struct Stimulus {
    pub address: MemoryCode,
    pub energy: f64,
}

impl Stimulus {
    pub fn new(address: MemoryCode, energy: f64) -> Result<Self> {
        if !(energy >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "energy",
                reason: "stimulus energy must be >= 0",
            });
        }
        Ok(Self { address, energy })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RecallResult {
    Recalled { code_id: String, overlap: f64 },
    BelowEnergyThreshold,
    NoMatch { best_overlap: f64 },
    TargetForgotten { code_id: String },
    ContinuousFlow { code_ids: Vec<String> },
}

impl RecallResult {
    pub fn is_recalled(&self) -> bool {
        matches!(self, RecallResult::Recalled { .. })
    }
}

/// Things a bank mutation did, in order.
#[derive(Debug, Clone, PartialEq)]
pub enum BankEvent {
    Recorded { code_id: String, t: f64 },
    Overprinted { destroyed: String, by: String, t: f64 },
    Forgotten { code_id: String, t: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssociationPath {
    pub path: Vec<String>,
    /// Set when the association threshold is zero and every pair of memories
    /// is linked.
    pub confusion_warning: bool,
}

#[derive(Debug, Clone)]
pub struct MemoryBank {
    grid: ModeGrid,
    damping: Damping,
    schedule: FrequencySchedule,
    profile: LifetimeProfile,
    params: BankParams,
    states: Vec<MemoryState>,
    clock: f64,
    overprint_count: usize,
}

impl MemoryBank {
    pub fn new(grid: ModeGrid, damping: Damping, schedule: FrequencySchedule, params: BankParams) -> Result<Self> {
        params.validate()?;
        let profile = if params.dissipative {
            lifetime_profile(&grid, damping, schedule, LifetimeBackend::Analytic)?
        } else {
            LifetimeProfile::infinite(grid.mode_count())
        };
        Ok(Self {
            grid,
            damping,
            schedule,
            profile,
            params,
            states: Vec::new(),
            clock: 0.0,
            overprint_count: 0,
        })
    }

    pub fn grid(&self) -> &ModeGrid {
        &self.grid
    }

    pub fn damping(&self) -> Damping {
        self.damping
    }

    pub fn schedule(&self) -> FrequencySchedule {
        self.schedule
    }

    pub fn params(&self) -> &BankParams {
        &self.params
    }

    pub fn profile(&self) -> &LifetimeProfile {
        &self.profile
    }

    pub fn states(&self) -> &[MemoryState] {
        &self.states
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn overprint_count(&self) -> usize {
        self.overprint_count
    }

    pub fn alive_count(&self) -> usize {
        self.states.iter().filter(|s| s.is_alive()).count()
    }

    pub fn get(&self, code_id: &str) -> Option<&MemoryState> {
        self.states.iter().find(|s| s.id() == code_id)
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(t >= self.clock) {
            return Err(Error::ClockRegression {
                clock: self.clock,
                requested: t,
            });
        }
        Ok(())
    }

    /// Evolves every memory up to `t`, reporting memories that were forgotten
    /// on the way.
    pub fn advance_to(&mut self, t: f64) -> Result<Vec<BankEvent>> {
        self.check_time(t)?;
        let dt = t - self.clock;
        let mut events = Vec::new();
        if dt > 0.0 {
            for state in &mut self.states {
                let next = state.evolve(dt, &self.profile, self.params.epsilon_forget)?;
                if state.is_alive() && !next.is_alive() {
                    events.push(BankEvent::Forgotten {
                        code_id: next.id().into(),
                        t,
                    });
                }
                *state = next;
            }
        }
        self.clock = t;
        Ok(events)
    }

    pub fn record(&mut self, code: MemoryCode, t: f64) -> Result<Vec<BankEvent>> {
        self.check_time(t)?;
        code.check_grid(&self.grid)?;
        let id = String::from(code.id());
        let dissipative = self.params.dissipative;
        if self
            .states
            .iter()
            .any(|s| s.id() == id && (dissipative || !s.is_alive()))
        {
            return Err(Error::DuplicateCode(id));
        }
        let mut events = self.advance_to(t)?;
        let code = code.with_recorded_at(t);

        if !self.params.dissipative {
            let (alive, rest): (Vec<_>, Vec<_>) = self.states.drain(..).partition(MemoryState::is_alive);
            self.states = rest;
            for old in alive {
                self.overprint_count += 1;
                events.push(BankEvent::Overprinted {
                    destroyed: old.id().into(),
                    by: id.clone(),
                    t,
                });
            }
        }
        let state = MemoryState::new(code, self.params.epsilon_forget);
        let born_empty = !state.is_alive();
        self.states.push(state);
        events.push(BankEvent::Recorded { code_id: id.clone(), t });
        if born_empty {
            events.push(BankEvent::Forgotten { code_id: id, t });
        }
        Ok(events)
    }

    /// Matches a stimulus against the bank as it stands at time `t`. The bank
    /// itself is not modified.
    pub fn recall(&self, stimulus: &Stimulus, t: f64) -> Result<RecallResult> {
        self.check_time(t)?;
        stimulus.address.check_grid(&self.grid)?;
        if t > self.clock {
            let mut later = self.clone();
            later.advance_to(t)?;
            return later.recall(stimulus, t);
        }

        if self.params.continuous_flow() {
            let mut code_ids = Vec::new();
            for s in self.states.iter().filter(|s| s.is_alive()) {
                if overlap(&stimulus.address, s.current())? > self.params.assoc_threshold {
                    code_ids.push(s.id().into());
                }
            }
            return Ok(RecallResult::ContinuousFlow { code_ids });
        }
        if stimulus.energy < self.params.m_eff {
            return Ok(RecallResult::BelowEnergyThreshold);
        }

        let mut best_alive: Option<(f64, &MemoryState)> = None;
        let mut best_forgotten: Option<(f64, &MemoryState)> = None;
        for s in &self.states {
            // Forgotten memories are matched on the code they used to hold.
            let (o, slot) = if s.is_alive() {
                (overlap(&stimulus.address, s.current())?, &mut best_alive)
            } else {
                (overlap(&stimulus.address, s.code0())?, &mut best_forgotten)
            };
            if slot.is_none_or(|(b, _)| o > b) {
                *slot = Some((o, s));
            }
        }
        let threshold = self.params.match_threshold;
        Ok(match (best_alive, best_forgotten) {
            (Some((o, s)), _) if o >= threshold => RecallResult::Recalled {
                code_id: s.id().into(),
                overlap: o,
            },
            (_, Some((o, s))) if o >= threshold => RecallResult::TargetForgotten { code_id: s.id().into() },
            (alive, _) => RecallResult::NoMatch {
                best_overlap: alive.map_or(0.0, |(o, _)| o),
            },
        })
    }

    /// Greedy walk through memories linked by overlap above the association
    /// threshold.
    pub fn associate(&self, start: &str, max_hops: usize) -> Result<AssociationPath> {
        let start_state = self.get(start).ok_or_else(|| Error::UnknownCode(start.into()))?;
        if !start_state.is_alive() {
            return Err(Error::StartForgotten(start.into()));
        }
        let alive: Vec<&MemoryState> = self.states.iter().filter(|s| s.is_alive()).collect();
        let n = alive.len();
        let mut overlaps = vec![vec![1.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let o = overlap(alive[i].current(), alive[j].current())?;
                overlaps[i][j] = o;
                overlaps[j][i] = o;
            }
        }
        // `states` is kept in recording order, so index order is the tie-break.
        let start_idx = alive.iter().position(|s| s.id() == start).unwrap();
        let walk = greedy_walk(&overlaps, self.params.assoc_threshold, start_idx, max_hops);
        Ok(AssociationPath {
            path: walk.into_iter().map(|i| alive[i].id().into()).collect(),
            confusion_warning: self.params.assoc_threshold == 0.0,
        })
    }

    /// Multiplicative noise `N_k ← N_k(1 + amplitude·ξ_k)`, `ξ_k ~ U[−1, 1]`,
    /// on every alive memory. Below `threshold` nothing happens.
    pub fn perturb(&mut self, amplitude: f64, threshold: f64, seed: u64) -> Vec<BankEvent> {
        let mut events = Vec::new();
        if !(amplitude >= threshold) || amplitude == 0.0 {
            return events;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for state in self.states.iter_mut().filter(|s| s.is_alive()) {
            let noisy = state
                .current()
                .occupations()
                .iter()
                .map(|&n| {
                    let xi: f64 = rng.gen_range(-1.0..=1.0);
                    (n * (1.0 + amplitude * xi)).max(0.0)
                })
                .collect();
            *state = state.with_current(noisy, self.params.epsilon_forget);
            if !state.is_alive() {
                events.push(BankEvent::Forgotten {
                    code_id: state.id().into(),
                    t: self.clock,
                });
            }
        }
        events
    }

    pub fn refresh(&mut self, code_id: &str) -> Result<()> {
        let state = self
            .states
            .iter_mut()
            .find(|s| s.id() == code_id)
            .ok_or_else(|| Error::UnknownCode(code_id.into()))?;
        *state = state.refresh()?;
        Ok(())
    }
}

/// Walks from `start`, at each hop moving to the unvisited node of largest
/// overlap at or above `threshold`. Ties go to the lower index. Returns the
/// visited nodes, at most `max_hops + 1` of them.
pub fn greedy_walk(overlaps: &[Vec<f64>], threshold: f64, start: usize, max_hops: usize) -> Vec<usize> {
    let n = overlaps.len();
    let mut visited = vec![false; n];
    let mut path = vec![start];
    visited[start] = true;
    let mut here = start;
    while path.len() <= max_hops {
        let mut next: Option<usize> = None;
        for j in 0..n {
            if visited[j] || overlaps[here][j] < threshold {
                continue;
            }
            if next.is_none_or(|b| overlaps[here][j] > overlaps[here][b]) {
                next = Some(j);
            }
        }
        match next {
            Some(j) => {
                visited[j] = true;
                path.push(j);
                here = j;
            }
            None => break,
        }
    }
    path
}
