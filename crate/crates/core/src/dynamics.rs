//! Irreversible evolution of recorded memories.
//!
//! A mode's lifetime is the time at which its instantaneous frequency falls
//! to `Γ/2`, where the damped mode equation `ü + Γu̇ + Ω_k(t)²u = 0` turns
//! overdamped. Condensate occupations decay exponentially with that lifetime.

use alloc::vec::Vec;

use crate::condensate::{balance_residual, MemoryCode};
use crate::error::{Error, Result};
use crate::spectrum::{domain_size, frequency_at, Damping, FrequencySchedule, ModeGrid};

const BISECTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LifetimeBackend {
    /// Closed-form crossing time.
    Analytic,
    /// Bisection on `Ω_k(t) − Γ/2`.
    Numeric,
}

/// Per-mode lifetimes `τ_k`. `f64::INFINITY` marks modes that never decay.
#[derive(Debug, Clone, PartialEq)]
pub struct LifetimeProfile {
    lifetimes: Vec<f64>,
    backend: LifetimeBackend,
}

impl LifetimeProfile {
    /// Every mode lives forever (non-dissipative regime).
    pub fn infinite(modes: usize) -> Self {
        Self {
            lifetimes: alloc::vec![f64::INFINITY; modes],
            backend: LifetimeBackend::Analytic,
        }
    }

    pub fn lifetimes(&self) -> &[f64] {
        &self.lifetimes
    }

    pub fn backend(&self) -> LifetimeBackend {
        self.backend
    }

    pub fn len(&self) -> usize {
        self.lifetimes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lifetimes.is_empty()
    }

    pub fn all_finite(&self) -> bool {
        self.lifetimes.iter().all(|t| t.is_finite())
    }
}

pub fn lifetime_profile(
    grid: &ModeGrid,
    damping: Damping,
    schedule: FrequencySchedule,
    backend: LifetimeBackend,
) -> Result<LifetimeProfile> {
    let half_gamma = damping.gamma() / 2.0;
    let lifetimes = match backend {
        LifetimeBackend::Analytic => grid
            .momenta()
            .iter()
            .map(|&k| analytic_lifetime(k, half_gamma, schedule))
            .collect(),
        LifetimeBackend::Numeric => {
            if !damping.is_dissipative() {
                return Err(Error::ZeroDampingFiniteLifetime);
            }
            grid.momenta()
                .iter()
                .map(|&k| bisect_lifetime(k, half_gamma, schedule))
                .collect::<Result<Vec<f64>>>()?
        }
    };
    Ok(LifetimeProfile { lifetimes, backend })
}

fn analytic_lifetime(k: f64, half_gamma: f64, schedule: FrequencySchedule) -> f64 {
    if half_gamma == 0.0 {
        return f64::INFINITY;
    }
    if k <= half_gamma {
        return 0.0;
    }
    match schedule {
        FrequencySchedule::Constant => f64::INFINITY,
        FrequencySchedule::ExpDecay { time_constant } => time_constant * libm::log(k / half_gamma),
    }
}

fn bisect_lifetime(k: f64, half_gamma: f64, schedule: FrequencySchedule) -> Result<f64> {
    let excess = |t: f64| frequency_at(schedule, k, t).map(|w| w - half_gamma);
    if excess(0.0)? <= 0.0 {
        return Ok(0.0);
    }
    if let FrequencySchedule::Constant = schedule {
        return Ok(f64::INFINITY);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while excess(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Ok(f64::INFINITY);
        }
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if excess(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Sampled solution of the damped mode equation.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeTrajectory {
    pub times: Vec<f64>,
    pub u: Vec<f64>,
    pub u_dot: Vec<f64>,
}

impl ModeTrajectory {
    pub fn final_state(&self) -> (f64, f64, f64) {
        let i = self.times.len() - 1;
        (self.times[i], self.u[i], self.u_dot[i])
    }
}

/// Integrates `ü + Γu̇ + Ω_k(t)²u = 0` from `(u0, v0)` with classic RK4. The
/// last step is shortened to land exactly on `t_end`.
#[allow(clippy::too_many_arguments)]
pub fn solve_dwq(
    k: f64,
    damping: Damping,
    schedule: FrequencySchedule,
    t_end: f64,
    dt: f64,
    u0: f64,
    v0: f64,
) -> Result<ModeTrajectory> {
    if !(dt > 0.0) {
        return Err(Error::NonPositiveStep(dt));
    }
    if !(t_end > 0.0) {
        return Err(Error::NonPositiveHorizon(t_end));
    }
    // validates k
    frequency_at(schedule, k, 0.0)?;

    let gamma = damping.gamma();
    let accel = |t: f64, u: f64, v: f64| {
        let w = frequency_at(schedule, k, t).unwrap_or(0.0);
        -gamma * v - w * w * u
    };

    let steps = libm::ceil(t_end / dt - 1e-9).max(1.0) as usize;
    let mut traj = ModeTrajectory {
        times: Vec::with_capacity(steps + 1),
        u: Vec::with_capacity(steps + 1),
        u_dot: Vec::with_capacity(steps + 1),
    };
    let (mut t, mut u, mut v) = (0.0, u0, v0);
    traj.times.push(t);
    traj.u.push(u);
    traj.u_dot.push(v);
    for i in 0..steps {
        let t_next = if i + 1 == steps { t_end } else { (i + 1) as f64 * dt };
        let h = t_next - t;
        let k1u = v;
        let k1v = accel(t, u, v);
        let k2u = v + 0.5 * h * k1v;
        let k2v = accel(t + 0.5 * h, u + 0.5 * h * k1u, k2u);
        let k3u = v + 0.5 * h * k2v;
        let k3v = accel(t + 0.5 * h, u + 0.5 * h * k2u, k3u);
        let k4u = v + h * k3v;
        let k4v = accel(t + h, u + h * k3u, k4u);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        t = t_next;
        traj.times.push(t);
        traj.u.push(u);
        traj.u_dot.push(v);
    }
    Ok(traj)
}

/// Default integrator step for a grid: a two-hundredth of the shortest
/// initial period.
pub fn default_integrator_step(grid: &ModeGrid) -> f64 {
    let k_max = grid.momenta()[grid.mode_count() - 1];
    2.0 * core::f64::consts::PI / k_max / 200.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemoryStatus {
    Alive,
    Forgotten,
}

/// A recorded memory: its code at recording time and its current condensate.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryState {
    code0: MemoryCode,
    current: MemoryCode,
    t: f64,
    status: MemoryStatus,
}

impl MemoryState {
    /// Starts a memory at the code's recording time.
    pub fn new(code: MemoryCode, epsilon_forget: f64) -> Self {
        let state = Self {
            t: code.recorded_at(),
            current: code.clone(),
            code0: code,
            status: MemoryStatus::Alive,
        };
        if state.is_forgotten(epsilon_forget) {
            state.forget()
        } else {
            state
        }
    }

    pub fn code0(&self) -> &MemoryCode {
        &self.code0
    }

    pub fn current(&self) -> &MemoryCode {
        &self.current
    }

    pub fn id(&self) -> &str {
        self.code0.id()
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn status(&self) -> MemoryStatus {
        self.status
    }

    pub fn is_alive(&self) -> bool {
        self.status == MemoryStatus::Alive
    }

    /// Advances the memory by `dt`, decaying each mode by `exp(−dt/τ_k)`.
    /// Modes with `τ_k = 0` drop to zero, modes with `τ_k = ∞` are untouched.
    pub fn evolve(&self, dt: f64, profile: &LifetimeProfile, epsilon_forget: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::NonPositiveTimeStep(dt));
        }
        if profile.len() != self.current.mode_count() {
            return Err(Error::GridMismatch {
                expected: self.current.mode_count(),
                found: profile.len(),
            });
        }
        let t = self.t + dt;
        if self.status == MemoryStatus::Forgotten {
            return Ok(Self { t, ..self.clone() });
        }
        let occupations = self
            .current
            .occupations()
            .iter()
            .zip(profile.lifetimes())
            .map(|(&n, &tau)| decay(n, dt, tau))
            .collect();
        let next = Self {
            t,
            current: self.current.with_occupations(occupations),
            ..self.clone()
        };
        debug_assert_eq!(balance_residual(&next.current).max_abs_residual, 0.0);
        Ok(if next.is_forgotten(epsilon_forget) {
            next.forget()
        } else {
            next
        })
    }

    pub fn is_forgotten(&self, epsilon_forget: f64) -> bool {
        self.current.max_occupation() < epsilon_forget
    }

    /// Collapses the memory to the empty vacuum.
    pub fn forget(&self) -> Self {
        Self {
            current: self
                .current
                .with_occupations(alloc::vec![0.0; self.current.mode_count()]),
            status: MemoryStatus::Forgotten,
            ..self.clone()
        }
    }

    /// Restores the recorded code without rewinding the clock.
    pub fn refresh(&self) -> Result<Self> {
        if self.status == MemoryStatus::Forgotten {
            return Err(Error::RefreshForgotten(self.id().into()));
        }
        Ok(Self {
            current: self.code0.clone(),
            ..self.clone()
        })
    }

    pub(crate) fn with_current(&self, occupations: Vec<f64>, epsilon_forget: f64) -> Self {
        let next = Self {
            current: self.current.with_occupations(occupations),
            ..self.clone()
        };
        if next.is_forgotten(epsilon_forget) {
            next.forget()
        } else {
            next
        }
    }
}

fn decay(n: f64, dt: f64, tau: f64) -> f64 {
    if tau == f64::INFINITY {
        n
    } else if tau <= 0.0 {
        0.0
    } else {
        n * libm::exp(-dt / tau)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeRegime {
    pub k: f64,
    pub domain_size: f64,
    pub omega: f64,
    /// `Γ/(2Ω)`; infinite once the frequency has vanished.
    pub ratio: f64,
    pub overdamped: bool,
}

/// Which modes are dominated by dissipation at a given time, and which domain
/// sizes survive.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub t: f64,
    pub modes: Vec<ModeRegime>,
    pub overdamped_count: usize,
    pub underdamped_count: usize,
    /// Surviving (underdamped) fraction among the smaller half of domains.
    pub small_domain_survival: f64,
    /// Surviving fraction among the larger half of domains.
    pub large_domain_survival: f64,
    /// Mean size of the surviving domains, `None` when none survive.
    pub mean_surviving_domain_size: Option<f64>,
    pub mean_domain_size: f64,
}

pub fn regime_report(grid: &ModeGrid, damping: Damping, schedule: FrequencySchedule, t: f64) -> Result<RegimeReport> {
    let gamma = damping.gamma();
    let modes = grid
        .momenta()
        .iter()
        .map(|&k| {
            let omega = frequency_at(schedule, k, t)?;
            let ratio = if gamma == 0.0 {
                0.0
            } else if omega == 0.0 {
                f64::INFINITY
            } else {
                gamma / (2.0 * omega)
            };
            Ok(ModeRegime {
                k,
                domain_size: domain_size(k)?,
                omega,
                ratio,
                overdamped: ratio >= 1.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let overdamped_count = modes.iter().filter(|m| m.overdamped).count();
    let m = modes.len();
    // Grid order is increasing k, so the back half holds the small domains.
    let half = m / 2;
    let survival = |slice: &[ModeRegime]| {
        if slice.is_empty() {
            0.0
        } else {
            slice.iter().filter(|r| !r.overdamped).count() as f64 / slice.len() as f64
        }
    };
    let (large, small) = modes.split_at(half);
    let surviving: Vec<f64> = modes.iter().filter(|r| !r.overdamped).map(|r| r.domain_size).collect();
    let mean_surviving_domain_size = if surviving.is_empty() {
        None
    } else {
        Some(surviving.iter().sum::<f64>() / surviving.len() as f64)
    };
    let mean_domain_size = modes.iter().map(|r| r.domain_size).sum::<f64>() / m as f64;

    Ok(RegimeReport {
        t,
        small_domain_survival: survival(small),
        large_domain_survival: survival(if large.is_empty() { small } else { large }),
        overdamped_count,
        underdamped_count: m - overdamped_count,
        modes,
        mean_surviving_domain_size,
        mean_domain_size,
    })
}
