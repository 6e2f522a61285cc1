//! Momentum grid, mode frequencies and the frequency/dissipation competition.
//!
//! Natural units throughout (ħ = c = 1), so a mode of momentum `k` starts with
//! frequency `k` and is localized in a domain of size `1/k`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Finite set of strictly positive, strictly increasing momenta in a box of
/// size `volume`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGrid {
    volume: f64,
    momenta: Vec<f64>,
}

impl ModeGrid {
    /// Uniform box lattice `k_i = 2π·i/L`, `i = 1..=mode_count`.
    pub fn new(volume: f64, mode_count: usize) -> Result<Self> {
        if !(volume > 0.0) || !volume.is_finite() {
            return Err(Error::NonPositiveVolume(volume));
        }
        if mode_count == 0 {
            return Err(Error::ZeroModeCount);
        }
        let momenta = (1..=mode_count).map(|i| 2.0 * PI * i as f64 / volume).collect();
        Ok(Self { volume, momenta })
    }

    /// Grid with explicitly chosen momenta, used for scenarios that probe
    /// specific modes rather than a box lattice.
    pub fn from_momenta(volume: f64, momenta: Vec<f64>) -> Result<Self> {
        if !(volume > 0.0) || !volume.is_finite() {
            return Err(Error::NonPositiveVolume(volume));
        }
        if momenta.is_empty() {
            return Err(Error::ZeroModeCount);
        }
        if let Some(&k) = momenta.iter().find(|k| !(**k > 0.0) || !k.is_finite()) {
            return Err(Error::NonPositiveMomentum(k));
        }
        if momenta.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::UnsortedMomenta);
        }
        Ok(Self { volume, momenta })
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn mode_count(&self) -> usize {
        self.momenta.len()
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    /// Domain size `1/k` of every mode, in grid order (so decreasing).
    pub fn domain_sizes(&self) -> Vec<f64> {
        self.momenta.iter().map(|k| 1.0 / k).collect()
    }
}

/// Time dependence of the mode frequency `Ω_k(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrequencySchedule {
    /// `Ω_k(t) = k`.
    Constant,
    /// `Ω_k(t) = k·exp(−t/T)`.
    ExpDecay { time_constant: f64 },
}

impl FrequencySchedule {
    pub fn exp_decay(time_constant: f64) -> Result<Self> {
        if !(time_constant > 0.0) || !time_constant.is_finite() {
            return Err(Error::NonPositiveTimeConstant(time_constant));
        }
        Ok(Self::ExpDecay { time_constant })
    }
}

/// Damping rate Γ of the mode equation. Zero means the non-dissipative regime.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Damping(f64);

impl Damping {
    pub const NONE: Damping = Damping(0.0);

    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::NegativeDamping(gamma));
        }
        Ok(Self(gamma))
    }

    pub fn gamma(self) -> f64 {
        self.0
    }

    pub fn is_dissipative(self) -> bool {
        self.0 > 0.0
    }
}

pub fn domain_size(k: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::NonPositiveMomentum(k));
    }
    Ok(1.0 / k)
}

/// Instantaneous frequency of mode `k` at time `t`. `t = +∞` is accepted and
/// gives the asymptotic frequency.
pub fn frequency_at(schedule: FrequencySchedule, k: f64, t: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::NonPositiveMomentum(k));
    }
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    Ok(match schedule {
        FrequencySchedule::Constant => k,
        FrequencySchedule::ExpDecay { time_constant } => k * libm::exp(-t / time_constant),
    })
}

/// `ρ = Γ/(2Ω)`: above 1 the dissipative term dominates (overdamped), below 1
/// the frequency term does.
pub fn competition_ratio(damping: Damping, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::NonPositiveFrequency(omega));
    }
    Ok(damping.gamma() / (2.0 * omega))
}
