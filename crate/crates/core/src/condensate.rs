//! Code-labeled condensate vacua.
//!
//! A memory code is the full vector of per-mode condensate occupations
//! `{N_k}`. Each mode is realized as a two-mode squeezed vacuum of the mode
//! and its tilde partner, `exp(θ(A†Ã† − AÃ))|0,0⟩`, which creates quanta only
//! in pairs: both members carry `sinh²θ`, so the tilde/non-tilde balance holds
//! by construction.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::spectrum::{frequency_at, FrequencySchedule, ModeGrid};

/// Per-mode occupations labeling a vacuum, plus the identifier and recording
/// time of the information it encodes.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryCode {
    id: String,
    occupations: Vec<f64>,
    recorded_at: f64,
}

impl MemoryCode {
    pub fn new(id: impl Into<String>, occupations: Vec<f64>, recorded_at: f64) -> Result<Self> {
        check_occupations(&occupations)?;
        if !(recorded_at >= 0.0) {
            return Err(Error::NegativeTime(recorded_at));
        }
        Ok(Self {
            id: id.into(),
            occupations,
            recorded_at,
        })
    }

    /// The empty vacuum `|0⟩₀` on `modes` modes.
    pub fn empty(id: impl Into<String>, modes: usize, recorded_at: f64) -> Self {
        Self {
            id: id.into(),
            occupations: alloc::vec![0.0; modes],
            recorded_at,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn occupations(&self) -> &[f64] {
        &self.occupations
    }

    pub fn recorded_at(&self) -> f64 {
        self.recorded_at
    }

    pub fn mode_count(&self) -> usize {
        self.occupations.len()
    }

    pub fn max_occupation(&self) -> f64 {
        self.occupations.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_empty_vacuum(&self) -> bool {
        self.occupations.iter().all(|n| *n == 0.0)
    }

    pub(crate) fn with_occupations(&self, occupations: Vec<f64>) -> Self {
        debug_assert_eq!(occupations.len(), self.occupations.len());
        Self {
            id: self.id.clone(),
            occupations,
            recorded_at: self.recorded_at,
        }
    }

    pub(crate) fn with_recorded_at(mut self, t: f64) -> Self {
        self.recorded_at = t;
        self
    }

    pub(crate) fn check_grid(&self, grid: &ModeGrid) -> Result<()> {
        if self.mode_count() != grid.mode_count() {
            return Err(Error::GridMismatch {
                expected: grid.mode_count(),
                found: self.mode_count(),
            });
        }
        Ok(())
    }
}

fn check_occupations(occupations: &[f64]) -> Result<()> {
    match occupations.iter().position(|n| !(*n >= 0.0) || !n.is_finite()) {
        Some(mode) => Err(Error::NegativeOccupation {
            mode,
            value: occupations[mode],
        }),
        None => Ok(()),
    }
}

/// Per-mode squeeze parameters `θ_k ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezeVector(Vec<f64>);

impl SqueezeVector {
    pub fn new(thetas: Vec<f64>) -> Result<Self> {
        if let Some(mode) = thetas.iter().position(|t| !(*t >= 0.0) || !t.is_finite()) {
            return Err(Error::NegativeSqueeze {
                mode,
                value: thetas[mode],
            });
        }
        Ok(Self(thetas))
    }

    pub fn thetas(&self) -> &[f64] {
        &self.0
    }
}

/// Tilde/non-tilde occupation differences, one per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceReport {
    pub per_mode_residuals: Vec<f64>,
    pub max_abs_residual: f64,
}

/// `θ_k = asinh(√N_k)`.
pub fn code_to_squeeze(code: &MemoryCode) -> Result<SqueezeVector> {
    check_occupations(&code.occupations)?;
    Ok(SqueezeVector(
        code.occupations.iter().map(|n| libm::asinh(libm::sqrt(*n))).collect(),
    ))
}

/// `N_k = sinh²θ_k`.
pub fn squeeze_to_code(thetas: &SqueezeVector, id: impl Into<String>, t: f64) -> Result<MemoryCode> {
    let thetas = SqueezeVector::new(thetas.0.clone())?;
    let occupations = thetas
        .0
        .iter()
        .map(|th| {
            let s = libm::sinh(*th);
            s * s
        })
        .collect();
    MemoryCode::new(id, occupations, t)
}

/// Each mode's condensate is a pair state: the tilde partner holds exactly the
/// occupation of the non-tilde mode, so every residual is zero.
pub fn balance_residual(code: &MemoryCode) -> BalanceReport {
    let per_mode_residuals: Vec<f64> = code
        .occupations
        .iter()
        .map(|n| {
            let (plain, tilde) = pair_occupations(*n);
            plain - tilde
        })
        .collect();
    let max_abs_residual = per_mode_residuals.iter().map(|r| libm::fabs(*r)).fold(0.0, f64::max);
    BalanceReport {
        per_mode_residuals,
        max_abs_residual,
    }
}

// (N_A, N_Ã) of one squeezed pair carrying occupation `n`.
fn pair_occupations(n: f64) -> (f64, f64) {
    (n, n)
}

/// `Σ_k ln cosh(θ_k^A − θ_k^B)`, the negative log of [`overlap`].
fn log_sech_sum(a: &SqueezeVector, b: &SqueezeVector) -> f64 {
    a.0.iter().zip(&b.0).map(|(x, y)| ln_cosh(x - y)).sum()
}

fn ln_cosh(x: f64) -> f64 {
    let x = libm::fabs(x);
    x + libm::log1p(libm::exp(-2.0 * x)) - core::f64::consts::LN_2
}

/// Natural log of the vacuum overlap. Stays finite for overlaps that underflow
/// `f64`.
pub fn log_overlap(a: &MemoryCode, b: &MemoryCode) -> Result<f64> {
    if a.mode_count() != b.mode_count() {
        return Err(Error::GridMismatch {
            expected: a.mode_count(),
            found: b.mode_count(),
        });
    }
    let ta = code_to_squeeze(a)?;
    let tb = code_to_squeeze(b)?;
    Ok(-log_sech_sum(&ta, &tb))
}

/// Inner product of two code vacua, `Π_k 1/cosh(θ_k^A − θ_k^B)`.
///
/// Exactly 1 for identical codes; every mode whose squeezing differs
/// multiplies it by a factor below one, so it vanishes as modes are added.
pub fn overlap(a: &MemoryCode, b: &MemoryCode) -> Result<f64> {
    log_overlap(a, b).map(libm::exp)
}

/// Entropy of the condensate, `Σ_k (N_k+1)ln(N_k+1) − N_k ln N_k`.
pub fn entropy(code: &MemoryCode) -> f64 {
    code.occupations
        .iter()
        .map(|&n| {
            if n == 0.0 {
                0.0
            } else {
                (n + 1.0) * libm::log1p(n) - n * libm::log(n)
            }
        })
        .sum()
}

/// Bose occupations `1/(exp(βΩ_k(t)) − 1)` of a finite-temperature memory
/// state. Modes with `βΩ > 700` are reported as empty.
pub fn thermal_code(
    beta: f64,
    grid: &ModeGrid,
    schedule: FrequencySchedule,
    t: f64,
    id: impl Into<String>,
) -> Result<MemoryCode> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::NonPositiveBeta(beta));
    }
    let occupations = grid
        .momenta()
        .iter()
        .map(|&k| {
            let x = beta * frequency_at(schedule, k, t)?;
            Ok(bose(x))
        })
        .collect::<Result<Vec<f64>>>()?;
    MemoryCode::new(id, occupations, t)
}

fn bose(x: f64) -> f64 {
    if x > 700.0 {
        0.0
    } else if x <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / libm::expm1(x)
    }
}
