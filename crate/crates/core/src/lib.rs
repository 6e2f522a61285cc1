//! Engine for memories stored as code-labeled condensate vacua.
//!
//! Every information is recorded as a per-mode two-mode squeezed vacuum over a
//! finite momentum grid. Dissipation gives each mode a finite lifetime derived
//! from a damped, time-dependent-frequency mode equation, so memories decay,
//! can be refreshed, and eventually collapse to the empty vacuum.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, scenario running and
//! the command line live in the `vacmem` crate.

#![no_std]
#![warn(missing_debug_implementations, rust_2018_idioms)]
// `!(x > 0.0)` is the NaN-rejecting form of every range check here.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod condensate;
pub mod dynamics;
mod error;
pub mod fock_oracle;
pub mod linalg;
pub mod memory_bank;
pub mod spectrum;

pub use condensate::{
    balance_residual, code_to_squeeze, entropy, log_overlap, overlap, squeeze_to_code, thermal_code, BalanceReport,
    MemoryCode, SqueezeVector,
};
pub use dynamics::{
    lifetime_profile, regime_report, solve_dwq, LifetimeBackend, LifetimeProfile, MemoryState, MemoryStatus,
    ModeRegime, ModeTrajectory, RegimeReport,
};
pub use error::{Error, Result};
pub use memory_bank::{
    effective_mass, greedy_walk, AssociationPath, BankEvent, BankParams, MemoryBank, RecallResult, Stimulus,
};
pub use spectrum::{competition_ratio, domain_size, frequency_at, Damping, FrequencySchedule, ModeGrid};

/// Forgetting threshold used when none is configured.
pub const DEFAULT_EPSILON_FORGET: f64 = 1e-6;
/// Minimum overlap for a stimulus address to recall a memory.
pub const DEFAULT_MATCH_THRESHOLD: f64 = 0.9;
/// Minimum overlap for two memories to be linked by association.
pub const DEFAULT_ASSOC_THRESHOLD: f64 = 0.3;
