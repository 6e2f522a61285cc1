//! Brute-force validator for the condensate formulas.
//!
//! A single mode pair is represented in a truncated Fock basis with `D`
//! levels per member. The squeezed vacuum is built twice: from its series
//! `c_n = tanhⁿθ / coshθ` on `|n, n⟩`, and by exponentiating the pair-creation
//! generator `θ(A†Ã† − AÃ)`. Expectation values and inner products are then
//! summed directly in that basis.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::condensate::{overlap, MemoryCode};
use crate::error::{Error, Result};
use crate::linalg::{expm, Matrix};

pub const DEFAULT_DIM: usize = 64;
pub const DEFAULT_THETA_MAX: f64 = 1.2;
/// Squeeze parameters probed by [`run_suite`].
pub const SUITE_THETAS: [f64; 6] = [0.1, 0.3, 0.5, 0.8, 1.0, 1.2];

const MAX_NORM_DEFICIT: f64 = 1e-4;

/// Two-mode state truncated to `dim` levels per mode. Only paired components
/// `|n, n⟩` are stored; every other amplitude is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedState {
    dim: usize,
    theta: f64,
    coefficients: Vec<f64>,
}

impl TruncatedState {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Amplitudes on `|n, n⟩`, `n = 0..dim`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Amplitude on `|n, m⟩`.
    pub fn amplitude(&self, n: usize, m: usize) -> f64 {
        if n == m {
            self.coefficients[n]
        } else {
            0.0
        }
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.coefficients.iter().map(|c| c * c).sum())
    }
}

pub fn build_squeezed(theta: f64, dim: usize) -> Result<TruncatedState> {
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(Error::NegativeSqueeze { mode: 0, value: theta });
    }
    if dim < 2 {
        return Err(Error::InvalidParameter {
            name: "dim",
            reason: "truncation needs at least two levels",
        });
    }
    let ratio = libm::tanh(theta);
    let mut coefficients = Vec::with_capacity(dim);
    let mut c = 1.0 / libm::cosh(theta);
    for _ in 0..dim {
        coefficients.push(c);
        c *= ratio;
    }
    let state = TruncatedState {
        dim,
        theta,
        coefficients,
    };
    let norm = state.norm();
    let deficit = 1.0 - norm * norm;
    if deficit > MAX_NORM_DEFICIT {
        return Err(Error::TruncationTooSmall { dim, deficit });
    }
    Ok(state)
}

/// `(⟨N_A⟩, ⟨N_Ã⟩)`, each summed over the full `dim × dim` basis using its own
/// level index.
pub fn oracle_numbers(state: &TruncatedState) -> (f64, f64) {
    let mut plain = 0.0;
    let mut tilde = 0.0;
    for n in 0..state.dim {
        for m in 0..state.dim {
            let p = state.amplitude(n, m);
            let p = p * p;
            plain += n as f64 * p;
            tilde += m as f64 * p;
        }
    }
    (plain, tilde)
}

/// `⟨θ₁|θ₂⟩` summed in the truncated basis.
pub fn oracle_overlap(theta1: f64, theta2: f64, dim: usize) -> Result<f64> {
    let a = build_squeezed(theta1, dim)?;
    let b = build_squeezed(theta2, dim)?;
    Ok(a.coefficients.iter().zip(&b.coefficients).map(|(x, y)| x * y).sum())
}

/// Generator restricted to the paired sector `|n, n⟩`, `n < levels`.
fn pair_sector_generator(theta: f64, levels: usize) -> Matrix {
    let mut g = Matrix::zeros(levels);
    for n in 0..levels - 1 {
        // A†Ã†|n,n⟩ = (n+1)|n+1,n+1⟩
        let amp = theta * (n + 1) as f64;
        g[(n + 1, n)] = amp;
        g[(n, n + 1)] = -amp;
    }
    g
}

/// Squeezed vacuum from the generator exponential on a `2·dim` working
/// truncation, projected onto the first `dim` levels. The wider working space
/// keeps the hard truncation edge away from the levels being compared.
pub fn squeezed_from_generator(theta: f64, dim: usize) -> Vec<f64> {
    let working = 2 * dim;
    let u = expm(&pair_sector_generator(theta, working));
    let mut column = u.column(0);
    column.truncate(dim);
    column
}

/// `exp(G)|0,0⟩` on the full `dim²`-dimensional two-mode space, with `G`
/// applied as a sparse operator. The exponential is split into `s` equal
/// steps with `‖G‖₁/s ≤ 1`, each expanded as a Taylor series.
pub fn two_mode_vacuum_evolution(theta: f64, dim: usize) -> Vec<f64> {
    let apply = |v: &[f64]| {
        let mut out = vec![0.0; v.len()];
        for n in 0..dim {
            for m in 0..dim {
                let x = v[n * dim + m];
                if x == 0.0 {
                    continue;
                }
                if n + 1 < dim && m + 1 < dim {
                    let amp = libm::sqrt(((n + 1) * (m + 1)) as f64);
                    out[(n + 1) * dim + m + 1] += theta * amp * x;
                }
                if n > 0 && m > 0 {
                    let amp = libm::sqrt((n * m) as f64);
                    out[(n - 1) * dim + m - 1] -= theta * amp * x;
                }
            }
        }
        out
    };
    let norm = 2.0 * theta * dim as f64;
    let steps = libm::ceil(norm).max(1.0) as usize;
    let h = 1.0 / steps as f64;

    let mut v = vec![0.0; dim * dim];
    v[0] = 1.0;
    for _ in 0..steps {
        let mut term = v.clone();
        let mut sum = v.clone();
        for order in 1..60 {
            term = apply(&term);
            let scale = h / order as f64;
            let mut size = 0.0f64;
            for (t, s) in term.iter_mut().zip(sum.iter_mut()) {
                *t *= scale;
                *s += *t;
                size = size.max(libm::fabs(*t));
            }
            if size < 1e-18 {
                break;
            }
        }
        v = sum;
    }
    v
}

/// Outcome of comparing the series state with both generator exponentials.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheck {
    /// Largest `|series − projected generator exponential|` amplitude.
    pub series_deviation: f64,
    /// Largest amplitude found on `|n, m⟩`, `n ≠ m`, in the full-space run.
    pub off_pair_amplitude: f64,
    /// Largest disagreement between the full-space run and the paired-sector
    /// exponential at the same truncation.
    pub sector_deviation: f64,
}

pub fn cross_check(theta: f64, dim: usize) -> Result<CrossCheck> {
    let series = build_squeezed(theta, dim)?;
    let projected = squeezed_from_generator(theta, dim);
    let series_deviation = series
        .coefficients
        .iter()
        .zip(&projected)
        .map(|(a, b)| libm::fabs(a - b))
        .fold(0.0, f64::max);

    let full = two_mode_vacuum_evolution(theta, dim);
    let sector = expm(&pair_sector_generator(theta, dim)).column(0);
    let mut off_pair_amplitude = 0.0f64;
    let mut sector_deviation = 0.0f64;
    for n in 0..dim {
        for m in 0..dim {
            let x = full[n * dim + m];
            if n == m {
                sector_deviation = sector_deviation.max(libm::fabs(x - sector[n]));
            } else {
                off_pair_amplitude = off_pair_amplitude.max(libm::fabs(x));
            }
        }
    }
    Ok(CrossCheck {
        series_deviation,
        off_pair_amplitude,
        sector_deviation,
    })
}

/// One line of the oracle suite.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub name: String,
    pub error: f64,
    pub tolerance: f64,
}

impl OracleCheck {
    pub fn passed(&self) -> bool {
        self.error <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OracleReport {
    pub checks: Vec<OracleCheck>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(OracleCheck::passed)
    }

    fn push(&mut self, name: String, error: f64, tolerance: f64) {
        self.checks.push(OracleCheck { name, error, tolerance });
    }
}

/// Squeeze grid for the suite: the standard points up to `theta_max`, plus
/// `theta_max` itself.
pub fn suite_thetas(theta_max: f64) -> Vec<f64> {
    let mut thetas: Vec<f64> = SUITE_THETAS.iter().copied().filter(|t| *t <= theta_max).collect();
    if !thetas.contains(&theta_max) && theta_max > 0.0 {
        thetas.push(theta_max);
    }
    thetas
}

/// Checks occupation numbers, balance, overlaps and the generator cross-check
/// against the closed forms used by the condensate module.
pub fn run_suite(dim: usize, theta_max: f64) -> Result<OracleReport> {
    use alloc::format;

    let thetas = suite_thetas(theta_max);
    let mut report = OracleReport::default();
    for &theta in &thetas {
        let state = build_squeezed(theta, dim)?;
        let (plain, tilde) = oracle_numbers(&state);
        let sinh2 = libm::sinh(theta) * libm::sinh(theta);
        report.push(format!("occupation theta={theta}"), libm::fabs(plain - sinh2), 1e-8);
        report.push(format!("balance theta={theta}"), libm::fabs(plain - tilde), 0.0);
        let norm = state.norm();
        report.push(format!("norm theta={theta}"), 1.0 - norm, 1e-6);

        let check = cross_check(theta, dim)?;
        report.push(format!("generator series theta={theta}"), check.series_deviation, 1e-10);
        report.push(format!("pair purity theta={theta}"), check.off_pair_amplitude, 1e-12);
        report.push(format!("generator sector theta={theta}"), check.sector_deviation, 1e-10);
    }
    for (i, &t1) in thetas.iter().enumerate() {
        for &t2 in &thetas[i + 1..] {
            let brute = oracle_overlap(t1, t2, dim)?;
            let closed = 1.0 / libm::cosh(t1 - t2);
            report.push(format!("overlap {t1},{t2}"), libm::fabs(brute - closed), 1e-8);
            let code = |t: f64| MemoryCode::new("oracle", vec![libm::sinh(t) * libm::sinh(t)], 0.0);
            let engine = overlap(&code(t1)?, &code(t2)?)?;
            report.push(format!("engine overlap {t1},{t2}"), libm::fabs(brute - engine), 1e-8);
        }
    }
    Ok(report)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn empty_vacuum() {
        let s = build_squeezed(0.0, 8).unwrap();
        assert_eq!(s.coefficients()[0], 1.0);
        assert!(s.coefficients()[1..].iter().all(|c| *c == 0.0));
        assert_eq!(oracle_numbers(&s), (0.0, 0.0));
    }

    #[test]
    fn norm_at_default_truncation() {
        let s = build_squeezed(0.5, DEFAULT_DIM).unwrap();
        assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-10);
        for theta in [0.1, 0.6, 1.2] {
            let n = build_squeezed(theta, DEFAULT_DIM).unwrap().norm();
            assert!((1.0 - 1e-6..=1.0).contains(&n));
        }
    }

    #[test]
    fn severe_truncation_rejected() {
        assert!(matches!(
            build_squeezed(5.0, 8),
            Err(Error::TruncationTooSmall { dim: 8, .. })
        ));
        assert!(oracle_overlap(5.0, 0.0, 8).is_err());
        assert!(build_squeezed(0.5, 1).is_err());
        assert!(build_squeezed(-0.5, 8).is_err());
    }

    #[test]
    fn numbers_at_half() {
        let (a, t) = oracle_numbers(&build_squeezed(0.5, DEFAULT_DIM).unwrap());
        assert_eq!(a, t);
        assert_abs_diff_eq!(a, 0.271_540_317_407_621_889, epsilon = 1e-8);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn overlap_examples() {
        assert_abs_diff_eq!(oracle_overlap(0.7, 0.7, DEFAULT_DIM).unwrap(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(
            oracle_overlap(0.0, 0.881374, DEFAULT_DIM).unwrap(),
            0.707107,
            epsilon = 1e-6
        );
        // sech(0.5), 30-digit reference
        assert_abs_diff_eq!(
            oracle_overlap(0.2, 0.7, DEFAULT_DIM).unwrap(),
            0.886_818_883_970_073_908,
            epsilon = 1e-8
        );
    }

    #[test]
    fn small_truncation_cross_check() {
        let c = cross_check(0.4, 12).unwrap();
        assert!(c.off_pair_amplitude < 1e-12);
        assert!(c.sector_deviation < 1e-12);
    }

    #[test]
    fn deficit_shrinks_with_dim() {
        let deficits: Vec<f64> = (16..80)
            .map(|d| {
                let n = build_squeezed(0.9, d).unwrap().norm();
                1.0 - n * n
            })
            .collect();
        assert!(deficits.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn suite_grid() {
        assert_eq!(suite_thetas(1.2), SUITE_THETAS.to_vec());
        assert_eq!(suite_thetas(0.4), vec![0.1, 0.3, 0.4]);
    }
}
