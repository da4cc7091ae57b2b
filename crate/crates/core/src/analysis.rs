//! Sample complexity and fidelity/pass-rate conversions.

use std::f64::consts::{E, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn open_unit(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value: x,
            range: "(0, 1)",
        })
    }
}

/// Infidelity threshold, significance level and the resulting test count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationBudget {
    pub epsilon: f64,
    pub delta: f64,
    pub n_tests: u64,
}

impl VerificationBudget {
    pub fn new(nu: f64, epsilon: f64, delta: f64) -> Result<Self> {
        Ok(VerificationBudget {
            epsilon,
            delta,
            n_tests: tests_needed(nu, epsilon, delta)?,
        })
    }
}

/// `N = ceil(ln δ / ln(1 - ν ε))`, the number of passed tests after which
/// a source with infidelity at least `ε` is rejected at significance `δ`.
pub fn tests_needed(nu: f64, epsilon: f64, delta: f64) -> Result<u64> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::OutOfRange {
            name: "nu",
            value: nu,
            range: "(0, 1]",
        });
    }
    open_unit("epsilon", epsilon)?;
    open_unit("delta", delta)?;
    let n = delta.ln() / (-nu * epsilon).ln_1p();
    Ok(n.ceil() as u64)
}

/// High-precision adversarial estimate `ln(1/δ) / (β ε ln(1/β))`.
///
/// Returned unrounded: only the asymptotic expression is available, so it
/// is not directly comparable with the ceiled [`tests_needed`].
pub fn tests_needed_adversarial(beta: f64, epsilon: f64, delta: f64) -> Result<f64> {
    if beta == 0.0 {
        return Err(Error::BetaZero);
    }
    open_unit("beta", beta)?;
    open_unit("epsilon", epsilon)?;
    open_unit("delta", delta)?;
    Ok((1.0 / delta).ln() / (beta * epsilon * (1.0 / beta).ln()))
}

/// Spectral gap `1/(2 + cos θ sin θ)` of the nonadaptive two-qubit
/// strategy used as the comparison baseline.
pub fn plm_nu(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= FRAC_PI_4 + 1e-15) {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            range: "(0, pi/4]",
        });
    }
    Ok(1.0 / (2.0 + theta.cos() * theta.sin()))
}

/// `1 - ν ε`.
pub fn worst_case_pass_prob(nu: f64, epsilon: f64) -> f64 {
    1.0 - nu * epsilon
}

/// Fidelity recovered from a pass rate of a homogeneous strategy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityEstimate {
    pub value: f64,
    /// False when `value` falls outside `[0, 1]`; it is reported unclamped.
    pub physical: bool,
}

/// Inverts `rate = (1 - β) F + β`.
pub fn fidelity_from_pass_rate(rate: f64, beta: f64) -> Result<FidelityEstimate> {
    if beta == 1.0 {
        return Err(Error::BetaOne);
    }
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::OutOfRange {
            name: "beta",
            value: beta,
            range: "[0, 1)",
        });
    }
    let value = (rate - beta) / (1.0 - beta);
    Ok(FidelityEstimate {
        value,
        physical: (0.0..=1.0).contains(&value),
    })
}

/// One row of the two-qubit test-count comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Figure1Row {
    pub theta: f64,
    pub n_plm: u64,
    pub n_i: u64,
    pub n_ii: u64,
    pub n_iv: u64,
    pub n_v: f64,
    pub n_vi: f64,
}

/// Test counts for `cos θ|00> + sin θ|11>` at each `θ` of the grid.
///
/// Nonadversarial columns use the closed-form two-qubit gaps; the
/// adversarial columns use `β = max(1/e, cos²θ/(1+cos²θ))` for V and
/// `β = 1/e` for VI.
pub fn figure1_table(theta_grid: &[f64], epsilon: f64, delta: f64) -> Result<Vec<Figure1Row>> {
    theta_grid
        .iter()
        .map(|&theta| {
            let c2 = theta.cos().powi(2);
            let beta_v = (1.0 / E).max(c2 / (1.0 + c2));
            Ok(Figure1Row {
                theta,
                n_plm: tests_needed(plm_nu(theta)?, epsilon, delta)?,
                n_i: tests_needed(0.5, epsilon, delta)?,
                n_ii: tests_needed(1.0 / (1.0 + c2), epsilon, delta)?,
                n_iv: tests_needed(2.0 / 3.0, epsilon, delta)?,
                n_v: tests_needed_adversarial(beta_v, epsilon, delta)?,
                n_vi: tests_needed_adversarial(1.0 / E, epsilon, delta)?,
            })
        })
        .collect()
}

/// `k * (π/4) / n` for `k = 1..=n`.
pub fn theta_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|k| FRAC_PI_4 * k as f64 / n as f64).collect()
}
