//! Scalar constants derived from the seed degrees and decoder parameters.

use serde::Serialize;

use crate::error::{param, Result};

/// All derived constants of the small-set-flip analysis, from inputs
/// `(d_A, d_B, δ, β, c, γ)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsLedger {
    pub d_a: usize,
    pub d_b: usize,
    pub delta: f64,
    pub beta: f64,
    pub c: f64,
    pub gamma: f64,
    pub r: f64,
    pub gamma_0: f64,
    pub beta_0: f64,
    pub beta_1: f64,
    pub c_0: f64,
    pub c_1: f64,
    pub c_2: f64,
    pub c_3: f64,
    pub chi: u64,
    pub alpha_0: f64,
    pub eta: f64,
    /// Degree bound of the syndrome adjacency graph.
    pub d: u64,
}

impl ConstantsLedger {
    pub fn new(d_a: usize, d_b: usize, delta: f64, beta: f64, c: f64, gamma: f64) -> Self {
        let (da, db) = (d_a as f64, d_b as f64);
        let r = da / db;
        let beta_0 = 1.0 - 8.0 * delta;
        let beta_1 = 1.0 - 16.0 * delta;
        let c_0 = 4.0 / (da * (beta_1 - beta));
        let c_1 = (beta_1 - beta) / (beta_0 * (1.0 - beta));
        let c_2 = 2.0 * beta_0 / (beta_1 - beta);
        let c_3 = 2.0 * (1.0 + c) / (beta * da);
        let chi = chi(d_a, d_b);
        let alpha_0 = r * beta / (4.0 + 2.0 * r * beta);
        let eta = 1.0 - eta_gap(d_a, d_b, beta, c, c_1, c_2, chi);
        ConstantsLedger {
            d_a,
            d_b,
            delta,
            beta,
            c,
            gamma,
            r,
            gamma_0: r * r / (1.0 + r * r).sqrt() * gamma,
            beta_0,
            beta_1,
            c_0,
            c_1,
            c_2,
            c_3,
            chi,
            alpha_0,
            eta,
            d: (d_b * (d_b + 2 * d_a - 1)) as u64,
        }
    }

    /// `δ < 1/16`, `0 < β < β₁` and `c > c₂ + 1`.
    pub fn check_preconditions(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0 / 16.0) {
            return Err(param(format!("delta={} must lie in (0, 1/16)", self.delta)));
        }
        if !(self.beta > 0.0 && self.beta < self.beta_1) {
            return Err(param(format!(
                "beta={} must lie in (0, beta_1={})",
                self.beta, self.beta_1
            )));
        }
        if self.c <= self.c_2 + 1.0 {
            return Err(param(format!("c={} must exceed c_2 + 1 = {}", self.c, self.c_2 + 1.0)));
        }
        Ok(())
    }

    /// `w₀ = γ n_B / (3(1 + d_B))`.
    pub fn w_0(&self, n_b: usize) -> f64 {
        self.gamma * n_b as f64 / (3.0 * (1.0 + self.d_b as f64))
    }

    /// `γ₀ √n`, the residual size below which the small-error analysis applies.
    pub fn small_error_radius(&self, n: usize) -> f64 {
        self.gamma_0 * (n as f64).sqrt()
    }

    /// `1 − η`, computed without cancellation.
    pub fn eta_gap(&self) -> f64 {
        eta_gap(self.d_a, self.d_b, self.beta, self.c, self.c_1, self.c_2, self.chi)
    }
}

fn eta_gap(d_a: usize, d_b: usize, beta: f64, c: f64, c_1: f64, c_2: f64, chi: u64) -> f64 {
    beta * c_1 * (c - 1.0 - c_2) / ((d_a * d_b) as f64 * chi as f64 * c)
}

/// `χ = (d_B(d_A − 1) + 1)(d_A(d_B − 1) + 1)`.
pub fn chi(d_a: usize, d_b: usize) -> u64 {
    ((d_b * (d_a - 1) + 1) * (d_a * (d_b - 1) + 1)) as u64
}

/// `f₀(s) = ⌈χ log_{1/η} s⌉`; zero for `s ≤ 1`.
pub fn f0_steps(s: usize, ledger: &ConstantsLedger) -> Result<u64> {
    let gap = ledger.eta_gap();
    if !(gap > 0.0 && gap < 1.0) || ledger.eta >= 1.0 {
        return Err(param(format!("eta={} must lie in (0, 1)", ledger.eta)));
    }
    if s <= 1 {
        return Ok(0);
    }
    let log_inv_eta = -(-gap).ln_1p();
    Ok((ledger.chi as f64 * (s as f64).ln() / log_inv_eta).ceil() as u64)
}
