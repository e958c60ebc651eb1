//! Normalized radial profiles `g(r) = N r^β e^(−γr²/2) L_n^(β)(γr²)` and the
//! planar wave function `ψ(r, φ) = e^(imφ) g(r)/√(2π)`.
//!
//! Every branch and limit uses the same profile; only `(β, γ)` change. The
//! constant `N = √(2γ^(β+1) n!/Γ(n+β+1))` gives `∫₀^∞ g² r dr = 1`, so that
//! `|ψ|²` integrates to one over the plane.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::model::{NuConstants, PhysicalSystem, SpectralParams};
use crate::quad;
use crate::specfun::{laguerre_unchecked, log_gamma_unchecked};
use crate::spectra::{level_params, EnergyLevel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialWaveFunction {
    pub n: u32,
    pub beta: f64,
    pub gamma: f64,
    pub norm: f64,
}

/// Result of a sign-change count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeCount {
    pub nodes: usize,
    /// Two sign changes landed in adjacent sample intervals.
    pub under_resolved: bool,
}

fn check_shape(beta: f64, gamma: f64) -> Result<()> {
    ensure_finite(beta, "beta")?;
    ensure_finite(gamma, "gamma")?;
    if beta <= 0.0 || gamma <= 0.0 {
        return Err(Error::Domain(format!(
            "wave function needs beta > 0 and gamma > 0, got beta = {beta}, gamma = {gamma}"
        )));
    }
    Ok(())
}

fn log_norm(n: u32, beta: f64, gamma: f64) -> f64 {
    let n = f64::from(n);
    0.5 * (2f64.ln() + (beta + 1.0) * gamma.ln() + log_gamma_unchecked(n + 1.0)
        - log_gamma_unchecked(n + beta + 1.0))
}

/// `N = √(2γ^(β+1) n!/Γ(n+β+1))`.
pub fn normalization_constant(n: u32, beta: f64, gamma: f64) -> Result<f64> {
    check_shape(beta, gamma)?;
    Ok(log_norm(n, beta, gamma).exp())
}

/// The prefactor `√(γ^(β+1) n!/(π Γ(n+β+1)))` as it is commonly printed.
/// Together with the `1/√(2π)` azimuthal factor it integrates to `1/(2π)`
/// rather than 1; kept for comparison.
pub fn printed_prefactor(n: u32, beta: f64, gamma: f64) -> Result<f64> {
    check_shape(beta, gamma)?;
    let n = f64::from(n);
    Ok((0.5 * ((beta + 1.0) * gamma.ln() + log_gamma_unchecked(n + 1.0)
        - PI.ln()
        - log_gamma_unchecked(n + beta + 1.0)))
        .exp())
}

impl RadialWaveFunction {
    pub fn new(n: u32, beta: f64, gamma: f64) -> Result<Self> {
        let norm = normalization_constant(n, beta, gamma)?;
        Ok(Self { n, beta, gamma, norm })
    }

    /// Profile of the radial problem `(β², γ²)` at level `n`.
    pub fn from_params(params: &SpectralParams, n: u32) -> Result<Self> {
        if !params.is_bound() {
            return Err(Error::Degenerate(format!(
                "beta2 = {}, gamma2 = {}: no bound state",
                params.beta2, params.gamma2
            )));
        }
        Self::new(n, params.beta(), params.gamma())
    }

    /// Laguerre order `α₁₀ − 1` and scale `α₁₁` of the parametric solution.
    pub fn from_nu_constants(c: &NuConstants, n: u32) -> Result<Self> {
        Self::new(n, c.get(10) - 1.0, c.get(11))
    }

    pub fn for_level(sys: &PhysicalSystem, level: &EnergyLevel) -> Result<Self> {
        let params = level_params(sys, level.kind, &level.state, level.energy);
        Self::from_params(&params, level.state.n)
    }

    /// Free-field profile with `β̃ = m′`, `γ̃ = ω_c/2`.
    pub fn free_field(n: u32, m_eff: f64, omega_c: f64) -> Result<Self> {
        Self::new(n, m_eff, 0.5 * omega_c)
    }

    /// `g(r)`.
    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let x = self.gamma * r * r;
        let log_envelope = self.norm.ln() + self.beta * r.ln() - 0.5 * x;
        if log_envelope + f64::from(self.n) * x.max(1.0).ln() < -745.0 {
            return 0.0;
        }
        log_envelope.exp() * laguerre_unchecked(self.n, self.beta, x)
    }

    /// `ψ(r, φ) = e^(imφ) g(r)/√(2π)`.
    pub fn psi(&self, m: i32, r: f64, phi: f64) -> Complex64 {
        let amp = self.eval(r) / (2.0 * PI).sqrt();
        Complex64::from_polar(1.0, f64::from(m) * phi) * amp
    }

    /// Twice the classical turning radius of the effective oscillator.
    pub fn node_r_max(&self) -> f64 {
        2.0 * (2.0 * (2.0 * f64::from(self.n) + 1.0 + self.beta) / self.gamma).sqrt()
    }

    /// Radius beyond which less than `1e−12` of the norm remains.
    pub fn default_r_max(&self) -> f64 {
        ((4.0 * (2.0 * f64::from(self.n) + 1.0 + self.beta) + 40.0) / self.gamma).sqrt()
    }

    /// Strict sign changes of `g` on `samples` uniform points of `(0, r_max]`.
    pub fn count_nodes(&self, r_max: f64, samples: usize) -> Result<NodeCount> {
        ensure_finite(r_max, "r_max")?;
        if r_max <= 0.0 {
            return Err(Error::Domain(format!("r_max = {r_max} must be positive")));
        }
        let min_samples = 64 * (self.n as usize + 1);
        if samples < min_samples {
            return Err(Error::Domain(format!(
                "need at least {min_samples} samples for n = {}, got {samples}",
                self.n
            )));
        }
        let mut nodes = 0;
        let mut under_resolved = false;
        let mut last_sign = 0.0;
        let mut last_change: Option<usize> = None;
        for i in 1..=samples {
            let g = self.eval(r_max * i as f64 / samples as f64);
            if g == 0.0 {
                continue;
            }
            let sign = g.signum();
            if last_sign != 0.0 && sign != last_sign {
                nodes += 1;
                if last_change == Some(i - 1) {
                    under_resolved = true;
                }
                last_change = Some(i);
            }
            last_sign = sign;
        }
        if under_resolved {
            log::warn!("count_nodes: adjacent sign changes, sampling too coarse");
        }
        Ok(NodeCount { nodes, under_resolved })
    }

    /// `∫₀^r_max g(r)² r dr` by adaptive quadrature.
    pub fn numerical_norm(&self, r_max: f64) -> f64 {
        quad::integrate(|r| self.eval(r).powi(2) * r, 0.0, r_max, 1e-13)
    }
}
