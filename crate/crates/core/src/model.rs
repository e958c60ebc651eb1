//! Physical parameters and the reduction of the field-coupled Klein-Gordon
//! equation to the radial oscillator problem
//!
//! ```text
//! g″(s) + g′(s)/s + (−γ²s²/4 + ν²s/4 − β²/4) g(s)/s² = 0,   s = r²
//! ```
//!
//! which is fully characterized by the triple `(ν², β², γ²)`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Particle charge in natural units. Fixed; a sign-flipped charge is not modelled.
pub const CHARGE_E: f64 = 1.0;

/// Which equal-mixing sign of the scalar potential is solved.
///
/// `Positive` is `S = +V` (particle states), `Negative` is `S = −V`
/// (antiparticle states).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Positive,
    Negative,
}

/// Validation applied to the flux-shifted magnetic number `m′ = m + ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Validation {
    /// Any real `m′`; the equations only use `m′²` and `ω_c·m′`.
    #[default]
    Permissive,
    /// Integer flux and `m′ ≥ 1`; violations are reported as warnings.
    Strict,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DomainWarning {
    NonIntegerFlux(f64),
    NonPositiveEffectiveM(f64),
}

impl std::fmt::Display for DomainWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DomainWarning::NonIntegerFlux(xi) => write!(f, "flux xi = {xi} is not an integer"),
            DomainWarning::NonPositiveEffectiveM(m) => {
                write!(f, "effective magnetic number m' = {m} is below 1")
            }
        }
    }
}

/// Physical parameters in natural units (`ħ = c = M = e = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalSystem {
    /// Chemical potential `V₀` in units of `Mc²`.
    pub v0: f64,
    /// Effective radius `r₀` in Compton wavelengths.
    pub rho0: f64,
    /// Cyclotron energy `ħω_c/(Mc²)`, with `ω_c = eB/(Mc)`.
    pub b_field: f64,
    /// Aharonov-Bohm flux in flux quanta, `ξ = Φ_AB/Φ₀`.
    pub flux_xi: f64,
}

impl PhysicalSystem {
    pub fn new(v0: f64, rho0: f64, b_field: f64, flux_xi: f64) -> Result<Self> {
        let sys = Self {
            v0,
            rho0,
            b_field,
            flux_xi,
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite(self.v0, "v0")?;
        ensure_finite(self.rho0, "rho0")?;
        ensure_finite(self.b_field, "b_field")?;
        ensure_finite(self.flux_xi, "flux_xi")?;
        if self.rho0 <= 0.0 {
            return Err(Error::Domain(format!("rho0 = {} must be positive", self.rho0)));
        }
        if self.v0 < 0.0 {
            return Err(Error::Domain(format!("v0 = {} must be non-negative", self.v0)));
        }
        if self.b_field < 0.0 {
            return Err(Error::Domain(format!(
                "b_field = {} must be non-negative",
                self.b_field
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn omega_c(&self) -> f64 {
        self.b_field
    }

    /// Harmonic spring constant `k = 2V₀/r₀²` of the oscillator limit.
    #[inline]
    pub fn spring_constant(&self) -> f64 {
        2.0 * self.v0 / (self.rho0 * self.rho0)
    }

    pub fn state(&self, n: u32, m: i32) -> QuantumState {
        QuantumState::new(n, m, self.flux_xi)
    }
}

/// Radial number `n`, magnetic number `m` and the flux-shifted `m′ = m + ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumState {
    pub n: u32,
    pub m: i32,
    pub m_eff: f64,
}

impl QuantumState {
    pub fn new(n: u32, m: i32, flux_xi: f64) -> Self {
        Self {
            n,
            m,
            m_eff: f64::from(m) + flux_xi,
        }
    }
}

/// `m′ = m + ξ`. Strict validation reports (but does not reject) a
/// non-integer flux or `m′ < 1`.
pub fn effective_quantum_number(
    m: i32,
    flux_xi: f64,
    mode: Validation,
) -> (f64, Vec<DomainWarning>) {
    let m_eff = f64::from(m) + flux_xi;
    let mut warnings = Vec::new();
    if mode == Validation::Strict {
        if flux_xi.fract() != 0.0 {
            warnings.push(DomainWarning::NonIntegerFlux(flux_xi));
        }
        if m_eff < 1.0 {
            warnings.push(DomainWarning::NonPositiveEffectiveM(m_eff));
        }
    }
    (m_eff, warnings)
}

/// The triple `(ν², β², γ²)` of one radial problem, all dimensionless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    pub nu2: f64,
    pub beta2: f64,
    pub gamma2: f64,
    pub branch: Branch,
}

impl SpectralParams {
    /// True when `β² > 0` and `γ² > 0`, i.e. the radial problem is an
    /// oscillator with a discrete spectrum.
    pub fn is_bound(&self) -> bool {
        self.beta2 > 0.0 && self.gamma2 > 0.0
    }

    pub fn beta(&self) -> f64 {
        self.beta2.sqrt()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma2.sqrt()
    }
}

/// Spectral parameters at energy `energy` (in `Mc²`).
///
/// With `λ₁ = E + 1`, `λ₂ = E − 1` the positive branch uses
/// `ν² = λ₁(λ₂ + 2V₀) − ω_c m′`, `β² = m′² + r₀²V₀λ₁`,
/// `γ² = (ω_c/2)² + V₀λ₁/r₀²`; the negative branch swaps `λ₁ ↔ λ₂`.
/// The result is not checked for boundedness; see [`SpectralParams::is_bound`].
pub fn spectral_params(
    sys: &PhysicalSystem,
    energy: f64,
    state: &QuantumState,
    branch: Branch,
) -> SpectralParams {
    spectral_params_raw(sys.v0, sys.rho0, sys.omega_c(), state.m_eff, energy, branch)
}

/// [`spectral_params`] on bare numbers, without the sign restrictions of
/// [`PhysicalSystem`].
pub fn spectral_params_raw(
    v0: f64,
    rho0: f64,
    omega_c: f64,
    m_eff: f64,
    energy: f64,
    branch: Branch,
) -> SpectralParams {
    let lambda1 = energy + 1.0;
    let lambda2 = energy - 1.0;
    let (coupled, other) = match branch {
        Branch::Positive => (lambda1, lambda2),
        Branch::Negative => (lambda2, lambda1),
    };
    SpectralParams {
        nu2: coupled * (other + 2.0 * v0) - omega_c * m_eff,
        beta2: m_eff * m_eff + rho0 * rho0 * v0 * coupled,
        gamma2: 0.25 * omega_c * omega_c + v0 * coupled / (rho0 * rho0),
        branch,
    }
}

/// Parametric constants of the hypergeometric-type reduction for the
/// `α₃ = 0` case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuConstants {
    pub xi1: f64,
    pub xi2: f64,
    pub xi3: f64,
    /// `alpha[i]` holds `α_{i+1}`.
    pub alpha: [f64; 13],
}

impl NuConstants {
    #[inline]
    pub fn get(&self, index: usize) -> f64 {
        self.alpha[index - 1]
    }
}

/// Fills the thirteen constants from `ξ₁ = γ²/4`, `ξ₂ = ν²/4`, `ξ₃ = β²/4`.
pub fn nu_constants(xi1: f64, xi2: f64, xi3: f64) -> Result<NuConstants> {
    ensure_finite(xi1, "xi1")?;
    ensure_finite(xi2, "xi2")?;
    ensure_finite(xi3, "xi3")?;
    if xi1 < 0.0 || xi3 < 0.0 {
        return Err(Error::Domain(format!(
            "xi1 = {xi1} and xi3 = {xi3} must be non-negative"
        )));
    }
    let beta = 2.0 * xi3.sqrt();
    let gamma = 2.0 * xi1.sqrt();
    let alpha = [
        1.0,
        0.0,
        0.0,
        0.0,
        0.0,
        xi1,
        -xi2,
        xi3,
        xi1,
        beta + 1.0,
        gamma,
        beta / 2.0,
        -gamma / 2.0,
    ];
    Ok(NuConstants {
        xi1,
        xi2,
        xi3,
        alpha,
    })
}

/// Constants for a given spectral triple.
pub fn nu_constants_for(params: &SpectralParams) -> Result<NuConstants> {
    nu_constants(params.gamma2 / 4.0, params.nu2 / 4.0, params.beta2 / 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn approx(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-14 * b.abs().max(1.0)
    }

    #[test]
    fn effective_m_examples() {
        assert_eq!(effective_quantum_number(0, 1.0, Validation::Strict).0, 1.0);
        assert_eq!(effective_quantum_number(2, 0.0, Validation::Permissive).0, 2.0);
        assert_eq!(effective_quantum_number(-1, 3.0, Validation::Permissive).0, 2.0);
    }

    #[test]
    fn strict_mode_warns_without_failing() {
        let (m, w) = effective_quantum_number(0, 0.5, Validation::Strict);
        assert_eq!(m, 0.5);
        assert_eq!(
            w,
            vec![
                DomainWarning::NonIntegerFlux(0.5),
                DomainWarning::NonPositiveEffectiveM(0.5)
            ]
        );
        let (_, w) = effective_quantum_number(0, 0.5, Validation::Permissive);
        assert!(w.is_empty());
        let (_, w) = effective_quantum_number(1, 2.0, Validation::Strict);
        assert!(w.is_empty());
    }

    #[test]
    fn system_validation() {
        assert!(PhysicalSystem::new(1.0, 1.0, 0.0, 0.0).is_ok());
        assert!(PhysicalSystem::new(1.0, 0.0, 0.0, 0.0).is_err());
        assert!(PhysicalSystem::new(-0.1, 1.0, 0.0, 0.0).is_err());
        assert!(PhysicalSystem::new(1.0, 1.0, -1.0, 0.0).is_err());
        assert!(matches!(
            PhysicalSystem::new(f64::NAN, 1.0, 0.0, 0.0),
            Err(Error::NonFinite("v0"))
        ));
    }

    #[test]
    fn params_positive_example() {
        let sys = PhysicalSystem::new(1.0, 1.0, 2.0, 0.0).unwrap();
        let p = spectral_params(&sys, 1.0, &sys.state(0, 1), Branch::Positive);
        assert!(approx(p.nu2, 2.0));
        assert!(approx(p.beta2, 3.0));
        assert!(approx(p.gamma2, 3.0));
        assert!(p.is_bound());
    }

    #[test]
    fn params_zero_potential() {
        for rho0 in [0.3, 1.0, 7.0] {
            let sys = PhysicalSystem::new(0.0, rho0, 1.0, 0.0).unwrap();
            for branch in [Branch::Positive, Branch::Negative] {
                for e in [-3.0, 0.2, 1.7] {
                    let p = spectral_params(&sys, e, &sys.state(0, 2), branch);
                    assert_eq!(p.beta2, 4.0);
                    assert_eq!(p.gamma2, 0.25);
                }
            }
        }
    }

    #[test]
    fn params_negative_degenerate_at_rest_energy() {
        let sys = PhysicalSystem::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let p = spectral_params(&sys, 1.0, &sys.state(0, 1), Branch::Negative);
        assert_eq!(p.nu2, 0.0);
        assert_eq!(p.beta2, 1.0);
        assert_eq!(p.gamma2, 0.0);
        assert!(!p.is_bound());
    }

    #[test]
    fn nu_constants_examples() {
        // β = 2, γ = 4
        let c = nu_constants(4.0, 1.3, 1.0).unwrap();
        assert_eq!(c.get(10), 3.0);
        assert_eq!(c.get(11), 4.0);
        assert_eq!(c.get(12), 1.0);
        assert_eq!(c.get(13), -2.0);

        let z = nu_constants(0.0, 0.0, 0.0).unwrap();
        for i in 1..=13 {
            let want = if i == 1 || i == 10 { 1.0 } else { 0.0 };
            assert_eq!(z.get(i), want, "alpha{i}");
        }

        let c = nu_constants(0.25, 0.5, 0.75).unwrap();
        assert_eq!(c.get(6), 0.25);
        assert_eq!(c.get(9), 0.25);
        assert_eq!(c.get(7), -0.5);
        assert_eq!(c.get(8), 0.75);
        assert!(approx(c.get(10), 1.0 + 3f64.sqrt()));

        assert!(nu_constants(-1.0, 0.0, 0.0).is_err());
        assert!(nu_constants(0.0, 0.0, -1e-3).is_err());
    }

    proptest! {
        #[test]
        fn nu_constants_invariants(xi1 in 0.0f64..1e3, xi2 in -1e3f64..1e3, xi3 in 0.0f64..1e3) {
            let c = nu_constants(xi1, xi2, xi3).unwrap();
            for i in 2..=5 {
                prop_assert_eq!(c.get(i), 0.0);
            }
            prop_assert_eq!(c.get(9), c.get(6));
            prop_assert!(approx(c.get(10), 1.0 + 2.0 * xi3.sqrt()));
            prop_assert!(approx(c.get(11), 2.0 * c.get(9).sqrt()));
            prop_assert!(approx(c.get(12), xi3.sqrt()));
            prop_assert!(approx(c.get(13), -c.get(9).sqrt()));
        }

        #[test]
        fn branches_related_by_charge_conjugation(
            v0 in 0.0f64..5.0, rho0 in 0.1f64..5.0, wc in 0.0f64..3.0,
            m_eff in -4.0f64..6.0, e in -5.0f64..5.0,
        ) {
            // λ₁(−E) = −λ₂(E), so the negative branch at (−E, −V₀) is the
            // positive branch at (E, V₀).
            prop_assert_eq!(1.0 + (-e), -(e - 1.0));
            let pos = spectral_params_raw(v0, rho0, wc, m_eff, e, Branch::Positive);
            let neg = spectral_params_raw(-v0, rho0, wc, m_eff, -e, Branch::Negative);
            let tol = 1e-12 * (1.0 + e * e + v0 * v0 + m_eff * m_eff);
            prop_assert!((pos.nu2 - neg.nu2).abs() <= tol);
            prop_assert!((pos.beta2 - neg.beta2).abs() <= tol);
            prop_assert!((pos.gamma2 - neg.gamma2).abs() <= tol);
        }

        #[test]
        fn branches_coincide_without_potential(
            rho0 in 0.1f64..5.0, wc in 0.0f64..3.0, m_eff in -4.0f64..6.0, e in -5.0f64..5.0,
        ) {
            let pos = spectral_params_raw(0.0, rho0, wc, m_eff, e, Branch::Positive);
            let neg = spectral_params_raw(0.0, rho0, wc, m_eff, -e, Branch::Negative);
            prop_assert!((pos.nu2 - neg.nu2).abs() <= 1e-12 * (1.0 + e * e));
            prop_assert_eq!(pos.beta2, neg.beta2);
            prop_assert_eq!(pos.gamma2, neg.gamma2);
        }
    }
}
