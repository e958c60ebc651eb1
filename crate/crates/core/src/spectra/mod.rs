//! Energy levels: the quantization condition `ν² = 2(2n+1+β)γ`, the
//! relativistic root solvers for both equal-mixing signs, the free-field
//! Landau formula and the non-relativistic, pseudoharmonic and harmonic
//! limits.
//!
//! Energies of relativistic levels include the rest energy (`E ≈ 1 + …`);
//! non-relativistic levels report the binding energy `E − Mc²` directly.

mod roots;
mod sweep;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{spectral_params, Branch, PhysicalSystem, QuantumState, SpectralParams};

pub use roots::{bisect, scan_roots};
pub use sweep::{sweep_levels, SweepParam, SweepRange, SweepRow};

/// Number of uniform samples in the sign-change scan.
pub const SCAN_POINTS: usize = 10_000;
/// Offset from the lower edge of the admissible energy window.
pub const WINDOW_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelKind {
    /// Root of the `S = +V` energy equation.
    Positive,
    /// Root of the `S = −V` energy equation.
    Negative,
    /// Landau level `(n + m′ + ½)ω_c`.
    FreeField,
    /// Non-relativistic pseudoharmonic well with fields.
    NonrelFields,
    /// Non-relativistic pseudoharmonic well without fields.
    NonrelPho,
    /// Relativistic pseudoharmonic well without fields.
    KgPho,
    /// Relativistic harmonic well.
    KgHo,
    /// Non-relativistic harmonic well.
    NonrelHo,
}

impl LevelKind {
    pub const ALL: [LevelKind; 8] = [
        LevelKind::Positive,
        LevelKind::Negative,
        LevelKind::FreeField,
        LevelKind::NonrelFields,
        LevelKind::NonrelPho,
        LevelKind::KgPho,
        LevelKind::KgHo,
        LevelKind::NonrelHo,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            LevelKind::Positive => "positive",
            LevelKind::Negative => "negative",
            LevelKind::FreeField => "free_field",
            LevelKind::NonrelFields => "nonrel_fields",
            LevelKind::NonrelPho => "nonrel_pho",
            LevelKind::KgPho => "kg_pho",
            LevelKind::KgHo => "kg_ho",
            LevelKind::NonrelHo => "nonrel_ho",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }

    /// Whether `energy` includes the rest energy `Mc²`.
    pub fn includes_rest_energy(&self) -> bool {
        matches!(
            self,
            LevelKind::Positive | LevelKind::Negative | LevelKind::KgPho | LevelKind::KgHo
        )
    }
}

impl std::fmt::Display for LevelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A solved level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevel {
    pub energy: f64,
    pub kind: LevelKind,
    pub state: QuantumState,
    /// Quantization residual `ν² − 2(2n+1+β)γ` at `energy`, with the
    /// parameter map belonging to `kind` (see [`level_params`]).
    pub residual: f64,
    /// Root closest to the non-relativistic reference; always true for
    /// closed-form levels.
    pub principal: bool,
    /// Relative deviation from the finite-difference oracle, once checked.
    pub oracle_dev: Option<f64>,
}

impl EnergyLevel {
    fn new(sys: &PhysicalSystem, kind: LevelKind, state: QuantumState, energy: f64) -> Self {
        let params = level_params(sys, kind, &state, energy);
        Self {
            energy,
            kind,
            state,
            residual: residual_unchecked(&params, state.n),
            principal: true,
            oracle_dev: None,
        }
    }
}

/// Radial-problem parameters that a level of `kind` at `energy` must satisfy.
///
/// Relativistic kinds use the exact maps; non-relativistic kinds substitute
/// `λ₁ → 2`, `λ₂ → E`. Harmonic kinds drop the inverse-square and constant
/// parts of the well, leaving `β = |m′|`.
pub fn level_params(
    sys: &PhysicalSystem,
    kind: LevelKind,
    state: &QuantumState,
    energy: f64,
) -> SpectralParams {
    let m = state.m_eff;
    let (v0, rho2, wc) = (sys.v0, sys.rho0 * sys.rho0, sys.omega_c());
    match kind {
        LevelKind::Positive => spectral_params(sys, energy, state, Branch::Positive),
        LevelKind::Negative => spectral_params(sys, energy, state, Branch::Negative),
        LevelKind::KgPho => spectral_params(sys, energy, state, Branch::Positive),
        LevelKind::FreeField => SpectralParams {
            nu2: 2.0 * energy - wc * m,
            beta2: m * m,
            gamma2: 0.25 * wc * wc,
            branch: Branch::Negative,
        },
        LevelKind::NonrelFields | LevelKind::NonrelPho => SpectralParams {
            nu2: 2.0 * (energy + 2.0 * v0) - wc * m,
            beta2: m * m + 2.0 * v0 * rho2,
            gamma2: 0.25 * wc * wc + 2.0 * v0 / rho2,
            branch: Branch::Positive,
        },
        LevelKind::KgHo => {
            let lambda1 = energy + 1.0;
            SpectralParams {
                nu2: lambda1 * (energy - 1.0),
                beta2: m * m,
                gamma2: v0 * lambda1 / rho2,
                branch: Branch::Positive,
            }
        }
        LevelKind::NonrelHo => SpectralParams {
            nu2: 2.0 * energy,
            beta2: m * m,
            gamma2: 2.0 * v0 / rho2,
            branch: Branch::Positive,
        },
    }
}

/// `ν² − 2(2n+1+β)γ`; zero exactly on the quantization condition.
pub fn quantization_residual(params: &SpectralParams, n: u32) -> Result<f64> {
    if !(params.beta2 > 0.0 && params.gamma2 > 0.0) {
        return Err(Error::Domain(format!(
            "quantization needs beta2 > 0 and gamma2 > 0, got beta2 = {}, gamma2 = {}",
            params.beta2, params.gamma2
        )));
    }
    Ok(residual_unchecked(params, n))
}

fn residual_unchecked(params: &SpectralParams, n: u32) -> f64 {
    let beta = params.beta2.max(0.0).sqrt();
    let gamma = params.gamma2.max(0.0).sqrt();
    params.nu2 - 2.0 * (2.0 * f64::from(n) + 1.0 + beta) * gamma
}

/// Admissible energy window `[lo, hi]` of the relativistic equation for
/// `branch`, where `β² > 0` and `γ² > 0` (and `λ₁ > 0` for the positive
/// branch).
pub fn energy_window(sys: &PhysicalSystem, state: &QuantumState, branch: Branch) -> Result<(f64, f64)> {
    let (v0, rho0, wc, m) = (sys.v0, sys.rho0, sys.omega_c(), state.m_eff);
    if v0 == 0.0 && (m == 0.0 || wc == 0.0) {
        return Err(Error::Degenerate(format!(
            "V0 = 0 with m' = {m}, omega_c = {wc}: no oscillator confinement"
        )));
    }
    let gamma_nr = (0.25 * wc * wc + 2.0 * v0 / (rho0 * rho0)).sqrt();
    let cap = 1.0 + 4.0 * (2.0 * f64::from(state.n) + 2.0 + m.abs()) * gamma_nr.max(wc);
    let lo = match branch {
        Branch::Positive => -1.0 + WINDOW_EPS,
        Branch::Negative => {
            if v0 == 0.0 {
                -cap
            } else {
                let beta_edge = -m * m / (rho0 * rho0 * v0);
                let gamma_edge = -wc * wc * rho0 * rho0 / (4.0 * v0);
                let edge = 1.0 + beta_edge.max(gamma_edge);
                edge.max(-cap) + WINDOW_EPS * edge.abs().max(1.0)
            }
        }
    };
    if lo >= cap {
        return Err(Error::Degenerate(format!(
            "empty admissible energy window [{lo}, {cap}]"
        )));
    }
    Ok((lo, cap))
}

/// Pushes the upper end of the window outward until the residual is
/// positive there, so the principal root cannot lie beyond the scan.
fn extend_cap<F: Fn(f64) -> f64>(f: &F, lo: f64, mut hi: f64) -> f64 {
    for _ in 0..60 {
        if f(hi) > 0.0 {
            break;
        }
        hi = lo + 2.0 * (hi - lo);
    }
    hi
}

fn mark_principal(levels: &mut [EnergyLevel], reference: f64) {
    let best = levels
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1.energy - reference)
                .abs()
                .total_cmp(&(b.1.energy - reference).abs())
        })
        .map(|(i, _)| i);
    for (i, level) in levels.iter_mut().enumerate() {
        level.principal = Some(i) == best;
    }
}

/// All roots of the relativistic energy equation for `branch`, in
/// ascending order, each with `|residual| ≤ 1e−12`.
///
/// The principal root is the one closest to `Mc² + E_nr`, with `E_nr` the
/// non-relativistic level with fields (positive branch) or the Landau
/// level (negative branch). For `V₀ = 0` the negative branch is the free
/// field and the Landau level itself is returned.
pub fn solve_kg_energy(
    sys: &PhysicalSystem,
    state: &QuantumState,
    branch: Branch,
) -> Result<Vec<EnergyLevel>> {
    sys.validate()?;
    if branch == Branch::Negative && sys.v0 == 0.0 {
        return Ok(vec![free_field_level(sys, state)?]);
    }
    let (lo, hi) = energy_window(sys, state, branch)?;
    let kind = match branch {
        Branch::Positive => LevelKind::Positive,
        Branch::Negative => LevelKind::Negative,
    };
    let f = |e: f64| residual_unchecked(&spectral_params(sys, e, state, branch), state.n);
    let hi = extend_cap(&f, lo, hi);
    let mut levels: Vec<EnergyLevel> = scan_roots(&f, lo, hi, SCAN_POINTS)
        .into_iter()
        .map(|e| EnergyLevel::new(sys, kind, *state, e))
        .collect();

    let reference = match branch {
        Branch::Positive => 1.0 + nonrel_formula(sys, state).0,
        Branch::Negative => 1.0 + landau_energy(state.n, state.m_eff, sys.omega_c())?,
    };
    mark_principal(&mut levels, reference);
    Ok(levels)
}

/// Landau level `(n + m′ + ½)ω_c` in units of `Mc²`.
pub fn landau_energy(n: u32, m_eff: f64, omega_c: f64) -> Result<f64> {
    crate::error::ensure_finite(m_eff, "m_eff")?;
    crate::error::ensure_finite(omega_c, "omega_c")?;
    if omega_c < 0.0 {
        return Err(Error::Domain(format!("omega_c = {omega_c} must be non-negative")));
    }
    Ok((f64::from(n) + m_eff + 0.5) * omega_c)
}

/// Free-field (`S = −V`) level. Requires `m′ > 0` so that `β̃ = m′`.
pub fn free_field_level(sys: &PhysicalSystem, state: &QuantumState) -> Result<EnergyLevel> {
    if sys.omega_c() <= 0.0 {
        return Err(Error::Degenerate(
            "free-field levels need a magnetic field (omega_c > 0)".into(),
        ));
    }
    if state.m_eff <= 0.0 {
        return Err(Error::Domain(format!(
            "free-field formula needs m' > 0, got {}",
            state.m_eff
        )));
    }
    let e = landau_energy(state.n, state.m_eff, sys.omega_c())?;
    Ok(EnergyLevel::new(sys, LevelKind::FreeField, *state, e))
}

/// Derived frequencies of the non-relativistic problem with fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonRelParams {
    /// `Ω = √(ω_c² + 4ω_D²)`
    pub omega: f64,
    /// `ω_D = √(2V₀/(M r₀²))`
    pub omega_d: f64,
    /// `a = k_F r₀`
    pub a: f64,
    /// `k_F = √(2MV₀)/ħ`
    pub k_f: f64,
    /// `|m̃| = √(m′² + a²)`
    pub m_tilde: f64,
}

fn nonrel_formula(sys: &PhysicalSystem, state: &QuantumState) -> (f64, NonRelParams) {
    let wc = sys.omega_c();
    let omega_d = (2.0 * sys.v0 / (sys.rho0 * sys.rho0)).sqrt();
    let k_f = (2.0 * sys.v0).sqrt();
    let a = k_f * sys.rho0;
    let p = NonRelParams {
        omega: (wc * wc + 4.0 * omega_d * omega_d).sqrt(),
        omega_d,
        a,
        k_f,
        m_tilde: (state.m_eff * state.m_eff + a * a).sqrt(),
    };
    let e = p.omega * (f64::from(state.n) + 0.5 * (p.m_tilde + 1.0)) + 0.5 * wc * state.m_eff
        - 2.0 * sys.v0;
    (e, p)
}

/// Non-relativistic level with fields:
/// `E = Ω(n + (|m̃|+1)/2) + ω_c m′/2 − 2V₀`.
pub fn nonrel_energy_with_fields(
    sys: &PhysicalSystem,
    state: &QuantumState,
) -> Result<(EnergyLevel, NonRelParams)> {
    sys.validate()?;
    let (e, p) = nonrel_formula(sys, state);
    if p.omega == 0.0 {
        return Err(Error::Degenerate("Omega = 0: no field and no well".into()));
    }
    Ok((EnergyLevel::new(sys, LevelKind::NonrelFields, *state, e), p))
}

fn require_no_field(sys: &PhysicalSystem, what: &str) -> Result<()> {
    if sys.b_field != 0.0 {
        return Err(Error::Domain(format!(
            "{what} is the field-free limit; b_field = {} must be 0",
            sys.b_field
        )));
    }
    Ok(())
}

fn require_well(sys: &PhysicalSystem) -> Result<()> {
    if sys.v0 <= 0.0 {
        return Err(Error::Domain(format!("v0 = {} must be positive", sys.v0)));
    }
    Ok(())
}

/// Non-relativistic pseudoharmonic level without fields:
/// `E = −2V₀ + (1 + 2n + √(m² + 2V₀r₀²))·√(2V₀/r₀²)`.
pub fn nonrel_pho_energy(sys: &PhysicalSystem, state: &QuantumState) -> Result<EnergyLevel> {
    sys.validate()?;
    require_well(sys)?;
    require_no_field(sys, "nonrel_pho")?;
    let (v0, rho0, m) = (sys.v0, sys.rho0, state.m_eff);
    let e = -2.0 * v0
        + (1.0 + 2.0 * f64::from(state.n) + (m * m + 2.0 * v0 * rho0 * rho0).sqrt())
            * (2.0 * v0 / (rho0 * rho0)).sqrt();
    Ok(EnergyLevel::new(sys, LevelKind::NonrelPho, *state, e))
}

/// Relativistic pseudoharmonic level without fields, the principal root of
/// `(2/r₀)√V₀ (1 + 2n + √(m² + V₀r₀²λ₁)) = (λ₂ + 2V₀)√λ₁`.
pub fn kg_pho_energy(sys: &PhysicalSystem, state: &QuantumState) -> Result<EnergyLevel> {
    sys.validate()?;
    require_well(sys)?;
    require_no_field(sys, "kg_pho")?;
    if sys.flux_xi != 0.0 {
        return Err(Error::Domain(format!(
            "kg_pho is the field-free limit; flux_xi = {} must be 0",
            sys.flux_xi
        )));
    }
    let (v0, rho0, m) = (sys.v0, sys.rho0, state.m_eff);
    let n = f64::from(state.n);
    let g = |e: f64| {
        let lambda1 = e + 1.0;
        let lambda2 = e - 1.0;
        (lambda2 + 2.0 * v0) * lambda1.sqrt()
            - 2.0 / rho0 * v0.sqrt() * (1.0 + 2.0 * n + (m * m + v0 * rho0 * rho0 * lambda1).sqrt())
    };
    let (lo, hi) = energy_window(sys, state, Branch::Positive)?;
    let hi = extend_cap(&g, lo, hi);
    let mut levels: Vec<EnergyLevel> = scan_roots(&g, lo, hi, SCAN_POINTS)
        .into_iter()
        .map(|e| EnergyLevel::new(sys, LevelKind::KgPho, *state, e))
        .collect();
    let reference = 1.0 + nonrel_pho_energy(sys, state)?.energy;
    mark_principal(&mut levels, reference);
    levels
        .into_iter()
        .find(|l| l.principal)
        .ok_or_else(|| Error::NoRoot(format!("kg_pho n={} m={}", state.n, state.m)))
}

/// Which closed form of the harmonic cubic to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CardanoVariant {
    /// `E = (1 + 4T^(−1/3) + T^(1/3))/3`, the Cardano root of
    /// `(E+1)(E−1)² = 2kn′²`.
    Corrected,
    /// `E = (1 + T^(−1/3) + T^(1/3))/3`, kept for comparison only; it does
    /// not satisfy the harmonic energy equation.
    UnitCoefficient,
}

/// Harmonic-limit quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoParams {
    /// `k = 2V₀/r₀²`
    pub k: f64,
    /// `n′ = 1 + |m′| + 2n`
    pub n_prime: f64,
    /// Cardano intermediate; `None` below the `27kn′² ≥ 16` threshold.
    pub t: Option<f64>,
    /// `ω_D′ = √(k/M)`
    pub omega_dp: f64,
    pub bisection_energy: f64,
    pub closed_form_energy: Option<f64>,
}

/// `T = 27kn′² − 8 + 3n′√(3k(27kn′² − 16))`, real only when `27kn′² ≥ 16`.
pub fn cardano_t(k: f64, n_prime: f64) -> Option<f64> {
    let d = 27.0 * k * n_prime * n_prime;
    if d < 16.0 {
        return None;
    }
    Some(d - 8.0 + 3.0 * n_prime * (3.0 * k * (d - 16.0)).sqrt())
}

pub fn ho_cardano(k: f64, n_prime: f64, variant: CardanoVariant) -> Option<f64> {
    let t = cardano_t(k, n_prime)?;
    let c = t.cbrt();
    let coeff = match variant {
        CardanoVariant::Corrected => 4.0,
        CardanoVariant::UnitCoefficient => 1.0,
    };
    Some((1.0 + coeff / c + c) / 3.0)
}

/// `n′√(2k) − √λ₁ λ₂`, the harmonic energy equation.
pub fn ho_residual(k: f64, n_prime: f64, energy: f64) -> f64 {
    n_prime * (2.0 * k).sqrt() - (energy + 1.0).sqrt() * (energy - 1.0)
}

fn ho_quantities(sys: &PhysicalSystem, state: &QuantumState) -> Result<(f64, f64)> {
    sys.validate()?;
    require_no_field(sys, "harmonic limit")?;
    let k = sys.spring_constant();
    if k <= 0.0 {
        return Err(Error::Domain(format!("spring constant k = {k} must be positive")));
    }
    let n_prime = 1.0 + state.m_eff.abs() + 2.0 * f64::from(state.n);
    Ok((k, n_prime))
}

/// Relativistic harmonic level, the unique root above `Mc²` of
/// `n′√(2k) = √λ₁ λ₂`, by bisection and (when `27kn′² ≥ 16`) by Cardano.
pub fn kg_ho_energy(sys: &PhysicalSystem, state: &QuantumState) -> Result<(EnergyLevel, HoParams)> {
    let (k, n_prime) = ho_quantities(sys, state)?;
    let q = 2.0 * k * n_prime * n_prime;
    let h = |e: f64| -ho_residual(k, n_prime, e);
    let bisected = bisect(&h, 1.0, 2.0 + (0.5 * q).sqrt());
    let closed = ho_cardano(k, n_prime, CardanoVariant::Corrected);
    if closed.is_none() {
        log::debug!("27 k n'^2 < 16 for k = {k}, n' = {n_prime}: closed form not real, using bisection");
    }
    let energy = closed.unwrap_or(bisected);
    let params = HoParams {
        k,
        n_prime,
        t: cardano_t(k, n_prime),
        omega_dp: k.sqrt(),
        bisection_energy: bisected,
        closed_form_energy: closed,
    };
    Ok((EnergyLevel::new(sys, LevelKind::KgHo, *state, energy), params))
}

/// Right-hand side of `n′ħ = √(M/k)[λ₂ + λ₂²/4 − λ₂³/32 + …]` truncated
/// after `order` terms.
pub fn kg_ho_series(sys: &PhysicalSystem, lambda2: f64, order: u32) -> Result<f64> {
    let k = sys.spring_constant();
    if k <= 0.0 {
        return Err(Error::Domain(format!("spring constant k = {k} must be positive")));
    }
    let terms = [lambda2, lambda2 * lambda2 / 4.0, -lambda2.powi(3) / 32.0];
    let kept = match order {
        1..=3 => &terms[..order as usize],
        _ => return Err(Error::UnsupportedOrder(order)),
    };
    Ok(kept.iter().sum::<f64>() / k.sqrt())
}

/// Non-relativistic harmonic level `E′ = (1 + |m| + 2n)√k`.
pub fn nonrel_ho_energy(sys: &PhysicalSystem, state: &QuantumState) -> Result<EnergyLevel> {
    let (k, n_prime) = ho_quantities(sys, state)?;
    Ok(EnergyLevel::new(sys, LevelKind::NonrelHo, *state, n_prime * k.sqrt()))
}

/// How a single level is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Positive,
    Negative,
    Free,
    Nonrel,
    KgPho,
    KgHo,
    NonrelHo,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Positive,
        Method::Negative,
        Method::Free,
        Method::Nonrel,
        Method::KgPho,
        Method::KgHo,
        Method::NonrelHo,
    ];

    /// Kind of the levels this method produces for `sys`.
    pub fn kind(&self, sys: &PhysicalSystem) -> LevelKind {
        match self {
            Method::Positive => LevelKind::Positive,
            Method::Negative if sys.v0 == 0.0 => LevelKind::FreeField,
            Method::Negative => LevelKind::Negative,
            Method::Free => LevelKind::FreeField,
            Method::Nonrel => LevelKind::NonrelFields,
            Method::KgPho => LevelKind::KgPho,
            Method::KgHo => LevelKind::KgHo,
            Method::NonrelHo => LevelKind::NonrelHo,
        }
    }
}

/// The principal level of `state` by `method`.
pub fn principal_level(
    sys: &PhysicalSystem,
    state: &QuantumState,
    method: Method,
) -> Result<EnergyLevel> {
    let branch = match method {
        Method::Positive => Branch::Positive,
        Method::Negative => Branch::Negative,
        Method::Free => return free_field_level(sys, state),
        Method::Nonrel => return nonrel_energy_with_fields(sys, state).map(|(l, _)| l),
        Method::KgPho => return kg_pho_energy(sys, state),
        Method::KgHo => return kg_ho_energy(sys, state).map(|(l, _)| l),
        Method::NonrelHo => return nonrel_ho_energy(sys, state),
    };
    solve_kg_energy(sys, state, branch)?
        .into_iter()
        .find(|l| l.principal)
        .ok_or_else(|| {
            Error::NoRoot(format!(
                "{branch:?} branch, n = {}, m = {}: no sign change in the scan window",
                state.n, state.m
            ))
        })
}
