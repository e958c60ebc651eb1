//! Finite-difference check of the radial equation
//!
//! ```text
//! R″ − (β² − ¼)/r² R + ν² R − γ² r² R = 0,   g(r) = R(r)/√r
//! ```
//!
//! Two discretizations are available. [`Scheme::Singular`] applies central
//! differences to `−d²/dr² + γ²r² + (β²−¼)/r²` on a grid starting at a small
//! `r_min`, with Dirichlet ends. Its error carries an `h^(2β)` term from the
//! inverse-square potential, which for `½ < β < 1` spoils both the accuracy
//! and the `h²` refinement ratio. [`Scheme::Regular`] (the default) writes
//! `R = r^(β+½) w`, which turns the problem into
//!
//! ```text
//! −(r^(2β+1) w′)′ / r^(2β+1) + γ² r² w = ν² w
//! ```
//!
//! with a smooth `w`, and discretizes it on cell centres `(i+½)h` of
//! `[0, r_max]`. After the diagonal similarity `v = r^(β+½) w` the matrix is
//! symmetric tridiagonal and its error is `O(h²)` for every `β > 0`.
//!
//! In both cases the low eigenvalues (which approximate `ν²`) come from
//! Sturm-sequence bisection. Nothing here evaluates an analytic
//! quantization formula.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::model::{PhysicalSystem, SpectralParams};
use crate::spectra::{level_params, EnergyLevel};

/// Uniform interior grid `r_i = r_min + (i+1)h`, `i = 0..n_points`, with
/// `h = (r_max − r_min)/(n_points + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub n_points: usize,
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, n_points: usize) -> Result<Self> {
        ensure_finite(r_min, "r_min")?;
        ensure_finite(r_max, "r_max")?;
        if !(r_min > 0.0 && r_min < r_max) {
            return Err(Error::Domain(format!(
                "grid needs 0 < r_min < r_max, got r_min = {r_min}, r_max = {r_max}"
            )));
        }
        if n_points < 100 {
            return Err(Error::Domain(format!("grid needs >= 100 points, got {n_points}")));
        }
        Ok(Self { r_min, r_max, n_points })
    }

    pub fn h(&self) -> f64 {
        (self.r_max - self.r_min) / (self.n_points + 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.r_min + (i + 1) as f64 * self.h()
    }

    /// Same interval with exactly half the spacing (`2N + 1` interior points).
    pub fn refined(&self) -> Self {
        Self {
            n_points: 2 * self.n_points + 1,
            ..*self
        }
    }
}

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleWarning {
    /// `h²γ²r_max² > 0.1`.
    GridTooCoarse { h2_v_max: f64 },
    /// `β < ½`: the Dirichlet condition at `r_min` is only approximate.
    ReducedConfidence { beta: f64 },
    /// Extrapolated deviation above the configured tolerance.
    NoConvergence { deviation: f64, tol: f64 },
}

pub fn grid_warnings(beta: f64, gamma: f64, grid: &RadialGrid) -> Vec<OracleWarning> {
    let mut out = Vec::new();
    let h = grid.h();
    let h2_v_max = h * h * gamma * gamma * grid.r_max * grid.r_max;
    if h2_v_max > 0.1 {
        out.push(OracleWarning::GridTooCoarse { h2_v_max });
    }
    if beta < 0.5 {
        out.push(OracleWarning::ReducedConfidence { beta });
    }
    out
}

/// Discrete `−d²/dr² + γ²r² + (β²−¼)/r²` on the interior points of `grid`.
pub fn discretize(beta: f64, gamma: f64, grid: &RadialGrid) -> Result<TridiagonalOperator> {
    ensure_finite(beta, "beta")?;
    ensure_finite(gamma, "gamma")?;
    if beta <= 0.0 || gamma <= 0.0 {
        return Err(Error::Domain(format!(
            "discretize needs beta > 0 and gamma > 0, got {beta}, {gamma}"
        )));
    }
    for w in grid_warnings(beta, gamma, grid) {
        if let OracleWarning::GridTooCoarse { h2_v_max } = w {
            log::warn!("oracle grid too coarse: h^2 max V = {h2_v_max:.3e}");
        }
    }
    Ok(discretize_unchecked(beta, gamma, grid))
}

fn discretize_unchecked(beta: f64, gamma: f64, grid: &RadialGrid) -> TridiagonalOperator {
    let h = grid.h();
    let inv_h2 = 1.0 / (h * h);
    let centrifugal = beta * beta - 0.25;
    let g2 = gamma * gamma;
    let diag = (0..grid.n_points)
        .map(|i| {
            let r = grid.point(i);
            2.0 * inv_h2 + g2 * r * r + centrifugal / (r * r)
        })
        .collect();
    TridiagonalOperator {
        diag,
        offdiag: vec![-inv_h2; grid.n_points - 1],
    }
}

/// Cell-centred discretization of the regular form on `[0, r_max]` with
/// `cells` cells, symmetrized. Row `i` belongs to `r_i = (i+½)h`, `h = r_max/cells`;
/// `w` vanishes one half cell beyond `r_max`.
pub fn discretize_regular(beta: f64, gamma: f64, r_max: f64, cells: usize) -> Result<TridiagonalOperator> {
    ensure_finite(beta, "beta")?;
    ensure_finite(gamma, "gamma")?;
    ensure_finite(r_max, "r_max")?;
    if beta <= 0.0 || gamma <= 0.0 || r_max <= 0.0 {
        return Err(Error::Domain(format!(
            "discretize_regular needs beta, gamma, r_max > 0, got {beta}, {gamma}, {r_max}"
        )));
    }
    if cells < 100 {
        return Err(Error::Domain(format!("grid needs >= 100 cells, got {cells}")));
    }
    let h = r_max / cells as f64;
    let inv_h2 = 1.0 / (h * h);
    let a = 2.0 * beta + 1.0;
    let g2 = gamma * gamma;
    let centre = |i: usize| (i as f64 + 0.5) * h;
    // (face/centre)^a and face^a/√(centre_i^a centre_{i+1}^a), in logs to
    // stay finite for large β
    let up = |i: usize| (a * ((i + 1) as f64 / (i as f64 + 0.5)).ln()).exp();
    let down = |i: usize| {
        if i == 0 {
            0.0
        } else {
            (a * (i as f64 / (i as f64 + 0.5)).ln()).exp()
        }
    };
    let diag = (0..cells)
        .map(|i| {
            let r = centre(i);
            (up(i) + down(i)) * inv_h2 + g2 * r * r
        })
        .collect();
    let offdiag = (0..cells - 1)
        .map(|i| {
            let f = (i + 1) as f64;
            let l = a * (f.ln() - 0.5 * ((i as f64 + 0.5).ln() + (i as f64 + 1.5).ln()));
            -l.exp() * inv_h2
        })
        .collect();
    Ok(TridiagonalOperator { diag, offdiag })
}

/// `vᵀAv/vᵀv` for the regular-scheme matrix, written as a sum of squares
/// so that the `1/h²` parts do not cancel.
fn regular_rayleigh(beta: f64, gamma: f64, r_max: f64, v: &[f64]) -> f64 {
    let cells = v.len();
    let h = r_max / cells as f64;
    let half_a = beta + 0.5;
    let mut kinetic = 0.0;
    let mut potential = 0.0;
    let mut mass = 0.0;
    for (i, &vi) in v.iter().enumerate() {
        let c = i as f64 + 0.5;
        let face = (i + 1) as f64;
        let lead = (half_a * (face / c).ln()).exp();
        let d = if i + 1 < cells {
            let trail = (half_a * (face / (c + 1.0)).ln()).exp();
            trail * v[i + 1] - lead * vi
        } else {
            lead * vi
        };
        kinetic += d * d;
        let r = c * h;
        potential += gamma * gamma * r * r * vi * vi;
        mass += vi * vi;
    }
    (kinetic / (h * h) + potential) / mass
}

/// `vᵀAv/vᵀv` for the singular-scheme matrix on `grid`.
fn singular_rayleigh(beta: f64, gamma: f64, grid: &RadialGrid, v: &[f64]) -> f64 {
    let h = grid.h();
    let centrifugal = beta * beta - 0.25;
    let mut kinetic = v[0] * v[0] + v[v.len() - 1] * v[v.len() - 1];
    let mut potential = 0.0;
    let mut mass = 0.0;
    for (i, &vi) in v.iter().enumerate() {
        if i + 1 < v.len() {
            let d = v[i + 1] - vi;
            kinetic += d * d;
        }
        let r = grid.point(i);
        potential += (gamma * gamma * r * r + centrifugal / (r * r)) * vi * vi;
        mass += vi * vi;
    }
    (kinetic / (h * h) + potential) / mass
}

/// Bisection value of eigenvalue `k`, polished by the Rayleigh quotient of
/// its inverse-iteration eigenvector. Bisection alone is limited to about
/// `ε‖A‖ ~ ε/h²`, which on fine grids swamps the `h²` error being measured.
fn polished_eigenvalue(op: &TridiagonalOperator, k: usize, rayleigh: impl Fn(&[f64]) -> f64) -> f64 {
    let lambda = op.eigenvalue(k);
    let rq = rayleigh(&op.eigenvector(lambda));
    let (lo, hi) = op.gershgorin();
    // fall back if inverse iteration locked onto a neighbour
    if rq.is_finite() && (rq - lambda).abs() <= 1e-12 * (hi - lo).max(1.0) {
        rq
    } else {
        lambda
    }
}

impl TridiagonalOperator {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x`, from the signs of the
    /// pivots of `T − xI = LDLᵀ`.
    pub fn sturm_count(&self, x: f64) -> usize {
        let max_off2 = self.offdiag.iter().fold(1.0f64, |a, b| a.max(b * b));
        let pivmin = f64::MIN_POSITIVE * max_off2;
        let mut count = 0;
        let mut d = self.diag[0] - x;
        for i in 0..self.len() {
            if i > 0 {
                d = self.diag[i] - x - self.offdiag[i - 1] * self.offdiag[i - 1] / d;
            }
            if d.abs() < pivmin {
                d = -pivmin;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based), bisected until the bracket
    /// cannot shrink further.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..2000 {
            let mid = lo + 0.5 * (hi - lo);
            if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
            if self.sturm_count(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo + 0.5 * (hi - lo)
    }

    /// Eigenvector for an (accurate) eigenvalue by inverse iteration with a
    /// pivoted tridiagonal LU factorization.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let mut x = vec![1.0; n];
        let lu = PivotedLu::factor(self, lambda);
        for _ in 0..3 {
            lu.solve(&mut x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        x
    }
}

/// `count` smallest eigenvalues, ascending.
pub fn lowest_eigenvalues(op: &TridiagonalOperator, count: usize) -> Result<Vec<f64>> {
    if count == 0 || count > op.len() {
        return Err(Error::Domain(format!(
            "count = {count} must be in 1..={}",
            op.len()
        )));
    }
    Ok((0..count).map(|k| op.eigenvalue(k)).collect())
}

/// Sign changes of a sampled vector, ignoring entries below `1e−8` of its
/// largest magnitude.
pub fn sign_changes(v: &[f64]) -> usize {
    let max = v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let floor = 1e-8 * max;
    let mut last = 0.0;
    let mut changes = 0;
    for &x in v {
        if x.abs() <= floor {
            continue;
        }
        let s = x.signum();
        if last != 0.0 && s != last {
            changes += 1;
        }
        last = s;
    }
    changes
}

struct PivotedLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl PivotedLu {
    fn factor(op: &TridiagonalOperator, shift: f64) -> Self {
        let n = op.len();
        let mut dl = op.offdiag.clone();
        let mut du = op.offdiag.clone();
        let mut d: Vec<f64> = op.diag.iter().map(|a| a - shift).collect();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let tiny = f64::EPSILON * d.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1.0);
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        Self { dl, d, du, du2, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

/// Discretization used by [`verify_params`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Regular form on cell centres; grids of `N`, `2N` and `4N` cells.
    #[default]
    Regular,
    /// Singular form on [`RadialGrid`]s of `N`, `2N+1` and `4N+3` points.
    Singular,
}

/// Oracle settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Points (or cells) of the coarsest grid.
    pub n_points: usize,
    /// Outer radius; `None` picks one from the state.
    pub r_max: Option<f64>,
    /// `r_min` in units of the oscillator length `1/√γ`.
    pub r_min_scale: f64,
    /// Tolerance for the no-convergence flag.
    pub tol: f64,
    #[serde(default)]
    pub scheme: Scheme,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            n_points: 4000,
            r_max: None,
            r_min_scale: 1e-6,
            tol: 1e-5,
            scheme: Scheme::Regular,
        }
    }
}

/// Oracle outcome for one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub nu2_analytic: f64,
    /// Raw eigenvalues on the coarse, middle and fine grids.
    pub nu2_grids: [f64; 3],
    /// Richardson value from the two finer grids.
    pub nu2_extrapolated: f64,
    pub deviation: f64,
    /// `(λ_N − λ_2N)/(λ_2N − λ_4N)`, close to 4 for a second-order scheme.
    /// NaN when the grid differences are at rounding level, as happens for
    /// `β = 1, n = 0` where the regular scheme has no `h²` error term.
    pub convergence_ratio: f64,
    pub warnings: Vec<OracleWarning>,
}

impl Verification {
    pub fn converged(&self) -> bool {
        !self
            .warnings
            .iter()
            .any(|w| matches!(w, OracleWarning::NoConvergence { .. }))
    }
}

/// Outer radius for an oscillator of scale `γ` whose eigenvalue is near `nu2`.
pub fn outer_radius(gamma: f64, nu2: f64, cfg: &OracleConfig) -> f64 {
    cfg.r_max
        .unwrap_or_else(|| (2.5 * nu2.max(0.0).sqrt() / gamma).max((50.0 / gamma).sqrt()))
}

/// Singular-scheme grid for an oscillator of scale `γ`.
pub fn grid_for(gamma: f64, nu2: f64, cfg: &OracleConfig) -> Result<RadialGrid> {
    let r_scale = 1.0 / gamma.sqrt();
    RadialGrid::new(cfg.r_min_scale * r_scale, outer_radius(gamma, nu2, cfg), cfg.n_points)
}

/// Compares `params.nu2` with the `(n+1)`-th discrete eigenvalue of the
/// operator built from `(β, γ)`.
pub fn verify_params(params: &SpectralParams, n: u32, cfg: &OracleConfig) -> Result<Verification> {
    if !params.is_bound() {
        return Err(Error::Degenerate(format!(
            "beta2 = {}, gamma2 = {}: nothing to verify",
            params.beta2, params.gamma2
        )));
    }
    let (beta, gamma) = (params.beta(), params.gamma());
    let k = n as usize;
    let mut nu2_grids = [0.0; 3];
    let mut warnings = Vec::new();
    match cfg.scheme {
        Scheme::Regular => {
            let r_max = outer_radius(gamma, params.nu2, cfg);
            ensure_finite(r_max, "r_max")?;
            let h = r_max / cfg.n_points as f64;
            let h2_v_max = h * h * gamma * gamma * r_max * r_max;
            if h2_v_max > 0.1 {
                warnings.push(OracleWarning::GridTooCoarse { h2_v_max });
            }
            for (slot, cells) in nu2_grids.iter_mut().zip([1, 2, 4]) {
                let op = discretize_regular(beta, gamma, r_max, cells * cfg.n_points)?;
                if k >= op.len() {
                    return Err(Error::Domain(format!("level {k} beyond the grid")));
                }
                *slot = polished_eigenvalue(&op, k, |v| regular_rayleigh(beta, gamma, r_max, v));
            }
        }
        Scheme::Singular => {
            let coarse = grid_for(gamma, params.nu2, cfg)?;
            let fine = coarse.refined();
            let finest = fine.refined();
            for (slot, grid) in nu2_grids.iter_mut().zip([coarse, fine, finest]) {
                let op = discretize(beta, gamma, &grid)?;
                *slot = polished_eigenvalue(&op, k, |v| singular_rayleigh(beta, gamma, &grid, v));
            }
            warnings = grid_warnings(beta, gamma, &coarse);
        }
    }
    let extrapolated = (4.0 * nu2_grids[1] - nu2_grids[0]) / 3.0;
    let deviation = ((params.nu2 - extrapolated) / params.nu2).abs();
    let (d1, d2) = (nu2_grids[0] - nu2_grids[1], nu2_grids[1] - nu2_grids[2]);
    let floor = 1e-12 * nu2_grids[2].abs();
    let convergence_ratio = if d1.abs() <= floor || d2.abs() <= floor {
        f64::NAN
    } else {
        d1 / d2
    };

    if !(deviation <= cfg.tol) {
        warnings.push(OracleWarning::NoConvergence {
            deviation,
            tol: cfg.tol,
        });
    }
    Ok(Verification {
        nu2_analytic: params.nu2,
        nu2_grids,
        nu2_extrapolated: extrapolated,
        deviation,
        convergence_ratio,
        warnings,
    })
}

/// Verifies a solved level and stores the deviation in `level.oracle_dev`.
pub fn verify_level(
    sys: &PhysicalSystem,
    level: &mut EnergyLevel,
    cfg: &OracleConfig,
) -> Result<Verification> {
    let params = level_params(sys, level.kind, &level.state, level.energy);
    let v = verify_params(&params, level.state.n, cfg)?;
    level.oracle_dev = Some(v.deviation);
    Ok(v)
}
