use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{principal_level, EnergyLevel, Method};
use crate::error::{Error, Result};
use crate::model::{PhysicalSystem, QuantumState};

/// Parameter varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    BField,
    FluxXi,
    V0,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRange {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl SweepRange {
    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * i as f64 / last
                }
            })
            .collect()
    }
}

/// One (parameter value, state) point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub state: QuantumState,
    pub level: std::result::Result<EnergyLevel, Error>,
    /// `E(n, m) − E(n, m_prev)` for the previous `m` at the same `n` and
    /// parameter value.
    pub delta_e: Option<f64>,
}

fn with_param(template: &PhysicalSystem, vary: SweepParam, value: f64) -> PhysicalSystem {
    let mut sys = *template;
    match vary {
        SweepParam::BField => sys.b_field = value,
        SweepParam::FluxXi => sys.flux_xi = value,
        SweepParam::V0 => sys.v0 = value,
    }
    sys
}

/// Principal levels of every `(n, m)` in `states` at each grid value of
/// `vary`. Rows are ordered by (parameter value, n, m) and a failing point
/// is kept as an error row.
pub fn sweep_levels(
    template: &PhysicalSystem,
    vary: SweepParam,
    range: SweepRange,
    states: &[(u32, i32)],
    method: Method,
) -> Result<Vec<SweepRow>> {
    if range.steps < 2 {
        return Err(Error::Domain(format!("sweep needs steps >= 2, got {}", range.steps)));
    }
    if !range.lo.is_finite() || !range.hi.is_finite() {
        return Err(Error::NonFinite("sweep range"));
    }
    let mut states = states.to_vec();
    states.sort_unstable();
    states.dedup();

    let points: Vec<(f64, u32, i32)> = range
        .values()
        .into_iter()
        .flat_map(|p| states.iter().map(move |&(n, m)| (p, n, m)))
        .collect();

    let mut rows: Vec<SweepRow> = points
        .par_iter()
        .map(|&(p, n, m)| {
            let sys = with_param(template, vary, p);
            let state = QuantumState::new(n, m, sys.flux_xi);
            let level = sys
                .validate()
                .and_then(|_| principal_level(&sys, &state, method));
            SweepRow {
                param: p,
                state,
                level,
                delta_e: None,
            }
        })
        .collect();

    for i in 1..rows.len() {
        let (prev, cur) = (&rows[i - 1], &rows[i]);
        if prev.param.to_bits() == cur.param.to_bits() && prev.state.n == cur.state.n {
            if let (Ok(a), Ok(b)) = (&prev.level, &cur.level) {
                rows[i].delta_e = Some(b.energy - a.energy);
            }
        }
    }
    Ok(rows)
}
