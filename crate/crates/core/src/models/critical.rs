use serde::{Deserialize, Serialize};

use super::{ModelKind, ModelSpec};

/// Which end of the spectrum hosts the symmetry-broken doublets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Below,
    Above,
}

impl Side {
    /// True when `energy` lies on the ordered side of `cutoff`.
    pub fn contains(self, energy: f64, cutoff: f64) -> bool {
        match self {
            Side::Below => energy < cutoff,
            Side::Above => energy > cutoff,
        }
    }
}

/// Magnitude of the ground-state critical coupling.
pub fn semiclassical_critical_coupling(spec: &ModelSpec) -> f64 {
    match spec.model {
        ModelKind::Bh => 2.0 * spec.j_hop.abs(),
        ModelKind::Lmg => 0.8,
        ModelKind::Dicke => 0.5 * (spec.omega * spec.omega0).sqrt(),
    }
}

/// Side of the spectrum where degenerate doublets live, or `None` when the
/// coupling is in the normal phase everywhere.
pub fn ordered_side(spec: &ModelSpec) -> Option<Side> {
    let lc = semiclassical_critical_coupling(spec);
    match spec.model {
        ModelKind::Bh if spec.lambda > lc => Some(Side::Below),
        ModelKind::Bh if spec.lambda < -lc => Some(Side::Above),
        ModelKind::Lmg if spec.lambda < lc => Some(Side::Below),
        ModelKind::Dicke if spec.lambda.abs() > lc => Some(Side::Below),
        _ => None,
    }
}

/// Semiclassical ESQPT energy as an absolute total energy.
///
/// BH: `N(J - λ/4)` for repulsive λ (doublets at the top) and
/// `-N(J + λ/4)` for attractive λ. LMG: `0`. Dicke: `-ω₀ N/2`.
pub fn semiclassical_critical_energy(spec: &ModelSpec) -> f64 {
    let n = spec.n as f64;
    match spec.model {
        ModelKind::Bh => {
            if spec.lambda > 0.0 {
                -n * (spec.j_hop + spec.lambda / 4.0)
            } else {
                n * (spec.j_hop - spec.lambda / 4.0)
            }
        }
        ModelKind::Lmg => 0.0,
        ModelKind::Dicke => -spec.omega0 * n / 2.0,
    }
}

/// Alternative readings of the critical-energy formula: per-particle or
/// total, with either sign. Labels are stable and appear in reports.
pub fn critical_energy_candidates(spec: &ModelSpec) -> Vec<(&'static str, f64)> {
    let total = semiclassical_critical_energy(spec);
    let per = total / spec.n as f64;
    vec![
        ("total", total),
        ("per_particle", per),
        ("total_negated", -total),
        ("per_particle_negated", -per),
    ]
}
