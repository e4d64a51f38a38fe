use serde::{Deserialize, Serialize};

use super::ParitySpectrum;
use crate::models::{ordered_side, semiclassical_critical_energy, Side};

/// How opposite-parity levels are matched into degenerate doublets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum PairingRule {
    None,
    /// Every level on the ordered side of `cutoff` (excitation energy).
    Cutoff { cutoff: f64 },
    /// Consecutive doublets from the ordered end while their splitting
    /// stays below `max_splitting`.
    Splitting { max_splitting: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Doublet {
    pub id: usize,
    pub index_plus: usize,
    pub index_minus: usize,
    pub splitting: f64,
    /// Mean excitation energy of the two members.
    pub excitation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pairing {
    pub rule: PairingRule,
    pub side: Option<Side>,
    pub doublets: Vec<Doublet>,
    /// Levels on the ordered side left without a partner.
    pub orphans: usize,
    pub max_splitting: f64,
    /// Largest splitting in units of the local mean level spacing.
    pub max_splitting_ratio: f64,
    pub warnings: Vec<String>,
}

impl Pairing {
    pub fn empty() -> Self {
        Self {
            rule: PairingRule::None,
            side: None,
            doublets: Vec::new(),
            orphans: 0,
            max_splitting: 0.0,
            max_splitting_ratio: 0.0,
            warnings: Vec::new(),
        }
    }
}

/// Index of the `k`-th level counted from the ordered end.
pub(crate) fn from_end(len: usize, k: usize, side: Side) -> usize {
    match side {
        Side::Below => k,
        Side::Above => len - 1 - k,
    }
}

/// Mean spacing of `window` consecutive levels centred on `k`, with levels
/// listed from the ordered end.
pub(crate) fn local_spacing(values: &[f64], k: usize, window: usize, side: Side) -> f64 {
    let half = window / 2;
    let len = values.len();
    if len < 2 {
        return f64::NAN;
    }
    let lo = k.saturating_sub(half);
    let hi = (k + half).min(len - 1);
    let (lo, hi) = if hi > lo { (lo, hi) } else { (len - 2, len - 1) };
    let a = values[from_end(len, lo, side)];
    let b = values[from_end(len, hi, side)];
    (b - a).abs() / (hi - lo) as f64
}

const DIAGNOSTIC_WINDOW: usize = 11;

fn build(spectrum: &ParitySpectrum, side: Side, count: usize, rule: PairingRule) -> Pairing {
    let egs = spectrum.ground_energy;
    let (plus, minus) = (&spectrum.plus.values, &spectrum.minus.values);
    let mut doublets = Vec::with_capacity(count);
    let mut max_splitting: f64 = 0.0;
    let mut max_ratio: f64 = 0.0;
    for k in 0..count {
        let ip = from_end(plus.len(), k, side);
        let im = from_end(minus.len(), k, side);
        let splitting = (plus[ip] - minus[im]).abs();
        max_splitting = max_splitting.max(splitting);
        let spacing = local_spacing(plus, k, DIAGNOSTIC_WINDOW, side);
        if spacing > 0.0 {
            max_ratio = max_ratio.max(splitting / spacing);
        }
        doublets.push(Doublet {
            id: k,
            index_plus: ip,
            index_minus: im,
            splitting,
            excitation: 0.5 * (plus[ip] + minus[im]) - egs,
        });
    }
    let mut warnings = Vec::new();
    if max_ratio > 0.5 {
        warnings.push(format!(
            "paired splittings reach {max_ratio:.3} mean level spacings; levels are not degenerate"
        ));
    }
    Pairing {
        rule,
        side: Some(side),
        doublets,
        orphans: 0,
        max_splitting,
        max_splitting_ratio: max_ratio,
        warnings,
    }
}

/// Pairs the k-th `+` level with the k-th `-` level, counted from the
/// ordered end, for every level on the ordered side of `cutoff`
/// (an excitation energy above the ground state).
pub fn pair_doublets(mut spectrum: ParitySpectrum, cutoff: f64, side: Side) -> ParitySpectrum {
    let egs = spectrum.ground_energy;
    let inside = |v: &[f64]| v.iter().filter(|&&e| side.contains(e - egs, cutoff)).count();
    let np = inside(&spectrum.plus.values);
    let nm = inside(&spectrum.minus.values);
    let mut pairing = build(&spectrum, side, np.min(nm), PairingRule::Cutoff { cutoff });
    pairing.orphans = np.abs_diff(nm);
    if pairing.orphans > 0 {
        pairing
            .warnings
            .push(format!("{} unpaired levels inside the cutoff ({np} +, {nm} -)", pairing.orphans));
    }
    spectrum.pairing = pairing;
    spectrum
}

/// Pairs consecutive doublets from the ordered end while the splitting is
/// below `max_splitting`.
pub fn pair_by_splitting(mut spectrum: ParitySpectrum, max_splitting: f64, side: Side) -> ParitySpectrum {
    let (plus, minus) = (&spectrum.plus.values, &spectrum.minus.values);
    let limit = plus.len().min(minus.len());
    let count = (0..limit)
        .take_while(|&k| {
            let ip = from_end(plus.len(), k, side);
            let im = from_end(minus.len(), k, side);
            (plus[ip] - minus[im]).abs() < max_splitting
        })
        .count();
    spectrum.pairing = build(&spectrum, side, count, PairingRule::Splitting { max_splitting });
    spectrum
}

/// Ordered side and excitation-energy cutoff given by the semiclassical
/// critical energy of `spectrum.spec`.
pub fn semiclassical_cutoff(spectrum: &ParitySpectrum) -> Option<(Side, f64)> {
    let side = ordered_side(&spectrum.spec)?;
    Some((side, semiclassical_critical_energy(&spectrum.spec) - spectrum.ground_energy))
}

/// Applies the default pairing: levels up to the semiclassical critical
/// energy. A spectrum in the normal phase gets an empty pairing.
pub fn with_semiclassical_pairing(spectrum: ParitySpectrum) -> ParitySpectrum {
    match semiclassical_cutoff(&spectrum) {
        Some((side, cutoff)) => pair_doublets(spectrum, cutoff, side),
        None => {
            let mut s = spectrum;
            s.pairing = Pairing::empty();
            s.pairing.warnings.push("normal phase: no degenerate doublets".into());
            s
        }
    }
}
