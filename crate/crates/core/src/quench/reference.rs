use super::{expand_initial_state, ObservableTable};
use crate::error::{Error, Result};
use crate::linalg::BandedSymmetricMatrix;
use crate::models::StateVector;
use crate::spectral::{dot, ParitySpectrum};

/// Relative size below which an overlap is dropped from the raw dynamics.
const NEGLIGIBLE_OVERLAP: f64 = 1e-14;

/// Average of `⟨Ψ(t)|A|Ψ(t)⟩` over `samples` equally spaced times in
/// `[0, T]`, with no assumption about degeneracies.
pub fn time_average_oracle(psi: &StateVector, spectrum: &ParitySpectrum, a: &BandedSymmetricMatrix, t_max: f64, samples: usize) -> Result<f64> {
    if samples == 0 || !(t_max >= 0.0) {
        return Err(Error::Config("time average needs samples ≥ 1 and T ≥ 0".into()));
    }
    let c = expand_initial_state(psi, spectrum)?;
    let largest = c.plus.iter().chain(&c.minus).fold(0.0f64, |m, x| m.max(x.abs()));
    let mut active = Vec::new();
    for parity in [1i8, -1] {
        let sector = spectrum.sector(parity);
        for (k, &ck) in c.sector(parity).iter().enumerate() {
            if ck.abs() > NEGLIGIBLE_OVERLAP * largest {
                active.push((sector.values[k], ck, sector.vector(k)));
            }
        }
    }
    let images: Vec<Vec<f64>> = active.iter().map(|(_, _, v)| a.matvec(v)).collect();
    let mut constant = 0.0;
    let mut pairs = Vec::new();
    for (i, (ei, ci, vi)) in active.iter().enumerate() {
        constant += ci * ci * dot(vi, &images[i]);
        for (j, (ej, cj, _)) in active.iter().enumerate().skip(i + 1) {
            let m = 2.0 * ci * cj * dot(vi, &images[j]);
            if m != 0.0 {
                pairs.push((ei - ej, m));
            }
        }
    }
    let step = if samples > 1 { t_max / (samples - 1) as f64 } else { 0.0 };
    let total: f64 = (0..samples)
        .map(|s| {
            let t = s as f64 * step;
            pairs.iter().map(|&(w, m)| m * (w * t).cos()).sum::<f64>()
        })
        .sum();
    Ok(constant + total / samples as f64)
}

/// Canonical average `Σ e^{-βE} ⟨E|A|E⟩ / Z` over the parity eigenbasis.
pub fn thermal_reference(spectrum: &ParitySpectrum, beta: f64, a: &BandedSymmetricMatrix) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Config(format!("β must be positive, got {beta}")));
    }
    let table = ObservableTable::new(spectrum, a)?;
    let e0 = spectrum.ground_energy;
    let (mut z, mut acc) = (0.0, 0.0);
    for (values, diag) in [(&spectrum.plus.values, &table.plus), (&spectrum.minus.values, &table.minus)] {
        for (e, d) in values.iter().zip(diag) {
            let w = (-beta * (e - e0)).exp();
            z += w;
            acc += w * d;
        }
    }
    Ok(acc / z)
}
