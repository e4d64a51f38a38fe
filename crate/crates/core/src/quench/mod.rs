//! Sudden quenches: expansion of the initial state in the post-quench
//! eigenbasis, the degeneracy-aware long-time ensemble and its expectation
//! values, plus time-average and thermal references.

mod reference;
mod run;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::BandedSymmetricMatrix;
use crate::models::{Basis, StateVector};
use crate::spectral::{dot, LevelId, ParitySpectrum};

pub use reference::{thermal_reference, time_average_oracle};
pub use run::{run_quench, QuenchContext, QuenchResult};

/// Overlaps `C = ⟨E_k ±|Ψ(0)⟩` of the initial state with every eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    /// `1 - Σ|C|²`.
    pub deficit: f64,
}

impl Coefficients {
    pub fn sector(&self, parity: i8) -> &[f64] {
        if parity > 0 {
            &self.plus
        } else {
            &self.minus
        }
    }

    pub fn get(&self, id: LevelId) -> f64 {
        self.sector(id.parity)[id.index]
    }
}

pub fn expand_initial_state(psi: &StateVector, spectrum: &ParitySpectrum) -> Result<Coefficients> {
    let expected = Basis::of(&spectrum.spec);
    if psi.basis != expected || psi.dim() != spectrum.plus.basis.full_dim() {
        return Err(Error::Config(format!(
            "initial state basis {:?} does not match spectrum basis {expected:?}",
            psi.basis
        )));
    }
    let plus = spectrum.plus.overlaps(&psi.amplitudes);
    let minus = spectrum.minus.overlaps(&psi.amplitudes);
    let total: f64 = plus.iter().chain(&minus).map(|c| c * c).sum();
    Ok(Coefficients {
        plus,
        minus,
        deficit: 1.0 - total,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossTerm {
    pub doublet: usize,
    pub index_plus: usize,
    pub index_minus: usize,
    /// `C₊ C₋`.
    pub coefficient: f64,
}

/// `ρ_eq` as diagonal weights on every level plus coherences inside the
/// paired doublets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumEnsemble {
    pub diagonal: Vec<(LevelId, f64)>,
    pub cross: Vec<CrossTerm>,
    pub total_weight: f64,
}

impl EquilibriumEnsemble {
    /// The same ensemble with every coherence removed.
    pub fn without_coherences(&self) -> Self {
        Self {
            cross: Vec::new(),
            ..self.clone()
        }
    }

    /// `Σ |w₊ - w₋| / Σ (w₊ + w₋)` over the paired doublets.
    pub fn weight_asymmetry(&self, c: &Coefficients) -> f64 {
        let (mut diff, mut sum) = (0.0, 0.0);
        for t in &self.cross {
            let (wp, wm) = (c.plus[t.index_plus].powi(2), c.minus[t.index_minus].powi(2));
            diff += (wp - wm).abs();
            sum += wp + wm;
        }
        if sum > 0.0 {
            diff / sum
        } else {
            0.0
        }
    }
}

pub fn build_equilibrium_ensemble(c: &Coefficients, spectrum: &ParitySpectrum) -> EquilibriumEnsemble {
    let diagonal: Vec<(LevelId, f64)> = [1i8, -1]
        .iter()
        .flat_map(|&parity| {
            c.sector(parity)
                .iter()
                .enumerate()
                .map(move |(index, x)| (LevelId { parity, index }, x * x))
        })
        .collect();
    let total_weight = diagonal.iter().map(|d| d.1).sum();
    let cross = spectrum
        .pairing
        .doublets
        .iter()
        .map(|d| CrossTerm {
            doublet: d.id,
            index_plus: d.index_plus,
            index_minus: d.index_minus,
            coefficient: c.plus[d.index_plus] * c.minus[d.index_minus],
        })
        .collect();
    EquilibriumEnsemble {
        diagonal,
        cross,
        total_weight,
    }
}

/// Matrix elements of an observable needed by `Tr[ρ_eq A]`: the diagonal
/// in each sector and `⟨v₊|A|v₋⟩` for each paired doublet.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableTable {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    /// Indexed like `spectrum.pairing.doublets`.
    pub doublets: Vec<f64>,
}

impl ObservableTable {
    pub fn new(spectrum: &ParitySpectrum, a: &BandedSymmetricMatrix) -> Result<Self> {
        let dim = spectrum.plus.basis.full_dim();
        if a.dim() != dim {
            return Err(Error::Dimension {
                expected: dim,
                found: a.dim(),
            });
        }
        let diagonal = |parity: i8| -> Vec<f64> {
            let s = spectrum.sector(parity);
            let mut v = vec![0.0; dim];
            let mut av = vec![0.0; dim];
            (0..s.len())
                .map(|k| {
                    s.basis.expand_into(s.block_vector(k), &mut v);
                    a.matvec_into(&v, &mut av);
                    dot(&v, &av)
                })
                .collect()
        };
        let (plus, minus) = rayon::join(|| diagonal(1), || diagonal(-1));
        let doublets = spectrum
            .pairing
            .doublets
            .iter()
            .map(|d| {
                let vp = spectrum.plus.vector(d.index_plus);
                let vm = spectrum.minus.vector(d.index_minus);
                a.bilinear(&vp, &vm)
            })
            .collect();
        Ok(Self { plus, minus, doublets })
    }

    fn diagonal(&self, id: LevelId) -> f64 {
        if id.parity > 0 {
            self.plus[id.index]
        } else {
            self.minus[id.index]
        }
    }
}

/// `Tr[ρ_eq A]` split into its diagonal and coherent parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub diagonal: f64,
    pub cross: f64,
}

impl Expectation {
    pub fn value(&self) -> f64 {
        self.diagonal + self.cross
    }
}

pub fn expectation_from_table(ens: &EquilibriumEnsemble, table: &ObservableTable, spectrum: &ParitySpectrum) -> Expectation {
    let diagonal = ens.diagonal.iter().map(|&(id, w)| w * table.diagonal(id)).sum();
    debug_assert!(spectrum.pairing.doublets.iter().enumerate().all(|(k, d)| d.id == k));
    let cross = ens
        .cross
        .iter()
        .map(|t| 2.0 * t.coefficient * table.doublets[t.doublet])
        .sum();
    Expectation { diagonal, cross }
}

/// `Tr[ρ_eq A] = Σ w ⟨v|A|v⟩ + 2 Σ C₊C₋ ⟨v₊|A|v₋⟩`.
pub fn expectation(ens: &EquilibriumEnsemble, a: &BandedSymmetricMatrix, spectrum: &ParitySpectrum) -> Result<f64> {
    let table = ObservableTable::new(spectrum, a)?;
    Ok(expectation_from_table(ens, &table, spectrum).value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_hamiltonian, build_order_parameter, ModelSpec};
    use crate::spectral::{diagonalize_by_parity, pair_doublets, with_semiclassical_pairing};

    fn eigenstate(spectrum: &ParitySpectrum, id: LevelId) -> StateVector {
        StateVector::new(spectrum.vector(id), Basis::of(&spectrum.spec)).unwrap()
    }

    #[test]
    fn eigenvector_gives_unit_coordinate() {
        let s = diagonalize_by_parity(&ModelSpec::lmg(20, 0.7)).unwrap();
        let id = LevelId { parity: -1, index: 3 };
        let c = expand_initial_state(&eigenstate(&s, id), &s).unwrap();
        for parity in [1i8, -1] {
            for (k, x) in c.sector(parity).iter().enumerate() {
                let want = if parity == id.parity && k == id.index { 1.0 } else { 0.0 };
                assert!((x - want).abs() < 1e-12);
            }
        }
        assert!(c.deficit.abs() < 1e-12);
    }

    #[test]
    fn doublet_superposition_keeps_coherence() {
        let s = with_semiclassical_pairing(diagonalize_by_parity(&ModelSpec::lmg(40, 0.5)).unwrap());
        let d = s.pairing.doublets[0];
        let vp = s.plus.vector(d.index_plus);
        let vm = s.minus.vector(d.index_minus);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let amps: Vec<f64> = vp.iter().zip(&vm).map(|(a, b)| r * (a + b)).collect();
        let psi = StateVector::new(amps, Basis::of(&s.spec)).unwrap();
        let c = expand_initial_state(&psi, &s).unwrap();
        assert!((c.plus[d.index_plus] - r).abs() < 1e-12 && (c.minus[d.index_minus] - r).abs() < 1e-12);
        let ens = build_equilibrium_ensemble(&c, &s);
        let o = build_order_parameter(&s.spec).unwrap();
        let got = expectation(&ens, &o, &s).unwrap();
        let want = o.bilinear(&vp, &vm);
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        assert!(want.abs() > 1.0);
    }

    #[test]
    fn identity_and_energy() {
        let spec = ModelSpec::bh(30, 3.0);
        let s = with_semiclassical_pairing(diagonalize_by_parity(&spec).unwrap());
        let amps: Vec<f64> = (0..=30).map(|i| ((i as f64) * 0.37).sin() + 0.2).collect();
        let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
        let psi = StateVector::new(amps.iter().map(|a| a / norm).collect(), Basis::of(&spec)).unwrap();
        let c = expand_initial_state(&psi, &s).unwrap();
        let ens = build_equilibrium_ensemble(&c, &s);
        let id = BandedSymmetricMatrix::identity(31);
        assert!((expectation(&ens, &id, &s).unwrap() - 1.0).abs() < 1e-10);
        let h = build_hamiltonian(&spec).unwrap();
        let ef = h.bilinear(&psi.amplitudes, &psi.amplitudes);
        assert!((expectation(&ens, &h, &s).unwrap() - ef).abs() < 1e-8 * ef.abs().max(1.0));
    }

    #[test]
    fn no_pairing_means_no_order() {
        let spec = ModelSpec::lmg(30, 0.5);
        let s = diagonalize_by_parity(&spec).unwrap();
        let s = pair_doublets(s, f64::NEG_INFINITY, crate::models::Side::Below);
        assert!(s.pairing.doublets.is_empty());
        let amps: Vec<f64> = (0..=30).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
        let psi = StateVector::new(amps.iter().map(|a| a / norm).collect(), Basis::of(&spec)).unwrap();
        let ens = build_equilibrium_ensemble(&expand_initial_state(&psi, &s).unwrap(), &s);
        let o = build_order_parameter(&spec).unwrap();
        assert!(expectation(&ens, &o, &s).unwrap().abs() < 1e-10);
    }

    #[test]
    fn basis_mismatch_is_rejected() {
        let s = diagonalize_by_parity(&ModelSpec::lmg(4, 0.5)).unwrap();
        let psi = StateVector::new(vec![0.2; 5], Basis::BhLeftOccupation { n: 4 }).unwrap();
        assert!(matches!(expand_initial_state(&psi, &s), Err(Error::Config(_))));
    }
}
