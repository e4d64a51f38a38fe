use serde::{Deserialize, Serialize};

use super::{build_equilibrium_ensemble, expand_initial_state, expectation_from_table, ObservableTable};
use crate::error::{Error, Result};
use crate::linalg::BandedSymmetricMatrix;
use crate::models::{
    build_coherent_state, build_hamiltonian, build_order_parameter, dicke_photon_tail, semiclassical_critical_energy,
    variational_ground_state, CoherentParams, ModelKind, ModelSpec, StateVector,
};
use crate::spectral::{diagonalize_by_parity, with_semiclassical_pairing, ParitySpectrum};

/// Largest accepted photon-truncation deficit of a quench.
pub const MAX_TRUNCATION_DEFICIT: f64 = 1e-8;

/// Tolerance on the vanishing diagonal part of a parity-odd observable.
const DIAGONAL_ORDER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchResult {
    pub model: ModelKind,
    pub n: usize,
    pub lambda_i: f64,
    pub lambda_f: f64,
    pub branch: i8,
    /// Mean post-quench excitation energy above the ground state of `H(λ_f)`.
    pub e_f: f64,
    /// Semiclassical critical energy as an excitation energy.
    pub e_c: f64,
    pub epsilon_scale: f64,
    /// `ε (E_f - E_c) / E_c`.
    pub reduced_e: f64,
    /// `Tr[ρ_eq O] / N`.
    pub order_parameter: f64,
    pub order_parameter_extensive: f64,
    /// Diagonal-ensemble part of `Tr[ρ_eq O]`; zero by parity.
    pub diagonal_order: f64,
    /// `(⟨H(λ_f)⟩ - ⟨H(λ_i)⟩) / N` on the initial state.
    pub work_per_particle: f64,
    pub trunc_deficit: f64,
    /// `|Tr[ρ_eq H] - ⟨Ψ|H|Ψ⟩|` relative to `max(1, |⟨Ψ|H|Ψ⟩|)`.
    pub energy_residual: f64,
    pub paired_doublets: usize,
    pub weight_asymmetry: f64,
}

/// Everything about `H(λ_f)` that a series of quenches can share.
#[derive(Debug, Clone)]
pub struct QuenchContext {
    spectrum: ParitySpectrum,
    h_f: BandedSymmetricMatrix,
    order: ObservableTable,
    e_c: f64,
    epsilon_scale: f64,
}

impl QuenchContext {
    /// `spectrum` must already carry the pairing to be honoured.
    pub fn new(spectrum: ParitySpectrum, epsilon_scale: f64) -> Result<Self> {
        if !(epsilon_scale.is_finite() && epsilon_scale != 0.0) {
            return Err(Error::Config(format!("epsilon_scale must be finite and nonzero, got {epsilon_scale}")));
        }
        let spec = spectrum.spec;
        let h_f = build_hamiltonian(&spec)?;
        let order = ObservableTable::new(&spectrum, &build_order_parameter(&spec)?)?;
        let e_c = semiclassical_critical_energy(&spec) - spectrum.ground_energy;
        Ok(Self {
            spectrum,
            h_f,
            order,
            e_c,
            epsilon_scale,
        })
    }

    pub fn spectrum(&self) -> &ParitySpectrum {
        &self.spectrum
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spectrum.spec
    }

    pub fn critical_excitation(&self) -> f64 {
        self.e_c
    }

    pub fn initial_spec(&self, lambda_i: f64) -> ModelSpec {
        self.spectrum.spec.with_lambda(lambda_i)
    }

    /// Symmetry-broken mean-field ground state of `H(λ_i)` on `branch`.
    pub fn initial_state(&self, lambda_i: f64, branch: i8) -> Result<(CoherentParams, StateVector)> {
        let spec_i = self.initial_spec(lambda_i);
        let v = variational_ground_state(&spec_i, branch)?;
        let psi = build_coherent_state(&self.spectrum.spec, &v.params)?;
        Ok((v.params, psi))
    }

    /// `⟨Ψ|H(λ_f)|Ψ⟩` as an excitation energy, without the eigenbasis.
    pub fn mean_excitation(&self, psi: &StateVector) -> f64 {
        self.h_f.bilinear(&psi.amplitudes, &psi.amplitudes) - self.spectrum.ground_energy
    }

    /// Excitation energy reached from the mean-field ground state at `λ_i`.
    pub fn excitation_from(&self, lambda_i: f64, branch: i8) -> Result<f64> {
        let (_, psi) = self.initial_state(lambda_i, branch)?;
        Ok(self.mean_excitation(&psi))
    }

    pub fn quench(&self, lambda_i: f64, branch: i8) -> Result<QuenchResult> {
        let (params, psi) = self.initial_state(lambda_i, branch)?;
        self.quench_state(lambda_i, branch, &params, &psi)
    }

    /// Quench of an arbitrary coherent state prepared at `λ_i`.
    pub fn quench_state(&self, lambda_i: f64, branch: i8, params: &CoherentParams, psi: &StateVector) -> Result<QuenchResult> {
        let spec = self.spectrum.spec;
        let tail = match *params {
            CoherentParams::Dicke { nu_c, .. } => dicke_photon_tail(nu_c, spec.n_max.unwrap_or(0)),
            _ => 0.0,
        };
        let c = expand_initial_state(psi, &self.spectrum)?;
        let trunc_deficit = tail + c.deficit.max(0.0);
        if trunc_deficit > MAX_TRUNCATION_DEFICIT {
            return Err(Error::Truncation {
                tail: trunc_deficit,
                n_max: spec.n_max.unwrap_or(0),
            });
        }
        let ens = build_equilibrium_ensemble(&c, &self.spectrum);
        let o = expectation_from_table(&ens, &self.order, &self.spectrum);
        if o.diagonal.abs() > DIAGONAL_ORDER_TOL * spec.n_f64().max(1.0) {
            return Err(Error::Phase(format!(
                "diagonal part of the order parameter is {:.3e}; eigenvectors lack definite parity",
                o.diagonal
            )));
        }
        let h_psi = self.h_f.bilinear(&psi.amplitudes, &psi.amplitudes);
        let ensemble_energy: f64 = ens.diagonal.iter().map(|&(id, w)| w * self.spectrum.energy(id)).sum();
        let h_i = build_hamiltonian(&self.initial_spec(lambda_i))?;
        let h_i_psi = h_i.bilinear(&psi.amplitudes, &psi.amplitudes);
        let n = spec.n_f64();
        let e_f = h_psi - self.spectrum.ground_energy;
        Ok(QuenchResult {
            model: spec.model,
            n: spec.n,
            lambda_i,
            lambda_f: spec.lambda,
            branch,
            e_f,
            e_c: self.e_c,
            epsilon_scale: self.epsilon_scale,
            reduced_e: self.epsilon_scale * (e_f - self.e_c) / self.e_c,
            order_parameter: o.value() / n,
            order_parameter_extensive: o.value(),
            diagonal_order: o.diagonal,
            work_per_particle: (h_psi - h_i_psi) / n,
            trunc_deficit,
            energy_residual: (ensemble_energy - h_psi).abs() / h_psi.abs().max(1.0),
            paired_doublets: ens.cross.len(),
            weight_asymmetry: ens.weight_asymmetry(&c),
        })
    }
}

/// Single quench from the mean-field ground state at `λ_i` to `spec_f`,
/// with doublets honoured up to the semiclassical critical energy.
pub fn run_quench(spec_f: &ModelSpec, lambda_i: f64, branch: i8, epsilon_scale: f64) -> Result<QuenchResult> {
    let spectrum = with_semiclassical_pairing(diagonalize_by_parity(spec_f)?);
    QuenchContext::new(spectrum, epsilon_scale)?.quench(lambda_i, branch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Side;
    use crate::spectral::pair_doublets;

    #[test]
    fn null_quench_stays_ordered() {
        let spec = ModelSpec::lmg(200, 0.5);
        let r = run_quench(&spec, 0.5, 1, 1.0).unwrap();
        assert!(r.e_f.abs() < 1.0, "{}", r.e_f);
        assert!(r.work_per_particle.abs() < 1e-14);
        assert!(r.order_parameter > 0.5, "{}", r.order_parameter);
        assert!(r.reduced_e < -0.9);
    }

    #[test]
    fn branch_antisymmetry() {
        for (spec, li) in [(ModelSpec::lmg(100, 0.7), 0.4), (ModelSpec::bh(60, -7.0), 3.0), (ModelSpec::dicke(6, 0.75, 40), 0.9)] {
            let ctx = QuenchContext::new(with_semiclassical_pairing(diagonalize_by_parity(&spec).unwrap()), 1.0).unwrap();
            let a = ctx.quench(li, 1).unwrap();
            let b = ctx.quench(li, -1).unwrap();
            assert!((a.order_parameter + b.order_parameter).abs() < 1e-10, "{spec:?}");
            assert!((a.e_f - b.e_f).abs() < 1e-9 * a.e_f.abs().max(1.0));
        }
    }

    #[test]
    fn energy_is_conserved() {
        let ctx = QuenchContext::new(with_semiclassical_pairing(diagonalize_by_parity(&ModelSpec::bh(80, -7.0)).unwrap()), 1.0).unwrap();
        let r = ctx.quench(2.5, 1).unwrap();
        assert!(r.energy_residual < 1e-8);
        assert!(r.diagonal_order.abs() < 1e-10);
    }

    #[test]
    fn high_energy_quench_has_no_order() {
        let ctx = QuenchContext::new(with_semiclassical_pairing(diagonalize_by_parity(&ModelSpec::lmg(500, 0.7)).unwrap()), 1.0).unwrap();
        let r = ctx.quench(-8.0, 1).unwrap();
        assert!(r.e_f > r.e_c);
        assert!(r.order_parameter.abs() < 1e-10, "{}", r.order_parameter);
    }

    #[test]
    fn normal_initial_coupling_is_rejected() {
        assert!(matches!(run_quench(&ModelSpec::lmg(50, 0.7), 0.9, 1, 1.0), Err(Error::Phase(_))));
    }

    #[test]
    fn diagonal_ensemble_kills_order() {
        let s = pair_doublets(diagonalize_by_parity(&ModelSpec::lmg(100, 0.7)).unwrap(), f64::NEG_INFINITY, Side::Below);
        let r = QuenchContext::new(s, 1.0).unwrap().quench(0.4, 1).unwrap();
        assert_eq!(r.paired_doublets, 0);
        assert!(r.order_parameter.abs() < 1e-10);
    }
}
