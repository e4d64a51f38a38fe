//! The three collective two-level models: Hamiltonians, parity, order
//! parameters and mean-field coherent states.

mod coherent;
mod critical;
mod operators;
mod variational;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use coherent::{
    build_coherent_state, dicke_photon_tail, Basis, CoherentParams, StateVector, DICKE_TAIL_LIMIT,
};
pub use critical::{
    critical_energy_candidates, ordered_side, semiclassical_critical_coupling,
    semiclassical_critical_energy, Side,
};
pub use operators::{basis_parity, build_hamiltonian, build_order_parameter, build_parity};
pub use variational::{variational_ground_state, variational_minimum, Variational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    #[serde(alias = "bose_hubbard")]
    Bh,
    Lmg,
    Dicke,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Bh => "bh",
            ModelKind::Lmg => "lmg",
            ModelKind::Dicke => "dicke",
        }
    }

    /// Default post-quench coupling used by the sweeps.
    pub fn default_lambda_f(self) -> f64 {
        match self {
            ModelKind::Bh => -7.0,
            ModelKind::Lmg => 0.7,
            ModelKind::Dicke => 0.75,
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bh" | "bose_hubbard" => Ok(ModelKind::Bh),
            "lmg" => Ok(ModelKind::Lmg),
            "dicke" | "d" => Ok(ModelKind::Dicke),
            other => Err(Error::Config(format!("unknown model `{other}`"))),
        }
    }
}

/// Model, couplings and size of one Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub model: ModelKind,
    pub n: usize,
    pub lambda: f64,
    pub j_hop: f64,
    pub omega: f64,
    pub omega0: f64,
    pub n_max: Option<usize>,
}

impl ModelSpec {
    pub fn bh(n: usize, lambda: f64) -> Self {
        Self {
            model: ModelKind::Bh,
            n,
            lambda,
            j_hop: 1.0,
            omega: 1.0,
            omega0: 1.0,
            n_max: None,
        }
    }

    pub fn lmg(n: usize, lambda: f64) -> Self {
        Self {
            model: ModelKind::Lmg,
            ..Self::bh(n, lambda)
        }
    }

    pub fn dicke(n: usize, lambda: f64, n_max: usize) -> Self {
        Self {
            model: ModelKind::Dicke,
            n_max: Some(n_max),
            ..Self::bh(n, lambda)
        }
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self { lambda, ..*self }
    }

    pub fn with_n_max(&self, n_max: usize) -> Self {
        Self {
            n_max: Some(n_max),
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("particle number N must be at least 1".into()));
        }
        for (name, v) in [
            ("lambda", self.lambda),
            ("j_hop", self.j_hop),
            ("omega", self.omega),
            ("omega0", self.omega0),
        ] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite")));
            }
        }
        match (self.model, self.n_max) {
            (ModelKind::Dicke, None) => Err(Error::Config("Dicke model requires n_max".into())),
            (ModelKind::Dicke, Some(0)) => Err(Error::Config("n_max must be at least 1".into())),
            (ModelKind::Dicke, Some(_)) => Ok(()),
            (m, Some(_)) => Err(Error::Config(format!("n_max is only meaningful for Dicke, not {m}"))),
            (_, None) => Ok(()),
        }
    }

    /// Hilbert-space dimension of the fixed-N sector.
    pub fn dim(&self) -> usize {
        match self.model {
            ModelKind::Bh | ModelKind::Lmg => self.n + 1,
            ModelKind::Dicke => (self.n + 1) * (self.n_max.unwrap_or(0) + 1),
        }
    }

    pub fn n_f64(&self) -> f64 {
        self.n as f64
    }
}
