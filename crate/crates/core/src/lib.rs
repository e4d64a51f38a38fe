//! Quench experiments on collective two-level models: exact parity-resolved
//! spectra, degeneracy-aware long-time ensembles and finite-size exponents.

pub mod error;
pub mod linalg;
pub mod models;
pub mod optimize;
pub mod spectral;
pub mod oracle;
pub mod quench;
pub mod scaling;

pub use error::{Error, Result};
pub use linalg::BandedSymmetricMatrix;
pub use models::{CoherentParams, ModelKind, ModelSpec, Side, StateVector};
