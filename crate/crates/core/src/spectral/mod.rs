//! Parity-resolved exact diagonalization, doublet pairing and the
//! finite-size precursor of the critical energy.

mod blocks;
pub mod cache;
mod pairing;
mod precursor;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::eigen::SIGN_THRESHOLD;
use crate::linalg::{banded_eigen, BandedSymmetricMatrix, SymmetricEigen};
use crate::models::{build_hamiltonian, ModelSpec};

pub use blocks::BlockBasis;
pub use cache::{spectrum_for, SpectrumCache};
pub use pairing::{
    pair_by_splitting, pair_doublets, semiclassical_cutoff, with_semiclassical_pairing, Doublet,
    Pairing, PairingRule,
};
pub use precursor::{detect_precursor, Detector, DetectorParams, PrecursorDetail, PrecursorEstimate};

/// Full decomposition of a banded symmetric matrix: ascending eigenvalues,
/// sign-fixed orthonormal eigenvectors.
pub fn diagonalize(h: &BandedSymmetricMatrix) -> Result<SymmetricEigen> {
    banded_eigen(h, true)
}

/// Identifies a level by parity sector and ascending index within it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LevelId {
    pub parity: i8,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub id: LevelId,
    pub energy: f64,
}

/// Eigenpairs of one parity block, vectors kept in block coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Sector {
    pub parity: i8,
    pub basis: BlockBasis,
    pub values: Vec<f64>,
    vectors: Vec<f64>,
}

impl Sector {
    pub(crate) fn from_parts(parity: i8, basis: BlockBasis, values: Vec<f64>, vectors: Vec<f64>) -> Result<Self> {
        let n = basis.dim();
        if values.len() != n || vectors.len() != n * n {
            return Err(Error::Dimension {
                expected: n,
                found: values.len(),
            });
        }
        Ok(Self {
            parity,
            basis,
            values,
            vectors,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Eigenvector `k` in block coordinates.
    pub fn block_vector(&self, k: usize) -> &[f64] {
        let n = self.basis.dim();
        &self.vectors[k * n..(k + 1) * n]
    }

    pub(crate) fn block_vectors(&self) -> &[f64] {
        &self.vectors
    }

    /// Eigenvector `k` in the original basis.
    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.basis.expand(self.block_vector(k))
    }

    /// Overlaps `⟨v_k|ψ⟩` for every eigenvector of the sector.
    pub fn overlaps(&self, psi: &[f64]) -> Vec<f64> {
        let proj = self.basis.project(psi);
        (0..self.len())
            .map(|k| dot(self.block_vector(k), &proj))
            .collect()
    }

    /// Reverses the sign of eigenvector `k`. Physical outputs must not
    /// depend on it; this exists to test that they do not.
    pub fn flip_sign(&mut self, k: usize) {
        let n = self.basis.dim();
        self.vectors[k * n..(k + 1) * n].iter_mut().for_each(|x| *x = -*x);
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Eigenpairs of `H` split by parity, with doublet pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct ParitySpectrum {
    pub spec: ModelSpec,
    pub plus: Sector,
    pub minus: Sector,
    pub ground_energy: f64,
    pub pairing: Pairing,
}

impl ParitySpectrum {
    pub(crate) fn from_sectors(spec: ModelSpec, plus: Sector, minus: Sector) -> Self {
        let lowest = |s: &Sector| s.values.first().copied().unwrap_or(f64::INFINITY);
        let ground_energy = lowest(&plus).min(lowest(&minus));
        Self {
            spec,
            plus,
            minus,
            ground_energy,
            pairing: Pairing::empty(),
        }
    }

    pub fn sector(&self, parity: i8) -> &Sector {
        if parity > 0 {
            &self.plus
        } else {
            &self.minus
        }
    }

    pub fn sector_mut(&mut self, parity: i8) -> &mut Sector {
        if parity > 0 {
            &mut self.plus
        } else {
            &mut self.minus
        }
    }

    pub fn dim(&self) -> usize {
        self.plus.len() + self.minus.len()
    }

    pub fn energy(&self, id: LevelId) -> f64 {
        self.sector(id.parity).values[id.index]
    }

    pub fn vector(&self, id: LevelId) -> Vec<f64> {
        self.sector(id.parity).vector(id.index)
    }

    /// All levels merged in ascending energy; ties put `+` first.
    pub fn levels(&self) -> Vec<Level> {
        let mut out: Vec<Level> = [&self.plus, &self.minus]
            .iter()
            .flat_map(|s| {
                s.values.iter().enumerate().map(move |(index, &energy)| Level {
                    id: LevelId {
                        parity: s.parity,
                        index,
                    },
                    energy,
                })
            })
            .collect();
        out.sort_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then(b.id.parity.cmp(&a.id.parity))
                .then(a.id.index.cmp(&b.id.index))
        });
        out
    }

    pub fn max_energy(&self) -> f64 {
        let top = |s: &Sector| s.values.last().copied().unwrap_or(f64::NEG_INFINITY);
        top(&self.plus).max(top(&self.minus))
    }

    /// Spread between the highest and lowest level.
    pub fn width(&self) -> f64 {
        self.max_energy() - self.ground_energy
    }

    /// `⟨v_a|A|v_b⟩` in the original basis.
    pub fn matrix_element(&self, a: LevelId, op: &BandedSymmetricMatrix, b: LevelId) -> f64 {
        op.bilinear(&self.vector(a), &self.vector(b))
    }
}

/// Diagonalizes one parity block of `H`.
pub fn diagonalize_sector(spec: &ModelSpec, h: &BandedSymmetricMatrix, parity: i8, want_vectors: bool) -> Result<(BlockBasis, SymmetricEigen)> {
    let basis = BlockBasis::for_spec(spec, parity);
    if basis.dim() == 0 {
        return Err(Error::Config(format!("empty parity sector {parity} for {spec:?}")));
    }
    let block = basis.project_matrix(h);
    let mut eig = banded_eigen(&block, want_vectors)?;
    if want_vectors {
        eig = fix_original_signs(&basis, eig);
    }
    Ok((basis, eig))
}

/// Reapplies the sign convention on the original-basis components, which
/// can differ from the block ordering for the mirror basis.
fn fix_original_signs(basis: &BlockBasis, eig: SymmetricEigen) -> SymmetricEigen {
    let n = eig.dim();
    let (values, vectors) = eig.into_parts();
    let mut z = vectors.expect("vectors requested");
    let mut full = vec![0.0; basis.full_dim()];
    for k in 0..n {
        let col = &mut z[k * n..(k + 1) * n];
        basis.expand_into(col, &mut full);
        let first = full.iter().find(|x| x.abs() > SIGN_THRESHOLD).copied();
        if first.is_some_and(|f| f < 0.0) {
            col.iter_mut().for_each(|x| *x = -*x);
        }
    }
    SymmetricEigen::from_sorted(n, values, Some(z))
}

/// Block-diagonalizes `H(spec)` by parity and solves both blocks.
pub fn diagonalize_by_parity(spec: &ModelSpec) -> Result<ParitySpectrum> {
    let h = build_hamiltonian(spec)?;
    let (plus, minus) = rayon::join(
        || diagonalize_sector(spec, &h, 1, true),
        || diagonalize_sector(spec, &h, -1, true),
    );
    let to_sector = |parity: i8, r: Result<(BlockBasis, SymmetricEigen)>| -> Result<Sector> {
        let (basis, eig) = r?;
        let (values, vectors) = eig.into_parts();
        Sector::from_parts(parity, basis, values, vectors.expect("vectors requested"))
    };
    Ok(ParitySpectrum::from_sectors(*spec, to_sector(1, plus)?, to_sector(-1, minus)?))
}

/// Eigenvalues of one parity block, without vectors.
pub fn sector_eigenvalues(spec: &ModelSpec, parity: i8) -> Result<Vec<f64>> {
    let h = build_hamiltonian(spec)?;
    Ok(diagonalize_sector(spec, &h, parity, false)?.1.values)
}
