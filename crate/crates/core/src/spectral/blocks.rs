use std::collections::BTreeMap;

use crate::linalg::BandedSymmetricMatrix;
use crate::models::{basis_parity, ModelKind, ModelSpec};

/// One basis vector of a parity block: at most two original components.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Column {
    first: (usize, f64),
    second: Option<(usize, f64)>,
}

impl Column {
    fn entries(&self) -> impl Iterator<Item = (usize, f64)> {
        std::iter::once(self.first).chain(self.second)
    }
}

/// Orthonormal basis of one parity sector expressed in the original basis.
///
/// LMG and Dicke sectors are subsets of basis states; BH sectors use the
/// mirror combinations `(|n⟩ ± |N-n⟩)/√2` plus the middle state.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockBasis {
    full_dim: usize,
    columns: Vec<Column>,
}

impl BlockBasis {
    pub fn for_spec(spec: &ModelSpec, parity: i8) -> Self {
        let full_dim = spec.dim();
        let columns = match spec.model {
            ModelKind::Bh => {
                let n = spec.n;
                let r = std::f64::consts::FRAC_1_SQRT_2;
                let p = f64::from(parity);
                let mut cols: Vec<Column> = (0..n.div_ceil(2))
                    .map(|j| Column {
                        first: (j, r),
                        second: Some((n - j, p * r)),
                    })
                    .collect();
                if n.is_multiple_of(2) && parity > 0 {
                    cols.push(Column {
                        first: (n / 2, 1.0),
                        second: None,
                    });
                }
                cols
            }
            ModelKind::Lmg | ModelKind::Dicke => (0..full_dim)
                .filter(|&i| basis_parity(spec, i) == Some(parity))
                .map(|i| Column {
                    first: (i, 1.0),
                    second: None,
                })
                .collect(),
        };
        Self { full_dim, columns }
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn full_dim(&self) -> usize {
        self.full_dim
    }

    /// `B u`: block coordinates to the original basis.
    pub fn expand(&self, block: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.full_dim];
        self.expand_into(block, &mut out);
        out
    }

    pub fn expand_into(&self, block: &[f64], out: &mut [f64]) {
        debug_assert_eq!(block.len(), self.dim());
        out.iter_mut().for_each(|x| *x = 0.0);
        for (col, u) in self.columns.iter().zip(block) {
            for (i, c) in col.entries() {
                out[i] += c * u;
            }
        }
    }

    /// `Bᵀ x`: original basis to block coordinates.
    pub fn project(&self, full: &[f64]) -> Vec<f64> {
        debug_assert_eq!(full.len(), self.full_dim);
        self.columns
            .iter()
            .map(|col| col.entries().map(|(i, c)| c * full[i]).sum())
            .collect()
    }

    /// `Bᵀ M B` as a banded matrix in block coordinates.
    pub fn project_matrix(&self, m: &BandedSymmetricMatrix) -> BandedSymmetricMatrix {
        let mut owners: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.full_dim];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, c) in col.entries() {
                owners[i].push((j, c));
            }
        }
        let bdim = self.dim();
        let mut diagonals: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        let mut image: Vec<(usize, f64)> = Vec::new();
        for (l, col) in self.columns.iter().enumerate() {
            image.clear();
            for (i, c) in col.entries() {
                for (offset, d) in m.diagonals() {
                    let o = *offset;
                    if i + o < self.full_dim && i < d.len() {
                        image.push((i + o, d[i] * c));
                    }
                    if o > 0 && i >= o {
                        image.push((i - o, d[i - o] * c));
                    }
                }
            }
            for &(row, v) in &image {
                for &(j, c) in &owners[row] {
                    if j >= l && v != 0.0 {
                        let offset = j - l;
                        diagonals.entry(offset).or_insert_with(|| vec![0.0; bdim - offset])[l] += c * v;
                    }
                }
            }
        }
        let mut out = BandedSymmetricMatrix::zeros(bdim);
        for (offset, values) in diagonals {
            out.set_diagonal(offset, values).expect("finite projected entries");
        }
        out
    }
}
