use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real symmetric matrix stored by its upper diagonals.
///
/// Only diagonals that were explicitly set are stored, so sparse operators
/// such as the offset-2 LMG Hamiltonian cost two vectors rather than three.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandedSymmetricMatrix {
    dim: usize,
    bandwidth: usize,
    diagonals: Vec<(usize, Vec<f64>)>,
}

impl BandedSymmetricMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            bandwidth: 0,
            diagonals: Vec::new(),
        }
    }

    pub fn diagonal(values: Vec<f64>) -> Result<Self> {
        let mut m = Self::zeros(values.len());
        m.set_diagonal(0, values)?;
        Ok(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(vec![1.0; dim]).expect("finite identity")
    }

    /// Stores diagonal `offset`; element `k` sits at `(k, k + offset)`.
    pub fn set_diagonal(&mut self, offset: usize, values: Vec<f64>) -> Result<()> {
        let expected = self.dim.saturating_sub(offset);
        if offset >= self.dim {
            return Err(Error::Config(format!(
                "offset {offset} outside a {0}x{0} matrix",
                self.dim
            )));
        }
        if values.len() != expected {
            return Err(Error::Dimension {
                expected,
                found: values.len(),
            });
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Config(format!(
                "non-finite entry at diagonal {offset}, position {bad}"
            )));
        }
        match self.diagonals.binary_search_by_key(&offset, |(o, _)| *o) {
            Ok(i) => self.diagonals[i].1 = values,
            Err(i) => self.diagonals.insert(i, (offset, values)),
        }
        self.bandwidth = self.diagonals.last().map_or(0, |(o, _)| *o);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn diagonals(&self) -> &[(usize, Vec<f64>)] {
        &self.diagonals
    }

    pub fn stored_diagonal(&self, offset: usize) -> Option<&[f64]> {
        self.diagonals
            .binary_search_by_key(&offset, |(o, _)| *o)
            .ok()
            .map(|i| self.diagonals[i].1.as_slice())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        self.stored_diagonal(hi - lo).map_or(0.0, |d| d[lo])
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        y.iter_mut().for_each(|v| *v = 0.0);
        for (offset, d) in &self.diagonals {
            let o = *offset;
            if o == 0 {
                for k in 0..d.len() {
                    y[k] += d[k] * x[k];
                }
            } else {
                for k in 0..d.len() {
                    y[k] += d[k] * x[k + o];
                    y[k + o] += d[k] * x[k];
                }
            }
        }
    }

    /// `xᵀ A y` without allocating.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        let mut acc = 0.0;
        for (offset, d) in &self.diagonals {
            let o = *offset;
            if o == 0 {
                for k in 0..d.len() {
                    acc += x[k] * d[k] * y[k];
                }
            } else {
                for k in 0..d.len() {
                    acc += d[k] * (x[k] * y[k + o] + x[k + o] * y[k]);
                }
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.diagonals
            .iter()
            .flat_map(|(_, d)| d.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Gershgorin-style bound on the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        let mut row = vec![0.0; self.dim];
        for (offset, d) in &self.diagonals {
            for (k, v) in d.iter().enumerate() {
                row[k] += v.abs();
                if *offset > 0 {
                    row[k + offset] += v.abs();
                }
            }
        }
        row.into_iter().fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (offset, d) in &self.diagonals {
            for (k, v) in d.iter().enumerate() {
                m[(k, k + offset)] = *v;
                m[(k + offset, k)] = *v;
            }
        }
        m
    }

    /// Builds the banded representation of a dense symmetric matrix,
    /// keeping every diagonal that has a nonzero entry.
    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let n = m.nrows();
        let mut out = Self::zeros(n);
        for o in 0..n {
            let d: Vec<f64> = (0..n - o).map(|k| m[(k, k + o)]).collect();
            if o == 0 || d.iter().any(|v| *v != 0.0) {
                out.set_diagonal(o, d)?;
            }
        }
        Ok(out)
    }
}

/// Largest entry of `AB ∓ BA`; `anti = true` gives the anticommutator.
pub fn max_abs_commutator(
    a: &BandedSymmetricMatrix,
    b: &BandedSymmetricMatrix,
    anti: bool,
) -> f64 {
    let (a, b) = (a.to_dense(), b.to_dense());
    let ab = &a * &b;
    let ba = &b * &a;
    let c = if anti { ab + ba } else { ab - ba };
    c.amax()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> BandedSymmetricMatrix {
        let mut m = BandedSymmetricMatrix::zeros(4);
        m.set_diagonal(0, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        m.set_diagonal(2, vec![0.5, -1.5]).unwrap();
        m
    }

    #[test]
    fn matvec_matches_dense() {
        let m = sample();
        let x = [1.0, -2.0, 0.25, 3.0];
        let dense = m.to_dense() * nalgebra::DVector::from_row_slice(&x);
        let y = m.matvec(&x);
        for k in 0..4 {
            assert!((y[k] - dense[k]).abs() < 1e-15);
        }
        assert!((m.bilinear(&x, &x) - x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>()).abs() < 1e-14);
    }

    #[test]
    fn bandwidth_tracks_largest_offset() {
        let m = sample();
        assert_eq!(m.bandwidth(), 2);
        assert_eq!(m.get(3, 1), -1.5);
        assert_eq!(m.get(0, 1), 0.0);
    }

    #[test]
    fn rejects_bad_diagonals() {
        let mut m = BandedSymmetricMatrix::zeros(3);
        assert!(m.set_diagonal(1, vec![1.0]).is_err());
        assert!(m.set_diagonal(0, vec![1.0, f64::NAN, 0.0]).is_err());
        assert!(m.set_diagonal(3, vec![]).is_err());
    }

    #[test]
    fn dense_round_trip() {
        let m = sample();
        let back = BandedSymmetricMatrix::from_dense(&m.to_dense()).unwrap();
        assert_eq!(back.to_dense(), m.to_dense());
    }

    #[test]
    fn identity_commutes() {
        let m = sample();
        assert_eq!(max_abs_commutator(&m, &BandedSymmetricMatrix::identity(4), false), 0.0);
    }
}
