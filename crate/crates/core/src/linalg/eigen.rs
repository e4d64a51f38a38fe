//! Symmetric eigensolvers: implicit QL on tridiagonal matrices and
//! Householder reduction for dense blocks.
//!
//! Eigenvectors are stored column-major, one vector per contiguous slice,
//! so the plane rotations of the QL sweep touch two contiguous slices.

use super::banded::BandedSymmetricMatrix;
use crate::error::{Error, Result};

const MAX_QL_ITERATIONS: usize = 100;

/// Components below this magnitude are skipped when fixing the sign.
pub const SIGN_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    n: usize,
    pub values: Vec<f64>,
    vectors: Option<Vec<f64>>,
}

impl SymmetricEigen {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn has_vectors(&self) -> bool {
        self.vectors.is_some()
    }

    /// Eigenvector `k`, normalized and sign-fixed.
    pub fn vector(&self, k: usize) -> &[f64] {
        let z = self.vectors.as_ref().expect("eigenvectors were not requested");
        &z[k * self.n..(k + 1) * self.n]
    }

    /// All eigenvectors, column-major.
    pub fn vectors(&self) -> Option<&[f64]> {
        self.vectors.as_deref()
    }

    /// Wraps already sorted and sign-fixed eigenpairs.
    pub(crate) fn from_sorted(n: usize, values: Vec<f64>, vectors: Option<Vec<f64>>) -> Self {
        Self { n, values, vectors }
    }

    pub fn into_parts(self) -> (Vec<f64>, Option<Vec<f64>>) {
        (self.values, self.vectors)
    }
}

/// Flips `v` so that its first component above [`SIGN_THRESHOLD`] is positive.
pub fn fix_sign(v: &mut [f64]) {
    if let Some(first) = v.iter().find(|x| x.abs() > SIGN_THRESHOLD) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Diagonalizes the tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off[i]` couples `i` and `i + 1`).
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64], want_vectors: bool) -> Result<SymmetricEigen> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::Config("empty matrix".into()));
    }
    if off.len() + 1 != n {
        return Err(Error::Dimension {
            expected: n - 1,
            found: off.len(),
        });
    }
    check_finite(diag.iter().chain(off))?;
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut z = want_vectors.then(|| identity(n));
    tql2(&mut d, &mut e, z.as_deref_mut())?;
    Ok(finish(n, d, z))
}

/// Diagonalizes a dense symmetric matrix given column-major.
pub fn dense_symmetric_eigen(a: Vec<f64>, n: usize, want_vectors: bool) -> Result<SymmetricEigen> {
    if n == 0 {
        return Err(Error::Config("empty matrix".into()));
    }
    if a.len() != n * n {
        return Err(Error::Dimension {
            expected: n * n,
            found: a.len(),
        });
    }
    check_finite(a.iter())?;
    let mut v = a;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e, n, want_vectors);
    // tred2 leaves e[i] coupling i-1 and i
    e.rotate_left(1);
    e[n - 1] = 0.0;
    let mut z = want_vectors.then_some(v);
    tql2(&mut d, &mut e, z.as_deref_mut())?;
    Ok(finish(n, d, z))
}

/// Full decomposition of a banded matrix; tridiagonal input skips the
/// Householder stage.
pub fn banded_eigen(m: &BandedSymmetricMatrix, want_vectors: bool) -> Result<SymmetricEigen> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::Config("empty matrix".into()));
    }
    if m.bandwidth() <= 1 {
        let diag = m.stored_diagonal(0).map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
        let off = m.stored_diagonal(1).map_or_else(|| vec![0.0; n - 1], <[f64]>::to_vec);
        return tridiagonal_eigen(&diag, &off, want_vectors);
    }
    let mut a = vec![0.0; n * n];
    for (offset, d) in m.diagonals() {
        for (k, v) in d.iter().enumerate() {
            a[(k + offset) * n + k] = *v;
            a[k * n + k + offset] = *v;
        }
    }
    dense_symmetric_eigen(a, n, want_vectors)
}

fn check_finite<'a>(mut it: impl Iterator<Item = &'a f64>) -> Result<()> {
    if it.any(|v| !v.is_finite()) {
        return Err(Error::Config("non-finite matrix entry".into()));
    }
    Ok(())
}

fn identity(n: usize) -> Vec<f64> {
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    z
}

fn finish(n: usize, d: Vec<f64>, z: Option<Vec<f64>>) -> SymmetricEigen {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vectors = z.map(|z| {
        let mut out = Vec::with_capacity(n * n);
        for &i in &order {
            let start = out.len();
            out.extend_from_slice(&z[i * n..(i + 1) * n]);
            fix_sign(&mut out[start..]);
        }
        out
    });
    SymmetricEigen { n, values, vectors }
}

/// Householder reduction to tridiagonal form (column-major `v`).
///
/// On return `d` holds the diagonal and `e[i]` couples `i - 1` and `i`.
/// With `accumulate` the orthogonal transformation is left in `v`.
fn tred2(v: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize, accumulate: bool) {
    // v[(r, c)] lives at c * n + r
    let at = |r: usize, c: usize| c * n + r;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                let col = &v[j * n..j * n + i];
                for k in (j + 1)..i {
                    g += col[k] * d[k];
                    e[k] += col[k] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                let col = &mut v[j * n..j * n + i];
                for k in j..i {
                    col[k] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    if !accumulate {
        for j in 0..n {
            d[j] = v[at(j, j)];
        }
        e[0] = 0.0;
        return;
    }

    for i in 0..n - 1 {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            let (left, right) = v.split_at_mut((i + 1) * n);
            let next = &mut right[..=i];
            for k in 0..=i {
                d[k] = next[k] / h;
            }
            for j in 0..=i {
                let col = &mut left[j * n..j * n + i + 1];
                let g: f64 = next.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
                for k in 0..=i {
                    col[k] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL with Wilkinson-type shifts. `e[i]` couples `i` and `i + 1`
/// and `e[n - 1]` must be zero. Rotations are applied to `z` when given.
fn tql2(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::NonConvergence {
                        index: l,
                        iterations: iter - 1,
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        let (left, right) = z.split_at_mut((i + 1) * n);
                        let zi = &mut left[i * n..];
                        let zi1 = &mut right[..n];
                        for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                            let hb = *b;
                            *b = s * *a + c * hb;
                            *a = c * *a - s * hb;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
