use super::{ModelKind, ModelSpec};
use crate::error::Result;
use crate::linalg::BandedSymmetricMatrix;

/// Hamiltonian in the fixed-N basis of the model.
///
/// BH: `-J (a_L† a_R + h.c.) - (λ/2N) [n_L(n_L-1) + n_R(n_R-1)]`, positive λ attractive.
/// LMG: `λ n_t - ((1-λ)/N) (s†t + t†s)²`.
/// Dicke: `ω₀ J_z + ω a†a + (2λ/√N) J_x (a + a†)`.
pub fn build_hamiltonian(spec: &ModelSpec) -> Result<BandedSymmetricMatrix> {
    spec.validate()?;
    match spec.model {
        ModelKind::Bh => Ok(bh_hamiltonian(spec)),
        ModelKind::Lmg => Ok(lmg_hamiltonian(spec)),
        ModelKind::Dicke => Ok(dicke_hamiltonian(spec)),
    }
}

fn bh_hamiltonian(spec: &ModelSpec) -> BandedSymmetricMatrix {
    let n = spec.n;
    let nf = n as f64;
    let g = spec.lambda / (2.0 * nf);
    let mut h = BandedSymmetricMatrix::zeros(n + 1);
    let diag = (0..=n)
        .map(|k| {
            let (l, r) = (k as f64, (n - k) as f64);
            -g * (l * (l - 1.0) + r * (r - 1.0))
        })
        .collect();
    h.set_diagonal(0, diag).expect("finite diagonal");
    let hop = (0..n)
        .map(|k| -spec.j_hop * (((k + 1) * (n - k)) as f64).sqrt())
        .collect();
    h.set_diagonal(1, hop).expect("finite hopping");
    h
}

fn lmg_hamiltonian(spec: &ModelSpec) -> BandedSymmetricMatrix {
    let n = spec.n;
    let nf = n as f64;
    let g = (1.0 - spec.lambda) / nf;
    let mut h = BandedSymmetricMatrix::zeros(n + 1);
    let diag = (0..=n)
        .map(|k| {
            let (t, s) = (k as f64, (n - k) as f64);
            spec.lambda * t - g * ((t + 1.0) * s + t * (s + 1.0))
        })
        .collect();
    h.set_diagonal(0, diag).expect("finite diagonal");
    if n >= 2 {
        let pair = (0..n - 1)
            .map(|k| {
                let t = k as f64;
                let s = (n - k) as f64;
                -g * ((t + 1.0) * (t + 2.0) * s * (s - 1.0)).sqrt()
            })
            .collect();
        h.set_diagonal(2, pair).expect("finite pair term");
    }
    h
}

fn dicke_hamiltonian(spec: &ModelSpec) -> BandedSymmetricMatrix {
    let n = spec.n;
    let k_dim = spec.n_max.expect("validated") + 1;
    let dim = (n + 1) * k_dim;
    let j = n as f64 / 2.0;
    let coupling = 2.0 * spec.lambda / (n as f64).sqrt();
    let mut h = BandedSymmetricMatrix::zeros(dim);
    let mut diag = Vec::with_capacity(dim);
    for a in 0..=n {
        let m = a as f64 - j;
        for k in 0..k_dim {
            diag.push(spec.omega0 * m + spec.omega * k as f64);
        }
    }
    h.set_diagonal(0, diag).expect("finite diagonal");
    if n == 0 {
        return h;
    }
    // (a, k) -> (a + 1, k - 1) sits at offset K - 1, (a, k) -> (a + 1, k + 1) at K + 1
    let mut down = vec![0.0; dim - (k_dim - 1)];
    let mut up = vec![0.0; dim.saturating_sub(k_dim + 1)];
    for a in 0..n {
        let jx = jx_element(j, a as f64 - j);
        for k in 0..k_dim {
            let p = a * k_dim + k;
            if k >= 1 {
                down[p] = coupling * jx * (k as f64).sqrt();
            }
            if k + 1 < k_dim {
                up[p] = coupling * jx * ((k + 1) as f64).sqrt();
            }
        }
    }
    h.set_diagonal(k_dim - 1, down).expect("finite coupling");
    if !up.is_empty() {
        h.set_diagonal(k_dim + 1, up).expect("finite coupling");
    }
    h
}

/// `⟨m+1|J_x|m⟩`.
fn jx_element(j: f64, m: f64) -> f64 {
    0.5 * (j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
}

/// Parity eigenvalue of basis state `index` for the diagonal-parity models.
/// BH parity is a permutation and has no basis eigenvalue; `None` there.
pub fn basis_parity(spec: &ModelSpec, index: usize) -> Option<i8> {
    let sign = |p: usize| if p.is_multiple_of(2) { 1 } else { -1 };
    match spec.model {
        ModelKind::Bh => None,
        ModelKind::Lmg => Some(sign(index)),
        ModelKind::Dicke => {
            let k_dim = spec.n_max.expect("validated") + 1;
            Some(sign(index / k_dim + index % k_dim))
        }
    }
}

/// Parity operator `S` with `S² = 1` and `[H, S] = 0`.
pub fn build_parity(spec: &ModelSpec) -> Result<BandedSymmetricMatrix> {
    spec.validate()?;
    let dim = spec.dim();
    match spec.model {
        ModelKind::Bh => {
            let n = spec.n;
            let mut s = BandedSymmetricMatrix::zeros(dim);
            for i in 0..=n / 2 {
                let offset = n - 2 * i;
                let mut d = vec![0.0; dim - offset];
                d[i] = 1.0;
                s.set_diagonal(offset, d)?;
            }
            Ok(s)
        }
        ModelKind::Lmg | ModelKind::Dicke => BandedSymmetricMatrix::diagonal(
            (0..dim)
                .map(|i| f64::from(basis_parity(spec, i).expect("diagonal parity")))
                .collect(),
        ),
    }
}

/// Parity-odd order parameter: `n_L - n_R`, `s†t + t†s`, or `J_x`.
pub fn build_order_parameter(spec: &ModelSpec) -> Result<BandedSymmetricMatrix> {
    spec.validate()?;
    let n = spec.n;
    let dim = spec.dim();
    let mut o = BandedSymmetricMatrix::zeros(dim);
    match spec.model {
        ModelKind::Bh => {
            o.set_diagonal(0, (0..=n).map(|k| 2.0 * k as f64 - n as f64).collect())?;
        }
        ModelKind::Lmg => {
            o.set_diagonal(1, (0..n).map(|k| (((k + 1) * (n - k)) as f64).sqrt()).collect())?;
        }
        ModelKind::Dicke => {
            let k_dim = spec.n_max.expect("validated") + 1;
            let j = n as f64 / 2.0;
            let mut d = vec![0.0; dim - k_dim];
            for a in 0..n {
                let jx = jx_element(j, a as f64 - j);
                for k in 0..k_dim {
                    d[a * k_dim + k] = jx;
                }
            }
            o.set_diagonal(k_dim, d)?;
        }
    }
    Ok(o)
}
