//! Brute-force operator constructions on the full multi-mode Fock space,
//! projected onto the fixed-N sector. Used to validate the banded builders.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::linalg::BandedSymmetricMatrix;
use crate::models::{build_hamiltonian, build_order_parameter, build_parity, ModelKind, ModelSpec};

/// Dense H, S and O built from creation and annihilation matrices.
#[derive(Debug, Clone)]
pub struct FockReference {
    pub hamiltonian: DMatrix<f64>,
    pub parity: DMatrix<f64>,
    pub order_parameter: DMatrix<f64>,
}

fn annihilation(cutoff: usize) -> DMatrix<f64> {
    DMatrix::from_fn(cutoff + 1, cutoff + 1, |i, j| {
        if j == i + 1 {
            (j as f64).sqrt()
        } else {
            0.0
        }
    })
}

fn number(cutoff: usize) -> DMatrix<f64> {
    DMatrix::from_fn(cutoff + 1, cutoff + 1, |i, j| if i == j { i as f64 } else { 0.0 })
}

fn project(m: &DMatrix<f64>, sector: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(sector.len(), sector.len(), |i, j| m[(sector[i], sector[j])])
}

/// Reference operators for `spec`, ordered like the banded basis.
pub fn fock_reference(spec: &ModelSpec) -> Result<FockReference> {
    spec.validate()?;
    let n = spec.n;
    let nf = n as f64;
    let id = DMatrix::<f64>::identity(n + 1, n + 1);
    let a = annihilation(n);
    let num = number(n);
    match spec.model {
        ModelKind::Bh => {
            // modes L ⊗ R, |n_L, n_R⟩ at n_L (N+1) + n_R
            let al = a.kronecker(&id);
            let ar = id.kronecker(&a);
            let nl = num.kronecker(&id);
            let nr = id.kronecker(&num);
            let one = DMatrix::<f64>::identity(al.nrows(), al.nrows());
            let hop = al.transpose() * &ar + ar.transpose() * &al;
            let inter = &nl * (&nl - &one) + &nr * (&nr - &one);
            let h = hop * (-spec.j_hop) - inter * (spec.lambda / (2.0 * nf));
            let dim = al.nrows();
            let swap = DMatrix::from_fn(dim, dim, |i, j| {
                let (il, ir) = (i / (n + 1), i % (n + 1));
                let (jl, jr) = (j / (n + 1), j % (n + 1));
                if il == jr && ir == jl {
                    1.0
                } else {
                    0.0
                }
            });
            let z = nl - nr;
            let sector: Vec<usize> = (0..=n).map(|k| k * (n + 1) + (n - k)).collect();
            Ok(FockReference {
                hamiltonian: project(&h, &sector),
                parity: project(&swap, &sector),
                order_parameter: project(&z, &sector),
            })
        }
        ModelKind::Lmg => {
            // modes s ⊗ t
            let s = a.kronecker(&id);
            let t = id.kronecker(&a);
            let nt = id.kronecker(&num);
            let x = s.transpose() * &t + t.transpose() * &s;
            let h = &nt * spec.lambda - (&x * &x) * ((1.0 - spec.lambda) / nf);
            let parity = nt.map(|v| if (v.round() as i64) % 2 == 0 { 1.0 } else { -1.0 });
            let parity = DMatrix::from_diagonal(&parity.diagonal());
            let sector: Vec<usize> = (0..=n).map(|k| (n - k) * (n + 1) + k).collect();
            Ok(FockReference {
                hamiltonian: project(&h, &sector),
                parity: project(&parity, &sector),
                order_parameter: project(&x, &sector),
            })
        }
        ModelKind::Dicke => {
            // Schwinger bosons b ⊗ c for the spin, photon mode last
            let n_max = spec.n_max.expect("validated");
            let idp = DMatrix::<f64>::identity(n_max + 1, n_max + 1);
            let ph = annihilation(n_max);
            let b = a.kronecker(&id).kronecker(&idp);
            let c = id.kronecker(&a).kronecker(&idp);
            let nb = num.kronecker(&id).kronecker(&idp);
            let nc = id.kronecker(&num).kronecker(&idp);
            let ap = id.kronecker(&id).kronecker(&ph);
            let nph = ap.transpose() * &ap;
            let jz = (&nb - &nc) * 0.5;
            let jx = (b.transpose() * &c + c.transpose() * &b) * 0.5;
            let field = &ap + ap.transpose();
            let h = &jz * spec.omega0 + &nph * spec.omega + (&jx * &field) * (2.0 * spec.lambda / nf.sqrt());
            // exp(iπ(J + J_z + a†a)) with J + J_z = n_b
            let parity = DMatrix::from_diagonal(&(&nb + &nph).diagonal().map(|v| {
                if (v.round() as i64) % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }));
            let k_dim = n_max + 1;
            let sector: Vec<usize> = (0..=n)
                .flat_map(|nb_occ| {
                    (0..k_dim).map(move |k| (nb_occ * (n + 1) + (n - nb_occ)) * k_dim + k)
                })
                .collect();
            Ok(FockReference {
                hamiltonian: project(&h, &sector),
                parity: project(&parity, &sector),
                order_parameter: project(&jx, &sector),
            })
        }
    }
}

/// Largest entrywise deviation of the banded builders from the Fock
/// reference, in the order (H, S, O).
pub fn oracle_deviation(spec: &ModelSpec) -> Result<[f64; 3]> {
    let reference = fock_reference(spec)?;
    let dev = |m: BandedSymmetricMatrix, r: &DMatrix<f64>| (m.to_dense() - r).amax();
    Ok([
        dev(build_hamiltonian(spec)?, &reference.hamiltonian),
        dev(build_parity(spec)?, &reference.parity),
        dev(build_order_parameter(spec)?, &reference.order_parameter),
    ])
}
