use serde::{Deserialize, Serialize};

use super::{ModelKind, ModelSpec};
use crate::error::{Error, Result};

/// Largest photon tail weight a Dicke coherent state may lose to truncation.
pub const DICKE_TAIL_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum CoherentParams {
    Bh { gamma0: f64, gamma1: f64 },
    Lmg { beta_c: f64 },
    Dicke { mu: f64, nu_c: f64 },
}

impl CoherentParams {
    pub fn model(&self) -> ModelKind {
        match self {
            CoherentParams::Bh { .. } => ModelKind::Bh,
            CoherentParams::Lmg { .. } => ModelKind::Lmg,
            CoherentParams::Dicke { .. } => ModelKind::Dicke,
        }
    }

    /// BH state with `γ₀ = cos θ`, `γ₁ = sin θ`.
    pub fn bh_angle(theta: f64) -> Self {
        CoherentParams::Bh {
            gamma0: theta.cos(),
            gamma1: theta.sin(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = match *self {
            CoherentParams::Bh { gamma0, gamma1 } => {
                if ((gamma0 * gamma0 + gamma1 * gamma1) - 1.0).abs() > 1e-12 {
                    return Err(Error::Config(format!(
                        "BH coherent parameters must satisfy γ₀²+γ₁²=1, got {gamma0}, {gamma1}"
                    )));
                }
                gamma0.is_finite() && gamma1.is_finite()
            }
            CoherentParams::Lmg { beta_c } => !beta_c.is_nan(),
            CoherentParams::Dicke { mu, nu_c } => !mu.is_nan() && nu_c.is_finite(),
        };
        if finite {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid coherent parameters {self:?}")))
        }
    }
}

/// Ordering of the fixed-N basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    /// `|n_L = n⟩`, `n = 0..=N`.
    BhLeftOccupation { n: usize },
    /// `|n_t = n⟩`, `n = 0..=N`.
    LmgTOccupation { n: usize },
    /// `|m⟩ ⊗ |k⟩`, `m = -J..=J` outer, `k = 0..=n_max` inner.
    DickeSpinPhoton { n: usize, n_max: usize },
}

impl Basis {
    pub fn of(spec: &ModelSpec) -> Self {
        match spec.model {
            ModelKind::Bh => Basis::BhLeftOccupation { n: spec.n },
            ModelKind::Lmg => Basis::LmgTOccupation { n: spec.n },
            ModelKind::Dicke => Basis::DickeSpinPhoton {
                n: spec.n,
                n_max: spec.n_max.unwrap_or(0),
            },
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Basis::BhLeftOccupation { n } | Basis::LmgTOccupation { n } => n + 1,
            Basis::DickeSpinPhoton { n, n_max } => (n + 1) * (n_max + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<f64>,
    pub basis: Basis,
}

impl StateVector {
    pub fn new(amplitudes: Vec<f64>, basis: Basis) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::Dimension {
                expected: basis.dim(),
                found: amplitudes.len(),
            });
        }
        Ok(Self { amplitudes, basis })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }
}

/// Normalized `√C(N,n) aⁿ b^(N-n)`, evaluated in log space.
fn binomial_amplitudes(n: usize, a: f64, b: f64) -> Vec<f64> {
    let (la, lb) = (a.abs().ln(), b.abs().ln());
    let mut logs = Vec::with_capacity(n + 1);
    let mut ln_binom = 0.0;
    for k in 0..=n {
        if k > 0 {
            ln_binom += (((n - k + 1) as f64) / k as f64).ln();
        }
        let pa = if k == 0 { 0.0 } else { k as f64 * la };
        let pb = if k == n { 0.0 } else { (n - k) as f64 * lb };
        logs.push(0.5 * ln_binom + pa + pb);
    }
    let signs = (0..=n).map(|k| {
        let sa = if a < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        let sb = if b < 0.0 && (n - k) % 2 == 1 { -1.0 } else { 1.0 };
        sa * sb
    });
    normalize_logs(&logs, signs)
}

fn normalize_logs(logs: &[f64], signs: impl Iterator<Item = f64>) -> Vec<f64> {
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logs
        .iter()
        .zip(signs)
        .map(|(l, s)| s * (l - top).exp())
        .collect();
    let norm = out.iter().map(|x| x * x).sum::<f64>().sqrt();
    out.iter_mut().for_each(|x| *x /= norm);
    out
}

/// Unnormalized log-amplitudes `k ln|ν| - ½ ln k!` for `k = 0..=n_max`.
fn photon_logs(nu: f64, n_max: usize) -> Vec<f64> {
    let ln_nu = nu.abs().ln();
    let mut logs = Vec::with_capacity(n_max + 1);
    let mut acc = 0.0;
    logs.push(0.0);
    for k in 1..=n_max {
        acc += ln_nu - 0.5 * (k as f64).ln();
        logs.push(acc);
    }
    logs
}

/// Poisson weight of the photon coherent state beyond `n_max`.
pub fn dicke_photon_tail(nu: f64, n_max: usize) -> f64 {
    if nu == 0.0 {
        return 0.0;
    }
    let mean = nu * nu;
    // log of the Poisson probability at k = n_max + 1
    let mut ln_p = -mean;
    for k in 1..=n_max + 1 {
        ln_p += mean.ln() - (k as f64).ln();
    }
    let mut tail = 0.0;
    let mut k = n_max + 1;
    loop {
        let p = ln_p.exp();
        tail += p;
        k += 1;
        ln_p += mean.ln() - (k as f64).ln();
        if (k as f64) > mean && p < tail * 1e-17 {
            break;
        }
        if k > n_max + 100_000 {
            break;
        }
    }
    tail.min(1.0)
}

/// Fixed-N projection of the mean-field coherent state.
pub fn build_coherent_state(spec: &ModelSpec, p: &CoherentParams) -> Result<StateVector> {
    spec.validate()?;
    p.validate()?;
    if p.model() != spec.model {
        return Err(Error::Config(format!(
            "coherent parameters for {} used with a {} spec",
            p.model(),
            spec.model
        )));
    }
    let basis = Basis::of(spec);
    let amplitudes = match *p {
        CoherentParams::Bh { gamma0, gamma1 } => binomial_amplitudes(spec.n, gamma0, gamma1),
        CoherentParams::Lmg { beta_c } => {
            let theta = beta_c.atan();
            binomial_amplitudes(spec.n, theta.sin(), theta.cos())
        }
        CoherentParams::Dicke { mu, nu_c } => {
            let n_max = spec.n_max.expect("validated");
            let tail = dicke_photon_tail(nu_c, n_max);
            if tail >= DICKE_TAIL_LIMIT {
                return Err(Error::Truncation { tail, n_max });
            }
            let half = mu.atan();
            let spin = binomial_amplitudes(spec.n, half.sin(), half.cos());
            let logs = photon_logs(nu_c, n_max);
            let signs = (0..=n_max).map(|k| if nu_c < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 });
            let photon = normalize_logs(&logs, signs);
            let mut out = Vec::with_capacity(basis.dim());
            for s in &spin {
                out.extend(photon.iter().map(|q| s * q));
            }
            out
        }
    };
    StateVector::new(amplitudes, basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_sided_condensate() {
        let psi = build_coherent_state(&ModelSpec::bh(5, 1.0), &CoherentParams::bh_angle(0.0)).unwrap();
        assert_eq!(psi.amplitudes, vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn balanced_two_particles() {
        let g = std::f64::consts::FRAC_1_SQRT_2;
        let psi = build_coherent_state(&ModelSpec::bh(2, 1.0), &CoherentParams::Bh { gamma0: g, gamma1: g }).unwrap();
        let expected = [0.5, g, 0.5];
        for (a, b) in psi.amplitudes.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn lmg_vacuum() {
        let psi = build_coherent_state(&ModelSpec::lmg(4, 0.5), &CoherentParams::Lmg { beta_c: 0.0 }).unwrap();
        assert_eq!(psi.amplitudes, vec![1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn lmg_matches_closed_form() {
        let n = 6;
        let beta: f64 = -0.8;
        let psi = build_coherent_state(&ModelSpec::lmg(n, 0.5), &CoherentParams::Lmg { beta_c: beta }).unwrap();
        let pre = (1.0 + beta * beta).powf(-(n as f64) / 2.0);
        let mut binom = 1.0;
        for k in 0..=n {
            if k > 0 {
                binom *= (n - k + 1) as f64 / k as f64;
            }
            let expected = pre * binom.sqrt() * beta.powi(k as i32);
            assert!((psi.amplitudes[k] - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn large_n_stays_finite() {
        let psi = build_coherent_state(&ModelSpec::lmg(8000, 0.5), &CoherentParams::Lmg { beta_c: 1.0 }).unwrap();
        assert!(psi.amplitudes.iter().all(|a| a.is_finite()));
        assert!((psi.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn dicke_product_state() {
        let spec = ModelSpec::dicke(4, 0.9, 40);
        let psi = build_coherent_state(&spec, &CoherentParams::Dicke { mu: 0.7, nu_c: -1.3 }).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        // amplitude ratio between photon numbers 1 and 0 is ν
        assert!((psi.amplitudes[1] / psi.amplitudes[0] + 1.3).abs() < 1e-12);
        // ratio between spin projections m = -J + 1 and -J is √N μ
        assert!((psi.amplitudes[41] / psi.amplitudes[0] - 2.0 * 0.7).abs() < 1e-12);
    }

    #[test]
    fn dicke_truncation_reported() {
        let spec = ModelSpec::dicke(4, 0.9, 5);
        match build_coherent_state(&spec, &CoherentParams::Dicke { mu: 0.7, nu_c: 3.0 }) {
            Err(Error::Truncation { tail, n_max }) => {
                assert_eq!(n_max, 5);
                assert!(tail > 0.1 && tail < 1.0);
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn photon_tail_matches_direct_sum() {
        let nu: f64 = 2.0;
        let mean = nu * nu;
        let mut head = 0.0;
        let mut p = (-mean).exp();
        for k in 0..=6 {
            if k > 0 {
                p *= mean / k as f64;
            }
            head += p;
        }
        assert!((dicke_photon_tail(nu, 6) - (1.0 - head)).abs() < 1e-14);
    }

    #[test]
    fn bh_normalization_check() {
        assert!(CoherentParams::Bh { gamma0: 1.0, gamma1: 0.1 }.validate().is_err());
    }

    #[test]
    fn model_mismatch_rejected() {
        assert!(build_coherent_state(&ModelSpec::bh(3, 1.0), &CoherentParams::Lmg { beta_c: 0.1 }).is_err());
    }
}
