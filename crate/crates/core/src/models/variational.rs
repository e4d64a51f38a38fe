use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use super::{
    build_coherent_state, build_hamiltonian, build_order_parameter, ordered_side,
    semiclassical_critical_coupling, CoherentParams, ModelKind, ModelSpec, Side,
};
use crate::error::{Error, Result};
use crate::optimize::{golden_section, nelder_mead_2d, NelderMeadOptions};

const PARAM_TOL: f64 = 1e-10;

/// Intensive order parameter below which a minimum counts as symmetric.
const BROKEN_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Variational {
    pub params: CoherentParams,
    pub energy: f64,
    /// `⟨Ψ|O|Ψ⟩`, extensive.
    pub order_parameter: f64,
    pub broken: bool,
}

fn check_branch(branch: i8) -> Result<f64> {
    match branch {
        1 => Ok(1.0),
        -1 => Ok(-1.0),
        b => Err(Error::Config(format!("branch must be +1 or -1, got {b}"))),
    }
}

/// Minimizes the coherent-state energy on the requested branch without
/// asking whether the minimum is actually symmetry broken.
pub fn variational_minimum(spec: &ModelSpec, branch: i8) -> Result<Variational> {
    spec.validate()?;
    let sign = check_branch(branch)?;
    let (params, energy, order_parameter) = match spec.model {
        ModelKind::Bh | ModelKind::Lmg => {
            let h = build_hamiltonian(spec)?;
            let o = build_order_parameter(spec)?;
            let params_at = |theta: f64| match spec.model {
                ModelKind::Bh if sign > 0.0 => CoherentParams::bh_angle(theta),
                ModelKind::Bh => CoherentParams::Bh {
                    gamma0: theta.sin(),
                    gamma1: theta.cos(),
                },
                _ => CoherentParams::Lmg {
                    beta_c: sign * theta.tan(),
                },
            };
            let upper = if spec.model == ModelKind::Bh { FRAC_PI_4 } else { FRAC_PI_2 };
            let energy_at = |theta: f64| {
                let psi = build_coherent_state(spec, &params_at(theta)).expect("valid parameters");
                h.bilinear(&psi.amplitudes, &psi.amplitudes)
            };
            let (theta, energy) = golden_section(energy_at, 0.0, upper, PARAM_TOL);
            let params = params_at(theta);
            let psi = build_coherent_state(spec, &params)?;
            (params, energy, o.bilinear(&psi.amplitudes, &psi.amplitudes))
        }
        ModelKind::Dicke => dicke_minimum(spec, sign),
    };
    Ok(Variational {
        params,
        energy,
        order_parameter,
        broken: (order_parameter / spec.n as f64).abs() > BROKEN_THRESHOLD,
    })
}

/// Closed-form energy of the untruncated Dicke coherent state with spin
/// angle `phi` (`μ = tan(φ/2)`) and photon displacement `nu`.
pub(crate) fn dicke_energy(spec: &ModelSpec, phi: f64, nu: f64) -> f64 {
    let n = spec.n as f64;
    let j = n / 2.0;
    -spec.omega0 * j * phi.cos()
        + spec.omega * nu * nu
        + 2.0 * spec.lambda / n.sqrt() * j * phi.sin() * 2.0 * nu
}

fn dicke_minimum(spec: &ModelSpec, sign: f64) -> (CoherentParams, f64, f64) {
    let n = spec.n as f64;
    let j = n / 2.0;
    let ratio = spec.omega * spec.omega0 / (4.0 * spec.lambda * spec.lambda);
    let phi0 = if ratio < 1.0 { ratio.acos() } else { 0.3 };
    let nu_of = |phi: f64| -2.0 * spec.lambda * j * phi.sin() / (spec.omega * n.sqrt());
    let nu_bound = 2.0 * spec.lambda.abs() * n.sqrt() / spec.omega + 1.0;
    let start = [phi0, nu_of(phi0)];
    // the -1 branch is the exact mirror image (φ, ν) -> (-φ, -ν)
    let (x, energy, _) = nelder_mead_2d(
        |x| dicke_energy(spec, x[0], x[1]),
        start,
        [0.05, 0.1 * (1.0 + start[1].abs())],
        [(0.0, PI), (-nu_bound, nu_bound)],
        NelderMeadOptions {
            xtol: PARAM_TOL,
            ..NelderMeadOptions::default()
        },
    );
    let (phi, nu) = (sign * x[0], sign * x[1]);
    let params = CoherentParams::Dicke {
        mu: (phi / 2.0).tan(),
        nu_c: nu,
    };
    (params, energy, j * phi.sin())
}

/// Symmetry-broken mean-field ground state of `H(λ)` on the requested branch.
pub fn variational_ground_state(spec: &ModelSpec, branch: i8) -> Result<Variational> {
    spec.validate()?;
    if ordered_side(spec) != Some(Side::Below) {
        return Err(Error::Phase(format!(
            "{} coupling λ = {} has a symmetric ground state (critical coupling {})",
            spec.model,
            spec.lambda,
            semiclassical_critical_coupling(spec)
        )));
    }
    let v = variational_minimum(spec, branch)?;
    if !v.broken {
        return Err(Error::Phase(format!(
            "{} at λ = {}, N = {}: mean-field minimum is not symmetry broken",
            spec.model, spec.lambda, spec.n
        )));
    }
    Ok(v)
}
