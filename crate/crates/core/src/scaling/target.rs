use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{dicke_photon_tail, variational_minimum, CoherentParams, ModelKind, ModelSpec, DICKE_TAIL_LIMIT};
use crate::quench::{QuenchContext, QuenchResult};
use crate::spectral::sector_eigenvalues;

pub const SCAN_POINTS: usize = 32;
pub const TARGET_TOLERANCE: f64 = 1e-6;
const MAX_BISECTIONS: usize = 200;

/// Default interval of initial couplings on the symmetry-broken side of
/// the ground-state transition. For BH the lower end sits just above the
/// finite-N threshold `2JN/(N-1)` of the projected coherent state.
pub fn initial_coupling_range(spec_f: &ModelSpec) -> (f64, f64) {
    let lf = spec_f.lambda;
    match spec_f.model {
        ModelKind::Lmg => (-10.0, lf),
        ModelKind::Bh => {
            let j = spec_f.j_hop.abs();
            let n = spec_f.n.max(2) as f64;
            if lf < 2.0 * j {
                (2.0 * j * n / (n - 1.0) * (1.0 + 1e-6), 22.0 * j)
            } else {
                (lf, lf + 20.0 * j)
            }
        }
        ModelKind::Dicke => (lf, lf + 0.5),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Targeted {
    pub lambda_i: f64,
    pub target: f64,
    pub achieved: f64,
    pub bisections: usize,
    /// Scan points bracketing the target.
    pub bracket: (f64, f64),
    /// Number of sign changes of `E_f - target` on the scan grid.
    pub crossings: usize,
    /// Whether `E_f(λ_i)` is monotone over the whole scan grid.
    pub scan_monotone: bool,
    pub result: QuenchResult,
}

/// Tunes `λ_i` inside `range` so that the mean post-quench excitation
/// energy hits `target`, then performs that quench.
pub fn target_energy(ctx: &QuenchContext, target: f64, branch: i8, range: (f64, f64)) -> Result<Targeted> {
    let (lo, hi) = range;
    if !(lo < hi) {
        return Err(Error::Config(format!("empty coupling range [{lo}, {hi}]")));
    }
    let tol = TARGET_TOLERANCE * ctx.spectrum().width();
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|k| lo + (hi - lo) * k as f64 / (SCAN_POINTS - 1) as f64)
        .collect();
    let energies = grid
        .iter()
        .map(|&l| ctx.excitation_from(l, branch))
        .collect::<Result<Vec<f64>>>()?;
    let diffs: Vec<f64> = energies.windows(2).map(|w| w[1] - w[0]).collect();
    let scan_monotone = diffs.iter().all(|d| *d >= 0.0) || diffs.iter().all(|d| *d <= 0.0);
    let f: Vec<f64> = energies.iter().map(|e| e - target).collect();
    let mut bracket = None;
    let mut crossings = 0;
    for k in 0..SCAN_POINTS - 1 {
        if f[k] == 0.0 || f[k] * f[k + 1] < 0.0 {
            crossings += 1;
            bracket.get_or_insert(k);
        }
    }
    if f[SCAN_POINTS - 1] == 0.0 {
        crossings += 1;
        bracket.get_or_insert(SCAN_POINTS - 2);
    }
    let Some(k) = bracket else {
        let (emin, emax) = energies.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &e| (a.min(e), b.max(e)));
        return Err(Error::Targeting { target, lo: emin, hi: emax });
    };
    let (mut a, mut b) = (grid[k], grid[k + 1]);
    let (mut fa, fb) = (f[k], f[k + 1]);
    let (mut best_l, mut best_f) = if fa.abs() <= fb.abs() { (a, fa) } else { (b, fb) };
    let mut bisections = 0;
    while best_f.abs() >= tol && bisections < MAX_BISECTIONS {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = ctx.excitation_from(m, branch)? - target;
        bisections += 1;
        if fm.abs() < best_f.abs() {
            best_l = m;
            best_f = fm;
        }
        if fa * fm <= 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    if best_f.abs() >= tol {
        return Err(Error::Targeting {
            target,
            lo: target + best_f,
            hi: target + best_f,
        });
    }
    let result = ctx.quench(best_l, branch)?;
    Ok(Targeted {
        lambda_i: best_l,
        target,
        achieved: result.e_f,
        bisections,
        bracket: (grid[k], grid[k + 1]),
        crossings,
        scan_monotone,
        result,
    })
}

/// Relative change of the lowest `+` level below which a photon
/// truncation counts as converged.
pub const GROUND_ENERGY_TOL: f64 = 1e-8;
const MAX_DOUBLINGS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationChoice {
    pub n_max: usize,
    pub ground_energy: f64,
    pub ground_energy_change: f64,
    pub tail: f64,
    pub nu_max: f64,
}

/// Photon cutoff for `spec_f` good for initial states up to `lambda_i_max`.
///
/// Starts at `4 max(N, ⌈ν²⌉)` and doubles until the `+`-sector ground
/// energy moves by less than `GROUND_ENERGY_TOL` relative to the previous
/// halving and the coherent-state tail is below the truncation limit.
pub fn adaptive_n_max(spec_f: &ModelSpec, lambda_i_max: f64, branch: i8) -> Result<TruncationChoice> {
    if spec_f.model != ModelKind::Dicke {
        return Err(Error::Config("photon truncation applies to the Dicke model only".into()));
    }
    let nu_max = [spec_f.lambda, lambda_i_max]
        .iter()
        .map(|&l| match variational_minimum(&spec_f.with_lambda(l).with_n_max(1), branch).map(|v| v.params) {
            Ok(CoherentParams::Dicke { nu_c, .. }) => Ok(nu_c.abs()),
            Ok(_) => unreachable!("Dicke parameters"),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let mut n_max = 4 * spec_f.n.max((nu_max * nu_max).ceil() as usize);
    let ground = |n_max: usize| -> Result<f64> { Ok(sector_eigenvalues(&spec_f.with_n_max(n_max), 1)?[0]) };
    let mut previous = ground(n_max / 2)?;
    for _ in 0..=MAX_DOUBLINGS {
        let e = ground(n_max)?;
        let change = (e - previous).abs() / e.abs().max(1.0);
        let tail = dicke_photon_tail(nu_max, n_max);
        if change < GROUND_ENERGY_TOL && tail < DICKE_TAIL_LIMIT {
            return Ok(TruncationChoice {
                n_max,
                ground_energy: e,
                ground_energy_change: change,
                tail,
                nu_max,
            });
        }
        previous = e;
        n_max *= 2;
    }
    Err(Error::Truncation {
        tail: dicke_photon_tail(nu_max, n_max),
        n_max,
    })
}
