//! Derivative-free minimizers used for the mean-field parameters.

/// Golden-section search for a minimum of `f` on `[a, b]`.
///
/// Stops once the bracket is narrower than `tol`. The endpoints are also
/// compared so that boundary minima are reported exactly.
pub fn golden_section(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let (mut x, mut fx) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for edge in [a, b] {
        let fe = f(edge);
        if fe < fx {
            x = edge;
            fx = fe;
        }
    }
    (x, fx)
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub xtol: f64,
    pub ftol: f64,
    pub max_iter: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            xtol: 1e-10,
            ftol: 1e-14,
            max_iter: 20_000,
        }
    }
}

/// Nelder–Mead simplex in two dimensions with box constraints enforced by
/// clamping every trial point. Returns `(x, f(x), iterations)`.
pub fn nelder_mead_2d(
    mut f: impl FnMut([f64; 2]) -> f64,
    x0: [f64; 2],
    step: [f64; 2],
    bounds: [(f64, f64); 2],
    opts: NelderMeadOptions,
) -> ([f64; 2], f64, usize) {
    let clamp = |x: [f64; 2]| {
        [
            x[0].clamp(bounds[0].0, bounds[0].1),
            x[1].clamp(bounds[1].0, bounds[1].1),
        ]
    };
    let mut pts = [
        clamp(x0),
        clamp([x0[0] + step[0], x0[1]]),
        clamp([x0[0], x0[1] + step[1]]),
    ];
    let mut vals = pts.map(&mut f);
    let mut iter = 0;
    while iter < opts.max_iter {
        iter += 1;
        let mut order = [0, 1, 2];
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        pts = order.map(|i| pts[i]);
        vals = order.map(|i| vals[i]);

        let spread = (1..3)
            .map(|i| (pts[i][0] - pts[0][0]).abs().max((pts[i][1] - pts[0][1]).abs()))
            .fold(0.0, f64::max);
        if spread < opts.xtol && (vals[2] - vals[0]).abs() <= opts.ftol * (1.0 + vals[0].abs()) {
            break;
        }

        let c = [(pts[0][0] + pts[1][0]) / 2.0, (pts[0][1] + pts[1][1]) / 2.0];
        let along = |t: f64| clamp([c[0] + t * (pts[2][0] - c[0]), c[1] + t * (pts[2][1] - c[1])]);
        let xr = along(-1.0);
        let fr = f(xr);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(xe);
            if fe < fr {
                pts[2] = xe;
                vals[2] = fe;
            } else {
                pts[2] = xr;
                vals[2] = fr;
            }
        } else if fr < vals[1] {
            pts[2] = xr;
            vals[2] = fr;
        } else {
            let (xc, fc) = if fr < vals[2] {
                let x = along(-0.5);
                (x, f(x))
            } else {
                let x = along(0.5);
                (x, f(x))
            };
            if fc < vals[2].min(fr) {
                pts[2] = xc;
                vals[2] = fc;
            } else {
                for i in 1..3 {
                    pts[i] = clamp([
                        pts[0][0] + 0.5 * (pts[i][0] - pts[0][0]),
                        pts[0][1] + 0.5 * (pts[i][1] - pts[0][1]),
                    ]);
                    vals[i] = f(pts[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap();
    (pts[best], vals[best], iter)
}
