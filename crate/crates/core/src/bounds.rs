//! Variational convergence bounds for the polymer representation of the
//! canonical partition function.
//!
//! The polymer measure carries a free normalisation constant `K >= 1`, and
//! convergence of the cluster expansion at inverse temperature `beta`,
//! stability constant `B` and temperedness integral `C(beta)` is controlled
//! by three scalar functions of `u = e^{-beta B} K`:
//!
//! * `F(u) = max_{a>0} log(1 + u(1 - e^{-a})) / (e^a (1 + u(1 - e^{-a})))`,
//!   the optimised density gain; `F(0+) = 0`, `F(u) -> 1/e` as `u -> inf`;
//! * `G(u) = 1 / F(u)`, the quantity the inverse density must exceed;
//! * `g(x) = 1 / (1 - (1 - e^{-x})^2)`, the largest `K` admissible when the
//!   inner maximisation settles at `a = x`.
//!
//! A pair `(beta B, K)` is *feasible* when `K <= g(a*(u))` with `a*(u)` the
//! maximiser of `F`; the guaranteed convergence radius is then
//! `rho*(beta, B, K) = K e^{-beta B} F(u) / C(beta)`, which improves on the
//! classical `K = 1` radius `rho*_1 = e^{-beta B} F(e^{-beta B}) / C(beta)`.
//! The largest universally feasible constant `K*` solves the fixed-point
//! condition `K = g(a*(K))` (worst case `beta B = 0`).

use serde::Serialize;

/// Lower end of the coarse search grid for the inner maximisation.
const GRID_MIN: f64 = 1e-6;
/// Upper end of the coarse search grid.
const GRID_MAX: f64 = 64.0;
/// Number of coarse geometric grid points.
const GRID_POINTS: usize = 128;
/// Width tolerance of the golden-section refinement.
const GOLDEN_TOL: f64 = 1e-10;
/// Inverse golden ratio, `(sqrt(5) - 1) / 2`.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Result of the inner maximisation of `F(u)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FMaximization {
    /// `F(u)`, the maximal objective value.
    pub value: f64,
    /// The maximising `a`.
    pub a_star: f64,
    /// Set when `u = 0`: the values are the analytic `u -> 0` limits
    /// (`F = 0`, `a* = ln 2`) rather than the result of a search.
    pub small_u_limit: bool,
}

/// The objective `log(1 + u(1 - e^{-a})) / (e^a (1 + u(1 - e^{-a})))`.
///
/// Domain: `u >= 0`, `a > 0` (finite).
pub fn f_objective(u: f64, a: f64) -> f64 {
    debug_assert!(u >= 0.0 && a > 0.0, "f_objective domain: u >= 0, a > 0");
    let t = u * -(-a).exp_m1(); // u (1 - e^{-a}), accurately for small a
    t.ln_1p() / (a.exp() * (1.0 + t))
}

/// Maximise `a -> f_objective(u, a)` over `a > 0`.
///
/// A 128-point geometric grid over `[1e-6, 64]` brackets the maximiser, then
/// golden-section search refines the bracket to width `1e-10`.  The
/// maximiser drifts like `(e-1)/u` for large `u` and tends to `ln 2` as
/// `u -> 0`, both safely inside the grid for every `u` of interest.
pub fn maximize_f(u: f64) -> FMaximization {
    assert!(
        u >= 0.0 && u.is_finite(),
        "maximize_f requires finite u >= 0"
    );
    if u == 0.0 {
        return FMaximization {
            value: 0.0,
            a_star: std::f64::consts::LN_2,
            small_u_limit: true,
        };
    }
    let ratio = (GRID_MAX / GRID_MIN).powf(1.0 / (GRID_POINTS - 1) as f64);
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    let mut nodes = [0.0; GRID_POINTS];
    for (i, node) in nodes.iter_mut().enumerate() {
        *node = GRID_MIN * ratio.powi(i as i32);
        let v = f_objective(u, *node);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let lo = nodes[best_i.saturating_sub(1)];
    let hi = nodes[(best_i + 1).min(GRID_POINTS - 1)];
    let (a_star, value) = golden_max(|a| f_objective(u, a), lo, hi, GOLDEN_TOL);
    FMaximization {
        value,
        a_star,
        small_u_limit: false,
    }
}

/// Golden-section maximisation of a unimodal function on `[lo, hi]`.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

/// `G(u) = 1 / F(u)`; `+inf` at `u = 0`.
pub fn eval_g(u: f64) -> f64 {
    let f = maximize_f(u);
    if f.value == 0.0 {
        f64::INFINITY
    } else {
        1.0 / f.value
    }
}

/// `g(x) = 1 / (1 - (1 - e^{-x})^2)` for `x >= 0`; strictly increasing,
/// `g(0) = 1`, `g(inf) = inf`.
pub fn g_function(x: f64) -> f64 {
    assert!(
        x >= 0.0 && x.is_finite(),
        "g_function requires finite x >= 0"
    );
    let s = -(-x).exp_m1(); // 1 - e^{-x}
    1.0 / (1.0 - s * s)
}

/// Feasibility of a normalisation constant `K` at given `beta B`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Feasibility {
    pub u: f64,
    pub a_star: f64,
    pub g_a_star: f64,
    pub feasible: bool,
}

/// Check `K <= g(a*(u))` with `u = e^{-beta B} K`.
pub fn feasibility(beta: f64, stab: f64, k: f64) -> Feasibility {
    assert!(beta > 0.0 && stab >= 0.0 && k > 0.0, "feasibility domain");
    let u = (-beta * stab).exp() * k;
    let m = maximize_f(u);
    let g = g_function(m.a_star);
    Feasibility {
        u,
        a_star: m.a_star,
        g_a_star: g,
        feasible: k <= g,
    }
}

/// Largest `K` feasible for *every* `beta B >= 0`, i.e. the fixed point of
/// `K = g(a*(K))`.
///
/// `u = e^{-beta B} K` is largest (and `g(a*(u))` smallest) at `beta B = 0`,
/// so the universal constant solves the worst case `K <= g(a*(K))`; the
/// predicate is monotone in `K` and bisection on `[1, 2]` converges to the
/// stated interval width `tol`.
pub fn find_k_star(tol: f64) -> f64 {
    assert!(tol > 0.0, "tolerance must be positive");
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let m = maximize_f(mid);
        if mid <= g_function(m.a_star) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Guaranteed convergence radius
/// `rho*(beta, B, C, K) = K e^{-beta B} F(e^{-beta B} K) / C`.
pub fn rho_star(beta: f64, stab: f64, c_beta: f64, k: f64) -> f64 {
    assert!(
        beta > 0.0 && stab >= 0.0 && c_beta > 0.0 && k > 0.0,
        "rho_star domain"
    );
    let ebb = (-beta * stab).exp();
    k * ebb * maximize_f(ebb * k).value / c_beta
}

/// The classical `K = 1` radius `rho*_1 = e^{-beta B} F(e^{-beta B}) / C`.
pub fn rho_star_known(beta: f64, stab: f64, c_beta: f64) -> f64 {
    rho_star(beta, stab, c_beta, 1.0)
}

/// Largest feasible `K` in `[1, k_max]` at the given `beta B` (bisection on
/// the monotone feasibility predicate; `K = 1` is always feasible since
/// `g >= 1`).  `rho*` increases with `K`, so this choice maximises the
/// guaranteed radius.
pub fn optimize_k(beta: f64, stab: f64, k_max: f64) -> f64 {
    assert!(k_max >= 1.0, "k_max must be >= 1");
    if feasibility(beta, stab, k_max).feasible {
        return k_max;
    }
    let (mut lo, mut hi) = (1.0f64, k_max);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if feasibility(beta, stab, mid).feasible {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// One row of the `u`-sweep emitted by [`emit_curves`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CurveRow {
    pub u: f64,
    pub f: f64,
    pub a_star: f64,
    pub g_a_star: f64,
}

/// Evaluate `(u, F(u), a*(u), g(a*(u)))` on a geometric grid of `points`
/// values spanning `[u_min, u_max]` (inclusive ends).
pub fn emit_curves(u_min: f64, u_max: f64, points: usize) -> Vec<CurveRow> {
    assert!(
        u_min > 0.0 && u_max > u_min && points >= 2,
        "emit_curves requires 0 < u_min < u_max and points >= 2"
    );
    let ratio = (u_max / u_min).powf(1.0 / (points - 1) as f64);
    (0..points)
        .map(|i| {
            // Pin the last node to u_max exactly.
            let u = if i + 1 == points {
                u_max
            } else {
                u_min * ratio.powi(i as i32)
            };
            let m = maximize_f(u);
            CurveRow {
                u,
                f: m.value,
                a_star: m.a_star,
                g_a_star: g_function(m.a_star),
            }
        })
        .collect()
}

/// Full bounds report for one `(beta, B, C, K)` quadruple; this is the
/// payload of the `radius` command.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundsReport {
    pub beta: f64,
    pub stab: f64,
    pub c_beta: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub u: f64,
    #[serde(rename = "F")]
    pub f: f64,
    pub a_star: f64,
    pub g_a_star: f64,
    pub feasible: bool,
    pub rho_star: f64,
    pub rho_star_1: f64,
    pub ratio: f64,
}

/// Assemble the report: feasibility, both radii and their ratio.
pub fn bounds_report(beta: f64, stab: f64, c_beta: f64, k: f64) -> BoundsReport {
    let feas = feasibility(beta, stab, k);
    let m = maximize_f(feas.u);
    let rho = rho_star(beta, stab, c_beta, k);
    let rho1 = rho_star_known(beta, stab, c_beta);
    BoundsReport {
        beta,
        stab,
        c_beta,
        k,
        u: feas.u,
        f: m.value,
        a_star: feas.a_star,
        g_a_star: feas.g_a_star,
        feasible: feas.feasible,
        rho_star: rho,
        rho_star_1: rho1,
        ratio: rho / rho1,
    }
}
