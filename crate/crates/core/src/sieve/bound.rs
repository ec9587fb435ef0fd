//! The weighted-sieve inequality for `R` evaluated from tabulated `F`, `f`.

use super::dhr::SieveFunctionTable;
use super::{r_from_m, Provenance, RBoundResult, SieveError, SieveParams};

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    if b <= a {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// `τu/α − 1 + (κ/f(τv))·∫₁^{v/u} F(τv − s)(1 − (u/v)s) ds/s`.
///
/// Requires `1/τ < u ≤ v` and `β_κ < τv`, and the table must cover `τv`.
pub fn r_bound_integral(
    params: &SieveParams,
    table: &SieveFunctionTable,
    u: f64,
    v: f64,
) -> Result<f64, SieveError> {
    if table.kappa() != params.kappa {
        return Err(SieveError::Grid(format!(
            "table solved for κ = {}, parameters have κ = {}",
            table.kappa(),
            params.kappa
        )));
    }
    let tau = params.tau;
    if !(tau * u > 1.0 && u <= v) {
        return Err(SieveError::Constraint(format!("need 1/τ < u ≤ v, got τ = {tau}, u = {u}, v = {v}")));
    }
    let tv = tau * v;
    if !(tv > table.beta_k()) {
        return Err(SieveError::Constraint(format!("need β_κ < τv, got τv = {tv}")));
    }
    if tv > table.u_max() {
        return Err(SieveError::Constraint(format!(
            "τv = {tv} lies beyond the tabulated range {}",
            table.u_max()
        )));
    }
    let lower = table.small_f(tv);
    if lower <= 0.0 {
        return Err(SieveError::Constraint(format!("f(τv) = 0 at τv = {tv}")));
    }
    let ratio = u / v;
    let integrand = |s: f64| table.big_f(tv - s) * (1.0 - ratio * s) / s;
    let integral = adaptive_simpson(&integrand, 1.0, v / u, 1e-9);
    Ok(tau * u / params.alpha - 1.0 + params.kappa / lower * integral)
}

/// Infimum of [`r_bound_integral`] over admissible `(u, v)`: a grid in
/// `(τu, τv)` followed by a shrinking compass search.
pub fn integral_bound(params: &SieveParams, table: &SieveFunctionTable) -> Result<RBoundResult, SieveError> {
    let tau = params.tau;
    let beta = table.beta_k();
    let top = (table.u_max() - 1e-6).min(beta + 20.0);
    if top <= beta {
        return Err(SieveError::Constraint("table does not extend past β_κ".into()));
    }
    // a = τu, b = τv with 1 < a ≤ b, β < b
    let eval = |a: f64, b: f64| -> f64 {
        if a <= 1.0 || a > b || b <= beta || b > top {
            return f64::INFINITY;
        }
        r_bound_integral(params, table, a / tau, b / tau).unwrap_or(f64::INFINITY)
    };
    let a_lo = 1.0 + 1e-9;
    let mut best = (f64::INFINITY, a_lo, beta + 1.0);
    for i in 0..40 {
        let a = a_lo + 0.1 * i as f64;
        for j in 1..=80 {
            let b = beta + (top - beta) * j as f64 / 80.0;
            let val = eval(a, b);
            if val < best.0 {
                best = (val, a, b);
            }
        }
    }
    let (mut val, mut a, mut b) = best;
    let mut step = 0.1;
    while step > 1e-7 {
        let mut improved = false;
        for (da, db) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let (na, nb) = ((a + da).max(a_lo), b + db);
            let nv = eval(na, nb);
            if nv < val {
                (val, a, b) = (nv, na, nb);
                improved = true;
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    Ok(RBoundResult {
        zeta_star: b,
        m_star: val,
        r: r_from_m(val),
        provenance: Provenance::IntegralBound,
    })
}
