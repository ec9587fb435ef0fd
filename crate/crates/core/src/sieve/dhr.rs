//! The Diamond–Halberstam–Richert functions `σ_κ`, `F_κ`, `f_κ`.
//!
//! All three satisfy delayed equations whose right-hand sides only look back
//! by 1 or 2, so with a step `h < 1` each new node is an explicit trapezoidal
//! update over history already on the grid. Off-grid lookups interpolate
//! linearly.

use statrs::function::gamma::gamma;

use super::SieveError;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `A_κ = (2e^γ)^κ · Γ(κ + 1)`.
pub fn sieve_constant(kappa: f64) -> f64 {
    (2.0 * EULER_GAMMA.exp()).powf(kappa) * gamma(kappa + 1.0)
}

fn grid_len(u_max: f64, h: f64) -> usize {
    (u_max / h - 1e-9).ceil() as usize + 1
}

fn interpolate(values: &[f64], h: f64, x: f64) -> f64 {
    let pos = x / h;
    let i = pos.floor() as usize;
    if i + 1 >= values.len() {
        return values[values.len() - 1];
    }
    let t = pos - i as f64;
    values[i] * (1.0 - t) + values[i + 1] * t
}

/// `σ_κ` on the grid `u_i = i·h`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaTable {
    kappa: f64,
    h: f64,
    a_kappa: f64,
    values: Vec<f64>,
}

impl SigmaTable {
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn u_max(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Exact on `(0, 2]`, interpolated beyond.
    pub fn at(&self, u: f64) -> f64 {
        if u <= 0.0 {
            0.0
        } else if u <= 2.0 {
            u.powf(self.kappa) / self.a_kappa
        } else {
            interpolate(&self.values, self.h, u)
        }
    }
}

/// Solve `u^{−κ}σ(u) = 1/A_κ` on `(0, 2]`, `(u^{−κ}σ(u))' = −κ·u^{−κ−1}·σ(u − 2)` beyond.
pub fn solve_sigma(kappa: f64, u_max: f64, h: f64) -> Result<SigmaTable, SieveError> {
    if !(h > 0.0 && h < 1.0) {
        return Err(SieveError::Domain {
            name: "h",
            value: h,
            expected: "0 < h < 1",
        });
    }
    if !(u_max >= 2.0 && u_max.is_finite()) {
        return Err(SieveError::Domain {
            name: "u_max",
            value: u_max,
            expected: "u_max ≥ 2",
        });
    }
    if !(kappa > 0.0) {
        return Err(SieveError::Domain {
            name: "kappa",
            value: kappa,
            expected: "κ > 0",
        });
    }
    let a_kappa = sieve_constant(kappa);
    let n = grid_len(u_max, h);
    let mut values = vec![0.0; n];
    let mut scaled = 1.0 / a_kappa;
    let rhs = |s: f64, values: &[f64]| -> f64 {
        let delayed = s - 2.0;
        let sig = if delayed <= 2.0 {
            delayed.max(0.0).powf(kappa) / a_kappa
        } else {
            interpolate(values, h, delayed)
        };
        -kappa * s.powf(-kappa - 1.0) * sig
    };
    for i in 1..n {
        let u = i as f64 * h;
        if u <= 2.0 {
            values[i] = u.powf(kappa) / a_kappa;
            continue;
        }
        let lo = ((i - 1) as f64 * h).max(2.0);
        scaled += (u - lo) / 2.0 * (rhs(lo, &values) + rhs(u, &values));
        values[i] = u.powf(kappa) * scaled;
    }
    Ok(SigmaTable {
        kappa,
        h,
        a_kappa,
        values,
    })
}

/// `σ`, `F` and `f` on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SieveFunctionTable {
    sigma: SigmaTable,
    alpha_k: f64,
    beta_k: f64,
    big_f: Vec<f64>,
    small_f: Vec<f64>,
}

impl SieveFunctionTable {
    pub fn kappa(&self) -> f64 {
        self.sigma.kappa
    }

    pub fn alpha_k(&self) -> f64 {
        self.alpha_k
    }

    pub fn beta_k(&self) -> f64 {
        self.beta_k
    }

    pub fn step(&self) -> f64 {
        self.sigma.h
    }

    pub fn sigma(&self) -> &SigmaTable {
        &self.sigma
    }

    pub fn len(&self) -> usize {
        self.big_f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.big_f.is_empty()
    }

    pub fn u_max(&self) -> f64 {
        (self.big_f.len() - 1) as f64 * self.sigma.h
    }

    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.sigma.h;
        (0..self.big_f.len()).map(move |i| i as f64 * h)
    }

    pub fn big_f_values(&self) -> &[f64] {
        &self.big_f
    }

    pub fn small_f_values(&self) -> &[f64] {
        &self.small_f
    }

    /// `F(u)`; uses `1/σ` directly on `(0, α_κ]`.
    pub fn big_f(&self, u: f64) -> f64 {
        if u <= self.alpha_k {
            1.0 / self.sigma.at(u)
        } else {
            interpolate(&self.big_f, self.sigma.h, u)
        }
    }

    pub fn small_f(&self, u: f64) -> f64 {
        if u <= self.beta_k {
            0.0
        } else {
            interpolate(&self.small_f, self.sigma.h, u)
        }
    }
}

/// Solve `F = 1/σ` on `(0, α_κ]`, `f = 0` on `(0, β_κ]`, `(uF)' = f(u − 1)`
/// past `α_κ` and `(uf)' = F(u − 1)` past `β_κ`; the table stops at
/// `u_max − 1` of the σ grid.
pub fn solve_f_f(
    kappa: f64,
    alpha_k: f64,
    beta_k: f64,
    sigma: SigmaTable,
) -> Result<SieveFunctionTable, SieveError> {
    if sigma.kappa != kappa {
        return Err(SieveError::Grid(format!(
            "σ table was solved for κ = {}, not {kappa}",
            sigma.kappa
        )));
    }
    if !(alpha_k >= beta_k && beta_k >= 2.0) {
        return Err(SieveError::Domain {
            name: "alpha_k",
            value: alpha_k,
            expected: "α_κ ≥ β_κ ≥ 2",
        });
    }
    if alpha_k > sigma.u_max() {
        return Err(SieveError::Grid(format!(
            "σ is solved to {} but α_κ = {alpha_k}",
            sigma.u_max()
        )));
    }
    let h = sigma.h;
    let n = grid_len(sigma.u_max() - 1.0, h);
    if n < 2 {
        return Err(SieveError::Grid("grid too short".into()));
    }
    let mut big_f = vec![f64::INFINITY; n];
    let mut small_f = vec![0.0; n];
    let alpha_term = alpha_k / sigma.at(alpha_k);
    let (mut int_big, mut int_small) = (0.0, 0.0);
    let lookup_big = |x: f64, big: &[f64]| -> f64 {
        if x <= alpha_k {
            1.0 / sigma.at(x)
        } else {
            interpolate(big, h, x)
        }
    };
    let lookup_small = |x: f64, small: &[f64]| -> f64 {
        if x <= beta_k {
            0.0
        } else {
            interpolate(small, h, x)
        }
    };
    for i in 1..n {
        let u = i as f64 * h;
        let prev = (i - 1) as f64 * h;
        if u <= alpha_k {
            big_f[i] = 1.0 / sigma.at(u);
        } else {
            let lo = prev.max(alpha_k);
            int_big += (u - lo) / 2.0 * (lookup_small(lo - 1.0, &small_f) + lookup_small(u - 1.0, &small_f));
            big_f[i] = (alpha_term + int_big) / u;
        }
        if u > beta_k {
            let lo = prev.max(beta_k);
            int_small += (u - lo) / 2.0 * (lookup_big(lo - 1.0, &big_f) + lookup_big(u - 1.0, &big_f));
            small_f[i] = int_small / u;
        }
    }
    Ok(SieveFunctionTable {
        sigma,
        alpha_k,
        beta_k,
        big_f,
        small_f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_closed_branch() {
        for kappa in [1.0, 3.0, 4.0, 5.0] {
            let t = solve_sigma(kappa, 6.0, 1e-3).unwrap();
            let a = sieve_constant(kappa);
            for i in 1..=2000 {
                let u = i as f64 * 1e-3;
                assert!((t.values()[i] - u.powf(kappa) / a).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sigma_one_at_two() {
        let t = solve_sigma(1.0, 4.0, 1e-3).unwrap();
        assert!((t.at(2.0) - (-EULER_GAMMA).exp()).abs() < 1e-12);
        assert!((t.at(2.0) - 0.56146).abs() < 1e-5);
    }

    // (u⁻¹σ)' = −u⁻²(u − 2)/A₁ integrates to σ₁(u) = (2u − 2 − u·ln(u/2))/A₁ on [2, 4].
    #[test]
    fn sigma_one_first_window() {
        let t = solve_sigma(1.0, 4.0, 1e-3).unwrap();
        let a = sieve_constant(1.0);
        for i in 2000..=4000 {
            let u = i as f64 * 1e-3;
            let exact = (2.0 * u - 2.0 - u * (u / 2.0).ln()) / a;
            assert!((t.values()[i] - exact).abs() < 1e-6, "u = {u}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(solve_sigma(1.0, 1.5, 1e-3).is_err());
        assert!(solve_sigma(1.0, 5.0, 0.0).is_err());
        assert!(solve_sigma(1.0, 5.0, -1e-3).is_err());
        let s = solve_sigma(1.0, 10.0, 1e-3).unwrap();
        assert!(matches!(solve_f_f(3.0, 7.0, 6.6408, s.clone()), Err(SieveError::Grid(_))));
        assert!(solve_f_f(1.0, 1.5, 2.0, s.clone()).is_err());
        assert!(matches!(solve_f_f(1.0, 12.0, 2.0, s), Err(SieveError::Grid(_))));
    }

    // Linear sieve closed forms: F(u) = 2e^γ/u on (0, 3], f(u) = 2e^γ·ln(u − 1)/u on [2, 4].
    #[test]
    fn linear_sieve_closed_forms() {
        let s = solve_sigma(1.0, 16.0, 1e-3).unwrap();
        let t = solve_f_f(1.0, 2.0, 2.0, s).unwrap();
        let e = 2.0 * EULER_GAMMA.exp();
        assert!((t.big_f(2.0) - EULER_GAMMA.exp()).abs() < 1e-12);
        assert!((t.big_f(2.0) - 1.78107).abs() < 1e-5);
        for i in 1..=3000 {
            let u = i as f64 * 1e-3;
            assert!((t.big_f_values()[i] - e / u).abs() < 1e-9 * (e / u));
        }
        for i in 2000..=4000 {
            let u = i as f64 * 1e-3;
            assert!((t.small_f_values()[i] - e * (u - 1.0).ln() / u).abs() < 1e-6, "u = {u}");
        }
        assert_eq!(t.small_f(2.0), 0.0);
        assert!(t.small_f(2.001) < 1e-2);
    }
}
