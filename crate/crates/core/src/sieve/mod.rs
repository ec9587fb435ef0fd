//! Exponents of distribution and weighted-sieve saturation bounds.

mod bound;
mod dhr;
mod minimize;
mod table;

pub use bound::{integral_bound, r_bound_integral};
pub use dhr::{sieve_constant, solve_f_f, solve_sigma, SieveFunctionTable, SigmaTable, EULER_GAMMA};
pub use minimize::golden_section;
pub use table::{
    delta_threshold, saturation_row, saturation_table, saturation_table_with, SaturationRow, TableConfig, EXAMPLE_LABELS,
    SPECTRAL_GAP_GAMBURD, SPECTRAL_GAP_KIM_SARNAK, SPECTRAL_GAP_SELBERG,
};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SieveError {
    #[error("need 1/2 ≤ θ < δ ≤ 1, got δ = {delta}, θ = {theta}")]
    InvalidGap { delta: f64, theta: f64 },
    #[error("degree must be ≥ 1")]
    InvalidDegree,
    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("sieve function grids disagree: {0}")]
    Grid(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("no tabulated β_κ for κ = {0}")]
    UnknownKappa(f64),
}

/// Which stabiliser the level of distribution is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Point stabiliser; coset space of size ≍ q².
    Classic,
    /// Line stabiliser; coset space of size ≍ q.
    Projective,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Classic => "classic",
            Mode::Projective => "projective",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "classic" => Ok(Mode::Classic),
            "projective" => Ok(Mode::Projective),
            _ => Err(format!("unknown sieve mode '{s}' (expected classic or projective)")),
        }
    }
}

fn check_gap(delta: f64, theta: f64) -> Result<(), SieveError> {
    if !(0.5 <= theta && theta < delta && delta <= 1.0) {
        return Err(SieveError::InvalidGap { delta, theta });
    }
    Ok(())
}

/// `(δ − θ)/(2·deg)` for the point stabiliser, `(δ − θ)/deg` for the line
/// stabiliser.
pub fn exponent_of_distribution(delta: f64, theta: f64, degree: u32, mode: Mode) -> Result<f64, SieveError> {
    check_gap(delta, theta)?;
    if degree == 0 {
        return Err(SieveError::InvalidDegree);
    }
    let base = (delta - theta) / degree as f64;
    Ok(match mode {
        Mode::Classic => base / 2.0,
        Mode::Projective => base,
    })
}

/// `τ = α·deg/δ`.
pub fn tau_parameter(alpha: f64, degree: u32, delta: f64) -> f64 {
    alpha * degree as f64 / delta
}

/// Tabulated `β_κ` for the sieve dimensions that occur here.
pub fn beta_kappa(kappa: f64) -> Option<f64> {
    const TABLE: [(f64, f64); 4] = [(1.0, 2.0), (3.0, 6.6408), (4.0, 9.0722), (5.0, 11.5347)];
    TABLE.iter().find(|(k, _)| *k == kappa).map(|(_, b)| *b)
}

/// Validated sieve inputs with the derived `α` and `τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SieveParams {
    pub delta: f64,
    pub theta: f64,
    pub degree: u32,
    pub kappa: f64,
    pub mode: Mode,
    pub alpha: f64,
    pub tau: f64,
}

impl SieveParams {
    pub fn new(delta: f64, theta: f64, degree: u32, kappa: f64, mode: Mode) -> Result<Self, SieveError> {
        let alpha = exponent_of_distribution(delta, theta, degree, mode)?;
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(SieveError::Domain {
                name: "kappa",
                value: kappa,
                expected: "κ > 0",
            });
        }
        Ok(Self {
            delta,
            theta,
            degree,
            kappa,
            mode,
            alpha,
            tau: tau_parameter(alpha, degree, delta),
        })
    }
}

/// `m_{α,κ}(ζ) = (1/α)(1 + ζ − ζ/β) − 1 + (κ + ζ)·log(β/ζ) − κ + ζκ/β`.
pub fn m_zeta(alpha: f64, kappa: f64, beta_k: f64, zeta: f64) -> Result<f64, SieveError> {
    if !(zeta > 0.0 && zeta < beta_k) {
        return Err(SieveError::Domain {
            name: "zeta",
            value: zeta,
            expected: "0 < ζ < β_κ",
        });
    }
    if !(alpha > 0.0) {
        return Err(SieveError::Domain {
            name: "alpha",
            value: alpha,
            expected: "α > 0",
        });
    }
    Ok(m_unchecked(alpha, kappa, beta_k, zeta))
}

fn m_unchecked(alpha: f64, kappa: f64, beta_k: f64, zeta: f64) -> f64 {
    (1.0 + zeta - zeta / beta_k) / alpha - 1.0 + (kappa + zeta) * (beta_k / zeta).ln() - kappa
        + zeta * kappa / beta_k
}

/// Where a bound on `R` came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    ClosedFormM,
    IntegralBound,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::ClosedFormM => "closed_form_m",
            Provenance::IntegralBound => "integral_bound",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RBoundResult {
    /// Minimising ζ for the closed form; `τv` for the integral bound.
    pub zeta_star: f64,
    pub m_star: f64,
    pub r: u32,
    pub provenance: Provenance,
}

/// Smallest integer strictly greater than `m`.
pub fn r_from_m(m: f64) -> u32 {
    (m.floor() + 1.0) as u32
}

pub const ZETA_MARGIN: f64 = 1e-3;

/// Minimise `m_zeta` over `ζ ∈ [1e−3, β_κ − 1e−3]`: a dense scan locates the
/// basin, golden-section search refines it.
pub fn optimize_r(alpha: f64, kappa: f64, beta_k: f64) -> Result<RBoundResult, SieveError> {
    if !(alpha > 0.0) {
        return Err(SieveError::Domain {
            name: "alpha",
            value: alpha,
            expected: "α > 0",
        });
    }
    if !(beta_k >= 2.0) {
        return Err(SieveError::Domain {
            name: "beta_k",
            value: beta_k,
            expected: "β_κ ≥ 2",
        });
    }
    let (lo, hi) = (ZETA_MARGIN, beta_k - ZETA_MARGIN);
    let m = |z: f64| m_unchecked(alpha, kappa, beta_k, z);
    const SCAN: usize = 4000;
    let step = (hi - lo) / SCAN as f64;
    let best = (0..=SCAN)
        .map(|i| lo + step * i as f64)
        .min_by(|a, b| m(*a).total_cmp(&m(*b)))
        .expect("scan is nonempty");
    let a = (best - step).max(lo);
    let b = (best + step).min(hi);
    let zeta_star = golden_section(m, a, b, 1e-10);
    let m_star = m(zeta_star);
    Ok(RBoundResult {
        zeta_star,
        m_star,
        r: r_from_m(m_star),
        provenance: Provenance::ClosedFormM,
    })
}
