//! The saturation table for the four examples and the Selberg variant of D.

use super::{
    beta_kappa, integral_bound, optimize_r, solve_f_f, solve_sigma, Mode, Provenance, SieveError, SieveFunctionTable,
    SieveParams,
};

pub const SPECTRAL_GAP_GAMBURD: f64 = 5.0 / 6.0;
pub const SPECTRAL_GAP_KIM_SARNAK: f64 = 39.0 / 64.0;
pub const SPECTRAL_GAP_SELBERG: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct SaturationRow {
    pub example: &'static str,
    pub mode: Mode,
    pub theta: f64,
    pub degree: u32,
    pub alpha: f64,
    pub kappa: f64,
    pub zeta_star: f64,
    pub m_star: f64,
    pub r: u32,
    pub provenance: Provenance,
    /// Smallest δ for which the closed-form `R` still equals its value at the
    /// configured δ.
    pub delta_star: f64,
    /// `R` from the integral bound; only computed where `α_κ` is known (κ = 1).
    pub r_integral: Option<u32>,
    /// Richert-weight value from the literature (the κ = 1, `deg f = 1` rows at δ = 1).
    pub r_literature: Option<u32>,
}

/// `(example, θ, deg f, κ)`.
const EXAMPLES: [(&str, f64, u32, f64); 5] = [
    ("A", SPECTRAL_GAP_GAMBURD, 1, 1.0),
    ("B", SPECTRAL_GAP_GAMBURD, 2, 4.0),
    ("C", SPECTRAL_GAP_GAMBURD, 3, 5.0),
    ("D", SPECTRAL_GAP_KIM_SARNAK, 3, 3.0),
    ("D-Selberg", SPECTRAL_GAP_SELBERG, 3, 3.0),
];

pub const EXAMPLE_LABELS: [&str; 5] = ["A", "B", "C", "D", "D-Selberg"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableConfig {
    pub delta: f64,
    /// Step for the κ = 1 integral bound; `None` skips it.
    pub integral_step: Option<f64>,
}

impl Default for TableConfig {
    fn default() -> Self {
        Self {
            delta: 1.0,
            integral_step: Some(1e-3),
        }
    }
}

/// All ten rows at `δ = 1`.
pub fn saturation_table() -> Result<Vec<SaturationRow>, SieveError> {
    saturation_table_with(&TableConfig::default())
}

pub fn saturation_table_with(config: &TableConfig) -> Result<Vec<SaturationRow>, SieveError> {
    let linear = match config.integral_step {
        Some(h) => Some(solve_f_f(1.0, 2.0, 2.0, solve_sigma(1.0, 26.0, h)?)?),
        None => None,
    };
    let mut rows = Vec::with_capacity(10);
    for mode in [Mode::Classic, Mode::Projective] {
        for (example, theta, degree, kappa) in EXAMPLES {
            rows.push(saturation_row(example, config.delta, theta, degree, kappa, mode, linear.as_ref())?);
        }
    }
    Ok(rows)
}

/// One row of the table for arbitrary `(θ, deg f, κ, mode)`. The integral
/// bound is only evaluated for κ = 1, and only when `linear` is supplied.
pub fn saturation_row(
    example: &'static str,
    delta: f64,
    theta: f64,
    degree: u32,
    kappa: f64,
    mode: Mode,
    linear: Option<&SieveFunctionTable>,
) -> Result<SaturationRow, SieveError> {
    let params = SieveParams::new(delta, theta, degree, kappa, mode)?;
    let beta = beta_kappa(kappa).ok_or(SieveError::UnknownKappa(kappa))?;
    let best = optimize_r(params.alpha, kappa, beta)?;
    let (r_integral, r_literature) = if kappa == 1.0 {
        let integral = match linear {
            Some(table) => Some(integral_bound(&params, table)?.r),
            None => None,
        };
        let literature = match (mode, theta == SPECTRAL_GAP_GAMBURD && degree == 1 && delta == 1.0) {
            (Mode::Classic, true) => Some(13),
            (Mode::Projective, true) => Some(7),
            _ => None,
        };
        (integral, literature)
    } else {
        (None, None)
    };
    Ok(SaturationRow {
        example,
        mode,
        theta,
        degree,
        alpha: params.alpha,
        kappa,
        zeta_star: best.zeta_star,
        m_star: best.m_star,
        r: best.r,
        provenance: best.provenance,
        delta_star: delta_threshold_from(delta, theta, degree, kappa, mode)?,
        r_integral,
        r_literature,
    })
}

fn closed_form_r(delta: f64, theta: f64, degree: u32, kappa: f64, mode: Mode) -> Result<u32, SieveError> {
    let params = SieveParams::new(delta, theta, degree, kappa, mode)?;
    let beta = beta_kappa(kappa).ok_or(SieveError::UnknownKappa(kappa))?;
    Ok(optimize_r(params.alpha, kappa, beta)?.r)
}

/// The smallest `δ ∈ (θ, 1]` at which the closed-form `R` equals its value
/// at `δ = 1`; below it `R` increments.
pub fn delta_threshold(theta: f64, degree: u32, kappa: f64, mode: Mode) -> Result<f64, SieveError> {
    delta_threshold_from(1.0, theta, degree, kappa, mode)
}

fn delta_threshold_from(top: f64, theta: f64, degree: u32, kappa: f64, mode: Mode) -> Result<f64, SieveError> {
    let target = closed_form_r(top, theta, degree, kappa, mode)?;
    // R(δ) is nonincreasing in δ and blows up as δ → θ.
    let (mut lo, mut hi) = (theta, top);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if closed_form_r(mid, theta, degree, kappa, mode)? == target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
