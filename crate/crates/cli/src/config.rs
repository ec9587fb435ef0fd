//! Strict JSON run configuration.
//!
//! Every key is optional; missing values are filled from per-command defaults,
//! and the resolved configuration is echoed so a run can be reproduced from
//! its log alone.

use std::path::PathBuf;

use orbitsieve_core::experiments::Counting;
use orbitsieve_core::form::{FormError, Mat3, TernaryForm};
use orbitsieve_core::modular::{squarefree_primes, EXAMPLE_D_BAND, MAX_MODULUS};
use orbitsieve_core::orbit::OrbitError;
use orbitsieve_core::presets::{Example, Preset};
use orbitsieve_core::sieve::{beta_kappa, Mode, EXAMPLE_LABELS};
use orbitsieve_core::{ClosureMode, CoordinateFunction, OrbitSpec};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    preset: Option<String>,
    orbit: Option<RawOrbit>,
    f: Option<String>,
    #[serde(rename = "T")]
    radius: Option<f64>,
    t_samples: Option<Vec<f64>>,
    moduli: Option<Vec<u64>>,
    density_band: Option<f64>,
    sieve: Option<RawSieve>,
    counting: Option<String>,
    r_list: Option<Vec<RawR>>,
    output_dir: Option<PathBuf>,
    limits: Option<RawLimits>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOrbit {
    gram: Mat3,
    base: [i64; 3],
    generators: Vec<Mat3>,
    mode: Option<String>,
    negation: Option<bool>,
    prune_slack: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSieve {
    delta: Option<f64>,
    theta: Option<f64>,
    degree: Option<u32>,
    mode: Option<String>,
    kappa: Option<f64>,
    alpha_kappa: Option<f64>,
    h: Option<f64>,
    u_max: Option<f64>,
    examples: Option<Vec<String>>,
    integral: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawR {
    Finite(u32),
    Named(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLimits {
    visited_cap: Option<usize>,
}

#[derive(Debug, Clone)]
pub enum OrbitSource {
    Preset(Preset),
    Inline { gram: Mat3, generators: Vec<Mat3>, mode: ClosureMode },
}

/// A sieve row beyond the built-in examples, from `sieve.theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CustomRow {
    pub theta: f64,
    pub degree: u32,
    pub kappa: f64,
    pub modes: &'static [Mode],
}

#[derive(Debug, Clone)]
pub struct SieveConfig {
    pub delta: f64,
    pub kappa: f64,
    pub alpha_kappa: Option<f64>,
    pub beta_kappa: Option<f64>,
    pub h: f64,
    pub u_max: f64,
    pub examples: Vec<&'static str>,
    pub integral: bool,
    pub custom: Option<CustomRow>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub source: OrbitSource,
    pub spec: OrbitSpec,
    pub function: CoordinateFunction,
    pub radius: f64,
    pub t_samples: Vec<f64>,
    pub moduli: Vec<u64>,
    pub density_band: f64,
    pub sieve: SieveConfig,
    pub counting: Counting,
    pub r_list: Vec<Option<u32>>,
    pub output_dir: Option<PathBuf>,
    pub visited_cap: usize,
}

impl RunConfig {
    /// The worked example this (orbit, function) pair is, if any.
    pub fn example(&self) -> Option<Example> {
        match self.source {
            OrbitSource::Preset(p) => Example::identify(p, self.function),
            OrbitSource::Inline { .. } => None,
        }
    }

    pub fn orbit_label(&self) -> String {
        match &self.source {
            OrbitSource::Preset(p) => p.name().to_string(),
            OrbitSource::Inline { .. } => "inline".to_string(),
        }
    }

    /// The resolved configuration, defaults included.
    pub fn echo(&self) -> Value {
        let orbit = match &self.source {
            OrbitSource::Preset(p) => json!({ "preset": p.name() }),
            OrbitSource::Inline { gram, generators, mode } => json!({
                "gram": gram,
                "base": self.spec.base(),
                "generators": generators,
                "mode": mode_name(*mode),
                "negation": self.spec.has_negation(),
                "prune_slack": self.spec.slack(),
            }),
        };
        let r_list: Vec<Value> = self
            .r_list
            .iter()
            .map(|r| match r {
                Some(r) => json!(r),
                None => json!("inf"),
            })
            .collect();
        let custom = self.sieve.custom.map(|c| {
            json!({
                "theta": c.theta,
                "degree": c.degree,
                "kappa": c.kappa,
                "modes": c.modes.iter().map(|m| m.name()).collect::<Vec<_>>(),
            })
        });
        json!({
            "orbit": orbit,
            "f": self.function.name(),
            "T": self.radius,
            "t_samples": self.t_samples,
            "moduli": self.moduli,
            "density_band": self.density_band,
            "sieve": {
                "delta": self.sieve.delta,
                "kappa": self.sieve.kappa,
                "alpha_kappa": self.sieve.alpha_kappa,
                "beta_kappa": self.sieve.beta_kappa,
                "h": self.sieve.h,
                "u_max": self.sieve.u_max,
                "examples": self.sieve.examples,
                "integral": self.sieve.integral,
                "custom": custom,
            },
            "counting": self.counting.name(),
            "r_list": r_list,
            "output_dir": self.output_dir,
            "limits": { "visited_cap": self.visited_cap },
        })
    }
}

fn mode_name(mode: ClosureMode) -> &'static str {
    match mode {
        ClosureMode::Group => "group",
        ClosureMode::Monoid => "monoid",
    }
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Validation {
        field: field.into(),
        message: message.into(),
    }
}

fn positive_finite(field: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(invalid(field, format!("must be a positive finite number, got {x}")))
    }
}

fn orbit_error(e: OrbitError, generators: &[Mat3]) -> CliError {
    match &e {
        OrbitError::Form(FormError::NotIsometry { matrix }) | OrbitError::Form(FormError::BadDeterminant { matrix, .. }) => {
            let i = generators.iter().position(|g| g == matrix).unwrap_or(0);
            invalid(format!("orbit.generators[{i}]"), e.to_string())
        }
        OrbitError::NotPrimitive { .. } => invalid("orbit.base", e.to_string()),
        OrbitError::NoGenerators => invalid("orbit.generators", e.to_string()),
        OrbitError::BadSlack(_) => invalid("orbit.prune_slack", e.to_string()),
        _ => invalid("orbit", e.to_string()),
    }
}

fn build_inline(raw: RawOrbit) -> Result<(OrbitSource, OrbitSpec), CliError> {
    let form = TernaryForm::new(raw.gram).map_err(|e| invalid("orbit.gram", e.to_string()))?;
    let mode = match raw.mode.as_deref().unwrap_or("group") {
        "group" => ClosureMode::Group,
        "monoid" => ClosureMode::Monoid,
        other => return Err(invalid("orbit.mode", format!("expected group or monoid, got '{other}'"))),
    };
    let mut spec =
        OrbitSpec::new(form, raw.base, &raw.generators, mode).map_err(|e| orbit_error(e, &raw.generators))?;
    spec = spec.negation(raw.negation.unwrap_or(true));
    let slack = raw.prune_slack.unwrap_or(match mode {
        ClosureMode::Monoid => 1.0,
        ClosureMode::Group => 2.0,
    });
    spec = spec.prune_slack(slack).map_err(|e| orbit_error(e, &raw.generators))?;
    Ok((
        OrbitSource::Inline {
            gram: raw.gram,
            generators: raw.generators,
            mode,
        },
        spec,
    ))
}

fn parse_modes(field: &str, s: Option<&str>) -> Result<&'static [Mode], CliError> {
    match s {
        None | Some("both") => Ok(&[Mode::Classic, Mode::Projective]),
        Some("classic") => Ok(&[Mode::Classic]),
        Some("projective") => Ok(&[Mode::Projective]),
        Some(other) => Err(invalid(field, format!("expected classic, projective or both, got '{other}'"))),
    }
}

fn resolve_sieve(raw: RawSieve, function: CoordinateFunction) -> Result<SieveConfig, CliError> {
    let delta = raw.delta.unwrap_or(1.0);
    if !(delta > 0.5 && delta <= 1.0) {
        return Err(invalid("sieve.delta", format!("must lie in (1/2, 1], got {delta}")));
    }
    let kappa = positive_finite("sieve.kappa", raw.kappa.unwrap_or(1.0))?;
    let beta = beta_kappa(kappa);
    let alpha_kappa = match raw.alpha_kappa {
        Some(a) => Some(positive_finite("sieve.alpha_kappa", a)?),
        None if kappa == 1.0 => Some(2.0),
        None => None,
    };
    if let (Some(a), Some(b)) = (alpha_kappa, beta) {
        if a < b {
            return Err(invalid("sieve.alpha_kappa", format!("α_κ = {a} is below β_κ = {b}")));
        }
    }
    let h = raw.h.unwrap_or(1e-3);
    if !(h > 0.0 && h < 1.0) {
        return Err(invalid("sieve.h", format!("must lie in (0, 1), got {h}")));
    }
    let u_max = raw.u_max.unwrap_or(30.0);
    if !(u_max.is_finite() && u_max >= 4.0) {
        return Err(invalid("sieve.u_max", format!("must be ≥ 4, got {u_max}")));
    }
    if let Some(a) = alpha_kappa {
        if a + 1.0 > u_max {
            return Err(invalid("sieve.u_max", format!("must exceed α_κ + 1 = {}", a + 1.0)));
        }
    }
    let examples = match raw.examples {
        None => EXAMPLE_LABELS.to_vec(),
        Some(list) => {
            let mut out = Vec::new();
            for (i, name) in list.iter().enumerate() {
                let label = EXAMPLE_LABELS
                    .iter()
                    .find(|l| **l == name)
                    .ok_or_else(|| invalid(format!("sieve.examples[{i}]"), format!("unknown example '{name}'")))?;
                if !out.contains(label) {
                    out.push(*label);
                }
            }
            out
        }
    };
    let custom = match raw.theta {
        None => {
            if raw.degree.is_some() || raw.mode.is_some() {
                return Err(invalid("sieve.theta", "degree/mode overrides need a θ"));
            }
            None
        }
        Some(theta) => {
            if !(0.5 <= theta && theta < delta) {
                return Err(invalid("sieve.theta", format!("need 1/2 ≤ θ < δ = {delta}, got {theta}")));
            }
            let degree = raw.degree.unwrap_or(function.degree());
            if degree == 0 {
                return Err(invalid("sieve.degree", "must be ≥ 1"));
            }
            let row_kappa = raw.kappa.unwrap_or(function.kappa() as f64);
            if beta_kappa(row_kappa).is_none() {
                return Err(invalid(
                    "sieve.kappa",
                    format!("no tabulated β_κ for κ = {row_kappa} (available: 1, 3, 4, 5)"),
                ));
            }
            Some(CustomRow {
                theta,
                degree,
                kappa: row_kappa,
                modes: parse_modes("sieve.mode", raw.mode.as_deref())?,
            })
        }
    };
    Ok(SieveConfig {
        delta,
        kappa,
        alpha_kappa,
        beta_kappa: beta,
        h,
        u_max,
        examples,
        integral: raw.integral.unwrap_or(true),
        custom,
    })
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| invalid("<document>", e.to_string()))?;
    let (source, spec) = match (raw.preset, raw.orbit) {
        (Some(_), Some(_)) => return Err(invalid("preset", "give either preset or orbit, not both")),
        (None, Some(orbit)) => build_inline(orbit)?,
        (name, None) => {
            let name = name.unwrap_or_else(|| Preset::PythagoreanFull.name().to_string());
            let preset: Preset = name.parse().map_err(|e: String| invalid("preset", e))?;
            (OrbitSource::Preset(preset), preset.spec())
        }
    };
    let function = match raw.f {
        Some(f) => f.parse::<CoordinateFunction>().map_err(|e| invalid("f", e.to_string()))?,
        None => match source {
            OrbitSource::Preset(p) if p.is_pythagorean() => CoordinateFunction::CoordProduct,
            _ => CoordinateFunction::RawProduct,
        },
    };
    let radius = positive_finite("T", raw.radius.unwrap_or(1e4))?;
    let t_samples = match raw.t_samples {
        Some(ts) => {
            for (i, t) in ts.iter().enumerate() {
                positive_finite(&format!("t_samples[{i}]"), *t)?;
            }
            let mut ts = ts;
            ts.sort_by(f64::total_cmp);
            ts.dedup();
            ts
        }
        None => {
            // defaults inside the base norm would give empty balls
            let floor = (orbitsieve_core::form::norm_squared(&spec.base()) as f64).sqrt();
            [radius / 100.0, radius / 10.0, radius].into_iter().filter(|&t| t > floor).collect()
        }
    };
    let moduli = match raw.moduli {
        Some(qs) => {
            for (i, &q) in qs.iter().enumerate() {
                if q == 0 || q >= MAX_MODULUS {
                    return Err(invalid(format!("moduli[{i}]"), format!("{q} is outside [1, 2^21)")));
                }
                if squarefree_primes(q).is_none() {
                    return Err(invalid(format!("moduli[{i}]"), format!("{q} is not squarefree")));
                }
            }
            let mut qs = qs;
            qs.sort_unstable();
            qs.dedup();
            qs
        }
        None => vec![7, 11, 13, 17, 19],
    };
    let density_band = positive_finite("density_band", raw.density_band.unwrap_or(EXAMPLE_D_BAND))?;
    let sieve = resolve_sieve(raw.sieve.unwrap_or_default(), function)?;
    let counting = match raw.counting.as_deref() {
        None | Some("multiplicity") => Counting::Multiplicity,
        Some("distinct") => Counting::Distinct,
        Some(other) => return Err(invalid("counting", format!("expected multiplicity or distinct, got '{other}'"))),
    };
    let r_list = match raw.r_list {
        None => (0..=20).map(Some).chain([None]).collect(),
        Some(list) => {
            let mut out = Vec::with_capacity(list.len());
            for (i, r) in list.into_iter().enumerate() {
                out.push(match r {
                    RawR::Finite(r) => Some(r),
                    RawR::Named(s) if s == "inf" => None,
                    RawR::Named(s) => {
                        return Err(invalid(format!("r_list[{i}]"), format!("expected an integer or \"inf\", got '{s}'")))
                    }
                });
            }
            // None (R = ∞) sorts last
            out.sort_by_key(|r| (r.is_none(), *r));
            out.dedup();
            out
        }
    };
    let visited_cap = raw.limits.unwrap_or_default().visited_cap.unwrap_or(100_000_000);
    if visited_cap == 0 {
        return Err(invalid("limits.visited_cap", "must be ≥ 1"));
    }
    Ok(RunConfig {
        source,
        spec,
        function,
        radius,
        t_samples,
        moduli,
        density_band,
        sieve,
        counting,
        r_list,
        output_dir: raw.output_dir,
        visited_cap,
    })
}
