use std::path::Path;

use clap::ValueEnum;
use orbitsieve_core::experiments::{almost_prime_table, build_sequence, distribution_report, ExperimentError};
use orbitsieve_core::form::norm_squared;
use orbitsieve_core::modular::{
    local_density, omega_reference_with_band, orbit_mod_q_with, reference_for_modulus, DensityMode, LocalDensityValue,
    ModularError, ReferenceValue,
};
use orbitsieve_core::orbit::{estimate_delta, orbit_ball, OrbitError};
use orbitsieve_core::presets::Example;
use orbitsieve_core::sieve::{saturation_row, saturation_table_with, solve_f_f, solve_sigma, TableConfig};
use orbitsieve_core::{EnumerationLimits, Execution};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::{opt_real, real, Csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Orbit,
    Densities,
    SieveFunctions,
    RValues,
    Distribution,
    AlmostPrimes,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Orbit => "orbit",
            Command::Densities => "densities",
            Command::SieveFunctions => "sieve-functions",
            Command::RValues => "r-values",
            Command::Distribution => "distribution",
            Command::AlmostPrimes => "almost-primes",
        }
    }
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Validation {
        field: field.into(),
        message: message.into(),
    }
}

fn limits(cfg: &RunConfig, execution: Execution) -> EnumerationLimits {
    EnumerationLimits {
        visited_cap: cfg.visited_cap,
        execution,
    }
}

fn base_norm(cfg: &RunConfig) -> f64 {
    (norm_squared(&cfg.spec.base()) as f64).sqrt()
}

fn check_radius(cfg: &RunConfig, field: &str, t: f64) -> Result<(), CliError> {
    let b = base_norm(cfg);
    if t <= b {
        return Err(invalid(field, format!("T = {t} does not exceed the base norm {b:.6}; the ball is empty")));
    }
    Ok(())
}

/// Run one command, writing its CSV files into `out`. Returns a JSON summary.
pub fn dispatch(cfg: &RunConfig, command: Command, out: &Path, execution: Execution) -> Result<Value, CliError> {
    match command {
        Command::Orbit => orbit(cfg, out, execution),
        Command::Densities => densities(cfg, out, execution),
        Command::SieveFunctions => sieve_functions(cfg, out),
        Command::RValues => r_values(cfg, out),
        Command::Distribution => distribution(cfg, out, execution),
        Command::AlmostPrimes => almost_primes(cfg, out, execution),
    }
}

fn orbit(cfg: &RunConfig, out: &Path, execution: Execution) -> Result<Value, CliError> {
    check_radius(cfg, "T", cfg.radius)?;
    for (i, &t) in cfg.t_samples.iter().enumerate() {
        check_radius(cfg, &format!("t_samples[{i}]"), t)?;
    }
    let top = cfg.t_samples.iter().copied().fold(cfg.radius, f64::max);
    let ball = orbit_ball(&cfg.spec, top, &limits(cfg, execution))?;
    let inside = |x: &[i64; 3], t: f64| (norm_squared(x) as f64) < t * t;

    let mut points = Csv::new(&["x", "y", "z"]);
    for x in ball.points.iter().filter(|x| inside(x, cfg.radius)) {
        points.row(x.iter().map(|c| c.to_string()));
    }
    let mut growth = Csv::new(&["T", "count"]);
    let mut samples = Vec::new();
    for &t in &cfg.t_samples {
        let count = ball.points.iter().filter(|x| inside(x, t)).count();
        samples.push((t, count));
        growth.row([real(t), count.to_string()]);
    }
    let delta = estimate_delta(&samples).map_err(|e| match e {
        OrbitError::InsufficientData(_) => invalid("t_samples", e.to_string()),
        other => other.into(),
    })?;
    let mut estimate = Csv::new(&["orbit", "samples", "delta"]);
    estimate.row([cfg.orbit_label(), samples.len().to_string(), real(delta)]);
    let count = ball.points.iter().filter(|x| inside(x, cfg.radius)).count();
    let files = [
        points.write(out, "orbit.csv")?,
        growth.write(out, "orbit_growth.csv")?,
        estimate.write(out, "delta_estimate.csv")?,
    ];
    Ok(json!({ "files": files, "count": count, "delta": delta }))
}

fn bad_modulus(field: String, e: ModularError) -> CliError {
    match e {
        ModularError::BadModulus { .. } | ModularError::InvalidModulus(_) => invalid(field, e.to_string()),
        other => other.into(),
    }
}

fn reference(cfg: &RunConfig, example: Option<Example>, q: u64) -> Option<ReferenceValue> {
    let example = example?;
    if orbitsieve_core::modular::is_prime(q) {
        omega_reference_with_band(example, q, cfg.density_band).ok()
    } else {
        reference_for_modulus(example, q)
    }
}

fn densities(cfg: &RunConfig, out: &Path, execution: Execution) -> Result<Value, CliError> {
    let example = cfg.example();
    let mut csv = Csv::new(&[
        "q",
        "mode",
        "orbit_size",
        "vanishing_count",
        "omega_num",
        "omega_den",
        "reference_value",
        "match_flag",
    ]);
    let mut agree = true;
    let mut mismatches = 0;
    for (i, &q) in cfg.moduli.iter().enumerate() {
        let field = format!("moduli[{i}]");
        let values: Vec<LocalDensityValue> = if q == 1 {
            vec![LocalDensityValue::trivial(cfg.function, cfg.spec.fingerprint()); 2]
                .into_iter()
                .zip([DensityMode::Point, DensityMode::Line])
                .map(|(mut v, mode)| {
                    v.mode = mode;
                    v
                })
                .collect()
        } else {
            let morbit = orbit_mod_q_with(&cfg.spec, q, &limits(cfg, execution)).map_err(|e| bad_modulus(field.clone(), e))?;
            [DensityMode::Point, DensityMode::Line]
                .into_iter()
                .map(|mode| local_density(&morbit, cfg.function, mode).map_err(|e| bad_modulus(field.clone(), e)))
                .collect::<Result<_, _>>()?
        };
        agree &= values[0].omega == values[1].omega;
        let reference = if q == 1 { None } else { reference(cfg, example, q) };
        for v in &values {
            let (value, flag) = match &reference {
                Some(r) => {
                    let ok = r.matches(&v.omega);
                    mismatches += !ok as usize;
                    (r.to_string(), if ok { "match" } else { "mismatch" })
                }
                None => (String::new(), "n/a"),
            };
            csv.row([
                q.to_string(),
                v.mode.name().to_string(),
                v.orbit_size().to_string(),
                v.vanishing_count().to_string(),
                v.omega.numer().to_string(),
                v.omega.denom().to_string(),
                value,
                flag.to_string(),
            ]);
        }
    }
    let file = csv.write(out, "densities.csv")?;
    Ok(json!({
        "files": [file],
        "example": example.map(|e| e.to_string()),
        "point_line_agree": agree,
        "reference_mismatches": mismatches,
    }))
}

fn sieve_functions(cfg: &RunConfig, out: &Path) -> Result<Value, CliError> {
    let s = &cfg.sieve;
    let beta = s.beta_kappa.ok_or_else(|| {
        invalid("sieve.kappa", format!("no tabulated β_κ for κ = {} (available: 1, 3, 4, 5)", s.kappa))
    })?;
    let alpha = s.alpha_kappa.ok_or_else(|| {
        invalid(
            "sieve.alpha_kappa",
            format!("α_κ is required to solve F, f for κ = {}; only the closed-form bound is available", s.kappa),
        )
    })?;
    let sigma = solve_sigma(s.kappa, s.u_max, s.h)?;
    let table = solve_f_f(s.kappa, alpha, beta, sigma)?;
    let mut csv = Csv::new(&["u", "sigma", "F", "f"]);
    for (i, u) in table.grid().enumerate().skip(1) {
        csv.row([
            real(u),
            real(table.sigma().values()[i]),
            real(table.big_f_values()[i]),
            real(table.small_f_values()[i]),
        ]);
    }
    let file = csv.write(out, "sieve_functions.csv")?;
    Ok(json!({ "files": [file], "rows": table.len() - 1, "u_max": table.u_max() }))
}

fn r_values(cfg: &RunConfig, out: &Path) -> Result<Value, CliError> {
    let s = &cfg.sieve;
    let step = s.integral.then_some(s.h);
    let mut rows: Vec<_> = saturation_table_with(&TableConfig {
        delta: s.delta,
        integral_step: step,
    })?
    .into_iter()
    .filter(|r| s.examples.contains(&r.example))
    .collect();
    if let Some(c) = s.custom {
        let linear = match step {
            Some(h) if c.kappa == 1.0 => Some(solve_f_f(1.0, 2.0, 2.0, solve_sigma(1.0, 26.0, h)?)?),
            _ => None,
        };
        for &mode in c.modes {
            rows.push(saturation_row("custom", s.delta, c.theta, c.degree, c.kappa, mode, linear.as_ref())?);
        }
    }
    let mut csv = Csv::new(&[
        "example",
        "mode",
        "theta",
        "alpha",
        "kappa",
        "zeta_star",
        "m_star",
        "R",
        "provenance",
        "degree",
        "delta_star",
        "R_integral",
        "R_literature",
    ]);
    let opt = |r: Option<u32>| r.map(|r| r.to_string()).unwrap_or_default();
    for r in &rows {
        csv.row([
            r.example.to_string(),
            r.mode.name().to_string(),
            real(r.theta),
            real(r.alpha),
            real(r.kappa),
            real(r.zeta_star),
            real(r.m_star),
            r.r.to_string(),
            r.provenance.name().to_string(),
            r.degree.to_string(),
            real(r.delta_star),
            opt(r.r_integral),
            opt(r.r_literature),
        ]);
    }
    let file = csv.write(out, "r_values.csv")?;
    Ok(json!({ "files": [file], "rows": rows.len() }))
}

fn sequence(cfg: &RunConfig, execution: Execution) -> Result<orbitsieve_core::experiments::SequenceA, CliError> {
    check_radius(cfg, "T", cfg.radius)?;
    build_sequence(&cfg.spec, cfg.function, cfg.radius, &limits(cfg, execution)).map_err(|e| match e {
        ExperimentError::RadiusTooSmall { .. } => invalid("T", e.to_string()),
        other => other.into(),
    })
}

fn distribution(cfg: &RunConfig, out: &Path, execution: Execution) -> Result<Value, CliError> {
    let seq = sequence(cfg, execution)?;
    let mut densities = Vec::new();
    for &q in cfg.moduli.iter().filter(|&&q| q > 1) {
        // bad moduli are flagged by the report rather than rejected
        let morbit = match orbit_mod_q_with(&cfg.spec, q, &limits(cfg, execution)) {
            Ok(m) => m,
            Err(ModularError::BadModulus { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        match local_density(&morbit, cfg.function, DensityMode::Line) {
            Ok(d) => densities.push(d),
            Err(ModularError::BadModulus { .. }) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    let report = distribution_report(&cfg.spec, &seq, &cfg.moduli, &densities)?;
    let mut csv = Csv::new(&["q", "mass_q", "predicted", "abs_error", "rel_error", "flag"]);
    for r in &report.rows {
        csv.row([
            r.q.to_string(),
            r.mass_q.to_string(),
            opt_real(r.predicted),
            opt_real(r.abs_error),
            opt_real(r.rel_error),
            r.flag.name().to_string(),
        ]);
    }
    let file = csv.write(out, "distribution.csv")?;
    let worst = report.rows.iter().filter_map(|r| r.rel_error).fold(0.0, f64::max);
    Ok(json!({ "files": [file], "mass": report.mass, "zeros": seq.zeros, "max_rel_error": worst }))
}

fn almost_primes(cfg: &RunConfig, out: &Path, execution: Execution) -> Result<Value, CliError> {
    let seq = sequence(cfg, execution)?;
    let rows = almost_prime_table(&seq, &cfg.r_list, cfg.counting, execution)?;
    let mut csv = Csv::new(&["R", "count", "density_ratio"]);
    for r in &rows {
        csv.row([
            r.r.map(|r| r.to_string()).unwrap_or_else(|| "inf".into()),
            r.count.to_string(),
            real(r.density_ratio),
        ]);
    }
    let file = csv.write(out, "almost_primes.csv")?;
    Ok(json!({ "files": [file], "mass": seq.mass, "zeros": seq.zeros, "n_max": seq.n_max() }))
}
