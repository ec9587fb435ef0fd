//! The weighted sequence `a_n(T)`, its distribution along multiples of `q`,
//! and almost-prime counts.
//!
//! Each orbit point of norm `< T` contributes weight 1 to `n = |f(x)|`, so
//! points are counted, not group elements. Points with `f(x) = 0` are tallied
//! apart and left out of the sequence.

use std::collections::BTreeMap;

use num_prime::nt_funcs::factorize64;
use thiserror::Error;

use crate::coordinate::{CoordinateError, CoordinateFunction};
use crate::exec::Execution;
use crate::form::norm_squared;
use crate::modular::{bad_primes, squarefree_primes, LocalDensityValue};
use crate::orbit::{orbit_ball, EnumerationLimits, OrbitError, OrbitSpec};

pub use crate::coordinate::coordinate_value;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("0 has no prime factorisation")]
    Zero,
    #[error("radius {radius} does not exceed the base norm {base_norm}")]
    RadiusTooSmall { radius: f64, base_norm: f64 },
    #[error("|f(x)| = {0} does not fit in 64 bits")]
    Overflow(i128),
    #[error("modulus {0} is zero or not squarefree")]
    InvalidModulus(u64),
    #[error("no local density supplied for q = {0}")]
    MissingDensity(u64),
    #[error("density does not belong to this sequence: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Coordinate(#[from] CoordinateError),
}

impl ExperimentError {
    pub fn is_resource_exhaustion(&self) -> bool {
        matches!(self, ExperimentError::Orbit(e) if e.is_resource_exhaustion())
    }
}

/// Whether `P_R` membership counts prime factors with multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Counting {
    #[default]
    Multiplicity,
    Distinct,
}

impl Counting {
    pub fn name(self) -> &'static str {
        match self {
            Counting::Multiplicity => "multiplicity",
            Counting::Distinct => "distinct",
        }
    }
}

/// `Ω(n)`, or `ω(n)` under [`Counting::Distinct`].
pub fn prime_divisor_count(n: u64, counting: Counting) -> Result<u32, ExperimentError> {
    if n == 0 {
        return Err(ExperimentError::Zero);
    }
    let factors = factorize64(n);
    Ok(match counting {
        Counting::Multiplicity => factors.values().map(|&e| e as u32).sum(),
        Counting::Distinct => factors.len() as u32,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceA {
    pub radius: f64,
    pub function: CoordinateFunction,
    pub orbit_id: u64,
    /// `n ↦ a_n(T)`.
    pub support: BTreeMap<u64, u64>,
    /// `Σ a_n`.
    pub mass: u64,
    /// Ball points with `f(x) = 0`, not part of the sequence.
    pub zeros: u64,
}

impl SequenceA {
    /// Largest supported `n`, 0 for an empty sequence.
    pub fn n_max(&self) -> u64 {
        self.support.keys().next_back().copied().unwrap_or(0)
    }

    /// `|A_q| = Σ_{q | n} a_n`.
    pub fn mass_along(&self, q: u64) -> u64 {
        self.support.iter().filter(|(n, _)| *n % q == 0).map(|(_, a)| a).sum()
    }
}

pub fn build_sequence(
    spec: &OrbitSpec,
    f: CoordinateFunction,
    radius: f64,
    limits: &EnumerationLimits,
) -> Result<SequenceA, ExperimentError> {
    let base_norm = (norm_squared(&spec.base()) as f64).sqrt();
    if !(radius > base_norm) {
        return Err(ExperimentError::RadiusTooSmall { radius, base_norm });
    }
    let ball = orbit_ball(spec, radius, limits)?;
    let mut support = BTreeMap::new();
    let mut zeros = 0;
    for x in &ball.points {
        let v = f.value(x)?;
        if v == 0 {
            zeros += 1;
            continue;
        }
        let n = u64::try_from(v.unsigned_abs()).map_err(|_| ExperimentError::Overflow(v))?;
        *support.entry(n).or_insert(0) += 1;
    }
    Ok(SequenceA {
        radius,
        function: f,
        orbit_id: spec.fingerprint(),
        mass: support.values().sum(),
        support,
        zeros,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowFlag {
    Ok,
    Trivial,
    BadModulus,
}

impl RowFlag {
    pub fn name(self) -> &'static str {
        match self {
            RowFlag::Ok => "ok",
            RowFlag::Trivial => "trivial",
            RowFlag::BadModulus => "bad_modulus",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionRow {
    pub q: u64,
    pub mass_q: u64,
    /// `ω(q)·|A|`; absent for bad moduli.
    pub predicted: Option<f64>,
    pub abs_error: Option<f64>,
    pub rel_error: Option<f64>,
    pub flag: RowFlag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionReport {
    pub mass: u64,
    pub rows: Vec<DistributionRow>,
}

/// Compare `|A_q|` with `ω(q)|A|` for each `q`.
///
/// A modulus sharing a prime with the normalisation constant of `f` or with
/// the bad primes of the orbit is reported without a prediction. Every other
/// `q > 1` needs a density computed for the same orbit and function.
pub fn distribution_report(
    spec: &OrbitSpec,
    seq: &SequenceA,
    moduli: &[u64],
    densities: &[LocalDensityValue],
) -> Result<DistributionReport, ExperimentError> {
    if spec.fingerprint() != seq.orbit_id {
        return Err(ExperimentError::Mismatch("sequence was built on a different orbit".into()));
    }
    for d in densities {
        if d.function != seq.function {
            return Err(ExperimentError::Mismatch(format!(
                "density for q = {} is for {}, sequence uses {}",
                d.modulus, d.function, seq.function
            )));
        }
        if d.orbit_id != seq.orbit_id {
            return Err(ExperimentError::Mismatch(format!(
                "density for q = {} was computed on a different orbit",
                d.modulus
            )));
        }
    }
    let mut excluded = bad_primes(spec);
    let divisor = seq.function.divisor() as u64;
    excluded.extend(squarefree_primes(divisor).unwrap_or_else(|| vec![2, 3, 5]));
    let mut qs = moduli.to_vec();
    qs.sort_unstable();
    qs.dedup();
    let mass = seq.mass as f64;
    let mut rows = Vec::with_capacity(qs.len());
    for q in qs {
        let primes = squarefree_primes(q).ok_or(ExperimentError::InvalidModulus(q))?;
        let mass_q = seq.mass_along(q);
        let (omega, flag) = if q == 1 {
            (Some(1.0), RowFlag::Trivial)
        } else if primes.iter().any(|p| excluded.contains(p)) {
            (None, RowFlag::BadModulus)
        } else {
            let d = densities
                .iter()
                .find(|d| d.modulus == q)
                .ok_or(ExperimentError::MissingDensity(q))?;
            (Some(d.omega_f64()), RowFlag::Ok)
        };
        let predicted = omega.map(|w| w * mass);
        let abs_error = predicted.map(|p| (mass_q as f64 - p).abs());
        let rel_error = match (abs_error, predicted) {
            (Some(e), Some(p)) if p > 0.0 => Some(e / p),
            (Some(e), Some(_)) => Some(if e == 0.0 { 0.0 } else { f64::INFINITY }),
            _ => None,
        };
        rows.push(DistributionRow {
            q,
            mass_q,
            predicted,
            abs_error,
            rel_error,
            flag,
        });
    }
    Ok(DistributionReport { mass: seq.mass, rows })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlmostPrimeRow {
    /// `None` is `R = ∞`.
    pub r: Option<u32>,
    pub count: u64,
    pub density_ratio: f64,
}

fn ratio(seq: &SequenceA, count: u64) -> f64 {
    if seq.mass == 0 {
        return 0.0;
    }
    count as f64 * seq.radius.ln().powi(seq.function.kappa() as i32) / seq.mass as f64
}

/// `(Σ_{n ∈ P_R} a_n, count·(log T)^κ / |A|)`; `r = None` counts everything.
pub fn almost_prime_count(
    seq: &SequenceA,
    r: Option<u32>,
    counting: Counting,
) -> Result<(u64, f64), ExperimentError> {
    let row = almost_prime_table(seq, &[r], counting, Execution::Sequential)?;
    Ok((row[0].count, row[0].density_ratio))
}

/// Almost-prime counts for several `R`, factoring each support value once.
pub fn almost_prime_table(
    seq: &SequenceA,
    rs: &[Option<u32>],
    counting: Counting,
    exec: Execution,
) -> Result<Vec<AlmostPrimeRow>, ExperimentError> {
    let entries: Vec<(u64, u64)> = seq.support.iter().map(|(n, a)| (*n, *a)).collect();
    let omegas = exec.try_map(&entries, |(n, a)| prime_divisor_count(*n, counting).map(|k| (k, *a)))?;
    let mut by_count: BTreeMap<u32, u64> = BTreeMap::new();
    for (k, a) in omegas {
        *by_count.entry(k).or_insert(0) += a;
    }
    Ok(rs
        .iter()
        .map(|r| {
            let count = match r {
                Some(r) => by_count.range(..=*r).map(|(_, a)| a).sum(),
                None => seq.mass,
            };
            AlmostPrimeRow {
                r: *r,
                count,
                density_ratio: ratio(seq, count),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::{local_density, orbit_mod_q, DensityMode};
    use crate::presets;

    fn trial_omega(mut n: u64) -> (u32, u32) {
        let (mut total, mut distinct) = (0, 0);
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                distinct += 1;
                while n.is_multiple_of(d) {
                    n /= d;
                    total += 1;
                }
            }
            d += 1;
        }
        if n > 1 {
            total += 1;
            distinct += 1;
        }
        (total, distinct)
    }

    #[test]
    fn small_factorisations() {
        assert_eq!(prime_divisor_count(1, Counting::Multiplicity).unwrap(), 0);
        assert_eq!(prime_divisor_count(60, Counting::Multiplicity).unwrap(), 4);
        assert_eq!(prime_divisor_count(780, Counting::Multiplicity).unwrap(), 5);
        assert_eq!(prime_divisor_count(780, Counting::Distinct).unwrap(), 4);
        assert_eq!(prime_divisor_count(0, Counting::Distinct), Err(ExperimentError::Zero));
        for n in 1..5000 {
            let (t, d) = trial_omega(n);
            assert_eq!(prime_divisor_count(n, Counting::Multiplicity).unwrap(), t);
            assert_eq!(prime_divisor_count(n, Counting::Distinct).unwrap(), d);
        }
    }

    #[test]
    fn large_cofactors() {
        // 1_000_003 and 999_999_937 are prime
        assert_eq!(prime_divisor_count(1_000_003 * 999_999_937, Counting::Multiplicity).unwrap(), 2);
        assert_eq!(prime_divisor_count(1 << 63, Counting::Multiplicity).unwrap(), 63);
    }

    #[test]
    fn small_sequence() {
        let spec = presets::pythagorean_full();
        let seq = build_sequence(&spec, CoordinateFunction::CoordProduct, 30.0, &EnumerationLimits::default()).unwrap();
        assert_eq!(seq.support, BTreeMap::from([(1, 1), (13, 1), (34, 1)]));
        assert_eq!(seq.mass, 3);
        assert_eq!(seq.n_max(), 34);
        assert_eq!(almost_prime_count(&seq, Some(0), Counting::Multiplicity).unwrap().0, 1);
        assert!(almost_prime_count(&seq, Some(1), Counting::Multiplicity).unwrap().0 >= 2);
        assert_eq!(almost_prime_count(&seq, None, Counting::Multiplicity).unwrap().0, 3);
        assert!(matches!(
            build_sequence(&spec, CoordinateFunction::Hypotenuse, 4.0, &EnumerationLimits::default()),
            Err(ExperimentError::RadiusTooSmall { .. })
        ));
    }

    #[test]
    fn report_rows() {
        let spec = presets::pythagorean_full();
        let f = CoordinateFunction::CoordProduct;
        let seq = build_sequence(&spec, f, 2000.0, &EnumerationLimits::default()).unwrap();
        let d13 = local_density(&orbit_mod_q(&spec, 13).unwrap(), f, DensityMode::Line).unwrap();
        let report = distribution_report(&spec, &seq, &[13, 1, 5], std::slice::from_ref(&d13)).unwrap();
        let qs: Vec<_> = report.rows.iter().map(|r| r.q).collect();
        assert_eq!(qs, vec![1, 5, 13]);
        assert_eq!(report.rows[0].mass_q, seq.mass);
        assert_eq!(report.rows[0].abs_error, Some(0.0));
        assert_eq!(report.rows[1].flag, RowFlag::BadModulus);
        assert!(report.rows[1].predicted.is_none());
        assert_eq!(report.rows[2].flag, RowFlag::Ok);
        assert!(matches!(
            distribution_report(&spec, &seq, &[7], std::slice::from_ref(&d13)),
            Err(ExperimentError::MissingDensity(7))
        ));
        let other = local_density(&orbit_mod_q(&spec, 13).unwrap(), CoordinateFunction::Hypotenuse, DensityMode::Line).unwrap();
        assert!(matches!(
            distribution_report(&spec, &seq, &[13], &[other]),
            Err(ExperimentError::Mismatch(_))
        ));
    }

    #[test]
    fn table_is_monotone() {
        let spec = presets::pythagorean_full();
        let seq = build_sequence(&spec, CoordinateFunction::Area, 3000.0, &EnumerationLimits::default()).unwrap();
        let rs: Vec<_> = (0..12).map(Some).chain([None]).collect();
        let seqt = almost_prime_table(&seq, &rs, Counting::Multiplicity, Execution::Sequential).unwrap();
        let part = almost_prime_table(&seq, &rs, Counting::Multiplicity, Execution::Parallel).unwrap();
        assert_eq!(seqt, part);
        assert!(seqt.windows(2).all(|w| w[0].count <= w[1].count));
        assert_eq!(seqt.last().unwrap().count, seq.mass);
    }
}
