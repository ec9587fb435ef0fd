//! Orbits modulo squarefree `q` and exact local densities.
//!
//! For a squarefree modulus `q` the orbit of `y mod q` under the configured
//! generators (with inverses) is closed explicitly. Its projectivisation is the
//! orbit of the line `⟨y⟩ mod q`. The local density
//!
//! ```text
//! ω(q) = #{orbit points with f ≡ 0} / #points = #{orbit lines with f ≡ 0} / #lines
//! ```
//!
//! is computed from either side; homogeneity of `f` makes the vanishing
//! condition well defined on lines, and the group acts transitively on its own
//! orbit so every line carries the same number of points.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use thiserror::Error;

use crate::coordinate::CoordinateFunction;
use crate::exec::closure;
use crate::orbit::{EnumerationLimits, OrbitSpec};
use crate::presets::Example;

/// Moduli are kept below 2²¹ so residue arithmetic stays in `u64`.
pub const MAX_MODULUS: u64 = 1 << 21;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModularError {
    #[error("modulus {0} is not a squarefree integer in [2, 2^21)")]
    InvalidModulus(u64),
    #[error("modulus {modulus} is bad for this orbit: shares the prime {prime} with {reason}")]
    BadModulus {
        modulus: u64,
        prime: u64,
        reason: &'static str,
    },
    #[error("orbit mod {modulus} has non-constant fibres over its lines ({min}..{max} points per line)")]
    NonConstantFiber { modulus: u64, min: usize, max: usize },
    #[error("closure mod {modulus} exceeded the cap of {cap} residue vectors")]
    CapExceeded { modulus: u64, cap: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {p} is outside the range where the closed form for Example {example} applies")]
    OutOfRange { example: Example, p: u64 },
}

impl ModularError {
    pub fn is_resource_exhaustion(&self) -> bool {
        matches!(self, ModularError::CapExceeded { .. })
    }
}

/// Prime factors of `q` if it is squarefree, else `None`.
pub fn squarefree_primes(q: u64) -> Option<Vec<u64>> {
    if q == 0 {
        return None;
    }
    let mut primes = Vec::new();
    let mut n = q;
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return None;
            }
            primes.push(d);
        }
        d += 1;
    }
    if n > 1 {
        primes.push(n);
    }
    Some(primes)
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && squarefree_primes(n).is_some_and(|ps| ps == [n])
}

/// A vector of residues modulo `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueVector {
    pub modulus: u64,
    pub entries: [u64; 3],
}

impl ResidueVector {
    pub fn new(modulus: u64, x: [i64; 3]) -> Self {
        let m = modulus as i64;
        Self {
            modulus,
            entries: x.map(|e| e.rem_euclid(m) as u64),
        }
    }
}

/// The line through a residue vector, stored by its canonical representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectiveLine {
    pub modulus: u64,
    pub representative: [u64; 3],
}

impl ProjectiveLine {
    /// `None` when the vector vanishes modulo one of the primes of `q`.
    pub fn through(v: &ResidueVector, primes: &[u64]) -> Option<Self> {
        canonical_line(&v.entries, v.modulus, primes).map(|representative| Self {
            modulus: v.modulus,
            representative,
        })
    }
}

fn inverse_mod(a: u64, p: u64) -> u64 {
    let e = (a as i64).extended_gcd(&(p as i64));
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(p as i64) as u64
}

/// Per prime `p | q`, scale so the first entry that is nonzero mod `p` becomes
/// 1, then glue the per-prime representatives by the Chinese remainder map.
pub fn canonical_line(x: &[u64; 3], q: u64, primes: &[u64]) -> Option<[u64; 3]> {
    let mut out = [0u64; 3];
    for &p in primes {
        let r = x.map(|e| e % p);
        let lead = r.iter().copied().find(|e| *e != 0)?;
        let inv = inverse_mod(lead, p);
        let m = q / p;
        // idempotent e ≡ 1 (mod p), e ≡ 0 (mod q/p)
        let e = (m as u128 * inverse_mod(m % p, p) as u128 % q as u128) as u64;
        for (o, ri) in out.iter_mut().zip(r) {
            let c = ri * inv % p;
            *o = ((*o as u128 + c as u128 * e as u128) % q as u128) as u64;
        }
    }
    Some(out)
}

/// Primes dividing `2·Δ(F)·t` (with `t` dropped when the orbit lies on the
/// cone `t = 0`).
pub fn bad_primes(spec: &OrbitSpec) -> Vec<u64> {
    let t = spec.level();
    let mut n = 2u128 * spec.form().discriminant().unsigned_abs() as u128;
    if t != 0 {
        n *= t.unsigned_abs();
    }
    let mut primes = Vec::new();
    let mut d = 2u128;
    while d * d <= n {
        if n.is_multiple_of(d) {
            primes.push(d as u64);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        primes.push(n as u64);
    }
    primes
}

/// Point and line orbit of the base vector modulo `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularOrbit {
    modulus: u64,
    primes: Vec<u64>,
    orbit_id: u64,
    points: Vec<[u64; 3]>,
    lines: Vec<[u64; 3]>,
    fiber_size: usize,
}

impl ModularOrbit {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn orbit_id(&self) -> u64 {
        self.orbit_id
    }

    /// Sorted residue triples of the point orbit.
    pub fn points(&self) -> &[[u64; 3]] {
        &self.points
    }

    /// Sorted canonical representatives of the line orbit.
    pub fn lines(&self) -> &[[u64; 3]] {
        &self.lines
    }

    pub fn point_orbit_size(&self) -> usize {
        self.points.len()
    }

    pub fn line_orbit_size(&self) -> usize {
        self.lines.len()
    }

    pub fn fiber_size(&self) -> usize {
        self.fiber_size
    }

    pub fn contains_point(&self, v: &ResidueVector) -> bool {
        v.modulus == self.modulus && self.points.binary_search(&v.entries).is_ok()
    }
}

pub fn orbit_mod_q(spec: &OrbitSpec, q: u64) -> Result<ModularOrbit, ModularError> {
    orbit_mod_q_with(spec, q, &EnumerationLimits::default())
}

pub fn orbit_mod_q_with(
    spec: &OrbitSpec,
    q: u64,
    limits: &EnumerationLimits,
) -> Result<ModularOrbit, ModularError> {
    if !(2..MAX_MODULUS).contains(&q) {
        return Err(ModularError::InvalidModulus(q));
    }
    let primes = squarefree_primes(q).ok_or(ModularError::InvalidModulus(q))?;
    let bad = bad_primes(spec);
    if let Some(&prime) = primes.iter().find(|p| bad.contains(p)) {
        return Err(ModularError::BadModulus {
            modulus: q,
            prime,
            reason: "2·Δ(F)·t",
        });
    }
    let moves = spec.group_moves();
    for g in &moves {
        if let Some(&prime) = primes.iter().find(|&&p| g.determinant() % p as i64 == 0) {
            return Err(ModularError::BadModulus {
                modulus: q,
                prime,
                reason: "a generator determinant",
            });
        }
    }
    let reduced: Vec<[[u64; 3]; 3]> = moves
        .iter()
        .map(|g| g.matrix().map(|row| row.map(|e| e.rem_euclid(q as i64) as u64)))
        .collect();
    let base = ResidueVector::new(q, spec.base()).entries;
    let visited = closure(
        [base],
        |x: &[u64; 3]| {
            reduced
                .iter()
                .map(|m| m.map(|row| (row[0] * x[0] + row[1] * x[1] + row[2] * x[2]) % q))
                .collect::<Vec<_>>()
        },
        limits.visited_cap,
        limits.execution,
    )
    .map_err(|e| ModularError::CapExceeded {
        modulus: q,
        cap: e.cap,
    })?;
    let mut points: Vec<[u64; 3]> = visited.into_iter().collect();
    points.sort_unstable();

    let mut fibres: BTreeMap<[u64; 3], usize> = BTreeMap::new();
    for x in &points {
        // base is primitive mod every p and the moves are invertible
        let line = canonical_line(x, q, &primes).expect("orbit vectors are nonzero mod each p");
        *fibres.entry(line).or_default() += 1;
    }
    let min = fibres.values().copied().min().unwrap_or(0);
    let max = fibres.values().copied().max().unwrap_or(0);
    if min != max {
        return Err(ModularError::NonConstantFiber { modulus: q, min, max });
    }
    Ok(ModularOrbit {
        modulus: q,
        primes,
        orbit_id: spec.fingerprint(),
        points,
        lines: fibres.into_keys().collect(),
        fiber_size: max,
    })
}

fn check_normalisation(morbit: &ModularOrbit, f: CoordinateFunction) -> Result<(), ModularError> {
    let d = f.divisor() as u64;
    match morbit.primes.iter().find(|&&p| d.is_multiple_of(p)) {
        Some(&prime) => Err(ModularError::BadModulus {
            modulus: morbit.modulus,
            prime,
            reason: "the normalisation constant of f",
        }),
        None => Ok(()),
    }
}

/// `(#points with f ≡ 0, #lines with f ≡ 0)` modulo `q`, on the raw polynomial.
pub fn vanishing_counts(
    morbit: &ModularOrbit,
    f: CoordinateFunction,
) -> Result<(u64, u64), ModularError> {
    check_normalisation(morbit, f)?;
    let q = morbit.modulus;
    let count = |xs: &[[u64; 3]]| xs.iter().filter(|x| f.raw_mod(x, q) == 0).count() as u64;
    Ok((count(&morbit.points), count(&morbit.lines)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DensityMode {
    Point,
    Line,
}

impl DensityMode {
    pub fn name(self) -> &'static str {
        match self {
            DensityMode::Point => "point",
            DensityMode::Line => "line",
        }
    }
}

/// `ω(q)` as an exact rational, with both numerators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDensityValue {
    pub modulus: u64,
    pub function: CoordinateFunction,
    pub orbit_id: u64,
    pub mode: DensityMode,
    pub omega: Ratio<u64>,
    pub numerator_points: u64,
    pub numerator_lines: u64,
    pub point_orbit_size: u64,
    pub line_orbit_size: u64,
}

impl LocalDensityValue {
    /// `ω(1) = 1`.
    pub fn trivial(function: CoordinateFunction, orbit_id: u64) -> Self {
        Self {
            modulus: 1,
            function,
            orbit_id,
            mode: DensityMode::Point,
            omega: Ratio::from_integer(1),
            numerator_points: 1,
            numerator_lines: 1,
            point_orbit_size: 1,
            line_orbit_size: 1,
        }
    }

    pub fn omega_f64(&self) -> f64 {
        *self.omega.numer() as f64 / *self.omega.denom() as f64
    }

    pub fn orbit_size(&self) -> u64 {
        match self.mode {
            DensityMode::Point => self.point_orbit_size,
            DensityMode::Line => self.line_orbit_size,
        }
    }

    pub fn vanishing_count(&self) -> u64 {
        match self.mode {
            DensityMode::Point => self.numerator_points,
            DensityMode::Line => self.numerator_lines,
        }
    }
}

pub fn local_density(
    morbit: &ModularOrbit,
    f: CoordinateFunction,
    mode: DensityMode,
) -> Result<LocalDensityValue, ModularError> {
    let (np, nl) = vanishing_counts(morbit, f)?;
    let (ps, ls) = (morbit.points.len() as u64, morbit.lines.len() as u64);
    let omega = match mode {
        DensityMode::Point => Ratio::new(np, ps),
        DensityMode::Line => Ratio::new(nl, ls),
    };
    Ok(LocalDensityValue {
        modulus: morbit.modulus,
        function: f,
        orbit_id: morbit.orbit_id,
        mode,
        omega,
        numerator_points: np,
        numerator_lines: nl,
        point_orbit_size: ps,
        line_orbit_size: ls,
    })
}

/// Closed-form `ω(p)` for large primes, or the band around `3/p` for Example D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceValue {
    Exact(Ratio<u64>),
    Band { center: f64, radius: f64 },
}

impl ReferenceValue {
    pub fn matches(&self, omega: &Ratio<u64>) -> bool {
        match self {
            ReferenceValue::Exact(r) => r == omega,
            ReferenceValue::Band { center, radius } => {
                let w = *omega.numer() as f64 / *omega.denom() as f64;
                (w - center).abs() <= *radius
            }
        }
    }
}

impl fmt::Display for ReferenceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReferenceValue::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            ReferenceValue::Band { center, radius } => write!(f, "{center:.10}+-{radius:.10}"),
        }
    }
}

/// Default constant `C` in the Example D band `|ω(p) − 3/p| ≤ C/p²`.
pub const EXAMPLE_D_BAND: f64 = 10.0;

/// Smallest prime for which the closed forms are applied.
pub const REFERENCE_THRESHOLD: u64 = 7;

pub fn omega_reference(example: Example, p: u64) -> Result<ReferenceValue, ModularError> {
    omega_reference_with_band(example, p, EXAMPLE_D_BAND)
}

pub fn omega_reference_with_band(
    example: Example,
    p: u64,
    band: f64,
) -> Result<ReferenceValue, ModularError> {
    if !is_prime(p) {
        return Err(ModularError::NotPrime(p));
    }
    let mut excluded = 60 * example.discriminant().unsigned_abs();
    if example.level() != 0 {
        excluded *= example.level().unsigned_abs();
    }
    if p < REFERENCE_THRESHOLD || excluded.is_multiple_of(p) {
        return Err(ModularError::OutOfRange { example, p });
    }
    let split = p % 4 == 1;
    let exact = |n: u64| ReferenceValue::Exact(Ratio::new(n, p + 1));
    Ok(match example {
        Example::A => exact(if split { 2 } else { 0 }),
        Example::B => exact(4),
        Example::C => exact(if split { 6 } else { 4 }),
        Example::D => {
            let pf = p as f64;
            ReferenceValue::Band {
                center: 3.0 / pf,
                radius: band / (pf * pf),
            }
        }
    })
}

/// Multiplicative extension of the exact closed forms to squarefree `q`.
pub fn reference_for_modulus(example: Example, q: u64) -> Option<ReferenceValue> {
    let primes = squarefree_primes(q)?;
    if primes.len() == 1 {
        return omega_reference(example, q).ok();
    }
    let mut acc = Ratio::from_integer(1u64);
    for p in primes {
        match omega_reference(example, p).ok()? {
            ReferenceValue::Exact(r) => acc *= r,
            ReferenceValue::Band { .. } => return None,
        }
    }
    Some(ReferenceValue::Exact(acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use proptest::prelude::*;

    // Independent oracle: every nonzero cone vector mod p, projectivised by
    // brute-force scaling.
    fn cone_lines_brute(p: u64) -> Vec<[u64; 3]> {
        let mut lines = std::collections::BTreeSet::new();
        for x in 0..p {
            for y in 0..p {
                for z in 0..p {
                    if [x, y, z] == [0, 0, 0] || !(x * x + y * y + p * p - z * z).is_multiple_of(p) {
                        continue;
                    }
                    let rep = (1..p)
                        .map(|a| [a * x % p, a * y % p, a * z % p])
                        .min()
                        .unwrap();
                    lines.insert(rep);
                }
            }
        }
        lines.into_iter().collect()
    }

    #[test]
    fn squarefree_detection() {
        assert_eq!(squarefree_primes(77), Some(vec![7, 11]));
        assert_eq!(squarefree_primes(12), None);
        assert_eq!(squarefree_primes(1), Some(vec![]));
        assert!(is_prime(13) && !is_prime(91) && !is_prime(1));
    }

    #[test]
    fn rejects_invalid_and_bad_moduli() {
        let spec = presets::pythagorean_full();
        assert_eq!(orbit_mod_q(&spec, 12), Err(ModularError::InvalidModulus(12)));
        assert_eq!(orbit_mod_q(&spec, 1), Err(ModularError::InvalidModulus(1)));
        assert!(matches!(
            orbit_mod_q(&spec, 2),
            Err(ModularError::BadModulus { prime: 2, .. })
        ));
        assert!(matches!(
            orbit_mod_q(&presets::aniso_3(), 3),
            Err(ModularError::BadModulus { prime: 3, .. })
        ));
        let m = orbit_mod_q(&spec, 5).unwrap();
        assert!(matches!(
            vanishing_counts(&m, CoordinateFunction::CoordProduct),
            Err(ModularError::BadModulus { prime: 5, .. })
        ));
    }

    #[test]
    fn orbit_mod_5_sizes() {
        // Frozen from a brute-force closure over generator products mod 5: the
        // 24 nonzero cone vectors lie on 6 lines; the orbit of (3, 4, 5) meets
        // every line in 2 of its 4 points (−1 is a square mod 5, so −I adds
        // nothing).
        let m = orbit_mod_q(&presets::pythagorean_full(), 5).unwrap();
        assert_eq!(m.line_orbit_size(), 6);
        assert_eq!(m.point_orbit_size(), 12);
        assert_eq!(m.point_orbit_size(), m.fiber_size() * m.line_orbit_size());
        let min_rep = |l: &[u64; 3]| (1..5).map(|a| l.map(|e| a * e % 5)).min().unwrap();
        let mut reps: Vec<_> = m.lines().iter().map(min_rep).collect();
        reps.sort_unstable();
        assert_eq!(reps, cone_lines_brute(5));
    }

    #[test]
    fn line_orbit_is_the_projective_cone() {
        for p in [7, 11, 13] {
            let m = orbit_mod_q(&presets::pythagorean_full(), p).unwrap();
            let brute = cone_lines_brute(p);
            assert_eq!(m.line_orbit_size(), brute.len());
            assert_eq!(brute.len() as u64, p + 1);
        }
    }

    #[test]
    fn vanishing_line_counts() {
        let spec = presets::pythagorean_full();
        for p in [7, 11, 19] {
            let m = orbit_mod_q(&spec, p).unwrap();
            assert_eq!(vanishing_counts(&m, CoordinateFunction::Hypotenuse).unwrap().1, 0);
        }
        let m = orbit_mod_q(&spec, 13).unwrap();
        assert_eq!(vanishing_counts(&m, CoordinateFunction::Hypotenuse).unwrap().1, 2);
        assert_eq!(vanishing_counts(&m, CoordinateFunction::CoordProduct).unwrap().1, 6);
        // brute force on the projective cone mod 13
        let brute = cone_lines_brute(13);
        assert_eq!(brute.iter().filter(|l| l[2] == 0).count(), 2);
        assert_eq!(brute.iter().filter(|l| l[0] * l[1] * l[2] % 13 == 0).count(), 6);
    }

    #[test]
    fn densities_at_13() {
        let spec = presets::pythagorean_full();
        let m = orbit_mod_q(&spec, 13).unwrap();
        for mode in [DensityMode::Point, DensityMode::Line] {
            let a = local_density(&m, CoordinateFunction::Hypotenuse, mode).unwrap();
            assert_eq!(a.omega, Ratio::new(1, 7));
            let b = local_density(&m, CoordinateFunction::Area, mode).unwrap();
            assert_eq!(b.omega, Ratio::new(2, 7));
        }
    }

    // Brute force over all of F_13³: Q(x) = −1 has 182 solutions, 30 of them
    // with xyz ≡ 0. The searched generators act transitively, so ω(13) = 15/91.
    #[test]
    fn example_d_density_at_13() {
        let p = 13u64;
        let (mut total, mut vanish) = (0u64, 0u64);
        for x in 0..p {
            for y in 0..p {
                for z in 0..p {
                    if (x * x + y * y + 3 * p * p - 3 * z * z + 1).is_multiple_of(p) {
                        total += 1;
                        if x * y * z % p == 0 {
                            vanish += 1;
                        }
                    }
                }
            }
        }
        assert_eq!((total, vanish), (182, 30));
        let m = orbit_mod_q(&presets::aniso_3(), p).unwrap();
        assert_eq!(m.point_orbit_size() as u64, total);
        let d = local_density(&m, CoordinateFunction::RawProduct, DensityMode::Line).unwrap();
        assert_eq!(d.omega, Ratio::new(15, 91));
        // |15/91 − 3/13| = 6/91 exceeds the default 10/169 band but not 12/p².
        assert!(!omega_reference(Example::D, 13).unwrap().matches(&d.omega));
        assert!(omega_reference_with_band(Example::D, 13, 12.0).unwrap().matches(&d.omega));
    }

    #[test]
    fn reference_values() {
        let ex = |e, p| match omega_reference(e, p).unwrap() {
            ReferenceValue::Exact(r) => r,
            other => panic!("unexpected {other:?}"),
        };
        assert_eq!(ex(Example::A, 13), Ratio::new(1, 7));
        assert_eq!(ex(Example::A, 7), Ratio::new(0, 1));
        assert_eq!(ex(Example::C, 13), Ratio::new(6, 14));
        assert_eq!(ex(Example::C, 7), Ratio::new(4, 8));
        assert_eq!(ex(Example::B, 11), Ratio::new(1, 3));
        assert!(matches!(
            omega_reference(Example::A, 5),
            Err(ModularError::OutOfRange { .. })
        ));
        assert!(matches!(omega_reference(Example::B, 9), Err(ModularError::NotPrime(9))));
        match omega_reference(Example::D, 17).unwrap() {
            ReferenceValue::Band { center, radius } => {
                assert!((center - 3.0 / 17.0).abs() < 1e-15);
                assert!((radius - 10.0 / 289.0).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            reference_for_modulus(Example::B, 77),
            Some(ReferenceValue::Exact(Ratio::new(1, 6)))
        );
    }

    #[test]
    fn closure_contains_generator_images() {
        let spec = presets::pythagorean_thin2();
        let m = orbit_mod_q(&spec, 11).unwrap();
        for x in m.points() {
            let v = x.map(|e| e as i64);
            for g in spec.group_moves() {
                assert!(m.contains_point(&ResidueVector::new(11, g.apply(&v))));
            }
        }
    }

    proptest! {
        #[test]
        fn canonical_line_is_scale_invariant(
            x in prop::array::uniform3(0u64..1001),
            a in 1u64..1001,
            q in prop::sample::select(vec![7u64, 13, 77, 91, 143, 1001]),
        ) {
            let primes = squarefree_primes(q).unwrap();
            let x = x.map(|e| e % q);
            prop_assume!(a.gcd(&q) == 1);
            let y = x.map(|e| e * a % q);
            prop_assert_eq!(canonical_line(&x, q, &primes), canonical_line(&y, q, &primes));
        }
    }
}
