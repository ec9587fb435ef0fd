//! Orbits `O = y·Γ` and their Euclidean balls.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::exec::{closure, Execution};
use crate::form::{gcd3, norm_squared, FormError, Isometry, Mat3, TernaryForm, Vec3};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrbitError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("base vector {base:?} is not primitive (gcd {gcd})")]
    NotPrimitive { base: Vec3, gcd: i64 },
    #[error("base vector {base:?} has Q = {actual}, expected level {expected}")]
    WrongLevel {
        base: Vec3,
        expected: i128,
        actual: i128,
    },
    #[error("an orbit needs at least one generator")]
    NoGenerators,
    #[error("radius must be positive and finite, got {0}")]
    BadRadius(f64),
    #[error("pruning slack must be ≥ 1, got {0}")]
    BadSlack(f64),
    #[error("visited set exceeded the cap of {cap} vectors")]
    CapExceeded { cap: usize },
    #[error("delta estimation needs at least two samples with distinct T and positive counts, got {0}")]
    InsufficientData(usize),
}

impl OrbitError {
    pub fn is_resource_exhaustion(&self) -> bool {
        matches!(self, OrbitError::CapExceeded { .. })
    }
}

/// Whether the orbit is closed under generator inverses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClosureMode {
    Group,
    Monoid,
}

/// Base vector, form and generators of an orbit.
///
/// `negation` adjoins the central sign flip `−I` to the group. It changes
/// point orbits modulo `q` (by at most a factor 2) but never lines, and never
/// `|f|` for homogeneous `f`. Ball enumeration applies it only in group mode;
/// monoid enumerations list one sign representative per point.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitSpec {
    form: TernaryForm,
    base: Vec3,
    level: i128,
    generators: Vec<Isometry>,
    mode: ClosureMode,
    negation: bool,
    prune_slack: f64,
    canonicalize_signs: bool,
}

impl OrbitSpec {
    /// Validates primitivity of `base` and that every generator preserves
    /// `form`. The level `t = Q(base)` is derived.
    pub fn new(
        form: TernaryForm,
        base: Vec3,
        generators: &[Mat3],
        mode: ClosureMode,
    ) -> Result<Self, OrbitError> {
        let gcd = gcd3(&base);
        if gcd != 1 {
            return Err(OrbitError::NotPrimitive { base, gcd });
        }
        if generators.is_empty() {
            return Err(OrbitError::NoGenerators);
        }
        let generators = generators
            .iter()
            .map(|m| Isometry::new(&form, *m))
            .collect::<Result<Vec<_>, _>>()?;
        let level = form.evaluate(&base);
        Ok(Self {
            form,
            base,
            level,
            generators,
            mode,
            negation: false,
            prune_slack: 2.0,
            canonicalize_signs: false,
        })
    }

    /// Like [`OrbitSpec::new`], also checking `Q(base)` against an expected level.
    pub fn with_level(
        form: TernaryForm,
        base: Vec3,
        level: i128,
        generators: &[Mat3],
        mode: ClosureMode,
    ) -> Result<Self, OrbitError> {
        let spec = Self::new(form, base, generators, mode)?;
        if spec.level != level {
            return Err(OrbitError::WrongLevel {
                base,
                expected: level,
                actual: spec.level,
            });
        }
        Ok(spec)
    }

    pub fn negation(mut self, on: bool) -> Self {
        self.negation = on;
        self
    }

    /// Ball enumeration keeps vectors with `‖x‖ < slack·T` in the frontier.
    pub fn prune_slack(mut self, slack: f64) -> Result<Self, OrbitError> {
        if !(slack.is_finite() && slack >= 1.0) {
            return Err(OrbitError::BadSlack(slack));
        }
        self.prune_slack = slack;
        Ok(self)
    }

    /// Report ball points with absolute-valued entries.
    pub fn canonicalize_signs(mut self, on: bool) -> Self {
        self.canonicalize_signs = on;
        self
    }

    pub fn form(&self) -> &TernaryForm {
        &self.form
    }

    pub fn base(&self) -> Vec3 {
        self.base
    }

    /// `t = Q(y)`.
    pub fn level(&self) -> i128 {
        self.level
    }

    pub fn generators(&self) -> &[Isometry] {
        &self.generators
    }

    pub fn mode(&self) -> ClosureMode {
        self.mode
    }

    pub fn has_negation(&self) -> bool {
        self.negation
    }

    pub fn slack(&self) -> f64 {
        self.prune_slack
    }

    /// The maps applied when closing a set under the group: generators, their
    /// inverses (deduplicated) and `−I` when enabled.
    pub fn group_moves(&self) -> Vec<Isometry> {
        let mut moves: BTreeSet<Isometry> = BTreeSet::new();
        for g in &self.generators {
            moves.insert(*g);
            moves.insert(g.inverse());
        }
        if self.negation {
            moves.insert(Isometry::negation());
        }
        moves.remove(&Isometry::identity());
        moves.into_iter().collect()
    }

    fn ball_moves(&self) -> Vec<Isometry> {
        match self.mode {
            ClosureMode::Group => self.group_moves(),
            ClosureMode::Monoid => self.generators.clone(),
        }
    }

    /// A stable identifier of the orbit data (form, base, generators, flags),
    /// used to catch mixing results from different orbits.
    pub fn fingerprint(&self) -> u64 {
        // FNV-1a over the integer data; stable across runs and platforms.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |v: i64| {
            for b in v.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        self.form.gram().iter().flatten().for_each(|e| feed(*e));
        self.base.iter().for_each(|e| feed(*e));
        for g in &self.generators {
            g.matrix().iter().flatten().for_each(|e| feed(*e));
        }
        feed(matches!(self.mode, ClosureMode::Group) as i64);
        feed(self.negation as i64);
        h
    }
}

/// Resource and scheduling knobs for enumerations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumerationLimits {
    pub visited_cap: usize,
    pub execution: Execution,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        Self {
            visited_cap: 100_000_000,
            execution: Execution::default(),
        }
    }
}

/// Orbit points of Euclidean norm `< T`, sorted lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitBall {
    pub radius: f64,
    pub points: Vec<Vec3>,
}

impl OrbitBall {
    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn contains(&self, x: &Vec3) -> bool {
        self.points.binary_search(x).is_ok()
    }
}

fn norm_below(x: &Vec3, radius: f64) -> bool {
    (norm_squared(x) as f64) < radius * radius
}

/// Enumerate `{x ∈ O : ‖x‖ < T}` by breadth-first expansion from the base.
///
/// Vectors of norm `≥ slack·T` are pruned. Slack 1 is exact whenever every
/// move strictly increases the norm (the Pythagorean tree monoid); otherwise
/// the slack bounds how far a word may leave the ball before returning.
pub fn orbit_ball(
    spec: &OrbitSpec,
    radius: f64,
    limits: &EnumerationLimits,
) -> Result<OrbitBall, OrbitError> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(OrbitError::BadRadius(radius));
    }
    let outer = radius * spec.prune_slack;
    if !norm_below(&spec.base, outer) {
        return Ok(OrbitBall {
            radius,
            points: Vec::new(),
        });
    }
    let moves = spec.ball_moves();
    let visited = closure(
        [spec.base],
        |x: &Vec3| {
            moves
                .iter()
                .map(|g| g.apply(x))
                .filter(|y| norm_below(y, outer))
                .collect::<Vec<_>>()
        },
        limits.visited_cap,
        limits.execution,
    )
    .map_err(|e| OrbitError::CapExceeded { cap: e.cap })?;
    let mut points: Vec<Vec3> = visited
        .into_iter()
        .filter(|x| norm_below(x, radius))
        .map(|x| {
            if spec.canonicalize_signs {
                [x[0].abs(), x[1].abs(), x[2].abs()]
            } else {
                x
            }
        })
        .collect();
    points.sort_unstable();
    points.dedup();
    Ok(OrbitBall { radius, points })
}

/// Least-squares slope of `log(count)` against `log(T)`.
///
/// Samples with `T ≤ 0` or `count = 0` are dropped; at least two distinct `T`
/// must remain.
pub fn estimate_delta(samples: &[(f64, usize)]) -> Result<f64, OrbitError> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(t, c)| t.is_finite() && *t > 0.0 && *c >= 1)
        .map(|(t, c)| (t.ln(), (*c as f64).ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return Err(OrbitError::InsufficientData(pts.len()));
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= f64::EPSILON * n {
        return Err(OrbitError::InsufficientData(1));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn small_pythagorean_ball() {
        let spec = presets::pythagorean_full();
        let ball = orbit_ball(&spec, 30.0, &EnumerationLimits::default()).unwrap();
        assert_eq!(ball.points, vec![[3, 4, 5], [5, 12, 13], [15, 8, 17]]);
    }

    #[test]
    fn radius_below_base_is_empty() {
        let spec = presets::pythagorean_full();
        let ball = orbit_ball(&spec, 7.0, &EnumerationLimits::default()).unwrap();
        assert_eq!(ball.count(), 0);
        let d = presets::aniso_3();
        assert_eq!(orbit_ball(&d, 1.5, &EnumerationLimits::default()).unwrap().count(), 0);
    }

    #[test]
    fn identity_orbit_is_base() {
        let spec = OrbitSpec::new(
            TernaryForm::pythagorean(),
            [3, 4, 5],
            &[crate::form::IDENTITY],
            ClosureMode::Group,
        )
        .unwrap();
        let ball = orbit_ball(&spec, 100.0, &EnumerationLimits::default()).unwrap();
        assert_eq!(ball.points, vec![[3, 4, 5]]);
    }

    #[test]
    fn cap_is_a_resource_error() {
        let spec = presets::pythagorean_full();
        let limits = EnumerationLimits {
            visited_cap: 10,
            ..Default::default()
        };
        let err = orbit_ball(&spec, 1e4, &limits).unwrap_err();
        assert!(err.is_resource_exhaustion());
    }

    #[test]
    fn spec_validation() {
        let f = TernaryForm::pythagorean();
        assert!(matches!(
            OrbitSpec::new(f.clone(), [6, 8, 10], &[crate::form::IDENTITY], ClosureMode::Group),
            Err(OrbitError::NotPrimitive { gcd: 2, .. })
        ));
        assert!(matches!(
            OrbitSpec::new(f.clone(), [3, 4, 5], &[], ClosureMode::Group),
            Err(OrbitError::NoGenerators)
        ));
        assert!(matches!(
            OrbitSpec::new(f.clone(), [3, 4, 5], &[[[2, 0, 0], [0, 2, 0], [0, 0, 2]]], ClosureMode::Group),
            Err(OrbitError::Form(FormError::NotIsometry { .. }))
        ));
        assert!(matches!(
            OrbitSpec::with_level(f, [1, 0, 0], 0, &[crate::form::IDENTITY], ClosureMode::Group),
            Err(OrbitError::WrongLevel { actual: 1, .. })
        ));
    }

    #[test]
    fn delta_from_power_law() {
        let s: Vec<(f64, usize)> = [10.0f64, 100.0, 1000.0]
            .iter()
            .map(|t| (*t, (t * t) as usize))
            .collect();
        assert!((estimate_delta(&s).unwrap() - 2.0).abs() < 1e-9);
        assert!(matches!(
            estimate_delta(&[(10.0, 5)]),
            Err(OrbitError::InsufficientData(1))
        ));
        assert!(estimate_delta(&[(10.0, 5), (10.0, 6)]).is_err());
    }

    #[test]
    fn group_mode_includes_sign_variants() {
        let spec = presets::pythagorean_full_group();
        let ball = orbit_ball(&spec, 30.0, &EnumerationLimits::default()).unwrap();
        assert!(ball.contains(&[3, 4, 5]));
        assert!(ball.contains(&[-3, -4, -5]));
        let f = spec.form();
        assert!(ball.points.iter().all(|x| f.evaluate(x) == 0));
    }
}
