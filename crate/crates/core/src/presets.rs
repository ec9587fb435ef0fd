//! Shipped orbit presets and the four worked sieve examples.

use std::fmt;
use std::str::FromStr;

use crate::coordinate::CoordinateFunction;
use crate::form::{search_isometries, Mat3, TernaryForm, IDENTITY};
use crate::orbit::{ClosureMode, OrbitSpec};

/// Tree matrices generating all primitive Pythagorean triples from (3, 4, 5).
pub const BERGGREN: [Mat3; 3] = [
    [[1, -2, 2], [2, -1, 2], [2, -2, 3]],
    [[1, 2, 2], [2, 1, 2], [2, 2, 3]],
    [[-1, 2, 2], [-2, 1, 2], [-2, 2, 3]],
];

pub const DEFAULT_SEARCH_BOUND: i64 = 12;

fn tree(generators: &[Mat3]) -> OrbitSpec {
    OrbitSpec::with_level(
        TernaryForm::pythagorean(),
        [3, 4, 5],
        0,
        generators,
        ClosureMode::Monoid,
    )
    .and_then(|s| s.prune_slack(1.0))
    .expect("tree preset is valid")
    .negation(true)
}

/// Base (3, 4, 5) under the three tree matrices (monoid enumeration).
pub fn pythagorean_full() -> OrbitSpec {
    tree(&BERGGREN)
}

/// The same generators closed as a group, pruned with slack 2.
pub fn pythagorean_full_group() -> OrbitSpec {
    OrbitSpec::new(TernaryForm::pythagorean(), [3, 4, 5], &BERGGREN, ClosureMode::Group)
        .expect("tree preset is valid")
        .negation(true)
}

/// Two of the three tree matrices; a thin orbit with `δ < 1`.
pub fn pythagorean_thin2() -> OrbitSpec {
    tree(&BERGGREN[..2])
}

/// `x² + y² − 3z²` through (1, 1, 1), generated by the searched isometries of
/// determinant 1 with entries in `[−12, 12]`.
pub fn aniso_3() -> OrbitSpec {
    aniso_3_with_bound(DEFAULT_SEARCH_BOUND)
}

/// The anisotropic preset with a custom generator search bound. The searched
/// matrices generate a subgroup of `SO_F(Z)`, possibly of finite index.
pub fn aniso_3_with_bound(bound: i64) -> OrbitSpec {
    let form = TernaryForm::diagonal(1, 1, -3).expect("x²+y²−3z² is a (2,1) form");
    let mut gens: Vec<Mat3> = search_isometries(&form, bound, true)
        .into_iter()
        .map(|g| *g.matrix())
        .filter(|m| *m != IDENTITY)
        .collect();
    if gens.is_empty() {
        gens.push(IDENTITY);
    }
    OrbitSpec::with_level(form, [1, 1, 1], -1, &gens, ClosureMode::Group)
        .expect("anisotropic preset is valid")
        .negation(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Preset {
    PythagoreanFull,
    PythagoreanThin2,
    Aniso3,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::PythagoreanFull, Preset::PythagoreanThin2, Preset::Aniso3];

    pub fn name(self) -> &'static str {
        match self {
            Preset::PythagoreanFull => "pythagorean_full",
            Preset::PythagoreanThin2 => "pythagorean_thin2",
            Preset::Aniso3 => "aniso_3",
        }
    }

    pub fn spec(self) -> OrbitSpec {
        match self {
            Preset::PythagoreanFull => pythagorean_full(),
            Preset::PythagoreanThin2 => pythagorean_thin2(),
            Preset::Aniso3 => aniso_3(),
        }
    }

    pub fn is_pythagorean(self) -> bool {
        matches!(self, Preset::PythagoreanFull | Preset::PythagoreanThin2)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown preset '{s}'"))
    }
}

/// The four worked (orbit, function) pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Example {
    /// Pythagorean orbit, hypotenuse `z`.
    A,
    /// Pythagorean orbit, area `xy/12`.
    B,
    /// Pythagorean orbit, `xyz/60`.
    C,
    /// Anisotropic orbit, `xyz`.
    D,
}

impl Example {
    pub const ALL: [Example; 4] = [Example::A, Example::B, Example::C, Example::D];

    pub fn function(self) -> CoordinateFunction {
        match self {
            Example::A => CoordinateFunction::Hypotenuse,
            Example::B => CoordinateFunction::Area,
            Example::C => CoordinateFunction::CoordProduct,
            Example::D => CoordinateFunction::RawProduct,
        }
    }

    pub fn preset(self) -> Preset {
        match self {
            Example::D => Preset::Aniso3,
            _ => Preset::PythagoreanFull,
        }
    }

    pub fn kappa(self) -> u32 {
        self.function().kappa()
    }

    /// Identify the example from a preset and function, if they form one.
    pub fn identify(preset: Preset, f: CoordinateFunction) -> Option<Example> {
        match (preset.is_pythagorean(), f) {
            (true, CoordinateFunction::Hypotenuse) => Some(Example::A),
            (true, CoordinateFunction::Area) => Some(Example::B),
            (true, CoordinateFunction::CoordProduct) => Some(Example::C),
            (false, CoordinateFunction::RawProduct) => Some(Example::D),
            _ => None,
        }
    }

    pub fn discriminant(self) -> i64 {
        match self {
            Example::D => -3,
            _ => -1,
        }
    }

    pub fn level(self) -> i64 {
        match self {
            Example::D => -1,
            _ => 0,
        }
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Example::A => "A",
            Example::B => "B",
            Example::C => "C",
            Example::D => "D",
        };
        f.write_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_matrices_are_isometries() {
        let f = TernaryForm::pythagorean();
        assert!(BERGGREN.iter().all(|g| f.is_isometry(g)));
        let images: Vec<_> = pythagorean_full()
            .generators()
            .iter()
            .map(|g| g.apply(&[3, 4, 5]))
            .collect();
        assert_eq!(images, vec![[5, 12, 13], [21, 20, 29], [15, 8, 17]]);
    }

    #[test]
    fn aniso_preset_generators() {
        let spec = aniso_3();
        assert_eq!(spec.level(), -1);
        assert!(spec.generators().len() > 10);
        assert!(spec
            .generators()
            .iter()
            .all(|g| g.determinant() == 1 && spec.form().is_isometry(g.matrix())));
    }

    #[test]
    fn preset_names() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>(), Ok(p));
        }
        assert_eq!(Example::identify(Preset::Aniso3, CoordinateFunction::RawProduct), Some(Example::D));
        assert_eq!(Example::identify(Preset::Aniso3, CoordinateFunction::Area), None);
    }
}
