//! Homogeneous coordinate functions sieved on orbits.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::form::Vec3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoordinateError {
    #[error("{function}: raw value {raw} at {point:?} is not divisible by {divisor}")]
    NotIntegral {
        function: CoordinateFunction,
        point: Vec3,
        raw: i128,
        divisor: i128,
    },
    #[error("unknown coordinate function '{0}'")]
    Unknown(String),
}

/// `z`, `xy/12`, `xyz/60` or the unnormalised `xyz`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoordinateFunction {
    Hypotenuse,
    Area,
    CoordProduct,
    RawProduct,
}

impl CoordinateFunction {
    pub const ALL: [CoordinateFunction; 4] = [
        CoordinateFunction::Hypotenuse,
        CoordinateFunction::Area,
        CoordinateFunction::CoordProduct,
        CoordinateFunction::RawProduct,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CoordinateFunction::Hypotenuse => "hypotenuse",
            CoordinateFunction::Area => "area",
            CoordinateFunction::CoordProduct => "coord_product",
            CoordinateFunction::RawProduct => "raw_product",
        }
    }

    pub fn degree(self) -> u32 {
        match self {
            CoordinateFunction::Hypotenuse => 1,
            CoordinateFunction::Area => 2,
            CoordinateFunction::CoordProduct | CoordinateFunction::RawProduct => 3,
        }
    }

    /// Sieve dimension on the matching preset orbit.
    pub fn kappa(self) -> u32 {
        match self {
            CoordinateFunction::Hypotenuse => 1,
            CoordinateFunction::Area => 4,
            CoordinateFunction::CoordProduct => 5,
            CoordinateFunction::RawProduct => 3,
        }
    }

    /// Constant removed from the raw polynomial.
    pub fn divisor(self) -> i128 {
        match self {
            CoordinateFunction::Hypotenuse | CoordinateFunction::RawProduct => 1,
            CoordinateFunction::Area => 12,
            CoordinateFunction::CoordProduct => 60,
        }
    }

    /// The homogeneous polynomial before normalisation.
    pub fn raw(self, x: &Vec3) -> i128 {
        let [a, b, c] = x.map(|e| e as i128);
        match self {
            CoordinateFunction::Hypotenuse => c,
            CoordinateFunction::Area => a * b,
            CoordinateFunction::CoordProduct | CoordinateFunction::RawProduct => a * b * c,
        }
    }

    /// The raw polynomial on residues modulo `q` (entries already reduced).
    pub fn raw_mod(self, x: &[u64; 3], q: u64) -> u64 {
        let q = q as u128;
        let [a, b, c] = x.map(|e| e as u128);
        let r = match self {
            CoordinateFunction::Hypotenuse => c % q,
            CoordinateFunction::Area => a * b % q,
            CoordinateFunction::CoordProduct | CoordinateFunction::RawProduct => a * b % q * c % q,
        };
        r as u64
    }

    /// `raw(x) / divisor`, failing when the division is not exact.
    pub fn value(self, x: &Vec3) -> Result<i128, CoordinateError> {
        let raw = self.raw(x);
        let divisor = self.divisor();
        if raw % divisor != 0 {
            return Err(CoordinateError::NotIntegral {
                function: self,
                point: *x,
                raw,
                divisor,
            });
        }
        Ok(raw / divisor)
    }
}

impl fmt::Display for CoordinateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CoordinateFunction {
    type Err = CoordinateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| CoordinateError::Unknown(s.to_string()))
    }
}

/// `coordinate_value`: exact normalised value of `f` at `x`.
pub fn coordinate_value(f: CoordinateFunction, x: &Vec3) -> Result<i128, CoordinateError> {
    f.value(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalised_values() {
        assert_eq!(coordinate_value(CoordinateFunction::CoordProduct, &[3, 4, 5]), Ok(1));
        assert_eq!(coordinate_value(CoordinateFunction::Area, &[5, 12, 13]), Ok(5));
        assert_eq!(coordinate_value(CoordinateFunction::Hypotenuse, &[3, 4, 5]), Ok(5));
        assert_eq!(coordinate_value(CoordinateFunction::RawProduct, &[1, 1, 1]), Ok(1));
        assert!(matches!(
            coordinate_value(CoordinateFunction::Area, &[1, 1, 1]),
            Err(CoordinateError::NotIntegral { divisor: 12, .. })
        ));
    }

    #[test]
    fn names_round_trip() {
        for f in CoordinateFunction::ALL {
            assert_eq!(f.name().parse::<CoordinateFunction>(), Ok(f));
        }
        assert!("volume".parse::<CoordinateFunction>().is_err());
    }

    proptest! {
        #[test]
        fn raw_is_homogeneous(x in prop::array::uniform3(-1000i64..1000), a in -5i64..=5) {
            for f in CoordinateFunction::ALL {
                let scaled = [a * x[0], a * x[1], a * x[2]];
                prop_assert_eq!(f.raw(&scaled), (a as i128).pow(f.degree()) * f.raw(&x));
            }
        }

        #[test]
        fn raw_mod_matches_integer(x in prop::array::uniform3(0u64..500), q in 2u64..500) {
            let r = x.map(|e| e % q);
            for f in CoordinateFunction::ALL {
                let exact = f.raw(&x.map(|e| e as i64)).rem_euclid(q as i128) as u64;
                prop_assert_eq!(f.raw_mod(&r, q), exact);
            }
        }
    }
}
