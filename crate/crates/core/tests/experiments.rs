use std::collections::BTreeMap;

use orbitsieve_core::experiments::{
    almost_prime_table, build_sequence, coordinate_value, distribution_report, prime_divisor_count, Counting, RowFlag,
};
use orbitsieve_core::modular::{local_density, orbit_mod_q, DensityMode};
use orbitsieve_core::orbit::orbit_ball;
use orbitsieve_core::presets;
use orbitsieve_core::{CoordinateFunction, EnumerationLimits, Execution};
use proptest::prelude::*;

#[test]
fn coordinate_values() {
    assert_eq!(coordinate_value(CoordinateFunction::CoordProduct, &[3, 4, 5]).unwrap(), 1);
    assert_eq!(coordinate_value(CoordinateFunction::Area, &[5, 12, 13]).unwrap(), 5);
    assert_eq!(coordinate_value(CoordinateFunction::Hypotenuse, &[3, 4, 5]).unwrap(), 5);
    assert!(coordinate_value(CoordinateFunction::CoordProduct, &[1, 1, 1]).is_err());
}

// Depth-limited walk of the tree, independent of the BFS enumerator.
fn tree_oracle(radius: f64) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    let mut stack = vec![[3i64, 4, 5]];
    while let Some(x) = stack.pop() {
        if ((x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) as f64) >= radius * radius {
            continue;
        }
        out.push(x);
        for m in presets::BERGGREN {
            stack.push([0, 1, 2].map(|i| m[i][0] * x[0] + m[i][1] * x[1] + m[i][2] * x[2]));
        }
    }
    out.sort();
    out
}

#[test]
fn micro_fixture() {
    let spec = presets::pythagorean_full();
    let seq = build_sequence(&spec, CoordinateFunction::CoordProduct, 30.0, &EnumerationLimits::default()).unwrap();
    let mut oracle = BTreeMap::new();
    for x in tree_oracle(30.0) {
        *oracle.entry((x[0] * x[1] * x[2] / 60) as u64).or_insert(0u64) += 1;
    }
    assert_eq!(seq.support, oracle);
    assert_eq!(seq.support, BTreeMap::from([(1, 1), (13, 1), (34, 1)]));
}

#[test]
fn sequence_mass_and_size() {
    let spec = presets::pythagorean_full();
    for f in [CoordinateFunction::Hypotenuse, CoordinateFunction::Area, CoordinateFunction::CoordProduct] {
        let t = 5000.0;
        let seq = build_sequence(&spec, f, t, &EnumerationLimits::default()).unwrap();
        let ball = orbit_ball(&spec, t, &EnumerationLimits::default()).unwrap();
        assert_eq!(seq.mass + seq.zeros, ball.count() as u64);
        assert_eq!(seq.zeros, 0);
        assert!((seq.n_max() as f64) <= 8.0 * t.powi(f.degree() as i32));
        assert_eq!(tree_oracle(t).len(), ball.count());
    }
}

#[test]
fn distribution_at_ten_thousand() {
    let spec = presets::pythagorean_full();
    let f = CoordinateFunction::CoordProduct;
    let seq = build_sequence(&spec, f, 1e4, &EnumerationLimits::default()).unwrap();
    let qs = [1, 2, 3, 5, 7, 11, 13, 17, 19, 77, 91];
    let densities: Vec<_> = [7, 11, 13, 17, 19, 77, 91]
        .iter()
        .map(|&q| local_density(&orbit_mod_q(&spec, q).unwrap(), f, DensityMode::Line).unwrap())
        .collect();
    let report = distribution_report(&spec, &seq, &qs, &densities).unwrap();
    assert_eq!(report.mass, 1124);
    let row = |q: u64| report.rows.iter().find(|r| r.q == q).unwrap();
    for q in [2, 3, 5] {
        assert_eq!(row(q).flag, RowFlag::BadModulus);
    }
    for q in [7, 11, 13, 17, 19] {
        assert!(row(q).rel_error.unwrap() < 0.2, "q = {q}");
    }
    for (a, ab) in [(7, 77), (11, 77), (7, 91), (13, 91)] {
        assert!(row(ab).mass_q <= row(a).mass_q);
    }
}

#[test]
fn almost_primes_monotone() {
    let spec = presets::pythagorean_full();
    let seq = build_sequence(&spec, CoordinateFunction::CoordProduct, 1e4, &EnumerationLimits::default()).unwrap();
    for counting in [Counting::Multiplicity, Counting::Distinct] {
        let rs: Vec<_> = (0..=20).map(Some).chain([None]).collect();
        let rows = almost_prime_table(&seq, &rs, counting, Execution::default()).unwrap();
        assert!(rows.windows(2).all(|w| w[0].count <= w[1].count));
        assert_eq!(rows.last().unwrap().count, seq.mass);
        assert_eq!(rows[0].count, seq.support.get(&1).copied().unwrap_or(0));
    }
}

proptest! {
    #[test]
    fn omega_is_additive(a in 1u64..100_000, b in 1u64..100_000) {
        let total = |n| prime_divisor_count(n, Counting::Multiplicity).unwrap();
        prop_assert_eq!(total(a * b), total(a) + total(b));
        prop_assert!(prime_divisor_count(a * b, Counting::Distinct).unwrap() <= total(a * b));
    }

    #[test]
    fn raw_is_homogeneous(x in prop::array::uniform3(-1000i64..1000), a in -5i64..=5) {
        for f in CoordinateFunction::ALL {
            let scaled = x.map(|c| a * c);
            prop_assert_eq!(f.raw(&scaled), (a as i128).pow(f.degree()) * f.raw(&x));
        }
    }
}
