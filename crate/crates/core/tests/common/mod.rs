//! Strategies and property bodies shared by the proptest suite and the
//! acceptance runner.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use riccati_core::diffpoly::{anti_d, d_total, euler, is_total_derivative, jet_bases, parse, DiffPoly};

/// Jet coordinates of two dependent bases and one coefficient, plus `x`
/// and a constant.
const ATOMS: [&str; 11] = ["u", "u1", "u2", "u3", "y", "y1", "v", "v1", "x", "k", "alpha"];

fn atom() -> impl Strategy<Value = DiffPoly> {
    proptest::sample::select(&ATOMS[..]).prop_map(|a| parse(a).unwrap())
}

fn term() -> impl Strategy<Value = DiffPoly> {
    (-6i64..=6, 1i64..=4, proptest::collection::vec(atom(), 0..=3)).prop_map(|(n, d, atoms)| {
        atoms.iter().fold(DiffPoly::rat(n, d), |acc, a| acc * a)
    })
}

pub fn poly() -> impl Strategy<Value = DiffPoly> {
    proptest::collection::vec(term(), 0..=4).prop_map(|ts| ts.iter().fold(DiffPoly::zero(), |acc, t| acc + t))
}

/// `D(p)` or `D(p) + r`: roughly half of the draws are exact by
/// construction, the rest almost never are.
pub fn maybe_exact() -> impl Strategy<Value = (DiffPoly, bool)> {
    (poly(), poly(), any::<bool>()).prop_map(|(p, r, exact)| {
        let dp = d_total(&p);
        if exact { (dp, true) } else { (dp + r, false) }
    })
}

pub fn ring_axioms(p: &DiffPoly, q: &DiffPoly, r: &DiffPoly) -> Result<(), TestCaseError> {
    prop_assert_eq!(p + q, q + p);
    prop_assert_eq!(p * q, q * p);
    prop_assert_eq!((p + q) + r, p + (q + r));
    prop_assert_eq!((p * q) * r, p * (q * r));
    prop_assert_eq!(p * (q + r), p * q + p * r);
    prop_assert_eq!(p + &DiffPoly::zero(), p.clone());
    prop_assert_eq!(p * &DiffPoly::one(), p.clone());
    prop_assert!((p + &(-p)).is_zero());
    prop_assert!((p * &DiffPoly::zero()).is_zero());
    Ok(())
}

pub fn derivation(p: &DiffPoly, q: &DiffPoly) -> Result<(), TestCaseError> {
    prop_assert_eq!(d_total(&(p * q)), d_total(p) * q + p * d_total(q));
    prop_assert_eq!(d_total(&(p + q)), d_total(p) + d_total(q));
    prop_assert!(d_total(&DiffPoly::sym("k")).is_zero());
    prop_assert_eq!(d_total(&DiffPoly::x()), DiffPoly::one());
    Ok(())
}

pub fn exactness(q: &DiffPoly, built_exact: bool) -> Result<(), TestCaseError> {
    let euler_zero = jet_bases(q).iter().all(|b| euler(q, b).is_zero());
    prop_assert_eq!(euler_zero, is_total_derivative(q));
    let anti = anti_d(q);
    prop_assert_eq!(anti.is_ok(), euler_zero, "q = {}", q);
    if built_exact {
        prop_assert!(euler_zero, "D(p) with nonzero Euler image: {}", q);
    }
    if let Ok(a) = anti {
        prop_assert_eq!(d_total(&a), q.clone());
        prop_assert!(a.constant_term() == num_traits::Zero::zero());
    }
    Ok(())
}

pub fn round_trip(p: &DiffPoly) -> Result<(), TestCaseError> {
    let text = p.to_string();
    let back = parse(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
    prop_assert_eq!(&back, p);
    prop_assert_eq!(back.to_string(), text);
    Ok(())
}

/// Runs `body` on `cases` deterministic draws; returns the first failure.
pub fn run_cases<S: Strategy>(
    cases: u32,
    strategy: S,
    body: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, body).map_err(|e| e.to_string())
}
