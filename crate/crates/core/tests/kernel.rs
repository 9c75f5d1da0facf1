mod common;

use proptest::prelude::*;

use riccati_core::diffpoly::{d_total, d_total_n, euler, jet_bases, substitute, DiffPoly, DiffSymbol};
use riccati_core::numerics::Taylor;
use riccati_core::riccati_chain::chain1;

use common::{derivation, exactness, maybe_exact, poly, ring_axioms, round_trip};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ring(p in poly(), q in poly(), r in poly()) {
        ring_axioms(&p, &q, &r)?;
    }

    #[test]
    fn leibniz(p in poly(), q in poly()) {
        derivation(&p, &q)?;
    }

    #[test]
    fn exact_iff_euler_vanishes((q, built) in maybe_exact()) {
        exactness(&q, built)?;
    }

    #[test]
    fn print_parse(p in poly()) {
        round_trip(&p)?;
    }

    #[test]
    fn euler_kills_derivatives(p in poly()) {
        let dp = d_total(&p);
        for b in jet_bases(&dp) {
            prop_assert!(euler(&dp, &b).is_zero());
        }
    }

    #[test]
    fn substitution_is_a_differential_homomorphism(p in poly(), q in poly(), s in poly()) {
        let sub = |a: &DiffPoly| substitute(a, "y", &s);
        prop_assert_eq!(sub(&(&p * &q)), sub(&p) * sub(&q));
        prop_assert_eq!(sub(&(&p + &q)), sub(&p) + sub(&q));
        prop_assert_eq!(sub(&d_total(&p)), d_total(&sub(&p)));
    }

    #[test]
    fn iterated_derivative(p in poly(), a in 0u32..3, b in 0u32..3) {
        prop_assert_eq!(d_total_n(&d_total_n(&p, a), b), d_total_n(&p, a + b));
    }

    #[test]
    fn reflection(p in poly()) {
        let p = p.replace_symbol(&DiffSymbol::independent(), &DiffPoly::one());
        prop_assert_eq!(p.reflect().reflect(), p.clone());
        prop_assert_eq!(d_total(&p.reflect()), -d_total(&p).reflect());
    }

    #[test]
    fn taylor_product_rule(a in proptest::collection::vec(-2.0f64..2.0, 5), b in proptest::collection::vec(-2.0f64..2.0, 5)) {
        let (ta, tb) = (Taylor::from_derivatives(&a), Taylor::from_derivatives(&b));
        let lhs = (&ta * &tb).differentiate();
        let rhs = &(&ta.differentiate() * &Taylor::from_derivatives(&b[..4]))
            + &(&Taylor::from_derivatives(&a[..4]) * &tb.differentiate());
        for (l, r) in lhs.derivatives().iter().zip(rhs.derivatives()) {
            prop_assert!((l - r).abs() <= 1e-9 * (1.0 + r.abs()), "{l} vs {r}");
        }
    }
}

#[test]
fn chain_recursion_from_first_member() {
    // R^{n+1} = (D + u) R^n
    let u = DiffPoly::dep("u", 0);
    let mut r = u.clone();
    for n in 1..=6 {
        r = d_total(&r) + &u * &r;
        assert_eq!(chain1(n), r, "n = {n}");
    }
}
