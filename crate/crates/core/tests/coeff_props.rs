use std::collections::BTreeMap;

use mpqg_core::coeff::{
    coeff_eq, qbracket, qint, specialize, Coefficient, ExponentForm, HalfInt, ParamMonomial as M, ParamSymbol,
    Substitution,
};
use mpqg_core::parse::parse_coefficient;
use num::{BigInt, BigRational};
use proptest::prelude::*;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn monomial() -> impl Strategy<Value = M> {
    (-3i64..=3, -2i64..=2, -2i64..=2, -1i64..=1, prop::bool::ANY).prop_map(|(a, b, c, d, half)| {
        let qe = if half { ExponentForm::constant(HalfInt::from_doubled(2 * a + 1)) } else { ExponentForm::int(a) };
        M::q(qe) * M::qij(1, 2, b) * M::qij(2, 3, c) * M::qij(1, 3, d)
    })
}

fn coefficient() -> impl Strategy<Value = Coefficient> {
    (prop::collection::vec((-4i64..=4, monomial()), 0..4), 0u32..3).prop_map(|(terms, lam)| {
        let mut c = Coefficient::zero();
        for (k, m) in terms {
            c += &Coefficient::term(rat(k, 1), m);
        }
        c * Coefficient::inv_lambda_pow(lam)
    })
}

fn affine() -> impl Strategy<Value = ExponentForm> {
    (-6i64..=6, -2i64..=2, -2i64..=2).prop_map(|(c, a, b)| {
        ExponentForm::int(c).with_label(1, HalfInt::from_doubled(2 * a)).with_label(2, HalfInt::from_doubled(2 * b))
    })
}

/// Values with `q^2 != 1`, so that `lambda` never vanishes.
fn assignment() -> impl Strategy<Value = BTreeMap<ParamSymbol, BigRational>> {
    (2i64..=5, 1i64..=4, 1i64..=4, 1i64..=4).prop_map(|(q, a, b, c)| {
        let sq = |x: i64| rat(x * x, 1);
        [
            (ParamSymbol::Q, sq(q)),
            (ParamSymbol::qij(1, 2), sq(a)),
            (ParamSymbol::qij(2, 3), sq(b)),
            (ParamSymbol::qij(1, 3), sq(c)),
        ]
        .into_iter()
        .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in coefficient(), b in coefficient(), c in coefficient()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &Coefficient::zero(), a.clone());
        prop_assert_eq!(&a * &Coefficient::one(), a.clone());
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn canonical_form_agrees_with_cross_multiplication(a in coefficient(), b in coefficient()) {
        prop_assert_eq!(a == b, coeff_eq(&a, &b));
        let scaled = (&a * &Coefficient::lambda()) * Coefficient::inv_lambda_pow(1);
        prop_assert_eq!(scaled, a);
    }

    #[test]
    fn qbracket_is_odd(h in affine()) {
        prop_assert!((qbracket(&h) + qbracket(&-&h)).is_zero());
    }

    #[test]
    fn qbracket_addition_rule(a in affine(), b in affine()) {
        // [a + b] = q^b [a] + q^-a [b]
        let lhs = qbracket(&(&a + &b));
        let rhs = Coefficient::from(M::q(b.clone())) * qbracket(&a) + Coefficient::from(M::q(-&a)) * qbracket(&b);
        prop_assert!(coeff_eq(&lhs, &rhs));
    }

    #[test]
    fn specialize_is_a_homomorphism(a in coefficient(), b in coefficient(), v in assignment()) {
        let r = BTreeMap::new();
        let (x, y) = (specialize(&a, &v, &r).unwrap(), specialize(&b, &v, &r).unwrap());
        prop_assert_eq!(specialize(&(&a + &b), &v, &r).unwrap(), &x + &y);
        prop_assert_eq!(specialize(&(&a * &b), &v, &r).unwrap(), &x * &y);
    }

    #[test]
    fn substitution_is_a_homomorphism(a in coefficient(), b in coefficient()) {
        for sub in [Substitution::split3(), Substitution::one_param(3)] {
            prop_assert_eq!((&a * &b).substitute(&sub), a.substitute(&sub) * b.substitute(&sub));
            prop_assert_eq!((&a + &b).substitute(&sub), a.substitute(&sub) + b.substitute(&sub));
        }
    }

    #[test]
    fn json_round_trip(a in coefficient()) {
        prop_assert_eq!(Coefficient::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn display_parses_back(a in coefficient()) {
        prop_assert_eq!(parse_coefficient(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn qint_classical_limit(k in -12i64..=12) {
        prop_assert_eq!(qint(k).classical_limit(&BTreeMap::new()).unwrap(), rat(k, 1));
    }

    #[test]
    fn monomial_division(a in coefficient(), m in monomial()) {
        prop_assume!(!a.is_zero());
        let b = a.mul_monomial(&m).scale(&rat(-3, 2));
        let (c, mono) = b.monomial_ratio(&a).unwrap();
        prop_assert_eq!(c, rat(-3, 2));
        prop_assert_eq!(mono, m);
    }
}

#[test]
fn qint_values() {
    // [3]_q = q^2 + 1 + q^-2 and [-2]_q = -(q + q^-1)
    let three = Coefficient::from(M::q(2)) + Coefficient::one() + Coefficient::from(M::q(-2));
    assert_eq!(qint(3), three);
    assert_eq!(qint(-2), -(Coefficient::from(M::q(1)) + Coefficient::from(M::q(-1))));
    assert!(qint(0).is_zero());
}

#[test]
fn specialize_bracket_at_two() {
    // [3]_2 = 4 + 1 + 1/4
    let v: BTreeMap<_, _> = [(ParamSymbol::Q, rat(2, 1))].into_iter().collect();
    assert_eq!(specialize(&qint(3), &v, &BTreeMap::new()).unwrap(), rat(21, 4));
}
