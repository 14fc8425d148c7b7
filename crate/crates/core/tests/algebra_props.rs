//! Normal forms in the matrix and flag algebras.

use std::collections::BTreeMap;

use mpqg_core::coeff::{Coefficient, ParamMonomial as M, Substitution};
use mpqg_core::ncpoly::{GenSymbol, NCPoly, PresetAlgebra, Word};
use mpqg_core::parse::parse_expr;
use mpqg_core::qmatrix::build_matrix_algebra;
use mpqg_core::yflag::{build_flag_algebra, flag_relations};
use num::{BigRational, One};
use proptest::prelude::*;

fn algebras() -> Vec<PresetAlgebra> {
    vec![
        build_matrix_algebra(2).unwrap().alg,
        build_matrix_algebra(3).unwrap().alg,
        build_flag_algebra(3, false).unwrap().alg,
        build_flag_algebra(3, true).unwrap().alg,
        build_flag_algebra(4, false).unwrap().alg,
    ]
}

fn word_in(alg: &PresetAlgebra, idx: &[usize]) -> Word {
    let a = alg.alphabet();
    Word::from_letters(idx.iter().map(|&i| a[i % a.len()]).collect())
}

fn small_coeff(k: i64, e: i64) -> Coefficient {
    Coefficient::from_int(k) * Coefficient::from(M::q(e) * M::qij(1, 2, 1 - e))
}

fn poly_in(alg: &PresetAlgebra, terms: &[(Vec<usize>, i64, i64)]) -> NCPoly {
    let mut p = NCPoly::zero();
    for (w, k, e) in terms {
        p.add_term(word_in(alg, w), small_coeff(*k, *e));
    }
    p
}

fn terms() -> impl Strategy<Value = Vec<(Vec<usize>, i64, i64)>> {
    prop::collection::vec((prop::collection::vec(0usize..16, 0..4), -3i64..=3, -1i64..=1), 0..3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normal_form_is_idempotent_and_normal(which in 0usize..5, t in terms()) {
        let alg = &algebras()[which];
        let nf = alg.normal_form(&poly_in(alg, &t)).unwrap();
        prop_assert!(nf.terms().all(|(w, _)| w.is_normal()));
        prop_assert_eq!(alg.normal_form(&nf).unwrap(), nf);
    }

    #[test]
    fn normal_form_is_multiplicative(which in 0usize..5, s in terms(), t in terms()) {
        let alg = &algebras()[which];
        let (x, y) = (poly_in(alg, &s), poly_in(alg, &t));
        let direct = alg.normal_form(&(&x * &y)).unwrap();
        let staged = alg.normal_form(&(&alg.normal_form(&x).unwrap() * &alg.normal_form(&y).unwrap())).unwrap();
        prop_assert_eq!(direct, staged);
        let sum = alg.normal_form(&(&x + &y)).unwrap();
        prop_assert_eq!(sum, &alg.normal_form(&x).unwrap() + &alg.normal_form(&y).unwrap());
    }

    #[test]
    fn flag_relations_lie_in_the_ideal(n in 3u32..=4, left in prop::collection::vec(0usize..6, 0..3),
                                       right in prop::collection::vec(0usize..6, 0..3), pick in 0usize..64) {
        let f = build_flag_algebra(n, false).unwrap();
        let rels = flag_relations(n);
        let rel = &rels[pick % rels.len()];
        let u = NCPoly::word(word_in(&f.alg, &left));
        let v = NCPoly::word(word_in(&f.alg, &right));
        let element = &(&u * &(&rel.lhs - &rel.rhs)) * &v;
        prop_assert!(f.normal_form(&element).unwrap().is_zero());
    }

    #[test]
    fn classical_normal_form_sorts(which in 0usize..5, idx in prop::collection::vec(0usize..16, 1..6)) {
        let alg = &algebras()[which];
        let w = word_in(alg, &idx);
        let img = alg.normal_form(&NCPoly::word(w.clone())).unwrap().classical_image(&BTreeMap::new()).unwrap();
        let want: BTreeMap<Word, BigRational> = [(w.sorted(), BigRational::one())].into_iter().collect();
        prop_assert_eq!(img, want);
    }

    #[test]
    fn printed_polynomials_parse_back(which in 0usize..5, t in terms()) {
        let alg = &algebras()[which];
        let nf = alg.normal_form(&poly_in(alg, &t)).unwrap();
        prop_assert_eq!(parse_expr(&nf.to_string(), alg).unwrap(), nf);
    }
}

#[test]
fn flag_rank3_rules() {
    let f = build_flag_algebra(3, false).unwrap();
    let y = |i, j| GenSymbol::Y(i, j);
    let w = |a: &[GenSymbol]| Word::from_letters(a.to_vec());
    let c = M::qij(1, 2, 1) * M::qij(2, 3, 1) * M::qij(1, 3, -1);
    assert_eq!(f.alg.rule(y(3, 2), y(3, 1)).unwrap(), &NCPoly::monomial(c.clone().into(), w(&[y(3, 1), y(3, 2)])));
    assert_eq!(f.alg.rule(y(3, 1), y(2, 1)).unwrap(), &NCPoly::monomial(c.into(), w(&[y(2, 1), y(3, 1)])));
    assert_eq!(f.alg.rules().len(), 3);
}

#[test]
fn relation_counts() {
    // one relation per out-of-order pair of generators
    assert_eq!(flag_relations(3).len(), 3);
    assert_eq!(flag_relations(4).len(), 15);
    assert_eq!(build_flag_algebra(4, false).unwrap().alg.rules().len(), 15);
    assert_eq!(build_matrix_algebra(2).unwrap().alg.rules().len(), 6);
    assert_eq!(build_matrix_algebra(3).unwrap().alg.rules().len(), 36);
}

#[test]
fn one_parameter_point() {
    let f = build_flag_algebra(4, false).unwrap();
    let flat = f.alg.substituted(&Substitution::one_param(4), "flag(4,one-param)").unwrap();
    let q = |e: i64| Coefficient::from(M::q(e));
    let tail = q(-1) * Coefficient::lambda();
    for rel in flag_relations(4).into_iter().filter(|r| "abc".contains(r.family)) {
        let (hi, lo) = {
            let (w, _) = rel.lhs.terms().next().unwrap();
            (w.letters()[0], w.letters()[1])
        };
        let rhs = flat.rule(hi, lo).unwrap();
        let swapped = Word::from_letters(vec![lo, hi]);
        match rel.family {
            'a' | 'b' => assert_eq!(rhs, &NCPoly::monomial(q(1), swapped)),
            _ => {
                let GenSymbol::Y(k, _) = hi else { unreachable!() };
                let GenSymbol::Y(_, i) = lo else { unreachable!() };
                let mut want = NCPoly::monomial(q(-1), swapped);
                want.add_term(Word::letter(GenSymbol::Y(k, i)), tail.clone());
                assert_eq!(rhs, &want);
            }
        }
    }
}

#[test]
fn split_rank3_rules() {
    // q12 = q23 = q^2 / q13: q12 q23 / q13 = q^4 q13^-3
    let f = build_flag_algebra(3, true).unwrap();
    let y = |i, j| GenSymbol::Y(i, j);
    let want = NCPoly::monomial((M::q(4) * M::qij(1, 3, -3)).into(), Word::from_letters(vec![y(3, 1), y(3, 2)]));
    assert_eq!(f.alg.rule(y(3, 2), y(3, 1)).unwrap(), &want);
    assert!(build_flag_algebra(4, true).is_err());
    assert!(build_flag_algebra(2, true).is_err());
}
