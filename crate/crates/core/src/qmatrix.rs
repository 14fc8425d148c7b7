//! The multiparameter quantum matrix algebra on the entries `a_ij`.
//!
//! For `j < l` and `i < k`, with `p = q_jl / q^2`, `r = 1 / q_ik`:
//!
//! ```text
//! (a) a_ij a_il = p a_il a_ij
//! (b) a_ij a_kj = r a_kj a_ij
//! (c) p a_il a_kj = r a_kj a_il
//! (d) r q a_kl a_ij - (q p)^-1 a_ij a_kl = lambda a_il a_kj
//! ```
//!
//! (here (a) uses row `i` and columns `j < l`, (b) column `j` and rows
//! `i < k`). Every unordered pair of entries falls in exactly one family.

use std::collections::BTreeMap;

use num::{BigRational, Zero};
use serde_json::{json, Value};

use crate::coeff::{shorthand::p, Coefficient, ParamMonomial};
use crate::error::Error;
use crate::ncpoly::{q_factor, GenSymbol, NCPoly, PresetAlgebra, RewriteRule, Word};
use crate::report::{Check, Report, Status};

/// One defining relation, stored as a relator that must vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixRelation {
    pub family: char,
    /// `(i, j, k, l)`: the entries involved are among `a_ij, a_il, a_kj, a_kl`.
    pub indices: [u32; 4],
    pub relator: NCPoly,
}

impl MatrixRelation {
    pub fn label(&self) -> String {
        let [i, j, k, l] = self.indices;
        format!("({})[{i},{j},{k},{l}]", self.family)
    }
}

#[derive(Clone, Debug)]
pub struct MatrixAlgebra {
    pub n: u32,
    pub alg: PresetAlgebra,
    pub relations: Vec<MatrixRelation>,
}

/// Ordered row or column indices of a minor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSet(Vec<u32>);

impl IndexSet {
    pub fn new(v: Vec<u32>) -> Result<Self, Error> {
        if v.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadIndexSet(format!("{v:?} is not strictly increasing")));
        }
        Ok(IndexSet(v))
    }

    pub fn range(m: u32) -> Self {
        IndexSet((1..=m).collect())
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn a(i: u32, j: u32) -> GenSymbol {
    GenSymbol::A(i, j)
}

fn word2(x: GenSymbol, y: GenSymbol) -> Word {
    Word::from_letters(vec![x, y])
}

fn term(c: Coefficient, x: GenSymbol, y: GenSymbol) -> NCPoly {
    NCPoly::monomial(c, word2(x, y))
}

pub fn matrix_generators(n: u32) -> Vec<GenSymbol> {
    (1..=n).flat_map(|i| (1..=n).map(move |j| a(i, j))).collect()
}

pub fn matrix_relations(n: u32) -> Vec<MatrixRelation> {
    let one = Coefficient::one;
    let mut out = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            for l in j + 1..=n {
                let pp: Coefficient = p(j, l).into();
                out.push(MatrixRelation {
                    family: 'a',
                    indices: [i, j, i, l],
                    relator: &term(one(), a(i, j), a(i, l)) - &term(pp, a(i, l), a(i, j)),
                });
            }
        }
    }
    for j in 1..=n {
        for i in 1..=n {
            for k in i + 1..=n {
                let r: Coefficient = ParamMonomial::qij(i, k, -1).into();
                out.push(MatrixRelation {
                    family: 'b',
                    indices: [i, j, k, j],
                    relator: &term(one(), a(i, j), a(k, j)) - &term(r, a(k, j), a(i, j)),
                });
            }
        }
    }
    for i in 1..=n {
        for k in i + 1..=n {
            for j in 1..=n {
                for l in j + 1..=n {
                    let pm = p(j, l);
                    let rm = ParamMonomial::qij(i, k, -1);
                    out.push(MatrixRelation {
                        family: 'c',
                        indices: [i, j, k, l],
                        relator: &term(pm.clone().into(), a(i, l), a(k, j)) - &term(rm.clone().into(), a(k, j), a(i, l)),
                    });
                    let rq = &rm * &ParamMonomial::q(1);
                    let qp_inv = (&pm * &ParamMonomial::q(1)).inv();
                    let relator = &(&term(rq.into(), a(k, l), a(i, j)) - &term(qp_inv.into(), a(i, j), a(k, l)))
                        - &term(Coefficient::lambda(), a(i, l), a(k, j));
                    out.push(MatrixRelation { family: 'd', indices: [i, j, k, l], relator });
                }
            }
        }
    }
    out
}

/// The out-of-order word of a quadratic relator and the rule solving for it.
fn orient(rel: &NCPoly) -> RewriteRule {
    let (w, c) = rel.terms().find(|(w, _)| !w.is_normal()).expect("every relator has one out-of-order word");
    let [hi, lo] = *w.letters() else { unreachable!("matrix relations are quadratic") };
    let rest = rel - &NCPoly::monomial(c.clone(), w.clone());
    let inv = Coefficient::one().try_div(c).expect("monomial leading coefficient");
    RewriteRule::new(hi, lo, (-&rest).scale(&inv))
}

pub fn build_matrix_algebra(n: u32) -> Result<MatrixAlgebra, Error> {
    if n < 2 {
        return Err(Error::RankTooSmall(n));
    }
    let relations = matrix_relations(n);
    let rules = relations.iter().map(|r| orient(&r.relator)).collect();
    let alg = PresetAlgebra::new(format!("matrix(n={n})"), matrix_generators(n), rules)?;
    Ok(MatrixAlgebra { n, alg, relations })
}

fn check_indices(s: &IndexSet, n: u32) -> Result<(), Error> {
    match s.0.iter().find(|&&x| x < 1 || x > n) {
        Some(x) => Err(Error::BadIndexSet(format!("index {x} outside 1..={n}"))),
        None => Ok(()),
    }
}

/// All permutations of `0..m` with their signs.
fn signed_permutations(m: usize) -> Vec<(Vec<usize>, i64)> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                go(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut perms = Vec::new();
    go(&mut Vec::new(), &mut vec![false; m], &mut perms);
    perms
        .into_iter()
        .map(|p| {
            let inversions = (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).filter(|&(a, b)| p[a] > p[b]).count();
            let sign = if inversions % 2 == 0 { 1 } else { -1 };
            (p, sign)
        })
        .collect()
}

/// `sum_rho sign(rho) a_{i_rho(1) j_1} ... a_{i_rho(r) j_r}` exactly as
/// written (rows permuted, columns in order), not normal-ordered.
pub fn minor(rows: &IndexSet, cols: &IndexSet, m: &MatrixAlgebra) -> Result<NCPoly, Error> {
    if rows.len() != cols.len() {
        return Err(Error::BadIndexSet(format!("|I| = {} but |J| = {}", rows.len(), cols.len())));
    }
    check_indices(rows, m.n)?;
    check_indices(cols, m.n)?;
    let mut out = NCPoly::zero();
    for (perm, sign) in signed_permutations(rows.len()) {
        let letters = perm.iter().zip(&cols.0).map(|(&x, &c)| a(rows.0[x], c)).collect();
        out.add_term(Word::from_letters(letters), Coefficient::from_int(sign));
    }
    Ok(out)
}

/// `D_m = sum_rho sign(rho) a_{1 rho(1)} ... a_{m rho(m)}` as written
/// (columns permuted); `D_0 = 1`.
pub fn qdet(mm: u32, m: &MatrixAlgebra) -> Result<NCPoly, Error> {
    if mm > m.n {
        return Err(Error::BadIndexSet(format!("D_{mm} needs m <= n = {}", m.n)));
    }
    let mut out = NCPoly::zero();
    for (perm, sign) in signed_permutations(mm as usize) {
        let letters = perm.iter().enumerate().map(|(row, &x)| a(row as u32 + 1, x as u32 + 1)).collect();
        out.add_term(Word::from_letters(letters), Coefficient::from_int(sign));
    }
    Ok(out)
}

/// The algebra of `A (x) A`: entries `a_ij (x) 1` and `1 (x) a_ij` (written
/// `b_ij`), each copy with its own relations, the copies commuting.
pub fn tensor_square(m: &MatrixAlgebra) -> Result<PresetAlgebra, Error> {
    let to_b = |g: GenSymbol| match g {
        GenSymbol::A(i, j) => GenSymbol::B(i, j),
        other => other,
    };
    let mut rules = Vec::new();
    for r in m.alg.rules() {
        rules.push(r.clone());
        rules.push(RewriteRule::new(to_b(r.hi), to_b(r.lo), r.rhs.map_letters(to_b)));
    }
    let gens = matrix_generators(m.n);
    for &x in &gens {
        for &y in &gens {
            rules.push(RewriteRule::new(to_b(x), y, NCPoly::word(word2(y, to_b(x)))));
        }
    }
    let mut alphabet = gens.clone();
    alphabet.extend(gens.iter().map(|&g| to_b(g)));
    PresetAlgebra::new(format!("matrix(n={})^2", m.n), alphabet, rules)
}

/// `Delta(a_ij) = sum_k a_ik (x) a_kj`.
pub fn coproduct(g: GenSymbol, n: u32) -> NCPoly {
    match g {
        GenSymbol::A(i, j) => (1..=n).fold(NCPoly::zero(), |acc, k| {
            &acc + &NCPoly::word(word2(GenSymbol::A(i, k), GenSymbol::B(k, j)))
        }),
        other => NCPoly::generator(other),
    }
}

/// `epsilon(a_ij) = delta_ij`.
pub fn counit(g: GenSymbol) -> NCPoly {
    match g {
        GenSymbol::A(i, j) if i == j => NCPoly::one(),
        _ => NCPoly::zero(),
    }
}

/// Checks that `Delta` and `epsilon` kill every defining relator.
pub fn coproduct_check(n: u32) -> Result<Report, Error> {
    let m = build_matrix_algebra(n)?;
    let t = tensor_square(&m)?;
    let mut report = Report::new();
    for rel in &m.relations {
        let image = rel.relator.eval_hom(|g| coproduct(g, n));
        let residual = t.nf(&image);
        report.push(Check::new(
            format!("coproduct {}", rel.label()),
            Status::from_bool(residual.is_zero()),
            json!({ "residual": residual.to_json() }),
        ));
        let eps = rel.relator.eval_hom(counit);
        report.push(Check::new(
            format!("counit {}", rel.label()),
            Status::from_bool(eps.is_zero()),
            json!({ "value": eps.to_json() }),
        ));
    }
    Ok(report)
}

/// For each generator `g`, the scalar `mu` with `NF(x g) = mu NF(g x)`.
pub fn commutation_profile(x: &NCPoly, m: &MatrixAlgebra) -> Result<BTreeMap<GenSymbol, Option<Coefficient>>, Error> {
    let mut out = BTreeMap::new();
    for &g in m.alg.alphabet() {
        out.insert(g, q_factor(x, &NCPoly::generator(g), &m.alg)?);
    }
    Ok(out)
}

pub fn profile_json(profile: &BTreeMap<GenSymbol, Option<Coefficient>>) -> Value {
    Value::Object(
        profile
            .iter()
            .map(|(g, mu)| (g.to_string(), mu.as_ref().map_or(Value::Null, |c| Value::String(c.to_string()))))
            .collect(),
    )
}

/// Sorted-word image at the classical point, `None` if it does not exist.
fn classical_terms(p: &NCPoly) -> Option<Vec<Value>> {
    let image = p.classical_image(&BTreeMap::new()).ok()?;
    Some(image.iter().map(|(w, c)| json!({ "word": w.to_string(), "coef": c.to_string() })).collect())
}

/// Denominator-cleared Gauss identities at `n = 2`.
///
/// With `Y_21 = a_21 a_11^-1`, `D_11 = a_11`, `D_22 = D_2 a_11^-1`,
/// `Z_12 = a_11^-1 a_12`:
/// - `a_21 = Y_21 D_11`, cleared on the right by `a_11`, reads
///   `a_21 a_11 = a_21 a_11`;
/// - `a_22 = Y_21 D_11 Z_12 + D_22`, cleared on the right by `a_11` and
///   using `a_11^-1 a_12 a_11 = mu a_12` with `NF(a_12 a_11) = mu a_11 a_12`,
///   reads `a_22 a_11 = mu a_21 a_12 + D_2`.
pub fn gauss_residual_n2() -> Result<Report, Error> {
    let m = build_matrix_algebra(2)?;
    let mut report = Report::new();

    let lhs21 = NCPoly::word(word2(a(2, 1), a(1, 1)));
    let rhs21 = NCPoly::word(word2(a(2, 1), a(1, 1)));
    let r21 = m.alg.nf(&(&lhs21 - &rhs21));
    report.push(Check::new("gauss a21", Status::from_bool(r21.is_zero()), json!({ "residual": r21.to_json() })));

    let mu = q_factor(&a(1, 2).into(), &a(1, 1).into(), &m.alg)?.expect("a12 and a11 q-commute");
    let lhs22 = NCPoly::word(word2(a(2, 2), a(1, 1)));
    let rhs22 = &NCPoly::monomial(mu, word2(a(2, 1), a(1, 2))) + &qdet(2, &m)?;
    let r22 = m.alg.nf(&(&lhs22 - &rhs22));
    report.push(Check::new(
        "gauss a22 generic",
        Status::Recorded,
        json!({ "residual": r22.to_json(), "text": r22.to_string() }),
    ));
    let classical = classical_terms(&r22);
    report.push(Check::new(
        "gauss a22 classical",
        Status::from_bool(classical.as_ref().is_some_and(|t| t.is_empty())),
        json!({ "classical_residual": classical }),
    ));
    Ok(report)
}

/// Classical determinant of the generic matrix, as a commutative
/// polynomial in the sorted words.
pub fn classical_det(rows: &[u32], cols: &[u32]) -> BTreeMap<Word, BigRational> {
    let mut out: BTreeMap<Word, BigRational> = BTreeMap::new();
    for (perm, sign) in signed_permutations(rows.len()) {
        let w = Word::from_letters(perm.iter().zip(cols).map(|(&x, &c)| a(rows[x], c)).collect()).sorted();
        let e = out.entry(w).or_insert_with(BigRational::zero);
        *e += BigRational::from_integer(sign.into());
    }
    out.retain(|_, v| !v.is_zero());
    out
}

pub fn rule_count(m: &MatrixAlgebra) -> usize {
    m.alg.rules().len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_and_rule_counts() {
        let m2 = build_matrix_algebra(2).unwrap();
        assert_eq!(m2.alg.alphabet().len(), 4);
        assert_eq!(rule_count(&m2), 6);
        let m3 = build_matrix_algebra(3).unwrap();
        assert_eq!(m3.alg.alphabet().len(), 9);
        assert_eq!(rule_count(&m3), 36);
        assert_eq!(build_matrix_algebra(1).unwrap_err(), Error::RankTooSmall(1));
    }

    #[test]
    fn rule_a22_a11() {
        // solved by hand from family (d) with i=j=1, k=l=2
        let m = build_matrix_algebra(2).unwrap();
        let r = m.alg.rule(a(2, 2), a(1, 1)).unwrap();
        let tail = Coefficient::lambda().mul_monomial(&(ParamMonomial::qij(1, 2, 1) * ParamMonomial::q(-1)));
        let expected = &NCPoly::word(word2(a(1, 1), a(2, 2))) + &NCPoly::monomial(tail, word2(a(1, 2), a(2, 1)));
        assert_eq!(*r, expected);
    }

    #[test]
    fn relators_reduce_to_zero() {
        let m = build_matrix_algebra(3).unwrap();
        for rel in &m.relations {
            assert!(m.alg.nf(&rel.relator).is_zero(), "{}", rel.label());
        }
    }

    #[test]
    fn minors() {
        let m = build_matrix_algebra(3).unwrap();
        let r1 = minor(&IndexSet::new(vec![2]).unwrap(), &IndexSet::new(vec![1]).unwrap(), &m).unwrap();
        assert_eq!(r1, NCPoly::generator(a(2, 1)));
        let full = minor(&IndexSet::range(3), &IndexSet::range(3), &m).unwrap();
        assert_eq!(full.len(), 6);
        assert!(full.is_homogeneous(3));
        assert!(IndexSet::new(vec![2, 1]).is_err());
        assert!(minor(&IndexSet::range(2), &IndexSet::range(1), &m).is_err());
        assert!(minor(&IndexSet::new(vec![4]).unwrap(), &IndexSet::new(vec![1]).unwrap(), &m).is_err());
    }

    #[test]
    fn qdet_small() {
        let m = build_matrix_algebra(2).unwrap();
        assert_eq!(qdet(0, &m).unwrap(), NCPoly::one());
        assert_eq!(qdet(1, &m).unwrap(), NCPoly::generator(a(1, 1)));
        let d2 = qdet(2, &m).unwrap();
        let expected = &NCPoly::word(word2(a(1, 1), a(2, 2))) - &NCPoly::word(word2(a(1, 2), a(2, 1)));
        assert_eq!(d2, expected);
        assert!(qdet(3, &m).is_err());
    }

    #[test]
    fn permutation_signs() {
        let perms = signed_permutations(3);
        assert_eq!(perms.len(), 6);
        assert_eq!(perms.iter().map(|(_, s)| s).sum::<i64>(), 0);
    }

    #[test]
    fn profile_of_a11() {
        let m = build_matrix_algebra(2).unwrap();
        let prof = commutation_profile(&a(1, 1).into(), &m).unwrap();
        assert_eq!(prof[&a(1, 2)], Some(p(1, 2).into()));
        assert_eq!(prof[&a(1, 1)], Some(Coefficient::one()));
        let unit = commutation_profile(&NCPoly::one(), &m).unwrap();
        assert!(unit.values().all(|mu| mu.as_ref().is_some_and(Coefficient::is_one)));
    }
}
