//! The quantum flag algebra on the lower-triangular coordinates `Y_ij`,
//! `i > j`.
//!
//! For `1 <= i < j < k < l <= n` the defining relations are
//!
//! ```text
//! (a) Y_kj Y_ki = (q_ij q_jk / q_ik) Y_ki Y_kj
//! (b) Y_ki Y_ji = (q_ij q_jk / q_ik) Y_ji Y_ki
//! (c) Y_kj Y_ji = (p_ij p_jk / p_ik) Y_ji Y_kj + q^-1 lambda Y_ki
//! (d) Y_li Y_kj = (q_ik q_kl / (q_ij q_jl)) Y_kj Y_li
//! (e) (q_jl / (q_jk q_kl)) Y_lj Y_ki = (p_ij p_jl / p_il) Y_ki Y_lj + q^-1 lambda Y_kj Y_li
//! (f) Y_lk Y_ji = (q_ik q_jl / (q_il q_jk)) Y_ji Y_lk
//! ```
//!
//! with `p_ij = q_ij / q^2`. Each relation is oriented into a rule that
//! moves the larger generator (row-major order) to the right.

use serde_json::{json, Value};

use crate::coeff::{shorthand::p, Coefficient, ParamMonomial, Substitution};
use crate::error::Error;
use crate::ncpoly::{GenSymbol, NCPoly, PresetAlgebra, RewriteRule, Word};
use crate::report::{Check, Report, Status};

/// One instantiated defining relation `lhs = rhs`, as printed.
#[derive(Clone, Debug, PartialEq)]
pub struct FlagRelation {
    pub family: char,
    pub indices: Vec<u32>,
    pub lhs: NCPoly,
    pub rhs: NCPoly,
}

impl FlagRelation {
    pub fn label(&self) -> String {
        let idx: Vec<String> = self.indices.iter().map(u32::to_string).collect();
        format!("({})[{}]", self.family, idx.join(","))
    }
}

#[derive(Clone, Debug)]
pub struct FlagAlgebra {
    pub n: u32,
    pub split: bool,
    pub alg: PresetAlgebra,
    pub relations: Vec<FlagRelation>,
}

fn y(i: u32, j: u32) -> GenSymbol {
    GenSymbol::Y(i, j)
}

fn qij(i: u32, j: u32) -> ParamMonomial {
    ParamMonomial::qij(i, j, 1)
}

fn prod(c: ParamMonomial, a: GenSymbol, b: GenSymbol) -> NCPoly {
    NCPoly::monomial(c.into(), Word::from_letters(vec![a, b]))
}

/// `q^-1 lambda`.
fn tail_coeff() -> Coefficient {
    Coefficient::lambda().mul_monomial(&ParamMonomial::q(-1))
}

/// The flag generators of rank `n` in increasing order.
pub fn flag_generators(n: u32) -> Vec<GenSymbol> {
    let mut v = Vec::new();
    for i in 2..=n {
        for j in 1..i {
            v.push(y(i, j));
        }
    }
    v
}

/// All relations of families (a)-(f) at rank `n`, before any substitution.
pub fn flag_relations(n: u32) -> Vec<FlagRelation> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                let c = qij(i, j) * qij(j, k) * qij(i, k).inv();
                out.push(FlagRelation {
                    family: 'a',
                    indices: vec![i, j, k],
                    lhs: prod(ParamMonomial::one(), y(k, j), y(k, i)),
                    rhs: prod(c.clone(), y(k, i), y(k, j)),
                });
                out.push(FlagRelation {
                    family: 'b',
                    indices: vec![i, j, k],
                    lhs: prod(ParamMonomial::one(), y(k, i), y(j, i)),
                    rhs: prod(c, y(j, i), y(k, i)),
                });
                let pc = p(i, j) * p(j, k) * p(i, k).inv();
                out.push(FlagRelation {
                    family: 'c',
                    indices: vec![i, j, k],
                    lhs: prod(ParamMonomial::one(), y(k, j), y(j, i)),
                    rhs: &prod(pc, y(j, i), y(k, j)) + &NCPoly::monomial(tail_coeff(), Word::letter(y(k, i))),
                });
                for l in k + 1..=n {
                    out.push(FlagRelation {
                        family: 'd',
                        indices: vec![i, j, k, l],
                        lhs: prod(ParamMonomial::one(), y(l, i), y(k, j)),
                        rhs: prod(qij(i, k) * qij(k, l) * (qij(i, j) * qij(j, l)).inv(), y(k, j), y(l, i)),
                    });
                    let tail = NCPoly::monomial(tail_coeff(), Word::from_letters(vec![y(k, j), y(l, i)]));
                    out.push(FlagRelation {
                        family: 'e',
                        indices: vec![i, j, k, l],
                        lhs: prod(qij(j, l) * (qij(j, k) * qij(k, l)).inv(), y(l, j), y(k, i)),
                        rhs: &prod(p(i, j) * p(j, l) * p(i, l).inv(), y(k, i), y(l, j)) + &tail,
                    });
                    out.push(FlagRelation {
                        family: 'f',
                        indices: vec![i, j, k, l],
                        lhs: prod(ParamMonomial::one(), y(l, k), y(j, i)),
                        rhs: prod(qij(i, k) * qij(j, l) * (qij(i, l) * qij(j, k)).inv(), y(j, i), y(l, k)),
                    });
                }
            }
        }
    }
    out
}

/// Solves `c * hi lo = rhs` for `hi lo`.
fn orient(rel: &FlagRelation) -> Result<RewriteRule, Error> {
    let (w, c) = rel.lhs.terms().next().expect("relations have a nonzero left side");
    let [hi, lo] = *w.letters() else { unreachable!("flag relations are quadratic") };
    let inv = Coefficient::one().try_div(c).expect("left coefficients are monomials");
    Ok(RewriteRule::new(hi, lo, rel.rhs.scale(&inv)))
}

pub fn build_flag_algebra(n: u32, split: bool) -> Result<FlagAlgebra, Error> {
    if n < 2 {
        return Err(Error::RankTooSmall(n));
    }
    if split && n != 3 {
        return Err(Error::SplitUndefined(n));
    }
    let sub = if split { Substitution::split3() } else { Substitution::new() };
    let relations: Vec<FlagRelation> = flag_relations(n)
        .into_iter()
        .map(|r| FlagRelation {
            lhs: r.lhs.map_coeffs(|c| c.substitute(&sub)),
            rhs: r.rhs.map_coeffs(|c| c.substitute(&sub)),
            ..r
        })
        .collect();
    let rules = relations.iter().map(orient).collect::<Result<Vec<_>, _>>()?;
    let name = format!("flag(n={n}{})", if split { ",split" } else { "" });
    let alg = PresetAlgebra::new(name, flag_generators(n), rules)?;
    Ok(FlagAlgebra { n, split, alg, relations })
}

impl FlagAlgebra {
    /// The substitution applied to every coefficient of this algebra.
    pub fn substitution(&self) -> Substitution {
        if self.split {
            Substitution::split3()
        } else {
            Substitution::new()
        }
    }

    pub fn normal_form(&self, p: &NCPoly) -> Result<NCPoly, Error> {
        self.alg.normal_form(p)
    }
}

/// `NF(lhs - rhs)` for every instantiated relation.
pub fn relation_residuals(f: &FlagAlgebra) -> Report {
    let mut report = Report::new();
    for rel in &f.relations {
        let residual = f.alg.nf(&(&rel.lhs - &rel.rhs));
        let status = Status::from_bool(residual.is_zero());
        report.push(Check::new(
            format!("relation {}", rel.label()),
            status,
            json!({ "lhs": rel.lhs.to_string(), "rhs": rel.rhs.to_string(), "residual": residual.to_json() }),
        ));
    }
    report
}

pub fn rules_json(alg: &PresetAlgebra) -> Value {
    Value::Array(
        alg.rules()
            .iter()
            .map(|r| json!({ "lhs": r.lhs_word().to_string(), "rhs": r.rhs.to_json(), "text": r.rhs.to_string() }))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(a: GenSymbol, b: GenSymbol) -> Word {
        Word::from_letters(vec![a, b])
    }

    #[test]
    fn rank_three_rules() {
        let f = build_flag_algebra(3, false).unwrap();
        assert_eq!(f.alg.alphabet().len(), 3);
        let r = f.alg.rule(y(3, 2), y(3, 1)).unwrap();
        let c: Coefficient = (qij(1, 2) * qij(2, 3) * qij(1, 3).inv()).into();
        assert_eq!(*r, NCPoly::monomial(c, w(y(3, 1), y(3, 2))));

        let r = f.alg.rule(y(3, 2), y(2, 1)).unwrap();
        let c: Coefficient = (qij(1, 2) * qij(2, 3) * (ParamMonomial::q(2) * qij(1, 3)).inv()).into();
        let expected = &NCPoly::monomial(c, w(y(2, 1), y(3, 2))) + &NCPoly::monomial(tail_coeff(), Word::letter(y(3, 1)));
        assert_eq!(*r, expected);
    }

    #[test]
    fn rank_two_has_no_rules() {
        let f = build_flag_algebra(2, false).unwrap();
        assert_eq!(f.alg.alphabet(), &[y(2, 1)]);
        assert!(f.alg.rules().is_empty());
        assert!(relation_residuals(&f).checks.is_empty());
    }

    #[test]
    fn errors() {
        assert_eq!(build_flag_algebra(1, false).unwrap_err(), Error::RankTooSmall(1));
        assert_eq!(build_flag_algebra(4, true).unwrap_err(), Error::SplitUndefined(4));
    }

    #[test]
    fn relation_counts() {
        // one relation per unordered pair of generators
        for n in 2..=5u32 {
            let g = n * (n - 1) / 2;
            assert_eq!(flag_relations(n).len() as u32, g * (g - 1) / 2);
        }
    }

    #[test]
    fn family_e_tail_is_normal() {
        for rel in flag_relations(5).iter().filter(|r| r.family == 'e') {
            assert!(rel.rhs.terms().all(|(w, _)| w.is_normal()));
        }
    }

    #[test]
    fn residuals_vanish() {
        for n in 3..=4 {
            let f = build_flag_algebra(n, false).unwrap();
            assert!(relation_residuals(&f).all_pass());
        }
        let f = build_flag_algebra(3, true).unwrap();
        assert!(relation_residuals(&f).all_pass());
    }
}
