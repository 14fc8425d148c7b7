//! The closed rank-3 action on `v_jnl = Y_21^j Y_31^n Y_32^l D_1^r1 D_2^r2`,
//! written out directly with no rewriting.
//!
//! `K_1` acts by `q^(j + (n - l - r1)/2)` and `K_2` by `q^(l + (n - j - r2)/2)`.
//! `P_i^1/2` and `Q_i^1/2` are diagonal with eigenvalues taken from the
//! rank-3 tables on single powers and on `D_1^r1`, `D_2^r2`.

use crate::coeff::{qbracket, Coefficient, ExponentForm, HalfInt, ParamMonomial, Substitution};
use crate::error::Error;

use super::{BasisVector, GenKind, GeneratorAction, ModuleElement, Operator};

type M = ParamMonomial;

fn int(k: u32) -> ExponentForm {
    ExponentForm::int(i64::from(k))
}

fn halved(e: ExponentForm) -> ExponentForm {
    e.checked_mul(&ExponentForm::constant(HalfInt::HALF)).expect("integral form")
}

/// `q_12 q_23 / q_13`.
fn a() -> M {
    M::qij(1, 2, 1) * M::qij(2, 3, 1) * M::qij(1, 3, -1)
}

fn sqrt(m: M) -> M {
    m.pow(&ExponentForm::constant(HalfInt::HALF))
}

/// Per-letter eigenvalues of `P_i^1/2` on `Y_21, Y_31, Y_32`.
fn p_letters(i: u32) -> [M; 3] {
    if i == 1 {
        [M::q(1), sqrt(M::q(2) * a().inv()), sqrt(a().inv())]
    } else {
        [sqrt(M::q(-2) * a()), sqrt(a()), M::q(1)]
    }
}

/// Per-letter eigenvalues of `Q_i^1/2` on `Y_21, Y_31, Y_32`.
fn q_letters(i: u32) -> [M; 3] {
    if i == 1 {
        [M::q(1), sqrt(a()), M::q(-1) * sqrt(a())]
    } else {
        [M::q(-1) * sqrt(M::q(2) * a().inv()), M::q(1) * sqrt(a().inv()), M::q(1)]
    }
}

/// Eigenvalues of `P_i^1/2` on `D_1^r1` and `D_2^r2`.
fn p_tail(i: u32, r1: &ExponentForm, r2: &ExponentForm) -> M {
    let h1 = halved(r1.scale(-1));
    let h2 = halved(r2.scale(-1));
    if i == 1 {
        (M::q(2) * M::qij(1, 2, -1)).pow(&h1) * (M::qij(1, 2, 1) * M::q(-1)).pow(r2)
    } else {
        (M::qij(1, 2, 1) * M::qij(1, 3, -1)).pow(&h1)
            * (M::qij(1, 2, 1) * M::qij(1, 3, -1) * M::q(2) * M::qij(2, 3, -1)).pow(&h2)
    }
}

/// Eigenvalues of `Q_i^1/2` on `D_1^r1` and `D_2^r2`.
fn q_tail(i: u32, r1: &ExponentForm, r2: &ExponentForm) -> M {
    let h1 = halved(r1.clone());
    let h2 = halved(r2.clone());
    if i == 1 {
        M::qij(1, 2, -&h1) * (M::q(1) * M::qij(1, 2, -1)).pow(r2)
    } else {
        (M::qij(1, 2, 1) * M::qij(1, 3, -1)).pow(&h1) * (M::qij(1, 2, 1) * M::qij(1, 3, -1) * M::qij(2, 3, -1)).pow(&h2)
    }
}

fn eigen(kind: GenKind, i: u32, e: [u32; 3], r1: &ExponentForm, r2: &ExponentForm) -> M {
    let [j, n, l] = e;
    let from_letters = |t: [M; 3]| t[0].pow_int(i64::from(j)) * t[1].pow_int(i64::from(n)) * t[2].pow_int(i64::from(l));
    match kind {
        GenKind::K => {
            let x = if i == 1 {
                &int(j) + &halved(&(&int(n) - &int(l)) - r1)
            } else {
                &int(l) + &halved(&(&int(n) - &int(j)) - r2)
            };
            M::q(x)
        }
        GenKind::Phalf => from_letters(p_letters(i)) * p_tail(i, r1, r2),
        GenKind::Qhalf => from_letters(q_letters(i)) * q_tail(i, r1, r2),
        GenKind::Kinv | GenKind::Pneghalf | GenKind::Qneghalf => eigen(kind.inverse().unwrap(), i, e, r1, r2).inv(),
        GenKind::Xplus | GenKind::Xminus => unreachable!("not diagonal"),
    }
}

fn c(m: M, bracket: ExponentForm) -> Coefficient {
    Coefficient::from(m) * qbracket(&bracket)
}

/// The closed action of `g` on one basis vector, symbolic parameters.
pub fn act_closed3(g: GeneratorAction, v: &BasisVector) -> Result<ModuleElement, Error> {
    if v.n != 3 {
        return Err(Error::RankNot3(v.n));
    }
    g.check(3)?;
    let [j, n, l] = [v.exps[0], v.exps[1], v.exps[2]];
    let (r1, r2) = (&v.weights[0], &v.weights[1]);
    let mut out = ModuleElement::zero_like(v);
    let i = g.i;
    let b = a().inv();
    match (g.kind, i) {
        (GenKind::Xplus, 1) => {
            let h = &(&int(j) + &int(n)) - &(&int(l) + r1);
            let m = M::q(-i64::from(l)) * M::qij(1, 2, 1) * a().pow(&halved(int(l + n)));
            out.add_term(vec![j + 1, n, l], c(m, h.clone()));
            if l > 0 {
                let e = &halved(&int(l) - &int(n)) - &ExponentForm::int(1);
                let m = M::q(h) * M::qij(1, 2, 1) * a().pow(&e);
                out.add_term(vec![j, n + 1, l - 1], c(m, int(l)));
            }
        }
        (GenKind::Xplus, _) => {
            if j > 0 {
                let qe = &(r2 - &ExponentForm::int(1)) - &int(n);
                let m = M::q(qe) * M::qij(1, 3, 1) * M::qij(1, 2, -1) * a().pow(&halved(int(j + l + n)));
                out.add_term(vec![j - 1, n + 1, l], -c(m, int(j)));
            }
            let m = M::q(-i64::from(j)) * M::qij(2, 3, 1) * a().pow(&halved(int(j + n)));
            out.add_term(vec![j, n, l + 1], -c(m, &int(l) - r2));
        }
        (GenKind::Xminus, 1) => {
            if j > 0 {
                let m = M::q(i64::from(l) + 1) * M::qij(1, 2, -1) * b.pow(&halved(int(l + n)));
                out.add_term(vec![j - 1, n, l], -c(m, int(j)));
            }
        }
        (GenKind::Xminus, _) => {
            if n > 0 {
                let m = M::q(i64::from(l)) * b.pow(&halved(&int(j + l) - &int(n)));
                out.add_term(vec![j + 1, n - 1, l], -c(m, int(n)));
            }
            if l > 0 {
                let m = M::q(i64::from(n) + 1) * M::qij(2, 3, -1) * b.pow(&halved(int(j + n)));
                out.add_term(vec![j, n, l - 1], -c(m, int(l)));
            }
        }
        (kind, _) => out.add_term(v.exps.clone(), eigen(kind, i, [j, n, l], r1, r2).into()),
    }
    Ok(out)
}

/// [`act_closed3`] as an [`Operator`], optionally followed by a parameter
/// substitution.
#[derive(Clone, Debug)]
pub struct Closed3 {
    sub: Substitution,
    name: String,
}

impl Closed3 {
    pub fn new(split: bool) -> Self {
        let sub = if split { Substitution::split3() } else { Substitution::new() };
        let name = format!("closed3{}", if split { "(split)" } else { "" });
        Closed3 { sub, name }
    }
}

impl Operator for Closed3 {
    fn rank(&self) -> u32 {
        3
    }

    fn name(&self) -> &str {
        &self.name
    }

    fn act_basis(&self, g: GeneratorAction, v: &BasisVector) -> Result<ModuleElement, Error> {
        Ok(act_closed3(g, v)?.map_coeffs(|c| c.substitute(&self.sub)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::coeff_eq;

    fn ga(kind: GenKind, i: u32) -> GeneratorAction {
        GeneratorAction::new(kind, i)
    }

    #[test]
    fn origin_values() {
        let v = BasisVector::v3(0, 0, 0);
        let r1 = ExponentForm::label(1);
        let x = act_closed3(ga(GenKind::Xplus, 1), &v).unwrap();
        let expected = Coefficient::from(M::qij(1, 2, 1)) * qbracket(&-&r1);
        assert_eq!(x.len(), 1);
        assert!(coeff_eq(&x.coeff(&[1, 0, 0]), &expected));
        let k = act_closed3(ga(GenKind::K, 1), &v).unwrap();
        assert_eq!(k.coeff(&[0, 0, 0]), Coefficient::from(M::q(halved(-&r1))));
        for i in 1..=2 {
            assert!(act_closed3(ga(GenKind::Xminus, i), &v).unwrap().is_zero());
        }
    }

    #[test]
    fn k2_eigenvalue() {
        let v = BasisVector::v3(1, 2, 3);
        let e = act_closed3(ga(GenKind::K, 2), &v).unwrap();
        // l + (n - j - r2)/2 = 3 + 1/2 - r2/2
        let x = ExponentForm::constant(HalfInt::from_doubled(7)).with_label(2, -HalfInt::HALF);
        assert_eq!(e.coeff(&[1, 2, 3]), Coefficient::from(M::q(x)));
    }

    #[test]
    fn inverses_cancel() {
        let v = BasisVector::v3(2, 1, 1);
        for kind in [GenKind::K, GenKind::Phalf, GenKind::Qhalf] {
            for i in 1..=2 {
                let a = act_closed3(ga(kind, i), &v).unwrap().coeff(&v.exps);
                let b = act_closed3(ga(kind.inverse().unwrap(), i), &v).unwrap().coeff(&v.exps);
                assert!((a * b).is_one());
            }
        }
    }

    #[test]
    fn rank_must_be_three() {
        let v = BasisVector::symbolic(4, vec![0; 6]).unwrap();
        assert_eq!(act_closed3(ga(GenKind::K, 1), &v).unwrap_err(), Error::RankNot3(4));
    }
}
