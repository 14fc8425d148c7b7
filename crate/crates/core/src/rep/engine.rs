//! Actions on single powers `Y_lj^k` and `D_j^r`, and their combination
//! over a product by the twisted Leibniz rule:
//!
//! ```text
//! K (ab)  = K(a) K(b)
//! X+(ab)  = X+(a) P^-1/2(b) + P^1/2(a) X+(b)
//! X-(ab)  = X-(a) Q^-1/2(b) + Q^1/2(a) X-(b)
//! ```
//!
//! A basis vector is factored as its Y-power blocks in row-major order
//! followed by `D_1^r1 ... D_n-1^r(n-1)`. The `D`-tail is kept implicit:
//! an emitted `Y` letter from a `D`-block is placed after the Y-part, and
//! the tail itself is never rewritten.

use crate::coeff::{qbracket, Coefficient, ExponentForm, HalfInt, ParamMonomial, Substitution};
use crate::error::Error;
use crate::ncpoly::{GenSymbol, NCPoly, Word};
use crate::yflag::{build_flag_algebra, FlagAlgebra};

use super::{q_is, BasisVector, GenKind, GeneratorAction, ModuleElement, Operator};

fn delta(a: u32, b: u32) -> i64 {
    i64::from(a == b)
}

fn half(k: &ExponentForm) -> ExponentForm {
    k.checked_mul(&ExponentForm::constant(HalfInt::HALF)).expect("halving an integral form")
}

fn y(l: u32, j: u32) -> GenSymbol {
    GenSymbol::Y(l, j)
}

/// `c_i = q_i,i+1^((k-1)/2) [k]_q`.
fn c(i: u32, k: &ExponentForm) -> Coefficient {
    let e = half(&(k - &ExponentForm::int(1)));
    Coefficient::from(ParamMonomial::qij(i, i + 1, e)) * qbracket(k)
}

/// `c~_i = q_i,i+1^((1-k)/2) [k]_q`.
fn c_tilde(i: u32, k: &ExponentForm) -> Coefficient {
    let e = half(&(&ExponentForm::int(1) - k));
    Coefficient::from(ParamMonomial::qij(i, i + 1, e)) * qbracket(k)
}

/// `delta_i+1,l - delta_i+1,j - delta_il + delta_ij`.
fn k_weight(i: u32, l: u32, j: u32) -> i64 {
    delta(i + 1, l) - delta(i + 1, j) - delta(i, l) + delta(i, j)
}

/// Eigenvalue of a diagonal generator on `Y_lj^k`.
fn diag_y(kind: GenKind, i: u32, l: u32, j: u32, k: &ExponentForm) -> ParamMonomial {
    let w = k.scale(k_weight(i, l, j));
    let kh = half(k);
    match kind {
        GenKind::K => ParamMonomial::q(half(&w)),
        GenKind::Phalf => q_is(i, l).pow(&-&kh) * q_is(i, j).pow(&kh),
        GenKind::Qhalf => ParamMonomial::q(w) * q_is(i, l).pow(&kh) * q_is(i, j).pow(&-&kh),
        GenKind::Kinv | GenKind::Pneghalf | GenKind::Qneghalf => {
            diag_y(kind.inverse().unwrap(), i, l, j, k).inv()
        }
        GenKind::Xplus | GenKind::Xminus => unreachable!("not diagonal"),
    }
}

/// Eigenvalue of a diagonal generator on `D_j^r`.
fn diag_d(kind: GenKind, i: u32, j: u32, r: &ExponentForm) -> ParamMonomial {
    let rh = half(r);
    let prod = |e: &ExponentForm| (1..=j).fold(ParamMonomial::one(), |acc, s| acc * q_is(i, s).pow(e));
    match kind {
        GenKind::K => ParamMonomial::q(-half(&r.scale(delta(i, j)))),
        GenKind::Phalf => prod(&-&rh),
        GenKind::Qhalf => ParamMonomial::q(-r.scale(delta(i, j))) * prod(&rh),
        GenKind::Kinv | GenKind::Pneghalf | GenKind::Qneghalf => diag_d(kind.inverse().unwrap(), i, j, r).inv(),
        GenKind::Xplus | GenKind::Xminus => unreachable!("not diagonal"),
    }
}

fn word(parts: &[(GenSymbol, u32)]) -> Word {
    let mut letters = Vec::new();
    for &(g, m) in parts {
        letters.extend(std::iter::repeat_n(g, m as usize));
    }
    Word::from_letters(letters)
}

fn term(c: Coefficient, parts: &[(GenSymbol, u32)]) -> NCPoly {
    NCPoly::monomial(c, word(parts))
}

/// The action of `g` on `Y_lj^k`, with words exactly as the single-power
/// formulas emit them (not normal ordered). `k = 0` is the action on 1.
pub fn act_power(g: GeneratorAction, yl: GenSymbol, k: u32, n: u32) -> Result<NCPoly, Error> {
    g.check(n)?;
    let GenSymbol::Y(l, j) = yl else {
        return Err(Error::BadGenerator(format!("{yl} is not a flag generator")));
    };
    if !yl.is_valid(n) {
        return Err(Error::BadGenerator(format!("{yl} at n = {n}")));
    }
    let i = g.i;
    if k == 0 {
        return Ok(if g.kind.is_diagonal() { NCPoly::one() } else { NCPoly::zero() });
    }
    let kf = ExponentForm::int(i64::from(k));
    let k1 = k - 1;
    let one = |m: ParamMonomial| Coefficient::from(m);
    Ok(match g.kind {
        GenKind::Xplus => {
            let mut out = NCPoly::zero();
            let base = ParamMonomial::q(1) * q_is(i, i + 1).pow(&ExponentForm::constant(-HalfInt::HALF));
            if l == i {
                let e = half(&ExponentForm::int(i64::from(k) - 2));
                let coef = -(one(base.clone() * q_is(i, j).pow(&e)) * c(i, &kf));
                out = &out + &term(coef, &[(y(l, j), k1), (y(l + 1, j), 1)]);
            }
            if j == i {
                let e = half(&ExponentForm::int(i64::from(k) - 2));
                let f = if l == j + 1 {
                    ParamMonomial::one()
                } else {
                    ParamMonomial::qij(j, j + 1, 1) * ParamMonomial::qij(j + 1, l, 1) * ParamMonomial::qij(j, l, -1)
                };
                let coef = one(base.clone() * q_is(i, l).pow(&e) * f) * c(i, &kf);
                out = &out + &term(coef, &[(y(j + 1, j), 1), (y(l, j), k)]);
            }
            if j == i + 1 {
                let m = base
                    * q_is(i, l).pow(&half(&kf))
                    * (ParamMonomial::qij(j - 1, j, 1) * ParamMonomial::q(-1)).pow_int(i64::from(k));
                let pre = one(m) * c_tilde(i, &kf);
                let inner = ParamMonomial::qij(j - 1, l, 1) * ParamMonomial::qij(j - 1, j, -1) * ParamMonomial::qij(j, l, -1);
                out = &out + &term(&pre * &one(inner), &[(y(l, j - 1), 1), (y(l, j), k1)]);
                out = &out - &term(pre, &[(y(j, j - 1), 1), (y(l, j), k)]);
            }
            out
        }
        GenKind::Xminus => {
            if l != i + 1 {
                return Ok(NCPoly::zero());
            }
            let m = ParamMonomial::q(-2 - i64::from(k) * delta(i, j))
                * q_is(i, i).pow(&ExponentForm::constant(HalfInt::HALF))
                * q_is(i, j).pow(&half(&kf));
            let coef = -(one(m) * c(i, &kf));
            if l - 1 == j {
                term(coef, &[(y(l, j), k1)])
            } else {
                term(coef, &[(y(l - 1, j), 1), (y(l, j), k1)])
            }
        }
        kind => term(one(diag_y(kind, i, l, j, &kf)), &[(y(l, j), k)]),
    })
}

/// The action of `g` on `D_j^r`. The result is the Y-part only; the
/// factor `D_j^r` itself is unchanged and left implicit.
pub fn act_dpower(g: GeneratorAction, j: u32, r: &ExponentForm, n: u32) -> Result<NCPoly, Error> {
    g.check(n)?;
    if j == 0 || j >= n {
        return Err(Error::BadIndex(format!("D[{j}] at n = {n}")));
    }
    let i = g.i;
    Ok(match g.kind {
        GenKind::Xminus => NCPoly::zero(),
        GenKind::Xplus => {
            if i != j {
                return Ok(NCPoly::zero());
            }
            let rh = half(r);
            let m = (1..j).fold(
                ParamMonomial::q(1) * q_is(i, i + 1).pow(&ExponentForm::constant(-HalfInt::HALF)),
                |acc, s| acc * q_is(i, s).pow(&rh),
            );
            let coef = -(Coefficient::from(m) * c_tilde(j, r));
            NCPoly::monomial(coef, Word::letter(y(j + 1, j)))
        }
        kind => NCPoly::constant(diag_d(kind, i, j, r).into()),
    })
}

#[derive(Clone, Debug, PartialEq)]
enum Block {
    Y(GenSymbol, u32),
    D(u32, ExponentForm),
}

/// The general-rank action: power formulas, twisted Leibniz rule, then
/// normal ordering in the flag algebra.
#[derive(Clone, Debug)]
pub struct Engine {
    n: u32,
    flag: FlagAlgebra,
    sub: Substitution,
    name: String,
}

impl Engine {
    pub fn new(n: u32, split: bool) -> Result<Self, Error> {
        let flag = build_flag_algebra(n, split)?;
        let sub = flag.substitution();
        let name = format!("engine(n={n}{})", if split { ",split" } else { "" });
        Ok(Engine { n, flag, sub, name })
    }

    pub fn flag(&self) -> &FlagAlgebra {
        &self.flag
    }

    pub fn substitution(&self) -> &Substitution {
        &self.sub
    }

    fn block_action(&self, g: GeneratorAction, b: &Block) -> Result<NCPoly, Error> {
        match b {
            Block::Y(s, k) => act_power(g, *s, *k, self.n),
            Block::D(j, r) => act_dpower(g, *j, r, self.n),
        }
    }

    /// The Leibniz expansion over `blocks`, before substitution and
    /// normal ordering.
    fn act_blocks(&self, g: GeneratorAction, blocks: &[Block]) -> Result<NCPoly, Error> {
        g.check(self.n)?;
        if g.kind.is_diagonal() {
            let mut out = NCPoly::one();
            for b in blocks {
                out = &out * &self.block_action(g, b)?;
            }
            return Ok(out);
        }
        let (left, right) = match g.kind {
            GenKind::Xplus => (GenKind::Phalf, GenKind::Pneghalf),
            _ => (GenKind::Qhalf, GenKind::Qneghalf),
        };
        let lefts = blocks
            .iter()
            .map(|b| self.block_action(GeneratorAction::new(left, g.i), b))
            .collect::<Result<Vec<_>, _>>()?;
        let rights = blocks
            .iter()
            .map(|b| self.block_action(GeneratorAction::new(right, g.i), b))
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = NCPoly::zero();
        for t in 0..blocks.len() {
            let mid = self.block_action(g, &blocks[t])?;
            if mid.is_zero() {
                continue;
            }
            let mut p = NCPoly::one();
            for l in &lefts[..t] {
                p = &p * l;
            }
            p = &p * &mid;
            for r in &rights[t + 1..] {
                p = &p * r;
            }
            out = &out + &p;
        }
        Ok(out)
    }

    fn finish(&self, p: NCPoly) -> NCPoly {
        self.flag.alg.nf(&p.map_coeffs(|c| c.substitute(&self.sub)))
    }

    fn check_word(&self, w: &Word) -> Result<(), Error> {
        match w.letters().iter().find(|g| !self.flag.alg.contains(**g)) {
            Some(g) => Err(Error::UnknownGenerator(*g)),
            None => Ok(()),
        }
    }

    /// `g` applied to a polynomial in the flag generators with no `D`-tail:
    /// the input is normal ordered first, then each normal word is split
    /// into its power blocks.
    pub fn act_poly(&self, g: GeneratorAction, p: &NCPoly) -> Result<NCPoly, Error> {
        let p = self.flag.alg.normal_form(p)?;
        let mut out = NCPoly::zero();
        for (w, c) in p.terms() {
            let mut blocks: Vec<Block> = Vec::new();
            for &s in w.letters() {
                match blocks.last_mut() {
                    Some(Block::Y(t, k)) if *t == s => *k += 1,
                    _ => blocks.push(Block::Y(s, 1)),
                }
            }
            out = &out + &self.act_blocks(g, &blocks)?.scale(c);
        }
        Ok(self.finish(out))
    }

    /// `g` applied to a word letter by letter with the single-generator
    /// formulas, normal ordering only at the end.
    pub fn leibniz_on_word(&self, g: GeneratorAction, w: &Word) -> Result<NCPoly, Error> {
        self.check_word(w)?;
        let blocks: Vec<Block> = w.letters().iter().map(|&s| Block::Y(s, 1)).collect();
        Ok(self.finish(self.act_blocks(g, &blocks)?))
    }

    /// [`leibniz_on_word`](Self::leibniz_on_word) extended linearly.
    pub fn leibniz_on_poly(&self, g: GeneratorAction, p: &NCPoly) -> Result<NCPoly, Error> {
        let mut out = NCPoly::zero();
        for (w, c) in p.terms() {
            self.check_word(w)?;
            let blocks: Vec<Block> = w.letters().iter().map(|&s| Block::Y(s, 1)).collect();
            out = &out + &self.act_blocks(g, &blocks)?.scale(c);
        }
        Ok(self.finish(out))
    }
}

impl Operator for Engine {
    fn rank(&self) -> u32 {
        self.n
    }

    fn name(&self) -> &str {
        &self.name
    }

    fn act_basis(&self, g: GeneratorAction, v: &BasisVector) -> Result<ModuleElement, Error> {
        if v.n != self.n {
            return Err(Error::BadIndex(format!("basis vector of rank {} for an engine of rank {}", v.n, self.n)));
        }
        let gens = crate::yflag::flag_generators(self.n);
        let mut blocks: Vec<Block> =
            gens.iter().zip(&v.exps).filter(|(_, &m)| m > 0).map(|(&s, &m)| Block::Y(s, m)).collect();
        blocks.extend(v.weights.iter().enumerate().map(|(j, r)| Block::D(j as u32 + 1, r.clone())));
        let p = self.finish(self.act_blocks(g, &blocks)?);
        Ok(ModuleElement::from_normal_poly(v, &p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{coeff_eq, qint};

    fn ga(kind: GenKind, i: u32) -> GeneratorAction {
        GeneratorAction::new(kind, i)
    }

    fn m(c: ParamMonomial) -> Coefficient {
        c.into()
    }

    #[test]
    fn k_on_y21_power() {
        for k in 0..4u32 {
            let p = act_power(ga(GenKind::K, 1), y(2, 1), k, 3).unwrap();
            assert_eq!(p, NCPoly::monomial(m(ParamMonomial::q(i64::from(k))), Word::power(y(2, 1), k as usize)));
        }
    }

    #[test]
    fn x_minus_on_y21() {
        let p = act_power(ga(GenKind::Xminus, 1), y(2, 1), 1, 3).unwrap();
        let c = -m(ParamMonomial::q(-1) * ParamMonomial::qij(1, 2, -1));
        assert_eq!(p, NCPoly::constant(c));
    }

    #[test]
    fn x_plus_2_kills_y31() {
        for k in 0..4 {
            assert!(act_power(ga(GenKind::Xplus, 2), y(3, 1), k, 3).unwrap().is_zero());
        }
    }

    #[test]
    fn x_plus_1_on_y21_power() {
        for k in 1..4u32 {
            let p = act_power(ga(GenKind::Xplus, 1), y(2, 1), k, 3).unwrap();
            let c = m(ParamMonomial::q(1) * ParamMonomial::qij(1, 2, 1)) * qint(i64::from(k));
            assert_eq!(p, NCPoly::monomial(c, Word::power(y(2, 1), k as usize + 1)));
        }
    }

    #[test]
    fn x_minus_2_on_y32_power() {
        for k in 1..4u32 {
            let p = act_power(ga(GenKind::Xminus, 2), y(3, 2), k, 3).unwrap();
            let c = -(m(ParamMonomial::q(-1) * ParamMonomial::qij(2, 3, -1)) * qint(i64::from(k)));
            assert_eq!(p, NCPoly::monomial(c, Word::power(y(3, 2), k as usize - 1)));
        }
    }

    #[test]
    fn p_half_on_y21_is_q_power() {
        for k in 0..4u32 {
            let p = act_power(ga(GenKind::Phalf, 1), y(2, 1), k, 3).unwrap();
            assert_eq!(p, NCPoly::monomial(m(ParamMonomial::q(i64::from(k))), Word::power(y(2, 1), k as usize)));
            let p = act_power(ga(GenKind::Qhalf, 1), y(2, 1), k, 3).unwrap();
            assert_eq!(p, NCPoly::monomial(m(ParamMonomial::q(i64::from(k))), Word::power(y(2, 1), k as usize)));
        }
    }

    #[test]
    fn d_power_actions() {
        let r = ExponentForm::label(1);
        assert!(act_dpower(ga(GenKind::Xminus, 1), 1, &r, 3).unwrap().is_zero());
        let k = act_dpower(ga(GenKind::K, 1), 1, &r, 3).unwrap();
        assert_eq!(k, NCPoly::constant(m(ParamMonomial::q(-half(&r)))));
        let k = act_dpower(ga(GenKind::K, 2), 1, &r, 3).unwrap();
        assert_eq!(k, NCPoly::one());
        let p = act_dpower(ga(GenKind::Phalf, 1), 1, &r, 3).unwrap();
        assert_eq!(p, NCPoly::constant(m(q_is(1, 1).pow(&-half(&r)))));
        assert_eq!(act_dpower(ga(GenKind::K, 1), 3, &r, 3).unwrap_err(), Error::BadIndex("D[3] at n = 3".into()));
    }

    #[test]
    fn origin_actions() {
        let e = Engine::new(3, false).unwrap();
        let v = BasisVector::v3(0, 0, 0);
        let k1 = e.act_basis(ga(GenKind::K, 1), &v).unwrap();
        let r1 = ExponentForm::label(1);
        assert_eq!(k1.coeff(&[0, 0, 0]), m(ParamMonomial::q(-half(&r1))));
        for i in 1..=2 {
            assert!(e.act_basis(ga(GenKind::Xminus, i), &v).unwrap().is_zero());
        }
        // -q q12^(1 - r1/2) (q/q12)^r2 [r1] v100
        let x = e.act_basis(ga(GenKind::Xplus, 1), &v).unwrap();
        let r2 = ExponentForm::label(2);
        let mono = ParamMonomial::q(&ExponentForm::int(1) + &r2)
            * ParamMonomial::qij(1, 2, &(&ExponentForm::int(1) - &half(&r1)) - &r2);
        let expected = -(m(mono) * qbracket(&r1));
        assert_eq!(x.len(), 1);
        assert!(coeff_eq(&x.coeff(&[1, 0, 0]), &expected));
    }

    #[test]
    fn bad_generators() {
        assert!(act_power(ga(GenKind::K, 3), y(2, 1), 1, 3).is_err());
        assert!(act_power(ga(GenKind::K, 1), y(1, 2), 1, 3).is_err());
        assert!(act_power(ga(GenKind::K, 1), GenSymbol::A(1, 2), 1, 3).is_err());
    }
}
