//! Text syntax for coefficients and noncommutative polynomials.
//!
//! ```text
//! expr    := ['+'|'-'] term (('+'|'-') term)*
//! term    := power ('*'? power)*          juxtaposition multiplies
//! power   := atom ('^' exponent)?
//! atom    := number ['/' number] | 'q' | 'qIJ' | 'qI_J' | 'zI' | 'lam'
//!          | ('a'|'b'|'Y') '[' int ',' int ']' | 'D' '[' int ']' | '(' expr ')'
//! exponent:= ['-'] int | '(' affine ')'
//! affine  := ['+'|'-'] aterm (('+'|'-') aterm)*
//! aterm   := number ['/' number] ['*' 'rI'] | 'rI'
//! ```
//!
//! `zI` is `q^rI`. Parameter powers take any half-integer affine exponent;
//! `lam` takes any integer; generators and compound bases take
//! nonnegative integers only. Everything printed by this crate parses back
//! to an equal value.

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use thiserror::Error;

use crate::coeff::{CoeffError, Coefficient, ExponentForm, HalfInt, ParamMonomial, ParamSymbol};
use crate::ncpoly::{GenSymbol, NCPoly, PresetAlgebra, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("generator {0} is not in the algebra")]
    UnknownGenerator(GenSymbol),
    #[error("negative power of generator {gen} at {pos}")]
    NegativeGeneratorPower { pos: usize, gen: String },
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    End,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Num(src[start..i].parse().expect("digits"))));
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBrack,
            b']' => Tok::RBrack,
            b',' => Tok::Comma,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            _ => {
                let ch = src[i..].chars().next().unwrap();
                return Err(ParseError::Syntax { pos: i, msg: format!("unexpected character {ch:?}") });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

enum Exponent {
    Int(i64),
    Affine(ExponentForm),
}

/// What a parsed factor is, for deciding which powers are legal.
enum Factor {
    Generator(GenSymbol),
    Param(ParamMonomial),
    Lambda,
    Other(NCPoly),
}

impl Factor {
    fn into_poly(self) -> NCPoly {
        match self {
            Factor::Generator(g) => NCPoly::generator(g),
            Factor::Param(m) => NCPoly::constant(m.into()),
            Factor::Lambda => NCPoly::constant(Coefficient::lambda()),
            Factor::Other(p) => p,
        }
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    ctx: Option<&'a PresetAlgebra>,
    allow_generators: bool,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn uint(&mut self) -> Result<u32, ParseError> {
        match self.bump() {
            Tok::Num(n) => n.to_u32().map_or_else(|| self.err("index too large"), Ok),
            _ => {
                self.at -= 1;
                self.err("expected an index")
            }
        }
    }

    fn expr(&mut self) -> Result<NCPoly, ParseError> {
        let mut acc = match self.peek() {
            Tok::Minus => {
                self.bump();
                -self.term()?
            }
            Tok::Plus => {
                self.bump();
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<NCPoly, ParseError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.power()?;
                }
                Tok::Num(_) | Tok::Ident(_) | Tok::LParen => acc = &acc * &self.power()?,
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<NCPoly, ParseError> {
        let start = self.pos();
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base.into_poly());
        }
        self.bump();
        let epos = self.pos();
        let e = self.exponent()?;
        let int = match &e {
            Exponent::Int(k) => Some(*k),
            Exponent::Affine(f) => f.as_constant().and_then(HalfInt::to_integer),
        };
        match base {
            Factor::Param(m) => {
                let f = match e {
                    Exponent::Int(k) => ExponentForm::int(k),
                    Exponent::Affine(f) => f,
                };
                match m.checked_pow(&f) {
                    Some(p) => Ok(NCPoly::constant(p.into())),
                    None => Err(ParseError::Syntax { pos: epos, msg: format!("exponent {f} leaves the half-integer lattice") }),
                }
            }
            Factor::Lambda => match int {
                Some(k) if k >= 0 => Ok(NCPoly::constant(Coefficient::lambda().pow(k as u32))),
                Some(k) => Ok(NCPoly::constant(Coefficient::inv_lambda_pow((-k) as u32))),
                None => Err(ParseError::Syntax { pos: epos, msg: "lam takes integer powers only".into() }),
            },
            Factor::Generator(g) => match int {
                Some(k) if k >= 0 => Ok(NCPoly::word(Word::power(g, k as usize))),
                Some(_) => Err(ParseError::NegativeGeneratorPower { pos: start, gen: g.to_string() }),
                None => Err(ParseError::Syntax { pos: epos, msg: "generator powers must be integers".into() }),
            },
            Factor::Other(p) => match int {
                Some(k) if k >= 0 => Ok(p.pow(k as u32)),
                Some(k) => {
                    if p.letters().next().is_some() {
                        return Err(ParseError::NegativeGeneratorPower { pos: start, gen: p.to_string() });
                    }
                    let c = p.coeff(&Word::one());
                    match Coefficient::one().try_div(&c) {
                        Some(inv) => Ok(NCPoly::constant(inv.pow((-k) as u32))),
                        None => Err(ParseError::Syntax { pos: epos, msg: "only single terms can be inverted".into() }),
                    }
                }
                None => Err(ParseError::Syntax { pos: epos, msg: "compound bases take integer powers only".into() }),
            },
        }
    }

    fn exponent(&mut self) -> Result<Exponent, ParseError> {
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                match self.bump() {
                    Tok::Num(n) => Ok(Exponent::Int(-self.small(&n)?)),
                    _ => self.err("expected an integer exponent"),
                }
            }
            Tok::Num(n) => {
                self.bump();
                Ok(Exponent::Int(self.small(&n)?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.affine()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Exponent::Affine(f))
            }
            _ => self.err("expected an exponent"),
        }
    }

    fn small(&self, n: &BigInt) -> Result<i64, ParseError> {
        n.to_i64().map_or_else(|| self.err("number too large"), Ok)
    }

    fn label(&self, s: &str) -> Option<u32> {
        s.strip_prefix('r').and_then(|d| d.parse().ok()).filter(|&i| i > 0)
    }

    fn half(&self, r: &BigRational) -> Result<HalfInt, ParseError> {
        HalfInt::from_rational(r).map_or_else(|| self.err(format!("{r} is not a half-integer")), Ok)
    }

    fn affine(&mut self) -> Result<ExponentForm, ParseError> {
        let mut acc = ExponentForm::zero();
        let mut first = true;
        loop {
            let sign = match self.peek() {
                Tok::Plus => {
                    self.bump();
                    1
                }
                Tok::Minus => {
                    self.bump();
                    -1
                }
                _ if first => 1,
                _ => return Ok(acc),
            };
            first = false;
            let t = self.aterm()?;
            acc = if sign < 0 { &acc - &t } else { &acc + &t };
        }
    }

    fn aterm(&mut self) -> Result<ExponentForm, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => match self.label(&s) {
                Some(i) => {
                    self.bump();
                    Ok(ExponentForm::label(i))
                }
                None => self.err(format!("unknown exponent symbol {s:?}")),
            },
            Tok::Num(_) => {
                let r = self.rational()?;
                let a = self.half(&r)?;
                if *self.peek() == Tok::Star {
                    self.bump();
                    match self.bump() {
                        Tok::Ident(s) if self.label(&s).is_some() => Ok(ExponentForm::zero().with_label(self.label(&s).unwrap(), a)),
                        _ => {
                            self.at -= 1;
                            self.err("expected a weight label rI")
                        }
                    }
                } else {
                    Ok(ExponentForm::constant(a))
                }
            }
            _ => self.err("expected an exponent term"),
        }
    }

    fn rational(&mut self) -> Result<BigRational, ParseError> {
        let Tok::Num(a) = self.bump() else { unreachable!("called on a number") };
        if *self.peek() != Tok::Slash {
            return Ok(BigRational::from_integer(a));
        }
        self.bump();
        match self.bump() {
            Tok::Num(b) if !b.is_zero() => Ok(BigRational::new(a, b)),
            Tok::Num(_) => {
                self.at -= 1;
                self.err("division by zero")
            }
            _ => {
                self.at -= 1;
                self.err("expected a denominator")
            }
        }
    }

    fn generator(&mut self, name: &str, pos: usize) -> Result<GenSymbol, ParseError> {
        self.expect(Tok::LBrack, "'['")?;
        let i = self.uint()?;
        let g = if name == "D" {
            GenSymbol::D(i)
        } else {
            self.expect(Tok::Comma, "','")?;
            let j = self.uint()?;
            match name {
                "a" => GenSymbol::A(i, j),
                "b" => GenSymbol::B(i, j),
                _ => GenSymbol::Y(i, j),
            }
        };
        self.expect(Tok::RBrack, "']'")?;
        if !self.allow_generators {
            return Err(ParseError::Syntax { pos, msg: "generators are not allowed in a coefficient".into() });
        }
        let ok = match self.ctx {
            Some(alg) => alg.contains(g),
            None => g.is_valid(u32::MAX),
        };
        if !ok {
            return Err(ParseError::UnknownGenerator(g));
        }
        Ok(g)
    }

    fn atom(&mut self) -> Result<Factor, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(_) => {
                self.at -= 1;
                let r = self.rational()?;
                Ok(Factor::Other(NCPoly::constant(Coefficient::from_rational(r))))
            }
            Tok::LParen => {
                let p = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                let single = p.len() == 1 && p.letters().next().is_none();
                if single {
                    let c = p.coeff(&Word::one());
                    if let Some((a, m)) = c.as_term() {
                        if a.is_one() && c.lambda_pow() == 0 {
                            return Ok(Factor::Param(m.clone()));
                        }
                    }
                }
                Ok(Factor::Other(p))
            }
            Tok::Ident(s) => {
                if matches!(s.as_str(), "a" | "b" | "Y" | "D") && *self.peek() == Tok::LBrack {
                    return Ok(Factor::Generator(self.generator(&s, pos)?));
                }
                if s == "lam" {
                    return Ok(Factor::Lambda);
                }
                if let Some(p) = ParamSymbol::parse_name(&s) {
                    return Ok(Factor::Param(ParamMonomial::symbol(p)));
                }
                if let Some(i) = s.strip_prefix('z').and_then(|d| d.parse::<u32>().ok()).filter(|&i| i > 0) {
                    return Ok(Factor::Param(ParamMonomial::q(ExponentForm::label(i))));
                }
                Err(ParseError::Syntax { pos, msg: format!("unknown symbol {s:?}") })
            }
            Tok::End => Err(ParseError::Syntax { pos, msg: "unexpected end of input".into() }),
            t => Err(ParseError::Syntax { pos, msg: format!("unexpected {}", describe(&t)) }),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Num(_) => "number",
        Tok::Ident(_) => "name",
        Tok::LParen => "'('",
        Tok::RParen => "')'",
        Tok::LBrack => "'['",
        Tok::RBrack => "']'",
        Tok::Comma => "','",
        Tok::Plus => "'+'",
        Tok::Minus => "'-'",
        Tok::Star => "'*'",
        Tok::Slash => "'/'",
        Tok::Caret => "'^'",
        Tok::End => "end of input",
    }
}

fn run(src: &str, ctx: Option<&PresetAlgebra>, allow_generators: bool) -> Result<NCPoly, ParseError> {
    let mut p = Parser { toks: lex(src)?, at: 0, ctx, allow_generators };
    let out = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err(format!("unexpected {}", describe(p.peek())));
    }
    Ok(out)
}

/// Parses a polynomial whose generators must belong to `ctx`.
pub fn parse_expr(src: &str, ctx: &PresetAlgebra) -> Result<NCPoly, ParseError> {
    run(src, Some(ctx), true)
}

/// Parses a polynomial over any well-formed generators.
pub fn parse_poly(src: &str) -> Result<NCPoly, ParseError> {
    run(src, None, true)
}

pub fn parse_coefficient(src: &str) -> Result<Coefficient, ParseError> {
    let p = run(src, None, false)?;
    Ok(p.coeff(&Word::one()))
}

/// Parses an affine exponent such as `1/2*r1-1`.
pub fn parse_exponent(src: &str) -> Result<ExponentForm, ParseError> {
    let mut p = Parser { toks: lex(src)?, at: 0, ctx: None, allow_generators: false };
    let f = p.affine()?;
    if *p.peek() != Tok::End {
        return p.err(format!("unexpected {}", describe(p.peek())));
    }
    Ok(f)
}

/// Parses a rational `p/q`, possibly negative.
pub fn parse_rational(src: &str) -> Result<BigRational, ParseError> {
    let mut p = Parser { toks: lex(src)?, at: 0, ctx: None, allow_generators: false };
    let neg = if *p.peek() == Tok::Minus {
        p.bump();
        true
    } else {
        false
    };
    if !matches!(p.peek(), Tok::Num(_)) {
        return p.err("expected a number");
    }
    let r = p.rational()?;
    if *p.peek() != Tok::End {
        return p.err(format!("unexpected {}", describe(p.peek())));
    }
    Ok(if neg { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{coeff_eq, qbracket};
    use crate::yflag::build_flag_algebra;

    fn q(e: i64) -> ParamMonomial {
        ParamMonomial::q(e)
    }

    #[test]
    fn two_letter_word() {
        let f = build_flag_algebra(3, false).unwrap();
        let p = parse_expr("Y[3,2]*Y[2,1]", &f.alg).unwrap();
        assert_eq!(p, NCPoly::word(Word::from_letters(vec![GenSymbol::Y(3, 2), GenSymbol::Y(2, 1)])));
        let p2 = parse_expr("Y[3,2] Y[2,1]", &f.alg).unwrap();
        assert_eq!(p, p2);
    }

    #[test]
    fn coefficients_with_half_powers_and_lambda() {
        let p = parse_poly("q^(1/2)*a[1,1] - lam*a[1,2]").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.coeff(&Word::letter(GenSymbol::A(1, 1))), ParamMonomial::q(HalfInt::HALF).into());
        assert_eq!(p.coeff(&Word::letter(GenSymbol::A(1, 2))), -Coefficient::lambda());
    }

    #[test]
    fn unknown_generator() {
        let f = build_flag_algebra(3, false).unwrap();
        assert_eq!(parse_expr("Y[2,3]", &f.alg).unwrap_err(), ParseError::UnknownGenerator(GenSymbol::Y(2, 3)));
        assert_eq!(parse_expr("Y[4,1]", &f.alg).unwrap_err(), ParseError::UnknownGenerator(GenSymbol::Y(4, 1)));
        assert!(matches!(parse_poly("Y[1,2]"), Err(ParseError::UnknownGenerator(_))));
    }

    #[test]
    fn negative_generator_power() {
        assert!(matches!(parse_poly("Y[2,1]^-1"), Err(ParseError::NegativeGeneratorPower { pos: 0, .. })));
        assert!(matches!(parse_poly("2*(Y[2,1]*Y[3,1])^-2"), Err(ParseError::NegativeGeneratorPower { pos: 2, .. })));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert_eq!(parse_poly("q +").unwrap_err(), ParseError::Syntax { pos: 3, msg: "unexpected end of input".into() });
        assert!(matches!(parse_poly("q13 ) "), Err(ParseError::Syntax { pos: 4, .. })));
        assert!(matches!(parse_poly("q # 2"), Err(ParseError::Syntax { pos: 2, .. })));
        assert!(matches!(parse_poly("qq"), Err(ParseError::Syntax { pos: 0, .. })));
        assert!(matches!(parse_poly("1/0"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_coefficient("Y[2,1]"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn labels_and_z_symbols() {
        let c = parse_coefficient("z1").unwrap();
        assert_eq!(c, ParamMonomial::q(ExponentForm::label(1)).into());
        let c = parse_coefficient("(q^(r1) - q^(-r1))*lam^-1").unwrap();
        assert!(coeff_eq(&c, &qbracket(&ExponentForm::label(1))));
        let c = parse_coefficient("q13^(1/2*r1-1)").unwrap();
        let e = ExponentForm::int(-1).with_label(1, HalfInt::HALF);
        assert_eq!(c, ParamMonomial::qij(1, 3, e).into());
        assert_eq!(parse_coefficient("z2^2").unwrap(), ParamMonomial::q(ExponentForm::label(2).scale(2)).into());
    }

    #[test]
    fn lambda_powers() {
        let c = parse_coefficient("(q^2 - q^-2)*lam^-1").unwrap();
        assert_eq!(c, Coefficient::from(q(1)) + Coefficient::from(q(-1)));
        assert_eq!(parse_coefficient("lam^2").unwrap(), Coefficient::lambda().pow(2));
    }

    #[test]
    fn precedence() {
        let a = parse_coefficient("2*q^2 + 3").unwrap();
        assert_eq!(a, Coefficient::from(q(2)).scale(&BigRational::from_integer(2.into())) + Coefficient::from_int(3));
        let b = parse_coefficient("-q^-1").unwrap();
        assert_eq!(b, -Coefficient::from(q(-1)));
        let c = parse_coefficient("(q*q12)^(1/2)").unwrap();
        assert_eq!(c, (ParamMonomial::q(HalfInt::HALF) * ParamMonomial::qij(1, 2, HalfInt::HALF)).into());
        let d = parse_coefficient("(q + 1)^2").unwrap();
        assert_eq!(d, Coefficient::from(q(2)) + Coefficient::from(q(1)).scale(&BigRational::from_integer(2.into())) + Coefficient::one());
    }

    #[test]
    fn printed_values_round_trip() {
        let f = build_flag_algebra(3, false).unwrap();
        for r in f.alg.rules() {
            let text = r.rhs.to_string();
            assert_eq!(parse_expr(&text, &f.alg).unwrap(), r.rhs, "{text}");
        }
        let c = qbracket(&(&ExponentForm::int(3) - &ExponentForm::label(2))) * Coefficient::from(ParamMonomial::qij(1, 3, HalfInt::HALF));
        assert_eq!(parse_coefficient(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn affine_exponents_and_rationals() {
        assert_eq!(parse_exponent("-1/2-1/2*r1+r2").unwrap().to_string(), "-1/2-1/2*r1+r2");
        assert!(parse_exponent("1/3").is_err());
        assert_eq!(parse_rational("-3/4").unwrap(), BigRational::new((-3).into(), 4.into()));
        assert!(parse_rational("q").is_err());
    }
}
