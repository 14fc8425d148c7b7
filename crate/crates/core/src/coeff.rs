//! Exact scalars: rational Laurent polynomials in `q` and the `q_ij`, with
//! exponents that are affine forms in the weight labels `r_i`, divided by a
//! power of `lambda = q - q^-1`.
//!
//! Every value is kept in a canonical form: no zero terms, and the power of
//! `lambda` in the denominator is as small as exact division allows. Two
//! canonical coefficients are equal iff they are structurally equal;
//! [`coeff_eq`] decides the same question independently by
//! cross-multiplication.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde_json::{json, Map, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("lambda = q - 1/q evaluates to 0 but the coefficient carries lambda^-{0}")]
    DivisionByZeroLambda(u32),
    #[error("{base}^({exp}) has no exact rational value")]
    NonRationalRoot { base: String, exp: String },
    #[error("no value assigned to {0}")]
    MissingAssignment(String),
    #[error("parameter {0} must be assigned a nonzero value")]
    ZeroParameter(String),
    #[error("exponent {0} is not a half-integer")]
    NotHalfInteger(String),
    #[error("malformed coefficient JSON: {0}")]
    BadJson(String),
}

/// A number of the form `k/2`, stored doubled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt {
    doubled: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { doubled: 0 };
    pub const ONE: HalfInt = HalfInt { doubled: 2 };
    pub const HALF: HalfInt = HalfInt { doubled: 1 };

    pub const fn from_doubled(doubled: i64) -> Self {
        HalfInt { doubled }
    }

    pub const fn from_int(n: i64) -> Self {
        HalfInt { doubled: 2 * n }
    }

    pub const fn doubled(self) -> i64 {
        self.doubled
    }

    pub const fn is_zero(self) -> bool {
        self.doubled == 0
    }

    pub const fn is_integer(self) -> bool {
        self.doubled % 2 == 0
    }

    pub fn to_integer(self) -> Option<i64> {
        self.is_integer().then_some(self.doubled / 2)
    }

    pub fn scale(self, k: i64) -> Self {
        HalfInt { doubled: self.doubled * k }
    }

    /// Product of two half-integers, if it is again a half-integer.
    pub fn checked_mul(self, other: HalfInt) -> Option<HalfInt> {
        let p = self.doubled * other.doubled;
        (p % 2 == 0).then_some(HalfInt { doubled: p / 2 })
    }

    pub fn to_rational(self) -> BigRational {
        BigRational::new(BigInt::from(self.doubled), BigInt::from(2))
    }

    pub fn from_rational(r: &BigRational) -> Option<HalfInt> {
        let d = r * BigRational::from_integer(BigInt::from(2));
        if d.is_integer() {
            d.to_integer().to_i64().map(HalfInt::from_doubled)
        } else {
            None
        }
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt { doubled: self.doubled + rhs.doubled }
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt { doubled: self.doubled - rhs.doubled }
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt { doubled: -self.doubled }
    }
}

impl From<i64> for HalfInt {
    fn from(n: i64) -> Self {
        HalfInt::from_int(n)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.doubled / 2)
        } else {
            write!(f, "{}/2", self.doubled)
        }
    }
}

impl std::str::FromStr for HalfInt {
    type Err = CoeffError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CoeffError::NotHalfInteger(s.to_string());
        let r: BigRational = match s.split_once('/') {
            Some((a, b)) => {
                let a: BigInt = a.trim().parse().map_err(|_| bad())?;
                let b: BigInt = b.trim().parse().map_err(|_| bad())?;
                if b.is_zero() {
                    return Err(bad());
                }
                BigRational::new(a, b)
            }
            None => BigRational::from_integer(s.trim().parse().map_err(|_| bad())?),
        };
        HalfInt::from_rational(&r).ok_or_else(bad)
    }
}

/// Affine form `c + sum_i a_i r_i` with half-integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentForm {
    constant: HalfInt,
    labels: BTreeMap<u32, HalfInt>,
}

impl ExponentForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: HalfInt) -> Self {
        ExponentForm { constant: c, labels: BTreeMap::new() }
    }

    pub fn int(n: i64) -> Self {
        Self::constant(HalfInt::from_int(n))
    }

    /// The form `r_i`.
    pub fn label(i: u32) -> Self {
        Self::zero().with_label(i, HalfInt::ONE)
    }

    /// Adds `a * r_i` to the form.
    pub fn with_label(mut self, i: u32, a: HalfInt) -> Self {
        let e = self.labels.entry(i).or_default();
        *e = *e + a;
        if e.is_zero() {
            self.labels.remove(&i);
        }
        self
    }

    pub fn constant_part(&self) -> HalfInt {
        self.constant
    }

    pub fn label_coeff(&self, i: u32) -> HalfInt {
        self.labels.get(&i).copied().unwrap_or_default()
    }

    pub fn labels(&self) -> impl Iterator<Item = (u32, HalfInt)> + '_ {
        self.labels.iter().map(|(&i, &a)| (i, a))
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.labels.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn as_constant(&self) -> Option<HalfInt> {
        self.is_constant().then_some(self.constant)
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Self::zero();
        }
        ExponentForm {
            constant: self.constant.scale(k),
            labels: self.labels.iter().map(|(&i, &a)| (i, a.scale(k))).collect(),
        }
    }

    /// Product of two forms, defined when one side is constant and every
    /// coefficient of the product stays half-integral.
    pub fn checked_mul(&self, other: &ExponentForm) -> Option<ExponentForm> {
        let (c, form) = match (self.as_constant(), other.as_constant()) {
            (Some(c), _) => (c, other),
            (None, Some(c)) => (c, self),
            (None, None) => return None,
        };
        let mut labels = BTreeMap::new();
        for (&i, &a) in &form.labels {
            let p = a.checked_mul(c)?;
            if !p.is_zero() {
                labels.insert(i, p);
            }
        }
        Some(ExponentForm { constant: form.constant.checked_mul(c)?, labels })
    }

    pub fn evaluate(&self, r_values: &BTreeMap<u32, BigRational>) -> Result<BigRational, CoeffError> {
        let mut acc = self.constant.to_rational();
        for (&i, &a) in &self.labels {
            let v = r_values.get(&i).ok_or_else(|| CoeffError::MissingAssignment(format!("r{i}")))?;
            acc += a.to_rational() * v;
        }
        Ok(acc)
    }
}

impl Add for &ExponentForm {
    type Output = ExponentForm;
    fn add(self, rhs: &ExponentForm) -> ExponentForm {
        let mut out = self.clone();
        out.constant = out.constant + rhs.constant;
        for (&i, &a) in &rhs.labels {
            out = out.with_label(i, a);
        }
        out
    }
}

impl Add for ExponentForm {
    type Output = ExponentForm;
    fn add(self, rhs: ExponentForm) -> ExponentForm {
        &self + &rhs
    }
}

impl Neg for &ExponentForm {
    type Output = ExponentForm;
    fn neg(self) -> ExponentForm {
        self.scale(-1)
    }
}

impl Neg for ExponentForm {
    type Output = ExponentForm;
    fn neg(self) -> ExponentForm {
        self.scale(-1)
    }
}

impl Sub for &ExponentForm {
    type Output = ExponentForm;
    fn sub(self, rhs: &ExponentForm) -> ExponentForm {
        self + &(-rhs)
    }
}

impl Sub for ExponentForm {
    type Output = ExponentForm;
    fn sub(self, rhs: ExponentForm) -> ExponentForm {
        &self - &rhs
    }
}

impl From<HalfInt> for ExponentForm {
    fn from(c: HalfInt) -> Self {
        ExponentForm::constant(c)
    }
}

impl From<i64> for ExponentForm {
    fn from(n: i64) -> Self {
        ExponentForm::int(n)
    }
}

fn fmt_scaled(f: &mut fmt::Formatter<'_>, a: HalfInt, name: &str, first: bool) -> fmt::Result {
    let neg = a.doubled() < 0;
    let mag = if neg { -a } else { a };
    if neg {
        f.write_str("-")?;
    } else if !first {
        f.write_str("+")?;
    }
    if mag == HalfInt::ONE {
        f.write_str(name)
    } else {
        write!(f, "{mag}*{name}")
    }
}

impl fmt::Display for ExponentForm {
    /// Prints e.g. `3/2`, `r1`, `-1/2-1/2*r1+r2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if !self.constant.is_zero() || self.labels.is_empty() {
            write!(f, "{}", self.constant)?;
            first = false;
        }
        for (&i, &a) in &self.labels {
            fmt_scaled(f, a, &format!("r{i}"), first)?;
            first = false;
        }
        Ok(())
    }
}

/// One of the deformation parameters: `q`, or `q_ij` with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ParamSymbol {
    Q,
    Qij(u32, u32),
}

impl ParamSymbol {
    /// `q_ij`. Panics unless `1 <= i < j`.
    pub fn qij(i: u32, j: u32) -> Self {
        assert!(1 <= i && i < j, "q_{i}{j} needs 1 <= i < j");
        ParamSymbol::Qij(i, j)
    }

    /// All `1 + n(n-1)/2` parameters of rank `n`.
    pub fn all(n: u32) -> Vec<ParamSymbol> {
        let mut v = vec![ParamSymbol::Q];
        for i in 1..=n {
            for j in i + 1..=n {
                v.push(ParamSymbol::Qij(i, j));
            }
        }
        v
    }

    pub fn name(&self) -> String {
        match *self {
            ParamSymbol::Q => "q".to_string(),
            ParamSymbol::Qij(i, j) if i < 10 && j < 10 => format!("q{i}{j}"),
            ParamSymbol::Qij(i, j) => format!("q{i}_{j}"),
        }
    }

    pub fn parse_name(s: &str) -> Option<ParamSymbol> {
        if s == "q" {
            return Some(ParamSymbol::Q);
        }
        let rest = s.strip_prefix('q')?;
        let (i, j) = match rest.split_once('_') {
            Some((a, b)) => (a.parse().ok()?, b.parse().ok()?),
            None if rest.len() == 2 && rest.bytes().all(|b| b.is_ascii_digit()) => {
                ((rest.as_bytes()[0] - b'0') as u32, (rest.as_bytes()[1] - b'0') as u32)
            }
            None => return None,
        };
        (1 <= i && i < j).then_some(ParamSymbol::Qij(i, j))
    }
}

impl fmt::Display for ParamSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A Laurent monomial in the parameters. Exponents may depend on the
/// weight labels.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamMonomial {
    exps: BTreeMap<ParamSymbol, ExponentForm>,
}

impl ParamMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn symbol(s: ParamSymbol) -> Self {
        Self::power(s, ExponentForm::int(1))
    }

    pub fn power(s: ParamSymbol, e: impl Into<ExponentForm>) -> Self {
        let e = e.into();
        let mut exps = BTreeMap::new();
        if !e.is_zero() {
            exps.insert(s, e);
        }
        ParamMonomial { exps }
    }

    /// `q^e`.
    pub fn q(e: impl Into<ExponentForm>) -> Self {
        Self::power(ParamSymbol::Q, e)
    }

    /// `q_ij^e`.
    pub fn qij(i: u32, j: u32, e: impl Into<ExponentForm>) -> Self {
        Self::power(ParamSymbol::qij(i, j), e)
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponent(&self, s: ParamSymbol) -> ExponentForm {
        self.exps.get(&s).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ParamSymbol, &ExponentForm)> {
        self.exps.iter()
    }

    pub fn inv(&self) -> Self {
        ParamMonomial { exps: self.exps.iter().map(|(s, e)| (*s, -e)).collect() }
    }

    pub fn pow_int(&self, k: i64) -> Self {
        if k == 0 {
            return Self::one();
        }
        ParamMonomial { exps: self.exps.iter().map(|(s, e)| (*s, e.scale(k))).collect() }
    }

    pub fn checked_pow(&self, e: &ExponentForm) -> Option<Self> {
        let mut out = Self::one();
        for (s, f) in &self.exps {
            out = out * Self::power(*s, f.checked_mul(e)?);
        }
        Some(out)
    }

    /// `self^e`.
    ///
    /// # Panics
    /// If an exponent of the result leaves the half-integer affine lattice
    /// (for instance a half power of a half power). All bases used by the
    /// engine have integer exponents, so this does not happen there.
    pub fn pow(&self, e: &ExponentForm) -> Self {
        self.checked_pow(e)
            .unwrap_or_else(|| panic!("({self})^({e}) leaves the half-integer exponent lattice"))
    }

    /// Separates the constant part of the exponent of `q` from the rest.
    pub fn split_q_constant(&self) -> (HalfInt, ParamMonomial) {
        let mut rest = self.clone();
        let c = match rest.exps.get_mut(&ParamSymbol::Q) {
            Some(e) => {
                let c = e.constant;
                e.constant = HalfInt::ZERO;
                if e.is_zero() {
                    rest.exps.remove(&ParamSymbol::Q);
                }
                c
            }
            None => HalfInt::ZERO,
        };
        (c, rest)
    }

    pub fn substitute(&self, sub: &Substitution) -> ParamMonomial {
        let mut out = ParamMonomial::one();
        for (s, e) in &self.exps {
            match sub.map.get(s) {
                Some(m) => out = out * m.pow(e),
                None => out = out * ParamMonomial::power(*s, e.clone()),
            }
        }
        out
    }

    /// Replaces the weight labels by rational values. Fails unless every
    /// resulting exponent is a half-integer.
    pub fn eval_labels(&self, r_values: &BTreeMap<u32, BigRational>) -> Result<ParamMonomial, CoeffError> {
        let mut out = ParamMonomial::one();
        for (s, e) in &self.exps {
            let v = e.evaluate(r_values)?;
            let h = HalfInt::from_rational(&v).ok_or_else(|| CoeffError::NotHalfInteger(v.to_string()))?;
            out = out * ParamMonomial::power(*s, h);
        }
        Ok(out)
    }
}

impl Mul for &ParamMonomial {
    type Output = ParamMonomial;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &ParamMonomial) -> ParamMonomial {
        let mut exps = self.exps.clone();
        for (s, e) in &rhs.exps {
            let sum = match exps.get(s) {
                Some(a) => a + e,
                None => e.clone(),
            };
            if sum.is_zero() {
                exps.remove(s);
            } else {
                exps.insert(*s, sum);
            }
        }
        ParamMonomial { exps }
    }
}

impl Mul for ParamMonomial {
    type Output = ParamMonomial;
    fn mul(self, rhs: ParamMonomial) -> ParamMonomial {
        &self * &rhs
    }
}

impl fmt::Display for ParamMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return f.write_str("1");
        }
        for (n, (s, e)) in self.exps.iter().enumerate() {
            if n > 0 {
                f.write_str("*")?;
            }
            match e.as_constant() {
                Some(HalfInt::ONE) => write!(f, "{s}")?,
                Some(c) if c.is_integer() => write!(f, "{s}^{c}")?,
                _ => write!(f, "{s}^({e})")?,
            }
        }
        Ok(())
    }
}

/// A monomial substitution `symbol -> monomial`, applied as a ring
/// homomorphism. Never touches `q` itself, so `lambda` is preserved.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<ParamSymbol, ParamMonomial>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    /// # Panics
    /// If `s` is `q`.
    pub fn with(mut self, s: ParamSymbol, m: ParamMonomial) -> Self {
        assert!(s != ParamSymbol::Q, "substituting q would not preserve lambda");
        self.map.insert(s, m);
        self
    }

    /// `q_12 = q_23 = q^2 / q_13`, the rank-3 splitting constraint.
    pub fn split3() -> Self {
        let m = ParamMonomial::q(2) * ParamMonomial::qij(1, 3, -1);
        Self::new().with(ParamSymbol::qij(1, 2), m.clone()).with(ParamSymbol::qij(2, 3), m)
    }

    /// `q_ij = q` for all `i < j <= n`: the one-parameter point.
    pub fn one_param(n: u32) -> Self {
        ParamSymbol::all(n)
            .into_iter()
            .filter(|s| *s != ParamSymbol::Q)
            .fold(Self::new(), |acc, s| acc.with(s, ParamMonomial::symbol(ParamSymbol::Q)))
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// `numerator / lambda^lambda_pow`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Coefficient {
    num: BTreeMap<ParamMonomial, BigRational>,
    lambda_pow: u32,
}

type Numerator = BTreeMap<ParamMonomial, BigRational>;

fn add_into(num: &mut Numerator, m: ParamMonomial, c: BigRational) {
    if c.is_zero() {
        return;
    }
    match num.get_mut(&m) {
        Some(e) => {
            *e += c;
            if e.is_zero() {
                num.remove(&m);
            }
        }
        None => {
            num.insert(m, c);
        }
    }
}

fn times_lambda(num: &Numerator) -> Numerator {
    let up = ParamMonomial::q(1);
    let down = ParamMonomial::q(-1);
    let mut out = Numerator::new();
    for (m, c) in num {
        add_into(&mut out, m * &up, c.clone());
        add_into(&mut out, m * &down, -c.clone());
    }
    out
}

fn times_lambda_pow(num: &Numerator, k: u32) -> Numerator {
    let mut out = num.clone();
    for _ in 0..k {
        out = times_lambda(&out);
    }
    out
}

/// Exact division by `lambda`, or `None` if it does not divide.
///
/// Monomials are grouped by everything except the constant part of the
/// exponent of `q`; each group is a Laurent polynomial in `t = q^(1/2)`
/// and `lambda = t^2 - t^-2`.
fn divide_by_lambda(num: &Numerator) -> Option<Numerator> {
    let mut groups: BTreeMap<ParamMonomial, BTreeMap<i64, BigRational>> = BTreeMap::new();
    for (m, c) in num {
        let (h, rest) = m.split_q_constant();
        groups.entry(rest).or_default().insert(h.doubled(), c.clone());
    }
    let mut out = Numerator::new();
    for (rest, mut poly) in groups {
        let min = *poly.keys().next().expect("groups are nonempty");
        while let Some((top, c)) = poly.pop_last() {
            let low = top - 4;
            if low < min {
                return None;
            }
            add_into(&mut out, &rest * &ParamMonomial::q(HalfInt::from_doubled(top - 2)), c.clone());
            let e = poly.entry(low).or_insert_with(BigRational::zero);
            *e += c;
            if e.is_zero() {
                poly.remove(&low);
            }
        }
    }
    Some(out)
}

fn rational_string(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl Coefficient {
    fn from_parts(num: Numerator, lambda_pow: u32) -> Self {
        let mut c = Coefficient { num, lambda_pow };
        c.normalize();
        c
    }

    fn normalize(&mut self) {
        self.num.retain(|_, c| !c.is_zero());
        if self.num.is_empty() {
            self.lambda_pow = 0;
            return;
        }
        while self.lambda_pow > 0 {
            match divide_by_lambda(&self.num) {
                Some(d) => {
                    self.num = d;
                    self.lambda_pow -= 1;
                }
                None => break,
            }
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_monomial(ParamMonomial::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(c: BigRational) -> Self {
        Self::term(c, ParamMonomial::one())
    }

    pub fn from_monomial(m: ParamMonomial) -> Self {
        Self::term(BigRational::one(), m)
    }

    pub fn term(c: BigRational, m: ParamMonomial) -> Self {
        let mut num = Numerator::new();
        add_into(&mut num, m, c);
        Coefficient { num, lambda_pow: 0 }
    }

    /// `lambda = q - q^-1`.
    pub fn lambda() -> Self {
        Self::from_parts(times_lambda(&Self::one().num), 0)
    }

    /// `lambda^-k`.
    pub fn inv_lambda_pow(k: u32) -> Self {
        Self::from_parts(Self::one().num, k)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one()
    }

    pub fn lambda_pow(&self) -> u32 {
        self.lambda_pow
    }

    pub fn numerator(&self) -> impl Iterator<Item = (&ParamMonomial, &BigRational)> {
        self.num.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.num.len()
    }

    /// `Some((c, m))` if the value is the single term `c * m`.
    pub fn as_term(&self) -> Option<(&BigRational, &ParamMonomial)> {
        if self.lambda_pow == 0 && self.num.len() == 1 {
            self.num.iter().next().map(|(m, c)| (c, m))
        } else {
            None
        }
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        match self.as_term() {
            Some((c, m)) if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Coefficient {
            num: self.num.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
            lambda_pow: self.lambda_pow,
        }
    }

    pub fn mul_monomial(&self, m: &ParamMonomial) -> Self {
        Coefficient {
            num: self.num.iter().map(|(k, a)| (k * m, a.clone())).collect(),
            lambda_pow: self.lambda_pow,
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Exact quotient `self / other` when `other` is a single term over a
    /// power of `lambda`; `None` otherwise or when `other` is zero.
    pub fn try_div(&self, other: &Coefficient) -> Option<Coefficient> {
        if other.num.len() != 1 {
            return None;
        }
        let (m, c) = other.num.iter().next()?;
        let inv = ParamMonomial::inv(m);
        let base: Numerator = self.num.iter().map(|(k, a)| (k * &inv, a / c)).collect();
        if other.lambda_pow >= self.lambda_pow {
            Some(Self::from_parts(times_lambda_pow(&base, other.lambda_pow - self.lambda_pow), 0))
        } else {
            Some(Self::from_parts(base, self.lambda_pow - other.lambda_pow))
        }
    }

    /// A signed monomial `c * m` with `self = c * m * other`, if one exists.
    pub fn monomial_ratio(&self, other: &Coefficient) -> Option<(BigRational, ParamMonomial)> {
        if self.is_zero() || other.is_zero() {
            return None;
        }
        let a = times_lambda_pow(&self.num, other.lambda_pow);
        let b = times_lambda_pow(&other.num, self.lambda_pow);
        if a.len() != b.len() {
            return None;
        }
        let (mb, cb) = b.iter().next()?;
        let inv_mb = mb.inv();
        for (ma, ca) in &a {
            let mu = ma * &inv_mb;
            let c = ca / cb;
            let scaled: Numerator = b.iter().map(|(m, x)| (m * &mu, x * &c)).collect();
            if scaled == a {
                return Some((c, mu));
            }
        }
        None
    }

    pub fn substitute(&self, sub: &Substitution) -> Coefficient {
        if sub.is_empty() {
            return self.clone();
        }
        let mut num = Numerator::new();
        for (m, c) in &self.num {
            add_into(&mut num, m.substitute(sub), c.clone());
        }
        Self::from_parts(num, self.lambda_pow)
    }

    /// Replaces the weight labels by rational values, keeping the
    /// parameters symbolic.
    pub fn eval_labels(&self, r_values: &BTreeMap<u32, BigRational>) -> Result<Coefficient, CoeffError> {
        let mut num = Numerator::new();
        for (m, c) in &self.num {
            add_into(&mut num, m.eval_labels(r_values)?, c.clone());
        }
        Ok(Self::from_parts(num, self.lambda_pow))
    }

    /// The value at `q = q_ij = 1` after the weight labels are fixed:
    /// every `q_ij` is set to 1 first, then `lambda` is cancelled exactly
    /// and `q -> 1` is taken. Q-brackets `[k]_q` become `k`.
    pub fn classical_limit(&self, r_values: &BTreeMap<u32, BigRational>) -> Result<BigRational, CoeffError> {
        let mut num = Numerator::new();
        for (m, c) in &self.num {
            let m = m.eval_labels(r_values)?;
            add_into(&mut num, ParamMonomial::q(m.exponent(ParamSymbol::Q)), c.clone());
        }
        let reduced = Self::from_parts(num, self.lambda_pow);
        if reduced.lambda_pow > 0 {
            return Err(CoeffError::DivisionByZeroLambda(reduced.lambda_pow));
        }
        Ok(reduced.num.values().fold(BigRational::zero(), |acc, c| acc + c))
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .num
            .iter()
            .map(|(m, c)| {
                let mut mono = Map::new();
                for (s, e) in m.iter() {
                    if !e.constant_part().is_zero() {
                        mono.insert(s.name(), Value::String(e.constant_part().to_string()));
                    }
                    for (i, a) in e.labels() {
                        mono.insert(format!("{}@r{i}", s.name()), Value::String(a.to_string()));
                    }
                }
                json!({ "coef": rational_string(c), "mono": mono })
            })
            .collect();
        json!({ "num": terms, "lampow": self.lambda_pow })
    }

    pub fn from_json(v: &Value) -> Result<Coefficient, CoeffError> {
        let bad = |s: &str| CoeffError::BadJson(s.to_string());
        let lam = v.get("lampow").and_then(Value::as_u64).ok_or_else(|| bad("lampow"))?;
        let terms = v.get("num").and_then(Value::as_array).ok_or_else(|| bad("num"))?;
        let mut num = Numerator::new();
        for t in terms {
            let cs = t.get("coef").and_then(Value::as_str).ok_or_else(|| bad("coef"))?;
            let c: BigRational = cs.parse().map_err(|_| bad(cs))?;
            let mono = t.get("mono").and_then(Value::as_object).ok_or_else(|| bad("mono"))?;
            let mut m = ParamMonomial::one();
            for (k, ev) in mono {
                let es = ev.as_str().ok_or_else(|| bad(k))?;
                let h: HalfInt = es.parse()?;
                let (sym, form) = match k.split_once("@r") {
                    Some((s, i)) => (s, ExponentForm::zero().with_label(i.parse().map_err(|_| bad(k))?, h)),
                    None => (k.as_str(), ExponentForm::constant(h)),
                };
                let sym = ParamSymbol::parse_name(sym).ok_or_else(|| bad(sym))?;
                m = m * ParamMonomial::power(sym, form);
            }
            add_into(&mut num, m, c);
        }
        Ok(Self::from_parts(num, u32::try_from(lam).map_err(|_| bad("lampow"))?))
    }
}

impl Add for &Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: &Coefficient) -> Coefficient {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let lam = self.lambda_pow.max(rhs.lambda_pow);
        let mut num = times_lambda_pow(&self.num, lam - self.lambda_pow);
        for (m, c) in times_lambda_pow(&rhs.num, lam - rhs.lambda_pow) {
            add_into(&mut num, m, c);
        }
        Coefficient::from_parts(num, lam)
    }
}

impl Add for Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: Coefficient) -> Coefficient {
        &self + &rhs
    }
}

impl AddAssign<&Coefficient> for Coefficient {
    fn add_assign(&mut self, rhs: &Coefficient) {
        *self = &*self + rhs;
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient {
            num: self.num.iter().map(|(m, c)| (m.clone(), -c)).collect(),
            lambda_pow: self.lambda_pow,
        }
    }
}

impl Neg for Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        -&self
    }
}

impl Sub for &Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: &Coefficient) -> Coefficient {
        self + &(-rhs)
    }
}

impl Sub for Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: Coefficient) -> Coefficient {
        &self - &rhs
    }
}

impl SubAssign<&Coefficient> for Coefficient {
    fn sub_assign(&mut self, rhs: &Coefficient) {
        *self = &*self - rhs;
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: &Coefficient) -> Coefficient {
        if self.is_zero() || rhs.is_zero() {
            return Coefficient::zero();
        }
        let mut num = Numerator::new();
        for (ma, ca) in &self.num {
            for (mb, cb) in &rhs.num {
                add_into(&mut num, ma * mb, ca * cb);
            }
        }
        Coefficient::from_parts(num, self.lambda_pow + rhs.lambda_pow)
    }
}

impl Mul for Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: Coefficient) -> Coefficient {
        &self * &rhs
    }
}

impl MulAssign<&Coefficient> for Coefficient {
    fn mul_assign(&mut self, rhs: &Coefficient) {
        *self = &*self * rhs;
    }
}

impl From<ParamMonomial> for Coefficient {
    fn from(m: ParamMonomial) -> Self {
        Coefficient::from_monomial(m)
    }
}

impl fmt::Display for Coefficient {
    /// Parseable text: `(q + q^-1)`, `-2*q13^(1/2)`, `(q^(r1) - q^(-r1))*lam^-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num.is_empty() {
            return f.write_str("0");
        }
        let wrap = self.lambda_pow > 0 && self.num.len() > 1;
        if wrap {
            f.write_str("(")?;
        }
        for (n, (m, c)) in self.num.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (n, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            match (mag.is_one(), m.is_one()) {
                (true, true) => f.write_str("1")?,
                (true, false) => write!(f, "{m}")?,
                (false, true) => f.write_str(&rational_string(&mag))?,
                (false, false) => write!(f, "{}*{m}", rational_string(&mag))?,
            }
        }
        if wrap {
            f.write_str(")")?;
        }
        if self.lambda_pow > 0 {
            write!(f, "*lam^-{}", self.lambda_pow)?;
        }
        Ok(())
    }
}

/// Decides `a == b` by comparing `a.num * lambda^b.pow` with
/// `b.num * lambda^a.pow`; no division involved.
pub fn coeff_eq(a: &Coefficient, b: &Coefficient) -> bool {
    times_lambda_pow(&a.num, b.lambda_pow) == times_lambda_pow(&b.num, a.lambda_pow)
}

/// `[h]_q = (q^h - q^-h) / lambda`.
pub fn qbracket(h: &ExponentForm) -> Coefficient {
    let mut num = Numerator::new();
    add_into(&mut num, ParamMonomial::q(h.clone()), BigRational::one());
    add_into(&mut num, ParamMonomial::q(-h), -BigRational::one());
    Coefficient::from_parts(num, 1)
}

/// `[k]_q` for an integer `k`.
pub fn qint(k: i64) -> Coefficient {
    qbracket(&ExponentForm::int(k))
}

/// Exact `base^(p/d)` for `d > 0`.
fn rational_power(base: &BigRational, exp: &BigRational, name: &str) -> Result<BigRational, CoeffError> {
    let err = || CoeffError::NonRationalRoot { base: format!("{name}={base}"), exp: exp.to_string() };
    let d = exp.denom().to_u32().ok_or_else(err)?;
    let p = exp.numer().to_i32().ok_or_else(err)?;
    let root = if d == 1 {
        base.clone()
    } else {
        if base.is_negative() && d % 2 == 0 {
            return Err(err());
        }
        let root_of = |x: &BigInt| -> Option<BigInt> {
            let r = x.abs().nth_root(d);
            let r = if x.is_negative() { -r } else { r };
            (num::pow::pow(r.clone(), d as usize) == *x).then_some(r)
        };
        let n = root_of(base.numer()).ok_or_else(err)?;
        let m = root_of(base.denom()).ok_or_else(err)?;
        BigRational::new(n, m)
    };
    Ok(num::pow::Pow::pow(&root, p))
}

/// Exact rational value of `c` at the given point.
///
/// Every parameter appearing in `c` must be assigned a nonzero rational;
/// `q` must be assigned whenever `lambda_pow > 0`.
pub fn specialize(
    c: &Coefficient,
    assignment: &BTreeMap<ParamSymbol, BigRational>,
    r_values: &BTreeMap<u32, BigRational>,
) -> Result<BigRational, CoeffError> {
    let value_of = |s: &ParamSymbol| -> Result<&BigRational, CoeffError> {
        let v = assignment.get(s).ok_or_else(|| CoeffError::MissingAssignment(s.name()))?;
        if v.is_zero() {
            return Err(CoeffError::ZeroParameter(s.name()));
        }
        Ok(v)
    };
    let lam = if c.lambda_pow > 0 {
        let q = value_of(&ParamSymbol::Q)?;
        let lam = q - q.recip();
        if lam.is_zero() {
            return Err(CoeffError::DivisionByZeroLambda(c.lambda_pow));
        }
        Some(lam)
    } else {
        None
    };
    let mut total = BigRational::zero();
    for (m, a) in &c.num {
        let mut t = a.clone();
        for (s, e) in m.iter() {
            let e = e.evaluate(r_values)?;
            t *= rational_power(value_of(s)?, &e, &s.name())?;
        }
        total += t;
    }
    if let Some(lam) = lam {
        total /= num::pow::Pow::pow(&lam, c.lambda_pow);
    }
    Ok(total)
}

/// Shorthand monomials built from the independent parameters.
pub mod shorthand {
    use super::ParamMonomial;

    /// `p_ij = q_ij / q^2`.
    pub fn p(i: u32, j: u32) -> ParamMonomial {
        ParamMonomial::qij(i, j, 1) * ParamMonomial::q(-2)
    }

    /// `q' = 1/q`.
    pub fn q_prime() -> ParamMonomial {
        ParamMonomial::q(-1)
    }

    /// `q'_ij = q_ij / q^2`.
    pub fn q_prime_ij(i: u32, j: u32) -> ParamMonomial {
        p(i, j)
    }

    /// `p'_ij = q'_ij / q'^2`. Not used by any formula in this crate.
    pub fn p_prime(i: u32, j: u32) -> ParamMonomial {
        q_prime_ij(i, j) * q_prime().pow_int(-2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(e: i64) -> Coefficient {
        ParamMonomial::q(e).into()
    }

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn additive_identity_and_inverse() {
        let x = q(1) + q(-1);
        assert_eq!(&Coefficient::zero() + &x, x);
        let a = (q(2) - q(-2)) * Coefficient::inv_lambda_pow(1);
        let b = (q(-2) - q(2)) * Coefficient::inv_lambda_pow(1);
        assert!((a + b).is_zero());
    }

    #[test]
    fn qint_two_times_lambda() {
        let lhs = &qint(2) * &Coefficient::lambda();
        assert_eq!(lhs.lambda_pow(), 0);
        assert_eq!(lhs, q(2) - q(-2));
    }

    #[test]
    fn lambda_cancels_in_difference_of_squares() {
        let c = Coefficient::from_parts((q(2) - q(-2)).num, 1);
        assert_eq!(c, q(1) + q(-1));
        assert!(coeff_eq(&c, &(q(1) + q(-1))));
    }

    #[test]
    fn inverse_monomials() {
        let a = Coefficient::from(shorthand::p(1, 2));
        let b = Coefficient::from(ParamMonomial::q(2) * ParamMonomial::qij(1, 2, -1));
        assert!((a * b).is_one());
    }

    #[test]
    fn distinct_label_exponents_differ() {
        let a = Coefficient::from(ParamMonomial::q(ExponentForm::label(1)));
        let b = Coefficient::from(ParamMonomial::q(ExponentForm::label(2)));
        assert!(!coeff_eq(&a, &b));
    }

    #[test]
    fn half_powers_multiply() {
        let h = Coefficient::from(ParamMonomial::qij(1, 3, HalfInt::HALF));
        assert!(coeff_eq(&(&h * &h), &ParamMonomial::qij(1, 3, 1).into()));
    }

    #[test]
    fn qbracket_values() {
        assert!(qint(0).is_zero());
        assert_eq!(qint(2), q(1) + q(-1));
        let r1 = ExponentForm::label(1);
        let b = qbracket(&-&r1);
        assert_eq!(b.lambda_pow(), 1);
        let expected = Coefficient::from_parts(
            (Coefficient::from(ParamMonomial::q(-&r1)) - ParamMonomial::q(r1.clone()).into()).num,
            1,
        );
        assert_eq!(b, expected);
    }

    #[test]
    fn qint_matches_explicit_sum() {
        for k in 0..8 {
            let sum = (0..k).fold(Coefficient::zero(), |acc, s| acc + q(k - 1 - 2 * s));
            assert!(coeff_eq(&qint(k), &sum), "k = {k}");
            assert_eq!(qint(k), sum);
        }
    }

    #[test]
    fn specialize_examples() {
        let mut at = BTreeMap::new();
        at.insert(ParamSymbol::Q, rat(1, 1));
        at.insert(ParamSymbol::qij(1, 2), rat(1, 1));
        let none = BTreeMap::new();
        assert_eq!(specialize(&shorthand::p(1, 2).into(), &at, &none).unwrap(), rat(1, 1));
        assert_eq!(specialize(&Coefficient::lambda(), &at, &none).unwrap(), rat(0, 1));
        let over = Coefficient::inv_lambda_pow(1) * ParamMonomial::q(ExponentForm::label(1)).into();
        assert_eq!(specialize(&over, &at, &none), Err(CoeffError::DivisionByZeroLambda(1)));

        at.insert(ParamSymbol::Q, rat(2, 1));
        assert_eq!(specialize(&qint(2), &at, &none).unwrap(), rat(5, 2));
        let root = Coefficient::from(ParamMonomial::q(HalfInt::HALF));
        assert!(matches!(specialize(&root, &at, &none), Err(CoeffError::NonRationalRoot { .. })));
        at.insert(ParamSymbol::Q, rat(9, 4));
        assert_eq!(specialize(&root, &at, &none).unwrap(), rat(3, 2));
    }

    #[test]
    fn specialize_with_labels() {
        let mut at = BTreeMap::new();
        at.insert(ParamSymbol::Q, rat(4, 1));
        let mut r = BTreeMap::new();
        r.insert(1, rat(3, 1));
        let c = qbracket(&ExponentForm::label(1));
        // [3]_4 = 16 + 1 + 1/16
        assert_eq!(specialize(&c, &at, &r).unwrap(), rat(273, 16));
    }

    #[test]
    fn classical_limit_of_brackets() {
        let mut r = BTreeMap::new();
        r.insert(1, rat(5, 1));
        let h = &ExponentForm::int(2) - &ExponentForm::label(1);
        let c = qbracket(&h) * Coefficient::from(ParamMonomial::qij(1, 2, ExponentForm::label(1)));
        assert_eq!(c.classical_limit(&r).unwrap(), rat(-3, 1));
        assert_eq!(qint(4).classical_limit(&r).unwrap(), rat(4, 1));
    }

    #[test]
    fn split_substitution() {
        let c: Coefficient = (ParamMonomial::qij(1, 2, 1) * ParamMonomial::qij(2, 3, 1) * ParamMonomial::qij(1, 3, -1)).into();
        let s = c.substitute(&Substitution::split3());
        assert_eq!(s, Coefficient::from(ParamMonomial::q(4) * ParamMonomial::qij(1, 3, -3)));
    }

    #[test]
    fn monomial_ratio_finds_signed_phase() {
        let a = qbracket(&ExponentForm::label(1)).mul_monomial(&ParamMonomial::qij(1, 2, HalfInt::HALF));
        let b = qbracket(&-ExponentForm::label(1));
        let (c, m) = a.monomial_ratio(&b).unwrap();
        assert_eq!(c, rat(-1, 1));
        assert_eq!(m, ParamMonomial::qij(1, 2, HalfInt::HALF));
        assert!(qint(3).monomial_ratio(&qint(2)).is_none());
    }

    #[test]
    fn json_keys() {
        let m = ParamMonomial::q(ExponentForm::constant(HalfInt::from_doubled(3)).with_label(1, HalfInt::HALF))
            * ParamMonomial::qij(1, 3, -1);
        let c = Coefficient::term(rat(2, 3), m);
        let v = c.to_json();
        assert_eq!(v["lampow"], 0);
        assert_eq!(v["num"][0]["coef"], "2/3");
        assert_eq!(v["num"][0]["mono"]["q"], "3/2");
        assert_eq!(v["num"][0]["mono"]["q@r1"], "1/2");
        assert_eq!(v["num"][0]["mono"]["q13"], "-1");
        assert_eq!(Coefficient::from_json(&v).unwrap(), c);
    }

    #[test]
    fn p_prime_is_q_ij() {
        assert_eq!(shorthand::p_prime(1, 2), ParamMonomial::qij(1, 2, 1));
    }
}
