//! Representations of the dual algebra `U_qq(sl(n))` on normal-ordered
//! flag monomials `Y_21^m ... Y_n,n-1^m D_1^r1 ... D_n-1^r(n-1)`.
//!
//! Two independent realizations implement [`Operator`]:
//! - [`Engine`]: single-power formulas combined by the twisted Leibniz
//!   rule, followed by normal ordering in the flag algebra
//! - [`Closed3`]: the closed formulas on `v_jnl` for `n = 3`
//!
//! [`verify`] holds the operator-relation and well-definedness suites.
//!
//! The elements `P_i`, `Q_i` are never built as products of other
//! generators; they are known only through their actions. `Q_is` below is
//! the parameter table that all of these actions share.

mod closed3;
mod engine;
pub mod verify;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::coeff::{Coefficient, ExponentForm, ParamMonomial};
use crate::error::Error;
use crate::ncpoly::{NCPoly, Word};
use crate::yflag::flag_generators;

pub use closed3::{act_closed3, Closed3};
pub use engine::{act_dpower, act_power, Engine};
pub use verify::{compare_up_to_phase, verify_relations, well_definedness, Phase};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenKind {
    K,
    Kinv,
    Xplus,
    Xminus,
    Phalf,
    Pneghalf,
    Qhalf,
    Qneghalf,
}

impl GenKind {
    pub const ALL: [GenKind; 8] = [
        GenKind::K,
        GenKind::Kinv,
        GenKind::Xplus,
        GenKind::Xminus,
        GenKind::Phalf,
        GenKind::Pneghalf,
        GenKind::Qhalf,
        GenKind::Qneghalf,
    ];

    pub fn prefix(self) -> &'static str {
        match self {
            GenKind::K => "K",
            GenKind::Kinv => "Kinv",
            GenKind::Xplus => "X+",
            GenKind::Xminus => "X-",
            GenKind::Phalf => "Phalf",
            GenKind::Pneghalf => "Pneghalf",
            GenKind::Qhalf => "Qhalf",
            GenKind::Qneghalf => "Qneghalf",
        }
    }

    /// Acts diagonally on the monomial basis.
    pub fn is_diagonal(self) -> bool {
        !matches!(self, GenKind::Xplus | GenKind::Xminus)
    }

    pub fn inverse(self) -> Option<GenKind> {
        Some(match self {
            GenKind::K => GenKind::Kinv,
            GenKind::Kinv => GenKind::K,
            GenKind::Phalf => GenKind::Pneghalf,
            GenKind::Pneghalf => GenKind::Phalf,
            GenKind::Qhalf => GenKind::Qneghalf,
            GenKind::Qneghalf => GenKind::Qhalf,
            GenKind::Xplus | GenKind::Xminus => return None,
        })
    }
}

/// One generator `g_i` of the dual algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GeneratorAction {
    pub kind: GenKind,
    pub i: u32,
}

impl GeneratorAction {
    pub fn new(kind: GenKind, i: u32) -> Self {
        GeneratorAction { kind, i }
    }

    pub fn check(&self, n: u32) -> Result<(), Error> {
        if self.i == 0 || self.i >= n {
            return Err(Error::BadGenerator(format!("{self} needs 1 <= i <= {}", n.saturating_sub(1))));
        }
        Ok(())
    }

    /// Every generator of rank `n`, grouped by kind.
    pub fn all(n: u32) -> Vec<GeneratorAction> {
        GenKind::ALL.iter().flat_map(|&k| (1..n).map(move |i| GeneratorAction::new(k, i))).collect()
    }
}

impl fmt::Display for GeneratorAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.prefix(), self.i)
    }
}

impl FromStr for GeneratorAction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let digits = s.len() - s.chars().rev().take_while(char::is_ascii_digit).count();
        let (head, idx) = s.split_at(digits);
        let kind = GenKind::ALL
            .into_iter()
            .find(|k| k.prefix() == head)
            .ok_or_else(|| Error::BadGenerator(s.to_string()))?;
        let i: u32 = idx.parse().map_err(|_| Error::BadGenerator(s.to_string()))?;
        if i == 0 {
            return Err(Error::BadGenerator(s.to_string()));
        }
        Ok(GeneratorAction::new(kind, i))
    }
}

/// The Cartan matrix of `sl(n)` and the parameter table `Q_is`.
#[derive(Clone, Debug, PartialEq)]
pub struct CartanData {
    pub n: u32,
    pub cartan: Vec<Vec<i64>>,
}

impl CartanData {
    pub fn new(n: u32) -> Self {
        let m = n.saturating_sub(1) as usize;
        let cartan = (0..m)
            .map(|a| {
                (0..m)
                    .map(|b| match a.abs_diff(b) {
                        0 => 2,
                        1 => -1,
                        _ => 0,
                    })
                    .collect()
            })
            .collect();
        CartanData { n, cartan }
    }

    /// `c_ij`, 1-based.
    pub fn c(&self, i: u32, j: u32) -> i64 {
        self.cartan[i as usize - 1][j as usize - 1]
    }

    /// `Q_is` for `1 <= i < n`, `1 <= s <= n`.
    pub fn q_is(i: u32, s: u32) -> ParamMonomial {
        q_is(i, s)
    }
}

pub(crate) fn q_is(i: u32, s: u32) -> ParamMonomial {
    use ParamMonomial as M;
    if s < i {
        M::qij(s, i, 1) * M::qij(s, i + 1, -1)
    } else if s == i {
        M::q(2) * M::qij(i, i + 1, -1)
    } else if s == i + 1 {
        M::qij(i, i + 1, -1)
    } else {
        M::qij(i + 1, s, 1) * M::qij(i, s, -1)
    }
}

/// The weight tuple `(r_1, ..., r_n-1)`.
pub fn symbolic_weights(n: u32) -> Vec<ExponentForm> {
    (1..n).map(ExponentForm::label).collect()
}

/// A normal-ordered flag monomial with its weight labels. `exps` follows
/// the row-major generator order `Y_21, Y_31, Y_32, ...`. A restricted
/// vector stands for the same monomial with every `D_j` set to 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisVector {
    pub n: u32,
    pub exps: Vec<u32>,
    pub weights: Vec<ExponentForm>,
    pub restricted: bool,
}

impl BasisVector {
    pub fn new(n: u32, exps: Vec<u32>, weights: Vec<ExponentForm>) -> Result<Self, Error> {
        let g = flag_generators(n).len();
        if exps.len() != g {
            return Err(Error::BadIndex(format!("expected {g} exponents at n = {n}, got {}", exps.len())));
        }
        if weights.len() != n as usize - 1 {
            return Err(Error::BadIndex(format!("expected {} weights at n = {n}", n - 1)));
        }
        Ok(BasisVector { n, exps, weights, restricted: false })
    }

    /// Symbolic weights `r_1, ..., r_n-1`.
    pub fn symbolic(n: u32, exps: Vec<u32>) -> Result<Self, Error> {
        Self::new(n, exps, symbolic_weights(n))
    }

    /// `v_jnl = Y_21^j Y_31^n Y_32^l D_1^r1 D_2^r2`.
    pub fn v3(j: u32, n: u32, l: u32) -> Self {
        Self::symbolic(3, vec![j, n, l]).expect("three exponents at n = 3")
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    /// The Y-part as a normal word.
    pub fn word(&self) -> Word {
        let mut letters = Vec::new();
        for (g, &m) in flag_generators(self.n).into_iter().zip(&self.exps) {
            letters.extend(std::iter::repeat_n(g, m as usize));
        }
        Word::from_letters(letters)
    }

    pub fn with_exps(&self, exps: Vec<u32>) -> Self {
        BasisVector { exps, ..self.clone() }
    }

    pub fn restrict(&self) -> Self {
        BasisVector { restricted: true, ..self.clone() }
    }

    fn exps_label(exps: &[u32]) -> String {
        let e: Vec<String> = exps.iter().map(u32::to_string).collect();
        format!("v[{}]", e.join(","))
    }
}

impl fmt::Display for BasisVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&Self::exps_label(&self.exps))?;
        if !self.restricted {
            for (j, r) in self.weights.iter().enumerate() {
                write!(f, "*D[{}]^({r})", j + 1)?;
            }
        }
        Ok(())
    }
}

/// Every basis vector of Y-degree at most `degree`, symbolic weights, in
/// increasing degree and then lexicographic exponent order.
pub fn basis(n: u32, degree: u32) -> Vec<BasisVector> {
    let g = flag_generators(n).len();
    let mut out = Vec::new();
    for d in 0..=degree {
        let mut cur = vec![0u32; g];
        compositions(d, 0, &mut cur, &mut |e| out.push(BasisVector::symbolic(n, e.to_vec()).unwrap()));
    }
    out
}

fn compositions(left: u32, pos: usize, cur: &mut Vec<u32>, emit: &mut impl FnMut(&[u32])) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        emit(cur);
        cur[pos] = 0;
        return;
    }
    for a in (0..=left).rev() {
        cur[pos] = a;
        compositions(left - a, pos + 1, cur, emit);
    }
    cur[pos] = 0;
}

/// A finite combination of basis vectors sharing one weight tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleElement {
    pub n: u32,
    pub weights: Vec<ExponentForm>,
    pub restricted: bool,
    terms: BTreeMap<Vec<u32>, Coefficient>,
}

impl ModuleElement {
    pub fn zero_like(v: &BasisVector) -> Self {
        ModuleElement { n: v.n, weights: v.weights.clone(), restricted: v.restricted, terms: BTreeMap::new() }
    }

    pub fn basis(v: &BasisVector) -> Self {
        let mut e = Self::zero_like(v);
        e.add_term(v.exps.clone(), Coefficient::one());
        e
    }

    fn zero_with(&self) -> Self {
        ModuleElement { terms: BTreeMap::new(), weights: self.weights.clone(), ..*self }
    }

    /// Reads a polynomial in normal words of the flag generators.
    pub(crate) fn from_normal_poly(like: &BasisVector, p: &NCPoly) -> Self {
        let gens = flag_generators(like.n);
        let mut e = Self::zero_like(like);
        for (w, c) in p.terms() {
            debug_assert!(w.is_normal());
            let mut exps = vec![0u32; gens.len()];
            for g in w.letters() {
                let pos = gens.iter().position(|h| h == g).expect("flag letter");
                exps[pos] += 1;
            }
            e.add_term(exps, c.clone());
        }
        e
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Coefficient)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Coefficient {
        self.terms.get(exps).cloned().unwrap_or_else(Coefficient::zero)
    }

    pub fn basis_vectors(&self) -> impl Iterator<Item = (BasisVector, &Coefficient)> + '_ {
        self.terms.iter().map(|(e, c)| {
            (BasisVector { n: self.n, exps: e.clone(), weights: self.weights.clone(), restricted: self.restricted }, c)
        })
    }

    pub fn scale(&self, c: &Coefficient) -> Self {
        let mut out = self.zero_with();
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a * c);
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&Coefficient) -> Coefficient) -> Self {
        let mut out = self.zero_with();
        for (e, a) in &self.terms {
            out.add_term(e.clone(), f(a));
        }
        out
    }

    pub fn add(&self, other: &ModuleElement) -> Self {
        let mut out = self.clone();
        for (e, a) in &other.terms {
            out.add_term(e.clone(), a.clone());
        }
        out
    }

    pub fn sub(&self, other: &ModuleElement) -> Self {
        let mut out = self.clone();
        for (e, a) in &other.terms {
            out.add_term(e.clone(), -a);
        }
        out
    }

    /// Drops the `D`-tail; the weights stay attached.
    pub fn restrict(&self) -> Self {
        ModuleElement { restricted: true, ..self.clone() }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(e, c)| json!({ "exps": e, "coef": c.to_json(), "text": c.to_string() }))
                .collect(),
        )
    }
}

impl fmt::Display for ModuleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})*{}", BasisVector::exps_label(e))?;
        }
        Ok(())
    }
}

/// `D`-free view of a module element used by the restriction map.
pub fn restrict(v: &ModuleElement) -> ModuleElement {
    v.restrict()
}

/// A realization of the generator actions on basis vectors.
pub trait Operator: Sync {
    fn rank(&self) -> u32;

    fn name(&self) -> &str;

    fn act_basis(&self, g: GeneratorAction, v: &BasisVector) -> Result<ModuleElement, Error>;

    /// Linear extension of [`act_basis`](Self::act_basis).
    fn act(&self, g: GeneratorAction, e: &ModuleElement) -> Result<ModuleElement, Error> {
        let mut out = e.zero_with();
        for (v, c) in e.basis_vectors() {
            let image = self.act_basis(g, &v)?;
            for (x, a) in image.terms() {
                out.add_term(x.clone(), a * c);
            }
        }
        Ok(out)
    }

    /// Applies `word[last]` first, like a composition of operators.
    fn act_word(&self, word: &[GeneratorAction], e: &ModuleElement) -> Result<ModuleElement, Error> {
        let mut cur = e.clone();
        for g in word.iter().rev() {
            cur = self.act(*g, &cur)?;
        }
        Ok(cur)
    }
}
