//! Noncommutative polynomials over [`Coefficient`] and normal forms with
//! respect to oriented two-letter rewrite rules.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigRational, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::coeff::{CoeffError, Coefficient, Substitution};
use crate::error::Error;

/// A generator letter. `A` is a matrix entry `a_ij`; `B` is the same entry
/// in the second tensor factor; `Y` is a flag coordinate; `D` a quantum
/// minor `D_m`. The derived order (A, then B, then Y, then D, each
/// row-major) is the total order used for normal ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenSymbol {
    A(u32, u32),
    B(u32, u32),
    Y(u32, u32),
    D(u32),
}

impl GenSymbol {
    pub fn is_valid(&self, n: u32) -> bool {
        let r = |x: u32| (1..=n).contains(&x);
        match *self {
            GenSymbol::A(i, j) | GenSymbol::B(i, j) => r(i) && r(j),
            GenSymbol::Y(i, j) => r(i) && r(j) && j < i,
            GenSymbol::D(m) => r(m),
        }
    }
}

impl fmt::Display for GenSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenSymbol::A(i, j) => write!(f, "a[{i},{j}]"),
            GenSymbol::B(i, j) => write!(f, "b[{i},{j}]"),
            GenSymbol::Y(i, j) => write!(f, "Y[{i},{j}]"),
            GenSymbol::D(m) => write!(f, "D[{m}]"),
        }
    }
}

/// A product of generators. Ordered by degree, then lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<GenSymbol>);

impl Word {
    pub fn one() -> Self {
        Word(Vec::new())
    }

    pub fn letter(g: GenSymbol) -> Self {
        Word(vec![g])
    }

    pub fn from_letters(letters: Vec<GenSymbol>) -> Self {
        Word(letters)
    }

    pub fn power(g: GenSymbol, k: usize) -> Self {
        Word(vec![g; k])
    }

    pub fn letters(&self) -> &[GenSymbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Positions `i` with `w[i] > w[i+1]`.
    pub fn descents(&self) -> Vec<usize> {
        self.0.windows(2).enumerate().filter(|(_, p)| p[0] > p[1]).map(|(i, _)| i).collect()
    }

    pub fn is_normal(&self) -> bool {
        self.0.windows(2).all(|p| p[0] <= p[1])
    }

    /// Letters sorted into the generator order.
    pub fn sorted(&self) -> Word {
        let mut v = self.0.clone();
        v.sort();
        Word(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    /// Runs of equal letters are printed as powers: `Y[2,1]^2*Y[3,2]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.0.len() {
            let g = self.0[i];
            let mut k = 1;
            while i + k < self.0.len() && self.0[i + k] == g {
                k += 1;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if k == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{k}")?;
            }
            i += k;
        }
        Ok(())
    }
}

/// A finite linear combination of words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NCPoly {
    terms: BTreeMap<Word, Coefficient>,
}

impl NCPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Coefficient::one())
    }

    pub fn constant(c: Coefficient) -> Self {
        Self::monomial(c, Word::one())
    }

    pub fn word(w: Word) -> Self {
        Self::monomial(Coefficient::one(), w)
    }

    pub fn generator(g: GenSymbol) -> Self {
        Self::word(Word::letter(g))
    }

    pub fn monomial(c: Coefficient, w: Word) -> Self {
        let mut p = Self::zero();
        p.add_term(w, c);
        p
    }

    pub fn add_term(&mut self, w: Word, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(e) => {
                *e += &c;
                if e.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Word, &Coefficient)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> Coefficient {
        self.terms.get(w).cloned().unwrap_or_default()
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

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Word::len).max()
    }

    pub fn is_homogeneous(&self, deg: usize) -> bool {
        self.terms.keys().all(|w| w.len() == deg)
    }

    pub fn letters(&self) -> impl Iterator<Item = GenSymbol> + '_ {
        self.terms.keys().flat_map(|w| w.letters().iter().copied())
    }

    pub fn scale(&self, c: &Coefficient) -> NCPoly {
        self.map_coeffs(|x| x * c)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Coefficient) -> Coefficient) -> NCPoly {
        let mut out = NCPoly::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), f(c));
        }
        out
    }

    pub fn map_letters(&self, f: impl Fn(GenSymbol) -> GenSymbol) -> NCPoly {
        let mut out = NCPoly::zero();
        for (w, c) in &self.terms {
            out.add_term(Word(w.0.iter().map(|&g| f(g)).collect()), c.clone());
        }
        out
    }

    /// The image under the algebra map sending each letter `g` to `f(g)`.
    pub fn eval_hom(&self, f: impl Fn(GenSymbol) -> NCPoly) -> NCPoly {
        let mut out = NCPoly::zero();
        for (w, c) in &self.terms {
            let img = w.0.iter().fold(NCPoly::constant(c.clone()), |acc, &g| &acc * &f(g));
            out = &out + &img;
        }
        out
    }

    /// The commutative classical image: every coefficient is sent to its
    /// value at `q = q_ij = 1` and every word to its sorted letters.
    pub fn classical_image(&self, r_values: &BTreeMap<u32, BigRational>) -> Result<BTreeMap<Word, BigRational>, CoeffError> {
        let mut out: BTreeMap<Word, BigRational> = BTreeMap::new();
        for (w, c) in &self.terms {
            let v = c.classical_limit(r_values)?;
            let e = out.entry(w.sorted()).or_insert_with(BigRational::zero);
            *e += v;
        }
        out.retain(|_, v| !v.is_zero());
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> NCPoly {
        (0..k).fold(NCPoly::one(), |acc, _| &acc * self)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(w, c)| {
                    json!({
                        "word": w.0.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
                        "coef": c.to_json(),
                    })
                })
                .collect(),
        )
    }
}

impl Add for &NCPoly {
    type Output = NCPoly;
    fn add(self, rhs: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl Add for NCPoly {
    type Output = NCPoly;
    fn add(self, rhs: NCPoly) -> NCPoly {
        &self + &rhs
    }
}

impl Neg for &NCPoly {
    type Output = NCPoly;
    fn neg(self) -> NCPoly {
        self.map_coeffs(|c| -c)
    }
}

impl Neg for NCPoly {
    type Output = NCPoly;
    fn neg(self) -> NCPoly {
        -&self
    }
}

impl Sub for &NCPoly {
    type Output = NCPoly;
    fn sub(self, rhs: &NCPoly) -> NCPoly {
        self + &(-rhs)
    }
}

impl Sub for NCPoly {
    type Output = NCPoly;
    fn sub(self, rhs: NCPoly) -> NCPoly {
        &self - &rhs
    }
}

impl Mul for &NCPoly {
    type Output = NCPoly;
    fn mul(self, rhs: &NCPoly) -> NCPoly {
        let mut out = NCPoly::zero();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &rhs.terms {
                out.add_term(wa.concat(wb), ca * cb);
            }
        }
        out
    }
}

impl Mul for NCPoly {
    type Output = NCPoly;
    fn mul(self, rhs: NCPoly) -> NCPoly {
        &self * &rhs
    }
}

impl From<GenSymbol> for NCPoly {
    fn from(g: GenSymbol) -> Self {
        NCPoly::generator(g)
    }
}

impl From<Coefficient> for NCPoly {
    fn from(c: Coefficient) -> Self {
        NCPoly::constant(c)
    }
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (w, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            match (c.is_one(), w.is_empty()) {
                (true, _) => write!(f, "{w}")?,
                (false, true) => write!(f, "({c})")?,
                (false, false) => write!(f, "({c})*{w}")?,
            }
        }
        Ok(())
    }
}

/// `hi * lo -> rhs`, with `hi > lo`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    pub hi: GenSymbol,
    pub lo: GenSymbol,
    pub rhs: NCPoly,
}

impl RewriteRule {
    pub fn new(hi: GenSymbol, lo: GenSymbol, rhs: NCPoly) -> Self {
        RewriteRule { hi, lo, rhs }
    }

    pub fn lhs_word(&self) -> Word {
        Word(vec![self.hi, self.lo])
    }
}

/// How to pick the descent to rewrite next.
pub enum Strategy<'a> {
    Leftmost,
    Random(&'a mut ChaCha8Rng),
}

/// An algebra given by an ordered alphabet and a terminating set of
/// two-letter rules, one for every out-of-order pair.
#[derive(Clone, Debug)]
pub struct PresetAlgebra {
    name: String,
    alphabet: Vec<GenSymbol>,
    rules: HashMap<(GenSymbol, GenSymbol), NCPoly>,
}

impl PresetAlgebra {
    /// Validates that every rule is oriented, reduces to strictly smaller
    /// normal words, and that every out-of-order pair has a rule.
    pub fn new(name: impl Into<String>, mut alphabet: Vec<GenSymbol>, rules: Vec<RewriteRule>) -> Result<Self, Error> {
        alphabet.sort();
        alphabet.dedup();
        let mut table = HashMap::new();
        for rule in rules {
            let bad = |reason: String| Error::BadRule { hi: rule.hi, lo: rule.lo, reason };
            if rule.hi <= rule.lo {
                return Err(bad("left side is not out of order".into()));
            }
            for g in [rule.hi, rule.lo].into_iter().chain(rule.rhs.letters()) {
                if alphabet.binary_search(&g).is_err() {
                    return Err(Error::UnknownGenerator(g));
                }
            }
            let lhs = rule.lhs_word();
            for (w, _) in rule.rhs.terms() {
                if !w.is_normal() {
                    return Err(bad(format!("right side word {w} is not normal")));
                }
                if *w >= lhs {
                    return Err(bad(format!("right side word {w} is not smaller than {lhs}")));
                }
            }
            if table.insert((rule.hi, rule.lo), rule.rhs).is_some() {
                return Err(bad("duplicate rule".into()));
            }
        }
        for (a, &lo) in alphabet.iter().enumerate() {
            for &hi in &alphabet[a + 1..] {
                if !table.contains_key(&(hi, lo)) {
                    return Err(Error::MissingRule { hi, lo });
                }
            }
        }
        Ok(PresetAlgebra { name: name.into(), alphabet, rules: table })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &[GenSymbol] {
        &self.alphabet
    }

    pub fn contains(&self, g: GenSymbol) -> bool {
        self.alphabet.binary_search(&g).is_ok()
    }

    pub fn rule(&self, hi: GenSymbol, lo: GenSymbol) -> Option<&NCPoly> {
        self.rules.get(&(hi, lo))
    }

    /// All rules, sorted by left side.
    pub fn rules(&self) -> Vec<RewriteRule> {
        let mut v: Vec<RewriteRule> =
            self.rules.iter().map(|(&(hi, lo), rhs)| RewriteRule::new(hi, lo, rhs.clone())).collect();
        v.sort_by_key(|a| a.lhs_word());
        v
    }

    /// The same algebra with `sub` applied to every rule coefficient.
    pub fn substituted(&self, sub: &Substitution, name: impl Into<String>) -> Result<PresetAlgebra, Error> {
        let rules = self.rules().into_iter().map(|r| RewriteRule::new(r.hi, r.lo, r.rhs.map_coeffs(|c| c.substitute(sub))));
        PresetAlgebra::new(name, self.alphabet.clone(), rules.collect())
    }

    fn check_letters(&self, p: &NCPoly) -> Result<(), Error> {
        match p.letters().find(|g| !self.contains(*g)) {
            Some(g) => Err(Error::UnknownGenerator(g)),
            None => Ok(()),
        }
    }

    pub fn normal_form(&self, p: &NCPoly) -> Result<NCPoly, Error> {
        self.normal_form_with(p, Strategy::Leftmost)
    }

    /// Rewrites until every word is normal. Words are processed from the
    /// largest down; every rewrite only produces smaller words, so each
    /// word is visited once and like terms merge before being expanded.
    pub fn normal_form_with(&self, p: &NCPoly, mut strategy: Strategy<'_>) -> Result<NCPoly, Error> {
        self.check_letters(p)?;
        let mut work = p.clone();
        let mut out = NCPoly::zero();
        while let Some((w, c)) = work.terms.pop_last() {
            let descents = w.descents();
            if descents.is_empty() {
                out.terms.insert(w, c);
                continue;
            }
            let pos = match &mut strategy {
                Strategy::Leftmost => descents[0],
                Strategy::Random(rng) => descents[rng.gen_range(0..descents.len())],
            };
            let rhs = &self.rules[&(w.0[pos], w.0[pos + 1])];
            for (rw, rc) in rhs.terms() {
                let mut letters = Vec::with_capacity(w.len() + rw.len());
                letters.extend_from_slice(&w.0[..pos]);
                letters.extend_from_slice(&rw.0);
                letters.extend_from_slice(&w.0[pos + 2..]);
                work.add_term(Word(letters), &c * rc);
            }
        }
        Ok(out)
    }

    /// Like [`normal_form`](Self::normal_form) for inputs already known to
    /// use only this algebra's letters.
    pub(crate) fn nf(&self, p: &NCPoly) -> NCPoly {
        self.normal_form(p).expect("letters belong to the algebra")
    }
}

pub fn normal_form(p: &NCPoly, alg: &PresetAlgebra) -> Result<NCPoly, Error> {
    alg.normal_form(p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub word: Word,
    pub first: NCPoly,
    pub second: NCPoly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfluenceReport {
    pub algebra: String,
    pub trials: usize,
    pub max_len: usize,
    pub seed: u64,
    pub counterexamples: Vec<Counterexample>,
}

impl ConfluenceReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "algebra": self.algebra,
            "trials": self.trials,
            "max_len": self.max_len,
            "seed": self.seed,
            "counterexamples": self.counterexamples.iter().map(|c| json!({
                "word": c.word.to_string(),
                "first": c.first.to_json(),
                "second": c.second.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

fn trial_rng(seed: u64, trial: usize, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(stream);
    rng
}

/// Reduces seeded random words of length `1..=max_len` under two
/// independently randomized rewrite orders and collects disagreements.
pub fn confluence_check(alg: &PresetAlgebra, max_len: usize, trials: usize, seed: u64) -> ConfluenceReport {
    assert!(max_len >= 1, "max_len must be positive");
    let mut found: Vec<(usize, Counterexample)> = (0..trials)
        .into_par_iter()
        .filter_map(|t| {
            let mut gen = trial_rng(seed, t, 0);
            let len = gen.gen_range(1..=max_len);
            let letters: Vec<GenSymbol> =
                (0..len).map(|_| alg.alphabet[gen.gen_range(0..alg.alphabet.len())]).collect();
            let word = Word(letters);
            let p = NCPoly::word(word.clone());
            let mut ra = trial_rng(seed, t, 1);
            let mut rb = trial_rng(seed, t, 2);
            let first = alg.normal_form_with(&p, Strategy::Random(&mut ra)).expect("alphabet letters");
            let second = alg.normal_form_with(&p, Strategy::Random(&mut rb)).expect("alphabet letters");
            (first != second).then_some((t, Counterexample { word, first, second }))
        })
        .collect();
    found.sort_by_key(|(t, _)| *t);
    ConfluenceReport {
        algebra: alg.name.clone(),
        trials,
        max_len,
        seed,
        counterexamples: found.into_iter().map(|(_, c)| c).collect(),
    }
}

/// The scalar `mu` with `NF(x y) = mu NF(y x)`, if there is one.
pub fn q_factor(x: &NCPoly, y: &NCPoly, alg: &PresetAlgebra) -> Result<Option<Coefficient>, Error> {
    let xy = alg.normal_form(&(x * y))?;
    let yx = alg.normal_form(&(y * x))?;
    Ok(scalar_ratio(&xy, &yx))
}

/// `mu` with `a = mu b`, for nonzero `b`.
pub fn scalar_ratio(a: &NCPoly, b: &NCPoly) -> Option<Coefficient> {
    let (w, cb) = b.terms().next_back()?;
    let ca = a.coeff(w);
    let mu = match ca.try_div(cb) {
        Some(mu) => mu,
        None => {
            let (c, m) = ca.monomial_ratio(cb)?;
            Coefficient::term(c, m)
        }
    };
    (b.scale(&mu) == *a).then_some(mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::ParamMonomial;

    fn y(i: u32, j: u32) -> GenSymbol {
        GenSymbol::Y(i, j)
    }

    /// x2 x1 -> q x1 x2 on two letters.
    fn quantum_plane() -> PresetAlgebra {
        let rule = RewriteRule::new(
            y(3, 1),
            y(2, 1),
            NCPoly::monomial(ParamMonomial::q(1).into(), Word::from_letters(vec![y(2, 1), y(3, 1)])),
        );
        PresetAlgebra::new("plane", vec![y(2, 1), y(3, 1)], vec![rule]).unwrap()
    }

    #[test]
    fn word_order_is_deglex() {
        let a = Word::from_letters(vec![y(3, 1)]);
        let b = Word::from_letters(vec![y(2, 1), y(2, 1)]);
        assert!(a < b);
        assert!(Word::from_letters(vec![y(2, 1), y(3, 1)]) < Word::from_letters(vec![y(3, 1), y(2, 1)]));
    }

    #[test]
    fn plane_normal_form() {
        let alg = quantum_plane();
        let w = NCPoly::word(Word::from_letters(vec![y(3, 1), y(3, 1), y(2, 1)]));
        let nf = alg.normal_form(&w).unwrap();
        assert_eq!(nf, NCPoly::monomial(ParamMonomial::q(2).into(), Word::from_letters(vec![y(2, 1), y(3, 1), y(3, 1)])));
    }

    #[test]
    fn degenerate_inputs() {
        let alg = quantum_plane();
        assert_eq!(alg.normal_form(&NCPoly::zero()).unwrap(), NCPoly::zero());
        assert_eq!(alg.normal_form(&NCPoly::one()).unwrap(), NCPoly::one());
    }

    #[test]
    fn unknown_generator_rejected() {
        let alg = quantum_plane();
        assert_eq!(
            alg.normal_form(&NCPoly::generator(y(3, 2))),
            Err(Error::UnknownGenerator(y(3, 2)))
        );
    }

    #[test]
    fn rule_validation() {
        let bad = RewriteRule::new(y(2, 1), y(3, 1), NCPoly::one());
        assert!(matches!(
            PresetAlgebra::new("x", vec![y(2, 1), y(3, 1)], vec![bad]),
            Err(Error::BadRule { .. })
        ));
        assert_eq!(
            PresetAlgebra::new("x", vec![y(2, 1), y(3, 1)], vec![]).unwrap_err(),
            Error::MissingRule { hi: y(3, 1), lo: y(2, 1) }
        );
        let growing = RewriteRule::new(
            y(3, 1),
            y(2, 1),
            NCPoly::word(Word::from_letters(vec![y(2, 1), y(2, 1), y(3, 1)])),
        );
        assert!(PresetAlgebra::new("x", vec![y(2, 1), y(3, 1)], vec![growing]).is_err());
    }

    #[test]
    fn q_factor_on_plane() {
        let alg = quantum_plane();
        let mu = q_factor(&y(3, 1).into(), &y(2, 1).into(), &alg).unwrap();
        assert_eq!(mu, Some(ParamMonomial::q(1).into()));
    }

    #[test]
    fn normal_words_are_trivially_confluent() {
        let alg = quantum_plane();
        let r = confluence_check(&alg, 4, 50, 7);
        assert!(r.passed());
        assert_eq!(r.trials, 50);
    }

    #[test]
    fn display_powers() {
        let w = Word::from_letters(vec![y(2, 1), y(2, 1), y(3, 2)]);
        assert_eq!(w.to_string(), "Y[2,1]^2*Y[3,2]");
        assert_eq!(Word::one().to_string(), "1");
    }
}
