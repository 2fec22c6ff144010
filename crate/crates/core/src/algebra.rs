//! Sparse graded polynomials shared by every invariant.
//!
//! A monomial carries Laurent exponents in `A`, `q` and `t`, a multiset of
//! arrow variables `K[n]`, a vector grading `vg(k, n)` and a multiset of
//! graphical coefficients `D{..}`. Coefficients are arbitrary precision.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("cannot combine an integer-coefficient polynomial with a dimension polynomial")]
    ContextMismatch,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("not a Poincare polynomial: {0}")]
    NotDimension(String),
}

/// Whether coefficients are signed integers or homology dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Context {
    Integer,
    Dimension,
}

/// Grading key of a single term. The derived ordering (t, q, A, arrow,
/// vgrade, graphical) is the canonical print order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub t: i32,
    pub q: i32,
    pub a: i32,
    /// Sorted multiset of arrow indices, one entry per factor `K[n]`.
    pub arrow: Vec<u32>,
    /// Vector grading; never stores a zero.
    pub vgrade: BTreeMap<u32, i32>,
    /// Sorted multiset of graphical coefficient ids.
    pub graphical: Vec<String>,
}

fn merge_sorted<T: Ord + Clone>(x: &[T], y: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    out.extend_from_slice(x);
    out.extend_from_slice(y);
    out.sort();
    out
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn a_pow(e: i32) -> Self {
        Self { a: e, ..Self::default() }
    }

    pub fn qt(q: i32, t: i32) -> Self {
        Self { q, t, ..Self::default() }
    }

    pub fn arrow(n: u32) -> Self {
        Self { arrow: vec![n], ..Self::default() }
    }

    pub fn vg(k: u32, n: i32) -> Self {
        let mut vgrade = BTreeMap::new();
        if n != 0 {
            vgrade.insert(k, n);
        }
        Self { vgrade, ..Self::default() }
    }

    pub fn graphical(id: impl Into<String>) -> Self {
        Self { graphical: vec![id.into()], ..Self::default() }
    }

    pub fn is_one(&self) -> bool {
        *self == Self::default()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut vgrade = self.vgrade.clone();
        for (&k, &n) in &other.vgrade {
            let e = vgrade.entry(k).or_insert(0);
            *e += n;
            if *e == 0 {
                vgrade.remove(&k);
            }
        }
        Monomial {
            t: self.t + other.t,
            q: self.q + other.q,
            a: self.a + other.a,
            arrow: merge_sorted(&self.arrow, &other.arrow),
            vgrade,
            graphical: merge_sorted(&self.graphical, &other.graphical),
        }
    }

    /// Image under A -> 1/A, q -> 1/q, t -> 1/t, vg(k,n) -> vg(k,-n).
    pub fn mirror(&self) -> Monomial {
        Monomial {
            t: -self.t,
            q: -self.q,
            a: -self.a,
            arrow: self.arrow.clone(),
            vgrade: self.vgrade.iter().map(|(&k, &n)| (k, -n)).collect(),
            graphical: self.graphical.clone(),
        }
    }

    /// Number of distinct arrow indices.
    pub fn distinct_arrows(&self) -> usize {
        let mut v = self.arrow.clone();
        v.dedup();
        v.len()
    }
}

#[derive(Clone, Debug)]
pub struct GradedPolynomial {
    context: Context,
    terms: BTreeMap<Monomial, BigInt>,
}

impl PartialEq for GradedPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for GradedPolynomial {}

impl Default for GradedPolynomial {
    fn default() -> Self {
        Self::zero()
    }
}

impl GradedPolynomial {
    pub fn zero() -> Self {
        Self { context: Context::Integer, terms: BTreeMap::new() }
    }

    pub fn zero_dimension() -> Self {
        Self { context: Context::Dimension, terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::term(Monomial::one(), 1)
    }

    pub fn term(m: Monomial, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c.into());
        p
    }

    /// The loop value `-A^2 - A^-2`.
    pub fn loop_value() -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::a_pow(2), BigInt::from(-1));
        p.add_term(Monomial::a_pow(-2), BigInt::from(-1));
        p
    }

    /// `q + q^-1`, the unknot's Poincare polynomial.
    pub fn unknot_homology() -> Self {
        let mut p = Self::zero_dimension();
        p.add_term(Monomial::qt(1, 0), BigInt::one());
        p.add_term(Monomial::qt(-1, 0), BigInt::one());
        p
    }

    pub fn context(&self) -> Context {
        self.context
    }

    pub fn with_context(mut self, context: Context) -> Self {
        self.context = context;
        self
    }

    /// Reinterpret as a Poincare polynomial; every coefficient must be
    /// positive and no term may carry an `A` exponent.
    pub fn into_dimension(self) -> Result<Self, AlgebraError> {
        for (m, c) in &self.terms {
            if m.a != 0 || !c.is_positive() {
                return Err(AlgebraError::NotDimension(format!("{}", Self::term(m.clone(), c.clone()))));
            }
        }
        Ok(self.with_context(Context::Dimension))
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_default();
        *e += c;
        if e.is_zero() {
            // re-borrow to remove the now-zero entry
            let key = self.terms.iter().find(|(_, v)| v.is_zero()).map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    fn check(&self, other: &Self) -> Result<Context, AlgebraError> {
        match (self.context, other.context) {
            (a, b) if a == b => Ok(a),
            // the zero polynomial adopts the other side's context
            _ if self.is_zero() => Ok(other.context),
            _ if other.is_zero() => Ok(self.context),
            _ => Err(AlgebraError::ContextMismatch),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        let context = self.check(other)?;
        let mut out = self.clone();
        out.context = context;
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        let context = self.check(other)?;
        let mut out = Self { context, terms: BTreeMap::new() };
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    /// Multiplication by an integer. The result is always in integer context
    /// unless the scalar is positive.
    pub fn scale(&self, s: impl Into<BigInt>) -> Self {
        let s = s.into();
        let context = if s.is_positive() { self.context } else { Context::Integer };
        let mut out = Self { context, terms: BTreeMap::new() };
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * &s);
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Self {
            context: self.context,
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one().with_context(self.context);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// `(-A)^e`.
    pub fn minus_a_pow(e: i32) -> Self {
        let sign = if e.rem_euclid(2) == 0 { 1 } else { -1 };
        Self::term(Monomial::a_pow(e), sign)
    }

    pub fn mirror(&self) -> Self {
        Self {
            context: self.context,
            terms: self.terms.iter().map(|(m, c)| (m.mirror(), c.clone())).collect(),
        }
    }

    /// Equality that also accepts the mirror image.
    pub fn eq_up_to_mirror(&self, other: &Self) -> bool {
        self == other || *self == other.mirror()
    }

    /// Apply a term-wise rewrite; the closure returns the image of each
    /// monomial as a polynomial.
    pub fn map_monomials(&self, f: impl Fn(&Monomial) -> GradedPolynomial) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let img = f(m);
            for (m2, c2) in img.terms {
                out.add_term(m2, c * c2);
            }
        }
        out
    }

    pub fn specialize(&self, subst: &Substitution) -> Self {
        match subst {
            Substitution::TMinusOne => self.map_monomials(|m| {
                let sign = if m.t.rem_euclid(2) == 0 { 1 } else { -1 };
                Self::term(Monomial { t: 0, ..m.clone() }, sign)
            }),
            Substitution::VgToOne => {
                let out = self.map_monomials(|m| Self::term(Monomial { vgrade: BTreeMap::new(), ..m.clone() }, 1));
                out.with_context(self.context)
            }
            Substitution::KToOne => {
                let out = self.map_monomials(|m| Self::term(Monomial { arrow: Vec::new(), ..m.clone() }, 1));
                out.with_context(self.context)
            }
            Substitution::ArrowToSet => {
                let out = self.map_monomials(|m| {
                    let mut arrow = m.arrow.clone();
                    arrow.dedup();
                    Self::term(Monomial { arrow, ..m.clone() }, 1)
                });
                out.with_context(self.context)
            }
            Substitution::AToUnit { negate, image } => self.map_monomials(|m| {
                let base = Monomial { a: 0, ..m.clone() };
                let mut mono = base.clone();
                let step = if m.a >= 0 { image.clone() } else { image.mirror_exponents() };
                for _ in 0..m.a.unsigned_abs() {
                    mono = mono.mul(&step);
                }
                let sign = if *negate && m.a.rem_euclid(2) == 1 { -1 } else { 1 };
                Self::term(mono, sign)
            }),
            Substitution::Graphical(table) => self.map_monomials(|m| {
                let mut acc = Self::term(Monomial { graphical: Vec::new(), ..m.clone() }, 1);
                for g in &m.graphical {
                    let img = table.get(g).cloned().unwrap_or_else(|| Self::term(Monomial::graphical(g.clone()), 1));
                    acc = &acc * &img;
                }
                acc
            }),
        }
    }

    /// Print using the canonical text grammar.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str) -> Result<Self, AlgebraError> {
        Parser::new(text).parse_poly(false)
    }

    pub fn to_json_terms(&self) -> Vec<JsonTerm> {
        self.terms
            .iter()
            .map(|(m, c)| JsonTerm {
                t: m.t,
                q: m.q,
                a: m.a,
                k: m.arrow.clone(),
                vg: m.vgrade.iter().map(|(k, n)| (k.to_string(), *n)).collect(),
                d: m.graphical.clone(),
                coeff: match c.to_i64() {
                    Some(v) => serde_json::Value::from(v),
                    None => serde_json::Value::from(c.to_string()),
                },
            })
            .collect()
    }

    pub fn from_json_terms(terms: &[JsonTerm], context: Context) -> Result<Self, AlgebraError> {
        let mut p = Self { context, terms: BTreeMap::new() };
        for t in terms {
            let mut m = Monomial { t: t.t, q: t.q, a: t.a, ..Monomial::default() };
            m.arrow = t.k.clone();
            m.arrow.sort();
            for (k, n) in &t.vg {
                let k: u32 = k.parse().map_err(|_| AlgebraError::Parse { pos: 0, msg: format!("bad vg key {k}") })?;
                if *n != 0 {
                    m.vgrade.insert(k, *n);
                }
            }
            m.graphical = t.d.clone();
            m.graphical.sort();
            let c = match &t.coeff {
                serde_json::Value::Number(n) => n
                    .as_i64()
                    .map(BigInt::from)
                    .ok_or_else(|| AlgebraError::Parse { pos: 0, msg: "non-integer coefficient".into() })?,
                serde_json::Value::String(s) => s
                    .parse::<BigInt>()
                    .map_err(|_| AlgebraError::Parse { pos: 0, msg: format!("bad coefficient {s}") })?,
                _ => return Err(AlgebraError::Parse { pos: 0, msg: "bad coefficient".into() }),
            };
            p.add_term(m, c);
        }
        Ok(p)
    }
}

impl Monomial {
    fn mirror_exponents(&self) -> Monomial {
        Monomial { t: -self.t, q: -self.q, a: -self.a, ..self.clone() }
    }
}

/// Exact substitutions supported by [`GradedPolynomial::specialize`].
#[derive(Clone, Debug)]
pub enum Substitution {
    TMinusOne,
    VgToOne,
    KToOne,
    /// Collapse repeated arrow factors, `K[i]^e -> K[i]`.
    ArrowToSet,
    /// `A -> (+/-) image` for a unit monomial image (e.g. `A -> -q^-1`).
    AToUnit { negate: bool, image: Monomial },
    /// Replace graphical factors by the given polynomials; unknown ids stay.
    Graphical(BTreeMap<String, GradedPolynomial>),
}

impl std::ops::Add for &GradedPolynomial {
    type Output = GradedPolynomial;
    fn add(self, rhs: &GradedPolynomial) -> GradedPolynomial {
        self.try_add(rhs).expect("polynomial contexts differ")
    }
}

impl std::ops::Sub for &GradedPolynomial {
    type Output = GradedPolynomial;
    fn sub(self, rhs: &GradedPolynomial) -> GradedPolynomial {
        let neg = rhs.scale(-1);
        let mut out = self.clone().with_context(Context::Integer);
        for (m, c) in neg.terms {
            out.add_term(m, c);
        }
        out
    }
}

impl std::ops::Mul for &GradedPolynomial {
    type Output = GradedPolynomial;
    fn mul(self, rhs: &GradedPolynomial) -> GradedPolynomial {
        self.try_mul(rhs).expect("polynomial contexts differ")
    }
}

impl std::ops::Neg for &GradedPolynomial {
    type Output = GradedPolynomial;
    fn neg(self) -> GradedPolynomial {
        self.scale(-1)
    }
}

/// One term of the JSON schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonTerm {
    pub t: i32,
    pub q: i32,
    #[serde(rename = "A")]
    pub a: i32,
    #[serde(rename = "K")]
    pub k: Vec<u32>,
    pub vg: BTreeMap<String, i32>,
    #[serde(rename = "D")]
    pub d: Vec<String>,
    pub coeff: serde_json::Value,
}

// ---------------------------------------------------------------------------
// printing

fn write_pow(out: &mut String, base: &str, e: i32) {
    if e == 1 {
        out.push_str(base);
    } else {
        out.push_str(&format!("{base}^{e}"));
    }
}

fn monomial_factors(m: &Monomial) -> Vec<String> {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < m.graphical.len() {
        let g = &m.graphical[i];
        let mut e = 0;
        while i < m.graphical.len() && &m.graphical[i] == g {
            e += 1;
            i += 1;
        }
        let mut s = String::new();
        // aliases like D2[1] print bare, canonical codes never start with D
        let base = if g.starts_with('D') { g.clone() } else { format!("D{{{g}}}") };
        write_pow(&mut s, &base, e);
        parts.push(s);
    }
    for (k, n) in &m.vgrade {
        parts.push(format!("vg({k},{n})"));
    }
    let mut i = 0;
    while i < m.arrow.len() {
        let n = m.arrow[i];
        let mut e = 0;
        while i < m.arrow.len() && m.arrow[i] == n {
            e += 1;
            i += 1;
        }
        let mut s = String::new();
        write_pow(&mut s, &format!("K[{n}]"), e);
        parts.push(s);
    }
    for (base, e) in [("A", m.a), ("q", m.q), ("t", m.t)] {
        if e != 0 {
            let mut s = String::new();
            write_pow(&mut s, base, e);
            parts.push(s);
        }
    }
    parts
}

impl fmt::Display for GradedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let factors = monomial_factors(m);
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs} ")?;
                }
                f.write_str(&factors.join(" "))?;
            }
        }
        Ok(())
    }
}

impl FromStr for GradedPolynomial {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

// ---------------------------------------------------------------------------
// parsing

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self { src: text.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, AlgebraError> {
        Err(AlgebraError::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_whitespace() || self.src[self.pos] == b'*') {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), AlgebraError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn starts_with(&mut self, s: &str) -> bool {
        self.skip_ws();
        self.src[self.pos..].starts_with(s.as_bytes())
    }

    fn integer(&mut self) -> Result<i64, AlgebraError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.src.len() && (self.src[self.pos] == b'-' || self.src[self.pos] == b'+') {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        match s.parse::<i64>() {
            Ok(v) => Ok(v),
            Err(_) => {
                self.pos = start;
                self.err("expected integer")
            }
        }
    }

    fn big_integer(&mut self) -> Result<BigInt, AlgebraError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        s.parse::<BigInt>().or_else(|_| {
            self.pos = start;
            self.err("expected integer")
        })
    }

    fn small(&mut self) -> Result<i32, AlgebraError> {
        let v = self.integer()?;
        i32::try_from(v).or_else(|_| self.err("integer out of range"))
    }

    /// `^e`, `^{e}` or `^(e)`; defaults to 1.
    fn exponent(&mut self) -> Result<i32, AlgebraError> {
        if !self.eat(b'^') {
            return Ok(1);
        }
        if self.eat(b'{') {
            let e = self.small()?;
            self.expect(b'}')?;
            Ok(e)
        } else if self.eat(b'(') {
            let e = self.small()?;
            self.expect(b')')?;
            Ok(e)
        } else {
            self.small()
        }
    }

    fn parse_poly(&mut self, nested: bool) -> Result<GradedPolynomial, AlgebraError> {
        let mut out = GradedPolynomial::zero();
        let mut sign = 1;
        if self.eat(b'-') {
            sign = -1;
        } else {
            self.eat(b'+');
        }
        loop {
            let term = self.parse_term()?;
            out = &out + &term.scale(sign);
            match self.peek() {
                None if !nested => break,
                Some(b')') if nested => break,
                None => return self.err("unclosed '('"),
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1;
                }
                Some(c) => return self.err(format!("unexpected '{}'", c as char)),
            }
        }
        Ok(out)
    }

    fn parse_term(&mut self) -> Result<GradedPolynomial, AlgebraError> {
        let mut coeff = BigInt::one();
        let mut have_any = false;
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            coeff = self.big_integer()?;
            have_any = true;
        }
        let mut m = Monomial::one();
        let mut groups = GradedPolynomial::one();
        loop {
            if self.eat(b'(') {
                let inner = self.parse_poly(true)?;
                self.expect(b')')?;
                let e = self.exponent()?;
                if e < 0 {
                    return self.err("negative power of a sum");
                }
                groups = &groups * &inner.pow(e as u32);
            } else if let Some(f) = self.try_factor()? {
                m = m.mul(&f);
            } else {
                break;
            }
            have_any = true;
        }
        if self.eat(b'/') {
            let denom = if self.eat(b'(') {
                let mut d = Monomial::one();
                if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    let v = self.big_integer()?;
                    if !v.is_one() {
                        return self.err("division by an integer is not supported");
                    }
                }
                while let Some(f) = self.try_factor()? {
                    d = d.mul(&f);
                }
                self.expect(b')')?;
                d
            } else {
                match self.try_factor()? {
                    Some(f) => f,
                    None => return self.err("expected factor after '/'"),
                }
            };
            if !denom.arrow.is_empty() || !denom.graphical.is_empty() {
                return self.err("only q, t, A and vg factors may appear in a denominator");
            }
            let inv = Monomial {
                t: -denom.t,
                q: -denom.q,
                a: -denom.a,
                vgrade: denom.vgrade.iter().map(|(&k, &n)| (k, -n)).collect(),
                ..Monomial::default()
            };
            m = m.mul(&inv);
        }
        if !have_any {
            return self.err("expected term");
        }
        Ok(groups.mul_monomial(&m).scale(coeff))
    }

    fn try_factor(&mut self) -> Result<Option<Monomial>, AlgebraError> {
        let Some(c) = self.peek() else { return Ok(None) };
        let mono = match c {
            b'q' => {
                self.pos += 1;
                Monomial::qt(self.exponent()?, 0)
            }
            b't' => {
                self.pos += 1;
                Monomial::qt(0, self.exponent()?)
            }
            b'A' => {
                self.pos += 1;
                Monomial::a_pow(self.exponent()?)
            }
            b'v' if self.starts_with("vg(") => {
                self.pos += 3;
                let k = self.integer()?;
                self.expect(b',')?;
                let n = self.small()?;
                self.expect(b')')?;
                let e = self.exponent()?;
                if k < 1 {
                    return self.err("vg index must be positive");
                }
                Monomial::vg(k as u32, n * e)
            }
            b'K' => {
                self.pos += 1;
                let n = if self.eat(b'[') {
                    let n = self.integer()?;
                    self.expect(b']')?;
                    n
                } else {
                    let _ = self.eat(b'_');
                    self.integer()?
                };
                if n < 1 {
                    return self.err("arrow index must be positive");
                }
                let e = self.exponent()?;
                if e < 0 {
                    return self.err("negative arrow exponent");
                }
                Monomial { arrow: vec![n as u32; e as usize], ..Monomial::default() }
            }
            b'D' => {
                self.pos += 1;
                let id = if self.src.get(self.pos) == Some(&b'{') {
                    self.pos += 1;
                    let start = self.pos;
                    while self.pos < self.src.len() && self.src[self.pos] != b'}' {
                        self.pos += 1;
                    }
                    if self.pos >= self.src.len() {
                        return self.err("unterminated graphical id");
                    }
                    let id = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
                    self.pos += 1;
                    id
                } else {
                    // alias form D2[1] / D_2[1]
                    let _ = self.eat(b'_');
                    let n = self.integer()?;
                    self.expect(b'[')?;
                    let k = self.integer()?;
                    self.expect(b']')?;
                    format!("D{n}[{k}]")
                };
                let e = self.exponent()?;
                if e < 0 {
                    return self.err("negative graphical exponent");
                }
                Monomial { graphical: vec![id; e as usize], ..Monomial::default() }
            }
            _ => return Ok(None),
        };
        Ok(Some(mono))
    }
}
