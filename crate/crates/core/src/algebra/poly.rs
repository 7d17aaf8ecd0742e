//! Sparse multivariate polynomials over Q with dense exponent vectors.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::rational::{format_rational, parse_rational, Rational};
use super::AlgebraError;

/// Ordered list of variable names shared by a family of polynomials.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VarContext(Arc<[String]>);

impl VarContext {
    pub fn new<I, S>(names: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() {
                return Err(AlgebraError::Parse("empty variable name".into()));
            }
            if names[..i].contains(n) {
                return Err(AlgebraError::DuplicateVariable(n.clone()));
            }
        }
        Ok(VarContext(names.into()))
    }

    pub fn empty() -> Self {
        VarContext(Arc::from(Vec::<String>::new()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    /// Variables of `self` followed by the variables of `other` not already present.
    pub fn union(&self, other: &VarContext) -> VarContext {
        if self == other {
            return self.clone();
        }
        let mut names: Vec<String> = self.0.to_vec();
        for n in other.0.iter() {
            if !names.contains(n) {
                names.push(n.clone());
            }
        }
        VarContext(names.into())
    }

    /// Appends fresh variables; fails if any already exists.
    pub fn extended<S: AsRef<str>>(&self, extra: &[S]) -> Result<VarContext, AlgebraError> {
        let mut names: Vec<String> = self.0.to_vec();
        names.extend(extra.iter().map(|s| s.as_ref().to_string()));
        VarContext::new(names)
    }

    pub fn without<S: AsRef<str>>(&self, drop: &[S]) -> VarContext {
        let names: Vec<String> = self
            .0
            .iter()
            .filter(|n| !drop.iter().any(|d| d.as_ref() == n.as_str()))
            .cloned()
            .collect();
        VarContext(names.into())
    }

    /// A name starting with `stem` that does not clash with any variable here.
    pub fn fresh_name(&self, stem: &str) -> String {
        let mut k = 0usize;
        loop {
            let cand = if k == 0 { stem.to_string() } else { format!("{stem}{k}") };
            if !self.contains(&cand) {
                return cand;
            }
            k += 1;
        }
    }
}

impl fmt::Debug for VarContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.0[..])
    }
}

/// Exponent vector, one entry per context variable.
pub type Exponents = Vec<u32>;

/// Exact polynomial in the variables of its context.
///
/// Terms are stored in a `BTreeMap`, so two polynomials are equal exactly
/// when their contexts and term maps agree; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    ctx: VarContext,
    terms: BTreeMap<Exponents, Rational>,
}

impl MultiPoly {
    pub fn zero(ctx: &VarContext) -> Self {
        MultiPoly {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &VarContext) -> Self {
        Self::constant(ctx, Rational::one())
    }

    pub fn constant(ctx: &VarContext, c: Rational) -> Self {
        let mut p = Self::zero(ctx);
        if !c.is_zero() {
            p.terms.insert(vec![0; ctx.len()], c);
        }
        p
    }

    pub fn from_int(ctx: &VarContext, c: i64) -> Self {
        Self::constant(ctx, Rational::from_integer(BigInt::from(c)))
    }

    pub fn var(ctx: &VarContext, name: &str) -> Result<Self, AlgebraError> {
        let i = ctx
            .index_of(name)
            .ok_or_else(|| AlgebraError::UnknownVariable(name.to_string()))?;
        let mut e = vec![0; ctx.len()];
        e[i] = 1;
        Ok(Self::monomial(ctx, e, Rational::one()))
    }

    pub fn monomial(ctx: &VarContext, exps: Exponents, coef: Rational) -> Self {
        assert_eq!(exps.len(), ctx.len(), "exponent vector length");
        let mut p = Self::zero(ctx);
        if !coef.is_zero() {
            p.terms.insert(exps, coef);
        }
        p
    }

    /// Builds a polynomial from raw terms, merging duplicates and dropping zeros.
    pub fn from_terms<I>(ctx: &VarContext, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (Exponents, Rational)>,
    {
        let mut p = Self::zero(ctx);
        for (e, c) in terms {
            if e.len() != ctx.len() {
                return Err(AlgebraError::Shape(format!(
                    "exponent vector of length {} in a context of {} variables",
                    e.len(),
                    ctx.len()
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub(crate) fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn ctx(&self) -> &VarContext {
        &self.ctx
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    /// The value if the polynomial is constant.
    pub fn constant_value(&self) -> Option<Rational> {
        if !self.is_constant() {
            return None;
        }
        Some(self.terms.values().next().cloned().unwrap_or_else(Rational::zero))
    }

    pub fn coefficient(&self, e: &[u32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, var: &str) -> Result<Option<u32>, AlgebraError> {
        let i = self.index(var)?;
        Ok(self.terms.keys().map(|e| e[i]).max())
    }

    /// Whether `var` appears with positive exponent.
    pub fn involves(&self, var: &str) -> bool {
        match self.ctx.index_of(var) {
            Some(i) => self.terms.keys().any(|e| e[i] > 0),
            None => false,
        }
    }

    /// Names of the variables that actually occur.
    pub fn occurring_vars(&self) -> Vec<String> {
        (0..self.ctx.len())
            .filter(|&i| self.terms.keys().any(|e| e[i] > 0))
            .map(|i| self.ctx.names()[i].clone())
            .collect()
    }

    fn index(&self, var: &str) -> Result<usize, AlgebraError> {
        self.ctx
            .index_of(var)
            .ok_or_else(|| AlgebraError::UnknownVariable(var.to_string()))
    }

    fn check_ctx(&self, other: &MultiPoly) -> Result<(), AlgebraError> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(AlgebraError::ContextMismatch {
                left: self.ctx.names().to_vec(),
                right: other.ctx.names().to_vec(),
            })
        }
    }

    pub fn checked_add(&self, other: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
        self.check_ctx(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
        self.check_ctx(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
        self.check_ctx(other)?;
        let mut out = MultiPoly::zero(&self.ctx);
        if self.is_zero() || other.is_zero() {
            return Ok(out);
        }
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut k: u32) -> MultiPoly {
        let mut base = self.clone();
        let mut acc = MultiPoly::one(&self.ctx);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.ctx);
        }
        MultiPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Re-expresses the polynomial in `target`. Variables that do not occur
    /// may be absent from `target`.
    pub fn embed(&self, target: &VarContext) -> Result<MultiPoly, AlgebraError> {
        if &self.ctx == target {
            return Ok(self.clone());
        }
        let mut map = Vec::with_capacity(self.ctx.len());
        for (i, name) in self.ctx.names().iter().enumerate() {
            match target.index_of(name) {
                Some(j) => map.push(Some(j)),
                None => {
                    if self.terms.keys().any(|e| e[i] > 0) {
                        return Err(AlgebraError::UnknownVariable(name.clone()));
                    }
                    map.push(None);
                }
            }
        }
        let mut out = MultiPoly::zero(target);
        for (e, c) in &self.terms {
            let mut ne = vec![0; target.len()];
            for (i, &x) in e.iter().enumerate() {
                if let Some(j) = map[i] {
                    ne[j] = x;
                }
            }
            out.terms.insert(ne, c.clone());
        }
        Ok(out)
    }

    /// Substitutes every occurring variable. All assigned values must live in
    /// `target`; the result does too.
    pub fn eval(
        &self,
        assignment: &BTreeMap<String, MultiPoly>,
        target: &VarContext,
    ) -> Result<MultiPoly, AlgebraError> {
        for v in assignment.values() {
            if v.ctx() != target {
                return Err(AlgebraError::ContextMismatch {
                    left: target.names().to_vec(),
                    right: v.ctx().names().to_vec(),
                });
            }
        }
        let mut slots: Vec<Option<&MultiPoly>> = Vec::with_capacity(self.ctx.len());
        for (i, name) in self.ctx.names().iter().enumerate() {
            let val = assignment.get(name);
            if val.is_none() && self.terms.keys().any(|e| e[i] > 0) {
                return Err(AlgebraError::IncompleteAssignment(name.clone()));
            }
            slots.push(val);
        }
        let mut powers: HashMap<(usize, u32), MultiPoly> = HashMap::new();
        let mut out = MultiPoly::zero(target);
        for (e, c) in &self.terms {
            let mut term = MultiPoly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let pw = powers
                    .entry((i, k))
                    .or_insert_with(|| slots[i].expect("checked above").pow(k));
                term = &term * pw;
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Replaces a single variable, keeping all others. The result lives in
    /// the union of the remaining context and the context of `value`.
    pub fn substitute(&self, var: &str, value: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
        self.index(var)?;
        let target = self.ctx.without(&[var]).union(value.ctx());
        let value = value.embed(&target)?;
        let mut assignment = BTreeMap::new();
        for name in self.ctx.names() {
            if name == var {
                assignment.insert(name.clone(), value.clone());
            } else {
                assignment.insert(name.clone(), MultiPoly::var(&target, name)?);
            }
        }
        self.eval(&assignment, &target)
    }

    pub fn partial_derivative(&self, var: &str) -> Result<MultiPoly, AlgebraError> {
        let i = self.index(var)?;
        let mut out = MultiPoly::zero(&self.ctx);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[i] -= 1;
            out.add_term(ne, c * Rational::from_integer(BigInt::from(e[i])));
        }
        Ok(out)
    }

    /// Splits off the variables in `vars`: returns a map from exponent vectors
    /// in those variables (in the given order) to coefficients living in the
    /// context with those variables removed.
    pub fn coefficients_in<S: AsRef<str>>(
        &self,
        vars: &[S],
    ) -> Result<BTreeMap<Exponents, MultiPoly>, AlgebraError> {
        let idx: Vec<usize> = vars
            .iter()
            .map(|v| self.index(v.as_ref()))
            .collect::<Result<_, _>>()?;
        let rest_ctx = self.ctx.without(vars);
        let rest_idx: Vec<usize> = (0..self.ctx.len()).filter(|i| !idx.contains(i)).collect();
        let mut out: BTreeMap<Exponents, MultiPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let key: Exponents = idx.iter().map(|&i| e[i]).collect();
            let rest: Exponents = rest_idx.iter().map(|&i| e[i]).collect();
            out.entry(key)
                .or_insert_with(|| MultiPoly::zero(&rest_ctx))
                .add_term(rest, c.clone());
        }
        Ok(out)
    }

    /// Coefficients of increasing powers of `var`, over the remaining variables.
    pub fn univariate_coefficients(&self, var: &str) -> Result<Vec<MultiPoly>, AlgebraError> {
        let parts = self.coefficients_in(&[var])?;
        let rest_ctx = self.ctx.without(&[var]);
        let deg = parts.keys().map(|k| k[0]).max().unwrap_or(0) as usize;
        let mut out = vec![MultiPoly::zero(&rest_ctx); deg + 1];
        for (k, c) in parts {
            out[k[0] as usize] = c;
        }
        Ok(out)
    }

    /// Inverse of [`univariate_coefficients`](Self::univariate_coefficients):
    /// `Σ coeffs[k] · var^k` in `target`.
    pub fn from_univariate(
        coeffs: &[MultiPoly],
        var: &str,
        target: &VarContext,
    ) -> Result<MultiPoly, AlgebraError> {
        let x = MultiPoly::var(target, var)?;
        let mut acc = MultiPoly::zero(target);
        for c in coeffs.iter().rev() {
            acc = &(&acc * &x) + &c.embed(target)?;
        }
        Ok(acc)
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &MultiPoly) -> Result<Option<MultiPoly>, AlgebraError> {
        self.check_ctx(d)?;
        if d.is_zero() {
            return Err(AlgebraError::DegenerateInput("division by zero polynomial".into()));
        }
        // Single-divisor division in lex order: the remainder is zero iff d | self.
        let (lt_e, lt_c) = d.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone())).unwrap();
        let mut rem = self.clone();
        let mut quo = MultiPoly::zero(&self.ctx);
        while let Some((e, c)) = rem.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            if e.iter().zip(&lt_e).any(|(a, b)| a < b) {
                return Ok(None);
            }
            let qe: Exponents = e.iter().zip(&lt_e).map(|(a, b)| a - b).collect();
            let qc = c / &lt_c;
            let step = MultiPoly::monomial(&self.ctx, qe.clone(), qc.clone());
            rem = &rem - &(&step * d);
            quo.add_term(qe, qc);
        }
        Ok(Some(quo))
    }

    /// Multiplies by the least common denominator and divides by the gcd of
    /// numerators so that the result has coprime integer coefficients and a
    /// positive leading coefficient (in the stored order).
    pub fn primitive_part(&self) -> MultiPoly {
        use num_integer::Integer;
        if self.is_zero() {
            return self.clone();
        }
        let mut lcm = BigInt::one();
        for c in self.terms.values() {
            lcm = lcm.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            let n = c.numer() * (&lcm / c.denom());
            g = g.gcd(&n);
        }
        let lead_neg = self.terms.values().next_back().map(|c| c.is_negative()).unwrap_or(false);
        let mut s = Rational::new(lcm, g);
        if lead_neg {
            s = -s;
        }
        self.scale(&s)
    }

    pub fn parse(ctx: &VarContext, src: &str) -> Result<MultiPoly, AlgebraError> {
        Parser::new(ctx, src).parse()
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mut factors: Vec<String> = Vec::new();
            let is_const = e.iter().all(|&x| x == 0);
            if !abs.is_one() || is_const {
                factors.push(format_rational(&abs));
            }
            for (i, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => factors.push(self.ctx.names()[i].clone()),
                    _ => factors.push(format!("{}^{}", self.ctx.names()[i], x)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({} in {:?})", self, self.ctx)
    }
}

// Operator forms panic on a context mismatch; use the `checked_*` methods
// when contexts come from user input.
macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&MultiPoly> for &MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: &MultiPoly) -> MultiPoly {
                self.$checked(rhs).expect("polynomial context mismatch")
            }
        }
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$checked(&rhs).expect("polynomial context mismatch")
            }
        }
        impl $tr<&MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: &MultiPoly) -> MultiPoly {
                (&self).$checked(rhs).expect("polynomial context mismatch")
            }
        }
    };
}
binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

/// Small recursive-descent reader for expressions such as `x^2 - 3/4*a_2*x + 1`.
struct Parser<'a> {
    ctx: &'a VarContext,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(ctx: &'a VarContext, src: &str) -> Self {
        Parser {
            ctx,
            chars: src.chars().collect(),
            pos: 0,
        }
    }

    fn err(&self, msg: &str) -> AlgebraError {
        let src: String = self.chars.iter().collect();
        AlgebraError::Parse(format!("{msg} at offset {} in {src:?}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<MultiPoly, AlgebraError> {
        let p = self.expr()?;
        if self.peek().is_some() {
            return Err(self.err("trailing input"));
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<MultiPoly, AlgebraError> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                '-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly, AlgebraError> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                '*' => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                '/' => {
                    self.pos += 1;
                    let d = self.unary()?;
                    match d.constant_value() {
                        Some(v) if !v.is_zero() => acc = acc.scale(&(Rational::one() / v)),
                        _ => return Err(self.err("division by a non-constant or zero")),
                    }
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly, AlgebraError> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiPoly, AlgebraError> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let digits: String = self.chars[start..self.pos].iter().collect();
            let k: u32 = digits.parse().map_err(|_| self.err("expected exponent"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly, AlgebraError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let p = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(p)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits: String = self.chars[start..self.pos].iter().collect();
                Ok(MultiPoly::constant(self.ctx, parse_rational(&digits)?))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
                {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                MultiPoly::var(self.ctx, &name)
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}
