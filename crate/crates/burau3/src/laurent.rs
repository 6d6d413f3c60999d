//! Sparse Laurent polynomials with exact coefficients.
//!
//! Everything downstream works in `Z[t, t^-1]` or `Q[t, t^-1]`, so the two
//! aliases [`IntPoly`] and [`RatPoly`] cover all uses. Polynomials are kept
//! canonical: the coefficient map never stores a zero, which makes structural
//! equality semantic equality. The bar involution `t -> t^-1`, evaluation at
//! a nonzero rational, evaluation at the primitive cube root of unity, and
//! the derivative evaluated at `t = -1` are the operations the Burau
//! machinery leans on.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Errors raised by Laurent polynomial operations and parsing.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LaurentError {
    /// The relative degree of the zero polynomial is undefined.
    #[error("relative degree of the zero polynomial is undefined")]
    ZeroRelativeDegree,
    /// Laurent polynomials cannot be evaluated at zero.
    #[error("evaluation at t = 0 is undefined for Laurent polynomials")]
    EvalAtZero,
    /// The input text does not match the polynomial grammar.
    #[error("polynomial parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    /// An integer polynomial was required but a coefficient is fractional.
    #[error("coefficient {coeff} of t^{exp} is not an integer")]
    NonIntegerCoeff { exp: i64, coeff: String },
}

/// A sparse Laurent polynomial; exponents may be negative.
///
/// Invariant: `coeffs` never contains a zero coefficient.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LaurentPoly<C> {
    coeffs: BTreeMap<i64, C>,
}

/// Laurent polynomial over the integers.
pub type IntPoly = LaurentPoly<BigInt>;
/// Laurent polynomial over the rationals.
pub type RatPoly = LaurentPoly<BigRational>;

impl<C: Zero + Clone> LaurentPoly<C> {
    /// The zero polynomial.
    pub fn zero() -> Self {
        LaurentPoly { coeffs: BTreeMap::new() }
    }

    /// The single term `c * t^exp`.
    pub fn monomial(exp: i64, c: C) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(exp, c);
        }
        LaurentPoly { coeffs }
    }

    /// The constant polynomial `c`.
    pub fn constant(c: C) -> Self {
        Self::monomial(0, c)
    }

    /// Accumulates terms, summing repeated exponents and dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = (i64, C)>>(terms: I) -> Self {
        let mut acc: BTreeMap<i64, C> = BTreeMap::new();
        for (exp, c) in terms {
            let entry = acc.remove(&exp).map(|old| add_c(old, c.clone())).unwrap_or(c);
            if !entry.is_zero() {
                acc.insert(exp, entry);
            }
        }
        LaurentPoly { coeffs: acc }
    }

    /// True iff this is the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The coefficient of `t^exp` (zero if absent).
    pub fn coeff(&self, exp: i64) -> C {
        self.coeffs.get(&exp).cloned().unwrap_or_else(C::zero)
    }

    /// Iterates `(exponent, coefficient)` pairs in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    /// Number of nonzero terms.
    pub fn term_count(&self) -> usize {
        self.coeffs.len()
    }

    /// Smallest exponent with a nonzero coefficient.
    pub fn lowest_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Largest exponent with a nonzero coefficient.
    pub fn highest_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Coefficient of the smallest exponent.
    pub fn lowest_coeff(&self) -> Option<&C> {
        self.coeffs.values().next()
    }

    /// Coefficient of the largest exponent.
    pub fn highest_coeff(&self) -> Option<&C> {
        self.coeffs.values().next_back()
    }

    /// Exponent spread `highest - lowest`; undefined for zero.
    pub fn relative_degree(&self) -> Result<i64, LaurentError> {
        match (self.lowest_exp(), self.highest_exp()) {
            (Some(lo), Some(hi)) => Ok(hi - lo),
            _ => Err(LaurentError::ZeroRelativeDegree),
        }
    }

    /// True iff the polynomial is a constant (possibly zero).
    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty() || (self.coeffs.len() == 1 && self.coeffs.contains_key(&0))
    }

    /// Returns the constant value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<C> {
        if self.is_zero() {
            Some(C::zero())
        } else if self.is_constant() {
            Some(self.coeff(0))
        } else {
            None
        }
    }

    /// Returns `(exp, coeff)` if the polynomial is a single term.
    pub fn as_monomial(&self) -> Option<(i64, &C)> {
        if self.coeffs.len() == 1 {
            self.coeffs.iter().next().map(|(e, c)| (*e, c))
        } else {
            None
        }
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }

    /// The bar involution `t -> t^-1`.
    pub fn bar(&self) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(e, c)| (-e, c.clone())).collect() }
    }
}

// Small by-value add used by from_terms; avoids asking C for AddAssign.
fn add_c<C: Zero>(a: C, b: C) -> C {
    a + b
}

impl<C> LaurentPoly<C>
where
    C: Zero + Clone,
    for<'a> &'a C: std::ops::Add<&'a C, Output = C>
        + std::ops::Sub<&'a C, Output = C>
        + std::ops::Mul<&'a C, Output = C>
        + std::ops::Neg<Output = C>,
{
    /// Sum of two polynomials.
    pub fn add(&self, other: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (e, c) in &other.coeffs {
            match coeffs.remove(e) {
                Some(old) => {
                    let s = &old + c;
                    if !s.is_zero() {
                        coeffs.insert(*e, s);
                    }
                }
                None => {
                    coeffs.insert(*e, c.clone());
                }
            }
        }
        LaurentPoly { coeffs }
    }

    /// Difference `self - other`.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect() }
    }

    /// Product of two polynomials (naive convolution; inputs stay small).
    pub fn mul(&self, other: &Self) -> Self {
        let mut acc: BTreeMap<i64, C> = BTreeMap::new();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                let e = ea + eb;
                let prod = ca * cb;
                match acc.remove(&e) {
                    Some(old) => {
                        let s = &old + &prod;
                        if !s.is_zero() {
                            acc.insert(e, s);
                        }
                    }
                    None => {
                        if !prod.is_zero() {
                            acc.insert(e, prod);
                        }
                    }
                }
            }
        }
        LaurentPoly { coeffs: acc }
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { coeffs: self.coeffs.iter().map(|(e, a)| (*e, a * c)).collect() }
    }
}

macro_rules! impl_ops {
    ($C:ty) => {
        impl std::ops::Add for &LaurentPoly<$C> {
            type Output = LaurentPoly<$C>;
            fn add(self, rhs: Self) -> LaurentPoly<$C> {
                LaurentPoly::add(self, rhs)
            }
        }
        impl std::ops::Sub for &LaurentPoly<$C> {
            type Output = LaurentPoly<$C>;
            fn sub(self, rhs: Self) -> LaurentPoly<$C> {
                LaurentPoly::sub(self, rhs)
            }
        }
        impl std::ops::Mul for &LaurentPoly<$C> {
            type Output = LaurentPoly<$C>;
            fn mul(self, rhs: Self) -> LaurentPoly<$C> {
                LaurentPoly::mul(self, rhs)
            }
        }
        impl std::ops::Neg for &LaurentPoly<$C> {
            type Output = LaurentPoly<$C>;
            fn neg(self) -> LaurentPoly<$C> {
                LaurentPoly::neg(self)
            }
        }
    };
}

impl_ops!(BigInt);
impl_ops!(BigRational);

impl IntPoly {
    /// Gcd of all coefficients, nonnegative; zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.coeffs.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Exact quotient by an integer that divides every coefficient.
    pub fn div_scalar_exact(&self, d: &BigInt) -> Option<IntPoly> {
        let mut coeffs = BTreeMap::new();
        for (e, c) in &self.coeffs {
            let (q, r) = c.div_rem(d);
            if !r.is_zero() {
                return None;
            }
            coeffs.insert(*e, q);
        }
        Some(LaurentPoly { coeffs })
    }

    /// Lossless embedding into `Q[t, t^-1]`.
    pub fn to_rational(&self) -> RatPoly {
        LaurentPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (*e, BigRational::from_integer(c.clone())))
                .collect(),
        }
    }

    /// Exact quotient `self / divisor`, or `None` if division leaves a remainder.
    pub fn div_exact(&self, divisor: &IntPoly) -> Option<IntPoly> {
        self.to_rational().div_exact(&divisor.to_rational())?.to_int_poly()
    }

    /// Evaluation at a nonzero rational point.
    pub fn eval(&self, x: &BigRational) -> Result<BigRational, LaurentError> {
        self.to_rational().eval(x)
    }

    /// Evaluation at `t = -1`, staying in the integers.
    pub fn eval_neg1(&self) -> BigInt {
        let mut acc = BigInt::zero();
        for (e, c) in &self.coeffs {
            if e.rem_euclid(2) == 0 {
                acc += c;
            } else {
                acc -= c;
            }
        }
        acc
    }

    /// Evaluation at `t = 1`, staying in the integers.
    pub fn eval_one(&self) -> BigInt {
        self.coeffs.values().sum()
    }

    /// Value of the formal derivative at `t = -1`, staying in the integers.
    pub fn derivative_eval_neg1(&self) -> BigInt {
        let mut acc = BigInt::zero();
        for (e, c) in &self.coeffs {
            // d/dt (c t^e) = c e t^(e-1); (-1)^(e-1) = (-1)^(e+1).
            let term = c * BigInt::from(*e);
            if (e + 1).rem_euclid(2) == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    /// Evaluation at the primitive cube root of unity.
    pub fn eval_zeta3(&self) -> EisensteinValue {
        eval_zeta3_impl(self.coeffs.iter().map(|(e, c)| (*e, BigRational::from_integer(c.clone()))))
    }
}

impl RatPoly {
    /// Evaluation at a nonzero rational point; negative exponents invert `x`.
    pub fn eval(&self, x: &BigRational) -> Result<BigRational, LaurentError> {
        if x.is_zero() {
            return Err(LaurentError::EvalAtZero);
        }
        let x_inv = x.recip();
        let mut acc = BigRational::zero();
        for (e, c) in &self.coeffs {
            let base = if *e >= 0 { x.clone() } else { x_inv.clone() };
            let p = pow_u(&base, e.unsigned_abs());
            acc += c * p;
        }
        Ok(acc)
    }

    /// Value of the formal derivative at `t = -1`.
    pub fn derivative_eval_neg1(&self) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.coeffs {
            let term = c * BigRational::from_integer(BigInt::from(*e));
            if (e + 1).rem_euclid(2) == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    /// Evaluation at the primitive cube root of unity.
    pub fn eval_zeta3(&self) -> EisensteinValue {
        eval_zeta3_impl(self.coeffs.iter().map(|(e, c)| (*e, c.clone())))
    }

    /// Converts to an integer polynomial if every coefficient is integral.
    pub fn to_int_poly(&self) -> Option<IntPoly> {
        let mut coeffs = BTreeMap::new();
        for (e, c) in &self.coeffs {
            if !c.is_integer() {
                return None;
            }
            coeffs.insert(*e, c.to_integer());
        }
        Some(LaurentPoly { coeffs })
    }

    /// Least common multiple of all coefficient denominators (1 for zero).
    pub fn denominator_lcm(&self) -> BigInt {
        let mut l = BigInt::one();
        for c in self.coeffs.values() {
            l = l.lcm(c.denom());
        }
        l
    }

    /// Exact quotient `self / divisor`, or `None` if division leaves a remainder.
    ///
    /// Long division from the top: exact divisibility in `Q[t, t^-1]` does not
    /// depend on which end we eliminate from, and the leading coefficient of
    /// the divisor is invertible because coefficients form a field.
    pub fn div_exact(&self, divisor: &RatPoly) -> Option<RatPoly> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(RatPoly::zero());
        }
        let d_hi = divisor.highest_exp().unwrap();
        let d_lead = divisor.highest_coeff().unwrap().clone();
        let mut rem = self.clone();
        let mut quot = BTreeMap::new();
        while !rem.is_zero() {
            let r_hi = rem.highest_exp().unwrap();
            let r_lo = rem.lowest_exp().unwrap();
            // Once the remainder is narrower than the divisor it can only be
            // cleared if it is already zero.
            if r_hi - r_lo < d_hi - divisor.lowest_exp().unwrap() {
                return None;
            }
            let q_exp = r_hi - d_hi;
            let q_coeff = rem.highest_coeff().unwrap() / &d_lead;
            quot.insert(q_exp, q_coeff.clone());
            let t = RatPoly::monomial(q_exp, q_coeff);
            rem = rem.sub(&t.mul(divisor));
        }
        Some(LaurentPoly { coeffs: quot })
    }
}

fn pow_u(x: &BigRational, mut n: u64) -> BigRational {
    let mut base = x.clone();
    let mut acc = BigRational::one();
    while n > 0 {
        if n & 1 == 1 {
            acc *= &base;
        }
        n >>= 1;
        if n > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// An element `a + b*zeta3` of `Q(zeta3)`, with `zeta3^2 + zeta3 + 1 = 0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EisensteinValue {
    /// Rational part.
    pub a: BigRational,
    /// Coefficient of `zeta3`.
    pub b: BigRational,
}

impl EisensteinValue {
    /// The value 1.
    pub fn one() -> Self {
        EisensteinValue { a: BigRational::one(), b: BigRational::zero() }
    }

    /// The value 0.
    pub fn zero() -> Self {
        EisensteinValue { a: BigRational::zero(), b: BigRational::zero() }
    }

    /// True iff the value equals 1.
    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    /// Product in `Q(zeta3)`, reducing by `zeta3^2 = -1 - zeta3`.
    pub fn mul(&self, other: &Self) -> Self {
        let ac = &self.a * &other.a;
        let bd = &self.b * &other.b;
        let ad_bc = &self.a * &other.b + &self.b * &other.a;
        EisensteinValue { a: &ac - &bd, b: &ad_bc - &bd }
    }

    /// Field norm `a^2 - a b + b^2`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.a * &self.b + &self.b * &self.b
    }
}

impl fmt::Display for EisensteinValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if self.a.is_zero() {
            if self.b.is_one() {
                return write!(f, "z3");
            }
            return write!(f, "{}*z3", self.b);
        }
        if self.b.is_negative() {
            let nb = -self.b.clone();
            if nb.is_one() {
                write!(f, "{} - z3", self.a)
            } else {
                write!(f, "{} - {}*z3", self.a, nb)
            }
        } else if self.b.is_one() {
            write!(f, "{} + z3", self.a)
        } else {
            write!(f, "{} + {}*z3", self.a, self.b)
        }
    }
}

// Reduces each power through t^3 = 1 at zeta3, with zeta3^2 = -1 - zeta3;
// this also eliminates negative exponents since t^-1 = t^2 there.
fn eval_zeta3_impl<I: Iterator<Item = (i64, BigRational)>>(terms: I) -> EisensteinValue {
    let mut a = BigRational::zero();
    let mut b = BigRational::zero();
    for (e, c) in terms {
        match e.rem_euclid(3) {
            0 => a += c,
            1 => b += c,
            _ => {
                a -= &c;
                b -= &c;
            }
        }
    }
    EisensteinValue { a, b }
}

// Text format: signed terms joined by `+`/`-`, each `c`, `c*t^k`, `t^k`, `t`,
// or `c*t`; exponent-0 terms print as the bare coefficient.

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, self.coeffs.iter().map(|(e, c)| (*e, c.clone().into())))
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, self.coeffs.iter().map(|(e, c)| (*e, c.clone())))
    }
}

fn write_poly<I>(f: &mut fmt::Formatter<'_>, terms: I) -> fmt::Result
where
    I: Iterator<Item = (i64, BigRational)>,
{
    let mut first = true;
    for (e, c) in terms {
        let neg = c.is_negative();
        let mag = if neg { -c } else { c };
        if first {
            if neg {
                write!(f, "-")?;
            }
            first = false;
        } else if neg {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        let unit = mag.is_one();
        match (e, unit) {
            (0, _) => write!(f, "{mag}")?,
            (1, true) => write!(f, "t")?,
            (1, false) => write!(f, "{mag}*t")?,
            (_, true) => write!(f, "t^{e}")?,
            (_, false) => write!(f, "{mag}*t^{e}")?,
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl FromStr for RatPoly {
    type Err = LaurentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Parser::new(s).parse_poly()
    }
}

impl FromStr for IntPoly {
    type Err = LaurentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rat: RatPoly = s.parse()?;
        rat.to_int_poly().ok_or_else(|| {
            let (e, c) = rat
                .terms()
                .find(|(_, c)| !c.is_integer())
                .map(|(e, c)| (e, c.clone()))
                .expect("a fractional coefficient exists");
            LaurentError::NonIntegerCoeff { exp: e, coeff: c.to_string() }
        })
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Self {
        Parser { bytes: s.as_bytes(), pos: 0 }
    }

    fn error(&self, msg: &str) -> LaurentError {
        LaurentError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek();
        if b.is_some() {
            self.pos += 1;
        }
        b
    }

    fn parse_poly(&mut self) -> Result<RatPoly, LaurentError> {
        let mut terms: Vec<(i64, BigRational)> = Vec::new();
        self.skip_ws();
        if self.peek().is_none() {
            return Err(self.error("empty input"));
        }
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.bump();
                -1
            }
            Some(b'+') => {
                self.bump();
                1
            }
            _ => 1,
        };
        loop {
            self.skip_ws();
            let (e, c) = self.parse_term()?;
            let c = if sign < 0 { -c } else { c };
            terms.push((e, c));
            self.skip_ws();
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.bump();
                    sign = 1;
                }
                Some(b'-') => {
                    self.bump();
                    sign = -1;
                }
                Some(_) => return Err(self.error("expected '+' or '-' between terms")),
            }
        }
        Ok(RatPoly::from_terms(terms))
    }

    // term := rational ['*' tpart] | tpart
    fn parse_term(&mut self) -> Result<(i64, BigRational), LaurentError> {
        if self.peek() == Some(b't') {
            let e = self.parse_tpart()?;
            return Ok((e, BigRational::one()));
        }
        let c = self.parse_rational()?;
        self.skip_ws();
        if self.peek() == Some(b'*') {
            self.bump();
            self.skip_ws();
            if self.peek() != Some(b't') {
                return Err(self.error("expected 't' after '*'"));
            }
            let e = self.parse_tpart()?;
            Ok((e, c))
        } else {
            Ok((0, c))
        }
    }

    // tpart := 't' ['^' integer]
    fn parse_tpart(&mut self) -> Result<i64, LaurentError> {
        self.bump(); // consume 't'
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.bump();
            self.skip_ws();
            self.parse_i64()
        } else {
            Ok(1)
        }
    }

    // rational := integer ['/' positive-integer]
    fn parse_rational(&mut self) -> Result<BigRational, LaurentError> {
        let numer = self.parse_bigint()?;
        self.skip_ws();
        if self.peek() == Some(b'/') {
            self.bump();
            self.skip_ws();
            let denom = self.parse_bigint()?;
            if denom.is_zero() {
                return Err(self.error("zero denominator"));
            }
            Ok(BigRational::new(numer, denom))
        } else {
            Ok(BigRational::from_integer(numer))
        }
    }

    fn parse_bigint(&mut self) -> Result<BigInt, LaurentError> {
        let neg = if self.peek() == Some(b'-') {
            self.bump();
            true
        } else {
            false
        };
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            self.bump();
        }
        if self.pos == start {
            return Err(self.error("expected digits"));
        }
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        let mut n: BigInt = digits.parse().expect("digits parse as BigInt");
        if neg {
            n = -n;
        }
        Ok(n)
    }

    fn parse_i64(&mut self) -> Result<i64, LaurentError> {
        let n = self.parse_bigint()?;
        i64::try_from(n).map_err(|_| self.error("exponent out of range"))
    }
}

/// Convenience constructors used across the crate and its tests.
pub mod poly {
    use super::*;

    /// Integer polynomial from `(exponent, coefficient)` pairs.
    pub fn int(terms: &[(i64, i64)]) -> IntPoly {
        IntPoly::from_terms(terms.iter().map(|&(e, c)| (e, BigInt::from(c))))
    }

    /// Rational polynomial from `(exponent, numerator, denominator)` triples.
    pub fn rat(terms: &[(i64, i64, i64)]) -> RatPoly {
        RatPoly::from_terms(
            terms
                .iter()
                .map(|&(e, n, d)| (e, BigRational::new(BigInt::from(n), BigInt::from(d)))),
        )
    }

    /// The polynomial `1 + t`.
    pub fn one_plus_t() -> IntPoly {
        int(&[(0, 1), (1, 1)])
    }

    /// The polynomial `1 + t + t^2`.
    pub fn cyclo3() -> IntPoly {
        int(&[(0, 1), (1, 1), (2, 1)])
    }

    /// The palindromic unit trace `t^-1 + 1 + t`.
    pub fn phi_sym() -> IntPoly {
        int(&[(-1, 1), (0, 1), (1, 1)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(terms: &[(i64, i64)]) -> IntPoly {
        poly::int(terms)
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    // Independent oracle: term-by-term addition on raw exponent maps.
    fn naive_add(a: &[(i64, i64)], b: &[(i64, i64)]) -> Vec<(i64, i64)> {
        let mut m: BTreeMap<i64, i64> = BTreeMap::new();
        for &(e, c) in a.iter().chain(b) {
            *m.entry(e).or_insert(0) += c;
        }
        m.into_iter().filter(|&(_, c)| c != 0).collect()
    }

    // Independent oracle: distribute every pair of terms.
    fn naive_mul(a: &[(i64, i64)], b: &[(i64, i64)]) -> Vec<(i64, i64)> {
        let mut m: BTreeMap<i64, i64> = BTreeMap::new();
        for &(ea, ca) in a {
            for &(eb, cb) in b {
                *m.entry(ea + eb).or_insert(0) += ca * cb;
            }
        }
        m.into_iter().filter(|&(_, c)| c != 0).collect()
    }

    #[test]
    fn add_matches_termwise_oracle() {
        let a = [(0, 1), (1, -1), (3, 1)];
        let b = [(1, 1), (2, -1)];
        let expect = naive_add(&a, &b);
        assert_eq!(expect, vec![(0, 1), (2, -1), (3, 1)]);
        assert_eq!(p(&a).add(&p(&b)), p(&expect));
        assert_eq!(p(&a).add(&p(&b)), "1 - t^2 + t^3".parse().unwrap());
    }

    #[test]
    fn mul_matches_distribution_oracle() {
        let a = [(0, 1), (1, 1)];
        let b = [(-1, 1), (0, 1)];
        let expect = naive_mul(&a, &b);
        assert_eq!(expect, vec![(-1, 1), (0, 2), (1, 1)]);
        assert_eq!(p(&a).mul(&p(&b)), p(&expect));
    }

    #[test]
    fn bar_is_exponent_negation() {
        let a = p(&[(-2, 3), (0, 1), (5, -1)]);
        assert_eq!(a.bar(), p(&[(2, 3), (0, 1), (-5, -1)]));
        assert_eq!(a.bar().bar(), a);
    }

    #[test]
    fn eval_at_minus_one_by_substitution() {
        // 1 - t + t^3 at t = -1: 1 + 1 - 1 = 1.
        let a = p(&[(0, 1), (1, -1), (3, 1)]);
        assert_eq!(a.eval_neg1(), BigInt::from(1));
        assert_eq!(a.eval(&q(-1, 1)).unwrap(), q(1, 1));
    }

    #[test]
    fn eval_of_trace_at_one() {
        assert_eq!(poly::phi_sym().eval_one(), BigInt::from(3));
        assert_eq!(poly::phi_sym().eval(&q(1, 1)).unwrap(), q(3, 1));
    }

    #[test]
    fn eval_rejects_zero() {
        assert_eq!(p(&[(1, 1)]).eval(&q(0, 1)), Err(LaurentError::EvalAtZero));
    }

    #[test]
    fn eval_with_negative_exponents() {
        // t^-2 + t at t = 2/3: 9/4 + 2/3 = 35/12.
        let a = p(&[(-2, 1), (1, 1)]);
        assert_eq!(a.eval(&q(2, 3)).unwrap(), q(35, 12));
    }

    #[test]
    fn zeta3_of_cyclotomic_is_zero() {
        assert_eq!(poly::cyclo3().eval_zeta3(), EisensteinValue::zero());
        assert_eq!(poly::phi_sym().eval_zeta3(), EisensteinValue::zero());
    }

    #[test]
    fn zeta3_reduces_negative_exponents() {
        // t^-1 = t^2 = -1 - zeta3 at zeta3.
        let a = p(&[(-1, 1)]);
        let v = a.eval_zeta3();
        assert_eq!(v, EisensteinValue { a: q(-1, 1), b: q(-1, 1) });
        // t^3 - 1 vanishes.
        assert_eq!(p(&[(3, 1), (0, -1)]).eval_zeta3(), EisensteinValue::zero());
    }

    #[test]
    fn zeta3_multiplicative_on_samples() {
        let a = p(&[(-2, 1), (0, 3), (1, -1)]);
        let b = p(&[(-1, 2), (2, 5)]);
        assert_eq!(a.mul(&b).eval_zeta3(), a.eval_zeta3().mul(&b.eval_zeta3()));
    }

    #[test]
    fn derivative_at_minus_one_of_signed_powers() {
        // (-t)^l has derivative value -l at t = -1.
        for l in -6i64..=6 {
            let c = if l.rem_euclid(2) == 0 { 1 } else { -1 };
            let m = p(&[(l, c)]);
            assert_eq!(m.derivative_eval_neg1(), BigInt::from(-l));
        }
    }

    #[test]
    fn relative_degree_spread() {
        assert_eq!(p(&[(-2, 1), (3, 5)]).relative_degree(), Ok(5));
        assert_eq!(p(&[(7, 2)]).relative_degree(), Ok(0));
        assert_eq!(IntPoly::zero().relative_degree(), Err(LaurentError::ZeroRelativeDegree));
    }

    #[test]
    fn content_and_scalar_division() {
        let a = p(&[(0, 6), (2, -9), (5, 12)]);
        assert_eq!(a.content(), BigInt::from(3));
        assert_eq!(a.div_scalar_exact(&BigInt::from(3)).unwrap(), p(&[(0, 2), (2, -3), (5, 4)]));
        assert_eq!(a.div_scalar_exact(&BigInt::from(4)), None);
        assert_eq!(IntPoly::zero().content(), BigInt::zero());
    }

    #[test]
    fn exact_division_by_small_factors() {
        let f = poly::one_plus_t().mul(&p(&[(-1, 2), (3, -5)]));
        assert_eq!(f.div_exact(&poly::one_plus_t()).unwrap(), p(&[(-1, 2), (3, -5)]));
        assert_eq!(p(&[(0, 1), (1, 1), (2, 2)]).div_exact(&poly::one_plus_t()), None);
        let g = poly::cyclo3().mul(&p(&[(0, 7)]));
        assert_eq!(g.div_exact(&poly::cyclo3()).unwrap(), p(&[(0, 7)]));
    }

    #[test]
    fn display_matches_expected_layout() {
        assert_eq!(p(&[(0, 1), (1, -1), (3, 1)]).to_string(), "1 - t + t^3");
        assert_eq!(p(&[(-2, -1), (0, 2)]).to_string(), "-t^-2 + 2");
        assert_eq!(p(&[(3, 2)]).to_string(), "2*t^3");
        assert_eq!(p(&[(1, 1)]).to_string(), "t");
        assert_eq!(IntPoly::zero().to_string(), "0");
        assert_eq!(poly::rat(&[(1, 1, 2)]).to_string(), "1/2*t");
    }

    #[test]
    fn parse_round_trips_and_accepts_whitespace() {
        let cases = ["1 - t + t^3", "-t^-2 + 2", "2*t^3", "t", "0", "-3/4 + 1/2*t"];
        for s in cases {
            let a: RatPoly = s.parse().unwrap();
            assert_eq!(a.to_string(), s, "round trip through display");
        }
        let spaced: RatPoly = "  1-t   +t^ 3 ".parse().unwrap();
        assert_eq!(spaced, "1 - t + t^3".parse().unwrap());
        let dup: IntPoly = "t + t".parse().unwrap();
        assert_eq!(dup, p(&[(1, 2)]));
    }

    #[test]
    fn parse_rejects_malformed_input() {
        assert!("".parse::<RatPoly>().is_err());
        assert!("1 +".parse::<RatPoly>().is_err());
        assert!("t^".parse::<RatPoly>().is_err());
        assert!("2x".parse::<RatPoly>().is_err());
        assert!("1/0".parse::<RatPoly>().is_err());
        assert!(matches!(
            "1/2*t".parse::<IntPoly>(),
            Err(LaurentError::NonIntegerCoeff { exp: 1, .. })
        ));
    }

    fn arb_poly() -> impl Strategy<Value = IntPoly> {
        proptest::collection::vec(((-6i64..=6), (-9i64..=9)), 0..6)
            .prop_map(|terms| IntPoly::from_terms(terms.into_iter().map(|(e, c)| (e, c.into()))))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.sub(&a), IntPoly::zero());
        }

        #[test]
        fn bar_is_ring_involution(a in arb_poly(), b in arb_poly()) {
            prop_assert_eq!(a.bar().bar(), a.clone());
            prop_assert_eq!(a.mul(&b).bar(), a.bar().mul(&b.bar()));
            prop_assert_eq!(a.add(&b).bar(), a.bar().add(&b.bar()));
        }

        #[test]
        fn eval_is_multiplicative(a in arb_poly(), b in arb_poly(), n in -5i64..=5, d in 1i64..=5) {
            prop_assume!(n != 0);
            let x = BigRational::new(BigInt::from(n), BigInt::from(d));
            let lhs = a.mul(&b).eval(&x).unwrap();
            let rhs = a.eval(&x).unwrap() * b.eval(&x).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn zeta3_is_multiplicative(a in arb_poly(), b in arb_poly()) {
            prop_assert_eq!(a.mul(&b).eval_zeta3(), a.eval_zeta3().mul(&b.eval_zeta3()));
        }

        #[test]
        fn degrees_add_under_multiplication(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!a.is_zero() && !b.is_zero());
            // Z is an integral domain, so extreme terms cannot cancel.
            let rd = a.mul(&b).relative_degree().unwrap();
            prop_assert_eq!(rd, a.relative_degree().unwrap() + b.relative_degree().unwrap());
        }

        #[test]
        fn derivative_product_rule_at_minus_one(a in arb_poly(), b in arb_poly()) {
            let lhs = a.mul(&b).derivative_eval_neg1();
            let rhs = a.derivative_eval_neg1() * b.eval_neg1() + a.eval_neg1() * b.derivative_eval_neg1();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn display_parse_round_trip(a in arb_poly()) {
            let s = a.to_string();
            let back: IntPoly = s.parse().unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
