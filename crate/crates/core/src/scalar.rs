//! The coefficient field: rationals, or rational functions in a single
//! named parameter such as the central charge `c` or the level `l`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::poly::{RatFn, UPoly};
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot combine expressions in two parameters '{0}' and '{1}'")]
    MixedParameters(char, char),
    #[error("cannot parse scalar {0:?}: {1}")]
    Parse(String, String),
}

/// Exact scalar in canonical form. A `Func` value is never constant.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(Q),
    Func(char, Box<RatFn>),
}

/// Arithmetic operation selector for [`scalar_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked arithmetic: reports division by zero and parameter mixing as errors.
pub fn scalar_arith(a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar, ScalarError> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_add(&-b),
        ArithOp::Mul => a.checked_mul(b),
        ArithOp::Div => a.checked_div(b),
    }
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar::Rat(Q::ZERO)
    }

    pub fn one() -> Scalar {
        Scalar::Rat(Q::ONE)
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::Rat(Q::from_int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Scalar {
        Scalar::Rat(Q::new(n, d))
    }

    /// The bare parameter, e.g. `c`.
    pub fn param(sym: char) -> Scalar {
        Scalar::Func(sym, Box::new(RatFn::from_poly(UPoly::x())))
    }

    fn from_fn(sym: char, f: RatFn) -> Scalar {
        match f.as_constant() {
            Some(q) => Scalar::Rat(q),
            None => Scalar::Func(sym, Box::new(f)),
        }
    }

    /// Builds `num(sym)/den(sym)`.
    pub fn from_polys(sym: char, num: UPoly, den: UPoly) -> Result<Scalar, ScalarError> {
        let f = RatFn::new(num, den).ok_or(ScalarError::DivisionByZero)?;
        Ok(Scalar::from_fn(sym, f))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Rat(q) if q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Scalar::Rat(q) if q.is_one())
    }

    pub fn as_q(&self) -> Option<&Q> {
        match self {
            Scalar::Rat(q) => Some(q),
            Scalar::Func(..) => None,
        }
    }

    pub fn symbol(&self) -> Option<char> {
        match self {
            Scalar::Rat(_) => None,
            Scalar::Func(s, _) => Some(*s),
        }
    }

    fn as_fn(&self) -> RatFn {
        match self {
            Scalar::Rat(q) => RatFn::constant(q.clone()),
            Scalar::Func(_, f) => (**f).clone(),
        }
    }

    fn joint_symbol(&self, other: &Scalar) -> Result<Option<char>, ScalarError> {
        match (self.symbol(), other.symbol()) {
            (Some(a), Some(b)) if a != b => Err(ScalarError::MixedParameters(a, b)),
            (Some(a), _) => Ok(Some(a)),
            (None, b) => Ok(b),
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        if let (Scalar::Rat(a), Scalar::Rat(b)) = (self, other) {
            return Ok(Scalar::Rat(a + b));
        }
        let sym = self.joint_symbol(other)?.unwrap();
        Ok(Scalar::from_fn(sym, self.as_fn().add(&other.as_fn())))
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a * b)),
            (Scalar::Rat(a), Scalar::Func(s, f)) | (Scalar::Func(s, f), Scalar::Rat(a)) => {
                Ok(Scalar::from_fn(*s, f.scale(a)))
            }
            _ => {
                let sym = self.joint_symbol(other)?.unwrap();
                Ok(Scalar::from_fn(sym, self.as_fn().mul(&other.as_fn())))
            }
        }
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        let inv = other.recip().ok_or(ScalarError::DivisionByZero)?;
        self.checked_mul(&inv)
    }

    pub fn recip(&self) -> Option<Scalar> {
        match self {
            Scalar::Rat(q) => q.recip().map(Scalar::Rat),
            Scalar::Func(s, f) => f.recip().map(|g| Scalar::from_fn(*s, g)),
        }
    }

    /// Integer power; negative exponents need a nonzero base.
    pub fn pow(&self, e: i64) -> Scalar {
        if let Scalar::Rat(q) = self {
            return Scalar::Rat(q.pow(e));
        }
        let base = if e < 0 { self.recip().expect("negative power of zero") } else { self.clone() };
        let mut acc = Scalar::one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &b;
            }
            k >>= 1;
            if k > 0 {
                b = &b * &b;
            }
        }
        acc
    }

    /// Substitutes a rational value for the parameter.
    pub fn specialize(&self, value: &Q) -> Result<Scalar, ScalarError> {
        match self {
            Scalar::Rat(_) => Ok(self.clone()),
            Scalar::Func(_, f) => f.eval(value).map(Scalar::Rat).ok_or(ScalarError::DivisionByZero),
        }
    }

    /// Laurent expansion in the parameter about 0: `(v, coeffs)` meaning
    /// `sym^v * sum coeffs[i] sym^i`.
    pub fn laurent_at_zero(&self, len: usize) -> (i64, Vec<Q>) {
        self.as_fn().laurent_at_zero(len)
    }

    pub fn numerator(&self) -> UPoly {
        self.as_fn().num().clone()
    }

    pub fn denominator(&self) -> UPoly {
        self.as_fn().den().clone()
    }

    /// True when the value contains no parameter and is a negative rational.
    pub fn is_negative_rational(&self) -> bool {
        matches!(self, Scalar::Rat(q) if q.is_negative())
    }

    /// Whether printing this value needs parentheses when multiplied.
    pub fn is_compound(&self) -> bool {
        match self {
            Scalar::Rat(_) => false,
            Scalar::Func(_, f) => !f.is_polynomial() || f.num().term_count() > 1,
        }
    }

    pub fn to_q_or_err(&self) -> Result<Q, ScalarError> {
        self.as_q()
            .cloned()
            .ok_or_else(|| ScalarError::Parse(self.to_string(), "expected a rational number".into()))
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<Q> for Scalar {
    fn from(q: Q) -> Self {
        Scalar::Rat(q)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        if let (Scalar::Rat(a), Scalar::Rat(b)) = (self, rhs) {
            return Scalar::Rat(a - b);
        }
        self.checked_add(&-rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(q) => Scalar::Rat(-q),
            Scalar::Func(s, f) => Scalar::Func(*s, Box::new(f.neg())),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        if let (Scalar::Rat(a), Scalar::Rat(b)) = (&*self, rhs) {
            *self = Scalar::Rat(a + b);
            return;
        }
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(q) => write!(f, "{q}"),
            Scalar::Func(s, r) => write!(f, "{}", r.to_string_with(&s.to_string())),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Recursive-descent parser for rational expressions in at most one symbol.
struct Parser<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ScalarError {
        ScalarError::Parse(self.src.to_string(), msg.to_string())
    }

    fn peek(&mut self) -> Option<char> {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = match self.peek() {
            Some('-') => {
                self.pos += 1;
                -self.term()?
            }
            Some('+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.checked_add(&t)?;
                }
                Some('-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.checked_add(&-t)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    let p = self.power()?;
                    acc = acc.checked_mul(&p)?;
                }
                Some('/') => {
                    self.pos += 1;
                    let p = self.power()?;
                    acc = acc.checked_div(&p)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Scalar, ScalarError> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let neg = if self.peek() == Some('-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let e = self.integer()?;
            let e = if neg { -e } else { e };
            if e < 0 && base.is_zero() {
                return Err(ScalarError::DivisionByZero);
            }
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i64, ScalarError> {
        self.peek();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("integer out of range"))
    }

    fn atom(&mut self) -> Result<Scalar, ScalarError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("missing ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                let q: Q = s.parse().map_err(|_| self.err("bad number"))?;
                Ok(Scalar::Rat(q))
            }
            Some(c) if c.is_alphabetic() => {
                self.pos += 1;
                Ok(Scalar::param(c))
            }
            Some('-') => {
                self.pos += 1;
                Ok(-self.atom()?)
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

impl FromStr for Scalar {
    type Err = ScalarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { src: s, chars: s.chars().collect(), pos: 0 };
        let v = p.expr()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(scalar_arith(&s("1/2"), &s("1/3"), ArithOp::Add).unwrap().to_string(), "5/6");
        let prod = scalar_arith(&s("c+2"), &s("c-2"), ArithOp::Mul).unwrap();
        assert_eq!(prod.to_string(), "c^2-4");
        let q = scalar_arith(&s("c^2-4"), &s("c-2"), ArithOp::Div).unwrap();
        assert_eq!(q.to_string(), "c+2");
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(scalar_arith(&s("1"), &s("0"), ArithOp::Div), Err(ScalarError::DivisionByZero));
        assert_eq!(scalar_arith(&s("c"), &s("c-c"), ArithOp::Div), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn parameters_do_not_mix() {
        assert!(matches!(
            scalar_arith(&s("c"), &s("l"), ArithOp::Add),
            Err(ScalarError::MixedParameters('c', 'l'))
        ));
    }

    #[test]
    fn canonical_text() {
        assert_eq!(s("(c+2)/(c-2)").to_string(), "(c+2)/(c-2)");
        assert_eq!(s("2*c + 14").to_string(), "2*c+14");
        assert_eq!(s("c/2").to_string(), "1/2*c");
        assert_eq!(s("1/(2*l+4)").to_string(), "1/2/(l+2)");
        assert_eq!(s("c - c").to_string(), "0");
    }

    fn small_poly() -> impl Strategy<Value = Scalar> {
        prop::collection::vec(-6i64..6, 1..4).prop_map(|cs| {
            let p = UPoly::from_coeffs(cs.into_iter().map(Q::from_int).collect());
            Scalar::from_polys('c', p, UPoly::one()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn display_parse_roundtrip(a in small_poly(), b in small_poly()) {
            if !b.is_zero() {
                let r = &a / &b;
                let back: Scalar = r.to_string().parse().unwrap();
                prop_assert_eq!(back, r);
            }
        }

        #[test]
        fn distributive(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }
    }
}
