//! Univariate polynomials and rational functions over `Q`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::rational::Q;

/// Dense univariate polynomial, coefficients stored from degree 0 upward
/// with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UPoly {
    coeffs: Vec<Q>,
}

impl UPoly {
    pub fn zero() -> UPoly {
        UPoly { coeffs: Vec::new() }
    }

    pub fn one() -> UPoly {
        UPoly::constant(Q::ONE)
    }

    pub fn constant(c: Q) -> UPoly {
        UPoly::from_coeffs(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> UPoly {
        UPoly::from_coeffs(vec![Q::ZERO, Q::ONE])
    }

    pub fn from_coeffs(mut coeffs: Vec<Q>) -> UPoly {
        while coeffs.last().is_some_and(Q::is_zero) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.coeffs.get(i).cloned().unwrap_or(Q::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(0)
    }

    pub fn leading(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or(Q::ZERO)
    }

    pub fn scale(&self, c: &Q) -> UPoly {
        if c.is_zero() {
            return UPoly::zero();
        }
        UPoly { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        let inv = self.leading().recip().unwrap();
        self.scale(&inv)
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() < d.coeffs.len() {
            return (UPoly::zero(), self.clone());
        }
        let lead_inv = d.leading().recip().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Q::ZERO; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[i + j] = &rem[i + j] - &(&c * dc);
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (UPoly::from_coeffs(quot), UPoly::from_coeffs(rem))
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(a: &UPoly, b: &UPoly) -> UPoly {
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn pow(&self, e: u32) -> UPoly {
        let mut acc = UPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &Q::from_int(i as i64))
                .collect(),
        )
    }

    /// Lowest exponent carrying a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Writes the polynomial in descending powers of `var`, e.g. `2*c^2-1/3*c+4`.
    pub fn fmt_with(&self, var: &str, f: &mut impl fmt::Write) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            first = false;
            match i {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if i == 1 {
                        write!(f, "{var}")?;
                    } else {
                        write!(f, "{var}^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_string_with(&self, var: &str) -> String {
        let mut s = String::new();
        self.fmt_with(var, &mut s).unwrap();
        s
    }

    /// Number of nonzero terms.
    pub fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }
}

impl<'a> Add<&'a UPoly> for &'a UPoly {
    type Output = UPoly;
    fn add(self, rhs: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => out.push(a + b),
                (Some(a), None) => out.push(a.clone()),
                (None, Some(b)) => out.push(b.clone()),
                (None, None) => unreachable!(),
            }
        }
        UPoly::from_coeffs(out)
    }
}

impl<'a> Sub<&'a UPoly> for &'a UPoly {
    type Output = UPoly;
    fn sub(self, rhs: &UPoly) -> UPoly {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a UPoly> for &'a UPoly {
    type Output = UPoly;
    fn mul(self, rhs: &UPoly) -> UPoly {
        if self.is_zero() || rhs.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Q::ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        UPoly::from_coeffs(out)
    }
}

impl Neg for &UPoly {
    type Output = UPoly;
    fn neg(self) -> UPoly {
        UPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_with("x"))
    }
}

/// Reduced quotient `num/den` of polynomials with monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFn {
    num: UPoly,
    den: UPoly,
}

impl RatFn {
    pub fn from_poly(p: UPoly) -> RatFn {
        RatFn { num: p, den: UPoly::one() }
    }

    pub fn constant(c: Q) -> RatFn {
        RatFn::from_poly(UPoly::constant(c))
    }

    /// Builds `num/den` in canonical form; `None` if `den` is zero.
    pub fn new(num: UPoly, den: UPoly) -> Option<RatFn> {
        if den.is_zero() {
            return None;
        }
        if num.is_zero() {
            return Some(RatFn::from_poly(UPoly::zero()));
        }
        if den.is_constant() {
            let inv = den.leading().recip().unwrap();
            return Some(RatFn::from_poly(num.scale(&inv)));
        }
        let g = UPoly::gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_rem(&g).0, den.div_rem(&g).0)
        };
        let lead = den.leading();
        let inv = lead.recip().unwrap();
        Some(RatFn { num: num.scale(&inv), den: den.scale(&inv) })
    }

    pub fn num(&self) -> &UPoly {
        &self.num
    }

    pub fn den(&self) -> &UPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// Constant value when the function has degree zero.
    pub fn as_constant(&self) -> Option<Q> {
        if self.den.is_one() && self.num.is_constant() {
            Some(self.num.constant_term())
        } else {
            None
        }
    }

    pub fn add(&self, rhs: &RatFn) -> RatFn {
        if self.den.is_one() && rhs.den.is_one() {
            return RatFn::from_poly(&self.num + &rhs.num);
        }
        if self.den == rhs.den {
            return RatFn::new(&self.num + &rhs.num, self.den.clone()).unwrap();
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RatFn::new(num, &self.den * &rhs.den).unwrap()
    }

    pub fn neg(&self) -> RatFn {
        RatFn { num: -&self.num, den: self.den.clone() }
    }

    pub fn mul(&self, rhs: &RatFn) -> RatFn {
        if self.den.is_one() && rhs.den.is_one() {
            return RatFn::from_poly(&self.num * &rhs.num);
        }
        RatFn::new(&self.num * &rhs.num, &self.den * &rhs.den).unwrap()
    }

    pub fn recip(&self) -> Option<RatFn> {
        RatFn::new(self.den.clone(), self.num.clone())
    }

    pub fn scale(&self, c: &Q) -> RatFn {
        RatFn { num: self.num.scale(c), den: self.den.clone() }
    }

    /// Evaluates at a rational point; `None` at a pole.
    pub fn eval(&self, x: &Q) -> Option<Q> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return None;
        }
        Some(&self.num.eval(x) / &d)
    }

    /// Laurent expansion about `x = 0`: returns `(v, coeffs)` with
    /// `self = x^v * sum coeffs[i] x^i`, exact through `len` coefficients.
    pub fn laurent_at_zero(&self, len: usize) -> (i64, Vec<Q>) {
        if self.num.is_zero() {
            return (0, vec![Q::ZERO; len]);
        }
        let vn = self.num.valuation().unwrap();
        let vd = self.den.valuation().unwrap();
        let n: Vec<Q> = self.num.coeffs()[vn..].to_vec();
        let d: Vec<Q> = self.den.coeffs()[vd..].to_vec();
        let d0inv = d[0].recip().unwrap();
        let mut out: Vec<Q> = Vec::with_capacity(len);
        for i in 0..len {
            let mut acc = n.get(i).cloned().unwrap_or(Q::ZERO);
            for j in 1..=i.min(d.len() - 1) {
                acc = &acc - &(&d[j] * &out[i - j]);
            }
            out.push(&acc * &d0inv);
        }
        (vn as i64 - vd as i64, out)
    }

    pub fn to_string_with(&self, var: &str) -> String {
        if self.den.is_one() {
            return self.num.to_string_with(var);
        }
        let wrap = |p: &UPoly| {
            let s = p.to_string_with(var);
            if p.term_count() > 1 || s.starts_with('-') {
                format!("({s})")
            } else {
                s
            }
        };
        format!("{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

impl fmt::Debug for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_with("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> UPoly {
        UPoly::from_coeffs(c.iter().map(|&x| Q::from_int(x)).collect())
    }

    #[test]
    fn exact_cancellation() {
        // (c^2 - 4) / (c - 2) = c + 2
        let r = RatFn::new(p(&[-4, 0, 1]), p(&[-2, 1])).unwrap();
        assert!(r.is_polynomial());
        assert_eq!(r.num(), &p(&[2, 1]));
    }

    #[test]
    fn formatting() {
        assert_eq!(p(&[-4, 0, 1]).to_string_with("c"), "c^2-4");
        let r = RatFn::new(p(&[2, 1]), p(&[-2, 1])).unwrap();
        assert_eq!(r.to_string_with("c"), "(c+2)/(c-2)");
    }

    #[test]
    fn laurent_of_geometric() {
        // 1/(1 - x) = 1 + x + x^2 + ...
        let r = RatFn::new(p(&[1]), p(&[1, -1])).unwrap();
        let (v, c) = r.laurent_at_zero(4);
        assert_eq!(v, 0);
        assert!(c.iter().all(|q| *q == Q::ONE));
        // 1/(x^2 + x^3) = x^-2 (1 - x + x^2 ...)
        let r = RatFn::new(p(&[1]), p(&[0, 0, 1, 1])).unwrap();
        let (v, c) = r.laurent_at_zero(3);
        assert_eq!(v, -2);
        assert_eq!(c, vec![Q::ONE, Q::from_int(-1), Q::ONE]);
    }
}
