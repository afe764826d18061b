//! Laurent polynomials in one or two formal variables, and rational
//! functions whose denominators are monomials times powers of `(z1 - z2)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Q;
use crate::scalar::Scalar;

/// Finite Laurent polynomial in one variable.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Laurent1 {
    terms: BTreeMap<i64, Scalar>,
}

impl Laurent1 {
    pub fn new() -> Laurent1 {
        Laurent1::default()
    }

    pub fn monomial(e: i64, c: Scalar) -> Laurent1 {
        let mut l = Laurent1::new();
        l.add_term(e, &c);
        l
    }

    pub fn add_term(&mut self, e: i64, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn coeff(&self, e: i64) -> Scalar {
        self.terms.get(&e).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Scalar)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn add(&self, o: &Laurent1) -> Laurent1 {
        let mut out = self.clone();
        for (e, c) in o.terms() {
            out.add_term(e, c);
        }
        out
    }

    pub fn sub(&self, o: &Laurent1) -> Laurent1 {
        let mut out = self.clone();
        for (e, c) in o.terms() {
            out.add_term(e, &-c);
        }
        out
    }

    pub fn mul(&self, o: &Laurent1) -> Laurent1 {
        let mut out = Laurent1::new();
        for (a, x) in self.terms() {
            for (b, y) in o.terms() {
                out.add_term(a + b, &(x * y));
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Laurent1 {
        let mut out = Laurent1::new();
        for (e, x) in self.terms() {
            out.add_term(e, &(x * c));
        }
        out
    }

    /// Keeps only exponents `<= max`.
    pub fn truncate(&self, max: i64) -> Laurent1 {
        Laurent1 { terms: self.terms.range(..=max).map(|(e, c)| (*e, c.clone())).collect() }
    }

    /// Expansion of a one-parameter scalar (rational function in its symbol)
    /// about 0, keeping exponents `< valuation + len`.
    pub fn from_scalar_series(s: &Scalar, len: usize) -> Laurent1 {
        let (v, cs) = s.laurent_at_zero(len);
        let mut out = Laurent1::new();
        if s.is_zero() {
            return out;
        }
        for (i, c) in cs.into_iter().enumerate() {
            out.add_term(v + i as i64, &Scalar::Rat(c));
        }
        out
    }

    pub fn to_string_with(&self, var: &str) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (e, c)) in self.terms().enumerate() {
            let mono = match e {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{e}"),
            };
            push_term(&mut s, i == 0, c, &mono);
        }
        s
    }
}

fn push_term(s: &mut String, first: bool, c: &Scalar, mono: &str) {
    let neg = c.is_negative_rational();
    let mag = if neg { -c } else { c.clone() };
    if !first {
        s.push_str(if neg { " - " } else { " + " });
    } else if neg {
        s.push('-');
    }
    let cs = if mag.is_compound() { format!("({mag})") } else { mag.to_string() };
    if mono.is_empty() {
        s.push_str(&cs);
    } else if mag.is_one() {
        s.push_str(mono);
    } else {
        s.push_str(&cs);
        s.push('*');
        s.push_str(mono);
    }
}

impl fmt::Debug for Laurent1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_with("z"))
    }
}

impl Serialize for Laurent1 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string_with("z"))
    }
}

/// Finite Laurent polynomial in two variables; exponent pairs `(e1, e2)`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Laurent2 {
    terms: BTreeMap<(i64, i64), Scalar>,
}

impl Laurent2 {
    pub fn new() -> Laurent2 {
        Laurent2::default()
    }

    pub fn monomial(e1: i64, e2: i64, c: Scalar) -> Laurent2 {
        let mut l = Laurent2::new();
        l.add_term(e1, e2, &c);
        l
    }

    pub fn add_term(&mut self, e1: i64, e2: i64, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((e1, e2)).or_insert_with(Scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(e1, e2));
        }
    }

    pub fn coeff(&self, e1: i64, e2: i64) -> Scalar {
        self.terms.get(&(e1, e2)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), &Scalar)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
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

    pub fn add(&self, o: &Laurent2) -> Laurent2 {
        let mut out = self.clone();
        for ((a, b), c) in o.terms() {
            out.add_term(a, b, c);
        }
        out
    }

    pub fn sub(&self, o: &Laurent2) -> Laurent2 {
        let mut out = self.clone();
        for ((a, b), c) in o.terms() {
            out.add_term(a, b, &-c);
        }
        out
    }

    pub fn mul(&self, o: &Laurent2) -> Laurent2 {
        let mut out = Laurent2::new();
        for ((a1, a2), x) in self.terms() {
            for ((b1, b2), y) in o.terms() {
                out.add_term(a1 + b1, a2 + b2, &(x * y));
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Laurent2 {
        let mut out = Laurent2::new();
        for ((a, b), x) in self.terms() {
            out.add_term(a, b, &(x * c));
        }
        out
    }

    pub fn shift(&self, d1: i64, d2: i64) -> Laurent2 {
        Laurent2 { terms: self.terms.iter().map(|((a, b), c)| ((a + d1, b + d2), c.clone())).collect() }
    }

    /// `(z1 - z2)^n` for `n >= 0`.
    pub fn diff_power(n: u32) -> Laurent2 {
        let mut out = Laurent2::new();
        for k in 0..=n as i64 {
            let c = Q::binomial(n as i64, k);
            let c = if k % 2 == 1 { -c } else { c };
            out.add_term(n as i64 - k, k, &Scalar::Rat(c));
        }
        out
    }

    /// Keeps terms whose second exponent is `<= max`.
    pub fn truncate_second(&self, max: i64) -> Laurent2 {
        Laurent2 { terms: self.terms.iter().filter(|((_, b), _)| *b <= max).map(|(e, c)| (*e, c.clone())).collect() }
    }

    /// Keeps terms whose first exponent is `<= max`.
    pub fn truncate_first(&self, max: i64) -> Laurent2 {
        Laurent2 { terms: self.terms.iter().filter(|((a, _), _)| *a <= max).map(|(e, c)| (*e, c.clone())).collect() }
    }

    pub fn min_second(&self) -> Option<i64> {
        self.terms.keys().map(|(_, b)| *b).min()
    }

    pub fn min_first(&self) -> Option<i64> {
        self.terms.keys().map(|(a, _)| *a).min()
    }

    /// Substitutes a value for the first variable.
    pub fn eval_first(&self, x: &Scalar) -> Laurent1 {
        let mut out = Laurent1::new();
        for ((a, b), c) in self.terms() {
            out.add_term(b, &(c * &x.pow(a)));
        }
        out
    }

    /// Exact division by `(z1 - z2)`, if it divides.
    pub fn div_diff(&self) -> Option<Laurent2> {
        let mut by_degree: BTreeMap<i64, Vec<(i64, Scalar)>> = BTreeMap::new();
        for ((a, b), c) in self.terms() {
            by_degree.entry(a + b).or_default().push((a, c.clone()));
        }
        let mut out = Laurent2::new();
        for (d, comp) in by_degree {
            // comp sorted by z1-exponent i: quotient coefficient b_i on z1^i z2^{d-1-i}
            // satisfies b_i = b_{i-1} - a_i.
            let lo = comp.first().unwrap().0;
            let hi = comp.last().unwrap().0;
            let mut prev = Scalar::zero();
            let mut it = comp.into_iter().peekable();
            for i in lo..=hi {
                let a = match it.peek() {
                    Some((e, _)) if *e == i => it.next().unwrap().1,
                    _ => Scalar::zero(),
                };
                let b = &prev - &a;
                if i == hi {
                    if !b.is_zero() {
                        return None;
                    }
                } else {
                    out.add_term(i, d - 1 - i, &b);
                }
                prev = b;
            }
        }
        Some(out)
    }

    pub fn to_string_with(&self, v1: &str, v2: &str) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        // Print in descending total degree then descending first exponent.
        let mut ts: Vec<((i64, i64), &Scalar)> = self.terms().collect();
        ts.sort_by(|x, y| (y.0 .0 + y.0 .1, y.0 .0).cmp(&(x.0 .0 + x.0 .1, x.0 .0)));
        for (i, ((a, b), c)) in ts.into_iter().enumerate() {
            let mut parts = Vec::new();
            for (v, e) in [(v1, a), (v2, b)] {
                match e {
                    0 => {}
                    1 => parts.push(v.to_string()),
                    _ => parts.push(format!("{v}^{e}")),
                }
            }
            push_term(&mut s, i == 0, c, &parts.join("*"));
        }
        s
    }
}

impl fmt::Debug for Laurent2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_with("z1", "z2"))
    }
}

/// Expansion region for [`ratfunc_expand`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    /// `|z2| < |z1|`: series in `z2`, result in `(z1, z2)`.
    Z2InsideZ1,
    /// `|z1| < |z2|`: series in `z1`, result in `(z1, z2)`.
    Z1InsideZ2,
    /// `|z1 - z2| < |z2|`: series in `t = z1 - z2`, result in `(t, z2)`.
    NearDiagonal,
}

/// `num / (z1 - z2)^n` with `num` a Laurent polynomial not divisible by
/// `(z1 - z2)`; monomial denominators live as negative exponents of `num`.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFunction2 {
    num: Laurent2,
    n: u32,
}

impl RationalFunction2 {
    pub fn new(num: Laurent2, n: u32) -> RationalFunction2 {
        let mut r = RationalFunction2 { num, n };
        r.cancel();
        r
    }

    pub fn laurent(num: Laurent2) -> RationalFunction2 {
        RationalFunction2 { num, n: 0 }
    }

    fn cancel(&mut self) {
        if self.num.is_zero() {
            self.n = 0;
            return;
        }
        while self.n > 0 {
            match self.num.div_diff() {
                Some(q) => {
                    self.num = q;
                    self.n -= 1;
                }
                None => break,
            }
        }
    }

    pub fn numerator(&self) -> &Laurent2 {
        &self.num
    }

    pub fn diff_order(&self) -> u32 {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RationalFunction2) -> RationalFunction2 {
        let n = self.n.max(o.n);
        let a = self.num.mul(&Laurent2::diff_power(n - self.n));
        let b = o.num.mul(&Laurent2::diff_power(n - o.n));
        RationalFunction2::new(a.add(&b), n)
    }

    pub fn sub(&self, o: &RationalFunction2) -> RationalFunction2 {
        self.add(&o.scale(&Scalar::int(-1)))
    }

    pub fn mul(&self, o: &RationalFunction2) -> RationalFunction2 {
        RationalFunction2::new(self.num.mul(&o.num), self.n + o.n)
    }

    pub fn scale(&self, c: &Scalar) -> RationalFunction2 {
        RationalFunction2::new(self.num.scale(c), self.n)
    }

    /// Swaps the roles of `z1` and `z2`.
    pub fn swap(&self) -> RationalFunction2 {
        let mut num = Laurent2::new();
        for ((a, b), c) in self.num.terms() {
            num.add_term(b, a, c);
        }
        if self.n % 2 == 1 {
            num = num.scale(&Scalar::int(-1));
        }
        RationalFunction2::new(num, self.n)
    }

    /// Factored text: `N(z1,z2)/(z1^a*z2^b*(z1-z2)^n)`.
    pub fn to_factored_string(&self) -> String {
        let a = -self.num.min_first().unwrap_or(0).min(0);
        let b = -self.num.min_second().unwrap_or(0).min(0);
        let poly = self.num.shift(a, b);
        let mut den = Vec::new();
        for (v, e) in [("z1", a), ("z2", b)] {
            match e {
                0 => {}
                1 => den.push(v.to_string()),
                _ => den.push(format!("{v}^{e}")),
            }
        }
        match self.n {
            0 => {}
            1 => den.push("(z1-z2)".into()),
            n => den.push(format!("(z1-z2)^{n}")),
        }
        let ns = poly.to_string_with("z1", "z2");
        if den.is_empty() {
            return ns;
        }
        let ns = if poly.len() > 1 { format!("({ns})") } else { ns };
        if den.len() == 1 {
            format!("{}/{}", ns, den[0])
        } else {
            format!("{}/({})", ns, den.join("*"))
        }
    }
}

impl fmt::Display for RationalFunction2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_factored_string())
    }
}

impl fmt::Debug for RationalFunction2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_factored_string())
    }
}

impl Serialize for RationalFunction2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_factored_string())
    }
}

/// Expands `r` in the given region. The subordinate variable is `z2` for
/// `|z2|<|z1|`, `z1` for `|z1|<|z2|` and `t = z1 - z2` near the diagonal;
/// the result contains exactly the terms whose subordinate exponent is at
/// most `e_min + order`, where `e_min` is the smallest subordinate exponent
/// the expansion can produce.
pub fn ratfunc_expand(r: &RationalFunction2, region: Region, order: i64) -> Result<Laurent2> {
    if order < 0 {
        return Err(Error::Config("expansion order must be nonnegative".into()));
    }
    let n = r.n as i64;
    let mut out = Laurent2::new();
    if r.num.is_zero() {
        return Ok(out);
    }
    match region {
        Region::Z2InsideZ1 | Region::Z1InsideZ2 => {
            let inner_first = region == Region::Z1InsideZ2;
            // subordinate exponent of each numerator term
            let sub = |(a, b): (i64, i64)| if inner_first { a } else { b };
            let e_min = r.num.terms().map(|(e, _)| sub(e)).min().unwrap();
            let cap = e_min + order;
            let sign = if inner_first && n % 2 == 1 { Scalar::int(-1) } else { Scalar::one() };
            for ((a, b), c) in r.num.terms() {
                let s0 = sub((a, b));
                let mut k = 0i64;
                while s0 + k <= cap {
                    let coef = if n == 0 {
                        if k > 0 {
                            break;
                        }
                        Scalar::one()
                    } else {
                        Scalar::Rat(Q::binomial(n + k - 1, k))
                    };
                    let coef = &(&coef * &sign) * c;
                    if inner_first {
                        out.add_term(a + k, b - n - k, &coef);
                    } else {
                        out.add_term(a - n - k, b + k, &coef);
                    }
                    k += 1;
                }
            }
        }
        Region::NearDiagonal => {
            // z1 = t + z2; z1^a = sum_j C(a, j) t^j z2^(a-j); divide by t^n.
            let cap = -n + order;
            for ((a, b), c) in r.num.terms() {
                let mut j = 0i64;
                while j - n <= cap {
                    if a >= 0 && j > a {
                        break;
                    }
                    let coef = c * &Scalar::Rat(Q::binomial(a, j));
                    out.add_term(j - n, a - j + b, &coef);
                    j += 1;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inv_diff(n: u32) -> RationalFunction2 {
        RationalFunction2::new(Laurent2::monomial(0, 0, Scalar::one()), n)
    }

    #[test]
    fn geometric_expansions() {
        let e = ratfunc_expand(&inv_diff(1), Region::Z2InsideZ1, 2).unwrap();
        let mut want = Laurent2::new();
        want.add_term(-1, 0, &Scalar::one());
        want.add_term(-2, 1, &Scalar::one());
        want.add_term(-3, 2, &Scalar::one());
        assert_eq!(e, want);

        let e = ratfunc_expand(&inv_diff(1), Region::Z1InsideZ2, 1).unwrap();
        let mut want = Laurent2::new();
        want.add_term(0, -1, &Scalar::int(-1));
        want.add_term(1, -2, &Scalar::int(-1));
        assert_eq!(e, want);

        let e = ratfunc_expand(&inv_diff(2), Region::Z2InsideZ1, 1).unwrap();
        let mut want = Laurent2::new();
        want.add_term(-2, 0, &Scalar::one());
        want.add_term(-3, 1, &Scalar::int(2));
        assert_eq!(e, want);
    }

    #[test]
    fn expansion_times_denominator_recovers_numerator() {
        let mut num = Laurent2::new();
        num.add_term(2, -1, &Scalar::int(3));
        num.add_term(0, 1, &Scalar::ratio(1, 2));
        let r = RationalFunction2::new(num.clone(), 3);
        let order = 6;
        let e = ratfunc_expand(&r, Region::Z2InsideZ1, order).unwrap();
        let back = e.mul(&Laurent2::diff_power(3));
        let cap = -1 + order;
        assert_eq!(back.truncate_second(cap), num.truncate_second(cap));
        let e2 = ratfunc_expand(&r, Region::Z2InsideZ1, order + 1).unwrap();
        assert_eq!(e2.truncate_second(cap), e);
    }

    #[test]
    fn cancellation_is_canonical() {
        let num = Laurent2::diff_power(2).mul(&Laurent2::monomial(0, -1, Scalar::int(5)));
        let r = RationalFunction2::new(num, 3);
        assert_eq!(r.diff_order(), 1);
        assert_eq!(r.to_factored_string(), "5/(z2*(z1-z2))");
        assert_eq!(inv_diff(2).scale(&Scalar::param('l')).to_string(), "l/(z1-z2)^2");
    }

    #[test]
    fn near_diagonal_of_pure_pole() {
        let r = RationalFunction2::new(Laurent2::monomial(0, 0, Scalar::one()), 2);
        let e = ratfunc_expand(&r, Region::NearDiagonal, 3).unwrap();
        assert_eq!(e, Laurent2::monomial(-2, 0, Scalar::one()));
        // z1^-1 = 1/(z2 + t) = z2^-1 - t z2^-2 + ...
        let r = RationalFunction2::laurent(Laurent2::monomial(-1, 0, Scalar::one()));
        let e = ratfunc_expand(&r, Region::NearDiagonal, 1).unwrap();
        let mut want = Laurent2::new();
        want.add_term(0, -1, &Scalar::one());
        want.add_term(1, -2, &Scalar::int(-1));
        assert_eq!(e, want);
    }
}
