//! Formal changes of coordinate and the operators `U(alpha)`.
//!
//! A coordinate `alpha = a_1 z + a_2 z^2 + ...` is written as
//! `alpha(z) = alpha'(0) exp(sum_n c_n z^{n+1} d/dz)(z)`, and acts on a module
//! by `U(alpha) = alpha'(0)^{L~0} exp(sum_n c_n L_n)`.

use serde::Serialize;

use crate::contragredient::DualModule;
use crate::error::{Error, Result};
use crate::field::VertexOperators;
use crate::linalg::Matrix;
use crate::module::{basis_upto, unit, vir_vec, Bid, GradedModule, ModVec};
use crate::poly::{RatFn, UPoly};
use crate::rational::Q;
use crate::scalar::Scalar;
use crate::sparse::{Accum, SparseVec};

/// Truncated power series `sum_{k<=order} coeffs[k] z^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormalCoordinate {
    coeffs: Vec<Scalar>,
    /// Coefficients are known through `z^order`.
    order: usize,
    /// The series is a polynomial, so every higher coefficient is zero.
    exact: bool,
}

fn mul_trunc(a: &[Scalar], b: &[Scalar], order: usize) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); order + 1];
    for (i, x) in a.iter().enumerate().take(order + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(order + 1 - i) {
            if !y.is_zero() {
                out[i + j] += &(x * y);
            }
        }
    }
    out
}

/// `f(g(z))` for `g(0) = 0`, through `z^order`.
fn compose_series(f: &[Scalar], g: &[Scalar], order: usize) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); order + 1];
    let mut pw = vec![Scalar::zero(); order + 1];
    pw[0] = Scalar::one();
    for (k, fk) in f.iter().enumerate().take(order + 1) {
        if k > 0 {
            pw = mul_trunc(&pw, g, order);
        }
        if fk.is_zero() {
            continue;
        }
        for (o, p) in out.iter_mut().zip(&pw) {
            *o += &(fk * p);
        }
    }
    out
}

impl FormalCoordinate {
    /// Series with the given coefficients (`coeffs[k]` multiplies `z^k`),
    /// known through `z^order`; missing coefficients are zero.
    pub fn new(mut coeffs: Vec<Scalar>, order: usize) -> FormalCoordinate {
        coeffs.resize(order + 1, Scalar::zero());
        FormalCoordinate { coeffs, order, exact: false }
    }

    /// Polynomial coordinate, exact to every order.
    pub fn polynomial(coeffs: Vec<Scalar>) -> FormalCoordinate {
        let order = coeffs.len().saturating_sub(1).max(1);
        let mut c = FormalCoordinate::new(coeffs, order);
        c.exact = true;
        c
    }

    pub fn identity() -> FormalCoordinate {
        FormalCoordinate::polynomial(vec![Scalar::zero(), Scalar::one()])
    }

    pub fn scaling(lambda: Scalar) -> FormalCoordinate {
        FormalCoordinate::polynomial(vec![Scalar::zero(), lambda])
    }

    /// `theta_gamma(t) = 1/(gamma+t) - 1/gamma`.
    pub fn theta(gamma: &Scalar, order: usize) -> Result<FormalCoordinate> {
        let inv = gamma.recip().ok_or(Error::DegenerateCoordinate)?;
        let mut c = vec![Scalar::zero()];
        let mut p = &inv * &inv;
        for _ in 1..=order {
            c.push(-p.clone());
            p = -(&p * &inv);
        }
        Ok(FormalCoordinate::new(c, order))
    }

    /// Coefficients `a_0, ..., a_order`.
    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// The same series, extended (if exact) or cut to `order`.
    pub fn to_order(&self, order: usize) -> Result<FormalCoordinate> {
        if order > self.order && !self.exact {
            return Err(Error::Truncation(format!("coordinate known to order {}, needs order {order}", self.order)));
        }
        let mut c = FormalCoordinate::new(self.coeffs.iter().take(order + 1).cloned().collect(), order);
        c.exact = self.exact && self.coeffs.iter().skip(order + 1).all(Scalar::is_zero);
        Ok(c)
    }

    fn check_group(&self) -> Result<()> {
        if !self.coeff(0).is_zero() || self.coeff(1).is_zero() {
            return Err(Error::DegenerateCoordinate);
        }
        Ok(())
    }

    /// `self(other(z))`.
    pub fn compose(&self, other: &FormalCoordinate) -> Result<FormalCoordinate> {
        other.check_group()?;
        let order = match (self.exact, other.exact) {
            (true, true) => (self.coeffs.len() - 1) * (other.coeffs.len() - 1),
            (true, false) => other.order,
            (false, true) => self.order,
            (false, false) => self.order.min(other.order),
        }
        .max(1);
        let mut c = FormalCoordinate::new(compose_series(&self.coeffs, &other.coeffs, order), order);
        c.exact = self.exact && other.exact;
        Ok(c)
    }

    /// Compositional inverse through `z^order`.
    pub fn inverse(&self) -> Result<FormalCoordinate> {
        self.check_group()?;
        let order = self.order;
        let a1inv = self.coeff(1).recip().unwrap();
        let mut g = vec![Scalar::zero(); order + 1];
        g[1] = a1inv.clone();
        for d in 2..=order {
            let h = compose_series(&self.coeffs, &g, d);
            g[d] = -(&h[d] * &a1inv);
        }
        Ok(FormalCoordinate::new(g, order))
    }

    /// `self(z + t) - self(z)` as a series in `t`, coefficients in `z`.
    /// Requires a polynomial.
    pub fn shifted_difference(&self, z: &Scalar) -> Result<FormalCoordinate> {
        if !self.exact {
            return Err(Error::Truncation("shifted difference needs a polynomial coordinate".into()));
        }
        let d = self.coeffs.len() - 1;
        let mut out = vec![Scalar::zero(); d + 1];
        for (k, ak) in self.coeffs.iter().enumerate() {
            if ak.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate().take(k + 1).skip(1) {
                let c = Scalar::Rat(Q::binomial(k as i64, j as i64));
                *o += &(&(ak * &c) * &z.pow((k - j) as i64));
            }
        }
        Ok(FormalCoordinate::polynomial(out))
    }

    /// Value at a scalar (polynomials only).
    pub fn eval(&self, z: &Scalar) -> Result<Scalar> {
        if !self.exact {
            return Err(Error::Truncation("only polynomial coordinates can be evaluated".into()));
        }
        let mut acc = Scalar::zero();
        for a in self.coeffs.iter().rev() {
            acc = &(&acc * z) + a;
        }
        Ok(acc)
    }
}

/// `alpha'(0)` and `c_1, ..., c_M` of the exponential form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpForm {
    pub scale: Scalar,
    /// `c[i]` is `c_{i+1}`.
    pub c: Vec<Scalar>,
}

/// `exp(sum_n c_n z^{n+1} d/dz)(z)` through `z^order`.
pub fn exp_flow(c: &[Scalar], order: usize) -> Vec<Scalar> {
    let mut sum = vec![Scalar::zero(); order + 1];
    let mut term = vec![Scalar::zero(); order + 1];
    if order >= 1 {
        sum[1] = Scalar::one();
        term[1] = Scalar::one();
    }
    let mut k = 1i64;
    loop {
        // D term = sum_n c_n z^{n+1} term'
        let mut next = vec![Scalar::zero(); order + 1];
        for (i, t) in term.iter().enumerate().skip(1) {
            if t.is_zero() {
                continue;
            }
            let dt = t * &Scalar::int(i as i64);
            for (n, cn) in c.iter().enumerate() {
                let e = i + n + 1;
                if e > order {
                    break;
                }
                next[e] += &(&dt * cn);
            }
        }
        let inv = Scalar::ratio(1, k);
        term = next.iter().map(|x| x * &inv).collect();
        if term.iter().all(Scalar::is_zero) {
            return sum;
        }
        for (s, t) in sum.iter_mut().zip(&term) {
            *s += t;
        }
        k += 1;
    }
}

/// Solves `alpha = alpha'(0) exp(sum c_n z^{n+1} d/dz)(z)` for
/// `c_1, ..., c_m`, degree by degree.
pub fn solve_exp_coefficients(alpha: &FormalCoordinate, m: usize) -> Result<ExpForm> {
    alpha.check_group()?;
    let alpha = alpha.to_order(m + 1)?;
    let scale = alpha.coeff(1);
    let inv = scale.recip().unwrap();
    let target: Vec<Scalar> = alpha.coeffs.iter().map(|a| a * &inv).collect();
    let mut c = vec![Scalar::zero(); m];
    for j in 1..=m {
        let f = exp_flow(&c[..j], j + 1);
        c[j - 1] = &target[j + 1] - &f[j + 1];
    }
    Ok(ExpForm { scale, c })
}

/// `exp(sum_i coef_i L_{n_i}) x`, dropping components above `max_weight`.
pub fn exp_virasoro(m: &dyn GradedModule, terms: &[(i64, Scalar)], x: &ModVec, max_weight: Option<u32>) -> ModVec {
    let cut = |v: ModVec| match max_weight {
        Some(t) => v.filter(|b| b.w <= t),
        None => v,
    };
    let mut sum = cut(x.clone());
    let mut term = sum.clone();
    let mut k = 1;
    while !term.is_zero() {
        let mut acc = Accum::new();
        for (n, c) in terms {
            if !c.is_zero() {
                acc.add_vec(&vir_vec(m, *n, &term), c);
            }
        }
        term = cut(acc.finish()).scale(&Scalar::ratio(1, k));
        sum = sum.add(&term);
        k += 1;
    }
    sum
}

/// `lambda^{L~0} x`.
pub fn scale_weights(x: &ModVec, lambda: &Scalar) -> ModVec {
    SparseVec::from_sorted(x.iter().map(|(b, c)| (*b, c * &lambda.pow(b.w as i64))).collect())
}

/// `U(alpha)` through its exponential form.
#[derive(Clone, Debug)]
pub struct CoordinateOperator {
    pub form: ExpForm,
}

impl CoordinateOperator {
    /// Operator valid on `W^{<=n}`.
    pub fn new(alpha: &FormalCoordinate, n: u32) -> Result<CoordinateOperator> {
        Ok(CoordinateOperator { form: solve_exp_coefficients(alpha, n.max(1) as usize)? })
    }

    fn terms(&self, sign: i64) -> Vec<(i64, Scalar)> {
        self.form.c.iter().enumerate().map(|(i, c)| (i as i64 + 1, c * &Scalar::int(sign))).collect()
    }

    fn check_range(&self, x: &ModVec) {
        let top = x.keys().map(|b| b.w).max().unwrap_or(0);
        assert!(top as usize <= self.form.c.len().max(1), "vector weight {top} exceeds the solved order");
    }

    pub fn apply(&self, m: &dyn GradedModule, x: &ModVec) -> ModVec {
        self.check_range(x);
        scale_weights(&exp_virasoro(m, &self.terms(1), x, None), &self.form.scale)
    }

    pub fn apply_inverse(&self, m: &dyn GradedModule, x: &ModVec) -> ModVec {
        self.check_range(x);
        let inv = self.form.scale.recip().unwrap();
        exp_virasoro(m, &self.terms(-1), &scale_weights(x, &inv), None)
    }

    /// `U^T w'` on the contragredient, truncated at weight `max_weight`.
    pub fn transpose_apply(&self, dual: &DualModule, x: &ModVec, max_weight: u32) -> ModVec {
        let terms: Vec<(i64, Scalar)> = self.terms(1).into_iter().map(|(n, c)| (-n, c)).collect();
        exp_virasoro(dual, &terms, &scale_weights(x, &self.form.scale), Some(max_weight))
    }
}

/// Matrix of an operator on `W^{<=n}` in the basis `basis_upto(m, n)`.
pub fn operator_matrix(m: &dyn GradedModule, n: u32, f: impl Fn(&ModVec) -> ModVec) -> Matrix {
    let b = basis_upto(m, n);
    let index: rustc_hash::FxHashMap<Bid, usize> = b.iter().enumerate().map(|(i, x)| (*x, i)).collect();
    let cols = b
        .iter()
        .map(|x| {
            let img = f(&unit(*x));
            SparseVec::from_unsorted(img.iter().map(|(k, c)| (index[k], c.clone())).collect())
        })
        .collect();
    Matrix::from_columns(b.len(), cols)
}

/// Matrix of `U(alpha)` on `W^{<=n}`.
pub fn coordinate_operator(alpha: &FormalCoordinate, m: &dyn GradedModule, n: u32) -> Result<Matrix> {
    let u = CoordinateOperator::new(alpha, n)?;
    Ok(operator_matrix(m, n, |x| u.apply(m, x)))
}

/// Taylor coefficients of `f(x + s) - f(x)` in `s`.
fn taylor_difference(f: &RatFn, x: &Q, order: usize) -> Result<Vec<Scalar>> {
    let shift = |p: &UPoly| -> UPoly {
        let mut out = vec![Q::ZERO; p.coeffs().len()];
        for (k, pk) in p.coeffs().iter().enumerate() {
            for (j, o) in out.iter_mut().enumerate().take(k + 1) {
                *o = &*o + &(pk * &(&Q::binomial(k as i64, j as i64) * &x.pow((k - j) as i64)));
            }
        }
        UPoly::from_coeffs(out)
    };
    if f.den().eval(x).is_zero() {
        return Err(Error::DegenerateCoordinate);
    }
    let g = RatFn::new(shift(f.num()), shift(f.den())).unwrap();
    let (v, c) = g.laurent_at_zero(order + 1);
    debug_assert!(v >= 0);
    let mut out = vec![Scalar::zero(); order + 1];
    for (i, q) in c.into_iter().enumerate() {
        let e = i + v as usize;
        if e <= order {
            out[e] = Scalar::Rat(q);
        }
    }
    out[0] = Scalar::zero();
    Ok(out)
}

/// `rho(eta|mu)_x(z) = eta(mu^{-1}(z + mu(x))) - eta(x)` through `z^order`.
pub fn rho_family(eta: &RatFn, mu: &RatFn, x: &Q, order: usize) -> Result<FormalCoordinate> {
    let e = taylor_difference(eta, x, order)?;
    let m = FormalCoordinate::new(taylor_difference(mu, x, order)?, order);
    let minv = m.inverse()?;
    let r = FormalCoordinate::new(compose_series(&e, &minv.coeffs, order), order);
    r.check_group()?;
    Ok(r)
}

/// Result of comparing both sides of the covariance identity
/// `<w', U(a) Y(v,z) U(a)^{-1} w> = <w', Y(U(rho(a|1)_z) v, a(z)) w>`.
#[derive(Clone, Debug, Serialize)]
pub struct HuangReport {
    pub v: String,
    pub w: String,
    pub w_dual: String,
    /// Right side as a rational function of `z`.
    pub rhs: Scalar,
    /// Exponents compared: `[first, last]`.
    pub exponents: (i64, i64),
    pub mismatches: Vec<i64>,
}

impl HuangReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Checks covariance for a polynomial `alpha` with rational coefficients,
/// homogeneous `v`, basis vectors `w` and `w'` (coordinate dual), comparing
/// the Laurent coefficients of `z^e` for `e` in the first `order + 1`
/// exponents where the left side can be nonzero.
pub fn verify_huang_covariance(
    alpha: &FormalCoordinate,
    ops: &dyn VertexOperators,
    dual: &DualModule,
    v: &ModVec,
    w: Bid,
    w_dual: Bid,
    order: u32,
) -> Result<HuangReport> {
    if let Some(s) = ops.voa().algebra().param_symbol() {
        return Err(Error::SymbolicParameter(s));
    }
    if alpha.coeffs.iter().any(|a| a.symbol().is_some()) || !alpha.exact {
        return Err(Error::Config("covariance check needs a polynomial coordinate with rational coefficients".into()));
    }
    let vm = ops.voa();
    let module = ops.module();
    let wt_v = v.first().map_or(0, |(b, _)| b.w as i64);
    let (s, sd) = (w.w as i64, w_dual.w as i64);
    let e_lo = -(wt_v + s);
    let e_hi = e_lo + order as i64;

    // Left side through U(alpha)^T w'.
    let top = (wt_v + s + e_hi).max(0) as u32;
    let u = CoordinateOperator::new(alpha, top.max(1))?;
    let uw = u.apply_inverse(module, &unit(w));
    let ut = u.transpose_apply(dual, &unit(w_dual), top);
    let mut lhs = Vec::new();
    for e in e_lo..=e_hi {
        let n = -e - 1;
        let y = crate::field::apply_vec(ops, v, n, &uw);
        lhs.push(y.dot(&ut));
    }

    // Right side as an exact rational function of z.
    let z = Scalar::param('z');
    let rho = alpha.shifted_difference(&z)?;
    let ur = CoordinateOperator::new(&rho, wt_v.max(1) as u32)?;
    let uv = ur.apply(&**vm, v);
    let az = alpha.eval(&z)?;
    let mut rhs = Scalar::zero();
    for (b, c) in uv.iter() {
        let n = b.w as i64 + s - sd - 1;
        let pair = ops.apply(*b, n, w).get(w_dual);
        if pair.is_zero() {
            continue;
        }
        rhs += &(&(c * &pair) * &az.pow(-n - 1));
    }

    let len = (order as usize) + 1 + (wt_v + s + sd) as usize + 8;
    let (val, coeffs) = rhs.laurent_at_zero(len);
    let rhs_coeff = |e: i64| -> Q {
        if rhs.is_zero() || e < val {
            return Q::ZERO;
        }
        coeffs.get((e - val) as usize).cloned().expect("expansion long enough")
    };
    let mut mismatches = Vec::new();
    for (i, e) in (e_lo..=e_hi).enumerate() {
        if lhs[i] != Scalar::Rat(rhs_coeff(e)) {
            mismatches.push(e);
        }
    }
    if val < e_lo && !rhs.is_zero() && (val..e_lo).any(|e| !rhs_coeff(e).is_zero()) {
        mismatches.push(val);
    }
    Ok(HuangReport {
        v: crate::module::format_vec(&**vm, v),
        w: module.label(w),
        w_dual: dual.label(w_dual),
        rhs,
        exponents: (e_lo, e_hi),
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::Algebra;
    use crate::field::FieldEngine;
    use crate::module::{parse_vector, PbwModule};

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    #[test]
    fn quadratic_coordinate() {
        let a = q(3, 7);
        let alpha = FormalCoordinate::polynomial(vec![Scalar::zero(), Scalar::one(), a.clone()]);
        let f = solve_exp_coefficients(&alpha, 4).unwrap();
        assert_eq!(f.scale, Scalar::one());
        assert_eq!(f.c[0], a);
        assert_eq!(f.c[1], -(&a * &a));
        let back = exp_flow(&f.c, 5);
        assert_eq!(&back[..3], alpha.coeffs());
        assert!(back[3..].iter().all(Scalar::is_zero));
    }

    #[test]
    fn theta_coefficients() {
        let g = q(5, 3);
        let th = FormalCoordinate::theta(&g, 6).unwrap();
        let f = solve_exp_coefficients(&th, 5).unwrap();
        assert_eq!(f.scale, -g.pow(-2));
        assert_eq!(f.c[0], -g.recip().unwrap());
        assert!(f.c[1..].iter().all(Scalar::is_zero));
    }

    #[test]
    fn degenerate_coordinate_is_rejected() {
        let a = FormalCoordinate::polynomial(vec![Scalar::zero(), Scalar::zero(), Scalar::one()]);
        assert!(matches!(solve_exp_coefficients(&a, 3), Err(Error::DegenerateCoordinate)));
    }

    #[test]
    fn rho_examples() {
        let zeta = RatFn::from_poly(UPoly::x());
        let inv = RatFn::from_poly(UPoly::x()).recip().unwrap();
        let g = Q::new(2, 3);
        let r = rho_family(&zeta, &inv, &g.recip().unwrap(), 6).unwrap();
        assert_eq!(r, FormalCoordinate::theta(&Scalar::Rat(g), 6).unwrap());
        let r = rho_family(&inv, &inv, &Q::new(5, 2), 5).unwrap();
        assert_eq!(r.coeffs(), FormalCoordinate::identity().to_order(5).unwrap().coeffs());
    }

    #[test]
    fn vacuum_is_fixed_and_inverse_works() {
        let v = PbwModule::vacuum(Arc::new(Algebra::virasoro(Scalar::param('c'))));
        let alpha = FormalCoordinate::polynomial(vec![Scalar::zero(), q(2, 1), q(1, 3), q(-1, 5)]);
        let u = CoordinateOperator::new(&alpha, 5).unwrap();
        assert_eq!(u.apply(&*v, &unit(Bid::TOP)), unit(Bid::TOP));
        for b in basis_upto(&*v, 5) {
            assert_eq!(u.apply(&*v, &u.apply_inverse(&*v, &unit(b))), unit(b));
        }
    }

    #[test]
    fn identity_and_scaling_covariance() {
        let v = PbwModule::vacuum(Arc::new(Algebra::virasoro(q(1, 2))));
        let e = FieldEngine::on_self(v.clone());
        let w: Arc<dyn GradedModule> = v.clone();
        let d = DualModule::new(w);
        let c = parse_vector(&*v, "L[-2]").unwrap();
        for alpha in [FormalCoordinate::identity(), FormalCoordinate::scaling(q(3, 2))] {
            for x in basis_upto(&*v, 3) {
                for y in basis_upto(&*v, 3) {
                    let r = verify_huang_covariance(&alpha, &*e, &d, &c, x, y, 4).unwrap();
                    assert!(r.passed(), "{r:?}");
                }
            }
        }
    }
}
