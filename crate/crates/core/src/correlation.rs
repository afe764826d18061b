//! Exact four-point functions `<w', Y(u,z1) Y(v,z2) w>` as rational
//! functions, with commutativity and associativity checks.

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{apply_to, VertexOperators};
use crate::laurent::{ratfunc_expand, Laurent2, RationalFunction2, Region};
use crate::module::{Bid, ModVec};
use crate::rational::Q;
use crate::scalar::Scalar;

fn weight(x: &ModVec) -> Option<i64> {
    x.first().map(|(b, _)| b.w as i64)
}

/// Smallest `n >= 0` with `Y(u)_m v = 0` for every `m >= n`.
pub fn locality_order(vv: &dyn VertexOperators, u: &ModVec, v: &ModVec) -> u32 {
    let (Some(a), Some(b)) = (weight(u), weight(v)) else { return 0 };
    let mut n = a + b;
    while n > 0 {
        let m = n - 1;
        let nonzero = v.iter().any(|(vb, _)| !apply_to(vv, u, m, *vb).is_zero());
        if nonzero {
            break;
        }
        n -= 1;
    }
    n as u32
}

/// `<w', Y(u,z1) Y(v,z2) w>` for homogeneous `u, v` and basis vectors `w`,
/// `w'` (coordinate dual). The product with `(z1-z2)^N`, `N = wt u + wt v`,
/// is a Laurent polynomial assembled from the mode matrix elements
/// `<w', Y(u)_a Y(v)_b w>`; common factors are then cancelled.
pub fn four_point(ops: &dyn VertexOperators, w_dual: Bid, u: &ModVec, v: &ModVec, w: Bid) -> Result<RationalFunction2> {
    let (Some(wu), Some(wv)) = (weight(u), weight(v)) else {
        return Ok(RationalFunction2::laurent(Laurent2::new()));
    };
    let (s, sd) = (w.w as i64, w_dual.w as i64);
    let total = wu + wv + s - sd - 2;
    let n = wu + wv;
    let d = n - total - 2;
    let (q_lo, q_hi) = (-(s + wv), d + s + wu);
    const MARGIN: i64 = 2;
    let mut inner: FxHashMap<i64, ModVec> = FxHashMap::default();
    let mut elem = |a: i64, b: i64| -> Scalar {
        let y = inner.entry(b).or_insert_with(|| {
            let mut acc = crate::sparse::Accum::new();
            for (vb, c) in v.iter() {
                acc.add_vec(&ops.apply(*vb, b, w), c);
            }
            acc.finish()
        });
        let mut r = Scalar::zero();
        for (x, c) in y.iter() {
            r += &(c * &apply_to(ops, u, a, *x).get(w_dual));
        }
        r
    };
    let mut num = Laurent2::new();
    for q in (q_lo - MARGIN)..=(q_hi + MARGIN) {
        let mut coef = Scalar::zero();
        for j in 0..=n {
            let b = j - q - 1;
            let e = elem(total - b, b);
            if e.is_zero() {
                continue;
            }
            let c = Q::binomial(n, j);
            let c = if j % 2 == 0 { c } else { -c };
            coef += &(&Scalar::Rat(c) * &e);
        }
        if coef.is_zero() {
            continue;
        }
        if q < q_lo || q > q_hi {
            return Err(Error::Truncation(format!("four-point numerator has a term z2^{q} outside [{q_lo}, {q_hi}]")));
        }
        num.add_term(d - q, q, &coef);
    }
    Ok(RationalFunction2::new(num, n as u32))
}

#[derive(Clone, Debug, Serialize)]
pub struct CommAssocReport {
    pub function: RationalFunction2,
    pub commutativity: bool,
    pub associativity: bool,
    /// Number of `(t, z2)` coefficients compared.
    pub compared: usize,
}

impl CommAssocReport {
    pub fn passed(&self) -> bool {
        self.commutativity && self.associativity
    }
}

/// Commutativity: the opposite ordering gives the same rational function.
/// Associativity: near the diagonal, with `t = z1 - z2`, the expansion
/// equals `sum_j t^{-j-1} <w', Y(Y(u)_j v, z2) w>` through `order` powers
/// of `t` past the leading one.
pub fn check_comm_assoc(
    ops: &dyn VertexOperators,
    vv: &dyn VertexOperators,
    w_dual: Bid,
    u: &ModVec,
    v: &ModVec,
    w: Bid,
    order: i64,
) -> Result<CommAssocReport> {
    let f = four_point(ops, w_dual, u, v, w)?;
    let g = four_point(ops, w_dual, v, u, w)?.swap();
    let commutativity = f == g;

    let near = ratfunc_expand(&f, Region::NearDiagonal, order)?;
    let cap = -(f.diff_order() as i64) + order;
    let mut ope = Laurent2::new();
    if let (Some(wu), Some(wv)) = (weight(u), weight(v)) {
        let (s, sd) = (w.w as i64, w_dual.w as i64);
        for j in (-cap - 1)..(wu + wv) {
            let x = {
                let mut acc = crate::sparse::Accum::new();
                for (vb, c) in v.iter() {
                    acc.add_vec(&apply_to(vv, u, j, *vb), c);
                }
                acc.finish()
            };
            if x.is_zero() {
                continue;
            }
            let m = (wu + wv - j - 1) + s - sd - 1;
            let mut coef = Scalar::zero();
            for (xb, c) in x.iter() {
                coef += &(c * &ops.apply(*xb, m, w).get(w_dual));
            }
            ope.add_term(-j - 1, -m - 1, &coef);
        }
    }
    let associativity = near == ope;
    Ok(CommAssocReport { function: f, commutativity, associativity, compared: near.len().max(ope.len()) })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::Algebra;
    use crate::field::FieldEngine;
    use crate::module::{parse_vector, unit, PbwModule};

    #[test]
    fn heisenberg_two_point() {
        let v = PbwModule::vacuum(Arc::new(Algebra::heisenberg(1, Scalar::param('l'))));
        let e = FieldEngine::on_self(v.clone());
        let x = parse_vector(&*v, "X[-1]").unwrap();
        let f = four_point(&*e, Bid::TOP, &x, &x, Bid::TOP).unwrap();
        assert_eq!(f.to_factored_string(), "l/(z1-z2)^2");
        assert_eq!(locality_order(&*e, &x, &x), 2);
    }

    #[test]
    fn virasoro_two_point() {
        let v = PbwModule::vacuum(Arc::new(Algebra::virasoro(Scalar::param('c'))));
        let e = FieldEngine::on_self(v.clone());
        let t = parse_vector(&*v, "L[-2]").unwrap();
        let f = four_point(&*e, Bid::TOP, &t, &t, Bid::TOP).unwrap();
        assert_eq!(f.to_factored_string(), "1/2*c/(z1-z2)^4");
        let one = unit(Bid::TOP);
        let g = four_point(&*e, Bid::TOP, &one, &one, Bid::TOP).unwrap();
        assert_eq!(g.to_factored_string(), "1");
    }

    #[test]
    fn comm_assoc_virasoro() {
        let v = PbwModule::vacuum(Arc::new(Algebra::virasoro(Scalar::ratio(1, 2))));
        let e = FieldEngine::on_self(v.clone());
        let t = parse_vector(&*v, "L[-2]").unwrap();
        let w = t.first().unwrap().0;
        let r = check_comm_assoc(&*e, &*e, w, &t, &t, w, 6).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.compared > 0);
    }
}
