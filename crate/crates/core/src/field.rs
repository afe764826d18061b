//! Vertex operators `Y(v)_n` on modules, built from the generating fields.
//!
//! The main engine writes a PBW vector as `v = a_(p) u` with `a` the
//! generating vector and uses the iterate formula
//! `Y(a_(p) u)_n = sum_l (-1)^l C(p,l) (A_{p-l} Y(u)_{n+l} - (-1)^p Y(u)_{p+n-l} A_l)`,
//! memoizing every `(v, n, w)` column. [`Field`] provides a second route
//! through derivatives and normal-ordered products of fields.

use std::collections::BTreeMap;
use std::sync::Arc;

use parking_lot::RwLock;
use rustc_hash::FxHashMap;

use crate::algebra::Gen;
use crate::linalg::Matrix;
use crate::module::{act_vec, basis, unit, Bid, GradedModule, ModVec, PbwModule};
use crate::rational::Q;
use crate::scalar::Scalar;
use crate::sparse::{Accum, SparseVec};

/// Vertex operators of the vacuum module `V` acting on a module `W`.
pub trait VertexOperators: Send + Sync {
    /// The vertex algebra (a vacuum PBW module).
    fn voa(&self) -> &Arc<PbwModule>;
    /// The module acted on.
    fn module(&self) -> &dyn GradedModule;
    /// `Y_W(v)_n w` for basis vectors `v` of `V` and `w` of `W`.
    fn apply(&self, v: Bid, n: i64, w: Bid) -> Arc<ModVec>;
}

/// `Y_W(v)_n w` for arbitrary vectors `v` and `w`.
pub fn apply_vec(ops: &dyn VertexOperators, v: &ModVec, n: i64, w: &ModVec) -> ModVec {
    let mut acc = Accum::new();
    for (vb, vs) in v.iter() {
        for (wb, ws) in w.iter() {
            acc.add_vec(&ops.apply(*vb, n, *wb), &(vs * ws));
        }
    }
    acc.finish()
}

/// `Y_W(v)_n w` for a vector `v` and a basis vector `w`.
pub fn apply_to(ops: &dyn VertexOperators, v: &ModVec, n: i64, w: Bid) -> ModVec {
    let mut acc = Accum::new();
    for (vb, vs) in v.iter() {
        acc.add_vec(&ops.apply(*vb, n, w), vs);
    }
    acc.finish()
}

/// Weight of `Y(v)_n w`, or `None` when it would be negative.
pub fn target_weight(v: Bid, n: i64, w: Bid) -> Option<u32> {
    let t = w.w as i64 + v.w as i64 - n - 1;
    (t >= 0).then_some(t as u32)
}

/// The main engine: iterate formula with a concurrent-read memo table.
pub struct FieldEngine {
    v: Arc<PbwModule>,
    w: Arc<dyn GradedModule>,
    memo: RwLock<FxHashMap<(Bid, i64, Bid), Arc<ModVec>>>,
}

impl FieldEngine {
    pub fn new(v: Arc<PbwModule>, w: Arc<dyn GradedModule>) -> Arc<FieldEngine> {
        assert!(v.is_vacuum(), "the vertex algebra must be a vacuum module");
        Arc::new(FieldEngine { v, w, memo: RwLock::new(FxHashMap::default()) })
    }

    /// Engine for `V` acting on itself.
    pub fn on_self(v: Arc<PbwModule>) -> Arc<FieldEngine> {
        let w: Arc<dyn GradedModule> = v.clone();
        FieldEngine::new(v, w)
    }

    pub fn module_arc(&self) -> &Arc<dyn GradedModule> {
        &self.w
    }

    pub fn clear_cache(&self) {
        self.memo.write().clear();
    }

    pub fn cache_len(&self) -> usize {
        self.memo.read().len()
    }

    fn compute(&self, v: Bid, n: i64, w: Bid) -> ModVec {
        let Some(((g, m), u)) = self.v.split(v) else {
            return if n == -1 { unit(w) } else { SparseVec::new() };
        };
        let alg = self.v.algebra();
        let shift = alg.mode_shift();
        let p = m + shift;
        let wt_a = alg.field_weight();
        let s = w.w as i64;
        let wt_u = u.w as i64;
        let module = &*self.w;
        let mut acc = Accum::new();
        let sign_p = if p.rem_euclid(2) == 0 { Scalar::one() } else { Scalar::int(-1) };
        let l_max1 = s + wt_u - n - 1;
        let l_max2 = s + wt_a - 1;
        for l in 0..=l_max1.max(l_max2) {
            let c = Q::binomial(p, l);
            if c.is_zero() {
                continue;
            }
            let c = Scalar::Rat(if l % 2 == 0 { c } else { -c });
            if l <= l_max1 {
                let y = self.apply(u, n + l, w);
                if !y.is_zero() {
                    acc.add_vec(&act_vec(module, g, p - l - shift, &y), &c);
                }
            }
            if l <= l_max2 {
                let a = module.act(g, l - shift, w);
                if !a.is_zero() {
                    let coef = -(&c * &sign_p);
                    for (b, x) in a.iter() {
                        acc.add_vec(&self.apply(u, p + n - l, *b), &(&coef * x));
                    }
                }
            }
        }
        acc.finish()
    }
}

impl VertexOperators for FieldEngine {
    fn voa(&self) -> &Arc<PbwModule> {
        &self.v
    }

    fn module(&self) -> &dyn GradedModule {
        &*self.w
    }

    fn apply(&self, v: Bid, n: i64, w: Bid) -> Arc<ModVec> {
        if target_weight(v, n, w).is_none() {
            return Arc::new(SparseVec::new());
        }
        let key = (v, n, w);
        if let Some(x) = self.memo.read().get(&key) {
            return x.clone();
        }
        let x = Arc::new(self.compute(v, n, w));
        self.memo.write().insert(key, x.clone());
        x
    }
}

/// Weight-homogeneous operator stored as one matrix per source weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeOperator {
    /// Weight shift: maps weight `s` to weight `s + shift`.
    pub shift: i64,
    /// Domain truncation bound.
    pub truncation: u32,
    /// Blocks keyed by source weight; absent when the target leaves `[0, N]`.
    pub blocks: BTreeMap<u32, Matrix>,
    /// Whether some nonzero component above the truncation was discarded.
    pub truncated: bool,
}

impl ModeOperator {
    /// Builds blocks from column images of basis vectors.
    pub fn from_fn(module: &dyn GradedModule, shift: i64, n: u32, f: impl Fn(Bid) -> ModVec) -> ModeOperator {
        let mut blocks = BTreeMap::new();
        let mut truncated = false;
        for s in 0..=n {
            let t = s as i64 + shift;
            if t < 0 {
                continue;
            }
            let inside = t <= n as i64;
            let rows = if inside { module.dim(t as u32) } else { 0 };
            let mut cols = Vec::new();
            for b in basis(module, s) {
                let img = f(b);
                debug_assert!(img.keys().all(|k| k.w as i64 == t), "image is not homogeneous");
                if inside {
                    cols.push(SparseVec::from_sorted(img.iter().map(|(k, x)| (k.i as usize, x.clone())).collect()));
                } else if !img.is_zero() {
                    truncated = true;
                }
            }
            if inside {
                blocks.insert(s, Matrix::from_columns(rows, cols));
            }
        }
        ModeOperator { shift, truncation: n, blocks, truncated }
    }

    /// Matrix of `Y(v)_n` on `W^{<=N}` for homogeneous `v`.
    pub fn of_vertex(ops: &dyn VertexOperators, v: &ModVec, n: i64, trunc: u32) -> ModeOperator {
        let wt = v.first().map_or(0, |(b, _)| b.w as i64);
        ModeOperator::from_fn(ops.module(), wt - n - 1, trunc, |w| apply_to(ops, v, n, w))
    }
}

/// Matrix blocks of `Y(v)_n` on the truncation `W^{<=N}`.
pub fn mode(ops: &dyn VertexOperators, v: &ModVec, n: i64, trunc: u32) -> ModeOperator {
    ModeOperator::of_vertex(ops, v, n, trunc)
}

/// Matrix blocks of the module's own `L_m` (Sugawara for affine algebras).
pub fn sugawara_mode(module: &dyn GradedModule, m: i64, trunc: u32) -> ModeOperator {
    ModeOperator::from_fn(module, -m, trunc, |b| (*module.virasoro(m, b)).clone())
}

/// A field on a module, described by how it is built.
#[derive(Clone, Debug)]
pub enum Field {
    /// `Y(1, z)`, the identity.
    Identity,
    /// Generating field with modes `A_j` (for Virasoro `A_j = L_{j-1}`).
    Generator(Gen),
    /// `Y(v, z)` through a [`VertexOperators`] implementation.
    Vertex(ModVec),
    /// Divided derivative `(1/j!) d^j A`.
    Derivative(Box<Field>, u32),
    /// Normal-ordered product `:A B:`.
    NormalOrdered(Box<Field>, Box<Field>),
    /// Weighted sum of fields of equal weight.
    Sum(Vec<(Scalar, Field)>),
}

impl Field {
    /// Conformal weight.
    pub fn weight(&self, ops: &dyn VertexOperators) -> i64 {
        match self {
            Field::Identity => 0,
            Field::Generator(_) => ops.voa().algebra().field_weight(),
            Field::Vertex(v) => v.first().map_or(0, |(b, _)| b.w as i64),
            Field::Derivative(a, j) => a.weight(ops) + *j as i64,
            Field::NormalOrdered(a, b) => a.weight(ops) + b.weight(ops),
            Field::Sum(t) => t.first().map_or(0, |(_, f)| f.weight(ops)),
        }
    }

    /// `A_n w` for a basis vector `w`.
    pub fn apply(&self, ops: &dyn VertexOperators, n: i64, w: Bid) -> ModVec {
        let s = w.w as i64;
        let module = ops.module();
        match self {
            Field::Identity => {
                if n == -1 {
                    unit(w)
                } else {
                    SparseVec::new()
                }
            }
            Field::Generator(g) => {
                let shift = ops.voa().algebra().mode_shift();
                (*module.act(*g, n - shift, w)).clone()
            }
            Field::Vertex(v) => apply_to(ops, v, n, w),
            Field::Derivative(a, j) => {
                let j = *j as i64;
                let c = Q::binomial(-n + j - 1, j);
                if c.is_zero() {
                    return SparseVec::new();
                }
                a.apply(ops, n - j, w).scale(&Scalar::Rat(c))
            }
            Field::NormalOrdered(a, b) => {
                let (da, db) = (a.weight(ops), b.weight(ops));
                let mut acc = Accum::new();
                // sum_{m<0} A_m B_{n-m-1} w: B-mode output weight s + db - n + m >= 0
                for m in (n - s - db).min(0)..0 {
                    let y = b.apply(ops, n - m - 1, w);
                    for (x, c) in y.iter() {
                        acc.add_vec(&a.apply(ops, m, *x), c);
                    }
                }
                // sum_{m>=0} B_{n-m-1} A_m w: A_m w weight s + da - m - 1 >= 0
                for m in 0..=(s + da - 1) {
                    let y = a.apply(ops, m, w);
                    for (x, c) in y.iter() {
                        acc.add_vec(&b.apply(ops, n - m - 1, *x), c);
                    }
                }
                acc.finish()
            }
            Field::Sum(terms) => {
                let mut acc = Accum::new();
                for (c, f) in terms {
                    acc.add_vec(&f.apply(ops, n, w), c);
                }
                acc.finish()
            }
        }
    }

    pub fn apply_vec(&self, ops: &dyn VertexOperators, n: i64, w: &ModVec) -> ModVec {
        let mut acc = Accum::new();
        for (b, c) in w.iter() {
            acc.add_vec(&self.apply(ops, n, *b), c);
        }
        acc.finish()
    }

    /// Field of a PBW basis vector as nested normal-ordered products of
    /// divided derivatives of generators:
    /// `a_(-j-1) u  ->  :(d^(j) A) Y(u):`.
    pub fn of_basis_vector(v: &PbwModule, b: Bid) -> Field {
        match v.split(b) {
            None => Field::Identity,
            Some(((g, m), u)) => {
                let p = m + v.algebra().mode_shift();
                let j = (-p - 1) as u32;
                Field::NormalOrdered(
                    Box::new(Field::Derivative(Box::new(Field::Generator(g)), j)),
                    Box::new(Field::of_basis_vector(v, u)),
                )
            }
        }
    }

    /// Field of an arbitrary homogeneous vector of `V`.
    pub fn of_vector(v: &PbwModule, x: &ModVec) -> Field {
        Field::Sum(x.iter().map(|(b, c)| (c.clone(), Field::of_basis_vector(v, *b))).collect())
    }
}

/// Mode `k` of `(1/j!) :(d^j A) B:` applied to a basis vector.
pub fn normal_ordered_mode(ops: &dyn VertexOperators, a: &Field, b: &Field, j: u32, k: i64, w: Bid) -> ModVec {
    Field::NormalOrdered(Box::new(Field::Derivative(Box::new(a.clone()), j)), Box::new(b.clone())).apply(ops, k, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::module::{basis_upto, parse_vector, vir_vec};

    fn vir(c: Scalar) -> Arc<PbwModule> {
        PbwModule::vacuum(Arc::new(Algebra::virasoro(c)))
    }

    #[test]
    fn vacuum_field_is_identity() {
        let v = vir(Scalar::param('c'));
        let e = FieldEngine::on_self(v.clone());
        for w in basis_upto(&*v, 5) {
            for n in -3..3 {
                let want = if n == -1 { unit(w) } else { SparseVec::new() };
                assert_eq!(*e.apply(Bid::TOP, n, w), want);
            }
        }
    }

    #[test]
    fn conformal_vector_gives_virasoro_modes() {
        let v = vir(Scalar::param('c'));
        let e = FieldEngine::on_self(v.clone());
        let c = parse_vector(&*v, "L[-2]").unwrap();
        let cb = c.first().unwrap().0;
        for w in basis_upto(&*v, 5) {
            for n in -3..=4 {
                assert_eq!(*e.apply(cb, n, w), *v.virasoro(n - 1, w), "n={n} w={w:?}");
            }
        }
    }

    #[test]
    fn translation_covariance() {
        let v = vir(Scalar::param('c'));
        let e = FieldEngine::on_self(v.clone());
        let x = parse_vector(&*v, "L[-3]L[-2]").unwrap();
        let dx = vir_vec(&*v, -1, &x);
        for w in basis_upto(&*v, 4) {
            for n in -3..=3 {
                let lhs = apply_to(&*e, &dx, n, w);
                let rhs = apply_to(&*e, &x, n - 1, w).scale(&Scalar::int(-n));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn normal_ordering_route_agrees() {
        let v = vir(Scalar::param('c'));
        let e = FieldEngine::on_self(v.clone());
        let t = Field::Generator(0);
        // Y(c_{-1} c)_3 1 two ways.
        let direct = parse_vector(&*v, "L[-2]L[-2]").unwrap();
        let a = normal_ordered_mode(&*e, &t, &t, 0, 3, Bid::TOP);
        let b = apply_to(&*e, &direct, 3, Bid::TOP);
        assert_eq!(a, b);
        for w in basis_upto(&*v, 4) {
            for x in basis_upto(&*v, 5) {
                let f = Field::of_basis_vector(&v, x);
                for n in -2..=3 {
                    assert_eq!(f.apply(&*e, n, w), *e.apply(x, n, w));
                }
            }
        }
    }

    #[test]
    fn heisenberg_identity_field() {
        let v = PbwModule::vacuum(Arc::new(Algebra::heisenberg(1, Scalar::one())));
        let e = FieldEngine::on_self(v.clone());
        let x = Field::Generator(0);
        for w in basis_upto(&*v, 4) {
            for k in -3..3 {
                let lhs = Field::NormalOrdered(Box::new(x.clone()), Box::new(Field::Identity)).apply(&*e, k, w);
                assert_eq!(lhs, x.apply(&*e, k, w));
            }
        }
    }

    #[test]
    fn mode_operator_blocks() {
        let v = vir(Scalar::param('c'));
        let e = FieldEngine::on_self(v.clone());
        let c = parse_vector(&*v, "L[-2]").unwrap();
        let op = ModeOperator::of_vertex(&*e, &c, 1, 6);
        assert_eq!(op.shift, 0);
        for (s, m) in &op.blocks {
            let want = Matrix::identity(v.dim(*s)).scale(&Scalar::int(*s as i64));
            assert_eq!(m, &want);
        }
        let raise = ModeOperator::of_vertex(&*e, &c, -1, 4);
        assert!(raise.truncated);
    }
}
