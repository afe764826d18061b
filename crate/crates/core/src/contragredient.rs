//! Contragredient modules `W'`: graded duals with the coordinate pairing.
//!
//! Two independent actions are provided. [`DualModule`] transposes the
//! generator modes (`L_j' = (L_{-j})^T`, `X_n' = -(X_{-n})^T`) so the field
//! engine can run on it; [`Contragredient`] builds every `Y_{W'}(v)_n` from
//! `Y_W` directly:
//! `Y_{W'}(v)_n = sum_k (-1)^{wt v}/k! (Y_W(L_1^k v)_{-n-k-2+2 wt v})^T`.

use std::sync::Arc;

use parking_lot::RwLock;
use rustc_hash::FxHashMap;

use crate::algebra::{Algebra, Gen};
use crate::field::{apply_to, VertexOperators};
use crate::module::{basis, basis_upto, vir_vec, Bid, GradedModule, ModVec, PbwModule, VIR};
use crate::rational::Q;
use crate::scalar::Scalar;
use crate::sparse::SparseVec;
use crate::verify::{verify_module_axioms, AxiomReport, Counterexample, VerificationReport, VerifyOptions};

/// Columns of a transposed block: entry `i` is the image of `W'(s)` basis
/// vector `i`.
type Block = Arc<Vec<ModVec>>;

/// Transpose of an operator `W(t) -> W(s)` given by its column images, as
/// columns `W'(s) -> W'(t)`.
fn transpose_block(dim_s: usize, t: u32, images: impl Iterator<Item = (u32, ModVec)>, scale: &Scalar) -> Vec<ModVec> {
    let mut cols: Vec<Vec<(Bid, Scalar)>> = vec![Vec::new(); dim_s];
    for (j, img) in images {
        for (b, c) in img.iter() {
            cols[b.i as usize].push((Bid { w: t, i: j }, c * scale));
        }
    }
    cols.into_iter().map(SparseVec::from_unsorted).collect()
}

/// `W'` with generator modes acting by transposition.
pub struct DualModule {
    base: Arc<dyn GradedModule>,
    blocks: RwLock<FxHashMap<(Gen, i64, u32), Block>>,
}

impl DualModule {
    pub fn new(base: Arc<dyn GradedModule>) -> Arc<DualModule> {
        Arc::new(DualModule { base, blocks: RwLock::new(FxHashMap::default()) })
    }

    pub fn base(&self) -> &Arc<dyn GradedModule> {
        &self.base
    }

    fn block(&self, g: Gen, m: i64, s: u32) -> Option<Block> {
        let t = s as i64 - m;
        if t < 0 {
            return None;
        }
        let key = (g, m, s);
        if let Some(b) = self.blocks.read().get(&key) {
            return Some(b.clone());
        }
        let t = t as u32;
        let base = &*self.base;
        let (scale, images): (Scalar, Vec<(u32, ModVec)>) = if g == VIR {
            (Scalar::one(), basis(base, t).map(|b| (b.i, (*base.virasoro(-m, b)).clone())).collect())
        } else if base.algebra().is_virasoro() {
            // L_j' = (L_{-j})^T
            (Scalar::one(), basis(base, t).map(|b| (b.i, (*base.act(g, -m, b)).clone())).collect())
        } else {
            // X_n' = -(X_{-n})^T
            (Scalar::int(-1), basis(base, t).map(|b| (b.i, (*base.act(g, -m, b)).clone())).collect())
        };
        let block = Arc::new(transpose_block(base.dim(s), t, images.into_iter(), &scale));
        self.blocks.write().insert(key, block.clone());
        Some(block)
    }
}

impl GradedModule for DualModule {
    fn algebra(&self) -> &Algebra {
        self.base.algebra()
    }

    fn dim(&self, w: u32) -> usize {
        self.base.dim(w)
    }

    fn lowest_weight(&self) -> Scalar {
        self.base.lowest_weight()
    }

    fn act(&self, g: Gen, m: i64, b: Bid) -> Arc<ModVec> {
        match self.block(g, m, b.w) {
            Some(blk) => Arc::new(blk[b.i as usize].clone()),
            None => Arc::new(SparseVec::new()),
        }
    }

    fn virasoro(&self, n: i64, b: Bid) -> Arc<ModVec> {
        self.act(VIR, n, b)
    }

    fn label(&self, b: Bid) -> String {
        format!("({})'", self.base.label(b))
    }

    fn name(&self) -> String {
        format!("contragredient of the {}", self.base.name())
    }
}

/// `Y_{W'}` assembled from `Y_W` by the transpose formula.
pub struct Contragredient {
    inner: Arc<dyn VertexOperators>,
    dual: Arc<DualModule>,
    blocks: RwLock<FxHashMap<(Bid, i64, u32), Block>>,
}

impl Contragredient {
    /// `inner` is `V` acting on `W`.
    pub fn new(inner: Arc<dyn VertexOperators>, w: Arc<dyn GradedModule>) -> Arc<Contragredient> {
        Arc::new(Contragredient { inner, dual: DualModule::new(w), blocks: RwLock::new(FxHashMap::default()) })
    }

    pub fn dual(&self) -> &Arc<DualModule> {
        &self.dual
    }

    fn block(&self, v: Bid, n: i64, s: u32) -> Option<Block> {
        let wt = v.w as i64;
        let t = s as i64 + wt - n - 1;
        if t < 0 {
            return None;
        }
        let key = (v, n, s);
        if let Some(b) = self.blocks.read().get(&key) {
            return Some(b.clone());
        }
        let t = t as u32;
        let vm: &PbwModule = self.inner.voa();
        let w = self.inner.module();
        let sign = if wt % 2 == 0 { Scalar::one() } else { Scalar::int(-1) };
        let mut cols: Vec<Vec<(Bid, Scalar)>> = vec![Vec::new(); w.dim(s)];
        let mut lv = crate::module::unit(v);
        for k in 0..=wt {
            if lv.is_zero() {
                break;
            }
            let coef = &sign * &Scalar::Rat(Q::factorial(k as u32).recip().unwrap());
            let j = -n - k - 2 + 2 * wt;
            for b in basis(w, t) {
                let img = apply_to(&*self.inner, &lv, j, b);
                for (x, c) in img.iter() {
                    debug_assert_eq!(x.w, s);
                    cols[x.i as usize].push((b, c * &coef));
                }
            }
            lv = vir_vec(vm, 1, &lv);
        }
        let block: Block = Arc::new(cols.into_iter().map(SparseVec::from_unsorted).collect());
        self.blocks.write().insert(key, block.clone());
        Some(block)
    }
}

impl VertexOperators for Contragredient {
    fn voa(&self) -> &Arc<PbwModule> {
        self.inner.voa()
    }

    fn module(&self) -> &dyn GradedModule {
        &*self.dual
    }

    fn apply(&self, v: Bid, n: i64, w: Bid) -> Arc<ModVec> {
        match self.block(v, n, w.w) {
            Some(b) => Arc::new(b[w.i as usize].clone()),
            None => Arc::new(SparseVec::new()),
        }
    }
}

/// Blockwise comparison of two vertex-operator actions on modules whose
/// bases are identified coordinatewise (such as `W''` and `W`). Returns the
/// number of compared columns and the first mismatch.
pub fn compare_actions(
    a: &dyn VertexOperators,
    b: &dyn VertexOperators,
    span: &[Bid],
    truncation: u32,
    window: i64,
) -> (u64, Option<String>) {
    let mut checks = 0;
    for &v in span {
        for n in -window..=window {
            for s in 0..=truncation {
                for w in basis(a.module(), s) {
                    checks += 1;
                    if a.apply(v, n, w) != b.apply(v, n, w) {
                        return (checks, Some(format!("Y({})_{n} on {}", a.voa().label(v), a.module().label(w))));
                    }
                }
            }
        }
    }
    (checks, None)
}

/// Module-axiom suite for `W'` plus `dim W'(n) = dim W(n)` and
/// `Y_{W''} = Y_W` blockwise. `ops` is `V` acting on `w`.
pub fn verify_contragredient(
    ops: Arc<dyn VertexOperators>,
    w: Arc<dyn GradedModule>,
    vv: &dyn VertexOperators,
    opts: &VerifyOptions,
) -> VerificationReport {
    let d = Contragredient::new(ops.clone(), w.clone());
    let mut report = verify_module_axioms(&*d, vv, opts);
    report.subject = d.dual().name();

    let mut dims = AxiomReport { axiom: "dimensions".into(), checks: 0, failures: 0, counterexample: None };
    for n in 0..=opts.truncation {
        dims.checks += 1;
        let (a, b) = (d.dual().dim(n), w.dim(n));
        if a != b {
            dims.failures += 1;
            dims.counterexample.get_or_insert(Counterexample { case: format!("weight {n}"), lhs: a.to_string(), rhs: b.to_string() });
        }
    }
    report.axioms.push(dims);

    let dd = Contragredient::new(d.clone(), d.dual().clone());
    let span = basis_upto(&**vv.voa(), opts.span_weight);
    let (checks, bad) = compare_actions(&*dd, &*ops, &span, opts.truncation, opts.window);
    report.axioms.push(AxiomReport {
        axiom: "double-dual".into(),
        checks,
        failures: bad.is_some() as u64,
        counterexample: bad.map(|case| Counterexample { case, lhs: "Y_{W''}".into(), rhs: "Y_W".into() }),
    });
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldEngine;
    use crate::module::parse_vector;

    #[test]
    fn conformal_modes_are_adjoint() {
        let v = PbwModule::vacuum(Arc::new(Algebra::virasoro(Scalar::param('c'))));
        let e = FieldEngine::on_self(v.clone());
        let w: Arc<dyn GradedModule> = v.clone();
        let d = Contragredient::new(e, w.clone());
        let c = parse_vector(&*v, "L[-2]").unwrap();
        let cb = c.first().unwrap().0;
        // <L_n w', w> = <w', L_{-n} w>
        for n in -2..=2i64 {
            for x in basis_upto(&*v, 4) {
                let lhs = d.apply(cb, n + 1, x);
                for (y, s) in lhs.iter() {
                    assert_eq!(*s, v.virasoro(-n, *y).get(x));
                }
            }
        }
        for x in basis_upto(&*v, 4) {
            for n in -3..3 {
                let got = d.apply(Bid::TOP, n, x);
                assert_eq!(got.is_zero(), n != -1);
            }
        }
    }

    #[test]
    fn transposed_generators_match_transpose_formula() {
        let v = PbwModule::vacuum(Arc::new(Algebra::heisenberg(1, Scalar::one())));
        let e = FieldEngine::on_self(v.clone());
        let w: Arc<dyn GradedModule> = v.clone();
        let d = Contragredient::new(e, w);
        let dual: Arc<dyn GradedModule> = d.dual().clone();
        let e2 = FieldEngine::new(v.clone(), dual);
        let span = basis_upto(&*v, 3);
        assert_eq!(compare_actions(&*d, &*e2, &span, 4, 2).1, None);
    }
}
