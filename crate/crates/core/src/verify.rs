//! Mechanical checks of the vertex-algebra and module axioms on truncations.

use std::collections::BTreeMap;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::algebra::Gen;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::field::{apply_to, apply_vec, VertexOperators};
use crate::module::{act_vec, basis, basis_upto, format_vec, unit, vir_vec, Bid, GradedModule, ModVec, PbwModule};
use crate::rational::Q;
use crate::scalar::Scalar;
use crate::sparse::{Accum, SparseVec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub case: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub axiom: String,
    pub checks: u64,
    pub failures: u64,
    pub counterexample: Option<Counterexample>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub subject: String,
    pub params: BTreeMap<String, String>,
    pub axioms: Vec<AxiomReport>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.axioms.iter().all(AxiomReport::passed)
    }

    pub fn axiom(&self, name: &str) -> Option<&AxiomReport> {
        self.axioms.iter().find(|a| a.axiom == name)
    }

    pub fn total_checks(&self) -> u64 {
        self.axioms.iter().map(|a| a.checks).sum()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Basis vectors `w` range over `W^{<=N}`.
    pub truncation: u32,
    /// Modes range over `[-window, window]`.
    pub window: i64,
    /// `u, v` range over basis vectors of `V` of weight `<=` this.
    pub span_weight: u32,
    pub exec: Execution,
}

impl VerifyOptions {
    pub fn new(truncation: u32, window: i64) -> VerifyOptions {
        VerifyOptions { truncation, window, span_weight: truncation.min(4), exec: Execution::default() }
    }

    fn params(&self) -> BTreeMap<String, String> {
        [
            ("truncation", self.truncation.to_string()),
            ("window", self.window.to_string()),
            ("span_weight", self.span_weight.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}

/// Running count for one axiom. Work items may finish in any order; the
/// counterexample kept is the one with the smallest ordinal.
#[derive(Default)]
struct Tally {
    checks: u64,
    failures: u64,
    first: Option<(u64, Counterexample)>,
}

impl Tally {
    fn record(&mut self, ordinal: u64, ok: bool, f: impl FnOnce() -> Counterexample) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.first.as_ref().is_none_or(|(o, _)| ordinal < *o) {
                self.first = Some((ordinal, f()));
            }
        }
    }

    fn merge(&mut self, o: Tally) {
        self.checks += o.checks;
        self.failures += o.failures;
        if let Some((k, c)) = o.first {
            if self.first.as_ref().is_none_or(|(j, _)| k < *j) {
                self.first = Some((k, c));
            }
        }
    }

    fn report(self, axiom: &str) -> AxiomReport {
        AxiomReport { axiom: axiom.to_string(), checks: self.checks, failures: self.failures, counterexample: self.first.map(|x| x.1) }
    }
}

fn cex(w_mod: &dyn GradedModule, case: String, lhs: &ModVec, rhs: &ModVec) -> Counterexample {
    Counterexample { case, lhs: format_vec(w_mod, lhs), rhs: format_vec(w_mod, rhs) }
}

/// Conformal vector of a vacuum module: `L_{-2} 1`, which for affine
/// algebras is the Sugawara vector.
pub fn conformal_vector(v: &PbwModule) -> ModVec {
    (*v.virasoro(-2, Bid::TOP)).clone()
}

/// `gamma^{-1} sum_a (a^)_{-1} a_{-1} 1` built directly from the dual basis.
pub fn sugawara_vector(v: &PbwModule) -> Result<ModVec> {
    let s = v.sugawara_data().ok_or_else(|| Error::Config("Sugawara vector needs an affine algebra".into()))?;
    let mut acc = Accum::new();
    for (a, dual) in s.dual.iter().enumerate() {
        let x = v.act(a as Gen, -1, Bid::TOP);
        for (d, c) in dual {
            acc.add_vec(&act_vec(v, *d, -1, &x), &Scalar::Rat(c.clone()));
        }
    }
    Ok(acc.finish().scale(&s.gamma_inv))
}

fn span(v: &PbwModule, opts: &VerifyOptions) -> Vec<Bid> {
    basis_upto(v, opts.span_weight)
}

/// Module axioms for `Y_W`: vacuum, grading, translation, conformal vector,
/// Virasoro relation and the Jacobi identity. `vv` is `V` acting on itself
/// and `ops` is `V` acting on `W`.
pub fn verify_module_axioms(ops: &dyn VertexOperators, vv: &dyn VertexOperators, opts: &VerifyOptions) -> VerificationReport {
    let mut axioms = vec![
        check_vacuum(ops, opts),
        check_grading(ops, opts),
        check_translation(ops, opts),
        check_conformal(ops, opts),
        check_virasoro_relation(ops.module(), opts.truncation, opts.window),
    ];
    axioms.push(check_jacobi(ops, vv, opts));
    VerificationReport { subject: ops.module().name(), params: opts.params(), axioms }
}

/// Vertex-algebra axioms: the module suite for `V` on itself plus creation.
pub fn verify_voa_axioms(vv: &dyn VertexOperators, opts: &VerifyOptions) -> VerificationReport {
    let mut r = verify_module_axioms(vv, vv, opts);
    r.axioms.insert(0, check_creation(vv, opts));
    r
}

fn check_vacuum(ops: &dyn VertexOperators, opts: &VerifyOptions) -> AxiomReport {
    let m = ops.module();
    let mut t = Tally::default();
    for (o, w) in basis_upto(m, opts.truncation).into_iter().enumerate() {
        for n in -opts.window..=opts.window {
            let got = ops.apply(Bid::TOP, n, w);
            let want = if n == -1 { unit(w) } else { SparseVec::new() };
            t.record(o as u64, *got == want, || cex(m, format!("Y(vac)_{n} {}", m.label(w)), &got, &want));
        }
    }
    t.report("vacuum")
}

fn check_creation(vv: &dyn VertexOperators, opts: &VerifyOptions) -> AxiomReport {
    let v = vv.voa();
    let mut t = Tally::default();
    for (o, b) in span(v, opts).into_iter().enumerate() {
        let o = o as u64;
        for n in 0..=opts.window {
            let got = vv.apply(b, n, Bid::TOP);
            t.record(o, got.is_zero(), || cex(&**v, format!("Y({})_{n} vac", v.label(b)), &got, &SparseVec::new()));
        }
        // Y(v)_{-j-1} 1 = L_{-1}^j v / j!
        let mut want = unit(b);
        for j in 0..=3i64 {
            if j > 0 {
                want = vir_vec(&**v, -1, &want).scale(&Scalar::ratio(1, j));
            }
            let got = vv.apply(b, -j - 1, Bid::TOP);
            t.record(o, *got == want, || cex(&**v, format!("Y({})_{} vac", v.label(b), -j - 1), &got, &want));
        }
    }
    t.report("creation")
}

/// `[L0, Y(v)_n] = Y(L0 v)_n - (n+1) Y(v)_n`.
fn check_grading(ops: &dyn VertexOperators, opts: &VerifyOptions) -> AxiomReport {
    let v = ops.voa();
    let m = ops.module();
    let mut t = Tally::default();
    let ws = basis_upto(m, opts.truncation);
    for (o, b) in span(v, opts).into_iter().enumerate() {
        let l0v = v.virasoro(0, b);
        for n in -opts.window..=opts.window {
            for &w in &ws {
                let y = ops.apply(b, n, w);
                let lhs = vir_vec(m, 0, &y).sub(&apply_vec(ops, &unit(b), n, &m.virasoro(0, w)));
                let rhs = apply_to(ops, &l0v, n, w).sub(&y.scale(&Scalar::int(n + 1)));
                t.record(o as u64, lhs == rhs, || cex(m, format!("[L0, Y({})_{n}] {}", v.label(b), m.label(w)), &lhs, &rhs));
            }
        }
    }
    t.report("grading")
}

/// `Y(L_{-1} v)_n = -n Y(v)_{n-1} = [L_{-1}, Y(v)_n]`.
fn check_translation(ops: &dyn VertexOperators, opts: &VerifyOptions) -> AxiomReport {
    let v = ops.voa();
    let m = ops.module();
    let mut t = Tally::default();
    let ws = basis_upto(m, opts.truncation);
    for (o, b) in span(v, opts).into_iter().enumerate() {
        let dv = v.virasoro(-1, b);
        for n in -opts.window..=opts.window {
            for &w in &ws {
                let want = ops.apply(b, n - 1, w).scale(&Scalar::int(-n));
                let lhs = apply_to(ops, &dv, n, w);
                t.record(o as u64, lhs == want, || cex(m, format!("Y(L[-1]{})_{n} {}", v.label(b), m.label(w)), &lhs, &want));
                let comm = vir_vec(m, -1, &ops.apply(b, n, w)).sub(&apply_vec(ops, &unit(b), n, &m.virasoro(-1, w)));
                t.record(o as u64, comm == want, || cex(m, format!("[L-1, Y({})_{n}] {}", v.label(b), m.label(w)), &comm, &want));
            }
        }
    }
    t.report("translation")
}

/// `Y(c)_{n+1} = L_n` on `W`.
fn check_conformal(ops: &dyn VertexOperators, opts: &VerifyOptions) -> AxiomReport {
    let v = ops.voa();
    let m = ops.module();
    let c = conformal_vector(v);
    let mut t = Tally::default();
    for (o, w) in basis_upto(m, opts.truncation).into_iter().enumerate() {
        for n in -opts.window..=opts.window {
            let lhs = apply_to(ops, &c, n + 1, w);
            let rhs = m.virasoro(n, w);
            t.record(o as u64, lhs == *rhs, || cex(m, format!("Y(c)_{} {}", n + 1, m.label(w)), &lhs, &rhs));
        }
    }
    t.report("conformal-vector")
}

/// `[L_m, L_n] = (m-n) L_{m+n} + c (m^3-m)/12 delta_{m,-n}` on `W^{<=N}`.
pub fn check_virasoro_relation(m: &dyn GradedModule, truncation: u32, window: i64) -> AxiomReport {
    let mut t = Tally::default();
    let c = m.algebra().central_charge().ok();
    for (o, w) in basis_upto(m, truncation).into_iter().enumerate() {
        for a in -window..=window {
            for b in -window..=window {
                let lhs = vir_vec(m, a, &m.virasoro(b, w)).sub(&vir_vec(m, b, &m.virasoro(a, w)));
                let mut rhs = m.virasoro(a + b, w).scale(&Scalar::int(a - b));
                if a + b == 0 {
                    if let Some(c) = &c {
                        rhs = rhs.add(&unit(w).scale(&(c * &Scalar::ratio(a * a * a - a, 12))));
                    }
                }
                t.record(o as u64, lhs == rhs, || cex(m, format!("[L{a}, L{b}] {}", m.label(w)), &lhs, &rhs));
            }
        }
    }
    t.report("virasoro-relation")
}

/// Sugawara modes against generators: `[L_m, X_n] = -n X_{m+n}` on `W^{<=N}`.
pub fn check_sugawara_commutator(m: &dyn GradedModule, truncation: u32, window: i64) -> AxiomReport {
    let mut t = Tally::default();
    let gens = m.algebra().num_gens() as Gen;
    for (o, w) in basis_upto(m, truncation).into_iter().enumerate() {
        for g in 0..gens {
            for a in -window..=window {
                for b in -window..=window {
                    let lhs = vir_vec(m, a, &m.act(g, b, w)).sub(&act_vec(m, g, b, &m.virasoro(a, w)));
                    let rhs = m.act(g, a + b, w).scale(&Scalar::int(-b));
                    t.record(o as u64, lhs == rhs, || {
                        cex(m, format!("[L{a}, {}{b}] {}", m.algebra().gen_name(g), m.label(w)), &lhs, &rhs)
                    });
                }
            }
        }
    }
    t.report("sugawara-commutator")
}

fn binom(n: i64, k: i64) -> Scalar {
    Scalar::Rat(Q::binomial(n, k))
}

fn signed(k: i64) -> Scalar {
    if k.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        Scalar::int(-1)
    }
}

/// Upper bound of `l` in a Jacobi sum: the truncation bound from grading,
/// also `<= n` when the binomial top is a nonnegative integer.
fn l_max(grading: i64, top: i64) -> i64 {
    if top >= 0 {
        grading.min(top)
    } else {
        grading
    }
}

/// Composite vectors reused across all `(m, n, k)` for a fixed `(u, v, w)`.
struct JacobiCache<'a> {
    ops: &'a dyn VertexOperators,
    u: Bid,
    v: Bid,
    w: Bid,
    uv: FxHashMap<i64, ModVec>,
    lhs: FxHashMap<(i64, i64), ModVec>,
    uvw: FxHashMap<(i64, i64), ModVec>,
    vuw: FxHashMap<(i64, i64), ModVec>,
}

impl<'a> JacobiCache<'a> {
    /// `Y(Y(u)_p v)_q w`.
    fn iterate(&mut self, vv: &dyn VertexOperators, p: i64, q: i64) -> &ModVec {
        let (u, v, w, ops) = (self.u, self.v, self.w, self.ops);
        if !self.lhs.contains_key(&(p, q)) {
            let x = self.uv.entry(p).or_insert_with(|| (*vv.apply(u, p, v)).clone());
            let r = apply_to(ops, x, q, w);
            self.lhs.insert((p, q), r);
        }
        &self.lhs[&(p, q)]
    }

    /// `Y(a)_i Y(b)_j w`.
    fn product(&mut self, swap: bool, i: i64, j: i64) -> &ModVec {
        let (a, b) = if swap { (self.v, self.u) } else { (self.u, self.v) };
        let (w, ops) = (self.w, self.ops);
        let map = if swap { &mut self.vuw } else { &mut self.uvw };
        map.entry((i, j)).or_insert_with(|| {
            let inner = ops.apply(b, j, w);
            apply_vec(ops, &unit(a), i, &inner)
        })
    }
}

/// Jacobi identity
/// `sum_l C(m,l) Y(Y(u)_{n+l} v)_{m+k-l} w
///   = sum_l (-1)^l C(n,l) (Y(u)_{m+n-l} Y(v)_{k+l} - (-1)^n Y(v)_{n+k-l} Y(u)_{m+l}) w`.
fn check_jacobi(ops: &dyn VertexOperators, vv: &dyn VertexOperators, opts: &VerifyOptions) -> AxiomReport {
    let v = vv.voa();
    let m = ops.module();
    let sp = span(v, opts);
    let pairs: Vec<(usize, Bid, Bid)> =
        sp.iter().flat_map(|&a| sp.iter().map(move |&b| (a, b))).enumerate().map(|(i, (a, b))| (i, a, b)).collect();
    let ws = basis_upto(m, opts.truncation);
    let win = opts.window;
    let tallies = opts.exec.map(&pairs, |&(o, u, x)| {
        let mut t = Tally::default();
        let (wu, wx) = (u.w as i64, x.w as i64);
        for &w in &ws {
            let s = w.w as i64;
            let mut c = JacobiCache {
                ops,
                u,
                v: x,
                w,
                uv: FxHashMap::default(),
                lhs: FxHashMap::default(),
                uvw: FxHashMap::default(),
                vuw: FxHashMap::default(),
            };
            for mm in -win..=win {
                for n in -win..=win {
                    for k in -win..=win {
                        let mut lhs = Accum::new();
                        for l in 0..=l_max(wu + wx - n - 1, mm) {
                            let y = c.iterate(vv, n + l, mm + k - l).clone();
                            lhs.add_vec(&y, &binom(mm, l));
                        }
                        let mut rhs = Accum::new();
                        for l in 0..=l_max(s + wx - k - 1, n) {
                            let y = c.product(false, mm + n - l, k + l);
                            rhs.add_vec(y, &(&signed(l) * &binom(n, l)));
                        }
                        for l in 0..=l_max(s + wu - mm - 1, n) {
                            let y = c.product(true, n + k - l, mm + l);
                            rhs.add_vec(y, &-(&signed(n + l) * &binom(n, l)));
                        }
                        let (lhs, rhs) = (lhs.finish(), rhs.finish());
                        t.record(o as u64, lhs == rhs, || {
                            cex(
                                m,
                                format!("u={} v={} m={mm} n={n} k={k} w={}", v.label(u), v.label(x), m.label(w)),
                                &lhs,
                                &rhs,
                            )
                        });
                    }
                }
            }
        }
        t
    });
    let mut t = Tally::default();
    for x in tallies {
        t.merge(x);
    }
    t.report("jacobi")
}

/// Skew symmetry `Y(u)_n v = sum_k (-1)^{n+k+1}/k! L_{-1}^k Y(v)_{n+k} u`
/// for all basis `u, v` of weight `<= span` and all `n` with
/// `Y(u)_n v` of weight `<= N`.
pub fn verify_skew_symmetry(vv: &dyn VertexOperators, truncation: u32, span_weight: u32, exec: Execution) -> AxiomReport {
    let v = vv.voa();
    let sp = basis_upto(&**v, span_weight);
    let pairs: Vec<(usize, Bid, Bid)> =
        sp.iter().flat_map(|&a| sp.iter().map(move |&b| (a, b))).enumerate().map(|(i, (a, b))| (i, a, b)).collect();
    let tallies = exec.map(&pairs, |&(o, u, x)| {
        let mut t = Tally::default();
        let total = u.w as i64 + x.w as i64;
        for n in (total - 1 - truncation as i64)..total {
            let lhs = vv.apply(u, n, x);
            let mut rhs = Accum::new();
            let mut k = 0;
            while n + k < total {
                let mut y = (*vv.apply(x, n + k, u)).clone();
                for _ in 0..k {
                    y = vir_vec(&**v, -1, &y);
                }
                rhs.add_vec(&y, &(&signed(n + k + 1) * &Scalar::Rat(Q::factorial(k as u32).recip().unwrap())));
                k += 1;
            }
            let rhs = rhs.finish();
            t.record(o as u64, *lhs == rhs, || {
                cex(&**v, format!("Y({})_{n} {}", v.label(u), v.label(x)), &lhs, &rhs)
            });
        }
        t
    });
    let mut t = Tally::default();
    for x in tallies {
        t.merge(x);
    }
    t.report("skew-symmetry")
}

/// Lie structure on `V(1)`: `[u, v] = u_0 v` and `u_1 v = <u, v> 1`.
#[derive(Clone, Debug, Serialize)]
pub struct Weight1Structure {
    pub labels: Vec<String>,
    /// `bracket[i][j]` holds the coordinates of `[b_i, b_j]` in the basis.
    pub bracket: Vec<Vec<Vec<Scalar>>>,
    pub form: Vec<Vec<Scalar>>,
    /// Failed antisymmetry, Jacobi, symmetry or invariance checks.
    pub defects: Vec<String>,
}

pub fn weight1_lie_structure(vv: &dyn VertexOperators) -> Result<Weight1Structure> {
    let v = vv.voa();
    if v.dim(0) != 1 {
        return Err(Error::NotCftType(v.dim(0)));
    }
    let b1: Vec<Bid> = basis(&**v, 1).collect();
    let d = b1.len();
    let coords = |x: &ModVec| -> Vec<Scalar> { (0..d).map(|i| x.get(Bid { w: 1, i: i as u32 })).collect() };
    let br: Vec<Vec<ModVec>> = b1.iter().map(|&a| b1.iter().map(|&b| (*vv.apply(a, 0, b)).clone()).collect()).collect();
    let form: Vec<Vec<Scalar>> = b1.iter().map(|&a| b1.iter().map(|&b| vv.apply(a, 1, b).get(Bid::TOP)).collect()).collect();
    let bracket_vec = |x: &ModVec, y: &ModVec| -> ModVec {
        let mut acc = Accum::new();
        for (p, s) in x.iter() {
            for (q, t) in y.iter() {
                acc.add_vec(&br[p.i as usize][q.i as usize], &(s * t));
            }
        }
        acc.finish()
    };
    let pair = |x: &ModVec, y: &ModVec| -> Scalar {
        let mut acc = Scalar::zero();
        for (p, s) in x.iter() {
            for (q, t) in y.iter() {
                acc += &(&(s * t) * &form[p.i as usize][q.i as usize]);
            }
        }
        acc
    };
    let mut defects = Vec::new();
    let e: Vec<ModVec> = b1.iter().map(|&b| unit(b)).collect();
    for i in 0..d {
        for j in 0..d {
            if br[i][j] != br[j][i].neg() {
                defects.push(format!("[{}, {}] is not antisymmetric", v.label(b1[i]), v.label(b1[j])));
            }
            if form[i][j] != form[j][i] {
                defects.push(format!("<{}, {}> is not symmetric", v.label(b1[i]), v.label(b1[j])));
            }
            for k in 0..d {
                let jac = bracket_vec(&e[i], &br[j][k]).add(&bracket_vec(&e[j], &br[k][i])).add(&bracket_vec(&e[k], &br[i][j]));
                if !jac.is_zero() {
                    defects.push(format!("Jacobi fails on {}, {}, {}", v.label(b1[i]), v.label(b1[j]), v.label(b1[k])));
                }
                // ([x, y], z) = -(y, [x, z])
                if pair(&br[i][j], &e[k]) != -pair(&e[j], &br[i][k]) {
                    defects.push(format!("form is not invariant on {}, {}, {}", v.label(b1[i]), v.label(b1[j]), v.label(b1[k])));
                }
            }
        }
    }
    Ok(Weight1Structure {
        labels: b1.iter().map(|&b| v.label(b)).collect(),
        bracket: br.iter().map(|row| row.iter().map(coords).collect()).collect(),
        form,
        defects,
    })
}

