//! Conformal blocks on marked spheres: residue actions of global sections,
//! block certification, coinvariant-dimension estimates and propagation.
//!
//! A section `u f(z) dz` is given in the global coordinate `z`. At a finite
//! point `x` with local coordinate `z - x` it acts by
//! `sum_k f_k Y(u)_k`, where `f(x + t) = sum_k f_k t^k`. At infinity the
//! local coordinate is `1/z`; with `d = wt u` the section becomes
//! `sum_r (-1)^{d+1} t^{2d-r-2} f(1/t) (L_1^r u / r!) dt`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::field::{apply_to, VertexOperators};
use crate::laurent::Laurent1;
use crate::linalg::RowReducer;
use crate::module::{basis, basis_upto, format_vec, unit, vir_vec, Bid, GradedModule, ModVec, PbwModule};
use crate::rational::Q;
use crate::scalar::Scalar;
use crate::sparse::{Accum, SparseVec};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Finite(Q),
    Infinity,
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(q) => write!(f, "{q}"),
            Point::Infinity => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Point {
    type Err = Error;

    fn from_str(s: &str) -> Result<Point> {
        let s = s.trim();
        if s == "inf" || s == "infinity" {
            return Ok(Point::Infinity);
        }
        s.parse::<Q>().map(Point::Finite).map_err(|e| Error::Config(format!("bad point {s:?}: {}", e.0)))
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `P^1` with distinct marked points, each carrying a module.
pub struct MarkedSphere {
    points: Vec<Point>,
    modules: Vec<Arc<dyn VertexOperators>>,
}

impl MarkedSphere {
    /// Infinity must be among the points, so that every rational function
    /// with poles at the finite marked points is an admissible section.
    pub fn new(marked: Vec<(Point, Arc<dyn VertexOperators>)>) -> Result<MarkedSphere> {
        if marked.is_empty() {
            return Err(Error::Config("a marked sphere needs at least one point".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (p, _) in &marked {
            if !seen.insert(p.clone()) {
                return Err(Error::Config(format!("marked point {p} appears twice")));
            }
        }
        if !seen.contains(&Point::Infinity) {
            return Err(Error::Config("infinity must be a marked point".into()));
        }
        let first = marked[0].1.voa().algebra().describe();
        for (p, m) in &marked {
            let d = m.voa().algebra().describe();
            if d != first {
                return Err(Error::Config(format!("module at {p} is over {d}, expected {first}")));
            }
        }
        let (points, modules) = marked.into_iter().unzip();
        Ok(MarkedSphere { points, modules })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn module(&self, i: usize) -> &dyn VertexOperators {
        &*self.modules[i]
    }

    pub fn voa(&self) -> &Arc<PbwModule> {
        self.modules[0].voa()
    }

    fn is_marked(&self, q: &Q) -> bool {
        self.points.iter().any(|p| matches!(p, Point::Finite(x) if x == q))
    }

    fn finite_points(&self) -> Vec<Q> {
        self.points.iter().filter_map(|p| if let Point::Finite(q) = p { Some(q.clone()) } else { None }).collect()
    }
}

/// `prod_p (z - p)^{m_p}` over distinct finite `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionFn {
    pub factors: Vec<(Q, i64)>,
}

impl SectionFn {
    pub fn new(factors: Vec<(Q, i64)>) -> SectionFn {
        SectionFn { factors: factors.into_iter().filter(|(_, m)| *m != 0).collect() }
    }

    pub fn one() -> SectionFn {
        SectionFn { factors: Vec::new() }
    }

    /// Lowest exponent of the expansion at `x`.
    fn order_at(&self, x: &Q) -> i64 {
        self.factors.iter().filter(|(p, _)| p == x).map(|(_, m)| *m).sum()
    }

    /// Coefficients of `f(x + t)` for exponents `lo..=hi`, `lo` the order at `x`.
    fn expand_at(&self, x: &Q, hi: i64) -> (i64, Vec<Q>) {
        let lo = self.order_at(x);
        let len = (hi - lo + 1).max(0) as usize;
        let mut series = vec![Q::ZERO; len];
        if len == 0 {
            return (lo, series);
        }
        series[0] = Q::ONE;
        for (p, m) in &self.factors {
            if p == x {
                continue;
            }
            // (x - p + t)^m = (x-p)^m sum_k C(m,k) (t/(x-p))^k
            let d = x - p;
            let dinv = d.recip().unwrap();
            let fac: Vec<Q> = (0..len as i64).map(|k| &(&Q::binomial(*m, k) * &d.pow(*m)) * &dinv.pow(k)).collect();
            series = mul_series(&series, &fac);
        }
        (lo, series)
    }

    /// Coefficients of `f(1/t)` for exponents `lo..=hi`.
    fn expand_at_infinity(&self, hi: i64) -> (i64, Vec<Q>) {
        let lo = -self.factors.iter().map(|(_, m)| *m).sum::<i64>();
        let len = (hi - lo + 1).max(0) as usize;
        let mut series = vec![Q::ZERO; len];
        if len == 0 {
            return (lo, series);
        }
        series[0] = Q::ONE;
        for (p, m) in &self.factors {
            // (1/t - p)^m = t^{-m} (1 - p t)^m
            let np = -p.clone();
            let fac: Vec<Q> = (0..len as i64).map(|k| &Q::binomial(*m, k) * &np.pow(k)).collect();
            series = mul_series(&series, &fac);
        }
        (lo, series)
    }
}

fn mul_series(a: &[Q], b: &[Q]) -> Vec<Q> {
    let n = a.len();
    let mut out = vec![Q::ZERO; n];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

impl fmt::Display for SectionFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, m)| {
                let base = if p.is_zero() {
                    "z".to_string()
                } else if p.is_negative() {
                    format!("(z+{})", -p.clone())
                } else {
                    format!("(z-{p})")
                };
                if *m == 1 {
                    base
                } else {
                    format!("{base}^{m}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// `sum_i u_i f_i(z) dz` with homogeneous `u_i`.
#[derive(Clone, Debug)]
pub struct Section {
    pub terms: Vec<(ModVec, SectionFn)>,
}

impl Section {
    pub fn term(u: ModVec, f: SectionFn) -> Section {
        Section { terms: vec![(u, f)] }
    }

    pub fn describe(&self, v: &PbwModule) -> String {
        let parts: Vec<String> = self.terms.iter().map(|(u, f)| format!("({})*{f} dz", format_vec(v, u))).collect();
        parts.join(" + ")
    }
}

/// `sigma . w` at marked point `i`.
pub fn residue_action(s: &MarkedSphere, sigma: &Section, i: usize, w: Bid) -> Result<ModVec> {
    let ops = s.module(i);
    let vm = s.voa();
    let mut acc = Accum::new();
    for (u, f) in &sigma.terms {
        for (p, m) in &f.factors {
            if *m < 0 && !s.is_marked(p) {
                return Err(Error::UnmarkedPole(p.to_string()));
            }
        }
        let Some(d) = u.first().map(|(b, _)| b.w as i64) else { continue };
        match s.point(i) {
            Point::Finite(x) => {
                let hi = d + w.w as i64 - 1;
                let (lo, c) = f.expand_at(x, hi);
                for (k, fk) in (lo..=hi).zip(c) {
                    if !fk.is_zero() {
                        acc.add_vec(&apply_to(ops, u, k, w), &Scalar::Rat(fk));
                    }
                }
            }
            Point::Infinity => {
                let mut lu = u.clone();
                let mut fact = Q::ONE;
                for r in 0..=d {
                    if r > 0 {
                        lu = vir_vec(&**vm, 1, &lu);
                        fact = &fact * &Q::from_int(r);
                    }
                    if lu.is_zero() {
                        break;
                    }
                    let wr = d - r;
                    let hi = wr + w.w as i64 - 1;
                    // t^{2d-r-2} f(1/t) = sum_k g_k t^k
                    let shift = 2 * d - r - 2;
                    let (lo, c) = f.expand_at_infinity(hi - shift);
                    let sign = if (d + 1) % 2 == 0 { Q::ONE } else { -Q::ONE };
                    let coef0 = &sign / &fact;
                    for (k, fk) in ((lo + shift)..=hi).zip(c) {
                        if !fk.is_zero() {
                            acc.add_vec(&apply_to(ops, &lu, k, w), &Scalar::Rat(&fk * &coef0));
                        }
                    }
                }
            }
        }
    }
    Ok(acc.finish())
}

/// Linear functional on `W_1^{<=K} (x) ... (x) W_N^{<=K}` in dual coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockCandidate {
    pub truncation: u32,
    pub values: BTreeMap<Vec<Bid>, Scalar>,
}

impl BlockCandidate {
    pub fn get(&self, t: &[Bid]) -> Scalar {
        self.values.get(t).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn set(&mut self, t: Vec<Bid>, x: Scalar) {
        if x.is_zero() {
            self.values.remove(&t);
        } else {
            self.values.insert(t, x);
        }
    }
}

/// `phi(w (x) v (x) w') = <w', Y(v, gamma) w>` on `(P^1; 0, gamma, inf)`,
/// with `ops` the action on `W`.
pub fn vertex_operator_block(ops: &dyn VertexOperators, gamma: &Q, k: u32) -> BlockCandidate {
    let m = ops.module();
    let vm = ops.voa();
    let g = Scalar::Rat(gamma.clone());
    let mut out = BlockCandidate { truncation: k, values: BTreeMap::new() };
    for w in basis_upto(m, k) {
        for v in basis_upto(&**vm, k) {
            for wd in basis_upto(m, k) {
                let n = v.w as i64 + w.w as i64 - wd.w as i64 - 1;
                let val = ops.apply(v, n, w).get(wd);
                if !val.is_zero() {
                    out.set(vec![w, v, wd], &val * &g.pow(-n - 1));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub section: String,
    pub vectors: Vec<String>,
    pub value: Scalar,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockReport {
    pub sections: usize,
    pub constraints: u64,
    pub violations: u64,
    pub witness: Option<Witness>,
}

impl BlockReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Generating sections `u z^k prod (z - z_i)^{m_i} dz`: `u` runs over the
/// basis of `V^{<=K}`, `m_i` over `[-P, P]` at finite marked points, and an
/// extra `z^k`, `0 <= k <= P`, when 0 is not marked.
pub fn generating_sections(s: &MarkedSphere, k: u32, p: i64) -> Vec<Section> {
    let mut exps: Vec<Vec<(Q, i64)>> = vec![Vec::new()];
    let mut slots: Vec<(Q, i64, i64)> = s.finite_points().into_iter().map(|q| (q, -p, p)).collect();
    if !s.is_marked(&Q::ZERO) {
        slots.push((Q::ZERO, 0, p));
    }
    for (q, lo, hi) in slots {
        exps = exps
            .into_iter()
            .flat_map(|e| {
                let q = q.clone();
                (lo..=hi).map(move |m| {
                    let mut e = e.clone();
                    e.push((q.clone(), m));
                    e
                })
            })
            .collect();
    }
    let vm = s.voa();
    let mut out = Vec::new();
    for u in basis_upto(&**vm, k) {
        for e in &exps {
            out.push(Section::term(unit(u), SectionFn::new(e.clone())));
        }
    }
    out
}

/// All basis tuples of the truncation, in mixed-radix order.
struct Tuples {
    bases: Vec<Vec<Bid>>,
    index: Vec<FxHashMap<Bid, usize>>,
}

impl Tuples {
    fn new(s: &MarkedSphere, k: u32) -> Tuples {
        let bases: Vec<Vec<Bid>> = (0..s.len()).map(|i| basis_upto(s.module(i).module(), k)).collect();
        let index = bases.iter().map(|b| b.iter().enumerate().map(|(i, x)| (*x, i)).collect()).collect();
        Tuples { bases, index }
    }

    fn count(&self) -> usize {
        self.bases.iter().map(Vec::len).product()
    }

    fn tuple(&self, mut idx: usize) -> Vec<Bid> {
        let mut out = vec![Bid::TOP; self.bases.len()];
        for i in (0..self.bases.len()).rev() {
            let n = self.bases[i].len();
            out[i] = self.bases[i][idx % n];
            idx /= n;
        }
        out
    }

    fn flat(&self, t: &[Bid]) -> usize {
        let mut idx = 0;
        for (i, b) in t.iter().enumerate() {
            idx = idx * self.bases[i].len() + self.index[i][b];
        }
        idx
    }
}

/// Images `sigma . w` at every point and basis vector; `None` when some
/// component leaves the truncation.
fn section_images(s: &MarkedSphere, sigma: &Section, tuples: &Tuples, k: u32) -> Result<Vec<Vec<Option<ModVec>>>> {
    let mut out = Vec::with_capacity(s.len());
    for (i, b) in tuples.bases.iter().enumerate() {
        let mut row = Vec::with_capacity(b.len());
        for &w in b {
            let img = residue_action(s, sigma, i, w)?;
            let inside = img.keys().all(|x| x.w <= k);
            row.push(inside.then_some(img));
        }
        out.push(row);
    }
    Ok(out)
}

/// Constraint `phi(sigma . w_tuple) = 0` as a sparse row over tuples.
fn constraint_row(tuples: &Tuples, images: &[Vec<Option<ModVec>>], t: &[Bid]) -> Option<SparseVec<usize>> {
    let mut acc = Accum::new();
    for (i, &w) in t.iter().enumerate() {
        let img = images[i][tuples.index[i][&w]].as_ref()?;
        let mut tt = t.to_vec();
        for (b, c) in img.iter() {
            tt[i] = *b;
            acc.add(tuples.flat(&tt), c);
        }
    }
    Some(acc.finish())
}

/// Checks `phi(sigma . w) = 0` for every generating section and basis tuple
/// whose image stays inside the truncation.
pub fn is_conformal_block(s: &MarkedSphere, phi: &BlockCandidate, k: u32, p: i64, exec: Execution) -> Result<BlockReport> {
    let sections = generating_sections(s, k, p);
    let tuples = Tuples::new(s, k);
    let count = tuples.count();
    let vm = s.voa();
    let results = exec.map(&sections, |sigma| -> Result<(u64, u64, Option<Witness>)> {
        let images = section_images(s, sigma, &tuples, k)?;
        let (mut checks, mut bad, mut first) = (0, 0, None);
        for idx in 0..count {
            let t = tuples.tuple(idx);
            let Some(row) = constraint_row(&tuples, &images, &t) else { continue };
            checks += 1;
            let mut val = Scalar::zero();
            for (j, c) in row.iter() {
                val += &(c * &phi.get(&tuples.tuple(*j)));
            }
            if !val.is_zero() {
                bad += 1;
                if first.is_none() {
                    first = Some(Witness {
                        section: sigma.describe(vm),
                        vectors: t.iter().enumerate().map(|(i, b)| s.module(i).module().label(*b)).collect(),
                        value: val,
                    });
                }
            }
        }
        Ok((checks, bad, first))
    });
    let mut report = BlockReport { sections: sections.len(), constraints: 0, violations: 0, witness: None };
    for r in results {
        let (c, b, w) = r?;
        report.constraints += c;
        report.violations += b;
        if report.witness.is_none() {
            report.witness = w;
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimateStep {
    pub truncation: u32,
    pub pole_bound: i64,
    pub unknowns: usize,
    pub rank: usize,
    pub dimension: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoinvariantEstimate {
    pub history: Vec<EstimateStep>,
    pub value: usize,
    pub stabilized: bool,
    pub warnings: Vec<String>,
}

/// Dimension of the functionals on the truncation `K` that vanish on every
/// admissible constraint with pole bound `P`: an upper bound for the space
/// of blocks at this truncation.
pub fn coinvariant_dim_at(s: &MarkedSphere, k: u32, p: i64, exec: Execution) -> Result<EstimateStep> {
    let sections = generating_sections(s, k, p);
    let tuples = Tuples::new(s, k);
    let count = tuples.count();
    let rows = exec.map(&sections, |sigma| -> Result<Vec<SparseVec<usize>>> {
        let images = section_images(s, sigma, &tuples, k)?;
        let mut out = Vec::new();
        for idx in 0..count {
            let t = tuples.tuple(idx);
            if let Some(r) = constraint_row(&tuples, &images, &t) {
                if !r.is_zero() {
                    out.push(r);
                }
            }
        }
        Ok(out)
    });
    let mut red = RowReducer::new(count);
    'outer: for r in rows {
        for row in r? {
            red.insert(row);
            if red.rank() == count {
                break 'outer;
            }
        }
    }
    Ok(EstimateStep { truncation: k, pole_bound: p, unknowns: count, rank: red.rank(), dimension: count - red.rank() })
}

/// Runs `(K, P) = (1,1), (2,2), ...` up to `max_k` and stops once two
/// consecutive increments leave the dimension unchanged.
pub fn coinvariant_dim_estimate(s: &MarkedSphere, max_k: u32, exec: Execution) -> Result<CoinvariantEstimate> {
    let mut history: Vec<EstimateStep> = Vec::new();
    let mut warnings = Vec::new();
    let mut stabilized = false;
    for k in 1..=max_k {
        let step = coinvariant_dim_at(s, k, k as i64, exec)?;
        if step.rank == 0 {
            warnings.push(format!("truncation K={k}, P={k} imposes no constraint"));
        }
        history.push(step);
        let n = history.len();
        if n >= 3 && history[n - 1].dimension == history[n - 2].dimension && history[n - 2].dimension == history[n - 3].dimension {
            stabilized = true;
            break;
        }
    }
    let value = history.last().map_or(0, |h| h.dimension);
    Ok(CoinvariantEstimate { history, value, stabilized, warnings })
}

/// Dimension of the weight-preserving maps `T: W1^{<=K} -> W2^{<=K}` with
/// `T g_m = g_m T` for every generator mode and `T L_0 = L_0 T`, whenever
/// both sides stay inside the truncation.
pub fn intertwiner_dim(w1: &dyn GradedModule, w2: &dyn GradedModule, k: u32) -> usize {
    // Unknown T[n][j][i]: coefficient of basis j of W2(n) in T(basis i of W1(n)).
    let mut offset = Vec::new();
    let mut total = 0;
    for n in 0..=k {
        offset.push(total);
        total += w1.dim(n) * w2.dim(n);
    }
    let var = |n: u32, j: u32, i: u32| offset[n as usize] + (j as usize) * w1.dim(n) + i as usize;
    let mut red = RowReducer::new(total);
    let alg = w1.algebra();
    let mut ops: Vec<(Option<crate::algebra::Gen>, i64)> = vec![(None, 0)];
    for g in 0..alg.num_gens() as crate::algebra::Gen {
        for m in -(k as i64)..=(k as i64) {
            ops.push((Some(g), m));
        }
    }
    let act1 = |op: (Option<crate::algebra::Gen>, i64), b: Bid| match op.0 {
        Some(g) => w1.act(g, op.1, b),
        None => w1.virasoro(op.1, b),
    };
    let act2 = |op: (Option<crate::algebra::Gen>, i64), b: Bid| match op.0 {
        Some(g) => w2.act(g, op.1, b),
        None => w2.virasoro(op.1, b),
    };
    for n in 0..=k {
        for w in basis(w1, n) {
            for &op in &ops {
                let t = n as i64 - op.1;
                if t < 0 || t > k as i64 {
                    continue;
                }
                let t = t as u32;
                // T(op w) - op(T w), component on basis x of W2(t)
                let img = act1(op, w);
                let mut rows: Vec<Accum<usize>> = (0..w2.dim(t)).map(|_| Accum::new()).collect();
                for (b, c) in img.iter() {
                    for x in 0..w2.dim(t) as u32 {
                        rows[x as usize].add(var(t, x, b.i), c);
                    }
                }
                for j in 0..w2.dim(n) as u32 {
                    let y = act2(op, Bid { w: n, i: j });
                    for (x, c) in y.iter() {
                        rows[x.i as usize].add(var(n, j, w.i), &-c.clone());
                    }
                }
                for r in rows {
                    let r = r.finish();
                    if !r.is_zero() {
                        red.insert(r);
                    }
                }
            }
        }
    }
    total - red.rank()
}

/// `sum_n phi(... Y(u)_n w_j ...) z^{-n-1}` for `n` from the top mode down
/// `order` steps.
pub fn propagation_expand(s: &MarkedSphere, phi: &BlockCandidate, j: usize, u: &ModVec, w: &[Bid], order: u32) -> Result<Laurent1> {
    let Some(d) = u.first().map(|(b, _)| b.w as i64) else { return Ok(Laurent1::new()) };
    let ops = s.module(j);
    let top = d + w[j].w as i64 - 1;
    let mut out = Laurent1::new();
    for n in ((top - order as i64)..=top).rev() {
        let img = apply_to(ops, u, n, w[j]);
        let mut val = Scalar::zero();
        let mut t = w.to_vec();
        for (b, c) in img.iter() {
            if b.w > phi.truncation {
                return Err(Error::Truncation(format!("Y(u)_{n} leaves the truncation {}", phi.truncation)));
            }
            t[j] = *b;
            val += &(c * &phi.get(&t));
        }
        out.add_term(-n - 1, &val);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::contragredient::Contragredient;
    use crate::field::FieldEngine;

    fn three_point(c: Scalar, gamma: Q) -> (MarkedSphere, Arc<FieldEngine>) {
        let v = PbwModule::vacuum(Arc::new(Algebra::virasoro(c)));
        let e = FieldEngine::on_self(v.clone());
        let w: Arc<dyn GradedModule> = v.clone();
        let d = Contragredient::new(e.clone(), w);
        let s = MarkedSphere::new(vec![
            (Point::Finite(Q::ZERO), e.clone() as Arc<dyn VertexOperators>),
            (Point::Finite(gamma), e.clone() as Arc<dyn VertexOperators>),
            (Point::Infinity, d as Arc<dyn VertexOperators>),
        ])
        .unwrap();
        (s, e)
    }

    #[test]
    fn monomial_section_at_zero() {
        let (s, e) = three_point(Scalar::ratio(1, 2), Q::from_int(2));
        let c = crate::module::parse_vector(&**s.voa(), "L[-2]").unwrap();
        let w = c.first().unwrap().0;
        for k in -2..=3 {
            let sigma = Section::term(c.clone(), SectionFn::new(vec![(Q::ZERO, k)]));
            assert_eq!(residue_action(&s, &sigma, 0, w).unwrap(), apply_to(&*e, &c, k, w));
        }
        let one = Section::term(unit(Bid::TOP), SectionFn::new(vec![(Q::from_int(2), -1)]));
        assert!(residue_action(&s, &one, 0, w).unwrap().is_zero());
        let bad = Section::term(unit(Bid::TOP), SectionFn::new(vec![(Q::from_int(5), -1)]));
        assert!(matches!(residue_action(&s, &bad, 0, w), Err(Error::UnmarkedPole(_))));
    }

    #[test]
    fn vertex_block_certifies() {
        let (s, e) = three_point(Scalar::ratio(1, 2), Q::from_int(2));
        let phi = vertex_operator_block(&*e, &Q::from_int(2), 3);
        let r = is_conformal_block(&s, &phi, 3, 2, Execution::Sequential).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.constraints > 0);
        let mut bad = phi.clone();
        let key = vec![Bid::TOP; 3];
        bad.set(key.clone(), &phi.get(&key) + &Scalar::one());
        let r = is_conformal_block(&s, &bad, 3, 2, Execution::Sequential).unwrap();
        assert!(!r.passed());
        assert!(r.witness.is_some());
    }

    #[test]
    fn duplicate_points_are_rejected() {
        let v = PbwModule::vacuum(Arc::new(Algebra::heisenberg(1, Scalar::one())));
        let e = FieldEngine::on_self(v);
        let r = MarkedSphere::new(vec![
            (Point::Infinity, e.clone() as Arc<dyn VertexOperators>),
            (Point::Infinity, e as Arc<dyn VertexOperators>),
        ]);
        assert!(matches!(r, Err(Error::Config(_))));
    }
}
