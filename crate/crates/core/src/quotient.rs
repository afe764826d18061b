//! Simple quotients: a PBW module modulo the radical of its contravariant
//! form.

use std::sync::Arc;

use parking_lot::RwLock;
use rustc_hash::FxHashMap;

use crate::algebra::{Algebra, Gen};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, RowReducer};
use crate::module::{basis, Bid, GradedModule, ModVec, PbwModule, VIR};
use crate::scalar::Scalar;
use crate::sparse::{Accum, SparseVec};

/// One weight space of the quotient.
pub struct Level {
    /// Indices of the PBW monomials kept as coset representatives.
    pub reps: Vec<u32>,
    /// Coordinates in the quotient basis of every PBW basis vector.
    proj: Vec<SparseVec<u32>>,
    /// Basis of the radical in PBW coordinates.
    pub radical: Vec<SparseVec<usize>>,
}

pub struct QuotientModule {
    base: Arc<PbwModule>,
    levels: RwLock<FxHashMap<u32, Arc<Level>>>,
    memo: RwLock<FxHashMap<(Gen, i64, Bid), Arc<ModVec>>>,
}

/// Quotient of a vacuum or Verma module by the radical of its contravariant
/// form, with the levels up to `n` computed eagerly.
pub fn simple_quotient(base: Arc<PbwModule>, n: u32) -> Result<Arc<QuotientModule>> {
    if let Some(s) = base.algebra().central.symbol() {
        return Err(Error::SymbolicParameter(s));
    }
    if let Some(s) = base.lowest_weight().symbol() {
        return Err(Error::SymbolicParameter(s));
    }
    let q = Arc::new(QuotientModule { base, levels: RwLock::new(FxHashMap::default()), memo: RwLock::new(FxHashMap::default()) });
    for w in 0..=n {
        q.level(w);
    }
    Ok(q)
}

impl QuotientModule {
    pub fn base(&self) -> &Arc<PbwModule> {
        &self.base
    }

    pub fn level(&self, w: u32) -> Arc<Level> {
        if let Some(l) = self.levels.read().get(&w) {
            return l.clone();
        }
        let l = Arc::new(compute_level(&self.base.gram(w)));
        self.levels.write().insert(w, l.clone());
        l
    }

    pub fn radical_dims(&self, n: u32) -> Vec<usize> {
        (0..=n).map(|w| self.level(w).radical.len()).collect()
    }

    /// Coordinates in the quotient of a vector of the underlying PBW module.
    pub fn project(&self, v: &ModVec) -> ModVec {
        let mut acc = Accum::new();
        for (b, s) in v.iter() {
            let l = self.level(b.w);
            for (j, c) in l.proj[b.i as usize].iter() {
                acc.add(Bid { w: b.w, i: *j }, &(s * c));
            }
        }
        acc.finish()
    }

    /// Lift of a quotient basis vector to its PBW representative.
    pub fn representative(&self, b: Bid) -> Bid {
        Bid { w: b.w, i: self.level(b.w).reps[b.i as usize] }
    }

    fn cached(&self, key: (Gen, i64, Bid), f: impl FnOnce() -> ModVec) -> Arc<ModVec> {
        if let Some(v) = self.memo.read().get(&key) {
            return v.clone();
        }
        let v = Arc::new(f());
        self.memo.write().insert(key, v.clone());
        v
    }
}

fn compute_level(g: &Matrix) -> Level {
    let d = g.ncols();
    let rows = g.rows();
    let mut r = RowReducer::new(d);
    for row in &rows {
        r.insert(row.clone());
    }
    let reps: Vec<usize> = r.pivots();
    let rank = reps.len();
    // Rows of [G_BB | G_B*] reduce to [I | G_BB^{-1} G_B*].
    let pos: FxHashMap<usize, usize> = reps.iter().enumerate().map(|(a, &b)| (b, a)).collect();
    let mut aug = RowReducer::new(rank + d);
    for &i in &reps {
        let mut e = Vec::new();
        for (k, s) in rows[i].iter() {
            if let Some(&p) = pos.get(k) {
                e.push((p, s.clone()));
            }
            e.push((rank + k, s.clone()));
        }
        aug.insert(SparseVec::from_unsorted(e));
    }
    let mut proj = vec![Vec::new(); d];
    for (p, row) in aug.rref() {
        assert!(p < rank, "Gram submatrix on pivot columns is invertible");
        for (k, s) in row.iter() {
            if *k >= rank {
                proj[k - rank].push((p as u32, s.clone()));
            }
        }
    }
    Level {
        reps: reps.iter().map(|&i| i as u32).collect(),
        proj: proj.into_iter().map(SparseVec::from_unsorted).collect(),
        radical: r.kernel(),
    }
}

impl GradedModule for QuotientModule {
    fn algebra(&self) -> &Algebra {
        self.base.algebra()
    }

    fn dim(&self, w: u32) -> usize {
        self.level(w).reps.len()
    }

    fn lowest_weight(&self) -> Scalar {
        self.base.lowest_weight()
    }

    fn act(&self, g: Gen, m: i64, b: Bid) -> Arc<ModVec> {
        if (b.w as i64) < m {
            return Arc::new(SparseVec::new());
        }
        self.cached((g, m, b), || self.project(&self.base.act(g, m, self.representative(b))))
    }

    fn virasoro(&self, n: i64, b: Bid) -> Arc<ModVec> {
        if (b.w as i64) < n {
            return Arc::new(SparseVec::new());
        }
        self.cached((VIR, n, b), || self.project(&self.base.virasoro(n, self.representative(b))))
    }

    fn label(&self, b: Bid) -> String {
        self.base.label(self.representative(b))
    }

    fn name(&self) -> String {
        format!("simple quotient of the {}", self.base.name())
    }
}

/// Checks that positive and zero generator modes map radical vectors into
/// the radical (via the Gram matrix of the target weight) and that at the
/// lowest weight carrying a radical they annihilate it outright. Returns
/// human-readable defects.
pub fn radical_defects(q: &QuotientModule, n: u32) -> Vec<String> {
    let base = &q.base;
    let alg = base.algebra();
    let mut out = Vec::new();
    let first = (0..=n).find(|&w| !q.level(w).radical.is_empty());
    for w in 0..=n {
        let level = q.level(w);
        for r in &level.radical {
            let v: ModVec = SparseVec::from_unsorted(r.iter().map(|(k, s)| (Bid { w, i: *k as u32 }, s.clone())).collect());
            for g in 0..alg.num_gens() as Gen {
                let lo = if alg.is_virasoro() { 1 } else { 0 };
                for m in lo..=(w as i64) {
                    let img = crate::module::act_vec(&**base, g, m, &v);
                    if img.is_zero() {
                        continue;
                    }
                    if Some(w) == first {
                        out.push(format!("mode {}_{} does not annihilate a radical vector at weight {w}", alg.gen_name(g), m));
                        continue;
                    }
                    let tw = w - m as u32;
                    let gram = base.gram(tw);
                    let col: SparseVec<usize> = SparseVec::from_unsorted(img.iter().map(|(b, s)| (b.i as usize, s.clone())).collect());
                    if !gram.apply(&col).is_zero() {
                        out.push(format!("mode {}_{} maps the radical at weight {w} outside the radical", alg.gen_name(g), m));
                    }
                }
            }
        }
    }
    out
}

/// Dimensions of the quotient weight spaces `0..=n`.
pub fn quotient_dims(q: &QuotientModule, n: u32) -> Vec<usize> {
    (0..=n).map(|w| basis(q, w).count()).collect()
}
