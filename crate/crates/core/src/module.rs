//! Graded modules, their sparse vectors, and induced (PBW) modules acted on
//! by bracket rewriting.

use std::fmt::Write as _;
use std::sync::Arc;

use parking_lot::RwLock;
use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::algebra::{Algebra, Gen};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::pbw::{self, Monomial};
use crate::rational::Q;
use crate::scalar::Scalar;
use crate::sparse::{Accum, SparseVec};

/// Basis element id: weight (relative to the lowest weight) and index
/// within that weight's basis.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct Bid {
    pub w: u32,
    pub i: u32,
}

impl Bid {
    pub const TOP: Bid = Bid { w: 0, i: 0 };

    pub fn new(w: u32, i: u32) -> Bid {
        Bid { w, i }
    }
}

/// Vector in a graded module.
pub type ModVec = SparseVec<Bid>;

/// Pseudo-generator index used for Virasoro modes in caches.
pub const VIR: Gen = Gen::MAX;

/// A module over one of the supported algebras, graded by `L~0`, with every
/// weight space computable on demand.
pub trait GradedModule: Send + Sync {
    fn algebra(&self) -> &Algebra;
    fn dim(&self, w: u32) -> usize;
    /// `L0` eigenvalue on the weight-0 space.
    fn lowest_weight(&self) -> Scalar;
    /// Generator mode `g_m` applied to a basis vector.
    fn act(&self, g: Gen, m: i64, b: Bid) -> Arc<ModVec>;
    /// Virasoro mode `L_n` (for affine algebras via the Sugawara formula).
    fn virasoro(&self, n: i64, b: Bid) -> Arc<ModVec>;
    fn label(&self, b: Bid) -> String;
    fn name(&self) -> String;
}

pub fn basis(m: &dyn GradedModule, w: u32) -> impl Iterator<Item = Bid> {
    (0..m.dim(w) as u32).map(move |i| Bid { w, i })
}

/// All basis vectors with weight `<= n`.
pub fn basis_upto(m: &dyn GradedModule, n: u32) -> Vec<Bid> {
    (0..=n).flat_map(|w| basis(m, w)).collect()
}

pub fn dims(m: &dyn GradedModule, n: u32) -> Vec<usize> {
    (0..=n).map(|w| m.dim(w)).collect()
}

pub fn act_vec(m: &dyn GradedModule, g: Gen, n: i64, v: &ModVec) -> ModVec {
    let mut acc = Accum::new();
    for (b, s) in v.iter() {
        acc.add_vec(&m.act(g, n, *b), s);
    }
    acc.finish()
}

pub fn vir_vec(m: &dyn GradedModule, n: i64, v: &ModVec) -> ModVec {
    let mut acc = Accum::new();
    for (b, s) in v.iter() {
        acc.add_vec(&m.virasoro(n, *b), s);
    }
    acc.finish()
}

pub fn unit(b: Bid) -> ModVec {
    SparseVec::single(b, Scalar::one())
}

/// Text form `2*L[-4]L[-3] + 1/2*vac`.
pub fn format_vec(m: &dyn GradedModule, v: &ModVec) -> String {
    if v.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, (b, c)) in v.iter().enumerate() {
        let neg = c.is_negative_rational();
        let mag = if neg { -c } else { c.clone() };
        if k > 0 {
            s.push_str(if neg { " - " } else { " + " });
        } else if neg {
            s.push('-');
        }
        if !mag.is_one() {
            if mag.is_compound() {
                let _ = write!(s, "({mag})*");
            } else {
                let _ = write!(s, "{mag}*");
            }
        }
        s.push_str(&m.label(*b));
    }
    s
}

/// Parses a vector: terms `coef*word`, `word` or `coef` separated by `+`/`-`;
/// a word is a product of letters `Name[mode]` applied to the top vector, or
/// `vac`/`hw` for the top vector itself. Letters need not be in PBW order.
pub fn parse_vector(m: &dyn GradedModule, text: &str) -> Result<ModVec> {
    let alg = m.algebra();
    let err = |msg: &str| Error::Config(format!("cannot parse vector {text:?}: {msg}"));
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut sign_neg = false;
    for (idx, ch) in text.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        let prev = text[..idx].trim_end().chars().last();
        let is_sep = depth == 0 && (ch == '+' || ch == '-') && !matches!(prev, Some('*') | Some('/') | Some('^'));
        if is_sep {
            if !cur.trim().is_empty() {
                terms.push((sign_neg, cur.trim().to_string()));
            } else if prev.is_some() && ch == '-' && !terms.is_empty() {
                return Err(err("dangling operator"));
            }
            cur.clear();
            sign_neg = ch == '-';
        } else {
            cur.push(ch);
        }
    }
    if !cur.trim().is_empty() {
        terms.push((sign_neg, cur.trim().to_string()));
    }
    if terms.is_empty() {
        return Err(err("empty"));
    }
    let mut acc = Accum::new();
    for (neg, t) in terms {
        let (coef, word) = split_term(&t);
        let mut c: Scalar = match coef {
            Some(cs) => cs.parse().map_err(|e: crate::scalar::ScalarError| err(&e.to_string()))?,
            None => Scalar::one(),
        };
        if neg {
            c = -c;
        }
        let mut v = unit(Bid::TOP);
        if let Some(word) = word {
            if word != "vac" && word != "hw" {
                let letters = parse_word(&word).ok_or_else(|| err("malformed word"))?;
                for (name, mode) in letters.into_iter().rev() {
                    let g = alg.gen_index(&name).ok_or_else(|| err(&format!("unknown generator {name}")))?;
                    v = act_vec(m, g, mode, &v);
                }
            }
        }
        acc.add_vec(&v, &c);
    }
    Ok(acc.finish())
}

fn split_term(t: &str) -> (Option<String>, Option<String>) {
    let mut t = t.trim();
    let mut top = false;
    for kw in ["vac", "hw"] {
        if let Some(pre) = t.strip_suffix(kw) {
            let p = pre.trim_end();
            if p.is_empty() || p.ends_with('*') || p.ends_with(']') {
                t = p;
                top = true;
                break;
            }
        }
    }
    // The word is the longest suffix made of letters `Name[int]`.
    let chars: Vec<char> = t.chars().collect();
    let mut i = chars.len();
    while i > 0 && chars[i - 1] == ']' {
        let Some(open) = chars[..i].iter().rposition(|&c| c == '[') else { break };
        let mut j = open;
        while j > 0 && (chars[j - 1].is_alphanumeric() || chars[j - 1] == '_') {
            j -= 1;
        }
        if j == open || !chars[j].is_alphabetic() {
            break;
        }
        i = j;
    }
    let word: String = chars[i..].iter().collect();
    let pre: String = chars[..i].iter().collect();
    let c = pre.trim_end().trim_end_matches('*').trim().to_string();
    let word = if word.is_empty() { top.then(|| "vac".to_string()) } else { Some(word) };
    ((!c.is_empty()).then_some(c), word)
}

fn parse_word(w: &str) -> Option<Vec<(String, i64)>> {
    let mut out = Vec::new();
    let mut rest = w.trim();
    while !rest.is_empty() {
        let open = rest.find('[')?;
        let close = rest.find(']')?;
        let name = rest[..open].trim().to_string();
        let mode: i64 = rest[open + 1..close].trim().parse().ok()?;
        if name.is_empty() {
            return None;
        }
        out.push((name, mode));
        rest = rest[close + 1..].trim_start();
    }
    Some(out)
}

/// Basis of one weight space of a PBW module.
pub struct WeightBasis {
    pub monos: Vec<Monomial>,
    index: FxHashMap<Monomial, u32>,
}

impl WeightBasis {
    fn new(monos: Vec<Monomial>) -> WeightBasis {
        let index = monos.iter().enumerate().map(|(i, m)| (m.clone(), i as u32)).collect();
        WeightBasis { monos, index }
    }

    pub fn find(&self, m: &Monomial) -> Option<u32> {
        self.index.get(m).copied()
    }
}

/// Induced module with a PBW basis: the vacuum module of an algebra, or a
/// Virasoro Verma module `M(c, h)`.
pub struct PbwModule {
    alg: Arc<Algebra>,
    vacuum: bool,
    h: Scalar,
    min_mode: u32,
    bases: RwLock<Vec<Arc<WeightBasis>>>,
    memo: RwLock<FxHashMap<(Gen, i64, Bid), Arc<ModVec>>>,
    grams: RwLock<FxHashMap<u32, Arc<Matrix>>>,
    sugawara: Option<Sugawara>,
}

/// Data for the Sugawara formula: `gamma^{-1}` and the dual basis.
#[derive(Clone, Debug)]
pub struct Sugawara {
    pub gamma_inv: Scalar,
    pub dual: Vec<Vec<(Gen, Q)>>,
}

impl Sugawara {
    pub fn new(alg: &Algebra) -> Result<Sugawara> {
        let t = alg.lie.as_ref().ok_or_else(|| Error::Config("Sugawara needs a Lie algebra".into()))?;
        let gamma = &Scalar::int(2) * &alg.shifted_level().unwrap();
        let gamma_inv = gamma.recip().ok_or_else(|| Error::Config("gamma = 2(l + h^vee) vanishes".into()))?;
        Ok(Sugawara { gamma_inv, dual: t.dual_basis()? })
    }
}

/// `L_n w` from the Sugawara formula
/// `gamma^{-1} sum_a (sum_{k<=-1} (a^)_k a_{n-k} + sum_{k>=0} (a^)_{n-k} a_k)`.
pub fn sugawara_apply(m: &dyn GradedModule, s: &Sugawara, n: i64, b: Bid) -> ModVec {
    let w = b.w as i64;
    let mut acc = Accum::new();
    for (a, dual) in s.dual.iter().enumerate() {
        let a = a as Gen;
        for k in (n - w).min(0)..=w {
            if k <= -1 {
                if n - k > w {
                    continue;
                }
                let x = m.act(a, n - k, b);
                if x.is_zero() {
                    continue;
                }
                for (d, coef) in dual {
                    acc.add_vec(&act_vec(m, *d, k, &x), &Scalar::Rat(coef.clone()));
                }
            } else {
                let x = m.act(a, k, b);
                if x.is_zero() {
                    continue;
                }
                for (d, coef) in dual {
                    acc.add_vec(&act_vec(m, *d, n - k, &x), &Scalar::Rat(coef.clone()));
                }
            }
        }
    }
    acc.finish().scale(&s.gamma_inv)
}

impl PbwModule {
    /// Vacuum module `V(c,0)` or `V(l,0)`.
    pub fn vacuum(alg: Arc<Algebra>) -> Arc<PbwModule> {
        Arc::new(PbwModule::build(alg, true, Scalar::zero()))
    }

    /// Virasoro Verma module `M(c, h)`.
    pub fn verma(alg: Arc<Algebra>, h: Scalar) -> Result<Arc<PbwModule>> {
        if !alg.is_virasoro() {
            return Err(Error::Config("Verma modules are implemented for the Virasoro algebra only".into()));
        }
        Ok(Arc::new(PbwModule::build(alg, false, h)))
    }

    fn build(alg: Arc<Algebra>, vacuum: bool, h: Scalar) -> PbwModule {
        let min_mode = pbw::min_creation(&alg, vacuum);
        let sugawara = if alg.is_virasoro() { None } else { Sugawara::new(&alg).ok() };
        PbwModule {
            alg,
            vacuum,
            h,
            min_mode,
            bases: RwLock::new(Vec::new()),
            memo: RwLock::new(FxHashMap::default()),
            grams: RwLock::new(FxHashMap::default()),
            sugawara,
        }
    }

    pub fn algebra_arc(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn is_vacuum(&self) -> bool {
        self.vacuum
    }

    pub fn sugawara_data(&self) -> Option<&Sugawara> {
        self.sugawara.as_ref()
    }

    /// Drops all cached actions (used by benchmarks).
    pub fn clear_cache(&self) {
        self.memo.write().clear();
        self.grams.write().clear();
    }

    pub fn weight_basis(&self, w: u32) -> Arc<WeightBasis> {
        {
            let b = self.bases.read();
            if let Some(x) = b.get(w as usize) {
                return x.clone();
            }
        }
        let mut b = self.bases.write();
        while b.len() <= w as usize {
            let k = b.len() as u32;
            b.push(Arc::new(WeightBasis::new(pbw::enumerate(self.alg.num_gens(), self.min_mode, k))));
        }
        b[w as usize].clone()
    }

    pub fn monomial(&self, b: Bid) -> Monomial {
        self.weight_basis(b.w).monos[b.i as usize].clone()
    }

    pub fn find(&self, m: &Monomial) -> Bid {
        let w = pbw::weight(m);
        let i = self.weight_basis(w).find(m).expect("monomial is in canonical order");
        Bid { w, i }
    }

    /// First letter and remainder `b = a_{m} rest`.
    pub fn split(&self, b: Bid) -> Option<((Gen, i64), Bid)> {
        let mono = self.monomial(b);
        let (&(g, m), rest) = mono.split_first()?;
        let rest: Monomial = rest.iter().copied().collect();
        Some(((g, m as i64), self.find(&rest)))
    }

    fn is_creation(&self, m: i64) -> bool {
        m <= -(self.min_mode as i64)
    }

    fn act_uncached(&self, g: Gen, m: i64, b: Bid) -> ModVec {
        let mono = self.monomial(b);
        let Some((&a1, rest)) = mono.split_first() else {
            if self.is_creation(m) {
                let w: Monomial = std::iter::once((g, m as i32)).collect();
                return unit(self.find(&w));
            }
            if m == 0 && self.alg.is_virasoro() {
                return SparseVec::single(b, self.h.clone());
            }
            return SparseVec::new();
        };
        if self.is_creation(m) && pbw::key((g, m as i32)) <= pbw::key(a1) {
            let mut w = Monomial::with_capacity(mono.len() + 1);
            w.push((g, m as i32));
            w.extend_from_slice(&mono);
            return unit(self.find(&w));
        }
        let rest_mono: Monomial = rest.iter().copied().collect();
        let rest = self.find(&rest_mono);
        let (ag, am) = (a1.0, a1.1 as i64);
        let mut acc = Accum::new();
        for (r, coef) in self.act(g, m, rest).iter() {
            acc.add_vec(&self.act(ag, am, *r), coef);
        }
        let (terms, central) = self.alg.bracket(g, m, ag, am);
        for (g2, m2, coef) in terms {
            acc.add_vec(&self.act(g2, m2, rest), &coef);
        }
        acc.add(rest, &central);
        acc.finish()
    }

    /// Contravariant form on one weight space.
    pub fn gram(&self, w: u32) -> Arc<Matrix> {
        if let Some(g) = self.grams.read().get(&w) {
            return g.clone();
        }
        let n = self.dim(w);
        let g = if w == 0 {
            Matrix::identity(1)
        } else {
            let mut rows = Vec::with_capacity(n);
            for i in 0..n as u32 {
                let ((ag, am), rest) = self.split(Bid { w, i }).unwrap();
                let (dg, dm) = self.alg.adjoint(ag, am);
                let lower = self.gram(rest.w);
                let lrow: Vec<SparseVec<usize>> = lower.rows();
                let row_rest = &lrow[rest.i as usize];
                let mut row = Vec::with_capacity(n);
                for j in 0..n as u32 {
                    let v = self.act(dg, dm, Bid { w, i: j });
                    let mut acc = Scalar::zero();
                    for (k, s) in v.iter() {
                        acc += &(s * &row_rest.get(k.i as usize));
                    }
                    row.push(acc);
                }
                rows.push(row);
            }
            Matrix::from_dense(rows)
        };
        let g = Arc::new(g);
        self.grams.write().insert(w, g.clone());
        g
    }
}

impl GradedModule for PbwModule {
    fn algebra(&self) -> &Algebra {
        &self.alg
    }

    fn dim(&self, w: u32) -> usize {
        self.weight_basis(w).monos.len()
    }

    fn lowest_weight(&self) -> Scalar {
        self.h.clone()
    }

    fn act(&self, g: Gen, m: i64, b: Bid) -> Arc<ModVec> {
        if (b.w as i64) < m {
            return Arc::new(SparseVec::new());
        }
        let key = (g, m, b);
        if let Some(v) = self.memo.read().get(&key) {
            return v.clone();
        }
        let v = Arc::new(self.act_uncached(g, m, b));
        self.memo.write().insert(key, v.clone());
        v
    }

    fn virasoro(&self, n: i64, b: Bid) -> Arc<ModVec> {
        if self.alg.is_virasoro() {
            return self.act(0, n, b);
        }
        if (b.w as i64) < n {
            return Arc::new(SparseVec::new());
        }
        let key = (VIR, n, b);
        if let Some(v) = self.memo.read().get(&key) {
            return v.clone();
        }
        let s = self.sugawara.as_ref().expect("Sugawara construction needs l + h^vee != 0");
        let v = Arc::new(sugawara_apply(self, s, n, b));
        self.memo.write().insert(key, v.clone());
        v
    }

    fn label(&self, b: Bid) -> String {
        let top = if self.vacuum { "vac" } else { "hw" };
        pbw::format_monomial(&self.alg, &self.monomial(b), top)
    }

    fn name(&self) -> String {
        if self.vacuum {
            format!("vacuum module of {}", self.alg.describe())
        } else {
            format!("Verma module M({}, {}) of {}", self.alg.central, self.h, self.alg.describe())
        }
    }
}
