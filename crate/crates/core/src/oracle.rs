//! Slow reference computations that share no code with the main engines:
//! contravariant forms by direct commutation of unordered words, and dense
//! fraction-free (Bareiss) elimination.

use rustc_hash::FxHashMap;

use crate::algebra::{Algebra, Gen};
use crate::pbw;
use crate::scalar::Scalar;

type Word = Vec<(Gen, i64)>;

/// Evaluates `<top, w_1 w_2 ... w_k top>` for an arbitrary word by moving
/// the rightmost annihilating letter to the right until it hits the top
/// vector.
pub struct Expectation<'a> {
    alg: &'a Algebra,
    h: Scalar,
    memo: FxHashMap<Word, Scalar>,
}

impl<'a> Expectation<'a> {
    /// `h` is the `L0` eigenvalue of the top vector (Virasoro only).
    pub fn new(alg: &'a Algebra, h: Scalar) -> Self {
        Expectation { alg, h, memo: FxHashMap::default() }
    }

    pub fn eval(&mut self, word: &[(Gen, i64)]) -> Scalar {
        let Some(&(_, last_m)) = word.last() else {
            return Scalar::one();
        };
        if word[0].1 < 0 {
            return Scalar::zero();
        }
        if last_m >= 0 {
            if last_m > 0 || !self.alg.is_virasoro() || self.h.is_zero() {
                return Scalar::zero();
            }
            let h = self.h.clone();
            return &h * &self.eval(&word[..word.len() - 1]);
        }
        if let Some(v) = self.memo.get(word) {
            return v.clone();
        }
        // Rightmost annihilating letter; it sits just left of a creation letter.
        let Some(i) = word.iter().rposition(|&(_, m)| m >= 0) else {
            return Scalar::zero();
        };
        let (g, m) = word[i];
        let (g2, m2) = word[i + 1];
        let mut swapped: Word = word.to_vec();
        swapped.swap(i, i + 1);
        let mut acc = self.eval(&swapped);
        let (terms, central) = self.alg.bracket(g, m, g2, m2);
        for (g3, m3, k) in terms {
            let mut w: Word = Vec::with_capacity(word.len() - 1);
            w.extend_from_slice(&word[..i]);
            w.push((g3, m3));
            w.extend_from_slice(&word[i + 2..]);
            acc += &(&k * &self.eval(&w));
        }
        if !central.is_zero() {
            let mut w: Word = Vec::with_capacity(word.len() - 2);
            w.extend_from_slice(&word[..i]);
            w.extend_from_slice(&word[i + 2..]);
            acc += &(&central * &self.eval(&w));
        }
        self.memo.insert(word.to_vec(), acc.clone());
        acc
    }
}

/// Gram matrix of the contravariant form on weight `w` of the vacuum
/// (`vacuum = true`) or Verma module, in the canonical PBW basis.
pub fn gram_matrix(alg: &Algebra, vacuum: bool, h: &Scalar, w: u32) -> Vec<Vec<Scalar>> {
    let monos = pbw::enumerate_basis(alg, vacuum, w);
    let mut ex = Expectation::new(alg, h.clone());
    let adj = |m: &pbw::Monomial| -> Word {
        m.iter().rev().map(|&(g, n)| alg.adjoint(g, n as i64)).collect()
    };
    monos
        .iter()
        .map(|a| {
            monos
                .iter()
                .map(|b| {
                    let mut word = adj(a);
                    word.extend(b.iter().map(|&(g, n)| (g, n as i64)));
                    ex.eval(&word)
                })
                .collect()
        })
        .collect()
}

/// Rank by Bareiss fraction-free elimination on a dense matrix.
pub fn bareiss_rank(mut a: Vec<Vec<Scalar>>) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut prev = Scalar::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for c in col + 1..cols {
                let v = &(&a[rank][col] * &a[r][c]) - &(&a[r][col] * &a[rank][c]);
                a[r][c] = &v / &prev;
            }
            a[r][col] = Scalar::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Radical dimensions of the vacuum module's contravariant form for weights
/// `0..=n`.
pub fn radical_dims(alg: &Algebra, n: u32) -> Vec<usize> {
    (0..=n)
        .map(|w| {
            let g = gram_matrix(alg, true, &Scalar::zero(), w);
            g.len() - bareiss_rank(g)
        })
        .collect()
}

/// Radical dimensions of a Virasoro Verma module `M(c, h)`.
pub fn verma_radical_dims(alg: &Algebra, h: &Scalar, n: u32) -> Vec<usize> {
    (0..=n)
        .map(|w| {
            let g = gram_matrix(alg, false, h, w);
            g.len() - bareiss_rank(g)
        })
        .collect()
}
