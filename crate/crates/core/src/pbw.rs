//! PBW monomials: sorted words of creation modes applied to a highest-weight
//! vector.

use smallvec::SmallVec;

use crate::algebra::{Algebra, Gen};

/// A letter `(generator, mode)` with negative mode.
pub type Letter = (Gen, i32);

/// Word in canonical order: ascending by mode (most negative first), ties
/// broken by generator index.
pub type Monomial = SmallVec<[Letter; 8]>;

pub fn weight(m: &Monomial) -> u32 {
    m.iter().map(|(_, n)| (-n) as u32).sum()
}

/// Canonical-order comparison key of a letter.
pub fn key(l: Letter) -> (i32, Gen) {
    (l.1, l.0)
}

/// All canonical monomials of the given weight whose letters have
/// `|mode| >= min_mode`, in canonical order: lexicographically descending
/// by modes, then ascending by generator.
pub fn enumerate(num_gens: usize, min_mode: u32, weight: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = Monomial::new();
    fn rec(num_gens: usize, min_mode: u32, remaining: u32, floor: (i32, Gen), cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if remaining == 0 {
            out.push(cur.clone());
            return;
        }
        for m in (min_mode..=remaining).rev() {
            let mode = -(m as i32);
            for g in 0..num_gens as Gen {
                if (mode, g) < floor {
                    continue;
                }
                cur.push((g, mode));
                rec(num_gens, min_mode, remaining - m, (mode, g), cur, out);
                cur.pop();
            }
        }
    }
    rec(num_gens, min_mode, weight, (i32::MIN, 0), &mut cur, &mut out);
    out
}

/// Basis of the weight-`w` space of the vacuum module (`vacuum = true`) or
/// Verma module of `alg`.
pub fn enumerate_basis(alg: &Algebra, vacuum: bool, w: u32) -> Vec<Monomial> {
    enumerate(alg.num_gens(), min_creation(alg, vacuum), w)
}

/// Smallest `|mode|` of a creation letter.
pub fn min_creation(alg: &Algebra, vacuum: bool) -> u32 {
    if alg.is_virasoro() && vacuum {
        2
    } else {
        1
    }
}

/// Number of partitions of `n` into parts `>= min_part`.
pub fn partition_count(n: u32, min_part: u32) -> u64 {
    let n = n as usize;
    let mut p = vec![0u64; n + 1];
    p[0] = 1;
    for part in (min_part.max(1) as usize)..=n {
        for k in part..=n {
            p[k] += p[k - part];
        }
    }
    p[n]
}

pub fn format_monomial(alg: &Algebra, m: &Monomial, empty: &str) -> String {
    if m.is_empty() {
        return empty.to_string();
    }
    m.iter().map(|(g, n)| format!("{}[{}]", alg.gen_name(*g), n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    #[test]
    fn virasoro_weight_six() {
        let a = Algebra::virasoro(Scalar::param('c'));
        let b = enumerate_basis(&a, true, 6);
        let s: Vec<String> = b.iter().map(|m| format_monomial(&a, m, "vac")).collect();
        assert_eq!(s, ["L[-6]", "L[-4]L[-2]", "L[-3]L[-3]", "L[-2]L[-2]L[-2]"]);
        assert!(enumerate_basis(&a, true, 1).is_empty());
    }

    #[test]
    fn heisenberg_counts() {
        let a = Algebra::heisenberg(1, Scalar::one());
        assert_eq!(enumerate_basis(&a, true, 4).len(), 5);
        for w in 0..=12 {
            assert_eq!(enumerate_basis(&a, true, w).len() as u64, partition_count(w, 1));
        }
    }

    #[test]
    fn affine_counts_match_generating_function() {
        // prod (1 - q^n)^-3 = 1 + 3q + 9q^2 + 22q^3 + 51q^4 + ...
        let a = Algebra::affine_sl2(Scalar::one());
        let dims: Vec<usize> = (0..5).map(|w| enumerate_basis(&a, true, w).len()).collect();
        assert_eq!(dims, [1, 3, 9, 22, 51]);
    }

    #[test]
    fn words_are_sorted_and_unique() {
        let a = Algebra::affine_sl2(Scalar::one());
        let b = enumerate_basis(&a, true, 5);
        let mut seen = std::collections::HashSet::new();
        for m in &b {
            assert!(m.windows(2).all(|w| key(w[0]) <= key(w[1])));
            assert_eq!(weight(m), 5);
            assert!(seen.insert(m.clone()));
        }
    }
}
