//! Sorted sparse vectors with exact coefficients.

use std::hash::Hash;

use rustc_hash::FxHashMap;

use crate::scalar::Scalar;

/// Sparse vector: entries sorted by key, no stored zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SparseVec<K> {
    entries: Vec<(K, Scalar)>,
}

impl<K> Default for SparseVec<K> {
    fn default() -> Self {
        SparseVec { entries: Vec::new() }
    }
}

impl<K: Ord + Copy + Hash> SparseVec<K> {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    pub fn single(k: K, s: Scalar) -> Self {
        if s.is_zero() {
            SparseVec::new()
        } else {
            SparseVec { entries: vec![(k, s)] }
        }
    }

    pub fn from_unsorted(mut v: Vec<(K, Scalar)>) -> Self {
        v.sort_by_key(|a| a.0);
        let mut out: Vec<(K, Scalar)> = Vec::with_capacity(v.len());
        for (k, s) in v {
            match out.last_mut() {
                Some((lk, ls)) if *lk == k => *ls += &s,
                _ => out.push((k, s)),
            }
        }
        out.retain(|(_, s)| !s.is_zero());
        SparseVec { entries: out }
    }

    /// Builds from entries already sorted by key with unique keys.
    pub fn from_sorted(mut v: Vec<(K, Scalar)>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0].0 < w[1].0));
        v.retain(|(_, s)| !s.is_zero());
        SparseVec { entries: v }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(K, Scalar)> + '_ {
        self.entries.iter()
    }

    pub fn entries(&self) -> &[(K, Scalar)] {
        &self.entries
    }

    pub fn keys(&self) -> impl Iterator<Item = K> + '_ {
        self.entries.iter().map(|(k, _)| *k)
    }

    pub fn get(&self, k: K) -> Scalar {
        match self.entries.binary_search_by(|e| e.0.cmp(&k)) {
            Ok(i) => self.entries[i].1.clone(),
            Err(_) => Scalar::zero(),
        }
    }

    pub fn first(&self) -> Option<&(K, Scalar)> {
        self.entries.first()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return SparseVec::new();
        }
        if c.is_one() {
            return self.clone();
        }
        SparseVec { entries: self.entries.iter().map(|(k, s)| (*k, s * c)).collect() }
    }

    pub fn neg(&self) -> Self {
        SparseVec { entries: self.entries.iter().map(|(k, s)| (*k, -s)).collect() }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &Self, c: &Scalar) -> Self {
        if c.is_zero() || other.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, &b[j].1 * c));
                j += 1;
            } else {
                let s = &a[i].1 + &(&b[j].1 * c);
                if !s.is_zero() {
                    out.push((a[i].0, s));
                }
                i += 1;
                j += 1;
            }
        }
        SparseVec { entries: out }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(other, &Scalar::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(other, &Scalar::int(-1))
    }

    pub fn filter(&self, mut keep: impl FnMut(K) -> bool) -> Self {
        SparseVec { entries: self.entries.iter().filter(|(k, _)| keep(*k)).cloned().collect() }
    }

    /// Relabels keys; the map must be injective.
    pub fn map_keys<J: Ord + Copy + Hash>(&self, f: impl Fn(K) -> J) -> SparseVec<J> {
        SparseVec::from_unsorted(self.entries.iter().map(|(k, s)| (f(*k), s.clone())).collect())
    }

    pub fn dot(&self, other: &Self) -> Scalar {
        let mut acc = Scalar::zero();
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() && j < other.entries.len() {
            let (a, b) = (&self.entries[i], &other.entries[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += &(&a.1 * &b.1);
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn into_entries(self) -> Vec<(K, Scalar)> {
        self.entries
    }
}

/// Hash-based accumulator for summing many sparse contributions.
pub struct Accum<K> {
    map: FxHashMap<K, Scalar>,
}

impl<K: Ord + Copy + Hash> Default for Accum<K> {
    fn default() -> Self {
        Accum { map: FxHashMap::default() }
    }
}

impl<K: Ord + Copy + Hash> Accum<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, k: K, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        match self.map.get_mut(&k) {
            Some(v) => *v += s,
            None => {
                self.map.insert(k, s.clone());
            }
        }
    }

    pub fn add_vec(&mut self, v: &SparseVec<K>, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        if c.is_one() {
            for (k, s) in v.iter() {
                self.add(*k, s);
            }
        } else {
            for (k, s) in v.iter() {
                self.add(*k, &(s * c));
            }
        }
    }

    pub fn finish(self) -> SparseVec<K> {
        SparseVec::from_unsorted(self.map.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_cancels() {
        let a = SparseVec::from_unsorted(vec![(2usize, Scalar::int(1)), (0, Scalar::int(3))]);
        let b = SparseVec::from_unsorted(vec![(2usize, Scalar::int(1)), (1, Scalar::int(5))]);
        let d = a.sub(&b);
        assert_eq!(d.entries(), &[(0, Scalar::int(3)), (1, Scalar::int(-5))]);
        let mut acc = Accum::new();
        acc.add_vec(&a, &Scalar::one());
        acc.add_vec(&b, &Scalar::int(-1));
        assert_eq!(acc.finish(), d);
    }
}
