//! Exact sparse linear algebra over [`Scalar`].

use std::fmt;

use rustc_hash::FxHashMap;

use crate::scalar::Scalar;
use crate::sparse::{Accum, SparseVec};

/// Matrix stored as sparse columns.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    nrows: usize,
    cols: Vec<SparseVec<usize>>,
}

impl Matrix {
    pub fn zero(nrows: usize, ncols: usize) -> Matrix {
        Matrix { nrows, cols: vec![SparseVec::new(); ncols] }
    }

    pub fn identity(n: usize) -> Matrix {
        Matrix { nrows: n, cols: (0..n).map(|i| SparseVec::single(i, Scalar::one())).collect() }
    }

    pub fn from_columns(nrows: usize, cols: Vec<SparseVec<usize>>) -> Matrix {
        debug_assert!(cols.iter().all(|c| c.keys().all(|k| k < nrows)));
        Matrix { nrows, cols }
    }

    pub fn from_rows(ncols: usize, rows: &[SparseVec<usize>]) -> Matrix {
        Matrix::from_columns(rows.len(), rows.to_vec()).transpose_with(ncols)
    }

    /// Dense row-major construction.
    pub fn from_dense(rows: Vec<Vec<Scalar>>) -> Matrix {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut cols = vec![Vec::new(); ncols];
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged matrix");
            for (j, s) in row.into_iter().enumerate() {
                if !s.is_zero() {
                    cols[j].push((i, s));
                }
            }
        }
        Matrix { nrows, cols: cols.into_iter().map(SparseVec::from_sorted).collect() }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &SparseVec<usize> {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[SparseVec<usize>] {
        &self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.cols[j].get(i)
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_zero())
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![Scalar::zero(); self.ncols()]; self.nrows];
        for (j, c) in self.cols.iter().enumerate() {
            for (i, s) in c.iter() {
                out[*i][j] = s.clone();
            }
        }
        out
    }

    fn transpose_with(&self, ncols_out: usize) -> Matrix {
        let mut rows: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); self.nrows];
        for (j, c) in self.cols.iter().enumerate() {
            for (i, s) in c.iter() {
                rows[*i].push((j, s.clone()));
            }
        }
        Matrix { nrows: ncols_out, cols: rows.into_iter().map(SparseVec::from_sorted).collect() }
    }

    pub fn transpose(&self) -> Matrix {
        self.transpose_with(self.ncols())
    }

    pub fn rows(&self) -> Vec<SparseVec<usize>> {
        self.transpose().cols
    }

    pub fn apply(&self, v: &SparseVec<usize>) -> SparseVec<usize> {
        let mut acc = Accum::new();
        for (j, s) in v.iter() {
            acc.add_vec(&self.cols[*j], s);
        }
        acc.finish()
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.ncols(), rhs.nrows, "dimension mismatch in product");
        Matrix { nrows: self.nrows, cols: rhs.cols.iter().map(|c| self.apply(c)).collect() }
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.nrows, self.ncols()), (rhs.nrows, rhs.ncols()));
        Matrix { nrows: self.nrows, cols: self.cols.iter().zip(&rhs.cols).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.nrows, self.ncols()), (rhs.nrows, rhs.ncols()));
        Matrix { nrows: self.nrows, cols: self.cols.iter().zip(&rhs.cols).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix { nrows: self.nrows, cols: self.cols.iter().map(|v| v.scale(c)).collect() }
    }

    pub fn rank(&self) -> usize {
        let mut r = RowReducer::new(self.ncols());
        for row in self.rows() {
            r.insert(row);
        }
        r.rank()
    }

    pub fn kernel(&self) -> Vec<SparseVec<usize>> {
        kernel_basis(std::slice::from_ref(self))
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.nrows, self.ncols())?;
        for row in self.to_dense() {
            let cells: Vec<String> = row.iter().map(|s| s.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Basis of the joint kernel of matrices sharing a column count.
pub fn kernel_basis(blocks: &[Matrix]) -> Vec<SparseVec<usize>> {
    let Some(first) = blocks.first() else {
        return Vec::new();
    };
    let ncols = first.ncols();
    let mut r = RowReducer::new(ncols);
    for b in blocks {
        assert_eq!(b.ncols(), ncols, "kernel_basis: blocks disagree on domain dimension");
        for row in b.rows() {
            r.insert(row);
        }
    }
    r.kernel()
}

/// Incremental Gaussian elimination keeping rows in semi-echelon form: each
/// stored row has a distinct leading column and leading coefficient 1.
#[derive(Clone, Debug)]
pub struct RowReducer {
    ncols: usize,
    rows: FxHashMap<usize, SparseVec<usize>>,
}

impl RowReducer {
    pub fn new(ncols: usize) -> RowReducer {
        RowReducer { ncols, rows: FxHashMap::default() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn nullity(&self) -> usize {
        self.ncols - self.rows.len()
    }

    /// Reduces `row` against the stored rows.
    pub fn reduce(&self, mut row: SparseVec<usize>) -> SparseVec<usize> {
        let mut floor = 0usize;
        loop {
            let next = row.iter().find(|(k, _)| *k >= floor && self.rows.contains_key(k)).cloned();
            match next {
                None => return row,
                Some((k, s)) => {
                    row = row.add_scaled(&self.rows[&k], &-s);
                    floor = k + 1;
                }
            }
        }
    }

    /// Adds a row; returns true when it increased the rank.
    pub fn insert(&mut self, row: SparseVec<usize>) -> bool {
        let row = self.reduce(row);
        let Some((lead, s)) = row.first().cloned() else {
            return false;
        };
        let inv = s.recip().expect("nonzero pivot");
        self.rows.insert(lead, row.scale(&inv));
        true
    }

    pub fn pivots(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.rows.keys().copied().collect();
        p.sort_unstable();
        p
    }

    /// Fully reduced rows keyed by pivot, ascending.
    pub fn rref(&self) -> Vec<(usize, SparseVec<usize>)> {
        let pivots = self.pivots();
        let mut done: FxHashMap<usize, SparseVec<usize>> = FxHashMap::default();
        for &p in pivots.iter().rev() {
            let mut row = self.rows[&p].clone();
            loop {
                let next = row.iter().find(|(k, _)| *k != p && done.contains_key(k)).cloned();
                match next {
                    None => break,
                    Some((k, s)) => row = row.add_scaled(&done[&k], &-s),
                }
            }
            done.insert(p, row);
        }
        pivots.into_iter().map(|p| (p, done.remove(&p).unwrap())).collect()
    }

    /// Basis of the solution space of the homogeneous system, one vector per
    /// free column.
    pub fn kernel(&self) -> Vec<SparseVec<usize>> {
        let rref = self.rref();
        let mut free_coeffs: FxHashMap<usize, Vec<(usize, Scalar)>> = FxHashMap::default();
        for (p, row) in &rref {
            for (k, s) in row.iter() {
                if k != p {
                    free_coeffs.entry(*k).or_default().push((*p, -s));
                }
            }
        }
        (0..self.ncols)
            .filter(|j| !self.rows.contains_key(j))
            .map(|j| {
                let mut v = free_coeffs.remove(&j).unwrap_or_default();
                v.push((j, Scalar::one()));
                SparseVec::from_unsorted(v)
            })
            .collect()
    }
}

/// Solves `m x = b`; returns one solution or `None` when inconsistent.
pub fn solve(m: &Matrix, b: &SparseVec<usize>) -> Option<SparseVec<usize>> {
    let n = m.ncols();
    let mut r = RowReducer::new(n + 1);
    let rows = m.rows();
    for (i, row) in rows.into_iter().enumerate() {
        let mut e = row.into_entries();
        let bi = b.get(i);
        if !bi.is_zero() {
            e.push((n, bi));
        }
        r.insert(SparseVec::from_sorted(e));
    }
    let rref = r.rref();
    if rref.iter().any(|(p, _)| *p == n) {
        return None;
    }
    let sol = rref.iter().map(|(p, row)| (*p, row.get(n))).collect();
    Some(SparseVec::from_unsorted(sol))
}
