//! Structure data for the Virasoro, Heisenberg and affine sl2 algebras.

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::rational::Q;
use crate::scalar::Scalar;

/// Generator index within an algebra.
pub type Gen = u8;

/// Finite-dimensional Lie algebra with an invariant symmetric form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieTable {
    pub names: Vec<String>,
    /// `bracket[a][b]` lists `(c, k)` with `[a, b] = sum k * c`.
    pub bracket: Vec<Vec<Vec<(Gen, Q)>>>,
    pub form: Vec<Vec<Q>>,
    pub dual_coxeter: Q,
    /// Anti-involution used for the contravariant form: `X_n` is adjoint to
    /// `adjoint(X)_{-n}`.
    pub adjoint: Vec<Gen>,
}

impl LieTable {
    /// Abelian algebra of the given rank with orthonormal form.
    pub fn abelian(rank: usize) -> LieTable {
        assert!((1..=16).contains(&rank), "rank must be between 1 and 16");
        let names = if rank == 1 { vec!["X".to_string()] } else { (1..=rank).map(|i| format!("X{i}")).collect() };
        LieTable {
            names,
            bracket: vec![vec![Vec::new(); rank]; rank],
            form: (0..rank).map(|i| (0..rank).map(|j| if i == j { Q::ONE } else { Q::ZERO }).collect()).collect(),
            dual_coxeter: Q::ZERO,
            adjoint: (0..rank as Gen).collect(),
        }
    }

    /// sl2 with basis e, f, h; `(e,f) = 1`, `(h,h) = 2`.
    pub fn sl2() -> LieTable {
        let (e, f, h) = (0, 1, 2);
        let mut t = LieTable {
            names: vec!["e".into(), "f".into(), "h".into()],
            bracket: vec![vec![Vec::new(); 3]; 3],
            form: vec![
                vec![Q::ZERO, Q::ONE, Q::ZERO],
                vec![Q::ONE, Q::ZERO, Q::ZERO],
                vec![Q::ZERO, Q::ZERO, Q::from_int(2)],
            ],
            dual_coxeter: Q::from_int(2),
            adjoint: vec![f, e, h],
        };
        t.set_bracket(e, f, vec![(h, Q::ONE)]);
        t.set_bracket(h, e, vec![(e, Q::from_int(2))]);
        t.set_bracket(h, f, vec![(f, Q::from_int(-2))]);
        t
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn index(&self, name: &str) -> Option<Gen> {
        self.names.iter().position(|n| n == name).map(|i| i as Gen)
    }

    /// Sets `[a, b]` and `[b, a] = -[a, b]`.
    pub fn set_bracket(&mut self, a: Gen, b: Gen, value: Vec<(Gen, Q)>) {
        let neg = value.iter().map(|(g, k)| (*g, -k)).collect();
        self.bracket[a as usize][b as usize] = value;
        self.bracket[b as usize][a as usize] = neg;
    }

    fn bracket_vec(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        let n = self.dim();
        let mut out = vec![Q::ZERO; n];
        for i in 0..n {
            for j in 0..n {
                let k = &a[i] * &b[j];
                if k.is_zero() {
                    continue;
                }
                for (g, c) in &self.bracket[i][j] {
                    out[*g as usize] = &out[*g as usize] + &(&k * c);
                }
            }
        }
        out
    }

    fn form_vec(&self, a: &[Q], b: &[Q]) -> Q {
        let mut acc = Q::ZERO;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc = &acc + &(&(&a[i] * &b[j]) * &self.form[i][j]);
            }
        }
        acc
    }

    fn unit(&self, i: usize) -> Vec<Q> {
        (0..self.dim()).map(|j| if i == j { Q::ONE } else { Q::ZERO }).collect()
    }

    /// Problems with antisymmetry, the Jacobi identity, symmetry or
    /// invariance of the form, as readable strings.
    pub fn structure_defects(&self) -> Vec<String> {
        let n = self.dim();
        let mut out = Vec::new();
        let basis: Vec<Vec<Q>> = (0..n).map(|i| self.unit(i)).collect();
        for i in 0..n {
            for j in 0..n {
                let ab = self.bracket_vec(&basis[i], &basis[j]);
                let ba = self.bracket_vec(&basis[j], &basis[i]);
                if ab.iter().zip(&ba).any(|(x, y)| !(x + y).is_zero()) {
                    out.push(format!("bracket not antisymmetric on ({}, {})", self.names[i], self.names[j]));
                }
                if self.form[i][j] != self.form[j][i] {
                    out.push(format!("form not symmetric on ({}, {})", self.names[i], self.names[j]));
                }
                for k in 0..n {
                    let lhs = self.form_vec(&self.bracket_vec(&basis[i], &basis[j]), &basis[k]);
                    let rhs = -self.form_vec(&basis[j], &self.bracket_vec(&basis[i], &basis[k]));
                    if lhs != rhs {
                        out.push(format!(
                            "form not invariant on ({}, {}, {})",
                            self.names[i], self.names[j], self.names[k]
                        ));
                    }
                    let a = self.bracket_vec(&basis[i], &self.bracket_vec(&basis[j], &basis[k]));
                    let b = self.bracket_vec(&basis[j], &self.bracket_vec(&basis[k], &basis[i]));
                    let c = self.bracket_vec(&basis[k], &self.bracket_vec(&basis[i], &basis[j]));
                    if (0..n).any(|t| !(&(&a[t] + &b[t]) + &c[t]).is_zero()) {
                        out.push(format!(
                            "Jacobi identity fails on ({}, {}, {})",
                            self.names[i], self.names[j], self.names[k]
                        ));
                    }
                }
            }
        }
        out
    }

    /// Dual basis with respect to the form: `dual[a] = sum_b k_b e_b` with
    /// `(e_i, dual[j]) = delta_ij`.
    pub fn dual_basis(&self) -> Result<Vec<Vec<(Gen, Q)>>> {
        let n = self.dim();
        let m: Vec<Vec<Scalar>> = self.form.iter().map(|r| r.iter().map(|q| Scalar::Rat(q.clone())).collect()).collect();
        let mat = crate::linalg::Matrix::from_dense(m);
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let rhs = crate::sparse::SparseVec::single(i, Scalar::one());
            let x = crate::linalg::solve(&mat, &rhs)
                .ok_or_else(|| Error::Config("invariant form is degenerate".into()))?;
            if mat.rank() < n {
                return Err(Error::Config("invariant form is degenerate".into()));
            }
            out.push(x.iter().map(|(g, s)| (*g as Gen, s.as_q().unwrap().clone())).collect());
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgebraKind {
    Virasoro,
    Heisenberg,
    AffineSl2,
}

impl AlgebraKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AlgebraKind::Virasoro => "virasoro",
            AlgebraKind::Heisenberg => "heisenberg",
            AlgebraKind::AffineSl2 => "affine-sl2",
        }
    }
}

/// An algebra instance: Virasoro at central charge `c`, or the affinization
/// of a Lie table at level `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    pub kind: AlgebraKind,
    /// `c` (Virasoro) or `l` (affine and Heisenberg).
    pub central: Scalar,
    pub lie: Option<LieTable>,
}

/// Result of bracketing two generator modes: generator terms plus a central
/// scalar.
pub type Bracket = (SmallVec<[(Gen, i64, Scalar); 4]>, Scalar);

impl Algebra {
    pub fn virasoro(c: Scalar) -> Algebra {
        Algebra { kind: AlgebraKind::Virasoro, central: c, lie: None }
    }

    pub fn heisenberg(rank: usize, l: Scalar) -> Algebra {
        Algebra { kind: AlgebraKind::Heisenberg, central: l, lie: Some(LieTable::abelian(rank)) }
    }

    pub fn affine_sl2(l: Scalar) -> Algebra {
        Algebra { kind: AlgebraKind::AffineSl2, central: l, lie: Some(LieTable::sl2()) }
    }

    /// Affinization of an arbitrary table (used for falsification fixtures).
    pub fn affine_with_table(kind: AlgebraKind, table: LieTable, l: Scalar) -> Algebra {
        Algebra { kind, central: l, lie: Some(table) }
    }

    pub fn is_virasoro(&self) -> bool {
        self.kind == AlgebraKind::Virasoro
    }

    pub fn num_gens(&self) -> usize {
        self.lie.as_ref().map_or(1, |t| t.dim())
    }

    pub fn gen_name(&self, g: Gen) -> &str {
        match &self.lie {
            None => "L",
            Some(t) => &t.names[g as usize],
        }
    }

    pub fn gen_index(&self, name: &str) -> Option<Gen> {
        match &self.lie {
            None => (name == "L").then_some(0),
            Some(t) => t.index(name),
        }
    }

    /// Symbol of the free parameter, if `central` is symbolic.
    pub fn param_symbol(&self) -> Option<char> {
        self.central.symbol()
    }

    pub fn param_name(&self) -> char {
        if self.is_virasoro() {
            'c'
        } else {
            'l'
        }
    }

    /// Conformal weight of the generating fields.
    pub fn field_weight(&self) -> i64 {
        if self.is_virasoro() {
            2
        } else {
            1
        }
    }

    /// Offset `s` with `Y(a)_p = G_{p - s}` for the generating vector `a`.
    pub fn mode_shift(&self) -> i64 {
        if self.is_virasoro() {
            1
        } else {
            0
        }
    }

    /// `[x_m, y_n]`.
    pub fn bracket(&self, x: Gen, m: i64, y: Gen, n: i64) -> Bracket {
        let mut terms = SmallVec::new();
        let mut central = Scalar::zero();
        match &self.lie {
            None => {
                if m != n {
                    terms.push((0, m + n, Scalar::int(m - n)));
                }
                if m + n == 0 && m * m != 1 && m != 0 {
                    central = &self.central * &Scalar::Rat(Q::new(m * m * m - m, 12));
                }
            }
            Some(t) => {
                for (g, k) in &t.bracket[x as usize][y as usize] {
                    terms.push((*g, m + n, Scalar::Rat(k.clone())));
                }
                if m + n == 0 && m != 0 {
                    let f = &t.form[x as usize][y as usize];
                    if !f.is_zero() {
                        central = &self.central * &Scalar::Rat(f * &Q::from_int(m));
                    }
                }
            }
        }
        (terms, central)
    }

    /// Generator adjoint to `g_m` under the contravariant form.
    pub fn adjoint(&self, g: Gen, m: i64) -> (Gen, i64) {
        match &self.lie {
            None => (0, -m),
            Some(t) => (t.adjoint[g as usize], -m),
        }
    }

    /// `l + h^vee`, which must be nonzero for the Sugawara construction.
    pub fn shifted_level(&self) -> Option<Scalar> {
        self.lie.as_ref().map(|t| &self.central + &Scalar::Rat(t.dual_coxeter.clone()))
    }

    /// Central charge: `c`, or `l dim g / (l + h^vee)` for affine algebras.
    pub fn central_charge(&self) -> Result<Scalar> {
        match &self.lie {
            None => Ok(self.central.clone()),
            Some(t) => {
                let k = self.shifted_level().unwrap();
                let num = &self.central * &Scalar::int(t.dim() as i64);
                num.checked_div(&k).map_err(|_| Error::Config("level satisfies l + h^vee = 0".into()))
            }
        }
    }

    pub fn describe(&self) -> String {
        match self.kind {
            AlgebraKind::Virasoro => format!("virasoro(c={})", self.central),
            AlgebraKind::Heisenberg => format!("heisenberg(rank={}, l={})", self.num_gens(), self.central),
            AlgebraKind::AffineSl2 => format!("affine-sl2(l={})", self.central),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_tables_are_consistent() {
        assert!(LieTable::sl2().structure_defects().is_empty());
        assert!(LieTable::abelian(3).structure_defects().is_empty());
    }

    #[test]
    fn corrupted_table_is_detected() {
        let mut t = LieTable::sl2();
        t.set_bracket(0, 1, vec![(2, Q::from_int(2))]);
        assert!(!t.structure_defects().is_empty());
    }

    #[test]
    fn virasoro_central_term() {
        let a = Algebra::virasoro(Scalar::param('c'));
        let (t, z) = a.bracket(0, 2, 0, -2);
        assert_eq!(t.as_slice(), &[(0, 0, Scalar::int(4))]);
        assert_eq!(z.to_string(), "1/2*c");
    }

    #[test]
    fn sugawara_central_charge() {
        let a = Algebra::affine_sl2(Scalar::int(1));
        assert_eq!(a.central_charge().unwrap(), Scalar::int(1));
        let crit = Algebra::affine_sl2(Scalar::int(-2));
        assert!(crit.central_charge().is_err());
    }

    #[test]
    fn sl2_dual_basis() {
        let d = LieTable::sl2().dual_basis().unwrap();
        assert_eq!(d[0], vec![(1, Q::ONE)]);
        assert_eq!(d[2], vec![(2, Q::new(1, 2))]);
    }
}
