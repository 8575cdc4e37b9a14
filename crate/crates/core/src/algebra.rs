//! Lie algebras given by structure constants, subspaces in canonical echelon
//! form, and the derived / lower central / upper central series.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::{
    echelon_basis, format_rational, is_zero_vector, nullspace, parse_rational, unit_vector,
    zero_vector, Matrix, Rational, Vector,
};

/// A finite-dimensional Lie algebra over the rationals.
///
/// Only brackets `[x_i, x_j]` with `i < j` are stored (0-based); the rest
/// follow from antisymmetry. A dense copy of the table is kept for fast
/// evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    basis: Vec<String>,
    brackets: BTreeMap<(usize, usize), Vec<(usize, Rational)>>,
    table: Vec<Vector>,
}

impl LieAlgebra {
    /// Builds an algebra from `(i, j, [x_i, x_j])` triples with 0-based
    /// indices. Pairs with `i > j` are stored negated; repeated pairs add up.
    pub fn new<I>(basis: Vec<String>, brackets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Vector)>,
    {
        let n = basis.len();
        let mut dense: BTreeMap<(usize, usize), Vector> = BTreeMap::new();
        for (i, j, v) in brackets {
            if i >= n || j >= n {
                return Err(Error::IndexOutOfRange {
                    index: i.max(j),
                    range: format!("0..{n}"),
                });
            }
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: v.len(),
                });
            }
            if i == j {
                if is_zero_vector(&v) {
                    continue;
                }
                return Err(Error::InvalidParams(format!(
                    "nonzero self-bracket on basis element {}",
                    i + 1
                )));
            }
            let (a, b, sign) = if i < j { (i, j, Rational::one()) } else { (j, i, -Rational::one()) };
            let slot = dense.entry((a, b)).or_insert_with(|| zero_vector(n));
            for (k, c) in v.into_iter().enumerate() {
                slot[k] += c * &sign;
            }
        }
        let mut table = vec![zero_vector(n); n * n];
        let mut sparse = BTreeMap::new();
        for ((i, j), v) in dense {
            if is_zero_vector(&v) {
                continue;
            }
            let terms: Vec<(usize, Rational)> = v
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (k, c.clone()))
                .collect();
            table[j * n + i] = v.iter().map(|c| -c).collect();
            table[i * n + j] = v;
            sparse.insert((i, j), terms);
        }
        Ok(LieAlgebra {
            basis,
            brackets: sparse,
            table,
        })
    }

    /// Sparse constructor with 1-based indices: `(i, j, [(k, c), ...])`.
    pub fn from_sparse(
        basis: Vec<String>,
        brackets: &[(usize, usize, Vec<(usize, Rational)>)],
    ) -> Result<Self> {
        let n = basis.len();
        let mut triples = Vec::with_capacity(brackets.len());
        for (i, j, terms) in brackets {
            let mut v = zero_vector(n);
            for (k, c) in terms {
                if *k == 0 || *k > n {
                    return Err(Error::IndexOutOfRange {
                        index: *k,
                        range: format!("1..={n}"),
                    });
                }
                v[k - 1] += c;
            }
            if *i == 0 || *j == 0 {
                return Err(Error::IndexOutOfRange {
                    index: 0,
                    range: format!("1..={n}"),
                });
            }
            triples.push((i - 1, j - 1, v));
        }
        Self::new(basis, triples)
    }

    pub fn abelian(dim: usize) -> Self {
        Self::new((1..=dim).map(|i| format!("x{i}")).collect(), std::iter::empty())
            .expect("abelian algebra")
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis
    }

    pub fn with_basis_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: names.len(),
            });
        }
        self.basis = names;
        Ok(self)
    }

    /// Nonzero brackets `(i, j) -> [(k, c)]`, 0-based, `i < j`.
    pub fn brackets(&self) -> &BTreeMap<(usize, usize), Vec<(usize, Rational)>> {
        &self.brackets
    }

    /// `[x_i, x_j]` in coordinates (0-based).
    pub fn basis_bracket(&self, i: usize, j: usize) -> &Vector {
        &self.table[i * self.dim() + j]
    }

    /// Structure constant `c^k_{ij}` (0-based).
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.table[i * self.dim() + j][k]
    }

    fn check_len(&self, v: &[Rational]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: v.len(),
            });
        }
        Ok(())
    }

    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Result<Vector> {
        self.check_len(x)?;
        self.check_len(y)?;
        let n = self.dim();
        let mut out = zero_vector(n);
        for ((i, j), terms) in &self.brackets {
            let coeff = &x[*i] * &y[*j] - &x[*j] * &y[*i];
            if coeff.is_zero() {
                continue;
            }
            for (k, c) in terms {
                out[*k] += &coeff * c;
            }
        }
        Ok(out)
    }

    /// Matrix of `ad_x : y -> [x, y]`; column `j` is `[x, x_j]`.
    pub fn adjoint_matrix(&self, x: &[Rational]) -> Result<Matrix> {
        self.check_len(x)?;
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for j in 0..n {
                for (k, c) in self.basis_bracket(i, j).iter().enumerate() {
                    if !c.is_zero() {
                        let cur = m.get(k, j) + xi * c;
                        m.set(k, j, cur);
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn adjoint_of_basis(&self, i: usize) -> Matrix {
        self.adjoint_matrix(&unit_vector(self.dim(), i))
            .expect("basis vector has the right length")
    }

    /// Evaluates the Jacobi identity on every triple `i < j < k`.
    pub fn check_jacobi(&self) -> JacobiReport {
        let n = self.dim();
        let mut violations = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let ei = unit_vector(n, i);
                    let ej = unit_vector(n, j);
                    let ek = unit_vector(n, k);
                    let t1 = self.bracket(self.basis_bracket(i, j), &ek).expect("dims");
                    let t2 = self.bracket(self.basis_bracket(j, k), &ei).expect("dims");
                    let t3 = self.bracket(self.basis_bracket(k, i), &ej).expect("dims");
                    let sum: Vector = (0..n).map(|m| &t1[m] + &t2[m] + &t3[m]).collect();
                    if !is_zero_vector(&sum) {
                        violations.push((i, j, k));
                    }
                }
            }
        }
        JacobiReport { violations }
    }

    pub fn whole(&self) -> Subspace {
        Subspace::whole(self.dim())
    }

    /// Span of `[a, b]` over basis vectors `a` of `a_space`, `b` of `b_space`.
    pub fn product_span(&self, a_space: &Subspace, b_space: &Subspace) -> Subspace {
        let mut vs = Vec::new();
        for a in a_space.basis() {
            for b in b_space.basis() {
                let v = self.bracket(a, b).expect("subspace of this algebra");
                if !is_zero_vector(&v) {
                    vs.push(v);
                }
            }
        }
        Subspace::from_vectors(self.dim(), &vs)
    }

    pub fn derived_series(&self) -> Vec<Subspace> {
        stabilized(self.whole(), |s| self.product_span(s, s))
    }

    pub fn lower_central_series(&self) -> Vec<Subspace> {
        let g = self.whole();
        stabilized(self.whole(), |s| self.product_span(s, &g))
    }

    /// `z_1, z_2, ...` up to stabilization (the trivial `z_0` is omitted).
    pub fn upper_central_series(&self) -> Vec<Subspace> {
        let first = self.next_center(&Subspace::zero(self.dim()));
        stabilized(first, |z| self.next_center(z))
    }

    /// `{x : [x, g] ⊆ prev}`, solved as a linear system in the original algebra.
    fn next_center(&self, prev: &Subspace) -> Subspace {
        let n = self.dim();
        let functionals = prev.annihilator();
        let mut rows = Vec::new();
        for j in 0..n {
            for w in &functionals {
                // coefficient of x_i in w . [x, x_j]
                let row: Vector = (0..n)
                    .map(|i| {
                        self.basis_bracket(i, j)
                            .iter()
                            .zip(w)
                            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
                    })
                    .collect();
                if !is_zero_vector(&row) {
                    rows.push(row);
                }
            }
        }
        if rows.is_empty() {
            return Subspace::whole(n);
        }
        Subspace::from_vectors(n, &nullspace(&Matrix::from_rows(rows).expect("rows")))
    }

    pub fn series_profile(&self) -> SeriesProfile {
        let dims = |s: Vec<Subspace>| s.iter().map(Subspace::dim).collect::<Vec<_>>();
        SeriesProfile {
            ds: dims(self.derived_series()),
            cs: dims(self.lower_central_series()),
            us: dims(self.upper_central_series()),
        }
    }

    pub fn center(&self) -> Subspace {
        self.centralizer(&self.whole())
    }

    /// `{x : [x, s] = 0 for all s in S}`.
    pub fn centralizer(&self, s: &Subspace) -> Subspace {
        let n = self.dim();
        let mut rows = Vec::new();
        for v in s.basis() {
            // [x, v] = -ad_v x
            let ad = self.adjoint_matrix(v).expect("subspace of this algebra");
            for i in 0..n {
                if !is_zero_vector(ad.row(i)) {
                    rows.push(ad.row(i).to_vec());
                }
            }
        }
        if rows.is_empty() {
            return Subspace::whole(n);
        }
        Subspace::from_vectors(n, &nullspace(&Matrix::from_rows(rows).expect("rows")))
    }

    pub fn is_ideal(&self, s: &Subspace) -> bool {
        let g = self.whole();
        let prod = self.product_span(&g, s);
        prod.basis().iter().all(|v| s.contains(v))
    }

    /// Quotient by an ideal, on the complement spanned by the non-pivot
    /// basis vectors of the ideal's echelon basis.
    pub fn quotient(&self, ideal: &Subspace) -> Result<LieAlgebra> {
        if ideal.ambient_dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: ideal.ambient_dim(),
            });
        }
        if !self.is_ideal(ideal) {
            return Err(Error::NotAnIdeal);
        }
        let pivots = ideal.pivots();
        let keep: Vec<usize> = (0..self.dim()).filter(|c| !pivots.contains(c)).collect();
        let names = keep.iter().map(|&c| self.basis[c].clone()).collect();
        let mut triples = Vec::new();
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate().skip(a + 1) {
                let reduced = ideal.reduce(self.basis_bracket(i, j));
                let v: Vector = keep.iter().map(|&c| reduced[c].clone()).collect();
                triples.push((a, b, v));
            }
        }
        LieAlgebra::new(names, triples)
    }

    /// Algebra in the basis `ẽ_k = Σ_j e_j P_{jk}` (columns of `P`).
    pub fn change_basis(&self, p: &Matrix) -> Result<LieAlgebra> {
        let n = self.dim();
        if p.rows() != n || p.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: p.rows().max(p.cols()),
            });
        }
        let inv = p.inverse()?;
        let cols: Vec<Vector> = (0..n).map(|k| p.column(k)).collect();
        let mut triples = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let w = self.bracket(&cols[a], &cols[b])?;
                if !is_zero_vector(&w) {
                    triples.push((a, b, inv.mul_vec(&w)?));
                }
            }
        }
        LieAlgebra::new(self.basis.clone(), triples)
    }

    pub fn to_json(&self) -> AlgebraJson {
        AlgebraJson {
            dim: self.dim(),
            basis: self.basis.clone(),
            brackets: self
                .brackets
                .iter()
                .map(|((i, j), terms)| BracketJson {
                    i: i + 1,
                    j: j + 1,
                    terms: terms
                        .iter()
                        .map(|(k, c)| TermJson {
                            k: k + 1,
                            c: format_rational(c),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &AlgebraJson) -> Result<Self> {
        if json.basis.len() != json.dim {
            return Err(Error::DimensionMismatch {
                expected: json.dim,
                actual: json.basis.len(),
            });
        }
        let mut sparse = Vec::with_capacity(json.brackets.len());
        for b in &json.brackets {
            if b.i >= b.j {
                return Err(Error::Parse(format!("bracket ({}, {}) must have i < j", b.i, b.j)));
            }
            let terms = b
                .terms
                .iter()
                .map(|t| Ok((t.k, parse_rational(&t.c)?)))
                .collect::<Result<Vec<_>>>()?;
            sparse.push((b.i, b.j, terms));
        }
        Self::from_sparse(json.basis.clone(), &sparse)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let json: AlgebraJson =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&json)
    }
}

fn stabilized(first: Subspace, next: impl Fn(&Subspace) -> Subspace) -> Vec<Subspace> {
    let mut out = vec![first];
    loop {
        let cur = out.last().expect("nonempty");
        let nxt = next(cur);
        if &nxt == cur {
            return out;
        }
        out.push(nxt);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiReport {
    /// 0-based triples `(i, j, k)` where the Jacobi sum is nonzero.
    pub violations: Vec<(usize, usize, usize)>,
}

impl JacobiReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Dimensions of the derived (DS), lower central (CS) and upper central (US)
/// series, each printed up to its first repeated value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesProfile {
    pub ds: Vec<usize>,
    pub cs: Vec<usize>,
    pub us: Vec<usize>,
}

impl SeriesProfile {
    pub fn new(ds: &[usize], cs: &[usize], us: &[usize]) -> Self {
        SeriesProfile {
            ds: ds.to_vec(),
            cs: cs.to_vec(),
            us: us.to_vec(),
        }
    }
}

impl std::fmt::Display for SeriesProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let list = |v: &[usize]| {
            v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
        };
        write!(f, "DS=[{}] CS=[{}] US=[{}]", list(&self.ds), list(&self.cs), list(&self.us))
    }
}

/// A linear subspace stored by its reduced row echelon basis, so equal
/// subspaces compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vector>,
}

impl Subspace {
    pub fn from_vectors(ambient_dim: usize, vectors: &[Vector]) -> Self {
        Subspace {
            ambient_dim,
            basis: echelon_basis(vectors, ambient_dim),
        }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Vec::new(),
        }
    }

    pub fn whole(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: (0..ambient_dim).map(|i| unit_vector(ambient_dim, i)).collect(),
        }
    }

    /// Span of the given 0-based basis vectors.
    pub fn coordinate(ambient_dim: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let vs: Vec<Vector> = indices.into_iter().map(|i| unit_vector(ambient_dim, i)).collect();
        Self::from_vectors(ambient_dim, &vs)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|v| v.iter().position(|c| !c.is_zero()).expect("nonzero basis row"))
            .collect()
    }

    /// `v` minus its component along the echelon basis (zero iff `v` ∈ self).
    pub fn reduce(&self, v: &[Rational]) -> Vector {
        let mut r = v.to_vec();
        for (row, p) in self.basis.iter().zip(self.pivots()) {
            let f = r[p].clone();
            if f.is_zero() {
                continue;
            }
            for (x, b) in r.iter_mut().zip(row) {
                *x -= &f * b;
            }
        }
        r
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        is_zero_vector(&self.reduce(v))
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    /// Basis of the linear functionals vanishing on this subspace.
    pub fn annihilator(&self) -> Vec<Vector> {
        if self.basis.is_empty() {
            return (0..self.ambient_dim).map(|i| unit_vector(self.ambient_dim, i)).collect();
        }
        nullspace(&Matrix::from_rows(self.basis.clone()).expect("rows"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub dim: usize,
    pub basis: Vec<String>,
    pub brackets: Vec<BracketJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketJson {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub k: usize,
    pub c: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::{q, qf};

    fn heisenberg() -> LieAlgebra {
        LieAlgebra::from_sparse(
            vec!["x".into(), "y".into(), "z".into()],
            &[(1, 2, vec![(3, q(1))])],
        )
        .unwrap()
    }

    #[test]
    fn antisymmetric_storage() {
        let h = LieAlgebra::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec![(1, 0, vec![q(0), q(0), q(1)])],
        )
        .unwrap();
        assert_eq!(h.basis_bracket(0, 1), &vec![q(0), q(0), q(-1)]);
        assert_eq!(h.brackets().len(), 1);
    }

    #[test]
    fn heisenberg_series() {
        let h = heisenberg();
        assert!(h.check_jacobi().is_ok());
        assert_eq!(h.series_profile(), SeriesProfile::new(&[3, 1, 0], &[3, 1, 0], &[1, 3]));
        assert_eq!(h.center(), Subspace::coordinate(3, [2]));
    }

    #[test]
    fn abelian_profile() {
        let a = LieAlgebra::abelian(4);
        assert_eq!(a.series_profile(), SeriesProfile::new(&[4, 0], &[4, 0], &[4]));
        assert_eq!(a.centralizer(&Subspace::zero(4)), Subspace::whole(4));
    }

    #[test]
    fn quotient_edges() {
        let h = heisenberg();
        assert_eq!(h.quotient(&Subspace::zero(3)).unwrap(), h);
        assert_eq!(h.quotient(&Subspace::whole(3)).unwrap().dim(), 0);
        assert_eq!(
            h.quotient(&Subspace::coordinate(3, [0])),
            Err(Error::NotAnIdeal)
        );
        let ab = h.quotient(&h.center()).unwrap();
        assert_eq!(ab.dim(), 2);
        assert!(ab.brackets().is_empty());
    }

    #[test]
    fn subspace_canonical() {
        let a = Subspace::from_vectors(2, &[vec![q(2), q(4)]]);
        let b = Subspace::from_vectors(2, &[vec![qf(1, 3), qf(2, 3)]]);
        assert_eq!(a, b);
        assert!(a.contains(&[q(-1), q(-2)]));
        assert!(!a.contains(&[q(1), q(0)]));
    }

    #[test]
    fn json_round_trip() {
        let h = heisenberg();
        let s = h.to_json_string();
        assert_eq!(s, r#"{"dim":3,"basis":["x","y","z"],"brackets":[{"i":1,"j":2,"terms":[{"k":3,"c":"1"}]}]}"#);
        let back = LieAlgebra::from_json_str(&s).unwrap();
        assert_eq!(back, h);
        assert_eq!(back.to_json_string(), s);
        assert!(LieAlgebra::from_json_str(r#"{"dim":2,"basis":["a","b"],"brackets":[{"i":2,"j":1,"terms":[]}]}"#).is_err());
    }

    #[test]
    fn dimension_checks() {
        let h = heisenberg();
        assert!(h.bracket(&[q(1)], &[q(1), q(0), q(0)]).is_err());
        assert!(h.adjoint_matrix(&[q(1)]).is_err());
    }
}
