//! Derivations and automorphisms of the nilradical, conjugation, and the
//! check that a given ideal is the nilradical of an extension.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{LieAlgebra, Subspace};
use crate::catalog::{make_nilradical, BasisKind, NilradicalKind};
use crate::error::{Error, Result};
use crate::linear::{
    echelon_basis, format_rational, is_nilpotent_matrix, nullspace,
    parse_rational, q, zero_vector, Matrix, Rational, Vector,
};

/// Flattens a square matrix row by row.
fn flatten(m: &Matrix) -> Vector {
    m.entries().to_vec()
}

fn unflatten(v: &[Rational], n: usize) -> Matrix {
    let rows = v.chunks(n).map(<[Rational]>::to_vec).collect();
    Matrix::from_rows(rows).expect("square chunks")
}

/// Basis of `Der(g)`: the nullspace of the Leibniz system in the `N²`
/// entries of `D`, returned in reduced echelon order.
pub fn derivation_algebra(g: &LieAlgebra) -> Vec<Matrix> {
    let n = g.dim();
    let var = |row: usize, col: usize| row * n + col;
    let mut rows: Vec<Vector> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            // component m of D[x_i,x_j] - [D x_i, x_j] - [x_i, D x_j]
            let mut eqs: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); n];
            for (k, c) in g.basis_bracket(i, j).iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (m, eq) in eqs.iter_mut().enumerate() {
                    *eq.entry(var(m, k)).or_insert_with(Rational::zero) += c;
                }
            }
            for l in 0..n {
                for (m, c) in g.basis_bracket(l, j).iter().enumerate() {
                    if !c.is_zero() {
                        *eqs[m].entry(var(l, i)).or_insert_with(Rational::zero) -= c;
                    }
                }
                for (m, c) in g.basis_bracket(i, l).iter().enumerate() {
                    if !c.is_zero() {
                        *eqs[m].entry(var(l, j)).or_insert_with(Rational::zero) -= c;
                    }
                }
            }
            for eq in eqs {
                if eq.values().all(Zero::is_zero) {
                    continue;
                }
                let mut row = zero_vector(n * n);
                for (idx, c) in eq {
                    row[idx] = c;
                }
                rows.push(row);
            }
        }
    }
    let basis = if rows.is_empty() {
        (0..n * n).map(|i| crate::linear::unit_vector(n * n, i)).collect()
    } else {
        nullspace(&Matrix::from_rows(rows).expect("rows"))
    };
    basis.iter().map(|v| unflatten(v, n)).collect()
}

/// Echelon basis of `span{ad_{x_i}}`.
pub fn inner_derivations(g: &LieAlgebra) -> Vec<Matrix> {
    let n = g.dim();
    let flat: Vec<Vector> = (0..n).map(|i| flatten(&g.adjoint_of_basis(i))).collect();
    echelon_basis(&flat, n * n).iter().map(|v| unflatten(v, n)).collect()
}

pub fn is_derivation(g: &LieAlgebra, d: &Matrix) -> bool {
    let n = g.dim();
    if d.rows() != n || d.cols() != n {
        return false;
    }
    let cols: Vec<Vector> = (0..n).map(|j| d.column(j)).collect();
    for i in 0..n {
        for j in i + 1..n {
            let lhs = d.mul_vec(g.basis_bracket(i, j)).expect("dims");
            let a = g.bracket(&cols[i], &crate::linear::unit_vector(n, j)).expect("dims");
            let b = g.bracket(&crate::linear::unit_vector(n, i), &cols[j]).expect("dims");
            if (0..n).any(|m| lhs[m] != &a[m] + &b[m]) {
                return false;
            }
        }
    }
    true
}

/// True iff `phi` is invertible and preserves every basis bracket.
pub fn is_automorphism(g: &LieAlgebra, phi: &Matrix) -> bool {
    let n = g.dim();
    if phi.rows() != n || phi.cols() != n || phi.rank() != n {
        return false;
    }
    let cols: Vec<Vector> = (0..n).map(|j| phi.column(j)).collect();
    for i in 0..n {
        for j in i + 1..n {
            let lhs = phi.mul_vec(g.basis_bracket(i, j)).expect("dims");
            if lhs != g.bracket(&cols[i], &cols[j]).expect("dims") {
                return false;
            }
        }
    }
    true
}

/// `Φ⁻¹ D Φ`.
pub fn conjugate(phi: &Matrix, d: &Matrix) -> Result<Matrix> {
    phi.inverse()?.mul(d)?.mul(phi)
}

/// `exp(X)` for a nilpotent matrix, as a finite sum.
pub fn exp_nilpotent(x: &Matrix) -> Result<Matrix> {
    if !is_nilpotent_matrix(x)? {
        return Err(Error::InvalidParams("exp_nilpotent needs a nilpotent matrix".into()));
    }
    let n = x.rows();
    let mut out = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..=n {
        term = term.mul(x)?.scale(&Rational::new(1.into(), (k as i64).into()));
        if term.is_zero() {
            break;
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

fn e_nilradical(n: usize) -> Result<LieAlgebra> {
    make_nilradical(NilradicalKind::N3, n, BasisKind::E)
}

/// Fills columns `e_1 .. e_{n-3}` from the three generator columns, walking
/// down the bracket chains `e_{k-1} = [e_k, e_n]`, `e_2 = [e_4, e_n]`,
/// `e_3 = -[e_{n-1}, e_n]`, `e_1 = [e_2, e_n]`.
fn propagate(
    n: usize,
    cols: &mut [Vector],
    image_of_bracket: impl Fn(&[Vector], usize, usize) -> Vector,
) {
    let last = n - 1;
    for k in (5..=n - 2).rev() {
        cols[k - 2] = image_of_bracket(cols, k - 1, last);
    }
    cols[1] = image_of_bracket(cols, 3, last);
    cols[2] = image_of_bracket(cols, n - 2, last).iter().map(|c| -c).collect();
    cols[0] = image_of_bracket(cols, 1, last);
}

/// Parameter slot of a derivation: `b_k`, `c_k` or `d_k` (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    B(usize),
    C(usize),
    D(usize),
}

impl Slot {
    pub fn name(self) -> String {
        match self {
            Slot::B(k) => format!("b{k}"),
            Slot::C(k) => format!("c{k}"),
            Slot::D(k) => format!("d{k}"),
        }
    }
}

pub fn b_indices(n: usize) -> Vec<usize> {
    let mut v = vec![1, 2];
    v.extend(4..=n.saturating_sub(3));
    v
}

pub fn c_indices(n: usize) -> Vec<usize> {
    vec![1, 2, 3, n - 1]
}

/// The `2n` coordinates of a derivation of the nilradical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationParams {
    pub n: usize,
    pub b: BTreeMap<usize, Rational>,
    pub c: BTreeMap<usize, Rational>,
    pub d: BTreeMap<usize, Rational>,
}

impl DerivationParams {
    pub fn zero(n: usize) -> Self {
        DerivationParams {
            n,
            b: BTreeMap::new(),
            c: BTreeMap::new(),
            d: BTreeMap::new(),
        }
    }

    pub fn slots(n: usize) -> Vec<Slot> {
        let mut v: Vec<Slot> = b_indices(n).into_iter().map(Slot::B).collect();
        v.extend(c_indices(n).into_iter().map(Slot::C));
        v.extend((1..=n).map(Slot::D));
        v
    }

    pub fn unit(n: usize, slot: Slot) -> Self {
        let mut p = Self::zero(n);
        p.set(slot, Rational::one());
        p
    }

    pub fn get(&self, slot: Slot) -> Rational {
        let map = match slot {
            Slot::B(k) => self.b.get(&k),
            Slot::C(k) => self.c.get(&k),
            Slot::D(k) => self.d.get(&k),
        };
        map.cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, slot: Slot, value: Rational) {
        let (map, k) = match slot {
            Slot::B(k) => (&mut self.b, k),
            Slot::C(k) => (&mut self.c, k),
            Slot::D(k) => (&mut self.d, k),
        };
        if value.is_zero() {
            map.remove(&k);
        } else {
            map.insert(k, value);
        }
    }

    pub fn with(mut self, slot: Slot, value: Rational) -> Self {
        self.set(slot, value);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n < 6 {
            return Err(Error::DimensionTooSmall {
                what: "derivation parameters (n >= 6)",
                n,
            });
        }
        let check = |name: &str, keys: Vec<usize>, allowed: Vec<usize>| -> Result<()> {
            for k in keys {
                if !allowed.contains(&k) {
                    return Err(Error::InvalidIndexSet(format!(
                        "{name}{k} is not a parameter for n = {n}; allowed indices {allowed:?}"
                    )));
                }
            }
            Ok(())
        };
        check("b", self.b.keys().copied().collect(), b_indices(n))?;
        check("c", self.c.keys().copied().collect(), c_indices(n))?;
        check("d", self.d.keys().copied().collect(), (1..=n).collect())
    }

    /// Reads the parameters off a derivation matrix; fails if the matrix is
    /// not a derivation of the nilradical.
    pub fn from_matrix(n: usize, d: &Matrix) -> Result<Self> {
        if d.rows() != n || d.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: d.rows(),
            });
        }
        let mut p = Self::zero(n);
        for k in b_indices(n) {
            p.set(Slot::B(k), d.get(k - 1, n - 3).clone());
        }
        for k in c_indices(n) {
            p.set(Slot::C(k), d.get(k - 1, n - 2).clone());
        }
        for k in 1..=n {
            p.set(Slot::D(k), d.get(k - 1, n - 1).clone());
        }
        if &build_derivation(&p)? != d {
            return Err(Error::NotADerivation);
        }
        Ok(p)
    }

    pub fn to_json(&self) -> DerivationParamsJson {
        let conv = |m: &BTreeMap<usize, Rational>| {
            m.iter().map(|(k, v)| (k.to_string(), format_rational(v))).collect()
        };
        DerivationParamsJson {
            n: self.n,
            b: conv(&self.b),
            c: conv(&self.c),
            d: conv(&self.d),
        }
    }

    pub fn from_json(json: &DerivationParamsJson) -> Result<Self> {
        let conv = |m: &BTreeMap<String, String>| -> Result<BTreeMap<usize, Rational>> {
            let mut out = BTreeMap::new();
            for (k, v) in m {
                let idx: usize = k
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad parameter index {k:?}")))?;
                let val = parse_rational(v)?;
                if !val.is_zero() {
                    out.insert(idx, val);
                }
            }
            Ok(out)
        };
        let p = DerivationParams {
            n: json.n,
            b: conv(&json.b)?,
            c: conv(&json.c)?,
            d: conv(&json.d)?,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let json: DerivationParamsJson =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&json)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationParamsJson {
    pub n: usize,
    #[serde(default)]
    pub b: BTreeMap<String, String>,
    #[serde(default)]
    pub c: BTreeMap<String, String>,
    #[serde(default)]
    pub d: BTreeMap<String, String>,
}

/// Full matrix of the derivation with the given parameters (column `j` is
/// `D(e_j)`).
pub fn build_derivation(p: &DerivationParams) -> Result<Matrix> {
    p.validate()?;
    let n = p.n;
    let nil = e_nilradical(n)?;
    let mut cols = vec![zero_vector(n); n];

    let nq = q(n as i64);
    let mut top = zero_vector(n);
    top[n - 3] = q(2) * p.get(Slot::C(n - 1)) + (q(5) - &nq) * p.get(Slot::D(n));
    for k in b_indices(n) {
        top[k - 1] += p.get(Slot::B(k));
    }
    cols[n - 3] = top;

    let mut mid = zero_vector(n);
    mid[n - 2] = p.get(Slot::C(n - 1));
    mid[3] += p.get(Slot::D(n - 1));
    for k in 1..=3 {
        mid[k - 1] += p.get(Slot::C(k));
    }
    cols[n - 2] = mid;

    cols[n - 1] = (1..=n).map(|k| p.get(Slot::D(k))).collect();

    let unit = |i: usize| crate::linear::unit_vector(n, i);
    propagate(n, &mut cols, |cols, i, j| {
        let a = nil.bracket(&cols[i], &unit(j)).expect("dims");
        let b = nil.bracket(&unit(i), &cols[j]).expect("dims");
        a.iter().zip(&b).map(|(x, y)| x + y).collect()
    });
    let d = Matrix::from_columns(n, &cols)?;
    if !is_derivation(&nil, &d) {
        return Err(Error::NotADerivation);
    }
    Ok(d)
}

/// A derivation shifted by an inner derivation into the reduced form used
/// for classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OuterForm {
    pub derivation: Matrix,
    /// `x` with `derivation = D + ad_x`; the central coordinate `x_1` is 0.
    pub inner: Vector,
}

/// Adds the unique inner derivation `ad_x` (with `x_1 = 0`) that clears the
/// `e_1` entry of `D(e_{n-1})`, the `[e_{n-2}, e_n]` entry of `D(e_{n-2})`
/// and the `e_1 .. e_{n-3}` entries of `D(e_n)`.
pub fn canonical_outer(n: usize, d: &Matrix) -> Result<OuterForm> {
    let nil = e_nilradical(n)?;
    if !is_derivation(&nil, d) {
        return Err(Error::NotADerivation);
    }
    let low = nil.basis_bracket(n - 3, n - 1);
    let below = low.iter().position(|c| !c.is_zero()).expect("e_{n-2} is not central");
    let mut targets = vec![(0, n - 2), (below, n - 3)];
    targets.extend((0..n - 3).map(|k| (k, n - 1)));
    let ads: Vec<Matrix> = (1..n).map(|i| nil.adjoint_of_basis(i)).collect();
    let rows: Vec<Vector> = targets
        .iter()
        .map(|&(r, c)| ads.iter().map(|a| a.get(r, c).clone()).collect())
        .collect();
    let rhs: Vector = targets.iter().map(|&(r, c)| -d.get(r, c).clone()).collect();
    let sol = Matrix::from_rows(rows)?
        .solve(&rhs)?
        .expect("inner derivations reach every reduced slot");
    let mut x = vec![Rational::zero()];
    x.extend(sol);
    let ad = nil.adjoint_matrix(&x)?;
    Ok(OuterForm {
        derivation: d.add(&ad)?,
        inner: x,
    })
}

/// Coordinates of an automorphism of the nilradical. `alpha = beta² kappa^{5-n}`
/// is derived, never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismParams {
    pub n: usize,
    pub beta: Rational,
    pub kappa: Rational,
    pub lambda: Rational,
    pub mu: Rational,
    pub psi: BTreeMap<usize, Rational>,
    pub phi: BTreeMap<usize, Rational>,
    pub rho: BTreeMap<usize, Rational>,
}

impl AutomorphismParams {
    pub fn identity(n: usize) -> Self {
        Self::scaling(n, Rational::one(), Rational::one())
    }

    pub fn scaling(n: usize, beta: Rational, kappa: Rational) -> Self {
        AutomorphismParams {
            n,
            beta,
            kappa,
            lambda: Rational::zero(),
            mu: Rational::zero(),
            psi: BTreeMap::new(),
            phi: BTreeMap::new(),
            rho: BTreeMap::new(),
        }
    }

    pub fn alpha(&self) -> Rational {
        &self.beta * &self.beta * qpow(&self.kappa, 5 - self.n as i64)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        if n < 6 {
            return Err(Error::DimensionTooSmall {
                what: "automorphism parameters (n >= 6)",
                n,
            });
        }
        if self.beta.is_zero() || self.kappa.is_zero() {
            return Err(Error::SingularParams);
        }
        let check = |name: &str, m: &BTreeMap<usize, Rational>, allowed: Vec<usize>| {
            match m.keys().find(|k| !allowed.contains(k)) {
                Some(k) => Err(Error::InvalidIndexSet(format!("{name}{k} is not a parameter"))),
                None => Ok(()),
            }
        };
        check("psi", &self.psi, vec![1, 2, 3])?;
        check("phi", &self.phi, b_indices(n))?;
        check("rho", &self.rho, (1..=n - 3).collect())
    }
}

/// `x^e` for any integer `e` (x nonzero when `e < 0`).
pub fn qpow(x: &Rational, e: i64) -> Rational {
    let p = num_traits::pow(x.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

/// Matrix of the automorphism (column `j` is `Φ(e_j)`).
pub fn build_automorphism(p: &AutomorphismParams) -> Result<Matrix> {
    p.validate()?;
    let n = p.n;
    let nil = e_nilradical(n)?;
    let get = |m: &BTreeMap<usize, Rational>, k: usize| m.get(&k).cloned().unwrap_or_else(Rational::zero);
    let mut cols = vec![zero_vector(n); n];

    let mut top = zero_vector(n);
    top[n - 3] = p.alpha();
    for k in b_indices(n) {
        top[k - 1] += get(&p.phi, k);
    }
    cols[n - 3] = top;

    let mut mid = zero_vector(n);
    mid[n - 2] = p.beta.clone();
    mid[3] += &p.lambda / &p.kappa * &p.beta;
    for k in 1..=3 {
        mid[k - 1] += get(&p.psi, k);
    }
    cols[n - 2] = mid;

    let mut bottom = zero_vector(n);
    bottom[n - 1] = p.kappa.clone();
    bottom[n - 2] = p.lambda.clone();
    bottom[n - 3] += &p.mu;
    for k in 1..=n - 3 {
        bottom[k - 1] += get(&p.rho, k);
    }
    cols[n - 1] = bottom;

    propagate(n, &mut cols, |cols, i, j| nil.bracket(&cols[i], &cols[j]).expect("dims"));
    let phi = Matrix::from_columns(n, &cols)?;
    if !is_automorphism(&nil, &phi) {
        return Err(Error::InvalidParams(
            "parameters do not define an automorphism".into(),
        ));
    }
    Ok(phi)
}

/// Checks that the span of the first `nil_dim` basis vectors is the
/// nilradical: a nilpotent ideal on which no nonzero combination of the
/// remaining generators acts nilpotently.
pub fn verify_nilradical(s: &LieAlgebra, nil_dim: usize) -> Result<bool> {
    let total = s.dim();
    if nil_dim > total {
        return Err(Error::DimensionMismatch {
            expected: total,
            actual: nil_dim,
        });
    }
    let ideal = Subspace::coordinate(total, 0..nil_dim);
    if !s.is_ideal(&ideal) {
        return Err(Error::NotAnIdeal);
    }
    let mut term = ideal.clone();
    while term.dim() > 0 {
        let next = s.product_span(&term, &ideal);
        if next == term {
            return Ok(false);
        }
        term = next;
    }
    let p = total - nil_dim;
    if p == 0 {
        return Ok(true);
    }
    let restrict = |a: usize| -> Matrix {
        let ad = s.adjoint_of_basis(a);
        let rows = (0..nil_dim).map(|r| ad.row(r)[..nil_dim].to_vec()).collect();
        Matrix::from_rows(rows).expect("block")
    };
    let acts: Vec<Matrix> = (nil_dim..total).map(restrict).collect();
    for a in &acts {
        if nil_dim > 0 && is_nilpotent_matrix(a)? {
            return Ok(false);
        }
    }
    match p {
        1 => Ok(true),
        2 => Ok(!pencil_has_nilpotent(&acts[0], &acts[1])?),
        _ => Err(Error::UnsupportedCodimension(p)),
    }
}

/// Whether some `(a, b) ≠ (0, 0)` (over the algebraic closure) makes
/// `a A + b B` nilpotent, via the trace polynomials `tr((aA + bB)^k)`.
fn pencil_has_nilpotent(a: &Matrix, b: &Matrix) -> Result<bool> {
    let n = a.rows();
    if n == 0 {
        return Ok(true);
    }
    // root at b = 0: A itself nilpotent
    if is_nilpotent_matrix(a)? {
        return Ok(true);
    }
    // b = 1: t_k(x) = tr((xA + B)^k) has degree <= k; sample at x = 0..n
    let samples: Vec<Vec<Rational>> = (0..=n)
        .map(|x| -> Result<Vec<Rational>> {
            let m = a.scale(&q(x as i64)).add(b)?;
            let mut pow = Matrix::identity(n);
            let mut traces = Vec::with_capacity(n);
            for _ in 0..n {
                pow = pow.mul(&m)?;
                traces.push(pow.trace());
            }
            Ok(traces)
        })
        .collect::<Result<_>>()?;
    let mut g: Vec<Rational> = Vec::new();
    for k in 0..n {
        let values: Vec<Rational> = samples.iter().map(|s| s[k].clone()).collect();
        let poly = interpolate(&values)?;
        g = poly_gcd(&g, &poly);
    }
    // a zero gcd means every t_k vanishes identically
    Ok(g.is_empty() || g.len() > 1)
}

/// Coefficients (low to high, trailing zeros trimmed) of the polynomial
/// taking `values[i]` at `x = i`.
fn interpolate(values: &[Rational]) -> Result<Vec<Rational>> {
    let m = values.len();
    let rows = (0..m)
        .map(|i| (0..m).map(|j| qpow(&q(i as i64), j as i64)).collect())
        .collect();
    let sol = Matrix::from_rows(rows)?
        .solve(values)?
        .expect("Vandermonde matrix is invertible");
    Ok(trim(sol))
}

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn poly_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    let lead = b.last().expect("nonzero divisor");
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let f = r.last().expect("nonempty") / lead;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &f * c;
        }
        r = trim(r);
    }
    r
}

/// Monic gcd; the empty vector stands for the zero polynomial.
fn poly_gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
    while !y.is_empty() {
        let r = poly_rem(&x, &y);
        x = y;
        y = r;
    }
    if let Some(lead) = x.last().cloned() {
        x.iter_mut().for_each(|c| *c /= &lead);
    }
    x
}

/// Whether `d` lies in the span of the adjoint matrices.
pub fn is_inner(g: &LieAlgebra, d: &Matrix) -> bool {
    let n = g.dim();
    let mut flat: Vec<Vector> = (0..n).map(|i| flatten(&g.adjoint_of_basis(i))).collect();
    let before = echelon_basis(&flat, n * n).len();
    flat.push(flatten(d));
    before == echelon_basis(&flat, n * n).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_extension, ExtensionSpec, Family};
    use crate::linear::{is_zero_vector, qf, rank};

    fn nil(n: usize) -> LieAlgebra {
        e_nilradical(n).unwrap()
    }

    #[test]
    fn derivation_dimensions_small() {
        assert_eq!(derivation_algebra(&LieAlgebra::abelian(3)).len(), 9);
        assert!(inner_derivations(&LieAlgebra::abelian(3)).is_empty());
        let h = LieAlgebra::from_sparse(
            vec!["x".into(), "y".into(), "z".into()],
            &[(1, 2, vec![(3, q(1))])],
        )
        .unwrap();
        assert_eq!(derivation_algebra(&h).len(), 6);
        assert_eq!(inner_derivations(&h).len(), 2);
    }

    #[test]
    fn derivation_dimensions_nilradical() {
        for n in 6..=9 {
            let g = nil(n);
            let der = derivation_algebra(&g);
            assert_eq!(der.len(), 2 * n, "n = {n}");
            assert_eq!(inner_derivations(&g).len(), n - 1);
            assert!(der.iter().all(|d| is_derivation(&g, d)));
        }
    }

    #[test]
    fn inner_dimension_of_extension() {
        let s = make_extension(&ExtensionSpec::new(Family::S_N1_1, 8).with_param("beta", q(2))).unwrap();
        assert_eq!(inner_derivations(&s).len(), s.dim() - s.center().dim());
    }

    #[test]
    fn build_derivation_examples() {
        assert!(build_derivation(&DerivationParams::zero(8)).unwrap().is_zero());
        let d = build_derivation(&DerivationParams::unit(8, Slot::C(7))).unwrap();
        assert_eq!(d.get(5, 5), &q(2));
        assert_eq!(d.get(6, 6), &q(1));
        assert!(is_zero_vector(&d.column(7)));
    }

    #[test]
    fn parameters_span_all_derivations() {
        for n in 6..=10 {
            let mats: Vec<Vector> = DerivationParams::slots(n)
                .into_iter()
                .map(|s| flatten(&build_derivation(&DerivationParams::unit(n, s)).unwrap()))
                .collect();
            assert_eq!(mats.len(), 2 * n);
            assert_eq!(rank(&Matrix::from_rows(mats).unwrap()), 2 * n, "n = {n}");
        }
    }

    #[test]
    fn inner_parameters_match_adjoint() {
        let n = 8;
        let g = nil(n);
        let p = DerivationParams::zero(n)
            .with(Slot::C(3), q(2))
            .with(Slot::C(1), q(-1))
            .with(Slot::D(1), q(5))
            .with(Slot::D(4), q(3))
            .with(Slot::B(n - 3), q(-2));
        let d = build_derivation(&p).unwrap();
        assert!(is_inner(&g, &d));
        assert!(canonical_outer(n, &d).unwrap().derivation.is_zero());
    }

    #[test]
    fn canonical_outer_examples() {
        let n = 8;
        let d = build_derivation(&DerivationParams::unit(n, Slot::D(1)).with(Slot::D(1), q(5))).unwrap();
        assert!(canonical_outer(n, &d).unwrap().derivation.is_zero());
        let diag = build_derivation(&DerivationParams::unit(n, Slot::C(n - 1))).unwrap();
        let out = canonical_outer(n, &diag).unwrap();
        assert_eq!(out.derivation, diag);
        assert!(is_zero_vector(&out.inner));
        assert_eq!(
            canonical_outer(n, &Matrix::identity(n)),
            Err(Error::NotADerivation)
        );
    }

    #[test]
    fn automorphism_examples() {
        assert_eq!(
            build_automorphism(&AutomorphismParams::identity(7)).unwrap(),
            Matrix::identity(7)
        );
        let phi = build_automorphism(&AutomorphismParams::scaling(7, q(1), q(2))).unwrap();
        assert_eq!(phi.get(4, 4), &qf(1, 4));
        let mut p = AutomorphismParams::identity(8);
        p.lambda = q(3);
        let phi = build_automorphism(&p).unwrap();
        let mut col = zero_vector(8);
        col[6] = q(1);
        col[3] = q(3);
        assert_eq!(phi.column(6), col);
        assert_eq!(
            build_automorphism(&AutomorphismParams::scaling(7, q(0), q(1))),
            Err(Error::SingularParams)
        );
    }

    #[test]
    fn swap_is_not_automorphism() {
        let g = nil(7);
        let mut sigma: Vec<usize> = (0..7).collect();
        sigma.swap(0, 1);
        assert!(!is_automorphism(&g, &crate::catalog::permutation_matrix(&sigma)));
        assert!(is_automorphism(&g, &Matrix::identity(7)));
    }

    #[test]
    fn general_automorphism_and_mu() {
        for n in 6..=9 {
            let mut p = AutomorphismParams::scaling(n, q(2), qf(-1, 3));
            p.lambda = q(5);
            p.mu = q(7);
            p.psi.insert(1, q(1));
            p.psi.insert(3, qf(2, 5));
            p.phi.insert(2, q(-4));
            for k in 1..=n - 3 {
                p.rho.insert(k, q(k as i64));
            }
            let phi = build_automorphism(&p).unwrap();
            assert!(is_automorphism(&nil(n), &phi), "n = {n}");
        }
    }

    #[test]
    fn conjugation_examples() {
        let n = 8;
        let d = build_derivation(
            &DerivationParams::zero(n)
                .with(Slot::D(n - 1), q(5))
                .with(Slot::C(n - 1), q(2))
                .with(Slot::D(n), q(1)),
        )
        .unwrap();
        assert_eq!(conjugate(&Matrix::identity(n), &d).unwrap(), d);
        // Φ(e_n) = e_n + t e_{n-1}, Φ(e_{n-1}) = e_{n-1} + t e_4 with t = -5
        let mut p = AutomorphismParams::identity(n);
        p.lambda = q(-5);
        let phi = build_automorphism(&p).unwrap();
        let c = conjugate(&phi, &d).unwrap();
        assert!(is_derivation(&nil(n), &c));
        let out = canonical_outer(n, &c).unwrap().derivation;
        assert!(out.get(n - 2, n - 1).is_zero());
        assert!(out.get(3, n - 2).is_zero());
    }

    #[test]
    fn params_round_trip() {
        let n = 9;
        let p = DerivationParams::zero(n)
            .with(Slot::B(4), qf(1, 2))
            .with(Slot::C(n - 1), q(3))
            .with(Slot::D(2), q(-1));
        let d = build_derivation(&p).unwrap();
        assert_eq!(DerivationParams::from_matrix(n, &d).unwrap(), p);
        let s = p.to_json_string();
        assert_eq!(DerivationParams::from_json_str(&s).unwrap(), p);
        assert!(matches!(
            DerivationParams::from_json_str(r#"{"n":9,"b":{"3":"1"}}"#),
            Err(Error::InvalidIndexSet(_))
        ));
        assert_eq!(
            DerivationParams::from_matrix(n, &Matrix::identity(n)),
            Err(Error::NotADerivation)
        );
    }

    #[test]
    fn nilradical_checks() {
        let s = make_extension(&ExtensionSpec::new(Family::S_N1_1, 8).with_param("beta", q(2))).unwrap();
        assert_eq!(verify_nilradical(&s, 8), Ok(true));
        assert_eq!(verify_nilradical(&s, 5), Ok(false));
        assert_eq!(verify_nilradical(&nil(8), 8), Ok(true));
        let h = LieAlgebra::from_sparse(
            vec!["x".into(), "y".into(), "z".into()],
            &[(1, 2, vec![(3, q(1))])],
        )
        .unwrap();
        assert_eq!(verify_nilradical(&h, 1), Err(Error::NotAnIdeal));
        let pair = make_extension(&ExtensionSpec::new(Family::S_N2, 8)).unwrap();
        assert_eq!(verify_nilradical(&pair, 8), Ok(true));
        let s7 = make_extension(&ExtensionSpec::new(Family::S7, 5)).unwrap();
        assert_eq!(verify_nilradical(&s7, 5), Ok(true));
    }

    #[test]
    fn pencil_detection() {
        let a = Matrix::diagonal(&[q(1), q(1)]);
        let b = Matrix::diagonal(&[q(1), q(2)]);
        assert!(!pencil_has_nilpotent(&a, &b).unwrap());
        // b - a is nilpotent on the first coordinate only; b - 2a is not nilpotent
        let c = Matrix::diagonal(&[q(2), q(2)]);
        assert!(pencil_has_nilpotent(&a, &c).unwrap());
        let nilp = Matrix::from_i64(&[&[0, 1], &[0, 0]]);
        assert!(pencil_has_nilpotent(&nilp, &a).unwrap());
    }

    #[test]
    fn gcd_basics() {
        // (x-1)(x-2) and (x-1)(x+3)
        let p = vec![q(2), q(-3), q(1)];
        let r = vec![q(-3), q(2), q(1)];
        assert_eq!(poly_gcd(&p, &r), vec![q(-1), q(1)]);
        assert_eq!(poly_gcd(&[q(2)], &[q(0), q(1)]), vec![q(1)]);
        assert!(poly_gcd(&[], &[]).is_empty());
    }
}
