//! Constructors for the nilradicals and every solvable extension in the
//! classification tables.
//!
//! Extensions are stored as f-action matrices on the nilradical in the
//! flag-adapted `e` basis: column `j` of an action matrix holds `[f, e_j]`.
//! The `x` basis is obtained from the `e` basis by a permutation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::linear::{
    format_rational, parse_rational, power_class_representative, q, qf, unit_vector, zero_vector,
    Matrix, Rational, Vector,
};

#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    N_N3,
    N_M1,
    N_53,
    S_N1_1,
    S_N1_2,
    S_N1_3,
    S_N1_4,
    S_N1_5,
    S_N1_6,
    S_N1_7,
    S_N1_8,
    S_N1_9,
    S_N2,
    SW_M1_1,
    SW_M1_2,
    SW_M1_3,
    SW_M1_4,
    SW_M1_5,
    SW_M1_6,
    SW_M2,
    /// Extra family of the six-dimensional nilradical (also written `s_{7,10}`).
    S6_10,
    S6_1,
    S6_2,
    S6_4,
    S6_5,
    S6P_6,
    S6_7,
    S6P_8,
    S6P_9,
    S7,
}

use Family::*;

const TOKENS: &[(Family, &str)] = &[
    (N_N3, "n_n3"),
    (N_M1, "n_m1"),
    (N_53, "n_53"),
    (S_N1_1, "s_n1_1"),
    (S_N1_2, "s_n1_2"),
    (S_N1_3, "s_n1_3"),
    (S_N1_4, "s_n1_4"),
    (S_N1_5, "s_n1_5"),
    (S_N1_6, "s_n1_6"),
    (S_N1_7, "s_n1_7"),
    (S_N1_8, "s_n1_8"),
    (S_N1_9, "s_n1_9"),
    (S_N2, "s_n2"),
    (SW_M1_1, "sw_m1_1"),
    (SW_M1_2, "sw_m1_2"),
    (SW_M1_3, "sw_m1_3"),
    (SW_M1_4, "sw_m1_4"),
    (SW_M1_5, "sw_m1_5"),
    (SW_M1_6, "sw_m1_6"),
    (SW_M2, "sw_m2"),
    (S6_10, "s6_10"),
    (S6_1, "s6_1"),
    (S6_2, "s6_2"),
    (S6_4, "s6_4"),
    (S6_5, "s6_5"),
    (S6P_6, "s6p_6"),
    (S6_7, "s6_7"),
    (S6P_8, "s6p_8"),
    (S6P_9, "s6p_9"),
    (S7, "s7"),
];

impl Family {
    pub fn all() -> impl Iterator<Item = Family> {
        TOKENS.iter().map(|(f, _)| *f)
    }

    pub fn token(self) -> &'static str {
        TOKENS.iter().find(|(f, _)| *f == self).map(|(_, t)| *t).expect("every family has a token")
    }

    /// Number of non-nilpotent generators adjoined to the nilradical.
    pub fn extra_generators(self) -> usize {
        match self {
            N_N3 | N_M1 | N_53 => 0,
            S_N2 | SW_M2 | S7 => 2,
            _ => 1,
        }
    }

    pub fn is_nilradical(self) -> bool {
        self.extra_generators() == 0
    }

    /// Families whose nilradical is the filiform algebra with `[y_k, y_m] = y_{k-1}`.
    pub fn is_filiform_based(self) -> bool {
        matches!(
            self,
            N_M1 | SW_M1_1 | SW_M1_2 | SW_M1_3 | SW_M1_4 | SW_M1_5 | SW_M1_6 | SW_M2
        )
    }

    /// The dedicated five-dimensional list.
    pub fn is_dim5_list(self) -> bool {
        matches!(self, S6_1 | S6_2 | S6_4 | S6_5 | S6P_6 | S6_7 | S6P_8 | S6P_9 | S7)
    }

    /// Families defined uniformly for every `n >= 6`.
    pub fn is_generic(self) -> bool {
        matches!(
            self,
            S_N1_1 | S_N1_2 | S_N1_3 | S_N1_4 | S_N1_5 | S_N1_6 | S_N1_7 | S_N1_8 | S_N1_9 | S_N2
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "s7_10" {
            return Ok(S6_10);
        }
        TOKENS
            .iter()
            .find(|(_, tok)| *tok == t)
            .map(|(f, _)| *f)
            .ok_or_else(|| Error::Parse(format!("unknown family token {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum BasisKind {
    X,
    #[default]
    E,
}

impl BasisKind {
    pub fn token(self) -> &'static str {
        match self {
            BasisKind::X => "x",
            BasisKind::E => "e",
        }
    }
}

impl FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "x" => Ok(BasisKind::X),
            "e" => Ok(BasisKind::E),
            other => Err(Error::Parse(format!("unknown basis {other:?}; expected x or e"))),
        }
    }
}

/// A family token with its dimension and parameters.
///
/// `n` is the dimension of the nilradical (`m` for the filiform-based
/// families). Parameter names are `beta`, `alpha`, `epsilon` and `a2`, `a3`, ...
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionSpec {
    pub family: Family,
    pub n: usize,
    pub params: BTreeMap<String, Rational>,
    pub basis: BasisKind,
}

impl ExtensionSpec {
    pub fn new(family: Family, n: usize) -> Self {
        ExtensionSpec {
            family,
            n,
            params: BTreeMap::new(),
            basis: BasisKind::E,
        }
    }

    pub fn with_param(mut self, name: &str, value: Rational) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn with_basis(mut self, basis: BasisKind) -> Self {
        self.basis = basis;
        self
    }

    pub fn param(&self, name: &str) -> Option<&Rational> {
        self.params.get(name)
    }

    fn required(&self, name: &str) -> Result<Rational> {
        self.param(name).cloned().ok_or_else(|| {
            Error::InvalidParams(format!("{} requires parameter {name}", self.family))
        })
    }

    /// `a_2 .. a_last`, missing entries read as zero.
    pub fn a_vector(&self, first: usize, last: usize) -> Vec<Rational> {
        (first..=last)
            .map(|j| self.param(&format!("a{j}")).cloned().unwrap_or_else(Rational::zero))
            .collect()
    }

    fn allowed_params(&self) -> Vec<String> {
        let n = self.n;
        match self.family {
            S_N1_1 | S6_1 | SW_M1_1 => vec!["beta".into()],
            S_N1_6 => vec!["epsilon".into()],
            S6_10 => vec!["alpha".into()],
            S_N1_8 => (2..=n.saturating_sub(3)).map(|j| format!("a{j}")).collect(),
            SW_M1_6 => (3..n).map(|j| format!("a{j}")).collect(),
            _ => Vec::new(),
        }
    }

    /// Checks the dimension range and the parameter constraints of the family.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let fam = self.family;
        let too_small = |what: &'static str| Err(Error::DimensionTooSmall { what, n });
        if fam.is_filiform_based() {
            if n < 4 {
                return too_small("the filiform nilradical (m >= 4)");
            }
        } else if fam == N_N3 {
            if n < 5 {
                return too_small("the nilradical (n >= 5)");
            }
        } else if fam.is_generic() {
            if n < 6 {
                return too_small("the generic families (n >= 6; use the s6_* list for n = 5)");
            }
        } else if fam == S6_10 {
            if n != 6 {
                return Err(Error::InvalidParams(format!("s6_10 exists only for n = 6, got {n}")));
            }
        } else if (fam.is_dim5_list() || fam == N_53) && n != 5 {
            return Err(Error::InvalidParams(format!("{fam} exists only for n = 5, got {n}")));
        }

        let allowed = self.allowed_params();
        for name in self.params.keys() {
            if !allowed.contains(name) {
                return Err(Error::InvalidParams(format!(
                    "{fam} does not take parameter {name:?}"
                )));
            }
        }

        let nq = q(n as i64);
        match fam {
            S_N1_1 => {
                let beta = self.required("beta")?;
                let excluded = [q(0), qf(-1, 2), (&nq - q(5)) / q(2)];
                if excluded.contains(&beta) {
                    return Err(Error::InvalidParams(format!(
                        "s_n1_1 at n = {n} excludes beta = {}",
                        format_rational(&beta)
                    )));
                }
            }
            S6_1 => {
                let beta = self.required("beta")?;
                if beta.is_zero() || beta == qf(-1, 2) {
                    return Err(Error::InvalidParams(format!(
                        "s6_1 excludes beta = {}",
                        format_rational(&beta)
                    )));
                }
            }
            SW_M1_1 => {
                let beta = self.required("beta")?;
                let m = nq.clone();
                if beta.is_zero() || beta == &m - q(2) || beta == q(2) - &m {
                    return Err(Error::InvalidParams(format!(
                        "sw_m1_1 at m = {n} excludes beta = {}",
                        format_rational(&beta)
                    )));
                }
            }
            S_N1_6 => {
                let eps = self.required("epsilon")?;
                if !is_squarefree_integer(&eps) {
                    return Err(Error::InvalidParams(format!(
                        "epsilon must be a nonzero squarefree integer such as 1 or -1, got {}",
                        format_rational(&eps)
                    )));
                }
            }
            S6_10 => {
                if self.required("alpha")?.is_zero() {
                    return Err(Error::InvalidParams("s6_10 requires alpha != 0".into()));
                }
            }
            S_N1_8 => {
                let a = self.a_vector(2, n - 3);
                match a_pivot(&a, 2) {
                    None => {
                        return Err(Error::InvalidParams(
                            "s_n1_8 requires at least one nonzero a_j".into(),
                        ))
                    }
                    Some((j, v)) => {
                        let canon = power_class_representative(&v, (j - 1) as u32);
                        if canon != v {
                            return Err(Error::InvalidParams(format!(
                                "s_n1_8 leading parameter a{j} = {} is not normalized (expected {})",
                                format_rational(&v),
                                format_rational(&canon)
                            )));
                        }
                    }
                }
            }
            SW_M1_6
                if self.a_vector(3, n - 1).iter().all(Zero::is_zero) => {
                    return Err(Error::InvalidParams(
                        "sw_m1_6 requires at least one nonzero a_j".into(),
                    ));
                }
            _ => {}
        }
        Ok(())
    }

    /// Matrices of `ad f_a` restricted to the nilradical, in the `e` basis.
    pub fn actions(&self) -> Result<Vec<Matrix>> {
        self.validate()?;
        let n = self.n;
        let nq = q(n as i64);
        let half = qf(1, 2);
        let mut act = Action::new(n);
        let out = match self.family {
            N_N3 | N_M1 | N_53 => Vec::new(),
            S_N1_1 => vec![diagonal_action(n, &self.required("beta")?, &q(1))],
            S_N1_2 => vec![diagonal_action(n, &((&nq - q(5)) / q(2)), &q(1))],
            S_N1_3 => vec![diagonal_action(n, &q(0), &q(1))],
            S_N1_4 => vec![diagonal_action(n, &qf(-1, 2), &q(1))],
            S_N1_5 => vec![diagonal_action(n, &q(1), &q(0))],
            S_N1_6 => {
                let mut m = diagonal_action(n, &((&nq - q(4)) / q(2)), &q(1));
                m.set(n - 3, n - 1, self.required("epsilon")?);
                vec![m]
            }
            S_N1_7 => {
                act.put(1, 1, q(1));
                act.put(3, 3, q(1));
                act.put(3, 1, q(-1));
                for k in 4..=n - 2 {
                    act.put(k, k, q(3 - k as i64));
                }
                act.put(n - 1, 2, q(1));
                act.put(n, n, q(1));
                vec![act.0]
            }
            S_N1_8 => {
                let a = self.a_vector(2, n - 3);
                let aj = |j: usize| a[j - 2].clone();
                act.put(1, 1, q(1));
                act.put(2, 2, q(1));
                act.put(3, 3, half.clone());
                act.put(4, 4, q(1));
                act.put(4, 1, aj(3));
                for k in 5..=n - 2 {
                    act.put(k, k, q(1));
                    for l in 4..=k - 2 {
                        act.put(k, l, aj(k - l + 1));
                    }
                    act.put(k, 2, aj(k - 2));
                    act.put(k, 1, aj(k - 1));
                }
                act.put(n - 1, n - 1, half.clone());
                act.put(n - 1, 3, aj(2));
                vec![act.0]
            }
            S_N1_9 => {
                act.put(1, 1, q(3));
                act.put(2, 2, q(2));
                act.put(3, 3, q(2));
                act.put(3, 2, q(-1));
                for k in 4..=n - 2 {
                    act.put(k, k, q(5 - k as i64));
                }
                act.put(n - 1, n - 1, q(1));
                act.put(n - 1, 4, q(1));
                act.put(n, n, q(1));
                act.put(n, n - 1, q(1));
                vec![act.0]
            }
            S_N2 => vec![
                diagonal_action(n, &q(0), &q(1)),
                diagonal_action(n, &q(1), &q(0)),
            ],
            S6_10 => {
                act.put(1, 1, q(3));
                act.put(2, 2, q(2));
                act.put(3, 3, q(2));
                act.put(3, 2, q(-1));
                act.put(4, 4, q(1));
                act.put(5, 5, q(1));
                act.put(5, 4, q(1));
                act.put(6, 6, q(1));
                act.put(6, 5, q(1));
                act.put(6, 4, self.required("alpha")?);
                vec![act.0]
            }
            S6_1 => vec![diagonal_action(5, &self.required("beta")?, &q(1))],
            S6_2 => vec![diagonal_action(5, &q(0), &q(1))],
            S6_4 => vec![diagonal_action(5, &qf(-1, 2), &q(1))],
            S6_5 => vec![diagonal_action(5, &q(1), &q(0))],
            S6P_6 => {
                let mut m = diagonal_action(5, &half, &q(1));
                m.set(1, 4, q(1));
                vec![m]
            }
            S6_7 => {
                act.put(1, 1, q(1));
                act.put(3, 3, q(1));
                act.put(3, 1, q(-1));
                act.put(4, 2, q(1));
                act.put(5, 5, q(1));
                vec![act.0]
            }
            S6P_8 => {
                act.put(1, 1, q(2));
                act.put(2, 2, q(2));
                act.put(3, 3, q(1));
                act.put(4, 3, q(-1));
                act.put(4, 4, q(1));
                vec![act.0]
            }
            S6P_9 => {
                act.put(1, 1, q(3));
                act.put(2, 2, q(2));
                act.put(2, 3, q(-1));
                act.put(3, 3, q(2));
                act.put(4, 4, q(1));
                act.put(4, 5, q(1));
                act.put(5, 5, q(1));
                vec![act.0]
            }
            S7 => vec![
                diagonal_action(5, &q(0), &q(1)),
                diagonal_action(5, &q(1), &q(0)),
            ],
            SW_M1_1 => vec![filiform_diagonal(n, &q(1), &self.required("beta")?)],
            SW_M1_2 => vec![filiform_diagonal(n, &q(1), &q(0))],
            SW_M1_3 => vec![filiform_diagonal(n, &q(1), &(q(2) - &nq))],
            SW_M1_4 => vec![filiform_diagonal(n, &q(0), &q(1))],
            SW_M1_5 => {
                for k in 1..n {
                    act.put(k, k, q((n - k) as i64));
                }
                act.put(n, n, q(1));
                act.put(n, n - 1, q(1));
                vec![act.0]
            }
            SW_M1_6 => {
                let a = self.a_vector(3, n - 1);
                for k in 1..n {
                    act.put(k, k, q(1));
                    for l in 1..=k.saturating_sub(2) {
                        act.put(k, l, a[k - l + 1 - 3].clone());
                    }
                }
                vec![act.0]
            }
            SW_M2 => {
                let mut f2 = Action::new(n);
                for k in 1..n {
                    act.put(k, k, q(n as i64 - 1 - k as i64));
                    f2.put(k, k, q(1));
                }
                act.put(n, n, q(1));
                vec![act.0, f2.0]
            }
        };
        Ok(out)
    }

    pub fn to_json(&self) -> SpecJson {
        SpecJson {
            family: self.family.token().to_string(),
            n: self.n,
            params: self
                .params
                .iter()
                .map(|(k, v)| (k.clone(), format_rational(v)))
                .collect(),
            basis: self.basis.token().to_string(),
        }
    }

    pub fn from_json(json: &SpecJson) -> Result<Self> {
        let params = json
            .params
            .iter()
            .map(|(k, v)| Ok((k.clone(), parse_rational(v)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(ExtensionSpec {
            family: json.family.parse()?,
            n: json.n,
            params,
            basis: json.basis.parse()?,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let json: SpecJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&json)
    }
}

impl fmt::Display for ExtensionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(n={}", self.family, self.n)?;
        for (k, v) in &self.params {
            write!(f, ", {k}={}", format_rational(v))?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecJson {
    pub family: String,
    pub n: usize,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    #[serde(default = "default_basis")]
    pub basis: String,
}

fn default_basis() -> String {
    "e".into()
}

/// Action matrix filled with 1-based `put(j, k, c)`: `[f, e_j]` gains `c e_k`.
struct Action(Matrix);

impl Action {
    fn new(n: usize) -> Self {
        Action(Matrix::zeros(n, n))
    }

    fn put(&mut self, j: usize, k: usize, c: Rational) {
        let cur = self.0.get(k - 1, j - 1) + c;
        self.0.set(k - 1, j - 1, cur);
    }
}

fn is_squarefree_integer(x: &Rational) -> bool {
    !x.is_zero() && x.is_integer() && power_class_representative(x, 2) == *x
}

/// First nonzero entry at an even index, else the first nonzero at an odd
/// index. Indices are reported as `offset + position`.
pub(crate) fn a_pivot(a: &[Rational], offset: usize) -> Option<(usize, Rational)> {
    let find = |even: bool| {
        a.iter()
            .enumerate()
            .map(|(i, v)| (i + offset, v))
            .find(|(j, v)| (j % 2 == 0) == even && !v.is_zero())
            .map(|(j, v)| (j, v.clone()))
    };
    find(true).or_else(|| find(false))
}

/// Diagonal eigenvalues `λ_k` on `e_1..e_n` of the semisimple derivation with
/// `e_{n-1} -> c e_{n-1}` and `e_n -> d e_n`.
pub fn diagonal_weights(n: usize, c: &Rational, d: &Rational) -> Vector {
    let two = q(2);
    let mut w = zero_vector(n);
    w[0] = &two * c + d;
    w[1] = &two * c;
    w[2] = c + d;
    for k in 4..=n.saturating_sub(2) {
        w[k - 1] = &two * c + q(3 - k as i64) * d;
    }
    w[n - 2] = c.clone();
    w[n - 1] = d.clone();
    w
}

pub fn diagonal_action(n: usize, c: &Rational, d: &Rational) -> Matrix {
    Matrix::diagonal(&diagonal_weights(n, c, d))
}

fn filiform_diagonal(m: usize, alpha: &Rational, beta: &Rational) -> Matrix {
    let mut w: Vector = (1..m)
        .map(|k| q(m as i64 - k as i64 - 1) * alpha + beta)
        .collect();
    w.push(alpha.clone());
    Matrix::diagonal(&w)
}

/// `e_k = x_{σ(k)}`, 0-based. The permutation is an involution.
pub fn e_to_x_permutation(n: usize) -> Vec<usize> {
    let mut s: Vec<usize> = (0..n).collect();
    s.swap(1, 2);
    s.swap(n - 2, n - 1);
    s
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn generator_names(count: usize) -> Vec<String> {
    match count {
        0 => Vec::new(),
        1 => vec!["f".into()],
        c => (1..=c).map(|i| format!("f{i}")).collect(),
    }
}

/// Brackets of the nilradical in the original `x` basis.
fn nilradical_x(n: usize) -> Result<LieAlgebra> {
    let mut br = vec![(2, n, vec![(1, q(1))]), (3, n - 1, vec![(1, q(1))])];
    for k in 4..=n - 2 {
        br.push((k, n - 1, vec![(k - 1, q(1))]));
    }
    br.push((n - 1, n, vec![(2, q(1))]));
    LieAlgebra::from_sparse(names("x", n), &br)
}

/// Brackets of the nilradical in the flag-adapted `e` basis.
fn nilradical_e(n: usize) -> Result<LieAlgebra> {
    if n <= 6 {
        let p = permutation_matrix(&e_to_x_permutation(n));
        return nilradical_x(n)?.change_basis(&p)?.with_basis_names(names("e", n));
    }
    let mut br = vec![
        (2, n, vec![(1, q(1))]),
        (3, n - 1, vec![(1, q(1))]),
        (4, n, vec![(2, q(1))]),
    ];
    for k in 5..=n - 2 {
        br.push((k, n, vec![(k - 1, q(1))]));
    }
    br.push((n - 1, n, vec![(3, q(-1))]));
    LieAlgebra::from_sparse(names("e", n), &br)
}

fn filiform(m: usize, prefix: &str) -> Result<LieAlgebra> {
    let br: Vec<_> = (2..m).map(|k| (k, m, vec![(k - 1, q(1))])).collect();
    LieAlgebra::from_sparse(names(prefix, m), &br)
}

/// Column `j` is the unit vector `σ(j)`.
pub fn permutation_matrix(sigma: &[usize]) -> Matrix {
    let n = sigma.len();
    let cols: Vec<Vector> = sigma.iter().map(|&s| unit_vector(n, s)).collect();
    Matrix::from_columns(n, &cols).expect("square")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NilradicalKind {
    N3,
    M1,
    Dim5,
}

pub fn make_nilradical(kind: NilradicalKind, n: usize, basis: BasisKind) -> Result<LieAlgebra> {
    match kind {
        NilradicalKind::N3 => {
            if n < 5 {
                return Err(Error::DimensionTooSmall {
                    what: "the nilradical (n >= 5)",
                    n,
                });
            }
            match basis {
                BasisKind::X => nilradical_x(n),
                BasisKind::E => nilradical_e(n),
            }
        }
        NilradicalKind::Dim5 => {
            if n != 5 {
                return Err(Error::InvalidParams(format!(
                    "the five-dimensional nilradical has n = 5, got {n}"
                )));
            }
            make_nilradical(NilradicalKind::N3, 5, basis)
        }
        NilradicalKind::M1 => {
            if n < 4 {
                return Err(Error::DimensionTooSmall {
                    what: "the filiform nilradical (m >= 4)",
                    n,
                });
            }
            filiform(n, if basis == BasisKind::X { "y" } else { "e" })
        }
    }
}

/// Nilradical underlying a family.
pub fn nilradical_of(spec: &ExtensionSpec, basis: BasisKind) -> Result<LieAlgebra> {
    let kind = if spec.family.is_filiform_based() {
        NilradicalKind::M1
    } else {
        NilradicalKind::N3
    };
    make_nilradical(kind, spec.n, basis)
}

/// Builds the full algebra: nilradical basis first, then `f` (or `f1`, `f2`),
/// with `[f_a, f_b] = 0`.
pub fn make_extension(spec: &ExtensionSpec) -> Result<LieAlgebra> {
    let actions = spec.actions()?;
    let nil = nilradical_of(spec, BasisKind::E)?;
    let e_alg = extend(&nil, &actions, generator_names(actions.len()))?;
    if spec.basis == BasisKind::E || spec.family.is_filiform_based() {
        return if spec.basis == BasisKind::X && spec.family.is_filiform_based() {
            let mut n = names("y", spec.n);
            n.extend(generator_names(actions.len()));
            e_alg.with_basis_names(n)
        } else {
            Ok(e_alg)
        };
    }
    let n = spec.n;
    let mut sigma = e_to_x_permutation(n);
    sigma.extend(n..n + actions.len());
    let mut x_names = names("x", n);
    x_names.extend(generator_names(actions.len()));
    e_alg.change_basis(&permutation_matrix(&sigma))?.with_basis_names(x_names)
}

/// Semidirect sum of `nil` with generators acting by the given matrices.
pub fn extend(nil: &LieAlgebra, actions: &[Matrix], gen_names: Vec<String>) -> Result<LieAlgebra> {
    let n = nil.dim();
    let total = n + actions.len();
    let mut triples = Vec::new();
    let pad = |v: &[Rational]| {
        let mut out = v.to_vec();
        out.resize(total, Rational::zero());
        out
    };
    for (i, j) in nil.brackets().keys() {
        triples.push((*i, *j, pad(nil.basis_bracket(*i, *j))));
    }
    for (a, m) in actions.iter().enumerate() {
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: m.rows(),
            });
        }
        for j in 0..n {
            let col = m.column(j);
            triples.push((n + a, j, pad(&col)));
        }
    }
    let mut all_names = nil.basis_names().to_vec();
    all_names.extend(gen_names);
    LieAlgebra::new(all_names, triples)
}

/// Sample parameters used by [`enumerate_specs`].
#[derive(Clone, Debug)]
pub struct SampleParams {
    pub betas: Vec<Rational>,
    pub epsilons: Vec<Rational>,
    pub a_vectors: Vec<Vec<Rational>>,
    pub alpha: Rational,
}

impl Default for SampleParams {
    fn default() -> Self {
        SampleParams {
            betas: vec![q(2), q(-3)],
            epsilons: vec![q(1), q(-1)],
            a_vectors: vec![vec![q(1)], vec![q(0), q(1)]],
            alpha: q(3),
        }
    }
}

/// One spec per family valid at `n`, instantiated with the sample parameters.
///
/// `s_n1_1` gets one spec per admissible sample `beta` (topped up to two when
/// a sample hits an excluded value), `s_n1_6` one per `epsilon`, `s_n1_8` one
/// per `a`-vector.
pub fn enumerate_specs(n: usize, sample: &SampleParams) -> Vec<ExtensionSpec> {
    let mut out = Vec::new();
    if n == 5 {
        let beta = sample.betas.first().cloned().unwrap_or_else(|| q(2));
        out.push(ExtensionSpec::new(S6_1, 5).with_param("beta", beta));
        for fam in [S6_2, S6_4, S6_5, S6P_6, S6_7, S6P_8, S6P_9, S7] {
            out.push(ExtensionSpec::new(fam, 5));
        }
        return out;
    }
    if n < 6 {
        return out;
    }
    let valid = |s: &ExtensionSpec| s.validate().is_ok();

    let mut betas: Vec<ExtensionSpec> = sample
        .betas
        .iter()
        .map(|b| ExtensionSpec::new(S_N1_1, n).with_param("beta", b.clone()))
        .filter(valid)
        .collect();
    for extra in 3..10 {
        if betas.len() >= 2 {
            break;
        }
        let s = ExtensionSpec::new(S_N1_1, n).with_param("beta", q(extra));
        if valid(&s) && !betas.contains(&s) {
            betas.push(s);
        }
    }
    out.extend(betas);
    for fam in [S_N1_2, S_N1_3, S_N1_4, S_N1_5] {
        out.push(ExtensionSpec::new(fam, n));
    }
    for eps in &sample.epsilons {
        let s = ExtensionSpec::new(S_N1_6, n).with_param("epsilon", eps.clone());
        if valid(&s) {
            out.push(s);
        }
    }
    out.push(ExtensionSpec::new(S_N1_7, n));
    for a in &sample.a_vectors {
        let mut s = ExtensionSpec::new(S_N1_8, n);
        for (i, v) in a.iter().enumerate() {
            let j = i + 2;
            if j <= n - 3 && !v.is_zero() {
                s = s.with_param(&format!("a{j}"), v.clone());
            }
        }
        if valid(&s) {
            out.push(s);
        }
    }
    out.push(ExtensionSpec::new(S_N1_9, n));
    out.push(ExtensionSpec::new(S_N2, n));
    if n == 6 {
        out.push(ExtensionSpec::new(S6_10, 6).with_param("alpha", sample.alpha.clone()));
    }
    out
}

/// Specs of every extension of the filiform nilradical of dimension `m`.
pub fn enumerate_filiform_specs(m: usize, sample: &SampleParams) -> Vec<ExtensionSpec> {
    if m < 4 {
        return Vec::new();
    }
    let mut out: Vec<ExtensionSpec> = sample
        .betas
        .iter()
        .map(|b| ExtensionSpec::new(SW_M1_1, m).with_param("beta", b.clone()))
        .filter(|s| s.validate().is_ok())
        .collect();
    for fam in [SW_M1_2, SW_M1_3, SW_M1_4, SW_M1_5] {
        out.push(ExtensionSpec::new(fam, m));
    }
    for a in &sample.a_vectors {
        let mut s = ExtensionSpec::new(SW_M1_6, m);
        for (i, v) in a.iter().enumerate() {
            let j = i + 3;
            if j < m && !v.is_zero() {
                s = s.with_param(&format!("a{j}"), v.clone());
            }
        }
        if s.validate().is_ok() {
            out.push(s);
        }
    }
    out.push(ExtensionSpec::new(SW_M2, m));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{SeriesProfile, Subspace};

    fn n3(n: usize, basis: BasisKind) -> LieAlgebra {
        make_nilradical(NilradicalKind::N3, n, basis).unwrap()
    }

    fn bracket_set(g: &LieAlgebra) -> Vec<(usize, usize, Vec<(usize, Rational)>)> {
        g.brackets()
            .iter()
            .map(|((i, j), t)| (i + 1, j + 1, t.iter().map(|(k, c)| (k + 1, c.clone())).collect()))
            .collect()
    }

    #[test]
    fn e_basis_table_n8() {
        let g = n3(8, BasisKind::E);
        assert_eq!(
            bracket_set(&g),
            vec![
                (2, 8, vec![(1, q(1))]),
                (3, 7, vec![(1, q(1))]),
                (4, 8, vec![(2, q(1))]),
                (5, 8, vec![(4, q(1))]),
                (6, 8, vec![(5, q(1))]),
                (7, 8, vec![(3, q(-1))]),
            ]
        );
    }

    #[test]
    fn e_basis_table_n5() {
        let g = n3(5, BasisKind::E);
        assert_eq!(
            bracket_set(&g),
            vec![
                (2, 5, vec![(1, q(1))]),
                (3, 4, vec![(1, q(1))]),
                (4, 5, vec![(3, q(-1))]),
            ]
        );
        assert_eq!(make_nilradical(NilradicalKind::Dim5, 5, BasisKind::E).unwrap(), g);
    }

    #[test]
    fn relabeling_matches_table_for_all_n() {
        for n in 6..=12 {
            let p = permutation_matrix(&e_to_x_permutation(n));
            let relabeled = n3(n, BasisKind::X)
                .change_basis(&p)
                .unwrap()
                .with_basis_names(names("e", n))
                .unwrap();
            assert_eq!(relabeled, n3(n, BasisKind::E), "n = {n}");
        }
    }

    #[test]
    fn filiform_m6() {
        let g = make_nilradical(NilradicalKind::M1, 6, BasisKind::X).unwrap();
        assert_eq!(g.brackets().len(), 4);
        assert_eq!(g.series_profile().cs, vec![6, 4, 3, 2, 1, 0]);
    }

    #[test]
    fn too_small() {
        assert!(matches!(
            make_nilradical(NilradicalKind::N3, 4, BasisKind::E),
            Err(Error::DimensionTooSmall { .. })
        ));
        assert!(matches!(
            make_nilradical(NilradicalKind::M1, 3, BasisKind::E),
            Err(Error::DimensionTooSmall { .. })
        ));
    }

    #[test]
    fn nilradical_series() {
        assert_eq!(n3(5, BasisKind::E).series_profile().cs, vec![5, 2, 1, 0]);
        for n in 6..=12 {
            let g = n3(n, BasisKind::E);
            assert!(g.check_jacobi().is_ok());
            let p = g.series_profile();
            assert_eq!(p.cs.len(), n - 2);
            assert_eq!(p.cs[p.cs.len() - 2], 1);
            assert_eq!(g.center().dim(), 1);
        }
    }

    #[test]
    fn documented_examples() {
        let s4 = make_extension(&ExtensionSpec::new(S_N1_4, 8)).unwrap();
        // f is basis index 8, e_3 is index 2
        assert_eq!(s4.structure_constant(8, 2, 2), &qf(1, 2));
        let s2 = make_extension(&ExtensionSpec::new(S_N2, 8)).unwrap();
        for k in 4..=6 {
            assert_eq!(s2.structure_constant(8, k - 1, k - 1), &q(3 - k as i64));
        }
        let s10 = make_extension(&ExtensionSpec::new(S6_10, 6).with_param("alpha", q(3))).unwrap();
        assert_eq!(s10.basis_bracket(6, 5), &vec![q(0), q(0), q(0), q(3), q(1), q(1), q(0)]);
    }

    #[test]
    fn parameter_constraints() {
        let bad = ExtensionSpec::new(S_N1_1, 8).with_param("beta", q(0));
        assert!(matches!(make_extension(&bad), Err(Error::InvalidParams(_))));
        let bad = ExtensionSpec::new(S_N1_1, 9).with_param("beta", q(2));
        assert!(bad.validate().is_err());
        assert!(ExtensionSpec::new(S6_10, 6).with_param("alpha", q(0)).validate().is_err());
        assert!(ExtensionSpec::new(S_N1_8, 8).validate().is_err());
        assert!(ExtensionSpec::new(S_N1_8, 8).with_param("a2", q(2)).validate().is_err());
        assert!(ExtensionSpec::new(S_N1_8, 8).with_param("a3", q(-1)).validate().is_ok());
        assert!(ExtensionSpec::new(S_N1_8, 8).with_param("a3", q(2)).validate().is_ok());
        assert!(ExtensionSpec::new(S_N1_8, 8).with_param("a3", q(4)).validate().is_err());
        assert!(ExtensionSpec::new(S_N1_6, 8).with_param("epsilon", q(4)).validate().is_err());
        assert!(ExtensionSpec::new(S_N1_7, 8).with_param("beta", q(1)).validate().is_err());
        assert!(ExtensionSpec::new(S6_7, 6).validate().is_err());
    }

    #[test]
    fn generic_families_pass_jacobi_and_series() {
        for n in 7..=10 {
            for spec in enumerate_specs(n, &SampleParams::default()) {
                let g = make_extension(&spec).unwrap();
                assert!(g.check_jacobi().is_ok(), "{spec}");
                let nil = Subspace::coordinate(g.dim(), 0..n);
                assert!(g.is_ideal(&nil), "{spec}");
            }
            let p = |f: Family| make_extension(&ExtensionSpec::new(f, n)).unwrap().series_profile();
            assert_eq!(p(S_N1_2), SeriesProfile::new(&[n + 1, n - 1, n - 4, 0], &[n + 1, n - 1], &[0]));
            assert_eq!(p(S_N1_4), SeriesProfile::new(&[n + 1, n, n - 3, 0], &[n + 1, n], &[1]));
            assert_eq!(p(S_N1_5), SeriesProfile::new(&[n + 1, n - 1, 1, 0], &[n + 1, n - 1], &[0]));
        }
    }

    #[test]
    fn dim5_list_series() {
        let expect: &[(Family, &[usize], &[usize], &[usize])] = &[
            (S6_2, &[6, 3, 0], &[6, 3], &[0]),
            (S6_4, &[6, 5, 2, 0], &[6, 5], &[1]),
            (S6_5, &[6, 4, 1, 0], &[6, 4], &[0]),
            (S6P_6, &[6, 5, 2, 0], &[6, 5], &[0]),
            (S6_7, &[6, 4, 1, 0], &[6, 4, 3], &[0]),
            (S6P_8, &[6, 4, 1, 0], &[6, 4], &[0]),
            (S6P_9, &[6, 5, 2, 0], &[6, 5], &[0]),
            (S7, &[7, 5, 2, 0], &[7, 5], &[0]),
        ];
        for (fam, ds, cs, us) in expect {
            let g = make_extension(&ExtensionSpec::new(*fam, 5)).unwrap();
            assert!(g.check_jacobi().is_ok(), "{fam}");
            assert_eq!(g.series_profile(), SeriesProfile::new(ds, cs, us), "{fam}");
        }
        let s1 = make_extension(&ExtensionSpec::new(S6_1, 5).with_param("beta", q(2))).unwrap();
        assert!(s1.check_jacobi().is_ok());
        assert_eq!(s1.series_profile(), SeriesProfile::new(&[6, 5, 2, 0], &[6, 5], &[0]));
    }

    #[test]
    fn extra_dim6_family() {
        let g = make_extension(&ExtensionSpec::new(S6_10, 6).with_param("alpha", q(3))).unwrap();
        assert!(g.check_jacobi().is_ok());
        assert_eq!(g.series_profile(), SeriesProfile::new(&[7, 6, 3, 0], &[7, 6], &[0]));
        for spec in enumerate_specs(6, &SampleParams::default()) {
            assert!(make_extension(&spec).unwrap().check_jacobi().is_ok(), "{spec}");
        }
    }

    #[test]
    fn filiform_families() {
        for m in 4..=8 {
            for spec in enumerate_filiform_specs(m, &SampleParams::default()) {
                let g = make_extension(&spec).unwrap();
                assert!(g.check_jacobi().is_ok(), "{spec}");
            }
            let p = |f: Family| make_extension(&ExtensionSpec::new(f, m)).unwrap().series_profile();
            assert_eq!(p(SW_M1_2), SeriesProfile::new(&[m + 1, m - 1, m - 3, 0], &[m + 1, m - 1], &[0]));
            assert_eq!(p(SW_M1_3), SeriesProfile::new(&[m + 1, m, m - 2, 0], &[m + 1, m], &[1]));
            assert_eq!(p(SW_M1_4), SeriesProfile::new(&[m + 1, m - 1, 0], &[m + 1, m - 1], &[0]));
            assert_eq!(p(SW_M2), SeriesProfile::new(&[m + 2, m, m - 2, 0], &[m + 2, m], &[0]));
        }
    }

    #[test]
    fn a2_term_on_e4_is_not_a_derivation() {
        let n = 8;
        let spec = ExtensionSpec::new(S_N1_8, n).with_param("a2", q(1));
        let mut m = spec.actions().unwrap().remove(0);
        assert!(extend(&n3(n, BasisKind::E), &[m.clone()], vec!["f".into()])
            .unwrap()
            .check_jacobi()
            .is_ok());
        // adding a2 e_2 to [f, e_4] breaks the Jacobi identity
        m.set(1, 3, q(1));
        assert!(!extend(&n3(n, BasisKind::E), &[m], vec!["f".into()])
            .unwrap()
            .check_jacobi()
            .is_ok());
    }

    #[test]
    fn second_dim5_generator_must_kill_e5() {
        let nil = n3(5, BasisKind::E);
        let bad = Matrix::diagonal(&[q(2), q(2), q(1), q(1), q(1)]);
        let g = extend(&nil, &[bad], vec!["f".into()]).unwrap();
        assert!(!g.check_jacobi().is_ok());
    }

    #[test]
    fn counts_per_dimension() {
        let s = SampleParams::default();
        assert_eq!(enumerate_specs(5, &s).len(), 9);
        assert_eq!(enumerate_specs(8, &s).len(), 13);
        assert!(enumerate_specs(6, &s).iter().any(|x| x.family == S6_10));
        // beta = 2 is excluded at n = 9; a replacement keeps two samples
        let n9 = enumerate_specs(9, &s);
        assert_eq!(n9.iter().filter(|x| x.family == S_N1_1).count(), 2);
    }

    #[test]
    fn dim5_two_and_three_coincide() {
        // at n = 5 the beta values of the second and third family agree
        assert_eq!(
            diagonal_action(5, &q(0), &q(1)),
            diagonal_action(5, &((q(5) - q(5)) / q(2)), &q(1))
        );
        let s = make_extension(&ExtensionSpec::new(S6_2, 5)).unwrap();
        assert_eq!(s.series_profile(), SeriesProfile::new(&[6, 3, 0], &[6, 3], &[0]));
    }

    #[test]
    fn x_basis_is_isomorphic_relabeling() {
        let spec = ExtensionSpec::new(S_N1_9, 8);
        let e = make_extension(&spec).unwrap();
        let x = make_extension(&spec.clone().with_basis(BasisKind::X)).unwrap();
        assert_eq!(e.series_profile(), x.series_profile());
        assert!(x.check_jacobi().is_ok());
        assert_eq!(x.basis_names()[0], "x1");
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = ExtensionSpec::new(S_N1_4, 8).with_param("beta", qf(-1, 2));
        let s = spec.to_json_string();
        assert_eq!(s, r#"{"family":"s_n1_4","n":8,"params":{"beta":"-1/2"},"basis":"e"}"#);
        assert_eq!(ExtensionSpec::from_json_str(&s).unwrap(), spec);
        assert_eq!("s7_10".parse::<Family>().unwrap(), S6_10);
        assert!("nope".parse::<Family>().is_err());
    }
}
