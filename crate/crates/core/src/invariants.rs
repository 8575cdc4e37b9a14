//! Invariants of the coadjoint representation.
//!
//! Expressions are finite sums `Σ_q L^q Σ_t c_t · Π r_i^{s_i} · Π B_j^{r_j}`
//! with `L = ln(log_base)`, rational constants `r_i` under fractional
//! exponents, and primitive polynomial bases `B_j` with rational exponents.
//! Operators act by the chain rule. The zero test groups the terms of each
//! `L`-grade by the fractional parts of their exponents and checks that each
//! group, after clearing the common power product, is the zero polynomial.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::LieAlgebra;
use crate::catalog::{BasisKind, ExtensionSpec, Family};
use crate::error::{Error, Result};
use crate::linear::{
    format_rational, parse_rational, q, qf, rank, rational_root, Matrix, Rational, Vector,
};
use crate::poly::{indexed_names, MultiPoly, PolyJson};

/// One summand `coefficient · ∂/∂x_{target_index}` of a coadjoint operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorTerm {
    pub target_index: usize,
    pub coefficient: MultiPoly,
}

/// `X̂_k = x_a c^a_{kb} ∂/∂x_b` for the basis element `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoadjointOperator {
    pub generator: usize,
    pub terms: Vec<OperatorTerm>,
}

impl CoadjointOperator {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn apply_poly(&self, p: &MultiPoly) -> MultiPoly {
        self.terms.iter().fold(MultiPoly::zero(p.vars()), |acc, t| {
            acc.add(&t.coefficient.mul(&p.derivative(t.target_index)))
        })
    }

    /// Text form such as `-e1*d/de2 + e3*d/de7`.
    pub fn describe(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|t| format!("({})*d/d{}", t.coefficient, t.coefficient.vars()[t.target_index]))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// One operator per basis element, from the structure constants.
pub fn coadjoint_operators(g: &LieAlgebra) -> Vec<CoadjointOperator> {
    let vars = g.basis_names().to_vec();
    let n = g.dim();
    (0..n)
        .map(|k| {
            let terms = (0..n)
                .filter_map(|b| {
                    let coefficient = MultiPoly::from_terms(
                        &vars,
                        g.basis_bracket(k, b).iter().enumerate().map(|(a, c)| {
                            let mut e = vec![0; n];
                            e[a] = 1;
                            (e, c.clone())
                        }),
                    );
                    (!coefficient.is_zero()).then_some(OperatorTerm {
                        target_index: b,
                        coefficient,
                    })
                })
                .collect();
            CoadjointOperator { generator: k, terms }
        })
        .collect()
}

/// `coeff · Π radical_base^{exp} · Π base^{exp}` in normal form: primitive
/// distinct bases sorted, nonzero exponents, radicals with non-integer
/// exponents only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerProduct {
    pub coeff: Rational,
    pub radicals: Vec<(Rational, Rational)>,
    pub factors: Vec<(MultiPoly, Rational)>,
}

fn is_integer(r: &Rational) -> bool {
    r.is_integer()
}

fn int_exp(r: &Rational) -> i64 {
    r.to_integer().to_i64().expect("exponent fits in i64")
}

fn fract(r: &Rational) -> Rational {
    r - r.floor()
}

impl PowerProduct {
    pub fn constant(c: Rational) -> Self {
        PowerProduct {
            coeff: c,
            radicals: Vec::new(),
            factors: Vec::new(),
        }
    }

    /// Normalizes `coeff · Π radicals · Π factors`. Returns `None` when the
    /// product is zero; fails on a zero base with negative exponent.
    pub fn new(
        coeff: Rational,
        radicals: Vec<(Rational, Rational)>,
        factors: Vec<(MultiPoly, Rational)>,
    ) -> Result<Option<Self>> {
        let mut coeff = coeff;
        let mut rad: BTreeMap<Rational, Rational> = BTreeMap::new();
        let mut bases: BTreeMap<MultiPoly, Rational> = BTreeMap::new();
        for (b, e) in radicals {
            *rad.entry(b).or_insert_with(Rational::zero) += e;
        }
        for (p, e) in factors {
            if e.is_zero() {
                continue;
            }
            let (content, prim) = p.primitive();
            if content.is_zero() {
                if e.is_negative() {
                    return Err(Error::InadmissiblePoint("division by a zero polynomial".into()));
                }
                return Ok(None);
            }
            *rad.entry(content).or_insert_with(Rational::zero) += &e;
            if prim.as_constant().is_none() {
                *bases.entry(prim).or_insert_with(Rational::zero) += e;
            }
        }
        if coeff.is_zero() {
            return Ok(None);
        }
        let mut radicals = Vec::new();
        for (b, e) in rad {
            let whole = e.floor();
            coeff *= crate::derivations::qpow(&b, int_exp(&whole));
            let frac = e - whole;
            if frac.is_zero() {
                continue;
            }
            let den = frac.denom().to_u32().expect("small denominator");
            let powered = crate::derivations::qpow(&b, int_exp(&Rational::from_integer(frac.numer().clone())));
            match rational_root(&powered, den) {
                Some(r) => coeff *= r,
                None => radicals.push((b, frac)),
            }
        }
        let factors = bases.into_iter().filter(|(_, e)| !e.is_zero()).collect();
        Ok(Some(PowerProduct {
            coeff,
            radicals,
            factors,
        }))
    }

    fn exponent_of(&self, base: &MultiPoly) -> Rational {
        self.factors
            .iter()
            .find(|(b, _)| b == base)
            .map(|(_, e)| e.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Terms with equal keys differ by an integer power product.
    fn class_key(&self) -> (Vec<(Rational, Rational)>, Vec<(MultiPoly, Rational)>) {
        let fr = self
            .factors
            .iter()
            .filter(|(_, e)| !is_integer(e))
            .map(|(b, e)| (b.clone(), fract(e)))
            .collect();
        (self.radicals.clone(), fr)
    }
}

/// A sum of power products graded by powers of `L = ln(log_base)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantExpr {
    pub vars: Vec<String>,
    pub log_base: Option<MultiPoly>,
    pub log_terms: BTreeMap<u32, Vec<PowerProduct>>,
}

impl InvariantExpr {
    pub fn zero(vars: &[String]) -> Self {
        InvariantExpr {
            vars: vars.to_vec(),
            log_base: None,
            log_terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &[String], c: Rational) -> Self {
        let mut out = Self::zero(vars);
        out.push(0, PowerProduct::constant(c));
        out
    }

    pub fn from_poly(p: &MultiPoly) -> Self {
        let mut out = Self::zero(p.vars());
        out.push_factors(0, Rational::one(), vec![(p.clone(), Rational::one())])
            .expect("positive exponent");
        out
    }

    /// `coeff · Π base^exp` as an expression.
    pub fn product(vars: &[String], coeff: Rational, factors: Vec<(MultiPoly, Rational)>) -> Result<Self> {
        let mut out = Self::zero(vars);
        out.push_factors(0, coeff, factors)?;
        Ok(out)
    }

    pub fn with_log_base(mut self, base: MultiPoly) -> Self {
        self.log_base = Some(base);
        self
    }

    fn push(&mut self, q: u32, pp: PowerProduct) {
        self.log_terms.entry(q).or_default().push(pp);
    }

    /// Adds `L^q · coeff · Π base^exp`.
    pub fn push_factors(&mut self, q: u32, coeff: Rational, factors: Vec<(MultiPoly, Rational)>) -> Result<()> {
        if let Some(pp) = PowerProduct::new(coeff, Vec::new(), factors)? {
            self.push(q, pp);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.vars != other.vars {
            return Err(Error::VariableMismatch("sum of expressions over different variables".into()));
        }
        let mut out = self.clone();
        if out.log_base.is_none() {
            out.log_base = other.log_base.clone();
        }
        for (q, terms) in &other.log_terms {
            out.log_terms.entry(*q).or_default().extend(terms.iter().cloned());
        }
        out.normalize()
    }

    pub fn is_zero(&self) -> bool {
        self.log_terms.values().all(|t| t.is_empty())
    }

    pub fn has_log(&self) -> bool {
        self.log_terms.iter().any(|(q, t)| *q > 0 && !t.is_empty())
    }

    /// Variables that occur in some base (and in the log base if `L` occurs).
    pub fn used_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for t in self.log_terms.values().flatten() {
            for (b, _) in &t.factors {
                out.extend(b.used_variables());
            }
        }
        if self.has_log() {
            if let Some(b) = &self.log_base {
                out.extend(b.used_variables());
            }
        }
        out
    }

    /// Same expression over another coordinate list, matched by name.
    pub fn remap(&self, vars: &[String]) -> Result<Self> {
        let log_base = self.log_base.as_ref().map(|b| b.remap(vars)).transpose()?;
        let mut log_terms = BTreeMap::new();
        for (q, terms) in &self.log_terms {
            let mut v = Vec::new();
            for t in terms {
                let factors = t
                    .factors
                    .iter()
                    .map(|(b, e)| Ok((b.remap(vars)?, e.clone())))
                    .collect::<Result<Vec<_>>>()?;
                if let Some(pp) = PowerProduct::new(t.coeff.clone(), t.radicals.clone(), factors)? {
                    v.push(pp);
                }
            }
            log_terms.insert(*q, v);
        }
        Ok(InvariantExpr {
            vars: vars.to_vec(),
            log_base,
            log_terms,
        })
    }

    /// Merges each class of terms into a single power product and drops
    /// vanishing classes.
    pub fn normalize(&self) -> Result<Self> {
        let mut out = InvariantExpr {
            vars: self.vars.clone(),
            log_base: self.log_base.clone(),
            log_terms: BTreeMap::new(),
        };
        for (q, terms) in &self.log_terms {
            let mut groups: Vec<(_, Vec<&PowerProduct>)> = Vec::new();
            for t in terms {
                let key = t.class_key();
                match groups.iter_mut().find(|(k, _)| *k == key) {
                    Some((_, g)) => g.push(t),
                    None => groups.push((key, vec![t])),
                }
            }
            let mut merged = Vec::new();
            for ((radicals, _), group) in groups {
                let bases: BTreeSet<&MultiPoly> = group.iter().flat_map(|t| t.factors.iter().map(|(b, _)| b)).collect();
                let mins: Vec<(MultiPoly, Rational)> = bases
                    .into_iter()
                    .map(|b| {
                        let m = group
                            .iter()
                            .map(|t| t.exponent_of(b))
                            .min()
                            .expect("nonempty group");
                        (b.clone(), m)
                    })
                    .collect();
                let mut sum = MultiPoly::zero(&self.vars);
                for t in &group {
                    let mut p = MultiPoly::constant(&self.vars, t.coeff.clone());
                    for (b, m) in &mins {
                        let d = t.exponent_of(b) - m;
                        p = p.mul(&b.pow(d.to_integer().to_u32().expect("integer exponent difference")));
                    }
                    sum = sum.add(&p);
                }
                if sum.is_zero() {
                    continue;
                }
                let mut factors: Vec<(MultiPoly, Rational)> = mins.into_iter().filter(|(_, m)| !m.is_zero()).collect();
                factors.push((sum, Rational::one()));
                if let Some(pp) = PowerProduct::new(Rational::one(), radicals, factors)? {
                    merged.push(pp);
                }
            }
            if !merged.is_empty() {
                out.log_terms.insert(*q, merged);
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> ExprJson {
        ExprJson {
            vars: self.vars.clone(),
            log_base: self.log_base.as_ref().map(|b| b.to_json()),
            terms: self
                .log_terms
                .iter()
                .flat_map(|(q, ts)| {
                    ts.iter().map(move |t| TermJson {
                        log_power: *q,
                        coeff: format_rational(&t.coeff),
                        radicals: t
                            .radicals
                            .iter()
                            .map(|(b, e)| RadicalJson {
                                base: format_rational(b),
                                exp: format_rational(e),
                            })
                            .collect(),
                        factors: t
                            .factors
                            .iter()
                            .map(|(b, e)| FactorJson {
                                poly: b.to_json(),
                                exp: format_rational(e),
                            })
                            .collect(),
                    })
                })
                .collect(),
        }
    }

    pub fn from_json(json: &ExprJson) -> Result<Self> {
        let mut out = Self::zero(&json.vars);
        out.log_base = json.log_base.as_ref().map(MultiPoly::from_json).transpose()?;
        for t in &json.terms {
            let radicals = t
                .radicals
                .iter()
                .map(|r| Ok((parse_rational(&r.base)?, parse_rational(&r.exp)?)))
                .collect::<Result<Vec<_>>>()?;
            let factors = t
                .factors
                .iter()
                .map(|f| Ok((MultiPoly::from_json(&f.poly)?.remap(&json.vars)?, parse_rational(&f.exp)?)))
                .collect::<Result<Vec<_>>>()?;
            if let Some(pp) = PowerProduct::new(parse_rational(&t.coeff)?, radicals, factors)? {
                out.push(t.log_power, pp);
            }
        }
        Ok(out)
    }
}

fn fmt_exp(e: &Rational) -> String {
    if e.is_integer() && !e.is_negative() {
        format_rational(e)
    } else {
        format!("({})", format_rational(e))
    }
}

impl fmt::Display for InvariantExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (q, ts) in &self.log_terms {
            for t in ts {
                let mut items = Vec::new();
                if !t.coeff.is_one() || (t.factors.is_empty() && t.radicals.is_empty()) {
                    items.push(format_rational(&t.coeff));
                }
                for (b, e) in &t.radicals {
                    items.push(format!("{}^{}", format_rational(b), fmt_exp(e)));
                }
                for (b, e) in &t.factors {
                    if e.is_one() {
                        items.push(format!("({b})"));
                    } else {
                        items.push(format!("({b})^{}", fmt_exp(e)));
                    }
                }
                match q {
                    0 => {}
                    1 => items.push("L".into()),
                    _ => items.push(format!("L^{q}")),
                }
                parts.push(items.join("*"));
            }
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + "))?;
        if self.has_log() {
            if let Some(b) = &self.log_base {
                write!(f, "  [L = ln({b})]")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExprJson {
    pub vars: Vec<String>,
    pub log_base: Option<PolyJson>,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub log_power: u32,
    pub coeff: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub radicals: Vec<RadicalJson>,
    pub factors: Vec<FactorJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadicalJson {
    pub base: String,
    pub exp: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorJson {
    pub poly: PolyJson,
    pub exp: String,
}

/// Applies a first-order operator by the chain rule and normalizes.
pub fn apply_operator(op: &CoadjointOperator, expr: &InvariantExpr) -> Result<InvariantExpr> {
    let mut out = InvariantExpr {
        vars: expr.vars.clone(),
        log_base: expr.log_base.clone(),
        log_terms: BTreeMap::new(),
    };
    let log_image = expr.log_base.as_ref().map(|b| (b.clone(), op.apply_poly(b)));
    for (qq, terms) in &expr.log_terms {
        for t in terms {
            for (i, (b, e)) in t.factors.iter().enumerate() {
                let image = op.apply_poly(b);
                if image.is_zero() {
                    continue;
                }
                let mut factors = t.factors.clone();
                factors[i].1 = e - Rational::one();
                factors.push((image, Rational::one()));
                if let Some(pp) = PowerProduct::new(&t.coeff * e, t.radicals.clone(), factors)? {
                    out.push(*qq, pp);
                }
            }
            if *qq > 0 {
                let (base, image) = log_image
                    .as_ref()
                    .ok_or_else(|| Error::InvalidParams("logarithmic term without a log base".into()))?;
                if image.is_zero() {
                    continue;
                }
                let mut factors = t.factors.clone();
                factors.push((base.clone(), -Rational::one()));
                factors.push((image.clone(), Rational::one()));
                if let Some(pp) = PowerProduct::new(&t.coeff * Rational::from_integer((*qq).into()), t.radicals.clone(), factors)? {
                    out.push(qq - 1, pp);
                }
            }
        }
    }
    out.normalize()
}

/// Whether every coadjoint operator of `g` annihilates `expr`.
pub fn verify_invariant(g: &LieAlgebra, expr: &InvariantExpr) -> Result<bool> {
    let e = expr.remap(g.basis_names())?;
    for op in coadjoint_operators(g) {
        if !apply_operator(&op, &e)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The nilradical a family of invariant polynomials lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XiVariant {
    /// The nilradical `n_{n,3}`, indices `0 ≤ k ≤ n-5`.
    N3,
    /// The filiform `n_{m,1}`, indices `0 ≤ k ≤ m-3`.
    M1,
}

fn factorial(k: usize) -> Rational {
    (1..=k as i64).fold(Rational::one(), |a, i| a * q(i))
}

/// The polynomial `ξ_k` over `e1..e{n}`.
pub fn xi_poly(variant: XiVariant, n: usize, k: usize) -> Result<MultiPoly> {
    let (shift, max) = match variant {
        XiVariant::N3 => {
            if n < 6 {
                return Err(Error::DimensionTooSmall { what: "n_{n,3} invariants", n });
            }
            (3, n - 5)
        }
        XiVariant::M1 => {
            if n < 3 {
                return Err(Error::DimensionTooSmall { what: "n_{m,1} invariants", n });
            }
            (2, n - 3)
        }
    };
    if k > max {
        return Err(Error::IndexOutOfRange { index: k, range: format!("0..={max}") });
    }
    let vars = indexed_names("e", n);
    let e = |i: usize| MultiPoly::var_index(&vars, i - 1);
    if k == 0 {
        return Ok(e(1));
    }
    let sign = |j: usize| if j.is_multiple_of(2) { q(1) } else { q(-1) };
    let mut p = e(2).pow(k as u32 + 1).scale(&(sign(k) * q(k as i64) / factorial(k + 1)));
    for j in 0..k {
        let term = e(2)
            .pow(j as u32)
            .mul(&e(k + shift - j))
            .mul(&e(1).pow((k - j) as u32))
            .scale(&(sign(j) / factorial(j)));
        p = p.add(&term);
    }
    Ok(p)
}

pub fn xi(variant: XiVariant, n: usize, k: usize) -> Result<InvariantExpr> {
    Ok(InvariantExpr::from_poly(&xi_poly(variant, n, k)?))
}

/// Coordinate names of the extension in its e-type basis.
fn coordinates(spec: &ExtensionSpec) -> Vec<String> {
    let mut v = indexed_names("e", spec.n);
    match spec.family.extra_generators() {
        0 => {}
        1 => v.push("f".into()),
        c => v.extend(indexed_names("f", c)),
    }
    v
}

/// `ξ_k / ξ_0^{(k+1) r}` over the given coordinates.
fn xi_ratio(vars: &[String], xs: &[MultiPoly], k: usize, r: &Rational) -> Result<InvariantExpr> {
    let p = xs[k].remap(vars)?;
    let base = xs[0].remap(vars)?;
    InvariantExpr::product(vars, Rational::one(), vec![(p, Rational::one()), (base, -(q(k as i64 + 1) * r))])
}

/// Sum over ordered tuples `(i_1..i_parts)` with `Σ i = total` of `Π a(i+3)`.
fn composition_sum(a: &dyn Fn(usize) -> Rational, total: usize, parts: usize) -> Rational {
    if parts == 0 {
        return if total == 0 { Rational::one() } else { Rational::zero() };
    }
    (0..=total)
        .map(|i| a(i + 3) * composition_sum(a, total - i, parts - 1))
        .fold(Rational::zero(), |x, y| x + y)
}

/// The logarithmic invariant of the extension with a nilpotent `f`-action
/// parametrized by `a`.
fn log_invariant(vars: &[String], xs: &[MultiPoly], a: &dyn Fn(usize) -> Rational, k: usize) -> Result<InvariantExpr> {
    let xi0 = xs[0].remap(vars)?;
    let mut out = InvariantExpr::zero(vars).with_log_base(xi0.clone());
    for qq in 0..=k.div_ceil(2) {
        let sign = if qq % 2 == 0 { q(1) } else { q(-1) };
        let pre = sign / factorial(qq);
        if k + 1 >= 2 * qq {
            let c = composition_sum(a, k + 1 - 2 * qq, qq);
            out.push_factors(qq as u32, &pre * c, Vec::new())?;
        }
        if k > 2 * qq {
            let top = k - 2 * qq - 1;
            for j in 0..=top {
                let c = composition_sum(a, top - j, qq);
                if c.is_zero() {
                    continue;
                }
                let factors = vec![
                    (xs[j + 1].remap(vars)?, Rational::one()),
                    (xi0.clone(), -q(j as i64 + 2)),
                ];
                out.push_factors(qq as u32, &pre * c, factors)?;
            }
        }
    }
    out.normalize()
}

/// The invariants listed for the algebra of `spec`, written in its e-type
/// coordinates. Algebras stated to have no invariants give an empty list.
pub fn listed_invariants(spec: &ExtensionSpec) -> Result<Vec<InvariantExpr>> {
    use Family::*;
    spec.validate()?;
    let n = spec.n;
    let vars = coordinates(spec);
    let variant = if spec.family.is_filiform_based() { XiVariant::M1 } else { XiVariant::N3 };
    let xs: Vec<MultiPoly> = match spec.family {
        N_53 | S6_1 | S6_2 | S6_4 | S6_5 | S6P_6 | S6_7 | S6P_8 | S6P_9 | S7 => Vec::new(),
        _ => {
            let max = if variant == XiVariant::N3 { n - 5 } else { n - 3 };
            (0..=max).map(|k| xi_poly(variant, n, k)).collect::<Result<_>>()?
        }
    };
    let top = xs.len().saturating_sub(1);
    let ratio = |beta: Rational| -> Result<Vec<InvariantExpr>> {
        let r = &(q(2) * &beta) / &(q(1) + q(2) * &beta);
        (1..=top).map(|k| xi_ratio(&vars, &xs, k, &r)).collect()
    };
    let tilde_ratio = |beta: Rational| -> Result<Vec<InvariantExpr>> {
        let m = q(n as i64);
        let r = (&m - q(3) + &beta) / (&m - q(2) + &beta);
        (1..=top).map(|k| xi_ratio(&vars, &xs, k, &r)).collect()
    };
    let poly = |p: &MultiPoly| -> Result<InvariantExpr> { Ok(InvariantExpr::from_poly(&p.remap(&vars)?)) };
    let e = |name: &str| MultiPoly::var(&vars, name).expect("coordinate");
    let nq = q(n as i64);
    let out = match spec.family {
        N_N3 | N_M1 => xs.iter().map(poly).collect::<Result<_>>()?,
        N_53 => return Err(Error::NoInvariantsListed(spec.family.token().into())),
        S_N1_1 => ratio(spec.param("beta").cloned().unwrap_or_else(Rational::zero))?,
        S_N1_2 => ratio((nq - q(5)) / q(2))?,
        S_N1_3 | S_N1_7 => ratio(q(0))?,
        S_N1_6 => ratio((nq - q(4)) / q(2))?,
        S_N1_9 => ratio(q(1))?,
        S_N1_4 | SW_M1_3 => {
            let mut v = vec![poly(&xs[0])?];
            for k in 2..=top {
                v.push(InvariantExpr::product(
                    &vars,
                    Rational::one(),
                    vec![(xs[k].remap(&vars)?, q(2)), (xs[1].remap(&vars)?, -q(k as i64 + 1))],
                )?);
            }
            v
        }
        S_N1_5 | SW_M1_4 => (1..=top).map(|k| xi_ratio(&vars, &xs, k, &q(1))).collect::<Result<_>>()?,
        S_N1_8 | SW_M1_6 => {
            let a = |j: usize| spec.param(&format!("a{j}")).cloned().unwrap_or_else(Rational::zero);
            (1..=top).map(|k| log_invariant(&vars, &xs, &a, k)).collect::<Result<_>>()?
        }
        S_N2 | SW_M2 => (1..top)
            .map(|k| {
                InvariantExpr::product(
                    &vars,
                    Rational::one(),
                    vec![(xs[k + 1].remap(&vars)?, q(1)), (xs[1].remap(&vars)?, -qf(k as i64 + 2, 2))],
                )
            })
            .collect::<Result<_>>()?,
        S6_10 => {
            let num = e("e4").mul(&e("e1")).scale(&q(2)).sub(&e("e2").pow(2));
            vec![InvariantExpr::product(&vars, Rational::one(), vec![(num, q(1)), (e("e1"), -qf(4, 3))])?]
        }
        SW_M1_1 => tilde_ratio(spec.param("beta").cloned().unwrap_or_else(Rational::zero))?,
        SW_M1_2 => tilde_ratio(q(0))?,
        SW_M1_5 => tilde_ratio(q(1))?,
        S6_4 => {
            let p = e("e1").pow(2).mul(&e("f")).scale(&q(2))
                .sub(&e("e1").mul(&e("e2")).mul(&e("e5")).scale(&q(2)))
                .add(&e("e1").mul(&e("e3")).mul(&e("e4")))
                .add(&e("e2").mul(&e("e3").pow(2)));
            vec![poly(&e("e1"))?, poly(&p)?]
        }
        S7 => {
            let num = e("f2").sub(&e("f1").scale(&q(2))).mul(&e("e1").pow(2))
                .add(&e("e2").mul(&e("e5")).scale(&q(2)).sub(&e("e3").mul(&e("e4"))).mul(&e("e1")))
                .sub(&e("e2").mul(&e("e3").pow(2)));
            vec![InvariantExpr::product(&vars, Rational::one(), vec![(num, q(1)), (e("e1"), -q(2))])?]
        }
        S6_1 | S6_2 | S6_5 | S6P_6 | S6_7 | S6P_8 | S6P_9 => Vec::new(),
    };
    Ok(out)
}

/// The `k`-th listed invariant (1-based).
pub fn chi(spec: &ExtensionSpec, k: usize) -> Result<InvariantExpr> {
    let all = listed_invariants(spec)?;
    let max = all.len();
    if k == 0 || k > max {
        return Err(Error::IndexOutOfRange { index: k, range: format!("1..={max}") });
    }
    Ok(all.into_iter().nth(k - 1).expect("checked range"))
}

/// The algebra whose coordinates the listed invariants use.
pub fn coordinate_algebra(spec: &ExtensionSpec) -> Result<LieAlgebra> {
    crate::catalog::make_extension(&spec.clone().with_basis(BasisKind::E))
}

/// `C(x)_{kb} = x_a c^a_{kb}` at a point.
pub fn commutator_matrix(g: &LieAlgebra, x: &[Rational]) -> Matrix {
    let n = g.dim();
    let mut m = Matrix::zeros(n, n);
    for k in 0..n {
        for b in 0..n {
            let v = g
                .basis_bracket(k, b)
                .iter()
                .zip(x)
                .fold(Rational::zero(), |acc, (c, xa)| acc + c * xa);
            m.set(k, b, v);
        }
    }
    m
}

/// Number of functionally independent invariants: `dim g` minus the
/// generic rank of `C(x)`, taken as the maximum over seeded random points.
pub fn invariant_count_seeded(g: &LieAlgebra, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.dim();
    let best = (0..4)
        .map(|_| {
            let x: Vector = (0..n).map(|_| q(rng.gen_range(1..=97))).collect();
            commutator_matrix(g, &x).rank()
        })
        .max()
        .unwrap_or(0);
    n - best
}

pub fn invariant_count(g: &LieAlgebra) -> usize {
    invariant_count_seeded(g, 0)
}

/// Random point with coordinates in `[1, 97]` where no base of the
/// expressions vanishes. When a logarithm occurs its base is a coordinate,
/// which is set to 1 so that `L` vanishes there.
pub fn admissible_point(exprs: &[InvariantExpr], vars: &[String], seed: u64) -> Result<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exprs: Vec<InvariantExpr> = exprs.iter().map(|e| e.remap(vars)).collect::<Result<_>>()?;
    let mut pinned = Vec::new();
    for e in exprs.iter().filter(|e| e.has_log()) {
        let base = e.log_base.as_ref().expect("log terms need a base");
        let used = base.used_variables();
        let single = (used.len() == 1 && base.degree() == 1).then(|| used.into_iter().next()).flatten();
        let name = single.ok_or_else(|| Error::InadmissiblePoint("log base is not a coordinate".into()))?;
        pinned.push(vars.iter().position(|v| *v == name).expect("remapped"));
    }
    for _ in 0..200 {
        let mut x: Vector = (0..vars.len()).map(|_| q(rng.gen_range(1..=97))).collect();
        for &i in &pinned {
            x[i] = q(1);
        }
        let ok = exprs
            .iter()
            .flat_map(|e| e.log_terms.values().flatten())
            .all(|t| t.factors.iter().all(|(b, _)| !b.eval(&x).is_zero()));
        if ok {
            return Ok(x);
        }
    }
    Err(Error::InadmissiblePoint("no admissible point found".into()))
}

/// Gradient of `expr` at `point`, up to a nonzero factor common to the row.
fn gradient_row(expr: &InvariantExpr, point: &[Rational]) -> Result<Vector> {
    let n = expr.vars.len();
    let log_grad = if expr.has_log() {
        let base = expr.log_base.as_ref().expect("log terms need a base");
        if !base.eval(point).is_one() {
            return Err(Error::InadmissiblePoint("the log base must equal 1 at the point".into()));
        }
        (0..n).map(|i| base.derivative(i).eval(point)).collect::<Vector>()
    } else {
        vec![Rational::zero(); n]
    };
    let mut row = vec![Rational::zero(); n];
    let mut key = None;
    for (qq, terms) in &expr.log_terms {
        if *qq > 1 {
            continue;
        }
        for t in terms {
            let this = t.class_key();
            match &key {
                None => key = Some(this),
                Some(k) if *k == this => {}
                Some(_) => {
                    return Err(Error::InvalidParams(
                        "gradient of a sum with different radical classes".into(),
                    ))
                }
            }
            let mut value = t.coeff.clone();
            let mut dlog = vec![Rational::zero(); n];
            for (b, e) in &t.factors {
                let bv = b.eval(point);
                if bv.is_zero() {
                    return Err(Error::InadmissiblePoint(format!("base {b} vanishes")));
                }
                value *= crate::derivations::qpow(&bv, int_exp(&e.floor()));
                for (i, d) in dlog.iter_mut().enumerate() {
                    *d += e * b.derivative(i).eval(point) / &bv;
                }
            }
            let dir = if *qq == 0 { &dlog } else { &log_grad };
            for (r, d) in row.iter_mut().zip(dir) {
                *r += &value * d;
            }
        }
    }
    Ok(row)
}

/// Rank of the Jacobian of the expressions at `point`.
pub fn independence_rank(exprs: &[InvariantExpr], point: &[Rational]) -> Result<usize> {
    if exprs.is_empty() {
        return Ok(0);
    }
    let vars = exprs[0].vars.clone();
    if point.len() != vars.len() {
        return Err(Error::DimensionMismatch {
            expected: vars.len(),
            actual: point.len(),
        });
    }
    let rows = exprs
        .iter()
        .map(|e| gradient_row(&e.remap(&vars)?, point))
        .collect::<Result<Vec<_>>>()?;
    Ok(rank(&Matrix::from_rows(rows)?))
}
