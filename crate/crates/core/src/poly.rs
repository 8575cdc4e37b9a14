//! Sparse multivariate polynomials with rational coefficients.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::{format_rational, parse_rational, Rational};

/// Polynomial over named variables; terms map exponent vectors to nonzero
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MultiPoly {
    pub fn zero(vars: &[String]) -> Self {
        MultiPoly {
            vars: vars.to_vec(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &[String], c: Rational) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars.len()], c);
        p
    }

    pub fn one(vars: &[String]) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn var(vars: &[String], name: &str) -> Result<Self> {
        let i = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::VariableMismatch(format!("unknown variable {name}")))?;
        Ok(Self::var_index(vars, i))
    }

    pub fn var_index(vars: &[String], i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        let mut p = Self::zero(vars);
        p.add_term(e, Rational::one());
        p
    }

    /// Builds from `(exponents, coefficient)` pairs, merging repeats.
    pub fn from_terms(vars: &[String], terms: impl IntoIterator<Item = (Vec<u32>, Rational)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self
                .terms
                .iter()
                .next()
                .filter(|(e, _)| e.iter().all(|&x| x == 0))
                .map(|(_, c)| c.clone()),
            _ => None,
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn check_vars(&self, other: &Self) {
        assert_eq!(self.vars, other.vars, "polynomials over different variables");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_vars(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_vars(other);
        let mut out = Self::zero(&self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(&self.vars), |acc, _| acc.mul(self))
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[i] -= 1;
            out.add_term(d, c * Rational::from_integer(BigInt::from(e[i])));
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.vars.len(), "point dimension");
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(point)
                    .fold(c.clone(), |acc, (&k, x)| acc * num_traits::pow(x.clone(), k as usize))
            })
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Names of the variables that occur with positive degree.
    pub fn used_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for e in self.terms.keys() {
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    out.insert(self.vars[i].clone());
                }
            }
        }
        out
    }

    /// Re-expresses the polynomial over another variable list, matching by
    /// name. Fails if a used variable is missing.
    pub fn remap(&self, vars: &[String]) -> Result<Self> {
        let mut index = Vec::with_capacity(self.vars.len());
        for (i, name) in self.vars.iter().enumerate() {
            let pos = vars.iter().position(|v| v == name);
            if pos.is_none() && self.terms.keys().any(|e| e[i] > 0) {
                return Err(Error::VariableMismatch(format!("variable {name} is not a coordinate")));
            }
            index.push(pos);
        }
        let mut out = Self::zero(vars);
        for (e, c) in &self.terms {
            let mut ne = vec![0; vars.len()];
            for (i, &k) in e.iter().enumerate() {
                if let Some(j) = index[i] {
                    ne[j] += k;
                }
            }
            out.add_term(ne, c.clone());
        }
        Ok(out)
    }

    /// Splits `self = content · primitive` where the primitive part has
    /// coprime integer coefficients and a positive leading coefficient
    /// (largest exponent vector). The zero polynomial has content 0.
    pub fn primitive(&self) -> (Rational, Self) {
        let Some((_, lead)) = self.terms.iter().next_back() else {
            return (Rational::zero(), self.clone());
        };
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        let mut content = Rational::new(num, den);
        if lead.is_negative() {
            content = -content;
        }
        let inv = content.recip();
        (content, self.scale(&inv))
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermJson {
                    exps: e.clone(),
                    c: format_rational(c),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &PolyJson) -> Result<Self> {
        let mut out = Self::zero(&json.vars);
        for t in &json.terms {
            if t.exps.len() != json.vars.len() {
                return Err(Error::Parse(format!(
                    "term has {} exponents for {} variables",
                    t.exps.len(),
                    json.vars.len()
                )));
            }
            out.add_term(t.exps.clone(), parse_rational(&t.c)?);
        }
        Ok(out)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        self.vars[i].clone()
                    } else {
                        format!("{}^{k}", self.vars[i])
                    }
                })
                .collect();
            let abs = c.abs();
            if n == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            }
            match (mono.is_empty(), abs.is_one()) {
                (true, _) => write!(f, "{}", format_rational(&abs))?,
                (false, true) => write!(f, "{}", mono.join("*"))?,
                (false, false) => write!(f, "{}*{}", format_rational(&abs), mono.join("*"))?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exps: Vec<u32>,
    pub c: String,
}

/// `["e1", .., "e{n}"]`-style names.
pub fn indexed_names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::{q, qf};
    use proptest::prelude::*;

    fn vars() -> Vec<String> {
        indexed_names("e", 3)
    }

    #[test]
    fn arithmetic_and_display() {
        let v = vars();
        let x = MultiPoly::var(&v, "e1").unwrap();
        let y = MultiPoly::var(&v, "e2").unwrap();
        let p = x.mul(&y).sub(&y.pow(2).scale(&qf(1, 2)));
        assert_eq!(p.to_string(), "e1*e2 - 1/2*e2^2");
        assert!(p.sub(&p).is_zero());
        assert_eq!(p.derivative(1).to_string(), "e1 - e2");
        assert_eq!(p.eval(&[q(2), q(4), q(0)]), q(0));
        assert_eq!(p.used_variables().len(), 2);
        assert_eq!(MultiPoly::constant(&v, q(3)).as_constant(), Some(q(3)));
        assert!(MultiPoly::var(&v, "f").is_err());
    }

    #[test]
    fn primitive_part() {
        let v = vars();
        let x = MultiPoly::var(&v, "e1").unwrap();
        let y = MultiPoly::var(&v, "e2").unwrap();
        let p = y.pow(2).scale(&qf(1, 2)).sub(&x.scale(&qf(1, 3)));
        let (c, prim) = p.primitive();
        assert_eq!(c, qf(-1, 6));
        assert_eq!(prim.scale(&c), p);
        assert_eq!(prim.to_string(), "2*e1 - 3*e2^2");
        let (c, prim) = p.neg().primitive();
        assert_eq!(c, qf(1, 6));
        assert_eq!(prim.to_string(), "2*e1 - 3*e2^2");
    }

    #[test]
    fn remap_by_name() {
        let v = vars();
        let p = MultiPoly::var(&v, "e2").unwrap().mul(&MultiPoly::var(&v, "e1").unwrap());
        let wide = indexed_names("e", 5);
        let r = p.remap(&wide).unwrap();
        assert_eq!(r.to_string(), "e1*e2");
        let narrow = indexed_names("e", 1);
        assert!(matches!(p.remap(&narrow), Err(Error::VariableMismatch(_))));
    }

    fn arb_poly() -> impl Strategy<Value = MultiPoly> {
        prop::collection::vec((prop::collection::vec(0u32..3, 3), -5i64..5, 1i64..4), 0..6).prop_map(|ts| {
            MultiPoly::from_terms(&vars(), ts.into_iter().map(|(e, a, b)| (e, qf(a, b))))
        })
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            // Leibniz rule
            prop_assert_eq!(a.mul(&b).derivative(0), a.derivative(0).mul(&b).add(&a.mul(&b.derivative(0))));
        }

        #[test]
        fn json_round_trip(a in arb_poly()) {
            prop_assert_eq!(MultiPoly::from_json(&a.to_json()).unwrap(), a);
        }
    }
}
