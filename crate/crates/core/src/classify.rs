//! Reduction of an outer derivation of the nilradical to the canonical
//! representative of its family.
//!
//! The derivation is split into its diagonal part (fixed by `c_{n-1}` and
//! `d_n`) and a nilpotent remainder. Every remaining parameter is an
//! eigenvector of the diagonal part, so a parameter with nonzero weight is
//! removed by conjugating with `exp(X)` for a suitable multiple `X` of its
//! unit derivation. Parameters are processed by increasing height, which
//! keeps earlier steps intact. What survives has weight zero and is
//! normalized by the diagonal automorphisms.

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::LieAlgebra;
use crate::catalog::{a_pivot, make_nilradical, BasisKind, ExtensionSpec, Family, NilradicalKind, SpecJson};
use crate::derivations::{
    build_automorphism, build_derivation, canonical_outer, exp_nilpotent, qpow,
    AutomorphismParams, DerivationParams, Slot,
};
use crate::error::{Error, Result};
use crate::linear::{
    format_rational, power_class_representative, q, qf, rational_root, Matrix, Rational, Vector,
};

/// Outcome of [`reduce_to_canonical`]:
/// `canonical = s · Φ⁻¹ · D · Φ + ad_x` with `s = scalings[0]`,
/// `Φ = conjugator`, `x = inner_correction`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationResult {
    pub label: ExtensionSpec,
    pub conjugator: Matrix,
    pub inner_correction: Vector,
    /// `[s, beta, kappa]`: the factor applied to `f` and the accumulated
    /// diagonal automorphism parameters.
    pub scalings: Vec<Rational>,
    pub canonical: Matrix,
}

impl ClassificationResult {
    /// `s · Φ⁻¹ · D · Φ + ad_x` for the stored data.
    pub fn apply(&self, d: &Matrix) -> Result<Matrix> {
        let n = d.rows();
        let nil = nilradical(n)?;
        let conj = self.conjugator.inverse()?.mul(d)?.mul(&self.conjugator)?;
        conj.scale(&self.scalings[0]).add(&nil.adjoint_matrix(&self.inner_correction)?)
    }

    pub fn to_json(&self) -> ClassificationJson {
        ClassificationJson {
            label: self.label.to_json(),
            conjugator: matrix_strings(&self.conjugator),
            inner_correction: self.inner_correction.iter().map(format_rational).collect(),
            scalings: self.scalings.iter().map(format_rational).collect(),
            canonical: matrix_strings(&self.canonical),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationJson {
    pub label: SpecJson,
    pub conjugator: Vec<Vec<String>>,
    pub inner_correction: Vec<String>,
    pub scalings: Vec<String>,
    pub canonical: Vec<Vec<String>>,
}

fn matrix_strings(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(format_rational).collect())
        .collect()
}

fn nilradical(n: usize) -> Result<LieAlgebra> {
    make_nilradical(NilradicalKind::N3, n, BasisKind::E)
}

/// Off-diagonal parameters of the reduced form with their weights
/// `(w_c, w_d)`: the eigenvalue of the parameter under the diagonal part is
/// `w_c · c_{n-1} + w_d · d_n`.
fn weighted_slots(n: usize) -> Vec<(Slot, (i64, i64))> {
    let ni = n as i64;
    let mut v = vec![(Slot::B(1), (0, ni - 4))];
    if n >= 7 {
        v.push((Slot::B(2), (0, ni - 5)));
    }
    for k in 4..=n.saturating_sub(4) {
        v.push((Slot::B(k), (0, ni - 2 - k as i64)));
    }
    v.push((Slot::C(2), (1, 0)));
    v.push((Slot::C(3), (0, 1)));
    v.push((Slot::D(n - 1), (1, -1)));
    v.push((Slot::D(n - 2), (2, 4 - ni)));
    v
}

/// Grading compatible with brackets; positive on every nilpotent slot.
fn height(n: usize, w: (i64, i64)) -> i64 {
    w.0 * n as i64 + w.1
}

struct Reducer {
    n: usize,
    m: Matrix,
    phi: Matrix,
    x: Vector,
    s: Rational,
    beta: Rational,
    kappa: Rational,
}

impl Reducer {
    fn new(n: usize, d: Matrix) -> Result<Self> {
        Ok(Reducer {
            n,
            m: d,
            phi: Matrix::identity(n),
            x: vec![Rational::zero(); n],
            s: Rational::one(),
            beta: Rational::one(),
            kappa: Rational::one(),
        })
    }

    fn normalize(&mut self) -> Result<DerivationParams> {
        let out = canonical_outer(self.n, &self.m)?;
        self.m = out.derivation;
        for (a, b) in self.x.iter_mut().zip(&out.inner) {
            *a += b;
        }
        DerivationParams::from_matrix(self.n, &self.m)
    }

    fn conjugate(&mut self, phi: &Matrix) -> Result<()> {
        let inv = phi.inverse()?;
        self.m = inv.mul(&self.m)?.mul(phi)?;
        self.x = inv.mul_vec(&self.x)?;
        self.phi = self.phi.mul(phi)?;
        Ok(())
    }

    fn scale(&mut self, t: &Rational) {
        self.m = self.m.scale(t);
        self.x.iter_mut().for_each(|v| *v *= t);
        self.s *= t;
    }

    fn torus(&mut self, beta: Rational, kappa: Rational) -> Result<()> {
        let t = build_automorphism(&AutomorphismParams::scaling(self.n, beta.clone(), kappa.clone()))?;
        self.conjugate(&t)?;
        self.beta *= beta;
        self.kappa *= kappa;
        Ok(())
    }

    fn diagonal(&self) -> (Rational, Rational) {
        let n = self.n;
        (self.m.get(n - 2, n - 2).clone(), self.m.get(n - 1, n - 1).clone())
    }

    /// Removes every slot whose weight does not vanish at the current
    /// diagonal part.
    fn clear_nonresonant(&mut self) -> Result<()> {
        let n = self.n;
        let (c, d) = self.diagonal();
        let slots = weighted_slots(n);
        let mut heights: Vec<i64> = slots.iter().map(|(_, w)| height(n, *w)).collect();
        heights.sort_unstable();
        heights.dedup();
        for h in heights {
            let p = self.normalize()?;
            let mut x = Matrix::zeros(n, n);
            for (slot, w) in slots.iter().filter(|(_, w)| height(n, *w) == h) {
                let eigen = q(w.0) * &c + q(w.1) * &d;
                let value = p.get(*slot);
                if eigen.is_zero() || value.is_zero() {
                    continue;
                }
                let unit = build_derivation(&DerivationParams::unit(n, *slot))?;
                x = x.sub(&unit.scale(&(value / eigen)))?;
            }
            if !x.is_zero() {
                self.conjugate(&exp_nilpotent(&x)?)?;
            }
        }
        Ok(())
    }
}

/// Reduces the derivation with parameters `p` to its family representative.
pub fn reduce_to_canonical(n: usize, p: &DerivationParams) -> Result<ClassificationResult> {
    if p.n != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: p.n,
        });
    }
    reduce_matrix(n, &build_derivation(p)?)
}

/// Same as [`reduce_to_canonical`] for a derivation given as a matrix.
pub fn reduce_matrix(n: usize, d: &Matrix) -> Result<ClassificationResult> {
    let mut r = Reducer::new(n, d.clone())?;
    r.normalize()?;
    let (c, d0) = r.diagonal();
    if c.is_zero() && d0.is_zero() {
        return Err(Error::NilpotentCoset);
    }
    if d0.is_zero() {
        r.scale(&(Rational::one() / (q(2) * &c)));
    } else {
        r.scale(&d0.recip());
    }
    r.clear_nonresonant()?;
    let p = r.normalize()?;
    let label = if r.diagonal().1.is_zero() {
        label_without_d(&mut r, &p)?
    } else {
        label_with_d(&mut r, &p)?
    };
    r.normalize()?;
    let expected = label.actions()?.remove(0);
    if r.m != expected {
        return Err(Error::InvalidParams(format!(
            "reduction did not reach the representative of {label}"
        )));
    }
    Ok(ClassificationResult {
        label,
        conjugator: r.phi.clone(),
        inner_correction: r.x.clone(),
        scalings: vec![r.s.clone(), r.beta.clone(), r.kappa.clone()],
        canonical: r.m,
    })
}

fn diagonal_label(n: usize, beta: &Rational) -> ExtensionSpec {
    let nq = q(n as i64);
    if beta.is_zero() {
        ExtensionSpec::new(Family::S_N1_3, n)
    } else if *beta == qf(-1, 2) {
        ExtensionSpec::new(Family::S_N1_4, n)
    } else if *beta == (nq - q(5)) / q(2) {
        ExtensionSpec::new(Family::S_N1_2, n)
    } else {
        ExtensionSpec::new(Family::S_N1_1, n).with_param("beta", beta.clone())
    }
}

/// Brings the `e_{n-2}` entry of `D(e_n)` (weight `(2, 4-n)`) to its class
/// representative and returns it.
fn normalize_epsilon(r: &mut Reducer, eps: &Rational) -> Result<Rational> {
    let n = r.n as i64;
    if n % 2 == 1 {
        r.torus(qpow(eps, -(n - 5) / 2), eps.recip())?;
        Ok(Rational::one())
    } else {
        let rep = power_class_representative(eps, 2);
        let t = rational_root(&(eps / &rep), 2).expect("quotient by the class is a square");
        r.torus(t, Rational::one())?;
        Ok(rep)
    }
}

fn label_with_d(r: &mut Reducer, p: &DerivationParams) -> Result<ExtensionSpec> {
    let n = r.n;
    let beta = r.diagonal().0;
    let one = Rational::one();
    let top = p.get(Slot::D(n - 1));
    let below = p.get(Slot::D(n - 2));
    if n == 6 && beta == one {
        if !top.is_zero() {
            let alpha = &below / (&top * &top);
            r.torus(top, one)?;
            return Ok(if alpha.is_zero() {
                ExtensionSpec::new(Family::S_N1_9, n)
            } else {
                ExtensionSpec::new(Family::S6_10, n).with_param("alpha", alpha)
            });
        }
        if !below.is_zero() {
            let eps = normalize_epsilon(r, &below)?;
            return Ok(ExtensionSpec::new(Family::S_N1_6, n).with_param("epsilon", eps));
        }
        return Ok(diagonal_label(n, &beta));
    }
    if beta.is_zero() {
        let c2 = p.get(Slot::C(2));
        if c2.is_zero() {
            return Ok(ExtensionSpec::new(Family::S_N1_3, n));
        }
        r.torus(c2, one)?;
        return Ok(ExtensionSpec::new(Family::S_N1_7, n));
    }
    if beta == one && !top.is_zero() {
        r.torus(top, one)?;
        return Ok(ExtensionSpec::new(Family::S_N1_9, n));
    }
    if beta == qf(n as i64 - 4, 2) && !below.is_zero() {
        let eps = normalize_epsilon(r, &below)?;
        return Ok(ExtensionSpec::new(Family::S_N1_6, n).with_param("epsilon", eps));
    }
    Ok(diagonal_label(n, &beta))
}

/// `a_2 .. a_{n-3}` read from the reduced parameters when `d_n = 0`.
fn a_vector(n: usize, p: &DerivationParams) -> Vec<Rational> {
    let mut a = vec![p.get(Slot::C(3))];
    for j in 3..=n.saturating_sub(5) {
        a.push(p.get(Slot::B(n - 1 - j)));
    }
    if n >= 7 {
        a.push(p.get(Slot::B(2)));
    }
    a.push(p.get(Slot::B(1)));
    a
}

fn label_without_d(r: &mut Reducer, p: &DerivationParams) -> Result<ExtensionSpec> {
    let n = r.n;
    let a = a_vector(n, p);
    let Some((j, v)) = a_pivot(&a, 2) else {
        r.scale(&q(2));
        return Ok(ExtensionSpec::new(Family::S_N1_5, n));
    };
    let e = (j - 1) as u32;
    let rep = power_class_representative(&v, e);
    let kappa = rational_root(&(&v / &rep), e).expect("quotient by the class is a power");
    r.torus(Rational::one(), kappa.clone())?;
    let mut spec = ExtensionSpec::new(Family::S_N1_8, n);
    for (i, value) in a.iter().enumerate() {
        let idx = i + 2;
        let scaled = value * qpow(&kappa, -(idx as i64 - 1));
        if !scaled.is_zero() {
            spec = spec.with_param(&format!("a{idx}"), scaled);
        }
    }
    Ok(spec)
}

/// Random parameters with small integer entries. Half of the draws put the
/// diagonal part on a ratio where some slot has weight zero.
pub fn random_params(n: usize, rng: &mut impl Rng) -> DerivationParams {
    let mut p = DerivationParams::zero(n);
    for slot in DerivationParams::slots(n) {
        if rng.gen_bool(0.6) {
            p.set(slot, q(rng.gen_range(-3..=3)));
        }
    }
    let d = q(rng.gen_range(-2..=2));
    if rng.gen_bool(0.5) {
        let nq = n as i64;
        let special = [q(0), q(1), qf(-1, 2), qf(nq - 5, 2), qf(nq - 4, 2)];
        let beta = special[rng.gen_range(0..special.len())].clone();
        p.set(Slot::C(n - 1), &beta * &d);
    }
    p.set(Slot::D(n), d);
    p
}

/// Outcome of [`reduce_pair`]: `canonical[a] = Φ⁻¹ (Σ_b combination[a][b] D_b) Φ + ad_{inner[a]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairClassification {
    pub label: ExtensionSpec,
    pub conjugator: Matrix,
    pub combination: Matrix,
    pub inner: Vec<Vector>,
    pub canonical: Vec<Matrix>,
}

/// Reduces a pair of derivations spanning an abelian subalgebra modulo
/// inner derivations to the two-generator representative.
pub fn reduce_pair(n: usize, p1: &DerivationParams, p2: &DerivationParams) -> Result<PairClassification> {
    let raw = [build_derivation(p1)?, build_derivation(p2)?];
    let diag: Vec<(Rational, Rational)> = raw
        .iter()
        .map(|d| {
            let m = canonical_outer(n, d)?.derivation;
            Ok((m.get(n - 2, n - 2).clone(), m.get(n - 1, n - 1).clone()))
        })
        .collect::<Result<_>>()?;
    let ((c1, d1), (c2, d2)) = (&diag[0], &diag[1]);
    let det = c1 * d2 - c2 * d1;
    if det.is_zero() {
        return Err(Error::NilpotentCoset);
    }
    // rows: combinations with diagonal (c, d) = (0, 1) and (1, 0)
    let combination = Matrix::from_rows(vec![
        vec![-c2 / &det, c1 / &det],
        vec![d2 / &det, -d1 / &det],
    ])?;
    let combine = |row: usize| -> Result<Matrix> {
        raw[0]
            .scale(combination.get(row, 0))
            .add(&raw[1].scale(combination.get(row, 1)))
    };
    let (f1, f2) = (combine(0)?, combine(1)?);
    // a combination with a generic diagonal part has no resonances
    let t = q(n as i64);
    let generic = reduce_matrix(n, &f1.add(&f2.scale(&t))?)?;
    let phi = generic.conjugator.clone();
    let mut inner = Vec::new();
    let mut canonical = Vec::new();
    for f in [&f1, &f2] {
        let conj = phi.inverse()?.mul(f)?.mul(&phi)?;
        let out = canonical_outer(n, &conj)?;
        inner.push(out.inner);
        canonical.push(out.derivation);
    }
    let label = ExtensionSpec::new(Family::S_N2, n);
    if canonical != label.actions()? {
        return Err(Error::InvalidParams(
            "the two derivations do not commute modulo inner derivations".into(),
        ));
    }
    Ok(PairClassification {
        label,
        conjugator: phi,
        combination,
        inner,
        canonical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{enumerate_specs, SampleParams};
    use crate::derivations::{is_automorphism, is_derivation};

    fn classify_spec(spec: &ExtensionSpec) -> ClassificationResult {
        let d = spec.actions().unwrap().remove(0);
        let p = DerivationParams::from_matrix(spec.n, &d).unwrap();
        reduce_to_canonical(spec.n, &p).unwrap()
    }

    #[test]
    fn documented_examples() {
        let n = 8;
        let p = DerivationParams::zero(n)
            .with(Slot::D(n), q(1))
            .with(Slot::C(n - 1), q(2))
            .with(Slot::D(n - 1), q(5));
        let r = reduce_to_canonical(n, &p).unwrap();
        assert_eq!(r.label, ExtensionSpec::new(Family::S_N1_1, n).with_param("beta", q(2)));

        let p = DerivationParams::zero(n)
            .with(Slot::D(n), q(1))
            .with(Slot::C(n - 1), q(1))
            .with(Slot::D(n - 1), q(1))
            .with(Slot::D(n - 2), q(4));
        let r = reduce_to_canonical(n, &p).unwrap();
        assert_eq!(r.label.family, Family::S_N1_9);

        assert_eq!(
            reduce_to_canonical(n, &DerivationParams::zero(n).with(Slot::B(1), q(1))),
            Err(Error::NilpotentCoset)
        );
    }

    #[test]
    fn every_family_round_trips() {
        for n in [6, 7, 8, 9] {
            for spec in enumerate_specs(n, &SampleParams::default()) {
                if spec.family.extra_generators() != 1 {
                    continue;
                }
                let r = classify_spec(&spec);
                let expect = if spec.family == Family::S_N1_6 && n % 2 == 1 {
                    spec.clone().with_param("epsilon", q(1))
                } else {
                    spec.clone()
                };
                assert_eq!(r.label, expect, "n = {n}");
            }
        }
    }

    #[test]
    fn contract_holds_on_scrambled_input() {
        let n = 8;
        let spec = ExtensionSpec::new(Family::S_N1_8, n).with_param("a3", q(1)).with_param("a5", q(2));
        let d = spec.actions().unwrap().remove(0);
        let mut ap = AutomorphismParams::scaling(n, q(3), qf(-1, 2));
        ap.lambda = q(2);
        ap.mu = q(-1);
        ap.psi.insert(2, q(1));
        ap.rho.insert(3, q(4));
        ap.phi.insert(4, q(1));
        let phi = build_automorphism(&ap).unwrap();
        let scrambled = phi.inverse().unwrap().mul(&d).unwrap().mul(&phi).unwrap().scale(&q(5));
        let r = reduce_matrix(n, &scrambled).unwrap();
        assert_eq!(r.label.family, Family::S_N1_8);
        assert_eq!(r.apply(&scrambled).unwrap(), r.canonical);
        assert!(is_automorphism(&nilradical(n).unwrap(), &r.conjugator));
        assert!(is_derivation(&nilradical(n).unwrap(), &r.canonical));
    }

    #[test]
    fn idempotent_on_canonical_output() {
        let n = 9;
        let spec = ExtensionSpec::new(Family::S_N1_7, n);
        let r = classify_spec(&spec);
        assert_eq!(r.conjugator, Matrix::identity(n));
        let again = reduce_matrix(n, &r.canonical).unwrap();
        assert_eq!(again.label, r.label);
        assert_eq!(again.conjugator, Matrix::identity(n));
    }

    #[test]
    fn epsilon_classes() {
        let n = 8;
        let spec = ExtensionSpec::new(Family::S_N1_6, n).with_param("epsilon", q(1));
        let d = spec.actions().unwrap().remove(0);
        // rescaling e_{n-2} entry by 12 = 2^2 * 3 lands in the class of 3
        let mut m = d.clone();
        m.set(n - 3, n - 1, q(12));
        let r = reduce_matrix(n, &m).unwrap();
        assert_eq!(r.label.param("epsilon"), Some(&q(3)));
        m.set(n - 3, n - 1, qf(-1, 4));
        assert_eq!(reduce_matrix(n, &m).unwrap().label.param("epsilon"), Some(&q(-1)));
        let n = 9;
        let spec = ExtensionSpec::new(Family::S_N1_6, n).with_param("epsilon", q(-1));
        let r = classify_spec(&spec);
        assert_eq!(r.label.param("epsilon"), Some(&q(1)));
    }

    #[test]
    fn extra_dim6_family() {
        let spec = ExtensionSpec::new(Family::S6_10, 6).with_param("alpha", q(3));
        let d = spec.actions().unwrap().remove(0);
        let r = reduce_matrix(6, &d.scale(&q(2))).unwrap();
        assert_eq!(r.label, spec);
        let p = DerivationParams::zero(6)
            .with(Slot::D(6), q(1))
            .with(Slot::C(5), q(1))
            .with(Slot::D(5), q(2))
            .with(Slot::D(4), q(12))
            .with(Slot::B(1), q(7));
        let r = reduce_to_canonical(6, &p).unwrap();
        assert_eq!(r.label, ExtensionSpec::new(Family::S6_10, 6).with_param("alpha", q(3)));
    }

    #[test]
    fn pair_reduction() {
        let n = 8;
        let p1 = DerivationParams::zero(n)
            .with(Slot::D(n), q(1))
            .with(Slot::C(n - 1), q(1))
            .with(Slot::D(n - 1), q(3));
        let mut ap = AutomorphismParams::identity(n);
        ap.lambda = q(3);
        let phi = build_automorphism(&ap).unwrap();
        let d2 = phi
            .inverse()
            .unwrap()
            .mul(&build_derivation(&DerivationParams::unit(n, Slot::C(n - 1))).unwrap())
            .unwrap()
            .mul(&phi)
            .unwrap();
        let p2 = DerivationParams::from_matrix(n, &d2).unwrap();
        // p1 is not conjugated along with p2, so they do not commute mod inner
        assert!(reduce_pair(n, &p1, &p2).is_err());
        let s1 = DerivationParams::unit(n, Slot::D(n));
        let s2 = DerivationParams::unit(n, Slot::C(n - 1)).with(Slot::D(n), q(2));
        let r = reduce_pair(n, &s1, &s2).unwrap();
        assert_eq!(r.label.family, Family::S_N2);
        assert!(reduce_pair(n, &s1, &s1).is_err());
    }

    #[test]
    fn seeded_random_parameters() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut seen = std::collections::BTreeSet::new();
        for trial in 0..100 {
            let n = 6 + trial % 4;
            let p = random_params(n, &mut rng);
            let mat = build_derivation(&p).unwrap();
            match reduce_to_canonical(n, &p) {
                Ok(r) => {
                    assert_eq!(r.apply(&mat).unwrap(), r.canonical);
                    assert!(is_automorphism(&nilradical(n).unwrap(), &r.conjugator));
                    seen.insert(r.label.family);
                }
                Err(Error::NilpotentCoset) => {
                    assert!(p.get(Slot::C(n - 1)).is_zero() && p.get(Slot::D(n)).is_zero());
                }
                Err(e) => panic!("{p:?}: {e}"),
            }
        }
        assert!(seen.len() >= 5, "{seen:?}");
    }
}
