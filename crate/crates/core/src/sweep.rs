//! The full verification sweep: catalog consistency, derivation dimensions,
//! series tables, invariant identities and counts, classification and
//! nilradical checks.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::LieAlgebra;
use crate::catalog::{
    enumerate_filiform_specs, enumerate_specs, make_extension, make_nilradical, BasisKind,
    ExtensionSpec, Family, NilradicalKind, SampleParams,
};
use crate::classify::{random_params, reduce_pair, reduce_to_canonical};
use crate::derivations::{build_derivation, derivation_algebra, inner_derivations, verify_nilradical, DerivationParams, Slot};
use crate::error::Result;
use crate::invariants::{
    admissible_point, coordinate_algebra, independence_rank, invariant_count_seeded, listed_invariants,
    verify_invariant, xi, InvariantExpr, XiVariant,
};
use crate::linear::q;
use crate::tables::printed_profile;

#[derive(Clone, Debug)]
pub struct SweepConfig {
    /// Dimension range of the nilradical for the generic extension families.
    pub n_min: usize,
    pub n_max: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n_min: 7,
            n_max: 10,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: usize,
    pub title: &'static str,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl CriterionReport {
    fn new(id: usize, title: &'static str) -> Self {
        CriterionReport {
            id,
            title,
            checked: 0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn check_result(&mut self, r: Result<bool>, what: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.check(ok, what),
            Err(e) => {
                self.checked += 1;
                self.failures.push(format!("{}: {e}", what()));
            }
        }
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} [{}] {} ({} checks", self.id, self.title, self.checked)?;
        if self.passed() {
            write!(f, ")")
        } else {
            write!(f, ", {} failed: {})", self.failures.len(), self.failures.join("; "))
        }
    }
}

fn nil3(n: usize) -> LieAlgebra {
    make_nilradical(NilradicalKind::N3, n, BasisKind::E).expect("valid dimension")
}

/// Generic families with sampled parameters for `n` in the configured range.
fn generic_specs(cfg: &SweepConfig) -> Vec<ExtensionSpec> {
    (cfg.n_min..=cfg.n_max)
        .flat_map(|n| enumerate_specs(n, &SampleParams::default()))
        .collect()
}

/// Generic families plus the complete `n = 6` and `n = 5` lists.
fn all_extension_specs(cfg: &SweepConfig) -> Vec<ExtensionSpec> {
    let dims: BTreeSet<usize> = (cfg.n_min..=cfg.n_max).chain([5, 6]).collect();
    dims.into_iter()
        .flat_map(|n| enumerate_specs(n, &SampleParams::default()))
        .collect()
}

pub fn jacobi_gate(cfg: &SweepConfig) -> CriterionReport {
    let mut r = CriterionReport::new(1, "Jacobi identity on every catalog algebra");
    for n in 5..=12 {
        for basis in [BasisKind::E, BasisKind::X] {
            let kind = if n == 5 { NilradicalKind::Dim5 } else { NilradicalKind::N3 };
            let g = make_nilradical(kind, n, basis);
            r.check_result(g.map(|g| g.check_jacobi().is_ok()), || format!("n_{{{n},3}} ({basis:?})"));
        }
    }
    for m in 4..=10 {
        let g = make_nilradical(NilradicalKind::M1, m, BasisKind::E);
        r.check_result(g.map(|g| g.check_jacobi().is_ok()), || format!("n_{{{m},1}}"));
    }
    for spec in all_extension_specs(cfg) {
        for basis in [BasisKind::E, BasisKind::X] {
            let s = spec.clone().with_basis(basis);
            r.check_result(make_extension(&s).map(|g| g.check_jacobi().is_ok()), || s.to_string());
        }
    }
    r
}

pub fn derivation_dimensions(_cfg: &SweepConfig) -> CriterionReport {
    let mut r = CriterionReport::new(2, "dim Der = 2n and dim Inn = n-1");
    for n in 7..=12 {
        let g = nil3(n);
        let der = derivation_algebra(&g).len();
        let inn = inner_derivations(&g).len();
        r.check(der == 2 * n, || format!("n={n}: dim Der = {der}"));
        r.check(inn == n - 1, || format!("n={n}: dim Inn = {inn}"));
    }
    r
}

pub fn series_tables(cfg: &SweepConfig) -> CriterionReport {
    let mut r = CriterionReport::new(3, "characteristic series match the printed tables");
    for spec in all_extension_specs(cfg) {
        let Some(expect) = printed_profile(&spec) else { continue };
        match make_extension(&spec) {
            Ok(g) => {
                let got = g.series_profile();
                r.check(got == expect, || format!("{spec}: computed {got}, printed {expect}"));
            }
            Err(e) => r.check(false, || format!("{spec}: {e}")),
        }
    }
    r
}

/// Every invariant the sweep verifies, with the algebra it belongs to.
fn invariant_cases(cfg: &SweepConfig) -> Vec<(String, LieAlgebra, Vec<InvariantExpr>)> {
    let mut out = Vec::new();
    for n in 6..=12 {
        let list = (0..=n - 5).map(|k| xi(XiVariant::N3, n, k)).collect::<Result<Vec<_>>>();
        out.push((format!("n_{{{n},3}}"), nil3(n), list.expect("valid range")));
    }
    let mut specs = generic_specs(cfg);
    specs.push(ExtensionSpec::new(Family::S6_10, 6).with_param("alpha", q(3)));
    specs.push(ExtensionSpec::new(Family::S6_4, 5));
    specs.push(ExtensionSpec::new(Family::S7, 5));
    for spec in specs {
        let g = coordinate_algebra(&spec).expect("catalog spec");
        let list = listed_invariants(&spec).expect("listed family");
        out.push((spec.to_string(), g, list));
    }
    out
}

pub fn invariant_identities(cfg: &SweepConfig) -> CriterionReport {
    let mut r = CriterionReport::new(4, "listed invariants are annihilated by every coadjoint operator");
    for (name, g, list) in invariant_cases(cfg) {
        for (k, e) in list.iter().enumerate() {
            r.check_result(verify_invariant(&g, e), || format!("{name} #{}", k + 1));
        }
    }
    r
}

pub fn invariant_counts(cfg: &SweepConfig) -> CriterionReport {
    let mut r = CriterionReport::new(5, "invariant counts and functional independence");
    let seed = cfg.seed;
    for n in 6..=12 {
        let c = invariant_count_seeded(&nil3(n), seed);
        r.check(c == n - 4, || format!("n_{{{n},3}}: {c} invariants"));
    }
    for m in 4..=10 {
        let g = make_nilradical(NilradicalKind::M1, m, BasisKind::E).expect("valid dimension");
        let c = invariant_count_seeded(&g, seed);
        r.check(c == m - 2, || format!("n_{{{m},1}}: {c} invariants"));
    }
    for spec in generic_specs(cfg) {
        let n = spec.n;
        let expect = if spec.family == Family::S_N2 { n - 6 } else { n - 5 };
        let c = make_extension(&spec).map(|g| invariant_count_seeded(&g, seed));
        r.check_result(c.map(|c| c == expect), || format!("{spec}: expected {expect}"));
    }
    for (name, g, list) in invariant_cases(cfg) {
        if list.is_empty() {
            continue;
        }
        let rank = admissible_point(&list, g.basis_names(), seed).and_then(|p| {
            let remapped = list.iter().map(|e| e.remap(g.basis_names())).collect::<Result<Vec<_>>>()?;
            independence_rank(&remapped, &p)
        });
        r.check_result(rank.map(|k| k == list.len()), || format!("{name}: independence of {} invariants", list.len()));
    }
    r
}

pub fn classification_round_trip(cfg: &SweepConfig) -> CriterionReport {
    let mut r = CriterionReport::new(6, "classification round trip and random reductions");
    let n = 8;
    for spec in enumerate_specs(n, &SampleParams::default()) {
        let actions = spec.actions().expect("catalog spec");
        let outcome: Result<bool> = (|| {
            let params = actions
                .iter()
                .map(|a| DerivationParams::from_matrix(n, a))
                .collect::<Result<Vec<_>>>()?;
            Ok(match params.as_slice() {
                [p] => reduce_to_canonical(n, p)?.label == spec,
                [p1, p2] => reduce_pair(n, p1, p2)?.label == spec,
                _ => false,
            })
        })();
        r.check_result(outcome, || spec.to_string());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut done = 0;
    let mut trial = 0;
    while done < 100 {
        let n = 6 + trial % 5;
        trial += 1;
        let p = random_params(n, &mut rng);
        if p.get(Slot::C(n - 1)).is_zero() && p.get(Slot::D(n)).is_zero() {
            continue;
        }
        done += 1;
        let outcome: Result<bool> = (|| {
            let d = build_derivation(&p)?;
            let res = reduce_to_canonical(n, &p)?;
            Ok(res.apply(&d)? == res.canonical)
        })();
        r.check_result(outcome, || format!("random parameters {}", p.to_json_string()));
    }
    r
}

pub fn nilradical_checks(cfg: &SweepConfig) -> CriterionReport {
    let mut r = CriterionReport::new(7, "the nilradical of every extension is the prescribed one");
    let mut specs = all_extension_specs(cfg);
    for m in 4..=8 {
        specs.extend(enumerate_filiform_specs(m, &SampleParams::default()));
    }
    for spec in specs {
        let g = make_extension(&spec);
        r.check_result(g.and_then(|g| verify_nilradical(&g, spec.n)), || spec.to_string());
    }
    let s = make_extension(&ExtensionSpec::new(Family::S_N1_1, 8).with_param("beta", q(2)));
    r.check_result(
        s.and_then(|g| verify_nilradical(&g, 5)).map(|b| !b),
        || "span{e1..e5} in s_{9,1}(2) is accepted".into(),
    );
    r
}

pub fn invariant_variables(cfg: &SweepConfig) -> CriterionReport {
    let mut r = CriterionReport::new(8, "invariants avoid e_3, e_(n-1), e_n");
    for (name, g, list) in invariant_cases(cfg) {
        let n = g.basis_names().iter().filter(|v| v.starts_with('e')).count();
        if n < 6 {
            continue;
        }
        let banned = ["e3".to_string(), format!("e{}", n - 1), format!("e{n}")];
        for (k, e) in list.iter().enumerate() {
            if !verify_invariant(&g, e).unwrap_or(false) {
                continue;
            }
            let used = e.used_variables();
            let hit: Vec<&String> = banned.iter().filter(|b| used.contains(*b)).collect();
            r.check(hit.is_empty(), || format!("{name} #{} uses {hit:?}", k + 1));
        }
    }
    r
}

pub fn criteria() -> Vec<fn(&SweepConfig) -> CriterionReport> {
    vec![
        jacobi_gate,
        derivation_dimensions,
        series_tables,
        invariant_identities,
        invariant_counts,
        classification_round_trip,
        nilradical_checks,
        invariant_variables,
    ]
}

pub fn run_all(cfg: &SweepConfig) -> Vec<CriterionReport> {
    criteria().into_iter().map(|c| c(cfg)).collect()
}
