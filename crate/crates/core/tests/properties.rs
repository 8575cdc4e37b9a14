use std::collections::BTreeMap;

use nilext::catalog::{
    e_to_x_permutation, make_extension, make_nilradical, permutation_matrix, BasisKind, ExtensionSpec, Family,
    NilradicalKind,
};
use nilext::derivations::{
    build_automorphism, build_derivation, conjugate, is_derivation, AutomorphismParams, DerivationParams,
};
use nilext::linear::{nullspace, qf, Matrix, Rational};
use proptest::prelude::*;

fn small() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=3).prop_map(|(a, b)| qf(a, b))
}

fn nonzero() -> impl Strategy<Value = Rational> {
    small().prop_filter("nonzero", |r| *r != qf(0, 1))
}

fn vector(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec(small(), n)
}

fn params_for(n: usize) -> impl Strategy<Value = DerivationParams> {
    let slots = DerivationParams::slots(n);
    proptest::collection::vec(small(), slots.len()).prop_map(move |vals| {
        let mut p = DerivationParams::zero(n);
        for (s, v) in slots.iter().zip(vals) {
            p.set(*s, v);
        }
        p
    })
}

fn automorphism_for(n: usize) -> impl Strategy<Value = AutomorphismParams> {
    (nonzero(), nonzero(), small(), small(), vector(3), vector(n - 3)).prop_map(move |(b, k, l, m, psi, rho)| {
        let mut a = AutomorphismParams::scaling(n, b, k);
        a.lambda = l;
        a.mu = m;
        a.psi = (1..=3).zip(psi).collect::<BTreeMap<_, _>>();
        a.rho = (1..=n - 3).zip(rho).collect::<BTreeMap<_, _>>();
        a
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn bracket_is_antisymmetric((x, y) in (6usize..=10).prop_flat_map(|n| (vector(n), vector(n)))) {
        let g = make_nilradical(NilradicalKind::N3, x.len(), BasisKind::X).unwrap();
        let xy = g.bracket(&x, &y).unwrap();
        let yx = g.bracket(&y, &x).unwrap();
        prop_assert!(xy.iter().zip(&yx).all(|(a, b)| *a == -b.clone()));
    }

    #[test]
    fn rank_plus_nullity(rows in 1usize..=5, cols in 1usize..=5, entries in vector(25)) {
        let m = Matrix::from_rows((0..rows).map(|i| entries[i * cols..(i + 1) * cols].to_vec()).collect()).unwrap();
        let kernel = nullspace(&m);
        prop_assert_eq!(m.rank() + kernel.len(), cols);
        for v in kernel {
            prop_assert!(m.mul_vec(&v).unwrap().iter().all(|x| *x == qf(0, 1)));
        }
    }

    #[test]
    fn change_basis_round_trip(n in 6usize..=10, beta in small()) {
        let spec = ExtensionSpec::new(Family::S_N1_1, n).with_param("beta", beta);
        let g = make_extension(&spec);
        prop_assume!(g.is_ok());
        let g = g.unwrap();
        let mut sigma = e_to_x_permutation(n);
        sigma.push(n);
        let p = permutation_matrix(&sigma);
        let back = g.change_basis(&p).unwrap().change_basis(&p.inverse().unwrap()).unwrap();
        prop_assert_eq!(back.brackets(), g.brackets());
    }

    #[test]
    fn spec_json_round_trip(n in 6usize..=12, a in small(), b in small()) {
        for spec in [
            ExtensionSpec::new(Family::S_N1_1, n).with_param("beta", a.clone()),
            ExtensionSpec::new(Family::S_N1_8, n).with_param("a2", a.clone()).with_param("a3", b.clone()).with_basis(BasisKind::X),
        ] {
            let back = ExtensionSpec::from_json_str(&spec.to_json_string()).unwrap();
            prop_assert_eq!(back, spec);
        }
    }

    #[test]
    fn derivation_params_json_round_trip(p in (6usize..=10).prop_flat_map(params_for)) {
        let back = DerivationParams::from_json_str(&p.to_json_string()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn conjugation_preserves_derivations(
        (p, a) in (6usize..=9).prop_flat_map(|n| (params_for(n), automorphism_for(n)))
    ) {
        let n = p.n;
        let phi = build_automorphism(&a);
        prop_assume!(phi.is_ok());
        let d = build_derivation(&p).unwrap();
        let g = make_nilradical(NilradicalKind::N3, n, BasisKind::E).unwrap();
        prop_assert!(is_derivation(&g, &conjugate(&phi.unwrap(), &d).unwrap()));
    }
}
