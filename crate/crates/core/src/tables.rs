//! Published characteristic-series dimensions for the catalog families.

use crate::algebra::SeriesProfile;
use crate::catalog::{ExtensionSpec, Family};

/// The DS/CS/US triple listed for the algebra of `spec`, if one is listed.
pub fn printed_profile(spec: &ExtensionSpec) -> Option<SeriesProfile> {
    use Family::*;
    let n = spec.n;
    let p = SeriesProfile::new;
    let profile = match spec.family {
        S_N1_1 | S_N1_6 | S_N1_9 => p(&[n + 1, n, n - 3, 0], &[n + 1, n], &[0]),
        S_N1_2 | S_N1_3 | S_N1_7 => p(&[n + 1, n - 1, n - 4, 0], &[n + 1, n - 1], &[0]),
        S_N1_4 => p(&[n + 1, n, n - 3, 0], &[n + 1, n], &[1]),
        S_N1_5 | S_N1_8 => p(&[n + 1, n - 1, 1, 0], &[n + 1, n - 1], &[0]),
        S_N2 => p(&[n + 2, n, n - 3, 0], &[n + 2, n], &[0]),
        S6_10 => p(&[7, 6, 3, 0], &[7, 6], &[0]),
        S6_1 | S6P_6 | S6P_9 => p(&[6, 5, 2, 0], &[6, 5], &[0]),
        S6_2 => p(&[6, 3, 0], &[6, 3], &[0]),
        S6_4 => p(&[6, 5, 2, 0], &[6, 5], &[1]),
        S6_5 | S6P_8 => p(&[6, 4, 1, 0], &[6, 4], &[0]),
        S6_7 => p(&[6, 4, 1, 0], &[6, 4, 3], &[0]),
        S7 => p(&[7, 5, 2, 0], &[7, 5], &[0]),
        SW_M1_1 | SW_M1_5 => p(&[n + 1, n, n - 2, 0], &[n + 1, n], &[0]),
        SW_M1_2 => p(&[n + 1, n - 1, n - 3, 0], &[n + 1, n - 1], &[0]),
        SW_M1_3 => p(&[n + 1, n, n - 2, 0], &[n + 1, n], &[1]),
        SW_M1_4 | SW_M1_6 => p(&[n + 1, n - 1, 0], &[n + 1, n - 1], &[0]),
        SW_M2 => p(&[n + 2, n, n - 2, 0], &[n + 2, n], &[0]),
        N_N3 | N_M1 | N_53 => return None,
    };
    Some(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{enumerate_filiform_specs, enumerate_specs, make_extension, SampleParams};

    #[test]
    fn catalog_matches_printed_tables() {
        let mut specs = Vec::new();
        for n in 5..=10 {
            specs.extend(enumerate_specs(n, &SampleParams::default()));
        }
        for m in 4..=8 {
            specs.extend(enumerate_filiform_specs(m, &SampleParams::default()));
        }
        let mut mismatches = Vec::new();
        for spec in specs {
            let expect = printed_profile(&spec).expect("extension families have tables");
            if make_extension(&spec).unwrap().series_profile() != expect {
                mismatches.push(spec.to_string());
            }
        }
        // at n = 7 the element e_5 has weight 0 and is not a commutator in the
        // nilradical, so [s, s] has dimension n - 1 rather than n
        assert_eq!(mismatches, vec!["s_n1_9(n=7)".to_string()]);
    }
}
