//! Property tests for the algebraic invariants of the Reeb-cone machinery.

use proptest::prelude::*;

use reebflow::quad::WeightedSphereLink;
use reebflow::reeb::{
    contact_pairing, homothetic, normalization_charge, normalize_to_slice, project_tangent,
    reeb_membership, HyperplaneSlice, ReebVector,
};
use reebflow::volume::volume;

fn positive_coeffs(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..5.0, n + 1)
}

fn any_coeffs(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, n + 1)
}

proptest! {
    #[test]
    fn normalize_to_slice_is_idempotent(coeffs in positive_coeffs(2)) {
        let slice = HyperplaneSlice::standard(2);
        let xi = ReebVector::new(coeffs).unwrap();
        let once = normalize_to_slice(&xi, &slice).unwrap();
        let twice = normalize_to_slice(&once, &slice).unwrap();
        for (a, b) in once.coeffs().iter().zip(twice.coeffs()) {
            prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
        }
        prop_assert!((slice.charge(&once) - slice.level()).abs() <= 1e-12 * slice.level());
    }

    #[test]
    fn project_tangent_is_linear_and_idempotent(
        a in any_coeffs(2),
        b in any_coeffs(2),
        s in -3.0f64..3.0,
    ) {
        let pa = project_tangent(&a);
        // idempotent
        let paa = project_tangent(pa.coeffs());
        for (x, y) in pa.coeffs().iter().zip(paa.coeffs()) {
            prop_assert!((x - y).abs() <= 1e-14 * x.abs().max(1.0));
        }
        // image is the zero-sum hyperplane
        prop_assert!(pa.coeffs().iter().sum::<f64>().abs() <= 1e-12);
        // linear
        let combo: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + s * y).collect();
        let lhs = project_tangent(&combo);
        let pb = project_tangent(&b);
        for i in 0..3 {
            let rhs = pa.coeffs()[i] + s * pb.coeffs()[i];
            prop_assert!((lhs.coeffs()[i] - rhs).abs() <= 1e-12);
        }
    }

    #[test]
    fn membership_is_homothety_invariant(
        coeffs in any_coeffs(3),
        lambda in 0.01f64..100.0,
    ) {
        let xi = ReebVector::new(coeffs).unwrap();
        let scaled = homothetic(&xi, lambda).unwrap();
        prop_assert_eq!(reeb_membership(&xi), reeb_membership(&scaled));
    }

    #[test]
    fn charge_scales_inversely_under_homothety(
        coeffs in positive_coeffs(1),
        lambda in 0.01f64..100.0,
    ) {
        let xi = ReebVector::new(coeffs).unwrap();
        let scaled = homothetic(&xi, lambda).unwrap();
        let want = normalization_charge(&xi) / lambda;
        prop_assert!((normalization_charge(&scaled) - want).abs() <= 1e-12 * want.abs());
    }

    #[test]
    fn volume_scaling_law(coeffs in prop::collection::vec(0.3f64..3.0, 2), lambda in 0.5f64..2.0) {
        let link = WeightedSphereLink::with_rule(1, 64);
        let xi = ReebVector::new(coeffs).unwrap();
        let v = volume(&link, &xi).unwrap();
        let scaled = homothetic(&xi, lambda).unwrap();
        let vs = volume(&link, &scaled).unwrap();
        let want = lambda.powi(2) * v;
        prop_assert!((vs - want).abs() <= 1e-10 * want);
    }
}

#[test]
fn contact_pairing_minimum_over_dense_nodes() {
    // min over the dense node set agrees with min_i a_i within 1e-6,
    // for 20 random positive Reeb vectors per dimension.
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6060);
    for n in 1..=3usize {
        let link = WeightedSphereLink::with_rule(n, 24);
        let nodes = link.dense_node_set();
        for _ in 0..20 {
            let coeffs: Vec<f64> = (0..=n).map(|_| rng.gen_range(0.1..3.0)).collect();
            let xi = ReebVector::new(coeffs.clone()).unwrap();
            let min_nodes = nodes
                .iter()
                .map(|u| {
                    u.iter()
                        .zip(xi.coeffs())
                        .map(|(ui, ai)| ui * ai)
                        .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min);
            let min_coeff = coeffs.iter().copied().fold(f64::INFINITY, f64::min);
            assert!(
                (min_nodes - min_coeff).abs() < 1e-6,
                "n={n}: node min {min_nodes} vs coefficient min {min_coeff}"
            );
        }
    }
}

#[test]
fn contact_pairing_positivity_matches_membership() {
    use num_complex::Complex64;
    let xi = ReebVector::new(vec![1.0, 2.0]).unwrap();
    let z = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
    let pairing = contact_pairing(&xi, &z).unwrap();
    assert!(pairing > 0.0);
    assert!(reeb_membership(&xi));
}
