use proptest::prelude::*;

use geamkit::geam::design_params;
use geamkit::linalg::{self, kron, partial_trace, trace_norm, Subsystem, Tolerances};
use geamkit::measures::{self, ProbabilityVector};
use geamkit::presets::{preset, Preset};
use geamkit::states::{
    bipartite_from_schmidt, random_mixed, random_unitary, schmidt_decompose, seeded_rng,
    SchmidtVector,
};

fn schmidt_vector(max_d: usize) -> impl Strategy<Value = (usize, Vec<f64>)> {
    (2..=max_d).prop_flat_map(|d| {
        (Just(d), prop::collection::vec(0.0f64..1.0, 1..=d)).prop_filter_map("nonzero", |(d, raw)| {
            let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
            (norm > 1e-3).then(|| (d, raw.iter().map(|x| x / norm).collect()))
        })
    })
}

fn distribution() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 2..30).prop_filter_map("nonzero", |raw| {
        let total: f64 = raw.iter().sum();
        (total > 1e-6).then(|| raw.iter().map(|x| x / total).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn schmidt_round_trip((d, lambda) in schmidt_vector(6), seed in any::<u64>()) {
        let lambda = SchmidtVector::new(lambda).unwrap();
        let psi = bipartite_from_schmidt(&lambda, d, &mut seeded_rng(seed)).unwrap();
        let back = schmidt_decompose(&psi).unwrap();
        for (i, x) in back.coefficients().iter().enumerate() {
            let want = lambda.coefficients().get(i).copied().unwrap_or(0.0);
            prop_assert!((x - want).abs() < 1e-10, "{x} vs {want}");
        }
    }

    #[test]
    fn fractional_powers_recombine(d in 2usize..6, seed in any::<u64>(), mu in 0.0f64..=1.0) {
        let mut rng = seeded_rng(seed);
        let rank = 1 + (seed as usize) % d;
        let rho = random_mixed(d, rank, &mut rng).unwrap();
        let tol = Tolerances::default();
        let a = linalg::fractional_power(rho.matrix(), mu, &tol).unwrap();
        let b = linalg::fractional_power(rho.matrix(), 1.0 - mu, &tol).unwrap();
        prop_assert!((&a * &b - rho.matrix()).norm() < 1e-10);
        prop_assert!((linalg::trace(&(a * b)).re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn partial_trace_is_linear_and_inverts_products(seed in any::<u64>(), x in -2.0f64..2.0) {
        let mut rng = seeded_rng(seed);
        let a = random_mixed(2, 2, &mut rng).unwrap().into_matrix();
        let b = random_mixed(3, 2, &mut rng).unwrap().into_matrix();
        let c = random_mixed(2, 1, &mut rng).unwrap().into_matrix();
        let ab = kron(&a, &b);
        let cb = kron(&c, &b);
        let first = partial_trace(&ab, 2, 3, Subsystem::Second).unwrap();
        prop_assert!((first - &a).norm() < 1e-12);
        let second = partial_trace(&ab, 2, 3, Subsystem::First).unwrap();
        prop_assert!((second - &b).norm() < 1e-12);
        let combined = partial_trace(&(&ab + cb.scale(x)), 2, 3, Subsystem::Second).unwrap();
        let separate = partial_trace(&ab, 2, 3, Subsystem::Second).unwrap()
            + partial_trace(&cb, 2, 3, Subsystem::Second).unwrap().scale(x);
        prop_assert!((combined - separate).norm() < 1e-12);
    }

    #[test]
    fn trace_norm_is_a_unitarily_invariant_norm(seed in any::<u64>(), d in 2usize..6) {
        let mut rng = seeded_rng(seed);
        let a = random_mixed(d, d, &mut rng).unwrap().into_matrix() - random_mixed(d, 1, &mut rng).unwrap().into_matrix();
        let b = random_unitary(d, &mut rng).scale(0.3);
        prop_assert!(trace_norm(&(&a + &b)) <= trace_norm(&a) + trace_norm(&b) + 1e-12);
        let u = random_unitary(d, &mut rng);
        let v = random_unitary(d, &mut rng);
        prop_assert!((trace_norm(&(&u * &a * &v)) - trace_norm(&a)).abs() < 1e-10);
    }

    #[test]
    fn entropy_bounds_hold_for_any_distribution(p in distribution()) {
        let p = ProbabilityVector::flat(p).unwrap();
        let c = p.coincidence();
        for nu in [2.0, 2.5, 3.0, 4.0] {
            prop_assert!(measures::renyi_entropy(&p, nu).unwrap() >= measures::renyi_bound(c, nu).unwrap() - 1e-12);
        }
        for nu in [0.1, 0.5, 1.0, 1.5, 2.0] {
            prop_assert!(measures::tsallis_entropy(&p, nu).unwrap() >= measures::tsallis_bound(c, nu).unwrap() - 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn two_routes_agree_for_any_purity_parameter(d in 2usize..5, t in 0.05f64..1.0, seed in any::<u64>()) {
        let df = d as f64;
        let b = 1.0 / df + t * (1.0 - 1.0 / df);
        for kind in [Preset::Mum { b }, Preset::Gsic { b }] {
            let g = preset(&kind, d).unwrap();
            let params = design_params(&g, 1e-10).unwrap();
            let row = kind.family_params(d);
            prop_assert!((params.s - row.s).abs() < 1e-12);
            let sum = g.operators().fold(linalg::zeros(d), |acc, p| acc + p * p);
            let expected = linalg::identity(d).scale(row.c_max + (df - 1.0) * row.s);
            prop_assert!((sum - expected).norm() < 1e-10);
            let mut rng = seeded_rng(seed);
            let rho = random_mixed(d, d, &mut rng).unwrap();
            let direct = measures::index_of_coincidence(&g, &rho).unwrap();
            let formula = measures::ioc_formula(&params, rho.purity(), d).unwrap();
            prop_assert!((direct - formula).abs() < 1e-10);
            let q = measures::quantum_uncertainty(&g, &rho, 0.3, None).unwrap();
            prop_assert!((q - measures::coherence_formula(&params, &rho, 0.3, None).unwrap()).abs() < 1e-8);
        }
    }
}
