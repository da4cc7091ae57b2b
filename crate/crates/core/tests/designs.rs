use bpv_core::bases::{design_target, next_prime, phased_fourier_basis, second_moment};
use bpv_core::strategies::{pi_from_set, standard_test, test_projector, Direction};
use bpv_core::{
    prime_mub_set, roy_scott_set, standard_basis, verify_2design, CMatrix, SchmidtState,
    WeightedBasisSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(d: usize, rng: &mut impl Rng) -> SchmidtState {
    let raw: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..1.0)).collect();
    SchmidtState::new(&raw, d).unwrap()
}

#[test]
fn complete_mub_sets_are_designs() {
    for d in [2, 3, 5, 7] {
        let set = prime_mub_set(d).unwrap();
        assert_eq!(set.len(), d + 1);
        let check = verify_2design(&set, 1e-10);
        assert!(check.passed, "d={d} residual={}", check.residual);
        for b in set.bases() {
            assert!(b.orthonormality_defect() <= 1e-10);
        }
        assert!((set.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn roy_scott_designs() {
    for (d, m) in [(3, 4), (4, 8), (6, 20), (5, 14)] {
        let set = roy_scott_set(d, Some(m)).unwrap();
        let check = verify_2design(&set, 1e-10);
        assert!(check.passed, "d={d} m={m} residual={}", check.residual);
        assert!(set.bases()[0].is_standard());
        for b in set.bases() {
            assert!(b.orthonormality_defect() <= 1e-10);
        }
        assert!((set.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn qubit_roy_scott_phases_would_collapse() {
    // With d = 2 the binomial phase is zero for k in {0, 1}; every
    // non-standard basis is the Fourier basis, and the set is not a design.
    let f = bpv_core::fourier_basis(2);
    let set = WeightedBasisSet::new(
        vec![standard_basis(2), f.clone(), f],
        vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
    )
    .unwrap();
    assert!(!verify_2design(&set, 1e-10).passed);
}

#[test]
fn second_moment_trace_is_d() {
    let set = roy_scott_set(4, None).unwrap();
    let moment = second_moment(&set);
    assert!((moment.trace().re - 4.0).abs() < 1e-12);
    assert!((design_target(4).trace().re - 4.0).abs() < 1e-12);
}

#[test]
fn weighted_projectors_reproduce_pi() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cases: Vec<(usize, WeightedBasisSet)> = vec![
        (2, prime_mub_set(2).unwrap()),
        (3, prime_mub_set(3).unwrap()),
        (5, prime_mub_set(5).unwrap()),
        (3, roy_scott_set(3, None).unwrap()),
        (6, roy_scott_set(6, Some(20)).unwrap()),
    ];
    for (d, set) in cases {
        for _ in 0..3 {
            let s = random_state(d, &mut rng);
            let pi = bpv_core::strategies::pi_closed_form(&s);
            // sum_{l>=1} w_l P_l = d Π / (d+1)
            let mut lhs = CMatrix::zeros(d * d, d * d);
            for (basis, w) in set.iter().skip(1) {
                lhs.add_scaled(
                    w,
                    test_projector(&s, basis, Direction::AtoB).unwrap().matrix(),
                );
            }
            let rhs = pi.scale(d as f64 / (d + 1) as f64);
            assert!(lhs.max_abs_diff(&rhs) <= 1e-10, "d={d}");
            let op = bpv_core::pi_operator(&s, &set).unwrap();
            assert!(op.verified(1e-10));
            assert!(
                pi_from_set(&s, &set, Direction::AtoB)
                    .unwrap()
                    .max_abs_diff(&pi)
                    <= 1e-10
            );
        }
    }
}

#[test]
fn embedded_state_pi_identity() {
    let s = SchmidtState::new(&[5.0, 4.0, 3.0, 2.0, 1.0, 1.0], 6).unwrap();
    let e = s.embed(next_prime(6)).unwrap();
    let op = bpv_core::pi_operator(&e, &prime_mub_set(7).unwrap()).unwrap();
    assert!(op.verified(1e-10));
}

#[test]
fn orthogonal_supports_for_unbiased_bases() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..20 {
        let theta = rng.random_range(1e-3..std::f64::consts::FRAC_PI_4);
        let s = SchmidtState::two_qubit(theta).unwrap();
        let phases: Vec<f64> = (0..2).map(|_| rng.random_range(0.0..6.3)).collect();
        check_orthogonal(&s, &phases, trial);

        let d = 3 + trial % 3;
        let s = random_state(d, &mut rng);
        let phases: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..6.3)).collect();
        check_orthogonal(&s, &phases, trial);
    }
}

fn check_orthogonal(s: &SchmidtState, phases: &[f64], trial: usize) {
    let b1 = phased_fourier_basis(phases);
    let psi = s.projector();
    let p0 = standard_test(s).matrix() - &psi;
    let p1 = test_projector(s, &b1, Direction::AtoB).unwrap().matrix() - &psi;
    let overlap = p0.trace_product(&p1);
    assert!(overlap.norm() <= 1e-10, "trial {trial}: {overlap}");
    let full = standard_test(s)
        .matrix()
        .trace_product(test_projector(s, &b1, Direction::AtoB).unwrap().matrix());
    assert!((full.re - 1.0).abs() <= 1e-10);
}
