use std::f64::consts::{E, PI};

use bpv_core::bases::phased_fourier_basis;
use bpv_core::numerics::{eigenvalues_hermitian, CMatrix, Ket, C64};
use bpv_core::strategies::{default_p, p_range, standard_test, test_projector, Direction};
use bpv_core::{
    beta_nu, build_strategy, fidelity, is_homogeneous, worst_case_pass_prob, worst_case_state,
    DensityOperator, SchmidtState, Strategy, StrategyKind, StrategyParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn states() -> Vec<SchmidtState> {
    vec![
        SchmidtState::two_qubit(PI / 12.0).unwrap(),
        SchmidtState::two_qubit(PI / 6.0).unwrap(),
        SchmidtState::two_qubit(PI / 4.0).unwrap(),
        SchmidtState::new(&[3.0, 2.0, 1.0], 3).unwrap(),
        SchmidtState::new(&[2.0, 1.0, 0.0], 3).unwrap(),
        SchmidtState::new(&[4.0, 3.0, 2.0, 1.0], 4).unwrap(),
    ]
}

fn all_strategies() -> Vec<Strategy> {
    let mut out = Vec::new();
    for s in states() {
        for kind in StrategyKind::BUILT_IN {
            out.push(build_strategy(&s, kind, &StrategyParams::default()).unwrap());
        }
    }
    out
}

/// Random density operator supported on the complement of `psi`.
fn random_orthogonal_state(psi: &Ket, rank: usize, rng: &mut impl Rng) -> CMatrix {
    let dim = psi.len();
    let mut acc = CMatrix::zeros(dim, dim);
    for _ in 0..rank {
        let v = Ket::from_iterator(
            dim,
            (0..dim).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))),
        );
        let v = &v - psi * psi.dotc(&v);
        acc.add_scaled(rng.random_range(0.1..1.0), &CMatrix::outer(&v));
    }
    let tr = acc.trace().re;
    acc.scale(1.0 / tr)
}

#[test]
fn closed_form_gaps() {
    for s in states() {
        let sq = s.squared();
        let none = StrategyParams::default();
        let nu = |k| build_strategy(&s, k, &none).unwrap().nu();
        assert!((nu(StrategyKind::I) - 0.5).abs() <= 1e-10);
        assert!((nu(StrategyKind::II) - 1.0 / (1.0 + sq[0])).abs() <= 1e-10);
        assert!((nu(StrategyKind::III) - 1.0 / (1.0 + sq[0])).abs() <= 1e-10);
        assert!((nu(StrategyKind::IV) - 2.0 / (2.0 + sq[0] + sq[1])).abs() <= 1e-10);
    }
}

#[test]
fn strategy_invariants() {
    for st in all_strategies() {
        let total: f64 = st.tests().iter().map(|(w, _)| w).sum();
        assert!((total - 1.0).abs() <= 1e-12);
        assert!(st.operator_from_tests().max_abs_diff(st.omega()) <= 1e-12);
        assert!((st.spectrum()[0] - 1.0).abs() <= 1e-10);
        assert!((st.nu() - (1.0 - st.beta())).abs() == 0.0);
        let gap = beta_nu(&st).unwrap();
        assert!(gap.closed_form_residual.unwrap() <= 1e-10, "{}", st.label());

        let psi = st.state().state_vector();
        for (_, t) in st.tests() {
            assert!((t.matrix().expectation(&psi).re - 1.0).abs() <= 1e-10);
            let values = eigenvalues_hermitian(t.matrix()).unwrap();
            assert!(values[0] <= 1.0 + 1e-9 && *values.last().unwrap() >= -1e-9);
            if t.is_projector() {
                assert!((t.matrix() * t.matrix()).max_abs_diff(t.matrix()) <= 1e-9);
            }
        }
    }
}

#[test]
fn design_strategy_matches_mub_strategy() {
    for s in [
        SchmidtState::new(&[3.0, 2.0, 1.0], 3).unwrap(),
        SchmidtState::new(&[5.0, 4.0, 1.0, 1.0, 0.5], 5).unwrap(),
    ] {
        for p in [0.2, 0.5, default_p(StrategyKind::II, &s)] {
            let params = StrategyParams::with_p(p);
            let ii = build_strategy(&s, StrategyKind::II, &params).unwrap();
            let iii = build_strategy(&s, StrategyKind::III, &params).unwrap();
            assert!(ii.omega().max_abs_diff(iii.omega()) <= 1e-10);
        }
    }
}

#[test]
fn two_way_never_worse_than_average_of_directions() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..30 {
        let d = rng.random_range(2..=4);
        let raw: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..1.0)).collect();
        let s = SchmidtState::new(&raw, d).unwrap();
        let n_bases = rng.random_range(1..=3);
        let mut weights: Vec<f64> = (0..=n_bases).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let mut tests = vec![(weights[0], standard_test(&s))];
        for w in &weights[1..] {
            let phases: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..6.3)).collect();
            let b = phased_fourier_basis(&phases);
            tests.push((*w, test_projector(&s, &b, Direction::AtoB).unwrap()));
        }
        let forward = Strategy::custom(s.clone(), tests).unwrap();
        let backward = forward.mirrored().unwrap();
        let both = forward.two_way().unwrap();
        assert!(both.beta() <= 0.5 * forward.beta() + 0.5 * backward.beta() + 1e-10);
    }
}

#[test]
fn default_p_is_locally_optimal() {
    for s in states() {
        for kind in [
            StrategyKind::I,
            StrategyKind::II,
            StrategyKind::III,
            StrategyKind::IV,
        ] {
            let p0 = default_p(kind, &s);
            let base = build_strategy(&s, kind, &StrategyParams::with_p(p0))
                .unwrap()
                .beta();
            for dp in [-0.01, 0.01] {
                let p = p0 + dp;
                let (lo, hi) = p_range(kind, &s);
                if p <= lo || p >= hi {
                    continue;
                }
                let beta = build_strategy(&s, kind, &StrategyParams::with_p(p))
                    .unwrap()
                    .beta();
                assert!(beta >= base - 1e-12, "{kind} p={p}");
            }
        }
    }
}

#[test]
fn adversarial_strategies_are_homogeneous() {
    for s in [
        SchmidtState::two_qubit(PI / 6.0).unwrap(),
        SchmidtState::two_qubit(PI / 4.0).unwrap(),
        SchmidtState::new(&[3.0, 2.0, 1.0], 3).unwrap(),
    ] {
        for kind in [StrategyKind::V, StrategyKind::VI] {
            let (lo, _) = p_range(kind, &s);
            for p in [default_p(kind, &s), lo, 0.5 * (lo + 1.0), 1.0 / E] {
                if p < lo {
                    continue;
                }
                let st = build_strategy(&s, kind, &StrategyParams::with_p(p)).unwrap();
                assert!(is_homogeneous(&st, 1e-10), "{kind} p={p}");
                assert!((st.beta() - p).abs() <= 1e-10);
            }
        }
    }
    let s = SchmidtState::two_qubit(PI / 6.0).unwrap();
    let ii = build_strategy(&s, StrategyKind::II, &StrategyParams::default()).unwrap();
    assert!(!is_homogeneous(&ii, 1e-6));
}

#[test]
fn worst_case_state_saturates_bound() {
    for st in all_strategies() {
        for eps in [0.3, 0.1, 0.01] {
            let sigma = worst_case_state(st.state(), &st, eps).unwrap();
            assert!((fidelity(&sigma, st.state()).unwrap() - (1.0 - eps)).abs() <= 1e-10);
            let pass = st.pass_probability(sigma.matrix());
            assert!(
                (pass - worst_case_pass_prob(st.nu(), eps)).abs() <= 1e-10,
                "{} eps={eps}",
                st.label()
            );
        }
        let sigma = worst_case_state(st.state(), &st, 0.0).unwrap();
        assert!((st.pass_probability(sigma.matrix()) - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn worst_case_examples() {
    let s = SchmidtState::two_qubit(PI / 4.0).unwrap();
    let i = build_strategy(&s, StrategyKind::I, &StrategyParams::with_p(0.5)).unwrap();
    let sigma = worst_case_state(&s, &i, 0.01).unwrap();
    assert!((i.pass_probability(sigma.matrix()) - 0.995).abs() <= 1e-10);

    let s = SchmidtState::two_qubit(PI / 6.0).unwrap();
    let ii = build_strategy(&s, StrategyKind::II, &StrategyParams::default()).unwrap();
    let sigma = worst_case_state(&s, &ii, 0.01).unwrap();
    assert!((ii.pass_probability(sigma.matrix()) - (1.0 - 0.01 * 4.0 / 7.0)).abs() <= 1e-10);
}

#[test]
fn random_states_respect_worst_case_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(5150);
    for st in all_strategies().into_iter().step_by(2) {
        let psi = st.state().state_vector();
        let target = st.state().projector();
        for i in 0..1000 / 18 + 1 {
            let eps = [0.3, 0.1, 0.01][i % 3];
            let rank = 1 + i % 3;
            let mut m = target.scale(1.0 - eps);
            m.add_scaled(eps, &random_orthogonal_state(&psi, rank, &mut rng));
            let sigma = DensityOperator::new(m).unwrap();
            assert!((fidelity(&sigma, st.state()).unwrap() - (1.0 - eps)).abs() <= 1e-10);
            let pass = st.pass_probability(sigma.matrix());
            assert!(pass <= worst_case_pass_prob(st.nu(), eps) + 1e-10);
        }
    }
}
