//! Cross-checks of the Hermitian eigensolver against a cyclic Jacobi
//! solver applied to the real symmetric embedding `[[Re H, -Im H], [Im H, Re H]]`.

use bpv_core::numerics::{
    eig_hermitian, eigenvalues_hermitian, kron, second_eigenvalue, CMatrix, C64,
};
use bpv_core::{build_strategy, SchmidtState, StrategyKind, StrategyParams};
use proptest::prelude::*;

/// Eigenvalues of a real symmetric matrix, descending.
#[allow(clippy::needless_range_loop)]
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut values: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    values.sort_by(|x, y| y.total_cmp(x));
    values
}

/// Hermitian eigenvalues via the doubled real embedding; each appears twice.
fn oracle_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let n = h.rows();
    let mut a = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            a[i][j] = z.re;
            a[i][j + n] = -z.im;
            a[i + n][j] = z.im;
            a[i + n][j + n] = z.re;
        }
    }
    jacobi_eigenvalues(a).into_iter().step_by(2).collect()
}

fn hermitian_from(n: usize, raw: &[f64]) -> CMatrix {
    let mut h = CMatrix::zeros(n, n);
    let mut it = raw.iter().copied().cycle();
    for i in 0..n {
        h[(i, i)] = C64::new(it.next().unwrap(), 0.0);
        for j in i + 1..n {
            let z = C64::new(it.next().unwrap(), it.next().unwrap());
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

fn general_from(rows: usize, cols: usize, raw: &[f64]) -> CMatrix {
    let mut it = raw.iter().copied().cycle();
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(it.next().unwrap(), it.next().unwrap())
    })
}

#[test]
fn strategy_i_spectrum_matches_oracle() {
    let s = SchmidtState::two_qubit(std::f64::consts::FRAC_PI_4).unwrap();
    let omega = build_strategy(&s, StrategyKind::I, &StrategyParams::with_p(0.5)).unwrap();
    let oracle = oracle_eigenvalues(omega.omega());
    for (want, got) in [1.0, 0.5, 0.5, 0.0].iter().zip(&oracle) {
        assert!((want - got).abs() < 1e-10);
    }
    let solver = eigenvalues_hermitian(omega.omega()).unwrap();
    for (a, b) in solver.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn pi_second_eigenvalue_two_qubit() {
    let s = SchmidtState::two_qubit(std::f64::consts::PI / 6.0).unwrap();
    let pi = bpv_core::strategies::pi_closed_form(&s);
    assert!((second_eigenvalue(&pi).unwrap() - 0.75).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_hermitian_decomposes(
        n in 1usize..=24,
        raw in prop::collection::vec(-1.0f64..1.0, 64..128),
    ) {
        let h = hermitian_from(n, &raw);
        let eig = eig_hermitian(&h).unwrap();
        prop_assert!(eig.reconstruction_residual(&h) <= 1e-9);
        for w in eig.values.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        for (i, a) in eig.vectors.iter().enumerate() {
            for (j, b) in eig.vectors.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                prop_assert!((a.dotc(b) - C64::new(target, 0.0)).norm() <= 1e-9);
            }
        }
        let oracle = oracle_eigenvalues(&h);
        for (a, b) in eig.values.iter().zip(&oracle) {
            prop_assert!((a - b).abs() <= 1e-9, "{} vs {}", a, b);
        }
        let second = second_eigenvalue(&h).unwrap();
        prop_assert!(second <= eig.values[0]);
    }

    #[test]
    fn kron_is_associative_and_bilinear(
        raw in prop::collection::vec(-1.0f64..1.0, 48),
        alpha in -2.0f64..2.0,
    ) {
        let a = general_from(2, 3, &raw[0..]);
        let b = general_from(3, 2, &raw[12..]);
        let c = general_from(2, 2, &raw[24..]);
        let b2 = general_from(3, 2, &raw[32..]);
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert!(left.max_abs_diff(&right) <= 1e-12);

        let mut combo = b.clone();
        combo.add_scaled(alpha, &b2);
        let mut expected = kron(&a, &b);
        expected.add_scaled(alpha, &kron(&a, &b2));
        prop_assert!(kron(&a, &combo).max_abs_diff(&expected) <= 1e-12);
    }
}

#[test]
fn second_equals_top_only_when_degenerate() {
    let distinct = CMatrix::from_real_diagonal(&[0.9, 0.4, 0.1]);
    assert!(second_eigenvalue(&distinct).unwrap() < 0.9);
    let degenerate = CMatrix::from_real_diagonal(&[0.9, 0.9, 0.1]);
    assert!((second_eigenvalue(&degenerate).unwrap() - 0.9).abs() < 1e-12);
}
