//! Test operators built from local measurements and the verification
//! strategies assembled from them.
//!
//! A conditional-projector test has one party measure a basis `{|u_j>}`;
//! outcome `j` collapses the other party onto `<u_j|Psi>`, which it then
//! checks with the two-outcome measurement `{|v_j><v_j|, I - |v_j><v_j|}`.
//! A randomized diagonal test has both parties measure the standard basis
//! and accept outcome pair `(j, k)` with probability `a_jk`.

use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bases::{
    fourier_basis, is_prime, is_unbiased, next_prime, prime_mub_set, roy_scott_set, standard_basis,
    Basis, WeightedBasisSet,
};
use crate::error::{Error, Result};
use crate::numerics::{eig_hermitian, kron, CMatrix, Ket, C64, STRUCT_TOL};
use crate::states::SchmidtState;

/// Outcomes with `|| <u_j|Psi> ||^2` at or below this are treated as
/// outside the support of the target.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Which party measures first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// Alice measures the basis, Bob checks the conditional ket.
    AtoB,
    /// Bob measures the basis, Alice checks the conditional ket.
    BtoA,
}

impl Direction {
    pub fn flipped(self) -> Direction {
        match self {
            Direction::AtoB => Direction::BtoA,
            Direction::BtoA => Direction::AtoB,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TestKind {
    /// `sum_j P_{u_j} ⊗ P_{v_j}` over supported outcomes. `basis` belongs
    /// to the measuring party; `outcomes` lists `(j, |v_j>)`.
    ConditionalProjector {
        basis: Basis,
        outcomes: Vec<(usize, Ket)>,
    },
    /// Standard-basis outcome pair `(j, k)` passes with probability
    /// `acceptance[j * d + k]`.
    RandomizedDiagonal { acceptance: Vec<f64> },
}

/// One pass/fail test together with the operator it realizes.
#[derive(Clone, Debug, PartialEq)]
pub struct TestOperator {
    d: usize,
    kind: TestKind,
    direction: Direction,
    matrix: CMatrix,
}

impl TestOperator {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kind(&self) -> &TestKind {
        &self.kind
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn is_projector(&self) -> bool {
        matches!(self.kind, TestKind::ConditionalProjector { .. })
    }

    /// Rebuilds the operator from the sampling data alone (basis kets and
    /// conditional kets, or the acceptance table).
    pub fn operator_from_parts(&self) -> CMatrix {
        let d = self.d;
        match &self.kind {
            TestKind::ConditionalProjector { basis, outcomes } => {
                let mut acc = CMatrix::zeros(d * d, d * d);
                for (j, v) in outcomes {
                    let pu = CMatrix::outer(basis.ket(*j));
                    let pv = CMatrix::outer(v);
                    let term = match self.direction {
                        Direction::AtoB => kron(&pu, &pv),
                        Direction::BtoA => kron(&pv, &pu),
                    };
                    acc.add_scaled(1.0, &term);
                }
                acc
            }
            TestKind::RandomizedDiagonal { acceptance } => CMatrix::from_real_diagonal(acceptance),
        }
    }

    /// Same test with the roles of Alice and Bob exchanged.
    pub fn mirrored(&self, s: &SchmidtState) -> Result<TestOperator> {
        match &self.kind {
            TestKind::ConditionalProjector { basis, .. } => {
                test_projector(s, basis, self.direction.flipped())
            }
            TestKind::RandomizedDiagonal { acceptance } => {
                let d = self.d;
                let transposed: Vec<f64> = (0..d * d)
                    .map(|i| acceptance[(i % d) * d + i / d])
                    .collect();
                randomized_diagonal(transposed, d, self.direction.flipped())
            }
        }
    }
}

/// Conditional-projector test for basis `b` measured by the first party of
/// `direction`. Outcomes whose conditional ket has squared norm at most
/// [`SUPPORT_CUTOFF`] are left out.
pub fn test_projector(s: &SchmidtState, b: &Basis, direction: Direction) -> Result<TestOperator> {
    let d = s.d();
    if b.d() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: b.d(),
        });
    }
    let mut outcomes = Vec::new();
    for (j, u) in b.kets().iter().enumerate() {
        // <u_j|Psi> = sum_k s_k conj(u_j[k]) |k>, identical for both directions
        // because the Schmidt form is symmetric.
        let tilde = Ket::from_iterator(
            d,
            s.coeffs()
                .iter()
                .zip(u.iter())
                .map(|(sk, uk)| uk.conj() * *sk),
        );
        let norm_sqr = tilde.norm_squared();
        if norm_sqr > SUPPORT_CUTOFF {
            outcomes.push((j, tilde / C64::new(norm_sqr.sqrt(), 0.0)));
        }
    }
    let mut op = TestOperator {
        d,
        kind: TestKind::ConditionalProjector {
            basis: b.clone(),
            outcomes,
        },
        direction,
        matrix: CMatrix::zeros(d * d, d * d),
    };
    op.matrix = op.operator_from_parts();
    Ok(op)
}

/// Diagonal test with the given acceptance table (row-major, `d x d`).
pub fn randomized_diagonal(
    acceptance: Vec<f64>,
    d: usize,
    direction: Direction,
) -> Result<TestOperator> {
    if acceptance.len() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: acceptance.len(),
        });
    }
    if let Some(&a) = acceptance.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::OutOfRange {
            name: "acceptance probability",
            value: a,
            range: "[0, 1]",
        });
    }
    let matrix = CMatrix::from_real_diagonal(&acceptance);
    Ok(TestOperator {
        d,
        kind: TestKind::RandomizedDiagonal { acceptance },
        direction,
        matrix,
    })
}

/// The standard test `P_0 = sum_{j: s_j > 0} |jj><jj|`.
pub fn standard_test(s: &SchmidtState) -> TestOperator {
    test_projector(s, &standard_basis(s.d()), Direction::AtoB)
        .expect("standard basis has the state's dimension")
}

fn clamp_unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// `Q_0`: equal outcomes always pass, `(j, k)` with `j != k` passes with
/// probability `1 - (1/p - 1) s_k^2`.
pub fn q0_test(s: &SchmidtState, p: f64) -> Result<TestOperator> {
    let d = s.d();
    let sq = s.squared();
    let r = 1.0 / p - 1.0;
    let table = (0..d * d)
        .map(|i| {
            let (j, k) = (i / d, i % d);
            if j == k {
                1.0
            } else {
                clamp_unit(1.0 - r * sq[k])
            }
        })
        .collect();
    randomized_diagonal(table, d, Direction::AtoB)
}

/// `Q~_0`: as [`q0_test`] with the symmetric rate `1 - (1/p - 1)(s_j^2 + s_k^2)/2`.
pub fn q0_tilde_test(s: &SchmidtState, p: f64, direction: Direction) -> Result<TestOperator> {
    let d = s.d();
    let sq = s.squared();
    let r = 1.0 / p - 1.0;
    let table = (0..d * d)
        .map(|i| {
            let (j, k) = (i / d, i % d);
            if j == k {
                1.0
            } else {
                clamp_unit(1.0 - 0.5 * r * (sq[j] + sq[k]))
            }
        })
        .collect();
    randomized_diagonal(table, d, direction)
}

/// `|Psi><Psi| + I ⊗ rho_B - sum_k s_k^2 |kk><kk|`.
pub fn pi_closed_form(s: &SchmidtState) -> CMatrix {
    let d = s.d();
    let sq = s.squared();
    let mut pi = s.projector();
    for j in 0..d {
        for k in 0..d {
            if j != k {
                pi[(j * d + k, j * d + k)] += C64::new(sq[k], 0.0);
            }
        }
    }
    pi
}

/// `|Psi><Psi| + sum_{j != k} (s_j^2 + s_k^2)/2 |jk><jk|`.
pub fn pi_two_way(s: &SchmidtState) -> CMatrix {
    let d = s.d();
    let sq = s.squared();
    let mut pi = s.projector();
    for j in 0..d {
        for k in 0..d {
            if j != k {
                pi[(j * d + k, j * d + k)] += C64::new(0.5 * (sq[j] + sq[k]), 0.0);
            }
        }
    }
    pi
}

/// `(d+1)/d * sum_{l >= 1} w_l P_l` for a set whose first basis is the
/// standard basis with weight `1/(d+1)`.
pub fn pi_from_set(
    s: &SchmidtState,
    set: &WeightedBasisSet,
    direction: Direction,
) -> Result<CMatrix> {
    let d = s.d();
    let mut acc = CMatrix::zeros(d * d, d * d);
    for (basis, w) in set.iter().skip(1) {
        acc.add_scaled(w, test_projector(s, basis, direction)?.matrix());
    }
    Ok(acc.scale((d + 1) as f64 / d as f64))
}

/// Closed-form `Π` together with its distance from the operator averaged
/// over the actual test projectors of `set`.
#[derive(Clone, Debug)]
pub struct PiOperator {
    pub matrix: CMatrix,
    pub residual: f64,
}

impl PiOperator {
    pub fn verified(&self, tol: f64) -> bool {
        self.residual <= tol
    }
}

pub fn pi_operator(s: &SchmidtState, set: &WeightedBasisSet) -> Result<PiOperator> {
    let matrix = pi_closed_form(s);
    let residual = pi_from_set(s, set, Direction::AtoB)?.max_abs_diff(&matrix);
    Ok(PiOperator { matrix, residual })
}

/// The six constructions, plus strategies assembled by hand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StrategyKind {
    I,
    II,
    III,
    IV,
    V,
    VI,
    Custom,
}

impl StrategyKind {
    pub const BUILT_IN: [StrategyKind; 6] = [
        StrategyKind::I,
        StrategyKind::II,
        StrategyKind::III,
        StrategyKind::IV,
        StrategyKind::V,
        StrategyKind::VI,
    ];
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StrategyKind::I => "I",
            StrategyKind::II => "II",
            StrategyKind::III => "III",
            StrategyKind::IV => "IV",
            StrategyKind::V => "V",
            StrategyKind::VI => "VI",
            StrategyKind::Custom => "custom",
        };
        f.write_str(s)
    }
}

impl FromStr for StrategyKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(StrategyKind::I),
            "II" | "2" => Ok(StrategyKind::II),
            "III" | "3" => Ok(StrategyKind::III),
            "IV" | "4" => Ok(StrategyKind::IV),
            "V" | "5" => Ok(StrategyKind::V),
            "VI" | "6" => Ok(StrategyKind::VI),
            "CUSTOM" => Ok(StrategyKind::Custom),
            other => Err(format!("unknown strategy `{other}` (expected I..VI)")),
        }
    }
}

/// Optional knobs for [`build_strategy`]; `None` selects the default.
#[derive(Clone, Debug, Default)]
pub struct StrategyParams {
    /// Probability of the standard (or randomized diagonal) test.
    pub p: Option<f64>,
    /// Number of bases for the Roy–Scott design.
    pub m: Option<usize>,
    /// Second basis for strategy I; must be unbiased with the standard basis.
    pub basis_1: Option<Basis>,
}

impl StrategyParams {
    pub fn with_p(p: f64) -> Self {
        StrategyParams {
            p: Some(p),
            ..Default::default()
        }
    }
}

/// Admissible interval `[lo, hi)` for `p` (strategy I uses `(0, 1)`).
pub fn p_range(kind: StrategyKind, s: &SchmidtState) -> (f64, f64) {
    let sq = s.squared();
    match kind {
        StrategyKind::V => (sq[0] / (1.0 + sq[0]), 1.0),
        StrategyKind::VI => {
            let t = sq[0] + sq[1];
            (t / (2.0 + t), 1.0)
        }
        _ => (0.0, 1.0),
    }
}

/// Default `p`: the value minimizing `beta` for I–IV, the adversarial
/// optimum for V and `1/e` for VI.
pub fn default_p(kind: StrategyKind, s: &SchmidtState) -> f64 {
    let sq = s.squared();
    match kind {
        StrategyKind::I | StrategyKind::Custom => 0.5,
        StrategyKind::II | StrategyKind::III => sq[0] / (1.0 + sq[0]),
        StrategyKind::IV => {
            let t = sq[0] + sq[1];
            t / (2.0 + t)
        }
        StrategyKind::V => (1.0 / E).max(sq[0] / (1.0 + sq[0])),
        StrategyKind::VI => 1.0 / E,
    }
}

/// Closed-form second eigenvalue for the built-in constructions.
pub fn closed_form_beta(kind: StrategyKind, s: &SchmidtState, p: f64) -> Option<f64> {
    let sq = s.squared();
    match kind {
        StrategyKind::I => Some(p.max(1.0 - p)),
        StrategyKind::II | StrategyKind::III => Some(p.max((1.0 - p) * sq[0])),
        StrategyKind::IV => Some(p.max((1.0 - p) * 0.5 * (sq[0] + sq[1]))),
        StrategyKind::V | StrategyKind::VI => Some(p),
        StrategyKind::Custom => None,
    }
}

/// Weighted test list plus the assembled verification operator and its
/// spectral data. Immutable once built.
#[derive(Clone, Debug)]
pub struct Strategy {
    state: SchmidtState,
    tests: Vec<(f64, TestOperator)>,
    omega: CMatrix,
    spectrum: Vec<f64>,
    beta: f64,
    nu: f64,
    label: StrategyKind,
    p: Option<f64>,
}

impl Strategy {
    /// Assembles `Ω = sum_l p_l T_l` and computes `beta`, `nu`.
    ///
    /// Zero-probability tests are dropped. Every test must accept the target
    /// with certainty and the target must be the top eigenvector of `Ω`.
    pub fn custom(state: SchmidtState, tests: Vec<(f64, TestOperator)>) -> Result<Strategy> {
        Strategy::assemble(state, tests, StrategyKind::Custom, None)
    }

    fn assemble(
        state: SchmidtState,
        tests: Vec<(f64, TestOperator)>,
        label: StrategyKind,
        p: Option<f64>,
    ) -> Result<Strategy> {
        let dim = state.dim();
        let total: f64 = tests.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::OutOfRange {
                name: "total test probability",
                value: total,
                range: "{1}",
            });
        }
        let tests: Vec<_> = tests.into_iter().filter(|(w, _)| *w > 0.0).collect();
        let psi = state.state_vector();
        let mut omega = CMatrix::zeros(dim, dim);
        for (w, t) in &tests {
            if t.matrix().rows() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: t.matrix().rows(),
                });
            }
            let pass = t.matrix().expectation(&psi).re;
            if (pass - 1.0).abs() > STRUCT_TOL {
                return Err(Error::OutOfRange {
                    name: "target pass probability",
                    value: pass,
                    range: "{1}",
                });
            }
            omega.add_scaled(*w, t.matrix());
        }
        let eig = eig_hermitian(&omega)?;
        let top = eig.values[0];
        if (top - 1.0).abs() > 1e-8 {
            return Err(Error::TopEigenvalueNotOne(top));
        }
        let overlap = eig.vectors[0].dotc(&psi).norm_sqr();
        if overlap < 1.0 - 1e-8 {
            return Err(Error::TargetNotTopEigenvector(overlap));
        }
        let beta = eig.values.get(1).copied().unwrap_or(top);
        Ok(Strategy {
            state,
            tests,
            omega,
            spectrum: eig.values,
            beta,
            nu: 1.0 - beta,
            label,
            p,
        })
    }

    pub fn state(&self) -> &SchmidtState {
        &self.state
    }

    pub fn tests(&self) -> &[(f64, TestOperator)] {
        &self.tests
    }

    pub fn omega(&self) -> &CMatrix {
        &self.omega
    }

    /// Eigenvalues of `Ω`, descending with multiplicity.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn label(&self) -> StrategyKind {
        self.label
    }

    /// Mixing probability used by the builder, if any.
    pub fn p(&self) -> Option<f64> {
        self.p
    }

    /// `sum_l p_l T_l` rebuilt from the sampling data of each test.
    pub fn operator_from_tests(&self) -> CMatrix {
        let dim = self.state.dim();
        let mut acc = CMatrix::zeros(dim, dim);
        for (w, t) in &self.tests {
            acc.add_scaled(*w, &t.operator_from_parts());
        }
        acc
    }

    /// `tr(Ω σ)`.
    pub fn pass_probability(&self, sigma: &CMatrix) -> f64 {
        self.omega.trace_product(sigma).re
    }

    /// Unit eigenvector of eigenvalue `beta` orthogonal to the target.
    pub fn beta_eigenvector(&self) -> Result<Ket> {
        let eig = eig_hermitian(&self.omega)?;
        let psi = self.state.state_vector();
        let mut best: Option<Ket> = None;
        let mut best_norm = 0.0;
        for (lambda, v) in eig.values.iter().zip(&eig.vectors) {
            if (lambda - self.beta).abs() > 1e-8 {
                continue;
            }
            let residual = v - &psi * psi.dotc(v);
            let n = residual.norm();
            if n > best_norm {
                best_norm = n;
                best = Some(residual);
            }
        }
        match best {
            Some(v) if best_norm > 1e-6 => Ok(v / C64::new(best_norm, 0.0)),
            _ => Err(Error::DegenerateSpectrum),
        }
    }

    /// Same tests with Alice and Bob exchanged.
    pub fn mirrored(&self) -> Result<Strategy> {
        let tests = self
            .tests
            .iter()
            .map(|(w, t)| Ok((*w, t.mirrored(&self.state)?)))
            .collect::<Result<Vec<_>>>()?;
        Strategy::assemble(self.state.clone(), tests, StrategyKind::Custom, self.p)
    }

    /// `½ Ω + ½ Ω_mirrored`.
    pub fn two_way(&self) -> Result<Strategy> {
        let mirrored = self.mirrored()?;
        let tests = self
            .tests
            .iter()
            .map(|(w, t)| (0.5 * w, t.clone()))
            .chain(mirrored.tests.into_iter().map(|(w, t)| (0.5 * w, t)))
            .collect();
        Strategy::assemble(self.state.clone(), tests, StrategyKind::Custom, self.p)
    }
}

/// Basis set behind `Π`: a complete MUB set for prime `d`, otherwise the
/// Roy–Scott design (`m` only affects the latter).
fn design_for(d: usize, m: Option<usize>) -> Result<WeightedBasisSet> {
    if is_prime(d) {
        prime_mub_set(d)
    } else {
        roy_scott_set(d, m)
    }
}

/// Tests `p_l = (1-p)(d+1) w_l / d` for the non-standard bases of `set`.
fn design_tests(
    s: &SchmidtState,
    set: &WeightedBasisSet,
    p: f64,
    directions: &[Direction],
) -> Result<Vec<(f64, TestOperator)>> {
    let d = s.d() as f64;
    let share = 1.0 / directions.len() as f64;
    let mut tests = Vec::new();
    for (basis, w) in set.iter().skip(1) {
        let pl = (1.0 - p) * (d + 1.0) * w / d;
        for &dir in directions {
            tests.push((share * pl, test_projector(s, basis, dir)?));
        }
    }
    Ok(tests)
}

const BOTH: [Direction; 2] = [Direction::AtoB, Direction::BtoA];

/// Builds one of the six strategies for an entangled target.
///
/// Strategy II on a non-prime `d` is built on the state embedded in the
/// next prime dimension, so `strategy.state()` may differ from `s`.
pub fn build_strategy(
    s: &SchmidtState,
    kind: StrategyKind,
    params: &StrategyParams,
) -> Result<Strategy> {
    if !s.is_entangled() {
        return Err(Error::SeparableState);
    }
    if kind == StrategyKind::Custom {
        return Err(Error::OutOfRange {
            name: "strategy kind",
            value: f64::NAN,
            range: "I..VI",
        });
    }
    let p = params.p.unwrap_or_else(|| default_p(kind, s));
    let (lo, hi) = p_range(kind, s);
    // Lower endpoints are computed from the coefficients; allow rounding slack.
    let lower_ok = if kind == StrategyKind::I {
        p > lo
    } else {
        p >= lo - 1e-12
    };
    if !(lower_ok && p < hi) {
        return Err(Error::OutOfRangeP { p, lo, hi });
    }

    let (state, tests) = match kind {
        StrategyKind::I => {
            let b1 = params
                .basis_1
                .clone()
                .unwrap_or_else(|| fourier_basis(s.d()));
            if !is_unbiased(&standard_basis(s.d()), &b1, STRUCT_TOL)? {
                return Err(Error::BasisNotUnbiased);
            }
            let tests = vec![
                (p, standard_test(s)),
                (1.0 - p, test_projector(s, &b1, Direction::AtoB)?),
            ];
            (s.clone(), tests)
        }
        StrategyKind::II => {
            let state = if is_prime(s.d()) {
                s.clone()
            } else {
                s.embed(next_prime(s.d()))?
            };
            let set = prime_mub_set(state.d())?;
            let mut tests = vec![(p, standard_test(&state))];
            tests.extend(design_tests(&state, &set, p, &[Direction::AtoB])?);
            (state, tests)
        }
        StrategyKind::III => {
            let set = if s.d() == 2 {
                prime_mub_set(2)?
            } else {
                roy_scott_set(s.d(), params.m)?
            };
            let mut tests = vec![(p, standard_test(s))];
            tests.extend(design_tests(s, &set, p, &[Direction::AtoB])?);
            (s.clone(), tests)
        }
        StrategyKind::IV => {
            let set = design_for(s.d(), params.m)?;
            let p0 = standard_test(s);
            let mut tests = vec![(0.5 * p, p0.clone()), (0.5 * p, p0.mirrored(s)?)];
            tests.extend(design_tests(s, &set, p, &BOTH)?);
            (s.clone(), tests)
        }
        StrategyKind::V => {
            let set = design_for(s.d(), params.m)?;
            let mut tests = vec![(p, q0_test(s, p)?)];
            tests.extend(design_tests(s, &set, p, &[Direction::AtoB])?);
            (s.clone(), tests)
        }
        StrategyKind::VI => {
            let set = design_for(s.d(), params.m)?;
            let mut tests = vec![
                (0.5 * p, q0_tilde_test(s, p, Direction::AtoB)?),
                (0.5 * p, q0_tilde_test(s, p, Direction::BtoA)?),
            ];
            tests.extend(design_tests(s, &set, p, &BOTH)?);
            (s.clone(), tests)
        }
        StrategyKind::Custom => unreachable!(),
    };

    let strategy = Strategy::assemble(state, tests, kind, Some(p))?;
    beta_nu(&strategy)?;
    Ok(strategy)
}

/// Spectral gap data, with the closed-form comparison when one exists.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralGap {
    pub beta: f64,
    pub nu: f64,
    pub closed_form_residual: Option<f64>,
}

/// Recomputes `beta` from `Ω` and checks it against the closed form for
/// the strategy's label.
pub fn beta_nu(strategy: &Strategy) -> Result<SpectralGap> {
    let values = eig_hermitian(strategy.omega())?.values;
    let top = values[0];
    if (top - 1.0).abs() > 1e-8 {
        return Err(Error::TopEigenvalueNotOne(top));
    }
    let beta = values.get(1).copied().unwrap_or(top);
    let closed = strategy
        .p()
        .and_then(|p| closed_form_beta(strategy.label(), strategy.state(), p));
    let closed_form_residual = match closed {
        Some(c) => {
            let r = (c - beta).abs();
            if r > STRUCT_TOL {
                return Err(Error::ClosedFormMismatch {
                    numeric: beta,
                    closed: c,
                });
            }
            Some(r)
        }
        None => None,
    };
    Ok(SpectralGap {
        beta,
        nu: 1.0 - beta,
        closed_form_residual,
    })
}

/// `|| Ω - (|Psi><Psi| + beta (I - |Psi><Psi|)) ||_max <= tol`.
pub fn is_homogeneous(strategy: &Strategy, tol: f64) -> bool {
    homogeneity_defect(strategy) <= tol
}

pub fn homogeneity_defect(strategy: &Strategy) -> f64 {
    let dim = strategy.state().dim();
    let proj = strategy.state().projector();
    let beta = strategy.beta();
    let mut model = proj.scale(1.0 - beta);
    model.add_scaled(beta, &CMatrix::identity(dim));
    strategy.omega().max_abs_diff(&model)
}
