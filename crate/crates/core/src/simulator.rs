//! Monte Carlo execution of verification strategies on i.i.d. sources.
//!
//! Each trial picks a test with its probability, samples the first party's
//! outcome by the Born rule and then accepts with the exact conditional
//! probability of the second party's check. Trials are split into fixed
//! chunks, each with its own ChaCha stream, so a run is reproducible from
//! `(seed, stream)` regardless of how many threads execute it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::fidelity_from_pass_rate;
use crate::error::{Error, Result};
use crate::numerics::{kron_ket, CMatrix, Ket};
use crate::states::DensityOperator;
use crate::strategies::{homogeneity_defect, Direction, Strategy, TestKind, TestOperator};

/// Trials per RNG stream chunk.
pub const CHUNK: u64 = 8192;

/// Denominators below this are treated as impossible outcomes.
const MIN_PROB: f64 = 1e-300;

/// Homogeneity tolerance required by [`estimate_fidelity`].
pub const HOMOGENEITY_TOL: f64 = 1e-9;

/// Seed plus stream id; identical pairs reproduce identical trials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u32,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream { seed, stream: 0 }
    }

    pub fn with_stream(seed: u64, stream: u32) -> Self {
        RngStream { seed, stream }
    }

    /// Generator for chunk `chunk` of this stream.
    pub fn chunk_rng(&self, chunk: u32) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(((self.stream as u64) << 32) | chunk as u64);
        rng
    }
}

/// Tally of a simulated run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub n_trials: u64,
    pub n_pass: u64,
    pub pass_rate: f64,
    pub std_err: f64,
    /// `tr(Ω σ)`, from the matrix trace rather than the sampler.
    pub exact_rate: f64,
    pub seed: u64,
    pub stream: u32,
}

impl RunRecord {
    fn from_counts(n_trials: u64, n_pass: u64, exact_rate: f64, rng: RngStream) -> Self {
        let pass_rate = n_pass as f64 / n_trials as f64;
        RunRecord {
            n_trials,
            n_pass,
            pass_rate,
            std_err: (pass_rate * (1.0 - pass_rate) / n_trials as f64).sqrt(),
            exact_rate,
            seed: rng.seed,
            stream: rng.stream,
        }
    }

    /// `|pass_rate - exact_rate| <= k * std_err`.
    pub fn within_sigma(&self, k: f64) -> bool {
        (self.pass_rate - self.exact_rate).abs() <= k * self.std_err
    }
}

/// Outcome distribution and acceptance probabilities of one test on a
/// fixed state.
#[derive(Clone, Debug)]
struct PreparedTest {
    cdf: Vec<f64>,
    accept: Vec<f64>,
}

impl PreparedTest {
    fn sample(&self, rng: &mut impl Rng) -> bool {
        let total = *self.cdf.last().unwrap_or(&0.0);
        let u = rng.random::<f64>() * total;
        let idx = self
            .cdf
            .partition_point(|&c| c <= u)
            .min(self.cdf.len() - 1);
        let a = self.accept[idx];
        a >= 1.0 || rng.random::<f64>() < a
    }
}

fn cumulative(probs: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .map(|p| {
            acc += p.max(0.0);
            acc
        })
        .collect()
}

fn unit_prob(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Reduced state of the party at `side` (0 = Alice, 1 = Bob).
fn reduced(sigma: &CMatrix, d: usize, side: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| {
        (0..d)
            .map(|k| {
                if side == 0 {
                    sigma[(i * d + k, j * d + k)]
                } else {
                    sigma[(k * d + i, k * d + j)]
                }
            })
            .sum()
    })
}

fn prepare(test: &TestOperator, sigma: &CMatrix) -> PreparedTest {
    let d = test.d();
    match test.kind() {
        TestKind::ConditionalProjector { basis, outcomes } => {
            let side = match test.direction() {
                Direction::AtoB => 0,
                Direction::BtoA => 1,
            };
            let rho = reduced(sigma, d, side);
            let marginals: Vec<f64> = basis
                .kets()
                .iter()
                .map(|u| rho.expectation(u).re.max(0.0))
                .collect();
            let mut accept = vec![0.0; d];
            for (j, v) in outcomes {
                let u = basis.ket(*j);
                let joint: Ket = match test.direction() {
                    Direction::AtoB => kron_ket(u, v),
                    Direction::BtoA => kron_ket(v, u),
                };
                let num = sigma.expectation(&joint).re.max(0.0);
                if marginals[*j] > MIN_PROB {
                    accept[*j] = unit_prob(num / marginals[*j]);
                }
            }
            PreparedTest {
                cdf: cumulative(marginals.into_iter()),
                accept,
            }
        }
        TestKind::RandomizedDiagonal { acceptance } => PreparedTest {
            cdf: cumulative((0..d * d).map(|i| sigma[(i, i)].re)),
            accept: acceptance.clone(),
        },
    }
}

/// Per-state sampling tables for every test of a strategy.
#[derive(Clone, Debug)]
pub struct Sampler {
    test_cdf: Vec<f64>,
    tests: Vec<PreparedTest>,
    exact_rate: f64,
}

impl Sampler {
    pub fn new(strategy: &Strategy, sigma: &DensityOperator) -> Result<Self> {
        let dim = strategy.state().dim();
        if sigma.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: sigma.dim(),
            });
        }
        let m = sigma.matrix();
        Ok(Sampler {
            test_cdf: cumulative(strategy.tests().iter().map(|(w, _)| *w)),
            tests: strategy
                .tests()
                .iter()
                .map(|(_, t)| prepare(t, m))
                .collect(),
            exact_rate: strategy.pass_probability(m),
        })
    }

    pub fn exact_rate(&self) -> f64 {
        self.exact_rate
    }

    pub fn trial(&self, rng: &mut impl Rng) -> bool {
        let total = *self.test_cdf.last().unwrap_or(&1.0);
        let u = rng.random::<f64>() * total;
        let idx = self
            .test_cdf
            .partition_point(|&c| c <= u)
            .min(self.tests.len() - 1);
        self.tests[idx].sample(rng)
    }

    /// Acceptance probability conditional on each outcome of each test.
    pub fn conditional_acceptance(&self) -> Vec<Vec<(f64, f64)>> {
        self.tests
            .iter()
            .map(|t| {
                let mut prev = 0.0;
                t.cdf
                    .iter()
                    .zip(&t.accept)
                    .map(|(c, a)| {
                        let p = c - prev;
                        prev = *c;
                        (p, *a)
                    })
                    .collect()
            })
            .collect()
    }
}

/// One trial of `strategy` on `sigma`.
pub fn run_single_test(
    strategy: &Strategy,
    sigma: &DensityOperator,
    rng: &mut impl Rng,
) -> Result<bool> {
    Ok(Sampler::new(strategy, sigma)?.trial(rng))
}

/// `n_trials` independent trials, tallied in parallel by chunk.
pub fn run_verification(
    strategy: &Strategy,
    sigma: &DensityOperator,
    n_trials: u64,
    rng: RngStream,
) -> Result<RunRecord> {
    if n_trials == 0 {
        return Err(Error::OutOfRange {
            name: "n_trials",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    let sampler = Sampler::new(strategy, sigma)?;
    let chunks = n_trials.div_ceil(CHUNK);
    if chunks > u32::MAX as u64 {
        return Err(Error::OutOfRange {
            name: "n_trials",
            value: n_trials as f64,
            range: "too many trials",
        });
    }
    let n_pass: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng.chunk_rng(c as u32);
            let len = CHUNK.min(n_trials - c * CHUNK);
            (0..len).filter(|_| sampler.trial(&mut r)).count() as u64
        })
        .sum();
    Ok(RunRecord::from_counts(
        n_trials,
        n_pass,
        sampler.exact_rate(),
        rng,
    ))
}

/// Fidelity estimate from a homogeneous strategy's pass rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityRun {
    pub f_hat: f64,
    pub std_err_f: f64,
    /// Whether `f_hat` lies in `[0, 1]`.
    pub physical: bool,
    pub record: RunRecord,
}

pub fn estimate_fidelity(
    strategy: &Strategy,
    sigma: &DensityOperator,
    n_trials: u64,
    rng: RngStream,
) -> Result<FidelityRun> {
    if homogeneity_defect(strategy) > HOMOGENEITY_TOL {
        return Err(Error::NotHomogeneous);
    }
    if n_trials < 100 {
        return Err(Error::OutOfRange {
            name: "n_trials",
            value: n_trials as f64,
            range: "[100, inf)",
        });
    }
    let record = run_verification(strategy, sigma, n_trials, rng)?;
    let beta = strategy.beta();
    let est = fidelity_from_pass_rate(record.pass_rate, beta)?;
    Ok(FidelityRun {
        f_hat: est.value,
        std_err_f: record.std_err / (1.0 - beta),
        physical: est.physical,
        record,
    })
}
