//! Command implementations behind the `bpv` binary.
//!
//! Every command renders its result into a `String`; the binary decides
//! whether it goes to stdout or to `--out`. Exit codes: 0 success,
//! 2 validation error, 3 IO error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use bpv_core::bases::{is_prime, roy_scott_min_bases};
use bpv_core::strategies::homogeneity_defect;
use bpv_core::{
    beta_nu, build_strategy, depolarize, estimate_fidelity, fidelity, figure1_table, prime_mub_set,
    roy_scott_set, run_verification, tests_needed, tests_needed_adversarial, theta_grid,
    verify_2design, CMatrix, DensityOperator, RngStream, RunRecord, SchmidtState, Strategy,
    StrategyKind, StrategyParams, C64,
};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance used by `check-design`.
pub const DESIGN_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<bpv_core::Error> for CliError {
    fn from(e: bpv_core::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Noise {
    None,
    Depolarize { lambda: f64 },
    File { path: PathBuf },
}

impl std::str::FromStr for Noise {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("none") {
            return Ok(Noise::None);
        }
        if let Some(rest) = s.strip_prefix("depolarize:") {
            let lambda = rest
                .parse()
                .map_err(|_| format!("invalid depolarizing strength `{rest}`"))?;
            return Ok(Noise::Depolarize { lambda });
        }
        if let Some(rest) = s.strip_prefix("file:") {
            return Ok(Noise::File { path: rest.into() });
        }
        Err(format!(
            "unknown noise `{s}` (expected none, depolarize:<lambda> or file:<path>)"
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategySpec {
    pub kind: StrategyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

/// Everything a job needs; read from `--config` and overridden by flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schmidt: Option<Vec<f64>>,
    /// Shorthand for `schmidt = (cos θ, sin θ)` when `d = 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub strategy: StrategySpec,
    pub epsilon: f64,
    pub delta: f64,
    pub noise: Noise,
    pub trials: u64,
    pub seed: u64,
}

impl Default for JobConfig {
    fn default() -> Self {
        JobConfig {
            d: 2,
            schmidt: None,
            theta: None,
            strategy: StrategySpec {
                kind: StrategyKind::II,
                p: None,
                m: None,
            },
            epsilon: 0.01,
            delta: 0.01,
            noise: Noise::None,
            trials: 100_000,
            seed: 0,
        }
    }
}

impl JobConfig {
    pub fn target_state(&self) -> Result<SchmidtState, CliError> {
        match (&self.schmidt, self.theta) {
            (Some(_), Some(_)) => Err(invalid("give either schmidt or theta, not both")),
            (None, Some(theta)) => {
                if self.d != 2 {
                    return Err(invalid(format!(
                        "theta requires d = 2 (got d = {})",
                        self.d
                    )));
                }
                Ok(SchmidtState::two_qubit(theta)?)
            }
            (Some(raw), None) => Ok(SchmidtState::new(raw, self.d)?),
            (None, None) => Err(invalid("target state missing: set schmidt or theta")),
        }
    }

    pub fn build(&self) -> Result<Strategy, CliError> {
        let s = self.target_state()?;
        let params = StrategyParams {
            p: self.strategy.p,
            m: self.strategy.m,
            basis_1: None,
        };
        Ok(build_strategy(&s, self.strategy.kind, &params)?)
    }

    fn check_budget(&self) -> Result<(), CliError> {
        for (name, x) in [("epsilon", self.epsilon), ("delta", self.delta)] {
            if !(x > 0.0 && x < 1.0) {
                return Err(invalid(format!(
                    "OutOfRange: {name} = {x} must lie in (0, 1)"
                )));
            }
        }
        Ok(())
    }

    /// Source state in the strategy's (possibly embedded) space.
    pub fn source_state(&self, strategy: &Strategy) -> Result<DensityOperator, CliError> {
        let target = strategy.state();
        match &self.noise {
            Noise::None => Ok(DensityOperator::pure(&target.state_vector())?),
            Noise::Depolarize { lambda } => Ok(depolarize(target, *lambda)?),
            Noise::File { path } => {
                let rho = load_density(path)?;
                let d_file = (rho.dim() as f64).sqrt().round() as usize;
                if d_file * d_file != rho.dim() {
                    return Err(invalid(format!(
                        "density matrix dimension {} is not a square",
                        rho.dim()
                    )));
                }
                if d_file == target.d() {
                    Ok(rho)
                } else if d_file < target.d() {
                    embed_density(&rho, d_file, target.d())
                } else {
                    Err(invalid(format!(
                        "density matrix dimension {} exceeds target dimension {}",
                        rho.dim(),
                        target.dim()
                    )))
                }
            }
        }
    }
}

/// JSON layout of a density matrix file: row-major real and (optional)
/// imaginary parts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityFile {
    pub dim: usize,
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

pub fn load_density(path: &Path) -> Result<DensityOperator, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let file: DensityFile = serde_json::from_str(&text)
        .map_err(|e| invalid(format!("cannot parse {}: {e}", path.display())))?;
    let n = file.dim * file.dim;
    if file.re.len() != n || !(file.im.is_empty() || file.im.len() == n) {
        return Err(invalid(format!(
            "{}: expected {n} entries per part",
            path.display()
        )));
    }
    let entries: Vec<C64> = (0..n)
        .map(|i| C64::new(file.re[i], file.im.get(i).copied().unwrap_or(0.0)))
        .collect();
    Ok(DensityOperator::new(CMatrix::from_row_slice(
        file.dim, file.dim, &entries,
    ))?)
}

/// Zero-pads a state on `C^d ⊗ C^d` into `C^d' ⊗ C^d'`.
pub fn embed_density(
    rho: &DensityOperator,
    d: usize,
    d_prime: usize,
) -> Result<DensityOperator, CliError> {
    let m = rho.matrix();
    let mut big = CMatrix::zeros(d_prime * d_prime, d_prime * d_prime);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    big[(a * d_prime + b, c * d_prime + e)] = m[(a * d + b, c * d + e)];
                }
            }
        }
    }
    Ok(DensityOperator::new(big)?)
}

#[derive(Debug, Parser)]
#[command(
    name = "bpv",
    version,
    about = "Verification protocols for bipartite pure states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for simulations.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Emit JSON instead of text (analyze, check-design).
    #[arg(long, global = true)]
    pub json: bool,
    /// JSON job configuration; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectral gap, optimal p and test counts for a strategy.
    Analyze(JobArgs),
    /// Two-qubit test counts over θ in (0, π/4] as CSV.
    Figure1 {
        #[arg(long, default_value_t = 64)]
        grid_size: usize,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
    },
    /// Check the 2-design identity for a basis set.
    CheckDesign {
        #[arg(long)]
        d: usize,
        /// Number of bases; selects the Roy–Scott design. Without it, prime
        /// dimensions use the complete MUB set.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Monte Carlo run of a strategy on a (noisy) source.
    Simulate(JobArgs),
    /// Fidelity estimate from a homogeneous strategy (V or VI).
    EstimateFidelity(JobArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct JobArgs {
    #[arg(long)]
    pub d: Option<usize>,
    /// Comma-separated Schmidt coefficients (normalized and sorted).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub schmidt: Option<Vec<f64>>,
    /// Two-qubit angle: cos θ |00> + sin θ |11>.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// I, II, III, IV, V or VI.
    #[arg(long)]
    pub strategy: Option<StrategyKind>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// none, depolarize:<lambda> or file:<path>.
    #[arg(long)]
    pub noise: Option<Noise>,
    #[arg(long)]
    pub trials: Option<u64>,
}

pub fn read_config(path: &Path) -> Result<JobConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| invalid(format!("invalid config {}: {e}", path.display())))
}

/// Merges config file, flags and the global seed.
pub fn resolve_config(
    file: Option<&Path>,
    args: &JobArgs,
    seed: Option<u64>,
) -> Result<JobConfig, CliError> {
    let mut cfg = match file {
        Some(p) => read_config(p)?,
        None => JobConfig::default(),
    };
    if let Some(d) = args.d {
        cfg.d = d;
    }
    if let Some(raw) = &args.schmidt {
        cfg.schmidt = Some(raw.clone());
        cfg.theta = None;
        if args.d.is_none() {
            cfg.d = raw.len();
        }
    }
    if let Some(theta) = args.theta {
        cfg.theta = Some(theta);
        cfg.schmidt = None;
        if args.d.is_none() {
            cfg.d = 2;
        }
    }
    if let Some(kind) = args.strategy {
        cfg.strategy.kind = kind;
    }
    if args.p.is_some() {
        cfg.strategy.p = args.p;
    }
    if args.m.is_some() {
        cfg.strategy.m = args.m;
    }
    if let Some(e) = args.epsilon {
        cfg.epsilon = e;
    }
    if let Some(d) = args.delta {
        cfg.delta = d;
    }
    if let Some(n) = &args.noise {
        cfg.noise = n.clone();
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub config: JobConfig,
    pub strategy: StrategyKind,
    /// Local dimension the strategy was built in (after any embedding).
    pub d_effective: usize,
    pub p: Option<f64>,
    pub beta: f64,
    pub nu: f64,
    pub homogeneous: bool,
    pub closed_form_residual: Option<f64>,
    pub n_tests: u64,
    pub n_tests_adversarial: Option<f64>,
    pub spectrum: Vec<f64>,
}

pub fn analyze(cfg: &JobConfig) -> Result<AnalyzeReport, CliError> {
    cfg.check_budget()?;
    let st = cfg.build()?;
    let gap = beta_nu(&st)?;
    let adversarial = if gap.beta > 0.0 && gap.beta < 1.0 {
        Some(tests_needed_adversarial(gap.beta, cfg.epsilon, cfg.delta)?)
    } else {
        None
    };
    Ok(AnalyzeReport {
        config: cfg.clone(),
        strategy: st.label(),
        d_effective: st.state().d(),
        p: st.p(),
        beta: gap.beta,
        nu: gap.nu,
        homogeneous: homogeneity_defect(&st) <= 1e-10,
        closed_form_residual: gap.closed_form_residual,
        n_tests: tests_needed(gap.nu, cfg.epsilon, cfg.delta)?,
        n_tests_adversarial: adversarial,
        spectrum: st.spectrum().to_vec(),
    })
}

pub fn render_analyze(r: &AnalyzeReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "strategy:     {}", r.strategy);
    let _ = writeln!(out, "dimension:    d = {}", r.d_effective);
    if let Some(p) = r.p {
        let origin = if r.config.strategy.p.is_some() {
            "given"
        } else {
            "optimal"
        };
        let _ = writeln!(out, "p:            {p} ({origin})");
    }
    let _ = writeln!(out, "beta:         {}", r.beta);
    let _ = writeln!(out, "nu:           {}", r.nu);
    if r.homogeneous {
        let _ = writeln!(out, "homogeneous, β={}", r.beta);
    } else {
        let _ = writeln!(out, "not homogeneous");
    }
    let _ = writeln!(
        out,
        "N (eps={}, delta={}): {}",
        r.config.epsilon, r.config.delta, r.n_tests
    );
    if let Some(n) = r.n_tests_adversarial {
        let _ = writeln!(out, "N adversarial (asymptotic): {n:.1}");
    }
    out
}

pub fn figure1_csv(grid_size: usize, epsilon: f64, delta: f64) -> Result<String, CliError> {
    if grid_size == 0 {
        return Err(invalid("grid_size must be at least 1"));
    }
    let rows = figure1_table(&theta_grid(grid_size), epsilon, delta)?;
    let mut out = String::from("theta,N_PLM,N_I,N_II,N_IV,N_V,N_VI\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{:.16e},{},{},{},{},{:.16e},{:.16e}",
            r.theta, r.n_plm, r.n_i, r.n_ii, r.n_iv, r.n_v, r.n_vi
        );
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DesignReport {
    pub d: usize,
    pub m: usize,
    pub construction: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
}

pub fn check_design(d: usize, m: Option<usize>) -> Result<DesignReport, CliError> {
    let (set, construction) = match m {
        None if is_prime(d) => (prime_mub_set(d)?, "mub"),
        _ => {
            if d < 3 {
                return Err(invalid(format!(
                    "DimensionTooSmall: the Roy-Scott design needs d >= 3 (got {d})"
                )));
            }
            (
                roy_scott_set(d, m.or(Some(roy_scott_min_bases(d))))?,
                "roy-scott",
            )
        }
    };
    let check = verify_2design(&set, DESIGN_TOL);
    Ok(DesignReport {
        d,
        m: set.len(),
        construction: construction.to_string(),
        passed: check.passed,
        residual: check.residual,
        tolerance: DESIGN_TOL,
    })
}

pub fn render_design(r: &DesignReport) -> String {
    format!(
        "{} set, d={}, m={}\n2-design: {} residual={:e} (tol {:e})\n",
        r.construction,
        r.d,
        r.m,
        if r.passed { "PASS" } else { "FAIL" },
        r.residual,
        r.tolerance
    )
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimulateReport {
    pub config: JobConfig,
    pub strategy: StrategyKind,
    pub d_effective: usize,
    pub beta: f64,
    pub nu: f64,
    /// `<Psi|sigma|Psi>` of the simulated source.
    pub fidelity: f64,
    pub seed: u64,
    pub record: RunRecord,
}

pub fn simulate(cfg: &JobConfig) -> Result<SimulateReport, CliError> {
    let st = cfg.build()?;
    let sigma = cfg.source_state(&st)?;
    let record = run_verification(&st, &sigma, cfg.trials, RngStream::new(cfg.seed))?;
    Ok(SimulateReport {
        config: cfg.clone(),
        strategy: st.label(),
        d_effective: st.state().d(),
        beta: st.beta(),
        nu: st.nu(),
        fidelity: fidelity(&sigma, st.state())?,
        seed: cfg.seed,
        record,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FidelityReport {
    pub config: JobConfig,
    pub strategy: StrategyKind,
    pub beta: f64,
    pub f_hat: f64,
    pub std_err_f: f64,
    pub physical: bool,
    /// `<Psi|sigma|Psi>` of the source, for comparison.
    pub true_fidelity: f64,
    pub seed: u64,
    pub record: RunRecord,
}

pub fn estimate(cfg: &JobConfig) -> Result<FidelityReport, CliError> {
    let st = cfg.build()?;
    let sigma = cfg.source_state(&st)?;
    let run = estimate_fidelity(&st, &sigma, cfg.trials, RngStream::new(cfg.seed))?;
    Ok(FidelityReport {
        config: cfg.clone(),
        strategy: st.label(),
        beta: st.beta(),
        f_hat: run.f_hat,
        std_err_f: run.std_err_f,
        physical: run.physical,
        true_fidelity: fidelity(&sigma, st.state())?,
        seed: cfg.seed,
        record: run.record,
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Runs a parsed command line and returns the rendered output.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let cfg_path = cli.config.as_deref();
    match &cli.command {
        Command::Analyze(args) => {
            let report = analyze(&resolve_config(cfg_path, args, cli.seed)?)?;
            Ok(if cli.json {
                to_json(&report)
            } else {
                render_analyze(&report)
            })
        }
        Command::Figure1 {
            grid_size,
            epsilon,
            delta,
        } => figure1_csv(*grid_size, *epsilon, *delta),
        Command::CheckDesign { d, m } => {
            let report = check_design(*d, *m)?;
            Ok(if cli.json {
                to_json(&report)
            } else {
                render_design(&report)
            })
        }
        Command::Simulate(args) => Ok(to_json(&simulate(&resolve_config(
            cfg_path, args, cli.seed,
        )?)?)),
        Command::EstimateFidelity(args) => Ok(to_json(&estimate(&resolve_config(
            cfg_path, args, cli.seed,
        )?)?)),
    }
}

/// Executes and delivers output; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = execute(cli).and_then(|text| match &cli.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
