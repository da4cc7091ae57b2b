//! Verification of bipartite pure states with local projective
//! measurements.
//!
//! The crate builds test operators from measurement bases, assembles the
//! verification strategies `Ω_I` through `Ω_VI`, computes their spectral
//! gaps and required sample counts, and simulates them on noisy sources.
//!
//! ```
//! use bpv_core::{build_strategy, tests_needed, SchmidtState, StrategyKind, StrategyParams};
//!
//! let target = SchmidtState::two_qubit(std::f64::consts::FRAC_PI_4).unwrap();
//! let omega = build_strategy(&target, StrategyKind::II, &StrategyParams::default()).unwrap();
//! assert!((omega.nu() - 2.0 / 3.0).abs() < 1e-10);
//! assert_eq!(tests_needed(omega.nu(), 0.01, 0.01).unwrap(), 689);
//! ```

pub mod analysis;
pub mod bases;
pub mod error;
pub mod numerics;
pub mod simulator;
pub mod states;
pub mod strategies;

pub use analysis::{
    fidelity_from_pass_rate, figure1_table, plm_nu, tests_needed, tests_needed_adversarial,
    theta_grid, worst_case_pass_prob, FidelityEstimate, Figure1Row, VerificationBudget,
};
pub use bases::{
    fourier_basis, is_unbiased, prime_mub_set, roy_scott_set, standard_basis, verify_2design,
    Basis, DesignCheck, WeightedBasisSet,
};
pub use error::{Error, Result};
pub use numerics::{eig_hermitian, kron, second_eigenvalue, CMatrix, Ket, C64};
pub use simulator::{
    estimate_fidelity, run_single_test, run_verification, FidelityRun, RngStream, RunRecord,
};
pub use states::{
    depolarize, embed_state, fidelity, make_schmidt_state, worst_case_state, DensityOperator,
    SchmidtState,
};
pub use strategies::{
    beta_nu, build_strategy, is_homogeneous, pi_operator, pi_two_way, test_projector, Direction,
    SpectralGap, Strategy, StrategyKind, StrategyParams, TestKind, TestOperator,
};
