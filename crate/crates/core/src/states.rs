//! Target states in Schmidt form, density operators and noise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{eigenvalues_hermitian, CMatrix, Ket, C64, STRUCT_TOL};
use crate::strategies::Strategy;

/// Pure bipartite state `sum_j s_j |jj>` on `C^d ⊗ C^d`.
///
/// Coefficients are kept non-increasing and L2-normalized. Exact zeros are
/// preserved because they decide which outcomes the standard test accepts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchmidtState {
    d: usize,
    coeffs: Vec<f64>,
}

impl SchmidtState {
    /// Sorts `raw` in decreasing order and normalizes it.
    pub fn new(raw: &[f64], d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::DimensionTooSmall(d));
        }
        if raw.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: raw.len(),
            });
        }
        if let Some(&bad) = raw.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::NegativeCoefficient(bad));
        }
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let mut coeffs: Vec<f64> = raw.iter().map(|x| x / norm).collect();
        coeffs.sort_by(|a, b| b.total_cmp(a));
        Ok(SchmidtState { d, coeffs })
    }

    /// Two-qubit state `cos θ |00> + sin θ |11>`.
    pub fn two_qubit(theta: f64) -> Result<Self> {
        SchmidtState::new(&[theta.cos().abs(), theta.sin().abs()], 2)
    }

    /// Maximally entangled state of local dimension `d`.
    pub fn maximally_entangled(d: usize) -> Result<Self> {
        SchmidtState::new(&vec![1.0; d], d)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Global dimension `D = d^2`.
    pub fn dim(&self) -> usize {
        self.d * self.d
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn squared(&self) -> Vec<f64> {
        self.coeffs.iter().map(|s| s * s).collect()
    }

    /// `s_0 < 1`, i.e. at least two nonzero coefficients.
    pub fn is_entangled(&self) -> bool {
        self.coeffs[0] < 1.0 && self.coeffs.iter().filter(|&&s| s > 0.0).count() > 1
    }

    /// Ket with `s_j` at index `j*d + j`.
    pub fn state_vector(&self) -> Ket {
        let mut psi = Ket::zeros(self.dim());
        for (j, s) in self.coeffs.iter().enumerate() {
            psi[j * self.d + j] = C64::new(*s, 0.0);
        }
        psi
    }

    pub fn projector(&self) -> CMatrix {
        CMatrix::outer(&self.state_vector())
    }

    /// Bob's reduced state `diag(s_0^2, ..., s_{d-1}^2)`.
    pub fn reduced_state_b(&self) -> DensityOperator {
        DensityOperator {
            matrix: CMatrix::from_real_diagonal(&self.squared()),
        }
    }

    /// Pads the coefficients with zeros up to dimension `d_prime`.
    pub fn embed(&self, d_prime: usize) -> Result<SchmidtState> {
        if d_prime < self.d {
            return Err(Error::ShrinkNotAllowed {
                from: self.d,
                to: d_prime,
            });
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(d_prime, 0.0);
        Ok(SchmidtState { d: d_prime, coeffs })
    }
}

pub fn make_schmidt_state(raw: &[f64], d: usize) -> Result<SchmidtState> {
    SchmidtState::new(raw, d)
}

pub fn embed_state(s: &SchmidtState, d_prime: usize) -> Result<SchmidtState> {
    s.embed(d_prime)
}

/// Validated density operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    /// Checks Hermiticity, unit trace and positivity within `1e-10`.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidDensity(format!(
                "matrix is {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > STRUCT_TOL {
            return Err(Error::NonHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STRUCT_TOL || tr.im.abs() > STRUCT_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min = eigenvalues_hermitian(&matrix)?
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -STRUCT_TOL {
            return Err(Error::InvalidDensity(format!("eigenvalue {min}")));
        }
        Ok(DensityOperator { matrix })
    }

    /// Skips validation; for operators that are positive by construction.
    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        DensityOperator { matrix }
    }

    pub fn pure(psi: &Ket) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(DensityOperator::from_trusted(CMatrix::outer(
            &(psi / C64::new(norm, 0.0)),
        )))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator::from_trusted(CMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `(1-w) self + w other`.
    pub fn mix(&self, other: &DensityOperator, w: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let mut m = self.matrix.scale(1.0 - w);
        m.add_scaled(w, &other.matrix);
        Ok(DensityOperator::from_trusted(m))
    }
}

/// `<Psi|rho|Psi>`.
pub fn fidelity(rho: &DensityOperator, s: &SchmidtState) -> Result<f64> {
    if rho.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: rho.dim(),
        });
    }
    let d = s.d();
    let m = rho.matrix();
    // |Psi> is supported on the d diagonal product states.
    let mut f = C64::new(0.0, 0.0);
    for (j, sj) in s.coeffs().iter().enumerate() {
        for (k, sk) in s.coeffs().iter().enumerate() {
            f += m[(j * d + j, k * d + k)] * (sj * sk);
        }
    }
    if f.im.abs() > STRUCT_TOL {
        return Err(Error::InvalidDensity(format!(
            "fidelity has imaginary part {}",
            f.im
        )));
    }
    Ok(f.re)
}

/// `(1-λ)|Psi><Psi| + λ I/D`.
pub fn depolarize(s: &SchmidtState, lambda: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::OutOfRange {
            name: "lambda",
            value: lambda,
            range: "[0, 1]",
        });
    }
    let mut m = s.projector().scale(1.0 - lambda);
    m.add_scaled(lambda / s.dim() as f64, &CMatrix::identity(s.dim()));
    Ok(DensityOperator::from_trusted(m))
}

/// Rank-two state of fidelity exactly `1-eps` that saturates the
/// worst-case pass probability `1 - nu*eps` of `omega`.
pub fn worst_case_state(s: &SchmidtState, omega: &Strategy, eps: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: eps,
            range: "[0, 1]",
        });
    }
    if omega.state() != s {
        return Err(Error::DimensionMismatch {
            expected: omega.state().dim(),
            found: s.dim(),
        });
    }
    let psi = s.state_vector();
    if eps == 0.0 {
        return DensityOperator::pure(&psi);
    }
    let chi = omega.beta_eigenvector()?;
    let mut m = CMatrix::outer(&psi).scale(1.0 - eps);
    m.add_scaled(eps, &CMatrix::outer(&chi));
    Ok(DensityOperator::from_trusted(m))
}
