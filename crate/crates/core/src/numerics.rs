//! Dense complex matrices and the Hermitian eigensolver.
//!
//! Operators in this crate live on `C^D` with `D = d^2` at most a few
//! hundred, so everything is dense and double precision. The eigensolver
//! is nalgebra's Hermitian (complex symmetric) QR iteration; this module
//! adds the symmetry check, the descending sort and a few structural
//! predicates.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar.
pub type C64 = Complex64;

/// Column vector in `C^n`.
pub type Ket = DVector<C64>;

/// Tolerance for structural checks (Hermiticity, projector identities).
pub const STRUCT_TOL: f64 = 1e-10;

/// Tolerance for eigendecomposition residuals.
pub const EIG_TOL: f64 = 1e-9;

/// Largest dimension accepted by the eigensolver.
pub const MAX_DIM: usize = 4096;

/// Dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix(DMatrix<C64>);

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        CMatrix(DMatrix::identity(n, n))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        CMatrix(DMatrix::from_fn(rows, cols, f))
    }

    /// Real diagonal matrix.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Row-major constructor; panics if `entries.len() != rows * cols`.
    pub fn from_row_slice(rows: usize, cols: usize, entries: &[C64]) -> Self {
        assert_eq!(
            entries.len(),
            rows * cols,
            "entry count must equal rows*cols"
        );
        CMatrix(DMatrix::from_row_slice(rows, cols, entries))
    }

    /// Rank-one projector `|v><v|` (no normalization applied).
    pub fn outer(v: &Ket) -> Self {
        CMatrix(v * v.adjoint())
    }

    pub fn from_nalgebra(m: DMatrix<C64>) -> Self {
        CMatrix(m)
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn adjoint(&self) -> Self {
        CMatrix(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, factor: f64) -> Self {
        CMatrix(&self.0 * C64::new(factor, 0.0))
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, factor: f64, other: &CMatrix) {
        self.0 += &other.0 * C64::new(factor, 0.0);
    }

    pub fn mul_vec(&self, v: &Ket) -> Ket {
        &self.0 * v
    }

    /// `<v|self|v>`.
    pub fn expectation(&self, v: &Ket) -> C64 {
        v.dotc(&(&self.0 * v))
    }

    /// Max-norm distance `max_ij |a_ij - b_ij|`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        if self.0.shape() != other.0.shape() {
            return f64::INFINITY;
        }
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |H - H^dagger|`.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &CMatrix) -> C64 {
        let n = self.rows();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..self.cols() {
                acc += self.0[(i, k)] * other.0[(k, i)];
            }
        }
        acc
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.0[idx]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 * &rhs.0)
    }
}

/// Tensor product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    CMatrix(a.0.kronecker(&b.0))
}

/// Tensor product of kets.
pub fn kron_ket(a: &Ket, b: &Ket) -> Ket {
    a.kronecker(b)
}

/// Eigenvalues sorted in descending order (with multiplicity) and the
/// matching orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Ket>,
}

impl Eigen {
    /// `max |H - sum_i lambda_i v_i v_i^dagger|`.
    pub fn reconstruction_residual(&self, h: &CMatrix) -> f64 {
        let mut acc = CMatrix::zeros(h.rows(), h.cols());
        for (lambda, v) in self.values.iter().zip(&self.vectors) {
            acc.add_scaled(*lambda, &CMatrix::outer(v));
        }
        acc.max_abs_diff(h)
    }
}

pub fn eig_hermitian(h: &CMatrix) -> Result<Eigen> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            expected: h.rows(),
            found: h.cols(),
        });
    }
    if h.rows() > MAX_DIM {
        return Err(Error::DimensionTooLarge(h.rows()));
    }
    let defect = h.hermiticity_defect();
    if defect > STRUCT_TOL {
        return Err(Error::NonHermitian(defect));
    }
    // Symmetrize so the solver sees an exactly Hermitian input.
    let sym = (&h.0 + h.0.adjoint()) * C64::new(0.5, 0.0);
    let decomposition = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..h.rows()).collect();
    order.sort_by(|&a, &b| {
        decomposition.eigenvalues[b]
            .partial_cmp(&decomposition.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(Eigen {
        values: order
            .iter()
            .map(|&i| decomposition.eigenvalues[i])
            .collect(),
        vectors: order
            .iter()
            .map(|&i| decomposition.eigenvectors.column(i).into_owned())
            .collect(),
    })
}

/// Eigenvalues only, descending with multiplicity.
pub fn eigenvalues_hermitian(h: &CMatrix) -> Result<Vec<f64>> {
    Ok(eig_hermitian(h)?.values)
}

/// Second largest eigenvalue counted with multiplicity. For a 1x1 input
/// the single eigenvalue is returned.
pub fn second_eigenvalue(h: &CMatrix) -> Result<f64> {
    let values = eigenvalues_hermitian(h)?;
    Ok(values.get(1).copied().unwrap_or(values[0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn kron_identities() {
        let i2 = CMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), CMatrix::identity(4));

        let a = CMatrix::from_real_diagonal(&[1.0, 0.0]);
        let b = CMatrix::from_real_diagonal(&[0.0, 1.0]);
        assert_eq!(
            kron(&a, &b),
            CMatrix::from_real_diagonal(&[0.0, 1.0, 0.0, 0.0])
        );

        let rho_b = CMatrix::from_real_diagonal(&[0.75, 0.25]);
        assert_eq!(
            kron(&a, &rho_b),
            CMatrix::from_real_diagonal(&[0.75, 0.25, 0.0, 0.0])
        );
    }

    #[test]
    fn diagonal_spectrum_sorted() {
        let h = CMatrix::from_real_diagonal(&[0.5, 1.0, 0.0, 0.5]);
        let eig = eig_hermitian(&h).unwrap();
        for (got, want) in eig.values.iter().zip([1.0, 0.5, 0.5, 0.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(eig.reconstruction_residual(&h) < EIG_TOL);
    }

    #[test]
    fn rank_one_projector_spectrum() {
        let v = Ket::from_vec(vec![c(0.6), C64::new(0.0, 0.8), c(0.0)]);
        let values = eigenvalues_hermitian(&CMatrix::outer(&v)).unwrap();
        assert!((values[0] - 1.0).abs() < 1e-12);
        assert!(values[1..].iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn second_eigenvalue_cases() {
        let h = CMatrix::from_real_diagonal(&[1.0, 0.7, 0.3]);
        assert!((second_eigenvalue(&h).unwrap() - 0.7).abs() < 1e-12);
        assert!((second_eigenvalue(&CMatrix::identity(5)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut h = CMatrix::identity(2);
        h[(0, 1)] = c(1.0);
        assert!(matches!(eig_hermitian(&h), Err(Error::NonHermitian(_))));
        assert!(matches!(second_eigenvalue(&h), Err(Error::NonHermitian(_))));
    }

    #[test]
    fn trace_product_matches_full_product() {
        let a = CMatrix::from_fn(3, 3, |i, j| C64::new(i as f64, j as f64 - 1.0));
        let b = CMatrix::from_fn(3, 3, |i, j| C64::new((i * j) as f64, 0.5));
        assert!((a.trace_product(&b) - (&a * &b).trace()).norm() < 1e-12);
    }
}
