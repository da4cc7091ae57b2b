//! Measurement bases: standard, Fourier, complete MUB sets in prime
//! dimension and the weighted Roy–Scott 2-designs.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{kron_ket, CMatrix, Ket, C64, STRUCT_TOL};

/// Orthonormal basis of `C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    d: usize,
    kets: Vec<Ket>,
}

impl Basis {
    /// Validates orthonormality within `1e-10`.
    pub fn new(kets: Vec<Ket>) -> Result<Self> {
        let d = kets.len();
        if d == 0 {
            return Err(Error::DimensionTooSmall(0));
        }
        if let Some(bad) = kets.iter().find(|k| k.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.len(),
            });
        }
        let basis = Basis { d, kets };
        let defect = basis.orthonormality_defect();
        if defect > STRUCT_TOL {
            return Err(Error::OutOfRange {
                name: "orthonormality defect",
                value: defect,
                range: "[0, 1e-10]",
            });
        }
        Ok(basis)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kets(&self) -> &[Ket] {
        &self.kets
    }

    pub fn ket(&self, j: usize) -> &Ket {
        &self.kets[j]
    }

    /// Max deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.kets.iter().enumerate() {
            for (j, b) in self.kets.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.dotc(b) - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Entrywise complex conjugate in the standard basis.
    pub fn conjugate(&self) -> Basis {
        Basis {
            d: self.d,
            kets: self.kets.iter().map(|k| k.conjugate()).collect(),
        }
    }

    pub fn is_standard(&self) -> bool {
        self.kets.iter().enumerate().all(|(j, k)| {
            k.iter().enumerate().all(|(i, z)| {
                let target = if i == j { 1.0 } else { 0.0 };
                (z - C64::new(target, 0.0)).norm() <= STRUCT_TOL
            })
        })
    }
}

/// Bases with one weight per basis (shared by all kets of that basis).
#[derive(Clone, Debug)]
pub struct WeightedBasisSet {
    bases: Vec<Basis>,
    weights: Vec<f64>,
}

impl WeightedBasisSet {
    pub fn new(bases: Vec<Basis>, weights: Vec<f64>) -> Result<Self> {
        if bases.is_empty() || bases.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: bases.len(),
                found: weights.len(),
            });
        }
        let d = bases[0].d();
        if let Some(b) = bases.iter().find(|b| b.d() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: b.d(),
            });
        }
        if let Some(&w) = weights.iter().find(|w| w.is_nan() || **w < 0.0) {
            return Err(Error::OutOfRange {
                name: "weight",
                value: w,
                range: "[0, inf)",
            });
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::OutOfRange {
                name: "total weight",
                value: total,
                range: "{1}",
            });
        }
        Ok(WeightedBasisSet { bases, weights })
    }

    pub fn d(&self) -> usize {
        self.bases[0].d()
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Basis, f64)> {
        self.bases.iter().zip(self.weights.iter().copied())
    }
}

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Smallest prime `>= n`.
pub fn next_prime(n: usize) -> usize {
    let mut p = n.max(2);
    while !is_prime(p) {
        p += 1;
    }
    p
}

fn unit_phase(turns: f64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * turns)
}

/// Ket `(1/sqrt d) sum_k exp(2πi t_k)|k>` from phases given in turns.
fn phase_ket(turns: impl Iterator<Item = f64>, d: usize) -> Ket {
    let amp = 1.0 / (d as f64).sqrt();
    Ket::from_iterator(d, turns.map(|t| unit_phase(t) * amp))
}

pub fn standard_basis(d: usize) -> Basis {
    let kets = (0..d)
        .map(|j| {
            let mut k = Ket::zeros(d);
            k[j] = C64::new(1.0, 0.0);
            k
        })
        .collect();
    Basis { d, kets }
}

/// Kets `sum_k ω^{jk}|k>/sqrt d` with `ω = exp(2πi/d)`.
pub fn fourier_basis(d: usize) -> Basis {
    let kets = (0..d)
        .map(|j| phase_ket((0..d).map(|k| ((j * k) % d) as f64 / d as f64), d))
        .collect();
    Basis { d, kets }
}

/// Fourier basis with an extra diagonal phase `exp(i φ_k)` on each
/// component. Unbiased with the standard basis for every choice of phases.
pub fn phased_fourier_basis(phases: &[f64]) -> Basis {
    let d = phases.len();
    let kets = (0..d)
        .map(|j| {
            phase_ket(
                (0..d).map(|k| ((j * k) % d) as f64 / d as f64 + phases[k] / (2.0 * PI)),
                d,
            )
        })
        .collect();
    Basis { d, kets }
}

/// Complete set of `d+1` mutually unbiased bases for prime `d`, uniform
/// weights `1/(d+1)`, standard basis first.
pub fn prime_mub_set(d: usize) -> Result<WeightedBasisSet> {
    if !is_prime(d) {
        return Err(Error::NotPrime(d));
    }
    let mut bases = vec![standard_basis(d)];
    if d == 2 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ket = |a: C64, b: C64| Ket::from_vec(vec![a * h, b * h]);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        bases.push(Basis {
            d,
            kets: vec![ket(one, one), ket(one, -one)],
        });
        bases.push(Basis {
            d,
            kets: vec![ket(one, i), ket(one, -i)],
        });
    } else {
        // Quadratic phases ω^{r k^2 + j k}; r = d reduces to the Fourier basis.
        for r in 1..=d {
            let kets = (0..d)
                .map(|j| {
                    phase_ket(
                        (0..d).map(|k| ((r * k * k + j * k) % d) as f64 / d as f64),
                        d,
                    )
                })
                .collect();
            bases.push(Basis { d, kets });
        }
    }
    for (a, b1) in bases.iter().enumerate() {
        assert!(b1.orthonormality_defect() <= STRUCT_TOL);
        for b2 in &bases[a + 1..] {
            assert!(
                is_unbiased(b1, b2, STRUCT_TOL).unwrap_or(false),
                "MUB construction failed in dimension {d}"
            );
        }
    }
    let w = 1.0 / (d + 1) as f64;
    WeightedBasisSet::new(bases, vec![w; d + 1])
}

/// Smallest number of bases accepted by [`roy_scott_set`]:
/// `ceil(3(d-1)^2/4) + 1`.
pub fn roy_scott_min_bases(d: usize) -> usize {
    let q = 3 * (d - 1) * (d - 1);
    q.div_ceil(4) + 1
}

/// Phase (in turns) of component `k` of ket `j` in basis `l`:
/// `jk/d + l*C(k,2)/(m-1)`, each term reduced modulo 1.
pub fn roy_scott_phase(d: usize, m: usize, l: usize, j: usize, k: usize) -> f64 {
    let binom = k * k.saturating_sub(1) / 2;
    ((j * k) % d) as f64 / d as f64 + ((l * binom) % (m - 1)) as f64 / (m - 1) as f64
}

/// Weighted 2-design of `m` bases: the standard basis with weight
/// `1/(d+1)` and `m-1` quadratic-phase bases with weight
/// `d/((m-1)(d+1))`. `m` defaults to [`roy_scott_min_bases`].
///
/// `d = 2` is rejected: the binomial phase vanishes for `k < 2`, so every
/// non-standard basis collapses to the Fourier basis.
pub fn roy_scott_set(d: usize, m: Option<usize>) -> Result<WeightedBasisSet> {
    if d < 3 {
        return Err(Error::DimensionTooSmall(d));
    }
    let min = roy_scott_min_bases(d);
    let m = m.unwrap_or(min);
    if m < min {
        return Err(Error::TooFewBases { m, min });
    }
    let mut bases = vec![standard_basis(d)];
    let mut weights = vec![1.0 / (d + 1) as f64];
    let w = d as f64 / ((m - 1) * (d + 1)) as f64;
    for l in 1..m {
        let kets = (0..d)
            .map(|j| phase_ket((0..d).map(|k| roy_scott_phase(d, m, l, j, k)), d))
            .collect();
        bases.push(Basis { d, kets });
        weights.push(w);
    }
    WeightedBasisSet::new(bases, weights)
}

/// True iff every `| |<a_j|b_k>|^2 - 1/d | <= tol`.
pub fn is_unbiased(b1: &Basis, b2: &Basis, tol: f64) -> Result<bool> {
    if b1.d() != b2.d() {
        return Err(Error::DimensionMismatch {
            expected: b1.d(),
            found: b2.d(),
        });
    }
    let target = 1.0 / b1.d() as f64;
    Ok(b1.kets().iter().all(|a| {
        b2.kets()
            .iter()
            .all(|b| (a.dotc(b).norm_sqr() - target).abs() <= tol)
    }))
}

/// Outcome of [`verify_2design`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DesignCheck {
    pub passed: bool,
    pub residual: f64,
}

/// `sum_l w_l sum_j |ψ_lj><ψ_lj| ⊗ |ψ*_lj><ψ*_lj|`.
pub fn second_moment(set: &WeightedBasisSet) -> CMatrix {
    let d = set.d();
    let mut acc = CMatrix::zeros(d * d, d * d);
    for (basis, w) in set.iter() {
        for ket in basis.kets() {
            let pair = kron_ket(ket, &ket.conjugate());
            acc.add_scaled(w, &CMatrix::outer(&pair));
        }
    }
    acc
}

/// `(I + d|Φ><Φ|)/(d+1)` with `|Φ> = sum_j |jj>/sqrt d`.
pub fn design_target(d: usize) -> CMatrix {
    let scale = 1.0 / (d + 1) as f64;
    let mut target = CMatrix::identity(d * d).scale(scale);
    for j in 0..d {
        for k in 0..d {
            target[(j * d + j, k * d + k)] += C64::new(scale, 0.0);
        }
    }
    target
}

/// Max-norm residual of the conjugate-pair 2-design identity.
pub fn verify_2design(set: &WeightedBasisSet, tol: f64) -> DesignCheck {
    let residual = second_moment(set).max_abs_diff(&design_target(set.d()));
    DesignCheck {
        passed: residual <= tol,
        residual,
    }
}
