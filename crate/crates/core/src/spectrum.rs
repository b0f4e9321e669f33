//! Periodic eigenproblem for a finite-index normal subgroup.
//!
//! A function constant on the cosets of the subgroup solves the Schrödinger
//! equation exactly when its coset values `phi` satisfy `M phi = E phi`, with
//! `M = Q + eps * diag(v)` in the adjacency convention. The admissible
//! energies are the roots of `D(E) = det(M - E I)`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::CosetPartition;
use crate::poly::{berkowitz, Polynomial};

/// Absolute eigen-residual tolerance, scaled by `1 + |E|`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Matrices up to this size get an exact rational characteristic polynomial.
const EXACT_POLY_MAX_DIM: usize = 24;

/// Which operator the energies refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `sum_{y ~ x} phi(y) = (E - eps v(x)) phi(x)`
    #[default]
    Adjacency,
    /// `sum_{y ~ x} (phi(x) - phi(y)) + eps v(x) phi(x) = E phi(x)`
    Laplacian,
}

impl Convention {
    /// Pointwise residual of the equation at a vertex with `k + 1` neighbours.
    pub fn vertex_residual<T>(self, k: usize, neighbor_sum: T, value: T, eps_v: f64, energy: f64) -> T
    where
        T: std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + Copy,
    {
        match self {
            Convention::Adjacency => neighbor_sum - value * (energy - eps_v),
            Convention::Laplacian => value * ((k + 1) as f64 + eps_v - energy) - neighbor_sum,
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Adjacency => "adjacency",
            Convention::Laplacian => "laplacian",
        })
    }
}

impl FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "adjacency" => Ok(Convention::Adjacency),
            "laplacian" => Ok(Convention::Laplacian),
            other => Err(format!(
                "unknown convention {other:?} (expected adjacency or laplacian)"
            )),
        }
    }
}

/// Coset-wise potential values and the coupling constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicPotential {
    values: Vec<f64>,
    epsilon: f64,
}

impl PeriodicPotential {
    pub fn new(values: Vec<f64>, epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("potential"));
        }
        Ok(Self { values, epsilon })
    }

    pub fn zero(r: usize) -> Self {
        Self {
            values: vec![0.0; r],
            epsilon: 0.0,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `eps * v_i`.
    pub fn scaled(&self, i: usize) -> f64 {
        self.epsilon * self.values[i]
    }
}

/// The `r x r` symmetric system for one partition and potential.
#[derive(Debug, Clone)]
pub struct SpectralProblem {
    k: usize,
    potential: PeriodicPotential,
    convention: Convention,
    matrix: DMatrix<f64>,
}

impl SpectralProblem {
    pub fn new(partition: &CosetPartition, potential: PeriodicPotential) -> Result<Self> {
        Self::with_convention(partition, potential, Convention::Adjacency)
    }

    pub fn with_convention(
        partition: &CosetPartition,
        potential: PeriodicPotential,
        convention: Convention,
    ) -> Result<Self> {
        let r = partition.r();
        if potential.len() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: potential.len(),
            });
        }
        let k = partition.params().k();
        let q = partition.q();
        let matrix = DMatrix::from_fn(r, r, |i, j| {
            let coupling = q[i][j] as f64;
            let diagonal = if i == j { potential.scaled(i) } else { 0.0 };
            match convention {
                Convention::Adjacency => coupling + diagonal,
                Convention::Laplacian => {
                    let degree = if i == j { (k + 1) as f64 } else { 0.0 };
                    degree - coupling + diagonal
                }
            }
        });
        Ok(Self {
            k,
            potential,
            convention,
            matrix,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn potential(&self) -> &PeriodicPotential {
        &self.potential
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// `det(M - E I)` by LU factorisation, independent of the polynomial.
    pub fn evaluate_d(&self, energy: f64) -> f64 {
        let n = self.r();
        (&self.matrix - DMatrix::identity(n, n) * energy).determinant()
    }

    /// `D(E) = det(M - E I)` as a polynomial in `E`, leading coefficient `(-1)^r`.
    pub fn determinant_poly(&self) -> CharPoly {
        let n = self.r();
        let rows =
            |m: &DMatrix<f64>| -> Vec<Vec<f64>> { (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect() };
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        if n <= EXACT_POLY_MAX_DIM {
            let exact: Vec<Vec<BigRational>> = rows(&self.matrix)
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|x| BigRational::from_float(x).expect("finite matrix entry"))
                        .collect()
                })
                .collect();
            let highest_first = berkowitz(&exact);
            let sign = BigRational::from_integer(BigInt::from(sign as i64));
            let coefficients: Vec<BigRational> = highest_first.into_iter().rev().map(|c| c * sign.clone()).collect();
            let floats = coefficients.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
            CharPoly {
                coefficients: floats,
                exact: Some(coefficients),
            }
        } else {
            let highest_first = berkowitz(&rows(&self.matrix));
            CharPoly {
                coefficients: highest_first.into_iter().rev().map(|c| c * sign).collect(),
                exact: None,
            }
        }
    }

    /// All admissible energies with normalised coset vectors, ascending.
    ///
    /// Eigenvalues closer than `1e-9 (1 + |E|)` form one degenerate level;
    /// each level reports a canonical orthonormal basis, one
    /// [`SpectralSolution`] per basis vector.
    pub fn energies(&self) -> Result<Vec<SpectralSolution>> {
        let n = self.r();
        let eig = self.matrix.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let mut solutions = Vec::with_capacity(n);
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n {
                let prev = eig.eigenvalues[order[end - 1]];
                let cur = eig.eigenvalues[order[end]];
                if cur - prev > 1e-9 * (1.0 + cur.abs()) {
                    break;
                }
                end += 1;
            }
            let level = &order[start..end];
            let energy = level.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / level.len() as f64;
            let vectors: Vec<DVector<f64>> = level.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
            let mut basis = canonical_basis(&vectors, n);
            basis.sort_by(|a, b| lexicographic(a, b));
            for components in basis {
                let residual = self.residual_of(energy, &components);
                let tolerance = RESIDUAL_TOLERANCE * (1.0 + energy.abs());
                if residual > tolerance {
                    return Err(Error::SolverFailure { residual, tolerance });
                }
                solutions.push(SpectralSolution {
                    energy,
                    components,
                    multiplicity: level.len(),
                    residual,
                });
            }
            start = end;
        }
        Ok(solutions)
    }

    /// `max_i |(M phi - E phi)_i|`.
    pub fn residual_of(&self, energy: f64, components: &[f64]) -> f64 {
        let phi = DVector::from_column_slice(components);
        let r = &self.matrix * &phi - &phi * energy;
        r.amax()
    }
}

/// Orthonormal basis of the span of `vectors` that does not depend on which
/// basis the solver returned: Gram-Schmidt applied to the projector's columns.
fn canonical_basis(vectors: &[DVector<f64>], n: usize) -> Vec<Vec<f64>> {
    if vectors.len() == 1 {
        return vec![normalize_sign(vectors[0].iter().copied().collect())];
    }
    let mut projector = DMatrix::<f64>::zeros(n, n);
    for v in vectors {
        projector += v * v.transpose();
    }
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
    for j in 0..n {
        if basis.len() == vectors.len() {
            break;
        }
        let mut candidate = projector.column(j).into_owned();
        for b in &basis {
            let overlap = b.dot(&candidate);
            candidate -= b * overlap;
        }
        let norm = candidate.norm();
        if norm > 1e-6 {
            basis.push(candidate / norm);
        }
    }
    basis
        .into_iter()
        .map(|v| normalize_sign(v.iter().copied().collect()))
        .collect()
}

/// Unit 2-norm, first component above noise level made positive.
fn normalize_sign(mut v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-10) {
        if *first < 0.0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
    v
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

/// Coefficients of `D(E)` in ascending powers of `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPoly {
    pub coefficients: Vec<f64>,
    /// Present when the polynomial was computed in exact rational arithmetic.
    pub exact: Option<Vec<BigRational>>,
}

impl CharPoly {
    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn polynomial(&self) -> Polynomial {
        Polynomial::new(self.coefficients.clone())
    }

    pub fn eval(&self, energy: f64) -> f64 {
        self.polynomial().eval(energy)
    }

    /// Roots from the polynomial path, ascending with multiplicity.
    pub fn roots(&self) -> Vec<f64> {
        self.polynomial().real_roots()
    }

    /// Exact value at a rational point, when available.
    pub fn eval_exact(&self, energy: &BigRational) -> Option<BigRational> {
        self.exact
            .as_ref()
            .map(|c| c.iter().rev().fold(BigRational::zero(), |acc, ci| acc * energy + ci))
    }
}

/// One admissible energy and a normalised coset vector for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSolution {
    pub energy: f64,
    pub components: Vec<f64>,
    pub multiplicity: usize,
    pub residual: f64,
}
