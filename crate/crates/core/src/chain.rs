//! The integer-indexed chain obtained from the infinite-index kernel.
//!
//! A function constant on the cosets `H_n` satisfies the three-term
//! recurrence `phi_{n+1} = c_n phi_n - phi_{n-1}`, where in the adjacency
//! convention `c_n = E - eps v_n - (k - 1)`. For a constant potential the
//! general solution is `C1 l1^n + C2 l2^n` with `l1, l2` the roots of
//! `l^2 - c l + 1 = 0`, or `(C1 + C2 n) l^n` at a double root.

use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::Convention;

/// Below this gap the two-root basis is numerically unusable.
pub const ILL_CONDITIONED_GAP: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainPotential {
    Constant(f64),
    /// `v_n = values[n mod p]`.
    Periodic(Vec<f64>),
}

impl ChainPotential {
    pub fn at(&self, n: i64) -> f64 {
        match self {
            ChainPotential::Constant(v) => *v,
            ChainPotential::Periodic(values) => values[n.rem_euclid(values.len() as i64) as usize],
        }
    }

    pub fn constant(&self) -> Option<f64> {
        match self {
            ChainPotential::Constant(v) => Some(*v),
            ChainPotential::Periodic(values) => {
                let first = values[0];
                values.iter().all(|&v| v == first).then_some(first)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub k: usize,
    pub epsilon: f64,
    pub potential: ChainPotential,
    pub energy: f64,
    #[serde(default)]
    pub convention: Convention,
}

impl ChainParams {
    pub fn new(k: usize, epsilon: f64, potential: ChainPotential, energy: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidOrder);
        }
        let finite = match &potential {
            ChainPotential::Constant(v) => v.is_finite(),
            ChainPotential::Periodic(values) => {
                if values.is_empty() {
                    return Err(Error::DimensionMismatch { expected: 1, got: 0 });
                }
                values.iter().all(|v| v.is_finite())
            }
        };
        if !finite || !epsilon.is_finite() || !energy.is_finite() {
            return Err(Error::NonFinite("chain parameters"));
        }
        Ok(Self {
            k,
            epsilon,
            potential,
            energy,
            convention: Convention::Adjacency,
        })
    }

    pub fn with_convention(mut self, convention: Convention) -> Self {
        self.convention = convention;
        self
    }

    /// `eps v_n`.
    pub fn eps_v(&self, n: i64) -> f64 {
        self.epsilon * self.potential.at(n)
    }

    /// Recurrence coefficient `c_n` in `phi_{n+1} = c_n phi_n - phi_{n-1}`.
    pub fn coefficient(&self, n: i64) -> f64 {
        let ev = self.eps_v(n);
        match self.convention {
            Convention::Adjacency => self.energy - ev - (self.k as f64 - 1.0),
            Convention::Laplacian => 2.0 + ev - self.energy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainClass {
    /// Conjugate roots on the unit circle.
    Oscillatory,
    /// Double root at `+1` or `-1`.
    Degenerate,
    /// Real reciprocal pair off the unit circle.
    Exponential,
}

/// The roots of `l^2 - c l + 1 = 0`, ordered by modulus then argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainRoots {
    pub lambda1: Complex64,
    pub lambda2: Complex64,
    pub class: ChainClass,
}

impl ChainRoots {
    pub fn from_trace(c: f64) -> Self {
        let disc = c * c - 4.0;
        if disc == 0.0 {
            let l = Complex64::new(c / 2.0, 0.0);
            return Self {
                lambda1: l,
                lambda2: l,
                class: ChainClass::Degenerate,
            };
        }
        if disc < 0.0 {
            let im = (-disc).sqrt() / 2.0;
            let re = c / 2.0;
            return Self {
                lambda1: Complex64::new(re, -im),
                lambda2: Complex64::new(re, im),
                class: ChainClass::Oscillatory,
            };
        }
        // avoid cancellation: take the larger root directly, the other by Vieta
        let big = (c + c.signum() * disc.sqrt()) / 2.0;
        Self {
            lambda1: Complex64::new(1.0 / big, 0.0),
            lambda2: Complex64::new(big, 0.0),
            class: ChainClass::Exponential,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.class == ChainClass::Degenerate
    }
}

/// Characteristic roots for a constant potential.
pub fn characteristic_roots(params: &ChainParams) -> Result<ChainRoots> {
    if params.potential.constant().is_none() {
        return Err(Error::NonConstantPotential);
    }
    Ok(ChainRoots::from_trace(params.coefficient(0)))
}

/// `phi_n` for `n` in `start..start + values.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSequence {
    start: i64,
    values: Vec<Complex64>,
}

impl ChainSequence {
    pub fn new(start: i64, values: Vec<Complex64>) -> Self {
        Self { start, values }
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, n: i64) -> Option<Complex64> {
        if n < self.start {
            return None;
        }
        self.values.get((n - self.start) as usize).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.start + i as i64, *v))
    }

    /// True when every imaginary part is below `1e-12` of its value's modulus.
    pub fn is_real(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.im.abs() <= 1e-12 * v.norm().max(f64::MIN_POSITIVE))
    }

    /// Sequence with imaginary parts at or below `1e-12` of the modulus set to zero.
    pub fn realified(&self) -> ChainSequence {
        let values = self
            .values
            .iter()
            .map(|v| {
                if v.im.abs() <= 1e-12 * v.norm() {
                    Complex64::new(v.re, 0.0)
                } else {
                    *v
                }
            })
            .collect();
        ChainSequence::new(self.start, values)
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

fn check_range(range: &RangeInclusive<i64>) -> Result<()> {
    if range.start() > range.end() {
        return Err(Error::InvalidRange);
    }
    Ok(())
}

fn power(l: Complex64, n: i64) -> Result<Complex64> {
    if n.unsigned_abs() as f64 * l.norm().ln().abs() > 700.0 {
        return Err(Error::Overflow { n });
    }
    let n32 = i32::try_from(n).map_err(|_| Error::Overflow { n })?;
    Ok(l.powi(n32))
}

/// A closed-form chain solution: characteristic roots and coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSolution {
    pub roots: ChainRoots,
    pub c1: Complex64,
    pub c2: Complex64,
}

impl ChainSolution {
    pub fn degenerate(&self) -> bool {
        self.roots.is_degenerate()
    }

    /// Unbounded on at least one side (`|l| != 1`, or linear growth at a double root).
    pub fn pointwise_only(&self) -> bool {
        match self.roots.class {
            ChainClass::Oscillatory => false,
            ChainClass::Degenerate => self.c2 != Complex64::new(0.0, 0.0),
            ChainClass::Exponential => true,
        }
    }

    pub fn sequence(&self, range: RangeInclusive<i64>) -> Result<ChainSequence> {
        general_solution(&self.roots, self.c1, self.c2, range)
    }
}

/// `C1 l1^n + C2 l2^n`, or `(C1 + C2 n) l^n` at a double root.
pub fn general_solution(
    roots: &ChainRoots,
    c1: Complex64,
    c2: Complex64,
    range: RangeInclusive<i64>,
) -> Result<ChainSequence> {
    check_range(&range)?;
    let start = *range.start();
    let mut values = Vec::new();
    for n in range {
        let v = if roots.is_degenerate() {
            (c1 + c2 * n as f64) * power(roots.lambda1, n)?
        } else {
            c1 * power(roots.lambda1, n)? + c2 * power(roots.lambda2, n)?
        };
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Overflow { n });
        }
        values.push(v);
    }
    Ok(ChainSequence::new(start, values))
}

/// Coefficients matching the seeds `phi_0`, `phi_1`.
pub fn fit_coefficients(roots: &ChainRoots, phi0: Complex64, phi1: Complex64) -> Result<(Complex64, Complex64)> {
    let (l1, l2) = (roots.lambda1, roots.lambda2);
    if roots.is_degenerate() {
        // phi_0 = C1, phi_1 = (C1 + C2) l
        return Ok((phi0, phi1 / l1 - phi0));
    }
    let gap = (l2 - l1).norm();
    if gap < ILL_CONDITIONED_GAP {
        return Err(Error::IllConditioned { gap });
    }
    let c2 = (phi1 - l1 * phi0) / (l2 - l1);
    Ok((phi0 - c2, c2))
}

/// Iterates the recurrence both ways from the seeds at `n = 0, 1`.
/// Works for any periodic potential.
pub fn solve_recurrence(
    params: &ChainParams,
    phi0: Complex64,
    phi1: Complex64,
    range: RangeInclusive<i64>,
) -> Result<ChainSequence> {
    check_range(&range)?;
    let (lo, hi) = (*range.start(), *range.end());
    if lo > 0 || hi < 1 {
        return Err(Error::InvalidRange);
    }
    let finite = |v: Complex64, n: i64| {
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Overflow { n })
        }
    };
    let mut forward = vec![phi0, phi1];
    for n in 1..hi {
        let next = params.coefficient(n) * forward[n as usize] - forward[n as usize - 1];
        forward.push(finite(next, n + 1)?);
    }
    // backward[i] holds phi_{-i-1}
    let mut backward = Vec::with_capacity((-lo) as usize);
    let (mut right, mut cur) = (phi1, phi0);
    for n in (lo..0).rev() {
        let prev = params.coefficient(n + 1) * cur - right;
        let prev = finite(prev, n)?;
        backward.push(prev);
        right = cur;
        cur = prev;
    }
    let mut values: Vec<Complex64> = backward.into_iter().rev().collect();
    values.extend(forward);
    Ok(ChainSequence::new(lo, values))
}

/// Closed-form solution through given seeds for a constant potential.
pub fn solution_from_seeds(params: &ChainParams, phi0: Complex64, phi1: Complex64) -> Result<ChainSolution> {
    let roots = characteristic_roots(params)?;
    let (c1, c2) = fit_coefficients(&roots, phi0, phi1)?;
    Ok(ChainSolution { roots, c1, c2 })
}
