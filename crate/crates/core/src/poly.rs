//! Characteristic polynomials and a real-root finder for real-rooted
//! polynomials. This path is independent of the eigen-solver and is used to
//! cross-check it.

use std::ops::{Mul, Sub};

use num_traits::{One, Zero};

/// Coefficients of `det(t I - A)`, highest degree first, by Berkowitz's
/// division-free algorithm.
pub fn berkowitz<T>(a: &[Vec<T>]) -> Vec<T>
where
    T: Clone + Zero + One + Sub<Output = T> + Mul<Output = T>,
{
    let n = a.len();
    let mut poly = vec![T::one()];
    for r in 0..n {
        // leading block A_r, column C = a[0..r][r], row R = a[r][0..r], corner a[r][r]
        let mut toeplitz = Vec::with_capacity(r + 2);
        toeplitz.push(T::one());
        toeplitz.push(T::zero() - a[r][r].clone());
        let mut v: Vec<T> = (0..r).map(|i| a[i][r].clone()).collect();
        for _ in 0..r {
            let dot = (0..r).fold(T::zero(), |acc, j| acc + a[r][j].clone() * v[j].clone());
            toeplitz.push(T::zero() - dot);
            v = (0..r)
                .map(|i| (0..r).fold(T::zero(), |acc, j| acc + a[i][j].clone() * v[j].clone()))
                .collect();
        }
        let mut next = Vec::with_capacity(r + 2);
        for i in 0..r + 2 {
            let mut acc = T::zero();
            for j in 0..=i.min(r) {
                if i - j < toeplitz.len() {
                    acc = acc + toeplitz[i - j].clone() * poly[j].clone();
                }
            }
            next.push(acc);
        }
        poly = next;
    }
    poly
}

/// A real polynomial, coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Value together with a bound on the rounding error of Horner's rule.
    fn eval_with_noise(&self, x: f64) -> (f64, f64) {
        let value = self.eval(x);
        let magnitude = self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x.abs() + c.abs());
        let noise = 4.0 * (self.coeffs.len() as f64) * f64::EPSILON * magnitude;
        (value, noise)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::new(vec![0.0]);
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    /// Cauchy bound on the magnitude of every root.
    fn root_bound(&self) -> f64 {
        let lead = *self.coeffs.last().unwrap();
        1.0 + self.coeffs[..self.degree()]
            .iter()
            .map(|c| (c / lead).abs())
            .fold(0.0, f64::max)
    }

    /// All roots, ascending and counted with multiplicity, assuming every
    /// root is real.
    ///
    /// The roots of the derivative interlace those of the polynomial, so the
    /// polynomial is monotone between consecutive critical points and each
    /// such interval holds exactly one root, located by bisection. A value
    /// within rounding noise of zero counts as a root, which is how multiple
    /// roots (shared with the derivative) are picked up.
    pub fn real_roots(&self) -> Vec<f64> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        if n == 1 {
            return vec![-self.coeffs[0] / self.coeffs[1]];
        }
        let bound = self.root_bound();
        let critical = self.derivative().real_roots();
        let mut edges = Vec::with_capacity(n + 1);
        edges.push(-bound);
        edges.extend(critical.iter().map(|c| c.clamp(-bound, bound)));
        edges.push(bound);
        edges.windows(2).map(|w| self.bisect(w[0], w[1])).collect()
    }

    fn bisect(&self, mut lo: f64, mut hi: f64) -> f64 {
        let (mut f_lo, noise_lo) = self.eval_with_noise(lo);
        let (f_hi, noise_hi) = self.eval_with_noise(hi);
        if f_lo.abs() <= noise_lo && f_lo.abs() <= f_hi.abs() {
            return lo;
        }
        if f_hi.abs() <= noise_hi {
            return hi;
        }
        if f_lo.signum() == f_hi.signum() {
            return if f_lo.abs() < f_hi.abs() { lo } else { hi };
        }
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let f_mid = self.eval(mid);
            if f_mid == 0.0 {
                return mid;
            }
            if f_mid.signum() == f_lo.signum() {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}
