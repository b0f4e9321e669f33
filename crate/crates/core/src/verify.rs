//! Vertex-by-vertex verification of periodic solutions on finite balls.
//!
//! A claimed solution is lifted to every vertex of a ball through its coset
//! labelling, and the Schrödinger equation is checked at each interior
//! vertex by summing over the actual tree neighbours. Nothing here reuses
//! the neighbour-count matrix, so the check is independent of the reduction
//! to the coset system.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::chain::{ChainParams, ChainSequence};
use crate::error::{Error, Result};
use crate::partition::{CosetLabeling, CosetPartition, ZProjection};
use crate::spectrum::{Convention, PeriodicPotential, SpectralProblem, SpectralSolution};
use crate::word::{Ball, GroupParams, ReducedWord};

/// Residual tolerance relative to `(1 + |E|) max |phi|`.
pub const BALL_TOLERANCE: f64 = 1e-10;

/// A wave function and potential assigned to every vertex of a ball.
#[derive(Debug, Clone)]
pub struct BallWaveFunction {
    ball: Ball,
    values: Vec<Complex64>,
    eps_v: Vec<f64>,
    energy: f64,
    convention: Convention,
}

impl BallWaveFunction {
    pub fn from_fn(
        params: GroupParams,
        radius: usize,
        cap: usize,
        energy: f64,
        convention: Convention,
        mut assign: impl FnMut(&ReducedWord) -> (Complex64, f64),
    ) -> Result<Self> {
        let ball = Ball::new(params, radius, cap)?;
        let (values, eps_v) = ball.words().iter().map(&mut assign).unzip();
        Ok(Self {
            ball,
            values,
            eps_v,
            energy,
            convention,
        })
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn value(&self, x: &ReducedWord) -> Option<Complex64> {
        self.ball.position(x).map(|i| self.values[i])
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Overwrites the value at one vertex.
    pub fn set_value(&mut self, x: &ReducedWord, value: Complex64) -> bool {
        match self.ball.position(x) {
            Some(i) => {
                self.values[i] = value;
                true
            }
            None => false,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `(1 + |E|) max |phi|`.
    pub fn scale(&self) -> f64 {
        (1.0 + self.energy.abs()) * self.max_abs()
    }

    /// Residual of the equation at the vertex in position `i`, which must be interior.
    fn vertex_residual(&self, i: usize) -> Complex64 {
        let x = &self.ball.words()[i];
        let neighbor_sum = x
            .neighbors()
            .iter()
            .map(|y| self.values[self.ball.position(y).expect("interior vertex")])
            .fold(Complex64::new(0.0, 0.0), |acc, v| acc + v);
        self.convention.vertex_residual(
            self.ball.params().k(),
            neighbor_sum,
            self.values[i],
            self.eps_v[i],
            self.energy,
        )
    }
}

/// Lifts coset values `components` (one per coset) to a ball.
pub fn lift_components(
    partition: &CosetPartition,
    components: &[f64],
    potential: &PeriodicPotential,
    energy: f64,
    convention: Convention,
    radius: usize,
    cap: usize,
) -> Result<BallWaveFunction> {
    if components.len() != partition.r() {
        return Err(Error::DimensionMismatch {
            expected: partition.r(),
            got: components.len(),
        });
    }
    if potential.len() != partition.r() {
        return Err(Error::DimensionMismatch {
            expected: partition.r(),
            got: potential.len(),
        });
    }
    BallWaveFunction::from_fn(partition.params(), radius, cap, energy, convention, |x| {
        let j = partition.coset_of(x);
        (Complex64::new(components[j], 0.0), potential.scaled(j))
    })
}

/// `phi(x) = phi_{coset(x)}`, `eps v(x) = eps v_{coset(x)}` on a ball.
pub fn lift_finite(
    partition: &CosetPartition,
    solution: &SpectralSolution,
    potential: &PeriodicPotential,
    convention: Convention,
    radius: usize,
    cap: usize,
) -> Result<BallWaveFunction> {
    lift_components(
        partition,
        &solution.components,
        potential,
        solution.energy,
        convention,
        radius,
        cap,
    )
}

/// `phi(x) = phi_n` where `n` is the integer coset label of `x`.
pub fn lift_chain(
    projection: &ZProjection,
    params: &ChainParams,
    sequence: &ChainSequence,
    radius: usize,
    cap: usize,
) -> Result<BallWaveFunction> {
    let r = radius as i64;
    if sequence.start() > -r || sequence.end() < r {
        return Err(Error::RangeTooSmall {
            have_min: sequence.start(),
            have_max: sequence.end(),
            need_min: -r,
            need_max: r,
        });
    }
    if projection.params().k() != params.k {
        return Err(Error::MismatchedOrder {
            left: projection.params().k(),
            right: params.k,
        });
    }
    BallWaveFunction::from_fn(
        projection.params(),
        radius,
        cap,
        params.energy,
        params.convention,
        |x| {
            let n = projection.z_coset_index(x);
            (sequence.get(n).expect("checked range"), params.eps_v(n))
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    pub worst_vertex: ReducedWord,
    pub interior_count: usize,
}

/// Largest residual over interior vertices; ties go to the earliest vertex in
/// breadth-first order.
pub fn residual(w: &BallWaveFunction) -> Result<ResidualReport> {
    if w.ball.radius() < 1 {
        return Err(Error::RadiusTooSmall(1));
    }
    let mut max_residual = 0.0;
    let mut worst = 0;
    let mut interior_count = 0;
    for i in 0..w.ball.len() {
        if !w.ball.is_interior(i) {
            continue;
        }
        interior_count += 1;
        let r = w.vertex_residual(i).norm();
        if r > max_residual {
            max_residual = r;
            worst = i;
        }
    }
    Ok(ResidualReport {
        max_residual,
        worst_vertex: w.ball.words()[worst].clone(),
        interior_count,
    })
}

/// Chain residual per interior vertex computed from the neighbour profile
/// `{n - 1, n (k - 1 times), n + 1}` rather than the actual neighbours.
/// Fails if any interior vertex has a different profile.
pub fn chain_shortcut_residuals(
    w: &BallWaveFunction,
    projection: &ZProjection,
    params: &ChainParams,
    sequence: &ChainSequence,
) -> Result<Vec<(ReducedWord, f64, f64)>> {
    let k = params.k as i64;
    let mut out = Vec::new();
    for i in 0..w.ball.len() {
        if !w.ball.is_interior(i) {
            continue;
        }
        let x = &w.ball.words()[i];
        let n = projection.z_coset_index(x);
        let mut expected = vec![n - 1, n + 1];
        expected.extend(std::iter::repeat_n(n, (k - 1) as usize));
        expected.sort_unstable();
        if projection.z_neighbor_profile(x) != expected {
            return Err(Error::InvalidSubgroup(format!(
                "neighbour profile of {x} is not (n-1, n, n+1)"
            )));
        }
        let at = |m: i64| sequence.get(m).ok_or(Error::InvalidRange);
        let neighbor_sum = at(n - 1)? + at(n)? * (k - 1) as f64 + at(n + 1)?;
        let shortcut = params
            .convention
            .vertex_residual(params.k, neighbor_sum, at(n)?, params.eps_v(n), params.energy)
            .norm();
        out.push((x.clone(), shortcut, w.vertex_residual(i).norm()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicityReport {
    pub trials: usize,
    pub passed: bool,
    /// First failing pair `(y, x)` with `y` in the kernel.
    pub witness: Option<(ReducedWord, ReducedWord)>,
}

/// Checks `phi(y x) = phi(x)` exactly for random kernel elements `y` and ball
/// vertices `x` with `y x` still in the ball.
///
/// Kernel elements are drawn by rejection from random reduced words of
/// length `1..=2R`.
pub fn check_periodicity<L: CosetLabeling, R: Rng>(
    w: &BallWaveFunction,
    labeling: &L,
    trials: usize,
    rng: &mut R,
) -> Result<PeriodicityReport> {
    let params = w.ball.params();
    let radius = w.ball.radius();
    let max_len = (2 * radius).max(1);
    let attempts = trials.saturating_mul(2000).max(10_000);
    let mut done = 0;
    for _ in 0..attempts {
        if done == trials {
            break;
        }
        let y = random_word(params, rng.random_range(1..=max_len), rng);
        if !labeling.in_kernel(&y) {
            continue;
        }
        let x = &w.ball.words()[rng.random_range(0..w.ball.len())];
        let yx = y.multiply(x)?;
        let Some(j) = w.ball.position(&yx) else {
            continue;
        };
        done += 1;
        let i = w.ball.position(x).expect("ball vertex");
        if w.values[j] != w.values[i] {
            return Ok(PeriodicityReport {
                trials: done,
                passed: false,
                witness: Some((y, x.clone())),
            });
        }
    }
    if done < trials {
        return Err(Error::InsufficientKernel {
            found: done,
            wanted: trials,
        });
    }
    Ok(PeriodicityReport {
        trials: done,
        passed: true,
        witness: None,
    })
}

/// A uniformly random reduced word of the given length.
pub fn random_word<R: Rng>(params: GroupParams, len: usize, rng: &mut R) -> ReducedWord {
    let n = params.generators();
    let mut letters: Vec<usize> = Vec::with_capacity(len);
    for _ in 0..len {
        let mut m = rng.random_range(1..=n);
        if let Some(&last) = letters.last() {
            // choose among the n - 1 letters different from `last`
            m = rng.random_range(1..n);
            if m >= last {
                m += 1;
            }
        }
        letters.push(m);
    }
    params.reduce(&letters).expect("indices in range")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FloorReport {
    /// Smallest singular value of `M - E I`: the least 2-norm residual of any
    /// unit coset vector.
    pub sigma_min: f64,
    /// Ball residual of the least-squares minimiser.
    pub ball_residual: f64,
    pub interior_count: usize,
}

/// Lifts the least-squares best periodic assignment at energy `E` and
/// measures its residual on the ball.
pub fn least_squares_floor(
    partition: &CosetPartition,
    problem: &SpectralProblem,
    energy: f64,
    radius: usize,
    cap: usize,
) -> Result<FloorReport> {
    let n = problem.r();
    let shifted = problem.matrix() - DMatrix::identity(n, n) * energy;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let (idx, sigma_min) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty");
    let components: Vec<f64> = v_t.row(idx).iter().copied().collect();
    let w = lift_components(
        partition,
        &components,
        problem.potential(),
        energy,
        problem.convention(),
        radius,
        cap,
    )?;
    let report = residual(&w)?;
    Ok(FloorReport {
        sigma_min,
        ball_residual: report.max_residual,
        interior_count: report.interior_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{general_solution, ChainPotential, ChainRoots};
    use crate::partition::{catalog_even, catalog_h_cap, catalog_trivial};
    use crate::word::DEFAULT_MAX_BALL;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn g(k: usize) -> GroupParams {
        GroupParams::new(k).unwrap()
    }

    fn real(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn constant_function_residuals() {
        let t = CosetPartition::new(catalog_trivial(g(2))).unwrap();
        let pot = PeriodicPotential::new(vec![0.5], 1.0).unwrap();
        let sol = SpectralSolution {
            energy: 3.5,
            components: vec![1.0],
            multiplicity: 1,
            residual: 0.0,
        };
        let w = lift_finite(&t, &sol, &pot, Convention::Adjacency, 3, DEFAULT_MAX_BALL).unwrap();
        assert!(w.values().iter().all(|v| *v == real(1.0)));
        let r = residual(&w).unwrap();
        assert_eq!(r.max_residual, 0.0);
        assert_eq!(r.interior_count, 10);
        assert!(r.worst_vertex.is_identity());

        let off = SpectralSolution { energy: 4.0, ..sol };
        let w = lift_finite(&t, &off, &pot, Convention::Adjacency, 3, DEFAULT_MAX_BALL).unwrap();
        assert_eq!(residual(&w).unwrap().max_residual, 0.5);
    }

    #[test]
    fn lift_even_alternates() {
        let p = CosetPartition::new(catalog_even(g(2))).unwrap();
        let pot = PeriodicPotential::zero(2);
        let w = lift_components(&p, &[1.0, -1.0], &pot, -3.0, Convention::Adjacency, 3, DEFAULT_MAX_BALL).unwrap();
        for (x, v) in w.ball().words().iter().zip(w.values()) {
            let want = if x.len() % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(*v, real(want));
        }
        assert_eq!(residual(&w).unwrap().max_residual, 0.0);
    }

    #[test]
    fn lift_cap_follows_parities() {
        let p = CosetPartition::new(catalog_h_cap(g(2))).unwrap();
        let pot = PeriodicPotential::zero(4);
        let w = lift_components(
            &p,
            &[0.0, 1.0, 2.0, 3.0],
            &pot,
            0.0,
            Convention::Adjacency,
            3,
            DEFAULT_MAX_BALL,
        )
        .unwrap();
        for (x, v) in w.ball().words().iter().zip(w.values()) {
            let odd1 = x.omega_count(1).unwrap() % 2;
            let odd2 = x.omega_count(2).unwrap() % 2;
            assert_eq!(v.re, (odd1 + 2 * odd2) as f64);
        }
    }

    #[test]
    fn lift_chain_examples() {
        let z = ZProjection::new(g(2), 1, 2).unwrap();
        let params = ChainParams::new(2, 0.0, ChainPotential::Constant(0.0), 3.0).unwrap();
        let seq = general_solution(&ChainRoots::from_trace(2.0), real(0.0), real(1.0), -3..=3).unwrap();
        let w = lift_chain(&z, &params, &seq, 3, DEFAULT_MAX_BALL).unwrap();
        assert_eq!(w.value(&g(2).identity()), Some(real(0.0)));
        assert_eq!(w.value(&g(2).reduce(&[1]).unwrap()), Some(real(1.0)));
        assert_eq!(w.value(&g(2).reduce(&[2]).unwrap()), Some(real(-1.0)));
        assert_eq!(w.value(&g(2).reduce(&[3]).unwrap()), Some(real(0.0)));
        assert!(residual(&w).unwrap().max_residual < 1e-12);
        assert!(matches!(
            lift_chain(&z, &params, &seq, 4, DEFAULT_MAX_BALL),
            Err(Error::RangeTooSmall { .. })
        ));
    }

    #[test]
    fn residual_needs_radius() {
        let t = CosetPartition::new(catalog_trivial(g(2))).unwrap();
        let w = lift_components(
            &t,
            &[1.0],
            &PeriodicPotential::zero(1),
            3.0,
            Convention::Adjacency,
            0,
            10,
        )
        .unwrap();
        assert_eq!(residual(&w), Err(Error::RadiusTooSmall(1)));
    }

    #[test]
    fn periodicity_controls() {
        let mut rng = StdRng::seed_from_u64(7);
        let t = CosetPartition::new(catalog_trivial(g(2))).unwrap();
        let w = lift_components(
            &t,
            &[1.0],
            &PeriodicPotential::zero(1),
            3.0,
            Convention::Adjacency,
            3,
            DEFAULT_MAX_BALL,
        )
        .unwrap();
        assert!(check_periodicity(&w, &t, 50, &mut rng).unwrap().passed);

        let p = CosetPartition::new(catalog_even(g(2))).unwrap();
        let mut w = lift_components(
            &p,
            &[1.0, 2.0],
            &PeriodicPotential::zero(2),
            0.0,
            Convention::Adjacency,
            3,
            DEFAULT_MAX_BALL,
        )
        .unwrap();
        let report = check_periodicity(&w, &p, 200, &mut rng).unwrap();
        assert!(report.passed);
        assert_eq!(report.trials, 200);
        let y = g(2).reduce(&[1, 2]).unwrap();
        for x in w.ball().words() {
            let yx = y.multiply(x).unwrap();
            if let Some(v) = w.value(&yx) {
                assert_eq!(v, w.value(x).unwrap());
            }
        }

        w.set_value(&g(2).identity(), real(5.0));
        let report = check_periodicity(&w, &p, 200, &mut rng).unwrap();
        assert!(!report.passed);
        let (y, x) = report.witness.unwrap();
        assert!(p.in_kernel(&y));
        assert!(x.is_identity() || y.multiply(&x).unwrap().is_identity());
    }

    #[test]
    fn random_words_are_reduced() {
        let mut rng = StdRng::seed_from_u64(1);
        for len in 0..20 {
            assert_eq!(random_word(g(3), len, &mut rng).len(), len);
        }
    }
}
