//! Periodic wave functions of the discrete Schrödinger operator on Cayley
//! trees.
//!
//! The vertices of the Cayley tree of order `k` are identified with the free
//! product of `k + 1` copies of Z/2 ([`word`]). A normal subgroup partitions
//! the tree into cosets ([`partition`]); a wave function constant on cosets
//! reduces the Schrödinger equation to a finite symmetric eigenproblem
//! ([`spectrum`]) or, for the integer-labelled infinite-index kernel, to a
//! three-term recurrence ([`chain`]). Every claimed solution can be lifted
//! back to a finite ball and checked vertex by vertex ([`verify`]).

pub mod chain;
pub mod error;
pub mod partition;
pub mod perm;
pub mod poly;
pub mod spectrum;
pub mod verify;
pub mod word;

pub use chain::{ChainClass, ChainParams, ChainPotential, ChainRoots, ChainSequence, ChainSolution};
pub use error::{Error, Result};
pub use partition::{CosetLabeling, CosetPartition, InvolutiveHom, Subgroup, SubgroupSpec, ZProjection};
pub use perm::Permutation;
pub use spectrum::{CharPoly, Convention, PeriodicPotential, SpectralProblem, SpectralSolution};
pub use verify::{BallWaveFunction, ResidualReport};
pub use word::{Ball, GroupParams, ReducedWord, DEFAULT_MAX_BALL};
