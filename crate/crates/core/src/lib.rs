//! Stochastic optimization of smooth and strongly convex objectives over
//! matrix domains with few projections.
//!
//! The [`optim::logt_solve`] solver combines growing mini-batches,
//! extra-gradient steps and doubling epochs so that it reaches the optimal
//! `O(1/T)` excess risk after `T` oracle calls while projecting only
//! `O(log T)` times. Two projected-SGD baselines, the problem instances used to
//! compare them, and the supporting linear algebra live alongside it.

pub mod data;
pub mod domain;
pub mod linalg;
pub mod optim;
pub mod oracle;
pub mod problems;

pub use domain::{Domain, DomainKind};
pub use linalg::{EigDecomposition, LinalgError, SymMatrix};
pub use optim::{HyperParams, OptimError, RunTrace};
pub use oracle::{rng_from_seed, GradientOracle, Objective, OracleRng, ProblemSpec, StochasticGradient};
