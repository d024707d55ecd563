//! Stochastic gradient oracles and problem constants.
//!
//! An oracle returns an unbiased estimate `ĝ(w)` of `∇F(w)`; successive calls are
//! independent draws. [`GradientOracle`] wraps any [`StochasticGradient`] source
//! with call accounting and mini-batch averaging.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::SymMatrix;

/// Generator driving every random draw of a run.
///
/// ChaCha8 gives a portable, documented stream, so a `(seed, config)` pair
/// reproduces a run bit for bit on any platform.
pub type OracleRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> OracleRng {
    OracleRng::seed_from_u64(seed)
}

/// Source of independent unbiased stochastic gradients.
pub trait StochasticGradient {
    fn dim(&self) -> usize;

    /// One draw of `ĝ(w)`.
    fn sample(&self, w: &SymMatrix, rng: &mut OracleRng) -> SymMatrix;
}

impl<S: StochasticGradient + ?Sized> StochasticGradient for &S {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn sample(&self, w: &SymMatrix, rng: &mut OracleRng) -> SymMatrix {
        (**self).sample(w, rng)
    }
}

/// Adapts a closure into a [`StochasticGradient`].
pub struct FnGradient<F> {
    dim: usize,
    f: F,
}

impl<F> FnGradient<F>
where
    F: Fn(&SymMatrix, &mut OracleRng) -> SymMatrix,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnGradient { dim, f }
    }
}

impl<F> StochasticGradient for FnGradient<F>
where
    F: Fn(&SymMatrix, &mut OracleRng) -> SymMatrix,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample(&self, w: &SymMatrix, rng: &mut OracleRng) -> SymMatrix {
        (self.f)(w, rng)
    }
}

/// Deterministic evaluator of `F`, used for excess-risk reporting.
pub trait Objective {
    fn value(&self, w: &SymMatrix) -> f64;
}

impl<O: Objective + ?Sized> Objective for &O {
    fn value(&self, w: &SymMatrix) -> f64 {
        (**self).value(w)
    }
}

/// Counts calls to a gradient source and averages mini-batches.
pub struct GradientOracle<S> {
    source: S,
    bound: Option<f64>,
    calls: u64,
}

impl<S: StochasticGradient> GradientOracle<S> {
    pub fn new(source: S) -> Self {
        GradientOracle { source, bound: None, calls: 0 }
    }

    /// Declares `‖ĝ‖_F ≤ bound`. Checked by debug assertions only; samples are never clipped.
    pub fn with_bound(mut self, bound: f64) -> Self {
        assert!(bound > 0.0, "gradient bound must be positive");
        self.bound = Some(bound);
        self
    }

    pub fn bound(&self) -> Option<f64> {
        self.bound
    }

    pub fn call_count(&self) -> u64 {
        self.calls
    }

    pub fn source(&self) -> &S {
        &self.source
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    pub fn sample(&mut self, w: &SymMatrix, rng: &mut OracleRng) -> SymMatrix {
        self.calls += 1;
        let g = self.source.sample(w, rng);
        if let Some(bound) = self.bound {
            debug_assert!(
                g.frob_norm() <= bound * (1.0 + 1e-12),
                "stochastic gradient norm {} exceeds declared bound {bound}",
                g.frob_norm()
            );
        }
        g
    }

    /// Mean of `batch` independent samples at `w`. Panics if `batch == 0`.
    pub fn average_gradient(&mut self, w: &SymMatrix, batch: u64, rng: &mut OracleRng) -> SymMatrix {
        assert!(batch >= 1, "batch size must be at least 1");
        let mut acc = self.sample(w, rng);
        if batch == 1 {
            return acc;
        }
        for _ in 1..batch {
            let g = self.sample(w, rng);
            acc.add_scaled(1.0, &g);
        }
        acc.scale_mut(1.0 / batch as f64);
        acc
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemSpecError {
    #[error("strong convexity modulus must be positive and finite, got {0}")]
    BadLambda(f64),
    #[error("smoothness constant {smoothness} must be at least the strong convexity modulus {lambda}")]
    SmoothnessBelowLambda { smoothness: f64, lambda: f64 },
    #[error("gradient bound must be positive and finite, got {0}")]
    BadBound(f64),
}

/// Curvature constants of `F`, plus what is known about the optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec {
    /// Strong convexity modulus `λ`.
    pub lambda: f64,
    /// Smoothness constant `L`.
    pub smoothness: f64,
    /// Oracle bound `G`, when the domain makes one available.
    pub gradient_bound: Option<f64>,
    /// `F(w*)`, when known analytically.
    pub optimum_value: Option<f64>,
}

impl ProblemSpec {
    pub fn new(lambda: f64, smoothness: f64) -> Result<Self, ProblemSpecError> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(ProblemSpecError::BadLambda(lambda));
        }
        if !(smoothness >= lambda && smoothness.is_finite()) {
            return Err(ProblemSpecError::SmoothnessBelowLambda { smoothness, lambda });
        }
        Ok(ProblemSpec { lambda, smoothness, gradient_bound: None, optimum_value: None })
    }

    pub fn with_gradient_bound(mut self, g: f64) -> Result<Self, ProblemSpecError> {
        if !(g > 0.0 && g.is_finite()) {
            return Err(ProblemSpecError::BadBound(g));
        }
        self.gradient_bound = Some(g);
        Ok(self)
    }

    pub fn with_optimum(mut self, value: f64) -> Self {
        self.optimum_value = Some(value);
        self
    }

    pub fn condition_number(&self) -> f64 {
        self.smoothness / self.lambda
    }

    /// Worst-case excess risk over the domain, `2G²/λ`.
    pub fn initial_risk_bound(&self) -> Option<f64> {
        self.gradient_bound.map(|g| 2.0 * g * g / self.lambda)
    }
}
