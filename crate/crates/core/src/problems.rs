//! The two benchmark problems: a noisy quadratic over the PSD cone and
//! regularized distance metric learning with the logit loss.

use rand::Rng;
use rand_distr::Uniform;

use crate::data::{draw_pair_indices, DataError, Dataset, LabeledPair};
use crate::linalg::SymMatrix;
use crate::oracle::{rng_from_seed, Objective, OracleRng, ProblemSpec, StochasticGradient};

/// `F(W) = ½‖W‖²_F` with oracle `ĝ(W) = W + Z`, `Z` symmetric with uniform `[-1, 1]` entries.
///
/// The minimizer over the PSD cone is `W* = 0`, so the excess risk is `F(W)` itself.
#[derive(Debug, Clone)]
pub struct QuadraticPsdProblem {
    dim: usize,
    spec: ProblemSpec,
}

impl QuadraticPsdProblem {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        let spec = ProblemSpec::new(1.0, 1.0).expect("unit constants are valid").with_optimum(0.0);
        QuadraticPsdProblem { dim, spec }
    }

    /// Same problem restricted to `‖W‖_F ≤ radius`, which bounds the oracle by
    /// `G = radius + dim` (`‖Z‖_F ≤ dim`).
    pub fn with_radius(dim: usize, radius: f64) -> Self {
        let mut p = Self::new(dim);
        p.spec = p.spec.with_gradient_bound(radius + dim as f64).expect("positive bound");
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn starting_point(&self) -> SymMatrix {
        SymMatrix::identity(self.dim)
    }

    /// `∇F(W) = W`.
    pub fn gradient(&self, w: &SymMatrix) -> SymMatrix {
        w.clone()
    }
}

/// Symmetric noise: upper triangle and diagonal i.i.d. uniform `[-1, 1]`, mirrored.
pub fn quad_noise(dim: usize, rng: &mut OracleRng) -> SymMatrix {
    let unif = Uniform::new_inclusive(-1.0, 1.0).expect("valid range");
    SymMatrix::from_upper(dim, |_, _| rng.sample(unif)).expect("bounded draws are finite")
}

pub fn quad_oracle_sample(w: &SymMatrix, rng: &mut OracleRng) -> SymMatrix {
    let mut g = quad_noise(w.dim(), rng);
    g.add_scaled(1.0, w);
    g
}

pub fn quad_objective(w: &SymMatrix) -> f64 {
    let n = w.frob_norm();
    0.5 * n * n
}

impl StochasticGradient for QuadraticPsdProblem {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample(&self, w: &SymMatrix, rng: &mut OracleRng) -> SymMatrix {
        quad_oracle_sample(w, rng)
    }
}

impl Objective for QuadraticPsdProblem {
    fn value(&self, w: &SymMatrix) -> f64 {
        quad_objective(w)
    }
}

/// `ℓ(z) = log(1 + exp(-z))`, evaluated without overflow.
pub fn logit_loss(z: f64) -> f64 {
    if z > 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

/// `1 / (1 + exp(-x))`.
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Margin `z = y_ij (1 − dᵀ M d)` for `d = x_i − x_j`.
fn pair_margin(metric: &SymMatrix, d: &[f64], agreement: f64) -> f64 {
    agreement * (1.0 - metric.quad_form(d))
}

/// Single-pair objective `ℓ(y_ij (1 − dᵀMd)) + (λ/2)‖M‖²_F`.
pub fn metric_pair_loss(metric: &SymMatrix, pair: &LabeledPair<'_>, reg_lambda: f64) -> f64 {
    let d = pair.difference();
    let n = metric.frob_norm();
    logit_loss(pair_margin(metric, &d, pair.agreement)) + 0.5 * reg_lambda * n * n
}

/// Gradient of [`metric_pair_loss`] in `M`: `σ(−z)·y_ij·d dᵀ + λ M`.
///
/// From `ℓ'(z) = −σ(−z)` and `∂z/∂M = −y_ij d dᵀ`.
pub fn metric_pair_gradient(metric: &SymMatrix, pair: &LabeledPair<'_>, reg_lambda: f64) -> SymMatrix {
    let d = pair.difference();
    let z = pair_margin(metric, &d, pair.agreement);
    let mut g = metric.scaled(reg_lambda);
    g.add_rank_one(logistic(-z) * pair.agreement, &d);
    g
}

/// Regularized metric learning over the pairs of a (normalized) dataset.
///
/// Each oracle call draws a fresh training pair. The objective is estimated on a
/// fixed set of test pairs drawn once from an independent stream.
#[derive(Debug, Clone)]
pub struct MetricLearningProblem {
    data: Dataset,
    reg_lambda: f64,
    test_pairs: Vec<(usize, usize)>,
    spec: ProblemSpec,
}

/// Salt mixed into the data seed for the test-pair stream.
const TEST_PAIR_STREAM_TAG: u64 = 0x7e57_0a1b_5eed_cafe;

/// Exact max over pairs up to this many points; a centroid bound beyond.
const EXACT_DIAMETER_LIMIT: usize = 5000;

impl MetricLearningProblem {
    pub fn new(data: Dataset, reg_lambda: f64, test_pair_count: usize, seed: u64) -> Result<Self, DataError> {
        if data.len() < 2 {
            return Err(DataError::TooFewPoints { needed: 2, actual: data.len() });
        }
        if !(reg_lambda > 0.0 && reg_lambda.is_finite()) {
            return Err(DataError::Invalid(format!("regularization weight must be positive, got {reg_lambda}")));
        }
        let mut rng = rng_from_seed(seed ^ TEST_PAIR_STREAM_TAG);
        let test_pairs = (0..test_pair_count).map(|_| draw_pair_indices(data.len(), &mut rng)).collect();
        let max_sq = max_pair_sq_distance(&data);
        let smoothness = reg_lambda + 0.25 * max_sq * max_sq;
        let spec = ProblemSpec::new(reg_lambda, smoothness).map_err(|e| DataError::Invalid(e.to_string()))?;
        Ok(MetricLearningProblem { data, reg_lambda, test_pairs, spec })
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn reg_lambda(&self) -> f64 {
        self.reg_lambda
    }

    pub fn test_pairs(&self) -> &[(usize, usize)] {
        &self.test_pairs
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.data.dim()
    }

    pub fn starting_point(&self) -> SymMatrix {
        SymMatrix::identity(self.dim())
    }

    /// Mean test-pair loss.
    pub fn test_loss(&self, metric: &SymMatrix) -> f64 {
        mean_pair_loss(metric, &self.data, &self.test_pairs)
    }

    /// Mean test-pair loss plus `(λ/2)‖M‖²_F`.
    pub fn objective_estimate(&self, metric: &SymMatrix) -> f64 {
        let n = metric.frob_norm();
        self.test_loss(metric) + 0.5 * self.reg_lambda * n * n
    }
}

pub fn metric_objective_estimate(metric: &SymMatrix, problem: &MetricLearningProblem) -> f64 {
    problem.objective_estimate(metric)
}

/// Mean logit loss over the given index pairs (no regularizer).
pub fn mean_pair_loss(metric: &SymMatrix, data: &Dataset, pairs: &[(usize, usize)]) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    let total: f64 = pairs
        .iter()
        .map(|&(i, j)| {
            let pair = LabeledPair::from_indices(data, i, j);
            logit_loss(pair_margin(metric, &pair.difference(), pair.agreement))
        })
        .sum();
    total / pairs.len() as f64
}

/// Largest `‖x_i − x_j‖²` (exact for moderate sizes, otherwise `(2·max‖x_i − c‖)²`).
fn max_pair_sq_distance(data: &Dataset) -> f64 {
    let n = data.len();
    let sq = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
    if n <= EXACT_DIAMETER_LIMIT {
        let mut best = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.max(sq(data.point(i), data.point(j)));
            }
        }
        best
    } else {
        let mut centroid = vec![0.0; data.dim()];
        for p in data.points() {
            centroid.iter_mut().zip(p).for_each(|(c, v)| *c += v);
        }
        centroid.iter_mut().for_each(|c| *c /= n as f64);
        let radius_sq = data.points().map(|p| sq(p, &centroid)).fold(0.0, f64::max);
        4.0 * radius_sq
    }
}

impl StochasticGradient for MetricLearningProblem {
    fn dim(&self) -> usize {
        self.data.dim()
    }

    fn sample(&self, w: &SymMatrix, rng: &mut OracleRng) -> SymMatrix {
        let (i, j) = draw_pair_indices(self.data.len(), rng);
        metric_pair_gradient(w, &LabeledPair::from_indices(&self.data, i, j), self.reg_lambda)
    }
}

impl Objective for MetricLearningProblem {
    fn value(&self, w: &SymMatrix) -> f64 {
        self.objective_estimate(w)
    }
}
