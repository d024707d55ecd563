//! Labeled feature datasets: LIBSVM text I/O, synthetic clusters and pair sampling.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::oracle::{rng_from_seed, OracleRng};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("dataset is empty")]
    Empty,
    #[error("dataset needs at least {needed} points, has {actual}")]
    TooFewPoints { needed: usize, actual: usize },
    #[error("{0}")]
    Invalid(String),
}

/// Dense labeled points, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    features: Vec<f64>,
    labels: Vec<i64>,
}

impl Dataset {
    pub fn new(dim: usize, points: Vec<Vec<f64>>, labels: Vec<i64>) -> Result<Self, DataError> {
        if points.len() != labels.len() {
            return Err(DataError::Invalid(format!("{} points but {} labels", points.len(), labels.len())));
        }
        let mut features = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(DataError::Invalid(format!("point {i} has {} features, expected {dim}", p.len())));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(DataError::Invalid(format!("point {i} has a non-finite feature")));
            }
            features.extend_from_slice(p);
        }
        Ok(Dataset { dim, features, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> i64 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.features.chunks(self.dim.max(1)).take(self.len())
    }

    pub fn distinct_labels(&self) -> Vec<i64> {
        let mut l = self.labels.clone();
        l.sort_unstable();
        l.dedup();
        l
    }

    /// Rescales every feature to `[0, 1]` by its min and max; constant features become 0.
    pub fn normalize_unit_range(&mut self) {
        let n = self.len();
        for f in 0..self.dim {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for i in 0..n {
                let v = self.features[i * self.dim + f];
                lo = lo.min(v);
                hi = hi.max(v);
            }
            let span = hi - lo;
            for i in 0..n {
                let v = &mut self.features[i * self.dim + f];
                *v = if span > 0.0 { (*v - lo) / span } else { 0.0 };
            }
        }
    }

    pub fn normalized(mut self) -> Self {
        self.normalize_unit_range();
        self
    }
}

/// Reads a LIBSVM file: `label idx:val idx:val …` with 1-based indices.
///
/// The dimension is `expected_dim` when given (indices beyond it are rejected),
/// otherwise the largest index seen.
pub fn load_libsvm(path: impl AsRef<Path>, expected_dim: Option<usize>) -> Result<Dataset, DataError> {
    let file = File::open(path)?;
    parse_libsvm(BufReader::new(file), expected_dim)
}

pub fn parse_libsvm(reader: impl BufRead, expected_dim: Option<usize>) -> Result<Dataset, DataError> {
    let mut rows: Vec<(i64, Vec<(usize, f64)>)> = Vec::new();
    let mut max_index = 0usize;

    for (line_no, line) in reader.lines().enumerate() {
        let line_no = line_no + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| DataError::Parse { line: line_no, message };

        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a first token");
        let label = parse_label(label_tok).ok_or_else(|| err(format!("invalid label `{label_tok}`")))?;

        let mut entries = Vec::new();
        for tok in tokens {
            let (idx, val) = tok.split_once(':').ok_or_else(|| err(format!("expected `index:value`, got `{tok}`")))?;
            let idx: usize = idx.parse().map_err(|_| err(format!("invalid feature index `{idx}`")))?;
            if idx == 0 {
                return Err(err("feature indices are 1-based; got 0".into()));
            }
            let val: f64 = val.parse().map_err(|_| err(format!("invalid feature value `{val}`")))?;
            if !val.is_finite() {
                return Err(err(format!("non-finite feature value `{val}`")));
            }
            if let Some(d) = expected_dim {
                if idx > d {
                    return Err(err(format!("feature index {idx} exceeds expected dimension {d}")));
                }
            }
            max_index = max_index.max(idx);
            entries.push((idx, val));
        }
        rows.push((label, entries));
    }

    let dim = expected_dim.unwrap_or(max_index);
    let mut features = vec![0.0; rows.len() * dim];
    let mut labels = Vec::with_capacity(rows.len());
    for (i, (label, entries)) in rows.into_iter().enumerate() {
        for (idx, val) in entries {
            features[i * dim + idx - 1] = val;
        }
        labels.push(label);
    }
    Ok(Dataset { dim, features, labels })
}

fn parse_label(tok: &str) -> Option<i64> {
    if let Ok(v) = tok.parse::<i64>() {
        return Some(v);
    }
    let v: f64 = tok.parse().ok()?;
    (v.is_finite() && v.fract() == 0.0 && v.abs() < 9.0e15).then_some(v as i64)
}

/// Writes a dataset in LIBSVM format, omitting zero features.
pub fn write_libsvm(ds: &Dataset, mut out: impl Write) -> io::Result<()> {
    for i in 0..ds.len() {
        let label = ds.label(i);
        if label > 0 {
            write!(out, "+{label}")?;
        } else {
            write!(out, "{label}")?;
        }
        for (j, v) in ds.point(i).iter().enumerate() {
            if *v != 0.0 {
                write!(out, " {}:{}", j + 1, v)?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Two unit-variance Gaussian clusters at `±(separation/2)·u` for a random unit `u`,
/// labeled `+1` and `-1`, before normalization.
pub fn synth_clusters_raw(n: usize, dim: usize, separation: f64, seed: u64) -> Result<Dataset, DataError> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(DataError::Invalid(format!("point count must be even and at least 2, got {n}")));
    }
    if dim == 0 {
        return Err(DataError::Invalid("feature dimension must be positive".into()));
    }
    let mut rng = rng_from_seed(seed);
    let direction = loop {
        let u: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-12 {
            break u.into_iter().map(|v| v / norm).collect::<Vec<_>>();
        }
    };
    let half = separation / 2.0;
    let mut features = Vec::with_capacity(n * dim);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let (sign, label) = if i < n / 2 { (1.0, 1) } else { (-1.0, -1) };
        for u in &direction {
            let noise: f64 = StandardNormal.sample(&mut rng);
            features.push(sign * half * u + noise);
        }
        labels.push(label);
    }
    Ok(Dataset { dim, features, labels })
}

/// [`synth_clusters_raw`] followed by per-feature normalization to `[0, 1]`.
pub fn synth_clusters(n: usize, dim: usize, separation: f64, seed: u64) -> Result<Dataset, DataError> {
    Ok(synth_clusters_raw(n, dim, separation, seed)?.normalized())
}

/// A training or test pair `{(x_i, y_i), (x_j, y_j)}`.
#[derive(Debug, Clone, Copy)]
pub struct LabeledPair<'a> {
    pub first: &'a [f64],
    pub second: &'a [f64],
    /// `+1` when the labels agree, `-1` otherwise.
    pub agreement: f64,
}

impl<'a> LabeledPair<'a> {
    pub fn from_indices(ds: &'a Dataset, i: usize, j: usize) -> Self {
        let agreement = if ds.label(i) == ds.label(j) { 1.0 } else { -1.0 };
        LabeledPair { first: ds.point(i), second: ds.point(j), agreement }
    }

    /// `x_i - x_j`.
    pub fn difference(&self) -> Vec<f64> {
        self.first.iter().zip(self.second).map(|(a, b)| a - b).collect()
    }
}

/// Draws index pairs `i ≠ j` uniformly.
pub fn draw_pair_indices(n: usize, rng: &mut OracleRng) -> (usize, usize) {
    debug_assert!(n >= 2);
    let i = rng.random_range(0..n);
    loop {
        let j = rng.random_range(0..n);
        if j != i {
            return (i, j);
        }
    }
}

/// Endless stream of uniformly drawn pairs from a dataset.
pub struct PairStream<'a> {
    data: &'a Dataset,
    rng: &'a mut OracleRng,
}

impl<'a> Iterator for PairStream<'a> {
    type Item = LabeledPair<'a>;

    fn next(&mut self) -> Option<Self::Item> {
        let (i, j) = draw_pair_indices(self.data.len(), self.rng);
        Some(LabeledPair::from_indices(self.data, i, j))
    }
}

pub fn make_pair_stream<'a>(ds: &'a Dataset, rng: &'a mut OracleRng) -> Result<PairStream<'a>, DataError> {
    if ds.len() < 2 {
        return Err(DataError::TooFewPoints { needed: 2, actual: ds.len() });
    }
    Ok(PairStream { data: ds, rng })
}
