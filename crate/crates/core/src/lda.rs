//! Linear discriminant analysis: per-class means, within/between scatter,
//! and the projection that maximizes the between-over-within Rayleigh
//! quotient, with shrinkage regularization of the within-class scatter.
//!
//! The binary target/non-target case solves `w = S_w^-1 (mu_0 - mu_1)`
//! directly; the multiclass case whitens by the Cholesky factor of the
//! regularized within-class scatter and diagonalizes the whitened
//! between-class scatter with cyclic Jacobi rotations.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    back_substitute_transposed, cholesky, cholesky_solve, dot, jacobi_eigh, norm,
    orthonormalize, whiten_symmetric, Mat,
};
use crate::num::{real, real_of_usize, Real};
use crate::signal::FeatureVector;

/// How the between-class scatter weights each class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SbWeighting {
    /// Plain sum over class means, every class counting once.
    PaperUnweighted,
    /// Classes weighted by sample count; makes scatter add up to the total.
    CountWeighted,
}

impl SbWeighting {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "paper_unweighted" | "paper-unweighted" => Some(Self::PaperUnweighted),
            "count_weighted" | "count-weighted" => Some(Self::CountWeighted),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::PaperUnweighted => "paper_unweighted",
            Self::CountWeighted => "count_weighted",
        }
    }
}

/// Feature vectors with class labels. Class 0 is the positive class in the
/// binary case (target, for P300 data).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset<T> {
    pub feature_dim: usize,
    pub class_labels: Vec<String>,
    /// Per-vector class index into `class_labels`.
    pub labels: Vec<usize>,
    pub vectors: Vec<Vec<T>>,
}

impl<T: Real> LabeledDataset<T> {
    pub fn new(
        vectors: Vec<Vec<T>>,
        labels: Vec<usize>,
        class_labels: Vec<String>,
    ) -> Result<Self> {
        let feature_dim = vectors.first().map_or(0, Vec::len);
        let ds = Self {
            feature_dim,
            class_labels,
            labels,
            vectors,
        };
        ds.validate()?;
        Ok(ds)
    }

    /// Binary target/non-target dataset from feature vectors; targets become
    /// class 0.
    pub fn binary(targets: Vec<FeatureVector<T>>, non_targets: Vec<FeatureVector<T>>) -> Result<Self> {
        let mut vectors = Vec::with_capacity(targets.len() + non_targets.len());
        let mut labels = Vec::with_capacity(targets.len() + non_targets.len());
        for fv in targets {
            vectors.push(fv.values);
            labels.push(0);
        }
        for fv in non_targets {
            vectors.push(fv.values);
            labels.push(1);
        }
        Self::new(vectors, labels, vec!["target".into(), "non-target".into()])
    }

    pub fn n_samples(&self) -> usize {
        self.vectors.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_labels.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_classes() < 2 {
            return Err(Error::ConfigError {
                field: "class_labels".into(),
                detail: format!("need at least 2 classes, got {}", self.n_classes()),
            });
        }
        if self.labels.len() != self.vectors.len() {
            return Err(Error::ConfigError {
                field: "labels".into(),
                detail: format!(
                    "{} labels for {} vectors",
                    self.labels.len(),
                    self.vectors.len()
                ),
            });
        }
        for (i, v) in self.vectors.iter().enumerate() {
            if v.len() != self.feature_dim {
                return Err(Error::DimensionMismatch {
                    expected: self.feature_dim,
                    actual: v.len(),
                });
            }
            if self.labels[i] >= self.n_classes() {
                return Err(Error::ConfigError {
                    field: "labels".into(),
                    detail: format!("label {} out of range at index {i}", self.labels[i]),
                });
            }
        }
        let mut counts = vec![0usize; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        for (class, &count) in counts.iter().enumerate() {
            if count < 2 {
                return Err(Error::EmptyClass {
                    label: self.class_labels[class].clone(),
                    count,
                });
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("dataset serializes");
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let ds: Self = serde_json::from_str(&text).map_err(|e| Error::SchemaError {
            path: "dataset".into(),
            detail: e.to_string(),
        })?;
        ds.validate()?;
        Ok(ds)
    }
}

/// Within/between scatter with the means they were built from.
#[derive(Debug, Clone)]
pub struct ScatterPair<T> {
    pub s_w: Mat<T>,
    pub s_b: Mat<T>,
    pub grand_mean: Vec<T>,
    pub class_means: Vec<Vec<T>>,
    pub class_counts: Vec<usize>,
}

/// Per-class means, class counts, and the grand mean over all samples.
#[allow(clippy::type_complexity)]
pub fn class_means<T: Real>(
    dataset: &LabeledDataset<T>,
) -> Result<(Vec<Vec<T>>, Vec<usize>, Vec<T>)> {
    dataset.validate()?;
    let d = dataset.feature_dim;
    let c = dataset.n_classes();
    let mut means = vec![vec![T::zero(); d]; c];
    let mut counts = vec![0usize; c];
    let mut grand = vec![T::zero(); d];
    for (v, &label) in dataset.vectors.iter().zip(&dataset.labels) {
        counts[label] += 1;
        for (acc, &x) in means[label].iter_mut().zip(v) {
            *acc += x;
        }
        for (acc, &x) in grand.iter_mut().zip(v) {
            *acc += x;
        }
    }
    for (mean, &count) in means.iter_mut().zip(&counts) {
        if count == 0 {
            return Err(Error::EmptyClass {
                label: String::new(),
                count: 0,
            });
        }
        let n = real_of_usize::<T>(count);
        for m in mean.iter_mut() {
            *m /= n;
        }
    }
    let n_total = real_of_usize::<T>(dataset.n_samples());
    for g in grand.iter_mut() {
        *g /= n_total;
    }
    Ok((means, counts, grand))
}

/// Within-class scatter (sum of centered outer products per class) and
/// between-class scatter (sum of mean-offset outer products, optionally
/// count-weighted).
pub fn scatter_matrices<T: Real>(
    dataset: &LabeledDataset<T>,
    weighting: SbWeighting,
) -> Result<ScatterPair<T>> {
    let (class_means, class_counts, grand_mean) = class_means(dataset)?;
    let d = dataset.feature_dim;

    let mut s_w = Mat::zeros(d, d);
    let mut centered = vec![T::zero(); d];
    for (v, &label) in dataset.vectors.iter().zip(&dataset.labels) {
        for ((c, &x), &m) in centered.iter_mut().zip(v).zip(&class_means[label]) {
            *c = x - m;
        }
        s_w.add_outer(&centered, T::one());
    }

    let mut s_b = Mat::zeros(d, d);
    for (mean, &count) in class_means.iter().zip(&class_counts) {
        for ((c, &m), &g) in centered.iter_mut().zip(mean).zip(&grand_mean) {
            *c = m - g;
        }
        let scale = match weighting {
            SbWeighting::PaperUnweighted => T::one(),
            SbWeighting::CountWeighted => real_of_usize(count),
        };
        s_b.add_outer(&centered, scale);
    }

    Ok(ScatterPair {
        s_w,
        s_b,
        grand_mean,
        class_means,
        class_counts,
    })
}

/// Fitted discriminant: unit-norm projection vectors plus the binary
/// decision bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaModel<T> {
    /// Projection vectors (one for binary, `min(C-1, d)` for multiclass).
    pub projection: Vec<Vec<T>>,
    /// Midpoint bias for the binary sign rule; zero for multiclass models.
    pub bias: T,
    pub shrinkage_used: T,
    pub sb_weighting: SbWeighting,
    pub feature_dim: usize,
    pub class_labels: Vec<String>,
    /// Each class mean projected through `projection`.
    pub class_means_projected: Vec<Vec<T>>,
}

impl<T: Real> LdaModel<T> {
    pub fn is_binary(&self) -> bool {
        self.class_labels.len() == 2
    }

    /// Discriminant score `w . x + bias`; positive means class 0
    /// (target-like). Binary models only.
    pub fn score(&self, x: &[T]) -> Result<T> {
        if x.len() != self.feature_dim {
            return Err(Error::DimensionMismatch {
                expected: self.feature_dim,
                actual: x.len(),
            });
        }
        Ok(dot(&self.projection[0], x) + self.bias)
    }

    /// Class index: sign rule for binary models, nearest projected class
    /// mean for multiclass (ties to the lowest class index).
    pub fn classify(&self, x: &[T]) -> Result<usize> {
        if x.len() != self.feature_dim {
            return Err(Error::DimensionMismatch {
                expected: self.feature_dim,
                actual: x.len(),
            });
        }
        if self.is_binary() {
            return Ok(if self.score(x)? >= T::zero() { 0 } else { 1 });
        }
        let projected: Vec<T> = self.projection.iter().map(|w| dot(w, x)).collect();
        let mut best = 0usize;
        let mut best_dist = T::infinity();
        for (class, mean) in self.class_means_projected.iter().enumerate() {
            let dist: T = projected
                .iter()
                .zip(mean)
                .map(|(&p, &m)| (p - m) * (p - m))
                .sum();
            if dist < best_dist {
                best_dist = dist;
                best = class;
            }
        }
        Ok(best)
    }

    /// Fraction of dataset vectors assigned to their own class, in percent.
    pub fn training_accuracy(&self, dataset: &LabeledDataset<T>) -> Result<f64> {
        let mut correct = 0usize;
        for (v, &label) in dataset.vectors.iter().zip(&dataset.labels) {
            if self.classify(v)? == label {
                correct += 1;
            }
        }
        Ok(100.0 * correct as f64 / dataset.n_samples() as f64)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("model serializes");
        text.push('\n');
        text
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::SchemaError {
            path: "model".into(),
            detail: e.to_string(),
        })
    }
}

/// Fit the discriminant with shrinkage `lambda_rel` (relative to the mean
/// within-class variance `trace(S_w)/d`).
///
/// When the within-class scatter is exactly zero (duplicate vectors per
/// class, as noiseless synthetic data produces) the relative target
/// vanishes, so the ridge falls back to `lambda_rel * I` to keep the solve
/// defined. Decisions are unchanged under input rescaling either way.
pub fn fit<T: Real>(
    dataset: &LabeledDataset<T>,
    lambda_rel: T,
    weighting: SbWeighting,
) -> Result<LdaModel<T>> {
    if lambda_rel < T::zero() {
        return Err(Error::ConfigError {
            field: "lambda_rel".into(),
            detail: format!("shrinkage must be nonnegative, got {lambda_rel}"),
        });
    }
    let scatter = scatter_matrices(dataset, weighting)?;
    let d = dataset.feature_dim;
    let c = dataset.n_classes();

    if scatter.s_b.frobenius_norm() == T::zero() {
        return Err(Error::DegenerateClasses);
    }

    // Regularize: S~ = S_w + lambda * (trace/d) * I, unit scale when the
    // scatter is exactly zero.
    let trace = scatter.s_w.trace();
    let ridge = if trace > T::zero() {
        lambda_rel * trace / real_of_usize(d)
    } else {
        lambda_rel
    };
    let mut s_w_reg = scatter.s_w.clone();
    for i in 0..d {
        s_w_reg[(i, i)] += ridge;
    }
    let pivot_floor = real::<T>(1e-12) * s_w_reg.trace() / real_of_usize(d);
    let l = cholesky(&s_w_reg, pivot_floor)?;

    let (projection, bias) = if c == 2 {
        // w ~ S~^-1 (mu_0 - mu_1), unit norm, sign fixed so the positive
        // class scores positive; bias puts zero at the midpoint.
        let diff: Vec<T> = scatter.class_means[0]
            .iter()
            .zip(&scatter.class_means[1])
            .map(|(&a, &b)| a - b)
            .collect();
        let mut w = cholesky_solve(&l, &diff);
        let w_norm = norm(&w);
        if w_norm == T::zero() {
            return Err(Error::DegenerateClasses);
        }
        for v in w.iter_mut() {
            *v /= w_norm;
        }
        if dot(&w, &diff) < T::zero() {
            for v in w.iter_mut() {
                *v = -*v;
            }
        }
        let midpoint: Vec<T> = scatter.class_means[0]
            .iter()
            .zip(&scatter.class_means[1])
            .map(|(&a, &b)| (a + b) / real(2.0))
            .collect();
        let bias = -dot(&w, &midpoint);
        (vec![w], bias)
    } else {
        // Whiten by S~, diagonalize, keep the top min(C-1, d) directions,
        // map back, orthonormalize.
        let whitened = whiten_symmetric(&l, &scatter.s_b);
        let (_, vectors) = jacobi_eigh(&whitened);
        let keep = (c - 1).min(d);
        let mut back: Vec<Vec<T>> = (0..keep)
            .map(|e| {
                let u: Vec<T> = (0..d).map(|k| vectors[(k, e)]).collect();
                back_substitute_transposed(&l, &u)
            })
            .collect();
        orthonormalize(&mut back);
        (back, T::zero())
    };

    let class_means_projected: Vec<Vec<T>> = scatter
        .class_means
        .iter()
        .map(|mean| projection.iter().map(|w| dot(w, mean)).collect())
        .collect();

    Ok(LdaModel {
        projection,
        bias,
        shrinkage_used: lambda_rel,
        sb_weighting: weighting,
        feature_dim: d,
        class_labels: dataset.class_labels.clone(),
        class_means_projected,
    })
}

/// Rayleigh quotient `(v' S_b v) / (v' S_w_reg v)` used by the optimality
/// checks.
pub fn rayleigh_quotient<T: Real>(s_b: &Mat<T>, s_w_reg: &Mat<T>, v: &[T]) -> T {
    dot(&s_b.mat_vec(v), v) / dot(&s_w_reg.mat_vec(v), v)
}

/// The regularized within-class scatter exactly as `fit` builds it.
pub fn regularized_within<T: Real>(scatter: &ScatterPair<T>, lambda_rel: T) -> Mat<T> {
    let d = scatter.s_w.rows();
    let trace = scatter.s_w.trace();
    let ridge = if trace > T::zero() {
        lambda_rel * trace / real_of_usize(d)
    } else {
        lambda_rel
    };
    let mut reg = scatter.s_w.clone();
    for i in 0..d {
        reg[(i, i)] += ridge;
    }
    reg
}
