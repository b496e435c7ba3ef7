//! Maximally separated prototype sets on the unit sphere.
//!
//! The optimizer minimizes the mean over prototypes of their largest cosine
//! similarity to any other prototype, by plain gradient descent with momentum
//! followed by renormalization onto the sphere after every step. The iterate
//! with the lowest max pairwise cosine seen is the one returned.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::sphere::{self, UnitVector, ZERO_NORM_EPSILON};

/// M labeled points on the sphere, one per class. Labels may be absent
/// before assignment; assigned labels are unique.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeSet {
    prototypes: Vec<UnitVector>,
    labels: Vec<Option<String>>,
}

impl PrototypeSet {
    pub fn unlabeled(prototypes: Vec<UnitVector>) -> Result<Self> {
        let labels = vec![None; prototypes.len()];
        Self::from_parts(prototypes, labels)
    }

    pub fn labeled(prototypes: Vec<UnitVector>, labels: Vec<String>) -> Result<Self> {
        let labels = labels.into_iter().map(Some).collect();
        Self::from_parts(prototypes, labels)
    }

    pub fn from_parts(prototypes: Vec<UnitVector>, labels: Vec<Option<String>>) -> Result<Self> {
        if prototypes.is_empty() {
            return Err(Error::InvalidCount(0));
        }
        if labels.len() != prototypes.len() {
            return Err(Error::SizeMismatch {
                prototypes: prototypes.len(),
                priors: labels.len(),
            });
        }
        let dim = prototypes[0].dim();
        for p in &prototypes {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: p.dim(),
                });
            }
        }
        for (i, label) in labels.iter().enumerate() {
            if let Some(l) = label {
                if labels[..i].iter().any(|prev| prev.as_deref() == Some(l)) {
                    return Err(Error::DuplicateClass(l.clone()));
                }
            }
        }
        Ok(Self { prototypes, labels })
    }

    pub fn len(&self) -> usize {
        self.prototypes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prototypes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.prototypes[0].dim()
    }

    pub fn prototypes(&self) -> &[UnitVector] {
        &self.prototypes
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels[index].as_deref()
    }

    pub fn is_fully_labeled(&self) -> bool {
        self.labels.iter().all(|l| l.is_some())
    }

    /// Position of the prototype carrying `label`, if any.
    pub fn position_of(&self, label: &str) -> Option<usize> {
        self.labels
            .iter()
            .position(|l| l.as_deref() == Some(label))
    }

    /// Replaces all labels at once. Count and uniqueness are enforced.
    pub fn set_labels(&mut self, labels: Vec<String>) -> Result<()> {
        if labels.len() != self.prototypes.len() {
            return Err(Error::SizeMismatch {
                prototypes: self.prototypes.len(),
                priors: labels.len(),
            });
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateClass(l.clone()));
            }
        }
        self.labels = labels.into_iter().map(Some).collect();
        Ok(())
    }

    pub fn max_pairwise_cosine(&self) -> Result<f64> {
        sphere::max_pairwise_cosine(&self.prototypes)
    }
}

/// Hyperparameters for [`optimize_prototypes`]. The defaults reach the
/// regular-simplex and circle optima to within 5e-3.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub iterations: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            iterations: 1000,
            learning_rate: 0.1,
            momentum: 0.9,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations < 1 {
            return Err(Error::InvalidInput("iterations must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidInput("learning rate must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidInput("momentum must be in [0, 1)".into()));
        }
        Ok(())
    }
}

/// Draws `count` prototypes i.i.d. from a standard Gaussian per coordinate,
/// each normalized onto the sphere. Deterministic per seed.
pub fn init_prototypes(count: usize, dim: usize, seed: u64) -> Result<PrototypeSet> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    if count < 1 {
        return Err(Error::InvalidCount(count));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prototypes = Vec::with_capacity(count);
    for _ in 0..count {
        let raw: Vec<f64> = (0..dim)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        prototypes.push(sphere::normalize(&raw)?);
    }
    PrototypeSet::unlabeled(prototypes)
}

/// Mean over rows of the largest cosine similarity to any other row, with
/// its exact gradient, both evaluated on raw (not necessarily unit)
/// coordinates so the gradient can be checked by finite differences.
///
/// Row i contributes cos(x_i, x_j*) with j* the argmax over j != i (ties
/// break to the lowest j); the gradient of that term lands on both row i
/// and row j*.
pub fn separation_loss_raw(rows: &[Vec<f64>]) -> Result<(f64, Vec<Vec<f64>>)> {
    let m = rows.len();
    if m < 2 {
        return Err(Error::TooFewPrototypes(m));
    }
    let dim = rows[0].len();
    for row in rows {
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: row.len(),
            });
        }
    }
    let norms: Vec<f64> = rows.iter().map(|r| sphere::euclidean_norm(r)).collect();
    for (i, n) in norms.iter().enumerate() {
        if *n <= ZERO_NORM_EPSILON {
            return Err(Error::ZeroNorm {
                context: format!("prototype row {i}"),
            });
        }
    }

    let inv_m = 1.0 / m as f64;
    let mut loss = 0.0;
    let mut gradient = vec![vec![0.0; dim]; m];
    for i in 0..m {
        let mut best_j = usize::MAX;
        let mut best_cos = f64::NEG_INFINITY;
        for j in 0..m {
            if j == i {
                continue;
            }
            let c = sphere::dot(&rows[i], &rows[j]) / (norms[i] * norms[j]);
            if c > best_cos {
                best_cos = c;
                best_j = j;
            }
        }
        loss += best_cos * inv_m;

        // d cos(u, v) / du = v / (|u||v|) - (u.v) u / (|u|^3 |v|), and
        // symmetrically for v; at unit norm this is the tangential residual.
        let j = best_j;
        let (nu, nv) = (norms[i], norms[j]);
        let s = sphere::dot(&rows[i], &rows[j]);
        for k in 0..dim {
            gradient[i][k] +=
                inv_m * (rows[j][k] / (nu * nv) - s * rows[i][k] / (nu * nu * nu * nv));
            gradient[j][k] +=
                inv_m * (rows[i][k] / (nu * nv) - s * rows[j][k] / (nu * nv * nv * nv));
        }
    }
    Ok((loss, gradient))
}

/// [`separation_loss_raw`] on a prototype set.
pub fn separation_loss(set: &PrototypeSet) -> Result<(f64, Vec<Vec<f64>>)> {
    let rows: Vec<Vec<f64>> = set.prototypes().iter().map(|p| p.coords().to_vec()).collect();
    separation_loss_raw(&rows)
}

fn max_pairwise_cosine_rows(rows: &[Vec<f64>]) -> f64 {
    let mut max = -1.0f64;
    for i in 0..rows.len() {
        for j in (i + 1)..rows.len() {
            let c = sphere::dot(&rows[i], &rows[j]).clamp(-1.0, 1.0);
            if c > max {
                max = c;
            }
        }
    }
    max
}

/// Spreads `count` prototypes in `dim` dimensions by projected gradient
/// descent: gradient step with momentum, then renormalization of every row.
/// The step size anneals linearly from `learning_rate` to zero across the
/// run; the objective is nonsmooth at the optimum, so a fixed step chatters
/// instead of settling. Returns the best iterate by max pairwise cosine
/// (the initial set counts), so the result is never worse than the
/// initialization. Deterministic given the config.
pub fn optimize_prototypes(
    count: usize,
    dim: usize,
    config: &OptimizerConfig,
) -> Result<PrototypeSet> {
    config.validate()?;
    if count < 2 {
        return Err(Error::TooFewPrototypes(count));
    }
    let init = init_prototypes(count, dim, config.seed)?;
    let mut rows: Vec<Vec<f64>> = init
        .prototypes()
        .iter()
        .map(|p| p.coords().to_vec())
        .collect();

    let mut best_rows = rows.clone();
    let mut best_max_cos = max_pairwise_cosine_rows(&rows);
    let mut velocity = vec![vec![0.0; dim]; count];

    for step in 0..config.iterations {
        let annealed = config.learning_rate
            * (1.0 - step as f64 / config.iterations as f64);
        let (_, gradient) = separation_loss_raw(&rows)?;
        for i in 0..count {
            for k in 0..dim {
                velocity[i][k] = config.momentum * velocity[i][k] + gradient[i][k];
                rows[i][k] -= annealed * velocity[i][k];
            }
            let norm = sphere::euclidean_norm(&rows[i]);
            if norm <= ZERO_NORM_EPSILON {
                return Err(Error::ZeroNorm {
                    context: format!("prototype row {i} after a gradient step"),
                });
            }
            for k in 0..dim {
                rows[i][k] /= norm;
            }
        }
        let current = max_pairwise_cosine_rows(&rows);
        if current < best_max_cos {
            best_max_cos = current;
            best_rows = rows.clone();
        }
    }

    let prototypes = best_rows
        .iter()
        .map(|r| sphere::normalize(r))
        .collect::<Result<Vec<_>>>()?;
    PrototypeSet::unlabeled(prototypes)
}
