//! Vector math on the unit hypersphere.
//!
//! Everything else in the crate builds on the two primitives here:
//! normalization onto the sphere and cosine similarity between unit vectors.

use crate::error::{Error, Result};

/// Norm at or below which a vector counts as degenerate and cannot be
/// normalized. Fixed on purpose: a degenerate mean is a data problem,
/// not a tuning knob.
pub const ZERO_NORM_EPSILON: f64 = 1e-12;

/// Tolerance on the unit-norm invariant.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-9;

/// A point on S^(a-1): at least 2 coordinates, Euclidean norm 1 within 1e-9.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector {
    coords: Vec<f64>,
}

impl UnitVector {
    /// Wraps coordinates that already satisfy the unit-norm invariant.
    pub fn from_coords(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidDimension(coords.len()));
        }
        let norm = euclidean_norm(&coords);
        if (norm - 1.0).abs() > UNIT_NORM_TOLERANCE {
            return Err(Error::InvalidInput(format!(
                "coordinates have norm {norm:.12}, expected 1 within {UNIT_NORM_TOLERANCE}"
            )));
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

pub(crate) fn euclidean_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Scales `v` to unit norm.
///
/// Vectors that are already unit within 1e-12 are returned unchanged, which
/// makes normalization exactly idempotent: the second application is the
/// identity, bit for bit.
pub fn normalize(v: &[f64]) -> Result<UnitVector> {
    if v.len() < 2 {
        return Err(Error::InvalidDimension(v.len()));
    }
    let norm = euclidean_norm(v);
    if norm <= ZERO_NORM_EPSILON {
        return Err(Error::ZeroNorm {
            context: format!("a {}-dimensional vector with norm {norm:e}", v.len()),
        });
    }
    let coords = if (norm - 1.0).abs() <= ZERO_NORM_EPSILON {
        v.to_vec()
    } else {
        v.iter().map(|x| x / norm).collect()
    };
    Ok(UnitVector { coords })
}

/// Cosine similarity of two unit vectors: their dot product, clamped to
/// [-1, 1] so rounding can never leak values like 1.0000000000000002 into
/// downstream acos or loss code.
pub fn cosine_similarity(u: &UnitVector, v: &UnitVector) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            actual: v.dim(),
        });
    }
    Ok(dot(u.coords(), v.coords()).clamp(-1.0, 1.0))
}

/// Largest cosine similarity over all unordered distinct pairs.
///
/// Deliberately the plain O(M^2) double loop with a fixed reduction order;
/// the property suite pins any future optimization to this exact scan.
pub fn max_pairwise_cosine(vectors: &[UnitVector]) -> Result<f64> {
    if vectors.len() < 2 {
        return Err(Error::TooFewPrototypes(vectors.len()));
    }
    let mut max = -1.0f64;
    for i in 0..vectors.len() {
        for j in (i + 1)..vectors.len() {
            let c = cosine_similarity(&vectors[i], &vectors[j])?;
            if c > max {
                max = c;
            }
        }
    }
    Ok(max)
}
