//! 2D projection of labeled vector sets for external plotting.
//!
//! Plain PCA: center the vectors, then extract the top two principal
//! directions of the scatter matrix by power iteration with a seeded start
//! and a fixed iteration count, deflating after the first direction.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::prototypes::PrototypeSet;
use crate::sphere;

/// Fixed power-iteration budget; enough for desk-scale scatter matrices.
pub const POWER_ITERATIONS: usize = 200;

/// Projects every vector of the set onto its top two principal directions.
/// Needs at least 3 vectors for a meaningful plane.
pub fn project_to_plane(set: &PrototypeSet, seed: u64) -> Result<Vec<[f64; 2]>> {
    if set.len() < 3 {
        return Err(Error::TooFewVectors {
            needed: 3,
            got: set.len(),
        });
    }
    let dim = set.dim();
    let n = set.len();

    let mut mean = vec![0.0f64; dim];
    for p in set.prototypes() {
        for (m, x) in mean.iter_mut().zip(p.coords()) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let centered: Vec<Vec<f64>> = set
        .prototypes()
        .iter()
        .map(|p| p.coords().iter().zip(&mean).map(|(x, m)| x - m).collect())
        .collect();

    // Scatter matrix S = X^T X over the centered rows.
    let mut scatter = vec![vec![0.0f64; dim]; dim];
    for row in &centered {
        for i in 0..dim {
            for j in 0..dim {
                scatter[i][j] += row[i] * row[j];
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = power_iterate(&scatter, None, &mut rng);
    let second = power_iterate(&scatter, Some(&first), &mut rng);

    Ok(centered
        .iter()
        .map(|row| [sphere::dot(row, &first), sphere::dot(row, &second)])
        .collect())
}

/// Runs the fixed power-iteration budget from a random start, keeping the
/// iterate orthogonal to `against` when deflating for the second direction.
/// A vanishing iterate (rank-deficient scatter) keeps its last value, which
/// projects everything to the same point, as it should.
fn power_iterate(
    matrix: &[Vec<f64>],
    against: Option<&[f64]>,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let dim = matrix.len();
    let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
    orthonormalize(&mut v, against);
    for _ in 0..POWER_ITERATIONS {
        let mut next = vec![0.0f64; dim];
        for (i, row) in matrix.iter().enumerate() {
            next[i] = sphere::dot(row, &v);
        }
        if let Some(base) = against {
            let overlap = sphere::dot(&next, base);
            for (x, b) in next.iter_mut().zip(base) {
                *x -= overlap * b;
            }
        }
        let norm = sphere::euclidean_norm(&next);
        if norm <= 1e-300 {
            break;
        }
        for x in &mut next {
            *x /= norm;
        }
        v = next;
    }
    v
}

fn orthonormalize(v: &mut [f64], against: Option<&[f64]>) {
    if let Some(base) = against {
        let overlap = sphere::dot(v, base);
        for (x, b) in v.iter_mut().zip(base) {
            *x -= overlap * b;
        }
    }
    let norm = sphere::euclidean_norm(v);
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}
