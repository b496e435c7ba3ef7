//! Closed-form oracles for the prototype optimizer.
//!
//! For M <= a+1 the optimal layout is the regular simplex with every
//! pairwise cosine at -1/(M-1). For M points on the circle the optimum is
//! equal spacing; the oracle builds that layout explicitly.

use protosphere::prototypes::{optimize_prototypes, OptimizerConfig};
use protosphere::sphere::{self, normalize};

fn converged_max_cosine(count: usize, dim: usize) -> f64 {
    let set = optimize_prototypes(count, dim, &OptimizerConfig::default()).unwrap();
    set.max_pairwise_cosine().unwrap()
}

#[test]
fn simplex_bound_is_reached_for_small_cases() {
    for (count, dim) in [(2usize, 3usize), (3, 3), (4, 3), (5, 8)] {
        let expected = -1.0 / (count as f64 - 1.0);
        let reached = converged_max_cosine(count, dim);
        assert!(
            (reached - expected).abs() < 5e-3,
            "M={count} a={dim}: reached {reached}, simplex bound {expected}"
        );
    }
}

#[test]
fn converged_simplex_has_equal_pairwise_cosines() {
    // Independent check that the M=4, a=3 solution is the regular simplex:
    // all six pairwise cosines agree, not just the maximum.
    let set = optimize_prototypes(4, 3, &OptimizerConfig::default()).unwrap();
    let ps = set.prototypes();
    let mut cosines = Vec::new();
    for i in 0..ps.len() {
        for j in (i + 1)..ps.len() {
            cosines.push(sphere::cosine_similarity(&ps[i], &ps[j]).unwrap());
        }
    }
    let lo = cosines.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = cosines.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(hi - lo < 1e-2, "pairwise cosines spread from {lo} to {hi}");
    assert!((hi - (-1.0 / 3.0)).abs() < 5e-3);
}

#[test]
fn ten_points_on_the_circle_space_out_evenly() {
    // Oracle: the explicitly constructed equally spaced layout.
    let count = 10;
    let step = 2.0 * std::f64::consts::PI / count as f64;
    let layout: Vec<_> = (0..count)
        .map(|k| {
            let angle = step * k as f64;
            normalize(&[angle.cos(), angle.sin()]).unwrap()
        })
        .collect();
    let oracle = sphere::max_pairwise_cosine(&layout).unwrap();
    assert!((oracle - (36f64).to_radians().cos()).abs() < 1e-12);

    let reached = converged_max_cosine(count, 2);
    assert!(
        (reached - oracle).abs() < 5e-3,
        "reached {reached}, equal spacing gives {oracle}"
    );
}
