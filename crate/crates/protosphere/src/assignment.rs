//! Binding class labels to prototype positions.
//!
//! Either the prior vectors become the prototypes outright, or an existing
//! (maximally spread, unlabeled) set is labeled by greedy matching: the
//! highest-similarity (class, prototype) pair still available is assigned
//! first, and an assigned class or prototype leaves the pool. The recorded
//! similarity trace is therefore non-increasing.

use crate::attributes::PriorVectors;
use crate::error::{Error, Result};
use crate::prototypes::PrototypeSet;
use crate::sphere;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignmentMode {
    Direct,
    Matched,
}

impl AssignmentMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            AssignmentMode::Direct => "direct",
            AssignmentMode::Matched => "matched",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentPair {
    pub class: String,
    pub prototype_index: usize,
    pub similarity: f64,
}

/// The class-to-prototype bijection, in assignment order.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub pairs: Vec<AssignmentPair>,
    pub mode: AssignmentMode,
}

impl Assignment {
    pub fn mean_similarity(&self) -> f64 {
        self.pairs.iter().map(|p| p.similarity).sum::<f64>() / self.pairs.len() as f64
    }

    pub fn min_similarity(&self) -> f64 {
        self.pairs
            .iter()
            .map(|p| p.similarity)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Uses the prior vectors directly as labeled prototypes.
pub fn direct_prototypes(priors: &PriorVectors) -> Result<PrototypeSet> {
    PrototypeSet::labeled(priors.vectors().to_vec(), priors.classes().to_vec())
}

/// Greedy one-to-one labeling of `set` by nearest prior.
///
/// All M x M cosine similarities between priors (rows) and prototypes
/// (columns) are computed, then the best still-unassigned pair is taken M
/// times. Ties break toward the lower class position, then the lower
/// prototype index. Prototype positions are returned bit-identical; only
/// labels change.
pub fn match_prototypes(
    set: &PrototypeSet,
    priors: &PriorVectors,
) -> Result<(PrototypeSet, Assignment)> {
    if set.len() != priors.len() {
        return Err(Error::SizeMismatch {
            prototypes: set.len(),
            priors: priors.len(),
        });
    }
    if set.dim() != priors.dim() {
        return Err(Error::DimensionMismatch {
            expected: priors.dim(),
            actual: set.dim(),
        });
    }
    let m = set.len();
    let mut similarity = vec![vec![0.0f64; m]; m];
    for (c, prior) in priors.vectors().iter().enumerate() {
        for (p, prototype) in set.prototypes().iter().enumerate() {
            similarity[c][p] = sphere::cosine_similarity(prior, prototype)?;
        }
    }

    let picks = greedy_assign(&similarity);
    let mut pairs = Vec::with_capacity(m);
    let mut labels_by_prototype: Vec<Option<String>> = vec![None; m];
    for (class_pos, prototype_index) in picks {
        let class = priors.classes()[class_pos].clone();
        pairs.push(AssignmentPair {
            class: class.clone(),
            prototype_index,
            similarity: similarity[class_pos][prototype_index],
        });
        labels_by_prototype[prototype_index] = Some(class);
    }

    let labeled = PrototypeSet::from_parts(set.prototypes().to_vec(), labels_by_prototype)?;
    let assignment = Assignment {
        pairs,
        mode: AssignmentMode::Matched,
    };
    Ok((labeled, assignment))
}

/// Greedy selection over a class-by-prototype similarity matrix, returning
/// (class position, prototype index) in pick order.
fn greedy_assign(similarity: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let m = similarity.len();
    let mut class_taken = vec![false; m];
    let mut prototype_taken = vec![false; m];
    let mut picks = Vec::with_capacity(m);
    for _ in 0..m {
        let mut best: Option<(usize, usize, f64)> = None;
        for c in 0..m {
            if class_taken[c] {
                continue;
            }
            for p in 0..m {
                if prototype_taken[p] {
                    continue;
                }
                if best.map_or(true, |(_, _, s)| similarity[c][p] > s) {
                    best = Some((c, p, similarity[c][p]));
                }
            }
        }
        let (c, p, _) = best.expect("pool is never empty before m picks");
        class_taken[c] = true;
        prototype_taken[p] = true;
        picks.push((c, p));
    }
    picks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attributes::PriorVectors;
    use crate::sphere::normalize;

    fn priors_2d(coords: &[[f64; 2]], names: &[&str]) -> PriorVectors {
        let vectors = coords.iter().map(|c| normalize(c).unwrap()).collect();
        let classes = names.iter().map(|s| s.to_string()).collect();
        PriorVectors::new(classes, vectors, vec![1; coords.len()]).unwrap()
    }

    #[test]
    fn direct_prototypes_copy_priors() {
        let priors = priors_2d(&[[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]], &["a", "b", "c"]);
        let set = direct_prototypes(&priors).unwrap();
        assert_eq!(set.len(), 3);
        assert_eq!(set.prototypes(), priors.vectors());
        assert_eq!(set.label(1), Some("b"));
    }

    #[test]
    fn direct_single_class() {
        let priors = priors_2d(&[[0.0, 1.0]], &["only"]);
        let set = direct_prototypes(&priors).unwrap();
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn duplicate_prior_classes_are_rejected_at_construction() {
        let vectors = vec![
            normalize(&[1.0, 0.0]).unwrap(),
            normalize(&[0.0, 1.0]).unwrap(),
        ];
        let err = PriorVectors::new(
            vec!["same".into(), "same".into()],
            vectors,
            vec![1, 1],
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateClass(_)));
    }

    #[test]
    fn identical_priors_and_prototypes_match_identically() {
        let priors = priors_2d(&[[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]], &["a", "b", "c"]);
        let set = PrototypeSet::unlabeled(priors.vectors().to_vec()).unwrap();
        let (labeled, assignment) = match_prototypes(&set, &priors).unwrap();
        for (i, class) in priors.classes().iter().enumerate() {
            assert_eq!(labeled.label(i), Some(class.as_str()));
        }
        for pair in &assignment.pairs {
            assert!((pair.similarity - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_pair_matches() {
        let priors = priors_2d(&[[0.6, 0.8]], &["only"]);
        let set = PrototypeSet::unlabeled(vec![normalize(&[0.0, 1.0]).unwrap()]).unwrap();
        let (labeled, assignment) = match_prototypes(&set, &priors).unwrap();
        assert_eq!(labeled.label(0), Some("only"));
        assert_eq!(assignment.pairs.len(), 1);
    }

    // Hand-simulated greedy trace over a fixed similarity matrix: 0.9 wins
    // first and removes class 1 and prototype 1 from the pool, 0.7 is the
    // best left, then 0.5. A globally optimal matching could differ; the
    // greedy order is the contract.
    #[test]
    fn greedy_follows_the_hand_trace() {
        let similarity = vec![
            vec![0.9, 0.1, 0.0],
            vec![0.8, 0.7, 0.1],
            vec![0.2, 0.6, 0.5],
        ];
        let picks = greedy_assign(&similarity);
        assert_eq!(picks, vec![(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let priors = priors_2d(&[[1.0, 0.0], [0.0, 1.0]], &["a", "b"]);
        let set = PrototypeSet::unlabeled(vec![normalize(&[1.0, 1.0]).unwrap()]).unwrap();
        assert!(matches!(
            match_prototypes(&set, &priors),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let priors = priors_2d(&[[1.0, 0.0]], &["a"]);
        let set =
            PrototypeSet::unlabeled(vec![normalize(&[1.0, 0.0, 0.0]).unwrap()]).unwrap();
        assert!(matches!(
            match_prototypes(&set, &priors),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn matching_preserves_vector_positions_exactly() {
        let priors = priors_2d(
            &[[0.3, 0.7], [-0.2, 0.5], [0.9, -0.1], [-0.6, -0.6]],
            &["a", "b", "c", "d"],
        );
        let set = crate::prototypes::init_prototypes(4, 2, 11).unwrap();
        let (labeled, _) = match_prototypes(&set, &priors).unwrap();
        assert_eq!(labeled.prototypes(), set.prototypes());
    }

    #[test]
    fn similarity_trace_is_non_increasing() {
        let priors = priors_2d(
            &[[0.3, 0.7], [-0.2, 0.5], [0.9, -0.1], [-0.6, -0.6], [0.1, -0.9]],
            &["a", "b", "c", "d", "e"],
        );
        let set = crate::prototypes::init_prototypes(5, 2, 3).unwrap();
        let (_, assignment) = match_prototypes(&set, &priors).unwrap();
        for w in assignment.pairs.windows(2) {
            assert!(w[0].similarity >= w[1].similarity);
        }
    }
}
