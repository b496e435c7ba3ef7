//! Episodic N-way K-shot evaluation.
//!
//! Episodes draw N classes and K+Q examples per class from a held-out
//! dataset; the K supports build fresh episode prototypes (any training
//! prototypes are ignored), the Q queries are classified by highest cosine
//! similarity, and accuracies aggregate per seed and across episodes.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::embedding::{Embedder, LabeledDataset};
use crate::error::{Error, Result};
use crate::prototypes::PrototypeSet;
use crate::sphere::{self, UnitVector};

/// One N-way K-shot task: disjoint support and query examples.
#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub way: usize,
    pub shot: usize,
    pub query_count: usize,
    pub support: Vec<(Vec<f64>, String)>,
    pub query: Vec<(Vec<f64>, String)>,
}

impl Episode {
    /// Checks the episode invariants: exactly `way` distinct classes with
    /// `shot` supports and `query_count` queries each, and no example
    /// serving as both support and query.
    pub fn validate(&self) -> Result<()> {
        let mut classes: Vec<&str> = Vec::new();
        for (_, class) in &self.support {
            if !classes.contains(&class.as_str()) {
                classes.push(class);
            }
        }
        if classes.len() != self.way {
            return Err(Error::InvalidInput(format!(
                "episode has {} distinct classes, expected {}",
                classes.len(),
                self.way
            )));
        }
        for class in &classes {
            let supports = self
                .support
                .iter()
                .filter(|(_, c)| c == class)
                .count();
            let queries = self.query.iter().filter(|(_, c)| c == class).count();
            if supports != self.shot || queries != self.query_count {
                return Err(Error::InvalidInput(format!(
                    "class {class:?} has {supports} supports and {queries} queries"
                )));
            }
        }
        for (input, _) in &self.query {
            if self.support.iter().any(|(s, _)| s == input) {
                return Err(Error::InvalidInput(
                    "support and query sets overlap".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Protocol echo carried by every evaluation report.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalProtocol {
    pub way: usize,
    pub shot: usize,
    pub query_count: usize,
    pub episodes_per_seed: usize,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub protocol: EvalProtocol,
    /// Total episodes across all seeds.
    pub episodes: usize,
    pub per_seed_accuracies: Vec<f64>,
    /// Mean of the per-seed accuracies.
    pub mean_accuracy: f64,
    /// Standard error of the per-episode accuracies, pooled across seeds.
    pub std_error: f64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of episode `index` within a run seeded by `seed`.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed.wrapping_add(splitmix64(index)))
}

/// Samples one episode: `way` classes uniformly without replacement, then
/// `shot + query_count` examples per class without replacement, the first
/// `shot` of them as supports. Deterministic per seed.
pub fn sample_episode(
    data: &LabeledDataset,
    way: usize,
    shot: usize,
    query_count: usize,
    seed: u64,
) -> Result<Episode> {
    if way < 1 || shot < 1 || query_count < 1 {
        return Err(Error::InvalidInput(
            "way, shot, and query count must all be at least 1".into(),
        ));
    }
    let classes = data.classes();
    if classes.len() < way {
        return Err(Error::InsufficientClasses {
            needed: way,
            available: classes.len(),
        });
    }
    let per_class = shot + query_count;
    for class in classes {
        let available = data.rows_of_class(class).len();
        if available < per_class {
            return Err(Error::InsufficientExamples {
                class: class.clone(),
                needed: per_class,
                available,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen = index::sample(&mut rng, classes.len(), way);
    let mut support = Vec::with_capacity(way * shot);
    let mut query = Vec::with_capacity(way * query_count);
    for class_pos in chosen.iter() {
        let class = &classes[class_pos];
        let rows = data.rows_of_class(class);
        let picked = index::sample(&mut rng, rows.len(), per_class);
        for (k, row_pos) in picked.iter().enumerate() {
            let row = rows[row_pos];
            let example = (data.input(row).to_vec(), class.clone());
            if k < shot {
                support.push(example);
            } else {
                query.push(example);
            }
        }
    }
    Ok(Episode {
        way,
        shot,
        query_count,
        support,
        query,
    })
}

/// Builds one prototype per episode class: embed the supports, average the
/// unit vectors, and normalize the mean back onto the sphere. Classes keep
/// their sampled order.
pub fn episode_prototypes(embedder: &impl Embedder, episode: &Episode) -> Result<PrototypeSet> {
    let mut classes: Vec<String> = Vec::new();
    let mut sums: Vec<Vec<f64>> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for (input, class) in &episode.support {
        let embedding = embedder.embed(input)?;
        let pos = match classes.iter().position(|c| c == class) {
            Some(pos) => pos,
            None => {
                classes.push(class.clone());
                sums.push(vec![0.0; embedding.dim()]);
                counts.push(0);
                classes.len() - 1
            }
        };
        for (s, x) in sums[pos].iter_mut().zip(embedding.coords()) {
            *s += x;
        }
        counts[pos] += 1;
    }
    let mut prototypes = Vec::with_capacity(classes.len());
    for (pos, class) in classes.iter().enumerate() {
        let mean: Vec<f64> = sums[pos].iter().map(|s| s / counts[pos] as f64).collect();
        let prototype = sphere::normalize(&mean).map_err(|e| match e {
            Error::ZeroNorm { .. } => Error::ZeroNorm {
                context: format!("the mean support embedding of class {class:?}"),
            },
            other => other,
        })?;
        prototypes.push(prototype);
    }
    PrototypeSet::labeled(prototypes, classes)
}

/// Nearest-prototype classification: the class whose prototype has the
/// highest cosine similarity to the embedded query. Ties break toward the
/// lower prototype position.
pub fn classify(
    embedder: &impl Embedder,
    prototypes: &PrototypeSet,
    input: &[f64],
) -> Result<String> {
    let embedding = embedder.embed(input)?;
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in prototypes.prototypes().iter().enumerate() {
        let cos = sphere::cosine_similarity(&embedding, p)?;
        if best.map_or(true, |(_, s)| cos > s) {
            best = Some((i, cos));
        }
    }
    let (winner, _) = best.expect("prototype sets are never empty");
    match prototypes.label(winner) {
        Some(class) => Ok(class.to_string()),
        None => Err(Error::UnlabeledPrototype(winner)),
    }
}

/// Runs `episodes` episodes for every seed and aggregates accuracies.
/// Counts accumulate per episode as integers, so the aggregation does not
/// depend on evaluation order.
pub fn evaluate(
    embedder: &impl Embedder,
    data: &LabeledDataset,
    way: usize,
    shot: usize,
    query_count: usize,
    episodes: usize,
    seeds: &[u64],
) -> Result<EvalReport> {
    if episodes < 1 {
        return Err(Error::InvalidInput("need at least 1 episode".into()));
    }
    if seeds.is_empty() {
        return Err(Error::InvalidInput("need at least 1 seed".into()));
    }
    let mut per_seed_accuracies = Vec::with_capacity(seeds.len());
    let mut episode_accuracies = Vec::with_capacity(seeds.len() * episodes);
    for &seed in seeds {
        let mut seed_correct = 0usize;
        let mut seed_total = 0usize;
        for e in 0..episodes {
            let episode = sample_episode(data, way, shot, query_count, mix_seed(seed, e as u64))?;
            let prototypes = episode_prototypes(embedder, &episode)?;
            let mut correct = 0usize;
            for (input, class) in &episode.query {
                if classify(embedder, &prototypes, input)? == *class {
                    correct += 1;
                }
            }
            episode_accuracies.push(correct as f64 / episode.query.len() as f64);
            seed_correct += correct;
            seed_total += episode.query.len();
        }
        per_seed_accuracies.push(seed_correct as f64 / seed_total as f64);
    }
    let mean_accuracy =
        per_seed_accuracies.iter().sum::<f64>() / per_seed_accuracies.len() as f64;
    let std_error = standard_error(&episode_accuracies);
    Ok(EvalReport {
        protocol: EvalProtocol {
            way,
            shot,
            query_count,
            episodes_per_seed: episodes,
            seeds: seeds.to_vec(),
        },
        episodes: episodes * seeds.len(),
        per_seed_accuracies,
        mean_accuracy,
        std_error,
    })
}

fn standard_error(samples: &[f64]) -> f64 {
    let n = samples.len();
    if n < 2 {
        return 0.0;
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let variance = samples
        .iter()
        .map(|x| (x - mean) * (x - mean))
        .sum::<f64>()
        / (n - 1) as f64;
    (variance / n as f64).sqrt()
}

/// Chance-level baseline: every input gets a seed-fixed random unit vector
/// derived from a hash of its bits, uncorrelated with any class structure.
/// Useful for protocol sanity checks (5-way accuracy should sit at 0.2).
#[derive(Debug, Clone)]
pub struct RandomEmbedder {
    dim: usize,
    seed: u64,
}

impl RandomEmbedder {
    pub fn new(dim: usize, seed: u64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self { dim, seed })
    }
}

impl Embedder for RandomEmbedder {
    fn embedding_dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, input: &[f64]) -> Result<UnitVector> {
        let mut h = splitmix64(self.seed);
        for x in input {
            h = splitmix64(h ^ x.to_bits());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(h);
        let raw: Vec<f64> = (0..self.dim)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        sphere::normalize(&raw)
    }
}
