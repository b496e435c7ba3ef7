//! A small feedforward network that projects feature vectors onto the unit
//! sphere, trained to maximize cosine similarity with fixed class prototypes.
//!
//! The final normalization is part of the model, not post-processing, and
//! gradients flow through it. Prototypes are never updated by training.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::prototypes::PrototypeSet;
use crate::sphere::{self, UnitVector, ZERO_NORM_EPSILON};

/// Anything that maps raw feature vectors to points on the sphere.
///
/// The episodic evaluator is generic over this so baseline embedders (for
/// protocol sanity checks) plug in next to trained models.
pub trait Embedder {
    fn embedding_dim(&self) -> usize;
    fn embed(&self, input: &[f64]) -> Result<UnitVector>;
}

/// Shape of the penalty applied to 1 - cos(output, prototype).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LossForm {
    /// (1 - cos)^2, range [0, 4]. Punishes far-off examples harder.
    #[default]
    SquaredCosine,
    /// 1 - cos, range [0, 2].
    LinearCosine,
}

impl LossForm {
    pub fn as_str(&self) -> &'static str {
        match self {
            LossForm::SquaredCosine => "squared",
            LossForm::LinearCosine => "linear",
        }
    }

    fn value(&self, cos: f64) -> f64 {
        match self {
            LossForm::SquaredCosine => (1.0 - cos) * (1.0 - cos),
            LossForm::LinearCosine => 1.0 - cos,
        }
    }

    fn d_value_d_cos(&self, cos: f64) -> f64 {
        match self {
            LossForm::SquaredCosine => -2.0 * (1.0 - cos),
            LossForm::LinearCosine => -1.0,
        }
    }
}

/// Squared cosine penalty between an embedding and its class prototype.
pub fn cosine_loss(output: &UnitVector, prototype: &UnitVector) -> Result<f64> {
    let cos = sphere::cosine_similarity(output, prototype)?;
    Ok(LossForm::SquaredCosine.value(cos))
}

/// Fully connected layers with rectifier activations on the hidden layers,
/// a final affine layer, and normalization onto the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    layer_sizes: Vec<usize>,
    /// Per layer: one weight row per output unit.
    weights: Vec<Vec<Vec<f64>>>,
    /// Per layer: one bias per output unit.
    biases: Vec<Vec<f64>>,
}

impl EmbeddingModel {
    /// Seeded initialization: weights uniform in +-sqrt(6 / (fan_in +
    /// fan_out)) per layer, biases zero. The scaling keeps pre-normalization
    /// outputs comfortably away from the degenerate zero vector.
    pub fn new(layer_sizes: &[usize], seed: u64) -> Result<Self> {
        validate_layer_sizes(layer_sizes)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for l in 0..layer_sizes.len() - 1 {
            let (fan_in, fan_out) = (layer_sizes[l], layer_sizes[l + 1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let layer: Vec<Vec<f64>> = (0..fan_out)
                .map(|_| (0..fan_in).map(|_| rng.gen_range(-bound..bound)).collect())
                .collect();
            weights.push(layer);
            biases.push(vec![0.0; fan_out]);
        }
        Ok(Self {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
        })
    }

    /// Builds a model from explicit parameters, checking every shape.
    pub fn from_parts(
        layer_sizes: Vec<usize>,
        weights: Vec<Vec<Vec<f64>>>,
        biases: Vec<Vec<f64>>,
    ) -> Result<Self> {
        validate_layer_sizes(&layer_sizes)?;
        let layers = layer_sizes.len() - 1;
        if weights.len() != layers || biases.len() != layers {
            return Err(Error::InvalidInput(format!(
                "expected {layers} weight and bias blocks, got {} and {}",
                weights.len(),
                biases.len()
            )));
        }
        for l in 0..layers {
            let (fan_in, fan_out) = (layer_sizes[l], layer_sizes[l + 1]);
            if weights[l].len() != fan_out || biases[l].len() != fan_out {
                return Err(Error::InvalidInput(format!(
                    "layer {l}: expected {fan_out} rows/biases"
                )));
            }
            for row in &weights[l] {
                if row.len() != fan_in {
                    return Err(Error::InvalidInput(format!(
                        "layer {l}: expected rows of {fan_in} weights"
                    )));
                }
            }
        }
        Ok(Self {
            layer_sizes,
            weights,
            biases,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn weights(&self) -> &[Vec<Vec<f64>>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Vec<f64>] {
        &self.biases
    }

    /// Projects one input onto the sphere.
    pub fn forward(&self, input: &[f64]) -> Result<UnitVector> {
        let cache = self.forward_cached(input)?;
        Ok(cache.output)
    }

    fn forward_cached(&self, input: &[f64]) -> Result<ForwardCache> {
        if input.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                actual: input.len(),
            });
        }
        let layers = self.weights.len();
        let mut activations: Vec<Vec<f64>> = Vec::with_capacity(layers + 1);
        activations.push(input.to_vec());
        let mut pre_activations: Vec<Vec<f64>> = Vec::with_capacity(layers);
        for l in 0..layers {
            let prev = &activations[l];
            let mut z = self.biases[l].clone();
            for (o, row) in self.weights[l].iter().enumerate() {
                z[o] += sphere::dot(row, prev);
            }
            let is_output = l + 1 == layers;
            let next = if is_output {
                z.clone()
            } else {
                z.iter().map(|v| v.max(0.0)).collect()
            };
            pre_activations.push(z);
            activations.push(next);
        }
        let raw = activations.last().unwrap();
        let norm = sphere::euclidean_norm(raw);
        if norm <= ZERO_NORM_EPSILON {
            return Err(Error::ZeroNorm {
                context: "the pre-normalization network output".into(),
            });
        }
        let output = UnitVector::from_coords(raw.iter().map(|v| v / norm).collect())?;
        Ok(ForwardCache {
            activations,
            pre_activations,
            norm,
            output,
        })
    }
}

impl Embedder for EmbeddingModel {
    fn embedding_dim(&self) -> usize {
        self.output_dim()
    }

    fn embed(&self, input: &[f64]) -> Result<UnitVector> {
        self.forward(input)
    }
}

fn validate_layer_sizes(layer_sizes: &[usize]) -> Result<()> {
    if layer_sizes.len() < 2 {
        return Err(Error::InvalidInput(
            "a model needs at least an input and an output size".into(),
        ));
    }
    if layer_sizes.iter().any(|&s| s == 0) {
        return Err(Error::InvalidInput("layer sizes must be positive".into()));
    }
    let output = *layer_sizes.last().unwrap();
    if output < 2 {
        return Err(Error::InvalidDimension(output));
    }
    Ok(())
}

struct ForwardCache {
    activations: Vec<Vec<f64>>,
    pre_activations: Vec<Vec<f64>>,
    norm: f64,
    output: UnitVector,
}

/// Parameter-shaped gradient buffers.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelGradients {
    pub weights: Vec<Vec<Vec<f64>>>,
    pub biases: Vec<Vec<f64>>,
}

impl ModelGradients {
    fn zeros_like(model: &EmbeddingModel) -> Self {
        Self {
            weights: model
                .weights
                .iter()
                .map(|layer| layer.iter().map(|row| vec![0.0; row.len()]).collect())
                .collect(),
            biases: model.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    fn scale(&mut self, factor: f64) {
        for layer in &mut self.weights {
            for row in layer {
                for g in row {
                    *g *= factor;
                }
            }
        }
        for layer in &mut self.biases {
            for g in layer {
                *g *= factor;
            }
        }
    }
}

/// Mean loss over a batch and its exact gradient with respect to every
/// weight and bias, by backpropagation through the normalization layer.
pub fn batch_gradient(
    model: &EmbeddingModel,
    inputs: &[&[f64]],
    targets: &[&UnitVector],
    form: LossForm,
) -> Result<(f64, ModelGradients)> {
    if inputs.is_empty() || inputs.len() != targets.len() {
        return Err(Error::InvalidInput(format!(
            "batch of {} inputs vs {} targets",
            inputs.len(),
            targets.len()
        )));
    }
    let mut grads = ModelGradients::zeros_like(model);
    let mut loss_sum = 0.0;
    for (input, target) in inputs.iter().zip(targets) {
        if target.dim() != model.output_dim() {
            return Err(Error::DimensionMismatch {
                expected: model.output_dim(),
                actual: target.dim(),
            });
        }
        let cache = model.forward_cached(input)?;
        let y = cache.output.coords();
        let cos = sphere::dot(y, target.coords()).clamp(-1.0, 1.0);
        loss_sum += form.value(cos);

        // dL/dy, then through y = z/|z|: dL/dz = (dL/dy - (y.dL/dy) y) / |z|.
        let d_cos = form.d_value_d_cos(cos);
        let d_y: Vec<f64> = target.coords().iter().map(|p| d_cos * p).collect();
        let radial = sphere::dot(y, &d_y);
        let mut delta: Vec<f64> = y
            .iter()
            .zip(&d_y)
            .map(|(yi, gi)| (gi - radial * yi) / cache.norm)
            .collect();

        for l in (0..model.weights.len()).rev() {
            let prev = &cache.activations[l];
            for (o, d) in delta.iter().enumerate() {
                let row = &mut grads.weights[l][o];
                for (i, p) in prev.iter().enumerate() {
                    row[i] += d * p;
                }
                grads.biases[l][o] += d;
            }
            if l > 0 {
                let mut upstream = vec![0.0; model.layer_sizes[l]];
                for (o, d) in delta.iter().enumerate() {
                    for (i, w) in model.weights[l][o].iter().enumerate() {
                        upstream[i] += w * d;
                    }
                }
                // Rectifier derivative, with the subgradient 0 at the kink.
                for (i, u) in upstream.iter_mut().enumerate() {
                    if cache.pre_activations[l - 1][i] <= 0.0 {
                        *u = 0.0;
                    }
                }
                delta = upstream;
            }
        }
    }
    let inv = 1.0 / inputs.len() as f64;
    grads.scale(inv);
    Ok((loss_sum * inv, grads))
}

/// Training hyperparameters. Defaults: 100 epochs, batch 128, learning rate
/// 0.01, momentum 0.9, weight decay 1e-4, squared cosine loss, one order-of-
/// magnitude learning-rate drop at 70% of the epochs.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    pub seed: u64,
    pub loss: LossForm,
    /// Fraction of the epoch budget after which the learning rate drops;
    /// 1.0 or more disables the drop.
    pub lr_drop_fraction: f64,
    pub lr_drop_factor: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 100,
            batch_size: 128,
            learning_rate: 0.01,
            momentum: 0.9,
            weight_decay: 1e-4,
            seed: 0,
            loss: LossForm::SquaredCosine,
            lr_drop_fraction: 0.7,
            lr_drop_factor: 0.1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs < 1 {
            return Err(Error::InvalidInput("epochs must be at least 1".into()));
        }
        if self.batch_size < 1 {
            return Err(Error::InvalidInput("batch size must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidInput("learning rate must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidInput("momentum must be in [0, 1)".into()));
        }
        if self.weight_decay < 0.0 {
            return Err(Error::InvalidInput("weight decay must be >= 0".into()));
        }
        if !(self.lr_drop_fraction > 0.0) || !(self.lr_drop_factor > 0.0) {
            return Err(Error::InvalidInput(
                "learning-rate drop fraction and factor must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Feature vectors with class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    ids: Vec<String>,
    inputs: Vec<Vec<f64>>,
    labels: Vec<String>,
    class_order: Vec<String>,
}

impl LabeledDataset {
    pub fn new(ids: Vec<String>, inputs: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::EmptyTable);
        }
        if ids.len() != inputs.len() || labels.len() != inputs.len() {
            return Err(Error::InvalidInput(format!(
                "inconsistent dataset: {} ids, {} inputs, {} labels",
                ids.len(),
                inputs.len(),
                labels.len()
            )));
        }
        let dim = inputs[0].len();
        if dim == 0 {
            return Err(Error::InvalidInput("features must be non-empty".into()));
        }
        for row in &inputs {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: row.len(),
                });
            }
        }
        let mut class_order = Vec::new();
        for label in &labels {
            if !class_order.contains(label) {
                class_order.push(label.clone());
            }
        }
        Ok(Self {
            ids,
            inputs,
            labels,
            class_order,
        })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.inputs[0].len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn input(&self, row: usize) -> &[f64] {
        &self.inputs[row]
    }

    pub fn label(&self, row: usize) -> &str {
        &self.labels[row]
    }

    /// Distinct classes in first-appearance order.
    pub fn classes(&self) -> &[String] {
        &self.class_order
    }

    pub fn rows_of_class(&self, label: &str) -> Vec<usize> {
        (0..self.len())
            .filter(|&r| self.labels[r] == label)
            .collect()
    }
}

/// Minibatch SGD with momentum and weight decay against fixed prototypes.
/// Shuffling is deterministic per (seed, epoch). Returns the trained model
/// and the per-epoch mean loss history.
pub fn train(
    model: EmbeddingModel,
    data: &LabeledDataset,
    prototypes: &PrototypeSet,
    config: &TrainConfig,
) -> Result<(EmbeddingModel, Vec<f64>)> {
    config.validate()?;
    if data.input_dim() != model.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.input_dim(),
            actual: data.input_dim(),
        });
    }
    let mut target_of_class: HashMap<&str, usize> = HashMap::new();
    for class in data.classes() {
        match prototypes.position_of(class) {
            Some(pos) => {
                target_of_class.insert(class.as_str(), pos);
            }
            None => return Err(Error::MissingPrototype(class.clone())),
        }
    }
    if prototypes.dim() != model.output_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.output_dim(),
            actual: prototypes.dim(),
        });
    }
    let targets_by_row: Vec<&UnitVector> = data
        .labels()
        .iter()
        .map(|label| &prototypes.prototypes()[target_of_class[label.as_str()]])
        .collect();

    let mut model = model;
    let mut velocity = ModelGradients::zeros_like(&model);
    let mut history = Vec::with_capacity(config.epochs);
    let drop_epoch = (config.epochs as f64 * config.lr_drop_fraction).floor() as usize;

    let mut order: Vec<usize> = (0..data.len()).collect();
    for epoch in 0..config.epochs {
        let lr = if epoch >= drop_epoch && drop_epoch < config.epochs {
            config.learning_rate * config.lr_drop_factor
        } else {
            config.learning_rate
        };
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(epoch as u64 + 1);
        order.shuffle(&mut rng);

        let mut loss_sum = 0.0;
        for batch in order.chunks(config.batch_size) {
            let inputs: Vec<&[f64]> = batch.iter().map(|&r| data.input(r)).collect();
            let targets: Vec<&UnitVector> = batch.iter().map(|&r| targets_by_row[r]).collect();
            let (loss, grads) = batch_gradient(&model, &inputs, &targets, config.loss)?;
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch });
            }
            loss_sum += loss * batch.len() as f64;

            for l in 0..model.weights.len() {
                for o in 0..model.weights[l].len() {
                    for i in 0..model.weights[l][o].len() {
                        let g = grads.weights[l][o][i]
                            + config.weight_decay * model.weights[l][o][i];
                        velocity.weights[l][o][i] =
                            config.momentum * velocity.weights[l][o][i] + g;
                        model.weights[l][o][i] -= lr * velocity.weights[l][o][i];
                    }
                    let g = grads.biases[l][o] + config.weight_decay * model.biases[l][o];
                    velocity.biases[l][o] = config.momentum * velocity.biases[l][o] + g;
                    model.biases[l][o] -= lr * velocity.biases[l][o];
                }
            }
        }
        history.push(loss_sum / data.len() as f64);
    }
    Ok((model, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::normalize;

    fn identity_model(dim: usize) -> EmbeddingModel {
        let weights = vec![(0..dim)
            .map(|o| (0..dim).map(|i| if i == o { 1.0 } else { 0.0 }).collect())
            .collect()];
        let biases = vec![vec![0.0; dim]];
        EmbeddingModel::from_parts(vec![dim, dim], weights, biases).unwrap()
    }

    /// Equilateral triangle on the xy great circle of S^2.
    fn simplex_3_in_3d() -> PrototypeSet {
        let third = (2.0 * std::f64::consts::PI) / 3.0;
        let prototypes = (0..3)
            .map(|k| {
                let angle = third * k as f64;
                normalize(&[angle.cos(), angle.sin(), 0.0]).unwrap()
            })
            .collect();
        PrototypeSet::labeled(
            prototypes,
            vec!["c0".into(), "c1".into(), "c2".into()],
        )
        .unwrap()
    }

    #[test]
    fn forward_output_is_unit() {
        let model = EmbeddingModel::new(&[6, 10, 4], 3).unwrap();
        let input: Vec<f64> = (0..6).map(|i| (i as f64) * 0.37 - 1.0).collect();
        let out = model.forward(&input).unwrap();
        let norm = out.coords().iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn forward_is_deterministic() {
        let model = EmbeddingModel::new(&[5, 8, 3], 1).unwrap();
        let input = [0.3, -0.1, 2.0, 0.7, -1.4];
        assert_eq!(model.forward(&input).unwrap(), model.forward(&input).unwrap());
    }

    #[test]
    fn identity_model_normalizes_its_input() {
        let model = identity_model(2);
        let out = model.forward(&[2.0, 0.0]).unwrap();
        assert_eq!(out.coords(), &[1.0, 0.0]);
    }

    #[test]
    fn forward_rejects_wrong_input_dim() {
        let model = EmbeddingModel::new(&[4, 3], 0).unwrap();
        assert!(matches!(
            model.forward(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn zero_weights_produce_zero_norm_error() {
        let model = EmbeddingModel::from_parts(
            vec![2, 2],
            vec![vec![vec![0.0, 0.0], vec![0.0, 0.0]]],
            vec![vec![0.0, 0.0]],
        )
        .unwrap();
        assert!(matches!(
            model.forward(&[1.0, 1.0]),
            Err(Error::ZeroNorm { .. })
        ));
    }

    #[test]
    fn cosine_loss_extremes() {
        let e1 = normalize(&[1.0, 0.0]).unwrap();
        let e2 = normalize(&[0.0, 1.0]).unwrap();
        let neg = normalize(&[-1.0, 0.0]).unwrap();
        assert_eq!(cosine_loss(&e1, &e1).unwrap(), 0.0);
        assert_eq!(cosine_loss(&e1, &e2).unwrap(), 1.0);
        assert_eq!(cosine_loss(&e1, &neg).unwrap(), 4.0);
    }

    #[test]
    fn single_example_overfits() {
        let model = EmbeddingModel::new(&[4, 8, 3], 42).unwrap();
        let data = LabeledDataset::new(
            vec!["x".into()],
            vec![vec![0.5, -1.0, 0.25, 2.0]],
            vec!["c0".into()],
        )
        .unwrap();
        let config = TrainConfig {
            epochs: 200,
            batch_size: 1,
            learning_rate: 0.1,
            weight_decay: 0.0,
            lr_drop_fraction: 1.0,
            ..TrainConfig::default()
        };
        let (_, history) = train(model, &data, &simplex_3_in_3d(), &config).unwrap();
        let final_loss = *history.last().unwrap();
        assert!(final_loss < 1e-3, "final loss {final_loss}");
    }

    #[test]
    fn training_is_deterministic_and_leaves_prototypes_untouched() {
        let prototypes = simplex_3_in_3d();
        let before = prototypes.clone();
        let data = LabeledDataset::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec![
                vec![1.0, 0.0, 0.0, 0.5],
                vec![0.0, 1.0, 0.0, -0.5],
                vec![0.0, 0.0, 1.0, 0.25],
                vec![1.0, 1.0, 0.0, 0.0],
            ],
            vec!["c0".into(), "c1".into(), "c2".into(), "c0".into()],
        )
        .unwrap();
        let config = TrainConfig {
            epochs: 10,
            batch_size: 2,
            ..TrainConfig::default()
        };
        let run = || {
            let model = EmbeddingModel::new(&[4, 6, 3], 7).unwrap();
            train(model, &data, &prototypes, &config).unwrap()
        };
        let (model_a, history_a) = run();
        let (model_b, history_b) = run();
        assert_eq!(model_a, model_b);
        assert_eq!(history_a, history_b);
        assert_eq!(prototypes, before);
        for loss in &history_a {
            assert!((0.0..=4.0).contains(loss), "loss {loss} out of range");
        }
    }

    #[test]
    fn training_rejects_missing_prototype() {
        let model = EmbeddingModel::new(&[2, 3], 0).unwrap();
        let data = LabeledDataset::new(
            vec!["a".into()],
            vec![vec![1.0, 2.0]],
            vec!["unknown".into()],
        )
        .unwrap();
        let err = train(model, &data, &simplex_3_in_3d(), &TrainConfig::default());
        match err {
            Err(Error::MissingPrototype(class)) => assert_eq!(class, "unknown"),
            other => panic!("unexpected result {other:?}"),
        }
    }

    #[test]
    fn separable_clusters_reach_high_training_accuracy() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let dim_in = 10;
        let mut centers = Vec::new();
        for _ in 0..3 {
            let c: Vec<f64> = (0..dim_in)
                .map(|_| {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    2.0 * g
                })
                .collect();
            centers.push(c);
        }
        let mut ids = Vec::new();
        let mut inputs = Vec::new();
        let mut labels = Vec::new();
        for (c, center) in centers.iter().enumerate() {
            for s in 0..30 {
                let x: Vec<f64> = center
                    .iter()
                    .map(|&mu| {
                        let g: f64 = StandardNormal.sample(&mut rng);
                        mu + 0.1 * g
                    })
                    .collect();
                ids.push(format!("c{c}_s{s}"));
                inputs.push(x);
                labels.push(format!("c{c}"));
            }
        }
        let data = LabeledDataset::new(ids, inputs, labels).unwrap();
        let prototypes = simplex_3_in_3d();
        let model = EmbeddingModel::new(&[dim_in, 16, 3], 17).unwrap();
        let config = TrainConfig {
            epochs: 100,
            batch_size: 16,
            learning_rate: 0.05,
            ..TrainConfig::default()
        };
        let (trained, history) = train(model, &data, &prototypes, &config).unwrap();

        let mut correct = 0;
        for row in 0..data.len() {
            let embedding = trained.forward(data.input(row)).unwrap();
            let mut best = (0, f64::NEG_INFINITY);
            for (i, p) in prototypes.prototypes().iter().enumerate() {
                let cos = sphere::cosine_similarity(&embedding, p).unwrap();
                if cos > best.1 {
                    best = (i, cos);
                }
            }
            if prototypes.label(best.0) == Some(data.label(row)) {
                correct += 1;
            }
        }
        let accuracy = correct as f64 / data.len() as f64;
        assert!(accuracy >= 0.99, "training accuracy {accuracy}");
        assert!(history.last().unwrap() < &0.05);
    }
}
