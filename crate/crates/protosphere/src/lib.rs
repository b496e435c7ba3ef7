//! Hyperspherical class-prototype spaces for few-shot classification.
//!
//! The crate covers the full desk-scale pipeline:
//!
//! - [`sphere`] — exact unit-vector math (normalization, cosine similarity).
//! - [`prototypes`] — maximally separated prototype sets via projected
//!   gradient descent on the sphere.
//! - [`attributes`] — ternary attribute tables, decision-tree feature
//!   selection by information gain, and normalized per-class prior vectors.
//! - [`assignment`] — binding class labels to prototype positions, either
//!   directly from priors or by greedy nearest-prior matching.
//! - [`embedding`] — a small feedforward network mapping feature vectors
//!   onto the sphere, trained with a cosine loss against fixed prototypes.
//! - [`fewshot`] — episodic N-way K-shot sampling, episode prototypes, and
//!   accuracy reports.
//! - [`projection`] — 2D principal-direction projection for plotting.
//! - [`synth`] — a seeded generator of attribute tables and feature datasets
//!   whose class structure correlates with the attribute priors.
//! - [`io`] — the text file formats shared by the CLI and the library.

pub mod assignment;
pub mod attributes;
pub mod embedding;
pub mod error;
pub mod fewshot;
pub mod io;
pub mod projection;
pub mod prototypes;
pub mod sphere;
pub mod synth;

pub use error::{Error, Result};
pub use sphere::UnitVector;
