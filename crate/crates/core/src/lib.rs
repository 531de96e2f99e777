//! Exaggeration labeling for health press releases and news articles, tweet
//! diffusion analysis over lexicon categories, and user profiling with
//! in-crate classifiers.
//!
//! Data flows `corpus` → `exaggeration` → `diffusion` / `profiler` → `learn`.
//! Parallel work goes through [`parallel`], which falls back to sequential
//! iteration when the `parallel` feature is off. Outputs never depend on the
//! worker count.

pub mod corpus;
pub mod diffusion;
pub mod exaggeration;
pub mod learn;
pub mod lexicon;
pub mod parallel;
pub mod profiler;
pub mod synth;
