//! Exact accuracy/fairness Pareto frontiers for binary classification over
//! analytically specified group-conditional populations.
//!
//! A population is a joint law over a binary sensitive attribute `A`, a binary
//! label `Y` and a real feature `X` whose class-conditional laws are known in
//! closed form. Classifiers are finite unions of intervals per group, so every
//! confusion rate is an exact sum of cdf differences. On top of that the crate
//! sweeps classifier families, extracts the Pareto set under Equalized-Odds
//! unfairness and accuracy, classifies the frontier's shape, decomposes
//! unfairness into a data part and a model part, and checks the structural
//! results about these frontiers on concrete instances.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classifiers;
pub mod distributions;
pub mod error;
pub mod exec;
pub mod frontier;
pub mod intervals;
pub mod metrics;
pub mod numeric;
pub mod oracle;
pub mod population;
pub mod theorems;

pub use classifiers::{BayesScope, ClassifierConfig, GroupwiseClassifier, Orientation};
pub use distributions::Distribution;
pub use error::{Error, Result};
pub use exec::{Executor, Serial};
pub use frontier::{FamilyKind, FamilySpec, Frontier, FrontierPoint, OrientationChoice, Shape};
pub use intervals::IntervalSet;
pub use metrics::{ConfusionRates, Decomposition, MetricWeights};
pub use population::{Group, GroupConditionalModel, Label, ScenarioId, ScenarioSpec};
