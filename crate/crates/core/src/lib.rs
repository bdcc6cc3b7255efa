//! Takagi–Sugeno neuro-fuzzy regression with interpretable partitions.
//!
//! A rule base pairs one fuzzy set per feature with a crisp consequent.
//! Training alternates a gradient step on the antecedents, a least-squares
//! refit of the consequents and, in X-ANFIS mode, a step that pushes each
//! pair of adjacent fuzzy sets toward a target distinguishability.
//!
//! ```
//! use xanfis::{data, experiment, inference, training};
//!
//! let (x, y) = data::synth_regression("sinc2d", 200, 0.05, 1).unwrap();
//! let split = data::split_scale(&x, &y, experiment::SPLIT_FRACTIONS, 1).unwrap();
//! let cfg = experiment::ExperimentConfig { rules: 4, ..Default::default() };
//! let rb0 = experiment::initial_rule_base(&split, &cfg, cfg.mf_kind, None, 1).unwrap();
//! let train_cfg = training::TrainConfig { max_epochs: 5, ..Default::default() };
//! let out = training::train(
//!     &split.x_train, &split.y_train, &split.x_val, &split.y_val, &rb0, &train_cfg,
//! ).unwrap();
//! let yhat = inference::predict(&out.model, &split.x_test).unwrap();
//! assert_eq!(yhat.len(), split.y_test.len());
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod data;
pub mod error;
pub mod experiment;
pub mod fcm;
pub mod inference;
pub mod membership;
pub mod metrics;
pub mod numerics;
pub mod training;

pub use error::{Error, Result};
pub use inference::{ConsequentOrder, ModelFile, RuleBase};
pub use membership::{FuzzySetParams, MfKind};
pub use numerics::{Matrix, RandomStream};
pub use training::{train, Mode, TrainConfig, TrainOutcome};
