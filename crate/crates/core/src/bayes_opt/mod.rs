//! Bayesian optimization of regressor hyperparameters and k-fold
//! cross-validation.

pub mod acquisition;
pub mod cv;
pub mod optimizer;
pub mod space;
pub mod tune;

pub use acquisition::{
    ei_per_second, expected_improvement, lcb_acquisition, lower_confidence_bound, plus_exploration_check,
    probability_of_improvement, sigma_q, Acquisition,
};
pub use cv::{cross_validated_predictions, cross_validated_rmse, cross_validated_rmse_on, kfold_split};
pub use optimizer::{bayes_optimize, BoError, BoOptions, BoResult, Evaluation};
pub use space::{Config, Dimension, ParamValue, Scale, SearchSpace, SpaceError};
pub use tune::{tune_optimizable_gpr, tune_optimizable_svm, PresetScore, TuneError, TunedModel};
