//! Image-level train/test split, the twelve-model comparison and the final
//! tuned GPR.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use super::dataset::Dataset;
use super::model::PipelineModel;
use super::PipelineError;
use crate::bayes_opt::cv::{cross_validated_predictions, kfold_split};
use crate::bayes_opt::tune::{
    gpr_presets, gpr_space, gpr_spec_from_config, svm_presets, svm_space, svm_spec_from_config, tune_optimizable_gpr,
    tune_optimizable_svm, CV_FOLDS,
};
use crate::regression::{regression_metrics, ModelSpec, RegressionMetrics, Standardizer};
use crate::rng::SplitMix64;
use crate::snr::LagWindow;

pub const MIN_TRAINING_ROWS: usize = 50;
pub const TEST_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelScore {
    pub name: String,
    /// Pooled 5-fold validation predictions on the training split.
    pub validation: RegressionMetrics,
    pub test: RegressionMetrics,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrainingReport {
    pub train_images: Vec<usize>,
    pub test_images: Vec<usize>,
    pub n_train: usize,
    pub n_test: usize,
    pub scores: Vec<ModelScore>,
    pub tuned_gpr_config: Value,
    pub tuned_gpr_cv_rmse: f64,
    pub tuned_svm_config: Value,
    pub tuned_svm_cv_rmse: f64,
    #[serde(skip)]
    pub gpr_trace_csv: String,
}

impl TrainingReport {
    pub fn score(&self, name: &str) -> Option<&ModelScore> {
        self.scores.iter().find(|s| s.name == name)
    }

    /// `model,rmse,mse,r_squared,mae` for the validation or test metrics.
    pub fn metrics_csv(&self, test: bool) -> String {
        let mut s = String::from("model,rmse,mse,r_squared,mae\n");
        for m in &self.scores {
            let r = if test { &m.test } else { &m.validation };
            writeln!(s, "{},{:?},{:?},{:?},{:?}", m.name, r.rmse, r.mse, r.r_squared, r.mae).expect("string write");
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainOptions {
    pub budget: usize,
    pub seed: u64,
    pub max_lag: usize,
    pub lag_window: LagWindow,
}

/// Shuffles image ids and holds out `ceil(0.2 n)` of them (at least one).
pub fn split_images(ids: &[usize], seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut order = ids.to_vec();
    SplitMix64::stream(seed, 0x0073_706c_6974).shuffle(&mut order);
    let n_test = ((ids.len() as f64 * TEST_FRACTION).ceil() as usize).clamp(1, ids.len().saturating_sub(1).max(1));
    let mut test = order[..n_test].to_vec();
    let mut train = order[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    (train, test)
}

fn score(
    name: &str,
    spec: &ModelSpec,
    x: &[Vec<f64>],
    y: &[f64],
    xt: &[Vec<f64>],
    yt: &[f64],
    folds: &[Vec<usize>],
) -> Result<ModelScore, PipelineError> {
    let val = cross_validated_predictions(x, y, folds, |a, b, c| spec.fit(a, b)?.predict_all(c))?;
    let test = spec.fit(x, y)?.predict_all(xt)?;
    Ok(ModelScore {
        name: name.into(),
        validation: regression_metrics(y, &val)?,
        test: regression_metrics(yt, &test)?,
    })
}

pub fn train_pipeline(data: &Dataset, opts: &TrainOptions) -> Result<(PipelineModel, TrainingReport), PipelineError> {
    if data.len() < MIN_TRAINING_ROWS {
        return Err(PipelineError::TooFewRows {
            needed: MIN_TRAINING_ROWS,
            got: data.len(),
        });
    }
    let ids = data.image_ids();
    if ids.len() < 2 {
        return Err(PipelineError::Config(
            "training needs rows from at least two images".into(),
        ));
    }
    let (train_images, test_images) = split_images(&ids, opts.seed);
    let train = data.subset(|r| train_images.binary_search(&r.image_id).is_ok());
    let test = data.subset(|r| test_images.binary_search(&r.image_id).is_ok());
    let (x, y) = train.xy();
    let (xt, yt) = test.xy();
    let folds = kfold_split(x.len(), CV_FOLDS, opts.seed)?;

    let mut scores = Vec::new();
    let sspace = svm_space(&y);
    for (name, cfg) in svm_presets(&sspace, &y) {
        let spec = svm_spec_from_config(&sspace, &cfg, x[0].len());
        scores.push(score(&name, &spec, &x, &y, &xt, &yt, &folds)?);
    }
    let gspace = gpr_space();
    let stds = Standardizer::fit(&x).stds;
    for (name, cfg) in gpr_presets(&x, &y) {
        let spec = gpr_spec_from_config(&gspace, &cfg, &stds);
        scores.push(score(&name, &spec, &x, &y, &xt, &yt, &folds)?);
    }
    let svm = tune_optimizable_svm(&x, &y, opts.budget, opts.seed)?;
    scores.push(score("Optimizable SVM", &svm.spec, &x, &y, &xt, &yt, &folds)?);
    let gpr = tune_optimizable_gpr(&x, &y, opts.budget, opts.seed)?;
    scores.push(score("Optimizable GPR", &gpr.spec, &x, &y, &xt, &yt, &folds)?);

    let model = PipelineModel::new(gpr.model, data.features, opts.max_lag, opts.lag_window)?;
    let report = TrainingReport {
        n_train: x.len(),
        n_test: xt.len(),
        train_images,
        test_images,
        scores,
        tuned_gpr_config: gpr.config,
        tuned_gpr_cv_rmse: gpr.cv_rmse,
        tuned_svm_config: svm.config,
        tuned_svm_cv_rmse: svm.cv_rmse,
        gpr_trace_csv: gpr.trace_csv,
    };
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_is_disjoint_and_seeded() {
        let ids: Vec<usize> = (0..10).collect();
        let (tr, te) = split_images(&ids, 3);
        assert_eq!((tr.len(), te.len()), (8, 2));
        assert!(te.iter().all(|i| !tr.contains(i)));
        assert_eq!(split_images(&ids, 3), (tr, te));
        assert_eq!(split_images(&[4, 9], 0).1.len(), 1);
    }
}
