use crate::regression::{rmse, ModelSpec, RegressionError};
use crate::rng::SplitMix64;

/// Seeded k-fold partition. `folds[f]` holds the sorted indices of fold `f`;
/// sizes differ by at most one.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>, RegressionError> {
    if k < 2 || n < k {
        return Err(RegressionError::TooFewRows {
            needed: k.max(2),
            got: n,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    SplitMix64::stream(seed, 0x006b_666f_6c64).shuffle(&mut order);
    let mut folds = vec![Vec::with_capacity(n / k + 1); k];
    for (pos, idx) in order.into_iter().enumerate() {
        folds[pos % k].push(idx);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

/// Held-out predictions in original row order. `fit_predict` receives the
/// training rows, their targets and the rows to predict.
pub fn cross_validated_predictions<F>(
    x: &[Vec<f64>],
    y: &[f64],
    folds: &[Vec<usize>],
    mut fit_predict: F,
) -> Result<Vec<f64>, RegressionError>
where
    F: FnMut(&[Vec<f64>], &[f64], &[Vec<f64>]) -> Result<Vec<f64>, RegressionError>,
{
    if x.len() != y.len() {
        return Err(RegressionError::LengthMismatch {
            rows: x.len(),
            targets: y.len(),
        });
    }
    let mut fold_of = vec![usize::MAX; x.len()];
    for (f, idx) in folds.iter().enumerate() {
        for &i in idx {
            fold_of[i] = f;
        }
    }
    let mut pred = vec![0.0; x.len()];
    for (f, test) in folds.iter().enumerate() {
        let (mut xtr, mut ytr) = (Vec::new(), Vec::new());
        for i in 0..x.len() {
            if fold_of[i] != f {
                xtr.push(x[i].clone());
                ytr.push(y[i]);
            }
        }
        let xte: Vec<Vec<f64>> = test.iter().map(|&i| x[i].clone()).collect();
        let p = fit_predict(&xtr, &ytr, &xte)?;
        for (&i, v) in test.iter().zip(p) {
            pred[i] = v;
        }
    }
    Ok(pred)
}

/// Pooled RMSE over held-out folds for a fixed model specification.
pub fn cross_validated_rmse_on(
    x: &[Vec<f64>],
    y: &[f64],
    spec: &ModelSpec,
    folds: &[Vec<usize>],
) -> Result<f64, RegressionError> {
    let pred = cross_validated_predictions(x, y, folds, |xtr, ytr, xte| spec.fit(xtr, ytr)?.predict_all(xte))?;
    Ok(rmse(y, &pred).expect("lengths checked"))
}

pub fn cross_validated_rmse(
    x: &[Vec<f64>],
    y: &[f64],
    spec: &ModelSpec,
    k: usize,
    seed: u64,
) -> Result<f64, RegressionError> {
    let folds = kfold_split(x.len(), k, seed)?;
    cross_validated_rmse_on(x, y, spec, &folds)
}
