//! Exact Gaussian-process regression with a zero prior mean.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::KernelSpec;
use super::standardize::Standardizer;
use super::RegressionError;
use crate::linalg::{self, LinalgError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GprOptions {
    /// z-score the features with training statistics.
    pub standardize_inputs: bool,
    /// Fit on `(y - mean) / std` and map predictions back. `sigma_noise` is
    /// then in normalized units.
    pub normalize_targets: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedGpr {
    pub(crate) inputs: Vec<Vec<f64>>,
    pub(crate) kernel: KernelSpec,
    pub(crate) sigma_noise: f64,
    pub(crate) jitter: f64,
    pub(crate) chol: Vec<f64>,
    pub(crate) alpha: Vec<f64>,
    pub(crate) standardizer: Option<Standardizer>,
    pub(crate) target_mean: f64,
    pub(crate) target_scale: f64,
    pub(crate) log_marginal_likelihood: f64,
}

pub(crate) fn check_rows(x: &[Vec<f64>], y_len: usize) -> Result<usize, RegressionError> {
    if x.is_empty() {
        return Err(RegressionError::Empty);
    }
    if x.len() != y_len {
        return Err(RegressionError::LengthMismatch {
            rows: x.len(),
            targets: y_len,
        });
    }
    let dim = x[0].len();
    if dim == 0 {
        return Err(RegressionError::DimensionMismatch { expected: 1, got: 0 });
    }
    if let Some(r) = x.iter().find(|r| r.len() != dim) {
        return Err(RegressionError::DimensionMismatch {
            expected: dim,
            got: r.len(),
        });
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(RegressionError::NotFinite);
    }
    Ok(dim)
}

pub(crate) fn gram(kernel: &KernelSpec, x: &[Vec<f64>]) -> Vec<f64> {
    let n = x.len();
    let mut k = vec![0.0; n * n];
    k.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (j, v) in row.iter_mut().enumerate() {
            *v = kernel.eval(&x[i], &x[j]);
        }
    });
    k
}

/// Builds `K + sigma^2 I` and factors it; `jitter` is added to the diagonal
/// first when given, otherwise the escalation ladder is used.
fn factor(
    kernel: &KernelSpec,
    inputs: &[Vec<f64>],
    sigma_noise: f64,
    jitter: Option<f64>,
) -> Result<(Vec<f64>, f64), RegressionError> {
    let n = inputs.len();
    let mut k = gram(kernel, inputs);
    let s2 = sigma_noise * sigma_noise;
    for i in 0..n {
        k[i * n + i] += s2;
    }
    match jitter {
        None => linalg::cholesky_jittered(&k, n).map_err(|e| match e {
            LinalgError::NotPositiveDefinite { jitter } => RegressionError::Factorization { jitter },
            LinalgError::NotFinite => RegressionError::NotFinite,
        }),
        Some(j) => {
            if j > 0.0 {
                for i in 0..n {
                    k[i * n + i] += j;
                }
            }
            linalg::cholesky(&k, n)
                .map(|l| (l, j))
                .ok_or(RegressionError::Factorization { jitter: j })
        }
    }
}

/// Fits with raw inputs and targets.
pub fn gpr_fit(
    x: &[Vec<f64>],
    y: &[f64],
    kernel: &KernelSpec,
    sigma_noise: f64,
) -> Result<TrainedGpr, RegressionError> {
    gpr_fit_with(x, y, kernel, sigma_noise, GprOptions::default())
}

pub fn gpr_fit_with(
    x: &[Vec<f64>],
    y: &[f64],
    kernel: &KernelSpec,
    sigma_noise: f64,
    opts: GprOptions,
) -> Result<TrainedGpr, RegressionError> {
    let dim = check_rows(x, y.len())?;
    kernel.validate(Some(dim))?;
    if !(sigma_noise >= 0.0 && sigma_noise.is_finite()) {
        return Err(RegressionError::InvalidHyperparameter {
            name: "sigma_noise",
            value: sigma_noise,
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(RegressionError::NotFinite);
    }
    let standardizer = opts.standardize_inputs.then(|| Standardizer::fit(x));
    let inputs = match &standardizer {
        Some(s) => s.apply_all(x),
        None => x.to_vec(),
    };
    let (target_mean, target_scale) = if opts.normalize_targets {
        let n = y.len() as f64;
        let m = y.iter().sum::<f64>() / n;
        let var = y.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
        (m, if var > 0.0 { var.sqrt() } else { 1.0 })
    } else {
        (0.0, 1.0)
    };
    let targets: Vec<f64> = y.iter().map(|v| (v - target_mean) / target_scale).collect();
    let (chol, jitter) = factor(kernel, &inputs, sigma_noise, None)?;
    let n = inputs.len();
    let alpha = linalg::cholesky_solve(&chol, n, &targets);
    let data_fit: f64 = targets.iter().zip(&alpha).map(|(a, b)| a * b).sum();
    let log_marginal_likelihood = -0.5 * data_fit
        - 0.5 * linalg::log_det(&chol, n)
        - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln()
        - n as f64 * target_scale.ln();
    Ok(TrainedGpr {
        inputs,
        kernel: kernel.clone(),
        sigma_noise,
        jitter,
        chol,
        alpha,
        standardizer,
        target_mean,
        target_scale,
        log_marginal_likelihood,
    })
}

impl TrainedGpr {
    /// Rebuilds the factor from stored parts, as after deserialization.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        inputs: Vec<Vec<f64>>,
        kernel: KernelSpec,
        sigma_noise: f64,
        jitter: f64,
        alpha: Vec<f64>,
        standardizer: Option<Standardizer>,
        target_mean: f64,
        target_scale: f64,
    ) -> Result<Self, RegressionError> {
        let dim = check_rows(&inputs, alpha.len())?;
        kernel.validate(Some(dim))?;
        if let Some(s) = &standardizer {
            if s.dim() != dim || !s.is_consistent() {
                return Err(RegressionError::DimensionMismatch {
                    expected: dim,
                    got: s.dim(),
                });
            }
        }
        let finite = [sigma_noise, jitter, target_mean, target_scale]
            .iter()
            .chain(&alpha)
            .all(|v| v.is_finite());
        if !finite || sigma_noise < 0.0 || jitter < 0.0 || target_scale <= 0.0 {
            return Err(RegressionError::NotFinite);
        }
        let (chol, jitter) = factor(&kernel, &inputs, sigma_noise, Some(jitter))?;
        Ok(Self {
            inputs,
            kernel,
            sigma_noise,
            jitter,
            chol,
            alpha,
            standardizer,
            target_mean,
            target_scale,
            log_marginal_likelihood: f64::NAN,
        })
    }

    pub fn dim(&self) -> usize {
        self.inputs[0].len()
    }

    pub fn n_train(&self) -> usize {
        self.inputs.len()
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn sigma_noise(&self) -> f64 {
        self.sigma_noise
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn alpha_weights(&self) -> &[f64] {
        &self.alpha
    }

    pub fn standardizer(&self) -> Option<&Standardizer> {
        self.standardizer.as_ref()
    }

    /// Lower-triangular factor of `K + (sigma^2 + jitter) I`, row-major.
    pub fn chol_factor(&self) -> &[f64] {
        &self.chol
    }

    /// Log marginal likelihood of the training targets; NaN after reload.
    pub fn log_marginal_likelihood(&self) -> f64 {
        self.log_marginal_likelihood
    }

    fn prepare(&self, x: &[f64]) -> Result<Vec<f64>, RegressionError> {
        if x.len() != self.dim() {
            return Err(RegressionError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(match &self.standardizer {
            Some(s) => s.apply(x),
            None => x.to_vec(),
        })
    }

    /// Posterior mean only.
    pub fn predict_mean(&self, x: &[f64]) -> Result<f64, RegressionError> {
        let z = self.prepare(x)?;
        let m: f64 = self
            .inputs
            .iter()
            .zip(&self.alpha)
            .map(|(xi, a)| self.kernel.eval(xi, &z) * a)
            .sum();
        Ok(self.target_mean + self.target_scale * m)
    }

    /// Posterior mean and latent variance, the latter floored at zero.
    pub fn predict(&self, x: &[f64]) -> Result<(f64, f64), RegressionError> {
        let z = self.prepare(x)?;
        let ks: Vec<f64> = self.inputs.iter().map(|xi| self.kernel.eval(xi, &z)).collect();
        let m: f64 = ks.iter().zip(&self.alpha).map(|(k, a)| k * a).sum();
        let mut v = ks;
        linalg::solve_lower(&self.chol, self.n_train(), &mut v);
        let reduction: f64 = v.iter().map(|t| t * t).sum();
        let var = (self.kernel.eval(&z, &z) - reduction).max(0.0);
        Ok((
            self.target_mean + self.target_scale * m,
            var * self.target_scale * self.target_scale,
        ))
    }
}
