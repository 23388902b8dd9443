//! Epsilon-insensitive support vector regression solved by SMO.
//!
//! The dual is written over `2n` variables `a = [alpha; alpha*]` with labels
//! `+1` and `-1`, as in LIBSVM. Each step updates the maximal violating pair.

use serde::{Deserialize, Serialize};

use super::gpr::{check_rows, gram};
use super::kernel::KernelSpec;
use super::standardize::Standardizer;
use super::RegressionError;

pub const DEFAULT_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvrParams {
    pub c: f64,
    pub epsilon: f64,
    #[serde(default)]
    pub standardize: bool,
    /// KKT gap tolerance; `None` means `min(1e-3 C, 1e-6 max(1, max|y|))`.
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

fn default_max_iter() -> usize {
    DEFAULT_MAX_ITER
}

impl SvrParams {
    pub fn new(c: f64, epsilon: f64) -> Self {
        Self {
            c,
            epsilon,
            standardize: false,
            tolerance: None,
            max_iter: DEFAULT_MAX_ITER,
        }
    }

    pub fn standardized(mut self, on: bool) -> Self {
        self.standardize = on;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedSvr {
    pub(crate) support: Vec<Vec<f64>>,
    pub(crate) coef: Vec<f64>,
    pub(crate) bias: f64,
    pub(crate) kernel: KernelSpec,
    pub(crate) params: SvrParams,
    pub(crate) standardizer: Option<Standardizer>,
    pub(crate) dim: usize,
    pub(crate) converged: bool,
    pub(crate) iterations: usize,
}

pub fn svr_fit(
    x: &[Vec<f64>],
    y: &[f64],
    kernel: &KernelSpec,
    params: SvrParams,
) -> Result<TrainedSvr, RegressionError> {
    let dim = check_rows(x, y.len())?;
    if x.len() < 2 {
        return Err(RegressionError::TooFewRows {
            needed: 2,
            got: x.len(),
        });
    }
    kernel.validate(Some(dim))?;
    if !(params.c > 0.0 && params.c.is_finite()) {
        return Err(RegressionError::InvalidHyperparameter {
            name: "C",
            value: params.c,
        });
    }
    if !(params.epsilon >= 0.0 && params.epsilon.is_finite()) {
        return Err(RegressionError::InvalidHyperparameter {
            name: "epsilon",
            value: params.epsilon,
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(RegressionError::NotFinite);
    }
    let standardizer = params.standardize.then(|| Standardizer::fit(x));
    let inputs = match &standardizer {
        Some(s) => s.apply_all(x),
        None => x.to_vec(),
    };
    let n = inputs.len();
    let k = gram(kernel, &inputs);
    let c = params.c;
    let y_max = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = params.tolerance.unwrap_or((1e-3 * c).min(1e-6 * y_max));

    let m = 2 * n;
    let sign = |t: usize| if t < n { 1.0 } else { -1.0 };
    let base = |t: usize| if t < n { t } else { t - n };
    let q = |s: usize, t: usize| sign(s) * sign(t) * k[base(s) * n + base(t)];
    let mut a = vec![0.0; m];
    let mut g: Vec<f64> = (0..m)
        .map(|t| {
            if t < n {
                params.epsilon - y[t]
            } else {
                params.epsilon + y[t - n]
            }
        })
        .collect();

    let mut converged = false;
    let mut iterations = 0;
    while iterations < params.max_iter {
        let mut i = usize::MAX;
        let mut g_max = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut g_min = f64::INFINITY;
        for t in 0..m {
            let yt = sign(t);
            let up = if yt > 0.0 { a[t] < c } else { a[t] > 0.0 };
            let low = if yt > 0.0 { a[t] > 0.0 } else { a[t] < c };
            let v = -yt * g[t];
            if up && v > g_max {
                g_max = v;
                i = t;
            }
            if low && v < g_min {
                g_min = v;
                j = t;
            }
        }
        if i == usize::MAX || j == usize::MAX || g_max - g_min < tol {
            converged = true;
            break;
        }
        iterations += 1;

        let (qii, qjj, qij) = (q(i, i), q(j, j), q(i, j));
        let (old_i, old_j) = (a[i], a[j]);
        if sign(i) != sign(j) {
            let quad = (qii + qjj + 2.0 * qij).max(1e-12);
            let delta = (-g[i] - g[j]) / quad;
            let diff = a[i] - a[j];
            a[i] += delta;
            a[j] += delta;
            if diff > 0.0 {
                if a[j] < 0.0 {
                    a[j] = 0.0;
                    a[i] = diff;
                }
            } else if a[i] < 0.0 {
                a[i] = 0.0;
                a[j] = -diff;
            }
            if diff > 0.0 {
                if a[i] > c {
                    a[i] = c;
                    a[j] = c - diff;
                }
            } else if a[j] > c {
                a[j] = c;
                a[i] = c + diff;
            }
        } else {
            let quad = (qii + qjj - 2.0 * qij).max(1e-12);
            let delta = (g[i] - g[j]) / quad;
            let sum = a[i] + a[j];
            a[i] -= delta;
            a[j] += delta;
            if sum > c {
                if a[i] > c {
                    a[i] = c;
                    a[j] = sum - c;
                }
            } else if a[j] < 0.0 {
                a[j] = 0.0;
                a[i] = sum;
            }
            if sum > c {
                if a[j] > c {
                    a[j] = c;
                    a[i] = sum - c;
                }
            } else if a[i] < 0.0 {
                a[i] = 0.0;
                a[j] = sum;
            }
        }
        let (di, dj) = (a[i] - old_i, a[j] - old_j);
        for (t, gt) in g.iter_mut().enumerate() {
            *gt += q(t, i) * di + q(t, j) * dj;
        }
    }

    // rho from free variables, else the midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free_sum, mut free_n) = (0.0, 0usize);
    for t in 0..m {
        let yg = sign(t) * g[t];
        if a[t] >= c {
            if sign(t) < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if a[t] <= 0.0 {
            if sign(t) > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free_sum += yg;
            free_n += 1;
        }
    }
    let rho = if free_n > 0 {
        free_sum / free_n as f64
    } else {
        (ub + lb) / 2.0
    };

    let mut support = Vec::new();
    let mut coef = Vec::new();
    for i in 0..n {
        let beta = a[i] - a[i + n];
        if beta != 0.0 {
            support.push(inputs[i].clone());
            coef.push(beta);
        }
    }
    Ok(TrainedSvr {
        support,
        coef,
        bias: -rho,
        kernel: kernel.clone(),
        params,
        standardizer,
        dim,
        converged,
        iterations,
    })
}

impl TrainedSvr {
    pub(crate) fn from_parts(
        support: Vec<Vec<f64>>,
        coef: Vec<f64>,
        bias: f64,
        kernel: KernelSpec,
        params: SvrParams,
        standardizer: Option<Standardizer>,
        dim: usize,
    ) -> Result<Self, RegressionError> {
        if support.len() != coef.len() {
            return Err(RegressionError::LengthMismatch {
                rows: support.len(),
                targets: coef.len(),
            });
        }
        if dim == 0 {
            return Err(RegressionError::DimensionMismatch { expected: 1, got: 0 });
        }
        if let Some(r) = support.iter().find(|r| r.len() != dim) {
            return Err(RegressionError::DimensionMismatch {
                expected: dim,
                got: r.len(),
            });
        }
        kernel.validate(Some(dim))?;
        if let Some(s) = &standardizer {
            if s.dim() != dim || !s.is_consistent() {
                return Err(RegressionError::DimensionMismatch {
                    expected: dim,
                    got: s.dim(),
                });
            }
        }
        let finite = support.iter().flatten().chain(&coef).all(|v| v.is_finite()) && bias.is_finite();
        if !finite {
            return Err(RegressionError::NotFinite);
        }
        Ok(Self {
            support,
            coef,
            bias,
            kernel,
            params,
            standardizer,
            dim,
            converged: true,
            iterations: 0,
        })
    }

    /// Dual coefficients `alpha_i - alpha_i*` of the support vectors.
    pub fn dual_coefficients(&self) -> &[f64] {
        &self.coef
    }

    pub fn support_vectors(&self) -> &[Vec<f64>] {
        &self.support
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn params(&self) -> &SvrParams {
        &self.params
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn standardizer(&self) -> Option<&Standardizer> {
        self.standardizer.as_ref()
    }

    /// False when the iteration cap was hit before the KKT gap closed.
    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64, RegressionError> {
        if x.len() != self.dim {
            return Err(RegressionError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let z = match &self.standardizer {
            Some(s) => s.apply(x),
            None => x.to_vec(),
        };
        Ok(self
            .support
            .iter()
            .zip(&self.coef)
            .map(|(sv, b)| b * self.kernel.eval(sv, &z))
            .sum::<f64>()
            + self.bias)
    }
}
