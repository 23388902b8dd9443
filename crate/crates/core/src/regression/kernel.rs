//! Covariance functions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("feature dimensions differ ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("kernel parameter {name} = {value} must be positive and finite")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("polynomial degree {0} must be 1, 2 or 3")]
    InvalidDegree(u32),
    #[error("ARD kernel has {lengths} length scales for {dim} features")]
    ArdLengthMismatch { lengths: usize, dim: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelSpec {
    /// `(scale x'y + bias)^degree`
    Polynomial {
        degree: u32,
        bias: f64,
        scale: f64,
    },
    /// `exp(-|x-y|^2 / (2 sigma^2))`
    GaussianRbf {
        sigma: f64,
    },
    /// Standard form `sf^2 (1 + r^2 / (2 alpha l^2))^-alpha`; the textbook
    /// variant without an outer exponential.
    RationalQuadratic {
        sigma_f: f64,
        alpha: f64,
        length: f64,
    },
    SquaredExponential {
        sigma_f: f64,
        length: f64,
    },
    /// Standard Matern 5/2.
    Matern52 {
        sigma_f: f64,
        length: f64,
    },
    Exponential {
        sigma_f: f64,
        length: f64,
    },
    /// Matern 3/2 with one length scale per feature.
    ArdMatern32 {
        sigma_f: f64,
        lengths: Vec<f64>,
    },
}

fn check(name: &'static str, value: f64) -> Result<(), KernelError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(KernelError::InvalidParameter { name, value })
    }
}

fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

impl KernelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Polynomial { .. } => "polynomial",
            Self::GaussianRbf { .. } => "gaussian_rbf",
            Self::RationalQuadratic { .. } => "rational_quadratic",
            Self::SquaredExponential { .. } => "squared_exponential",
            Self::Matern52 { .. } => "matern52",
            Self::Exponential { .. } => "exponential",
            Self::ArdMatern32 { .. } => "ard_matern32",
        }
    }

    /// Checks parameters and, when `dim` is given, the ARD length count.
    pub fn validate(&self, dim: Option<usize>) -> Result<(), KernelError> {
        match self {
            Self::Polynomial { degree, bias, scale } => {
                if !(1..=3).contains(degree) {
                    return Err(KernelError::InvalidDegree(*degree));
                }
                if !(bias.is_finite() && *bias >= 0.0) {
                    return Err(KernelError::InvalidParameter {
                        name: "bias",
                        value: *bias,
                    });
                }
                check("scale", *scale)
            }
            Self::GaussianRbf { sigma } => check("sigma", *sigma),
            Self::RationalQuadratic { sigma_f, alpha, length } => {
                check("sigma_f", *sigma_f)?;
                check("alpha", *alpha)?;
                check("length", *length)
            }
            Self::SquaredExponential { sigma_f, length }
            | Self::Matern52 { sigma_f, length }
            | Self::Exponential { sigma_f, length } => {
                check("sigma_f", *sigma_f)?;
                check("length", *length)
            }
            Self::ArdMatern32 { sigma_f, lengths } => {
                check("sigma_f", *sigma_f)?;
                for &l in lengths {
                    check("length", l)?;
                }
                if let Some(dim) = dim {
                    if lengths.len() != dim {
                        return Err(KernelError::ArdLengthMismatch {
                            lengths: lengths.len(),
                            dim,
                        });
                    }
                }
                Ok(())
            }
        }
    }

    /// `k(x, y)` after checking dimensions.
    pub fn eval_checked(&self, x: &[f64], y: &[f64]) -> Result<f64, KernelError> {
        if x.len() != y.len() {
            return Err(KernelError::DimensionMismatch(x.len(), y.len()));
        }
        if let Self::ArdMatern32 { lengths, .. } = self {
            if lengths.len() != x.len() {
                return Err(KernelError::ArdLengthMismatch {
                    lengths: lengths.len(),
                    dim: x.len(),
                });
            }
        }
        Ok(self.eval(x, y))
    }

    /// `k(x, y)`; dimensions are assumed to match.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Self::Polynomial { degree, bias, scale } => {
                let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
                (scale * dot + bias).powi(*degree as i32)
            }
            Self::GaussianRbf { sigma } => (-sq_dist(x, y) / (2.0 * sigma * sigma)).exp(),
            Self::RationalQuadratic { sigma_f, alpha, length } => {
                sigma_f * sigma_f * (1.0 + sq_dist(x, y) / (2.0 * alpha * length * length)).powf(-alpha)
            }
            Self::SquaredExponential { sigma_f, length } => {
                sigma_f * sigma_f * (-sq_dist(x, y) / (2.0 * length * length)).exp()
            }
            Self::Matern52 { sigma_f, length } => {
                let r = sq_dist(x, y).sqrt() / length;
                let s5 = 5f64.sqrt() * r;
                sigma_f * sigma_f * (1.0 + s5 + 5.0 * r * r / 3.0) * (-s5).exp()
            }
            Self::Exponential { sigma_f, length } => sigma_f * sigma_f * (-sq_dist(x, y).sqrt() / length).exp(),
            Self::ArdMatern32 { sigma_f, lengths } => {
                let rho = x
                    .iter()
                    .zip(y)
                    .zip(lengths)
                    .map(|((a, b), l)| ((a - b) / l).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let s3 = 3f64.sqrt() * rho;
                sigma_f * sigma_f * (1.0 + s3) * (-s3).exp()
            }
        }
    }

    /// Same family with every length scale multiplied by `factor`.
    pub fn with_scaled_lengths(&self, factor: f64) -> Self {
        let mut k = self.clone();
        match &mut k {
            Self::Polynomial { .. } => {}
            Self::GaussianRbf { sigma } => *sigma *= factor,
            Self::RationalQuadratic { length, .. }
            | Self::SquaredExponential { length, .. }
            | Self::Matern52 { length, .. }
            | Self::Exponential { length, .. } => *length *= factor,
            Self::ArdMatern32 { lengths, .. } => lengths.iter_mut().for_each(|l| *l *= factor),
        }
        k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn se() -> KernelSpec {
        KernelSpec::SquaredExponential {
            sigma_f: 1.0,
            length: 1.0,
        }
    }

    #[test]
    fn squared_exponential_values() {
        assert_eq!(se().eval(&[0.3, 0.1], &[0.3, 0.1]), 1.0);
        assert!((se().eval(&[0.0], &[1.0]) - (-0.5f64).exp()).abs() < 1e-15);
        assert!((se().eval(&[0.0], &[1.0]) - 0.606531).abs() < 1e-6);
    }

    #[test]
    fn cubic_polynomial() {
        let k = KernelSpec::Polynomial {
            degree: 3,
            bias: 1.0,
            scale: 1.0,
        };
        assert_eq!(k.eval(&[1.0, 0.0], &[1.0, 5.0]), 8.0);
    }

    #[test]
    fn closed_forms_at_unit_distance() {
        let x = [0.0];
        let y = [1.0];
        let rq = KernelSpec::RationalQuadratic {
            sigma_f: 2.0,
            alpha: 0.5,
            length: 1.0,
        };
        assert!((rq.eval(&x, &y) - 4.0 * 2f64.powf(-0.5)).abs() < 1e-14);
        let m52 = KernelSpec::Matern52 {
            sigma_f: 1.0,
            length: 1.0,
        };
        let s5 = 5f64.sqrt();
        assert!((m52.eval(&x, &y) - (1.0 + s5 + 5.0 / 3.0) * (-s5).exp()).abs() < 1e-15);
        let ex = KernelSpec::Exponential {
            sigma_f: 1.0,
            length: 2.0,
        };
        assert!((ex.eval(&x, &y) - (-0.5f64).exp()).abs() < 1e-15);
        let ard = KernelSpec::ArdMatern32 {
            sigma_f: 1.0,
            lengths: vec![1.0, 1e6],
        };
        let s3 = 3f64.sqrt();
        assert!((ard.eval(&[0.0, 0.0], &[1.0, 3.0]) - (1.0 + s3) * (-s3).exp()).abs() < 1e-9);
        let rbf = KernelSpec::GaussianRbf { sigma: 1.0 };
        assert_eq!(rbf.eval(&x, &y), se().eval(&x, &y));
    }

    #[test]
    fn validation() {
        assert_eq!(
            se().eval_checked(&[0.0], &[0.0, 1.0]),
            Err(KernelError::DimensionMismatch(1, 2))
        );
        let bad = KernelSpec::Polynomial {
            degree: 4,
            bias: 1.0,
            scale: 1.0,
        };
        assert_eq!(bad.validate(None), Err(KernelError::InvalidDegree(4)));
        let ard = KernelSpec::ArdMatern32 {
            sigma_f: 1.0,
            lengths: vec![1.0],
        };
        assert!(ard.validate(Some(2)).is_err());
        assert!(KernelSpec::GaussianRbf { sigma: 0.0 }.validate(None).is_err());
    }

    #[test]
    fn serde_tagging() {
        let json = serde_json::to_string(&se()).unwrap();
        assert_eq!(json, r#"{"family":"squared_exponential","sigma_f":1.0,"length":1.0}"#);
        let back: KernelSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, se());
    }
}
