//! Per-column z-scoring fitted on training rows.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    /// Columns with zero variance; these pass through unchanged.
    pub constant: Vec<bool>,
}

impl Standardizer {
    /// Fits column means and population standard deviations.
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let dim = rows.first().map_or(0, Vec::len);
        let n = rows.len() as f64;
        let mut means = vec![0.0; dim];
        let mut stds = vec![1.0; dim];
        let mut constant = vec![false; dim];
        for c in 0..dim {
            let m = rows.iter().map(|r| r[c]).sum::<f64>() / n;
            let var = rows.iter().map(|r| (r[c] - m).powi(2)).sum::<f64>() / n;
            if var > 0.0 && var.is_finite() {
                means[c] = m;
                stds[c] = var.sqrt();
            } else {
                constant[c] = true;
            }
        }
        Self { means, stds, constant }
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    pub fn apply_all(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.apply(r)).collect()
    }

    pub(crate) fn is_consistent(&self) -> bool {
        self.stds.len() == self.means.len()
            && self.constant.len() == self.means.len()
            && self.stds.iter().all(|s| *s > 0.0 && s.is_finite())
            && self.means.iter().all(|m| m.is_finite())
    }
}
