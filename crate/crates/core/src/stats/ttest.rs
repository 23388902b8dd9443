//! Paired two-sample t-test with a spreadsheet-style report.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use super::special::{student_t_cdf, student_t_quantile};

#[derive(Debug, Error, PartialEq)]
pub enum TTestError {
    #[error("samples have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 paired observations, got {0}")]
    TooFew(usize),
    #[error("paired differences have zero variance")]
    ZeroVariance,
    #[error("alpha {0} outside (0, 1)")]
    InvalidAlpha(f64),
    #[error("sample contains a non-finite value")]
    NotFinite,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TTestReport {
    pub n: usize,
    pub mean_x: f64,
    pub mean_y: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub pearson: f64,
    pub df: usize,
    pub t_stat: f64,
    /// Tail probability beyond the observed `t` on its own side.
    pub p_one_tail: f64,
    pub p_two_tail: f64,
    pub t_crit_one: f64,
    pub t_crit_two: f64,
    pub alpha: f64,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_var(xs: &[f64], m: f64) -> f64 {
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Paired t-test on `d = x - y` with `df = n - 1`.
pub fn paired_t_test(x: &[f64], y: &[f64], alpha: f64) -> Result<TTestReport, TTestError> {
    if x.len() != y.len() {
        return Err(TTestError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 2 {
        return Err(TTestError::TooFew(n));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(TTestError::InvalidAlpha(alpha));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(TTestError::NotFinite);
    }
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let md = mean(&d);
    let vd = sample_var(&d, md);
    let scale = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // differences equal up to rounding count as constant
    if vd <= (1e-12 * scale).powi(2) {
        return Err(TTestError::ZeroVariance);
    }
    let t_stat = md / (vd / n as f64).sqrt();
    let df = n - 1;
    let dff = df as f64;
    let p_one_tail = student_t_cdf(-t_stat.abs(), dff);

    let (mean_x, mean_y) = (mean(x), mean(y));
    let (var_x, var_y) = (sample_var(x, mean_x), sample_var(y, mean_y));
    let cov = x.iter().zip(y).map(|(a, b)| (a - mean_x) * (b - mean_y)).sum::<f64>() / dff;
    let pearson = cov / (var_x * var_y).sqrt();

    Ok(TTestReport {
        n,
        mean_x,
        mean_y,
        var_x,
        var_y,
        pearson,
        df,
        t_stat,
        p_one_tail,
        p_two_tail: 2.0 * p_one_tail,
        t_crit_one: student_t_quantile(1.0 - alpha, dff),
        t_crit_two: student_t_quantile(1.0 - alpha / 2.0, dff),
        alpha,
    })
}

impl TTestReport {
    /// Both readings of a one-sided comparison of `x` against `y`.
    pub fn hypothesis_summary(&self, x_name: &str, y_name: &str) -> String {
        let lower = self.t_stat < 0.0;
        let significant = self.p_one_tail < self.alpha;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "H0: mean({x_name}) >= mean({y_name}) vs H1: mean({x_name}) < mean({y_name}): {}",
            if lower && significant {
                "reject H0"
            } else {
                "fail to reject H0"
            }
        );
        let _ = writeln!(
            out,
            "H0: mean({x_name}) <= mean({y_name}) vs H1: mean({x_name}) > mean({y_name}): {}",
            if !lower && significant {
                "reject H0"
            } else {
                "fail to reject H0"
            }
        );
        out
    }
}

fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() < 1e-3 || v.abs() >= 1e6 {
        format!("{v:.6e}")
    } else {
        format!("{v:.6}")
    }
}

/// Renders one or more comparisons side by side in the familiar spreadsheet
/// t-test layout. Each block is `(x label, y label, report)`.
pub fn render_t_table(blocks: &[(&str, &str, &TTestReport)]) -> String {
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut header = vec![String::new()];
    for (xl, yl, _) in blocks {
        header.push((*xl).to_string());
        header.push((*yl).to_string());
    }
    rows.push(header);
    type Cell = fn(&TTestReport) -> (String, String);
    let lines: [(&str, Cell); 11] = [
        ("Mean", |r| (fmt_num(r.mean_x), fmt_num(r.mean_y))),
        ("Variance", |r| (fmt_num(r.var_x), fmt_num(r.var_y))),
        ("Observations", |r| (r.n.to_string(), r.n.to_string())),
        ("Pearson Correlation", |r| (fmt_num(r.pearson), String::new())),
        ("Hypothesized Mean Difference", |_| ("0".into(), String::new())),
        ("df", |r| (r.df.to_string(), String::new())),
        ("t Stat", |r| (fmt_num(r.t_stat), String::new())),
        ("P(T<=t) one-tail", |r| (fmt_num(r.p_one_tail), String::new())),
        ("t Critical one-tail", |r| (fmt_num(r.t_crit_one), String::new())),
        ("P(T<=t) two-tail", |r| (fmt_num(r.p_two_tail), String::new())),
        ("t Critical two-tail", |r| (fmt_num(r.t_crit_two), String::new())),
    ];
    for (label, cell) in lines {
        let mut row = vec![label.to_string()];
        for (_, _, r) in blocks {
            let (a, b) = cell(r);
            row.push(a);
            row.push(b);
        }
        rows.push(row);
    }
    let cols = rows[0].len();
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antisymmetric() {
        let x = [1.0, 2.5, 3.1, 4.0];
        let y = [1.2, 2.0, 3.3, 3.1];
        let a = paired_t_test(&x, &y, 0.05).unwrap();
        let b = paired_t_test(&y, &x, 0.05).unwrap();
        assert_eq!(a.t_stat, -b.t_stat);
        assert_eq!(a.p_one_tail, b.p_one_tail);
        assert_eq!(a.p_two_tail, 2.0 * a.p_one_tail);
    }

    #[test]
    fn degenerate_inputs() {
        let x = [0.1, 0.2, 0.3];
        assert_eq!(paired_t_test(&x, &x, 0.05), Err(TTestError::ZeroVariance));
        let shifted = [0.2, 0.3, 0.4];
        assert_eq!(paired_t_test(&x, &shifted, 0.05), Err(TTestError::ZeroVariance));
        assert_eq!(paired_t_test(&x[..1], &x[..1], 0.05), Err(TTestError::TooFew(1)));
        assert_eq!(paired_t_test(&x, &x[..2], 0.05), Err(TTestError::LengthMismatch(3, 2)));
    }

    #[test]
    fn small_hand_case() {
        // d = [1, 2, 3]: mean 2, sd 1, t = 2 sqrt(3)
        let r = paired_t_test(&[2.0, 4.0, 6.0], &[1.0, 2.0, 3.0], 0.05).unwrap();
        assert!((r.t_stat - 2.0 * 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.df, 2);
        // P(T > 2 sqrt 3) with 2 dof = 0.5 - t / (2 sqrt(2 + t^2))
        let t = r.t_stat;
        let expected = 0.5 - t / (2.0 * (2.0 + t * t).sqrt());
        assert!((r.p_one_tail - expected).abs() < 1e-14);
        assert!((r.pearson - 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_layout() {
        let r = paired_t_test(&[2.0, 4.0, 6.1], &[1.0, 2.0, 3.0], 0.05).unwrap();
        let text = render_t_table(&[("A", "B", &r)]);
        let labels: Vec<&str> = text.lines().skip(1).map(|l| l.split("  ").next().unwrap()).collect();
        assert_eq!(labels[0], "Mean");
        assert!(text.contains("P(T<=t) one-tail"));
        assert!(text.contains("t Critical two-tail"));
        assert!(r.hypothesis_summary("A", "B").lines().count() == 2);
    }
}
