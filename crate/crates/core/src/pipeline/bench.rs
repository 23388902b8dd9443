//! Per-noise-level benchmark tables for the SNR estimators and the filters,
//! plus the paired t-tests run on them.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::corpus::noisy_instance;
use super::model::NoiseVariancePredictor;
use super::run::run_aogprllsr;
use super::PipelineError;
use crate::acf::compute_acf;
use crate::filters::{
    average_filter, gaussian_blur, gaussian_filter, median_filter, wiener_nv, Boundary, FilterConfig,
};
use crate::image::GrayImage;
use crate::snr::{actual_snr, estimate, LagWindow, SnrMethod};
use crate::stats::{mse, paired_t_test, TTestReport};
use crate::tabular::NumericTable;

pub const ALPHA: f64 = 0.05;

/// Estimator columns in table order.
pub const SNR_COLUMNS: [SnrMethod; 5] = [
    SnrMethod::Nn,
    SnrMethod::Fol,
    SnrMethod::NnFol,
    SnrMethod::Lsr,
    SnrMethod::Nllsr,
];

fn column_name(m: SnrMethod) -> &'static str {
    match m {
        SnrMethod::Nn => "nn",
        SnrMethod::Fol => "fol",
        SnrMethod::NnFol => "nn_fol",
        SnrMethod::Lsr => "lsr",
        SnrMethod::Nllsr => "nllsr",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnrLevel {
    pub nv: f64,
    pub actual_db: f64,
    /// Mean estimate per method, in [`SNR_COLUMNS`] order.
    pub estimates_db: [f64; 5],
    /// Instances whose estimate was degenerate or non-positive, per method.
    pub excluded: [usize; 5],
}

/// Actual and estimated SNR (dB) averaged per noise level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnrTable {
    pub levels: Vec<SnrLevel>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnrErrorTest {
    pub method: SnrMethod,
    pub report: TTestReport,
}

impl SnrTable {
    pub fn column(&self, m: SnrMethod) -> Vec<f64> {
        let j = SNR_COLUMNS.iter().position(|c| *c == m).expect("known method");
        self.levels.iter().map(|l| l.estimates_db[j]).collect()
    }

    pub fn actual(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.actual_db).collect()
    }

    /// `|estimate - actual|` per level.
    pub fn abs_errors(&self, m: SnrMethod) -> Vec<f64> {
        self.column(m)
            .iter()
            .zip(self.actual())
            .map(|(e, a)| (e - a).abs())
            .collect()
    }

    pub fn mean_abs_error(&self, m: SnrMethod) -> f64 {
        let e = self.abs_errors(m);
        e.iter().sum::<f64>() / e.len() as f64
    }

    /// LSR absolute errors against each other method's, LSR as the first
    /// sample. Empty when there are fewer than two levels.
    pub fn error_tests(&self) -> Result<Vec<SnrErrorTest>, PipelineError> {
        if self.levels.len() < 2 {
            return Ok(Vec::new());
        }
        let lsr = self.abs_errors(SnrMethod::Lsr);
        [SnrMethod::Nn, SnrMethod::Fol, SnrMethod::NnFol, SnrMethod::Nllsr]
            .into_iter()
            .map(|m| {
                Ok(SnrErrorTest {
                    method: m,
                    report: paired_t_test(&lsr, &self.abs_errors(m), ALPHA)?,
                })
            })
            .collect()
    }

    /// `nv,actual,nn,fol,nn_fol,lsr,nllsr`
    pub fn to_csv(&self) -> String {
        let mut s = String::from("nv,actual");
        for m in SNR_COLUMNS {
            write!(s, ",{}", column_name(m)).expect("string write");
        }
        s.push('\n');
        for l in &self.levels {
            write!(s, "{:?},{:?}", l.nv, l.actual_db).expect("string write");
            for v in l.estimates_db {
                write!(s, ",{v:?}").expect("string write");
            }
            s.push('\n');
        }
        s
    }

    pub fn from_table(t: &NumericTable) -> Result<Self, PipelineError> {
        let nv = t.column("nv")?;
        let actual = t.column("actual")?;
        let cols = SNR_COLUMNS
            .iter()
            .map(|m| t.column(column_name(*m)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            levels: (0..t.n_rows())
                .map(|i| SnrLevel {
                    nv: nv[i],
                    actual_db: actual[i],
                    estimates_db: std::array::from_fn(|j| cols[j][i]),
                    excluded: [0; 5],
                })
                .collect(),
        })
    }

    pub fn from_csv(text: &str) -> Result<Self, PipelineError> {
        Self::from_table(&NumericTable::parse(text)?)
    }
}

/// Spreadsheet block of the four LSR-versus-other tests.
pub fn render_error_tests(tests: &[SnrErrorTest]) -> String {
    let blocks: Vec<(&str, &str, &TTestReport)> = tests.iter().map(|t| ("LSR", t.method.label(), &t.report)).collect();
    crate::stats::ttest::render_t_table(&blocks)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchOptions {
    pub seed: u64,
    pub max_lag: usize,
    pub lag_window: LagWindow,
    pub window: usize,
    pub boundary: Boundary,
    /// Variance given to the non-adaptive Wiener baseline.
    pub fixed_nv: f64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            max_lag: crate::acf::DEFAULT_MAX_LAG,
            lag_window: LagWindow::default(),
            window: 3,
            boundary: Boundary::Symmetric,
            fixed_nv: 0.005,
        }
    }
}

fn check_inputs(clean: &[GrayImage], nv_grid: &[f64], seeds: usize) -> Result<(), PipelineError> {
    if clean.is_empty() {
        return Err(PipelineError::EmptyCorpus);
    }
    if nv_grid.is_empty() {
        return Err(PipelineError::EmptyGrid);
    }
    if seeds == 0 {
        return Err(PipelineError::Config("seeds per level must be at least 1".into()));
    }
    Ok(())
}

/// Instances for one level, in (image, rep) order.
fn instances(n_images: usize, seeds: usize) -> Vec<(usize, usize)> {
    (0..n_images).flat_map(|i| (0..seeds).map(move |r| (i, r))).collect()
}

pub fn benchmark_snr(
    clean: &[GrayImage],
    nv_grid: &[f64],
    seeds: usize,
    opts: &BenchOptions,
) -> Result<SnrTable, PipelineError> {
    check_inputs(clean, nv_grid, seeds)?;
    let mut levels = Vec::with_capacity(nv_grid.len());
    for (level, &nv) in nv_grid.iter().enumerate() {
        let per: Vec<(f64, [Option<f64>; 5])> = instances(clean.len(), seeds)
            .into_par_iter()
            .map(|(i, rep)| {
                let noisy = noisy_instance(&clean[i], nv, opts.seed, i, level, rep)?;
                let acf = compute_acf(&noisy, opts.max_lag)?;
                let actual = actual_snr(&clean[i], &noisy)?.snr_db;
                let est = SNR_COLUMNS.map(|m| {
                    estimate(&acf, m, opts.lag_window)
                        .ok()
                        .map(|e| e.snr_db)
                        .filter(|v| v.is_finite())
                });
                Ok((actual, est))
            })
            .collect::<Result<_, PipelineError>>()?;
        let finite_actual: Vec<f64> = per.iter().map(|p| p.0).filter(|v| v.is_finite()).collect();
        let actual_db = if finite_actual.is_empty() {
            f64::INFINITY
        } else {
            finite_actual.iter().sum::<f64>() / finite_actual.len() as f64
        };
        let mut estimates_db = [f64::NAN; 5];
        let mut excluded = [0; 5];
        for j in 0..5 {
            let ok: Vec<f64> = per.iter().filter_map(|p| p.1[j]).collect();
            excluded[j] = per.len() - ok.len();
            if !ok.is_empty() {
                estimates_db[j] = ok.iter().sum::<f64>() / ok.len() as f64;
            }
        }
        levels.push(SnrLevel {
            nv,
            actual_db,
            estimates_db,
            excluded,
        });
    }
    Ok(SnrTable { levels })
}

/// Mean MSE against the clean image per noise level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterLevel {
    pub nv: f64,
    pub pre: f64,
    /// NV-guided Wiener driven by the predictor.
    pub post: f64,
    pub average: f64,
    pub median: f64,
    /// Gaussian with `sigma^2` equal to the injected variance.
    pub gaussian: f64,
    /// Gaussian with `sigma = 1` pixel.
    pub gaussian_unit: f64,
    /// NV-guided Wiener with the fixed variance.
    pub wiener_fixed: f64,
    pub estimated_nv: f64,
    pub fallbacks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterTable {
    pub fixed_nv: f64,
    pub levels: Vec<FilterLevel>,
}

impl FilterTable {
    /// `nv,pre,post`
    pub fn mse_csv(&self) -> String {
        let mut s = String::from("nv,pre,post\n");
        for l in &self.levels {
            writeln!(s, "{:?},{:?},{:?}", l.nv, l.pre, l.post).expect("string write");
        }
        s
    }

    /// All filters side by side.
    pub fn comparison_csv(&self) -> String {
        let mut s = String::from("nv,median,gaussian,wiener_fixed,wiener_nv,average,gaussian_unit,estimated_nv\n");
        for l in &self.levels {
            writeln!(
                s,
                "{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
                l.nv, l.median, l.gaussian, l.wiener_fixed, l.post, l.average, l.gaussian_unit, l.estimated_nv
            )
            .expect("string write");
        }
        s
    }

    pub fn mse_table(&self) -> MseTable {
        MseTable {
            nv: self.levels.iter().map(|l| l.nv).collect(),
            pre: self.levels.iter().map(|l| l.pre).collect(),
            post: self.levels.iter().map(|l| l.post).collect(),
        }
    }
}

/// Pre- and post-filter MSE per level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MseTable {
    pub nv: Vec<f64>,
    pub pre: Vec<f64>,
    pub post: Vec<f64>,
}

impl MseTable {
    pub fn from_table(t: &NumericTable) -> Result<Self, PipelineError> {
        Ok(Self {
            nv: t.column("nv")?.to_vec(),
            pre: t.column("pre")?.to_vec(),
            post: t.column("post")?.to_vec(),
        })
    }

    pub fn from_csv(text: &str) -> Result<Self, PipelineError> {
        Self::from_table(&NumericTable::parse(text)?)
    }

    /// Post against pre, post as the first sample.
    pub fn t_test(&self) -> Result<TTestReport, PipelineError> {
        Ok(paired_t_test(&self.post, &self.pre, ALPHA)?)
    }
}

pub fn benchmark_filters(
    clean: &[GrayImage],
    nv_grid: &[f64],
    seeds: usize,
    model: &(dyn NoiseVariancePredictor + Sync),
    opts: &BenchOptions,
) -> Result<FilterTable, PipelineError> {
    check_inputs(clean, nv_grid, seeds)?;
    let BenchOptions {
        window,
        boundary,
        fixed_nv,
        ..
    } = *opts;
    let mut levels = Vec::with_capacity(nv_grid.len());
    for (level, &nv) in nv_grid.iter().enumerate() {
        let per: Vec<[f64; 9]> = instances(clean.len(), seeds)
            .into_par_iter()
            .map(|(i, rep)| {
                let c = &clean[i];
                let noisy = noisy_instance(c, nv, opts.seed, i, level, rep)?;
                let (post, report) = run_aogprllsr(&noisy, model, window, boundary)?;
                let cfg = |v: f64| FilterConfig {
                    window,
                    noise_variance: v,
                    boundary,
                };
                let gaussian = if nv > 0.0 {
                    mse(&gaussian_filter(&noisy, &cfg(nv))?, c)?
                } else {
                    mse(&noisy, c)?
                };
                Ok([
                    mse(&noisy, c)?,
                    mse(&post, c)?,
                    mse(&average_filter(&noisy, &cfg(0.0))?, c)?,
                    mse(&median_filter(&noisy, &cfg(0.0))?, c)?,
                    gaussian,
                    mse(&gaussian_blur(&noisy, 1.0, boundary), c)?,
                    mse(&wiener_nv(&noisy, &cfg(fixed_nv))?, c)?,
                    report.estimated_nv,
                    if report.fallback { 1.0 } else { 0.0 },
                ])
            })
            .collect::<Result<_, PipelineError>>()?;
        let mean = |j: usize| per.iter().map(|p| p[j]).sum::<f64>() / per.len() as f64;
        levels.push(FilterLevel {
            nv,
            pre: mean(0),
            post: mean(1),
            average: mean(2),
            median: mean(3),
            gaussian: mean(4),
            gaussian_unit: mean(5),
            wiener_fixed: mean(6),
            estimated_nv: mean(7),
            fallbacks: per.iter().filter(|p| p[8] > 0.0).count(),
        });
    }
    Ok(FilterTable { fixed_nv, levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::config::CorpusConfig;
    use crate::pipeline::corpus::make_corpus;
    use crate::pipeline::model::FixedNv;

    #[test]
    fn snr_csv_round_trip() {
        let imgs = make_corpus(
            &CorpusConfig {
                images: 2,
                side: 64,
                ..CorpusConfig::default()
            },
            0,
        )
        .unwrap();
        let t = benchmark_snr(&imgs, &[0.002, 0.008], 2, &BenchOptions::default()).unwrap();
        assert_eq!(t.levels.len(), 2);
        assert_eq!(SnrTable::from_csv(&t.to_csv()).unwrap().to_csv(), t.to_csv());
        assert_eq!(t.error_tests().unwrap().len(), 4);
        assert!(t.actual()[0] > t.actual()[1]);
    }

    #[test]
    fn single_level_skips_tests() {
        let imgs = make_corpus(
            &CorpusConfig {
                images: 1,
                side: 64,
                ..CorpusConfig::default()
            },
            0,
        )
        .unwrap();
        let t = benchmark_snr(&imgs, &[0.004], 1, &BenchOptions::default()).unwrap();
        assert_eq!(t.levels.len(), 1);
        assert!(t.error_tests().unwrap().is_empty());
    }

    #[test]
    fn filter_table_shape() {
        let imgs = make_corpus(
            &CorpusConfig {
                images: 2,
                side: 64,
                ..CorpusConfig::default()
            },
            0,
        )
        .unwrap();
        let grid = [0.004, 0.008];
        let t = benchmark_filters(&imgs, &grid, 1, &FixedNv(0.006), &BenchOptions::default()).unwrap();
        assert_eq!(t.mse_csv().lines().count(), 3);
        assert!(t.levels.iter().all(|l| l.post < l.pre));
        let m = MseTable::from_csv(&t.mse_csv()).unwrap();
        assert_eq!(m.post, t.levels.iter().map(|l| l.post).collect::<Vec<_>>());
    }

    #[test]
    fn missing_fixture_column() {
        assert!(SnrTable::from_csv("nv,actual,nn\n0.1,2,3\n").is_err());
        assert!(MseTable::from_csv("nv,pre\n0.1,2\n").is_err());
    }
}
