//! Labelled (features, injected noise variance) rows built from a clean
//! corpus, and their CSV form.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::corpus::noisy_instance;
use super::features::FeatureSpec;
use super::PipelineError;
use crate::acf::compute_acf;
use crate::image::GrayImage;
use crate::snr::{actual_snr, snr_lsr, LagWindow};

/// Most rows accepted when parsing a dataset file.
pub const MAX_DATASET_ROWS: usize = 1 << 20;
const FIXED_COLUMNS: [&str; 4] = ["image_id", "level", "rep", "nv"];

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRow {
    pub image_id: usize,
    pub level: usize,
    pub rep: usize,
    /// Injected noise variance, the regression target.
    pub nv: f64,
    pub actual_snr_db: f64,
    pub features: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedRow {
    pub image_id: usize,
    pub level: usize,
    pub rep: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: FeatureSpec,
    pub rows: Vec<DatasetRow>,
    pub skipped: Vec<SkippedRow>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetOptions {
    pub features: FeatureSpec,
    pub max_lag: usize,
    pub lag_window: LagWindow,
    pub seed: u64,
}

impl Default for DatasetOptions {
    fn default() -> Self {
        Self {
            features: FeatureSpec::default(),
            max_lag: crate::acf::DEFAULT_MAX_LAG,
            lag_window: LagWindow::default(),
            seed: 0,
        }
    }
}

pub fn generate_dataset(
    clean: &[GrayImage],
    nv_grid: &[f64],
    seeds_per_level: usize,
    opts: &DatasetOptions,
) -> Result<Dataset, PipelineError> {
    if clean.is_empty() {
        return Err(PipelineError::EmptyCorpus);
    }
    if nv_grid.is_empty() {
        return Err(PipelineError::EmptyGrid);
    }
    let per_image: Vec<Vec<Result<DatasetRow, SkippedRow>>> = clean
        .par_iter()
        .enumerate()
        .map(|(image_id, img)| {
            let mut out = Vec::with_capacity(nv_grid.len() * seeds_per_level);
            for (level, &nv) in nv_grid.iter().enumerate() {
                for rep in 0..seeds_per_level {
                    out.push(make_row(img, image_id, level, rep, nv, opts)?);
                }
            }
            Ok(out)
        })
        .collect::<Result<_, PipelineError>>()?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for r in per_image.into_iter().flatten() {
        match r {
            Ok(row) => rows.push(row),
            Err(s) => skipped.push(s),
        }
    }
    Ok(Dataset {
        features: opts.features,
        rows,
        skipped,
    })
}

fn make_row(
    clean: &GrayImage,
    image_id: usize,
    level: usize,
    rep: usize,
    nv: f64,
    opts: &DatasetOptions,
) -> Result<Result<DatasetRow, SkippedRow>, PipelineError> {
    let noisy = noisy_instance(clean, nv, opts.seed, image_id, level, rep)?;
    let acf = compute_acf(&noisy, opts.max_lag)?;
    let skip = |reason: String| {
        Ok(Err(SkippedRow {
            image_id,
            level,
            rep,
            reason,
        }))
    };
    let lsr = match snr_lsr(&acf, opts.lag_window) {
        Ok(e) if e.snr_linear > 0.0 => e,
        Ok(e) => return skip(format!("non-positive LSR SNR {}", e.snr_linear)),
        Err(e) => return skip(e.to_string()),
    };
    let actual = actual_snr(clean, &noisy)?;
    Ok(Ok(DatasetRow {
        image_id,
        level,
        rep,
        nv,
        actual_snr_db: actual.snr_db,
        features: opts.features.extract(&acf, &lsr),
    }))
}

fn format_error(line: usize, msg: impl Into<String>) -> PipelineError {
    PipelineError::DatasetFormat {
        line,
        message: msg.into(),
    }
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn xy(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        (
            self.rows.iter().map(|r| r.features.clone()).collect(),
            self.rows.iter().map(|r| r.nv).collect(),
        )
    }

    pub fn subset(&self, keep: impl Fn(&DatasetRow) -> bool) -> Self {
        Self {
            features: self.features,
            rows: self.rows.iter().filter(|r| keep(r)).cloned().collect(),
            skipped: Vec::new(),
        }
    }

    pub fn image_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.rows.iter().map(|r| r.image_id).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// `image_id,level,rep,nv,actual_snr_db,<features>` with shortest
    /// round-trip float formatting.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("image_id,level,rep,nv,actual_snr_db");
        for name in self.features.names() {
            s.push(',');
            s.push_str(name);
        }
        s.push('\n');
        for r in &self.rows {
            write!(
                s,
                "{},{},{},{:?},{:?}",
                r.image_id, r.level, r.rep, r.nv, r.actual_snr_db
            )
            .expect("string write");
            for f in &r.features {
                write!(s, ",{f:?}").expect("string write");
            }
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self, PipelineError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| format_error(1, "empty dataset"))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.len() < 6 || cols[..4] != FIXED_COLUMNS || cols[4] != "actual_snr_db" {
            return Err(format_error(
                1,
                "header must start with image_id,level,rep,nv,actual_snr_db",
            ));
        }
        let features = [FeatureSpec::SnrOnly, FeatureSpec::Extended]
            .into_iter()
            .find(|f| f.names() == &cols[5..])
            .ok_or_else(|| format_error(1, format!("unknown feature columns {:?}", &cols[5..])))?;
        let mut rows = Vec::new();
        for (i, line) in lines {
            let lineno = i + 1;
            if rows.len() >= MAX_DATASET_ROWS {
                return Err(format_error(lineno, format!("more than {MAX_DATASET_ROWS} rows")));
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != cols.len() {
                return Err(format_error(
                    lineno,
                    format!("{} fields, expected {}", fields.len(), cols.len()),
                ));
            }
            let int = |j: usize| {
                fields[j]
                    .parse::<usize>()
                    .map_err(|_| format_error(lineno, format!("{} {:?} is not an index", cols[j], fields[j])))
            };
            let float = |j: usize| match fields[j].parse::<f64>() {
                Ok(v) if !v.is_nan() => Ok(v),
                _ => Err(format_error(
                    lineno,
                    format!("{} {:?} is not a number", cols[j], fields[j]),
                )),
            };
            let nv = float(3)?;
            if !(0.0..=1.0).contains(&nv) {
                return Err(format_error(lineno, format!("nv {nv} outside [0, 1]")));
            }
            let feats = (5..cols.len()).map(float).collect::<Result<Vec<_>, _>>()?;
            if feats.iter().any(|v| !v.is_finite()) {
                return Err(format_error(lineno, "features must be finite"));
            }
            rows.push(DatasetRow {
                image_id: int(0)?,
                level: int(1)?,
                rep: int(2)?,
                nv,
                actual_snr_db: float(4)?,
                features: feats,
            });
        }
        Ok(Self {
            features,
            rows,
            skipped: Vec::new(),
        })
    }
}
