//! CSV ingestion, min-max scaling, seeded 70/10/20 splitting and the
//! synthetic regression sets used for desk-scale runs.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Matrix, RandomStream};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnRef {
    Index(usize),
    Name(String),
}

impl std::fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ColumnRef::Index(i) => write!(f, "#{i}"),
            ColumnRef::Name(n) => f.write_str(n),
        }
    }
}

fn default_true() -> bool {
    true
}

fn default_delimiter() -> char {
    ','
}

/// Describes a local CSV file. Stored as TOML:
///
/// ```toml
/// csv_path = "ccpp.csv"
/// target_column = "PE"
/// feature_columns = ["AT", "V", "AP", "RH"]   # empty or absent: every other column
/// has_header = true
/// delimiter = ","
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub csv_path: PathBuf,
    pub target_column: ColumnRef,
    #[serde(default)]
    pub feature_columns: Vec<ColumnRef>,
    #[serde(default = "default_true")]
    pub has_header: bool,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
}

impl DatasetManifest {
    /// Reads a manifest; a relative `csv_path` is taken relative to the
    /// manifest's directory.
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut m: DatasetManifest =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if m.csv_path.is_relative() {
            if let Some(dir) = path.parent() {
                m.csv_path = dir.join(&m.csv_path);
            }
        }
        Ok(m)
    }
}

pub fn load_csv(manifest: &DatasetManifest) -> Result<(Matrix, Vec<f64>)> {
    let path = &manifest.csv_path;
    let csv_err = |message: String| Error::Csv {
        path: path.clone(),
        message,
    };
    if !manifest.delimiter.is_ascii() {
        return Err(Error::Config(format!(
            "delimiter {:?} is not ASCII",
            manifest.delimiter
        )));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(manifest.has_header)
        .delimiter(manifest.delimiter as u8)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::io(path, std::io::Error::other(e.to_string())),
            _ => csv_err(e.to_string()),
        })?;

    let headers: Option<Vec<String>> = if manifest.has_header {
        let h = reader.headers().map_err(|e| csv_err(e.to_string()))?;
        Some(h.iter().map(|s| s.trim().to_string()).collect())
    } else {
        None
    };
    let mut by_name: HashMap<&str, usize> = HashMap::new();
    if let Some(h) = &headers {
        for (i, name) in h.iter().enumerate() {
            if by_name.insert(name.as_str(), i).is_some() {
                return Err(csv_err(format!(
                    "duplicate header name '{name}' makes column selection ambiguous"
                )));
            }
        }
    }
    let width = match &headers {
        Some(h) => h.len(),
        None => {
            // peek at the first record for the column count
            let mut probe = csv::ReaderBuilder::new()
                .has_headers(false)
                .delimiter(manifest.delimiter as u8)
                .from_path(path)
                .map_err(|e| csv_err(e.to_string()))?;
            let mut rec = csv::StringRecord::new();
            probe
                .read_record(&mut rec)
                .map_err(|e| csv_err(e.to_string()))?;
            rec.len()
        }
    };
    let resolve = |c: &ColumnRef| -> Result<usize> {
        match c {
            ColumnRef::Index(i) if *i < width => Ok(*i),
            ColumnRef::Index(i) => Err(csv_err(format!(
                "column index {i} out of range ({width} columns)"
            ))),
            ColumnRef::Name(n) => match &headers {
                None => Err(Error::Config(format!(
                    "column '{n}' selected by name but the file has no header"
                ))),
                Some(_) => by_name
                    .get(n.as_str())
                    .copied()
                    .ok_or_else(|| csv_err(format!("missing column '{n}'"))),
            },
        }
    };
    let target = resolve(&manifest.target_column)?;
    let features: Vec<usize> = if manifest.feature_columns.is_empty() {
        (0..width).filter(|&i| i != target).collect()
    } else {
        manifest
            .feature_columns
            .iter()
            .map(resolve)
            .collect::<Result<_>>()?
    };
    if features.is_empty() {
        return Err(Error::Config(
            "at least one feature column is required".into(),
        ));
    }
    if features.contains(&target) {
        return Err(Error::Config(format!(
            "target column {} is also selected as a feature",
            manifest.target_column
        )));
    }
    let col_name = |i: usize| {
        headers
            .as_ref()
            .map_or_else(|| format!("#{i}"), |h| h[i].clone())
    };

    let mut data = Vec::new();
    let mut y = Vec::new();
    let parse = |rec: &csv::StringRecord, row: usize, i: usize| -> Result<f64> {
        let raw = rec.get(i).unwrap_or("").trim();
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Error::Parse {
                row,
                column: col_name(i),
                value: raw.to_string(),
            }),
        }
    };
    for (k, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(e.to_string()))?;
        let row = k + 1;
        for &i in &features {
            data.push(parse(&rec, row, i)?);
        }
        y.push(parse(&rec, row, target)?);
    }
    let x = Matrix::from_vec(y.len(), features.len(), data)?;
    Ok((x, y))
}

/// Per-column min/max fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub feature_min: Vec<f64>,
    pub feature_max: Vec<f64>,
    pub target_min: f64,
    pub target_max: f64,
}

fn min_max(v: impl Iterator<Item = f64>) -> (f64, f64) {
    v.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    })
}

impl Scaler {
    pub fn fit(x: &Matrix, y: &[f64]) -> Result<Self> {
        let mut feature_min = Vec::with_capacity(x.cols());
        let mut feature_max = Vec::with_capacity(x.cols());
        for f in 0..x.cols() {
            let (lo, hi) = min_max(x.row_iter().map(|r| r[f]));
            if !(hi > lo) {
                return Err(Error::ConstantColumn(format!("feature {f}")));
            }
            feature_min.push(lo);
            feature_max.push(hi);
        }
        let (target_min, target_max) = min_max(y.iter().copied());
        if !(target_max > target_min) {
            return Err(Error::ConstantColumn("target".into()));
        }
        Ok(Scaler {
            feature_min,
            feature_max,
            target_min,
            target_max,
        })
    }

    pub fn transform_x(&self, x: &Matrix) -> Matrix {
        let mut out = x.clone();
        for t in 0..out.rows() {
            for (f, v) in out.row_mut(t).iter_mut().enumerate() {
                *v = (*v - self.feature_min[f]) / (self.feature_max[f] - self.feature_min[f]);
            }
        }
        out
    }

    pub fn inverse_x(&self, x: &Matrix) -> Matrix {
        let mut out = x.clone();
        for t in 0..out.rows() {
            for (f, v) in out.row_mut(t).iter_mut().enumerate() {
                *v = *v * (self.feature_max[f] - self.feature_min[f]) + self.feature_min[f];
            }
        }
        out
    }

    pub fn transform_y(&self, y: &[f64]) -> Vec<f64> {
        let span = self.target_max - self.target_min;
        y.iter().map(|v| (v - self.target_min) / span).collect()
    }

    pub fn inverse_y(&self, y: &[f64]) -> Vec<f64> {
        let span = self.target_max - self.target_min;
        y.iter().map(|v| v * span + self.target_min).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub x_train: Matrix,
    pub y_train: Vec<f64>,
    pub x_val: Matrix,
    pub y_val: Vec<f64>,
    pub x_test: Matrix,
    pub y_test: Vec<f64>,
    pub scaler: Scaler,
    /// Shuffled row order: train rows first, then validation, then test.
    pub permutation: Vec<usize>,
}

/// Partition sizes: `floor(train·N)`, `floor(val·N)`, remainder.
pub fn split_sizes(n: usize, fractions: (f64, f64, f64)) -> (usize, usize, usize) {
    // the nudge keeps 0.7 * 100 from flooring to 69
    let take = |f: f64| ((f * n as f64) + 1e-9).floor() as usize;
    let n_train = take(fractions.0).min(n);
    let n_val = take(fractions.1).min(n - n_train);
    (n_train, n_val, n - n_train - n_val)
}

/// Seeded shuffle, split, and min-max scaling fitted on the training rows.
pub fn split_scale(
    x: &Matrix,
    y: &[f64],
    fractions: (f64, f64, f64),
    seed: u64,
) -> Result<DatasetSplit> {
    let n = x.rows();
    if y.len() != n {
        return Err(Error::Dimension(format!(
            "{n} rows but {} targets",
            y.len()
        )));
    }
    if n < 10 {
        return Err(Error::InsufficientData(format!(
            "split needs at least 10 rows, got {n}"
        )));
    }
    let (a, b, c) = fractions;
    if a <= 0.0 || b < 0.0 || c < 0.0 || (a + b + c - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "split fractions {fractions:?} must be non-negative and sum to 1"
        )));
    }
    let (n_train, n_val, _) = split_sizes(n, fractions);
    let mut perm: Vec<usize> = (0..n).collect();
    RandomStream::new(seed).shuffle(&mut perm);
    let (tr, rest) = perm.split_at(n_train);
    let (va, te) = rest.split_at(n_val);
    let pick = |idx: &[usize]| -> Vec<f64> { idx.iter().map(|&i| y[i]).collect() };

    let raw_train = x.select_rows(tr);
    let y_train_raw = pick(tr);
    let scaler = Scaler::fit(&raw_train, &y_train_raw)?;
    Ok(DatasetSplit {
        x_train: scaler.transform_x(&raw_train),
        y_train: scaler.transform_y(&y_train_raw),
        x_val: scaler.transform_x(&x.select_rows(va)),
        y_val: scaler.transform_y(&pick(va)),
        x_test: scaler.transform_x(&x.select_rows(te)),
        y_test: scaler.transform_y(&pick(te)),
        scaler,
        permutation: perm,
    })
}

fn sinc(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else {
        let a = std::f64::consts::PI * u;
        a.sin() / a
    }
}

/// Deterministic synthetic regression sets.
///
/// - `two_blob`: two discs of radius 0.05 around (0.2, 0.2) and (0.8, 0.8),
///   `n/2` points each (first half, second half); `y = x₁ + x₂`.
/// - `sinc2d`: `x ~ U[−3, 3]²`, `y = sinc(x₁)·sinc(x₂)` with
///   `sinc(u) = sin(πu)/(πu)` and `sinc(0) = 1`.
/// - `friedman`: `x ~ U[0, 1]⁵`,
///   `y = 10 sin(πx₁x₂) + 20(x₃ − 0.5)² + 10x₄ + 5x₅`.
///
/// Every target gets `noise · N(0, 1)` added. Each sample draws its
/// features then one normal, so the inputs do not depend on `noise`.
pub fn synth_regression(name: &str, n: usize, noise: f64, seed: u64) -> Result<(Matrix, Vec<f64>)> {
    let kind = name.to_ascii_lowercase();
    let width = match kind.as_str() {
        "two_blob" => 2,
        "sinc2d" => 2,
        "friedman" => 5,
        _ => return Err(Error::UnknownDataset(name.to_string())),
    };
    if n < 50 {
        return Err(Error::InsufficientData(format!(
            "synthetic sets need n >= 50, got {n}"
        )));
    }
    let mut rng = RandomStream::new(seed);
    let mut data = Vec::with_capacity(n * width);
    let mut y = Vec::with_capacity(n);
    for t in 0..n {
        let (row, clean): (Vec<f64>, f64) = match kind.as_str() {
            "two_blob" => {
                let c = if t < n / 2 { 0.2 } else { 0.8 };
                let r = 0.05 * rng.next_f64().sqrt();
                let th = std::f64::consts::TAU * rng.next_f64();
                let p = vec![c + r * th.cos(), c + r * th.sin()];
                let v = p[0] + p[1];
                (p, v)
            }
            "sinc2d" => {
                let p = vec![rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)];
                let v = sinc(p[0]) * sinc(p[1]);
                (p, v)
            }
            _ => {
                let p: Vec<f64> = (0..5).map(|_| rng.next_f64()).collect();
                let v = 10.0 * (std::f64::consts::PI * p[0] * p[1]).sin()
                    + 20.0 * (p[2] - 0.5).powi(2)
                    + 10.0 * p[3]
                    + 5.0 * p[4];
                (p, v)
            }
        };
        let eps = rng.normal();
        data.extend(row);
        y.push(clean + noise * eps);
    }
    Ok((Matrix::from_vec(n, width, data)?, y))
}
