//! Datasets, black-box prediction vectors, index partitions, splits, and
//! feature scaling.
//!
//! Class labels are 1-based in every file format and 0-based in memory; the
//! loaders and writers in this module are the only place that mapping occurs.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Supported dataset file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    /// Header row, one label column, every other column real-valued.
    Csv,
    /// `<label> <idx>:<val> ...` with 1-based feature indices; absent
    /// indices are zero.
    Svmlight,
}

/// Which CSV column holds the class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    /// 0-based column index.
    Index(usize),
}

/// A labelled feature matrix.
///
/// `labels[i]` is the 0-based class of row `i`; externally classes are
/// `1..=num_classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Array2<f64>,
    labels: Vec<usize>,
    feature_names: Vec<String>,
    num_classes: usize,
    bias_column: Option<usize>,
}

impl Dataset {
    /// Builds a dataset from a feature matrix and 0-based labels.
    pub fn new(features: Array2<f64>, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        let (n, d) = features.dim();
        if n == 0 || d == 0 {
            return Err(Error::InvalidArgument(format!(
                "dataset must be non-empty, got {n} rows x {d} features"
            )));
        }
        if labels.len() != n {
            return Err(Error::Shape(format!(
                "{} labels for {n} rows",
                labels.len()
            )));
        }
        if num_classes < 2 {
            return Err(Error::InvalidArgument(format!(
                "classification needs at least 2 classes, got {num_classes}"
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&y| y >= num_classes) {
            return Err(Error::InvalidArgument(format!(
                "label {} outside 1..={num_classes}",
                bad + 1
            )));
        }
        let feature_names = (1..=d).map(|j| format!("f{j}")).collect();
        Ok(Dataset {
            features,
            labels,
            feature_names,
            num_classes,
            bias_column: None,
        })
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.dim() {
            return Err(Error::Shape(format!(
                "{} feature names for {} features",
                names.len(),
                self.dim()
            )));
        }
        self.feature_names = names;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Index of the constant-1 column appended by [`Dataset::append_bias`],
    /// if any.
    pub fn bias_column(&self) -> Option<usize> {
        self.bias_column
    }

    /// Raises the class count, e.g. when black-box predictions mention a
    /// class absent from this sample. Never shrinks.
    pub fn expand_classes(&mut self, num_classes: usize) {
        self.num_classes = self.num_classes.max(num_classes);
    }

    /// Returns a copy with a constant-1 column appended as the last feature.
    pub fn append_bias(&self) -> Result<Self> {
        if self.bias_column.is_some() {
            return Err(Error::InvalidArgument(
                "dataset already has a bias column".into(),
            ));
        }
        let (n, d) = self.features.dim();
        let mut features = Array2::<f64>::ones((n, d + 1));
        features.slice_mut(ndarray::s![.., ..d]).assign(&self.features);
        let mut feature_names = self.feature_names.clone();
        feature_names.push("bias".into());
        Ok(Dataset {
            features,
            labels: self.labels.clone(),
            feature_names,
            num_classes: self.num_classes,
            bias_column: Some(d),
        })
    }

    /// Pads with zero-valued trailing features up to `dim`. Only meaningful
    /// for sparse-format data where absent indices are zeros.
    pub fn pad_to_dim(&self, dim: usize) -> Result<Self> {
        let (n, d) = self.features.dim();
        if dim < d {
            return Err(Error::Shape(format!(
                "cannot pad {d} features down to {dim}"
            )));
        }
        if dim == d {
            return Ok(self.clone());
        }
        let mut features = Array2::<f64>::zeros((n, dim));
        features.slice_mut(ndarray::s![.., ..d]).assign(&self.features);
        let mut feature_names = self.feature_names.clone();
        feature_names.extend((d + 1..=dim).map(|j| format!("f{j}")));
        Ok(Dataset {
            features,
            labels: self.labels.clone(),
            feature_names,
            num_classes: self.num_classes,
            bias_column: self.bias_column,
        })
    }

    /// Row subset in the given order; class count and metadata carry over.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select(Axis(0), rows),
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            num_classes: self.num_classes,
            bias_column: self.bias_column,
        }
    }
}

/// Predictions of an arbitrary pre-trained classifier, the only interface to
/// any black-box. Entries are 0-based in memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlackboxPredictions {
    preds: Vec<usize>,
}

impl BlackboxPredictions {
    pub fn new(preds: Vec<usize>) -> Self {
        BlackboxPredictions { preds }
    }

    pub fn len(&self) -> usize {
        self.preds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.preds.is_empty()
    }

    pub fn preds(&self) -> &[usize] {
        &self.preds
    }

    /// Smallest class count covering every prediction.
    pub fn min_num_classes(&self) -> usize {
        self.preds.iter().max().map_or(0, |&m| m + 1)
    }

    pub fn select_rows(&self, rows: &[usize]) -> BlackboxPredictions {
        BlackboxPredictions {
            preds: rows.iter().map(|&i| self.preds[i]).collect(),
        }
    }
}

/// Per-class index sets separating rows the black-box predicts correctly
/// (`pos`) from those it does not (`neg`). The `2K` lists partition `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassPartition {
    pos: Vec<Vec<usize>>,
    neg: Vec<Vec<usize>>,
    n: usize,
}

impl ClassPartition {
    pub fn build(labels: &[usize], preds: &[usize], num_classes: usize) -> Result<Self> {
        if labels.len() != preds.len() {
            return Err(Error::Shape(format!(
                "{} labels vs {} black-box predictions",
                labels.len(),
                preds.len()
            )));
        }
        let mut pos = vec![Vec::new(); num_classes];
        let mut neg = vec![Vec::new(); num_classes];
        for (i, (&y, &p)) in labels.iter().zip(preds).enumerate() {
            if y >= num_classes {
                return Err(Error::InvalidArgument(format!(
                    "label {} at row {i} outside 1..={num_classes}",
                    y + 1
                )));
            }
            if p >= num_classes {
                return Err(Error::InvalidArgument(format!(
                    "black-box prediction {} at row {i} outside 1..={num_classes}",
                    p + 1
                )));
            }
            if p == y {
                pos[y].push(i);
            } else {
                neg[y].push(i);
            }
        }
        Ok(ClassPartition {
            pos,
            neg,
            n: labels.len(),
        })
    }

    pub fn num_classes(&self) -> usize {
        self.pos.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Rows of class `k` that the black-box also predicts as `k`.
    pub fn pos(&self, k: usize) -> &[usize] {
        &self.pos[k]
    }

    /// Rows of class `k` that the black-box mislabels.
    pub fn neg(&self, k: usize) -> &[usize] {
        &self.neg[k]
    }
}

/// Builds the per-class correctness partition for a dataset and aligned
/// black-box predictions.
pub fn partition_indices(ds: &Dataset, bb: &BlackboxPredictions) -> Result<ClassPartition> {
    ClassPartition::build(ds.labels(), bb.preds(), ds.num_classes())
}

/// Per-feature min/max collected on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl ScalingParams {
    pub fn len(&self) -> usize {
        self.min.len()
    }

    pub fn is_empty(&self) -> bool {
        self.min.is_empty()
    }
}

/// Maps each feature to `[0, 1]` via `(x - min) / (max - min)`; constant
/// features map to 0. A bias column, if present, is left untouched.
pub fn minmax_scale(ds: &Dataset) -> (Dataset, ScalingParams) {
    let d = ds.dim();
    let mut min = vec![f64::INFINITY; d];
    let mut max = vec![f64::NEG_INFINITY; d];
    for row in ds.features().rows() {
        for (j, &v) in row.iter().enumerate() {
            min[j] = min[j].min(v);
            max[j] = max[j].max(v);
        }
    }
    if let Some(b) = ds.bias_column() {
        min[b] = 0.0;
        max[b] = 1.0;
    }
    let params = ScalingParams { min, max };
    let scaled = apply_scale(ds, &params).expect("params built from this dataset");
    (scaled, params)
}

/// Applies previously collected scaling parameters; values outside the
/// training range land outside `[0, 1]`.
pub fn apply_scale(ds: &Dataset, params: &ScalingParams) -> Result<Dataset> {
    if params.len() != ds.dim() {
        return Err(Error::Shape(format!(
            "scaling params cover {} features, dataset has {}",
            params.len(),
            ds.dim()
        )));
    }
    let mut features = ds.features().clone();
    for (j, mut col) in features.columns_mut().into_iter().enumerate() {
        let (lo, hi) = (params.min[j], params.max[j]);
        let range = hi - lo;
        if range > 0.0 {
            col.mapv_inplace(|v| (v - lo) / range);
        } else {
            col.fill(0.0);
        }
    }
    let mut out = ds.clone();
    out.features = features;
    Ok(out)
}

/// How holdout rows are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitMode {
    #[default]
    Uniform,
    /// Per-class quotas, largest-remainder rounded to the global count.
    Stratified,
}

/// Splits rows into a train part and a `round(fraction * n)`-row validation
/// part. Black-box predictions travel with their rows; deterministic per
/// seed; both sides keep ascending row order.
pub fn holdout_split(
    ds: &Dataset,
    bb: &BlackboxPredictions,
    validation_fraction: f64,
    seed: u64,
    mode: SplitMode,
) -> Result<(
    (Dataset, BlackboxPredictions),
    (Dataset, BlackboxPredictions),
)> {
    let n = ds.n();
    if bb.len() != n {
        return Err(Error::Shape(format!(
            "{} black-box predictions for {n} rows",
            bb.len()
        )));
    }
    if !(validation_fraction > 0.0 && validation_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "validation fraction must lie in (0, 1), got {validation_fraction}"
        )));
    }
    let n_val = (validation_fraction * n as f64).round() as usize;
    if n_val == 0 || n_val >= n {
        return Err(Error::InvalidArgument(format!(
            "fraction {validation_fraction} of {n} rows leaves an empty side"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut val_rows: Vec<usize> = match mode {
        SplitMode::Uniform => {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            perm.truncate(n_val);
            perm
        }
        SplitMode::Stratified => stratified_rows(ds, n_val, &mut rng),
    };
    val_rows.sort_unstable();
    let mut in_val = vec![false; n];
    for &i in &val_rows {
        in_val[i] = true;
    }
    let train_rows: Vec<usize> = (0..n).filter(|&i| !in_val[i]).collect();

    Ok((
        (ds.select_rows(&train_rows), bb.select_rows(&train_rows)),
        (ds.select_rows(&val_rows), bb.select_rows(&val_rows)),
    ))
}

fn stratified_rows(ds: &Dataset, n_val: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let k = ds.num_classes();
    let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &y) in ds.labels().iter().enumerate() {
        per_class[y].push(i);
    }
    for rows in per_class.iter_mut() {
        rows.shuffle(rng);
    }
    // Largest-remainder allocation of the global validation quota.
    let n = ds.n() as f64;
    let mut quota: Vec<usize> = Vec::with_capacity(k);
    let mut remainders: Vec<(f64, usize)> = Vec::with_capacity(k);
    let mut assigned = 0usize;
    for (c, rows) in per_class.iter().enumerate() {
        let exact = n_val as f64 * rows.len() as f64 / n;
        let base = (exact.floor() as usize).min(rows.len());
        quota.push(base);
        assigned += base;
        remainders.push((exact - base as f64, c));
    }
    remainders.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut left = n_val.saturating_sub(assigned);
    for &(_, c) in remainders.iter().cycle() {
        if left == 0 {
            break;
        }
        if quota[c] < per_class[c].len() {
            quota[c] += 1;
            left -= 1;
        }
    }
    per_class
        .iter()
        .zip(&quota)
        .flat_map(|(rows, &q)| rows[..q].iter().copied())
        .collect()
}

fn internal_label(raw: i64) -> std::result::Result<usize, String> {
    if raw < 1 {
        Err(format!("label {raw} invalid: labels must start at 1"))
    } else {
        Ok(raw as usize - 1)
    }
}

/// Loads a dataset, inferring the class count as the largest observed label.
pub fn load_dataset(path: &Path, format: DataFormat, label_column: &LabelColumn) -> Result<Dataset> {
    match format {
        DataFormat::Csv => load_csv(path, label_column),
        DataFormat::Svmlight => load_svmlight(path),
    }
}

fn load_csv(path: &Path, label_column: &LabelColumn) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    let label_idx = match label_column {
        LabelColumn::Name(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::parse(path, 1, format!("no column named {name:?} in header")))?,
        LabelColumn::Index(i) => {
            if *i >= headers.len() {
                return Err(Error::parse(
                    path,
                    1,
                    format!("label column index {i} out of range for {} columns", headers.len()),
                ));
            }
            *i
        }
    };
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != label_idx)
        .map(|(_, h)| h.clone())
        .collect();
    let d = feature_names.len();
    if d == 0 {
        return Err(Error::parse(path, 1, "no feature columns besides the label"));
    }

    let mut rows: Vec<f64> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    let mut max_class = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != headers.len() {
            return Err(Error::parse(
                path,
                line,
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
        }
        for (j, field) in record.iter().enumerate() {
            if j == label_idx {
                let raw: i64 = field.parse().map_err(|_| {
                    Error::parse(path, line, format!("label {field:?} is not an integer"))
                })?;
                let y = internal_label(raw).map_err(|msg| Error::parse(path, line, msg))?;
                max_class = max_class.max(y + 1);
                labels.push(y);
            } else {
                let v: f64 = field.parse().map_err(|_| {
                    Error::parse(path, line, format!("feature {field:?} is not a number"))
                })?;
                if !v.is_finite() {
                    return Err(Error::parse(path, line, format!("non-finite feature {field:?}")));
                }
                rows.push(v);
            }
        }
    }
    if labels.is_empty() {
        return Err(Error::parse(path, 1, "no data rows"));
    }
    let features = Array2::from_shape_vec((labels.len(), d), rows)
        .expect("row-major buffer sized n*d");
    Dataset::new(features, labels, max_class)?.with_feature_names(feature_names)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = match e.position() {
        Some(p) => p.line() as usize,
        None => 0,
    };
    match e.kind() {
        csv::ErrorKind::Io(_) => Error::io(path, std::io::Error::other(e.to_string())),
        _ => Error::parse(path, line, e.to_string()),
    }
}

fn load_svmlight(path: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut labels: Vec<usize> = Vec::new();
    let mut sparse_rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut d = 0usize;
    let mut max_class = 0usize;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a first token");
        let raw: i64 = label_tok
            .strip_prefix('+')
            .unwrap_or(label_tok)
            .parse()
            .map_err(|_| {
                Error::parse(path, line_no, format!("label {label_tok:?} is not an integer"))
            })?;
        let y = internal_label(raw).map_err(|msg| Error::parse(path, line_no, msg))?;
        max_class = max_class.max(y + 1);
        labels.push(y);

        let mut entries: Vec<(usize, f64)> = Vec::new();
        for tok in tokens {
            let (idx_str, val_str) = tok.split_once(':').ok_or_else(|| {
                Error::parse(path, line_no, format!("expected idx:val, found {tok:?}"))
            })?;
            let fi: usize = idx_str.parse().map_err(|_| {
                Error::parse(path, line_no, format!("feature index {idx_str:?} is not an integer"))
            })?;
            if fi == 0 {
                return Err(Error::parse(path, line_no, "feature indices are 1-based"));
            }
            let v: f64 = val_str.parse().map_err(|_| {
                Error::parse(path, line_no, format!("feature value {val_str:?} is not a number"))
            })?;
            if !v.is_finite() {
                return Err(Error::parse(path, line_no, format!("non-finite feature {val_str:?}")));
            }
            if entries.iter().any(|&(e, _)| e == fi - 1) {
                return Err(Error::parse(path, line_no, format!("duplicate feature index {fi}")));
            }
            d = d.max(fi);
            entries.push((fi - 1, v));
        }
        sparse_rows.push(entries);
    }
    if labels.is_empty() {
        return Err(Error::parse(path, 1, "no data rows"));
    }
    if d == 0 {
        return Err(Error::parse(path, 1, "no feature indices in the whole file"));
    }
    let mut features = Array2::<f64>::zeros((labels.len(), d));
    for (i, entries) in sparse_rows.iter().enumerate() {
        for &(j, v) in entries {
            features[[i, j]] = v;
        }
    }
    Dataset::new(features, labels, max_class)
}

/// Reads a black-box prediction file: exactly `n` lines, one 1-based label
/// per line, row-aligned with the dataset it belongs to.
pub fn load_blackbox_predictions(path: &Path, n: usize) -> Result<BlackboxPredictions> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut preds = Vec::with_capacity(n);
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let tok = line.trim();
        if tok.is_empty() {
            return Err(Error::parse(path, line_no, "empty line"));
        }
        let raw: i64 = tok
            .parse()
            .map_err(|_| Error::parse(path, line_no, format!("prediction {tok:?} is not an integer")))?;
        let p = internal_label(raw)
            .map_err(|msg| Error::parse(path, line_no, format!("prediction invalid: {msg}")))?;
        preds.push(p);
    }
    if preds.len() != n {
        return Err(Error::Shape(format!(
            "{} has {} predictions, dataset has {n} rows",
            path.display(),
            preds.len()
        )));
    }
    Ok(BlackboxPredictions::new(preds))
}

/// Writes predictions in the standard format: one 1-based label per line.
pub fn save_blackbox_predictions(preds: &BlackboxPredictions, path: &Path) -> Result<()> {
    let mut out = String::with_capacity(preds.len() * 2);
    for &p in preds.preds() {
        out.push_str(&(p + 1).to_string());
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// SHA-256 of a file's bytes, hex-encoded; used for provenance records.
pub fn file_sha256(path: &Path) -> Result<String> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 8192];
    loop {
        let read = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if read == 0 {
            break;
        }
        hasher.update(&buf[..read]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Writes a dataset as CSV with feature columns first and the label column
/// (1-based) last.
pub fn save_csv(ds: &Dataset, path: &Path) -> Result<()> {
    let mut out = String::new();
    for name in ds.feature_names() {
        out.push_str(name);
        out.push(',');
    }
    out.push_str("label\n");
    for (row, &y) in ds.features().rows().into_iter().zip(ds.labels()) {
        for v in row.iter() {
            out.push_str(&format!("{v},"));
        }
        out.push_str(&format!("{}\n", y + 1));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Writes labels only, one 1-based label per line.
pub fn save_labels(ds: &Dataset, path: &Path) -> Result<()> {
    let mut out = String::with_capacity(ds.n() * 2);
    for &y in ds.labels() {
        out.push_str(&(y + 1).to_string());
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use std::io::Write;
    use std::path::PathBuf;

    fn write_tmp(content: &str) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.txt");
        let mut f = File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        (dir, path)
    }

    #[test]
    fn csv_basic() {
        let (_d, p) = write_tmp("a,b,label\n1.0,2.0,1\n3.0,4.0,1\n5.5,6.0,2\n");
        let ds = load_dataset(&p, DataFormat::Csv, &LabelColumn::Name("label".into())).unwrap();
        assert_eq!(ds.n(), 3);
        assert_eq!(ds.dim(), 2);
        assert_eq!(ds.num_classes(), 2);
        assert_eq!(ds.labels(), &[0, 0, 1]);
        assert_eq!(ds.feature_names(), &["a".to_string(), "b".to_string()]);
        assert_eq!(ds.features()[[2, 0]], 5.5);
    }

    #[test]
    fn csv_label_by_index() {
        let (_d, p) = write_tmp("y,x\n2,0.5\n1,0.25\n");
        let ds = load_dataset(&p, DataFormat::Csv, &LabelColumn::Index(0)).unwrap();
        assert_eq!(ds.labels(), &[1, 0]);
        assert_eq!(ds.features()[[0, 0]], 0.5);
    }

    #[test]
    fn csv_zero_label_rejected() {
        let (_d, p) = write_tmp("x,label\n1.0,0\n2.0,1\n");
        let err = load_dataset(&p, DataFormat::Csv, &LabelColumn::Name("label".into()))
            .unwrap_err()
            .to_string();
        assert!(err.contains("labels must start at 1"), "{err}");
        assert!(err.contains(":2:"), "line number missing: {err}");
    }

    #[test]
    fn csv_non_numeric_feature_reports_line() {
        let (_d, p) = write_tmp("x,label\n1.0,1\nfoo,2\n");
        let err = load_dataset(&p, DataFormat::Csv, &LabelColumn::Name("label".into()))
            .unwrap_err()
            .to_string();
        assert!(err.contains(":3:"), "{err}");
        assert!(err.contains("not a number"), "{err}");
    }

    #[test]
    fn csv_ragged_row_rejected() {
        let (_d, p) = write_tmp("x,y,label\n1.0,2.0,1\n1.0,2\n");
        assert!(load_dataset(&p, DataFormat::Csv, &LabelColumn::Name("label".into())).is_err());
    }

    #[test]
    fn csv_empty_rejected() {
        let (_d, p) = write_tmp("x,label\n");
        assert!(load_dataset(&p, DataFormat::Csv, &LabelColumn::Name("label".into())).is_err());
    }

    #[test]
    fn svmlight_infers_dim_and_fills_zeros() {
        let (_d, p) = write_tmp("2 1:0.5 3:1.0\n1 1:1.0\n");
        let ds = load_dataset(&p, DataFormat::Svmlight, &LabelColumn::Index(0)).unwrap();
        assert_eq!(ds.dim(), 3);
        assert_eq!(ds.labels(), &[1, 0]);
        assert_eq!(
            ds.features().row(0).to_vec(),
            vec![0.5, 0.0, 1.0],
        );
        assert_eq!(ds.features().row(1).to_vec(), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn svmlight_rejects_zero_index() {
        let (_d, p) = write_tmp("1 0:0.5\n2 1:1.0\n");
        let err = load_dataset(&p, DataFormat::Svmlight, &LabelColumn::Index(0))
            .unwrap_err()
            .to_string();
        assert!(err.contains("1-based"), "{err}");
    }

    #[test]
    fn blackbox_round_trip_and_mismatch() {
        let (_d, p) = write_tmp("1\n2\n1\n");
        let bb = load_blackbox_predictions(&p, 3).unwrap();
        assert_eq!(bb.preds(), &[0, 1, 0]);
        assert!(load_blackbox_predictions(&p, 2).is_err());
        let (_d2, p2) = write_tmp("1\n2\n");
        assert!(load_blackbox_predictions(&p2, 3).is_err());
    }

    #[test]
    fn blackbox_out_of_range_caught_at_partition() {
        let ds = Dataset::new(array![[1.0], [2.0]], vec![0, 1], 2).unwrap();
        let bb = BlackboxPredictions::new(vec![0, 4]);
        assert!(partition_indices(&ds, &bb).is_err());
    }

    #[test]
    fn partition_example() {
        // labels (1,1,2), black-box (1,2,2) in external form
        let part = ClassPartition::build(&[0, 0, 1], &[0, 1, 1], 2).unwrap();
        assert_eq!(part.pos(0), &[0]);
        assert_eq!(part.neg(0), &[1]);
        assert_eq!(part.pos(1), &[2]);
        assert_eq!(part.neg(1), &[] as &[usize]);
    }

    #[test]
    fn partition_identity_and_disagreement() {
        let labels = [0usize, 1, 2, 1];
        let part = ClassPartition::build(&labels, &labels, 3).unwrap();
        for k in 0..3 {
            assert!(part.neg(k).is_empty());
        }
        let flipped: Vec<usize> = labels.iter().map(|&y| (y + 1) % 3).collect();
        let part = ClassPartition::build(&labels, &flipped, 3).unwrap();
        for k in 0..3 {
            assert!(part.pos(k).is_empty());
        }
    }

    #[test]
    fn holdout_sizes_and_determinism() {
        let features = Array2::from_shape_fn((10, 2), |(i, j)| (i * 2 + j) as f64);
        let labels: Vec<usize> = (0..10).map(|i| i % 2).collect();
        let ds = Dataset::new(features, labels, 2).unwrap();
        let bb = BlackboxPredictions::new(vec![0; 10]);
        let (tr, va) = holdout_split(&ds, &bb, 0.2, 7, SplitMode::Uniform).unwrap();
        assert_eq!(tr.0.n(), 8);
        assert_eq!(va.0.n(), 2);
        assert_eq!(tr.1.len(), 8);
        let (tr2, va2) = holdout_split(&ds, &bb, 0.2, 7, SplitMode::Uniform).unwrap();
        assert_eq!(tr.0, tr2.0);
        assert_eq!(va.0, va2.0);
    }

    #[test]
    fn holdout_degenerate_rejected() {
        let ds = Dataset::new(array![[1.0], [2.0]], vec![0, 1], 2).unwrap();
        let one = Dataset::new(array![[1.0], [2.0]], vec![0, 1], 2).unwrap();
        let bb = BlackboxPredictions::new(vec![0, 0]);
        assert!(holdout_split(&ds, &bb, 0.0, 1, SplitMode::Uniform).is_err());
        assert!(holdout_split(&one, &bb, 0.2, 1, SplitMode::Uniform).is_err());
    }

    #[test]
    fn stratified_respects_quota() {
        let features = Array2::zeros((20, 1));
        let labels: Vec<usize> = (0..20).map(|i| usize::from(i >= 15)).collect();
        let ds = Dataset::new(features, labels, 2).unwrap();
        let bb = BlackboxPredictions::new(vec![0; 20]);
        let (_, (vds, _)) = holdout_split(&ds, &bb, 0.2, 3, SplitMode::Stratified).unwrap();
        assert_eq!(vds.n(), 4);
        let class1 = vds.labels().iter().filter(|&&y| y == 1).count();
        assert_eq!(class1, 1); // 25% of the validation rows, matching the data
    }

    #[test]
    fn scale_column_examples() {
        let ds = Dataset::new(array![[2.0, 3.0], [4.0, 3.0], [6.0, 3.0]], vec![0, 0, 1], 2).unwrap();
        let (scaled, params) = minmax_scale(&ds);
        assert_eq!(scaled.features().column(0).to_vec(), vec![0.0, 0.5, 1.0]);
        assert_eq!(scaled.features().column(1).to_vec(), vec![0.0, 0.0, 0.0]);
        let other = Dataset::new(array![[8.0, 1.0]], vec![0], 2).unwrap();
        let mapped = apply_scale(&other, &params).unwrap();
        assert_eq!(mapped.features()[[0, 0]], 1.5);
        assert_eq!(mapped.features()[[0, 1]], 0.0);
    }

    #[test]
    fn bias_column_survives_scaling() {
        let ds = Dataset::new(array![[2.0], [4.0]], vec![0, 1], 2).unwrap();
        let with_bias = ds.append_bias().unwrap();
        assert_eq!(with_bias.bias_column(), Some(1));
        assert_eq!(with_bias.feature_names()[1], "bias");
        let (scaled, _) = minmax_scale(&with_bias);
        assert_eq!(scaled.features().column(1).to_vec(), vec![1.0, 1.0]);
    }

    #[test]
    fn pad_to_dim_zero_fills() {
        let ds = Dataset::new(array![[1.0], [2.0]], vec![0, 1], 2).unwrap();
        let padded = ds.pad_to_dim(3).unwrap();
        assert_eq!(padded.dim(), 3);
        assert_eq!(padded.features().row(0).to_vec(), vec![1.0, 0.0, 0.0]);
        assert!(ds.pad_to_dim(0).is_err());
    }
}
