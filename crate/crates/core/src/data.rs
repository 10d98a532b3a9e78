//! Dataset generation, loading, partitioning and covariance assembly.
//!
//! Samples are stored row-major as sample x feature; per-client covariances
//! are unnormalized Gram matrices A_i = X_i^T X_i over the client's rows.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use ndarray::{Array2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::{derive_rng, stream};

/// A sample-by-feature matrix with provenance.
#[derive(Debug, Clone)]
pub struct DataMatrix {
    values: Array2<f64>,
    source: String,
}

impl DataMatrix {
    pub fn new(values: Array2<f64>, source: impl Into<String>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::InvalidConfig("data matrix must be non-empty".into()));
        }
        if !crate::linalg::is_finite(&values.view()) {
            return Err(Error::NonFinite("data matrix"));
        }
        Ok(DataMatrix {
            values,
            source: source.into(),
        })
    }

    pub fn samples(&self) -> usize {
        self.values.nrows()
    }

    pub fn features(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Subtracts the per-feature mean in place.
    pub fn center(&mut self) {
        let means = self.values.mean_axis(Axis(0)).expect("non-empty");
        for mut row in self.values.rows_mut() {
            row -= &means;
        }
    }

    /// Centers then scales each feature to unit variance in place.
    /// Constant features are left centered.
    pub fn standardize(&mut self) {
        self.center();
        let p = self.samples() as f64;
        for mut col in self.values.columns_mut() {
            let std = (col.iter().map(|v| v * v).sum::<f64>() / p).sqrt();
            if std > 1e-12 {
                col /= std;
            }
        }
    }

    /// Rows selected by index, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> DataMatrix {
        let d = self.features();
        let mut out = Array2::zeros((rows.len(), d));
        for (dst, &src) in rows.iter().enumerate() {
            out.row_mut(dst).assign(&self.values.row(src));
        }
        DataMatrix {
            values: out,
            source: self.source.clone(),
        }
    }
}

/// Assignment of sample rows to clients: a row permutation plus contiguous
/// near-equal blocks over the permuted order.
#[derive(Debug, Clone)]
pub struct Partition {
    permutation: Vec<usize>,
    ranges: Vec<std::ops::Range<usize>>,
}

impl Partition {
    pub fn num_clients(&self) -> usize {
        self.ranges.len()
    }

    pub fn client_size(&self, i: usize) -> usize {
        self.ranges[i].len()
    }

    /// Row indices (into the original matrix) owned by client `i`.
    pub fn client_rows(&self, i: usize) -> Vec<usize> {
        self.ranges[i].clone().map(|j| self.permutation[j]).collect()
    }
}

/// i.i.d. standard normal entries from a seeded generator.
pub fn gen_gaussian(p: usize, d: usize, seed: u64) -> Result<DataMatrix> {
    if p == 0 || d == 0 {
        return Err(Error::InvalidConfig("p and d must be at least 1".into()));
    }
    let mut rng = derive_rng(seed, &[stream::DATA]);
    let values = Array2::from_shape_simple_fn((p, d), || rng.sample(StandardNormal));
    DataMatrix::new(values, format!("gaussian(p={},d={},seed={})", p, d, seed))
}

/// Splits `p` rows into `n` near-equal contiguous blocks, optionally after a
/// seeded shuffle of the row order. Sizes differ by at most one.
pub fn partition_equal(p: usize, n: usize, shuffle_seed: Option<u64>) -> Result<Partition> {
    if n == 0 || n > p {
        return Err(Error::InvalidConfig(format!(
            "cannot split {} rows into {} clients",
            p, n
        )));
    }
    let mut permutation: Vec<usize> = (0..p).collect();
    if let Some(seed) = shuffle_seed {
        let mut rng = derive_rng(seed, &[stream::PARTITION]);
        // Fisher-Yates
        for i in (1..p).rev() {
            let j = rng.gen_range(0..=i);
            permutation.swap(i, j);
        }
    }
    let base = p / n;
    let extra = p % n;
    let mut ranges = Vec::with_capacity(n);
    let mut start = 0;
    for i in 0..n {
        let len = base + usize::from(i < extra);
        ranges.push(start..start + len);
        start += len;
    }
    Ok(Partition { permutation, ranges })
}

/// Gram matrix of the features over the block's rows: A = X^T X.
/// With `normalize` the result is divided by the sample count.
pub fn covariance(block: &DataMatrix, normalize: bool) -> Array2<f64> {
    let mut a = block.values.t().dot(&block.values);
    // enforce exact symmetry against accumulation-order noise
    a = crate::linalg::sym(&a);
    if normalize {
        a /= block.samples() as f64;
    }
    a
}

/// Loads a rectangular numeric CSV, optionally skipping a header row and
/// dropping a label column.
pub fn load_csv(path: &Path, has_header: bool, label_column: Option<usize>) -> Result<DataMatrix> {
    let display = path.display().to_string();
    let file = File::open(path).map_err(|e| Error::Io {
        path: display.clone(),
        source: e,
    })?;
    let reader = BufReader::new(file);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Io {
            path: display.clone(),
            source: e,
        })?;
        if idx == 0 && has_header {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        match width {
            None => width = Some(cells.len()),
            Some(w) if w != cells.len() => {
                return Err(Error::Parse {
                    path: display,
                    row: idx + 1,
                    col: 1,
                    message: format!("ragged row: expected {} cells, found {}", w, cells.len()),
                })
            }
            _ => {}
        }
        let mut row = Vec::with_capacity(cells.len());
        for (col, cell) in cells.iter().enumerate() {
            if Some(col) == label_column {
                continue;
            }
            let value: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                path: display.clone(),
                row: idx + 1,
                col: col + 1,
                message: format!("not a number: {:?}", cell.trim()),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    path: display.clone(),
                    row: idx + 1,
                    col: col + 1,
                    message: "non-finite value".into(),
                });
            }
            row.push(value);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Format {
            path: display,
            message: "no data rows".into(),
        });
    }
    let d = rows[0].len();
    let mut values = Array2::zeros((rows.len(), d));
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            values[[i, j]] = v;
        }
    }
    DataMatrix::new(values, display)
}

/// Loads an IDX3 image file (big-endian magic 0x00000803, then three u32
/// dimensions, then unsigned bytes). Pixels are scaled into [0, 1] and
/// images flattened to rows.
pub fn load_idx(path: &Path) -> Result<DataMatrix> {
    let display = path.display().to_string();
    let mut file = File::open(path).map_err(|e| Error::Io {
        path: display.clone(),
        source: e,
    })?;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes).map_err(|e| Error::Io {
        path: display.clone(),
        source: e,
    })?;
    let read_u32 = |offset: usize| -> Result<u32> {
        bytes
            .get(offset..offset + 4)
            .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
            .ok_or_else(|| Error::Format {
                path: display.clone(),
                message: "truncated header".into(),
            })
    };
    let magic = read_u32(0)?;
    if magic != 0x0000_0803 {
        return Err(Error::Format {
            path: display,
            message: format!("bad magic 0x{:08x}, expected 0x00000803", magic),
        });
    }
    let count = read_u32(4)? as usize;
    let rows = read_u32(8)? as usize;
    let cols = read_u32(12)? as usize;
    let pixels = count * rows * cols;
    let payload = bytes.get(16..16 + pixels).ok_or_else(|| Error::Format {
        path: display.clone(),
        message: format!(
            "truncated payload: need {} pixel bytes, found {}",
            pixels,
            bytes.len().saturating_sub(16)
        ),
    })?;
    let d = rows * cols;
    let mut values = Array2::zeros((count, d));
    for i in 0..count {
        for j in 0..d {
            values[[i, j]] = payload[i * d + j] as f64 / 255.0;
        }
    }
    DataMatrix::new(values, display)
}
