//! Sparse dataset container and svmlight/libsvm text ingestion.

use crate::{Error, Result, Vector};

/// One labelled sparse row: label in `{−1, +1}` and strictly increasing
/// `(index, value)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRow {
    pub label: f64,
    pub features: Vec<(usize, f64)>,
}

impl SparseRow {
    /// Sparse dot product against a dense vector.
    pub fn dot(&self, x: &Vector) -> f64 {
        self.features.iter().map(|&(j, v)| v * x[j]).sum()
    }

    /// Squared Euclidean norm of the feature vector.
    pub fn norm_squared(&self) -> f64 {
        self.features.iter().map(|&(_, v)| v * v).sum()
    }
}

/// A labelled sparse dataset in row-major form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseDataset {
    pub rows: Vec<SparseRow>,
    pub dim: usize,
    pub name: String,
}

/// Parse svmlight/libsvm sparse text: one row per line,
/// `label idx:val idx:val ...`.
///
/// Labels are coerced to `+1` when positive and `−1` otherwise. Blank lines
/// are skipped. The dimension is `1 + max index seen`. Indices must be
/// strictly increasing within a row; violations are reported with the
/// 1-based line number.
pub fn parse_sparse_text(text: &str) -> Result<SparseDataset> {
    let mut rows = Vec::new();
    let mut max_index = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a first token");
        let raw_label: f64 = label_tok
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad label token '{label_tok}'")))?;
        let label = if raw_label > 0.0 { 1.0 } else { -1.0 };

        let mut features: Vec<(usize, f64)> = Vec::new();
        for tok in tokens {
            let (idx_s, val_s) = tok
                .split_once(':')
                .ok_or_else(|| Error::parse(lineno, format!("malformed token '{tok}'")))?;
            let idx: usize = idx_s
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad feature index '{idx_s}'")))?;
            let val: f64 = val_s
                .parse()
                .map_err(|_| Error::parse(lineno, format!("non-numeric value '{val_s}'")))?;
            if let Some(&(prev, _)) = features.last() {
                if idx <= prev {
                    return Err(Error::parse(
                        lineno,
                        format!("indices not increasing ({prev} then {idx})"),
                    ));
                }
            }
            max_index = max_index.max(idx);
            features.push((idx, val));
        }
        rows.push(SparseRow { label, features });
    }
    if rows.is_empty() {
        return Err(Error::parse(0, "empty dataset".to_string()));
    }
    Ok(SparseDataset {
        rows,
        dim: max_index + 1,
        name: "sparse".to_string(),
    })
}
