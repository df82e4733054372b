//! Ordinary least squares via Householder QR.

use crate::error::{Error, Result};

/// Columns whose orthogonal remainder falls below this fraction of their
/// own norm are treated as linearly dependent.
const RANK_TOLERANCE: f64 = 1e-10;

/// Dense column-major design matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows * columns.len());
        for col in columns {
            if col.len() != rows {
                return Err(Error::LengthMismatch {
                    left: rows,
                    right: col.len(),
                });
            }
            data.extend_from_slice(col);
        }
        Ok(Self {
            rows,
            cols: columns.len(),
            data,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = vec![0.0; rows.len() * cols];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::LengthMismatch {
                    left: cols,
                    right: row.len(),
                });
            }
            for (j, v) in row.iter().enumerate() {
                data[j * rows.len() + i] = *v;
            }
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds an `rows x cols` matrix by filling each column in place.
    pub fn with_columns(rows: usize, cols: usize, mut fill: impl FnMut(usize, &mut [f64])) -> Self {
        let mut data = vec![0.0; rows * cols];
        for (j, col) in data.chunks_mut(rows.max(1)).enumerate().take(cols) {
            fill(j, col);
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    /// Sum of squared residuals.
    pub ssr: f64,
    pub residuals: Vec<f64>,
}

struct Householder {
    /// Reflected design; R above the diagonal, Householder vectors below.
    packed: Vec<f64>,
    diag: Vec<f64>,
    /// `Q^T y`.
    qty: Vec<f64>,
}

fn householder(design: &Matrix, y: &[f64]) -> Result<Householder> {
    let n = design.rows;
    let k = design.cols;
    if y.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: y.len(),
        });
    }
    if k == 0 {
        return Err(Error::invalid("design matrix has no columns"));
    }
    if n <= k {
        return Err(Error::InsufficientData(format!(
            "least squares needs more observations than columns (n={n}, k={k})"
        )));
    }
    if design.data.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::invalid("design or response contains non-finite values"));
    }

    let mut a = design.data.clone();
    let mut qty = y.to_vec();
    let mut diag = vec![0.0; k];

    for j in 0..k {
        let (head, rest) = a.split_at_mut(j * n + n);
        let col = &mut head[j * n..];

        let col_norm = design.column(j).iter().map(|v| v * v).sum::<f64>().sqrt();
        let norm = col[j..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if col_norm == 0.0 || norm <= RANK_TOLERANCE * col_norm {
            return Err(Error::RankDeficient { column: j });
        }
        let alpha = if col[j] > 0.0 { -norm } else { norm };
        // v = x - alpha e1, stored in place of the column tail.
        col[j] -= alpha;
        let vnorm2: f64 = col[j..].iter().map(|v| v * v).sum();
        diag[j] = alpha;

        let reflect = |target: &mut [f64]| {
            let dot: f64 = col[j..].iter().zip(&target[j..]).map(|(v, t)| v * t).sum();
            let scale = 2.0 * dot / vnorm2;
            for (t, v) in target[j..].iter_mut().zip(&col[j..]) {
                *t -= scale * v;
            }
        };
        for other in rest.chunks_mut(n) {
            reflect(other);
        }
        reflect(&mut qty);
    }
    Ok(Householder { packed: a, diag, qty })
}

/// Least-squares fit of `y` on the columns of `design`.
pub fn ols_fit(design: &Matrix, y: &[f64]) -> Result<OlsFit> {
    let n = design.rows;
    let k = design.cols;
    let Householder { packed, diag, qty } = householder(design, y)?;

    let mut coefficients = vec![0.0; k];
    for j in (0..k).rev() {
        let mut s = qty[j];
        for c in j + 1..k {
            s -= packed[c * n + j] * coefficients[c];
        }
        coefficients[j] = s / diag[j];
    }

    let ssr = qty[k..].iter().map(|v| v * v).sum();
    let residuals = (0..n)
        .map(|i| {
            let fitted: f64 = (0..k).map(|j| design.get(i, j) * coefficients[j]).sum();
            y[i] - fitted
        })
        .collect();

    Ok(OlsFit {
        coefficients,
        ssr,
        residuals,
    })
}

/// SSR of the fits on the first `m` columns, for `m = 1..=k`.
///
/// One factorization serves every nested prefix model, and the path is
/// non-increasing by construction.
pub fn ssr_path(design: &Matrix, y: &[f64]) -> Result<Vec<f64>> {
    let k = design.cols;
    let qr = householder(design, y)?;
    let mut tail: f64 = qr.qty[k..].iter().map(|v| v * v).sum();
    let mut path = vec![0.0; k];
    for m in (1..=k).rev() {
        path[m - 1] = tail;
        tail += qr.qty[m - 1] * qr.qty[m - 1];
    }
    Ok(path)
}
