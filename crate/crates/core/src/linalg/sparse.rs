use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Rows per rayon task in matrix-vector products.
const ROW_CHUNK: usize = 4096;

/// Square matrix in compressed sparse row form.
///
/// Column indices are sorted within each row and explicit zeros are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    symmetric: bool,
}

impl SparseOperator {
    /// Build from per-row `(column, value)` lists. Duplicate columns are summed and
    /// exact zeros dropped.
    pub fn from_rows<I>(n: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<(usize, f64)>>,
    {
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        let mut count = 0;
        for mut row in rows {
            if count == n {
                return Err(Error::InvalidParameter(format!("more than {n} rows supplied")));
            }
            row.sort_by_key(|&(c, _)| c);
            let mut k = 0;
            while k < row.len() {
                let c = row[k].0;
                if c >= n {
                    return Err(Error::InvalidParameter(format!("column {c} out of range in row {count}")));
                }
                let mut v = 0.0;
                while k < row.len() && row[k].0 == c {
                    v += row[k].1;
                    k += 1;
                }
                if !v.is_finite() {
                    return Err(Error::NonFinite(count));
                }
                if v != 0.0 {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
            count += 1;
        }
        if count != n {
            return Err(Error::InvalidParameter(format!("expected {n} rows, got {count}")));
        }
        Ok(SparseOperator { n, row_ptr, col_idx, values, symmetric: false })
    }

    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut rows = vec![Vec::new(); n];
        for &(r, c, v) in triplets {
            if r >= n {
                return Err(Error::InvalidParameter(format!("row {r} out of range")));
            }
            rows[r].push((c, v));
        }
        Self::from_rows(n, rows)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_rows(n, (0..n).map(|i| vec![(i, 1.0)])).expect("identity is well formed")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.col_idx[a..b].iter().copied().zip(self.values[a..b].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        match self.col_idx[a..b].binary_search(&j) {
            Ok(k) => self.values[a + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Largest `|i − j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.n).flat_map(|i| self.row(i).map(move |(j, _)| i.abs_diff(j))).max().unwrap_or(0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Check the symmetry defect against `tol` and record the outcome.
    pub fn verify_symmetry(&mut self, tol: f64) -> Result<f64> {
        let defect = symmetry_defect(self);
        self.symmetric = defect <= tol;
        if self.symmetric {
            Ok(defect)
        } else {
            Err(Error::Asymmetric(defect))
        }
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        let row = |i: usize| -> f64 {
            let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
            self.col_idx[a..b].iter().zip(&self.values[a..b]).map(|(&j, &v)| v * x[j]).sum()
        };
        if self.n >= 2 * ROW_CHUNK {
            y.par_chunks_mut(ROW_CHUNK).enumerate().for_each(|(c, chunk)| {
                for (k, yi) in chunk.iter_mut().enumerate() {
                    *yi = row(c * ROW_CHUNK + k);
                }
            });
        } else {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = row(i);
            }
        }
    }

    /// `b − A x` accumulated with error-free product and sum transformations, so the
    /// result stays accurate when `A x` nearly cancels `b`.
    /// `b − A x` with compensated accumulation, accurate when `A x` nearly cancels `b`.
    pub fn residual_compensated(&self, x: &[f64], b: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        assert_eq!(b.len(), self.n);
        (0..self.n)
            .map(|i| compensated_dot(std::iter::once((1.0, b[i])).chain(self.row(i).map(|(j, v)| (-v, x[j])))))
            .collect()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    /// Coordinate-format dump, one `row col value` triplet per line.
    pub fn write_coordinate<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                writeln!(out, "{i} {j} {v:.16e}")?;
            }
        }
        Ok(())
    }
}

/// `Σ aᵢbᵢ` with error-free product and sum transformations: the result is as accurate
/// as if computed in twice the working precision, then rounded.
pub fn compensated_dot(terms: impl Iterator<Item = (f64, f64)>) -> f64 {
    let (mut s, mut c) = (0.0_f64, 0.0_f64);
    for (a, b) in terms {
        let p = a * b;
        let e = a.mul_add(b, -p);
        let t = s + p;
        let z = t - s;
        c += (s - (t - z)) + (p - z) + e;
        s = t;
    }
    s + c
}

/// `max |A_ij − A_ji| / max |A|` over stored entries (0 for the zero matrix).
pub fn symmetry_defect(a: &SparseOperator) -> f64 {
    let scale = a.max_abs();
    if scale == 0.0 {
        return 0.0;
    }
    let worst = (0..a.dim())
        .flat_map(|i| a.row(i).map(move |(j, v)| (i, j, v)))
        .map(|(i, j, v)| (v - a.get(j, i)).abs())
        .fold(0.0_f64, f64::max);
    worst / scale
}
