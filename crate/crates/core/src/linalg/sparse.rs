//! Compressed sparse row storage for superoperators.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::dd::ComplexDd;
use super::lu::Matrix;

/// Collects `(row, col, value)` entries; duplicates are summed on build.
#[derive(Debug, Clone, Default)]
pub struct TripletBuilder {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl TripletBuilder {
    pub fn new(rows: usize, cols: usize) -> Self {
        TripletBuilder {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, i: usize, j: usize, v: Complex64) {
        debug_assert!(i < self.rows && j < self.cols);
        if v.re != 0.0 || v.im != 0.0 {
            self.entries.push((i, j, v));
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn build(mut self) -> CsrMatrix {
        self.entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut indptr = vec![0usize; self.rows + 1];
        let mut indices = Vec::with_capacity(self.entries.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in self.entries {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(j);
                values.push(v);
                indptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..self.rows {
            indptr[i + 1] += indptr[i];
        }
        CsrMatrix {
            rows: self.rows,
            cols: self.cols,
            indptr,
            indices,
            values,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<Complex64>,
}

impl CsrMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates over the stored entries of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    /// `b - A x` accumulated in double-double.
    pub fn residual_dd(&self, b: &[Complex64], x: &[ComplexDd]) -> Vec<ComplexDd> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = ComplexDd::from(b[i]);
                for (j, v) in self.row(i) {
                    acc = acc - x[j].mul_c64(v);
                }
                acc
            })
            .collect()
    }

    /// Dense copy; only sensible for square matrices.
    pub fn to_dense(&self) -> Matrix {
        assert_eq!(self.rows, self.cols);
        let mut m = Matrix::zeros(self.rows);
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                m[(i, j)] += v;
            }
        }
        m
    }

    /// Returns a copy with row `i` replaced by the given entries.
    pub fn with_row(&self, i: usize, entries: &[(usize, Complex64)]) -> CsrMatrix {
        let mut tb = TripletBuilder::new(self.rows, self.cols);
        for r in 0..self.rows {
            if r == i {
                for &(j, v) in entries {
                    tb.push(r, j, v);
                }
            } else {
                for (j, v) in self.row(r) {
                    tb.push(r, j, v);
                }
            }
        }
        tb.build()
    }
}
