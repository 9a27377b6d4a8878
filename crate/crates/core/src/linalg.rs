//! Dense linear algebra over `K` with valuation pivoting.
//!
//! Pivots are always chosen with minimal valuation in their column, so every
//! elimination multiplier is integral and no digits are lost beyond those
//! the inputs did not carry.

use crate::error::{Error, Result};
use crate::localfield::{GroundField, KElement};

#[derive(Clone, Debug)]
pub struct KMatrix {
    rows: usize,
    cols: usize,
    data: Vec<KElement>,
}

impl KMatrix {
    pub fn zeros(k: &GroundField, rows: usize, cols: usize) -> Self {
        KMatrix { rows, cols, data: vec![k.zero(); rows * cols] }
    }

    pub fn from_columns(k: &GroundField, columns: &[Vec<KElement>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        let mut m = KMatrix::zeros(k, rows, cols);
        for (c, col) in columns.iter().enumerate() {
            for (r, x) in col.iter().enumerate() {
                m.set(r, c, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &KElement {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: KElement) {
        self.data[r * self.cols + c] = x;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

/// Outcome of a determinant evaluation.
#[derive(Clone, Debug)]
pub enum Determinant {
    NonZero(KElement),
    /// All arithmetic was exact and the matrix is singular.
    ExactZero,
    /// A column vanished to the precision carried; the weakest precision seen.
    Undetermined { precision: Option<i64> },
}

fn pivot_row(k: &GroundField, m: &KMatrix, col: usize, from: usize) -> Option<usize> {
    (from..m.rows)
        .filter_map(|r| k.valuation(m.get(r, col)).map(|v| (v, r)))
        .min()
        .map(|(_, r)| r)
}

fn eliminate_below(k: &GroundField, m: &mut KMatrix, row: usize, col: usize) -> Result<()> {
    let inv = k.inv(m.get(row, col))?;
    for r in row + 1..m.rows {
        if m.get(r, col).is_exact_zero() {
            continue;
        }
        let factor = k.mul(m.get(r, col), &inv);
        for c in col..m.cols {
            if m.get(row, c).is_exact_zero() {
                continue;
            }
            let upd = k.sub(m.get(r, c), &k.mul(&factor, m.get(row, c)));
            m.set(r, c, upd);
        }
        m.set(r, col, k.zero());
    }
    Ok(())
}

pub fn determinant(k: &GroundField, m: &KMatrix) -> Determinant {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    let mut a = m.clone();
    let n = a.rows;
    let mut det = k.one();
    for col in 0..n {
        let Some(r) = pivot_row(k, &a, col, col) else {
            let all_exact = (col..n).all(|r| a.get(r, col).is_exact_zero());
            if all_exact {
                return Determinant::ExactZero;
            }
            let precision = (col..n).filter_map(|r| a.get(r, col).precision()).min();
            return Determinant::Undetermined { precision };
        };
        if r != col {
            a.swap_rows(r, col);
            det = k.neg(&det);
        }
        det = k.mul(&det, a.get(col, col));
        if eliminate_below(k, &mut a, col, col).is_err() {
            return Determinant::Undetermined { precision: a.get(col, col).precision() };
        }
    }
    Determinant::NonZero(det)
}

/// Solve `m·x = rhs` for `x`, where `m` has at least as many rows as
/// columns and full column rank. Extra rows must be consistent to precision.
pub fn solve(k: &GroundField, m: &KMatrix, rhs: &[KElement]) -> Result<Vec<KElement>> {
    assert_eq!(m.rows, rhs.len());
    assert!(m.rows >= m.cols, "underdetermined system");
    let mut a = KMatrix::zeros(k, m.rows, m.cols + 1);
    for r in 0..m.rows {
        for c in 0..m.cols {
            a.set(r, c, m.get(r, c).clone());
        }
        a.set(r, m.cols, rhs[r].clone());
    }
    let n = m.cols;
    for col in 0..n {
        let r = pivot_row(k, &a, col, col).ok_or_else(|| {
            let precision = (col..a.rows).filter_map(|r| a.get(r, col).precision()).min().unwrap_or(k.precision());
            Error::inconclusive(precision, format!("no pivot in column {col}"))
        })?;
        a.swap_rows(r, col);
        eliminate_below(k, &mut a, col, col)?;
    }
    for r in n..a.rows {
        if let Some(v) = k.valuation(a.get(r, n)) {
            return Err(Error::Structural(format!("inconsistent linear system: residual of valuation {v} in row {r}")));
        }
    }
    let mut x = vec![k.zero(); n];
    for col in (0..n).rev() {
        let mut acc = a.get(col, n).clone();
        for c in col + 1..n {
            if !a.get(col, c).is_exact_zero() {
                acc = k.sub(&acc, &k.mul(a.get(col, c), &x[c]));
            }
        }
        x[col] = k.div(&acc, a.get(col, col))?;
    }
    Ok(x)
}
