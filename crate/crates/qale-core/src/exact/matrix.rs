//! Matrices over Q(zeta_m) with exact Gauss-Jordan elimination.
//!
//! Row vectors are the working currency for subspaces: a subspace is stored
//! as the reduced row echelon basis of its row space, which is canonical, so
//! two matrices span the same subspace iff their RREF forms are equal.

use std::fmt;

use num::Integer;

use super::cyclotomic::CycNumber;
use super::{Rational, MAX_CYCLOTOMIC_ORDER, MAX_MATRIX_DIM};
use crate::error::{QaleError, Result};

/// Result of reduced row echelon elimination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: CycMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// A rows x cols matrix with all entries promoted to one cyclotomic order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycMatrix {
    rows: usize,
    cols: usize,
    order: usize,
    entries: Vec<CycNumber>,
}

impl CycMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<CycNumber>) -> Result<Self> {
        if rows > MAX_MATRIX_DIM || cols > MAX_MATRIX_DIM {
            return Err(QaleError::MatrixTooLarge { rows, cols });
        }
        if entries.len() != rows * cols {
            return Err(QaleError::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        let mut order = 1usize;
        for e in &entries {
            order = order.lcm(&e.order());
        }
        if order > MAX_CYCLOTOMIC_ORDER {
            return Err(QaleError::OrderTooLarge(order));
        }
        let entries = entries.into_iter().map(|e| e.promote(order)).collect();
        Ok(CycMatrix {
            rows,
            cols,
            order,
            entries,
        })
    }

    /// Constructor for derived linear systems whose shapes may exceed the
    /// public size guard (e.g. the Lambda^2 invariance system). Panics on an
    /// entry-count mismatch.
    pub(crate) fn new_internal(rows: usize, cols: usize, entries: Vec<CycNumber>) -> Self {
        assert_eq!(entries.len(), rows * cols);
        let mut order = 1usize;
        for e in &entries {
            order = order.lcm(&e.order());
        }
        let entries = entries.into_iter().map(|e| e.promote(order)).collect();
        CycMatrix {
            rows,
            cols,
            order,
            entries,
        }
    }

    /// Promote to the lcm of the current order and `order`.
    pub fn promote_to_lcm(&self, order: usize) -> CycMatrix {
        let target = self.order.lcm(&order);
        self.promote(target)
    }

    pub fn from_rationals(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        Self::new(
            rows,
            cols,
            entries
                .into_iter()
                .map(|r| CycNumber::from_rational(1, r))
                .collect(),
        )
    }

    pub fn from_integers(rows: usize, cols: usize, entries: &[i64]) -> Result<Self> {
        Self::from_rationals(rows, cols, entries.iter().map(|&n| super::rat(n)).collect())
    }

    pub fn identity(n: usize, order: usize) -> Result<Self> {
        let mut entries = vec![CycNumber::zero(order); n * n];
        for i in 0..n {
            entries[i * n + i] = CycNumber::one(order);
        }
        Self::new(n, n, entries)
    }

    pub fn zero(rows: usize, cols: usize, order: usize) -> Result<Self> {
        Self::new(rows, cols, vec![CycNumber::zero(order); rows * cols])
    }

    /// Diagonal matrix from the given entries.
    pub fn diagonal(diag: Vec<CycNumber>) -> Result<Self> {
        let n = diag.len();
        let order = diag.iter().fold(1usize, |acc, e| acc.lcm(&e.order()));
        let mut entries = vec![CycNumber::zero(order.max(1)); n * n];
        for (i, d) in diag.into_iter().enumerate() {
            entries[i * n + i] = d;
        }
        Self::new(n, n, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entry(&self, r: usize, c: usize) -> &CycNumber {
        &self.entries[r * self.cols + c]
    }

    pub fn entries(&self) -> &[CycNumber] {
        &self.entries
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.entry(i, j);
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    /// Promote all entries to a common multiple order with `other`, so the
    /// two share representations (needed before Eq-based dedup).
    pub fn promote(&self, order: usize) -> Self {
        assert!(order.is_multiple_of(self.order));
        CycMatrix {
            rows: self.rows,
            cols: self.cols,
            order,
            entries: self.entries.iter().map(|e| e.promote(order)).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                entries.push(self.entry(r, c).clone());
            }
        }
        CycMatrix {
            rows: self.cols,
            cols: self.rows,
            order: self.order,
            entries,
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut t = self.transpose();
        t.entries = t.entries.into_iter().map(|e| e.conj()).collect();
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let order = self.order.lcm(&other.order);
        let a = self.promote(order);
        let b = other.promote(order);
        let mut entries = vec![CycNumber::zero(order); a.rows * b.cols];
        for i in 0..a.rows {
            for k in 0..a.cols {
                let aik = a.entry(i, k);
                if aik.is_zero() {
                    continue;
                }
                for j in 0..b.cols {
                    let bkj = b.entry(k, j);
                    if bkj.is_zero() {
                        continue;
                    }
                    let idx = i * b.cols + j;
                    entries[idx] = &entries[idx] + &(aik * bkj);
                }
            }
        }
        CycMatrix {
            rows: a.rows,
            cols: b.cols,
            order,
            entries,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let order = self.order.lcm(&other.order);
        let a = self.promote(order);
        let b = other.promote(order);
        let entries = a
            .entries
            .iter()
            .zip(b.entries.iter())
            .map(|(x, y)| x + y)
            .collect();
        CycMatrix {
            rows: self.rows,
            cols: self.cols,
            order,
            entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let order = self.order.lcm(&other.order);
        let a = self.promote(order);
        let b = other.promote(order);
        let entries = a
            .entries
            .iter()
            .zip(b.entries.iter())
            .map(|(x, y)| x - y)
            .collect();
        CycMatrix {
            rows: self.rows,
            cols: self.cols,
            order,
            entries,
        }
    }

    pub fn scale(&self, s: &CycNumber) -> Self {
        let order = self.order.lcm(&s.order());
        let a = self.promote(order);
        let sc = s.promote(order);
        CycMatrix {
            rows: self.rows,
            cols: self.cols,
            order,
            entries: a.entries.iter().map(|e| e * &sc).collect(),
        }
    }

    /// Reduced row echelon form. Pivoting is deterministic: scan columns
    /// left to right, take the topmost nonzero entry (exact arithmetic needs
    /// no numerical pivoting).
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| !m.entry(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, pr);
            let inv = m
                .entry(row, col)
                .inverse()
                .expect("pivot is nonzero by choice");
            m.scale_row(row, &inv);
            for r in 0..m.rows {
                if r != row && !m.entry(r, col).is_zero() {
                    let factor = m.entry(r, col).clone();
                    m.row_sub_scaled(r, row, &factor);
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref {
            rank: pivots.len(),
            matrix: m,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of {v : M v^T = 0} (column-vector kernel), returned as the rows
    /// of a matrix in canonical RREF form. Row count = cols - rank.
    pub fn nullspace(&self) -> CycMatrix {
        let r = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !r.pivots.contains(c)).collect();
        let mut rows = Vec::new();
        for &f in &free {
            let mut v = vec![CycNumber::zero(self.order); self.cols];
            v[f] = CycNumber::one(self.order);
            for (i, &p) in r.pivots.iter().enumerate() {
                v[p] = -r.matrix.entry(i, f).clone();
            }
            rows.extend(v);
        }
        let basis = CycMatrix::new_internal(free.len(), self.cols, rows);
        basis.rref().matrix
    }

    /// Canonical basis of the row space: RREF with zero rows dropped.
    pub fn row_basis(&self) -> CycMatrix {
        let r = self.rref();
        r.matrix.take_rows(r.rank)
    }

    /// Canonical basis of the column space, returned as rows.
    pub fn column_space(&self) -> CycMatrix {
        self.transpose().row_basis()
    }

    fn take_rows(&self, k: usize) -> CycMatrix {
        CycMatrix {
            rows: k,
            cols: self.cols,
            order: self.order,
            entries: self.entries[..k * self.cols].to_vec(),
        }
    }

    /// Stack the rows of `self` above the rows of `other`.
    pub fn stack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let order = self.order.lcm(&other.order);
        let a = self.promote(order);
        let b = other.promote(order);
        let mut entries = a.entries;
        entries.extend(b.entries);
        CycMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            order,
            entries,
        }
    }

    /// Do the rows of `self` and `other` span the same subspace?
    pub fn same_row_space(&self, other: &Self) -> bool {
        if self.cols != other.cols {
            return false;
        }
        let order = self.order.lcm(&other.order);
        self.promote(order).row_basis() == other.promote(order).row_basis()
    }

    /// Intersection of the two row spaces, as a canonical row basis.
    /// Solves a U - b V = 0 and maps the a-part back through U.
    pub fn row_space_intersection(&self, other: &Self) -> CycMatrix {
        assert_eq!(self.cols, other.cols);
        let u = self.row_basis();
        let v = other.row_basis();
        let order = u.order.lcm(&v.order);
        let u = u.promote(order);
        let v = v.promote(order);
        if u.rows == 0 || v.rows == 0 {
            return CycMatrix::zero(0, self.cols, order).unwrap();
        }
        // Columns of the system are (a, b); rows are the ambient coordinates.
        let stacked = u.stack(&v); // (p+q) x n
        let kernel = stacked.transpose().nullspace(); // rows (a, b) with a U = b V
        let mut rows = Vec::new();
        for kr in 0..kernel.rows {
            let mut vec = vec![CycNumber::zero(order); self.cols];
            for i in 0..u.rows {
                let a = kernel.entry(kr, i);
                if a.is_zero() {
                    continue;
                }
                for (c, slot) in vec.iter_mut().enumerate() {
                    *slot = &*slot + &(a * u.entry(i, c));
                }
            }
            rows.extend(vec);
        }
        let m = CycMatrix::new_internal(kernel.rows, self.cols, rows);
        m.row_basis()
    }

    /// Determinant by exact Gaussian elimination.
    pub fn det(&self) -> CycNumber {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = CycNumber::one(self.order);
        for col in 0..n {
            let Some(pr) = (col..n).find(|&r| !m.entry(r, col).is_zero()) else {
                return CycNumber::zero(self.order);
            };
            if pr != col {
                m.swap_rows(col, pr);
                det = -det;
            }
            let pivot = m.entry(col, col).clone();
            det = &det * &pivot;
            let inv = pivot.inverse().expect("nonzero pivot");
            for r in col + 1..n {
                if !m.entry(r, col).is_zero() {
                    let factor = &m.entry(r, col).clone() * &inv;
                    m.row_sub_scaled(r, col, &factor);
                }
            }
        }
        det
    }

    pub fn trace(&self) -> CycNumber {
        assert!(self.is_square());
        let mut acc = CycNumber::zero(self.order);
        for i in 0..self.rows {
            acc = &acc + self.entry(i, i);
        }
        acc
    }

    pub fn is_unitary(&self) -> bool {
        self.is_square() && self.dagger().matmul(self).is_identity()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, s: &CycNumber) {
        for c in 0..self.cols {
            let idx = r * self.cols + c;
            self.entries[idx] = &self.entries[idx] * s;
        }
    }

    /// row r -= factor * row src
    fn row_sub_scaled(&mut self, r: usize, src: usize, factor: &CycNumber) {
        for c in 0..self.cols {
            let v = &self.entries[src * self.cols + c] * factor;
            let idx = r * self.cols + c;
            self.entries[idx] = &self.entries[idx] - &v;
        }
    }

    /// Stable text key used for deterministic sorting of subspace bases.
    pub fn canonical_key(&self) -> String {
        format!("{self}")
    }
}

impl fmt::Display for CycMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.entry(r, c))?;
            }
            write!(f, "]")?;
            if r + 1 < self.rows {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CycMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "CycMatrix {}x{} (m={})",
            self.rows, self.cols, self.order
        )?;
        fmt::Display::fmt(self, f)
    }
}
