//! Exact dense linear algebra over a prime field GF(p).
//!
//! Every other part of the crate reduces to the handful of operations here:
//! products, column reduction, kernels, images, solving, quotient
//! representatives and subspace intersection. Matrices are small (tens of
//! rows), so everything is dense and cubic.
//!
//! Scalars are stored as canonical representatives in `[0, p)`, so two
//! matrices compare equal exactly when they are equal over the field.
//! Matrices with zero rows or zero columns are ordinary values and represent
//! maps into or out of the zero space.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("{0} is not a prime modulus")]
    NotPrime(u64),
    #[error("dimension mismatch in {op}: {lhs:?} vs {rhs:?}")]
    DimensionMismatch {
        op: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },
    #[error("field mismatch: GF({0}) vs GF({1})")]
    FieldMismatch(u32, u32),
    #[error("expected {expected} entries, got {found}")]
    EntryCount { expected: usize, found: usize },
}

/// The prime field GF(p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, LinalgError> {
        if p < 2 || p > u64::from(u32::MAX) || !is_prime(p) {
            return Err(LinalgError::NotPrime(p));
        }
        Ok(Self { p: p as u32 })
    }

    pub const fn modulus(self) -> u32 {
        self.p
    }

    /// Canonical representative of an arbitrary integer.
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(i64::from(self.p)) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((u64::from(a) + u64::from(b)) % u64::from(self.p)) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((u64::from(a) + u64::from(self.p) - u64::from(b)) % u64::from(self.p)) as u32
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((u64::from(a) * u64::from(b)) % u64::from(self.p)) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    /// Multiplicative inverse via Fermat's little theorem.
    ///
    /// # Panics
    /// Panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.p != 0, "inverse of zero in GF({})", self.p);
        self.pow(a, u64::from(self.p) - 2)
    }

    pub fn pow(self, a: u32, mut e: u64) -> u32 {
        let m = u64::from(self.p);
        let mut base = u64::from(a) % m;
        let mut acc = 1 % m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        acc as u32
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A dense matrix over a prime field, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DenseMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} over {} ", self.rows, self.cols, self.field)?;
        let rows: Vec<&[u32]> = (0..self.rows).map(|i| self.row(i)).collect();
        f.debug_list().entries(rows).finish()
    }
}

impl fmt::Display for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(u32::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl DenseMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from integer rows, reducing every entry mod p.
    ///
    /// # Panics
    /// Panics if the rows are ragged. Use [`DenseMatrix::zeros`] for matrices
    /// with no rows.
    pub fn from_rows<R: AsRef<[i64]>>(field: PrimeField, rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().map(|&v| field.reduce(v)));
        }
        Self {
            field,
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_row_major(
        field: PrimeField,
        rows: usize,
        cols: usize,
        entries: Vec<u32>,
    ) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::EntryCount {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        let p = field.modulus();
        let data = entries.into_iter().map(|v| v % p).collect();
        Ok(Self {
            field,
            rows,
            cols,
            data,
        })
    }

    /// Builds a `rows x columns.len()` matrix whose columns are the given vectors.
    pub fn from_columns(field: PrimeField, rows: usize, columns: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column {j} has wrong length");
            for (i, &v) in c.iter().enumerate() {
                m.data[i * m.cols + j] = v % field.modulus();
            }
        }
        m
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.field.modulus();
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        (0..self.cols).map(|j| self.column(j))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(self.field, self.rows, idx.len());
        for (jn, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                m.data[i * m.cols + jn] = self.get(i, j);
            }
        }
        m
    }

    fn check_field(&self, other: &Self) -> Result<(), LinalgError> {
        if self.field != other.field {
            return Err(LinalgError::FieldMismatch(
                self.field.modulus(),
                other.field.modulus(),
            ));
        }
        Ok(())
    }

    /// Exact product `self * rhs`.
    pub fn mul(&self, rhs: &Self) -> Result<Self, LinalgError> {
        self.check_field(rhs)?;
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "mul",
                lhs: self.shape(),
                rhs: rhs.shape(),
            });
        }
        let p = u64::from(self.field.modulus());
        let mut out = Self::zeros(self.field, self.rows, rhs.cols);
        let mut acc = vec![0u64; rhs.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = u64::from(self.get(i, k));
                if a == 0 {
                    continue;
                }
                for (j, slot) in acc.iter_mut().enumerate() {
                    *slot = (*slot + a * u64::from(rhs.get(k, j))) % p;
                }
            }
            for (j, &v) in acc.iter().enumerate() {
                out.data[i * out.cols + j] = v as u32;
            }
        }
        Ok(out)
    }

    /// Product of a matrix with a column vector.
    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let p = u64::from(self.field.modulus());
        (0..self.rows)
            .map(|i| {
                let s = self
                    .row(i)
                    .iter()
                    .zip(v)
                    .fold(0u64, |s, (&a, &b)| (s + u64::from(a) * u64::from(b)) % p);
                s as u32
            })
            .collect()
    }

    /// `[self | rhs]`
    pub fn hstack(&self, rhs: &Self) -> Result<Self, LinalgError> {
        self.check_field(rhs)?;
        if self.rows != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "hstack",
                lhs: self.shape(),
                rhs: rhs.shape(),
            });
        }
        let cols = self.cols + rhs.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(rhs.row(i));
        }
        Ok(Self {
            field: self.field,
            rows: self.rows,
            cols,
            data,
        })
    }

    /// `[self ; rhs]`
    pub fn vstack(&self, rhs: &Self) -> Result<Self, LinalgError> {
        self.check_field(rhs)?;
        if self.cols != rhs.cols {
            return Err(LinalgError::DimensionMismatch {
                op: "vstack",
                lhs: self.shape(),
                rhs: rhs.shape(),
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&rhs.data);
        Ok(Self {
            field: self.field,
            rows: self.rows + rhs.rows,
            cols: self.cols,
            data,
        })
    }

    /// Block-diagonal matrix `diag(self, rhs)`.
    pub fn block_diag(&self, rhs: &Self) -> Result<Self, LinalgError> {
        self.check_field(rhs)?;
        let mut out = Self::zeros(self.field, self.rows + rhs.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[i * out.cols + j] = self.get(i, j);
            }
        }
        for i in 0..rhs.rows {
            for j in 0..rhs.cols {
                out.data[(self.rows + i) * out.cols + self.cols + j] = rhs.get(i, j);
            }
        }
        Ok(out)
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn scale_col(&mut self, j: usize, s: u32) {
        for i in 0..self.rows {
            let idx = i * self.cols + j;
            self.data[idx] = self.field.mul(self.data[idx], s);
        }
    }

    /// col[target] -= factor * col[src], touching rows `from..`.
    fn axpy_col(&mut self, target: usize, src: usize, factor: u32, from: usize) {
        let f = self.field;
        for i in from..self.rows {
            let s = self.data[i * self.cols + src];
            if s != 0 {
                let idx = i * self.cols + target;
                self.data[idx] = f.sub(self.data[idx], f.mul(factor, s));
            }
        }
    }

    /// Reduced column echelon form by Gaussian elimination on columns.
    ///
    /// Rows are scanned top to bottom; at each row the first remaining column
    /// with a nonzero entry becomes the pivot. Pivot entries are scaled to 1
    /// and cleared from every other column.
    pub fn column_reduce(&self) -> ColumnReduction {
        let f = self.field;
        let mut reduced = self.clone();
        let mut basis_change = Self::identity(f, self.cols);
        let mut pivot_rows = Vec::new();
        for row in 0..self.rows {
            let rank = pivot_rows.len();
            if rank == self.cols {
                break;
            }
            let Some(j) = (rank..self.cols).find(|&j| reduced.get(row, j) != 0) else {
                continue;
            };
            reduced.swap_cols(j, rank);
            basis_change.swap_cols(j, rank);
            let inv = f.inv(reduced.get(row, rank));
            reduced.scale_col(rank, inv);
            basis_change.scale_col(rank, inv);
            for c in 0..self.cols {
                if c == rank {
                    continue;
                }
                let factor = reduced.get(row, c);
                if factor != 0 {
                    // The pivot column vanishes above `row`.
                    reduced.axpy_col(c, rank, factor, row);
                    basis_change.axpy_col(c, rank, factor, 0);
                }
            }
            pivot_rows.push(row);
        }
        ColumnReduction {
            rank: pivot_rows.len(),
            reduced,
            basis_change,
            pivot_rows,
        }
    }

    pub fn rank(&self) -> usize {
        self.column_reduce().rank
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Inverse of a square invertible matrix.
    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let red = self.column_reduce();
        // reduced = A V with reduced = I exactly when A is invertible
        (red.rank == self.rows).then_some(red.basis_change)
    }

    /// Basis of the null space, as columns.
    pub fn kernel_basis(&self) -> Self {
        self.column_reduce().kernel_basis()
    }

    /// Basis of the column space, as columns.
    pub fn image_basis(&self) -> Self {
        self.column_reduce().image_basis()
    }

    /// Some `x` with `self * x == b`, or `None` if `b` is outside the column space.
    pub fn solve(&self, b: &[u32]) -> Option<Vec<u32>> {
        self.column_reduce().solve(b)
    }

    /// Solves `self * X == rhs` column by column.
    pub fn solve_matrix(&self, rhs: &Self) -> Option<Self> {
        assert_eq!(self.rows, rhs.rows, "solve_matrix: row mismatch");
        let red = self.column_reduce();
        let cols: Option<Vec<Vec<u32>>> = rhs.columns().map(|b| red.solve(&b)).collect();
        cols.map(|cols| Self::from_columns(self.field, self.cols, &cols))
    }

    /// Whether every column of `other` lies in the column space of `self`.
    pub fn spans(&self, other: &Self) -> bool {
        let red = self.column_reduce();
        other.columns().all(|c| red.solve(&c).is_some())
    }
}

/// Result of [`DenseMatrix::column_reduce`]: `reduced == a * basis_change`.
#[derive(Clone, Debug)]
pub struct ColumnReduction {
    pub reduced: DenseMatrix,
    pub rank: usize,
    pub basis_change: DenseMatrix,
    /// Row of the leading 1 in each of the first `rank` columns.
    pub pivot_rows: Vec<usize>,
}

impl ColumnReduction {
    pub fn kernel_basis(&self) -> DenseMatrix {
        let idx: Vec<usize> = (self.rank..self.basis_change.cols()).collect();
        self.basis_change.select_columns(&idx)
    }

    pub fn image_basis(&self) -> DenseMatrix {
        let idx: Vec<usize> = (0..self.rank).collect();
        self.reduced.select_columns(&idx)
    }

    pub fn solve(&self, b: &[u32]) -> Option<Vec<u32>> {
        let red = &self.reduced;
        assert_eq!(b.len(), red.rows(), "solve: right-hand side length mismatch");
        let f = red.field();
        let mut residual: Vec<u32> = b.iter().map(|&v| v % f.modulus()).collect();
        let mut coeffs = Vec::with_capacity(self.rank);
        for (k, &pr) in self.pivot_rows.iter().enumerate() {
            let c = residual[pr];
            if c != 0 {
                for (i, r) in residual.iter_mut().enumerate().skip(pr) {
                    *r = f.sub(*r, f.mul(c, red.get(i, k)));
                }
            }
            coeffs.push(c);
        }
        if residual.iter().any(|&v| v != 0) {
            return None;
        }
        let n = self.basis_change.rows();
        let mut x = vec![0u32; n];
        for (k, &c) in coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = f.add(*xi, f.mul(c, self.basis_change.get(i, k)));
            }
        }
        Some(x)
    }
}

/// Coset representatives for `ambient / span(sub)`.
///
/// Returns standard basis vectors at the non-pivot rows of `sub`'s column
/// echelon form; together with `sub`'s columns they span the ambient space.
pub fn cokernel_reps(sub: &DenseMatrix, ambient_dim: usize) -> DenseMatrix {
    assert_eq!(sub.rows(), ambient_dim, "cokernel_reps: ambient dimension mismatch");
    let red = sub.column_reduce();
    let mut is_pivot = vec![false; ambient_dim];
    for &r in &red.pivot_rows {
        is_pivot[r] = true;
    }
    let free: Vec<usize> = (0..ambient_dim).filter(|&i| !is_pivot[i]).collect();
    let mut out = DenseMatrix::zeros(sub.field(), ambient_dim, free.len());
    for (j, &i) in free.iter().enumerate() {
        out.set(i, j, 1);
    }
    out
}

/// Basis of `colspace(u) ∩ colspace(v)`.
pub fn intersect_subspaces(u: &DenseMatrix, v: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
    if u.rows() != v.rows() {
        return Err(LinalgError::DimensionMismatch {
            op: "intersect_subspaces",
            lhs: u.shape(),
            rhs: v.shape(),
        });
    }
    u.check_field(v)?;
    let f = u.field();
    let ub = u.image_basis();
    let vb = v.image_basis();
    // x with [U | -V] x = 0 gives U x_u = V x_v
    let mut neg_v = vb.clone();
    for val in neg_v.data.iter_mut() {
        *val = f.neg(*val);
    }
    let ker = ub.hstack(&neg_v)?.kernel_basis();
    let top: Vec<usize> = (0..ub.cols()).collect();
    let mut coeffs = DenseMatrix::zeros(f, ub.cols(), ker.cols());
    for &i in &top {
        for j in 0..ker.cols() {
            coeffs.set(i, j, ker.get(i, j));
        }
    }
    Ok(ub.mul(&coeffs)?.image_basis())
}
