//! Exact dense matrix algebra over any [`RingContext`].
//!
//! Determinants are division-free (cofactor expansion with memoization for
//! small sizes, Samuelson-Berkowitz above), so they are valid over rings
//! with zero divisors. Nullspace dimensions use field Gaussian elimination
//! with a deterministic first-nonzero pivot rule.

use thiserror::Error;

use crate::ring::{RingContext, RingElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("ring context mismatch: {0} vs {1}")]
    ContextMismatch(String, String),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("entry count {0} does not match {1}x{2}")]
    BadEntryCount(usize, usize, usize),
    #[error("operation requires a field, got {0}")]
    NotAField(String),
    #[error("transvection indices must differ")]
    EqualIndices,
    #[error("index {0} out of range [1, {1}]")]
    IndexOutOfRange(usize, usize),
}

/// Dense row-major matrix with exact entries sharing one ring context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    ctx: RingContext,
    rows: usize,
    cols: usize,
    entries: Vec<RingElement>,
}

impl Matrix {
    pub fn new(
        ctx: RingContext,
        rows: usize,
        cols: usize,
        entries: Vec<RingElement>,
    ) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::BadEntryCount(entries.len(), rows, cols));
        }
        for e in &entries {
            if e.context() != &ctx {
                return Err(LinalgError::ContextMismatch(
                    e.context().to_string(),
                    ctx.to_string(),
                ));
            }
        }
        Ok(Matrix {
            ctx,
            rows,
            cols,
            entries,
        })
    }

    pub fn from_fn(
        ctx: RingContext,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> RingElement,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Matrix {
            ctx,
            rows,
            cols,
            entries,
        }
    }

    pub fn from_i64(
        ctx: &RingContext,
        data: &[&[i64]],
    ) -> Self {
        let rows = data.len();
        let cols = if rows == 0 { 0 } else { data[0].len() };
        Matrix::from_fn(ctx.clone(), rows, cols, |i, j| ctx.from_i64(data[i][j]))
    }

    pub fn zeros(ctx: &RingContext, rows: usize, cols: usize) -> Self {
        Matrix::from_fn(ctx.clone(), rows, cols, |_, _| ctx.zero())
    }

    pub fn identity(ctx: &RingContext, n: usize) -> Self {
        Matrix::from_fn(ctx.clone(), n, n, |i, j| {
            if i == j {
                ctx.one()
            } else {
                ctx.zero()
            }
        })
    }

    pub fn context(&self) -> &RingContext {
        &self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElement {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RingElement) {
        assert!(v.context() == &self.ctx, "entry context mismatch");
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.ctx.clone(), self.cols, self.rows, |i, j| {
            self.get(j, i).clone()
        })
    }

    pub fn map_entries(&self, ctx: &RingContext, f: impl Fn(&RingElement) -> RingElement) -> Matrix {
        Matrix::from_fn(ctx.clone(), self.rows, self.cols, |i, j| f(self.get(i, j)))
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.ctx != other.ctx {
            return Err(LinalgError::ContextMismatch(
                self.ctx.to_string(),
                other.ctx.to_string(),
            ));
        }
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        let mut out = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = self.ctx.zero();
                for l in 0..self.cols {
                    let p = self.get(i, l).mul(other.get(l, j));
                    if !p.is_zero() {
                        acc = acc.add(&p);
                    }
                }
                out.push(acc);
            }
        }
        Matrix::new(self.ctx.clone(), self.rows, other.cols, out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.ctx != other.ctx {
            return Err(LinalgError::ContextMismatch(
                self.ctx.to_string(),
                other.ctx.to_string(),
            ));
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        Ok(Matrix::from_fn(
            self.ctx.clone(),
            self.rows,
            self.cols,
            |i, j| self.get(i, j).add(other.get(i, j)),
        ))
    }

    pub fn scalar_mul(&self, c: &RingElement) -> Matrix {
        Matrix::from_fn(self.ctx.clone(), self.rows, self.cols, |i, j| {
            self.get(i, j).mul(c)
        })
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[RingElement]) -> Result<Vec<RingElement>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(self.rows, self.cols, v.len(), 1));
        }
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = self.ctx.zero();
            for j in 0..self.cols {
                acc = acc.add(&self.get(i, j).mul(&v[j]));
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Submatrix with the given (0-based) row and column selections.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(self.ctx.clone(), rows.len(), cols.len(), |i, j| {
            self.get(rows[i], cols[j]).clone()
        })
    }

    /// Division-free determinant: memoized cofactor expansion up to 6x6,
    /// Samuelson-Berkowitz above.
    pub fn det_division_free(&self) -> Result<RingElement, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(self.ctx.one());
        }
        if n <= 6 {
            Ok(self.det_cofactor_memo())
        } else {
            let coeffs = self.char_poly_berkowitz();
            // det(A) = (-1)^n * (constant term of det(tI - A))
            let c = coeffs[n].clone();
            Ok(if n % 2 == 0 { c } else { c.neg() })
        }
    }

    fn det_cofactor_memo(&self) -> RingElement {
        let n = self.rows;
        // memo over column subsets: det of the lower-right block formed by
        // rows (n - popcount)..n and the selected columns
        let mut memo: Vec<Option<RingElement>> = vec![None; 1usize << n];
        self.det_on_columns(n, (1usize << n) - 1, &mut memo)
    }

    fn det_on_columns(&self, n: usize, mask: usize, memo: &mut Vec<Option<RingElement>>) -> RingElement {
        if mask == 0 {
            return self.ctx.one();
        }
        if let Some(v) = &memo[mask] {
            return v.clone();
        }
        let size = mask.count_ones() as usize;
        let row = n - size;
        let mut acc = self.ctx.zero();
        let mut sign_pos = true;
        for j in 0..n {
            if mask & (1 << j) == 0 {
                continue;
            }
            let a = self.get(row, j);
            if !a.is_zero() {
                let sub = self.det_on_columns(n, mask & !(1 << j), memo);
                let term = a.mul(&sub);
                acc = if sign_pos { acc.add(&term) } else { acc.sub(&term) };
            }
            sign_pos = !sign_pos;
        }
        memo[mask] = Some(acc.clone());
        acc
    }

    /// Coefficients of det(tI - A) from t^n down to the constant term,
    /// computed division-free.
    pub fn char_poly_berkowitz(&self) -> Vec<RingElement> {
        let n = self.rows;
        assert_eq!(n, self.cols, "characteristic polynomial requires square matrix");
        let one = self.ctx.one();
        if n == 0 {
            return vec![one];
        }
        // Trailing principal submatrices, peeling off the first row/column.
        let mut coeffs = vec![one.clone(), self.get(n - 1, n - 1).neg()];
        for r in (0..n - 1).rev() {
            let size = n - 1 - r; // size of the submatrix below/right of row r
            // Toeplitz column: 1, -a_rr, -R M^i S
            let mut t = Vec::with_capacity(size + 2);
            t.push(one.clone());
            t.push(self.get(r, r).neg());
            // v starts as S (column r of the submatrix)
            let mut v: Vec<RingElement> =
                (r + 1..n).map(|i| self.get(i, r).clone()).collect();
            for _ in 0..size {
                let mut dot = self.ctx.zero();
                for (jj, col) in (r + 1..n).enumerate() {
                    dot = dot.add(&self.get(r, col).mul(&v[jj]));
                }
                t.push(dot.neg());
                // v <- M v
                let mut nv = Vec::with_capacity(size);
                for i in r + 1..n {
                    let mut acc = self.ctx.zero();
                    for (jj, col) in (r + 1..n).enumerate() {
                        acc = acc.add(&self.get(i, col).mul(&v[jj]));
                    }
                    nv.push(acc);
                }
                v = nv;
            }
            // coeffs <- T * coeffs (lower-triangular Toeplitz)
            let mut next = Vec::with_capacity(coeffs.len() + 1);
            for i in 0..coeffs.len() + 1 {
                let mut acc = self.ctx.zero();
                for j in 0..coeffs.len() {
                    if i >= j && i - j < t.len() {
                        acc = acc.add(&t[i - j].mul(&coeffs[j]));
                    }
                }
                next.push(acc);
            }
            coeffs = next;
        }
        coeffs
    }

    /// Two-sided inverse, or None when the determinant is not a unit.
    /// Fields use Gauss-Jordan; general rings use the characteristic
    /// polynomial (Cayley-Hamilton). The result is verified by
    /// multiplication on both sides.
    pub fn inverse(&self) -> Result<Option<Matrix>, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let candidate = if self.ctx.is_field() {
            match self.gauss_jordan_inverse() {
                Some(m) => m,
                None => return Ok(None),
            }
        } else {
            // det(tI - A) = t^n + c1 t^(n-1) + ... + cn;
            // A^-1 = -cn^-1 (A^(n-1) + c1 A^(n-2) + ... + c_(n-1) I)
            let coeffs = self.char_poly_berkowitz();
            let cn = &coeffs[n];
            let Some(cn_inv) = cn.inverse() else {
                return Ok(None);
            };
            let mut acc = Matrix::identity(&self.ctx, n);
            for i in 1..n {
                acc = acc.mul(self)?;
                acc = acc.add(&Matrix::identity(&self.ctx, n).scalar_mul(&coeffs[i]))?;
            }
            acc.scalar_mul(&cn_inv.neg())
        };
        let left = candidate.mul(self)?;
        let right = self.mul(&candidate)?;
        if left.is_identity() && right.is_identity() {
            Ok(Some(candidate))
        } else {
            Ok(None)
        }
    }

    fn gauss_jordan_inverse(&self) -> Option<Matrix> {
        let n = self.rows;
        let mut work = self.clone();
        let mut inv = Matrix::identity(&self.ctx, n);
        for col in 0..n {
            let pivot_row = (col..n).find(|&r| !work.get(r, col).is_zero())?;
            if pivot_row != col {
                for j in 0..n {
                    let a = work.get(pivot_row, j).clone();
                    let b = work.get(col, j).clone();
                    work.set(pivot_row, j, b);
                    work.set(col, j, a);
                    let a = inv.get(pivot_row, j).clone();
                    let b = inv.get(col, j).clone();
                    inv.set(pivot_row, j, b);
                    inv.set(col, j, a);
                }
            }
            let p = work.get(col, col).inverse()?;
            for j in 0..n {
                work.set(col, j, work.get(col, j).mul(&p));
                inv.set(col, j, inv.get(col, j).mul(&p));
            }
            for r in 0..n {
                if r == col || work.get(r, col).is_zero() {
                    continue;
                }
                let factor = work.get(r, col).clone();
                for j in 0..n {
                    work.set(r, j, work.get(r, j).sub(&factor.mul(work.get(col, j))));
                    inv.set(r, j, inv.get(r, j).sub(&factor.mul(inv.get(col, j))));
                }
            }
        }
        Some(inv)
    }

    /// Row echelon rank over a field (first-nonzero pivot rule).
    pub fn rank(&self) -> Result<usize, LinalgError> {
        if !self.ctx.is_field() {
            return Err(LinalgError::NotAField(self.ctx.to_string()));
        }
        let mut work = self.clone();
        let mut pivot_row = 0usize;
        for col in 0..self.cols {
            if pivot_row == self.rows {
                break;
            }
            let Some(r) = (pivot_row..self.rows).find(|&r| !work.get(r, col).is_zero()) else {
                continue;
            };
            if r != pivot_row {
                for j in 0..self.cols {
                    let a = work.get(r, j).clone();
                    let b = work.get(pivot_row, j).clone();
                    work.set(r, j, b);
                    work.set(pivot_row, j, a);
                }
            }
            let inv = work.get(pivot_row, col).inverse().unwrap();
            for j in col..self.cols {
                work.set(pivot_row, j, work.get(pivot_row, j).mul(&inv));
            }
            for rr in 0..self.rows {
                if rr == pivot_row || work.get(rr, col).is_zero() {
                    continue;
                }
                let factor = work.get(rr, col).clone();
                for j in col..self.cols {
                    let v = work.get(rr, j).sub(&factor.mul(work.get(pivot_row, j)));
                    work.set(rr, j, v);
                }
            }
            pivot_row += 1;
        }
        Ok(pivot_row)
    }

    /// Exact dimension of {x : Ax = 0} over a field.
    pub fn nullspace_dim(&self) -> Result<usize, LinalgError> {
        Ok(self.cols - self.rank()?)
    }

    /// A basis of {x : Ax = 0} over a field, one vector per free column.
    pub fn nullspace_basis(&self) -> Result<Vec<Vec<RingElement>>, LinalgError> {
        if !self.ctx.is_field() {
            return Err(LinalgError::NotAField(self.ctx.to_string()));
        }
        // reduced row echelon form
        let mut work = self.clone();
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
        let mut pivot_row = 0usize;
        for col in 0..self.cols {
            if pivot_row == self.rows {
                break;
            }
            let Some(r) = (pivot_row..self.rows).find(|&r| !work.get(r, col).is_zero()) else {
                continue;
            };
            if r != pivot_row {
                for j in 0..self.cols {
                    let a = work.get(r, j).clone();
                    let b = work.get(pivot_row, j).clone();
                    work.set(r, j, b);
                    work.set(pivot_row, j, a);
                }
            }
            let inv = work.get(pivot_row, col).inverse().unwrap();
            for j in col..self.cols {
                work.set(pivot_row, j, work.get(pivot_row, j).mul(&inv));
            }
            for rr in 0..self.rows {
                if rr == pivot_row || work.get(rr, col).is_zero() {
                    continue;
                }
                let factor = work.get(rr, col).clone();
                for j in col..self.cols {
                    let v = work.get(rr, j).sub(&factor.mul(work.get(pivot_row, j)));
                    work.set(rr, j, v);
                }
            }
            pivots.push((pivot_row, col));
            pivot_row += 1;
        }
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_cols.contains(&free) {
                continue;
            }
            let mut v = vec![self.ctx.zero(); self.cols];
            v[free] = self.ctx.one();
            for &(r, c) in &pivots {
                v[c] = work.get(r, free).neg();
            }
            basis.push(v);
        }
        Ok(basis)
    }
}

/// An elementary transvection e + xi*e_(i,j) with 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transvection {
    size: usize,
    row: usize,
    col: usize,
    param: RingElement,
}

impl Transvection {
    pub fn new(size: usize, row: usize, col: usize, param: RingElement) -> Result<Self, LinalgError> {
        if row == col {
            return Err(LinalgError::EqualIndices);
        }
        for idx in [row, col] {
            if idx < 1 || idx > size {
                return Err(LinalgError::IndexOutOfRange(idx, size));
            }
        }
        Ok(Transvection {
            size,
            row,
            col,
            param,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn row(&self) -> usize {
        self.row
    }

    pub fn col(&self) -> usize {
        self.col
    }

    pub fn param(&self) -> &RingElement {
        &self.param
    }

    pub fn inverse(&self) -> Transvection {
        Transvection {
            size: self.size,
            row: self.row,
            col: self.col,
            param: self.param.neg(),
        }
    }

    pub fn matrix(&self) -> Matrix {
        let ctx = self.param.context();
        let mut m = Matrix::identity(ctx, self.size);
        m.set(self.row - 1, self.col - 1, self.param.clone());
        m
    }
}
