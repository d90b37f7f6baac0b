//! Dense exact matrices, generic over the scalar type.
//!
//! The container is generic via `num-traits` bounds so the same code runs
//! over `BigInt`, `BigRational` or machine integers in tests; the crate
//! root fixes the concrete aliases [`crate::IntMatrix`] and
//! [`crate::RatMatrix`]. Normal forms (Hermite, Smith) require an integer
//! scalar, solving and inversion require a field scalar.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::{Int, IntMatrix, Rat, RatMatrix, Result};

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }
}

impl<T: Clone> Matrix<T> {
    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        (0..self.cols).map(|j| self[(i, j)].clone()).collect()
    }

    pub fn from_col(v: &[T]) -> Self {
        Matrix::from_fn(v.len(), 1, |i, _| v[i].clone())
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::ShapeMismatch("hstack row counts differ".into()));
        }
        Ok(Matrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        }))
    }

    /// Columns `lo..hi` as a new matrix.
    pub fn col_range(&self, lo: usize, hi: usize) -> Self {
        Matrix::from_fn(self.rows, hi - lo, |i, j| self[(i, lo + j)].clone())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
}

impl<T: Clone + Zero> Matrix<T> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero + One + std::ops::Mul<Output = T> + std::ops::Sub<Output = T> + std::ops::Neg<Output = T>,
{
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self[(i, k)].clone() * other[(k, j)].clone();
            }
            acc
        }))
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if self.cols != v.len() {
            return Err(Error::ShapeMismatch("mul_vec length".into()));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for k in 0..self.cols {
                    acc = acc + self[(i, k)].clone() * v[k].clone();
                }
                acc
            })
            .collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch("add".into()));
        }
        Ok(Matrix::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() + other[(i, j)].clone()
        }))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch("sub".into()));
        }
        Ok(Matrix::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() - other[(i, j)].clone()
        }))
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x.clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c.clone())
    }
}

// ---------------------------------------------------------------------------
// Hermite and Smith normal forms over an integer scalar.
// ---------------------------------------------------------------------------

impl<T: Integer + Signed + Clone> Matrix<T> {
    /// Row-style Hermite normal form: returns `(h, u)` with `h = u * self`,
    /// `u` unimodular and `h` in upper echelon form with positive pivots and
    /// the entries above each pivot reduced into `[0, pivot)`.
    pub fn hnf(&self) -> (Self, Self) {
        let mut h = self.clone();
        let mut u: Matrix<T> = Matrix::identity(self.rows);
        let (m, n) = (self.rows, self.cols);
        let mut pivot_row = 0;
        for col in 0..n {
            if pivot_row == m {
                break;
            }
            // Euclidean reduction below the pivot position.
            loop {
                let mut best: Option<usize> = None;
                for i in pivot_row..m {
                    if !h[(i, col)].is_zero()
                        && best.map_or(true, |b| h[(i, col)].abs() < h[(b, col)].abs())
                    {
                        best = Some(i);
                    }
                }
                let Some(b) = best else { break };
                h.swap_rows(pivot_row, b);
                u.swap_rows(pivot_row, b);
                let mut dirty = false;
                for i in pivot_row + 1..m {
                    if !h[(i, col)].is_zero() {
                        let q = h[(i, col)].div_floor(&h[(pivot_row, col)]);
                        for j in 0..n {
                            let s = h[(pivot_row, j)].clone() * q.clone();
                            h[(i, j)] = h[(i, j)].clone() - s;
                        }
                        for j in 0..m {
                            let s = u[(pivot_row, j)].clone() * q.clone();
                            u[(i, j)] = u[(i, j)].clone() - s;
                        }
                        if !h[(i, col)].is_zero() {
                            dirty = true;
                        }
                    }
                }
                if !dirty {
                    break;
                }
            }
            if h[(pivot_row, col)].is_zero() {
                continue;
            }
            if h[(pivot_row, col)].is_negative() {
                for j in 0..n {
                    h[(pivot_row, j)] = -h[(pivot_row, j)].clone();
                }
                for j in 0..m {
                    u[(pivot_row, j)] = -u[(pivot_row, j)].clone();
                }
            }
            // Reduce the entries above the pivot into [0, pivot).
            for i in 0..pivot_row {
                let q = h[(i, col)].div_floor(&h[(pivot_row, col)]);
                if !q.is_zero() {
                    for j in 0..n {
                        let s = h[(pivot_row, j)].clone() * q.clone();
                        h[(i, j)] = h[(i, j)].clone() - s;
                    }
                    for j in 0..m {
                        let s = u[(pivot_row, j)].clone() * q.clone();
                        u[(i, j)] = u[(i, j)].clone() - s;
                    }
                }
            }
            pivot_row += 1;
        }
        (h, u)
    }

    /// Smith normal form: returns `(d, u, v)` with `d = u * self * v`
    /// diagonal, `d_1 | d_2 | ... >= 0`, and `u`, `v` unimodular.
    pub fn snf(&self) -> (Self, Self, Self) {
        let mut d = self.clone();
        let mut u: Matrix<T> = Matrix::identity(self.rows);
        let mut v: Matrix<T> = Matrix::identity(self.cols);
        let (m, n) = (self.rows, self.cols);
        let k = m.min(n);

        let mut t = 0;
        'outer: while t < k {
            // Pivot: minimal absolute value among the remaining block.
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !d[(i, j)].is_zero()
                        && best.map_or(true, |(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            d.swap_rows(t, bi);
            u.swap_rows(t, bi);
            swap_cols(&mut d, t, bj);
            swap_cols(&mut v, t, bj);

            // Clear row and column t; restart if a remainder survives.
            let mut again = false;
            for i in t + 1..m {
                if !d[(i, t)].is_zero() {
                    let q = d[(i, t)].div_floor(&d[(t, t)]);
                    row_sub(&mut d, i, t, &q);
                    row_sub(&mut u, i, t, &q);
                    if !d[(i, t)].is_zero() {
                        again = true;
                    }
                }
            }
            for j in t + 1..n {
                if !d[(t, j)].is_zero() {
                    let q = d[(t, j)].div_floor(&d[(t, t)]);
                    col_sub(&mut d, j, t, &q);
                    col_sub(&mut v, j, t, &q);
                    if !d[(t, j)].is_zero() {
                        again = true;
                    }
                }
            }
            if again {
                continue 'outer;
            }

            // Divisibility: fold any non-divisible entry into row t.
            for i in t + 1..m {
                for j in t + 1..n {
                    if !d[(i, j)].mod_floor(&d[(t, t)]).is_zero() {
                        let one = T::one();
                        row_add(&mut d, t, i, &one);
                        row_add(&mut u, t, i, &one);
                        continue 'outer;
                    }
                }
            }
            t += 1;
        }
        for i in 0..k {
            if d[(i, i)].is_negative() {
                for j in 0..m {
                    u[(i, j)] = -u[(i, j)].clone();
                }
                d[(i, i)] = -d[(i, i)].clone();
            }
        }
        (d, u, v)
    }

    /// Basis of the integer kernel `{x : self * x = 0}`, as matrix columns.
    pub fn kernel(&self) -> Self {
        // Row-HNF of the transpose: zero rows of h correspond to kernel
        // vectors recorded in u.
        let (h, u) = self.transpose().hnf();
        let mut rank = 0;
        for i in 0..h.rows {
            if (0..h.cols).any(|j| !h[(i, j)].is_zero()) {
                rank += 1;
            }
        }
        let ut = u.transpose();
        ut.col_range(rank, ut.cols)
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let (h, _) = self.hnf();
        (0..h.rows)
            .filter(|&i| (0..h.cols).any(|j| !h[(i, j)].is_zero()))
            .count()
    }
}

fn swap_cols<T>(m: &mut Matrix<T>, a: usize, b: usize) {
    if a != b {
        for i in 0..m.rows {
            m.data.swap(i * m.cols + a, i * m.cols + b);
        }
    }
}

// row i -= q * row t
fn row_sub<T: Integer + Clone>(m: &mut Matrix<T>, i: usize, t: usize, q: &T) {
    for j in 0..m.cols {
        let s = m[(t, j)].clone() * q.clone();
        m[(i, j)] = m[(i, j)].clone() - s;
    }
}

// row t += q * row i
fn row_add<T: Integer + Clone>(m: &mut Matrix<T>, t: usize, i: usize, q: &T) {
    for j in 0..m.cols {
        let s = m[(i, j)].clone() * q.clone();
        m[(t, j)] = m[(t, j)].clone() + s;
    }
}

// col j -= q * col t
fn col_sub<T: Integer + Clone>(m: &mut Matrix<T>, j: usize, t: usize, q: &T) {
    for i in 0..m.rows {
        let s = m[(i, t)].clone() * q.clone();
        m[(i, j)] = m[(i, j)].clone() - s;
    }
}

// ---------------------------------------------------------------------------
// Field operations (exact Gaussian elimination).
// ---------------------------------------------------------------------------

impl<T> Matrix<T>
where
    T: Clone + num_traits::Num + std::ops::Neg<Output = T>,
{
    /// Solves `self * x = rhs` exactly. Returns one solution (free
    /// variables set to zero) or `Error::NoSolution`.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows {
            return Err(Error::ShapeMismatch("solve rhs rows".into()));
        }
        let (m, n, w) = (self.rows, self.cols, rhs.cols);
        let mut a = self.hstack(rhs)?;
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut prow = 0;
        for col in 0..n {
            if prow == m {
                break;
            }
            let Some(p) = (prow..m).find(|&i| !a[(i, col)].is_zero()) else {
                continue;
            };
            a.swap_rows(prow, p);
            let inv = a[(prow, col)].clone();
            for j in col..n + w {
                a[(prow, j)] = a[(prow, j)].clone() / inv.clone();
            }
            for i in 0..m {
                if i != prow && !a[(i, col)].is_zero() {
                    let f = a[(i, col)].clone();
                    for j in col..n + w {
                        let s = a[(prow, j)].clone() * f.clone();
                        a[(i, j)] = a[(i, j)].clone() - s;
                    }
                }
            }
            pivots.push((prow, col));
            prow += 1;
        }
        // Consistency: zero rows of the coefficient part must have zero rhs.
        for i in prow..m {
            for j in 0..w {
                if !a[(i, n + j)].is_zero() {
                    return Err(Error::NoSolution);
                }
            }
        }
        let mut x = Matrix::zero(n, w);
        for &(r, c) in &pivots {
            for j in 0..w {
                x[(c, j)] = a[(r, n + j)].clone();
            }
        }
        Ok(x)
    }

    /// Exact inverse; `Error::Singular` if not invertible.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("inverse of non-square".into()));
        }
        let id = Matrix::identity(self.rows);
        let x = self.solve(&id).map_err(|_| Error::Singular)?;
        // solve() can return a spurious answer when self is singular with a
        // consistent-looking system; verify.
        if self.mul(&x)? != id {
            return Err(Error::Singular);
        }
        Ok(x)
    }

    /// Determinant by exact Gaussian elimination.
    pub fn det(&self) -> Result<T> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch("det of non-square".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = T::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&i| !a[(i, col)].is_zero()) else {
                return Ok(T::zero());
            };
            if p != col {
                a.swap_rows(col, p);
                det = -det;
            }
            let piv = a[(col, col)].clone();
            det = det * piv.clone();
            for i in col + 1..n {
                if !a[(i, col)].is_zero() {
                    let f = a[(i, col)].clone() / piv.clone();
                    for j in col..n {
                        let s = a[(col, j)].clone() * f.clone();
                        a[(i, j)] = a[(i, j)].clone() - s;
                    }
                }
            }
        }
        Ok(det)
    }

    /// Basis of the right kernel over the field, as matrix columns.
    pub fn field_kernel(&self) -> Self {
        let (m, n) = (self.rows, self.cols);
        let mut a = self.clone();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut prow = 0;
        for col in 0..n {
            if prow == m {
                break;
            }
            let Some(p) = (prow..m).find(|&i| !a[(i, col)].is_zero()) else {
                continue;
            };
            a.swap_rows(prow, p);
            let inv = a[(prow, col)].clone();
            for j in col..n {
                a[(prow, j)] = a[(prow, j)].clone() / inv.clone();
            }
            for i in 0..m {
                if i != prow && !a[(i, col)].is_zero() {
                    let f = a[(i, col)].clone();
                    for j in col..n {
                        let s = a[(prow, j)].clone() * f.clone();
                        a[(i, j)] = a[(i, j)].clone() - s;
                    }
                }
            }
            pivots.push((prow, col));
            prow += 1;
        }
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let free_cols: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
        let mut k = Matrix::zero(n, free_cols.len());
        for (idx, &fc) in free_cols.iter().enumerate() {
            k[(fc, idx)] = T::one();
            for &(r, c) in &pivots {
                k[(c, idx)] = -a[(r, fc)].clone();
            }
        }
        k
    }
}

// ---------------------------------------------------------------------------
// Integer/rational interplay.
// ---------------------------------------------------------------------------

impl IntMatrix {
    pub fn to_rational(&self) -> RatMatrix {
        self.map(|x| Rat::from_integer(x.clone()))
    }

    /// `|det u| = 1`.
    pub fn is_unimodular(&self) -> bool {
        self.is_square()
            && self
                .to_rational()
                .det()
                .map(|d| d.abs() == Rat::one())
                .unwrap_or(false)
    }

    /// Basis of the saturation `{v in Z^n : k v in column span, k != 0}`.
    /// The input must have full column rank.
    pub fn saturation(&self) -> Result<IntMatrix> {
        let k = self.cols;
        if self.rank() != k {
            return Err(Error::RankDeficient("saturation input".into()));
        }
        let (_, u, _) = self.snf();
        let uinv = u
            .to_rational()
            .inverse()
            .map_err(|_| Error::Internal("snf transform not invertible".into()))?;
        let uinv = uinv
            .to_integer()
            .ok_or_else(|| Error::Internal("unimodular inverse not integral".into()))?;
        Ok(col_canonical(&uinv.col_range(0, k)))
    }

    /// The invariant factors (diagonal of the SNF), zeros dropped.
    pub fn invariant_factors(&self) -> Vec<Int> {
        let (d, _, _) = self.snf();
        (0..self.rows.min(self.cols))
            .map(|i| d[(i, i)].clone())
            .filter(|x| !x.is_zero())
            .collect()
    }

    /// Solves `self * x = b` over the integers; `None` when no integral
    /// solution exists.
    pub fn solve_integer(&self, b: &IntMatrix) -> Option<IntMatrix> {
        // Column reduction through the Hermite form of the transpose:
        // self * w^T = [c | 0] with w unimodular.
        let (h, w) = self.transpose().hnf();
        let rank = (0..h.rows())
            .filter(|&i| (0..h.cols()).any(|j| !h[(i, j)].is_zero()))
            .count();
        let c = h.transpose().col_range(0, rank);
        let y = c.to_rational().solve(&b.to_rational()).ok()?;
        let y = y.to_integer()?;
        let x = w.transpose().col_range(0, rank).mul(&y).ok()?;
        debug_assert_eq!(self.mul(&x).unwrap(), *b);
        Some(x)
    }
}

impl RatMatrix {
    pub fn is_integral(&self) -> bool {
        self.entries().all(|x| x.is_integer())
    }

    pub fn to_integer(&self) -> Option<IntMatrix> {
        if !self.is_integral() {
            return None;
        }
        Some(self.map(|x| x.to_integer()))
    }

    /// Least common multiple of the denominators.
    pub fn denominator_lcm(&self) -> Int {
        let mut l = Int::one();
        for x in self.entries() {
            l = l.lcm(x.denom());
        }
        l
    }

    /// `(d, m)` with `m = d * self` integral and `d` the denominator lcm.
    pub fn clear_denominators(&self) -> (Int, IntMatrix) {
        let d = self.denominator_lcm();
        let m = self.map(|x| {
            let y = x * Rat::from_integer(d.clone());
            debug_assert!(y.is_integer());
            y.to_integer()
        });
        (d, m)
    }

    /// Basis of `{x in Z^k : self * x = 0}` (integer kernel of a rational
    /// matrix), as matrix columns.
    pub fn integer_kernel(&self) -> IntMatrix {
        let (_, m) = self.clear_denominators();
        m.kernel()
    }

    /// Canonical basis matrix for the column span over `Z` of a rational
    /// matrix (the lattice generated by the columns). Uniquely determined
    /// by the lattice itself.
    pub fn lattice_canonical(&self) -> RatMatrix {
        let (d, m) = self.clear_denominators();
        let h = col_canonical(&m);
        h.to_rational().scale(&Rat::new(Int::one(), d))
    }
}

/// Canonical basis of the column span over `Z` of an integer matrix:
/// column-style Hermite basis with zero columns dropped.
pub fn col_canonical(m: &IntMatrix) -> IntMatrix {
    let (h, _) = m.transpose().hnf();
    let rank = (0..h.rows())
        .filter(|&i| (0..h.cols()).any(|j| !h[(i, j)].is_zero()))
        .count();
    h.transpose().col_range(0, rank)
}

/// Basis of the sum of the column spans (as lattices).
pub fn lattice_sum(a: &RatMatrix, b: &RatMatrix) -> Result<RatMatrix> {
    Ok(a.hstack(b)?.lattice_canonical())
}

/// Rational solve specialized to the crate scalar; kept as a free function
/// mirroring the exact-linalg operation set.
pub fn rat_solve(a: &RatMatrix, b: &RatMatrix) -> Result<RatMatrix> {
    a.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn im(rows: Vec<Vec<i64>>) -> IntMatrix {
        IntMatrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(Int::from).collect())
                .collect(),
        )
        .unwrap()
    }

    fn is_row_hnf(h: &IntMatrix) -> bool {
        let mut last_pivot: Option<usize> = None;
        let mut seen_zero_row = false;
        for i in 0..h.rows() {
            let pivot = (0..h.cols()).find(|&j| !h[(i, j)].is_zero());
            match pivot {
                None => seen_zero_row = true,
                Some(p) => {
                    if seen_zero_row {
                        return false;
                    }
                    if let Some(lp) = last_pivot {
                        if p <= lp {
                            return false;
                        }
                    }
                    if !h[(i, p)].is_positive() {
                        return false;
                    }
                    for k in 0..i {
                        let e = &h[(k, p)];
                        if e.is_negative() || e >= &h[(i, p)] {
                            return false;
                        }
                    }
                    last_pivot = Some(p);
                }
            }
        }
        true
    }

    #[test]
    fn hnf_identity() {
        let id = IntMatrix::identity(3);
        let (h, u) = id.hnf();
        assert_eq!(h, id);
        assert_eq!(u, id);
    }

    #[test]
    fn hnf_zero() {
        let z = IntMatrix::zero(2, 3);
        let (h, u) = z.hnf();
        assert_eq!(h, z);
        assert_eq!(u, IntMatrix::identity(2));
    }

    #[test]
    fn hnf_defining_equations() {
        let m = im(vec![vec![2, 1], vec![0, 3]]);
        let (h, u) = m.hnf();
        assert_eq!(u.mul(&m).unwrap(), h);
        assert!(u.is_unimodular());
        assert!(is_row_hnf(&h));
        // This matrix is already in Hermite form (1 lies in [0, 3)).
        assert_eq!(h, m);
    }

    #[test]
    fn snf_already_diagonal() {
        let m = im(vec![vec![2, 0], vec![0, 4]]);
        let (d, u, v) = m.snf();
        assert_eq!(d, m);
        assert_eq!(u.mul(&m).unwrap().mul(&v).unwrap(), d);
    }

    #[test]
    fn snf_antidiagonal() {
        let m = im(vec![vec![0, 2], vec![2, 0]]);
        let (d, u, v) = m.snf();
        assert_eq!(u.mul(&m).unwrap().mul(&v).unwrap(), d);
        assert_eq!(d, im(vec![vec![2, 0], vec![0, 2]]));
    }

    #[test]
    fn snf_unimodular_input() {
        let m = im(vec![vec![0, 1], vec![1, 0]]);
        let (d, _, _) = m.snf();
        assert_eq!(d, IntMatrix::identity(2));
    }

    #[test]
    fn solve_identity_and_scalar() {
        let a = RatMatrix::identity(3);
        let b = im(vec![vec![1], vec![2], vec![3]]).to_rational();
        assert_eq!(a.solve(&b).unwrap(), b);

        let a = im(vec![vec![2]]).to_rational();
        let b = im(vec![vec![1]]).to_rational();
        let x = a.solve(&b).unwrap();
        assert_eq!(x[(0, 0)], Rat::new(Int::from(1), Int::from(2)));
    }

    #[test]
    fn solve_inconsistent() {
        let a = im(vec![vec![1], vec![1]]).to_rational();
        let b = im(vec![vec![1], vec![2]]).to_rational();
        assert!(matches!(a.solve(&b), Err(Error::NoSolution)));
    }

    #[test]
    fn saturation_examples() {
        // (2,0) saturates to (1,0).
        let m = im(vec![vec![2], vec![0]]);
        assert_eq!(m.saturation().unwrap(), im(vec![vec![1], vec![0]]));

        // (1,1) is primitive: saturation has the same span.
        let m = im(vec![vec![1], vec![1]]);
        let s = m.saturation().unwrap();
        assert_eq!(col_canonical(&s), col_canonical(&m));

        // diag-ish columns (2,0,0), (0,3,0) saturate to (1,0,0), (0,1,0).
        let m = im(vec![vec![2, 0], vec![0, 3], vec![0, 0]]);
        let s = m.saturation().unwrap();
        assert_eq!(s, im(vec![vec![1, 0], vec![0, 1], vec![0, 0]]));
        assert_eq!(
            m.invariant_factors(),
            vec![Int::from(1), Int::from(6)],
            "SNF invariant factors of the input are 1, 6 (chain form of 2, 3)"
        );
    }

    #[test]
    fn saturation_idempotent_and_index() {
        let m = im(vec![vec![2, 1], vec![0, 3], vec![4, 0]]);
        let s = m.saturation().unwrap();
        assert_eq!(s.saturation().unwrap(), s);
        // Index of the input span in its saturation = product of invariant
        // factors.
        let prod: Int = m.invariant_factors().iter().product();
        let coords = s.to_rational().solve(&m.to_rational()).unwrap();
        let idx = coords.det().unwrap().abs();
        assert_eq!(idx, Rat::from_integer(prod));
    }

    #[test]
    fn saturation_rejects_rank_deficient() {
        let m = im(vec![vec![1, 2], vec![2, 4]]);
        assert!(matches!(m.saturation(), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn kernel_of_rectangular() {
        let m = im(vec![vec![1, 2, 3], vec![2, 4, 6]]);
        let k = m.kernel();
        assert_eq!(k.cols(), 2);
        assert!(m.mul(&k).unwrap().is_zero());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn hnf_snf_reconstruct(rows in 1usize..=8, cols in 1usize..=8, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let m = IntMatrix::from_fn(rows, cols, |_, _| Int::from(rng.gen_range(-20i64..=20)));

            let (h, u) = m.hnf();
            prop_assert!(u.is_unimodular());
            prop_assert_eq!(u.mul(&m).unwrap(), h.clone());
            prop_assert!(is_row_hnf(&h));

            let (d, u2, v2) = m.snf();
            prop_assert!(u2.is_unimodular());
            prop_assert!(v2.is_unimodular());
            prop_assert_eq!(u2.mul(&m).unwrap().mul(&v2).unwrap(), d.clone());
            let k = rows.min(cols);
            for i in 0..k {
                for j in 0..k {
                    if i != j {
                        prop_assert!(d[(i, j)].is_zero());
                    }
                }
                prop_assert!(!d[(i, i)].is_negative());
            }
            // Divisibility chain.
            for i in 0..k.saturating_sub(1) {
                if !d[(i, i)].is_zero() && !d[(i + 1, i + 1)].is_zero() {
                    prop_assert!(d[(i + 1, i + 1)].mod_floor(&d[(i, i)]).is_zero());
                }
            }
        }

        #[test]
        fn solve_roundtrip(n in 1usize..=5, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a = RatMatrix::from_fn(n, n, |_, _| {
                Rat::new(Int::from(rng.gen_range(-9i64..=9)), Int::from(rng.gen_range(1i64..=4)))
            });
            if a.det().unwrap().is_zero() {
                return Ok(());
            }
            let x = RatMatrix::from_fn(n, 1, |_, _| Rat::from_integer(Int::from(rng.gen_range(-9i64..=9))));
            let b = a.mul(&x).unwrap();
            prop_assert_eq!(a.solve(&b).unwrap(), x);
            let ainv = a.inverse().unwrap();
            prop_assert_eq!(a.mul(&ainv).unwrap(), RatMatrix::identity(n));
        }
    }

    #[test]
    fn generic_over_machine_integers() {
        // The normal forms are scalar-generic; i64 works for small cases.
        let m: Matrix<i64> =
            Matrix::from_rows(vec![vec![4, 6], vec![2, 8]]).unwrap();
        let (d, u, v) = m.snf();
        assert_eq!(u.mul(&m).unwrap().mul(&v).unwrap(), d);
        assert_eq!(d[(0, 0)].to_i64().unwrap(), 2);
        assert_eq!(d[(1, 1)].to_i64().unwrap(), 10);
    }
}
