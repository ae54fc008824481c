//! Dense matrices over ℤ and ℚ with exact arithmetic.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::quadratic::Rational;
use crate::zpoly::PolynomialZ;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("matrix shape mismatch: {0}")]
    Shape(&'static str),
    #[error("matrix is singular")]
    Singular,
    #[error("vector is not in the row space")]
    NotInSpan,
}

/// Row-major matrix over a ring of exact numbers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMatrix = Matrix<BigInt>;
pub type QMatrix = Matrix<Rational>;

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, MatrixError> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        if rows.iter().any(|x| x.len() != c) {
            return Err(MatrixError::Shape("ragged rows"));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero + One + PartialEq,
    for<'a> &'a T: core::ops::Mul<&'a T, Output = T> + core::ops::Add<&'a T, Output = T> + core::ops::Sub<&'a T, Output = T>,
{
    pub fn mul(&self, o: &Self) -> Result<Self, MatrixError> {
        if self.cols != o.rows {
            return Err(MatrixError::Shape("product"));
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, o: &Self) -> Result<Self, MatrixError> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(MatrixError::Shape("sum"));
        }
        Ok(Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, o: &Self) -> Result<Self, MatrixError> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(MatrixError::Shape("difference"));
        }
        Ok(Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() })
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x * c)
    }

    /// Row vector times matrix.
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.cols];
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                let b = self.get(i, j);
                if !b.is_zero() {
                    out[j] = &out[j] + &(x * b);
                }
            }
        }
        out
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| &acc + self.get(i, i))
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }
}

impl IntMatrix {
    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self, MatrixError> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn to_rational(&self) -> QMatrix {
        self.map(|x| Rational::from_integer(x.clone()))
    }

    /// `f(self)` by Horner's rule.
    pub fn eval_poly(&self, f: &PolynomialZ) -> IntMatrix {
        let n = self.rows;
        let mut acc = IntMatrix::zeros(n, n);
        for c in f.coeffs().iter().rev() {
            acc = acc.mul(self).expect("square");
            for i in 0..n {
                let v = acc.get(i, i) + c;
                acc.set(i, i, v);
            }
        }
        acc
    }

    /// Characteristic polynomial `det(X·I − self)` by Berkowitz's division-free algorithm.
    pub fn char_poly(&self) -> PolynomialZ {
        let n = self.rows;
        if n == 0 {
            return PolynomialZ::one();
        }
        // c holds coefficients from the leading term down
        let mut c: Vec<BigInt> = vec![BigInt::one(), -self.get(0, 0).clone()];
        for r in 1..n {
            let a = self.get(r, r).clone();
            let row: Vec<BigInt> = (0..r).map(|j| self.get(r, j).clone()).collect();
            let mut col: Vec<BigInt> = (0..r).map(|i| self.get(i, r).clone()).collect();
            // t = [1, -a, -R·C, -R·M·C, ...]
            let mut t = Vec::with_capacity(r + 2);
            t.push(BigInt::one());
            t.push(-a);
            for _ in 0..r {
                let dot: BigInt = row.iter().zip(&col).map(|(x, y)| x * y).sum();
                t.push(-dot);
                col = (0..r).map(|i| (0..r).map(|k| self.get(i, k) * &col[k]).sum()).collect();
            }
            let mut next = vec![BigInt::zero(); r + 2];
            for (i, slot) in next.iter_mut().enumerate() {
                for (j, cj) in c.iter().enumerate() {
                    if i >= j {
                        *slot += &t[i - j] * cj;
                    }
                }
            }
            c = next;
        }
        c.reverse();
        PolynomialZ::new(c)
    }
}

impl QMatrix {
    pub fn from_int(m: &IntMatrix) -> QMatrix {
        m.to_rational()
    }

    pub fn eval_poly(&self, f: &PolynomialZ) -> QMatrix {
        let n = self.rows;
        let mut acc = QMatrix::zeros(n, n);
        for c in f.coeffs().iter().rev() {
            acc = acc.mul(self).expect("square");
            for i in 0..n {
                let v = acc.get(i, i) + Rational::from_integer(c.clone());
                acc.set(i, i, v);
            }
        }
        acc
    }

    /// Basis of `{v : v · self = 0}`, in reduced echelon form.
    pub fn left_kernel(&self) -> Vec<Vec<Rational>> {
        nullspace_of_columns(&self.transpose())
    }

    /// Basis of `{v : self · vᵀ = 0}`, in reduced echelon form.
    pub fn right_kernel(&self) -> Vec<Vec<Rational>> {
        nullspace_of_columns(self)
    }

    pub fn rank(&self) -> usize {
        RowSpace::from_vectors(self.cols, self.to_rows()).dim()
    }

    pub fn inverse(&self) -> Result<QMatrix, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::Shape("inverse of non-square matrix"));
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut inv = QMatrix::identity(n).to_rows();
        for col in 0..n {
            let piv = (col..n).find(|&i| !a[i][col].is_zero()).ok_or(MatrixError::Singular)?;
            a.swap(col, piv);
            inv.swap(col, piv);
            let s = a[col][col].recip();
            for x in a[col].iter_mut() {
                *x *= &s;
            }
            for x in inv[col].iter_mut() {
                *x *= &s;
            }
            for i in 0..n {
                if i != col && !a[i][col].is_zero() {
                    let f = a[i][col].clone();
                    for j in 0..n {
                        let d = &f * &a[col][j];
                        a[i][j] -= d;
                        let d = &f * &inv[col][j];
                        inv[i][j] -= d;
                    }
                }
            }
        }
        QMatrix::from_rows(inv)
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, " [")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Kernel of `m` acting on column vectors, reduced echelon basis.
fn nullspace_of_columns(m: &QMatrix) -> Vec<Vec<Rational>> {
    let n = m.cols;
    let rs = RowSpace::from_vectors(n, m.to_rows()).to_rref();
    let piv = rs.pivots.clone();
    let free: Vec<usize> = (0..n).filter(|c| !piv.contains(c)).collect();
    let mut out = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = vec![Rational::zero(); n];
        v[f] = Rational::one();
        for (row, &pc) in rs.rows.iter().zip(&piv) {
            v[pc] = -row[f].clone();
        }
        out.push(v);
    }
    let k = RowSpace::from_vectors(n, out).to_rref();
    k.rows
}

/// An echelonized subspace of `ℚ^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowSpace {
    n: usize,
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl RowSpace {
    pub fn new(n: usize) -> Self {
        RowSpace { n, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_vectors(n: usize, vs: Vec<Vec<Rational>>) -> Self {
        let mut s = RowSpace::new(n);
        for v in vs {
            s.insert(v);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` against the stored rows in place.
    pub fn reduce(&self, v: &mut [Rational]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    if !r.is_zero() {
                        *x -= &f * r;
                    }
                }
            }
        }
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|x| x.is_zero())
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, mut v: Vec<Rational>) -> bool {
        self.reduce(&mut v);
        match v.iter().position(|x| !x.is_zero()) {
            None => false,
            Some(p) => {
                let s = v[p].recip();
                for x in v.iter_mut() {
                    *x *= &s;
                }
                self.rows.push(v);
                self.pivots.push(p);
                true
            }
        }
    }

    /// Fully reduced echelon form with ascending pivots.
    pub fn to_rref(&self) -> RowSpace {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&i| self.pivots[i]);
        let mut rows: Vec<Vec<Rational>> = order.iter().map(|&i| self.rows[i].clone()).collect();
        let pivots: Vec<usize> = order.iter().map(|&i| self.pivots[i]).collect();
        for k in (0..rows.len()).rev() {
            for i in 0..k {
                let f = rows[i][pivots[k]].clone();
                if !f.is_zero() {
                    let (head, tail) = rows.split_at_mut(k);
                    for (x, r) in head[i].iter_mut().zip(&tail[0]) {
                        if !r.is_zero() {
                            *x -= &f * r;
                        }
                    }
                }
            }
        }
        RowSpace { n: self.n, rows, pivots }
    }

    /// Coordinates of `v` with respect to the reduced echelon basis (requires RREF).
    pub fn coordinates_rref(&self, v: &[Rational]) -> Result<Vec<Rational>, MatrixError> {
        let c: Vec<Rational> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut w = v.to_vec();
        for (row, ci) in self.rows.iter().zip(&c) {
            for (x, r) in w.iter_mut().zip(row) {
                *x -= ci * r;
            }
        }
        if w.iter().any(|x| !x.is_zero()) {
            return Err(MatrixError::NotInSpan);
        }
        Ok(c)
    }

    /// Matrix of the action `v ↦ v·m` restricted to this (invariant) subspace, basis = rows (RREF).
    pub fn restrict(&self, m: &QMatrix) -> Result<QMatrix, MatrixError> {
        let rows = self.rows.iter().map(|b| self.coordinates_rref(&m.apply(b))).collect::<Result<Vec<_>, _>>()?;
        if rows.is_empty() {
            return Ok(QMatrix::zeros(0, 0));
        }
        QMatrix::from_rows(rows)
    }

    pub fn intersect(&self, o: &RowSpace) -> RowSpace {
        // solve Σ a_i s_i = Σ b_j o_j via the kernel of the stacked matrix
        let n = self.n;
        let k = self.rows.len();
        let mut stacked: Vec<Vec<Rational>> = self.rows.clone();
        stacked.extend(o.rows.iter().map(|r| r.iter().map(|x| -x.clone()).collect()));
        if stacked.is_empty() {
            return RowSpace::new(n);
        }
        let m = QMatrix::from_rows(stacked).expect("uniform rows");
        let ker = m.left_kernel();
        let vs = ker
            .into_iter()
            .map(|c| {
                let mut v = vec![Rational::zero(); n];
                for (ci, r) in c.iter().take(k).zip(&self.rows) {
                    for (x, y) in v.iter_mut().zip(r) {
                        *x += ci * y;
                    }
                }
                v
            })
            .collect();
        RowSpace::from_vectors(n, vs).to_rref()
    }
}
