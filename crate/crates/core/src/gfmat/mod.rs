//! Matrices and modules over prime fields `F_p`, `p < 256`.
//!
//! Rows are bit-packed into 64-bit words for `p = 2` and stored one byte per
//! entry otherwise. All algorithms work with row operations, and matrices act
//! on row vectors from the right.

mod meataxe;
mod module;
mod summands;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;


pub use meataxe::{chop, chop_into, is_irreducible, is_irreducible_with_budget, Certificate, Constituent, ConstituentLibrary, Irreducibility, Recipe, NORTON_BUDGET};
pub use summands::{algebra_regular_module, cartan_matrix, endomorphism_basis, hom_basis, is_local_algebra, isomorphic_indecomposables, regular_module_from_basis, summands, CartanData, Summand};
pub use module::{fixed_space, spin, standard_basis, standard_form, ModuleRep};


use crate::fp::inv_mod;
use crate::fppoly::FpPoly;
use crate::perm::{Acts, GroupElem};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GfError {
    #[error("{0} is not a prime below 256")]
    BadPrime(u64),
    #[error("dimension mismatch: {0}")]
    Dimension(&'static str),
    #[error("matrix is singular")]
    Singular,
    #[error("seed vector does not generate the module (spans {spanned} of {dim})")]
    SeedDoesNotGenerate { spanned: usize, dim: usize },
    #[error("random element budget of {0} exhausted; increase the budget")]
    BudgetExhausted(usize),
    #[error("subspace is not invariant under the action")]
    NotInvariant,
}

pub fn check_prime(p: u64) -> Result<u8, GfError> {
    if p < 256 && crate::fp::is_prime(p) {
        Ok(p as u8)
    } else {
        Err(GfError::BadPrime(p))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Data {
    Bits(Vec<u64>),
    Bytes(Vec<u8>),
}

/// A row vector over `F_p`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqVec {
    p: u8,
    len: u32,
    data: Data,
}

impl FqVec {
    pub fn zero(p: u8, len: usize) -> Self {
        let data = if p == 2 { Data::Bits(vec![0; len.div_ceil(64)]) } else { Data::Bytes(vec![0; len]) };
        FqVec { p, len: len as u32, data }
    }

    pub fn unit(p: u8, len: usize, i: usize) -> Self {
        let mut v = FqVec::zero(p, len);
        v.set(i, 1);
        v
    }

    pub fn from_entries(p: u8, entries: &[u8]) -> Self {
        let mut v = FqVec::zero(p, entries.len());
        for (i, &e) in entries.iter().enumerate() {
            v.set(i, e % p);
        }
        v
    }

    pub fn from_i64(p: u8, entries: &[i64]) -> Self {
        let mut v = FqVec::zero(p, entries.len());
        for (i, &e) in entries.iter().enumerate() {
            v.set(i, e.rem_euclid(p as i64) as u8);
        }
        v
    }

    #[inline]
    pub fn p(&self) -> u8 {
        self.p
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        match &self.data {
            Data::Bits(w) => ((w[i >> 6] >> (i & 63)) & 1) as u8,
            Data::Bytes(b) => b[i],
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: u8) {
        match &mut self.data {
            Data::Bits(w) => {
                if v & 1 == 1 {
                    w[i >> 6] |= 1 << (i & 63);
                } else {
                    w[i >> 6] &= !(1 << (i & 63));
                }
            }
            Data::Bytes(b) => b[i] = v,
        }
    }

    pub fn entries(&self) -> Vec<u8> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        match &self.data {
            Data::Bits(w) => w.iter().all(|&x| x == 0),
            Data::Bytes(b) => b.iter().all(|&x| x == 0),
        }
    }

    pub fn first_nonzero(&self) -> Option<usize> {
        match &self.data {
            Data::Bits(w) => w
                .iter()
                .enumerate()
                .find(|(_, &x)| x != 0)
                .map(|(k, &x)| k * 64 + x.trailing_zeros() as usize),
            Data::Bytes(b) => b.iter().position(|&x| x != 0),
        }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, other: &FqVec, c: u8) {
        if c == 0 {
            return;
        }
        let p = self.p as u16;
        match (&mut self.data, &other.data) {
            (Data::Bits(a), Data::Bits(b)) => {
                for (x, y) in a.iter_mut().zip(b) {
                    *x ^= y;
                }
            }
            (Data::Bytes(a), Data::Bytes(b)) => {
                let c = c as u16;
                for (x, &y) in a.iter_mut().zip(b) {
                    if y != 0 {
                        *x = ((*x as u16 + c * y as u16) % p) as u8;
                    }
                }
            }
            _ => unreachable!("mixed characteristic"),
        }
    }

    pub fn scale(&mut self, c: u8) {
        match &mut self.data {
            Data::Bits(w) => {
                if c.is_multiple_of(2) {
                    w.iter_mut().for_each(|x| *x = 0);
                }
            }
            Data::Bytes(b) => {
                let p = self.p as u16;
                for x in b.iter_mut() {
                    *x = ((*x as u16 * c as u16) % p) as u8;
                }
            }
        }
    }

    pub fn scaled(&self, c: u8) -> FqVec {
        let mut v = self.clone();
        v.scale(c);
        v
    }

    pub fn dot(&self, other: &FqVec) -> u8 {
        let p = self.p as u32;
        match (&self.data, &other.data) {
            (Data::Bits(a), Data::Bits(b)) => {
                (a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum::<u32>() % 2) as u8
            }
            (Data::Bytes(a), Data::Bytes(b)) => {
                (a.iter().zip(b).fold(0u32, |acc, (&x, &y)| (acc + x as u32 * y as u32) % p)) as u8
            }
            _ => unreachable!("mixed characteristic"),
        }
    }

    /// Makes the first nonzero entry 1; returns its position.
    pub fn normalize(&mut self) -> Option<usize> {
        let i = self.first_nonzero()?;
        let c = self.get(i);
        if c != 1 {
            self.scale(inv_u8(c, self.p));
        }
        Some(i)
    }

    /// Entries at the given positions.
    pub fn select(&self, cols: &[usize]) -> FqVec {
        let mut v = FqVec::zero(self.p, cols.len());
        for (k, &c) in cols.iter().enumerate() {
            v.set(k, self.get(c));
        }
        v
    }

    /// Concatenation `[self | other]`.
    pub fn concat(&self, other: &FqVec) -> FqVec {
        let mut v = FqVec::zero(self.p, self.len() + other.len());
        for i in 0..self.len() {
            v.set(i, self.get(i));
        }
        for i in 0..other.len() {
            v.set(self.len() + i, other.get(i));
        }
        v
    }

    /// Packed storage size in bytes.
    pub fn storage_bytes(&self) -> usize {
        match &self.data {
            Data::Bits(_) => self.len().div_ceil(8),
            Data::Bytes(b) => b.len(),
        }
    }
}

impl fmt::Debug for FqVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.len() {
            if self.p > 10 && i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", self.get(i))?;
        }
        write!(f, "]")
    }
}

#[inline]
pub(crate) fn inv_u8(a: u8, p: u8) -> u8 {
    inv_mod(a as u64, p as u64).expect("inverse of zero") as u8
}

#[inline]
pub(crate) fn neg_u8(a: u8, p: u8) -> u8 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

/// A dense matrix over `F_p` stored by rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FqMatrix {
    p: u8,
    cols: usize,
    rows: Vec<FqVec>,
}

impl FqMatrix {
    pub fn zero(p: u8, rows: usize, cols: usize) -> Self {
        FqMatrix { p, cols, rows: vec![FqVec::zero(p, cols); rows] }
    }

    pub fn identity(p: u8, n: usize) -> Self {
        FqMatrix { p, cols: n, rows: (0..n).map(|i| FqVec::unit(p, n, i)).collect() }
    }

    pub fn from_rows(p: u8, cols: usize, rows: Vec<FqVec>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        FqMatrix { p, cols, rows }
    }

    /// Row-major entries, reduced modulo `p`.
    pub fn from_i64(p: u8, rows: usize, cols: usize, entries: &[i64]) -> Result<Self, GfError> {
        if entries.len() != rows * cols {
            return Err(GfError::Dimension("entry count"));
        }
        Ok(FqMatrix {
            p,
            cols,
            rows: entries.chunks(cols.max(1)).take(rows).map(|c| FqVec::from_i64(p, c)).collect(),
        })
    }

    /// Permutation matrix sending `e_i` to `e_{perm(i)}`.
    pub fn permutation(p: u8, perm: &crate::perm::Perm) -> Self {
        let n = perm.degree();
        FqMatrix { p, cols: n, rows: (0..n).map(|i| FqVec::unit(p, n, perm.image(i as u32) as usize)).collect() }
    }

    #[inline]
    pub fn p(&self) -> u8 {
        self.p
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &FqVec {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[FqVec] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<FqVec> {
        self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.rows[i].set(j, v)
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.cols
    }

    /// `v · self`.
    pub fn apply(&self, v: &FqVec) -> FqVec {
        let mut out = FqVec::zero(self.p, self.cols);
        match &v.data {
            Data::Bits(w) => {
                for (k, &word) in w.iter().enumerate() {
                    let mut x = word;
                    while x != 0 {
                        let b = x.trailing_zeros() as usize;
                        out.add_scaled(&self.rows[k * 64 + b], 1);
                        x &= x - 1;
                    }
                }
            }
            Data::Bytes(b) => {
                for (k, &c) in b.iter().enumerate() {
                    out.add_scaled(&self.rows[k], c);
                }
            }
        }
        out
    }

    pub fn mul_mat(&self, o: &FqMatrix) -> FqMatrix {
        FqMatrix { p: self.p, cols: o.cols, rows: self.rows.iter().map(|r| o.apply(r)).collect() }
    }

    pub fn add_mat(&self, o: &FqMatrix) -> FqMatrix {
        let mut m = self.clone();
        for (a, b) in m.rows.iter_mut().zip(&o.rows) {
            a.add_scaled(b, 1);
        }
        m
    }

    pub fn add_scaled_mat(&mut self, o: &FqMatrix, c: u8) {
        for (a, b) in self.rows.iter_mut().zip(&o.rows) {
            a.add_scaled(b, c);
        }
    }

    pub fn sub_mat(&self, o: &FqMatrix) -> FqMatrix {
        let mut m = self.clone();
        m.add_scaled_mat(o, neg_u8(1, self.p));
        m
    }

    pub fn scaled(&self, c: u8) -> FqMatrix {
        FqMatrix { p: self.p, cols: self.cols, rows: self.rows.iter().map(|r| r.scaled(c)).collect() }
    }

    pub fn transpose(&self) -> FqMatrix {
        let mut t = FqMatrix::zero(self.p, self.cols, self.nrows());
        for i in 0..self.nrows() {
            for j in 0..self.cols {
                let v = self.get(i, j);
                if v != 0 {
                    t.set(j, i, v);
                }
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_zero())
    }

    pub fn trace(&self) -> u8 {
        let p = self.p as u32;
        (0..self.nrows().min(self.cols)).fold(0u32, |a, i| (a + self.get(i, i) as u32) % p) as u8
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::new(self.p, self.cols);
        for r in &self.rows {
            e.insert(r.clone());
        }
        e.dim()
    }

    pub fn inverse(&self) -> Result<FqMatrix, GfError> {
        if !self.is_square() {
            return Err(GfError::Dimension("inverse of non-square matrix"));
        }
        let n = self.cols;
        let p = self.p;
        let mut a: Vec<FqVec> = self.rows.clone();
        let mut b: Vec<FqVec> = (0..n).map(|i| FqVec::unit(p, n, i)).collect();
        for c in 0..n {
            let piv = (c..n).find(|&r| a[r].get(c) != 0).ok_or(GfError::Singular)?;
            a.swap(c, piv);
            b.swap(c, piv);
            let inv = inv_u8(a[c].get(c), p);
            a[c].scale(inv);
            b[c].scale(inv);
            for r in 0..n {
                if r != c {
                    let f = a[r].get(c);
                    if f != 0 {
                        let m = neg_u8(f, p);
                        let (ac, bc) = (a[c].clone(), b[c].clone());
                        a[r].add_scaled(&ac, m);
                        b[r].add_scaled(&bc, m);
                    }
                }
            }
        }
        Ok(FqMatrix { p, cols: n, rows: b })
    }

    /// Basis of `{v : v · self = 0}`.
    pub fn left_nullspace(&self) -> Vec<FqVec> {
        let n = self.nrows();
        let p = self.p;
        let mut ech: Vec<(usize, FqVec, FqVec)> = Vec::new();
        let mut null = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            let mut v = row.clone();
            let mut combo = FqVec::unit(p, n, i);
            for (piv, r, c) in &ech {
                let f = v.get(*piv);
                if f != 0 {
                    let m = neg_u8(f, p);
                    v.add_scaled(r, m);
                    combo.add_scaled(c, m);
                }
            }
            match v.first_nonzero() {
                None => null.push(combo),
                Some(piv) => {
                    let inv = inv_u8(v.get(piv), p);
                    v.scale(inv);
                    combo.scale(inv);
                    ech.push((piv, v, combo));
                }
            }
        }
        null
    }

    /// Basis of `{v : self · v^T = 0}` as row vectors.
    pub fn right_nullspace(&self) -> Vec<FqVec> {
        self.transpose().left_nullspace()
    }

    pub fn pow(&self, mut e: u64) -> FqMatrix {
        let mut base = self.clone();
        let mut acc = FqMatrix::identity(self.p, self.cols);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mat(&base);
            }
            base = base.mul_mat(&base);
            e >>= 1;
        }
        acc
    }

    /// `f(self)` by Horner's rule.
    pub fn eval_poly(&self, f: &FpPoly) -> FqMatrix {
        let p = self.p;
        let n = self.cols;
        let mut acc = FqMatrix::zero(p, n, n);
        for &c in f.coeffs().iter().rev() {
            acc = acc.mul_mat(self);
            let c = c as u8;
            if c != 0 {
                for i in 0..n {
                    let v = ((acc.get(i, i) as u16 + c as u16) % p as u16) as u8;
                    acc.set(i, i, v);
                }
            }
        }
        acc
    }

    /// Characteristic polynomial via reduction to Hessenberg form.
    pub fn char_poly(&self) -> FpPoly {
        let n = self.cols;
        let p = self.p as u64;
        let mut h: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| self.get(i, j) as u64).collect()).collect();
        let mul = |a: u64, b: u64| a * b % p;
        let sub = |a: u64, b: u64| (a + p - b) % p;
        // similarity transforms to upper Hessenberg form
        for m in 1..n.saturating_sub(1) {
            let Some(i) = (m..n).find(|&i| h[i][m - 1] != 0) else { continue };
            if i != m {
                h.swap(i, m);
                for row in h.iter_mut() {
                    row.swap(i, m);
                }
            }
            let t = h[m][m - 1];
            let tinv = inv_mod(t, p).unwrap();
            for i in m + 1..n {
                let u = mul(h[i][m - 1], tinv);
                if u == 0 {
                    continue;
                }
                for j in 0..n {
                    let hm = h[m][j];
                    h[i][j] = sub(h[i][j], mul(u, hm));
                }
                for row in h.iter_mut() {
                    let hi = row[i];
                    row[m] = (row[m] + mul(u, hi)) % p;
                }
            }
        }
        // recurrence for characteristic polynomials of leading blocks
        let mut polys: Vec<FpPoly> = vec![FpPoly::one(p)];
        for m in 0..n {
            let x_minus = FpPoly::new(p, vec![(p - h[m][m]) % p, 1]);
            let mut pm = x_minus.mul(&polys[m]);
            let mut t = 1u64;
            for i in 1..=m {
                t = mul(t, h[m - i + 1][m - i]);
                let c = mul(t, h[m - i][m]);
                if c != 0 {
                    pm = pm.sub(&polys[m - i].scale(c));
                }
            }
            polys.push(pm);
        }
        polys.pop().unwrap()
    }

    /// Hex-packed rows for `p = 2`: each row as little-endian 64-bit words in hex.
    pub fn to_hex_rows(&self) -> Option<Vec<alloc::string::String>> {
        if self.p != 2 {
            return None;
        }
        Some(
            self.rows
                .iter()
                .map(|r| match &r.data {
                    Data::Bits(w) => w.iter().map(|x| alloc::format!("{:016x}", x)).collect(),
                    Data::Bytes(_) => unreachable!(),
                })
                .collect(),
        )
    }

    pub fn from_hex_rows(cols: usize, rows: &[&str]) -> Result<Self, GfError> {
        let words = cols.div_ceil(64);
        let mut out = Vec::with_capacity(rows.len());
        for r in rows {
            if r.len() != words * 16 {
                return Err(GfError::Dimension("hex row length"));
            }
            let mut w = Vec::with_capacity(words);
            for k in 0..words {
                let x = u64::from_str_radix(&r[k * 16..(k + 1) * 16], 16)
                    .map_err(|_| GfError::Dimension("hex digit"))?;
                w.push(x);
            }
            if !cols.is_multiple_of(64) && w[words - 1] >> (cols % 64) != 0 {
                return Err(GfError::Dimension("bits beyond row length"));
            }
            out.push(FqVec { p: 2, len: cols as u32, data: Data::Bits(w) });
        }
        Ok(FqMatrix { p: 2, cols, rows: out })
    }
}

impl fmt::Debug for FqMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FqMatrix(p={}, {}x{})", self.p, self.nrows(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {:?}", r)?;
        }
        Ok(())
    }
}

impl GroupElem for FqMatrix {
    fn mul(&self, other: &Self) -> Self {
        self.mul_mat(other)
    }

    fn inv(&self) -> Self {
        self.inverse().expect("group element must be invertible")
    }

    fn identity_like(&self) -> Self {
        FqMatrix::identity(self.p, self.cols)
    }

    fn is_identity(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, r)| *r == FqVec::unit(self.p, self.cols, i))
    }
}

impl Acts<FqVec> for FqMatrix {
    #[inline]
    fn act(&self, x: &FqVec) -> FqVec {
        self.apply(x)
    }
}

/// A subspace basis in semi-echelon form: row `i` has a 1 at `pivots[i]` and
/// every later row vanishes there.
#[derive(Debug, Clone)]
pub struct Echelon {
    p: u8,
    n: usize,
    rows: Vec<FqVec>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(p: u8, n: usize) -> Self {
        Echelon { p, n, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_vectors(p: u8, n: usize, vs: &[FqVec]) -> Self {
        let mut e = Echelon::new(p, n);
        for v in vs {
            e.insert(v.clone());
        }
        e
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[FqVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` in place; returns the coefficients used.
    pub fn reduce(&self, v: &mut FqVec) -> Vec<u8> {
        let mut coeffs = vec![0u8; self.rows.len()];
        for (i, (r, &c)) in self.rows.iter().zip(&self.pivots).enumerate() {
            let f = v.get(c);
            if f != 0 {
                coeffs[i] = f;
                v.add_scaled(r, neg_u8(f, self.p));
            }
        }
        coeffs
    }

    pub fn contains(&self, v: &FqVec) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_zero()
    }

    /// Adds `v` if independent; returns the new row index.
    pub fn insert(&mut self, mut v: FqVec) -> Option<usize> {
        self.reduce(&mut v);
        let piv = v.normalize()?;
        self.rows.push(v);
        self.pivots.push(piv);
        Some(self.rows.len() - 1)
    }

    /// Coordinates of `v` in terms of the rows, if `v` lies in the span.
    pub fn coordinates(&self, v: &FqVec) -> Option<Vec<u8>> {
        let mut w = v.clone();
        let c = self.reduce(&mut w);
        w.is_zero().then_some(c)
    }

    /// Reduced row echelon form, rows sorted by pivot.
    pub fn to_rref(&self) -> Echelon {
        let mut idx: Vec<usize> = (0..self.rows.len()).collect();
        idx.sort_by_key(|&i| self.pivots[i]);
        let mut rows: Vec<FqVec> = idx.iter().map(|&i| self.rows[i].clone()).collect();
        let pivots: Vec<usize> = idx.iter().map(|&i| self.pivots[i]).collect();
        for k in (0..rows.len()).rev() {
            let pk = pivots[k];
            let rk = rows[k].clone();
            for (j, r) in rows.iter_mut().enumerate() {
                if j != k {
                    let f = r.get(pk);
                    if f != 0 {
                        r.add_scaled(&rk, neg_u8(f, self.p));
                    }
                }
            }
        }
        Echelon { p: self.p, n: self.n, rows, pivots }
    }

    pub fn to_matrix(&self) -> FqMatrix {
        FqMatrix::from_rows(self.p, self.n, self.rows.clone())
    }

    /// Columns that carry no pivot.
    pub fn non_pivots(&self) -> Vec<usize> {
        let mut is_piv = vec![false; self.n];
        for &c in &self.pivots {
            is_piv[c] = true;
        }
        (0..self.n).filter(|&c| !is_piv[c]).collect()
    }
}

/// Basis of the intersection of two subspaces.
pub fn intersect(p: u8, n: usize, a: &[FqVec], b: &[FqVec]) -> Vec<FqVec> {
    // v = Σ x_i a_i = Σ y_j b_j  ⇔  (x, -y) in the left null space of [A; B]
    let mut rows = a.to_vec();
    rows.extend(b.iter().cloned());
    let m = FqMatrix::from_rows(p, n, rows);
    let out: Vec<FqVec> = m
        .left_nullspace()
        .into_iter()
        .map(|c| {
            let mut v = FqVec::zero(p, n);
            for (i, ai) in a.iter().enumerate() {
                v.add_scaled(ai, c.get(i));
            }
            v
        })
        .collect();
    Echelon::from_vectors(p, n, &out).rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_matrix(rng: &mut ChaCha8Rng, p: u8, r: usize, c: usize) -> FqMatrix {
        let e: Vec<i64> = (0..r * c).map(|_| rng.gen_range(0..p as i64)).collect();
        FqMatrix::from_i64(p, r, c, &e).unwrap()
    }

    #[test]
    fn bit_and_byte_rows_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(&mut rng, 2, 70, 70);
        let b = random_matrix(&mut rng, 2, 70, 70);
        let c = a.mul_mat(&b);
        for i in 0..70 {
            for j in 0..70 {
                let want = (0..70).map(|k| a.get(i, k) & b.get(k, j)).fold(0, |x, y| x ^ y);
                assert_eq!(c.get(i, j), want);
            }
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for &p in &[2u8, 3, 5, 11, 251] {
            loop {
                let a = random_matrix(&mut rng, p, 9, 9);
                if let Ok(ai) = a.inverse() {
                    assert!(a.mul_mat(&ai).is_identity());
                    break;
                }
            }
        }
    }

    #[test]
    fn nullspace_is_annihilated() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 5, 8, 5);
        let ns = a.left_nullspace();
        assert_eq!(ns.len(), 8 - a.rank());
        for v in ns {
            assert!(a.apply(&v).is_zero());
        }
    }

    #[test]
    fn char_poly_annihilates() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for &p in &[2u8, 3, 7] {
            let a = random_matrix(&mut rng, p, 7, 7);
            let f = a.char_poly();
            assert_eq!(f.degree(), 7);
            assert!(a.eval_poly(&f).is_zero());
        }
    }

    #[test]
    fn hex_rows_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_matrix(&mut rng, 2, 3, 100);
        let hex = a.to_hex_rows().unwrap();
        let refs: Vec<&str> = hex.iter().map(|s| s.as_str()).collect();
        assert_eq!(FqMatrix::from_hex_rows(100, &refs).unwrap(), a);
    }

    #[test]
    fn rref_coordinates_are_pivot_entries() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_matrix(&mut rng, 7, 4, 9);
        let e = Echelon::from_vectors(7, 9, a.rows()).to_rref();
        let mut v = FqVec::zero(7, 9);
        for (k, r) in e.rows().iter().enumerate() {
            v.add_scaled(r, (k as u8 + 2) % 7);
        }
        let sel = v.select(e.pivots());
        for k in 0..e.dim() {
            assert_eq!(sel.get(k), (k as u8 + 2) % 7);
        }
    }

    proptest! {
        #[test]
        fn char_poly_is_similarity_invariant(seed in any::<u64>(), pi in 0usize..3) {
            let p = [2u8, 3, 11][pi];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, p, 6, 6);
            let t = loop {
                let t = random_matrix(&mut rng, p, 6, 6);
                if t.inverse().is_ok() { break t; }
            };
            let b = t.mul_mat(&a).mul_mat(&t.inverse().unwrap());
            prop_assert_eq!(a.char_poly(), b.char_poly());
        }
    }
}
