use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

fn all_finite(data: &[C64]) -> bool {
    data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Dense complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector {
    data: Vec<C64>,
}

impl CVector {
    /// Builds a vector, rejecting empty or non-finite input.
    pub fn new(data: Vec<C64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Shape("vector must have at least one entry".into()));
        }
        if !all_finite(&data) {
            return Err(Error::NonFinite("vector"));
        }
        Ok(Self { data })
    }

    pub(crate) fn from_vec_unchecked(data: Vec<C64>) -> Self {
        debug_assert!(!data.is_empty());
        Self { data }
    }

    pub fn zeros(len: usize) -> Self {
        assert!(len >= 1, "vector length must be positive");
        Self { data: vec![ZERO; len] }
    }

    pub fn from_fn(len: usize, f: impl FnMut(usize) -> C64) -> Self {
        assert!(len >= 1, "vector length must be positive");
        Self { data: (0..len).map(f).collect() }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, C64> {
        self.data.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Hermitian inner product `self^H other`.
    pub fn dot(&self, other: &CVector) -> C64 {
        debug_assert_eq!(self.len(), other.len());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scale(&self, s: C64) -> CVector {
        Self { data: self.data.iter().map(|z| z * s).collect() }
    }

    /// `self += alpha * x`
    pub fn axpy(&mut self, alpha: C64, x: &CVector) {
        debug_assert_eq!(self.len(), x.len());
        for (y, xi) in self.data.iter_mut().zip(&x.data) {
            *y += alpha * xi;
        }
    }

    pub fn sub(&self, other: &CVector) -> Result<CVector> {
        if self.len() != other.len() {
            return Err(Error::Shape(format!(
                "cannot subtract length {} from length {}",
                other.len(),
                self.len()
            )));
        }
        Ok(Self {
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }
}

impl Index<usize> for CVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for CVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.data[i]
    }
}

/// Dense complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("matrix dimensions {rows}x{cols} must be positive")));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if !all_finite(&data) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Stacks equal-length vectors as columns.
    pub fn from_columns(columns: &[CVector]) -> Result<Self> {
        let first = columns
            .first()
            .ok_or_else(|| Error::Shape("no columns supplied".into()))?;
        let rows = first.len();
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::Shape("columns have unequal lengths".into()));
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i]))
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
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

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [C64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> CVector {
        CVector::from_fn(self.rows, |i| self.data[i * self.cols + j])
    }

    pub fn set_column(&mut self, j: usize, v: &CVector) {
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self.data[i * self.cols + j] = v[i];
        }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Result<CMatrix> {
        if idx.is_empty() {
            return Err(Error::Shape("empty column selection".into()));
        }
        if let Some(&bad) = idx.iter().find(|&&j| j >= self.cols) {
            return Err(Error::IndexOutOfRange(format!("column {bad} of {}", self.cols)));
        }
        Ok(Self::from_fn(self.rows, idx.len(), |i, k| self[(i, idx[k])]))
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.data)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> CMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                for (o, b) in orow.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self^H * rhs` without forming the adjoint.
    pub fn adjoint_matmul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.rows != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply adjoint of {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.cols, rhs.cols);
        for k in 0..self.rows {
            let brow = rhs.row(k);
            for (i, a) in self.row(k).iter().enumerate() {
                let a = a.conj();
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &CVector) -> Result<CVector> {
        if self.cols != x.len() {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok(CVector::from_fn(self.rows, |i| {
            self.row(i).iter().zip(x.iter()).map(|(a, b)| a * b).sum()
        }))
    }

    /// `self^H * x`
    pub fn adjoint_mul_vec(&self, x: &CVector) -> Result<CVector> {
        if self.rows != x.len() {
            return Err(Error::Shape(format!(
                "cannot multiply adjoint of {}x{} by vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        let mut out = vec![ZERO; self.cols];
        for (k, xk) in x.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(k)) {
                *o += a.conj() * xk;
            }
        }
        Ok(CVector::from_vec_unchecked(out))
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    fn zip_with(&self, rhs: &CMatrix, op: impl Fn(C64, C64) -> C64) -> Result<CMatrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::Shape(format!(
                "elementwise op on {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| op(*a, *b)).collect(),
        })
    }

    pub fn add(&self, rhs: &CMatrix) -> Result<CMatrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &CMatrix) -> Result<CMatrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Kronecker product of two column vectors; block `m` of the result is `b[m] * a`.
pub fn kron(b: &CVector, a: &CVector) -> CVector {
    let mut out = Vec::with_capacity(b.len() * a.len());
    for bm in b.iter() {
        out.extend(a.iter().map(|ai| bm * ai));
    }
    CVector::from_vec_unchecked(out)
}

/// Column-stacking vectorization.
pub fn vec(m: &CMatrix) -> CVector {
    let mut out = Vec::with_capacity(m.rows * m.cols);
    for j in 0..m.cols {
        out.extend((0..m.rows).map(|i| m[(i, j)]));
    }
    CVector::from_vec_unchecked(out)
}

/// Inverse of [`vec`]: consecutive runs of `rows` entries become columns.
pub fn devec(v: &CVector, rows: usize) -> Result<CMatrix> {
    if rows == 0 || !v.len().is_multiple_of(rows) {
        return Err(Error::Shape(format!(
            "length {} is not divisible into columns of {rows} rows",
            v.len()
        )));
    }
    let cols = v.len() / rows;
    Ok(CMatrix::from_fn(rows, cols, |i, j| v[j * rows + i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(CMatrix::new(0, 2, vec![]).is_err());
        assert!(CMatrix::new(2, 2, vec![ONE; 3]).is_err());
        assert!(matches!(
            CMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]),
            Err(Error::NonFinite(_))
        ));
        assert!(CVector::new(vec![]).is_err());
        assert!(CVector::new(vec![c(0.0, f64::INFINITY)]).is_err());
    }

    #[test]
    fn kron_examples() {
        let a = CVector::new(vec![c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        let one = CVector::new(vec![ONE]).unwrap();
        assert_eq!(kron(&one, &a), a);
        let e1 = CVector::new(vec![ONE, ZERO]).unwrap();
        let k = kron(&e1, &a);
        assert_eq!(k.as_slice(), &[c(2.0, 0.0), c(3.0, 0.0), ZERO, ZERO]);
    }

    #[test]
    fn vec_of_identity() {
        let v = vec(&CMatrix::identity(2));
        assert_eq!(v.as_slice(), &[ONE, ZERO, ZERO, ONE]);
    }

    #[test]
    fn devec_rejects_indivisible_length() {
        let v = CVector::zeros(5);
        assert!(matches!(devec(&v, 2), Err(Error::Shape(_))));
        assert!(devec(&v, 0).is_err());
    }

    #[test]
    fn matmul_shape_checked() {
        let a = CMatrix::zeros(2, 3);
        assert!(a.matmul(&CMatrix::zeros(2, 3)).is_err());
        assert_eq!(a.matmul(&CMatrix::zeros(3, 4)).unwrap().shape(), (2, 4));
    }

    #[test]
    fn adjoint_products_agree_with_explicit_adjoint() {
        let a = CMatrix::from_fn(3, 2, |i, j| c(i as f64 + 0.5, j as f64 - 1.0));
        let b = CMatrix::from_fn(3, 4, |i, j| c((i * j) as f64, 1.0 - i as f64));
        assert_eq!(a.adjoint_matmul(&b).unwrap(), a.adjoint().matmul(&b).unwrap());
        let x = b.column(2);
        assert_eq!(
            a.adjoint_mul_vec(&x).unwrap(),
            a.adjoint().mul_vec(&x).unwrap()
        );
    }
}
