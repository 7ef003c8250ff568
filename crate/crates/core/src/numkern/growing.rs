//! QR factorization grown one column at a time, for greedy pursuits that
//! refit least squares after every new atom.

use super::matrix::{CVector, C64, ZERO};
use super::qr::CONDITION_LIMIT;
use crate::error::{Error, Result};

/// Thin `A = Q R` of the columns pushed so far (classical Gram-Schmidt with
/// one reorthogonalization pass).
#[derive(Debug, Clone)]
pub struct GrowingQr {
    rows: usize,
    q: Vec<Vec<C64>>,
    /// Column `j` of `R`, entries `0..=j`.
    r: Vec<Vec<C64>>,
    diag_max: f64,
    diag_min: f64,
}

impl GrowingQr {
    pub fn new(rows: usize) -> Self {
        Self { rows, q: Vec::new(), r: Vec::new(), diag_max: 0.0, diag_min: f64::INFINITY }
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// Orthonormal column `k`.
    pub fn q_column(&self, k: usize) -> &[C64] {
        &self.q[k]
    }

    fn coefficients(&self, v: &[C64]) -> Vec<C64> {
        self.q.iter().map(|qk| qk.iter().zip(v).map(|(a, b)| a.conj() * b).sum()).collect()
    }

    /// Appends a column. Fails without modifying `self` when the column is
    /// (numerically) in the span of the previous ones.
    pub fn push(&mut self, col: &CVector) -> Result<()> {
        if col.len() != self.rows {
            return Err(Error::Shape(format!(
                "column has length {}, factorization has {} rows",
                col.len(),
                self.rows
            )));
        }
        let norm = col.norm();
        let mut v = col.as_slice().to_vec();
        let mut rcol = vec![ZERO; self.q.len() + 1];
        for _ in 0..2 {
            let c = self.coefficients(&v);
            for (k, ck) in c.iter().enumerate() {
                rcol[k] += ck;
                for (x, qk) in v.iter_mut().zip(&self.q[k]) {
                    *x -= ck * qk;
                }
            }
        }
        let rest = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let diag_max = self.diag_max.max(rest);
        let diag_min = self.diag_min.min(rest);
        if !(rest > norm / CONDITION_LIMIT) || !(diag_max <= CONDITION_LIMIT * diag_min) {
            let condition = if rest > 0.0 { (norm / rest).max(diag_max / diag_min) } else { f64::INFINITY };
            return Err(Error::Singular { condition, threshold: CONDITION_LIMIT });
        }
        let last = rcol.len() - 1;
        rcol[last] = C64::new(rest, 0.0);
        self.q.push(v.into_iter().map(|z| z / rest).collect());
        self.r.push(rcol);
        self.diag_max = diag_max;
        self.diag_min = diag_min;
        Ok(())
    }

    /// Least-squares coefficients `argmin_x ||y - A x||`.
    pub fn solve(&self, y: &CVector) -> Result<CVector> {
        if y.len() != self.rows {
            return Err(Error::Shape(format!(
                "right-hand side has length {}, factorization has {} rows",
                y.len(),
                self.rows
            )));
        }
        let b = self.coefficients(y.as_slice());
        let n = b.len();
        let mut x = vec![ZERO; n];
        for i in (0..n).rev() {
            let mut acc = b[i];
            for j in i + 1..n {
                acc -= self.r[j][i] * x[j];
            }
            x[i] = acc / self.r[i][i];
        }
        if x.is_empty() {
            return Err(Error::Shape("no columns to solve for".into()));
        }
        Ok(CVector::from_vec_unchecked(x))
    }

    /// Removes from `v` its component along the newest column.
    pub fn deflate_last(&self, v: &mut [C64]) {
        if let Some(q) = self.q.last() {
            let c: C64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            for (x, qk) in v.iter_mut().zip(q) {
                *x -= c * qk;
            }
        }
    }
}
