//! Householder QR and the least-squares / projector routines built on it.
//!
//! Gram systems `(A^H A) x = A^H y` are never formed; solves go through the
//! triangular factor. Rank deficiency is detected from the singular values of
//! `R`, which equal those of `A`.

use super::matrix::{CMatrix, CVector, C64, ONE, ZERO};
use super::svd::singular_values;
use crate::error::{Error, Result};

/// Condition number above which a system is declared singular.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Compact Householder factorization of a tall matrix.
#[derive(Debug, Clone)]
pub struct Qr {
    rows: usize,
    cols: usize,
    /// Reflector vectors, `v_k` acts on rows `k..rows`.
    reflectors: Vec<Vec<C64>>,
    /// `2 / (v^H v)` per reflector, zero when the column was already reduced.
    taus: Vec<f64>,
    r: CMatrix,
}

impl Qr {
    pub fn factor(a: &CMatrix) -> Result<Qr> {
        let (m, n) = a.shape();
        if m < n {
            return Err(Error::Shape(format!("QR needs rows >= cols, got {m}x{n}")));
        }
        if !a.is_finite() {
            return Err(Error::NonFinite("QR input"));
        }
        // column-major working copy
        let mut work: Vec<Vec<C64>> = (0..n).map(|j| a.column(j).into_vec()).collect();
        let mut reflectors = Vec::with_capacity(n);
        let mut taus = Vec::with_capacity(n);

        for k in 0..n {
            let x = &work[k][k..];
            let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let mut v: Vec<C64> = x.to_vec();
            if xnorm == 0.0 {
                reflectors.push(v);
                taus.push(0.0);
                continue;
            }
            let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { ONE };
            let alpha = -phase * xnorm;
            v[0] -= alpha;
            let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            let tau = if vnorm2 > 0.0 { 2.0 / vnorm2 } else { 0.0 };
            for col in work.iter_mut().skip(k) {
                apply_reflector(&v, tau, &mut col[k..]);
            }
            reflectors.push(v);
            taus.push(tau);
        }

        let r = CMatrix::from_fn(n, n, |i, j| if i <= j { work[j][i] } else { ZERO });
        Ok(Qr { rows: m, cols: n, reflectors, taus, r })
    }

    pub fn r(&self) -> &CMatrix {
        &self.r
    }

    /// Ratio of extreme singular values of `R` (infinite when rank deficient).
    pub fn condition(&self) -> f64 {
        let sv = singular_values(&self.r);
        let max = sv.first().copied().unwrap_or(0.0);
        let min = sv.last().copied().unwrap_or(0.0);
        if max == 0.0 || min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    pub fn ensure_well_conditioned(&self) -> Result<()> {
        let condition = self.condition();
        if !(condition <= CONDITION_LIMIT) {
            return Err(Error::Singular { condition, threshold: CONDITION_LIMIT });
        }
        Ok(())
    }

    /// Applies `Q^H` to a vector of length `rows`.
    pub fn apply_qh(&self, b: &mut [C64]) {
        debug_assert_eq!(b.len(), self.rows);
        for (k, (v, &tau)) in self.reflectors.iter().zip(&self.taus).enumerate() {
            apply_reflector(v, tau, &mut b[k..]);
        }
    }

    /// Applies `Q` to a vector of length `rows`.
    pub fn apply_q(&self, b: &mut [C64]) {
        debug_assert_eq!(b.len(), self.rows);
        for (k, (v, &tau)) in self.reflectors.iter().zip(&self.taus).enumerate().rev() {
            apply_reflector(v, tau, &mut b[k..]);
        }
    }

    /// Thin orthonormal factor, `rows x cols`.
    pub fn thin_q(&self) -> CMatrix {
        let mut q = CMatrix::zeros(self.rows, self.cols);
        for j in 0..self.cols {
            let mut e = vec![ZERO; self.rows];
            e[j] = ONE;
            self.apply_q(&mut e);
            for (i, z) in e.into_iter().enumerate() {
                q[(i, j)] = z;
            }
        }
        q
    }

    /// Least-squares solution for one right-hand side. Assumes the caller
    /// checked conditioning.
    pub fn solve(&self, y: &CVector) -> Result<CVector> {
        if y.len() != self.rows {
            return Err(Error::Shape(format!(
                "right-hand side has length {}, system has {} rows",
                y.len(),
                self.rows
            )));
        }
        let mut b = y.as_slice().to_vec();
        self.apply_qh(&mut b);
        let n = self.cols;
        let mut x = vec![ZERO; n];
        for i in (0..n).rev() {
            let mut acc = b[i];
            for j in i + 1..n {
                acc -= self.r[(i, j)] * x[j];
            }
            x[i] = acc / self.r[(i, i)];
        }
        Ok(CVector::from_vec_unchecked(x))
    }
}

// x <- (I - tau v v^H) x
fn apply_reflector(v: &[C64], tau: f64, x: &mut [C64]) {
    if tau == 0.0 {
        return;
    }
    let s: C64 = v.iter().zip(x.iter()).map(|(vi, xi)| vi.conj() * xi).sum();
    let s = s * tau;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= vi * s;
    }
}

/// `argmin_x ||y - A x||_2` for a full-column-rank `A`.
pub fn ls_solve(a: &CMatrix, y: &CVector) -> Result<CVector> {
    let qr = Qr::factor(a)?;
    qr.ensure_well_conditioned()?;
    qr.solve(y)
}

/// Column-by-column least squares `argmin_X ||B - A X||_F`.
pub fn ls_solve_matrix(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.rows() != b.rows() {
        return Err(Error::Shape(format!(
            "system has {} rows, right-hand side has {}",
            a.rows(),
            b.rows()
        )));
    }
    let qr = Qr::factor(a)?;
    qr.ensure_well_conditioned()?;
    let mut x = CMatrix::zeros(a.cols(), b.cols());
    for j in 0..b.cols() {
        x.set_column(j, &qr.solve(&b.column(j))?);
    }
    Ok(x)
}

/// `I - Phi (Phi^H Phi)^{-1} Phi^H`, the projector onto the orthogonal
/// complement of the column space of `Phi`.
pub fn orth_complement_projector(phi: &CMatrix) -> Result<CMatrix> {
    let qr = Qr::factor(phi)?;
    qr.ensure_well_conditioned()?;
    let q = qr.thin_q();
    let m = phi.rows();
    let mut p = CMatrix::identity(m);
    for i in 0..m {
        for j in 0..m {
            let s: C64 = q.row(i).iter().zip(q.row(j)).map(|(a, b)| a * b.conj()).sum();
            p[(i, j)] -= s;
        }
    }
    Ok(p)
}
