//! One-sided (Hestenes) Jacobi SVD for complex matrices.

use super::matrix::{CMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Thin SVD `M = U diag(sigma) V^H` with `k = min(rows, cols)` factors.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

pub fn svd(m: &CMatrix) -> Result<Svd> {
    if !m.is_finite() {
        return Err(Error::NonFinite("SVD input"));
    }
    if m.rows() < m.cols() {
        let t = svd_tall(&m.adjoint(), true);
        return Ok(Svd { u: t.v, sigma: t.sigma, v: t.u });
    }
    Ok(svd_tall(m, true))
}

/// Singular values only, sorted descending.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.rows() < m.cols() {
        svd_tall(&m.adjoint(), false).sigma
    } else {
        svd_tall(m, false).sigma
    }
}

fn svd_tall(m: &CMatrix, want_vectors: bool) -> Svd {
    let (rows, n) = m.shape();
    let mut a: Vec<Vec<C64>> = (0..n).map(|j| m.column(j).into_vec()).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![ZERO; n];
            e[j] = ONE;
            e
        })
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = a[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = a[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = a[p].iter().zip(&a[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // phase that makes the (p, q) inner product real
                let ph = gamma.conj() / g;
                rotate(&mut a, p, q, c, s, ph);
                if want_vectors {
                    rotate(&mut v, p, q, c, s, ph);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(f64, usize)> = a
        .iter()
        .enumerate()
        .map(|(j, col)| (col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(), j))
        .collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    let sigma: Vec<f64> = order.iter().map(|&(s, _)| s).collect();

    if !want_vectors {
        return Svd { u: CMatrix::zeros(1, 1), sigma, v: CMatrix::zeros(1, 1) };
    }

    let smax = sigma.first().copied().unwrap_or(0.0);
    let tiny = smax * f64::EPSILON * rows.max(n) as f64;
    let mut ucols: Vec<Option<Vec<C64>>> = order
        .iter()
        .map(|&(s, j)| (s > tiny && s > 0.0).then(|| a[j].iter().map(|z| z / s).collect()))
        .collect();
    complete_orthonormal(&mut ucols, rows);

    let u = CMatrix::from_fn(rows, n, |i, k| ucols[k].as_ref().expect("completed")[i]);
    let vm = CMatrix::from_fn(n, n, |i, k| v[order[k].1][i]);
    Svd { u, sigma, v: vm }
}

// a_p <- c a_p - s ph a_q,  a_q <- s a_p + c ph a_q
fn rotate(cols: &mut [Vec<C64>], p: usize, q: usize, c: f64, s: f64, ph: C64) {
    let (lo, hi) = cols.split_at_mut(q);
    let (xp, xq) = (&mut lo[p], &mut hi[0]);
    for (x, y) in xp.iter_mut().zip(xq.iter_mut()) {
        let yp = ph * *y;
        let nx = *x * c - yp * s;
        let ny = *x * s + yp * c;
        *x = nx;
        *y = ny;
    }
}

// Fills the missing columns with unit vectors orthogonal to all others.
fn complete_orthonormal(cols: &mut [Option<Vec<C64>>], dim: usize) {
    let mut candidate = 0;
    for k in 0..cols.len() {
        if cols[k].is_some() {
            continue;
        }
        loop {
            assert!(candidate < dim, "ran out of basis vectors");
            let mut e = vec![ZERO; dim];
            e[candidate] = ONE;
            candidate += 1;
            // two passes of Gram-Schmidt
            for _ in 0..2 {
                for other in cols.iter().flatten() {
                    let proj: C64 = other.iter().zip(&e).map(|(o, x)| o.conj() * x).sum();
                    for (x, o) in e.iter_mut().zip(other) {
                        *x -= proj * o;
                    }
                }
            }
            let norm = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-6 {
                cols[k] = Some(e.into_iter().map(|z| z / norm).collect());
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(rows, cols, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn reconstruct(s: &Svd) -> CMatrix {
        let d = CMatrix::diag(&s.sigma.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
        s.u.matmul(&d).unwrap().matmul(&s.v.adjoint()).unwrap()
    }

    fn orthonormality_error(m: &CMatrix) -> f64 {
        m.adjoint_matmul(m)
            .unwrap()
            .sub(&CMatrix::identity(m.cols()))
            .unwrap()
            .frobenius_norm()
    }

    #[test]
    fn identity_has_unit_singular_values() {
        let s = svd(&CMatrix::identity(3)).unwrap();
        for x in &s.sigma {
            assert!((x - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn column_vector_singular_value_is_its_norm() {
        let m = CMatrix::new(2, 1, vec![C64::new(3.0, 0.0), C64::new(4.0, 0.0)]).unwrap();
        let s = svd(&m).unwrap();
        assert_eq!(s.sigma.len(), 1);
        assert!((s.sigma[0] - 5.0).abs() < 1e-14);
    }

    #[test]
    fn random_tall_reconstructs() {
        let m = random_matrix(4, 2, 42);
        let s = svd(&m).unwrap();
        let err = reconstruct(&s).sub(&m).unwrap().frobenius_norm() / m.frobenius_norm();
        assert!(err < 1e-10, "{err}");
        assert!(s.sigma[0] >= s.sigma[1]);
        assert!(orthonormality_error(&s.u) < 1e-10);
        assert!(orthonormality_error(&s.v) < 1e-10);
    }

    #[test]
    fn wide_and_rank_deficient_inputs() {
        let m = random_matrix(3, 6, 1);
        let s = svd(&m).unwrap();
        assert_eq!(s.u.shape(), (3, 3));
        assert_eq!(s.v.shape(), (6, 3));
        assert!(reconstruct(&s).sub(&m).unwrap().frobenius_norm() < 1e-10 * m.frobenius_norm());

        let a = random_matrix(5, 1, 2);
        let dup = CMatrix::from_fn(5, 3, |i, _| a[(i, 0)]);
        let s = svd(&dup).unwrap();
        assert!(s.sigma[1] < 1e-12 && s.sigma[2] < 1e-12);
        assert!(orthonormality_error(&s.u) < 1e-10);
        assert!(orthonormality_error(&s.v) < 1e-10);

        let z = svd(&CMatrix::zeros(3, 2)).unwrap();
        assert_eq!(z.sigma, vec![0.0, 0.0]);
        assert!(orthonormality_error(&z.u) < 1e-12);
    }
}
