use super::{argmax_excluding, EstimatorConfig};
use crate::error::{Error, Result};
use crate::numkern::{CMatrix, CVector, GrowingQr, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct OmpOutput {
    pub support: Vec<usize>,
    pub gains: Vec<C64>,
    pub residual_norm: f64,
    /// Residual norm before the first and after every iteration.
    pub residual_norms: Vec<f64>,
}

/// Orthogonal matching pursuit. Each iteration picks the unselected column
/// maximizing `|psi_j^H r| / denom(||psi_j||)` and refits all gains by least
/// squares.
pub fn omp(y: &CVector, psi: &CMatrix, cfg: &EstimatorConfig) -> Result<OmpOutput> {
    cfg.validate()?;
    if psi.rows() != y.len() {
        return Err(Error::Shape(format!(
            "sensing matrix has {} rows, observation has {}",
            psi.rows(),
            y.len()
        )));
    }
    if cfg.sparsity > psi.cols() {
        return Err(Error::InvalidParameter(format!(
            "sparsity {} exceeds {} atoms",
            cfg.sparsity,
            psi.cols()
        )));
    }
    let denoms: Vec<f64> =
        (0..psi.cols()).map(|j| cfg.denominator.apply(psi.column(j).norm())).collect();
    let mut excluded = vec![false; psi.cols()];
    let mut support = Vec::with_capacity(cfg.sparsity);
    let mut qr = GrowingQr::new(y.len());
    let mut residual = y.clone();
    let mut residual_norms = vec![residual.norm()];

    while support.len() < cfg.sparsity && !cfg.done(residual.norm()) {
        let corr = psi.adjoint_mul_vec(&residual)?;
        let scores: Vec<f64> = corr.iter().zip(&denoms).map(|(c, d)| c.norm() / d).collect();
        let Some(j) = argmax_excluding(&scores, &excluded) else { break };
        excluded[j] = true;
        qr.push(&psi.column(j))?;
        support.push(j);
        qr.deflate_last(residual.as_mut_slice());
        residual_norms.push(residual.norm());
    }
    let gains = if qr.is_empty() { Vec::new() } else { qr.solve(y)?.into_vec() };
    Ok(OmpOutput { residual_norm: residual.norm(), support, gains, residual_norms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::Denominator;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use crate::measurement::complex_normal;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(rows, cols, |_, _| complex_normal(&mut rng, 1.0))
    }

    #[test]
    fn identity_single_atom() {
        let mut y = CVector::zeros(4);
        y[2] = C64::new(3.0, 0.0);
        let out = omp(&y, &CMatrix::identity(4), &EstimatorConfig::new(1)).unwrap();
        assert_eq!(out.support, vec![2]);
        assert_eq!(out.gains, vec![C64::new(3.0, 0.0)]);
        assert_eq!(out.residual_norm, 0.0);
    }

    #[test]
    fn first_pick_matches_exhaustive_scoring() {
        let psi = random_matrix(10, 30, 1);
        let y = psi.column(17).scale(C64::new(0.4, -1.2));
        for denominator in [Denominator::SquaredNorm, Denominator::Norm] {
            let cfg = EstimatorConfig { sparsity: 1, tolerance: None, denominator };
            let out = omp(&y, &psi, &cfg).unwrap();
            let mut best = (0, f64::MIN);
            for j in 0..30 {
                let mut c = C64::new(0.0, 0.0);
                let mut nrm = 0.0;
                for i in 0..10 {
                    c += psi[(i, j)].conj() * y[i];
                    nrm += psi[(i, j)].norm_sqr();
                }
                let p = if denominator == Denominator::Norm { 0.5 } else { 1.0 };
                let s = c.norm() / nrm.powf(p);
                if s > best.1 {
                    best = (j, s);
                }
            }
            assert_eq!(out.support[0], best.0);
        }
    }

    #[test]
    fn exact_recovery_and_monotone_residual() {
        let psi = random_matrix(20, 40, 2);
        let mut x = CVector::zeros(40);
        x[3] = C64::new(1.0, 0.5);
        x[25] = C64::new(-0.8, 0.1);
        x[31] = C64::new(0.2, -1.4);
        let y = psi.mul_vec(&x).unwrap();
        let out = omp(&y, &psi, &EstimatorConfig::new(3)).unwrap();
        let mut s = out.support.clone();
        s.sort();
        assert_eq!(s, vec![3, 25, 31]);
        assert!(out.residual_norm < 1e-10);
        assert!(out.residual_norms.windows(2).all(|w| w[1] <= w[0] + 1e-10));
    }

    #[test]
    fn tolerance_stops_early_and_zero_input_is_harmless() {
        let psi = random_matrix(12, 20, 3);
        let y = psi.column(5);
        let cfg = EstimatorConfig { sparsity: 4, tolerance: Some(1e-9), denominator: Denominator::Norm };
        let out = omp(&y, &psi, &cfg).unwrap();
        assert_eq!(out.support, vec![5]);

        let zero = omp(&CVector::zeros(12), &psi, &EstimatorConfig::new(2)).unwrap();
        assert!(zero.gains.iter().all(|g| g.norm() < 1e-14));
        assert!(omp(&y, &psi, &EstimatorConfig::new(21)).is_err());
    }
}
