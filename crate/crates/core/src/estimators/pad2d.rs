use std::time::Instant;

use super::{argmax_excluding, Denominator, EstimationResult, EstimatorConfig, Method, Support};
use crate::dictionary::Pad2dDictionary;
use crate::error::{Error, Result};
use crate::measurement::Observation;
use crate::numkern::{devec, kron, vec, CMatrix, CVector, GrowingQr, C64};

/// Selection scores of every 2D atom against `residual` (`Q x M`), flat
/// angle-major. The score of `(a, c)` is
/// `|a_a^H W R conj(b_{a,c})| / denom(||W^H a_a||)`; the correlations
/// `A^H W R` are shared by all distances of an angle.
pub fn pad2d_scores(
    residual: &CMatrix,
    w: &CMatrix,
    pad: &Pad2dDictionary,
    denominator: Denominator,
) -> Result<Vec<f64>> {
    let phi_all = w.adjoint_matmul(pad.angular().matrix())?;
    let denoms = measured_denoms(&phi_all, denominator);
    scores_measured(residual, &phi_all, &denoms, pad)
}

fn measured_denoms(phi_all: &CMatrix, denominator: Denominator) -> Vec<f64> {
    (0..phi_all.cols()).map(|a| denominator.apply(phi_all.column(a).norm())).collect()
}

fn scores_measured(
    residual: &CMatrix,
    phi_all: &CMatrix,
    denoms: &[f64],
    pad: &Pad2dDictionary,
) -> Result<Vec<f64>> {
    let b = pad.intersub().matrix();
    if residual.cols() != b.rows() {
        return Err(Error::Shape(format!(
            "residual has {} columns, array has {} subarrays",
            residual.cols(),
            b.rows()
        )));
    }
    let t = phi_all.adjoint_matmul(residual)?;
    let ix = pad.indexer();
    let mut scores = vec![0.0; ix.len()];
    for c in 0..ix.distances {
        for a in 0..ix.angles {
            let col = c * ix.angles + a;
            let s: C64 = t.row(a).iter().enumerate().map(|(m, tv)| tv * b[(m, col)].conj()).sum();
            scores[col] = s.norm() / denoms[a];
        }
    }
    Ok(scores)
}

/// Greedy pursuit over the 2D angle-distance dictionary in matrix form.
/// Each iteration refits all selected coefficients to `vec(Y)` and sets the
/// residual to `Y` minus the fitted measured atoms.
pub fn pad2d_omp(
    obs: &Observation,
    w: &CMatrix,
    pad: &Pad2dDictionary,
    cfg: &EstimatorConfig,
) -> Result<EstimationResult> {
    cfg.validate()?;
    let start = Instant::now();
    let ix = pad.indexer();
    if cfg.sparsity > ix.len() {
        return Err(Error::InvalidParameter(format!(
            "sparsity {} exceeds {} atoms",
            cfg.sparsity,
            ix.len()
        )));
    }
    let q = w.cols();
    let phi_all = w.adjoint_matmul(pad.angular().matrix())?;
    let denoms = measured_denoms(&phi_all, cfg.denominator);
    let y_vec = vec(&obs.y_mat);
    let mut excluded = vec![false; ix.len()];
    let mut support = Vec::with_capacity(cfg.sparsity);
    let mut qr = GrowingQr::new(y_vec.len());
    let mut r_vec = y_vec.clone();
    let mut residual = obs.y_mat.clone();
    let mut residual_norms = vec![residual.frobenius_norm()];

    while support.len() < cfg.sparsity && !cfg.done(residual.frobenius_norm()) {
        let scores = scores_measured(&residual, &phi_all, &denoms, pad)?;
        let Some(flat) = argmax_excluding(&scores, &excluded) else { break };
        excluded[flat] = true;
        let (a, c) = ix.pair(flat)?;
        // vec(W^H a b^T) = b kron W^H a
        qr.push(&kron(&pad.intersub().atom(a, c)?, &phi_all.column(a)))?;
        support.push(flat);
        // Y minus the LS fit of all selected measured atoms to vec(Y)
        qr.deflate_last(r_vec.as_mut_slice());
        residual = devec(&r_vec, q)?;
        residual_norms.push(residual.frobenius_norm());
    }
    let kappa: Vec<C64> = if qr.is_empty() { Vec::new() } else { qr.solve(&y_vec)?.into_vec() };

    let n = pad.angular().matrix().rows();
    let m = pad.intersub().matrix().rows();
    let mut h_hat = CVector::zeros(n * m);
    let mut pairs = Vec::with_capacity(support.len());
    for (&flat, &k) in support.iter().zip(kappa.iter()) {
        let (a, c) = ix.pair(flat)?;
        h_hat.axpy(k, &pad.atom_vec(a, c)?);
        pairs.push((a, c));
    }
    let angles = pad.angular().angles();
    let dists = pad.intersub().distances();
    Ok(EstimationResult {
        method: Method::Pad2dOmp,
        theta_hat: pairs.iter().map(|&(a, _)| angles.theta(a)).collect(),
        r_hat: Some(pairs.iter().map(|&(_, c)| dists.r(c)).collect()),
        support: Support::Pairs(pairs),
        gains: kappa,
        h_hat,
        nmse: None,
        elapsed: start.elapsed().as_secs_f64(),
        residual_norms,
    })
}
