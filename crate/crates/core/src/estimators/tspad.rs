use std::time::Instant;

use super::{argmax_excluding, reconstruct_blockwise, EstimationResult, EstimatorConfig, Method, Support};
use crate::dictionary::{AngularDictionary, InterSubDictionary, Pad2dDictionary};
use crate::error::{Error, Result};
use crate::geometry::{steering, ArrayConfig, ChannelModel};
use crate::measurement::Observation;
use crate::numkern::{CMatrix, CVector, GrowingQr, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct SompOutput {
    /// Selected angle indices in selection order.
    pub lambda: Vec<usize>,
    /// `|lambda| x M` joint LS coefficients; row `l` estimates the
    /// inter-subarray response of path `l`.
    pub xi_hat: CMatrix,
    pub residual_norms: Vec<f64>,
}

/// Angle stage: simultaneous OMP over all subarray observations with a
/// shared angular support.
pub fn somp_angle_stage(
    y_mat: &CMatrix,
    w: &CMatrix,
    dict: &AngularDictionary,
    cfg: &EstimatorConfig,
) -> Result<SompOutput> {
    let phi_all = w.adjoint_matmul(dict.matrix())?;
    somp_measured(y_mat, &phi_all, cfg)
}

fn somp_measured(y_mat: &CMatrix, phi_all: &CMatrix, cfg: &EstimatorConfig) -> Result<SompOutput> {
    cfg.validate()?;
    let atoms = phi_all.cols();
    if phi_all.rows() != y_mat.rows() {
        return Err(Error::Shape(format!(
            "measured dictionary has {} rows, observation has {}",
            phi_all.rows(),
            y_mat.rows()
        )));
    }
    if cfg.sparsity > atoms {
        return Err(Error::InvalidParameter(format!(
            "sparsity {} exceeds {atoms} angle atoms",
            cfg.sparsity
        )));
    }
    let denoms: Vec<f64> =
        (0..atoms).map(|a| cfg.denominator.apply(phi_all.column(a).norm())).collect();
    let mut excluded = vec![false; atoms];
    let mut lambda = Vec::with_capacity(cfg.sparsity);
    let mut qr = GrowingQr::new(y_mat.rows());
    let y_cols: Vec<CVector> = (0..y_mat.cols()).map(|m| y_mat.column(m)).collect();
    let mut residual = y_cols.clone();
    let frob = |r: &[CVector]| r.iter().map(CVector::norm_sqr).sum::<f64>().sqrt();
    let mut residual_norms = vec![frob(&residual)];

    while lambda.len() < cfg.sparsity && !cfg.done(frob(&residual)) {
        // |phi_a^H R| summed over subarrays
        let mut scores = vec![0.0; atoms];
        for r in &residual {
            for (s, c) in scores.iter_mut().zip(phi_all.adjoint_mul_vec(r)?.iter()) {
                *s += c.norm();
            }
        }
        scores.iter_mut().zip(&denoms).for_each(|(s, d)| *s /= d);
        let Some(a) = argmax_excluding(&scores, &excluded) else { break };
        excluded[a] = true;
        qr.push(&phi_all.column(a))?;
        lambda.push(a);
        // R <- (I - Phi (Phi^H Phi)^-1 Phi^H) R, one new direction at a time
        for r in residual.iter_mut() {
            qr.deflate_last(r.as_mut_slice());
        }
        residual_norms.push(frob(&residual));
    }
    let mut xi_hat = CMatrix::zeros(lambda.len(), y_mat.cols());
    if !lambda.is_empty() {
        for (m, y) in y_cols.iter().enumerate() {
            for (l, v) in qr.solve(y)?.iter().enumerate() {
                xi_hat[(l, m)] = *v;
            }
        }
    }
    Ok(SompOutput { lambda, xi_hat, residual_norms })
}

/// Distance stage: for each selected angle, the grid distance whose
/// inter-subarray atom best matches row `l` of `xi_hat`. Ties go to the
/// smaller distance. Returns distance indices.
pub fn distance_stage(
    xi_hat: &CMatrix,
    lambda: &[usize],
    intersub: &InterSubDictionary,
) -> Result<Vec<usize>> {
    if xi_hat.rows() != lambda.len() {
        return Err(Error::Shape(format!(
            "{} coefficient rows for {} angles",
            xi_hat.rows(),
            lambda.len()
        )));
    }
    let b = intersub.matrix();
    if xi_hat.cols() != b.rows() {
        return Err(Error::Shape(format!(
            "coefficient rows have {} entries, array has {} subarrays",
            xi_hat.cols(),
            b.rows()
        )));
    }
    let ix = intersub.indexer();
    lambda
        .iter()
        .enumerate()
        .map(|(l, &a)| {
            let z = xi_hat.row(l);
            let mut best = (0, f64::NEG_INFINITY);
            for c in 0..ix.distances {
                let col = ix.flat(a, c)?;
                let score = z
                    .iter()
                    .enumerate()
                    .map(|(m, zm)| b[(m, col)].conj() * zm)
                    .sum::<C64>()
                    .norm();
                if score > best.1 {
                    best = (c, score);
                }
            }
            Ok(best.0)
        })
        .collect()
}

/// Two-stage estimator: SOMP angle search, per-path distance matched
/// filter, then LS reconstruction with `reconstruction`-model atoms at the
/// estimated parameters.
pub fn ts_pad_omp(
    obs: &Observation,
    w: &CMatrix,
    pad: &Pad2dDictionary,
    geometry: &ArrayConfig,
    cfg: &EstimatorConfig,
    reconstruction: ChannelModel,
) -> Result<EstimationResult> {
    let start = Instant::now();
    let stage1 = somp_angle_stage(&obs.y_mat, w, pad.angular(), cfg)?;
    let dist_idx = distance_stage(&stage1.xi_hat, &stage1.lambda, pad.intersub())?;
    let angles = pad.angular().angles();
    let dists = pad.intersub().distances();
    let theta_hat: Vec<f64> = stage1.lambda.iter().map(|&a| angles.theta(a)).collect();
    let r_hat: Vec<f64> = dist_idx.iter().map(|&c| dists.r(c)).collect();
    let (gains, h_hat) = if theta_hat.is_empty() {
        (Vec::new(), CVector::zeros(geometry.total_antennas()))
    } else {
        let columns = theta_hat
            .iter()
            .zip(&r_hat)
            .map(|(&t, &r)| steering(geometry, reconstruction, t, r))
            .collect::<Result<Vec<_>>>()?;
        reconstruct_blockwise(&CMatrix::from_columns(&columns)?, w, &obs.y_stacked)?
    };
    Ok(EstimationResult {
        method: Method::TsPadOmp,
        support: Support::Pairs(stage1.lambda.iter().copied().zip(dist_idx).collect()),
        theta_hat,
        r_hat: Some(r_hat),
        gains,
        h_hat,
        nmse: None,
        elapsed: start.elapsed().as_secs_f64(),
        residual_norms: stage1.residual_norms,
    })
}
