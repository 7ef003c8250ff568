use std::time::Instant;

use super::{reconstruct_blockwise, EstimationResult, Method, Support};
use crate::error::Result;
use crate::geometry::{steering, ArrayConfig, ChannelModel, PathSet};
use crate::measurement::Observation;
use crate::numkern::{CMatrix, CVector};

/// Least squares on the true path parameters: the support is known, only
/// the gains are estimated.
pub fn ols_oracle(
    obs: &Observation,
    w: &CMatrix,
    geometry: &ArrayConfig,
    paths: &PathSet,
    model: ChannelModel,
) -> Result<EstimationResult> {
    let start = Instant::now();
    let columns = paths
        .iter()
        .map(|p| steering(geometry, model, p.theta, p.r))
        .collect::<Result<Vec<CVector>>>()?;
    let g_hat = CMatrix::from_columns(&columns)?;
    let (gains, h_hat) = reconstruct_blockwise(&g_hat, w, &obs.y_stacked)?;
    let residual = obs.y_stacked.norm();
    Ok(EstimationResult {
        method: Method::Ols,
        support: Support::Oracle,
        theta_hat: paths.iter().map(|p| p.theta).collect(),
        r_hat: Some(paths.iter().map(|p| p.r).collect()),
        gains,
        h_hat,
        nmse: None,
        elapsed: start.elapsed().as_secs_f64(),
        residual_norms: vec![residual],
    })
}
