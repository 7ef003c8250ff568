use std::time::Instant;

use super::{blockwise_adjoint_mul, omp, EstimationResult, EstimatorConfig, Method, Support};
use crate::dictionary::PdDictionary;
use crate::error::Result;
use crate::measurement::Observation;
use crate::numkern::{CMatrix, CVector};

/// OMP over the measured polar-domain dictionary `W~^H G`. The measured
/// dictionary is formed inside the call and counts toward `elapsed`.
pub fn pd_omp(
    obs: &Observation,
    w: &CMatrix,
    pd: &PdDictionary,
    cfg: &EstimatorConfig,
) -> Result<EstimationResult> {
    let start = Instant::now();
    let psi = blockwise_adjoint_mul(w, pd.matrix())?;
    let out = omp(&obs.y_stacked, &psi, cfg)?;
    let g = pd.matrix();
    let mut h_hat = CVector::zeros(g.rows());
    for (&j, &z) in out.support.iter().zip(&out.gains) {
        h_hat.axpy(z, &g.column(j));
    }
    let ix = pd.indexer();
    let pairs = out.support.iter().map(|&j| ix.pair(j)).collect::<Result<Vec<_>>>()?;
    Ok(EstimationResult {
        method: Method::PdOmp,
        theta_hat: pairs.iter().map(|&(a, _)| pd.angles().theta(a)).collect(),
        r_hat: Some(pairs.iter().map(|&(_, c)| pd.distances().r(c)).collect()),
        support: Support::Flat(out.support),
        gains: out.gains,
        h_hat,
        nmse: None,
        elapsed: start.elapsed().as_secs_f64(),
        residual_norms: out.residual_norms,
    })
}
