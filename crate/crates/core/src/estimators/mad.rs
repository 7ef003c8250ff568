use std::time::Instant;

use super::{omp, EstimationResult, EstimatorConfig, Method, Support};
use crate::dictionary::AngularDictionary;
use crate::error::{Error, Result};
use crate::measurement::Observation;
use crate::numkern::{CMatrix, CVector, C64};

/// Per-subarray angular supports and gains.
#[derive(Debug, Clone, PartialEq)]
pub struct MadSubResult {
    pub supports: Vec<Vec<usize>>,
    pub gains: Vec<Vec<C64>>,
    /// Subarrays whose recovery failed; their blocks are left at zero.
    pub failed: Vec<usize>,
}

/// Independent angular OMP on every subarray, distances ignored.
pub fn mad_omp(
    obs: &Observation,
    w: &CMatrix,
    dict: &AngularDictionary,
    cfg: &EstimatorConfig,
) -> Result<(EstimationResult, MadSubResult)> {
    cfg.validate()?;
    let start = Instant::now();
    let a = dict.matrix();
    if w.rows() != a.rows() {
        return Err(Error::Shape(format!(
            "combiner has {} rows, angular dictionary has {}",
            w.rows(),
            a.rows()
        )));
    }
    let psi = w.adjoint_matmul(a)?;
    let (n, m) = (a.rows(), obs.y_mat.cols());
    let mut h_hat = CVector::zeros(n * m);
    let mut sub = MadSubResult { supports: Vec::new(), gains: Vec::new(), failed: Vec::new() };
    let mut residual_sq = 0.0;
    let mut initial_sq = 0.0;
    for blk in 0..m {
        let y_m = obs.y_mat.column(blk);
        initial_sq += y_m.norm_sqr();
        match omp(&y_m, &psi, cfg) {
            Ok(out) => {
                for (&j, &z) in out.support.iter().zip(&out.gains) {
                    for i in 0..n {
                        h_hat[blk * n + i] += z * a[(i, j)];
                    }
                }
                residual_sq += out.residual_norm * out.residual_norm;
                sub.supports.push(out.support);
                sub.gains.push(out.gains);
            }
            Err(Error::Singular { .. }) => {
                residual_sq += y_m.norm_sqr();
                sub.failed.push(blk);
                sub.supports.push(Vec::new());
                sub.gains.push(Vec::new());
            }
            Err(e) => return Err(e),
        }
    }
    let theta_hat = sub
        .supports
        .first()
        .map(|s| s.iter().map(|&j| dict.angles().theta(j)).collect())
        .unwrap_or_default();
    let result = EstimationResult {
        method: Method::MadOmp,
        support: Support::PerSubarray(sub.supports.clone()),
        theta_hat,
        r_hat: None,
        gains: sub.gains.iter().flatten().copied().collect(),
        h_hat,
        nmse: None,
        elapsed: start.elapsed().as_secs_f64(),
        residual_norms: vec![initial_sq.sqrt(), residual_sq.sqrt()],
    };
    Ok((result, sub))
}
