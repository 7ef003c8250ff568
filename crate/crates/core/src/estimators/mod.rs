//! Greedy sparse-recovery estimators and the NMSE metric.
//!
//! Every estimator works on a shared combiner `W` (`N x Q`). Products with
//! the block-diagonal `W~ = diag(W, ..., W)` are evaluated block by block.

mod mad;
mod omp;
mod oracle;
mod pad2d;
mod pd;
mod tspad;


use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkern::{ls_solve, CMatrix, CVector, C64};

pub use mad::{mad_omp, MadSubResult};
pub use omp::{omp, OmpOutput};
pub use oracle::ols_oracle;
pub use pad2d::{pad2d_omp, pad2d_scores};
pub use pd::pd_omp;
pub use tspad::{distance_stage, somp_angle_stage, ts_pad_omp, SompOutput};

/// Power of the measured-atom norm dividing correlation scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Denominator {
    #[default]
    SquaredNorm,
    Norm,
}

impl Denominator {
    pub fn apply(self, norm: f64) -> f64 {
        match self {
            Denominator::SquaredNorm => norm * norm,
            Denominator::Norm => norm,
        }
    }
}

impl fmt::Display for Denominator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Denominator::SquaredNorm => "squared-norm",
            Denominator::Norm => "norm",
        })
    }
}

impl FromStr for Denominator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "squared-norm" => Ok(Denominator::SquaredNorm),
            "norm" => Ok(Denominator::Norm),
            other => Err(Error::Config(format!("unknown denominator '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub sparsity: usize,
    /// Stop early once the residual norm drops to this level.
    pub tolerance: Option<f64>,
    pub denominator: Denominator,
}

impl EstimatorConfig {
    pub fn new(sparsity: usize) -> Self {
        Self { sparsity, tolerance: None, denominator: Denominator::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sparsity == 0 {
            return Err(Error::InvalidParameter("sparsity must be at least 1".into()));
        }
        if let Some(eps) = self.tolerance {
            if !(eps >= 0.0) || !eps.is_finite() {
                return Err(Error::InvalidParameter(format!("residual tolerance {eps}")));
            }
        }
        Ok(())
    }

    pub(crate) fn done(&self, residual_norm: f64) -> bool {
        self.tolerance.is_some_and(|eps| residual_norm <= eps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "pd-omp")]
    PdOmp,
    #[serde(rename = "mad-omp")]
    MadOmp,
    #[serde(rename = "ts-pad-omp")]
    TsPadOmp,
    #[serde(rename = "2d-pad-omp")]
    Pad2dOmp,
    #[serde(rename = "ols")]
    Ols,
}

impl Method {
    pub const ALL: [Method; 5] =
        [Method::PdOmp, Method::MadOmp, Method::TsPadOmp, Method::Pad2dOmp, Method::Ols];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::PdOmp => "pd-omp",
            Method::MadOmp => "mad-omp",
            Method::TsPadOmp => "ts-pad-omp",
            Method::Pad2dOmp => "2d-pad-omp",
            Method::Ols => "ols",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown method '{s}'")))
    }
}

/// Recovered support in the natural index space of each method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Support {
    /// Flat angle-major atom indices of a joint dictionary.
    Flat(Vec<usize>),
    /// `(angle, distance)` grid pairs.
    Pairs(Vec<(usize, usize)>),
    /// Angle indices selected independently for each subarray.
    PerSubarray(Vec<Vec<usize>>),
    /// True path parameters, no grid.
    Oracle,
}

impl Support {
    pub fn len(&self) -> usize {
        match self {
            Support::Flat(v) => v.len(),
            Support::Pairs(v) => v.len(),
            Support::PerSubarray(v) => v.iter().map(Vec::len).max().unwrap_or(0),
            Support::Oracle => 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimationResult {
    pub method: Method,
    pub support: Support,
    /// Radians. For MAD-OMP these are the angles of the first subarray.
    pub theta_hat: Vec<f64>,
    /// Meters, `None` for MAD-OMP.
    pub r_hat: Option<Vec<f64>>,
    /// For MAD-OMP, subarray gains concatenated in subarray order.
    pub gains: Vec<C64>,
    /// Length `M N`.
    pub h_hat: CVector,
    /// Filled by [`EstimationResult::evaluate`].
    pub nmse: Option<f64>,
    /// Seconds spent inside the estimator.
    pub elapsed: f64,
    /// Residual norm before the first and after every iteration.
    pub residual_norms: Vec<f64>,
}

impl EstimationResult {
    pub fn evaluate(&mut self, h_true: &CVector) -> Result<f64> {
        let e = nmse(h_true, &self.h_hat)?;
        self.nmse = Some(e);
        Ok(e)
    }
}

/// `||h - h_hat||^2 / ||h||^2`.
pub fn nmse(h_true: &CVector, h_hat: &CVector) -> Result<f64> {
    if h_true.len() != h_hat.len() {
        return Err(Error::Shape(format!(
            "channel lengths {} and {}",
            h_true.len(),
            h_hat.len()
        )));
    }
    let denom = h_true.norm_sqr();
    if denom == 0.0 {
        return Err(Error::ZeroChannel);
    }
    Ok(h_true.sub(h_hat)?.norm_sqr() / denom)
}

/// `W~^H X` for a stacked `M N x K` matrix, evaluated per subarray block.
pub fn blockwise_adjoint_mul(w: &CMatrix, x: &CMatrix) -> Result<CMatrix> {
    let (n, q) = w.shape();
    if n == 0 || !x.rows().is_multiple_of(n) {
        return Err(Error::Shape(format!(
            "{} stacked rows are not a multiple of {n} antennas",
            x.rows()
        )));
    }
    let m = x.rows() / n;
    let k = x.cols();
    let mut out = CMatrix::zeros(m * q, k);
    for blk in 0..m {
        for nn in 0..n {
            let xrow = x.row(blk * n + nn);
            let wrow = w.row(nn);
            for (qq, wv) in wrow.iter().enumerate() {
                let wc = wv.conj();
                let orow = out.row_mut(blk * q + qq);
                for (o, xv) in orow.iter_mut().zip(xrow) {
                    *o += wc * xv;
                }
            }
        }
    }
    Ok(out)
}

/// LS gains of the measured columns of `g_hat` against `y~`, and the
/// reconstruction `g_hat * gains`.
pub(crate) fn reconstruct_blockwise(
    g_hat: &CMatrix,
    w: &CMatrix,
    y_stacked: &CVector,
) -> Result<(Vec<C64>, CVector)> {
    let measured = blockwise_adjoint_mul(w, g_hat)?;
    let gains = ls_solve(&measured, y_stacked)?;
    let h_hat = g_hat.mul_vec(&gains)?;
    Ok((gains.into_vec(), h_hat))
}

/// Index of the largest finite score, lowest index on ties.
pub(crate) fn argmax_excluding(scores: &[f64], excluded: &[bool]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, (&s, &ex)) in scores.iter().zip(excluded).enumerate() {
        if ex || !s.is_finite() {
            continue;
        }
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((j, s));
        }
    }
    best.map(|(j, _)| j)
}
