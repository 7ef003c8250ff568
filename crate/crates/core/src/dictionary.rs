//! Sampling grids and the dictionaries built on them.
//!
//! Angle-distance dictionaries are angle-major: atom `(a, c)` sits in column
//! `c * A + a`, so every angle at the first distance comes before any angle at
//! the second.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{steering_exact, steering_intersub, steering_subarray, ArrayConfig};
use crate::numkern::{kron, CMatrix, CVector};

/// Default cap on the number of complex entries a dictionary may hold.
pub const DEFAULT_ELEMENT_BUDGET: usize = 1 << 25;

const WINDOW_SLACK: f64 = 1e-12;

/// Sines of the sampled angles, strictly increasing in `[-1, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleGrid {
    sin_values: Vec<f64>,
}

impl AngleGrid {
    pub fn len(&self) -> usize {
        self.sin_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sin_values.is_empty()
    }

    pub fn sin_values(&self) -> &[f64] {
        &self.sin_values
    }

    pub fn sin(&self, a: usize) -> f64 {
        self.sin_values[a]
    }

    /// Angle in radians of sample `a`.
    pub fn theta(&self, a: usize) -> f64 {
        self.sin_values[a].asin()
    }

    /// Spacing of consecutive sines, `None` for a single sample.
    pub fn resolution(&self) -> Option<f64> {
        (self.len() >= 2).then(|| self.sin_values[1] - self.sin_values[0])
    }
}

/// DFT-bin angle grid `sin = -1 + 2k/A`, optionally restricted to a window of
/// sines (inclusive).
pub fn make_angle_grid(count: usize, restrict: Option<(f64, f64)>) -> Result<AngleGrid> {
    if count == 0 {
        return Err(Error::InvalidParameter("angle grid needs at least one sample".into()));
    }
    let mut sin_values: Vec<f64> =
        (0..count).map(|k| -1.0 + 2.0 * k as f64 / count as f64).collect();
    if let Some((lo, hi)) = restrict {
        sin_values.retain(|&s| s >= lo - WINDOW_SLACK && s <= hi + WINDOW_SLACK);
    }
    if sin_values.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "no angle samples of a {count}-point grid fall in {restrict:?}"
        )));
    }
    Ok(AngleGrid { sin_values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceSampling {
    /// `1/r` equispaced.
    Reciprocal,
    /// `r` equispaced.
    Uniform,
}

impl fmt::Display for DistanceSampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistanceSampling::Reciprocal => "reciprocal",
            DistanceSampling::Uniform => "uniform",
        })
    }
}

impl FromStr for DistanceSampling {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reciprocal" => Ok(DistanceSampling::Reciprocal),
            "uniform" => Ok(DistanceSampling::Uniform),
            other => Err(Error::Config(format!("unknown distance sampling '{other}'"))),
        }
    }
}

/// Sampled distances in meters, strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceGrid {
    r_values: Vec<f64>,
    mode: DistanceSampling,
}

impl DistanceGrid {
    /// `r_min, r_min + step, ...` up to and including `r_max` (within
    /// rounding).
    pub fn stepped(r_min: f64, r_max: f64, step: f64) -> Result<DistanceGrid> {
        if !(r_min > 0.0) || !(step > 0.0) || !(r_max >= r_min) || !r_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "stepped distance grid [{r_min}, {r_max}] step {step}"
            )));
        }
        let count = ((r_max - r_min) / step + 1e-9).floor() as usize + 1;
        let r_values = (0..count).map(|k| r_min + k as f64 * step).collect();
        Ok(DistanceGrid { r_values, mode: DistanceSampling::Uniform })
    }

    pub fn len(&self) -> usize {
        self.r_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r_values.is_empty()
    }

    pub fn r_values(&self) -> &[f64] {
        &self.r_values
    }

    pub fn r(&self, c: usize) -> f64 {
        self.r_values[c]
    }

    pub fn mode(&self) -> DistanceSampling {
        self.mode
    }
}

pub fn make_distance_grid(
    count: usize,
    r_min: f64,
    r_max: f64,
    mode: DistanceSampling,
) -> Result<DistanceGrid> {
    if count == 0 {
        return Err(Error::InvalidParameter("distance grid needs at least one sample".into()));
    }
    if !(r_min > 0.0) || !(r_max > r_min) || !r_max.is_finite() {
        return Err(Error::InvalidParameter(format!("distance range [{r_min}, {r_max}]")));
    }
    let r_values = if count == 1 {
        vec![r_min]
    } else {
        let last = count - 1;
        (0..count)
            .map(|k| {
                if k == 0 {
                    return r_min;
                }
                if k == last {
                    return r_max;
                }
                let t = k as f64 / last as f64;
                match mode {
                    DistanceSampling::Uniform => r_min + t * (r_max - r_min),
                    DistanceSampling::Reciprocal => {
                        1.0 / (1.0 / r_min + t * (1.0 / r_max - 1.0 / r_min))
                    }
                }
            })
            .collect()
    };
    Ok(DistanceGrid { r_values, mode })
}

fn check_budget(entries: usize, budget: usize) -> Result<()> {
    if entries > budget {
        return Err(Error::Budget { requested: entries, budget });
    }
    Ok(())
}

fn matrix_from_columns(rows: usize, columns: Vec<CVector>) -> CMatrix {
    CMatrix::from_fn(rows, columns.len(), |i, j| columns[j][i])
}

/// Angle-major `(a, c) <-> c * A + a` bookkeeping shared by the joint
/// dictionaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AtomIndexer {
    pub angles: usize,
    pub distances: usize,
}

impl AtomIndexer {
    pub fn len(&self) -> usize {
        self.angles * self.distances
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn flat(&self, a: usize, c: usize) -> Result<usize> {
        if a >= self.angles || c >= self.distances {
            return Err(Error::IndexOutOfRange(format!(
                "atom ({a}, {c}) in a {}x{} grid",
                self.angles, self.distances
            )));
        }
        Ok(c * self.angles + a)
    }

    pub fn pair(&self, flat: usize) -> Result<(usize, usize)> {
        if flat >= self.len() {
            return Err(Error::IndexOutOfRange(format!("atom {flat} of {}", self.len())));
        }
        Ok((flat % self.angles, flat / self.angles))
    }
}

/// Polar-domain dictionary `G`: exact spherical-wave atoms over an
/// angle-distance grid.
#[derive(Debug, Clone)]
pub struct PdDictionary {
    matrix: CMatrix,
    angles: AngleGrid,
    distances: DistanceGrid,
}

impl PdDictionary {
    /// `M N x A C`.
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn angles(&self) -> &AngleGrid {
        &self.angles
    }

    pub fn distances(&self) -> &DistanceGrid {
        &self.distances
    }

    pub fn indexer(&self) -> AtomIndexer {
        AtomIndexer { angles: self.angles.len(), distances: self.distances.len() }
    }
}

pub fn build_pd_dictionary(
    cfg: &ArrayConfig,
    angles: &AngleGrid,
    distances: &DistanceGrid,
) -> Result<PdDictionary> {
    build_pd_dictionary_with_budget(cfg, angles, distances, DEFAULT_ELEMENT_BUDGET)
}

pub fn build_pd_dictionary_with_budget(
    cfg: &ArrayConfig,
    angles: &AngleGrid,
    distances: &DistanceGrid,
    budget: usize,
) -> Result<PdDictionary> {
    let rows = cfg.total_antennas();
    check_budget(rows * angles.len() * distances.len(), budget)?;
    let mut columns = Vec::with_capacity(angles.len() * distances.len());
    for c in 0..distances.len() {
        for a in 0..angles.len() {
            columns.push(steering_exact(cfg, angles.theta(a), distances.r(c))?);
        }
    }
    Ok(PdDictionary {
        matrix: matrix_from_columns(rows, columns),
        angles: angles.clone(),
        distances: distances.clone(),
    })
}

/// Per-subarray angular dictionary `A` (plane-wave atoms).
#[derive(Debug, Clone)]
pub struct AngularDictionary {
    matrix: CMatrix,
    angles: AngleGrid,
}

impl AngularDictionary {
    /// `N x A`.
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn angles(&self) -> &AngleGrid {
        &self.angles
    }
}

pub fn build_angular_dictionary(cfg: &ArrayConfig, angles: &AngleGrid) -> Result<AngularDictionary> {
    check_budget(cfg.antennas * angles.len(), DEFAULT_ELEMENT_BUDGET)?;
    let columns = (0..angles.len()).map(|a| steering_subarray(cfg, angles.theta(a))).collect();
    Ok(AngularDictionary { matrix: matrix_from_columns(cfg.antennas, columns), angles: angles.clone() })
}

/// Inter-subarray angle-distance dictionary `B`.
#[derive(Debug, Clone)]
pub struct InterSubDictionary {
    matrix: CMatrix,
    angles: AngleGrid,
    distances: DistanceGrid,
}

impl InterSubDictionary {
    /// `M x A C`, angle-major columns.
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn angles(&self) -> &AngleGrid {
        &self.angles
    }

    pub fn distances(&self) -> &DistanceGrid {
        &self.distances
    }

    pub fn indexer(&self) -> AtomIndexer {
        AtomIndexer { angles: self.angles.len(), distances: self.distances.len() }
    }

    /// `b(theta_a, r_c)`.
    pub fn atom(&self, a: usize, c: usize) -> Result<CVector> {
        Ok(self.matrix.column(self.indexer().flat(a, c)?))
    }
}

pub fn build_intersub_dictionary(
    cfg: &ArrayConfig,
    angles: &AngleGrid,
    distances: &DistanceGrid,
) -> Result<InterSubDictionary> {
    check_budget(cfg.subarrays * angles.len() * distances.len(), DEFAULT_ELEMENT_BUDGET)?;
    let mut columns = Vec::with_capacity(angles.len() * distances.len());
    for c in 0..distances.len() {
        for a in 0..angles.len() {
            columns.push(steering_intersub(cfg, angles.theta(a), distances.r(c))?);
        }
    }
    Ok(InterSubDictionary {
        matrix: matrix_from_columns(cfg.subarrays, columns),
        angles: angles.clone(),
        distances: distances.clone(),
    })
}

/// The 2D angle-distance dictionary. Atoms `a(theta_a) b(theta_a, r_c)^T`
/// are generated from the factor dictionaries on demand.
#[derive(Debug, Clone)]
pub struct Pad2dDictionary {
    angular: AngularDictionary,
    intersub: InterSubDictionary,
}

impl Pad2dDictionary {
    pub fn new(angular: AngularDictionary, intersub: InterSubDictionary) -> Result<Self> {
        if angular.angles() != intersub.angles() {
            return Err(Error::InvalidParameter(
                "angular and inter-subarray dictionaries use different angle grids".into(),
            ));
        }
        Ok(Self { angular, intersub })
    }

    pub fn build(cfg: &ArrayConfig, angles: &AngleGrid, distances: &DistanceGrid) -> Result<Self> {
        Self::new(
            build_angular_dictionary(cfg, angles)?,
            build_intersub_dictionary(cfg, angles, distances)?,
        )
    }

    pub fn angular(&self) -> &AngularDictionary {
        &self.angular
    }

    pub fn intersub(&self) -> &InterSubDictionary {
        &self.intersub
    }

    pub fn indexer(&self) -> AtomIndexer {
        self.intersub.indexer()
    }

    /// `vec` of atom `(a, c)`, i.e. `b ⊗ a`.
    pub fn atom_vec(&self, a: usize, c: usize) -> Result<CVector> {
        let b = self.intersub.atom(a, c)?;
        Ok(kron(&b, &self.angular.matrix().column(a)))
    }
}

/// Atom `(a, c)` of the 2D dictionary as an `N x M` rank-one matrix.
pub fn pad2d_atom(pad: &Pad2dDictionary, a: usize, c: usize) -> Result<CMatrix> {
    let b = pad.intersub.atom(a, c)?;
    let av = pad.angular.matrix.column(a);
    Ok(CMatrix::from_fn(av.len(), b.len(), |n, m| av[n] * b[m]))
}
