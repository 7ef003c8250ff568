//! Widely-spaced multi-subarray (WSMS) geometry: element positions, exact and
//! cross-field array responses, and multipath channel synthesis.
//!
//! The array lies on a line; element `(m, n)` (both zero-based) sits at
//! `m * D + n * d` from the reference element. A source at distance `r` and
//! angle `theta` (from broadside) reaches that element over
//! `sqrt(r^2 - 2 r p sin(theta) + p^2)`.
//!
//! Channel vectors stack subarrays: entry `m * N + n` belongs to element
//! `(m, n)`, so devectorizing with `N` rows puts subarray `m` in column `m`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkern::{devec, kron, CMatrix, CVector, C64};

/// Propagation speed used to turn carrier frequency into wavelength.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayConfig {
    /// Subarray count `M`.
    pub subarrays: usize,
    /// Antennas per subarray `N`.
    pub antennas: usize,
    /// Intra-subarray spacing `d` in meters.
    pub spacing: f64,
    /// Inter-subarray spacing `D` in meters.
    pub subarray_spacing: f64,
    pub wavelength: f64,
}

impl ArrayConfig {
    pub fn new(
        subarrays: usize,
        antennas: usize,
        spacing: f64,
        subarray_spacing: f64,
        wavelength: f64,
    ) -> Result<Self> {
        let cfg = Self { subarrays, antennas, spacing, subarray_spacing, wavelength };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Half-wavelength elements and `D = N d + gap * lambda`.
    pub fn with_gap(
        subarrays: usize,
        antennas: usize,
        frequency_hz: f64,
        spacing_wavelengths: f64,
        gap_wavelengths: f64,
    ) -> Result<Self> {
        if !(frequency_hz > 0.0) {
            return Err(Error::InvalidParameter(format!("frequency {frequency_hz} Hz")));
        }
        let wavelength = SPEED_OF_LIGHT / frequency_hz;
        let spacing = spacing_wavelengths * wavelength;
        let subarray_spacing = antennas as f64 * spacing + gap_wavelengths * wavelength;
        Self::new(subarrays, antennas, spacing, subarray_spacing, wavelength)
    }

    /// 100 GHz carrier, `M = 8`, `N = 24`, `d = lambda/2`, `D = N d + 8 lambda`.
    pub fn reference() -> Self {
        Self::with_gap(8, 24, 100e9, 0.5, 8.0).expect("reference geometry is valid")
    }

    pub fn validate(&self) -> Result<()> {
        if self.subarrays == 0 || self.antennas == 0 {
            return Err(Error::InvalidParameter(format!(
                "need at least one subarray and one antenna, got M={} N={}",
                self.subarrays, self.antennas
            )));
        }
        if !(self.spacing > 0.0) || !self.spacing.is_finite() {
            return Err(Error::InvalidParameter(format!("element spacing {}", self.spacing)));
        }
        if !(self.wavelength > 0.0) || !self.wavelength.is_finite() {
            return Err(Error::InvalidParameter(format!("wavelength {}", self.wavelength)));
        }
        let span = self.antennas as f64 * self.spacing;
        // relative slack so D = N d computed in floating point is accepted
        if !(self.subarray_spacing >= span * (1.0 - 1e-12)) || !self.subarray_spacing.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "subarray spacing {} is below the subarray span {span}",
                self.subarray_spacing
            )));
        }
        Ok(())
    }

    pub fn total_antennas(&self) -> usize {
        self.subarrays * self.antennas
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }
}

/// One propagation path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Path {
    /// Angle from broadside, radians.
    pub theta: f64,
    /// Distance to the reference element, meters.
    pub r: f64,
    pub gain: C64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSet {
    paths: Vec<Path>,
}

impl PathSet {
    pub fn new(paths: Vec<Path>) -> Result<Self> {
        if paths.is_empty() {
            return Err(Error::InvalidParameter("path set is empty".into()));
        }
        for p in &paths {
            if !(p.r > 0.0) || !p.r.is_finite() {
                return Err(Error::InvalidParameter(format!("path distance {}", p.r)));
            }
            if !p.theta.is_finite() || !p.gain.re.is_finite() || !p.gain.im.is_finite() {
                return Err(Error::NonFinite("path parameters"));
            }
        }
        Ok(Self { paths })
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Path> {
        self.paths.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelModel {
    /// Spherical wavefront over every element.
    Exact,
    /// Plane wave inside each subarray, spherical across subarrays.
    CrossField,
}

impl fmt::Display for ChannelModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChannelModel::Exact => "exact",
            ChannelModel::CrossField => "cross-field",
        })
    }
}

impl FromStr for ChannelModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(ChannelModel::Exact),
            "cross-field" => Ok(ChannelModel::CrossField),
            other => Err(Error::Config(format!("unknown channel model '{other}'"))),
        }
    }
}

/// A synthesized channel in stacked and matrix form.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// Stacked channel, length `M N`.
    pub h: CVector,
    /// `N x M`, column `m` is subarray `m`.
    pub h_mat: CMatrix,
    pub model: ChannelModel,
}

fn check_distance(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("distance must be positive, got {r}")));
    }
    Ok(())
}

/// Position of element `(m, n)` along the array, zero-based indices.
pub fn element_position(cfg: &ArrayConfig, m: usize, n: usize) -> Result<f64> {
    if m >= cfg.subarrays || n >= cfg.antennas {
        return Err(Error::IndexOutOfRange(format!(
            "element ({m}, {n}) in a {}x{} array",
            cfg.subarrays, cfg.antennas
        )));
    }
    Ok(m as f64 * cfg.subarray_spacing + n as f64 * cfg.spacing)
}

/// Source-to-element distance for an element at offset `p`.
pub fn exact_distance(r: f64, theta: f64, p: f64) -> Result<f64> {
    check_distance(r)?;
    Ok(spherical_distance(r, theta.sin(), p))
}

#[inline]
fn spherical_distance(r: f64, sin_theta: f64, p: f64) -> f64 {
    (r * r - 2.0 * r * p * sin_theta + p * p).sqrt()
}

/// Second-order (Fresnel) expansion of [`exact_distance`].
pub fn fresnel_distance(r: f64, theta: f64, p: f64) -> Result<f64> {
    check_distance(r)?;
    if p.abs() >= r {
        return Err(Error::ApproximationDomain(format!(
            "offset {p} m is not smaller than distance {r} m"
        )));
    }
    let s = theta.sin();
    Ok(r - p * s + p * p * (1.0 - s * s) / (2.0 * r))
}

/// Exact spherical-wavefront response, unit norm, length `M N`.
pub fn steering_exact(cfg: &ArrayConfig, theta: f64, r: f64) -> Result<CVector> {
    check_distance(r)?;
    let s = theta.sin();
    let k = cfg.wavenumber();
    let scale = 1.0 / (cfg.total_antennas() as f64).sqrt();
    let n_ant = cfg.antennas;
    Ok(CVector::from_fn(cfg.total_antennas(), |idx| {
        let (m, n) = (idx / n_ant, idx % n_ant);
        let p = m as f64 * cfg.subarray_spacing + n as f64 * cfg.spacing;
        let phase = -k * (spherical_distance(r, s, p) - r);
        C64::from_polar(scale, phase)
    }))
}

/// Plane-wave response of one subarray, unit norm, length `N`.
pub fn steering_subarray(cfg: &ArrayConfig, theta: f64) -> CVector {
    let s = theta.sin();
    let k = cfg.wavenumber();
    let scale = 1.0 / (cfg.antennas as f64).sqrt();
    CVector::from_fn(cfg.antennas, |n| C64::from_polar(scale, k * n as f64 * cfg.spacing * s))
}

/// Spherical-wave response across subarray reference points, unit norm,
/// length `M`.
pub fn steering_intersub(cfg: &ArrayConfig, theta: f64, r: f64) -> Result<CVector> {
    check_distance(r)?;
    let s = theta.sin();
    let k = cfg.wavenumber();
    let scale = 1.0 / (cfg.subarrays as f64).sqrt();
    Ok(CVector::from_fn(cfg.subarrays, |m| {
        let p = m as f64 * cfg.subarray_spacing;
        C64::from_polar(scale, -k * (spherical_distance(r, s, p) - r))
    }))
}

/// Cross-field response `b(theta, r) ⊗ a(theta)`.
pub fn steering_crossfield(cfg: &ArrayConfig, theta: f64, r: f64) -> Result<CVector> {
    Ok(kron(&steering_intersub(cfg, theta, r)?, &steering_subarray(cfg, theta)))
}

/// Whole-array plane-wave response (far-field limit), unit norm.
pub fn steering_farfield(cfg: &ArrayConfig, theta: f64) -> CVector {
    let s = theta.sin();
    let k = cfg.wavenumber();
    let scale = 1.0 / (cfg.total_antennas() as f64).sqrt();
    let n_ant = cfg.antennas;
    CVector::from_fn(cfg.total_antennas(), |idx| {
        let p = (idx / n_ant) as f64 * cfg.subarray_spacing + (idx % n_ant) as f64 * cfg.spacing;
        C64::from_polar(scale, k * p * s)
    })
}

pub fn steering(cfg: &ArrayConfig, model: ChannelModel, theta: f64, r: f64) -> Result<CVector> {
    match model {
        ChannelModel::Exact => steering_exact(cfg, theta, r),
        ChannelModel::CrossField => steering_crossfield(cfg, theta, r),
    }
}

/// `h = sqrt(M N / L) * sum_l z_l g(theta_l, r_l)`.
pub fn synth_channel(
    cfg: &ArrayConfig,
    paths: &PathSet,
    model: ChannelModel,
) -> Result<ChannelRealization> {
    let mn = cfg.total_antennas();
    let weight = (mn as f64 / paths.len() as f64).sqrt();
    let mut h = CVector::zeros(mn);
    for p in paths.iter() {
        let g = steering(cfg, model, p.theta, p.r)?;
        h.axpy(p.gain * weight, &g);
    }
    let h_mat = devec(&h, cfg.antennas)?;
    Ok(ChannelRealization { h, h_mat, model })
}

/// Fraunhofer distance `2 (M D)^2 / lambda`.
pub fn fraunhofer_distance(cfg: &ArrayConfig) -> f64 {
    let aperture = cfg.subarrays as f64 * cfg.subarray_spacing;
    2.0 * aperture * aperture / cfg.wavelength
}
