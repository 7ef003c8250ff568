//! Constant-modulus combiners and pilot acquisition.
//!
//! All subarrays share one `N x Q` combiner `W`. With the all-ones pilot the
//! pilots of subarray `m` are `y_m = W^H (h_m + n_m)`, i.e. `Y = W^H (H + N)`
//! and the stacked vector is `vec(Y)`.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ChannelRealization;
use crate::numkern::{vec, CMatrix, CVector, Qr, C64};

const RESEED_STEP: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CombinerKind {
    Random,
    Optimized,
}

impl fmt::Display for CombinerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CombinerKind::Random => "random",
            CombinerKind::Optimized => "optimized",
        })
    }
}

impl FromStr for CombinerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(CombinerKind::Random),
            "optimized" => Ok(CombinerKind::Optimized),
            other => Err(Error::Config(format!("unknown combiner '{other}'"))),
        }
    }
}

/// Shared per-subarray combiner with constant-modulus entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinerMatrix {
    /// `N x Q`.
    pub w: CMatrix,
    pub kind: CombinerKind,
    pub column_norm: f64,
}

impl CombinerMatrix {
    pub fn antennas(&self) -> usize {
        self.w.rows()
    }

    pub fn pilots(&self) -> usize {
        self.w.cols()
    }

    /// More pilots than antennas per subarray: the columns cannot be
    /// orthonormal.
    pub fn is_overcomplete(&self) -> bool {
        self.pilots() > self.antennas()
    }
}

/// The received pilots of one channel use.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    /// `vec(Y)`, length `M Q`.
    pub y_stacked: CVector,
    /// `Q x M`, column `m` holds the pilots of subarray `m`.
    pub y_mat: CMatrix,
    pub sigma2: f64,
    pub seed: u64,
}

/// Noise variance for an SNR of `1 / sigma^2`.
pub fn snr_to_sigma(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// Circularly-symmetric complex Gaussian sample with the given variance.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(s * re, s * im)
}

fn check_dims(n: usize, q: usize) -> Result<()> {
    if n == 0 || q == 0 {
        return Err(Error::InvalidParameter(format!("combiner dimensions {n}x{q}")));
    }
    Ok(())
}

pub fn random_combiner(n: usize, q: usize, seed: u64) -> Result<CombinerMatrix> {
    check_dims(n, q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modulus = 1.0 / (n as f64).sqrt();
    let w = CMatrix::from_fn(n, q, |_, _| C64::from_polar(modulus, rng.random_range(0.0..2.0 * PI)));
    Ok(CombinerMatrix { w, kind: CombinerKind::Random, column_norm: 1.0 })
}

fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> Result<CMatrix> {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_normal(rng, 1.0));
    Ok(Qr::factor(&g)?.thin_q())
}

/// `U_1 [I, 0] V_1^H` for seeded random unitaries, before the modulus
/// projection. All singular values are one, so with `Q <= N` the total
/// coherence vanishes.
pub fn unconstrained_optimized_combiner(n: usize, q: usize, seed: u64) -> Result<CMatrix> {
    check_dims(n, q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u1 = random_unitary(n, &mut rng)?;
    let v1 = random_unitary(q, &mut rng)?;
    let k = n.min(q);
    Ok(CMatrix::from_fn(n, q, |i, j| {
        (0..k).map(|t| u1[(i, t)] * v1[(j, t)].conj()).sum()
    }))
}

pub fn optimized_combiner(n: usize, q: usize, seed: u64) -> Result<CombinerMatrix> {
    check_dims(n, q)?;
    let modulus = 1.0 / (n as f64).sqrt();
    let mut attempt_seed = seed;
    loop {
        let w = unconstrained_optimized_combiner(n, q, attempt_seed)?;
        if w.as_slice().iter().all(|z| z.norm() > 0.0) {
            let projected = CMatrix::from_fn(n, q, |i, j| {
                let z = w[(i, j)];
                z / z.norm() * modulus
            });
            return Ok(CombinerMatrix {
                w: projected,
                kind: CombinerKind::Optimized,
                column_norm: 1.0,
            });
        }
        attempt_seed = attempt_seed.wrapping_add(RESEED_STEP);
    }
}

pub fn make_combiner(kind: CombinerKind, n: usize, q: usize, seed: u64) -> Result<CombinerMatrix> {
    match kind {
        CombinerKind::Random => random_combiner(n, q, seed),
        CombinerKind::Optimized => optimized_combiner(n, q, seed),
    }
}

/// `||I_Q - W^H W||_F^2`.
pub fn total_coherence(w: &CMatrix) -> f64 {
    let gram = w.adjoint_matmul(w).expect("W^H W is always conformable");
    gram.sub(&CMatrix::identity(w.cols())).expect("square").frobenius_norm_sqr()
}

/// Simulates one pilot block. Noise is drawn per antenna element with
/// variance `sigma2` and then combined.
pub fn acquire(
    chan: &ChannelRealization,
    w: &CombinerMatrix,
    sigma2: f64,
    seed: u64,
) -> Result<Observation> {
    let (n, m) = chan.h_mat.shape();
    if w.antennas() != n {
        return Err(Error::Shape(format!(
            "combiner has {} rows, subarrays have {n} antennas",
            w.antennas()
        )));
    }
    if !(sigma2 >= 0.0) || !sigma2.is_finite() {
        return Err(Error::InvalidParameter(format!("noise variance {sigma2}")));
    }
    let received = if sigma2 > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = CMatrix::from_fn(n, m, |_, _| complex_normal(&mut rng, sigma2));
        chan.h_mat.add(&noise)?
    } else {
        chan.h_mat.clone()
    };
    let y_mat = w.w.adjoint_matmul(&received)?;
    Ok(Observation { y_stacked: vec(&y_mat), y_mat, sigma2, seed })
}

/// Writes `W` as CSV, one row per antenna, each entry as an `re,im` pair.
pub fn write_combiner_csv<W: Write>(w: &CMatrix, out: &mut W) -> std::io::Result<()> {
    let header: Vec<String> =
        (0..w.cols()).flat_map(|q| [format!("re{q}"), format!("im{q}")]).collect();
    writeln!(out, "{}", header.join(","))?;
    for i in 0..w.rows() {
        let row: Vec<String> =
            w.row(i).iter().flat_map(|z| [format!("{:e}", z.re), format!("{:e}", z.im)]).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
