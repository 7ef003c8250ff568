//! Seeded Monte-Carlo trials and parameter sweeps.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ScenarioConfig, ScenarioDistances};
use crate::dictionary::{
    build_pd_dictionary, make_angle_grid, make_distance_grid, AngleGrid, DistanceGrid,
    Pad2dDictionary, PdDictionary,
};
use crate::error::{Error, Result};
use crate::estimators::{
    mad_omp, ols_oracle, pad2d_omp, pd_omp, ts_pad_omp, EstimationResult, Method,
};
use crate::geometry::{synth_channel, ArrayConfig, ChannelRealization, Path, PathSet};
use crate::measurement::{acquire, complex_normal, make_combiner, snr_to_sigma, CombinerMatrix, Observation};

const STREAM_PATHS: u64 = 1;
const STREAM_COMBINER: u64 = 2;
const STREAM_NOISE: u64 = 3;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of trial `trial_idx`: `base_seed XOR trial_idx`.
pub fn trial_seed(base_seed: u64, trial_idx: u64) -> u64 {
    base_seed ^ trial_idx
}

/// Independent sub-stream seed of a trial seed.
pub fn stream_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream))
}

/// Everything derived from a config that trials share read-only.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub array: ArrayConfig,
    pub angles: AngleGrid,
    pub distances: DistanceGrid,
    /// Built only when PD-OMP is requested.
    pub pd: Option<PdDictionary>,
    pub pad: Pad2dDictionary,
    /// Sines true path angles are drawn from.
    pub path_sines: Vec<f64>,
    /// Distances true paths are drawn from.
    pub path_distances: Vec<f64>,
}

impl Scenario {
    pub fn build(config: &ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let array = config.array_config()?;
        let r_max = config.scenario_r_max()?;
        let angles = make_angle_grid(config.angle_count(), None)?;
        let distances = make_distance_grid(
            config.dict_distances,
            config.scenario_r_min,
            r_max,
            config.dict_distance_mode,
        )?;
        let pd = if config.methods.contains(&Method::PdOmp) {
            Some(build_pd_dictionary(&array, &angles, &distances)?)
        } else {
            None
        };
        let pad = Pad2dDictionary::build(&array, &angles, &distances)?;
        // angle resolution 2/N inside the sine window
        let path_sines = make_angle_grid(
            config.antennas,
            Some((config.scenario_sin_min, config.scenario_sin_max)),
        )?
        .sin_values()
        .to_vec();
        let path_distances = match config.scenario_distances {
            ScenarioDistances::Step => {
                DistanceGrid::stepped(config.scenario_r_min, r_max, config.scenario_r_step)?
                    .r_values()
                    .to_vec()
            }
            ScenarioDistances::Dictionary => distances.r_values().to_vec(),
        };
        if config.paths > path_sines.len() {
            return Err(Error::Config(format!(
                "{} paths need distinct angles but the window holds {}",
                config.paths,
                path_sines.len()
            )));
        }
        Ok(Self { config: config.clone(), array, angles, distances, pd, pad, path_sines, path_distances })
    }

    /// Distinct angles, uniform distances, standard complex Gaussian gains.
    pub fn draw_paths(&self, seed: u64) -> Result<PathSet> {
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, STREAM_PATHS));
        let picks = sample(&mut rng, self.path_sines.len(), self.config.paths);
        let paths = picks
            .iter()
            .map(|i| {
                let r = self.path_distances[rng.random_range(0..self.path_distances.len())];
                let gain = complex_normal(&mut rng, 1.0);
                Path { theta: self.path_sines[i].asin(), r, gain }
            })
            .collect();
        PathSet::new(paths)
    }

    pub fn combiner(&self, seed: u64) -> Result<CombinerMatrix> {
        make_combiner(
            self.config.combiner,
            self.config.antennas,
            self.config.pilots,
            stream_seed(seed, STREAM_COMBINER),
        )
    }

    /// Channel, combiner and observation of one seeded draw.
    pub fn realize(&self, seed: u64) -> Result<Realization> {
        let paths = self.draw_paths(seed)?;
        let channel = synth_channel(&self.array, &paths, self.config.channel_model)?;
        let combiner = self.combiner(seed)?;
        let sigma2 = snr_to_sigma(self.config.snr_db);
        let observation = acquire(&channel, &combiner, sigma2, stream_seed(seed, STREAM_NOISE))?;
        Ok(Realization { paths, channel, combiner, observation })
    }

    /// Runs one estimator on a realization and scores it.
    pub fn estimate(&self, method: Method, real: &Realization) -> Result<EstimationResult> {
        let w = &real.combiner.w;
        let obs = &real.observation;
        let ecfg = self.config.estimator_config();
        let mut result = match method {
            Method::PdOmp => {
                let pd = self.pd.as_ref().ok_or_else(|| {
                    Error::Config("PD dictionary was not built for this scenario".into())
                })?;
                pd_omp(obs, w, pd, &ecfg)?
            }
            Method::MadOmp => mad_omp(obs, w, self.pad.angular(), &ecfg)?.0,
            Method::TsPadOmp => {
                ts_pad_omp(obs, w, &self.pad, &self.array, &ecfg, self.config.ts_reconstruction)?
            }
            Method::Pad2dOmp => pad2d_omp(obs, w, &self.pad, &ecfg)?,
            Method::Ols => ols_oracle(obs, w, &self.array, &real.paths, self.config.channel_model)?,
        };
        result.evaluate(&real.channel.h)?;
        Ok(result)
    }
}

#[derive(Debug, Clone)]
pub struct Realization {
    pub paths: PathSet,
    pub channel: ChannelRealization,
    pub combiner: CombinerMatrix,
    pub observation: Observation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub theta: f64,
    pub r: f64,
    pub gain_re: f64,
    pub gain_im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodRecord {
    pub method: Method,
    pub nmse: Option<f64>,
    pub elapsed_s: f64,
    /// Set when the estimator failed; the trial is then excluded from means.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub paths: Vec<PathRecord>,
    pub methods: Vec<MethodRecord>,
}

/// One Monte-Carlo draw with every configured method on the same
/// observation.
pub fn run_trial(scenario: &Scenario, trial_idx: u64) -> Result<TrialRecord> {
    let seed = trial_seed(scenario.config.base_seed, trial_idx);
    let real = scenario.realize(seed)?;
    let methods = scenario
        .config
        .methods
        .iter()
        .map(|&method| match scenario.estimate(method, &real) {
            Ok(res) => MethodRecord { method, nmse: res.nmse, elapsed_s: res.elapsed, error: None },
            Err(e) => MethodRecord { method, nmse: None, elapsed_s: 0.0, error: Some(e.to_string()) },
        })
        .collect();
    let paths = real
        .paths
        .iter()
        .map(|p| PathRecord { theta: p.theta, r: p.r, gain_re: p.gain.re, gain_im: p.gain.im })
        .collect();
    Ok(TrialRecord { trial: trial_idx, seed, paths, methods })
}

/// Runs `trials` trials (in parallel) and returns the records in trial
/// order.
pub fn run_trials(scenario: &Scenario) -> Result<Vec<TrialRecord>> {
    let n = scenario.config.trials as u64;
    let run = || (0..n).into_par_iter().map(|t| run_trial(scenario, t)).collect::<Result<Vec<_>>>();
    if scenario.config.threads == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(scenario.config.threads)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(run)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Snr,
    Q,
    L,
    N,
}

impl SweepAxis {
    fn is_integer(self) -> bool {
        !matches!(self, SweepAxis::Snr)
    }

    /// Config with the axis parameter set to `value`.
    pub fn apply(self, base: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut cfg = base.clone();
        if self.is_integer() && (value.fract() != 0.0 || value < 1.0) {
            return Err(Error::Config(format!("{self} values must be positive integers, got {value}")));
        }
        match self {
            SweepAxis::Snr => cfg.snr_db = value,
            SweepAxis::Q => cfg.pilots = value as usize,
            SweepAxis::L => cfg.paths = value as usize,
            SweepAxis::N => cfg.antennas = value as usize,
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn format_value(self, value: f64) -> String {
        if self.is_integer() {
            format!("{}", value as u64)
        } else {
            format!("{value:e}")
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::Snr => "snr",
            SweepAxis::Q => "q",
            SweepAxis::L => "l",
            SweepAxis::N => "n",
        })
    }
}

impl FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "snr" => Ok(SweepAxis::Snr),
            "q" => Ok(SweepAxis::Q),
            "l" => Ok(SweepAxis::L),
            "n" => Ok(SweepAxis::N),
            other => Err(Error::Config(format!("unknown sweep axis '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub method: Method,
    /// `None` when every trial failed.
    pub mean_nmse: Option<f64>,
    pub mean_runtime_s: f64,
    pub trials: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub points: Vec<SweepPoint>,
    pub config: ScenarioConfig,
}

impl SweepResult {
    pub fn point(&self, value: f64, method: Method) -> Option<&SweepPoint> {
        self.points.iter().find(|p| p.value == value && p.method == method)
    }

    /// Mean NMSE of `method` at every axis value, in axis order.
    pub fn curve(&self, method: Method) -> Vec<Option<f64>> {
        self.values
            .iter()
            .map(|&v| self.point(v, method).and_then(|p| p.mean_nmse))
            .collect()
    }
}

/// Per-method means over a set of trial records. Sums run in trial order so
/// the result does not depend on scheduling.
pub fn aggregate(value: f64, methods: &[Method], records: &[TrialRecord]) -> Vec<SweepPoint> {
    methods
        .iter()
        .enumerate()
        .map(|(k, &method)| {
            let mut sum = 0.0;
            let mut time = 0.0;
            let mut ok = 0usize;
            for rec in records {
                let m = &rec.methods[k];
                if let Some(e) = m.nmse {
                    sum += e;
                    time += m.elapsed_s;
                    ok += 1;
                }
            }
            SweepPoint {
                value,
                method,
                mean_nmse: (ok > 0).then(|| sum / ok as f64),
                mean_runtime_s: if ok > 0 { time / ok as f64 } else { 0.0 },
                trials: records.len(),
                failures: records.len() - ok,
            }
        })
        .collect()
}

/// Runs the configured trials at every axis value. Trial seeds are the
/// same at every value and for every method, so all comparisons are paired.
pub fn sweep(base: &ScenarioConfig, axis: SweepAxis, values: &[f64]) -> Result<SweepResult> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one axis value".into()));
    }
    let mut points = Vec::with_capacity(values.len() * base.methods.len());
    for &value in values {
        let cfg = axis.apply(base, value)?;
        let scenario = Scenario::build(&cfg)?;
        let records = run_trials(&scenario)?;
        points.extend(aggregate(value, &cfg.methods, &records));
    }
    Ok(SweepResult { axis, values: values.to_vec(), points, config: base.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ScenarioConfig {
        ScenarioConfig { trials: 4, pilots: 8, paths: 2, ..Default::default() }
    }

    #[test]
    fn trials_are_deterministic_and_complete() {
        let scenario = Scenario::build(&small()).unwrap();
        let a = run_trial(&scenario, 3).unwrap();
        let b = run_trial(&scenario, 3).unwrap();
        assert_eq!(a.paths, b.paths);
        assert_eq!(a.seed, 1 ^ 3);
        let nm = |r: &TrialRecord| r.methods.iter().map(|m| m.nmse).collect::<Vec<_>>();
        assert_eq!(nm(&a), nm(&b));
        assert_eq!(a.methods.len(), 5);
        assert_ne!(run_trial(&scenario, 4).unwrap().paths, a.paths);
    }

    #[test]
    fn drawn_paths_respect_the_scenario_grid() {
        let scenario = Scenario::build(&ScenarioConfig { paths: 6, ..small() }).unwrap();
        assert_eq!(scenario.path_sines.len(), 19);
        assert_eq!(scenario.path_distances.len(), 61);
        for t in 0..20 {
            let paths = scenario.draw_paths(t).unwrap();
            let mut sines: Vec<f64> = paths.iter().map(|p| p.theta.sin()).collect();
            for s in &sines {
                assert!(s.abs() <= 0.75 + 1e-12);
                assert!(scenario.path_sines.iter().any(|g| (g - s).abs() < 1e-12));
            }
            sines.sort_by(f64::total_cmp);
            assert!(sines.windows(2).all(|w| w[1] - w[0] > 1e-9));
            for p in paths.iter() {
                assert!(scenario.path_distances.contains(&p.r));
            }
        }
    }

    #[test]
    fn seeds_do_not_depend_on_trial_count() {
        let s1 = Scenario::build(&small()).unwrap();
        let s2 = Scenario::build(&ScenarioConfig { trials: 50, ..small() }).unwrap();
        let r1 = run_trials(&s1).unwrap();
        let r2 = run_trials(&s2).unwrap();
        for (a, b) in r1.iter().zip(&r2) {
            assert_eq!(a.paths, b.paths);
        }
        assert_ne!(stream_seed(7, STREAM_PATHS), stream_seed(7, STREAM_NOISE));
    }

    #[test]
    fn noiseless_single_path_is_exact_for_model_matched_methods() {
        let cfg = ScenarioConfig {
            snr_db: 300.0,
            paths: 1,
            trials: 5,
            scenario_distances: ScenarioDistances::Dictionary,
            ..Default::default()
        };
        let scenario = Scenario::build(&cfg).unwrap();
        for rec in run_trials(&scenario).unwrap() {
            for m in &rec.methods {
                if matches!(m.method, Method::PdOmp | Method::TsPadOmp | Method::Ols) {
                    assert!(m.nmse.unwrap() < 1e-6, "{:?} {:?}", m, rec.paths);
                }
            }
        }
    }

    #[test]
    fn singleton_sweep_matches_direct_aggregation() {
        let cfg = small();
        let res = sweep(&cfg, SweepAxis::Snr, &[10.0]).unwrap();
        let records = run_trials(&Scenario::build(&cfg).unwrap()).unwrap();
        let direct = aggregate(10.0, &cfg.methods, &records);
        for (p, d) in res.points.iter().zip(&direct) {
            assert_eq!(p.mean_nmse, d.mean_nmse);
            assert_eq!(p.trials, 4);
        }
        assert_eq!(res.points.len(), 5);
    }

    #[test]
    fn axis_values_are_validated() {
        let cfg = small();
        assert!(SweepAxis::Q.apply(&cfg, 2.5).is_err());
        assert!(SweepAxis::N.apply(&cfg, 0.0).is_err());
        assert_eq!(SweepAxis::L.apply(&cfg, 3.0).unwrap().paths, 3);
        assert_eq!(SweepAxis::Snr.format_value(-15.0), "-1.5e1");
        assert_eq!(SweepAxis::Q.format_value(16.0), "16");
        assert!(sweep(&cfg, SweepAxis::Q, &[]).is_err());
    }
}
