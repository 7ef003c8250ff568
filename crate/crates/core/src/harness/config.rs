//! Flat `key = value` scenario configuration.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dictionary::DistanceSampling;
use crate::error::{Error, Result};
use crate::estimators::{Denominator, EstimatorConfig, Method};
use crate::geometry::{fraunhofer_distance, ArrayConfig, ChannelModel};
use crate::measurement::CombinerKind;

/// Where true path distances are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioDistances {
    /// `scenario_r_min, + scenario_r_step, ...` up to `scenario_r_max`.
    Step,
    /// The dictionary distance grid, so every path is on-grid.
    Dictionary,
}

impl FromStr for ScenarioDistances {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "step" => Ok(ScenarioDistances::Step),
            "dictionary" => Ok(ScenarioDistances::Dictionary),
            other => Err(Error::Config(format!("unknown scenario distances '{other}'"))),
        }
    }
}

impl std::fmt::Display for ScenarioDistances {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScenarioDistances::Step => "step",
            ScenarioDistances::Dictionary => "dictionary",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub frequency_hz: f64,
    pub subarrays: usize,
    pub antennas: usize,
    pub intra_spacing_wavelengths: f64,
    pub subarray_gap_wavelengths: f64,
    pub pilots: usize,
    pub snr_db: f64,
    pub paths: usize,
    pub channel_model: ChannelModel,
    pub combiner: CombinerKind,
    /// `None` means one angle sample per antenna.
    pub dict_angles: Option<usize>,
    pub dict_distance_mode: DistanceSampling,
    pub dict_distances: usize,
    pub scenario_sin_min: f64,
    pub scenario_sin_max: f64,
    pub scenario_r_min: f64,
    /// `None` means twice the Fraunhofer distance.
    pub scenario_r_max: Option<f64>,
    pub scenario_r_step: f64,
    pub scenario_distances: ScenarioDistances,
    pub methods: Vec<Method>,
    pub trials: usize,
    pub base_seed: u64,
    pub denominator: Denominator,
    pub residual_tolerance: Option<f64>,
    /// Atom model used by TS-PAD-OMP to rebuild the channel.
    pub ts_reconstruction: ChannelModel,
    /// Worker threads for trials, 0 for all cores.
    pub threads: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            frequency_hz: 100e9,
            subarrays: 8,
            antennas: 24,
            intra_spacing_wavelengths: 0.5,
            subarray_gap_wavelengths: 8.0,
            pilots: 8,
            snr_db: 10.0,
            paths: 4,
            channel_model: ChannelModel::Exact,
            combiner: CombinerKind::Optimized,
            dict_angles: None,
            dict_distance_mode: DistanceSampling::Reciprocal,
            dict_distances: 10,
            scenario_sin_min: -0.75,
            scenario_sin_max: 0.75,
            scenario_r_min: 5.0,
            scenario_r_max: None,
            scenario_r_step: 5.0,
            scenario_distances: ScenarioDistances::Step,
            methods: vec![Method::PdOmp, Method::MadOmp, Method::TsPadOmp, Method::Pad2dOmp, Method::Ols],
            trials: 200,
            base_seed: 1,
            denominator: Denominator::SquaredNorm,
            residual_tolerance: None,
            ts_reconstruction: ChannelModel::Exact,
            threads: 0,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value '{value}' for '{key}'")))
}

fn parse_auto<T: FromStr>(key: &str, value: &str) -> Result<Option<T>> {
    if value == "auto" {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

fn parse_optional<T: FromStr>(key: &str, value: &str) -> Result<Option<T>> {
    if value == "none" {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

fn show<T: ToString>(v: &Option<T>, absent: &str) -> String {
    v.as_ref().map_or_else(|| absent.to_string(), ToString::to_string)
}

impl ScenarioConfig {
    /// Parses config text on top of the defaults. Unknown or repeated keys
    /// are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = std::collections::HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!("line {}: duplicate key '{key}'", lineno + 1)));
            }
            cfg.set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {}", lineno + 1, strip(e))))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    /// Sets one field from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "frequency_hz" => self.frequency_hz = parse(key, value)?,
            "subarrays" => self.subarrays = parse(key, value)?,
            "antennas" => self.antennas = parse(key, value)?,
            "intra_spacing_wavelengths" => self.intra_spacing_wavelengths = parse(key, value)?,
            "subarray_gap_wavelengths" => self.subarray_gap_wavelengths = parse(key, value)?,
            "pilots" => self.pilots = parse(key, value)?,
            "snr_db" => self.snr_db = parse(key, value)?,
            "paths" => self.paths = parse(key, value)?,
            "channel_model" => self.channel_model = parse(key, value)?,
            "combiner" => self.combiner = parse(key, value)?,
            "dict_angles" => self.dict_angles = parse_auto(key, value)?,
            "dict_distance_mode" => self.dict_distance_mode = parse(key, value)?,
            "dict_distances" => self.dict_distances = parse(key, value)?,
            "scenario_sin_min" => self.scenario_sin_min = parse(key, value)?,
            "scenario_sin_max" => self.scenario_sin_max = parse(key, value)?,
            "scenario_r_min" => self.scenario_r_min = parse(key, value)?,
            "scenario_r_max" => self.scenario_r_max = parse_auto(key, value)?,
            "scenario_r_step" => self.scenario_r_step = parse(key, value)?,
            "scenario_distances" => self.scenario_distances = parse(key, value)?,
            "methods" => {
                self.methods = value
                    .split(',')
                    .map(|m| parse(key, m.trim()))
                    .collect::<Result<Vec<Method>>>()?
            }
            "trials" => self.trials = parse(key, value)?,
            "base_seed" => self.base_seed = parse(key, value)?,
            "denominator" => self.denominator = parse(key, value)?,
            "residual_tolerance" => self.residual_tolerance = parse_optional(key, value)?,
            "ts_reconstruction" => self.ts_reconstruction = parse(key, value)?,
            "threads" => self.threads = parse(key, value)?,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Config text that parses back to `self`.
    pub fn render(&self) -> String {
        let methods: Vec<&str> = self.methods.iter().map(|m| m.as_str()).collect();
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("frequency_hz", format!("{:e}", self.frequency_hz));
        kv("subarrays", self.subarrays.to_string());
        kv("antennas", self.antennas.to_string());
        kv("intra_spacing_wavelengths", self.intra_spacing_wavelengths.to_string());
        kv("subarray_gap_wavelengths", self.subarray_gap_wavelengths.to_string());
        kv("pilots", self.pilots.to_string());
        kv("snr_db", self.snr_db.to_string());
        kv("paths", self.paths.to_string());
        kv("channel_model", self.channel_model.to_string());
        kv("combiner", self.combiner.to_string());
        kv("dict_angles", show(&self.dict_angles, "auto"));
        kv("dict_distance_mode", self.dict_distance_mode.to_string());
        kv("dict_distances", self.dict_distances.to_string());
        kv("scenario_sin_min", self.scenario_sin_min.to_string());
        kv("scenario_sin_max", self.scenario_sin_max.to_string());
        kv("scenario_r_min", self.scenario_r_min.to_string());
        kv("scenario_r_max", show(&self.scenario_r_max, "auto"));
        kv("scenario_r_step", self.scenario_r_step.to_string());
        kv("scenario_distances", self.scenario_distances.to_string());
        kv("methods", methods.join(","));
        kv("trials", self.trials.to_string());
        kv("base_seed", self.base_seed.to_string());
        kv("denominator", self.denominator.to_string());
        kv("residual_tolerance", show(&self.residual_tolerance, "none"));
        kv("ts_reconstruction", self.ts_reconstruction.to_string());
        kv("threads", self.threads.to_string());
        out
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        self.array_config().map_err(|e| Error::Config(strip(e)))?;
        if self.pilots == 0 {
            return bad("pilots must be at least 1".into());
        }
        if self.paths == 0 {
            return bad("paths must be at least 1".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.methods.is_empty() {
            return bad("methods must not be empty".into());
        }
        if self.dict_angles == Some(0) || self.dict_distances == 0 {
            return bad("dictionary grids need at least one sample".into());
        }
        if !(self.scenario_sin_min >= -1.0
            && self.scenario_sin_max <= 1.0
            && self.scenario_sin_min <= self.scenario_sin_max)
        {
            return bad(format!(
                "sine window [{}, {}] must lie inside [-1, 1]",
                self.scenario_sin_min, self.scenario_sin_max
            ));
        }
        if !(self.scenario_r_min > 0.0) || !(self.scenario_r_step > 0.0) {
            return bad("scenario distances must be positive".into());
        }
        if self.scenario_r_max().is_ok_and(|r| r <= self.scenario_r_min) {
            return bad("scenario_r_max must exceed scenario_r_min".into());
        }
        self.estimator_config().validate().map_err(|e| Error::Config(strip(e)))?;
        Ok(())
    }

    pub fn array_config(&self) -> Result<ArrayConfig> {
        ArrayConfig::with_gap(
            self.subarrays,
            self.antennas,
            self.frequency_hz,
            self.intra_spacing_wavelengths,
            self.subarray_gap_wavelengths,
        )
    }

    pub fn angle_count(&self) -> usize {
        self.dict_angles.unwrap_or(self.antennas)
    }

    pub fn scenario_r_max(&self) -> Result<f64> {
        match self.scenario_r_max {
            Some(r) => Ok(r),
            None => Ok(2.0 * fraunhofer_distance(&self.array_config()?)),
        }
    }

    pub fn estimator_config(&self) -> EstimatorConfig {
        EstimatorConfig {
            sparsity: self.paths,
            tolerance: self.residual_tolerance,
            denominator: self.denominator,
        }
    }
}

// Error display without the variant prefix, for nesting into Config.
fn strip(e: Error) -> String {
    match e {
        Error::Config(s) | Error::InvalidParameter(s) => s,
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_text() {
        let d = ScenarioConfig::default();
        assert_eq!(ScenarioConfig::parse(&d.render()).unwrap(), d);
        assert_eq!(ScenarioConfig::parse("").unwrap(), d);
        assert!((d.scenario_r_max().unwrap() - 307.2).abs() < 1e-9);
    }

    #[test]
    fn parses_comments_and_overrides() {
        let cfg = ScenarioConfig::parse(
            "# header\npilots = 16  # more pilots\nmethods = pd-omp, ols\n\
             dict_angles = 32\nresidual_tolerance = 1e-6\nscenario_r_max = 100\n",
        )
        .unwrap();
        assert_eq!(cfg.pilots, 16);
        assert_eq!(cfg.methods, vec![Method::PdOmp, Method::Ols]);
        assert_eq!(cfg.angle_count(), 32);
        assert_eq!(cfg.residual_tolerance, Some(1e-6));
        assert_eq!(cfg.scenario_r_max().unwrap(), 100.0);
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "bogus = 1",
            "pilots = 8\npilots = 9",
            "pilots = eight",
            "pilots",
            "trials = 0",
            "methods = omp",
            "scenario_sin_min = -2",
            "scenario_r_max = 1",
            "antennas = 0",
        ] {
            assert!(matches!(ScenarioConfig::parse(text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn json_round_trip() {
        let cfg = ScenarioConfig { residual_tolerance: Some(0.5), ..Default::default() };
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<ScenarioConfig>(&text).unwrap(), cfg);
    }
}
