//! Experiment configuration: scenario defaults, the flat key-value config
//! file format, and flag overrides.
//!
//! Config files hold one `key = value` pair per line; `#` starts a comment.
//! CLI flags win over file values. The canonical rendering of a config is
//! hashed into every output CSV so results stay traceable.

use std::path::{Path, PathBuf};

use thiserror::Error;

use rgmusic::datagen::{NoiseModel, SourceConfig};
use rgmusic::doa::Method;
use rgmusic::spectrum::TauMeasure;
use rgmusic::weightfn::WeightFunction;

/// Fixed seed for materializing analytic scale laws, so that thresholds and
/// weights are identical across runs and processes.
pub const MEASURE_SEED: u64 = 0x5eed_0001;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("config line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("config line {line}: bad value for {key}: {message}")]
    BadValue {
        line: usize,
        key: String,
        message: String,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Spectrum,
    Oneshot,
    Mse,
    Estimate,
}

impl Scenario {
    pub fn label(&self) -> &'static str {
        match self {
            Scenario::Spectrum => "spectrum",
            Scenario::Oneshot => "oneshot",
            Scenario::Mse => "mse",
            Scenario::Estimate => "estimate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    Gaussian,
    StudentT,
    Outlier,
}

/// Full experiment description. Field defaults depend on the scenario; see
/// [`ExperimentConfig::for_scenario`].
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub n_antennas: usize,
    pub n_samples: usize,
    pub angles_deg: Vec<f64>,
    pub powers_db: Vec<f64>,
    pub noise: NoiseKind,
    pub student_beta: f64,
    pub outlier_count: usize,
    pub outlier_value: f64,
    pub alpha: f64,
    pub spacing: f64,
    pub trials: usize,
    pub seed: u64,
    pub workers: usize,
    pub out_dir: PathBuf,
    pub grid_start_deg: f64,
    pub grid_stop_deg: f64,
    pub grid_step_deg: f64,
    /// Half-width of the search window around the source midpoint for MSE
    /// sweeps, in degrees.
    pub window_half_deg: f64,
    pub sweep_db: Vec<f64>,
    pub methods: Vec<Method>,
    pub measure_draws: usize,
    pub density_eps: f64,
    pub l_max: usize,
    pub detection_margin: f64,
    pub input: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn for_scenario(scenario: Scenario) -> Self {
        let mut cfg = Self {
            scenario,
            n_antennas: 20,
            n_samples: 100,
            angles_deg: vec![10.0, 12.0],
            powers_db: vec![5.0, 5.0],
            noise: NoiseKind::StudentT,
            student_beta: 100.0,
            outlier_count: 1,
            outlier_value: 100.0,
            alpha: 0.2,
            spacing: 0.5,
            trials: 1,
            seed: 42,
            workers: 0,
            out_dir: PathBuf::from("out"),
            grid_start_deg: 6.0,
            grid_stop_deg: 16.0,
            grid_step_deg: 0.02,
            window_half_deg: 10.0,
            sweep_db: (0..15).map(|k| -5.0 + 2.5 * k as f64).collect(),
            methods: Method::ALL.to_vec(),
            measure_draws: 20_000,
            density_eps: 1e-3,
            l_max: 5,
            detection_margin: 0.02,
            input: None,
        };
        match scenario {
            Scenario::Spectrum => {
                cfg.n_antennas = 200;
                cfg.n_samples = 1000;
                cfg.powers_db = vec![0.0, 0.0];
                cfg.trials = 50;
                cfg.measure_draws = 1_000_000;
            }
            Scenario::Oneshot => {}
            Scenario::Mse => {
                cfg.student_beta = 10.0;
                cfg.trials = 1000;
            }
            Scenario::Estimate => {
                cfg.grid_start_deg = 0.0;
                cfg.grid_stop_deg = 180.0;
            }
        }
        cfg
    }

    /// Apply a config file (all keys optional).
    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                text: raw.to_string(),
            })?;
            self.apply_kv(key.trim(), value.trim(), line)?;
        }
        Ok(())
    }

    pub fn apply_kv(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        fn parse<T: std::str::FromStr>(
            key: &str,
            value: &str,
            line: usize,
        ) -> Result<T, ConfigError>
        where
            T::Err: std::fmt::Display,
        {
            value.parse().map_err(|e: T::Err| ConfigError::BadValue {
                line,
                key: key.to_string(),
                message: e.to_string(),
            })
        }
        fn parse_list(key: &str, value: &str, line: usize) -> Result<Vec<f64>, ConfigError> {
            value
                .split(',')
                .map(|s| parse::<f64>(key, s.trim(), line))
                .collect()
        }
        match key {
            "scenario" => {
                self.scenario = match value {
                    "spectrum" => Scenario::Spectrum,
                    "oneshot" => Scenario::Oneshot,
                    "mse" => Scenario::Mse,
                    "estimate" => Scenario::Estimate,
                    other => {
                        return Err(ConfigError::BadValue {
                            line,
                            key: key.into(),
                            message: format!("unknown scenario {other:?}"),
                        })
                    }
                }
            }
            "n_antennas" => self.n_antennas = parse(key, value, line)?,
            "n_samples" => self.n_samples = parse(key, value, line)?,
            "angles_deg" => self.angles_deg = parse_list(key, value, line)?,
            "powers_db" => self.powers_db = parse_list(key, value, line)?,
            "noise" => {
                self.noise = match value {
                    "gaussian" => NoiseKind::Gaussian,
                    "student_t" => NoiseKind::StudentT,
                    "outlier" => NoiseKind::Outlier,
                    other => {
                        return Err(ConfigError::BadValue {
                            line,
                            key: key.into(),
                            message: format!("unknown noise model {other:?}"),
                        })
                    }
                }
            }
            "student_beta" => self.student_beta = parse(key, value, line)?,
            "outlier_count" => self.outlier_count = parse(key, value, line)?,
            "outlier_value" => self.outlier_value = parse(key, value, line)?,
            "alpha" => self.alpha = parse(key, value, line)?,
            "spacing" => self.spacing = parse(key, value, line)?,
            "trials" => self.trials = parse(key, value, line)?,
            "seed" => self.seed = parse(key, value, line)?,
            "workers" => self.workers = parse(key, value, line)?,
            "out" => self.out_dir = PathBuf::from(value),
            "grid_start_deg" => self.grid_start_deg = parse(key, value, line)?,
            "grid_stop_deg" => self.grid_stop_deg = parse(key, value, line)?,
            "grid_step_deg" => self.grid_step_deg = parse(key, value, line)?,
            "window_half_deg" => self.window_half_deg = parse(key, value, line)?,
            "sweep_db" => self.sweep_db = parse_list(key, value, line)?,
            "methods" => {
                let mut methods = Vec::new();
                for name in value.split(',') {
                    let name = name.trim();
                    match Method::parse(name) {
                        Some(m) => methods.push(m),
                        None => {
                            return Err(ConfigError::BadValue {
                                line,
                                key: key.into(),
                                message: format!("unknown method {name:?}"),
                            })
                        }
                    }
                }
                self.methods = methods;
            }
            "measure_draws" => self.measure_draws = parse(key, value, line)?,
            "density_eps" => self.density_eps = parse(key, value, line)?,
            "l_max" => self.l_max = parse(key, value, line)?,
            "detection_margin" => self.detection_margin = parse(key, value, line)?,
            "input" => self.input = Some(PathBuf::from(value)),
            other => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: other.to_string(),
                })
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_antennas == 0 || self.n_samples <= self.n_antennas {
            return Err(ConfigError::Invalid(format!(
                "need n_samples > n_antennas >= 1, got N = {}, n = {}",
                self.n_antennas, self.n_samples
            )));
        }
        if self.angles_deg.len() != self.powers_db.len() {
            return Err(ConfigError::Invalid(format!(
                "{} angles vs {} powers",
                self.angles_deg.len(),
                self.powers_db.len()
            )));
        }
        if !(self.alpha > 0.0) {
            return Err(ConfigError::Invalid(format!("alpha must be positive, got {}", self.alpha)));
        }
        let c_n = self.aspect_ratio();
        if c_n * (1.0 + self.alpha) >= 1.0 {
            return Err(ConfigError::Invalid(format!(
                "aspect ratio c_n = {c_n} violates c_n (1+alpha) < 1"
            )));
        }
        if self.trials == 0 {
            return Err(ConfigError::Invalid("trials must be >= 1".into()));
        }
        if !(self.grid_step_deg > 0.0) || self.grid_stop_deg <= self.grid_start_deg {
            return Err(ConfigError::Invalid("bad angle grid".into()));
        }
        if self.scenario == Scenario::Mse && self.sweep_db.is_empty() {
            return Err(ConfigError::Invalid("mse sweep needs at least one power".into()));
        }
        if self.scenario == Scenario::Estimate && self.input.is_none() {
            return Err(ConfigError::Invalid("estimate needs an input file".into()));
        }
        if self.noise == NoiseKind::StudentT && self.student_beta <= 2.0 {
            return Err(ConfigError::Invalid(format!(
                "student_beta must exceed 2, got {}",
                self.student_beta
            )));
        }
        Ok(())
    }

    pub fn aspect_ratio(&self) -> f64 {
        self.n_antennas as f64 / self.n_samples as f64
    }

    pub fn noise_model(&self) -> NoiseModel {
        match self.noise {
            NoiseKind::Gaussian => NoiseModel::Gaussian,
            NoiseKind::StudentT => NoiseModel::StudentT {
                beta: self.student_beta,
            },
            NoiseKind::Outlier => NoiseModel::Outlier {
                count: self.outlier_count,
                value: self.outlier_value,
            },
        }
    }

    /// The limiting scale law used by the known-law estimators: `δ_1` for
    /// Gaussian noise and for finitely many outliers, the materialized
    /// Student-t law otherwise.
    pub fn known_measure(&self) -> TauMeasure {
        match self.noise {
            NoiseKind::Gaussian | NoiseKind::Outlier => TauMeasure::dirac(1.0).expect("valid"),
            NoiseKind::StudentT => {
                TauMeasure::student_t(self.student_beta, self.measure_draws, MEASURE_SEED)
                    .expect("valid student-t law")
            }
        }
    }

    pub fn weight(&self) -> Result<WeightFunction, ConfigError> {
        WeightFunction::maronna(self.alpha, self.aspect_ratio())
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Linear powers `10^(dB/10)`.
    pub fn powers_linear(&self) -> Vec<f64> {
        self.powers_db.iter().map(|db| 10f64.powf(db / 10.0)).collect()
    }

    /// Source configuration at the configured powers.
    pub fn sources(&self) -> Result<SourceConfig, ConfigError> {
        self.sources_with_powers(&self.powers_linear())
    }

    /// Source configuration with the configured angles but explicit linear
    /// powers (sorted non-increasing, angles carried along).
    pub fn sources_with_powers(&self, powers: &[f64]) -> Result<SourceConfig, ConfigError> {
        let mut pairs: Vec<(f64, f64)> = self
            .angles_deg
            .iter()
            .map(|a| a.to_radians())
            .zip(powers.iter().copied())
            .collect();
        pairs.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        let (angles, powers): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        SourceConfig::new(angles, powers, self.spacing)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Uniform angle grid in radians.
    pub fn angle_grid(&self) -> Vec<f64> {
        grid_deg(self.grid_start_deg, self.grid_stop_deg, self.grid_step_deg)
    }

    /// MSE search window: `grid_step_deg` steps over
    /// `[θ_center − window, θ_center + window]`.
    pub fn mse_grid(&self) -> Vec<f64> {
        let center = self.angles_deg.iter().sum::<f64>() / self.angles_deg.len().max(1) as f64;
        grid_deg(
            center - self.window_half_deg,
            center + self.window_half_deg,
            self.grid_step_deg,
        )
    }

    /// Canonical one-line-per-key rendering (also what gets hashed).
    pub fn canonical_lines(&self) -> Vec<String> {
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut lines = vec![
            format!("scenario = {}", self.scenario.label()),
            format!("n_antennas = {}", self.n_antennas),
            format!("n_samples = {}", self.n_samples),
            format!("angles_deg = {}", join(&self.angles_deg)),
            format!("powers_db = {}", join(&self.powers_db)),
            format!(
                "noise = {}",
                match self.noise {
                    NoiseKind::Gaussian => "gaussian",
                    NoiseKind::StudentT => "student_t",
                    NoiseKind::Outlier => "outlier",
                }
            ),
            format!("student_beta = {}", self.student_beta),
            format!("outlier_count = {}", self.outlier_count),
            format!("outlier_value = {}", self.outlier_value),
            format!("alpha = {}", self.alpha),
            format!("spacing = {}", self.spacing),
            format!("trials = {}", self.trials),
            format!("seed = {}", self.seed),
            format!("grid_start_deg = {}", self.grid_start_deg),
            format!("grid_stop_deg = {}", self.grid_stop_deg),
            format!("grid_step_deg = {}", self.grid_step_deg),
            format!("window_half_deg = {}", self.window_half_deg),
            format!("sweep_db = {}", join(&self.sweep_db)),
            format!(
                "methods = {}",
                self.methods
                    .iter()
                    .map(|m| m.label())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            format!("measure_draws = {}", self.measure_draws),
            format!("density_eps = {}", self.density_eps),
            format!("l_max = {}", self.l_max),
            format!("detection_margin = {}", self.detection_margin),
        ];
        if let Some(input) = &self.input {
            lines.push(format!("input = {}", input.display()));
        }
        lines
    }

    /// FNV-1a hash of the canonical rendering (workers and output paths are
    /// excluded: they must not change results).
    pub fn config_hash(&self) -> String {
        let mut h = 0xcbf29ce484222325u64;
        for line in self.canonical_lines() {
            for b in line.bytes().chain([b'\n']) {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
        format!("{h:016x}")
    }
}

pub fn grid_deg(start_deg: f64, stop_deg: f64, step_deg: f64) -> Vec<f64> {
    let n = ((stop_deg - start_deg) / step_deg).round() as usize + 1;
    (0..n)
        .map(|k| (start_deg + step_deg * k as f64).to_radians())
        .collect()
}
