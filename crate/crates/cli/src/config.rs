//! Run configuration: flat `key = value` text with `[section]` headers.
//! Unset keys fall back to the problem's recommended setup; the full key
//! list lives in `docs/config.md`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use svsnn_core::problems::{PdeProblem, ProblemError};
use svsnn_core::sampling::{DomainGeometry, Hole, Outer};
use svsnn_core::training::TrainConfig;

#[derive(Debug)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.field) {
            (Some(l), Some(k)) => write!(f, "config line {l}, key `{k}`: {}", self.message),
            (Some(l), None) => write!(f, "config line {l}: {}", self.message),
            (None, Some(k)) => write!(f, "config key `{k}`: {}", self.message),
            (None, None) => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Resolution failures keep problem-registry errors distinct so the CLI can
/// exit with the documented code for unknown ids.
#[derive(Debug)]
pub enum ResolveError {
    Config(ConfigError),
    Problem(ProblemError),
}

impl fmt::Display for ResolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResolveError::Config(e) => write!(f, "{e}"),
            ResolveError::Problem(e) => write!(f, "{e}"),
        }
    }
}

impl From<ConfigError> for ResolveError {
    fn from(e: ConfigError) -> Self {
        ResolveError::Config(e)
    }
}

fn err(message: impl Into<String>) -> ConfigError {
    ConfigError {
        line: None,
        field: None,
        message: message.into(),
    }
}

/// Parsed `[section] key = value` file, keys stored as `section.key`.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    pub values: BTreeMap<String, (usize, String)>,
    /// Repeatable keys (geometry holes).
    pub repeated: Vec<(String, usize, String)>,
    /// Canonical text, hashed into checkpoints.
    pub text: String,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<RawConfig, ConfigError> {
        let mut section = String::new();
        let mut values = BTreeMap::new();
        let mut repeated = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError {
                    line: Some(lineno + 1),
                    field: None,
                    message: "expected `key = value` or `[section]`".into(),
                });
            };
            let full = if section.is_empty() {
                key.trim().to_string()
            } else {
                format!("{section}.{}", key.trim())
            };
            let value = value.trim().to_string();
            if full.starts_with("geometry.hole_") {
                repeated.push((full, lineno + 1, value));
            } else {
                values.insert(full, (lineno + 1, value));
            }
        }
        Ok(RawConfig {
            values,
            repeated,
            text: text.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<RawConfig, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| err(format!("cannot read {}: {e}", path.display())))?;
        RawConfig::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(_, v)| v.as_str())
    }

    fn parse_as<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.values.get(key) {
            None => Ok(None),
            Some((line, v)) => v.parse::<T>().map(Some).map_err(|_| ConfigError {
                line: Some(*line),
                field: Some(key.to_string()),
                message: format!("cannot parse `{v}`"),
            }),
        }
    }

    fn parse_list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        match self.values.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map(Some)
                .map_err(|_| ConfigError {
                    line: Some(*line),
                    field: Some(key.to_string()),
                    message: format!("cannot parse `{v}` as a comma list"),
                }),
        }
    }
}

/// Model family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    SvSnn,
    Baseline,
}

/// Fully resolved run setup.
pub struct RunConfig {
    pub model: ModelKind,
    pub modes: usize,
    pub features: usize,
    pub amp_scale: f64,
    pub widths: Vec<usize>,
    pub w_char: Vec<f64>,
    pub sigma: f64,
    pub w_min: f64,
    pub w_max: Option<f64>,
    pub train: TrainConfig,
    /// Canonical config text (hashed into checkpoints).
    pub text: String,
}

impl RunConfig {
    /// Resolve a raw config against the named problem's recommendations.
    pub fn resolve(raw: &RawConfig) -> Result<(RunConfig, PdeProblem<f64>), ResolveError> {
        let problem_id = raw
            .get("run.problem")
            .ok_or_else(|| err("missing required key run.problem"))?
            .to_string();
        let mut problem =
            svsnn_core::problems::make_problem::<f64>(&problem_id).map_err(ResolveError::Problem)?;
        let rec = problem.recommended.clone();

        let model = match raw.get("run.model").unwrap_or("svsnn") {
            "svsnn" => ModelKind::SvSnn,
            "baseline" => ModelKind::Baseline,
            other => {
                return Err(err(format!("run.model must be svsnn or baseline, got `{other}`")).into())
            }
        };

        let widths = match raw.parse_list("model.widths")? {
            Some(list) => list.into_iter().map(|v| v as usize).collect(),
            None => rec.baseline_widths.clone(),
        };

        let train = TrainConfig {
            epochs: raw.parse_as("train.epochs")?.unwrap_or(rec.epochs),
            learning_rate: raw.parse_as("train.lr")?.unwrap_or(rec.lr),
            decay_factor: raw.parse_as("train.decay_factor")?.unwrap_or(0.99),
            decay_every: raw.parse_as("train.decay_every")?.unwrap_or(500),
            lambda_ic: raw.parse_as("train.lambda_ic")?.unwrap_or(1.0),
            lambda_pde: raw.parse_as("train.lambda_pde")?.unwrap_or(1.0),
            lambda_bc: raw.parse_as("train.lambda_bc")?.unwrap_or(1.0),
            n_ic: raw.parse_as("train.n_ic")?.unwrap_or(rec.n_ic),
            n_bc: raw.parse_as("train.n_bc")?.unwrap_or(rec.n_bc),
            n_pde: raw.parse_as("train.n_pde")?.unwrap_or(rec.n_pde),
            seed: raw.parse_as("run.seed")?.unwrap_or(0),
            eval_stride: raw.parse_as("train.eval_stride")?.unwrap_or(100),
            eval_metrics: raw
                .parse_as::<u8>("train.eval_metrics")?
                .map(|v| v != 0)
                .unwrap_or(true),
        };

        let w_char = match raw.parse_list("frequencies.w_char")? {
            Some(list) if list.len() == 1 => vec![list[0]; problem.dim],
            Some(list) if list.len() == problem.dim => list,
            Some(_) => {
                return Err(err(format!(
                    "frequencies.w_char needs 1 or {} values",
                    problem.dim
                ))
                .into())
            }
            None => problem.w_char.clone(),
        };

        if let Some(geometry) = parse_geometry(raw)? {
            problem.geometry = Some(geometry.clone());
        }

        let cfg = RunConfig {
            model,
            modes: raw.parse_as("model.modes")?.unwrap_or(rec.modes),
            features: raw.parse_as("model.features")?.unwrap_or(rec.features),
            amp_scale: raw.parse_as("model.amp_scale")?.unwrap_or(rec.amp_scale),
            widths,
            sigma: raw.parse_as("frequencies.sigma")?.unwrap_or(rec.sigma),
            w_min: raw.parse_as("frequencies.w_min")?.unwrap_or(1.0),
            w_max: raw.parse_as("frequencies.w_max")?,
            w_char,
            train,
            text: raw.text.clone(),
        };
        Ok((cfg, problem))
    }
}

fn parse_geometry(raw: &RawConfig) -> Result<Option<DomainGeometry>, ConfigError> {
    let outer = match raw.get("geometry.outer") {
        None => return Ok(None),
        Some("rectangle") => {
            let lo = raw
                .parse_list("geometry.lo")?
                .ok_or_else(|| err("geometry.lo required for rectangle"))?;
            let hi = raw
                .parse_list("geometry.hi")?
                .ok_or_else(|| err("geometry.hi required for rectangle"))?;
            if lo.len() != 2 || hi.len() != 2 {
                return Err(err("geometry.lo / geometry.hi need 2 values"));
            }
            Outer::Rectangle {
                lo: [lo[0], lo[1]],
                hi: [hi[0], hi[1]],
            }
        }
        Some("circle") => {
            let c = raw
                .parse_list("geometry.center")?
                .ok_or_else(|| err("geometry.center required for circle"))?;
            let r: f64 = raw
                .parse_as("geometry.radius")?
                .ok_or_else(|| err("geometry.radius required for circle"))?;
            Outer::Circle {
                center: [c[0], c[1]],
                radius: r,
            }
        }
        Some(other) => return Err(err(format!("geometry.outer must be rectangle or circle, got `{other}`"))),
    };
    let mut holes = Vec::new();
    for (key, line, value) in &raw.repeated {
        let nums: Vec<f64> = value
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| ConfigError {
                line: Some(*line),
                field: Some(key.clone()),
                message: format!("cannot parse `{value}`"),
            })?;
        match key.as_str() {
            "geometry.hole_circle" if nums.len() == 3 => holes.push(Hole::Circle {
                center: [nums[0], nums[1]],
                radius: nums[2],
            }),
            "geometry.hole_ellipse" if nums.len() == 4 => holes.push(Hole::Ellipse {
                center: [nums[0], nums[1]],
                coef: [nums[2], nums[3]],
            }),
            _ => {
                return Err(ConfigError {
                    line: Some(*line),
                    field: Some(key.clone()),
                    message: "hole_circle needs cx,cy,r; hole_ellipse needs cx,cy,ax,ay".into(),
                })
            }
        }
    }
    Ok(Some(DomainGeometry { outer, holes }))
}
