use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bandit::OptimismMode;
use crate::envs::{
    CsvRegression, CsvRegressionSpec, Environment, PiecewiseRegression, PiecewiseRegressionSpec, QuadraticInstance,
    StationaryQuadratic,
};
use crate::error::{Error, Result};
use crate::learners::GradientPoint;
use crate::metrics::{ComparatorKind, Summation};

/// One experiment, read from a TOML file.
///
/// ```toml
/// horizon = 50000
/// seeds = [1, 2, 3, 4, 5]
/// algorithms = ["ogd", "ader", "sword", "swordpp"]
/// comparator = "true_model"
///
/// [environment]
/// kind = "piecewise"
/// dim = 5
/// stage_length = 1000
///
/// [overrides.swordpp]
/// lambda = 2.0
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub horizon: usize,
    pub seeds: Vec<u64>,
    pub algorithms: Vec<String>,
    /// `minimizers`, `fixed_best`, `true_model` or `user`.
    #[serde(default = "default_comparator")]
    pub comparator: String,
    /// CSV of comparator points (one row per round, no header) for `user`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparator_file: Option<PathBuf>,
    /// `sequential` or `kahan`.
    #[serde(default = "default_summation")]
    pub summation: String,
    /// Grid size for `V_T` and `V^f_T` when no exact evaluator applies; 0 skips them.
    #[serde(default = "default_variation_samples")]
    pub variation_samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    pub environment: EnvironmentConfig,
    #[serde(default)]
    pub overrides: Overrides,
}

fn default_comparator() -> String {
    "minimizers".into()
}

fn default_summation() -> String {
    "sequential".into()
}

fn default_variation_samples() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvironmentConfig {
    Piecewise(PiecewiseConfig),
    Instance1(EmptyConfig),
    Instance2(EmptyConfig),
    StationaryQuadratic(StationaryConfig),
    Csv(CsvConfig),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmptyConfig {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PiecewiseConfig {
    pub dim: usize,
    pub stage_length: usize,
    pub feature_radius: f64,
    pub diameter: f64,
    pub noise_max: f64,
}

impl Default for PiecewiseConfig {
    fn default() -> Self {
        let s = PiecewiseRegressionSpec::default();
        Self {
            dim: s.dim,
            stage_length: s.stage_length,
            feature_radius: s.feature_radius,
            diameter: s.diameter,
            noise_max: s.noise_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationaryConfig {
    pub center: Vec<f64>,
    #[serde(default = "one")]
    pub radius: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvConfig {
    pub path: PathBuf,
    pub features: Vec<String>,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature_radius: Option<f64>,
    #[serde(default = "two")]
    pub diameter: f64,
}

fn two() -> f64 {
    2.0
}

/// Per-algorithm parameter overrides; each table only accepts the fields its
/// algorithm understands.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ogd: Option<StepOverride>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oegd: Option<StepOverride>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ader: Option<EnsembleOverride>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sword: Option<SwordOverride>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub swordpp: Option<SwordPlusPlusOverride>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sword_bandit: Option<BanditOverride>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepOverride {
    pub eta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleOverride {
    /// Explicit step-size pool.
    pub etas: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwordOverride {
    pub etas: Option<Vec<f64>>,
    pub rate_cap: Option<f64>,
    pub fixed_rate: Option<f64>,
    /// `decision` (default) or `auxiliary`.
    pub gradient_point: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwordPlusPlusOverride {
    pub etas: Option<Vec<f64>>,
    pub lambda: Option<f64>,
    pub rate_cap: Option<f64>,
    pub fixed_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BanditOverride {
    pub etas: Option<Vec<f64>>,
    pub delta: Option<f64>,
    pub lambda: Option<f64>,
    pub rate_cap: Option<f64>,
    pub fixed_rate: Option<f64>,
}

/// A configured algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Ogd,
    Oegd,
    Ader,
    Sword,
    SwordPlusPlus,
    SwordBandit(OptimismMode),
}

impl Algorithm {
    /// Name used in file names and the `algorithm` column.
    pub fn label(&self) -> String {
        match self {
            Algorithm::Ogd => "ogd".into(),
            Algorithm::Oegd => "oegd".into(),
            Algorithm::Ader => "ader".into(),
            Algorithm::Sword => "sword".into(),
            Algorithm::SwordPlusPlus => "swordpp".into(),
            Algorithm::SwordBandit(m) => format!("sword_bandit_{}", m.as_str()),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    /// Accepts `sword_bandit` (variation optimism), `sword_bandit:<mode>` and
    /// `sword_bandit_<mode>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Ok(match s {
            "ogd" => Algorithm::Ogd,
            "oegd" => Algorithm::Oegd,
            "ader" => Algorithm::Ader,
            "sword" => Algorithm::Sword,
            "swordpp" | "sword++" => Algorithm::SwordPlusPlus,
            "sword_bandit" => Algorithm::SwordBandit(OptimismMode::Variation),
            _ => match s.strip_prefix("sword_bandit:").or_else(|| s.strip_prefix("sword_bandit_")) {
                Some(mode) => Algorithm::SwordBandit(mode.parse()?),
                None => return Err(Error::Config(format!("unknown algorithm `{s}`"))),
            },
        })
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Input { path: path.to_path_buf(), message: e.to_string() })?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(message) => Error::Input { path: path.to_path_buf(), message },
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::Config("field `horizon`: must be >= 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("field `seeds`: must list at least one seed".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(s) = self.seeds.iter().find(|s| !seen.insert(**s)) {
            return Err(Error::Config(format!("field `seeds`: seed {s} listed twice")));
        }
        let algorithms = self.parsed_algorithms()?;
        let mut labels = std::collections::HashSet::new();
        for a in &algorithms {
            if !labels.insert(a.label()) {
                return Err(Error::Config(format!("field `algorithms`: `{a}` listed twice")));
            }
        }
        let has = |f: &dyn Fn(&Algorithm) -> bool| algorithms.iter().any(f);
        let o = &self.overrides;
        let unused = [
            ("ogd", o.ogd.is_some() && !has(&|a| *a == Algorithm::Ogd)),
            ("oegd", o.oegd.is_some() && !has(&|a| *a == Algorithm::Oegd)),
            ("ader", o.ader.is_some() && !has(&|a| *a == Algorithm::Ader)),
            ("sword", o.sword.is_some() && !has(&|a| *a == Algorithm::Sword)),
            ("swordpp", o.swordpp.is_some() && !has(&|a| *a == Algorithm::SwordPlusPlus)),
            ("sword_bandit", o.sword_bandit.is_some() && !has(&|a| matches!(a, Algorithm::SwordBandit(_)))),
        ];
        if let Some((name, _)) = unused.iter().find(|(_, bad)| *bad) {
            return Err(Error::Config(format!("table `overrides.{name}`: algorithm `{name}` is not configured")));
        }
        if let Some(s) = &o.sword {
            if let Some(p) = &s.gradient_point {
                parse_gradient_point(p)?;
            }
        }
        self.comparator_kind()?;
        if self.comparator_kind()? == ComparatorKind::UserSupplied && self.comparator_file.is_none() {
            return Err(Error::Config("field `comparator_file`: required when comparator = \"user\"".into()));
        }
        self.summation_mode()?;
        match &self.environment {
            EnvironmentConfig::Instance1(_) if self.horizon.is_multiple_of(2) => {
                Err(Error::Config(format!("field `horizon`: instance1 needs an odd horizon, got {}", self.horizon)))
            }
            EnvironmentConfig::Instance2(_) if self.horizon % 2 == 1 => {
                Err(Error::Config(format!("field `horizon`: instance2 needs an even horizon, got {}", self.horizon)))
            }
            _ => Ok(()),
        }
    }

    pub fn parsed_algorithms(&self) -> Result<Vec<Algorithm>> {
        if self.algorithms.is_empty() {
            return Err(Error::Config("field `algorithms`: must list at least one algorithm".into()));
        }
        self.algorithms
            .iter()
            .map(|a| a.parse().map_err(|e: Error| Error::Config(format!("field `algorithms`: {e}"))))
            .collect()
    }

    pub fn comparator_kind(&self) -> Result<ComparatorKind> {
        match self.comparator.as_str() {
            "minimizers" => Ok(ComparatorKind::Minimizers),
            "fixed_best" => Ok(ComparatorKind::FixedBest),
            "true_model" => Ok(ComparatorKind::TrueModel),
            "user" => Ok(ComparatorKind::UserSupplied),
            other => Err(Error::Config(format!("field `comparator`: unknown comparator `{other}`"))),
        }
    }

    pub fn summation_mode(&self) -> Result<Summation> {
        match self.summation.as_str() {
            "sequential" => Ok(Summation::Sequential),
            "kahan" => Ok(Summation::Kahan),
            other => Err(Error::Config(format!("field `summation`: unknown mode `{other}`"))),
        }
    }

    /// SHA-256 of the canonical TOML re-serialisation, ignoring the output
    /// directory and worker count, which do not affect results.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.out_dir = None;
        canonical.jobs = None;
        let text = toml::to_string(&canonical).expect("config serialises");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// The environment stream for one seed.
    pub fn build_environment(&self, seed: u64) -> Result<Box<dyn Environment>> {
        let t = self.horizon;
        Ok(match &self.environment {
            EnvironmentConfig::Piecewise(p) => Box::new(PiecewiseRegression::new(
                PiecewiseRegressionSpec {
                    dim: p.dim,
                    horizon: t,
                    stage_length: p.stage_length,
                    feature_radius: p.feature_radius,
                    diameter: p.diameter,
                    noise_max: p.noise_max,
                },
                seed,
            )?),
            EnvironmentConfig::Instance1(_) => Box::new(QuadraticInstance::instance1(t)?),
            EnvironmentConfig::Instance2(_) => Box::new(QuadraticInstance::instance2(t)?),
            EnvironmentConfig::StationaryQuadratic(s) => {
                Box::new(StationaryQuadratic::new(s.center.clone(), s.radius, t)?)
            }
            EnvironmentConfig::Csv(c) => Box::new(CsvRegression::load(CsvRegressionSpec {
                path: c.path.clone(),
                feature_columns: c.features.clone(),
                label_column: c.label.clone(),
                feature_radius: c.feature_radius,
                diameter: c.diameter,
                horizon: Some(t),
            })?),
        })
    }

    /// Whether the environment stream depends on the seed.
    pub fn seeded_environment(&self) -> bool {
        matches!(self.environment, EnvironmentConfig::Piecewise(_))
    }
}

pub(crate) fn parse_gradient_point(s: &str) -> Result<GradientPoint> {
    match s {
        "decision" => Ok(GradientPoint::Decision),
        "auxiliary" => Ok(GradientPoint::AuxiliaryIterate),
        other => Err(Error::Config(format!(
            "field `overrides.sword.gradient_point`: expected `decision` or `auxiliary`, got `{other}`"
        ))),
    }
}
