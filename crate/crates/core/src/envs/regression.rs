use std::path::PathBuf;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::FeasibleDomain;
use crate::error::{Error, Result};
use crate::oracle::{OracleConstants, SharedObjective, SquaredResidual};
use crate::vector::{dot, norm, DecisionVector};

use super::{uniform_ball, Environment};

/// Piecewise-stationary linear regression stream.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseRegressionSpec {
    pub dim: usize,
    pub horizon: usize,
    /// Rounds per stage; the model is redrawn every `stage_length` rounds.
    pub stage_length: usize,
    /// `Γ`, the feature radius.
    pub feature_radius: f64,
    /// `D`; models and decisions live in the ball of radius `D/2`.
    pub diameter: f64,
    /// Noise is uniform on `[0, noise_max]`.
    pub noise_max: f64,
}

impl Default for PiecewiseRegressionSpec {
    fn default() -> Self {
        Self { dim: 5, horizon: 50_000, stage_length: 1000, feature_radius: 1.0, diameter: 2.0, noise_max: 0.1 }
    }
}

/// `f_t(w) = ½(y_t − ⟨x_t, w⟩)²` with `y_t = ⟨x_t, w*_t⟩ + ε_t`, features
/// uniform in the `Γ`-ball, models uniform in the `D/2`-ball and redrawn per
/// stage, and noise uniform on `[0, noise_max]`.
///
/// Declared constants: `L = Γ²` and `G = Γ(ΓD + noise_max)`, since the
/// residual at any feasible `w` is at most `ΓD/2 + ΓD/2 + noise_max`.
#[derive(Debug, Clone)]
pub struct PiecewiseRegression {
    spec: PiecewiseRegressionSpec,
    seed: u64,
    domain: FeasibleDomain,
    constants: OracleConstants,
    functions: Vec<SharedObjective>,
    models: Vec<DecisionVector>,
    targets: Vec<f64>,
}

impl PiecewiseRegression {
    pub fn new(spec: PiecewiseRegressionSpec, seed: u64) -> Result<Self> {
        let PiecewiseRegressionSpec { dim, horizon, stage_length, feature_radius, diameter, noise_max } = spec;
        if dim == 0 || horizon == 0 || stage_length == 0 {
            return Err(Error::InvalidParameter("dim, horizon and stage_length must be >= 1".into()));
        }
        for (name, v) in [("feature_radius", feature_radius), ("diameter", diameter)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(noise_max.is_finite() && noise_max >= 0.0) {
            return Err(Error::InvalidParameter(format!("noise_max must be >= 0, got {noise_max}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut functions = Vec::with_capacity(horizon);
        let mut models = Vec::with_capacity(horizon);
        let mut targets = Vec::with_capacity(horizon);
        let mut model = Vec::new();
        for t in 0..horizon {
            if t % stage_length == 0 {
                model = uniform_ball(&mut rng, dim, diameter / 2.0);
            }
            let x = uniform_ball(&mut rng, dim, feature_radius);
            let noise = noise_max * rng.gen::<f64>();
            let y = dot(&x, &model) + noise;
            targets.push(y);
            functions.push(Arc::new(SquaredResidual::new(x, y)?) as SharedObjective);
            models.push(DecisionVector::from_raw(model.clone()));
        }
        let constants = OracleConstants {
            gradient_bound: feature_radius * (feature_radius * diameter + noise_max),
            smoothness: feature_radius * feature_radius,
            nonnegative: true,
        };
        Ok(Self {
            domain: FeasibleDomain::centered_ball(dim, diameter / 2.0)?,
            spec,
            seed,
            constants,
            functions,
            models,
            targets,
        })
    }

    pub fn spec(&self) -> &PiecewiseRegressionSpec {
        &self.spec
    }

    /// `y_1, …, y_T`.
    pub fn targets(&self) -> &[f64] {
        &self.targets
    }
}

impl Environment for PiecewiseRegression {
    fn name(&self) -> &str {
        "piecewise"
    }

    fn domain(&self) -> &FeasibleDomain {
        &self.domain
    }

    fn constants(&self) -> OracleConstants {
        self.constants
    }

    fn functions(&self) -> &[SharedObjective] {
        &self.functions
    }

    fn true_model(&self) -> Option<&[DecisionVector]> {
        Some(&self.models)
    }

    fn metadata(&self) -> Vec<(String, String)> {
        vec![
            ("seed".into(), self.seed.to_string()),
            ("feature_distribution".into(), "uniform_ball".into()),
            ("model_distribution".into(), "uniform_ball".into()),
            ("noise_distribution".into(), format!("uniform[0,{}]", self.spec.noise_max)),
        ]
    }
}

/// Regression rows streamed from a headed CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRegressionSpec {
    pub path: PathBuf,
    pub feature_columns: Vec<String>,
    pub label_column: String,
    /// Rescales all features by one global factor so the largest norm is `Γ`.
    pub feature_radius: Option<f64>,
    /// `D`; decisions live in the centred ball of radius `D/2`.
    pub diameter: f64,
    /// Uses only the first rows when set.
    pub horizon: Option<usize>,
}

/// Square-loss stream over the rows of a CSV file, in file order.
///
/// Declared constants: `L = max_t ‖x_t‖²` and `G = √L(√L·D/2 + max_t |y_t|)`.
#[derive(Debug, Clone)]
pub struct CsvRegression {
    spec: CsvRegressionSpec,
    scale: f64,
    domain: FeasibleDomain,
    constants: OracleConstants,
    functions: Vec<SharedObjective>,
}

impl CsvRegression {
    pub fn load(spec: CsvRegressionSpec) -> Result<Self> {
        let input_err = |message: String| Error::Input { path: spec.path.clone(), message };
        if spec.feature_columns.is_empty() {
            return Err(input_err("no feature columns configured".into()));
        }
        if !(spec.diameter.is_finite() && spec.diameter > 0.0) {
            return Err(Error::InvalidParameter(format!("diameter must be positive, got {}", spec.diameter)));
        }
        let mut reader = csv::Reader::from_path(&spec.path).map_err(|e| input_err(e.to_string()))?;
        let headers = reader.headers().map_err(|e| input_err(e.to_string()))?.clone();
        let column = |name: &str| {
            headers.iter().position(|h| h.trim() == name).ok_or_else(|| input_err(format!("missing column `{name}`")))
        };
        let feature_idx = spec.feature_columns.iter().map(|c| column(c)).collect::<Result<Vec<_>>>()?;
        let label_idx = column(&spec.label_column)?;

        let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
        for (i, record) in reader.records().enumerate() {
            if spec.horizon.is_some_and(|h| rows.len() >= h) {
                break;
            }
            let line = i + 2;
            let record = record.map_err(|e| input_err(format!("row {line}: {e}")))?;
            let field = |idx: usize, name: &str| -> Result<f64> {
                let raw = record.get(idx).ok_or_else(|| input_err(format!("row {line}: missing column `{name}`")))?;
                raw.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| input_err(format!("row {line}, column `{name}`: invalid number `{raw}`")))
            };
            let x = feature_idx
                .iter()
                .zip(&spec.feature_columns)
                .map(|(idx, name)| field(*idx, name))
                .collect::<Result<Vec<_>>>()?;
            rows.push((x, field(label_idx, &spec.label_column)?));
        }
        if rows.is_empty() {
            return Err(input_err("no data rows".into()));
        }
        if let Some(h) = spec.horizon {
            if rows.len() < h {
                return Err(input_err(format!("horizon {h} exceeds the {} data rows", rows.len())));
            }
        }

        let max_norm = rows.iter().map(|(x, _)| norm(x)).fold(0.0, f64::max);
        let scale = match spec.feature_radius {
            Some(gamma) if max_norm > 0.0 => gamma / max_norm,
            _ => 1.0,
        };
        let mut functions = Vec::with_capacity(rows.len());
        let mut max_label = 0.0f64;
        for (mut x, y) in rows {
            x.iter_mut().for_each(|v| *v *= scale);
            max_label = max_label.max(y.abs());
            functions.push(Arc::new(SquaredResidual::new(x, y)?) as SharedObjective);
        }
        let radius = scale * max_norm;
        let constants = OracleConstants {
            gradient_bound: radius * (radius * spec.diameter / 2.0 + max_label),
            smoothness: radius * radius,
            nonnegative: true,
        };
        Ok(Self {
            domain: FeasibleDomain::centered_ball(feature_idx.len(), spec.diameter / 2.0)?,
            spec,
            scale,
            constants,
            functions,
        })
    }

    /// Global factor applied to every feature vector.
    pub fn feature_scale(&self) -> f64 {
        self.scale
    }
}

impl Environment for CsvRegression {
    fn name(&self) -> &str {
        "csv"
    }

    fn domain(&self) -> &FeasibleDomain {
        &self.domain
    }

    fn constants(&self) -> OracleConstants {
        self.constants
    }

    fn functions(&self) -> &[SharedObjective] {
        &self.functions
    }

    fn metadata(&self) -> Vec<(String, String)> {
        vec![
            ("path".into(), self.spec.path.display().to_string()),
            ("feature_scale".into(), self.scale.to_string()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::path_length;
    use std::io::Write;

    fn small(horizon: usize, stage: usize) -> PiecewiseRegressionSpec {
        PiecewiseRegressionSpec { horizon, stage_length: stage, ..PiecewiseRegressionSpec::default() }
    }

    #[test]
    fn same_seed_same_stream() {
        let a = PiecewiseRegression::new(small(300, 100), 4).unwrap();
        let b = PiecewiseRegression::new(small(300, 100), 4).unwrap();
        let c = PiecewiseRegression::new(small(300, 100), 5).unwrap();
        assert_eq!(a.targets(), b.targets());
        assert_ne!(a.targets(), c.targets());
    }

    #[test]
    fn true_model_changes_once_per_stage() {
        let env = PiecewiseRegression::new(small(3000, 1000), 1).unwrap();
        let m = env.true_model().unwrap();
        let changes = m.windows(2).filter(|w| w[0] != w[1]).count();
        assert_eq!(changes, 2);
        assert!(path_length(m).unwrap() <= 2.0 * env.spec().diameter);
        let single = PiecewiseRegression::new(small(500, 1000), 1).unwrap();
        assert_eq!(path_length(single.true_model().unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn csv_rows_are_normalised() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "a,b,y\n3,4,1\n0.6,0.8,-2\n").unwrap();
        let spec = CsvRegressionSpec {
            path: file.path().to_path_buf(),
            feature_columns: vec!["a".into(), "b".into()],
            label_column: "y".into(),
            feature_radius: Some(1.0),
            diameter: 2.0,
            horizon: None,
        };
        let env = CsvRegression::load(spec).unwrap();
        assert_eq!(env.horizon(), 2);
        assert!((env.feature_scale() - 0.2).abs() < 1e-15);
        assert!((env.constants().smoothness - 1.0).abs() < 1e-12);
        assert!((env.constants().gradient_bound - 3.0).abs() < 1e-12);
    }

    #[test]
    fn csv_errors_carry_row_and_column() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "a,y\n1,2\nx,3").unwrap();
        let spec = CsvRegressionSpec {
            path: file.path().to_path_buf(),
            feature_columns: vec!["a".into()],
            label_column: "y".into(),
            feature_radius: None,
            diameter: 2.0,
            horizon: None,
        };
        let err = CsvRegression::load(spec).unwrap_err().to_string();
        assert!(err.contains("row 3") && err.contains("`a`"), "{err}");
    }
}
