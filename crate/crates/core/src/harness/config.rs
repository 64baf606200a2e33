use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{AnalyticFamily, SpaceTag};
use crate::priors::{ExchangeableModel, TestFn, STICK_POSTERIOR_MAX_N};
use crate::transport::Ground;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    BoundFinite,
    BoundReal,
    BoundMean,
    EstimatorSweep,
    MedianLaw,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::BoundFinite => "bound_finite",
            Self::BoundReal => "bound_real",
            Self::BoundMean => "bound_mean",
            Self::EstimatorSweep => "estimator_sweep",
            Self::MedianLaw => "median_law",
        }
    }
}

/// Named test function: `identity`, `square`, `indicator(y)` or
/// `constant(c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FSpec {
    Identity,
    Square,
    Indicator(f64),
    Constant(f64),
}

impl FSpec {
    pub fn test_fn(self) -> TestFn {
        match self {
            Self::Identity => TestFn::Identity,
            Self::Square => TestFn::Square,
            Self::Indicator(y) => TestFn::Indicator { y },
            Self::Constant(value) => TestFn::Constant { value },
        }
    }
}

impl fmt::Display for FSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => write!(f, "identity"),
            Self::Square => write!(f, "square"),
            Self::Indicator(y) => write!(f, "indicator({y})"),
            Self::Constant(c) => write!(f, "constant({c})"),
        }
    }
}

impl From<FSpec> for String {
    fn from(f: FSpec) -> String {
        f.to_string()
    }
}

impl TryFrom<String> for FSpec {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        let t = s.trim();
        let arg = |prefix: &str| -> Option<std::result::Result<f64, String>> {
            let inner = t.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
            Some(
                inner
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| format!("bad argument in {t:?}: {e}")),
            )
        };
        match t {
            "identity" => Ok(Self::Identity),
            "square" => Ok(Self::Square),
            _ => {
                if let Some(y) = arg("indicator") {
                    return y.map(Self::Indicator);
                }
                if let Some(c) = arg("constant") {
                    return c.map(Self::Constant);
                }
                Err(format!("unknown test function {t:?}"))
            }
        }
    }
}

fn default_m() -> usize {
    2000
}

fn default_replicates() -> usize {
    1
}

fn default_bootstrap() -> usize {
    200
}

fn default_mc_draws() -> usize {
    2000
}

fn default_f_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

/// One experiment, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ExchangeableModel>,
    /// Median experiment only: i.i.d. sampling from a known law instead of
    /// an exchangeable model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_p: Option<AnalyticFamily>,
    #[serde(default)]
    pub n: usize,
    #[serde(rename = "N_grid")]
    pub n_grid: Vec<usize>,
    #[serde(default = "default_m")]
    pub m_samples: usize,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground: Option<Ground>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_spec: Option<FSpec>,
    /// Bootstrap resamples behind the Monte Carlo slack.
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
    /// Posterior draws for predictive quantities without a closed form.
    #[serde(default = "default_mc_draws")]
    pub mc_draws: usize,
    /// Median experiment: levels `F(x)` at which the law is checked.
    #[serde(default = "default_f_grid")]
    pub f_grid: Vec<f64>,
    /// Bound experiments: add a row with the plug-in estimate from `2m`
    /// samples per side, to show whether the estimate has stabilized.
    #[serde(default)]
    pub stabilization: bool,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn model(&self) -> Result<&ExchangeableModel> {
        self.model
            .as_ref()
            .ok_or_else(|| config_err(format!("{} needs a model", self.experiment.name())))
    }

    /// Ground metric, defaulting to TV on finite alphabets and BL on the line.
    pub fn ground(&self) -> Result<Ground> {
        let space = self.model()?.space();
        let g = match self.ground {
            Some(g) => g,
            None if matches!(space, SpaceTag::FiniteAlphabet { .. }) => Ground::Tv,
            None => Ground::Bl,
        };
        if !g.accepts(space) {
            return Err(config_err(format!(
                "{g:?} ground metric does not fit a model on {space}"
            )));
        }
        Ok(g)
    }

    /// Rejects every incompatibility before any sampling happens.
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(config_err("N_grid is empty"));
        }
        if self.replicates < 1 {
            return Err(config_err("replicates must be at least 1"));
        }
        if self.m_samples < 2 {
            return Err(config_err("m_samples must be at least 2"));
        }
        if self.bootstrap < 2 {
            return Err(config_err("bootstrap must be at least 2"));
        }
        if self.replicates > u32::MAX as usize || self.n_grid.len() >= u32::MAX as usize {
            return Err(config_err("too many cells for the seed derivation"));
        }
        let kind = self.experiment;
        let min_n = |lo: usize| self.n_grid.iter().all(|&big_n| big_n >= lo);
        let ok_grid = match kind {
            ExperimentKind::EstimatorSweep => min_n(self.n.max(2)),
            // N sets the 2N + 1 draws behind the median, not a horizon
            ExperimentKind::MedianLaw => true,
            _ => self.n_grid.iter().all(|&big_n| big_n > self.n),
        };
        if !ok_grid {
            return Err(config_err(format!(
                "N_grid {:?} is incompatible with n = {}",
                self.n_grid, self.n
            )));
        }
        if kind == ExperimentKind::MedianLaw {
            return self.validate_median();
        }
        if self.fixed_p.is_some() {
            return Err(config_err("fixed_p is only used by median_law"));
        }
        if self.stabilization && !matches!(kind, ExperimentKind::BoundFinite | ExperimentKind::BoundReal) {
            return Err(config_err("stabilization applies to bound_finite and bound_real"));
        }
        let model = self.model()?;
        model.validate().map_err(|e| config_err(e.to_string()))?;
        let space = model.space();
        if let ExchangeableModel::StickBreaking(_) = model {
            if self.n > STICK_POSTERIOR_MAX_N && kind != ExperimentKind::EstimatorSweep {
                return Err(config_err(format!(
                    "stick-breaking posterior draws need n <= {STICK_POSTERIOR_MAX_N}"
                )));
            }
        }
        match kind {
            ExperimentKind::BoundFinite => {
                if !matches!(space, SpaceTag::FiniteAlphabet { .. }) {
                    return Err(config_err("bound_finite needs a finite-alphabet model"));
                }
                if self.ground()? != Ground::Tv {
                    return Err(config_err("bound_finite uses the TV ground metric"));
                }
            }
            ExperimentKind::BoundReal => {
                if space != SpaceTag::RealLine {
                    return Err(config_err("bound_real needs a model on the real line"));
                }
                if self.ground()? != Ground::Bl {
                    return Err(config_err("bound_real uses the BL ground metric"));
                }
            }
            ExperimentKind::BoundMean => {
                if self.f_spec.is_none() {
                    return Err(config_err("bound_mean needs f_spec"));
                }
                if space != SpaceTag::RealLine {
                    return Err(config_err("bound_mean needs a scalar model"));
                }
            }
            ExperimentKind::EstimatorSweep => {
                if space != SpaceTag::RealLine {
                    return Err(config_err("estimator_sweep needs a scalar model"));
                }
                if matches!(self.f_spec, Some(f) if !matches!(f, FSpec::Indicator(_))) {
                    return Err(config_err("estimator_sweep reads only indicator(y) from f_spec"));
                }
            }
            ExperimentKind::MedianLaw => unreachable!(),
        }
        Ok(())
    }

    fn validate_median(&self) -> Result<()> {
        match (&self.model, &self.fixed_p) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(config_err("median_law needs exactly one of model and fixed_p"));
            }
            (Some(m), None) => {
                m.validate().map_err(|e| config_err(e.to_string()))?;
                if m.space() != SpaceTag::RealLine {
                    return Err(config_err("median_law needs a scalar model"));
                }
                if matches!(m, ExchangeableModel::StickBreaking(_)) && self.n > STICK_POSTERIOR_MAX_N {
                    return Err(config_err("stick-breaking posterior draws need n <= 4"));
                }
            }
            (None, Some(p)) => {
                p.validate().map_err(|e| config_err(e.to_string()))?;
                if self.n != 0 {
                    return Err(config_err("a fixed law takes no history; set n = 0"));
                }
            }
        }
        if self.n_grid.contains(&0) {
            return Err(config_err("median_law needs N >= 1"));
        }
        if self.f_grid.is_empty() || self.f_grid.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(config_err("f_grid must be a nonempty list of levels in [0, 1]"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FINITE: &str =
        r#"{"experiment":"bound_finite","model":{"kind":"finite_dirichlet","alpha":[1,1]},"N_grid":[2]}"#;

    #[test]
    fn defaults_fill_in() {
        let cfg = ExperimentConfig::from_json(FINITE).unwrap();
        assert_eq!(cfg.m_samples, 2000);
        assert_eq!(cfg.replicates, 1);
        assert_eq!(cfg.bootstrap, 200);
        assert_eq!(cfg.n, 0);
        assert_eq!(cfg.ground().unwrap(), Ground::Tv);
        assert_eq!(cfg.f_grid.len(), 11);
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            r#"{"experiment":"bound_finite","model":{"kind":"finite_dirichlet","alpha":[1,1]},"N_grid":[]}"#,
            r#"{"experiment":"bound_finite","model":{"kind":"finite_dirichlet","alpha":[1,1]},"N_grid":[2],"extra":1}"#,
            r#"{"experiment":"bound_finite","model":{"kind":"finite_dirichlet","alpha":[1,1]},"n":5,"N_grid":[5]}"#,
            r#"{"experiment":"bound_finite","model":{"kind":"finite_dirichlet","alpha":[1,-1]},"N_grid":[2]}"#,
            r#"{"experiment":"bound_finite","model":{"kind":"dirichlet_process","mass":1,"base":{"family":"gaussian","mu":0,"sigma":1}},"N_grid":[2]}"#,
            r#"{"experiment":"bound_mean","model":{"kind":"dirichlet_process","mass":1,"base":{"family":"gaussian","mu":0,"sigma":1}},"N_grid":[2]}"#,
            r#"{"experiment":"median_law","N_grid":[1]}"#,
            r#"{"experiment":"median_law","fixed_p":{"family":"uniform","a":0,"b":1},"N_grid":[0]}"#,
            r#"{"experiment":"bound_finite","model":{"kind":"finite_dirichlet","alpha":[1,1]},"N_grid":[2],"replicates":0}"#,
            r#"{"experiment":"nonsense","N_grid":[2]}"#,
            "not json",
        ];
        for s in bad {
            assert!(matches!(ExperimentConfig::from_json(s), Err(Error::Config(_))), "{s}");
        }
    }

    #[test]
    fn missing_file_is_io() {
        let err = ExperimentConfig::from_path(Path::new("/nonexistent/config.json")).unwrap_err();
        assert!(matches!(err, Error::Io(_)));
    }

    #[test]
    fn f_spec_parses_and_prints() {
        for (s, f) in [
            ("identity", FSpec::Identity),
            ("square", FSpec::Square),
            ("indicator(0.5)", FSpec::Indicator(0.5)),
            ("constant(-2)", FSpec::Constant(-2.0)),
        ] {
            assert_eq!(FSpec::try_from(s.to_string()).unwrap(), f);
            assert_eq!(FSpec::try_from(f.to_string()).unwrap(), f);
        }
        assert!(FSpec::try_from("cube".to_string()).is_err());
        assert!(FSpec::try_from("indicator(x)".to_string()).is_err());
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = ExperimentConfig::from_json(FINITE).unwrap();
        let back = ExperimentConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, back);
    }
}
