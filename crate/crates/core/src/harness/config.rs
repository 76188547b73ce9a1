//! JSON run configuration. Every field mirrors a command-line flag; flags
//! given on the command line take precedence.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::harness::io::read_json;
use crate::harness::phantom::Phantom;
use crate::harness::report::SCHEMA_VERSION;
use crate::invert_john::EvenNormalization;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    John,
    Hs,
    Svd,
    Ac,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::John => "john",
            Method::Hs => "hs",
            Method::Svd => "svd",
            Method::Ac => "ac",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    LogPotential,
    ClosedForm,
}

impl From<Normalization> for EvenNormalization {
    fn from(value: Normalization) -> Self {
        match value {
            Normalization::LogPotential => EvenNormalization::LogPotential,
            Normalization::ClosedForm => EvenNormalization::ClosedForm,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: Option<u32>,
    pub threads: Option<usize>,
    pub n: Option<usize>,
    pub grid: Option<GridSpec>,
    pub lambda: Option<f64>,
    pub phantom: Option<Phantom>,
    pub full: Option<bool>,
    pub method: Option<Method>,
    pub band: Option<usize>,
    pub eps: Option<f64>,
    pub r_max: Option<f64>,
    pub ell: Option<usize>,
    pub force: Option<bool>,
    pub normalization: Option<Normalization>,
    pub cartesian_nodes: Option<usize>,
    pub max_error: Option<f64>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let config: RunConfig = read_json(path)?;
        if let Some(v) = config.schema_version {
            if v != SCHEMA_VERSION {
                return Err(Error::Format(format!("unsupported config schema version {v}")));
            }
        }
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_unknown_fields() {
        let config = RunConfig {
            schema_version: Some(SCHEMA_VERSION),
            n: Some(2),
            grid: Some(GridSpec::default_for(2).unwrap()),
            phantom: Some(Phantom::default_bump(2)),
            method: Some(Method::Hs),
            eps: Some(0.02),
            ..Default::default()
        };
        let text = serde_json::to_string(&config).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), config);
        assert!(serde_json::from_str::<RunConfig>(r#"{"nn": 2}"#).is_err());
        assert_eq!(serde_json::from_str::<RunConfig>("{}").unwrap(), RunConfig::default());
    }
}
