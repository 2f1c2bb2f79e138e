//! Run configuration shared by the command line and `run --config` files.

use std::path::PathBuf;

use hiconvex_core::hh_bounds::WeightSpec;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// n-convexity verdict of a model or CSV samples.
    Check,
    /// One inequality selected by `ineq`.
    Verify,
    /// 3-convex order between two measures.
    Order,
    /// Counterexample search.
    Falsify,
    /// Matrix inequalities.
    Matrix,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Verify => "verify",
            Command::Order => "order",
            Command::Falsify => "falsify",
            Command::Matrix => "matrix",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Ineq {
    Bp,
    Hh,
    Fejer,
    Weighted,
    Nested,
    Slope,
    Chain,
    Hh1,
    Res,
    Rhh,
    Mhh,
    Hha,
    Va,
    Matrix,
}

impl Ineq {
    pub fn name(self) -> &'static str {
        match self {
            Ineq::Bp => "bp",
            Ineq::Hh => "hh",
            Ineq::Fejer => "fejer",
            Ineq::Weighted => "weighted",
            Ineq::Nested => "nested",
            Ineq::Slope => "slope",
            Ineq::Chain => "chain",
            Ineq::Hh1 => "hh1",
            Ineq::Res => "res",
            Ineq::Rhh => "rhh",
            Ineq::Mhh => "mhh",
            Ineq::Hha => "hha",
            Ineq::Va => "va",
            Ineq::Matrix => "matrix",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FalsifyTarget {
    #[default]
    Freudenthal,
}

/// One run. Inputs (`model`, `measure_nu`, `measure_mu`, `matrices`) are
/// inline JSON values or strings naming JSON files; in a config file such
/// paths are relative to the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ineq: Option<Ineq>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<FalsifyTarget>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure_nu: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure_mu: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Value>,
    /// CSV file with an `x,f` header.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
    /// Scalar arguments of the Hornich-Hlawka forms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Convexity order for `check`, subset size for `va`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// `(r, s, t)` of the exponential family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exp: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub no_meta: bool,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            ineq: None,
            target: None,
            model: None,
            measure_nu: None,
            measure_mu: None,
            matrices: None,
            samples: None,
            interval: None,
            point: None,
            weight: None,
            alpha: None,
            eps: None,
            k: None,
            points: None,
            exp: None,
            tol: None,
            seed: 0,
            trials: None,
            out: None,
            no_meta: false,
        }
    }
}
