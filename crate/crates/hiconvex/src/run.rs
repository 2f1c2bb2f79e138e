//! Dispatch from a [`RunConfig`] to the checkers, and the output envelope.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use hiconvex_core::divided_differences::{n_convexity_verdict, ConvexityVerdict, SampleGrid};
use hiconvex_core::hh_bounds::{
    bp_bounds_check, chain_check, fejer_check, hh_classical_check, nested_mean_checks, slope_bounds_check,
    weighted_3convex_check, WeightSpec,
};
use hiconvex_core::hornich_hlawka::{
    freudenthal, freudenthal_search, hh_abs_check, hh_basic_check, special_form_check, va_generalized_check,
    FreudenthalResult, SpecialForm,
};
use hiconvex_core::matrix_ext::{exp_family_check, matrix_hh_check, SymmetricMatrix};
use hiconvex_core::ordering::{precedes_3cvx, precedes_3cvx_on, DiscreteMeasure, OrderVerdict, ORDER_REL_TOL};
use hiconvex_core::report::Term;
use hiconvex_core::{FunctionModel, InequalityReport};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::config::{Command, FalsifyTarget, Ineq, RunConfig};
use crate::io::{self, IngestError};
use crate::oracle::parallel_oracle;

/// Default node count for `check` on a model.
pub const DEFAULT_CHECK_POINTS: usize = 101;
/// Default random trials for `falsify`.
pub const DEFAULT_TRIALS: u64 = 10_000;
/// A Freudenthal witness counts only when `|F|` exceeds this.
pub const WITNESS_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Core(#[from] hiconvex_core::Error),
    #[error("{0}")]
    Usage(String),
}

fn usage<T>(msg: impl Into<String>) -> Result<T, RunError> {
    Err(RunError::Usage(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub version: String,
    pub unix_time: u64,
}

/// Everything a run prints. `verdict` mirrors `report.verdict`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ineq: Option<String>,
    pub seed: u64,
    pub verdict: bool,
    pub report: InequalityReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

/// Process exit status for a set of envelopes: 0 when every verdict holds,
/// 1 otherwise. Errors map to 2 at the call site.
pub fn exit_code(envelopes: &[Envelope]) -> i32 {
    if envelopes.iter().all(|e| e.verdict) {
        0
    } else {
        1
    }
}

/// Reads a config file holding one run object or an array of them.
pub fn load_config(path: &Path) -> Result<Vec<RunConfig>, IngestError> {
    let text = fs::read_to_string(path).map_err(|source| IngestError::Io { path: path.into(), source })?;
    let origin = path.display().to_string();
    let value: Value = io::parse_json(&text, &origin)?;
    if value.is_array() {
        io::parse_json(&text, &origin)
    } else {
        Ok(vec![io::parse_json(&text, &origin)?])
    }
}

/// Inputs of one run, resolved against `base`.
struct Inputs<'a> {
    config: &'a RunConfig,
    base: &'a Path,
}

impl Inputs<'_> {
    fn value<T: serde::de::DeserializeOwned>(&self, v: &Option<Value>, flag: &str) -> Result<T, RunError> {
        match v {
            Some(v) => Ok(io::from_value(v, self.base)?),
            None => usage(format!("missing --{flag}")),
        }
    }

    fn model(&self) -> Result<FunctionModel, RunError> {
        self.value(&self.config.model, "model")
    }

    fn interval(&self, f: Option<&FunctionModel>) -> Result<(f64, f64), RunError> {
        if let Some([a, b]) = self.config.interval {
            if !(a < b) {
                return usage(format!("--interval needs a < b, got {a} {b}"));
            }
            return Ok((a, b));
        }
        match f.map(|f| f.domain()) {
            Some(d) if d.is_bounded() => Ok((d.lo, d.hi)),
            _ => usage("missing --interval (the model's domain is unbounded)"),
        }
    }

    fn point(&self, len: Option<usize>) -> Result<Vec<f64>, RunError> {
        match (&self.config.point, len) {
            (Some(p), Some(n)) if p.len() != n => usage(format!("--point needs {n} values, got {}", p.len())),
            (Some(p), _) => Ok(p.clone()),
            (None, _) => usage("missing --point"),
        }
    }

    fn triple(&self) -> Result<(f64, f64, f64), RunError> {
        let p = self.point(Some(3))?;
        Ok((p[0], p[1], p[2]))
    }
}

/// Reapplies a tolerance override to a finished report.
fn override_tol(mut report: InequalityReport, tol: Option<f64>) -> InequalityReport {
    if let Some(t) = tol {
        report.tol = t;
        report.verdict = report.margin >= -t;
    }
    report
}

/// Runs one configuration. `base` resolves relative input paths.
pub fn run(config: &RunConfig, base: &Path) -> Result<Envelope, RunError> {
    if let Some(t) = config.tol {
        if !(t >= 0.0) || !t.is_finite() {
            return usage(format!("--tol must be finite and nonnegative, got {t}"));
        }
    }
    let inputs = Inputs { config, base };
    let (report, detail) = match config.command {
        Command::Check => check(&inputs)?,
        Command::Verify => match config.ineq {
            Some(ineq) => (verify(&inputs, ineq)?, None),
            None => return usage("verify needs --ineq"),
        },
        Command::Order => order(&inputs)?,
        Command::Falsify => match config.target.unwrap_or_default() {
            FalsifyTarget::Freudenthal => falsify_freudenthal(config)?,
        },
        Command::Matrix => (matrix(&inputs)?, None),
    };
    let report = override_tol(report, config.tol);
    let meta = (!config.no_meta).then(|| Meta {
        version: env!("CARGO_PKG_VERSION").into(),
        unix_time: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
    });
    Ok(Envelope {
        command: config.command.name().into(),
        ineq: config.ineq.filter(|_| config.command == Command::Verify).map(|i| i.name().into()),
        seed: config.seed,
        verdict: report.verdict,
        report,
        detail,
        meta,
    })
}

fn verdict_report(v: &ConvexityVerdict) -> InequalityReport {
    let term = Term::at_least(format!("order-{} divided differences", v.order), v.margin, 0.0);
    let mut r = InequalityReport::from_terms(vec![term], v.tol)
        .witness("order", v.order as f64)
        .witness("window_start", v.witness_start as f64)
        .case("check");
    for (i, x) in v.witness_nodes.iter().enumerate() {
        r = r.witness(&format!("node{i}"), *x);
    }
    r
}

fn check(inputs: &Inputs) -> Result<(InequalityReport, Option<Value>), RunError> {
    let c = inputs.config;
    let order = c.k.unwrap_or(3);
    let grid = match (&c.samples, &c.model) {
        (Some(path), None) => io::ingest_samples(&inputs.base.join(path))?,
        (None, Some(_)) => {
            let f = inputs.model()?;
            let (a, b) = inputs.interval(Some(&f))?;
            let points = c.points.unwrap_or(DEFAULT_CHECK_POINTS);
            SampleGrid::sample(&f, hiconvex_core::Interval::new(a, b), points)?
        }
        (Some(_), Some(_)) => return usage("check takes either --samples or --model, not both"),
        (None, None) => return usage("check needs --samples or --model"),
    };
    let v = n_convexity_verdict(&grid, order, c.tol)?;
    let detail = serde_json::to_value(&v).expect("verdict serializes");
    Ok((verdict_report(&v), Some(detail)))
}

fn verify(inputs: &Inputs, ineq: Ineq) -> Result<InequalityReport, RunError> {
    let c = inputs.config;
    let weight = c.weight.unwrap_or(WeightSpec::Linear);
    let report = match ineq {
        Ineq::Bp | Ineq::Hh | Ineq::Fejer | Ineq::Weighted | Ineq::Nested | Ineq::Slope | Ineq::Chain => {
            let f = inputs.model()?;
            let (a, b) = inputs.interval(Some(&f))?;
            match ineq {
                Ineq::Bp => bp_bounds_check(&f, a, b)?,
                Ineq::Hh => {
                    let mu: DiscreteMeasure = inputs.value(&c.measure_mu, "measure-mu")?;
                    hh_classical_check(&f, &mu, a, b)?
                }
                Ineq::Fejer => fejer_check(&f, weight, a, b)?,
                Ineq::Weighted => weighted_3convex_check(&f, weight, a, b)?,
                Ineq::Nested => nested_mean_checks(&f, a, b, c.eps)?,
                Ineq::Slope => slope_bounds_check(&f, a, b)?,
                _ => chain_check(&f, a, b)?,
            }
        }
        Ineq::Hh1 => {
            let (x, y, z) = inputs.triple()?;
            hh_basic_check(&inputs.model()?, x, y, z, None)?
        }
        Ineq::Res => {
            let (x, y, z) = inputs.triple()?;
            hh_abs_check(&inputs.model()?, x, y, z, None)?
        }
        Ineq::Rhh | Ineq::Mhh | Ineq::Hha => {
            let (x, y, z) = inputs.triple()?;
            let form = match ineq {
                Ineq::Rhh => SpecialForm::Rhh,
                Ineq::Mhh => SpecialForm::Mhh,
                _ => SpecialForm::HhAlpha,
            };
            special_form_check(form, c.alpha.unwrap_or(1.0), x, y, z)?
        }
        Ineq::Va => {
            let xs = inputs.point(None)?;
            let k = c.k.ok_or_else(|| RunError::Usage("va needs --k".into()))?;
            va_generalized_check(&inputs.model()?, &xs, k)?
        }
        Ineq::Matrix => matrix(inputs)?,
    };
    Ok(report)
}

fn order(inputs: &Inputs) -> Result<(InequalityReport, Option<Value>), RunError> {
    let c = inputs.config;
    let nu: DiscreteMeasure = inputs.value(&c.measure_nu, "measure-nu")?;
    let mu: DiscreteMeasure = inputs.value(&c.measure_mu, "measure-mu")?;
    let verdict = match c.interval {
        Some([a, b]) => precedes_3cvx_on(&nu, &mu, a, b)?,
        None => precedes_3cvx(&nu, &mu)?,
    };
    let mut report = order_report(&nu, &mu, &verdict);
    let mut detail = serde_json::json!({ "exact": verdict });
    if let Some(count) = c.trials {
        if count == 0 {
            return usage("--trials must be positive");
        }
        let (a, b) = match c.interval {
            Some([a, b]) => (a, b),
            None => {
                let (p, q) = (nu.support_hull(), mu.support_hull());
                let lo = p.iter().chain(q.iter()).map(|h| h.lo).fold(f64::INFINITY, f64::min);
                let hi = p.iter().chain(q.iter()).map(|h| h.hi).fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            }
        };
        let oracle = parallel_oracle(&nu, &mu, a, b, c.seed, count).map_err(RunError::Usage)?;
        report = report.case(if oracle.holds == verdict.holds { "oracle agrees" } else { "oracle disagrees" });
        detail["oracle"] = serde_json::to_value(&oracle).expect("oracle verdict serializes");
    }
    Ok((report, Some(detail)))
}

/// Moment terms compare `|m_k(nu) - m_k(mu)|` with its allowance net of the
/// report tolerance, so the report verdict equals the order verdict.
fn order_report(nu: &DiscreteMeasure, mu: &DiscreteMeasure, v: &OrderVerdict) -> InequalityReport {
    let mut terms = Vec::with_capacity(4);
    for k in 0..3u32 {
        let target = mu.moment(k);
        let allowance = ORDER_REL_TOL * (1.0 + target.abs());
        terms.push(Term::new(format!("moment {k}"), (nu.moment(k) - target).abs(), allowance - v.tol));
    }
    terms.push(Term::at_least("deficiency", v.min_deficiency, 0.0));
    let mut r = InequalityReport::from_terms(terms, v.tol)
        .witness("min_deficiency", v.min_deficiency)
        .witness("witness_knot", v.witness_knot)
        .case("order");
    if let Some(k) = v.failing_moment {
        r = r.case(format!("moment {k} differs"));
    }
    r
}

fn falsify_freudenthal(c: &RunConfig) -> Result<(InequalityReport, Option<Value>), RunError> {
    let result: FreudenthalResult = freudenthal_search(c.seed, c.trials.unwrap_or(DEFAULT_TRIALS))?;
    let mut terms = Vec::with_capacity(2);
    let mut report_witness = Vec::new();
    // each sign re-evaluated from its point
    let pos = result.positive.map(|w| (w.point, freudenthal(w.point)));
    let neg = result.negative.map(|w| (w.point, freudenthal(w.point)));
    terms.push(Term::at_least("positive witness", pos.map_or(0.0, |p| p.1), WITNESS_THRESHOLD));
    terms.push(Term::at_least("negative witness", neg.map_or(0.0, |p| -p.1), WITNESS_THRESHOLD));
    for (name, w) in [("positive", pos), ("negative", neg)] {
        if let Some((point, value)) = w {
            for (i, v) in point.iter().enumerate() {
                report_witness.push((format!("{name}_x{i}"), *v));
            }
            report_witness.push((format!("{name}_value"), value));
        }
    }
    let mut report = InequalityReport::from_terms(terms, 0.0).case("freudenthal");
    for (k, v) in report_witness {
        report = report.witness(&k, v);
    }
    for (name, w) in [("positive", pos), ("negative", neg)] {
        if w.is_none() {
            report = report.case(format!("no {name} witness found"));
        }
    }
    let detail = serde_json::json!({
        "positive": result.positive,
        "negative": result.negative,
        "evaluated": result.evaluated,
    });
    Ok((report, Some(detail)))
}

fn matrix(inputs: &Inputs) -> Result<InequalityReport, RunError> {
    let c = inputs.config;
    let family: Vec<SymmetricMatrix> = inputs.value(&c.matrices, "matrices")?;
    match (family.len(), c.exp) {
        (1, Some([r, s, t])) => Ok(exp_family_check(&family[0], r, s, t)?),
        (3, None) => {
            let f = inputs.model()?;
            Ok(matrix_hh_check(&f, &family[0], &family[1], &family[2])?)
        }
        (n, Some(_)) => usage(format!("--exp needs exactly one matrix, got {n}")),
        (n, None) => usage(format!("the matrix inequality needs three matrices, got {n}")),
    }
}

/// Serializes envelopes: one object for a single run, an array otherwise.
pub fn render(envelopes: &[Envelope]) -> String {
    let text = match envelopes {
        [one] => serde_json::to_string_pretty(one),
        many => serde_json::to_string_pretty(many),
    };
    text.expect("envelopes serialize") + "\n"
}

/// Writes rendered output to `out`, or returns it for standard output.
pub fn emit(text: &str, out: Option<&PathBuf>) -> Result<Option<String>, RunError> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|source| IngestError::Io { path: path.clone(), source })?;
            Ok(None)
        }
        None => Ok(Some(text.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn verify_bp(model: Value) -> Envelope {
        let mut c = RunConfig::new(Command::Verify);
        c.ineq = Some(Ineq::Bp);
        c.model = Some(model);
        c.interval = Some([0.0, 1.0]);
        c.no_meta = true;
        run(&c, Path::new(".")).unwrap()
    }

    #[test]
    fn bp_matches_the_core_checker() {
        let e = verify_bp(json!({"kind": "catalog", "name": "x4"}));
        let f = FunctionModel::catalog(hiconvex_core::CatalogEntry::Monomial(4));
        assert_eq!(e.report, bp_bounds_check(&f, 0.0, 1.0).unwrap());
        assert!(e.verdict);
        assert_eq!(exit_code(&[e]), 0);
    }

    #[test]
    fn order_report_agrees_with_the_verdict() {
        let (cond, disp) = hiconvex_core::ordering::condensation_dispersion(0.0, 1.0).unwrap();
        for (nu, mu, holds) in [(&cond, &disp, true), (&disp, &cond, false)] {
            let mut c = RunConfig::new(Command::Order);
            c.measure_nu = Some(serde_json::to_value(nu).unwrap());
            c.measure_mu = Some(serde_json::to_value(mu).unwrap());
            c.no_meta = true;
            assert_eq!(run(&c, Path::new(".")).unwrap().verdict, holds);
        }
        let mut c = RunConfig::new(Command::Order);
        c.measure_nu = Some(json!({"atoms": [{"x": 0.0, "w": 1.0}]}));
        c.measure_mu = Some(json!({"atoms": [{"x": 1.0, "w": 1.0}]}));
        let e = run(&c, Path::new(".")).unwrap();
        assert!(!e.verdict);
        assert!(e.report.cases.contains(&"moment 1 differs".to_string()));
    }

    #[test]
    fn missing_inputs_are_usage_errors() {
        let mut c = RunConfig::new(Command::Verify);
        assert!(matches!(run(&c, Path::new(".")), Err(RunError::Usage(_))));
        c.ineq = Some(Ineq::Res);
        c.model = Some(json!({"kind": "catalog", "name": "log1p"}));
        assert!(matches!(run(&c, Path::new(".")), Err(RunError::Usage(_))));
    }

    #[test]
    fn tolerance_override_recomputes_the_verdict() {
        let mut c = RunConfig::new(Command::Verify);
        c.ineq = Some(Ineq::Res);
        c.model = Some(json!({"kind": "catalog", "name": "x3"}));
        c.point = Some(vec![1.0, 1.0, -1.0]);
        assert!(!run(&c, Path::new(".")).unwrap().verdict);
        c.tol = Some(10.0);
        assert!(run(&c, Path::new(".")).unwrap().verdict);
    }
}
