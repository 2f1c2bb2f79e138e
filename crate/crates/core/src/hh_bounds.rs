//! Hermite-Hadamard type bounds: classical, Fejér, the two-point 3-convex
//! bounds, nested means and derivative slope bounds.
//!
//! Every check returns an [`InequalityReport`] whose terms read `lhs <= rhs`.
//! Convexity preconditions are not enforced. They are re-tested on a coarse
//! grid and a failure only adds a warning, so the checkers can also be run
//! on functions outside their class to exhibit violations.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::divided_differences::model_verdict;
use crate::error::{Error, Result};
use crate::function_models::{FunctionModel, Interval};
use crate::math::{cos, powi, sin};
use crate::ordering::{barycenter, DiscreteMeasure};
use crate::quadrature::{integrate, DEFAULT_TOL};
use crate::report::{InequalityReport, Term};

const PRECONDITION_POINTS: usize = 8;
/// Fractions of `(b - a) / 2` swept by [`nested_mean_checks`].
pub const EPSILON_SWEEP: [f64; 3] = [0.1, 0.25, 0.4];

fn check_interval(f: &FunctionModel, a: f64, b: f64) -> Result<()> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter(format!("need finite a < b, got [{a}, {b}]")));
    }
    let d = f.domain();
    for x in [a, b] {
        if !d.contains_approx(x) {
            return Err(Error::Domain { x, lo: d.lo, hi: d.hi });
        }
    }
    Ok(())
}

fn integral(f: &FunctionModel, a: f64, b: f64) -> Result<f64> {
    integrate(|x| f.value(x), a, b, DEFAULT_TOL * (b - a).max(1.0))
}

/// Warnings for each order in `orders` whose sampled verdict fails.
pub fn precondition_warnings(f: &FunctionModel, a: f64, b: f64, orders: &[usize]) -> Vec<String> {
    let mut out = Vec::new();
    for &n in orders {
        if let Ok(v) = model_verdict(f, Interval::new(a, b), PRECONDITION_POINTS, n) {
            if !v.holds {
                let name = match n {
                    2 => "convex",
                    3 => "3-convex",
                    _ => "n-convex",
                };
                out.push(format!(
                    "precondition: f does not look {name} on [{a}, {b}] (order-{n} divided difference {:e})",
                    v.margin
                ));
            }
        }
    }
    out
}

/// `(1 / (b - a)) int_a^b f`.
pub fn integral_mean(f: &FunctionModel, a: f64, b: f64) -> Result<f64> {
    check_interval(f, a, b)?;
    Ok(integral(f, a, b)? / (b - a))
}

/// `f(bar mu) <= int f dmu <= ((b - bar) f(a) + (bar - a) f(b)) / (b - a)`.
pub fn hh_classical_check(f: &FunctionModel, mu: &DiscreteMeasure, a: f64, b: f64) -> Result<InequalityReport> {
    check_interval(f, a, b)?;
    let bar = barycenter(mu)?;
    let hull = mu.support_hull().ok_or_else(|| Error::NotProbability("empty measure".into()))?;
    if hull.lo < a || hull.hi > b {
        return Err(Error::SupportMismatch { lo: hull.lo, hi: hull.hi, a, b });
    }
    let at_bar = f.value(bar)?;
    let mean = mu.integrate(f)?;
    let chord = ((b - bar) * f.value(a)? + (bar - a) * f.value(b)?) / (b - a);
    let terms = vec![
        Term::new("f(bar) <= integral", at_bar, mean),
        Term::new("integral <= chord", mean, chord),
    ];
    Ok(InequalityReport::with_default_tol(terms)
        .witness("a", a)
        .witness("b", b)
        .witness("barycenter", bar)
        .case("hh")
        .warn_all(precondition_warnings(f, a, b, &[2])))
}

fn condensation_value(f: &FunctionModel, a: f64, b: f64) -> Result<f64> {
    Ok(0.25 * f.value(a)? + 0.75 * f.value((a + 2.0 * b) / 3.0)?)
}

fn dispersion_value(f: &FunctionModel, a: f64, b: f64) -> Result<f64> {
    Ok(0.75 * f.value((2.0 * a + b) / 3.0)? + 0.25 * f.value(b)?)
}

/// Two-point bounds for 3-convex `f`:
/// `f(a)/4 + 3 f((a+2b)/3)/4 <= mean <= 3 f((2a+b)/3)/4 + f(b)/4`.
pub fn bp_bounds_check(f: &FunctionModel, a: f64, b: f64) -> Result<InequalityReport> {
    let mean = integral_mean(f, a, b)?;
    let lower = condensation_value(f, a, b)?;
    let upper = dispersion_value(f, a, b)?;
    let terms = vec![Term::new("condensation <= mean", lower, mean), Term::new("mean <= dispersion", mean, upper)];
    Ok(InequalityReport::with_default_tol(terms)
        .witness("a", a)
        .witness("b", b)
        .witness("condensation", lower)
        .witness("mean", mean)
        .witness("dispersion", upper)
        .case("bp")
        .warn_all(precondition_warnings(f, a, b, &[3])))
}

/// Five-term chain for convex and 3-convex `f`:
/// `f(mid) <= condensation <= mean <= dispersion <= (f(a) + f(b)) / 2`.
pub fn chain_check(f: &FunctionModel, a: f64, b: f64) -> Result<InequalityReport> {
    let mean = integral_mean(f, a, b)?;
    let mid = f.value(0.5 * (a + b))?;
    let lower = condensation_value(f, a, b)?;
    let upper = dispersion_value(f, a, b)?;
    let ends = 0.5 * (f.value(a)? + f.value(b)?);
    let terms = vec![
        Term::new("midpoint <= condensation", mid, lower),
        Term::new("condensation <= mean", lower, mean),
        Term::new("mean <= dispersion", mean, upper),
        Term::new("dispersion <= endpoints", upper, ends),
    ];
    Ok(InequalityReport::with_default_tol(terms)
        .witness("a", a)
        .witness("b", b)
        .witness("midpoint", mid)
        .witness("condensation", lower)
        .witness("mean", mean)
        .witness("dispersion", upper)
        .witness("endpoints", ends)
        .case("chain")
        .warn_all(precondition_warnings(f, a, b, &[2, 3])))
}

/// Built-in weights `w` with a nonnegative primitive `W` symmetric about
/// the midpoint of `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightSpec {
    /// `w = a + b - 2x`, `W = (x - a)(b - x)` on any `[a, b]`.
    Linear,
    /// `w = 2n x^(2n-1)`, `W = x^(2n)` on `[-c, c]`.
    Power { n: u32 },
    /// `w = cos x`, `W = sin x` on `[0, pi]`.
    Cosine,
}

const WEIGHT_GRID: usize = 33;

impl WeightSpec {
    pub fn weight(&self, a: f64, b: f64, x: f64) -> f64 {
        match *self {
            WeightSpec::Linear => a + b - 2.0 * x,
            WeightSpec::Power { n } => 2.0 * n as f64 * powi(x, 2 * n as i32 - 1),
            WeightSpec::Cosine => cos(x),
        }
    }

    pub fn primitive(&self, a: f64, b: f64, x: f64) -> f64 {
        match *self {
            WeightSpec::Linear => (x - a) * (b - x),
            WeightSpec::Power { n } => powi(x, 2 * n as i32),
            WeightSpec::Cosine => sin(x),
        }
    }

    /// `int_a^b W`, in closed form.
    pub fn primitive_integral(&self, a: f64, b: f64) -> f64 {
        match *self {
            WeightSpec::Linear => powi(b - a, 3) / 6.0,
            WeightSpec::Power { n } => {
                let k = 2 * n as i32 + 1;
                (powi(b, k) - powi(a, k)) / k as f64
            }
            WeightSpec::Cosine => cos(a) - cos(b),
        }
    }

    /// Checks `W' = w`, `W >= 0` and `W(x) = W(a + b - x)` on a grid.
    pub fn validate(&self, a: f64, b: f64) -> Result<()> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::WeightSpec(format!("need finite a < b, got [{a}, {b}]")));
        }
        if let WeightSpec::Power { n: 0 } = self {
            return Err(Error::WeightSpec("power weight needs n >= 1".into()));
        }
        let scale = (0..WEIGHT_GRID)
            .map(|i| self.primitive(a, b, a + (b - a) * i as f64 / (WEIGHT_GRID - 1) as f64).abs())
            .fold(0.0, f64::max);
        let tol = 1e-9 * (1.0 + scale);
        let h = 1e-5 * (b - a);
        for i in 0..WEIGHT_GRID {
            let x = a + (b - a) * i as f64 / (WEIGHT_GRID - 1) as f64;
            let big_w = self.primitive(a, b, x);
            if big_w < -tol {
                return Err(Error::WeightSpec(format!("primitive is negative at {x}: {big_w:e}")));
            }
            let mirror = self.primitive(a, b, a + b - x);
            if (big_w - mirror).abs() > tol {
                return Err(Error::WeightSpec(format!("primitive is not symmetric at {x}: {big_w} vs {mirror}")));
            }
            if i > 0 && i + 1 < WEIGHT_GRID {
                let fd = (self.primitive(a, b, x + h) - self.primitive(a, b, x - h)) / (2.0 * h);
                let w = self.weight(a, b, x);
                if (fd - w).abs() > 1e-6 * (1.0 + w.abs() + scale / (b - a)) {
                    return Err(Error::WeightSpec(format!("W' != w at {x}: {fd} vs {w}")));
                }
            }
        }
        Ok(())
    }
}

/// For 3-convex differentiable `f`:
///
/// ```text
/// -((f'(a) + f'(b)) / 2) int W <= int f w - (f(b) W(b) - f(a) W(a)) <= -f'((a+b)/2) int W
/// ```
pub fn weighted_3convex_check(f: &FunctionModel, spec: WeightSpec, a: f64, b: f64) -> Result<InequalityReport> {
    check_interval(f, a, b)?;
    spec.validate(a, b)?;
    let int_big_w = spec.primitive_integral(a, b);
    let fw = integrate(|x| Ok(f.value(x)? * spec.weight(a, b, x)), a, b, DEFAULT_TOL * (b - a).max(1.0))?;
    let middle = fw - (f.value(b)? * spec.primitive(a, b, b) - f.value(a)? * spec.primitive(a, b, a));
    let lower = -0.5 * (f.eval(a, 1)? + f.eval(b, 1)?) * int_big_w;
    let upper = -f.eval(0.5 * (a + b), 1)? * int_big_w;
    let terms = vec![Term::new("lower <= weighted", lower, middle), Term::new("weighted <= upper", middle, upper)];
    Ok(InequalityReport::with_default_tol(terms)
        .witness("a", a)
        .witness("b", b)
        .witness("primitive_integral", int_big_w)
        .witness("weighted", middle)
        .case("weighted")
        .warn_all(precondition_warnings(f, a, b, &[3])))
}

/// Fejér's inequality for convex `f` with the symmetric density
/// `W / int W`: `f(mid) <= int f W / int W <= (f(a) + f(b)) / 2`.
pub fn fejer_check(f: &FunctionModel, spec: WeightSpec, a: f64, b: f64) -> Result<InequalityReport> {
    check_interval(f, a, b)?;
    spec.validate(a, b)?;
    let mass = spec.primitive_integral(a, b);
    let fw = integrate(|x| Ok(f.value(x)? * spec.primitive(a, b, x)), a, b, DEFAULT_TOL * (b - a).max(1.0))?;
    let mean = fw / mass;
    let mid = f.value(0.5 * (a + b))?;
    let ends = 0.5 * (f.value(a)? + f.value(b)?);
    let terms = vec![Term::new("midpoint <= weighted mean", mid, mean), Term::new("weighted mean <= endpoints", mean, ends)];
    Ok(InequalityReport::with_default_tol(terms)
        .witness("a", a)
        .witness("b", b)
        .witness("weighted_mean", mean)
        .case("fejer")
        .warn_all(precondition_warnings(f, a, b, &[2])))
}

/// Nested-interval mean comparisons for convex `f`. With `eps = None` the
/// sweep [`EPSILON_SWEEP`] of `(b - a) / 2` is used.
///
/// Per `eps`: the mean over `[a + eps, b - eps]` is at most the mean over
/// `[a, b]`, which is at most the average over the two end strips of width
/// `eps`. Once: the middle-third mean is at most the mean, which is at most
/// the average over the two outer quarters, `(2 / (b - a))` times their
/// integrals. A factor of 4 there would double the mean of a constant.
pub fn nested_mean_checks(f: &FunctionModel, a: f64, b: f64, eps: Option<f64>) -> Result<InequalityReport> {
    check_interval(f, a, b)?;
    let max = 0.5 * (b - a);
    let sweep: Vec<f64> = match eps {
        Some(e) => {
            if !(e > 0.0 && e < max) {
                return Err(Error::EpsilonRange { eps: e, max });
            }
            vec![e]
        }
        None => EPSILON_SWEEP.iter().map(|s| s * max).collect(),
    };
    let mean = integral(f, a, b)? / (b - a);
    let mut terms = Vec::new();
    for &e in &sweep {
        let inner = integral(f, a + e, b - e)? / (b - a - 2.0 * e);
        let strips = (integral(f, a, a + e)? + integral(f, b - e, b)?) / (2.0 * e);
        terms.push(Term::new(format!("inner mean <= mean (eps={e})"), inner, mean));
        terms.push(Term::new(format!("mean <= strip average (eps={e})"), mean, strips));
    }
    let third = 3.0 / (b - a) * integral(f, (2.0 * a + b) / 3.0, (a + 2.0 * b) / 3.0)?;
    let quarters = 2.0 / (b - a) * (integral(f, a, (3.0 * a + b) / 4.0)? + integral(f, (a + 3.0 * b) / 4.0, b)?);
    terms.push(Term::new("middle third <= mean", third, mean));
    terms.push(Term::new("mean <= quarter strips", mean, quarters));

    let mut report = InequalityReport::with_default_tol(terms).witness("a", a).witness("b", b).witness("mean", mean);
    if let Some(e) = eps {
        report = report.witness("eps", e);
    }
    Ok(report.case("nested").warn_all(precondition_warnings(f, a, b, &[2])))
}

/// Slope bounds for 3-convex `C¹` functions:
/// `f'(mid) <= (f(b) - f(a)) / (b - a) <= ((f'(a) + f'(b)) / 2 + f'(mid)) / 2`.
pub fn slope_bounds_check(f: &FunctionModel, a: f64, b: f64) -> Result<InequalityReport> {
    check_interval(f, a, b)?;
    let mid = f.eval(0.5 * (a + b), 1)?;
    let secant = (f.value(b)? - f.value(a)?) / (b - a);
    let upper = 0.5 * (0.5 * (f.eval(a, 1)? + f.eval(b, 1)?) + mid);
    let terms = vec![Term::new("midpoint slope <= secant", mid, secant), Term::new("secant <= averaged slopes", secant, upper)];
    Ok(InequalityReport::with_default_tol(terms)
        .witness("a", a)
        .witness("b", b)
        .witness("midpoint_slope", mid)
        .witness("secant", secant)
        .witness("averaged_slopes", upper)
        .case("slope")
        .warn_all(precondition_warnings(f, a, b, &[3])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_models::CatalogEntry;
    use core::f64::consts::{LN_2, PI};

    fn mono(d: u32) -> FunctionModel {
        FunctionModel::catalog(CatalogEntry::Monomial(d))
    }

    fn near(x: f64, y: f64, tol: f64) {
        assert!((x - y).abs() <= tol, "{x} vs {y}");
    }

    #[test]
    fn means() {
        near(integral_mean(&mono(2), 0.0, 1.0).unwrap(), 1.0 / 3.0, 1e-14);
        let log = FunctionModel::catalog(CatalogEntry::Log1p);
        near(integral_mean(&log, 0.0, 1.0).unwrap(), 2.0 * LN_2 - 1.0, 1e-12);
        near(integral_mean(&FunctionModel::polynomial(vec![2.5]), -3.0, 4.0).unwrap(), 2.5, 1e-14);
        assert!(matches!(integral_mean(&log, -2.0, 1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn classical() {
        let mu = DiscreteMeasure::uniform(&[0.0, 1.0]).unwrap();
        let r = hh_classical_check(&mono(2), &mu, 0.0, 1.0).unwrap();
        assert!(r.verdict);
        let t = &r.terms;
        near(t[0].lhs, 0.25, 1e-15);
        near(t[0].rhs, 0.5, 1e-15);
        near(t[1].rhs, 0.5, 1e-15);

        let affine = FunctionModel::polynomial(vec![1.0, -2.0]);
        let r = hh_classical_check(&affine, &DiscreteMeasure::uniform(&[0.2, 0.9]).unwrap(), 0.0, 1.0).unwrap();
        assert!(r.margin.abs() < 1e-14);

        let exp = FunctionModel::catalog(CatalogEntry::Exp);
        assert!(hh_classical_check(&exp, &DiscreteMeasure::uniform(&[0.0, 0.5, 1.0]).unwrap(), 0.0, 1.0).unwrap().verdict);
        assert!(matches!(
            hh_classical_check(&exp, &DiscreteMeasure::dirac(2.0), 0.0, 1.0),
            Err(Error::SupportMismatch { .. })
        ));
    }

    #[test]
    fn two_point_bounds() {
        let r = bp_bounds_check(&mono(2), 0.0, 1.0).unwrap();
        assert!(r.verdict);
        for t in &r.terms {
            assert!(t.margin.abs() < 1e-14);
        }
        let r = bp_bounds_check(&mono(4), 0.0, 1.0).unwrap();
        assert!(r.verdict && r.warnings.is_empty());
        near(r.witness["condensation"], 4.0 / 27.0, 1e-14);
        near(r.witness["mean"], 0.2, 1e-14);
        near(r.witness["dispersion"], 7.0 / 27.0, 1e-14);
        let r = bp_bounds_check(&mono(3), 0.0, 1.0).unwrap();
        near(r.witness["condensation"], 2.0 / 9.0, 1e-14);
        near(r.witness["mean"], 0.25, 1e-14);
        near(r.witness["dispersion"], 5.0 / 18.0, 1e-14);
        // 3-concave input fails and is flagged
        let r = bp_bounds_check(&mono(3).negate(), 0.0, 1.0).unwrap();
        assert!(!r.verdict && !r.warnings.is_empty());
    }

    #[test]
    fn chain() {
        let r = chain_check(&mono(4), 0.0, 1.0).unwrap();
        assert!(r.verdict);
        let expected = [1.0 / 16.0, 4.0 / 27.0, 0.2, 7.0 / 27.0, 0.5];
        let got = [
            r.witness["midpoint"],
            r.witness["condensation"],
            r.witness["mean"],
            r.witness["dispersion"],
            r.witness["endpoints"],
        ];
        for (g, e) in got.iter().zip(expected) {
            near(*g, e, 1e-14);
        }
        let r = chain_check(&FunctionModel::polynomial(vec![3.0, 1.0]), 0.0, 1.0).unwrap();
        assert!(r.terms.iter().all(|t| t.margin.abs() < 1e-14));
        let r = chain_check(&FunctionModel::catalog(CatalogEntry::Exp), 0.0, 1.0).unwrap();
        assert!(r.terms.iter().all(|t| t.margin > 1e-6));
    }

    #[test]
    fn weights_validate() {
        WeightSpec::Linear.validate(-1.0, 3.0).unwrap();
        WeightSpec::Power { n: 2 }.validate(-1.5, 1.5).unwrap();
        WeightSpec::Cosine.validate(0.0, PI).unwrap();
        assert!(matches!(WeightSpec::Power { n: 1 }.validate(0.0, 1.0), Err(Error::WeightSpec(_))));
        assert!(matches!(WeightSpec::Cosine.validate(0.0, 2.0 * PI), Err(Error::WeightSpec(_))));
        for (spec, a, b) in [(WeightSpec::Linear, -1.0, 3.0), (WeightSpec::Power { n: 3 }, -2.0, 2.0), (WeightSpec::Cosine, 0.0, PI)] {
            let q = integrate(|x| Ok(spec.primitive(a, b, x)), a, b, 1e-12).unwrap();
            near(q, spec.primitive_integral(a, b), 1e-10);
        }
    }

    #[test]
    fn weighted() {
        let r = weighted_3convex_check(&mono(3), WeightSpec::Linear, 0.0, 1.0).unwrap();
        assert!(r.verdict);
        near(r.terms[0].lhs, -0.25, 1e-14);
        near(r.witness["weighted"], -0.15, 1e-14);
        near(r.terms[1].rhs, -0.125, 1e-14);

        let r = weighted_3convex_check(&mono(2), WeightSpec::Linear, 0.0, 1.0).unwrap();
        for t in &r.terms {
            near(t.lhs, -1.0 / 6.0, 1e-14);
            near(t.rhs, -1.0 / 6.0, 1e-14);
        }
        let sinh = FunctionModel::catalog(CatalogEntry::Sinh);
        assert!(weighted_3convex_check(&sinh, WeightSpec::Cosine, 0.0, PI).unwrap().verdict);
        assert!(weighted_3convex_check(&FunctionModel::polynomial(vec![0.0, 0.0, 0.0, 0.0, 1.0]), WeightSpec::Power { n: 2 }, -1.0, 1.0).unwrap().verdict);
    }

    #[test]
    fn fejer() {
        let exp = FunctionModel::catalog(CatalogEntry::Exp);
        assert!(fejer_check(&exp, WeightSpec::Linear, -1.0, 2.0).unwrap().verdict);
        assert!(fejer_check(&mono(2), WeightSpec::Cosine, 0.0, PI).unwrap().verdict);
        // uniform-like symmetric density on an affine function: equalities
        let r = fejer_check(&FunctionModel::polynomial(vec![1.0, 1.0]), WeightSpec::Linear, 0.0, 1.0).unwrap();
        assert!(r.terms.iter().all(|t| t.margin.abs() < 1e-12));
        assert!(!fejer_check(&mono(2).negate(), WeightSpec::Linear, 0.0, 1.0).unwrap().verdict);
    }

    #[test]
    fn nested() {
        let r = nested_mean_checks(&mono(2), 0.0, 1.0, Some(0.25)).unwrap();
        assert!(r.verdict);
        let t = &r.terms[0];
        near(t.lhs, 13.0 / 48.0, 1e-14);
        near(t.rhs, 1.0 / 3.0, 1e-14);

        let r = nested_mean_checks(&FunctionModel::polynomial(vec![0.5, 2.0]), 0.0, 1.0, None).unwrap();
        assert_eq!(r.terms.len(), 8);
        assert!(r.terms.iter().all(|t| t.margin.abs() <= r.tol), "{:?}", r.terms);

        assert!(nested_mean_checks(&FunctionModel::catalog(CatalogEntry::Exp), 0.0, 1.0, Some(0.1)).unwrap().verdict);
        assert!(!nested_mean_checks(&mono(2).negate(), 0.0, 1.0, None).unwrap().verdict);
        assert!(matches!(nested_mean_checks(&mono(2), 0.0, 1.0, Some(0.5)), Err(Error::EpsilonRange { .. })));
        assert!(matches!(nested_mean_checks(&mono(2), 0.0, 1.0, Some(0.0)), Err(Error::EpsilonRange { .. })));
    }

    #[test]
    fn slopes() {
        let log = FunctionModel::catalog(CatalogEntry::Log1p);
        let r = slope_bounds_check(&log, 0.0, 1.0).unwrap();
        assert!(r.verdict);
        near(r.witness["midpoint_slope"], 2.0 / 3.0, 1e-12);
        near(r.witness["secant"], LN_2, 1e-12);
        near(r.witness["averaged_slopes"], 17.0 / 24.0, 1e-12);

        let q = FunctionModel::quadratic(0.3, -1.0, 2.0);
        let r = slope_bounds_check(&q, -1.0, 2.5).unwrap();
        assert!(r.terms[0].margin.abs() < 1e-12);

        let f = FunctionModel::combination(vec![
            (1.0 / 6.0, mono(3)),
            (-1.0, FunctionModel::catalog(CatalogEntry::Sin)),
        ]);
        let r = slope_bounds_check(&f, 0.0, PI / 2.0).unwrap();
        assert!(r.verdict && r.warnings.is_empty(), "{r:?}");
        assert!(bp_bounds_check(&f, 0.0, PI / 2.0).unwrap().verdict);
    }
}
