//! Hornich-Hlawka type functional inequalities.
//!
//! The basic form on nonnegative triples,
//!
//! ```text
//! f(x) + f(y) + f(z) + f(x+y+z) >= f(x+y) + f(y+z) + f(z+x) + f(0),
//! ```
//!
//! its absolute-value form on arbitrary real triples, three named special
//! forms, the n-variable generalisation with binomial weights, and a search
//! for both signs of the four-variable Freudenthal function.
//!
//! Reports use `>=` terms: `lhs` is the written left side.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::divided_differences::model_verdict;
use crate::error::{Error, Result};
use crate::function_models::{FunctionModel, Interval};
use crate::math::powf;
use crate::report::{InequalityReport, Term};

const PRECONDITION_POINTS: usize = 8;

/// Binomial coefficient `C(n, k)` as a float, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> f64 {
    crate::math::binomial(n, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    /// All entries nonnegative.
    Case1,
    /// `|z| >= x + y`.
    Case2a,
    /// `x <= |z| <= x + y`.
    Case2b,
    /// `y <= |z| <= x`.
    Case2c,
    /// `|z| <= y`.
    Case2d,
}

impl Case {
    pub const ALL: [Case; 5] = [Case::Case1, Case::Case2a, Case::Case2b, Case::Case2c, Case::Case2d];

    pub fn name(self) -> &'static str {
        match self {
            Case::Case1 => "1",
            Case::Case2a => "2a",
            Case::Case2b => "2b",
            Case::Case2c => "2c",
            Case::Case2d => "2d",
        }
    }

    /// Argument covering this case.
    pub fn argument(self) -> &'static str {
        match self {
            Case::Case1 => "positive third-order differences",
            Case::Case2a => "reduction to a nonnegative triple",
            Case::Case2b | Case::Case2c | Case::Case2d => "majorization with monotone concave f",
        }
    }
}

/// Case of a triple together with the canonicalising transformation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseLabel {
    pub case: Case,
    /// Whether all signs were flipped first.
    pub flipped: bool,
    /// `canonical[i] = ±input[permutation[i]]`.
    pub permutation: [usize; 3],
    /// `(x, y, z)` with `x >= y >= 0`, and `z <= 0` unless in case 1.
    pub canonical: [f64; 3],
}

/// Classifies a triple. After an optional global sign flip at most one
/// entry is negative; nonnegative entries are sorted descending and the
/// negative one, if any, goes last. Boundary ties resolve towards the
/// later case: 2d, then 2c, then 2b, then 2a.
pub fn classify_case(x: f64, y: f64, z: f64) -> CaseLabel {
    let input = [x, y, z];
    let negatives = input.iter().filter(|v| **v < 0.0).count();
    let positives = input.iter().filter(|v| **v > 0.0).count();
    let flipped = negatives >= 2 || (negatives == 1 && positives == 0);
    let s = if flipped { -1.0 } else { 1.0 };
    let v = input.map(|t| s * t);

    let mut perm = [0usize, 1, 2];
    // nonnegative entries first, descending; a negative entry sorts last
    perm.sort_by(|&i, &j| v[j].total_cmp(&v[i]));
    let canonical = perm.map(|i| v[i]);
    let [cx, cy, cz] = canonical;
    let case = if cz >= 0.0 {
        Case::Case1
    } else {
        let m = -cz;
        if m <= cy {
            Case::Case2d
        } else if m <= cx {
            Case::Case2c
        } else if m <= cx + cy {
            Case::Case2b
        } else {
            Case::Case2a
        }
    };
    CaseLabel { case, flipped, permutation: perm, canonical }
}

#[derive(Clone, Copy)]
enum Shape {
    Nondecreasing,
    Convex,
    Concave,
    ThreeConvex,
}

fn shape_warnings(f: &FunctionModel, hi: f64, shapes: &[Shape]) -> Vec<String> {
    if !(hi > 0.0) {
        return Vec::new();
    }
    shape_warnings_on(f, Interval::new(0.0, hi), shapes)
}

fn shape_warnings_on(f: &FunctionModel, span: Interval, shapes: &[Shape]) -> Vec<String> {
    let mut out = Vec::new();
    let negated = f.clone().negate();
    for shape in shapes {
        let (model, order, name) = match shape {
            Shape::Nondecreasing => (f, 1, "nondecreasing"),
            Shape::Convex => (f, 2, "convex"),
            Shape::Concave => (&negated, 2, "concave"),
            Shape::ThreeConvex => (f, 3, "3-convex"),
        };
        if let Ok(v) = model_verdict(model, span, PRECONDITION_POINTS, order) {
            if !v.holds {
                out.push(format!(
                    "precondition: function does not look {name} on [{}, {}] (order-{order} divided difference {:e})",
                    span.lo, span.hi, v.margin
                ));
            }
        }
    }
    out
}

/// Resolves `A` and checks that `[0, A]` lies in the domain and covers `need`.
fn resolve_bound(f: &FunctionModel, need: f64, a: Option<f64>) -> Result<f64> {
    let bound = a.unwrap_or(need);
    let d = f.domain();
    if !(bound >= 0.0) || !bound.is_finite() {
        return Err(Error::InvalidParameter(format!("bound A = {bound} must be finite and nonnegative")));
    }
    if need > bound * (1.0 + 1e-12) {
        return Err(Error::Domain { x: need, lo: 0.0, hi: bound });
    }
    for end in [0.0, bound] {
        if !d.contains_approx(end) {
            return Err(Error::Domain { x: end, lo: d.lo, hi: d.hi });
        }
    }
    Ok(bound)
}

/// Basic form on `x, y, z >= 0` with `x + y + z <= A` (default: the sum).
/// When `f(0) >= 0` the form without `f(0)` is checked as well.
pub fn hh_basic_check(f: &FunctionModel, x: f64, y: f64, z: f64, a: Option<f64>) -> Result<InequalityReport> {
    for v in [x, y, z] {
        if !(v >= 0.0) {
            return Err(Error::Domain { x: v, lo: 0.0, hi: f64::INFINITY });
        }
    }
    let bound = resolve_bound(f, x + y + z, a)?;
    let singles = f.value(x)? + f.value(y)? + f.value(z)? + f.value(x + y + z)?;
    let pairs = f.value(x + y)? + f.value(y + z)? + f.value(z + x)?;
    let f0 = f.value(0.0)?;
    let mut terms = vec![Term::at_least("basic", singles, pairs + f0)];
    if f0 >= 0.0 {
        terms.push(Term::at_least("basic without f(0)", singles, pairs));
    }
    Ok(InequalityReport::with_default_tol(terms)
        .witness("x", x)
        .witness("y", y)
        .witness("z", z)
        .witness("A", bound)
        .case("hh1")
        .warn_all(shape_warnings(f, bound, &[Shape::ThreeConvex])))
}

/// Absolute-value form for real `x, y, z` with `|x| + |y| + |z| <= A`.
///
/// The report carries the case label and the argument covering it. `f` is
/// expected to be nondecreasing, concave and 3-convex on `[0, A]`; each
/// property that fails a grid check yields a warning.
pub fn hh_abs_check(f: &FunctionModel, x: f64, y: f64, z: f64, a: Option<f64>) -> Result<InequalityReport> {
    let bound = resolve_bound(f, x.abs() + y.abs() + z.abs(), a)?;
    let fa = |t: f64| f.value(t.abs());
    let singles = fa(x)? + fa(y)? + fa(z)? + fa(x + y + z)?;
    let rhs = fa(x + y)? + fa(y + z)? + fa(z + x)? + f.value(0.0)?;
    let label = classify_case(x, y, z);
    Ok(InequalityReport::with_default_tol(vec![Term::at_least("absolute", singles, rhs)])
        .witness("x", x)
        .witness("y", y)
        .witness("z", z)
        .witness("A", bound)
        .case(format!("case {}", label.case.name()))
        .case(label.case.argument())
        .warn_all(shape_warnings(
            f,
            bound,
            &[Shape::Nondecreasing, Shape::Concave, Shape::ThreeConvex],
        )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpecialForm {
    /// `g(t) = t^α / (1 + t^α)` applied to absolute values, without `g(0)`.
    Rhh,
    /// Products of `1 + |·|`.
    Mhh,
    /// `|·|^α`.
    HhAlpha,
}

/// Evaluates a named special form at `(x, y, z)`; `alpha` must lie in
/// `(0, 1]` for the rational and power forms and is ignored otherwise.
pub fn special_form_check(form: SpecialForm, alpha: f64, x: f64, y: f64, z: f64) -> Result<InequalityReport> {
    if matches!(form, SpecialForm::Rhh | SpecialForm::HhAlpha) && !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::BadAlpha(alpha));
    }
    let left = [x, y, z, x + y + z].map(f64::abs);
    let right = [x + y, y + z, z + x].map(f64::abs);
    let (lhs, rhs, name) = match form {
        SpecialForm::Rhh => {
            let g = |t: f64| {
                let p = powf(t, alpha);
                p / (1.0 + p)
            };
            (left.iter().map(|&t| g(t)).sum(), right.iter().map(|&t| g(t)).sum(), "rhh")
        }
        SpecialForm::Mhh => (
            left.iter().map(|t| 1.0 + t).product(),
            right.iter().map(|t| 1.0 + t).product(),
            "mhh",
        ),
        SpecialForm::HhAlpha => (
            left.iter().map(|&t| powf(t, alpha)).sum(),
            right.iter().map(|&t| powf(t, alpha)).sum(),
            "hhalpha",
        ),
    };
    let mut report = InequalityReport::with_default_tol(vec![Term::at_least(name, lhs, rhs)])
        .witness("x", x)
        .witness("y", y)
        .witness("z", z);
    if !matches!(form, SpecialForm::Mhh) {
        report = report.witness("alpha", alpha);
    }
    let label = classify_case(x, y, z);
    Ok(report.case(name).case(format!("case {}", label.case.name())))
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx)?;
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return Ok(());
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// n-variable generalisation for `2 <= k < n`:
///
/// ```text
/// C(n-2, k-1) sum f(|x_i|) + C(n-2, k-2) f(|sum x_i|)
///     >= sum over k-subsets f(|sum of subset|) + C(n-1, k) f(0)
/// ```
pub fn va_generalized_check(f: &FunctionModel, xs: &[f64], k: usize) -> Result<InequalityReport> {
    let n = xs.len();
    if !(k >= 2 && k < n) {
        return Err(Error::SubsetSize { k, n });
    }
    let bound = resolve_bound(f, xs.iter().map(|x| x.abs()).sum(), None)?;
    let mut singles = 0.0;
    for &x in xs {
        singles += f.value(x.abs())?;
    }
    let total = f.value(xs.iter().sum::<f64>().abs())?;
    let mut subsets = 0.0;
    for_each_subset(n, k, |idx| {
        subsets += f.value(idx.iter().map(|&i| xs[i]).sum::<f64>().abs())?;
        Ok(())
    })?;
    let lhs = binomial(n - 2, k - 1) * singles + binomial(n - 2, k - 2) * total;
    let rhs = subsets + binomial(n - 1, k) * f.value(0.0)?;
    Ok(InequalityReport::with_default_tol(vec![Term::at_least("generalized", lhs, rhs)])
        .witness("n", n as f64)
        .witness("k", k as f64)
        .witness("A", bound)
        .case("va")
        .warn_all(shape_warnings(
            f,
            bound,
            &[Shape::Nondecreasing, Shape::Concave, Shape::ThreeConvex],
        )))
}

/// `sum |x_i| - sum |x_i + x_j| + sum |x_i + x_j + x_k| - |sum x_i|`.
pub fn freudenthal(x: [f64; 4]) -> f64 {
    let mut acc = 0.0;
    for mask in 1u32..16 {
        let s: f64 = (0..4).filter(|i| mask & (1 << i) != 0).map(|i| x[i]).sum();
        let sign = if mask.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
        acc += sign * s.abs();
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness4 {
    pub point: [f64; 4],
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreudenthalResult {
    /// Largest positive value found, if any.
    pub positive: Option<Witness4>,
    /// Most negative value found, if any.
    pub negative: Option<Witness4>,
    pub evaluated: u64,
    pub seed: u64,
}

/// Half-width of the integer lattice swept before the random trials.
pub const LATTICE_RADIUS: i32 = 4;

/// Sweeps the integer lattice `[-4, 4]^4`, then `trials` seeded uniform
/// points of `[-1, 1]^4`, keeping the extreme point of each sign.
pub fn freudenthal_search(seed: u64, trials: u64) -> Result<FreudenthalResult> {
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one random trial is required".into()));
    }
    let mut result = FreudenthalResult { positive: None, negative: None, evaluated: 0, seed };
    let record = |point: [f64; 4], result: &mut FreudenthalResult| {
        let value = freudenthal(point);
        result.evaluated += 1;
        if value > 0.0 && result.positive.map_or(true, |w| value > w.value) {
            result.positive = Some(Witness4 { point, value });
        }
        if value < 0.0 && result.negative.map_or(true, |w| value < w.value) {
            result.negative = Some(Witness4 { point, value });
        }
    };
    let r = LATTICE_RADIUS;
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                for d in -r..=r {
                    record([a as f64, b as f64, c as f64, d as f64], &mut result);
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let p = [(); 4].map(|_| rng.gen_range(-1.0..=1.0));
        record(p, &mut result);
    }
    Ok(result)
}

/// `g(c) + g(d) <= g(a) + g(b)` for convex `g` and `c, d` in `[a, b]` with
/// `a + b = c + d`.
pub fn majorization_check(g: &FunctionModel, a: f64, b: f64, c: f64, d: f64) -> Result<InequalityReport> {
    let scale = 1.0 + a.abs().max(b.abs());
    if !(a <= b) || ((a + b) - (c + d)).abs() > 1e-12 * scale {
        return Err(Error::InvalidParameter(format!("need a <= b and a + b = c + d, got {a}, {b}, {c}, {d}")));
    }
    for t in [c, d] {
        if t < a - 1e-12 * scale || t > b + 1e-12 * scale {
            return Err(Error::Domain { x: t, lo: a, hi: b });
        }
    }
    let inner = g.value(c)? + g.value(d)?;
    let outer = g.value(a)? + g.value(b)?;
    let mut report = InequalityReport::with_default_tol(vec![Term::new("majorization", inner, outer)]).case("majorization");
    if a < b {
        report = report.warn_all(shape_warnings_on(g, Interval::new(a, b), &[Shape::Convex]));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_models::CatalogEntry;
    use crate::math::sqrt;

    fn near(x: f64, y: f64) {
        assert!((x - y).abs() < 1e-12, "{x} vs {y}");
    }

    #[test]
    fn basic_examples() {
        let cube = FunctionModel::catalog(CatalogEntry::Monomial(3));
        let r = hh_basic_check(&cube, 1.0, 1.0, 1.0, None).unwrap();
        assert!(r.verdict);
        near(r.terms[0].lhs, 30.0);
        near(r.terms[0].rhs, 24.0);
        near(r.margin, 6.0);

        let sq = FunctionModel::quadratic(0.7, -1.3, 2.0);
        let r = hh_basic_check(&sq, 0.4, 2.0, 1.1, Some(5.0)).unwrap();
        assert!(r.terms[0].margin.abs() <= r.tol);

        let e = FunctionModel::catalog(CatalogEntry::ExpNeg);
        let r = hh_basic_check(&e, 1.0, 2.0, 3.0, None).unwrap();
        assert!(r.term("basic without f(0)").unwrap().margin > 0.0);

        assert!(matches!(hh_basic_check(&cube, -1.0, 1.0, 1.0, None), Err(Error::Domain { .. })));
        assert!(matches!(hh_basic_check(&cube, 1.0, 1.0, 1.0, Some(2.0)), Err(Error::Domain { .. })));
    }

    #[test]
    fn case_labels() {
        assert_eq!(classify_case(1.0, 2.0, 3.0).case, Case::Case1);
        assert_eq!(classify_case(0.0, 0.0, -1.0).case, Case::Case1);
        assert_eq!(classify_case(1.0, 1.0, -3.0).case, Case::Case2a);
        assert_eq!(classify_case(2.0, 1.0, -2.5).case, Case::Case2b);
        assert_eq!(classify_case(3.0, 1.0, -2.0).case, Case::Case2c);
        assert_eq!(classify_case(3.0, 2.0, -1.0).case, Case::Case2d);
        assert_eq!(classify_case(1.0, 1.0, -1.0).case, Case::Case2d);
        assert_eq!(classify_case(2.0, 1.0, -1.0).case, Case::Case2d);
        let l = classify_case(-1.0, 3.0, -2.0);
        assert!(l.flipped);
        assert_eq!(l.canonical, [2.0, 1.0, -3.0]);
        assert_eq!(l.case, Case::Case2b);
        assert_eq!(l.permutation, [2, 0, 1]);
    }

    #[test]
    fn absolute_examples() {
        let root = FunctionModel::catalog(CatalogEntry::Pow { alpha: 0.5 });
        let r = hh_abs_check(&root, 2.0, 1.0, -1.0, None).unwrap();
        assert!(r.verdict && r.warnings.is_empty());
        near(r.lhs, 2.0 * sqrt(2.0) + 2.0);
        near(r.rhs, sqrt(3.0) + 1.0);
        assert!(r.cases.iter().any(|c| c == "case 2d"));

        let cube = FunctionModel::catalog(CatalogEntry::Monomial(3));
        let r = hh_abs_check(&cube, 1.0, 1.0, -1.0, None).unwrap();
        assert!(!r.verdict);
        assert_eq!((r.lhs, r.rhs), (4.0, 8.0));
        assert!(r.cases.iter().any(|c| c == "case 2d"));
        assert!(r.warnings.iter().any(|w| w.contains("concave")));

        let r = hh_abs_check(&root, 0.0, 0.0, 0.0, None).unwrap();
        assert!(r.verdict && r.margin == 0.0);
    }

    #[test]
    fn special_forms() {
        let r = special_form_check(SpecialForm::Mhh, 0.0, 1.0, 1.0, -1.0).unwrap();
        assert_eq!((r.lhs, r.rhs), (16.0, 3.0));
        let r = special_form_check(SpecialForm::HhAlpha, 1.0, 1.0, 1.0, -1.0).unwrap();
        assert_eq!((r.lhs, r.rhs), (4.0, 2.0));
        let r = special_form_check(SpecialForm::Rhh, 1.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!((r.lhs, r.rhs, r.margin), (0.0, 0.0, 0.0));
        assert_eq!(special_form_check(SpecialForm::Rhh, 1.5, 0.0, 0.0, 0.0).unwrap_err(), Error::BadAlpha(1.5));
        assert_eq!(special_form_check(SpecialForm::HhAlpha, 0.0, 1.0, 0.0, 0.0).unwrap_err(), Error::BadAlpha(0.0));
    }

    #[test]
    fn generalized() {
        let root = FunctionModel::catalog(CatalogEntry::Pow { alpha: 0.5 });
        let r = va_generalized_check(&root, &[1.0, 1.0, 1.0, 1.0], 2).unwrap();
        near(r.lhs, 10.0);
        near(r.rhs, 6.0 * sqrt(2.0));
        // n = 3, k = 2 is the absolute form
        let log = FunctionModel::catalog(CatalogEntry::Log1p);
        let v = va_generalized_check(&log, &[0.7, -2.0, 1.1], 2).unwrap();
        let h = hh_abs_check(&log, 0.7, -2.0, 1.1, None).unwrap();
        near(v.margin, h.margin);
        assert_eq!(va_generalized_check(&log, &[1.0, 2.0, 3.0], 3).unwrap_err(), Error::SubsetSize { k: 3, n: 3 });
        assert_eq!(va_generalized_check(&log, &[1.0, 2.0, 3.0], 1).unwrap_err(), Error::SubsetSize { k: 1, n: 3 });
    }

    #[test]
    fn binomial_recurrence() {
        for n in 3..=12 {
            for k in 2..n {
                assert_eq!(binomial(n - 2, k - 1) + binomial(n - 2, k - 2), binomial(n - 1, k - 1));
            }
        }
    }

    #[test]
    fn subsets_enumerated() {
        let mut count = 0;
        for_each_subset(7, 3, |s| {
            assert!(s.windows(2).all(|w| w[0] < w[1]));
            count += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(count, 35);
    }

    #[test]
    fn freudenthal_signs() {
        assert_eq!(freudenthal([1.0, 1.0, 1.0, 1.0]), 0.0);
        assert_eq!(freudenthal([1.0, 1.0, 1.0, -1.0]), 2.0);
        assert_eq!(freudenthal([-4.0, 1.0, 1.0, 3.0]), -2.0);
        let r = freudenthal_search(11, 100).unwrap();
        let pos = r.positive.unwrap();
        let neg = r.negative.unwrap();
        assert!(pos.value > 0.0 && freudenthal(pos.point) == pos.value);
        assert!(neg.value < 0.0 && freudenthal(neg.point) == neg.value);
        assert_eq!(r.evaluated, 6561 + 100);
        assert_eq!(freudenthal_search(11, 100).unwrap(), r);
    }

    #[test]
    fn majorization() {
        let g = FunctionModel::catalog(CatalogEntry::Exp);
        assert!(majorization_check(&g, -1.0, 2.0, 0.2, 0.8).unwrap().verdict);
        assert!(!majorization_check(&g.clone().negate(), -1.0, 2.0, 0.2, 0.8).unwrap().verdict);
        assert!(majorization_check(&g, -1.0, 2.0, 0.2, 0.7).is_err());
    }
}
