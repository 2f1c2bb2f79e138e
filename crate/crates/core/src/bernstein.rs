//! Bernstein polynomials on a compact interval and shape-preservation
//! diagnostics.
//!
//! Evaluation runs the de Casteljau recurrence on the node values
//! `f(a + i (b - a) / n)`, so no binomial coefficient is ever formed.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::divided_differences::{n_convexity_verdict, SampleGrid};
use crate::error::{Error, Result};
use crate::function_models::{FunctionModel, Interval};
use crate::report::{InequalityReport, Term};

/// Grid used by [`shape_preservation_report`].
pub const SHAPE_GRID_POINTS: usize = 41;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernsteinApproximant {
    /// `values[i] = f(a + i (b - a) / n)`
    values: Vec<f64>,
    a: f64,
    b: f64,
}

impl BernsteinApproximant {
    /// Degree-`n` approximant of `model` on `[a, b]`.
    pub fn new(model: &FunctionModel, n: usize, a: f64, b: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("Bernstein degree must be positive".into()));
        }
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!("bad interval [{a}, {b}]")));
        }
        let values = (0..=n)
            .map(|i| {
                let x = if i == n { b } else { a + (b - a) * i as f64 / n as f64 };
                model.value(x)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { values, a, b })
    }

    /// Degree-`n` approximant on the model's (bounded) domain.
    pub fn on_domain(model: &FunctionModel, n: usize) -> Result<Self> {
        let d = model.domain();
        if !d.is_bounded() {
            return Err(Error::InvalidParameter("Bernstein approximation needs a bounded domain".into()));
        }
        Self::new(model, n, d.lo, d.hi)
    }

    pub fn degree(&self) -> usize {
        self.values.len() - 1
    }

    pub fn interval(&self) -> Interval {
        Interval::new(self.a, self.b)
    }

    pub fn node_values(&self) -> &[f64] {
        &self.values
    }

    fn pullback(&self, x: f64) -> Result<f64> {
        if !self.interval().contains_approx(x) {
            return Err(Error::Domain { x, lo: self.a, hi: self.b });
        }
        Ok(((x - self.a) / (self.b - self.a)).clamp(0.0, 1.0))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let t = self.pullback(x)?;
        Ok(de_casteljau(&self.values, t))
    }

    /// First derivative: `n / (b - a) * sum_i (v_{i+1} - v_i) b_{n-1,i}(t)`.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        let t = self.pullback(x)?;
        let n = self.degree();
        let diffs: Vec<f64> = self.values.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(n as f64 / (self.b - self.a) * de_casteljau(&diffs, t))
    }
}

fn de_casteljau(coeffs: &[f64], t: f64) -> f64 {
    let mut work = coeffs.to_vec();
    let s = 1.0 - t;
    for level in (1..work.len()).rev() {
        for i in 0..level {
            work[i] = s * work[i] + t * work[i + 1];
        }
    }
    work[0]
}

/// `bernstein_eval` under the name used by callers that hold an approximant.
pub fn bernstein_eval(approx: &BernsteinApproximant, x: f64) -> Result<f64> {
    approx.eval(x)
}

/// Sup-norm distance `max |B_n(f) - f|` over `points` equally spaced nodes.
pub fn sup_distance(model: &FunctionModel, approx: &BernsteinApproximant, points: usize) -> Result<f64> {
    let mut worst = 0.0_f64;
    for x in approx.interval().linspace(points) {
        worst = worst.max((approx.eval(x)? - model.value(x)?).abs());
    }
    Ok(worst)
}

/// Sup-norm distance between derivatives over `points` nodes of `window`.
pub fn sup_derivative_distance(
    model: &FunctionModel,
    approx: &BernsteinApproximant,
    window: Interval,
    points: usize,
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for x in window.linspace(points) {
        worst = worst.max((approx.derivative(x)? - model.eval(x, 1)?).abs());
    }
    Ok(worst)
}

/// Order-`k` verdict of `B_n(f)` on a dense grid of the model's domain,
/// plus the grid sup-norm distance `||B_n(f) - f||` (witness key
/// `sup_distance`). Convergence is reported, not asserted.
pub fn shape_preservation_report(model: &FunctionModel, n: usize, k: usize) -> Result<InequalityReport> {
    if n < k {
        return Err(Error::InvalidParameter(alloc::format!("degree {n} is below the order {k}")));
    }
    let approx = BernsteinApproximant::on_domain(model, n)?;
    let xs = approx.interval().linspace(SHAPE_GRID_POINTS);
    let ys = xs.iter().map(|&x| approx.eval(x)).collect::<Result<Vec<_>>>()?;
    let grid = SampleGrid::new(xs, ys)?;
    let verdict = n_convexity_verdict(&grid, k, None)?;
    let distance = sup_distance(model, &approx, SHAPE_GRID_POINTS)?;
    let term = Term::new(alloc::format!("order-{k} divided differences of B_{n}(f) >= 0"), 0.0, verdict.margin);
    Ok(InequalityReport::from_terms(alloc::vec![term], verdict.tol)
        .witness("degree", n as f64)
        .witness("order", k as f64)
        .witness("window_start", verdict.witness_nodes[0])
        .witness("sup_distance", distance)
        .case("bernstein-shape"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_models::CatalogEntry;

    #[test]
    fn reproduces_affine_functions() {
        let f = FunctionModel::polynomial(alloc::vec![0.3, -1.7]);
        for n in [1, 2, 5, 40, 120] {
            let b = BernsteinApproximant::new(&f, n, -2.0, 3.0).unwrap();
            for x in [-2.0, -0.4, 1.1, 3.0] {
                assert!((b.eval(x).unwrap() - f.value(x).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn square_degree_two_at_half() {
        let f = FunctionModel::catalog(CatalogEntry::Monomial(2));
        let b = BernsteinApproximant::new(&f, 2, 0.0, 1.0).unwrap();
        assert!((b.eval(0.5).unwrap() - 0.375).abs() < 1e-15);
    }

    #[test]
    fn endpoint_interpolation() {
        let f = FunctionModel::catalog(CatalogEntry::Log1p);
        let b = BernsteinApproximant::new(&f, 17, 0.5, 4.0).unwrap();
        assert_eq!(b.eval(0.5).unwrap(), f.value(0.5).unwrap());
        assert!((b.eval(4.0).unwrap() - f.value(4.0).unwrap()).abs() < 1e-15);
        assert!(matches!(b.eval(4.5), Err(Error::Domain { .. })));
    }

    #[test]
    fn stable_at_high_degree() {
        let f = FunctionModel::catalog(CatalogEntry::Sin);
        let b = BernsteinApproximant::new(&f, 400, 0.0, 3.0).unwrap();
        let v = b.eval(1.3).unwrap();
        assert!(v.is_finite() && (v - libm::sin(1.3)).abs() < 1e-2);
    }

    #[test]
    fn derivative_of_square() {
        // B_n(x^2) = x^2 + x(1-x)/n on [0,1], derivative 2x + (1 - 2x)/n
        let f = FunctionModel::catalog(CatalogEntry::Monomial(2));
        let b = BernsteinApproximant::new(&f, 5, 0.0, 1.0).unwrap();
        let x = 0.3;
        assert!((b.derivative(x).unwrap() - (2.0 * x + (1.0 - 2.0 * x) / 5.0)).abs() < 1e-14);
    }

    #[test]
    fn shape_examples() {
        let log = FunctionModel::catalog_on(CatalogEntry::Log1p, Interval::new(0.0, 1.0)).unwrap();
        assert!(shape_preservation_report(&log, 16, 3).unwrap().verdict);

        let q = FunctionModel::quadratic(1.0, 2.0, -3.0).restrict(Interval::new(0.0, 1.0)).unwrap();
        let r = shape_preservation_report(&q, 16, 3).unwrap();
        assert!(r.verdict && r.margin.abs() <= r.tol);

        let quartic = FunctionModel::catalog_on(CatalogEntry::Monomial(4), Interval::new(0.0, 1.0)).unwrap();
        let mut last = f64::INFINITY;
        for n in [8, 16, 32] {
            let r = shape_preservation_report(&quartic, n, 3).unwrap();
            assert!(r.verdict);
            let d = r.witness["sup_distance"];
            assert!(d < last);
            last = d;
        }
    }
}
