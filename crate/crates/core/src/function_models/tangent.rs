//! Tight tangent parabolas and the interpolating-quadratic sign pattern.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{linspace, FunctionModel, Side};
use crate::error::{Error, Result};
use crate::report::{InequalityReport, Term};

/// `value + slope (x - center) + curvature (x - center)^2 / 2`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parabola {
    pub center: f64,
    pub value: f64,
    pub slope: f64,
    pub curvature: f64,
    pub side: Side,
}

impl Parabola {
    pub fn eval(&self, x: f64) -> f64 {
        let d = x - self.center;
        self.value + d * (self.slope + 0.5 * d * self.curvature)
    }
}

const TANGENT_GRID: usize = 100;

/// Second-order tangent at `a` using the one-sided second derivative.
///
/// The right parabola must stay below the model on `[a, sup I]` and the
/// left parabola above it on `[inf I, a]`; both are checked on a 100-point
/// grid (unbounded domains are cut to a window of width 10) and a violation
/// beyond tolerance is reported as [`Error::Verification`].
pub fn tangent_parabola(model: &FunctionModel, a: f64, side: Side) -> Result<Parabola> {
    let d = model.domain();
    if !(a > d.lo && a < d.hi) {
        return Err(Error::Domain { x: a, lo: d.lo, hi: d.hi });
    }
    let parabola = Parabola {
        center: a,
        value: model.eval(a, 0)?,
        slope: model.eval(a, 1)?,
        curvature: model.second_derivative(a, side)?,
        side,
    };
    let (lo, hi) = match side {
        Side::Right => (a, if d.hi.is_finite() { d.hi } else { a + 10.0 }),
        Side::Left => (if d.lo.is_finite() { d.lo } else { a - 10.0 }, a),
    };
    let grid = linspace(lo, hi, TANGENT_GRID);
    let mut values = Vec::with_capacity(grid.len());
    for &x in &grid {
        values.push((x, model.value(x)?, parabola.eval(x)));
    }
    let scale = values.iter().map(|v| v.1.abs().max(v.2.abs())).fold(0.0, f64::max);
    let tol = 1e-9 * (1.0 + scale);
    for (x, f, p) in values {
        // right: p <= f, left: p >= f
        let slack = match side {
            Side::Right => f - p,
            Side::Left => p - f,
        };
        if slack < -tol {
            return Err(Error::Verification(format!(
                "{side:?} tangent parabola at {a} crosses the model at x = {x} (slack {slack:e})"
            )));
        }
    }
    Ok(parabola)
}

pub const BULLEN_POINTS_PER_SEGMENT: usize = 64;

/// Interpolates `f` at `alpha < beta < gamma` by a quadratic `Q` and checks
/// `Q >= f` on `[a, alpha]` and `[beta, gamma]`, `f >= Q` on `[alpha, beta]`
/// and `[gamma, b]`. One term per segment, at the grid point of least slack.
///
/// Witness keys `q0`, `q1`, `q2` hold `Q` in monomial form.
pub fn bullen_sign_pattern(
    model: &FunctionModel,
    a: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    b: f64,
) -> Result<InequalityReport> {
    if alpha == beta || beta == gamma || alpha == gamma {
        return Err(Error::DegenerateInterpolation);
    }
    if !(a < alpha && alpha < beta && beta < gamma && gamma < b) {
        return Err(Error::InvalidParameter(format!(
            "need a < alpha < beta < gamma < b, got {a}, {alpha}, {beta}, {gamma}, {b}"
        )));
    }
    let fa = model.value(alpha)?;
    let fb = model.value(beta)?;
    let fg = model.value(gamma)?;
    // Newton form: Q(t) = fa + d1 (t - alpha) + d2 (t - alpha)(t - beta)
    let d1 = (fb - fa) / (beta - alpha);
    let d2 = ((fg - fb) / (gamma - beta) - d1) / (gamma - alpha);
    let q = |t: f64| fa + (t - alpha) * (d1 + (t - beta) * d2);
    let q2 = d2;
    let q1 = d1 - d2 * (alpha + beta);
    let q0 = fa - d1 * alpha + d2 * alpha * beta;

    let segments = [
        ("Q >= f on [a, alpha]", a, alpha, true),
        ("f >= Q on [alpha, beta]", alpha, beta, false),
        ("Q >= f on [beta, gamma]", beta, gamma, true),
        ("f >= Q on [gamma, b]", gamma, b, false),
    ];
    let mut terms = Vec::with_capacity(4);
    let mut witness_points = Vec::with_capacity(4);
    for (label, lo, hi, q_above) in segments {
        let mut worst: Option<(f64, Term)> = None;
        for t in linspace(lo, hi, BULLEN_POINTS_PER_SEGMENT) {
            let f = model.value(t)?;
            let qt = q(t);
            let term = if q_above {
                Term::new(label, f, qt)
            } else {
                Term::new(label, qt, f)
            };
            if worst.as_ref().map_or(true, |(_, w)| term.margin < w.margin) {
                worst = Some((t, term));
            }
        }
        let (t, term) = worst.expect("segment grid is nonempty");
        witness_points.push(t);
        terms.push(term);
    }
    let mut report = InequalityReport::with_default_tol(terms)
        .witness("q0", q0)
        .witness("q1", q1)
        .witness("q2", q2);
    for (i, t) in witness_points.into_iter().enumerate() {
        report = report.witness(&format!("segment{}_t", i + 1), t);
    }
    Ok(report.case("bullen"))
}
