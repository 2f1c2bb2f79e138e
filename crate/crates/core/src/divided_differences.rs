//! Divided differences, difference operators and n-convexity verdicts.
//!
//! The recursive (Newton table) evaluation is the primary path. The explicit
//! product formula `sum_j f(x_j) / prod_{k != j} (x_j - x_k)` is kept as a
//! diagnostic cross-check only: it loses accuracy on clustered nodes.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_models::{FunctionModel, Interval};
use crate::quadrature;
use crate::report::{InequalityReport, Term};

/// Relative node separation below which nodes count as coincident.
pub const GAP_MIN_REL: f64 = 1e-9;

/// Strictly increasing abscissae with their ordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    xs: Vec<f64>,
    ys: Vec<f64>,
    gap_min: f64,
}

impl SampleGrid {
    /// Validates with the default `gap_min = 1e-9 * (x_max - x_min)`.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let span = match (xs.first(), xs.last()) {
            (Some(a), Some(b)) => (b - a).abs(),
            _ => 0.0,
        };
        Self::with_gap_min(xs, ys, GAP_MIN_REL * span)
    }

    pub fn with_gap_min(xs: Vec<f64>, ys: Vec<f64>, gap_min: f64) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch { xs: xs.len(), ys: ys.len() });
        }
        if xs.is_empty() {
            return Err(Error::EmptyGrid);
        }
        for (i, w) in xs.windows(2).enumerate() {
            let gap = w[1] - w[0];
            if gap < 0.0 || gap.is_nan() {
                return Err(Error::Unsorted { index: i + 1 });
            }
            if gap < gap_min || gap == 0.0 {
                return Err(Error::CoincidentNodes { index: i + 1, gap, gap_min });
            }
        }
        Ok(Self { xs, ys, gap_min })
    }

    /// Samples `model` at the given abscissae.
    pub fn from_model(model: &FunctionModel, xs: Vec<f64>) -> Result<Self> {
        let ys = xs.iter().map(|&x| model.value(x)).collect::<Result<Vec<_>>>()?;
        Self::new(xs, ys)
    }

    /// Samples `model` on `points` equally spaced nodes of `interval`.
    pub fn sample(model: &FunctionModel, interval: Interval, points: usize) -> Result<Self> {
        Self::from_model(model, interval.linspace(points))
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn gap_min(&self) -> f64 {
        self.gap_min
    }

    /// Default verdict tolerance `1e-9 * (1 + max |y|)`.
    pub fn default_tol(&self) -> f64 {
        1e-9 * (1.0 + self.ys.iter().fold(0.0_f64, |m, y| m.max(y.abs())))
    }
}

/// `[x_0, ..., x_n; f]` of the whole grid.
pub fn divided_difference(grid: &SampleGrid) -> f64 {
    recursive(&grid.xs, &grid.ys)
}

/// Divided difference of arbitrarily ordered nodes; any two nodes closer
/// than `gap_min` are rejected.
pub fn divided_difference_nodes(xs: &[f64], ys: &[f64], gap_min: f64) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { xs: xs.len(), ys: ys.len() });
    }
    if xs.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    for (i, w) in sorted.windows(2).enumerate() {
        let gap = w[1] - w[0];
        if gap < gap_min || gap == 0.0 {
            return Err(Error::CoincidentNodes { index: i + 1, gap, gap_min });
        }
    }
    Ok(recursive(xs, ys))
}

fn recursive(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len();
    let mut col = ys.to_vec();
    for k in 1..n {
        for i in 0..n - k {
            col[i] = (col[i + 1] - col[i]) / (xs[i + k] - xs[i]);
        }
    }
    col[0]
}

/// Explicit product formula; diagnostic only.
pub fn divided_difference_product(xs: &[f64], ys: &[f64]) -> f64 {
    xs.iter()
        .zip(ys)
        .enumerate()
        .map(|(j, (&xj, &yj))| {
            let denom: f64 = xs
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &xk)| xj - xk)
                .product();
            yj / denom
        })
        .sum()
}

/// Triangular Newton table: `entries[k][i] = [x_i, ..., x_{i+k}; f]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DividedDiffTable {
    pub order: usize,
    pub entries: Vec<Vec<f64>>,
}

impl DividedDiffTable {
    pub fn get(&self, k: usize, i: usize) -> Option<f64> {
        self.entries.get(k).and_then(|row| row.get(i)).copied()
    }
}

pub fn build_table(grid: &SampleGrid, max_order: usize) -> Result<DividedDiffTable> {
    let n = grid.len();
    if max_order >= n {
        return Err(Error::OrderTooLarge { order: max_order, nodes: n });
    }
    let mut entries: Vec<Vec<f64>> = Vec::with_capacity(max_order + 1);
    entries.push(grid.ys.clone());
    for k in 1..=max_order {
        let prev = &entries[k - 1];
        let row = (0..n - k)
            .map(|i| (prev[i + 1] - prev[i]) / (grid.xs[i + k] - grid.xs[i]))
            .collect();
        entries.push(row);
    }
    Ok(DividedDiffTable { order: max_order, entries })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityVerdict {
    pub order: usize,
    pub holds: bool,
    /// Smallest order-n divided difference over consecutive windows.
    pub margin: f64,
    /// Index of the first node of the window attaining `margin`.
    pub witness_start: usize,
    pub witness_nodes: Vec<f64>,
    pub tol: f64,
}

/// n-convexity of sampled data: every order-`n` divided difference over
/// consecutive windows must be `>= -tol` (default `1e-9 * (1 + max |y|)`).
pub fn n_convexity_verdict(grid: &SampleGrid, n: usize, tol: Option<f64>) -> Result<ConvexityVerdict> {
    if grid.len() < n + 1 {
        return Err(Error::InsufficientNodes { order: n, needed: n + 1, have: grid.len() });
    }
    let tol = tol.unwrap_or_else(|| grid.default_tol());
    let table = build_table(grid, n)?;
    let (witness_start, margin) = table.entries[n]
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one window");
    Ok(ConvexityVerdict {
        order: n,
        holds: margin >= -tol,
        margin,
        witness_start,
        witness_nodes: grid.xs[witness_start..=witness_start + n].to_vec(),
        tol,
    })
}

/// Order-`n` verdict for `model` sampled on `points` nodes of `interval`.
pub fn model_verdict(model: &FunctionModel, interval: Interval, points: usize, n: usize) -> Result<ConvexityVerdict> {
    n_convexity_verdict(&SampleGrid::sample(model, interval, points)?, n, None)
}

/// `Delta_{h_1} ... Delta_{h_n} f(t)` through the signed sum over
/// `eps in {0,1}^n` of `f(t + eps . h)`.
pub fn iterated_difference(model: &FunctionModel, t: f64, steps: &[f64]) -> Result<f64> {
    if let Some(&h) = steps.iter().find(|h| !(**h >= 0.0)) {
        return Err(Error::InvalidParameter(alloc::format!("step {h} must be nonnegative")));
    }
    let reach = t + steps.iter().sum::<f64>();
    let d = model.domain();
    if !d.contains_approx(t) || !d.contains_approx(reach) {
        let x = if d.contains_approx(t) { reach } else { t };
        return Err(Error::Domain { x, lo: d.lo, hi: d.hi });
    }
    let n = steps.len();
    let mut acc = 0.0;
    for mask in 0u32..(1u32 << n) {
        let shift: f64 = (0..n).filter(|&i| mask & (1 << i) != 0).map(|i| steps[i]).sum();
        let v = model.value(t + shift)?;
        if (n as u32 - mask.count_ones()) % 2 == 0 {
            acc += v;
        } else {
            acc -= v;
        }
    }
    Ok(acc)
}

/// Sample points for the positive-differences check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPolicy {
    /// Points per axis of the deterministic lattice on `[0, A]`.
    pub lattice_points: usize,
    /// Extra uniform random points in the simplex `x+y+z+t <= A`.
    pub random_points: usize,
    pub seed: u64,
}

impl Default for SamplingPolicy {
    fn default() -> Self {
        Self { lattice_points: 12, random_points: 0, seed: 0 }
    }
}

fn third_difference_split(model: &FunctionModel, x: f64, y: f64, z: f64, t: f64) -> Result<(f64, f64)> {
    let f = |v: f64| model.value(v);
    let plus = f(x + t)? + f(y + t)? + f(z + t)? + f(x + y + z + t)?;
    let minus = f(x + y + t)? + f(y + z + t)? + f(z + x + t)? + f(t)?;
    Ok((minus, plus))
}

/// Checks `Delta_x Delta_y Delta_z f(t) >= -tol` over sampled
/// `x, y, z, t >= 0` with `x + y + z + t <= A`. The reported term is the
/// sample of least slack (`lhs` collects the negatively signed values).
pub fn positive_differences3_check(model: &FunctionModel, a: f64, policy: SamplingPolicy) -> Result<InequalityReport> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("A = {a} must be positive")));
    }
    let mut samples: Vec<[f64; 4]> = Vec::new();
    let m = policy.lattice_points.max(2);
    let step = a / (m - 1) as f64;
    for i in 0..m {
        for j in 0..m - i {
            for k in 0..m - i - j {
                for l in 0..m - i - j - k {
                    samples.push([i as f64 * step, j as f64 * step, k as f64 * step, l as f64 * step]);
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
    for _ in 0..policy.random_points {
        // uniform on the simplex via sorted uniforms
        let mut u = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
        u.sort_by(f64::total_cmp);
        samples.push([u[0] * a, (u[1] - u[0]) * a, (u[2] - u[1]) * a, (u[3] - u[2]) * a]);
    }
    let mut scale = 0.0_f64;
    let mut worst: Option<([f64; 4], Term)> = None;
    for s in samples {
        let [x, y, z, t] = s;
        let (minus, plus) = third_difference_split(model, x, y, z, t)?;
        scale = scale.max(minus.abs()).max(plus.abs());
        let term = Term::new("Delta_x Delta_y Delta_z f(t) >= 0", minus, plus);
        if worst.as_ref().map_or(true, |(_, w)| term.margin < w.margin) {
            worst = Some((s, term));
        }
    }
    let (s, term) = worst.expect("lattice is nonempty");
    Ok(InequalityReport::from_terms(alloc::vec![term], 1e-9 * (1.0 + scale))
        .witness("x", s[0])
        .witness("y", s[1])
        .witness("z", s[2])
        .witness("t", s[3]))
}

/// Checks `f(x+3h) - 3f(x+2h) + 3f(x+h) - f(x) >= -tol` over a lattice of
/// `x in [lo, hi)` and `h > 0` with `x + 3h <= hi`.
pub fn equidistant_differences3_check(model: &FunctionModel, interval: Interval, points: usize) -> Result<InequalityReport> {
    let m = points.max(4);
    let step = interval.width() / (m - 1) as f64;
    let mut scale = 0.0_f64;
    let mut worst: Option<(f64, f64, Term)> = None;
    for i in 0..m {
        let x = interval.lo + i as f64 * step;
        // h = j * step / 3 keeps x + 3h on the lattice
        for j in 1..m - i {
            let h = j as f64 * step / 3.0;
            let f = |v: f64| model.value(v);
            let plus = f(x + 3.0 * h)? + 3.0 * f(x + h)?;
            let minus = 3.0 * f(x + 2.0 * h)? + f(x)?;
            scale = scale.max(plus.abs()).max(minus.abs());
            let term = Term::new("Delta_h^3 f(x) >= 0", minus, plus);
            if worst.as_ref().map_or(true, |(_, _, w)| term.margin < w.margin) {
                worst = Some((x, h, term));
            }
        }
    }
    let (x, h, term) = worst.ok_or_else(|| Error::InvalidParameter("interval too small".into()))?;
    Ok(InequalityReport::from_terms(alloc::vec![term], 1e-9 * (1.0 + scale))
        .witness("x", x)
        .witness("h", h))
}

/// Convexity verdict of the derivative `f'` sampled on `points` nodes.
pub fn derivative_convexity_verdict(model: &FunctionModel, interval: Interval, points: usize) -> Result<ConvexityVerdict> {
    let xs = interval.linspace(points);
    let ys = xs.iter().map(|&x| model.eval(x, 1)).collect::<Result<Vec<_>>>()?;
    n_convexity_verdict(&SampleGrid::new(xs, ys)?, 2, None)
}

/// `|[a,b,c,d; f] - (three-term integral of f')|`.
///
/// The right-hand side weights `int_a^b f'`, `int_b^c f'`, `int_c^d f'` by
/// `1/((b-a)(c-a)(d-a))`, `-(c+d-a-b)/((c-a)(c-b)(d-a)(d-b))` and
/// `1/((d-a)(d-b)(d-c))`.
pub fn bennett_identity_residual(model: &FunctionModel, a: f64, b: f64, c: f64, d: f64) -> Result<f64> {
    if !(a < b && b < c && c < d) {
        return Err(Error::InvalidParameter(alloc::format!(
            "need a < b < c < d, got {a}, {b}, {c}, {d}"
        )));
    }
    let lhs = divided_difference_nodes(&[a, b, c, d], &[model.value(a)?, model.value(b)?, model.value(c)?, model.value(d)?], 0.0)?;
    let rhs = bennett_integral_form(model, a, b, c, d)?;
    Ok((lhs - rhs).abs())
}

/// Right-hand side of the identity alone.
pub fn bennett_integral_form(model: &FunctionModel, a: f64, b: f64, c: f64, d: f64) -> Result<f64> {
    let slope = |lo: f64, hi: f64| {
        let scale = 1.0 + model.value(lo)?.abs() + model.value(hi)?.abs();
        quadrature::integrate(|t| model.eval(t, 1), lo, hi, 1e-12 * scale)
    };
    let i1 = slope(a, b)?;
    let i2 = slope(b, c)?;
    let i3 = slope(c, d)?;
    Ok(i1 / ((b - a) * (c - a) * (d - a)) - (c + d - a - b) / ((c - a) * (c - b) * (d - a) * (d - b)) * i2
        + i3 / ((d - a) * (d - b) * (d - c)))
}
