//! The 3-convex order on finitely supported measures.
//!
//! `nu` precedes `mu` when `int f dnu <= int f dmu` for every 3-convex `f`.
//! The test family `{±1, ±x, ±x², ((x - t)₊)²}` spans that cone, so the
//! decision reduces to matching the first three moments and checking that
//!
//! ```text
//! g(t) = int ((x - t)₊)² d(mu - nu)(x)
//! ```
//!
//! is nonnegative. `g` is a C¹ piecewise quadratic with breakpoints at the
//! atoms, and each piece is minimised in closed form.
//!
//! [`oracle_check`] is an independent Monte Carlo cross-check over random
//! block models.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_models::{BlockModel, FunctionModel, Interval, Knot};
use crate::math::{pos_sq, powi};

/// Tolerance on `sum w = 1`.
pub const PROBABILITY_TOL: f64 = 1e-12;
/// Relative tolerance on moments and deficiencies.
pub const ORDER_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub w: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawMeasure {
    atoms: Vec<Atom>,
    #[serde(default, skip_serializing_if = "core::ops::Not::not")]
    signed: bool,
}

/// Finitely supported measure with sorted, distinct atoms and no zero
/// weights. Probability measures additionally have nonnegative weights
/// summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub struct DiscreteMeasure {
    atoms: Vec<Atom>,
    signed: bool,
}

impl TryFrom<RawMeasure> for DiscreteMeasure {
    type Error = Error;

    fn try_from(raw: RawMeasure) -> Result<Self> {
        let atoms = raw.atoms.into_iter().map(|a| (a.x, a.w)).collect();
        if raw.signed {
            Self::signed(atoms)
        } else {
            Self::new(atoms)
        }
    }
}

impl From<DiscreteMeasure> for RawMeasure {
    fn from(m: DiscreteMeasure) -> Self {
        RawMeasure { atoms: m.atoms, signed: m.signed }
    }
}

fn normalize(pairs: Vec<(f64, f64)>) -> Result<Vec<Atom>> {
    let mut atoms: Vec<Atom> = Vec::with_capacity(pairs.len());
    for (x, w) in pairs {
        if !x.is_finite() || !w.is_finite() {
            return Err(Error::NotProbability(alloc::format!("non-finite atom ({x}, {w})")));
        }
        atoms.push(Atom { x, w });
    }
    atoms.sort_by(|a, b| a.x.total_cmp(&b.x));
    let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match merged.last_mut() {
            Some(last) if last.x == a.x => last.w += a.w,
            _ => merged.push(a),
        }
    }
    merged.retain(|a| a.w != 0.0);
    Ok(merged)
}

impl DiscreteMeasure {
    /// Probability measure from `(location, weight)` pairs.
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        let atoms = normalize(pairs)?;
        if let Some(a) = atoms.iter().find(|a| a.w < 0.0) {
            return Err(Error::NotProbability(alloc::format!("negative weight {} at {}", a.w, a.x)));
        }
        let total: f64 = atoms.iter().map(|a| a.w).sum();
        if (total - 1.0).abs() > PROBABILITY_TOL {
            return Err(Error::NotProbability(alloc::format!("weights sum to {total}")));
        }
        Ok(Self { atoms, signed: false })
    }

    /// Signed measure; only finiteness is checked.
    pub fn signed(pairs: Vec<(f64, f64)>) -> Result<Self> {
        Ok(Self { atoms: normalize(pairs)?, signed: true })
    }

    pub fn dirac(p: f64) -> Self {
        Self { atoms: alloc::vec![Atom { x: p, w: 1.0 }], signed: false }
    }

    /// Equal weights on the given points.
    pub fn uniform(points: &[f64]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::NotProbability("no atoms".into()));
        }
        let w = 1.0 / points.len() as f64;
        Self::new(points.iter().map(|&x| (x, w)).collect())
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_probability(&self) -> bool {
        !self.signed
    }

    /// Smallest interval holding every atom.
    pub fn support_hull(&self) -> Option<Interval> {
        Some(Interval::new(self.atoms.first()?.x, self.atoms.last()?.x))
    }

    pub fn translate(&self, shift: f64) -> Self {
        Self {
            atoms: self.atoms.iter().map(|a| Atom { x: a.x + shift, w: a.w }).collect(),
            signed: self.signed,
        }
    }

    /// `mu - nu` as a signed measure.
    pub fn difference(mu: &Self, nu: &Self) -> Self {
        let pairs = mu
            .atoms
            .iter()
            .map(|a| (a.x, a.w))
            .chain(nu.atoms.iter().map(|a| (a.x, -a.w)))
            .collect();
        Self::signed(pairs).expect("atoms of valid measures are finite")
    }

    pub fn moment(&self, k: u32) -> f64 {
        self.atoms.iter().map(|a| a.w * powi(a.x, k as i32)).sum()
    }

    pub fn truncated_square_integral(&self, t: f64) -> f64 {
        self.atoms.iter().map(|a| a.w * pos_sq(a.x - t)).sum()
    }

    /// `int f dmu`.
    pub fn integrate(&self, f: &FunctionModel) -> Result<f64> {
        let mut acc = 0.0;
        for a in &self.atoms {
            acc += a.w * f.value(a.x)?;
        }
        Ok(acc)
    }
}

pub fn moment(mu: &DiscreteMeasure, k: u32) -> f64 {
    mu.moment(k)
}

pub fn truncated_square_integral(mu: &DiscreteMeasure, t: f64) -> f64 {
    mu.truncated_square_integral(t)
}

/// Barycenter of a probability measure.
pub fn barycenter(mu: &DiscreteMeasure) -> Result<f64> {
    if !mu.is_probability() {
        return Err(Error::NotProbability("signed measure has no barycenter".into()));
    }
    Ok(mu.moment(1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub holds: bool,
    /// First of the orders 0, 1, 2 whose moments differ.
    pub failing_moment: Option<u32>,
    /// Minimum of `g` over the interval.
    pub min_deficiency: f64,
    /// Location of that minimum.
    pub witness_knot: f64,
    pub tol: f64,
}

/// `nu ≺ mu` in the 3-convex order, over the hull of both supports.
pub fn precedes_3cvx(nu: &DiscreteMeasure, mu: &DiscreteMeasure) -> Result<OrderVerdict> {
    let (a, b) = match (nu.support_hull(), mu.support_hull()) {
        (Some(p), Some(q)) => (p.lo.min(q.lo), p.hi.max(q.hi)),
        (Some(p), None) | (None, Some(p)) => (p.lo, p.hi),
        (None, None) => (0.0, 0.0),
    };
    decide(nu, mu, a, b)
}

/// `nu ≺ mu` on `[a, b]`; both supports must lie inside.
pub fn precedes_3cvx_on(nu: &DiscreteMeasure, mu: &DiscreteMeasure, a: f64, b: f64) -> Result<OrderVerdict> {
    if !(a <= b) {
        return Err(Error::InvalidParameter(alloc::format!("empty interval [{a}, {b}]")));
    }
    for m in [nu, mu] {
        if let Some(h) = m.support_hull() {
            if h.lo < a || h.hi > b {
                return Err(Error::SupportMismatch { lo: h.lo, hi: h.hi, a, b });
            }
        }
    }
    decide(nu, mu, a, b)
}

fn decide(nu: &DiscreteMeasure, mu: &DiscreteMeasure, a: f64, b: f64) -> Result<OrderVerdict> {
    for m in [nu, mu] {
        if !m.is_probability() {
            return Err(Error::NotProbability("the 3-convex order compares probability measures".into()));
        }
    }
    let failing_moment = (0..3).find(|&k| {
        let target = mu.moment(k);
        (nu.moment(k) - target).abs() > ORDER_REL_TOL * (1.0 + target.abs())
    });

    let diff = DiscreteMeasure::difference(mu, nu);
    let (min_deficiency, witness_knot) = minimize_deficiency(&diff, a, b);
    let spread = diff.atoms.iter().map(|at| pos_sq(at.x - a)).fold(0.0, f64::max);
    let tol = ORDER_REL_TOL * (1.0 + spread);
    Ok(OrderVerdict {
        holds: failing_moment.is_none() && min_deficiency >= -tol,
        failing_moment,
        min_deficiency,
        witness_knot,
        tol,
    })
}

/// One piece of `g(t) = sum s_i ((x_i - t)₊)²` on `[lo, hi]`, where the
/// active set `{x_i > t}` is fixed and `g(t) = A t² - 2 B t + C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeficiencyPiece {
    pub lo: f64,
    pub hi: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl DeficiencyPiece {
    pub fn eval(&self, t: f64) -> f64 {
        (self.a * t - 2.0 * self.b) * t + self.c
    }
}

/// Pieces of `g` for the signed measure `diff` over `[a, b]`, split at
/// every atom inside.
pub fn deficiency_pieces(diff: &DiscreteMeasure, a: f64, b: f64) -> Vec<DeficiencyPiece> {
    let mut breaks: Vec<f64> = diff.atoms.iter().map(|at| at.x).filter(|&x| x > a && x < b).collect();
    breaks.insert(0, a);
    breaks.push(b);
    breaks
        .windows(2)
        .map(|w| {
            let (mut pa, mut pb, mut pc) = (0.0, 0.0, 0.0);
            for at in diff.atoms.iter().filter(|at| at.x > w[0]) {
                pa += at.w;
                pb += at.w * at.x;
                pc += at.w * at.x * at.x;
            }
            DeficiencyPiece { lo: w[0], hi: w[1], a: pa, b: pb, c: pc }
        })
        .collect()
}

/// Exact minimum of `g` over `[a, b]`: per piece, the ends and the vertex
/// `B / A` when `A > 0`. Values are taken from the direct sum, not the
/// expanded quadratic, to avoid cancellation.
fn minimize_deficiency(diff: &DiscreteMeasure, a: f64, b: f64) -> (f64, f64) {
    let mut best = (diff.truncated_square_integral(a), a);
    let mut consider = |t: f64| {
        let g = diff.truncated_square_integral(t);
        if g < best.0 {
            best = (g, t);
        }
    };
    for piece in deficiency_pieces(diff, a, b) {
        consider(piece.hi);
        if piece.a > 0.0 {
            let vertex = piece.b / piece.a;
            if vertex > piece.lo && vertex < piece.hi {
                consider(vertex);
            }
        }
    }
    best
}

/// `(1/4 δ_a + 3/4 δ_{(a+2b)/3}, 3/4 δ_{(2a+b)/3} + 1/4 δ_b)`.
pub fn condensation_dispersion(a: f64, b: f64) -> Result<(DiscreteMeasure, DiscreteMeasure)> {
    if !(a < b) {
        return Err(Error::InvalidParameter(alloc::format!("need a < b, got [{a}, {b}]")));
    }
    let condensation = DiscreteMeasure::new(alloc::vec![(a, 0.25), ((a + 2.0 * b) / 3.0, 0.75)])?;
    let dispersion = DiscreteMeasure::new(alloc::vec![((2.0 * a + b) / 3.0, 0.75), (b, 0.25)])?;
    Ok((condensation, dispersion))
}

/// The `index`-th oracle test function on `[a, b]`: a random quadratic with
/// coefficients in `[-1, 1]` plus one to three blocks `c ((x - k)₊)²` with
/// knots anywhere in `[a, b]`. Deterministic in `(seed, index)`.
pub fn oracle_model(seed: u64, index: u64, a: f64, b: f64) -> Result<FunctionModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let quad = [rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)];
    let count = 1 + (index % 3) as usize;
    let knots = (0..count)
        .map(|_| Knot { at: rng.gen_range(a..=b), weight: rng.gen_range(0.0..=2.0) })
        .collect();
    Ok(FunctionModel::blocks(BlockModel::new(quad, knots)?, Interval::new(a, b)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub holds: bool,
    pub models_checked: u64,
    /// Smallest `int f dmu - int f dnu` seen.
    pub min_gap: f64,
    /// Index of the model attaining `min_gap`.
    pub witness_index: Option<u64>,
    pub failing_moment: Option<u32>,
    pub reason: String,
}

/// Signed gap `int f dmu - int f dnu` and its tolerance for one oracle model.
pub fn oracle_gap(nu: &DiscreteMeasure, mu: &DiscreteMeasure, model: &FunctionModel) -> Result<(f64, f64)> {
    let lhs = nu.integrate(model)?;
    let rhs = mu.integrate(model)?;
    Ok((rhs - lhs, ORDER_REL_TOL * (1.0 + lhs.abs().max(rhs.abs()))))
}

/// Serial Monte Carlo oracle over models `0..count` on `[a, b]`.
pub fn oracle_check(
    nu: &DiscreteMeasure,
    mu: &DiscreteMeasure,
    a: f64,
    b: f64,
    seed: u64,
    count: u64,
) -> Result<OracleVerdict> {
    let mut gaps = Vec::with_capacity(count as usize);
    for i in 0..count {
        let model = oracle_model(seed, i, a, b)?;
        gaps.push((i, oracle_gap(nu, mu, &model)?));
    }
    Ok(oracle_summary(nu, mu, gaps))
}

/// Folds per-model `(index, (gap, tol))` results into a verdict. Shared by
/// serial and parallel drivers.
pub fn oracle_summary(nu: &DiscreteMeasure, mu: &DiscreteMeasure, gaps: Vec<(u64, (f64, f64))>) -> OracleVerdict {
    let failing_moment = (0..3).find(|&k| {
        let target = mu.moment(k);
        (nu.moment(k) - target).abs() > ORDER_REL_TOL * (1.0 + target.abs())
    });
    let models_checked = gaps.len() as u64;
    let mut min_gap = f64::INFINITY;
    let mut witness_index = None;
    let mut violated = false;
    for (i, (gap, tol)) in gaps {
        if gap < min_gap {
            min_gap = gap;
            witness_index = Some(i);
        }
        violated |= gap < -tol;
    }
    let reason = match (failing_moment, violated) {
        (Some(k), _) => alloc::format!("moment {k} differs"),
        (None, true) => "a sampled model separates the measures".into(),
        (None, false) => "no sampled model separates the measures".into(),
    };
    OracleVerdict {
        holds: failing_moment.is_none() && !violated,
        models_checked,
        min_gap,
        witness_index,
        failing_moment,
        reason,
    }
}
