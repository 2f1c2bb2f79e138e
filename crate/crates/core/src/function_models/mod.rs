//! Evaluable scalar function models.
//!
//! A [`FunctionModel`] is either a named catalog entry, a building-block
//! model `c0 + c1 x + c2 x^2 + sum_i c_i ((x - a_i)_+)^2` with `c_i >= 0`,
//! a power `f^p` of another model, or a linear combination of models. Every
//! model carries a closed domain (possibly unbounded) and evaluates its
//! derivatives up to order three, analytically when a closed form exists and
//! by finite differences otherwise.

mod catalog;
mod spec;
mod tangent;

use alloc::boxed::Box;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{ln, pos_sq, powf};

pub use catalog::CatalogEntry;
pub use spec::{ComboTermSpec, KnotSpec, ModelSpec};
pub use tangent::{bullen_sign_pattern, tangent_parabola, Parabola, BULLEN_POINTS_PER_SEGMENT};

/// A closed interval; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub const fn half_line(lo: f64) -> Self {
        Self::new(lo, f64::INFINITY)
    }

    pub const fn real_line() -> Self {
        Self::new(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    fn slack(bound: f64) -> f64 {
        1e-12 * (1.0 + bound.abs())
    }

    /// Membership up to a relative rounding slack at each end.
    pub fn contains_approx(&self, x: f64) -> bool {
        x >= self.lo - Self::slack(self.lo) && x <= self.hi + Self::slack(self.hi)
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.contains_approx(other.lo) && self.contains_approx(other.hi)
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    /// A bounded sub-window: the interval itself when bounded, otherwise a
    /// window of the given width anchored at the finite end (or centred on
    /// zero for the real line).
    pub fn window(&self, width: f64) -> Interval {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => *self,
            (true, false) => Interval::new(self.lo, self.lo + width),
            (false, true) => Interval::new(self.hi - width, self.hi),
            (false, false) => Interval::new(-0.5 * width, 0.5 * width),
        }
    }

    /// `n >= 2` equally spaced points from `lo` to `hi` inclusive.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        linspace(self.lo, self.hi, n)
    }
}

pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// Declared shape flags. A flag that is `false` means "not asserted", not
/// "known to fail".
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Properties {
    pub nonnegative: bool,
    pub nondecreasing: bool,
    pub nonincreasing: bool,
    pub convex: bool,
    pub concave: bool,
    pub three_convex: bool,
    pub three_concave: bool,
    pub bernstein: bool,
    pub completely_monotone: bool,
}

impl Properties {
    pub(crate) fn affine(nonnegative: bool) -> Self {
        Self {
            nonnegative,
            convex: true,
            concave: true,
            three_convex: true,
            three_concave: true,
            ..Self::default()
        }
    }

    /// Nondecreasing, concave and 3-convex: the class covered by the
    /// absolute-value Hornich-Hlawka inequality.
    pub fn is_res_class(&self) -> bool {
        self.nondecreasing && self.concave && self.three_convex
    }

    fn negated(self) -> Self {
        Self {
            nonnegative: false,
            nondecreasing: self.nonincreasing,
            nonincreasing: self.nondecreasing,
            convex: self.concave,
            concave: self.convex,
            three_convex: self.three_concave,
            three_concave: self.three_convex,
            bernstein: false,
            completely_monotone: false,
        }
    }

    fn and(self, o: Self) -> Self {
        Self {
            nonnegative: self.nonnegative && o.nonnegative,
            nondecreasing: self.nondecreasing && o.nondecreasing,
            nonincreasing: self.nonincreasing && o.nonincreasing,
            convex: self.convex && o.convex,
            concave: self.concave && o.concave,
            three_convex: self.three_convex && o.three_convex,
            three_concave: self.three_concave && o.three_concave,
            bernstein: self.bernstein && o.bernstein,
            completely_monotone: self.completely_monotone && o.completely_monotone,
        }
    }
}

/// Which one-sided limit to take at a kink.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// One truncated-square building block `weight * ((x - at)_+)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knot {
    pub at: f64,
    pub weight: f64,
}

/// `c0 + c1 x + c2 x^2 + sum_i w_i ((x - a_i)_+)^2` with every `w_i >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockModel {
    quad: [f64; 3],
    knots: Vec<Knot>,
}

impl BlockModel {
    /// Knots are sorted by location; a negative weight is rejected.
    pub fn new(quad: [f64; 3], mut knots: Vec<Knot>) -> Result<Self> {
        if let Some(k) = knots.iter().find(|k| !(k.weight >= 0.0) || !k.at.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!(
                "knot at {} has weight {}; weights must be finite and nonnegative",
                k.at,
                k.weight
            )));
        }
        knots.sort_by(|a, b| a.at.total_cmp(&b.at));
        Ok(Self { quad, knots })
    }

    pub fn quad(&self) -> [f64; 3] {
        self.quad
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    fn eval(&self, x: f64, k: usize) -> f64 {
        let [c0, c1, c2] = self.quad;
        match k {
            0 => {
                c0 + x * (c1 + x * c2)
                    + self.knots.iter().map(|n| n.weight * pos_sq(x - n.at)).sum::<f64>()
            }
            1 => {
                c1 + 2.0 * c2 * x
                    + self
                        .knots
                        .iter()
                        .map(|n| 2.0 * n.weight * (x - n.at).max(0.0))
                        .sum::<f64>()
            }
            2 => self.second(x, Side::Right),
            _ => 0.0,
        }
    }

    fn second(&self, x: f64, side: Side) -> f64 {
        let active = |n: &&Knot| match side {
            Side::Right => n.at <= x,
            Side::Left => n.at < x,
        };
        2.0 * self.quad[2] + self.knots.iter().filter(active).map(|n| 2.0 * n.weight).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    Catalog(CatalogEntry),
    Blocks(BlockModel),
    /// `base^exponent`
    Power { base: Box<FunctionModel>, exponent: f64 },
    /// `sum coef * model`
    Combination(Vec<(f64, FunctionModel)>),
}

/// An evaluable scalar function on a closed interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelSpec", into = "ModelSpec")]
pub struct FunctionModel {
    kind: ModelKind,
    domain: Interval,
}

impl FunctionModel {
    pub fn catalog(entry: CatalogEntry) -> Self {
        let domain = entry.default_domain();
        Self {
            kind: ModelKind::Catalog(entry),
            domain,
        }
    }

    /// Catalog entry restricted to `domain`, which must lie inside the
    /// entry's natural domain.
    pub fn catalog_on(entry: CatalogEntry, domain: Interval) -> Result<Self> {
        Self::catalog(entry).restrict(domain)
    }

    pub fn blocks(model: BlockModel, domain: Interval) -> Self {
        Self {
            kind: ModelKind::Blocks(model),
            domain,
        }
    }

    /// Quadratic `c0 + c1 x + c2 x^2` on the real line.
    pub fn quadratic(c0: f64, c1: f64, c2: f64) -> Self {
        Self::catalog(CatalogEntry::Polynomial(alloc::vec![c0, c1, c2]))
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Self::catalog(CatalogEntry::Polynomial(coeffs))
    }

    /// `base^exponent`; the domain is inherited from `base`.
    pub fn power(base: FunctionModel, exponent: f64) -> Self {
        let domain = base.domain;
        Self {
            kind: ModelKind::Power {
                base: Box::new(base),
                exponent,
            },
            domain,
        }
    }

    /// `sum coef_i * model_i` on the intersection of the term domains.
    pub fn combination(terms: Vec<(f64, FunctionModel)>) -> Self {
        let domain = terms
            .iter()
            .fold(Interval::real_line(), |d, (_, m)| d.intersect(&m.domain));
        Self {
            kind: ModelKind::Combination(terms),
            domain,
        }
    }

    /// `-f`
    pub fn negate(self) -> Self {
        Self::combination(alloc::vec![(-1.0, self)])
    }

    pub fn restrict(mut self, domain: Interval) -> Result<Self> {
        if !(domain.lo < domain.hi) || !self.domain.contains_interval(&domain) {
            return Err(Error::InvalidParameter(alloc::format!(
                "domain [{}, {}] is not a nondegenerate subinterval of [{}, {}]",
                domain.lo,
                domain.hi,
                self.domain.lo,
                self.domain.hi
            )));
        }
        self.domain = domain;
        Ok(self)
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    /// Declared shape flags on the model's domain.
    pub fn properties(&self) -> Properties {
        match &self.kind {
            ModelKind::Catalog(e) => e.properties(),
            ModelKind::Blocks(b) => Properties {
                three_convex: true,
                three_concave: b.knots.iter().all(|k| k.weight == 0.0),
                convex: b.quad[2] >= 0.0,
                ..Properties::default()
            },
            ModelKind::Power { base, exponent } => {
                let p = base.properties();
                if p.nonnegative && p.is_res_class() && *exponent > 0.0 && *exponent <= 1.0 {
                    Properties {
                        nonnegative: true,
                        nondecreasing: true,
                        concave: true,
                        three_convex: true,
                        ..Properties::default()
                    }
                } else if *exponent == 1.0 {
                    p
                } else {
                    Properties::default()
                }
            }
            ModelKind::Combination(terms) => {
                let mut iter = terms.iter().map(|(c, m)| {
                    let p = m.properties();
                    if *c >= 0.0 {
                        p
                    } else {
                        p.negated()
                    }
                });
                match iter.next() {
                    Some(first) => iter.fold(first, Properties::and),
                    None => Properties::affine(true),
                }
            }
        }
    }

    fn check_domain(&self, x: f64) -> Result<f64> {
        if x.is_nan() || !self.domain.contains_approx(x) {
            return Err(Error::Domain {
                x,
                lo: self.domain.lo,
                hi: self.domain.hi,
            });
        }
        Ok(x.clamp(self.domain.lo, self.domain.hi))
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        self.eval(x, 0)
    }

    /// Derivative of order `order` (0 to 3) at `x`.
    ///
    /// Block models report the right-hand second derivative at a knot and a
    /// zero third derivative.
    pub fn eval(&self, x: f64, order: usize) -> Result<f64> {
        if order > 3 {
            return Err(Error::DerivativeOrder(order));
        }
        let x = self.check_domain(x)?;
        match self.analytic(x, order) {
            Some(v) => Ok(v),
            None => self.finite_difference(x, order),
        }
    }

    /// One-sided second derivative, exact at block-model knots.
    pub fn second_derivative(&self, x: f64, side: Side) -> Result<f64> {
        let x = self.check_domain(x)?;
        match &self.kind {
            ModelKind::Blocks(b) => Ok(b.second(x, side)),
            ModelKind::Combination(terms) => {
                let mut acc = 0.0;
                for (c, m) in terms {
                    acc += c * m.second_derivative(x, side)?;
                }
                Ok(acc)
            }
            ModelKind::Power { base, exponent } => {
                let p = *exponent;
                let f = base.eval(x, 0)?;
                let d1 = base.eval(x, 1)?;
                let d2 = base.second_derivative(x, side)?;
                Ok(p * (p - 1.0) * powf(f, p - 2.0) * d1 * d1 + p * powf(f, p - 1.0) * d2)
            }
            ModelKind::Catalog(_) => self.eval(x, 2),
        }
    }

    /// Analytic value without domain checks; `None` asks for finite
    /// differences.
    fn analytic(&self, x: f64, k: usize) -> Option<f64> {
        match &self.kind {
            ModelKind::Catalog(e) => e.eval(x, k),
            ModelKind::Blocks(b) => Some(b.eval(x, k)),
            ModelKind::Power { base, exponent } => {
                let p = *exponent;
                let f = base.analytic(x, 0)?;
                if k == 0 {
                    return Some(powf(f, p));
                }
                let d1 = base.analytic(x, 1)?;
                let v = match k {
                    1 => p * powf(f, p - 1.0) * d1,
                    2 => {
                        let d2 = base.analytic(x, 2)?;
                        p * (p - 1.0) * powf(f, p - 2.0) * d1 * d1 + p * powf(f, p - 1.0) * d2
                    }
                    _ => {
                        let d2 = base.analytic(x, 2)?;
                        let d3 = base.analytic(x, 3)?;
                        p * (p - 1.0) * (p - 2.0) * powf(f, p - 3.0) * d1 * d1 * d1
                            + 3.0 * p * (p - 1.0) * powf(f, p - 2.0) * d1 * d2
                            + p * powf(f, p - 1.0) * d3
                    }
                };
                Some(v)
            }
            ModelKind::Combination(terms) => {
                let mut acc = 0.0;
                for (c, m) in terms {
                    acc += c * m.analytic(x, k)?;
                }
                Some(acc)
            }
        }
    }

    fn value_unchecked(&self, x: f64) -> f64 {
        match self.analytic(x, 0) {
            Some(v) => v,
            // every kind has an analytic value
            None => f64::NAN,
        }
    }

    /// Central stencils in the interior, one-sided stencils near a finite
    /// endpoint. Step `h = eps^(1/(order+2)) * (1 + |x|)`.
    fn finite_difference(&self, x: f64, order: usize) -> Result<f64> {
        if order == 0 {
            return Ok(self.value_unchecked(x));
        }
        let h = powf(f64::EPSILON, 1.0 / (order as f64 + 2.0)) * (1.0 + x.abs());
        let f = |t: f64| self.value_unchecked(t);
        let d = self.domain;
        let central = d.contains(x - 2.0 * h) && d.contains(x + 2.0 * h);
        if central {
            return Ok(match order {
                1 => (f(x + h) - f(x - h)) / (2.0 * h),
                2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
                _ => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h),
            });
        }
        // forward when there is room to the right, otherwise backward
        let (s, sign) = if d.contains(x + 4.0 * h) { (h, 1.0) } else { (-h, -1.0) };
        if !d.contains(x + 4.0 * s) {
            return Err(Error::Domain {
                x: x + 4.0 * s,
                lo: d.lo,
                hi: d.hi,
            });
        }
        let p = |i: f64| f(x + i * s);
        let v = match order {
            1 => (-3.0 * p(0.0) + 4.0 * p(1.0) - p(2.0)) / (2.0 * h),
            2 => (2.0 * p(0.0) - 5.0 * p(1.0) + 4.0 * p(2.0) - p(3.0)) / (h * h),
            _ => (-5.0 * p(0.0) + 18.0 * p(1.0) - 24.0 * p(2.0) + 14.0 * p(3.0) - 3.0 * p(4.0)) / (2.0 * h * h * h),
        };
        // odd derivatives change sign under reflection
        Ok(if order % 2 == 1 { sign * v } else { v })
    }
}

/// Seeded random 3-convex building-block model on a bounded domain.
///
/// Knots are uniform in the middle 80% of the domain, knot weights are
/// exponential with unit mean and the quadratic coefficients are uniform in
/// `[-1, 1]`.
pub fn make_random_3convex(seed: u64, knot_count: usize, domain: Interval) -> Result<FunctionModel> {
    if !domain.is_bounded() || !(domain.lo < domain.hi) {
        return Err(Error::InvalidParameter(
            "random models need a bounded nondegenerate domain".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let quad = [
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(-1.0..=1.0),
    ];
    let inner_lo = domain.lo + 0.1 * domain.width();
    let inner_hi = domain.hi - 0.1 * domain.width();
    let knots = (0..knot_count)
        .map(|_| {
            let at = rng.gen_range(inner_lo..inner_hi);
            let u: f64 = rng.gen();
            Knot {
                at,
                weight: -ln(1.0 - u),
            }
        })
        .collect();
    Ok(FunctionModel::blocks(BlockModel::new(quad, knots)?, domain))
}
