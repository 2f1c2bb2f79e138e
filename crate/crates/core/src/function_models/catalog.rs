//! Named scalar functions with analytic derivatives where they are cheap.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::format;

use super::{Interval, Properties};
use crate::math::{cos, cosh, exp, exp_m1, ln, ln_1p, powf, powi, sin, sinh, sqrt};

#[derive(Debug, Clone, PartialEq)]
pub enum CatalogEntry {
    /// x/(x+1)
    XOverXPlus1,
    /// 1 - e^{-alpha x}, alpha > 0
    OneMinusExp { alpha: f64 },
    /// log(1+x)
    Log1p,
    /// -x log x, extended by 0 at x = 0
    NegXLogX,
    /// (x-1)/log x, extended by 1 at x = 1 and by 0 at x = 0
    XMinus1OverLogX,
    /// x^alpha on [0, inf)
    Pow { alpha: f64 },
    /// -x^2 + sqrt(x) on [0, 3/2]
    NegSqPlusSqrt,
    Sinh,
    Cosh,
    /// e^{-x}
    ExpNeg,
    /// 1/(1+x)
    InvOnePlusX,
    /// log(1+x)/x, extended by 1 at x = 0
    Log1pOverX,
    /// x^d
    Monomial(u32),
    Exp,
    Sin,
    /// sum_k coeffs[k] x^k
    Polynomial(Vec<f64>),
}

impl CatalogEntry {
    /// Looks an entry up by its JSON name.
    pub fn from_name(name: &str, alpha: Option<f64>, coeffs: Option<Vec<f64>>) -> Result<Self, String> {
        let need_alpha = |what: &str| {
            alpha.ok_or_else(|| format!("catalog entry `{what}` needs an alpha parameter"))
        };
        let entry = match name {
            "x_over_x_plus_1" => Self::XOverXPlus1,
            "one_minus_exp" => Self::OneMinusExp {
                alpha: alpha.unwrap_or(1.0),
            },
            "log1p" => Self::Log1p,
            "neg_x_log_x" => Self::NegXLogX,
            "x_minus_1_over_log_x" => Self::XMinus1OverLogX,
            "pow" => Self::Pow {
                alpha: need_alpha("pow")?,
            },
            "sqrt" => Self::Pow { alpha: 0.5 },
            "neg_sq_plus_sqrt" => Self::NegSqPlusSqrt,
            "sinh" => Self::Sinh,
            "cosh" => Self::Cosh,
            "exp_neg" => Self::ExpNeg,
            "inv_one_plus_x" => Self::InvOnePlusX,
            "log1p_over_x" => Self::Log1pOverX,
            "exp" => Self::Exp,
            "sin" => Self::Sin,
            "poly" => Self::Polynomial(
                coeffs.ok_or_else(|| "catalog entry `poly` needs a coeffs list".to_string())?,
            ),
            other => match other.strip_prefix('x').and_then(|d| d.parse::<u32>().ok()) {
                Some(d) => Self::Monomial(d),
                None => return Err(format!("unknown catalog entry `{other}`")),
            },
        };
        match entry {
            Self::OneMinusExp { alpha } | Self::Pow { alpha } if !(alpha > 0.0) => {
                Err(format!("alpha must be positive, got {alpha}"))
            }
            e => Ok(e),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::XOverXPlus1 => "x_over_x_plus_1".into(),
            Self::OneMinusExp { .. } => "one_minus_exp".into(),
            Self::Log1p => "log1p".into(),
            Self::NegXLogX => "neg_x_log_x".into(),
            Self::XMinus1OverLogX => "x_minus_1_over_log_x".into(),
            Self::Pow { .. } => "pow".into(),
            Self::NegSqPlusSqrt => "neg_sq_plus_sqrt".into(),
            Self::Sinh => "sinh".into(),
            Self::Cosh => "cosh".into(),
            Self::ExpNeg => "exp_neg".into(),
            Self::InvOnePlusX => "inv_one_plus_x".into(),
            Self::Log1pOverX => "log1p_over_x".into(),
            Self::Monomial(d) => format!("x{d}"),
            Self::Exp => "exp".into(),
            Self::Sin => "sin".into(),
            Self::Polynomial(_) => "poly".into(),
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            Self::OneMinusExp { alpha } | Self::Pow { alpha } => Some(*alpha),
            _ => None,
        }
    }

    pub fn default_domain(&self) -> Interval {
        match self {
            Self::NegSqPlusSqrt => Interval::new(0.0, 1.5),
            Self::Exp | Self::Sin | Self::Polynomial(_) => Interval::real_line(),
            Self::Monomial(d) if *d <= 3 => Interval::real_line(),
            _ => Interval::half_line(0.0),
        }
    }

    /// Shape flags that hold on [`Self::default_domain`].
    pub fn properties(&self) -> Properties {
        let bernstein = Properties {
            nonnegative: true,
            nondecreasing: true,
            concave: true,
            three_convex: true,
            bernstein: true,
            ..Properties::default()
        };
        let completely_monotone = Properties {
            nonnegative: true,
            nonincreasing: true,
            convex: true,
            three_concave: true,
            completely_monotone: true,
            ..Properties::default()
        };
        match self {
            Self::XOverXPlus1 | Self::Log1p | Self::XMinus1OverLogX | Self::OneMinusExp { .. } => {
                bernstein
            }
            Self::Pow { alpha } => {
                let a = *alpha;
                if a <= 1.0 {
                    bernstein
                } else {
                    Properties {
                        nonnegative: true,
                        nondecreasing: true,
                        convex: true,
                        three_convex: a >= 2.0,
                        three_concave: a <= 2.0,
                        ..Properties::default()
                    }
                }
            }
            Self::NegXLogX | Self::NegSqPlusSqrt => Properties {
                concave: true,
                three_convex: true,
                ..Properties::default()
            },
            Self::Sinh | Self::Cosh | Self::Exp => Properties {
                nonnegative: true,
                nondecreasing: true,
                convex: true,
                three_convex: true,
                ..Properties::default()
            },
            Self::ExpNeg | Self::InvOnePlusX | Self::Log1pOverX => completely_monotone,
            Self::Sin => Properties::default(),
            Self::Monomial(d) => match d {
                0 => Properties::affine(true),
                1 => Properties::affine(false),
                2 => Properties {
                    convex: true,
                    three_convex: true,
                    three_concave: true,
                    ..Properties::default()
                },
                3 => Properties {
                    nondecreasing: true,
                    three_convex: true,
                    ..Properties::default()
                },
                _ => Properties {
                    nonnegative: true,
                    nondecreasing: true,
                    convex: true,
                    three_convex: true,
                    ..Properties::default()
                },
            },
            Self::Polynomial(c) => {
                let degree = c.iter().rposition(|&v| v != 0.0).unwrap_or(0);
                match degree {
                    0 | 1 => Properties::affine(false),
                    2 => Properties {
                        convex: c[2] > 0.0,
                        concave: c[2] < 0.0,
                        three_convex: true,
                        three_concave: true,
                        ..Properties::default()
                    },
                    _ => Properties::default(),
                }
            }
        }
    }

    /// Analytic derivative of order `k`, or `None` when the entry has no
    /// closed form worth writing down (callers fall back to finite
    /// differences).
    pub(crate) fn eval(&self, x: f64, k: usize) -> Option<f64> {
        let v = match (self, k) {
            (Self::XOverXPlus1, 0) => x / (x + 1.0),
            (Self::XOverXPlus1, _) => {
                let u = 1.0 + x;
                match k {
                    1 => 1.0 / (u * u),
                    2 => -2.0 / (u * u * u),
                    _ => 6.0 / (u * u * u * u),
                }
            }
            (Self::OneMinusExp { alpha }, 0) => -exp_m1(-alpha * x),
            (Self::OneMinusExp { alpha }, _) => {
                let e = exp(-alpha * x);
                match k {
                    1 => alpha * e,
                    2 => -alpha * alpha * e,
                    _ => alpha * alpha * alpha * e,
                }
            }
            (Self::Log1p, 0) => ln_1p(x),
            (Self::Log1p, _) => {
                let u = 1.0 + x;
                match k {
                    1 => 1.0 / u,
                    2 => -1.0 / (u * u),
                    _ => 2.0 / (u * u * u),
                }
            }
            (Self::NegXLogX, 0) => {
                if x == 0.0 {
                    0.0
                } else {
                    -x * ln(x)
                }
            }
            (Self::NegXLogX, 1) => -ln(x) - 1.0,
            (Self::NegXLogX, 2) => -1.0 / x,
            (Self::NegXLogX, _) => 1.0 / (x * x),
            (Self::XMinus1OverLogX, 0) => {
                if x == 0.0 {
                    0.0
                } else if x == 1.0 {
                    1.0
                } else {
                    let u = x - 1.0;
                    u / ln_1p(u)
                }
            }
            (Self::XMinus1OverLogX, _) => return None,
            (Self::Pow { alpha }, _) => power_derivative(x, *alpha, k),
            (Self::NegSqPlusSqrt, 0) => -x * x + sqrt(x),
            (Self::NegSqPlusSqrt, 1) => -2.0 * x + 0.5 / sqrt(x),
            (Self::NegSqPlusSqrt, 2) => -2.0 - 0.25 * powf(x, -1.5),
            (Self::NegSqPlusSqrt, _) => 0.375 * powf(x, -2.5),
            (Self::Sinh, k) => {
                if k % 2 == 0 {
                    sinh(x)
                } else {
                    cosh(x)
                }
            }
            (Self::Cosh, k) => {
                if k % 2 == 0 {
                    cosh(x)
                } else {
                    sinh(x)
                }
            }
            (Self::ExpNeg, k) => {
                let e = exp(-x);
                if k % 2 == 0 {
                    e
                } else {
                    -e
                }
            }
            (Self::InvOnePlusX, _) => {
                let u = 1.0 + x;
                match k {
                    0 => 1.0 / u,
                    1 => -1.0 / (u * u),
                    2 => 2.0 / (u * u * u),
                    _ => -6.0 / (u * u * u * u),
                }
            }
            (Self::Log1pOverX, 0) => {
                if x == 0.0 {
                    1.0
                } else {
                    ln_1p(x) / x
                }
            }
            (Self::Log1pOverX, _) => return None,
            (Self::Monomial(d), _) => monomial_derivative(x, *d, k),
            (Self::Exp, _) => exp(x),
            (Self::Sin, _) => match k % 4 {
                0 => sin(x),
                1 => cos(x),
                2 => -sin(x),
                _ => -cos(x),
            },
            (Self::Polynomial(c), _) => polynomial_derivative(c, x, k),
        };
        Some(v)
    }
}

fn falling(p: f64, k: usize) -> f64 {
    (0..k).map(|i| p - i as f64).product()
}

fn power_derivative(x: f64, alpha: f64, k: usize) -> f64 {
    let coef = falling(alpha, k);
    if coef == 0.0 {
        return 0.0;
    }
    coef * powf(x, alpha - k as f64)
}

fn monomial_derivative(x: f64, d: u32, k: usize) -> f64 {
    if k as u32 > d {
        return 0.0;
    }
    falling(d as f64, k) * powi(x, (d as usize - k) as i32)
}

fn polynomial_derivative(coeffs: &[f64], x: f64, k: usize) -> f64 {
    // Horner on the k-th derivative coefficients
    let mut acc = 0.0;
    for (i, &c) in coeffs.iter().enumerate().skip(k).rev() {
        acc = acc * x + c * falling(i as f64, k);
    }
    acc
}
