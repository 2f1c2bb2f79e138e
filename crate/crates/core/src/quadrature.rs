//! Adaptive Gauss-Kronrod quadrature on bounded intervals.
//!
//! Each panel is integrated with the 15-point Kronrod rule and its embedded
//! 7-point Gauss rule; `|K15 - G7|` is the panel error estimate. The panel
//! with the largest estimate is bisected until the summed estimate falls
//! under the absolute tolerance. Panels are never split below depth 40.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Default absolute tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Maximum bisection depth of a single panel.
pub const MAX_DEPTH: u32 = 40;
const MAX_PANELS: usize = 20_000;

// Kronrod abscissae on [0, 1] (symmetric), odd indices are Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

fn gauss_kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let sum = f(c - dx)? + f(c + dx)?;
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    Ok((kronrod * h, ((kronrod - gauss) * h).abs()))
}

/// `int_a^b f` to absolute accuracy `tol`. Requires `a <= b`, both finite.
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::InvalidParameter(alloc::format!(
            "integration bounds [{a}, {b}] must be finite and ordered"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    let (value, error) = gauss_kronrod(&mut f, a, b)?;
    let mut panels: Vec<Panel> = alloc::vec![Panel { a, b, value, error, depth: 0 }];
    loop {
        let total_err: f64 = panels.iter().map(|p| p.error).sum();
        let total: f64 = panels.iter().map(|p| p.value).sum();
        // below this the estimate is dominated by rounding in the rule itself
        let floor = 50.0 * f64::EPSILON * panels.iter().map(|p| p.value.abs()).sum::<f64>();
        if total_err <= tol.max(floor) {
            return Ok(total);
        }
        let (idx, worst) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, p)| (i, *p))
            .expect("at least one panel");
        if worst.depth >= MAX_DEPTH || panels.len() >= MAX_PANELS {
            return Err(Error::QuadratureNonconvergence { a, b, estimate: total_err });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le) = gauss_kronrod(&mut f, worst.a, mid)?;
        let (rv, re) = gauss_kronrod(&mut f, mid, worst.b)?;
        panels[idx] = Panel { a: worst.a, b: mid, value: lv, error: le, depth: worst.depth + 1 };
        panels.push(Panel { a: mid, b: worst.b, value: rv, error: re, depth: worst.depth + 1 });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let v = integrate(|x| Ok(x * x), 0.0, 1.0, DEFAULT_TOL).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        let v = integrate(|x| Ok(x.powi(9) - 3.0 * x), -1.0, 2.0, DEFAULT_TOL).unwrap();
        assert!((v - (1023.0 / 10.0 - 4.5)).abs() < 1e-12);
    }

    #[test]
    fn kink_and_endpoint_singularity() {
        let v = integrate(|x| Ok((x - 0.3).abs()), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-12);
        let v = integrate(|x| Ok(libm::sqrt(x)), 0.0, 1.0, 1e-10).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-10);
        let v = integrate(|x: f64| Ok(if x == 0.0 { 0.0 } else { -x * libm::log(x) }), 0.0, 1.0, 1e-10).unwrap();
        assert!((v - 0.25).abs() < 1e-10);
    }

    #[test]
    fn errors_propagate_and_nonconvergence_reported() {
        let e = integrate(|_| Err(Error::DegenerateInterpolation), 0.0, 1.0, 1e-10).unwrap_err();
        assert_eq!(e, Error::DegenerateInterpolation);
        // 1/x is not integrable at 0
        let e = integrate(|x| Ok(if x == 0.0 { 1e300 } else { 1.0 / x }), 0.0, 1.0, 1e-10).unwrap_err();
        assert!(matches!(e, Error::QuadratureNonconvergence { .. }));
    }

    #[test]
    fn empty_interval() {
        assert_eq!(integrate(|x| Ok(x), 2.0, 2.0, 1e-10).unwrap(), 0.0);
    }
}
