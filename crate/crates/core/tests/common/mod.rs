#![allow(dead_code)]

use hiconvex_core::{CatalogEntry, FunctionModel, Interval};

pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry::XOverXPlus1,
        CatalogEntry::OneMinusExp { alpha: 1.0 },
        CatalogEntry::Log1p,
        CatalogEntry::NegXLogX,
        CatalogEntry::XMinus1OverLogX,
        CatalogEntry::Pow { alpha: 0.5 },
        CatalogEntry::Pow { alpha: 2.5 },
        CatalogEntry::NegSqPlusSqrt,
        CatalogEntry::Sinh,
        CatalogEntry::Cosh,
        CatalogEntry::ExpNeg,
        CatalogEntry::InvOnePlusX,
        CatalogEntry::Log1pOverX,
        CatalogEntry::Monomial(3),
        CatalogEntry::Monomial(4),
        CatalogEntry::Exp,
        CatalogEntry::Sin,
        CatalogEntry::Polynomial(vec![1.0, -2.0, 0.5, 0.25]),
    ]
}

/// Bounded test window inside each entry's domain.
pub fn window(entry: &CatalogEntry) -> Interval {
    let d = entry.default_domain();
    if d.is_bounded() {
        d
    } else if d.lo.is_finite() {
        Interval::new(0.0, 5.0)
    } else {
        Interval::new(-3.0, 3.0)
    }
}

pub fn windowed(entry: CatalogEntry) -> FunctionModel {
    let w = window(&entry);
    FunctionModel::catalog_on(entry, w).unwrap()
}

/// Catalog entries with a declared 3-convex shape, on their windows.
pub fn three_convex_catalog() -> Vec<FunctionModel> {
    catalog()
        .into_iter()
        .filter(|e| e.properties().three_convex)
        .map(windowed)
        .collect()
}

use hiconvex_core::ordering::{condensation_dispersion, DiscreteMeasure};
use rand::Rng;

fn random_measure<R: Rng>(rng: &mut R, atoms: usize, lo: f64, hi: f64) -> DiscreteMeasure {
    let xs: Vec<f64> = (0..atoms).map(|_| rng.gen_range(lo..hi)).collect();
    let ws: Vec<f64> = (0..atoms).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = ws.iter().sum();
    let mut pairs: Vec<(f64, f64)> = xs.into_iter().zip(ws.iter().map(|w| w / total)).collect();
    // absorb rounding in the last weight
    let sum: f64 = pairs.iter().map(|p| p.1).sum();
    pairs.last_mut().unwrap().1 += 1.0 - sum;
    DiscreteMeasure::new(pairs).unwrap()
}

/// Random pair of measures with at most 6 atoms each. Kinds cycle through
/// unrelated pairs, moment-matched perturbations along the third divided
/// difference functional (either sign), and condensation/dispersion
/// mixtures.
pub fn random_pair<R: Rng>(rng: &mut R, kind: usize) -> (DiscreteMeasure, DiscreteMeasure) {
    let lo = rng.gen_range(-3.0..1.0);
    let hi = lo + rng.gen_range(0.5..4.0);
    match kind % 4 {
        0 => {
            let (m, n) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
            (random_measure(rng, m, lo, hi), random_measure(rng, n, lo, hi))
        }
        1 | 2 => {
            let base = random_measure(rng, 4, lo, hi);
            let xs: Vec<f64> = base.atoms().iter().map(|a| a.x).collect();
            if xs.len() < 4 {
                return (base.clone(), base);
            }
            let c: Vec<f64> = (0..4)
                .map(|i| 1.0 / (0..4).filter(|&j| j != i).map(|j| xs[i] - xs[j]).product::<f64>())
                .collect();
            let room = (0..4).map(|i| base.atoms()[i].w / c[i].abs()).fold(f64::INFINITY, f64::min);
            let eps = rng.gen_range(0.1..0.9) * room * if kind % 4 == 1 { 1.0 } else { -1.0 };
            let extra = rng.gen_range(0..=2);
            let extra_x: Vec<f64> = (0..extra).map(|_| rng.gen_range(lo..hi)).collect();
            let share = 0.2;
            let mix = |weights: &dyn Fn(usize) -> f64| {
                let mut pairs: Vec<(f64, f64)> =
                    (0..4).map(|i| (xs[i], (1.0 - share * extra as f64 / 2.0) * weights(i))).collect();
                pairs.extend(extra_x.iter().map(|&x| (x, share / 2.0)));
                DiscreteMeasure::new(pairs).unwrap()
            };
            let nu = mix(&|i| base.atoms()[i].w);
            let mu = mix(&|i| base.atoms()[i].w + eps * c[i]);
            (nu, mu)
        }
        _ => {
            let (cond, disp) = condensation_dispersion(lo, hi).unwrap();
            let steps = [0.0, 0.25, 0.5, 0.75, 1.0];
            let p = steps[rng.gen_range(0..5)];
            let q = steps[rng.gen_range(0..5)];
            let blend = |s: f64| {
                let pairs = cond
                    .atoms()
                    .iter()
                    .map(|a| (a.x, s * a.w))
                    .chain(disp.atoms().iter().map(|a| (a.x, (1.0 - s) * a.w)))
                    .collect();
                DiscreteMeasure::new(pairs).unwrap()
            };
            (blend(p), blend(q))
        }
    }
}
