use hiconvex_core::hornich_hlawka::hh_abs_check;
use hiconvex_core::matrix_ext::{exp_neg, matrix_function, matrix_hh_check, modulus, Square, SymmetricMatrix};
use hiconvex_core::{CatalogEntry, FunctionModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_orthogonal<R: Rng>(rng: &mut R, n: usize) -> Square {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    SymmetricMatrix::new(rows).unwrap().eigenvectors().clone()
}

fn random_psd<R: Rng>(rng: &mut R, n: usize) -> SymmetricMatrix {
    let q = random_orthogonal(rng, n);
    let d: Vec<f64> = (0..n).map(|i| if i == 0 { 0.0 } else { rng.gen_range(0.0..3.0) }).collect();
    SymmetricMatrix::from_spectral(&q, &d).unwrap()
}

fn models() -> Vec<FunctionModel> {
    vec![
        FunctionModel::catalog(CatalogEntry::Pow { alpha: 0.5 }),
        FunctionModel::catalog(CatalogEntry::Log1p),
        FunctionModel::catalog(CatalogEntry::Monomial(3)),
    ]
}

#[test]
fn diagonal_triples_reduce_to_scalar_checks() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for f in models() {
        for _ in 0..30 {
            let n = rng.gen_range(1..5);
            let diag: Vec<Vec<f64>> = (0..3).map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
            let [a, b, c] = [0, 1, 2].map(|k| SymmetricMatrix::from_diagonal(&diag[k]));
            let m = matrix_hh_check(&f, &a, &b, &c).unwrap();
            let scalar: Vec<_> = (0..n).map(|i| hh_abs_check(&f, diag[0][i], diag[1][i], diag[2][i], None).unwrap()).collect();
            assert_eq!(m.verdict, scalar.iter().all(|r| r.verdict));
            let worst = scalar.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
            let loewner = m.term("loewner").unwrap().margin;
            assert!((loewner - worst).abs() <= 1e-9, "{loewner} vs {worst}");
        }
    }
}

#[test]
fn matrix_functions_commute_with_conjugation() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let f = FunctionModel::catalog(CatalogEntry::Exp);
    for _ in 0..30 {
        let n = rng.gen_range(2..6);
        let a = SymmetricMatrix::new((0..n).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()).unwrap();
        let q = random_orthogonal(&mut rng, n);
        let conj = SymmetricMatrix::from_square(&a.conjugate_by(&q.transpose()).unwrap()).unwrap();
        let lhs = matrix_function(&f, &conj).unwrap();
        let rhs = matrix_function(&f, &a).unwrap().conjugate_by(&q.transpose()).unwrap();
        let err = lhs.as_square().sub(&rhs).unwrap().frobenius();
        assert!(err <= 1e-9 * (1.0 + rhs.frobenius()), "{err:e}");
    }
}

#[test]
fn modulus_squares_to_the_square() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let n = rng.gen_range(1..7);
        let a = SymmetricMatrix::new((0..n).map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect()).unwrap();
        let m = modulus(&a);
        let sq = a.as_square().mul(a.as_square()).unwrap();
        let msq = m.as_square().mul(m.as_square()).unwrap();
        assert!(msq.sub(&sq).unwrap().frobenius() <= 1e-9 * (1.0 + sq.frobenius()));
        assert!(m.min_eigenvalue() >= -1e-10);
    }
}

#[test]
fn commuting_psd_products_are_psd() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let n = rng.gen_range(1..6);
        let q = random_orthogonal(&mut rng, n);
        let da: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
        let db: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
        let a = SymmetricMatrix::from_spectral(&q, &da).unwrap();
        let b = SymmetricMatrix::from_spectral(&q, &db).unwrap();
        let p = SymmetricMatrix::from_square(&a.as_square().mul(b.as_square()).unwrap()).unwrap();
        assert!(p.min_eigenvalue() >= -1e-9);
    }
}

#[test]
fn negated_exponential_family_has_alternating_difference_signs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = 0.05;
    for _ in 0..20 {
        let n = rng.gen_range(1..6);
        let a = random_psd(&mut rng, n);
        for t in [0.1, 1.0, 5.0] {
            let f = |k: f64| exp_neg(&a, t + k * h).scale(-1.0);
            let d1 = f(1.0).sub(&f(0.0)).unwrap();
            let d2 = f(2.0).sub(&f(1.0).scale(2.0)).unwrap().add(&f(0.0)).unwrap();
            let d3 = f(3.0)
                .sub(&f(2.0).scale(3.0))
                .unwrap()
                .add(&f(1.0).scale(3.0))
                .unwrap()
                .sub(&f(0.0))
                .unwrap();
            let tol = 1e-8;
            assert!(d1.scale(1.0 / h).min_eigenvalue() >= -tol);
            assert!(d2.scale(-1.0 / (h * h)).min_eigenvalue() >= -tol);
            assert!(d3.scale(1.0 / (h * h * h)).min_eigenvalue() >= -tol);
        }
    }
}

#[test]
fn matrix_json_round_trips() {
    let a = SymmetricMatrix::new(vec![vec![1.0, 0.5], vec![0.5, 2.0]]).unwrap();
    let text = serde_json::to_string(&a).unwrap();
    assert_eq!(text, r#"{"n":2,"rows":[[1.0,0.5],[0.5,2.0]]}"#);
    assert_eq!(serde_json::from_str::<SymmetricMatrix>(&text).unwrap(), a);
}
