//! Real symmetric matrices: spectral factorization, matrix functions, the
//! Löwner order, simultaneous diagonalization of commuting families and the
//! matrix form of the Hornich-Hlawka inequality.
//!
//! Eigenpairs come from cyclic Jacobi rotation sweeps, computed once when a
//! [`SymmetricMatrix`] is built.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_models::FunctionModel;
use crate::math::{exp, hypot, sqrt};
use crate::report::{InequalityReport, Term};

/// Relative off-diagonal mass at which Jacobi sweeps stop.
pub const JACOBI_THRESHOLD: f64 = 1e-14;
pub const JACOBI_MAX_SWEEPS: usize = 64;
/// Default relative commutator tolerance.
pub const COMMUTE_TOL: f64 = 1e-9;
/// Relative off-diagonal mass accepted after simultaneous diagonalization.
pub const SIMDIAG_TOL: f64 = 1e-8;
const SIMDIAG_RETRIES: u64 = 8;
const SIMDIAG_SEED: u64 = 0x51d1a6;

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Square {
    n: usize,
    data: Vec<f64>,
}

impl Square {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch(n, r.len()));
            }
            if let Some(v) = r.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(format!("non-finite matrix entry {v}")));
            }
            data.extend_from_slice(r);
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn frobenius(&self) -> f64 {
        sqrt(self.data.iter().map(|a| a * a).sum())
    }

    /// Frobenius norm of the off-diagonal part.
    pub fn off_diagonal(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    acc += self.get(i, j) * self.get(i, j);
                }
            }
        }
        sqrt(acc)
    }
}

/// Cyclic Jacobi: returns `(Q, eigenvalues)` with `A = Q diag(λ) Qᵀ` and
/// eigenvalues ascending.
fn jacobi(a: &Square) -> Result<(Square, Vec<f64>)> {
    let n = a.n;
    let mut m = a.clone();
    let mut v = Square::identity(n);
    let scale = a.frobenius();
    let mut sweeps = 0;
    loop {
        let off = m.off_diagonal();
        if off <= JACOBI_THRESHOLD * scale || off == 0.0 {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNonconvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (m.get(q, q) - m.get(p, p)) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + hypot(theta, 1.0))
                };
                let c = 1.0 / hypot(t, 1.0);
                let s = t * c;
                for k in 0..n {
                    let (kp, kq) = (m.get(k, p), m.get(k, q));
                    m.set(k, p, c * kp - s * kq);
                    m.set(k, q, s * kp + c * kq);
                }
                for k in 0..n {
                    let (pk, qk) = (m.get(p, k), m.get(q, k));
                    m.set(p, k, c * pk - s * qk);
                    m.set(q, k, s * pk + c * qk);
                }
                m.set(p, q, 0.0);
                m.set(q, p, 0.0);
                for k in 0..n {
                    let (kp, kq) = (v.get(k, p), v.get(k, q));
                    v.set(k, p, c * kp - s * kq);
                    v.set(k, q, s * kp + c * kq);
                }
            }
        }
    }
    let diag: Vec<f64> = (0..n).map(|i| m.get(i, i)).collect();
    Ok(sorted_pairs(&v, &diag))
}

fn sorted_pairs(q: &Square, values: &[f64]) -> (Square, Vec<f64>) {
    let n = q.n;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut sorted_q = Square::zeros(n);
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            sorted_q.set(k, new, q.get(k, old));
        }
    }
    (sorted_q, order.iter().map(|&i| values[i]).collect())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawMatrix {
    n: usize,
    rows: Vec<Vec<f64>>,
}

/// Symmetric matrix with its spectral factorization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct SymmetricMatrix {
    entries: Square,
    q: Square,
    eigenvalues: Vec<f64>,
}

impl TryFrom<RawMatrix> for SymmetricMatrix {
    type Error = Error;

    fn try_from(raw: RawMatrix) -> Result<Self> {
        if raw.rows.len() != raw.n {
            return Err(Error::DimensionMismatch(raw.n, raw.rows.len()));
        }
        Self::new(raw.rows)
    }
}

impl From<SymmetricMatrix> for RawMatrix {
    fn from(m: SymmetricMatrix) -> Self {
        RawMatrix { n: m.n(), rows: m.entries.rows() }
    }
}

impl SymmetricMatrix {
    /// Symmetrizes `(M + Mᵀ) / 2` and factorizes.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_square(&Square::from_rows(&rows)?)
    }

    pub fn from_square(m: &Square) -> Result<Self> {
        let entries = m.add(&m.transpose())?.scale(0.5);
        let (q, eigenvalues) = jacobi(&entries)?;
        Ok(Self { entries, q, eigenvalues })
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut entries = Square::zeros(n);
        for (i, &v) in d.iter().enumerate() {
            entries.set(i, i, v);
        }
        let (q, eigenvalues) = sorted_pairs(&Square::identity(n), d);
        Self { entries, q, eigenvalues }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    /// `Q diag(values) Qᵀ` for orthogonal `Q`, keeping `Q` as the factor.
    pub fn from_spectral(q: &Square, values: &[f64]) -> Result<Self> {
        if q.n != values.len() {
            return Err(Error::DimensionMismatch(q.n, values.len()));
        }
        let n = q.n;
        let mut entries = Square::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v: f64 = (0..n).map(|k| q.get(i, k) * values[k] * q.get(j, k)).sum();
                entries.set(i, j, v);
                entries.set(j, i, v);
            }
        }
        let (q, eigenvalues) = sorted_pairs(q, values);
        Ok(Self { entries, q, eigenvalues })
    }

    pub fn n(&self) -> usize {
        self.entries.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries.get(i, j)
    }

    pub fn as_square(&self) -> &Square {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.rows()
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthogonal factor; column `j` pairs with `eigenvalues()[j]`.
    pub fn eigenvectors(&self) -> &Square {
        &self.q
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.frobenius()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::from_square(&self.entries.add(&other.entries)?)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Self::from_square(&self.entries.sub(&other.entries)?)
    }

    pub fn scale(&self, s: f64) -> Self {
        let values: Vec<f64> = self.eigenvalues.iter().map(|v| v * s).collect();
        let (q, eigenvalues) = sorted_pairs(&self.q, &values);
        Self { entries: self.entries.scale(s), q, eigenvalues }
    }

    /// `QᵀAQ` for an orthogonal `Q`.
    pub fn conjugate_by(&self, q: &Square) -> Result<Square> {
        q.transpose().mul(&self.entries)?.mul(q)
    }

    /// `||AB - BA||_F`.
    pub fn commutator_norm(&self, other: &Self) -> Result<f64> {
        let ab = self.entries.mul(&other.entries)?;
        let ba = other.entries.mul(&self.entries)?;
        Ok(ab.sub(&ba)?.frobenius())
    }

    /// `||Q Λ Qᵀ - A||_F`.
    pub fn factorization_residual(&self) -> f64 {
        let rebuilt = Self::from_spectral(&self.q, &self.eigenvalues).expect("dimensions agree");
        rebuilt.entries.sub(&self.entries).expect("dimensions agree").frobenius()
    }

    /// `||QᵀQ - I||_F`.
    pub fn orthogonality_defect(&self) -> f64 {
        let qtq = self.q.transpose().mul(&self.q).expect("square");
        qtq.sub(&Square::identity(self.n())).expect("square").frobenius()
    }

    fn map_spectrum(&self, mut g: impl FnMut(f64) -> Result<f64>) -> Result<Self> {
        let values = self.eigenvalues.iter().map(|&l| g(l)).collect::<Result<Vec<_>>>()?;
        Self::from_spectral(&self.q, &values)
    }
}

/// `(Q, Λ)` with `Λ` ascending.
pub fn spectral_factorize(a: &SymmetricMatrix) -> (Square, Vec<f64>) {
    (a.q.clone(), a.eigenvalues.clone())
}

/// `Q f(Λ) Qᵀ`.
pub fn matrix_function(f: &FunctionModel, a: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let d = f.domain();
    a.map_spectrum(|l| {
        if !d.contains_approx(l) {
            return Err(Error::EigenvalueDomain(l));
        }
        f.value(l)
    })
}

/// `|A| = (A²)^(1/2)`.
pub fn modulus(a: &SymmetricMatrix) -> SymmetricMatrix {
    a.map_spectrum(|l| Ok(l.abs())).expect("abs is total")
}

/// `exp(-tau A)`.
pub fn exp_neg(a: &SymmetricMatrix, tau: f64) -> SymmetricMatrix {
    a.map_spectrum(|l| Ok(exp(-tau * l))).expect("exp is total")
}

pub fn frobenius(a: &SymmetricMatrix) -> f64 {
    a.frobenius()
}

/// `A <= B` in the Löwner order: `λ_min(B - A) >= -tol (1 + ||B - A||_F)`.
pub fn loewner_leq(a: &SymmetricMatrix, b: &SymmetricMatrix, tol: f64) -> Result<bool> {
    let d = b.sub(a)?;
    Ok(d.min_eigenvalue() >= -tol * (1.0 + d.frobenius()))
}

fn check_commuting(family: &[SymmetricMatrix], tol: f64) -> Result<()> {
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            let norm = family[i].commutator_norm(&family[j])?;
            if norm > tol * (1.0 + family[i].frobenius()) * (1.0 + family[j].frobenius()) {
                return Err(Error::Noncommuting { i, j, norm });
            }
        }
    }
    Ok(())
}

fn worst_off_diagonal(family: &[SymmetricMatrix], q: &Square) -> Result<f64> {
    let mut worst = 0.0_f64;
    for a in family {
        worst = worst.max(a.conjugate_by(q)?.off_diagonal() / (1.0 + a.frobenius()));
    }
    Ok(worst)
}

/// One orthogonal `Q` with every `QᵀAᵢQ` diagonal, for a commuting family.
pub fn simultaneous_diagonalize(family: &[SymmetricMatrix], tol: f64) -> Result<Square> {
    simultaneous_diagonalize_seeded(family, tol, SIMDIAG_SEED)
}

/// As [`simultaneous_diagonalize`] with an explicit seed for the random
/// combinations.
///
/// Up to eight seeded random combinations `sum c_i A_i` are factorized. If
/// none separates the joint eigenspaces, the last factor is refined block
/// by block: each cluster of equal eigenvalues is rediagonalized against
/// each family member in turn.
pub fn simultaneous_diagonalize_seeded(family: &[SymmetricMatrix], tol: f64, seed: u64) -> Result<Square> {
    let n = match family.first() {
        Some(a) => a.n(),
        None => return Err(Error::InvalidParameter("empty matrix family".into())),
    };
    for a in family {
        if a.n() != n {
            return Err(Error::DimensionMismatch(n, a.n()));
        }
    }
    check_commuting(family, tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last: Option<(Square, Vec<f64>)> = None;
    for _ in 0..SIMDIAG_RETRIES {
        let mut combo = Square::zeros(n);
        for a in family {
            let c: f64 = rng.gen_range(-1.0..=1.0);
            combo = combo.add(&a.entries.scale(c / (1.0 + a.frobenius())))?;
        }
        let m = SymmetricMatrix::from_square(&combo)?;
        if worst_off_diagonal(family, &m.q)? <= SIMDIAG_TOL {
            return Ok(m.q);
        }
        last = Some((m.q, m.eigenvalues));
    }
    let (mut q, values) = last.expect("at least one retry");
    refine_blocks(family, &mut q, &values)?;
    let worst = worst_off_diagonal(family, &q)?;
    if worst > SIMDIAG_TOL {
        return Err(Error::DegeneracyUnresolved(worst));
    }
    Ok(q)
}

fn clusters(values: &[f64]) -> Vec<(usize, usize)> {
    let scale = 1.0 + values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > 1e-6 * scale {
            out.push((start, i));
            start = i;
        }
    }
    out
}

fn refine_blocks(family: &[SymmetricMatrix], q: &mut Square, values: &[f64]) -> Result<()> {
    let n = q.n;
    let mut blocks = clusters(values);
    for a in family {
        let mut next = Vec::new();
        for &(lo, hi) in &blocks {
            let k = hi - lo;
            if k == 1 {
                next.push((lo, hi));
                continue;
            }
            // restriction of A to the block's columns
            let mut sub = Square::zeros(k);
            for i in 0..k {
                for j in 0..k {
                    let mut acc = 0.0;
                    for r in 0..n {
                        for s in 0..n {
                            acc += q.get(r, lo + i) * a.get(r, s) * q.get(s, lo + j);
                        }
                    }
                    sub.set(i, j, acc);
                }
            }
            let inner = SymmetricMatrix::from_square(&sub)?;
            let mut rotated = vec![0.0; n * k];
            for r in 0..n {
                for j in 0..k {
                    rotated[r * k + j] = (0..k).map(|i| q.get(r, lo + i) * inner.q.get(i, j)).sum();
                }
            }
            for r in 0..n {
                for j in 0..k {
                    q.set(r, lo + j, rotated[r * k + j]);
                }
            }
            for (s, e) in clusters(&inner.eigenvalues) {
                next.push((lo + s, lo + e));
            }
        }
        blocks = next;
    }
    Ok(())
}

/// Matrix Hornich-Hlawka check for pairwise commuting `A, B, C`:
///
/// ```text
/// f(|A|) + f(|B|) + f(|C|) + f(|A+B+C|) >= f(|A+B|) + f(|B+C|) + f(|C+A|) + f(0) I
/// ```
///
/// in the Löwner order. The `loewner` term carries the least eigenvalue of
/// the difference of both sides; one further term per joint eigendirection
/// holds the scalar inequality for that direction's eigenvalue triple.
pub fn matrix_hh_check(
    f: &FunctionModel,
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    c: &SymmetricMatrix,
) -> Result<InequalityReport> {
    let family = [a.clone(), b.clone(), c.clone()];
    let q = simultaneous_diagonalize(&family, COMMUTE_TOL)?;
    let n = a.n();
    let ab = a.add(b)?;
    let bc = b.add(c)?;
    let ca = c.add(a)?;
    let abc = ab.add(c)?;
    let fm = |m: &SymmetricMatrix| matrix_function(f, &modulus(m));
    let left = fm(a)?.add(&fm(b)?)?.add(&fm(c)?)?.add(&fm(&abc)?)?;
    let right = fm(&ab)?
        .add(&fm(&bc)?)?
        .add(&fm(&ca)?)?
        .add(&SymmetricMatrix::identity(n).scale(f.value(0.0)?))?;
    let diff = left.sub(&right)?;

    let mut terms = Vec::with_capacity(n + 1);
    let mut witness = Vec::new();
    let f0 = f.value(0.0)?;
    for j in 0..n {
        let col = q.column(j);
        let rayleigh = |m: &SymmetricMatrix| -> f64 {
            (0..n).map(|r| col[r] * (0..n).map(|s| m.get(r, s) * col[s]).sum::<f64>()).sum()
        };
        let (x, y, z) = (rayleigh(a), rayleigh(b), rayleigh(c));
        let fa = |t: f64| f.value(t.abs());
        let lhs = fa(x)? + fa(y)? + fa(z)? + fa(x + y + z)?;
        let rhs = fa(x + y)? + fa(y + z)? + fa(z + x)? + f0;
        terms.push(Term::at_least(format!("direction {j}"), lhs, rhs));
        witness.push((j, x, y, z));
    }
    let scalar_tol = InequalityReport::default_tol(&terms);
    let tol = scalar_tol.max(1e-9 * (1.0 + left.frobenius().max(right.frobenius())));
    terms.push(Term::at_least("loewner", diff.min_eigenvalue(), 0.0));
    let mut report = InequalityReport::from_terms(terms, tol).case("matrix");
    for (j, x, y, z) in witness {
        report = report
            .witness(&format!("direction{j}_a"), x)
            .witness(&format!("direction{j}_b"), y)
            .witness(&format!("direction{j}_c"), z);
    }
    Ok(report.witness("loewner_min_eigenvalue", diff.min_eigenvalue()))
}

/// For positive semidefinite `A` and real `r, s, t`:
///
/// ```text
/// e^{-|r|A} + e^{-|s|A} + e^{-|t|A} + e^{-|r+s+t|A} <= I + e^{-|r+s|A} + e^{-|s+t|A} + e^{-|t+r|A}
/// ```
///
/// evaluated directly through the spectral factorization of `A`.
pub fn exp_family_check(a: &SymmetricMatrix, r: f64, s: f64, t: f64) -> Result<InequalityReport> {
    let psd_tol = 1e-10 * (1.0 + a.frobenius());
    if a.min_eigenvalue() < -psd_tol {
        return Err(Error::InvalidParameter(format!(
            "matrix is not positive semidefinite (least eigenvalue {:e})",
            a.min_eigenvalue()
        )));
    }
    let n = a.n();
    let e = |tau: f64| exp_neg(a, tau.abs());
    let left = e(r).add(&e(s))?.add(&e(t))?.add(&e(r + s + t))?;
    let right = SymmetricMatrix::identity(n).add(&e(r + s))?.add(&e(s + t))?.add(&e(t + r))?;
    let gap = right.sub(&left)?;
    let tol = 1e-9 * (1.0 + left.frobenius().max(right.frobenius()));
    Ok(InequalityReport::from_terms(vec![Term::at_least("loewner", gap.min_eigenvalue(), 0.0)], tol)
        .witness("r", r)
        .witness("s", s)
        .witness("t", t)
        .case("exp-family"))
}
