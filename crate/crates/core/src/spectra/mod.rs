//! Dense eigenvalue computation, Perron-root extraction and tolerant
//! comparison of eigenvalue multisets.

mod qr;
mod subspace;

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

pub use subspace::{dominant_eigenvalues, SubspaceOptions};

/// Default relative tolerance used across the crate.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Multiset of complex eigenvalues, sorted by modulus descending and then by
/// argument ascending in (-pi, pi].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexSpectrum {
    #[serde(with = "crate::cx::vec")]
    values: Vec<Complex64>,
}

fn canonical_arg(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a <= -PI {
        PI
    } else {
        a
    }
}

fn spectral_order(a: &Complex64, b: &Complex64) -> Ordering {
    b.norm()
        .total_cmp(&a.norm())
        .then_with(|| canonical_arg(*a).total_cmp(&canonical_arg(*b)))
        .then_with(|| a.re.total_cmp(&b.re))
        .then_with(|| a.im.total_cmp(&b.im))
}

impl ComplexSpectrum {
    pub fn new(values: Vec<Complex64>) -> Self {
        let mut values: Vec<Complex64> = values
            .into_iter()
            // drop signed zeros so ordering does not depend on them
            .map(|z| Complex64::new(z.re + 0.0, z.im + 0.0))
            .collect();
        values.sort_by(spectral_order);
        ComplexSpectrum { values }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> Complex64 {
        self.values.iter().sum()
    }

    pub fn product(&self) -> Complex64 {
        self.values.iter().product()
    }

    /// All products `v[i] * v[j]` with `i < j`.
    pub fn pair_products(&self) -> ComplexSpectrum {
        let v = &self.values;
        let mut out = Vec::with_capacity(v.len() * v.len().saturating_sub(1) / 2);
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                out.push(v[i] * v[j]);
            }
        }
        ComplexSpectrum::new(out)
    }

    /// All ordered products `v[i] * v[j]`, `n^2` of them.
    pub fn ordered_products(&self) -> ComplexSpectrum {
        let v = &self.values;
        let mut out = Vec::with_capacity(v.len() * v.len());
        for a in v {
            for b in v {
                out.push(a * b);
            }
        }
        ComplexSpectrum::new(out)
    }

    /// Keeps values whose modulus exceeds `threshold`.
    pub fn nonzero(&self, threshold: f64) -> ComplexSpectrum {
        ComplexSpectrum {
            values: self
                .values
                .iter()
                .copied()
                .filter(|z| z.norm() > threshold)
                .collect(),
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "tolerance must be positive and finite, got {tol}"
        )))
    }
}

/// All `n` eigenvalues of `m`, repeated by algebraic multiplicity.
///
/// Runs balancing, Householder Hessenberg reduction and Francis double-shift
/// QR with a cap of `100 n` sweeps. Eigenvectors and their residuals are
/// available on demand through [`eigenpair`].
pub fn eigenvalues(m: &DenseMatrix, tol: f64) -> Result<ComplexSpectrum> {
    check_tol(tol)?;
    let vals = qr::eigenvalues_dense(m.as_slice().to_vec(), m.n())?;
    Ok(ComplexSpectrum::new(vals))
}

/// Largest modulus in the spectrum.
pub fn spectral_radius(s: &ComplexSpectrum) -> Result<f64> {
    s.values
        .first()
        .map(|z| z.norm())
        .ok_or_else(|| Error::Validation("spectral radius of an empty spectrum".into()))
}

/// An eigenvalue with an eigenvector normalized to unit 2-norm and phase
/// fixed so that its largest-modulus entry is real positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: Complex64,
    pub vector: Vec<Complex64>,
    /// `||A v - lambda v|| / ||A||_F`.
    pub residual: f64,
}

impl EigenPair {
    pub fn real_vector(&self) -> Vec<f64> {
        self.vector.iter().map(|z| z.re).collect()
    }
}

struct ComplexLu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
}

impl ComplexLu {
    /// Partial-pivot LU; pivots smaller than `guard` are replaced by `guard`
    /// so exactly singular shifts still yield a usable solve.
    fn factor(mut a: Vec<Complex64>, n: usize, guard: f64) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, _) = (k..n)
                .map(|i| (i, a[i * n + k].norm()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            if a[k * n + k].norm() < guard {
                a[k * n + k] = Complex64::new(guard, 0.0);
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                a[i * n + k] = f;
                if f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let t = a[k * n + j];
                    a[i * n + j] -= f * t;
                }
            }
        }
        ComplexLu { n, lu: a, perm }
    }

    fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let dot = row
                .iter()
                .zip(&x[..i])
                .map(|(l, y)| l * y)
                .sum::<Complex64>();
            x[i] -= dot;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let s = x[i]
                - row
                    .iter()
                    .zip(&x[i + 1..])
                    .map(|(u, y)| u * y)
                    .sum::<Complex64>();
            x[i] = s / self.lu[i * n + i];
        }
        x
    }
}

fn residual(m: &DenseMatrix, lambda: Complex64, v: &[Complex64]) -> f64 {
    let n = m.n();
    let mut acc = 0.0;
    for i in 0..n {
        let mut s = -lambda * v[i];
        for (j, vj) in v.iter().enumerate() {
            s += m.get(i, j) * vj;
        }
        acc += s.norm_sqr();
    }
    acc.sqrt() / m.frobenius_norm().max(f64::MIN_POSITIVE)
}

fn normalize_phase(v: &mut [Complex64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return;
    }
    let mut best = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() * (1.0 + 1e-12) {
            best = i;
        }
    }
    let phase = v[best] / v[best].norm();
    for z in v.iter_mut() {
        *z = *z / phase / norm;
    }
}

/// Eigenvector for a (computed) eigenvalue by shifted inverse iteration.
pub fn eigenpair(m: &DenseMatrix, lambda: Complex64, tol: f64) -> Result<EigenPair> {
    check_tol(tol)?;
    let n = m.n();
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    let guard = f64::EPSILON * scale;
    let mut x: Vec<Complex64> = (0..n)
        .map(|k| Complex64::new(1.0 + 0.25 * ((k as f64) * 1.37 + 0.5).sin(), 0.0))
        .collect();
    normalize_phase(&mut x);
    let mut a: Vec<Complex64> = m
        .as_slice()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    for i in 0..n {
        a[i * n + i] -= lambda;
    }
    let lu = ComplexLu::factor(a, n, guard);
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for it in 0..12 {
        x = lu.solve(&x);
        if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            break;
        }
        normalize_phase(&mut x);
        let r = residual(m, lambda, &x);
        if best.as_ref().is_none_or(|(br, _)| r < *br) {
            best = Some((r, x.clone()));
        }
        if it >= 1 && r <= tol {
            break;
        }
    }
    let (residual, vector) = best.ok_or(Error::NoConvergence {
        method: "inverse iteration",
        iterations: 12,
        n,
        norm: scale,
        row: 0,
    })?;
    Ok(EigenPair {
        value: lambda,
        vector,
        residual,
    })
}

/// How [`perron_pair`] obtained its eigenvector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerronMethod {
    PowerIteration,
    InverseIteration,
    EigenspaceSelection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerronPair {
    pub lambda: f64,
    pub vector: Vec<f64>,
    pub method: PerronMethod,
    pub iterations: usize,
}

/// Perron root and a nonnegative unit eigenvector of an entrywise
/// nonnegative matrix.
///
/// Power iteration from the all-ones vector is tried first; when it stalls
/// (imprimitive matrices) or the Perron root has a multi-dimensional
/// eigenspace, the full eigen-solver is used to pick a nonnegative vector.
pub fn perron_pair(m: &DenseMatrix, tol: f64, max_iter: usize) -> Result<PerronPair> {
    let spectrum = eigenvalues(m, tol)?;
    perron_pair_with_spectrum(m, &spectrum, tol, max_iter)
}

pub(crate) fn perron_pair_with_spectrum(
    m: &DenseMatrix,
    spectrum: &ComplexSpectrum,
    tol: f64,
    max_iter: usize,
) -> Result<PerronPair> {
    check_tol(tol)?;
    let scale = m.max_abs();
    if !m.is_nonnegative(tol * scale) {
        return Err(Error::Precondition(format!(
            "perron_pair needs an entrywise nonnegative matrix, min entry is {}",
            m.min_entry()
        )));
    }
    let rho = spectral_radius(spectrum)?;
    if rho <= tol * scale || scale == 0.0 {
        return Err(Error::DegeneratePerron { rho });
    }
    let n = m.n();
    let cluster = spectrum
        .values()
        .iter()
        .filter(|z| (**z - Complex64::new(rho, 0.0)).norm() <= 1e-8 * rho)
        .count();
    if cluster > 1 {
        let basis = null_space(m, rho, 1e-8 * m.frobenius_norm());
        if basis.len() > 1 {
            return select_nonnegative(&basis, rho, tol)
                .map(|vector| PerronPair {
                    lambda: rho,
                    vector,
                    method: PerronMethod::EigenspaceSelection,
                    iterations: 0,
                })
                .ok_or(Error::NoNonnegativeEigenvector { rho });
        }
    }

    // Once the residual is within tolerance, keep iterating until it reaches
    // rounding level or stops shrinking: the eigenvalue error of a nonnormal
    // matrix is the residual times its condition number.
    let s = scale.max(rho);
    let floor = 16.0 * f64::EPSILON * n as f64 * s;
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut accepted: Option<(f64, Vec<f64>, f64, usize)> = None;
    for it in 1..=max_iter {
        let y = m.matvec(&x)?;
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::DegeneratePerron { rho: 0.0 });
        }
        let next: Vec<f64> = y.iter().map(|v| v / norm).collect();
        let ax = m.matvec(&next)?;
        let lambda = next.iter().zip(&ax).map(|(a, b)| a * b).sum::<f64>();
        let res = ax
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - lambda * b).powi(2))
            .sum::<f64>()
            .sqrt();
        x = next;
        let within = res <= tol * s && (lambda - rho).abs() <= 1e-6 * rho;
        if let Some((_, _, prev, _)) = &accepted {
            if res >= *prev {
                break;
            }
        }
        if within {
            accepted = Some((lambda, x.clone(), res, it));
            if res <= floor {
                break;
            }
        }
    }
    if let Some((lambda, vector, _, iterations)) = accepted {
        return Ok(PerronPair {
            lambda,
            vector,
            method: PerronMethod::PowerIteration,
            iterations,
        });
    }

    let pair = eigenpair(m, Complex64::new(rho, 0.0), tol)?;
    let v = pair.real_vector();
    let vmax = v.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
    if v.iter().all(|&e| e >= -1e-8 * vmax) {
        Ok(PerronPair {
            lambda: rho,
            vector: v.iter().map(|e| e.max(0.0)).collect(),
            method: PerronMethod::InverseIteration,
            iterations: max_iter,
        })
    } else {
        Err(Error::NoNonnegativeEigenvector { rho })
    }
}

/// Basis of the null space of `m - shift I` from reduced row echelon form:
/// one vector per free column, with a 1 in that column.
fn null_space(m: &DenseMatrix, shift: f64, tol: f64) -> Vec<Vec<f64>> {
    let n = m.n();
    let mut a: Vec<f64> = m.as_slice().to_vec();
    for i in 0..n {
        a[i * n + i] -= shift;
    }
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == n {
            break;
        }
        let (p, val) = (row..n)
            .map(|i| (i, a[i * n + col].abs()))
            .fold((row, -1.0), |b, c| if c.1 > b.1 { c } else { b });
        if val <= tol {
            continue;
        }
        for j in 0..n {
            a.swap(row * n + j, p * n + j);
        }
        let pv = a[row * n + col];
        for j in 0..n {
            a[row * n + j] /= pv;
        }
        for i in 0..n {
            if i != row {
                let f = a[i * n + col];
                if f != 0.0 {
                    for j in 0..n {
                        a[i * n + j] -= f * a[row * n + j];
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0.0; n];
            v[f] = 1.0;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[r * n + f];
            }
            v
        })
        .collect()
}

fn select_nonnegative(basis: &[Vec<f64>], _rho: f64, tol: f64) -> Option<Vec<f64>> {
    let normalize = |v: &[f64]| -> Option<Vec<f64>> {
        let vmax = v.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
        if vmax == 0.0 {
            return None;
        }
        let flip = if v.iter().sum::<f64>() < 0.0 {
            -1.0
        } else {
            1.0
        };
        let w: Vec<f64> = v.iter().map(|x| x * flip).collect();
        if w.iter().all(|&x| x >= -tol * vmax) {
            let w: Vec<f64> = w.iter().map(|x| x.max(0.0)).collect();
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            Some(w.iter().map(|x| x / norm).collect())
        } else {
            None
        }
    };
    basis.iter().find_map(|v| normalize(v)).or_else(|| {
        let n = basis[0].len();
        let sum: Vec<f64> = (0..n).map(|i| basis.iter().map(|v| v[i]).sum()).collect();
        normalize(&sum)
    })
}

/// Outcome of comparing two eigenvalue multisets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub success: bool,
    /// `(index in a, index in b)` for every matched element.
    pub pairs: Vec<(usize, usize)>,
    /// Largest matched distance divided by `scale`.
    pub max_residual: f64,
    pub scale: f64,
    pub tol: f64,
    #[serde(with = "crate::cx::vec")]
    pub leftover_a: Vec<Complex64>,
    #[serde(with = "crate::cx::vec")]
    pub leftover_b: Vec<Complex64>,
}

/// Greedy nearest-neighbour matching of two multisets.
///
/// Elements of `a` are visited in modulus-descending order; each takes the
/// closest still-unmatched element of `b` if it lies within
/// `tol * max(1, largest modulus)`. Success requires equal cardinality and
/// no leftovers on either side.
pub fn multiset_match(a: &ComplexSpectrum, b: &ComplexSpectrum, tol: f64) -> MatchReport {
    let maxmod = a
        .values
        .iter()
        .chain(&b.values)
        .fold(0.0_f64, |acc, z| acc.max(z.norm()));
    let scale = maxmod.max(1.0);
    let mut used = vec![false; b.len()];
    let mut pairs = Vec::new();
    let mut leftover_a = Vec::new();
    let mut max_residual = 0.0_f64;
    for (i, za) in a.values.iter().enumerate() {
        let best = b
            .values
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, zb)| (j, (za - zb).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1));
        match best {
            Some((j, d)) if d / scale <= tol => {
                used[j] = true;
                pairs.push((i, j));
                max_residual = max_residual.max(d / scale);
            }
            _ => leftover_a.push(*za),
        }
    }
    let leftover_b: Vec<Complex64> = b
        .values
        .iter()
        .zip(&used)
        .filter(|(_, u)| !**u)
        .map(|(z, _)| *z)
        .collect();
    MatchReport {
        success: leftover_a.is_empty() && leftover_b.is_empty() && a.len() == b.len(),
        pairs,
        max_residual,
        scale,
        tol,
        leftover_a,
        leftover_b,
    }
}
