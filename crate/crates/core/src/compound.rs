//! Minors, compound matrices, Kronecker squares and exterior squares.
//!
//! The exterior square acts on the basis `e_i ^ e_j`, `i < j`, in
//! lexicographic order and without normalization, so its matrix coincides
//! entry for entry with the second compound matrix.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::par;
use crate::spectra::{dominant_eigenvalues, ComplexSpectrum, SubspaceOptions};

/// Largest matrix (in entries) built without `force`.
pub const DEFAULT_MAX_ENTRIES: u128 = 1_000_000;

/// Output-size guard for compound and tensor constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeCap {
    pub max_entries: u128,
    pub force: bool,
}

impl Default for SizeCap {
    fn default() -> Self {
        SizeCap {
            max_entries: DEFAULT_MAX_ENTRIES,
            force: false,
        }
    }
}

impl SizeCap {
    pub fn forced() -> Self {
        SizeCap {
            force: true,
            ..Default::default()
        }
    }

    fn check(&self, what: &'static str, dim: u128) -> Result<()> {
        let entries = dim.saturating_mul(dim);
        if !self.force && entries > self.max_entries {
            return Err(Error::Resource {
                what,
                requested: entries,
                cap: self.max_entries,
                hint: "set the force flag to build it anyway",
            });
        }
        Ok(())
    }
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Lexicographically ordered pairs `(i, j)`, `0 <= i < j < n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairBasis {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl PairBasis {
    pub fn new(n: usize) -> Self {
        let pairs = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        PairBasis { n, pairs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn pair_at(&self, index: usize) -> (usize, usize) {
        self.pairs[index]
    }

    /// Position of `(i, j)` in the lexicographic order; `None` unless `i < j < n`.
    pub fn index_of(&self, i: usize, j: usize) -> Option<usize> {
        if i < j && j < self.n {
            Some(i * self.n - i * (i + 1) / 2 + (j - i - 1))
        } else {
            None
        }
    }
}

/// Strictly increasing row or column selector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Validation("index set must not be empty".into()));
        }
        if !indices.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Validation(format!(
                "index set {indices:?} is not strictly increasing"
            )));
        }
        if let Some(bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::Validation(format!(
                "index {bad} out of range for dimension {n}"
            )));
        }
        Ok(IndexSet(indices))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Determinant of a row-major `n x n` buffer by LU with partial pivoting.
pub(crate) fn lu_determinant(mut a: Vec<f64>, n: usize) -> f64 {
    let mut det = 1.0;
    for k in 0..n {
        let mut p = k;
        for i in k + 1..n {
            if a[i * n + k].abs() > a[p * n + k].abs() {
                p = i;
            }
        }
        let pivot = a[p * n + k];
        if pivot == 0.0 {
            return 0.0;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            det = -det;
        }
        det *= pivot;
        for i in k + 1..n {
            let f = a[i * n + k] / pivot;
            if f != 0.0 {
                for j in k + 1..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
    }
    det
}

/// Minor on raw index slices (assumed valid and of equal length).
pub(crate) fn minor_raw(m: &DenseMatrix, rows: &[usize], cols: &[usize]) -> f64 {
    let e = |a: usize, b: usize| m.get(rows[a], cols[b]);
    match rows.len() {
        1 => e(0, 0),
        2 => e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0),
        3 => {
            e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
                - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
                + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
        }
        j => {
            let mut buf = Vec::with_capacity(j * j);
            for &r in rows {
                for &c in cols {
                    buf.push(m.get(r, c));
                }
            }
            lu_determinant(buf, j)
        }
    }
}

/// Determinant of the submatrix selected by `rows` x `cols`.
///
/// Closed-form cofactor expansion for orders up to 3, LU with partial
/// pivoting above that.
pub fn minor(m: &DenseMatrix, rows: &IndexSet, cols: &IndexSet) -> Result<f64> {
    if rows.len() != cols.len() {
        return Err(Error::Validation(format!(
            "row set has {} indices but column set has {}",
            rows.len(),
            cols.len()
        )));
    }
    let n = m.n();
    if rows
        .as_slice()
        .iter()
        .chain(cols.as_slice())
        .any(|&i| i >= n)
    {
        return Err(Error::Validation(format!(
            "index out of range for dimension {n}"
        )));
    }
    Ok(minor_raw(m, rows.as_slice(), cols.as_slice()))
}

/// All `j`-subsets of `0..n` in lexicographic order.
pub fn index_sets(n: usize, j: usize) -> Vec<Vec<usize>> {
    (0..n).combinations(j).collect()
}

/// `j`-th compound matrix with the default size cap.
pub fn compound_matrix(m: &DenseMatrix, j: usize) -> Result<DenseMatrix> {
    compound_matrix_with(m, j, SizeCap::default())
}

pub fn compound_matrix_with(m: &DenseMatrix, j: usize, cap: SizeCap) -> Result<DenseMatrix> {
    let n = m.n();
    if j == 0 || j > n {
        return Err(Error::Validation(format!(
            "compound order {j} outside 1..={n}"
        )));
    }
    cap.check("compound matrix", binomial(n, j))?;
    let sets = index_sets(n, j);
    let size = sets.len();
    let mut data = vec![0.0; size * size];
    par::fill_rows(&mut data, size, |r, row| {
        for (c, out) in row.iter_mut().enumerate() {
            *out = minor_raw(m, &sets[r], &sets[c]);
        }
    });
    Ok(DenseMatrix::from_raw(size, data))
}

/// Kronecker square with row-major pair flattening `(i1, i2) -> i1 * n + i2`.
pub fn tensor_square(m: &DenseMatrix) -> Result<DenseMatrix> {
    tensor_square_with(m, SizeCap::default())
}

pub fn tensor_square_with(m: &DenseMatrix, cap: SizeCap) -> Result<DenseMatrix> {
    let n = m.n();
    cap.check("tensor square", (n as u128) * (n as u128))?;
    let size = n * n;
    let mut data = vec![0.0; size * size];
    par::fill_rows(&mut data, size, |r, row| {
        let (i1, i2) = (r / n, r % n);
        for (c, out) in row.iter_mut().enumerate() {
            *out = m.get(i1, c / n) * m.get(i2, c % n);
        }
    });
    Ok(DenseMatrix::from_raw(size, data))
}

/// Matrix of `A ^ A` on the pair basis.
pub fn exterior_square(m: &DenseMatrix) -> Result<DenseMatrix> {
    exterior_square_with(m, SizeCap::default())
}

pub fn exterior_square_with(m: &DenseMatrix, cap: SizeCap) -> Result<DenseMatrix> {
    let n = m.n();
    if n < 2 {
        return Err(Error::Validation(
            "exterior square needs dimension at least 2".into(),
        ));
    }
    cap.check("exterior square", binomial(n, 2))?;
    let basis = PairBasis::new(n);
    let size = basis.len();
    let mut data = vec![0.0; size * size];
    par::fill_rows(&mut data, size, |r, row| {
        let (i, j) = basis.pair_at(r);
        for (c, out) in row.iter_mut().enumerate() {
            let (k, l) = basis.pair_at(c);
            *out = m.get(i, k) * m.get(j, l) - m.get(i, l) * m.get(j, k);
        }
    });
    Ok(DenseMatrix::from_raw(size, data))
}

/// `x ^ y` in pair-basis coordinates: component `(i, j)` is `x_i y_j - x_j y_i`.
pub fn wedge_vector(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(Error::Validation(format!(
            "wedge of vectors with lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::Validation(
            "wedge needs vectors of length at least 2".into(),
        ));
    }
    let basis = PairBasis::new(x.len());
    Ok(basis
        .pairs()
        .iter()
        .map(|&(i, j)| x[i] * y[j] - x[j] * y[i])
        .collect())
}

/// Applies `A ^ A` to a pair-basis vector without forming the matrix.
///
/// The vector is unpacked into the antisymmetric matrix `X`, mapped to
/// `A X A^T`, and the strict upper triangle read back. Cost `O(n^3)`.
pub fn exterior_apply(m: &DenseMatrix, x: &[f64]) -> Result<Vec<f64>> {
    let n = m.n();
    let basis = PairBasis::new(n);
    if x.len() != basis.len() {
        return Err(Error::Validation(format!(
            "pair vector has length {}, expected {}",
            x.len(),
            basis.len()
        )));
    }
    let mut xm = vec![0.0; n * n];
    for (&(i, j), v) in basis.pairs().iter().zip(x) {
        xm[i * n + j] = *v;
        xm[j * n + i] = -*v;
    }
    // T = A X
    let a = m.as_slice();
    let mut t = vec![0.0; n * n];
    par::fill_rows(&mut t, n, |i, row| {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for (r, xv) in row.iter_mut().zip(&xm[k * n..(k + 1) * n]) {
                *r += aik * xv;
            }
        }
    });
    // Y = T A^T restricted to i < j
    let rows: Vec<Vec<f64>> = par::map_range(n, |i| {
        let ti = &t[i * n..(i + 1) * n];
        (i + 1..n)
            .map(|j| {
                ti.iter()
                    .zip(&a[j * n..(j + 1) * n])
                    .map(|(p, q)| p * q)
                    .sum()
            })
            .collect()
    });
    Ok(rows.into_iter().flatten().collect())
}

/// Leading eigenvalues of `A ^ A` by subspace iteration on
/// [`exterior_apply`]; usable where the explicit matrix would be too large.
pub fn exterior_dominant_eigenvalues(
    m: &DenseMatrix,
    opts: SubspaceOptions,
) -> Result<(ComplexSpectrum, usize)> {
    let n = m.n();
    if n < 2 {
        return Err(Error::Validation(
            "exterior square needs dimension at least 2".into(),
        ));
    }
    let dim = n * (n - 1) / 2;
    dominant_eigenvalues(
        dim,
        |x| exterior_apply(m, x).expect("pair vector length checked"),
        opts,
    )
}
