//! Total nonnegativity certificates, sign-change counting and random
//! totally nonnegative / oscillatory test matrices.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::compound::{binomial, index_sets, minor_raw, IndexSet};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::par;
use crate::seed::rng_for;

/// Default cap on the number of minors enumerated exhaustively.
pub const DEFAULT_MINOR_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    Exhaustive,
    /// At least one order was checked on a random sample of minors only.
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub rows: IndexSet,
    pub cols: IndexSet,
    pub value: f64,
}

/// Outcome of a minor-nonnegativity check over orders `min_order..=order_checked`.
///
/// A minor of order `j` passes when it is at least `-tol * scale^j`, where
/// `scale` is the largest absolute entry. The witness is the first failing
/// minor in enumeration order (lexicographic row set, then column set).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TNCertificate {
    pub min_order: usize,
    pub order_checked: usize,
    pub verdict: bool,
    pub mode: CheckMode,
    pub witness: Option<Witness>,
    pub minors_evaluated: u64,
    pub tol: f64,
    pub scale: f64,
}

/// Random-sampling settings used once an order exceeds the minor budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    pub samples_per_order: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TnOptions {
    pub budget: u128,
    /// `None` turns an over-budget check into a resource error.
    pub sampling: Option<Sampling>,
}

impl Default for TnOptions {
    fn default() -> Self {
        TnOptions {
            budget: DEFAULT_MINOR_BUDGET,
            sampling: None,
        }
    }
}

impl TnOptions {
    pub fn with_sampling(samples_per_order: usize, seed: u64) -> Self {
        TnOptions {
            sampling: Some(Sampling {
                samples_per_order,
                seed,
            }),
            ..Default::default()
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "tolerance must be finite and nonnegative, got {tol}"
        )))
    }
}

/// All minors of orders `1..=k` are nonnegative (within tolerance).
pub fn is_totally_nonnegative(m: &DenseMatrix, k: usize, tol: f64) -> Result<TNCertificate> {
    is_totally_nonnegative_with(m, k, tol, TnOptions::default())
}

pub fn is_totally_nonnegative_with(
    m: &DenseMatrix,
    k: usize,
    tol: f64,
    opts: TnOptions,
) -> Result<TNCertificate> {
    if k == 0 || k > m.n() {
        return Err(Error::Validation(format!(
            "order {k} outside 1..={}",
            m.n()
        )));
    }
    check_orders(m, 1, k, tol, opts)
}

/// Entrywise nonnegativity of `m` and of its second compound, as two
/// certificates (order 1 only, order 2 only).
pub fn is_two_totally_nonnegative(
    m: &DenseMatrix,
    tol: f64,
) -> Result<(TNCertificate, TNCertificate)> {
    is_two_totally_nonnegative_with(m, tol, TnOptions::default())
}

pub fn is_two_totally_nonnegative_with(
    m: &DenseMatrix,
    tol: f64,
    opts: TnOptions,
) -> Result<(TNCertificate, TNCertificate)> {
    if m.n() < 2 {
        return Err(Error::Validation(
            "2-total nonnegativity needs dimension at least 2".into(),
        ));
    }
    Ok((
        check_orders(m, 1, 1, tol, opts)?,
        check_orders(m, 2, 2, tol, opts)?,
    ))
}

/// Checks `samples` random minors of a single order.
pub fn sampled_minors(
    m: &DenseMatrix,
    order: usize,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<TNCertificate> {
    if order == 0 || order > m.n() {
        return Err(Error::Validation(format!(
            "order {order} outside 1..={}",
            m.n()
        )));
    }
    check_tol(tol)?;
    let scale = m.max_abs();
    let (verdict, witness, evaluated) = sample_order(m, order, samples, seed, tol, scale);
    Ok(TNCertificate {
        min_order: order,
        order_checked: order,
        verdict,
        mode: CheckMode::Sampled,
        witness,
        minors_evaluated: evaluated,
        tol,
        scale,
    })
}

fn check_orders(
    m: &DenseMatrix,
    lo: usize,
    hi: usize,
    tol: f64,
    opts: TnOptions,
) -> Result<TNCertificate> {
    check_tol(tol)?;
    let n = m.n();
    let scale = m.max_abs();
    let counts: Vec<u128> = (lo..=hi)
        .map(|j| binomial(n, j).saturating_mul(binomial(n, j)))
        .collect();
    let total = counts.iter().fold(0u128, |a, c| a.saturating_add(*c));
    if total > opts.budget && opts.sampling.is_none() {
        return Err(Error::Resource {
            what: "minor enumeration",
            requested: total,
            cap: opts.budget,
            hint: "use a smaller order or enable sampling mode",
        });
    }

    let mut remaining = opts.budget;
    let mut mode = CheckMode::Exhaustive;
    let mut evaluated: u64 = 0;
    for (j, count) in (lo..=hi).zip(counts) {
        let (ok, witness, used) = match opts.sampling {
            Some(s) if count > remaining => {
                mode = CheckMode::Sampled;
                sample_order(m, j, s.samples_per_order, s.seed, tol, scale)
            }
            _ => {
                remaining = remaining.saturating_sub(count);
                exhaustive_order(m, j, tol, scale)
            }
        };
        evaluated += used;
        if !ok {
            return Ok(TNCertificate {
                min_order: lo,
                order_checked: hi,
                verdict: false,
                mode,
                witness,
                minors_evaluated: evaluated,
                tol,
                scale,
            });
        }
    }
    Ok(TNCertificate {
        min_order: lo,
        order_checked: hi,
        verdict: true,
        mode,
        witness: None,
        minors_evaluated: evaluated,
        tol,
        scale,
    })
}

fn threshold(tol: f64, scale: f64, order: usize) -> f64 {
    -tol * scale.powi(order as i32)
}

fn exhaustive_order(
    m: &DenseMatrix,
    j: usize,
    tol: f64,
    scale: f64,
) -> (bool, Option<Witness>, u64) {
    let n = m.n();
    let sets = index_sets(n, j);
    let floor = threshold(tol, scale, j);
    let hit = par::find_first(sets.len(), |r| {
        sets.iter()
            .enumerate()
            .map(|(c, cols)| (c, minor_raw(m, &sets[r], cols)))
            .find(|(_, v)| *v < floor)
    });
    let per_row = sets.len() as u64;
    match hit {
        Some((r, (c, value))) => (
            false,
            Some(Witness {
                rows: IndexSet::new(sets[r].clone(), n).expect("lexicographic subsets are valid"),
                cols: IndexSet::new(sets[c].clone(), n).expect("lexicographic subsets are valid"),
                value,
            }),
            r as u64 * per_row + c as u64 + 1,
        ),
        None => (true, None, per_row * per_row),
    }
}

fn random_subset(rng: &mut impl Rng, n: usize, j: usize) -> Vec<usize> {
    let mut v = sample(rng, n, j).into_vec();
    v.sort_unstable();
    v
}

fn sample_order(
    m: &DenseMatrix,
    j: usize,
    samples: usize,
    seed: u64,
    tol: f64,
    scale: f64,
) -> (bool, Option<Witness>, u64) {
    let n = m.n();
    let floor = threshold(tol, scale, j);
    let hit = par::find_first(samples, |s| {
        let mut rng = rng_for(seed, j as u64, s as u64);
        let rows = random_subset(&mut rng, n, j);
        let cols = random_subset(&mut rng, n, j);
        let v = minor_raw(m, &rows, &cols);
        (v < floor).then_some((rows, cols, v))
    });
    match hit {
        Some((s, (rows, cols, value))) => (
            false,
            Some(Witness {
                rows: IndexSet::new(rows, n).expect("sampled subsets are valid"),
                cols: IndexSet::new(cols, n).expect("sampled subsets are valid"),
                value,
            }),
            s as u64 + 1,
        ),
        None => (true, None, samples as u64),
    }
}

/// Strict sign-change count of a vector (zeros discarded).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignChangeCount {
    pub strict_count: usize,
    pub vector_length: usize,
    pub zero_count: usize,
}

/// Counts sign flips after dropping entries with `|x| <= tol * max|x|`.
pub fn sign_changes(v: &[f64], tol: f64) -> Result<SignChangeCount> {
    if v.is_empty() {
        return Err(Error::Validation("sign changes of an empty vector".into()));
    }
    check_tol(tol)?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Validation("vector has non-finite entries".into()));
    }
    let vmax = v.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let cut = tol * vmax;
    let kept: Vec<bool> = v
        .iter()
        .filter(|x| x.abs() > cut && **x != 0.0)
        .map(|x| *x > 0.0)
        .collect();
    if kept.is_empty() {
        return Err(Error::ZeroVector { len: v.len() });
    }
    Ok(SignChangeCount {
        strict_count: kept.windows(2).filter(|w| w[0] != w[1]).count(),
        vector_length: v.len(),
        zero_count: v.len() - kept.len(),
    })
}

const STREAM_TN: u64 = 1;
const STREAM_OSC: u64 = 2;
const STREAM_GENERAL: u64 = 3;

/// Product of a positive diagonal matrix and `factors - 1` elementary
/// bidiagonal matrices `I + a E_{i,i-1}` or `I + a E_{i-1,i}` with
/// `a` uniform in `(0, 1]`. Totally nonnegative and invertible by construction.
pub fn random_tn(n: usize, seed: u64, factors: usize) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::Validation("dimension must be at least 1".into()));
    }
    if factors == 0 {
        return Err(Error::Validation("at least one factor is required".into()));
    }
    let mut rng = rng_for(seed, STREAM_TN, n as u64);
    let diag: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..=2.0)).collect();
    let mut m = DenseMatrix::diag(&diag)?;
    for _ in 1..factors {
        if n == 1 {
            break;
        }
        let i = rng.random_range(1..n);
        let a = 1.0 - rng.random_range(0.0..1.0);
        let lower = rng.random_bool(0.5);
        // right-multiplication acts on columns
        let (src, dst) = if lower { (i, i - 1) } else { (i - 1, i) };
        for r in 0..n {
            let v = m.get(r, dst) + a * m.get(r, src);
            m.set(r, dst, v);
        }
    }
    Ok(m)
}

/// Seeded matrix with entries uniform in `[-1, 1]`.
pub fn random_general(n: usize, seed: u64) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::Validation("dimension must be at least 1".into()));
    }
    let mut rng = rng_for(seed, STREAM_GENERAL, n as u64);
    DenseMatrix::new(
        n,
        (0..n * n).map(|_| rng.random_range(-1.0..=1.0)).collect(),
    )
}

const OSC_RETRIES: u64 = 100;

/// Random oscillatory matrix: a random TN factor times a diagonally dominant
/// Jacobi matrix with positive off-diagonals, accepted only after checking
/// total nonnegativity to order `n`, `det > 0`, and `(I + m)^(n-1) > 0`.
pub fn random_oscillatory(n: usize, seed: u64) -> Result<DenseMatrix> {
    if n < 2 {
        return Err(Error::Validation(
            "oscillatory matrices need dimension at least 2".into(),
        ));
    }
    for attempt in 0..OSC_RETRIES {
        let mut rng = rng_for(seed, STREAM_OSC, attempt);
        let base = random_tn(n, rng.random(), 2 * n)?;
        let mut jacobi = DenseMatrix::zeros(n);
        for i in 0..n {
            jacobi.set(i, i, rng.random_range(2.2..=3.0));
            if i + 1 < n {
                jacobi.set(i, i + 1, rng.random_range(0.3..=1.0));
                jacobi.set(i + 1, i, rng.random_range(0.3..=1.0));
            }
        }
        let m = base.matmul(&jacobi)?;
        if is_oscillatory(&m, 1e-10, rng.random())? {
            return Ok(m);
        }
    }
    Err(Error::Generation(format!(
        "no oscillatory matrix of size {n} after {OSC_RETRIES} attempts"
    )))
}

/// TN to order `n` (sampled above the minor budget), invertible, and with an
/// entrywise positive power of `I + m`.
pub fn is_oscillatory(m: &DenseMatrix, tol: f64, seed: u64) -> Result<bool> {
    let n = m.n();
    let cert = is_totally_nonnegative_with(m, n, tol, TnOptions::with_sampling(2000, seed))?;
    if !cert.verdict {
        return Ok(false);
    }
    let scale = m.max_abs();
    if m.det() <= tol * scale.powi(n as i32) {
        return Ok(false);
    }
    let shifted = m.add(&DenseMatrix::identity(n))?;
    let mut power = DenseMatrix::identity(n);
    for _ in 0..n.saturating_sub(1) {
        power = power.matmul(&shifted)?;
    }
    Ok(power.min_entry() > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat<const N: usize>(rows: [[f64; N]; N]) -> DenseMatrix {
        DenseMatrix::from_rows(&rows).unwrap()
    }

    fn three_cycle() -> DenseMatrix {
        mat([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    }

    #[test]
    fn tn_examples() {
        let ones = mat([[1.0, 1.0], [1.0, 1.0]]);
        let c = is_totally_nonnegative(&ones, 2, 1e-12).unwrap();
        assert!(c.verdict);
        assert_eq!(c.minors_evaluated, 5);

        let swap = mat([[0.0, 1.0], [1.0, 0.0]]);
        let c = is_totally_nonnegative(&swap, 2, 1e-12).unwrap();
        assert!(!c.verdict);
        let w = c.witness.unwrap();
        assert_eq!(w.rows.as_slice(), &[0, 1]);
        assert_eq!(w.cols.as_slice(), &[0, 1]);
        assert_eq!(w.value, -1.0);

        let vander = mat([[1.0, 1.0, 1.0], [1.0, 2.0, 4.0], [1.0, 3.0, 9.0]]);
        let c = is_totally_nonnegative(&vander, 3, 1e-12).unwrap();
        assert!(c.verdict);
        assert_eq!(c.minors_evaluated, 19);
        assert!(is_totally_nonnegative(&vander, 0, 1e-12).is_err());
        assert!(is_totally_nonnegative(&vander, 4, 1e-12).is_err());
    }

    #[test]
    fn vandermonde_minors_brute_force() {
        // oracle: every minor by explicit cofactor formulas
        let v = mat([[1.0, 1.0, 1.0], [1.0, 2.0, 4.0], [1.0, 3.0, 9.0]]);
        for j in 1..=3 {
            for r in index_sets(3, j) {
                for c in index_sets(3, j) {
                    let sub: Vec<Vec<f64>> = r
                        .iter()
                        .map(|&i| c.iter().map(|&k| v.get(i, k)).collect())
                        .collect();
                    let d = match j {
                        1 => sub[0][0],
                        2 => sub[0][0] * sub[1][1] - sub[0][1] * sub[1][0],
                        _ => DenseMatrix::from_rows(&sub).unwrap().det(),
                    };
                    assert!(d > 0.0, "minor {r:?}x{c:?} = {d}");
                }
            }
        }
    }

    #[test]
    fn budget_and_sampling() {
        let m = DenseMatrix::identity(6);
        let tight = TnOptions {
            budget: 10,
            sampling: None,
        };
        assert!(matches!(
            is_totally_nonnegative_with(&m, 2, 1e-12, tight),
            Err(Error::Resource { .. })
        ));
        let sampled = TnOptions {
            budget: 40,
            sampling: Some(Sampling {
                samples_per_order: 50,
                seed: 3,
            }),
        };
        let c = is_totally_nonnegative_with(&m, 2, 1e-12, sampled).unwrap();
        assert_eq!(c.mode, CheckMode::Sampled);
        assert!(c.verdict);
        // order 1 exhaustive (36), order 2 sampled (50)
        assert_eq!(c.minors_evaluated, 86);
    }

    #[test]
    fn two_tn_examples() {
        let (a, b) =
            is_two_totally_nonnegative(&DenseMatrix::diag(&[1.0, 2.0, 3.0]).unwrap(), 1e-12)
                .unwrap();
        assert!(a.verdict && b.verdict);
        let tri = mat([[2.0, 1.0, 0.0], [1.0, 2.0, 1.0], [0.0, 1.0, 2.0]]);
        let (a, b) = is_two_totally_nonnegative(&tri, 1e-12).unwrap();
        assert!(a.verdict && b.verdict);
        let (a, b) = is_two_totally_nonnegative(&three_cycle(), 1e-12).unwrap();
        assert!(a.verdict);
        assert!(!b.verdict);
        assert_eq!(b.witness.unwrap().value, -1.0);
        assert!(is_two_totally_nonnegative(&DenseMatrix::identity(1), 1e-12).is_err());
    }

    #[test]
    fn sign_change_examples() {
        assert_eq!(
            sign_changes(&[1.0, -1.0, 1.0], 1e-12).unwrap().strict_count,
            2
        );
        assert_eq!(
            sign_changes(&[1.0, 2.0, 3.0], 1e-12).unwrap().strict_count,
            0
        );
        let c = sign_changes(&[1.0, 0.0, -1.0], 1e-12).unwrap();
        assert_eq!(c.strict_count, 1);
        assert_eq!(c.zero_count, 1);
        assert!(matches!(
            sign_changes(&[0.0, 0.0], 1e-12),
            Err(Error::ZeroVector { len: 2 })
        ));
        assert!(sign_changes(&[], 1e-12).is_err());
        // below-threshold entries are discarded
        assert_eq!(
            sign_changes(&[1.0, -1e-14, 1.0], 1e-12)
                .unwrap()
                .strict_count,
            0
        );
    }

    #[test]
    fn random_tn_examples() {
        for seed in 0..5 {
            let m = random_tn(2, seed, 6).unwrap();
            assert!(m.min_entry() >= 0.0);
            assert!(m.det() >= 0.0);
        }
        let d = random_tn(4, 9, 1).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    assert!(d.get(i, j) > 0.0);
                } else {
                    assert_eq!(d.get(i, j), 0.0);
                }
            }
        }
        assert!(random_tn(3, 0, 0).is_err());
        assert!(random_tn(0, 0, 3).is_err());
        let m = random_tn(5, 42, 30).unwrap();
        assert!(is_totally_nonnegative(&m, 5, 1e-10).unwrap().verdict);
        assert_eq!(m, random_tn(5, 42, 30).unwrap());
    }

    #[test]
    fn random_oscillatory_small() {
        let m = random_oscillatory(2, 7).unwrap();
        assert!(m.min_entry() > 0.0);
        assert!(m.det() > 0.0);
        assert!(random_oscillatory(1, 7).is_err());
        assert_eq!(m, random_oscillatory(2, 7).unwrap());
    }

    #[test]
    fn oscillatory_check_rejects() {
        assert!(!is_oscillatory(&DenseMatrix::identity(3), 1e-10, 0).unwrap());
        assert!(!is_oscillatory(&three_cycle(), 1e-10, 0).unwrap());
        let tri = mat([[2.0, 1.0, 0.0], [1.0, 2.0, 1.0], [0.0, 1.0, 2.0]]);
        assert!(is_oscillatory(&tri, 1e-10, 0).unwrap());
    }
}
