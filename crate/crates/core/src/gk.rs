//! Second-eigenvalue verdicts for nonnegative matrices whose exterior square
//! is also nonnegative, plus the product-spectrum verifiers for tensor and
//! exterior squares.
//!
//! `analyze` never aborts on failed hypotheses: the spectral quantities are
//! always reported, and only the classification reflects whether the
//! positivity guarantee for the second eigenvalue applies.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::compound::{
    binomial, exterior_dominant_eigenvalues, exterior_square_with, tensor_square_with, SizeCap,
};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::par;
use crate::positivity::{
    is_two_totally_nonnegative_with, random_general, random_tn, sign_changes, SignChangeCount,
    TNCertificate, TnOptions,
};
use crate::seed::derive_seed;
use crate::spectra::{
    eigenpair, eigenvalues, multiset_match, perron_pair_with_spectrum, spectral_radius,
    ComplexSpectrum, SubspaceOptions,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    SecondEigenvalueFound,
    ComplexPairOnCircle,
    MultipleLeading,
    DegenerateRhoZero,
    HypothesesViolated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WedgeMethod {
    /// Explicit exterior square, full eigen-solve.
    Dense,
    /// Matrix-free subspace iteration on `A X A^T`.
    SubspaceIteration,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzeOptions {
    pub tol: f64,
    /// `lambda` lies on the spectral circle iff `|lambda| >= lambda1 (1 - circle_tol)`.
    pub circle_tol: f64,
    /// Largest `residual_theorem3` accepted for `second_eigenvalue_found`.
    pub report_tol: f64,
    pub tn: TnOptions,
    pub cap: SizeCap,
    pub power_max_iter: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            tol: crate::spectra::DEFAULT_TOL,
            circle_tol: 1e-7,
            report_tol: 1e-6,
            tn: TnOptions::with_sampling(100_000, 0),
            cap: SizeCap::default(),
            power_max_iter: 10_000,
        }
    }
}

impl AnalyzeOptions {
    pub fn with_tol(tol: f64) -> Self {
        AnalyzeOptions {
            tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GKReport {
    pub n: usize,
    pub lambda1: f64,
    /// `rho(A ^ A) / lambda1`.
    pub lambda2: Option<f64>,
    /// Second entry of the sorted spectrum, for comparison with `lambda2`.
    #[serde(with = "crate::cx::opt")]
    pub lambda2_sorted: Option<Complex64>,
    #[serde(with = "crate::cx::opt_pair")]
    pub complex_pair: Option<(Complex64, Complex64)>,
    pub classification: Classification,
    pub hypotheses_hold: bool,
    pub rho_wedge: f64,
    pub rho_wedge_method: WedgeMethod,
    /// `|rho(A ^ A) - |lambda1| |lambda2|| / max(1, rho(A ^ A))`.
    pub residual_theorem3: f64,
    pub circle_count: usize,
    pub lambda1_multiplicity: usize,
    pub sign_changes_e1: Option<SignChangeCount>,
    pub sign_changes_e2: Option<SignChangeCount>,
    pub hypothesis_certificates: [TNCertificate; 2],
    pub spectrum: ComplexSpectrum,
    pub tol: f64,
    pub circle_tol: f64,
    pub report_tol: f64,
}

fn rho_wedge(m: &DenseMatrix, opts: &AnalyzeOptions) -> Result<(f64, WedgeMethod)> {
    let dim = binomial(m.n(), 2);
    if opts.cap.force || dim * dim <= opts.cap.max_entries {
        let w = exterior_square_with(m, SizeCap::forced())?;
        Ok((
            spectral_radius(&eigenvalues(&w, opts.tol)?)?,
            WedgeMethod::Dense,
        ))
    } else {
        let (ritz, _) = exterior_dominant_eigenvalues(m, SubspaceOptions::default())?;
        Ok((ritz.values()[0].norm(), WedgeMethod::SubspaceIteration))
    }
}

fn count_signs(v: &[f64], tol: f64) -> Option<SignChangeCount> {
    sign_changes(v, tol).ok()
}

/// Runs the full verdict pipeline on `m` (dimension at least 2).
pub fn analyze(m: &DenseMatrix, tol: f64) -> Result<GKReport> {
    analyze_with(m, &AnalyzeOptions::with_tol(tol))
}

pub fn analyze_with(m: &DenseMatrix, opts: &AnalyzeOptions) -> Result<GKReport> {
    let n = m.n();
    if n < 2 {
        return Err(Error::Validation(
            "analysis needs dimension at least 2".into(),
        ));
    }
    let tol = opts.tol;
    let (c1, c2) = is_two_totally_nonnegative_with(m, tol, opts.tn)?;
    let hypotheses_hold = c1.verdict && c2.verdict;
    let spectrum = eigenvalues(m, tol)?;
    let rho = spectral_radius(&spectrum)?;

    let mut degenerate = false;
    let (lambda1, perron_vector) = if c1.verdict {
        match perron_pair_with_spectrum(m, &spectrum, tol, opts.power_max_iter) {
            Ok(p) => (p.lambda, Some(p.vector)),
            Err(Error::DegeneratePerron { rho }) => {
                degenerate = true;
                (rho, None)
            }
            Err(Error::NoNonnegativeEigenvector { rho }) => (rho, None),
            Err(e) => return Err(e),
        }
    } else {
        (rho, None)
    };
    let degenerate = degenerate || lambda1 <= tol * m.max_abs() || lambda1 == 0.0;
    let (rho_wedge, rho_wedge_method) = rho_wedge(m, opts)?;

    let mut report = GKReport {
        n,
        lambda1,
        lambda2: None,
        lambda2_sorted: spectrum.values().get(1).copied(),
        complex_pair: None,
        classification: Classification::DegenerateRhoZero,
        hypotheses_hold,
        rho_wedge,
        rho_wedge_method,
        residual_theorem3: 0.0,
        circle_count: 0,
        lambda1_multiplicity: 0,
        sign_changes_e1: None,
        sign_changes_e2: None,
        hypothesis_certificates: [c1, c2],
        spectrum,
        tol,
        circle_tol: opts.circle_tol,
        report_tol: opts.report_tol,
    };
    if degenerate {
        return Ok(report);
    }

    let values = report.spectrum.values().to_vec();
    let radius = lambda1 * (1.0 - opts.circle_tol);
    let on_circle: Vec<Complex64> = values
        .iter()
        .copied()
        .filter(|z| z.norm() >= radius)
        .collect();
    let is_real = |z: &Complex64| z.im.abs() <= opts.circle_tol * lambda1;
    report.circle_count = on_circle.len();
    report.lambda1_multiplicity = on_circle
        .iter()
        .filter(|z| is_real(z) && (z.re - lambda1).abs() <= opts.circle_tol * lambda1)
        .count();
    report.complex_pair = on_circle.iter().find(|z| !is_real(z)).map(|z| {
        let up = Complex64::new(z.re, z.im.abs());
        (up, up.conj())
    });

    let lambda2 = rho_wedge / lambda1;
    report.lambda2 = Some(lambda2);
    let second_mod = values[1].norm();
    report.residual_theorem3 = (rho_wedge - lambda1 * second_mod).abs() / rho_wedge.max(1.0);

    report.classification = if on_circle.len() > 1 {
        if report.complex_pair.is_some() {
            Classification::ComplexPairOnCircle
        } else {
            Classification::MultipleLeading
        }
    } else if hypotheses_hold && lambda2 > tol * lambda1 {
        if report.residual_theorem3 > opts.report_tol {
            return Err(Error::Inconsistent(format!(
                "rho(A^A)/lambda1 = {lambda2} disagrees with the sorted spectrum |lambda2| = {second_mod} \
                 (residual {} > {})",
                report.residual_theorem3, opts.report_tol
            )));
        }
        Classification::SecondEigenvalueFound
    } else {
        Classification::HypothesesViolated
    };

    // eigenvector sign structure needs real simple lambda1 and lambda2
    if on_circle.len() == 1 && is_real(&values[0]) {
        let e1 = match perron_vector {
            Some(v) => v,
            None => eigenpair(m, values[0], tol)?.real_vector(),
        };
        report.sign_changes_e1 = count_signs(&e1, tol);
        let l2 = values[1];
        let gap_below = values
            .get(2)
            .map_or(f64::INFINITY, |z| l2.norm() - z.norm());
        if is_real(&l2) && l2.norm() > tol * lambda1 && gap_below > opts.circle_tol * lambda1 {
            let e2 = eigenpair(m, Complex64::new(l2.re, 0.0), tol)?.real_vector();
            report.sign_changes_e2 = count_signs(&e2, tol);
        }
    }
    Ok(report)
}

/// Serialized as its number, 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Theorem {
    /// Tensor square: nonzero spectrum equals all ordered products.
    Tensor,
    /// Exterior square: nonzero spectrum equals products with `i < j`.
    Exterior,
}

impl From<Theorem> for u8 {
    fn from(t: Theorem) -> u8 {
        match t {
            Theorem::Tensor => 1,
            Theorem::Exterior => 2,
        }
    }
}

impl TryFrom<u8> for Theorem {
    type Error = Error;

    fn try_from(k: u8) -> Result<Self> {
        Theorem::from_number(k)
    }
}

impl Theorem {
    pub fn from_number(k: u8) -> Result<Self> {
        match k {
            1 => Ok(Theorem::Tensor),
            2 => Ok(Theorem::Exterior),
            other => Err(Error::Validation(format!(
                "theorem must be 1 or 2, got {other}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem: Theorem,
    pub matched: bool,
    /// Largest matched distance relative to `max(1, largest modulus)`,
    /// over pairs where at least one side is nonzero.
    pub max_residual: f64,
    /// Unmatched nonzero eigenvalues of the square.
    #[serde(with = "crate::cx::vec")]
    pub leftovers_square: Vec<Complex64>,
    /// Unmatched nonzero products of eigenvalues of `A`.
    #[serde(with = "crate::cx::vec")]
    pub leftovers_products: Vec<Complex64>,
    pub zero_threshold: f64,
    pub nonzero_compared: usize,
    pub tol: f64,
}

fn compare_nonzero(
    theorem: Theorem,
    square: &ComplexSpectrum,
    products: &ComplexSpectrum,
    rho: f64,
    tol: f64,
) -> VerificationReport {
    let zero_threshold = tol * rho.powi(2).max(1.0);
    let report = multiset_match(square, products, tol);
    let nonzero = |z: &Complex64| z.norm() > zero_threshold;
    let mut max_residual = 0.0_f64;
    let mut nonzero_compared = 0;
    for &(i, j) in &report.pairs {
        let (a, b) = (square.values()[i], products.values()[j]);
        if nonzero(&a) || nonzero(&b) {
            nonzero_compared += 1;
            max_residual = max_residual.max((a - b).norm() / report.scale);
        }
    }
    let leftovers_square: Vec<Complex64> =
        report.leftover_a.iter().copied().filter(nonzero).collect();
    let leftovers_products: Vec<Complex64> =
        report.leftover_b.iter().copied().filter(nonzero).collect();
    VerificationReport {
        theorem,
        matched: leftovers_square.is_empty()
            && leftovers_products.is_empty()
            && max_residual <= tol,
        max_residual,
        leftovers_square,
        leftovers_products,
        zero_threshold,
        nonzero_compared,
        tol,
    }
}

/// Nonzero eigenvalues of `A (x) A` against all `n^2` products `lambda_i lambda_j`.
pub fn verify_theorem1(m: &DenseMatrix, tol: f64) -> Result<VerificationReport> {
    verify_theorem1_with(m, tol, SizeCap::default())
}

pub fn verify_theorem1_with(m: &DenseMatrix, tol: f64, cap: SizeCap) -> Result<VerificationReport> {
    let t = tensor_square_with(m, cap)?;
    let base = eigenvalues(m, tol)?;
    let square = eigenvalues(&t, tol)?;
    let rho = spectral_radius(&base)?;
    Ok(compare_nonzero(
        Theorem::Tensor,
        &square,
        &base.ordered_products(),
        rho,
        tol,
    ))
}

/// Nonzero eigenvalues of `A ^ A` against the products `lambda_i lambda_j`, `i < j`.
pub fn verify_theorem2(m: &DenseMatrix, tol: f64) -> Result<VerificationReport> {
    verify_theorem2_with(m, tol, SizeCap::default())
}

pub fn verify_theorem2_with(m: &DenseMatrix, tol: f64, cap: SizeCap) -> Result<VerificationReport> {
    let w = exterior_square_with(m, cap)?;
    let base = eigenvalues(m, tol)?;
    let square = eigenvalues(&w, tol)?;
    let rho = spectral_radius(&base)?;
    Ok(compare_nonzero(
        Theorem::Exterior,
        &square,
        &base.pair_products(),
        rho,
        tol,
    ))
}

pub fn verify(
    theorem: Theorem,
    m: &DenseMatrix,
    tol: f64,
    cap: SizeCap,
) -> Result<VerificationReport> {
    match theorem {
        Theorem::Tensor => verify_theorem1_with(m, tol, cap),
        Theorem::Exterior => verify_theorem2_with(m, tol, cap),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialKind {
    RandomTn,
    General,
}

/// Matrix used for trial `trial` of a seeded batch: even trials are random
/// TN products with `3n` factors, odd trials have entries uniform in `[-1, 1]`.
pub fn batch_matrix(n: usize, seed: u64, trial: usize) -> Result<(TrialKind, DenseMatrix)> {
    let s = derive_seed(seed, 0xba7c, trial as u64);
    if trial.is_multiple_of(2) {
        Ok((TrialKind::RandomTn, random_tn(n, s, 3 * n)?))
    } else {
        Ok((TrialKind::General, random_general(n, s)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: usize,
    pub kind: TrialKind,
    pub matrix: DenseMatrix,
    pub report: VerificationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub theorem: Theorem,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub matched: usize,
    pub all_matched: bool,
    pub worst_residual: f64,
    pub worst_trial: usize,
    pub counterexamples: Vec<Counterexample>,
}

/// Runs a theorem verifier over `trials` seeded matrices.
pub fn verify_batch(
    theorem: Theorem,
    n: usize,
    trials: usize,
    seed: u64,
    tol: f64,
    cap: SizeCap,
) -> Result<BatchReport> {
    if trials == 0 {
        return Err(Error::Validation("at least one trial is required".into()));
    }
    let min_n = if theorem == Theorem::Exterior { 2 } else { 1 };
    if n < min_n {
        return Err(Error::Validation(format!(
            "dimension must be at least {min_n}"
        )));
    }
    // fail on the cap before spending any work
    match theorem {
        Theorem::Tensor => check_cap(cap, (n * n) as u128, "tensor square")?,
        Theorem::Exterior => check_cap(cap, binomial(n, 2), "exterior square")?,
    }
    let results: Vec<Result<(TrialKind, DenseMatrix, VerificationReport)>> =
        par::map_range(trials, |t| {
            let (kind, m) = batch_matrix(n, seed, t)?;
            let r = verify(theorem, &m, tol, cap)?;
            Ok((kind, m, r))
        });
    let mut matched = 0;
    let mut worst_residual = 0.0_f64;
    let mut worst_trial = 0;
    let mut counterexamples = Vec::new();
    for (t, r) in results.into_iter().enumerate() {
        let (kind, matrix, report) = r?;
        if report.max_residual > worst_residual {
            worst_residual = report.max_residual;
            worst_trial = t;
        }
        if report.matched {
            matched += 1;
        } else {
            counterexamples.push(Counterexample {
                trial: t,
                kind,
                matrix,
                report,
            });
        }
    }
    Ok(BatchReport {
        theorem,
        n,
        trials,
        seed,
        matched,
        all_matched: matched == trials,
        worst_residual,
        worst_trial,
        counterexamples,
    })
}

fn check_cap(cap: SizeCap, dim: u128, what: &'static str) -> Result<()> {
    if !cap.force && dim.saturating_mul(dim) > cap.max_entries {
        return Err(Error::Resource {
            what,
            requested: dim.saturating_mul(dim),
            cap: cap.max_entries,
            hint: "set the force flag to build it anyway",
        });
    }
    Ok(())
}
