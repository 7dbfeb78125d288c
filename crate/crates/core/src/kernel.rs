//! Integral kernels on (0, 1): symmetrized Nyström discretization, the second
//! associated kernel, and sampled total-nonnegativity checks.

use serde::{Deserialize, Serialize};

use crate::compound::{exterior_dominant_eigenvalues, exterior_square_with, SizeCap};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::positivity::{sampled_minors, TNCertificate};
use crate::spectra::{ComplexSpectrum, SubspaceOptions};

/// Shift keeping the Cauchy kernel bounded: `k(t, s) = 1 / (t + s + 2 eps)`.
pub const CAUCHY_SHIFT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Builtin {
    /// `min(t, s) - t s`
    GreenString,
    /// `exp(-(t - s)^2 / sigma^2)`
    Gaussian { sigma: f64 },
    /// `1 / ((t + eps) + (s + eps))`
    Cauchy,
    /// `k = 1`
    Constant,
    /// `cos(frequency * pi * (t - s))`
    Cosine { frequency: f64 },
}

/// Kernel sampled on its own nodes; evaluated piecewise constant on the
/// cells around each node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedKernel {
    nodes: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl TabulatedKernel {
    pub fn new(nodes: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        let n = nodes.len();
        if n < 2 {
            return Err(Error::Validation(
                "tabulated kernel needs at least 2 nodes".into(),
            ));
        }
        if !nodes.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Validation(
                "tabulated nodes must be strictly increasing".into(),
            ));
        }
        if nodes[0] <= 0.0 || nodes[n - 1] >= 1.0 {
            return Err(Error::Validation(
                "tabulated nodes must lie in (0, 1)".into(),
            ));
        }
        if values.len() != n || values.iter().any(|r| r.len() != n) {
            return Err(Error::Validation(format!(
                "tabulated values must be {n}x{n} to match the nodes"
            )));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Validation("tabulated values must be finite".into()));
        }
        Ok(TabulatedKernel { nodes, values })
    }

    /// Square table on uniform midpoint nodes `(i + 1/2) / N`.
    pub fn uniform(values: Vec<Vec<f64>>) -> Result<Self> {
        let n = values.len();
        let nodes = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        Self::new(nodes, values)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Cell boundaries: 0, midpoints between nodes, 1.
    fn edges(&self) -> Vec<f64> {
        let mut e = Vec::with_capacity(self.nodes.len() + 1);
        e.push(0.0);
        e.extend(self.nodes.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        e.push(1.0);
        e
    }

    fn cell(&self, t: f64) -> usize {
        let e = self.edges();
        e[1..e.len() - 1].partition_point(|&b| b <= t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    Builtin { kernel: Builtin },
    Tabulated { table: TabulatedKernel },
}

impl KernelSpec {
    /// Looks up a builtin by name. `param` is sigma for `gaussian` (default 1)
    /// and the frequency for `cosine` (default 2).
    pub fn builtin(name: &str, param: Option<f64>) -> Result<Self> {
        let kernel = match name {
            "green_string" => Builtin::GreenString,
            "gaussian" => {
                let sigma = param.unwrap_or(1.0);
                if !(sigma.is_finite() && sigma > 0.0) {
                    return Err(Error::Validation(format!("gaussian sigma must be positive, got {sigma}")));
                }
                Builtin::Gaussian { sigma }
            }
            "cauchy" => Builtin::Cauchy,
            "constant" => Builtin::Constant,
            "cosine" => {
                let frequency = param.unwrap_or(2.0);
                if !frequency.is_finite() {
                    return Err(Error::Validation("cosine frequency must be finite".into()));
                }
                Builtin::Cosine { frequency }
            }
            other => {
                return Err(Error::Validation(format!(
                    "unknown builtin kernel '{other}' (expected green_string, gaussian, cauchy, constant, cosine)"
                )))
            }
        };
        Ok(KernelSpec::Builtin { kernel })
    }

    pub fn tabulated(table: TabulatedKernel) -> Self {
        KernelSpec::Tabulated { table }
    }

    pub fn name(&self) -> String {
        match self {
            KernelSpec::Builtin { kernel } => match kernel {
                Builtin::GreenString => "green_string".into(),
                Builtin::Gaussian { .. } => "gaussian".into(),
                Builtin::Cauchy => "cauchy".into(),
                Builtin::Constant => "constant".into(),
                Builtin::Cosine { .. } => "cosine".into(),
            },
            KernelSpec::Tabulated { .. } => "tabulated".into(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match self {
            KernelSpec::Builtin { .. } => true,
            KernelSpec::Tabulated { table } => {
                let v = &table.values;
                (0..v.len()).all(|i| (0..i).all(|j| v[i][j] == v[j][i]))
            }
        }
    }

    fn eval_unchecked(&self, t: f64, s: f64) -> f64 {
        match self {
            KernelSpec::Builtin { kernel } => match *kernel {
                Builtin::GreenString => t.min(s) - t * s,
                Builtin::Gaussian { sigma } => (-(t - s).powi(2) / (sigma * sigma)).exp(),
                Builtin::Cauchy => 1.0 / ((t + CAUCHY_SHIFT) + (s + CAUCHY_SHIFT)),
                Builtin::Constant => 1.0,
                Builtin::Cosine { frequency } => (frequency * std::f64::consts::PI * (t - s)).cos(),
            },
            KernelSpec::Tabulated { table } => table.values[table.cell(t)][table.cell(s)],
        }
    }

    /// `k(t, s)` for `t, s` in `[0, 1]`.
    pub fn eval(&self, t: f64, s: f64) -> Result<f64> {
        for x in [t, s] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::Validation(format!(
                    "argument {x} outside the domain [0, 1]"
                )));
            }
        }
        Ok(self.eval_unchecked(t, s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    #[default]
    Midpoint,
    Trapezoid,
}

/// Quadrature nodes and weights with the sampled kernel and the symmetrized
/// Nyström matrix `B[i][j] = sqrt(w_i) k(t_i, t_j) sqrt(w_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub values: DenseMatrix,
    pub discretized: DenseMatrix,
}

impl KernelGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// One-sided Nyström matrix `k(t_i, t_j) w_j`, similar to `discretized`.
    pub fn nystrom(&self) -> DenseMatrix {
        let n = self.len();
        DenseMatrix::from_fn(n, |i, j| self.values.get(i, j) * self.weights[j])
    }
}

fn rule_nodes(n: usize, rule: QuadratureRule) -> (Vec<f64>, Vec<f64>) {
    match rule {
        QuadratureRule::Midpoint => {
            let h = 1.0 / n as f64;
            ((0..n).map(|i| (i as f64 + 0.5) * h).collect(), vec![h; n])
        }
        QuadratureRule::Trapezoid => {
            let h = 1.0 / (n - 1) as f64;
            let nodes = (0..n).map(|i| i as f64 * h).collect();
            let weights = (0..n)
                .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
                .collect();
            (nodes, weights)
        }
    }
}

/// Samples the kernel on an `n`-point rule over (0, 1).
///
/// Tabulated kernels use their own nodes (so `n` must equal the table size)
/// with cell-width weights; `rule` applies to builtins only.
pub fn discretize(spec: &KernelSpec, n: usize, rule: QuadratureRule) -> Result<KernelGrid> {
    if n < 2 {
        return Err(Error::Validation("grid size must be at least 2".into()));
    }
    let (nodes, weights) = match spec {
        KernelSpec::Tabulated { table } => {
            if table.nodes.len() != n {
                return Err(Error::Validation(format!(
                    "tabulated kernel has {} nodes but grid size {n} was requested",
                    table.nodes.len()
                )));
            }
            let e = table.edges();
            (
                table.nodes.clone(),
                e.windows(2).map(|w| w[1] - w[0]).collect(),
            )
        }
        KernelSpec::Builtin { .. } => rule_nodes(n, rule),
    };
    let values = match spec {
        KernelSpec::Tabulated { table } => DenseMatrix::from_rows(&table.values)?,
        KernelSpec::Builtin { .. } => DenseMatrix::new(
            n,
            nodes
                .iter()
                .flat_map(|&t| nodes.iter().map(move |&s| (t, s)))
                .map(|(t, s)| spec.eval_unchecked(t, s))
                .collect(),
        )?,
    };
    let root: Vec<f64> = weights.iter().map(|w: &f64| w.sqrt()).collect();
    let discretized = DenseMatrix::from_fn(n, |i, j| root[i] * values.get(i, j) * root[j]);
    Ok(KernelGrid {
        nodes,
        weights,
        values,
        discretized,
    })
}

/// `det [[k(t1,s1), k(t1,s2)], [k(t2,s1), k(t2,s2)]]`.
pub fn second_associated(spec: &KernelSpec, t1: f64, t2: f64, s1: f64, s2: f64) -> Result<f64> {
    Ok(spec.eval(t1, s1)? * spec.eval(t2, s2)? - spec.eval(t1, s2)? * spec.eval(t2, s1)?)
}

/// Sampled check that compound determinants `det[k(t_a, s_b)]` of the given
/// order are nonnegative, with increasing tuples drawn from a midpoint grid
/// of `sample_nodes` points. Trial `i` uses a generator derived from
/// `(seed, order, i)`, so results do not depend on scheduling.
pub fn kernel_tn_check(
    spec: &KernelSpec,
    sample_nodes: usize,
    order: usize,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<TNCertificate> {
    if order == 0 {
        return Err(Error::Validation("order must be at least 1".into()));
    }
    if sample_nodes < order {
        return Err(Error::Validation(format!(
            "need at least {order} sample nodes for order {order}, got {sample_nodes}"
        )));
    }
    let h = 1.0 / sample_nodes as f64;
    let grid: Vec<f64> = (0..sample_nodes).map(|i| (i as f64 + 0.5) * h).collect();
    let k = DenseMatrix::new(
        sample_nodes,
        grid.iter()
            .flat_map(|&t| grid.iter().map(move |&s| (t, s)))
            .map(|(t, s)| spec.eval_unchecked(t, s))
            .collect(),
    )?;
    sampled_minors(&k, order, trials, seed, tol)
}

/// Matrix of the exterior square of the discretized operator on the pairs
/// `(t_i, t_j)`, `i < j`: the Nyström matrix of the second associated kernel.
pub fn exterior_grid(g: &KernelGrid, cap: SizeCap) -> Result<DenseMatrix> {
    exterior_square_with(&g.discretized, cap)
}

/// Spectral radius of [`exterior_grid`] without building it.
pub fn exterior_grid_radius(g: &KernelGrid) -> Result<f64> {
    let (ritz, _) = exterior_dominant_eigenvalues(&g.discretized, SubspaceOptions::default())?;
    Ok(ritz.values()[0].norm())
}

/// Leading eigenvalues of the grid via the dense solver.
pub fn grid_spectrum(g: &KernelGrid, tol: f64) -> Result<ComplexSpectrum> {
    crate::spectra::eigenvalues(&g.discretized, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compound::compound_matrix;
    use crate::spectra::{eigenvalues, multiset_match, spectral_radius};
    use std::f64::consts::PI;

    fn green() -> KernelSpec {
        KernelSpec::builtin("green_string", None).unwrap()
    }

    #[test]
    fn builtin_lookup() {
        assert!(KernelSpec::builtin("nope", None).is_err());
        assert!(KernelSpec::builtin("gaussian", Some(-1.0)).is_err());
        assert_eq!(green().name(), "green_string");
    }

    #[test]
    fn grids_are_well_formed() {
        for rule in [QuadratureRule::Midpoint, QuadratureRule::Trapezoid] {
            let g = discretize(&green(), 17, rule).unwrap();
            assert!(g.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!((g.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(g.weights.iter().all(|&w| w > 0.0));
            assert_eq!(g.discretized, g.discretized.transpose());
        }
        assert!(discretize(&green(), 1, QuadratureRule::Midpoint).is_err());
    }

    #[test]
    fn constant_kernel_is_rank_one() {
        let g = discretize(
            &KernelSpec::builtin("constant", None).unwrap(),
            9,
            QuadratureRule::Midpoint,
        )
        .unwrap();
        let s = eigenvalues(&g.discretized, 1e-9).unwrap();
        assert!((s.values()[0].re - 1.0).abs() < 1e-12);
        assert!(s.values()[1..].iter().all(|z| z.norm() < 1e-12));
        let w = exterior_grid(&g, SizeCap::default()).unwrap();
        assert!(w.max_abs() < 1e-15);
    }

    #[test]
    fn symmetrized_and_plain_nystrom_share_spectrum() {
        let g = discretize(
            &KernelSpec::builtin("cauchy", None).unwrap(),
            12,
            QuadratureRule::Trapezoid,
        )
        .unwrap();
        let a = eigenvalues(&g.discretized, 1e-9).unwrap();
        let b = eigenvalues(&g.nystrom(), 1e-9).unwrap();
        assert!(multiset_match(&a, &b, 1e-10).success);
    }

    #[test]
    fn green_grid_leading_eigenvalue() {
        let g = discretize(&green(), 200, QuadratureRule::Midpoint).unwrap();
        let s = eigenvalues(&g.discretized, 1e-9).unwrap();
        let rel = |k: usize| (s.values()[k - 1].re * (k * k) as f64 * PI * PI - 1.0).abs();
        assert!(rel(1) < 1e-3);
        assert!(rel(2) < 1e-3);
    }

    #[test]
    fn second_associated_examples() {
        // rank one: k = f(t) g(s)
        let table = TabulatedKernel::uniform(
            (0..4)
                .map(|i| (0..4).map(|j| (i + 1) as f64 * (j as f64 + 0.5)).collect())
                .collect(),
        )
        .unwrap();
        let rank_one = KernelSpec::tabulated(table);
        assert_eq!(
            second_associated(&rank_one, 0.1, 0.8, 0.3, 0.6).unwrap(),
            0.0
        );
        assert_eq!(
            second_associated(&green(), 0.3, 0.3, 0.2, 0.9).unwrap(),
            0.0
        );
        // (0.25*0.25 ... ) direct: k(.25,.25)=.1875, k(.75,.75)=.1875, k(.25,.75)=.0625
        let v = second_associated(&green(), 0.25, 0.75, 0.25, 0.75).unwrap();
        assert!((v - (0.1875 * 0.1875 - 0.0625 * 0.0625)).abs() < 1e-15);
        assert!(v > 0.0);
        assert!(second_associated(&green(), -0.1, 0.5, 0.2, 0.3).is_err());
    }

    #[test]
    fn second_associated_is_antisymmetric() {
        let k = KernelSpec::builtin("gaussian", Some(0.7)).unwrap();
        let (t1, t2, s1, s2) = (0.13, 0.71, 0.44, 0.92);
        let base = second_associated(&k, t1, t2, s1, s2).unwrap();
        assert!((second_associated(&k, t2, t1, s1, s2).unwrap() + base).abs() < 1e-15);
        assert!((second_associated(&k, t1, t2, s2, s1).unwrap() + base).abs() < 1e-15);
    }

    #[test]
    fn kernel_tn_examples() {
        let gauss = KernelSpec::builtin("gaussian", Some(1.0)).unwrap();
        for order in [2, 3] {
            let c = kernel_tn_check(&gauss, 64, order, 500, 11, 1e-10).unwrap();
            assert!(c.verdict, "order {order}: {c:?}");
        }
        assert!(
            kernel_tn_check(&green(), 64, 2, 500, 11, 1e-10)
                .unwrap()
                .verdict
        );
        let cosine = KernelSpec::builtin("cosine", Some(2.0)).unwrap();
        let c = kernel_tn_check(&cosine, 64, 2, 500, 11, 1e-10).unwrap();
        assert!(!c.verdict);
        assert!(c.witness.unwrap().value < 0.0);
        assert!(kernel_tn_check(&green(), 1, 2, 10, 0, 1e-10).is_err());
    }

    #[test]
    fn exterior_grid_routes_agree() {
        let g = discretize(&green(), 30, QuadratureRule::Midpoint).unwrap();
        let dense = exterior_grid(&g, SizeCap::default()).unwrap();
        assert_eq!(dense, compound_matrix(&g.discretized, 2).unwrap());
        let rho_dense = spectral_radius(&eigenvalues(&dense, 1e-9).unwrap()).unwrap();
        let rho_free = exterior_grid_radius(&g).unwrap();
        assert!((rho_dense - rho_free).abs() < 1e-10 * rho_dense);
    }

    #[test]
    fn tabulated_grid_and_lookup() {
        let values = vec![
            vec![2.0, 1.0, 0.0],
            vec![1.0, 2.0, 1.0],
            vec![0.0, 1.0, 2.0],
        ];
        let t = TabulatedKernel::new(vec![0.1, 0.5, 0.7], values.clone()).unwrap();
        let spec = KernelSpec::tabulated(t);
        assert!(discretize(&spec, 4, QuadratureRule::Midpoint).is_err());
        let g = discretize(&spec, 3, QuadratureRule::Midpoint).unwrap();
        let w = [0.3, 0.3, 0.4];
        for (a, b) in g.weights.iter().zip(w) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(spec.eval(0.0, 0.95).unwrap(), 0.0);
        assert_eq!(spec.eval(0.31, 0.5).unwrap(), 2.0);
        assert!(TabulatedKernel::new(vec![0.5, 0.2], vec![vec![1.0; 2]; 2]).is_err());
        assert!(TabulatedKernel::new(vec![0.2, 0.5], vec![vec![1.0; 3]; 2]).is_err());
    }
}
