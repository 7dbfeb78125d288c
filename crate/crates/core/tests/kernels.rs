//! String Green's function `min(t, s) - t s` on (0, 1): eigenvalues
//! `1 / (k pi)^2` with eigenfunctions `sin(k pi t)`.

use std::f64::consts::PI;

use gkrein_core::compound::{compound_matrix, SizeCap};
use gkrein_core::kernel::{
    discretize, exterior_grid, exterior_grid_radius, grid_spectrum, kernel_tn_check, KernelSpec,
    QuadratureRule, TabulatedKernel,
};
use gkrein_core::positivity::sign_changes;
use gkrein_core::spectra::{eigenpair, eigenvalues, spectral_radius};

fn analytic(k: usize) -> f64 {
    1.0 / ((k as f64) * PI).powi(2)
}

fn leading(n: usize, rule: QuadratureRule) -> Vec<f64> {
    let g = discretize(&KernelSpec::builtin("green_string", None).unwrap(), n, rule).unwrap();
    grid_spectrum(&g, 1e-9).unwrap().values()[..3]
        .iter()
        .map(|z| z.re)
        .collect()
}

#[test]
fn green_eigenvalues_and_sign_changes() {
    let spec = KernelSpec::builtin("green_string", None).unwrap();
    let g = discretize(&spec, 200, QuadratureRule::Midpoint).unwrap();
    let s = grid_spectrum(&g, 1e-9).unwrap();
    for k in 1..=3 {
        let lambda = s.values()[k - 1];
        assert!(
            (lambda.re - analytic(k)).abs() / analytic(k) < 1e-3,
            "k={k}: {lambda}"
        );
        let v = eigenpair(&g.discretized, lambda, 1e-9)
            .unwrap()
            .real_vector();
        assert_eq!(sign_changes(&v, 1e-9).unwrap().strict_count, k - 1);
        // the sampled eigenfunction sin(k pi t) itself
        let f: Vec<f64> = g.nodes.iter().map(|t| (k as f64 * PI * t).sin()).collect();
        let dot: f64 = v.iter().zip(&f).map(|(a, b)| a * b).sum();
        let nf = f.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(dot.abs() / nf > 0.999);
    }
}

#[test]
fn midpoint_error_is_second_order() {
    // Halving h should cut the error by about 4, and one Richardson step
    // should gain at least another order of magnitude.
    let coarse = leading(40, QuadratureRule::Midpoint);
    let fine = leading(80, QuadratureRule::Midpoint);
    for k in 1..=3 {
        let e1 = (coarse[k - 1] - analytic(k)).abs();
        let e2 = (fine[k - 1] - analytic(k)).abs();
        let ratio = e1 / e2;
        assert!((3.5..4.5).contains(&ratio), "k={k} ratio {ratio}");
        let extrapolated = (4.0 * fine[k - 1] - coarse[k - 1]) / 3.0;
        assert!((extrapolated - analytic(k)).abs() < 0.1 * e2);
    }
}

#[test]
fn trapezoid_rule_converges_too() {
    let t = leading(201, QuadratureRule::Trapezoid);
    for k in 1..=3 {
        assert!((t[k - 1] - analytic(k)).abs() / analytic(k) < 1e-3);
    }
}

#[test]
fn exterior_grid_radius_matches_product_of_first_two() {
    let spec = KernelSpec::builtin("green_string", None).unwrap();
    let g = discretize(&spec, 200, QuadratureRule::Midpoint).unwrap();
    let target = analytic(1) * analytic(2);
    let rho = exterior_grid_radius(&g).unwrap();
    assert!((rho - target).abs() / target < 2e-3, "{rho} vs {target}");
    let s = grid_spectrum(&g, 1e-9).unwrap();
    let product = s.values()[0].re * s.values()[1].re;
    assert!((rho - product).abs() / product < 1e-9);
}

#[test]
fn dense_and_matrix_free_exterior_agree() {
    let spec = KernelSpec::builtin("gaussian", Some(0.5)).unwrap();
    let g = discretize(&spec, 25, QuadratureRule::Midpoint).unwrap();
    let dense = spectral_radius(
        &eigenvalues(&exterior_grid(&g, SizeCap::default()).unwrap(), 1e-9).unwrap(),
    )
    .unwrap();
    let free = exterior_grid_radius(&g).unwrap();
    assert!((dense - free).abs() / dense < 1e-9);
}

#[test]
fn tabulated_exterior_is_compound() {
    let vals: Vec<Vec<f64>> = (0..5)
        .map(|i| (0..5).map(|j| ((i + 1) * (j + 2)) as f64 / 7.0).collect())
        .collect();
    let g = discretize(
        &KernelSpec::tabulated(TabulatedKernel::uniform(vals).unwrap()),
        5,
        QuadratureRule::Midpoint,
    )
    .unwrap();
    assert_eq!(
        exterior_grid(&g, SizeCap::default()).unwrap(),
        compound_matrix(&g.discretized, 2).unwrap()
    );
}

#[test]
fn totally_positive_kernels_pass_sampled_checks() {
    for (name, p) in [
        ("green_string", None),
        ("gaussian", Some(0.3)),
        ("cauchy", None),
    ] {
        let spec = KernelSpec::builtin(name, p).unwrap();
        for order in 1..=3 {
            let c = kernel_tn_check(&spec, 48, order, 300, 9, 1e-9).unwrap();
            assert!(c.verdict, "{name} order {order}: {:?}", c.witness);
        }
    }
}
