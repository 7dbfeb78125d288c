//! Block subspace iteration with Rayleigh-Ritz extraction for operators that
//! are only available as a matrix-vector product.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{qr, ComplexSpectrum};
use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceOptions {
    /// Number of vectors iterated together.
    pub block: usize,
    /// Relative change of the leading Ritz values that counts as converged.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SubspaceOptions {
    fn default() -> Self {
        SubspaceOptions {
            block: 8,
            tol: 1e-12,
            max_iter: 2000,
            seed: 0x5eed,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn orthonormalize(cols: &mut [Vec<f64>], rng: &mut ChaCha8Rng) {
    for k in 0..cols.len() {
        for attempt in 0..3 {
            for _ in 0..2 {
                for j in 0..k {
                    let (head, tail) = cols.split_at_mut(k);
                    let c = dot(&head[j], &tail[0]);
                    for (x, q) in tail[0].iter_mut().zip(&head[j]) {
                        *x -= c * q;
                    }
                }
            }
            let norm = dot(&cols[k], &cols[k]).sqrt();
            if norm > 1e-300 && (attempt > 0 || norm.is_finite()) {
                for x in cols[k].iter_mut() {
                    *x /= norm;
                }
                break;
            }
            // rank deficient block: replace the column and retry
            for x in cols[k].iter_mut() {
                *x = rng.random_range(-1.0..1.0);
            }
        }
    }
}

/// Leading eigenvalues of the linear operator `apply` on `R^dim`.
///
/// Returns the Ritz values of the converged block (at most `opts.block`
/// values), sorted like any [`ComplexSpectrum`], together with the number of
/// iterations used. Convergence is declared when the two largest-modulus Ritz
/// values change by less than `opts.tol` relative between sweeps.
pub fn dominant_eigenvalues<F>(
    dim: usize,
    apply: F,
    opts: SubspaceOptions,
) -> Result<(ComplexSpectrum, usize)>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync + Send,
{
    if dim == 0 {
        return Err(Error::Validation(
            "operator dimension must be positive".into(),
        ));
    }
    let p = opts.block.clamp(1, dim);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut q: Vec<Vec<f64>> = (0..p)
        .map(|k| {
            if k == 0 {
                vec![1.0; dim]
            } else {
                (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()
            }
        })
        .collect();
    orthonormalize(&mut q, &mut rng);

    let mut previous: Option<Vec<num_complex::Complex64>> = None;
    let mut stable = 0;
    for it in 1..=opts.max_iter {
        let z: Vec<Vec<f64>> = par::map_slice(&q, |col| apply(col));
        let mut h = vec![0.0; p * p];
        for i in 0..p {
            for j in 0..p {
                h[i * p + j] = dot(&q[i], &z[j]);
            }
        }
        let ritz = ComplexSpectrum::new(qr::eigenvalues_dense(h, p)?);
        let lead: Vec<_> = ritz.values().iter().take(2.min(p)).copied().collect();
        let top = lead[0].norm();
        if top == 0.0 {
            return Ok((ritz, it));
        }
        if let Some(prev) = &previous {
            let change = lead
                .iter()
                .zip(prev)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            if change <= opts.tol * top {
                stable += 1;
                if stable >= 2 {
                    return Ok((ritz, it));
                }
            } else {
                stable = 0;
            }
        }
        previous = Some(lead);
        q = z;
        orthonormalize(&mut q, &mut rng);
    }
    Err(Error::NoConvergence {
        method: "subspace iteration",
        iterations: opts.max_iter,
        n: dim,
        norm: f64::NAN,
        row: 0,
    })
}
