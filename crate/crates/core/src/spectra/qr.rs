//! Dense nonsymmetric eigenvalues: radix-2 balancing, Householder reduction to
//! upper Hessenberg form, then Francis double-shift QR on the Hessenberg matrix.

use num_complex::Complex64;

use crate::error::{Error, Result};

const RADIX: f64 = 2.0;

/// Diagonal similarity scaling by powers of two so row and column norms are
/// comparable. Exact in floating point, so the spectrum is untouched.
pub(crate) fn balance(a: &mut [f64], n: usize) {
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j * n + i].abs();
                    r += a[i * n + j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut g = r / RADIX;
            let mut f = 1.0;
            let s = c + r;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[i * n + j] *= g;
                }
                for j in 0..n {
                    a[j * n + i] *= f;
                }
            }
        }
    }
}

/// In-place Householder reduction to upper Hessenberg form (orthogonal similarity).
pub(crate) fn hessenberg(a: &mut [f64], n: usize) {
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    for k in 0..n - 2 {
        let mut scale = 0.0;
        for i in k + 1..n {
            scale += a[i * n + k].abs();
        }
        if scale == 0.0 {
            continue;
        }
        let mut h = 0.0;
        for i in k + 1..n {
            v[i] = a[i * n + k] / scale;
            h += v[i] * v[i];
        }
        let g = if v[k + 1] > 0.0 { -h.sqrt() } else { h.sqrt() };
        h -= v[k + 1] * g;
        v[k + 1] -= g;
        // Reflector P = I - v v^T / h on rows/cols k+1..n.
        for j in 0..n {
            let mut f = 0.0;
            for i in k + 1..n {
                f += v[i] * a[i * n + j];
            }
            f /= h;
            for i in k + 1..n {
                a[i * n + j] -= f * v[i];
            }
        }
        for i in 0..n {
            let mut f = 0.0;
            for j in k + 1..n {
                f += v[j] * a[i * n + j];
            }
            f /= h;
            for j in k + 1..n {
                a[i * n + j] -= f * v[j];
            }
        }
        a[(k + 1) * n + k] = scale * g;
        for i in k + 2..n {
            a[i * n + k] = 0.0;
        }
    }
}

#[inline]
fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of an upper Hessenberg matrix by the Francis double-shift QR
/// iteration. `a` is destroyed. `max_iter` bounds the total number of QR sweeps.
pub(crate) fn hqr(a: &mut [f64], n: usize, max_iter: usize) -> Result<Vec<Complex64>> {
    let idx = |i: isize, j: isize| (i as usize) * n + j as usize;
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];

    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[i * n + j].abs();
        }
    }

    let mut total_iters = 0usize;
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    let (mut p, mut q, mut r): (f64, f64, f64);
    while nn >= 0 {
        let mut its = 0usize;
        loop {
            let mut l = nn;
            while l >= 1 {
                let mut s = a[idx(l - 1, l - 1)].abs() + a[idx(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[idx(l, l - 1)].abs() + s == s {
                    a[idx(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[idx(nn, nn)];
            if l == nn {
                wr[nn as usize] = x + t;
                wi[nn as usize] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[idx(nn - 1, nn - 1)];
            let mut w = a[idx(nn, nn - 1)] * a[idx(nn - 1, nn)];
            if l == nn - 1 {
                p = 0.5 * (y - x);
                q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                let (u, v) = (nn as usize - 1, nn as usize);
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[u] = x + z;
                    wr[v] = if z != 0.0 { x - w / z } else { x + z };
                    wi[u] = 0.0;
                    wi[v] = 0.0;
                } else {
                    wr[u] = x + p;
                    wr[v] = x + p;
                    wi[u] = z;
                    wi[v] = -z;
                }
                nn -= 2;
                break;
            }

            if total_iters >= max_iter {
                return Err(Error::NoConvergence {
                    method: "Francis double-shift QR",
                    iterations: total_iters,
                    n,
                    norm: anorm,
                    row: nn as usize,
                });
            }
            if its > 0 && its.is_multiple_of(10) {
                // Exceptional shift.
                t += x;
                for i in 0..=nn {
                    a[idx(i, i)] -= x;
                }
                let s = a[idx(nn, nn - 1)].abs() + a[idx(nn - 1, nn - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total_iters += 1;

            let mut m = nn - 2;
            let mut z;
            loop {
                z = a[idx(m, m)];
                r = x - z;
                let s = y - z;
                p = (r * s - w) / a[idx(m + 1, m)] + a[idx(m, m + 1)];
                q = a[idx(m + 1, m + 1)] - z - r - s;
                r = a[idx(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[idx(m, m - 1)].abs() * (q.abs() + r.abs());
                let v =
                    p.abs() * (a[idx(m - 1, m - 1)].abs() + z.abs() + a[idx(m + 1, m + 1)].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nn {
                a[idx(i, i - 2)] = 0.0;
                if i != m + 2 {
                    a[idx(i, i - 3)] = 0.0;
                }
            }
            let mut k = m;
            while k < nn {
                if k != m {
                    p = a[idx(k, k - 1)];
                    q = a[idx(k + 1, k - 1)];
                    r = 0.0;
                    if k != nn - 1 {
                        r = a[idx(k + 2, k - 1)];
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[idx(k, k - 1)] = -a[idx(k, k - 1)];
                        }
                    } else {
                        a[idx(k, k - 1)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        p = a[idx(k, j)] + q * a[idx(k + 1, j)];
                        if k != nn - 1 {
                            p += r * a[idx(k + 2, j)];
                            a[idx(k + 2, j)] -= p * z;
                        }
                        a[idx(k + 1, j)] -= p * y;
                        a[idx(k, j)] -= p * x;
                    }
                    let mmin = if nn < k + 3 { nn } else { k + 3 };
                    for i in l..=mmin {
                        p = x * a[idx(i, k)] + y * a[idx(i, k + 1)];
                        if k != nn - 1 {
                            p += z * a[idx(i, k + 2)];
                            a[idx(i, k + 2)] -= p * r;
                        }
                        a[idx(i, k + 1)] -= p * q;
                        a[idx(i, k)] -= p;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| Complex64::new(re, im))
        .collect())
}

/// Full pipeline on a row-major copy of the matrix.
pub(crate) fn eigenvalues_dense(mut a: Vec<f64>, n: usize) -> Result<Vec<Complex64>> {
    balance(&mut a, n);
    hessenberg(&mut a, n);
    hqr(&mut a, n, 100 * n.max(1))
}
