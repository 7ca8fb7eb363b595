//! Reference computations for the integration tests, written independently
//! of the library's eigen-solvers and factorizations.

#![allow(dead_code)]

use krein_shift::matkit::{ComplexMatrix, C64};

/// Householder reduction of a Hermitian matrix to a real symmetric
/// tridiagonal `(diagonal, |off-diagonal|)` with the same spectrum.
pub fn tridiagonal(a: &ComplexMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.rows();
    let mut w: Vec<Vec<C64>> = (0..n)
        .map(|i| (0..n).map(|j| a[(i, j)]).collect())
        .collect();
    for k in 0..n.saturating_sub(2) {
        let norm: f64 = (k + 1..n).map(|i| w[i][k].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = w[k + 1][k];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let mut v: Vec<C64> = vec![C64::new(0.0, 0.0); n];
        for i in k + 1..n {
            v[i] = w[i][k];
        }
        v[k + 1] += phase * norm;
        let vn: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for c in v.iter_mut() {
            *c /= vn;
        }
        // w <- (I - 2vv*) w (I - 2vv*)
        let dots: Vec<C64> = (0..n)
            .map(|j| (0..n).map(|i| v[i].conj() * w[i][j]).sum())
            .collect();
        for (row, vi) in w.iter_mut().zip(&v) {
            for (x, d) in row.iter_mut().zip(&dots) {
                *x -= vi * d * 2.0;
            }
        }
        for row in w.iter_mut() {
            let dot: C64 = (0..n).map(|j| row[j] * v[j]).sum();
            for j in 0..n {
                row[j] -= dot * v[j].conj() * 2.0;
            }
        }
    }
    let d = (0..n).map(|i| w[i][i].re).collect();
    let e = (1..n).map(|i| w[i][i - 1].norm()).collect();
    (d, e)
}

/// Sturm count of a symmetric tridiagonal: eigenvalues strictly below `x`.
pub fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let scale = d.iter().chain(e).fold(1.0f64, |m, v| m.max(v.abs()));
    let tiny = f64::EPSILON * scale;
    let mut negatives = 0;
    let mut q = 1.0;
    for i in 0..d.len() {
        let off = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] / q };
        q = d[i] - x - off;
        if q.abs() < tiny {
            q = -tiny;
        }
        if q < 0.0 {
            negatives += 1;
        }
    }
    negatives
}

/// Number of eigenvalues of Hermitian `a` strictly below `x`.
pub fn count_below(a: &ComplexMatrix, x: f64) -> usize {
    let (d, e) = tridiagonal(a);
    sturm_count(&d, &e, x)
}

/// `N_A(λ)`: eigenvalues not exceeding `λ`, for `λ` off the spectrum.
pub fn counting(a: &ComplexMatrix, lambda: f64) -> usize {
    count_below(a, lambda)
}

/// `ξ(λ) = N_{H₀}(λ) − N_H(λ)`.
pub fn xi_by_counting(h0: &ComplexMatrix, h: &ComplexMatrix, lambda: f64) -> f64 {
    counting(h0, lambda) as f64 - counting(h, lambda) as f64
}

/// Ascending eigenvalues of a Hermitian matrix by bisection on the inertia
/// count inside the Gershgorin interval.
pub fn eigenvalues_by_bisection(a: &ComplexMatrix) -> Vec<f64> {
    let n = a.rows();
    if n == 0 {
        return vec![];
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].norm()).sum();
        lo = lo.min(a[(i, i)].re - r);
        hi = hi.max(a[(i, i)].re + r);
    }
    lo -= 1.0;
    hi += 1.0;
    let width = (hi - lo).max(1.0);
    let (d, e) = tridiagonal(a);
    (0..n)
        .map(|k| {
            let (mut a_, mut b_) = (lo, hi);
            for _ in 0..200 {
                let m = 0.5 * (a_ + b_);
                if sturm_count(&d, &e, m) > k {
                    b_ = m;
                } else {
                    a_ = m;
                }
                if b_ - a_ <= 4.0 * f64::EPSILON * width {
                    break;
                }
            }
            0.5 * (a_ + b_)
        })
        .collect()
}

/// Gauss–Jordan inverse with partial pivoting.
pub fn gauss_jordan_inverse(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let mut m: Vec<Vec<C64>> = (0..n)
        .map(|i| {
            (0..2 * n)
                .map(|j| {
                    if j < n {
                        a[(i, j)]
                    } else if j - n == i {
                        C64::new(1.0, 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| m[x][k].norm().total_cmp(&m[y][k].norm()))
            .unwrap();
        m.swap(k, p);
        let piv = m[k][k];
        assert!(piv.norm() > 0.0, "singular matrix");
        for v in m[k].iter_mut() {
            *v /= piv;
        }
        for i in 0..n {
            if i != k {
                let f = m[i][k];
                if f != C64::new(0.0, 0.0) {
                    let pivot_row = m[k].clone();
                    for (x, p) in m[i].iter_mut().zip(&pivot_row) {
                        *x -= f * p;
                    }
                }
            }
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| m[i][n + j])
}

/// `tr (A − z)⁻¹` via Gauss–Jordan.
pub fn resolvent_trace(a: &ComplexMatrix, z: C64) -> C64 {
    let n = a.rows();
    let shifted = a - &ComplexMatrix::scalar(n, z);
    gauss_jordan_inverse(&shifted).trace()
}

/// Matrix exponential by Taylor series with scaling and squaring.
pub fn expm_taylor(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let norm = a.frobenius_norm();
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let b = a.scale_real(0.5f64.powi(s));
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=30 {
        term = (&term * &b).scale_real(1.0 / k as f64);
        sum = &sum + &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Composite Simpson rule with `2m` panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let n = 2 * m;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// `Σ |λᵢ(V)|`.
pub fn trace_norm_hermitian(v: &ComplexMatrix) -> f64 {
    eigenvalues_by_bisection(v).iter().map(|e| e.abs()).sum()
}

/// Sorted union of values with near-duplicates (within `tol`) removed.
pub fn merged(mut pts: Vec<f64>, tol: f64) -> Vec<f64> {
    pts.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for p in pts {
        if out.last().is_none_or(|&q| p - q > tol) {
            out.push(p);
        }
    }
    out
}
