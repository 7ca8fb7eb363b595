//! Eigendecomposition of general (non-Hermitian) complex matrices.
//!
//! Eigenvalues come from a Hessenberg reduction followed by single-shift QR
//! with Wilkinson shifts. Eigenvectors are then recovered by shifted inverse
//! iteration, one block per cluster of (numerically) equal eigenvalues.

use super::{ComplexMatrix, Lu, C64};
use crate::error::{Error, Result};

const MAX_EIGENVECTOR_CONDITION: f64 = 1e8;
const CLUSTER_TOL: f64 = 1e-9;
const INVERSE_ITERATIONS: usize = 3;

/// `T = S·diag(values)·S⁻¹`.
#[derive(Debug, Clone)]
pub struct GeneralEig {
    pub values: Vec<C64>,
    pub vectors: ComplexMatrix,
    pub inverse_vectors: ComplexMatrix,
    /// 2-norm condition number of `vectors` (columns normalized).
    pub condition: f64,
}

impl GeneralEig {
    /// `S·diag(f(μᵢ))·S⁻¹`.
    pub fn apply(&self, f: impl Fn(C64) -> Result<C64>) -> Result<ComplexMatrix> {
        let d = self
            .values
            .iter()
            .map(|&z| f(z))
            .collect::<Result<Vec<_>>>()?;
        Ok(&self.vectors.mul_diag(&d) * &self.inverse_vectors)
    }
}

pub fn eigenvalues_general(a: &ComplexMatrix) -> Result<Vec<C64>> {
    let n = a.ensure_square()?;
    a.ensure_finite()?;
    let mut h = hessenberg(a);
    let mut values = vec![C64::new(0.0, 0.0); n];
    let mut hi = n;
    let mut iter = 0usize;
    let mut since_deflation = 0usize;
    let max_iter = 100 * n.max(1);
    let eps = f64::EPSILON;

    while hi > 0 {
        let last = hi - 1;
        // locate the start of the active unreduced block
        let mut lo = last;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if sub <= eps * diag.max(f64::MIN_POSITIVE) {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == last {
            values[last] = h[(last, last)];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        iter += 1;
        since_deflation += 1;
        if iter > max_iter {
            return Err(Error::NoConvergence {
                what: "Hessenberg QR",
                iterations: max_iter,
            });
        }
        let shift = if since_deflation % 11 == 10 {
            // exceptional shift
            h[(last, last)] + C64::new(0.75 * h[(last, last - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[(last - 1, last - 1)],
                h[(last - 1, last)],
                h[(last, last - 1)],
                h[(last, last)],
            )
        };
        qr_step(&mut h, lo, last, shift);
    }
    Ok(values)
}

/// Full eigendecomposition; fails on defective or badly conditioned
/// eigenbases.
pub fn eig_general(a: &ComplexMatrix) -> Result<GeneralEig> {
    let n = a.ensure_square()?;
    let values = eigenvalues_general(a)?;
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    let clusters = cluster(&values, CLUSTER_TOL * scale);
    let mut s = ComplexMatrix::zeros(n, n);
    let mut col = 0;
    for members in &clusters {
        let m = members.len();
        let mean: C64 = members.iter().map(|&i| values[i]).sum::<C64>() / m as f64;
        let nudge = C64::from_polar(1e-10 * scale.max(1.0), 0.7);
        let mut shifted = a.clone();
        for i in 0..n {
            shifted[(i, i)] -= mean + nudge;
        }
        let lu = Lu::new(&shifted)?;
        let mut x = start_block(n, m, col);
        for _ in 0..INVERSE_ITERATIONS {
            x = lu.solve(&x)?;
            orthonormalize(&mut x)?;
        }
        for j in 0..m {
            for i in 0..n {
                s[(i, col + j)] = x[(i, j)];
            }
        }
        col += m;
    }

    let lu = Lu::new(&s)?;
    if lu.is_singular() {
        return Err(Error::IllConditionedEigenbasis {
            condition: f64::INFINITY,
        });
    }
    let s_inv = lu.inverse()?;
    let condition = s.operator_norm() * s_inv.operator_norm();
    if !condition.is_finite() || condition > MAX_EIGENVECTOR_CONDITION {
        return Err(Error::IllConditionedEigenbasis { condition });
    }
    let d = &(&s_inv * a) * &s;
    let mut off = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                off += d[(i, j)].norm_sqr();
            }
        }
    }
    if off.sqrt() > 1e-8 * scale * condition {
        return Err(Error::IllConditionedEigenbasis {
            condition: f64::INFINITY,
        });
    }
    Ok(GeneralEig {
        values: d.diagonal(),
        vectors: s,
        inverse_vectors: s_inv,
        condition,
    })
}

fn cluster(values: &[C64], tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    'outer: for (i, &v) in values.iter().enumerate() {
        for g in groups.iter_mut() {
            if g.iter().any(|&j| (values[j] - v).norm() <= tol) {
                g.push(i);
                continue 'outer;
            }
        }
        groups.push(vec![i]);
    }
    groups
}

/// Deterministic, generic starting vectors for inverse iteration.
fn start_block(n: usize, m: usize, offset: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, m, |i, j| {
        let t = (i * 7 + (j + offset) * 13 + 1) as f64;
        C64::new(
            (t * 0.618_033_988_7).sin() + 1.1,
            (t * 0.414_213_562_3).cos(),
        )
    })
}

fn orthonormalize(x: &mut ComplexMatrix) -> Result<()> {
    let (n, m) = (x.rows(), x.cols());
    for j in 0..m {
        for k in 0..j {
            let dot: C64 = (0..n).map(|i| x[(i, k)].conj() * x[(i, j)]).sum();
            for i in 0..n {
                let t = x[(i, k)];
                x[(i, j)] -= dot * t;
            }
        }
        let norm = (0..n).map(|i| x[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::IllConditionedEigenbasis {
                condition: f64::INFINITY,
            });
        }
        for i in 0..n {
            x[(i, j)] /= norm;
        }
    }
    Ok(())
}

fn hessenberg(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let norm = ((k + 1)..n)
            .map(|i| h[(i, k)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        let mut v: Vec<C64> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        // h ← (I − 2vv*)·h on rows k+1..n
        for j in 0..n {
            let dot: C64 = v
                .iter()
                .enumerate()
                .map(|(t, vi)| vi.conj() * h[(k + 1 + t, j)])
                .sum();
            for (t, vi) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= vi * dot * 2.0;
            }
        }
        // h ← h·(I − 2vv*) on columns k+1..n
        for i in 0..n {
            let dot: C64 = v
                .iter()
                .enumerate()
                .map(|(t, vi)| h[(i, k + 1 + t)] * vi)
                .sum();
            for (t, vi) in v.iter().enumerate() {
                h[(i, k + 1 + t)] -= dot * vi.conj() * 2.0;
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    h
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr * 0.25 - det).sqrt();
    let l1 = tr * 0.5 + disc;
    let l2 = tr * 0.5 - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit shifted QR step on the block `lo..=hi` of `h`.
fn qr_step(h: &mut ComplexMatrix, lo: usize, hi: usize, shift: C64) {
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let a = h[(k, k)];
        let b = h[(k + 1, k)];
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (1.0, C64::new(0.0, 0.0))
        } else if a.norm() == 0.0 {
            (0.0, b.conj() / b.norm())
        } else {
            let phase = a / a.norm();
            (a.norm() / r, phase * b.conj() / r)
        };
        // rows k, k+1: [c s; -s* c]
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = x * c + s * y;
            h[(k + 1, j)] = -s.conj() * x + y * c;
        }
        rotations.push((k, c, s));
    }
    for (k, c, s) in rotations {
        // columns k, k+1 multiplied by G*
        let top = (k + 2).min(hi);
        for i in lo..=top {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + y * s.conj();
            h[(i, k + 1)] = -s * x + y * c;
        }
    }
    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}
