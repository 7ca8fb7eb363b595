use super::{ComplexMatrix, C64};
use crate::error::{Error, Result};

pub const JACOBI_MAX_SWEEPS: usize = 40;
const OFF_DIAGONAL_TOL: f64 = 1e-14;

/// Eigendecomposition `A = V·diag(λ)·V*` of a Hermitian matrix, eigenvalues
/// ascending.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    /// `V·diag(f(λᵢ))·V*`.
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> Result<ComplexMatrix> {
        let mut d = Vec::with_capacity(self.eigenvalues.len());
        for &l in &self.eigenvalues {
            let v = f(l);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::FunctionNotFinite(l));
            }
            d.push(v);
        }
        Ok(&self.vectors.mul_diag(&d) * &self.vectors.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.eigenvalues.last().copied()
    }

    /// Number of eigenvalues `≤ λ`.
    pub fn count_at_most(&self, lambda: f64) -> usize {
        self.eigenvalues.partition_point(|&l| l <= lambda)
    }
}

/// Cyclic complex Jacobi eigensolver.
///
/// The input is checked for Hermitian symmetry within `1e-12·‖A‖_F` and
/// symmetrized. Sweeps stop once the off-diagonal Frobenius mass is at most
/// `1e-14·‖A‖_F`.
pub fn eig_hermitian(a: &ComplexMatrix) -> Result<HermitianEig> {
    let mut m = a.require_hermitian()?;
    m.ensure_finite()?;
    let n = m.dim();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm();
    let target = OFF_DIAGONAL_TOL * scale;

    let mut converged = false;
    for _sweep in 0..=JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&m) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            what: "Jacobi eigensolver",
            iterations: JACOBI_MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEig {
        eigenvalues,
        vectors,
    })
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates `m[(p,q)]` with the unitary `U = diag(1, e^{-iφ})·R(θ)` acting
/// on the (p,q) plane, `m ← U*·m·U`, `v ← v·U`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let pc = phase.conj();

    let u_qp = -pc * s;
    let u_qq = pc * c;
    let n = m.rows();

    // m ← m·U
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * c + akq * u_qp;
        m[(k, q)] = akp * s + akq * u_qq;
    }
    // m ← U*·m
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = apk * c + aqk * u_qp.conj();
        m[(q, k)] = apk * s + aqk * u_qq.conj();
    }
    m[(p, q)] = C64::new(0.0, 0.0);
    m[(q, p)] = C64::new(0.0, 0.0);
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * u_qp;
        v[(k, q)] = vkp * s + vkq * u_qq;
    }
}
