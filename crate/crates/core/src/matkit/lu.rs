use super::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Largest condition estimate accepted by [`solve_shifted`].
pub const MAX_CONDITION: f64 = 1e14;

/// Partial-pivoting LU factorization `P·A = L·U`, stored packed.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: ComplexMatrix,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl Lu {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        let n = a.ensure_square()?;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        for k in 0..n {
            let (piv, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == 0.0 {
                singular = true;
                continue;
            }
            if piv != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(piv, j)];
                    lu[(piv, j)] = tmp;
                }
                perm.swap(k, piv);
                sign = -sign;
            }
            let d = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                if f != C64::new(0.0, 0.0) {
                    for j in (k + 1)..n {
                        let t = lu[(k, j)];
                        lu[(i, j)] -= f * t;
                    }
                }
            }
        }
        Ok(Self {
            n,
            lu,
            perm,
            sign,
            singular,
        })
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn det(&self) -> C64 {
        if self.singular {
            return C64::new(0.0, 0.0);
        }
        (0..self.n).map(|i| self.lu[(i, i)]).product::<C64>() * self.sign
    }

    /// Solves `A·X = B`. The factorization must be nonsingular.
    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        if b.rows() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has {} rows, matrix has {}",
                b.rows(),
                self.n
            )));
        }
        if self.singular {
            return Err(Error::Singular {
                condition: f64::INFINITY,
            });
        }
        let n = self.n;
        let m = b.cols();
        let mut x = ComplexMatrix::from_fn(n, m, |i, j| b[(self.perm[i], j)]);
        for c in 0..m {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in (i + 1)..n {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<ComplexMatrix> {
        self.solve(&ComplexMatrix::identity(self.n))
    }
}

/// `det(A)` through pivoted LU; exactly zero for a structurally singular
/// factorization.
pub fn det(a: &ComplexMatrix) -> Result<C64> {
    if a.ensure_square()? == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    Ok(Lu::new(a)?.det())
}

/// Inverse with a 1-norm condition check against [`MAX_CONDITION`].
pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let lu = Lu::new(a)?;
    let inv = lu.inverse()?;
    let condition = a.norm_one() * inv.norm_one();
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::Singular { condition });
    }
    Ok(inv)
}

/// Solves `A·X = B` with the same condition check as [`inverse`].
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let lu = Lu::new(a)?;
    let inv = lu.inverse()?;
    let condition = a.norm_one() * inv.norm_one();
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::Singular { condition });
    }
    lu.solve(b)
}

/// Solves `(A − z·I)·X = B`.
pub fn solve_shifted(a: &ComplexMatrix, z: C64, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.ensure_square()?;
    let mut shifted = a.clone();
    for i in 0..n {
        shifted[(i, i)] -= z;
    }
    solve(&shifted, b)
}
