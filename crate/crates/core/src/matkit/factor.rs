use super::{eig_hermitian, ComplexMatrix, C64};
use crate::error::Result;

pub const DEFAULT_RANK_TOL: f64 = 1e-12;

/// `V = K·diag(J)·K*` with the `+1` signs first.
#[derive(Debug, Clone)]
pub struct SignedFactorization {
    /// `dim × r`
    pub k: ComplexMatrix,
    pub j_signs: Vec<i8>,
    pub n_plus: usize,
    pub n_minus: usize,
}

impl SignedFactorization {
    /// Wraps an explicit factor. `k` is split as `[K₊ | K₋]` with `n_plus`
    /// leading columns carrying sign `+1`.
    pub fn from_parts(k: ComplexMatrix, n_plus: usize) -> Self {
        let r = k.cols();
        assert!(n_plus <= r);
        let mut j_signs = vec![1i8; n_plus];
        j_signs.extend(std::iter::repeat_n(-1i8, r - n_plus));
        Self {
            k,
            j_signs,
            n_plus,
            n_minus: r - n_plus,
        }
    }

    pub fn rank(&self) -> usize {
        self.n_plus + self.n_minus
    }

    pub fn dim(&self) -> usize {
        self.k.rows()
    }

    pub fn k_plus(&self) -> ComplexMatrix {
        self.k.columns(0..self.n_plus)
    }

    pub fn k_minus(&self) -> ComplexMatrix {
        self.k.columns(self.n_plus..self.rank())
    }

    pub fn j_diag(&self) -> Vec<C64> {
        self.j_signs
            .iter()
            .map(|&s| C64::new(s as f64, 0.0))
            .collect()
    }

    /// `K·diag(J)·K*`.
    pub fn reassemble(&self) -> ComplexMatrix {
        if self.rank() == 0 {
            return ComplexMatrix::zeros(self.dim(), self.dim());
        }
        &self.k.mul_diag(&self.j_diag()) * &self.k.adjoint()
    }

    /// `V₊ = K₊·K₊*`.
    pub fn positive_part(&self) -> ComplexMatrix {
        let kp = self.k_plus();
        &kp * &kp.adjoint()
    }

    /// `V₋ = K₋·K₋*`.
    pub fn negative_part(&self) -> ComplexMatrix {
        let km = self.k_minus();
        &km * &km.adjoint()
    }
}

/// `(V₊, V₋)` with `V = V₊ − V₋`, both positive semidefinite, `V₊·V₋ = 0`.
pub fn positive_negative_parts(v: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let e = eig_hermitian(v)?;
    let plus = e.apply(|l| C64::new(l.max(0.0), 0.0))?;
    let minus = e.apply(|l| C64::new((-l).max(0.0), 0.0))?;
    Ok((plus.hermitian_part(), minus.hermitian_part()))
}

/// Signed factorization keeping eigenpairs with `|λ| > rank_tol·‖V‖₂`.
pub fn sign_factorization(v: &ComplexMatrix, rank_tol: f64) -> Result<SignedFactorization> {
    let e = eig_hermitian(v)?;
    let n = e.dim();
    let norm = e.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let cutoff = rank_tol * norm;

    // positives in descending order, then negatives in ascending order
    let mut plus: Vec<usize> = (0..n)
        .filter(|&i| e.eigenvalues[i] > cutoff && norm > 0.0)
        .collect();
    plus.reverse();
    let minus: Vec<usize> = (0..n)
        .filter(|&i| e.eigenvalues[i] < -cutoff && norm > 0.0)
        .collect();
    let order: Vec<usize> = plus.iter().chain(minus.iter()).copied().collect();
    let k = ComplexMatrix::from_fn(n, order.len(), |i, j| {
        let idx = order[j];
        e.vectors[(i, idx)] * e.eigenvalues[idx].abs().sqrt()
    });
    Ok(SignedFactorization::from_parts(k, plus.len()))
}
