//! Logarithms of dissipative matrices.
//!
//! For `T` with `Im T ⪰ 0` and `0 ∉ spec(T)` the logarithm is
//!
//! ```text
//! log T = −i ∫₀^∞ [(T + iμ)⁻¹ − (1 + iμ)⁻¹ I] dμ,
//! ```
//!
//! which is evaluated here by adaptive Gauss–Kronrod quadrature. Anti-dissipative
//! matrices use `log S = (log S*)*`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matkit::{det, eig_general, eig_hermitian, ComplexMatrix, Lu, C64};
use crate::quad::{integrate, AdaptiveOptions};

/// Tolerance (relative to `‖T‖`) on the sign of `Im T`.
pub const DISSIPATIVE_TOL: f64 = 1e-12;
/// Largest 1-norm condition number accepted by [`logm_dissipative`].
pub const MAX_LOG_CONDITION: f64 = 1e12;

/// Scalar logarithm branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Cut along the negative imaginary axis, `arg ∈ (−π/2, 3π/2)`.
    Log,
    /// Principal branch, cut along the negative reals, `arg ∈ (−π, π)`.
    Ln,
}

impl std::str::FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "log" => Ok(Branch::Log),
            "ln" => Ok(Branch::Ln),
            other => Err(Error::Parse(format!(
                "unknown branch '{other}' (expected log or ln)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    /// `δ = split_fraction / ‖T⁻¹‖₂` separates the first panel.
    pub split_fraction: f64,
    /// Switch to the `u = 1/μ` tail; `None` means `max(1, 4‖T‖₂)`.
    pub tail_switch: Option<f64>,
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-11,
            split_fraction: 0.5,
            tail_switch: None,
            max_panels: 4096,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::Constraint(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return Err(Error::Constraint(format!(
                "split_fraction must lie in (0,1), got {}",
                self.split_fraction
            )));
        }
        if let Some(t) = self.tail_switch {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Constraint(format!(
                    "tail_switch must be positive, got {t}"
                )));
            }
        }
        if self.max_panels < 64 {
            return Err(Error::Constraint(format!(
                "max_panels must be at least 64, got {}",
                self.max_panels
            )));
        }
        Ok(())
    }
}

pub fn scalar_log(z: C64, branch: Branch) -> Result<C64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    match branch {
        Branch::Log => {
            if z.re == 0.0 && z.im <= 0.0 {
                return Err(Error::OnBranchCut { re: z.re, im: z.im });
            }
            let mut arg = z.arg();
            if arg <= -PI / 2.0 {
                arg += 2.0 * PI;
            }
            Ok(C64::new(z.norm().ln(), arg))
        }
        Branch::Ln => {
            if z.im == 0.0 && z.re <= 0.0 {
                return Err(Error::OnBranchCut { re: z.re, im: z.im });
            }
            Ok(z.ln())
        }
    }
}

/// Smallest eigenvalue of `Im T`.
pub fn min_imag_eig(t: &ComplexMatrix) -> Result<f64> {
    Ok(eig_hermitian(&t.imag_part())?.min().unwrap_or(0.0))
}

/// Largest eigenvalue of `Im T`.
pub fn max_imag_eig(t: &ComplexMatrix) -> Result<f64> {
    Ok(eig_hermitian(&t.imag_part())?.max().unwrap_or(0.0))
}

/// Logarithm of a dissipative, invertible matrix via the resolvent integral.
pub fn logm_dissipative(t: &ComplexMatrix, cfg: &QuadratureConfig) -> Result<ComplexMatrix> {
    cfg.validate()?;
    let n = t.ensure_square()?;
    if n == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    t.ensure_finite()?;
    let norm = t.operator_norm();
    let bound = -DISSIPATIVE_TOL * norm;
    let min_eig = min_imag_eig(t)?;
    if min_eig < bound {
        return Err(Error::NotDissipative { min_eig, bound });
    }

    let lu = Lu::new(t)?;
    if lu.is_singular() {
        return Err(Error::Singular {
            condition: f64::INFINITY,
        });
    }
    let t_inv = lu.inverse()?;
    let condition = t.norm_one() * t_inv.norm_one();
    if !condition.is_finite() || condition >= MAX_LOG_CONDITION {
        return Err(Error::Singular { condition });
    }

    let lambda = cfg.tail_switch.unwrap_or_else(|| (4.0 * norm).max(1.0));
    let mut delta = cfg.split_fraction / t_inv.operator_norm();
    if !(delta < lambda) {
        delta = 0.5 * lambda;
    }

    let id = ComplexMatrix::identity(n);
    let rhs = &id - t;
    // F(μ) = (T + iμ)⁻¹(I − T)/(1 + iμ) on [0, Λ]
    let head = |mu: f64| -> Result<ComplexMatrix> {
        let mut m = t.clone();
        for i in 0..n {
            m[(i, i)] += C64::new(0.0, mu);
        }
        Ok(Lu::new(&m)?.solve(&rhs)?.scale(C64::new(1.0, mu).inv()))
    };
    // G(u) = (uT + iI)⁻¹(I − T)/(u + i) on (0, 1/Λ], u = 1/μ
    let tail = |u: f64| -> Result<ComplexMatrix> {
        let mut m = t.scale_real(u);
        for i in 0..n {
            m[(i, i)] += C64::new(0.0, 1.0);
        }
        Ok(Lu::new(&m)?.solve(&rhs)?.scale(C64::new(u, 1.0).inv()))
    };
    // One adaptive run over s ∈ [0, 2]: μ = Λs on [0, 1], u = (2 − s)/Λ on [1, 2],
    // so error control is relative to the full integral.
    let integrand = |s: f64| -> Result<ComplexMatrix> {
        if s <= 1.0 {
            Ok(head(lambda * s)?.scale_real(lambda))
        } else {
            Ok(tail((2.0 - s) / lambda)?.scale_real(1.0 / lambda))
        }
    };
    let opts = AdaptiveOptions {
        rel_tol: cfg.rel_tol,
        abs_tol: 0.0,
        max_panels: cfg.max_panels,
    };
    let q = integrate(integrand, &[0.0, delta / lambda, 1.0, 2.0], opts)?;
    Ok(q.value.scale(C64::new(0.0, -1.0)))
}

/// `log S = (log S*)*` for anti-dissipative `S` (`Im S ⪯ 0`).
pub fn logm_antidissipative(s: &ComplexMatrix, cfg: &QuadratureConfig) -> Result<ComplexMatrix> {
    let n = s.ensure_square()?;
    if n == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    s.ensure_finite()?;
    let bound = DISSIPATIVE_TOL * s.operator_norm();
    let max_eig = max_imag_eig(s)?;
    if max_eig > bound {
        return Err(Error::NotAntiDissipative { max_eig, bound });
    }
    Ok(logm_dissipative(&s.adjoint(), cfg)?.adjoint())
}

/// `S·diag(log λᵢ)·S⁻¹` from a general eigendecomposition.
pub fn logm_oracle_diag(t: &ComplexMatrix, branch: Branch) -> Result<ComplexMatrix> {
    if t.ensure_square()? == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    eig_general(t)?.apply(|z| scalar_log(z, branch))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bridge {
    /// `tr log(I + A)`.
    pub lhs: C64,
    /// `log det(I + A) + 2πik`.
    pub rhs: C64,
    /// Winding correction.
    pub k: i64,
    pub det: C64,
}

impl Bridge {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).norm()
    }
}

/// `tr log(I + A)` against `log det(I + A)` up to the reported winding `k`.
pub fn tr_log_det_bridge(a: &ComplexMatrix, cfg: &QuadratureConfig) -> Result<Bridge> {
    let n = a.ensure_square()?;
    let m = &ComplexMatrix::identity(n) + a;
    let d = det(&m)?;
    if d.norm() == 0.0 {
        return Err(Error::DeterminantVanishes { eps: 0.0 });
    }
    let scale = m.operator_norm();
    let log = if n == 0 {
        ComplexMatrix::zeros(0, 0)
    } else if min_imag_eig(&m)? >= -DISSIPATIVE_TOL * scale {
        logm_dissipative(&m, cfg)?
    } else {
        logm_antidissipative(&m, cfg)?
    };
    let lhs = log.trace();
    let rhs0 = scalar_log(d, Branch::Log).or_else(|_| scalar_log(d, Branch::Ln))?;
    let k = ((lhs - rhs0).im / (2.0 * PI)).round() as i64;
    let rhs = rhs0 + C64::new(0.0, 2.0 * PI * k as f64);
    Ok(Bridge {
        lhs,
        rhs,
        k,
        det: d,
    })
}
