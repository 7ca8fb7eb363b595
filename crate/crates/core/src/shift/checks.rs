//! Identity checks built on the spectral shift function and operators.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::herglotz::{EpsSchedule, HerglotzFamily, Which};
use crate::matkit::{
    apply_spectral_function, eig_hermitian, solve_shifted, ComplexMatrix, SignedFactorization, C64,
};
use crate::oplog::QuadratureConfig;
use crate::quad::{integrate, AdaptiveOptions};

use super::grid::{joint_auto_grid, SNAP_REL};
use super::steps::StepFunction;
use super::{xi_at, xi_operator, ShiftProfile};

/// Largest resolvent condition number accepted by the trace formula.
const MAX_RESOLVENT_CONDITION: f64 = 1e12;
/// Tighter quadrature used under finite differences.
const FD_REL_TOL: f64 = 1e-13;

fn resolvent_condition(eigenvalues: &[f64], z: C64) -> f64 {
    let d: Vec<f64> = eigenvalues
        .iter()
        .map(|&l| (C64::new(l, 0.0) - z).norm())
        .collect();
    let max = d.iter().copied().fold(0.0, f64::max);
    let min = d.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn resolvent_trace(a: &ComplexMatrix, z: C64) -> Result<C64> {
    Ok(solve_shifted(a, z, &ComplexMatrix::identity(a.dim()))?.trace())
}

/// `(tr((H − z)⁻¹ − (H₀ − z)⁻¹), ∫ ξ(λ)(λ − z)⁻² dλ)`, the integral exact on
/// the step representation of the profile.
pub fn trace_formula_terms(
    fam: &HerglotzFamily,
    z: C64,
    profile: &ShiftProfile,
) -> Result<(C64, C64)> {
    for eig in [fam.eig_h0(), fam.eig_h()] {
        let condition = resolvent_condition(&eig.eigenvalues, z);
        if condition > MAX_RESOLVENT_CONDITION {
            return Err(Error::Singular { condition });
        }
    }
    let lhs = resolvent_trace(fam.h(), z)? - resolvent_trace(fam.h0(), z)?;
    let steps = StepFunction::from_profile(fam, profile)?;
    Ok((lhs, steps.resolvent_square_integral(z)))
}

/// `|tr((H − z)⁻¹ − (H₀ − z)⁻¹) + ∫ ξ(λ)(λ − z)⁻² dλ|`.
pub fn trace_formula_residual(fam: &HerglotzFamily, z: C64, profile: &ShiftProfile) -> Result<f64> {
    let (lhs, integral) = trace_formula_terms(fam, z, profile)?;
    Ok((lhs + integral).norm())
}

/// Central differences of `tr log Φ₊` and `tr log Φ̃₋` against the resolvent
/// trace differences `tr((H₀−z)⁻¹ − (H₊−z)⁻¹)` and `tr((H₊−z)⁻¹ − (H−z)⁻¹)`.
pub fn resolvent_derivative_residuals(
    fam: &HerglotzFamily,
    z: C64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    if z.im == 0.0 {
        return Err(Error::Constraint("z must be non-real".into()));
    }
    let fine = QuadratureConfig {
        rel_tol: cfg.rel_tol.min(FD_REL_TOL),
        ..*cfg
    };
    let h = 1e-5 * (1.0 + z.norm());
    let derivative = |which: Which| -> Result<C64> {
        let up = fam.log_at(which, z + h, &fine)?.trace();
        let down = fam.log_at(which, z - h, &fine)?.trace();
        Ok((up - down) / (2.0 * h))
    };
    let r0 = resolvent_trace(fam.h0(), z)?;
    let rp = resolvent_trace(fam.h_plus(), z)?;
    let r = resolvent_trace(fam.h(), z)?;
    let plus = (derivative(Which::Plus)? - (r0 - rp)).norm();
    let minus = (derivative(Which::Minus)? - (rp - r)).norm();
    Ok((plus, minus))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceIdentityRecord {
    pub trace_v: f64,
    pub integral: f64,
    /// `|tr V − ∫ ξ|`
    pub residual: f64,
    pub abs_integral: f64,
    pub trace_norm_v: f64,
    /// `∫ |ξ| ≤ ‖V‖₁ + 1e-8`
    pub l1_bound_holds: bool,
    pub derivative_plus: f64,
    pub derivative_minus: f64,
    pub oracle_fallbacks: usize,
}

pub fn trace_identity_checks(
    fam: &HerglotzFamily,
    profile: &ShiftProfile,
    z: C64,
    cfg: &QuadratureConfig,
) -> Result<TraceIdentityRecord> {
    let steps = StepFunction::from_profile(fam, profile)?;
    let v = fam.v();
    let trace_v = v.trace().re;
    let integral = steps.integral();
    let abs_integral = steps.abs_integral();
    let trace_norm_v = v.trace_norm();
    let (derivative_plus, derivative_minus) = resolvent_derivative_residuals(fam, z, cfg)?;
    Ok(TraceIdentityRecord {
        trace_v,
        integral,
        residual: (trace_v - integral).abs(),
        abs_integral,
        trace_norm_v,
        l1_bound_holds: abs_integral <= trace_norm_v + 1e-8,
        derivative_plus,
        derivative_minus,
        oracle_fallbacks: steps.oracle_fallbacks,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainRecord {
    pub points: usize,
    /// `max |ξ(H₀,H₂) − ξ(H₀,H₁) − ξ(H₁,H₂)|` with `H₁ = H₀+V₁`, `H₂ = H₁+V₂`.
    pub chain_max: f64,
    /// `max |ξ(H₀,H₁) + ξ(H₁,H₀)|`.
    pub antisymmetry_max: f64,
    /// Whether `V₂ − V₁ ⪰ 0`, so that monotonicity applies.
    pub monotone_applicable: bool,
    /// `min (ξ(H₀,H₀+V₂) − ξ(H₀,H₀+V₁))` over the grid.
    pub monotone_min_gap: f64,
    /// `max |ξ − counting oracle|` over all pairs and points.
    pub oracle_max: f64,
}

struct ChainFamilies {
    f01: HerglotzFamily,
    f12: HerglotzFamily,
    f02: HerglotzFamily,
    f10: HerglotzFamily,
    f0v2: HerglotzFamily,
}

fn chain_families(
    h0: &ComplexMatrix,
    v1: &ComplexMatrix,
    v2: &ComplexMatrix,
    rank_tol: f64,
) -> Result<ChainFamilies> {
    let h1 = h0 + v1;
    Ok(ChainFamilies {
        f01: HerglotzFamily::new(h0, v1, rank_tol)?,
        f12: HerglotzFamily::new(&h1, v2, rank_tol)?,
        f02: HerglotzFamily::new(h0, &(v1 + v2), rank_tol)?,
        f10: HerglotzFamily::new(&h1, &(-v1), rank_tol)?,
        f0v2: HerglotzFamily::new(h0, v2, rank_tol)?,
    })
}

/// Grid off the spectra of every pair used by [`chain_and_monotonicity`].
pub fn chain_grid(
    h0: &ComplexMatrix,
    v1: &ComplexMatrix,
    v2: &ComplexMatrix,
    count: usize,
    rank_tol: f64,
) -> Result<Vec<f64>> {
    let f = chain_families(h0, v1, v2, rank_tol)?;
    Ok(joint_auto_grid(
        &[&f.f01, &f.f12, &f.f02, &f.f10, &f.f0v2],
        count,
    ))
}

#[allow(clippy::too_many_arguments)]
pub fn chain_and_monotonicity(
    h0: &ComplexMatrix,
    v1: &ComplexMatrix,
    v2: &ComplexMatrix,
    grid: &[f64],
    sched: &EpsSchedule,
    cfg: &QuadratureConfig,
    rank_tol: f64,
) -> Result<ChainRecord> {
    let f = chain_families(h0, v1, v2, rank_tol)?;
    let diff = (v2 - v1).hermitian_part();
    let monotone_applicable = diff.is_empty()
        || eig_hermitian(&diff)?.min().unwrap_or(0.0)
            >= -1e-12 * diff.operator_norm().max(f64::MIN_POSITIVE);

    let rows: Vec<Result<[f64; 6]>> = grid
        .par_iter()
        .map(|&l| {
            let x01 = xi_at(&f.f01, l, sched, cfg)?;
            let x12 = xi_at(&f.f12, l, sched, cfg)?;
            let x02 = xi_at(&f.f02, l, sched, cfg)?;
            let x10 = xi_at(&f.f10, l, sched, cfg)?;
            let x0v2 = xi_at(&f.f0v2, l, sched, cfg)?;
            let mut oracle = 0.0f64;
            for (fam, x) in [
                (&f.f01, x01),
                (&f.f12, x12),
                (&f.f02, x02),
                (&f.f10, x10),
                (&f.f0v2, x0v2),
            ] {
                oracle = oracle.max((x - super::xi_counting_oracle(fam, l)? as f64).abs());
            }
            Ok([
                (x02 - x01 - x12).abs(),
                (x01 + x10).abs(),
                x0v2 - x01,
                oracle,
                0.0,
                0.0,
            ])
        })
        .collect();
    let mut rec = ChainRecord {
        points: grid.len(),
        chain_max: 0.0,
        antisymmetry_max: 0.0,
        monotone_applicable,
        monotone_min_gap: f64::INFINITY,
        oracle_max: 0.0,
    };
    for row in rows {
        let [chain, anti, gap, oracle, _, _] = row?;
        rec.chain_max = rec.chain_max.max(chain);
        rec.antisymmetry_max = rec.antisymmetry_max.max(anti);
        rec.monotone_min_gap = rec.monotone_min_gap.min(gap);
        rec.oracle_max = rec.oracle_max.max(oracle);
    }
    Ok(rec)
}

#[derive(Debug, Clone)]
pub struct Example39 {
    pub xi1: ComplexMatrix,
    pub xi2: ComplexMatrix,
    /// `E_{K₁*K₁}({1+b})`, the projection onto `(1,1)ᵗ/√2`.
    pub expected1: ComplexMatrix,
    /// `E_{K₂*K₂}({1+c})`, the projection onto `(0,1)ᵗ`.
    pub expected2: ComplexMatrix,
    /// `θ(Kᵢ*Kᵢ − λ)` by the spectral theorem.
    pub theta1: ComplexMatrix,
    pub theta2: ComplexMatrix,
    /// Eigenvalues of `Ξ₂ − Ξ₁`, ascending.
    pub certificate: Vec<f64>,
    pub trace1: f64,
    pub trace2: f64,
}

impl Example39 {
    /// Largest max-norm deviation of `Ξᵢ` from its closed forms.
    pub fn residual(&self) -> f64 {
        [
            self.xi1.max_abs_diff(&self.expected1),
            self.xi2.max_abs_diff(&self.expected2),
            self.xi1.max_abs_diff(&self.theta1),
            self.xi2.max_abs_diff(&self.theta2),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// One eigenvalue of `Ξ₂ − Ξ₁` at least `+0.1`, one at most `−0.1`.
    pub fn is_indefinite(&self) -> bool {
        self.certificate.first().is_some_and(|&e| e <= -0.1)
            && self.certificate.last().is_some_and(|&e| e >= 0.1)
    }
}

/// `Ξ(λ)` for `H₀ = 0` and `V = M ⪰ 0`, factored with the Hermitian square
/// root `K = M^{1/2}` so that `K*K = KK* = M`.
pub fn square_root_family_xi(
    m: &ComplexMatrix,
    lambda: f64,
    sched: &EpsSchedule,
    cfg: &QuadratureConfig,
) -> Result<ComplexMatrix> {
    let n = m.ensure_square()?;
    let k = apply_spectral_function(m, |x| x.max(0.0).sqrt())?;
    let fam = HerglotzFamily::from_factorization(
        &ComplexMatrix::zeros(n, n),
        SignedFactorization::from_parts(k, n),
    )?;
    xi_operator(&fam, Which::Plus, lambda, sched, cfg)
}

/// The pair `K₁*K₁ = [[1, b], [b, 1]]`, `K₂*K₂ = diag(1+a, 1+c)`.
pub fn example_3_9_matrices(a: f64, b: f64, c: f64) -> (ComplexMatrix, ComplexMatrix) {
    (
        ComplexMatrix::from_real_rows(&[&[1.0, b], &[b, 1.0]]),
        ComplexMatrix::from_real_rows(&[&[1.0 + a, 0.0], &[0.0, 1.0 + c]]),
    )
}

pub fn example_3_9(
    a: f64,
    b: f64,
    c: f64,
    lambda: f64,
    sched: &EpsSchedule,
    cfg: &QuadratureConfig,
) -> Result<Example39> {
    if !(0.0 < a && a < b && b < c && c < 1.0) {
        return Err(Error::Constraint(format!(
            "need 0 < a < b < c < 1, got a={a}, b={b}, c={c}"
        )));
    }
    if a * c - b * b < 0.0 {
        return Err(Error::Constraint(format!(
            "need ac − b² ≥ 0, got {}",
            a * c - b * b
        )));
    }
    if !(lambda > 1.0 + a && lambda < 1.0 + b) {
        return Err(Error::Constraint(format!(
            "need λ in (1+a, 1+b) = ({}, {}), got {lambda}",
            1.0 + a,
            1.0 + b
        )));
    }
    let (m1, m2) = example_3_9_matrices(a, b, c);
    let xi1 = square_root_family_xi(&m1, lambda, sched, cfg)?;
    let xi2 = square_root_family_xi(&m2, lambda, sched, cfg)?;
    let step = |x: f64| if x > lambda { 1.0 } else { 0.0 };
    let theta1 = apply_spectral_function(&m1, step)?;
    let theta2 = apply_spectral_function(&m2, step)?;
    let expected1 = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
    let expected2 = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
    let certificate = eig_hermitian(&(&xi2 - &xi1))?.eigenvalues;
    Ok(Example39 {
        trace1: xi1.trace().re,
        trace2: xi2.trace().re,
        xi1,
        xi2,
        expected1,
        expected2,
        theta1,
        theta2,
        certificate,
    })
}

/// Sorts `pts` and drops points within `tol` of their predecessor.
pub fn merge_breakpoints(mut pts: Vec<f64>, tol: f64) -> Vec<f64> {
    pts.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(pts.len());
    for e in pts {
        if out.last().is_none_or(|&p| e - p > tol) {
            out.push(e);
        }
    }
    out
}

/// Breakpoints for integrating `Ξ(λ)`: the spectral hull split at every
/// eigenvalue of `H₀`, `H₊` and `H`, with near-coincident points merged.
pub fn xi_breakpoints(fam: &HerglotzFamily) -> Vec<f64> {
    merge_breakpoints(fam.all_eigenvalues(), SNAP_REL * fam.scale())
}

/// Adaptive integral of an `m × m` matrix function between consecutive
/// breakpoints; zero when fewer than two breakpoints are given.
pub fn integrate_matrix(
    f: impl Fn(f64) -> Result<ComplexMatrix>,
    pts: &[f64],
    m: usize,
    rel_tol: f64,
) -> Result<ComplexMatrix> {
    if m == 0 || pts.len() < 2 {
        return Ok(ComplexMatrix::zeros(m, m));
    }
    let opts = AdaptiveOptions {
        rel_tol,
        abs_tol: 1e-14,
        max_panels: 2048,
    };
    Ok(integrate(f, pts, opts)?.value)
}

/// `∫ w(λ)·Ξ(λ) dλ` over the spectral hull, adaptive per interval between
/// eigenvalues.
pub fn integrate_xi_weighted(
    fam: &HerglotzFamily,
    which: Which,
    weight: impl Fn(f64) -> C64,
    sched: &EpsSchedule,
    cfg: &QuadratureConfig,
    rel_tol: f64,
) -> Result<ComplexMatrix> {
    let pts = xi_breakpoints(fam);
    integrate_matrix(
        |l| Ok(xi_operator(fam, which, l, sched, cfg)?.scale(weight(l))),
        &pts,
        fam.block_dim(which),
        rel_tol,
    )
}

/// `‖log Φ₊(z) − ∫ Ξ₊(λ)(λ − z)⁻¹ dλ‖_F`.
pub fn herglotz_reconstruction_residual(
    fam: &HerglotzFamily,
    z: C64,
    sched: &EpsSchedule,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let direct = fam.log_at(Which::Plus, z, cfg)?;
    let rebuilt = integrate_xi_weighted(
        fam,
        Which::Plus,
        |l| (C64::new(l, 0.0) - z).inv(),
        sched,
        cfg,
        1e-8,
    )?;
    Ok(direct.frobenius_distance(&rebuilt))
}
