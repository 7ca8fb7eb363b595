//! Spectral shift operators `Ξ±(λ)` and the spectral shift function `ξ(λ)`.
//!
//! `Ξ₊(λ) = π⁻¹ Im log Φ₊(λ + i0)`, `Ξ₋(λ) = −π⁻¹ Im log Φ̃₋(λ + i0)`, and
//! `ξ = tr Ξ₊ − tr Ξ₋`. Two independent routes check the result: the
//! eigenvalue counting functions (`ξ = N_{H₀} − N_H` in finite dimensions)
//! and the phase of the perturbation determinant `det(I + V(H₀ − z)⁻¹)`.

pub mod checks;
pub mod grid;
pub mod steps;

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::herglotz::{BoundaryDiagnostic, EpsSchedule, HerglotzFamily, Which};
use crate::matkit::{det, eig_hermitian, ComplexMatrix, C64};
use crate::oplog::QuadratureConfig;

pub use checks::{
    chain_and_monotonicity, example_3_9, herglotz_reconstruction_residual,
    resolvent_derivative_residuals, trace_formula_residual, trace_identity_checks, ChainRecord,
    Example39, TraceIdentityRecord,
};
pub use grid::{auto_grid, joint_auto_grid, GridSpec};
pub use steps::{Step, StepFunction};

/// `Ξ(λ)` for the chosen family, with the boundary-value diagnostic.
pub fn xi_operator_with_diagnostic(
    fam: &HerglotzFamily,
    which: Which,
    lambda: f64,
    sched: &EpsSchedule,
    cfg: &QuadratureConfig,
) -> Result<(ComplexMatrix, BoundaryDiagnostic)> {
    let (l, diag) = fam.boundary_log(which, lambda, sched, cfg)?;
    let sign = if which == Which::Minus { -1.0 } else { 1.0 };
    Ok((l.imag_part().scale_real(sign / PI).hermitian_part(), diag))
}

/// `Ξ₊(λ)` (PLUS), `Ξ₋(λ)` (MINUS), or the full-`Φ` operator (FULL, which
/// carries no asserted relation to ξ when `V` is indefinite).
pub fn xi_operator(
    fam: &HerglotzFamily,
    which: Which,
    lambda: f64,
    sched: &EpsSchedule,
    cfg: &QuadratureConfig,
) -> Result<ComplexMatrix> {
    Ok(xi_operator_with_diagnostic(fam, which, lambda, sched, cfg)?.0)
}

/// Everything computed at one grid point.
#[derive(Debug, Clone)]
pub struct XiPoint {
    pub lambda: f64,
    pub xi: f64,
    pub xi_plus: f64,
    pub xi_minus: f64,
    /// Eigenvalues of `Ξ₊(λ)`, descending.
    pub plus_eigs: Vec<f64>,
    /// Eigenvalues of `Ξ₋(λ)`, descending.
    pub minus_eigs: Vec<f64>,
    pub plus_diag: BoundaryDiagnostic,
    pub minus_diag: BoundaryDiagnostic,
}

impl XiPoint {
    pub fn converged(&self) -> bool {
        self.plus_diag.converged && self.minus_diag.converged
    }
}

fn descending_eigs(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let mut e = eig_hermitian(m)?.eigenvalues;
    e.reverse();
    Ok(e)
}

pub fn xi_point(
    fam: &HerglotzFamily,
    lambda: f64,
    sched: &EpsSchedule,
    cfg: &QuadratureConfig,
) -> Result<XiPoint> {
    let (plus, plus_diag) = xi_operator_with_diagnostic(fam, Which::Plus, lambda, sched, cfg)?;
    let (minus, minus_diag) = xi_operator_with_diagnostic(fam, Which::Minus, lambda, sched, cfg)?;
    let xi_plus = plus.trace().re;
    let xi_minus = minus.trace().re;
    Ok(XiPoint {
        lambda,
        xi: xi_plus - xi_minus,
        xi_plus,
        xi_minus,
        plus_eigs: descending_eigs(&plus)?,
        minus_eigs: descending_eigs(&minus)?,
        plus_diag,
        minus_diag,
    })
}

/// `ξ(λ) = tr Ξ₊(λ) − tr Ξ₋(λ)`.
pub fn xi_at(
    fam: &HerglotzFamily,
    lambda: f64,
    sched: &EpsSchedule,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    Ok(xi_point(fam, lambda, sched, cfg)?.xi)
}

/// `#{eig(H₀) ≤ λ} − #{eig(H) ≤ λ}`.
pub fn xi_counting_oracle(fam: &HerglotzFamily, lambda: f64) -> Result<i64> {
    let tol = 1e-12 * fam.scale();
    for &e in fam
        .eig_h0()
        .eigenvalues
        .iter()
        .chain(&fam.eig_h().eigenvalues)
    {
        let distance = (lambda - e).abs();
        if distance <= tol {
            return Err(Error::InExclusionZone {
                lambda,
                eigenvalue: e,
                distance,
            });
        }
    }
    Ok(fam.eig_h0().count_at_most(lambda) as i64 - fam.eig_h().count_at_most(lambda) as i64)
}

const DET_MAX_DEPTH: u32 = 60;

fn wrap(angle: f64) -> f64 {
    let mut a = angle % (2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    } else if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// `π⁻¹ Im log det(I + V(H₀ − λ − i0)⁻¹)`, with the phase continued from
/// `ε = eps0` (where it is seeded by `tr log Φ₊ + tr log Φ̃₋`) down to `ε = 0`.
pub fn xi_via_det(
    fam: &HerglotzFamily,
    lambda: f64,
    eps0: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(eps0 > 0.0 && eps0.is_finite()) {
        return Err(Error::Constraint(format!(
            "eps0 must be positive, got {eps0}"
        )));
    }
    fam.check_off_spectrum(lambda)?;
    if fam.rank() == 0 {
        return Ok(0.0);
    }
    let n = fam.dim();
    let v = fam.v();
    let eig0 = fam.eig_h0();
    let id = ComplexMatrix::identity(n);
    let det_at = |eps: f64| -> Result<C64> {
        let z = C64::new(lambda, eps);
        let r = eig0.apply(|l| (C64::new(l, 0.0) - z).inv())?;
        let d = det(&(&id + &(&v * &r)))?;
        if !(d.norm() > 1e-300) {
            return Err(Error::DeterminantVanishes { eps });
        }
        Ok(d)
    };

    let z0 = C64::new(lambda, eps0);
    let seed =
        fam.log_at(Which::Plus, z0, cfg)?.trace() + fam.log_at(Which::Minus, z0, cfg)?.trace();
    let d0 = det_at(eps0)?;
    let mut theta = seed.im + wrap(d0.arg() - seed.im);

    let mut path = vec![eps0];
    let floor = 1e-13 * fam.scale();
    let mut e = eps0;
    while e > floor {
        e *= 0.5;
        path.push(e);
    }
    path.push(0.0);

    fn track(
        det_at: &dyn Fn(f64) -> Result<C64>,
        a: f64,
        da: C64,
        b: f64,
        depth: u32,
    ) -> Result<(f64, C64)> {
        let db = det_at(b)?;
        let step = wrap(db.arg() - da.arg());
        if step.abs() > PI / 2.0 && depth < DET_MAX_DEPTH {
            let mid = 0.5 * (a + b);
            let (first, dm) = track(det_at, a, da, mid, depth + 1)?;
            let (second, _) = track(det_at, mid, dm, b, depth + 1)?;
            return Ok((first + second, db));
        }
        Ok((step, db))
    }

    let mut prev = d0;
    for w in path.windows(2) {
        let (step, d) = track(&det_at, w[0], prev, w[1], 0)?;
        theta += step;
        prev = d;
    }
    Ok(theta / PI)
}

/// ξ and Ξ± sampled on a grid.
#[derive(Debug, Clone, Default)]
pub struct ShiftProfile {
    pub grid: Vec<f64>,
    pub xi: Vec<f64>,
    pub xi_plus: Vec<f64>,
    pub xi_minus: Vec<f64>,
    pub xi_op_plus_eigs: Vec<Vec<f64>>,
    pub xi_op_minus_eigs: Vec<Vec<f64>>,
    pub diagnostics: Vec<(BoundaryDiagnostic, BoundaryDiagnostic)>,
}

/// Worst-case deviations from the profile invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileInvariants {
    /// `max |ξ − (ξ₊ − ξ₋)|`
    pub split: f64,
    /// `max |ξ± − Σ eig Ξ±|`
    pub trace: f64,
    pub min_eig: f64,
    pub max_eig: f64,
}

impl ShiftProfile {
    pub fn from_points(points: Vec<XiPoint>) -> Self {
        let mut p = ShiftProfile::default();
        for pt in points {
            p.grid.push(pt.lambda);
            p.xi.push(pt.xi);
            p.xi_plus.push(pt.xi_plus);
            p.xi_minus.push(pt.xi_minus);
            p.xi_op_plus_eigs.push(pt.plus_eigs);
            p.xi_op_minus_eigs.push(pt.minus_eigs);
            p.diagnostics.push((pt.plus_diag, pt.minus_diag));
        }
        p
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn invariants(&self) -> ProfileInvariants {
        let mut inv = ProfileInvariants {
            split: 0.0,
            trace: 0.0,
            min_eig: 0.0,
            max_eig: 0.0,
        };
        for i in 0..self.len() {
            inv.split = inv
                .split
                .max((self.xi[i] - (self.xi_plus[i] - self.xi_minus[i])).abs());
            let sp: f64 = self.xi_op_plus_eigs[i].iter().sum();
            let sm: f64 = self.xi_op_minus_eigs[i].iter().sum();
            inv.trace = inv
                .trace
                .max((self.xi_plus[i] - sp).abs())
                .max((self.xi_minus[i] - sm).abs());
            for &e in self.xi_op_plus_eigs[i]
                .iter()
                .chain(&self.xi_op_minus_eigs[i])
            {
                inv.min_eig = inv.min_eig.min(e);
                inv.max_eig = inv.max_eig.max(e);
            }
        }
        inv
    }
}

/// Per-point results in grid order; evaluated in parallel.
pub fn compute_points(
    fam: &HerglotzFamily,
    grid: &[f64],
    sched: &EpsSchedule,
    cfg: &QuadratureConfig,
) -> Vec<Result<XiPoint>> {
    grid.par_iter()
        .map(|&l| xi_point(fam, l, sched, cfg))
        .collect()
}

/// Fails on the first grid point (in grid order) that fails.
pub fn compute_profile(
    fam: &HerglotzFamily,
    grid: &[f64],
    sched: &EpsSchedule,
    cfg: &QuadratureConfig,
) -> Result<ShiftProfile> {
    let points = compute_points(fam, grid, sched, cfg)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(ShiftProfile::from_points(points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::DEFAULT_RANK_TOL;
    use crate::random::{random_hermitian, random_indefinite, random_psd, seeded_rng};

    fn scalar_family(v: f64) -> HerglotzFamily {
        HerglotzFamily::new(
            &ComplexMatrix::zeros(1, 1),
            &ComplexMatrix::from_real_diag(&[v]),
            DEFAULT_RANK_TOL,
        )
        .unwrap()
    }

    fn defaults() -> (EpsSchedule, QuadratureConfig) {
        (EpsSchedule::default(), QuadratureConfig::default())
    }

    #[test]
    fn scalar_rank_one_positive() {
        let fam = scalar_family(1.0);
        let (s, c) = defaults();
        for (l, expected) in [(-0.5, 0.0), (0.25, 1.0), (0.75, 1.0), (1.5, 0.0)] {
            assert!(
                (xi_at(&fam, l, &s, &c).unwrap() - expected).abs() < 1e-10,
                "λ = {l}"
            );
            assert_eq!(xi_counting_oracle(&fam, l).unwrap() as f64, expected);
            assert!(
                (xi_via_det(&fam, l, s.eps0, &c).unwrap() - expected).abs() < 1e-10,
                "λ = {l}"
            );
        }
    }

    #[test]
    fn scalar_rank_one_negative() {
        let fam = scalar_family(-1.0);
        let (s, c) = defaults();
        for (l, expected) in [(-1.5, 0.0), (-0.5, -1.0), (0.5, 0.0)] {
            assert!(
                (xi_at(&fam, l, &s, &c).unwrap() - expected).abs() < 1e-10,
                "λ = {l}"
            );
            assert!(
                (xi_via_det(&fam, l, s.eps0, &c).unwrap() - expected).abs() < 1e-10,
                "λ = {l}"
            );
        }
    }

    #[test]
    fn counting_oracle_examples() {
        let h0 = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        let v = ComplexMatrix::from_real_diag(&[0.5, 0.0]);
        let fam = HerglotzFamily::new(&h0, &v, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(xi_counting_oracle(&fam, 0.25).unwrap(), 1);
        assert_eq!(xi_counting_oracle(&fam, 5.0).unwrap(), 0);
        assert!(xi_counting_oracle(&fam, 0.5).is_err());
    }

    #[test]
    fn zero_perturbation() {
        let mut rng = seeded_rng(401);
        let h0 = random_hermitian(3, &mut rng);
        let fam = HerglotzFamily::new(&h0, &ComplexMatrix::zeros(3, 3), DEFAULT_RANK_TOL).unwrap();
        let (s, c) = defaults();
        let l = fam.eig_h0().eigenvalues[0] + 0.1;
        let p = xi_point(&fam, l, &s, &c).unwrap();
        assert_eq!(p.xi, 0.0);
        assert!(p.plus_eigs.is_empty() && p.minus_eigs.is_empty());
        assert_eq!(xi_via_det(&fam, l, s.eps0, &c).unwrap(), 0.0);
    }

    #[test]
    fn three_routes_agree_on_random_instance() {
        let mut rng = seeded_rng(403);
        let h0 = random_hermitian(6, &mut rng);
        let v = random_indefinite(6, 4, &mut rng);
        let fam = HerglotzFamily::new(&h0, &v, DEFAULT_RANK_TOL).unwrap();
        let (s, c) = defaults();
        let grid = auto_grid(&fam, 40);
        let profile = compute_profile(&fam, &grid, &s, &c).unwrap();
        let inv = profile.invariants();
        assert!(inv.split < 1e-8 && inv.trace < 1e-8);
        assert!(inv.min_eig >= -1e-8 && inv.max_eig <= 1.0 + 1e-8);
        for (i, &l) in grid.iter().enumerate() {
            let oracle = xi_counting_oracle(&fam, l).unwrap() as f64;
            assert!((profile.xi[i] - oracle).abs() < 1e-6, "λ = {l}");
            let d = xi_via_det(&fam, l, s.eps0, &c).unwrap();
            assert!(
                (d - oracle).abs() < 1e-6,
                "det route at λ = {l}: {d} vs {oracle}"
            );
        }
    }

    #[test]
    fn below_joint_spectrum_plus_operator_vanishes() {
        let mut rng = seeded_rng(405);
        let h0 = random_hermitian(4, &mut rng);
        let v = random_psd(4, 2, &mut rng);
        let fam = HerglotzFamily::new(&h0, &v, DEFAULT_RANK_TOL).unwrap();
        let (s, c) = defaults();
        let l = fam.all_eigenvalues()[0] - 0.5;
        let xi = xi_operator(&fam, Which::Plus, l, &s, &c).unwrap();
        assert!(xi.max_abs() < 1e-8);
    }

    #[test]
    fn schedule_route_gives_same_profile() {
        let mut rng = seeded_rng(407);
        let h0 = random_hermitian(4, &mut rng);
        let v = random_indefinite(4, 3, &mut rng);
        let fam = HerglotzFamily::new(&h0, &v, DEFAULT_RANK_TOL).unwrap();
        let (s, c) = defaults();
        let slow = EpsSchedule {
            fast_path: false,
            ..s
        };
        for l in auto_grid(&fam, 10) {
            let a = xi_at(&fam, l, &s, &c).unwrap();
            let b = xi_at(&fam, l, &slow, &c).unwrap();
            assert!((a - b).abs() < 1e-7, "λ = {l}: {a} vs {b}");
        }
    }
}
