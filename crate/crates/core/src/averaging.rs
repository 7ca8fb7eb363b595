//! Spectral averaging along perturbation paths, checked in weak form by
//! pairing both sides with test functions.
//!
//! Scalar identity, for `H(s) = H₀ + V₀ + s·V₁`:
//!
//! ```text
//! ∫_{s₁}^{s₂} tr(V₁·f(H(s))) ds = ∫ f(λ)·(ξ(λ, s₂) − ξ(λ, s₁)) dλ
//! ```
//!
//! Operator identity, for `H(s) = H₀ + s·KK*` and `J = I`:
//!
//! ```text
//! ∫₀¹ K*·f(H(s))·K ds = ∫ f(λ)·Ξ(λ) dλ
//! ```

use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::herglotz::{EpsSchedule, HerglotzFamily, Which};
use crate::matkit::{
    apply_spectral_function, eig_hermitian, positive_negative_parts, ComplexMatrix,
    SignedFactorization, C64,
};
use crate::oplog::{logm_antidissipative, logm_dissipative, QuadratureConfig};
use crate::quad::{gauss_legendre_on, integrate, AdaptiveOptions};
use crate::shift::checks::{integrate_matrix, merge_breakpoints, xi_breakpoints};
use crate::shift::steps::{jump_points, Step, StepFunction};
use crate::shift::{grid::SNAP_REL, xi_at, xi_operator};

pub const DEFAULT_S_NODES: usize = 32;
const FD_STEP: f64 = 1e-5;
const FD_REL_TOL: f64 = 1e-13;
const LAMBDA_REL_TOL: f64 = 1e-8;

/// `V(s) = V₀ + s·V₁` for `s ∈ [s₁, s₂]`.
#[derive(Debug, Clone)]
pub struct PerturbationPath {
    pub v0: ComplexMatrix,
    pub v1: ComplexMatrix,
    pub s1: f64,
    pub s2: f64,
}

impl PerturbationPath {
    pub fn new(v0: &ComplexMatrix, v1: &ComplexMatrix, s1: f64, s2: f64) -> Result<Self> {
        let v0 = v0.require_hermitian()?;
        let v1 = v1.require_hermitian()?;
        if v0.dim() != v1.dim() {
            return Err(Error::DimensionMismatch(format!(
                "V0 is {}x{}, V1 is {}x{}",
                v0.dim(),
                v0.dim(),
                v1.dim(),
                v1.dim()
            )));
        }
        if !(s1 < s2) || !s1.is_finite() || !s2.is_finite() {
            return Err(Error::Constraint(format!("need s1 < s2, got [{s1}, {s2}]")));
        }
        Ok(Self { v0, v1, s1, s2 })
    }

    pub fn dim(&self) -> usize {
        self.v0.dim()
    }

    pub fn v_at(&self, s: f64) -> ComplexMatrix {
        &self.v0 + &self.v1.scale_real(s)
    }

    /// `W = (s₂ − s₁)·(V₁)₋ − V(s₁)`, so that `V(s) + W ⪰ 0` on `[s₁, s₂]`.
    pub fn w_shift(&self) -> Result<ComplexMatrix> {
        let (_, minus) = positive_negative_parts(&self.v1)?;
        Ok((&minus.scale_real(self.s2 - self.s1) - &self.v_at(self.s1)).hermitian_part())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    /// `Σ cₖ λᵏ`.
    Polynomial(Vec<f64>),
    /// `exp(−(λ − center)²/(2·width²))`.
    Gaussian { center: f64, width: f64 },
    /// `Im (λ − z)⁻¹ = Im z / |λ − z|²`, `Im z > 0`.
    ResolventIm { z: C64 },
}

impl TestFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            TestFunction::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck),
            TestFunction::Gaussian { center, width } => {
                (-(x - center).powi(2) / (2.0 * width * width)).exp()
            }
            TestFunction::ResolventIm { z } => z.im / (C64::new(x, 0.0) - z).norm_sqr(),
        }
    }

    /// Exact antiderivative where available.
    pub fn antiderivative(&self, x: f64) -> Option<f64> {
        match self {
            TestFunction::Polynomial(c) => Some(
                c.iter()
                    .enumerate()
                    .rev()
                    .fold(0.0, |acc, (k, &ck)| acc * x + ck / (k + 1) as f64)
                    * x,
            ),
            TestFunction::ResolventIm { z } => Some(((x - z.re) / z.im).atan()),
            TestFunction::Gaussian { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TestFunction::Polynomial(c) if c.iter().all(|x| x.is_finite()) => Ok(()),
            TestFunction::Gaussian { center, width } if center.is_finite() && *width > 0.0 => {
                Ok(())
            }
            TestFunction::ResolventIm { z } if z.im > 0.0 && z.re.is_finite() => Ok(()),
            other => Err(Error::Constraint(format!(
                "invalid test function {other:?}"
            ))),
        }
    }

    /// `∫_a^b f`.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        if let (Some(fb), Some(fa)) = (self.antiderivative(b), self.antiderivative(a)) {
            return Ok(fb - fa);
        }
        let opts = AdaptiveOptions {
            rel_tol: 1e-13,
            abs_tol: 1e-15,
            max_panels: 4096,
        };
        Ok(integrate(|x| Ok(self.eval(x)), &[a, b], opts)?.value)
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("test function '{s}' lacks ':'")))?;
        let nums = args
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number '{t}' in '{s}'")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let f = match (kind.trim().to_ascii_lowercase().as_str(), nums.as_slice()) {
            ("poly", c) if !c.is_empty() => TestFunction::Polynomial(c.to_vec()),
            ("gauss", [m, w]) => TestFunction::Gaussian {
                center: *m,
                width: *w,
            },
            ("imres", [re, im]) => TestFunction::ResolventIm {
                z: C64::new(*re, *im),
            },
            _ => return Err(Error::Parse(format!("unknown test function '{s}'"))),
        };
        f.validate().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(f)
    }
}

fn spectral_f(a: &ComplexMatrix, f: &TestFunction) -> Result<ComplexMatrix> {
    apply_spectral_function(a, |x| f.eval(x))
}

/// `∫_{s₁}^{s₂} tr(V₁·f(H₀ + V(s))) ds` by Gauss–Legendre in `s`.
pub fn averaged_pairing_lhs(
    h0: &ComplexMatrix,
    path: &PerturbationPath,
    f: &TestFunction,
    s_nodes: usize,
) -> Result<f64> {
    if s_nodes < 8 {
        return Err(Error::Constraint(format!(
            "s_nodes must be at least 8, got {s_nodes}"
        )));
    }
    f.validate()?;
    let h0 = h0.require_hermitian()?;
    if h0.dim() != path.dim() {
        return Err(Error::DimensionMismatch(
            "H0 and path differ in dimension".into(),
        ));
    }
    let terms: Vec<Result<f64>> = gauss_legendre_on(s_nodes, path.s1, path.s2)
        .par_iter()
        .map(|&(s, w)| {
            let h = &h0 + &path.v_at(s);
            Ok(w * (&path.v1 * &spectral_f(&h, f)?).trace().re)
        })
        .collect();
    terms.into_iter().try_fold(0.0, |acc, t| Ok(acc + t?))
}

/// Step representation of ξ for `fam` with values from the operator route
/// at the midpoint of each jump interval. Intervals narrower than twice the
/// snapping distance are skipped.
pub fn operator_route_steps(
    fam: &HerglotzFamily,
    sched: &EpsSchedule,
    cfg: &QuadratureConfig,
) -> Result<StepFunction> {
    let pts = jump_points(fam);
    let min_width = 2.0 * SNAP_REL * fam.scale();
    let intervals: Vec<(f64, f64)> = pts
        .windows(2)
        .filter(|w| w[1] - w[0] > min_width)
        .map(|w| (w[0], w[1]))
        .collect();
    let values: Vec<Result<f64>> = intervals
        .par_iter()
        .map(|&(a, b)| xi_at(fam, 0.5 * (a + b), sched, cfg))
        .collect();
    let mut steps = Vec::new();
    for ((a, b), v) in intervals.into_iter().zip(values) {
        let value = v?;
        if value.abs() > 1e-12 {
            steps.push(Step { a, b, value });
        }
    }
    Ok(StepFunction {
        steps,
        oracle_fallbacks: 0,
    })
}

fn pair_steps(steps: &StepFunction, f: &TestFunction) -> Result<f64> {
    steps
        .steps
        .iter()
        .try_fold(0.0, |acc, s| Ok(acc + s.value * f.integral(s.a, s.b)?))
}

/// Where the step values of ξ come from on the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepSource {
    /// `π⁻¹ Im log` boundary values at interval midpoints.
    #[default]
    Operator,
    /// Eigenvalue counting.
    Counting,
}

/// `∫ f(λ)·(ξ(λ, s₂) − ξ(λ, s₁)) dλ`, evaluated for the pairs
/// `(H₀ − W, H(s))` whose perturbations `V(s) + W` are nonnegative.
pub fn averaged_pairing_rhs(
    h0: &ComplexMatrix,
    path: &PerturbationPath,
    f: &TestFunction,
    sched: &EpsSchedule,
    cfg: &QuadratureConfig,
    rank_tol: f64,
) -> Result<f64> {
    averaged_pairing_rhs_with(h0, path, f, sched, cfg, rank_tol, StepSource::Operator)
}

#[allow(clippy::too_many_arguments)]
pub fn averaged_pairing_rhs_with(
    h0: &ComplexMatrix,
    path: &PerturbationPath,
    f: &TestFunction,
    sched: &EpsSchedule,
    cfg: &QuadratureConfig,
    rank_tol: f64,
    source: StepSource,
) -> Result<f64> {
    f.validate()?;
    let w = path.w_shift()?;
    let base = (h0 - &w).hermitian_part();
    let mut total = 0.0;
    for (s, sign) in [(path.s2, 1.0), (path.s1, -1.0)] {
        let fam = HerglotzFamily::new(&base, &(&path.v_at(s) + &w), rank_tol)?;
        let steps = match source {
            StepSource::Operator => operator_route_steps(&fam, sched, cfg)?,
            StepSource::Counting => StepFunction::from_counting(&fam)?,
        };
        total += sign * pair_steps(&steps, f)?;
    }
    Ok(total)
}

/// `|d/ds tr log Φ(z, s) − tr(V₁·(H(s) − z)⁻¹)|` by central differences, with
/// `Φ(z, s) = I + K(s)*(H₀ − W − z)⁻¹K(s)` and `K(s) = (V(s) + W)^{1/2}`.
///
/// `W` is the path's shift plus a positive margin so that `V(s ± h) + W`
/// stays positive definite and `K(s)` is smooth.
pub fn derivative_identity_residual(
    h0: &ComplexMatrix,
    path: &PerturbationPath,
    s: f64,
    z: C64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if z.im == 0.0 {
        return Err(Error::Constraint("z must be non-real".into()));
    }
    let h0 = h0.require_hermitian()?;
    let n = h0.dim();
    let v1_norm = path.v1.operator_norm();
    let margin = 0.1 * (v1_norm * (path.s2 - path.s1)).max(1e-3);
    let w = &path.w_shift()? + &ComplexMatrix::identity(n).scale_real(margin);
    let base = (&h0 - &w).hermitian_part();
    let fine = QuadratureConfig {
        rel_tol: cfg.rel_tol.min(FD_REL_TOL),
        ..*cfg
    };

    let tr_log = |t: f64| -> Result<C64> {
        let p = (&path.v_at(t) + &w).hermitian_part();
        let e = eig_hermitian(&p)?;
        if e.min().unwrap_or(0.0) <= 0.0 {
            return Err(Error::Constraint(format!(
                "V(s) + W is not positive definite at s = {t}"
            )));
        }
        let k = e.apply(|x| C64::new(x.sqrt(), 0.0))?;
        let fam = HerglotzFamily::from_factorization(&base, SignedFactorization::from_parts(k, n))?;
        let phi = fam.evaluate_phi_plus(z)?;
        let l = if z.im > 0.0 {
            logm_dissipative(&phi, &fine)?
        } else {
            logm_antidissipative(&phi, &fine)?
        };
        Ok(l.trace())
    };
    let fd = (tr_log(s + FD_STEP)? - tr_log(s - FD_STEP)?) / (2.0 * FD_STEP);
    let h = &h0 + &path.v_at(s);
    let r = crate::matkit::solve_shifted(&h, z, &path.v1)?;
    Ok((fd - r.trace()).norm())
}

/// `∫_{s₁}^{s₂} K*·f(H₀ + sKK*)·K ds` by Gauss–Legendre.
pub fn operator_average_lhs(
    h0: &ComplexMatrix,
    k: &ComplexMatrix,
    f: &TestFunction,
    s1: f64,
    s2: f64,
    s_nodes: usize,
) -> Result<ComplexMatrix> {
    if s_nodes < 8 {
        return Err(Error::Constraint(format!(
            "s_nodes must be at least 8, got {s_nodes}"
        )));
    }
    let h0 = h0.require_hermitian()?;
    let kk = &(k * &k.adjoint());
    let terms: Vec<Result<ComplexMatrix>> = gauss_legendre_on(s_nodes, s1, s2)
        .par_iter()
        .map(|&(s, w)| {
            let h = &h0 + &kk.scale_real(s);
            Ok((&(&k.adjoint() * &spectral_f(&h, f)?) * k).scale_real(w))
        })
        .collect();
    let mut acc = ComplexMatrix::zeros(k.cols(), k.cols());
    for t in terms {
        acc += &t?;
    }
    Ok(acc)
}

/// Family with `Φ(z, s) = I + s·K*(H₀ − z)⁻¹K`.
fn scaled_family(h0: &ComplexMatrix, k: &ComplexMatrix, s: f64) -> Result<HerglotzFamily> {
    if !(s >= 0.0) {
        return Err(Error::Constraint(format!("s must be nonnegative, got {s}")));
    }
    HerglotzFamily::from_factorization(
        h0,
        SignedFactorization::from_parts(k.scale_real(s.sqrt()), k.cols()),
    )
}

/// `‖∫₀¹ K*·f(H₀ + sKK*)·K ds − ∫ f(λ)·Ξ(λ) dλ‖_F`, the `λ`-integral adaptive
/// between consecutive eigenvalues of `H₀` and `H₀ + KK*`.
pub fn operator_average_residual(
    h0: &ComplexMatrix,
    k: &ComplexMatrix,
    f: &TestFunction,
    s_nodes: usize,
    sched: &EpsSchedule,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    f.validate()?;
    let lhs = operator_average_lhs(h0, k, f, 0.0, 1.0, s_nodes)?;
    let fam = scaled_family(h0, k, 1.0)?;
    let rhs = crate::shift::checks::integrate_xi_weighted(
        &fam,
        Which::Plus,
        |l| C64::new(f.eval(l), 0.0),
        sched,
        cfg,
        LAMBDA_REL_TOL,
    )?;
    Ok(lhs.frobenius_distance(&rhs))
}

/// `Ξ(λ, s₂) − Ξ(λ, s₁)` for `Φ(z, s) = I + s·K*(H₀ − z)⁻¹K`.
pub fn operator_average_increment(
    h0: &ComplexMatrix,
    k: &ComplexMatrix,
    s1: f64,
    s2: f64,
    lambda: f64,
    sched: &EpsSchedule,
    cfg: &QuadratureConfig,
) -> Result<ComplexMatrix> {
    let xi = |s: f64| -> Result<ComplexMatrix> {
        if s == 0.0 {
            return Ok(ComplexMatrix::zeros(k.cols(), k.cols()));
        }
        xi_operator(&scaled_family(h0, k, s)?, Which::Plus, lambda, sched, cfg)
    };
    if s1 == s2 {
        xi(s1)?;
        return Ok(ComplexMatrix::zeros(k.cols(), k.cols()));
    }
    Ok(&xi(s2)? - &xi(s1)?)
}

/// `‖∫_{s₁}^{s₂} K*·f(H₀ + sKK*)·K ds − ∫ f(λ)·(Ξ(λ, s₂) − Ξ(λ, s₁)) dλ‖_F`.
#[allow(clippy::too_many_arguments)]
pub fn operator_increment_residual(
    h0: &ComplexMatrix,
    k: &ComplexMatrix,
    f: &TestFunction,
    s1: f64,
    s2: f64,
    s_nodes: usize,
    sched: &EpsSchedule,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    f.validate()?;
    if !(0.0 <= s1 && s1 < s2) {
        return Err(Error::Constraint(format!(
            "need 0 <= s1 < s2, got [{s1}, {s2}]"
        )));
    }
    let lhs = operator_average_lhs(h0, k, f, s1, s2, s_nodes)?;
    let f2 = scaled_family(h0, k, s2)?;
    let mut pts = xi_breakpoints(&f2);
    let mut scale = f2.scale();
    if s1 > 0.0 {
        let f1 = scaled_family(h0, k, s1)?;
        pts.extend(xi_breakpoints(&f1));
        scale = scale.max(f1.scale());
    }
    let pts = merge_breakpoints(pts, SNAP_REL * scale);
    let rhs = integrate_matrix(
        |l| Ok(operator_average_increment(h0, k, s1, s2, l, sched, cfg)?.scale_real(f.eval(l))),
        &pts,
        k.cols(),
        LAMBDA_REL_TOL,
    )?;
    Ok(lhs.frobenius_distance(&rhs))
}
