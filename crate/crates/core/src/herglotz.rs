//! Matrix Herglotz families built from a self-adjoint pair `(H₀, H = H₀ + V)`.
//!
//! With `V = K·J·K*`, `J = J₊ − J₋`, `H₊ = H₀ + K₊K₊*`:
//!
//! ```text
//! Φ(z)   = J + K*(H₀ − z)⁻¹K
//! Φ₊(z)  = I + K₊*(H₀ − z)⁻¹K₊
//! Φ̃₋(z)  = I − K₋*(H₊ − z)⁻¹K₋
//! ```
//!
//! `Φ` and `Φ₊` are dissipative on the upper half-plane, `Φ̃₋` anti-dissipative.

use crate::error::{Error, Result};
use crate::matkit::{
    eig_hermitian, sign_factorization, solve_shifted, ComplexMatrix, HermitianEig,
    SignedFactorization, C64,
};
use crate::oplog::{logm_antidissipative, logm_dissipative, QuadratureConfig, MAX_LOG_CONDITION};

/// Radius of the excluded neighbourhood of each eigenvalue, relative to the
/// spectral diameter.
pub const EXCLUSION_REL: f64 = 1e-9;
/// Distance (relative) at which a resolvent evaluation is refused.
pub const POLE_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    /// `Φ₊` on `ℋ₊`.
    Plus,
    /// `Φ̃₋` on `ℋ₋`.
    Minus,
    /// The full `Φ` with indefinite `J`.
    Full,
}

impl Which {
    /// `+1` if the family is Herglotz, `−1` if its negative is.
    fn orientation(self) -> f64 {
        match self {
            Which::Plus | Which::Full => 1.0,
            Which::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsSchedule {
    pub eps0: f64,
    pub factor: f64,
    pub max_steps: usize,
    /// Relative Cauchy tolerance on successive extrapolated iterates.
    pub conv_tol: f64,
    /// Evaluate directly at `ε = 0` when that is well defined.
    pub fast_path: bool,
}

impl Default for EpsSchedule {
    fn default() -> Self {
        Self {
            eps0: 1e-2,
            factor: 0.5,
            max_steps: 20,
            conv_tol: 1e-9,
            fast_path: true,
        }
    }
}

impl EpsSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps0 > 0.0 && self.eps0.is_finite()) {
            return Err(Error::Constraint(format!(
                "eps0 must be positive, got {}",
                self.eps0
            )));
        }
        if !(self.factor > 0.0 && self.factor < 1.0) {
            return Err(Error::Constraint(format!(
                "factor must lie in (0,1), got {}",
                self.factor
            )));
        }
        if self.max_steps < 2 {
            return Err(Error::Constraint("max_steps must be at least 2".into()));
        }
        if !(self.conv_tol > 0.0) {
            return Err(Error::Constraint(format!(
                "conv_tol must be positive, got {}",
                self.conv_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Zero-dimensional block.
    Empty,
    /// Direct evaluation at `ε = 0`.
    Direct,
    /// `ε`-schedule with Richardson extrapolation.
    Schedule,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryDiagnostic {
    pub route: Route,
    pub steps: usize,
    pub final_eps: f64,
    pub cauchy: f64,
    pub converged: bool,
}

impl BoundaryDiagnostic {
    fn exact(route: Route) -> Self {
        Self {
            route,
            steps: 0,
            final_eps: 0.0,
            cauchy: 0.0,
            converged: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HerglotzFamily {
    h0: ComplexMatrix,
    fact: SignedFactorization,
    h_plus: ComplexMatrix,
    h: ComplexMatrix,
    eig_h0: HermitianEig,
    eig_h_plus: HermitianEig,
    eig_h: HermitianEig,
    /// `U₀*·K`
    w0: ComplexMatrix,
    /// `U₊*·K₋`
    w_minus: ComplexMatrix,
    scale: f64,
}

impl HerglotzFamily {
    /// Factorizes `V` with [`sign_factorization`].
    pub fn new(h0: &ComplexMatrix, v: &ComplexMatrix, rank_tol: f64) -> Result<Self> {
        let h0 = h0.require_hermitian()?;
        let v = v.require_hermitian()?;
        if h0.dim() != v.dim() {
            return Err(Error::DimensionMismatch(format!(
                "H0 is {}x{}, V is {}x{}",
                h0.dim(),
                h0.dim(),
                v.dim(),
                v.dim()
            )));
        }
        if !(rank_tol > 0.0) {
            return Err(Error::Constraint(format!(
                "rank_tol must be positive, got {rank_tol}"
            )));
        }
        let fact = sign_factorization(&v, rank_tol)?;
        Self::from_factorization(&h0, fact)
    }

    /// Uses the given factor as is.
    pub fn from_factorization(h0: &ComplexMatrix, fact: SignedFactorization) -> Result<Self> {
        let h0 = h0.require_hermitian()?;
        if fact.dim() != h0.dim() {
            return Err(Error::DimensionMismatch(format!(
                "H0 is {}x{}, factor has {} rows",
                h0.dim(),
                h0.dim(),
                fact.dim()
            )));
        }
        fact.k.ensure_finite()?;
        let h_plus = (&h0 + &fact.positive_part()).hermitian_part();
        let h = (&h0 + &fact.reassemble()).hermitian_part();
        let eig_h0 = eig_hermitian(&h0)?;
        let eig_h_plus = eig_hermitian(&h_plus)?;
        let eig_h = eig_hermitian(&h)?;
        let w0 = &eig_h0.vectors.adjoint() * &fact.k;
        let w_minus = &eig_h_plus.vectors.adjoint() * &fact.k_minus();

        let all = eig_h0
            .eigenvalues
            .iter()
            .chain(&eig_h_plus.eigenvalues)
            .chain(&eig_h.eigenvalues);
        let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &l| {
            (a.min(l), b.max(l))
        });
        let diameter = hi - lo;
        let scale = if diameter > 0.0 && diameter.is_finite() {
            diameter
        } else {
            1.0
        };
        Ok(Self {
            h0,
            fact,
            h_plus,
            h,
            eig_h0,
            eig_h_plus,
            eig_h,
            w0,
            w_minus,
            scale,
        })
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    pub fn rank(&self) -> usize {
        self.fact.rank()
    }

    pub fn n_plus(&self) -> usize {
        self.fact.n_plus
    }

    pub fn n_minus(&self) -> usize {
        self.fact.n_minus
    }

    pub fn block_dim(&self, which: Which) -> usize {
        match which {
            Which::Plus => self.n_plus(),
            Which::Minus => self.n_minus(),
            Which::Full => self.rank(),
        }
    }

    pub fn h0(&self) -> &ComplexMatrix {
        &self.h0
    }

    pub fn h(&self) -> &ComplexMatrix {
        &self.h
    }

    pub fn h_plus(&self) -> &ComplexMatrix {
        &self.h_plus
    }

    /// `K·J·K*`.
    pub fn v(&self) -> ComplexMatrix {
        self.fact.reassemble()
    }

    pub fn factorization(&self) -> &SignedFactorization {
        &self.fact
    }

    pub fn eig_h0(&self) -> &HermitianEig {
        &self.eig_h0
    }

    pub fn eig_h_plus(&self) -> &HermitianEig {
        &self.eig_h_plus
    }

    pub fn eig_h(&self) -> &HermitianEig {
        &self.eig_h
    }

    /// Spectral diameter of `spec(H₀) ∪ spec(H₊) ∪ spec(H)`, or 1 if it is 0.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn exclusion_radius(&self) -> f64 {
        EXCLUSION_REL * self.scale
    }

    /// Sorted eigenvalues of `H₀`, `H₊` and `H` together.
    pub fn all_eigenvalues(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self
            .eig_h0
            .eigenvalues
            .iter()
            .chain(&self.eig_h_plus.eigenvalues)
            .chain(&self.eig_h.eigenvalues)
            .copied()
            .collect();
        all.sort_by(f64::total_cmp);
        all
    }

    /// Fails if `λ` lies within the exclusion radius of an eigenvalue of
    /// `H₀`, `H₊` or `H`.
    pub fn check_off_spectrum(&self, lambda: f64) -> Result<()> {
        let radius = self.exclusion_radius();
        for &e in self.all_eigenvalues().iter() {
            let distance = (lambda - e).abs();
            if distance <= radius {
                return Err(Error::InExclusionZone {
                    lambda,
                    eigenvalue: e,
                    distance,
                });
            }
        }
        Ok(())
    }

    fn check_pole(&self, eig: &HermitianEig, z: C64) -> Result<()> {
        for &l in &eig.eigenvalues {
            let distance = (z - l).norm();
            if distance <= POLE_REL * self.scale {
                return Err(Error::InExclusionZone {
                    lambda: z.re,
                    eigenvalue: l,
                    distance,
                });
            }
        }
        Ok(())
    }

    /// `J + K*(H₀ − z)⁻¹K`.
    pub fn evaluate_phi(&self, z: C64) -> Result<ComplexMatrix> {
        self.check_pole(&self.eig_h0, z)?;
        let mut phi = sandwich(&self.w0, &self.eig_h0.eigenvalues, z);
        for (i, s) in self.fact.j_signs.iter().enumerate() {
            phi[(i, i)] += C64::new(*s as f64, 0.0);
        }
        Ok(phi)
    }

    /// `I + K₊*(H₀ − z)⁻¹K₊`.
    pub fn evaluate_phi_plus(&self, z: C64) -> Result<ComplexMatrix> {
        self.check_pole(&self.eig_h0, z)?;
        let w = self.w0.columns(0..self.n_plus());
        Ok(&ComplexMatrix::identity(self.n_plus()) + &sandwich(&w, &self.eig_h0.eigenvalues, z))
    }

    /// `I − K₋*(H₊ − z)⁻¹K₋`.
    pub fn evaluate_phi_minus_tilde(&self, z: C64) -> Result<ComplexMatrix> {
        self.check_pole(&self.eig_h_plus, z)?;
        Ok(&ComplexMatrix::identity(self.n_minus())
            - &sandwich(&self.w_minus, &self.eig_h_plus.eigenvalues, z))
    }

    pub fn evaluate(&self, which: Which, z: C64) -> Result<ComplexMatrix> {
        match which {
            Which::Plus => self.evaluate_phi_plus(z),
            Which::Minus => self.evaluate_phi_minus_tilde(z),
            Which::Full => self.evaluate_phi(z),
        }
    }

    /// `J − J·K*(H − z)⁻¹K·J`, by a direct solve.
    pub fn phi_inverse(&self, z: C64) -> Result<ComplexMatrix> {
        let j = self.fact.j_diag();
        let kj = self.fact.k.mul_diag(&j);
        let inner = &kj.adjoint() * &solve_shifted(&self.h, z, &kj)?;
        Ok(&ComplexMatrix::from_diag(&j) - &inner)
    }

    /// `I − K₊*(H₊ − z)⁻¹K₊`, by a direct solve.
    pub fn phi_plus_inverse(&self, z: C64) -> Result<ComplexMatrix> {
        let kp = self.fact.k_plus();
        let inner = &kp.adjoint() * &solve_shifted(&self.h_plus, z, &kp)?;
        Ok(&ComplexMatrix::identity(self.n_plus()) - &inner)
    }

    /// `I + K₋*(H − z)⁻¹K₋`, by a direct solve.
    pub fn phi_minus_tilde_inverse(&self, z: C64) -> Result<ComplexMatrix> {
        let km = self.fact.k_minus();
        let inner = &km.adjoint() * &solve_shifted(&self.h, z, &km)?;
        Ok(&ComplexMatrix::identity(self.n_minus()) + &inner)
    }

    /// `‖F·F⁻¹ − I‖_F` for `Φ`, `Φ₊`, `Φ̃₋` with their closed-form inverses.
    pub fn inverse_identity_residuals(&self, z: C64) -> Result<[f64; 3]> {
        let dev = |a: ComplexMatrix, b: ComplexMatrix| {
            (&a * &b).frobenius_distance(&ComplexMatrix::identity(a.rows()))
        };
        Ok([
            dev(self.evaluate_phi(z)?, self.phi_inverse(z)?),
            dev(self.evaluate_phi_plus(z)?, self.phi_plus_inverse(z)?),
            dev(
                self.evaluate_phi_minus_tilde(z)?,
                self.phi_minus_tilde_inverse(z)?,
            ),
        ])
    }

    /// `log` of the family at a non-real `z`, choosing the dissipative or
    /// anti-dissipative route from the half-plane.
    pub fn log_at(&self, which: Which, z: C64, cfg: &QuadratureConfig) -> Result<ComplexMatrix> {
        let t = self.evaluate(which, z)?;
        if which.orientation() * z.im >= 0.0 {
            logm_dissipative(&t, cfg)
        } else {
            logm_antidissipative(&t, cfg)
        }
    }

    /// Boundary value `log F(λ + i0)` of the logarithm of `F ∈ {Φ₊, Φ̃₋, Φ}`.
    pub fn boundary_log(
        &self,
        which: Which,
        lambda: f64,
        sched: &EpsSchedule,
        cfg: &QuadratureConfig,
    ) -> Result<(ComplexMatrix, BoundaryDiagnostic)> {
        sched.validate()?;
        cfg.validate()?;
        if self.block_dim(which) == 0 {
            return Ok((
                ComplexMatrix::zeros(0, 0),
                BoundaryDiagnostic::exact(Route::Empty),
            ));
        }
        self.check_off_spectrum(lambda)?;

        let log_of = |t: &ComplexMatrix| match which {
            Which::Minus => logm_antidissipative(t, cfg),
            Which::Plus | Which::Full => logm_dissipative(t, cfg),
        };

        if sched.fast_path {
            let t = self
                .evaluate(which, C64::new(lambda, 0.0))?
                .hermitian_part();
            if let Ok(inv) = crate::matkit::inverse(&t) {
                if t.norm_one() * inv.norm_one() < MAX_LOG_CONDITION {
                    if let Ok(l) = log_of(&t) {
                        return Ok((l, BoundaryDiagnostic::exact(Route::Direct)));
                    }
                }
            }
        }

        let f = sched.factor;
        let mut eps = sched.eps0;
        let mut prev_log: Option<ComplexMatrix> = None;
        let mut prev_extrap: Option<ComplexMatrix> = None;
        for step in 0..sched.max_steps {
            let l = log_of(&self.evaluate(which, C64::new(lambda, eps))?)?;
            if let Some(p) = &prev_log {
                let r = (&l - &p.scale_real(f)).scale_real(1.0 / (1.0 - f));
                if let Some(q) = &prev_extrap {
                    let cauchy = r.frobenius_distance(q);
                    if cauchy <= sched.conv_tol * r.frobenius_norm().max(1.0) {
                        let diag = BoundaryDiagnostic {
                            route: Route::Schedule,
                            steps: step + 1,
                            final_eps: eps,
                            cauchy,
                            converged: true,
                        };
                        return Ok((r, diag));
                    }
                }
                prev_extrap = Some(r);
            }
            prev_log = Some(l);
            eps *= f;
        }
        Err(Error::NoConvergence {
            what: "boundary value epsilon schedule",
            iterations: sched.max_steps,
        })
    }
}

/// `W*·diag(1/(λᵢ − z))·W`.
fn sandwich(w: &ComplexMatrix, eigenvalues: &[f64], z: C64) -> ComplexMatrix {
    let d: Vec<C64> = eigenvalues
        .iter()
        .map(|&l| (C64::new(l, 0.0) - z).inv())
        .collect();
    &w.adjoint().mul_diag(&d) * w
}
