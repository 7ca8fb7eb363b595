//! Piecewise-constant representations of ξ with exact integrals.

use crate::error::Result;
use crate::herglotz::HerglotzFamily;
use crate::matkit::C64;

use super::{xi_counting_oracle, ShiftProfile};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub a: f64,
    pub b: f64,
    pub value: f64,
}

/// `ξ = Σ vᵢ·χ_(aᵢ, bᵢ)`, zero outside the listed intervals.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepFunction {
    pub steps: Vec<Step>,
    /// Intervals whose value came from the counting oracle because the
    /// profile had no sample inside them.
    pub oracle_fallbacks: usize,
}

/// Sorted, de-duplicated eigenvalues of `H₀` and `H`: the only places ξ jumps.
pub fn jump_points(fam: &HerglotzFamily) -> Vec<f64> {
    let mut pts: Vec<f64> = fam
        .eig_h0()
        .eigenvalues
        .iter()
        .chain(&fam.eig_h().eigenvalues)
        .copied()
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

impl StepFunction {
    /// Exact steps `N_{H₀} − N_H` from the cached eigenvalues.
    pub fn from_counting(fam: &HerglotzFamily) -> Result<Self> {
        let pts = jump_points(fam);
        let mut steps = Vec::new();
        for w in pts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let v = fam.eig_h0().count_at_most(mid) as f64 - fam.eig_h().count_at_most(mid) as f64;
            if v != 0.0 {
                steps.push(Step {
                    a: w[0],
                    b: w[1],
                    value: v,
                });
            }
        }
        Ok(Self {
            steps,
            oracle_fallbacks: 0,
        })
    }

    /// Steps on the jump intervals of `fam`, with values read from the
    /// profile sample closest to each interval's midpoint. Intervals without
    /// a sample fall back to the counting oracle.
    pub fn from_profile(fam: &HerglotzFamily, profile: &ShiftProfile) -> Result<Self> {
        let pts = jump_points(fam);
        let mut steps = Vec::new();
        let mut oracle_fallbacks = 0;
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mid = 0.5 * (a + b);
            let best = profile
                .grid
                .iter()
                .enumerate()
                .filter(|(_, &l)| l > a && l < b)
                .min_by(|x, y| (x.1 - mid).abs().total_cmp(&(y.1 - mid).abs()));
            let v = match best {
                Some((i, _)) => profile.xi[i],
                None => {
                    oracle_fallbacks += 1;
                    xi_counting_oracle(fam, mid)? as f64
                }
            };
            if v != 0.0 {
                steps.push(Step { a, b, value: v });
            }
        }
        Ok(Self {
            steps,
            oracle_fallbacks,
        })
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        self.steps
            .iter()
            .find(|s| lambda > s.a && lambda < s.b)
            .map_or(0.0, |s| s.value)
    }

    /// `∫ ξ(λ) dλ`.
    pub fn integral(&self) -> f64 {
        self.steps.iter().map(|s| s.value * (s.b - s.a)).sum()
    }

    /// `∫ |ξ(λ)| dλ`.
    pub fn abs_integral(&self) -> f64 {
        self.steps.iter().map(|s| s.value.abs() * (s.b - s.a)).sum()
    }

    /// `∫ ξ(λ)(λ − z)⁻² dλ = Σ vᵢ·[(aᵢ − z)⁻¹ − (bᵢ − z)⁻¹]`.
    pub fn resolvent_square_integral(&self, z: C64) -> C64 {
        self.steps
            .iter()
            .map(|s| ((C64::new(s.a, 0.0) - z).inv() - (C64::new(s.b, 0.0) - z).inv()) * s.value)
            .sum()
    }

    /// `∫ ξ(λ)·f(λ) dλ` given an antiderivative `F` of `f`.
    pub fn pair_with_antiderivative(&self, antiderivative: impl Fn(f64) -> f64) -> f64 {
        self.steps
            .iter()
            .map(|s| s.value * (antiderivative(s.b) - antiderivative(s.a)))
            .sum()
    }
}
