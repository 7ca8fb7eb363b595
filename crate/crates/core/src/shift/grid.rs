//! λ-grids that avoid the jump points of ξ.

use crate::error::{Error, Result};
use crate::herglotz::HerglotzFamily;

/// Minimum distance (relative to the spectral scale) between a snapped grid
/// point and any eigenvalue.
pub const SNAP_REL: f64 = 1e-6;

/// Fractional margin added on both sides of the spectral hull.
pub const HULL_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridSpec {
    Uniform { min: f64, max: f64, count: usize },
    Auto { count: usize },
}

impl std::str::FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(GridSpec::Auto { count: 64 });
        }
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Parse(format!("grid '{s}' is not min:max:count or AUTO"));
        if parts.len() == 2 && parts[0].eq_ignore_ascii_case("auto") {
            return Ok(GridSpec::Auto {
                count: parts[1].trim().parse().map_err(|_| bad())?,
            });
        }
        if parts.len() != 3 {
            return Err(bad());
        }
        let min: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let max: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if !(min.is_finite() && max.is_finite()) || count == 0 || (count > 1 && !(min < max)) {
            return Err(bad());
        }
        Ok(GridSpec::Uniform { min, max, count })
    }
}

pub fn uniform(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![min],
        _ => (0..count)
            .map(|i| min + (max - min) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// `[min, max]` of the given eigenvalues, widened by [`HULL_MARGIN`]·scale.
pub fn padded_hull(eigenvalues: &[f64], scale: f64) -> (f64, f64) {
    let lo = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let m = HULL_MARGIN * scale;
    (lo - m, hi + m)
}

/// Moves points lying within `SNAP_REL·scale` of an eigenvalue to that
/// distance, on the side facing the centre of the spectral hull. Points that
/// cannot be separated from every eigenvalue are dropped. Output is sorted
/// and de-duplicated.
pub fn snap(points: &[f64], eigenvalues: &[f64], scale: f64) -> Vec<f64> {
    let guard = SNAP_REL * scale;
    // Step slightly past the guard so rounding cannot leave p inside it.
    let step = guard * (1.0 + 1e-6);
    let lo = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let centre = if lo.is_finite() { 0.5 * (lo + hi) } else { 0.0 };
    let mut out: Vec<f64> = points
        .iter()
        .filter_map(|&p| {
            let mut p = p;
            for _ in 0..4 {
                match eigenvalues.iter().find(|&&e| (p - e).abs() < guard) {
                    None => return Some(p),
                    Some(&e) => p = if e >= centre { e - step } else { e + step },
                }
            }
            eigenvalues
                .iter()
                .all(|&e| (p - e).abs() >= guard)
                .then_some(p)
        })
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Eigenvalue-aware grid for several families at once: `count` uniform
/// points over the padded joint hull plus all midpoints between distinct
/// eigenvalues, snapped off every family's spectra.
pub fn joint_auto_grid(families: &[&HerglotzFamily], count: usize) -> Vec<f64> {
    let mut eigs: Vec<f64> = families.iter().flat_map(|f| f.all_eigenvalues()).collect();
    eigs.sort_by(f64::total_cmp);
    eigs.dedup();
    let scale = families
        .iter()
        .map(|f| f.scale())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let (lo, hi) = padded_hull(&eigs, scale);
    let mut pts = uniform(lo, hi, count.max(2));
    let tol = SNAP_REL * scale;
    for w in eigs.windows(2) {
        if w[1] - w[0] > 2.0 * tol {
            pts.push(0.5 * (w[0] + w[1]));
        }
    }
    snap(&pts, &eigs, scale)
}

pub fn auto_grid(fam: &HerglotzFamily, count: usize) -> Vec<f64> {
    joint_auto_grid(&[fam], count)
}

pub fn build(fam: &HerglotzFamily, spec: GridSpec) -> Vec<f64> {
    match spec {
        GridSpec::Auto { count } => auto_grid(fam, count),
        GridSpec::Uniform { min, max, count } => snap(
            &uniform(min, max, count),
            &fam.all_eigenvalues(),
            fam.scale(),
        ),
    }
}
