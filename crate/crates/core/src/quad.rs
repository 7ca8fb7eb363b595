//! Adaptive Gauss–Kronrod (7/15) quadrature for scalar and matrix-valued
//! integrands, plus Gauss–Legendre rules.

use crate::error::{Error, Result};
use crate::matkit::{ComplexMatrix, C64};

/// Values that can be integrated: a vector space with a norm.
pub trait Integrand: Clone {
    fn zero_like(&self) -> Self;
    fn add_scaled(&mut self, other: &Self, w: f64);
    fn norm(&self) -> f64;
}

impl Integrand for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        *self += w * other;
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for C64 {
    fn zero_like(&self) -> Self {
        C64::new(0.0, 0.0)
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        *self += other * w;
    }
    fn norm(&self) -> f64 {
        C64::norm(*self)
    }
}

impl Integrand for ComplexMatrix {
    fn zero_like(&self) -> Self {
        ComplexMatrix::zeros(self.rows(), self.cols())
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        *self += &other.scale_real(w);
    }
    fn norm(&self) -> f64 {
        self.frobenius_norm()
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
/// Gauss weights for the odd-indexed Kronrod nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_panels: 4096,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Quadrature<V> {
    pub value: V,
    pub error: f64,
    pub panels: usize,
}

struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
    magnitude: f64,
}

fn gk15<V: Integrand>(f: &impl Fn(f64) -> Result<V>, a: f64, b: f64) -> Result<Panel<V>> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kron = fc.zero_like();
    let mut gauss = fc.zero_like();
    let mut magnitude = WGK[7] * fc.norm();
    kron.add_scaled(&fc, WGK[7]);
    gauss.add_scaled(&fc, WG[3]);
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x)?;
        let f2 = f(c + x)?;
        kron.add_scaled(&f1, WGK[j]);
        kron.add_scaled(&f2, WGK[j]);
        magnitude += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            gauss.add_scaled(&f1, WG[j / 2]);
            gauss.add_scaled(&f2, WG[j / 2]);
        }
    }
    let mut diff = kron.clone();
    diff.add_scaled(&gauss, -1.0);
    let mut value = kron.zero_like();
    value.add_scaled(&kron, h);
    Ok(Panel {
        a,
        b,
        value,
        error: diff.norm() * h.abs(),
        magnitude: magnitude * h.abs(),
    })
}

/// Globally adaptive GK15 over the intervals between consecutive
/// `breakpoints`. Bisects the panel with the largest error until the summed
/// error is below `max(rel_tol·‖I‖, abs_tol)` or the roundoff floor.
pub fn integrate<V: Integrand>(
    f: impl Fn(f64) -> Result<V>,
    breakpoints: &[f64],
    opts: AdaptiveOptions,
) -> Result<Quadrature<V>> {
    assert!(breakpoints.len() >= 2, "need at least one interval");
    let mut panels = Vec::with_capacity(breakpoints.len() - 1);
    for w in breakpoints.windows(2) {
        panels.push(gk15(&f, w[0], w[1])?);
    }
    loop {
        let mut total = panels[0].value.zero_like();
        let mut error = 0.0;
        let mut magnitude = 0.0;
        for p in &panels {
            total.add_scaled(&p.value, 1.0);
            error += p.error;
            magnitude += p.magnitude;
        }
        let target = (opts.rel_tol * total.norm())
            .max(opts.abs_tol)
            .max(50.0 * f64::EPSILON * magnitude);
        if error <= target {
            return Ok(Quadrature {
                value: total,
                error,
                panels: panels.len(),
            });
        }
        if panels.len() >= opts.max_panels {
            return Err(Error::QuadratureDiverged {
                panels: panels.len(),
                error,
            });
        }
        let worst = panels.iter().enumerate().fold(0, |best, (i, p)| {
            if p.error > panels[best].error {
                i
            } else {
                best
            }
        });
        let Panel { a, b, .. } = panels[worst];
        let mid = 0.5 * (a + b);
        if mid <= a.min(b) || mid >= a.max(b) {
            return Err(Error::QuadratureDiverged {
                panels: panels.len(),
                error,
            });
        }
        let left = gk15(&f, a, mid)?;
        let right = gk15(&f, mid, b)?;
        panels[worst] = left;
        panels.insert(worst + 1, right);
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre nodes and weights mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    x.iter()
        .zip(&w)
        .map(|(&x, &w)| (c + h * x, h * w))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(
            |x| Ok(x.powi(5) - 3.0 * x),
            &[0.0, 2.0],
            AdaptiveOptions::default(),
        )
        .unwrap();
        assert!((q.value - (64.0 / 6.0 - 6.0)).abs() < 1e-13);
        assert_eq!(q.panels, 1);
    }

    #[test]
    fn peaked_integrand_refines() {
        // ∫ 1/(x² + a²) over [-1, 1] = 2·atan(1/a)/a
        let a = 1e-3;
        let q = integrate(
            |x| Ok(1.0 / (x * x + a * a)),
            &[-1.0, 1.0],
            AdaptiveOptions::default(),
        )
        .unwrap();
        let exact = 2.0 * (1.0 / a).atan() / a;
        assert!((q.value - exact).abs() < 1e-9 * exact);
        assert!(q.panels > 1);
    }

    #[test]
    fn complex_and_matrix_values() {
        let q = integrate(
            |x| Ok(C64::new(0.0, x).exp()),
            &[0.0, std::f64::consts::PI],
            AdaptiveOptions::default(),
        )
        .unwrap();
        assert!((q.value - C64::new(0.0, 2.0)).norm() < 1e-13);
        let m = integrate(
            |x| Ok(ComplexMatrix::from_real_diag(&[x, x * x])),
            &[0.0, 0.5, 1.0],
            AdaptiveOptions::default(),
        )
        .unwrap();
        assert!(
            m.value
                .max_abs_diff(&ComplexMatrix::from_real_diag(&[0.5, 1.0 / 3.0]))
                < 1e-15
        );
    }

    #[test]
    fn panel_budget_is_enforced() {
        let opts = AdaptiveOptions {
            rel_tol: 1e-14,
            abs_tol: 0.0,
            max_panels: 4,
        };
        let r = integrate(|x: f64| Ok(x.abs().sqrt()), &[-1.0, 1.0], opts);
        assert!(matches!(r, Err(Error::QuadratureDiverged { .. })));
    }

    #[test]
    fn gauss_legendre_exactness() {
        for n in [1, 2, 5, 8, 32] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n = {n}");
            let deg = 2 * n - 1;
            let approx: f64 = x
                .iter()
                .zip(&w)
                .map(|(x, w)| w * x.powi(deg as i32 - 1))
                .sum();
            let exact = if (deg - 1) % 2 == 0 {
                2.0 / deg as f64
            } else {
                0.0
            };
            assert!((approx - exact).abs() < 1e-13, "n = {n}");
        }
        let s: f64 = gauss_legendre_on(8, 0.0, 1.0)
            .iter()
            .map(|(x, w)| w * x.powi(12))
            .sum();
        assert!((s - 1.0 / 13.0).abs() < 1e-14);
    }
}
