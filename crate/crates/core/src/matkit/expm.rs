use super::ComplexMatrix;

const SERIES_TERMS: usize = 18;

/// Matrix exponential by scaling and squaring: `A` is scaled by `2^-s` so that
/// its 1-norm is at most 1/2, the Taylor series is summed through the term of
/// order 18, and the result is squared `s` times.
pub fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    let norm = a.norm_one();
    let mut s = 0i32;
    if norm > 0.5 {
        s = (norm / 0.5).log2().ceil() as i32;
        while norm * 2f64.powi(-s) > 0.5 {
            s += 1;
        }
    }
    let scaled = a.scale_real(2f64.powi(-s));

    // Horner form: I + X(I + X/2(I + X/3(...)))
    let id = ComplexMatrix::identity(n);
    let mut acc = id.clone();
    for k in (1..=SERIES_TERMS).rev() {
        acc = &id + &(&scaled * &acc).scale_real(1.0 / k as f64);
    }
    for _ in 0..s {
        acc = &acc * &acc;
    }
    acc
}
