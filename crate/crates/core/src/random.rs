//! Seeded generators for the random instances used by the check suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matkit::{ComplexMatrix, C64};

pub type SuiteRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Entries i.i.d. standard complex Gaussian.
pub fn random_complex(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// `(A + A*)/2` for Gaussian `A`.
pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    random_complex(n, n, rng).hermitian_part()
}

/// Haar-like unitary from Gram–Schmidt on a Gaussian matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let mut q = random_complex(n, n, rng);
    for j in 0..n {
        for k in 0..j {
            let dot: C64 = (0..n).map(|i| q[(i, k)].conj() * q[(i, j)]).sum();
            for i in 0..n {
                let t = q[(i, k)];
                q[(i, j)] -= dot * t;
            }
        }
        let norm = (0..n).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            q[(i, j)] /= norm;
        }
    }
    q
}

/// Hermitian matrix of the given rank with eigenvalue magnitudes in
/// `[0.3, 2]` and alternating signs (so both signs occur once `rank ≥ 2`).
pub fn random_indefinite(n: usize, rank: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let signs: Vec<f64> = (0..rank)
        .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    low_rank(n, &signs, rng)
}

/// Positive semidefinite matrix of the given rank, eigenvalues in `[0.3, 2]`.
pub fn random_psd(n: usize, rank: usize, rng: &mut impl Rng) -> ComplexMatrix {
    low_rank(n, &vec![1.0; rank], rng)
}

fn low_rank(n: usize, signs: &[f64], rng: &mut impl Rng) -> ComplexMatrix {
    assert!(signs.len() <= n);
    let u = random_unitary(n, rng);
    let d: Vec<C64> = signs
        .iter()
        .map(|s| C64::new(s * rng.gen_range(0.3..2.0), 0.0))
        .collect();
    let cols = u.columns(0..signs.len());
    (&cols.mul_diag(&d) * &cols.adjoint()).hermitian_part()
}

/// `A + i·(B·B* + floor·I)` with Hermitian `A`; dissipative, generically
/// non-normal, invertible whenever `floor > 0`.
pub fn random_dissipative(n: usize, floor: f64, rng: &mut impl Rng) -> ComplexMatrix {
    let a = random_hermitian(n, rng);
    let b = random_complex(n, n, rng).scale_real(0.7);
    let mut im = &b * &b.adjoint();
    for i in 0..n {
        im[(i, i)] += C64::new(floor, 0.0);
    }
    &a + &im.hermitian_part().scale(C64::new(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::eig_hermitian;

    #[test]
    fn same_seed_same_matrix() {
        let a = random_complex(3, 3, &mut seeded_rng(7));
        let b = random_complex(3, 3, &mut seeded_rng(7));
        assert_eq!(a, b);
    }

    #[test]
    fn unitary_is_unitary() {
        let u = random_unitary(5, &mut seeded_rng(1));
        let g = &u.adjoint() * &u;
        assert!(g.max_abs_diff(&ComplexMatrix::identity(5)) < 1e-12);
    }

    #[test]
    fn indefinite_has_requested_inertia() {
        let v = random_indefinite(6, 4, &mut seeded_rng(2));
        let e = eig_hermitian(&v).unwrap();
        let pos = e.eigenvalues.iter().filter(|&&l| l > 1e-9).count();
        let neg = e.eigenvalues.iter().filter(|&&l| l < -1e-9).count();
        assert_eq!((pos, neg), (2, 2));
    }

    #[test]
    fn dissipative_has_positive_imaginary_part() {
        let t = random_dissipative(4, 0.1, &mut seeded_rng(3));
        let e = eig_hermitian(&t.imag_part()).unwrap();
        assert!(e.eigenvalues[0] >= 0.1 - 1e-12);
    }
}
