//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs without the libtest harness so the lines always
//! reach standard output.

mod common;

use std::error::Error as StdError;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use krein_shift::averaging::{
    averaged_pairing_lhs, averaged_pairing_rhs, operator_average_residual,
    operator_increment_residual, PerturbationPath, TestFunction, DEFAULT_S_NODES,
};
use krein_shift::cli;
use krein_shift::herglotz::{EpsSchedule, HerglotzFamily, Which};
use krein_shift::matkit::{ComplexMatrix, C64, DEFAULT_RANK_TOL};
use krein_shift::oplog::{logm_dissipative, QuadratureConfig};
use krein_shift::random::{
    random_complex, random_dissipative, random_hermitian, random_indefinite, random_psd,
    seeded_rng, SuiteRng,
};
use krein_shift::shift::checks::{
    example_3_9, herglotz_reconstruction_residual, square_root_family_xi,
};
use krein_shift::shift::{auto_grid, joint_auto_grid, xi_at, xi_via_det};
use rand::Rng;

use common::*;

type R<T> = Result<T, Box<dyn StdError>>;

// Tolerances and limits.
const ORACLE_TOL: f64 = 1e-6;
const MIN_GRID_POINTS: usize = 50;
const C1_LIMIT: Duration = Duration::from_secs(60);
const TRACE_FORMULA_REL: f64 = 1e-8;
const C2_LIMIT: Duration = Duration::from_secs(10);
const DET_TOL: f64 = 1e-6;
const LOGM_REL: f64 = 1e-8;
const IM_SPECTRUM_SLACK: f64 = 1e-8;
const C4_LIMIT: Duration = Duration::from_secs(30);
const INVERSE_TOL: f64 = 1e-10;
const TRACE_IDENTITY_TOL: f64 = 1e-8;
const LEMMA_TOL: f64 = 1e-6;
const CHAIN_TOL: f64 = 1e-6;
const MONOTONE_SLACK: f64 = 1e-8;
const EXAMPLE_TOL: f64 = 1e-8;
const EXAMPLE_GAP: f64 = 0.1;
const AVERAGING_REL: f64 = 1e-4;
const C10_LIMIT: Duration = Duration::from_secs(120);
const OPERATOR_AVERAGE_TOL: f64 = 1e-4;
const RECONSTRUCTION_TOL: f64 = 1e-4;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> R<Verdict> {
    Ok(Verdict { passed, detail })
}

fn defaults() -> (EpsSchedule, QuadratureConfig) {
    (EpsSchedule::default(), QuadratureConfig::default())
}

fn random_z(rng: &mut SuiteRng) -> C64 {
    let im: f64 = rng.gen_range(0.1..2.0);
    C64::new(
        rng.gen_range(-3.0..3.0),
        if rng.gen_bool(0.5) { im } else { -im },
    )
}

/// Random pair with `dim ∈ [4, 8]` and indefinite `V` of rank `2..=dim`.
fn oracle_instance(seed: u64) -> (ComplexMatrix, ComplexMatrix) {
    let mut rng = seeded_rng(1000 + seed);
    let n = 4 + (seed as usize) % 5;
    let rank = 2 + (seed as usize * 7) % (n - 1);
    (
        random_hermitian(n, &mut rng),
        random_indefinite(n, rank, &mut rng),
    )
}

/// Sorted, merged eigenvalues of `H₀` and `H` from the bisection oracle.
fn jump_points(h0: &ComplexMatrix, h: &ComplexMatrix) -> Vec<f64> {
    let mut pts = eigenvalues_by_bisection(h0);
    pts.extend(eigenvalues_by_bisection(h));
    let scale = pts.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    merged(pts, 1e-12 * scale)
}

/// `(a, b, ξ on (a, b))` for each gap between jump points: the value from
/// the boundary-value route at the midpoint, or from counting when the gap
/// is too narrow for the exclusion zones.
type Steps = Vec<(f64, f64, f64)>;

fn operator_steps(
    fam: &HerglotzFamily,
    sched: &EpsSchedule,
    cfg: &QuadratureConfig,
) -> R<(Steps, usize)> {
    let pts = jump_points(fam.h0(), fam.h());
    let guard = 2e-6 * fam.scale();
    let mut steps = Vec::new();
    let mut counted = 0;
    for w in pts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let v = if w[1] - w[0] > guard {
            xi_at(fam, mid, sched, cfg)?
        } else {
            counted += 1;
            xi_by_counting(fam.h0(), fam.h(), mid)
        };
        steps.push((w[0], w[1], v));
    }
    Ok((steps, counted))
}

fn c1_oracle_equivalence() -> R<Verdict> {
    let (s, c) = defaults();
    let start = Instant::now();
    let (mut worst, mut points, mut fewest) = (0.0f64, 0usize, usize::MAX);
    for seed in 0..20 {
        let (h0, v) = oracle_instance(seed);
        let fam = HerglotzFamily::new(&h0, &v, DEFAULT_RANK_TOL)?;
        let h = &h0 + &v;
        let grid = auto_grid(&fam, MIN_GRID_POINTS + 6);
        fewest = fewest.min(grid.len());
        for &l in &grid {
            worst = worst.max((xi_at(&fam, l, &s, &c)? - xi_by_counting(&h0, &h, l)).abs());
        }
        points += grid.len();
    }
    let t = start.elapsed();
    verdict(
        worst < ORACLE_TOL && fewest >= MIN_GRID_POINTS && t < C1_LIMIT,
        format!(
            "max |xi - counting| = {worst:.2e} (< {ORACLE_TOL:.0e}) over {points} points, min {fewest} per instance, {:.2} s (< {} s)",
            t.as_secs_f64(),
            C1_LIMIT.as_secs()
        ),
    )
}

fn c2_trace_formula() -> R<Verdict> {
    let (s, c) = defaults();
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut counted = 0;
    for seed in 0..10 {
        let (h0, v) = oracle_instance(seed);
        let fam = HerglotzFamily::new(&h0, &v, DEFAULT_RANK_TOL)?;
        let h = &h0 + &v;
        let (steps, n) = operator_steps(&fam, &s, &c)?;
        counted += n;
        let mut rng = seeded_rng(2000 + seed);
        for _ in 0..10 {
            let z = random_z(&mut rng);
            let lhs = resolvent_trace(&h, z) - resolvent_trace(&h0, z);
            let integral: C64 = steps
                .iter()
                .map(|&(a, b, x)| ((C64::new(a, 0.0) - z).inv() - (C64::new(b, 0.0) - z).inv()) * x)
                .sum();
            worst = worst.max((lhs + integral).norm() / (1.0 + lhs.norm()));
        }
    }
    let t = start.elapsed();
    verdict(
        worst < TRACE_FORMULA_REL && t < C2_LIMIT,
        format!(
            "max |LHS + integral|/(1+|LHS|) = {worst:.2e} (< {TRACE_FORMULA_REL:.0e}), 100 points, {counted} narrow gaps counted, {:.2} s (< {} s)",
            t.as_secs_f64(),
            C2_LIMIT.as_secs()
        ),
    )
}

fn c3_determinant_route() -> R<Verdict> {
    let (s, c) = defaults();
    let (mut worst, mut points) = (0.0f64, 0usize);
    for seed in 0..20 {
        let (h0, v) = oracle_instance(seed);
        let fam = HerglotzFamily::new(&h0, &v, DEFAULT_RANK_TOL)?;
        let h = &h0 + &v;
        for l in auto_grid(&fam, MIN_GRID_POINTS + 6) {
            worst =
                worst.max((xi_via_det(&fam, l, s.eps0, &c)? - xi_by_counting(&h0, &h, l)).abs());
            points += 1;
        }
    }
    verdict(
        worst < DET_TOL,
        format!("max |xi_det - counting| = {worst:.2e} (< {DET_TOL:.0e}) over {points} points"),
    )
}

fn c4_operator_logarithm() -> R<Verdict> {
    let (_, c) = defaults();
    let start = Instant::now();
    let mut rng = seeded_rng(4000);
    let (mut roundtrip, mut below, mut above) = (0.0f64, 0.0f64, 0.0f64);
    let mut non_normal = 0;
    for i in 0..50 {
        let n = 1 + i % 6;
        let t = if i % 5 == 4 {
            // Shifted nilpotent: far from normal.
            let nil = ComplexMatrix::from_fn(n, n, |r, col| {
                if col > r {
                    C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5))
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            let a = nil.imag_part().operator_norm() + 0.05;
            &nil + &ComplexMatrix::scalar(n, C64::new(rng.gen_range(-2.0..2.0), a))
        } else {
            random_dissipative(n, if i % 3 == 0 { 1e-3 } else { 0.1 }, &mut rng)
        };
        if (&(&t * &t.adjoint()) - &(&t.adjoint() * &t)).frobenius_norm() > 1e-3 {
            non_normal += 1;
        }
        let l = logm_dissipative(&t, &c)?;
        roundtrip = roundtrip.max(expm_taylor(&l).frobenius_distance(&t) / t.frobenius_norm());
        let im = eigenvalues_by_bisection(&l.imag_part());
        below = below.max(-im[0]);
        above = above.max(im[n - 1] - PI);
    }
    let t = start.elapsed();
    verdict(
        roundtrip < LOGM_REL && below <= IM_SPECTRUM_SLACK && above <= IM_SPECTRUM_SLACK && t < C4_LIMIT,
        format!(
            "max |exp(log T) - T|/|T| = {roundtrip:.2e} (< {LOGM_REL:.0e}), Im spectrum overshoot below 0: {below:.2e}, above pi: {above:.2e} (<= {IM_SPECTRUM_SLACK:.0e}), {non_normal}/50 non-normal, {:.2} s (< {} s)",
            t.as_secs_f64(),
            C4_LIMIT.as_secs()
        ),
    )
}

fn c5_inverse_identities() -> R<Verdict> {
    let mut worst = [0.0f64; 3];
    let mut agreement = 0.0f64;
    for seed in 0..20 {
        let mut rng = seeded_rng(5000 + seed);
        let n = 3 + (seed as usize) % 5;
        let h0 = random_hermitian(n, &mut rng);
        let v = random_indefinite(n, 2 + (seed as usize) % (n - 1), &mut rng);
        let fam = HerglotzFamily::new(&h0, &v, DEFAULT_RANK_TOL)?;
        let z = random_z(&mut rng);
        let pairs = [
            (fam.evaluate_phi(z)?, fam.phi_inverse(z)?),
            (fam.evaluate_phi_plus(z)?, fam.phi_plus_inverse(z)?),
            (
                fam.evaluate_phi_minus_tilde(z)?,
                fam.phi_minus_tilde_inverse(z)?,
            ),
        ];
        for (k, (m, inv)) in pairs.iter().enumerate() {
            let id = ComplexMatrix::identity(m.rows());
            worst[k] = worst[k]
                .max((m * inv).frobenius_distance(&id))
                .max((inv * m).frobenius_distance(&id));
            if m.rows() > 0 {
                let gj = gauss_jordan_inverse(m);
                agreement = agreement.max(gj.frobenius_distance(inv) / gj.frobenius_norm());
            }
        }
    }
    let max = worst.iter().copied().fold(0.0, f64::max);
    verdict(
        max < INVERSE_TOL,
        format!(
            "deviation from I: Phi {:.2e}, Phi+ {:.2e}, Phi-~ {:.2e} (< {INVERSE_TOL:.0e}); closed forms vs Gauss-Jordan {agreement:.2e}",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn c6_trace_identity() -> R<Verdict> {
    let (s, c) = defaults();
    let (mut worst, mut l1_excess) = (0.0f64, f64::NEG_INFINITY);
    for seed in 0..20 {
        let (h0, v) = oracle_instance(seed);
        let fam = HerglotzFamily::new(&h0, &v, DEFAULT_RANK_TOL)?;
        let (steps, _) = operator_steps(&fam, &s, &c)?;
        let integral: f64 = steps.iter().map(|&(a, b, x)| x * (b - a)).sum();
        let abs_integral: f64 = steps.iter().map(|&(a, b, x)| x.abs() * (b - a)).sum();
        worst = worst.max((v.trace().re - integral).abs());
        l1_excess = l1_excess.max(abs_integral - trace_norm_hermitian(&v));
    }
    verdict(
        worst < TRACE_IDENTITY_TOL && l1_excess <= TRACE_IDENTITY_TOL,
        format!(
            "max |tr V - integral xi| = {worst:.2e} (< {TRACE_IDENTITY_TOL:.0e}); max (integral |xi| - |V|_1) = {l1_excess:.2e} (<= {TRACE_IDENTITY_TOL:.0e})"
        ),
    )
}

fn c7_resolvent_derivatives() -> R<Verdict> {
    let (_, c) = defaults();
    let fine = QuadratureConfig {
        rel_tol: 1e-13,
        ..c
    };
    let mut worst = 0.0f64;
    for seed in 0..10 {
        let (h0, v) = oracle_instance(seed);
        let fam = HerglotzFamily::new(&h0, &v, DEFAULT_RANK_TOL)?;
        let mut rng = seeded_rng(7000 + seed);
        for _ in 0..5 {
            let z = random_z(&mut rng);
            let h = 1e-5 * (1.0 + z.norm());
            let d = |which: Which| -> R<C64> {
                Ok((fam.log_at(which, z + h, &fine)?.trace()
                    - fam.log_at(which, z - h, &fine)?.trace())
                    / (2.0 * h))
            };
            let r0 = resolvent_trace(fam.h0(), z);
            let rp = resolvent_trace(fam.h_plus(), z);
            let r = resolvent_trace(fam.h(), z);
            worst = worst
                .max((d(Which::Plus)? - (r0 - rp)).norm())
                .max((d(Which::Minus)? - (rp - r)).norm());
        }
    }
    verdict(
        worst < LEMMA_TOL,
        format!("max finite-difference residual = {worst:.2e} (< {LEMMA_TOL:.0e}) at 50 points"),
    )
}

fn c8_chain_and_monotonicity() -> R<Verdict> {
    let (s, c) = defaults();
    let (mut chain, mut violation, mut oracle, mut points) = (0.0f64, 0.0f64, 0.0f64, 0usize);
    for seed in 0..10 {
        let mut rng = seeded_rng(8000 + seed);
        let n = 3 + (seed as usize) % 4;
        let h0 = random_hermitian(n, &mut rng);
        let v1 = random_indefinite(n, 2, &mut rng);
        let p = random_psd(n, 1 + (seed as usize) % n, &mut rng);
        let v2 = &v1 + &p;
        let h1 = &h0 + &v1;
        let h2 = &h0 + &v2;
        let f01 = HerglotzFamily::new(&h0, &v1, DEFAULT_RANK_TOL)?;
        let f12 = HerglotzFamily::new(&h1, &p, DEFAULT_RANK_TOL)?;
        let f02 = HerglotzFamily::new(&h0, &v2, DEFAULT_RANK_TOL)?;
        for l in joint_auto_grid(&[&f01, &f12, &f02], 24) {
            let x01 = xi_at(&f01, l, &s, &c)?;
            let x12 = xi_at(&f12, l, &s, &c)?;
            let x02 = xi_at(&f02, l, &s, &c)?;
            chain = chain.max((x02 - x01 - x12).abs());
            violation = violation.max(x01 - x02);
            oracle = oracle
                .max((x01 - xi_by_counting(&h0, &h1, l)).abs())
                .max((x12 - xi_by_counting(&h1, &h2, l)).abs())
                .max((x02 - xi_by_counting(&h0, &h2, l)).abs());
            points += 1;
        }
    }
    verdict(
        chain < CHAIN_TOL && violation <= MONOTONE_SLACK && oracle < CHAIN_TOL,
        format!(
            "chain residual {chain:.2e} (< {CHAIN_TOL:.0e}), monotonicity violation {violation:.2e} (<= {MONOTONE_SLACK:.0e}), oracle {oracle:.2e}, {points} points"
        ),
    )
}

fn c9_example() -> R<Verdict> {
    let (s, c) = defaults();
    let (a, b, cc, lambda) = (0.2, 0.4, 0.9, 1.3);
    let ex = example_3_9(a, b, cc, lambda, &s, &c)?;
    // Spectral projections onto the eigenvalues above λ, from the known
    // eigenvectors (1, ±1)/√2 and the coordinate axes.
    let half = C64::new(0.5, 0.0);
    let p1 = ComplexMatrix::from_fn(2, 2, |_, _| half);
    let p2 = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
    let xi1 = square_root_family_xi(
        &ComplexMatrix::from_real_rows(&[&[1.0, b], &[b, 1.0]]),
        lambda,
        &s,
        &c,
    )?;
    let xi2 = square_root_family_xi(
        &ComplexMatrix::from_real_rows(&[&[1.0 + a, 0.0], &[0.0, 1.0 + cc]]),
        lambda,
        &s,
        &c,
    )?;
    let dev = xi1
        .max_abs_diff(&p1)
        .max(xi2.max_abs_diff(&p2))
        .max(ex.residual());
    let eig = eigenvalues_by_bisection(&(&xi2 - &xi1));
    let certificate = eig[0] <= -EXAMPLE_GAP && eig[1] >= EXAMPLE_GAP;
    let exact = (eig[0] + FRAC_1_SQRT_2)
        .abs()
        .max((eig[1] - FRAC_1_SQRT_2).abs());
    verdict(
        dev < EXAMPLE_TOL && certificate && exact < EXAMPLE_TOL,
        format!(
            "closed-form deviation {dev:.2e} (< {EXAMPLE_TOL:.0e}); eig(Xi2 - Xi1) = [{:+.9}, {:+.9}] vs -+1/sqrt2; tr Xi1 = {:.9}, tr Xi2 = {:.9} (both rank-one projections; the printed traces 1+b and 1+c are discrepant)",
            eig[0],
            eig[1],
            xi1.trace().re,
            xi2.trace().re
        ),
    )
}

/// `Σᵢ ∫_{λᵢ(s₁)}^{λᵢ(s₂)} f`, the exact value of both sides of the weak
/// averaging identity.
fn eigenvalue_flow_oracle(h0: &ComplexMatrix, path: &PerturbationPath, f: &TestFunction) -> f64 {
    let e1 = eigenvalues_by_bisection(&(h0 + &path.v_at(path.s1)));
    let e2 = eigenvalues_by_bisection(&(h0 + &path.v_at(path.s2)));
    e1.iter()
        .zip(&e2)
        .map(|(&a, &b)| match f {
            TestFunction::Polynomial(coef) => {
                let anti = |x: f64| {
                    coef.iter()
                        .enumerate()
                        .map(|(k, c)| c * x.powi(k as i32 + 1) / (k + 1) as f64)
                        .sum::<f64>()
                };
                anti(b) - anti(a)
            }
            _ => simpson(|x| f.eval(x), a, b, 4000),
        })
        .sum()
}

fn c10_spectral_averaging() -> R<Verdict> {
    let (s, c) = defaults();
    let start = Instant::now();
    let (mut worst, mut oracle) = (0.0f64, 0.0f64);
    for i in 0..10u64 {
        let mut rng = seeded_rng(10_000 + i);
        let n = 3 + (i as usize) % 4;
        let h0 = random_hermitian(n, &mut rng);
        let v0 = random_indefinite(n, 2, &mut rng);
        let v1 = random_indefinite(n, 2 + (i as usize) % (n - 1), &mut rng);
        let f = if i % 2 == 0 {
            TestFunction::Polynomial((0..7).map(|_| rng.gen_range(-1.0..1.0) / 3.0).collect())
        } else {
            TestFunction::Gaussian {
                center: rng.gen_range(-1.0..1.0),
                width: rng.gen_range(0.4..1.2),
            }
        };
        let path = PerturbationPath::new(&v0, &v1, 0.0, 1.0)?;
        let lhs = averaged_pairing_lhs(&h0, &path, &f, DEFAULT_S_NODES)?;
        let rhs = averaged_pairing_rhs(&h0, &path, &f, &s, &c, DEFAULT_RANK_TOL)?;
        let exact = eigenvalue_flow_oracle(&h0, &path, &f);
        worst = worst.max((lhs - rhs).abs() / (1.0 + lhs.abs()));
        oracle = oracle.max((rhs - exact).abs() / (1.0 + exact.abs()));
    }
    let t = start.elapsed();
    verdict(
        worst <= AVERAGING_REL && oracle <= AVERAGING_REL && t < C10_LIMIT,
        format!(
            "max |lhs - rhs|/(1+|lhs|) = {worst:.2e} (<= {AVERAGING_REL:.0e}), rhs vs eigenvalue flow {oracle:.2e}, {:.2} s (< {} s)",
            t.as_secs_f64(),
            C10_LIMIT.as_secs()
        ),
    )
}

fn c11_operator_averaging() -> R<Verdict> {
    let (s, c) = defaults();
    let (mut average, mut increment) = (0.0f64, 0.0f64);
    for i in 0..5u64 {
        let mut rng = seeded_rng(11_000 + i);
        let n = 2 + (i as usize) % 4;
        let r = (1 + (i as usize) % 3).min(n);
        let h0 = random_hermitian(n, &mut rng);
        let k = random_complex(n, r, &mut rng);
        let f = if i % 2 == 0 {
            TestFunction::Gaussian {
                center: 0.0,
                width: 0.9,
            }
        } else {
            TestFunction::Polynomial(vec![0.3, -0.2, 0.5, 0.1])
        };
        average = average.max(operator_average_residual(
            &h0,
            &k,
            &f,
            DEFAULT_S_NODES,
            &s,
            &c,
        )?);
        increment = increment.max(operator_increment_residual(
            &h0,
            &k,
            &f,
            0.25,
            0.75,
            DEFAULT_S_NODES,
            &s,
            &c,
        )?);
    }
    verdict(
        average < OPERATOR_AVERAGE_TOL && increment < OPERATOR_AVERAGE_TOL,
        format!(
            "max residual over [0,1] = {average:.2e}, over [0.25,0.75] = {increment:.2e} (< {OPERATOR_AVERAGE_TOL:.0e}), 5 instances"
        ),
    )
}

fn c12_reconstruction() -> R<Verdict> {
    let (s, c) = defaults();
    let mut worst = 0.0f64;
    for i in 0..5u64 {
        let mut rng = seeded_rng(12_000 + i);
        let n = 2 + (i as usize) % 4;
        let h0 = random_hermitian(n, &mut rng);
        let v = random_psd(n, 1 + (i as usize) % n, &mut rng);
        let fam = HerglotzFamily::new(&h0, &v, DEFAULT_RANK_TOL)?;
        worst = worst.max(herglotz_reconstruction_residual(
            &fam,
            C64::new(1.0, 2.0),
            &s,
            &c,
        )?);
    }
    verdict(
        worst < RECONSTRUCTION_TOL,
        format!("max Frobenius residual = {worst:.2e} (< {RECONSTRUCTION_TOL:.0e}), 5 instances"),
    )
}

fn check_all_in_pool(threads: usize) -> R<(i32, Vec<u8>)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?;
    Ok(pool.install(|| {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = cli::run(
            ["krein-shift", "--seed", "7", "check", "all"],
            &mut out,
            &mut err,
        );
        (code, out)
    }))
}

fn c13_determinism() -> R<Verdict> {
    let mut reports = Vec::new();
    for threads in [1, 2, 8] {
        reports.push(check_all_in_pool(threads)?);
    }
    let mut binary = Vec::new();
    for threads in ["1", "2", "8"] {
        let out = Command::new(env!("CARGO_BIN_EXE_krein-shift"))
            .args(["--seed", "7", "check", "all"])
            .env(cli::THREADS_ENV, threads)
            .output()?;
        binary.push((out.status.code().unwrap_or(-1), out.stdout));
    }
    let reference = &reports[0];
    let identical = reports.iter().chain(&binary).all(|r| r == reference);
    let all_passed = reference.0 == 0;
    verdict(
        identical && !reference.1.is_empty(),
        format!(
            "check all (seed 7): {} bytes, identical at 1/2/8 threads in-process and via the binary: {identical}; suite exit status {}{}",
            reference.1.len(),
            reference.0,
            if all_passed { "" } else { " (suite failures are reported by their own criteria)" }
        ),
    )
}

fn main() {
    type Criterion = (&'static str, fn() -> R<Verdict>);
    let criteria: [Criterion; 13] = [
        ("oracle equivalence", c1_oracle_equivalence),
        ("trace formula", c2_trace_formula),
        ("determinant route", c3_determinant_route),
        ("operator logarithm", c4_operator_logarithm),
        ("inverse identities", c5_inverse_identities),
        ("trace identity and L1 bound", c6_trace_identity),
        ("resolvent derivative identities", c7_resolvent_derivatives),
        ("chain rule and monotonicity", c8_chain_and_monotonicity),
        ("indefinite Xi example", c9_example),
        ("spectral averaging", c10_spectral_averaging),
        ("operator averaging", c11_operator_averaging),
        ("Herglotz reconstruction", c12_reconstruction),
        ("determinism", c13_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = match catch_unwind(AssertUnwindSafe(run)) {
            Ok(Ok(v)) => v,
            Ok(Err(e)) => Verdict {
                passed: false,
                detail: format!("error: {e}"),
            },
            Err(_) => Verdict {
                passed: false,
                detail: "panicked".into(),
            },
        };
        if !v.passed {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {} [{:.2} s]",
            i + 1,
            if v.passed { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
