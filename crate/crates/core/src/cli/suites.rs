//! Seeded invariant suites behind `krein-shift check`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::Rng;

use crate::averaging::{
    averaged_pairing_lhs, averaged_pairing_rhs, derivative_identity_residual,
    operator_average_residual, operator_increment_residual, PerturbationPath, TestFunction,
    DEFAULT_S_NODES,
};
use crate::error::{Error, Result};
use crate::herglotz::HerglotzFamily;
use crate::matkit::{eig_general, eig_hermitian, expm, ComplexMatrix, C64};
use crate::oplog::{logm_antidissipative, logm_dissipative, tr_log_det_bridge};
use crate::random::{
    random_complex, random_dissipative, random_hermitian, random_indefinite, random_psd, seeded_rng,
};
use crate::shift::checks::{
    chain_and_monotonicity, chain_grid, example_3_9, herglotz_reconstruction_residual,
    trace_formula_terms,
};
use crate::shift::{
    auto_grid, compute_profile, trace_identity_checks, xi_counting_oracle, xi_via_det,
};

use super::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Logm,
    Herglotz,
    Trace,
    Chain,
    Average,
    OpAverage,
    Example39,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Logm,
        Suite::Herglotz,
        Suite::Trace,
        Suite::Chain,
        Suite::Average,
        Suite::OpAverage,
        Suite::Example39,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Logm => "logm",
            Suite::Herglotz => "herglotz",
            Suite::Trace => "trace",
            Suite::Chain => "chain",
            Suite::Average => "average",
            Suite::OpAverage => "op-average",
            Suite::Example39 => "example39",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite '{s}'")))
    }
}

/// One checked property: `value ≤ bound` unless `detail` records a failure.
#[derive(Debug, Clone, PartialEq)]
pub struct Property {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SuiteReport {
    pub properties: Vec<Property>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }

    fn check(&mut self, suite: &'static str, name: impl Into<String>, value: f64, bound: f64) {
        self.properties.push(Property {
            suite,
            name: name.into(),
            value,
            bound,
            passed: value <= bound,
            detail: None,
        });
    }

    fn flag(&mut self, suite: &'static str, name: impl Into<String>, ok: bool, detail: String) {
        self.properties.push(Property {
            suite,
            name: name.into(),
            value: if ok { 0.0 } else { 1.0 },
            bound: 0.0,
            passed: ok,
            detail: Some(detail),
        });
    }

    /// Records a failed computation as a failed property.
    fn record<T>(&mut self, suite: &'static str, name: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.flag(suite, name, false, format!("error: {e}"));
                None
            }
        }
    }

    fn merge(&mut self, other: SuiteReport) {
        self.properties.extend(other.properties);
        self.notes.extend(other.notes);
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for p in &self.properties {
            let status = if p.passed { "PASS" } else { "FAIL" };
            match &p.detail {
                Some(d) => writeln!(s, "[{status}] {}/{}: {d}", p.suite, p.name),
                None => writeln!(
                    s,
                    "[{status}] {}/{}: {:.3e} <= {:.1e}",
                    p.suite, p.name, p.value, p.bound
                ),
            }
            .expect("writing to a String");
        }
        for n in &self.notes {
            writeln!(s, "note: {n}").expect("writing to a String");
        }
        let failed = self.properties.iter().filter(|p| !p.passed).count();
        writeln!(
            s,
            "summary: {} passed, {failed} failed",
            self.properties.len() - failed
        )
        .expect("writing to a String");
        s
    }
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> SuiteReport {
    match suite {
        Suite::Logm => logm_suite(cfg),
        Suite::Herglotz => herglotz_suite(cfg),
        Suite::Trace => trace_suite(cfg),
        Suite::Chain => chain_suite(cfg),
        Suite::Average => average_suite(cfg),
        Suite::OpAverage => op_average_suite(cfg),
        Suite::Example39 => example39_suite(cfg),
        Suite::All => {
            let mut all = SuiteReport::default();
            for s in Suite::EACH {
                all.merge(run_suite(s, cfg));
            }
            all
        }
    }
}

fn sub_seed(cfg: &RunConfig, salt: u64) -> u64 {
    cfg.seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(salt)
}

fn random_z(rng: &mut impl Rng) -> C64 {
    let im: f64 = rng.gen_range(0.2..2.0);
    C64::new(
        rng.gen_range(-3.0..3.0),
        if rng.gen_bool(0.5) { im } else { -im },
    )
}

fn logm_suite(cfg: &RunConfig) -> SuiteReport {
    const S: &str = "logm";
    let mut rep = SuiteReport::default();
    let mut rng = seeded_rng(sub_seed(cfg, 1));
    let (mut roundtrip, mut im_low, mut im_high, mut anti) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut failures = 0;
    for i in 0..20 {
        let n = 2 + i % 5;
        let floor = if i % 3 == 0 { 1e-3 } else { 0.2 };
        let t = random_dissipative(n, floor, &mut rng);
        let l = match logm_dissipative(&t, &cfg.quad) {
            Ok(l) => l,
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        roundtrip = roundtrip.max(expm(&l).frobenius_distance(&t) / t.frobenius_norm());
        if let Ok(e) = eig_hermitian(&l.imag_part()) {
            im_low = im_low.max(-e.min().unwrap_or(0.0));
            im_high = im_high.max(e.max().unwrap_or(0.0) - PI);
        }
        let s = t.adjoint();
        match logm_antidissipative(&s, &cfg.quad) {
            Ok(ls) => anti = anti.max(expm(&ls).frobenius_distance(&s) / s.frobenius_norm()),
            Err(_) => failures += 1,
        }
    }
    rep.check(S, "solver failures", failures as f64, 0.0);
    rep.check(S, "expm(logm T) - T relative", roundtrip, 1e-8);
    rep.check(S, "Im log T below 0", im_low, 1e-8);
    rep.check(S, "Im log T above pi", im_high, 1e-8);
    rep.check(S, "anti-dissipative round trip", anti, 1e-8);

    let mut bridge = 0.0f64;
    let mut diag = 0.0f64;
    for i in 0..5 {
        let n = 2 + i % 3;
        let a = random_dissipative(n, 0.1, &mut rng).scale_real(0.4);
        if let Some(b) = rep.record(S, "det bridge", tr_log_det_bridge(&a, &cfg.quad)) {
            bridge = bridge.max(b.residual());
        }
        let d: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.1..2.0)))
            .collect();
        let t = ComplexMatrix::from_diag(&d);
        if let Some(l) = rep.record(S, "diagonal oracle", logm_dissipative(&t, &cfg.quad)) {
            let want: Vec<C64> = d.iter().map(|z| z.ln()).collect();
            diag = diag.max(l.max_abs_diff(&ComplexMatrix::from_diag(&want)));
        }
    }
    rep.check(S, "exp tr log = det(I + A)", bridge, 1e-8);
    rep.check(S, "diagonal against scalar log", diag, 1e-10);
    rep
}

fn herglotz_suite(cfg: &RunConfig) -> SuiteReport {
    const S: &str = "herglotz";
    let mut rep = SuiteReport::default();
    let mut rng = seeded_rng(sub_seed(cfg, 2));
    let mut inv = [0.0f64; 3];
    let mut herglotz_min = 0.0f64;
    for i in 0..10 {
        let n = 3 + i % 4;
        let h0 = random_hermitian(n, &mut rng);
        let v = random_indefinite(n, 2 + i % (n - 1), &mut rng);
        let Some(fam) = rep.record(S, "family", HerglotzFamily::new(&h0, &v, cfg.rank_tol)) else {
            continue;
        };
        let z = random_z(&mut rng);
        if let Some(r) = rep.record(S, "inverse identities", fam.inverse_identity_residuals(z)) {
            for k in 0..3 {
                inv[k] = inv[k].max(r[k]);
            }
        }
        let zu = C64::new(z.re, z.im.abs());
        if let Some(p) = rep.record(
            S,
            "Im Phi+ >= 0",
            fam.evaluate_phi_plus(zu)
                .and_then(|m| eig_hermitian(&m.imag_part())),
        ) {
            herglotz_min = herglotz_min.min(p.min().unwrap_or(0.0));
        }
    }
    rep.check(S, "Phi Phi^-1 = I", inv[0], 1e-10);
    rep.check(S, "Phi+ Phi+^-1 = I", inv[1], 1e-10);
    rep.check(S, "Phi-~ Phi-~^-1 = I", inv[2], 1e-10);
    rep.check(S, "Im Phi+ negative part", (-herglotz_min).max(0.0), 1e-12);

    let mut recon = 0.0f64;
    for i in 0..2 {
        let n = 3 + i;
        let h0 = random_hermitian(n, &mut rng);
        let v = random_psd(n, 2, &mut rng);
        let Some(fam) = rep.record(S, "family", HerglotzFamily::new(&h0, &v, cfg.rank_tol)) else {
            continue;
        };
        if let Some(r) = rep.record(
            S,
            "reconstruction",
            herglotz_reconstruction_residual(&fam, C64::new(1.0, 2.0), &cfg.sched, &cfg.quad),
        ) {
            recon = recon.max(r);
        }
    }
    rep.check(S, "log Phi+(1+2i) from Xi+ integral", recon, 1e-4);
    rep
}

fn trace_suite(cfg: &RunConfig) -> SuiteReport {
    const S: &str = "trace";
    let mut rep = SuiteReport::default();
    let mut rng = seeded_rng(sub_seed(cfg, 3));
    let (mut oracle, mut det, mut formula, mut identity, mut derivative, mut invariants) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut l1_ok = true;
    let mut points = 0usize;
    for i in 0..4 {
        let n = 4 + i % 3;
        let h0 = random_hermitian(n, &mut rng);
        let v = random_indefinite(n, 2 + i % (n - 1), &mut rng);
        let Some(fam) = rep.record(S, "family", HerglotzFamily::new(&h0, &v, cfg.rank_tol)) else {
            continue;
        };
        let grid = auto_grid(&fam, 24);
        points += grid.len();
        let Some(profile) = rep.record(
            S,
            "profile",
            compute_profile(&fam, &grid, &cfg.sched, &cfg.quad),
        ) else {
            continue;
        };
        let inv = profile.invariants();
        invariants = invariants
            .max(inv.split)
            .max(inv.trace)
            .max(-inv.min_eig)
            .max(inv.max_eig - 1.0);
        for (k, &l) in grid.iter().enumerate() {
            if let Some(o) = rep.record(S, "counting oracle", xi_counting_oracle(&fam, l)) {
                oracle = oracle.max((profile.xi[k] - o as f64).abs());
                if k % 4 == 0 {
                    if let Some(d) = rep.record(
                        S,
                        "determinant route",
                        xi_via_det(&fam, l, cfg.sched.eps0, &cfg.quad),
                    ) {
                        det = det.max((d - o as f64).abs());
                    }
                }
            }
        }
        for _ in 0..3 {
            let z = random_z(&mut rng);
            if let Some((lhs, int)) =
                rep.record(S, "trace formula", trace_formula_terms(&fam, z, &profile))
            {
                formula = formula.max((lhs + int).norm() / (1.0 + lhs.norm()));
            }
        }
        let z = random_z(&mut rng);
        if let Some(r) = rep.record(
            S,
            "trace identity",
            trace_identity_checks(&fam, &profile, z, &cfg.quad),
        ) {
            identity = identity.max(r.residual);
            derivative = derivative.max(r.derivative_plus).max(r.derivative_minus);
            l1_ok &= r.l1_bound_holds;
        }
    }
    rep.notes.push(format!("trace: {points} grid points"));
    rep.check(S, "xi against counting oracle", oracle, 1e-6);
    rep.check(S, "determinant route against oracle", det, 1e-6);
    rep.check(S, "profile invariants", invariants, 1e-8);
    rep.check(S, "trace formula relative", formula, 1e-8);
    rep.check(S, "tr V - integral of xi", identity, 1e-8);
    rep.flag(
        S,
        "integral |xi| <= |V|_1",
        l1_ok,
        format!("holds = {l1_ok}"),
    );
    rep.check(S, "resolvent derivative identities", derivative, 1e-6);
    rep
}

fn chain_suite(cfg: &RunConfig) -> SuiteReport {
    const S: &str = "chain";
    let mut rep = SuiteReport::default();
    let mut rng = seeded_rng(sub_seed(cfg, 4));
    let (mut chain, mut anti, mut oracle, mut mono) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..3 {
        let n = 3 + i;
        let h0 = random_hermitian(n, &mut rng);
        let v1 = random_indefinite(n, 2, &mut rng);
        let v2 = if i % 2 == 0 {
            &v1 + &random_psd(n, 2, &mut rng)
        } else {
            random_indefinite(n, 2, &mut rng)
        };
        let Some(grid) = rep.record(S, "grid", chain_grid(&h0, &v1, &v2, 16, cfg.rank_tol)) else {
            continue;
        };
        let Some(r) = rep.record(
            S,
            "chain",
            chain_and_monotonicity(&h0, &v1, &v2, &grid, &cfg.sched, &cfg.quad, cfg.rank_tol),
        ) else {
            continue;
        };
        chain = chain.max(r.chain_max);
        anti = anti.max(r.antisymmetry_max);
        oracle = oracle.max(r.oracle_max);
        if r.monotone_applicable {
            mono = mono.max(-r.monotone_min_gap);
        }
    }
    rep.check(S, "chain rule", chain, 1e-6);
    rep.check(S, "antisymmetry", anti, 1e-6);
    rep.check(S, "monotonicity violation", mono, 1e-8);
    rep.check(S, "pairs against counting oracle", oracle, 1e-6);
    rep
}

fn average_suite(cfg: &RunConfig) -> SuiteReport {
    const S: &str = "average";
    let mut rep = SuiteReport::default();
    let mut rng = seeded_rng(sub_seed(cfg, 5));
    let (s1, s2) = cfg.s_range;
    let mut weak = 0.0f64;
    for i in 0..3 {
        let n = 3 + i;
        let h0 = random_hermitian(n, &mut rng);
        let v0 = random_indefinite(n, 2, &mut rng);
        let v1 = random_indefinite(n, 2 + i % (n - 1), &mut rng);
        let f = match &cfg.f {
            Some(f) => f.clone(),
            None if i % 2 == 0 => {
                TestFunction::Polynomial((0..7).map(|_| rng.gen_range(-1.0..1.0) / 4.0).collect())
            }
            None => TestFunction::Gaussian {
                center: rng.gen_range(-1.0..1.0),
                width: 0.8,
            },
        };
        let Some(path) = rep.record(S, "path", PerturbationPath::new(&v0, &v1, s1, s2)) else {
            continue;
        };
        let lhs = rep.record(
            S,
            "lhs",
            averaged_pairing_lhs(&h0, &path, &f, DEFAULT_S_NODES),
        );
        let rhs = rep.record(
            S,
            "rhs",
            averaged_pairing_rhs(&h0, &path, &f, &cfg.sched, &cfg.quad, cfg.rank_tol),
        );
        if let (Some(l), Some(r)) = (lhs, rhs) {
            weak = weak.max((l - r).abs() / (1.0 + l.abs()));
        }
    }
    rep.check(S, "weak averaging identity relative", weak, 1e-4);

    let h0 = random_hermitian(4, &mut rng);
    let a = random_complex(4, 4, &mut rng);
    let w = (&a * &a.adjoint()).hermitian_part();
    let mut deriv = 0.0f64;
    if let Some(path) = rep.record(S, "path", PerturbationPath::new(&w, &w, 0.0, 1.0)) {
        for z in [C64::new(0.3, 1.0), C64::new(-0.5, -0.7)] {
            if let Some(r) = rep.record(
                S,
                "derivative",
                derivative_identity_residual(&h0, &path, 0.5, z, &cfg.quad),
            ) {
                deriv = deriv.max(r);
            }
        }
    }
    rep.check(S, "d/ds tr log Phi = tr V'(H(s) - z)^-1", deriv, 1e-6);

    let v1 = random_psd(4, 2, &mut rng);
    let gauss = TestFunction::Gaussian {
        center: 0.0,
        width: 0.6,
    };
    let pos = PerturbationPath::new(&ComplexMatrix::zeros(4, 4), &v1, 0.0, 1.0)
        .and_then(|p| averaged_pairing_lhs(&h0, &p, &gauss, DEFAULT_S_NODES));
    if let Some(p) = rep.record(S, "positivity", pos) {
        rep.check(S, "positivity (negative part)", (-p).max(0.0), 1e-10);
    }
    rep
}

fn op_average_suite(cfg: &RunConfig) -> SuiteReport {
    const S: &str = "op-average";
    let mut rep = SuiteReport::default();
    let mut rng = seeded_rng(sub_seed(cfg, 6));
    let mut resid = 0.0f64;
    let mut inc = 0.0f64;
    for i in 0..2 {
        let n = 3 + i;
        let h0 = random_hermitian(n, &mut rng);
        let k = random_complex(n, 2, &mut rng);
        let f = cfg.f.clone().unwrap_or(TestFunction::Gaussian {
            center: 0.0,
            width: 0.8,
        });
        if let Some(r) = rep.record(
            S,
            "average",
            operator_average_residual(&h0, &k, &f, DEFAULT_S_NODES, &cfg.sched, &cfg.quad),
        ) {
            resid = resid.max(r);
        }
        let p = TestFunction::Polynomial(vec![0.2, 0.5, -0.3]);
        if let Some(r) = rep.record(
            S,
            "increment",
            operator_increment_residual(
                &h0,
                &k,
                &p,
                0.3,
                0.9,
                DEFAULT_S_NODES,
                &cfg.sched,
                &cfg.quad,
            ),
        ) {
            inc = inc.max(r);
        }
    }
    rep.check(S, "operator average residual", resid, 1e-4);
    rep.check(S, "increment over [0.3, 0.9]", inc, 1e-4);
    rep
}

fn example39_suite(cfg: &RunConfig) -> SuiteReport {
    const S: &str = "example39";
    let mut rep = SuiteReport::default();
    let Some(ex) = rep.record(
        S,
        "example",
        example_3_9(0.2, 0.4, 0.9, 1.3, &cfg.sched, &cfg.quad),
    ) else {
        return rep;
    };
    rep.check(S, "closed forms", ex.residual(), 1e-8);
    let cert = ex
        .certificate
        .iter()
        .map(|e| format!("{e:+.6}"))
        .collect::<Vec<_>>()
        .join(", ");
    rep.flag(
        S,
        "Xi2 - Xi1 indefinite",
        ex.is_indefinite(),
        format!("eigenvalues [{cert}]"),
    );
    rep.notes.push(format!(
        "example39: tr Xi1 = {:.6}, tr Xi2 = {:.6}",
        ex.trace1, ex.trace2
    ));
    if let Some(g) = rep.record(S, "general eigensolver", eig_general(&(&ex.xi2 - &ex.xi1))) {
        let mut re: Vec<f64> = g.values.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        let dev = re
            .iter()
            .zip(&ex.certificate)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        rep.check(S, "certificate cross-check", dev, 1e-8);
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn example39_suite_passes() {
        let rep = run_suite(Suite::Example39, &RunConfig::default());
        assert!(rep.passed(), "{}", rep.render());
        assert!(rep.render().contains("eigenvalues [-0.7071"));
    }

    #[test]
    fn logm_suite_passes() {
        let rep = run_suite(Suite::Logm, &RunConfig::default());
        assert!(rep.passed(), "{}", rep.render());
    }
}
