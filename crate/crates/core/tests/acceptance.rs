//! Acceptance suite: one test per criterion, each printing a single
//! `PASS`/`FAIL` line with its wall time against the allowed budget.
//!
//! The lines are written straight to stderr so they show up even when the
//! harness captures test output. Every criterion takes a shared lock: on a
//! small machine concurrently running criteria would otherwise eat into
//! each other's time budgets.

use std::io::Write;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use bdfdoc_core::doc::{certify_decay, certify_decay_with, characteristic_roots, DecayBound};
use bdfdoc_core::doc::{compute_doc_kernels, verify_orthogonality};
use bdfdoc_core::experiment::{convergence_study, stability_study, ConvergenceSettings, SpaceMode, StabilitySettings};
use bdfdoc_core::par::Execution;
use bdfdoc_core::pde::{step_restriction, Preset, PresetParams};
use bdfdoc_core::rational::rat;
use bdfdoc_core::spectral::{build_toeplitz, min_eigenvalue, DEFAULT_EIGEN_TOL};
use bdfdoc_core::spectral::{doc_positive_definiteness_check, quadratic_form_check};
use bdfdoc_core::spectral::{sigma, DEFAULT_SEED};
use bdfdoc_core::starting::{certify_starting_bound, starting_coefficients};
use bdfdoc_core::{generate_bdf_kernels, Rational};

static SERIAL: Mutex<()> = Mutex::new(());

/// Collects sub-check failures for one criterion and reports the verdict.
struct Criterion {
    id: u32,
    title: &'static str,
    budget: Duration,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Criterion {
    fn new(id: u32, title: &'static str, budget: Duration) -> Self {
        Self { id, title, budget, failures: Vec::new(), notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if ok {
            self.notes.push(what);
        } else {
            self.failures.push(what);
        }
    }

    fn finish(mut self, elapsed: Duration) {
        if elapsed > self.budget {
            self.failures.push(format!("took {elapsed:.3?}, budget {:?}", self.budget));
        }
        let verdict = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        let detail = if self.failures.is_empty() { self.notes.join("; ") } else { self.failures.join("; ") };
        let line = format!(
            "\n{verdict} criterion {:>2} ({}): {:.3?} of {:?}; {detail}\n",
            self.id, self.title, elapsed, self.budget
        );
        std::io::stderr().write_all(line.as_bytes()).unwrap();
        assert!(self.failures.is_empty(), "criterion {} failed: {}", self.id, self.failures.join("; "));
    }
}

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn fraction(r: &Rational) -> String {
    bdfdoc_core::rational::fraction_string(r)
}

#[test]
fn criterion_01_kernel_table() {
    let _guard = serial();
    let mut c = Criterion::new(1, "BDF kernel table", Duration::from_millis(1));
    let table: [(usize, &[(i64, i64)]); 4] = [
        (2, &[(3, 2), (-1, 2)]),
        (3, &[(11, 6), (-7, 6), (1, 3)]),
        (4, &[(25, 12), (-23, 12), (13, 12), (-1, 4)]),
        (5, &[(137, 60), (-163, 60), (137, 60), (-21, 20), (1, 5)]),
    ];
    let start = Instant::now();
    let generated: Vec<_> = table.iter().map(|(k, _)| generate_bdf_kernels(*k).unwrap()).collect();
    let elapsed = start.elapsed();
    let mut matched = 0;
    for ((k, row), b) in table.iter().zip(&generated) {
        c.check(b.coefficients().len() == row.len(), format!("k={k} has {} kernels", b.coefficients().len()));
        for (j, &(p, q)) in row.iter().enumerate() {
            if b.get(j) == rat(p, q) {
                matched += 1;
            } else {
                c.check(false, format!("b_{j}^({k}) = {}, expected {p}/{q}", fraction(&b.get(j))));
            }
        }
    }
    c.check(matched == 14, format!("{matched}/14 entries exact"));
    c.finish(elapsed);
}

#[test]
fn criterion_02_doc_base_values() {
    let _guard = serial();
    let mut c = Criterion::new(2, "DOC base values", Duration::from_millis(10));
    let expected: [(usize, &[(i64, i64)]); 3] =
        [(3, &[(6, 11), (42, 121)]), (4, &[(12, 25), (276, 625), (2448, 15625)]), (5, &[(60, 137)])];
    let start = Instant::now();
    let computed: Vec<_> = expected
        .iter()
        .map(|(k, vals)| compute_doc_kernels(&generate_bdf_kernels(*k).unwrap(), vals.len()).unwrap())
        .collect();
    let elapsed = start.elapsed();
    for ((k, vals), theta) in expected.iter().zip(&computed) {
        for (j, &(p, q)) in vals.iter().enumerate() {
            let got = theta.get(j).cloned();
            c.check(
                got == Some(rat(p, q)),
                format!("theta_{j}^({k}) = {}", got.map(|g| fraction(&g)).unwrap_or_default()),
            );
        }
    }
    c.finish(elapsed);
}

#[test]
fn criterion_03_orthogonality() {
    let _guard = serial();
    let mut c = Criterion::new(3, "orthogonality identities", Duration::from_secs(5));
    let n = 200;
    let start = Instant::now();
    for k in 2..=5 {
        let b = generate_bdf_kernels(k).unwrap();
        let theta = compute_doc_kernels(&b, n - k + 1).unwrap();
        let report = verify_orthogonality(&b, &theta, n, Execution::Parallel).unwrap();
        c.check(
            report.holds,
            match report.first_failure {
                Some(f) => format!("k={k}: {:?} fails at n={}, j={}", f.identity, f.n, f.j),
                None => format!("k={k}: {} pairs per identity", report.pairs_checked),
            },
        );
    }
    c.finish(start.elapsed());
}

#[test]
fn criterion_04_sigma_constants() {
    let _guard = serial();
    let mut c = Criterion::new(4, "sigma constants", Duration::from_secs(1));
    let start = Instant::now();
    let [s3, s4, s5] = [3, 4, 5].map(|k| sigma(k).unwrap());
    let elapsed = start.elapsed();

    c.check(
        s3.exact == Some(rat(95, 48)),
        format!("sigma_3 = {}", s3.exact.as_ref().map(fraction).unwrap_or_else(|| s3.sigma.to_string())),
    );
    c.check((s4.sigma - 1.62828).abs() <= 1e-5, format!("sigma_4 = {:.7} vs 1.62828", s4.sigma));
    let radical = (2656.0 - 43.0 * 43f64.sqrt()) / 1458.0;
    c.check(
        (s4.sigma - radical).abs() <= 1e-12,
        format!("sigma_4 - (2656-43*sqrt(43))/1458 = {:.1e}", s4.sigma - radical),
    );
    c.check((s5.sigma - 0.477683).abs() <= 1e-5, format!("sigma_5 = {:.7} vs 0.477683", s5.sigma));
    c.check((s5.argmin_cos - (-0.064041)).abs() <= 1e-5, format!("x* = {:.7} vs -0.064041", s5.argmin_cos));
    c.finish(elapsed);
}

#[test]
fn criterion_05_toeplitz_sandwich() {
    let _guard = serial();
    let mut c = Criterion::new(5, "Toeplitz eigenvalue sandwich", Duration::from_secs(30));
    let start = Instant::now();
    for k in 3..=5 {
        let b = generate_bdf_kernels(k).unwrap();
        let s = sigma(k).unwrap();
        for m in [50, 100, 200, 400] {
            let lambda = min_eigenvalue(&build_toeplitz(&b, m).unwrap(), DEFAULT_EIGEN_TOL).unwrap();
            let ok = lambda >= s.sigma - 1e-8 && lambda <= s.g_max;
            if !ok || m == 400 {
                c.check(ok, format!("k={k} m={m}: {:.8} in [{:.8}, {:.8}]", lambda, s.sigma - 1e-8, s.g_max));
            }
        }
    }
    c.finish(start.elapsed());
}

#[test]
fn criterion_06_root_magnitudes() {
    let _guard = serial();
    let mut c = Criterion::new(6, "characteristic roots", Duration::from_millis(100));
    let start = Instant::now();
    let [r3, r4, r5] = [3, 4, 5].map(|k| characteristic_roots(k).unwrap());
    let elapsed = start.elapsed();

    let target = (2.0f64 / 11.0).sqrt();
    for (i, m) in r3.moduli().iter().enumerate() {
        c.check((m - target).abs() <= 1e-10, format!("|lambda_3,{}| - sqrt(2/11) = {:.1e}", i + 1, m - target));
    }
    let l43 = r4.roots[2];
    c.check(l43.im == 0.0 && (l43.re - 0.381478).abs() <= 1e-5, format!("lambda_4,3 = {:.7}{:+.1e}i", l43.re, l43.im));
    for (name, value, expected) in [
        ("|lambda_4,1|", r4.roots[0].norm(), 0.560862),
        ("|lambda_5,1|", r5.roots[0].norm(), 0.708711),
        ("|lambda_5,3|", r5.roots[2].norm(), 0.417601),
    ] {
        c.check((value - expected).abs() <= 1e-5, format!("{name} = {value:.7}"));
    }
    c.finish(elapsed);
}

#[test]
fn criterion_07_decay_certificates() {
    let _guard = serial();
    let mut c = Criterion::new(7, "DOC decay certificates", Duration::from_secs(5));
    let j_max = 200;
    let start = Instant::now();
    for (k, rho) in [(3, rat(10, 3)), (4, rat(6, 1)), (5, rat(96, 5))] {
        let theta = compute_doc_kernels(&generate_bdf_kernels(k).unwrap(), j_max + 1).unwrap();
        let envelope = certify_decay(&theta, j_max).unwrap();
        c.check(
            envelope.valid && envelope.rho == rho && envelope.ratio == rat(k as i64, 7),
            format!("k={k}: rho={} envelope, first violation {:?}", fraction(&envelope.rho), envelope.first_violation),
        );
        let sharp = certify_decay_with(&theta, &DecayBound::sharp(k).unwrap(), j_max).unwrap();
        c.check(sharp.valid, format!("k={k}: sharp envelope, first violation {:?}", sharp.first_violation));
    }
    c.finish(start.elapsed());
}

#[test]
fn criterion_08_starting_effects() {
    let _guard = serial();
    let mut c = Criterion::new(8, "starting effects", Duration::from_secs(10));
    let start = Instant::now();
    let c3 = certify_starting_bound(3, 400).unwrap();
    let b3 = generate_bdf_kernels(3).unwrap();
    let base = starting_coefficients(3, 3, &compute_doc_kernels(&b3, 1).unwrap(), &b3).unwrap();
    let pairs: Vec<_> = [4, 5]
        .iter()
        .map(|&k| (k, certify_starting_bound(k, 200).unwrap(), certify_starting_bound(k, 400).unwrap()))
        .collect();
    let elapsed = start.elapsed();

    c.check(
        c3.certified == rat(11, 7) && c3.valid,
        format!("c_I,3 = {} (valid: {})", fraction(&c3.certified), c3.valid),
    );
    let base_str: Vec<_> = base.c.iter().map(fraction).collect();
    c.check(base.c == [rat(1, 11), rat(-7, 11)], format!("k=3 base case ({}) vs (1/11, -7/11)", base_str.join(", ")));
    for (k, at200, at400) in &pairs {
        let change = (at400.c_i - at200.c_i).abs();
        c.check(
            at400.c_i.is_finite() && change <= 1e-12,
            format!("c_I,{k} = {:.12} (200 -> 400 change {change:.1e})", at400.c_i),
        );
    }
    c.finish(elapsed);
}

#[test]
fn criterion_09_convergence_orders() {
    let _guard = serial();
    let mut c = Criterion::new(9, "convergence orders", Duration::from_secs(120));
    let start = Instant::now();
    let mut cases: Vec<_> = (1..=5).map(ConvergenceSettings::scalar).collect();
    cases.extend((3..=5).map(|k| ConvergenceSettings::pde(k, 1024)));
    for settings in &cases {
        let r = convergence_study(settings, Execution::Parallel).unwrap();
        let mode = match settings.mode {
            SpaceMode::Scalar => "scalar",
            SpaceMode::Pde => "pde",
        };
        let within = (r.mean_order - r.k as f64).abs() <= 0.2;
        let spatial = r.spatial_check.as_ref().map(|s| (s.pass, s.max_relative_change));
        let mut what = format!("{mode} k={}: mean {:.3}", r.k, r.mean_order);
        if let Some((_, change)) = spatial {
            what.push_str(&format!(", 2M change {change:.1e}"));
        }
        c.check(within && r.pass && spatial.is_none_or(|(pass, _)| pass), what);
    }
    c.finish(start.elapsed());
}

#[test]
fn criterion_10_stability_domination() {
    let _guard = serial();
    let mut c = Criterion::new(10, "stability domination", Duration::from_secs(60));
    let start = Instant::now();
    let params = PresetParams::default();
    let mut campaigns = Vec::new();
    for k in 3..=5 {
        let limit = step_restriction(k, params.beta_star).unwrap();
        for mode in [SpaceMode::Scalar, SpaceMode::Pde] {
            campaigns.push((k, Preset::DissipativeDecay, mode, 0.01));
            campaigns.push((k, Preset::OscillatingBeta, mode, limit));
            campaigns.push((k, Preset::OscillatingBeta, mode, limit / 2.0));
        }
    }
    let mut worst: f64 = 0.0;
    for (k, preset, mode, tau) in campaigns {
        let settings =
            StabilitySettings { k, preset, params, mode, m: 64, tau, final_time: 100.0 * tau, startup: None };
        let r = stability_study(&settings).unwrap();
        worst = worst.max(r.check.max_ratio);
        if !r.pass() {
            c.check(
                false,
                format!(
                    "{} k={k} {mode:?} tau={tau:.5}: {} (first violation {:?})",
                    preset.name(),
                    r.status(),
                    r.check.first_violation
                ),
            );
        }
    }
    c.check(true, format!("18 runs, largest norm/bound ratio {worst:.4}"));
    c.finish(start.elapsed());
}

#[test]
fn criterion_11_positive_definiteness() {
    let _guard = serial();
    let mut c = Criterion::new(11, "randomized quadratic forms", Duration::from_secs(30));
    let start = Instant::now();
    for k in 3..=5 {
        let s = sigma(k).unwrap().sigma;
        let form_min = quadratic_form_check(k, 50, 10_000, DEFAULT_SEED, Execution::Parallel).unwrap();
        c.check(form_min >= s - 1e-6, format!("k={k}: min ratio {form_min:.6} vs sigma {s:.6}"));
        let doc_ok = doc_positive_definiteness_check(k, 50, 10_000, DEFAULT_SEED, Execution::Parallel).unwrap();
        c.check(doc_ok, format!("k={k}: DOC forms positive"));
    }
    c.finish(start.elapsed());
}
