//! End-to-end acceptance checks, one test per criterion. Each prints a single
//! `criterion N: PASS|FAIL` line followed by the underlying measurements.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dfpp_core::distributions::EdgeTimeDistribution;
use dfpp_core::estimators::estimate_mu;
use dfpp_core::lattice::{Dir, EdgeField, EdgeWeights, GridSpec};
use dfpp_core::passage::compute_passage;
use dfpp_core::suites::{run_suite, Suite, SuiteConfig, SuiteOutput, Verdict};

const SEED: u64 = 20_240_611;

fn cached(suite: Suite) -> &'static SuiteOutput {
    static CACHE: [OnceLock<SuiteOutput>; 7] = [const { OnceLock::new() }; 7];
    let i = Suite::ALL.iter().position(|s| *s == suite).unwrap();
    CACHE[i].get_or_init(|| run_suite(suite, &SuiteConfig { master_seed: SEED }).expect("suite runs"))
}

fn verdicts(criterion: u32, suites: &[Suite]) -> Vec<&'static Verdict> {
    suites
        .iter()
        .flat_map(|s| cached(*s).verdicts.iter())
        .filter(|v| v.criterion == criterion)
        .collect()
}

fn report(criterion: u32, passed: bool, lines: &[String]) {
    println!("criterion {criterion}: {}", if passed { "PASS" } else { "FAIL" });
    for l in lines {
        println!("    {l}");
    }
    assert!(passed, "criterion {criterion} failed");
}

fn report_suites(criterion: u32, suites: &[Suite]) {
    let vs = verdicts(criterion, suites);
    assert!(!vs.is_empty());
    let lines: Vec<String> = vs
        .iter()
        .map(|v| format!("[{}] {}: {}", if v.passed { "ok" } else { "x" }, v.check, v.detail))
        .collect();
    report(criterion, vs.iter().all(|v| v.passed), &lines);
}

/// Minimum over monotone paths, by recursion on the last step.
fn oracle(w: &EdgeField, x: usize, y: usize) -> f64 {
    match (x, y) {
        (0, 0) => 0.0,
        (0, _) => oracle(w, 0, y - 1) + w.north(0, y - 1),
        (_, 0) => oracle(w, x - 1, 0) + w.east(x - 1, 0),
        _ => (oracle(w, x - 1, y) + w.east(x - 1, y)).min(oracle(w, x, y - 1) + w.north(x, y - 1)),
    }
}

#[test]
fn criterion_01_dp_correctness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let atoms = [0.0, 0.25, 1.0, 2.0, 5.0];
    let mut mismatches = 0;
    let mut vertices = 0;
    for _ in 0..1000 {
        let grid = GridSpec::new(rng.gen_range(1..=4), rng.gen_range(1..=4)).unwrap();
        let field = EdgeField::from_fn(grid, |_, _, _: Dir| {
            if rng.gen_bool(0.5) {
                atoms[rng.gen_range(0..atoms.len())]
            } else {
                -(-rng.gen::<f64>()).ln_1p()
            }
        });
        let pf = compute_passage(&field);
        for y in 0..=grid.height {
            for x in 0..=grid.width {
                vertices += 1;
                if pf.time(x, y) != oracle(&field, x, y) {
                    mismatches += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let suite = verdicts(1, &[Suite::Structure]);
    let mut lines = vec![format!("{mismatches} mismatches over {vertices} vertices, {elapsed:.2?}")];
    lines.extend(suite.iter().map(|v| format!("suite: {}", v.detail)));
    report(
        1,
        mismatches == 0 && elapsed < Duration::from_secs(5) && suite.iter().all(|v| v.passed),
        &lines,
    );
}

#[test]
fn criterion_02_deterministic_time_constant() {
    let start = Instant::now();
    let c = 0.75;
    let d = EdgeTimeDistribution::point_mass(c).unwrap();
    let mut ok = true;
    let mut worst = 0.0f64;
    for k in 0..=16 {
        let theta = FRAC_PI_2 * f64::from(k) / 16.0;
        for r in [50.0, 200.0, 800.0] {
            let e = estimate_mu(&d, theta, &[r], 1, 0).unwrap();
            let (x, y) = e.last().target;
            let err = (e.mu_hat - c * (theta.cos() + theta.sin())).abs();
            worst = worst.max(err * r / c);
            // nearest vertex is within distance 1/sqrt(2), so |x + y - r(cos + sin)| <= 1
            ok &= err <= c / r + 1e-12;
            ok &= e.mu_hat == c * (x + y) as f64 / r;
        }
    }
    for r in [10usize, 100, 1000] {
        for theta in [0.0, FRAC_PI_2] {
            ok &= estimate_mu(&d, theta, &[r as f64], 1, 0).unwrap().mu_hat == c;
        }
        let diag = estimate_mu(&d, FRAC_PI_4, &[r as f64 * 2f64.sqrt()], 1, 0).unwrap();
        ok &= diag.last().target == (r, r) && (diag.mu_hat - c * 2f64.sqrt()).abs() <= 1e-12;
    }
    let elapsed = start.elapsed();
    report(
        2,
        ok && elapsed < Duration::from_secs(1),
        &[format!("max |T/r - c(cos+sin)| r/c = {worst:.4} (bound 1), {elapsed:.2?}")],
    );
}

#[test]
fn criterion_03_subcritical_positivity() {
    report_suites(3, &[Suite::Subcritical]);
}

#[test]
fn criterion_04_supercritical_cone() {
    report_suites(4, &[Suite::Supercritical]);
}

#[test]
fn criterion_05_supercritical_off_cone() {
    report_suites(5, &[Suite::Supercritical]);
}

#[test]
fn criterion_06_critical_double_behaviour() {
    report_suites(6, &[Suite::Critical]);
}

#[test]
fn criterion_07_right_edge_and_threshold() {
    report_suites(7, &[Suite::Oriented]);
}

#[test]
fn criterion_08_cone_calibration() {
    report_suites(8, &[Suite::Oriented]);
}

#[test]
fn criterion_09_structure_lemmas() {
    let start = Instant::now();
    report_suites(9, &[Suite::Structure]);
    assert!(start.elapsed() < Duration::from_secs(60));
}

#[test]
fn criterion_10_coupling() {
    report_suites(10, &[Suite::Coupling]);
}

#[test]
fn criterion_11_growth_model() {
    report_suites(11, &[Suite::Growth]);
}

#[test]
fn criterion_12_convexity_and_symmetry() {
    report_suites(12, &[Suite::Subcritical, Suite::Supercritical]);
}

#[test]
fn criterion_13_determinism() {
    let cfg = SuiteConfig { master_seed: SEED ^ 0xD1CE };
    let mut lines = Vec::new();
    let mut ok = true;
    for suite in [Suite::Structure, Suite::Coupling, Suite::Growth] {
        let files: Vec<Vec<(String, String)>> = [1, 4]
            .into_iter()
            .map(|threads| {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
                pool.install(|| run_suite(suite, &cfg).unwrap().files(&cfg).unwrap())
            })
            .collect();
        let same = files[0] == files[1];
        let bytes: usize = files[0].iter().map(|(_, t)| t.len()).sum();
        lines.push(format!("{suite}: {} files, {bytes} bytes, identical under 1 and 4 workers: {same}", files[0].len()));
        ok &= same;
    }
    report(13, ok, &lines);
}
