//! Acceptance suite: nine pinned criteria, one test and one printed verdict
//! line each. Thresholds and runtime budgets are fixed here, not
//! configurable. Run `cargo test --test acceptance -- --nocapture` to see
//! the verdict lines for passing criteria as well.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use ipula::deblur::{run_deblur, DeblurConfig};
use ipula::imaging::phantom;
use ipula::samplers::SamplerKind;
use ipula::verify::{run_check, DEFAULT_SEED};

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Criteria 1-7: run one library verification check under its runtime budget.
fn library_criterion(number: usize, label: &str, check: &str, budget_seconds: f64) {
    let start = Instant::now();
    let outcome = run_check(check, DEFAULT_SEED).expect("check should execute");
    let elapsed = start.elapsed().as_secs_f64();
    let in_budget = elapsed < budget_seconds;
    println!(
        "criterion {number} ({label}): {} — observed {:.6e} vs bound {:.6e}, \
         {elapsed:.2} s (budget {budget_seconds} s); {}",
        verdict(outcome.pass && in_budget),
        outcome.observed,
        outcome.bound,
        outcome.detail
    );
    assert!(outcome.pass, "criterion {number} failed: {}", outcome.detail);
    assert!(
        in_budget,
        "criterion {number} overran its budget: {elapsed:.2} s >= {budget_seconds} s"
    );
}

#[test]
fn criterion_1_envelope_closed_forms() {
    library_criterion(1, "envelope closed forms", "moreau_identities_quadratic", 1.0);
}

#[test]
fn criterion_2_residual_soundness() {
    library_criterion(2, "residual soundness", "residual_bounds_gradient_error", 10.0);
}

#[test]
fn criterion_3_fixed_cap_transfer() {
    library_criterion(3, "fixed-cap pathwise transfer", "pathwise_transfer_fixed_cap", 5.0);
}

#[test]
fn criterion_4_scheduled_cap_transfer() {
    library_criterion(4, "scheduled-cap pathwise transfer", "pathwise_transfer_scheduled_caps", 5.0);
}

#[test]
fn criterion_5_mean_gap_bound() {
    library_criterion(5, "mean envelope-gap bound", "mean_gap_bound_monte_carlo", 60.0);
}

#[test]
fn criterion_6_floor_scaling() {
    library_criterion(6, "step-matched floor scaling", "step_matched_floor_scaling", 1.0);
}

#[test]
fn criterion_7_stationary_distance() {
    library_criterion(7, "stationary distance", "stationary_wasserstein_1d", 30.0);
}

#[test]
fn criterion_8_deblurring_regression() {
    const SEED: u64 = 424242;
    const MIN_GAIN_DB: f64 = 1.0;
    const MAX_SPREAD_DB: f64 = 0.5;
    const SOFT_ACF_LAG: usize = 10;
    const BUDGET_SECONDS: f64 = 900.0;

    let start = Instant::now();
    let truth = phantom::<f64>(128, 128).expect("phantom");
    let config = DeblurConfig::standard(SEED);
    let report = run_deblur(&truth, &config).expect("experiment should run");
    let elapsed = start.elapsed().as_secs_f64();

    let gain = |kind: SamplerKind| {
        let run = report.methods.iter().find(|m| m.method == kind).expect("method present");
        run.best.psnr - report.observation_psnr
    };
    let gains: Vec<(SamplerKind, f64)> =
        config.methods.iter().map(|&kind| (kind, gain(kind))).collect();
    let min_gain = gains.iter().map(|&(_, g)| g).fold(f64::INFINITY, f64::min);
    let best: Vec<f64> = report.methods.iter().map(|m| m.best.psnr).collect();
    let spread = best.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
        - best.iter().fold(f64::INFINITY, |a, &b| a.min(b));

    let acf_at = |kind: SamplerKind| {
        report.methods.iter().find(|m| m.method == kind).expect("method present").acf[SOFT_ACF_LAG]
    };
    let ipula_acf = acf_at(SamplerKind::IPula);
    let gradsub_acf = acf_at(SamplerKind::GradSub);
    let proxsub_acf = acf_at(SamplerKind::ProxSub);
    let mixing_ordered = ipula_acf <= gradsub_acf && ipula_acf <= proxsub_acf;

    let pass = min_gain >= MIN_GAIN_DB && spread <= MAX_SPREAD_DB && elapsed < BUDGET_SECONDS;
    println!(
        "criterion 8 (deblurring regression): {} — min PSNR gain {min_gain:.3} dB \
         (need >= {MIN_GAIN_DB}), best-PSNR spread {spread:.4} dB (need <= {MAX_SPREAD_DB}), \
         lag-{SOFT_ACF_LAG} ACF ipula {ipula_acf:.4} vs gradsub {gradsub_acf:.4} / \
         proxsub {proxsub_acf:.4}, {elapsed:.1} s (budget {BUDGET_SECONDS} s)",
        verdict(pass)
    );
    if !mixing_ordered {
        println!(
            "criterion 8 warning (soft check): ipula lag-{SOFT_ACF_LAG} ACF exceeds a \
             subgradient baseline ({ipula_acf:.4} vs gradsub {gradsub_acf:.4}, \
             proxsub {proxsub_acf:.4}); seed-dependent, not a failure"
        );
    }
    for (kind, g) in &gains {
        assert!(
            *g >= MIN_GAIN_DB,
            "criterion 8: {} best PSNR gain {g:.3} dB below {MIN_GAIN_DB} dB",
            kind.name()
        );
    }
    assert!(
        spread <= MAX_SPREAD_DB,
        "criterion 8: best-PSNR spread {spread:.4} dB exceeds {MAX_SPREAD_DB} dB"
    );
    assert!(elapsed < BUDGET_SECONDS, "criterion 8 overran its budget: {elapsed:.1} s");
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn run_binary(args: &[&str]) {
    let output = Command::new(env!("CARGO_BIN_EXE_ipula"))
        .args(args)
        .output()
        .expect("binary should spawn");
    assert!(
        output.status.success(),
        "run {args:?} failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
}

fn assert_identical(a: &Path, b: &Path, what: &str) {
    assert_eq!(
        fs::read(a).unwrap_or_else(|e| panic!("{}: {e}", a.display())),
        fs::read(b).unwrap_or_else(|e| panic!("{}: {e}", b.display())),
        "{what}: {} and {} differ",
        a.display(),
        b.display()
    );
}

#[test]
fn criterion_9_determinism() {
    const BUDGET_SECONDS: f64 = 120.0;
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name);
    let arg = |p: &Path| p.to_str().unwrap().to_owned();

    // Sampling rerun: identical config, byte-identical trace and state.
    let sample = write_config(
        dir.path(),
        "sample.toml",
        r#"
schema_version = 1
experiment = "sample"

[potential]
kind = "quadratic"
sigma = 1.0
dimension = 10

[sampler]
kind = "ipula"
gamma = 1.0
eta = 0.1
steps = 300
seed = 5
record_every = 5
initial = 2.0

[sampler.schedule]
kind = "fixed"
eps = 0.05
"#,
    );
    for out in ["s1", "s2"] {
        run_binary(&["sample", "--config", &arg(&sample), "--out", &arg(&path(out))]);
    }
    assert_identical(&path("s1").join("trace.csv"), &path("s2").join("trace.csv"), "sample rerun");
    assert_identical(
        &path("s1").join("final_state.bin"),
        &path("s2").join("final_state.bin"),
        "sample rerun",
    );

    // Deblurring rerun: byte-identical CSVs, also across worker counts.
    let deblur = write_config(
        dir.path(),
        "deblur.toml",
        r#"
schema_version = 1
experiment = "deblur"

[potential]
kind = "tv_deblur"
tv_weight = 1e-3
ridge_weight = 1e-2

[sampler]
gamma = 1e-6
eta = 0.4e-6
steps = 40
seed = 11
record_every = 10

[imaging]
input = "phantom"
width = 24
height = 24

[deblur]
acf_max_lag = 6
"#,
    );
    for (out, threads) in [("d1", "2"), ("d2", "2"), ("d3", "8")] {
        run_binary(&[
            "deblur",
            "--config",
            &arg(&deblur),
            "--out",
            &arg(&path(out)),
            "--threads",
            threads,
        ]);
    }
    let deblur_csvs = [
        "ipula_metrics.csv",
        "myula_metrics.csv",
        "gradsub_metrics.csv",
        "proxsub_metrics.csv",
        "acf.csv",
        "methods_summary.csv",
    ];
    for name in deblur_csvs {
        assert_identical(&path("d1").join(name), &path("d2").join(name), "deblur rerun");
        assert_identical(&path("d1").join(name), &path("d3").join(name), "deblur worker count");
    }

    // Replicated-chain aggregates: identical for 1, 2, and 8 workers.
    let replicated = write_config(
        dir.path(),
        "replicated.toml",
        r#"
schema_version = 1
experiment = "sample"

[potential]
kind = "quadratic"
sigma = 1.0
dimension = 10

[sampler]
kind = "ipula"
gamma = 1.0
eta = 0.1
steps = 100
seed = 5
record_every = 10
replicas = 16
initial = 2.0

[sampler.schedule]
kind = "fixed"
eps = 0.05
"#,
    );
    for (out, threads) in [("r1", "1"), ("r2", "2"), ("r3", "8")] {
        run_binary(&[
            "sample",
            "--config",
            &arg(&replicated),
            "--out",
            &arg(&path(out)),
            "--threads",
            threads,
        ]);
    }
    for name in ["replicas_summary.csv", "trace.csv"] {
        assert_identical(&path("r1").join(name), &path("r2").join(name), "replica aggregates");
        assert_identical(&path("r1").join(name), &path("r3").join(name), "replica aggregates");
    }

    let elapsed = start.elapsed().as_secs_f64();
    println!(
        "criterion 9 (determinism): {} — sample rerun, deblur rerun and worker counts \
         {{2, 8}}, replica aggregates over workers {{1, 2, 8}} all byte-identical, \
         {elapsed:.1} s (budget {BUDGET_SECONDS} s)",
        verdict(elapsed < BUDGET_SECONDS)
    );
    assert!(elapsed < BUDGET_SECONDS, "criterion 9 overran its budget: {elapsed:.1} s");
}
