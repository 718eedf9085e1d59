//! Executable checks that compare realized chain behavior against the
//! theoretical bounds the library computes.
//!
//! Every claim the bound evaluators make is checked here against runs of the
//! library itself: closed-form envelope identities on the quadratic fixture,
//! residual soundness on the elastic net, pathwise coupled-distance bounds
//! (with a negative control that must fail), a Monte Carlo mean-gap bound, the
//! step-matched floor scaling, and a long-run stationary distance check.
//!
//! Each check returns a [`CheckOutcome`] whose `pass` is `observed <= bound`
//! (tightened by any extra conditions named in `detail`). All randomness
//! flows from the `seed` argument, so the suite is deterministic; thresholds
//! are pinned in this file and are not configurable.

use crate::diagnostics::{
    adaptive_pathwise_verdict, adaptive_transfer_curve, fixed_gap_bound, mean_and_standard_error,
    pathwise_transfer_verdict, quantile_w2_gaussian, step_matched_floor, transfer_bound,
    BoundParams,
};
use crate::envelope::{
    inexact_moreau_gradient, moreau_envelope_value, solve_prox_subproblem, EnvelopeParams,
    InnerSolverConfig, ToleranceSchedule,
};
use crate::error::{Error, Result};
use crate::linalg;
use crate::potentials::{CompositePotential, ElasticNetPotential, QuadraticPotential};
use crate::rng::{stream_rng, STREAM_AUX};
use crate::samplers::{run_chain, run_coupled, run_replicated, ErrorMode, SamplerConfig, SamplerKind};
use crate::scalar::Scalar;

/// Seed used by [`default_suite`] callers that do not supply their own.
pub const DEFAULT_SEED: u64 = 1729;

/// Names of the checks in [`default_suite`], in execution order.
pub const CHECK_NAMES: [&str; 7] = [
    "moreau_identities_quadratic",
    "residual_bounds_gradient_error",
    "pathwise_transfer_fixed_cap",
    "pathwise_transfer_scheduled_caps",
    "mean_gap_bound_monte_carlo",
    "step_matched_floor_scaling",
    "stationary_wasserstein_1d",
];

/// Result of one verification check.
///
/// `pass` is `observed <= bound`, possibly strengthened by side conditions
/// described in `detail` (for example the negative control of the pathwise
/// transfer check). `margin = bound - observed`: nonnegative iff the primary
/// inequality holds.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: String,
    pub bound: f64,
    pub observed: f64,
    pub margin: f64,
    pub pass: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, bound: f64, observed: f64, detail: String) -> Self {
        CheckOutcome {
            name: name.to_owned(),
            bound,
            observed,
            margin: bound - observed,
            pass: observed <= bound,
            detail,
        }
    }

    /// AND an extra side condition into `pass`, explaining it in `detail`.
    fn require(mut self, condition: bool, explanation: &str) -> Self {
        if !condition {
            self.pass = false;
            self.detail.push_str("; FAILED side condition: ");
            self.detail.push_str(explanation);
        }
        self
    }
}

fn gaussian_vector(rng: &mut rand_chacha::ChaCha12Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| f64::standard_normal(rng) * scale).collect()
}

/// Closed-form envelope identities on the quadratic potential.
///
/// For `U(x) = (sigma/2)||x - c||^2` with `sigma = 1` and
/// `gamma in {0.1, 1, 10}`, solves the prox subproblem iteratively at 1000
/// random anchors per `gamma` and compares the certified prox point, envelope
/// value, envelope gradient, and the modulus recovered from the gradient
/// field against the closed forms. Threshold: max deviation `<= 1e-10`.
pub fn check_moreau_identities(seed: u64) -> Result<CheckOutcome> {
    const TRIALS: usize = 1000;
    let n = 8;
    let sigma = 1.0;
    let mut rng = stream_rng(seed, STREAM_AUX);
    let center = gaussian_vector(&mut rng, n, 1.0);
    let potential = QuadraticPotential::new(sigma, center.clone())?;

    let mut solver = InnerSolverConfig::default();
    solver.strong_convexity_hint = sigma;
    solver.max_inner_iterations = 200;

    let (mut dev_point, mut dev_value, mut dev_gradient, mut dev_modulus) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut unconverged = 0usize;
    for &gamma in &[0.1, 1.0, 10.0] {
        let params = EnvelopeParams::new(gamma, n)?;
        let m_closed = sigma / (1.0 + gamma * sigma);
        for _ in 0..TRIALS {
            let x = gaussian_vector(&mut rng, n, 2.0);
            let cert = solve_prox_subproblem(&potential, &x, &params, 1e-12, &solver, None)?;
            if !cert.converged {
                unconverged += 1;
                continue;
            }
            let exact = potential.exact_prox(&x, gamma).ok_or(Error::MissingExactProx)?;
            dev_point = dev_point.max(linalg::distance(&cert.point, &exact));

            let value = moreau_envelope_value(&potential, &x, &cert, gamma)?;
            dev_value = dev_value.max((value - potential.envelope_value(&x, gamma)).abs());

            let grad = inexact_moreau_gradient(&cert, &x, gamma)?;
            dev_gradient =
                dev_gradient.max(linalg::distance(&grad, &potential.envelope_gradient(&x, gamma)));

            // The gradient field is m_gamma (x - c); recover the modulus by
            // projecting the certified gradient onto the displacement.
            let disp: Vec<f64> = x.iter().zip(&center).map(|(a, b)| a - b).collect();
            let disp_sq = linalg::norm_squared(&disp);
            if disp_sq > 1e-6 {
                let inner: f64 = grad.iter().zip(&disp).map(|(g, d)| g * d).sum();
                dev_modulus = dev_modulus.max((inner / disp_sq - m_closed).abs());
            }
        }
    }

    let observed = dev_point.max(dev_value).max(dev_gradient).max(dev_modulus);
    let detail = format!(
        "3x{TRIALS} anchors, gamma in {{0.1, 1, 10}}: max deviation prox {dev_point:.3e}, \
         value {dev_value:.3e}, gradient {dev_gradient:.3e}, modulus {dev_modulus:.3e}"
    );
    Ok(CheckOutcome::new(CHECK_NAMES[0], 1e-10, observed, detail)
        .require(unconverged == 0, "every inner solve must converge at tolerance 1e-12"))
}

/// Residual soundness on the elastic net: the certified residual upper-bounds
/// the true gradient error.
///
/// 1000 random anchors in dimension 50, inner solves stopped at tolerances
/// log-uniform in `[1e-6, 1e-1]`; the true error `||y - prox(x)|| / gamma`
/// (closed-form prox) must never exceed the reported residual. Threshold:
/// max excess `<= 0` (zero violations, no float slack).
pub fn check_residual_soundness(seed: u64) -> Result<CheckOutcome> {
    const TRIALS: usize = 1000;
    let n = 50;
    let gamma = 1.0;
    let potential = ElasticNetPotential::new(1.0, 1.0, n)?;
    let params = EnvelopeParams::new(gamma, n)?;
    let mut solver = InnerSolverConfig::default();
    // A deliberately imperfect curvature hint: with the true modulus the
    // forward-backward step is an exact Newton step for this isotropic
    // subproblem and every solve lands on the prox in one iteration, making
    // the soundness comparison vacuous. Half the modulus keeps the step away
    // from 1/curvature for every iteration count, so solves genuinely stop
    // near their tolerances.
    solver.strong_convexity_hint = 0.5;
    solver.max_inner_iterations = 4000;

    let mut rng = stream_rng(seed, STREAM_AUX);
    let mut max_excess = f64::NEG_INFINITY;
    let mut min_residual = f64::INFINITY;
    let mut max_residual: f64 = 0.0;
    let mut genuinely_inexact = 0usize;
    for _ in 0..TRIALS {
        let anchor = gaussian_vector(&mut rng, n, 2.0);
        let u: f64 = rand::Rng::gen(&mut rng);
        let tolerance = 10f64.powf(-1.0 - 5.0 * u);
        let cert = solve_prox_subproblem(&potential, &anchor, &params, tolerance, &solver, None)?;
        let exact = potential.exact_prox(&anchor, gamma).ok_or(Error::MissingExactProx)?;
        let true_error = linalg::distance(&cert.point, &exact) / gamma;
        max_excess = max_excess.max(true_error - cert.residual);
        min_residual = min_residual.min(cert.residual);
        max_residual = max_residual.max(cert.residual);
        if cert.residual > 1e-8 {
            genuinely_inexact += 1;
        }
    }

    let detail = format!(
        "{TRIALS} anchors (n = {n}), stop tolerances log-uniform in [1e-6, 1e-1]: \
         max (true error - residual) = {max_excess:.3e}, achieved residuals in \
         [{min_residual:.3e}, {max_residual:.3e}], {genuinely_inexact} solves stopped above 1e-8"
    );
    Ok(CheckOutcome::new(CHECK_NAMES[1], 0.0, max_excess, detail).require(
        genuinely_inexact > TRIALS / 2,
        "most solves must stop genuinely early or the comparison is vacuous",
    ))
}

fn coupled_config(seed: u64, steps: usize) -> SamplerConfig<f64> {
    let mut cfg = SamplerConfig::new(1.0, 0.1, steps, seed);
    cfg.inner.strong_convexity_hint = 1.0;
    cfg
}

/// Pathwise transfer bound under a fixed per-step error cap, with a negative
/// control.
///
/// Coupled quadratic chains (n = 10, sigma = gamma = 1, eta = 0.1), errors of
/// norm `delta in {0.01, 0.1, 1}` injected into the exact envelope gradient,
/// 1000 steps, 20 seeds: every path must satisfy
/// `d_k <= eta delta (1 - q^k) / (1 - q)` at every `k` with no tolerance.
/// Feeding the checker `delta / 2` must make every path fail.
pub fn check_pathwise_transfer_fixed(seed: u64) -> Result<CheckOutcome> {
    const STEPS: usize = 1000;
    const REPS: u64 = 20;
    let n = 10;
    let potential = QuadraticPotential::new(1.0, vec![0.0; n])?;
    let initial = vec![0.0; n];

    let mut max_ratio: f64 = 0.0;
    let mut worst = (0usize, 0.0f64);
    let mut paths_checked = 0usize;
    let mut violations = 0usize;
    let mut control_passes = 0usize;
    for &delta in &[0.01, 0.1, 1.0] {
        let params = BoundParams::new(1.0, 1.0, 0.1, delta, n)?;
        let control = params.with_delta(delta / 2.0)?;
        for rep in 0..REPS {
            let cfg = coupled_config(seed.wrapping_add(rep), STEPS);
            let trace = run_coupled(&potential, &cfg, &initial, &ErrorMode::InjectedFixed { delta })?;
            let verdict = pathwise_transfer_verdict(&trace.distances, &params)?;
            paths_checked += 1;
            if !verdict.pass {
                violations += 1;
            }
            if verdict.max_ratio > max_ratio {
                max_ratio = verdict.max_ratio;
                worst = (verdict.worst_k, delta);
            }
            if pathwise_transfer_verdict(&trace.distances, &control)?.pass {
                control_passes += 1;
            }
        }
    }

    let detail = format!(
        "{paths_checked} paths (delta in {{0.01, 0.1, 1}} x {REPS} seeds, {STEPS} steps): \
         {violations} bound violations, worst distance/bound ratio {max_ratio:.12} at \
         k = {} (delta = {}); negative control (checker fed delta/2) failed on \
         {} of {paths_checked} paths as it must",
        worst.0,
        worst.1,
        paths_checked - control_passes,
    );
    Ok(CheckOutcome::new(CHECK_NAMES[2], 1.0, max_ratio, detail)
        .require(violations == 0, "every path must satisfy the bound at every step")
        .require(control_passes == 0, "the halved-cap negative control must fail on every path"))
}

/// Pathwise transfer bound under scheduled per-step caps, plus the
/// constant-schedule consistency identity.
///
/// Same coupled setup with injected error magnitudes `tau_k = (k+1)^-1` and
/// `tau_k = c sqrt(eta)`; every path must satisfy the convolution bound
/// `d_k <= eta sum_j q^(k-1-j) tau_j` built from the recorded caps. With a
/// constant schedule the convolution bound must match the fixed-cap closed
/// form to `1e-12` at every step.
pub fn check_pathwise_transfer_scheduled(seed: u64) -> Result<CheckOutcome> {
    const STEPS: usize = 1000;
    const REPS: u64 = 20;
    let n = 10;
    let eta = 0.1;
    let potential = QuadraticPotential::new(1.0, vec![0.0; n])?;
    let initial = vec![0.0; n];
    let params = BoundParams::new(1.0, 1.0, eta, 0.0, n)?;

    let schedules = [
        ToleranceSchedule::Decaying { c: 1.0, alpha: 1.0 },
        ToleranceSchedule::StepMatched { c: 0.5, eta },
    ];
    let mut max_ratio: f64 = 0.0;
    let mut worst_k = 0usize;
    let mut paths_checked = 0usize;
    let mut violations = 0usize;
    for schedule in &schedules {
        for rep in 0..REPS {
            let cfg = coupled_config(seed.wrapping_add(rep), STEPS);
            let mode = ErrorMode::InjectedScheduled { schedule: *schedule };
            let trace = run_coupled(&potential, &cfg, &initial, &mode)?;
            let verdict = adaptive_pathwise_verdict(&trace.distances, &trace.error_caps, &params)?;
            paths_checked += 1;
            if !verdict.pass {
                violations += 1;
            }
            if verdict.max_ratio > max_ratio {
                max_ratio = verdict.max_ratio;
                worst_k = verdict.worst_k;
            }
        }
    }

    // Consistency: with tau_j == c sqrt(eta) the convolution bound collapses
    // to the fixed-cap closed form.
    let tau = 0.5 * eta.sqrt();
    let constant = BoundParams::new(1.0, 1.0, eta, tau, n)?;
    let curve = adaptive_transfer_curve(&constant, &vec![tau; STEPS])?;
    let mut identity_dev: f64 = 0.0;
    for (k, &adaptive) in curve.iter().enumerate() {
        identity_dev = identity_dev.max((adaptive - transfer_bound(&constant, k)?).abs());
    }

    let detail = format!(
        "{paths_checked} paths (decaying and step-matched caps x {REPS} seeds, {STEPS} steps): \
         {violations} bound violations, worst distance/bound ratio {max_ratio:.12} at \
         k = {worst_k}; constant-cap convolution vs closed form max deviation {identity_dev:.3e}"
    );
    Ok(CheckOutcome::new(CHECK_NAMES[3], 1.0, max_ratio, detail)
        .require(violations == 0, "every path must satisfy the adaptive bound at every step")
        .require(identity_dev <= 1e-12, "constant-cap bound must match the closed form to 1e-12"))
}

/// Monte Carlo check of the fixed-cap mean envelope-gap bound.
///
/// 500 replicated chains on the quadratic (n = 10, sigma = gamma = 1,
/// eta = 0.1), inner solves stopped at the fixed tolerance 0.05, 500 steps:
/// at every recorded step the empirical mean envelope gap (exact closed-form
/// evaluation) must stay below the bound plus three Monte Carlo standard
/// errors. Reported as the worst ratio `mean / (bound + 3 SE) <= 1`.
pub fn check_mean_gap_bound(seed: u64) -> Result<CheckOutcome> {
    const CHAINS: usize = 500;
    const STEPS: usize = 500;
    let n = 10;
    let gamma = 1.0;
    let delta = 0.05;
    let potential = QuadraticPotential::new(1.0, vec![0.0; n])?;
    let initial = vec![2.0; n];

    let mut cfg = SamplerConfig::new(gamma, 0.1, STEPS, seed);
    cfg.schedule = ToleranceSchedule::Fixed { eps: delta };
    cfg.inner.strong_convexity_hint = 1.0;
    cfg.record_every = 10;
    let traces = run_replicated(SamplerKind::IPula, &potential, &cfg, &initial, CHAINS)?;

    let params = BoundParams::new(1.0, gamma, 0.1, delta, n)?;
    let minimum = potential.envelope_value(&vec![0.0; n], gamma);
    let gap0 = potential.envelope_value(&initial, gamma) - minimum;

    let records = traces[0].iterations.len();
    let mut max_ratio: f64 = 0.0;
    let mut worst = (0usize, 0.0f64, 0.0f64, 0.0f64);
    let mut unconverged = 0usize;
    let mut gaps = vec![0.0; CHAINS];
    for r in 0..records {
        let k = traces[0].iterations[r].k;
        for (g, trace) in gaps.iter_mut().zip(&traces) {
            let record = &trace.iterations[r];
            if !record.converged {
                unconverged += 1;
            }
            *g = record.envelope_value_exact.ok_or(Error::MissingExactProx)? - minimum;
        }
        let stats = mean_and_standard_error(&gaps)?;
        let bound = fixed_gap_bound(&params, k, gap0)?;
        let ratio = stats.mean / (bound + 3.0 * stats.se);
        if ratio > max_ratio {
            max_ratio = ratio;
            worst = (k, stats.mean, bound, stats.se);
        }
    }

    let detail = format!(
        "{CHAINS} chains x {STEPS} steps, gap0 = {gap0}, tolerance {delta}: worst \
         mean/(bound + 3 SE) = {max_ratio:.6} at k = {} (mean {:.4}, bound {:.4}, SE {:.4})",
        worst.0, worst.1, worst.2, worst.3
    );
    Ok(CheckOutcome::new(CHECK_NAMES[4], 1.0, max_ratio, detail)
        .require(unconverged == 0, "every recorded inner solve must meet the 0.05 tolerance"))
}

/// Scaling of the step-matched floor in the step size.
///
/// With caps `tau = c sqrt(eta)` the floor's oracle term is near-linear in
/// `eta`: halving `eta` (0.2 -> 0.1 -> 0.05 at sigma = 1, gamma = 10) must
/// shrink it by a factor in [1.9, 2.1], while the noise term moves by less
/// than 30% per halving. Pure formula evaluation.
pub fn check_step_matched_scaling() -> Result<CheckOutcome> {
    let sigma = 1.0;
    let gamma = 10.0;
    let n = 10;
    let c = 1.0;
    let etas = [0.2, 0.1, 0.05];
    let mut floors: Vec<crate::diagnostics::StepMatchedFloor<f64>> =
        Vec::with_capacity(etas.len());
    for &eta in &etas {
        let params = BoundParams::new(sigma, gamma, eta, 0.0, n)?;
        floors.push(step_matched_floor(&params, c)?);
    }

    let mut max_factor_dev: f64 = 0.0;
    let mut max_noise_change: f64 = 0.0;
    let mut factors = Vec::new();
    let mut noise_changes = Vec::new();
    for w in floors.windows(2) {
        let factor = w[0].oracle_term / w[1].oracle_term;
        let noise_change = (w[1].noise_term / w[0].noise_term - 1.0).abs();
        max_factor_dev = max_factor_dev.max((factor - 2.0).abs());
        max_noise_change = max_noise_change.max(noise_change);
        factors.push(factor);
        noise_changes.push(noise_change);
    }

    let detail = format!(
        "sigma = {sigma}, gamma = {gamma}, n = {n}, c = {c}, eta = 0.2 -> 0.1 -> 0.05: \
         oracle-term halving factors {factors:.4?} (target [1.9, 2.1]), \
         noise-term relative changes {noise_changes:.4?} (< 0.3 required)"
    );
    Ok(CheckOutcome::new(CHECK_NAMES[5], 0.1, max_factor_dev, detail)
        .require(max_noise_change < 0.3, "the noise floor must move by < 30% per halving"))
}

/// Long-run stationary sanity check in one dimension.
///
/// iPULA on `U(x) = x^2/2` with gamma = 1, eta = 0.01, inner tolerance 1e-8:
/// the envelope target is N(0, 1/m_gamma) = N(0, 2). The chain mixes with an
/// integrated autocorrelation time of roughly `2/(eta m_gamma) = 400` steps,
/// so consecutive samples are far from independent; the chain is thinned to
/// every 100th state and run long enough to retain 100000 samples after a
/// 25100-step burn-in. Quantile Wasserstein-2 distance to the target must be
/// at most `0.05 sqrt(1/m_gamma)`.
pub fn check_stationary_wasserstein(seed: u64) -> Result<CheckOutcome> {
    const RECORD_EVERY: usize = 100;
    const RETAINED: usize = 100_000;
    const BURN_IN_RECORDS: usize = 251;
    let steps = RECORD_EVERY * (RETAINED + BURN_IN_RECORDS - 1);

    let potential = QuadraticPotential::new(1.0, vec![0.0])?;
    let mut cfg = SamplerConfig::new(1.0, 0.01, steps, seed);
    cfg.schedule = ToleranceSchedule::Fixed { eps: 1e-8 };
    cfg.inner.strong_convexity_hint = 1.0;
    cfg.record_every = RECORD_EVERY;
    cfg.record_states = true;
    let trace = run_chain(SamplerKind::IPula, &potential, &cfg, &[0.0])?;

    let samples: Vec<f64> = trace
        .iterations
        .iter()
        .skip(BURN_IN_RECORDS)
        .map(|r| {
            r.state_snapshot
                .as_ref()
                .map(|s| s[0])
                .ok_or_else(|| Error::invalid("state_snapshot", "state recording was not enabled"))
        })
        .collect::<Result<_>>()?;
    if samples.len() != RETAINED {
        return Err(Error::invalid(
            "samples",
            format!("expected {RETAINED} retained samples, got {}", samples.len()),
        ));
    }

    let m_gamma = 0.5;
    let variance = 1.0 / m_gamma;
    let w2 = quantile_w2_gaussian(&samples, 0.0, variance)?;
    let bound = 0.05 * variance.sqrt();
    let detail = format!(
        "{RETAINED} samples thinned to every {RECORD_EVERY}th state after \
         {} burn-in steps ({steps} total steps): W2 to N(0, {variance}) = {w2:.5}",
        BURN_IN_RECORDS * RECORD_EVERY
    );
    Ok(CheckOutcome::new(CHECK_NAMES[6], bound, w2, detail))
}

/// Run one check by name.
pub fn run_check(name: &str, seed: u64) -> Result<CheckOutcome> {
    match name {
        "moreau_identities_quadratic" => check_moreau_identities(seed),
        "residual_bounds_gradient_error" => check_residual_soundness(seed),
        "pathwise_transfer_fixed_cap" => check_pathwise_transfer_fixed(seed),
        "pathwise_transfer_scheduled_caps" => check_pathwise_transfer_scheduled(seed),
        "mean_gap_bound_monte_carlo" => check_mean_gap_bound(seed),
        "step_matched_floor_scaling" => check_step_matched_scaling(),
        "stationary_wasserstein_1d" => check_stationary_wasserstein(seed),
        other => Err(Error::invalid("check", format!("unknown check name '{other}'"))),
    }
}

/// Run every check in [`CHECK_NAMES`] order.
pub fn default_suite(seed: u64) -> Result<Vec<CheckOutcome>> {
    CHECK_NAMES.iter().map(|name| run_check(name, seed)).collect()
}
