//! Synchronously coupled chain pairs for pathwise error-propagation studies.
//!
//! Both chains share every Gaussian increment, so the distance between them
//! isolates the effect of gradient error. The reference chain always uses the
//! closed-form prox; the perturbed chain either solves the prox inexactly
//! (certified residual caps) or perturbs the exact update by a controlled
//! error vector of known norm.

use crate::envelope::{solve_prox_subproblem, EnvelopeParams, ToleranceSchedule};
use crate::error::{ensure_dimension, Error, Result};
use crate::linalg::{self, all_finite};
use crate::potentials::CompositePotential;
use crate::rng::{stream_rng, STREAM_CHAIN, STREAM_INJECTION};
use crate::scalar::Scalar;

use super::{draw_noise, ipula_update, SamplerConfig};

/// How the perturbed chain's gradient error is produced.
#[derive(Clone, Debug)]
pub enum ErrorMode<F> {
    /// Solve the prox inexactly to the scheduled tolerance; per-step error
    /// caps are the certified residuals.
    InexactInner { schedule: ToleranceSchedule<F> },
    /// Add an error of norm (just under) `delta` in a random direction to
    /// the exact envelope gradient each step; per-step caps equal `delta`.
    InjectedFixed { delta: F },
    /// Injected error with a per-step magnitude from a schedule.
    InjectedScheduled { schedule: ToleranceSchedule<F> },
}

#[derive(Clone, Debug)]
pub struct CoupledTrace<F> {
    /// `distances[k]` is the Euclidean distance between the chains at step
    /// `k`; length `steps + 1` with `distances[0] == 0`.
    pub distances: Vec<F>,
    /// Certified cap on the gradient-error norm at each step; length `steps`.
    pub error_caps: Vec<F>,
    pub shared_seed: u64,
}

fn exact_prox_or_err<F: Scalar>(
    potential: &dyn CompositePotential<F>,
    state: &[F],
    gamma: F,
) -> Result<Vec<F>> {
    potential.exact_prox(state, gamma).ok_or(Error::MissingExactProx)
}

/// Run an exact and a perturbed chain from the same start with shared noise.
pub fn run_coupled<F: Scalar>(
    potential: &dyn CompositePotential<F>,
    config: &SamplerConfig<F>,
    initial: &[F],
    mode: &ErrorMode<F>,
) -> Result<CoupledTrace<F>> {
    config.validate()?;
    ensure_dimension(potential.dimension(), initial.len())?;
    if !(potential.strong_convexity() > F::zero()) {
        return Err(Error::invalid(
            "strong_convexity",
            "coupled contraction requires a strongly convex potential (sigma > 0)",
        ));
    }
    if !all_finite(initial) {
        return Err(Error::NonFiniteIterate { iteration: 0 });
    }
    match mode {
        ErrorMode::InexactInner { schedule }
        | ErrorMode::InjectedScheduled { schedule } => schedule.validate()?,
        ErrorMode::InjectedFixed { delta } => {
            if !(delta.is_finite() && *delta >= F::zero()) {
                return Err(Error::invalid("delta", format!("must be finite and >= 0, got {delta}")));
            }
        }
    }

    let n = initial.len();
    let gamma = config.gamma;
    let eta = config.eta;
    let params = EnvelopeParams::new(gamma, n)?;
    let mut noise_rng = stream_rng(config.seed, STREAM_CHAIN);
    let mut injection_rng = stream_rng(config.seed, STREAM_INJECTION);

    let mut exact = initial.to_vec();
    let mut perturbed = initial.to_vec();
    let mut distances = Vec::with_capacity(config.steps + 1);
    let mut error_caps = Vec::with_capacity(config.steps);
    distances.push(F::zero());

    let mut warm: Option<Vec<F>> = None;
    let mut last_gradient_norm: Option<F> = None;

    for k in 0..config.steps {
        let noise = draw_noise::<F, _>(&mut noise_rng, n);

        let exact_point = exact_prox_or_err(potential, &exact, gamma)?;
        let exact_next = ipula_update(&exact, &exact_point, eta, gamma, &noise);

        let (perturbed_next, cap) = match mode {
            ErrorMode::InexactInner { schedule } => {
                let tolerance = match (*schedule, last_gradient_norm) {
                    (ToleranceSchedule::Relative { c }, None) => {
                        let pilot = solve_prox_subproblem(
                            potential,
                            &perturbed,
                            &params,
                            c,
                            &config.inner,
                            warm.as_deref(),
                        )?;
                        let grad =
                            crate::envelope::inexact_moreau_gradient(&pilot, &perturbed, gamma)?;
                        let norm = linalg::norm(&grad);
                        warm = Some(pilot.point);
                        schedule.evaluate(k, Some(norm))?
                    }
                    (s, g) => s.evaluate(k, g)?,
                };
                let cert = solve_prox_subproblem(
                    potential,
                    &perturbed,
                    &params,
                    tolerance,
                    &config.inner,
                    warm.as_deref(),
                )?;
                let grad = crate::envelope::inexact_moreau_gradient(&cert, &perturbed, gamma)?;
                last_gradient_norm = Some(linalg::norm(&grad));
                let next = ipula_update(&perturbed, &cert.point, eta, gamma, &noise);
                let cap = cert.residual;
                warm = Some(cert.point);
                (next, cap)
            }
            ErrorMode::InjectedFixed { .. } | ErrorMode::InjectedScheduled { .. } => {
                let point = exact_prox_or_err(potential, &perturbed, gamma)?;
                let grad_norm = {
                    let g: Vec<F> =
                        perturbed.iter().zip(&point).map(|(&x, &y)| (x - y) / gamma).collect();
                    linalg::norm(&g)
                };
                let tau = match mode {
                    ErrorMode::InjectedFixed { delta } => *delta,
                    ErrorMode::InjectedScheduled { schedule } => {
                        schedule.evaluate(k, Some(grad_norm))?
                    }
                    ErrorMode::InexactInner { .. } => unreachable!(),
                };
                let mut dir = draw_noise::<F, _>(&mut injection_rng, n);
                let dir_norm = linalg::norm(&dir);
                assert!(dir_norm > F::zero(), "degenerate injection direction");
                for d in &mut dir {
                    *d /= dir_norm;
                }
                // The recorded cap promises the injected error has norm at
                // most `tau`. Normalization and the scale-multiply below each
                // round, so shave the magnitude by a relative margin that
                // dominates roundoff; otherwise the realized norm can land an
                // ulp above the cap and falsify a bound that holds exactly in
                // real arithmetic.
                let shaved = tau * (F::one() - F::epsilon() * F::cast(1000.0));
                let base = ipula_update(&perturbed, &point, eta, gamma, &noise);
                let next: Vec<F> =
                    base.iter().zip(&dir).map(|(&b, &d)| b - eta * shaved * d).collect();
                (next, tau)
            }
        };

        if !all_finite(&exact_next) || !all_finite(&perturbed_next) {
            return Err(Error::NonFiniteIterate { iteration: k + 1 });
        }
        distances.push(linalg::distance(&exact_next, &perturbed_next));
        error_caps.push(cap);
        exact = exact_next;
        perturbed = perturbed_next;
    }

    Ok(CoupledTrace { distances, error_caps, shared_seed: config.seed })
}
