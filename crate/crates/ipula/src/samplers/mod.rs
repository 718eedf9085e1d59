//! Langevin samplers on the smoothed potential.
//!
//! All chains share the step template `x' = x - eta * d + sqrt(2 eta) Z` with
//! one fresh `n`-dimensional standard Gaussian per step; they differ in the
//! direction `d`:
//!
//! * inexact proximal chain: `d = (x - y) / gamma` where `y` is a certified
//!   inexact prox of the full potential, equivalently
//!   `x' = (1 - eta/gamma) x + (eta/gamma) y + sqrt(2 eta) Z`;
//! * exact envelope chain: same with the closed-form prox;
//! * splitting chain (MYULA-style): `d = grad f(x) + (x - prox_g^gamma(x))/gamma`;
//! * subgradient chain: `d = u`, a selected subgradient of `U`;
//! * prox-subgradient chain: smooth gradient step, then a g-prox with
//!   parameter `eta`, then noise.
//!
//! Prox-driven updates all go through one shared formula so chains fed
//! identical certificate points produce bitwise-identical states.

mod chain;
mod coupled;

pub use chain::{run_chain, run_chain_with_rng, run_replicated, ChainTrace, IterationRecord};
pub use coupled::{run_coupled, CoupledTrace, ErrorMode};

use rand::Rng;

use crate::envelope::{
    solve_prox_subproblem, EnvelopeParams, InnerSolverConfig, ProxCertificate, ToleranceSchedule,
};
use crate::error::{ensure_dimension, Error, Result};
use crate::linalg;
use crate::potentials::CompositePotential;
use crate::scalar::Scalar;

/// Which chain to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplerKind {
    /// Inexact proximal Langevin chain with certified inner solves.
    IPula,
    /// Langevin chain on the envelope with the closed-form prox.
    ExactUla,
    /// Smooth-gradient plus g-prox splitting chain.
    Myula,
    /// Plain subgradient Langevin chain.
    GradSub,
    /// Smooth-gradient step, inexact g-prox, then noise.
    ProxSub,
}

impl SamplerKind {
    pub fn name(&self) -> &'static str {
        match self {
            SamplerKind::IPula => "ipula",
            SamplerKind::ExactUla => "exact_ula",
            SamplerKind::Myula => "myula",
            SamplerKind::GradSub => "gradsub",
            SamplerKind::ProxSub => "proxsub",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "ipula" => Ok(SamplerKind::IPula),
            "exact_ula" => Ok(SamplerKind::ExactUla),
            "myula" => Ok(SamplerKind::Myula),
            "gradsub" => Ok(SamplerKind::GradSub),
            "proxsub" => Ok(SamplerKind::ProxSub),
            other => Err(Error::invalid(
                "sampler",
                format!("unknown sampler kind {other:?} (expected ipula, exact_ula, myula, gradsub, or proxsub)"),
            )),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SamplerConfig<F> {
    pub gamma: F,
    pub eta: F,
    pub steps: usize,
    pub seed: u64,
    pub schedule: ToleranceSchedule<F>,
    pub inner: InnerSolverConfig<F>,
    pub record_every: usize,
    /// Keep full state snapshots in recorded iterations (memory permitting).
    pub record_states: bool,
}

impl<F: Scalar> SamplerConfig<F> {
    pub fn new(gamma: F, eta: F, steps: usize, seed: u64) -> Self {
        SamplerConfig {
            gamma,
            eta,
            steps,
            seed,
            schedule: ToleranceSchedule::Fixed { eps: F::cast(1e-6) },
            inner: InnerSolverConfig::default(),
            record_every: 1,
            record_states: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > F::zero()) {
            return Err(Error::invalid("gamma", format!("must be finite and > 0, got {}", self.gamma)));
        }
        if !(self.eta.is_finite() && self.eta > F::zero()) {
            return Err(Error::invalid("eta", format!("must be finite and > 0, got {}", self.eta)));
        }
        if self.eta >= self.gamma {
            return Err(Error::StepSizeOutOfRange {
                eta: self.eta.to_f64_lossy(),
                constraint: "eta < gamma: the envelope gradient is L_gamma = 1/gamma Lipschitz and the chain needs eta * L_gamma < 1",
            });
        }
        if self.record_every == 0 {
            return Err(Error::invalid("record_every", "must be >= 1"));
        }
        self.schedule.validate()?;
        self.inner.validate()
    }

    /// Stricter step-size check required by the objective-gap bounds
    /// (`eta < 1 / (2 L_gamma)`).
    pub fn validate_for_gap_bounds(&self) -> Result<()> {
        self.validate()?;
        if self.eta >= self.gamma / F::cast(2.0) {
            return Err(Error::StepSizeOutOfRange {
                eta: self.eta.to_f64_lossy(),
                constraint: "eta < gamma/2: the objective-gap contraction needs eta < 1/(2 L_gamma)",
            });
        }
        Ok(())
    }

    fn envelope_params(&self, dimension: usize) -> Result<EnvelopeParams<F>> {
        EnvelopeParams::new(self.gamma, dimension)
    }
}

/// Bookkeeping produced by one step.
#[derive(Clone, Debug)]
pub struct StepRecord<F> {
    /// Certificate of the full-potential prox solve (inexact or exact
    /// envelope chains).
    pub full_certificate: Option<ProxCertificate<F>>,
    /// Certificate of a g-prox solve (splitting chains).
    pub aux_certificate: Option<ProxCertificate<F>>,
    pub tolerance_used: F,
    /// Norm of the (inexact) envelope gradient used by this step, when one
    /// was computed.
    pub gradient_norm: Option<F>,
}

impl<F: Scalar> StepRecord<F> {
    fn empty() -> Self {
        StepRecord {
            full_certificate: None,
            aux_certificate: None,
            tolerance_used: F::zero(),
            gradient_norm: None,
        }
    }

    pub(crate) fn residual(&self) -> F {
        self.full_certificate
            .as_ref()
            .or(self.aux_certificate.as_ref())
            .map(|c| c.residual)
            .unwrap_or_else(F::zero)
    }

    pub(crate) fn inner_iterations(&self) -> usize {
        self.full_certificate
            .as_ref()
            .or(self.aux_certificate.as_ref())
            .map(|c| c.inner_iterations)
            .unwrap_or(0)
    }

    pub(crate) fn converged(&self) -> bool {
        self.full_certificate
            .as_ref()
            .or(self.aux_certificate.as_ref())
            .map(|c| c.converged)
            .unwrap_or(true)
    }
}

/// `(1 - eta/gamma) x + (eta/gamma) y + sqrt(2 eta) z`: the prox-driven
/// Langevin update. Chains handed the same `y` take bitwise-identical steps.
pub fn ipula_update<F: Scalar>(state: &[F], prox_point: &[F], eta: F, gamma: F, noise: &[F]) -> Vec<F> {
    let c = eta / gamma;
    let s = (F::cast(2.0) * eta).sqrt();
    (0..state.len())
        .map(|i| (F::one() - c) * state[i] + c * prox_point[i] + s * noise[i])
        .collect()
}

/// `x - eta d + sqrt(2 eta) z`: the gradient-driven Langevin update.
pub fn gradient_update<F: Scalar>(state: &[F], direction: &[F], eta: F, noise: &[F]) -> Vec<F> {
    let s = (F::cast(2.0) * eta).sqrt();
    (0..state.len())
        .map(|i| state[i] - eta * direction[i] + s * noise[i])
        .collect()
}

pub(crate) fn draw_noise<F: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<F> {
    (0..n).map(|_| F::standard_normal(rng)).collect()
}

/// Fixed tolerance used for g-prox solves inside the splitting chains:
/// `1e-3 sqrt(eta)`, tight relative to the outer discretization error.
pub fn splitting_prox_tolerance<F: Scalar>(eta: F) -> F {
    F::cast(1e-3) * eta.sqrt()
}

/// Prox of the potential's nonsmooth part with parameter `t`: closed form
/// when exposed, otherwise an inner solve on the standalone `g`.
pub fn nonsmooth_prox<F: Scalar>(
    potential: &dyn CompositePotential<F>,
    anchor: &[F],
    t: F,
    tolerance: F,
    inner: &InnerSolverConfig<F>,
    warm_start: Option<&[F]>,
) -> Result<ProxCertificate<F>> {
    if let Some(point) = potential.nonsmooth_prox_closed(anchor, t) {
        let subgradient: Vec<F> =
            anchor.iter().zip(&point).map(|(&x, &y)| (x - y) / t).collect();
        return Ok(ProxCertificate {
            point,
            residual: F::zero(),
            subgradient,
            inner_iterations: 0,
            converged: true,
        });
    }
    let g = potential.nonsmooth_part().ok_or(Error::MissingSplitting)?;
    let params = EnvelopeParams::new(t, anchor.len())?;
    solve_prox_subproblem(g, anchor, &params, tolerance, inner, warm_start)
}

/// One step of the certified inexact proximal chain.
///
/// Evaluates the tolerance schedule at `k` (bootstrapping the `Relative`
/// variant from a pilot solve when no gradient norm exists yet), solves the
/// prox subproblem warm-started at `warm_start`, and takes the prox-driven
/// Langevin update with one fresh Gaussian from `rng`.
pub fn ipula_step<F: Scalar, R: Rng + ?Sized>(
    state: &[F],
    potential: &dyn CompositePotential<F>,
    config: &SamplerConfig<F>,
    k: usize,
    warm_start: Option<&[F]>,
    last_gradient_norm: Option<F>,
    rng: &mut R,
) -> Result<(Vec<F>, StepRecord<F>)> {
    ensure_dimension(potential.dimension(), state.len())?;
    let params = config.envelope_params(state.len())?;
    let gamma = config.gamma;

    let mut warm: Option<Vec<F>> = warm_start.map(|w| w.to_vec());
    let tolerance = match (config.schedule, last_gradient_norm) {
        (ToleranceSchedule::Relative { c }, None) => {
            // Pilot solve at the loose tolerance c to estimate the gradient
            // scale, then re-solve (warm-started at the pilot point) below.
            let pilot =
                solve_prox_subproblem(potential, state, &params, c, &config.inner, warm.as_deref())?;
            let pilot_grad = crate::envelope::inexact_moreau_gradient(&pilot, state, gamma)?;
            let norm = linalg::norm(&pilot_grad);
            warm = Some(pilot.point);
            config.schedule.evaluate(k, Some(norm))?
        }
        (schedule, g) => schedule.evaluate(k, g)?,
    };

    let certificate =
        solve_prox_subproblem(potential, state, &params, tolerance, &config.inner, warm.as_deref())?;
    let gradient = crate::envelope::inexact_moreau_gradient(&certificate, state, gamma)?;
    let gradient_norm = linalg::norm(&gradient);

    let noise = draw_noise(rng, state.len());
    let next = ipula_update(state, &certificate.point, config.eta, gamma, &noise);
    Ok((
        next,
        StepRecord {
            full_certificate: Some(certificate),
            aux_certificate: None,
            tolerance_used: tolerance,
            gradient_norm: Some(gradient_norm),
        },
    ))
}

/// One step of the envelope chain with the closed-form prox.
pub fn exact_moreau_ula_step<F: Scalar, R: Rng + ?Sized>(
    state: &[F],
    potential: &dyn CompositePotential<F>,
    config: &SamplerConfig<F>,
    rng: &mut R,
) -> Result<(Vec<F>, StepRecord<F>)> {
    ensure_dimension(potential.dimension(), state.len())?;
    let gamma = config.gamma;
    let point = potential.exact_prox(state, gamma).ok_or(Error::MissingExactProx)?;
    let subgradient: Vec<F> = state.iter().zip(&point).map(|(&x, &y)| (x - y) / gamma).collect();
    let gradient_norm = linalg::norm(&subgradient);
    let noise = draw_noise(rng, state.len());
    let next = ipula_update(state, &point, config.eta, gamma, &noise);
    Ok((
        next,
        StepRecord {
            full_certificate: Some(ProxCertificate {
                point,
                residual: F::zero(),
                subgradient,
                inner_iterations: 0,
                converged: true,
            }),
            aux_certificate: None,
            tolerance_used: F::zero(),
            gradient_norm: Some(gradient_norm),
        },
    ))
}

/// One step of the splitting chain:
/// `x' = x - eta grad f(x) - (eta/gamma)(x - prox_g^gamma(x)) + sqrt(2 eta) Z`.
pub fn myula_step<F: Scalar, R: Rng + ?Sized>(
    state: &[F],
    potential: &dyn CompositePotential<F>,
    config: &SamplerConfig<F>,
    warm_start: Option<&[F]>,
    rng: &mut R,
) -> Result<(Vec<F>, StepRecord<F>)> {
    ensure_dimension(potential.dimension(), state.len())?;
    let grad_f = potential.smooth_part_gradient(state).ok_or(Error::MissingSplitting)?;
    let tolerance = splitting_prox_tolerance(config.eta);
    let cert = nonsmooth_prox(potential, state, config.gamma, tolerance, &config.inner, warm_start)?;
    let noise = draw_noise(rng, state.len());
    let mut next = ipula_update(state, &cert.point, config.eta, config.gamma, &noise);
    for (ni, gi) in next.iter_mut().zip(&grad_f) {
        *ni -= config.eta * *gi;
    }
    Ok((
        next,
        StepRecord {
            full_certificate: None,
            aux_certificate: Some(cert),
            tolerance_used: tolerance,
            gradient_norm: None,
        },
    ))
}

/// One step of the plain subgradient chain:
/// `x' = x - eta u + sqrt(2 eta) Z` with `u = subgradient_select(U)(x)`.
pub fn gradsub_step<F: Scalar, R: Rng + ?Sized>(
    state: &[F],
    potential: &dyn CompositePotential<F>,
    config: &SamplerConfig<F>,
    rng: &mut R,
) -> Result<(Vec<F>, StepRecord<F>)> {
    ensure_dimension(potential.dimension(), state.len())?;
    let u = potential.subgradient_select(state);
    let noise = draw_noise(rng, state.len());
    let next = gradient_update(state, &u, config.eta, &noise);
    Ok((next, StepRecord::empty()))
}

/// One step of the prox-subgradient chain: smooth gradient step, inexact
/// g-prox with parameter `eta`, then noise.
pub fn proxsub_step<F: Scalar, R: Rng + ?Sized>(
    state: &[F],
    potential: &dyn CompositePotential<F>,
    config: &SamplerConfig<F>,
    warm_start: Option<&[F]>,
    rng: &mut R,
) -> Result<(Vec<F>, StepRecord<F>)> {
    ensure_dimension(potential.dimension(), state.len())?;
    let grad_f = potential.smooth_part_gradient(state).ok_or(Error::MissingSplitting)?;
    let forward: Vec<F> =
        state.iter().zip(&grad_f).map(|(&x, &g)| x - config.eta * g).collect();
    let tolerance = splitting_prox_tolerance(config.eta);
    let cert = nonsmooth_prox(potential, &forward, config.eta, tolerance, &config.inner, warm_start)?;
    let noise = draw_noise(rng, state.len());
    let s = (F::cast(2.0) * config.eta).sqrt();
    let next: Vec<F> =
        cert.point.iter().zip(&noise).map(|(&p, &z)| p + s * z).collect();
    Ok((
        next,
        StepRecord {
            full_certificate: None,
            aux_certificate: Some(cert),
            tolerance_used: tolerance,
            gradient_norm: None,
        },
    ))
}
