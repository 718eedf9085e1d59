//! Moreau-Yosida envelope machinery: the inner proximal solver, its
//! certificates, and tolerance schedules.
//!
//! For a potential `U` and smoothing parameter `gamma > 0`, the envelope is
//! `U_gamma(x) = inf_y { U(y) + ||x - y||^2 / (2 gamma) }`, with gradient
//! `grad U_gamma(x) = (x - prox(x)) / gamma` where `prox` minimizes the
//! envelope objective. The envelope gradient is `L_gamma = 1/gamma`
//! Lipschitz, and `U` sigma-strongly convex makes `U_gamma` strongly convex
//! with modulus `m_gamma = sigma / (1 + gamma sigma)`.
//!
//! An inexact solve at anchor `x` returns a candidate `y`, a subgradient
//! `u` in the subdifferential of `U` at `y`, and the computable residual
//! `r = ||u + (y - x)/gamma||`. The residual upper-bounds the true gradient
//! error: `||(x - y)/gamma - grad U_gamma(x)|| <= r`, which is what lets the
//! samplers certify their tolerance schedules without knowing the exact prox.

use crate::error::{ensure_dimension, Error, Result};
use crate::linalg;
use crate::potentials::CompositePotential;
use crate::scalar::Scalar;

/// Smoothing parameters shared by every envelope computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnvelopeParams<F> {
    gamma: F,
    dimension: usize,
}

impl<F: Scalar> EnvelopeParams<F> {
    pub fn new(gamma: F, dimension: usize) -> Result<Self> {
        if !(gamma.is_finite() && gamma > F::zero()) {
            return Err(Error::invalid("gamma", format!("must be finite and > 0, got {gamma}")));
        }
        if dimension == 0 {
            return Err(Error::invalid("dimension", "must be >= 1"));
        }
        Ok(EnvelopeParams { gamma, dimension })
    }

    pub fn gamma(&self) -> F {
        self.gamma
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Envelope gradient Lipschitz constant `L_gamma = 1 / gamma`.
    pub fn lipschitz(&self) -> F {
        F::one() / self.gamma
    }

    /// Envelope strong-convexity modulus transferred from `sigma`:
    /// `m_gamma = sigma / (1 + gamma sigma)`.
    pub fn envelope_modulus(&self, sigma: F) -> F {
        sigma / (F::one() + self.gamma * sigma)
    }
}

/// Outcome of one inexact prox solve, anchored at some `x`.
///
/// `residual == ||subgradient + (point - anchor)/gamma||` by construction;
/// [`ProxCertificate::validate`] recomputes the identity.
#[derive(Clone, Debug)]
pub struct ProxCertificate<F> {
    pub point: Vec<F>,
    pub residual: F,
    pub subgradient: Vec<F>,
    pub inner_iterations: usize,
    pub converged: bool,
}

impl<F: Scalar> ProxCertificate<F> {
    /// Recomputes the residual identity against `anchor`; returns the
    /// absolute discrepancy.
    pub fn validate(&self, anchor: &[F], gamma: F) -> F {
        let r = residual_norm(&self.subgradient, &self.point, anchor, gamma);
        (r - self.residual).abs()
    }
}

/// Per-step inner tolerance rules.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ToleranceSchedule<F> {
    /// Constant `eps`.
    Fixed { eps: F },
    /// `c * sqrt(eta)`, matched to the outer step size.
    StepMatched { c: F, eta: F },
    /// `c * (k + 1)^(-alpha)`.
    Decaying { c: F, alpha: F },
    /// `c * min(1, ||inexact envelope gradient at the current state||)`.
    Relative { c: F },
}

impl<F: Scalar> ToleranceSchedule<F> {
    /// Tolerance for outer step `k`. `gradient_norm` is the norm of the most
    /// recent inexact envelope gradient; only the `Relative` variant needs it.
    pub fn evaluate(&self, k: usize, gradient_norm: Option<F>) -> Result<F> {
        let tol = match *self {
            ToleranceSchedule::Fixed { eps } => eps,
            ToleranceSchedule::StepMatched { c, eta } => c * eta.sqrt(),
            ToleranceSchedule::Decaying { c, alpha } => {
                c * F::cast((k + 1) as f64).powf(-alpha)
            }
            ToleranceSchedule::Relative { c } => {
                let g = gradient_norm.ok_or(Error::MissingGradientNorm)?;
                c * F::one().min(g)
            }
        };
        debug_assert!(tol >= F::zero());
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &'static str, v: F, allow_zero: bool| {
            if v.is_finite() && (v > F::zero() || (allow_zero && v == F::zero())) {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("must be finite and nonnegative, got {v}")))
            }
        };
        match *self {
            ToleranceSchedule::Fixed { eps } => check("eps", eps, true),
            ToleranceSchedule::StepMatched { c, eta } => {
                check("c", c, true)?;
                check("eta", eta, false)
            }
            ToleranceSchedule::Decaying { c, alpha } => {
                check("c", c, true)?;
                check("alpha", alpha, false)
            }
            ToleranceSchedule::Relative { c } => check("c", c, true),
        }
    }
}

/// Evaluates `schedule` at outer step `k`; free-function form.
pub fn evaluate_schedule<F: Scalar>(
    schedule: &ToleranceSchedule<F>,
    k: usize,
    gradient_norm: Option<F>,
) -> Result<F> {
    schedule.evaluate(k, gradient_norm)
}

/// Inner step-size rules. Both are scaled by the prox objective's strong
/// convexity `sigma_hint + 1/gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepRule {
    /// `2 / ((sigma + 1/gamma) (t + 2))`: the classic strongly-convex decay.
    StronglyConvexDecay,
    /// `1 / ((sigma + 1/gamma) sqrt(t + 1))`.
    ConstantOverSqrtK,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InnerSolverConfig<F> {
    pub max_inner_iterations: usize,
    pub step_rule: StepRule,
    /// Strong convexity of `U` (`0` when unknown); sharpens the step sizes.
    pub strong_convexity_hint: F,
    /// Allow returning the potential's closed-form prox with residual 0.
    /// Off by default: the iterative solve is the honest path.
    pub use_exact_prox: bool,
}

impl<F: Scalar> Default for InnerSolverConfig<F> {
    fn default() -> Self {
        InnerSolverConfig {
            max_inner_iterations: 500,
            step_rule: StepRule::StronglyConvexDecay,
            strong_convexity_hint: F::zero(),
            use_exact_prox: false,
        }
    }
}

impl<F: Scalar> InnerSolverConfig<F> {
    pub fn validate(&self) -> Result<()> {
        if self.max_inner_iterations == 0 {
            return Err(Error::invalid("max_inner_iterations", "must be >= 1"));
        }
        if !(self.strong_convexity_hint.is_finite() && self.strong_convexity_hint >= F::zero()) {
            return Err(Error::invalid("strong_convexity_hint", "must be finite and >= 0"));
        }
        Ok(())
    }

    fn step(&self, t: usize, gamma: F) -> F {
        let curvature = self.strong_convexity_hint + F::one() / gamma;
        match self.step_rule {
            StepRule::StronglyConvexDecay => {
                F::cast(2.0) / (curvature * F::cast((t + 2) as f64))
            }
            StepRule::ConstantOverSqrtK => {
                F::one() / (curvature * F::cast((t + 1) as f64).sqrt())
            }
        }
    }
}

fn residual_norm<F: Scalar>(u: &[F], candidate: &[F], anchor: &[F], gamma: F) -> F {
    let mut acc = linalg::KahanSum::default();
    for i in 0..u.len() {
        let z = u[i] + (candidate[i] - anchor[i]) / gamma;
        acc.add(z * z);
    }
    acc.value().sqrt()
}

/// Residual `||u + (candidate - anchor)/gamma||` together with the selected
/// subgradient `u` that realizes it.
pub fn residual_with_subgradient<F: Scalar>(
    potential: &dyn CompositePotential<F>,
    candidate: &[F],
    anchor: &[F],
    gamma: F,
) -> Result<(F, Vec<F>)> {
    ensure_dimension(potential.dimension(), candidate.len())?;
    ensure_dimension(potential.dimension(), anchor.len())?;
    if !(gamma.is_finite() && gamma > F::zero()) {
        return Err(Error::invalid("gamma", format!("must be finite and > 0, got {gamma}")));
    }
    let u = potential.residual_subgradient(candidate, anchor, gamma);
    let r = residual_norm(&u, candidate, anchor, gamma);
    Ok((r, u))
}

/// Computable optimality residual of `candidate` for the prox subproblem
/// anchored at `anchor`.
pub fn residual_at<F: Scalar>(
    potential: &dyn CompositePotential<F>,
    candidate: &[F],
    anchor: &[F],
    gamma: F,
) -> Result<F> {
    residual_with_subgradient(potential, candidate, anchor, gamma).map(|(r, _)| r)
}

/// Inexact envelope gradient `(anchor - point) / gamma` read off a
/// certificate.
pub fn inexact_moreau_gradient<F: Scalar>(
    certificate: &ProxCertificate<F>,
    anchor: &[F],
    gamma: F,
) -> Result<Vec<F>> {
    ensure_dimension(anchor.len(), certificate.point.len())?;
    Ok(anchor
        .iter()
        .zip(&certificate.point)
        .map(|(&x, &y)| (x - y) / gamma)
        .collect())
}

/// Envelope value estimate `U(point) + ||anchor - point||^2 / (2 gamma)`.
/// Always an upper bound on `U_gamma(anchor)`, exact at the true prox.
pub fn moreau_envelope_value<F: Scalar>(
    potential: &dyn CompositePotential<F>,
    anchor: &[F],
    certificate: &ProxCertificate<F>,
    gamma: F,
) -> Result<F> {
    ensure_dimension(potential.dimension(), anchor.len())?;
    ensure_dimension(potential.dimension(), certificate.point.len())?;
    Ok(potential.value(&certificate.point)
        + linalg::distance_squared(anchor, &certificate.point) / (F::cast(2.0) * gamma))
}

/// Solves `min_y U(y) + ||y - anchor||^2 / (2 gamma)` iteratively until the
/// computable residual drops to `tolerance` or the iteration budget runs out.
///
/// The iteration is a proximal-gradient step whenever the potential exposes a
/// closed-form prox of its nonsmooth part (so kinks are hit exactly), and a
/// plain subgradient step on the prox objective otherwise. Either way every
/// iterate is scored by its residual and the best-scoring iterate is
/// returned, so the certificate's residual never exceeds that of any iterate
/// the solver has seen, including the warm start.
pub fn solve_prox_subproblem<F: Scalar>(
    potential: &dyn CompositePotential<F>,
    anchor: &[F],
    params: &EnvelopeParams<F>,
    tolerance: F,
    solver: &InnerSolverConfig<F>,
    warm_start: Option<&[F]>,
) -> Result<ProxCertificate<F>> {
    ensure_dimension(potential.dimension(), anchor.len())?;
    ensure_dimension(params.dimension(), anchor.len())?;
    solver.validate()?;
    if !(tolerance.is_finite() && tolerance >= F::zero()) {
        return Err(Error::invalid("tolerance", format!("must be >= 0, got {tolerance}")));
    }
    let gamma = params.gamma();

    if solver.use_exact_prox {
        if let Some(point) = potential.exact_prox(anchor, gamma) {
            // Optimality pins the subgradient: (anchor - point)/gamma is in
            // the subdifferential at the prox, and the residual cancels
            // exactly.
            let subgradient: Vec<F> =
                anchor.iter().zip(&point).map(|(&x, &y)| (x - y) / gamma).collect();
            return Ok(ProxCertificate {
                point,
                residual: F::zero(),
                subgradient,
                inner_iterations: 0,
                converged: true,
            });
        }
    }

    let mut y: Vec<F> = warm_start.unwrap_or(anchor).to_vec();
    ensure_dimension(anchor.len(), y.len())?;

    let proximal_mode = potential.smooth_part_gradient(&y).is_some()
        && potential.nonsmooth_prox_closed(&y, gamma).is_some();

    let (mut residual, mut subgradient) =
        residual_with_subgradient(potential, &y, anchor, gamma)?;
    let mut best = ProxCertificate {
        point: y.clone(),
        residual,
        subgradient: subgradient.clone(),
        inner_iterations: 0,
        converged: residual <= tolerance,
    };

    let mut t = 0;
    while best.residual > tolerance && t < solver.max_inner_iterations {
        let step = solver.step(t, gamma);
        if proximal_mode {
            // Forward step on (smooth part + quadratic coupling), backward
            // step on the nonsmooth part.
            let grad_f = potential
                .smooth_part_gradient(&y)
                .expect("proximal mode requires a smooth part");
            let forward: Vec<F> = (0..y.len())
                .map(|i| y[i] - step * (grad_f[i] + (y[i] - anchor[i]) / gamma))
                .collect();
            y = potential
                .nonsmooth_prox_closed(&forward, step)
                .expect("proximal mode requires a closed nonsmooth prox");
        } else {
            // The residual vector u + (y - anchor)/gamma is exactly a
            // subgradient of the prox objective at y.
            for i in 0..y.len() {
                let zeta = subgradient[i] + (y[i] - anchor[i]) / gamma;
                y[i] -= step * zeta;
            }
        }
        t += 1;
        if !linalg::all_finite(&y) {
            return Err(Error::NonFiniteIterate { iteration: t });
        }
        let eval = residual_with_subgradient(potential, &y, anchor, gamma)?;
        residual = eval.0;
        subgradient = eval.1;
        if residual < best.residual {
            best.point.clone_from(&y);
            best.residual = residual;
            best.subgradient.clone_from(&subgradient);
        }
    }

    best.inner_iterations = t;
    best.converged = best.residual <= tolerance;
    debug_assert!(best.validate(anchor, gamma) <= F::cast(1e-12));
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{ElasticNetPotential, QuadraticPotential};

    fn quad(sigma: f64, center: Vec<f64>) -> QuadraticPotential<f64> {
        QuadraticPotential::new(sigma, center).unwrap()
    }

    fn solver(max: usize) -> InnerSolverConfig<f64> {
        InnerSolverConfig { max_inner_iterations: max, ..Default::default() }
    }

    #[test]
    fn solves_offset_quadratic_prox() {
        // U(y) = (1/2)(y-3)^2, gamma = 1, anchor = 0: prox = 1.5.
        let p = quad(1.0, vec![3.0]);
        let params = EnvelopeParams::new(1.0, 1).unwrap();
        let mut cfg = solver(10_000);
        cfg.strong_convexity_hint = 1.0;
        let cert = solve_prox_subproblem(&p, &[0.0], &params, 1e-8, &cfg, None).unwrap();
        assert!(cert.converged);
        assert!(cert.residual <= 1e-8);
        assert!((cert.point[0] - 1.5).abs() <= 1e-8, "point {}", cert.point[0]);
    }

    #[test]
    fn exact_shortcut_returns_zero_residual() {
        let p = quad(1.0, vec![3.0]);
        let params = EnvelopeParams::new(1.0, 1).unwrap();
        let cfg = InnerSolverConfig { use_exact_prox: true, ..solver(10) };
        let cert = solve_prox_subproblem(&p, &[0.0], &params, 0.0, &cfg, None).unwrap();
        assert_eq!(cert.point, vec![1.5]);
        assert_eq!(cert.residual, 0.0);
        assert_eq!(cert.inner_iterations, 0);
        assert!(cert.converged);
        assert_eq!(cert.validate(&[0.0], 1.0), 0.0);
    }

    #[test]
    fn elastic_net_point_is_within_gamma_times_residual() {
        // lambda = s = 1, gamma = 1, anchor = 3: exact prox is soft(3,1)/2 = 1.
        let p = ElasticNetPotential::new(1.0, 1.0, 1).unwrap();
        let params = EnvelopeParams::new(1.0, 1).unwrap();
        let mut cfg = solver(200_000);
        cfg.strong_convexity_hint = 1.0;
        let cert = solve_prox_subproblem(&p, &[3.0], &params, 1e-8, &cfg, None).unwrap();
        assert!(cert.converged, "residual {}", cert.residual);
        assert!(
            (cert.point[0] - 1.0).abs() <= 1.0 * cert.residual + 1e-12,
            "point {} residual {}",
            cert.point[0],
            cert.residual
        );
    }

    #[test]
    fn anchor_at_minimizer_converges_immediately() {
        let p = quad(2.0, vec![-1.0, 4.0]);
        let params = EnvelopeParams::new(0.5, 2).unwrap();
        let cert =
            solve_prox_subproblem(&p, &[-1.0, 4.0], &params, 1e-12, &solver(100), None).unwrap();
        assert!(cert.converged);
        assert_eq!(cert.inner_iterations, 0);
        assert!(cert.residual <= 1e-12);
        assert!((cert.point[0] + 1.0).abs() <= 1e-12 && (cert.point[1] - 4.0).abs() <= 1e-12);
    }

    #[test]
    fn nonconvergence_is_reported_not_hidden() {
        // Two iterations cannot reach the prox (the decaying step rule only
        // lands the exact minimizer on its third step for this fixture).
        let p = quad(1.0, vec![10.0]);
        let params = EnvelopeParams::new(1.0, 1).unwrap();
        let cert = solve_prox_subproblem(&p, &[0.0], &params, 1e-9, &solver(2), None).unwrap();
        assert!(!cert.converged);
        assert_eq!(cert.inner_iterations, 2);
        assert!(cert.residual > 1e-9);
    }

    #[test]
    fn warm_start_is_never_worse_than_returned_certificate() {
        let p = quad(1.0, vec![5.0]);
        let params = EnvelopeParams::new(2.0, 1).unwrap();
        let warm = [3.0];
        let (warm_res, _) = residual_with_subgradient(&p, &warm, &[0.0], 2.0).unwrap();
        let cert =
            solve_prox_subproblem(&p, &[0.0], &params, 0.0, &solver(5), Some(&warm)).unwrap();
        assert!(cert.residual <= warm_res);
    }

    #[test]
    fn residual_at_quadratic_example() {
        // U(y) = y^2/2, gamma = 1, anchor = 2, candidate = 1.2:
        // u = 1.2, residual = |1.2 + (1.2 - 2)| = 0.4.
        let p = quad(1.0, vec![0.0]);
        let r = residual_at(&p, &[1.2], &[2.0], 1.0).unwrap();
        assert!((r - 0.4).abs() < 1e-15, "residual {r}");
    }

    #[test]
    fn residual_at_elastic_net_example() {
        // U(y) = |y| + y^2/2, gamma = 1, anchor = 3, candidate = 0.9:
        // u = 1 + 0.9 = 1.9, residual = |1.9 + (0.9 - 3)| = 0.2.
        let p = ElasticNetPotential::new(1.0, 1.0, 1).unwrap();
        let r = residual_at(&p, &[0.9f64], &[3.0], 1.0).unwrap();
        assert!((r - 0.2).abs() < 1e-15, "residual {r}");
    }

    #[test]
    fn residual_at_rejects_dimension_mismatch() {
        let p = quad(1.0, vec![0.0, 0.0]);
        assert!(matches!(
            residual_at(&p, &[1.0], &[2.0, 0.0], 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn inexact_gradient_matches_formula() {
        let cert = ProxCertificate {
            point: vec![1.0],
            residual: 0.0,
            subgradient: vec![1.0],
            inner_iterations: 0,
            converged: true,
        };
        let g = inexact_moreau_gradient(&cert, &[2.0], 1.0).unwrap();
        assert_eq!(g, vec![1.0]);

        let cert2 = ProxCertificate {
            point: vec![1.0, 0.0],
            residual: 0.0,
            subgradient: vec![2.0, 0.0],
            inner_iterations: 0,
            converged: true,
        };
        let g2 = inexact_moreau_gradient(&cert2, &[2.0, 0.0], 0.5).unwrap();
        assert_eq!(g2, vec![2.0, 0.0]);
    }

    #[test]
    fn envelope_value_upper_bound_example() {
        // U(y) = y^2/2, gamma = 1, anchor = 2, exact prox point 1:
        // value = 0.5 + 0.5 = 1.0, the exact envelope value.
        let p = quad(1.0, vec![0.0]);
        let params = EnvelopeParams::new(1.0, 1).unwrap();
        let cfg = InnerSolverConfig { use_exact_prox: true, ..solver(10) };
        let cert = solve_prox_subproblem(&p, &[2.0], &params, 0.0, &cfg, None).unwrap();
        let v = moreau_envelope_value(&p, &[2.0], &cert, 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
        // Upper-bound property against an arbitrary worse candidate.
        let worse = ProxCertificate {
            point: vec![0.5],
            residual: 1.0,
            subgradient: vec![0.5],
            inner_iterations: 1,
            converged: false,
        };
        let vw = moreau_envelope_value(&p, &[2.0], &worse, 1.0).unwrap();
        assert!(vw >= v);
    }

    #[test]
    fn schedule_values_match_formulas() {
        let fixed = ToleranceSchedule::Fixed { eps: 0.05 };
        assert_eq!(fixed.evaluate(17, None).unwrap(), 0.05);

        let matched = ToleranceSchedule::StepMatched { c: 2.0, eta: 0.25 };
        assert_eq!(matched.evaluate(3, None).unwrap(), 1.0);

        let decaying = ToleranceSchedule::Decaying { c: 1.0, alpha: 1.0 };
        assert_eq!(decaying.evaluate(3, None).unwrap(), 0.25);

        let relative = ToleranceSchedule::Relative { c: 0.1 };
        assert_eq!(relative.evaluate(0, Some(0.5)).unwrap(), 0.05);
        assert_eq!(relative.evaluate(0, Some(4.0)).unwrap(), 0.1);
        assert!(matches!(relative.evaluate(0, None), Err(Error::MissingGradientNorm)));
    }

    #[test]
    fn decaying_schedule_is_nonincreasing_and_nonnegative() {
        let s = ToleranceSchedule::Decaying { c: 0.7, alpha: 1.3 };
        let mut prev = f64::INFINITY;
        for k in 0..200 {
            let v = s.evaluate(k, None).unwrap();
            assert!(v >= 0.0 && v <= prev, "k={k}: {v} > {prev}");
            prev = v;
        }
    }

    #[test]
    fn envelope_gradient_is_lipschitz_on_exact_certificates() {
        // ||grad U_gamma(x) - grad U_gamma(x')|| <= ||x - x'|| / gamma.
        let p = quad(0.8, vec![0.3, -0.7, 1.1]);
        let gamma = 0.5;
        let params = EnvelopeParams::new(gamma, 3).unwrap();
        let cfg = InnerSolverConfig { use_exact_prox: true, ..solver(1) };
        let mut rng = crate::rng::stream_rng(5, crate::rng::STREAM_AUX);
        for _ in 0..100 {
            let a: Vec<f64> = (0..3).map(|_| f64::standard_normal(&mut rng) * 2.0).collect();
            let b: Vec<f64> = (0..3).map(|_| f64::standard_normal(&mut rng) * 2.0).collect();
            let ca = solve_prox_subproblem(&p, &a, &params, 0.0, &cfg, None).unwrap();
            let cb = solve_prox_subproblem(&p, &b, &params, 0.0, &cfg, None).unwrap();
            let ga = inexact_moreau_gradient(&ca, &a, gamma).unwrap();
            let gb = inexact_moreau_gradient(&cb, &b, gamma).unwrap();
            let lhs = crate::linalg::distance(&ga, &gb);
            let rhs = crate::linalg::distance(&a, &b) / gamma;
            assert!(lhs <= rhs * (1.0 + 1e-12), "lhs={lhs}, rhs={rhs}");
        }
    }

    #[test]
    fn certificate_residual_bounds_true_error_on_random_early_stops() {
        // Certificate soundness against the closed-form prox: the true
        // gradient error never exceeds the reported residual.
        let p = ElasticNetPotential::new(1.0, 1.0, 8).unwrap();
        let gamma = 0.7;
        let params = EnvelopeParams::new(gamma, 8).unwrap();
        let mut rng = crate::rng::stream_rng(17, crate::rng::STREAM_AUX);
        let mut cfg = solver(4000);
        cfg.strong_convexity_hint = 1.0;
        for trial in 0..300 {
            let anchor: Vec<f64> =
                (0..8).map(|_| f64::standard_normal(&mut rng) * 2.0).collect();
            // Random early stop: tolerance log-uniform in [1e-6, 1e-1].
            let u: f64 = rand::Rng::gen(&mut rng);
            let tol = 10f64.powf(-1.0 - 5.0 * u);
            let cert = solve_prox_subproblem(&p, &anchor, &params, tol, &cfg, None).unwrap();
            let exact = p.exact_prox(&anchor, gamma).unwrap();
            let true_err = crate::linalg::distance(&cert.point, &exact) / gamma;
            assert!(
                true_err <= cert.residual + 1e-14,
                "trial {trial}: true error {true_err} > residual {}",
                cert.residual
            );
        }
    }
}
