//! Declarative run configuration: a versioned TOML document, strictly
//! validated before any computation starts.
//!
//! Unknown keys anywhere in the document are hard errors (a silent typo in
//! `gamma` or `eta` would invalidate the convergence guarantees the run is
//! supposed to exercise), every section is checked against the experiment
//! that uses it, and numeric constraints are validated up front with errors
//! naming the violated precondition.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use ipula::envelope::{InnerSolverConfig, StepRule, ToleranceSchedule};
use ipula::potentials::{CompositePotential, ElasticNetPotential, QuadraticPotential};
use ipula::samplers::{SamplerConfig, SamplerKind};

/// The one schema this binary understands.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Sample,
    Deblur,
    Verify,
    Bounds,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Sample => "sample",
            ExperimentKind::Deblur => "deblur",
            ExperimentKind::Verify => "verify",
            ExperimentKind::Bounds => "bounds",
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Must equal [`SCHEMA_VERSION`].
    pub schema_version: u32,
    /// The experiment this document describes; must match the subcommand.
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub imaging: Option<ImagingSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deblur: Option<DeblurSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsSection>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Output directory; `--out` overrides it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: RunConfig = toml::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        if config.schema_version != SCHEMA_VERSION {
            bail!(
                "config {}: schema_version {} is not supported (this binary reads version {})",
                path.display(),
                config.schema_version,
                SCHEMA_VERSION
            );
        }
        config.check_sections()?;
        Ok(config)
    }

    /// Reject the config if its `experiment` does not match the subcommand.
    pub fn ensure_experiment(&self, expected: ExperimentKind) -> Result<()> {
        if self.experiment != expected {
            bail!(
                "config declares experiment = \"{}\" but the `{}` subcommand was invoked; \
                 refusing to guess which one is the typo",
                self.experiment.name(),
                expected.name()
            );
        }
        Ok(())
    }

    /// Each experiment must carry exactly the sections it reads: a stray
    /// section is treated like an unknown key.
    fn check_sections(&self) -> Result<()> {
        let allowed: &[&str] = match self.experiment {
            ExperimentKind::Sample => &["potential", "sampler"],
            ExperimentKind::Deblur => &["potential", "sampler", "imaging", "deblur"],
            ExperimentKind::Verify => &["verify"],
            ExperimentKind::Bounds => &["bounds"],
        };
        let present: [(&str, bool); 6] = [
            ("potential", self.potential.is_some()),
            ("sampler", self.sampler.is_some()),
            ("imaging", self.imaging.is_some()),
            ("deblur", self.deblur.is_some()),
            ("verify", self.verify.is_some()),
            ("bounds", self.bounds.is_some()),
        ];
        for (name, is_present) in present {
            if is_present && !allowed.contains(&name) {
                bail!(
                    "section [{name}] does not apply to experiment \"{}\"",
                    self.experiment.name()
                );
            }
        }
        Ok(())
    }

    pub fn potential_section(&self) -> Result<&PotentialSection> {
        self.potential.as_ref().context("missing [potential] section")
    }

    pub fn sampler_section(&self) -> Result<&SamplerSection> {
        self.sampler.as_ref().context("missing [sampler] section")
    }

    pub fn imaging_section(&self) -> Result<&ImagingSection> {
        self.imaging.as_ref().context("missing [imaging] section")
    }

    pub fn bounds_section(&self) -> Result<&BoundsSection> {
        self.bounds.as_ref().context("missing [bounds] section")
    }
}

/// Target potential. `kind` selects the fixture; only the parameters of that
/// kind may be set, so a typo cannot silently fall back to a default.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    /// One of `quadratic`, `elastic_net`, `tv_deblur`.
    pub kind: String,
    /// Quadratic: curvature (must be > 0).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Quadratic: scalar broadcast to the center vector (default 0).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    /// Quadratic / elastic net: problem dimension.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    /// Elastic net: l1 weight.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l1_weight: Option<f64>,
    /// Elastic net: quadratic weight.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quad_weight: Option<f64>,
    /// TV deblurring: total-variation weight.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tv_weight: Option<f64>,
    /// TV deblurring: ridge weight (strong convexity of the target).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ridge_weight: Option<f64>,
}

fn require<T: Copy>(field: Option<T>, name: &str, kind: &str) -> Result<T> {
    field.with_context(|| format!("[potential] kind = \"{kind}\" requires `{name}`"))
}

impl PotentialSection {
    /// Build the vector-space fixture potentials used by `sample`.
    pub fn build(&self) -> Result<Box<dyn CompositePotential<f64> + Sync>> {
        match self.kind.as_str() {
            "quadratic" => {
                for (f, n) in [
                    (self.l1_weight.is_some(), "l1_weight"),
                    (self.quad_weight.is_some(), "quad_weight"),
                    (self.tv_weight.is_some(), "tv_weight"),
                    (self.ridge_weight.is_some(), "ridge_weight"),
                ] {
                    if f {
                        bail!("[potential] `{n}` does not apply to kind = \"quadratic\"");
                    }
                }
                let sigma = require(self.sigma, "sigma", "quadratic")?;
                let dimension = require(self.dimension, "dimension", "quadratic")?;
                let center = self.center.unwrap_or(0.0);
                Ok(Box::new(QuadraticPotential::new(sigma, vec![center; dimension])?))
            }
            "elastic_net" => {
                for (f, n) in [
                    (self.sigma.is_some(), "sigma"),
                    (self.center.is_some(), "center"),
                    (self.tv_weight.is_some(), "tv_weight"),
                    (self.ridge_weight.is_some(), "ridge_weight"),
                ] {
                    if f {
                        bail!("[potential] `{n}` does not apply to kind = \"elastic_net\"");
                    }
                }
                let l1 = require(self.l1_weight, "l1_weight", "elastic_net")?;
                let quad = require(self.quad_weight, "quad_weight", "elastic_net")?;
                let dimension = require(self.dimension, "dimension", "elastic_net")?;
                Ok(Box::new(ElasticNetPotential::new(l1, quad, dimension)?))
            }
            "tv_deblur" => bail!(
                "[potential] kind = \"tv_deblur\" is driven by the deblur experiment, \
                 not by sample"
            ),
            other => bail!(
                "[potential] unknown kind {other:?} (expected quadratic, elastic_net, or tv_deblur)"
            ),
        }
    }

    /// The `(tv_weight, ridge_weight)` pair for the deblur experiment.
    pub fn tv_deblur_weights(&self) -> Result<(f64, f64)> {
        if self.kind != "tv_deblur" {
            bail!(
                "the deblur experiment requires [potential] kind = \"tv_deblur\", got {:?}",
                self.kind
            );
        }
        for (f, n) in [
            (self.sigma.is_some(), "sigma"),
            (self.center.is_some(), "center"),
            (self.dimension.is_some(), "dimension"),
            (self.l1_weight.is_some(), "l1_weight"),
            (self.quad_weight.is_some(), "quad_weight"),
        ] {
            if f {
                bail!("[potential] `{n}` does not apply to kind = \"tv_deblur\"");
            }
        }
        let tv = require(self.tv_weight, "tv_weight", "tv_deblur")?;
        let ridge = require(self.ridge_weight, "ridge_weight", "tv_deblur")?;
        Ok((tv, ridge))
    }
}

/// Inner-solve tolerance schedule.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    /// One of `fixed`, `step_matched`, `decaying`, `relative`.
    pub kind: String,
    /// Fixed: the tolerance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Step-matched / decaying / relative: the coefficient.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Decaying: the exponent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

impl ScheduleSection {
    pub fn to_schedule(&self, eta: f64) -> Result<ToleranceSchedule<f64>> {
        let schedule = match self.kind.as_str() {
            "fixed" => {
                if self.c.is_some() || self.alpha.is_some() {
                    bail!("[sampler.schedule] kind = \"fixed\" takes only `eps`");
                }
                ToleranceSchedule::Fixed {
                    eps: self.eps.context("schedule kind = \"fixed\" requires `eps`")?,
                }
            }
            "step_matched" => {
                if self.eps.is_some() || self.alpha.is_some() {
                    bail!("[sampler.schedule] kind = \"step_matched\" takes only `c`");
                }
                ToleranceSchedule::StepMatched {
                    c: self.c.context("schedule kind = \"step_matched\" requires `c`")?,
                    eta,
                }
            }
            "decaying" => {
                if self.eps.is_some() {
                    bail!("[sampler.schedule] kind = \"decaying\" takes `c` and `alpha`");
                }
                ToleranceSchedule::Decaying {
                    c: self.c.context("schedule kind = \"decaying\" requires `c`")?,
                    alpha: self.alpha.context("schedule kind = \"decaying\" requires `alpha`")?,
                }
            }
            "relative" => {
                if self.eps.is_some() || self.alpha.is_some() {
                    bail!("[sampler.schedule] kind = \"relative\" takes only `c`");
                }
                ToleranceSchedule::Relative {
                    c: self.c.context("schedule kind = \"relative\" requires `c`")?,
                }
            }
            other => bail!(
                "[sampler.schedule] unknown kind {other:?} \
                 (expected fixed, step_matched, decaying, or relative)"
            ),
        };
        schedule.validate()?;
        Ok(schedule)
    }
}

/// Inner (prox subproblem) solver limits. Defaults differ per experiment and
/// are resolved by the command, hence the `Option` fields.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InnerSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    /// One of `strongly_convex_decay` (default), `constant_over_sqrt_k`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_rule: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strong_convexity_hint: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub use_exact_prox: Option<bool>,
}

impl InnerSection {
    pub fn to_inner(&self, default_max: usize, default_hint: f64) -> Result<InnerSolverConfig<f64>> {
        let step_rule = match self.step_rule.as_deref() {
            None | Some("strongly_convex_decay") => StepRule::StronglyConvexDecay,
            Some("constant_over_sqrt_k") => StepRule::ConstantOverSqrtK,
            Some(other) => bail!(
                "[sampler.inner] unknown step_rule {other:?} \
                 (expected strongly_convex_decay or constant_over_sqrt_k)"
            ),
        };
        Ok(InnerSolverConfig {
            max_inner_iterations: self.max_iterations.unwrap_or(default_max),
            step_rule,
            strong_convexity_hint: self.strong_convexity_hint.unwrap_or(default_hint),
            use_exact_prox: self.use_exact_prox.unwrap_or(false),
        })
    }
}

fn default_one() -> usize {
    1
}

fn default_burn_in() -> f64 {
    0.2
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSection {
    /// Chain kind for `sample` (one of `ipula`, `exact_ula`, `myula`,
    /// `gradsub`, `proxsub`). The deblur experiment lists its methods under
    /// `[deblur] methods` instead.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub gamma: f64,
    pub eta: f64,
    pub steps: usize,
    pub seed: u64,
    #[serde(default = "default_one")]
    pub record_every: usize,
    /// Independent replicas for `sample`; aggregates are emitted when > 1.
    #[serde(default = "default_one")]
    pub replicas: usize,
    /// Fraction of the trajectory discarded before stationary statistics
    /// (used by the deblur experiment).
    #[serde(default = "default_burn_in")]
    pub burn_in_fraction: f64,
    /// Scalar broadcast to the initial state vector.
    #[serde(default)]
    pub initial: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inner: Option<InnerSection>,
}

impl SamplerSection {
    /// Chain kind (required by `sample`).
    pub fn chain_kind(&self) -> Result<SamplerKind> {
        let name = self
            .kind
            .as_deref()
            .context("[sampler] `kind` is required for the sample experiment")?;
        Ok(SamplerKind::parse(name)?)
    }

    /// Assemble and validate the library sampler configuration.
    pub fn to_sampler_config(&self, seed_override: Option<u64>) -> Result<SamplerConfig<f64>> {
        let mut config =
            SamplerConfig::new(self.gamma, self.eta, self.steps, seed_override.unwrap_or(self.seed));
        config.record_every = self.record_every;
        if let Some(schedule) = &self.schedule {
            config.schedule = schedule.to_schedule(self.eta)?;
        }
        if let Some(inner) = &self.inner {
            config.inner = inner.to_inner(config.inner.max_inner_iterations, 0.0)?;
        }
        config.validate()?;
        if self.replicas == 0 {
            bail!("[sampler] replicas must be >= 1");
        }
        if !(self.burn_in_fraction >= 0.0 && self.burn_in_fraction < 1.0) {
            bail!("[sampler] burn_in_fraction must be in [0, 1)");
        }
        if !self.initial.is_finite() {
            bail!("[sampler] initial must be finite");
        }
        Ok(config)
    }
}

fn default_kernel() -> usize {
    5
}

fn default_bsnr() -> f64 {
    40.0
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ImagingSection {
    /// `"phantom"` for the bundled synthetic image, or a path to an 8/16-bit
    /// grayscale `.pgm`/`.png`.
    pub input: String,
    /// Phantom width (phantom input only; default 128).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<usize>,
    /// Phantom height (phantom input only; default 128).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height: Option<usize>,
    #[serde(default = "default_kernel")]
    pub kernel_size: usize,
    #[serde(default = "default_bsnr")]
    pub bsnr_db: f64,
    #[serde(default)]
    pub noise_seed: u64,
}

impl ImagingSection {
    pub fn load_truth(&self) -> Result<ipula::imaging::Image<f64>> {
        if self.input == "phantom" {
            let width = self.width.unwrap_or(128);
            let height = self.height.unwrap_or(128);
            Ok(ipula::imaging::phantom(width, height)?)
        } else {
            if self.width.is_some() || self.height.is_some() {
                bail!(
                    "[imaging] width/height apply only to the bundled phantom; \
                     file inputs keep their own size"
                );
            }
            Ok(ipula::imaging::load_image(Path::new(&self.input))?)
        }
    }
}

fn default_acf_lag() -> usize {
    50
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DeblurSection {
    /// Samplers to compare (default: ipula, myula, gradsub, proxsub).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub methods: Option<Vec<String>>,
    #[serde(default = "default_acf_lag")]
    pub acf_max_lag: usize,
    /// Series the autocorrelation is computed on: `potential` (default) or
    /// `envelope_upper`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acf_series: Option<String>,
    /// Wiener filter regularization (default: derived from the BSNR).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wiener_regularization: Option<f64>,
}

impl Default for DeblurSection {
    fn default() -> Self {
        DeblurSection {
            methods: None,
            acf_max_lag: default_acf_lag(),
            acf_series: None,
            wiener_regularization: None,
        }
    }
}

impl DeblurSection {
    pub fn method_kinds(&self) -> Result<Vec<SamplerKind>> {
        match &self.methods {
            None => Ok(vec![
                SamplerKind::IPula,
                SamplerKind::Myula,
                SamplerKind::GradSub,
                SamplerKind::ProxSub,
            ]),
            Some(names) => {
                if names.is_empty() {
                    bail!("[deblur] methods must not be empty");
                }
                let kinds: Vec<SamplerKind> = names
                    .iter()
                    .map(|n| SamplerKind::parse(n))
                    .collect::<std::result::Result<_, _>>()?;
                for (i, a) in kinds.iter().enumerate() {
                    if kinds[..i].contains(a) {
                        bail!("[deblur] methods lists {:?} twice", a.name());
                    }
                }
                Ok(kinds)
            }
        }
    }

    pub fn acf_series(&self) -> Result<ipula::deblur::AcfSeries> {
        match self.acf_series.as_deref() {
            None | Some("potential") => Ok(ipula::deblur::AcfSeries::Potential),
            Some("envelope_upper") => Ok(ipula::deblur::AcfSeries::EnvelopeUpper),
            Some(other) => bail!(
                "[deblur] unknown acf_series {other:?} (expected potential or envelope_upper)"
            ),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    /// Checks to run (default: the full suite). Any default check left out is
    /// reported as skipped and fails the run unless `allow_partial`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<String>>,
    #[serde(default)]
    pub allow_partial: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    pub sigma: f64,
    pub gamma: f64,
    pub eta: f64,
    /// Gradient-error magnitude for the fixed-cap curves (>= 0).
    pub delta: f64,
    pub dimension: usize,
    /// Discretization floor of the exact constant-step chain (default 0).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_disc: Option<f64>,
    /// Initial envelope gap for the gap curves.
    pub gap0: f64,
    /// Curves are evaluated at k = 0..=k_max.
    pub k_max: usize,
    /// Per-step caps for the adaptive curves (default: fixed at `delta`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleSection>,
}
