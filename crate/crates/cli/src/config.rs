//! Run configuration: a single JSON document, with command-line flags
//! overriding individual fields. Everything is validated before any work
//! starts.

use pfaffwalk::lattice::{BoundaryMode, Configuration, RateProfile, Window};
use pfaffwalk::ContinuumVariant;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Model variant: bulk | halfspace | killed | reflected.
    pub variant: String,
    pub theta: f64,
    pub rate: RateSpec,
    pub initial: InitialSpec,
    pub window: WindowSpec,
    pub t: f64,
    pub t_list: Option<Vec<f64>>,
    pub epsilon: Option<f64>,
    pub seed: u64,
    pub trajectories: usize,
    /// Point sets for `simulate` (each ascending and distinct).
    pub points: Option<Vec<Vec<i64>>>,
    /// Interval for `gap`.
    pub interval: Option<(f64, f64)>,
    /// Scaled interval lengths for the gap table.
    pub lengths: Option<Vec<f64>>,
    pub nodes: usize,
    pub out: Option<String>,
    pub threads: Option<usize>,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            variant: "bulk".to_owned(),
            theta: 1.0,
            rate: RateSpec::default(),
            initial: InitialSpec::default(),
            window: WindowSpec { lo: -150, hi: 150 },
            t: 25.0,
            t_list: None,
            epsilon: None,
            seed: 1,
            trajectories: 10_000,
            points: None,
            interval: None,
            lengths: None,
            nodes: 128,
            out: None,
            threads: None,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RateSpec {
    /// Variant-specific defaults: unit homogeneous rates for bulk and
    /// half-space, the killed/reflected profiles otherwise.
    Default,
    Homogeneous { p: f64, q: f64 },
    Table { lo: i64, p: Vec<f64>, q: Vec<f64> },
}

impl Default for RateSpec {
    fn default() -> Self {
        RateSpec::Default
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InitialSpec {
    /// Variant-specific defaults: full occupancy (bulk, reflected),
    /// occupied on x <= 0 (halfspace), occupied on x >= 1 (killed).
    Default,
    Full,
    HalfSpace,
    Alternating,
    Empty,
    Sites { sites: Vec<i64> },
    Bernoulli { p: f64 },
}

impl Default for InitialSpec {
    fn default() -> Self {
        InitialSpec::Default
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WindowSpec {
    pub lo: i64,
    pub hi: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub pfaffian: f64,
    pub duality: f64,
    pub scaling: f64,
    pub gaps: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { pfaffian: 1e-9, duality: 1e-6, scaling: 0.05, gaps: 1e-6 }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), CliError> {
        for (name, v) in [
            ("pfaffian", self.pfaffian),
            ("duality", self.duality),
            ("scaling", self.scaling),
            ("gaps", self.gaps),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Config(format!(
                    "tolerance `{name}` must be a positive finite number, got {v}"
                )));
            }
        }
        Ok(())
    }
}

impl RunConfig {
    pub fn continuum_variant(&self) -> Result<ContinuumVariant, CliError> {
        match self.variant.as_str() {
            "bulk" => Ok(ContinuumVariant::Bulk),
            "halfspace" => Ok(ContinuumVariant::Halfspace),
            "killed" => Ok(ContinuumVariant::Killed),
            "reflected" => Ok(ContinuumVariant::Reflected),
            other => Err(CliError::Config(format!(
                "unknown variant `{other}` (expected bulk|halfspace|killed|reflected)"
            ))),
        }
    }

    pub fn boundary_mode(&self) -> Result<BoundaryMode, CliError> {
        Ok(match self.continuum_variant()? {
            ContinuumVariant::Bulk => BoundaryMode::Periodic,
            ContinuumVariant::Halfspace => BoundaryMode::Truncated,
            ContinuumVariant::Killed => BoundaryMode::KilledAtZero,
            ContinuumVariant::Reflected => BoundaryMode::ReflectedAtZero,
        })
    }

    pub fn rates(&self) -> Result<RateProfile, CliError> {
        let theta = self.theta;
        let profile = match (&self.rate, self.continuum_variant()?) {
            (RateSpec::Default, ContinuumVariant::Bulk | ContinuumVariant::Halfspace) => {
                RateProfile::homogeneous(1.0, theta)
            }
            (RateSpec::Default, ContinuumVariant::Killed) => RateProfile::killed(theta),
            (RateSpec::Default, ContinuumVariant::Reflected) => RateProfile::reflected(theta),
            (RateSpec::Homogeneous { p, q }, _) => RateProfile::asymmetric(*p, *q, theta),
            (RateSpec::Table { lo, p, q }, _) => {
                RateProfile::from_tables(*lo, p.clone(), q.clone(), theta)
            }
        };
        profile.map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn window(&self) -> Result<Window, CliError> {
        Window::new(self.window.lo, self.window.hi)
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn initial_configuration(&self) -> Result<Configuration, CliError> {
        let window = self.window()?;
        let boundary = self.boundary_mode()?;
        let build = |spec: &InitialSpec| -> Result<Configuration, pfaffwalk::lattice::LatticeError> {
            match spec {
                InitialSpec::Full => Configuration::full(window, boundary),
                InitialSpec::HalfSpace => Configuration::half_space(window, boundary),
                InitialSpec::Alternating => Configuration::alternating(window, boundary),
                InitialSpec::Empty => Configuration::empty(window, boundary),
                InitialSpec::Sites { sites } => {
                    Configuration::from_sites(window, boundary, sites)
                }
                InitialSpec::Bernoulli { p } => {
                    if !(0.0..=1.0).contains(p) {
                        return Err(pfaffwalk::lattice::LatticeError::ProbabilityOutOfRange(*p));
                    }
                    use rand::{Rng, SeedableRng};
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.seed ^ 0xb5);
                    let sites: Vec<i64> =
                        window.sites().filter(|_| rng.gen::<f64>() < *p).collect();
                    Configuration::from_sites(window, boundary, &sites)
                }
                InitialSpec::Default => match boundary {
                    BoundaryMode::Periodic | BoundaryMode::ReflectedAtZero => {
                        Configuration::full(window, boundary)
                    }
                    BoundaryMode::Truncated => Configuration::half_space(window, boundary),
                    BoundaryMode::KilledAtZero => {
                        let sites: Vec<i64> = window.sites().filter(|&x| x >= 1).collect();
                        Configuration::from_sites(window, boundary, &sites)
                    }
                },
            }
        };
        build(&self.initial).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn validate_common(&self) -> Result<(), CliError> {
        if !(0.0..=1.0).contains(&self.theta) || !self.theta.is_finite() {
            return Err(CliError::Config(format!("theta must lie in [0,1], got {}", self.theta)));
        }
        if !(self.t >= 0.0) {
            return Err(CliError::Config(format!("t must be nonnegative, got {}", self.t)));
        }
        if let Some(eps) = self.epsilon {
            if !(eps > 0.0) {
                return Err(CliError::Config(format!("epsilon must be positive, got {eps}")));
            }
        }
        self.tolerances.validate()?;
        self.continuum_variant()?;
        self.window()?;
        Ok(())
    }
}

/// Loads the config file (if given) and applies flag overrides.
pub fn resolve(
    path: Option<&str>,
    overrides: &crate::Overrides,
) -> Result<RunConfig, CliError> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read config {p}: {e}")))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("invalid config {p}: {e}")))?
        }
        None => RunConfig::default(),
    };
    if let Some(v) = overrides.theta {
        cfg.theta = v;
    }
    if let Some(v) = overrides.t {
        cfg.t = v;
    }
    if let Some(v) = overrides.epsilon {
        cfg.epsilon = Some(v);
    }
    if let Some(v) = overrides.seed {
        cfg.seed = v;
    }
    if let Some(v) = overrides.threads {
        cfg.threads = Some(v);
    }
    if let Some(v) = &overrides.out {
        cfg.out = Some(v.clone());
    }
    if let Some(v) = &overrides.variant {
        cfg.variant = v.clone();
    }
    cfg.validate_common()?;
    Ok(cfg)
}
