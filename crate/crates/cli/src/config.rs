//! Run configuration: a flat TOML file, overridden key by key by flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use qedlat::{ChainSpec, HorizonPolicy, HorizonRule, TimeStep};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SEED_ENV: &str = "QEDLAT_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HorizonMode {
    /// Light cone of the configured chain, raised to the release time.
    Auto,
    LightCone,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HorizonSetting {
    Time(f64),
    Mode(HorizonMode),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepMode {
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepSetting {
    Step(f64),
    Mode(StepMode),
}

impl FromStr for HorizonSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(Self::Mode(HorizonMode::Auto)),
            "light-cone" => Ok(Self::Mode(HorizonMode::LightCone)),
            _ => s
                .parse()
                .map(Self::Time)
                .map_err(|_| format!("expected 'auto', 'light-cone' or a time, got '{s}'")),
        }
    }
}

impl FromStr for StepSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(Self::Mode(StepMode::Auto)),
            _ => s
                .parse()
                .map(Self::Step)
                .map_err(|_| format!("expected 'auto' or a time step, got '{s}'")),
        }
    }
}

/// Everything a run needs. Energies in units of the hopping rate `J`, times
/// in `1/J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub cavities: usize,
    pub g: Vec<f64>,
    pub sigma: Vec<f64>,
    /// `omega_a - omega0`.
    pub detuning: f64,
    pub realizations: usize,
    /// Realization index used by `single`.
    pub realization: usize,
    pub horizon: HorizonSetting,
    pub dt: StepSetting,
    pub seed: Option<u64>,
    pub workers: usize,
    pub epsilon: f64,
    pub margin: usize,
    pub horizon_cap: f64,
    pub overlap_floor: f64,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let policy = HorizonPolicy::default();
        Self {
            cavities: 601,
            g: vec![0.1],
            sigma: vec![0.0],
            detuning: 0.0,
            realizations: 200,
            realization: 0,
            horizon: HorizonSetting::Mode(HorizonMode::Auto),
            dt: StepSetting::Mode(StepMode::Auto),
            seed: None,
            workers: 0,
            epsilon: policy.epsilon_rel,
            margin: policy.margin,
            horizon_cap: policy.cap,
            overlap_floor: policy.overlap_floor,
            out: PathBuf::from("out"),
        }
    }
}

/// Command-line values that replace file values when present.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Flat TOML configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Disorder strength(s), comma separated
    #[arg(long, value_delimiter = ',')]
    pub sigma: Option<Vec<f64>>,
    /// Atom-cavity coupling(s), comma separated
    #[arg(long, value_delimiter = ',')]
    pub g: Option<Vec<f64>>,
    /// Total number of cavities (odd)
    #[arg(long)]
    pub cavities: Option<usize>,
    #[arg(long)]
    pub realizations: Option<usize>,
    /// Realization index for `single`
    #[arg(long)]
    pub realization: Option<usize>,
    /// 'auto', 'light-cone' or a time in 1/J
    #[arg(long)]
    pub horizon: Option<HorizonSetting>,
    /// 'auto' or a time step in 1/J
    #[arg(long)]
    pub dt: Option<StepSetting>,
    /// Master seed (falls back to the config file, then $QEDLAT_SEED, then 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = one per core)
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    #[cfg(test)]
    pub fn emit(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    /// File (if any) then flags; the environment seed only fills a gap.
    pub fn resolve(ov: &Overrides, env_seed: Option<String>) -> Result<Self, CliError> {
        let mut cfg = match &ov.config {
            Some(path) => Self::load(path)?,
            None => Self::default(),
        };
        if let Some(v) = &ov.sigma {
            cfg.sigma = v.clone();
        }
        if let Some(v) = &ov.g {
            cfg.g = v.clone();
        }
        macro_rules! take {
            ($($field:ident),*) => { $(if let Some(v) = ov.$field.clone() { cfg.$field = v; })* };
        }
        take!(cavities, realizations, realization, horizon, dt, workers, out);
        if ov.seed.is_some() {
            cfg.seed = ov.seed;
        }
        if cfg.seed.is_none() {
            if let Some(s) = env_seed {
                let seed = s
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Config(format!("{SEED_ENV}='{s}' is not a u64")))?;
                cfg.seed = Some(seed);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        self.template()?;
        if self.g.is_empty() || self.sigma.is_empty() {
            return bad("g and sigma need at least one value".into());
        }
        if self.g.iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
            return bad(format!("g values must be non-negative: {:?}", self.g));
        }
        if self.sigma.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
            return bad(format!("sigma values must be non-negative: {:?}", self.sigma));
        }
        if self.realizations == 0 {
            return bad("realizations must be >= 1".into());
        }
        if let HorizonSetting::Time(t) = self.horizon {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("horizon must be positive, got {t}"));
            }
        }
        if let StepSetting::Step(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("dt must be positive, got {dt}"));
            }
        }
        if !(self.epsilon > 0.0) || !(self.horizon_cap > 0.0) || !(self.overlap_floor >= 0.0) {
            return bad("epsilon and horizon_cap must be positive, overlap_floor non-negative".into());
        }
        Ok(())
    }

    pub fn master_seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Chain with unit hopping, `omega0 = 0`, and coupling 0 (set per run).
    pub fn template(&self) -> Result<ChainSpec, CliError> {
        ChainSpec::new(self.cavities, 1.0, 0.0, 0.0, self.detuning).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn policy(&self) -> HorizonPolicy {
        HorizonPolicy {
            epsilon_rel: self.epsilon,
            cap: self.horizon_cap,
            margin: self.margin,
            overlap_floor: self.overlap_floor,
            ..HorizonPolicy::default()
        }
    }

    pub fn horizon_rule(&self) -> HorizonRule {
        match self.horizon {
            HorizonSetting::Time(t) => HorizonRule::Fixed(t),
            HorizonSetting::Mode(HorizonMode::LightCone) => HorizonRule::LightCone,
            HorizonSetting::Mode(HorizonMode::Auto) => HorizonRule::Release(self.policy()),
        }
    }

    pub fn time_step(&self) -> TimeStep {
        match self.dt {
            StepSetting::Step(dt) => TimeStep::Fixed(dt),
            StepSetting::Mode(StepMode::Auto) => TimeStep::Auto,
        }
    }

    /// The one `(sigma, g)` pair of a single-point command.
    pub fn single_point(&self) -> Result<(f64, f64), CliError> {
        match (self.sigma.as_slice(), self.g.as_slice()) {
            ([s], [g]) => Ok((*s, *g)),
            _ => Err(CliError::Config(format!(
                "this command takes exactly one sigma and one g, got {:?} and {:?}",
                self.sigma, self.g
            ))),
        }
    }
}
