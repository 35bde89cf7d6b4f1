//! Run configuration: one TOML file per run, every field optional so command
//! line flags can fill in or override it.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use qecmetro::channels::LindbladSpec;
use qecmetro::codes::CodeSpec;
use qecmetro::estimation::{MPolicy, SweepMode, SweepSpec};
use qecmetro::numeric::log_space;
use qecmetro::scenario::{QfiMode, ScenarioKind, ScenarioSpec, DEFAULT_THETA};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CliError, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Seed for the randomized cross-checks in `verify`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qfi: Option<QfiConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize_time: Option<OptimizeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codes: Option<CodesConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioConfig>,
}

impl RunConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|source| CliError::Config { path: path.to_owned(), source })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
    #[default]
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

/// Takes the flag value when given, the config value otherwise.
pub fn pick<T>(flag: Option<T>, config: Option<T>) -> Option<T> {
    flag.or(config)
}

fn require<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| invalid(format!("missing required parameter `{name}`")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum QfiModel {
    DephasedGhz,
    DepolarizedGhz,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QfiConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<QfiModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

impl QfiConfig {
    pub fn merge(self, flags: QfiConfig) -> Self {
        Self { model: pick(flags.model, self.model), n: pick(flags.n, self.n), p: pick(flags.p, self.p) }
    }

    pub fn resolve(&self) -> Result<(QfiModel, u64, f64)> {
        let n = require(self.n, "N")?;
        if n == 0 {
            return Err(invalid("N must be at least 1"));
        }
        Ok((self.model.unwrap_or(QfiModel::DephasedGhz), n, require(self.p, "p")?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MPolicyName {
    Fixed,
    CeilLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SweepModeName {
    Frequency,
    Phase,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Explicit grid; overrides `n_min`/`n_max`/`points`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_values: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_min: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u64>,
    /// Log-spaced grid size between `n_min` and `n_max`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_policy: Option<MPolicyName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<SweepModeName>,
    /// Physical retention for the phase mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<bool>,
}

pub const DEFAULT_SWEEP_POINTS: usize = 20;

impl SweepConfig {
    pub fn merge(self, flags: SweepConfig) -> Self {
        // An explicit grid on either side wins over a range from the other.
        let range_flagged = flags.n_min.is_some() || flags.n_max.is_some() || flags.points.is_some();
        let n_values = match (flags.n_values, range_flagged) {
            (Some(v), _) => Some(v),
            (None, true) => None,
            (None, false) => self.n_values,
        };
        Self {
            n_values,
            n_min: pick(flags.n_min, self.n_min),
            n_max: pick(flags.n_max, self.n_max),
            points: pick(flags.points, self.points),
            m_policy: pick(flags.m_policy, self.m_policy),
            m: pick(flags.m, self.m),
            gamma: pick(flags.gamma, self.gamma),
            mode: pick(flags.mode, self.mode),
            p: pick(flags.p, self.p),
            plot: pick(flags.plot, self.plot),
        }
    }

    pub fn grid(&self) -> Result<Vec<u64>> {
        if let Some(v) = &self.n_values {
            return Ok(v.clone());
        }
        let lo = require(self.n_min, "n_min or n_values")?;
        let hi = require(self.n_max, "n_max or n_values")?;
        let points = self.points.unwrap_or(DEFAULT_SWEEP_POINTS);
        if lo == 0 || hi < lo || points == 0 {
            return Err(invalid(format!("invalid grid n_min={lo}, n_max={hi}, points={points}")));
        }
        let mut grid: Vec<u64> = if points == 1 || lo == hi {
            vec![lo]
        } else {
            log_space(lo as f64, hi as f64, points).into_iter().map(|x| (x.round() as u64).clamp(lo, hi)).collect()
        };
        grid.dedup();
        Ok(grid)
    }

    pub fn resolve(&self) -> Result<SweepSpec> {
        let m_policy = match self.m_policy.unwrap_or(MPolicyName::Fixed) {
            MPolicyName::Fixed => MPolicy::Fixed { m: require(self.m, "m")? },
            MPolicyName::CeilLog => {
                if self.m.is_some() {
                    return Err(invalid("m cannot be combined with the ceil-log policy"));
                }
                MPolicy::CeilLog
            }
        };
        let mode = match self.mode.unwrap_or(SweepModeName::Frequency) {
            SweepModeName::Frequency => {
                if self.p.is_some() {
                    return Err(invalid("p only applies to the phase mode"));
                }
                SweepMode::Frequency
            }
            SweepModeName::Phase => SweepMode::Phase { p: require(self.p, "p")? },
        };
        let spec = SweepSpec { n_values: self.grid()?, m_policy, gamma: require(self.gamma, "gamma")?, mode };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
}

impl OptimizeConfig {
    pub fn merge(self, flags: OptimizeConfig) -> Self {
        Self {
            m: pick(flags.m, self.m),
            gamma: pick(flags.gamma, self.gamma),
            n: pick(flags.n, self.n),
            t_min: pick(flags.t_min, self.t_min),
            t_max: pick(flags.t_max, self.t_max),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodesConfig {
    /// Physical retention values for the repetition-code table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<usize>>,
    /// No-error probabilities for the five-qubit concatenation table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
}

impl CodesConfig {
    pub fn merge(self, flags: CodesConfig) -> Self {
        Self {
            p: pick(flags.p, self.p),
            m: pick(flags.m, self.m),
            q: pick(flags.q, self.q),
            levels: pick(flags.levels, self.levels),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<String>>,
    /// Block sizes for the mapping check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<usize>>,
    /// Replaces every check's own tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl VerifyConfig {
    pub fn merge(self, flags: VerifyConfig) -> Self {
        Self {
            checks: pick(flags.checks, self.checks),
            m: pick(flags.m, self.m),
            tolerance: pick(flags.tolerance, self.tolerance),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKindName {
    IDephasing,
    ILocalNoise,
    Ii,
    TwoQubitDemo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CodeName {
    Repetition,
    FiveQubit,
    Concatenated,
    TwoQubit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseName {
    Dephasing,
    Transversal,
    Depolarizing,
    /// Weights from `mu_x`, `mu_y`, `mu_z`.
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    Phase,
    Frequency,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ScenarioKindName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_blocks: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<CodeName>,
    /// Repetition block size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Concatenation depth.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_y: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_z: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trotter_steps: Option<usize>,
}

impl ScenarioConfig {
    pub fn merge(self, flags: ScenarioConfig) -> Self {
        Self {
            kind: pick(flags.kind, self.kind),
            n_blocks: pick(flags.n_blocks, self.n_blocks),
            code: pick(flags.code, self.code),
            m: pick(flags.m, self.m),
            levels: pick(flags.levels, self.levels),
            noise: pick(flags.noise, self.noise),
            gamma: pick(flags.gamma, self.gamma),
            mu_x: pick(flags.mu_x, self.mu_x),
            mu_y: pick(flags.mu_y, self.mu_y),
            mu_z: pick(flags.mu_z, self.mu_z),
            t: pick(flags.t, self.t),
            theta: pick(flags.theta, self.theta),
            mode: pick(flags.mode, self.mode),
            trotter_steps: pick(flags.trotter_steps, self.trotter_steps),
        }
    }

    pub fn resolve(&self) -> Result<ScenarioSpec> {
        let kind = match require(self.kind, "kind")? {
            ScenarioKindName::IDephasing => ScenarioKind::IDephasing,
            ScenarioKindName::ILocalNoise => ScenarioKind::ILocalNoise,
            ScenarioKindName::Ii => ScenarioKind::II,
            ScenarioKindName::TwoQubitDemo => ScenarioKind::TwoQubitDemo,
        };
        let default_code = match kind {
            ScenarioKind::IDephasing | ScenarioKind::II => CodeName::Repetition,
            ScenarioKind::ILocalNoise => CodeName::FiveQubit,
            ScenarioKind::TwoQubitDemo => CodeName::TwoQubit,
        };
        let code = match self.code.unwrap_or(default_code) {
            CodeName::Repetition => CodeSpec::repetition(require(self.m, "m")?)?,
            CodeName::FiveQubit => CodeSpec::FiveQubitGraph,
            CodeName::Concatenated => CodeSpec::Concatenated { levels: require(self.levels, "levels")? },
            CodeName::TwoQubit => CodeSpec::TwoQubitDemo,
        };
        let default_noise = match kind {
            ScenarioKind::IDephasing => NoiseName::Dephasing,
            ScenarioKind::ILocalNoise => NoiseName::Depolarizing,
            ScenarioKind::II | ScenarioKind::TwoQubitDemo => NoiseName::Transversal,
        };
        let gamma = require(self.gamma, "gamma")?;
        let noise_name = self.noise.unwrap_or(default_noise);
        if noise_name != NoiseName::Custom && (self.mu_x.is_some() || self.mu_y.is_some() || self.mu_z.is_some()) {
            return Err(invalid("mu weights need noise = \"custom\""));
        }
        let noise = match noise_name {
            NoiseName::Dephasing => LindbladSpec::dephasing(gamma)?,
            NoiseName::Transversal => LindbladSpec::transversal(gamma)?,
            NoiseName::Depolarizing => LindbladSpec::depolarizing(gamma)?,
            NoiseName::Custom => {
                LindbladSpec::new(gamma, self.mu_x.unwrap_or(0.0), self.mu_y.unwrap_or(0.0), self.mu_z.unwrap_or(0.0))?
            }
        };
        let spec = ScenarioSpec {
            kind,
            n_blocks: require(self.n_blocks, "n_blocks")?,
            code,
            noise,
            t: require(self.t, "t")?,
            theta: self.theta.unwrap_or(DEFAULT_THETA),
            mode: match self.mode.unwrap_or(ModeName::Phase) {
                ModeName::Phase => QfiMode::Phase,
                ModeName::Frequency => QfiMode::Frequency,
            },
            trotter_steps: self.trotter_steps.unwrap_or(1),
        };
        spec.validate()?;
        Ok(spec)
    }
}
