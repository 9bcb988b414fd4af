use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use netform_core::{DynamicsConfig, GameName, Rule};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::presets;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Args(#[from] clap::Error),
    #[error("cannot read config file {path}: {source}")]
    UnreadableFile {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config file {path}: {message}")]
    BadFile { path: PathBuf, message: String },
    #[error("invalid value {value} for `{key}`: expected {expected}")]
    OutOfRange {
        key: &'static str,
        value: String,
        expected: &'static str,
    },
    #[error("invalid `{key}`: {message}")]
    Invalid { key: &'static str, message: String },
    #[error("unknown preset `{0}` (see `netform list-presets`)")]
    UnknownPreset(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Friends1,
    Friends2,
    Enemies1,
    Enemies2,
    Staghunt,
}

impl Model {
    pub fn game(self) -> GameName {
        match self {
            Model::Friends1 => GameName::FriendsI,
            Model::Friends2 => GameName::FriendsII,
            Model::Enemies1 => GameName::EnemiesI,
            Model::Enemies2 => GameName::EnemiesII,
            Model::Staghunt => GameName::StagHunt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum RuleName {
    Linear,
    Resistance,
    Loglik,
    Transfer,
}

impl From<RuleName> for Rule {
    fn from(r: RuleName) -> Rule {
        match r {
            RuleName::Linear => Rule::Linear,
            RuleName::Resistance => Rule::Resistance,
            RuleName::Loglik => Rule::LogLikelihood,
            RuleName::Transfer => Rule::Transfer,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Everything needed to run and record one ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub model: Model,
    /// Update rule; `None` uses the model's usual rule.
    pub rule: Option<RuleName>,
    pub agents: usize,
    pub rounds: usize,
    pub runs: usize,
    pub seed: u64,
    pub discount: f64,
    pub noise: f64,
    pub revision_prob: f64,
    pub init_weight: f64,
    /// `None` means `1/(4n)`.
    pub graph_eps: Option<f64>,
    pub fixation_tol: f64,
    /// `None` means one snapshot per hundredth of the horizon.
    pub stride: Option<usize>,
    pub out: PathBuf,
    pub format: Format,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: Model::Friends1,
            rule: None,
            agents: 3,
            rounds: 1000,
            runs: 100,
            seed: 0,
            discount: 1.0,
            noise: 0.0,
            revision_prob: 0.0,
            init_weight: 1.0,
            graph_eps: None,
            fixation_tol: netform_core::analysis::DEFAULT_FIXATION_TOL,
            stride: None,
            out: PathBuf::from("netform-out"),
            format: Format::Csv,
        }
    }
}

impl ExperimentConfig {
    pub fn game(&self) -> GameName {
        self.model.game()
    }

    pub fn rule(&self) -> Rule {
        self.rule
            .map(Rule::from)
            .unwrap_or(self.game().default_rule())
    }

    pub fn dynamics(&self) -> DynamicsConfig {
        DynamicsConfig {
            rule: self.rule(),
            discount: self.discount,
            noise: self.noise,
            revision_prob: self.revision_prob,
            graph_eps: self.graph_eps,
            initial_weight: self.init_weight,
        }
    }

    pub fn graph_eps(&self) -> f64 {
        self.dynamics().graph_eps(self.agents)
    }

    pub fn stride(&self) -> usize {
        self.stride.unwrap_or((self.rounds / 100).max(1))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        fn range(
            key: &'static str,
            value: f64,
            ok: bool,
            expected: &'static str,
        ) -> Result<(), ConfigError> {
            if ok {
                Ok(())
            } else {
                Err(ConfigError::OutOfRange {
                    key,
                    value: value.to_string(),
                    expected,
                })
            }
        }
        let n = self.agents;
        if n < 2 {
            return Err(ConfigError::OutOfRange {
                key: "agents",
                value: n.to_string(),
                expected: "at least 2",
            });
        }
        if self.runs == 0 {
            return Err(ConfigError::OutOfRange {
                key: "runs",
                value: "0".into(),
                expected: "at least 1",
            });
        }
        if self.stride == Some(0) {
            return Err(ConfigError::OutOfRange {
                key: "stride",
                value: "0".into(),
                expected: "at least 1",
            });
        }
        let d = self.discount;
        range("discount", d, d > 0.0 && d <= 1.0, "a value in (0, 1]")?;
        let e = self.noise;
        range("noise", e, (0.0..1.0).contains(&e), "a value in [0, 1)")?;
        let q = self.revision_prob;
        range(
            "revision-prob",
            q,
            (0.0..=1.0).contains(&q),
            "a value in [0, 1]",
        )?;
        let w0 = self.init_weight;
        range(
            "init-weight",
            w0,
            w0 > 0.0 && w0.is_finite(),
            "a positive number",
        )?;
        if let Some(g) = self.graph_eps {
            let max = 1.0 / (2.0 * n as f64);
            range("graph-eps", g, g > 0.0 && g < max, "a value in (0, 1/(2n))")?;
        }
        let t = self.fixation_tol;
        range("fixation-tol", t, t > 0.0 && t < 0.5, "a value in (0, 0.5)")?;
        self.dynamics()
            .validate(n)
            .map_err(|e| ConfigError::Invalid {
                key: "rule",
                message: e.to_string(),
            })
    }
}

/// Config-file keys; every field is optional and unknown keys are errors.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<Model>,
    pub rule: Option<RuleName>,
    pub agents: Option<usize>,
    pub rounds: Option<usize>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub discount: Option<f64>,
    pub noise: Option<f64>,
    pub revision_prob: Option<f64>,
    pub init_weight: Option<f64>,
    pub graph_eps: Option<f64>,
    pub fixation_tol: Option<f64>,
    pub stride: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::UnreadableFile {
            path: path.to_owned(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| ConfigError::BadFile {
            path: path.to_owned(),
            message: e.message().to_string(),
        })
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML file with any of the flag names below as keys.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    #[arg(long, value_enum)]
    pub rule: Option<RuleName>,
    #[arg(long)]
    pub agents: Option<usize>,
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    pub discount: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub noise: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub revision_prob: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub init_weight: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub graph_eps: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub fixation_tol: Option<f64>,
    #[arg(long)]
    pub stride: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

macro_rules! layer {
    ($cfg:ident, $src:expr, $($field:ident),*) => {
        $(if let Some(v) = $src.$field.clone() { $cfg.$field = v; })*
    };
}

macro_rules! layer_opt {
    ($cfg:ident, $src:expr, $($field:ident),*) => {
        $(if let Some(v) = $src.$field.clone() { $cfg.$field = Some(v); })*
    };
}

impl Overrides {
    /// Applies the config file (if any), then the flags, on top of `base`.
    pub fn apply(&self, mut cfg: ExperimentConfig) -> Result<ExperimentConfig, ConfigError> {
        if let Some(path) = &self.config {
            let file = FileConfig::load(path)?;
            layer!(
                cfg,
                file,
                model,
                agents,
                rounds,
                runs,
                seed,
                discount,
                noise,
                revision_prob,
                init_weight,
                fixation_tol,
                out,
                format
            );
            layer_opt!(cfg, file, rule, graph_eps, stride);
        }
        layer!(
            cfg,
            self,
            model,
            agents,
            rounds,
            runs,
            seed,
            discount,
            noise,
            revision_prob,
            init_weight,
            fixation_tol,
            out,
            format
        );
        layer_opt!(cfg, self, rule, graph_eps, stride);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "netform",
    version,
    about = "Simulate social networks formed by reinforcement"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Run an ensemble from explicit settings.
    Run(Overrides),
    /// Run a named experiment, optionally overriding its settings.
    Preset {
        name: String,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print the available presets.
    ListPresets,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Run(ExperimentConfig),
    Preset {
        name: &'static str,
        config: ExperimentConfig,
    },
    ListPresets,
}

/// Parses an argument list (without the program name).
pub fn parse_config<I, S>(args: I) -> Result<Command, ConfigError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once("netform".into()).chain(args.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(argv)?;
    match cli.command {
        CliCommand::Run(o) => Ok(Command::Run(o.apply(ExperimentConfig::default())?)),
        CliCommand::Preset { name, overrides } => {
            let preset = presets::find(&name).ok_or(ConfigError::UnknownPreset(name))?;
            Ok(Command::Preset {
                name: preset.name,
                config: overrides.apply(preset.config())?,
            })
        }
        CliCommand::ListPresets => Ok(Command::ListPresets),
    }
}
