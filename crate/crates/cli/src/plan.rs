//! Run plans: the flag grammar, the TOML configuration document, and their
//! merge into a fully resolved [`RunPlan`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use optstate_core::basins::Grid;
use optstate_core::parse::parse_point;
use optstate_core::scenarios::{build_scenario, Scenario};
use optstate_core::verify::Check;

pub const DEFAULT_SCENARIO: &str = "doubling-basic";
pub const DEFAULT_HORIZON: usize = 100_000;
pub const DEFAULT_EPSILONS: [f64; 3] = [0.2, 0.1, 0.05];
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_OUT: &str = "optstate-out";
pub const OUT_ENV: &str = "OPTSTATE_OUT";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Orbit points of --x0.
    Orbit,
    /// Growth-rate series of --potential at --x0.
    Growth,
    /// Optimal-point scan of --potential over a grid.
    ScanGrowth,
    /// Weak or strong basin scan of --mu, one per epsilon.
    Basin,
    /// Visit-frequency scan of --attractor, one per epsilon.
    Milnor,
    /// Basin fractions of --mu across the epsilon list.
    Observability,
    /// Verification suites (--checks), on the scenario's potentials or on
    /// --potential.
    Verify,
    /// Weak* distance between --mu and --nu.
    Distance,
    /// List the registered scenarios.
    Describe,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Orbit => "orbit",
            Command::Growth => "growth",
            Command::ScanGrowth => "scan-growth",
            Command::Basin => "basin",
            Command::Milnor => "milnor",
            Command::Observability => "observability",
            Command::Verify => "verify",
            Command::Distance => "distance",
            Command::Describe => "describe",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// CSV data files plus a summary document.
    Csv,
    /// A single summary document with the tables folded in.
    Doc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Strong,
    Weak,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Strong => "strong",
            Mode::Weak => "weak",
        }
    }
}

/// The configuration document. Every key is optional; unknown keys are
/// rejected.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    pub command: Option<Command>,
    pub scenario: Option<String>,
    pub potential: Option<String>,
    pub mu: Option<String>,
    pub nu: Option<String>,
    pub x0: Option<String>,
    pub attractor: Option<String>,
    pub mode: Option<Mode>,
    pub n: Option<usize>,
    pub epsilon: Option<Vec<f64>>,
    pub grid_resolution: Option<usize>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub checks: Option<Vec<String>>,
    pub params: Option<BTreeMap<String, f64>>,
}

impl ConfigDoc {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    /// `self` with every key set in `over` replaced; scenario parameters
    /// merge key by key.
    pub fn overlay(self, over: ConfigDoc) -> ConfigDoc {
        let params = match (self.params, over.params) {
            (Some(mut a), Some(b)) => {
                a.extend(b);
                Some(a)
            }
            (a, b) => b.or(a),
        };
        ConfigDoc {
            command: over.command.or(self.command),
            scenario: over.scenario.or(self.scenario),
            potential: over.potential.or(self.potential),
            mu: over.mu.or(self.mu),
            nu: over.nu.or(self.nu),
            x0: over.x0.or(self.x0),
            attractor: over.attractor.or(self.attractor),
            mode: over.mode.or(self.mode),
            n: over.n.or(self.n),
            epsilon: over.epsilon.or(self.epsilon),
            grid_resolution: over.grid_resolution.or(self.grid_resolution),
            workers: over.workers.or(self.workers),
            seed: over.seed.or(self.seed),
            out: over.out.or(self.out),
            format: over.format.or(self.format),
            checks: over.checks.or(self.checks),
            params,
        }
    }
}

/// Command-line flags. Flags override the `--config` document.
#[derive(Clone, Debug, Parser)]
#[command(
    name = "optstate",
    version,
    about = "Growth rates, weak* basins and optimal-state scans"
)]
pub struct Cli {
    /// Command to run; may instead be set by `command` in the config.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// TOML configuration document.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub scenario: Option<String>,
    /// Scenario parameter, repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
    /// Potential spec: birkhoff:<g>, cocycle:<family>, neg:<spec>, trunc:<spec>.
    #[arg(long)]
    pub potential: Option<String>,
    /// Measure name or spec: dirac:<x>, orbit:<x>,<period>, lebesgue, mix:<c>*<spec>+...
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<String>,
    /// Base point, comma-separated coordinates (`p/q` is exact on the circle).
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    /// Attractor name for `milnor`.
    #[arg(long)]
    pub attractor: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Horizon in map steps.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated scales.
    #[arg(long, value_delimiter = ',')]
    pub epsilon: Option<Vec<f64>>,
    /// Grid resolution.
    #[arg(long = "grid")]
    pub grid_resolution: Option<usize>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (default: $OPTSTATE_OUT, else ./optstate-out).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Comma-separated verification suites.
    #[arg(long, value_delimiter = ',')]
    pub checks: Option<Vec<String>>,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected KEY=VALUE, got {s:?}"))?;
    let v = optstate_core::parse::parse_real(v).ok_or_else(|| format!("invalid number {v:?}"))?;
    Ok((k.trim().to_string(), v))
}

impl Cli {
    fn into_doc(self) -> ConfigDoc {
        ConfigDoc {
            command: self.command,
            scenario: self.scenario,
            potential: self.potential,
            mu: self.mu,
            nu: self.nu,
            x0: self.x0,
            attractor: self.attractor,
            mode: self.mode,
            n: self.n,
            epsilon: self.epsilon,
            grid_resolution: self.grid_resolution,
            workers: self.workers,
            seed: self.seed,
            out: self.out,
            format: self.format,
            checks: self.checks,
            params: (!self.params.is_empty()).then(|| self.params.into_iter().collect()),
        }
    }

    /// Loads the config document (if any), applies the flags on top and
    /// resolves the result.
    pub fn into_plan(self) -> Result<RunPlan> {
        let base = match &self.config {
            Some(path) => ConfigDoc::load(path)?,
            None => ConfigDoc::default(),
        };
        let env_out = std::env::var_os(OUT_ENV).map(PathBuf::from);
        RunPlan::resolve(base.overlay(self.into_doc()), env_out)
    }
}

/// A fully resolved run. Serialized as the `plan.toml` echo, which parses
/// back to the identical plan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunPlan {
    pub command: Command,
    pub scenario: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attractor: Option<String>,
    pub mode: Mode,
    pub n: usize,
    pub epsilon: Vec<f64>,
    pub grid_resolution: usize,
    pub workers: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub format: Format,
    pub checks: Vec<String>,
    pub params: BTreeMap<String, f64>,
}

impl RunPlan {
    /// Fills defaults and checks every name against the registries.
    /// `env_out` is the output directory from the environment, used when
    /// neither the document nor the flags set one.
    pub fn resolve(doc: ConfigDoc, env_out: Option<PathBuf>) -> Result<RunPlan> {
        let Some(command) = doc.command else {
            bail!("no command given (expected one of orbit, growth, scan-growth, basin, milnor, observability, verify, distance, describe)");
        };
        let plan = RunPlan {
            command,
            scenario: doc.scenario.unwrap_or_else(|| DEFAULT_SCENARIO.into()),
            potential: doc.potential,
            mu: doc.mu,
            nu: doc.nu,
            x0: doc.x0,
            attractor: doc.attractor,
            mode: doc.mode.unwrap_or(Mode::Weak),
            n: doc.n.unwrap_or(DEFAULT_HORIZON),
            epsilon: doc.epsilon.unwrap_or_else(|| DEFAULT_EPSILONS.to_vec()),
            grid_resolution: 0,
            workers: doc.workers.unwrap_or_else(default_workers),
            seed: doc.seed.unwrap_or(DEFAULT_SEED),
            out: doc.out.or(env_out).unwrap_or_else(|| DEFAULT_OUT.into()),
            format: doc.format.unwrap_or(Format::Csv),
            checks: doc
                .checks
                .unwrap_or_else(|| Check::ALL.iter().map(|c| c.name().to_string()).collect()),
            params: doc.params.unwrap_or_default(),
        };
        let scenario = plan.build_scenario()?;
        let plan = RunPlan {
            grid_resolution: doc
                .grid_resolution
                .unwrap_or_else(|| Grid::default_resolution(scenario.system.space())),
            ..plan
        };
        plan.validate(&scenario)?;
        Ok(plan)
    }

    pub fn build_scenario(&self) -> Result<Scenario> {
        let params: Vec<(String, f64)> = self.params.clone().into_iter().collect();
        Ok(build_scenario(&self.scenario, &params)?)
    }

    fn validate(&self, s: &Scenario) -> Result<()> {
        if self.n == 0 {
            bail!("n must be at least 1");
        }
        if self.workers == 0 {
            bail!("workers must be at least 1");
        }
        if self.epsilon.is_empty() || self.epsilon.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
            bail!("epsilon must be a non-empty list of positive numbers");
        }
        if self.grid_resolution < 2 {
            bail!("grid resolution must be at least 2");
        }
        for c in &self.checks {
            c.parse::<Check>()?;
        }
        if let Some(p) = &self.potential {
            s.potential(p)?;
        }
        for m in [&self.mu, &self.nu].into_iter().flatten() {
            s.measure(m)?;
        }
        if let Some(a) = &self.attractor {
            s.attractor(a)?;
        }
        if let Some(x) = &self.x0 {
            parse_point(x, s.system.space(), x, 0)?;
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plan serializes")
    }

    pub fn from_toml(text: &str) -> Result<RunPlan> {
        RunPlan::resolve(ConfigDoc::parse(text)?, None)
    }

    /// Plan keys echoed into every summary document: everything except the
    /// worker count and output location, which do not affect results.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("command".to_string(), self.command.name().to_string()),
            ("scenario".to_string(), self.scenario.clone()),
        ];
        for (k, v) in &self.params {
            out.push((format!("param.{k}"), v.to_string()));
        }
        let optional = [
            ("potential", &self.potential),
            ("mu", &self.mu),
            ("nu", &self.nu),
            ("x0", &self.x0),
            ("attractor", &self.attractor),
        ];
        for (k, v) in optional {
            if let Some(v) = v {
                out.push((k.to_string(), v.clone()));
            }
        }
        let eps: Vec<String> = self.epsilon.iter().map(|e| e.to_string()).collect();
        out.extend([
            ("mode".to_string(), self.mode.name().to_string()),
            ("n".to_string(), self.n.to_string()),
            ("epsilon_list".to_string(), eps.join(",")),
            (
                "grid_resolution".to_string(),
                self.grid_resolution.to_string(),
            ),
            ("checks".to_string(), self.checks.join(",")),
            ("seed".to_string(), self.seed.to_string()),
        ]);
        out
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
