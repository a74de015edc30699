//! The JSON run configuration and its resolution against flags, the
//! `EXTKIT_SEED` variable and defaults (flag > environment > file > default).

use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::catalog::ParamMap;

use super::Failure;

pub const SEED_ENV: &str = "EXTKIT_SEED";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub system: Option<String>,
    #[serde(default)]
    pub params: ParamMap,
    #[serde(default)]
    pub extension: ExtensionConfig,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub integration: IntegrationConfig,
    /// Initial or evaluation state: `[u, p_u, x…]`, or `x` for base runs.
    #[serde(default)]
    pub state: Option<Vec<f64>>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionConfig {
    pub c: Option<f64>,
    pub c0: Option<f64>,
    #[serde(rename = "C")]
    pub big_c: Option<f64>,
    #[serde(rename = "Omega")]
    pub omega: Option<f64>,
    pub m: Option<u32>,
    pub n: Option<u32>,
    pub u0: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    pub count: Option<usize>,
    pub seed: Option<u64>,
    pub margin: Option<f64>,
    pub intervals: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MethodName {
    Rk4,
    Rkf45,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationConfig {
    pub method: Option<MethodName>,
    pub dt: Option<f64>,
    pub tol: Option<f64>,
    pub t_final: Option<f64>,
    /// Integrate the base flow of `L` instead of the extended flow.
    pub base: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub report: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

/// Flags shared by the commands that act on a catalog entry.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Catalog entry id.
    #[arg(long)]
    pub system: Option<String>,
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// System parameters as a JSON object, merged over the config.
    #[arg(long, value_name = "JSON")]
    pub params: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of sampled points or states.
    #[arg(long)]
    pub count: Option<usize>,
    /// Distance kept from singular sets.
    #[arg(long)]
    pub margin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c0: Option<f64>,
    /// The constant `C` of the γ equation.
    #[arg(long = "big-c", allow_negative_numbers = true)]
    pub big_c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    pub u0: Option<f64>,
    /// State, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub state: Option<Vec<f64>>,
    /// Tolerance of the main gate.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Also write the JSON report to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

fn env_seed() -> Result<Option<u64>, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Invalid(format!("{SEED_ENV} must be an unsigned integer, got `{s}`"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Failure::Invalid(format!("{SEED_ENV}: {e}"))),
    }
}

impl RunConfig {
    pub fn from_file(path: &std::path::Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Invalid(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Invalid(format!("config {}: {e}", path.display())))
    }

    /// Loads the config file (if any) and applies the flags over it.
    pub fn load(args: &CommonArgs) -> Result<Self, Failure> {
        let mut cfg = match &args.config {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        if let Some(s) = &args.system {
            cfg.system = Some(s.clone());
        }
        if let Some(p) = &args.params {
            let extra: ParamMap = serde_json::from_str(p)
                .map_err(|e| Failure::Invalid(format!("--params must be a JSON object: {e}")))?;
            cfg.params.extend(extra);
        }
        if let Some(s) = env_seed()? {
            cfg.sampling.seed = Some(s);
        }
        let set = |dst: &mut Option<f64>, src: Option<f64>| {
            if src.is_some() {
                *dst = src;
            }
        };
        set(&mut cfg.extension.c, args.c);
        set(&mut cfg.extension.c0, args.c0);
        set(&mut cfg.extension.big_c, args.big_c);
        set(&mut cfg.extension.omega, args.omega);
        set(&mut cfg.extension.u0, args.u0);
        set(&mut cfg.sampling.margin, args.margin);
        if args.m.is_some() {
            cfg.extension.m = args.m;
        }
        if args.n.is_some() {
            cfg.extension.n = args.n;
        }
        if args.seed.is_some() {
            cfg.sampling.seed = args.seed;
        }
        if args.count.is_some() {
            cfg.sampling.count = args.count;
        }
        if let Some(s) = &args.state {
            cfg.state = Some(s.clone());
        }
        if let Some(r) = &args.report {
            cfg.output.report = Some(r.clone());
        }
        Ok(cfg)
    }

    pub fn system_id(&self) -> Result<&str, Failure> {
        self.system
            .as_deref()
            .ok_or_else(|| Failure::Invalid("no system given (use --system or the `system` config key)".into()))
    }

    pub fn seed(&self) -> u64 {
        self.sampling.seed.unwrap_or(0)
    }

    /// Moves `c`, `c0` from the extension section into the system
    /// parameters of entries that declare them.
    pub fn merged_params(&self, schema: &[&str]) -> Result<ParamMap, Failure> {
        let mut params = self.params.clone();
        for (key, value) in [("c", self.extension.c), ("c0", self.extension.c0)] {
            let Some(v) = value else { continue };
            if !schema.contains(&key) {
                continue;
            }
            match params.get(key) {
                Some(existing) if existing.as_f64() != Some(v) => {
                    return Err(Failure::Invalid(format!(
                        "conflicting values for `{key}`: {existing} in params, {v} in extension"
                    )));
                }
                _ => {
                    params.insert(key.to_string(), Value::from(v));
                }
            }
        }
        Ok(params)
    }
}
