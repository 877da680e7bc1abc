use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use super::HarnessError;
use crate::domain::{PeriodicDomain, Rule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exactness,
    Converge,
    Bounds,
    Identities,
}

impl FromStr for Mode {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "EXACTNESS" => Ok(Mode::Exactness),
            "CONVERGE" => Ok(Mode::Converge),
            "BOUNDS" => Ok(Mode::Bounds),
            "IDENTITIES" => Ok(Mode::Identities),
            _ => Err(HarnessError::Config(format!("unknown mode {s:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exactness => "EXACTNESS",
            Mode::Converge => "CONVERGE",
            Mode::Bounds => "BOUNDS",
            Mode::Identities => "IDENTITIES",
        })
    }
}

/// The smooth factor `u` a run integrates against the kernel.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    /// `e_m`; `None` sweeps `|m| <= n - 1` in exactness runs.
    Eigen {
        m: Option<i64>,
    },
    TrigPoly {
        seed: u64,
        degree: usize,
        realify: bool,
    },
    Runge {
        rho: f64,
    },
    /// Samples `x, u_re[, u_im]` on a uniform grid over `[a, b)`.
    Samples {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivChoice {
    Exact,
    Spectral,
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub domain: PeriodicDomain,
    pub rules: Vec<Rule>,
    pub n_list: Vec<usize>,
    pub function: FunctionSpec,
    /// Absolute offsets of the working lines; empty means "use `tau_frac`".
    pub tau_list: Vec<f64>,
    /// Working lines as fractions of the strip half-width.
    pub tau_frac: Vec<f64>,
    pub n_spectral: usize,
    pub deriv: DerivChoice,
    pub out_path: Option<PathBuf>,
}

/// Flat, all-optional configuration as read from JSON or assembled from
/// command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub mode: Option<String>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub period: Option<f64>,
    pub t: Option<f64>,
    pub rules: Option<Vec<String>>,
    pub n_list: Option<Vec<usize>>,
    pub function: Option<String>,
    pub m: Option<i64>,
    pub seed: Option<u64>,
    pub degree: Option<usize>,
    pub realify: Option<bool>,
    pub rho: Option<f64>,
    pub samples: Option<PathBuf>,
    pub tau_list: Option<Vec<f64>>,
    pub tau_frac: Option<Vec<f64>>,
    pub n_spectral: Option<usize>,
    pub deriv: Option<String>,
    pub out: Option<PathBuf>,
}

macro_rules! overlay_fields {
    ($base:ident, $top:ident, $($field:ident),*) => {
        RawConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RawConfig {
    pub fn from_json_str(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text)
            .map_err(|e| HarnessError::Config(format!("bad config JSON: {e}")))
    }

    pub fn from_json_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json_str(&text)
    }

    /// Fields set in `top` win over fields set in `self`.
    pub fn overlay(self, top: RawConfig) -> RawConfig {
        let base = self;
        overlay_fields!(
            base, top, mode, a, b, period, t, rules, n_list, function, m, seed, degree, realify,
            rho, samples, tau_list, tau_frac, n_spectral, deriv, out
        )
    }

    pub fn resolve(self) -> Result<RunConfig, HarnessError> {
        let mode: Mode = self
            .mode
            .as_deref()
            .ok_or_else(|| HarnessError::Config("mode is required".into()))?
            .parse()?;

        let a = self.a.unwrap_or(0.0);
        let domain = match (self.b, self.period) {
            (Some(_), Some(_)) => {
                return Err(HarnessError::Config(
                    "give either b or period, not both".into(),
                ))
            }
            (Some(b), None) => PeriodicDomain::new(a, b, self.t.unwrap_or(a + 0.3 * (b - a)))?,
            (None, period) => {
                let period = period.unwrap_or(1.0);
                PeriodicDomain::with_period(a, period, self.t.unwrap_or(a + 0.3 * period))?
            }
        };

        let rules = match self.rules {
            None => vec![Rule::S2],
            Some(names) => {
                let mut rules = Vec::new();
                for name in names.iter().flat_map(|s| s.split(',')) {
                    let rule: Rule = name
                        .trim()
                        .parse()
                        .map_err(|_| HarnessError::Config(format!("unknown rule {name:?}")))?;
                    if rule == Rule::Trap {
                        return Err(HarnessError::Config(
                            "TRAP is not a supersingular rule".into(),
                        ));
                    }
                    if !rules.contains(&rule) {
                        rules.push(rule);
                    }
                }
                if rules.is_empty() {
                    return Err(HarnessError::Config("rule list is empty".into()));
                }
                rules.sort();
                rules
            }
        };

        let n_list = self.n_list.unwrap_or_else(|| default_n_list(mode));
        check_n_list(&n_list)?;

        let function = match self.function.as_deref().map(str::to_ascii_uppercase) {
            None if mode == Mode::Exactness => FunctionSpec::Eigen { m: self.m },
            None => FunctionSpec::Runge {
                rho: self.rho.unwrap_or(1.25),
            },
            Some(name) => match name.as_str() {
                "EIGEN" => FunctionSpec::Eigen { m: self.m },
                "TRIGPOLY" => FunctionSpec::TrigPoly {
                    seed: self.seed.unwrap_or(0),
                    degree: self
                        .degree
                        .ok_or_else(|| HarnessError::Config("TRIGPOLY needs degree".into()))?,
                    realify: self.realify.unwrap_or(false),
                },
                "RUNGE" => FunctionSpec::Runge {
                    rho: self.rho.unwrap_or(1.25),
                },
                "SAMPLES" => FunctionSpec::Samples {
                    path: self.samples.ok_or_else(|| {
                        HarnessError::Config("SAMPLES needs a samples path".into())
                    })?,
                },
                other => return Err(HarnessError::Config(format!("unknown function {other:?}"))),
            },
        };

        let n_spectral = self.n_spectral.unwrap_or(256);
        if n_spectral < 8 || n_spectral % 2 != 0 {
            return Err(HarnessError::Config(format!(
                "n_spectral must be even and >= 8, got {n_spectral}"
            )));
        }

        let deriv = match self
            .deriv
            .as_deref()
            .map(str::to_ascii_uppercase)
            .as_deref()
        {
            None | Some("EXACT") => DerivChoice::Exact,
            Some("SPECTRAL") => DerivChoice::Spectral,
            Some(other) => return Err(HarnessError::Config(format!("unknown deriv {other:?}"))),
        };

        let mut tau_list = self.tau_list.unwrap_or_default();
        tau_list.sort_by(f64::total_cmp);
        let mut tau_frac = self.tau_frac.unwrap_or_default();
        tau_frac.sort_by(f64::total_cmp);
        if !tau_list.is_empty() && !tau_frac.is_empty() {
            return Err(HarnessError::Config(
                "give either tau_list or tau_frac, not both".into(),
            ));
        }

        Ok(RunConfig {
            mode,
            domain,
            rules,
            n_list,
            function,
            tau_list,
            tau_frac,
            n_spectral,
            deriv,
            out_path: self.out,
        })
    }
}

fn default_n_list(mode: Mode) -> Vec<usize> {
    match mode {
        Mode::Exactness => vec![2, 4, 8, 16, 32],
        Mode::Converge => (4..=64).step_by(2).collect(),
        Mode::Bounds => vec![4, 8, 16, 32, 64],
        Mode::Identities => (2..=64).collect(),
    }
}

fn check_n_list(n_list: &[usize]) -> Result<(), HarnessError> {
    if n_list.is_empty() {
        return Err(HarnessError::Config("n_list is empty".into()));
    }
    if let Some(&n) = n_list.iter().find(|&&n| n < 2) {
        return Err(HarnessError::Config(format!(
            "every n must be >= 2, got {n}"
        )));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HarnessError::Config(
            "n_list must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Parses `4,8,16`, `4..64` (inclusive) or `4..64:4`, and comma-separated
/// mixtures of these.
pub fn parse_n_list(text: &str) -> Result<Vec<usize>, HarnessError> {
    let bad = || HarnessError::Config(format!("bad n list {text:?}"));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            None => out.push(part.parse().map_err(|_| bad())?),
            Some((lo, rest)) => {
                let (hi, step) = match rest.split_once(':') {
                    Some((hi, step)) => (hi, step.parse::<usize>().map_err(|_| bad())?),
                    None => (rest, 1),
                };
                let hi = hi.trim_start_matches('=');
                let (lo, hi): (usize, usize) = (
                    lo.parse().map_err(|_| bad())?,
                    hi.parse().map_err(|_| bad())?,
                );
                if step == 0 || lo > hi {
                    return Err(bad());
                }
                out.extend((lo..=hi).step_by(step));
            }
        }
    }
    Ok(out)
}

pub fn parse_f64_list(text: &str) -> Result<Vec<f64>, HarnessError> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| HarnessError::Config(format!("bad number {p:?} in {text:?}")))
        })
        .collect()
}
