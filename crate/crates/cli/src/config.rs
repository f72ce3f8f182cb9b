//! Flat `key = value` experiment configuration.

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;

use freemin_core::{DivergenceKind, Grid, InteractionKernel, Potential, Problem, ReferenceMeasure};

use crate::error::ConfigError;

pub const DEFAULT_OUTPUT_DIR: &str = "./out";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricModeTag {
    Plain,
    Shifted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialSpec {
    Zero,
    Sine { frequency: f64, amplitude: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuSpec {
    Uniform,
    Power { exponent: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Zero,
    Log { scale: f64, epsilon: f64 },
    Tridiagonal { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub divergence: DivergenceKind,
    pub metric_mode: MetricModeTag,
    pub n: usize,
    pub periodic: bool,
    pub potential: PotentialSpec,
    pub mu: MuSpec,
    pub kernel: KernelSpec,
    pub dt: f64,
    pub iterations: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
}

const KEYS: [&str; 12] = [
    "name",
    "divergence",
    "metric_mode",
    "n",
    "periodic",
    "potential",
    "mu",
    "kernel",
    "dt",
    "iterations",
    "seed",
    "output_dir",
];

/// A real literal, or a fraction `a/b` of two literals.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let b: f64 = b.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            if b == 0.0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            a / b
        }
        None => s.parse().map_err(|_| format!("not a number: {s:?}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("not finite: {s:?}"))
    }
}

/// `name` or `name(a, b, ...)` with numeric arguments.
fn parse_call(s: &str) -> Result<(&str, Vec<f64>), String> {
    let s = s.trim();
    let Some(open) = s.find('(') else {
        return Ok((s, Vec::new()));
    };
    let inner = s[open + 1..].strip_suffix(')').ok_or_else(|| format!("missing closing parenthesis in {s:?}"))?;
    let args = inner.split(',').map(parse_number).collect::<Result<Vec<_>, _>>()?;
    Ok((s[..open].trim(), args))
}

fn expect_args<const N: usize>(name: &str, args: &[f64]) -> Result<[f64; N], String> {
    args.try_into().map_err(|_| format!("{name} takes {N} argument(s), got {}", args.len()))
}

impl std::str::FromStr for PotentialSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match parse_call(s)? {
            ("zero", a) if a.is_empty() => Ok(Self::Zero),
            ("sine", a) => {
                let [frequency, amplitude] = expect_args("sine", &a)?;
                Ok(Self::Sine { frequency, amplitude })
            }
            _ => Err(format!("expected zero or sine(frequency, amplitude), got {s:?}")),
        }
    }
}

impl std::str::FromStr for MuSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match parse_call(s)? {
            ("uniform", a) if a.is_empty() => Ok(Self::Uniform),
            ("power", a) => {
                let [exponent] = expect_args("power", &a)?;
                Ok(Self::Power { exponent })
            }
            _ => Err(format!("expected uniform or power(exponent), got {s:?}")),
        }
    }
}

impl std::str::FromStr for KernelSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match parse_call(s)? {
            ("zero", a) if a.is_empty() => Ok(Self::Zero),
            ("log", a) => {
                let [scale, epsilon] = expect_args("log", &a)?;
                Ok(Self::Log { scale, epsilon })
            }
            ("tridiagonal", a) => {
                let [alpha] = expect_args("tridiagonal", &a)?;
                Ok(Self::Tridiagonal { alpha })
            }
            _ => Err(format!("expected zero, log(scale, epsilon) or tridiagonal(alpha), got {s:?}")),
        }
    }
}

impl fmt::Display for MetricModeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Plain => "plain",
            Self::Shifted => "shifted",
        })
    }
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => f.write_str("zero"),
            Self::Sine { frequency, amplitude } => write!(f, "sine({frequency}, {amplitude})"),
        }
    }
}

impl fmt::Display for MuSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform => f.write_str("uniform"),
            Self::Power { exponent } => write!(f, "power({exponent})"),
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => f.write_str("zero"),
            Self::Log { scale, epsilon } => write!(f, "log({scale}, {epsilon})"),
            Self::Tridiagonal { alpha } => write!(f, "tridiagonal({alpha})"),
        }
    }
}

/// Serializes in the format [`parse_config`] reads; floats print in their
/// shortest exact form so the round trip is lossless.
impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "name = {}", self.name)?;
        writeln!(f, "divergence = {}", self.divergence)?;
        writeln!(f, "metric_mode = {}", self.metric_mode)?;
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "periodic = {}", self.periodic)?;
        writeln!(f, "potential = {}", self.potential)?;
        writeln!(f, "mu = {}", self.mu)?;
        writeln!(f, "kernel = {}", self.kernel)?;
        writeln!(f, "dt = {}", self.dt)?;
        writeln!(f, "iterations = {}", self.iterations)?;
        writeln!(f, "seed = {}", self.seed)?;
        writeln!(f, "output_dir = {}", self.output_dir.display())
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut entries: HashMap<&'static str, (usize, &str)> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap().trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::Syntax { line, message: format!("expected `key = value`, got {content:?}") })?;
        let key = key.trim();
        let value = value.trim();
        let Some(&known) = KEYS.iter().find(|k| **k == key) else {
            return Err(ConfigError::UnknownKey { line, key: key.to_string() });
        };
        if value.is_empty() {
            return Err(ConfigError::Value { line, key: known, message: "empty value".into() });
        }
        if entries.insert(known, (line, value)).is_some() {
            return Err(ConfigError::DuplicateKey { line, key: key.to_string() });
        }
    }

    fn get<'t, T, E: fmt::Display>(
        entries: &HashMap<&'static str, (usize, &'t str)>,
        key: &'static str,
        parse: impl FnOnce(&'t str) -> Result<T, E>,
    ) -> Result<T, ConfigError> {
        let (line, value) = *entries.get(key).ok_or(ConfigError::Missing(key))?;
        parse(value).map_err(|e| ConfigError::Value { line, key, message: e.to_string() })
    }

    let config = ExperimentConfig {
        name: get(&entries, "name", |s| Ok::<_, String>(s.to_string()))?,
        divergence: get(&entries, "divergence", str::parse::<DivergenceKind>)?,
        metric_mode: get(&entries, "metric_mode", |s| match s {
            "plain" => Ok(MetricModeTag::Plain),
            "shifted" => Ok(MetricModeTag::Shifted),
            _ => Err(format!("expected plain or shifted, got {s:?}")),
        })?,
        n: get(&entries, "n", str::parse::<usize>)?,
        periodic: get(&entries, "periodic", str::parse::<bool>)?,
        potential: get(&entries, "potential", str::parse::<PotentialSpec>)?,
        mu: get(&entries, "mu", str::parse::<MuSpec>)?,
        kernel: get(&entries, "kernel", str::parse::<KernelSpec>)?,
        dt: get(&entries, "dt", parse_number)?,
        iterations: get(&entries, "iterations", str::parse::<usize>)?,
        seed: get(&entries, "seed", str::parse::<u64>)?,
        output_dir: match entries.get("output_dir") {
            Some((_, v)) => PathBuf::from(v),
            None => PathBuf::from(DEFAULT_OUTPUT_DIR),
        },
    };
    config.validate()?;
    Ok(config)
}

fn invalid(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field, message: message.into() }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(invalid("name", format!("must be non-empty [A-Za-z0-9_-], got {:?}", self.name)));
        }
        if self.n < 2 {
            return Err(invalid("n", format!("must be >= 2, got {}", self.n)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", format!("must be finite and > 0, got {}", self.dt)));
        }
        if self.iterations < 1 {
            return Err(invalid("iterations", "must be >= 1"));
        }
        if let PotentialSpec::Sine { frequency, amplitude } = self.potential {
            if !(frequency.is_finite() && amplitude.is_finite()) {
                return Err(invalid("potential", "sine arguments must be finite"));
            }
        }
        if let MuSpec::Power { exponent } = self.mu {
            if !(exponent >= 0.0 && exponent.is_finite()) {
                return Err(invalid("mu", format!("power exponent must be finite and >= 0, got {exponent}")));
            }
        }
        match self.kernel {
            KernelSpec::Zero => {}
            KernelSpec::Log { scale, epsilon } => {
                if !scale.is_finite() {
                    return Err(invalid("kernel", format!("log scale must be finite, got {scale}")));
                }
                if !(epsilon > 0.0 && epsilon.is_finite()) {
                    return Err(invalid("kernel", format!("log epsilon must be > 0, got {epsilon}")));
                }
            }
            KernelSpec::Tridiagonal { alpha } => {
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(invalid("kernel", format!("tridiagonal alpha must be > 0, got {alpha}")));
                }
                if !self.periodic {
                    return Err(invalid("periodic", "tridiagonal kernel wraps around and needs periodic = true"));
                }
                if self.n < 3 {
                    return Err(invalid("n", "tridiagonal kernel needs n >= 3"));
                }
            }
        }
        if self.metric_mode == MetricModeTag::Shifted && !matches!(self.kernel, KernelSpec::Tridiagonal { .. }) {
            return Err(invalid("metric_mode", "shifted mode needs a positive-definite kernel: tridiagonal(alpha)"));
        }
        Ok(())
    }

    pub fn grid(&self) -> freemin_core::Result<Grid> {
        Grid::uniform(self.n, self.periodic)
    }

    pub fn build_problem(&self) -> freemin_core::Result<Problem> {
        let grid = self.grid()?;
        let n = self.n;
        let mu = match self.mu {
            MuSpec::Uniform => ReferenceMeasure::uniform(n)?,
            MuSpec::Power { exponent } => ReferenceMeasure::power(&grid, exponent)?,
        };
        let potential = match self.potential {
            PotentialSpec::Zero => Potential::zero(n),
            PotentialSpec::Sine { frequency, amplitude } => Potential::sine(&grid, frequency, amplitude)?,
        };
        let kernel = match self.kernel {
            KernelSpec::Zero => InteractionKernel::zero(n),
            KernelSpec::Log { scale, epsilon } => InteractionKernel::log(&grid, scale, epsilon)?,
            KernelSpec::Tridiagonal { alpha } => InteractionKernel::tridiagonal(&grid, alpha)?,
        };
        let shifted = self.metric_mode == MetricModeTag::Shifted;
        Problem::new(grid, self.divergence, mu, potential, kernel, shifted, self.dt)
    }
}
