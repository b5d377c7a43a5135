//! Run configuration: a TOML file with `problem`, `solver` and `output`
//! blocks, or the same structure as JSON.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use fracctrl::operators::Mode;
use fracctrl::problem::{DataFactor, DesiredState, ProblemSpec};
use fracctrl::solver::{OuterScheme, SolverConfig};
use serde::{Deserialize, Serialize};

/// Smooth data factor multiplying `(1 − x)^β x^β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorSpec {
    Sin,
    Cos,
    One,
    Zero,
    /// Shifted Chebyshev coefficients given inline.
    Chebyshev(Vec<f64>),
    /// Shifted Chebyshev coefficients read from a whitespace-separated file,
    /// resolved against the directory of the configuration file.
    ChebyshevFile(PathBuf),
}

/// Desired state: a data factor, or coefficients in the state trial basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesiredSpec {
    Sin,
    Cos,
    One,
    Zero,
    Chebyshev(Vec<f64>),
    ChebyshevFile(PathBuf),
    StateCoefficients(Vec<f64>),
}

fn one() -> f64 {
    1.0
}

fn default_source() -> FactorSpec {
    FactorSpec::Sin
}

fn default_desired() -> DesiredSpec {
    DesiredSpec::Cos
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemBlock {
    pub alpha: f64,
    pub theta: f64,
    #[serde(default = "one")]
    pub lambda1: f64,
    #[serde(default = "one")]
    pub lambda2: f64,
    #[serde(default = "one")]
    pub gamma: f64,
    /// Exponent of the `(1 − x)^β x^β` weight on the data.
    #[serde(default)]
    pub beta: f64,
    #[serde(default = "default_source")]
    pub source: FactorSpec,
    #[serde(default = "default_desired")]
    pub desired: DesiredSpec,
    /// Regularity index override used for the predicted order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverBlock {
    pub mode: Mode,
    /// Truncation of a single solve.
    pub n: usize,
    /// Doubling truncations of a study.
    pub ns: Vec<usize>,
    /// Reference truncation of a study.
    pub n_ref: usize,
    pub inner_tol: f64,
    pub inner_max: usize,
    pub outer_tol: f64,
    pub outer_max: usize,
    pub bootstrap_n: usize,
    pub scheme: OuterScheme,
}

impl Default for SolverBlock {
    fn default() -> Self {
        let base = SolverConfig::default();
        Self {
            mode: base.mode,
            n: 128,
            ns: vec![64, 128, 256],
            n_ref: 2048,
            inner_tol: base.inner_tol,
            inner_max: base.inner_max,
            outer_tol: base.outer_tol,
            outer_max: base.outer_max,
            bootstrap_n: base.bootstrap_n,
            scheme: base.scheme,
        }
    }
}

impl SolverBlock {
    pub fn solver_config(&self, n: usize) -> SolverConfig {
        SolverConfig {
            n,
            mode: self.mode,
            inner_tol: self.inner_tol,
            inner_max: self.inner_max,
            outer_tol: self.outer_tol,
            outer_max: self.outer_max,
            bootstrap_n: self.bootstrap_n,
            scheme: self.scheme,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    #[default]
    #[serde(alias = "markdown")]
    Md,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Md => "md",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub format: Format,
    /// Destination file; standard output when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// 0 prints nothing but the result, 1 adds a summary on standard error, 2 adds per-row progress.
    pub verbosity: u8,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            format: Format::Md,
            path: None,
            verbosity: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemBlock,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

/// Parses TOML, or JSON when the text starts with `{`. Errors carry the
/// parser's line and column.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text).context("invalid JSON configuration")
    } else {
        toml::from_str(text).map_err(|e| anyhow::anyhow!("invalid TOML configuration: {e}"))
    }
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

/// Reads Chebyshev coefficients separated by whitespace or commas; `#` starts a comment.
pub fn read_coefficients(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut out = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        for (col, token) in body.split(|c: char| c.is_whitespace() || c == ',').enumerate() {
            if token.is_empty() {
                continue;
            }
            let value: f64 = token.parse().with_context(|| {
                format!("{}:{}: '{token}' is not a number (field {})", path.display(), line_no + 1, col + 1)
            })?;
            out.push(value);
        }
    }
    if out.is_empty() {
        bail!("{} contains no coefficients", path.display());
    }
    Ok(out)
}

fn resolve(path: &Path, base: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

fn factor(spec: &FactorSpec, base: &Path) -> Result<DataFactor> {
    Ok(match spec {
        FactorSpec::Sin => DataFactor::Sin,
        FactorSpec::Cos => DataFactor::Cos,
        FactorSpec::One => DataFactor::One,
        FactorSpec::Zero => DataFactor::Zero,
        FactorSpec::Chebyshev(c) => DataFactor::Chebyshev(c.clone()),
        FactorSpec::ChebyshevFile(p) => DataFactor::Chebyshev(read_coefficients(&resolve(p, base))?),
    })
}

impl ProblemBlock {
    /// The problem with coefficient files resolved against `base`.
    pub fn to_spec(&self, base: &Path) -> Result<ProblemSpec> {
        let desired = match &self.desired {
            DesiredSpec::StateCoefficients(c) => DesiredState::StateCoefficients(c.clone()),
            DesiredSpec::Sin => DesiredState::Data(DataFactor::Sin),
            DesiredSpec::Cos => DesiredState::Data(DataFactor::Cos),
            DesiredSpec::One => DesiredState::Data(DataFactor::One),
            DesiredSpec::Zero => DesiredState::Data(DataFactor::Zero),
            DesiredSpec::Chebyshev(c) => DesiredState::Data(DataFactor::Chebyshev(c.clone())),
            DesiredSpec::ChebyshevFile(p) => DesiredState::Data(DataFactor::Chebyshev(read_coefficients(&resolve(p, base))?)),
        };
        let spec = ProblemSpec {
            alpha: self.alpha,
            theta: self.theta,
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            gamma: self.gamma,
            beta: self.beta,
            source: factor(&self.source, base)?,
            desired,
            regularity: self.regularity,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[problem]
alpha = 1.8
theta = 0.5
beta = -0.4
source = "sin"
desired = { chebyshev = [1.0, 0.5] }

[solver]
mode = "direct"
ns = [32, 64]
n_ref = 256

[output]
format = "csv"
"#;

    #[test]
    fn toml_sample_parses_with_defaults() {
        let c = parse_config(SAMPLE).unwrap();
        assert_eq!(c.problem.lambda1, 1.0);
        assert_eq!(c.problem.desired, DesiredSpec::Chebyshev(vec![1.0, 0.5]));
        assert_eq!(c.solver.mode, Mode::Direct);
        assert_eq!(c.solver.ns, vec![32, 64]);
        assert_eq!(c.solver.n, 128);
        assert_eq!(c.output.format, Format::Csv);
    }

    #[test]
    fn round_trips_through_both_encodings() {
        let c = parse_config(SAMPLE).unwrap();
        let toml_text = toml::to_string(&c).unwrap();
        assert_eq!(parse_config(&toml_text).unwrap(), c);
        let json_text = serde_json::to_string_pretty(&c).unwrap();
        assert_eq!(parse_config(&json_text).unwrap(), c);
    }

    #[test]
    fn unknown_key_reports_location() {
        let bad = "[problem]\nalpha = 1.8\ntheta = 0.5\nlambda3 = 2.0\n";
        let msg = format!("{:#}", parse_config(bad).unwrap_err());
        assert!(msg.contains("lambda3"), "{msg}");
        assert!(msg.contains("line 4"), "{msg}");
        let bad_json = "{\"problem\": {\"alpha\": 1.8, \"theta\": 0.5},\n \"solvr\": {}}";
        let msg = format!("{:#}", parse_config(bad_json).unwrap_err());
        assert!(msg.contains("solvr") && msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn coefficient_file_is_resolved_relative_to_config() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("f.txt"), "# sin-like\n0.5, -0.25\n0.125\n").unwrap();
        let block = ProblemBlock {
            source: FactorSpec::ChebyshevFile("f.txt".into()),
            ..parse_config(SAMPLE).unwrap().problem
        };
        let spec = block.to_spec(dir.path()).unwrap();
        assert_eq!(spec.source, DataFactor::Chebyshev(vec![0.5, -0.25, 0.125]));
        fs::write(dir.path().join("f.txt"), "0.5 x\n").unwrap();
        assert!(block.to_spec(dir.path()).is_err());
    }

    #[test]
    fn invalid_problem_is_rejected() {
        let mut c = parse_config(SAMPLE).unwrap();
        c.problem.alpha = 2.5;
        assert!(c.problem.to_spec(Path::new(".")).is_err());
    }
}
