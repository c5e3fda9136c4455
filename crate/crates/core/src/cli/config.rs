//! Experiment configuration files (strict JSON; unknown keys are errors).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::corpus::corpus_entry;
use crate::analysis::{FamilyMember, Operator};
use crate::cauchy::{CauchyData, Tolerances};
use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};
use crate::potential::{Potential, PotentialConfig};
use crate::spectral::Window;

/// A complex number as `[re, im]`.
pub type ComplexConfig = [f64; 2];

fn c(z: ComplexConfig) -> C64 {
    C64::new(z[0], z[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        self != Format::Csv
    }

    pub fn csv(self) -> bool {
        self != Format::Json
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesConfig {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for TolerancesConfig {
    fn default() -> Self {
        let t = Tolerances::default();
        TolerancesConfig { rtol: t.rtol, atol: t.atol }
    }
}

/// Initial data `u(x0) = c0`, `u^[1](x0) = c1`; missing vectors default to
/// `c0 = e₁`, `c1 = 0`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CauchyConfig {
    #[serde(default)]
    pub x0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<Vec<ComplexConfig>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<Vec<ComplexConfig>>,
}

impl CauchyConfig {
    pub fn build(&self, m: usize, field: &str) -> Result<CauchyData> {
        let vec_or = |v: &Option<Vec<ComplexConfig>>, name: &str, default: Vec<C64>| -> Result<Vec<C64>> {
            match v {
                None => Ok(default),
                Some(v) if v.len() == m => Ok(v.iter().map(|z| c(*z)).collect()),
                Some(v) => Err(Error::Config(format!("{field}.{name}: expected {m} entries, got {}", v.len()))),
            }
        };
        let mut e1 = vec![ZERO; m];
        e1[0] = ONE;
        Ok(CauchyData::new(
            self.x0,
            vec_or(&self.c0, "c0", e1)?,
            vec_or(&self.c1, "c1", vec![ZERO; m])?,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveParams {
    pub lambda: ComplexConfig,
    pub adjoint: bool,
    pub data: CauchyConfig,
    pub interval: [f64; 2],
    /// Points in the CSV export.
    pub samples: usize,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams {
            lambda: [0.0, 0.0],
            adjoint: false,
            data: CauchyConfig::default(),
            interval: [-5.0, 5.0],
            samples: 201,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumParams {
    pub radius: f64,
    /// `[a, b]` or `[a, b, c, d]`.
    pub window: Vec<f64>,
    pub oracle: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fd_nodes: Option<usize>,
    /// Radius increment for the stability check; 0 disables it.
    pub radius_step: f64,
    pub real_grid: usize,
    pub complex_grid: usize,
}

impl Default for SpectrumParams {
    fn default() -> Self {
        SpectrumParams {
            radius: 10.0,
            window: vec![-2.0, -0.05],
            oracle: true,
            fd_nodes: None,
            radius_step: 2.0,
            real_grid: 200,
            complex_grid: 41,
        }
    }
}

impl SpectrumParams {
    pub fn window(&self) -> Result<Window> {
        match self.window.as_slice() {
            [a, b] => Window::real(*a, *b),
            [a, b, c, d] => Window::rectangle((*a, *b), (*c, *d)),
            _ => Err(Error::Config("spectrum.window: expected 2 or 4 numbers".into())),
        }
        .map_err(|e| Error::Config(format!("spectrum.window: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FormParams {
    /// Defaults to the unit hat at 0 along `e₁`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_function: Option<FamilyMember>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operator: Option<Operator>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanParams {
    /// Explicit family; the seeded default family when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Vec<FamilyMember>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GreenParams {
    pub lambda_u: ComplexConfig,
    pub lambda_v: ComplexConfig,
    pub data_u: CauchyConfig,
    pub data_v: CauchyConfig,
    /// Integration interval of both solutions.
    pub interval: [f64; 2],
    /// `[a, b]` for the identity.
    pub check: [f64; 2],
    pub tail_radii: Vec<f64>,
}

impl Default for GreenParams {
    fn default() -> Self {
        GreenParams {
            lambda_u: [-1.0, 0.0],
            lambda_v: [0.0, 1.0],
            data_u: CauchyConfig::default(),
            data_v: CauchyConfig::default(),
            interval: [-3.0, 3.0],
            check: [-2.0, 2.0],
            tail_radii: vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelParams {
    pub shift: f64,
    pub n_max: usize,
    pub random: usize,
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams {
            shift: -1.0,
            n_max: 30,
            random: 5,
        }
    }
}

/// Initial vector for Crank–Nicolson.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    /// `exp(−((x − center)/width)²)` in every component.
    Gaussian { center: f64, width: f64 },
    /// `exp(−rate·|x|)` in every component.
    Exponential { rate: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SemigroupParams {
    pub radius: f64,
    pub nodes: usize,
    pub dt: f64,
    pub steps: usize,
    pub initial: InitialState,
}

impl Default for SemigroupParams {
    fn default() -> Self {
        SemigroupParams {
            radius: 10.0,
            nodes: 1001,
            dt: 0.01,
            steps: 200,
            initial: InitialState::Gaussian { center: 0.0, width: 1.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    pub format: Format,
}

/// Everything a run needs. Exactly one of `potential`, `potential_file`
/// and `corpus` names the potential.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corpus: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: TolerancesConfig,
    #[serde(default)]
    pub solve: SolveParams,
    #[serde(default)]
    pub spectrum: SpectrumParams,
    #[serde(default)]
    pub form: FormParams,
    #[serde(default)]
    pub scan: ScanParams,
    #[serde(default)]
    pub green: GreenParams,
    #[serde(default)]
    pub kernel_growth: KernelParams,
    #[serde(default)]
    pub semigroup: SemigroupParams,
    #[serde(default)]
    pub output: OutputConfig,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn parse_error(e: serde_json::Error) -> Error {
    let (line, column) = (e.line(), e.column());
    let msg = e.to_string().replace(&format!(" at line {line} column {column}"), "");
    Error::Config(format!("line {line}, column {column}: {msg}"))
}

/// `load_config`: reads and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    cfg.base_dir = path.parent().map(Path::to_path_buf);
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    /// Parses without validation.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(parse_error)
    }

    /// Deterministic pretty JSON (without `base_dir`).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        match &self.base_dir {
            Some(base) if p.is_relative() => base.join(p),
            _ => p.to_path_buf(),
        }
    }

    /// Checks the invariants that do not depend on the command.
    pub fn validate(&self) -> Result<()> {
        let sources = [self.potential.is_some(), self.potential_file.is_some(), self.corpus.is_some()]
            .iter()
            .filter(|b| **b)
            .count();
        if sources > 1 {
            return Err(Error::Config(
                "potential: give only one of \"potential\", \"potential_file\", \"corpus\"".into(),
            ));
        }
        if let Some(f) = &self.potential_file {
            let path = self.resolve(f);
            if !path.is_file() {
                return Err(Error::Config(format!("potential_file: {} does not exist", path.display())));
            }
        }
        let t = &self.tolerances;
        if !(t.rtol > 0.0 && t.atol > 0.0) {
            return Err(Error::Config("tolerances: rtol and atol must be positive".into()));
        }
        if !(self.spectrum.radius > 0.0) {
            return Err(Error::Config("spectrum.radius: must be positive".into()));
        }
        self.spectrum.window()?;
        let sg = &self.semigroup;
        if !(sg.radius > 0.0) || !(sg.dt > 0.0) || sg.nodes < 16 {
            return Err(Error::Config("semigroup: radius and dt must be positive, nodes ≥ 16".into()));
        }
        let [a, b] = self.solve.interval;
        if !(a < b) {
            return Err(Error::Config("solve.interval: need a < b".into()));
        }
        if self.kernel_growth.n_max < 1 {
            return Err(Error::Config("kernel_growth.n_max: must be at least 1".into()));
        }
        self.build_potential().map(|_| ())
    }

    /// The configured potential; the free scalar potential when none is named.
    pub fn build_potential(&self) -> Result<Potential> {
        if let Some(p) = &self.potential {
            return p.build().map_err(|e| match e {
                Error::Config(msg) => Error::Config(format!("potential.{msg}")),
                other => Error::Config(format!("potential: {other}")),
            });
        }
        if let Some(f) = &self.potential_file {
            let path = self.resolve(f);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Config(format!("potential_file: cannot read {}: {e}", path.display())))?;
            return Potential::from_json(&text)
                .map_err(|e| Error::Config(format!("potential_file {}: {e}", path.display())));
        }
        if let Some(name) = &self.corpus {
            return Ok(corpus_entry(name)?.potential);
        }
        Ok(Potential::free(1))
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances::new(self.tolerances.rtol, self.tolerances.atol)
    }
}

pub(crate) fn complex(z: ComplexConfig) -> C64 {
    c(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;

    #[test]
    fn minimal_free_config() {
        let cfg = ExperimentConfig::from_json(r#"{"potential": {"m": 1}}"#).unwrap();
        cfg.validate().unwrap();
        let p = cfg.build_potential().unwrap();
        assert_eq!(p, Potential::free(1));
        assert!(p.primitive().is_identically_zero() && p.remainder().is_identically_zero());
        assert_eq!(p.primitive().eval(0.3, crate::potential::Side::Auto), CMatrix::zeros(1, 1));
    }

    #[test]
    fn zero_dimension_names_m() {
        let cfg = ExperimentConfig::from_json(r#"{"potential": {"m": 0}}"#).unwrap();
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("m:"), "{err}");
    }

    #[test]
    fn unknown_keys_rejected_with_position() {
        let err = ExperimentConfig::from_json("{\n  \"seed\": 1,\n  \"sede\": 2\n}").unwrap_err().to_string();
        assert!(err.contains("line 3") && err.contains("sede"), "{err}");
        assert!(ExperimentConfig::from_json(r#"{"spectrum": {"radius": 3, "extra": 1}}"#).is_err());
    }

    #[test]
    fn sources_are_exclusive_and_files_must_exist() {
        let cfg = ExperimentConfig::from_json(r#"{"corpus": "free", "potential": {"m": 1}}"#).unwrap();
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig::from_json(r#"{"potential_file": "/definitely/missing.json"}"#).unwrap();
        assert!(cfg.validate().unwrap_err().to_string().contains("potential_file"));
    }

    #[test]
    fn round_trip() {
        let mut cfg = ExperimentConfig::from_json(r#"{"corpus": "delta-2", "seed": 9}"#).unwrap();
        cfg.spectrum.window = vec![-2.0, -0.5, -0.1, 0.1];
        let again = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(again, cfg);
    }
}
