//! Experiment configuration files.
//!
//! Parsing is two-phase: a lenient pass reads only `task`, then the file is
//! parsed again into the task's own schema with unknown fields rejected.
//! Both passes parse the original text, so errors carry line and column.

use std::fmt;
use std::path::{Path, PathBuf};

use pframe::io::{ComplexEntry, FrameFile, ProfileSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    FrameVerify,
    Naimark,
    Spectrum,
    CcSpectrum,
    CcLadders,
    PseudoBoson,
    #[serde(rename = "prop15")]
    Prop15,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::FrameVerify => "frame-verify",
            Task::Naimark => "naimark",
            Task::Spectrum => "spectrum",
            Task::CcSpectrum => "cc-spectrum",
            Task::CcLadders => "cc-ladders",
            Task::PseudoBoson => "pseudo-boson",
            Task::Prop15 => "prop15",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Fields shared by every task. Repeated in each schema because
/// `deny_unknown_fields` does not combine with `flatten`.
pub trait Common {
    fn seed(&self) -> Option<u64>;
    fn out(&self) -> Option<&Path>;
}

macro_rules! common {
    ($($ty:ty),*) => {$(
        impl Common for $ty {
            fn seed(&self) -> Option<u64> {
                self.seed
            }
            fn out(&self) -> Option<&Path> {
                self.out.as_deref()
            }
        }
    )*};
}

/// A frame given inline, as a path to a frame file, or drawn at random as
/// the projection of an orthonormal basis of `C^len` onto a `dim`-dimensional
/// subspace.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FrameInput {
    Path(PathBuf),
    Random { random: RandomFrame },
    Inline(FrameFile),
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomFrame {
    pub len: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameVerifyConfig {
    pub task: Option<Task>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub frame: FrameInput,
    #[serde(default = "yes")]
    pub expect_parseval: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NaimarkConfig {
    pub task: Option<Task>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub frame: FrameInput,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub task: Option<Task>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub frame: FrameInput,
    #[serde(rename = "E")]
    pub e: Vec<f64>,
    #[serde(default = "default_cluster_gap")]
    pub cluster_gap: f64,
    #[serde(default = "yes")]
    pub certify: bool,
    /// Runs the quasi-eigenvalue test at every index through a dilation.
    #[serde(default)]
    pub quasi_eigen: bool,
    /// Indices `J₀` of a Riesz subfamily; the rest form `J₁`.
    #[serde(default)]
    pub riesz_split: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    pub n: usize,
    #[serde(rename = "E")]
    pub e: Vec<f64>,
}

/// Either one block (`n`, `E`) or a list of blocks in global weight order.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CcSpectrumConfig {
    pub task: Option<Task>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default, rename = "E")]
    pub e: Option<Vec<f64>>,
    #[serde(default)]
    pub blocks: Option<Vec<BlockSpec>>,
}

impl CcSpectrumConfig {
    pub fn block_list(&self) -> Result<Vec<BlockSpec>, CliError> {
        match (&self.n, &self.e, &self.blocks) {
            (Some(n), Some(e), None) => Ok(vec![BlockSpec { n: *n, e: e.clone() }]),
            (None, None, Some(blocks)) if !blocks.is_empty() => Ok(blocks.clone()),
            _ => Err(CliError::Config(
                "cc-spectrum needs either `n` with `E`, or a non-empty `blocks` list".into(),
            )),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CcLaddersConfig {
    pub task: Option<Task>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    /// Largest `n` checked in exact arithmetic.
    #[serde(default = "default_n_max")]
    pub exact_max: usize,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(rename = "L")]
    pub half_width: f64,
    #[serde(rename = "P")]
    pub points: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitWeights {
    pub e_phi: Vec<f64>,
    pub e_tilde: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PseudoBosonConfig {
    pub task: Option<Task>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub m: ProfileSpec,
    pub alpha_cells: usize,
    pub grid: GridSpec,
    #[serde(rename = "N")]
    pub order: usize,
    /// Repeats the ladder check on the refined grid and reports the ratios.
    #[serde(default)]
    pub two_grid: bool,
    #[serde(default)]
    pub hamiltonian: Option<SplitWeights>,
}

/// Exactly one of `x`, a square matrix given row by row, and `random`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Prop15Config {
    pub task: Option<Task>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub x: Option<Vec<Vec<ComplexEntry>>>,
    #[serde(default)]
    pub random: Option<RandomMatrix>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomMatrix {
    pub dim: usize,
    pub norm: f64,
}

common!(
    FrameVerifyConfig,
    NaimarkConfig,
    SpectrumConfig,
    CcSpectrumConfig,
    CcLaddersConfig,
    PseudoBosonConfig,
    Prop15Config
);

fn yes() -> bool {
    true
}

fn default_cluster_gap() -> f64 {
    1e-9
}

fn default_n_max() -> usize {
    100
}

#[derive(Deserialize)]
struct TaskProbe {
    task: Option<Task>,
}

fn located(path: &Path, e: serde_json::Error) -> CliError {
    let msg = e.to_string();
    let suffix = format!(" at line {} column {}", e.line(), e.column());
    let msg = msg.strip_suffix(&suffix).unwrap_or(&msg);
    CliError::Config(format!("{}:{}:{}: {msg}", path.display(), e.line(), e.column()))
}

/// Parses `text` (read from `path`) as the schema of `expected`.
pub fn parse<C: DeserializeOwned + Common>(path: &Path, text: &str, expected: Task) -> Result<C, CliError> {
    let probe: TaskProbe = serde_json::from_str(text).map_err(|e| located(path, e))?;
    if let Some(task) = probe.task {
        if task != expected {
            return Err(CliError::Config(format!(
                "{}: config is for task `{task}` but the `{expected}` subcommand was run",
                path.display()
            )));
        }
    }
    serde_json::from_str(text).map_err(|e| located(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_field_reports_line() {
        let text = "{\n  \"task\": \"cc-spectrum\",\n  \"n\": 2,\n  \"E\": [1, 3, 5],\n  \"bogus\": 1\n}";
        let err = parse::<CcSpectrumConfig>(Path::new("c.json"), text, Task::CcSpectrum).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("c.json:5:"), "{msg}");
        assert!(msg.contains("bogus"), "{msg}");
    }

    #[test]
    fn task_mismatch_is_rejected() {
        let text = r#"{"task": "naimark", "frame": "f.json"}"#;
        assert!(parse::<CcSpectrumConfig>(Path::new("c.json"), text, Task::CcSpectrum).is_err());
    }

    #[test]
    fn frame_input_forms() {
        let c: NaimarkConfig = parse(Path::new("c"), r#"{"frame": "onb.json"}"#, Task::Naimark).unwrap();
        assert!(matches!(c.frame, FrameInput::Path(_)));
        let c: NaimarkConfig = parse(
            Path::new("c"),
            r#"{"frame": {"random": {"len": 5, "dim": 3}}}"#,
            Task::Naimark,
        )
        .unwrap();
        assert!(matches!(c.frame, FrameInput::Random { .. }));
        let c: NaimarkConfig = parse(
            Path::new("c"),
            r#"{"frame": {"dim": 1, "vectors": [[1]]}}"#,
            Task::Naimark,
        )
        .unwrap();
        assert!(matches!(c.frame, FrameInput::Inline(_)));
    }

    #[test]
    fn block_list_forms() {
        let c: CcSpectrumConfig = parse(Path::new("c"), r#"{"n": 2, "E": [1, 3, 5]}"#, Task::CcSpectrum).unwrap();
        assert_eq!(c.block_list().unwrap().len(), 1);
        let c: CcSpectrumConfig = parse(Path::new("c"), r#"{"n": 2}"#, Task::CcSpectrum).unwrap();
        assert!(c.block_list().is_err());
    }
}
