//! Experiment description files and the end-to-end runner behind the CLI.
//!
//! A file holds one `key: value` directive per line, `#` starts a comment:
//!
//! ```text
//! state: phi+ x nu+
//! unit: bs
//! filter_fwhm_nm: 3
//! delay_range_ps: -0.6, 0.6
//! points: 41
//! seed: 7
//! output: scan.csv, scan.json
//! ```

mod catalog;
mod parse;
mod run;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bell::StateLabel;
use crate::hom::{NoiseModel, ScanConfig, SpectralModel};
use crate::optics::ElementSetting;

pub use catalog::{cli_catalog, render_catalog, CatalogRow, DofTag};
pub use parse::{parse_experiment, ParseDiagnostic, Parsed, Severity};
pub use run::{
    fit_csv, read_scan_csv, resolve_outputs, run_experiment, CsvScan, FitReport, RunError,
    RunOutcome, RunResult, OUT_DIR_ENV,
};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Unit {
    /// Beam-splitter HOM interference unit.
    BsInterference,
    /// Polarizing-beam-splitter exchange-phase unit.
    PbsExchangePhase,
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::BsInterference => "bs",
            Self::PbsExchangePhase => "pbs",
        })
    }
}

impl FromStr for Unit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bs" => Ok(Self::BsInterference),
            "pbs" => Ok(Self::PbsExchangePhase),
            other => Err(format!("unknown unit `{other}`, expected `bs` or `pbs`")),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }

    /// Format implied by a path's extension.
    pub fn of_path(path: &std::path::Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "csv" => Some(Self::Csv),
            "json" => Some(Self::Json),
            _ => None,
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format `{other}`, expected `csv` or `json`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputTarget {
    pub path: PathBuf,
    pub format: OutputFormat,
}

/// Delay grid of the BS unit; times in seconds.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct DelayScan {
    pub delay_min: f64,
    pub delay_max: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub source: StateLabel,
    /// Replaces the standard preparation recipe for hyper states.
    pub prep_overrides: Option<Vec<ElementSetting>>,
    pub unit: Unit,
    pub spectral: SpectralModel,
    pub delay: DelayScan,
    pub theta_points: usize,
    pub pairs_per_point: f64,
    pub accidentals: f64,
    pub seed: u64,
    pub noise: NoiseModel,
    pub outputs: Vec<OutputTarget>,
}

impl ExperimentSpec {
    /// Defaults for everything but the state and unit.
    pub fn new(source: StateLabel, unit: Unit) -> Self {
        let spectral = SpectralModel::default();
        let scan = ScanConfig::default_for(&spectral);
        Self {
            source,
            prep_overrides: None,
            unit,
            spectral,
            delay: DelayScan { delay_min: scan.delay_min, delay_max: scan.delay_max, points: scan.n_points },
            theta_points: 32,
            pairs_per_point: 1e4,
            accidentals: 0.0,
            seed: 0,
            noise: NoiseModel::Poisson,
            outputs: Vec::new(),
        }
    }

    /// File name stem unique to state, unit and seed.
    pub fn output_stem(&self) -> String {
        let state: String = self
            .source
            .to_string()
            .chars()
            .filter_map(|c| match c {
                '+' => Some('p'),
                '-' => Some('m'),
                ' ' => None,
                c => Some(c),
            })
            .collect();
        format!("{state}_{}_seed{}", self.unit, self.seed)
    }

    /// Text form accepted by [`parse_experiment`]; parsing it yields `self`.
    pub fn to_text(&self) -> String {
        parse::serialize(self)
    }
}
