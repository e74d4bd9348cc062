//! Prepare → simulate → fit, and the CSV/JSON files that come out of it.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use super::{ExperimentSpec, OutputFormat, OutputTarget, Unit};
use crate::analysis::{fit_hom, fit_hom_counts, fit_phase, fit_phase_values, FitError, HomFit, PhaseFit};
use crate::bell::StateLabel;
use crate::hom::{
    phase_protocol_scan, simulate_hom_scan, theta_grid, HomCurve, HomError, NoiseModel,
    PhaseNoise, PhaseScan, ScanConfig,
};
use crate::optics::{prepare_hyper, prepared_state, OpticsError};
use crate::state::TwoPhotonState;

/// Overrides the directory relative output paths are resolved against.
pub const OUT_DIR_ENV: &str = "HYPERHOM_OUT_DIR";

const PREP_FIDELITY_WARN: f64 = 1.0 - 1e-9;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {message}")]
    BadCsv { path: PathBuf, message: String },
    #[error(transparent)]
    Hom(#[from] HomError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Optics(#[from] OpticsError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "unit", rename_all = "lowercase")]
pub enum RunResult {
    Bs { curve: HomCurve, fit: HomFit },
    Pbs { scan: PhaseScan, fit: PhaseFit },
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub summary: String,
    pub result: RunResult,
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

/// Output targets with relative paths placed under `out_dir`. A spec without
/// outputs writes `<stem>.csv` and `<stem>.json`.
pub fn resolve_outputs(spec: &ExperimentSpec, out_dir: &Path) -> Vec<OutputTarget> {
    let targets = if spec.outputs.is_empty() {
        [OutputFormat::Csv, OutputFormat::Json]
            .into_iter()
            .map(|format| OutputTarget {
                path: PathBuf::from(format!("{}.{}", spec.output_stem(), format.extension())),
                format,
            })
            .collect()
    } else {
        spec.outputs.clone()
    };
    targets
        .into_iter()
        .map(|t| OutputTarget { path: out_dir.join(&t.path), format: t.format })
        .collect()
}

fn prepare(spec: &ExperimentSpec, warnings: &mut Vec<String>) -> Result<TwoPhotonState, RunError> {
    let StateLabel::Hyper(h) = spec.source else {
        if spec.prep_overrides.is_some() {
            return Err(RunError::Invalid("prep applies only to hyper-entangled states".into()));
        }
        return Ok(spec.source.state());
    };
    let elements = spec.prep_overrides.clone().unwrap_or_else(|| prepare_hyper(h));
    let state = prepared_state(&elements)?;
    let fidelity = state.fidelity(&spec.source.state());
    if fidelity < PREP_FIDELITY_WARN {
        warnings.push(format!(
            "prepared state has fidelity {fidelity:.6} with {}; simulating the prepared state",
            spec.source
        ));
    }
    Ok(state)
}

pub fn run_experiment(spec: &ExperimentSpec, out_dir: &Path) -> Result<RunOutcome, RunError> {
    let mut warnings = Vec::new();
    let label = spec.source.to_string();
    let (summary, result) = match spec.unit {
        Unit::BsInterference => {
            let state = prepare(spec, &mut warnings)?;
            let scan = ScanConfig {
                delay_min: spec.delay.delay_min,
                delay_max: spec.delay.delay_max,
                n_points: spec.delay.points,
                pairs_per_point: spec.pairs_per_point,
                accidental_rate: spec.accidentals,
                rng_seed: spec.seed,
                noise: spec.noise,
            };
            let curve = simulate_hom_scan(&state, &label, &scan, &spec.spectral)?;
            let fit = fit_hom(&curve)?;
            (hom_summary(&label, &fit), RunResult::Bs { curve, fit })
        }
        Unit::PbsExchangePhase => {
            let oam = spec.source.as_oam().ok_or_else(|| {
                RunError::Invalid(format!("the pbs unit requires a pure OAM Bell label, got `{label}`"))
            })?;
            let noise = match spec.noise {
                NoiseModel::None => None,
                NoiseModel::Poisson => Some(PhaseNoise {
                    pairs_per_point: spec.pairs_per_point,
                    accidental_rate: spec.accidentals,
                    seed: spec.seed,
                }),
            };
            let scan = phase_protocol_scan(oam, &theta_grid(spec.theta_points), noise, &spec.spectral)?;
            let fit = fit_phase(&scan)?;
            (phase_summary(&label, &fit), RunResult::Pbs { scan, fit })
        }
    };

    let mut files = Vec::new();
    for target in resolve_outputs(spec, out_dir) {
        let bytes = match target.format {
            OutputFormat::Csv => csv_bytes(&result),
            OutputFormat::Json => json_bytes(spec, &result),
        };
        write_file(&target.path, &bytes)?;
        files.push(target.path);
    }
    Ok(RunOutcome { summary, result, files, warnings })
}

fn hom_summary(label: &str, fit: &HomFit) -> String {
    let mut s = format!(
        "{label}: {} V={:.3} ± {:.3}",
        fit.kind, fit.visibility, fit.stderr.visibility
    );
    if !fit.reliable {
        s.push_str(" (unreliable)");
    }
    s
}

fn phase_summary(label: &str, fit: &PhaseFit) -> String {
    let mut s = format!("{label}: Phi={:.4} rad ± {:.4}", fit.phi, fit.phi_stderr);
    if !fit.reliable {
        s.push_str(" (unreliable)");
    }
    s
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let io_err = |source| RunError::Io { path: path.to_path_buf(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err)?;
    }
    fs::write(path, bytes).map_err(io_err)
}

fn csv_bytes(result: &RunResult) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let rows: Vec<Vec<String>> = match result {
        RunResult::Bs { curve, .. } => {
            w.write_record(["delay_s", "expected", "sampled"]).expect("in-memory write");
            (0..curve.delays.len())
                .map(|i| {
                    vec![
                        format!("{:e}", curve.delays[i]),
                        curve.expected[i].to_string(),
                        curve.sampled.as_ref().map_or(String::new(), |s| s[i].to_string()),
                    ]
                })
                .collect()
        }
        RunResult::Pbs { scan, .. } => {
            w.write_record([
                "theta_rad",
                "expected",
                "sampled",
                "p_plus",
                "p_minus",
                "counts_plus",
                "counts_minus",
            ])
            .expect("in-memory write");
            let observed = scan.counts.as_ref().map(|_| scan.observed_m_theta());
            (0..scan.thetas.len())
                .map(|i| {
                    let count = |pick: fn(&crate::hom::PhaseCounts) -> &Vec<u64>| {
                        scan.counts.as_ref().map_or(String::new(), |c| pick(c)[i].to_string())
                    };
                    vec![
                        scan.thetas[i].to_string(),
                        scan.m_theta[i].to_string(),
                        observed.as_ref().map_or(String::new(), |o| o[i].to_string()),
                        scan.p_plus[i].to_string(),
                        scan.p_minus[i].to_string(),
                        count(|c| &c.plus),
                        count(|c| &c.minus),
                    ]
                })
                .collect()
        }
    };
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn json_bytes(spec: &ExperimentSpec, result: &RunResult) -> Vec<u8> {
    #[derive(Serialize)]
    struct Doc<'a> {
        experiment: String,
        seed: u64,
        #[serde(flatten)]
        result: &'a RunResult,
    }
    let doc = Doc { experiment: spec.to_text(), seed: spec.seed, result };
    let mut out = serde_json::to_vec_pretty(&doc).expect("serializable");
    out.push(b'\n');
    out
}

/// A scan read back from CSV: the x column and the values a fit should use
/// (`sampled` when present, else `expected`).
#[derive(Clone, Debug, PartialEq)]
pub enum CsvScan {
    Delay { delays: Vec<f64>, values: Vec<f64> },
    Theta { thetas: Vec<f64>, values: Vec<f64> },
}

pub fn read_scan_csv(path: &Path) -> Result<CsvScan, RunError> {
    let bad = |message: String| RunError::BadCsv { path: path.to_path_buf(), message };
    let mut r = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let headers = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (x_col, theta) = match (col("delay_s"), col("theta_rad")) {
        (Some(c), None) => (c, false),
        (None, Some(c)) => (c, true),
        _ => return Err(bad("expected exactly one of the columns delay_s, theta_rad".into())),
    };
    let expected_col = col("expected").ok_or_else(|| bad("missing column `expected`".into()))?;
    let sampled_col = col("sampled");

    let mut xs = Vec::new();
    let mut expected = Vec::new();
    let mut sampled = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |c: usize| -> Result<Option<f64>, RunError> {
            let field = rec.get(c).unwrap_or("").trim();
            if field.is_empty() {
                return Ok(None);
            }
            field
                .parse::<f64>()
                .map(Some)
                .map_err(|_| bad(format!("row {}: `{field}` is not a number", i + 2)))
        };
        xs.push(num(x_col)?.ok_or_else(|| bad(format!("row {}: empty x value", i + 2)))?);
        expected.push(num(expected_col)?.unwrap_or(f64::NAN));
        sampled.push(match sampled_col {
            Some(c) => num(c)?,
            None => None,
        });
    }
    let values = if !sampled.is_empty() && sampled.iter().all(Option::is_some) {
        sampled.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect()
    } else {
        if expected.iter().any(|v| v.is_nan()) {
            return Err(bad("`expected` has empty cells and `sampled` is incomplete".into()));
        }
        expected
    };
    Ok(if theta {
        CsvScan::Theta { thetas: xs, values }
    } else {
        CsvScan::Delay { delays: xs, values }
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "unit", rename_all = "lowercase")]
pub enum FitReport {
    Bs { fit: HomFit },
    Pbs { fit: PhaseFit },
}

/// Fits a previously written scan CSV; returns the summary line and the fit.
pub fn fit_csv(path: &Path) -> Result<(String, FitReport), RunError> {
    let label = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    Ok(match read_scan_csv(path)? {
        CsvScan::Delay { delays, values } => {
            let fit = fit_hom_counts(&delays, &values)?;
            (hom_summary(&label, &fit), FitReport::Bs { fit })
        }
        CsvScan::Theta { thetas, values } => {
            let fit = fit_phase_values(&thetas, &values)?;
            (phase_summary(&label, &fit), FitReport::Pbs { fit })
        }
    })
}

impl FitReport {
    pub fn unit(&self) -> Unit {
        match self {
            Self::Bs { .. } => Unit::BsInterference,
            Self::Pbs { .. } => Unit::PbsExchangePhase,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::parse_experiment;

    fn spec(text: &str) -> ExperimentSpec {
        parse_experiment(text).unwrap().spec
    }

    #[test]
    fn ideal_summaries() {
        let dir = tempfile::tempdir().unwrap();
        let cases = [
            ("state: phi+ x nu+\nunit: bs\nnoise: none\n", "Dip V=1.000"),
            ("state: psi- x mu+\nunit: bs\nnoise: none\n", "Peak V=1.000"),
            ("state: nu-\nunit: pbs\nnoise: none\n", "Phi=3.1416 rad"),
            ("state: mu+\nunit: pbs\nnoise: none\n", "Phi=0.0000 rad"),
        ];
        for (text, want) in cases {
            let out = run_experiment(&spec(text), dir.path()).unwrap();
            assert!(out.summary.contains(want), "{} lacks {want}", out.summary);
            assert_eq!(out.files.len(), 2);
            assert!(out.warnings.is_empty());
        }
    }

    #[test]
    fn csv_fit_matches_run() {
        let dir = tempfile::tempdir().unwrap();
        let s = spec("state: phi- x nu-\nunit: bs\nseed: 5\nfloor: 0.05\noutput: s.csv\n");
        let out = run_experiment(&s, dir.path()).unwrap();
        let RunResult::Bs { fit, .. } = &out.result else { panic!() };
        let (_, report) = fit_csv(&dir.path().join("s.csv")).unwrap();
        let FitReport::Bs { fit: again } = report else { panic!() };
        assert_eq!(fit.kind, again.kind);
        assert!((fit.visibility - again.visibility).abs() < 1e-12);
    }

    #[test]
    fn wrong_prep_warns() {
        let dir = tempfile::tempdir().unwrap();
        let s = spec("state: psi- x nu-\nunit: bs\nprep: arm1: HWP 45deg\nnoise: none\noutput: x.csv\n");
        let out = run_experiment(&s, dir.path()).unwrap();
        assert_eq!(out.warnings.len(), 1);
    }
}
