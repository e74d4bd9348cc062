//! Parser and printer for experiment description files.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::Serialize;

use super::{DelayScan, ExperimentSpec, OutputFormat, OutputTarget, Unit};
use crate::bell::StateLabel;
use crate::hom::{NoiseModel, ScanConfig, SpectralModel};
use crate::optics::{compose_circuit, ElementSetting};
use crate::units::{from_si, to_si, NM, PS};

const KEYS: &[&str] = &[
    "state",
    "unit",
    "prep",
    "filter_fwhm_nm",
    "center_wavelength_nm",
    "floor",
    "delay_range_ps",
    "points",
    "theta_points",
    "pairs_per_point",
    "accidentals",
    "noise",
    "seed",
    "output",
];
const REQUIRED: &[&str] = &["state", "unit"];
const BS_ONLY: &[&str] = &["delay_range_ps", "points", "prep"];
const PBS_ONLY: &[&str] = &["theta_points"];

const MIN_DELAY_POINTS: usize = 7;
const MIN_THETA_POINTS: usize = 8;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Severity {
    Error,
    Warning,
}

/// A message anchored at a 1-based line and column of the source text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub severity: Severity,
}

impl ParseDiagnostic {
    fn error(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self { line, column, message: message.into(), severity: Severity::Error }
    }

    fn warning(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self { line, column, message: message.into(), severity: Severity::Warning }
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {sev}: {}", self.line, self.column, self.message)
    }
}

/// A successfully parsed file together with any warnings.
#[derive(Clone, Debug, PartialEq)]
pub struct Parsed {
    pub spec: ExperimentSpec,
    pub warnings: Vec<ParseDiagnostic>,
}

#[derive(Copy, Clone)]
struct Entry<'a> {
    line: usize,
    key_col: usize,
    value_col: usize,
    value: &'a str,
}

impl Entry<'_> {
    fn err(&self, message: impl Into<String>) -> ParseDiagnostic {
        ParseDiagnostic::error(self.line, self.value_col, message)
    }
}

fn column_of(line: &str, byte: usize) -> usize {
    line[..byte].chars().count() + 1
}

/// Parses an experiment file. On failure every error found is returned,
/// sorted by position; no partial spec is produced.
pub fn parse_experiment(text: &str) -> Result<Parsed, Vec<ParseDiagnostic>> {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let mut entries: BTreeMap<&str, Entry> = BTreeMap::new();
    // keys present in the text, including ones whose value was rejected
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let key_start = body.len() - body.trim_start().len();
        let Some(colon) = body.find(':') else {
            errors.push(ParseDiagnostic::error(
                line,
                column_of(raw, key_start),
                format!("expected `key: value`, found `{}`", body.trim()),
            ));
            continue;
        };
        let key = body[..colon].trim();
        let key_col = column_of(raw, key_start);
        let after = &body[colon + 1..];
        let value = after.trim();
        let value_col = column_of(raw, colon + 1 + (after.len() - after.trim_start().len()));

        if !KEYS.contains(&key) {
            errors.push(ParseDiagnostic::error(line, key_col, format!("unknown key `{key}`")));
            continue;
        }
        if let Some(first) = seen.get(key) {
            errors.push(ParseDiagnostic::error(
                line,
                key_col,
                format!("duplicate key `{key}` (first set on line {first})"),
            ));
            continue;
        }
        seen.insert(key, line);
        if value.is_empty() {
            errors.push(ParseDiagnostic::error(line, value_col, format!("missing value for `{key}`")));
            continue;
        }
        entries.insert(key, Entry { line, key_col, value_col, value });
    }

    for key in REQUIRED {
        if !seen.contains_key(key) {
            errors.push(ParseDiagnostic::error(1, 1, format!("missing required key: {key}")));
        }
    }
    // without a usable state and unit nothing else can be checked
    if REQUIRED.iter().any(|k| !entries.contains_key(k)) {
        errors.sort_by_key(|d| (d.line, d.column));
        return Err(errors);
    }

    let state_entry = entries["state"];
    let unit_entry = entries["unit"];
    let source = state_entry
        .value
        .parse::<StateLabel>()
        .map_err(|e| state_entry.err(e.to_string()));
    let unit = unit_entry.value.parse::<Unit>().map_err(|e| unit_entry.err(e));
    let (source, unit) = match (source, unit) {
        (Ok(s), Ok(u)) => (s, u),
        (s, u) => {
            errors.extend(s.err());
            errors.extend(u.err());
            errors.sort_by_key(|d| (d.line, d.column));
            return Err(errors);
        }
    };

    // keys that do not apply to the chosen unit are dropped with a warning
    let unused: &[&str] = match unit {
        Unit::BsInterference => PBS_ONLY,
        Unit::PbsExchangePhase => BS_ONLY,
    };
    for key in unused {
        if let Some(e) = entries.remove(key) {
            if *key == "prep" {
                errors.push(ParseDiagnostic::error(
                    e.line,
                    e.key_col,
                    "`prep` is not available with the pbs unit",
                ));
            } else {
                warnings.push(ParseDiagnostic::warning(
                    e.line,
                    e.key_col,
                    format!("`{key}` is ignored by the {unit} unit"),
                ));
            }
        }
    }

    if unit == Unit::PbsExchangePhase && source.as_oam().is_none() {
        errors.push(state_entry.err(format!(
            "the pbs unit requires a pure OAM Bell label (mu+, mu-, nu+, nu-), got `{source}`"
        )));
    }

    let mut spec = ExperimentSpec::new(source, unit);
    let mut delay_range = None;
    for (key, e) in &entries {
        let result = apply(&mut spec, &mut delay_range, key, e);
        if let Err(d) = result {
            errors.push(d);
        }
    }

    if let (Some(prep), StateLabel::Single(_)) = (&entries.get("prep"), source) {
        errors.push(prep.err("`prep` applies only to hyper-entangled states"));
    }
    if let Err(e) = spec.spectral.validate() {
        let anchor = ["floor", "filter_fwhm_nm", "center_wavelength_nm"]
            .iter()
            .find_map(|k| entries.get(k))
            .map_or((1, 1), |e| (e.line, e.value_col));
        errors.push(ParseDiagnostic::error(anchor.0, anchor.1, e.to_string()));
    }
    match delay_range {
        Some((min, max)) => spec.delay = DelayScan { delay_min: min, delay_max: max, ..spec.delay },
        None => {
            // follow the filter when no explicit range is given
            let scan = ScanConfig::default_for(&spec.spectral);
            spec.delay.delay_min = scan.delay_min;
            spec.delay.delay_max = scan.delay_max;
        }
    }

    if errors.is_empty() {
        Ok(Parsed { spec, warnings })
    } else {
        errors.sort_by_key(|d| (d.line, d.column));
        Err(errors)
    }
}

fn number(e: &Entry, what: &str) -> Result<f64, ParseDiagnostic> {
    parse_float(e.value).ok_or_else(|| e.err(format!("{what} must be a finite number, got `{}`", e.value)))
}

fn parse_float(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn positive(e: &Entry, what: &str) -> Result<f64, ParseDiagnostic> {
    let v = number(e, what)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(e.err(format!("{what} must be > 0, got {v}")))
    }
}

fn non_negative(e: &Entry, what: &str) -> Result<f64, ParseDiagnostic> {
    let v = number(e, what)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(e.err(format!("{what} must be >= 0, got {v}")))
    }
}

fn count(e: &Entry, what: &str, min: usize) -> Result<usize, ParseDiagnostic> {
    let n: usize = e
        .value
        .parse()
        .map_err(|_| e.err(format!("{what} must be a whole number, got `{}`", e.value)))?;
    if n < min {
        return Err(e.err(format!("{what} must be at least {min}, got {n}")));
    }
    Ok(n)
}

fn apply(
    spec: &mut ExperimentSpec,
    delay_range: &mut Option<(f64, f64)>,
    key: &str,
    e: &Entry,
) -> Result<(), ParseDiagnostic> {
    match key {
        "state" | "unit" => {}
        "prep" => {
            let mut list = Vec::new();
            for item in e.value.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                list.push(item.parse::<ElementSetting>().map_err(|err| e.err(err.to_string()))?);
            }
            compose_circuit(&list).map_err(|err| e.err(err.to_string()))?;
            spec.prep_overrides = Some(list);
        }
        "filter_fwhm_nm" => spec.spectral.filter_fwhm = to_si(positive(e, "filter_fwhm_nm")?, NM),
        "center_wavelength_nm" => {
            spec.spectral.center_wavelength = to_si(positive(e, "center_wavelength_nm")?, NM)
        }
        "floor" => {
            let f = number(e, "floor")?;
            if !(0.0..1.0).contains(&f) {
                return Err(e.err(format!("floor must lie in [0, 1), got {f}")));
            }
            spec.spectral.distinguishability_floor = f;
        }
        "delay_range_ps" => {
            let parts: Vec<&str> = e
                .value
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            let [lo, hi] = parts[..] else {
                return Err(e.err("delay_range_ps needs two numbers, e.g. `-0.6, 0.6`"));
            };
            let (Some(lo), Some(hi)) = (parse_float(lo), parse_float(hi)) else {
                return Err(e.err(format!("delay_range_ps must be numbers, got `{}`", e.value)));
            };
            if lo >= hi {
                return Err(e.err(format!("delay range is empty: {lo} >= {hi}")));
            }
            *delay_range = Some((to_si(lo, PS), to_si(hi, PS)));
        }
        "points" => spec.delay.points = count(e, "points", MIN_DELAY_POINTS)?,
        "theta_points" => spec.theta_points = count(e, "theta_points", MIN_THETA_POINTS)?,
        "pairs_per_point" => spec.pairs_per_point = non_negative(e, "pairs_per_point")?,
        "accidentals" => spec.accidentals = non_negative(e, "accidentals")?,
        "noise" => {
            spec.noise = match e.value {
                "poisson" => NoiseModel::Poisson,
                "none" => NoiseModel::None,
                other => return Err(e.err(format!("unknown noise model `{other}`, expected `poisson` or `none`"))),
            }
        }
        "seed" => {
            spec.seed = e
                .value
                .parse()
                .map_err(|_| e.err(format!("seed must be a non-negative integer, got `{}`", e.value)))?
        }
        "output" => {
            let mut outs = Vec::new();
            for p in e.value.split(',').map(str::trim) {
                if p.is_empty() {
                    return Err(e.err("empty output path"));
                }
                let path = PathBuf::from(p);
                let format = OutputFormat::of_path(&path)
                    .ok_or_else(|| e.err(format!("output `{p}` must end in .csv or .json")))?;
                outs.push(OutputTarget { path, format });
            }
            spec.outputs = outs;
        }
        _ => unreachable!("key list checked during scanning"),
    }
    Ok(())
}

pub(super) fn serialize(spec: &ExperimentSpec) -> String {
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(": ");
        out.push_str(&v);
        out.push('\n');
    };
    put("state", spec.source.to_string());
    put("unit", spec.unit.to_string());
    if let Some(prep) = &spec.prep_overrides {
        if !prep.is_empty() {
            put("prep", prep.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("; "));
        }
    }
    let SpectralModel { center_wavelength, filter_fwhm, distinguishability_floor } = spec.spectral;
    put("center_wavelength_nm", from_si(center_wavelength, NM).to_string());
    put("filter_fwhm_nm", from_si(filter_fwhm, NM).to_string());
    put("floor", distinguishability_floor.to_string());
    match spec.unit {
        Unit::BsInterference => {
            // the default range follows the filter; leaving it out keeps it that way
            let default = ScanConfig::default_for(&spec.spectral);
            if (spec.delay.delay_min, spec.delay.delay_max) != (default.delay_min, default.delay_max) {
                put(
                    "delay_range_ps",
                    format!("{}, {}", from_si(spec.delay.delay_min, PS), from_si(spec.delay.delay_max, PS)),
                );
            }
            put("points", spec.delay.points.to_string());
        }
        Unit::PbsExchangePhase => put("theta_points", spec.theta_points.to_string()),
    }
    put("pairs_per_point", spec.pairs_per_point.to_string());
    put("accidentals", spec.accidentals.to_string());
    put(
        "noise",
        match spec.noise {
            NoiseModel::Poisson => "poisson",
            NoiseModel::None => "none",
        }
        .to_string(),
    );
    put("seed", spec.seed.to_string());
    if !spec.outputs.is_empty() {
        put(
            "output",
            spec.outputs.iter().map(|o| o.path.display().to_string()).collect::<Vec<_>>().join(", "),
        );
    }
    out
}
