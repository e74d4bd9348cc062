use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hyperhom::experiment::{
    cli_catalog, fit_csv, parse_experiment, render_catalog, run_experiment, ExperimentSpec,
    OutputFormat, OutputTarget, RunError, Unit, OUT_DIR_ENV,
};

const EXIT_INVALID: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

#[derive(Parser)]
#[command(name = "hyperhom", version, about = "Two-photon HOM interference of hyper-entangled states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, ValueEnum)]
enum FileFormat {
    Csv,
    Json,
}

impl From<FileFormat> for OutputFormat {
    fn from(f: FileFormat) -> Self {
        match f {
            FileFormat::Csv => OutputFormat::Csv,
            FileFormat::Json => OutputFormat::Json,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Copy, Clone, PartialEq, ValueEnum)]
enum UnitArg {
    Bs,
    Pbs,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Experiment description file.
    file: PathBuf,
    /// Overrides the file's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for relative output paths (default: $HYPERHOM_OUT_DIR or .).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write only this format.
    #[arg(long, value_enum)]
    format: Option<FileFormat>,
}

#[derive(Subcommand)]
enum Command {
    /// List the 16 hyper-entangled states with their exchange classes.
    Catalog {
        /// Also write the table to this directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: ReportFormat,
    },
    /// Run a beam-splitter HOM delay scan.
    Simulate(RunArgs),
    /// Run the polarizing-beam-splitter exchange-phase scan.
    PhaseScan(RunArgs),
    /// Fit a scan CSV written by `simulate` or `phase-scan`.
    Fit {
        csv: PathBuf,
        /// Require the CSV to come from this unit.
        #[arg(long, value_enum)]
        unit: Option<UnitArg>,
        /// Also write `<stem>.fit.json` to this directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: ReportFormat,
    },
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

fn write(path: &Path, contents: &str) -> Result<(), ExitCode> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| fail(EXIT_RUNTIME, format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| fail(EXIT_RUNTIME, format!("{}: {e}", path.display())))
}

fn load(file: &Path, unit: Unit) -> Result<ExperimentSpec, ExitCode> {
    let text = fs::read_to_string(file)
        .map_err(|e| fail(EXIT_INVALID, format!("{}: {e}", file.display())))?;
    let parsed = parse_experiment(&text).map_err(|diags| {
        for d in diags {
            eprintln!("{}:{d}", file.display());
        }
        ExitCode::from(EXIT_INVALID)
    })?;
    for w in &parsed.warnings {
        eprintln!("{}:{w}", file.display());
    }
    if parsed.spec.unit != unit {
        return Err(fail(
            EXIT_INVALID,
            format!("{} describes the {} unit, this command runs the {unit} unit", file.display(), parsed.spec.unit),
        ));
    }
    Ok(parsed.spec)
}

fn run(args: RunArgs, unit: Unit) -> ExitCode {
    let mut spec = match load(&args.file, unit) {
        Ok(s) => s,
        Err(code) => return code,
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(format) = args.format.map(OutputFormat::from) {
        spec.outputs.retain(|o| o.format == format);
        if spec.outputs.is_empty() {
            spec.outputs.push(OutputTarget {
                path: PathBuf::from(format!("{}.{}", spec.output_stem(), format.extension())),
                format,
            });
        }
    }
    match run_experiment(&spec, &out_dir(args.out)) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            for f in &outcome.files {
                eprintln!("wrote {}", f.display());
            }
            println!("{}", outcome.summary);
            ExitCode::SUCCESS
        }
        Err(e @ RunError::Invalid(_)) => fail(EXIT_INVALID, e),
        Err(e) => fail(EXIT_RUNTIME, e),
    }
}

fn catalog(out: Option<PathBuf>, format: ReportFormat) -> ExitCode {
    let rows = cli_catalog();
    let (text, name) = match format {
        ReportFormat::Text => (render_catalog(&rows), "catalog.txt"),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&rows).expect("serializable");
            s.push('\n');
            (s, "catalog.json")
        }
    };
    print!("{text}");
    if let Some(dir) = out {
        if let Err(code) = write(&dir.join(name), &text) {
            return code;
        }
    }
    if rows.iter().all(|r| r.agrees()) {
        ExitCode::SUCCESS
    } else {
        fail(EXIT_RUNTIME, "parity rule and swap operator disagree")
    }
}

fn fit(csv: PathBuf, unit: Option<UnitArg>, out: Option<PathBuf>, format: ReportFormat) -> ExitCode {
    let (summary, report) = match fit_csv(&csv) {
        Ok(r) => r,
        Err(e @ RunError::BadCsv { .. }) => return fail(EXIT_INVALID, e),
        Err(e) => return fail(EXIT_RUNTIME, e),
    };
    let want = unit.map(|u| match u {
        UnitArg::Bs => Unit::BsInterference,
        UnitArg::Pbs => Unit::PbsExchangePhase,
    });
    if let Some(want) = want.filter(|&w| w != report.unit()) {
        return fail(
            EXIT_INVALID,
            format!("{} holds a {} scan, expected {want}", csv.display(), report.unit()),
        );
    }
    let mut json = serde_json::to_string_pretty(&report).expect("serializable");
    json.push('\n');
    match format {
        ReportFormat::Text => println!("{summary}"),
        ReportFormat::Json => print!("{json}"),
    }
    if let Some(dir) = out {
        let stem = csv.file_stem().map_or_else(|| "scan".into(), |s| s.to_string_lossy().into_owned());
        if let Err(code) = write(&dir.join(format!("{stem}.fit.json")), &json) {
            return code;
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Catalog { out, format } => catalog(out, format),
        Command::Simulate(args) => run(args, Unit::BsInterference),
        Command::PhaseScan(args) => run(args, Unit::PbsExchangePhase),
        Command::Fit { csv, unit, out, format } => fit(csv, unit, out, format),
    }
}
