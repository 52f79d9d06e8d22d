// SPDX-License-Identifier: Apache-2.0

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::eval::{evaluate, InputConfig};
use crate::manifest::{manifest_path, now_unix, RunManifest};
use crate::maximize::{maximize, MaximizeOptions};
use crate::sweep::{plot_script, preset, run_sweep, PresetRun, SweepSpec};
use crate::verify::{run_suite, Suite, VerifyOptions};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "qeff",
    version,
    about = "Quantum efficiency of binary-outcome QND qubit detectors"
)]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "QEFF_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the efficiency report for a model or raw detector config.
    Report {
        /// JSON config file, or `-` for stdin.
        #[arg(long)]
        config: String,
    },
    /// Evaluate metrics along a parameter grid and write CSV + manifest.
    Sweep(SweepArgs),
    /// Run oracle cross-check suites; exits 1 if any gating check fails.
    Verify(VerifyArgs),
    /// Maximize a linear-detector metric over (s, r_th).
    Maximize(MaximizeArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "source")]
pub struct SweepSource {
    /// Sweep spec JSON file, or `-` for stdin.
    #[arg(long)]
    pub config: Option<String>,
    /// Built-in preset: fig1 or fig4.
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: SweepSource,
    /// Output CSV path for `--config` (default sweep.csv); output directory
    /// for `--preset` (default `.`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a gnuplot script next to each CSV.
    #[arg(long)]
    pub plot_script: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suites to run (default: all).
    #[arg(value_enum)]
    pub suites: Vec<Suite>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Monte Carlo samples per config, or random detectors for the
    /// povm-roundtrip and properties suites.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Absolute quadrature tolerance.
    #[arg(long, default_value_t = 1e-13)]
    pub tol: f64,
    /// Also write the JSON summary to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MaximizeArgs {
    #[arg(long, default_value = "eta0")]
    pub metric: String,
    #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
    pub s_min: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub s_max: f64,
    #[arg(long, default_value_t = -4.0, allow_negative_numbers = true)]
    pub r_th_min: f64,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub r_th_max: f64,
    /// Hold the threshold fixed instead of searching over it.
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["r_th_min", "r_th_max"])]
    pub fix_r_th: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub gamma_t: f64,
    /// Stop refining once the grid spacing is below this.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let command_line: Vec<String> = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return 2;
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return 2;
        }
    };
    let stdout = std::io::stdout();
    let result = pool.install(|| dispatch(cli.command, &command_line, &mut stdout.lock()));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command, command_line: &[String], out: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::Report { config } => {
            let v = read_json(&config)?;
            let ev = evaluate(&InputConfig::from_value(&v)?)?;
            emit(out, &ev.to_json())?;
            Ok(0)
        }
        Command::Sweep(args) => cmd_sweep(args, command_line, out),
        Command::Verify(args) => cmd_verify(args, out),
        Command::Maximize(args) => {
            let opts = MaximizeOptions {
                metric: args.metric,
                s_range: (args.s_min, args.s_max),
                r_th_range: args
                    .fix_r_th
                    .map_or((args.r_th_min, args.r_th_max), |r| (r, r)),
                gamma_t: args.gamma_t,
                resolution: args.tol,
            };
            let r = maximize(&opts)?;
            let mut v = serde_json::to_value(&r).expect("result serializes");
            v["domain"] =
                json!({ "s": opts.s_range, "r_th": opts.r_th_range, "gamma_t": opts.gamma_t });
            emit(out, &v)?;
            Ok(0)
        }
    }
}

fn cmd_sweep(
    args: SweepArgs,
    command_line: &[String],
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let (runs, dir) = match (&args.source.config, &args.source.preset) {
        (Some(path), None) => {
            let spec: SweepSpec = serde_json::from_value(read_json(path)?)
                .map_err(|e| CliError::Config(format!("invalid sweep spec: {e}")))?;
            let target = args
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from("sweep.csv"));
            let dir = target.parent().map(Path::to_path_buf).unwrap_or_default();
            let file = target
                .file_name()
                .ok_or_else(|| {
                    CliError::Usage(format!("--out {} is not a file path", target.display()))
                })?
                .to_string_lossy()
                .into_owned();
            (vec![PresetRun { file, spec }], dir)
        }
        (None, Some(name)) => (
            preset(name)?.runs,
            args.out.clone().unwrap_or_else(|| PathBuf::from(".")),
        ),
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --config or --preset".into(),
            ))
        }
    };
    for r in &runs {
        r.spec.validate()?;
    }
    if !dir.as_os_str().is_empty() {
        fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
    }
    let mut written = Vec::new();
    for run in &runs {
        let started = now_unix();
        let table = run_sweep(&run.spec)?;
        let csv_path = dir.join(&run.file);
        write_file(&csv_path, &table.to_csv())?;
        if args.plot_script {
            write_file(
                &csv_path.with_extension("gp"),
                &plot_script(&run.file, &table.header),
            )?;
        }
        let mut m = RunManifest::new(
            command_line.to_vec(),
            serde_json::to_value(&run.spec).expect("spec serializes"),
            started,
        );
        if table.quadrature_points > 0 {
            m.oracle_error_bounds =
                json!({ "linear_quadrature_abs_tol": crate::eval::KAPPA_QUAD_TOL });
        }
        m.output = run.file.clone();
        m.rows = table.rows.len();
        m.finished_unix = now_unix();
        let mpath = manifest_path(&csv_path);
        write_file(
            &mpath,
            &(serde_json::to_string_pretty(&m).expect("manifest serializes") + "\n"),
        )?;
        written.push(json!({ "csv": csv_path, "manifest": mpath, "rows": m.rows }));
    }
    emit(out, &json!({ "outputs": written }))?;
    Ok(0)
}

fn cmd_verify(args: VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if !(args.tol > 0.0) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let suites = if args.suites.is_empty() {
        Suite::ALL.to_vec()
    } else {
        args.suites
    };
    let opts = VerifyOptions {
        seed: args.seed,
        samples: args.samples,
        quad_tol: args.tol,
    };
    let reports = suites
        .iter()
        .map(|&s| run_suite(s, &opts))
        .collect::<Result<Vec<_>, _>>()?;
    let passed = reports.iter().all(|r| r.passed);
    let summary = json!({ "passed": passed, "suites": reports });
    if let Some(path) = &args.out {
        write_file(
            path,
            &(serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n"),
        )?;
    }
    emit(out, &summary)?;
    for r in reports.iter().filter(|r| !r.passed) {
        for c in r.checks.iter().filter(|c| c.gating && !c.passed) {
            eprintln!(
                "FAIL {:?}/{}: residual {:e} > {:e} ({} of {} evaluations); worst config {}",
                r.suite, c.name, c.residual, c.tolerance, c.violations, c.evaluations, c.config
            );
        }
    }
    Ok(if passed { 0 } else { 1 })
}

fn read_json(path: &str) -> Result<Value, CliError> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| io_err(Path::new("<stdin>"), e))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| io_err(Path::new(path), e))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{path}: {e}")))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn io_err(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(v).expect("json serializes")
    )
    .map_err(|e| io_err(Path::new("<stdout>"), e))
}
