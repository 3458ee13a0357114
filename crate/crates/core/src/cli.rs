//! Command-line front end.
//!
//! Exit status is 0 on success, 1 on usage errors and 2 on data errors.
//! JSON numbers carry 17 significant digits; human-readable tables carry 6.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::embedding::{estimate_delay_params, DelayParams, EmbeddingConfig, FnnConfig};
use crate::error::{invalid, Error, Result};
use crate::forecast::{
    rolling_forecast, AutoArConfig, ForecastMethod, ForecastRun, ForecastTask, LmaConfig,
    MethodKind,
};
use crate::heuristic::{classify, fit_points, HeuristicFit, WpeMasePoint};
use crate::metrics::{mase, MaseScore};
use crate::ordinal::{
    permutation_entropy, persistent_entropy, EntropyMode, EntropyReport,
    DEFAULT_PERSISTENCE_TOLERANCE,
};
use crate::pipeline::{
    aggregate, profile_many, AggregateRow, NamedFit, ProfileConfig, ProfileReport,
};
use crate::signals::{generate, GeneratorSpec, SignalKind, SignalParams};
use crate::trace::{read_trace, write_plain, write_plain_file, ColumnSelector, TraceFile};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable capping worker threads for `profile` (0 or unset = automatic).
pub const THREADS_ENV: &str = "PREDICTABILITY_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "predictability",
    version,
    about = "Weighted permutation entropy, reference forecasts and the WPE-vs-MASE heuristic"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Weighted (or plain) permutation entropy of a trace.
    Wpe(WpeArgs),
    /// Delay and dimension estimates with their diagnostic curves, as CSV.
    EmbedParams(EmbedArgs),
    /// Rolling one-step forecast of the last part of a trace.
    Forecast(ForecastArgs),
    /// WPE, all forecasts, MASE and verdicts for one or more traces.
    Profile(ProfileArgs),
    /// Fits the WPE-vs-MASE curve to a CSV of (mase, wpe) points.
    Fit(FitArgs),
    /// Classifies one (MASE, WPE) point against a fit.
    Classify(ClassifyArgs),
    /// Writes a synthetic trace.
    Gen(GenArgs),
    /// Flattens profile JSON documents into (mase, wpe, method, label, verdict) rows.
    Scatter(ScatterArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// CSV column to read, by header name or 0-based index.
    #[arg(long)]
    column: Option<String>,
}

impl InputArgs {
    fn read(&self, path: &Path) -> Result<TraceFile> {
        read_trace(path, self.column.as_deref().map(ColumnSelector::parse))
    }
}

#[derive(Debug, Args)]
struct WpeArgs {
    file: PathBuf,
    /// Fixed word length; otherwise the persistent search picks one.
    #[arg(long)]
    word_length: Option<usize>,
    /// Unweighted permutation entropy.
    #[arg(long)]
    plain_pe: bool,
    #[arg(long, default_value_t = DEFAULT_PERSISTENCE_TOLERANCE)]
    tolerance: f64,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Debug, Args)]
struct EmbedArgs {
    file: PathBuf,
    #[arg(long, default_value_t = crate::embedding::DEFAULT_MAX_LAG)]
    max_lag: usize,
    #[arg(long, default_value_t = crate::embedding::DEFAULT_BINS)]
    bins: usize,
    #[arg(long, default_value_t = 10)]
    m_max: usize,
    #[arg(long, default_value_t = 15.0)]
    r_tol: f64,
    #[arg(long, default_value_t = 2.0)]
    a_tol: f64,
    #[arg(long, default_value_t = 0.01)]
    threshold: f64,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Debug, Args)]
struct ForecastArgs {
    file: PathBuf,
    /// random_walk, naive, auto_ar or lma.
    #[arg(long)]
    method: String,
    #[arg(long, default_value_t = 0.9)]
    train_fraction: f64,
    #[arg(long, default_value_t = 1)]
    refit_interval: usize,
    /// LMA delay (with --m); estimated from the training prefix otherwise.
    #[arg(long, requires = "m")]
    tau: Option<usize>,
    #[arg(long, requires = "tau")]
    m: Option<usize>,
    #[arg(long)]
    min_separation: Option<usize>,
    #[arg(long, default_value_t = 10)]
    p_max: usize,
    /// Force (true) or forbid (false) differencing in auto_ar.
    #[arg(long)]
    difference: Option<bool>,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Debug, Args)]
struct ProfileArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Comma-separated method names, or "all".
    #[arg(long, default_value = "all")]
    methods: String,
    /// Fit JSON; the reference fit is used otherwise.
    #[arg(long)]
    fit: Option<PathBuf>,
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
    #[arg(long, default_value_t = 0.9)]
    train_fraction: f64,
    #[arg(long, default_value_t = 1)]
    refit_interval: usize,
    #[arg(long)]
    word_length: Option<usize>,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// CSV with `mase` and `wpe` columns.
    points: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = crate::heuristic::DEFAULT_MASE_CAP)]
    mase_cap: f64,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[arg(long)]
    fit: Option<PathBuf>,
    #[arg(long)]
    mase: f64,
    #[arg(long)]
    wpe: f64,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// logistic, henon, lorenz_x, sine, square_wave, iid_uniform,
    /// iid_gaussian, gaussian_random_walk or ar1.
    #[arg(long)]
    kind: String,
    #[arg(long)]
    length: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    transient: Option<usize>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long)]
    henon_a: Option<f64>,
    #[arg(long)]
    henon_b: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long)]
    period: Option<f64>,
    #[arg(long)]
    phase: Option<f64>,
    #[arg(long)]
    low: Option<f64>,
    #[arg(long)]
    high: Option<f64>,
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    ar_coefficient: Option<f64>,
    #[arg(long)]
    step_scale: Option<f64>,
}

#[derive(Debug, Args)]
struct ScatterArgs {
    /// JSON documents written by `profile --json`.
    #[arg(required = true)]
    reports: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Runs the CLI with `args` (including the program name) and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let informational = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let rendered = e.render().to_string();
            if informational {
                let _ = write!(out, "{rendered}");
                return 0;
            }
            let _ = write!(err, "{rendered}");
            return 1;
        }
    };
    let result = match cli.command {
        Command::Wpe(a) => cmd_wpe(&a, out),
        Command::EmbedParams(a) => cmd_embed(&a, out),
        Command::Forecast(a) => cmd_forecast(&a, out),
        Command::Profile(a) => cmd_profile(&a, out),
        Command::Fit(a) => cmd_fit(&a, out),
        Command::Classify(a) => cmd_classify(&a, out),
        Command::Gen(a) => cmd_gen(&a, out),
        Command::Scatter(a) => cmd_scatter(&a, out),
    };
    match result {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(CliError::Data(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

enum CliError {
    Usage(String),
    Data(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Data(Error::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        })
    }
}

type CliResult = std::result::Result<(), CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Pretty JSON formatter that prints every float with 17 significant digits.
struct SigDigitsFormatter(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for SigDigitsFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value` as pretty JSON with 17-significant-digit floats.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let formatter = SigDigitsFormatter(serde_json::ser::PrettyFormatter::new());
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, formatter);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// `x` with `digits` significant digits, positional where practical.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.prec$e}", prec = digits - 1);
    // Take the exponent after rounding so 9.999999 counts as 1e1.
    let exp: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

fn g6(x: f64) -> String {
    format_sig(x, 6)
}

#[derive(Serialize)]
struct WpeDocument<'a> {
    schema_version: u32,
    file: String,
    series_length: usize,
    #[serde(flatten)]
    report: &'a EntropyReport,
    converged: bool,
    curve: Vec<(usize, f64)>,
}

fn cmd_wpe(a: &WpeArgs, out: &mut dyn Write) -> CliResult {
    let trace = a.input.read(&a.file)?;
    let mode = if a.plain_pe {
        EntropyMode::Plain
    } else {
        EntropyMode::Weighted
    };
    let (report, converged, curve) = match a.word_length {
        Some(l) => {
            let r = permutation_entropy(&trace.series, l, mode)?;
            (r, true, vec![(l, r.normalized)])
        }
        None => {
            let p = persistent_entropy(&trace.series, mode, a.tolerance)?;
            (p.report, p.converged, p.curve)
        }
    };
    if a.json {
        let doc = WpeDocument {
            schema_version: SCHEMA_VERSION,
            file: trace.path.display().to_string(),
            series_length: trace.series.len(),
            report: &report,
            converged,
            curve,
        };
        out.write_all(to_json_string(&doc)?.as_bytes())?;
    } else {
        let label = if a.plain_pe { "PE" } else { "WPE" };
        writeln!(out, "file            {}", trace.path.display())?;
        writeln!(out, "length          {}", trace.series.len())?;
        writeln!(out, "word length     {}", report.word_length)?;
        writeln!(out, "{label:<15} {}", g6(report.normalized))?;
        writeln!(out, "raw entropy     {} bits", g6(report.raw_entropy))?;
        writeln!(out, "redundancy      {}", g6(report.redundancy))?;
        if !converged {
            writeln!(out, "note            did not converge")?;
        }
        if report.degenerate {
            writeln!(
                out,
                "note            degenerate (all windows have zero weight)"
            )?;
        }
    }
    Ok(())
}

fn cmd_embed(a: &EmbedArgs, out: &mut dyn Write) -> CliResult {
    let trace = a.input.read(&a.file)?;
    let cfg = EmbeddingConfig {
        max_lag: a.max_lag,
        bins: a.bins,
        fnn: FnnConfig {
            m_max: a.m_max,
            r_tol: a.r_tol,
            a_tol: a.a_tol,
            threshold: a.threshold,
            min_separation: None,
        },
    };
    let est = estimate_delay_params(&trace.series, &cfg)?;
    writeln!(out, "kind,key,value")?;
    writeln!(out, "param,tau,{}", est.params.tau)?;
    writeln!(out, "param,m,{}", est.params.m)?;
    writeln!(out, "param,tau_found_minimum,{}", est.tau_found_minimum)?;
    writeln!(out, "param,fnn_converged,{}", est.fnn_converged)?;
    for (lag, bits) in est.params.tau_curve.iter().flatten() {
        writeln!(out, "mutual_information,{lag},{bits}")?;
    }
    for (m, frac) in est.params.fnn_curve.iter().flatten() {
        writeln!(out, "false_neighbors,{m},{frac}")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ForecastDocument<'a> {
    schema_version: u32,
    file: String,
    run: &'a ForecastRun,
    mase: Option<MaseScore>,
    mase_error: Option<String>,
}

fn cmd_forecast(a: &ForecastArgs, out: &mut dyn Write) -> CliResult {
    let kind = MethodKind::parse(&a.method).ok_or_else(|| {
        usage(format!(
            "unknown method {:?} (expected random_walk, naive, auto_ar or lma)",
            a.method
        ))
    })?;
    let method = match kind {
        MethodKind::RandomWalk => ForecastMethod::RandomWalk,
        MethodKind::Naive => ForecastMethod::Naive,
        MethodKind::AutoAr => ForecastMethod::AutoAr(AutoArConfig {
            p_max: a.p_max,
            difference: a.difference,
            ..Default::default()
        }),
        MethodKind::Lma => {
            let params = match (a.tau, a.m) {
                (Some(tau), Some(m)) => {
                    Some(DelayParams::new(tau, m).map_err(|e| usage(e.to_string()))?)
                }
                _ => None,
            };
            ForecastMethod::Lma(LmaConfig {
                params,
                min_separation: a.min_separation,
                ..Default::default()
            })
        }
    };
    let trace = a.input.read(&a.file)?;
    let task = ForecastTask::new(trace.series, method)
        .with_train_fraction(a.train_fraction)
        .with_refit_interval(a.refit_interval);
    let run = rolling_forecast(&task)?;
    let (score, score_err) = match mase(&run) {
        Ok(s) => (Some(s), None),
        Err(e) => (None, Some(e.to_string())),
    };
    if a.json {
        let doc = ForecastDocument {
            schema_version: SCHEMA_VERSION,
            file: trace.path.display().to_string(),
            run: &run,
            mase: score,
            mase_error: score_err,
        };
        out.write_all(to_json_string(&doc)?.as_bytes())?;
    } else {
        writeln!(out, "{:>8} {:>14} {:>14}", "index", "prediction", "truth")?;
        for ((d, p), c) in run
            .diagnostics
            .iter()
            .zip(&run.predictions)
            .zip(&run.truths)
        {
            writeln!(out, "{:>8} {:>14} {:>14}", d.index + 1, g6(*p), g6(*c))?;
        }
        match (score, score_err) {
            (Some(s), _) => writeln!(out, "MASE {} (n = {}, k = {})", g6(s.value), s.n, s.k)?,
            (None, Some(e)) => writeln!(out, "MASE unavailable: {e}")?,
            (None, None) => {}
        }
        for w in &run.warnings {
            writeln!(out, "warning: {w}")?;
        }
    }
    Ok(())
}

fn parse_methods(spec: &str) -> std::result::Result<Vec<MethodKind>, CliError> {
    if spec.trim() == "all" {
        return Ok(MethodKind::ALL.to_vec());
    }
    spec.split(',')
        .map(|s| MethodKind::parse(s.trim()).ok_or_else(|| usage(format!("unknown method {s:?}"))))
        .collect()
}

fn load_fit(path: Option<&Path>) -> std::result::Result<NamedFit, CliError> {
    let Some(path) = path else {
        return Ok(NamedFit::reference());
    };
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let fit: HeuristicFit = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })?;
    fit.validate()?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "fit".into());
    Ok(NamedFit::new(name, fit))
}

/// File stem with a trailing numeric trial suffix (`_3`, `-12`, `.7`) removed.
pub fn group_key(label: &str) -> String {
    if let Some(pos) = label.rfind(['_', '-', '.']) {
        let suffix = &label[pos + 1..];
        if pos > 0 && !suffix.is_empty() && suffix.bytes().all(|b| b.is_ascii_digit()) {
            return label[..pos].to_string();
        }
    }
    label.to_string()
}

#[derive(Serialize, Deserialize)]
struct ProfileDocument {
    schema_version: u32,
    fit_name: String,
    fit: HeuristicFit,
    reports: Vec<ProfileReport>,
    aggregate: Vec<AggregateRow>,
}

fn thread_cap() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

fn cmd_profile(a: &ProfileArgs, out: &mut dyn Write) -> CliResult {
    let methods = parse_methods(&a.methods)?;
    let fit = load_fit(a.fit.as_deref())?;
    let config = ProfileConfig {
        train_fraction: a.train_fraction,
        refit_interval: a.refit_interval,
        word_length: a.word_length,
        ..Default::default()
    };
    let mut series = Vec::with_capacity(a.files.len());
    for f in &a.files {
        series.push(a.input.read(f)?.series);
    }
    let results = profile_many(&series, &methods, &fit, &config, thread_cap())?;
    let mut reports = Vec::with_capacity(results.len());
    for (file, r) in a.files.iter().zip(results) {
        let mut report =
            r.map_err(|e| CliError::Data(invalid(format!("{}: {e}", file.display()))))?;
        report.group = group_key(&report.label);
        reports.push(report);
    }
    let table = aggregate(&reports)?;

    if a.json {
        let doc = ProfileDocument {
            schema_version: SCHEMA_VERSION,
            fit_name: fit.name.clone(),
            fit: fit.fit.clone(),
            reports,
            aggregate: table,
        };
        out.write_all(to_json_string(&doc)?.as_bytes())?;
    } else if a.csv {
        writeln!(out, "label,group,method,mase,wpe,verdict,nonstationary")?;
        for r in &reports {
            for e in &r.methods {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.label,
                    r.group,
                    e.method,
                    e.mase.map(|s| s.value.to_string()).unwrap_or_default(),
                    r.wpe.normalized,
                    e.verdict.map(|v| v.name()).unwrap_or(""),
                    r.nonstationary.map(|b| b.to_string()).unwrap_or_default(),
                )?;
            }
        }
    } else {
        write_profile_tables(out, &fit, &reports, &table)?;
    }
    Ok(())
}

fn write_profile_tables(
    out: &mut dyn Write,
    fit: &NamedFit,
    reports: &[ProfileReport],
    table: &[AggregateRow],
) -> io::Result<()> {
    writeln!(
        out,
        "fit {}: a = {} ± {}, b = {} ± {}",
        fit.name,
        g6(fit.fit.a),
        g6(fit.fit.sigma_a),
        g6(fit.fit.b),
        g6(fit.fit.sigma_b)
    )?;
    for r in reports {
        writeln!(out)?;
        writeln!(
            out,
            "{} (N = {}, WPE = {} at word length {})",
            r.label,
            r.length,
            g6(r.wpe.normalized),
            r.wpe.word_length
        )?;
        if let Some(p) = &r.delay_params {
            writeln!(out, "  lma embedding: tau = {}, m = {}", p.tau, p.m)?;
        }
        if let Some(flag) = r.nonstationary {
            writeln!(out, "  nonstationary: {flag}")?;
        }
        writeln!(out, "  {:<12} {:>12} {:>18}", "method", "MASE", "verdict")?;
        for e in &r.methods {
            let mase = e.mase.map(|s| g6(s.value)).unwrap_or_else(|| "-".into());
            let verdict = e.verdict.map(|v| v.name()).unwrap_or("-");
            writeln!(
                out,
                "  {:<12} {:>12} {:>18}",
                e.method.name(),
                mase,
                verdict
            )?;
            for w in &e.warnings {
                writeln!(out, "    warning: {w}")?;
            }
        }
        for w in &r.warnings {
            writeln!(out, "  warning: {w}")?;
        }
    }
    writeln!(out)?;
    write!(out, "{:<20} {:>6} {:>22}", "group", "trials", "WPE")?;
    let methods: Vec<MethodKind> = MethodKind::ALL
        .into_iter()
        .filter(|m| table.iter().any(|row| row.mase.iter().any(|(k, _)| k == m)))
        .collect();
    for m in &methods {
        write!(out, " {:>22}", format!("{} MASE", m.name()))?;
    }
    writeln!(out)?;
    for row in table {
        let wpe = format!("{} ± {}", g6(row.wpe.mean), g6(row.wpe.std));
        write!(out, "{:<20} {:>6} {:>22}", row.group, row.trials, wpe)?;
        for m in &methods {
            let cell = row
                .mase
                .iter()
                .find(|(k, _)| k == m)
                .and_then(|(_, s)| *s)
                .map(|s| format!("{} ± {}", g6(s.mean), g6(s.std)))
                .unwrap_or_else(|| "-".into());
            write!(out, " {cell:>22}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct FitDocument<'a> {
    schema_version: u32,
    #[serde(flatten)]
    fit: &'a HeuristicFit,
}

fn read_points(path: &Path) -> Result<Vec<WpeMasePoint>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mase = crate::trace::parse_csv(&text, path, &ColumnSelector::Name("mase".into()))?;
    let wpe = crate::trace::parse_csv(&text, path, &ColumnSelector::Name("wpe".into()))?;
    Ok(mase
        .into_iter()
        .zip(wpe)
        .map(|(m, w)| WpeMasePoint::new(m, w))
        .collect())
}

fn cmd_fit(a: &FitArgs, out: &mut dyn Write) -> CliResult {
    let points = read_points(&a.points)?;
    let mut fit = fit_points(&points)?;
    fit.mase_cap = a.mase_cap;
    fit.validate()?;
    let json = to_json_string(&FitDocument {
        schema_version: SCHEMA_VERSION,
        fit: &fit,
    })?;
    match &a.out {
        Some(path) => std::fs::write(path, json).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?,
        None => out.write_all(json.as_bytes())?,
    }
    Ok(())
}

fn cmd_classify(a: &ClassifyArgs, out: &mut dyn Write) -> CliResult {
    if !(a.mase.is_finite() && a.mase >= 0.0) || !a.wpe.is_finite() {
        return Err(usage(
            "--mase must be a finite nonnegative number and --wpe finite",
        ));
    }
    let fit = load_fit(a.fit.as_deref())?;
    let verdict = classify(&WpeMasePoint::new(a.mase, a.wpe), &fit.fit);
    writeln!(out, "{verdict}")?;
    Ok(())
}

fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> CliResult {
    let kind = SignalKind::parse(&a.kind).ok_or_else(|| {
        let names: Vec<&str> = SignalKind::ALL.iter().map(|k| k.name()).collect();
        usage(format!(
            "unknown kind {:?} (expected one of {})",
            a.kind,
            names.join(", ")
        ))
    })?;
    let d = SignalParams::default();
    let params = SignalParams {
        r: a.r.unwrap_or(d.r),
        x0: a.x0,
        henon_a: a.henon_a.unwrap_or(d.henon_a),
        henon_b: a.henon_b.unwrap_or(d.henon_b),
        lorenz_sigma: a.sigma.unwrap_or(d.lorenz_sigma),
        lorenz_rho: a.rho.unwrap_or(d.lorenz_rho),
        lorenz_beta: a.beta.unwrap_or(d.lorenz_beta),
        dt: a.dt.unwrap_or(d.dt),
        amplitude: a.amplitude.unwrap_or(d.amplitude),
        period: a.period.unwrap_or(d.period),
        phase: a.phase.unwrap_or(d.phase),
        low: a.low.unwrap_or(d.low),
        high: a.high.unwrap_or(d.high),
        noise: a.noise.unwrap_or(d.noise),
        ar_coefficient: a.ar_coefficient.unwrap_or(d.ar_coefficient),
        step_scale: a.step_scale.unwrap_or(d.step_scale),
    };
    let mut spec = GeneratorSpec::new(kind, a.length, a.seed).with_params(params);
    if let Some(t) = a.transient {
        spec = spec.with_transient(t);
    }
    let series = generate(&spec).map_err(|e| usage(e.to_string()))?;
    let comments = vec![format!(
        "predictability gen kind={} length={} seed={} transient={}",
        kind.name(),
        spec.length,
        spec.seed,
        spec.transient_discard
    )];
    match &a.out {
        Some(path) => write_plain_file(&series, &comments, path)?,
        None => write_plain(&series, &comments, out)?,
    }
    Ok(())
}

fn cmd_scatter(a: &ScatterArgs, out: &mut dyn Write) -> CliResult {
    let mut rows = String::from("mase,wpe,method,label,verdict\n");
    for path in &a.reports {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        let doc: ProfileDocument = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.clone(),
            line: e.line(),
            message: e.to_string(),
        })?;
        for r in &doc.reports {
            for e in &r.methods {
                let (Some(score), Some(verdict)) = (e.mase, e.verdict) else {
                    continue;
                };
                rows.push_str(&format!(
                    "{},{},{},{},{}\n",
                    score.value, r.wpe.normalized, e.method, r.label, verdict
                ));
            }
        }
    }
    match &a.out {
        Some(path) => std::fs::write(path, rows).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?,
        None => out.write_all(rows.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.4995, 6), "0.499500");
        assert_eq!(format_sig(1234.5678, 6), "1234.57");
        assert_eq!(format_sig(-0.001, 6), "-0.00100000");
        assert_eq!(format_sig(9.999999, 6), "10.0000");
        assert_eq!(format_sig(999999.7, 6), "1.00000e6");
        assert_eq!(format_sig(1.5e9, 6), "1.50000e9");
        assert_eq!(format_sig(0.0, 6), "0");
    }

    #[test]
    fn json_floats_have_17_digits() {
        let s = to_json_string(&serde_json::json!({"x": 0.5, "n": 3})).unwrap();
        assert!(s.contains("5.0000000000000000e-1"), "{s}");
        assert!(s.contains("\"n\": 3"));
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.5));
        let x: f64 = 0.1 + 0.2;
        let s = to_json_string(&x).unwrap();
        assert_eq!(s.trim().parse::<f64>().unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn trial_suffixes() {
        assert_eq!(group_key("col_major_3"), "col_major");
        assert_eq!(group_key("gcc-12"), "gcc");
        assert_eq!(group_key("dgesdd5"), "dgesdd5");
        assert_eq!(group_key("run.7"), "run");
        assert_eq!(group_key("_3"), "_3");
        assert_eq!(group_key("plain"), "plain");
    }

    #[test]
    fn method_lists() {
        assert_eq!(parse_methods("all").ok().unwrap().len(), 4);
        assert_eq!(
            parse_methods("lma, naive").ok().unwrap(),
            vec![MethodKind::Lma, MethodKind::Naive]
        );
        assert!(parse_methods("arima").is_err());
    }
}
