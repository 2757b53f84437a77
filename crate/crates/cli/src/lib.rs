//! Experiment drivers behind the `rigidity` binary.
//!
//! Every command writes one table, as CSV (with `# key: value` metadata lines on top)
//! or as JSON `{"metadata": .., "summary": .., "rows": [..]}`. Output goes to `--output`,
//! else to `$RIGIDITY_OUT_DIR/<command>.<csv|json>`, else to stdout.
//!
//! CSV columns per command:
//!
//! | command | columns |
//! |---|---|
//! | `goe-closed` | family, beta, sigma2_goe |
//! | `goe-mc` | family, beta, matrix_dim, samples, seed, bulk_fraction, estimate, std_error, samples_used, closed_form |
//! | `expectation` | L, tau, i_f, first_iterate, floor, tail_floor, genus, envelope_c, half_width |
//! | `variance` | L, tau, k_budget, centered, goe_term, diag_correction, offdiag_term, tail_bound, total, variance |
//! | `decay-study` | tau, i_f, first_iterate, floor, tail_floor (summary: slope) |
//! | `convergence-study` | L, total, deviation, log_bound, tail_bound |
//! | `trace-eval` | L, tau, sns, ssep, nonsimple, unknown, n_osc, statistic |
//!
//! Exit codes: 0 success, 1 numerical or input failure, 2 usage error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use rigidity_core::fixtures::FIXTURE_VERSION;
use rigidity_core::formats::{read_eigenvalues, read_length_spectrum};
use rigidity_core::goe_reference::{sample_goe_variance, sigma2_goe_closed_form};
use rigidity_core::trace_stats::{n_osc_by_class, statistic_from_eigenvalues};
use rigidity_core::wp_asymptotics::{
    decay_study_i_f, default_iterate_split, expectation_sns_finite_g, i_f_detailed,
    limiting_variance, variance_tau0, VarianceBreakdown,
};
use rigidity_core::{Family, GoeMcConfig, KernelParams, TestFunctionPair};

pub const OUT_DIR_ENV: &str = "RIGIDITY_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PairArgs {
    /// fejer, cinf_bump or hann
    #[arg(long, default_value = "fejer", value_parser = parse_family)]
    pub family: Family,
    /// Half-width of the support of f̂
    #[arg(long, default_value_t = 1.0, value_parser = parse_beta)]
    pub beta: f64,
}

impl PairArgs {
    fn pair(&self) -> TestFunctionPair {
        TestFunctionPair::new(self.family, self.beta, 1.0).expect("validated by the parser")
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv, global = true)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Closed-form GOE variance 2∫|x|f̂(x)²dx
    GoeClosed {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Monte Carlo GOE variance of the unfolded smooth statistic
    #[command(allow_negative_numbers = true)]
    GoeMc {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 1000, value_parser = parse_dim)]
        dim: usize,
        #[arg(long, default_value_t = 400, value_parser = parse_samples)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 0.5, value_parser = parse_bulk_fraction)]
        bulk_fraction: f64,
    },
    /// Limiting expectation I_f(L, τ), optionally with a finite-genus band
    #[command(allow_negative_numbers = true)]
    Expectation {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long = "L", value_parser = parse_l)]
        l: f64,
        #[arg(long, default_value_t = 0.0, value_parser = parse_tau)]
        tau: f64,
        #[arg(long, value_parser = parse_genus)]
        genus: Option<f64>,
        #[arg(long, default_value_t = 1.0, value_parser = parse_envelope_c)]
        envelope_c: f64,
    },
    /// Limiting second moment of the oscillatory term, split into parts
    #[command(allow_negative_numbers = true)]
    Variance {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long = "L", value_parser = parse_l)]
        l: f64,
        #[arg(long, default_value_t = 0.0, value_parser = parse_tau)]
        tau: f64,
        #[arg(long, default_value_t = 400, value_parser = parse_k_budget)]
        k_budget: u32,
        /// Variance of the centered statistic Σ f(L r_j) instead
        #[arg(long)]
        centered: bool,
    },
    /// I_f over a list of τ ≥ 1 with the fitted decay slope
    #[command(allow_negative_numbers = true)]
    DecayStudy {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long = "L", value_parser = parse_l)]
        l: f64,
        #[arg(long, value_delimiter = ',', required = true, value_parser = parse_decay_tau)]
        taus: Vec<f64>,
    },
    /// Centered variance against Σ²_GOE over a list of L
    #[command(allow_negative_numbers = true)]
    ConvergenceStudy {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long = "Ls", value_delimiter = ',', default_value = "10,20,40,80", value_parser = parse_l)]
        ls: Vec<f64>,
        #[arg(long, default_value_t = 400, value_parser = parse_k_budget)]
        k_budget: u32,
    },
    /// Oscillatory term from a length spectrum, and the statistic from eigenvalues
    #[command(allow_negative_numbers = true)]
    TraceEval {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long = "L", value_parser = parse_l)]
        l: f64,
        #[arg(long, value_delimiter = ',', default_value = "0", value_parser = parse_tau)]
        taus: Vec<f64>,
        #[arg(long)]
        spectrum: PathBuf,
        #[arg(long)]
        eigenvalues: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::GoeClosed { .. } => "goe-closed",
            Command::GoeMc { .. } => "goe-mc",
            Command::Expectation { .. } => "expectation",
            Command::Variance { .. } => "variance",
            Command::DecayStudy { .. } => "decay-study",
            Command::ConvergenceStudy { .. } => "convergence-study",
            Command::TraceEval { .. } => "trace-eval",
        }
    }
}

#[derive(Debug, Clone, Parser, Serialize)]
#[command(
    name = "rigidity",
    version,
    about = "Smooth linear statistics of hyperbolic surfaces"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: rigidity_core::Error| e.to_string())
}

fn positive(s: &str, what: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err(format!("{what} must be positive")),
        Err(_) => Err(format!("{what} must be a number")),
    }
}

fn nonnegative(s: &str, what: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err(format!("{what} must be nonnegative")),
        Err(_) => Err(format!("{what} must be a number")),
    }
}

fn parse_l(s: &str) -> Result<f64, String> {
    positive(s, "L")
}

fn parse_beta(s: &str) -> Result<f64, String> {
    positive(s, "beta")
}

fn parse_tau(s: &str) -> Result<f64, String> {
    nonnegative(s, "tau")
}

fn parse_envelope_c(s: &str) -> Result<f64, String> {
    nonnegative(s, "envelope_c")
}

fn parse_decay_tau(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 1.0 && v.is_finite() => Ok(v),
        Ok(_) => Err("decay study needs tau >= 1".into()),
        Err(_) => Err("tau must be a number".into()),
    }
}

fn parse_genus(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 2.0 && v.is_finite() => Ok(v),
        Ok(_) => Err("genus must be > 2 for the finite-genus band".into()),
        Err(_) => Err("genus must be a number".into()),
    }
}

fn at_least<T: std::str::FromStr + PartialOrd + std::fmt::Display>(
    s: &str,
    min: T,
    what: &str,
) -> Result<T, String> {
    match s.parse::<T>() {
        Ok(v) if v >= min => Ok(v),
        _ => Err(format!("{what} must be an integer >= {min}")),
    }
}

fn parse_k_budget(s: &str) -> Result<u32, String> {
    at_least(s, 2u32, "k_budget")
}

fn parse_dim(s: &str) -> Result<usize, String> {
    at_least(s, 64usize, "dim")
}

fn parse_samples(s: &str) -> Result<usize, String> {
    at_least(s, 16usize, "samples")
}

fn parse_bulk_fraction(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v < 1.0 => Ok(v),
        _ => Err("bulk_fraction must lie in (0, 1)".into()),
    }
}

/// Outcome of argument parsing that does not yield a config.
#[derive(Debug)]
pub enum ParseOutcome {
    /// `--help` or `--version`: print the text and exit 0.
    Info(String),
    /// Exit 2 with this one-line diagnostic.
    Usage(String),
}

/// Parses `argv` (including the program name) into a validated config.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, ParseOutcome>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    RunConfig::try_parse_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ParseOutcome::Info(e.to_string()),
            _ => {
                let text = e.to_string();
                let line = text
                    .lines()
                    .find(|l| !l.trim().is_empty())
                    .unwrap_or("invalid arguments")
                    .trim_start_matches("error: ")
                    .to_string();
                ParseOutcome::Usage(line)
            }
        }
    })
}

#[derive(Debug)]
pub struct RunError(pub String);

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<rigidity_core::Error> for RunError {
    fn from(e: rigidity_core::Error) -> Self {
        RunError(e.to_string())
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError(format!("io error: {e}"))
    }
}

type RunResult<T> = std::result::Result<T, RunError>;

#[derive(Serialize)]
struct GoeClosedRow {
    family: Family,
    beta: f64,
    sigma2_goe: f64,
}

#[derive(Serialize)]
struct GoeMcRow {
    family: Family,
    beta: f64,
    matrix_dim: usize,
    samples: usize,
    seed: u64,
    bulk_fraction: f64,
    estimate: f64,
    std_error: f64,
    samples_used: usize,
    closed_form: f64,
}

#[derive(Serialize)]
struct ExpectationRow {
    #[serde(rename = "L")]
    l: f64,
    tau: f64,
    i_f: f64,
    first_iterate: f64,
    floor: f64,
    tail_floor: f64,
    genus: Option<f64>,
    envelope_c: Option<f64>,
    half_width: Option<f64>,
}

#[derive(Serialize)]
struct VarianceRow {
    #[serde(rename = "L")]
    l: f64,
    tau: f64,
    k_budget: u32,
    centered: bool,
    goe_term: f64,
    diag_correction: f64,
    offdiag_term: f64,
    tail_bound: f64,
    total: f64,
    variance: f64,
}

#[derive(Serialize)]
struct DecayRow {
    tau: f64,
    i_f: f64,
    first_iterate: f64,
    floor: f64,
    tail_floor: f64,
}

#[derive(Serialize)]
struct ConvergenceRow {
    #[serde(rename = "L")]
    l: f64,
    total: f64,
    deviation: f64,
    log_bound: f64,
    tail_bound: f64,
}

#[derive(Serialize)]
struct TraceRow {
    #[serde(rename = "L")]
    l: f64,
    tau: f64,
    sns: f64,
    ssep: f64,
    nonsimple: f64,
    unknown: f64,
    n_osc: f64,
    statistic: Option<f64>,
}

/// A finished table, before serialization.
struct Table {
    rows: Vec<serde_json::Value>,
    headers: Vec<&'static str>,
    summary: Option<serde_json::Value>,
}

impl Table {
    fn new<R: Serialize>(headers: &[&'static str], rows: &[R]) -> Self {
        Table {
            rows: rows
                .iter()
                .map(|r| serde_json::to_value(r).expect("plain row"))
                .collect(),
            headers: headers.to_vec(),
            summary: None,
        }
    }
}

fn variance_row(
    l: f64,
    tau: f64,
    k_budget: u32,
    centered: bool,
    b: &VarianceBreakdown,
) -> VarianceRow {
    VarianceRow {
        l,
        tau,
        k_budget,
        centered,
        goe_term: b.goe_term,
        diag_correction: b.diag_correction,
        offdiag_term: b.offdiag_term,
        tail_bound: b.tail_bound,
        total: b.total,
        variance: b.variance(),
    }
}

fn compute(command: &Command) -> RunResult<Table> {
    Ok(match command {
        Command::GoeClosed { pair } => Table::new(
            &["family", "beta", "sigma2_goe"],
            &[GoeClosedRow {
                family: pair.family,
                beta: pair.beta,
                sigma2_goe: sigma2_goe_closed_form(&pair.pair()),
            }],
        ),
        Command::GoeMc {
            pair,
            dim,
            samples,
            seed,
            bulk_fraction,
        } => {
            let cfg = GoeMcConfig::new(pair.pair(), *dim, *samples, *seed)
                .with_bulk_fraction(*bulk_fraction);
            let r = sample_goe_variance(&cfg)?;
            Table::new(
                &[
                    "family",
                    "beta",
                    "matrix_dim",
                    "samples",
                    "seed",
                    "bulk_fraction",
                    "estimate",
                    "std_error",
                    "samples_used",
                    "closed_form",
                ],
                &[GoeMcRow {
                    family: pair.family,
                    beta: pair.beta,
                    matrix_dim: *dim,
                    samples: *samples,
                    seed: *seed,
                    bulk_fraction: *bulk_fraction,
                    estimate: r.estimate,
                    std_error: r.std_error,
                    samples_used: r.samples_used,
                    closed_form: r.closed_form,
                }],
            )
        }
        Command::Expectation {
            pair,
            l,
            tau,
            genus,
            envelope_c,
        } => {
            let p = KernelParams::new(*l, *tau, pair.pair())?;
            let e = i_f_detailed(&p, default_iterate_split(&p))?;
            let band = match genus {
                Some(g) => Some(expectation_sns_finite_g(&p, *g, *envelope_c)?),
                None => None,
            };
            Table::new(
                &[
                    "L",
                    "tau",
                    "i_f",
                    "first_iterate",
                    "floor",
                    "tail_floor",
                    "genus",
                    "envelope_c",
                    "half_width",
                ],
                &[ExpectationRow {
                    l: *l,
                    tau: *tau,
                    i_f: e.value,
                    first_iterate: e.per_k[0],
                    floor: e.beyond_first(),
                    tail_floor: e.beyond_second(),
                    genus: *genus,
                    envelope_c: genus.map(|_| *envelope_c),
                    half_width: band.map(|b| b.half_width),
                }],
            )
        }
        Command::Variance {
            pair,
            l,
            tau,
            k_budget,
            centered,
        } => {
            let b = if *centered {
                variance_tau0(&pair.pair(), *l, *k_budget)?
            } else {
                limiting_variance(&KernelParams::new(*l, *tau, pair.pair())?, *k_budget)?
            };
            let tau = if *centered { 0.0 } else { *tau };
            Table::new(
                &[
                    "L",
                    "tau",
                    "k_budget",
                    "centered",
                    "goe_term",
                    "diag_correction",
                    "offdiag_term",
                    "tail_bound",
                    "total",
                    "variance",
                ],
                &[variance_row(*l, tau, *k_budget, *centered, &b)],
            )
        }
        Command::DecayStudy { pair, l, taus } => {
            let study = decay_study_i_f(&pair.pair(), *l, taus)?;
            let rows: Vec<DecayRow> = study
                .rows
                .iter()
                .map(|r| DecayRow {
                    tau: r.tau,
                    i_f: r.i_f,
                    first_iterate: r.first_iterate,
                    floor: r.floor,
                    tail_floor: r.tail_floor,
                })
                .collect();
            let mut t = Table::new(
                &["tau", "i_f", "first_iterate", "floor", "tail_floor"],
                &rows,
            );
            t.summary = Some(json!({ "slope": study.slope }));
            t
        }
        Command::ConvergenceStudy { pair, ls, k_budget } => {
            let target = sigma2_goe_closed_form(&pair.pair());
            let mut rows = Vec::with_capacity(ls.len());
            for &l in ls {
                let b = variance_tau0(&pair.pair(), l, *k_budget)?;
                rows.push(ConvergenceRow {
                    l,
                    total: b.total,
                    deviation: (b.total - target).abs(),
                    log_bound: l.ln() / (l * l),
                    tail_bound: b.tail_bound,
                });
            }
            let mut t = Table::new(
                &["L", "total", "deviation", "log_bound", "tail_bound"],
                &rows,
            );
            t.summary = Some(json!({ "sigma2_goe": target, "k_budget": k_budget }));
            t
        }
        Command::TraceEval {
            pair,
            l,
            taus,
            spectrum,
            eigenvalues,
        } => {
            let spec = read_length_spectrum(spectrum)?;
            let ev = eigenvalues.as_ref().map(read_eigenvalues).transpose()?;
            let mut rows = Vec::with_capacity(taus.len());
            for &tau in taus {
                let p = KernelParams::new(*l, tau, pair.pair())?;
                let osc = n_osc_by_class(&p, &spec)?;
                let statistic = match &ev {
                    Some(list) => Some(statistic_from_eigenvalues(&p, list)?),
                    None => None,
                };
                rows.push(TraceRow {
                    l: *l,
                    tau,
                    sns: osc.sns,
                    ssep: osc.ssep,
                    nonsimple: osc.nonsimple,
                    unknown: osc.unknown,
                    n_osc: osc.total,
                    statistic,
                });
            }
            let mut t = Table::new(
                &[
                    "L",
                    "tau",
                    "sns",
                    "ssep",
                    "nonsimple",
                    "unknown",
                    "n_osc",
                    "statistic",
                ],
                &rows,
            );
            t.summary = Some(json!({ "genus": spec.genus(), "systole": spec.systole() }));
            t
        }
    })
}

fn metadata(config: &RunConfig, timestamp: u64) -> serde_json::Value {
    json!({
        "tool": "rigidity",
        "version": env!("CARGO_PKG_VERSION"),
        "command": config.command.name(),
        "config": config,
        "fixture_version": FIXTURE_VERSION,
        "timestamp_unix": timestamp,
    })
}

fn csv_field(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::Null => String::new(),
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn write_table(
    config: &RunConfig,
    table: &Table,
    timestamp: u64,
    out: &mut dyn Write,
) -> RunResult<()> {
    let meta = metadata(config, timestamp);
    match config.output.format {
        OutputFormat::Json => {
            let doc = json!({ "metadata": meta, "summary": table.summary, "rows": table.rows });
            serde_json::to_writer_pretty(&mut *out, &doc).map_err(|e| RunError(e.to_string()))?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            for key in [
                "tool",
                "version",
                "command",
                "fixture_version",
                "timestamp_unix",
            ] {
                writeln!(out, "# {key}: {}", csv_field(&meta[key]))?;
            }
            writeln!(out, "# config: {}", meta["config"])?;
            if let Some(serde_json::Value::Object(summary)) = &table.summary {
                for (k, v) in summary {
                    writeln!(out, "# {k}: {}", csv_field(v))?;
                }
            }
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut *out);
            w.write_record(&table.headers)
                .map_err(|e| RunError(e.to_string()))?;
            for row in &table.rows {
                let record: Vec<String> =
                    table.headers.iter().map(|h| csv_field(&row[*h])).collect();
                w.write_record(&record)
                    .map_err(|e| RunError(e.to_string()))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// Destination file for a config: `--output`, else the environment directory, else none
/// (stdout).
pub fn output_path(config: &RunConfig) -> Option<PathBuf> {
    if let Some(p) = &config.output.output {
        return Some(p.clone());
    }
    std::env::var_os(OUT_DIR_ENV).map(|dir| {
        Path::new(&dir).join(format!(
            "{}.{}",
            config.command.name(),
            config.output.format.extension()
        ))
    })
}

/// Runs the command and writes the table to `out`, stamping `timestamp`.
pub fn run_to_writer(config: &RunConfig, timestamp: u64, out: &mut dyn Write) -> RunResult<()> {
    let table = compute(&config.command)?;
    write_table(config, &table, timestamp, out)
}

/// Runs the command, writing to the configured destination. Returns the exit code.
pub fn run(config: &RunConfig) -> i32 {
    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let result = match output_path(config) {
        Some(path) => {
            let mut buf = Vec::new();
            run_to_writer(config, timestamp, &mut buf)
                .and_then(|()| std::fs::write(&path, buf).map_err(RunError::from))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            run_to_writer(config, timestamp, &mut lock)
        }
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
