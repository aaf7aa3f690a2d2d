//! Command-line front end: argument parsing, subcommand runners, output files
//! and exit codes.
//!
//! Every artifact opens with a header carrying the schema version, the
//! subcommand and the full configuration, so a file can be traced back to the
//! run that produced it.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::coeffs::{derive_trial_stream, sample_coefficients, CoefficientModel, RngSpec};
use crate::config::{Bound, OutputFormat, RunConfig, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::neteval::{bench_net_evaluation, build_net, BenchRow};
use crate::perturb::{invariance_report, run_perturb_trials, PerturbControl};
use crate::pipeline::{run_trials, with_threads, TrialBatch};
use crate::poly::{kernel, kernel_direct_sum, sigma_n, TrigPolynomial};
use crate::realcase::{realcase_pipeline, zone_hit_fraction, RealCaseConfig};
use crate::stats::{
    empirical_survival, has_close_pair, intensity_estimate, ks_exponential, limit_intensity,
    limit_rate, mean, poisson_diagnostics, separation_statistic, Interval,
};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const THRESHOLDS_UNMET: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const CONFIG: i32 = 3;
    pub const IO: i32 = 4;
    pub const NUMERIC: i32 = 5;
}

#[derive(Debug, Parser)]
#[command(name = "trigmin", version, about = "Minimum modulus of random trigonometric polynomials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: CommonOpts,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scaled minima n·m_n per trial, KS against the exponential law.
    Simulate {
        /// Also write the survival curve (tau, empirical, reference) as CSV.
        #[arg(long)]
        survival: Option<PathBuf>,
    },
    /// Mean number of near-minima per window.
    Intensity,
    /// Dispersion, void probability and disjoint-window covariance of counts.
    Poisson,
    /// Resampling experiment: matched shifts and law invariance.
    Perturb,
    /// Fraction of trials with two candidates closer than n^-eps.
    Separation,
    /// Kernel evaluator against direct sums.
    KernelCheck {
        /// Number of random angles.
        #[arg(long, default_value_t = 1000)]
        points: usize,
    },
    /// Real-coefficient pipeline with exclusion zones around 0 and π.
    Realcase,
    /// Direct vs transform net evaluation timings.
    Bench {
        /// Net sizes to time (comma separated). Default: powers of two up to the run's net.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate { .. } => "simulate",
            Command::Intensity => "intensity",
            Command::Poisson => "poisson",
            Command::Perturb => "perturb",
            Command::Separation => "separation",
            Command::KernelCheck { .. } => "kernel-check",
            Command::Realcase => "realcase",
            Command::Bench { .. } => "bench",
        }
    }
}

/// Options shared by every subcommand. Flags override the config file.
#[derive(Debug, Default, Args)]
pub struct CommonOpts {
    /// key=value config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// complex, real or cramer.
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Gaussian scale of the Cramér model (default n^-1/2).
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// uniform or laplace.
    #[arg(long, global = true)]
    pub base: Option<String>,
    #[arg(long, global = true)]
    pub eps_net: Option<f64>,
    #[arg(long, global = true)]
    pub eps_event: Option<f64>,
    #[arg(long, global = true)]
    pub c0: Option<f64>,
    /// Use N = 2⌊n^(2-eps)/2⌋ instead of the next power of two.
    #[arg(long, global = true)]
    pub floor_rounding: bool,
    #[arg(long, global = true)]
    pub window_k: Option<f64>,
    #[arg(long, global = true)]
    pub eps_zone: Option<f64>,
    #[arg(long, global = true)]
    pub k_seed: Option<usize>,
    #[arg(long, global = true)]
    pub separation_eps: Option<f64>,
    /// csv or jsonl.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Output file (default stdout).
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Extra config entries, e.g. --set max.ks=0.03.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl CommonOpts {
    /// Build the run configuration: defaults, then the file, then flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut text = match &self.config {
            Some(path) => std::fs::read_to_string(path)?,
            None => String::new(),
        };
        text.push('\n');
        let mut push = |k: &str, v: String| {
            text.push_str(&format!("{k}={v}\n"));
        };
        if let Some(v) = self.n {
            push("n", v.to_string());
        }
        if let Some(v) = self.trials {
            push("trials", v.to_string());
        }
        if let Some(v) = self.seed {
            push("seed", v.to_string());
        }
        if let Some(v) = &self.model {
            push("model.kind", v.clone());
        }
        if let Some(v) = self.delta {
            push("model.delta", v.to_string());
        }
        if let Some(v) = &self.base {
            push("model.base", v.clone());
        }
        if let Some(v) = self.eps_net {
            push("eps_net", v.to_string());
        }
        if let Some(v) = self.eps_event {
            push("eps_event", v.to_string());
        }
        if let Some(v) = self.c0 {
            push("c0", v.to_string());
        }
        if self.floor_rounding {
            push("round_to_pow2", "false".into());
        }
        if let Some(v) = self.window_k {
            push("window_k", v.to_string());
        }
        if let Some(v) = self.eps_zone {
            push("eps_zone", v.to_string());
        }
        if let Some(v) = self.k_seed {
            push("k_seed", v.to_string());
        }
        if let Some(v) = self.separation_eps {
            push("separation_eps", v.to_string());
        }
        if let Some(v) = &self.format {
            push("format", v.clone());
        }
        if let Some(v) = &self.output {
            push("output", v.display().to_string());
        }
        for kv in &self.set {
            if !kv.contains('=') {
                return Err(Error::Config(format!("--set expects KEY=VALUE, got `{kv}`")));
            }
            text.push_str(kv);
            text.push('\n');
        }
        RunConfig::parse(&text)
    }
}

/// Scalar results of a run, checked against the config's thresholds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub metrics: BTreeMap<String, f64>,
    /// Human-readable threshold violations.
    pub failures: Vec<String>,
}

impl RunSummary {
    fn check(&mut self, cfg: &RunConfig) {
        for ((bound, metric), &limit) in &cfg.thresholds {
            let ok = match (self.metrics.get(metric), bound) {
                (Some(&v), Bound::Max) => v <= limit,
                (Some(&v), Bound::Min) => v >= limit,
                (None, _) => {
                    self.failures.push(format!("{metric}: not produced by this subcommand"));
                    continue;
                }
            };
            if !ok {
                let v = self.metrics[metric];
                let rel = if *bound == Bound::Max { "<=" } else { ">=" };
                self.failures.push(format!("{metric} = {v} violates {rel} {limit}"));
            }
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            exit::OK
        } else {
            exit::THRESHOLDS_UNMET
        }
    }
}

/// Map an error to its exit code.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidModel(_) | Error::Parameter(_) => exit::CONFIG,
        Error::Io(_) => exit::IO,
        Error::Numeric(_) | Error::DegenerateSlope | Error::InsufficientData(_) => exit::NUMERIC,
    }
}

/// Parse arguments, run, report. Returns the process exit code.
pub fn main_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::OK };
        }
    };
    let result = cli.opts.resolve().and_then(|cfg| {
        with_threads(cli.opts.threads, || run(&cli.command, &cfg)).and_then(|r| r)
    });
    match result {
        Ok(summary) => {
            for (k, v) in &summary.metrics {
                eprintln!("{k} = {v}");
            }
            for f in &summary.failures {
                eprintln!("threshold not met: {f}");
            }
            summary.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            error_exit_code(&e)
        }
    }
}

/// Run one subcommand with a resolved configuration.
pub fn run(cmd: &Command, cfg: &RunConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let mut out = Artifact::create(cfg.output.as_deref(), cfg.format)?;
    out.header(cmd.name(), cfg)?;
    let mut summary = RunSummary::default();
    match cmd {
        Command::Simulate { survival } => simulate(cfg, survival.as_deref(), &mut out, &mut summary)?,
        Command::Intensity => intensity(cfg, &mut out, &mut summary)?,
        Command::Poisson => poisson(cfg, &mut out, &mut summary)?,
        Command::Perturb => perturb(cfg, &mut out, &mut summary)?,
        Command::Separation => separation(cfg, &mut out, &mut summary)?,
        Command::KernelCheck { points } => kernel_check(cfg, *points, &mut out, &mut summary)?,
        Command::Realcase => realcase(cfg, &mut out, &mut summary)?,
        Command::Bench { sizes } => bench(cfg, sizes, &mut out, &mut summary)?,
    }
    out.summary(&summary.metrics)?;
    out.finish()?;
    summary.check(cfg);
    Ok(summary)
}

/// CSV or JSON-lines sink with a provenance header.
pub struct Artifact {
    sink: Box<dyn Write>,
    format: OutputFormat,
    columns: Option<Vec<&'static str>>,
}

impl Artifact {
    pub fn create(path: Option<&Path>, format: OutputFormat) -> Result<Self> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Self { sink, format, columns: None })
    }

    pub fn header(&mut self, command: &str, cfg: &RunConfig) -> Result<()> {
        write_header(&mut self.sink, self.format, command, cfg)
    }

    /// Write one record; the first record fixes the CSV columns.
    pub fn record<R: Serialize>(&mut self, columns: &[&'static str], rec: &R) -> Result<()> {
        let value = serde_json::to_value(rec).map_err(|e| Error::Numeric(e.to_string()))?;
        match self.format {
            OutputFormat::Jsonl => writeln!(self.sink, "{value}")?,
            OutputFormat::Csv => {
                if self.columns.is_none() {
                    writeln!(self.sink, "{}", columns.join(","))?;
                    self.columns = Some(columns.to_vec());
                }
                let row: Vec<String> = columns.iter().map(|c| csv_field(&value[*c])).collect();
                writeln!(self.sink, "{}", row.join(","))?;
            }
        }
        Ok(())
    }

    /// Scalar results, after the records.
    pub fn summary(&mut self, metrics: &BTreeMap<String, f64>) -> Result<()> {
        match self.format {
            OutputFormat::Jsonl => writeln!(self.sink, "{}", json!({ "summary": metrics }))?,
            OutputFormat::Csv => {
                for (k, v) in metrics {
                    writeln!(self.sink, "# summary.{k}={v}")?;
                }
            }
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.sink.flush()?;
        Ok(())
    }
}

// The output path is left out so identical runs give identical files.
fn header_entries(cfg: &RunConfig) -> Vec<(String, String)> {
    cfg.entries().into_iter().filter(|(k, _)| k != "output").collect()
}

fn write_header(sink: &mut dyn Write, format: OutputFormat, command: &str, cfg: &RunConfig) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            writeln!(sink, "# trigmin {command}")?;
            for (k, v) in header_entries(cfg) {
                writeln!(sink, "# {k}={v}")?;
            }
        }
        OutputFormat::Jsonl => {
            let config: serde_json::Map<String, Value> =
                header_entries(cfg).into_iter().map(|(k, v)| (k, Value::String(v))).collect();
            let head = json!({
                "schema_version": SCHEMA_VERSION,
                "command": command,
                "seed": cfg.seed,
                "config": config,
            });
            writeln!(sink, "{head}")?;
        }
    }
    Ok(())
}

fn csv_field(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[derive(Serialize)]
struct TrialRecord {
    trial: u64,
    m: f64,
    n_m: f64,
    argmin: f64,
    count_in_window: usize,
    certified_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    zone_min_0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    zone_min_pi: Option<f64>,
}

const TRIAL_COLUMNS: [&str; 6] = ["trial", "m", "n_m", "argmin", "count_in_window", "certified_bound"];
const ZONE_TRIAL_COLUMNS: [&str; 8] = [
    "trial",
    "m",
    "n_m",
    "argmin",
    "count_in_window",
    "certified_bound",
    "zone_min_0",
    "zone_min_pi",
];

fn write_trials(out: &mut Artifact, batch: &TrialBatch, k: f64, zones: bool) -> Result<()> {
    let columns: &[&str] = if zones { &ZONE_TRIAL_COLUMNS } else { &TRIAL_COLUMNS };
    for o in &batch.outcomes {
        let rec = TrialRecord {
            trial: o.trial,
            m: o.min.m,
            n_m: o.scaled_min(batch.n),
            argmin: o.min.argmin,
            count_in_window: o.process.count_in(-k, k),
            certified_bound: o.min.certified_bound,
            zone_min_0: o.zone.map(|z| z.zero),
            zone_min_pi: o.zone.map(|z| z.pi),
        };
        out.record(columns, &rec)?;
    }
    Ok(())
}

fn log_misses(batch: &TrialBatch) {
    for o in batch.outcomes.iter().filter(|o| !o.capture.is_captured()) {
        eprintln!("capture miss, trial {}: {:?}", o.trial, o.capture);
    }
}

fn law_metrics(batch: &TrialBatch, s: &mut RunSummary) -> Result<()> {
    let minima = batch.scaled_minima();
    let ks = ks_exponential(&minima, limit_rate())?;
    s.metrics.insert("ks".into(), ks.statistic);
    s.metrics.insert("ks_critical_95".into(), ks.critical_95);
    s.metrics.insert("mean_n_m".into(), mean(&minima));
    s.metrics.insert("capture_rate".into(), batch.capture_rate());
    s.metrics.insert("trials".into(), batch.len() as f64);
    Ok(())
}

fn simulate(cfg: &RunConfig, survival: Option<&Path>, out: &mut Artifact, s: &mut RunSummary) -> Result<()> {
    let batch = run_trials(&cfg.trial_setup()?, cfg.seed, 0..cfg.trials)?;
    log_misses(&batch);
    write_trials(out, &batch, cfg.window_k, false)?;
    law_metrics(&batch, s)?;
    if let Some(path) = survival {
        let curve = empirical_survival(&batch.scaled_minima(), &cfg.tau_grid)?;
        let mut w = BufWriter::new(File::create(path)?);
        write_header(&mut w, OutputFormat::Csv, "simulate --survival", cfg)?;
        writeln!(w, "tau,empirical,reference")?;
        for ((t, e), r) in curve.taus.iter().zip(&curve.empirical).zip(&curve.reference) {
            writeln!(w, "{t},{e},{r}")?;
        }
        w.flush()?;
        s.metrics.insert("survival_max_gap".into(), curve.max_gap());
    }
    Ok(())
}

#[derive(Serialize)]
struct IntensityRecord {
    a: f64,
    b: f64,
    estimate: f64,
    reference: f64,
    rel_err: f64,
}

fn intensity_rows(cfg: &RunConfig, batch: &TrialBatch, out: &mut Artifact, s: &mut RunSummary) -> Result<()> {
    let mut worst: f64 = 0.0;
    for &(a, b) in &cfg.intervals {
        let estimate = intensity_estimate(batch.processes(), a, b)?;
        let reference = limit_intensity() * (b - a);
        let rel_err = (estimate - reference).abs() / reference;
        worst = worst.max(rel_err);
        out.record(&["a", "b", "estimate", "reference", "rel_err"], &IntensityRecord { a, b, estimate, reference, rel_err })?;
    }
    s.metrics.insert("intensity_rel_err".into(), worst);
    Ok(())
}

fn intensity(cfg: &RunConfig, out: &mut Artifact, s: &mut RunSummary) -> Result<()> {
    let batch = run_trials(&cfg.trial_setup()?, cfg.seed, 0..cfg.trials)?;
    intensity_rows(cfg, &batch, out, s)
}

#[derive(Serialize)]
struct MetricRecord<'a> {
    metric: &'a str,
    value: f64,
}

fn metric_rows(out: &mut Artifact, rows: &[(&str, f64)], s: &mut RunSummary) -> Result<()> {
    for &(metric, value) in rows {
        out.record(&["metric", "value"], &MetricRecord { metric, value })?;
        s.metrics.insert(metric.to_string(), value);
    }
    Ok(())
}

fn poisson(cfg: &RunConfig, out: &mut Artifact, s: &mut RunSummary) -> Result<()> {
    let (&(a1, b1), &(a2, b2)) = match cfg.intervals.as_slice() {
        [first, second, ..] => (first, second),
        _ => return Err(Error::Config("poisson needs two intervals: the count window and the covariance span".into())),
    };
    if !(a2 < 0.0 && 0.0 < b2) {
        return Err(Error::Config("the covariance span must contain 0".into()));
    }
    let batch = run_trials(&cfg.trial_setup()?, cfg.seed, 0..cfg.trials)?;
    let window = Interval::closed(a1, b1);
    let beside = Interval::open_closed(b1, b1 + (b1 - a1));
    let d = poisson_diagnostics(batch.processes(), window, beside)?;
    let pair = poisson_diagnostics(batch.processes(), Interval::closed_open(a2, 0.0), Interval::open_closed(0.0, b2))?;
    let void_reference = (-limit_intensity() * (b1 - a1)).exp();
    metric_rows(
        out,
        &[
            ("trials", d.trials as f64),
            ("mean_count", d.mean_count),
            ("var_count", d.var_count),
            ("dispersion", d.dispersion),
            ("void_prob", d.void_prob),
            ("void_reference", void_reference),
            ("void_err", (d.void_prob - void_reference).abs()),
            ("covariance", pair.covariance),
            ("covariance_se", pair.covariance_se),
            ("cov_z", pair.covariance.abs() / pair.covariance_se),
        ],
        s,
    )
}

fn perturb(cfg: &RunConfig, out: &mut Artifact, s: &mut RunSummary) -> Result<()> {
    let trials = run_perturb_trials(&cfg.trial_setup()?, cfg.seed, 0..cfg.trials, PerturbControl::Coupled)?;
    let r = invariance_report(&trials, cfg.window_k)?;
    metric_rows(
        out,
        &[
            ("trials", r.trials as f64),
            ("matched", r.matched as f64),
            ("law_ks", r.law_ks),
            ("shift_mean", r.shift_mean),
            ("shift_mean_z", r.shift_mean.abs() / (0.5 / r.matched as f64).sqrt()),
            ("shift_var", r.shift_var),
            ("shift_ks_gauss", r.shift_ks_gauss),
            ("unmatched_frac", r.unmatched_frac),
            ("unmatched_point_frac", r.unmatched_point_frac),
            ("residual_max_scaled", r.residual_max_scaled),
        ],
        s,
    )
}

#[derive(Serialize)]
struct SeparationRecord {
    distance: f64,
    fraction: f64,
}

fn separation(cfg: &RunConfig, out: &mut Artifact, s: &mut RunSummary) -> Result<()> {
    let batch = run_trials(&cfg.trial_setup()?, cfg.seed, 0..cfg.trials)?;
    let n = cfg.n as f64;
    // The requested scale, then finer ones down to a quarter of the wavelength 1/n.
    for distance in [n.powf(-cfg.separation_eps), 4.0 / n, 1.0 / n, 0.25 / n] {
        let hits = batch.processes().filter(|p| has_close_pair(p, distance)).count();
        let fraction = hits as f64 / batch.len().max(1) as f64;
        out.record(&["distance", "fraction"], &SeparationRecord { distance, fraction })?;
    }
    s.metrics.insert("separation".into(), separation_statistic(batch.processes(), cfg.n, cfg.separation_eps));
    s.metrics.insert("trials".into(), batch.len() as f64);
    Ok(())
}

#[derive(Serialize)]
struct KernelRecord {
    x: f64,
    r_closed: f64,
    r_sum: f64,
    r1_closed: f64,
    r1_sum: f64,
    r2_closed: f64,
    r2_sum: f64,
    abs_error: f64,
}

/// Max over `r`, `r'/σ_n` and `r''/σ_n²` of the gap between evaluator and direct sum.
fn kernel_row(n: usize, x: f64) -> KernelRecord {
    let k = kernel(n, x);
    let (r, r1, r2) = kernel_direct_sum(n, x);
    let sig = sigma_n(n);
    let abs_error = (k.r - r).abs().max((k.r1 - r1).abs() / sig).max((k.r2 - r2).abs() / (sig * sig));
    KernelRecord { x, r_closed: k.r, r_sum: r, r1_closed: k.r1, r1_sum: r1, r2_closed: k.r2, r2_sum: r2, abs_error }
}

fn kernel_check(cfg: &RunConfig, points: usize, out: &mut Artifact, s: &mut RunSummary) -> Result<()> {
    let n = cfg.n;
    let mut rng = derive_trial_stream(RngSpec::new(cfg.seed, 0));
    let columns = ["x", "r_closed", "r_sum", "r1_closed", "r1_sum", "r2_closed", "r2_sum", "abs_error"];
    let mut worst: f64 = 0.0;
    // Half the angles uniform on the circle, half within a few wavelengths of 0.
    for i in 0..points {
        let x = if i % 2 == 0 {
            rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)
        } else {
            rng.random_range(-4.0..4.0) / n as f64
        };
        let row = kernel_row(n, x);
        worst = worst.max(row.abs_error);
        out.record(&columns, &row)?;
    }
    s.metrics.insert("max_abs_error".into(), worst);
    Ok(())
}

fn realcase(cfg: &RunConfig, out: &mut Artifact, s: &mut RunSummary) -> Result<()> {
    if !cfg.model.is_real() {
        eprintln!("warning: realcase with model {}; zones are only meaningful for real coefficients", cfg.model);
    }
    let rc = RealCaseConfig::new(cfg.n, cfg.eps_zone)?;
    let batch = realcase_pipeline(&rc, cfg.trial_setup()?, cfg.seed, 0..cfg.trials)?;
    log_misses(&batch);
    write_trials(out, &batch, cfg.window_k, true)?;
    law_metrics(&batch, s)?;
    let mirrored = ks_exponential(&batch.scaled_minima(), limit_rate() / 2.0)?;
    s.metrics.insert("ks_half_rate".into(), mirrored.statistic);
    let mut worst: f64 = 0.0;
    for &(a, b) in &cfg.intervals {
        let reference = limit_intensity() * (b - a);
        worst = worst.max((intensity_estimate(batch.processes(), a, b)? - reference).abs() / reference);
    }
    s.metrics.insert("intensity_rel_err".into(), worst);
    if let Some(f) = zone_hit_fraction(&batch) {
        s.metrics.insert("zone_frac".into(), f);
    }
    Ok(())
}

fn bench(cfg: &RunConfig, sizes: &[usize], out: &mut Artifact, s: &mut RunSummary) -> Result<()> {
    let n = cfg.n;
    let sizes = if sizes.is_empty() {
        let top = build_net(n, cfg.eps_net, true)?.len();
        let mut v = Vec::new();
        let mut big_n = (4 * n + 1).next_power_of_two();
        while big_n <= top {
            v.push(big_n);
            big_n *= 2;
        }
        v
    } else {
        sizes.to_vec()
    };
    let mut rng = derive_trial_stream(RngSpec::new(cfg.seed, 0));
    let p = TrigPolynomial::new(n, sample_coefficients(&CoefficientModel::ComplexGaussian, n, &mut rng)?)?;
    let columns = ["n", "points", "direct_secs", "transform_secs", "speedup", "op_ratio"];
    let mut last: Option<BenchRow> = None;
    for &points in &sizes {
        let row = bench_net_evaluation(&p, points)?;
        out.record(&columns, &row)?;
        last = Some(row);
    }
    if let Some(row) = last {
        s.metrics.insert("speedup".into(), row.speedup);
        s.metrics.insert("op_ratio".into(), row.op_ratio);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_drive_exit_status() {
        let mut cfg = RunConfig::default();
        cfg.set("max.ks", "0.03").unwrap();
        cfg.set("min.capture_rate", "0.99").unwrap();
        let mut s = RunSummary::default();
        s.metrics.insert("ks".into(), 0.02);
        s.metrics.insert("capture_rate".into(), 0.995);
        s.check(&cfg);
        assert_eq!(s.exit_code(), exit::OK);

        let mut s = RunSummary::default();
        s.metrics.insert("ks".into(), 0.05);
        s.check(&cfg);
        assert_eq!(s.failures.len(), 2, "{:?}", s.failures);
        assert_eq!(s.exit_code(), exit::THRESHOLDS_UNMET);
    }

    #[test]
    fn error_codes_are_distinct() {
        let codes = [
            error_exit_code(&Error::Config("x".into())),
            error_exit_code(&Error::Io(io::Error::other("x"))),
            error_exit_code(&Error::Numeric("x".into())),
        ];
        assert_eq!(codes, [exit::CONFIG, exit::IO, exit::NUMERIC]);
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field(&json!("a,b")), "\"a,b\"");
        assert_eq!(csv_field(&json!(1.5)), "1.5");
        assert_eq!(csv_field(&Value::Null), "");
    }
}
