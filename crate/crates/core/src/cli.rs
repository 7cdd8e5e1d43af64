//! Command-line front end. `run` takes the argument vector and output
//! streams so it can be driven from tests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scenarios::{self, ScenarioConfig, ScenarioName, ScenarioReport, NUMERIC_KEYS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "vn-readout", version, about = "Pointer-measurement scenarios: readouts, readability, sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List or run scenarios.
    Scenario {
        #[command(subcommand)]
        action: ScenarioAction,
    },
    /// Run a scenario over a range of one parameter and write CSV rows.
    Sweep(Box<SweepArgs>),
}

#[derive(Subcommand, Debug)]
enum ScenarioAction {
    /// Print the available scenarios.
    List,
    /// Run one scenario and write its report.
    Run(Box<RunArgs>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Default, Clone)]
struct Overrides {
    /// Flat key=value file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "gA", allow_hyphen_values = true)]
    g_a: Option<String>,
    #[arg(long = "gB", allow_hyphen_values = true)]
    g_b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<String>,
    /// fine | coarse
    #[arg(long)]
    grid: Option<String>,
    #[arg(long = "N")]
    points: Option<String>,
    #[arg(long = "L", allow_hyphen_values = true)]
    length: Option<String>,
    #[arg(long = "coarseN")]
    coarse_points: Option<String>,
    #[arg(long = "x0A", allow_hyphen_values = true)]
    x0_a: Option<String>,
    #[arg(long = "x0B", allow_hyphen_values = true)]
    x0_b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    #[arg(long = "thetaF", allow_hyphen_values = true)]
    theta_f: Option<String>,
    #[arg(long = "phiF", allow_hyphen_values = true)]
    phi_f: Option<String>,
    /// x | y | z
    #[arg(long = "A")]
    observable_a: Option<String>,
    /// x | y | z
    #[arg(long = "B")]
    observable_b: Option<String>,
    #[arg(long = "eprTheta", allow_hyphen_values = true)]
    epr_theta: Option<String>,
    #[arg(long = "eprPhi", allow_hyphen_values = true)]
    epr_phi: Option<String>,
    #[arg(long)]
    seed: Option<String>,
}

impl Overrides {
    fn pairs(&self) -> Vec<(&'static str, &str)> {
        let fields: [(&'static str, &Option<String>); 19] = [
            ("gA", &self.g_a),
            ("gB", &self.g_b),
            ("t", &self.t),
            ("sigma", &self.sigma),
            ("grid", &self.grid),
            ("N", &self.points),
            ("L", &self.length),
            ("coarseN", &self.coarse_points),
            ("x0A", &self.x0_a),
            ("x0B", &self.x0_b),
            ("theta", &self.theta),
            ("phi", &self.phi),
            ("thetaF", &self.theta_f),
            ("phiF", &self.phi_f),
            ("A", &self.observable_a),
            ("B", &self.observable_b),
            ("eprTheta", &self.epr_theta),
            ("eprPhi", &self.epr_phi),
            ("seed", &self.seed),
        ];
        fields.into_iter().filter_map(|(k, v)| v.as_deref().map(|v| (k, v))).collect()
    }

    fn resolve(&self, name: &str) -> Result<ScenarioConfig> {
        let name: ScenarioName = name.parse()?;
        let mut cfg = ScenarioConfig::defaults(name);
        if let Some(path) = &self.config {
            apply_config_file(&mut cfg, path)?;
        }
        for (k, v) in self.pairs() {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    name: String,
    #[command(flatten)]
    overrides: Overrides,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args, Debug)]
struct SweepArgs {
    name: String,
    #[arg(long)]
    param: String,
    #[arg(long, allow_hyphen_values = true)]
    from: f64,
    #[arg(long, allow_hyphen_values = true)]
    to: f64,
    #[arg(long)]
    steps: usize,
    /// Geometric spacing instead of linear.
    #[arg(long)]
    log: bool,
    /// Parallel steps; defaults to the number of cores.
    #[arg(long)]
    jobs: Option<usize>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

/// Parse a flat `key=value` file. Blank lines and `#` comments are skipped.
pub fn parse_config_file(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) =
            line.split_once('=').ok_or_else(|| Error::Config(format!("config line {}: expected key=value", n + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn apply_config_file(cfg: &mut ScenarioConfig, path: &Path) -> Result<()> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    for (k, v) in parse_config_file(&text)? {
        cfg.set(&k, &v)?;
    }
    Ok(())
}

/// Sweep points, linear or geometric, including both ends.
pub fn sweep_values(from: f64, to: f64, steps: usize, log: bool) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::Config("a sweep needs at least 2 steps".into()));
    }
    if !from.is_finite() || !to.is_finite() || from == to {
        return Err(Error::Config("sweep bounds must be finite and distinct".into()));
    }
    if log && (from <= 0.0 || to <= 0.0) {
        return Err(Error::Config("log sweeps need positive bounds".into()));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| {
            let f = k as f64 / last;
            match (log, k) {
                (_, 0) => from,
                (_, k) if k == steps - 1 => to,
                (true, _) => (from.ln() + f * (to.ln() - from.ln())).exp(),
                (false, _) => from + f * (to - from),
            }
        })
        .collect())
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Flatten a report into `(section, key, value)` rows.
pub fn report_rows(report: &ScenarioReport) -> Vec<(String, String, String)> {
    let mut rows = Vec::new();
    let mut push = |s: &str, k: String, v: String| rows.push((s.to_string(), k, v));
    push("scenario", "name".into(), report.scenario.to_string());
    for (k, v) in &report.readouts.pointer_means {
        push("readouts", format!("pointer_mean_{k}"), num(*v));
    }
    if let Some(c) = report.readouts.cross_moment {
        push("readouts", "cross_moment".into(), num(c));
    }
    for (k, v) in &report.readouts.simulated {
        push("simulated", k.clone(), num(*v));
    }
    for (k, v) in &report.predictions {
        push("predictions", k.clone(), num(*v));
    }
    for (k, v) in &report.defects {
        push("defects", k.clone(), num(*v));
    }
    for (k, v) in &report.readability {
        push("readability", k.clone(), v.status.clone());
    }
    for (k, v) in &report.schmidt {
        push("schmidt_rank", k.clone(), v.rank.to_string());
    }
    for (k, v) in &report.purity {
        push("purity", k.clone(), num(*v));
    }
    for (k, v) in &report.pass {
        push("pass", k.clone(), v.to_string());
    }
    push("runtime_seconds", "total".into(), num(report.runtime_seconds));
    rows
}

fn write_report(report: &ScenarioReport, path: &Path, format: Format) -> Result<()> {
    let io = |e: std::io::Error| Error::Config(format!("{}: {e}", path.display()));
    match format {
        Format::Json => {
            let text = serde_json::to_string_pretty(report).map_err(|e| Error::Config(e.to_string()))?;
            fs::write(path, text + "\n").map_err(io)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_path(path).map_err(|e| Error::Config(e.to_string()))?;
            let csv_err = |e: csv::Error| Error::Config(e.to_string());
            w.write_record(["section", "key", "value"]).map_err(csv_err)?;
            for (s, k, v) in report_rows(report) {
                w.write_record([s, k, v]).map_err(csv_err)?;
            }
            w.flush().map_err(io)
        }
    }
}

/// One sweep row: the swept value and either a report or an error.
pub struct SweepRow {
    pub value: f64,
    pub outcome: Result<ScenarioReport>,
}

/// Run the sweep on `jobs` threads; rows come back in step order.
pub fn run_sweep(base: &ScenarioConfig, param: &str, values: &[f64], jobs: Option<usize>) -> Result<Vec<SweepRow>> {
    if !NUMERIC_KEYS.contains(&param) {
        return Err(Error::Config(format!("cannot sweep `{param}`")));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let rows = pool.install(|| {
        values
            .par_iter()
            .map(|&value| {
                let mut cfg = base.clone();
                let outcome = cfg.set_numeric(param, value).and_then(|_| scenarios::run(&cfg));
                SweepRow { value, outcome }
            })
            .collect()
    });
    Ok(rows)
}

/// Write sweep rows as CSV. Columns are the union of keys across
/// successful steps; missing entries are left empty.
pub fn write_sweep_csv<W: Write>(out: W, param: &str, rows: &[SweepRow]) -> Result<()> {
    use std::collections::BTreeSet;
    let mut sim = BTreeSet::new();
    let mut pred = BTreeSet::new();
    let mut def = BTreeSet::new();
    for r in rows {
        if let Ok(rep) = &r.outcome {
            sim.extend(rep.readouts.simulated.keys().cloned());
            pred.extend(rep.predictions.keys().cloned());
            def.extend(rep.defects.keys().cloned());
        }
    }
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Config(e.to_string());
    let mut header = vec!["step".to_string(), param.to_string(), "status".into(), "error".into()];
    header.extend(sim.iter().map(|k| format!("simulated:{k}")));
    header.extend(pred.iter().map(|k| format!("predicted:{k}")));
    header.extend(def.iter().map(|k| format!("defect:{k}")));
    w.write_record(&header).map_err(csv_err)?;
    for (i, r) in rows.iter().enumerate() {
        let mut rec = vec![i.to_string(), num(r.value)];
        match &r.outcome {
            Ok(rep) => {
                rec.push(if rep.passed() { "pass" } else { "fail" }.into());
                rec.push(String::new());
                let cell = |m: &std::collections::BTreeMap<String, f64>, k: &String| {
                    m.get(k).map(|v| num(*v)).unwrap_or_default()
                };
                rec.extend(sim.iter().map(|k| cell(&rep.readouts.simulated, k)));
                rec.extend(pred.iter().map(|k| cell(&rep.predictions, k)));
                rec.extend(def.iter().map(|k| cell(&rep.defects, k)));
            }
            Err(e) => {
                rec.push("error".into());
                rec.push(e.to_string());
                rec.extend(std::iter::repeat_n(String::new(), sim.len() + pred.len() + def.len()));
            }
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Config(e.to_string()))
}

fn list<W: Write>(out: &mut W) -> std::io::Result<()> {
    for n in ScenarioName::ALL {
        writeln!(out, "{:<16} {}", n.as_str(), n.description())?;
    }
    Ok(())
}

fn cmd_run<W: Write>(args: &RunArgs, err: &mut W) -> Result<i32> {
    let cfg = args.overrides.resolve(&args.name)?;
    let report = scenarios::run(&cfg)?;
    write_report(&report, &args.out, args.format)?;
    if report.passed() {
        Ok(EXIT_OK)
    } else {
        let _ = writeln!(err, "failed checks: {}", report.failures().join(", "));
        Ok(EXIT_FAILED)
    }
}

fn cmd_sweep<W: Write, E: Write>(args: &SweepArgs, out: &mut W, err: &mut E) -> Result<i32> {
    let base = args.overrides.resolve(&args.name)?;
    let values = sweep_values(args.from, args.to, args.steps, args.log)?;
    let rows = run_sweep(&base, &args.param, &values, args.jobs)?;
    match &args.out {
        Some(path) => {
            let f = fs::File::create(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            write_sweep_csv(f, &args.param, &rows)?;
        }
        None => write_sweep_csv(&mut *out, &args.param, &rows)?,
    }
    let mut code = EXIT_OK;
    for (i, r) in rows.iter().enumerate() {
        if let Err(e) = &r.outcome {
            let _ = writeln!(err, "step {i} ({} = {}): {e}", args.param, r.value);
            code = EXIT_FAILED;
        }
    }
    Ok(code)
}

/// Entry point. Returns the process exit code: 0 when every check passes,
/// 1 on configuration or runtime errors, 2 when a check fails.
pub fn run<I, T, W, E>(args: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Scenario { action: ScenarioAction::List } => {
            list(out).map(|_| EXIT_OK).map_err(|e| Error::Config(e.to_string()))
        }
        Command::Scenario { action: ScenarioAction::Run(args) } => cmd_run(args, err),
        Command::Sweep(args) => cmd_sweep(args, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_spacing() {
        let v = sweep_values(1e-3, 1e-1, 3, true).unwrap();
        assert_eq!(v[0], 1e-3);
        assert!((v[1] - 1e-2).abs() < 1e-15);
        assert_eq!(v[2], 1e-1);
        assert_eq!(sweep_values(0.0, 1.0, 5, false).unwrap()[2], 0.5);
        assert!(sweep_values(0.0, 1.0, 1, false).is_err());
        assert!(sweep_values(1.0, 1.0, 3, false).is_err());
        assert!(sweep_values(0.0, 1.0, 3, true).is_err());
    }

    #[test]
    fn config_file_format() {
        let pairs = parse_config_file("# comment\n\ngA = 0.3\ntheta=1\n").unwrap();
        assert_eq!(pairs, vec![("gA".into(), "0.3".into()), ("theta".into(), "1".into())]);
        assert!(parse_config_file("gA 0.3").is_err());
    }

    #[test]
    fn list_has_seven_lines() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["vn-readout", "scenario", "list"], &mut out, &mut err), 0);
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 7);
        assert!(text.contains("epr"));
    }
}
