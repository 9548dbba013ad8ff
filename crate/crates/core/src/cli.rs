//! Command runner behind the `heatgrad` binary.
//!
//! Every command writes `<command>.csv` and `<command>.json` into the output
//! directory. Exit status: 0 when every criterion passes, 1 when one fails or
//! a computation errors, 2 for bad arguments or configuration.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::decay::{time_grid, upper_bound_sweep, POINTS_PER_DECADE};
use crate::optimality::{check_kernel_lower_bound, optimality_sweep, stabilization_ratios, KERNEL_MIN_M};
use crate::validate::{run_validation, Fault, ValidationOptions};
use crate::corpus::{self, Datum};
use crate::{Error, Exponent, Result};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const DEFAULTS_HELP: &str = "\
Configuration file (--config, TOML); every key is optional and flags override it:

  [output]
  dir = \"heatgrad-out\"

  [validate]
  tolerance_scale = 1.0

  [decay]
  p = [1, 2, 3, 6]
  datum = [\"indicator\", \"gaussian-moment\", \"power-tail\"]
  t_lo = 0.01
  t_hi = 10000.0
  per_decade = 16
  corpus = \"my-data.toml\"   # optional file of extra [[datum]] entries

  [optimality]
  p = [1, 2, 3, 6, \"inf\"]
  m_list = [4, 8, 16, 32, 64]
  min_ratio = 0.7       # required Q_2m / Q_m
  ratio_from = 16       # smallest m entering the ratio test

  [kernel_bound]
  m_list = [20000, 100000]
  floor = 0.01          # required min of m K(m^2, r, s)

Exit status: 0 pass, 1 criterion failure, 2 usage error.";

#[derive(Debug, Parser)]
#[command(name = "heatgrad", version, about = "Gradient decay of the exterior Dirichlet heat semigroup", after_help = DEFAULTS_HELP)]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for CSV and JSON files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Multiplies every validation tolerance.
    #[arg(long, global = true)]
    pub tolerance_scale: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Run the oracle suite.
    Validate,
    /// Sweep ‖∇u(t)‖_p over time for corpus data and fit the decay rate.
    Decay(DecayArgs),
    /// Certify Q_m along the extremal family.
    Optimality(OptimalityArgs),
    /// Evaluate m K(m², r, s) on the lower-bound region.
    KernelBound(KernelBoundArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct DecayArgs {
    /// Exponents, comma separated (`inf` allowed).
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<Exponent>>,
    /// Corpus entries, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub datum: Option<Vec<String>>,
    /// Start of the time sweep.
    #[arg(long)]
    pub t_lo: Option<f64>,
    /// End of the time sweep.
    #[arg(long)]
    pub t_hi: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OptimalityArgs {
    /// Exponents, comma separated (`inf` allowed).
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<Exponent>>,
    /// Family indices, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub m_list: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct KernelBoundArgs {
    /// Scales m, comma separated (each at least 10001).
    #[arg(long, value_delimiter = ',')]
    pub m_list: Option<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("heatgrad-out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateConfig {
    pub tolerance_scale: f64,
    /// Only settable through the library.
    #[serde(skip)]
    pub fault: Fault,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig {
            tolerance_scale: 1.0,
            fault: Fault::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayConfig {
    pub p: Vec<Exponent>,
    pub datum: Vec<String>,
    pub t_lo: f64,
    pub t_hi: f64,
    pub per_decade: usize,
    /// Extra corpus file whose entries join the built-in ones.
    pub corpus: Option<PathBuf>,
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig {
            p: [1.0, 2.0, 3.0, 6.0].map(|p| Exponent::new(p).expect("p >= 1")).to_vec(),
            datum: corpus::builtin().into_iter().map(|d| d.name).collect(),
            t_lo: 1e-2,
            t_hi: 1e4,
            per_decade: POINTS_PER_DECADE,
            corpus: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimalityConfig {
    pub p: Vec<Exponent>,
    pub m_list: Vec<u64>,
    pub min_ratio: f64,
    pub ratio_from: u64,
}

impl Default for OptimalityConfig {
    fn default() -> Self {
        OptimalityConfig {
            p: [1.0, 2.0, 3.0, 6.0, f64::INFINITY]
                .map(|p| Exponent::new(p).expect("p >= 1"))
                .to_vec(),
            m_list: vec![4, 8, 16, 32, 64],
            min_ratio: 0.7,
            ratio_from: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelBoundConfig {
    pub m_list: Vec<u64>,
    pub floor: f64,
}

impl Default for KernelBoundConfig {
    fn default() -> Self {
        KernelBoundConfig {
            m_list: vec![20_000, 100_000],
            floor: 0.01,
        }
    }
}

impl DecayConfig {
    /// The built-in corpus followed by the entries of `corpus`, if set.
    pub fn available(&self) -> Result<Vec<Datum>> {
        let mut data = corpus::builtin();
        if let Some(path) = &self.corpus {
            let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            for extra in corpus::parse_corpus(&text)? {
                if data.iter().any(|d| d.name == extra.name) {
                    return Err(Error::Config(format!("corpus entry '{}' shadows a built-in datum", extra.name)));
                }
                data.push(extra);
            }
        }
        Ok(data)
    }
}

fn find_datum<'a>(data: &'a [Datum], name: &str) -> Result<&'a Datum> {
    data.iter()
        .find(|d| d.name == name)
        .ok_or_else(|| Error::Config(format!("unknown corpus datum '{name}'")))
}

/// All command parameters; loaded from TOML, then overridden by flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub output: OutputConfig,
    pub validate: ValidateConfig,
    pub decay: DecayConfig,
    pub optimality: OptimalityConfig,
    pub kernel_bound: KernelBoundConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    fn apply(&mut self, cli: &Cli) {
        if let Some(dir) = &cli.out {
            self.output.dir = dir.clone();
        }
        if let Some(s) = cli.tolerance_scale {
            self.validate.tolerance_scale = s;
        }
        match &cli.command {
            Command::Validate => {}
            Command::Decay(a) => {
                if let Some(p) = &a.p {
                    self.decay.p = p.clone();
                }
                if let Some(d) = &a.datum {
                    self.decay.datum = d.clone();
                }
                if let Some(t) = a.t_lo {
                    self.decay.t_lo = t;
                }
                if let Some(t) = a.t_hi {
                    self.decay.t_hi = t;
                }
            }
            Command::Optimality(a) => {
                if let Some(p) = &a.p {
                    self.optimality.p = p.clone();
                }
                if let Some(m) = &a.m_list {
                    self.optimality.m_list = m.clone();
                }
            }
            Command::KernelBound(a) => {
                if let Some(m) = &a.m_list {
                    self.kernel_bound.m_list = m.clone();
                }
            }
        }
    }

    /// Checks the parameters `command` will use.
    pub fn check(&self, command: &Command) -> Result<()> {
        let usage = |msg: String| Err(Error::Config(msg));
        if !(self.validate.tolerance_scale > 0.0 && self.validate.tolerance_scale.is_finite()) {
            return usage(format!("tolerance scale must be positive, got {}", self.validate.tolerance_scale));
        }
        match command {
            Command::Validate => {}
            Command::Decay(_) => {
                let d = &self.decay;
                if d.p.is_empty() || d.datum.is_empty() {
                    return usage("decay needs at least one p and one datum".into());
                }
                if !(d.t_lo > 0.0 && d.t_hi > d.t_lo && d.t_hi.is_finite()) {
                    return usage(format!("time range must satisfy 0 < t_lo < t_hi, got [{}, {}]", d.t_lo, d.t_hi));
                }
                if d.per_decade == 0 {
                    return usage("per_decade must be positive".into());
                }
                let available = d.available()?;
                for name in &d.datum {
                    find_datum(&available, name)?;
                }
            }
            Command::Optimality(_) => {
                let o = &self.optimality;
                if o.p.is_empty() || o.m_list.is_empty() {
                    return usage("optimality needs a nonempty p list and m list".into());
                }
                if o.m_list.contains(&0) {
                    return usage("m values must be positive".into());
                }
            }
            Command::KernelBound(_) => {
                let k = &self.kernel_bound;
                if k.m_list.is_empty() {
                    return usage("kernel-bound needs a nonempty m list".into());
                }
                if let Some(m) = k.m_list.iter().find(|&&m| m < KERNEL_MIN_M) {
                    return usage(format!(
                        "m = {m} leaves the region 10 <= r <= m^(1/4) empty ({m}^(1/4) = {:.3}); use m >= {KERNEL_MIN_M}",
                        (*m as f64).powf(0.25)
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Result of one command: a pass flag plus what was written.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    pub summary: Value,
    pub csv_path: PathBuf,
    pub json_path: PathBuf,
}

/// Parses arguments, runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let config = match &cli.config {
        Some(path) => RunConfig::load(path),
        None => Ok(RunConfig::default()),
    };
    let mut config = match config {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    config.apply(&cli);
    if let Err(e) = config.check(&cli.command) {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    match execute(&cli.command, &config) {
        Ok(outcome) => {
            println!(
                "{}: {} ({})",
                command_name(&cli.command),
                if outcome.passed { "pass" } else { "FAIL" },
                outcome.json_path.display()
            );
            if outcome.passed {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e @ (Error::Config(_) | Error::Domain(_))) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAIL
        }
    }
}

pub fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Validate => "validate",
        Command::Decay(_) => "decay",
        Command::Optimality(_) => "optimality",
        Command::KernelBound(_) => "kernel-bound",
    }
}

/// Runs `command` with an already merged and checked configuration.
pub fn execute(command: &Command, config: &RunConfig) -> Result<Outcome> {
    config.check(command)?;
    let (table, criteria, extra) = match command {
        Command::Validate => cmd_validate(config)?,
        Command::Decay(_) => cmd_decay(config)?,
        Command::Optimality(_) => cmd_optimality(config)?,
        Command::KernelBound(_) => cmd_kernel_bound(config)?,
    };
    let passed = criteria.values().all(|v| v.as_bool() == Some(true));
    let name = command_name(command);
    let dir = &config.output.dir;
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{name}.csv"));
    let json_path = dir.join(format!("{name}.json"));
    fs::write(&csv_path, table.to_csv()?)?;

    let mut summary = Map::new();
    summary.insert("command".into(), json!(name));
    summary.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    summary.insert("config".into(), serde_json::to_value(config).map_err(json_err)?);
    summary.insert("passed".into(), json!(passed));
    summary.insert("criteria".into(), Value::Object(criteria));
    for (k, v) in extra {
        summary.insert(k, v);
    }
    summary.insert("rows".into(), table.to_json());
    let summary = Value::Object(summary);
    fs::write(&json_path, serde_json::to_string_pretty(&summary).map_err(json_err)? + "\n")?;
    Ok(Outcome {
        passed,
        summary,
        csv_path,
        json_path,
    })
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Io(e.to_string())
}

#[derive(Debug, Clone)]
enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(x) if x.is_infinite() => if *x > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(x) => json!(x.to_string()),
            Cell::Int(n) => json!(n),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<Exponent> for Cell {
    fn from(p: Exponent) -> Self {
        Cell::Text(p.to_string())
    }
}

#[derive(Debug, Clone)]
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    Value::Object(
                        self.header
                            .iter()
                            .zip(row)
                            .map(|(h, c)| (h.to_string(), c.json()))
                            .collect(),
                    )
                })
                .collect(),
        )
    }
}

type CommandOutput = (Table, Map<String, Value>, Vec<(String, Value)>);

fn cmd_validate(config: &RunConfig) -> Result<CommandOutput> {
    let report = run_validation(&ValidationOptions {
        tolerance_scale: config.validate.tolerance_scale,
        fault: config.validate.fault,
    })?;
    let mut table = Table::new(&["check", "max_error", "tolerance", "points", "passed"]);
    let mut criteria = Map::new();
    for c in &report.checks {
        table.push(vec![c.id.into(), c.max_error.into(), c.tolerance.into(), c.points.into(), c.passed.into()]);
        criteria.insert(c.id.into(), json!(c.passed));
    }
    let failing = report.failing();
    if !failing.is_empty() {
        eprintln!("failing checks: {}", failing.join(", "));
    }
    Ok((table, criteria, vec![("failing".into(), json!(failing))]))
}

fn cmd_decay(config: &RunConfig) -> Result<CommandOutput> {
    let d = &config.decay;
    let times = time_grid(d.t_lo, d.t_hi, d.per_decade)?;
    let mut table = Table::new(&["datum", "p", "t", "grad_norm", "t_pow_mu_times_norm"]);
    let mut criteria = Map::new();
    let mut fits = Vec::new();
    let available = d.available()?;
    for name in &d.datum {
        let datum = find_datum(&available, name)?;
        for &p in &d.p {
            let data = datum.exterior(p)?;
            let (rows, check) = upper_bound_sweep(&data, &times)?;
            let mu = crate::optimality::mu(p);
            for &(t, value) in &rows {
                table.push(vec![name.as_str().into(), p.into(), t.into(), value.into(), (t.powf(mu) * value).into()]);
            }
            let key = format!("{name}/p={p}");
            criteria.insert(format!("{key}/sup_ratio_finite"), json!(check.sup_ratio.is_finite()));
            if let Some(ok) = check.slope_ok {
                criteria.insert(format!("{key}/slope_ok"), json!(ok));
            }
            fits.push(json!({
                "datum": name,
                "p": p,
                "mu": mu,
                "check": check,
            }));
        }
    }
    Ok((table, criteria, vec![("fits".into(), Value::Array(fits))]))
}

fn cmd_optimality(config: &RunConfig) -> Result<CommandOutput> {
    let o = &config.optimality;
    let mut table = Table::new(&["p", "m", "t_m", "c_m", "mu", "grad_norm", "q_m"]);
    let mut criteria = Map::new();
    let mut per_p = Vec::new();
    for &p in &o.p {
        let records = optimality_sweep(p, &o.m_list)?;
        for r in &records {
            table.push(vec![p.into(), r.m.into(), r.t_m.into(), r.c_m.into(), r.mu.into(), r.grad_norm.into(), r.q_m.into()]);
        }
        let ratios = stabilization_ratios(&records, o.ratio_from);
        let q = records.iter().map(|r| r.q_m);
        criteria.insert(format!("p={p}/all_positive"), json!(records.iter().all(|r| r.q_m > 0.0)));
        criteria.insert(
            format!("p={p}/stabilization"),
            json!(ratios.iter().all(|&(_, x)| x >= o.min_ratio)),
        );
        per_p.push(json!({
            "p": p,
            "min_q": q.clone().fold(f64::INFINITY, f64::min),
            "max_q": q.fold(0.0, f64::max),
            "ratios": ratios.iter().map(|&(m, x)| json!({"m": m, "ratio": x})).collect::<Vec<_>>(),
        }));
    }
    Ok((table, criteria, vec![("sweeps".into(), Value::Array(per_p))]))
}

fn cmd_kernel_bound(config: &RunConfig) -> Result<CommandOutput> {
    let k = &config.kernel_bound;
    let mut table = Table::new(&["m", "r", "s", "m_times_k", "leading_term", "expansion_ratio"]);
    let mut criteria = Map::new();
    let mut records = Vec::new();
    for &m in &k.m_list {
        let rec = check_kernel_lower_bound(m)?;
        for s in &rec.samples {
            table.push(vec![m.into(), s.r.into(), s.s.into(), s.scaled.into(), s.leading_term.into(), s.expansion_ratio.into()]);
        }
        criteria.insert(format!("m={m}/min_above_floor"), json!(rec.min_scaled >= k.floor));
        records.push(rec);
    }
    if records.len() > 1 {
        let mins: Vec<f64> = records.iter().map(|r| r.min_scaled).collect();
        let (lo, hi) = mins.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        criteria.insert("scaled_min_within_2x".into(), json!(hi <= 2.0 * lo));
    }
    let extra = records
        .iter()
        .map(|r| {
            json!({
                "m": r.m,
                "r_range": r.r_range,
                "s_range": r.s_range,
                "grid": r.grid,
                "min_scaled": r.min_scaled,
                "argmin": r.argmin,
                "max_expansion_ratio": r.max_expansion_ratio,
                "max_consistent_ratio": r.max_consistent_ratio,
            })
        })
        .collect();
    Ok((table, criteria, vec![("records".into(), Value::Array(extra))]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_default() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn config_sections_parse() {
        let cfg = RunConfig::from_toml(
            "[optimality]\np = [2, \"inf\"]\nm_list = [4, 8]\n[decay]\nt_lo = 1.0\nt_hi = 100.0\n",
        )
        .unwrap();
        assert_eq!(cfg.optimality.m_list, [4, 8]);
        assert!(cfg.optimality.p[1].is_infinite());
        assert_eq!(cfg.decay.t_hi, 100.0);
        assert!(RunConfig::from_toml("[decay]\nbogus = 1\n").is_err());
        assert!(RunConfig::from_toml("[optimality]\np = [0.5]\n").is_err());
    }

    #[test]
    fn usage_errors() {
        let mut cfg = RunConfig::default();
        cfg.decay.t_lo = 10.0;
        cfg.decay.t_hi = 1.0;
        assert!(cfg.check(&Command::Decay(DecayArgs::default())).is_err());
        let mut cfg = RunConfig::default();
        cfg.optimality.m_list.clear();
        assert!(cfg.check(&Command::Optimality(OptimalityArgs::default())).is_err());
        let mut cfg = RunConfig::default();
        cfg.kernel_bound.m_list = vec![100];
        assert!(cfg.check(&Command::KernelBound(KernelBoundArgs::default())).is_err());
    }

    #[test]
    fn float_cells_round_trip() {
        let x = 0.1 + 0.2;
        let s = Cell::Float(x).csv();
        assert_eq!(s.parse::<f64>().unwrap(), x);
        assert_eq!(Cell::Float(f64::INFINITY).csv(), "inf");
    }
}
