//! Experiment configs, reports and the five commands behind the binary.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or configuration
//! error, 3 numerical domain error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bounds::{
    bound_report, mi_budget, opt_error_bound, variant_gen_bound, variant_mi, BoundInputs, BoundReport,
};
use crate::engine::{AlgorithmConfig, Variant, DEFAULT_GAMMA};
use crate::error::{Error, Result};
use crate::harness::{
    compare, config_hash, estimate_gap_with, estimate_opt_error, GapEstimate, Verdict, DEFAULT_MC_SAMPLES, DEFAULT_REPS,
};
use crate::mi_oracle::{oracle_sweep, write_oracle_csv, OracleRow, DEFAULT_TOL};
use crate::model::{fmt_f64, OutputFunction, Sampler, SamplerConfig, Schedule, ScheduleConfig, TaskConfig, TaskSpec};

pub const MAX_SWEEP_CELLS: usize = 10_000;
pub const SWEEP_PARAMS: [&str; 5] = ["sigma", "eta", "T", "n", "L"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    fn scale(self) -> f64 {
        match self {
            Units::Nats => 1.0,
            Units::Bits => 1.0 / std::f64::consts::LN_2,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }
}

impl FromStr for Units {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "nats" => Ok(Units::Nats),
            "bits" => Ok(Units::Bits),
            other => Err(format!("unknown unit '{other}', expected nats or bits")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Bound,
    Gap,
    Opt,
    Oracle,
    Sweep,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Bound => "bound",
            Command::Gap => "gap",
            Command::Opt => "opt",
            Command::Oracle => "oracle",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSection {
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

impl Default for AlgorithmSection {
    fn default() -> Self {
        Self {
            variant: Variant::Sgld,
            gamma: None,
        }
    }
}

fn default_alpha() -> f64 {
    0.1
}

fn default_beta() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    #[serde(default = "default_alpha")]
    pub hp_alpha: f64,
    #[serde(default = "default_beta")]
    pub hp_beta: f64,
}

impl Default for BoundsSection {
    fn default() -> Self {
        Self {
            hp_alpha: default_alpha(),
            hp_beta: default_beta(),
        }
    }
}

fn default_setups() -> usize {
    200
}

fn default_oracle_dim() -> usize {
    1
}

/// Random one-step setups checked by the `oracle` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    #[serde(default = "default_setups")]
    pub setups: usize,
    #[serde(default = "default_oracle_dim")]
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            setups: default_setups(),
            d: 1,
            tol: None,
        }
    }
}

/// One axis of a sweep grid. `param` is one of `sigma`, `eta`, `T`, `n`, `L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axes: Vec<SweepAxis>,
    /// Also estimate the empirical gap in every cell.
    #[serde(default)]
    pub gap: bool,
}

/// A complete experiment description, read from JSON. Unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<TaskConfig>,
    #[serde(default)]
    pub algorithm: AlgorithmSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerConfig>,
    #[serde(default)]
    pub output: OutputFunction,
    #[serde(default)]
    pub bounds: BoundsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid experiment config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn task_spec(&self) -> Result<TaskSpec> {
        let cfg = self
            .task
            .as_ref()
            .ok_or_else(|| Error::Config("config has no 'task' section".into()))?;
        TaskSpec::from_config(cfg)
    }

    fn schedule(&self) -> Result<Schedule> {
        let cfg = self
            .schedule
            .as_ref()
            .ok_or_else(|| Error::Config("config has no 'schedule' section".into()))?;
        Schedule::from_config(cfg)
    }

    fn algorithm(&self, schedule: Schedule) -> Result<AlgorithmConfig> {
        let sampler = match &self.sampler {
            Some(s) => Sampler::from_config(s)?,
            None => Sampler::UniformIid,
        };
        let gamma = self.algorithm.gamma.unwrap_or(DEFAULT_GAMMA);
        Ok(AlgorithmConfig::new(self.algorithm.variant, schedule, sampler).with_gamma(gamma))
    }

    fn bound_inputs<'a>(&self, task: &TaskSpec, schedule: &'a Schedule) -> BoundInputs<'a> {
        BoundInputs {
            variant: self.algorithm.variant,
            schedule,
            d: task.d,
            n: task.n,
            r: task.r,
            l: task.l,
            g: task.g,
            convex: task.loss.is_convex(),
            hp_alpha: self.bounds.hp_alpha,
            hp_beta: self.bounds.hp_beta,
        }
    }
}

/// Command-line overrides and destinations.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub reps: Option<usize>,
    pub units: Units,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub setups: usize,
    pub tol: f64,
    pub violations: usize,
    pub min_slack: f64,
}

/// Self-contained record of one command: the effective config, its hash,
/// and whatever the command computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub tool_version: String,
    pub timestamp: u64,
    pub units: Units,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<GapEstimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictSummary {
    pub bound: f64,
    pub pass: bool,
    pub ci_pass: bool,
    pub margin: f64,
}

impl From<&Verdict> for VerdictSummary {
    fn from(v: &Verdict) -> Self {
        Self {
            bound: v.bound,
            pass: v.pass,
            ci_pass: v.ci_pass,
            margin: v.margin,
        }
    }
}

/// What a command produced, plus its exit code.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: Option<Report>,
    /// CSV text for `oracle` and `sweep`.
    pub table: Option<String>,
}

/// Bound report as JSON, with the information fields converted to `units`.
pub fn bounds_json(report: &BoundReport, units: Units) -> Result<Value> {
    let mut v = serde_json::to_value(report)?;
    if units == Units::Bits {
        let obj = v.as_object_mut().expect("struct serializes to an object");
        for tier in ["log_tier", "linear_tier"] {
            if let Some(x) = obj.remove(&format!("mi_nats_{tier}")) {
                let bits = x.as_f64().unwrap_or(f64::NAN) * units.scale();
                obj.insert(format!("mi_bits_{tier}"), serde_json::json!(bits));
            }
        }
    }
    Ok(v)
}

fn effective_config(cfg: &ExperimentConfig, opts: &Options) -> ExperimentConfig {
    let mut c = cfg.clone();
    if opts.seed.is_some() {
        c.seed = opts.seed;
    }
    if opts.reps.is_some() {
        c.reps = opts.reps;
    }
    if let Some(tol) = opts.tol {
        c.oracle.get_or_insert_with(OracleSection::default).tol = Some(tol);
    }
    c
}

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn new_report(command: Command, cfg: &ExperimentConfig, units: Units) -> Result<Report> {
    Ok(Report {
        command: command.name().into(),
        config: cfg.clone(),
        config_hash: config_hash(cfg)?,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        timestamp: timestamp(),
        units,
        bounds: None,
        gap: None,
        verdict: None,
        oracle: None,
        runtime_s: None,
    })
}

fn reps_of(cfg: &ExperimentConfig) -> usize {
    cfg.reps.unwrap_or(DEFAULT_REPS)
}

fn seed_of(cfg: &ExperimentConfig) -> u64 {
    cfg.seed.unwrap_or(0)
}

pub fn cmd_bound(cfg: &ExperimentConfig, units: Units) -> Result<Outcome> {
    let task = cfg.task_spec()?;
    let schedule = cfg.schedule()?;
    let report = bound_report(&cfg.bound_inputs(&task, &schedule))?;
    let mut r = new_report(Command::Bound, cfg, units)?;
    r.bounds = Some(bounds_json(&report, units)?);
    Ok(Outcome {
        exit_code: 0,
        report: Some(r),
        table: None,
    })
}

/// Runs the gap experiment and compares it with the variant's expectation bound.
pub fn cmd_gap(cfg: &ExperimentConfig, units: Units) -> Result<Outcome> {
    let started = Instant::now();
    let task = cfg.task_spec()?;
    let schedule = cfg.schedule()?;
    let report = bound_report(&cfg.bound_inputs(&task, &schedule))?;
    let algo = cfg.algorithm(schedule)?;
    let gap = estimate_gap_with(
        &task,
        &algo,
        &cfg.output,
        reps_of(cfg),
        seed_of(cfg),
        cfg.mc_samples.unwrap_or(DEFAULT_MC_SAMPLES),
    )?;
    let verdict = compare(gap.without_samples(), report.gen_expectation);
    let mut r = new_report(Command::Gap, cfg, units)?;
    r.bounds = Some(bounds_json(&report, units)?);
    r.verdict = Some((&verdict).into());
    r.gap = Some(verdict.gap);
    r.runtime_s = Some(started.elapsed().as_secs_f64());
    Ok(Outcome {
        exit_code: if verdict.ci_pass { 0 } else { 1 },
        report: Some(r),
        table: None,
    })
}

/// Optimization error of the averaged SGLD iterate against the three-term bound.
pub fn cmd_opt(cfg: &ExperimentConfig, units: Units) -> Result<Outcome> {
    let started = Instant::now();
    let task = cfg.task_spec()?;
    let schedule = cfg.schedule()?;
    if cfg.algorithm.variant != Variant::Sgld {
        return Err(Error::Unsupported(
            "the optimization-error bound covers SGLD only".into(),
        ));
    }
    let (eta, sigma) = match (schedule.constant_eta(), schedule.constant_sigma()) {
        (Some(e), Some(s)) => (e, s),
        _ => {
            return Err(Error::Unsupported(
                "the optimization-error bound needs constant η and σ".into(),
            ))
        }
    };
    let bound = opt_error_bound(task.g, eta, schedule.len(), task.l, task.d, sigma)?;
    let report = bound_report(&cfg.bound_inputs(&task, &schedule))?;
    let algo = cfg.algorithm(schedule)?;
    let est = estimate_opt_error(&task, &algo, reps_of(cfg), seed_of(cfg))?;
    let verdict = compare(est.without_samples(), bound);
    let mut r = new_report(Command::Opt, cfg, units)?;
    r.bounds = Some(bounds_json(&report, units)?);
    r.verdict = Some((&verdict).into());
    r.gap = Some(verdict.gap);
    r.runtime_s = Some(started.elapsed().as_secs_f64());
    Ok(Outcome {
        exit_code: if verdict.ci_pass { 0 } else { 1 },
        report: Some(r),
        table: None,
    })
}

fn oracle_table(rows: &[OracleRow], units: Units) -> Result<String> {
    let s = units.scale();
    let scaled: Vec<OracleRow> = rows
        .iter()
        .map(|r| OracleRow {
            mi_oracle: r.mi_oracle * s,
            mi_bound: r.mi_bound * s,
            slack: r.slack * s,
            ..r.clone()
        })
        .collect();
    let mut buf = Vec::new();
    write_oracle_csv(&scaled, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

/// Canonical symmetric case plus `setups` random one-dimensional setups.
pub fn cmd_oracle(cfg: &ExperimentConfig, units: Units) -> Result<Outcome> {
    let section = cfg.oracle.clone().unwrap_or_default();
    if section.d != 1 {
        return Err(Error::Unsupported(format!(
            "the quadrature oracle is one-dimensional, got d = {}",
            section.d
        )));
    }
    let tol = section.tol.unwrap_or(DEFAULT_TOL);
    let rows = oracle_sweep(section.setups, seed_of(cfg), tol)?;
    let violations = rows.iter().filter(|r| r.slack < -tol).count();
    let min_slack = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    let mut r = new_report(Command::Oracle, cfg, units)?;
    r.oracle = Some(OracleSummary {
        setups: rows.len(),
        tol,
        violations,
        min_slack: min_slack * units.scale(),
    });
    Ok(Outcome {
        exit_code: if violations == 0 { 0 } else { 1 },
        report: Some(r),
        table: Some(oracle_table(&rows, units)?),
    })
}

fn apply_axis(task: &mut TaskConfig, schedule: &mut ScheduleConfig, param: &str, value: f64) -> Result<()> {
    let count = |v: f64| -> Result<usize> {
        if v >= 0.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(Error::Config(format!(
                "sweep value {v} for '{param}' must be a nonnegative integer"
            )))
        }
    };
    match param {
        "sigma" => schedule.sigma = Some(value),
        "eta" => schedule.c = Some(value),
        "T" => schedule.steps = count(value)?,
        "n" => task.n = count(value)?,
        "L" => task.l = value,
        other => return Err(Error::Config(format!("unknown sweep parameter '{other}'"))),
    }
    Ok(())
}

fn cartesian(axes: &[SweepAxis]) -> Vec<Vec<f64>> {
    let mut cells = vec![Vec::new()];
    for axis in axes {
        cells = cells
            .into_iter()
            .flat_map(|c| {
                axis.values.iter().map(move |v| {
                    let mut next = c.clone();
                    next.push(*v);
                    next
                })
            })
            .collect();
    }
    cells
}

/// Long-format table over a grid of one or two parameters: parameter values,
/// the three information tiers, the expectation bound and optionally the gap.
pub fn cmd_sweep(cfg: &ExperimentConfig, units: Units) -> Result<Outcome> {
    let section = cfg
        .sweep
        .clone()
        .ok_or_else(|| Error::Config("config has no 'sweep' section".into()))?;
    if section.axes.is_empty() || section.axes.len() > 2 {
        return Err(Error::Config(format!(
            "a sweep has one or two axes, got {}",
            section.axes.len()
        )));
    }
    let cells: usize = section.axes.iter().map(|a| a.values.len()).product();
    if cells > MAX_SWEEP_CELLS {
        return Err(Error::Config(format!(
            "sweep grid has {cells} cells, the limit is {MAX_SWEEP_CELLS}"
        )));
    }
    let base_task = cfg
        .task
        .clone()
        .ok_or_else(|| Error::Config("config has no 'task' section".into()))?;
    let base_schedule = cfg
        .schedule
        .clone()
        .ok_or_else(|| Error::Config("config has no 'schedule' section".into()))?;
    if let Some(a) = section.axes.iter().find(|a| !SWEEP_PARAMS.contains(&a.param.as_str())) {
        return Err(Error::Config(format!(
            "unknown sweep parameter '{}' (expected one of {SWEEP_PARAMS:?})",
            a.param
        )));
    }

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = section.axes.iter().map(|a| a.param.clone()).collect();
    let u = units.name();
    header.extend([format!("mi_log_{u}"), format!("mi_mid_{u}"), format!("mi_linear_{u}")]);
    header.extend(["gen_bound".into(), "gap_mean".into(), "gap_stderr".into()]);
    w.write_record(&header)?;
    for cell in cartesian(&section.axes) {
        let (mut task_cfg, mut sched_cfg) = (base_task.clone(), base_schedule.clone());
        for (axis, v) in section.axes.iter().zip(&cell) {
            apply_axis(&mut task_cfg, &mut sched_cfg, &axis.param, *v)?;
        }
        let task = TaskSpec::from_config(&task_cfg)?;
        let schedule = Schedule::from_config(&sched_cfg)?;
        let variant = cfg.algorithm.variant;
        let tiers = if variant == Variant::Sgld {
            mi_budget(&schedule, task.d, task.l)?.total()
        } else {
            variant_mi(variant, &schedule, task.d, task.l)?
        };
        let gen = variant_gen_bound(variant, task.r, task.n, &schedule, task.d, task.l)?;
        let (gap_mean, gap_stderr) = if section.gap {
            let algo = cfg.algorithm(schedule)?;
            let g = estimate_gap_with(
                &task,
                &algo,
                &cfg.output,
                reps_of(cfg),
                seed_of(cfg),
                cfg.mc_samples.unwrap_or(DEFAULT_MC_SAMPLES),
            )?;
            (fmt_f64(g.mean_gap), fmt_f64(g.stderr))
        } else {
            (String::new(), String::new())
        };
        let s = units.scale();
        let mut row: Vec<String> = cell.iter().map(|v| fmt_f64(*v)).collect();
        row.extend([
            fmt_f64(tiers.log * s),
            fmt_f64(tiers.mid * s),
            fmt_f64(tiers.linear * s),
            fmt_f64(gen),
        ]);
        row.extend([gap_mean, gap_stderr]);
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(Outcome {
        exit_code: 0,
        report: None,
        table: Some(String::from_utf8(bytes).expect("csv output is UTF-8")),
    })
}

pub fn execute(command: Command, cfg: &ExperimentConfig, opts: &Options) -> Result<Outcome> {
    let cfg = effective_config(cfg, opts);
    match command {
        Command::Bound => cmd_bound(&cfg, opts.units),
        Command::Gap => cmd_gap(&cfg, opts.units),
        Command::Opt => cmd_opt(&cfg, opts.units),
        Command::Oracle => cmd_oracle(&cfg, opts.units),
        Command::Sweep => cmd_sweep(&cfg, opts.units),
    }
}

fn persist(command: Command, outcome: &Outcome, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    if let Some(report) = &outcome.report {
        fs::write(
            dir.join(format!("{}.json", command.name())),
            serde_json::to_string_pretty(report)? + "\n",
        )?;
    }
    if let Some(table) = &outcome.table {
        fs::write(dir.join(format!("{}.csv", command.name())), table)?;
    }
    Ok(())
}

/// Loads the config, runs the command, prints and persists the results.
/// Returns the process exit code.
pub fn run<O: Write, E: Write>(command: Command, opts: &Options, stdout: &mut O, stderr: &mut E) -> i32 {
    let result = (|| -> Result<Outcome> {
        let cfg = match &opts.config {
            Some(path) => ExperimentConfig::load(path)?,
            None if command == Command::Oracle => ExperimentConfig::from_json("{}")?,
            None => return Err(Error::Config(format!("'{}' needs --config", command.name()))),
        };
        let outcome = execute(command, &cfg, opts)?;
        match (&outcome.table, &outcome.report) {
            (Some(t), _) if opts.out.is_none() => write!(stdout, "{t}")?,
            (_, Some(r)) => writeln!(stdout, "{}", serde_json::to_string_pretty(r)?)?,
            _ => {}
        }
        if let Some(dir) = &opts.out {
            persist(command, &outcome, dir)?;
        }
        Ok(outcome)
    })();
    match result {
        Ok(o) => o.exit_code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
