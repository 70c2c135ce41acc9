//! Command-line front end: parses a [`RunConfig`], dispatches to the physics
//! modules and renders CSV or JSON.
//!
//! Every float is written with 17 significant digits so the text round-trips
//! to the same `f64`. Output depends only on the configuration: parallel
//! work is collected in input order, so the worker count never changes a
//! byte.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::criterion::{classify, critical_mass, CriterionResult, DEFAULT_BAND};
use crate::error::Error;
use crate::fields::{self, QuadratureConfig};
use crate::reduction::{
    integrate_gravity_dominant, integrate_quantum_dominant, mass_sweep, reduction_times,
    IntegratorConfig, RadialState, ReductionResult, WidthMode,
};
use crate::units::UnitSystem;
use crate::wavepacket::{PacketSpec, RadialSampler};

pub const THREADS_ENV: &str = "GRAVICOLLAPSE_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Criterion,
    Fields,
    Regimes,
    Trajectory,
    Reduce,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Units {
    Planck,
    Si,
}

impl From<Units> for UnitSystem {
    fn from(u: Units) -> Self {
        match u {
            Units::Planck => UnitSystem::PLANCK,
            Units::Si => UnitSystem::SI,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Frozen,
    Spreading,
}

impl From<Mode> for WidthMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Frozen => WidthMode::FrozenWidth,
            Mode::Spreading => WidthMode::SpreadingWidth,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(
    name = "gravicollapse",
    version,
    allow_negative_numbers = true,
    about = "Bohmian self-gravity collapse: criteria, fields, regimes and reduction times"
)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,

    #[arg(long, value_enum, default_value = "planck")]
    pub units: Units,

    /// Particle mass
    #[arg(long)]
    pub mass: Option<f64>,

    /// Initial packet width
    #[arg(long)]
    pub sigma0: Option<f64>,

    /// Extra widths for the `regimes` grid
    #[arg(long, value_delimiter = ',')]
    pub sigma0s: Vec<f64>,

    /// Initial radius (default: sigma0)
    #[arg(long)]
    pub r0: Option<f64>,

    /// Initial radial velocity
    #[arg(long, default_value_t = 0.0)]
    pub u0: f64,

    #[arg(long, value_enum, default_value = "frozen")]
    pub mode: Mode,

    /// Comma-separated masses for `sweep` and `regimes`
    #[arg(long, value_delimiter = ',')]
    pub masses: Vec<f64>,

    /// Integration horizon (default: scaled to the packet's natural timescale)
    #[arg(long)]
    pub t_max: Option<f64>,

    #[arg(long, default_value_t = 1e-9)]
    pub rel_tol: f64,

    #[arg(long, default_value_t = 1e-12)]
    pub abs_tol: f64,

    /// Half-width of the transition band around force balance
    #[arg(long, default_value_t = DEFAULT_BAND)]
    pub band: f64,

    /// Output format (default: csv for fields and trajectory, json otherwise)
    #[arg(long, value_enum)]
    pub out_format: Option<OutFormat>,

    /// Write output here instead of standard output
    #[arg(long)]
    pub out_path: Option<PathBuf>,

    /// Seed for sampled ensembles
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Number of sampled trajectories for `trajectory` (1 = single run from r0)
    #[arg(long, default_value_t = 1)]
    pub count: usize,

    /// Outer radius of the `fields` table, in units of sigma0
    #[arg(long, default_value_t = 4.0)]
    pub r_max: f64,

    /// Number of radii in the `fields` table
    #[arg(long, default_value_t = 81)]
    pub points: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("argument error: {0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }
}

/// Rendered output: the main document plus optional side files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub body: String,
    pub extra: Vec<(PathBuf, String)>,
}

pub fn fmt_num(x: f64) -> String {
    // fold −0 into 0
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(serde_json::from_str(&fmt_num(x)).expect("formatted float is a JSON number"))
    } else {
        Value::Null
    }
}

fn require(name: &str, v: Option<f64>) -> Result<f64, CliError> {
    let v = v.ok_or_else(|| CliError::Usage(format!("--{name} is required")))?;
    positive_flag(name, v)
}

fn positive_flag(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Usage(format!(
            "--{name} must be positive, got {v}"
        )))
    }
}

fn require_list(name: &str, v: &[f64]) -> Result<(), CliError> {
    if v.is_empty() {
        return Err(CliError::Usage(format!("--{name} is required")));
    }
    for &x in v {
        positive_flag(name, x)?;
    }
    Ok(())
}

impl RunConfig {
    fn unit_system(&self) -> UnitSystem {
        self.units.into()
    }

    fn format(&self) -> OutFormat {
        self.out_format.unwrap_or(match self.command {
            Command::Fields | Command::Trajectory => OutFormat::Csv,
            _ => OutFormat::Json,
        })
    }

    fn integrator(&self, default_t_max: f64) -> Result<IntegratorConfig, CliError> {
        let ic = IntegratorConfig {
            rel_tol: positive_flag("rel-tol", self.rel_tol)?,
            abs_tol: positive_flag("abs-tol", self.abs_tol)?,
            t_max: match self.t_max {
                Some(t) => positive_flag("t-max", t)?,
                None => default_t_max,
            },
            ..IntegratorConfig::default()
        };
        Ok(ic)
    }

    fn packet(&self) -> Result<PacketSpec, CliError> {
        let m = require("mass", self.mass)?;
        let s = require("sigma0", self.sigma0)?;
        Ok(PacketSpec::new(m, s, self.unit_system())?)
    }
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values are serializable");
    s.push('\n');
    s
}

fn series_rows(series: &[RadialState]) -> Vec<Vec<String>> {
    series
        .iter()
        .map(|s| vec![fmt_num(s.t), fmt_num(s.r), fmt_num(s.u), fmt_num(s.sigma)])
        .collect()
}

fn series_json(series: &[RadialState]) -> Value {
    Value::Array(
        series
            .iter()
            .map(|s| json!({"t": num(s.t), "r": num(s.r), "u": num(s.u), "sigma": num(s.sigma)}))
            .collect(),
    )
}

fn reduction_summary(r: &ReductionResult) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("fall_time_numeric".into(), num(r.fall_time_numeric));
    m.insert("tau_width_formula".into(), num(r.tau_width_formula));
    m.insert("tau_mass_formula".into(), num(r.tau_mass_formula));
    m.insert("tau_dp".into(), num(r.tau_dp));
    m.insert("tau_avg".into(), num(r.tau_avg));
    m.insert("mode".into(), Value::from(r.mode.label()));
    m.insert("validity_flag".into(), Value::from(r.validity_flag));
    m
}

fn run_criterion(cfg: &RunConfig) -> Result<Rendered, CliError> {
    let u = cfg.unit_system();
    let m = require("mass", cfg.mass)?;
    let res = CriterionResult::compute(m, u, &QuadratureConfig::default())?;
    let times = reduction_times(&PacketSpec::new(m, res.sigma_canonical, u)?);
    let body = match cfg.format() {
        OutFormat::Json => {
            let mut v = json!({
                "units": u.label(),
                "mass": num(m),
                "sigma_canonical": num(res.sigma_canonical),
                "sigma_force_balance": num(res.sigma_force_balance),
                "sigma_energy_min": num(res.sigma_energy_min),
                "m_c": num(res.m_c),
                "prefactors": {
                    "canonical": num(res.prefactors.canonical),
                    "force_balance": num(res.prefactors.force_balance),
                    "energy_min": num(res.prefactors.energy_min),
                },
                "tau_width_formula": num(times.tau_width_formula),
                "tau_mass_formula": num(times.tau_mass_formula),
            });
            if let Some(s) = cfg.sigma0 {
                v["m_c_at_sigma0"] = num(critical_mass(positive_flag("sigma0", s)?, u)?);
            }
            json_text(&v)
        }
        OutFormat::Csv => csv_table(
            &[
                "units",
                "mass",
                "sigma_canonical",
                "sigma_force_balance",
                "sigma_energy_min",
                "m_c",
                "tau_width_formula",
                "tau_mass_formula",
            ],
            &[vec![
                u.label().to_string(),
                fmt_num(m),
                fmt_num(res.sigma_canonical),
                fmt_num(res.sigma_force_balance),
                fmt_num(res.sigma_energy_min),
                fmt_num(res.m_c),
                fmt_num(times.tau_width_formula),
                fmt_num(times.tau_mass_formula),
            ]],
        ),
    };
    Ok(Rendered {
        body,
        extra: vec![],
    })
}

fn run_fields(cfg: &RunConfig) -> Result<Rendered, CliError> {
    let p = cfg.packet()?;
    if cfg.points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let r_max = positive_flag("r-max", cfg.r_max)? * p.sigma0;
    let samples: Vec<_> = (0..cfg.points)
        .map(|i| fields::sample(&p, r_max * i as f64 / (cfg.points - 1) as f64, p.sigma0))
        .collect();
    let body = match cfg.format() {
        OutFormat::Csv => csv_table(
            &["r", "Q", "f_q", "U_g", "f_g", "rho"],
            &samples
                .iter()
                .map(|s| {
                    [s.r, s.q, s.f_q, s.u_g, s.f_g, s.rho]
                        .iter()
                        .map(|&x| fmt_num(x))
                        .collect()
                })
                .collect::<Vec<_>>(),
        ),
        OutFormat::Json => json_text(&json!({
            "units": p.units.label(),
            "mass": num(p.mass),
            "sigma0": num(p.sigma0),
            "rows": samples.iter().map(|s| json!({
                "r": num(s.r), "Q": num(s.q), "f_q": num(s.f_q),
                "U_g": num(s.u_g), "f_g": num(s.f_g), "rho": num(s.rho),
            })).collect::<Vec<_>>(),
        })),
    };
    Ok(Rendered {
        body,
        extra: vec![],
    })
}

fn run_regimes(cfg: &RunConfig) -> Result<Rendered, CliError> {
    let u = cfg.unit_system();
    let masses: Vec<f64> = if cfg.masses.is_empty() {
        vec![require("mass", cfg.mass)?]
    } else {
        require_list("masses", &cfg.masses)?;
        cfg.masses.clone()
    };
    let widths: Vec<f64> = if cfg.sigma0s.is_empty() {
        vec![require("sigma0", cfg.sigma0)?]
    } else {
        require_list("sigma0s", &cfg.sigma0s)?;
        cfg.sigma0s.clone()
    };
    let band = positive_flag("band", cfg.band)?;
    let grid: Vec<(f64, f64)> = masses
        .iter()
        .flat_map(|&m| widths.iter().map(move |&s| (m, s)))
        .collect();
    let reports = grid
        .par_iter()
        .map(|&(m, s)| classify(&PacketSpec::new(m, s, u)?, band))
        .collect::<Result<Vec<_>, Error>>()?;

    let header = [
        "units",
        "mass",
        "sigma0",
        "regime",
        "balance_ratio",
        "omega0",
        "omega0_quantum",
        "omega0_gravity",
        "fq_avg",
        "fg_avg",
        "tolerance_band",
    ];
    let body = match cfg.format() {
        OutFormat::Csv => csv_table(
            &header,
            &grid
                .iter()
                .zip(&reports)
                .map(|(&(m, s), r)| {
                    vec![
                        u.label().to_string(),
                        fmt_num(m),
                        fmt_num(s),
                        r.regime.to_string(),
                        fmt_num(r.balance_ratio),
                        fmt_num(r.omega0.omega),
                        fmt_num(r.omega0.quantum_part),
                        fmt_num(r.omega0.gravity_part),
                        fmt_num(r.fq_avg),
                        fmt_num(r.fg_avg),
                        fmt_num(r.tolerance_band),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
        OutFormat::Json => json_text(&Value::Array(
            grid.iter()
                .zip(&reports)
                .map(|(&(m, s), r)| {
                    json!({
                        "units": u.label(),
                        "mass": num(m),
                        "sigma0": num(s),
                        "regime": r.regime.to_string(),
                        "balance_ratio": num(r.balance_ratio),
                        "omega0": num(r.omega0.omega),
                        "omega0_quantum": num(r.omega0.quantum_part),
                        "omega0_gravity": num(r.omega0.gravity_part),
                        "fq_avg": num(r.fq_avg),
                        "fg_avg": num(r.fg_avg),
                        "tolerance_band": num(r.tolerance_band),
                    })
                })
                .collect(),
        )),
    };
    Ok(Rendered {
        body,
        extra: vec![],
    })
}

fn run_trajectory(cfg: &RunConfig) -> Result<Rendered, CliError> {
    let p = cfg.packet()?;
    let ic = cfg.integrator(10.0 / p.spreading_rate())?;
    if cfg.count == 0 {
        return Err(CliError::Usage("--count must be at least 1".into()));
    }
    let starts: Vec<f64> = if cfg.count == 1 {
        vec![cfg.r0.unwrap_or(p.sigma0)]
    } else {
        RadialSampler::new(&p, cfg.seed).take(cfg.count).collect()
    };
    let runs = starts
        .par_iter()
        .map(|&r0| integrate_quantum_dominant(&p, r0, cfg.u0, &ic))
        .collect::<Result<Vec<_>, Error>>()?;

    let body = match (cfg.format(), runs.len()) {
        (OutFormat::Csv, 1) => csv_table(&["t", "r", "u", "sigma"], &series_rows(&runs[0].series)),
        (OutFormat::Csv, _) => {
            let mut rows = Vec::new();
            for (i, run) in runs.iter().enumerate() {
                for mut row in series_rows(&run.series) {
                    row.insert(0, i.to_string());
                    rows.push(row);
                }
            }
            csv_table(&["trajectory", "t", "r", "u", "sigma"], &rows)
        }
        (OutFormat::Json, _) => json_text(&json!({
            "units": p.units.label(),
            "mass": num(p.mass),
            "sigma0": num(p.sigma0),
            "u0": num(cfg.u0),
            "trajectories": starts.iter().zip(&runs).map(|(&r0, run)| json!({
                "r0": num(r0),
                "truncated": run.truncated,
                "series": series_json(&run.series),
            })).collect::<Vec<_>>(),
        })),
    };
    Ok(Rendered {
        body,
        extra: vec![],
    })
}

fn run_reduce(cfg: &RunConfig) -> Result<Rendered, CliError> {
    let p = cfg.packet()?;
    let r0 = match cfg.r0 {
        Some(r) => positive_flag("r0", r)?,
        None => p.sigma0,
    };
    let ic = cfg.integrator(100.0 * p.fall_timescale())?;
    let res = integrate_gravity_dominant(&p, r0, cfg.u0, cfg.mode.into(), &ic)?;

    let mut summary = reduction_summary(&res);
    summary.insert("units".into(), Value::from(p.units.label()));
    summary.insert("mass".into(), num(p.mass));
    summary.insert("sigma0".into(), num(p.sigma0));
    summary.insert("r0".into(), num(r0));
    summary.insert("u0".into(), num(cfg.u0));

    match cfg.format() {
        OutFormat::Json => {
            summary.insert("series".into(), series_json(&res.series));
            Ok(Rendered {
                body: json_text(&Value::Object(summary)),
                extra: vec![],
            })
        }
        OutFormat::Csv => {
            let body = csv_table(&["t", "r", "u", "sigma"], &series_rows(&res.series));
            let extra = match &cfg.out_path {
                Some(path) => vec![(
                    path.with_extension("summary.json"),
                    json_text(&Value::Object(summary)),
                )],
                None => vec![],
            };
            Ok(Rendered { body, extra })
        }
    }
}

fn run_sweep(cfg: &RunConfig) -> Result<Rendered, CliError> {
    require_list("masses", &cfg.masses)?;
    let sigma0 = require("sigma0", cfg.sigma0)?;
    let u = cfg.unit_system();
    let lightest = cfg.masses.iter().cloned().fold(f64::INFINITY, f64::min);
    let slowest = PacketSpec::new(lightest, sigma0, u)?.fall_timescale();
    let ic = cfg.integrator(100.0 * slowest)?;
    let rows = mass_sweep(&cfg.masses, sigma0, u, &ic);

    let header = [
        "units",
        "mass",
        "fall_time_numeric",
        "tau_width_formula",
        "tau_mass_formula",
        "tau_dp",
        "tau_avg",
        "validity_flag",
        "error",
    ];
    let body = match cfg.format() {
        OutFormat::Csv => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|row| match &row.result {
                    Ok(r) => vec![
                        u.label().to_string(),
                        fmt_num(row.mass),
                        fmt_num(r.fall_time_numeric),
                        fmt_num(r.tau_width_formula),
                        fmt_num(r.tau_mass_formula),
                        fmt_num(r.tau_dp),
                        fmt_num(r.tau_avg),
                        r.validity_flag.to_string(),
                        String::new(),
                    ],
                    Err(e) => {
                        let mut v = vec![u.label().to_string(), fmt_num(row.mass)];
                        v.extend(std::iter::repeat_n(String::new(), 6));
                        v.push(format!("\"{}\"", e.to_string().replace('"', "\"\"")));
                        v
                    }
                })
                .collect();
            csv_table(&header, &table)
        }
        OutFormat::Json => json_text(&Value::Array(
            rows.iter()
                .map(|row| {
                    let mut m = match &row.result {
                        Ok(r) => reduction_summary(r),
                        Err(e) => {
                            let mut m = Map::new();
                            m.insert("error".into(), Value::from(e.to_string()));
                            m
                        }
                    };
                    m.insert("mass".into(), num(row.mass));
                    m.insert("sigma0".into(), num(sigma0));
                    m.insert("units".into(), Value::from(u.label()));
                    Value::Object(m)
                })
                .collect(),
        )),
    };
    Ok(Rendered {
        body,
        extra: vec![],
    })
}

/// Runs one command on the current rayon pool.
pub fn render(cfg: &RunConfig) -> Result<Rendered, CliError> {
    match cfg.command {
        Command::Criterion => run_criterion(cfg),
        Command::Fields => run_fields(cfg),
        Command::Regimes => run_regimes(cfg),
        Command::Trajectory => run_trajectory(cfg),
        Command::Reduce => run_reduce(cfg),
        Command::Sweep => run_sweep(cfg),
    }
}

/// Runs one command on a dedicated pool of `workers` threads (rayon's
/// default when `None`).
pub fn render_with_workers(cfg: &RunConfig, workers: Option<usize>) -> Result<Rendered, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot build worker pool: {e}")))?;
    pool.install(|| render(cfg))
}

/// Worker count from `GRAVICOLLAPSE_THREADS`, if set.
pub fn workers_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "{THREADS_ENV} must be a positive integer, got `{v}`"
                ))
            }),
        Err(_) => Ok(None),
    }
}

/// Renders and writes all artifacts; returns the text destined for stdout.
pub fn run(cfg: &RunConfig, workers: Option<usize>) -> Result<String, CliError> {
    let out = render_with_workers(cfg, workers)?;
    for (path, text) in &out.extra {
        std::fs::write(path, text)?;
    }
    match &cfg.out_path {
        Some(path) => {
            std::fs::write(path, &out.body)?;
            let mut note = String::new();
            let _ = writeln!(note, "wrote {}", path.display());
            Ok(note)
        }
        None => Ok(out.body),
    }
}
