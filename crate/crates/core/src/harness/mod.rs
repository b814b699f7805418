//! Experiment runner behind the `dnls-lab` binary.
//!
//! A run reads one [`ExperimentConfig`], writes CSV series plus a TOML
//! report into an output directory, and maps failures onto exit codes:
//! 2 validation, 3 degenerate experiment, 4 divergence, 5 contraction
//! failure. Every file starts with the resolved config and the derived
//! `γ`, `v*`, `λ` and per-member `h`.

mod config;
mod output;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

pub use config::{
    Derived, DerivedMember, ExperimentConfig, FamilyConfig, GridConfig, KinkConfig, SolitonConfig, SweepConfig,
    TimeConfig, Tolerances, TrainConfig,
};
pub use output::{emit_toml, format_float, to_table, OutputDir, Series};

use crate::error::{Error, Result};
use crate::fixedpoint::{picard_solve, synthesize, PicardOptions, PicardReport};
use crate::profiles::TrainSpec;
use crate::spectral::{Field, TAIL_TOLERANCE};
use crate::trains::{drift_experiment, residual_decay, DecayFit, DriftOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    Profile,
    Residual,
    Evolve,
    Fixpoint,
    Sweep,
}

impl Command {
    pub const ALL: [Command; 5] = [
        Command::Profile,
        Command::Residual,
        Command::Evolve,
        Command::Fixpoint,
        Command::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Profile => "profile",
            Command::Residual => "residual",
            Command::Evolve => "evolve",
            Command::Fixpoint => "fixpoint",
            Command::Sweep => "sweep",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown command {s:?}")))
    }
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_)
        | Error::InvalidParameter(_)
        | Error::InvalidFamily(_)
        | Error::UnsupportedOrientation(_)
        | Error::DecayViolation { .. }
        | Error::Config(_) => 2,
        Error::InsufficientMembers(_) | Error::DegenerateFit(_) => 3,
        Error::Divergence { .. } => 4,
        Error::ContractionFailure { .. } => 5,
        Error::Io(_) => 1,
    }
}

/// What a finished run left behind.
#[derive(Debug)]
pub struct RunSummary {
    pub files: Vec<std::path::PathBuf>,
    /// Nonzero only for sweeps where some member run failed.
    pub exit_code: i32,
    /// Human-readable notes (separation-gate warnings and the like).
    pub warnings: Vec<String>,
}

/// Runs `command` on `cfg`, writing into `out`.
pub fn run(command: Command, cfg: &ExperimentConfig, out: &Path) -> Result<RunSummary> {
    let spec = cfg.spec()?;
    spec.validate()?;
    let mut dir = OutputDir::create(out)?;
    let ctx = Context::new(command, cfg, &spec)?;
    let mut warnings = Vec::new();
    let exit_code = match command {
        Command::Profile => cmd_profile(&ctx, &mut dir).map(|_| 0),
        Command::Residual => cmd_residual(&ctx, &mut dir).map(|_| 0),
        Command::Evolve => cmd_evolve(&ctx, &mut dir, &mut warnings).map(|_| 0),
        Command::Fixpoint => cmd_fixpoint(&ctx, &mut dir).map(|_| 0),
        Command::Sweep => cmd_sweep(cfg, &mut dir, &mut warnings),
    }?;
    Ok(RunSummary {
        files: dir.written().to_vec(),
        exit_code,
        warnings,
    })
}

struct Context<'a> {
    command: Command,
    cfg: &'a ExperimentConfig,
    spec: &'a TrainSpec,
    derived: Derived,
}

impl<'a> Context<'a> {
    fn new(command: Command, cfg: &'a ExperimentConfig, spec: &'a TrainSpec) -> Result<Self> {
        Ok(Context {
            command,
            cfg,
            spec,
            derived: Derived::of(spec)?,
        })
    }

    fn preamble(&self) -> Result<toml::Table> {
        let mut t = toml::Table::new();
        t.insert("command".into(), toml::Value::String(self.command.name().into()));
        t.insert("config".into(), toml::Value::Table(to_table(self.cfg)?));
        t.insert("derived".into(), toml::Value::Table(to_table(&self.derived)?));
        Ok(t)
    }

    fn csv(&self, dir: &mut OutputDir, name: &str, series: &Series) -> Result<()> {
        dir.write(name, &series.to_csv(&emit_toml(&self.preamble()?)))
    }

    fn report<R: Serialize>(&self, dir: &mut OutputDir, result: &R) -> Result<()> {
        let mut t = self.preamble()?;
        t.insert("result".into(), toml::Value::Table(to_table(result)?));
        dir.write("report.toml", &emit_toml(&t))
    }
}

fn parts(f: &Field) -> [Vec<f64>; 3] {
    let v = f.values();
    [
        v.iter().map(|z| z.re).collect(),
        v.iter().map(|z| z.im).collect(),
        v.iter().map(|z| z.norm()).collect(),
    ]
}

#[derive(Serialize)]
struct ProfileResult {
    t: f64,
    members: Vec<MemberSummary>,
    train_sup: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    plateau: Option<Plateau>,
}

#[derive(Serialize)]
struct MemberSummary {
    label: String,
    sup: f64,
}

/// Kink plateau against `ζ = √(2c₀/γ)`.
#[derive(Serialize)]
struct Plateau {
    value: f64,
    zeta: f64,
    error: f64,
}

fn cmd_profile(ctx: &Context, dir: &mut OutputDir) -> Result<()> {
    let grid = ctx.cfg.grid()?;
    let t = ctx.cfg.time.t0;
    let mut series = Series::new().column("x", grid.points());
    let mut members = Vec::new();
    let first = usize::from(ctx.spec.kink.is_none());
    for (i, m) in ctx.spec.members().iter().enumerate() {
        let label = m.label(i + first);
        let f = m.field(t, &grid, TAIL_TOLERANCE)?;
        let [re, im, abs] = parts(&f);
        let col = label.replace(' ', "");
        members.push(MemberSummary {
            sup: f.sup_norm(),
            label,
        });
        series = series
            .column(format!("{col}_re"), re)
            .column(format!("{col}_im"), im)
            .column(format!("{col}_abs"), abs);
    }
    let train = ctx.spec.profile_field(t, &grid, TAIL_TOLERANCE)?;
    let [re, im, abs] = parts(&train);
    let plateau = ctx.spec.kink.as_ref().map(|k| {
        let zeta = k.zeta();
        Plateau {
            value: abs[0],
            zeta,
            error: (abs[0] - zeta).abs(),
        }
    });
    series = series.column("train_re", re).column("train_im", im).column("train_abs", abs);
    ctx.csv(dir, "profile.csv", &series)?;
    ctx.report(
        dir,
        &ProfileResult {
            t,
            members,
            train_sup: train.sup_norm(),
            plateau,
        },
    )
}

#[derive(Serialize)]
struct ResidualResult {
    v_star: f64,
    lambda: f64,
    fit: DecayFit,
    sup_fit: DecayFit,
    fitted_rate_ge_lambda: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    empirical_t0: Option<f64>,
}

fn sample_times(cfg: &ExperimentConfig) -> Vec<f64> {
    let t = &cfg.time;
    let n = t.samples.max(2);
    (0..n).map(|i| t.t0 + (t.t1 - t.t0) * i as f64 / (n - 1) as f64).collect()
}

fn cmd_residual(ctx: &Context, dir: &mut OutputDir) -> Result<()> {
    let grid = ctx.cfg.grid()?;
    let d = residual_decay(ctx.spec, &grid, &sample_times(ctx.cfg))?;
    let series = Series::new()
        .column("t", d.times.clone())
        .column("residual_h2", d.h2.clone())
        .column("residual_w2inf", d.sup.clone());
    ctx.csv(dir, "residual.csv", &series)?;
    ctx.report(
        dir,
        &ResidualResult {
            v_star: d.v_star,
            lambda: d.lambda,
            fitted_rate_ge_lambda: d.fit.rate >= d.lambda,
            fit: d.fit,
            sup_fit: d.sup_fit,
            empirical_t0: d.t0,
        },
    )
}

#[derive(Serialize)]
struct EvolveResult {
    t0: f64,
    t1: f64,
    dt: f64,
    max_distance: f64,
    final_distance: f64,
    residual_at_start: f64,
    gate_threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    gate_ratio: Option<f64>,
    gate_passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<String>,
}

fn cmd_evolve(ctx: &Context, dir: &mut OutputDir, warnings: &mut Vec<String>) -> Result<()> {
    let grid = ctx.cfg.grid()?;
    let t = &ctx.cfg.time;
    let opts = DriftOptions {
        record_every: t.record_every,
        gate_threshold: ctx.cfg.tolerances.separation_gate,
    };
    let r = drift_experiment(ctx.spec, &grid, t.t0, t.t1, t.dt, opts)?;
    let warning = (!r.gate.passed).then(|| {
        format!(
            "separation too weak: separation_lhs / v* = {} is not below {}",
            format_float(r.gate.ratio.unwrap_or(f64::NAN)),
            format_float(r.gate.threshold)
        )
    });
    warnings.extend(warning.clone());
    ctx.csv(
        dir,
        "drift.csv",
        &Series::new().column("t", r.times.clone()).column("distance_h1", r.distance.clone()),
    )?;
    ctx.report(
        dir,
        &EvolveResult {
            t0: t.t0,
            t1: t.t1,
            dt: t.dt,
            max_distance: r.distance.iter().copied().fold(0.0, f64::max),
            final_distance: *r.distance.last().expect("initial sample"),
            residual_at_start: r.residual_at_start,
            gate_threshold: r.gate.threshold,
            gate_ratio: r.gate.ratio,
            gate_passed: r.gate.passed,
            warning,
        },
    )
}

#[derive(Serialize)]
struct FixpointResult {
    t0: f64,
    tmax: f64,
    dt_s: f64,
    picard: PicardReport,
    max_ratio: f64,
    max_relation_defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    distance_fit: Option<DistanceFit>,
}

#[derive(Serialize)]
struct DistanceFit {
    window: (f64, f64),
    fit: DecayFit,
    kappa: f64,
}

fn picard_series(report: &PicardReport) -> Series {
    let n = report.xnorms.len();
    Series::new()
        .column("iterate", (1..=n).map(|i| i as f64).collect())
        .column("xnorm", report.xnorms.clone())
        .column("ratio", std::iter::once(f64::NAN).chain(report.ratios.iter().copied()).take(n).collect())
}

fn cmd_fixpoint(ctx: &Context, dir: &mut OutputDir) -> Result<()> {
    let grid = ctx.cfg.grid()?;
    let t = &ctx.cfg.time;
    let opts = PicardOptions {
        max_iters: ctx.cfg.tolerances.picard_max_iters,
        tol: ctx.cfg.tolerances.picard_tol,
    };
    let (eta, report) = match picard_solve(ctx.spec, &grid, t.t0, t.t1, t.dt_s, opts) {
        Ok(v) => v,
        Err(Error::ContractionFailure { report }) => {
            ctx.csv(dir, "picard.csv", &picard_series(&report))?;
            return Err(Error::ContractionFailure { report });
        }
        Err(e) => return Err(e),
    };
    ctx.csv(dir, "picard.csv", &picard_series(&report))?;
    let syn = synthesize(ctx.spec, &eta)?;
    ctx.csv(
        dir,
        "synthesis.csv",
        &Series::new()
            .column("t", syn.times.clone())
            .column("distance_h1", syn.distance.clone())
            .column("relation_defect", syn.relation_defect.clone()),
    )?;
    let lambda = report.lambda;
    let window = (t.t0, t.t1 - if lambda > 0.0 { 2.0 / lambda } else { 0.0 });
    let distance_fit = if lambda > 0.0 && window.1 > window.0 {
        match syn.fit(window.0, window.1, lambda) {
            Ok((fit, kappa)) => Some(DistanceFit { window, fit, kappa }),
            Err(Error::DegenerateFit(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    ctx.report(
        dir,
        &FixpointResult {
            t0: t.t0,
            tmax: t.t1,
            dt_s: t.dt_s,
            max_ratio: report.ratios.iter().copied().fold(0.0, f64::max),
            picard: report,
            max_relation_defect: syn.relation_defect.iter().copied().fold(0.0, f64::max),
            distance_fit,
        },
    )
}

#[derive(Serialize)]
struct SweepEntry {
    index: usize,
    value: toml::Value,
    dir: String,
    exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn cmd_sweep(cfg: &ExperimentConfig, dir: &mut OutputDir, warnings: &mut Vec<String>) -> Result<i32> {
    let sweep = cfg
        .sweep
        .clone()
        .ok_or_else(|| Error::Config("sweep needs a [sweep] table".into()))?;
    let command: Command = sweep.command.parse()?;
    if command == Command::Sweep {
        return Err(Error::Config("a sweep cannot run sweeps".into()));
    }
    let mut base = cfg.clone();
    base.sweep = None;
    // every member config is checked before anything runs
    let members: Vec<ExperimentConfig> = sweep
        .values
        .iter()
        .map(|v| base.with_override(&sweep.key, v.clone()))
        .collect::<Result<_>>()?;
    let root = dir.root().to_path_buf();
    let results: Vec<(SweepEntry, Vec<std::path::PathBuf>, Vec<String>)> = members
        .par_iter()
        .enumerate()
        .map(|(i, member)| {
            let name = format!("run{i:03}");
            let outcome = run(command, member, &root.join(&name));
            let (exit_code, error, files, warns) = match outcome {
                Ok(s) => (s.exit_code, None, s.files, s.warnings),
                Err(e) => (exit_code(&e), Some(e.to_string()), Vec::new(), Vec::new()),
            };
            let entry = SweepEntry {
                index: i,
                value: sweep.values[i].clone(),
                dir: name,
                exit_code,
                error,
            };
            (entry, files, warns)
        })
        .collect();
    let mut entries = Vec::new();
    for (entry, _files, warns) in results {
        warnings.extend(warns.into_iter().map(|w| format!("{}: {w}", entry.dir)));
        entries.push(entry);
    }
    let code = entries.iter().map(|e| e.exit_code).find(|&c| c != 0).unwrap_or(0);
    let mut t = toml::Table::new();
    t.insert("command".into(), toml::Value::String("sweep".into()));
    t.insert("config".into(), toml::Value::Table(to_table(cfg)?));
    t.insert("derived".into(), toml::Value::Table(to_table(&Derived::of(&cfg.spec()?)?)?));
    t.insert(
        "runs".into(),
        toml::Value::Array(entries.iter().map(|e| to_table(e).map(toml::Value::Table)).collect::<Result<_>>()?),
    );
    dir.write("sweep.toml", &emit_toml(&t))?;
    Ok(code)
}
