//! Command-line front end: argument parsing and mode dispatch.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::checkpoint;
use crate::config::{DiagnoseConfig, Mode, RunConfig};
use crate::energy::{energy_report, EnergyReport};
use crate::error::Error;
use crate::evolution::{constraint_defects, dispersion_check, simulate_partial, Trajectory};
use crate::halfplane::field_rows;
use crate::initial::generate_initial;
use crate::mollify::convergence_study;
use crate::output;
use crate::spectral::C64;
use crate::stability::{search_m, stability_report, SolutionPair};
use crate::state::{aa1_residual, compute_a1, compute_b, compute_b_alpha, A1Method, DerivedQuantities, WaterWaveState};

/// Exit status when a run stops on blow-up.
pub const EXIT_BLOWUP: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "waterwave", version, about = "Conformal-variable water wave simulator and diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Overrides the seed of random initial data.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for independent runs.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Integrate the initial data and write energy diagnostics and checkpoints.
    Simulate,
    /// Diagnostics of a single state.
    Diagnose,
    /// Stability functionals between two solutions.
    Compare,
    /// Convergence of mollified data as the depth ε shrinks.
    MollifyStudy,
    /// Frequencies of small traveling modes against `√k`.
    Dispersion,
    /// Half-plane fields on a depth grid.
    Fields,
}

impl Command {
    fn mode(self) -> Mode {
        match self {
            Command::Simulate => Mode::Simulate,
            Command::Diagnose => Mode::Diagnose,
            Command::Compare => Mode::Compare,
            Command::MollifyStudy => Mode::MollifyStudy,
            Command::Dispersion => Mode::Dispersion,
            Command::Fields => Mode::Fields,
        }
    }
}

#[derive(Serialize)]
struct BlowupRecord<'a> {
    mode: Mode,
    message: String,
    t: Option<f64>,
    last: Option<&'a EnergyReport>,
}

fn write_blowup(out: &Path, mode: Mode, err: &Error, last: Option<&EnergyReport>) -> anyhow::Result<()> {
    let t = match err {
        Error::BlowupDetected { t, .. } | Error::MarkerCrossing(t) => Some(*t),
        _ => None,
    };
    let rec = BlowupRecord { mode, message: err.to_string(), t, last };
    output::write_json(&out.join("blowup.json"), &rec)?;
    eprintln!("blow-up: {err}");
    Ok(())
}

/// Runs one subcommand and returns the process exit status.
pub fn run(cli: &Cli) -> anyhow::Result<i32> {
    let path = cli.config.as_ref().context("--config is required")?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg = cfg.with_seed(seed);
    }
    let mode = cli.command.mode();
    if let Some(m) = cfg.mode {
        if m != mode {
            bail!("config mode {m:?} does not match subcommand {mode:?}");
        }
    }
    if let Some(n) = cli.threads {
        // A second call in the same process keeps the existing pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    let out = cli.out.as_path();
    match cli.command {
        Command::Simulate => simulate_cmd(&cfg, out),
        Command::Diagnose => diagnose_cmd(&cfg, out),
        Command::Compare => compare_cmd(&cfg, out),
        Command::MollifyStudy => mollify_cmd(&cfg, out),
        Command::Dispersion => dispersion_cmd(&cfg, out),
        Command::Fields => fields_cmd(&cfg, out),
    }
}

fn reports_of(traj: &Trajectory) -> Vec<EnergyReport> {
    if traj.reports.len() == traj.snapshots.len() {
        return traj.reports.clone();
    }
    traj.snapshots.iter().zip(&traj.defects).map(|(s, d)| energy_report(s, *d)).collect()
}

fn simulate_cmd(cfg: &RunConfig, out: &Path) -> anyhow::Result<i32> {
    let s0 = generate_initial(&cfg.initial_data, cfg.solver.n)?;
    let (traj, err) = simulate_partial(&cfg.solver, &s0)?;
    let reports = reports_of(&traj);
    output::write_energy_csv(&out.join(&cfg.outputs.energy_csv), &reports)?;
    let every = cfg.outputs.checkpoint_every;
    if every > 0 {
        for (i, s) in traj.snapshots.iter().enumerate().filter(|(i, _)| i % every == 0) {
            checkpoint::save(&out.join(format!("snapshot_{i:05}.crwv")), s)?;
        }
    }
    if !cfg.outputs.checkpoint.is_empty() {
        let last = traj.snapshots.last().expect("initial snapshot");
        checkpoint::save(&out.join(&cfg.outputs.checkpoint), last)?;
    }
    if let Some(e) = err {
        write_blowup(out, Mode::Simulate, &e, reports.last())?;
        return Ok(EXIT_BLOWUP);
    }
    Ok(0)
}

#[derive(Serialize)]
struct Diagnosis {
    energy: EnergyReport,
    /// `‖A₁(commutator) − A₁(double integral)‖_∞`
    a1_formula_gap: f64,
    /// `‖b_α′ − ∂b‖_∞`
    b_alpha_gap: f64,
    /// `‖1/Z,α′ − i(Z̄ₜₜ − i)/A₁‖_∞` with Z̄ₜₜ from the closed formula.
    aa1_residual: f64,
    min_abs_inv_za: f64,
    max_a1: f64,
}

fn load_or_generate(cfg: &RunConfig, ckpt: Option<&PathBuf>) -> anyhow::Result<WaterWaveState> {
    Ok(match ckpt {
        Some(p) => checkpoint::load(p)?,
        None => generate_initial(&cfg.initial_data, cfg.solver.n)?,
    })
}

pub fn diagnose_state(s: &WaterWaveState) -> (EnergyReport, f64, f64, f64) {
    let energy = energy_report(s, constraint_defects(s));
    let a1c = compute_a1(s, A1Method::Commutator);
    let a1q = compute_a1(s, A1Method::Quadrature);
    let gap = (&a1c - &a1q).linf();
    let b_gap = (&compute_b_alpha(s) - &compute_b(s).derivative()).linf();
    let d = DerivedQuantities::compute(s);
    (energy, gap, b_gap, aa1_residual(s, &d.ztt_bar, &d.a1))
}

fn diagnose_cmd(cfg: &RunConfig, out: &Path) -> anyhow::Result<i32> {
    let dc = cfg.diagnose.clone().unwrap_or_default();
    let DiagnoseConfig { checkpoint } = dc;
    let s = load_or_generate(cfg, checkpoint.as_ref())?;
    let (energy, a1_formula_gap, b_alpha_gap, aa1) = diagnose_state(&s);
    let max_a1 = compute_a1(&s, A1Method::Commutator).values().iter().map(|v| v.re).fold(f64::MIN, f64::max);
    output::write_energy_csv(&out.join(&cfg.outputs.energy_csv), &[energy])?;
    let d = Diagnosis { energy, a1_formula_gap, b_alpha_gap, aa1_residual: aa1, min_abs_inv_za: s.inv_za.min_abs(), max_a1 };
    output::write_json(&out.join("diagnose.json"), &d)?;
    Ok(0)
}

#[derive(Serialize)]
struct CompareSummary {
    m: f64,
    m_search: f64,
    lhs_sup: crate::stability::LhsNorms,
    lhs_total: f64,
    rhs: crate::stability::RhsNorms,
    rhs_total: f64,
    ratio: f64,
}

fn compare_cmd(cfg: &RunConfig, out: &Path) -> anyhow::Result<i32> {
    let cc = cfg.compare.clone().context("compare mode needs a [compare] section")?;
    let (a, b) = match (&cc.a, &cc.b) {
        (Some(pa), Some(pb)) => (checkpoint::load(pa)?, checkpoint::load(pb)?),
        (None, None) => {
            let a = generate_initial(&cfg.initial_data, cfg.solver.n)?;
            let mut b = a.clone();
            b.zt_bar = a.zt_bar.scale(C64::from_polar(1.0, cc.eta));
            (a, b)
        }
        _ => bail!("[compare] needs both a and b checkpoints, or neither"),
    };
    let mut solver = cfg.solver.clone();
    solver.n = a.n();
    let runs: Vec<_> = [a, b].par_iter().map(|s| simulate_partial(&solver, s)).collect::<Result<_, _>>()?;
    let mut it = runs.into_iter();
    let (ta, ea) = it.next().expect("two runs");
    let (tb, eb) = it.next().expect("two runs");
    if let Some(e) = ea.or(eb) {
        write_blowup(out, Mode::Compare, &e, None)?;
        return Ok(EXIT_BLOWUP);
    }
    let pair = match SolutionPair::new(ta, tb) {
        Ok(p) => p,
        Err(e @ Error::MarkerCrossing(_)) => {
            write_blowup(out, Mode::Compare, &e, None)?;
            return Ok(EXIT_BLOWUP);
        }
        Err(e) => return Err(e.into()),
    };
    let series = stability_report(&pair, cc.m);
    output::write_comparison_csv(&out.join("comparison.csv"), &series)?;
    let summary = CompareSummary {
        m: cc.m,
        m_search: search_m(&series.rows),
        lhs_sup: series.lhs_sup,
        lhs_total: series.lhs_total,
        rhs: series.rhs,
        rhs_total: series.rhs_total,
        ratio: series.ratio,
    };
    output::write_json(&out.join("comparison.json"), &summary)?;
    Ok(0)
}

fn mollify_cmd(cfg: &RunConfig, out: &Path) -> anyhow::Result<i32> {
    let mc = cfg.mollify.clone().context("mollify-study mode needs a [mollify] section")?;
    let s0 = generate_initial(&cfg.initial_data, cfg.solver.n)?;
    let report = convergence_study(&s0, &mc.eps, &cfg.solver, mc.m)?;
    output::write_study(&out.join("study.csv"), &out.join("study.json"), &report)?;
    if !report.failures.is_empty() {
        for f in &report.failures {
            eprintln!("blow-up at eps = {}: {}", f.eps, f.reason);
        }
        return Ok(EXIT_BLOWUP);
    }
    Ok(0)
}

fn dispersion_cmd(cfg: &RunConfig, out: &Path) -> anyhow::Result<i32> {
    let dc = cfg.dispersion.clone().context("dispersion mode needs a [dispersion] section")?;
    let sv = &cfg.solver;
    let rows = dc
        .modes
        .par_iter()
        .map(|&k| dispersion_check(k, dc.amplitude, sv.n, sv.dt, sv.t_end))
        .collect::<Result<Vec<_>, _>>();
    match rows {
        Ok(rows) => {
            output::write_dispersion_csv(&out.join("dispersion.csv"), &rows)?;
            Ok(0)
        }
        Err(e @ Error::BlowupDetected { .. }) => {
            write_blowup(out, Mode::Dispersion, &e, None)?;
            Ok(EXIT_BLOWUP)
        }
        Err(e) => Err(e.into()),
    }
}

fn fields_cmd(cfg: &RunConfig, out: &Path) -> anyhow::Result<i32> {
    let fc = cfg.fields.clone().context("fields mode needs a [fields] section")?;
    let s = load_or_generate(cfg, fc.checkpoint.as_ref())?;
    let depths = fc.depth_grid();
    if depths.iter().any(|y| !(*y <= 0.0)) {
        bail!("field depths must satisfy y' <= 0");
    }
    output::write_fields_csv(&out.join("fields.csv"), &field_rows(&s, &depths))?;
    Ok(0)
}
