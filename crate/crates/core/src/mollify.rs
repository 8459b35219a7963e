//! Mollified data `Z^ε` and the ε-convergence study.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{simulate_partial, SolverConfig, Trajectory};
use crate::spectral::C64;
use crate::stability::{stability_report, LhsNorms, SolutionPair};
use crate::state::WaterWaveState;

/// Samples the holomorphic extensions at depth `eps`: multiplier `e^{-ε|k|}` on Z̄ₜ, `1/Z,α′ − 1`
/// and `Z − α′`. Sectors are preserved, so a holomorphic state stays holomorphic.
pub fn mollify_data(s: &WaterWaveState, eps: f64) -> Result<WaterWaveState> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::BadParam(format!("mollification depth must be >= 0, got {eps}")));
    }
    if eps == 0.0 {
        return Ok(s.clone());
    }
    let one = C64::from(1.0);
    Ok(WaterWaveState {
        zt_bar: s.zt_bar.poisson_smooth(eps),
        inv_za: s.inv_za.add_const(-one).poisson_smooth(eps).add_const(one),
        z: s.z.as_ref().map(|z| z.poisson_smooth(eps)),
        t: s.t,
    })
}

/// One difference measurement between two runs of the study.
#[derive(Clone, Debug, Serialize)]
pub struct StudyRow {
    /// `"consecutive"` for neighbouring ε, `"reference"` against the unmollified run.
    pub kind: &'static str,
    pub eps_a: f64,
    pub eps_b: f64,
    pub lhs: LhsNorms,
    pub lhs_total: f64,
    pub rhs_total: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StudyFailure {
    pub eps: f64,
    pub t: f64,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct StudyReport {
    pub eps: Vec<f64>,
    pub m: f64,
    /// Number of common snapshots every comparison was taken over.
    pub snapshots: usize,
    pub rows: Vec<StudyRow>,
    /// Every LHS norm of consecutive-ε differences shrinks as ε shrinks.
    pub monotone: bool,
    /// Slope of `log(sup LHS total)` against `log ε` for differences from the ε = 0 run.
    pub rate_reference: Option<f64>,
    /// The same slope per norm, in [`LhsNorms::NAMES`] order.
    pub rate_reference_per_norm: Vec<Option<f64>>,
    /// Slope of the consecutive-difference totals against the larger ε of each pair.
    pub rate_consecutive: Option<f64>,
    /// The finest ε run is closer to the reference than the coarsest in every norm.
    pub finest_closer: bool,
    pub failures: Vec<StudyFailure>,
}

/// Least-squares slope of `log y` against `log x`; `None` if any `y` is not positive or fewer
/// than two points are given.
pub fn fit_rate(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || x.len() != y.len() || y.iter().any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    Some(num / den)
}

fn truncate(t: &Trajectory, len: usize) -> Trajectory {
    let mut t = t.clone();
    t.snapshots.truncate(len);
    t.reports.truncate(len);
    t.defects.truncate(len);
    t
}

fn row(kind: &'static str, a: (f64, &Trajectory), b: (f64, &Trajectory), len: usize, m: f64) -> Result<StudyRow> {
    let pair = SolutionPair::new(truncate(a.1, len), truncate(b.1, len))?;
    let s = stability_report(&pair, m);
    Ok(StudyRow { kind, eps_a: a.0, eps_b: b.0, lhs: s.lhs_sup, lhs_total: s.lhs_total, rhs_total: s.rhs_total, ratio: s.ratio })
}

fn shrinks(a: f64, b: f64) -> bool {
    b < a || (a == 0.0 && b == 0.0)
}

/// Runs the solver on the mollified data for each ε and on the unmollified data, then measures
/// the stability-norm differences between consecutive ε and against the unmollified run.
/// Runs that blow up are recorded in `failures` and the comparisons use the common prefix.
pub fn convergence_study(initial: &WaterWaveState, eps_list: &[f64], config: &SolverConfig, m: f64) -> Result<StudyReport> {
    if eps_list.is_empty() || eps_list.iter().any(|e| !(*e > 0.0)) || eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::BadParam(format!("eps list must be positive and strictly decreasing: {eps_list:?}")));
    }
    let mut all: Vec<f64> = eps_list.to_vec();
    all.push(0.0);
    let runs: Vec<(Trajectory, Option<Error>)> = all
        .par_iter()
        .map(|&e| simulate_partial(config, &mollify_data(initial, e)?))
        .collect::<Result<_>>()?;

    let mut failures = Vec::new();
    for (e, (_, err)) in all.iter().zip(&runs) {
        if let Some(err) = err {
            let t = match err {
                Error::BlowupDetected { t, .. } | Error::MarkerCrossing(t) => *t,
                _ => f64::NAN,
            };
            failures.push(StudyFailure { eps: *e, t, reason: err.to_string() });
        }
    }
    let len = runs.iter().map(|(t, _)| t.snapshots.len()).min().unwrap_or(0);

    let reference = (0.0, &runs[eps_list.len()].0);
    let jobs: Vec<(&'static str, usize, usize)> = (0..eps_list.len().saturating_sub(1))
        .map(|i| ("consecutive", i, i + 1))
        .chain((0..eps_list.len()).map(|i| ("reference", i, eps_list.len())))
        .collect();
    let rows: Vec<StudyRow> = jobs
        .par_iter()
        .map(|&(kind, i, j)| {
            let b = if j == eps_list.len() { reference } else { (all[j], &runs[j].0) };
            row(kind, (all[i], &runs[i].0), b, len, m)
        })
        .collect::<Result<_>>()?;

    let consecutive: Vec<&StudyRow> = rows.iter().filter(|r| r.kind == "consecutive").collect();
    let refs: Vec<&StudyRow> = rows.iter().filter(|r| r.kind == "reference").collect();
    let monotone = consecutive.windows(2).all(|w| {
        w[0].lhs.as_array().iter().zip(w[1].lhs.as_array()).all(|(a, b)| shrinks(*a, b))
    });
    let rate_reference = fit_rate(eps_list, &refs.iter().map(|r| r.lhs_total).collect::<Vec<_>>());
    let rate_reference_per_norm = (0..7)
        .map(|k| fit_rate(eps_list, &refs.iter().map(|r| r.lhs.as_array()[k]).collect::<Vec<_>>()))
        .collect();
    let rate_consecutive = fit_rate(
        &consecutive.iter().map(|r| r.eps_a).collect::<Vec<_>>(),
        &consecutive.iter().map(|r| r.lhs_total).collect::<Vec<_>>(),
    );
    let finest_closer = match (refs.first(), refs.last()) {
        (Some(c), Some(f)) if refs.len() > 1 => {
            c.lhs.as_array().iter().zip(f.lhs.as_array()).all(|(a, b)| shrinks(*a, b))
        }
        _ => true,
    };
    Ok(StudyReport {
        eps: eps_list.to_vec(),
        m,
        snapshots: len,
        rows,
        monotone,
        rate_reference,
        rate_reference_per_norm,
        rate_consecutive,
        finest_closer,
        failures,
    })
}
