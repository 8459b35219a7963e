//! Method-of-lines RK4 for the closed system in `(Z̄ₜ, 1/Z,α′, Z − α′)`, constraint
//! projection, Lagrangian markers and trajectory production.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::energy::{blowup_monitor, energy_report, BlowupThresholds, EnergyReport, MonitorStatus};
use crate::error::{Error, Result};
use crate::spectral::{Field, C64};
use crate::state::{compute_a1, compute_b, compute_b_alpha, compute_dzt, A1Method, WaterWaveState};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_true")]
    pub projection_enforce: bool,
    /// Amplitude floor for the Krasny filter; `None` disables it.
    #[serde(default)]
    pub krasny_threshold: Option<f64>,
    /// Keep every `snapshot_every`-th step.
    #[serde(default = "default_one")]
    pub snapshot_every: usize,
    /// Compute an energy report for each snapshot and stop on blow-up.
    #[serde(default = "default_true")]
    pub diagnostics: bool,
    #[serde(default)]
    pub blowup: BlowupThresholds,
}

fn default_true() -> bool {
    true
}

fn default_one() -> usize {
    1
}

impl SolverConfig {
    pub fn new(n: usize, dt: f64, t_end: f64) -> Self {
        SolverConfig {
            n,
            dt,
            t_end,
            projection_enforce: true,
            krasny_threshold: None,
            snapshot_every: 1,
            diagnostics: true,
            blowup: BlowupThresholds::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !(self.t_end >= 0.0) || !self.dt.is_finite() || !self.t_end.is_finite() {
            return Err(Error::BadParam(format!("need dt > 0 and t_end >= 0, got dt={} t_end={}", self.dt, self.t_end)));
        }
        if self.snapshot_every == 0 {
            return Err(Error::BadParam("snapshot_every must be >= 1".into()));
        }
        crate::spectral::grid(self.n)?;
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(0.0) as usize
    }

    /// Largest step satisfying `dt <= 0.5/√k_max` for the grid's highest mode.
    pub fn dt_guideline(n: usize) -> f64 {
        0.5 / ((n / 2) as f64).sqrt()
    }
}

/// Time derivatives of the evolved fields.
#[derive(Clone, Debug)]
pub struct Tendency {
    pub zt_bar: Field,
    pub inv_za: Field,
    pub z: Option<Field>,
}

struct RhsOut {
    tend: Tendency,
    b: Field,
    b_alpha: Field,
}

fn rhs_full(s: &WaterWaveState) -> RhsOut {
    let b = compute_b(s);
    let b_alpha = compute_b_alpha(s);
    let a1 = compute_a1(s, A1Method::Commutator);
    let dzt = compute_dzt(s);
    let ztt_bar = a1.mul(&s.inv_za).scale(-crate::spectral::I).add_const(crate::spectral::I);
    let zt_bar = &ztt_bar - &b.mul(&s.zt_bar.derivative());
    let inv_za = &s.inv_za.mul(&(&b_alpha - &dzt)) - &b.mul(&s.inv_za.derivative());
    let z = s.z.as_ref().map(|z| &s.zt() - &b.mul(&z.derivative().add_const(C64::from(1.0))));
    RhsOut { tend: Tendency { zt_bar, inv_za, z }, b, b_alpha }
}

/// `∂ₜ(1/Z,α′) = (1/Z,α′)(b_α′ − D Zₜ) − b∂(1/Z,α′)`, `∂ₜZ̄ₜ = Z̄ₜₜ − b∂Z̄ₜ`,
/// `∂ₜ(Z − α′) = Zₜ − b(1 + ∂(Z − α′))`.
pub fn rhs(s: &WaterWaveState) -> Tendency {
    rhs_full(s).tend
}

fn axpy(s: &WaterWaveState, k: &Tendency, c: f64) -> WaterWaveState {
    WaterWaveState {
        zt_bar: &s.zt_bar + &(&k.zt_bar * c),
        inv_za: &s.inv_za + &(&k.inv_za * c),
        z: match (&s.z, &k.z) {
            (Some(z), Some(dz)) => Some(z + &(dz * c)),
            _ => None,
        },
        t: s.t,
    }
}

fn combine(a: &Field, k: [&Field; 4], dt: f64) -> Field {
    let sum = &(&(k[0] + k[3]) + &(k[1] * 2.0)) + &(k[2] * 2.0);
    a + &(&sum * (dt / 6.0))
}

/// Marker positions `h` and log-Jacobians `log h_α` carried along with the state.
#[derive(Clone, Debug, PartialEq)]
pub struct Markers {
    pub h: Vec<f64>,
    pub log_jac: Vec<f64>,
}

impl Markers {
    pub fn new(positions: &[f64]) -> Self {
        Markers { h: positions.to_vec(), log_jac: vec![0.0; positions.len()] }
    }
}

fn marker_velocity(b: &Field, b_alpha: &Field, h: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let v = b.eval_many(h).iter().map(|c| c.re).collect();
    let j = b_alpha.eval_many(h).iter().map(|c| c.re).collect();
    (v, j)
}

fn shifted(x: &[f64], v: &[f64], c: f64) -> Vec<f64> {
    x.iter().zip(v).map(|(x, v)| x + c * v).collect()
}

/// RK4 update of markers, `hₜ = b(h)` and `(log h_α)ₜ = b_α′(h)`, given the four stage
/// velocity fields `(b, b_α′)` of one step.
pub fn advance_markers(m: &Markers, dt: f64, stage_fields: &[(Field, Field); 4]) -> Markers {
    let (v1, j1) = marker_velocity(&stage_fields[0].0, &stage_fields[0].1, &m.h);
    let h2 = shifted(&m.h, &v1, 0.5 * dt);
    let (v2, j2) = marker_velocity(&stage_fields[1].0, &stage_fields[1].1, &h2);
    let h3 = shifted(&m.h, &v2, 0.5 * dt);
    let (v3, j3) = marker_velocity(&stage_fields[2].0, &stage_fields[2].1, &h3);
    let h4 = shifted(&m.h, &v3, dt);
    let (v4, j4) = marker_velocity(&stage_fields[3].0, &stage_fields[3].1, &h4);
    let rk = |x: &[f64], a: &[f64], b: &[f64], c: &[f64], d: &[f64]| -> Vec<f64> {
        (0..x.len()).map(|i| x[i] + dt / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i])).collect()
    };
    Markers { h: rk(&m.h, &v1, &v2, &v3, &v4), log_jac: rk(&m.log_jac, &j1, &j2, &j3, &j4) }
}

fn rk4_inner(s: &WaterWaveState, dt: f64, markers: Option<&Markers>) -> (WaterWaveState, Option<Markers>) {
    let r1 = rhs_full(s);
    let r2 = rhs_full(&axpy(s, &r1.tend, 0.5 * dt));
    let r3 = rhs_full(&axpy(s, &r2.tend, 0.5 * dt));
    let r4 = rhs_full(&axpy(s, &r3.tend, dt));
    let zt_bar = combine(&s.zt_bar, [&r1.tend.zt_bar, &r2.tend.zt_bar, &r3.tend.zt_bar, &r4.tend.zt_bar], dt);
    let inv_za = combine(&s.inv_za, [&r1.tend.inv_za, &r2.tend.inv_za, &r3.tend.inv_za, &r4.tend.inv_za], dt);
    let z = match (&s.z, &r1.tend.z, &r2.tend.z, &r3.tend.z, &r4.tend.z) {
        (Some(z), Some(a), Some(b), Some(c), Some(d)) => Some(combine(z, [a, b, c, d], dt)),
        _ => None,
    };
    let m = markers.map(|m| {
        let stages = [(r1.b, r1.b_alpha), (r2.b, r2.b_alpha), (r3.b, r3.b_alpha), (r4.b, r4.b_alpha)];
        advance_markers(m, dt, &stages)
    });
    (WaterWaveState { zt_bar, inv_za, z, t: s.t + dt }, m)
}

/// One classical RK4 step without filtering or projection. Negative `dt` integrates backwards.
pub fn rk4(s: &WaterWaveState, dt: f64) -> WaterWaveState {
    rk4_inner(s, dt, None).0
}

/// L² norms of the parts removed by [`enforce_constraints`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstraintDefects {
    pub zt: f64,
    pub za: f64,
}

/// Projects Z̄ₜ onto holomorphic mean-zero fields (`k < 0`), `1/Z,α′ − 1` likewise, and drops
/// the `k > 0` modes of the tracked interface.
pub fn enforce_constraints(s: &WaterWaveState) -> (WaterWaveState, ConstraintDefects) {
    let (zt_bar, dzt) = s.zt_bar.filter_modes(|k| k < 0);
    let (w, dza) = s.inv_za.add_const(C64::from(-1.0)).filter_modes(|k| k < 0);
    let z = s.z.as_ref().map(|z| z.filter_modes(|k| k <= 0).0);
    let out = WaterWaveState { zt_bar, inv_za: w.add_const(C64::from(1.0)), z, t: s.t };
    (out, ConstraintDefects { zt: dzt, za: dza })
}

/// Defects the projection would remove, without modifying the state.
pub fn constraint_defects(s: &WaterWaveState) -> ConstraintDefects {
    enforce_constraints(s).1
}

fn post_process(s: WaterWaveState, cfg: &SolverConfig) -> (WaterWaveState, ConstraintDefects) {
    let s = match cfg.krasny_threshold {
        Some(th) => WaterWaveState {
            zt_bar: s.zt_bar.krasny(th),
            inv_za: s.inv_za.add_const(C64::from(-1.0)).krasny(th).add_const(C64::from(1.0)),
            z: s.z.as_ref().map(|z| z.krasny(th)),
            t: s.t,
        },
        None => s,
    };
    if cfg.projection_enforce {
        enforce_constraints(&s)
    } else {
        let d = constraint_defects(&s);
        (s, d)
    }
}

/// RK4 step followed by the configured filter and projection. Fails with `BlowupDetected`
/// if the new state contains non-finite values.
pub fn step_rk4(s: &WaterWaveState, dt: f64, cfg: &SolverConfig) -> Result<(WaterWaveState, ConstraintDefects)> {
    let (next, d) = post_process(rk4(s, dt), cfg);
    check_finite(&next)?;
    Ok((next, d))
}

fn check_finite(s: &WaterWaveState) -> Result<()> {
    let ok = s.zt_bar.is_finite() && s.inv_za.is_finite() && s.z.as_ref().map_or(true, |z| z.is_finite());
    if ok {
        Ok(())
    } else {
        Err(Error::BlowupDetected { reason: "non-finite state".into(), t: s.t })
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub snapshots: Vec<WaterWaveState>,
    /// Integration step.
    pub dt: f64,
    /// Steps between consecutive snapshots.
    pub stride: usize,
    pub config: SolverConfig,
    /// One report per snapshot when diagnostics are on.
    pub reports: Vec<EnergyReport>,
    /// Largest per-step defect seen since the previous snapshot.
    pub defects: Vec<ConstraintDefects>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn snapshot_dt(&self) -> f64 {
        self.dt * self.stride as f64
    }
}

fn snapshot_time(t0: f64, step: usize, dt: f64) -> f64 {
    t0 + step as f64 * dt
}

/// Integrates `initial` to `config.t_end`. On blow-up the partial trajectory is discarded and
/// the offending diagnostic is returned; see [`simulate_partial`] to keep it.
pub fn simulate(config: &SolverConfig, initial: &WaterWaveState) -> Result<Trajectory> {
    let (traj, err) = simulate_partial(config, initial)?;
    match err {
        Some(e) => Err(e),
        None => Ok(traj),
    }
}

/// Like [`simulate`], but returns the trajectory up to the failure together with the error.
pub fn simulate_partial(config: &SolverConfig, initial: &WaterWaveState) -> Result<(Trajectory, Option<Error>)> {
    config.validate()?;
    if initial.n() != config.n {
        return Err(Error::GridMismatch(initial.n(), config.n));
    }
    let mut traj = Trajectory {
        snapshots: vec![initial.clone()],
        dt: config.dt,
        stride: config.snapshot_every,
        config: config.clone(),
        reports: Vec::new(),
        defects: vec![constraint_defects(initial)],
    };
    if config.diagnostics {
        let rep = energy_report(initial, traj.defects[0]);
        if let MonitorStatus::Blowup(reason) = blowup_monitor(&rep, &config.blowup) {
            traj.reports.push(rep);
            return Ok((traj, Some(Error::BlowupDetected { reason, t: initial.t })));
        }
        traj.reports.push(rep);
    }
    let steps = config.steps();
    let mut s = initial.clone();
    let mut worst = ConstraintDefects::default();
    for i in 1..=steps {
        let (mut next, d) = match step_rk4(&s, config.dt, config) {
            Ok(v) => v,
            Err(e) => return Ok((traj, Some(e))),
        };
        next.t = snapshot_time(initial.t, i, config.dt);
        worst.zt = worst.zt.max(d.zt);
        worst.za = worst.za.max(d.za);
        s = next;
        if i % config.snapshot_every == 0 || i == steps {
            traj.snapshots.push(s.clone());
            traj.defects.push(worst);
            if config.diagnostics {
                let rep = energy_report(&s, worst);
                let status = blowup_monitor(&rep, &config.blowup);
                traj.reports.push(rep);
                if let MonitorStatus::Blowup(reason) = status {
                    return Ok((traj, Some(Error::BlowupDetected { reason, t: s.t })));
                }
            }
            worst = ConstraintDefects::default();
        }
    }
    Ok((traj, None))
}

/// Marker paths `h(α, t)` on the snapshot times of a trajectory.
#[derive(Clone, Debug)]
pub struct MarkerPaths {
    pub times: Vec<f64>,
    /// `h[snapshot][marker]`
    pub h: Vec<Vec<f64>>,
    /// `log h_α` per snapshot and marker.
    pub log_jac: Vec<Vec<f64>>,
    pub initial: Vec<f64>,
}

/// Integrates `hₜ = b(h, t)`, `h(α, 0) = α` along a trajectory by replaying its RK4 steps, so
/// markers see `b` at the same stage states the solver used. Positions must be increasing.
pub fn lagrangian_markers(traj: &Trajectory, positions: &[f64]) -> Result<MarkerPaths> {
    let cfg = &traj.config;
    let mut m = Markers::new(positions);
    let mut paths = MarkerPaths {
        times: vec![traj.snapshots[0].t],
        h: vec![m.h.clone()],
        log_jac: vec![m.log_jac.clone()],
        initial: positions.to_vec(),
    };
    let periodic = positions.len() > 1 && positions[positions.len() - 1] - positions[0] < 2.0 * PI;
    for w in traj.snapshots.windows(2) {
        let steps = ((w[1].t - w[0].t) / traj.dt).round() as usize;
        let mut s = w[0].clone();
        for _ in 0..steps {
            let (next, nm) = rk4_inner(&s, traj.dt, Some(&m));
            s = post_process(next, cfg).0;
            m = nm.expect("markers requested");
        }
        check_monotone(&m.h, periodic, w[1].t)?;
        paths.times.push(w[1].t);
        paths.h.push(m.h.clone());
        paths.log_jac.push(m.log_jac.clone());
    }
    Ok(paths)
}

fn check_monotone(h: &[f64], periodic: bool, t: f64) -> Result<()> {
    if h.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::MarkerCrossing(t));
    }
    if periodic && h.len() > 1 && !(h[h.len() - 1] < h[0] + 2.0 * PI) {
        return Err(Error::MarkerCrossing(t));
    }
    Ok(())
}

/// Measured angular frequency of mode `-k` of Z̄ₜ from a least-squares fit of its unwrapped phase.
pub fn measure_frequency(traj: &Trajectory, k: i64) -> f64 {
    let mut phases = Vec::with_capacity(traj.snapshots.len());
    let mut prev: Option<f64> = None;
    let mut offset = 0.0;
    for s in &traj.snapshots {
        let p = s.zt_bar.coeff(-k).arg();
        if let Some(q) = prev {
            let mut d = p - q;
            while d > PI {
                d -= 2.0 * PI;
            }
            while d < -PI {
                d += 2.0 * PI;
            }
            offset += d - (p - q);
        }
        prev = Some(p);
        phases.push(p + offset);
    }
    let ts = traj.times();
    let n = ts.len() as f64;
    let tm = ts.iter().sum::<f64>() / n;
    let pm = phases.iter().sum::<f64>() / n;
    let num: f64 = ts.iter().zip(&phases).map(|(t, p)| (t - tm) * (p - pm)).sum();
    let den: f64 = ts.iter().map(|t| (t - tm).powi(2)).sum();
    (num / den).abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DispersionResult {
    pub k: i64,
    pub omega: f64,
    pub rel_err: f64,
}

/// Runs a small-amplitude traveling mode and compares its frequency with `√k`.
pub fn dispersion_check(k: i64, amplitude: f64, n: usize, dt: f64, t_end: f64) -> Result<DispersionResult> {
    let s0 = crate::initial::linear_mode(n, k, amplitude)?;
    let mut cfg = SolverConfig::new(n, dt, t_end);
    cfg.diagnostics = false;
    cfg.snapshot_every = ((0.05 / dt).round() as usize).max(1);
    let traj = simulate(&cfg, &s0)?;
    let omega = measure_frequency(&traj, k);
    let exact = (k as f64).sqrt();
    Ok(DispersionResult { k, omega, rel_err: (omega - exact).abs() / exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid;

    fn rest(n: usize) -> WaterWaveState {
        let g = grid(n).unwrap();
        WaterWaveState {
            zt_bar: Field::zeros(g.clone()),
            inv_za: Field::constant(g.clone(), C64::from(1.0)),
            z: Some(Field::zeros(g)),
            t: 0.0,
        }
    }

    #[test]
    fn rest_is_equilibrium() {
        let s = rest(32);
        let r = rhs(&s);
        assert!(r.zt_bar.linf() == 0.0 && r.inv_za.linf() == 0.0 && r.z.unwrap().linf() == 0.0);
        let cfg = SolverConfig::new(32, 0.01, 0.1);
        let (next, _) = step_rk4(&s, 0.01, &cfg).unwrap();
        assert!((&next.zt_bar - &s.zt_bar).linf() < 1e-15);
        assert!((&next.inv_za - &s.inv_za).linf() < 1e-15);
    }

    #[test]
    fn projection_removes_noise() {
        let mut s = rest(32);
        s.zt_bar = Field::from_modes(s.zt_bar.grid().clone(), &[(-1, C64::from(0.1)), (1, C64::from(1e-8))]);
        let (clean, d) = enforce_constraints(&s);
        assert!((d.zt - 1e-8 * (2.0 * PI).sqrt()).abs() < 1e-15);
        assert!(clean.zt_bar.coeff(1).norm() < 1e-16);
        let (again, d2) = enforce_constraints(&clean);
        assert!((&again.zt_bar - &clean.zt_bar).linf() < 1e-14);
        assert!(d2.zt < 1e-14);
    }

    #[test]
    fn constant_velocity_markers() {
        let g = grid(16).unwrap();
        let c = 0.3;
        let b = Field::constant(g.clone(), C64::from(c));
        let z = Field::zeros(g.clone());
        let stages = [(b.clone(), z.clone()), (b.clone(), z.clone()), (b.clone(), z.clone()), (b, z)];
        let m = Markers::new(&g.alphas());
        let next = advance_markers(&m, 0.1, &stages);
        for (a, h) in g.alphas().iter().zip(&next.h) {
            assert!((h - a - c * 0.1).abs() < 1e-14);
        }
    }

    #[test]
    fn rest_markers_stay_put() {
        let s = rest(16);
        let traj = simulate(&SolverConfig::new(16, 0.05, 0.2), &s).unwrap();
        let g = grid(16).unwrap();
        let p = lagrangian_markers(&traj, &g.alphas()).unwrap();
        for row in &p.h {
            for (a, h) in g.alphas().iter().zip(row) {
                assert!((a - h).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn bad_config_rejected() {
        assert!(SolverConfig::new(32, 0.0, 1.0).validate().is_err());
        assert!(SolverConfig::new(32, 0.1, -1.0).validate().is_err());
        assert!(SolverConfig::new(30, 0.1, 1.0).validate().is_err());
    }
}
