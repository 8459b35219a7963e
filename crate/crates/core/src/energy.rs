//! Energy functionals, the Taylor margin, chord-arc constant and blow-up monitor.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::evolution::ConstraintDefects;
use crate::quadrature;
use crate::singular::d_inv;
use crate::spectral::{Field, C64};
use crate::state::{compute_a1, compute_b, compute_b_alpha, A1Method, WaterWaveState};

/// How Ḣ½ terms are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormMethod {
    Spectral,
    Quadrature,
}

fn hh(f: &Field, m: NormMethod) -> f64 {
    match m {
        NormMethod::Spectral => f.norm_hhalf_sq(),
        NormMethod::Quadrature => quadrature::hhalf_sq(f),
    }
}

/// `∫ |f|² / A₁`.
fn weighted_sq(f: &Field, a1: &Field) -> f64 {
    let h = 2.0 * PI / f.n() as f64;
    f.values().iter().zip(a1.values()).map(|(v, a)| v.norm_sqr() / a.re).sum::<f64>() * h
}

/// Fields shared by the energy formulas.
struct Pieces {
    a1: Field,
    b_alpha: Field,
    zt_a: Field,
    ztt: Field,
    d_zt: Field,
    d2_zt: Field,
    dzt_conj_side: Field,
    d2_zt_conj_side: Field,
}

impl Pieces {
    fn new(s: &WaterWaveState) -> Self {
        let a1 = compute_a1(s, A1Method::Commutator);
        let ztt = a1.mul(&s.inv_za).scale(-crate::spectral::I).add_const(crate::spectral::I);
        let d_zt = d_inv(&s.zt_bar, &s.inv_za);
        let d2_zt = d_inv(&d_zt, &s.inv_za);
        let zt = s.zt();
        let dzt_conj_side = d_inv(&zt, &s.inv_za);
        let d2_zt_conj_side = d_inv(&dzt_conj_side, &s.inv_za);
        Pieces {
            a1,
            b_alpha: compute_b_alpha(s),
            zt_a: s.zt_bar.derivative(),
            ztt,
            d_zt,
            d2_zt,
            dzt_conj_side,
            d2_zt_conj_side,
        }
    }
}

fn point_term(s: &WaterWaveState) -> f64 {
    s.inv_za.values()[0].norm_sqr()
}

/// 𝔢: eight terms, none involving a time derivative.
pub fn energy_frak_e_with(s: &WaterWaveState, m: NormMethod) -> f64 {
    let p = Pieces::new(s);
    let d2_ztt = d_inv(&d_inv(&p.ztt, &s.inv_za), &s.inv_za);
    p.ztt.derivative().l2_sq()
        + hh(&p.d_zt, m)
        + d2_ztt.l2_sq()
        + hh(&s.inv_za.mul(&p.d2_zt), m)
        + p.zt_a.l2_sq()
        + p.d2_zt.l2_sq()
        + s.inv_za.derivative().l2_sq()
        + point_term(s)
}

pub fn energy_frak_e(s: &WaterWaveState) -> f64 {
    energy_frak_e_with(s, NormMethod::Spectral)
}

/// The seven terms of ℰ in order: `‖Z̄ₜ,α′‖², ‖D²Z̄ₜ‖², ‖∂(1/Z,α′)‖², ‖D²(1/Z,α′)‖²,
/// ‖(1/Z,α′)D²Z̄ₜ‖²_{Ḣ½}, ‖DZ̄ₜ‖²_{Ḣ½}, |1/Z,α′(0)|²`.
pub fn curly_e_terms(s: &WaterWaveState, m: NormMethod) -> [f64; 7] {
    let d_zt = d_inv(&s.zt_bar, &s.inv_za);
    let d2_zt = d_inv(&d_zt, &s.inv_za);
    let d2_za = d_inv(&d_inv(&s.inv_za, &s.inv_za), &s.inv_za);
    [
        s.zt_bar.derivative().l2_sq(),
        d2_zt.l2_sq(),
        s.inv_za.derivative().l2_sq(),
        d2_za.l2_sq(),
        hh(&s.inv_za.mul(&d2_zt), m),
        hh(&d_zt, m),
        point_term(s),
    ]
}

pub fn energy_curly_e_with(s: &WaterWaveState, m: NormMethod) -> f64 {
    curly_e_terms(s, m).iter().sum()
}

pub fn energy_curly_e(s: &WaterWaveState) -> f64 {
    energy_curly_e_with(s, NormMethod::Spectral)
}

/// ℰ without the point term, evaluated on the harmonic extensions at depth `y < 0`.
/// All terms are products of holomorphic traces, so this is the trace energy of the
/// Poisson-smoothed state.
pub fn curly_e1_at_depth(s: &WaterWaveState, y: f64) -> f64 {
    let smoothed = WaterWaveState {
        zt_bar: s.zt_bar.poisson_smooth(-y),
        inv_za: s.inv_za.poisson_smooth(-y),
        z: None,
        t: s.t,
    };
    let t = curly_e_terms(&smoothed, NormMethod::Spectral);
    t[..6].iter().sum()
}

/// `E_a = ∫ |Z̄ₜₜ,α′ − (D Zₜ)Z̄ₜ,α′|²/A₁ + ‖D Z̄ₜ‖²_{Ḣ½}`.
pub fn energy_ea_with(s: &WaterWaveState, m: NormMethod) -> f64 {
    let p = Pieces::new(s);
    let sub = &p.ztt.derivative() - &p.dzt_conj_side.mul(&p.zt_a);
    weighted_sq(&sub, &p.a1) + hh(&p.d_zt, m)
}

/// `E_b` with `Z,α′(∂ₜ+b∂)((1/Z,α′)D²Z̄ₜ) = D²Z̄ₜₜ + (b_α′ − 3DZₜ)D²Z̄ₜ − (D²Zₜ)(DZ̄ₜ)`.
pub fn energy_eb_with(s: &WaterWaveState, m: NormMethod) -> f64 {
    let p = Pieces::new(s);
    let d2_ztt = d_inv(&d_inv(&p.ztt, &s.inv_za), &s.inv_za);
    let coef = &p.b_alpha - &(&p.dzt_conj_side * 3.0);
    let sub = &(&d2_ztt + &coef.mul(&p.d2_zt)) - &p.d2_zt_conj_side.mul(&p.d_zt);
    weighted_sq(&sub, &p.a1) + hh(&s.inv_za.mul(&p.d2_zt), m)
}

pub fn energy_ea(s: &WaterWaveState) -> f64 {
    energy_ea_with(s, NormMethod::Spectral)
}

pub fn energy_eb(s: &WaterWaveState) -> f64 {
    energy_eb_with(s, NormMethod::Spectral)
}

/// `𝔈 = E_a + E_b + ‖Z̄ₜ,α′‖² + ‖D²Z̄ₜ‖² + ‖∂(1/Z,α′)‖² + |1/Z,α′(0)|²`.
pub fn energy_frak_big_e(s: &WaterWaveState) -> f64 {
    let p = Pieces::new(s);
    energy_ea(s) + energy_eb(s) + p.zt_a.l2_sq() + p.d2_zt.l2_sq() + s.inv_za.derivative().l2_sq() + point_term(s)
}

/// `E_k` for `k ∈ {2, 3}`, with `(∂ₜ+b∂)∂ᵏZ̄ₜ = ∂ᵏ(Z̄ₜₜ − b∂Z̄ₜ) + b∂^{k+1}Z̄ₜ`.
pub fn energy_ek_with(s: &WaterWaveState, k: usize, m: NormMethod) -> f64 {
    assert!(k == 2 || k == 3, "E_k is defined for k = 2, 3");
    let p = Pieces::new(s);
    let b = compute_b(s);
    let mut dk = s.zt_bar.clone();
    for _ in 0..k {
        dk = dk.derivative();
    }
    let mut tend = &p.ztt - &b.mul(&p.zt_a);
    for _ in 0..k {
        tend = tend.derivative();
    }
    let material = &tend + &b.mul(&dk.derivative());
    let sub = &material + &(&p.b_alpha - &p.dzt_conj_side).mul(&dk);
    weighted_sq(&sub, &p.a1) + hh(&s.inv_za.mul(&dk), m) + dk.l2_sq()
}

pub fn energy_ek(s: &WaterWaveState, k: usize) -> f64 {
    energy_ek_with(s, k, NormMethod::Spectral)
}

/// `min A₁ − 1`.
pub fn taylor_check(s: &WaterWaveState) -> f64 {
    compute_a1(s, A1Method::Commutator).values().iter().map(|v| v.re).fold(f64::INFINITY, f64::min) - 1.0
}

/// Below this `min |1/Z,α′|` arc length switches to the polyline of the samples.
pub const POLYLINE_SWITCH: f64 = 1e-3;

/// `Z − α′` reconstructed from `1/Z,α′`, up to its mean.
pub fn interface_z(s: &WaterWaveState) -> Field {
    s.inv_za.map(|v| 1.0 / v).add_const(C64::from(-1.0)).antiderivative()
}

/// Interface samples `Z(α′_j) = α′_j + z_j`, reconstructing `z` when untracked.
pub fn interface_samples(s: &WaterWaveState) -> Vec<C64> {
    let z = match &s.z {
        Some(z) => z.clone(),
        None => interface_z(s),
    };
    let g = z.grid().clone();
    z.values().iter().enumerate().map(|(j, v)| v + g.alpha(j)).collect()
}

/// Minimum over grid pairs of chord / arc, both measured the short way around one period.
pub fn chord_arc_delta(s: &WaterWaveState) -> f64 {
    let zs = interface_samples(s);
    let n = zs.len();
    let g = s.inv_za.grid().clone();
    let two_pi = C64::from(2.0 * PI);
    let (cum, total) = if s.inv_za.min_abs() > POLYLINE_SWITCH {
        let speed = s.inv_za.map(|v| C64::from(1.0 / v.norm()));
        let mean = speed.mean().re;
        let anti = speed.add_const(C64::from(-mean)).antiderivative();
        let a0 = anti.values()[0].re;
        let cum: Vec<f64> = (0..n).map(|j| mean * g.alpha(j) + anti.values()[j].re - a0).collect();
        (cum, 2.0 * PI * mean)
    } else {
        let mut cum = vec![0.0; n];
        for j in 1..n {
            cum[j] = cum[j - 1] + (zs[j] - zs[j - 1]).norm();
        }
        (cum.clone(), cum[n - 1] + (zs[0] + two_pi - zs[n - 1]).norm())
    };
    let mut delta = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let arc = cum[j] - cum[i];
            let arc = arc.min(total - arc);
            let d = zs[j] - zs[i];
            let chord = d.norm().min((d - two_pi).norm());
            if arc > 0.0 {
                delta = delta.min(chord / arc);
            }
        }
    }
    delta
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub t: f64,
    pub frak_e: f64,
    pub curly_e: f64,
    pub ea: f64,
    pub eb: f64,
    pub e2: f64,
    pub e3: f64,
    pub taylor_min: f64,
    pub chord_arc: f64,
    pub defects: ConstraintDefects,
}

pub fn energy_report(s: &WaterWaveState, defects: ConstraintDefects) -> EnergyReport {
    EnergyReport {
        t: s.t,
        frak_e: energy_frak_e(s),
        curly_e: energy_curly_e(s),
        ea: energy_ea(s),
        eb: energy_eb(s),
        e2: energy_ek(s, 2),
        e3: energy_ek(s, 3),
        taylor_min: taylor_check(s),
        chord_arc: chord_arc_delta(s),
        defects,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupThresholds {
    pub energy_max: f64,
    pub taylor_tol: f64,
    pub defect_max: f64,
}

impl Default for BlowupThresholds {
    fn default() -> Self {
        BlowupThresholds { energy_max: 1e8, taylor_tol: 1e-8, defect_max: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonitorStatus {
    Ok,
    Blowup(String),
}

pub fn blowup_monitor(r: &EnergyReport, th: &BlowupThresholds) -> MonitorStatus {
    let energies = [r.frak_e, r.curly_e, r.ea, r.eb, r.e2, r.e3];
    if energies.iter().any(|e| !e.is_finite()) || r.curly_e > th.energy_max || r.frak_e > th.energy_max {
        return MonitorStatus::Blowup("energy".into());
    }
    if !r.taylor_min.is_finite() || r.taylor_min < -th.taylor_tol {
        return MonitorStatus::Blowup("taylor".into());
    }
    if !(r.defects.zt.max(r.defects.za) <= th.defect_max) {
        return MonitorStatus::Blowup("constraint".into());
    }
    MonitorStatus::Ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid;

    fn state(zt: &[(i64, C64)], za: &[(i64, C64)]) -> WaterWaveState {
        let g = grid(64).unwrap();
        WaterWaveState {
            zt_bar: Field::from_modes(g.clone(), zt),
            inv_za: Field::from_modes(g.clone(), za).add_const(C64::from(1.0)),
            z: None,
            t: 0.0,
        }
    }

    #[test]
    fn rest_energies() {
        let s = state(&[], &[]);
        assert!((energy_frak_e(&s) - 1.0).abs() < 1e-14);
        assert!((energy_curly_e(&s) - 1.0).abs() < 1e-14);
        assert!(energy_ek(&s, 2).abs() < 1e-14);
        assert!(energy_ek(&s, 3).abs() < 1e-14);
        assert!(taylor_check(&s).abs() < 1e-15);
        assert!((chord_arc_delta(&s) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interface_only_terms() {
        let s = state(&[], &[(-1, C64::from(0.1))]);
        let t = curly_e_terms(&s, NormMethod::Spectral);
        assert!(t[0] == 0.0 && t[1] == 0.0 && t[4] == 0.0 && t[5] == 0.0);
        assert!(t[2] > 0.0 && t[3] > 0.0 && t[6] > 0.0);
    }

    #[test]
    fn monitor_examples() {
        let s = state(&[], &[]);
        let r = energy_report(&s, ConstraintDefects::default());
        let th = BlowupThresholds::default();
        assert_eq!(blowup_monitor(&r, &th), MonitorStatus::Ok);
        let bad = EnergyReport { curly_e: f64::NAN, ..r };
        assert_eq!(blowup_monitor(&bad, &th), MonitorStatus::Blowup("energy".into()));
        let neg = EnergyReport { taylor_min: -0.5, ..r };
        assert_eq!(blowup_monitor(&neg, &th), MonitorStatus::Blowup("taylor".into()));
    }
}
