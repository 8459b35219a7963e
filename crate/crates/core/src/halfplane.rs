//! Fields in the lower half-plane `y′ < 0` from their boundary traces: U, Ψ, the pressure 𝔓,
//! and the residual of the Euler system.

use crate::energy::interface_z;
use crate::evolution::rhs;
use crate::spectral::{Field, C64, I};
use crate::state::WaterWaveState;

/// Harmonic extension of `f` at each depth, sampled on the x′ grid. Multiplier `e^{y′|k|}`.
pub fn extend(f: &Field, depths: &[f64]) -> Vec<Vec<C64>> {
    depths.iter().map(|&y| f.poisson_smooth(-y).into_values()).collect()
}

/// `|Z̄ₜ|²` as samples; its interpolant reproduces `|U|²` on the boundary exactly.
fn speed_sq(s: &WaterWaveState) -> Field {
    s.zt_bar.map(|v| C64::from(v.norm_sqr()))
}

fn z_field(s: &WaterWaveState) -> Field {
    match &s.z {
        Some(z) => z.clone(),
        None => interface_z(s),
    }
}

/// Spectral data needed for point evaluation of the half-plane fields.
pub struct HalfPlane {
    u: Vec<C64>,
    u_z: Vec<C64>,
    g: Vec<C64>,
    g_hol_z: Vec<C64>,
    z: Vec<C64>,
    z_z: Vec<C64>,
    u_t: Vec<C64>,
    psi_t: Vec<C64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointFields {
    pub u: C64,
    pub u_z: C64,
    pub psi: C64,
    pub psi_z: C64,
    pub pressure: f64,
    pub residual: f64,
}

fn ev(c: &[C64], x: f64, y: f64) -> C64 {
    crate::spectral::eval_series(c, x, |k| (y * k.abs() as f64).exp())
}

impl HalfPlane {
    pub fn new(s: &WaterWaveState) -> Self {
        let g = speed_sq(s);
        let z = z_field(s);
        let tend = rhs(&WaterWaveState { z: Some(z.clone()), ..s.clone() });
        let g_hol_z = g.derivative().filter_modes(|k| k < 0).0;
        HalfPlane {
            u: s.zt_bar.coeffs(),
            u_z: s.zt_bar.derivative().coeffs(),
            g: g.coeffs(),
            g_hol_z: g_hol_z.coeffs(),
            z: z.coeffs(),
            z_z: z.derivative().coeffs(),
            u_t: tend.zt_bar.coeffs(),
            psi_t: tend.z.expect("z tracked").coeffs(),
        }
    }

    /// `𝔓 = −½|U|² − y′ + ½K_{y′}∗|Z̄ₜ|²`.
    pub fn pressure_at(&self, x: f64, y: f64) -> f64 {
        -0.5 * ev(&self.u, x, y).norm_sqr() - y + 0.5 * ev(&self.g, x, y).re
    }

    pub fn at(&self, x: f64, y: f64) -> PointFields {
        let u = ev(&self.u, x, y);
        let u_z = ev(&self.u_z, x, y);
        let psi = C64::new(x, y) + ev(&self.z, x, y);
        let psi_z = 1.0 + ev(&self.z_z, x, y);
        let u_t = ev(&self.u_t, x, y);
        let psi_t = ev(&self.psi_t, x, y);
        // 2∂_{z′}𝔓 = −U_{z′}Ū + i + ∂_{z′}(K∗|Z̄ₜ|²)
        let two_dp = -u_z * u.conj() + I + ev(&self.g_hol_z, x, y);
        let res = psi_z * u_t - psi_t * u_z + u.conj() * u_z - I * psi_z + two_dp;
        PointFields { u, u_z, psi, psi_z, pressure: self.pressure_at(x, y), residual: res.norm() }
    }

    /// Five-point Laplacian of 𝔓 at `(x, y)` plus `2|U_{z′}|²`.
    pub fn laplacian_residual(&self, x: f64, y: f64, h: f64) -> f64 {
        let p = |dx: f64, dy: f64| self.pressure_at(x + dx, y + dy);
        let lap = (p(h, 0.0) + p(-h, 0.0) + p(0.0, h) + p(0.0, -h) - 4.0 * p(0.0, 0.0)) / (h * h);
        lap + 2.0 * ev(&self.u_z, x, y).norm_sqr()
    }
}

fn grid_rows<T>(s: &WaterWaveState, depths: &[f64], f: impl Fn(&HalfPlane, f64, f64) -> T) -> Vec<Vec<T>> {
    let hp = HalfPlane::new(s);
    let xs = s.zt_bar.grid().alphas();
    depths.iter().map(|&y| xs.iter().map(|&x| f(&hp, x, y)).collect()).collect()
}

/// 𝔓 on the x′ grid at each depth; the `y′ = 0` row vanishes.
pub fn pressure(s: &WaterWaveState, depths: &[f64]) -> Vec<Vec<f64>> {
    grid_rows(s, depths, |hp, x, y| hp.pressure_at(x, y))
}

/// `|Ψ_{z′}Uₜ − ΨₜU_{z′} + ŪU_{z′} − iΨ_{z′} + 2∂_{z′}𝔓|` on the x′ grid at each depth.
pub fn euler_residual(s: &WaterWaveState, depths: &[f64]) -> Vec<Vec<f64>> {
    grid_rows(s, depths, |hp, x, y| hp.at(x, y).residual)
}

/// `(Ψ(z′), conj U(z′))` pairs, the physical position and velocity of each parameter point.
pub fn parametric_physical_field(s: &WaterWaveState, depths: &[f64]) -> Vec<Vec<(C64, C64)>> {
    grid_rows(s, depths, |hp, x, y| {
        let p = hp.at(x, y);
        (p.psi, p.u.conj())
    })
}

/// Full pointwise record for field dumps.
pub fn field_rows(s: &WaterWaveState, depths: &[f64]) -> Vec<Vec<(f64, f64, PointFields)>> {
    grid_rows(s, depths, |hp, x, y| (x, y, hp.at(x, y)))
}
