//! Initial-data generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{grid, Field, C64};
use crate::state::WaterWaveState;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    Rest,
    /// Traveling mode `Z̄ₜ = a e^{-ikα′}` with `1/Z,α′ = 1 − √k a e^{-ikα′}`.
    LinearMode { k: i64, amplitude: f64 },
    /// Flat interface with velocity `Z̄ₜ = a e^{-ikα′}`.
    StandingWave { k: i64, amplitude: f64 },
    /// Random holomorphic coefficients on `1 ≤ |k| ≤ modes`, scaled by `amplitude·e^{-decay|k|}`.
    RandomAnalytic {
        seed: u64,
        modes: usize,
        decay: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    /// `1/Z,α′ = 1 − ρe^{-iα′}` at rest; the interface develops a near-corner at α′ = 0.
    NearCrest { rho: f64 },
}

fn default_amplitude() -> f64 {
    0.05
}

/// Builds a state from Z̄ₜ and 1/Z,α′, tracking `Z − α′ = ∂⁻¹(Z,α′ − 1)`.
pub fn from_traces(zt_bar: Field, inv_za: Field) -> WaterWaveState {
    let z = inv_za.map(|v| 1.0 / v).add_const(C64::from(-1.0)).antiderivative();
    WaterWaveState { zt_bar, inv_za, z: Some(z), t: 0.0 }
}

fn check_mode(n: usize, k: i64) -> Result<()> {
    if k < 1 || k >= n as i64 / 2 {
        return Err(Error::BadSpec(format!("mode k = {k} outside 1..{}", n / 2)));
    }
    Ok(())
}

pub fn rest(n: usize) -> Result<WaterWaveState> {
    let g = grid(n)?;
    Ok(from_traces(Field::zeros(g.clone()), Field::constant(g, C64::from(1.0))))
}

pub fn linear_mode(n: usize, k: i64, amplitude: f64) -> Result<WaterWaveState> {
    check_mode(n, k)?;
    let g = grid(n)?;
    let a = C64::from(amplitude);
    let zt_bar = Field::from_modes(g.clone(), &[(-k, a)]);
    let inv_za = Field::from_modes(g, &[(0, C64::from(1.0)), (-k, -a * (k as f64).sqrt())]);
    Ok(from_traces(zt_bar, inv_za))
}

pub fn standing_wave(n: usize, k: i64, amplitude: f64) -> Result<WaterWaveState> {
    check_mode(n, k)?;
    let g = grid(n)?;
    let zt_bar = Field::from_modes(g.clone(), &[(-k, C64::from(amplitude))]);
    Ok(from_traces(zt_bar, Field::constant(g, C64::from(1.0))))
}

pub fn random_analytic(n: usize, seed: u64, modes: usize, decay: f64, amplitude: f64) -> Result<WaterWaveState> {
    if modes == 0 || modes >= n / 2 || !(decay >= 0.0) || !amplitude.is_finite() {
        return Err(Error::BadSpec(format!("random_analytic needs 1 <= modes < N/2 and decay >= 0 (modes={modes}, decay={decay})")));
    }
    let g = grid(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<(i64, C64)> {
        (1..=modes as i64)
            .map(|m| {
                let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                (-m, c * amplitude * (-decay * m as f64).exp())
            })
            .collect()
    };
    let zt_bar = Field::from_modes(g.clone(), &draw(&mut rng));
    let w = Field::from_modes(g, &draw(&mut rng));
    Ok(from_traces(zt_bar, w.add_const(C64::from(1.0))))
}

pub fn near_crest(n: usize, rho: f64) -> Result<WaterWaveState> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::BadSpec(format!("near_crest needs 0 < rho < 1, got {rho}")));
    }
    let g = grid(n)?;
    let inv_za = Field::from_modes(g.clone(), &[(0, C64::from(1.0)), (-1, C64::from(-rho))]);
    Ok(from_traces(Field::zeros(g), inv_za))
}

pub fn generate_initial(spec: &InitialSpec, n: usize) -> Result<WaterWaveState> {
    match *spec {
        InitialSpec::Rest => rest(n),
        InitialSpec::LinearMode { k, amplitude } => linear_mode(n, k, amplitude),
        InitialSpec::StandingWave { k, amplitude } => standing_wave(n, k, amplitude),
        InitialSpec::RandomAnalytic { seed, modes, decay, amplitude } => random_analytic(n, seed, modes, decay, amplitude),
        InitialSpec::NearCrest { rho } => near_crest(n, rho),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::taylor_check;
    use crate::evolution::constraint_defects;

    #[test]
    fn rest_values() {
        let s = rest(32).unwrap();
        assert!(s.zt_bar.linf() == 0.0);
        assert!(s.inv_za.add_const(C64::from(-1.0)).linf() < 1e-15);
    }

    #[test]
    fn near_crest_minimum() {
        let s = near_crest(64, 0.9).unwrap();
        assert!((s.inv_za.values()[0].norm() - 0.1).abs() < 1e-14);
        assert!((s.inv_za.min_abs() - 0.1).abs() < 1e-14);
        assert!(near_crest(64, 1.0).is_err());
    }

    #[test]
    fn linear_mode_taylor_margin() {
        let a = 1e-5;
        let s = linear_mode(64, 4, a).unwrap();
        let m = taylor_check(&s);
        assert!(m > 0.0 && (m - 4.0 * a * a).abs() < 1e-15, "{m:e}");
        assert!(linear_mode(64, 0, a).is_err());
    }

    #[test]
    fn generated_states_are_holomorphic_and_deterministic() {
        let a = random_analytic(64, 7, 8, 0.3, 0.1).unwrap();
        let b = random_analytic(64, 7, 8, 0.3, 0.1).unwrap();
        assert_eq!(a, b);
        let d = constraint_defects(&a);
        assert!(d.zt < 1e-15 && d.za < 1e-15);
    }
}
