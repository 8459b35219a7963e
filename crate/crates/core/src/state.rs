//! The evolved state `(Z̄ₜ, 1/Z,α′, Z − α′)` and the quantities derived from it.

use crate::quadrature;
use crate::singular::{commutator_h_d, d_inv, triple_bracket};
use crate::spectral::{Field, C64, I};

#[derive(Clone, Debug, PartialEq)]
pub struct WaterWaveState {
    /// Z̄ₜ, holomorphic and mean-zero.
    pub zt_bar: Field,
    /// 1/Z,α′; `inv_za − 1` is holomorphic.
    pub inv_za: Field,
    /// Z − α′ when the interface is tracked.
    pub z: Option<Field>,
    pub t: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum A1Method {
    Commutator,
    Quadrature,
}

impl WaterWaveState {
    pub fn n(&self) -> usize {
        self.zt_bar.n()
    }

    /// Zₜ = conj(Z̄ₜ).
    pub fn zt(&self) -> Field {
        self.zt_bar.conj()
    }

    /// Z,α′ reconstructed from the tracked interface, if any.
    pub fn z_alpha(&self) -> Option<Field> {
        self.z.as_ref().map(|z| z.derivative().add_const(C64::from(1.0)))
    }
}

/// `b = Re (I − ℍ)(Zₜ / Z,α′)`, with the free real constant fixed to 0.
pub fn compute_b(s: &WaterWaveState) -> Field {
    let p = s.zt().mul(&s.inv_za);
    (&p - &p.hilbert()).re()
}

/// `A₁ = 1 − Im [Zₜ, ℍ] Z̄ₜ,α′`, or the equivalent double-integral form.
pub fn compute_a1(s: &WaterWaveState, method: A1Method) -> Field {
    match method {
        A1Method::Commutator => commutator_h_d(&s.zt(), &s.zt_bar).im().scale(C64::from(-1.0)).add_const(C64::from(1.0)),
        A1Method::Quadrature => quadrature::a1(&s.zt()),
    }
}

/// `D_α′Zₜ = (1/Z,α′)∂Zₜ`.
pub fn compute_dzt(s: &WaterWaveState) -> Field {
    d_inv(&s.zt(), &s.inv_za)
}

/// `b_α′ = 2 Re D Zₜ + Re([1/Z,α′, ℍ]Zₜ,α′ + [Zₜ, ℍ]∂(1/Z,α′))`.
pub fn compute_b_alpha(s: &WaterWaveState) -> Field {
    let zt = s.zt();
    let dzt = compute_dzt(s);
    let sum = &(&dzt * 2.0) + &(&commutator_h_d(&s.inv_za, &zt) + &commutator_h_d(&zt, &s.inv_za));
    sum.re()
}

fn ztt_from(a1: &Field, inv_za: &Field) -> Field {
    a1.mul(inv_za).scale(-I).add_const(I)
}

/// `Z̄ₜₜ = −iA₁/Z,α′ + i`.
pub fn compute_ztt(s: &WaterWaveState) -> Field {
    ztt_from(&compute_a1(s, A1Method::Commutator), &s.inv_za)
}

/// `(∂ₜ + b∂)A₁ = −Im([Zₜₜ, ℍ]Z̄ₜ,α′ + [Zₜ, ℍ]∂Z̄ₜₜ − [Zₜ, b; Z̄ₜ,α′])`.
pub fn compute_dta1(s: &WaterWaveState) -> Field {
    let d = DerivedQuantities::compute(s);
    dta1_from(s, &d.b, &d.ztt_bar)
}

fn dta1_from(s: &WaterWaveState, b: &Field, ztt_bar: &Field) -> Field {
    let zt = s.zt();
    let t1 = commutator_h_d(&ztt_bar.conj(), &s.zt_bar);
    let t2 = commutator_h_d(&zt, ztt_bar);
    let t3 = triple_bracket(&zt, b, &s.zt_bar.derivative());
    (&(&t1 + &t2) - &t3).im().scale(C64::from(-1.0))
}

/// `𝔞ₜ/𝔞 ∘ h⁻¹ = (∂ₜ + b∂)A₁ / A₁ + b_α′ − 2 Re D Zₜ`.
pub fn compute_at_over_a(s: &WaterWaveState) -> Field {
    DerivedQuantities::compute(s).at_over_a
}

/// `Z̄ₜₜₜ = −iA₁/Z,α′ · (𝔞ₜ/𝔞∘h⁻¹ + conj(D Zₜ))`.
pub fn compute_zttt(s: &WaterWaveState) -> Field {
    DerivedQuantities::compute(s).zttt_bar
}

/// Residual of `1/Z,α′ = i(Z̄ₜₜ − i)/A₁` for a supplied Z̄ₜₜ.
pub fn aa1_residual(s: &WaterWaveState, ztt_bar: &Field, a1: &Field) -> f64 {
    let rhs = ztt_bar.add_const(-I).scale(I).zip_map(a1, |v, a| v / a.re);
    (&s.inv_za - &rhs).linf()
}

/// Per-state cache of every derived field.
#[derive(Clone, Debug)]
pub struct DerivedQuantities {
    pub b: Field,
    pub b_alpha: Field,
    pub a1: Field,
    pub ztt_bar: Field,
    pub zttt_bar: Field,
    pub dta1: Field,
    pub at_over_a: Field,
    /// D_α′Zₜ
    pub dzt: Field,
    /// 𝒜 = A₁/|Z,α′|² = A₁ |1/Z,α′|²
    pub big_a: Field,
}

impl DerivedQuantities {
    pub fn compute(s: &WaterWaveState) -> Self {
        let b = compute_b(s);
        let b_alpha = compute_b_alpha(s);
        let a1 = compute_a1(s, A1Method::Commutator);
        let dzt = compute_dzt(s);
        let ztt_bar = ztt_from(&a1, &s.inv_za);
        let dta1 = dta1_from(s, &b, &ztt_bar);
        let ratio = dta1.zip_map(&a1, |d, a| C64::from(d.re / a.re));
        let at_over_a = (&(&ratio + &b_alpha) - &(&dzt.re() * 2.0)).re();
        let zttt_bar = a1.mul(&s.inv_za).scale(-I).mul(&(&at_over_a + &dzt.conj()));
        let big_a = a1.mul(&s.inv_za.mul(&s.inv_za.conj())).re();
        DerivedQuantities { b, b_alpha, a1, ztt_bar, zttt_bar, dta1, at_over_a, dzt, big_a }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid;

    fn state(zt_modes: &[(i64, C64)], za_modes: &[(i64, C64)]) -> WaterWaveState {
        let g = grid(64).unwrap();
        let zt_bar = Field::from_modes(g.clone(), zt_modes);
        let inv_za = Field::from_modes(g, za_modes).add_const(C64::from(1.0));
        WaterWaveState { zt_bar, inv_za, z: None, t: 0.0 }
    }

    #[test]
    fn rest_state_quantities() {
        let s = state(&[], &[]);
        let d = DerivedQuantities::compute(&s);
        assert!(d.b.linf() < 1e-15);
        assert!(d.b_alpha.linf() < 1e-15);
        assert!(d.a1.add_const(C64::from(-1.0)).linf() < 1e-15);
        assert!(d.ztt_bar.linf() < 1e-15);
        assert!(d.at_over_a.linf() < 1e-15);
        assert!(d.zttt_bar.linf() < 1e-15);
    }

    #[test]
    fn single_mode_b_and_a1() {
        let a = 0.2;
        let s = state(&[(-1, C64::from(a))], &[]);
        let b = compute_b(&s);
        let expect = Field::from_fn(b.grid().clone(), |x| C64::from(2.0 * a * x.cos()));
        assert!((&b - &expect).linf() < 1e-14);
        let a1 = compute_a1(&s, A1Method::Commutator);
        assert!(a1.add_const(C64::from(-1.0 - a * a)).linf() < 1e-14);
        let q = compute_a1(&s, A1Method::Quadrature);
        assert!((&a1 - &q).linf() < 1e-13);
    }

    #[test]
    fn ztt_linear_in_w() {
        let w = C64::new(0.01, 0.02);
        let s = state(&[], &[(-2, w)]);
        let ztt = compute_ztt(&s);
        let expect = Field::from_modes(ztt.grid().clone(), &[(-2, -I * w)]);
        assert!((&ztt - &expect).linf() < 1e-15);
    }

    #[test]
    fn zttt_vanishes_without_velocity() {
        let s = state(&[], &[(-1, C64::from(0.3))]);
        assert!(compute_zttt(&s).linf() < 1e-14);
    }

    #[test]
    fn aa1_holds_by_construction() {
        let s = state(&[(-1, C64::new(0.1, 0.05)), (-2, C64::from(0.03))], &[(-1, C64::from(0.1))]);
        let d = DerivedQuantities::compute(&s);
        assert!(aa1_residual(&s, &d.ztt_bar, &d.a1) < 1e-14);
    }
}
