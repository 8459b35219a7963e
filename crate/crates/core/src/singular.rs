//! Commutators and multilinear singular integrals, spectral fast paths.
//!
//! `quadrature` holds the O(N²) references these are tested against.

use crate::error::{Error, Result};
use crate::quadrature;
use crate::spectral::Field;

/// `[f, ℍ]g = f·ℍg − ℍ(fg)`.
pub fn commutator_h(f: &Field, g: &Field) -> Field {
    &f.mul(&g.hilbert()) - &f.mul(g).hilbert()
}

/// `[f, ℍ]∂g`.
pub fn commutator_h_d(f: &Field, g: &Field) -> Field {
    commutator_h(f, &g.derivative())
}

/// `[f, g; h] = (1/πi)∫ (f(α)−f(β))(g(α)−g(β)) / (α−β)² h(β) dβ`.
///
/// Evaluated through `[f, g; h] = [g,ℍ](f′h) + [f,ℍ](g′h) − [f, [g,ℍ]]∂h`,
/// where `[f, [g,ℍ]]∂h = f·[g,ℍ]∂h − [g,ℍ](f ∂h)`.
pub fn triple_bracket(f: &Field, g: &Field, h: &Field) -> Field {
    let dh = h.derivative();
    let nested = &f.mul(&commutator_h(g, &dh)) - &commutator_h(g, &f.mul(&dh));
    let a = commutator_h(g, &f.derivative().mul(h));
    let b = commutator_h(f, &g.derivative().mul(h));
    &(&a + &b) - &nested
}

/// `[f, m; ∂g]_n = (1/πi)∫ (f(α)−f(β))(m(α)−m(β))ⁿ / (α−β)^{n+1} ∂g(β) dβ` for `n ≤ 3`.
///
/// `n = 0` and `n = 1` reduce to [`commutator_h_d`] and [`triple_bracket`]; higher orders
/// fall back to quadrature.
pub fn bracket_n(f: &Field, m: &Field, g: &Field, n: usize) -> Result<Field> {
    match n {
        0 => Ok(commutator_h_d(f, g)),
        1 => Ok(triple_bracket(f, m, &g.derivative())),
        2 | 3 => quadrature::bracket_n(f, m, g, n),
        _ => Err(Error::BadOrder(n)),
    }
}

/// `D f = (1/w)∂f`. Fails when `w` comes within `1e-14` of zero.
pub fn d_weighted(f: &Field, w: &Field) -> Result<Field> {
    let min = w.min_abs();
    if !(min > 1e-14) {
        return Err(Error::DegenerateWeight(min));
    }
    Ok(w.map(|v| 1.0 / v).mul(&f.derivative()))
}

/// `D f` given the reciprocal weight `inv_w = 1/w`; never divides.
pub fn d_inv(f: &Field, inv_w: &Field) -> Field {
    inv_w.mul(&f.derivative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{grid, C64};

    fn m(n: usize, k: i64) -> Field {
        Field::from_modes(grid(n).unwrap(), &[(k, C64::from(1.0))])
    }

    #[test]
    fn commutator_examples() {
        let g = grid(64).unwrap();
        let c = Field::constant(g.clone(), C64::new(2.0, 1.0));
        let f = &m(64, 2) + &m(64, -3);
        assert!(commutator_h(&c, &f).linf() < 1e-14);
        assert!(commutator_h(&m(64, -1), &m(64, -2)).linf() < 1e-14);
        let v = commutator_h(&m(64, 1), &m(64, -1));
        assert!((&v - &Field::constant(g.clone(), C64::from(1.0))).linf() < 1e-14);
        let q = quadrature::commutator_h(&m(64, 1), &m(64, -1));
        assert!((&q - &v).linf() < 1e-12);
        let w = commutator_h_d(&m(64, 1), &m(64, -1));
        assert!((&w - &Field::constant(g.clone(), C64::new(0.0, -1.0))).linf() < 1e-14);
        assert!(commutator_h_d(&f, &c).linf() < 1e-13);
        assert!(commutator_h_d(&c, &f).linf() < 1e-13);
    }

    #[test]
    fn triple_bracket_examples() {
        let g = grid(64).unwrap();
        let c = Field::constant(g.clone(), C64::from(3.0));
        let f = &m(64, 2) + &m(64, -3);
        assert!(triple_bracket(&c, &f, &f).linf() < 1e-13);
        assert!(triple_bracket(&f, &c, &f).linf() < 1e-13);
        let one = Field::constant(g, C64::from(1.0));
        assert!(triple_bracket(&m(64, -1), &m(64, -1), &one).linf() < 1e-14);
        let q = quadrature::triple_bracket(&f, &m(64, 1), &m(64, -2));
        assert!((&q - &triple_bracket(&f, &m(64, 1), &m(64, -2))).linf() < 1e-12);
    }

    #[test]
    fn bracket_n_examples() {
        let f = &m(64, 2) + &m(64, -3);
        let h = &m(64, 1) + &m(64, -1);
        let b0 = bracket_n(&f, &h, &h, 0).unwrap();
        let q0 = quadrature::bracket_n(&f, &h, &h, 0).unwrap();
        assert!((&b0 - &commutator_h_d(&f, &h)).linf() < 1e-12);
        assert!((&b0 - &q0).linf() < 1e-12);
        let c = Field::constant(f.grid().clone(), C64::from(1.5));
        assert!(bracket_n(&f, &c, &h, 1).unwrap().linf() < 1e-13);
        let e = m(64, -1);
        let b1 = bracket_n(&e, &e, &e, 1).unwrap();
        let q1 = quadrature::bracket_n(&e, &e, &e, 1).unwrap();
        assert!((&b1 - &q1).linf() < 1e-12);
        assert!(bracket_n(&f, &h, &h, 4).is_err());
    }

    #[test]
    fn d_weighted_examples() {
        let g = grid(32).unwrap();
        let f = m(32, -1);
        let one = Field::constant(g.clone(), C64::from(1.0));
        assert!((&d_weighted(&f, &one).unwrap() - &f.derivative()).linf() < 1e-14);
        let c = Field::constant(g.clone(), C64::from(4.0));
        assert!(d_weighted(&c, &one).unwrap().linf() < 1e-14);
        let two = Field::constant(g.clone(), C64::from(2.0));
        let expect = &f * C64::new(0.0, -0.5);
        assert!((&d_weighted(&f, &two).unwrap() - &expect).linf() < 1e-14);
        assert!(matches!(d_weighted(&f, &Field::zeros(g)), Err(Error::DegenerateWeight(_))));
    }
}
