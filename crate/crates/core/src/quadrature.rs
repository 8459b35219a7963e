//! Direct O(N²) quadratures of the periodized singular integrals.
//!
//! These are the brute-force references for the spectral fast paths. Every kernel is the
//! lattice sum `P_p(x) = Σ_m (x + 2πm)^{-p}`, which is what a line integral of a 2π-periodic
//! integrand reduces to. Diagonal singularities are avoided with the alternate-point rule:
//! for target `i` only nodes `j` with `j − i` odd are used, each with weight `2h`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::{Field, C64, I};

/// Lattice-summed kernel `Σ_m (x + 2πm)^{-p}` for `p ∈ 1..=4` (symmetric summation for `p = 1`).
pub fn periodic_kernel(p: usize, x: f64) -> f64 {
    let s = (0.5 * x).sin();
    let c = (0.5 * x).cos();
    match p {
        1 => 0.5 * c / s,
        2 => 0.25 / (s * s),
        3 => c / (8.0 * s * s * s),
        4 => (3.0 - 2.0 * s * s) / (48.0 * s.powi(4)),
        _ => panic!("kernel order {p} not tabulated"),
    }
}

fn alternate(i: usize, n: usize) -> impl Iterator<Item = usize> {
    let start = (i + 1) % 2;
    (start..n).step_by(2)
}

/// Weighted alternate-point sum `2h Σ_{j−i odd} K(α_i − α_j, j)` for each target `i`.
fn alt_sum(n: usize, mut term: impl FnMut(usize, usize, f64) -> C64) -> Vec<C64> {
    let h = 2.0 * PI / n as f64;
    (0..n)
        .map(|i| {
            let mut s = C64::new(0.0, 0.0);
            for j in alternate(i, n) {
                s += term(i, j, h * (i as f64 - j as f64));
            }
            s * 2.0 * h
        })
        .collect()
}

fn wrap(f: &Field, v: Vec<C64>) -> Field {
    Field::from_values(f.grid().clone(), v).expect("same grid")
}

/// `ℍf = (1/πi) pv∫ f(β) / (α − β) dβ`, periodized.
pub fn hilbert(f: &Field) -> Field {
    let v = f.values();
    let pre = 1.0 / (PI * I);
    wrap(f, alt_sum(f.n(), |_, j, x| pre * periodic_kernel(1, x) * v[j]))
}

/// `[f, m; ∂g]_n`-type integral with the weight `w` standing in for `∂g`:
/// `(1/πi)∫ (f(α)−f(β)) (m(α)−m(β))ⁿ / (α−β)^{n+1} w(β) dβ`.
pub fn bracket_weighted(f: &Field, m: &Field, w: &Field, n: usize) -> Result<Field> {
    if n > 3 {
        return Err(Error::BadOrder(n));
    }
    let (fv, mv, wv) = (f.values(), m.values(), w.values());
    let pre = 1.0 / (PI * I);
    let out = alt_sum(f.n(), |i, j, x| {
        pre * (fv[i] - fv[j]) * (mv[i] - mv[j]).powu(n as u32) * periodic_kernel(n + 1, x) * wv[j]
    });
    Ok(wrap(f, out))
}

/// `[f, ℍ]g` by quadrature.
pub fn commutator_h(f: &Field, g: &Field) -> Field {
    let one = Field::constant(f.grid().clone(), C64::from(1.0));
    bracket_weighted(f, &one, g, 0).expect("order 0")
}

/// `[f, g; h]` by quadrature.
pub fn triple_bracket(f: &Field, g: &Field, h: &Field) -> Field {
    bracket_weighted(f, g, h, 1).expect("order 1")
}

/// `[f, m; ∂g]_n` by quadrature.
pub fn bracket_n(f: &Field, m: &Field, g: &Field, n: usize) -> Result<Field> {
    bracket_weighted(f, m, &g.derivative(), n)
}

/// `A₁ = 1 + (1/2π)∫ |Zₜ(α) − Zₜ(β)|² / (α − β)² dβ`, periodized; `zt` is Zₜ (or Z̄ₜ).
pub fn a1(zt: &Field) -> Field {
    let v = zt.values();
    let out = alt_sum(zt.n(), |i, j, x| C64::from((v[i] - v[j]).norm_sqr() * periodic_kernel(2, x)));
    wrap(zt, out.into_iter().map(|s| 1.0 + s / (2.0 * PI)).collect())
}

/// `‖f‖²_{Ḣ½} = (1/2π)∬ |f(x) − f(y)|² / (x − y)² dx dy`, periodized.
pub fn hhalf_sq(f: &Field) -> f64 {
    let v = f.values();
    let inner = alt_sum(f.n(), |i, j, x| C64::from((v[i] - v[j]).norm_sqr() * periodic_kernel(2, x)));
    let h = 2.0 * PI / f.n() as f64;
    inner.iter().map(|s| s.re).sum::<f64>() * h / (2.0 * PI)
}

/// Poisson smoothing by the periodic kernel `(1/2π) sinh ε / (cosh ε − cos x)`.
pub fn poisson(f: &Field, eps: f64) -> Field {
    let n = f.n();
    let h = 2.0 * PI / n as f64;
    let v = f.values();
    let (sh, ch) = (eps.sinh(), eps.cosh());
    let out = (0..n)
        .map(|i| {
            let mut s = C64::new(0.0, 0.0);
            for (j, vj) in v.iter().enumerate() {
                let x = h * (i as f64 - j as f64);
                s += vj * (sh / (ch - x.cos()));
            }
            s * h / (2.0 * PI)
        })
        .collect();
    wrap(f, out)
}

/// Harmonic extension at `x + iy`, `y < 0`, by the Poisson kernel.
pub fn harmonic_at(f: &Field, x: f64, y: f64) -> C64 {
    let eps = -y;
    let n = f.n();
    let h = 2.0 * PI / n as f64;
    let (sh, ch) = (eps.sinh(), eps.cosh());
    let mut s = C64::new(0.0, 0.0);
    for (j, vj) in f.values().iter().enumerate() {
        s += vj * (sh / (ch - (x - h * j as f64).cos()));
    }
    s * h / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid;

    #[test]
    fn kernels_match_lattice_sums() {
        for &x in &[0.3, 1.1, 2.5, -0.7] {
            for p in 2..=4usize {
                let big_m = 20000i64;
                let mut s = 0.0;
                for m in -big_m..=big_m {
                    s += (x + 2.0 * PI * m as f64).powi(-(p as i32));
                }
                if p % 2 == 0 {
                    // Tail beyond |m| = M, summed as an integral.
                    s += 2.0 * (2.0 * PI).powi(-(p as i32)) * (big_m as f64 + 0.5).powi(1 - p as i32) / (p - 1) as f64;
                }
                let k = periodic_kernel(p, x);
                assert!((s - k).abs() < 1e-9 * k.abs().max(1.0), "p={p} x={x}: {s} vs {k}");
            }
            let mut s = 1.0 / x;
            for m in 1..200000i64 {
                let t = 2.0 * PI * m as f64;
                s += 1.0 / (x + t) + 1.0 / (x - t);
            }
            assert!((s - periodic_kernel(1, x)).abs() < 1e-5);
        }
    }

    #[test]
    fn hilbert_quadrature_matches_multiplier() {
        let g = grid(64).unwrap();
        let f = Field::from_modes(g, &[(1, C64::new(1.0, 0.5)), (-3, C64::new(0.2, 0.0)), (0, C64::from(2.0))]);
        let d = (&hilbert(&f) - &f.hilbert()).linf();
        assert!(d < 1e-12, "{d:e}");
    }

    #[test]
    fn a1_quadrature_single_mode() {
        let g = grid(64).unwrap();
        let a = C64::new(0.3, -0.1);
        let zt_bar = Field::from_modes(g, &[(-1, a)]);
        let v = a1(&zt_bar.conj());
        assert!((&v - &Field::constant(v.grid().clone(), C64::from(1.0 + a.norm_sqr()))).linf() < 1e-13);
    }

    #[test]
    fn order_above_three_rejected() {
        let g = grid(16).unwrap();
        let f = Field::zeros(g);
        assert!(matches!(bracket_n(&f, &f, &f, 4), Err(Error::BadOrder(4))));
    }
}
