//! Periodic spectral fields on the uniform grid α′_j = 2πj/N.
//!
//! Conventions used throughout the crate:
//! - Fourier coefficients are `c_k = (1/N) Σ_j f_j e^{-ikα_j}` so that `f = Σ_k c_k e^{ikα}`,
//!   with `k ∈ {-N/2, …, N/2-1}` stored in FFT order.
//! - Integrals run over one period, so `‖1‖_{L²} = √(2π)`.
//! - Holomorphic means holomorphic in the lower half-plane: spectrum on `k ≤ 0`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

/// FFT plans and geometry for one grid size. Shared between fields through an `Arc`.
pub struct Grid {
    n: usize,
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    fwd_pad: Arc<dyn Fft<f64>>,
    inv_pad: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("n", &self.n).finish()
    }
}

static GRIDS: OnceLock<Mutex<HashMap<usize, Arc<Grid>>>> = OnceLock::new();

/// Returns the (cached) grid of size `n`.
pub fn grid(n: usize) -> Result<Arc<Grid>> {
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::BadGrid(n));
    }
    let cache = GRIDS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(g) = cache.get(&n) {
        return Ok(g.clone());
    }
    // 3/2 padding: products of two fields with |k| < N/2 alias only outside the kept band.
    let m = 3 * n / 2;
    let mut planner = FftPlanner::new();
    let g = Arc::new(Grid {
        n,
        m,
        fwd: planner.plan_fft_forward(n),
        inv: planner.plan_fft_inverse(n),
        fwd_pad: planner.plan_fft_forward(m),
        inv_pad: planner.plan_fft_inverse(m),
    });
    cache.insert(n, g.clone());
    Ok(g)
}

impl Grid {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Grid spacing 2π/N.
    pub fn h(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn alpha(&self, j: usize) -> f64 {
        self.h() * j as f64
    }

    pub fn alphas(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.alpha(j)).collect()
    }

    /// Wavenumber stored at FFT index `i`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        wavenumber(i, self.n)
    }

    /// FFT index of wavenumber `k`, or `None` when |k| is outside the grid band.
    pub fn index(&self, k: i64) -> Option<usize> {
        let n = self.n as i64;
        if k < -n / 2 || k >= n / 2 {
            return None;
        }
        Some(k.rem_euclid(n) as usize)
    }

    fn forward(&self, values: &[C64]) -> Vec<C64> {
        let mut buf = values.to_vec();
        self.fwd.process(&mut buf);
        let s = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|c| *c *= s);
        buf
    }

    fn inverse(&self, coeffs: &[C64]) -> Vec<C64> {
        let mut buf = coeffs.to_vec();
        self.inv.process(&mut buf);
        buf
    }
}

fn wavenumber(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// A diagonal Fourier operator: `symbol[i]` multiplies the coefficient at FFT index `i`.
#[derive(Clone, Debug)]
pub struct SpectralMultiplier {
    pub symbol: Vec<C64>,
}

impl SpectralMultiplier {
    pub fn from_fn(n: usize, f: impl Fn(i64) -> C64) -> Self {
        SpectralMultiplier { symbol: (0..n).map(|i| f(wavenumber(i, n))).collect() }
    }

    /// `-sgn(k)`; the Nyquist index counts as negative, the mean is annihilated.
    pub fn hilbert(n: usize) -> Self {
        Self::from_fn(n, |k| C64::from(-(k.signum() as f64)))
    }

    /// `ik`, with the Nyquist mode dropped so real fields stay real.
    pub fn derivative(n: usize) -> Self {
        let nyq = -(n as i64) / 2;
        Self::from_fn(n, |k| if k == nyq { C64::new(0.0, 0.0) } else { I * k as f64 })
    }

    /// `|k|`.
    pub fn abs_derivative(n: usize) -> Self {
        Self::from_fn(n, |k| C64::from(k.abs() as f64))
    }

    /// `e^{-eps|k|}`, the trace of the harmonic extension at depth `-eps`.
    pub fn poisson(n: usize, eps: f64) -> Self {
        Self::from_fn(n, |k| C64::from((-eps * k.abs() as f64).exp()))
    }

    pub fn apply(&self, f: &Field) -> Field {
        let mut c = f.coeffs();
        c.iter_mut().zip(&self.symbol).for_each(|(c, s)| *c *= s);
        Field::from_coeffs(f.grid.clone(), c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Holo,
    Antiholo,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Norms {
    pub l2: f64,
    pub linf: f64,
}

/// Complex samples of a 2π-periodic function.
#[derive(Clone)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<C64>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field").field("n", &self.grid.n).field("values", &self.values).finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
    }
}

impl Field {
    pub fn from_values(grid: Arc<Grid>, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::GridMismatch(values.len(), grid.n));
        }
        Ok(Field { grid, values })
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> C64) -> Self {
        let values = (0..grid.n).map(|j| f(grid.alpha(j))).collect();
        Field { grid, values }
    }

    pub fn from_real(grid: Arc<Grid>, values: &[f64]) -> Result<Self> {
        Self::from_values(grid, values.iter().map(|&x| C64::from(x)).collect())
    }

    pub fn constant(grid: Arc<Grid>, c: C64) -> Self {
        let values = vec![c; grid.n];
        Field { grid, values }
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        Self::constant(grid, C64::new(0.0, 0.0))
    }

    /// Builds a field from Fourier coefficients in FFT order.
    pub fn from_coeffs(grid: Arc<Grid>, coeffs: Vec<C64>) -> Self {
        let values = grid.inverse(&coeffs);
        Field { grid, values }
    }

    /// Builds a field from `(k, c_k)` pairs; wavenumbers outside the band are ignored.
    pub fn from_modes(grid: Arc<Grid>, modes: &[(i64, C64)]) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); grid.n];
        for &(k, a) in modes {
            if let Some(i) = grid.index(k) {
                c[i] += a;
            }
        }
        Self::from_coeffs(grid, c)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn coeffs(&self) -> Vec<C64> {
        self.grid.forward(&self.values)
    }

    pub fn coeff(&self, k: i64) -> C64 {
        match self.grid.index(k) {
            Some(i) => self.coeffs()[i],
            None => C64::new(0.0, 0.0),
        }
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Field {
        Field { grid: self.grid.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(C64, C64) -> C64) -> Field {
        self.check(other);
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Field { grid: self.grid.clone(), values }
    }

    fn check(&self, other: &Field) {
        assert_eq!(self.grid.n, other.grid.n, "field grid sizes differ");
    }

    pub fn conj(&self) -> Field {
        self.map(|v| v.conj())
    }

    /// Real part, kept as a complex field with zero imaginary part.
    pub fn re(&self) -> Field {
        self.map(|v| C64::from(v.re))
    }

    pub fn im(&self) -> Field {
        self.map(|v| C64::from(v.im))
    }

    pub fn re_vec(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn scale(&self, s: C64) -> Field {
        self.map(|v| v * s)
    }

    pub fn add_const(&self, c: C64) -> Field {
        self.map(|v| v + c)
    }

    /// Pointwise product without dealiasing.
    pub fn mul_pointwise(&self, other: &Field) -> Field {
        self.zip_map(other, |a, b| a * b)
    }

    /// Product computed on a 3N/2 grid and truncated to |k| < N/2.
    pub fn mul(&self, other: &Field) -> Field {
        self.check(other);
        let g = &self.grid;
        let (n, m) = (g.n, g.m);
        let pad = |f: &Field| {
            let c = f.coeffs();
            let mut p = vec![C64::new(0.0, 0.0); m];
            for (i, &ci) in c.iter().enumerate() {
                let k = wavenumber(i, n);
                if k == -(n as i64) / 2 {
                    continue;
                }
                p[k.rem_euclid(m as i64) as usize] = ci;
            }
            g.inv_pad.process(&mut p);
            p
        };
        let a = pad(self);
        let b = pad(other);
        let mut prod: Vec<C64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        g.fwd_pad.process(&mut prod);
        let s = 1.0 / m as f64;
        let mut c = vec![C64::new(0.0, 0.0); n];
        for (i, ci) in c.iter_mut().enumerate() {
            let k = wavenumber(i, n);
            if k == -(n as i64) / 2 {
                continue;
            }
            *ci = prod[k.rem_euclid(m as i64) as usize] * s;
        }
        Field::from_coeffs(g.clone(), c)
    }

    pub fn apply(&self, m: &SpectralMultiplier) -> Field {
        m.apply(self)
    }

    fn multiply_symbol(&self, f: impl Fn(i64) -> C64) -> Field {
        let n = self.grid.n;
        let mut c = self.coeffs();
        for (i, ci) in c.iter_mut().enumerate() {
            *ci *= f(wavenumber(i, n));
        }
        Field::from_coeffs(self.grid.clone(), c)
    }

    /// ℍ with multiplier `-sgn(k)`.
    pub fn hilbert(&self) -> Field {
        self.multiply_symbol(|k| C64::from(-(k.signum() as f64)))
    }

    /// `P_H = ½(I + ℍ)` or `P_A = ½(I − ℍ)`; each keeps half of the mean.
    pub fn project(&self, part: Part) -> Field {
        let sign = match part {
            Part::Holo => -1,
            Part::Antiholo => 1,
        };
        self.multiply_symbol(|k| {
            if k == 0 {
                C64::from(0.5)
            } else if k.signum() == sign {
                C64::from(1.0)
            } else {
                C64::from(0.0)
            }
        })
    }

    pub fn derivative(&self) -> Field {
        let nyq = -(self.grid.n as i64) / 2;
        self.multiply_symbol(|k| if k == nyq { C64::from(0.0) } else { I * k as f64 })
    }

    /// Mean-zero antiderivative of the mean-zero part of `self`.
    pub fn antiderivative(&self) -> Field {
        let nyq = -(self.grid.n as i64) / 2;
        self.multiply_symbol(|k| if k == 0 || k == nyq { C64::from(0.0) } else { -I / k as f64 })
    }

    pub fn poisson_smooth(&self, eps: f64) -> Field {
        self.multiply_symbol(|k| C64::from((-eps * k.abs() as f64).exp()))
    }

    /// Zeroes Fourier coefficients with modulus below `threshold`.
    pub fn krasny(&self, threshold: f64) -> Field {
        let mut c = self.coeffs();
        c.iter_mut().filter(|c| c.norm() < threshold).for_each(|c| *c = C64::new(0.0, 0.0));
        Field::from_coeffs(self.grid.clone(), c)
    }

    /// Keeps only the coefficients for which `keep(k)` holds; returns the kept field and
    /// the L² norm of what was removed.
    pub fn filter_modes(&self, keep: impl Fn(i64) -> bool) -> (Field, f64) {
        let n = self.grid.n;
        let mut c = self.coeffs();
        let mut removed = 0.0;
        for (i, ci) in c.iter_mut().enumerate() {
            if !keep(wavenumber(i, n)) {
                removed += ci.norm_sqr();
                *ci = C64::new(0.0, 0.0);
            }
        }
        (Field::from_coeffs(self.grid.clone(), c), (2.0 * PI * removed).sqrt())
    }

    pub fn mean(&self) -> C64 {
        self.values.iter().sum::<C64>() / self.grid.n as f64
    }

    /// Trapezoid integral over one period.
    pub fn integral(&self) -> C64 {
        self.values.iter().sum::<C64>() * self.grid.h()
    }

    pub fn l2(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.h()).sqrt()
    }

    pub fn l2_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.h()
    }

    pub fn linf(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn norms(&self) -> Norms {
        Norms { l2: self.l2(), linf: self.linf() }
    }

    pub fn min_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// `‖f‖²_{Ḣ½} = ∫ iℍ∂f · f̄ = 2π Σ |k| |c_k|²`.
    pub fn norm_hhalf_sq(&self) -> f64 {
        let n = self.grid.n;
        let c = self.coeffs();
        2.0 * PI
            * c.iter().enumerate().map(|(i, ci)| wavenumber(i, n).abs() as f64 * ci.norm_sqr()).sum::<f64>()
    }

    pub fn norm_hhalf(&self) -> f64 {
        self.norm_hhalf_sq().sqrt()
    }

    /// The signed pairing `∫ i f′ f̄ = ‖P_H f‖²_{Ḣ½} − ‖P_A f‖²_{Ḣ½}`.
    pub fn pairing_hhalf(&self) -> f64 {
        let n = self.grid.n;
        let c = self.coeffs();
        -2.0 * PI * c.iter().enumerate().map(|(i, ci)| wavenumber(i, n) as f64 * ci.norm_sqr()).sum::<f64>()
    }

    /// Harmonic (Poisson) extension `Σ c_k e^{ikx} e^{|k|y}` evaluated at `x + iy`, `y ≤ 0`.
    /// At `y = 0` this is the trigonometric interpolant of the samples.
    pub fn eval_harmonic(&self, x: f64, y: f64) -> C64 {
        eval_series(&self.coeffs(), x, |k| (y * k.abs() as f64).exp())
    }

    pub fn eval_at(&self, x: f64) -> C64 {
        self.eval_harmonic(x, 0.0)
    }

    /// Trigonometric interpolant at many points; one transform, `O(N)` per point.
    pub fn eval_many(&self, xs: &[f64]) -> Vec<C64> {
        let c = self.coeffs();
        xs.iter().map(|&x| eval_series(&c, x, |_| 1.0)).collect()
    }
}

/// Evaluates `Σ c_k w(k) e^{ikx}`, splitting the Nyquist coefficient evenly between ±N/2.
pub(crate) fn eval_series(c: &[C64], x: f64, w: impl Fn(i64) -> f64) -> C64 {
    let n = c.len();
    let half = (n / 2) as i64;
    let step = C64::from_polar(1.0, x);
    let mut e = C64::from_polar(1.0, -(half - 1) as f64 * x);
    let mut sum = C64::new(0.0, 0.0);
    for k in -(half - 1)..half {
        let i = k.rem_euclid(n as i64) as usize;
        sum += c[i] * w(k) * e;
        e *= step;
    }
    let nyq = c[half as usize];
    sum + nyq * w(-half) * (half as f64 * x).cos()
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        self.zip_map(rhs, |a, b| a - b)
    }
}

/// Dealiased product.
impl Mul for &Field {
    type Output = Field;
    fn mul(self, rhs: &Field) -> Field {
        Field::mul(self, rhs)
    }
}

impl Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, rhs: f64) -> Field {
        self.map(|v| v * rhs)
    }
}

impl Mul<C64> for &Field {
    type Output = Field;
    fn mul(self, rhs: C64) -> Field {
        self.map(|v| v * rhs)
    }
}

impl Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self.map(|v| -v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize) -> Arc<Grid> {
        grid(n).unwrap()
    }

    fn mode(n: usize, k: i64) -> Field {
        Field::from_fn(g(n), |x| C64::from_polar(1.0, k as f64 * x))
    }

    fn close(a: &Field, b: &Field, tol: f64) {
        let d = (a - b).linf();
        assert!(d <= tol, "difference {d:e} > {tol:e}");
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(grid(4).is_err());
        assert!(grid(100).is_err());
        assert!(grid(8).is_ok());
    }

    #[test]
    fn hilbert_examples() {
        let gr = g(64);
        let one = Field::constant(gr.clone(), C64::from(1.0));
        assert!(one.hilbert().linf() < 1e-15);
        close(&mode(64, -1).hilbert(), &mode(64, -1), 1e-14);
        close(&mode(64, 1).hilbert(), &(&mode(64, 1) * -1.0), 1e-14);
    }

    #[test]
    fn projection_examples() {
        let gr = g(32);
        close(&mode(32, -1).project(Part::Holo), &mode(32, -1), 1e-14);
        assert!(mode(32, 1).project(Part::Holo).linf() < 1e-15);
        let one = Field::constant(gr.clone(), C64::from(1.0));
        close(&one.project(Part::Holo), &Field::constant(gr, C64::from(0.5)), 1e-15);
    }

    #[test]
    fn derivative_examples() {
        let gr = g(64);
        close(&mode(64, 3).derivative(), &(&mode(64, 3) * C64::new(0.0, 3.0)), 1e-12);
        assert!(Field::constant(gr.clone(), C64::from(2.0)).derivative().linf() < 1e-15);
        let c = Field::from_fn(gr.clone(), |x| C64::from(x.cos()));
        let s = Field::from_fn(gr, |x| C64::from(-x.sin()));
        close(&c.derivative(), &s, 1e-14);
    }

    #[test]
    fn poisson_examples() {
        let gr = g(32);
        let c = Field::constant(gr, C64::new(0.3, -1.0));
        close(&c.poisson_smooth(0.7), &c, 1e-15);
        close(&mode(32, -1).poisson_smooth(0.2), &(&mode(32, -1) * (-0.2f64).exp()), 1e-15);
    }

    #[test]
    fn norm_examples() {
        let gr = g(64);
        assert_eq!(Field::zeros(gr.clone()).norms(), Norms { l2: 0.0, linf: 0.0 });
        let one = Field::constant(gr, C64::from(1.0));
        assert!((one.l2() - (2.0 * PI).sqrt()).abs() < 1e-14);
        assert!((one.linf() - 1.0).abs() < 1e-15);
        let e = mode(64, 1);
        assert!((e.l2() - (2.0 * PI).sqrt()).abs() < 1e-14);
        assert!((e.linf() - 1.0).abs() < 1e-14);
        assert!(one.norm_hhalf() < 1e-15);
        for k in [-3i64, 1, 5] {
            assert!((mode(64, k).norm_hhalf() - (2.0 * PI * k.abs() as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn dealiased_product_is_exact_for_band_limited() {
        let a = &mode(32, 7) + &mode(32, -5);
        let b = &mode(32, 3) + &mode(32, -9);
        let p = a.mul(&b);
        let expect = a.mul_pointwise(&b);
        close(&p, &expect, 1e-13);
    }

    #[test]
    fn dealiased_product_drops_aliased_modes() {
        // e^{12iα}·e^{12iα} = e^{24iα} lies outside the N = 32 band and must vanish.
        let a = mode(32, 12);
        assert!(a.mul(&a).linf() < 1e-14);
    }

    #[test]
    fn eval_reproduces_samples_and_modes() {
        let f = &mode(16, 3) + &(&mode(16, -2) * C64::new(0.5, 0.25));
        for j in 0..16 {
            let x = f.grid().alpha(j);
            assert!((f.eval_at(x) - f.values()[j]).norm() < 1e-13);
        }
        let x = 0.123;
        let expect = C64::from_polar(1.0, 3.0 * x) + C64::new(0.5, 0.25) * C64::from_polar(1.0, -2.0 * x);
        assert!((f.eval_at(x) - expect).norm() < 1e-13);
        let many = f.eval_many(&[x, 1.0]);
        assert!((many[0] - expect).norm() < 1e-13);
    }

    #[test]
    fn multiplier_objects_match_methods() {
        let f = &mode(32, 2) + &mode(32, -4);
        close(&SpectralMultiplier::hilbert(32).apply(&f), &f.hilbert(), 1e-15);
        close(&SpectralMultiplier::derivative(32).apply(&f), &f.derivative(), 1e-15);
        close(&SpectralMultiplier::poisson(32, 0.3).apply(&f), &f.poisson_smooth(0.3), 1e-15);
        let abs = SpectralMultiplier::abs_derivative(32).apply(&f);
        close(&abs, &(&(&mode(32, 2) * 2.0) + &(&mode(32, -4) * 4.0)), 1e-13);
    }
}
