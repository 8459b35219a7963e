//! Two-solution comparison through `l = h̃∘h⁻¹`: the functionals 𝔉₀–𝔉₃, ℱ, and the norm
//! bundles on both sides of the stability inequality.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{lagrangian_markers, MarkerPaths, Trajectory};
use crate::spectral::{eval_series, Field, C64};
use crate::state::{DerivedQuantities, WaterWaveState};

/// Weight of 𝔉₀ and 1/weight of 𝔉₃ in ℱ unless overridden. `search_m` on the shipped corpus
/// returns values well below this.
pub const DEFAULT_M: f64 = 1.0;

#[derive(Clone, Debug)]
pub struct SolutionPair {
    pub a: Trajectory,
    pub b: Trajectory,
    pub markers_a: MarkerPaths,
    pub markers_b: MarkerPaths,
}

impl SolutionPair {
    /// Pairs two trajectories on the same grid and time levels; markers start on the grid.
    pub fn new(a: Trajectory, b: Trajectory) -> Result<Self> {
        if a.snapshots[0].n() != b.snapshots[0].n() {
            return Err(Error::GridMismatch(a.snapshots[0].n(), b.snapshots[0].n()));
        }
        let (ta, tb) = (a.times(), b.times());
        if ta.len() != tb.len() || ta.iter().zip(&tb).any(|(x, y)| (x - y).abs() > 1e-12) {
            return Err(Error::BadParam("paired trajectories must share their time levels".into()));
        }
        let alphas = a.snapshots[0].zt_bar.grid().alphas();
        let markers_a = lagrangian_markers(&a, &alphas)?;
        let markers_b = lagrangian_markers(&b, &alphas)?;
        Ok(SolutionPair { a, b, markers_a, markers_b })
    }

    pub fn len(&self) -> usize {
        self.a.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.snapshots.is_empty()
    }

    /// The same pair with the roles of the two solutions exchanged.
    pub fn swapped(&self) -> SolutionPair {
        SolutionPair {
            a: self.b.clone(),
            b: self.a.clone(),
            markers_a: self.markers_b.clone(),
            markers_b: self.markers_a.clone(),
        }
    }
}

/// A marker map `h(α) = α + p(α)` with `p` periodic, and its Jacobian from `log h_α`.
struct MarkerMap {
    p: Vec<C64>,
    dp: Vec<C64>,
    log_jac: Vec<C64>,
}

impl MarkerMap {
    fn new(grid: &std::sync::Arc<crate::spectral::Grid>, h: &[f64], log_jac: &[f64]) -> Self {
        let alphas = grid.alphas();
        let p: Vec<f64> = h.iter().zip(&alphas).map(|(h, a)| h - a).collect();
        let pf = Field::from_real(grid.clone(), &p).expect("marker count matches grid");
        let lj = Field::from_real(grid.clone(), log_jac).expect("marker count matches grid");
        MarkerMap { p: pf.coeffs(), dp: pf.derivative().coeffs(), log_jac: lj.coeffs() }
    }

    fn eval(&self, a: f64) -> f64 {
        a + eval_series(&self.p, a, |_| 1.0).re
    }

    fn jac(&self, a: f64) -> f64 {
        eval_series(&self.log_jac, a, |_| 1.0).re.exp()
    }

    /// Solves `h(a) = x` by Newton's method.
    fn invert(&self, x: f64) -> f64 {
        let mut a = x - eval_series(&self.p, x, |_| 1.0).re;
        for _ in 0..50 {
            let f = self.eval(a) - x;
            let df = 1.0 + eval_series(&self.dp, a, |_| 1.0).re;
            let step = f / df;
            a -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        a
    }
}

/// `l = h̃∘h⁻¹` and `l_α′ = h̃_α/h_α` at `h⁻¹`, sampled on the α′ grid.
#[derive(Clone, Debug)]
pub struct LMap {
    pub l: Vec<f64>,
    pub l_alpha: Vec<f64>,
}

pub fn build_l(pair: &SolutionPair, idx: usize) -> LMap {
    let grid = pair.a.snapshots[idx].zt_bar.grid().clone();
    if pair.markers_a.h[idx] == pair.markers_b.h[idx] && pair.markers_a.log_jac[idx] == pair.markers_b.log_jac[idx] {
        return LMap { l: grid.alphas(), l_alpha: vec![1.0; grid.n()] };
    }
    let ha = MarkerMap::new(&grid, &pair.markers_a.h[idx], &pair.markers_a.log_jac[idx]);
    let hb = MarkerMap::new(&grid, &pair.markers_b.h[idx], &pair.markers_b.log_jac[idx]);
    let mut l = Vec::with_capacity(grid.n());
    let mut l_alpha = Vec::with_capacity(grid.n());
    for x in grid.alphas() {
        let a = ha.invert(x);
        l.push(hb.eval(a));
        l_alpha.push(hb.jac(a) / ha.jac(a));
    }
    LMap { l, l_alpha }
}

fn compose(f: &Field, l: &[f64]) -> Field {
    if l.iter().enumerate().all(|(j, x)| *x == f.grid().alpha(j)) {
        return f.clone();
    }
    Field::from_values(f.grid().clone(), f.eval_many(l)).expect("same grid")
}

/// Named norms on the left of the stability inequality at one time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct LhsNorms {
    pub zt_hhalf: f64,
    pub ztt_hhalf: f64,
    pub inv_za_hhalf: f64,
    pub l_alpha_l2: f64,
    pub dzt_l2: f64,
    pub a1_l2: f64,
    pub b_alpha_l2: f64,
}

impl LhsNorms {
    pub const NAMES: [&'static str; 7] =
        ["lhs_zt_hhalf", "lhs_ztt_hhalf", "lhs_inv_za_hhalf", "lhs_l_alpha_l2", "lhs_dzt_l2", "lhs_a1_l2", "lhs_b_alpha_l2"];

    pub fn as_array(&self) -> [f64; 7] {
        [self.zt_hhalf, self.ztt_hhalf, self.inv_za_hhalf, self.l_alpha_l2, self.dzt_l2, self.a1_l2, self.b_alpha_l2]
    }

    pub fn total(&self) -> f64 {
        self.as_array().iter().sum()
    }

    fn sup(&self, o: &LhsNorms) -> LhsNorms {
        let (a, b) = (self.as_array(), o.as_array());
        let m: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect();
        LhsNorms {
            zt_hhalf: m[0],
            ztt_hhalf: m[1],
            inv_za_hhalf: m[2],
            l_alpha_l2: m[3],
            dzt_l2: m[4],
            a1_l2: m[5],
            b_alpha_l2: m[6],
        }
    }
}

/// The initial-data bracket on the right of the stability inequality.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct RhsNorms {
    pub zt_hhalf: f64,
    pub ztt_hhalf: f64,
    pub inv_za_hhalf: f64,
    pub dzt_l2: f64,
    pub inv_za_linf: f64,
}

impl RhsNorms {
    pub fn total(&self) -> f64 {
        self.zt_hhalf + self.ztt_hhalf + self.inv_za_hhalf + self.dzt_l2 + self.inv_za_linf
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub t: f64,
    pub f0: f64,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub f: f64,
    pub m: f64,
    pub lhs: LhsNorms,
}

/// `ℱ = M𝔉₀ + 𝔉₁ + 𝔉₂ + 𝔉₃/M`.
pub fn assemble_f(m: f64, f0: f64, f1: f64, f2: f64, f3: f64) -> f64 {
    m * f0 + f1 + f2 + f3 / m
}

struct Side {
    s: WaterWaveState,
    d: DerivedQuantities,
}

impl Side {
    fn new(s: &WaterWaveState) -> Self {
        Side { s: s.clone(), d: DerivedQuantities::compute(s) }
    }

    /// `A₁(𝔞ₜ/𝔞∘h⁻¹ + conj(D Zₜ))`
    fn f3_field(&self) -> Field {
        self.d.a1.mul(&(&self.d.at_over_a + &self.d.dzt.conj()))
    }

    fn f2_field(&self) -> Field {
        &self.d.b_alpha - &self.d.dzt
    }
}

fn weighted(w: &[f64], f: &Field) -> f64 {
    let h = 2.0 * PI / f.n() as f64;
    f.values().iter().zip(w).map(|(v, w)| w * v.norm_sqr()).sum::<f64>() * h
}

pub fn functionals_f(pair: &SolutionPair, idx: usize, m: f64) -> StabilityReport {
    let lm = build_l(pair, idx);
    let sa = Side::new(&pair.a.snapshots[idx]);
    let sb = Side::new(&pair.b.snapshots[idx]);
    let grid = sa.s.zt_bar.grid().clone();
    let c = |f: &Field| compose(f, &lm.l);

    let a1_b_l = c(&sb.d.a1);
    let kappa_over_a1: Vec<f64> = (0..grid.n())
        .map(|j| {
            let a1 = sa.d.a1.values()[j].re;
            (a1 / a1_b_l.values()[j].re * lm.l_alpha[j]).sqrt() / a1
        })
        .collect();

    let l_alpha_m1 = Field::from_real(grid.clone(), &lm.l_alpha.iter().map(|x| x - 1.0).collect::<Vec<_>>()).expect("grid");
    let f0 = l_alpha_m1.l2_sq();

    let d_zt = &sa.s.zt_bar - &c(&sb.s.zt_bar);
    let d_a1 = &sa.d.a1 - &a1_b_l;
    let f1 = weighted(&kappa_over_a1, &d_a1) + d_zt.pairing_hhalf();

    let d_za = &sa.s.inv_za - &c(&sb.s.inv_za);
    let d_f2 = &sa.f2_field() - &c(&sb.f2_field());
    let f2 = weighted(&kappa_over_a1, &d_f2) + d_za.pairing_hhalf();

    let d_ztt = &sa.d.ztt_bar - &c(&sb.d.ztt_bar);
    let d_f3 = &sa.f3_field() - &c(&sb.f3_field());
    let f3 = weighted(&kappa_over_a1, &d_f3) + d_ztt.pairing_hhalf();

    let lhs = LhsNorms {
        zt_hhalf: d_zt.norm_hhalf(),
        ztt_hhalf: d_ztt.norm_hhalf(),
        inv_za_hhalf: d_za.norm_hhalf(),
        l_alpha_l2: f0.sqrt(),
        dzt_l2: (&sa.d.dzt - &c(&sb.d.dzt)).l2(),
        a1_l2: d_a1.l2(),
        b_alpha_l2: (&sa.d.b_alpha - &c(&sb.d.b_alpha)).l2(),
    };
    StabilityReport { t: sa.s.t, f0, f1, f2, f3, f: assemble_f(m, f0, f1, f2, f3), m, lhs }
}

/// Right-hand bracket from the initial data, where `l` is the identity.
pub fn rhs_norms(a: &WaterWaveState, b: &WaterWaveState) -> RhsNorms {
    let (da, db) = (DerivedQuantities::compute(a), DerivedQuantities::compute(b));
    let d_za = &a.inv_za - &b.inv_za;
    RhsNorms {
        zt_hhalf: (&a.zt_bar - &b.zt_bar).norm_hhalf(),
        ztt_hhalf: (&da.ztt_bar - &db.ztt_bar).norm_hhalf(),
        inv_za_hhalf: d_za.norm_hhalf(),
        dzt_l2: (&da.dzt - &db.dzt).l2(),
        inv_za_linf: d_za.linf(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilitySeries {
    pub rows: Vec<StabilityReport>,
    pub lhs_sup: LhsNorms,
    /// `sup` of the first three norms plus `sup` of the last four, as grouped in the inequality.
    pub lhs_total: f64,
    pub rhs: RhsNorms,
    pub rhs_total: f64,
    /// `lhs_total / rhs_total`, or 0 when both vanish.
    pub ratio: f64,
}

pub fn stability_report(pair: &SolutionPair, m: f64) -> StabilitySeries {
    let rows: Vec<StabilityReport> = (0..pair.len()).map(|i| functionals_f(pair, i, m)).collect();
    let lhs_sup = rows.iter().fold(LhsNorms::default(), |acc, r| acc.sup(&r.lhs));
    let lhs_total = lhs_sup.total();
    let rhs = rhs_norms(&pair.a.snapshots[0], &pair.b.snapshots[0]);
    let rhs_total = rhs.total();
    let ratio = if rhs_total > 0.0 { lhs_total / rhs_total } else if lhs_total == 0.0 { 0.0 } else { f64::INFINITY };
    StabilitySeries { rows, lhs_sup, lhs_total, rhs, rhs_total, ratio }
}

/// Smallest `M ≥ 0` with `M𝔉₀ + 𝔉₁ + 𝔉₂ ≥ 0` on every supplied report (0 if none constrains it).
pub fn search_m<'a>(reports: impl IntoIterator<Item = &'a StabilityReport>) -> f64 {
    reports
        .into_iter()
        .filter(|r| r.f0 > 0.0)
        .map(|r| -(r.f1 + r.f2) / r.f0)
        .fold(0.0, f64::max)
}
