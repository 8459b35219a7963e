#![allow(dead_code)]

use proptest::prelude::*;
use waterwave::spectral::{grid, Field, C64};

/// Field on `n` points with coefficients on `1 <= |k| <= band` drawn from the given values.
pub fn band_field(n: usize, holo: &[(f64, f64)], anti: &[(f64, f64)]) -> Field {
    let mut modes = Vec::new();
    for (i, (re, im)) in holo.iter().enumerate() {
        modes.push((-(i as i64) - 1, C64::new(*re, *im)));
    }
    for (i, (re, im)) in anti.iter().enumerate() {
        modes.push((i as i64 + 1, C64::new(*re, *im)));
    }
    Field::from_modes(grid(n).unwrap(), &modes)
}

pub fn coeffs(band: usize, amp: f64) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-amp..amp, -amp..amp), band)
}

/// Mean-zero holomorphic field (`k < 0` only).
pub fn holo(n: usize, band: usize, amp: f64) -> impl Strategy<Value = Field> {
    coeffs(band, amp).prop_map(move |c| band_field(n, &c, &[]))
}

/// Field with both sectors populated.
pub fn mixed(n: usize, band: usize, amp: f64) -> impl Strategy<Value = Field> {
    (coeffs(band, amp), coeffs(band, amp)).prop_map(move |(a, b)| band_field(n, &a, &b))
}
