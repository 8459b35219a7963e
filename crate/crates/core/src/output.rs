//! CSV and JSON artifacts.

use std::io::Write;
use std::path::Path;

use crate::energy::EnergyReport;
use crate::error::{Error, Result};
use crate::evolution::DispersionResult;
use crate::halfplane::PointFields;
use crate::mollify::StudyReport;
use crate::stability::{LhsNorms, StabilitySeries};

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Output { path: path.to_path_buf(), msg: format!("{other:?}") },
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}

/// Writes `header` and `rows` as CSV to `w`.
fn write_rows<W: Write>(w: W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for r in rows {
        out.write_record(&r)?;
    }
    out.flush()?;
    Ok(())
}

fn to_file(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_rows(f, header, rows).map_err(|e| csv_err(path, e))
}

pub const ENERGY_HEADER: [&str; 11] =
    ["t", "frak_e", "curly_E", "Ea", "Eb", "E2", "E3", "taylor_min", "chord_arc", "defect_zt", "defect_za"];

pub fn energy_row(r: &EnergyReport) -> Vec<String> {
    [r.t, r.frak_e, r.curly_e, r.ea, r.eb, r.e2, r.e3, r.taylor_min, r.chord_arc, r.defects.zt, r.defects.za]
        .into_iter()
        .map(fmt)
        .collect()
}

pub fn write_energy_csv(path: &Path, reports: &[EnergyReport]) -> Result<()> {
    to_file(path, &ENERGY_HEADER, reports.iter().map(energy_row))
}

pub fn comparison_header() -> Vec<&'static str> {
    let mut h = vec!["t", "F0", "F1", "F2", "F3", "F"];
    h.extend(LhsNorms::NAMES);
    h.extend(["rhs", "ratio"]);
    h
}

pub fn write_comparison_csv(path: &Path, s: &StabilitySeries) -> Result<()> {
    let rows = s.rows.iter().map(|r| {
        let lhs = r.lhs.total();
        let ratio = if s.rhs_total > 0.0 { lhs / s.rhs_total } else if lhs == 0.0 { 0.0 } else { f64::INFINITY };
        let mut v: Vec<f64> = vec![r.t, r.f0, r.f1, r.f2, r.f3, r.f];
        v.extend(r.lhs.as_array());
        v.extend([s.rhs_total, ratio]);
        v.into_iter().map(fmt).collect()
    });
    to_file(path, &comparison_header(), rows)
}

pub const FIELDS_HEADER: [&str; 8] = ["x", "y", "re_psi", "im_psi", "re_u", "im_u", "pressure", "residual"];

pub fn write_fields_csv(path: &Path, rows: &[Vec<(f64, f64, PointFields)>]) -> Result<()> {
    let it = rows.iter().flatten().map(|(x, y, p)| {
        [*x, *y, p.psi.re, p.psi.im, p.u.re, p.u.im, p.pressure, p.residual].into_iter().map(fmt).collect()
    });
    to_file(path, &FIELDS_HEADER, it)
}

pub fn write_dispersion_csv(path: &Path, rows: &[DispersionResult]) -> Result<()> {
    let it = rows.iter().map(|r| {
        vec![r.k.to_string(), fmt(r.omega), fmt((r.k as f64).sqrt()), fmt(r.rel_err)]
    });
    to_file(path, &["k", "omega", "sqrt_k", "rel_err"], it)
}

pub fn study_header() -> Vec<&'static str> {
    let mut h = vec!["kind", "eps_a", "eps_b"];
    h.extend(LhsNorms::NAMES);
    h.extend(["lhs_total", "rhs", "ratio"]);
    h
}

pub fn write_study(csv_path: &Path, json_path: &Path, r: &StudyReport) -> Result<()> {
    let rows = r.rows.iter().map(|row| {
        let mut v = vec![row.kind.to_string(), fmt(row.eps_a), fmt(row.eps_b)];
        v.extend(row.lhs.as_array().into_iter().map(fmt));
        v.extend([fmt(row.lhs_total), fmt(row.rhs_total), fmt(row.ratio)]);
        v
    });
    to_file(csv_path, &study_header(), rows)?;
    write_json(json_path, r)
}

pub fn write_json<T: serde::Serialize>(path: &Path, v: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(v)
        .map_err(|e| Error::Output { path: path.to_path_buf(), msg: e.to_string() })?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::ConstraintDefects;

    #[test]
    fn energy_row_width() {
        let r = EnergyReport {
            t: 0.0,
            frak_e: 1.0,
            curly_e: 1.0,
            ea: 0.0,
            eb: 0.0,
            e2: 0.0,
            e3: 0.0,
            taylor_min: 0.0,
            chord_arc: 1.0,
            defects: ConstraintDefects::default(),
        };
        let mut buf = Vec::new();
        write_rows(&mut buf, &ENERGY_HEADER, [energy_row(&r)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], ENERGY_HEADER.join(","));
        assert_eq!(lines[1].split(',').count(), 11);
    }
}
