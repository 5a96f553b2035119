//! Flat CSV table of a study, one row per level
//!
//! Schema: `level,n,h,n_dofs,iterations,err_l2_rel,err_h1_rel,
//! contact_residual,eoc_l2,eoc_h1,eoc_residual`. Orders compare a row with
//! the previous one, so the order cells of the first row are empty, as is any
//! cell whose rate is undefined. Floats are printed with 15 fractional
//! digits in scientific notation, making the output byte-deterministic.

use std::io::{self, Write};

use crate::StudyReport;

pub const CSV_HEADER: &str =
    "level,n,h,n_dofs,iterations,err_l2_rel,err_h1_rel,contact_residual,eoc_l2,eoc_h1,eoc_residual";

fn float(x: f64) -> String {
    format!("{x:.15e}")
}

fn rate_cell(rates: &[Option<f64>], row: usize) -> String {
    if row == 0 {
        String::new()
    } else {
        rates[row - 1].map(float).unwrap_or_default()
    }
}

pub fn write_csv(report: &StudyReport, out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for (row, rec) in report.levels.iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            rec.level,
            rec.n,
            float(rec.h),
            rec.n_dofs,
            rec.solve.iterations,
            float(rec.err_l2_rel),
            float(rec.err_h1_rel),
            float(rec.contact_residual),
            rate_cell(&report.eoc_l2, row),
            rate_cell(&report.eoc_h1, row),
            rate_cell(&report.eoc_residual, row),
        )?;
    }
    Ok(())
}

pub fn csv_string(report: &StudyReport) -> String {
    let mut buf = Vec::new();
    write_csv(report, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}
