//! JSON mirror of a study report
//!
//! Serializes the full [`StudyReport`](crate::StudyReport), including the
//! configuration echo and the complete solve report of every level, as
//! pretty-printed JSON with a trailing newline.

use std::io::{self, Write};

use crate::StudyReport;

pub fn write_json(report: &StudyReport, out: &mut dyn Write) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, report).map_err(io::Error::from)?;
    writeln!(out)
}

pub fn json_string(report: &StudyReport) -> String {
    let mut buf = Vec::new();
    write_json(report, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("JSON output is UTF-8")
}
