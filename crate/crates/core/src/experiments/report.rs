//! CSV report rows.
//!
//! Header: `scenario,epsilon,h,dt,t,quantity,value`. Values use Rust's
//! shortest round-trip formatting; infinities are written as `inf`. Limit
//! rows carry `epsilon = 0`.
//!
//! Row order: the `epsilon = 0` block first, then the sweep in its given
//! order; inside a block rows are sorted by time, then by quantity name.
//!
//! Row counts, with `S` snapshot times (including `T`), `R` references and
//! `n` sweep points:
//!
//! * flow: `R (S + 1) + n (S (3 + R) + 4 + R)`
//! * reilly: `6 n · #refinements`
//! * gamma: `2 + 5 n`

use std::io::Write;
use std::path::Path;

use super::{Mode, Scenario};
use crate::error::Result;

pub const HEADER: [&str; 7] = ["scenario", "epsilon", "h", "dt", "t", "quantity", "value"];

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scenario: String,
    pub epsilon: f64,
    pub h: f64,
    pub dt: f64,
    pub t: f64,
    pub quantity: String,
    pub value: f64,
}

pub(crate) fn format_value(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v}")
    }
}

impl ReportRow {
    fn record(&self) -> [String; 7] {
        [
            self.scenario.clone(),
            format_value(self.epsilon),
            format_value(self.h),
            format_value(self.dt),
            format_value(self.t),
            self.quantity.clone(),
            format_value(self.value),
        ]
    }
}

/// Sorts one block (fixed epsilon) by time, then quantity name.
pub(crate) fn sort_block(rows: &mut [ReportRow]) {
    rows.sort_by(|a, b| {
        a.t.total_cmp(&b.t)
            .then_with(|| a.quantity.cmp(&b.quantity))
    });
}

/// Number of rows [`super::run_scenario`] produces.
pub fn expected_row_count(s: &Scenario) -> usize {
    let n = s.sweep.len();
    match s.mode {
        Mode::Flow => {
            let snaps = s.snapshot_times().len();
            let r = s.references.len();
            r * (snaps + 1) + n * (snaps * (3 + r) + 4 + r)
        }
        Mode::Reilly => 6 * n * s.refinements.len(),
        Mode::Gamma => 2 + 5 * n,
    }
}

pub fn write_rows<W: Write>(rows: &[ReportRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(rows: &[ReportRow], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_rows(rows, std::io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_is_spelled_out() {
        let row = ReportRow {
            scenario: "s".into(),
            epsilon: 0.1,
            h: 0.0025,
            dt: 1e-3,
            t: 0.25,
            quantity: "q".into(),
            value: f64::INFINITY,
        };
        let mut buf = Vec::new();
        write_rows(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "scenario,epsilon,h,dt,t,quantity,value\ns,0.1,0.0025,0.001,0.25,q,inf\n"
        );
    }
}
