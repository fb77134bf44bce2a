//! Machine-readable verification reports.
//!
//! Every check a suite runs produces one [`ReportRow`]; a run is a stream of
//! rows followed by one [`Summary`].  The on-disk format is JSON lines: one
//! row object per line, then a single `{"summary": ...}` object, so reports
//! are streamable, diffable, and parseable without a schema registry.
//!
//! Determinism contract: for a fixed configuration and seed, every field of
//! every row is reproduced exactly on rerun *except* `runtime_ms`.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::params::ModelParams;

/// Which way a row's comparison points.
///
/// Almost every check is an upper bound (a residual that must stay below
/// tolerance); negative controls are lower bounds (a deliberately detuned
/// quantity that must stay *above* a floor, proving the matching zero check
/// could have failed).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// Pass iff `residual < tolerance`.
    Upper,
    /// Pass iff `residual > tolerance` (negative control).
    Lower,
}

/// One executed check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    /// Hierarchical check name, e.g. `"ybe-vertex/twisted/03"`.
    pub check_id: String,
    /// Color count of the model the check ran against.
    pub n: usize,
    /// Elliptic level.
    pub r: f64,
    /// Nome.
    pub x: f64,
    /// Master seed of the run this row belongs to.
    pub seed: u64,
    /// Measured value (a residual or, for controls, a magnitude).
    /// Infinite when the check errored instead of evaluating.
    pub residual: f64,
    /// Threshold the value is compared against.
    pub tolerance: f64,
    /// Direction of that comparison.
    pub bound: Bound,
    /// Whether the comparison succeeded.
    pub pass: bool,
    /// Wall-clock time of this check.  Excluded from the determinism
    /// contract.
    pub runtime_ms: f64,
    /// Evaluation error, if the check could not produce a value (recorded,
    /// never propagated — an errored check is a failed row).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl ReportRow {
    /// Build a row from a check outcome, stamping parameters and pass/fail.
    pub fn new(
        check_id: impl Into<String>,
        params: &ModelParams,
        seed: u64,
        outcome: Result<f64, crate::error::Error>,
        tolerance: f64,
        bound: Bound,
        runtime_ms: f64,
    ) -> Self {
        let (residual, error) = match outcome {
            Ok(v) => (v, None),
            Err(e) => (f64::INFINITY, Some(e.to_string())),
        };
        let pass = error.is_none()
            && match bound {
                Bound::Upper => residual < tolerance,
                Bound::Lower => residual > tolerance,
            };
        ReportRow {
            check_id: check_id.into(),
            n: params.n,
            r: params.r,
            x: params.x(),
            seed,
            residual,
            tolerance,
            bound,
            pass,
            runtime_ms,
            error,
        }
    }
}

/// Aggregate of one run, written as the trailing line of a report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    /// Total rows.
    pub rows: usize,
    /// Rows that passed.
    pub passed: usize,
    /// Rows that failed.
    pub failed: usize,
    /// Largest residual among upper-bound rows (controls excluded — they are
    /// large by design).
    pub worst_residual: f64,
    /// Check id attaining `worst_residual`.
    pub worst_check: String,
}

/// Summarize a slice of rows.
pub fn summarize(rows: &[ReportRow]) -> Summary {
    let passed = rows.iter().filter(|r| r.pass).count();
    let mut worst_residual = 0.0_f64;
    let mut worst_check = String::new();
    for row in rows {
        if row.bound == Bound::Upper && row.residual > worst_residual {
            worst_residual = row.residual;
            worst_check = row.check_id.clone();
        }
    }
    Summary {
        rows: rows.len(),
        passed,
        failed: rows.len() - passed,
        worst_residual,
        worst_check,
    }
}

/// Write rows plus summary in JSON-lines form.
pub fn write_jsonl<W: Write>(mut out: W, rows: &[ReportRow]) -> io::Result<()> {
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        out.write_all(b"\n")?;
    }
    #[derive(Serialize)]
    struct Trailer<'a> {
        summary: &'a Summary,
    }
    serde_json::to_writer(
        &mut out,
        &Trailer {
            summary: &summarize(rows),
        },
    )?;
    out.write_all(b"\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk() -> ModelParams {
        ModelParams::from_x(2, 5.5, 0.3).unwrap()
    }

    #[test]
    fn rows_compare_in_the_stated_direction() {
        let p = desk();
        let ok = ReportRow::new("a", &p, 1, Ok(1e-12), 1e-10, Bound::Upper, 0.1);
        assert!(ok.pass);
        let fail = ReportRow::new("b", &p, 1, Ok(1e-8), 1e-10, Bound::Upper, 0.1);
        assert!(!fail.pass);
        let control = ReportRow::new("c", &p, 1, Ok(0.5), 1e-3, Bound::Lower, 0.1);
        assert!(control.pass);
        let dead_control = ReportRow::new("d", &p, 1, Ok(1e-9), 1e-3, Bound::Lower, 0.1);
        assert!(!dead_control.pass);
    }

    #[test]
    fn errored_checks_become_failed_rows() {
        let p = desk();
        let row = ReportRow::new(
            "e",
            &p,
            1,
            Err(crate::error::Error::domain("boom")),
            1e-10,
            Bound::Upper,
            0.1,
        );
        assert!(!row.pass);
        assert!(row.residual.is_infinite());
        assert_eq!(row.error.as_deref(), Some("domain error: boom"));
    }

    #[test]
    fn summary_tracks_worst_upper_bound_row() {
        let p = desk();
        let rows = vec![
            ReportRow::new("small", &p, 1, Ok(1e-14), 1e-10, Bound::Upper, 0.0),
            ReportRow::new("big", &p, 1, Ok(3e-11), 1e-10, Bound::Upper, 0.0),
            ReportRow::new("control", &p, 1, Ok(7.0), 1e-3, Bound::Lower, 0.0),
        ];
        let s = summarize(&rows);
        assert_eq!((s.rows, s.passed, s.failed), (3, 3, 0));
        assert_eq!(s.worst_check, "big");
        assert!((s.worst_residual - 3e-11).abs() < 1e-26);
    }

    #[test]
    fn jsonl_round_trips_and_ends_with_summary() {
        let p = desk();
        let rows = vec![
            ReportRow::new("x/y/0", &p, 42, Ok(1e-13), 1e-9, Bound::Upper, 1.5),
            ReportRow::new(
                "x/err",
                &p,
                42,
                Err(crate::error::Error::domain("pole")),
                1e-9,
                Bound::Upper,
                0.2,
            ),
        ];
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        let first: ReportRow = serde_json::from_str(lines[0]).unwrap();
        assert_eq!(first.check_id, "x/y/0");
        assert!(first.pass);
        // The errored row serializes its message and a null residual (JSON
        // has no Infinity); the pass flag carries the verdict.
        assert!(lines[1].contains("\"error\":\"domain error: pole\""));
        assert!(lines[1].contains("\"pass\":false"));
        assert!(lines[2].starts_with("{\"summary\""));
    }
}
