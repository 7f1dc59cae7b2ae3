//! File and report formats.
//!
//! Count matrices as CSV: one line per input class `X`, each holding the
//! comma-separated counts for output classes `Y = 0..dim`, no row label.
//! An optional header line `y0,y1,...` precedes the data. The JSON form is
//! an array of row arrays.

use std::io::{BufRead, Write};

use aes_eqclass::keyschedule_classes::ScheduleAudit;
use aes_eqclass::sbox_distribution::{CountsMatrix, CountsStats};
use serde::{Deserialize, Serialize};

use crate::hexblock::format_block;
use crate::CliError;

pub fn write_counts_csv(w: &mut impl Write, m: &CountsMatrix, header: bool) -> std::io::Result<()> {
    if header {
        let names: Vec<String> = (0..m.dim()).map(|y| format!("y{y}")).collect();
        writeln!(w, "{}", names.join(","))?;
    }
    let mut line = String::new();
    for row in m.rows() {
        line.clear();
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&v.to_string());
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Read a matrix written by [`write_counts_csv`]; a header line is skipped.
pub fn read_counts_csv(r: impl BufRead) -> Result<CountsMatrix, CliError> {
    let mut cells = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || (n == 0 && line.starts_with('y')) {
            continue;
        }
        for field in line.split(',') {
            let v = field
                .trim()
                .parse::<u64>()
                .map_err(|e| CliError::Usage(format!("line {}: {e}", n + 1)))?;
            cells.push(v);
        }
    }
    Ok(CountsMatrix::from_cells(cells)?)
}

pub fn write_counts_json(w: &mut impl Write, m: &CountsMatrix) -> Result<(), CliError> {
    let rows: Vec<&[u64]> = m.rows().collect();
    serde_json::to_writer(&mut *w, &rows)?;
    writeln!(w)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowStatsJson {
    pub row: usize,
    pub max: u64,
    pub argmax: usize,
    pub min: u64,
    pub argmin: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalStatsJson {
    pub total: u64,
    pub expected_cell: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsJson {
    pub rows: Vec<RowStatsJson>,
    pub global: GlobalStatsJson,
}

impl From<&CountsStats> for StatsJson {
    fn from(s: &CountsStats) -> Self {
        StatsJson {
            rows: s
                .rows
                .iter()
                .map(|r| RowStatsJson {
                    row: r.row,
                    max: r.max,
                    argmax: r.argmax,
                    min: r.min,
                    argmin: r.argmin,
                })
                .collect(),
            global: GlobalStatsJson {
                total: s.total,
                expected_cell: s.expected_cell,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionJson {
    /// Source round; the check covers `round -> round + 1`.
    pub round: usize,
    pub predicted: [String; 4],
    pub actual: [String; 4],
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditJson {
    pub key: String,
    pub transitions: Vec<TransitionJson>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReportJson {
    pub audits: Vec<AuditJson>,
    pub all_pass: bool,
}

impl From<&ScheduleAudit> for AuditJson {
    fn from(a: &ScheduleAudit) -> Self {
        let hex4 = |v: [aes_eqclass::GfByte; 4]| v.map(|b| format!("{:02x}", b.value()));
        AuditJson {
            key: format_block(&a.key),
            transitions: a
                .transitions
                .iter()
                .map(|t| TransitionJson {
                    round: t.round,
                    predicted: hex4(t.predicted),
                    actual: hex4(t.actual),
                    pass: t.pass(),
                })
                .collect(),
            pass: a.pass(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use aes_eqclass::keyschedule_classes::audit_schedule_classes;
    use aes_eqclass::sbox_distribution::{compute_counts_fast, counts_stats, Sbox};

    #[test]
    fn csv_round_trip() {
        let m = compute_counts_fast(&Sbox::identity(4).unwrap()).unwrap();
        for header in [false, true] {
            let mut buf = Vec::new();
            write_counts_csv(&mut buf, &m, header).unwrap();
            let text = String::from_utf8(buf.clone()).unwrap();
            assert_eq!(text.lines().count(), 16 + header as usize);
            assert_eq!(read_counts_csv(&buf[..]).unwrap(), m);
        }
    }

    #[test]
    fn csv_shape_for_bytes() {
        let m = compute_counts_fast(&Sbox::aes()).unwrap();
        let mut buf = Vec::new();
        write_counts_csv(&mut buf, &m, false).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 256);
        assert!(lines.iter().all(|l| l.split(',').count() == 256));
        assert!(lines[0].starts_with("198136,"));
    }

    #[test]
    fn stats_json_shape() {
        let m = compute_counts_fast(&Sbox::aes()).unwrap();
        let j = serde_json::to_value(StatsJson::from(&counts_stats(&m))).unwrap();
        assert_eq!(j["global"]["total"], 1u64 << 32);
        assert_eq!(j["global"]["expected_cell"], 65536);
        assert_eq!(j["rows"][0]["max"], 198136);
        assert_eq!(j["rows"][0]["argmax"], 0);
        assert_eq!(j["rows"].as_array().unwrap().len(), 256);
    }

    #[test]
    fn audit_json_shape() {
        let a = AuditJson::from(&audit_schedule_classes(&[0; 16]));
        let j = serde_json::to_value(&a).unwrap();
        assert_eq!(j["transitions"][0]["round"], 0);
        assert_eq!(
            j["transitions"][0]["predicted"],
            serde_json::json!(["01", "01", "01", "01"])
        );
        assert_eq!(j["transitions"][0]["pass"], true);
        assert_eq!(j["pass"], true);
    }
}
