use std::path::Path;

use super::run::{RunReport, REPORT_FILE};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryOutput {
    pub table: String,
    pub json: String,
}

const MISSING: &str = "n/a";

/// Aligned text table (one row per report, one column per metric name) and
/// its JSON twin, which is the full serialized report list.
pub fn emit_summary(reports: &[RunReport]) -> Result<SummaryOutput> {
    if reports.is_empty() {
        return Err(Error::arg("nothing to summarize"));
    }
    let mut columns: Vec<&str> = Vec::new();
    for r in reports {
        for m in &r.metrics {
            if !columns.contains(&m.name.as_str()) {
                columns.push(&m.name);
            }
        }
    }
    if columns.is_empty() {
        columns.push("metrics");
    }

    let mut rows: Vec<Vec<String>> = vec![["name", "kind"]
        .iter()
        .chain(columns.iter())
        .map(|s| s.to_string())
        .collect()];
    for r in reports {
        let values = r.metric_map();
        let mut row = vec![r.manifest.name.clone(), r.manifest.kind.to_string()];
        row.extend(columns.iter().map(|c| {
            values
                .get(c)
                .map_or_else(|| MISSING.to_string(), |v| v.to_string())
        }));
        rows.push(row);
    }

    let widths: Vec<usize> = (0..rows[0].len())
        .map(|i| rows.iter().map(|r| r[i].chars().count()).max().unwrap_or(0))
        .collect();
    let mut table = String::new();
    for row in &rows {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| format!("{cell:<w$}"))
            .collect();
        table.push_str(line.join("  ").trim_end());
        table.push('\n');
    }
    let mut json = serde_json::to_string_pretty(reports)?;
    json.push('\n');
    Ok(SummaryOutput { table, json })
}

/// Every `report.json` found in `dir` or its immediate subdirectories, sorted by path.
pub fn load_reports(dir: &Path) -> Result<Vec<RunReport>> {
    let mut paths = Vec::new();
    let direct = dir.join(REPORT_FILE);
    if direct.is_file() {
        paths.push(direct);
    }
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let candidate = entry.path().join(REPORT_FILE);
        if entry.path().is_dir() && candidate.is_file() {
            paths.push(candidate);
        }
    }
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            Ok(serde_json::from_str(&text)?)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;
    use std::time::Duration;

    use super::*;
    use crate::report::{ExperimentKind, ExperimentManifest, Metric, MetricValue};

    fn report(name: &str, metrics: Vec<Metric>) -> RunReport {
        RunReport {
            manifest: ExperimentManifest {
                name: name.into(),
                kind: ExperimentKind::SingularAvg,
                out_dir: "out".into(),
                params: BTreeMap::new(),
            },
            input_hash: "00".into(),
            metrics,
            artifacts: vec![],
            duration: Duration::ZERO,
        }
    }

    #[test]
    fn one_row_per_report() {
        let r = report(
            "a",
            vec![Metric {
                name: "normalized".into(),
                value: MetricValue::Real(0.5),
            }],
        );
        let s = emit_summary(&[r]).unwrap();
        assert_eq!(s.table.lines().count(), 2);
        assert!(s.table.contains("0.500000"));
        let back: Vec<RunReport> = serde_json::from_str(&s.json).unwrap();
        assert_eq!(back[0].metrics[0].value, MetricValue::Real(0.5));
    }

    #[test]
    fn missing_metrics_are_marked() {
        let full = report(
            "a",
            vec![Metric {
                name: "pairs".into(),
                value: MetricValue::Int(3),
            }],
        );
        let empty = report("b", vec![]);
        let s = emit_summary(&[full, empty.clone()]).unwrap();
        assert!(s.table.lines().nth(2).unwrap().ends_with("n/a"));
        let alone = emit_summary(&[empty]).unwrap();
        assert!(alone.table.lines().nth(1).unwrap().ends_with("n/a"));
        assert!(emit_summary(&[]).is_err());
    }
}
