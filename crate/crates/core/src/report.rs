//! CSV tables and `key = value` summary documents. Numbers use Rust's
//! shortest round-trip formatting, so identical results give identical
//! bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::basins::{BasinScanResult, CellData, ObservabilityReport, ScanKind};
use crate::dynamics::{Orbit, StateSpace};
use crate::error::{Error, Result};
use crate::measures::EmpiricalMeasure;
use crate::potentials::GrowthRateReport;

/// Ordered `key = value` pairs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Summary {
    entries: Vec<(String, String)>,
}

impl Summary {
    pub fn new() -> Self {
        Summary::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn extend<'a>(
        &mut self,
        pairs: impl IntoIterator<Item = &'a (String, String)>,
    ) -> &mut Self {
        self.entries.extend(pairs.into_iter().cloned());
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {}", v.replace('\n', " "));
        }
        out
    }
}

/// A CSV table with a header row.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn render(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// The table folded into a summary document: a `columns` line followed
    /// by one `row` line per record.
    pub fn append_to(&self, summary: &mut Summary) {
        summary.push("columns", self.columns.join(","));
        for row in &self.rows {
            summary.push("row", row.join(","));
        }
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn coord_columns(space: StateSpace) -> Vec<String> {
    space.coordinate_names()
}

pub fn growth_table(r: &GrowthRateReport) -> Table {
    Table {
        columns: vec!["n".into(), "rate".into()],
        rows: r
            .series
            .iter()
            .map(|(n, rate)| vec![n.to_string(), num(*rate)])
            .collect(),
    }
}

/// Summary keys: `largest_rate`, `smallest_rate`, `optimal`, `base`,
/// `horizon`, `tail_window`, followed by `params`.
pub fn growth_summary(r: &GrowthRateReport, params: &[(String, String)]) -> Summary {
    let mut s = Summary::new();
    s.push("largest_rate", num(r.largest_rate))
        .push("smallest_rate", num(r.smallest_rate))
        .push("optimal", r.optimal)
        .push("base", r.base)
        .push("horizon", r.horizon)
        .push(
            "tail_window",
            format!("[{}, {}]", r.tail_window.0, r.tail_window.1),
        )
        .extend(params);
    s
}

/// Columns: coordinates, `verdict`, then `largest_rate,smallest_rate`
/// (growth scans), `min_distance,max_distance,spread` (basin scans) or
/// `visit_fraction` (Milnor scans). Failed cells leave the numbers empty.
pub fn scan_table(r: &BasinScanResult, space: StateSpace) -> Table {
    let mut columns = coord_columns(space);
    let extra: &[&str] = match r.kind {
        ScanKind::Growth => &["largest_rate", "smallest_rate"],
        ScanKind::Basin => &["min_distance", "max_distance", "spread"],
        ScanKind::Milnor => &["visit_fraction"],
    };
    columns.push("verdict".into());
    columns.extend(extra.iter().map(|s| s.to_string()));
    let rows = r
        .cells
        .iter()
        .map(|c| {
            let mut row: Vec<String> = c.center.coords().iter().map(|v| num(*v)).collect();
            row.push(c.verdict.name().into());
            match &c.data {
                CellData::Growth { largest, smallest } => {
                    row.extend([num(*largest), num(*smallest)])
                }
                CellData::Distances { min, max, spread } => {
                    row.extend([num(*min), num(*max), num(*spread)])
                }
                CellData::VisitFrequency(v) => row.push(num(*v)),
                CellData::Failed(_) => row.extend(extra.iter().map(|_| String::new())),
            }
            row
        })
        .collect();
    Table { columns, rows }
}

/// Growth scans: `fraction_optimal`, `fraction_smallest_negative`, `cells`,
/// `errors`, `indeterminate`, `mean_largest_rate`. Basin and Milnor scans:
/// `fraction`, `cells`, `true`, `errors`, `indeterminate`. Then the grid,
/// the scan's parameter echo and `params`.
pub fn scan_summary(r: &BasinScanResult, params: &[(String, String)]) -> Summary {
    let mut s = Summary::new();
    match r.kind {
        ScanKind::Growth => {
            s.push("fraction_optimal", num(r.fraction()))
                .push(
                    "fraction_smallest_negative",
                    num(r.fraction_smallest_negative()),
                )
                .push("cells", r.cells.len())
                .push("errors", r.errors())
                .push("indeterminate", r.indeterminate())
                .push(
                    "mean_largest_rate",
                    r.mean_largest_rate().map_or(String::new(), num),
                );
        }
        ScanKind::Basin | ScanKind::Milnor => {
            s.push("fraction", num(r.fraction()))
                .push("cells", r.cells.len())
                .push("true", r.count(crate::basins::Verdict::True))
                .push("errors", r.errors())
                .push("indeterminate", r.indeterminate());
        }
    }
    s.extend(&r.params).extend(params);
    s
}

pub fn observability_table(r: &ObservabilityReport) -> Table {
    Table {
        columns: [
            "epsilon",
            "weak_fraction",
            "strong_fraction",
            "indeterminate",
        ]
        .map(String::from)
        .to_vec(),
        rows: r
            .rows
            .iter()
            .map(|row| {
                vec![
                    num(row.epsilon),
                    num(row.weak_fraction),
                    num(row.strong_fraction),
                    row.indeterminate.to_string(),
                ]
            })
            .collect(),
    }
}

pub fn observability_summary(r: &ObservabilityReport, params: &[(String, String)]) -> Summary {
    let mut s = Summary::new();
    s.push("observable", r.observable)
        .push("strongly_observable", r.strongly_observable)
        .push("cells", r.cells)
        .push("errors", r.errors)
        .push("cluster_tol", num(r.cluster_tol))
        .extend(params);
    s
}

/// Columns `n`, coordinates.
pub fn orbit_table(orbit: &Orbit, space: StateSpace) -> Table {
    let mut columns = vec!["n".to_string()];
    columns.extend(coord_columns(space));
    Table {
        columns,
        rows: orbit
            .points()
            .iter()
            .enumerate()
            .map(|(j, p)| {
                std::iter::once(j.to_string())
                    .chain(p.coords().iter().map(|v| num(*v)))
                    .collect()
            })
            .collect(),
    }
}

/// Columns: coordinates, `weight`; one row per distinct atom.
pub fn empirical_table(m: &EmpiricalMeasure, space: StateSpace) -> Table {
    let mut columns = coord_columns(space);
    columns.push("weight".into());
    let measure = m.to_measure();
    Table {
        columns,
        rows: measure
            .atoms()
            .unwrap_or(&[])
            .iter()
            .map(|(p, w)| {
                p.coords()
                    .iter()
                    .map(|v| num(*v))
                    .chain(std::iter::once(num(*w)))
                    .collect()
            })
            .collect(),
    }
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    fs::write(path, contents).map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basins::{optimal_point_scan, Grid};
    use crate::dynamics::{DynamicalSystem, Point};
    use crate::potentials::{growth_report, MatrixFamily, Observable, SubadditivePotential};
    use crate::schedule::default_schedule;

    #[test]
    fn growth_schema() {
        let f = DynamicalSystem::doubling();
        let phi = SubadditivePotential::birkhoff(Observable::constant(1.0));
        let r = growth_report(&phi, &f, Point::scalar(0.3), 200, &default_schedule(200)).unwrap();
        let csv = growth_table(&r).render();
        assert!(csv.starts_with("n,rate\n100,1\n140,1\n196,1\n200,1\n"));
        let doc = growth_summary(&r, &[("seed".into(), "42".into())]).render();
        let keys: Vec<&str> = doc
            .lines()
            .map(|l| l.split(" = ").next().unwrap())
            .collect();
        assert_eq!(keys[..3], ["largest_rate", "smallest_rate", "optimal"]);
        assert!(doc.ends_with("seed = 42\n"));
        assert!(doc.contains("base = 0.3\n"));
    }

    #[test]
    fn scan_schema() {
        let f = DynamicalSystem::doubling();
        let grid = Grid::uniform(f.space(), 4).unwrap();
        let phi = SubadditivePotential::cocycle(MatrixFamily::diag_half());
        let r = optimal_point_scan(&f, &phi, &grid, &default_schedule(300), 1).unwrap();
        let csv = scan_table(&r, f.space()).render();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x1,verdict,largest_rate,smallest_rate"));
        assert!(lines
            .next()
            .unwrap()
            .starts_with("0.125,true,-0.69314718055994"));
        let doc = scan_summary(&r, &[]).render();
        let keys: Vec<&str> = doc
            .lines()
            .take(5)
            .map(|l| l.split(" = ").next().unwrap())
            .collect();
        assert_eq!(
            keys,
            [
                "fraction_optimal",
                "fraction_smallest_negative",
                "cells",
                "errors",
                "indeterminate"
            ]
        );
    }

    #[test]
    fn write_creates_directories() {
        let dir = std::env::temp_dir().join(format!("optstate-report-{}", std::process::id()));
        let path = dir.join("a/b/out.txt");
        write_file(&path, "x = 1\n").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "x = 1\n");
        fs::remove_dir_all(&dir).unwrap();
    }
}
