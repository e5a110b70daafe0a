//! A small runner for checks that close over extra data (a base, a warp),
//! unlike the registry, whose evaluators see only the total space.

use serde::{Deserialize, Serialize};

use crate::almost_contact::AlmostContactStructure;
use crate::chart_geometry::{FdConfig, TolClass};
use crate::error::Result;
use crate::exec::Execution;
use crate::harmonicity::point::PointData;
use crate::harmonicity::registry::{CheckStats, Sides};

pub(crate) type RowEval<'a> = Box<dyn Fn(&PointData) -> Sides + Send + Sync + 'a>;

pub(crate) struct SuiteRow<'a> {
    pub id: &'static str,
    pub statement: &'static str,
    pub tolerance: TolClass,
    pub applicable: bool,
    pub eval: RowEval<'a>,
}

impl<'a> SuiteRow<'a> {
    pub fn new(
        id: &'static str,
        statement: &'static str,
        tolerance: TolClass,
        eval: impl Fn(&PointData) -> Sides + Send + Sync + 'a,
    ) -> Self {
        SuiteRow { id, statement, tolerance, applicable: true, eval: Box::new(eval) }
    }

    pub fn when(mut self, applicable: bool) -> Self {
        self.applicable = applicable;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub statement: String,
    #[serde(flatten)]
    pub stats: CheckStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub target: String,
    pub entries: Vec<SuiteEntry>,
}

impl SuiteReport {
    pub fn get(&self, id: &str) -> Option<&CheckStats> {
        self.entries.iter().map(|e| &e.stats).find(|s| s.id == id)
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.stats.pass)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.entries.iter().filter(|e| !e.stats.pass).map(|e| e.stats.id.as_str()).collect()
    }
}

pub(crate) fn run_suite(
    target: &AlmostContactStructure,
    rows: &[SuiteRow],
    points: &[Vec<f64>],
    fd: &FdConfig,
    exec: Execution,
) -> Result<SuiteReport> {
    for p in points {
        target.chart().check_point(p, fd)?;
    }
    let active: Vec<&SuiteRow> = rows.iter().filter(|r| r.applicable).collect();
    let per_point = exec.map(points, |_, p| {
        let d = PointData::new(target, p, fd);
        active.iter().map(|r| (r.eval)(&d).residual()).collect::<Vec<f64>>()
    });
    let mut entries = Vec::with_capacity(rows.len());
    let mut k = 0;
    for r in rows {
        let tolerance = fd.tolerance(r.tolerance);
        let stats = if r.applicable {
            let values: Vec<f64> = per_point.iter().map(|row| row[k]).collect();
            k += 1;
            CheckStats::from_residuals(r.id, &values, tolerance)
        } else {
            CheckStats::not_applicable(r.id, tolerance)
        };
        entries.push(SuiteEntry { statement: r.statement.to_string(), stats });
    }
    Ok(SuiteReport { target: target.name().to_string(), entries })
}
