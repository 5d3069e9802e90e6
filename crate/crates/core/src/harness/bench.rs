use rayon::prelude::*;
use serde::Serialize;

use super::generate::SuiteEntry;
use crate::error::Result;
use crate::oracle::Oracle;
use crate::pipeline::{alpha_for, approx_mms, AlphaMode};
use crate::value::Value;

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub id: String,
    pub n: usize,
    pub m: usize,
    pub alpha: Option<Value>,
    pub score: Option<Value>,
    pub reductions: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchSummary {
    pub instances: usize,
    pub passed: usize,
    pub failed: usize,
    /// Smallest score divided by its alpha, over instances with a score.
    pub worst_margin: Option<Value>,
    pub rows: Vec<BenchRow>,
}

/// Solves every entry in parallel and reports rows sorted by id.
pub fn run_suite(oracle: &Oracle, suite: &[SuiteEntry], mode: &AlphaMode) -> Result<BenchSummary> {
    let mut rows: Vec<BenchRow> = suite.par_iter().map(|e| solve_row(oracle, e, mode)).collect();
    rows.sort_by(|a, b| a.id.cmp(&b.id));
    let passed = rows.iter().filter(|r| r.pass).count();
    let worst_margin = rows
        .iter()
        .filter_map(|r| Some(r.score.as_ref()? / r.alpha.as_ref()?))
        .min();
    Ok(BenchSummary {
        instances: rows.len(),
        passed,
        failed: rows.len() - passed,
        worst_margin,
        rows,
    })
}

fn solve_row(oracle: &Oracle, entry: &SuiteEntry, mode: &AlphaMode) -> BenchRow {
    let inst = &entry.instance;
    let mut row = BenchRow {
        id: entry.id.clone(),
        n: inst.n(),
        m: inst.m(),
        alpha: None,
        score: None,
        reductions: 0,
        pass: false,
        error: None,
    };
    let outcome = alpha_for(inst.n(), mode).and_then(|choice| {
        let report = approx_mms(oracle, inst, &choice)?;
        Ok((choice, report))
    });
    match outcome {
        Ok((choice, report)) => {
            row.pass =
                report.score.as_ref().is_none_or(|s| *s >= choice.alpha) && report.allocation.is_complete_for(inst);
            row.alpha = Some(choice.alpha);
            row.score = report.score;
            row.reductions = report.reductions.len();
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}
