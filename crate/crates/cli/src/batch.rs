use std::collections::BTreeMap;

use anyhow::{Context as _, Result};
use rayon::prelude::*;
use serde::Serialize;
use vkinv_core::genus::CoefficientRegistry;
use vkinv_core::knotio::parse_any;

use crate::cache::Cache;
use crate::compute::{Options, ResultRecord};
use crate::run_cached;

/// Invariant pairs where agreement on the first but not the second is
/// worth reporting.
const REFINEMENTS: &[(&str, &str)] = &[
    ("kh", "akh"),
    ("kh", "parity-kh"),
    ("akh", "parity-akh"),
    ("bracket", "arrow"),
    ("bracket", "parity-bracket"),
    ("arrow", "parity-arrow"),
    ("jones", "kh"),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub name: String,
    pub diagram: String,
}

/// Rows are `name <TAB> diagram`; blank lines and `#` lines are skipped.
pub fn parse_table(text: &str) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, diagram) = line.split_once('\t').with_context(|| format!("line {}: expected name<TAB>diagram", n + 1))?;
        rows.push(Row { name: name.trim().to_string(), diagram: diagram.trim().to_string() });
    }
    Ok(rows)
}

#[derive(Serialize)]
#[serde(untagged)]
pub enum Line {
    Ok {
        name: String,
        #[serde(flatten)]
        record: ResultRecord,
    },
    Failed {
        name: String,
        invariant: String,
        error: String,
    },
}

#[derive(Debug, Default, Serialize)]
pub struct Summary {
    pub rows: usize,
    pub records: usize,
    pub failures: usize,
    /// Row names grouped by equal value, per invariant.
    pub classes: BTreeMap<String, Vec<Vec<String>>>,
    pub distinguishing_pairs: Vec<DistinguishingPair>,
}

#[derive(Debug, Serialize)]
pub struct DistinguishingPair {
    pub equal: String,
    pub unequal: String,
    pub rows: [String; 2],
}

fn same(a: &ResultRecord, b: &ResultRecord, mirror_tolerant: bool) -> bool {
    match (a.polynomial(), b.polynomial()) {
        (Some(p), Some(q)) if mirror_tolerant => p.eq_up_to_mirror(&q),
        (Some(p), Some(q)) => p == q,
        _ => a.scalars == b.scalars,
    }
}

pub fn run_batch(
    rows: &[Row],
    invariants: &[String],
    opts: &Options,
    registry: &CoefficientRegistry,
    cache: &Cache,
    mirror_tolerant: bool,
) -> (Vec<Line>, Summary) {
    let results: Vec<Vec<Result<ResultRecord, String>>> = rows
        .par_iter()
        .map(|row| match parse_any(&row.diagram) {
            Err(e) => {
                log::error!("row {}: {e}", row.name);
                invariants.iter().map(|_| Err(e.to_string())).collect()
            }
            Ok(d) => invariants
                .iter()
                .map(|inv| {
                    run_cached(&d, inv, opts, registry, cache).map_err(|e| {
                        log::error!("row {} {inv}: {e}", row.name);
                        e.to_string()
                    })
                })
                .collect(),
        })
        .collect();

    let mut summary = Summary { rows: rows.len(), ..Summary::default() };
    let mut lines = Vec::new();
    for (row, res) in rows.iter().zip(&results) {
        for (inv, r) in invariants.iter().zip(res) {
            lines.push(match r {
                Ok(rec) => {
                    summary.records += 1;
                    Line::Ok { name: row.name.clone(), record: rec.clone() }
                }
                Err(e) => {
                    summary.failures += 1;
                    Line::Failed { name: row.name.clone(), invariant: inv.clone(), error: e.clone() }
                }
            });
        }
    }

    let value = |row: usize, inv: &str| -> Option<&ResultRecord> {
        let col = invariants.iter().position(|i| i == inv)?;
        results[row][col].as_ref().ok()
    };
    for inv in invariants {
        let mut classes: Vec<(usize, Vec<String>)> = Vec::new();
        for r in 0..rows.len() {
            let Some(rec) = value(r, inv) else { continue };
            match classes.iter_mut().find(|(rep, _)| same(value(*rep, inv).unwrap(), rec, mirror_tolerant)) {
                Some((_, names)) => names.push(rows[r].name.clone()),
                None => classes.push((r, vec![rows[r].name.clone()])),
            }
        }
        summary.classes.insert(inv.clone(), classes.into_iter().map(|(_, n)| n).collect());
    }
    for &(coarse, fine) in REFINEMENTS {
        for a in 0..rows.len() {
            for b in a + 1..rows.len() {
                let (Some(ca), Some(cb), Some(fa), Some(fb)) = (value(a, coarse), value(b, coarse), value(a, fine), value(b, fine)) else {
                    continue;
                };
                if same(ca, cb, mirror_tolerant) && !same(fa, fb, mirror_tolerant) {
                    summary.distinguishing_pairs.push(DistinguishingPair {
                        equal: coarse.to_string(),
                        unequal: fine.to_string(),
                        rows: [rows[a].name.clone(), rows[b].name.clone()],
                    });
                }
            }
        }
    }
    (lines, summary)
}

pub fn to_jsonl(lines: &[Line]) -> String {
    lines.iter().map(|l| serde_json::to_string(l).expect("lines serialize") + "\n").collect()
}
