//! Recipe format:
//!
//! ```json
//! {"cells": [{"condition": "sperner", "n_range": [1, 5], "budget_ms": 2000}]}
//! ```
//!
//! `budget_ms` and `graph_cap` are optional per cell.

use std::time::Duration;

use anyhow::{Context, Result};
use serde::Deserialize;
use serde_json::json;

use sperner_core::restrictions::tilted_system;
use sperner_core::search::{max_family, SearchOptions, DEFAULT_GRAPH_CAP};
use sperner_core::weight::weight;
use sperner_core::PairCondition;

use crate::report::{Outcome, Table};
use crate::{usage, Global};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Recipe {
    cells: Vec<Cell>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Cell {
    condition: String,
    n_range: (usize, usize),
    budget_ms: Option<u64>,
    graph_cap: Option<usize>,
}

pub fn run(text: &str, timings: bool, g: &Global) -> Result<Outcome> {
    let recipe: Recipe = serde_json::from_str(text).context("malformed recipe")?;
    let mut headers: Vec<String> = ["n", "condition", "size", "w", "ratio", "optimal"]
        .map(String::from)
        .to_vec();
    if timings {
        headers.push("elapsed_ms".into());
    }
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for cell in &recipe.cells {
        let (lo, hi) = cell.n_range;
        if lo > hi {
            return Err(usage(format!("n_range [{lo}, {hi}] is empty")));
        }
        for n in lo..=hi {
            let cond = PairCondition::from_shorthand(&cell.condition, n)?;
            let opts = SearchOptions {
                time_limit: cell
                    .budget_ms
                    .or(g.time_limit_ms)
                    .map(Duration::from_millis),
                graph_cap: cell.graph_cap.unwrap_or(DEFAULT_GRAPH_CAP),
            };
            let r = max_family(&cond, n, &opts)?;
            let w = match &cond {
                PairCondition::Gx(sys) => Some(weight(sys)?.w),
                PairCondition::Tilted { p, q } => Some(weight(&tilted_system(n, *p, *q)?)?.w),
                PairCondition::OrderedTilted => None,
            };
            let ratio = w.as_ref().map(|w| r.size as f64 / w.to_f64());
            let mut row = vec![
                n.to_string(),
                cell.condition.clone(),
                r.size.to_string(),
                w.as_ref().map(|w| w.to_string()).unwrap_or_default(),
                ratio.map(|x| format!("{x:?}")).unwrap_or_default(),
                r.optimal.to_string(),
            ];
            if timings {
                row.push(r.elapsed_ms.to_string());
            }
            rows.push(row);
            let mut record = json!({
                "n": n,
                "condition": cell.condition,
                "size": r.size,
                "w": w,
                "ratio": ratio,
                "optimal": r.optimal,
            });
            if timings {
                record["elapsed_ms"] = json!(r.elapsed_ms);
            }
            records.push(record);
        }
    }
    Ok(Outcome {
        results: json!({ "rows": records }),
        table: Some(Table { headers, rows }),
        failed: false,
    })
}
