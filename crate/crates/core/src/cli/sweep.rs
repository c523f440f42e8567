//! Interval-count sweeps over `(k1, k2)`.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output::GridRow;
use super::pipeline::{apply_plan, load_dataset, DatasetConfig, Loaded, Plan, NO_DISCRETIZATION};
use crate::discretize::DiscretizerRegistry;
use crate::error::{Error, Result};
use crate::measures::Thresholds;
use crate::miner::{count_summary, mine};

/// Where the data comes from; the per-method preprocessing is derived from it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSource {
    Generic { schema: PathBuf },
    Movielens { data_dir: PathBuf },
}

impl DatasetSource {
    pub fn config_for(&self, method: &str) -> DatasetConfig {
        match self {
            DatasetSource::Generic { schema } => DatasetConfig::Generic { schema: schema.clone() },
            DatasetSource::Movielens { data_dir } => DatasetConfig::movielens(data_dir, method),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub methods: Vec<String>,
    pub k1: RangeInclusive<usize>,
    pub k2: RangeInclusive<usize>,
    pub thresholds: Thresholds,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Parameter("sweep needs at least one method".into()));
        }
        for (name, r) in [("k1", &self.k1), ("k2", &self.k2)] {
            if r.is_empty() || *r.start() == 0 {
                return Err(Error::Parameter(format!(
                    "{name} range {}..{} must be non-empty and start at 1 or more",
                    r.start(),
                    r.end()
                )));
            }
        }
        Ok(())
    }
}

/// Parses `a..b` (inclusive) or a single `a`.
pub fn parse_range(text: &str) -> Result<RangeInclusive<usize>> {
    let num = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::Parameter(format!("bad range {text:?}; expected `a..b` or `a`")))
    };
    let range = match text.split_once("..") {
        Some((a, b)) => num(a)?..=num(b.trim_start_matches('='))?,
        None => {
            let a = num(text)?;
            a..=a
        }
    };
    if range.is_empty() {
        return Err(Error::Parameter(format!("empty range {text:?}")));
    }
    Ok(range)
}

#[derive(Clone, Debug)]
struct Cell {
    method: String,
    k1: Option<usize>,
    k2: Option<usize>,
}

/// Rule and candidate counts for every cell, sorted by `(method, k1, k2)`.
///
/// `manual` and `none` do not take interval counts and contribute one row each.
pub fn run_sweep(source: &DatasetSource, config: &SweepConfig, registry: &DiscretizerRegistry) -> Result<Vec<GridRow>> {
    config.validate()?;
    let mut datasets: BTreeMap<String, (DatasetConfig, Loaded)> = BTreeMap::new();
    let mut cells = Vec::new();
    for method in &config.methods {
        let canonical = if method == NO_DISCRETIZATION {
            NO_DISCRETIZATION
        } else {
            registry.get(method)?.name()
        };
        if !datasets.contains_key(canonical) {
            let dataset = source.config_for(canonical);
            let loaded = load_dataset(&dataset)?;
            datasets.insert(canonical.to_string(), (dataset, loaded));
        }
        if canonical == NO_DISCRETIZATION || canonical == "manual" {
            cells.push(Cell {
                method: canonical.into(),
                k1: None,
                k2: None,
            });
            continue;
        }
        for k1 in config.k1.clone() {
            for k2 in config.k2.clone() {
                cells.push(Cell {
                    method: canonical.into(),
                    k1: Some(k1),
                    k2: Some(k2),
                });
            }
        }
    }

    let mut rows = cells
        .par_iter()
        .map(|cell| {
            let (dataset, loaded) = &datasets[&cell.method];
            let plan = Plan::uniform(dataset, &loaded.mmer, &cell.method, cell.k1, cell.k2, registry)?;
            let (mmer, _) = apply_plan(&loaded.mmer, &plan, registry)?;
            let summary = count_summary(&mine(&mmer, &config.thresholds)?);
            Ok(GridRow {
                method: cell.method.clone(),
                k1: cell.k1,
                k2: cell.k2,
                source_candidates: summary.source_candidates,
                target_candidates: summary.target_candidates,
                rules: summary.rules,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| (&a.method, a.k1, a.k2).cmp(&(&b.method, b.k1, b.k2)));
    Ok(rows)
}
