//! Rule records, run reports and grid rows.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::pipeline::{DatasetConfig, InputFile, Plan, SideChains};
use crate::error::{Error, Result};
use crate::fraction::{exact_string, to_f64, Fraction};
use crate::measures::{GranularRule, Thresholds};
use crate::miner::CountSummary;
use crate::model::{AttributeValue, Granule, InformationSystem, Mmer};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalRecord {
    pub lo: f64,
    pub hi: f64,
    pub hi_closed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescriptorRecord {
    pub attribute: String,
    /// Nominal label, number, or interval label such as `[20.0, 25.0)`.
    pub value: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<IntervalRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureRecord {
    /// Exact value as `numerator/denominator`.
    pub exact: String,
    pub value: f64,
}

impl From<&Fraction> for MeasureRecord {
    fn from(f: &Fraction) -> Self {
        MeasureRecord {
            exact: exact_string(f),
            value: to_f64(f),
        }
    }
}

/// One line of `rules.jsonl`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleRecord {
    pub lhs: Vec<DescriptorRecord>,
    pub rhs: Vec<DescriptorRecord>,
    pub lhs_size: usize,
    pub rhs_size: usize,
    pub scoverage: MeasureRecord,
    pub tcoverage: MeasureRecord,
    pub sconfidence: MeasureRecord,
    pub tconfidence: MeasureRecord,
    /// Connections reached by an `mc` share of the left-hand side.
    pub k: usize,
}

fn descriptors(g: &Granule, is: &InformationSystem) -> Vec<DescriptorRecord> {
    g.named_intension(is)
        .into_iter()
        .map(|(name, value)| DescriptorRecord {
            attribute: name.to_string(),
            value: value.to_string(),
            interval: match value {
                AttributeValue::Interval(iv) => Some(IntervalRecord {
                    lo: iv.lo(),
                    hi: iv.hi(),
                    hi_closed: iv.hi_closed(),
                }),
                _ => None,
            },
        })
        .collect()
}

impl RuleRecord {
    pub fn new(rule: &GranularRule, mmer: &Mmer) -> Self {
        let m = &rule.measures;
        RuleRecord {
            lhs: descriptors(&rule.lhs, &mmer.source),
            rhs: descriptors(&rule.rhs, &mmer.target),
            lhs_size: rule.lhs.extension().len(),
            rhs_size: rule.rhs.extension().len(),
            scoverage: (&m.scoverage).into(),
            tcoverage: (&m.tcoverage).into(),
            sconfidence: (&m.sconfidence).into(),
            tconfidence: (&m.tconfidence).into(),
            k: m.k,
        }
    }
}

/// Rules as JSON lines, in the order given.
pub fn rules_jsonl(rules: &[GranularRule], mmer: &Mmer) -> Result<String> {
    let mut out = String::new();
    for rule in rules {
        let line = serde_json::to_string(&RuleRecord::new(rule, mmer))
            .map_err(|e| Error::Internal(format!("serialization failed: {e}")))?;
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

/// Everything needed to rerun a `mine` invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub dataset: DatasetConfig,
    pub plan: Plan,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Thresholds>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub command: String,
    pub invocation: Vec<String>,
    pub config: RunConfig,
    pub inputs: Vec<InputFile>,
    pub dataset: serde_json::Value,
    pub chains: SideChains,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<CountSummary>,
    /// Pairs whose `floor(mc * |LH|)` was 0, evaluated with rank 1.
    #[serde(default)]
    pub k_floor_clamps: usize,
    pub warnings: Vec<String>,
    pub outputs: Vec<OutputFile>,
    pub wall_time_ms: u64,
}

impl RunReport {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: not a run report: {e}", path.display())))
    }
}

pub fn tool_version() -> String {
    format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))
}

pub fn write_file(path: &Path, contents: &[u8]) -> Result<OutputFile> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))?;
    Ok(OutputFile {
        path: path.to_path_buf(),
        sha256: crate::dataio::file_sha256(path)?,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<OutputFile> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| Error::Internal(format!("serialization failed: {e}")))?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

/// One row of `grid.csv`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridRow {
    pub method: String,
    pub k1: Option<usize>,
    pub k2: Option<usize>,
    pub source_candidates: usize,
    pub target_candidates: usize,
    pub rules: usize,
}

pub fn grid_csv(rows: &[GridRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| Error::Internal(format!("grid serialization failed: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Internal(format!("grid serialization failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}
