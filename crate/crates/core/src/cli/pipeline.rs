//! Dataset loading and per-side discretization shared by every subcommand.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataio::movielens::{self, AgeMode, MovieLensOptions, YearMode};
use crate::dataio::{self, SchemaConfig};
use crate::discretize::{discretize_system, DiscretizeReport, DiscretizerRegistry, DiscretizerSpec, SpecEntry};
use crate::error::{Error, Result};
use crate::model::{AttributeKind, InformationSystem, Mmer};

/// Method label meaning "drop numeric attributes instead of discretizing".
pub const NO_DISCRETIZATION: &str = "none";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetConfig {
    Generic { schema: PathBuf },
    Movielens(MovieLensOptions),
}

impl DatasetConfig {
    /// MovieLens with the preprocessing the method calls for: GroupLens age
    /// bins and decades for `manual`, raw numbers otherwise.
    pub fn movielens(dir: impl Into<PathBuf>, method: &str) -> Self {
        let mut opts = MovieLensOptions::new(dir);
        if method == "manual" {
            opts.age_mode = AgeMode::ManualGrouplens;
            opts.year_mode = YearMode::Decade;
        }
        DatasetConfig::Movielens(opts)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InputFile {
    pub path: PathBuf,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug)]
pub struct Loaded {
    pub mmer: Mmer,
    pub inputs: Vec<InputFile>,
    pub stats: serde_json::Value,
    pub warnings: Vec<String>,
}

pub fn load_dataset(config: &DatasetConfig) -> Result<Loaded> {
    let (mmer, paths, stats, warnings) = match config {
        DatasetConfig::Generic { schema } => {
            let schema_config = SchemaConfig::from_path(schema)?;
            let (mmer, stats) = dataio::load_mmer_with_stats(&schema_config)?;
            let mut warnings = Vec::new();
            if stats.duplicate_pairs > 0 {
                warnings.push(format!("relation: {} duplicate pairs collapsed", stats.duplicate_pairs));
            }
            let mut paths = vec![schema.clone()];
            paths.extend(schema_config.input_paths().into_iter().map(Path::to_path_buf));
            (mmer, paths, to_json(&stats)?, warnings)
        }
        DatasetConfig::Movielens(opts) => {
            let ml = dataio::load_movielens(opts)?;
            let mut warnings = Vec::new();
            if !ml.stats.excluded_movies.is_empty() {
                warnings.push(format!(
                    "movies: excluded {} without a release date (ids {}), dropping {} ratings",
                    ml.stats.excluded_movies.len(),
                    ml.stats.excluded_movies.join(", "),
                    ml.stats.excluded_pairs
                ));
            }
            if opts.age_mode == AgeMode::ManualGrouplens {
                warnings.push("age: open top bin [56, inf) closed at the oldest observed age".into());
            }
            (ml.mmer, opts.input_paths(), to_json(&ml.stats)?, warnings)
        }
    };
    let inputs = paths
        .into_iter()
        .map(|path| {
            let sha256 = dataio::file_sha256(&path)?;
            let bytes = std::fs::metadata(&path).map_err(|e| Error::io(&path, e))?.len();
            Ok(InputFile { path, sha256, bytes })
        })
        .collect::<Result<_>>()?;
    Ok(Loaded {
        mmer,
        inputs,
        stats,
        warnings,
    })
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> Result<serde_json::Value> {
    serde_json::to_value(value).map_err(|e| Error::Internal(format!("serialization failed: {e}")))
}

/// What happens to one side's numeric columns.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SidePlan {
    #[serde(default)]
    pub discretize: Vec<SpecEntry>,
    #[serde(default)]
    pub drop: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    /// `equal_width`, `equal_frequency`, `manual`, `none` or `spec`.
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k1: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k2: Option<usize>,
    pub source: SidePlan,
    pub target: SidePlan,
}

/// A discretizer spec file: `[[source]]` and `[[target]]` entries.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default)]
    pub source: Vec<SpecEntry>,
    #[serde(default)]
    pub target: Vec<SpecEntry>,
}

impl SpecFile {
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

fn numeric_names(is: &InformationSystem) -> Vec<String> {
    is.attributes()
        .iter()
        .filter(|a| a.kind == AttributeKind::Numeric)
        .map(|a| a.name.clone())
        .collect()
}

impl Plan {
    pub fn from_spec(spec: SpecFile) -> Self {
        Plan {
            method: "spec".into(),
            k1: None,
            k2: None,
            source: SidePlan {
                discretize: spec.source,
                drop: Vec::new(),
            },
            target: SidePlan {
                discretize: spec.target,
                drop: Vec::new(),
            },
        }
    }

    /// One method for every numeric column, `k1` intervals on the source side
    /// and `k2` on the target side.
    pub fn uniform(
        dataset: &DatasetConfig,
        mmer: &Mmer,
        method: &str,
        k1: Option<usize>,
        k2: Option<usize>,
        registry: &DiscretizerRegistry,
    ) -> Result<Self> {
        if method == NO_DISCRETIZATION {
            return Ok(Plan {
                method: method.into(),
                k1: None,
                k2: None,
                source: SidePlan {
                    discretize: Vec::new(),
                    drop: numeric_names(&mmer.source),
                },
                target: SidePlan {
                    discretize: Vec::new(),
                    drop: numeric_names(&mmer.target),
                },
            });
        }
        let canonical = registry.get(method)?.name();
        if canonical == "manual" {
            let DatasetConfig::Movielens(opts) = dataset else {
                return Err(Error::Parameter("manual on a generic dataset needs --spec with boundaries".into()));
            };
            if opts.age_mode != AgeMode::ManualGrouplens || opts.year_mode != YearMode::Decade {
                return Err(Error::Parameter(
                    "manual MovieLens runs need GroupLens ages and decade years".into(),
                ));
            }
            let (source, _) = movielens::discretizer_specs(opts, mmer, canonical, 1, 1)?;
            return Ok(Plan {
                method: canonical.into(),
                k1: None,
                k2: None,
                source: SidePlan {
                    discretize: source.entries,
                    drop: Vec::new(),
                },
                target: SidePlan::default(),
            });
        }
        let side = |is: &InformationSystem, k: Option<usize>, flag: &str| -> Result<SidePlan> {
            if numeric_names(is).is_empty() {
                return Ok(SidePlan::default());
            }
            let k = k.ok_or_else(|| Error::Parameter(format!("{canonical} needs {flag} (or --k)")))?;
            Ok(SidePlan {
                discretize: DiscretizerSpec::uniform(is, canonical, k).entries,
                drop: Vec::new(),
            })
        };
        Ok(Plan {
            method: canonical.into(),
            k1,
            k2,
            source: side(&mmer.source, k1, "--k1")?,
            target: side(&mmer.target, k2, "--k2")?,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SideChains {
    pub source: DiscretizeReport,
    pub target: DiscretizeReport,
}

impl SideChains {
    pub fn warnings(&self) -> impl Iterator<Item = String> + '_ {
        let tag = |side: &'static str| move |w: &String| format!("{side} {w}");
        self.source
            .warnings
            .iter()
            .map(tag("source"))
            .chain(self.target.warnings.iter().map(tag("target")))
    }
}

fn apply_side(is: &InformationSystem, plan: &SidePlan, registry: &DiscretizerRegistry) -> Result<(InformationSystem, DiscretizeReport)> {
    let drop = plan
        .drop
        .iter()
        .map(|name| {
            is.attribute_index(name)
                .ok_or_else(|| Error::Schema(format!("unknown attribute {name:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let kept = is.without_attributes(&drop)?;
    discretize_system(&kept, &DiscretizerSpec::new(plan.discretize.clone()), registry)
}

/// Applies `plan` to both sides of `mmer`.
pub fn apply_plan(mmer: &Mmer, plan: &Plan, registry: &DiscretizerRegistry) -> Result<(Mmer, SideChains)> {
    let (source, source_report) = apply_side(&mmer.source, &plan.source, registry)?;
    let (target, target_report) = apply_side(&mmer.target, &plan.target, registry)?;
    let mmer = Mmer::new(source, target, mmer.relation.clone())?;
    Ok((
        mmer,
        SideChains {
            source: source_report,
            target: target_report,
        },
    ))
}
