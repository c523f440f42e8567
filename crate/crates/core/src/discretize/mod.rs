//! Turning numeric columns into interval-valued ones.
//!
//! Each method is a [`Discretizer`] registered by name in a
//! [`DiscretizerRegistry`]; a [`DiscretizerSpec`] picks one per attribute.

mod chain;
mod strategies;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use chain::{assign_interval, BoundaryChain};
pub use strategies::{equal_frequency_boundaries, equal_width_boundaries, EqualFrequency, EqualWidth, Manual};

use crate::error::{Error, Result};
use crate::model::{AttributeKind, InformationSystem};

/// The user-supplied parameter of a method.
#[derive(Clone, Debug, PartialEq)]
pub enum Setting {
    Intervals(usize),
    Boundaries(Vec<f64>),
}

/// A fitted chain plus anything worth telling the user about it.
#[derive(Clone, Debug, PartialEq)]
pub struct Fit {
    pub chain: BoundaryChain,
    pub warnings: Vec<String>,
}

pub trait Discretizer: Send + Sync {
    /// Canonical registry name, also written to reports.
    fn name(&self) -> &'static str;

    fn aliases(&self) -> &'static [&'static str] {
        &[]
    }

    fn fit(&self, values: &[f64], setting: &Setting) -> Result<Fit>;
}

#[derive(Clone, Default)]
pub struct DiscretizerRegistry {
    by_name: BTreeMap<String, Arc<dyn Discretizer>>,
}

impl DiscretizerRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `equal_width`, `equal_frequency` and `manual`, with their short aliases.
    pub fn with_builtins() -> Self {
        let mut registry = Self::empty();
        registry.register(Arc::new(EqualWidth));
        registry.register(Arc::new(EqualFrequency));
        registry.register(Arc::new(Manual));
        registry
    }

    pub fn register(&mut self, discretizer: Arc<dyn Discretizer>) {
        for alias in discretizer.aliases() {
            self.by_name.insert((*alias).to_string(), discretizer.clone());
        }
        self.by_name.insert(discretizer.name().to_string(), discretizer);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Discretizer>> {
        self.by_name.get(name).cloned().ok_or_else(|| {
            Error::Parameter(format!(
                "unknown discretization method {name:?}; known: {}",
                self.names().join(", ")
            ))
        })
    }

    /// Canonical names only.
    pub fn names(&self) -> Vec<&'static str> {
        let names: BTreeSet<_> = self.by_name.values().map(|d| d.name()).collect();
        names.into_iter().collect()
    }
}

/// One attribute's discretization request.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecEntry {
    pub attribute: String,
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundaries: Option<Vec<f64>>,
}

impl SpecEntry {
    pub fn intervals(attribute: impl Into<String>, method: impl Into<String>, k: usize) -> Self {
        SpecEntry {
            attribute: attribute.into(),
            method: method.into(),
            k: Some(k),
            boundaries: None,
        }
    }

    pub fn manual(attribute: impl Into<String>, boundaries: Vec<f64>) -> Self {
        SpecEntry {
            attribute: attribute.into(),
            method: "manual".into(),
            k: None,
            boundaries: Some(boundaries),
        }
    }

    pub fn setting(&self) -> Result<Setting> {
        match (&self.k, &self.boundaries) {
            (Some(k), None) => Ok(Setting::Intervals(*k)),
            (None, Some(b)) => Ok(Setting::Boundaries(b.clone())),
            _ => Err(Error::Config(format!(
                "entry for {:?} needs exactly one of `k` or `boundaries`",
                self.attribute
            ))),
        }
    }
}

/// Per-attribute discretization plan for one information system.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiscretizerSpec {
    #[serde(default, rename = "entry")]
    pub entries: Vec<SpecEntry>,
}

impl DiscretizerSpec {
    pub fn new(entries: Vec<SpecEntry>) -> Self {
        DiscretizerSpec { entries }
    }

    /// The same method and `k` for every numeric attribute of `is`.
    pub fn uniform(is: &InformationSystem, method: &str, k: usize) -> Self {
        let entries = is
            .attributes()
            .iter()
            .filter(|a| a.kind == AttributeKind::Numeric)
            .map(|a| SpecEntry::intervals(a.name.clone(), method, k))
            .collect();
        DiscretizerSpec { entries }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Provenance of one fitted attribute.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FittedChain {
    pub attribute: String,
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_requested: Option<usize>,
    pub intervals: usize,
    pub boundaries: BoundaryChain,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiscretizeReport {
    pub chains: Vec<FittedChain>,
    pub warnings: Vec<String>,
}

impl DiscretizeReport {
    pub fn extend(&mut self, other: DiscretizeReport) {
        self.chains.extend(other.chains);
        self.warnings.extend(other.warnings);
    }
}

/// Replaces each specified numeric column with interval values.
pub fn discretize_system(
    is: &InformationSystem,
    spec: &DiscretizerSpec,
    registry: &DiscretizerRegistry,
) -> Result<(InformationSystem, DiscretizeReport)> {
    let mut seen = BTreeSet::new();
    let mut out = is.clone();
    let mut report = DiscretizeReport::default();
    for entry in &spec.entries {
        let attribute = is
            .attribute_index(&entry.attribute)
            .ok_or_else(|| Error::Schema(format!("unknown attribute {:?}", entry.attribute)))?;
        if !seen.insert(attribute) {
            return Err(Error::Config(format!("attribute {:?} listed twice", entry.attribute)));
        }
        let kind = is.attributes()[attribute].kind;
        if kind != AttributeKind::Numeric {
            return Err(Error::Type(format!(
                "attribute {:?} is {kind:?}; only numeric attributes can be discretized",
                entry.attribute
            )));
        }
        let method = registry.get(&entry.method)?;
        let setting = entry.setting()?;
        let values: Vec<f64> = is
            .column(attribute)
            .iter()
            .map(|v| v.as_numeric().expect("numeric column"))
            .collect();
        let fit = method.fit(&values, &setting)?;
        let column = values
            .iter()
            .map(|&v| assign_interval(&fit.chain, v))
            .collect::<Result<Vec<_>>>()?;
        out = out.with_column(attribute, AttributeKind::Interval, column)?;
        report
            .warnings
            .extend(fit.warnings.into_iter().map(|w| format!("{}: {w}", entry.attribute)));
        report.chains.push(FittedChain {
            attribute: entry.attribute.clone(),
            method: method.name().to_string(),
            k_requested: entry.k,
            intervals: fit.chain.interval_count(),
            boundaries: fit.chain,
        });
    }
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Attribute, AttributeValue};

    fn customers() -> InformationSystem {
        let ages = [20.0, 25.0, 23.0, 26.0, 32.0, 36.0, 39.0, 40.0, 35.0, 34.0];
        let genders = ["M", "F", "M", "F", "M", "M", "M", "F", "F", "M"];
        InformationSystem::new(
            (1..=10).map(|i| format!("c{i}")).collect(),
            vec![
                Attribute::new("Age", AttributeKind::Numeric),
                Attribute::new("Gender", AttributeKind::Nominal),
            ],
            ages.iter()
                .zip(genders)
                .map(|(a, g)| vec![AttributeValue::Numeric(*a), AttributeValue::nominal(g)])
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn registry_resolves_names_and_aliases() {
        let r = DiscretizerRegistry::with_builtins();
        assert_eq!(r.get("width").unwrap().name(), "equal_width");
        assert_eq!(r.get("ef").unwrap().name(), "equal_frequency");
        assert_eq!(r.names(), vec!["equal_frequency", "equal_width", "manual"]);
        assert!(matches!(r.get("mdlp"), Err(Error::Parameter(_))));
    }

    #[test]
    fn empty_spec_is_identity() {
        let is = customers();
        let (out, report) =
            discretize_system(&is, &DiscretizerSpec::default(), &DiscretizerRegistry::with_builtins()).unwrap();
        assert_eq!(out, is);
        assert!(report.chains.is_empty());
    }

    #[test]
    fn discretizes_numeric_and_leaves_nominal() {
        let is = customers();
        let spec = DiscretizerSpec::new(vec![SpecEntry::intervals("Age", "equal_width", 4)]);
        let (out, report) = discretize_system(&is, &spec, &DiscretizerRegistry::with_builtins()).unwrap();
        assert_eq!(out.attributes()[0].kind, AttributeKind::Interval);
        assert_eq!(out.column(1), is.column(1));
        assert_eq!(report.chains[0].boundaries.boundaries(), &[20.0, 25.0, 30.0, 35.0, 40.0]);
        assert_eq!(out.value(7, 0).to_string(), "[35.0, 40.0]");
        assert_eq!(out.value(1, 0).to_string(), "[25.0, 30.0)");
    }

    #[test]
    fn rejects_nominal_unknown_and_repeated_attributes() {
        let is = customers();
        let r = DiscretizerRegistry::with_builtins();
        let nominal = DiscretizerSpec::new(vec![SpecEntry::intervals("Gender", "equal_width", 2)]);
        assert!(matches!(discretize_system(&is, &nominal, &r), Err(Error::Type(_))));
        let unknown = DiscretizerSpec::new(vec![SpecEntry::intervals("Height", "equal_width", 2)]);
        assert!(matches!(discretize_system(&is, &unknown, &r), Err(Error::Schema(_))));
        let twice = DiscretizerSpec::new(vec![
            SpecEntry::intervals("Age", "equal_width", 2),
            SpecEntry::intervals("Age", "equal_frequency", 2),
        ]);
        assert!(matches!(discretize_system(&is, &twice, &r), Err(Error::Config(_))));
    }

    #[test]
    fn spec_parses_from_toml() {
        let spec: DiscretizerSpec = toml::from_str(
            r#"
            [[entry]]
            attribute = "Age"
            method = "equal_frequency"
            k = 3

            [[entry]]
            attribute = "Salary"
            method = "manual"
            boundaries = [0.0, 3000.0, 6000.0]
            "#,
        )
        .unwrap();
        assert_eq!(spec.entries[0].setting().unwrap(), Setting::Intervals(3));
        assert_eq!(
            spec.entries[1].setting().unwrap(),
            Setting::Boundaries(vec![0.0, 3000.0, 6000.0])
        );
    }
}
