//! Information systems, binary relations and the two-table MMER built from them.
//!
//! Objects and attributes are addressed by dense indices everywhere inside the
//! crate. External ids and attribute names only matter at I/O boundaries.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fraction::{self, Fraction};

/// A half-open `[lo, hi)` interval, or `[lo, hi]` when it closes a boundary chain.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
    hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, hi_closed: bool) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Domain(format!("interval bounds must be finite, got [{lo}, {hi}]")));
        }
        // [v, v] is the degenerate chain of a constant column.
        if lo < hi || (lo == hi && hi_closed) {
            Ok(Interval {
                lo: normalize_zero(lo),
                hi: normalize_zero(hi),
                hi_closed,
            })
        } else {
            Err(Error::Domain(format!("invalid interval bounds [{lo}, {hi}]")))
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && (v < self.hi || (self.hi_closed && v == self.hi))
    }

    /// Parses the label produced by `Display`, e.g. `[2.0, 7.333333333333333)`.
    pub fn parse_label(label: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("malformed interval label {label:?}"));
        let s = label.trim();
        let inner = s.strip_prefix('[').ok_or_else(bad)?;
        let (inner, closed) = if let Some(x) = inner.strip_suffix(']') {
            (x, true)
        } else if let Some(x) = inner.strip_suffix(')') {
            (x, false)
        } else {
            return Err(bad());
        };
        let (lo, hi) = inner.split_once(',').ok_or_else(bad)?;
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        Interval::new(lo, hi, closed)
    }

    fn key(&self) -> (u64, u64, bool) {
        (self.lo.to_bits(), self.hi.to_bits(), self.hi_closed)
    }
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Interval {}

impl Hash for Interval {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state)
    }
}

impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lo
            .total_cmp(&other.lo)
            .then(self.hi.total_cmp(&other.hi))
            .then(self.hi_closed.cmp(&other.hi_closed))
    }
}

impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Interval {
    // `{:?}` on f64 is the shortest string that round-trips.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let close = if self.hi_closed { ']' } else { ')' };
        write!(f, "[{:?}, {:?}{close}", self.lo, self.hi)
    }
}

fn normalize_zero(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// One cell of an information system.
#[derive(Clone, Debug)]
pub enum AttributeValue {
    Nominal(String),
    Numeric(f64),
    Interval(Interval),
}

impl AttributeValue {
    pub fn nominal(label: impl Into<String>) -> Self {
        AttributeValue::Nominal(label.into())
    }

    pub fn numeric(v: f64) -> Result<Self> {
        if v.is_finite() {
            Ok(AttributeValue::Numeric(normalize_zero(v)))
        } else {
            Err(Error::Domain(format!("numeric value must be finite, got {v}")))
        }
    }

    pub fn kind(&self) -> AttributeKind {
        match self {
            AttributeValue::Nominal(_) => AttributeKind::Nominal,
            AttributeValue::Numeric(_) => AttributeKind::Numeric,
            AttributeValue::Interval(_) => AttributeKind::Interval,
        }
    }

    pub fn as_numeric(&self) -> Option<f64> {
        match self {
            AttributeValue::Numeric(v) => Some(*v),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            AttributeValue::Nominal(_) => 0,
            AttributeValue::Numeric(_) => 1,
            AttributeValue::Interval(_) => 2,
        }
    }
}

impl PartialEq for AttributeValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for AttributeValue {}

impl Hash for AttributeValue {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            AttributeValue::Nominal(s) => s.hash(state),
            AttributeValue::Numeric(v) => v.to_bits().hash(state),
            AttributeValue::Interval(i) => i.hash(state),
        }
    }
}

impl Ord for AttributeValue {
    fn cmp(&self, other: &Self) -> Ordering {
        use AttributeValue::*;
        match (self, other) {
            (Nominal(a), Nominal(b)) => a.cmp(b),
            (Numeric(a), Numeric(b)) => a.total_cmp(b),
            (Interval(a), Interval(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for AttributeValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for AttributeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttributeValue::Nominal(s) => f.write_str(s),
            AttributeValue::Numeric(v) => write!(f, "{v:?}"),
            AttributeValue::Interval(i) => i.fmt(f),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeKind {
    Nominal,
    Numeric,
    /// A numeric column after discretization.
    Interval,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
}

impl Attribute {
    pub fn new(name: impl Into<String>, kind: AttributeKind) -> Self {
        Attribute {
            name: name.into(),
            kind,
        }
    }
}

/// A set of object indices drawn from a universe of fixed size.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ObjectSet {
    bits: FixedBitSet,
}

impl ObjectSet {
    pub fn empty(universe: usize) -> Self {
        ObjectSet {
            bits: FixedBitSet::with_capacity(universe),
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        ObjectSet { bits }
    }

    /// Panics if an index is not below `universe`.
    pub fn from_indices(universe: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = ObjectSet::empty(universe);
        for i in indices {
            set.insert(i);
        }
        set
    }

    pub fn insert(&mut self, index: usize) {
        self.bits.insert(index);
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.bits.contains(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn intersection(&self, other: &ObjectSet) -> ObjectSet {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        ObjectSet { bits }
    }

    pub fn intersection_count(&self, other: &ObjectSet) -> usize {
        self.bits.intersection_count(&other.bits)
    }

    pub fn is_subset(&self, other: &ObjectSet) -> bool {
        self.bits.is_subset(&other.bits)
    }
}

impl fmt::Debug for ObjectSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// `S = (U, A)`: objects by attributes, stored column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct InformationSystem {
    object_ids: Vec<String>,
    attributes: Vec<Attribute>,
    columns: Vec<Vec<AttributeValue>>,
    id_index: HashMap<String, usize>,
}

impl InformationSystem {
    /// Builds a system from row-major cells; `rows[i][j]` is object `i` on attribute `j`.
    pub fn new(
        object_ids: Vec<String>,
        attributes: Vec<Attribute>,
        rows: Vec<Vec<AttributeValue>>,
    ) -> Result<Self> {
        if rows.len() != object_ids.len() {
            return Err(Error::Schema(format!(
                "{} object ids but {} rows",
                object_ids.len(),
                rows.len()
            )));
        }
        let mut columns: Vec<Vec<AttributeValue>> =
            attributes.iter().map(|_| Vec::with_capacity(rows.len())).collect();
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != attributes.len() {
                return Err(Error::Schema(format!(
                    "row {i} has {} cells, expected {}",
                    row.len(),
                    attributes.len()
                )));
            }
            for (j, v) in row.into_iter().enumerate() {
                columns[j].push(v);
            }
        }
        Self::from_columns(object_ids, attributes, columns)
    }

    pub fn from_columns(
        object_ids: Vec<String>,
        attributes: Vec<Attribute>,
        columns: Vec<Vec<AttributeValue>>,
    ) -> Result<Self> {
        if columns.len() != attributes.len() {
            return Err(Error::Schema(format!(
                "{} attributes but {} columns",
                attributes.len(),
                columns.len()
            )));
        }
        let mut id_index = HashMap::with_capacity(object_ids.len());
        for (i, id) in object_ids.iter().enumerate() {
            if id_index.insert(id.clone(), i).is_some() {
                return Err(Error::Schema(format!("duplicate object id {id:?}")));
            }
        }
        let mut seen = HashMap::new();
        for (attr, column) in attributes.iter().zip(&columns) {
            if seen.insert(attr.name.as_str(), ()).is_some() {
                return Err(Error::Schema(format!("duplicate attribute name {:?}", attr.name)));
            }
            if column.len() != object_ids.len() {
                return Err(Error::Schema(format!(
                    "column {:?} has {} cells, expected {}",
                    attr.name,
                    column.len(),
                    object_ids.len()
                )));
            }
            for v in column {
                if v.kind() != attr.kind {
                    return Err(Error::Type(format!(
                        "column {:?} is {:?} but holds {v}",
                        attr.name, attr.kind
                    )));
                }
                if let AttributeValue::Numeric(x) = v {
                    if !x.is_finite() {
                        return Err(Error::Domain(format!("non-finite value in {:?}", attr.name)));
                    }
                }
            }
        }
        Ok(InformationSystem {
            object_ids,
            attributes,
            columns,
            id_index,
        })
    }

    pub fn len(&self) -> usize {
        self.object_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.object_ids.is_empty()
    }

    pub fn object_ids(&self) -> &[String] {
        &self.object_ids
    }

    pub fn object_index(&self, id: &str) -> Option<usize> {
        self.id_index.get(id).copied()
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn column(&self, attribute: usize) -> &[AttributeValue] {
        &self.columns[attribute]
    }

    pub fn value(&self, object: usize, attribute: usize) -> &AttributeValue {
        &self.columns[attribute][object]
    }

    pub fn has_numeric(&self) -> bool {
        self.attributes.iter().any(|a| a.kind == AttributeKind::Numeric)
    }

    /// Objects matching every `(attribute name, value)` descriptor; all of U when empty.
    pub fn block(&self, descriptors: &[(&str, AttributeValue)]) -> Result<ObjectSet> {
        let indexed = descriptors
            .iter()
            .map(|(name, value)| {
                let attribute = self
                    .attribute_index(name)
                    .ok_or_else(|| Error::Schema(format!("unknown attribute {name:?}")))?;
                Ok(Descriptor {
                    attribute,
                    value: value.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        self.block_of(&indexed)
    }

    pub fn block_of(&self, descriptors: &[Descriptor]) -> Result<ObjectSet> {
        for d in descriptors {
            let attr = self.attributes.get(d.attribute).ok_or(Error::Bounds {
                index: d.attribute,
                size: self.attributes.len(),
            })?;
            if d.value.kind() != attr.kind {
                return Err(Error::Type(format!(
                    "descriptor value {} does not fit {:?} column {:?}",
                    d.value, attr.kind, attr.name
                )));
            }
        }
        let matches = (0..self.len()).filter(|&i| {
            descriptors
                .iter()
                .all(|d| self.columns[d.attribute][i] == d.value)
        });
        Ok(ObjectSet::from_indices(self.len(), matches))
    }

    /// The distinct values of one column with their blocks, in value order.
    pub fn value_blocks(&self, attribute: usize) -> Vec<(AttributeValue, ObjectSet)> {
        let mut blocks: BTreeMap<&AttributeValue, ObjectSet> = BTreeMap::new();
        for (i, v) in self.columns[attribute].iter().enumerate() {
            blocks
                .entry(v)
                .or_insert_with(|| ObjectSet::empty(self.len()))
                .insert(i);
        }
        blocks.into_iter().map(|(v, s)| (v.clone(), s)).collect()
    }

    /// A copy with the listed attributes removed.
    pub fn without_attributes(&self, drop: &[usize]) -> Result<Self> {
        let (attributes, columns): (Vec<_>, Vec<_>) = self
            .attributes
            .iter()
            .cloned()
            .zip(self.columns.iter().cloned())
            .enumerate()
            .filter(|(j, _)| !drop.contains(j))
            .map(|(_, ac)| ac)
            .unzip();
        Self::from_columns(self.object_ids.clone(), attributes, columns)
    }

    /// Replaces one column, possibly changing its kind.
    pub fn with_column(
        &self,
        attribute: usize,
        kind: AttributeKind,
        column: Vec<AttributeValue>,
    ) -> Result<Self> {
        let mut attributes = self.attributes.clone();
        let mut columns = self.columns.clone();
        attributes[attribute].kind = kind;
        columns[attribute] = column;
        Self::from_columns(self.object_ids.clone(), attributes, columns)
    }
}

/// `|extension| / universe_size`.
pub fn support(extension: &ObjectSet, universe_size: usize) -> Result<Fraction> {
    if universe_size == 0 {
        return Err(Error::Domain("support over an empty universe".into()));
    }
    if let Some(max) = extension.iter().last() {
        if max >= universe_size {
            return Err(Error::Bounds {
                index: max,
                size: universe_size,
            });
        }
    }
    fraction::ratio(extension.len(), universe_size)
}

/// `R ⊆ U × V`, kept both row-wise and column-wise.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryRelation {
    source_size: usize,
    target_size: usize,
    neighbors: Vec<Vec<usize>>,
    inverse_neighbors: Vec<Vec<usize>>,
    rows: Vec<ObjectSet>,
}

impl BinaryRelation {
    /// Duplicate pairs collapse to one.
    pub fn from_pairs(
        source_size: usize,
        target_size: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut neighbors = vec![Vec::new(); source_size];
        for (x, y) in pairs {
            if x >= source_size {
                return Err(Error::Bounds {
                    index: x,
                    size: source_size,
                });
            }
            if y >= target_size {
                return Err(Error::Bounds {
                    index: y,
                    size: target_size,
                });
            }
            neighbors[x].push(y);
        }
        for row in &mut neighbors {
            row.sort_unstable();
            row.dedup();
        }
        let inverse_neighbors = invert(&neighbors, target_size);
        let rows = neighbors
            .iter()
            .map(|r| ObjectSet::from_indices(target_size, r.iter().copied()))
            .collect();
        Ok(BinaryRelation {
            source_size,
            target_size,
            neighbors,
            inverse_neighbors,
            rows,
        })
    }

    pub fn source_size(&self) -> usize {
        self.source_size
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    pub fn pair_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(x, ys)| ys.iter().map(move |&y| (x, y)))
    }

    /// `R(x)`, sorted.
    pub fn neighborhood(&self, source: usize) -> Result<&[usize]> {
        self.neighbors.get(source).map(Vec::as_slice).ok_or(Error::Bounds {
            index: source,
            size: self.source_size,
        })
    }

    /// `R⁻¹(y)`, sorted.
    pub fn inverse_neighborhood(&self, target: usize) -> Result<&[usize]> {
        self.inverse_neighbors
            .get(target)
            .map(Vec::as_slice)
            .ok_or(Error::Bounds {
                index: target,
                size: self.target_size,
            })
    }

    /// `R(x)` as a set over V. Panics when out of range.
    pub fn row(&self, source: usize) -> &ObjectSet {
        &self.rows[source]
    }

    pub fn inverse_neighbors(&self) -> &[Vec<usize>] {
        &self.inverse_neighbors
    }

    pub fn neighbors(&self) -> &[Vec<usize>] {
        &self.neighbors
    }
}

/// Rebuilds the column-wise view from the row-wise one.
pub fn invert(neighbors: &[Vec<usize>], target_size: usize) -> Vec<Vec<usize>> {
    let mut inverse = vec![Vec::new(); target_size];
    for (x, ys) in neighbors.iter().enumerate() {
        for &y in ys {
            inverse[y].push(x);
        }
    }
    inverse
}

/// `ES = (U, A, V, B, R)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mmer {
    pub source: InformationSystem,
    pub target: InformationSystem,
    pub relation: BinaryRelation,
}

impl Mmer {
    pub fn new(
        source: InformationSystem,
        target: InformationSystem,
        relation: BinaryRelation,
    ) -> Result<Self> {
        if relation.source_size() != source.len() || relation.target_size() != target.len() {
            return Err(Error::Schema(format!(
                "relation is {}x{} but tables hold {} and {} objects",
                relation.source_size(),
                relation.target_size(),
                source.len(),
                target.len()
            )));
        }
        Ok(Mmer {
            source,
            target,
            relation,
        })
    }

    pub fn side(&self, side: Side) -> &InformationSystem {
        match side {
            Side::Source => &self.source,
            Side::Target => &self.target,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Source,
    Target,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Descriptor {
    pub attribute: usize,
    pub value: AttributeValue,
}

/// A concept: attribute-value conjunction plus the objects matching it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Granule {
    side: Side,
    intension: Vec<Descriptor>,
    extension: ObjectSet,
}

impl Granule {
    /// Computes the extension from the intension.
    pub fn from_intension(
        is: &InformationSystem,
        side: Side,
        mut intension: Vec<Descriptor>,
    ) -> Result<Self> {
        intension.sort();
        if intension.is_empty() {
            return Err(Error::Domain("granules need a non-empty intension".into()));
        }
        if intension.windows(2).any(|w| w[0].attribute == w[1].attribute) {
            return Err(Error::Domain("at most one descriptor per attribute".into()));
        }
        let extension = is.block_of(&intension)?;
        Ok(Granule {
            side,
            intension,
            extension,
        })
    }

    /// Trusts the caller that `extension` is the block of `intension`.
    pub(crate) fn from_parts(side: Side, intension: Vec<Descriptor>, extension: ObjectSet) -> Self {
        debug_assert!(!intension.is_empty());
        Granule {
            side,
            intension,
            extension,
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn intension(&self) -> &[Descriptor] {
        &self.intension
    }

    pub fn extension(&self) -> &ObjectSet {
        &self.extension
    }

    /// `(attribute name, value)` pairs for display and serialization.
    pub fn named_intension<'a>(&'a self, is: &'a InformationSystem) -> Vec<(&'a str, &'a AttributeValue)> {
        self.intension
            .iter()
            .map(|d| (is.attributes()[d.attribute].name.as_str(), &d.value))
            .collect()
    }

    pub fn describe(&self, is: &InformationSystem) -> String {
        self.named_intension(is)
            .iter()
            .map(|(a, v)| format!("<{a}: {v}>"))
            .collect::<Vec<_>>()
            .join(" ∧ ")
    }
}
