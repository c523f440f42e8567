//! Two entity tables plus a relation table, as delimited text with headers,
//! described by a TOML schema. See `docs/formats.md` for the layout.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    Attribute, AttributeKind, AttributeValue, BinaryRelation, InformationSystem, Interval, Mmer,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Id,
    Nominal,
    Numeric,
    /// Interval labels such as `[2.0, 6.0)`, as written after discretization.
    Interval,
    Ignore,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnConfig {
    pub name: String,
    pub role: Role,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableConfig {
    pub path: PathBuf,
    #[serde(default = "default_delimiter")]
    pub delimiter: String,
    pub columns: Vec<ColumnConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationConfig {
    pub path: PathBuf,
    #[serde(default = "default_delimiter")]
    pub delimiter: String,
    pub source_column: String,
    pub target_column: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ignore: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemaConfig {
    pub source: TableConfig,
    pub target: TableConfig,
    pub relation: RelationConfig,
}

fn default_delimiter() -> String {
    ",".into()
}

fn delimiter_byte(d: &str) -> Result<u8> {
    match d {
        "\\t" | "\t" | "tab" => Ok(b'\t'),
        s if s.len() == 1 => Ok(s.as_bytes()[0]),
        other => Err(Error::Config(format!("delimiter must be one byte, got {other:?}"))),
    }
}

impl SchemaConfig {
    /// Reads a schema file; relative table paths resolve against its directory.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: SchemaConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut config.source.path, &mut config.target.path, &mut config.relation.path] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        for (label, table) in [("source", &self.source), ("target", &self.target)] {
            let ids = table.columns.iter().filter(|c| c.role == Role::Id).count();
            if ids != 1 {
                return Err(Error::Config(format!("{label} table needs exactly one id column, found {ids}")));
            }
            let mut names = HashSet::new();
            for c in &table.columns {
                if !names.insert(&c.name) {
                    return Err(Error::Config(format!("{label} column {:?} declared twice", c.name)));
                }
            }
            delimiter_byte(&table.delimiter)?;
        }
        delimiter_byte(&self.relation.delimiter)?;
        if self.relation.source_column == self.relation.target_column {
            return Err(Error::Config("relation source and target columns must differ".into()));
        }
        Ok(())
    }

    pub fn input_paths(&self) -> Vec<&Path> {
        vec![&self.source.path, &self.target.path, &self.relation.path]
    }

    pub fn id_column(&self, source: bool) -> &str {
        let table = if source { &self.source } else { &self.target };
        table
            .columns
            .iter()
            .find(|c| c.role == Role::Id)
            .map(|c| c.name.as_str())
            .expect("validated")
    }
}

fn reader(path: &Path, delimiter: &str) -> Result<csv::Reader<fs::File>> {
    csv::ReaderBuilder::new()
        .delimiter(delimiter_byte(delimiter)?)
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let row = e.position().map(|p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Data {
            path: path.to_path_buf(),
            row,
            message: format!("{other:?}"),
        },
    }
}

/// Header position of each configured column.
fn locate_columns(path: &Path, headers: &csv::StringRecord, wanted: &[&str]) -> Result<Vec<usize>> {
    for h in headers {
        if !wanted.contains(&h) {
            return Err(Error::Data {
                path: path.to_path_buf(),
                row: Some(1),
                message: format!("column {h:?} is not declared in the schema"),
            });
        }
    }
    wanted
        .iter()
        .map(|w| {
            headers.iter().position(|h| h == *w).ok_or_else(|| Error::Data {
                path: path.to_path_buf(),
                row: Some(1),
                message: format!("missing column {w:?}"),
            })
        })
        .collect()
}

pub fn load_table(table: &TableConfig) -> Result<InformationSystem> {
    let path = table.path.as_path();
    let mut rdr = reader(path, &table.delimiter)?;
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let names: Vec<&str> = table.columns.iter().map(|c| c.name.as_str()).collect();
    let positions = locate_columns(path, &headers, &names)?;

    let mut ids = Vec::new();
    let mut seen = HashSet::new();
    let attributes: Vec<(usize, Attribute)> = table
        .columns
        .iter()
        .zip(&positions)
        .filter_map(|(c, &pos)| {
            let kind = match c.role {
                Role::Nominal => AttributeKind::Nominal,
                Role::Numeric => AttributeKind::Numeric,
                Role::Interval => AttributeKind::Interval,
                Role::Id | Role::Ignore => return None,
            };
            Some((pos, Attribute::new(c.name.clone(), kind)))
        })
        .collect();
    let id_pos = table
        .columns
        .iter()
        .zip(&positions)
        .find(|(c, _)| c.role == Role::Id)
        .map(|(_, &p)| p)
        .ok_or_else(|| Error::Config("table has no id column".into()))?;

    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| csv_error(path, e))?;
        let id = record[id_pos].to_string();
        if !seen.insert(id.clone()) {
            return Err(Error::Data {
                path: path.to_path_buf(),
                row: Some(row),
                message: format!("duplicate id {id:?}"),
            });
        }
        ids.push(id);
        let cells = attributes
            .iter()
            .map(|(pos, attr)| parse_cell(path, row, attr, &record[*pos]))
            .collect::<Result<Vec<_>>>()?;
        rows.push(cells);
    }
    InformationSystem::new(ids, attributes.into_iter().map(|(_, a)| a).collect(), rows)
}

fn parse_cell(path: &Path, row: usize, attr: &Attribute, text: &str) -> Result<AttributeValue> {
    let parse_err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        row,
        column: attr.name.clone(),
        message,
    };
    match attr.kind {
        AttributeKind::Nominal => Ok(AttributeValue::nominal(text)),
        AttributeKind::Numeric => {
            let v: f64 = text
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("{text:?} is not a number")))?;
            AttributeValue::numeric(v).map_err(|e| parse_err(e.to_string()))
        }
        AttributeKind::Interval => Interval::parse_label(text)
            .map(AttributeValue::Interval)
            .map_err(|e| parse_err(e.to_string())),
    }
}

/// Counts gathered while reading a relation file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationStats {
    pub rows: usize,
    pub pairs: usize,
    pub duplicate_pairs: usize,
}

pub fn load_relation(
    config: &RelationConfig,
    source: &InformationSystem,
    target: &InformationSystem,
) -> Result<(BinaryRelation, RelationStats)> {
    let path = config.path.as_path();
    let mut rdr = reader(path, &config.delimiter)?;
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let mut wanted = vec![config.source_column.as_str(), config.target_column.as_str()];
    wanted.extend(config.ignore.iter().map(String::as_str));
    let positions = locate_columns(path, &headers, &wanted)?;
    let (sp, tp) = (positions[0], positions[1]);

    let mut pairs = Vec::new();
    let mut stats = RelationStats::default();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| csv_error(path, e))?;
        let lookup = |is: &InformationSystem, id: &str, side| {
            is.object_index(id).ok_or_else(|| Error::Referential {
                path: path.to_path_buf(),
                row,
                side,
                id: id.to_string(),
            })
        };
        let x = lookup(source, &record[sp], "source")?;
        let y = lookup(target, &record[tp], "target")?;
        pairs.push((x, y));
        stats.rows += 1;
    }
    let relation = BinaryRelation::from_pairs(source.len(), target.len(), pairs)?;
    stats.pairs = relation.pair_count();
    stats.duplicate_pairs = stats.rows - stats.pairs;
    Ok((relation, stats))
}

pub fn load_mmer(config: &SchemaConfig) -> Result<Mmer> {
    load_mmer_with_stats(config).map(|(m, _)| m)
}

pub fn load_mmer_with_stats(config: &SchemaConfig) -> Result<(Mmer, RelationStats)> {
    config.validate()?;
    let source = load_table(&config.source)?;
    let target = load_table(&config.target)?;
    let (relation, stats) = load_relation(&config.relation, &source, &target)?;
    Ok((Mmer::new(source, target, relation)?, stats))
}

/// Names used when writing an MMER back out.
#[derive(Clone, Debug)]
pub struct WriteOptions {
    pub source_id: String,
    pub target_id: String,
    pub source_file: String,
    pub target_file: String,
    pub relation_file: String,
}

impl Default for WriteOptions {
    fn default() -> Self {
        WriteOptions {
            source_id: "source_id".into(),
            target_id: "target_id".into(),
            source_file: "source.csv".into(),
            target_file: "target.csv".into(),
            relation_file: "relation.csv".into(),
        }
    }
}

fn role_of(kind: AttributeKind) -> Role {
    match kind {
        AttributeKind::Nominal => Role::Nominal,
        AttributeKind::Numeric => Role::Numeric,
        AttributeKind::Interval => Role::Interval,
    }
}

fn write_table(path: &Path, id_column: &str, is: &InformationSystem) -> Result<TableConfig> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut header = vec![id_column.to_string()];
    header.extend(is.attributes().iter().map(|a| a.name.clone()));
    w.write_record(&header).map_err(|e| csv_error(path, e))?;
    for (i, id) in is.object_ids().iter().enumerate() {
        let mut record = vec![id.clone()];
        record.extend((0..is.attributes().len()).map(|j| is.value(i, j).to_string()));
        w.write_record(&record).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    let mut columns = vec![ColumnConfig {
        name: id_column.to_string(),
        role: Role::Id,
    }];
    columns.extend(is.attributes().iter().map(|a| ColumnConfig {
        name: a.name.clone(),
        role: role_of(a.kind),
    }));
    Ok(TableConfig {
        path: PathBuf::from(path.file_name().expect("file path")),
        delimiter: ",".into(),
        columns,
    })
}

/// Writes three CSV files and `schema.toml` into `dir`; returns the schema path.
pub fn write_generic(mmer: &Mmer, dir: &Path, opts: &WriteOptions) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    if opts.source_id == opts.target_id {
        return Err(Error::Config("source and target id columns need distinct names".into()));
    }
    let source = write_table(&dir.join(&opts.source_file), &opts.source_id, &mmer.source)?;
    let target = write_table(&dir.join(&opts.target_file), &opts.target_id, &mmer.target)?;

    let rel_path = dir.join(&opts.relation_file);
    let mut w = csv::Writer::from_path(&rel_path).map_err(|e| csv_error(&rel_path, e))?;
    w.write_record([&opts.source_id, &opts.target_id])
        .map_err(|e| csv_error(&rel_path, e))?;
    for (x, y) in mmer.relation.pairs() {
        w.write_record([&mmer.source.object_ids()[x], &mmer.target.object_ids()[y]])
            .map_err(|e| csv_error(&rel_path, e))?;
    }
    w.flush().map_err(|e| Error::io(&rel_path, e))?;

    let schema = SchemaConfig {
        source,
        target,
        relation: RelationConfig {
            path: PathBuf::from(&opts.relation_file),
            delimiter: ",".into(),
            source_column: opts.source_id.clone(),
            target_column: opts.target_id.clone(),
            ignore: vec![],
        },
    };
    let schema_path = dir.join("schema.toml");
    let text = toml::to_string_pretty(&schema).map_err(|e| Error::Internal(e.to_string()))?;
    fs::write(&schema_path, text).map_err(|e| Error::io(&schema_path, e))?;
    Ok(schema_path)
}
