//! Reader for the MovieLens 100k distribution (`u.user`, `u.item`, `u.data`).
//!
//! Users become `(age, gender, occupation)`, movies `(releaseYear, genre)` and
//! the rates relation keeps every rated (user, movie) pair regardless of the
//! rating value. Titles, URLs, video dates, zip codes and timestamps are
//! dropped. Movies without a release date are excluded along with their
//! ratings.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::discretize::{BoundaryChain, DiscretizerSpec, SpecEntry};
use crate::error::{Error, Result};
use crate::model::{Attribute, AttributeKind, AttributeValue, BinaryRelation, InformationSystem, Mmer};

pub const AGE: &str = "age";
pub const GENDER: &str = "gender";
pub const OCCUPATION: &str = "occupation";
pub const RELEASE_YEAR: &str = "releaseYear";
pub const GENRE: &str = "genre";

/// Genre flag columns of `u.item`, in file order.
pub const GENRE_COLUMNS: [&str; 19] = [
    "unknown", "Action", "Adventure", "Animation", "Children's", "Comedy", "Crime", "Documentary",
    "Drama", "Fantasy", "Film-Noir", "Horror", "Musical", "Mystery", "Romance", "Sci-Fi",
    "Thriller", "War", "Western",
];

/// Highest priority first, as (flag column index, output label). Drama ranks
/// lowest, just above Unknown.
const GENRE_PRIORITY: [(usize, &str); 18] = [
    (5, "Comedy"),
    (1, "Action"),
    (16, "Thriller"),
    (14, "Romance"),
    (2, "Adventure"),
    (4, "Children"),
    (6, "Crime"),
    (15, "Sci-Fi"),
    (11, "Horror"),
    (17, "War"),
    (13, "Mystery"),
    (12, "Musical"),
    (7, "Documentary"),
    (3, "Animation"),
    (18, "Western"),
    (10, "FilmNoir"),
    (9, "Fantasy"),
    (8, "Drama"),
];

pub const UNKNOWN_GENRE: &str = "Unknown";

/// The single genre kept for a movie with the given flags.
pub fn collapse_genre(flags: &[bool; 19]) -> &'static str {
    GENRE_PRIORITY
        .iter()
        .find(|(col, _)| flags[*col])
        .map(|(_, label)| *label)
        .unwrap_or(UNKNOWN_GENRE)
}

/// Flag column that `label` stands for, if any.
pub fn genre_flag_index(label: &str) -> Option<usize> {
    GENRE_PRIORITY.iter().find(|(_, l)| *l == label).map(|(c, _)| *c)
}

/// GroupLens age bins `[0,18) [18,25) [25,30) [30,35) [35,45) [45,56) [56,∞)`
/// with ∞ replaced by the oldest observed age (57 if nobody is past 56).
pub fn grouplens_age_chain(max_age: f64) -> Result<BoundaryChain> {
    let top = if max_age > 56.0 { max_age } else { 57.0 };
    BoundaryChain::new(vec![0.0, 18.0, 25.0, 30.0, 35.0, 45.0, 56.0, top])
}

pub fn decade_label(year: i32) -> String {
    format!("{}s", year.div_euclid(10) * 10)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgeMode {
    /// GroupLens bins, applied as a manual chain.
    ManualGrouplens,
    /// Left numeric for Equal Width / Equal Frequency.
    #[default]
    Automatic,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YearMode {
    /// Nominal decade labels such as `1990s`.
    Decade,
    #[default]
    RawYear,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MovieLensOptions {
    pub data_dir: PathBuf,
    #[serde(default)]
    pub age_mode: AgeMode,
    #[serde(default)]
    pub year_mode: YearMode,
}

impl MovieLensOptions {
    pub fn new(data_dir: impl Into<PathBuf>) -> Self {
        MovieLensOptions {
            data_dir: data_dir.into(),
            age_mode: AgeMode::Automatic,
            year_mode: YearMode::RawYear,
        }
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.data_dir.join(name)
    }

    pub fn input_paths(&self) -> Vec<PathBuf> {
        ["u.user", "u.item", "u.data"].iter().map(|f| self.file(f)).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MovieLensStats {
    pub users: usize,
    pub movies_in_file: usize,
    pub movies_loaded: usize,
    /// Movie ids dropped for lacking a release date.
    pub excluded_movies: Vec<String>,
    pub rating_lines: usize,
    pub excluded_pairs: usize,
    pub duplicate_pairs: usize,
    pub relation_pairs: usize,
}

#[derive(Clone, Debug)]
pub struct MovieLens {
    pub mmer: Mmer,
    pub stats: MovieLensStats,
}

fn read_latin1(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(bytes.into_iter().map(char::from).collect())
}

fn data_err(path: &Path, row: usize, message: impl Into<String>) -> Error {
    Error::Data {
        path: path.to_path_buf(),
        row: Some(row),
        message: message.into(),
    }
}

fn non_empty_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.is_empty())
}

fn load_users(path: &Path) -> Result<InformationSystem> {
    let text = read_latin1(path)?;
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for (row, line) in non_empty_lines(&text) {
        let fields: Vec<&str> = line.split('|').collect();
        if fields.len() != 5 {
            return Err(data_err(path, row, format!("expected 5 fields, got {}", fields.len())));
        }
        let age: f64 = fields[1].parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            row,
            column: AGE.into(),
            message: format!("{:?} is not a number", fields[1]),
        })?;
        let gender = match fields[2] {
            "M" => "male",
            "F" => "female",
            other => return Err(data_err(path, row, format!("unknown gender {other:?}"))),
        };
        ids.push(fields[0].to_string());
        rows.push(vec![
            AttributeValue::numeric(age)?,
            AttributeValue::nominal(gender),
            AttributeValue::nominal(fields[3]),
        ]);
    }
    InformationSystem::new(
        ids,
        vec![
            Attribute::new(AGE, AttributeKind::Numeric),
            Attribute::new(GENDER, AttributeKind::Nominal),
            Attribute::new(OCCUPATION, AttributeKind::Nominal),
        ],
        rows,
    )
}

/// Year of a `dd-Mon-yyyy` date; `None` for an empty field.
fn release_year(field: &str) -> Option<std::result::Result<i32, ()>> {
    if field.trim().is_empty() {
        return None;
    }
    Some(field.rsplit('-').next().and_then(|y| y.parse().ok()).ok_or(()))
}

fn load_movies(path: &Path, year_mode: YearMode, stats: &mut MovieLensStats) -> Result<InformationSystem> {
    let text = read_latin1(path)?;
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    for (row, line) in non_empty_lines(&text) {
        let fields: Vec<&str> = line.split('|').collect();
        if fields.len() != 5 + GENRE_COLUMNS.len() {
            return Err(data_err(path, row, format!("expected 24 fields, got {}", fields.len())));
        }
        stats.movies_in_file += 1;
        let mut flags = [false; 19];
        for (flag, cell) in flags.iter_mut().zip(&fields[5..]) {
            *flag = match *cell {
                "0" => false,
                "1" => true,
                other => return Err(data_err(path, row, format!("genre flag {other:?} is not 0 or 1"))),
            };
        }
        let year = match release_year(fields[2]) {
            None => {
                stats.excluded_movies.push(fields[0].to_string());
                continue;
            }
            Some(Err(())) => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    row,
                    column: "release date".into(),
                    message: format!("cannot read a year from {:?}", fields[2]),
                })
            }
            Some(Ok(y)) => y,
        };
        let year_value = match year_mode {
            YearMode::RawYear => AttributeValue::numeric(year as f64)?,
            YearMode::Decade => AttributeValue::nominal(decade_label(year)),
        };
        ids.push(fields[0].to_string());
        rows.push(vec![year_value, AttributeValue::nominal(collapse_genre(&flags))]);
    }
    let year_kind = match year_mode {
        YearMode::RawYear => AttributeKind::Numeric,
        YearMode::Decade => AttributeKind::Nominal,
    };
    InformationSystem::new(
        ids,
        vec![
            Attribute::new(RELEASE_YEAR, year_kind),
            Attribute::new(GENRE, AttributeKind::Nominal),
        ],
        rows,
    )
}

pub fn load_movielens(opts: &MovieLensOptions) -> Result<MovieLens> {
    let mut stats = MovieLensStats::default();
    let users = load_users(&opts.file("u.user"))?;
    let movies = load_movies(&opts.file("u.item"), opts.year_mode, &mut stats)?;
    let excluded: HashMap<&str, ()> = stats.excluded_movies.iter().map(|m| (m.as_str(), ())).collect();

    let path = opts.file("u.data");
    let text = read_latin1(&path)?;
    let mut pairs = Vec::new();
    for (row, line) in non_empty_lines(&text) {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(data_err(&path, row, format!("expected 4 tab-separated fields, got {}", fields.len())));
        }
        stats.rating_lines += 1;
        let x = users.object_index(fields[0]).ok_or_else(|| Error::Referential {
            path: path.clone(),
            row,
            side: "user",
            id: fields[0].to_string(),
        })?;
        let y = match movies.object_index(fields[1]) {
            Some(y) => y,
            None if excluded.contains_key(fields[1]) => {
                stats.excluded_pairs += 1;
                continue;
            }
            None => {
                return Err(Error::Referential {
                    path: path.clone(),
                    row,
                    side: "movie",
                    id: fields[1].to_string(),
                })
            }
        };
        pairs.push((x, y));
    }
    let kept = pairs.len();
    let relation = BinaryRelation::from_pairs(users.len(), movies.len(), pairs)?;
    stats.relation_pairs = relation.pair_count();
    stats.duplicate_pairs = kept - stats.relation_pairs;
    stats.users = users.len();
    stats.movies_loaded = movies.len();
    if !stats.excluded_movies.is_empty() {
        log::warn!(
            "excluded {} movies without a release date ({} ratings)",
            stats.excluded_movies.len(),
            stats.excluded_pairs
        );
    }
    Ok(MovieLens {
        mmer: Mmer::new(users, movies, relation)?,
        stats,
    })
}

/// Per-side discretization for the MovieLens experiments.
///
/// `method` is a registry name applied with `k1` to the user side and `k2` to
/// the movie side. With [`AgeMode::ManualGrouplens`] the age gets the GroupLens
/// chain instead; with [`YearMode::Decade`] the year is already nominal.
pub fn discretizer_specs(
    opts: &MovieLensOptions,
    mmer: &Mmer,
    method: &str,
    k1: usize,
    k2: usize,
) -> Result<(DiscretizerSpec, DiscretizerSpec)> {
    let user = match opts.age_mode {
        AgeMode::ManualGrouplens => {
            let age = mmer.source.attribute_index(AGE).expect("users have an age column");
            let max = mmer
                .source
                .column(age)
                .iter()
                .filter_map(AttributeValue::as_numeric)
                .fold(f64::NEG_INFINITY, f64::max);
            let chain = grouplens_age_chain(max)?;
            DiscretizerSpec::new(vec![SpecEntry::manual(AGE, chain.boundaries().to_vec())])
        }
        AgeMode::Automatic => DiscretizerSpec::uniform(&mmer.source, method, k1),
    };
    let movie = DiscretizerSpec::uniform(&mmer.target, method, k2);
    Ok((user, movie))
}
