//! CSV ingestion: recipes map a headered CSV file onto a [`Dataset`] with
//! the study's model specification, outcome binarization, train/test split,
//! and optional desk-scale subsampling.
//!
//! Files are UTF-8 CSV with a header row and `.` decimal separator; the
//! field delimiter is per-recipe (the bank recipe defaults to `;` to match
//! the UCI export). Recipes themselves load from the flat `key = value`
//! format of [`crate::textkv`].

use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{apply_model_spec, Dataset, ModelError, ModelSpec, Transform};
use crate::textkv::{self, TextKvError};

/// Environment variable naming the directory that holds the data files.
pub const DATA_DIR_ENV: &str = "MESTBENCH_DATA_DIR";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("missing column `{0}` in the header row")]
    MissingColumn(String),
    #[error("row {row}, column `{col}`: cannot parse `{value}`")]
    ParseError { row: usize, col: String, value: String },
    #[error("split leaves an empty train or test set")]
    EmptySplit,
    #[error("outcome column `{col}` is not binary: {detail}")]
    OutcomeNotBinary { col: String, detail: String },
    #[error("recipe `{key}`: {msg}")]
    BadRecipe { key: String, msg: String },
    #[error(transparent)]
    Recipe(#[from] TextKvError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// How categorical labels become design columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coding {
    /// Sorted-unique labels map to 0..K-1 in a single column.
    Integer,
    /// K-1 indicator columns, first level dropped.
    OneHot,
}

/// What a recipe column contributes to the design.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnRole {
    Numeric(Transform),
    Categorical(Coding),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecipeColumn {
    pub name: String,
    pub role: ColumnRole,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SplitRule {
    /// First k rows train, the rest test.
    FirstK(usize),
    /// First round(f * n) rows train, the rest test (sequential).
    Fraction(f64),
    /// A column holding `train` / `test` (or 0 / 1) per row.
    Given(String),
}

/// Everything needed to turn one CSV file into a [`Dataset`].
#[derive(Debug, Clone)]
pub struct DatasetRecipe {
    pub name: String,
    pub source_path: PathBuf,
    pub outcome: String,
    /// Strictly-greater threshold binarizing the outcome, when present.
    pub binarize_over: Option<f64>,
    pub columns: Vec<RecipeColumn>,
    pub intercept: bool,
    pub split: SplitRule,
    /// Desk-scale row subsample: (count, seed).
    pub subsample: Option<(usize, u64)>,
    pub delimiter: u8,
}

impl DatasetRecipe {
    /// The four built-in recipes, with data files resolved under `data_dir`.
    pub fn builtin(name: &str, data_dir: &Path) -> Option<Self> {
        let numeric = |n: &str| RecipeColumn {
            name: n.to_string(),
            role: ColumnRole::Numeric(Transform::Identity),
        };
        let categorical = |n: &str| RecipeColumn {
            name: n.to_string(),
            role: ColumnRole::Categorical(Coding::Integer),
        };
        match name {
            "challenger" => Some(Self {
                name: "challenger".into(),
                source_path: data_dir.join("challenger.csv"),
                outcome: "stress".into(),
                binarize_over: Some(0.0),
                columns: vec![
                    numeric("temperature"),
                    RecipeColumn {
                        name: "pressure".into(),
                        role: ColumnRole::Numeric(Transform::LogSqrt),
                    },
                ],
                intercept: true,
                split: SplitRule::FirstK(18),
                subsample: None,
                delimiter: b',',
            }),
            "intoxication" => Some(Self {
                name: "intoxication".into(),
                source_path: data_dir.join("intoxication.csv"),
                outcome: "tac".into(),
                binarize_over: Some(0.08),
                columns: vec![numeric("x"), numeric("y"), numeric("z")],
                intercept: true,
                split: SplitRule::Fraction(0.8),
                subsample: None,
                delimiter: b',',
            }),
            "higgs" => Some(Self {
                name: "higgs".into(),
                source_path: data_dir.join("higgs.csv"),
                outcome: "label".into(),
                binarize_over: None,
                columns: (1..=28).map(|i| numeric(&format!("f{i}"))).collect(),
                intercept: true,
                split: SplitRule::Fraction(0.8),
                subsample: Some((20_000, 20_260)),
                delimiter: b',',
            }),
            "bank" => Some(Self {
                name: "bank".into(),
                source_path: data_dir.join("bank.csv"),
                outcome: "y".into(),
                binarize_over: None,
                columns: vec![
                    categorical("job"),
                    categorical("marital"),
                    categorical("education"),
                    categorical("default"),
                    numeric("balance"),
                    categorical("housing"),
                    categorical("loan"),
                    numeric("campaign"),
                ],
                intercept: true,
                split: SplitRule::Fraction(0.8),
                subsample: None,
                delimiter: b';',
            }),
            _ => None,
        }
    }

    pub fn builtin_names() -> [&'static str; 4] {
        ["intoxication", "higgs", "challenger", "bank"]
    }

    /// Load a recipe from a flat `key = value` file. Relative source paths
    /// resolve against `data_dir`.
    pub fn from_file(path: &Path, data_dir: &Path) -> Result<Self, IngestError> {
        let text = std::fs::read_to_string(path)?;
        let entries = textkv::parse(&text)?;
        let get = |key: &str| textkv::get(&entries, None, key).map(|e| e.value.clone());
        let require = |key: &str| {
            get(key).ok_or_else(|| IngestError::BadRecipe {
                key: key.to_string(),
                msg: "missing required key".to_string(),
            })
        };

        let name = require("name")?;
        let source = require("source")?;
        let source_path = {
            let p = PathBuf::from(&source);
            if p.is_absolute() {
                p
            } else {
                data_dir.join(p)
            }
        };
        let outcome = require("outcome")?;
        let binarize_over = match get("binarize_over") {
            None => None,
            Some(v) => Some(v.parse::<f64>().map_err(|_| IngestError::BadRecipe {
                key: "binarize_over".into(),
                msg: format!("not a number: `{v}`"),
            })?),
        };
        let mut columns = Vec::new();
        for item in textkv::split_list(&require("columns")?) {
            let (col, role) = item.split_once(':').ok_or_else(|| IngestError::BadRecipe {
                key: "columns".into(),
                msg: format!("expected `name:role`, got `{item}`"),
            })?;
            let role = match role.trim() {
                "categorical" => ColumnRole::Categorical(Coding::Integer),
                "categorical_onehot" => ColumnRole::Categorical(Coding::OneHot),
                other => ColumnRole::Numeric(Transform::parse(other).ok_or_else(|| {
                    IngestError::BadRecipe {
                        key: "columns".into(),
                        msg: format!("unknown role `{other}` for column `{col}`"),
                    }
                })?),
            };
            columns.push(RecipeColumn { name: col.trim().to_string(), role });
        }
        if columns.is_empty() {
            return Err(IngestError::BadRecipe {
                key: "columns".into(),
                msg: "at least one column required".into(),
            });
        }
        let split_raw = require("split")?;
        let split = parse_split(&split_raw)?;
        let subsample = match get("subsample") {
            None => None,
            Some(v) => {
                let (count, seed) = v.split_once(':').ok_or_else(|| IngestError::BadRecipe {
                    key: "subsample".into(),
                    msg: format!("expected `count:seed`, got `{v}`"),
                })?;
                let parse_err = |what: &str| IngestError::BadRecipe {
                    key: "subsample".into(),
                    msg: format!("cannot parse {what} in `{v}`"),
                };
                Some((
                    count.trim().parse::<usize>().map_err(|_| parse_err("count"))?,
                    seed.trim().parse::<u64>().map_err(|_| parse_err("seed"))?,
                ))
            }
        };
        let delimiter = match get("delimiter") {
            None => b',',
            Some(v) if v.len() == 1 => v.as_bytes()[0],
            Some(v) => {
                return Err(IngestError::BadRecipe {
                    key: "delimiter".into(),
                    msg: format!("must be a single character, got `{v}`"),
                })
            }
        };
        let intercept = match get("intercept").as_deref() {
            None | Some("true") => true,
            Some("false") => false,
            Some(v) => {
                return Err(IngestError::BadRecipe {
                    key: "intercept".into(),
                    msg: format!("expected true/false, got `{v}`"),
                })
            }
        };
        Ok(Self {
            name,
            source_path,
            outcome,
            binarize_over,
            columns,
            intercept,
            split,
            subsample,
            delimiter,
        })
    }

    pub fn load(&self) -> Result<Dataset, IngestError> {
        load_csv(self)
    }
}

fn parse_split(raw: &str) -> Result<SplitRule, IngestError> {
    let bad = |msg: String| IngestError::BadRecipe { key: "split".into(), msg };
    let (kind, arg) = raw
        .split_once(':')
        .ok_or_else(|| bad(format!("expected `first_k:N`, `fraction:F`, or `given:COL`, got `{raw}`")))?;
    match kind.trim() {
        "first_k" => arg
            .trim()
            .parse::<usize>()
            .map(SplitRule::FirstK)
            .map_err(|_| bad(format!("bad count `{arg}`"))),
        "fraction" => {
            let f = arg.trim().parse::<f64>().map_err(|_| bad(format!("bad fraction `{arg}`")))?;
            if f > 0.0 && f < 1.0 {
                Ok(SplitRule::Fraction(f))
            } else {
                Err(bad(format!("fraction must lie in (0, 1), got {f}")))
            }
        }
        "given" => Ok(SplitRule::Given(arg.trim().to_string())),
        other => Err(bad(format!("unknown split kind `{other}`"))),
    }
}

/// Encoded design columns for one categorical raw column.
#[derive(Debug, Clone)]
pub struct EncodedColumn {
    /// One or more design columns.
    pub columns: Vec<Vec<f64>>,
    /// Sorted-unique level labels.
    pub labels: Vec<String>,
    /// Set when the column had a single level (encodes as constant zero).
    pub degenerate: bool,
}

/// Encode a categorical column. Integer coding maps sorted-unique labels
/// to 0..K-1 in one column; one-hot emits K-1 indicator columns dropping
/// the first (lexicographically smallest) level.
pub fn encode_categoricals(values: &[String], coding: Coding) -> EncodedColumn {
    let mut labels: Vec<String> = values.to_vec();
    labels.sort();
    labels.dedup();
    let degenerate = labels.len() <= 1;
    let columns = if degenerate {
        vec![vec![0.0; values.len()]]
    } else {
        match coding {
            Coding::Integer => {
                let code = |v: &String| labels.binary_search(v).unwrap() as f64;
                vec![values.iter().map(code).collect()]
            }
            Coding::OneHot => labels[1..]
                .iter()
                .map(|level| values.iter().map(|v| f64::from(v == level)).collect())
                .collect(),
        }
    };
    EncodedColumn { columns, labels, degenerate }
}

/// Load, binarize, subsample, split, transform, and standardize.
pub fn load_csv(recipe: &DatasetRecipe) -> Result<Dataset, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(recipe.delimiter)
        .trim(csv::Trim::All)
        .from_path(&recipe.source_path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(|h| h.to_string()).collect();
    let col_index = |name: &str| -> Result<usize, IngestError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
    };
    let outcome_idx = col_index(&recipe.outcome)?;
    let column_idx: Vec<usize> =
        recipe.columns.iter().map(|c| col_index(&c.name)).collect::<Result<_, _>>()?;
    let split_col_idx = match &recipe.split {
        SplitRule::Given(col) => Some(col_index(col)?),
        _ => None,
    };

    let mut records: Vec<csv::StringRecord> = Vec::new();
    for record in reader.records() {
        records.push(record?);
    }
    if records.is_empty() {
        return Err(IngestError::EmptySplit);
    }

    // Desk-scale subsample: draw without replacement, keep original order.
    let rows: Vec<usize> = match recipe.subsample {
        Some((count, seed)) if count < records.len() => {
            let mut idx: Vec<usize> = (0..records.len()).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in 0..count {
                let j = i + rng.random_range(0..idx.len() - i);
                idx.swap(i, j);
            }
            let mut chosen = idx[..count].to_vec();
            chosen.sort_unstable();
            chosen
        }
        _ => (0..records.len()).collect(),
    };
    let n = rows.len();

    let field = |record_row: usize, idx: usize| -> &str {
        records[record_row].get(idx).unwrap_or("")
    };

    // Outcome: numeric when it parses, otherwise a two-level categorical.
    let outcome_raw: Vec<&str> = rows.iter().map(|&r| field(r, outcome_idx)).collect();
    let all_numeric = outcome_raw.iter().all(|v| v.parse::<f64>().is_ok());
    let y: Array1<f64> = if all_numeric {
        let vals: Vec<f64> = outcome_raw.iter().map(|v| v.parse::<f64>().unwrap()).collect();
        match recipe.binarize_over {
            Some(threshold) => Array1::from_iter(
                vals.iter().map(|&v| if v > threshold { 1.0 } else { 0.0 }),
            ),
            None => {
                if let Some(pos) = vals.iter().position(|&v| v != 0.0 && v != 1.0) {
                    return Err(IngestError::OutcomeNotBinary {
                        col: recipe.outcome.clone(),
                        detail: format!("value {} at data row {}", vals[pos], rows[pos] + 1),
                    });
                }
                Array1::from_vec(vals)
            }
        }
    } else {
        if recipe.binarize_over.is_some() {
            let bad = outcome_raw
                .iter()
                .enumerate()
                .find(|(_, v)| v.parse::<f64>().is_err())
                .expect("non-numeric value exists");
            return Err(IngestError::ParseError {
                row: rows[bad.0] + 1,
                col: recipe.outcome.clone(),
                value: bad.1.to_string(),
            });
        }
        let labels: Vec<String> = outcome_raw.iter().map(|v| v.to_string()).collect();
        let encoded = encode_categoricals(&labels, Coding::Integer);
        if encoded.labels.len() != 2 {
            return Err(IngestError::OutcomeNotBinary {
                col: recipe.outcome.clone(),
                detail: format!("{} levels: {:?}", encoded.labels.len(), encoded.labels),
            });
        }
        Array1::from_vec(encoded.columns[0].clone())
    };

    // Split.
    let (train_idx, test_idx): (Vec<usize>, Vec<usize>) = match &recipe.split {
        SplitRule::FirstK(k) => {
            if *k == 0 || *k >= n {
                return Err(IngestError::EmptySplit);
            }
            ((0..*k).collect(), (*k..n).collect())
        }
        SplitRule::Fraction(f) => {
            let k = ((f * n as f64).round() as usize).clamp(1, n.saturating_sub(1));
            if n < 2 {
                return Err(IngestError::EmptySplit);
            }
            ((0..k).collect(), (k..n).collect())
        }
        SplitRule::Given(col) => {
            let idx = split_col_idx.expect("resolved above");
            let mut train = Vec::new();
            let mut test = Vec::new();
            for (pos, &r) in rows.iter().enumerate() {
                match field(r, idx) {
                    "train" | "0" => train.push(pos),
                    "test" | "1" => test.push(pos),
                    other => {
                        return Err(IngestError::ParseError {
                            row: r + 1,
                            col: col.clone(),
                            value: other.to_string(),
                        })
                    }
                }
            }
            if train.is_empty() || test.is_empty() {
                return Err(IngestError::EmptySplit);
            }
            (train, test)
        }
    };

    // Raw design columns in recipe order.
    let mut raw_cols: Vec<Vec<f64>> = Vec::new();
    let mut transforms: Vec<Transform> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    for (c, spec_col) in recipe.columns.iter().enumerate() {
        let idx = column_idx[c];
        match &spec_col.role {
            ColumnRole::Numeric(t) => {
                let mut col = Vec::with_capacity(n);
                for &r in &rows {
                    let v = field(r, idx);
                    col.push(v.parse::<f64>().map_err(|_| IngestError::ParseError {
                        row: r + 1,
                        col: spec_col.name.clone(),
                        value: v.to_string(),
                    })?);
                }
                raw_cols.push(col);
                transforms.push(*t);
                names.push(spec_col.name.clone());
            }
            ColumnRole::Categorical(coding) => {
                let values: Vec<String> =
                    rows.iter().map(|&r| field(r, idx).to_string()).collect();
                let encoded = encode_categoricals(&values, *coding);
                match coding {
                    Coding::Integer => names.push(spec_col.name.clone()),
                    Coding::OneHot => {
                        if encoded.degenerate {
                            names.push(spec_col.name.clone());
                        } else {
                            for level in &encoded.labels[1..] {
                                names.push(format!("{}={}", spec_col.name, level));
                            }
                        }
                    }
                }
                for col in encoded.columns {
                    raw_cols.push(col);
                    transforms.push(Transform::Identity);
                }
            }
        }
    }

    let q = raw_cols.len();
    let raw = Array2::from_shape_fn((n, q), |(i, j)| raw_cols[j][i]);
    let spec = ModelSpec::new(transforms, recipe.intercept);
    let (design, _) = apply_model_spec(&raw, &spec, Some(&train_idx))?;
    let col_names = if recipe.intercept {
        std::iter::once("Intercept".to_string()).chain(names).collect()
    } else {
        names
    };
    Ok(Dataset::new(design, y, train_idx, test_idx, recipe.intercept, col_names)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(dir: &Path, name: &str, content: &str) -> PathBuf {
        let path = dir.join(name);
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        path
    }

    /// 23 synthetic rows shaped like the shuttle table (all values made up).
    fn challenger_like_csv() -> String {
        let mut out = String::from("stress,temperature,pressure\n");
        for i in 0..23 {
            let temp = 55.0 + (i as f64 * 7.0) % 27.0;
            let stress = u8::from(temp < 65.0);
            let pressure = 50.0 + 50.0 * ((i % 3) as f64);
            out.push_str(&format!("{stress},{temp},{pressure}\n"));
        }
        out
    }

    #[test]
    fn first_k_split_matches_the_shuttle_recipe() {
        let dir = tempfile::tempdir().unwrap();
        write_csv(dir.path(), "challenger.csv", &challenger_like_csv());
        let recipe = DatasetRecipe::builtin("challenger", dir.path()).unwrap();
        let d = recipe.load().unwrap();
        assert_eq!(d.train_idx.len(), 18);
        assert_eq!(d.test_idx.len(), 5);
        assert_eq!(d.n(), 23);
        assert_eq!(d.col_names, vec!["Intercept", "temperature", "pressure"]);
    }

    #[test]
    fn binarization_is_strictly_greater() {
        let dir = tempfile::tempdir().unwrap();
        let content = "tac,x,y,z\n0.09,1,2,3\n0.08,4,5,6\n0.0,7,8,9\n0.2,1,1,1\n0.3,2,2,2\n";
        write_csv(dir.path(), "intoxication.csv", content);
        let mut recipe = DatasetRecipe::builtin("intoxication", dir.path()).unwrap();
        recipe.split = SplitRule::Fraction(0.6);
        let d = recipe.load().unwrap();
        assert_eq!(d.y.to_vec(), vec![1.0, 0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn missing_outcome_column_is_named() {
        let dir = tempfile::tempdir().unwrap();
        write_csv(dir.path(), "challenger.csv", "temp,pressure\n60,50\n");
        let recipe = DatasetRecipe::builtin("challenger", dir.path()).unwrap();
        match recipe.load() {
            Err(IngestError::MissingColumn(col)) => assert_eq!(col, "stress"),
            other => panic!("expected MissingColumn, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_row_and_column() {
        let dir = tempfile::tempdir().unwrap();
        let content = "stress,temperature,pressure\n1,60,100\n0,not_a_number,100\n1,70,100\n0,71,100\n";
        write_csv(dir.path(), "challenger.csv", content);
        let mut recipe = DatasetRecipe::builtin("challenger", dir.path()).unwrap();
        recipe.split = SplitRule::Fraction(0.5);
        match recipe.load() {
            Err(IngestError::ParseError { row, col, value }) => {
                assert_eq!(row, 2);
                assert_eq!(col, "temperature");
                assert_eq!(value, "not_a_number");
            }
            other => panic!("expected ParseError, got {other:?}"),
        }
    }

    #[test]
    fn integer_coding_is_lexicographic() {
        let values: Vec<String> =
            ["married", "single", "divorced", "married"].iter().map(|s| s.to_string()).collect();
        let enc = encode_categoricals(&values, Coding::Integer);
        assert_eq!(enc.labels, vec!["divorced", "married", "single"]);
        assert_eq!(enc.columns[0], vec![1.0, 2.0, 0.0, 1.0]);
        assert!(!enc.degenerate);
    }

    #[test]
    fn single_level_columns_are_flagged_degenerate() {
        let values: Vec<String> = vec!["only".into(); 4];
        let enc = encode_categoricals(&values, Coding::Integer);
        assert!(enc.degenerate);
        assert_eq!(enc.columns[0], vec![0.0; 4]);
    }

    #[test]
    fn onehot_drops_the_first_level() {
        let values: Vec<String> =
            ["a", "b", "c", "a", "b"].iter().map(|s| s.to_string()).collect();
        let enc = encode_categoricals(&values, Coding::OneHot);
        assert_eq!(enc.columns.len(), 2);
        for i in 0..values.len() {
            let sum: f64 = enc.columns.iter().map(|c| c[i]).sum();
            assert!(sum <= 1.0);
        }
        // Row 0 is level "a" (dropped): all indicators zero.
        assert_eq!(enc.columns[0][0] + enc.columns[1][0], 0.0);
    }

    #[test]
    fn loading_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        write_csv(dir.path(), "challenger.csv", &challenger_like_csv());
        let recipe = DatasetRecipe::builtin("challenger", dir.path()).unwrap();
        let a = recipe.load().unwrap();
        let b = recipe.load().unwrap();
        assert_eq!(a.design, b.design);
        assert_eq!(a.y, b.y);
    }

    /// Standardization statistics come only from the training split:
    /// permuting test rows leaves the training block untouched.
    #[test]
    fn no_test_leakage_into_standardization() {
        let dir = tempfile::tempdir().unwrap();
        let base = "stress,temperature,pressure\n1,55,50\n0,70,100\n1,58,50\n0,72,100\n0,75,200\n1,52,50\n";
        let permuted = "stress,temperature,pressure\n1,55,50\n0,70,100\n1,58,50\n0,72,100\n1,52,50\n0,75,200\n";
        let pa = write_csv(dir.path(), "a.csv", base);
        let pb = write_csv(dir.path(), "b.csv", permuted);
        let mut recipe = DatasetRecipe::builtin("challenger", dir.path()).unwrap();
        recipe.split = SplitRule::FirstK(4);
        recipe.source_path = pa;
        let a = recipe.load().unwrap();
        recipe.source_path = pb;
        let b = recipe.load().unwrap();
        for &i in &a.train_idx {
            for j in 0..a.design.ncols() {
                assert_eq!(a.design[[i, j]], b.design[[i, j]]);
            }
        }
    }

    #[test]
    fn categorical_outcome_maps_two_levels() {
        let dir = tempfile::tempdir().unwrap();
        let content = "y;job;marital;education;default;balance;housing;loan;campaign\n\
                       no;admin;married;primary;no;100;yes;no;1\n\
                       yes;tech;single;secondary;no;200;no;no;2\n\
                       no;admin;married;tertiary;yes;-50;yes;yes;3\n\
                       yes;services;divorced;primary;no;0;no;no;1\n";
        write_csv(dir.path(), "bank.csv", content);
        let mut recipe = DatasetRecipe::builtin("bank", dir.path()).unwrap();
        recipe.split = SplitRule::Fraction(0.5);
        let d = recipe.load().unwrap();
        // Lexicographic: no -> 0, yes -> 1.
        assert_eq!(d.y.to_vec(), vec![0.0, 1.0, 0.0, 1.0]);
        assert_eq!(d.n_params(), 9); // intercept + 8 predictors
    }

    #[test]
    fn subsample_is_seeded_and_order_preserving() {
        let dir = tempfile::tempdir().unwrap();
        let mut content = String::from("label");
        for i in 1..=28 {
            content.push_str(&format!(",f{i}"));
        }
        content.push('\n');
        for r in 0..50 {
            content.push_str(&format!("{}", r % 2));
            for i in 1..=28 {
                content.push_str(&format!(",{}", (r * i) as f64 * 0.01));
            }
            content.push('\n');
        }
        write_csv(dir.path(), "higgs.csv", &content);
        let mut recipe = DatasetRecipe::builtin("higgs", dir.path()).unwrap();
        recipe.subsample = Some((20, 7));
        let a = recipe.load().unwrap();
        let b = recipe.load().unwrap();
        assert_eq!(a.n(), 20);
        assert_eq!(a.design, b.design);
        assert_eq!(a.train_idx.len(), 16);
        assert_eq!(a.test_idx.len(), 4);
    }

    #[test]
    fn recipe_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let recipe_text = "\
# synthetic example recipe
name = toy
source = toy.csv
outcome = label
binarize_over = 0.5
columns = a:identity, b:log_sqrt, c:categorical
split = first_k:3
delimiter = ,
";
        let path = write_csv(dir.path(), "toy.recipe", recipe_text);
        let recipe = DatasetRecipe::from_file(&path, dir.path()).unwrap();
        assert_eq!(recipe.name, "toy");
        assert_eq!(recipe.outcome, "label");
        assert_eq!(recipe.binarize_over, Some(0.5));
        assert_eq!(recipe.columns.len(), 3);
        assert_eq!(recipe.split, SplitRule::FirstK(3));
        assert_eq!(recipe.source_path, dir.path().join("toy.csv"));

        write_csv(
            dir.path(),
            "toy.csv",
            "label,a,b,c\n0.7,1,4,u\n0.2,2,9,v\n0.9,3,16,u\n0.1,4,25,w\n",
        );
        let d = recipe.load().unwrap();
        assert_eq!(d.y.to_vec(), vec![1.0, 0.0, 1.0, 0.0]);
        assert_eq!(d.train_idx.len(), 3);
        assert_eq!(d.test_idx.len(), 1);
    }

    #[test]
    fn bad_recipe_keys_are_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_csv(dir.path(), "bad.recipe", "name = x\nsource = x.csv\n");
        match DatasetRecipe::from_file(&path, dir.path()) {
            Err(IngestError::BadRecipe { key, .. }) => assert_eq!(key, "outcome"),
            other => panic!("expected BadRecipe, got {other:?}"),
        }
    }

    #[test]
    fn given_split_reads_the_marker_column() {
        let dir = tempfile::tempdir().unwrap();
        let recipe_text = "\
name = marked
source = marked.csv
outcome = label
columns = a:identity
split = given:fold
";
        let path = write_csv(dir.path(), "marked.recipe", recipe_text);
        write_csv(
            dir.path(),
            "marked.csv",
            "label,a,fold\n1,0.1,train\n0,0.2,test\n1,0.3,train\n0,0.4,train\n",
        );
        let recipe = DatasetRecipe::from_file(&path, dir.path()).unwrap();
        let d = recipe.load().unwrap();
        assert_eq!(d.train_idx, vec![0, 2, 3]);
        assert_eq!(d.test_idx, vec![1]);
    }
}
