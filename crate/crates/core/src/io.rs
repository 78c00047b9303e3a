//! CSV tables and model files.
//!
//! CSV dialect: comma separated, RFC 4180 quoting, mandatory header, UTF-8.

use std::collections::HashMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use crate::bn::{ancestral_sample_with, SampleRequest};
use crate::copula::{sample_copula_with, CopulaModel, COPULA_TAG};
use crate::error::{Error, Result};
use crate::model::{BayesNet, BAYES_NET_TAG};
use crate::par::Execution;
use crate::schema::{CategoricalSchema, VariableKind, VariableSpec};
use crate::table::DataTable;

fn csv_input_error(e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::UnequalLengths { pos, expected_len, len } => Error::input(format!(
            "ragged CSV: line {} has {len} fields, header has {expected_len}",
            pos.as_ref().map_or(0, |p| p.line())
        )),
        csv::ErrorKind::Utf8 { pos, .. } => Error::input(format!(
            "CSV is not valid UTF-8 at line {}",
            pos.as_ref().map_or(0, |p| p.line())
        )),
        _ => Error::Csv(e),
    }
}

/// Reads a CSV table. Without a schema, every column becomes nominal with its
/// distinct values in first-appearance order. With a schema, the header must
/// name exactly the schema variables (any order) and every value must be a
/// declared category.
pub fn read_csv<R: Read>(reader: R, schema: Option<&CategoricalSchema>) -> Result<DataTable> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(reader);
    let header: Vec<String> = rdr.headers().map_err(csv_input_error)?.iter().map(str::to_string).collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(Error::input("CSV header row is missing"));
    }
    for (i, h) in header.iter().enumerate() {
        if header[..i].contains(h) {
            return Err(Error::input(format!("duplicate CSV column `{h}`")));
        }
    }

    let mut records: Vec<csv::StringRecord> = Vec::new();
    for rec in rdr.records() {
        records.push(rec.map_err(csv_input_error)?);
    }
    let check_cell = |row: usize, col: usize, cell: &str| -> Result<()> {
        if cell.is_empty() {
            return Err(Error::input(format!("empty value at data row {} column `{}`", row + 1, header[col])));
        }
        Ok(())
    };

    match schema {
        None => {
            let mut cats: Vec<Vec<String>> = vec![Vec::new(); header.len()];
            let mut lookup: Vec<HashMap<String, usize>> = vec![HashMap::new(); header.len()];
            let mut values = Vec::with_capacity(records.len() * header.len());
            for (r, rec) in records.iter().enumerate() {
                for (c, cell) in rec.iter().enumerate() {
                    check_cell(r, c, cell)?;
                    let next = cats[c].len();
                    let idx = *lookup[c].entry(cell.to_string()).or_insert_with(|| {
                        cats[c].push(cell.to_string());
                        next
                    });
                    values.push(idx);
                }
            }
            let vars = header
                .iter()
                .zip(cats)
                .map(|(name, categories)| VariableSpec { name: name.clone(), kind: VariableKind::Nominal, categories })
                .collect();
            let schema = CategoricalSchema::new(vars)
                .map_err(|e| Error::input(format!("cannot infer schema: {e}")))?;
            DataTable::from_flat(Arc::new(schema), values)
        }
        Some(schema) => {
            if header.len() != schema.len() {
                return Err(Error::input(format!(
                    "CSV has {} columns, schema has {} variables",
                    header.len(),
                    schema.len()
                )));
            }
            // csv column -> schema variable
            let map: Vec<usize> = header
                .iter()
                .map(|h| {
                    schema
                        .index_of(h)
                        .ok_or_else(|| Error::input(format!("CSV column `{h}` is not in the schema")))
                })
                .collect::<Result<_>>()?;
            let lookups: Vec<HashMap<&str, usize>> = schema
                .variables()
                .iter()
                .map(|v| v.categories.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect())
                .collect();
            let w = schema.len();
            let mut values = vec![0usize; records.len() * w];
            for (r, rec) in records.iter().enumerate() {
                for (c, cell) in rec.iter().enumerate() {
                    check_cell(r, c, cell)?;
                    let var = map[c];
                    let idx = *lookups[var].get(cell).ok_or_else(|| {
                        Error::input(format!(
                            "unknown category `{cell}` at data row {} column `{}`; valid labels: {}",
                            r + 1,
                            header[c],
                            schema.variable(var).categories.join(", ")
                        ))
                    })?;
                    values[r * w + var] = idx;
                }
            }
            DataTable::from_flat(Arc::new(schema.clone()), values)
        }
    }
}

pub fn ingest_csv(path: &Path, schema: Option<&CategoricalSchema>) -> Result<DataTable> {
    let f = fs::File::open(path).map_err(|e| Error::input(format!("cannot open {}: {e}", path.display())))?;
    read_csv(std::io::BufReader::new(f), schema)
}

/// Writes labels (not indices), header first, columns in schema order.
pub fn write_csv<W: Write>(table: &DataTable, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let schema = table.schema();
    w.write_record(schema.names())?;
    for row in table.rows() {
        w.write_record(row.iter().enumerate().map(|(c, &v)| schema.variable(c).categories[v].as_str()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn export_csv(table: &DataTable, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_csv(table, &mut buf)?;
    write_bytes(path, &buf)
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, bytes)?;
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))
}

pub fn load_schema(path: &Path) -> Result<CategoricalSchema> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

pub fn load_dag(path: &Path) -> Result<crate::dag::Dag> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

/// Any fitted synthesizer that can be persisted and sampled.
#[derive(Clone, Debug, PartialEq)]
pub enum SynthModel {
    BayesNet(BayesNet),
    Copula(CopulaModel),
}

impl SynthModel {
    pub fn schema(&self) -> &CategoricalSchema {
        match self {
            SynthModel::BayesNet(m) => m.schema(),
            SynthModel::Copula(m) => m.schema(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        match self {
            SynthModel::BayesNet(m) => m.to_json(),
            SynthModel::Copula(m) => m.to_json(),
        }
    }

    /// Dispatches on the document's `model` tag.
    pub fn from_json(s: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s)?;
        match v.get("model").and_then(|m| m.as_str()) {
            Some(BAYES_NET_TAG) => Ok(SynthModel::BayesNet(BayesNet::from_json(s)?)),
            Some(COPULA_TAG) => Ok(SynthModel::Copula(CopulaModel::from_json(s)?)),
            Some(other) => Err(Error::input(format!("unknown model kind `{other}`"))),
            None => Err(Error::input("model document lacks a `model` field")),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        SynthModel::from_json(&read_text(path)?)
    }

    pub fn sample(&self, n_rows: usize, seed: u64, exec: Execution) -> Result<DataTable> {
        match self {
            SynthModel::BayesNet(m) => ancestral_sample_with(m, SampleRequest::new(n_rows, seed)?, exec),
            SynthModel::Copula(m) => sample_copula_with(m, n_rows, seed, exec),
        }
    }
}
