use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::KindHint;
use crate::domain::{Domain, VarId};
use crate::error::{Error, Result};
use crate::indep::{ColumnKind, Dataset};

/// Integer columns with at most this many distinct values are read as
/// categorical unless overridden.
pub const CATEGORICAL_MAX_LEVELS: usize = 10;

/// Reads a header-first CSV. Column kinds come from `overrides` when named
/// there and are inferred otherwise.
pub fn read_csv<R: Read>(reader: R, overrides: &BTreeMap<String, KindHint>) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let names: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let domain = Domain::new(names)?;
    let unknown: Vec<String> = overrides.keys().filter(|k| domain.id(k).is_none()).cloned().collect();
    if !unknown.is_empty() {
        return Err(Error::UnknownVariables(unknown));
    }
    let mut columns = vec![Vec::new(); domain.len()];
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec?;
        for (c, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                Error::Parse(format!(
                    "row {}, column `{}`: `{field}` is not a number",
                    r + 1,
                    domain.names()[c]
                ))
            })?;
            columns[c].push(v);
        }
    }
    if columns.first().is_none_or(Vec::is_empty) {
        return Err(Error::InvalidData("CSV has no data rows".into()));
    }
    let kinds = columns
        .iter()
        .enumerate()
        .map(|(c, col)| {
            let name = domain.name(VarId(c));
            column_kind(name, col, overrides.get(name).copied())
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(domain, kinds, columns)
}

fn column_kind(name: &str, col: &[f64], hint: Option<KindHint>) -> Result<ColumnKind> {
    let integral = col
        .iter()
        .all(|v| *v >= 0.0 && v.fract() == 0.0 && *v <= u32::MAX as f64);
    match hint {
        Some(KindHint::Continuous) => Ok(ColumnKind::Continuous),
        Some(KindHint::Categorical) if !integral => Err(Error::InvalidData(format!(
            "column `{name}` is declared categorical but holds non-integer values"
        ))),
        Some(KindHint::Categorical) => Ok(categorical(col)),
        None if integral
            && col.iter().map(|v| v.to_bits()).collect::<BTreeSet<_>>().len() <= CATEGORICAL_MAX_LEVELS =>
        {
            Ok(categorical(col))
        }
        None => Ok(ColumnKind::Continuous),
    }
}

fn categorical(col: &[f64]) -> ColumnKind {
    let max = col.iter().fold(0.0f64, |m, v| m.max(*v));
    ColumnKind::Categorical {
        cardinality: max as usize + 1,
    }
}

pub fn read_csv_path(path: &Path, overrides: &BTreeMap<String, KindHint>) -> Result<Dataset> {
    read_csv(File::open(path)?, overrides)
}

/// Writes the header and rows; categorical cells as integers, continuous
/// cells in shortest round-trip form.
pub fn write_csv<W: Write>(writer: W, data: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(data.domain().names())?;
    let kinds = data.kinds();
    for r in 0..data.n_rows() {
        let row = data.row(r);
        w.write_record(row.iter().zip(kinds).map(|(v, k)| match k {
            ColumnKind::Categorical { .. } => format!("{}", *v as u64),
            ColumnKind::Continuous => format!("{v:?}"),
        }))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_path(path: &Path, data: &Dataset) -> Result<()> {
    write_csv(File::create(path)?, data)
}
