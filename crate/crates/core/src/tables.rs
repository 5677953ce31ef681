//! Reference tables with embedded expected values, and their reproduction.

use crate::field::{Field, FieldError, FieldInfo};
use crate::functions::{build, subfield_branch_inverse, Construction, FunctionError, FunctionTable};
use crate::kloosterman::dillon_dlu_predict;
use crate::spectra::{self, Method, SpectraError, SpectrumHistogram};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("unknown table id {0:?}")]
    UnknownTable(String),
    #[error("malformed expected-values file for {id}: {source}")]
    Data { id: String, source: serde_json::Error },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

pub const TABLE_IDS: [&str; 8] = [
    "dlu-x7",
    "dlu-dillon",
    "dlu-cubic-quadratic",
    "spectrum-x7-vs-g",
    "spectrum-inverse",
    "spectrum-modified-inverse",
    "properties-f-vs-inverse",
    "dlu-subfield-branch",
];

fn raw(id: &str) -> Option<&'static str> {
    Some(match id {
        "dlu-x7" => include_str!("../data/dlu-x7.json"),
        "dlu-dillon" => include_str!("../data/dlu-dillon.json"),
        "dlu-cubic-quadratic" => include_str!("../data/dlu-cubic-quadratic.json"),
        "spectrum-x7-vs-g" => include_str!("../data/spectrum-x7-vs-g.json"),
        "spectrum-inverse" => include_str!("../data/spectrum-inverse.json"),
        "spectrum-modified-inverse" => include_str!("../data/spectrum-modified-inverse.json"),
        "properties-f-vs-inverse" => include_str!("../data/properties-f-vs-inverse.json"),
        "dlu-subfield-branch" => include_str!("../data/dlu-subfield-branch.json"),
        _ => return None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Properties {
    pub nonlinearity: u64,
    pub differential_uniformity: u64,
    pub boomerang_uniformity: u64,
    pub dlu: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExpectedData {
    DluSeries {
        parameter: String,
        /// Rows from this parameter on need the long-running opt-in.
        #[serde(default)]
        long_from: Option<u32>,
        #[serde(deserialize_with = "integer_keys")]
        entries: BTreeMap<u32, u64>,
    },
    Spectra {
        n: u32,
        #[serde(deserialize_with = "spectra_keys")]
        spectra: BTreeMap<String, BTreeMap<i64, u64>>,
    },
    Properties {
        n: u32,
        rows: BTreeMap<String, Properties>,
    },
}

fn parse_keys<K: std::str::FromStr + Ord, V, E: serde::de::Error>(
    raw: BTreeMap<String, V>,
) -> Result<BTreeMap<K, V>, E> {
    raw.into_iter()
        .map(|(k, v)| k.parse().map(|k| (k, v)).map_err(|_| E::custom(format!("bad integer key {k:?}"))))
        .collect()
}

fn integer_keys<'de, D: serde::Deserializer<'de>>(d: D) -> Result<BTreeMap<u32, u64>, D::Error> {
    parse_keys(BTreeMap::<String, u64>::deserialize(d)?)
}

fn spectra_keys<'de, D: serde::Deserializer<'de>>(d: D) -> Result<BTreeMap<String, BTreeMap<i64, u64>>, D::Error> {
    BTreeMap::<String, BTreeMap<String, u64>>::deserialize(d)?
        .into_iter()
        .map(|(name, h)| parse_keys(h).map(|h| (name, h)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedTable {
    pub id: String,
    pub title: String,
    #[serde(flatten)]
    pub data: ExpectedData,
}

pub fn expected(id: &str) -> Result<ExpectedTable, TableError> {
    let text = raw(id).ok_or_else(|| TableError::UnknownTable(id.to_string()))?;
    serde_json::from_str(text).map_err(|source| TableError::Data { id: id.to_string(), source })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReproduceOptions {
    pub long: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowOutcome {
    pub key: String,
    pub field: FieldInfo,
    pub construction: String,
    pub expected: Value,
    pub measured: Value,
    pub matches: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableOutcome {
    pub id: String,
    pub title: String,
    pub rows: Vec<RowOutcome>,
    /// Rows not computed because they need the long-running opt-in.
    pub skipped: Vec<String>,
}

impl TableOutcome {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.matches)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &RowOutcome> {
        self.rows.iter().filter(|r| !r.matches)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("table,key,n,poly,generator,construction,expected,measured,match\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:#x},{:#x},\"{}\",\"{}\",\"{}\",{}\n",
                self.id,
                r.key,
                r.field.n,
                r.field.poly,
                r.field.generator,
                r.construction,
                compact(&r.expected),
                compact(&r.measured),
                r.matches
            ));
        }
        out
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string().replace('"', "'"),
    }
}

/// Rough count of basic operations for a full DLCT scan with the transform path.
pub fn full_scan_ops(n: u32) -> u128 {
    let size = 1u128 << n;
    size * size * n as u128
}

/// Rough count of basic operations for the row-one shortcut of a power map.
pub fn row_one_ops(n: u32) -> u128 {
    (1u128 << n) * n as u128
}

fn conway(n: u32) -> Result<Arc<Field>, TableError> {
    Ok(Arc::new(Field::conway(n)?))
}

fn row(key: String, f: &FunctionTable, expected: Value, measured: Value, note: Option<String>) -> RowOutcome {
    RowOutcome {
        key,
        field: f.field().info(),
        construction: f.label().to_string(),
        matches: expected == measured,
        expected,
        measured,
        note,
    }
}

/// Construction behind a named table row.
pub fn named_construction(name: &str, field: &Field) -> Option<Construction> {
    Some(match name {
        "x^7" => Construction::Power { d: 7 },
        "x^7+wx^3" => Construction::x7_plus_wx3(field),
        "inverse" => Construction::Inverse,
        "modified-inverse" => Construction::modified_inverse_at_zero(field),
        _ => return None,
    })
}

/// DLU of `x^7 + w x^3` with `w` the field generator.
fn cubic_quadratic_dlu(field: &Arc<Field>) -> Result<(FunctionTable, u64), TableError> {
    let g = build(field, &Construction::x7_plus_wx3(field))?;
    let d = spectra::dlu_full_scan(&g, Method::Transform).value;
    Ok((g, d))
}

/// Reruns `x^7 + w x^3` with every primitive `w` under the default polynomial
/// and returns the generators whose DLU equals `want`.
pub fn cubic_quadratic_omega_search(n: u32, want: u64) -> Result<Vec<u32>, TableError> {
    let base = Field::conway(n)?;
    let mut hits = Vec::new();
    for w in base.nonzero() {
        if let Ok(field) = Field::new(n, base.poly(), w) {
            if cubic_quadratic_dlu(&Arc::new(field))?.1 == want {
                hits.push(w);
            }
        }
    }
    Ok(hits)
}

fn dlu_series_row(id: &str, param: u32, want: u64) -> Result<RowOutcome, TableError> {
    let key = param.to_string();
    match id {
        "dlu-x7" => {
            let f = build(&conway(param)?, &Construction::Power { d: 7 })?;
            let d = spectra::dlu(&f, Method::Transform).value;
            Ok(row(key, &f, json!(want), json!(d), None))
        }
        "dlu-dillon" => {
            let f = build(&conway(2 * param)?, &Construction::Dillon { l: 1 })?;
            let d = spectra::dlu(&f, Method::Transform).value;
            let predicted = dillon_dlu_predict(param);
            let mut r = row(key, &f, json!(want), json!(d), Some(format!("closed-form predictor {predicted}")));
            r.matches &= predicted == want;
            Ok(r)
        }
        "dlu-cubic-quadratic" => {
            let (g, d) = cubic_quadratic_dlu(&conway(param)?)?;
            if d == want {
                return Ok(row(key, &g, json!(want), json!(d), None));
            }
            let hits = cubic_quadratic_omega_search(param, want)?;
            let note = if hits.is_empty() {
                format!("no primitive w gives {want}")
            } else {
                format!("default w gives {d}; {} primitive w give {want}, first {:#x}", hits.len(), hits[0])
            };
            let mut r = row(key, &g, json!(want), json!(d), Some(note));
            r.matches = !hits.is_empty();
            Ok(r)
        }
        "dlu-subfield-branch" => {
            let f = subfield_branch_inverse(&conway(2 * param)?)?;
            let d = spectra::dlu_full_scan(&f, Method::Transform).value;
            Ok(row(key, &f, json!(want), json!(d), None))
        }
        _ => Err(TableError::UnknownTable(id.to_string())),
    }
}

fn histogram_json(h: &SpectrumHistogram) -> Value {
    Value::Object(h.counts.iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

/// Computes a table at its reference parameters and compares with the embedded values.
pub fn reproduce(id: &str, opts: ReproduceOptions) -> Result<TableOutcome, TableError> {
    let table = expected(id)?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    match &table.data {
        ExpectedData::DluSeries { parameter, long_from, entries } => {
            for (&p, &want) in entries {
                if !opts.long && long_from.is_some_and(|l| p >= l) {
                    skipped.push(format!("{parameter}={p}"));
                    continue;
                }
                let mut r = dlu_series_row(id, p, want)?;
                r.key = format!("{parameter}={p}");
                rows.push(r);
            }
        }
        ExpectedData::Spectra { n, spectra: expected_spectra } => {
            let field = conway(*n)?;
            for (name, want) in expected_spectra {
                let c = named_construction(name, &field).ok_or_else(|| TableError::UnknownTable(name.clone()))?;
                let f = build(&field, &c)?;
                let h = spectra::dlct_spectrum(&f, Method::Transform);
                let want_h = SpectrumHistogram::from_counts(want.clone());
                let population = (field.size() as u64 - 1).pow(2);
                let note = format!("population {} of {population}", h.population);
                let mut r = row(name.clone(), &f, histogram_json(&want_h), histogram_json(&h), Some(note));
                r.matches &= h.population == population && want_h.population == population;
                rows.push(r);
            }
        }
        ExpectedData::Properties { n, rows: expected_rows } => {
            let field = conway(*n)?;
            for (name, want) in expected_rows {
                let c = named_construction(name, &field).ok_or_else(|| TableError::UnknownTable(name.clone()))?;
                let f = build(&field, &c)?;
                let measured = Properties {
                    nonlinearity: spectra::nonlinearity(&f),
                    differential_uniformity: spectra::ddt_uniformity(&f).value,
                    boomerang_uniformity: spectra::boomerang_system_uniformity(&f).value,
                    dlu: spectra::dlu(&f, Method::Transform).value,
                };
                let note =
                    (!f.is_permutation()).then(|| "not a permutation; BU from the boomerang system count".to_string());
                rows.push(row(name.clone(), &f, json!(want), json!(measured), note));
            }
        }
    }
    Ok(TableOutcome { id: table.id, title: table.title, rows, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_table_parses() {
        for id in TABLE_IDS {
            let t = expected(id).unwrap();
            assert_eq!(t.id, id);
        }
        assert!(matches!(expected("nope"), Err(TableError::UnknownTable(_))));
    }

    #[test]
    fn spectrum_files_have_full_population() {
        for id in ["spectrum-x7-vs-g", "spectrum-inverse", "spectrum-modified-inverse"] {
            let ExpectedData::Spectra { spectra, .. } = expected(id).unwrap().data else { panic!() };
            for h in spectra.values() {
                assert_eq!(h.values().sum::<u64>(), 255 * 255, "{id}");
            }
        }
    }

    #[test]
    fn long_rows_are_skipped() {
        let t = reproduce("dlu-dillon", ReproduceOptions::default()).unwrap();
        assert_eq!(t.skipped, vec!["m=9".to_string()]);
        assert_eq!(t.rows.len(), 7);
        assert!(t.passed(), "{:?}", t.mismatches().collect::<Vec<_>>());
    }

    #[test]
    fn small_tables_reproduce() {
        for id in ["spectrum-inverse", "spectrum-modified-inverse", "properties-f-vs-inverse", "dlu-subfield-branch"] {
            let t = reproduce(id, ReproduceOptions::default()).unwrap();
            assert!(t.passed(), "{id}: {:?}", t.mismatches().collect::<Vec<_>>());
        }
    }

    #[test]
    fn csv_is_self_describing() {
        let t = reproduce("spectrum-inverse", ReproduceOptions::default()).unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("table,key,n,poly,generator"));
        assert!(csv.contains("spectrum-inverse,inverse,8,0x11d,0x2"));
    }
}
