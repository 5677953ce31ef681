//! (n,n)-function constructions materialized as full lookup tables.

use crate::field::{parse_hex, Element, Field, FieldError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FunctionError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("{construction}: {reason}")]
    Constraint { construction: &'static str, reason: String },
    #[error("table has {found} entries, expected {expected}")]
    WrongLength { found: usize, expected: usize },
    #[error("entry {value:#x} at index {index} does not fit in GF(2^{degree})")]
    EntryOutOfRange { index: usize, value: u64, degree: u32 },
    #[error("duplicate modification point {0:#x}")]
    DuplicatePoint(Element),
    #[error("S-box file: {0}")]
    Parse(String),
}

fn constraint(construction: &'static str, reason: impl Into<String>) -> FunctionError {
    FunctionError::Constraint { construction, reason: reason.into() }
}

/// One term `coeff * x^{2^i + 2^j}` of a quadratic function, `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticTerm {
    pub i: u32,
    pub j: u32,
    pub coeff: Element,
}

/// Branch of a generalized cyclotomic mapping: `coefficient * x^exponent` on coset `coset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetBranch {
    pub coset: u64,
    pub coefficient: Element,
    pub exponent: u64,
}

/// Names one of the supported constructions together with its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Construction {
    /// `x^d`, `d >= 1`.
    Power { d: u64 },
    /// `x^{2^{2k} + 2^k + 1}`.
    CubicGold { k: u32 },
    /// `x^{2^{2k} - 2^k + 1}`.
    Kasami { k: u32 },
    /// `x^{l (2^m - 1)}` over GF(2^{2m}) with `gcd(l, 2^m + 1) = 1`.
    Dillon { l: u64 },
    /// `x^{-1}` with `0 -> 0`.
    Inverse,
    /// `sum a_ij x^{2^i + 2^j}`.
    Quadratic { terms: Vec<QuadraticTerm> },
    /// `x^{2^{2k} + 2^k + 1} + sum a_ij x^{2^i + 2^j}`.
    CubicPlusQuadratic { k: u32, terms: Vec<QuadraticTerm> },
    /// `base` with the values at the listed points replaced.
    PointModified { base: Box<Construction>, points: Vec<(Element, Element)> },
    /// Piecewise monomial map over the cosets of the index-`index` subgroup;
    /// cosets without a branch map to 0, as does 0 itself.
    GeneralizedCyclotomic { index: u64, branches: Vec<CosetBranch> },
    /// `x^{-1}` off GF(2^m) and `scale * x^{-1}` on it; `scale` defaults to `w^{2^m + 1}`.
    SubfieldBranchInverse { scale: Option<Element> },
    /// Uniformly random table (or permutation) from a seeded generator.
    Random { seed: u64, permutation: bool },
}

impl Construction {
    /// `x^7 + w x^3`, i.e. `k = 1` with the single quadratic term `a_01 = w`.
    pub fn x7_plus_wx3(field: &Field) -> Self {
        Construction::CubicPlusQuadratic { k: 1, terms: vec![QuadraticTerm { i: 0, j: 1, coeff: field.generator() }] }
    }

    /// Inverse with `0 -> w`.
    pub fn modified_inverse_at_zero(field: &Field) -> Self {
        Construction::PointModified { base: Box::new(Construction::Inverse), points: vec![(0, field.generator())] }
    }

    /// Exponent of a power-function construction, unreduced.
    pub fn power_exponent(&self, n: u32) -> Option<u64> {
        match *self {
            Construction::Power { d } => Some(d),
            Construction::CubicGold { k } => Some(cubic_exponent(k)),
            Construction::Kasami { k } => Some(kasami_exponent(k)),
            Construction::Dillon { l } => Some(l * ((1u64 << (n / 2)) - 1)),
            Construction::Inverse => Some((1u64 << n) - 2),
            _ => None,
        }
    }

    /// Number of modified points for point-modified constructions.
    pub fn modified_points(&self) -> usize {
        match self {
            Construction::PointModified { points, .. } => points.len(),
            _ => 0,
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms_str = |terms: &[QuadraticTerm]| {
            terms.iter().map(|t| format!("{:#x}*x^(2^{}+2^{})", t.coeff, t.i, t.j)).collect::<Vec<_>>().join("+")
        };
        match self {
            Construction::Power { d } => write!(f, "x^{d}"),
            Construction::CubicGold { k } => write!(f, "x^{} (cubic k={k})", cubic_exponent(*k)),
            Construction::Kasami { k } => write!(f, "x^{} (kasami k={k})", kasami_exponent(*k)),
            Construction::Dillon { l } => write!(f, "x^({l}*(2^m-1))"),
            Construction::Inverse => write!(f, "x^-1"),
            Construction::Quadratic { terms } => write!(f, "{}", terms_str(terms)),
            Construction::CubicPlusQuadratic { k, terms } => {
                write!(f, "x^{}+{}", cubic_exponent(*k), terms_str(terms))
            }
            Construction::PointModified { base, points } => {
                let pts: Vec<_> = points.iter().map(|(x, a)| format!("{x:#x}->{a:#x}")).collect();
                write!(f, "{base} modified at [{}]", pts.join(", "))
            }
            Construction::GeneralizedCyclotomic { index, branches } => {
                let br: Vec<_> =
                    branches.iter().map(|b| format!("C{}:{:#x}*x^{}", b.coset, b.coefficient, b.exponent)).collect();
                write!(f, "cyclotomic index {index} [{}]", br.join(", "))
            }
            Construction::SubfieldBranchInverse { scale: None } => write!(f, "subfield-branch inverse"),
            Construction::SubfieldBranchInverse { scale: Some(s) } => {
                write!(f, "subfield-branch inverse scale {s:#x}")
            }
            Construction::Random { seed, permutation } => {
                let what = if *permutation { "permutation" } else { "table" };
                write!(f, "random {what} seed {seed}")
            }
        }
    }
}

pub fn cubic_exponent(k: u32) -> u64 {
    (1u64 << (2 * k)) + (1u64 << k) + 1
}

pub fn kasami_exponent(k: u32) -> u64 {
    (1u64 << (2 * k)) - (1u64 << k) + 1
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// An (n,n)-function as a full lookup table.
#[derive(Debug, Clone)]
pub struct FunctionTable {
    field: Arc<Field>,
    values: Vec<Element>,
    label: String,
    power_exponent: Option<u64>,
}

impl PartialEq for FunctionTable {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.values == other.values
    }
}

impl FunctionTable {
    pub fn from_values(
        field: Arc<Field>,
        values: Vec<Element>,
        label: impl Into<String>,
    ) -> Result<Self, FunctionError> {
        if values.len() != field.size() {
            return Err(FunctionError::WrongLength { found: values.len(), expected: field.size() });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, &v)| (v as usize) >= field.size()) {
            return Err(FunctionError::EntryOutOfRange { index, value: value as u64, degree: field.degree() });
        }
        Ok(FunctionTable { field, values, label: label.into(), power_exponent: None })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn field_arc(&self) -> &Arc<Field> {
        &self.field
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.field.degree()
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn eval(&self, x: Element) -> Element {
        self.values[x as usize]
    }

    pub fn values(&self) -> &[Element] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Set when the table is known to be `x^d`; enables row-(1) shortcuts.
    pub fn power_exponent(&self) -> Option<u64> {
        self.power_exponent
    }

    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.size()];
        for &y in &self.values {
            if std::mem::replace(&mut seen[y as usize], true) {
                return false;
            }
        }
        true
    }

    /// Compositional inverse, if the table is a bijection.
    pub fn inverse_table(&self) -> Option<Vec<Element>> {
        let mut inv = vec![u32::MAX; self.size()];
        for (x, &y) in self.values.iter().enumerate() {
            if inv[y as usize] != u32::MAX {
                return None;
            }
            inv[y as usize] = x as Element;
        }
        Some(inv)
    }

    /// Inputs at which two tables over the same field differ.
    pub fn differing_inputs(&self, other: &FunctionTable) -> Vec<Element> {
        self.values
            .iter()
            .zip(&other.values)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(x, _)| x as Element)
            .collect()
    }

    /// Text export: `n=<n>` header then one lowercase hex value per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={}\n", self.degree());
        for v in &self.values {
            out.push_str(&format!("{v:x}\n"));
        }
        out
    }

    /// Parses the text S-box format. The field defaults to the Conway model
    /// for the header's `n`; an explicit field must have the same degree.
    pub fn from_text(text: &str, field: Option<Arc<Field>>) -> Result<Self, FunctionError> {
        let mut lines = text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| FunctionError::Parse("empty file".into()))?;
        let n = header
            .strip_prefix("n=")
            .or_else(|| header.strip_prefix("n ="))
            .ok_or_else(|| FunctionError::Parse(format!("expected `n=<n>` header, got `{header}`")))?
            .trim()
            .parse::<u32>()
            .map_err(|e| FunctionError::Parse(format!("bad n: {e}")))?;
        let field = match field {
            Some(f) if f.degree() == n => f,
            Some(f) => {
                return Err(FunctionError::Parse(format!("header says n={n} but field has degree {}", f.degree())))
            }
            None => Arc::new(Field::conway(n)?),
        };
        let mut values = Vec::with_capacity(field.size());
        for (index, line) in lines.enumerate() {
            let v = parse_hex(line).map_err(FunctionError::Parse)?;
            if (v as usize) >= field.size() {
                return Err(FunctionError::EntryOutOfRange { index, value: v as u64, degree: n });
            }
            values.push(v);
        }
        Self::from_values(field, values, "imported")
    }
}

fn check_k(construction: &'static str, k: u32) -> Result<(), FunctionError> {
    if k == 0 || 2 * k >= 63 {
        return Err(constraint(construction, format!("k = {k} must satisfy 1 <= k < 32")));
    }
    Ok(())
}

fn check_terms(field: &Field, terms: &[QuadraticTerm]) -> Result<(), FunctionError> {
    let n = field.degree();
    for t in terms {
        if !(t.i < t.j && t.j < n) {
            return Err(constraint(
                "quadratic",
                format!("term indices must satisfy 0 <= i < j <= n-1, got ({}, {})", t.i, t.j),
            ));
        }
        field.check(t.coeff as u64)?;
    }
    Ok(())
}

fn eval_quadratic(field: &Field, terms: &[QuadraticTerm], x: Element) -> Element {
    terms.iter().fold(0, |acc, t| {
        acc ^ field.mul(t.coeff, field.mul(field.frobenius(x, t.i as i64), field.frobenius(x, t.j as i64)))
    })
}

/// The cosets `C_i = w^i C` of the index-`d` subgroup `C`, each sorted ascending.
pub fn cosets(field: &Field, d: u64) -> Result<Vec<Vec<Element>>, FunctionError> {
    let order = field.group_order();
    if d == 0 || !order.is_multiple_of(d) {
        return Err(constraint("cosets", format!("index {d} does not divide 2^n - 1 = {order}")));
    }
    let mut classes = vec![Vec::with_capacity((order / d) as usize); d as usize];
    for x in field.nonzero() {
        let i = field.log(x).expect("nonzero") as u64 % d;
        classes[i as usize].push(x);
    }
    Ok(classes)
}

/// Index of the coset of the index-`d` subgroup containing nonzero `x`.
pub fn coset_index(field: &Field, d: u64, x: Element) -> Option<u64> {
    field.log(x).map(|l| l as u64 % d)
}

/// Materializes a construction over `field`.
pub fn build(field: &Arc<Field>, params: &Construction) -> Result<FunctionTable, FunctionError> {
    build_with_warnings(field, params).map(|(t, _)| t)
}

/// Like [`build`], also returning non-fatal parameter warnings.
pub fn build_with_warnings(
    field: &Arc<Field>,
    params: &Construction,
) -> Result<(FunctionTable, Vec<String>), FunctionError> {
    let f: &Field = field;
    let n = f.degree();
    let mut warnings = Vec::new();
    let power = |d: u64| -> Vec<Element> { f.elements().map(|x| f.pow(x, d)).collect() };

    let values = match params {
        Construction::Power { d } => {
            if *d == 0 {
                return Err(constraint("power", "exponent must be positive"));
            }
            power(*d)
        }
        Construction::CubicGold { k } => {
            check_k("cubic", *k)?;
            power(cubic_exponent(*k))
        }
        Construction::Kasami { k } => {
            check_k("kasami", *k)?;
            power(kasami_exponent(*k))
        }
        Construction::Dillon { l } => {
            let m = f.half_degree().ok_or_else(|| constraint("dillon", format!("n = {n} must be even")))?;
            let circle = (1u64 << m) + 1;
            if *l == 0 || gcd(*l, circle) != 1 {
                return Err(constraint("dillon", format!("gcd(l, 2^m + 1) = gcd({l}, {circle}) must be 1")));
            }
            power(l * ((1u64 << m) - 1))
        }
        Construction::Inverse => f.elements().map(|x| f.inv(x)).collect(),
        Construction::Quadratic { terms } => {
            check_terms(f, terms)?;
            f.elements().map(|x| eval_quadratic(f, terms, x)).collect()
        }
        Construction::CubicPlusQuadratic { k, terms } => {
            check_k("cubic", *k)?;
            check_terms(f, terms)?;
            let d = cubic_exponent(*k);
            f.elements().map(|x| f.pow(x, d) ^ eval_quadratic(f, terms, x)).collect()
        }
        Construction::PointModified { base, points } => {
            let (base_table, mut base_warnings) = build_with_warnings(field, base)?;
            warnings.append(&mut base_warnings);
            let mut values = base_table.values;
            let mut seen = HashSet::new();
            for &(xi, a) in points {
                f.check(xi as u64)?;
                f.check(a as u64)?;
                if !seen.insert(xi) {
                    return Err(FunctionError::DuplicatePoint(xi));
                }
                if values[xi as usize] == a {
                    warnings.push(format!("modification {xi:#x} -> {a:#x} keeps the base value"));
                }
            }
            for &(xi, a) in points {
                values[xi as usize] = a;
            }
            values
        }
        Construction::GeneralizedCyclotomic { index, branches } => {
            let order = f.group_order();
            if *index == 0 || !order.is_multiple_of(*index) {
                return Err(constraint("cyclotomic", format!("index {index} does not divide 2^n - 1 = {order}")));
            }
            let mut table: Vec<Option<(Element, u64)>> = vec![None; *index as usize];
            for b in branches {
                if b.coset >= *index {
                    return Err(constraint("cyclotomic", format!("coset {} >= index {index}", b.coset)));
                }
                f.check(b.coefficient as u64)?;
                if table[b.coset as usize].replace((b.coefficient, b.exponent)).is_some() {
                    return Err(constraint("cyclotomic", format!("coset {} listed twice", b.coset)));
                }
            }
            if table.iter().any(Option::is_none) {
                warnings.push("cosets without a branch map to 0".into());
            }
            f.elements()
                .map(|x| match coset_index(f, *index, x) {
                    None => 0,
                    Some(i) => match table[i as usize] {
                        Some((a, r)) => f.mul(a, f.pow(x, r)),
                        None => 0,
                    },
                })
                .collect()
        }
        Construction::SubfieldBranchInverse { scale } => {
            return subfield_branch_inverse_scaled(field, *scale).map(|t| (t, warnings));
        }
        Construction::Random { seed, permutation } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            if *permutation {
                let mut values: Vec<Element> = f.elements().collect();
                // Fisher-Yates
                for i in (1..values.len()).rev() {
                    let j = rng.gen_range(0..=i);
                    values.swap(i, j);
                }
                values
            } else {
                f.elements().map(|_| rng.gen_range(0..f.size() as Element)).collect()
            }
        }
    };

    let mut table = FunctionTable::from_values(field.clone(), values, params.to_string())?;
    if !matches!(params, Construction::PointModified { .. }) {
        table.power_exponent = params.power_exponent(n);
    }
    Ok((table, warnings))
}

/// `x^{-1}` off GF(2^m), `w^{2^m + 1} x^{-1}` on GF(2^m), with `0 -> 0`.
pub fn subfield_branch_inverse(field: &Arc<Field>) -> Result<FunctionTable, FunctionError> {
    subfield_branch_inverse_scaled(field, None)
}

fn subfield_branch_inverse_scaled(field: &Arc<Field>, scale: Option<Element>) -> Result<FunctionTable, FunctionError> {
    let m = field
        .half_degree()
        .ok_or_else(|| constraint("subfield-branch inverse", format!("n = {} must be even", field.degree())))?;
    let q = 1u64 << m;
    let scale = match scale {
        Some(s) => field.check(s as u64)?,
        None => field.exp(q + 1),
    };
    // GF(q)^* is the index-(q+1) subgroup, i.e. coset 0
    let inv_exp = field.group_order() - 1;
    let mut branches: Vec<CosetBranch> =
        (0..=q).map(|coset| CosetBranch { coset, coefficient: 1, exponent: inv_exp }).collect();
    branches[0].coefficient = scale;
    let params = Construction::GeneralizedCyclotomic { index: q + 1, branches };
    let table = build(field, &params)?;
    let label = Construction::SubfieldBranchInverse { scale: Some(scale) }.to_string();
    Ok(table.with_label(label))
}
