//! DLCT/DLU, DDT, LAT/Walsh and BCT computations.
//!
//! Every table has two routes. The naive route sums the defining character
//! directly; the transform route counts the derivative `D_u(x) = F(x+u) + F(x)`
//! into a value histogram and takes one Walsh-Hadamard transform of it, reading
//! the autocorrelation `AC_F(u, v)` at the trace-form mask of `v`. The DLCT
//! entry is half of that.

use crate::field::Element;
use crate::functions::FunctionTable;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpectraError {
    #[error("vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("boomerang table needs a permutation, `{0}` is not bijective")]
    NotBijective(String),
    #[error("lower bound needs m >= n - 1, got n = {n}, m = {m}")]
    BoundHypothesis { n: u32, m: u32 },
}

/// Which route computes a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Naive,
    Transform,
    /// Naive for `n <= 8`, transform above.
    #[default]
    Auto,
}

impl Method {
    fn resolve(self, n: u32) -> Method {
        match self {
            Method::Auto if n <= 8 => Method::Naive,
            Method::Auto => Method::Transform,
            m => m,
        }
    }
}

/// In-place unnormalized Walsh-Hadamard transform.
pub fn fwht(v: &mut [i32]) -> Result<(), SpectraError> {
    let len = v.len();
    if !len.is_power_of_two() {
        return Err(SpectraError::NotPowerOfTwo(len));
    }
    let mut h = 1;
    while h < len {
        for chunk in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = chunk.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
    Ok(())
}

/// Multiset of table entries with its population.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumHistogram {
    pub counts: BTreeMap<i64, u64>,
    pub population: u64,
}

impl SpectrumHistogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: i64, multiplicity: u64) {
        if multiplicity > 0 {
            *self.counts.entry(value).or_insert(0) += multiplicity;
            self.population += multiplicity;
        }
    }

    pub fn merge(mut self, other: SpectrumHistogram) -> Self {
        for (v, c) in other.counts {
            self.add(v, c);
        }
        self
    }

    pub fn from_values<I: IntoIterator<Item = i64>>(values: I) -> Self {
        let mut h = Self::new();
        for v in values {
            h.add(v, 1);
        }
        h
    }

    pub fn from_counts(counts: BTreeMap<i64, u64>) -> Self {
        let mut h = Self::new();
        for (v, c) in counts {
            h.add(v, c);
        }
        h
    }

    pub fn get(&self, value: i64) -> u64 {
        self.counts.get(&value).copied().unwrap_or(0)
    }

    pub fn max_abs(&self) -> u64 {
        self.counts.keys().map(|v| v.unsigned_abs()).max().unwrap_or(0)
    }

    /// Value-ascending `value,multiplicity` CSV with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,multiplicity\n");
        for (v, c) in &self.counts {
            out.push_str(&format!("{v},{c}\n"));
        }
        out
    }
}

/// Largest absolute entry of a table together with one witnessing position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extremum {
    pub value: u64,
    pub u: Element,
    pub v: Element,
    /// Signed entry at `(u, v)`.
    pub entry: i64,
}

impl Extremum {
    fn better(self, other: Extremum) -> Extremum {
        // deterministic: larger magnitude, then smaller (u, v)
        if other.value > self.value || (other.value == self.value && (other.u, other.v) < (self.u, self.v)) {
            other
        } else {
            self
        }
    }

    fn empty() -> Extremum {
        Extremum { value: 0, u: Element::MAX, v: Element::MAX, entry: 0 }
    }
}

/// Single DLCT entry from the half-sum of the autocorrelation.
pub fn dlct_entry(f: &FunctionTable, u: Element, v: Element) -> i32 {
    let field = f.field();
    let sum: i32 = field.elements().map(|x| field.chi(field.mul(v, f.eval(x ^ u) ^ f.eval(x)))).sum();
    sum / 2
}

/// Occurrence counts of `D_u(x) = F(x+u) + F(x)`.
fn derivative_counts(values: &[Element], u: Element, counts: &mut [i32]) {
    counts.iter_mut().for_each(|c| *c = 0);
    for (x, &fx) in values.iter().enumerate() {
        counts[(values[x ^ u as usize] ^ fx) as usize] += 1;
    }
}

/// Autocorrelation row via one transform; `row[v] = W[mask(v)] / 2`.
fn row_transform(values: &[Element], masks: &[u32], u: Element, scratch: &mut [i32], row: &mut [i32]) {
    derivative_counts(values, u, scratch);
    fwht(scratch).expect("table length is a power of two");
    for (r, &m) in row.iter_mut().zip(masks) {
        *r = scratch[m as usize] / 2;
    }
}

fn row_naive(f: &FunctionTable, u: Element, row: &mut [i32]) {
    let field = f.field();
    let derivative: Vec<Element> = field.elements().map(|x| f.eval(x ^ u) ^ f.eval(x)).collect();
    for (v, r) in row.iter_mut().enumerate() {
        let sum: i32 = derivative.iter().map(|&d| field.chi(field.mul(v as Element, d))).sum();
        *r = sum / 2;
    }
}

/// Full DLCT row for input difference `u`, indexed by output mask `v`.
pub fn dlct_row(f: &FunctionTable, u: Element, method: Method) -> Vec<i32> {
    let mut row = vec![0; f.size()];
    match method.resolve(f.degree()) {
        Method::Naive => row_naive(f, u, &mut row),
        _ => {
            let masks = f.field().trace_form_masks();
            let mut scratch = vec![0; f.size()];
            row_transform(f.values(), &masks, u, &mut scratch, &mut row);
        }
    }
    row
}

/// Visits every row `u = 1..2^n` in parallel and folds with `fold`, merging
/// with `merge`; both must be commutative and associative.
fn fold_rows<T, FF, MF>(f: &FunctionTable, method: Method, init: T, fold: FF, merge: MF) -> T
where
    T: Send + Clone + Sync,
    FF: Fn(T, Element, &[i32]) -> T + Send + Sync,
    MF: Fn(T, T) -> T + Send + Sync,
{
    let size = f.size();
    match method.resolve(f.degree()) {
        Method::Naive => (1..size as Element)
            .into_par_iter()
            .fold(
                || (init.clone(), vec![0i32; size]),
                |(acc, mut row), u| {
                    row_naive(f, u, &mut row);
                    (fold(acc, u, &row), row)
                },
            )
            .map(|(acc, _)| acc)
            .reduce(|| init.clone(), &merge),
        _ => {
            let masks = f.field().trace_form_masks();
            (1..size as Element)
                .into_par_iter()
                .fold(
                    || (init.clone(), vec![0i32; size], vec![0i32; size]),
                    |(acc, mut scratch, mut row), u| {
                        row_transform(f.values(), &masks, u, &mut scratch, &mut row);
                        (fold(acc, u, &row), scratch, row)
                    },
                )
                .map(|(acc, _, _)| acc)
                .reduce(|| init.clone(), &merge)
        }
    }
}

/// Whole DLCT as rows; memory is `4^n` entries, meant for small `n`.
pub fn dlct_table(f: &FunctionTable, method: Method) -> Vec<Vec<i32>> {
    (0..f.size() as Element).into_par_iter().map(|u| dlct_row(f, u, method)).collect()
}

fn row_extremum(u: Element, row: &[i32]) -> Extremum {
    row.iter().enumerate().skip(1).fold(Extremum::empty(), |best, (v, &e)| {
        best.better(Extremum { value: e.unsigned_abs() as u64, u, v: v as Element, entry: e as i64 })
    })
}

/// DLU by scanning every nonzero `(u, v)`.
pub fn dlu_full_scan(f: &FunctionTable, method: Method) -> Extremum {
    fold_rows(f, method, Extremum::empty(), |best, u, row| best.better(row_extremum(u, row)), Extremum::better)
}

/// DLU of a power function from row `u = 1`, using `DLCT(u, v) = DLCT(1, u^d v)`.
pub fn dlu_from_row_one(f: &FunctionTable, method: Method) -> Extremum {
    row_extremum(1, &dlct_row(f, 1, method))
}

/// DLU with its witness. Power functions use the row-one reduction.
pub fn dlu(f: &FunctionTable, method: Method) -> Extremum {
    if f.power_exponent().is_some() {
        dlu_from_row_one(f, method)
    } else {
        dlu_full_scan(f, method)
    }
}

/// DLCT spectrum over all nonzero `(u, v)`.
pub fn dlct_spectrum_full_scan(f: &FunctionTable, method: Method) -> SpectrumHistogram {
    fold_rows(
        f,
        method,
        SpectrumHistogram::new(),
        |mut h, _, row| {
            for &e in &row[1..] {
                h.add(e as i64, 1);
            }
            h
        },
        SpectrumHistogram::merge,
    )
}

/// DLCT spectrum; power functions scale the row-one histogram by `2^n - 1`.
pub fn dlct_spectrum(f: &FunctionTable, method: Method) -> SpectrumHistogram {
    if f.power_exponent().is_some() {
        let row = dlct_row(f, 1, method);
        let rows = f.size() as u64 - 1;
        let mut h = SpectrumHistogram::new();
        for &e in &row[1..] {
            h.add(e as i64, rows);
        }
        h
    } else {
        dlct_spectrum_full_scan(f, method)
    }
}

/// DDT row: `row[b] = #{x : F(x+u) + F(x) = b}`.
pub fn ddt_row(f: &FunctionTable, u: Element) -> Vec<u32> {
    let mut row = vec![0u32; f.size()];
    for x in 0..f.size() {
        row[(f.values()[x ^ u as usize] ^ f.values()[x]) as usize] += 1;
    }
    row
}

/// Differential uniformity with a witness `(u, b)`.
pub fn ddt_uniformity(f: &FunctionTable) -> Extremum {
    (1..f.size() as Element)
        .into_par_iter()
        .map(|u| {
            ddt_row(f, u).iter().enumerate().fold(Extremum::empty(), |best, (b, &c)| {
                best.better(Extremum { value: c as u64, u, v: b as Element, entry: c as i64 })
            })
        })
        .reduce(Extremum::empty, Extremum::better)
}

/// DDT spectrum over `u != 0` and all outputs `b`.
pub fn ddt_spectrum(f: &FunctionTable) -> SpectrumHistogram {
    (1..f.size() as Element)
        .into_par_iter()
        .map(|u| SpectrumHistogram::from_values(ddt_row(f, u).into_iter().map(i64::from)))
        .reduce(SpectrumHistogram::new, SpectrumHistogram::merge)
}

/// Walsh spectrum of the component `Tr(v F(x))`: `W[a] = sum (-1)^{Tr(vF(x)) + Tr(ax)}`,
/// indexed by `a`.
pub fn component_walsh(f: &FunctionTable, v: Element) -> Vec<i32> {
    let field = f.field();
    let mut signs: Vec<i32> = f.values().iter().map(|&y| field.chi(field.mul(v, y))).collect();
    fwht(&mut signs).expect("power of two");
    let masks = field.trace_form_masks();
    masks.iter().map(|&m| signs[m as usize]).collect()
}

/// Largest `|W|` over nonzero components and all linear masks.
pub fn linearity(f: &FunctionTable) -> Extremum {
    let field = f.field();
    (1..f.size() as Element)
        .into_par_iter()
        .map(|v| {
            let mut signs: Vec<i32> = f.values().iter().map(|&y| field.chi(field.mul(v, y))).collect();
            fwht(&mut signs).expect("power of two");
            signs.iter().enumerate().fold(Extremum::empty(), |best, (a, &w)| {
                // witness stored as (mask, component); mask is in dot-product coordinates
                best.better(Extremum { value: w.unsigned_abs() as u64, u: a as Element, v, entry: w as i64 })
            })
        })
        .reduce(Extremum::empty, Extremum::better)
}

/// `2^{n-1} - max|W| / 2`.
pub fn nonlinearity(f: &FunctionTable) -> u64 {
    (f.size() as u64 / 2) - linearity(f).value / 2
}

/// LAT spectrum: entries `W / 2 = #{x : Tr(ax) = Tr(vF(x))} - 2^{n-1}` over `v != 0`, all `a`.
pub fn lat_spectrum(f: &FunctionTable) -> SpectrumHistogram {
    let field = f.field();
    (1..f.size() as Element)
        .into_par_iter()
        .map(|v| {
            let mut signs: Vec<i32> = f.values().iter().map(|&y| field.chi(field.mul(v, y))).collect();
            fwht(&mut signs).expect("power of two");
            SpectrumHistogram::from_values(signs.into_iter().map(|w| (w / 2) as i64))
        })
        .reduce(SpectrumHistogram::new, SpectrumHistogram::merge)
}

fn require_inverse(f: &FunctionTable) -> Result<Vec<Element>, SpectraError> {
    f.inverse_table().ok_or_else(|| SpectraError::NotBijective(f.label().to_string()))
}

fn bct_entry_with(values: &[Element], inv: &[Element], u: Element, v: Element) -> u32 {
    (0..values.len())
        .filter(|&x| inv[(values[x] ^ v) as usize] ^ inv[(values[x ^ u as usize] ^ v) as usize] == u)
        .count() as u32
}

/// `#{x : F^{-1}(F(x) + v) + F^{-1}(F(x+u) + v) = u}`.
pub fn bct_entry(f: &FunctionTable, u: Element, v: Element) -> Result<u32, SpectraError> {
    let inv = require_inverse(f)?;
    Ok(bct_entry_with(f.values(), &inv, u, v))
}

/// Boomerang uniformity over nonzero `(u, v)`.
pub fn boomerang_uniformity(f: &FunctionTable) -> Result<Extremum, SpectraError> {
    let inv = require_inverse(f)?;
    let size = f.size() as Element;
    Ok((1..size)
        .into_par_iter()
        .map(|u| {
            (1..size).fold(Extremum::empty(), |best, v| {
                let c = bct_entry_with(f.values(), &inv, u, v);
                best.better(Extremum { value: c as u64, u, v, entry: c as i64 })
            })
        })
        .reduce(Extremum::empty, Extremum::better))
}

/// BCT spectrum over nonzero `(u, v)`.
pub fn bct_spectrum(f: &FunctionTable) -> Result<SpectrumHistogram, SpectraError> {
    let inv = require_inverse(f)?;
    let size = f.size() as Element;
    Ok((1..size)
        .into_par_iter()
        .map(|u| SpectrumHistogram::from_values((1..size).map(|v| bct_entry_with(f.values(), &inv, u, v) as i64)))
        .reduce(SpectrumHistogram::new, SpectrumHistogram::merge))
}

fn preimages(f: &FunctionTable) -> Vec<Vec<Element>> {
    let mut pre = vec![Vec::new(); f.size()];
    for (x, &y) in f.values().iter().enumerate() {
        pre[y as usize].push(x as Element);
    }
    pre
}

fn boomerang_system_with(values: &[Element], pre: &[Vec<Element>], u: Element, v: Element) -> u32 {
    let mut count = 0;
    for x in 0..values.len() {
        let target = values[x ^ u as usize] ^ v;
        for &y in &pre[(values[x] ^ v) as usize] {
            count += (values[(y ^ u) as usize] == target) as u32;
        }
    }
    count
}

/// `#{(x, y) : F(x) + F(y) = v, F(x+u) + F(y+u) = v}`, defined for any function.
/// For permutations this is the BCT entry.
pub fn boomerang_system_entry(f: &FunctionTable, u: Element, v: Element) -> u32 {
    boomerang_system_with(f.values(), &preimages(f), u, v)
}

/// Maximum of [`boomerang_system_entry`] over nonzero `(u, v)`.
pub fn boomerang_system_uniformity(f: &FunctionTable) -> Extremum {
    let pre = preimages(f);
    let size = f.size() as Element;
    (1..size)
        .into_par_iter()
        .map(|u| {
            (1..size).fold(Extremum::empty(), |best, v| {
                let c = boomerang_system_with(f.values(), &pre, u, v);
                best.better(Extremum { value: c as u64, u, v, entry: c as i64 })
            })
        })
        .reduce(Extremum::empty, Extremum::better)
}

/// The DLU lower bound `sqrt((2^{m+n+1} - 2^{2n}) / (4 (2^m - 1)))` for
/// (n,m)-functions, kept exact as a rational under the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DluLowerBound {
    pub numerator: u128,
    pub denominator: u128,
    /// Smallest integer `k` with `k^2 >= numerator / denominator`.
    pub ceil_sqrt: u64,
    /// `2^{n/2 - 1} + 2` for (n,n)-functions with even `n >= 4`.
    pub sharpened: Option<u64>,
}

impl DluLowerBound {
    pub fn value(&self) -> f64 {
        (self.numerator as f64 / self.denominator as f64).sqrt()
    }

    /// Strongest integer lower bound available.
    pub fn integer_bound(&self) -> u64 {
        self.sharpened.map_or(self.ceil_sqrt, |s| s.max(self.ceil_sqrt))
    }
}

pub fn dlu_lower_bound(n: u32, m: u32) -> Result<DluLowerBound, SpectraError> {
    if m + 1 < n || n == 0 || m == 0 {
        return Err(SpectraError::BoundHypothesis { n, m });
    }
    let numerator = (1u128 << (m + n + 1)) - (1u128 << (2 * n));
    let denominator = 4 * ((1u128 << m) - 1);
    let mut k = ((numerator as f64 / denominator as f64).sqrt().floor() as u128).saturating_sub(1);
    while k * k * denominator < numerator {
        k += 1;
    }
    let sharpened = (n == m && n.is_multiple_of(2) && n >= 4).then(|| (1u64 << (n / 2)) / 2 + 2);
    Ok(DluLowerBound { numerator, denominator, ceil_sqrt: k as u64, sharpened })
}
