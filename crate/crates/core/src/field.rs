//! Arithmetic in GF(2^n) for 1 <= n <= 20.
//!
//! Elements are little-endian polynomial-basis bitmasks: bit `i` holds the
//! coefficient of `x^i`. Multiplication is a carry-less product followed by
//! reduction modulo the field polynomial. Inversion and discrete logarithms go
//! through exp/log tables built once per field.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// A field element in polynomial-basis encoding.
pub type Element = u32;

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 20;

/// Conway polynomials over GF(2), indexed by degree (entry 0 unused).
/// Each mask includes the leading `x^n` bit.
pub const CONWAY_POLYNOMIALS: [u32; 21] = [
    0x0, 0x3, 0x7, 0xb, 0x13, 0x25, 0x5b, 0x83, 0x11d, 0x211, 0x46f, 0x805, 0x10eb, 0x201b, 0x40a9, 0x8035, 0x1002d,
    0x20009, 0x41403, 0x80027, 0x1006f3,
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("degree {0} is outside the supported range 1..={MAX_DEGREE}")]
    DegreeOutOfRange(u32),
    #[error("polynomial {poly:#x} does not have degree {degree}")]
    DegreeMismatch { poly: u32, degree: u32 },
    #[error("polynomial {0:#x} is reducible over GF(2)")]
    Reducible(u32),
    #[error("generator {generator:#x} has order {order}, expected {expected}")]
    NotPrimitive { generator: Element, order: u64, expected: u64 },
    #[error("element {element:#x} does not fit in GF(2^{degree})")]
    OutOfRange { element: u64, degree: u32 },
    #[error("operation requires even degree, got n = {0}")]
    OddDegree(u32),
    #[error("element {0:#x} lies in the half-degree subfield")]
    InSubfield(Element),
    #[error("element must be nonzero")]
    Zero,
    #[error("GF(2^{small}) is not a subfield of GF(2^{big})")]
    NotSubfield { small: u32, big: u32 },
    #[error("field-spec parse error: {0}")]
    Parse(String),
}

/// Serializable description of a field: degree, reduction polynomial and
/// the primitive element used for cosets and constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldInfo {
    pub n: u32,
    pub poly: u32,
    pub generator: Element,
    /// True when both the polynomial and generator are the built-in defaults.
    pub conway: bool,
}

/// A concrete model of GF(2^n).
#[derive(Clone)]
pub struct Field {
    degree: u32,
    poly: u32,
    generator: Element,
    /// Bit `i` is `Tr(x^i)`.
    trace_basis: u32,
    exp: Vec<Element>,
    log: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("degree", &self.degree)
            .field("poly", &format_args!("{:#x}", self.poly))
            .field("generator", &format_args!("{:#x}", self.generator))
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.poly == other.poly && self.generator == other.generator
    }
}

impl Eq for Field {}

fn clmul(a: u32, b: u32) -> u64 {
    let a = a as u64;
    let mut b = b;
    let mut acc = 0u64;
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a << shift;
        }
        b >>= 1;
        shift += 1;
    }
    acc
}

fn reduce(mut value: u64, poly: u32, degree: u32) -> u32 {
    let poly = poly as u64;
    let top = 64 - value.leading_zeros();
    for bit in (degree..top).rev() {
        if (value >> bit) & 1 == 1 {
            value ^= poly << (bit - degree);
        }
    }
    value as u32
}

fn poly_degree(p: u64) -> i32 {
    63 - p.leading_zeros() as i32
}

/// Remainder of `a` modulo `b` for polynomials over GF(2).
fn poly_rem(mut a: u64, b: u64) -> u64 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

fn poly_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = poly_rem(a, b);
        a = b;
        b = r;
    }
    a
}

/// Irreducibility over GF(2): no common factor with `x^{2^i} - x` for `1 <= i <= n/2`.
fn is_irreducible(poly: u32, degree: u32) -> bool {
    if degree == 1 {
        return true;
    }
    // x^{2^i} mod poly, tracked in the residue ring
    let mut frob: u32 = 0b10;
    for _ in 1..=degree / 2 {
        frob = reduce(clmul(frob, frob), poly, degree);
        let g = poly_gcd(poly as u64, (frob ^ 0b10) as u64);
        if g != 1 {
            return false;
        }
    }
    true
}

impl Field {
    /// The default field for degree `n`: Conway polynomial with `x` as generator.
    pub fn conway(n: u32) -> Result<Self, FieldError> {
        if n == 0 || n > MAX_DEGREE {
            return Err(FieldError::DegreeOutOfRange(n));
        }
        let generator = if n == 1 { 1 } else { 0b10 };
        Self::new(n, CONWAY_POLYNOMIALS[n as usize], generator)
    }

    /// Builds a field from an explicit reduction polynomial and generator,
    /// checking irreducibility and that the generator is primitive.
    pub fn new(n: u32, poly: u32, generator: Element) -> Result<Self, FieldError> {
        if n == 0 || n > MAX_DEGREE {
            return Err(FieldError::DegreeOutOfRange(n));
        }
        if poly >> n != 1 {
            return Err(FieldError::DegreeMismatch { poly, degree: n });
        }
        if !is_irreducible(poly, n) {
            return Err(FieldError::Reducible(poly));
        }
        if (generator as u64) >> n != 0 {
            return Err(FieldError::OutOfRange { element: generator as u64, degree: n });
        }
        let size = 1usize << n;
        let order = size - 1;
        let mut exp = Vec::with_capacity(order);
        let mut log = vec![u32::MAX; size];
        let mut acc: Element = 1;
        for i in 0..order {
            if log[acc as usize] != u32::MAX {
                return Err(FieldError::NotPrimitive { generator, order: i as u64, expected: order as u64 });
            }
            log[acc as usize] = i as u32;
            exp.push(acc);
            acc = reduce(clmul(acc, generator), poly, n);
        }
        if acc != 1 {
            return Err(FieldError::NotPrimitive { generator, order: 0, expected: order as u64 });
        }

        let mut field = Field { degree: n, poly, generator, trace_basis: 0, exp, log };
        let mut trace_basis = 0;
        for i in 0..n {
            if field.trace_by_definition(1 << i) == 1 {
                trace_basis |= 1 << i;
            }
        }
        field.trace_basis = trace_basis;
        Ok(field)
    }

    /// Parses the key-value field-spec format (`n`, `poly`, `generator`).
    /// Missing `poly`/`generator` fall back to the Conway defaults for `n`.
    pub fn from_spec_text(text: &str) -> Result<Self, FieldError> {
        let mut n = None;
        let mut poly = None;
        let mut generator = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(':'))
                .ok_or_else(|| FieldError::Parse(format!("line {}: expected key=value", lineno + 1)))?;
            let value = value.trim();
            match key.trim() {
                "n" => {
                    n = Some(
                        value
                            .parse::<u32>()
                            .map_err(|e| FieldError::Parse(format!("line {}: bad n: {e}", lineno + 1)))?,
                    )
                }
                "poly" => {
                    poly = Some(parse_hex(value).map_err(|e| FieldError::Parse(format!("line {}: {e}", lineno + 1)))?)
                }
                "generator" => {
                    generator =
                        Some(parse_hex(value).map_err(|e| FieldError::Parse(format!("line {}: {e}", lineno + 1)))?)
                }
                other => return Err(FieldError::Parse(format!("line {}: unknown key `{other}`", lineno + 1))),
            }
        }
        let n = n.ok_or_else(|| FieldError::Parse("missing key `n`".into()))?;
        if n == 0 || n > MAX_DEGREE {
            return Err(FieldError::DegreeOutOfRange(n));
        }
        let poly = poly.unwrap_or(CONWAY_POLYNOMIALS[n as usize]);
        let generator = generator.unwrap_or(if n == 1 { 1 } else { 0b10 });
        Self::new(n, poly, generator)
    }

    pub fn to_spec_text(&self) -> String {
        format!("n={}\npoly={:x}\ngenerator={:x}\n", self.degree, self.poly, self.generator)
    }

    pub fn info(&self) -> FieldInfo {
        FieldInfo { n: self.degree, poly: self.poly, generator: self.generator, conway: self.is_conway_default() }
    }

    pub fn is_conway_default(&self) -> bool {
        self.poly == CONWAY_POLYNOMIALS[self.degree as usize]
            && self.generator == if self.degree == 1 { 1 } else { 0b10 }
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.degree
    }

    #[inline]
    pub fn poly(&self) -> u32 {
        self.poly
    }

    /// The primitive element used by this field model.
    #[inline]
    pub fn generator(&self) -> Element {
        self.generator
    }

    /// Number of field elements, `2^n`.
    #[inline]
    pub fn size(&self) -> usize {
        1 << self.degree
    }

    /// Order of the multiplicative group, `2^n - 1`.
    #[inline]
    pub fn group_order(&self) -> u64 {
        (1u64 << self.degree) - 1
    }

    /// `n / 2` for even `n`.
    pub fn half_degree(&self) -> Option<u32> {
        self.degree.is_multiple_of(2).then_some(self.degree / 2)
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + Clone {
        0..(1u32 << self.degree)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Element> + Clone {
        1..(1u32 << self.degree)
    }

    pub fn check(&self, a: u64) -> Result<Element, FieldError> {
        if a >> self.degree != 0 {
            Err(FieldError::OutOfRange { element: a, degree: self.degree })
        } else {
            Ok(a as Element)
        }
    }

    #[inline]
    pub fn add(&self, a: Element, b: Element) -> Element {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        reduce(clmul(a, b), self.poly, self.degree)
    }

    #[inline]
    pub fn square(&self, a: Element) -> Element {
        self.mul(a, a)
    }

    /// Multiplicative inverse with `0^{-1} = 0`.
    #[inline]
    pub fn inv(&self, a: Element) -> Element {
        if a == 0 {
            return 0;
        }
        let order = self.exp.len() as u32;
        let l = self.log[a as usize];
        self.exp[((order - l) % order) as usize]
    }

    /// `a / b` with the same zero convention as [`Field::inv`].
    #[inline]
    pub fn div(&self, a: Element, b: Element) -> Element {
        self.mul(a, self.inv(b))
    }

    /// `a^e` by square-and-multiply. `0^0 = 1`.
    pub fn pow(&self, a: Element, mut e: u64) -> Element {
        let mut base = a;
        let mut acc: Element = 1;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^{2^k}`; negative `k` applies the inverse Frobenius (`2^{-k} = 2^{n-k}`).
    pub fn frobenius(&self, a: Element, k: i64) -> Element {
        let k = k.rem_euclid(self.degree as i64);
        let mut acc = a;
        for _ in 0..k {
            acc = self.mul(acc, acc);
        }
        acc
    }

    /// `generator^i`, exponent taken modulo `2^n - 1`.
    #[inline]
    pub fn exp(&self, i: u64) -> Element {
        self.exp[(i % self.exp.len() as u64) as usize]
    }

    /// Discrete logarithm to the base of the generator; `None` for zero.
    #[inline]
    pub fn log(&self, a: Element) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    fn trace_by_definition(&self, a: Element) -> u32 {
        let mut acc = 0;
        let mut conj = a;
        for _ in 0..self.degree {
            acc ^= conj;
            conj = self.mul(conj, conj);
        }
        debug_assert!(acc <= 1);
        acc
    }

    /// Absolute trace `Tr(a) = sum a^{2^i}` as a bit.
    #[inline]
    pub fn trace(&self, a: Element) -> u32 {
        (a & self.trace_basis).count_ones() & 1
    }

    /// `(-1)^{Tr(a)}`.
    #[inline]
    pub fn chi(&self, a: Element) -> i32 {
        1 - 2 * self.trace(a) as i32
    }

    /// Mask `w` with `Tr(v * y) = parity(w & y)` for every `y`.
    pub fn trace_form_mask(&self, v: Element) -> u32 {
        let mut mask = 0;
        let mut basis: Element = 1;
        for i in 0..self.degree {
            mask |= self.trace(self.mul(v, basis)) << i;
            basis <<= 1;
        }
        mask
    }

    /// [`Field::trace_form_mask`] for every element, indexed by element.
    pub fn trace_form_masks(&self) -> Vec<u32> {
        let size = self.size();
        let mut masks = vec![0u32; size];
        for i in 0..self.degree {
            masks[1 << i] = self.trace_form_mask(1 << i);
        }
        for v in 1..size {
            let low = v & v.wrapping_neg();
            if low != v {
                masks[v] = masks[v ^ low] ^ masks[low];
            }
        }
        masks
    }

    fn require_even(&self) -> Result<u32, FieldError> {
        self.half_degree().ok_or(FieldError::OddDegree(self.degree))
    }

    /// Conjugate over the half-degree subfield, `a^{2^m}`.
    pub fn conjugate(&self, a: Element) -> Result<Element, FieldError> {
        let m = self.require_even()?;
        Ok(self.frobenius(a, m as i64))
    }

    /// Whether `a` lies in the half-degree subfield GF(2^m).
    pub fn in_half_subfield(&self, a: Element) -> Result<bool, FieldError> {
        Ok(self.conjugate(a)? == a)
    }

    /// The unit circle `{z : z * conj(z) = 1}`, sorted ascending.
    pub fn unit_circle(&self) -> Result<Vec<Element>, FieldError> {
        let m = self.require_even()?;
        let q = 1u64 << m;
        // norm-1 elements are exactly the (q-1)-th powers
        let mut circle: Vec<Element> = (0..=q).map(|j| self.exp(j * (q - 1))).collect();
        circle.sort_unstable();
        circle.dedup();
        Ok(circle)
    }

    /// Writes `x` outside GF(2^m) as `v1 (v2 + 1) / (v1 + v2)` with
    /// `v1 != v2` both on the unit circle and distinct from 1.
    pub fn decompose_nonsubfield(&self, x: Element) -> Result<(Element, Element), FieldError> {
        let xbar = self.conjugate(x)?;
        if xbar == x {
            return Err(FieldError::InSubfield(x));
        }
        let v1 = self.div(x, xbar);
        let v2 = self.div(x ^ 1, xbar ^ 1);
        Ok((v1, v2))
    }

    /// Inverse of [`Field::decompose_nonsubfield`].
    pub fn recompose_nonsubfield(&self, v1: Element, v2: Element) -> Element {
        self.div(self.mul(v1, v2 ^ 1), v1 ^ v2)
    }
}

pub(crate) fn parse_hex(s: &str) -> Result<u32, String> {
    let s = s.trim();
    let digits = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")).unwrap_or(s);
    u32::from_str_radix(digits, 16).map_err(|e| format!("bad hex value `{s}`: {e}"))
}

/// Isomorphic copy of a small field inside a larger one.
///
/// The embedding sends the small field's polynomial variable to the first
/// root of its reduction polynomial found in the big field, so it is a ring
/// homomorphism regardless of either field's generator.
#[derive(Debug, Clone)]
pub struct SubfieldEmbedding {
    small_degree: u32,
    to_big: Vec<Element>,
    to_small: HashMap<Element, Element>,
}

impl SubfieldEmbedding {
    pub fn new(big: &Field, small: &Field) -> Result<Self, FieldError> {
        let (b, s) = (big.degree(), small.degree());
        if b % s != 0 {
            return Err(FieldError::NotSubfield { small: s, big: b });
        }
        let sub_order = (1u64 << s) - 1;
        let step = big.group_order() / sub_order;
        let poly = small.poly();
        let eval = |z: Element| {
            let mut acc: Element = 0;
            for i in (0..=s).rev() {
                acc = big.mul(acc, z) ^ ((poly >> i) & 1);
            }
            acc
        };
        let root = (0..sub_order)
            .map(|j| big.exp(j * step))
            .find(|&z| eval(z) == 0)
            .ok_or(FieldError::NotSubfield { small: s, big: b })?;

        let mut basis = Vec::with_capacity(s as usize);
        let mut acc: Element = 1;
        for _ in 0..s {
            basis.push(acc);
            acc = big.mul(acc, root);
        }
        let mut to_big = vec![0; 1 << s];
        for a in 1..(1usize << s) {
            let low = a.trailing_zeros() as usize;
            to_big[a] = to_big[a & (a - 1)] ^ basis[low];
        }
        let to_small = to_big.iter().enumerate().map(|(a, &z)| (z, a as Element)).collect();
        Ok(SubfieldEmbedding { small_degree: s, to_big, to_small })
    }

    pub fn small_degree(&self) -> u32 {
        self.small_degree
    }

    pub fn to_big(&self, a: Element) -> Element {
        self.to_big[a as usize]
    }

    /// `None` when `z` is not in the image of the embedding.
    pub fn to_small(&self, z: Element) -> Option<Element> {
        self.to_small.get(&z).copied()
    }
}
