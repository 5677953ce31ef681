//! Binary Kloosterman sums `K_n(g) = sum_x (-1)^{Tr(g x + x^{-1})}` with `0^{-1} = 0`.

use crate::field::{Element, Field, FieldError, FieldInfo, SubfieldEmbedding};
use crate::spectra::fwht;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Direct evaluation over all `2^n` field elements.
pub fn kloosterman(field: &Field, gamma: Element) -> i64 {
    field.elements().map(|x| field.chi(field.mul(gamma, x) ^ field.inv(x)) as i64).sum()
}

/// All Kloosterman sums of one field with their extrema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KloostermanProfile {
    pub field: FieldInfo,
    /// `values[g] = K_n(g)`.
    pub values: Vec<i64>,
    pub k_max: i64,
    pub k_min: i64,
    pub max_witness: Element,
    pub min_witness: Element,
}

impl KloostermanProfile {
    fn from_values(field: &Field, values: Vec<i64>) -> Self {
        let (mut max_witness, mut min_witness) = (0usize, 0usize);
        for (g, &k) in values.iter().enumerate() {
            if k > values[max_witness] {
                max_witness = g;
            }
            if k < values[min_witness] {
                min_witness = g;
            }
        }
        KloostermanProfile {
            field: field.info(),
            k_max: values[max_witness],
            k_min: values[min_witness],
            max_witness: max_witness as Element,
            min_witness: min_witness as Element,
            values,
        }
    }

    /// `K_n(g)` for every `g` through one Walsh-Hadamard transform of `(-1)^{Tr(x^{-1})}`.
    pub fn compute(field: &Field) -> Self {
        let mut signs: Vec<i32> = field.elements().map(|x| field.chi(field.inv(x))).collect();
        fwht(&mut signs).expect("field size is a power of two");
        let values = field.trace_form_masks().iter().map(|&m| signs[m as usize] as i64).collect();
        Self::from_values(field, values)
    }

    /// Same profile by direct summation; `O(4^n)`.
    pub fn compute_direct(field: &Field) -> Self {
        let values = (0..field.size() as Element).into_par_iter().map(|g| kloosterman(field, g)).collect();
        Self::from_values(field, values)
    }

    #[inline]
    pub fn get(&self, gamma: Element) -> i64 {
        self.values[gamma as usize]
    }

    /// CSV export with rows `gamma(hex),K(decimal)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("gamma,K\n");
        for (g, k) in self.values.iter().enumerate() {
            out.push_str(&format!("{g:x},{k}\n"));
        }
        out
    }

    /// JSON summary: field, extrema and witnesses, without the value list.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "field": self.field,
            "k_max": self.k_max,
            "k_min": self.k_min,
            "max_witness": format!("{:x}", self.max_witness),
            "min_witness": format!("{:x}", self.min_witness),
        })
    }
}

/// `floor(2^{n/2 + 1})`, computed exactly as `isqrt(2^{n+2})`.
pub fn floor_two_pow_half_plus_one(n: u32) -> i64 {
    let target = 1u128 << (n + 2);
    let mut r = (target as f64).sqrt() as u128;
    while r * r > target {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= target {
        r += 1;
    }
    r as i64
}

/// Closed-form `(K_max(n), K_min(n))`, branch-selected by `floor(2^{n/2+1}) mod 4`.
pub fn extrema_closed_form(n: u32) -> (i64, i64) {
    let f = floor_two_pow_half_plus_one(n);
    let j = f.rem_euclid(4);
    let k_max = if j == 3 { f + 1 } else { f - j };
    let k_min = if j == 0 { 4 - f } else { j - f };
    (k_max, k_min)
}

/// Multiples of 4 in the Weil range `[1 - 2^{(n+2)/2}, 1 + 2^{(n+2)/2}]`.
pub fn permitted_values(n: u32) -> Vec<i64> {
    let bound = 1i128 << (n + 2);
    let f = floor_two_pow_half_plus_one(n);
    (-(f + 4)..=(f + 4)).filter(|s| s.rem_euclid(4) == 0).filter(|&s| ((s - 1) as i128).pow(2) <= bound).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurjectivityReport {
    pub n: u32,
    pub permitted: Vec<i64>,
    pub attained: Vec<i64>,
    /// Permitted values never attained.
    pub missing: Vec<i64>,
    /// Attained values outside the permitted set.
    pub unexpected: Vec<i64>,
}

impl SurjectivityReport {
    pub fn holds(&self) -> bool {
        self.missing.is_empty() && self.unexpected.is_empty()
    }
}

/// Checks that every permitted value is attained by some `K_n(g)`.
pub fn verify_value_surjectivity(profile: &KloostermanProfile) -> SurjectivityReport {
    let n = profile.field.n;
    let permitted = permitted_values(n);
    let mut attained: Vec<i64> = profile.values.clone();
    attained.sort_unstable();
    attained.dedup();
    let missing = permitted.iter().copied().filter(|s| attained.binary_search(s).is_err()).collect();
    let unexpected = attained.iter().copied().filter(|s| permitted.binary_search(s).is_err()).collect();
    SurjectivityReport { n, permitted, attained, missing, unexpected }
}

/// Elements whose sum violates `K = 0 (mod 8)` for trace 0 and `K = 4 (mod 8)` for trace 1.
pub fn congruence_violations(field: &Field, profile: &KloostermanProfile) -> Vec<Element> {
    field.elements().filter(|&g| profile.get(g).rem_euclid(8) != 4 * field.trace(g) as i64).collect()
}

/// Sums over the unit circle of GF(2^{2m}) and the Kloosterman sums of the
/// half-degree subfield they reduce to.
#[derive(Debug, Clone)]
pub struct UnitCircleContext {
    circle: Vec<Element>,
    embedding: SubfieldEmbedding,
    half_profile: KloostermanProfile,
}

impl UnitCircleContext {
    /// Uses the Conway model of GF(2^m) as the reference subfield.
    pub fn new(field: &Field) -> Result<Self, FieldError> {
        let m = field.half_degree().ok_or(FieldError::OddDegree(field.degree()))?;
        Self::with_half_field(field, &Field::conway(m)?)
    }

    pub fn with_half_field(field: &Field, half: &Field) -> Result<Self, FieldError> {
        let m = field.half_degree().ok_or(FieldError::OddDegree(field.degree()))?;
        if half.degree() != m {
            return Err(FieldError::NotSubfield { small: half.degree(), big: field.degree() });
        }
        Ok(UnitCircleContext {
            circle: field.unit_circle()?,
            embedding: SubfieldEmbedding::new(field, half)?,
            half_profile: KloostermanProfile::compute(half),
        })
    }

    pub fn circle(&self) -> &[Element] {
        &self.circle
    }

    pub fn half_profile(&self) -> &KloostermanProfile {
        &self.half_profile
    }

    /// `K_m(g * conj(g))` with the norm re-encoded into the m-bit field.
    pub fn norm_kloosterman(&self, field: &Field, gamma: Element) -> i64 {
        let norm = field.mul(gamma, field.conjugate(gamma).expect("even degree"));
        let small = self.embedding.to_small(norm).expect("norm lies in the half-degree subfield");
        self.half_profile.get(small)
    }

    /// `sum_{z in circle} (-1)^{Tr(g z)}` computed directly.
    pub fn unit_circle_sum(&self, field: &Field, gamma: Element) -> Result<i64, FieldError> {
        if gamma == 0 {
            return Err(FieldError::Zero);
        }
        Ok(self.circle.iter().map(|&z| field.chi(field.mul(gamma, z)) as i64).sum())
    }

    /// Left side and `1 - K_m(g conj(g))`.
    pub fn unit_circle_identity(&self, field: &Field, gamma: Element) -> Result<(i64, i64), FieldError> {
        let lhs = self.unit_circle_sum(field, gamma)?;
        Ok((lhs, 1 - self.norm_kloosterman(field, gamma)))
    }

    /// Predicted `DLCT(1, v)` of `x^{l(2^m-1)}`: `K^2/2` if `Tr(v) = 0`, else `K^2/2 - 2K`,
    /// with `K = K_m(v conj(v))`.
    pub fn dillon_dlct_predict(&self, field: &Field, v: Element) -> Result<i64, FieldError> {
        if v == 0 {
            return Err(FieldError::Zero);
        }
        let k = self.norm_kloosterman(field, v);
        let base = k * k / 2;
        Ok(if field.trace(v) == 0 { base } else { base - 2 * k })
    }
}

/// Closed-form DLU of `x^{l(2^m - 1)}` over GF(2^{2m}).
pub fn dillon_dlu_predict(m: u32) -> u64 {
    let (k_max, _) = extrema_closed_form(m);
    let j = floor_two_pow_half_plus_one(m).rem_euclid(4);
    let base = k_max * k_max / 2;
    (if j == 0 || j == 3 { base } else { base + 2 * k_max }) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gamma() {
        for n in 1..=10 {
            let f = Field::conway(n).unwrap();
            assert_eq!(kloosterman(&f, 0), 0);
        }
    }

    #[test]
    fn transform_matches_direct() {
        for n in 1..=9 {
            let f = Field::conway(n).unwrap();
            assert_eq!(KloostermanProfile::compute(&f), KloostermanProfile::compute_direct(&f));
        }
    }

    #[test]
    fn profile_multiset_independent_of_representation() {
        // x^6 + x^5 + 1 vs the Conway x^6 + x^4 + x^3 + x + 1
        let alt = Field::new(6, 0x61, 2).unwrap();
        let conway = Field::conway(6).unwrap();
        let mut a = KloostermanProfile::compute_direct(&alt).values;
        let mut b = KloostermanProfile::compute_direct(&conway).values;
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(floor_two_pow_half_plus_one(5), 11);
        assert_eq!(extrema_closed_form(5).0, 12);
        assert_eq!(extrema_closed_form(4), (8, -4));
        assert_eq!(floor_two_pow_half_plus_one(3), 5);
    }

    #[test]
    fn closed_form_matches_profile() {
        for n in 3..=12 {
            let f = Field::conway(n).unwrap();
            let p = KloostermanProfile::compute(&f);
            assert_eq!(extrema_closed_form(n), (p.k_max, p.k_min), "n={n}");
            assert_eq!(kloosterman(&f, p.max_witness), p.k_max);
        }
    }

    #[test]
    fn surjectivity_small() {
        let p = KloostermanProfile::compute(&Field::conway(3).unwrap());
        let r = verify_value_surjectivity(&p);
        assert_eq!(r.permitted, vec![-4, 0, 4]);
        assert_eq!(r.attained, vec![-4, 0, 4]);
        assert!(r.holds());
        let r6 = verify_value_surjectivity(&KloostermanProfile::compute(&Field::conway(6).unwrap()));
        assert!(r6.holds());
        assert!(r6.attained.contains(&0));
    }

    #[test]
    fn congruences() {
        for n in 3..=12 {
            let f = Field::conway(n).unwrap();
            let p = KloostermanProfile::compute(&f);
            assert!(congruence_violations(&f, &p).is_empty(), "n={n}");
        }
    }

    #[test]
    fn unit_circle_identity_small() {
        for n in [2u32, 4, 6, 8] {
            let f = Field::conway(n).unwrap();
            let ctx = UnitCircleContext::new(&f).unwrap();
            for g in f.nonzero() {
                let (lhs, rhs) = ctx.unit_circle_identity(&f, g).unwrap();
                assert_eq!(lhs, rhs, "n={n} g={g:#x}");
                assert_eq!(lhs.rem_euclid(2), 1);
            }
            assert_eq!(ctx.unit_circle_sum(&f, 0), Err(FieldError::Zero));
        }
        assert!(UnitCircleContext::new(&Field::conway(7).unwrap()).is_err());
    }

    #[test]
    fn unit_circle_identity_with_foreign_half_field() {
        let f = Field::conway(8).unwrap();
        let half = Field::new(4, 0x19, 2).unwrap();
        let ctx = UnitCircleContext::with_half_field(&f, &half).unwrap();
        for g in f.nonzero() {
            let (lhs, rhs) = ctx.unit_circle_identity(&f, g).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn dillon_predict_examples() {
        assert_eq!(dillon_dlu_predict(3), 16);
        assert_eq!(dillon_dlu_predict(5), 72);
        let expected = [8u64, 16, 32, 72, 128, 240, 512, 1056];
        for (m, e) in (2..=9).zip(expected) {
            assert_eq!(dillon_dlu_predict(m), e);
        }
        let f = Field::conway(8).unwrap();
        let ctx = UnitCircleContext::new(&f).unwrap();
        let mut best = 0;
        for v in f.nonzero() {
            let p = ctx.dillon_dlct_predict(&f, v).unwrap();
            if f.trace(v) == 0 {
                assert!(p >= 0);
            }
            best = best.max(p.unsigned_abs());
        }
        assert_eq!(best, 32);
        assert_eq!(ctx.dillon_dlct_predict(&f, 0), Err(FieldError::Zero));
    }

    #[test]
    fn csv_and_summary() {
        let p = KloostermanProfile::compute(&Field::conway(3).unwrap());
        let csv = p.to_csv();
        assert!(csv.starts_with("gamma,K\n0,0\n"));
        assert_eq!(csv.lines().count(), 9);
        let s = p.summary_json();
        assert_eq!(s["k_max"], 4);
    }
}
