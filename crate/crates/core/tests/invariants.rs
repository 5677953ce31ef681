use dlct_core::field::Field;
use dlct_core::functions::{build, Construction, FunctionTable};
use dlct_core::kloosterman::KloostermanProfile;
use dlct_core::spectra::{self, dlct_row, dlu_lower_bound, Method};
use dlct_core::theorems::{modified_dlct, LinearizedOperator};
use proptest::prelude::*;
use std::sync::Arc;

fn random_table(n: u32, seed: u64, permutation: bool) -> FunctionTable {
    let field = Arc::new(Field::conway(n).unwrap());
    build(&field, &Construction::Random { seed, permutation }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dlu_respects_lower_bound(n in 2u32..=8, seed in any::<u64>()) {
        let f = random_table(n, seed, seed % 2 == 0);
        let bound = dlu_lower_bound(n, n).unwrap();
        prop_assert!(spectra::dlu_full_scan(&f, Method::Transform).value >= bound.integer_bound());
    }

    #[test]
    fn spectrum_population_and_parity(n in 2u32..=7, seed in any::<u64>()) {
        let f = random_table(n, seed, false);
        let h = spectra::dlct_spectrum_full_scan(&f, Method::Transform);
        let nonzero = (f.size() as u64 - 1).pow(2);
        prop_assert_eq!(h.population, nonzero);
        prop_assert!(h.counts.keys().all(|v| v % 2 == 0 && v.unsigned_abs() <= 1 << (n - 1)));
    }

    #[test]
    fn row_sum_counts_collisions(n in 2u32..=8, seed in any::<u64>(), u in 1u32..256) {
        let f = random_table(n, seed, false);
        let u = u % (f.size() as u32 - 1) + 1;
        let row = dlct_row(&f, u, Method::Transform);
        let collisions = f.field().elements().filter(|&x| f.eval(x) == f.eval(x ^ u)).count() as i64;
        prop_assert_eq!(row.iter().map(|&e| e as i64).sum::<i64>(), collisions << (n - 1));
    }

    #[test]
    fn power_rows_are_reindexed_row_one(n in 3u32..=9, d in 1u64..600, u in 1u32..512, v in 1u32..512) {
        let field = Arc::new(Field::conway(n).unwrap());
        let f = build(&field, &Construction::Power { d }).unwrap();
        let (u, v) = (u % (f.size() as u32 - 1) + 1, v % f.size() as u32);
        let reindexed = field.mul(field.pow(u, d), v);
        prop_assert_eq!(spectra::dlct_entry(&f, u, v), spectra::dlct_entry(&f, 1, reindexed));
    }

    #[test]
    fn modification_correction_is_exact(seed in any::<u64>(), points in prop::collection::btree_map(0u32..64, 0u32..64, 0..5), u in 0u32..64, v in 0u32..64) {
        let base = random_table(6, seed, false);
        let mods: Vec<(u32, u32)> = points.into_iter().collect();
        let mut values = base.values().to_vec();
        for &(x, a) in &mods {
            values[x as usize] = a;
        }
        let modified = FunctionTable::from_values(base.field_arc().clone(), values, "modified").unwrap();
        prop_assert_eq!(modified_dlct(&base, &mods, u, v).unwrap(), spectra::dlct_entry(&modified, u, v) as i64);
    }

    #[test]
    fn kernels_are_subspaces(n in 2u32..=12, k in 1u32..12, v in 1u32..4096) {
        let field = Field::conway(n).unwrap();
        let v = v % (field.size() as u32 - 1) + 1;
        let op = LinearizedOperator::cubic_lv(&field, k, v);
        let kernel = op.kernel(&field);
        prop_assert!(kernel.len().is_power_of_two());
        for &a in &kernel {
            prop_assert_eq!(op.eval(&field, a), 0);
            prop_assert!(kernel.binary_search(&(a ^ kernel[kernel.len() - 1])).is_ok());
        }
    }

    #[test]
    fn table_text_roundtrip(n in 1u32..=8, seed in any::<u64>()) {
        let f = random_table(n, seed, false);
        let back = FunctionTable::from_text(&f.to_text(), None).unwrap();
        prop_assert_eq!(back.values(), f.values());
    }
}

#[test]
fn kloosterman_values_divisible_by_four() {
    for n in 3..=12 {
        let field = Field::conway(n).unwrap();
        let p = KloostermanProfile::compute(&field);
        assert!(p.values.iter().all(|k| k % 4 == 0), "n={n}");
        // the x = 0 term shifts the classical sum by one
        assert!(p.values.iter().all(|&k| (k - 1).pow(2) <= 1 << (n + 2)), "Weil range n={n}");
    }
}
