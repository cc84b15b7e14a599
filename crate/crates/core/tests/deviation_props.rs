mod common;

use cayley_core::deviation::{
    corollary15_pipeline, greedy_packing, lemma14_extract, random_subset, restriction_params, restriction_sample,
    row_sigmas, sigma, split_blocks, PipelineOutcome,
};
use cayley_core::rational::ratio;
use cayley_core::subset::additive_energy;
use cayley_core::{GroupSubset, Rational};
use common::*;
use num_traits::Signed;
use proptest::prelude::*;

const GROUPS: &[&str] = &["f2^6", "z16", "3,5", "2,8"];

fn eps_strategy() -> impl Strategy<Value = Rational> {
    prop::sample::select(vec![ratio(1, 2), ratio(1, 3), ratio(1, 4), ratio(1, 8), ratio(3, 8)])
}

fn instance() -> impl Strategy<Value = (GroupSubset, GroupSubset, GroupSubset, Rational)> {
    any_group(GROUPS).prop_flat_map(|g| {
        let n = g.order();
        (subset(g.clone(), 0, n), subset(g.clone(), 1, 12), subset(g, 1, n), eps_strategy())
    })
}

proptest! {
    #[test]
    fn packing_is_valid_and_large((_, x, y, eps) in instance()) {
        let p = greedy_packing(&x, &y, eps).unwrap();
        prop_assert_eq!(p.check(&x, &y), Vec::<String>::new());
        // k > eps^2 |Y| K / n with K = n^2 |Y| / E
        let n = x.len() as i128;
        let bound = eps * eps * p.k_ratio * y.len() as i128 / n;
        prop_assert!(Rational::from_integer(p.k as i128) > bound);
    }

    #[test]
    fn extraction_keeps_a_fraction((a, x, y, eps) in instance()) {
        let yp = lemma14_extract(&a, &x, &y, eps).unwrap();
        prop_assert!(yp.is_subset(&y));
        if sigma(&a, &x, &y).unwrap().sigma.abs() >= eps {
            prop_assert!(Rational::from_integer(yp.len() as i128) >= eps * y.len() as i128);
        }
    }

    #[test]
    fn pipeline_meets_its_guarantees((a, x, y, eps) in instance()) {
        match corollary15_pipeline(&a, &x, &y, eps).unwrap() {
            PipelineOutcome::Witnesses { y_prime, packing, k_ratio, k_prime, .. } => {
                prop_assert!(k_prime >= eps * k_ratio);
                let bound = eps.pow(4) * k_ratio * y.len() as i128 / (4 * x.len() as i128);
                prop_assert!(Rational::from_integer(packing.k as i128) > bound);
                prop_assert_eq!(packing.check(&x, &y_prime), Vec::<String>::new());
            }
            PipelineOutcome::Diagnostic { sigma: s, .. } => prop_assert!(s.abs() < eps),
        }
    }

    #[test]
    fn deviation_is_mean_of_rows((a, x, y, _) in instance()) {
        let whole = sigma(&a, &x, &y).unwrap().sigma;
        let rows = row_sigmas(&a, &x, &y).unwrap();
        let mean = rows.iter().map(|r| r.1).sum::<Rational>() / y.len() as i128;
        prop_assert_eq!(whole, mean);
    }

    #[test]
    fn blocks_partition_in_range(y in subset(group("z64"), 1, 64), lo in 1usize..8, extra in 0usize..8) {
        let hi = lo + extra;
        match split_blocks(&y, lo, hi) {
            Ok(parts) => {
                let mut all = GroupSubset::empty(y.group());
                for p in &parts {
                    prop_assert!(p.len() >= lo && p.len() <= hi);
                    prop_assert!(all.is_disjoint(p));
                    all = all.union(p).unwrap();
                }
                prop_assert_eq!(all, y);
            }
            // no count of blocks fits: every q has q hi < |Y| or q lo > |Y|
            Err(_) => prop_assert!((1..=y.len()).all(|q| q * hi < y.len() || q * lo > y.len())),
        }
    }

    #[test]
    fn restriction_draw_sizes(seed in any::<u64>()) {
        let g = group("z64");
        let x = set(&g, &(0..40).collect::<Vec<_>>());
        let y = set(&g, &(10..50).collect::<Vec<_>>());
        let a = random_subset(&g, seed).a;
        let d = restriction_sample(&x, &y, ratio(1, 2), seed, Some(&a)).unwrap();
        prop_assert!(d.s_set.is_subset(&x) && d.t_set.is_subset(&y));
        prop_assert_eq!(d.s_set.len(), d.params.s);
        prop_assert_eq!(d.t_set.len(), d.params.t);
        prop_assert_eq!(d.energy_st, additive_energy(&d.s_set, &d.t_set).unwrap());
    }
}

#[test]
fn restriction_params_are_clipped() {
    let g = group("z64");
    let x = set(&g, &(0..10).collect::<Vec<_>>());
    let y = set(&g, &(0..64).collect::<Vec<_>>());
    let p = restriction_params(&x, &y, ratio(1, 2)).unwrap();
    assert_eq!(p.s, 10);
    assert!(p.t >= 1 && p.t <= 64);
}

#[test]
fn random_subset_is_seeded() {
    let g = group("f2^10");
    assert_eq!(random_subset(&g, 7), random_subset(&g, 7));
    assert_ne!(random_subset(&g, 7).a, random_subset(&g, 8).a);
}
