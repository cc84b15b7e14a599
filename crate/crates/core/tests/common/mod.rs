#![allow(dead_code)]

use cayley_core::{GroupSpec, GroupSubset};
use proptest::prelude::*;

pub fn group(lit: &str) -> GroupSpec {
    GroupSpec::parse(lit).unwrap()
}

pub fn set(g: &GroupSpec, idx: &[usize]) -> GroupSubset {
    GroupSubset::from_indices(g, idx.iter().copied()).unwrap()
}

/// A subset of `g` with between `lo` and `hi` elements.
pub fn subset(g: GroupSpec, lo: usize, hi: usize) -> impl Strategy<Value = GroupSubset> {
    let n = g.order();
    proptest::sample::subsequence((0..n).collect::<Vec<_>>(), lo.min(n)..=hi.min(n))
        .prop_map(move |idx| GroupSubset::from_indices(&g, idx).unwrap())
}

/// One of the given groups.
pub fn any_group(lits: &'static [&'static str]) -> impl Strategy<Value = GroupSpec> {
    proptest::sample::select(lits).prop_map(group)
}

/// A group from `lits` with two subsets of it.
pub fn pair(lits: &'static [&'static str], lo: usize, hi: usize) -> impl Strategy<Value = (GroupSubset, GroupSubset)> {
    any_group(lits).prop_flat_map(move |g| (subset(g.clone(), lo, hi), subset(g, lo, hi)))
}

/// A group from `lits` with three subsets of it.
pub fn triple(
    lits: &'static [&'static str],
    lo: usize,
    hi: usize,
) -> impl Strategy<Value = (GroupSubset, GroupSubset, GroupSubset)> {
    any_group(lits).prop_flat_map(move |g| (subset(g.clone(), lo, hi), subset(g.clone(), lo, hi), subset(g, lo, hi)))
}
