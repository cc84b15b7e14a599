//! Dissociated sets, signed spans and additive dimension.
//!
//! A set `L` is dissociated when the only choice of signs `e_l` in
//! `{-1, 0, 1}` with `sum e_l * l = 0` is the all-zero one. `Span(S)` is the
//! set of all such signed sums, and `dim(A)` is the size of a largest
//! dissociated subset of `A`.
//!
//! Two facts drive the algorithms here:
//!
//! * `D + {l}` is dissociated iff `D` is and `l` is not in `Span(D)`; a
//!   relation that uses `l` has coefficient `+-1` on it and `Span(D) = -Span(D)`.
//! * In exponent-2 groups `Span(S)` is the linear span and dissociated means
//!   linearly independent over the two-element field, so ranks replace search.

use std::str::FromStr;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::bounds::{lemma6_bound, Lemma6Bound};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::subset::GroupSubset;

/// Largest set the sign-vector enumeration will accept.
pub const DISSOCIATION_GUARD: usize = 24;
/// Above this size the enumeration switches to meet-in-the-middle.
pub const DIRECT_ENUMERATION_MAX: usize = 12;
/// Largest set the exact dimension search accepts outside exponent-2 groups.
pub const EXACT_DIMENSION_GUARD: usize = 20;
/// Largest group for which low-dimension sets are counted by enumeration.
pub const LOW_DIM_COUNT_MAX_ORDER: usize = 32;
const LOW_DIM_NODE_BUDGET: u64 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DimensionMode {
    Exact,
    Greedy,
}

impl FromStr for DimensionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(DimensionMode::Exact),
            "greedy" => Ok(DimensionMode::Greedy),
            other => Err(Error::Parse(format!("unknown dimension mode {other:?}"))),
        }
    }
}

/// Outcome of a dimension computation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionResult {
    pub value: usize,
    /// A dissociated subset of the queried set with `value` elements.
    pub witness: GroupSubset,
    /// True when `value` is the maximum, false for greedy lower bounds.
    pub exact: bool,
}

/// All `3^h` signed sums of `elems`, with position 0 holding the empty sum.
fn signed_sums(group: &GroupSpec, elems: &[usize]) -> Vec<usize> {
    let mut sums = Vec::with_capacity(3usize.pow(elems.len() as u32));
    sums.push(0);
    for &l in elems {
        let neg = group.neg_index(l);
        let len = sums.len();
        for i in 0..len {
            let s = sums[i];
            sums.push(group.add_index(s, l));
            sums.push(group.add_index(s, neg));
        }
    }
    sums
}

/// Dissociativity by enumerating sign vectors, whatever the group.
///
/// Sets larger than [`DIRECT_ENUMERATION_MAX`] are split in two halves and
/// matched: a nontrivial relation exists iff some nonzero left-half sum
/// equals the negation of some right-half sum, or either half has a relation
/// of its own.
pub fn is_dissociated_by_enumeration(s: &GroupSubset) -> Result<bool> {
    if s.len() > DISSOCIATION_GUARD {
        return Err(Error::GuardExceeded {
            what: "dissociativity enumeration",
            size: s.len() as u128,
            limit: DISSOCIATION_GUARD as u128,
        });
    }
    if s.contains(0) {
        return Ok(false);
    }
    let g = s.group();
    let elems = s.indices();
    if elems.len() <= DIRECT_ENUMERATION_MAX {
        return Ok(!signed_sums(g, &elems).iter().skip(1).any(|&z| z == 0));
    }
    let (left, right) = elems.split_at(elems.len() / 2);
    let left_sums = signed_sums(g, left);
    if left_sums.iter().skip(1).any(|&z| z == 0) {
        return Ok(false);
    }
    let mut reached = FixedBitSet::with_capacity(g.order());
    for &z in &left_sums {
        reached.insert(z);
    }
    let right_sums = signed_sums(g, right);
    // any nonzero right vector whose negated sum the left side reaches
    // (including the empty left sum) gives a nontrivial relation
    Ok(!right_sums
        .iter()
        .skip(1)
        .any(|&z| reached.contains(g.neg_index(z))))
}

/// Rank over the two-element field of the given bit vectors.
pub fn gf2_rank(vectors: &[u64]) -> usize {
    gf2_basis(vectors).len()
}

/// Positions of a basis chosen greedily in input order: a vector is kept iff
/// it is independent of the ones kept before it.
fn gf2_basis(vectors: &[u64]) -> Vec<usize> {
    // reduced[b] holds a vector whose highest set bit is b
    let mut reduced = [0u64; 64];
    let mut kept = Vec::new();
    for (pos, &v) in vectors.iter().enumerate() {
        let mut x = v;
        while x != 0 {
            let top = 63 - x.leading_zeros() as usize;
            if reduced[top] == 0 {
                reduced[top] = x;
                kept.push(pos);
                break;
            }
            x ^= reduced[top];
        }
    }
    kept
}

/// True iff the only `{-1,0,1}` combination of `s` summing to zero is trivial.
///
/// Exponent-2 groups use linear independence; elsewhere sign vectors are
/// enumerated, which is refused above [`DISSOCIATION_GUARD`] elements.
pub fn is_dissociated(s: &GroupSubset) -> Result<bool> {
    if s.group().is_exponent_two() {
        let v: Vec<u64> = s.iter().map(|i| i as u64).collect();
        return Ok(gf2_rank(&v) == v.len());
    }
    is_dissociated_by_enumeration(s)
}

/// Adds `l` to a span: `S | (S + l) | (S - l)`.
fn extend_span(group: &GroupSpec, span: &FixedBitSet, l: usize) -> FixedBitSet {
    let mut out = span.clone();
    let neg = group.neg_index(l);
    for z in span.ones() {
        out.insert(group.add_index(z, l));
        out.insert(group.add_index(z, neg));
    }
    out
}

fn zero_span(group: &GroupSpec) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(group.order());
    b.insert(0);
    b
}

/// `Span(S) = { sum e_j s_j : e_j in {-1, 0, 1} }`.
pub fn span(s: &GroupSubset) -> Result<GroupSubset> {
    let g = s.group();
    if !g.is_exponent_two() && s.len() > DISSOCIATION_GUARD {
        return Err(Error::GuardExceeded {
            what: "span enumeration",
            size: s.len() as u128,
            limit: DISSOCIATION_GUARD as u128,
        });
    }
    let mut bits = zero_span(g);
    for l in s.iter() {
        bits = extend_span(g, &bits, l);
    }
    Ok(GroupSubset::from_bits(g, bits))
}

/// Scans `a` in increasing index order and keeps every element outside the
/// span of those kept so far. The result is dissociated and maximal.
fn greedy_dissociated(a: &GroupSubset) -> GroupSubset {
    let g = a.group();
    let mut witness = GroupSubset::empty(g);
    let mut span = zero_span(g);
    for l in a.iter() {
        if !span.contains(l) {
            witness.insert(l);
            span = extend_span(g, &span, l);
        }
    }
    witness
}

/// Exhaustive branch-and-bound for a largest dissociated subset of `a`, in
/// any abelian group. Refused above [`EXACT_DIMENSION_GUARD`] elements.
///
/// The search includes elements before excluding them, in increasing index
/// order, and only replaces the incumbent on strict improvement, so the
/// witness is deterministic.
pub fn max_dissociated_search(a: &GroupSubset) -> Result<DimensionResult> {
    if a.len() > EXACT_DIMENSION_GUARD {
        return Err(Error::GuardExceeded {
            what: "exact dimension search (use greedy mode)",
            size: a.len() as u128,
            limit: EXACT_DIMENSION_GUARD as u128,
        });
    }
    let g = a.group();
    let elems: Vec<usize> = a.iter().filter(|&l| l != 0).collect();
    // distinct subset sums of a dissociated set force 2^d <= N
    let ceiling = (usize::BITS - 1 - g.order().leading_zeros()) as usize;

    struct Search<'a> {
        group: &'a GroupSpec,
        elems: &'a [usize],
        ceiling: usize,
        chosen: Vec<usize>,
        best: Vec<usize>,
    }

    impl Search<'_> {
        fn run(&mut self, pos: usize, span: &FixedBitSet) {
            if self.best.len() == self.ceiling {
                return;
            }
            if self.chosen.len() + (self.elems.len() - pos) <= self.best.len() {
                return;
            }
            if pos == self.elems.len() {
                self.best = self.chosen.clone();
                return;
            }
            let l = self.elems[pos];
            if !span.contains(l) {
                let next = extend_span(self.group, span, l);
                self.chosen.push(l);
                self.run(pos + 1, &next);
                self.chosen.pop();
            }
            self.run(pos + 1, span);
        }
    }

    let mut search = Search {
        group: g,
        elems: &elems,
        ceiling,
        chosen: Vec::new(),
        best: Vec::new(),
    };
    search.run(0, &zero_span(g));
    Ok(DimensionResult {
        value: search.best.len(),
        witness: GroupSubset::from_indices(g, search.best)?,
        exact: true,
    })
}

/// `dim(A)` in the requested mode.
///
/// Exact mode uses Gaussian elimination in exponent-2 groups and
/// [`max_dissociated_search`] elsewhere. Greedy mode returns a maximal
/// dissociated subset, which is only a lower bound outside exponent-2 groups.
pub fn additive_dimension(a: &GroupSubset, mode: DimensionMode) -> Result<DimensionResult> {
    let g = a.group();
    if g.is_exponent_two() {
        let elems = a.indices();
        let v: Vec<u64> = elems.iter().map(|&i| i as u64).collect();
        let witness = GroupSubset::from_indices(g, gf2_basis(&v).into_iter().map(|p| elems[p]))?;
        return Ok(DimensionResult {
            value: witness.len(),
            witness,
            exact: true,
        });
    }
    match mode {
        DimensionMode::Exact => max_dissociated_search(a),
        DimensionMode::Greedy => {
            let witness = greedy_dissociated(a);
            Ok(DimensionResult {
                value: witness.len(),
                witness,
                exact: false,
            })
        }
    }
}

/// Exact dimension when affordable, otherwise the greedy lower bound.
pub fn best_dimension(a: &GroupSubset) -> Result<DimensionResult> {
    if a.group().is_exponent_two() || a.len() <= EXACT_DIMENSION_GUARD {
        additive_dimension(a, DimensionMode::Exact)
    } else {
        additive_dimension(a, DimensionMode::Greedy)
    }
}

/// Number of nonempty `X` with `|X| <= n` and `dim X <= d`, next to the
/// closed-form bound `e^{2nd}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowDimCount {
    pub group: GroupSpec,
    pub n: u64,
    pub d: u64,
    /// `None` when the group is too large to enumerate.
    pub exact: Option<u64>,
    pub bound: Lemma6Bound,
    /// `exact <= e^{2nd}`; vacuously true without an exact count.
    pub within_bound: bool,
}

/// Counts low-dimensional sets by depth-first enumeration in increasing index
/// order. Dimension is monotone under inclusion, so a branch is cut as soon
/// as its set exceeds dimension `d`.
pub fn count_low_dim_sets(group: &GroupSpec, n: u64, d: u64) -> Result<LowDimCount> {
    let bound = lemma6_bound(group.order() as f64, n as f64, d as f64);
    let exact = if group.order() <= LOW_DIM_COUNT_MAX_ORDER {
        count_by_enumeration(group, n as usize, d as usize)?
    } else {
        None
    };
    let within_bound = match exact {
        Some(c) => (c as f64).ln() <= bound.ln_bound || c <= 1,
        None => true,
    };
    Ok(LowDimCount {
        group: group.clone(),
        n,
        d,
        exact,
        bound,
        within_bound,
    })
}

fn count_by_enumeration(group: &GroupSpec, n: usize, d: usize) -> Result<Option<u64>> {
    struct Walk<'a> {
        group: &'a GroupSpec,
        n: usize,
        d: usize,
        set: GroupSubset,
        count: u64,
        nodes: u64,
    }

    impl Walk<'_> {
        fn dim(&self) -> Result<usize> {
            Ok(best_dimension(&self.set)?.value)
        }

        fn run(&mut self, next: usize) -> Result<bool> {
            for i in next..self.group.order() {
                self.nodes += 1;
                if self.nodes > LOW_DIM_NODE_BUDGET {
                    return Ok(false);
                }
                self.set.insert(i);
                if self.dim()? <= self.d {
                    self.count += 1;
                    if self.set.len() < self.n && !self.run(i + 1)? {
                        return Ok(false);
                    }
                }
                self.set.remove(i);
            }
            Ok(true)
        }
    }

    if n == 0 {
        return Ok(Some(0));
    }
    let mut walk = Walk {
        group,
        n,
        d,
        set: GroupSubset::empty(group),
        count: 0,
        nodes: 0,
    };
    Ok(walk.run(0)?.then_some(walk.count))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(g: &GroupSpec, idx: &[usize]) -> GroupSubset {
        GroupSubset::from_indices(g, idx.iter().copied()).unwrap()
    }

    /// Literal definition: every nonzero sign vector, no tricks.
    fn dissociated_oracle(s: &GroupSubset) -> bool {
        let g = s.group();
        let elems = s.indices();
        let total = 3usize.pow(elems.len() as u32);
        (1..total).all(|mut code| {
            let mut z = 0;
            for &l in &elems {
                match code % 3 {
                    1 => z = g.add_index(z, l),
                    2 => z = g.sub_index(z, l),
                    _ => {}
                }
                code /= 3;
            }
            z != 0
        })
    }

    #[test]
    fn dissociativity_examples() {
        let k4 = GroupSpec::f2(2).unwrap();
        // (1,0) and (0,1) have indices 2 and 1
        assert!(is_dissociated(&set(&k4, &[2, 1])).unwrap());
        let z8 = GroupSpec::cyclic(8).unwrap();
        assert!(!is_dissociated(&set(&z8, &[1, 2, 3])).unwrap());
        assert!(is_dissociated(&set(&z8, &[1, 2])).unwrap());
        assert!(!is_dissociated(&set(&z8, &[0])).unwrap());
        assert!(is_dissociated(&GroupSubset::empty(&z8)).unwrap());
        // 4 = -4 in Z_8: the relation 4 + 4 = 0 needs a coefficient 2, so {4}
        // alone is dissociated
        assert!(is_dissociated(&set(&z8, &[4])).unwrap());
    }

    #[test]
    fn enumeration_matches_oracle_and_mitm() {
        let g = GroupSpec::parse("3,7").unwrap();
        let z97 = GroupSpec::cyclic(97).unwrap();
        for (grp, sizes) in [(&g, 1..=8usize), (&z97, 1..=9usize)] {
            for size in sizes {
                for start in 0..grp.order() {
                    let idx: Vec<usize> = (0..size).map(|k| (start + k * k * 5 + k) % grp.order()).collect();
                    let s = set(grp, &idx);
                    assert_eq!(is_dissociated_by_enumeration(&s).unwrap(), dissociated_oracle(&s), "{s:?}");
                }
            }
        }
        // meet-in-the-middle path: powers of two in Z_{2^16 + 1} are dissociated
        let big = GroupSpec::cyclic(65_537).unwrap();
        let pow2 = set(&big, &(0..14).map(|k| 1usize << k).collect::<Vec<_>>());
        assert!(is_dissociated_by_enumeration(&pow2).unwrap());
        let mut with_rel = pow2.clone();
        with_rel.insert(3 + 1024);
        assert!(!is_dissociated_by_enumeration(&with_rel).unwrap());
        let over = set(&big, &(1..=25).collect::<Vec<_>>());
        assert!(matches!(is_dissociated(&over), Err(Error::GuardExceeded { .. })));
    }

    #[test]
    fn span_examples() {
        let z5 = GroupSpec::cyclic(5).unwrap();
        assert_eq!(span(&set(&z5, &[1])).unwrap().indices(), vec![0, 1, 4]);
        let z7 = GroupSpec::cyclic(7).unwrap();
        assert_eq!(span(&set(&z7, &[1, 2])).unwrap().len(), 7);
        assert_eq!(span(&GroupSubset::empty(&z7)).unwrap().indices(), vec![0]);
        let f3 = GroupSpec::f2(3).unwrap();
        assert_eq!(span(&set(&f3, &[1, 2])).unwrap().indices(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn dimension_examples() {
        let f3 = GroupSpec::f2(3).unwrap();
        let r = additive_dimension(&GroupSubset::full(&f3), DimensionMode::Exact).unwrap();
        assert_eq!(r.value, 3);
        assert!(r.exact);
        let z8 = GroupSpec::cyclic(8).unwrap();
        let r = additive_dimension(&set(&z8, &[0]), DimensionMode::Exact).unwrap();
        assert_eq!(r.value, 0);
        let r = additive_dimension(&set(&z8, &[1, 2, 3]), DimensionMode::Exact).unwrap();
        assert_eq!(r.value, 2);
        assert!(is_dissociated(&r.witness).unwrap());
        let r = additive_dimension(&GroupSubset::empty(&z8), DimensionMode::Greedy).unwrap();
        assert_eq!(r.value, 0);
        assert!(!r.exact);
        let big = GroupSpec::cyclic(101).unwrap();
        let a = set(&big, &(1..=21).collect::<Vec<_>>());
        assert!(matches!(
            additive_dimension(&a, DimensionMode::Exact),
            Err(Error::GuardExceeded { .. })
        ));
        assert!(additive_dimension(&a, DimensionMode::Greedy).is_ok());
    }

    #[test]
    fn greedy_is_maximal_and_below_exact() {
        let g = GroupSpec::parse("3,5").unwrap();
        for mask in (1u32..1 << 15).step_by(37) {
            let a = set(&g, &(0..15).filter(|i| mask & (1 << i) != 0).collect::<Vec<_>>());
            let greedy = additive_dimension(&a, DimensionMode::Greedy).unwrap();
            let exact = additive_dimension(&a, DimensionMode::Exact).unwrap();
            assert!(greedy.value <= exact.value);
            for w in [&greedy.witness, &exact.witness] {
                assert!(w.is_subset(&a));
                assert!(is_dissociated(w).unwrap());
                assert!(a.is_subset(&span(w).unwrap()));
            }
        }
    }

    #[test]
    fn low_dim_count_examples() {
        let f3 = GroupSpec::f2(3).unwrap();
        let c = count_low_dim_sets(&f3, 5, 1).unwrap();
        assert_eq!(c.exact, Some(15));
        assert!(c.within_bound);
        assert!((c.bound.ln_bound - 10.0).abs() < 1e-12);
        assert!(c.bound.precondition_ok);
        for moduli in [vec![6u32], vec![2, 2, 2, 2], vec![3, 3]] {
            let g = GroupSpec::new(moduli).unwrap();
            assert_eq!(count_low_dim_sets(&g, 4, 0).unwrap().exact, Some(1));
        }
        let big = GroupSpec::cyclic(64).unwrap();
        assert_eq!(count_low_dim_sets(&big, 10, 1).unwrap().exact, None);
    }

    /// Counting oracle: every subset of Z_2^3 / Z_6 by bitmask.
    #[test]
    fn low_dim_count_matches_bruteforce() {
        for moduli in [vec![2u32, 2, 2], vec![6], vec![7]] {
            let g = GroupSpec::new(moduli).unwrap();
            let n_el = g.order();
            for n in 1..=n_el as u64 {
                for d in 0..=3u64 {
                    let mut expected = 0u64;
                    for mask in 1u32..(1 << n_el) {
                        if mask.count_ones() as u64 > n {
                            continue;
                        }
                        let s = set(&g, &(0..n_el).filter(|i| mask & (1 << i) != 0).collect::<Vec<_>>());
                        if (max_dissociated_search(&s).unwrap().value as u64) <= d {
                            expected += 1;
                        }
                    }
                    assert_eq!(count_low_dim_sets(&g, n, d).unwrap().exact, Some(expected));
                }
            }
        }
    }

    #[test]
    fn span_size_bounded_by_power_of_three() {
        let g = GroupSpec::cyclic(250).unwrap();
        for start in 1..40usize {
            let s = set(&g, &[start, (3 * start + 1) % 250, (7 * start + 2) % 250, (11 * start + 5) % 250]);
            let sp = span(&s).unwrap();
            assert!(sp.len() <= 3usize.pow(s.len() as u32));
            let distinct = {
                let mut sums = signed_sums(&g, &s.indices());
                sums.sort_unstable();
                sums.dedup();
                sums.len()
            };
            assert_eq!(sp.len(), distinct);
        }
    }
}
