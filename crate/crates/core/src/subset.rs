//! Dense subsets of a group, sumsets, representation functions and additive
//! energy.

use std::cmp::Ordering;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::GroupSpec;

/// A subset of a finite abelian group stored as a bitset over `[0, N)`.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupSubset {
    group: GroupSpec,
    bits: FixedBitSet,
    len: usize,
}

impl GroupSubset {
    pub fn empty(group: &GroupSpec) -> Self {
        GroupSubset {
            group: group.clone(),
            bits: FixedBitSet::with_capacity(group.order()),
            len: 0,
        }
    }

    pub fn full(group: &GroupSpec) -> Self {
        let mut bits = FixedBitSet::with_capacity(group.order());
        bits.insert_range(..);
        GroupSubset {
            group: group.clone(),
            bits,
            len: group.order(),
        }
    }

    pub fn singleton(group: &GroupSpec, index: usize) -> Result<Self> {
        Self::from_indices(group, [index])
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(group: &GroupSpec, indices: I) -> Result<Self> {
        let mut s = Self::empty(group);
        for i in indices {
            group.check_index(i)?;
            s.insert(i);
        }
        Ok(s)
    }

    pub(crate) fn from_bits(group: &GroupSpec, bits: FixedBitSet) -> Self {
        debug_assert_eq!(bits.len(), group.order());
        let len = bits.count_ones(..);
        GroupSubset {
            group: group.clone(),
            bits,
            len,
        }
    }

    /// Parses `"[0,1,5]"` (an index list) or `"0x2f"` (a bitmask where bit
    /// `i` selects index `i`).
    pub fn parse(group: &GroupSpec, literal: &str) -> Result<Self> {
        let lit = literal.trim();
        if let Some(hex) = lit.strip_prefix("0x").or_else(|| lit.strip_prefix("0X")) {
            let mut s = Self::empty(group);
            for (pos, c) in hex.chars().rev().enumerate() {
                let nibble = c
                    .to_digit(16)
                    .ok_or_else(|| Error::Parse(format!("bad hex digit {c:?} in {literal:?}")))?;
                for b in 0..4 {
                    if nibble & (1 << b) != 0 {
                        let i = pos * 4 + b;
                        group.check_index(i)?;
                        s.insert(i);
                    }
                }
            }
            return Ok(s);
        }
        let inner = lit
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("subset literal must be [..] or 0x..: {literal:?}")))?;
        let mut indices = Vec::new();
        for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            indices.push(
                part.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad index {part:?} in {literal:?}")))?,
            );
        }
        Self::from_indices(group, indices)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, index: usize) -> bool {
        self.bits.contains(index)
    }

    /// Inserts an index; returns true if it was absent. Panics if out of range.
    pub fn insert(&mut self, index: usize) -> bool {
        assert!(index < self.group.order(), "index {index} out of range");
        let fresh = !self.bits.put(index);
        if fresh {
            self.len += 1;
        }
        fresh
    }

    pub fn remove(&mut self, index: usize) -> bool {
        let present = index < self.bits.len() && self.bits.contains(index);
        if present {
            self.bits.set(index, false);
            self.len -= 1;
        }
        present
    }

    /// Indices in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    fn same_group(&self, other: &GroupSubset) -> Result<()> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        Ok(())
    }

    pub fn union(&self, other: &GroupSubset) -> Result<GroupSubset> {
        self.same_group(other)?;
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        Ok(Self::from_bits(&self.group, bits))
    }

    pub fn intersection(&self, other: &GroupSubset) -> Result<GroupSubset> {
        self.same_group(other)?;
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        Ok(Self::from_bits(&self.group, bits))
    }

    pub fn difference(&self, other: &GroupSubset) -> Result<GroupSubset> {
        self.same_group(other)?;
        let mut bits = self.bits.clone();
        bits.difference_with(&other.bits);
        Ok(Self::from_bits(&self.group, bits))
    }

    pub fn intersection_len(&self, other: &GroupSubset) -> Result<usize> {
        self.same_group(other)?;
        Ok(self.bits.intersection_count(&other.bits))
    }

    pub fn is_subset(&self, other: &GroupSubset) -> bool {
        self.group == other.group && self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &GroupSubset) -> bool {
        self.group == other.group && self.bits.is_disjoint(&other.bits)
    }

    /// The translate `self + y`.
    pub fn translate(&self, y: usize) -> GroupSubset {
        let mut out = Self::empty(&self.group);
        for x in self.iter() {
            out.insert(self.group.add_index(x, y));
        }
        out
    }

    /// Number of `x` in `self` with `x + y` in `target`.
    pub fn translate_overlap(&self, y: usize, target: &GroupSubset) -> usize {
        self.iter()
            .filter(|&x| target.contains(self.group.add_index(x, y)))
            .count()
    }

    /// Order on subsets: lexicographic comparison of the increasing index
    /// lists. Used for deterministic tie-breaking.
    pub fn lex_cmp(&self, other: &GroupSubset) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl fmt::Debug for GroupSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupSubset[{}]{:?}", self.group, self.indices())
    }
}

impl Serialize for GroupSubset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len))?;
        for i in self.iter() {
            seq.serialize_element(&i)?;
        }
        seq.end()
    }
}

/// Additive energy `E(X, Y)`: the number of quadruples
/// `(x1, x2, y1, y2)` in `X x X x Y x Y` with `x1 + y1 = x2 + y2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Energy(pub u64);

impl Energy {
    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Energy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `f(z) = #{(x, y) in X x Y : x + y = z}` for every `z` in the group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepFunction {
    pub values: Vec<u32>,
    pub x_size: usize,
    pub y_size: usize,
}

impl RepFunction {
    /// `sum_z f(z)^2`, with overflow reported instead of wrapped.
    pub fn energy(&self) -> Result<Energy> {
        let mut total: u64 = 0;
        for &v in &self.values {
            let sq = (v as u64)
                .checked_mul(v as u64)
                .ok_or(Error::Overflow("additive energy"))?;
            total = total
                .checked_add(sq)
                .ok_or(Error::Overflow("additive energy"))?;
        }
        Ok(Energy(total))
    }

    /// The support of `f`, i.e. the sumset.
    pub fn support(&self, group: &GroupSpec) -> GroupSubset {
        let mut bits = FixedBitSet::with_capacity(group.order());
        for (z, &v) in self.values.iter().enumerate() {
            if v > 0 {
                bits.insert(z);
            }
        }
        GroupSubset::from_bits(group, bits)
    }
}

pub fn sumset(x: &GroupSubset, y: &GroupSubset) -> Result<GroupSubset> {
    x.same_group(y)?;
    let g = x.group();
    let mut bits = FixedBitSet::with_capacity(g.order());
    let xs = x.indices();
    for b in y.iter() {
        for &a in &xs {
            bits.insert(g.add_index(a, b));
        }
    }
    Ok(GroupSubset::from_bits(g, bits))
}

pub fn rep_function(x: &GroupSubset, y: &GroupSubset) -> Result<RepFunction> {
    x.same_group(y)?;
    let g = x.group();
    let mut values = vec![0u32; g.order()];
    let (outer, inner) = if x.len() <= y.len() { (x, y) } else { (y, x) };
    let inner: Vec<usize> = inner.indices();
    for a in outer.iter() {
        for &b in &inner {
            values[g.add_index(a, b)] += 1;
        }
    }
    Ok(RepFunction {
        values,
        x_size: x.len(),
        y_size: y.len(),
    })
}

/// `E(X, Y) = sum_z f(z)^2` computed through the representation function.
pub fn additive_energy(x: &GroupSubset, y: &GroupSubset) -> Result<Energy> {
    rep_function(x, y)?.energy()
}

/// `sqrt(whole) <= sqrt(a) + sqrt(b)`, decided in integers: with
/// `d = whole - a - b` it holds iff `d <= 0` or `d^2 <= 4ab`.
pub fn sqrt_subadditive(whole: Energy, a: Energy, b: Energy) -> bool {
    let d = whole.0 as i128 - a.0 as i128 - b.0 as i128;
    d <= 0 || (d as u128).pow(2) <= 4 * a.0 as u128 * b.0 as u128
}

/// Largest `|X|^2 |Y|^2` the quartic oracle will enumerate.
pub const ORACLE_GUARD: u128 = 100_000_000;

/// Additive energy by literal enumeration of `X x X x Y x Y`. Test oracle.
pub fn additive_energy_oracle(x: &GroupSubset, y: &GroupSubset) -> Result<Energy> {
    x.same_group(y)?;
    let work = (x.len() as u128).pow(2) * (y.len() as u128).pow(2);
    if work > ORACLE_GUARD {
        return Err(Error::GuardExceeded {
            what: "energy oracle |X|^2|Y|^2",
            size: work,
            limit: ORACLE_GUARD,
        });
    }
    let g = x.group();
    let xs = x.indices();
    let ys = y.indices();
    let mut count = 0u64;
    for &a1 in &xs {
        for &a2 in &xs {
            for &b1 in &ys {
                let lhs = g.add_index(a1, b1);
                for &b2 in &ys {
                    if lhs == g.add_index(a2, b2) {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(Energy(count))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(g: &GroupSpec, idx: &[usize]) -> GroupSubset {
        GroupSubset::from_indices(g, idx.iter().copied()).unwrap()
    }

    #[test]
    fn sqrt_subadditive_edges() {
        // sqrt 9 = sqrt 4 + sqrt 1
        assert!(sqrt_subadditive(Energy(9), Energy(4), Energy(1)));
        assert!(!sqrt_subadditive(Energy(10), Energy(4), Energy(1)));
        assert!(sqrt_subadditive(Energy(0), Energy(4), Energy(1)));
        assert!(!sqrt_subadditive(Energy(1), Energy(0), Energy(0)));
    }

    #[test]
    fn sumset_examples() {
        let z4 = GroupSpec::cyclic(4).unwrap();
        assert_eq!(sumset(&set(&z4, &[0, 1]), &set(&z4, &[0, 1])).unwrap().indices(), vec![0, 1, 2]);
        let g = GroupSpec::parse("3,4").unwrap();
        let x = set(&g, &[1, 5, 11]);
        assert_eq!(sumset(&x, &set(&g, &[0])).unwrap(), x);
        // 1+3=4, 1+6=7, 2+3=5, 2+6=0 in Z_8
        let z8 = GroupSpec::cyclic(8).unwrap();
        assert_eq!(sumset(&set(&z8, &[1, 2]), &set(&z8, &[3, 6])).unwrap().indices(), vec![0, 4, 5, 7]);
        assert!(sumset(&set(&z8, &[]), &set(&z8, &[3])).unwrap().is_empty());
    }

    #[test]
    fn rep_function_examples() {
        let z4 = GroupSpec::cyclic(4).unwrap();
        let x = set(&z4, &[0, 1]);
        assert_eq!(rep_function(&x, &x).unwrap().values, vec![1, 2, 1, 0]);
        let g = GroupSpec::parse("2,3").unwrap();
        let f = rep_function(&GroupSubset::full(&g), &set(&g, &[4])).unwrap();
        assert!(f.values.iter().all(|&v| v == 1));
        let f = rep_function(&GroupSubset::empty(&g), &set(&g, &[4])).unwrap();
        assert!(f.values.iter().all(|&v| v == 0));
    }

    #[test]
    fn energy_examples() {
        let z2 = GroupSpec::cyclic(2).unwrap();
        let zero = set(&z2, &[0]);
        assert_eq!(additive_energy(&zero, &zero).unwrap(), Energy(1));
        let both = GroupSubset::full(&z2);
        assert_eq!(additive_energy_oracle(&both, &both).unwrap(), Energy(8));
        assert_eq!(additive_energy(&both, &both).unwrap(), Energy(8));
        let z4 = GroupSpec::cyclic(4).unwrap();
        let x = set(&z4, &[0, 1]);
        assert_eq!(additive_energy_oracle(&x, &x).unwrap(), Energy(6));
        assert_eq!(additive_energy(&x, &x).unwrap(), Energy(6));
        let g = GroupSpec::parse("2,5").unwrap();
        let y = set(&g, &[1, 3, 8]);
        assert_eq!(additive_energy(&GroupSubset::full(&g), &y).unwrap(), Energy(10 * 9));
        assert_eq!(additive_energy_oracle(&GroupSubset::empty(&g), &y).unwrap(), Energy(0));
    }

    #[test]
    fn oracle_guard() {
        let g = GroupSpec::cyclic(200).unwrap();
        let big = GroupSubset::full(&g);
        assert!(matches!(
            additive_energy_oracle(&big, &big),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn mismatched_groups() {
        let a = GroupSubset::full(&GroupSpec::cyclic(4).unwrap());
        let b = GroupSubset::full(&GroupSpec::parse("2,2").unwrap());
        assert_eq!(sumset(&a, &b), Err(Error::GroupMismatch));
        assert_eq!(additive_energy(&a, &b), Err(Error::GroupMismatch));
    }

    #[test]
    fn literals() {
        let g = GroupSpec::cyclic(16).unwrap();
        assert_eq!(GroupSubset::parse(&g, "[0, 1,5]").unwrap().indices(), vec![0, 1, 5]);
        assert_eq!(GroupSubset::parse(&g, "0x2f").unwrap().indices(), vec![0, 1, 2, 3, 5]);
        assert_eq!(GroupSubset::parse(&g, "[]").unwrap().len(), 0);
        assert!(GroupSubset::parse(&g, "[16]").is_err());
        assert!(GroupSubset::parse(&g, "0x10000").is_err());
        assert!(GroupSubset::parse(&g, "1,2").is_err());
        let s = GroupSubset::parse(&g, "[3,1]").unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), "[1,3]");
    }

    #[test]
    fn set_algebra_keeps_cardinality() {
        let g = GroupSpec::cyclic(70).unwrap();
        let a = set(&g, &[1, 2, 3, 64, 69]);
        let b = set(&g, &[3, 4, 64]);
        assert_eq!(a.union(&b).unwrap().len(), 6);
        assert_eq!(a.intersection(&b).unwrap().len(), 2);
        assert_eq!(a.difference(&b).unwrap().len(), 3);
        assert_eq!(a.intersection_len(&b).unwrap(), 2);
        let mut c = a.clone();
        assert!(c.remove(69));
        assert!(!c.remove(69));
        assert_eq!(c.len(), 4);
        assert_eq!(a.translate(1).indices(), vec![0, 2, 3, 4, 65]);
        assert_eq!(set(&g, &[1, 5]).lex_cmp(&set(&g, &[1, 6])), Ordering::Less);
        assert_eq!(set(&g, &[1]).lex_cmp(&set(&g, &[1, 6])), Ordering::Less);
    }
}
