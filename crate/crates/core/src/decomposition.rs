//! Low-dimensional subsets carrying a fixed share of the energy, and the
//! iterative partition `B = B' ⊔ B''` built from them.

use std::cmp::Ordering;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::dissociation::best_dimension;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::subset::{additive_energy, Energy, GroupSubset};

/// Largest `|B|` the exhaustive finder will enumerate.
pub const EXHAUSTIVE_GUARD: usize = 12;
/// Default constant in the dimension target `dim(B*) <= c1 K ln|A|`.
pub const DEFAULT_C1: f64 = 16.0;
/// The structured subset must keep at least `1/ENERGY_SHARE` of the energy.
pub const ENERGY_SHARE: u64 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FinderMode {
    Exhaustive,
    Greedy,
}

impl FromStr for FinderMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(FinderMode::Exhaustive),
            "greedy" => Ok(FinderMode::Greedy),
            other => Err(Error::Parse(format!("unknown finder mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuredSubset {
    pub subset: GroupSubset,
    pub energy: Energy,
    /// `E(A, B)` for the whole input.
    pub input_energy: Energy,
    pub dim: usize,
    pub dim_exact: bool,
    /// `c1 K ln|A|`
    pub dim_target: f64,
    pub dim_target_met: bool,
}

fn exceeds_ratio(energy: Energy, a_len: usize, b_len: usize, k: &Rational) -> bool {
    // E >= |A||B|^2 / K, kept exact
    let lhs = Rational::from_integer(energy.get() as i128) * *k;
    lhs >= Rational::from_integer(a_len as i128 * (b_len as i128).pow(2))
}

fn holds_share(part: Energy, whole: Energy) -> bool {
    part.get() as u128 * ENERGY_SHARE as u128 >= whole.get() as u128
}

/// Finds a nonempty `B* ⊆ B` with `32 E(A, B*) >= E(A, B)` and reports its
/// dimension against `c1 K ln|A|`.
///
/// Exhaustive mode returns a qualifying subset of least exact dimension,
/// then least size, then first in index order. Greedy mode grows `B*` one
/// element at a time, always taking the element that raises `E(A, B*)` most.
pub fn structured_subset_find(
    a: &GroupSubset,
    b: &GroupSubset,
    k: Rational,
    mode: FinderMode,
    c1: f64,
) -> Result<StructuredSubset> {
    if a.group() != b.group() {
        return Err(Error::GroupMismatch);
    }
    if b.is_empty() {
        return Err(Error::EmptySet("B"));
    }
    if a.len() < b.len() {
        return Err(Error::InvalidParameter(format!(
            "need |A| >= |B|, got |A| = {} and |B| = {}",
            a.len(),
            b.len()
        )));
    }
    if k <= Rational::from_integer(0) {
        return Err(Error::InvalidParameter(format!("K must be positive, got {k}")));
    }
    if !(c1 > 0.0 && c1.is_finite()) {
        return Err(Error::InvalidParameter(format!("c1 must be positive, got {c1}")));
    }
    let total = additive_energy(a, b)?;
    if !exceeds_ratio(total, a.len(), b.len(), &k) {
        return Err(Error::InvalidParameter(format!(
            "E(A, B) = {total} is below |A||B|^2 / K for K = {k}"
        )));
    }
    let subset = match mode {
        FinderMode::Exhaustive => exhaustive(a, b, total)?,
        FinderMode::Greedy => greedy(a, b, total),
    };
    let energy = additive_energy(a, &subset)?;
    if !holds_share(energy, total) {
        return Err(Error::InvariantViolation(format!(
            "structured subset keeps E = {energy} of {total}"
        )));
    }
    let dim = best_dimension(&subset)?;
    let dim_target = c1 * rational::to_f64(&k) * (a.len() as f64).ln();
    Ok(StructuredSubset {
        dim_target_met: dim.value as f64 <= dim_target,
        dim: dim.value,
        dim_exact: dim.exact,
        subset,
        energy,
        input_energy: total,
        dim_target,
    })
}

fn exhaustive(a: &GroupSubset, b: &GroupSubset, total: Energy) -> Result<GroupSubset> {
    if b.len() > EXHAUSTIVE_GUARD {
        return Err(Error::GuardExceeded {
            what: "exhaustive finder |B|",
            size: b.len() as u128,
            limit: EXHAUSTIVE_GUARD as u128,
        });
    }
    let g = a.group();
    let elems = b.indices();
    let mut best: Option<(usize, GroupSubset)> = None;
    for mask in 1u32..(1 << elems.len()) {
        let cand = GroupSubset::from_indices(
            g,
            (0..elems.len()).filter(|i| mask >> i & 1 == 1).map(|i| elems[i]),
        )?;
        if !holds_share(additive_energy(a, &cand)?, total) {
            continue;
        }
        let dim = best_dimension(&cand)?.value;
        let better = match &best {
            None => true,
            Some((d, s)) => (dim, cand.len())
                .cmp(&(*d, s.len()))
                .then_with(|| cand.lex_cmp(s))
                == Ordering::Less,
        };
        if better {
            best = Some((dim, cand));
        }
    }
    // the whole of B always qualifies
    Ok(best.expect("B itself meets the energy share").1)
}

fn greedy(a: &GroupSubset, b: &GroupSubset, total: Energy) -> GroupSubset {
    let g = a.group();
    let a_elems = a.indices();
    // f(z) = #{(a, s) : a + s = z} for the current S
    let mut f = vec![0u64; g.order()];
    let mut chosen = GroupSubset::empty(g);
    let mut energy: u64 = 0;
    while !holds_share(Energy(energy), total) {
        // E(S + y) = E(S) + 2 sum_a f(a + y) + |A|
        let (y, gain) = b
            .iter()
            .filter(|&y| !chosen.contains(y))
            .map(|y| (y, a_elems.iter().map(|&x| f[g.add_index(x, y)]).sum::<u64>()))
            .fold(None, |acc: Option<(usize, u64)>, (y, s)| match acc {
                Some((_, best)) if best >= s => acc,
                _ => Some((y, s)),
            })
            .expect("B is exhausted only after the share is met");
        energy += 2 * gain + a_elems.len() as u64;
        chosen.insert(y);
        for &x in &a_elems {
            f[g.add_index(x, y)] += 1;
        }
    }
    chosen
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionStep {
    pub piece: GroupSubset,
    /// `E(A, B'')` before and after the piece is removed.
    pub energy_before: Energy,
    pub energy_after: Energy,
    pub piece_energy: Energy,
    pub dim: usize,
    pub dim_exact: bool,
    pub dim_target_met: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Halt {
    /// `M < K`: the energy is already small, nothing to do.
    RatioBelowTarget,
    /// `E(A, B'') < |A||B''|^2 / M`.
    EnergyBelowTarget,
    /// `B''` ran empty.
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionCheck {
    pub b_prime_dim: usize,
    pub piece_dim_sum: usize,
    /// All dimensions involved are exact, so `holds` is a theorem.
    pub exact: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionResult {
    pub b_prime: GroupSubset,
    pub b_doubleprime: GroupSubset,
    pub steps: Vec<PartitionStep>,
    /// `K = |A||B|^2 / E(A, B)`
    #[serde(serialize_with = "rational::serialize")]
    pub k_ratio: Rational,
    #[serde(serialize_with = "rational::serialize")]
    pub m: Rational,
    pub step_count: usize,
    /// `ceil(log_{32/31}(|B| M / K)) + 1`
    pub step_bound: usize,
    pub halt: Halt,
    pub input_energy: Energy,
    pub b_prime_energy: Energy,
    pub b_doubleprime_energy: Energy,
    pub dimension_check: DimensionCheck,
}

impl DecompositionResult {
    /// Re-verifies every guarantee of the partition against the inputs and
    /// returns a description of each one that fails.
    pub fn check(&self, a: &GroupSubset, b: &GroupSubset) -> Result<Vec<String>> {
        let mut bad = Vec::new();
        if !self.b_prime.is_disjoint(&self.b_doubleprime)
            || self.b_prime.union(&self.b_doubleprime)? != *b
        {
            bad.push("B' and B'' do not partition B".to_string());
        }
        let mut pieces = GroupSubset::empty(b.group());
        for s in &self.steps {
            if !pieces.is_disjoint(&s.piece) {
                bad.push("pieces overlap".to_string());
            }
            pieces = pieces.union(&s.piece)?;
            if 32 * s.energy_after.get() as u128 > 31 * s.energy_before.get() as u128 {
                bad.push(format!(
                    "step energy fell only from {} to {}",
                    s.energy_before, s.energy_after
                ));
            }
        }
        if pieces != self.b_prime {
            bad.push("B' is not the union of the pieces".to_string());
        }
        let e2 = additive_energy(a, &self.b_doubleprime)?;
        let below = !exceeds_ratio(e2, a.len(), self.b_doubleprime.len(), &self.m);
        if self.halt != Halt::RatioBelowTarget && !(self.b_doubleprime.is_empty() || below) {
            bad.push("halting condition does not hold".to_string());
        }
        if self.step_count != self.steps.len() || self.step_count > self.step_bound {
            bad.push(format!(
                "{} steps against a bound of {}",
                self.step_count, self.step_bound
            ));
        }
        let e = additive_energy(a, b)?;
        if self.step_count >= 1 && !holds_share(additive_energy(a, &self.b_prime)?, e) {
            bad.push("E(A, B') < E(A, B) / 32".to_string());
        }
        if self.dimension_check.exact && !self.dimension_check.holds {
            bad.push("dim(B') exceeds the sum of piece dimensions".to_string());
        }
        Ok(bad)
    }
}

fn step_bound(b_len: usize, m: &Rational, k: &Rational) -> usize {
    let x = b_len as f64 * (m / k).to_f64().unwrap_or(f64::INFINITY);
    ((x.ln() / (32.0f64 / 31.0).ln()).ceil().max(0.0)) as usize + 1
}

/// Repeatedly removes a structured subset from `B''` (starting at `B`) while
/// `E(A, B'') >= |A||B''|^2 / M`, collecting the pieces into `B'`.
pub fn energy_partition(
    a: &GroupSubset,
    b: &GroupSubset,
    m: Rational,
    mode: FinderMode,
    c1: f64,
) -> Result<DecompositionResult> {
    if a.group() != b.group() {
        return Err(Error::GroupMismatch);
    }
    if b.len() < 2 {
        return Err(Error::InvalidParameter(format!("need |B| >= 2, got {}", b.len())));
    }
    if a.len() < b.len() {
        return Err(Error::InvalidParameter(format!(
            "need |A| >= |B|, got |A| = {} and |B| = {}",
            a.len(),
            b.len()
        )));
    }
    if m <= Rational::from_integer(0) {
        return Err(Error::InvalidParameter(format!("M must be positive, got {m}")));
    }
    let g = b.group();
    let input_energy = additive_energy(a, b)?;
    let k_ratio = Rational::new(
        a.len() as i128 * (b.len() as i128).pow(2),
        input_energy.get() as i128,
    );
    let mut b_prime = GroupSubset::empty(g);
    let mut rest = b.clone();
    let mut steps = Vec::new();
    let mut rest_energy = input_energy;
    let halt = if m < k_ratio {
        Halt::RatioBelowTarget
    } else {
        loop {
            if rest.is_empty() {
                break Halt::Exhausted;
            }
            if !exceeds_ratio(rest_energy, a.len(), rest.len(), &m) {
                break Halt::EnergyBelowTarget;
            }
            let found = structured_subset_find(a, &rest, m, mode, c1)?;
            rest = rest.difference(&found.subset)?;
            b_prime = b_prime.union(&found.subset)?;
            let after = additive_energy(a, &rest)?;
            if 32 * after.get() as u128 > 31 * rest_energy.get() as u128 {
                return Err(Error::InvariantViolation(format!(
                    "energy fell only from {rest_energy} to {after}"
                )));
            }
            steps.push(PartitionStep {
                piece: found.subset,
                energy_before: rest_energy,
                energy_after: after,
                piece_energy: found.energy,
                dim: found.dim,
                dim_exact: found.dim_exact,
                dim_target_met: found.dim_target_met,
            });
            rest_energy = after;
        }
    };
    let b_prime_dim = best_dimension(&b_prime)?;
    let piece_dim_sum = steps.iter().map(|s| s.dim).sum();
    let exact = b_prime_dim.exact && steps.iter().all(|s| s.dim_exact);
    let dimension_check = DimensionCheck {
        b_prime_dim: b_prime_dim.value,
        piece_dim_sum,
        exact,
        holds: b_prime_dim.value <= piece_dim_sum,
    };
    if exact && !dimension_check.holds {
        return Err(Error::InvariantViolation(format!(
            "dim(B') = {} exceeds the piece sum {piece_dim_sum}",
            b_prime_dim.value
        )));
    }
    Ok(DecompositionResult {
        b_prime_energy: additive_energy(a, &b_prime)?,
        b_doubleprime_energy: rest_energy,
        b_prime,
        b_doubleprime: rest,
        step_count: steps.len(),
        steps,
        step_bound: step_bound(b.len(), &m, &k_ratio),
        k_ratio,
        m,
        halt,
        input_energy,
        dimension_check,
    })
}
