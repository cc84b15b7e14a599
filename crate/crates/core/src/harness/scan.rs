use num_traits::Signed;
use serde::Serialize;

use super::ExperimentConfig;
use crate::deviation::{random_subset, sigma};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::subset::GroupSubset;

/// Largest group order the worst-case scan enumerates.
pub const WORST_CASE_MAX_ORDER: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstCaseResult {
    pub a: GroupSubset,
    pub floor: usize,
    #[serde(serialize_with = "rational::serialize")]
    pub max_abs_sigma: Rational,
    pub witness_x: GroupSubset,
    pub witness_y: GroupSubset,
    #[serde(serialize_with = "rational::serialize")]
    pub witness_sigma: Rational,
    /// `sigma` recomputed from scratch at the witness agrees.
    pub witness_recomputed: bool,
    /// Number of `(X, |Y|)` combinations examined.
    pub candidates: u64,
}

/// `max |sigma_A(X, Y)|` over all `X, Y` with `|X|, |Y| >= floor`.
///
/// For a fixed `X` and `|Y| = t` the extremes of `sum_{y in Y} c(y)`, with
/// `c(y) = #{x in X : x + y in A}`, come from the `t` largest or smallest
/// counts, so only `X` and `t` are enumerated. Ties keep the first pair in
/// order of `X` bitmask, then `t`.
pub fn worst_case_scan(config: &ExperimentConfig) -> Result<WorstCaseResult> {
    let g = &config.group;
    let n = g.order();
    if n > WORST_CASE_MAX_ORDER {
        return Err(Error::GuardExceeded {
            what: "worst-case scan group order",
            size: n as u128,
            limit: WORST_CASE_MAX_ORDER as u128,
        });
    }
    let floor = config.sizes.first().copied().unwrap_or(1).max(1);
    if floor > n {
        return Err(Error::InvalidParameter(format!("size floor {floor} exceeds N = {n}")));
    }
    let a = match &config.a {
        Some(a) => a.clone(),
        None => random_subset(g, config.seed).a,
    };
    let in_a: Vec<bool> = (0..n).map(|z| a.contains(z)).collect();
    let mut best: Option<(Rational, u32, Vec<usize>)> = None;
    let mut candidates = 0u64;
    for mask in 1u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size < floor {
            continue;
        }
        let xs: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let mut order: Vec<(usize, usize)> = (0..n)
            .map(|y| (xs.iter().filter(|&&x| in_a[g.add_index(x, y)]).count(), y))
            .collect();
        // descending count, then ascending index
        order.sort_by(|p, q| q.0.cmp(&p.0).then(p.1.cmp(&q.1)));
        let mut top = 0usize;
        let mut bottom = 0usize;
        let mut prefix_top = Vec::with_capacity(n);
        let mut prefix_bottom = Vec::with_capacity(n);
        for t in 0..n {
            top += order[t].0;
            bottom += order[n - 1 - t].0;
            prefix_top.push(top);
            prefix_bottom.push(bottom);
        }
        for t in floor..=n {
            candidates += 1;
            let denom = (size * t) as i128;
            let hi = Rational::new(prefix_top[t - 1] as i128, denom) - Rational::new(1, 2);
            let lo = Rational::new(prefix_bottom[t - 1] as i128, denom) - Rational::new(1, 2);
            let (value, ys) = if hi.abs() >= lo.abs() {
                (hi.abs(), order[..t].iter().map(|p| p.1).collect::<Vec<_>>())
            } else {
                (lo.abs(), order[n - t..].iter().map(|p| p.1).collect())
            };
            if best.as_ref().is_none_or(|(b, _, _)| value > *b) {
                best = Some((value, mask, ys));
            }
        }
    }
    let (max_abs_sigma, mask, ys) = best.expect("the full group meets any floor up to N");
    let witness_x = GroupSubset::from_indices(g, (0..n).filter(|i| mask >> i & 1 == 1))?;
    let witness_y = GroupSubset::from_indices(g, ys)?;
    let witness_sigma = sigma(&a, &witness_x, &witness_y)?.sigma;
    Ok(WorstCaseResult {
        a,
        floor,
        witness_recomputed: witness_sigma.abs() == max_abs_sigma,
        max_abs_sigma,
        witness_x,
        witness_y,
        witness_sigma,
        candidates,
    })
}
