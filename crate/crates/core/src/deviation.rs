//! Random sets `A`, edge-density deviations `sigma_A(X, Y)` and the
//! packing constructions that turn one large deviation into many
//! low-overlap rows.

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_traits::Signed;
use rand::seq::index;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};
use crate::rational::{self, require_epsilon, Rational};
use crate::subset::{additive_energy, rep_function, Energy, GroupSubset};

/// A random subset of the group, each element kept with probability 1/2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CayleySample {
    pub a: GroupSubset,
    pub seed: u64,
}

/// Draws `A` from a ChaCha8 stream seeded with `seed`: element `i` is bit
/// `i % 64` of the `(i / 64)`-th `u64` drawn.
pub fn random_subset(g: &GroupSpec, seed: u64) -> CayleySample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.order();
    let mut bits = FixedBitSet::with_capacity(n);
    let mut base = 0;
    while base < n {
        let word = rng.next_u64();
        let take = (n - base).min(64);
        for i in 0..take {
            if word >> i & 1 == 1 {
                bits.insert(base + i);
            }
        }
        base += 64;
    }
    CayleySample { a: GroupSubset::from_bits(g, bits), seed }
}

/// Whether `(x, y)` is an edge of the Cayley sum graph, i.e. `x + y ∈ A`.
pub fn edge_query(a: &GroupSubset, x: &Element, y: &Element) -> Result<bool> {
    let g = a.group();
    Ok(a.contains(g.encode(&g.add(x, y)?)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeviationReport {
    /// `edges / (|X||Y|) - 1/2`
    #[serde(serialize_with = "rational::serialize")]
    pub sigma: Rational,
    pub x_size: usize,
    pub y_size: usize,
    /// `sum_{x, y} A(x + y)`
    pub edge_count: u64,
}

fn deviation(edges: u64, x_size: usize, y_size: usize) -> Rational {
    Rational::new(edges as i128, (x_size * y_size) as i128) - Rational::new(1, 2)
}

pub fn sigma(a: &GroupSubset, x: &GroupSubset, y: &GroupSubset) -> Result<DeviationReport> {
    if x.is_empty() {
        return Err(Error::EmptySet("X"));
    }
    if y.is_empty() {
        return Err(Error::EmptySet("Y"));
    }
    if a.group() != x.group() {
        return Err(Error::GroupMismatch);
    }
    let f = rep_function(x, y)?;
    let edge_count = a.iter().map(|z| f.values[z] as u64).sum();
    Ok(DeviationReport {
        sigma: deviation(edge_count, x.len(), y.len()),
        x_size: x.len(),
        y_size: y.len(),
        edge_count,
    })
}

/// `sigma_A(X, {y})` for every `y` in `Y`, in index order.
pub fn row_sigmas(a: &GroupSubset, x: &GroupSubset, y: &GroupSubset) -> Result<Vec<(usize, Rational)>> {
    if x.is_empty() {
        return Err(Error::EmptySet("X"));
    }
    if a.group() != x.group() || a.group() != y.group() {
        return Err(Error::GroupMismatch);
    }
    let g = a.group();
    let xs = x.indices();
    Ok(y.iter()
        .map(|yy| {
            let edges = xs.iter().filter(|&&xx| a.contains(g.add_index(xx, yy))).count() as u64;
            (yy, deviation(edges, xs.len(), 1))
        })
        .collect())
}

/// `Y' = {y in Y : |sigma_A(X, y)| >= eps / 2}`.
///
/// When `|sigma_A(X, Y)| >= eps` the result has at least `eps |Y|` elements;
/// a smaller result is reported as an invariant violation.
pub fn lemma14_extract(
    a: &GroupSubset,
    x: &GroupSubset,
    y: &GroupSubset,
    eps: Rational,
) -> Result<GroupSubset> {
    require_epsilon(&eps, Rational::new(1, 2))?;
    let whole = sigma(a, x, y)?;
    let half = eps / 2;
    let kept = row_sigmas(a, x, y)?
        .into_iter()
        .filter(|(_, s)| s.abs() >= half)
        .map(|(yy, _)| yy);
    let out = GroupSubset::from_indices(a.group(), kept)?;
    if whole.sigma.abs() >= eps && Rational::from_integer(out.len() as i128) < eps * y.len() as i128 {
        return Err(Error::InvariantViolation(format!(
            "|Y'| = {} < {eps} |Y| although |sigma| = {}",
            out.len(),
            whole.sigma.abs()
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackingResult {
    pub ys: Vec<usize>,
    pub k: usize,
    #[serde(serialize_with = "rational::serialize")]
    pub epsilon: Rational,
    /// Union of the admitted translates `X + y_i`.
    pub z: GroupSubset,
    /// `K = |X|^2 |Y| / E(X, Y)` for the scanned `Y`.
    #[serde(serialize_with = "rational::serialize")]
    pub k_ratio: Rational,
    pub energy: Energy,
}

impl PackingResult {
    /// Recomputes the low-overlap condition along the order, maximality
    /// within `y`, and `k E(X, Y) > eps^2 n |Y|^2`. Returns every failure.
    pub fn check(&self, x: &GroupSubset, y: &GroupSubset) -> Vec<String> {
        let mut bad = Vec::new();
        let n = x.len() as i128;
        let limit = self.epsilon * n;
        let mut z = GroupSubset::empty(x.group());
        for &yy in &self.ys {
            let overlap = x.translate_overlap(yy, &z) as i128;
            if Rational::from_integer(overlap) > limit {
                bad.push(format!("translate by {yy} overlaps {overlap} > eps n"));
            }
            for t in x.translate(yy).iter() {
                z.insert(t);
            }
        }
        if z != self.z {
            bad.push("recorded union differs from the translates".into());
        }
        for yy in y.iter().filter(|yy| !self.ys.contains(yy)) {
            if Rational::from_integer(x.translate_overlap(yy, &z) as i128) <= limit {
                bad.push(format!("{yy} could still be admitted"));
            }
        }
        if !y.is_empty() && !lemma13_holds(self.k, self.energy, x.len(), y.len(), self.epsilon) {
            bad.push(format!("k = {} is not above eps^2 |Y| K / n", self.k));
        }
        bad
    }
}

/// `k > eps^2 |Y| K / n` with `K = n^2 |Y| / E`, i.e. `k E > eps^2 n |Y|^2`.
fn lemma13_holds(k: usize, energy: Energy, n: usize, y_len: usize, eps: Rational) -> bool {
    let lhs = Rational::from_integer(k as i128 * energy.get() as i128);
    lhs > eps * eps * (n as i128 * (y_len as i128).pow(2))
}

/// Maximal packing of translates: scans `Y` in increasing index order and
/// admits `y` when `X + y` meets the union of earlier admitted translates in
/// at most `eps |X|` points.
pub fn greedy_packing(x: &GroupSubset, y: &GroupSubset, eps: Rational) -> Result<PackingResult> {
    require_epsilon(&eps, Rational::new(1, 2))?;
    if x.is_empty() {
        return Err(Error::EmptySet("X"));
    }
    if y.is_empty() {
        // K is undefined without Y
        return Err(Error::EmptySet("Y"));
    }
    if x.group() != y.group() {
        return Err(Error::GroupMismatch);
    }
    let limit = eps * x.len() as i128;
    let mut z = GroupSubset::empty(x.group());
    let mut ys = Vec::new();
    for yy in y.iter() {
        if Rational::from_integer(x.translate_overlap(yy, &z) as i128) <= limit {
            ys.push(yy);
            for t in x.translate(yy).iter() {
                z.insert(t);
            }
        }
    }
    let energy = additive_energy(x, y)?;
    let n = x.len() as i128;
    let result = PackingResult {
        k: ys.len(),
        ys,
        epsilon: eps,
        z,
        k_ratio: Rational::new(n * n * y.len() as i128, energy.get() as i128),
        energy,
    };
    if !lemma13_holds(result.k, energy, x.len(), y.len(), eps) {
        return Err(Error::InvariantViolation(format!(
            "maximal packing of size {} is not above eps^2 |Y| K / n",
            result.k
        )));
    }
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PipelineOutcome {
    Witnesses {
        y_prime: GroupSubset,
        packing: Box<PackingResult>,
        /// `K` for `(X, Y)`
        #[serde(serialize_with = "rational::serialize")]
        k_ratio: Rational,
        /// `K' = |X|^2 |Y'| / E(X, Y')`
        #[serde(serialize_with = "rational::serialize")]
        k_prime: Rational,
        /// `eps^4 |Y| K / (4n)`
        #[serde(serialize_with = "rational::serialize")]
        k_lower_bound: Rational,
    },
    /// `|sigma_A(X, Y)| < eps`: the hypothesis fails, nothing is promised.
    Diagnostic {
        #[serde(serialize_with = "rational::serialize")]
        sigma: Rational,
        #[serde(serialize_with = "rational::serialize")]
        epsilon: Rational,
    },
}

/// Extracts the large-deviation rows `Y'` and packs them with `eps / 2`.
/// Checks `K' >= eps K` and `k > eps^4 |Y| K / (4n)`.
pub fn corollary15_pipeline(
    a: &GroupSubset,
    x: &GroupSubset,
    y: &GroupSubset,
    eps: Rational,
) -> Result<PipelineOutcome> {
    require_epsilon(&eps, Rational::new(1, 2))?;
    let whole = sigma(a, x, y)?;
    if whole.sigma.abs() < eps {
        return Ok(PipelineOutcome::Diagnostic { sigma: whole.sigma, epsilon: eps });
    }
    let n = x.len() as i128;
    let k_ratio = Rational::new(n * n * y.len() as i128, additive_energy(x, y)?.get() as i128);
    let y_prime = lemma14_extract(a, x, y, eps)?;
    let packing = greedy_packing(x, &y_prime, eps / 2)?;
    let k_prime = packing.k_ratio;
    if k_prime < eps * k_ratio {
        return Err(Error::InvariantViolation(format!("K' = {k_prime} < eps K = {}", eps * k_ratio)));
    }
    let rows = row_sigmas(a, x, &GroupSubset::from_indices(a.group(), packing.ys.iter().copied())?)?;
    if rows.iter().any(|(_, s)| s.abs() < eps / 2) {
        return Err(Error::InvariantViolation("a packed row deviates by less than eps/2".into()));
    }
    let k_lower_bound = eps.pow(4) * k_ratio * y.len() as i128 / (4 * n);
    if Rational::from_integer(packing.k as i128) <= k_lower_bound {
        return Err(Error::InvariantViolation(format!(
            "k = {} is not above eps^4 |Y| K / (4n) = {k_lower_bound}",
            packing.k
        )));
    }
    Ok(PipelineOutcome::Witnesses { y_prime, packing: Box::new(packing), k_ratio, k_prime, k_lower_bound })
}

/// Splits `Y` into consecutive index-ordered blocks with sizes in `[lo, hi]`.
///
/// Blocks of size `hi` are filled first; if the remainder is short of `lo`,
/// the shortfall is taken from the preceding blocks, last block first.
pub fn split_blocks(y: &GroupSubset, lo: usize, hi: usize) -> Result<Vec<GroupSubset>> {
    if lo == 0 || lo > hi {
        return Err(Error::InvalidParameter(format!("need 1 <= lo <= hi, got [{lo}, {hi}]")));
    }
    let total = y.len();
    if total < lo {
        return Err(Error::Infeasible(format!("|Y| = {total} is below the block minimum {lo}")));
    }
    let count = total.div_ceil(hi);
    if count * lo > total {
        return Err(Error::Infeasible(format!(
            "{total} elements cannot be split into blocks of size {lo}..={hi}"
        )));
    }
    let mut sizes = vec![hi; count];
    sizes[count - 1] = total - hi * (count - 1);
    let mut deficit = lo.saturating_sub(sizes[count - 1]);
    sizes[count - 1] += deficit;
    for s in sizes[..count - 1].iter_mut().rev() {
        let give = deficit.min(*s - lo);
        *s -= give;
        deficit -= give;
        if deficit == 0 {
            break;
        }
    }
    let elems = y.indices();
    let mut out = Vec::with_capacity(count);
    let mut start = 0;
    for s in sizes {
        out.push(GroupSubset::from_indices(y.group(), elems[start..start + s].iter().copied())?);
        start += s;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictionParams {
    /// `min(ceil(2000 ln N / eps^4), |X|)`
    pub s: usize,
    /// `min(ceil(K |Y| eps^2 / (10 ln N)), |Y|)`
    pub t: usize,
    /// `|Y|`
    pub r: usize,
    #[serde(serialize_with = "rational::serialize")]
    pub k_ratio: Rational,
}

pub fn restriction_params(x: &GroupSubset, y: &GroupSubset, eps: Rational) -> Result<RestrictionParams> {
    require_epsilon(&eps, Rational::new(1, 1))?;
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySet(if x.is_empty() { "X" } else { "Y" }));
    }
    if x.group() != y.group() {
        return Err(Error::GroupMismatch);
    }
    let ln_n = (x.group().order() as f64).ln();
    if ln_n <= 0.0 {
        return Err(Error::InvalidParameter("the group must have at least 2 elements".into()));
    }
    let e = rational::to_f64(&eps);
    let n = x.len() as i128;
    let k_ratio = Rational::new(n * n * y.len() as i128, additive_energy(x, y)?.get() as i128);
    let s = (2000.0 * ln_n / e.powi(4)).ceil().min(x.len() as f64) as usize;
    let t = (rational::to_f64(&k_ratio) * y.len() as f64 * e * e / (10.0 * ln_n))
        .ceil()
        .clamp(1.0, y.len() as f64) as usize;
    Ok(RestrictionParams { s, t, r: y.len(), k_ratio })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictionDraw {
    pub s_set: GroupSubset,
    pub t_set: GroupSubset,
    pub params: RestrictionParams,
    pub energy_st: Energy,
    /// `E(S, T) <= 2st + 2 s^2 t^2 E(X, Y) / (|X|^2 |Y|^2)`
    pub energy_ok: bool,
    /// `|sigma_A(X, Y) - sigma_A(S, T)| <= 6 sqrt(|Y| / (st))`; absent without `A`.
    pub sigma_ok: Option<bool>,
}

fn sample_subset(set: &GroupSubset, size: usize, rng: &mut ChaCha8Rng) -> Result<GroupSubset> {
    let elems = set.indices();
    let mut picked: Vec<usize> = index::sample(rng, elems.len(), size).into_iter().map(|i| elems[i]).collect();
    picked.sort_unstable();
    GroupSubset::from_indices(set.group(), picked)
}

/// Draws uniform `S ⊆ X`, `T ⊆ Y` of the prescribed sizes and records whether
/// the energy and deviation transfer inequalities hold for this draw.
pub fn restriction_sample(
    x: &GroupSubset,
    y: &GroupSubset,
    eps: Rational,
    seed: u64,
    a: Option<&GroupSubset>,
) -> Result<RestrictionDraw> {
    let params = restriction_params(x, y, eps)?;
    restriction_sample_with(x, y, params, seed, a)
}

/// As [`restriction_sample`] with explicit sizes.
pub fn restriction_sample_with(
    x: &GroupSubset,
    y: &GroupSubset,
    params: RestrictionParams,
    seed: u64,
    a: Option<&GroupSubset>,
) -> Result<RestrictionDraw> {
    let (s, t) = (params.s, params.t);
    if s == 0 || t == 0 || s > x.len() || t > y.len() {
        return Err(Error::InvalidParameter(format!(
            "sample sizes s = {s}, t = {t} must lie in 1..=|X|, 1..=|Y|"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s_set = sample_subset(x, s, &mut rng)?;
    let t_set = sample_subset(y, t, &mut rng)?;
    let energy_xy = additive_energy(x, y)?;
    let energy_st = additive_energy(&s_set, &t_set)?;
    let big = |v: u128| BigInt::from(v);
    let scale = big((x.len() as u128).pow(2) * (y.len() as u128).pow(2));
    let (s, t) = (s as u128, t as u128);
    let energy_ok = big(energy_st.get() as u128) * &scale
        <= big(2 * s * t) * &scale + big(2 * s * s * t * t) * big(energy_xy.get() as u128);
    let sigma_ok = match a {
        None => None,
        Some(a) => {
            let d = sigma(a, x, y)?.sigma - sigma(a, &s_set, &t_set)?.sigma;
            // d^2 <= 36 |Y| / (st)
            let (p, q) = (BigInt::from(*d.numer()), BigInt::from(*d.denom()));
            Some(&p * &p * big(s * t) <= big(36 * y.len() as u128) * &q * &q)
        }
    };
    Ok(RestrictionDraw { s_set, t_set, params, energy_st, energy_ok, sigma_ok })
}
