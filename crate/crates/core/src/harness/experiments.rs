use num_traits::Signed;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{setup_seed, trial_seed, ExperimentConfig, Proportion};
use crate::bounds::lemma10_bound;
use crate::deviation::{greedy_packing, random_subset, restriction_params, restriction_sample, sigma};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::rational::{self, Rational};
use crate::subset::GroupSubset;

fn sample_set(g: &GroupSpec, size: usize, rng: &mut ChaCha8Rng) -> Result<GroupSubset> {
    GroupSubset::from_indices(g, index::sample(rng, g.order(), size))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma10Arm {
    pub k: usize,
    /// Trials in which all of the first `k` rows deviate by at least `eps`.
    pub event: Proportion,
    /// `exp(-eps^2 k n / 2)`
    pub bound: f64,
    /// `sqrt(bound (1 - bound) / trials)`
    pub binomial_sigma: f64,
    pub within: bool,
    /// Product of the single-row frequencies of the first `k` rows.
    pub marginal_product: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma10Result {
    pub n: usize,
    pub x: GroupSubset,
    /// The packed translates `y_1, y_2, ...` used as rows.
    pub ys: Vec<usize>,
    pub rows: Vec<Proportion>,
    pub arms: Vec<Lemma10Arm>,
    /// With `A = G` every row deviates by 1/2, so the event is certain.
    pub full_a_event: bool,
    pub all_within: bool,
}

/// Fixes a random `X` with `|X| = n`, packs translates of `X` over the whole
/// group with overlap at most `eps n`, and measures how often the first `k`
/// rows all satisfy `|sigma_A(X, y_j)| >= eps` for random `A`.
pub fn mc_lemma10(config: &ExperimentConfig) -> Result<Lemma10Result> {
    let g = &config.group;
    let eps = config.epsilon;
    let n = *config
        .sizes
        .first()
        .ok_or_else(|| Error::InvalidParameter("lemma10 needs sizes = [n]".into()))?;
    if config.ks.is_empty() || config.ks.contains(&0) {
        return Err(Error::InvalidParameter("ks must be a nonempty list of positive k".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(setup_seed(config.seed));
    let x = sample_set(g, n, &mut rng)?;
    let packing = greedy_packing(&x, &GroupSubset::full(g), eps)?;
    let k_max = *config.ks.iter().max().unwrap();
    if packing.k < k_max {
        return Err(Error::Infeasible(format!(
            "packing has {} translates, fewer than k = {k_max}",
            packing.k
        )));
    }
    let ys: Vec<usize> = packing.ys[..k_max].to_vec();
    let xs = x.indices();
    let eps_f = rational::to_f64(&eps);
    // |c/n - 1/2| >= eps  <=>  |2c - n| >= 2 eps n, compared exactly
    let threshold = eps * (2 * n) as i128;
    let deviates = |a: &GroupSubset, y: usize| {
        let c = xs.iter().filter(|&&xx| a.contains(g.add_index(xx, y))).count() as i128;
        Rational::from_integer(2 * c - n as i128).abs() >= threshold
    };
    // counts[0..k_max] per row, counts[k_max + i] for prefix event of ks[i]
    let width = k_max + config.ks.len();
    let counts = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let a = random_subset(g, trial_seed(config.seed, i)).a;
            let flags: Vec<bool> = ys.iter().map(|&y| deviates(&a, y)).collect();
            let mut c = vec![0u64; width];
            for (j, &f) in flags.iter().enumerate() {
                c[j] = f as u64;
            }
            for (slot, &k) in config.ks.iter().enumerate() {
                c[k_max + slot] = flags[..k].iter().all(|&f| f) as u64;
            }
            c
        })
        .reduce(
            || vec![0u64; width],
            |mut acc, c| {
                acc.iter_mut().zip(c).for_each(|(s, v)| *s += v);
                acc
            },
        );
    let rows: Vec<Proportion> = counts[..k_max].iter().map(|&h| Proportion::new(h, config.trials)).collect();
    let full = GroupSubset::full(g);
    let full_a_event = ys.iter().all(|&y| deviates(&full, y));
    let arms: Vec<Lemma10Arm> = config
        .ks
        .iter()
        .enumerate()
        .map(|(slot, &k)| {
            let bound = lemma10_bound(eps_f, k as u64, n as u64)?.value;
            let binomial_sigma = (bound * (1.0 - bound) / config.trials as f64).sqrt();
            let event = Proportion::new(counts[k_max + slot], config.trials);
            Ok(Lemma10Arm {
                k,
                within: event.frequency <= bound + 3.0 * binomial_sigma,
                event,
                bound,
                binomial_sigma,
                marginal_product: rows[..k].iter().map(|r| r.frequency).product(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(Lemma10Result {
        n,
        all_within: arms.iter().all(|a| a.within),
        x,
        ys,
        rows,
        arms,
        full_a_event,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaTier {
    pub x_size: usize,
    pub y_size: usize,
    #[serde(serialize_with = "rational::serialize")]
    pub median_abs_sigma: Rational,
    /// Order-statistic 95% interval for the median.
    #[serde(serialize_with = "serialize_pair")]
    pub median_interval: (Rational, Rational),
    #[serde(serialize_with = "rational::serialize")]
    pub max_abs_sigma: Rational,
    pub mean_abs_sigma: f64,
}

fn serialize_pair<S: serde::Serializer>(
    p: &(Rational, Rational),
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&p.0.to_string())?;
    t.serialize_element(&p.1.to_string())?;
    t.end()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaTailResult {
    pub tiers: Vec<SigmaTier>,
    /// Medians never increase from one tier to the next.
    pub median_non_increasing: bool,
}

/// For each trial draws a random `A` and, per tier, a uniform pair `X, Y`
/// of the tier's size, recording `|sigma_A(X, Y)|`.
pub fn mc_sigma_tail(config: &ExperimentConfig) -> Result<SigmaTailResult> {
    let g = &config.group;
    if config.sizes.is_empty() {
        return Err(Error::InvalidParameter("sigma-tail needs at least one size".into()));
    }
    let per_trial: Vec<Vec<Rational>> = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let seed = trial_seed(config.seed, i);
            let a = random_subset(g, seed).a;
            let mut rng = ChaCha8Rng::seed_from_u64(super::splitmix64(seed));
            config
                .sizes
                .iter()
                .map(|&s| {
                    let x = sample_set(g, s, &mut rng)?;
                    let y = sample_set(g, s, &mut rng)?;
                    Ok(sigma(&a, &x, &y)?.sigma.abs())
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let trials = per_trial.len();
    let tiers: Vec<SigmaTier> = config
        .sizes
        .iter()
        .enumerate()
        .map(|(t, &s)| {
            let mut v: Vec<Rational> = per_trial.iter().map(|row| row[t]).collect();
            v.sort_unstable();
            let mid = (trials - 1) / 2;
            let spread = (Z95_HALF * (trials as f64).sqrt()).ceil() as usize;
            SigmaTier {
                x_size: s,
                y_size: s,
                median_abs_sigma: v[mid],
                median_interval: (v[mid.saturating_sub(spread)], v[(mid + spread).min(trials - 1)]),
                max_abs_sigma: v[trials - 1],
                mean_abs_sigma: v.iter().map(rational::to_f64).sum::<f64>() / trials as f64,
            }
        })
        .collect();
    let median_non_increasing = tiers.windows(2).all(|w| w[1].median_abs_sigma <= w[0].median_abs_sigma);
    Ok(SigmaTailResult { tiers, median_non_increasing })
}

/// `1.96 / 2`, the half-width in ranks of the median's interval per `sqrt(n)`.
const Z95_HALF: f64 = 0.98;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictionResult {
    pub x: GroupSubset,
    pub y: GroupSubset,
    pub s: usize,
    pub t: usize,
    pub energy_holds: Proportion,
    pub sigma_holds: Proportion,
    pub both_hold: Proportion,
    /// Frequency of both inequalities at least 1/2.
    pub smoke_ok: bool,
}

/// Fixes random `X, Y` of the configured sizes; each trial draws `A` and a
/// restriction `S ⊆ X`, `T ⊆ Y`, and records whether the energy and deviation
/// transfer inequalities hold.
pub fn mc_restriction(config: &ExperimentConfig) -> Result<RestrictionResult> {
    let g = &config.group;
    let (xs, ys) = match config.sizes[..] {
        [xs, ys] => (xs, ys),
        _ => return Err(Error::InvalidParameter("restriction needs sizes = [|X|, |Y|]".into())),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(setup_seed(config.seed));
    let x = sample_set(g, xs, &mut rng)?;
    let y = sample_set(g, ys, &mut rng)?;
    let params = restriction_params(&x, &y, config.epsilon)?;
    let counts = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let seed = trial_seed(config.seed, i);
            let a = random_subset(g, seed).a;
            let d = restriction_sample(&x, &y, config.epsilon, super::splitmix64(seed), Some(&a))?;
            let s = d.sigma_ok == Some(true);
            Ok([d.energy_ok as u64, s as u64, (d.energy_ok && s) as u64])
        })
        .try_reduce(|| [0u64; 3], |a, b| Ok([a[0] + b[0], a[1] + b[1], a[2] + b[2]]))?;
    let both_hold = Proportion::new(counts[2], config.trials);
    Ok(RestrictionResult {
        x,
        y,
        s: params.s,
        t: params.t,
        energy_holds: Proportion::new(counts[0], config.trials),
        sigma_holds: Proportion::new(counts[1], config.trials),
        smoke_ok: both_hold.frequency >= 0.5,
        both_hold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::ExperimentKind;

    #[test]
    fn lemma10_small_run() {
        let mut c = ExperimentConfig::new(GroupSpec::f2(6).unwrap(), ExperimentKind::Lemma10);
        c.sizes = vec![8];
        c.trials = 2000;
        let r = mc_lemma10(&c).unwrap();
        assert!(r.full_a_event);
        assert_eq!(r.arms.len(), 3);
        assert!(r.arms.windows(2).all(|w| w[1].event.hits <= w[0].event.hits));
        assert_eq!(r, mc_lemma10(&c).unwrap());
    }

    #[test]
    fn singleton_rows_are_independent() {
        // n = 2, eps = 1/4 admits only disjoint translates, and a row deviates
        // iff both of its points are in A or both are out: a fair coin per row
        let mut c = ExperimentConfig::new(GroupSpec::f2(6).unwrap(), ExperimentKind::Lemma10);
        c.sizes = vec![2];
        c.ks = vec![1, 2];
        c.epsilon = Rational::new(1, 4);
        c.trials = 20_000;
        let r = mc_lemma10(&c).unwrap();
        assert!(r.x.translate(r.ys[0]).is_disjoint(&r.x.translate(r.ys[1])));
        let arm = &r.arms[1];
        assert!((arm.event.frequency - arm.marginal_product).abs() < 0.02);
        assert!((arm.event.frequency - 0.25).abs() < 0.02);
    }

    #[test]
    fn sigma_tail_full_group() {
        let g = GroupSpec::f2(4).unwrap();
        let mut c = ExperimentConfig::new(g, ExperimentKind::SigmaTail);
        c.sizes = vec![16];
        c.trials = 50;
        let r = mc_sigma_tail(&c).unwrap();
        assert!(r.tiers[0].max_abs_sigma <= Rational::new(1, 2));
        assert_eq!(r, mc_sigma_tail(&c).unwrap());
    }

    #[test]
    fn restriction_runs() {
        let mut c = ExperimentConfig::new(GroupSpec::f2(6).unwrap(), ExperimentKind::Restriction);
        c.sizes = vec![16, 16];
        c.trials = 50;
        let r = mc_restriction(&c).unwrap();
        assert!(r.s <= 16 && r.t <= 16);
        assert_eq!(r.both_hold.trials, 50);
    }
}
