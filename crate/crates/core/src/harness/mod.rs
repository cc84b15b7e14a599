//! Seeded experiments: Monte Carlo tail estimates next to their closed-form
//! bounds, and exhaustive worst-case scans on tiny groups.
//!
//! Every report is a pure function of its [`ExperimentConfig`] apart from the
//! `timing` field. Trials run in parallel; trial `i` draws from
//! [`trial_seed`]`(seed, i)` and results are combined with integer sums or
//! collected in trial order, so thread count never changes the output.

mod experiments;
mod scan;

pub use experiments::{
    mc_lemma10, mc_restriction, mc_sigma_tail, Lemma10Arm, Lemma10Result, RestrictionResult,
    SigmaTailResult, SigmaTier,
};
pub use scan::{worst_case_scan, WorstCaseResult, WORST_CASE_MAX_ORDER};

use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::rational::{self, Rational};
use crate::subset::GroupSubset;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The splitmix64 output function applied to `x + GOLDEN_GAMMA`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index`: `splitmix64(master + index * GOLDEN_GAMMA)`, all
/// arithmetic wrapping mod 2^64. This is the `index`-th output of a
/// splitmix64 stream started at `master`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(index.wrapping_mul(GOLDEN_GAMMA)))
}

/// Seed for drawing the fixed sets an experiment is built around, kept
/// apart from every trial stream.
pub fn setup_seed(master: u64) -> u64 {
    splitmix64(!master)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Lemma10,
    SigmaTail,
    Restriction,
    WorstCase,
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lemma10" => Ok(ExperimentKind::Lemma10),
            "sigma-tail" => Ok(ExperimentKind::SigmaTail),
            "restriction" => Ok(ExperimentKind::Restriction),
            "worst-case" => Ok(ExperimentKind::WorstCase),
            other => Err(Error::Parse(format!("unknown experiment kind {other:?}"))),
        }
    }
}

/// Inputs of one experiment. `sizes` is read per kind:
///
/// - `lemma10`: `[n]`, the size of the fixed set `X`
/// - `sigma-tail`: one tier per entry, with `|X| = |Y| = size`
/// - `restriction`: `[|X|, |Y|]`
/// - `worst-case`: `[floor]`, the least admissible `|X|` and `|Y|`
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub group: GroupSpec,
    pub kind: ExperimentKind,
    pub trials: u64,
    pub seed: u64,
    #[serde(serialize_with = "rational::serialize")]
    pub epsilon: Rational,
    pub sizes: Vec<usize>,
    /// Packing prefixes to test (`lemma10` only).
    pub ks: Vec<usize>,
    /// Fixed `A` instead of a seeded random one (`worst-case` only).
    pub a: Option<GroupSubset>,
}

impl ExperimentConfig {
    /// Defaults per kind; callers override fields as needed.
    pub fn new(group: GroupSpec, kind: ExperimentKind) -> Self {
        let (trials, sizes, ks) = match kind {
            ExperimentKind::Lemma10 => (100_000, vec![32], vec![1, 2, 4]),
            ExperimentKind::SigmaTail => (10_000, vec![4, 8, 16, 32, 64], vec![]),
            ExperimentKind::Restriction => (1_000, vec![64, 64], vec![]),
            ExperimentKind::WorstCase => (1, vec![1], vec![]),
        };
        ExperimentConfig {
            group,
            kind,
            trials,
            seed: 0,
            epsilon: Rational::new(1, 2),
            sizes,
            ks,
            a: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        let n = self.group.order();
        if let Some(&s) = self.sizes.iter().find(|&&s| s == 0 || s > n) {
            return Err(Error::InvalidParameter(format!("size {s} must lie in 1..={n}")));
        }
        if let Some(a) = &self.a {
            if a.group() != &self.group {
                return Err(Error::GroupMismatch);
            }
        }
        Ok(())
    }
}

/// A binomial proportion with its Wilson 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Proportion {
    pub hits: u64,
    pub trials: u64,
    pub frequency: f64,
    pub interval: (f64, f64),
}

const Z95: f64 = 1.959_963_984_540_054;

impl Proportion {
    pub fn new(hits: u64, trials: u64) -> Self {
        let n = trials as f64;
        let p = hits as f64 / n;
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        Proportion {
            hits,
            trials,
            frequency: p,
            interval: ((center - half).max(0.0).min(p), (center + half).min(1.0).max(p)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ExperimentResult {
    Lemma10(Lemma10Result),
    SigmaTail(SigmaTailResult),
    Restriction(RestrictionResult),
    WorstCase(WorstCaseResult),
}

/// Wall-clock data; the only field of a report that varies between runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Timing {
    pub wall_clock_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub trials: u64,
    pub config: ExperimentConfig,
    /// Whether the experiment's acceptance property held.
    pub passed: bool,
    pub result: ExperimentResult,
    pub timing: Timing,
}

/// Runs the experiment named by `config.kind`.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let (passed, result) = match config.kind {
        ExperimentKind::Lemma10 => {
            let r = mc_lemma10(config)?;
            (r.all_within, ExperimentResult::Lemma10(r))
        }
        ExperimentKind::SigmaTail => (true, ExperimentResult::SigmaTail(mc_sigma_tail(config)?)),
        ExperimentKind::Restriction => {
            let r = mc_restriction(config)?;
            (r.smoke_ok, ExperimentResult::Restriction(r))
        }
        ExperimentKind::WorstCase => {
            let r = worst_case_scan(config)?;
            (r.witness_recomputed, ExperimentResult::WorstCase(r))
        }
    };
    Ok(ExperimentReport {
        kind: config.kind,
        seed: config.seed,
        trials: config.trials,
        config: config.clone(),
        passed,
        result,
        timing: Timing { wall_clock_ms: start.elapsed().as_secs_f64() * 1e3 },
    })
}
