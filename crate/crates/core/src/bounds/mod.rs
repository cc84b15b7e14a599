//! Closed-form probability bounds and size thresholds.
//!
//! Every bound is carried as its natural logarithm next to the plain value,
//! since most of them underflow long before the parameters get interesting.
//! Logs are natural throughout and `log log N` means `ln(ln N)`. Parameters
//! that involve the group order take `log_n = ln N` rather than `N`.

mod cascade;

pub use cascade::{
    cascade_audit, find_threshold, AuditInput, CascadeConstants, CascadeLedger, CascadeMode,
    LedgerRow, Param, RowScale, Scale, ThresholdSearch,
};

use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// A bound kept as `ln(value)`. `value` may underflow to 0 or exceed 1; a
/// bound above 1 is vacuous as a probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bound {
    pub ln: f64,
    pub value: f64,
}

impl Bound {
    pub fn from_ln(ln: f64) -> Self {
        Bound { ln, value: ln.exp() }
    }

    /// The bound read as a probability, i.e. clipped to `[0, 1]`.
    pub fn probability(&self) -> f64 {
        self.value.clamp(0.0, 1.0)
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}

fn require_finite(name: &str, v: f64) -> Result<()> {
    require(v.is_finite(), || format!("{name} must be finite, got {v}"))
}

fn require_eps(eps: f64, max: f64) -> Result<()> {
    require(eps > 0.0 && eps <= max, || format!("epsilon {eps} must lie in (0, {max}]"))
}

/// Hoeffding tail for a sum of `count` fair `{0,1}` variables:
/// `P(|S - count/2| >= lambda) <= exp(-2 lambda^2 / count)`, clipped to `[0, 1]`.
pub fn hoeffding_tail(lambda: f64, count: u64) -> Result<f64> {
    require(count >= 1, || "count must be at least 1".into())?;
    require(lambda >= 0.0 && lambda.is_finite(), || format!("lambda {lambda} must be >= 0"))?;
    Ok((-2.0 * lambda * lambda / count as f64).exp().clamp(0.0, 1.0))
}

/// Probability that `k` low-overlap rows of `X` (`|X| = n`) all deviate by
/// at least `eps`: `exp(-eps^2 k n / 2)`.
pub fn lemma10_bound(eps: f64, k: u64, n: u64) -> Result<Bound> {
    require_eps(eps, 0.5)?;
    require(n >= 1, || "n must be at least 1".into())?;
    Ok(Bound::from_ln(-eps * eps * k as f64 * n as f64 / 2.0))
}

/// Union bounds over the choice of `y_1..y_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PackingUnionBounds {
    /// `(N exp(-eps^2 n / 2))^k`
    pub cor11: Bound,
    /// `exp(-eps^2 n k / 4)`, valid once `n >= 4 ln N / eps^2`
    pub cor12: Bound,
    /// `4 ln N / eps^2`
    pub threshold: f64,
    pub threshold_ok: bool,
}

pub fn cor11_cor12_bounds(log_n: f64, eps: f64, n: u64, k: u64) -> Result<PackingUnionBounds> {
    require_finite("log_n", log_n)?;
    require(log_n >= 0.0, || "log_n must be >= 0".into())?;
    require_eps(eps, 0.5)?;
    let (n, k) = (n as f64, k as f64);
    let threshold = 4.0 * log_n / (eps * eps);
    Ok(PackingUnionBounds {
        cor11: Bound::from_ln(k * (log_n - eps * eps * n / 2.0)),
        cor12: Bound::from_ln(-eps * eps * n * k / 4.0),
        threshold,
        threshold_ok: n >= threshold,
    })
}

/// `C exp(2000 ln^2 N / eps^4 - eps^2 r K / 40)`.
pub fn prop8_bound(log_n: f64, eps: f64, r: f64, k: f64, c: f64) -> Result<Bound> {
    require_finite("log_n", log_n)?;
    require_eps(eps, 1.0)?;
    require(r >= 1.0 && k >= 1.0, || "r and K must be >= 1".into())?;
    require(c > 0.0, || "C must be positive".into())?;
    Ok(Bound::from_ln(
        c.ln() + 2000.0 * log_n * log_n / eps.powi(4) - eps * eps * r * k / 40.0,
    ))
}

/// The specialisation with `K = M = (ln ln N)^{-1} (ln N)^{1/2}` and
/// `r = (eps/4) w (ln ln N) (ln N)^{3/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cor9 {
    pub m: f64,
    pub r: f64,
    /// `eps^7`
    pub eps7: f64,
    /// `2^25 / (w ln ln N sqrt(ln N))`
    pub eps7_required: f64,
    pub eps_condition_ok: bool,
    pub bound: Bound,
}

pub fn cor9(log_n: f64, w: f64, eps: f64, c: f64) -> Result<Cor9> {
    require(log_n > std::f64::consts::E, || "log_n must exceed e".into())?;
    require(w > 0.0, || "w must be positive".into())?;
    let ll = log_n.ln();
    let m = log_n.sqrt() / ll;
    let r = eps / 4.0 * w * ll * log_n.powf(1.5);
    let eps7_required = 2f64.powi(25) / (w * ll * log_n.sqrt());
    let bound = prop8_bound(log_n, eps, r.max(1.0), m.max(1.0), c)?;
    Ok(Cor9 {
        m,
        r,
        eps7: eps.powi(7),
        eps7_required,
        eps_condition_ok: eps.powi(7) >= eps7_required,
        bound,
    })
}

/// `exp(-eps^6 m K / 64)`.
pub fn prop16_bound(eps: f64, m: f64, k: f64) -> Result<Bound> {
    require_eps(eps, 0.5)?;
    require(m >= 1.0 && k >= 1.0, || "m and K must be >= 1".into())?;
    Ok(Bound::from_ln(-eps.powi(6) * m * k / 64.0))
}

/// The same exponent assembled from its parts: the packing size
/// `k > eps^4 m K / (4n)` fed into `exp(-(eps/2)^2 n k / 4)`. Returns the
/// exponent (a negative number).
pub fn prop16_composed_exponent(eps: f64, m: f64, k: f64, n: f64) -> f64 {
    let packing = eps.powi(4) * m * k / (4.0 * n);
    let half = eps / 2.0;
    -(half * half) * n * packing / 4.0
}

/// Count of low-dimensional sets: `N^d 3^{nd} < e^{(ln N + 1.1 n) d} <= e^{2nd}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma6Bound {
    /// `2 n d`
    pub ln_bound: f64,
    /// `d ln N + n d ln 3`
    pub ln_intermediate: f64,
    /// `(ln N + 1.1 n) d`
    pub ln_middle: f64,
    pub bound: f64,
    pub intermediate: f64,
    /// `n >= 2 ln N`
    pub precondition_ok: bool,
    /// The chain, strict in its first step when `d >= 1` (both sides are 1
    /// when `d = 0`).
    pub chain_holds: bool,
}

pub fn lemma6_bound(order: f64, n: f64, d: f64) -> Lemma6Bound {
    lemma6_bound_ln(order.ln(), n, d)
}

pub fn lemma6_bound_ln(log_n: f64, n: f64, d: f64) -> Lemma6Bound {
    let ln_bound = 2.0 * n * d;
    let ln_intermediate = d * log_n + n * d * 3f64.ln();
    let ln_middle = (log_n + 1.1 * n) * d;
    let first = if d > 0.0 {
        ln_intermediate < ln_middle
    } else {
        ln_intermediate <= ln_middle
    };
    Lemma6Bound {
        ln_bound,
        ln_intermediate,
        ln_middle,
        bound: ln_bound.exp(),
        intermediate: ln_intermediate.exp(),
        precondition_ok: n >= 2.0 * log_n,
        chain_holds: first && ln_middle <= ln_bound,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    Thm1,
    Thm2,
    Thm7,
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thm1" => Ok(Theorem::Thm1),
            "thm2" => Ok(Theorem::Thm2),
            "thm7" => Ok(Theorem::Thm7),
            other => Err(Error::Parse(format!("unknown theorem {other:?}"))),
        }
    }
}

/// Lower size thresholds `(|X|, |Y|)` required by each density theorem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SizeThresholds {
    pub theorem: Theorem,
    pub x: f64,
    pub y: f64,
}

pub fn theorem_thresholds(which: Theorem, log_n: f64, w: f64) -> Result<SizeThresholds> {
    require(log_n >= 16f64.ln(), || "N must be at least 16".into())?;
    require(w > 0.0, || "w must be positive".into())?;
    let ll = log_n.ln();
    let (x, y) = match which {
        Theorem::Thm1 => (w * log_n, w * log_n * log_n),
        Theorem::Thm2 => (w * log_n * ll.powi(2), w * log_n * ll.powi(10)),
        Theorem::Thm7 => {
            let t = w * ll * log_n.powf(1.5);
            (t, t)
        }
    };
    Ok(SizeThresholds { theorem: which, x, y })
}
