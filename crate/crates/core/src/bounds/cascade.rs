//! Numeric audit of the parameter cascades behind the density theorems.
//!
//! The group order only enters through `L = ln N` and `ll = ln ln N`, and the
//! interesting thresholds have `L` far beyond `f64`, so `ll` is the primary
//! variable internally. Rows whose two sides share a power of `L` are
//! reported with that power divided out, which keeps the comparison exact
//! instead of losing everything to cancellation against `ll`.

use std::f64::consts::LN_2;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

const LN_10: f64 = std::f64::consts::LN_10;
const K_PRIME_TOLERANCE: f64 = 1e-12;
const THRESHOLD_GRID: usize = 256;
const THRESHOLD_MAX_LOG_LOG_N: f64 = 1e307;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CascadeMode {
    General,
    #[serde(rename = "exponent2")]
    ExponentTwo,
}

impl FromStr for CascadeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(CascadeMode::General),
            "exponent2" | "exp2" => Ok(CascadeMode::ExponentTwo),
            other => Err(Error::Parse(format!("unknown audit mode {other:?}"))),
        }
    }
}

/// Where the audit sits on the `N` axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    LogN(f64),
    LogLogN(f64),
}

/// Absolute constants the argument leaves unnamed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CascadeConstants {
    /// Counting constant in the bound on the number of candidate `X'`.
    pub c: f64,
    /// Prefactor of the restricted-deviation bound.
    pub c_prime: f64,
    /// `d = 2 c1 (ln ln N) (ln N)^{1/2}`.
    pub c1: f64,
}

impl Default for CascadeConstants {
    fn default() -> Self {
        CascadeConstants { c: 1.0, c_prime: 1.0, c1: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuditInput {
    pub mode: CascadeMode,
    pub scale: Scale,
    /// Defaults to `ln ln N`.
    pub w: Option<f64>,
    /// Deviation level for the exponent-two mode; defaults to 1/2.
    pub epsilon: Option<f64>,
    pub constants: CascadeConstants,
}

impl AuditInput {
    pub fn new(mode: CascadeMode, scale: Scale) -> Self {
        AuditInput { mode, scale, w: None, epsilon: None, constants: CascadeConstants::default() }
    }

    pub fn with_w(mut self, w: f64) -> Self {
        self.w = Some(w);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Gt => lhs > rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

/// How `lhs` and `rhs` of a row are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RowScale {
    Linear,
    Ln,
    /// `ln(side / (ln N)^power)`.
    LnReduced { log_n_power: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerRow {
    pub name: &'static str,
    pub anchor: &'static str,
    pub relation: Relation,
    pub scale: RowScale,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    /// Unnamed constants the row depends on.
    pub constants: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Param {
    pub name: &'static str,
    pub formula: &'static str,
    pub ln_value: f64,
    /// `exp(ln_value)`; infinite once it leaves `f64` range.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeLedger {
    pub input: AuditInput,
    /// `None` when `ln N` itself overflows.
    pub log_n: Option<f64>,
    pub log_log_n: f64,
    pub w: f64,
    pub params: Vec<Param>,
    pub rows: Vec<LedgerRow>,
    pub pass: bool,
}

impl CascadeLedger {
    pub fn row(&self, name: &str) -> Option<&LedgerRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn param(&self, name: &str) -> Option<&Param> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn failing_rows(&self) -> impl Iterator<Item = &LedgerRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

fn ln_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

struct Builder {
    params: Vec<Param>,
    rows: Vec<LedgerRow>,
}

impl Builder {
    fn param(&mut self, name: &'static str, formula: &'static str, ln_value: f64) {
        self.params.push(Param { name, formula, ln_value, value: ln_value.exp() });
    }

    fn exact(&mut self, name: &'static str, formula: &'static str, value: f64) {
        self.params.push(Param { name, formula, ln_value: value.ln(), value });
    }

    #[allow(clippy::too_many_arguments)]
    fn row(
        &mut self,
        name: &'static str,
        anchor: &'static str,
        relation: Relation,
        scale: RowScale,
        lhs: f64,
        rhs: f64,
        constants: &[&'static str],
    ) {
        self.rows.push(LedgerRow {
            name,
            anchor,
            relation,
            scale,
            lhs,
            rhs,
            pass: relation.holds(lhs, rhs),
            constants: constants.to_vec(),
        });
    }
}

fn validate(input: &AuditInput) -> Result<(Option<f64>, f64)> {
    let bad = |m: String| Err(Error::InvalidParameter(m));
    let (log_n, ll) = match input.scale {
        Scale::LogN(l) => {
            if !(l.is_finite() && l > std::f64::consts::E) {
                return bad(format!("log N must be a finite number above e, got {l}"));
            }
            (Some(l), l.ln())
        }
        Scale::LogLogN(ll) => {
            if !(ll.is_finite() && ll > 1.0) {
                return bad(format!("log log N must be a finite number above 1, got {ll}"));
            }
            let l = ll.exp();
            (l.is_finite().then_some(l), ll)
        }
    };
    if let Some(w) = input.w {
        if !(w.is_finite() && w > 1.0) {
            return bad(format!("w must be a finite number above 1, got {w}"));
        }
    }
    if let Some(e) = input.epsilon {
        if !(e > 0.0 && e <= 1.0) {
            return bad(format!("epsilon {e} must lie in (0, 1]"));
        }
    }
    let c = input.constants;
    for (name, v) in [("C", c.c), ("C'", c.c_prime), ("C1", c.c1)] {
        if !(v.is_finite() && v > 0.0) {
            return bad(format!("constant {name} must be positive, got {v}"));
        }
    }
    Ok((log_n, ll))
}

/// Evaluates every derived parameter and required inequality at one point.
/// Failing rows are reported, never raised.
pub fn cascade_audit(input: &AuditInput) -> Result<CascadeLedger> {
    let (log_n, ll) = validate(input)?;
    let w = input.w.unwrap_or(ll);
    if w <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "w = ln ln N = {w} must exceed 1; pass an explicit w"
        )));
    }
    let mut b = Builder { params: Vec::new(), rows: Vec::new() };
    match input.mode {
        CascadeMode::General => general(&mut b, input, log_n, ll, w),
        CascadeMode::ExponentTwo => exponent_two(&mut b, input, log_n, ll, w),
    }
    let pass = b.rows.iter().all(|r| r.pass);
    Ok(CascadeLedger { input: *input, log_n, log_log_n: ll, w, params: b.params, rows: b.rows, pass })
}

fn general(b: &mut Builder, input: &AuditInput, log_n: Option<f64>, ll: f64, w: f64) {
    let c = input.constants.c;
    let ln_ll = ll.ln();
    let ln_w = w.ln();
    let w1 = w.sqrt();
    let ln_w1 = ln_w / 2.0;
    let eps = w.powf(-1.0 / 13.0);
    let eps_t = eps / 4.0;
    let ln_eps = eps.ln();
    let ln_eps_t = eps_t.ln();

    b.exact("w", "w", w);
    b.exact("w1", "sqrt(w)", w1);
    b.exact("eps", "w^(-1/13)", eps);
    b.exact("eps_tilde", "eps / 4", eps_t);

    // n~0 = ceil(w1 L ll^2); the ceiling only matters while it is visible.
    let n0_tilde_real_ln = ln_w1 + ll + 2.0 * ln_ll;
    let n0_tilde = match log_n {
        Some(l) if w1 * l * ll * ll < 1e15 => Some((w1 * l * ll * ll).ceil()),
        _ => None,
    };
    let ln_n0_tilde = n0_tilde.map_or(n0_tilde_real_ln, f64::ln);
    b.param("n0_tilde", "ceil(w1 L ll^2)", ln_n0_tilde);
    b.param("n1_tilde", "2 n0_tilde", ln_n0_tilde + LN_2);
    b.param("m", "w L ll^10", ln_w + ll + 10.0 * ln_ll);
    let j0 = (ll / 2.0).ceil();
    b.exact("j0", "ceil(ll / 2)", j0);
    b.exact("M_0", "10^(j+1) at j = 0", 10.0);
    // n_nu / L = eps~ w1 ll 2^nu, so L never has to be formed.
    let ln_n0_over_l = ln_eps_t + ln_w1 + ln_ll;
    b.param("n_0", "eps~ w1 L ll", ln_n0_over_l + ll);
    let nu0 = ((LN_2 + ll.ln() - ln_eps_t) / LN_2).floor();
    b.exact("nu0", "max nu with n_nu <= 2 w1 L ll^2", nu0);
    let ln_n_nu0_over_l = ln_n0_over_l + nu0 * LN_2;
    b.param("n_nu0", "2^nu0 n_0", ln_n_nu0_over_l + ll);
    // eps' = eps~ w1 L ll / (2 n_nu) collapses to 2^-(nu+1).
    let ln_eps_prime = -(nu0 + 1.0) * LN_2;
    b.param("eps_prime_nu0", "eps~ w1 L ll / (2 n_nu0)", ln_eps_prime);
    let k_prime_ln = |nu: f64, j: f64| {
        j * LN_10 + 2.0 * (ln_n0_over_l + nu * LN_2) - 4f64.ln() - 2.0 * ln_w1 - 4.0 * ln_ll
    };
    b.param("K_prime_j0_nu0", "10^j n_nu^2 / (4 w1^2 L^2 ll^4) at j = 0, nu = nu0", k_prime_ln(nu0, 0.0));
    let ln_t = ln_w1 + ll + 4.0 * ln_ll;
    b.param("T", "w1 L ll^4", ln_t);

    // w <= ln ln (N + 3)
    let lnln_n3 = match log_n {
        Some(l) => ll + (((-l).exp() * 3.0).ln_1p() / l).ln_1p(),
        None => ll,
    };
    b.row("w_growth", "w <= ln ln (N + 3)", Relation::Le, RowScale::Linear, w, lnln_n3, &[]);

    b.row(
        "eps_tilde_sq_w1_over_32",
        "eps~^2 w1 / 32 > 1",
        Relation::Gt,
        RowScale::Linear,
        eps_t * eps_t * w1 / 32.0,
        1.0,
        &[],
    );

    // min over nu <= nu0 of n_nu eps'^2 / (4 L) is attained at nu0
    b.row(
        "restricted_size_condition",
        "min_nu n_nu eps'^2 / (4 L) >= eps~^2 w1 / 32",
        Relation::Ge,
        RowScale::Ln,
        ln_eps_t + ln_w1 + ln_ll - 16f64.ln() - nu0 * LN_2,
        2.0 * ln_eps_t + ln_w1 - 32f64.ln(),
        &[],
    );

    b.row(
        "top_level_empty",
        "10^j0 > n1_tilde",
        Relation::Gt,
        RowScale::Ln,
        j0 * LN_10,
        ln_n0_tilde + LN_2,
        &[],
    );

    // Both spellings of K' (per unit 10^j), over every nu: the squared size
    // ratio, and the expanded quotient with L^2 cancelled by hand.
    let mut worst = 0.0f64;
    for nu in 0..=(nu0 as i64) {
        let nu = nu as f64;
        let squared_ratio = 2.0 * (ln_eps_t + nu * LN_2 - LN_2 - ln_ll);
        let expanded = 2.0 * (ln_eps_t + ln_w1 + ln_ll + nu * LN_2) - 4f64.ln() - 2.0 * ln_w1 - 4.0 * ln_ll;
        worst = worst.max((squared_ratio - expanded).exp_m1().abs());
    }
    b.row(
        "k_prime_consistency",
        "10^j (n_nu / (2 w1 L ll^2))^2 == 10^j n_nu^2 / (4 w1^2 L^2 ll^4), max relative error",
        Relation::Le,
        RowScale::Linear,
        worst,
        K_PRIME_TOLERANCE,
        &[],
    );

    b.row(
        "eps_prime_k_prime_floor",
        "(eps')^6 K' / 10^j >= eps~^6 ll^-6 / 2^12 at nu0",
        Relation::Ge,
        RowScale::Ln,
        6.0 * ln_eps_prime + k_prime_ln(nu0, 0.0),
        6.0 * ln_eps_t - 6.0 * ln_ll - 12.0 * LN_2,
        &[],
    );

    // Per-(j, nu) exponent, per unit 10^j, divided by L.
    let lhs_count = (2.0 * c).ln() + ln_w1 + 4.0 * ln_ll;
    let ln_m_over_l = ln_w + 10.0 * ln_ll;
    let reduced = RowScale::LnReduced { log_n_power: 1.0 };
    b.row(
        "p_j_nu_exponent_as_stated",
        "2 C w1 L ll^4 < eps^6 ll^-6 m / 2^26",
        Relation::Lt,
        reduced,
        lhs_count,
        6.0 * ln_eps - 6.0 * ln_ll + ln_m_over_l - 26.0 * LN_2,
        &["C"],
    );
    let rhs_recomputed = 6.0 * ln_eps_t - 6.0 * ln_ll + ln_m_over_l - 20.0 * LN_2;
    b.row(
        "p_j_nu_exponent",
        "2 C w1 L ll^4 < eps~^6 ll^-6 m / 2^20",
        Relation::Lt,
        reduced,
        lhs_count,
        rhs_recomputed,
        &["C"],
    );
    b.row(
        "p_j_nu_final",
        "(2C + 1) w1 L ll^4 <= eps~^6 ll^-6 m / 2^20",
        Relation::Le,
        reduced,
        (2.0 * c + 1.0).ln() + ln_w1 + 4.0 * ln_ll,
        rhs_recomputed,
        &["C"],
    );

    b.row(
        "nu_union",
        "ln(nu0 + 1) <= T / 2",
        Relation::Le,
        RowScale::Ln,
        (nu0 + 1.0).ln().ln(),
        ln_t - LN_2,
        &[],
    );

    // -ln sum_{j < j0} exp(-10^j T / 2), divided by T
    let lhs = if ln_t > 700.0 {
        0.5
    } else {
        let t = ln_t.exp();
        let mut rest = 0.0f64;
        let mut j = 1.0;
        while j < j0 {
            let term = (-(10f64.powf(j) - 1.0) * t / 2.0).exp();
            if term < 1e-300 {
                break;
            }
            rest += term;
            j += 1.0;
        }
        0.5 - rest.ln_1p() / t
    };
    b.row(
        "final_sum",
        "-ln sum_{j<j0} exp(-10^j T / 2) >= T / 3, both sides divided by T",
        Relation::Ge,
        RowScale::Linear,
        lhs,
        1.0 / 3.0,
        &[],
    );
}

fn exponent_two(b: &mut Builder, input: &AuditInput, _log_n: Option<f64>, ll: f64, w: f64) {
    let consts = input.constants;
    let eps = input.epsilon.unwrap_or(0.5);
    let ln_eps = eps.ln();
    let ln_ll = ll.ln();
    let ln_w = w.ln();

    b.exact("w", "w", w);
    b.exact("eps", "eps", eps);
    b.param("M", "ll^-1 L^(1/2)", ll / 2.0 - ln_ll);
    b.param("r", "(eps/4) w ll L^(3/2)", (eps / 4.0).ln() + ln_w + ln_ll + 1.5 * ll);
    b.param("size_threshold", "w ll L^(3/2)", ln_w + ln_ll + 1.5 * ll);
    b.param("x_prime", "(eps/2) w ll L^(3/2)", (eps / 2.0).ln() + ln_w + ln_ll + 1.5 * ll);
    let ln_d = (2.0 * consts.c1).ln() + ln_ll + ll / 2.0;
    b.param("d", "2 C1 ll L^(1/2)", ln_d);

    b.row(
        "eps_condition",
        "eps^7 >= 2^25 / (w ll sqrt(L))",
        Relation::Ge,
        RowScale::Ln,
        7.0 * ln_eps,
        25.0 * LN_2 - ln_w - ln_ll - ll / 2.0,
        &[],
    );

    // 2000 L^2 / e^4 < e^2 r M / 40 at e = eps/2, r = (e/4) w ll L^(3/2), divided by L^2
    let ln_e = (eps / 2.0).ln();
    b.row(
        "half_eps_exponent",
        "2000 L^2 / (eps/2)^4 < (eps/2)^2 r M / 40 with r, M at eps/2",
        Relation::Lt,
        RowScale::LnReduced { log_n_power: 2.0 },
        2000f64.ln() - 4.0 * ln_e,
        3.0 * ln_e - 4f64.ln() + ln_w - 40f64.ln(),
        &[],
    );

    // eps^2 |X'| against d^2/eps^4 + d L, divided by L^(3/2)
    let ln_lhs = 3.0 * ln_eps - LN_2 + ln_w + ln_ll;
    let ln_d_sq_term = 2.0 * ((2.0 * consts.c1).ln() + ln_ll) - 4.0 * ln_eps - ll / 2.0;
    let ln_dl_term = (2.0 * consts.c1).ln() + ln_ll;
    b.row(
        "size_beats_dimension",
        "eps^2 |X'| > d^2 / eps^4 + d L",
        Relation::Gt,
        RowScale::LnReduced { log_n_power: 1.5 },
        ln_lhs,
        ln_add(ln_d_sq_term, ln_dl_term),
        &["C1"],
    );

    // 2^19 d^2/eps^4 + d L + ln #blocks + ln C' < eps^2 |X'| / 160, divided by L^(3/2)
    let mut ln_rhs = ln_add(19.0 * LN_2 + ln_d_sq_term, ln_dl_term);
    ln_rhs = ln_add(ln_rhs, (2.5 * ll).ln() - 1.5 * ll);
    if consts.c_prime > 1.0 {
        ln_rhs = ln_add(ln_rhs, consts.c_prime.ln().ln() - 1.5 * ll);
    }
    b.row(
        "restricted_exponent",
        "2^19 d^2 / eps^4 + d L + 2.5 ll + ln C' < eps^2 |X'| / 160",
        Relation::Lt,
        RowScale::LnReduced { log_n_power: 1.5 },
        ln_rhs,
        ln_lhs - 160f64.ln(),
        &["C1", "C'"],
    );

    b.row(
        "upper_size_window",
        "w ll L^(3/2) <= L^(5/2)",
        Relation::Le,
        RowScale::Ln,
        ln_w + ln_ll,
        ll,
        &[],
    );
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdSearch {
    pub mode: CascadeMode,
    /// Least `ln ln N` (at `w = ln ln N`) where every row passes.
    pub log_log_n: f64,
    pub log_n: Option<f64>,
    /// Every grid point above the first passing one also passes.
    pub upward_closed: bool,
    pub grid_points: usize,
    pub ledger: CascadeLedger,
}

/// Searches for the least `ln ln N`, at `w = ln ln N`, where every row of the
/// audit passes: a log-spaced grid first, then bisection inside the first
/// passing cell.
pub fn find_threshold(
    mode: CascadeMode,
    epsilon: Option<f64>,
    constants: CascadeConstants,
) -> Result<ThresholdSearch> {
    let probe = |ll: f64| -> Result<CascadeLedger> {
        cascade_audit(&AuditInput { mode, scale: Scale::LogLogN(ll), w: None, epsilon, constants })
    };
    let lo_u = 1e-3; // ln of a point just above ll = 1
    let hi_u = THRESHOLD_MAX_LOG_LOG_N.ln();
    let grid: Vec<f64> = (0..THRESHOLD_GRID)
        .map(|i| (lo_u + (hi_u - lo_u) * i as f64 / (THRESHOLD_GRID - 1) as f64).exp())
        .collect();
    let passes: Vec<bool> = grid.iter().map(|&ll| probe(ll).map(|l| l.pass)).collect::<Result<_>>()?;
    let first = passes.iter().position(|&p| p).ok_or_else(|| {
        Error::Infeasible(format!(
            "no passing point with ln ln N up to {THRESHOLD_MAX_LOG_LOG_N:e}"
        ))
    })?;
    let upward_closed = passes[first..].iter().all(|&p| p);
    let mut hi = grid[first];
    if first > 0 {
        let mut lo = grid[first - 1];
        for _ in 0..200 {
            let mid = (lo.ln() + (hi.ln() - lo.ln()) / 2.0).exp();
            if mid <= lo || mid >= hi {
                break;
            }
            if probe(mid)?.pass {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    let ledger = probe(hi)?;
    Ok(ThresholdSearch {
        mode,
        log_log_n: hi,
        log_n: ledger.log_n,
        upward_closed,
        grid_points: THRESHOLD_GRID,
        ledger,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn general_at(log_n: f64, w: Option<f64>) -> CascadeLedger {
        let mut input = AuditInput::new(CascadeMode::General, Scale::LogN(log_n));
        input.w = w;
        cascade_audit(&input).unwrap()
    }

    #[test]
    fn desk_scale_point_fails_the_key_row() {
        let l = general_at(230.0, Some(230f64.ln()));
        let row = l.row("eps_tilde_sq_w1_over_32").unwrap();
        assert!(!row.pass);
        assert!((row.lhs - 0.00351).abs() < 0.0001, "{}", row.lhs);
        let eps = l.param("eps").unwrap().value;
        assert!((eps - 0.8779).abs() < 1e-3);
        assert!(!l.pass);
    }

    #[test]
    fn default_w_meets_growth_row_exactly() {
        let l = general_at(230.0, None);
        assert!(l.row("w_growth").unwrap().pass);
        let l = general_at(230.0, Some(10.0));
        assert!(!l.row("w_growth").unwrap().pass);
    }

    #[test]
    fn algebraic_rows_always_pass() {
        for ll in [1.5, 5.44, 40.0, 1e5, 1e100, 1e300] {
            let input = AuditInput::new(CascadeMode::General, Scale::LogLogN(ll));
            let l = cascade_audit(&input).unwrap();
            for name in ["restricted_size_condition", "k_prime_consistency", "eps_prime_k_prime_floor"] {
                assert!(l.row(name).unwrap().pass, "{name} at ll={ll}: {:?}", l.row(name));
            }
        }
    }

    #[test]
    fn final_row_threshold_matches_closed_form() {
        // (2C+1) 2^20 <= eps~^6 w1 = w^(1/26) / 2^12 at C = 1
        let w_star = (3.0f64 * 2f64.powi(32)).powi(26);
        let at = |ll: f64| {
            let l = cascade_audit(&AuditInput::new(CascadeMode::General, Scale::LogLogN(ll))).unwrap();
            l.row("p_j_nu_final").unwrap().pass
        };
        assert!(at(w_star * 1.0001));
        assert!(!at(w_star * 0.9999));
    }

    #[test]
    fn threshold_search_general() {
        let t = find_threshold(CascadeMode::General, None, CascadeConstants::default()).unwrap();
        assert!(t.upward_closed);
        assert!(t.ledger.pass);
        let w_star = (3.0f64 * 2f64.powi(32)).powi(26);
        assert!((t.log_log_n / w_star - 1.0).abs() < 1e-9, "{}", t.log_log_n);
        assert!(t.log_n.is_none());
    }

    #[test]
    fn threshold_search_exponent_two() {
        let t = find_threshold(CascadeMode::ExponentTwo, None, CascadeConstants::default()).unwrap();
        assert!(t.upward_closed && t.ledger.pass);
        let below = cascade_audit(&AuditInput::new(CascadeMode::ExponentTwo, Scale::LogLogN(t.log_log_n * 0.99)))
            .unwrap();
        assert!(!below.pass);
    }

    #[test]
    fn replay_is_identical() {
        let l = general_at(230.0, Some(5.44));
        assert_eq!(cascade_audit(&l.input).unwrap(), l);
        let mut e = AuditInput::new(CascadeMode::ExponentTwo, Scale::LogN(1e4));
        e.epsilon = Some(0.25);
        let l = cascade_audit(&e).unwrap();
        assert_eq!(cascade_audit(&l.input).unwrap(), l);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(cascade_audit(&AuditInput::new(CascadeMode::General, Scale::LogN(2.0))).is_err());
        assert!(cascade_audit(&AuditInput::new(CascadeMode::General, Scale::LogN(230.0)).with_w(0.5)).is_err());
        assert!(cascade_audit(&AuditInput::new(CascadeMode::General, Scale::LogLogN(f64::INFINITY))).is_err());
    }
}
