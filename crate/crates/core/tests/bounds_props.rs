mod common;

use cayley_core::bounds::{
    cascade_audit, cor11_cor12_bounds, find_threshold, hoeffding_tail, lemma10_bound, lemma6_bound_ln, prop16_bound,
    prop16_composed_exponent, AuditInput, CascadeConstants, CascadeMode, Scale,
};
use cayley_core::dissociation::count_low_dim_sets;
use common::*;
use proptest::prelude::*;

proptest! {
    #[test]
    fn lemma6_chain_when_n_is_large(log_n in 0.7f64..40.0, extra in 0.0f64..50.0, d in 0.0f64..20.0) {
        let n = 2.0 * log_n + extra;
        let b = lemma6_bound_ln(log_n, n, d);
        prop_assert!(b.precondition_ok);
        prop_assert!(b.chain_holds);
    }

    #[test]
    fn prop16_composition(eps in 1e-3f64..0.5, m in 1.0f64..1e6, k in 1.0f64..1e6, n in 1.0f64..1e6) {
        let direct = prop16_bound(eps, m, k).unwrap().ln;
        let composed = prop16_composed_exponent(eps, m, k, n);
        prop_assert!(((direct - composed) / direct).abs() < 1e-12);
    }

    #[test]
    fn lemma10_is_hoeffding_style(eps in 1e-3f64..0.5, k in 1u64..50, n in 1u64..1000) {
        let b = lemma10_bound(eps, k, n).unwrap();
        prop_assert!((b.ln + eps * eps * (k * n) as f64 / 2.0).abs() < 1e-9 * (1.0 + b.ln.abs()));
        prop_assert!(b.value <= 1.0);
    }

    #[test]
    fn hoeffding_is_a_probability(lambda in 0.0f64..100.0, count in 1u64..10_000) {
        let p = hoeffding_tail(lambda, count).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn audit_replays_bit_identically(log_n in 3.0f64..1e6, w in 1.01f64..100.0) {
        let input = AuditInput::new(CascadeMode::General, Scale::LogN(log_n)).with_w(w);
        let first = cascade_audit(&input).unwrap();
        let again = cascade_audit(&first.input).unwrap();
        prop_assert_eq!(first, again);
    }
}

#[test]
fn union_bounds_monotone_in_k() {
    let a = cor11_cor12_bounds(230.0, 0.25, 20_000, 10).unwrap();
    let b = cor11_cor12_bounds(230.0, 0.25, 20_000, 20).unwrap();
    assert!(b.cor11.ln < a.cor11.ln && a.threshold_ok);
    assert!(b.cor12.ln < a.cor12.ln);
}

#[test]
fn low_dim_count_in_f2_3() {
    let c = count_low_dim_sets(&group("f2^3"), 5, 1).unwrap();
    assert_eq!(c.exact, Some(15));
    assert!(c.within_bound);
}

#[test]
fn small_n_audit_flags_linear_row() {
    let ll = 230f64.ln();
    let input = AuditInput::new(CascadeMode::General, Scale::LogN(230.0)).with_w(ll);
    let ledger = cascade_audit(&input).unwrap();
    let row = ledger.row("eps_tilde_sq_w1_over_32").unwrap();
    assert!(!row.pass);
    assert!((row.lhs - 0.0035).abs() < 0.00035);
    assert!(!ledger.pass);
}

#[test]
fn thresholds_pass_everywhere_above() {
    for mode in [CascadeMode::General, CascadeMode::ExponentTwo] {
        let t = find_threshold(mode, None, CascadeConstants::default()).unwrap();
        assert!(t.ledger.pass, "{mode:?}: {:?}", t.ledger.failing_rows().map(|r| &r.name).collect::<Vec<_>>());
        for factor in [1.5, 10.0, 1e6] {
            let input = AuditInput::new(mode, Scale::LogLogN(t.log_log_n * factor));
            if let Ok(l) = cascade_audit(&input) {
                assert!(l.pass, "{mode:?} at {factor}x");
            }
        }
    }
}
