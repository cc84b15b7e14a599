mod common;

use cayley_core::harness::{run, ExperimentConfig, ExperimentKind, ExperimentResult};
use common::*;

fn strip_timing(mut v: serde_json::Value) -> serde_json::Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

fn report_json(config: &ExperimentConfig) -> serde_json::Value {
    strip_timing(serde_json::to_value(run(config).unwrap()).unwrap())
}

fn small_configs() -> Vec<ExperimentConfig> {
    let mut lemma10 = ExperimentConfig::new(group("f2^6"), ExperimentKind::Lemma10);
    lemma10.trials = 2000;
    lemma10.sizes = vec![8];
    let mut tail = ExperimentConfig::new(group("f2^8"), ExperimentKind::SigmaTail);
    tail.trials = 300;
    tail.sizes = vec![4, 16, 64];
    let mut restriction = ExperimentConfig::new(group("z64"), ExperimentKind::Restriction);
    restriction.trials = 50;
    let mut worst = ExperimentConfig::new(group("f2^3"), ExperimentKind::WorstCase);
    worst.sizes = vec![4];
    vec![lemma10, tail, restriction, worst]
}

#[test]
fn same_seed_same_report() {
    for mut c in small_configs() {
        c.seed = 11;
        assert_eq!(report_json(&c), report_json(&c), "{:?}", c.kind);
    }
}

#[test]
fn thread_count_does_not_matter() {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    for c in small_configs() {
        let one = single.install(|| report_json(&c));
        assert_eq!(one, report_json(&c), "{:?}", c.kind);
    }
}

#[test]
fn different_seeds_differ() {
    let c = &small_configs()[1];
    let mut d = c.clone();
    d.seed = c.seed + 1;
    assert_ne!(report_json(c), report_json(&d));
}

#[test]
fn reports_echo_seed_and_intervals() {
    let mut c = small_configs().remove(0);
    c.seed = 99;
    let r = run(&c).unwrap();
    assert_eq!(r.seed, 99);
    let ExperimentResult::Lemma10(l) = r.result else { panic!("wrong result kind") };
    for arm in &l.arms {
        let p = arm.event;
        assert!((0.0..=1.0).contains(&p.frequency));
        assert!(p.interval.0 <= p.frequency && p.frequency <= p.interval.1);
        assert_eq!(p.trials, c.trials);
    }
}

#[test]
fn sigma_tail_shrinks_with_size() {
    let mut c = ExperimentConfig::new(group("f2^10"), ExperimentKind::SigmaTail);
    c.trials = 2000;
    c.sizes = vec![4, 64];
    let ExperimentResult::SigmaTail(t) = run(&c).unwrap().result else { panic!("wrong result kind") };
    assert!(t.tiers[1].median_abs_sigma < t.tiers[0].median_abs_sigma);
}

#[test]
fn full_group_worst_case_floor() {
    let mut c = ExperimentConfig::new(group("z4"), ExperimentKind::WorstCase);
    c.a = Some(set(&c.group, &[0, 1]));
    let ExperimentResult::WorstCase(w) = run(&c).unwrap().result else { panic!("wrong result kind") };
    assert_eq!(w.max_abs_sigma, cayley_core::rational::ratio(1, 2));
    assert!(w.witness_recomputed);
}
