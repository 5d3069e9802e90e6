//! Instances on which R4 creates dummy goods. They are rare in uniform random
//! tables, so a fixed seed range is swept and every hit is checked in full.

use mmsfair::bagfill::check_trace;
use mmsfair::harness::{gen_random, verify, GeneratorKind, GeneratorSpec};
use mmsfair::oracle::Oracle;
use mmsfair::pipeline::{alpha_for, approx_mms_traced, AlphaMode};
use mmsfair::transforms::{check_irreducible, check_normalized, Rule};
use mmsfair::Value;

#[test]
fn dummy_goods_respect_their_bound() {
    let oracle = Oracle::default();
    let mut hits = 0;
    for seed in 0..400u64 {
        let spec = GeneratorSpec {
            kind: GeneratorKind::UniformInt,
            n: 3,
            m: 7 + (seed as usize % 6),
            value_bound: 100,
            seed,
        };
        let inst = gen_random(&spec).unwrap();
        let choice = alpha_for(3, &AlphaMode::Improved).unwrap();
        let (report, trace) = approx_mms_traced(&oracle, &inst, &choice).unwrap();
        let created: Vec<_> = trace.log.records.iter().filter(|r| r.dummy_created.is_some()).collect();
        if created.is_empty() {
            continue;
        }
        hits += 1;
        for r in &created {
            assert_eq!(r.rule, Rule::R4, "seed {seed}");
            for dv in &r.dummy_created.as_ref().unwrap().values {
                assert!(!dv.value.is_negative());
            }
        }
        let verdict = verify(&oracle, &inst, &report.allocation, &choice.alpha, None).unwrap();
        assert!(verdict.pass, "seed {seed}: {verdict:?}");

        if let Some(stages) = &trace.stages {
            let ones = vec![Value::one(); stages.oni.n()];
            assert!(check_irreducible(&stages.oni, &choice.alpha, &ones).unwrap().is_empty());
            let v = check_normalized(&stages.oni, &choice.alpha);
            assert!(v.is_empty(), "seed {seed}: {v:?}");
            assert!(check_trace(&stages.oni, &choice.alpha, &stages.bag_fill.trace).is_empty());
        }
    }
    assert!(hits >= 5, "only {hits} instances with dummy goods");
}

#[test]
fn classic_alpha_never_creates_dummies() {
    let oracle = Oracle::default();
    for seed in 0..150u64 {
        let spec = GeneratorSpec {
            kind: GeneratorKind::UniformInt,
            n: 3,
            m: 7 + (seed as usize % 6),
            value_bound: 100,
            seed,
        };
        let inst = gen_random(&spec).unwrap();
        let choice = alpha_for(3, &AlphaMode::Classic).unwrap();
        let (report, trace) = approx_mms_traced(&oracle, &inst, &choice).unwrap();
        assert!(trace.log.records.iter().all(|r| r.dummy_created.is_none()));
        assert!(report.score.unwrap() >= Value::ratio(3, 4));
    }
}
