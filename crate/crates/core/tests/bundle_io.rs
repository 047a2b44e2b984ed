use std::fs;
use std::path::PathBuf;

use hsbench_core::bundle::{
    collect_test_data, compliance, load_bundle, parse_response, synthesize_transcript, validate_bundle, AnswerDist,
    BundleError, CollectError, ConditionSpec, QuestionSpec, StudyBundle, SubStudySpec, SynthSpec, TestData,
};
use hsbench_core::parser::{Direction, StatFamily};
use hsbench_core::stat_tests::{t_test, TMode};
use proptest::prelude::*;
use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn bundle(name: &str) -> StudyBundle {
    load_bundle(&fixtures().join("bundles").join(name)).unwrap()
}

fn two_condition_spec(n: usize, treat_mean: f64, refusal_prob: f64) -> SynthSpec {
    let cond = |label: &str, mean: f64| ConditionSpec {
        label: label.into(),
        n,
        questions: vec![QuestionSpec { key: "Q1".into(), dist: AnswerDist::Normal { mean, sd: 1.0 } }],
    };
    SynthSpec {
        model: None,
        method: None,
        refusal_prob,
        sub_studies: vec![SubStudySpec {
            sub_study_id: "s1".into(),
            group_key: "condition".into(),
            conditions: vec![cond("treatment", treat_mean), cond("control", 0.0)],
        }],
    }
}

#[test]
fn every_shipped_bundle_validates() {
    let dirs: Vec<_> = fs::read_dir(fixtures().join("bundles")).unwrap().map(|e| e.unwrap().path()).collect();
    assert!(dirs.len() >= 4);
    for dir in dirs {
        let b = load_bundle(&dir).unwrap_or_else(|e| panic!("{}: {e}", dir.display()));
        assert!(b.test_count() >= 1);
        let total: f64 = b.findings.iter().map(|f| f.weight).sum();
        assert!((total - 1.0).abs() < 1e-12, "{}: finding weights sum to {total}", dir.display());
    }
}

#[test]
fn example_record_loads_as_one_t_test() {
    let b = bundle("example_d2");
    assert_eq!(b.findings.len(), 1);
    assert_eq!(b.findings[0].weight, 1.0);
    let tests = &b.findings[0].tests;
    assert_eq!(tests.len(), 1);
    let spec = tests[0].human.as_ref().unwrap();
    let stat = spec.statistic.as_ref().unwrap();
    assert_eq!((stat.family, stat.value, stat.dfs.clone()), (StatFamily::T, 4.5, vec![98.0]));
    assert_eq!(spec.groups.len(), 2);
    assert_eq!(spec.direction, Direction::Positive);
    assert_eq!(spec.sample_n, Some(100));
    assert_eq!(spec.total_n(), Some(100));
}

#[test]
fn each_mutant_has_exactly_one_violation() {
    let mut dirs: Vec<_> = fs::read_dir(fixtures().join("mutants")).unwrap().map(|e| e.unwrap().path()).collect();
    dirs.sort();
    assert!(dirs.len() >= 15);
    for dir in dirs {
        match load_bundle(&dir) {
            Err(BundleError::Schema(v)) => assert_eq!(v.len(), 1, "{}: {v:?}", dir.display()),
            other => panic!("{} was not rejected: {other:?}", dir.display()),
        }
    }
}

#[test]
fn default_finding_weight_is_one_over_count() {
    let gt: Value = serde_json::from_str(&fs::read_to_string(fixtures().join("bundles/mixed_families/ground_truth.json")).unwrap()).unwrap();
    let mut meta: Value =
        serde_json::from_str(&fs::read_to_string(fixtures().join("bundles/mixed_families/metadata.json")).unwrap()).unwrap();
    for f in meta["findings"].as_array_mut().unwrap() {
        f.as_object_mut().unwrap().remove("weight");
    }
    let b = validate_bundle(&gt, &meta).unwrap();
    assert!(b.findings.iter().all(|f| f.weight == 0.25));
}

#[test]
fn violations_are_collected_not_short_circuited() {
    let gt: Value = serde_json::from_str(&fs::read_to_string(fixtures().join("bundles/synthetic_two_group/ground_truth.json")).unwrap()).unwrap();
    let mut meta: Value =
        serde_json::from_str(&fs::read_to_string(fixtures().join("bundles/synthetic_two_group/metadata.json")).unwrap()).unwrap();
    meta["domain"] = Value::from("astrology");
    meta["findings"][0]["weight"] = Value::from(-2.0);
    let v = validate_bundle(&gt, &meta).unwrap_err();
    assert_eq!(v.len(), 2);
    assert!(v.iter().any(|x| x.path == "metadata.domain"));
    assert!(v.iter().any(|x| x.path == "metadata.findings[0].weight"));
}

#[test]
fn ten_participants_two_conditions() {
    let b = bundle("synthetic_two_group");
    let t = synthesize_transcript(&two_condition_spec(5, 0.8, 0.0), 1).unwrap();
    let binding = &b.findings[0].tests[0].binding;
    let (data, report) = collect_test_data(&t, binding, &b).unwrap();
    let TestData::Groups { groups } = data else { panic!("expected groups") };
    assert_eq!(groups.iter().map(|g| g.len()).collect::<Vec<_>>(), vec![5, 5]);
    assert_eq!(report.refusal_rate, 0.0);

    let mut t = t;
    t.individual_data[3].responses[0].response_text.clear();
    let (data, report) = collect_test_data(&t, binding, &b).unwrap();
    let TestData::Groups { groups } = data else { panic!("expected groups") };
    assert_eq!(groups.iter().map(|g| g.len()).sum::<usize>(), 9);
    assert!((report.refusal_rate - 0.1).abs() < 1e-15);
    assert_eq!(report.compliant_trials + report.non_compliant_trials, report.total_trials);
}

#[test]
fn binding_mismatches() {
    let b = bundle("synthetic_two_group");
    let t = synthesize_transcript(&two_condition_spec(5, 0.8, 0.0), 1).unwrap();
    let mut binding = b.findings[0].tests[0].binding.clone();
    binding.sub_study_id = "nope".into();
    assert!(matches!(collect_test_data(&t, &binding, &b), Err(CollectError::BindingMismatch(_))));
    let mut binding = b.findings[0].tests[0].binding.clone();
    binding.group_by = Some("arm".into());
    assert!(matches!(collect_test_data(&t, &binding, &b), Err(CollectError::BindingMismatch(_))));
}

#[test]
fn empty_transcript_refuses_everything() {
    let b = bundle("synthetic_two_group");
    let mut t = synthesize_transcript(&two_condition_spec(5, 0.8, 0.0), 1).unwrap();
    t.individual_data.clear();
    assert_eq!(compliance(&t, &b).refusal_rate, 1.0);
}

#[test]
fn full_refusal() {
    let b = bundle("synthetic_two_group");
    let t = synthesize_transcript(&two_condition_spec(20, 0.8, 1.0), 9).unwrap();
    assert!(t.individual_data.iter().all(|p| parse_response(&p.responses[0].response_text).is_empty()));
    assert_eq!(compliance(&t, &b).refusal_rate, 1.0);
}

#[test]
fn synthesis_is_deterministic() {
    let spec = two_condition_spec(50, 0.8, 0.1);
    let a = serde_json::to_vec(&synthesize_transcript(&spec, 77).unwrap()).unwrap();
    let b = serde_json::to_vec(&synthesize_transcript(&spec, 77).unwrap()).unwrap();
    let c = serde_json::to_vec(&synthesize_transcript(&spec, 78).unwrap()).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn synthesized_effect_size_is_near_target() {
    // sampling SD of d at n = 100 per group is about 0.145, so ±0.3 is ~2 SD
    let b = bundle("synthetic_two_group");
    let t = synthesize_transcript(&two_condition_spec(100, 0.8, 0.0), 2024).unwrap();
    let (data, _) = collect_test_data(&t, &b.findings[0].tests[0].binding, &b).unwrap();
    let TestData::Groups { groups } = data else { panic!("expected groups") };
    let out = t_test(&groups[0], Some(&groups[1]), TMode::IndependentPooled, 0.0).unwrap();
    let d = out.value * (2.0f64 / 100.0).sqrt();
    assert!((d - 0.8).abs() < 0.3, "d = {d}");
}

#[test]
fn mixed_bundle_collects_every_shape() {
    let b = bundle("mixed_families");
    let spec: SynthSpec = serde_json::from_str(&fs::read_to_string(fixtures().join("synth/mixed_families.json")).unwrap()).unwrap();
    let t = synthesize_transcript(&spec, 5).unwrap();
    for f in &b.findings {
        for test in &f.tests {
            let (data, report) = collect_test_data(&t, &test.binding, &b).unwrap();
            assert!(report.total_trials > 0);
            match data {
                TestData::Table { counts, columns, .. } => {
                    assert_eq!(columns[0], "yes");
                    assert_eq!(counts.len(), 2);
                }
                TestData::Groups { groups } => assert!(groups.iter().all(|g| !g.is_empty())),
                TestData::Pairs { first, second } => assert_eq!(first.len(), second.len()),
                TestData::Single { sample } => assert!(!sample.is_empty()),
                TestData::Successes { k, n } => assert!(k <= n && n > 0),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn synthesized_answers_round_trip(seed in any::<u64>(), mean in -1e4..1e4f64, sd in 0.01..100.0f64) {
        let spec = SynthSpec {
            model: None,
            method: None,
            refusal_prob: 0.0,
            sub_studies: vec![SubStudySpec {
                sub_study_id: "s1".into(),
                group_key: "condition".into(),
                conditions: vec![ConditionSpec {
                    label: "only".into(),
                    n: 3,
                    questions: vec![
                        QuestionSpec { key: "Q1".into(), dist: AnswerDist::Normal { mean, sd } },
                        QuestionSpec { key: "Q2.1".into(), dist: AnswerDist::Choice { options: vec!["A".into(), "B".into()], probs: vec![0.5, 0.5] } },
                    ],
                }],
            }],
        };
        let t = synthesize_transcript(&spec, seed).unwrap();
        for p in &t.individual_data {
            let text = &p.responses[0].response_text;
            let parsed = parse_response(text);
            let rebuilt: Vec<String> = ["Q1", "Q2.1"].iter().map(|k| format!("{k}={}", parsed[*k])).collect();
            prop_assert_eq!(rebuilt.join(", "), text.clone());
        }
    }
}
