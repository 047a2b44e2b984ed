//! End-to-end evaluation of one transcript against one study bundle, plus
//! leaderboards, participant bootstrap and prior sensitivity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aggregate::{
    benchmark_pas, global_validity, propagate_total_se, resample_se, sensitivity_sweep, AggregateError, BootstrapSe,
    FindingNode, GlobalValidity, ScoreTree, SensitivityReport, StudyNode, TestLeaf, ValidityFinding, ValidityStudy,
    DEFAULT_EPSILON,
};
use crate::alignment::{ecs_finding, ecs_global, pas_directional, pas_test, Concordance, EffectPair};
use crate::bundle::{
    collect_test_data, compliance, AgentTranscript, BoundTest, ComplianceReport, Domain, StudyBundle, TestData, TestKind,
};
use crate::effect_size::{cohen_d, EffectSize, StatView};
use crate::evidence::{
    bayes_factor, directional_posterior, posterior, statistic_from_p, DirectionalPosterior, HumanEvidence, Posterior,
    PriorSpec,
};
use crate::parser::{Direction, StatFamily, TestSpec};
use crate::stat_tests::{anova_oneway, binomial_test, chi_square, pearson, t_test, Design, TMode, TestOutcome};

pub const REPORT_SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, Error)]
pub enum DriverError {
    #[error("invalid priors: {0}")]
    InvalidPriors(String),
    #[error("aggregation failed: {0}")]
    Aggregate(#[from] AggregateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub epsilon: f64,
    /// Also report PAS divided by the human self-agreement ceiling.
    pub normalize: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { epsilon: DEFAULT_EPSILON, normalize: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Human,
    Collection,
    Test,
    Evidence,
    Effect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub finding_id: String,
    pub test: String,
    pub stage: Stage,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafReport {
    pub finding_id: String,
    pub test: String,
    pub weight: f64,
    pub family: TestKind,
    pub pi_human: f64,
    pub pi_agent: f64,
    pub direction_human: Direction,
    pub direction_agent: Direction,
    pub directional: bool,
    pub score: f64,
    pub log_bf_human: f64,
    pub log_bf_agent: f64,
    pub n_human: u64,
    pub n_agent: u64,
    pub agent_statistic: f64,
    pub agent_p: f64,
    pub effect_human: Option<EffectSize>,
    pub effect_agent: Option<EffectSize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FindingEcs {
    pub finding_id: String,
    pub pairs: usize,
    pub ecs: Option<Concordance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportPair {
    pub finding_id: String,
    pub test: String,
    pub pair: EffectPair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub schema_version: String,
    pub study_id: String,
    pub domain: Domain,
    pub model: String,
    pub method: String,
    pub priors: PriorSpec,
    pub epsilon: f64,
    /// Study PAS; `None` when no test could be scored.
    pub pas: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized_pas: Option<f64>,
    pub tree: ScoreTree,
    pub leaves: Vec<LeafReport>,
    pub exclusions: Vec<Exclusion>,
    /// Scored tests whose effect size could not be formed (kept out of ECS).
    pub effect_exclusions: Vec<Exclusion>,
    pub ecs_global: Option<Concordance>,
    pub ecs_findings: Vec<FindingEcs>,
    pub validity: GlobalValidity,
    pub compliance: ComplianceReport,
    pub domain_scores: BTreeMap<String, Option<f64>>,
    pub effect_pairs: Vec<ReportPair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bootstrap_se: Option<f64>,
    pub warnings: Vec<String>,
}

impl EvaluationReport {
    pub fn test_count(&self) -> usize {
        self.leaves.len() + self.exclusions.len()
    }
}

fn split(n: u64) -> Design {
    Design::Independent { n1: n / 2, n2: n - n / 2 }
}

fn default_family(kind: TestKind) -> StatFamily {
    match kind {
        TestKind::TIndependent | TestKind::TPaired | TestKind::TOneSample => StatFamily::T,
        TestKind::Anova => StatFamily::F,
        TestKind::Pearson => StatFamily::R,
        TestKind::ChiSquare => StatFamily::ChiSquare,
        TestKind::Binomial => StatFamily::BinomialProp,
    }
}

/// Error df implied by a reported statistic, if it carries one.
fn error_df(spec: &TestSpec) -> Option<f64> {
    let s = spec.statistic.as_ref()?;
    match s.family {
        StatFamily::T | StatFamily::R => s.dfs.first().copied(),
        StatFamily::F => s.dfs.get(1).copied(),
        _ => None,
    }
}

/// Sample design of the human study, from group summaries, degrees of
/// freedom or a total N (in that order of preference).
pub fn human_design(spec: &TestSpec, kind: TestKind, groups_hint: usize) -> Result<Design, String> {
    let sized: Vec<u64> = spec.groups.iter().filter_map(|g| g.n).collect();
    let all_sized = !spec.groups.is_empty() && sized.len() == spec.groups.len();
    let df = error_df(spec).filter(|d| *d > 0.0 && d.fract() == 0.0).map(|d| d as u64);
    let total = spec.total_n();
    let none = || format!("no sample size for {}", spec.key());
    match kind {
        TestKind::TIndependent => {
            if all_sized && sized.len() == 2 {
                Ok(Design::Independent { n1: sized[0], n2: sized[1] })
            } else if let Some(df) = df {
                Ok(split(df + 2))
            } else {
                total.map(split).ok_or_else(none)
            }
        }
        TestKind::TPaired | TestKind::TOneSample => {
            let n = df
                .map(|d| d + 1)
                .or(spec.statistic.as_ref().and_then(|s| s.n_total))
                .or(spec.sample_n)
                .or(spec.groups.first().and_then(|g| g.n))
                .ok_or_else(none)?;
            Ok(if kind == TestKind::TPaired { Design::Paired { n } } else { Design::OneSample { n } })
        }
        TestKind::Anova => {
            if all_sized && sized.len() >= 2 {
                return Ok(Design::Groups { sizes: sized });
            }
            let stat_dfs = spec.statistic.as_ref().filter(|s| s.family == StatFamily::F).map(|s| s.dfs.clone());
            let (k, n) = match stat_dfs.as_deref() {
                Some([df1, df2]) => ((*df1 as u64) + 1, (df1 + df2) as u64 + 1),
                _ => (groups_hint.max(2) as u64, total.ok_or_else(none)?),
            };
            let base = n / k;
            let sizes = (0..k).map(|i| base + u64::from(i < n % k)).collect();
            Ok(Design::Groups { sizes })
        }
        TestKind::Pearson => {
            let n = df.map(|d| d + 2).or(total).ok_or_else(none)?;
            Ok(Design::Correlation { n })
        }
        TestKind::ChiSquare => {
            let full = spec.groups.len() >= 2 && spec.groups.iter().all(|g| g.n.is_some() && g.count.is_some());
            if full {
                let counts = spec
                    .groups
                    .iter()
                    .map(|g| {
                        let (c, n) = (g.count.unwrap_or(0), g.n.unwrap_or(0));
                        vec![c as f64, (n - c) as f64]
                    })
                    .collect();
                Ok(Design::Table { counts })
            } else {
                total.map(split).ok_or_else(none)
            }
        }
        TestKind::Binomial => {
            let g = spec.groups.first();
            let n = g.and_then(|g| g.n).or(total).ok_or_else(none)?;
            let k = match g.and_then(|g| g.count) {
                Some(k) => k,
                None => match &spec.statistic {
                    Some(s) if s.family == StatFamily::BinomialProp => (s.value * n as f64).round() as u64,
                    _ => return Err(format!("no success count for {}", spec.key())),
                },
            };
            Ok(Design::Binomial { k, n, p0: spec.p0.unwrap_or(0.5) })
        }
    }
}

/// Everything about one test that does not depend on the agent.
#[derive(Debug, Clone)]
struct HumanSide {
    pi: Posterior,
    log_bf: f64,
    direction: Direction,
    n: u64,
    effect: Result<EffectSize, String>,
}

fn human_side(test: &BoundTest, priors: &PriorSpec) -> Result<HumanSide, Exclusion> {
    let exclude = |reason: String| Exclusion {
        finding_id: test.finding_id.clone(),
        test: test.key().to_string(),
        stage: Stage::Human,
        reason,
    };
    let spec = test.human.as_ref().map_err(|e| exclude(e.clone()))?;
    let mut spec = spec.clone();
    if spec.p0.is_none() {
        spec.p0 = test.binding.p0;
    }
    let hint = test.binding.groups.as_ref().map_or(2, Vec::len);
    let design = human_design(&spec, test.binding.family, hint).map_err(exclude)?;
    let family = spec.statistic.as_ref().map_or(default_family(test.binding.family), |s| s.family);
    let source = HumanEvidence { spec: &spec, family, design: &design };
    let bf = bayes_factor(&source, priors, Some(&design)).map_err(|e| exclude(e.to_string()))?;
    let effect = match &spec.statistic {
        Some(stat) => cohen_d(StatView::reported(stat, spec.direction), &design).map_err(|e| e.to_string()),
        None => match spec.p.as_ref().map(|p| statistic_from_p(p, family, &design)) {
            Some(Ok((value, dfs))) => {
                cohen_d(StatView { family, value, dfs: &dfs, direction: spec.direction }, &design).map_err(|e| e.to_string())
            }
            Some(Err(e)) => Err(e.to_string()),
            None => Err("no statistic to convert".into()),
        },
    };
    Ok(HumanSide { pi: posterior(&bf), log_bf: bf.log_bf10, direction: spec.direction, n: design.total_n(), effect })
}

fn run_test(kind: TestKind, data: &TestData, mu0: f64, p0: f64) -> Result<TestOutcome, String> {
    let out = match (kind, data) {
        (TestKind::TIndependent, TestData::Groups { groups }) => match groups.as_slice() {
            [a, b] => t_test(a, Some(b), TMode::IndependentPooled, 0.0),
            other => return Err(format!("t_independent needs 2 groups, found {}", other.len())),
        },
        (TestKind::Anova, TestData::Groups { groups }) => anova_oneway(groups),
        (TestKind::TPaired, TestData::Pairs { first, second }) => t_test(first, Some(second), TMode::Paired, 0.0),
        (TestKind::Pearson, TestData::Pairs { first, second }) => pearson(first, second),
        (TestKind::TOneSample, TestData::Single { sample }) => t_test(sample, None, TMode::OneSample, mu0),
        (TestKind::ChiSquare, TestData::Table { counts, .. }) => chi_square(counts),
        (TestKind::Binomial, TestData::Successes { k, n }) => binomial_test(*k, *n, p0),
        (kind, _) => return Err(format!("collected data does not fit {kind:?}")),
    };
    out.map_err(|e| e.to_string())
}

fn dot(h: DirectionalPosterior, a: DirectionalPosterior) -> f64 {
    pas_directional(h, a).value
}

struct Scored {
    leaves: Vec<LeafReport>,
    exclusions: Vec<Exclusion>,
    effect_exclusions: Vec<Exclusion>,
    /// Human self-agreement per scored leaf, aligned with `leaves`.
    ceilings: Vec<f64>,
}

fn score_tests(
    bundle: &StudyBundle,
    transcript: &AgentTranscript,
    priors: &PriorSpec,
    humans: &[Result<HumanSide, Exclusion>],
) -> Scored {
    let mut out = Scored { leaves: Vec::new(), exclusions: Vec::new(), effect_exclusions: Vec::new(), ceilings: Vec::new() };
    let tests = bundle.findings.iter().flat_map(|f| f.tests.iter());
    for (test, human) in tests.zip(humans) {
        let exclude = |stage: Stage, reason: String| Exclusion {
            finding_id: test.finding_id.clone(),
            test: test.key().to_string(),
            stage,
            reason,
        };
        let human = match human {
            Ok(h) => h,
            Err(e) => {
                out.exclusions.push(e.clone());
                continue;
            }
        };
        let b = &test.binding;
        let data = match collect_test_data(transcript, b, bundle) {
            Ok((data, _)) => data,
            Err(e) => {
                out.exclusions.push(exclude(Stage::Collection, e.to_string()));
                continue;
            }
        };
        let p0 = b.p0.or(test.human.as_ref().ok().and_then(|s| s.p0)).unwrap_or(0.5);
        let outcome = match run_test(b.family, &data, b.mu0.unwrap_or(0.0), p0) {
            Ok(o) => o,
            Err(e) => {
                out.exclusions.push(exclude(Stage::Test, e));
                continue;
            }
        };
        let bf = match bayes_factor(&outcome, priors, None) {
            Ok(bf) => bf,
            Err(e) => {
                out.exclusions.push(exclude(Stage::Evidence, e.to_string()));
                continue;
            }
        };
        let pi_a = posterior(&bf);
        let directional = human.direction != Direction::None;
        let (score, ceiling) = if directional {
            let h = directional_posterior(human.pi, human.direction);
            let a = directional_posterior(pi_a, outcome.direction);
            (dot(h, a), dot(h, h))
        } else {
            (pas_test(human.pi, pi_a).value, pas_test(human.pi, human.pi).value)
        };
        let effect_agent = cohen_d(StatView::from(&outcome), &outcome.design).map_err(|e| e.to_string());
        match (&human.effect, &effect_agent) {
            (Err(e), _) => out.effect_exclusions.push(exclude(Stage::Effect, format!("human: {e}"))),
            (_, Err(e)) => out.effect_exclusions.push(exclude(Stage::Effect, format!("agent: {e}"))),
            (Ok(h), Ok(a)) if !(h.d.is_finite() && a.d.is_finite() && h.se.is_finite() && a.se.is_finite()) => {
                out.effect_exclusions.push(exclude(Stage::Effect, "non-finite effect size or standard error".into()))
            }
            _ => {}
        }
        out.ceilings.push(ceiling);
        out.leaves.push(LeafReport {
            finding_id: test.finding_id.clone(),
            test: test.key().to_string(),
            weight: test.weight,
            family: b.family,
            pi_human: human.pi.pi,
            pi_agent: pi_a.pi,
            direction_human: human.direction,
            direction_agent: outcome.direction,
            directional,
            score,
            log_bf_human: human.log_bf,
            log_bf_agent: bf.log_bf10,
            n_human: human.n,
            n_agent: outcome.n_total(),
            agent_statistic: outcome.value,
            agent_p: outcome.p_two_sided,
            effect_human: human.effect.clone().ok(),
            effect_agent: effect_agent.ok(),
        });
    }
    out
}

fn study_tree(bundle: &StudyBundle, leaves: &[LeafReport], score: impl Fn(usize) -> f64) -> ScoreTree {
    let findings = bundle
        .findings
        .iter()
        .map(|f| FindingNode {
            finding_id: f.finding_id.clone(),
            weight: f.weight,
            tests: f
                .tests
                .iter()
                .map(|t| {
                    let idx = leaves.iter().position(|l| l.finding_id == f.finding_id && l.test == t.key());
                    TestLeaf { key: t.key().to_string(), score: idx.map(&score), weight: t.weight }
                })
                .collect(),
            score: None,
        })
        .collect();
    ScoreTree {
        studies: vec![StudyNode {
            study_id: bundle.study_id.clone(),
            domain: Some(bundle.domain.as_str().to_string()),
            findings,
            score: None,
        }],
        benchmark: None,
    }
}

fn human_sides(bundle: &StudyBundle, priors: &PriorSpec) -> Vec<Result<HumanSide, Exclusion>> {
    bundle.findings.iter().flat_map(|f| f.tests.iter()).map(|t| human_side(t, priors)).collect()
}

fn study_pas(
    bundle: &StudyBundle,
    transcript: &AgentTranscript,
    priors: &PriorSpec,
    humans: &[Result<HumanSide, Exclusion>],
    epsilon: f64,
) -> Option<f64> {
    let scored = score_tests(bundle, transcript, priors, humans);
    let tree = study_tree(bundle, &scored.leaves, |i| scored.leaves[i].score);
    benchmark_pas(&tree, epsilon).ok().and_then(|t| t.benchmark)
}

/// Score one transcript against one bundle. Module failures become entries
/// in the exclusion ledgers; only invalid priors or options abort.
pub fn evaluate(
    bundle: &StudyBundle,
    transcript: &AgentTranscript,
    priors: &PriorSpec,
    options: &EvalOptions,
) -> Result<EvaluationReport, DriverError> {
    priors.validate().map_err(|e| DriverError::InvalidPriors(e.to_string()))?;
    if !(options.epsilon > 0.0 && options.epsilon < 0.5) {
        return Err(AggregateError::InvalidArgument(format!("epsilon {} outside (0, 0.5)", options.epsilon)).into());
    }
    let humans = human_sides(bundle, priors);
    let scored = score_tests(bundle, transcript, priors, &humans);
    let tree = benchmark_pas(&study_tree(bundle, &scored.leaves, |i| scored.leaves[i].score), options.epsilon)?;
    let pas = tree.benchmark;
    let normalized_pas = if options.normalize {
        let ceiling = benchmark_pas(&study_tree(bundle, &scored.leaves, |i| scored.ceilings[i]), options.epsilon)?;
        match (pas, ceiling.benchmark) {
            (Some(p), Some(c)) if c > 0.0 => Some(p / c),
            _ => None,
        }
    } else {
        None
    };

    // effect pairs, weighted finding weight / pairs in finding
    let mut effect_pairs = Vec::new();
    let mut ecs_findings = Vec::new();
    let mut validity_findings = Vec::new();
    for f in &bundle.findings {
        let pairs: Vec<(&LeafReport, EffectSize, EffectSize)> = scored
            .leaves
            .iter()
            .filter(|l| l.finding_id == f.finding_id)
            .filter(|l| !scored.effect_exclusions.iter().any(|e| e.finding_id == l.finding_id && e.test == l.test))
            .filter_map(|l| Some((l, l.effect_human.clone()?, l.effect_agent.clone()?)))
            .collect();
        let m = pairs.len();
        let h: Vec<f64> = pairs.iter().map(|p| p.1.d).collect();
        let a: Vec<f64> = pairs.iter().map(|p| p.2.d).collect();
        ecs_findings.push(FindingEcs { finding_id: f.finding_id.clone(), pairs: m, ecs: ecs_finding(&h, &a).ok() });
        let weighted: Vec<EffectPair> = pairs
            .iter()
            .map(|(_, h, a)| EffectPair { human: h.clone(), agent: a.clone(), weight: f.weight / m as f64 })
            .collect();
        for ((l, _, _), pair) in pairs.iter().zip(&weighted) {
            effect_pairs.push(ReportPair { finding_id: f.finding_id.clone(), test: l.test.clone(), pair: pair.clone() });
        }
        validity_findings.push(ValidityFinding { finding_id: f.finding_id.clone(), pairs: weighted });
    }
    let all_pairs: Vec<EffectPair> = effect_pairs.iter().map(|p| p.pair.clone()).collect();
    let ecs_global = ecs_global(&all_pairs).ok();
    let validity = global_validity(&[ValidityStudy { study_id: bundle.study_id.clone(), findings: validity_findings }]);

    let mut domain_scores: BTreeMap<String, Option<f64>> =
        [Domain::Cognition, Domain::Strategic, Domain::Social].iter().map(|d| (d.as_str().to_string(), None)).collect();
    domain_scores.insert(bundle.domain.as_str().to_string(), pas);

    Ok(EvaluationReport {
        schema_version: REPORT_SCHEMA_VERSION.to_string(),
        study_id: bundle.study_id.clone(),
        domain: bundle.domain,
        model: transcript.metadata.model.clone(),
        method: transcript.metadata.method.clone(),
        priors: *priors,
        epsilon: options.epsilon,
        pas,
        normalized_pas,
        tree,
        leaves: scored.leaves,
        exclusions: scored.exclusions,
        effect_exclusions: scored.effect_exclusions,
        ecs_global,
        ecs_findings,
        validity,
        compliance: compliance(transcript, bundle),
        domain_scores,
        effect_pairs,
        bootstrap_se: None,
        warnings: bundle.warnings.clone(),
    })
}

/// Participant-level bootstrap SE of the study PAS. Replicates whose PAS is
/// undefined are dropped before the SD is taken.
#[allow(clippy::too_many_arguments)]
pub fn bootstrap_study(
    bundle: &StudyBundle,
    transcript: &AgentTranscript,
    priors: &PriorSpec,
    options: &EvalOptions,
    b: usize,
    seed: u64,
    stream: u32,
    jobs: usize,
) -> Result<BootstrapSe, DriverError> {
    priors.validate().map_err(|e| DriverError::InvalidPriors(e.to_string()))?;
    let humans = human_sides(bundle, priors);
    let scorer = |sample: &[&crate::bundle::Participant]| {
        let resampled = AgentTranscript {
            individual_data: sample.iter().map(|p| (*p).clone()).collect(),
            ..transcript.clone()
        };
        study_pas(bundle, &resampled, priors, &humans, options.epsilon)
    };
    Ok(resample_se(&transcript.individual_data, scorer, b, seed, stream, jobs)?)
}

/// Benchmark PAS of one agent: arithmetic mean of the defined study scores.
pub fn agent_pas(runs: &[(&StudyBundle, &AgentTranscript)], priors: &PriorSpec, options: &EvalOptions) -> Option<f64> {
    let scores: Vec<f64> = runs
        .iter()
        .filter_map(|(b, t)| {
            let humans = human_sides(b, priors);
            study_pas(b, t, priors, &humans, options.epsilon)
        })
        .collect();
    if scores.is_empty() {
        None
    } else {
        Some(scores.iter().sum::<f64>() / scores.len() as f64)
    }
}

/// Re-score each agent (a list of bundle/transcript runs) across `r_grid`.
pub fn sensitivity(
    agents: &[Vec<(&StudyBundle, &AgentTranscript)>],
    base: PriorSpec,
    r_grid: &[f64],
    options: &EvalOptions,
    jobs: usize,
) -> Result<SensitivityReport, AggregateError> {
    sensitivity_sweep(agents.len(), base, r_grid, |a, p| agent_pas(&agents[a], p, options), jobs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardRow {
    pub model: String,
    pub method: String,
    pub studies: usize,
    pub pas: Option<f64>,
    pub pas_se: Option<f64>,
    pub ecs: Option<f64>,
    pub domains: BTreeMap<String, Option<f64>>,
}

fn mean(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        None
    } else {
        Some(v.iter().sum::<f64>() / v.len() as f64)
    }
}

/// `0.3041 (0.0078)` when an SE is known, `0.3041` otherwise, `NA` when undefined.
pub fn format_with_se(value: Option<f64>, se: Option<f64>) -> String {
    match (value, se) {
        (Some(v), Some(s)) => format!("{v:.4} ({s:.4})"),
        (Some(v), None) => format!("{v:.4}"),
        (None, _) => "NA".to_string(),
    }
}

/// One row per model × method. PAS is the mean of study PAS, ECS the global
/// concordance over the pooled effect pairs, domains the mean study PAS per
/// domain. Rows are sorted by PAS then ECS, both descending; ties keep
/// first-seen order.
pub fn leaderboard(reports: &[EvaluationReport]) -> Vec<LeaderboardRow> {
    let mut cells: Vec<((String, String), Vec<&EvaluationReport>)> = Vec::new();
    for r in reports {
        let key = (r.model.clone(), r.method.clone());
        match cells.iter_mut().find(|c| c.0 == key) {
            Some(c) => c.1.push(r),
            None => cells.push((key, vec![r])),
        }
    }
    let mut rows: Vec<LeaderboardRow> = cells
        .into_iter()
        .map(|((model, method), reps)| {
            let defined: Vec<&&EvaluationReport> = reps.iter().filter(|r| r.pas.is_some()).collect();
            let pas = mean(&defined.iter().filter_map(|r| r.pas).collect::<Vec<_>>());
            let ses: Option<Vec<f64>> = defined.iter().map(|r| r.bootstrap_se).collect();
            let pas_se = ses.filter(|s| !s.is_empty()).and_then(|s| propagate_total_se(&s));
            let pairs: Vec<EffectPair> = reps.iter().flat_map(|r| r.effect_pairs.iter().map(|p| p.pair.clone())).collect();
            let ecs = ecs_global(&pairs).ok().map(|c| c.value);
            let domains = [Domain::Cognition, Domain::Strategic, Domain::Social]
                .iter()
                .map(|d| {
                    let v: Vec<f64> = defined.iter().filter(|r| r.domain == *d).filter_map(|r| r.pas).collect();
                    (d.as_str().to_string(), mean(&v))
                })
                .collect();
            LeaderboardRow { model, method, studies: reps.len(), pas, pas_se, ecs, domains }
        })
        .collect();
    let key = |v: Option<f64>| v.unwrap_or(f64::NEG_INFINITY);
    rows.sort_by(|a, b| {
        key(b.pas).total_cmp(&key(a.pas)).then_with(|| key(b.ecs).total_cmp(&key(a.ecs)))
    });
    rows
}
