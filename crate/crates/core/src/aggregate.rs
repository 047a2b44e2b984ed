//! Hierarchical aggregation, global validity, bootstrap SEs and prior sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alignment::EffectPair;
use crate::dist::{Dist, normal_cdf};
use crate::evidence::PriorSpec;

pub const DEFAULT_EPSILON: f64 = 1e-6;
pub const DEFAULT_B: usize = 200;
// the conventional rounded "medium" scale, not 1/√2
#[allow(clippy::approx_constant)]
pub const BASELINE_R: f64 = 0.7071;
const P_CLAMP: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AggregateError {
    #[error("nothing to aggregate: {0}")]
    EmptyInput(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("need at least 2 participants to resample, got {0}")]
    TooFewParticipants(usize),
    #[error("ranking needs at least 2 agents, got {0}")]
    DegenerateRanking(usize),
    #[error("agent {0} has no defined score at r = {1}")]
    UndefinedScore(usize, f64),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Fisher-z combination: map `S` to `r = 2S − 1`, clamp to `[−1+ε, 1−ε]`,
/// average `atanh r` with the given weights, map back with `(tanh z̄ + 1)/2`.
pub fn fisher_combine(scores: &[f64], weights: Option<&[f64]>, epsilon: f64) -> Result<f64, AggregateError> {
    if scores.is_empty() {
        return Err(AggregateError::EmptyInput("no scores".into()));
    }
    if !(epsilon > 0.0 && epsilon <= 0.01) {
        return Err(AggregateError::InvalidArgument(format!("epsilon {epsilon} outside (0, 0.01]")));
    }
    if scores.iter().any(|s| !(0.0..=1.0).contains(s)) {
        return Err(AggregateError::InvalidArgument("scores must lie in [0, 1]".into()));
    }
    let unit = vec![1.0; scores.len()];
    let w = weights.unwrap_or(&unit);
    if w.len() != scores.len() || w.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(AggregateError::InvalidArgument("weights must be positive and match the scores".into()));
    }
    let total: f64 = w.iter().sum();
    let z: f64 = scores
        .iter()
        .zip(w)
        .map(|(s, wi)| wi * (2.0 * s - 1.0).clamp(-1.0 + epsilon, 1.0 - epsilon).atanh())
        .sum::<f64>()
        / total;
    Ok(((z.tanh() + 1.0) / 2.0).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestLeaf {
    pub key: String,
    /// `None` for tests that could not be scored.
    pub score: Option<f64>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FindingNode {
    pub finding_id: String,
    pub weight: f64,
    pub tests: Vec<TestLeaf>,
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyNode {
    pub study_id: String,
    pub domain: Option<String>,
    pub findings: Vec<FindingNode>,
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScoreTree {
    pub studies: Vec<StudyNode>,
    pub benchmark: Option<f64>,
}

fn combine_defined(items: impl Iterator<Item = (Option<f64>, f64)>, epsilon: f64) -> Result<Option<f64>, AggregateError> {
    let (scores, weights): (Vec<f64>, Vec<f64>) = items.filter_map(|(s, w)| s.map(|s| (s, w))).unzip();
    if scores.is_empty() {
        return Ok(None);
    }
    fisher_combine(&scores, Some(&weights), epsilon).map(Some)
}

/// Fill finding, study and benchmark scores. Tests combine into findings and
/// findings into studies by weighted Fisher-z; studies average arithmetically.
/// Nodes without any scored child stay `None`.
pub fn benchmark_pas(tree: &ScoreTree, epsilon: f64) -> Result<ScoreTree, AggregateError> {
    if tree.studies.is_empty() {
        return Err(AggregateError::EmptyInput("tree has no studies".into()));
    }
    let mut out = tree.clone();
    for study in &mut out.studies {
        for finding in &mut study.findings {
            finding.score = combine_defined(finding.tests.iter().map(|t| (t.score, t.weight)), epsilon)?;
        }
        study.score = combine_defined(study.findings.iter().map(|f| (f.score, f.weight)), epsilon)?;
    }
    let defined: Vec<f64> = out.studies.iter().filter_map(|s| s.score).collect();
    out.benchmark = if defined.is_empty() { None } else { Some(defined.iter().sum::<f64>() / defined.len() as f64) };
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityFinding {
    pub finding_id: String,
    pub pairs: Vec<EffectPair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityStudy {
    pub study_id: String,
    pub findings: Vec<ValidityFinding>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FindingValidity {
    pub finding_id: String,
    pub z: Vec<f64>,
    pub chi2: f64,
    pub k: usize,
    pub p: f64,
    pub z_star: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyValidity {
    pub study_id: String,
    pub z_study: f64,
    pub findings: Vec<FindingValidity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalValidity {
    pub p_global: Option<f64>,
    pub z_benchmark: Option<f64>,
    pub studies: Vec<StudyValidity>,
    /// `study/finding` ids with no usable effect pair.
    pub skipped_findings: Vec<String>,
}

fn standardized_difference(p: &EffectPair) -> Option<f64> {
    let (da, dh) = (p.agent.d, p.human.d);
    let se = (p.agent.se.powi(2) + p.human.se.powi(2)).sqrt();
    if !(da.is_finite() && dh.is_finite()) || se.is_nan() {
        return None;
    }
    if se == 0.0 {
        return Some(if da == dh { 0.0 } else { (da - dh).signum() * f64::INFINITY });
    }
    Some((da - dh) / se)
}

/// Four-level test of agent/human effect agreement: per-test standardized
/// differences, per-finding χ², per-study Stouffer, benchmark Stouffer.
pub fn global_validity(studies: &[ValidityStudy]) -> GlobalValidity {
    let mut out = GlobalValidity { p_global: None, z_benchmark: None, studies: Vec::new(), skipped_findings: Vec::new() };
    for study in studies {
        let mut findings = Vec::new();
        for f in &study.findings {
            let z: Vec<f64> = f.pairs.iter().filter_map(standardized_difference).collect();
            if z.is_empty() {
                out.skipped_findings.push(format!("{}/{}", study.study_id, f.finding_id));
                continue;
            }
            let chi2: f64 = z.iter().map(|v| v * v).sum();
            let (cdf, sf) = Dist::ChiSquare { df: z.len() as f64 }.tails(chi2);
            let p = sf.clamp(P_CLAMP, 1.0 - P_CLAMP);
            let lower = cdf.clamp(P_CLAMP, 1.0 - P_CLAMP);
            let z_star = Dist::Normal.quantile_tails(lower, p);
            findings.push(FindingValidity { finding_id: f.finding_id.clone(), k: z.len(), z, chi2, p, z_star });
        }
        if findings.is_empty() {
            continue;
        }
        let z_study = findings.iter().map(|f| f.z_star).sum::<f64>() / (findings.len() as f64).sqrt();
        out.studies.push(StudyValidity { study_id: study.study_id.clone(), z_study, findings });
    }
    if !out.studies.is_empty() {
        let z = out.studies.iter().map(|s| s.z_study).sum::<f64>() / (out.studies.len() as f64).sqrt();
        out.z_benchmark = Some(z);
        out.p_global = Some(normal_cdf(-z));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSe {
    pub se: Option<f64>,
    pub replicates: Vec<Option<f64>>,
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, AggregateError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| AggregateError::Pool(e.to_string()))
}

/// Sample standard deviation (n − 1 denominator).
pub fn sample_sd(v: &[f64]) -> Option<f64> {
    if v.len() < 2 {
        return None;
    }
    let m = v.iter().sum::<f64>() / v.len() as f64;
    Some((v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt())
}

/// Participant-level bootstrap: `b` resamples of `units` with replacement,
/// each scored by `scorer`. Replicate `i` draws from its own ChaCha stream
/// derived from `(seed, stream, i)`, so results do not depend on `jobs`.
pub fn resample_se<T, F>(units: &[T], scorer: F, b: usize, seed: u64, stream: u32, jobs: usize) -> Result<BootstrapSe, AggregateError>
where
    T: Sync,
    F: Fn(&[&T]) -> Option<f64> + Sync,
{
    if units.len() < 2 {
        return Err(AggregateError::TooFewParticipants(units.len()));
    }
    if b < 2 {
        return Err(AggregateError::InvalidArgument(format!("B must be at least 2, got {b}")));
    }
    let n = units.len();
    let replicate = |i: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(((stream as u64) << 32) | i as u64);
        let sample: Vec<&T> = (0..n).map(|_| &units[rng.random_range(0..n)]).collect();
        scorer(&sample)
    };
    let replicates: Vec<Option<f64>> = pool(jobs)?.install(|| (0..b).into_par_iter().map(replicate).collect());
    let defined: Vec<f64> = replicates.iter().flatten().copied().collect();
    Ok(BootstrapSe { se: sample_sd(&defined), replicates })
}

/// SE of a mean of `K` independent scores: `sqrt(Σ SE²)/K`.
pub fn propagate_total_se(ses: &[f64]) -> Option<f64> {
    if ses.is_empty() {
        return None;
    }
    Some(ses.iter().map(|s| s * s).sum::<f64>().sqrt() / ses.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub r: f64,
    pub pas: Vec<f64>,
    /// `None` when either ranking is constant.
    pub spearman_rho: Option<f64>,
    pub mean_delta_pas: f64,
    pub max_delta_pas: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub baseline_r: f64,
    pub r_grid: Vec<f64>,
    pub rows: Vec<SensitivityRow>,
    /// All agents tie at the baseline, so rank correlations are undefined.
    pub degenerate_ranking: bool,
}

/// Ranks starting at 1 with ties sharing their average rank.
pub fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman's ρ as the Pearson correlation of average ranks.
pub fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    let n = ra.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Re-score every agent at each `r_t` in `r_grid` and compare with the
/// baseline ranking. `score(agent, priors)` returns the benchmark PAS.
pub fn sensitivity_sweep<F>(n_agents: usize, base: PriorSpec, r_grid: &[f64], score: F, jobs: usize) -> Result<SensitivityReport, AggregateError>
where
    F: Fn(usize, &PriorSpec) -> Option<f64> + Sync,
{
    if n_agents < 2 {
        return Err(AggregateError::DegenerateRanking(n_agents));
    }
    if !r_grid.iter().any(|r| (r - BASELINE_R).abs() < 1e-9) {
        return Err(AggregateError::InvalidArgument(format!("grid must include the baseline {BASELINE_R}")));
    }
    for &r in r_grid {
        PriorSpec::new(r, base.r_anova).map_err(|e| AggregateError::InvalidArgument(e.to_string()))?;
    }
    let cells: Vec<(usize, usize)> = (0..r_grid.len()).flat_map(|g| (0..n_agents).map(move |a| (g, a))).collect();
    let values: Vec<Option<f64>> = pool(jobs)?.install(|| {
        cells
            .par_iter()
            .map(|&(g, a)| score(a, &PriorSpec { r_t: r_grid[g], r_anova: base.r_anova }))
            .collect()
    });
    let mut table = vec![vec![0.0; n_agents]; r_grid.len()];
    for (&(g, a), v) in cells.iter().zip(values) {
        table[g][a] = v.ok_or(AggregateError::UndefinedScore(a, r_grid[g]))?;
    }
    let base_idx = r_grid.iter().position(|r| (r - BASELINE_R).abs() < 1e-9).expect("checked above");
    let baseline = table[base_idx].clone();
    let degenerate_ranking = baseline.iter().all(|v| *v == baseline[0]);
    let rows = r_grid
        .iter()
        .zip(&table)
        .map(|(&r, pas)| {
            let deltas: Vec<f64> = pas.iter().zip(&baseline).map(|(a, b)| (a - b).abs()).collect();
            SensitivityRow {
                r,
                pas: pas.clone(),
                spearman_rho: spearman(&baseline, pas),
                mean_delta_pas: deltas.iter().sum::<f64>() / deltas.len() as f64,
                max_delta_pas: deltas.iter().copied().fold(0.0, f64::max),
            }
        })
        .collect();
    Ok(SensitivityReport { baseline_r: BASELINE_R, r_grid: r_grid.to_vec(), rows, degenerate_ranking })
}
