//! Test-level agreement scores and concordance of effect sizes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::effect_size::EffectSize;
use crate::evidence::{DirectionalPosterior, Posterior};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlignError {
    #[error("vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 values, got {0}")]
    TooFew(usize),
    #[error("weights must be positive and finite")]
    BadWeight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Test,
    Finding,
    Study,
    Benchmark,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignmentScore {
    pub value: f64,
    pub level: Level,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectPair {
    pub human: EffectSize,
    pub agent: EffectSize,
    pub weight: f64,
}

/// A concordance value plus a flag for the degenerate conventions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Concordance {
    pub value: f64,
    /// Set when a vector was constant (value 0) or all inputs coincided (value 1).
    pub degenerate: bool,
}

/// `S = π_h π_a + (1 − π_h)(1 − π_a)`.
pub fn pas_test(pi_h: Posterior, pi_a: Posterior) -> AlignmentScore {
    let (h, a) = (pi_h.pi, pi_a.pi);
    AlignmentScore { value: (h * a + (1.0 - h) * (1.0 - a)).clamp(0.0, 1.0), level: Level::Test }
}

/// Dot product of the (H+, H−, H0) posterior vectors.
pub fn pas_directional(h: DirectionalPosterior, a: DirectionalPosterior) -> AlignmentScore {
    let v = h.p_pos * a.p_pos + h.p_neg * a.p_neg + h.p_null * a.p_null;
    AlignmentScore { value: v.clamp(0.0, 1.0), level: Level::Test }
}

fn weighted_ccc(h: &[f64], a: &[f64], w: &[f64]) -> Concordance {
    let total: f64 = w.iter().sum();
    let mean = |v: &[f64]| v.iter().zip(w).map(|(x, wi)| x * wi).sum::<f64>() / total;
    let (mh, ma) = (mean(h), mean(a));
    let mut shh = 0.0;
    let mut saa = 0.0;
    let mut sha = 0.0;
    for ((x, y), wi) in h.iter().zip(a).zip(w) {
        let (uh, ua) = (x - mh, y - ma);
        shh += wi * uh * uh;
        saa += wi * ua * ua;
        sha += wi * uh * ua;
    }
    (shh, saa, sha) = (shh / total, saa / total, sha / total);
    let gap = (ma - mh).powi(2);
    let denom = shh + saa + gap;
    if denom == 0.0 {
        return Concordance { value: 1.0, degenerate: true };
    }
    Concordance { value: (2.0 * sha / denom).clamp(-1.0, 1.0), degenerate: false }
}

/// Lin's concordance correlation with population variances.
///
/// A constant vector gives 0 with the degenerate flag set.
pub fn ecs_finding(h: &[f64], a: &[f64]) -> Result<Concordance, AlignError> {
    if h.len() != a.len() {
        return Err(AlignError::LengthMismatch(h.len(), a.len()));
    }
    if h.len() < 2 {
        return Err(AlignError::TooFew(h.len()));
    }
    let constant = |v: &[f64]| v.iter().all(|x| *x == v[0]);
    if constant(h) || constant(a) {
        return Ok(Concordance { value: 0.0, degenerate: true });
    }
    Ok(weighted_ccc(h, a, &vec![1.0; h.len()]))
}

/// Weighted concordance over all effect pairs, centred on weighted means.
///
/// When both weighted variances and the mean gap vanish the result is 1 with
/// the degenerate flag set.
pub fn ecs_global(pairs: &[EffectPair]) -> Result<Concordance, AlignError> {
    if pairs.len() < 2 {
        return Err(AlignError::TooFew(pairs.len()));
    }
    if pairs.iter().any(|p| !(p.weight > 0.0 && p.weight.is_finite())) {
        return Err(AlignError::BadWeight);
    }
    let h: Vec<f64> = pairs.iter().map(|p| p.human.d).collect();
    let a: Vec<f64> = pairs.iter().map(|p| p.agent.d).collect();
    let w: Vec<f64> = pairs.iter().map(|p| p.weight).collect();
    Ok(weighted_ccc(&h, &a, &w))
}

/// Empirical variances of the soft score `σ(L)` and the hard score `1[L > 0]`
/// for `L ~ Normal(0, sigma)`.
pub fn estimator_variances(sigma: f64, draws: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("finite sigma");
    let mut soft = Vec::with_capacity(draws);
    let mut hard = Vec::with_capacity(draws);
    for _ in 0..draws {
        let l: f64 = normal.sample(&mut rng);
        soft.push(1.0 / (1.0 + (-l).exp()));
        hard.push(if l > 0.0 { 1.0 } else { 0.0 });
    }
    let var = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64
    };
    (var(&soft), var(&hard))
}
